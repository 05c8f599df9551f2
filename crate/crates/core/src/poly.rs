//! Sparse multivariate polynomials, binary forms and dense univariate
//! polynomials over binary fields.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{Embedding, Field};
use crate::ring::{determinant, Ring};

/// Exponent vector, ordered degree-lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u16>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }
    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }
    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| other.0.cmp(&self.0))
    }
}
impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Polynomial with coefficients of type `C`; no zero coefficients are stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SparsePoly<C> {
    nvars: usize,
    terms: BTreeMap<Monomial, C>,
}

impl<C: Clone> SparsePoly<C> {
    pub fn zero(nvars: usize) -> Self {
        SparsePoly { nvars, terms: BTreeMap::new() }
    }
    pub fn nvars(&self) -> usize {
        self.nvars
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn len(&self) -> usize {
        self.terms.len()
    }
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }
    pub fn coeff<R: Ring<El = C>>(&self, ring: &R, exps: &[u16]) -> C {
        self.terms.get(&Monomial(exps.to_vec())).cloned().unwrap_or_else(|| ring.zero())
    }
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }
    /// `Some(d)` iff every term has degree d (the zero polynomial is `None`).
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degs = self.terms.keys().map(Monomial::degree);
        let d = degs.next()?;
        degs.all(|e| e == d).then_some(d)
    }
    pub fn degree_in(&self, var: usize) -> u16 {
        self.terms.keys().map(|m| m.0[var]).max().unwrap_or(0)
    }
}

impl<C: Clone + PartialEq> SparsePoly<C> {
    pub fn from_terms<R: Ring<El = C>>(
        ring: &R,
        nvars: usize,
        terms: impl IntoIterator<Item = (Vec<u16>, C)>,
    ) -> Self {
        let mut p = SparsePoly::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent vector length");
            p.add_term(ring, Monomial(e), c);
        }
        p
    }

    pub fn constant<R: Ring<El = C>>(ring: &R, nvars: usize, c: C) -> Self {
        Self::from_terms(ring, nvars, [(vec![0; nvars], c)])
    }

    pub fn var<R: Ring<El = C>>(ring: &R, nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::from_terms(ring, nvars, [(e, ring.one())])
    }

    pub fn add_term<R: Ring<El = C>>(&mut self, ring: &R, m: Monomial, c: C) {
        if ring.is_zero(&c) {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(old) => {
                let s = ring.add(old, &c);
                if ring.is_zero(&s) {
                    self.terms.remove(&m);
                } else {
                    *old = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn add<R: Ring<El = C>>(&self, ring: &R, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(ring, m.clone(), c.clone());
        }
        out
    }

    pub fn neg<R: Ring<El = C>>(&self, ring: &R) -> Self {
        SparsePoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), ring.neg(c))).collect(),
        }
    }

    pub fn sub<R: Ring<El = C>>(&self, ring: &R, other: &Self) -> Self {
        self.add(ring, &other.neg(ring))
    }

    pub fn scale<R: Ring<El = C>>(&self, ring: &R, c: &C) -> Self {
        let mut out = SparsePoly::zero(self.nvars);
        for (m, a) in &self.terms {
            out.add_term(ring, m.clone(), ring.mul(a, c));
        }
        out
    }

    pub fn mul<R: Ring<El = C>>(&self, ring: &R, other: &Self) -> Self {
        let mut out = SparsePoly::zero(self.nvars);
        for (ma, a) in &self.terms {
            for (mb, b) in &other.terms {
                out.add_term(ring, ma.mul(mb), ring.mul(a, b));
            }
        }
        out
    }

    pub fn pow<R: Ring<El = C>>(&self, ring: &R, e: u32) -> Self {
        let mut r = Self::constant(ring, self.nvars, ring.one());
        for _ in 0..e {
            r = r.mul(ring, self);
        }
        r
    }

    /// Formal partial derivative; the exponent multiplies through the
    /// coefficient ring (so even exponents die in characteristic 2).
    pub fn derivative<R: Ring<El = C>>(&self, ring: &R, var: usize) -> Self {
        assert!(var < self.nvars, "variable index out of range");
        let mut out = SparsePoly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2.0[var] -= 1;
            out.add_term(ring, m2, ring.mul(&ring.from_int(e as i64), c));
        }
        out
    }

    pub fn eval<R: Ring<El = C>>(&self, ring: &R, point: &[C]) -> C {
        assert_eq!(point.len(), self.nvars);
        let mut acc = ring.zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (e, x) in m.0.iter().zip(point) {
                if *e > 0 {
                    t = ring.mul(&t, &ring.pow(x, *e as u32));
                }
            }
            acc = ring.add(&acc, &t);
        }
        acc
    }

    /// Replace variables by polynomials (in a possibly different number of
    /// variables). Unassigned variables must not occur when the target arity
    /// differs from the source arity.
    pub fn substitute<R: Ring<El = C>>(
        &self,
        ring: &R,
        target_nvars: usize,
        assignments: &[(usize, SparsePoly<C>)],
    ) -> Result<Self> {
        let mut images: Vec<Option<SparsePoly<C>>> = vec![None; self.nvars];
        for (v, img) in assignments {
            if *v >= self.nvars {
                return Err(Error::Usage(format!("variable index {v} out of range")));
            }
            if img.nvars != target_nvars {
                return Err(Error::Usage("substitution arity mismatch".into()));
            }
            images[*v] = Some(img.clone());
        }
        for (v, img) in images.iter_mut().enumerate() {
            if img.is_none() {
                if v >= target_nvars {
                    if self.degree_in(v) > 0 {
                        return Err(Error::Usage(format!("variable {v} left unassigned")));
                    }
                    continue;
                }
                *img = Some(SparsePoly::var(ring, target_nvars, v));
            }
        }
        // cache powers per variable
        let mut powers: Vec<Vec<SparsePoly<C>>> = Vec::with_capacity(self.nvars);
        for (v, img) in images.iter().enumerate() {
            let maxe = self.degree_in(v) as usize;
            let mut pw = vec![SparsePoly::constant(ring, target_nvars, ring.one())];
            if let Some(img) = img {
                for i in 1..=maxe {
                    let next = pw[i - 1].mul(ring, img);
                    pw.push(next);
                }
            }
            powers.push(pw);
        }
        let mut out = SparsePoly::zero(target_nvars);
        for (m, c) in &self.terms {
            let mut t = SparsePoly::constant(ring, target_nvars, c.clone());
            for (v, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = t.mul(ring, &powers[v][e as usize]);
                }
            }
            out = out.add(ring, &t);
        }
        Ok(out)
    }

    /// Coefficientwise ring change.
    pub fn map_coeffs<D: Clone + PartialEq, S: Ring<El = D>>(
        &self,
        target: &S,
        f: impl Fn(&C) -> D,
    ) -> SparsePoly<D> {
        let mut out = SparsePoly::zero(self.nvars);
        for (m, c) in &self.terms {
            out.add_term(target, m.clone(), f(c));
        }
        out
    }

    /// Restriction to the line {u a + v b} as a binary form of degree `deg`.
    pub fn restrict_to_line<R: Ring<El = C>>(
        &self,
        ring: &R,
        a: &[C],
        b: &[C],
        deg: usize,
    ) -> BinaryForm<C> {
        let linear: Vec<BinaryForm<C>> = a
            .iter()
            .zip(b)
            .map(|(x, y)| BinaryForm { coeffs: vec![y.clone(), x.clone()] })
            .collect();
        let mut acc = BinaryForm::zero(ring, deg);
        for (m, c) in &self.terms {
            let mut t = BinaryForm { coeffs: vec![c.clone()] };
            for (v, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    t = t.mul(ring, &linear[v]);
                }
            }
            acc = acc.add(ring, &t);
        }
        acc
    }
}

/// The polynomial ring in `nvars` variables over `base`, as a [`Ring`].
#[derive(Clone, Debug)]
pub struct PolyRing<R> {
    pub base: R,
    pub nvars: usize,
}

impl<R: Ring> Ring for PolyRing<R> {
    type El = SparsePoly<R::El>;
    fn zero(&self) -> Self::El {
        SparsePoly::zero(self.nvars)
    }
    fn one(&self) -> Self::El {
        SparsePoly::constant(&self.base, self.nvars, self.base.one())
    }
    fn add(&self, a: &Self::El, b: &Self::El) -> Self::El {
        a.add(&self.base, b)
    }
    fn neg(&self, a: &Self::El) -> Self::El {
        a.neg(&self.base)
    }
    fn mul(&self, a: &Self::El, b: &Self::El) -> Self::El {
        a.mul(&self.base, b)
    }
    fn is_zero(&self, a: &Self::El) -> bool {
        a.is_zero()
    }
    fn from_bigint(&self, n: &BigInt) -> Self::El {
        SparsePoly::constant(&self.base, self.nvars, self.base.from_bigint(n))
    }
}

/// Binary form; `coeffs[i]` is the coefficient of u^i v^(d-i).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BinaryForm<C> {
    pub coeffs: Vec<C>,
}

impl<C: Clone + PartialEq> BinaryForm<C> {
    pub fn zero<R: Ring<El = C>>(ring: &R, deg: usize) -> Self {
        BinaryForm { coeffs: vec![ring.zero(); deg + 1] }
    }
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }
    pub fn is_zero<R: Ring<El = C>>(&self, ring: &R) -> bool {
        self.coeffs.iter().all(|c| ring.is_zero(c))
    }
    pub fn add<R: Ring<El = C>>(&self, ring: &R, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let z = ring.zero();
        BinaryForm {
            coeffs: (0..n)
                .map(|i| {
                    ring.add(self.coeffs.get(i).unwrap_or(&z), other.coeffs.get(i).unwrap_or(&z))
                })
                .collect(),
        }
    }
    pub fn scale<R: Ring<El = C>>(&self, ring: &R, c: &C) -> Self {
        BinaryForm { coeffs: self.coeffs.iter().map(|a| ring.mul(a, c)).collect() }
    }
    pub fn mul<R: Ring<El = C>>(&self, ring: &R, other: &Self) -> Self {
        let mut out = vec![ring.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if ring.is_zero(a) {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = ring.add(&out[i + j], &ring.mul(a, b));
            }
        }
        BinaryForm { coeffs: out }
    }
    pub fn eval<R: Ring<El = C>>(&self, ring: &R, u: &C, v: &C) -> C {
        let d = self.degree() as u32;
        let mut acc = ring.zero();
        for (i, c) in self.coeffs.iter().enumerate() {
            let t = ring.mul(c, &ring.mul(&ring.pow(u, i as u32), &ring.pow(v, d - i as u32)));
            acc = ring.add(&acc, &t);
        }
        acc
    }
    /// Partial derivative in u (degree d-1).
    pub fn d_u<R: Ring<El = C>>(&self, ring: &R) -> Self {
        if self.degree() == 0 {
            return BinaryForm::zero(ring, 0);
        }
        BinaryForm {
            coeffs: (1..self.coeffs.len())
                .map(|i| ring.mul(&ring.from_int(i as i64), &self.coeffs[i]))
                .collect(),
        }
    }
    /// Partial derivative in v (degree d-1).
    pub fn d_v<R: Ring<El = C>>(&self, ring: &R) -> Self {
        let d = self.degree();
        if d == 0 {
            return BinaryForm::zero(ring, 0);
        }
        BinaryForm {
            coeffs: (0..d).map(|i| ring.mul(&ring.from_int((d - i) as i64), &self.coeffs[i])).collect(),
        }
    }
}

/// Sylvester matrix of two binary forms taken at their formal degrees.
pub fn sylvester_matrix<R: Ring>(
    ring: &R,
    p: &BinaryForm<R::El>,
    q: &BinaryForm<R::El>,
) -> Vec<Vec<R::El>> {
    let (m, n) = (p.degree(), q.degree());
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    // columns indexed by powers of u from high to low
    for shift in 0..n {
        let mut row = vec![ring.zero(); size];
        for i in 0..=m {
            row[shift + (m - i)] = p.coeffs[i].clone();
        }
        rows.push(row);
    }
    for shift in 0..m {
        let mut row = vec![ring.zero(); size];
        for i in 0..=n {
            row[shift + (n - i)] = q.coeffs[i].clone();
        }
        rows.push(row);
    }
    rows
}

/// Resultant of two binary forms (determinant of the Sylvester matrix).
pub fn resultant<R: Ring>(ring: &R, p: &BinaryForm<R::El>, q: &BinaryForm<R::El>) -> Result<R::El> {
    if p.is_zero(ring) || q.is_zero(ring) {
        return Err(Error::Usage("resultant of a zero form".into()));
    }
    Ok(determinant(ring, &sylvester_matrix(ring, p, q)))
}

/// Dense univariate polynomials over a binary field (`p[i]` = coefficient of x^i,
/// trimmed: no trailing zeros, zero polynomial = empty vector).
pub mod upoly {
    use super::*;

    pub fn trim(mut p: Vec<u32>) -> Vec<u32> {
        while p.last() == Some(&0) {
            p.pop();
        }
        p
    }

    pub fn degree(p: &[u32]) -> Option<usize> {
        p.iter().rposition(|&c| c != 0)
    }

    pub fn add(a: &[u32], b: &[u32]) -> Vec<u32> {
        let n = a.len().max(b.len());
        trim((0..n).map(|i| a.get(i).unwrap_or(&0) ^ b.get(i).unwrap_or(&0)).collect())
    }

    pub fn mul(f: &Field, a: &[u32], b: &[u32]) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let mut out = vec![0u32; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] ^= f.mul(x, y);
            }
        }
        trim(out)
    }

    pub fn scale(f: &Field, a: &[u32], c: u32) -> Vec<u32> {
        trim(a.iter().map(|&x| f.mul(x, c)).collect())
    }

    pub fn divrem(f: &Field, a: &[u32], b: &[u32]) -> Result<(Vec<u32>, Vec<u32>)> {
        let b = trim(b.to_vec());
        let db = degree(&b).ok_or(Error::DivisionByZero)?;
        let lead_inv = f.inv(b[db])?;
        let mut r = trim(a.to_vec());
        let mut q = vec![0u32; r.len().saturating_sub(db).max(1)];
        while let Some(dr) = degree(&r) {
            if dr < db {
                break;
            }
            let c = f.mul(r[dr], lead_inv);
            q[dr - db] = c;
            for i in 0..=db {
                r[dr - db + i] ^= f.mul(c, b[i]);
            }
            r = trim(r);
        }
        Ok((trim(q), r))
    }

    /// Monic gcd (empty if both are zero).
    pub fn gcd(f: &Field, a: &[u32], b: &[u32]) -> Vec<u32> {
        let mut a = trim(a.to_vec());
        let mut b = trim(b.to_vec());
        while !b.is_empty() {
            let (_, r) = divrem(f, &a, &b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        match degree(&a) {
            Some(d) => {
                let inv = f.inv(a[d]).unwrap();
                scale(f, &a, inv)
            }
            None => a,
        }
    }

    pub fn eval(f: &Field, p: &[u32], x: u32) -> u32 {
        f.eval_poly(p, x)
    }

    pub fn derivative(p: &[u32]) -> Vec<u32> {
        trim((1..p.len()).map(|i| if i % 2 == 1 { p[i] } else { 0 }).collect())
    }

    /// p(x + c).
    pub fn shift(f: &Field, p: &[u32], c: u32) -> Vec<u32> {
        let mut out: Vec<u32> = vec![];
        for &coef in p.iter().rev() {
            // out = out * (x + c) + coef
            out = mul(f, &out, &[c, 1]);
            out = add(&out, &[coef]);
        }
        out
    }

    /// Multiplicity of x = r as a root (p nonzero).
    pub fn root_multiplicity(f: &Field, p: &[u32], r: u32) -> usize {
        let mut p = trim(p.to_vec());
        let mut m = 0;
        while degree(&p).is_some_and(|d| d > 0) && eval(f, &p, r) == 0 {
            p = crate::field::deflate(f, &p, r);
            m += 1;
        }
        m
    }

    /// Largest power of x dividing p (`None` for the zero polynomial).
    pub fn x_adic_valuation(p: &[u32]) -> Option<usize> {
        p.iter().position(|&c| c != 0)
    }

    pub fn embed(e: &Embedding, p: &[u32]) -> Vec<u32> {
        p.iter().map(|&c| e.apply(c)).collect()
    }

    /// Distinct roots of a polynomial of degree <= 2 in closed form, with multiplicity.
    pub fn small_roots(f: &Field, p: &[u32]) -> Vec<u32> {
        match degree(p) {
            None | Some(0) => vec![],
            Some(1) => vec![f.div(p[0], p[1]).unwrap()],
            Some(2) => {
                let inv = f.inv(p[2]).unwrap();
                f.quadratic_roots(f.mul(p[1], inv), f.mul(p[0], inv))
            }
            _ => crate::field::find_roots(f, p)
                .unwrap()
                .into_iter()
                .flat_map(|(r, m)| std::iter::repeat_n(r, m))
                .collect(),
        }
    }
}

/// Univariate polynomials over a field as a [`Ring`] (used for coefficients in the pencil parameter).
#[derive(Clone, Debug)]
pub struct UniPolyRing {
    pub field: Field,
}

impl Ring for UniPolyRing {
    type El = Vec<u32>;
    fn zero(&self) -> Vec<u32> {
        vec![]
    }
    fn one(&self) -> Vec<u32> {
        vec![1]
    }
    fn add(&self, a: &Vec<u32>, b: &Vec<u32>) -> Vec<u32> {
        upoly::add(a, b)
    }
    fn neg(&self, a: &Vec<u32>) -> Vec<u32> {
        a.clone()
    }
    fn mul(&self, a: &Vec<u32>, b: &Vec<u32>) -> Vec<u32> {
        upoly::mul(&self.field, a, b)
    }
    fn is_zero(&self, a: &Vec<u32>) -> bool {
        a.is_empty()
    }
    fn from_bigint(&self, n: &BigInt) -> Vec<u32> {
        upoly::trim(vec![self.field.from_bigint(n)])
    }
}

/// Dehomogenize at v = 1 (coefficient of u^i at index i), trimmed.
fn dehomogenize(form: &BinaryForm<u32>) -> Vec<u32> {
    upoly::trim(form.coeffs.clone())
}

/// Whether a family of binary forms over a field has a common projective zero
/// over the algebraic closure. Zero forms impose no condition.
pub fn binary_forms_have_common_zero(f: &Field, forms: &[BinaryForm<u32>]) -> bool {
    let nonzero: Vec<&BinaryForm<u32>> = forms.iter().filter(|b| !b.is_zero(f)).collect();
    if nonzero.is_empty() {
        return true;
    }
    // common zero at [1:0] iff every top coefficient vanishes
    if nonzero.iter().all(|b| *b.coeffs.last().unwrap() == 0) {
        return true;
    }
    let mut g = dehomogenize(nonzero[0]);
    for b in &nonzero[1..] {
        g = upoly::gcd(f, &g, &dehomogenize(b));
    }
    upoly::degree(&g).is_some_and(|d| d >= 1)
}

/// Outcome of [`squarefree_test`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquarefreeVerdict {
    pub squarefree: bool,
    /// For a pure power: the base polynomial w with p = w^(2^j).
    pub witness: Option<SparsePoly<u32>>,
    pub power: u32,
}

/// Square root in characteristic 2 of a polynomial all of whose exponents are even.
fn char2_sqrt(f: &Field, p: &SparsePoly<u32>) -> Option<SparsePoly<u32>> {
    let mut out = SparsePoly::zero(p.nvars());
    for (m, &c) in p.terms() {
        if m.0.iter().any(|e| e % 2 == 1) {
            return None;
        }
        out.add_term(f, Monomial(m.0.iter().map(|e| e / 2).collect()), f.sqrt(c));
    }
    Some(out)
}

/// Decide whether a homogeneous polynomial over a binary field has a repeated factor.
///
/// First strips squares while all partials vanish (p = w^(2^j)). Otherwise
/// p has a repeated factor iff its singular scheme (p and all partials) has
/// codimension one, which is detected by restricting p and its gradient to
/// pseudorandom lines over a large extension: a line missing the singular
/// locus certifies squarefreeness.
pub fn squarefree_test(f: &Field, p: &SparsePoly<u32>) -> Result<SquarefreeVerdict> {
    if p.is_zero() {
        return Err(Error::Usage("squarefree test of the zero polynomial".into()));
    }
    let n = p.nvars();
    let all_partials_vanish =
        |q: &SparsePoly<u32>| (0..n).all(|i| q.derivative(f, i).is_zero());
    if p.total_degree().unwrap_or(0) >= 2 && all_partials_vanish(p) {
        let mut w = p.clone();
        let mut power = 1;
        while w.total_degree().unwrap_or(0) >= 2 && all_partials_vanish(&w) {
            w = char2_sqrt(f, &w)
                .ok_or_else(|| Error::Internal("vanishing gradient without even exponents".into()))?;
            power *= 2;
        }
        return Ok(SquarefreeVerdict { squarefree: false, witness: Some(w), power });
    }
    let d = p.homogeneous_degree().ok_or_else(|| Error::Usage("polynomial is not homogeneous".into()))?
        as usize;
    let grads: Vec<SparsePoly<u32>> = (0..n).map(|i| p.derivative(f, i)).collect();
    if n <= 2 {
        // binary (or unary) form: exact
        let (a, b): (Vec<u32>, Vec<u32>) = if n == 2 { (vec![1, 0], vec![0, 1]) } else { (vec![1], vec![0]) };
        let mut forms = vec![p.restrict_to_line(f, &a, &b, d)];
        for g in &grads {
            forms.push(g.restrict_to_line(f, &a, &b, d.saturating_sub(1)));
        }
        let repeated = if n == 1 { d >= 2 } else { binary_forms_have_common_zero(f, &forms) };
        return Ok(SquarefreeVerdict { squarefree: !repeated, witness: None, power: 1 });
    }
    let k = f.degree();
    let big = Field::standard(k * (16 / k))?;
    let emb = Embedding::new(f, &big)?;
    let pb = p.map_coeffs(&big, |&c| emb.apply(c));
    let gb: Vec<SparsePoly<u32>> = grads.iter().map(|g| g.map_coeffs(&big, |&c| emb.apply(c))).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0f_c0ffee);
    const TRIALS: usize = 6;
    for _ in 0..TRIALS {
        let a: Vec<u32> = (0..n).map(|_| rng.gen_range(0..big.size())).collect();
        let b: Vec<u32> = (0..n).map(|_| rng.gen_range(0..big.size())).collect();
        let mut forms = vec![pb.restrict_to_line(&big, &a, &b, d)];
        for g in &gb {
            forms.push(g.restrict_to_line(&big, &a, &b, d - 1));
        }
        if !binary_forms_have_common_zero(&big, &forms) {
            return Ok(SquarefreeVerdict { squarefree: true, witness: None, power: 1 });
        }
    }
    Ok(SquarefreeVerdict { squarefree: false, witness: None, power: 1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::Integers;
    use proptest::prelude::*;

    fn gf(k: u32) -> Field {
        Field::standard(k).unwrap()
    }

    fn uni(f: &Field, coeffs: &[u32]) -> SparsePoly<u32> {
        SparsePoly::from_terms(f, 1, coeffs.iter().enumerate().map(|(i, &c)| (vec![i as u16], c)))
    }

    #[test]
    fn derivatives() {
        let f2 = gf(1);
        let p = uni(&f2, &[1, 1, 1, 1]);
        assert_eq!(p.derivative(&f2, 0), uni(&f2, &[1, 0, 1]));
        assert!(uni(&f2, &[0, 0, 0, 0, 1]).derivative(&f2, 0).is_zero());
        let z = Integers;
        let x3 = SparsePoly::from_terms(&z, 1, [(vec![3], BigInt::from(1))]);
        assert_eq!(
            x3.derivative(&z, 0),
            SparsePoly::from_terms(&z, 1, [(vec![2], BigInt::from(3))])
        );
    }

    #[test]
    fn resultants() {
        let f2 = gf(1);
        // u^3 vs v^3: coeffs index = power of u
        let u3 = BinaryForm { coeffs: vec![0, 0, 0, 1] };
        let v3 = BinaryForm { coeffs: vec![1, 0, 0, 0] };
        assert_eq!(resultant(&f2, &u3, &v3).unwrap(), 1);
        let x2 = BinaryForm { coeffs: vec![0, 0, 1] };
        let xp1 = BinaryForm { coeffs: vec![1, 1] };
        assert_eq!(resultant(&f2, &x2, &xp1).unwrap(), 1);
        let z = Integers;
        let l = BinaryForm { coeffs: vec![BigInt::from(-1), BigInt::from(1)] };
        assert_eq!(resultant(&z, &l, &l).unwrap(), BigInt::from(0));
        assert!(resultant(&f2, &BinaryForm { coeffs: vec![0, 0] }, &xp1).is_err());
    }

    #[test]
    fn substitution_examples() {
        let f4 = gf(2);
        // variables x1..x4 and lambda as x5
        let n = 5;
        let x = |i| SparsePoly::var(&f4, n, i);
        let p = x(3).mul(&f4, &x(1).pow(&f4, 3));
        let q = p.substitute(&f4, n, &[(3, x(4).mul(&f4, &x(2)))]).unwrap();
        let expected = x(4).mul(&f4, &x(2)).mul(&f4, &x(1).pow(&f4, 3));
        assert_eq!(q, expected);
        let xy = SparsePoly::from_terms(&f4, 2, [(vec![1, 1], 1)]);
        assert_eq!(xy.eval(&f4, &[1, 2]), 2);
        assert!(p.substitute(&f4, n, &[(7, x(0))]).is_err());
    }

    #[test]
    fn squarefree_examples() {
        let f2 = gf(1);
        let lin = SparsePoly::from_terms(&f2, 4, (0..4).map(|i| {
            let mut e = vec![0; 4];
            e[i] = 1;
            (e, 1)
        }));
        let fermat = lin.pow(&f2, 4);
        let v = squarefree_test(&f2, &fermat).unwrap();
        assert!(!v.squarefree);
        assert_eq!(v.witness.as_ref(), Some(&lin));
        assert_eq!(v.power, 4);

        let prod = SparsePoly::from_terms(&f2, 4, [(vec![1, 1, 1, 1], 1)]);
        assert!(squarefree_test(&f2, &prod).unwrap().squarefree);

        let sq = SparsePoly::from_terms(&f2, 4, [(vec![2, 2, 0, 0], 1), (vec![0, 0, 4, 0], 1)]);
        let v = squarefree_test(&f2, &sq).unwrap();
        assert!(!v.squarefree);
        assert_eq!(v.power, 2);

        // x1^2 * (x2 x3 + x4^2 + x1 x2): repeated linear factor, gradient nonzero
        let q = SparsePoly::from_terms(&f2, 4, [(vec![0, 1, 1, 0], 1), (vec![0, 0, 0, 2], 1), (vec![1, 1, 0, 0], 1)]);
        let x1sq = SparsePoly::from_terms(&f2, 4, [(vec![2, 0, 0, 0], 1)]);
        let v = squarefree_test(&f2, &x1sq.mul(&f2, &q)).unwrap();
        assert!(!v.squarefree);
        assert!(v.witness.is_none());
    }

    #[test]
    fn binary_form_squarefree() {
        let f2 = gf(1);
        let uv = SparsePoly::from_terms(&f2, 2, [(vec![1, 1], 1)]);
        assert!(squarefree_test(&f2, &uv).unwrap().squarefree);
        let u2v = SparsePoly::from_terms(&f2, 2, [(vec![2, 1], 1)]);
        assert!(!squarefree_test(&f2, &u2v).unwrap().squarefree);
    }

    #[test]
    fn univariate_helpers() {
        let f = gf(4);
        let p = upoly::mul(&f, &[3, 1], &[5, 1]);
        assert_eq!(upoly::divrem(&f, &p, &[3, 1]).unwrap(), (vec![5, 1], vec![]));
        assert_eq!(upoly::gcd(&f, &p, &[3, 1]), vec![3, 1]);
        let shifted = upoly::shift(&f, &p, 3);
        assert_eq!(upoly::eval(&f, &shifted, 0), 0);
        assert_eq!(upoly::root_multiplicity(&f, &upoly::mul(&f, &p, &[3, 1]), 3), 2);
    }

    fn arb_poly(nvars: usize) -> impl Strategy<Value = Vec<(Vec<u16>, u32)>> {
        prop::collection::vec((prop::collection::vec(0u16..3, nvars), 0u32..16), 0..6)
    }

    proptest! {
        #[test]
        fn leibniz_rule(a in arb_poly(3), b in arb_poly(3), var in 0usize..3) {
            let f = gf(4);
            let p = SparsePoly::from_terms(&f, 3, a);
            let q = SparsePoly::from_terms(&f, 3, b);
            let lhs = p.mul(&f, &q).derivative(&f, var);
            let rhs = p.derivative(&f, var).mul(&f, &q).add(&f, &p.mul(&f, &q.derivative(&f, var)));
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn substitution_is_a_ring_map(a in arb_poly(3), b in arb_poly(3), s0 in arb_poly(3), s1 in arb_poly(3)) {
            let f = gf(4);
            let p = SparsePoly::from_terms(&f, 3, a);
            let q = SparsePoly::from_terms(&f, 3, b);
            let sigma = [(0, SparsePoly::from_terms(&f, 3, s0)), (1, SparsePoly::from_terms(&f, 3, s1))];
            let sub = |r: &SparsePoly<u32>| r.substitute(&f, 3, &sigma).unwrap();
            prop_assert_eq!(sub(&p.add(&f, &q)), sub(&p).add(&f, &sub(&q)));
            prop_assert_eq!(sub(&p.mul(&f, &q)), sub(&p).mul(&f, &sub(&q)));
        }

        #[test]
        fn resultant_detects_common_roots(r1 in 0u32..16, r2 in 0u32..16, r3 in 0u32..16, r4 in 0u32..16) {
            // (u + r1 v)(u + r2 v) and (u + r3 v)(u + r4 v) share a root iff the roots meet
            let f = gf(4);
            let lin = |r: u32| BinaryForm { coeffs: vec![r, 1] };
            let p = lin(r1).mul(&f, &lin(r2));
            let q = lin(r3).mul(&f, &lin(r4));
            let res = resultant(&f, &p, &q).unwrap();
            let share = [r1, r2].iter().any(|x| [r3, r4].contains(x));
            prop_assert_eq!(res == 0, share);
        }
    }
}
