//! Quartic surfaces and lines in P^3 over binary fields.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Embedding, Field};
use crate::poly::{squarefree_test, upoly, SparsePoly};

/// Small dense linear algebra over a binary field.
pub mod linalg {
    use super::*;

    /// Reduced row echelon form in place; returns the pivot columns.
    pub fn rref(f: &Field, m: &mut [Vec<u32>]) -> Vec<usize> {
        let rows = m.len();
        let cols = if rows == 0 { 0 } else { m[0].len() };
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(p) = (r..rows).find(|&i| m[i][c] != 0) else { continue };
            m.swap(r, p);
            let inv = f.inv(m[r][c]).unwrap();
            for x in m[r].iter_mut() {
                *x = f.mul(*x, inv);
            }
            for i in 0..rows {
                if i != r && m[i][c] != 0 {
                    let k = m[i][c];
                    for j in 0..cols {
                        let t = f.mul(k, m[r][j]);
                        m[i][j] ^= t;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(f: &Field, m: &[Vec<u32>]) -> usize {
        rref(f, &mut m.to_vec()).len()
    }

    /// Basis of {x : m x = 0}.
    pub fn nullspace(f: &Field, m: &[Vec<u32>], cols: usize) -> Vec<Vec<u32>> {
        let mut a = m.to_vec();
        let pivots = rref(f, &mut a);
        let mut basis = Vec::new();
        for free in (0..cols).filter(|c| !pivots.contains(c)) {
            let mut v = vec![0u32; cols];
            v[free] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = a[r][free];
            }
            basis.push(v);
        }
        basis
    }

    pub fn inverse(f: &Field, m: &[Vec<u32>]) -> Result<Vec<Vec<u32>>> {
        let n = m.len();
        let mut a: Vec<Vec<u32>> = m
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let mut r = row.clone();
                r.extend((0..n).map(|j| (i == j) as u32));
                r
            })
            .collect();
        let pivots = rref(f, &mut a);
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(Error::Usage("singular matrix".into()));
        }
        Ok(a.into_iter().map(|r| r[n..].to_vec()).collect())
    }

    pub fn mat_mul(f: &Field, a: &[Vec<u32>], b: &[Vec<u32>]) -> Vec<Vec<u32>> {
        let (n, k, m) = (a.len(), b.len(), b[0].len());
        (0..n)
            .map(|i| {
                (0..m)
                    .map(|j| (0..k).fold(0, |acc, l| acc ^ f.mul(a[i][l], b[l][j])))
                    .collect()
            })
            .collect()
    }

    pub fn mat_vec(f: &Field, a: &[Vec<u32>], x: &[u32]) -> Vec<u32> {
        a.iter().map(|row| row.iter().zip(x).fold(0, |acc, (&r, &v)| acc ^ f.mul(r, v))).collect()
    }
}

/// Scale a nonzero vector so its first nonzero entry is 1.
pub fn normalize_point(f: &Field, p: &[u32]) -> Vec<u32> {
    match p.iter().find(|&&c| c != 0) {
        Some(&lead) => {
            let inv = f.inv(lead).unwrap();
            p.iter().map(|&c| f.mul(c, inv)).collect()
        }
        None => p.to_vec(),
    }
}

/// A line in P^3 as the row space of a 2x4 matrix in reduced row echelon form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Line {
    /// Schubert cell index of the pivot pair, in the order (0,1),(0,2),(0,3),(1,2),(1,3),(2,3).
    pub cell: u8,
    pub rows: [[u32; 4]; 2],
}

pub const CELLS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

impl Line {
    /// The line spanned by two points.
    pub fn through(f: &Field, p: &[u32], q: &[u32]) -> Result<Line> {
        let mut m = vec![p.to_vec(), q.to_vec()];
        let pivots = linalg::rref(f, &mut m);
        if pivots.len() != 2 {
            return Err(Error::Usage("points do not span a line".into()));
        }
        let cell = CELLS.iter().position(|&c| c == (pivots[0], pivots[1])).unwrap() as u8;
        let mut rows = [[0u32; 4]; 2];
        for (i, row) in m.iter().enumerate() {
            rows[i].copy_from_slice(row);
        }
        Ok(Line { cell, rows })
    }

    /// The line cut out by two independent linear forms.
    pub fn from_equations(f: &Field, a: &[u32; 4], b: &[u32; 4]) -> Result<Line> {
        let ns = linalg::nullspace(f, &[a.to_vec(), b.to_vec()], 4);
        if ns.len() != 2 {
            return Err(Error::Usage("equations do not define a line".into()));
        }
        Line::through(f, &ns[0], &ns[1])
    }

    pub fn pivots(&self) -> (usize, usize) {
        CELLS[self.cell as usize]
    }

    pub fn point(&self, f: &Field, u: u32, v: u32) -> [u32; 4] {
        let mut p = [0u32; 4];
        for (i, x) in p.iter_mut().enumerate() {
            *x = f.mul(u, self.rows[0][i]) ^ f.mul(v, self.rows[1][i]);
        }
        p
    }

    pub fn contains_point(&self, f: &Field, p: &[u32]) -> bool {
        linalg::rank(f, &[self.rows[0].to_vec(), self.rows[1].to_vec(), p.to_vec()]) == 2
    }

    /// Two linear forms cutting out the line.
    pub fn equations(&self, f: &Field) -> [[u32; 4]; 2] {
        let ns = linalg::nullspace(f, &[self.rows[0].to_vec(), self.rows[1].to_vec()], 4);
        let mut out = [[0u32; 4]; 2];
        for (i, v) in ns.iter().enumerate() {
            out[i].copy_from_slice(v);
        }
        out
    }

    pub fn map(&self, f: &Field, t: &ProjectiveMap) -> Line {
        let p = linalg::mat_vec(f, &t.matrix, &self.rows[0]);
        let q = linalg::mat_vec(f, &t.matrix, &self.rows[1]);
        Line::through(f, &p, &q).expect("invertible map")
    }

    pub fn embed(&self, e: &Embedding) -> Line {
        let mut l = *self;
        for row in l.rows.iter_mut() {
            for x in row.iter_mut() {
                *x = e.apply(*x);
            }
        }
        l
    }
}

/// Intersection of two distinct lines: `None` if skew, else the normalized point.
pub fn lines_meet(f: &Field, l1: &Line, l2: &Line) -> Result<Option<[u32; 4]>> {
    if l1 == l2 {
        return Err(Error::Usage("lines_meet called on identical lines".into()));
    }
    let stacked: Vec<Vec<u32>> =
        [l1.rows[0], l1.rows[1], l2.rows[0], l2.rows[1]].iter().map(|r| r.to_vec()).collect();
    // relations c with sum c_i row_i = 0 are the kernel of the transpose
    let transpose: Vec<Vec<u32>> = (0..4).map(|j| stacked.iter().map(|r| r[j]).collect()).collect();
    let ns = linalg::nullspace(f, &transpose, 4);
    match ns.len() {
        0 => Ok(None),
        1 => {
            let c = &ns[0];
            let p = l1.point(f, c[0], c[1]);
            let n = normalize_point(f, &p);
            let mut out = [0u32; 4];
            out.copy_from_slice(&n);
            Ok(Some(out))
        }
        _ => Err(Error::Usage("lines_meet called on identical lines".into())),
    }
}

/// A quartic polynomial compiled for fast evaluation.
#[derive(Clone, Debug)]
pub struct CompiledQuartic {
    terms: Vec<([usize; 4], u32)>,
}

impl CompiledQuartic {
    pub fn new(f: &SparsePoly<u32>) -> Self {
        CompiledQuartic {
            terms: f
                .terms()
                .map(|(m, &c)| ([m.0[0] as usize, m.0[1] as usize, m.0[2] as usize, m.0[3] as usize], c))
                .collect(),
        }
    }

    pub fn eval(&self, f: &Field, x: &[u32; 4]) -> u32 {
        let mut pw = [[1u32; 5]; 4];
        for i in 0..4 {
            for e in 1..5 {
                pw[i][e] = f.mul(pw[i][e - 1], x[i]);
            }
        }
        let mut acc = 0;
        for (e, c) in &self.terms {
            let mut t = *c;
            for i in 0..4 {
                if e[i] > 0 {
                    t = f.mul(t, pw[i][e[i]]);
                }
            }
            acc ^= t;
        }
        acc
    }

    /// Coefficients of the binary quartic f(u r1 + v r2) (index = power of u).
    pub fn restrict(&self, f: &Field, r1: &[u32; 4], r2: &[u32; 4]) -> [u32; 5] {
        // powers of the linear forms r2_i v + r1_i u, dehomogenized in v
        let mut pw = [[[0u32; 5]; 5]; 4];
        for i in 0..4 {
            pw[i][0][0] = 1;
            for e in 1..5 {
                for j in 0..=e {
                    let mut c = 0;
                    if j < e {
                        c ^= f.mul(pw[i][e - 1][j], r2[i]);
                    }
                    if j > 0 {
                        c ^= f.mul(pw[i][e - 1][j - 1], r1[i]);
                    }
                    pw[i][e][j] = c;
                }
            }
        }
        let mut out = [0u32; 5];
        for (e, c) in &self.terms {
            let mut t = [0u32; 5];
            t[0] = *c;
            let mut deg = 0;
            for i in 0..4 {
                if e[i] == 0 {
                    continue;
                }
                let p = &pw[i][e[i]];
                let mut nt = [0u32; 5];
                for a in 0..=deg {
                    if t[a] == 0 {
                        continue;
                    }
                    for b in 0..=e[i] {
                        nt[a + b] ^= f.mul(t[a], p[b]);
                    }
                }
                t = nt;
                deg += e[i];
            }
            for j in 0..5 {
                out[j] ^= t[j];
            }
        }
        out
    }
}

/// A squarefree homogeneous quartic in four variables.
#[derive(Clone, Debug)]
pub struct QuarticSurface {
    field: Field,
    f: SparsePoly<u32>,
    label: String,
}

impl QuarticSurface {
    /// Validates arity, homogeneity, degree and squarefreeness.
    pub fn new(field: Field, f: SparsePoly<u32>, label: impl Into<String>) -> Result<Self> {
        Self::check_shape(&field, &f)?;
        let v = squarefree_test(&field, &f)?;
        if !v.squarefree {
            let how = if v.power > 1 { format!("a {}-th power", v.power) } else { "not squarefree".into() };
            return Err(Error::Degenerate(format!("quartic is {how}")));
        }
        Ok(QuarticSurface { field, f, label: label.into() })
    }

    fn check_shape(field: &Field, f: &SparsePoly<u32>) -> Result<()> {
        if f.nvars() != 4 {
            return Err(Error::Usage("a quartic surface needs exactly 4 variables".into()));
        }
        if f.is_zero() {
            return Err(Error::Usage("zero polynomial".into()));
        }
        if f.homogeneous_degree() != Some(4) {
            return Err(Error::Usage("polynomial is not homogeneous of degree 4".into()));
        }
        if f.terms().any(|(_, &c)| !field.contains(c)) {
            return Err(Error::Usage("coefficient outside the field".into()));
        }
        Ok(())
    }

    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn poly(&self) -> &SparsePoly<u32> {
        &self.f
    }
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, p: &[u32]) -> u32 {
        self.f.eval(&self.field, p)
    }

    pub fn contains_line(&self, l: &Line) -> bool {
        CompiledQuartic::new(&self.f).restrict(&self.field, &l.rows[0], &l.rows[1]) == [0; 5]
    }

    /// The same surface over an extension field.
    pub fn base_change(&self, target: &Field) -> Result<QuarticSurface> {
        if target == &self.field {
            return Ok(self.clone());
        }
        let e = Embedding::new(&self.field, target)?;
        Ok(QuarticSurface {
            field: target.clone(),
            f: self.f.map_coeffs(target, |&c| e.apply(c)),
            label: self.label.clone(),
        })
    }

    /// The image surface T(S), with equation f o T^-1.
    pub fn transform(&self, t: &ProjectiveMap) -> Result<QuarticSurface> {
        let inv = t.inverse(&self.field)?;
        Ok(QuarticSurface {
            field: self.field.clone(),
            f: pullback(&self.field, &self.f, &inv.matrix),
            label: self.label.clone(),
        })
    }

    /// Lines over GF(2^(k m)), where k is the base degree.
    pub fn lines(&self, m: u32) -> Result<(Field, Vec<Line>)> {
        enumerate_lines(self, m)
    }
}

/// f(A x).
pub fn pullback(f: &Field, p: &SparsePoly<u32>, a: &[Vec<u32>]) -> SparsePoly<u32> {
    let n = p.nvars();
    let images: Vec<(usize, SparsePoly<u32>)> = (0..n)
        .map(|i| {
            let lin = SparsePoly::from_terms(
                f,
                n,
                (0..n).map(|j| {
                    let mut e = vec![0u16; n];
                    e[j] = 1;
                    (e, a[i][j])
                }),
            );
            (i, lin)
        })
        .collect();
    p.substitute(f, n, &images).expect("square substitution")
}

/// Invertible 4x4 matrix acting on column vectors of coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProjectiveMap {
    pub matrix: Vec<Vec<u32>>,
}

impl ProjectiveMap {
    pub fn new(f: &Field, matrix: Vec<Vec<u32>>) -> Result<Self> {
        if matrix.len() != 4 || matrix.iter().any(|r| r.len() != 4) {
            return Err(Error::Usage("projective maps of P^3 are 4x4".into()));
        }
        if linalg::rank(f, &matrix) != 4 {
            return Err(Error::Usage("matrix is not invertible".into()));
        }
        Ok(ProjectiveMap { matrix })
    }
    pub fn identity() -> Self {
        ProjectiveMap { matrix: (0..4).map(|i| (0..4).map(|j| (i == j) as u32).collect()).collect() }
    }
    pub fn inverse(&self, f: &Field) -> Result<Self> {
        Ok(ProjectiveMap { matrix: linalg::inverse(f, &self.matrix)? })
    }
    /// self o other.
    pub fn compose(&self, f: &Field, other: &ProjectiveMap) -> Self {
        ProjectiveMap { matrix: linalg::mat_mul(f, &self.matrix, &other.matrix) }
    }
    pub fn apply(&self, f: &Field, p: &[u32]) -> Vec<u32> {
        linalg::mat_vec(f, &self.matrix, p)
    }
    pub fn is_identity(&self, f: &Field) -> bool {
        // up to scalars
        let c = self.matrix[0][0];
        c != 0
            && (0..4).all(|i| (0..4).all(|j| self.matrix[i][j] == if i == j { c } else { 0 }))
            && f.contains(c)
    }
    /// Whether T(S) = S.
    pub fn preserves(&self, s: &QuarticSurface) -> Result<bool> {
        let img = s.transform(self)?;
        Ok(proportional(s.field(), img.poly(), s.poly()))
    }
}

/// Whether two polynomials agree up to a nonzero scalar.
pub fn proportional(f: &Field, a: &SparsePoly<u32>, b: &SparsePoly<u32>) -> bool {
    let (Some((ma, &ca)), Some((_, _))) = (a.terms().next(), b.terms().next()) else {
        return a.is_zero() && b.is_zero();
    };
    let cb = b.coeff(f, &ma.0);
    if cb == 0 {
        return false;
    }
    let k = f.div(cb, ca).unwrap();
    &a.scale(f, &k) == b
}

/// All lines on S defined over GF(2^(k m)), in canonical order.
pub fn enumerate_lines(s: &QuarticSurface, m: u32) -> Result<(Field, Vec<Line>)> {
    if m == 0 {
        return Err(Error::Usage("extension degree must be positive".into()));
    }
    let deg = s.field().degree() * m;
    if deg > crate::field::MAX_DEGREE {
        return Err(Error::Capability(format!("GF(2^{deg}) exceeds the supported field size")));
    }
    let e = if m == 1 { s.field().clone() } else { Field::standard(deg)? };
    let se = s.base_change(&e)?;
    let q = CompiledQuartic::new(se.poly());
    let mut out = Vec::new();
    for (cell, &(p1, p2)) in CELLS.iter().enumerate() {
        let free1: Vec<usize> = (p1 + 1..4).filter(|&c| c != p2).collect();
        let free2: Vec<usize> = (p2 + 1..4).collect();
        let z1 = zeros_on_pattern(&e, &q, p1, &free1);
        let z2 = zeros_on_pattern(&e, &q, p2, &free2);
        let mut found: Vec<Line> = z1
            .par_iter()
            .flat_map_iter(|r1| {
                let (e, q) = (&e, &q);
                z2.iter().filter_map(move |r2| {
                    let mut sum = [0u32; 4];
                    for i in 0..4 {
                        sum[i] = r1[i] ^ r2[i];
                    }
                    if q.eval(e, &sum) != 0 {
                        return None;
                    }
                    (q.restrict(e, r1, r2) == [0; 5])
                        .then_some(Line { cell: cell as u8, rows: [*r1, *r2] })
                })
            })
            .collect();
        found.sort();
        out.extend(found);
    }
    Ok((e, out))
}

/// Points with a 1 at `pivot`, arbitrary entries at `free`, zero elsewhere, on which q vanishes.
fn zeros_on_pattern(f: &Field, q: &CompiledQuartic, pivot: usize, free: &[usize]) -> Vec<[u32; 4]> {
    let size = f.size() as u64;
    let total = size.pow(free.len() as u32);
    let mut v: Vec<[u32; 4]> = (0..total)
        .into_par_iter()
        .filter_map(|mut idx| {
            let mut p = [0u32; 4];
            p[pivot] = 1;
            for &c in free {
                p[c] = (idx % size) as u32;
                idx /= size;
            }
            (q.eval(f, &p) == 0).then_some(p)
        })
        .collect();
    v.sort();
    v
}

/// Total number of lines in P^3(GF(q)), i.e. the sum of all Schubert cell sizes.
pub fn candidate_line_count(q: u64) -> u64 {
    CELLS
        .iter()
        .map(|&(p1, p2)| {
            let free = (3 - p1 - 1) + (3 - p2);
            q.pow(free as u32)
        })
        .sum()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingularPoint {
    /// absolute degree of the field the coordinates live in
    pub degree: u32,
    pub coords: [u32; 4],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingularSearch {
    /// relative extension degrees searched
    pub searched: Vec<u32>,
    pub points: Vec<SingularPoint>,
    /// set when the singular locus is positive dimensional and the listing was cut short
    pub truncated: bool,
}

impl SingularSearch {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
    /// Largest M such that every degree 1..=M was searched.
    pub fn certificate_level(&self) -> u32 {
        let mut m = 0;
        while self.searched.contains(&(m + 1)) {
            m += 1;
        }
        m
    }
}

const SINGULAR_POINT_CAP: usize = 4096;

/// Points over GF(2^(k m)), m <= max_ext, where f and all partials vanish.
/// Degrees past the field size limit are skipped (see `certificate_level`).
pub fn singular_point_search(field: &Field, f: &SparsePoly<u32>, max_ext: u32) -> Result<SingularSearch> {
    if f.nvars() != 4 {
        return Err(Error::Usage("singular point search expects 4 variables".into()));
    }
    let k = field.degree();
    let mut searched = Vec::new();
    let mut points: Vec<SingularPoint> = Vec::new();
    let mut truncated = false;
    for m in 1..=max_ext {
        if k * m > crate::field::MAX_DEGREE {
            break;
        }
        let e = if m == 1 { field.clone() } else { Field::standard(k * m)? };
        let emb = Embedding::new(field, &e)?;
        let fe = f.map_coeffs(&e, |&c| emb.apply(c));
        let (pts, cut) = singular_points_over(&e, &fe);
        truncated |= cut;
        // drop points already defined over a smaller searched field
        let subs: Vec<Embedding> = searched
            .iter()
            .filter(|&&d| m % d == 0)
            .map(|&d| {
                let sub = if d == 1 { field.clone() } else { Field::standard(k * d).unwrap() };
                Embedding::new(&sub, &e).unwrap()
            })
            .collect();
        for p in pts {
            if subs.iter().any(|s| p.iter().all(|&c| s.preimage(c).is_some())) {
                continue;
            }
            points.push(SingularPoint { degree: k * m, coords: p });
            if points.len() >= SINGULAR_POINT_CAP {
                truncated = true;
                break;
            }
        }
        searched.push(m);
        if truncated {
            break;
        }
    }
    Ok(SingularSearch { searched, points, truncated })
}

/// Univariate polynomial in s of p(a, b, c, s), given p grouped by its x4-exponent.
fn line_poly(f: &Field, grouped: &[Vec<([usize; 3], u32)>], pw: &[[u32; 5]; 3]) -> Vec<u32> {
    let mut out = vec![0u32; grouped.len()];
    for (e4, terms) in grouped.iter().enumerate() {
        let mut acc = 0;
        for (e, c) in terms {
            acc ^= f.mul(*c, f.mul(pw[0][e[0]], f.mul(pw[1][e[1]], pw[2][e[2]])));
        }
        out[e4] = acc;
    }
    upoly::trim(out)
}

fn group_by_x4(p: &SparsePoly<u32>) -> Vec<Vec<([usize; 3], u32)>> {
    let mut g: Vec<Vec<([usize; 3], u32)>> = vec![Vec::new(); 5];
    for (m, &c) in p.terms() {
        g[m.0[3] as usize].push(([m.0[0] as usize, m.0[1] as usize, m.0[2] as usize], c));
    }
    g
}

fn singular_points_over(e: &Field, f: &SparsePoly<u32>) -> (Vec<[u32; 4]>, bool) {
    let polys: Vec<SparsePoly<u32>> =
        std::iter::once(f.clone()).chain((0..4).map(|i| f.derivative(e, i))).collect();
    let mut out = Vec::new();
    let e4 = [0, 0, 0, 1];
    if polys.iter().all(|p| p.eval(e, &e4) == 0) {
        out.push(e4);
    }
    // order: the x4 partial first, it is the cheapest filter
    let order = [4usize, 0, 1, 2, 3];
    let grouped: Vec<Vec<Vec<([usize; 3], u32)>>> = order.iter().map(|&i| group_by_x4(&polys[i])).collect();
    let q = e.size() as u64;
    // points [1:b:c], [0:1:c], [0:0:1] of P^2
    let total = q * q + q + 1;
    let cut = std::sync::atomic::AtomicBool::new(false);
    let mut found: Vec<[u32; 4]> = (0..total)
        .into_par_iter()
        .flat_map_iter(|idx| {
            let abc = if idx < q * q {
                [1, (idx % q) as u32, (idx / q) as u32]
            } else if idx < q * q + q {
                [0, 1, (idx - q * q) as u32]
            } else {
                [0, 0, 1]
            };
            let mut pw = [[1u32; 5]; 3];
            for i in 0..3 {
                for d in 1..5 {
                    pw[i][d] = e.mul(pw[i][d - 1], abc[i]);
                }
            }
            let mut g: Option<Vec<u32>> = None;
            let mut all_zero = true;
            for gp in &grouped {
                let lp = line_poly(e, gp, &pw);
                if lp.is_empty() {
                    continue;
                }
                all_zero = false;
                let ng = match &g {
                    None => lp,
                    Some(old) => upoly::gcd(e, old, &lp),
                };
                if upoly::degree(&ng) == Some(0) {
                    return Vec::new();
                }
                g = Some(ng);
            }
            let roots: Vec<u32> = if all_zero {
                cut.store(true, std::sync::atomic::Ordering::Relaxed);
                e.elements().collect()
            } else {
                crate::field::find_roots(e, g.as_ref().unwrap())
                    .map(|r| r.into_iter().map(|(x, _)| x).collect())
                    .unwrap_or_default()
            };
            roots.into_iter().map(move |s| [abc[0], abc[1], abc[2], s]).collect::<Vec<_>>()
        })
        .collect();
    found.sort();
    out.extend(found);
    (out, cut.into_inner())
}

/// Lines with their pairwise intersection data.
#[derive(Clone, Debug)]
pub struct IntersectionGraph {
    pub lines: Vec<Line>,
    pub adjacency: Vec<Vec<bool>>,
    pub points: BTreeMap<(usize, usize), [u32; 4]>,
}

impl IntersectionGraph {
    pub fn new(f: &Field, lines: Vec<Line>) -> Result<Self> {
        let n = lines.len();
        let pairs: Vec<((usize, usize), Option<[u32; 4]>)> = (0..n)
            .into_par_iter()
            .flat_map_iter(|i| {
                let lines = &lines;
                (i + 1..n).map(move |j| ((i, j), lines_meet(f, &lines[i], &lines[j])))
            })
            .map(|(ij, r)| r.map(|p| (ij, p)))
            .collect::<Result<_>>()?;
        let mut adjacency = vec![vec![false; n]; n];
        let mut points = BTreeMap::new();
        for ((i, j), p) in pairs {
            if let Some(p) = p {
                adjacency[i][j] = true;
                adjacency[j][i] = true;
                points.insert((i, j), p);
            }
        }
        Ok(IntersectionGraph { lines, adjacency, points })
    }

    /// A graph given only by adjacency (no geometry).
    pub fn from_adjacency(adjacency: Vec<Vec<bool>>) -> Result<Self> {
        let n = adjacency.len();
        for i in 0..n {
            if adjacency[i].len() != n || adjacency[i][i] || (0..n).any(|j| adjacency[i][j] != adjacency[j][i]) {
                return Err(Error::Usage("adjacency must be square, symmetric, zero diagonal".into()));
            }
        }
        Ok(IntersectionGraph { lines: Vec::new(), adjacency, points: BTreeMap::new() })
    }

    pub fn len(&self) -> usize {
        self.adjacency.len()
    }
    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }
    pub fn meets(&self, i: usize, j: usize) -> bool {
        self.adjacency[i][j]
    }
    pub fn valency(&self, i: usize) -> usize {
        self.adjacency[i].iter().filter(|&&b| b).count()
    }
    pub fn valencies(&self) -> Vec<usize> {
        (0..self.len()).map(|i| self.valency(i)).collect()
    }
    pub fn point(&self, i: usize, j: usize) -> Option<[u32; 4]> {
        self.points.get(&(i.min(j), i.max(j))).copied()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConfigurationCase {
    TriangleCase,
    SquareCase,
    SquarefreeCase,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigurationReport {
    pub triangles: Vec<[usize; 3]>,
    pub stars: Vec<[usize; 3]>,
    pub squares: Vec<[usize; 4]>,
    pub case: ConfigurationCase,
}

/// Triangles, stars, squares and the resulting case. Without intersection
/// points every 3-clique counts as a triangle.
pub fn detect_configurations(g: &IntersectionGraph) -> ConfigurationReport {
    let n = g.len();
    let mut triangles = Vec::new();
    let mut stars = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if !g.meets(i, j) {
                continue;
            }
            for k in j + 1..n {
                if !(g.meets(i, k) && g.meets(j, k)) {
                    continue;
                }
                match (g.point(i, j), g.point(i, k), g.point(j, k)) {
                    (Some(a), Some(b), Some(c)) if a == b && b == c => stars.push([i, j, k]),
                    _ => triangles.push([i, j, k]),
                }
            }
        }
    }
    let mut squares = Vec::new();
    // l1 < l2 < l4 and l1 < l3 with l1, l3 skew and l2, l4 skew common neighbours
    for a in 0..n {
        for c in a + 1..n {
            if g.meets(a, c) {
                continue;
            }
            let common: Vec<usize> = (a + 1..n).filter(|&x| g.meets(a, x) && g.meets(c, x)).collect();
            for (ix, &b) in common.iter().enumerate() {
                for &d in &common[ix + 1..] {
                    if !g.meets(b, d) {
                        squares.push([a, b, c, d]);
                    }
                }
            }
        }
    }
    squares.sort();
    let case = if !triangles.is_empty() || !stars.is_empty() {
        ConfigurationCase::TriangleCase
    } else if !squares.is_empty() {
        ConfigurationCase::SquareCase
    } else {
        ConfigurationCase::SquarefreeCase
    };
    ConfigurationReport { triangles, stars, squares, case }
}

/// Moves `l` to {x3 = x4 = 0}: returns T and T(S).
pub fn normalize_line(s: &QuarticSurface, l: &Line) -> Result<(ProjectiveMap, QuarticSurface)> {
    if !s.contains_line(l) {
        return Err(Error::Usage("line does not lie on the surface".into()));
    }
    let f = s.field();
    let (p1, p2) = l.pivots();
    let others: Vec<usize> = (0..4).filter(|&c| c != p1 && c != p2).collect();
    // columns r1, r2, e_i, e_j
    let mut cols: Vec<[u32; 4]> = vec![l.rows[0], l.rows[1]];
    for &c in &others {
        let mut v = [0u32; 4];
        v[c] = 1;
        cols.push(v);
    }
    let m: Vec<Vec<u32>> = (0..4).map(|i| cols.iter().map(|c| c[i]).collect()).collect();
    let t = ProjectiveMap::new(f, m)?.inverse(f)?;
    let s2 = s.transform(&t)?;
    Ok((t, s2))
}

/// Closure of `seeds` under the group generated by `generators`.
pub fn orbit(s: &QuarticSurface, seeds: &[Line], generators: &[ProjectiveMap]) -> Result<BTreeSet<Line>> {
    for g in generators {
        if !g.preserves(s)? {
            return Err(Error::Usage("generator does not preserve the surface".into()));
        }
    }
    let f = s.field();
    let mut seen: BTreeSet<Line> = seeds.iter().copied().collect();
    let mut frontier: Vec<Line> = seeds.to_vec();
    while let Some(l) = frontier.pop() {
        for g in generators {
            let img = l.map(f, g);
            if seen.insert(img) {
                frontier.push(img);
            }
        }
    }
    Ok(seen)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SquarePartition {
    pub square: [usize; 4],
    /// lines orthogonal to the square class, other than the square itself
    pub fiber_lines: Vec<usize>,
    pub sections: Vec<usize>,
    pub bisections: Vec<usize>,
    /// lines meeting three or more square lines (impossible for a genuine square)
    pub other: Vec<usize>,
    /// sum over the square of v - 2
    pub valency_excess: usize,
    /// 4 + #fiber_lines + valency_excess
    pub bound: usize,
    /// valency_excess <= 40
    pub within_generic_cap: bool,
}

/// Partition of all lines by their intersection with the square class.
pub fn square_fibration_partition(g: &IntersectionGraph, square: [usize; 4]) -> Result<SquarePartition> {
    let n = g.len();
    if square.iter().any(|&i| i >= n) || square.iter().collect::<HashSet<_>>().len() != 4 {
        return Err(Error::Usage("square needs 4 distinct lines of the graph".into()));
    }
    for i in 0..4 {
        for j in i + 1..4 {
            let should = (i + j) % 2 == 1;
            if g.meets(square[i], square[j]) != should {
                return Err(Error::Usage("lines do not form a square in the given order".into()));
            }
        }
    }
    let mut part = SquarePartition {
        square,
        fiber_lines: vec![],
        sections: vec![],
        bisections: vec![],
        other: vec![],
        valency_excess: square.iter().map(|&i| g.valency(i) - 2).sum(),
        bound: 0,
        within_generic_cap: false,
    };
    for x in (0..n).filter(|x| !square.contains(x)) {
        match square.iter().filter(|&&i| g.meets(i, x)).count() {
            0 => part.fiber_lines.push(x),
            1 => part.sections.push(x),
            2 => part.bisections.push(x),
            _ => part.other.push(x),
        }
    }
    part.bound = 4 + part.fiber_lines.len() + part.valency_excess;
    part.within_generic_cap = part.valency_excess <= 40;
    Ok(part)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(k: u32) -> Field {
        Field::standard(k).unwrap()
    }

    fn quartic(f: &Field, terms: &[([u16; 4], u32)]) -> SparsePoly<u32> {
        SparsePoly::from_terms(f, 4, terms.iter().map(|(e, c)| (e.to_vec(), *c)))
    }

    #[test]
    fn candidate_counts() {
        assert_eq!(candidate_line_count(2), 35);
        assert_eq!(candidate_line_count(16), 70161);
    }

    #[test]
    fn meeting_examples() {
        let f = gf(1);
        let a = Line::from_equations(&f, &[0, 0, 1, 0], &[0, 0, 0, 1]).unwrap();
        let b = Line::from_equations(&f, &[1, 0, 0, 0], &[0, 0, 1, 0]).unwrap();
        let c = Line::from_equations(&f, &[1, 0, 0, 0], &[0, 1, 0, 0]).unwrap();
        assert_eq!(lines_meet(&f, &a, &b).unwrap(), Some([0, 1, 0, 0]));
        assert_eq!(lines_meet(&f, &a, &c).unwrap(), None);
        assert!(lines_meet(&f, &a, &a).is_err());
        // coplanar lines in x4 = 0 always meet
        let d = Line::from_equations(&f, &[0, 0, 0, 1], &[1, 1, 0, 0]).unwrap();
        assert!(lines_meet(&f, &a, &d).unwrap().is_some());
    }

    #[test]
    fn cone_is_singular_at_vertex() {
        let f = gf(1);
        let cone = quartic(&f, &[([4, 0, 0, 0], 1), ([0, 4, 0, 0], 1), ([0, 0, 4, 0], 1)]);
        let s = singular_point_search(&f, &cone, 1).unwrap();
        assert!(s.points.iter().any(|p| p.coords == [0, 0, 0, 1]));
    }

    #[test]
    fn plane_configurations() {
        let f = gf(2);
        // x4 = 0 and x1 x2 x3 = 0: coordinate triangle
        let lines = vec![
            Line::from_equations(&f, &[0, 0, 0, 1], &[1, 0, 0, 0]).unwrap(),
            Line::from_equations(&f, &[0, 0, 0, 1], &[0, 1, 0, 0]).unwrap(),
            Line::from_equations(&f, &[0, 0, 0, 1], &[0, 0, 1, 0]).unwrap(),
        ];
        let g = IntersectionGraph::new(&f, lines).unwrap();
        let r = detect_configurations(&g);
        assert_eq!(r.triangles.len(), 1);
        assert_eq!(r.case, ConfigurationCase::TriangleCase);
        // x4 = 0 and x1 x2 (x1 + x2) = 0: three concurrent lines
        let lines = vec![
            Line::from_equations(&f, &[0, 0, 0, 1], &[1, 0, 0, 0]).unwrap(),
            Line::from_equations(&f, &[0, 0, 0, 1], &[0, 1, 0, 0]).unwrap(),
            Line::from_equations(&f, &[0, 0, 0, 1], &[1, 1, 0, 0]).unwrap(),
        ];
        let r = detect_configurations(&IntersectionGraph::new(&f, lines).unwrap());
        assert_eq!(r.stars.len(), 1);
        assert!(r.triangles.is_empty());
    }

    fn adjacency(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<bool>> {
        let mut a = vec![vec![false; n]; n];
        for &(i, j) in edges {
            a[i][j] = true;
            a[j][i] = true;
        }
        a
    }

    #[test]
    fn square_detection_and_partition() {
        let g = IntersectionGraph::from_adjacency(adjacency(4, &[(0, 1), (1, 2), (2, 3), (3, 0)])).unwrap();
        let r = detect_configurations(&g);
        assert_eq!(r.squares, vec![[0, 1, 2, 3]]);
        assert_eq!(r.case, ConfigurationCase::SquareCase);
        assert!(square_fibration_partition(&g, [0, 2, 1, 3]).is_err());

        // square, 3 disjoint fiber lines, 3 sections on each square line
        let mut edges = vec![(0, 1), (1, 2), (2, 3), (3, 0)];
        for i in 0..4 {
            for s in 0..3 {
                edges.push((i, 7 + 3 * i + s));
            }
        }
        let g = IntersectionGraph::from_adjacency(adjacency(19, &edges)).unwrap();
        assert_eq!((0..4).map(|i| g.valency(i)).collect::<Vec<_>>(), vec![5; 4]);
        let p = square_fibration_partition(&g, [0, 1, 2, 3]).unwrap();
        assert_eq!(p.fiber_lines, vec![4, 5, 6]);
        assert_eq!(p.valency_excess, 12);
        assert_eq!(p.sections.len(), 12);
        // the square lines are fiber components too
        assert_eq!(p.bound, 4 + 3 + 12);
        assert!(p.bound >= g.len());
    }

    #[test]
    fn normalization_of_axis_line() {
        let f = gf(2);
        // x3 x1^3 + x4 x2^3 contains {x3 = x4 = 0}
        let p = quartic(&f, &[([3, 0, 1, 0], 1), ([0, 3, 0, 1], 1), ([0, 0, 4, 0], 1), ([0, 0, 0, 4], 1)]);
        let s = QuarticSurface::new(f.clone(), p, "t").unwrap();
        let l = Line::from_equations(&f, &[0, 0, 1, 0], &[0, 0, 0, 1]).unwrap();
        let (t, s2) = normalize_line(&s, &l).unwrap();
        assert_eq!(t, ProjectiveMap::identity());
        assert_eq!(s2.poly(), s.poly());
    }

    #[test]
    fn lines_on_a_simple_surface() {
        // x1 x2 x3 x4 + x1^4 ... check every enumerated line lies on the surface
        let f = gf(1);
        let p = quartic(&f, &[([1, 1, 1, 1], 1), ([3, 1, 0, 0], 1), ([0, 0, 3, 1], 1)]);
        let s = QuarticSurface::new(f.clone(), p, "t").unwrap();
        let (e, lines) = enumerate_lines(&s, 2).unwrap();
        assert!(!lines.is_empty());
        let se = s.base_change(&e).unwrap();
        for l in &lines {
            assert!(se.contains_line(l));
        }
        let mut sorted = lines.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted, lines);
        // brute check against all lines through pairs of points
        let (_, base) = enumerate_lines(&s, 1).unwrap();
        let emb = Embedding::new(&f, &e).unwrap();
        for l in &base {
            assert!(lines.contains(&l.embed(&emb)));
        }
    }
}
