//! Binary fields GF(2^k), k <= 16.
//!
//! [`Field`] is a cheap, clonable handle (shared tables behind an `Arc`) and is
//! also the [`Ring`](crate::ring::Ring) whose elements are raw `u32` bitmasks.
//! [`FieldElement`] is the checked value type carrying its field with it.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_DEGREE: u32 = 16;

/// Built-in irreducible moduli for k = 1..=16 (bit i = coefficient of t^i).
const DEFAULT_MODULI: [u32; 16] = [
    0x3, 0x7, 0xB, 0x13, 0x25, 0x43, 0x83, 0x11B, 0x203, 0x409, 0x805, 0x1009, 0x201B, 0x4021,
    0x8003, 0x1002B,
];

pub fn default_modulus(degree: u32) -> Option<u32> {
    if (1..=MAX_DEGREE).contains(&degree) {
        Some(DEFAULT_MODULI[degree as usize - 1])
    } else {
        None
    }
}

/// Degree of a GF(2) polynomial given as bitmask (`None` for 0).
fn bdeg(p: u64) -> Option<u32> {
    if p == 0 {
        None
    } else {
        Some(63 - p.leading_zeros())
    }
}

fn bmod(mut a: u64, m: u64) -> u64 {
    let dm = bdeg(m).expect("nonzero modulus");
    while let Some(da) = bdeg(a) {
        if da < dm {
            break;
        }
        a ^= m << (da - dm);
    }
    a
}

/// Exhaustive factor scan over all polynomials of degree 1..=k/2.
pub fn is_irreducible(modulus: u32) -> bool {
    let Some(k) = bdeg(modulus as u64) else { return false };
    if k == 0 {
        return false;
    }
    for d in 1..=k / 2 {
        for low in 0..(1u64 << d) {
            let cand = (1u64 << d) | low;
            if bmod(modulus as u64, cand) == 0 {
                return false;
            }
        }
    }
    true
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FieldSpec {
    pub degree: u32,
    pub modulus: u32,
}

impl FieldSpec {
    pub fn new(degree: u32, modulus: u32) -> Result<Self> {
        if degree == 0 || degree > MAX_DEGREE {
            return Err(Error::Capability(format!("field degree {degree} outside 1..=16")));
        }
        if bdeg(modulus as u64) != Some(degree) {
            return Err(Error::Usage(format!(
                "modulus {modulus:#x} does not have degree {degree}"
            )));
        }
        if !is_irreducible(modulus) {
            return Err(Error::Usage(format!("modulus {modulus:#x} is not irreducible")));
        }
        Ok(FieldSpec { degree, modulus })
    }

    pub fn standard(degree: u32) -> Result<Self> {
        let m = default_modulus(degree)
            .ok_or_else(|| Error::Capability(format!("field degree {degree} outside 1..=16")))?;
        FieldSpec::new(degree, m)
    }

    pub fn size(&self) -> u32 {
        1 << self.degree
    }
}

struct Tables {
    spec: FieldSpec,
    exp: Vec<u32>,
    log: Vec<u32>,
    /// `as_root[c]` = some w with w^2 + w = c, or `u32::MAX`.
    as_root: OnceLock<Vec<u32>>,
}

/// Handle to GF(2^k) with multiplication tables.
#[derive(Clone)]
pub struct Field(Arc<Tables>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.0.spec == other.0.spec
    }
}
impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF(2^{}; {:#x})", self.0.spec.degree, self.0.spec.modulus)
    }
}

fn slow_mul(a: u32, b: u32, spec: FieldSpec) -> u32 {
    let mut acc: u64 = 0;
    let mut b = b as u64;
    let mut a = a as u64;
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
    }
    bmod(acc, spec.modulus as u64) as u32
}

fn prime_factors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn slow_pow(mut a: u32, mut e: u64, spec: FieldSpec) -> u32 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = slow_mul(r, a, spec);
        }
        a = slow_mul(a, a, spec);
        e >>= 1;
    }
    r
}

fn build_tables(spec: FieldSpec) -> Tables {
    let q = spec.size();
    let ord = q - 1;
    let gen = if ord == 1 {
        1
    } else {
        let primes = prime_factors(ord);
        (2..q)
            .find(|&g| primes.iter().all(|&p| slow_pow(g, (ord / p) as u64, spec) != 1))
            .expect("multiplicative group is cyclic")
    };
    let mut exp = vec![0u32; 2 * ord as usize];
    let mut log = vec![0u32; q as usize];
    let mut x = 1u32;
    for i in 0..ord {
        exp[i as usize] = x;
        exp[(i + ord) as usize] = x;
        log[x as usize] = i;
        x = slow_mul(x, gen, spec);
    }
    Tables { spec, exp, log, as_root: OnceLock::new() }
}

fn field_cache() -> &'static Mutex<HashMap<FieldSpec, Field>> {
    static CACHE: OnceLock<Mutex<HashMap<FieldSpec, Field>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

impl Field {
    /// Memoized: the same spec always yields the same shared tables.
    pub fn new(spec: FieldSpec) -> Field {
        let mut cache = field_cache().lock().unwrap();
        cache
            .entry(spec)
            .or_insert_with(|| Field(Arc::new(build_tables(spec))))
            .clone()
    }

    pub fn standard(degree: u32) -> Result<Field> {
        Ok(Field::new(FieldSpec::standard(degree)?))
    }

    pub fn spec(&self) -> FieldSpec {
        self.0.spec
    }

    pub fn degree(&self) -> u32 {
        self.0.spec.degree
    }

    pub fn size(&self) -> u32 {
        self.0.spec.size()
    }

    /// Iterates all elements in bitmask order.
    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.size()
    }

    pub fn contains(&self, a: u32) -> bool {
        a < self.size()
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let t = &self.0;
        t.exp[(t.log[a as usize] + t.log[b as usize]) as usize]
    }

    #[inline]
    pub fn square(&self, a: u32) -> u32 {
        self.mul(a, a)
    }

    pub fn inv(&self, a: u32) -> Result<u32> {
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        let t = &self.0;
        let ord = self.size() - 1;
        Ok(t.exp[((ord - t.log[a as usize]) % ord) as usize])
    }

    pub fn div(&self, a: u32, b: u32) -> Result<u32> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: u32, e: u64) -> u32 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let t = &self.0;
        let ord = (self.size() - 1) as u64;
        t.exp[((t.log[a as usize] as u64 * (e % ord)) % ord) as usize]
    }

    /// Unique square root, a^(2^(k-1)).
    pub fn sqrt(&self, a: u32) -> u32 {
        self.pow(a, 1u64 << (self.degree() - 1))
    }

    /// Absolute trace to GF(2).
    pub fn trace(&self, a: u32) -> u32 {
        let mut acc = 0;
        let mut x = a;
        for _ in 0..self.degree() {
            acc ^= x;
            x = self.square(x);
        }
        acc
    }

    /// A solution w of w^2 + w = c, if one exists in this field (the other is w + 1).
    pub fn artin_schreier_root(&self, c: u32) -> Option<u32> {
        let table = self.0.as_root.get_or_init(|| {
            let mut t = vec![u32::MAX; self.size() as usize];
            for w in self.elements() {
                let img = self.square(w) ^ w;
                if t[img as usize] == u32::MAX {
                    t[img as usize] = w;
                }
            }
            t
        });
        match table[c as usize] {
            u32::MAX => None,
            w => Some(w),
        }
    }

    /// Roots in this field of x^2 + b x + c, with multiplicity.
    pub fn quadratic_roots(&self, b: u32, c: u32) -> Vec<u32> {
        if b == 0 {
            let r = self.sqrt(c);
            return vec![r, r];
        }
        // x = b w : w^2 + w = c / b^2
        let b2 = self.square(b);
        let rhs = self.mul(c, self.inv(b2).unwrap());
        match self.artin_schreier_root(rhs) {
            Some(w) => vec![self.mul(b, w), self.mul(b, w ^ 1)],
            None => vec![],
        }
    }

    pub fn element(&self, bits: u32) -> Result<FieldElement> {
        if !self.contains(bits) {
            return Err(Error::Usage(format!("{bits:#x} is not an element of {self:?}")));
        }
        Ok(FieldElement { bits, field: self.clone() })
    }

    /// Evaluate a univariate polynomial (coefficient of x^i at index i).
    pub fn eval_poly(&self, coeffs: &[u32], x: u32) -> u32 {
        coeffs.iter().rev().fold(0, |acc, &c| self.mul(acc, x) ^ c)
    }
}

/// Elements serialize as lowercase hex of the bitmask.
pub fn to_hex(bits: u32) -> String {
    format!("{bits:#x}")
}

pub fn from_hex(s: &str) -> Result<u32> {
    let t = s.trim();
    let body = t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")).unwrap_or(t);
    u32::from_str_radix(body, 16).map_err(|_| Error::Parse(format!("bad hex field element {s:?}")))
}

/// A field element that knows its field; arithmetic checks that both operands agree.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldElement {
    bits: u32,
    field: Field,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} in {:?}", to_hex(self.bits), self.field)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&to_hex(self.bits))
    }
}

impl FieldElement {
    pub fn bits(&self) -> u32 {
        self.bits
    }
    pub fn field(&self) -> &Field {
        &self.field
    }
    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    fn check(&self, other: &FieldElement) -> Result<()> {
        if self.field != other.field {
            return Err(Error::Usage(format!(
                "field mismatch: {:?} vs {:?}",
                self.field, other.field
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &FieldElement) -> Result<FieldElement> {
        self.check(other)?;
        Ok(FieldElement { bits: self.bits ^ other.bits, field: self.field.clone() })
    }

    pub fn mul(&self, other: &FieldElement) -> Result<FieldElement> {
        self.check(other)?;
        Ok(FieldElement { bits: self.field.mul(self.bits, other.bits), field: self.field.clone() })
    }

    pub fn invert(&self) -> Result<FieldElement> {
        Ok(FieldElement { bits: self.field.inv(self.bits)?, field: self.field.clone() })
    }

    pub fn sqrt(&self) -> FieldElement {
        FieldElement { bits: self.field.sqrt(self.bits), field: self.field.clone() }
    }

    pub fn pow(&self, e: u64) -> FieldElement {
        FieldElement { bits: self.field.pow(self.bits, e), field: self.field.clone() }
    }

    pub fn embed(&self, target: &Field) -> Result<FieldElement> {
        let emb = Embedding::new(&self.field, target)?;
        Ok(FieldElement { bits: emb.apply(self.bits), field: target.clone() })
    }
}

/// Canonical embedding GF(2^m) -> GF(2^k) for m | k.
///
/// The generator of the source goes to the smallest-bitmask root of the source
/// modulus in the target that keeps the whole system of embeddings compatible
/// (embedding through an intermediate field agrees with the direct one).
#[derive(Clone, Debug)]
pub struct Embedding {
    src: Field,
    dst: Field,
    /// Images of 1, t, t^2, ... of the source basis.
    powers: Vec<u32>,
    /// Echelon basis (pivot bit, reduced image, source bits) for preimages.
    echelon: Vec<(u32, u32, u32)>,
}

fn embedding_cache() -> &'static Mutex<HashMap<(FieldSpec, FieldSpec), u32>> {
    static CACHE: OnceLock<Mutex<HashMap<(FieldSpec, FieldSpec), u32>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn divisors(n: u32) -> Vec<u32> {
    (1..=n).filter(|d| n.is_multiple_of(*d)).collect()
}

/// Maximal proper divisors of n.
fn maximal_divisors(n: u32) -> Vec<u32> {
    let ds: Vec<u32> = divisors(n).into_iter().filter(|&d| d < n).collect();
    ds.iter()
        .copied()
        .filter(|&d| !ds.iter().any(|&e| e > d && e % d == 0))
        .collect()
}

/// Image of the source generator in the target field.
fn generator_image(src: &Field, dst: &Field) -> Result<u32> {
    let (m, k) = (src.degree(), dst.degree());
    if k % m != 0 {
        return Err(Error::Usage(format!(
            "cannot embed GF(2^{m}) into GF(2^{k}): {m} does not divide {k}"
        )));
    }
    if m == 1 {
        return Ok(1);
    }
    if let Some(&r) = embedding_cache().lock().unwrap().get(&(src.spec(), dst.spec())) {
        return Ok(r);
    }
    let maximal = maximal_divisors(k);
    let r = if m < k && !maximal.contains(&m) {
        let n = *maximal.iter().find(|&&n| n % m == 0).expect("m divides some maximal divisor");
        let mid = Field::standard(n)?;
        Embedding::new(&mid, dst)?.apply(Embedding::new(src, &mid)?.apply(2))
    } else {
        let modulus = src.spec().modulus;
        let is_root = |x: u32| {
            let mut acc = 0;
            for i in (0..=m).rev() {
                acc = dst.mul(acc, x);
                if modulus >> i & 1 == 1 {
                    acc ^= 1;
                }
            }
            acc == 0
        };
        // (image of the generator of GF(2^g) in the source, required image in the target)
        let mut constraints = Vec::new();
        for &n in maximal.iter().filter(|&&n| n < m) {
            let g = num_integer::gcd(n, m);
            if g == 1 {
                continue;
            }
            let sub = Field::standard(g)?;
            let mid = Field::standard(n)?;
            let in_src = Embedding::new(&sub, src)?.apply(2);
            let want = Embedding::new(&mid, dst)?.apply(Embedding::new(&sub, &mid)?.apply(2));
            constraints.push((in_src, want));
        }
        let apply_candidate = |x: u32, a: u32| {
            let mut acc = 0;
            let mut p = 1;
            for i in 0..m {
                if a >> i & 1 == 1 {
                    acc ^= p;
                }
                p = dst.mul(p, x);
            }
            acc
        };
        dst.elements()
            .find(|&x| {
                is_root(x) && constraints.iter().all(|&(a, want)| apply_candidate(x, a) == want)
            })
            .ok_or_else(|| Error::Internal("no root of an irreducible modulus".into()))?
    };
    embedding_cache().lock().unwrap().insert((src.spec(), dst.spec()), r);
    Ok(r)
}

impl Embedding {
    pub fn new(src: &Field, dst: &Field) -> Result<Embedding> {
        let m = src.degree();
        let powers: Vec<u32> = if src == dst {
            (0..m).map(|i| 1 << i).collect()
        } else {
            let r = generator_image(src, dst)?;
            let mut p = 1;
            (0..m)
                .map(|_| {
                    let cur = p;
                    p = dst.mul(p, r);
                    cur
                })
                .collect()
        };
        let mut echelon: Vec<(u32, u32, u32)> = Vec::new();
        for (i, &v) in powers.iter().enumerate() {
            let mut v = v;
            let mut s = 1u32 << i;
            for &(piv, bv, bs) in &echelon {
                if v >> piv & 1 == 1 {
                    v ^= bv;
                    s ^= bs;
                }
            }
            let piv = 31 - v.leading_zeros();
            for e in echelon.iter_mut() {
                if e.1 >> piv & 1 == 1 {
                    e.1 ^= v;
                    e.2 ^= s;
                }
            }
            echelon.push((piv, v, s));
        }
        Ok(Embedding { src: src.clone(), dst: dst.clone(), powers, echelon })
    }

    pub fn source(&self) -> &Field {
        &self.src
    }
    pub fn target(&self) -> &Field {
        &self.dst
    }

    #[inline]
    pub fn apply(&self, a: u32) -> u32 {
        let mut acc = 0;
        let mut a = a;
        let mut i = 0;
        while a != 0 {
            if a & 1 == 1 {
                acc ^= self.powers[i];
            }
            a >>= 1;
            i += 1;
        }
        acc
    }

    /// Preimage of a target element lying in the image, else `None`.
    pub fn preimage(&self, b: u32) -> Option<u32> {
        let mut v = b;
        let mut s = 0;
        for &(piv, bv, bs) in &self.echelon {
            if v >> piv & 1 == 1 {
                v ^= bv;
                s ^= bs;
            }
        }
        (v == 0).then_some(s)
    }
}

/// Smallest field containing both (degree = lcm), when it is at most GF(2^16).
pub fn compositum_degree(a: u32, b: u32) -> u32 {
    num_integer::lcm(a, b)
}

/// Roots of a nonzero univariate polynomial (coefficient of x^i at index i) by exhaustive
/// evaluation and deflation; returned sorted as (root, multiplicity).
pub fn find_roots(field: &Field, coeffs: &[u32]) -> Result<Vec<(u32, usize)>> {
    let mut p: Vec<u32> = coeffs.to_vec();
    while p.last() == Some(&0) {
        p.pop();
    }
    if p.is_empty() {
        return Err(Error::Usage("find_roots of the zero polynomial".into()));
    }
    let mut out = Vec::new();
    if p.len() == 1 {
        return Ok(out);
    }
    for x in field.elements() {
        if p.len() <= 1 {
            break;
        }
        let mut mult = 0;
        while p.len() > 1 && field.eval_poly(&p, x) == 0 {
            p = deflate(field, &p, x);
            mult += 1;
        }
        if mult > 0 {
            out.push((x, mult));
        }
    }
    Ok(out)
}

/// Divide by (X - r), assuming r is a root.
pub fn deflate(field: &Field, p: &[u32], r: u32) -> Vec<u32> {
    let n = p.len() - 1;
    let mut q = vec![0u32; n];
    let mut carry = 0u32;
    for i in (0..n).rev() {
        carry = p[i + 1] ^ field.mul(carry, r);
        q[i] = carry;
    }
    q
}
