//! Weierstrass models over k[t] in characteristic 2: invariants, Tate's
//! algorithm, the supersingular place criterion and fiber configuration counts.

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{find_roots, Embedding, Field};
use crate::pencil::{extension, PencilValue};
use crate::poly::upoly;

/// A place of k(t): a root of a t-polynomial or infinity.
pub type Place = PencilValue;

type Poly = Vec<u32>;

fn coeff(p: &[u32], j: usize) -> u32 {
    p.get(j).copied().unwrap_or(0)
}

fn val(p: &[u32]) -> usize {
    upoly::x_adic_valuation(p).unwrap_or(usize::MAX)
}

fn monomial(c: u32, j: usize) -> Poly {
    if c == 0 {
        return vec![];
    }
    let mut p = vec![0; j + 1];
    p[j] = c;
    p
}

/// b2, b4, b6, b8 reduced mod 2 from a = (a1, a2, a3, a4, a6).
///
/// b2 = a1^2 + 4 a2, b4 = 2 a4 + a1 a3, b6 = a3^2 + 4 a6,
/// b8 = a1^2 a6 + 4 a2 a6 - a1 a3 a4 + a2 a3^2 - a4^2.
pub fn b_invariants(f: &Field, a: &[Poly; 5]) -> [Poly; 4] {
    let m = |x: &[u32], y: &[u32]| upoly::mul(f, x, y);
    let [a1, a2, a3, a4, a6] = a;
    let b2 = m(a1, a1);
    let b4 = m(a1, a3);
    let b6 = m(a3, a3);
    let b8 = upoly::add(
        &upoly::add(&m(&b2, a6), &m(&b4, a4)),
        &upoly::add(&m(a2, &b6), &m(a4, a4)),
    );
    [b2, b4, b6, b8]
}

/// Delta = -b2^2 b8 - 8 b4^3 - 27 b6^2 + 9 b2 b4 b6 reduced mod 2.
pub fn discriminant(f: &Field, a: &[Poly; 5]) -> Poly {
    let [b2, b4, b6, b8] = b_invariants(f, a);
    let m = |x: &[u32], y: &[u32]| upoly::mul(f, x, y);
    upoly::add(&upoly::add(&m(&m(&b2, &b2), &b8), &m(&b6, &b6)), &m(&m(&b2, &b4), &b6))
}

/// c4 = b2^2 - 24 b4 reduced mod 2.
pub fn c4(f: &Field, a: &[Poly; 5]) -> Poly {
    let b2 = upoly::mul(f, &a[0], &a[0]);
    upoly::mul(f, &b2, &b2)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeierstrassModel {
    #[serde(skip)]
    pub field: Option<Field>,
    /// a1, a2, a3, a4, a6 as coefficient lists in t
    pub a: [Poly; 5],
    /// 1 for a rational elliptic surface, 2 for a K3 surface
    pub chi: u32,
}

impl WeierstrassModel {
    pub fn new(field: &Field, a: [Poly; 5], chi: u32) -> Result<Self> {
        if chi == 0 {
            return Err(Error::Usage("chi must be positive".into()));
        }
        let a = a.map(upoly::trim);
        if a.iter().flatten().any(|&c| !field.contains(c)) {
            return Err(Error::Usage("coefficient outside the field".into()));
        }
        let model = WeierstrassModel { field: Some(field.clone()), a, chi };
        if model.discriminant().is_empty() {
            return Err(Error::NotElliptic("the discriminant vanishes identically".into()));
        }
        Ok(model)
    }
    pub fn field(&self) -> &Field {
        self.field.as_ref().expect("model without field")
    }
    pub fn discriminant(&self) -> Poly {
        discriminant(self.field(), &self.a)
    }
    pub fn b_invariants(&self) -> [Poly; 4] {
        b_invariants(self.field(), &self.a)
    }
    pub fn c4(&self) -> Poly {
        c4(self.field(), &self.a)
    }
    /// j = c4^3 / Delta as (numerator, denominator).
    pub fn j_invariant(&self) -> (Poly, Poly) {
        let f = self.field();
        let c = self.c4();
        (upoly::mul(f, &upoly::mul(f, &c, &c), &c), self.discriminant())
    }
}

/// The model y^2 + a1^2 xy = x^3 + D' x^2 + Delta.
pub fn build_integral_model(field: &Field, a1: &[u32], d_twist: &[u32], delta: &[u32], chi: u32) -> Result<WeierstrassModel> {
    let a1sq = upoly::mul(field, a1, a1);
    WeierstrassModel::new(field, [a1sq, d_twist.to_vec(), vec![], vec![], delta.to_vec()], chi)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TateType {
    I(usize),
    IStar(usize),
    II,
    III,
    IV,
    IVStar,
    IIIStar,
    IIStar,
}

impl TateType {
    pub fn name(self) -> String {
        match self {
            TateType::I(n) => format!("I{n}"),
            TateType::IStar(n) => format!("I{n}*"),
            TateType::II => "II".into(),
            TateType::III => "III".into(),
            TateType::IV => "IV".into(),
            TateType::IVStar => "IV*".into(),
            TateType::IIIStar => "III*".into(),
            TateType::IIStar => "II*".into(),
        }
    }
    pub fn is_smooth(self) -> bool {
        self == TateType::I(0)
    }
}

impl Serialize for TateType {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalFiberReport {
    pub place: Place,
    #[serde(rename = "type")]
    pub kodaira: TateType,
    pub ord_delta_min: usize,
    pub scalings: usize,
}

/// x = x' + r, y = y' + s x' + w, written out mod 2.
fn translate(f: &Field, a: &mut [Poly; 5], r: &[u32], s: &[u32], w: &[u32]) {
    let m = |x: &[u32], y: &[u32]| upoly::mul(f, x, y);
    let add = |x: &[u32], y: &[u32]| upoly::add(x, y);
    let [a1, a2, a3, a4, a6] = a.clone();
    let rs = m(r, s);
    let r2 = m(r, r);
    let n2 = add(&add(&a2, &m(s, &a1)), &add(r, &m(s, s)));
    let n3 = add(&a3, &m(r, &a1));
    let n4 = add(&add(&a4, &m(s, &a3)), &add(&m(&add(w, &rs), &a1), &r2));
    let n6 = [m(r, &a4), m(&r2, &a2), m(&r2, r), m(w, &a3), m(w, w), m(&m(r, w), &a1)]
        .iter()
        .fold(a6.clone(), |acc, t| add(&acc, t));
    a[1] = n2;
    a[2] = n3;
    a[3] = n4;
    a[4] = n6;
}

fn divide_by_power(p: &[u32], k: usize) -> Poly {
    p.iter().skip(k).copied().collect::<Vec<_>>()
}

/// Tate's algorithm at t = 0 for a model over k[t] (k perfect of characteristic 2).
pub fn tate_at_zero(f: &Field, model: &[Poly; 5]) -> Result<(TateType, usize, usize)> {
    let mut a = model.clone().map(upoly::trim);
    let mut scalings = 0usize;
    let sqrt = |x: u32| f.sqrt(x);
    loop {
        let d = discriminant(f, &a);
        if d.is_empty() {
            return Err(Error::NotElliptic("the discriminant vanishes identically".into()));
        }
        let vd = val(&d);
        if vd == 0 {
            return Ok((TateType::I(0), 0, scalings));
        }
        // move the singular point of the reduction to (0, 0)
        let c0: Vec<u32> = a.iter().map(|p| coeff(p, 0)).collect();
        let (x0, y0) = if c0[0] != 0 {
            let x0 = f.div(c0[2], c0[0])?;
            (x0, f.div(f.square(x0) ^ c0[3], c0[0])?)
        } else {
            if c0[2] != 0 {
                return Err(Error::Internal("reduction is smooth but the discriminant vanishes".into()));
            }
            let x0 = sqrt(c0[3]);
            let rhs = f.pow(x0, 3) ^ f.mul(c0[1], f.square(x0)) ^ f.mul(c0[3], x0) ^ c0[4];
            (x0, sqrt(rhs))
        };
        translate(f, &mut a, &monomial(x0, 0), &[], &monomial(y0, 0));
        if coeff(&a[0], 0) != 0 {
            return Ok((TateType::I(vd), vd, scalings));
        }
        if val(&a[4]) < 2 {
            return Ok((TateType::II, vd, scalings));
        }
        let [_, _, b6, b8] = b_invariants(f, &a);
        if val(&b8) < 3 {
            return Ok((TateType::III, vd, scalings));
        }
        if val(&b6) < 3 {
            return Ok((TateType::IV, vd, scalings));
        }
        // arrange t | a1, a2; t^2 | a3, a4; t^3 | a6
        let s = sqrt(coeff(&a[1], 0));
        translate(f, &mut a, &[], &monomial(s, 0), &[]);
        let w = sqrt(coeff(&a[4], 2));
        translate(f, &mut a, &[], &[], &monomial(w, 1));
        if val(&a[0]) < 1 || val(&a[1]) < 1 || val(&a[2]) < 2 || val(&a[3]) < 2 || val(&a[4]) < 3 {
            return Err(Error::Internal("Tate step 6 normalization failed".into()));
        }
        let p = vec![coeff(&a[4], 3), coeff(&a[3], 2), coeff(&a[1], 1), 1];
        let g = upoly::gcd(f, &p, &upoly::derivative(&p));
        if upoly::degree(&g) == Some(0) {
            return Ok((TateType::IStar(0), vd, scalings));
        }
        let a21 = coeff(&a[1], 1);
        let triple = upoly::degree(&g) == Some(2);
        if !triple {
            // simple and double root; move the double root to 0
            let r0 = g[0];
            translate(f, &mut a, &monomial(r0, 1), &[], &[]);
            let a21 = coeff(&a[1], 1);
            if a21 == 0 {
                return Err(Error::Internal("Tate step 7 lost the simple root".into()));
            }
            let mut n = 1usize;
            loop {
                if n > vd + 2 {
                    return Err(Error::Internal("Tate step 7 did not terminate".into()));
                }
                if n % 2 == 1 {
                    let e = (n + 3) / 2;
                    let b = coeff(&a[2], e);
                    if b != 0 {
                        return Ok((TateType::IStar(n), vd, scalings));
                    }
                    let root = sqrt(coeff(&a[4], n + 3));
                    translate(f, &mut a, &[], &[], &monomial(root, e));
                } else {
                    let e = (n + 4) / 2;
                    let b = coeff(&a[3], e);
                    if b != 0 {
                        return Ok((TateType::IStar(n), vd, scalings));
                    }
                    let root = sqrt(f.div(coeff(&a[4], n + 3), a21)?);
                    translate(f, &mut a, &monomial(root, (n + 2) / 2), &[], &[]);
                }
                n += 1;
            }
        }
        // triple root a21: move it to 0
        translate(f, &mut a, &monomial(a21, 1), &[], &[]);
        if coeff(&a[2], 2) != 0 {
            return Ok((TateType::IVStar, vd, scalings));
        }
        let root = sqrt(coeff(&a[4], 4));
        translate(f, &mut a, &[], &[], &monomial(root, 2));
        if val(&a[3]) < 4 {
            return Ok((TateType::IIIStar, vd, scalings));
        }
        if val(&a[4]) < 6 {
            return Ok((TateType::IIStar, vd, scalings));
        }
        for (i, w) in [1usize, 2, 3, 4, 6].iter().enumerate() {
            a[i] = divide_by_power(&a[i], *w);
        }
        scalings += 1;
    }
}

/// The model centred at a place: coefficients over the residue field of the place.
pub fn localize(model: &WeierstrassModel, place: Place) -> Result<(Field, [Poly; 5])> {
    let k = model.field();
    match place {
        PencilValue::Infinity => {
            let weights = [1usize, 2, 3, 4, 6];
            let mut out: [Poly; 5] = Default::default();
            for (i, w) in weights.iter().enumerate() {
                let n = w * model.chi as usize;
                let p = &model.a[i];
                if upoly::degree(p).is_some_and(|d| d > n) {
                    return Err(Error::Usage(format!("deg a{w} exceeds {n} = {w} chi")));
                }
                let mut q = vec![0u32; n + 1];
                for (j, &c) in p.iter().enumerate() {
                    q[n - j] = c;
                }
                out[i] = upoly::trim(q);
            }
            Ok((k.clone(), out))
        }
        PencilValue::Finite { value, degree } => {
            let kf = if degree == k.degree() {
                k.clone()
            } else {
                extension(k, degree / k.degree()).ok_or_else(|| Error::Capability("place field too large".into()))?
            };
            let e = Embedding::new(k, &kf)?;
            let out = model.a.clone().map(|p| upoly::shift(&kf, &upoly::embed(&e, &p), value));
            Ok((kf, out))
        }
    }
}

pub fn tate_classify(model: &WeierstrassModel, place: Place) -> Result<LocalFiberReport> {
    let (kf, a) = localize(model, place)?;
    let (kodaira, ord_delta_min, scalings) = tate_at_zero(&kf, &a)?;
    Ok(LocalFiberReport { place, kodaira, ord_delta_min, scalings })
}

#[derive(Clone, Debug, Serialize)]
pub struct GlobalReport {
    pub places: Vec<LocalFiberReport>,
    /// all roots of the discriminant were located
    pub complete: bool,
    pub total_ord_delta_min: usize,
}

/// Tate's algorithm at every root of the discriminant (over extensions of degree
/// up to 6 of the base field) and at infinity.
pub fn tate_all_places(model: &WeierstrassModel) -> Result<GlobalReport> {
    let k = model.field();
    let delta = model.discriminant();
    let mut places = Vec::new();
    let mut found = 0usize;
    let total = upoly::degree(&delta).unwrap_or(0);
    for m in 1..=6u32 {
        if found == total {
            break;
        }
        let Some(kf) = extension(k, m) else { break };
        let e = Embedding::new(k, &kf)?;
        let pe = upoly::embed(&e, &delta);
        for (r, mult) in find_roots(&kf, &pe)? {
            if (1..m).any(|d| m % d == 0 && extension(k, d).is_some_and(|s| Embedding::new(&s, &kf).unwrap().preimage(r).is_some())) {
                continue;
            }
            found += mult;
            places.push(Place::finite(r, kf.degree()));
        }
    }
    places.push(Place::Infinity);
    let reports: Vec<Result<LocalFiberReport>> = places.par_iter().map(|&p| tate_classify(model, p)).collect();
    let reports: Vec<LocalFiberReport> = reports.into_iter().collect::<Result<_>>()?;
    let total_ord_delta_min = reports.iter().map(|r| r.ord_delta_min).sum();
    Ok(GlobalReport { places: reports, complete: found == total, total_ord_delta_min })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SsVerdict {
    Consistent,
    Contradiction,
}

/// At a zero of a1 where Delta does not vanish, the t-coefficient of Delta
/// (after moving the place to 0) must vanish.
pub fn ss_place_test(field: &Field, a1: &[u32], delta: &[u32], place: Place, chi: u32) -> Result<SsVerdict> {
    let local = |p: &[u32], weight: usize| -> Result<Poly> {
        let p = upoly::trim(p.to_vec());
        match place {
            PencilValue::Infinity => {
                let n = weight * chi.max(1) as usize;
                if upoly::degree(&p).is_some_and(|d| d > n) {
                    return Err(Error::Usage(format!("degree exceeds the weight {n}")));
                }
                let mut q = vec![0u32; n + 1];
                for (j, &c) in p.iter().enumerate() {
                    q[n - j] = c;
                }
                Ok(upoly::trim(q))
            }
            PencilValue::Finite { value, degree } => {
                let kf = if degree == field.degree() {
                    field.clone()
                } else {
                    extension(field, degree / field.degree())
                        .ok_or_else(|| Error::Capability("place field too large".into()))?
                };
                let e = Embedding::new(field, &kf)?;
                Ok(upoly::shift(&kf, &upoly::embed(&e, &p), value))
            }
        }
    };
    let (a1l, dl) = (local(a1, 1)?, local(delta, 12)?);
    if coeff(&a1l, 0) != 0 {
        return Err(Error::Usage("a1 does not vanish at the place".into()));
    }
    if coeff(&dl, 0) == 0 {
        return Err(Error::Usage("Delta vanishes at the place".into()));
    }
    Ok(if coeff(&dl, 1) == 0 { SsVerdict::Consistent } else { SsVerdict::Contradiction })
}

/// Fiber types available to the configuration enumerator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ConfigFiber {
    I1,
    I2,
    I3,
    I4,
    II,
    III,
    IV,
}

impl ConfigFiber {
    pub fn name(self) -> &'static str {
        match self {
            ConfigFiber::I1 => "I1",
            ConfigFiber::I2 => "I2",
            ConfigFiber::I3 => "I3",
            ConfigFiber::I4 => "I4",
            ConfigFiber::II => "II",
            ConfigFiber::III => "III",
            ConfigFiber::IV => "IV",
        }
    }
    /// Euler number, a lower bound for additive types.
    pub fn euler(self) -> u32 {
        match self {
            ConfigFiber::I1 => 1,
            ConfigFiber::I2 => 2,
            ConfigFiber::I3 => 3,
            ConfigFiber::I4 => 4,
            ConfigFiber::II | ConfigFiber::III | ConfigFiber::IV => 4,
        }
    }
    pub fn additive(self) -> bool {
        matches!(self, ConfigFiber::II | ConfigFiber::III | ConfigFiber::IV)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Preset {
    pub name: String,
    pub budget: u32,
    /// (type, line capacity)
    pub types: Vec<(ConfigFiber, u32)>,
}

impl Preset {
    /// Fibers of the fibration induced by a square (degree 4 fibers).
    pub fn psi_square_case() -> Self {
        use ConfigFiber::*;
        Preset {
            name: "psi-square-case".into(),
            budget: 24,
            types: vec![(I1, 0), (I2, 1), (I3, 2), (I4, 4), (II, 0), (III, 1), (IV, 2)],
        }
    }
    /// Fibers of the pencil of residual cubics of a line.
    pub fn pi_cubic_case() -> Self {
        use ConfigFiber::*;
        Preset {
            name: "pi-cubic-case".into(),
            budget: 24,
            types: vec![(I1, 0), (I2, 1), (I3, 3), (II, 0), (III, 1), (IV, 3)],
        }
    }
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "psi-square-case" => Ok(Self::psi_square_case()),
            "pi-cubic-case" => Ok(Self::pi_cubic_case()),
            _ => Err(Error::Usage(format!("unknown preset {name:?}"))),
        }
    }
    pub fn restricted(mut self, keep: &[ConfigFiber]) -> Self {
        self.types.retain(|(t, _)| keep.contains(t));
        self
    }
    pub fn with_budget(mut self, budget: u32) -> Self {
        self.budget = budget;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConfigCandidate {
    /// (type, count), in the preset's type order
    pub fibers: Vec<(ConfigFiber, u32)>,
    pub euler: u32,
    pub lines: u32,
    /// fibers that contain at least one line
    pub line_bearing: u32,
}

impl ConfigCandidate {
    pub fn label(&self) -> String {
        let mut parts: Vec<(ConfigFiber, u32)> = self.fibers.iter().copied().filter(|&(_, c)| c > 0).collect();
        // I4 first, then by decreasing euler, multiplicative before additive
        parts.sort_by_key(|&(t, _)| (t != ConfigFiber::I4, t.additive(), std::cmp::Reverse(t.euler()), t));
        parts
            .iter()
            .map(|&(t, c)| if c == 1 { t.name().to_string() } else { format!("{c}{}", t.name()) })
            .collect::<Vec<_>>()
            .join("+")
    }
    pub fn count(&self, t: ConfigFiber) -> u32 {
        self.fibers.iter().find(|(x, _)| *x == t).map_or(0, |(_, c)| *c)
    }
}

/// All multisets of fiber types whose Euler numbers (lower bounds for additive
/// types) fit the budget, with the remainder filled by I1 fibers, having at least
/// `min_lines` lines in fibers. If I1 is not available the sum must be exact
/// (or below it when an additive fiber can absorb the excess).
pub fn enumerate_fiber_configs(preset: &Preset, min_lines: u32) -> Result<Vec<ConfigCandidate>> {
    if preset.budget == 0 {
        return Err(Error::Usage("the Euler budget must be positive".into()));
    }
    let filler = preset.types.iter().any(|(t, _)| *t == ConfigFiber::I1);
    let others: Vec<(ConfigFiber, u32)> = preset.types.iter().copied().filter(|(t, _)| *t != ConfigFiber::I1).collect();
    fn rec(
        others: &[(ConfigFiber, u32)],
        i: usize,
        left: u32,
        acc: &mut Vec<(ConfigFiber, u32)>,
        out: &mut Vec<(Vec<(ConfigFiber, u32)>, u32)>,
    ) {
        if i == others.len() {
            out.push((acc.clone(), left));
            return;
        }
        let (t, _) = others[i];
        let mut c = 0;
        while c * t.euler() <= left {
            acc.push((t, c));
            rec(others, i + 1, left - c * t.euler(), acc, out);
            acc.pop();
            c += 1;
        }
    }
    let first_max = others.first().map_or(0, |(t, _)| preset.budget / t.euler());
    let chunks: Vec<Vec<ConfigCandidate>> = (0..=first_max)
        .into_par_iter()
        .map(|c0| {
            let mut raw = Vec::new();
            if let Some(&(t0, _)) = others.first() {
                let mut acc = vec![(t0, c0)];
                rec(&others, 1, preset.budget - c0 * t0.euler(), &mut acc, &mut raw);
            } else {
                raw.push((vec![], preset.budget));
            }
            raw.into_iter()
                .filter_map(|(fibers, left)| {
                    let has_additive = fibers.iter().any(|(t, c)| *c > 0 && t.additive());
                    let mut all = Vec::new();
                    if filler {
                        all.push((ConfigFiber::I1, left));
                    } else if left > 0 && !has_additive {
                        return None;
                    }
                    all.extend(fibers.iter().copied());
                    let cap = |t: ConfigFiber| preset.types.iter().find(|(x, _)| *x == t).unwrap().1;
                    let lines = all.iter().map(|&(t, c)| c * cap(t)).sum();
                    let line_bearing = all.iter().filter(|&&(t, _)| cap(t) > 0).map(|&(_, c)| c).sum();
                    let euler = all.iter().map(|&(t, c)| c * t.euler()).sum::<u32>();
                    let order = |t: ConfigFiber| preset.types.iter().position(|(x, _)| *x == t).unwrap();
                    all.sort_by_key(|&(t, _)| order(t));
                    let euler = if filler || !has_additive { euler } else { preset.budget };
                    (lines >= min_lines).then_some(ConfigCandidate { fibers: all, euler, lines, line_bearing })
                })
                .collect()
        })
        .collect();
    let mut out: Vec<ConfigCandidate> = chunks.into_iter().flatten().collect();
    out.sort_by(|a, b| {
        let key = |c: &ConfigCandidate| {
            let top = c
                .fibers
                .iter()
                .filter(|(t, n)| *n > 0 && *t != ConfigFiber::I4 && *t != ConfigFiber::I1)
                .map(|(t, _)| *t)
                .max();
            (std::cmp::Reverse(c.lines), std::cmp::Reverse(c.count(ConfigFiber::I4)), top, c.label())
        };
        key(a).cmp(&key(b))
    });
    out.dedup();
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum HeightVerdict {
    Nonzero,
    Zero,
}

/// 10 + 6 s - 3 r / 2, with the verdict on whether it vanishes.
pub fn qe_height_obstruction(s: u32, r: u32) -> Result<(Ratio<i64>, HeightVerdict)> {
    if r > 20 {
        return Err(Error::Usage("r must lie in [0, 20]".into()));
    }
    let h = Ratio::from_integer(10 + 6 * s as i64) - Ratio::new(3 * r as i64, 2);
    let v = if h == Ratio::from_integer(0) { HeightVerdict::Zero } else { HeightVerdict::Nonzero };
    Ok((h, v))
}

/// All (s, r) with s <= s_max, r <= 20 where the height vanishes.
pub fn qe_height_sweep(s_max: u32) -> Vec<(u32, u32)> {
    (0..=s_max)
        .flat_map(|s| (0..=20).map(move |r| (s, r)))
        .filter(|&(s, r)| qe_height_obstruction(s, r).is_ok_and(|(_, v)| v == HeightVerdict::Zero))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf2() -> Field {
        Field::standard(1).unwrap()
    }

    fn tn(n: usize) -> Poly {
        monomial(1, n)
    }

    #[test]
    fn multiplicative_family() {
        let f = gf2();
        for n in 1..=10 {
            let m = build_integral_model(&f, &[1], &[], &tn(n), 1 + (n as u32 - 1) / 6).unwrap();
            assert_eq!(m.discriminant(), tn(n));
            let r = tate_classify(&m, Place::finite(0, 1)).unwrap();
            assert_eq!((r.kodaira, r.ord_delta_min, r.scalings), (TateType::I(n), n, 0));
        }
    }

    #[test]
    fn not_elliptic() {
        let f = gf2();
        assert!(matches!(build_integral_model(&f, &[], &[], &[1, 1], 1), Err(Error::NotElliptic(_))));
    }

    #[test]
    fn translation_preserves_discriminant() {
        let f = Field::standard(3).unwrap();
        let a: [Poly; 5] = [vec![1, 2], vec![3, 0, 5], vec![0, 7], vec![1, 1, 1], vec![4, 0, 0, 6]];
        let d = discriminant(&f, &a);
        let mut b = a.clone();
        translate(&f, &mut b, &[3, 1], &[0, 5], &[2, 0, 7]);
        assert_eq!(discriminant(&f, &b), d);
    }

    #[test]
    fn ss_examples() {
        let f = gf2();
        let z = Place::finite(0, 1);
        assert_eq!(ss_place_test(&f, &[0, 1], &[1, 0, 1], z, 1).unwrap(), SsVerdict::Consistent);
        assert_eq!(ss_place_test(&f, &[0, 1], &[1, 1], z, 1).unwrap(), SsVerdict::Contradiction);
        assert!(ss_place_test(&f, &[1, 1], &[1, 1], z, 1).is_err());
    }

    #[test]
    fn height_examples() {
        assert_eq!(qe_height_obstruction(0, 0).unwrap().0, Ratio::from_integer(10));
        assert_eq!(qe_height_obstruction(1, 4).unwrap().0, Ratio::from_integer(10));
        assert!(qe_height_sweep(100).is_empty());
        assert!(qe_height_obstruction(0, 21).is_err());
    }

    #[test]
    fn square_case_table() {
        let c = enumerate_fiber_configs(&Preset::psi_square_case(), 21).unwrap();
        let labels: Vec<String> = c.iter().map(|x| x.label()).collect();
        assert_eq!(
            labels,
            ["6I4", "5I4+2I2", "5I4+I3+I1", "5I4+IV", "5I4+I2+2I1", "5I4+III", "4I4+2I3+I2"]
        );
        assert!(enumerate_fiber_configs(&Preset::psi_square_case(), 25).unwrap().is_empty());
    }
}
