//! The characteristic 2 Hessian of plane cubics, the resultant R locating
//! lines in the fibers of a pencil, and the family of quartics whose axis
//! line has two total ramification points.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Embedding, Field};
use crate::geometry::{pullback, Line, ProjectiveMap, QuarticSurface};
use crate::pencil::{
    extension, FiberReport, Kodaira, PencilValue, RamificationData, RamificationType, ResidualPencil,
};
use crate::poly::{resultant, upoly, BinaryForm, Monomial, PolyRing, SparsePoly, UniPolyRing};
use crate::ring::{determinant, Integers, Ring};

/// Exponents (i, j, k) of the ten cubic monomials x1^i x2^j x3^k, in the order
/// used for the coefficient variables of the universal Hessian.
pub const CUBIC_MONOMIALS: [[u16; 3]; 10] = [
    [3, 0, 0],
    [2, 1, 0],
    [2, 0, 1],
    [1, 2, 0],
    [1, 1, 1],
    [1, 0, 2],
    [0, 3, 0],
    [0, 2, 1],
    [0, 1, 2],
    [0, 0, 3],
];

const ALPHA: usize = 4;

/// h over the integers in 13 variables: the 10 coefficients, then x1, x2, x3.
#[derive(Clone, Debug)]
pub struct UniversalHessian {
    pub table: SparsePoly<BigInt>,
    /// terms with odd coefficient, for reduction mod 2
    odd_terms: Vec<([u16; 10], [u16; 3])>,
}

fn generic_cubic(z: &Integers) -> SparsePoly<BigInt> {
    SparsePoly::from_terms(
        z,
        13,
        CUBIC_MONOMIALS.iter().enumerate().map(|(i, m)| {
            let mut e = vec![0u16; 13];
            e[i] = 1;
            e[10] = m[0];
            e[11] = m[1];
            e[12] = m[2];
            (e, BigInt::from(1))
        }),
    )
}

/// det of the Hessian of the generic cubic, minus 2 alpha^2 g, as computed over Z.
pub fn hessian_numerator() -> SparsePoly<BigInt> {
    let z = Integers;
    let g = generic_cubic(&z);
    let ring = PolyRing { base: z, nvars: 13 };
    let m: Vec<Vec<SparsePoly<BigInt>>> = (0..3)
        .map(|i| (0..3).map(|j| g.derivative(&z, 10 + i).derivative(&z, 10 + j)).collect())
        .collect();
    let det = determinant(&ring, &m);
    let alpha = SparsePoly::var(&z, 13, ALPHA);
    let two = SparsePoly::constant(&z, 13, BigInt::from(2));
    det.sub(&z, &two.mul(&z, &alpha).mul(&z, &alpha).mul(&z, &g))
}

impl UniversalHessian {
    fn build() -> Result<Self> {
        let z = Integers;
        let num = hessian_numerator();
        let eight = BigInt::from(8);
        let mut table = SparsePoly::zero(13);
        for (m, c) in num.terms() {
            let (q, r) = c.div_rem(&eight);
            if !r.is_zero() {
                return Err(Error::Internal(format!("coefficient {c} of {:?} is not divisible by 8", m.0)));
            }
            table.add_term(&z, m.clone(), q);
        }
        let odd_terms = table
            .terms()
            .filter(|(_, c)| c.is_odd())
            .map(|(m, _)| {
                let mut a = [0u16; 10];
                a.copy_from_slice(&m.0[..10]);
                ([a[0], a[1], a[2], a[3], a[4], a[5], a[6], a[7], a[8], a[9]], [m.0[10], m.0[11], m.0[12]])
            })
            .collect();
        Ok(UniversalHessian { table, odd_terms })
    }

    /// Evaluate the integral h at an integral cubic (given by its 10 coefficients).
    pub fn specialize_integral(&self, coeffs: &[BigInt; 10]) -> SparsePoly<BigInt> {
        let z = Integers;
        let mut out = SparsePoly::zero(3);
        for (m, c) in self.table.terms() {
            let mut t = c.clone();
            for (i, &e) in m.0[..10].iter().enumerate() {
                t *= num_traits::pow(coeffs[i].clone(), e as usize);
            }
            out.add_term(&z, Monomial(m.0[10..].to_vec()), t);
        }
        out
    }

    /// h mod 2 at a cubic with coefficients in any ring of characteristic 2.
    pub fn specialize<R: Ring>(&self, ring: &R, g: &SparsePoly<R::El>) -> SparsePoly<R::El> {
        let coeffs: Vec<R::El> = CUBIC_MONOMIALS.iter().map(|m| g.coeff(ring, m)).collect();
        let mut out = SparsePoly::zero(3);
        for (a, x) in &self.odd_terms {
            let mut t = ring.one();
            for (i, &e) in a.iter().enumerate() {
                if e > 0 {
                    t = ring.mul(&t, &ring.pow(&coeffs[i], e as u32));
                }
            }
            out.add_term(ring, Monomial(x.to_vec()), t);
        }
        out
    }
}

/// The memoized universal table; panics if the divisibility by 8 fails.
pub fn universal_hessian() -> &'static UniversalHessian {
    static H: OnceLock<UniversalHessian> = OnceLock::new();
    H.get_or_init(|| UniversalHessian::build().expect("universal Hessian"))
}

/// h of a cubic over a ring of characteristic 2 (e.g. a field or GF(2^k)[lambda]).
pub fn char2_hessian<R: Ring>(ring: &R, g: &SparsePoly<R::El>) -> Result<SparsePoly<R::El>> {
    if g.nvars() != 3 || g.terms().any(|(m, _)| m.degree() != 3) {
        return Err(Error::Usage("expected a ternary cubic".into()));
    }
    Ok(universal_hessian().specialize(ring, g))
}

/// Restriction of a ternary form to x3 = 0 as a binary form of degree d.
fn restrict_x3<R: Ring>(ring: &R, p: &SparsePoly<R::El>, d: usize) -> BinaryForm<R::El> {
    let mut b = BinaryForm::zero(ring, d);
    for (m, c) in p.terms() {
        if m.0[2] == 0 {
            b.coeffs[m.0[0] as usize] = ring.add(&b.coeffs[m.0[0] as usize], c);
        }
    }
    b
}

/// R for the cubic g over any ring of characteristic 2 (zero if a restriction vanishes).
pub fn segre_resultant_generic<R: Ring>(ring: &R, g: &SparsePoly<R::El>) -> Result<R::El> {
    let h = char2_hessian(ring, g)?;
    let gb = restrict_x3(ring, g, 3);
    let hb = restrict_x3(ring, &h, 3);
    if gb.is_zero(ring) || hb.is_zero(ring) {
        return Ok(ring.zero());
    }
    resultant(ring, &gb, &hb)
}

/// Formal degree of R as a binary form in the pencil parameter.
pub const R_DEGREE: usize = 18;

/// R in k[lambda] for a pencil.
pub fn segre_resultant(pencil: &ResidualPencil) -> Result<Vec<u32>> {
    let ring = UniPolyRing { field: pencil.field().clone() };
    let r = segre_resultant_generic(&ring, &pencil.g)?;
    if upoly::degree(&r).is_some_and(|d| d > R_DEGREE) {
        return Err(Error::Internal(format!("R has degree {} > 18", upoly::degree(&r).unwrap())));
    }
    Ok(r)
}

/// Multiplicity of R (as a form of degree 18) at a pencil value.
pub fn r_multiplicity(k: &Field, r: &[u32], at: PencilValue) -> Result<usize> {
    let Some(d) = upoly::degree(r) else {
        return Ok(usize::MAX);
    };
    match at {
        PencilValue::Infinity => Ok(R_DEGREE - d),
        PencilValue::Finite { value, degree } => {
            let kf = if degree == k.degree() {
                k.clone()
            } else {
                extension(k, degree / k.degree()).ok_or_else(|| Error::Capability("field too large".into()))?
            };
            let e = Embedding::new(k, &kf)?;
            Ok(upoly::root_multiplicity(&kf, &upoly::embed(&e, r), value))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LineKind {
    First,
    Second,
}

/// Required power of (lambda - lambda0) dividing R for a fiber, 0 if none.
pub fn required_multiplicity(kodaira: Kodaira, ramification_index: u8) -> usize {
    match kodaira {
        Kodaira::I3 | Kodaira::IV => 3,
        Kodaira::I2 | Kodaira::III if ramification_index == 3 => 2,
        _ => 0,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DivisibilityRecord {
    pub lambda: PencilValue,
    pub kodaira: Kodaira,
    pub ramification_index: u8,
    pub required: usize,
    pub multiplicity: usize,
    pub pass: bool,
}

pub fn divisibility_record(
    k: &Field,
    r: &[u32],
    lambda: PencilValue,
    kodaira: Kodaira,
    ramification_index: u8,
) -> Result<DivisibilityRecord> {
    let required = required_multiplicity(kodaira, ramification_index);
    let multiplicity = r_multiplicity(k, r, lambda)?;
    Ok(DivisibilityRecord { lambda, kodaira, ramification_index, required, multiplicity, pass: multiplicity >= required })
}

/// Per-line data: R, kind, ramification, valency and divisibility audits.
#[derive(Clone, Debug, Serialize)]
pub struct LineDossier {
    pub line: Line,
    pub kind: LineKind,
    pub ram_type: Option<RamificationType>,
    pub valency: Option<usize>,
    #[serde(serialize_with = "hex_list")]
    pub r: Vec<u32>,
    pub audits: Vec<DivisibilityRecord>,
    /// 18 minus the excess multiplicity of R over the line-bearing fibers (first kind only)
    pub valency_bound: Option<usize>,
}

fn hex_list<S: serde::Serializer>(v: &[u32], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for c in v {
        seq.serialize_element(&crate::field::to_hex(*c))?;
    }
    seq.end()
}

impl LineDossier {
    pub fn valency_within_bounds(&self) -> bool {
        let Some(v) = self.valency else { return true };
        match (self.kind, self.ram_type) {
            (LineKind::First, _) => v <= 18,
            (LineKind::Second, Some(RamificationType::TwoTwo)) => v <= 20,
            (LineKind::Second, _) => v <= 16,
        }
    }
}

/// Divisibility audit of R over the given fibers.
pub fn divisibility_audit(
    pencil: &ResidualPencil,
    r: &[u32],
    ram: Option<&RamificationData>,
    fibers: &[FiberReport],
) -> Result<(Vec<DivisibilityRecord>, usize)> {
    let k = pencil.field();
    let mut records = Vec::new();
    let mut excess = 0usize;
    if r.is_empty() {
        return Ok((records, 18));
    }
    for f in fibers {
        let e = ram.map_or(1, |d| d.index_above(f.lambda));
        let rec = divisibility_record(k, r, f.lambda, f.kodaira(), e)?;
        let lines = f.kodaira().line_count();
        if lines > 0 {
            excess += rec.multiplicity.saturating_sub(lines);
        }
        if rec.required > 0 {
            records.push(rec);
        }
    }
    Ok((records, R_DEGREE.saturating_sub(excess)))
}

/// Like [`divisibility_audit`], but a failed record is an error.
pub fn checked_divisibility_audit(
    pencil: &ResidualPencil,
    r: &[u32],
    ram: Option<&RamificationData>,
    fibers: &[FiberReport],
) -> Result<(Vec<DivisibilityRecord>, usize)> {
    let (recs, bound) = divisibility_audit(pencil, r, ram, fibers)?;
    if let Some(bad) = recs.iter().find(|r| !r.pass) {
        return Err(Error::Audit(format!(
            "{} fiber needs multiplicity {} but R has {}",
            bad.kodaira.name(),
            bad.required,
            bad.multiplicity
        )));
    }
    Ok((recs, bound))
}

/// Full dossier for a line on a surface (fibers searched over the surface field).
pub fn line_dossier(s: &QuarticSurface, l: &Line, valency: Option<usize>, fiber_ext: u32) -> Result<LineDossier> {
    let pencil = ResidualPencil::new(s, l)?;
    let r = segre_resultant(&pencil)?;
    let ram = pencil.ramification().ok();
    let kind = if r.is_empty() { LineKind::Second } else { LineKind::First };
    let (audits, bound) = if kind == LineKind::First {
        let fibers = pencil.singular_fibers(fiber_ext)?;
        let (a, b) = checked_divisibility_audit(&pencil, &r, ram.as_ref(), &fibers)?;
        (a, Some(b))
    } else {
        (Vec::new(), None)
    };
    Ok(LineDossier { line: *l, kind, ram_type: ram.map(|d| d.kind), valency, r, audits, valency_bound: bound })
}

/// Lines meeting the pencil's line, counted as components of the singular fibers
/// over extensions of relative degree <= max_ext. The flag is false if some fiber
/// could not be classified completely.
pub fn fiber_valency(pencil: &ResidualPencil, max_ext: u32) -> Result<(usize, bool)> {
    let fibers = pencil.singular_fibers(max_ext)?;
    let count = fibers.iter().map(|f| f.kodaira().line_count()).sum();
    Ok((count, fibers.iter().all(|f| f.classification.complete)))
}

/// Which pencil value of a line's pencil is the plane {sum c_i x_i = 0} (which must contain the line).
pub fn locate_plane(pencil: &ResidualPencil, plane: &[u32; 4]) -> Result<PencilValue> {
    let k = pencil.field();
    // a plane form c transforms to c T^-1 in normalized coordinates
    let inv = pencil.transform.inverse(k)?;
    let c: Vec<u32> = (0..4).map(|j| (0..4).fold(0, |acc, i| acc ^ k.mul(plane[i], inv.matrix[i][j]))).collect();
    if c[0] != 0 || c[1] != 0 {
        return Err(Error::Usage("plane does not contain the line".into()));
    }
    // H_lambda is x4 + lambda x3 = 0
    match (c[2], c[3]) {
        (0, 0) => Err(Error::Usage("zero plane".into())),
        (_, 0) => Ok(PencilValue::Infinity),
        (a, b) => Ok(PencilValue::finite(k.div(a, b)?, k.degree())),
    }
}

/// Valency criterion for the axis line of a smooth family member: the valency
/// is 18 iff q4 is coprime to x3 x4, i.e. it has both an x3^4 and an x4^4 term.
pub fn family_z_valency_is_18(q4: &[u32; 5]) -> bool {
    q4[0] != 0 && q4[4] != 0
}

/// A family member given by (q2, q4), coefficients in descending powers of x3.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FamilyZForm {
    pub q2: [u32; 3],
    pub q4: [u32; 5],
    /// field in which the transformation and the coefficients live
    pub degree: u32,
}

/// Try to move (S, l) into the form x3 x1^3 + x4 x2^3 + x1 x2 q2 + q4 with l = {x3 = x4 = 0}.
pub fn match_family_z(s: &QuarticSurface, l: &Line) -> Result<Option<FamilyZForm>> {
    let pencil = ResidualPencil::new(s, l)?;
    let ram = pencil.ramification()?;
    if ram.kind != RamificationType::TwoTwo {
        return Ok(None);
    }
    let k = s.field();
    let top = ram.points.iter().map(|p| p.degree).max().unwrap_or(k.degree());
    let lf = if top == k.degree() {
        k.clone()
    } else {
        extension(k, top / k.degree()).ok_or_else(|| Error::Capability("field too large".into()))?
    };
    let emb = Embedding::new(k, &lf)?;
    let lift = |v: u32, deg: u32| -> Result<u32> {
        if deg == lf.degree() {
            Ok(v)
        } else {
            Ok(Embedding::new(&extension(k, deg / k.degree()).unwrap(), &lf)?.apply(v))
        }
    };
    let f0 = pencil.normalized.poly().map_coeffs(&lf, |&c| emb.apply(c));
    // ramification point with image 0 after the change becomes [0 : 1], the other [1 : 0]
    let (p, q) = (&ram.points[0], &ram.points[1]);
    let lam = |v: PencilValue| -> Result<Option<u32>> {
        match v {
            PencilValue::Infinity => Ok(None),
            PencilValue::Finite { value, degree } => Ok(Some(lift(value, degree)?)),
        }
    };
    let (lp, lq) = (lam(p.image)?, lam(q.image)?);
    // new x4' vanishes on the plane of p, new x3' on the plane of q: rows of the new coordinates
    let plane_row = |l: Option<u32>| -> [u32; 2] {
        match l {
            Some(v) => [v, 1],  // x4 + v x3
            None => [1, 0],     // x3
        }
    };
    let rp = plane_row(lp);
    let rq = plane_row(lq);
    // point coordinates on the line
    let pp = [lift(p.pos[0], p.degree)?, lift(p.pos[1], p.degree)?];
    let qp = [lift(q.pos[0], q.degree)?, lift(q.pos[1], q.degree)?];
    // x1' vanishes at p, x2' at q: for point [u : v], the form v x1 + u x2
    let new_rows: Vec<Vec<u32>> = vec![
        vec![pp[1], pp[0], 0, 0],
        vec![qp[1], qp[0], 0, 0],
        vec![0, 0, rq[0], rq[1]],
        vec![0, 0, rp[0], rp[1]],
    ];
    // y = N x, so f(x) = f(N^-1 y)
    let n = ProjectiveMap::new(&lf, new_rows)?;
    let ninv = n.inverse(&lf)?;
    let mut f1 = pullback(&lf, &f0, &ninv.matrix);
    // scale y3, y4 so that y3 y1^3 and y4 y2^3 have coefficient 1
    let c31 = f1.coeff(&lf, &[3, 0, 1, 0]);
    let c42 = f1.coeff(&lf, &[0, 3, 0, 1]);
    if c31 == 0 || c42 == 0 {
        return Ok(None);
    }
    let scale = diag(&lf, [1, 1, lf.inv(c31)?, lf.inv(c42)?]);
    f1 = pullback(&lf, &f1, &scale);
    // translations y1 + a y3 + b y4, y2 + c y3 + d y4 clear y1^2 and y2^2 terms
    let q11 = [f1.coeff(&lf, &[2, 0, 2, 0]), f1.coeff(&lf, &[2, 0, 1, 1]), f1.coeff(&lf, &[2, 0, 0, 2])];
    let q22 = [f1.coeff(&lf, &[0, 2, 2, 0]), f1.coeff(&lf, &[0, 2, 1, 1]), f1.coeff(&lf, &[0, 2, 0, 2])];
    if q11[2] != 0 || q22[0] != 0 {
        return Ok(None);
    }
    // x3 (x1 + t)^3 contributes x1^2 x3 t, so t = q11[0] x3 + q11[1] x4 cancels
    let t: Vec<Vec<u32>> = vec![
        vec![1, 0, q11[0], q11[1]],
        vec![0, 1, q22[1], q22[2]],
        vec![0, 0, 1, 0],
        vec![0, 0, 0, 1],
    ];
    let f2 = pullback(&lf, &f1, &t);
    let allowed = |m: &Monomial| -> bool {
        let e = &m.0;
        (e[0] == 3 && e[2] == 1) || (e[1] == 3 && e[3] == 1) || (e[0] == 1 && e[1] == 1) || (e[0] == 0 && e[1] == 0)
    };
    if f2.terms().any(|(m, _)| !allowed(m)) {
        return Ok(None);
    }
    let q2 = [f2.coeff(&lf, &[1, 1, 2, 0]), f2.coeff(&lf, &[1, 1, 1, 1]), f2.coeff(&lf, &[1, 1, 0, 2])];
    let q4 = [
        f2.coeff(&lf, &[0, 0, 4, 0]),
        f2.coeff(&lf, &[0, 0, 3, 1]),
        f2.coeff(&lf, &[0, 0, 2, 2]),
        f2.coeff(&lf, &[0, 0, 1, 3]),
        f2.coeff(&lf, &[0, 0, 0, 4]),
    ];
    Ok(Some(FamilyZForm { q2, q4, degree: lf.degree() }))
}

fn diag(_f: &Field, d: [u32; 4]) -> Vec<Vec<u32>> {
    (0..4).map(|i| (0..4).map(|j| if i == j { d[i] } else { 0 }).collect()).collect()
}

/// A family member with a star of three lines {x4 = 0, x1 = z x3} (z^3 = 1) in
/// the plane x4 = 0: requires q2(1,0) = 0 and q4(1,0) = 1. Returns the surface over
/// GF(4)-containing field `f` and the three lines.
pub fn star_instance(f: &Field, q2: [u32; 3], q4: [u32; 5]) -> Result<(QuarticSurface, Vec<Line>)> {
    if q2[0] != 0 || q4[0] != 1 {
        return Err(Error::Usage("need q2(1,0) = 0 and q4(1,0) = 1".into()));
    }
    if !f.degree().is_multiple_of(2) {
        return Err(Error::Usage("cube roots of unity need an even degree field".into()));
    }
    let s = crate::builtins::family_z(f, &q2, &q4)?;
    let lines = f
        .elements()
        .filter(|&z| z != 0 && f.pow(z, 3) == 1)
        .map(|z| Line::from_equations(f, &[0, 0, 0, 1], &[1, 0, z, 0]))
        .collect::<Result<Vec<_>>>()?;
    Ok((s, lines))
}

/// The plane x3 + x4 = 0 holding the coplanar triangle of [`coplanar_instance`].
pub const COPLANAR_PLANE: [u32; 4] = [0, 0, 1, 1];

/// The member on which l2 = {x3 + x4 = 0, x1 + x2 + c x3 = 0}, c = q2(1,1), lies
/// in the fiber at 1 of the axis pencil; solved for the x4^4 coefficient of q4.
pub fn coplanar_instance(f: &Field, q2: [u32; 3], e: [u32; 4]) -> Result<(QuarticSurface, Line, [u32; 5])> {
    let c = q2[0] ^ q2[1] ^ q2[2];
    // q4(1,1) = c^3
    let e4 = f.pow(c, 3) ^ e[0] ^ e[1] ^ e[2] ^ e[3];
    let q4 = [e[0], e[1], e[2], e[3], e4];
    let s = crate::builtins::family_z(f, &q2, &q4)?;
    let l = Line::from_equations(f, &[0, 0, 1, 1], &[1, 1, c, 0])?;
    if !s.contains_line(&l) {
        return Err(Error::Internal("constructed line is not on the surface".into()));
    }
    Ok((s, l, q4))
}

/// [`coplanar_instance`] with q2'(1,1) q2(1,1)^2 + q4'(1,1) = 0 imposed by solving for
/// the x3 x4^3 coefficient.
pub fn degenerate_instance(f: &Field, q2: [u32; 3], e0: u32, e1: u32, e2: u32) -> Result<(QuarticSurface, Line, [u32; 5])> {
    let c = q2[0] ^ q2[1] ^ q2[2];
    // both partials of q2 at (1,1) equal the x3 x4 coefficient; those of q4 equal e1 + e3
    let e3 = f.mul(q2[1], f.square(c)) ^ e1;
    coplanar_instance(f, q2, [e0, e1, e2, e3])
}

/// q2'(1,1) q2(1,1)^2 + q4'(1,1).
pub fn degeneracy_defect(f: &Field, q2: &[u32; 3], q4: &[u32; 5]) -> u32 {
    let c = q2[0] ^ q2[1] ^ q2[2];
    f.mul(q2[1], f.square(c)) ^ q4[1] ^ q4[3]
}
