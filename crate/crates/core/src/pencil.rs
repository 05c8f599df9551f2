//! The pencil of residual cubics attached to a line, its singular fibers and
//! the ramification of its restriction to the line.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{find_roots, Embedding, Field, MAX_DEGREE};
use crate::geometry::{linalg, normalize_line, normalize_point, pullback, Line, ProjectiveMap, QuarticSurface};
use crate::poly::{upoly, BinaryForm, Monomial, SparsePoly, UniPolyRing};

/// Extension of `k` of relative degree `m`, if within the supported range.
pub fn extension(k: &Field, m: u32) -> Option<Field> {
    let d = k.degree() * m;
    if d > MAX_DEGREE {
        None
    } else if m == 1 {
        Some(k.clone())
    } else {
        Field::standard(d).ok()
    }
}

/// Point of the parameter line, living in GF(2^degree).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PencilValue {
    Finite { value: u32, degree: u32 },
    Infinity,
}

impl PencilValue {
    pub fn finite(value: u32, degree: u32) -> Self {
        PencilValue::Finite { value, degree }
    }
}

impl Serialize for PencilValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("PencilValue", 3)?;
        match self {
            PencilValue::Finite { value, degree } => {
                st.serialize_field("chart", "finite")?;
                st.serialize_field("value", &crate::field::to_hex(*value))?;
                st.serialize_field("ext_degree", degree)?;
            }
            PencilValue::Infinity => {
                st.serialize_field("chart", "infinity")?;
                st.serialize_field("value", "0x1")?;
                st.serialize_field("ext_degree", &1)?;
            }
        }
        st.end()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Kodaira {
    #[serde(rename = "smooth")]
    Smooth,
    I1,
    I2,
    I3,
    II,
    III,
    IV,
}

impl Kodaira {
    /// Number of lines among the components.
    pub fn line_count(self) -> usize {
        match self {
            Kodaira::Smooth | Kodaira::I1 | Kodaira::II => 0,
            Kodaira::I2 | Kodaira::III => 1,
            Kodaira::I3 | Kodaira::IV => 3,
        }
    }
    /// Lower bound for the Euler number; additive fibers II, III carry wild ramification.
    pub fn euler_lower_bound(self) -> u32 {
        match self {
            Kodaira::Smooth => 0,
            Kodaira::I1 => 1,
            Kodaira::I2 => 2,
            Kodaira::I3 => 3,
            Kodaira::II | Kodaira::III | Kodaira::IV => 4,
        }
    }
    pub fn name(self) -> &'static str {
        match self {
            Kodaira::Smooth => "smooth",
            Kodaira::I1 => "I1",
            Kodaira::I2 => "I2",
            Kodaira::I3 => "I3",
            Kodaira::II => "II",
            Kodaira::III => "III",
            Kodaira::IV => "IV",
        }
    }
}

/// Point of a plane, coordinates in GF(2^degree).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PlanePoint {
    pub degree: u32,
    pub coords: [u32; 3],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Component {
    /// A line a1 y1 + a2 y2 + a3 y3 = 0 with coefficients in GF(2^degree).
    Line { degree: u32, coeffs: [u32; 3] },
    Conic,
    Cubic,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CubicClassification {
    pub kodaira: Kodaira,
    pub components: Vec<Component>,
    pub singular_points: Vec<PlanePoint>,
    /// false when the cubic extension of the field could not be searched
    pub complete: bool,
}

fn cross(f: &Field, p: &[u32; 3], q: &[u32; 3]) -> [u32; 3] {
    [
        f.mul(p[1], q[2]) ^ f.mul(p[2], q[1]),
        f.mul(p[2], q[0]) ^ f.mul(p[0], q[2]),
        f.mul(p[0], q[1]) ^ f.mul(p[1], q[0]),
    ]
}

fn norm3(f: &Field, p: &[u32]) -> [u32; 3] {
    let n = normalize_point(f, p);
    [n[0], n[1], n[2]]
}

/// Pull a vector back to the smallest of the given subfields containing it.
fn descend(emb: &[(u32, Embedding)], top_degree: u32, v: &[u32; 3]) -> (u32, [u32; 3]) {
    for (deg, e) in emb {
        let pre: Option<Vec<u32>> = v.iter().map(|&c| e.preimage(c)).collect();
        if let Some(p) = pre {
            return (*deg, [p[0], p[1], p[2]]);
        }
    }
    (top_degree, *v)
}

/// Common projective zeros in L of binary forms; `None` if all vanish identically.
fn binary_common_roots(l: &Field, forms: &[BinaryForm<u32>]) -> Option<Vec<(u32, u32)>> {
    let nonzero: Vec<&BinaryForm<u32>> = forms.iter().filter(|b| !b.is_zero(l)).collect();
    if nonzero.is_empty() {
        return None;
    }
    let mut out = Vec::new();
    if nonzero.iter().all(|b| *b.coeffs.last().unwrap() == 0) {
        out.push((1, 0));
    }
    let mut g = upoly::trim(nonzero[0].coeffs.clone());
    for b in &nonzero[1..] {
        g = upoly::gcd(l, &g, &upoly::trim(b.coeffs.clone()));
    }
    if upoly::degree(&g).is_some_and(|d| d > 0) {
        if let Ok(rs) = find_roots(l, &g) {
            out.extend(rs.into_iter().map(|(r, _)| (r, 1)));
        }
    }
    Some(out)
}

/// Singular points of a plane cubic over L (all partials vanish).
fn singular_points_over(l: &Field, g: &SparsePoly<u32>) -> Result<Vec<[u32; 3]>> {
    let partials: Vec<SparsePoly<u32>> = (0..3).map(|i| g.derivative(l, i)).collect();
    let q = l.size();
    let results: Vec<Result<Vec<[u32; 3]>>> = (0..=q)
        .into_par_iter()
        .map(|idx| {
            let dir = if idx < q { [1, idx, 0] } else { [0, 1, 0] };
            let forms: Vec<BinaryForm<u32>> =
                partials.iter().map(|p| p.restrict_to_line(l, &dir, &[0, 0, 1], 2)).collect();
            let roots = binary_common_roots(l, &forms)
                .ok_or_else(|| Error::Inconsistency("cubic is singular along a line".into()))?;
            Ok(roots
                .into_iter()
                .filter(|&(u, _)| u != 0)
                .map(|(u, v)| norm3(l, &[l.mul(u, dir[0]), l.mul(u, dir[1]), v]))
                .collect())
        })
        .collect();
    let mut pts = Vec::new();
    if partials.iter().all(|p| p.eval(l, &[0, 0, 1]) == 0) {
        pts.push([0, 0, 1]);
    }
    for r in results {
        pts.extend(r?);
    }
    pts.sort();
    pts.dedup();
    Ok(pts)
}

fn map_poly(e: &Embedding, p: &SparsePoly<u32>) -> SparsePoly<u32> {
    p.map_coeffs(e.target(), |&c| e.apply(c))
}

/// Matrix with columns p, e_i, e_j (a completion of p to a basis).
fn basis_through(p: &[u32; 3]) -> Vec<Vec<u32>> {
    let lead = p.iter().position(|&c| c != 0).unwrap();
    let others: Vec<usize> = (0..3).filter(|&i| i != lead).collect();
    (0..3)
        .map(|i| vec![p[i], (i == others[0]) as u32, (i == others[1]) as u32])
        .collect()
}

/// Roots [r2 : r3] of a nonzero binary form over L (no multiplicities).
fn binary_roots(l: &Field, c: &BinaryForm<u32>) -> Vec<(u32, u32)> {
    binary_common_roots(l, std::slice::from_ref(c)).unwrap_or_default()
}

/// Kodaira type of a reduced plane cubic over K.
pub fn classify_fiber(k: &Field, g: &SparsePoly<u32>) -> Result<CubicClassification> {
    if g.nvars() != 3 || g.homogeneous_degree() != Some(3) {
        return Err(Error::Usage("expected a ternary cubic".into()));
    }
    let k2 = extension(k, 2);
    let k3 = extension(k, 3);
    let e2 = k2.as_ref().map(|f| Embedding::new(k, f).unwrap());
    let e3 = k3.as_ref().map(|f| Embedding::new(k, f).unwrap());
    let base_pts = singular_points_over(k, g)?;
    let s2 = match (&k2, &e2) {
        (Some(f), Some(e)) => Some(singular_points_over(f, &map_poly(e, g))?),
        _ => None,
    };
    let n1 = base_pts.len();
    let n2 = s2.as_ref().map_or(n1, |s| s.len());
    // a conjugate triple can only occur when nothing is singular over K_2
    let s3 = if n2 == 0 {
        match (&k3, &e3) {
            (Some(f), Some(e)) => Some(singular_points_over(f, &map_poly(e, g))?),
            _ => None,
        }
    } else {
        None
    };
    let complete = k3.is_some() || n2 > 0;
    let n3 = s3.as_ref().map_or(0, |s| s.len());
    let n = n2 + n3;
    let kd = k.degree();
    let mut singular_points: Vec<PlanePoint> = Vec::new();
    for p in &base_pts {
        singular_points.push(PlanePoint { degree: kd, coords: *p });
    }
    if let (Some(s), Some(e), Some(f)) = (&s2, &e2, &k2) {
        for p in s {
            if p.iter().any(|&c| e.preimage(c).is_none()) {
                singular_points.push(PlanePoint { degree: f.degree(), coords: *p });
            }
        }
    }
    if let (Some(s), Some(f)) = (&s3, &k3) {
        for p in s {
            singular_points.push(PlanePoint { degree: f.degree(), coords: *p });
        }
    }
    // without K_2 available the points over K stand in for those over K_2
    let identity = Embedding::new(k, k)?;
    let level2: (&Field, &Embedding, &Vec<[u32; 3]>) = match (&k2, &e2, &s2) {
        (Some(f), Some(e), Some(s)) => (f, e, s),
        _ => (k, &identity, &base_pts),
    };
    let no_line = |kodaira| Ok(CubicClassification {
        kodaira,
        components: vec![Component::Cubic],
        singular_points: singular_points.clone(),
        complete,
    });
    match n {
        0 => no_line(Kodaira::Smooth),
        1 => {
            let p = base_pts
                .first()
                .copied()
                .ok_or_else(|| Error::Internal("unique singular point is not rational".into()))?;
            let m = basis_through(&p);
            let gp = pullback(k, g, &m);
            if [[3u16, 0, 0], [2, 1, 0], [2, 0, 1]].iter().any(|e| gp.coeff(k, e) != 0) {
                return Err(Error::Internal("local form at singular point".into()));
            }
            let a = gp.coeff(k, &[1, 2, 0]);
            let b = gp.coeff(k, &[1, 1, 1]);
            let c = gp.coeff(k, &[1, 0, 2]);
            if a == 0 && b == 0 && c == 0 {
                // triple point: the cubic is a binary form in y2, y3
                let cform = BinaryForm {
                    coeffs: (0..4).map(|i| gp.coeff(k, &[0, 3 - i as u16, i as u16])).collect(),
                };
                let sq = squarefree_binary(k, &cform);
                if !sq {
                    return Err(Error::Inconsistency("cubic has a multiple line through its triple point".into()));
                }
                let mut comps = Vec::new();
                let fields: Vec<(Field, Embedding)> = [Some(k.clone()), k2.clone(), k3.clone()]
                    .into_iter()
                    .flatten()
                    .map(|f| (f.clone(), Embedding::new(k, &f).unwrap()))
                    .collect();
                let mut seen = 0;
                for (ix, (f, e)) in fields.iter().enumerate() {
                    let cf = BinaryForm { coeffs: cform.coeffs.iter().map(|&x| e.apply(x)).collect() };
                    let roots = binary_roots(f, &cf);
                    let subs: Vec<(u32, Embedding)> = fields[..ix]
                        .iter()
                        .filter(|(s, _)| f.degree() % s.degree() == 0)
                        .map(|(s, _)| (s.degree(), Embedding::new(s, f).unwrap()))
                        .collect();
                    for (r3, r2) in roots {
                        // coefficient index is the power of y3, so the root is [y2 : y3] = [r2 : r3]
                        let me: Vec<Vec<u32>> = m.iter().map(|row| row.iter().map(|&x| e.apply(x)).collect()).collect();
                        let q = linalg::mat_vec(f, &me, &[0, r2, r3]);
                        let pe = [e.apply(p[0]), e.apply(p[1]), e.apply(p[2])];
                        let line = norm3(f, &cross(f, &pe, &[q[0], q[1], q[2]]));
                        let (deg, coeffs) = descend(&subs, f.degree(), &line);
                        if deg == f.degree() {
                            comps.push(Component::Line { degree: deg, coeffs });
                            seen += 1;
                        }
                    }
                    if seen >= 3 {
                        break;
                    }
                }
                return Ok(CubicClassification { kodaira: Kodaira::IV, components: comps, singular_points, complete });
            }
            if b != 0 {
                return no_line(Kodaira::I1);
            }
            let (ra, rc) = (k.sqrt(a), k.sqrt(c));
            let dir = [0, rc, ra];
            let on_line = gp.restrict_to_line(k, &[1, 0, 0], &dir, 3);
            if on_line.is_zero(k) {
                let q = linalg::mat_vec(k, &m, &dir);
                let line = norm3(k, &cross(k, &p, &[q[0], q[1], q[2]]));
                Ok(CubicClassification {
                    kodaira: Kodaira::III,
                    components: vec![Component::Line { degree: kd, coeffs: line }, Component::Conic],
                    singular_points,
                    complete,
                })
            } else {
                no_line(Kodaira::II)
            }
        }
        2 => {
            let (f, e, s) = level2;
            let line = norm3(f, &cross(f, &s[0], &s[1]));
            let (deg, coeffs) = descend(&[(kd, e.clone())], f.degree(), &line);
            Ok(CubicClassification {
                kodaira: Kodaira::I2,
                components: vec![Component::Line { degree: deg, coeffs }, Component::Conic],
                singular_points,
                complete,
            })
        }
        3 => {
            let (f, e, pts) = if n2 == 3 {
                level2
            } else {
                (k3.as_ref().unwrap(), e3.as_ref().unwrap(), s3.as_ref().unwrap())
            };
            let mut comps = Vec::new();
            for (i, j) in [(0, 1), (0, 2), (1, 2)] {
                let line = cross(f, &pts[i], &pts[j]);
                if line == [0, 0, 0] {
                    return Err(Error::Inconsistency("collinear singular points".into()));
                }
                let (deg, coeffs) = descend(&[(kd, e.clone())], f.degree(), &norm3(f, &line));
                comps.push(Component::Line { degree: deg, coeffs });
            }
            Ok(CubicClassification { kodaira: Kodaira::I3, components: comps, singular_points, complete })
        }
        _ => Err(Error::Inconsistency(format!("cubic with {n} singular points is not reduced"))),
    }
}

fn squarefree_binary(k: &Field, c: &BinaryForm<u32>) -> bool {
    !crate::poly::binary_forms_have_common_zero(k, &[c.clone(), c.d_u(k), c.d_v(k)])
}

/// The pencil of residual cubics of a line on a quartic.
#[derive(Clone, Debug)]
pub struct ResidualPencil {
    /// original coordinates to normalized coordinates
    pub transform: ProjectiveMap,
    /// the surface with the line at {x3 = x4 = 0}
    pub normalized: QuarticSurface,
    pub line: Line,
    /// x3 g(lambda) = f'(x1, x2, x3, lambda x3); coefficients are polynomials in lambda
    pub g: SparsePoly<Vec<u32>>,
    /// f'(x1, x2, 0, x4) / x4 in the variables (x1, x2, x4)
    pub g_inf: SparsePoly<u32>,
    /// g restricted to x3 = 0 equals a + lambda b (index = power of x1)
    pub a: BinaryForm<u32>,
    pub b: BinaryForm<u32>,
}

impl ResidualPencil {
    pub fn new(s: &QuarticSurface, l: &Line) -> Result<Self> {
        let (t, sn) = normalize_line(s, l)?;
        Self::from_normalized(t, sn, *l)
    }

    /// For a surface that already contains {x3 = x4 = 0}.
    pub fn from_normalized(transform: ProjectiveMap, normalized: QuarticSurface, line: Line) -> Result<Self> {
        let field = normalized.field().clone();
        let ring = UniPolyRing { field: field.clone() };
        let mut g: SparsePoly<Vec<u32>> = SparsePoly::zero(3);
        let mut g_inf = SparsePoly::zero(3);
        let mut a = BinaryForm::zero(&field, 3);
        let mut b = BinaryForm::zero(&field, 3);
        for (m, &c) in normalized.poly().terms() {
            let [e1, e2, e3, e4] = [m.0[0], m.0[1], m.0[2], m.0[3]];
            if e3 + e4 == 0 {
                return Err(Error::Usage("line is not {x3 = x4 = 0} on the surface".into()));
            }
            let mut lam = vec![0u32; e4 as usize + 1];
            lam[e4 as usize] = c;
            g.add_term(&ring, Monomial(vec![e1, e2, e3 + e4 - 1]), lam);
            if e3 == 0 {
                g_inf.add_term(&field, Monomial(vec![e1, e2, e4 - 1]), c);
            }
            if e3 + e4 == 1 {
                if e4 == 0 {
                    a.coeffs[e1 as usize] ^= c;
                } else {
                    b.coeffs[e1 as usize] ^= c;
                }
            }
        }
        Ok(ResidualPencil { transform, normalized, line, g, g_inf, a, b })
    }

    pub fn field(&self) -> &Field {
        self.normalized.field()
    }

    /// Largest lambda-degree among the coefficients of g.
    pub fn lambda_degree(&self) -> usize {
        self.g.terms().filter_map(|(_, c)| upoly::degree(c)).max().unwrap_or(0)
    }

    /// The cubic C_lambda over the field of lambda (variables y1, y2, y3 of the plane).
    pub fn residual_cubic(&self, lambda: PencilValue) -> Result<(Field, SparsePoly<u32>)> {
        let k = self.field();
        match lambda {
            PencilValue::Infinity => Ok((k.clone(), self.g_inf.clone())),
            PencilValue::Finite { value, degree } => {
                let kf = self.value_field(degree)?;
                if !kf.contains(value) {
                    return Err(Error::Usage("pencil value outside its field".into()));
                }
                let e = Embedding::new(k, &kf)?;
                let mut out = SparsePoly::zero(3);
                for (m, c) in self.g.terms() {
                    let ce: Vec<u32> = c.iter().map(|&x| e.apply(x)).collect();
                    out.add_term(&kf, m.clone(), upoly::eval(&kf, &ce, value));
                }
                Ok((kf, out))
            }
        }
    }

    fn value_field(&self, degree: u32) -> Result<Field> {
        let k = self.field();
        if !degree.is_multiple_of(k.degree()) {
            return Err(Error::Usage("pencil value field does not contain the surface field".into()));
        }
        extension(k, degree / k.degree()).ok_or_else(|| Error::Capability("field too large".into()))
    }

    /// Point of the plane H_lambda in the original coordinates (over the field of lambda).
    pub fn plane_point_to_space(&self, lambda: PencilValue, kf: &Field, y: &[u32; 3]) -> Result<[u32; 4]> {
        let p = match lambda {
            PencilValue::Finite { value, .. } => [y[0], y[1], y[2], kf.mul(value, y[2])],
            PencilValue::Infinity => [y[0], y[1], 0, y[2]],
        };
        let e = Embedding::new(self.field(), kf)?;
        let inv = self.transform.inverse(self.field())?;
        let me: Vec<Vec<u32>> = inv.matrix.iter().map(|r| r.iter().map(|&x| e.apply(x)).collect()).collect();
        let q = linalg::mat_vec(kf, &me, &p);
        Ok([q[0], q[1], q[2], q[3]])
    }

    /// A plane line of C_lambda as a line of P^3 in the original coordinates.
    pub fn component_line(&self, lambda: PencilValue, comp: &Component) -> Result<Option<(Field, Line)>> {
        let Component::Line { degree, coeffs } = comp else { return Ok(None) };
        let lam_deg = match lambda {
            PencilValue::Finite { degree, .. } => degree,
            PencilValue::Infinity => self.field().degree(),
        };
        let d = lcm(*degree, lam_deg);
        let kf = self.value_field(d)?;
        let lift = |bits: u32, from: u32| -> Result<u32> {
            if from == self.field().degree() {
                return Ok(Embedding::new(self.field(), &kf)?.apply(bits));
            }
            Ok(Embedding::new(&Field::standard(from)?, &kf)?.apply(bits))
        };
        let c: Vec<u32> = coeffs.iter().map(|&x| lift(x, *degree)).collect::<Result<_>>()?;
        let lam = match lambda {
            PencilValue::Finite { value, degree } => PencilValue::Finite { value: lift(value, degree)?, degree: d },
            PencilValue::Infinity => PencilValue::Infinity,
        };
        let ns = linalg::nullspace(&kf, &[c], 3);
        let p = self.plane_point_to_space(lam, &kf, &[ns[0][0], ns[0][1], ns[0][2]])?;
        let q = self.plane_point_to_space(lam, &kf, &[ns[1][0], ns[1][1], ns[1][2]])?;
        Ok(Some((kf.clone(), Line::through(&kf, &p, &q)?)))
    }

    /// Classify the fiber over lambda.
    pub fn fiber(&self, lambda: PencilValue) -> Result<FiberReport> {
        let (kf, g) = self.residual_cubic(lambda)?;
        let c = classify_fiber(&kf, &g)?;
        Ok(FiberReport { lambda, classification: c })
    }

    /// Singular fibers over lambda in GF(2^(k m)), m <= max_ext, shallowest field first.
    pub fn singular_fibers(&self, max_ext: u32) -> Result<Vec<FiberReport>> {
        let k = self.field();
        let mut out = Vec::new();
        let mut searched: Vec<u32> = Vec::new();
        for m in 1..=max_ext {
            let Some(kf) = extension(k, m) else { break };
            let subs: Vec<Embedding> = searched
                .iter()
                .filter(|&&d| m % d == 0)
                .map(|&d| Embedding::new(&extension(k, d).unwrap(), &kf).unwrap())
                .collect();
            let mut values: Vec<PencilValue> = kf
                .elements()
                .filter(|&x| subs.iter().all(|s| s.preimage(x).is_none()))
                .map(|x| PencilValue::finite(x, kf.degree()))
                .collect();
            if m == 1 {
                values.push(PencilValue::Infinity);
            }
            let reports: Vec<Result<FiberReport>> = values.par_iter().map(|&v| self.fiber(v)).collect();
            for r in reports {
                let r = r?;
                if r.classification.kodaira != Kodaira::Smooth {
                    out.push(r);
                }
            }
            searched.push(m);
        }
        Ok(out)
    }

    /// pi restricted to the line, [u : v] -> [A : B].
    pub fn ramification(&self) -> Result<RamificationData> {
        ramification_type(self.field(), &self.a, &self.b)
    }
}

fn lcm(a: u32, b: u32) -> u32 {
    a / gcd(a, b) * b
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FiberReport {
    pub lambda: PencilValue,
    #[serde(flatten)]
    pub classification: CubicClassification,
}

impl FiberReport {
    pub fn kodaira(&self) -> Kodaira {
        self.classification.kodaira
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RamificationType {
    #[serde(rename = "(1)")]
    One,
    #[serde(rename = "(1,1)")]
    OneOne,
    #[serde(rename = "(1,2)")]
    OneTwo,
    #[serde(rename = "(2,2)")]
    TwoTwo,
}

impl RamificationType {
    pub fn name(self) -> &'static str {
        match self {
            RamificationType::One => "(1)",
            RamificationType::OneOne => "(1,1)",
            RamificationType::OneTwo => "(1,2)",
            RamificationType::TwoTwo => "(2,2)",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RamificationPoint {
    /// [u : v] on the line (u = x1, v = x2), coordinates in GF(2^degree)
    pub degree: u32,
    pub pos: [u32; 2],
    pub image: PencilValue,
    pub e: u8,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RamificationData {
    pub points: Vec<RamificationPoint>,
    #[serde(rename = "type")]
    pub kind: RamificationType,
}

impl RamificationData {
    /// Ramification index above a pencil value (1 if unramified there).
    pub fn index_above(&self, lambda: PencilValue) -> u8 {
        self.points.iter().find(|p| p.image == lambda).map_or(1, |p| p.e)
    }
}

fn binary_multiplicity(l: &Field, form: &[u32], root: (u32, u32)) -> usize {
    // form coefficients indexed by the power of u; root [u : v]
    let d = form.len() - 1;
    let p = upoly::trim(form.to_vec());
    if root.1 == 0 {
        return d - upoly::degree(&p).unwrap_or(0);
    }
    let r = l.div(root.0, root.1).unwrap();
    upoly::root_multiplicity(l, &p, r)
}

/// Ramification of [u : v] -> [A(u,v) : B(u,v)] for binary cubics over K.
pub fn ramification_type(k: &Field, a: &BinaryForm<u32>, b: &BinaryForm<u32>) -> Result<RamificationData> {
    if a.is_zero(k) || b.is_zero(k) || crate::poly::resultant(k, a, b)? == 0 {
        return Err(Error::Degenerate("A and B share a root; restriction to the line is degenerate".into()));
    }
    // Wronskian A_u B_v + A_v B_u, degree 4
    let w = a.d_u(k).mul(k, &b.d_v(k)).add(k, &a.d_v(k).mul(k, &b.d_u(k)));
    if w.is_zero(k) {
        return Err(Error::Degenerate("inseparable restriction to the line".into()));
    }
    let l = extension(k, 2).unwrap_or_else(|| k.clone());
    let e = Embedding::new(k, &l)?;
    let we: Vec<u32> = w.coeffs.iter().map(|&c| e.apply(c)).collect();
    let ae: Vec<u32> = a.coeffs.iter().map(|&c| e.apply(c)).collect();
    let be: Vec<u32> = b.coeffs.iter().map(|&c| e.apply(c)).collect();
    let wform = BinaryForm { coeffs: we.clone() };
    let roots = binary_roots(&l, &wform);
    let found: usize = roots.iter().map(|&r| binary_multiplicity(&l, &we, r)).sum();
    if found < 4 {
        return Err(Error::Capability("ramification points not defined over the quadratic extension".into()));
    }
    let mut points = Vec::new();
    for (u, v) in roots {
        let av = BinaryForm { coeffs: ae.clone() }.eval(&l, &u, &v);
        let bv = BinaryForm { coeffs: be.clone() }.eval(&l, &u, &v);
        // the fiber through [u : v] is B(p) A + A(p) B
        let fib: Vec<u32> = (0..4).map(|i| l.mul(bv, ae[i]) ^ l.mul(av, be[i])).collect();
        let mult = binary_multiplicity(&l, &fib, (u, v));
        let (pos_deg, pos) = match (e.preimage(u), e.preimage(v)) {
            (Some(x), Some(y)) => (k.degree(), [x, y]),
            _ => (l.degree(), [u, v]),
        };
        let image = if bv == 0 {
            PencilValue::Infinity
        } else {
            let lam = l.div(av, bv).unwrap();
            match e.preimage(lam) {
                Some(x) => PencilValue::finite(x, k.degree()),
                None => PencilValue::finite(lam, l.degree()),
            }
        };
        points.push(RamificationPoint { degree: pos_deg, pos, image, e: mult as u8 });
    }
    let mut es: Vec<u8> = points.iter().map(|p| p.e).collect();
    es.sort();
    let kind = match es.as_slice() {
        [2] => RamificationType::One,
        [2, 2] => RamificationType::OneOne,
        [2, 3] => RamificationType::OneTwo,
        [3, 3] => RamificationType::TwoTwo,
        other => return Err(Error::Inconsistency(format!("ramification indices {other:?}"))),
    };
    Ok(RamificationData { points, kind })
}

#[derive(Clone, Debug, Serialize)]
pub struct FiberAuditEntry {
    pub lambda: PencilValue,
    pub kodaira: Kodaira,
    /// 1 unramified, 2 simple, 3 double
    pub ramification_index: u8,
    pub pass: bool,
    pub reason: String,
}

/// Check how the line meets each singular fiber against the admissible
/// configurations for lines of the second kind.
pub fn second_kind_fiber_audit(
    pencil: &ResidualPencil,
    ram: &RamificationData,
    fibers: &[FiberReport],
) -> Result<Vec<FiberAuditEntry>> {
    let mut out = Vec::new();
    for fib in fibers {
        let kod = fib.kodaira();
        if kod == Kodaira::Smooth {
            continue;
        }
        let e = ram.index_above(fib.lambda);
        let meet = line_meets(pencil, fib.lambda)?;
        let smooth_points = meet.iter().filter(|p| !p.1).count();
        let (pass, reason) = match e {
            1 => match kod {
                _ if meet.len() != 3 => (false, "unramified but fewer than 3 intersection points".to_string()),
                _ if smooth_points != 3 => (false, "unramified fiber met in a singular point".to_string()),
                Kodaira::I1 => (true, "3 smooth points".to_string()),
                // each line component meets the line once, so 3 smooth points are one per component
                Kodaira::I3 | Kodaira::IV => (true, "1 smooth point on each component".to_string()),
                other => (false, format!("unramified {} fiber is not admissible", other.name())),
            },
            2 => match kod {
                Kodaira::II if meet.len() == 2 && smooth_points == 1 => {
                    (true, "1 smooth point and the cusp".to_string())
                }
                Kodaira::II => (false, "simple ramification over II without passing the cusp".to_string()),
                other => (false, format!("simple ramification over {} is not admissible", other.name())),
            },
            _ => match kod {
                Kodaira::I1 | Kodaira::I2 | Kodaira::IV if meet.len() == 1 && smooth_points == 0 => {
                    let what = match kod {
                        Kodaira::I1 => "tangent to the node",
                        Kodaira::I2 => "tangent to one of the nodes",
                        _ => "the triple point",
                    };
                    (true, what.to_string())
                }
                Kodaira::I1 | Kodaira::I2 | Kodaira::IV => {
                    (false, "double ramification point is not a singular point of the fiber".to_string())
                }
                other => (false, format!("double ramification over {} is not admissible", other.name())),
            },
        };
        out.push(FiberAuditEntry { lambda: fib.lambda, kodaira: kod, ramification_index: e, pass, reason });
    }
    Ok(out)
}

/// Distinct intersection points of the line {y3 = 0} with C_lambda, each
/// flagged if it is a singular point of the cubic. Points are searched over
/// the quadratic and cubic extensions of the fiber field.
fn line_meets(pencil: &ResidualPencil, lambda: PencilValue) -> Result<Vec<([u32; 3], bool)>> {
    let (kf, g) = pencil.residual_cubic(lambda)?;
    let e0 = Embedding::new(pencil.field(), &kf)?;
    let mut form = [0u32; 4];
    for i in 0..4 {
        let (a, b) = (e0.apply(pencil.a.coeffs[i]), e0.apply(pencil.b.coeffs[i]));
        form[i] = match lambda {
            PencilValue::Finite { value, .. } => a ^ kf.mul(value, b),
            PencilValue::Infinity => b,
        };
    }
    let mut out = Vec::new();
    for m in [1, 2, 3] {
        let Some(lf) = extension(&kf, m) else { continue };
        let e = Embedding::new(&kf, &lf)?;
        let fe = BinaryForm { coeffs: form.iter().map(|&c| e.apply(c)).collect() };
        let ge = map_poly(&e, &g);
        let partials: Vec<SparsePoly<u32>> = (0..3).map(|i| ge.derivative(&lf, i)).collect();
        let roots = binary_roots(&lf, &fe);
        for (u, v) in roots {
            let rational = e.preimage(u).is_some() && e.preimage(v).is_some();
            if m > 1 && rational {
                continue;
            }
            let p = [u, v, 0];
            let singular = partials.iter().all(|q| q.eval(&lf, &p) == 0);
            out.push((norm3(&lf, &p), singular));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(k: u32) -> Field {
        Field::standard(k).unwrap()
    }

    fn cubic(f: &Field, terms: &[([u16; 3], u32)]) -> SparsePoly<u32> {
        SparsePoly::from_terms(f, 3, terms.iter().map(|(e, c)| (e.to_vec(), *c)))
    }

    #[test]
    fn table_examples() {
        let f = gf(1);
        let kind = |t: &[([u16; 3], u32)]| classify_fiber(&f, &cubic(&f, t)).unwrap().kodaira;
        assert_eq!(kind(&[([1, 1, 1], 1)]), Kodaira::I3);
        assert_eq!(kind(&[([2, 1, 0], 1), ([1, 2, 0], 1)]), Kodaira::IV);
        assert_eq!(kind(&[([0, 2, 1], 1), ([1, 1, 1], 1), ([3, 0, 0], 1)]), Kodaira::I1);
        assert_eq!(kind(&[([0, 2, 1], 1), ([3, 0, 0], 1)]), Kodaira::II);
        assert_eq!(kind(&[([2, 0, 1], 1), ([0, 1, 2], 1)]), Kodaira::III);
        // x1 (x2 x3 + x1^2): line meeting a conic in 2 points
        assert_eq!(kind(&[([1, 1, 1], 1), ([3, 0, 0], 1)]), Kodaira::I2);
        // smooth: x1^3 + x2^3 + x3^3 over GF(2)
        assert_eq!(kind(&[([3, 0, 0], 1), ([0, 3, 0], 1), ([0, 0, 3], 1)]), Kodaira::Smooth);
        assert!(classify_fiber(&f, &cubic(&f, &[([2, 1, 0], 1)])).is_err());
    }

    #[test]
    fn ramification_examples() {
        let f = gf(3);
        // A = t^3 + t^2 s, B = s^3 with t = u, s = v
        let a = BinaryForm { coeffs: vec![0, 0, 1, 1] };
        let b = BinaryForm { coeffs: vec![1, 0, 0, 0] };
        let r = ramification_type(&f, &a, &b).unwrap();
        assert_eq!(r.kind, RamificationType::OneTwo);
        let cube = ramification_type(&f, &BinaryForm { coeffs: vec![0, 0, 0, 1] }, &b).unwrap();
        assert_eq!(cube.kind, RamificationType::TwoTwo);
        assert!(ramification_type(&f, &a, &BinaryForm { coeffs: vec![0, 0, 0, 1] }).is_err());
    }
}
