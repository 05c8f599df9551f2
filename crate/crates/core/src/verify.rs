//! Built-in verification targets with fixed data.

use num_bigint::BigInt;
use num_integer::Integer;
use serde::Serialize;
use serde_json::{json, Value};

use crate::builtins;
use crate::census::{census, line_sweep, AuditOutcome, CensusOptions};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::geometry::{singular_point_search, Line};
use crate::pencil::{Kodaira, PencilValue, RamificationType, ResidualPencil};
use crate::poly::{squarefree_test, upoly, SparsePoly};
use crate::segre::{
    family_z_valency_is_18, fiber_valency, hessian_numerator, match_family_z, segre_resultant, universal_hessian,
};
use crate::tate::{
    build_integral_model, enumerate_fiber_configs, ss_place_test, tate_classify, Preset, SsVerdict,
};

pub const TARGETS: [&str; 8] = [
    "s5-60",
    "family-x",
    "schur-degenerate",
    "fermat-degenerate",
    "z0",
    "hessian-universal",
    "example-6-4",
    "config-table",
];

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub target: String,
    pub passed: bool,
    pub checks: Vec<AuditOutcome>,
    pub data: Value,
}

struct Checks(Vec<AuditOutcome>);

impl Checks {
    fn add(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.0.push(AuditOutcome { name: name.into(), passed, detail: detail.into() });
    }

    fn finish(self, target: &str, data: Value) -> VerifyReport {
        let passed = self.0.iter().all(|c| c.passed);
        VerifyReport { target: target.into(), passed, checks: self.0, data }
    }
}

pub fn run(target: &str) -> Result<VerifyReport> {
    match target {
        "s5-60" => s5_60(),
        "family-x" => family_x(12),
        "schur-degenerate" => schur_degenerate(),
        "fermat-degenerate" => fermat_degenerate(),
        "z0" => z0(),
        "hessian-universal" => hessian_universal(),
        "example-6-4" => square_quadratic(),
        "config-table" => config_table(),
        _ => Err(Error::Usage(format!("unknown verify target {target:?}; expected one of {TARGETS:?}"))),
    }
}

fn s5_60() -> Result<VerifyReport> {
    let s = builtins::s5_mu0()?;
    let opts = CensusOptions { ext: 2, singular_ext: 2, ..CensusOptions::default() };
    let r = census(&s, &opts)?;
    let mut c = Checks(Vec::new());
    c.add("line-count", r.graph.lines == 60 && r.line_field_degree == 4, format!("{} lines over GF(2^{})", r.graph.lines, r.line_field_degree));
    let vals: std::collections::BTreeSet<usize> = r.graph.valencies.iter().copied().collect();
    c.add("valency-17", vals.len() == 1 && vals.contains(&17), format!("valencies {vals:?}"));
    let (rank, disc) = r.lattice.as_ref().map(|l| (l.rank, l.discriminant.clone())).unwrap_or((0, BigInt::from(0)));
    c.add("rank-20", rank == 20, format!("rank {rank}"));
    c.add("discriminant-minus-55", disc == BigInt::from(-55), format!("discriminant {disc}"));
    c.add("smooth", r.is_smooth(), format!("certificate level {}", r.certificate_level));
    for a in &r.audits {
        c.add(&format!("census:{}", a.name), a.passed, a.detail.clone());
    }
    let data = json!({ "lines": r.graph.lines, "rank": rank, "discriminant": disc.to_string(), "sufficient_ext": r.sufficient_ext });
    Ok(c.finish("s5-60", data))
}

/// Family X at its default parameter, sweeping line censuses up to GF(2^(k ext)).
pub fn family_x(ext: u32) -> Result<VerifyReport> {
    let (f, lambda) = builtins::family_x_default()?;
    let s = builtins::family_x(&f, lambda)?;
    let mut c = Checks(Vec::new());
    let sing = singular_point_search(&f, s.poly(), builtins::FAMILY_X_SEARCH_DEPTH)?;
    let has_point = sing.points.iter().any(|p| p.coords == [0, 0, 0, 1]);
    c.add("singular-point", has_point, format!("{} singular points, first {:?}", sing.points.len(), sing.points.first()));
    let crate::census::LineSweep { sweep, sufficient_ext: best, graph, .. } = line_sweep(&s, ext)?;
    let top = sweep.last().map(|e| e.lines).unwrap_or(0);
    c.add("stable-68", top == 68 && graph.len() == 68, format!("{top} lines at the top of the sweep"));
    let data = json!({
        "lambda": crate::field::to_hex(lambda),
        "field_degree": f.degree(),
        "sweep": sweep,
        "sufficient_ext": best,
        "sufficient_degree": best * f.degree(),
    });
    Ok(c.finish("family-x", data))
}

fn schur_degenerate() -> Result<VerifyReport> {
    let s = builtins::builtin("schur_char2")?;
    let sing = singular_point_search(s.field(), s.poly(), 2)?;
    let mut c = Checks(Vec::new());
    let hit = sing.points.iter().any(|p| p.coords == [1, 0, 1, 0]);
    c.add("singular-at-1010", hit, format!("{} singular points", sing.points.len()));
    let data = json!({ "singular_points": sing.points });
    Ok(c.finish("schur-degenerate", data))
}

fn fermat_degenerate() -> Result<VerifyReport> {
    let f = Field::standard(1)?;
    let p = builtins::fermat_char2_poly(&f);
    let v = squarefree_test(&f, &p)?;
    let mut c = Checks(Vec::new());
    c.add("fourth-power", v.power == 4, format!("power {}", v.power));
    let rejected = matches!(builtins::builtin("fermat_char2"), Err(Error::Degenerate(_)));
    c.add("rejected", rejected, "surface constructor refuses the quartic");
    Ok(c.finish("fermat-degenerate", json!({ "power": v.power })))
}

fn z0() -> Result<VerifyReport> {
    let s = builtins::z0()?;
    let mut c = Checks(Vec::new());
    let sing = singular_point_search(s.field(), s.poly(), 6)?;
    c.add("smooth-level-6", sing.is_empty() && sing.certificate_level() >= 6, format!("certificate level {}", sing.certificate_level()));
    let axis = Line::from_equations(s.field(), &[0, 0, 1, 0], &[0, 0, 0, 1])?;
    let pencil = ResidualPencil::new(&s, &axis)?;
    let r = segre_resultant(&pencil)?;
    c.add("second-kind", r.is_empty(), format!("R has {} coefficients", r.len()));
    let ram = pencil.ramification()?;
    c.add("ramification-2-2", ram.kind == RamificationType::TwoTwo, ram.kind.name());
    let form = match_family_z(&s, &axis)?;
    let predicted = form.as_ref().is_some_and(|z| family_z_valency_is_18(&z.q4));
    let (v, complete) = fiber_valency(&pencil, 2)?;
    c.add("valency-18", v == 18 && complete && predicted, format!("{v} lines in fibers, criterion {predicted}"));
    let at0 = pencil.fiber(PencilValue::finite(0, s.field().degree()))?;
    c.add("iv-at-0", at0.kodaira() == Kodaira::IV, at0.kodaira().name());
    let data = json!({ "valency": v, "fiber_at_0": at0, "ramification": ram, "family_z": form.map(|z| json!({"q2": z.q2, "q4": z.q4})) });
    Ok(c.finish("z0", data))
}

fn hessian_universal() -> Result<VerifyReport> {
    let mut c = Checks(Vec::new());
    let num = hessian_numerator();
    let eight = BigInt::from(8);
    let bad = num.terms().filter(|(_, v)| !v.is_multiple_of(&eight)).count();
    c.add("divisible-by-8", bad == 0, format!("{} terms, {bad} not divisible", num.len()));
    let h = universal_hessian();
    let cubic = |terms: &[([u16; 3], i64)]| {
        let mut a: [BigInt; 10] = std::array::from_fn(|_| BigInt::from(0));
        for (m, v) in terms {
            let i = crate::segre::CUBIC_MONOMIALS.iter().position(|x| x == m).unwrap();
            a[i] = BigInt::from(*v);
        }
        a
    };
    let triangle = h.specialize_integral(&cubic(&[([1, 1, 1], 1)]));
    c.add("h-of-x1x2x3", triangle.is_zero(), "");
    let g = cubic(&[([3, 0, 0], 1), ([0, 3, 0], 1), ([0, 0, 3], 1), ([1, 1, 1], 1)]);
    let hg = h.specialize_integral(&g);
    let reduce = |p: &SparsePoly<BigInt>| -> Vec<Vec<u16>> {
        let mut v: Vec<Vec<u16>> = p.terms().filter(|(_, x)| x.is_odd()).map(|(m, _)| m.0.clone()).collect();
        v.sort();
        v
    };
    let mut expected: Vec<Vec<u16>> = vec![vec![3, 0, 0], vec![0, 3, 0], vec![0, 0, 3], vec![1, 1, 1]];
    expected.sort();
    c.add("h-of-hesse-cubic", reduce(&hg) == expected, format!("{} odd terms", reduce(&hg).len()));
    Ok(c.finish("hessian-universal", json!({ "terms": num.len() })))
}

/// (a1, Delta) data with Delta = D5^2 (t^2 + a t + b) with D5 squarefree,
/// a, b != 0 and D5(0) != 0, over the given field.
pub fn square_quadratic_instances(f: &Field, limit: usize) -> Vec<(Vec<u32>, Vec<u32>)> {
    let mut out = Vec::new();
    let q = f.size() as u64;
    let total = q.pow(5);
    for idx in 0..total {
        let mut d5 = vec![0u32; 6];
        let mut x = idx;
        for c in d5.iter_mut().take(5) {
            *c = (x % q) as u32;
            x /= q;
        }
        d5[5] = 1;
        if d5[0] == 0 {
            continue;
        }
        let gcd = upoly::gcd(f, &d5, &upoly::derivative(&d5));
        if upoly::degree(&gcd) != Some(0) {
            continue;
        }
        for a in 1..f.size() {
            for b in 1..f.size() {
                let delta = upoly::mul(f, &upoly::mul(f, &d5, &d5), &[b, a, 1]);
                out.push((vec![0, 1], delta));
                if out.len() >= limit {
                    return out;
                }
            }
        }
    }
    out
}

fn square_quadratic() -> Result<VerifyReport> {
    let mut c = Checks(Vec::new());
    let mut count = 0;
    let mut contradictions = 0;
    let mut cross = 0;
    for deg in [1u32, 2] {
        let f = Field::standard(deg)?;
        for (a1, delta) in square_quadratic_instances(&f, 40) {
            count += 1;
            let z = PencilValue::finite(0, f.degree());
            if ss_place_test(&f, &a1, &delta, z, 1)? == SsVerdict::Contradiction {
                contradictions += 1;
            }
            let m = build_integral_model(&f, &a1, &[], &delta, 1)?;
            if !tate_classify(&m, z)?.kodaira.is_smooth() {
                cross += 1;
            }
        }
    }
    c.add("contradiction", count > 0 && contradictions == count, format!("{contradictions}/{count} instances"));
    c.add("tate-non-smooth", cross == count, format!("{cross}/{count} non-smooth minimal fibers at 0"));
    Ok(c.finish("example-6-4", json!({ "instances": count })))
}

fn config_table() -> Result<VerifyReport> {
    let mut c = Checks(Vec::new());
    let rows = enumerate_fiber_configs(&Preset::psi_square_case(), 21)?;
    let labels: Vec<String> = rows.iter().map(|r| r.label()).collect();
    let lines: Vec<u32> = rows.iter().map(|r| r.lines).collect();
    let expected = ["6I4", "5I4+2I2", "5I4+I3+I1", "5I4+IV", "5I4+I2+2I1", "5I4+III", "4I4+2I3+I2"];
    c.add("seven-rows", labels == expected, labels.join(", "));
    c.add("line-totals", lines == [24, 22, 22, 22, 21, 21, 21], format!("{lines:?}"));
    let empty = enumerate_fiber_configs(&Preset::psi_square_case(), 25)?.is_empty();
    c.add("empty-at-25", empty, "");
    Ok(c.finish("config-table", json!({ "rows": rows })))
}
