//! One test per acceptance criterion; each prints a PASS or FAIL line.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use quartic_lines::builtins;
use quartic_lines::census::{census, CensusOptions};
use quartic_lines::field::Embedding;
use quartic_lines::geometry::{candidate_line_count, enumerate_lines, singular_point_search, IntersectionGraph};
use quartic_lines::lattice::GramLattice;
use quartic_lines::pencil::{classify_fiber, Component, Kodaira, ResidualPencil};
use quartic_lines::poly::{squarefree_test, SparsePoly};
use quartic_lines::ring::Integers;
use quartic_lines::sample;
use quartic_lines::segre::{
    char2_hessian, checked_divisibility_audit, coplanar_instance, degeneracy_defect, degenerate_instance,
    hessian_numerator, locate_plane, r_multiplicity, segre_resultant, universal_hessian, LineKind, CUBIC_MONOMIALS,
    COPLANAR_PLANE,
};
use quartic_lines::tate::{
    build_integral_model, tate_all_places, tate_classify, Place, SsVerdict, TateType, WeierstrassModel,
};
use quartic_lines::{verify, Field};
use rand::Rng;

/// Written to stderr directly so the line shows even when the test harness captures output.
fn report(n: u32, ok: bool, detail: impl std::fmt::Display) {
    use std::io::Write;
    let line = format!("criterion {n:>2}: {} - {detail}\n", if ok { "PASS" } else { "FAIL" });
    let _ = std::io::stderr().write_all(line.as_bytes());
}

fn single_threaded<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(f)
}

fn s5_graph() -> (IntersectionGraph, Duration) {
    let s = builtins::s5_mu0().unwrap();
    let t = Instant::now();
    let (e, lines) = single_threaded(|| enumerate_lines(&s, 2).unwrap());
    let took = t.elapsed();
    (IntersectionGraph::new(&e, lines).unwrap(), took)
}

#[test]
fn c01_record_surface_has_60_lines() {
    let (g, took) = s5_graph();
    let candidates = candidate_line_count(16);
    let ok = g.len() == 60 && candidates == 70161 && took <= Duration::from_secs(120);
    report(1, ok, format!("{} lines over GF(16) among {candidates} candidates in {took:.2?} on one thread", g.len()));
    assert!(ok);
}

#[test]
fn c02_record_surface_valencies_are_17() {
    let (g, _) = s5_graph();
    let vals = g.valencies();
    let ok = vals.len() == 60 && vals.iter().all(|&v| v == 17);
    report(2, ok, format!("valencies {:?}", vals.iter().collect::<std::collections::BTreeSet<_>>()));
    assert!(ok);
}

#[test]
fn c03_record_surface_lattice() {
    let (g, _) = s5_graph();
    let inv = GramLattice::from_graph(&g).invariants().unwrap();
    let ok = inv.rank == 20 && inv.discriminant == BigInt::from(-55);
    report(3, ok, format!("rank {} discriminant {} index {}", inv.rank, inv.discriminant, inv.index));
    assert!(ok);
}

#[test]
fn c04_family_x_has_68_lines() {
    let r = verify::family_x(12).unwrap();
    let sweep = r.data["sweep"].as_array().unwrap();
    let first68 = sweep.iter().find(|e| e["lines"] == 68).map(|e| e["degree"].as_u64().unwrap());
    let sufficient = r.data["sufficient_degree"].as_u64();
    let ok = r.passed && first68.is_some() && first68 == sufficient;
    let counts: Vec<u64> = sweep.iter().map(|e| e["lines"].as_u64().unwrap()).collect();
    report(4, ok, format!("lambda {}, counts {counts:?}, minimal sufficient degree {sufficient:?}", r.data["lambda"]));
    assert!(ok);
}

/// det Hess(g) - 2 alpha^2 g by cofactor expansion, independent of the library determinant.
fn hessian_oracle(coeffs: &[i64; 10]) -> SparsePoly<BigInt> {
    let z = Integers;
    let g = SparsePoly::from_terms(
        &z,
        3,
        CUBIC_MONOMIALS.iter().zip(coeffs).map(|(m, &c)| (m.to_vec(), BigInt::from(c))),
    );
    let h: Vec<Vec<SparsePoly<BigInt>>> =
        (0..3).map(|i| (0..3).map(|j| g.derivative(&z, i).derivative(&z, j)).collect()).collect();
    let m = |a: &SparsePoly<BigInt>, b: &SparsePoly<BigInt>| a.mul(&z, b);
    let minor = |r1: usize, r2: usize, c1: usize, c2: usize| m(&h[r1][c1], &h[r2][c2]).sub(&z, &m(&h[r1][c2], &h[r2][c1]));
    let det = m(&h[0][0], &minor(1, 2, 1, 2))
        .sub(&z, &m(&h[0][1], &minor(1, 2, 0, 2)))
        .add(&z, &m(&h[0][2], &minor(1, 2, 0, 1)));
    let a2 = BigInt::from(2 * coeffs[4] * coeffs[4]);
    det.sub(&z, &g.scale(&z, &a2))
}

#[test]
fn c05_universal_hessian() {
    let num = hessian_numerator();
    let eight = BigInt::from(8);
    let divisible = num.terms().all(|(_, c)| (c % &eight) == BigInt::from(0));
    let h = universal_hessian();
    let mut rng = sample::rng(5);
    let mut agree = true;
    for _ in 0..30 {
        let c: [i64; 10] = std::array::from_fn(|_| rng.gen_range(-5..=5));
        let oracle = hessian_oracle(&c);
        let z = Integers;
        let scaled = h.specialize_integral(&c.map(BigInt::from)).scale(&z, &eight);
        agree &= scaled == oracle;
    }
    let mut x123 = [0i64; 10];
    x123[4] = 1;
    let triangle_zero = h.specialize_integral(&x123.map(BigInt::from)).is_zero();
    let f2 = Field::standard(1).unwrap();
    let hesse = SparsePoly::from_terms(
        &f2,
        3,
        [(vec![3, 0, 0], 1), (vec![0, 3, 0], 1), (vec![0, 0, 3], 1), (vec![1, 1, 1], 1)],
    );
    let reproduces = char2_hessian(&f2, &hesse).unwrap() == hesse;
    let ok = divisible && agree && triangle_zero && reproduces;
    report(5, ok, format!("{} terms divisible by 8: {divisible}; cofactor oracle agrees: {agree}; h(x1x2x3)=0: {triangle_zero}; Hesse cubic fixed: {reproduces}", num.len()));
    assert!(ok);
}

/// Whether the ternary form p (over the component field) vanishes on the line a . y = 0.
fn vanishes_on_line(kf: &Field, p: &SparsePoly<u32>, a: [u32; 3]) -> bool {
    // two points spanning the line
    let basis: Vec<[u32; 3]> = if a[0] != 0 {
        vec![[a[1], a[0], 0], [a[2], 0, a[0]]]
    } else if a[1] != 0 {
        vec![[1, 0, 0], [0, a[2], a[1]]]
    } else {
        vec![[1, 0, 0], [0, 1, 0]]
    };
    let mut pts = vec![basis[1]];
    for s in kf.elements().take(6) {
        pts.push(std::array::from_fn(|i| basis[0][i] ^ kf.mul(s, basis[1][i])));
    }
    pts.iter().all(|q| p.eval(kf, q) == 0)
}

#[test]
fn c06_hessian_vanishes_on_degenerate_cubics() {
    let f = Field::standard(4).unwrap();
    let mut rng = sample::rng(6);
    let (mut cubics, mut checks, mut failures) = (0, 0, 0);
    while cubics < 500 {
        let g = sample::random_degenerate_cubic(&f, &mut rng);
        let Ok(c) = classify_fiber(&f, &g) else { continue };
        cubics += 1;
        let h = char2_hessian(&f, &g).unwrap();
        let irreducible = c.components.len() == 1 && matches!(c.components[0], Component::Cubic);
        for comp in &c.components {
            if let Component::Line { degree, coeffs } = comp {
                let kf = Field::standard(*degree).unwrap();
                let e = Embedding::new(&f, &kf).unwrap();
                let he = h.map_coeffs(&kf, |&x| e.apply(x));
                checks += 1;
                failures += !vanishes_on_line(&kf, &he, *coeffs) as usize;
            }
        }
        if irreducible {
            for p in &c.singular_points {
                let kf = Field::standard(p.degree).unwrap();
                let e = Embedding::new(&f, &kf).unwrap();
                let he = h.map_coeffs(&kf, |&x| e.apply(x));
                checks += 1;
                failures += (he.eval(&kf, &p.coords) != 0) as usize;
            }
        }
    }
    let ok = failures == 0 && checks >= 500;
    report(6, ok, format!("{cubics} cubics, {checks} component and point checks, {failures} failures"));
    assert!(ok);
}

#[test]
fn c07_divisibility_audits() {
    let s5 = builtins::s5_mu0().unwrap();
    let opts = CensusOptions { ext: 2, singular_ext: 1, lattice: false, ..Default::default() };
    let r = census(&s5, &opts).unwrap();
    let s5_first = r.dossiers.iter().filter(|d| d.dossier.kind == LineKind::First).count();
    let s5_ok = s5_first == 60 && r.dossiers.iter().all(|d| d.dossier.audits.iter().all(|a| a.pass))
        && r.audits.iter().find(|a| a.name == "divisibility").is_some_and(|a| a.passed);
    let f8 = Field::standard(3).unwrap();
    let mut rng = sample::rng(7);
    let (mut lines, mut records, mut failures) = (0, 0, 0);
    for _ in 0..50 {
        let (s, _) = sample::random_smooth_quartic_with_line(&f8, 2, &mut rng).unwrap();
        let (_, ls) = enumerate_lines(&s, 1).unwrap();
        for l in &ls {
            let p = ResidualPencil::new(&s, l).unwrap();
            let rr = segre_resultant(&p).unwrap();
            if rr.is_empty() {
                continue;
            }
            lines += 1;
            let fibers = p.singular_fibers(1).unwrap();
            match checked_divisibility_audit(&p, &rr, p.ramification().ok().as_ref(), &fibers) {
                Ok((recs, _)) => records += recs.len(),
                Err(_) => failures += 1,
            }
        }
    }
    let ok = s5_ok && failures == 0 && lines >= 50;
    report(7, ok, format!("s5: {s5_first} first-kind lines audited; random GF(8): {lines} first-kind lines, {records} fiber records, {failures} failures"));
    assert!(ok);
}

#[test]
fn c08_valency_bounds_on_censused_surfaces() {
    let mut surfaces = vec![
        (builtins::s5_mu0().unwrap(), CensusOptions { ext: 2, singular_ext: 2, ..Default::default() }),
        (builtins::z0().unwrap(), CensusOptions { ext: 2, singular_ext: 2, ..Default::default() }),
    ];
    let f8 = Field::standard(3).unwrap();
    let mut rng = sample::rng(8);
    for _ in 0..20 {
        let (s, _) = sample::random_smooth_quartic_with_line(&f8, 2, &mut rng).unwrap();
        surfaces.push((s, CensusOptions { ext: 1, singular_ext: 2, ..Default::default() }));
    }
    let f16 = Field::standard(4).unwrap();
    for i in 0..10u32 {
        let q2 = [1 + i % 15, (3 * i) % 16, (5 * i + 2) % 16];
        if let Ok((s, _, _)) = coplanar_instance(&f16, q2, [1, i % 16, (7 * i) % 16, 2]) {
            surfaces.push((s, CensusOptions { ext: 1, singular_ext: 1, ..Default::default() }));
        }
    }
    let (mut smooth, mut max_lines, mut violations) = (0, 0, Vec::new());
    for (s, o) in &surfaces {
        let r = census(s, o).unwrap();
        if !r.is_smooth() {
            continue;
        }
        smooth += 1;
        max_lines = max_lines.max(r.graph.lines);
        for a in &r.audits {
            let relevant = ["valency-bounds", "at-most-64", "squarefree-case-valency", "resultant-bound", "divisibility"];
            if relevant.contains(&a.name.as_str()) && !a.passed {
                violations.push(format!("{}: {} {}", r.surface, a.name, a.detail));
            }
        }
    }
    let ok = violations.is_empty() && smooth >= 20;
    report(8, ok, format!("{smooth} smooth censuses, max {max_lines} lines, violations {violations:?}"));
    assert!(ok);
}

#[test]
fn c09_z0_regression() {
    let r = verify::run("z0").unwrap();
    let detail: Vec<String> = r.checks.iter().map(|c| format!("{}={}", c.name, c.passed)).collect();
    report(9, r.passed, detail.join(" "));
    assert!(r.passed);
}

#[test]
fn c10_coplanar_divisibility() {
    let f = Field::standard(4).unwrap();
    let mut rng = sample::rng(10);
    let (mut four, mut six, mut tried) = (0, 0, 0);
    let mut bad = Vec::new();
    while (four < 12 || six < 12) && tried < 4000 {
        tried += 1;
        let q2: [u32; 3] = std::array::from_fn(|_| rng.gen_range(0..16));
        let e: [u32; 4] = std::array::from_fn(|_| rng.gen_range(0..16));
        let degenerate = four >= 12;
        let built = if degenerate { degenerate_instance(&f, q2, e[0], e[1], e[2]) } else { coplanar_instance(&f, q2, e) };
        let Ok((s, l, q4)) = built else { continue };
        if !singular_point_search(&f, s.poly(), 1).unwrap().is_empty() {
            continue;
        }
        let p = ResidualPencil::new(&s, &l).unwrap();
        let r = segre_resultant(&p).unwrap();
        if r.is_empty() {
            continue;
        }
        let v = locate_plane(&p, &COPLANAR_PLANE).unwrap();
        if p.fiber(v).unwrap().kodaira() != Kodaira::I3 {
            continue;
        }
        let mult = r_multiplicity(&f, &r, v).unwrap();
        if degenerate {
            assert_eq!(degeneracy_defect(&f, &q2, &q4), 0);
            six += 1;
            if mult < 6 {
                bad.push(format!("degenerate {q2:?} {q4:?}: {mult}"));
            }
        } else {
            four += 1;
            if mult < 4 {
                bad.push(format!("{q2:?} {q4:?}: {mult}"));
            }
        }
    }
    let ok = four >= 10 && six >= 10 && bad.is_empty();
    report(10, ok, format!("{four} triangle instances with lambda^4 | R, {six} degenerate with lambda^6 | R, failures {bad:?}"));
    assert!(ok);
}

#[test]
fn c11_configuration_table() {
    let r = verify::run("config-table").unwrap();
    let rows: Vec<String> = r.data["rows"].as_array().unwrap().iter().map(|x| format!("{}:{}", x["fibers"], x["lines"])).collect();
    report(11, r.passed, format!("{} rows; checks {:?}", rows.len(), r.checks.iter().map(|c| (&c.name, c.passed)).collect::<Vec<_>>()));
    assert!(r.passed);
}

fn random_model(f: &Field, rng: &mut impl Rng, chi: u32) -> Option<WeierstrassModel> {
    let weights = [1usize, 2, 3, 4, 6];
    let a = weights.map(|w| {
        let d = rng.gen_range(0..=w * chi as usize);
        (0..=d).map(|_| rng.gen_range(0..f.size())).collect::<Vec<u32>>()
    });
    WeierstrassModel::new(f, a, chi).ok()
}

#[test]
fn c12_tate_suite() {
    let f2 = Field::standard(1).unwrap();
    let zero = Place::finite(0, 1);
    let mut lines = Vec::new();
    let mut multiplicative = true;
    for n in 1..=10usize {
        let mut delta = vec![0u32; n + 1];
        delta[n] = 1;
        let m = build_integral_model(&f2, &[1], &[], &delta, 1 + (n as u32 - 1) / 6).unwrap();
        let r = tate_classify(&m, zero).unwrap();
        multiplicative &= r.kodaira == TateType::I(n) && r.ord_delta_min == n;
    }
    lines.push(format!("I_n family: {multiplicative}"));

    // y^2 + t^2 xy = x^3 + 1 at t = 0 should lose a factor t^12 after one scaling
    let good = build_integral_model(&f2, &[0, 1], &[], &[1], 1).unwrap();
    let g = tate_classify(&good, zero).unwrap();
    let good_ok = g.kodaira == TateType::I(0) && g.scalings == 1 && g.ord_delta_min == 0;
    lines.push(format!("(a1=t, Delta=1): {} ord {} scalings {} (expected I0, 0, 1)", g.kodaira.name(), g.ord_delta_min, g.scalings));

    let blocked = build_integral_model(&f2, &[0, 1], &[], &[1, 1], 1).unwrap();
    let b = tate_classify(&blocked, zero).unwrap();
    let blocked_ok = !b.kodaira.is_smooth() && b.ord_delta_min == 12 && b.scalings == 0;
    lines.push(format!("(a1=t, Delta=1+t): {} ord {} scalings {}", b.kodaira.name(), b.ord_delta_min, b.scalings));

    let ex = verify::run("example-6-4").unwrap();
    let ss_ok = ex.passed
        && quartic_lines::tate::ss_place_test(&f2, &[0, 1], &[1, 1], zero, 1).unwrap() == SsVerdict::Contradiction;
    lines.push(format!("square-times-quadratic discriminants: {} instances contradict, Tate cross-check {}", ex.data["instances"], ex.passed));

    let f4 = Field::standard(2).unwrap();
    let mut rng = sample::rng(12);
    let (mut complete, mut divisible) = (0, 0);
    for i in 0..400 {
        let chi = 1 + (i % 2) as u32;
        let Some(m) = random_model(&f4, &mut rng, chi) else { continue };
        let Ok(rep) = tate_all_places(&m) else { continue };
        if rep.complete {
            complete += 1;
            divisible += (rep.total_ord_delta_min % 12 == 0) as usize;
        }
    }
    let catalog_ok = complete >= 100 && divisible == complete;
    lines.push(format!("catalog: {divisible}/{complete} complete models with sum divisible by 12"));

    let ok = multiplicative && good_ok && blocked_ok && ss_ok && catalog_ok;
    report(12, ok, lines.join("; "));
    assert!(ok);
}

#[test]
fn c13_degenerate_quartics() {
    let f2 = Field::standard(1).unwrap();
    let power = squarefree_test(&f2, &builtins::fermat_char2_poly(&f2)).unwrap().power;
    let fermat = verify::run("fermat-degenerate").unwrap().passed && power == 4;
    let schur = builtins::builtin("schur_char2").unwrap();
    let sing = singular_point_search(schur.field(), schur.poly(), 1).unwrap();
    let at = sing.points.iter().any(|p| p.coords == [1, 0, 1, 0]);
    let ok = fermat && at;
    report(13, ok, format!("Fermat is a {power}-th power; Schur singular points over GF(2): {:?}", sing.points.iter().map(|p| p.coords).collect::<Vec<_>>()));
    assert!(ok);
}

#[test]
fn c14_sanity_and_runtime() {
    // independent count: 2-dimensional subspaces of GF(2)^4 as sets of nonzero vectors
    let mut spaces = std::collections::BTreeSet::new();
    for a in 1u8..16 {
        for b in 1u8..16 {
            if a != b {
                let mut s = [a, b, a ^ b];
                s.sort();
                spaces.insert(s);
            }
        }
    }
    let formula = candidate_line_count(2);
    let t = Instant::now();
    let all_pass = verify::TARGETS.iter().all(|id| verify::run(id).unwrap().passed);
    let took = t.elapsed();
    let ok = spaces.len() == 35 && formula == 35 && all_pass && took < Duration::from_secs(600);
    report(14, ok, format!("{} lines in P^3(F2) (cell count {formula}); all verify targets pass: {all_pass} in {took:.2?}", spaces.len()));
    assert!(ok);
}
