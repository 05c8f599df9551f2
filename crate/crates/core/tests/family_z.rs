//! Lines of the second kind with two double ramification points.

use quartic_lines::builtins::family_z;
use quartic_lines::geometry::{singular_point_search, Line, ProjectiveMap};
use quartic_lines::pencil::{RamificationType, ResidualPencil};
use quartic_lines::sample::{random_matrix, rng};
use quartic_lines::segre::{family_z_valency_is_18, fiber_valency, match_family_z, segre_resultant};
use quartic_lines::Field;
use rand::Rng;

fn axis(f: &Field) -> Line {
    Line::from_equations(f, &[0, 0, 1, 0], &[0, 0, 0, 1]).unwrap()
}

fn image(f: &Field, t: &ProjectiveMap, l: &Line) -> Line {
    Line::through(f, &t.apply(f, &l.rows[0]), &t.apply(f, &l.rows[1])).unwrap()
}

/// Smooth members over GF(4) with random coefficients.
fn smooth_members(count: usize, seed: u64) -> Vec<([u32; 3], [u32; 5])> {
    let f = Field::standard(2).unwrap();
    let mut r = rng(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let q2: [u32; 3] = std::array::from_fn(|_| r.gen_range(0..4));
        let q4: [u32; 5] = std::array::from_fn(|_| r.gen_range(0..4));
        let Ok(s) = family_z(&f, &q2, &q4) else { continue };
        if singular_point_search(&f, s.poly(), 3).unwrap().is_empty() {
            out.push((q2, q4));
        }
    }
    out
}

#[test]
fn axis_is_of_the_second_kind_with_two_double_points() {
    let f = Field::standard(2).unwrap();
    for (q2, q4) in smooth_members(6, 1) {
        let s = family_z(&f, &q2, &q4).unwrap();
        let p = ResidualPencil::new(&s, &axis(&f)).unwrap();
        assert!(segre_resultant(&p).unwrap().is_empty(), "q2 {q2:?} q4 {q4:?}");
        assert_eq!(p.ramification().unwrap().kind, RamificationType::TwoTwo);
    }
}

#[test]
fn normal_form_is_recovered_after_a_coordinate_change() {
    let f = Field::standard(2).unwrap();
    let mut r = rng(2);
    for (q2, q4) in smooth_members(6, 3) {
        let s = family_z(&f, &q2, &q4).unwrap();
        let t = loop {
            if let Ok(t) = ProjectiveMap::new(&f, random_matrix(&f, 4, &mut r)) {
                break t;
            }
        };
        let moved = s.transform(&t).unwrap();
        let l = image(&f, &t, &axis(&f));
        let form = match_family_z(&moved, &l).unwrap().expect("normal form exists");
        assert_eq!(family_z_valency_is_18(&form.q4), family_z_valency_is_18(&q4), "q2 {q2:?} q4 {q4:?} -> {form:?}");
    }
}

#[test]
fn criterion_agrees_with_fiber_line_counts() {
    let f = Field::standard(2).unwrap();
    for (q2, q4) in smooth_members(10, 5) {
        let s = family_z(&f, &q2, &q4).unwrap();
        let p = ResidualPencil::new(&s, &axis(&f)).unwrap();
        let (v, complete) = fiber_valency(&p, 2).unwrap();
        // every singular fiber was found once the Euler numbers account for 24
        let euler: u32 = p.singular_fibers(2).unwrap().iter().map(|x| x.kodaira().euler_lower_bound()).sum();
        let predicted = family_z_valency_is_18(&q4);
        assert!(v <= 18, "q2 {q2:?} q4 {q4:?}: {v} lines");
        if !predicted {
            assert!(v < 18, "q2 {q2:?} q4 {q4:?}: {v} lines");
        }
        if complete && euler >= 24 {
            assert_eq!(v == 18, predicted, "q2 {q2:?} q4 {q4:?}: {v} lines");
        }
    }
    // a member whose singular fibers are all found over GF(16)
    let s = quartic_lines::builtins::z0().unwrap();
    let p = ResidualPencil::new(&s, &axis(&f)).unwrap();
    assert_eq!(fiber_valency(&p, 2).unwrap(), (18, true));
}

#[test]
fn other_lines_do_not_match() {
    let f16 = Field::standard(4).unwrap();
    let s = quartic_lines::builtins::s5_mu0().unwrap().base_change(&f16).unwrap();
    let l = quartic_lines::builtins::s5_line();
    assert!(match_family_z(&s, &l).unwrap().is_none());
}
