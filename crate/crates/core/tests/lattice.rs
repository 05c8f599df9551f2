//! Lattice invariants against independent integer computations.

use num_bigint::BigInt;
use proptest::prelude::*;
use quartic_lines::lattice::GramLattice;

fn det(m: &[Vec<i128>]) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    (0..n)
        .map(|j| {
            let minor: Vec<Vec<i128>> = m[1..].iter().map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect()).collect();
            let s = if j % 2 == 0 { 1 } else { -1 };
            s * m[0][j] * det(&minor)
        })
        .sum()
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 { a.abs() } else { gcd(b, a % b) }
}

/// gcd of the maximal minors of the generator matrix: the index of the span in Z^r.
fn span_index(v: &[Vec<i64>], r: usize) -> i128 {
    let n = v.len();
    let mut g = 0;
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != r {
            continue;
        }
        let rows: Vec<Vec<i128>> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| v[i].iter().map(|&x| x as i128).collect()).collect();
        g = gcd(g, det(&rows));
    }
    g
}

fn gram(v: &[Vec<i64>], form: &[i64]) -> Vec<Vec<i64>> {
    v.iter().map(|a| v.iter().map(|b| (0..form.len()).map(|k| a[k] * form[k] * b[k]).sum()).collect()).collect()
}

prop_compose! {
    fn generators()(r in 1usize..4, extra in 0usize..3)
        (v in proptest::collection::vec(proptest::collection::vec(-3i64..4, r), r + extra),
         form in proptest::collection::vec(prop_oneof![Just(-2i64), Just(-1), Just(1), Just(2)], r))
        -> (Vec<Vec<i64>>, Vec<i64>) { (v, form) }
}

proptest! {
    #[test]
    fn discriminant_matches_minor_gcd((v, form) in generators()) {
        let r = form.len();
        let index = span_index(&v, r);
        let lat = GramLattice::new(gram(&v, &form)).unwrap();
        if index == 0 {
            prop_assert!(lat.rank() < r);
        } else {
            prop_assert_eq!(lat.rank(), r);
            let expected = form.iter().map(|&x| x as i128).product::<i128>() * index * index;
            prop_assert_eq!(lat.span_discriminant().unwrap(), BigInt::from(expected));
        }
    }

    #[test]
    fn invariants_do_not_depend_on_the_chosen_basis((v, form) in generators(), seed in any::<u64>()) {
        let lat = GramLattice::new(gram(&v, &form)).unwrap();
        let inv = lat.invariants().unwrap();
        // any other nonsingular choice of generators gives the same invariants
        let n = v.len();
        let r = lat.rank();
        let mut order: Vec<usize> = (0..n).collect();
        let mut s = seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            order.swap(i, (s >> 33) as usize % (i + 1));
        }
        let permuted: Vec<Vec<i64>> = order.iter().map(|&i| v[i].clone()).collect();
        let other = GramLattice::new(gram(&permuted, &form)).unwrap();
        let alt = other.invariants().unwrap();
        prop_assert_eq!(alt.rank, r);
        prop_assert_eq!(alt.discriminant, inv.discriminant.clone());
    }

    #[test]
    fn spanned_generators_leave_invariants_unchanged((v, form) in generators(), c in -2i64..3, d in -2i64..3) {
        let lat = GramLattice::new(gram(&v, &form)).unwrap();
        let mut w = v.clone();
        let r = form.len();
        let last = v.len() - 1;
        w.push((0..r).map(|k| c * v[0][k] + d * v[last][k]).collect());
        let bigger = GramLattice::new(gram(&w, &form)).unwrap();
        prop_assert_eq!(bigger.rank(), lat.rank());
        prop_assert_eq!(bigger.span_discriminant().unwrap(), lat.span_discriminant().unwrap());
    }
}

#[test]
fn unimodular_change_of_generators() {
    // a -2 curve configuration of type A3 in two generator sets related by shears
    let v = vec![vec![1, -1, 0, 0], vec![0, 1, -1, 0], vec![0, 0, 1, -1]];
    let form = [1, 1, 1, 1];
    let sheared = vec![v[0].clone(), (0..4).map(|k| v[1][k] + 3 * v[0][k]).collect(), (0..4).map(|k| v[2][k] - v[1][k]).collect()];
    let a = GramLattice::new(gram(&v, &form)).unwrap().invariants().unwrap();
    let b = GramLattice::new(gram(&sheared, &form)).unwrap().invariants().unwrap();
    assert_eq!(a.discriminant, BigInt::from(4));
    assert_eq!(a.discriminant, b.discriminant);
    assert_eq!(a.rank, 3);
}
