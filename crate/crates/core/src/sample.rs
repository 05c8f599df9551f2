//! Seeded random surfaces and cubics for property checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::field::Field;
use crate::geometry::{pullback, singular_point_search, Line, ProjectiveMap, QuarticSurface};
use crate::poly::{Monomial, SparsePoly};

pub const DEFAULT_SEED: u64 = 0x5eed;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn element<R: Rng>(f: &Field, rng: &mut R) -> u32 {
    rng.gen_range(0..f.size())
}

/// All exponent vectors of degree d in n variables, in lexicographic order.
pub fn monomials(n: usize, d: u16) -> Vec<Vec<u16>> {
    if n == 1 {
        return vec![vec![d]];
    }
    let mut out = Vec::new();
    for e in (0..=d).rev() {
        for mut rest in monomials(n - 1, d - e) {
            rest.insert(0, e);
            out.push(rest);
        }
    }
    out
}

pub fn random_form<R: Rng>(f: &Field, n: usize, d: u16, rng: &mut R) -> SparsePoly<u32> {
    SparsePoly::from_terms(f, n, monomials(n, d).into_iter().map(|e| (e, element(f, rng))))
}

pub fn random_matrix<R: Rng>(f: &Field, n: usize, rng: &mut R) -> Vec<Vec<u32>> {
    loop {
        let m: Vec<Vec<u32>> = (0..n).map(|_| (0..n).map(|_| element(f, rng)).collect()).collect();
        if crate::geometry::linalg::rank(f, &m) == n {
            return m;
        }
    }
}

/// x1 A + x2 B in a random frame, with the image of the line x1 = x2 = 0.
pub fn random_quartic_with_line<R: Rng>(f: &Field, rng: &mut R) -> Result<(SparsePoly<u32>, Line)> {
    let a = random_form(f, 4, 3, rng);
    let b = random_form(f, 4, 3, rng);
    let x = |i| SparsePoly::var(f, 4, i);
    let p = x(0).mul(f, &a).add(f, &x(1).mul(f, &b));
    let m = ProjectiveMap::new(f, random_matrix(f, 4, rng))?;
    // points x of the new surface satisfy p(M x) = 0, so the line is M^-1 {x1 = x2 = 0}
    let q = pullback(f, &p, &m.matrix);
    let inv = m.inverse(f)?;
    let axis = Line::from_equations(f, &[1, 0, 0, 0], &[0, 1, 0, 0])?;
    Ok((q, axis.map(f, &inv)))
}

/// A random quartic with a line with no singular point over GF(q^m), m <= depth.
pub fn random_smooth_quartic_with_line<R: Rng>(
    f: &Field,
    depth: u32,
    rng: &mut R,
) -> Result<(QuarticSurface, Line)> {
    loop {
        let (p, l) = random_quartic_with_line(f, rng)?;
        if singular_point_search(f, &p, depth)?.is_empty() {
            if let Ok(s) = QuarticSurface::new(f.clone(), p, "random") {
                return Ok((s, l));
            }
        }
    }
}

/// A random ternary cubic of one of the shapes line times conic, three lines,
/// or an irreducible cubic singular at a random point.
pub fn random_degenerate_cubic<R: Rng>(f: &Field, rng: &mut R) -> SparsePoly<u32> {
    let lin = |rng: &mut R| loop {
        let p = random_form(f, 3, 1, rng);
        if !p.is_zero() {
            return p;
        }
    };
    let g = match rng.gen_range(0..3) {
        0 => lin(rng).mul(f, &random_form(f, 3, 2, rng)),
        1 => lin(rng).mul(f, &lin(rng)).mul(f, &lin(rng)),
        _ => {
            // y1 q(y2, y3) + c(y2, y3) is singular at [1:0:0]
            let x = |i| SparsePoly::var(f, 3, i);
            let q = random_form(f, 2, 2, rng);
            let c = random_form(f, 2, 3, rng);
            let lift = |p: &SparsePoly<u32>| {
                SparsePoly::from_terms(f, 3, p.terms().map(|(Monomial(e), &v)| (vec![0, e[0], e[1]], v)))
            };
            x(0).mul(f, &lift(&q)).add(f, &lift(&c))
        }
    };
    let m = random_matrix(f, 3, rng);
    pullback(f, &g, &m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_counts() {
        assert_eq!(monomials(3, 3).len(), 10);
        assert_eq!(monomials(4, 4).len(), 35);
    }

    #[test]
    fn quartic_contains_its_line() {
        let f = Field::standard(3).unwrap();
        let mut r = rng(1);
        for _ in 0..5 {
            let (p, l) = random_quartic_with_line(&f, &mut r).unwrap();
            let c = crate::geometry::CompiledQuartic::new(&p);
            for (u, v) in [(1, 0), (0, 1), (1, 1), (3, 5)] {
                assert_eq!(c.eval(&f, &l.point(&f, u, v)), 0);
            }
        }
    }
}
