//! Built-in surfaces.
//!
//! Identifiers: `s5_mu0`, `family_x[:<hex lambda>][@k]`, `schur_char2`,
//! `fermat_char2`, `family_z:<q2>:<q4>[@k]` where q2 and q4 are comma separated
//! hex coefficient lists in descending powers of x3 (q2 = c0 x3^2 + c1 x3 x4 + c2 x4^2).

use crate::error::{Error, Result};
use crate::field::{from_hex, Embedding, Field};
use crate::geometry::{singular_point_search, Line, ProjectiveMap, QuarticSurface};
use crate::poly::SparsePoly;

fn poly(f: &Field, terms: &[([u16; 4], u32)]) -> SparsePoly<u32> {
    SparsePoly::from_terms(f, 4, terms.iter().map(|(e, c)| (e.to_vec(), *c)))
}

/// Elementary symmetric polynomial of degree d in five variables, with
/// x5 = x1 + x2 + x3 + x4 substituted.
fn elementary_symmetric(f: &Field, d: usize) -> SparsePoly<u32> {
    let x: Vec<SparsePoly<u32>> = (0..4).map(|i| SparsePoly::var(f, 4, i)).collect();
    let x5 = x.iter().fold(SparsePoly::zero(4), |a, b| a.add(f, b));
    let vars: Vec<SparsePoly<u32>> = x.into_iter().chain(std::iter::once(x5)).collect();
    let mut out = SparsePoly::zero(4);
    for mask in 0u32..32 {
        if mask.count_ones() as usize != d {
            continue;
        }
        let mut t = SparsePoly::constant(f, 4, 1);
        for (i, v) in vars.iter().enumerate() {
            if mask >> i & 1 == 1 {
                t = t.mul(f, v);
            }
        }
        out = out.add(f, &t);
    }
    out
}

/// The primitive fifth root of unity used for the symmetric surface, in GF(16).
pub fn s5_alpha() -> u32 {
    let f16 = Field::standard(4).unwrap();
    f16.elements().find(|&a| f16.eval_poly(&[1, 1, 1, 1, 1], a) == 0).unwrap()
}

/// mu0 = 1 + alpha^2 + alpha^3 in GF(16).
pub fn s5_mu0_in_gf16() -> u32 {
    let f16 = Field::standard(4).unwrap();
    let a = s5_alpha();
    1 ^ f16.pow(a, 2) ^ f16.pow(a, 3)
}

/// The symmetric quartic {s1 = s4 + mu0 s2^2 = 0} over GF(4).
pub fn s5_mu0() -> Result<QuarticSurface> {
    let f4 = Field::standard(2)?;
    let f16 = Field::standard(4)?;
    let emb = Embedding::new(&f4, &f16)?;
    let mu = emb
        .preimage(s5_mu0_in_gf16())
        .ok_or_else(|| Error::Internal("mu0 is not a cube root of unity".into()))?;
    let s2 = elementary_symmetric(&f4, 2);
    let s4 = elementary_symmetric(&f4, 4);
    let f = s4.add(&f4, &s2.mul(&f4, &s2).scale(&f4, &mu));
    QuarticSurface::new(f4, f, "s5_mu0")
}

/// The line {x3 = x2 + (a^3+a+1) x1, x4 = (a^3+a^2+a+1) x2 + a x1} over GF(16).
pub fn s5_line() -> Line {
    let f16 = Field::standard(4).unwrap();
    let a = s5_alpha();
    let c1 = f16.pow(a, 3) ^ a ^ 1;
    let c2 = f16.pow(a, 3) ^ f16.pow(a, 2) ^ a ^ 1;
    Line::through(&f16, &[1, 0, c1, a], &[0, 1, 1, c2]).unwrap()
}

/// The five transpositions (i 5) and (i i+1) generating S5, acting on x1..x4
/// with x5 = x1 + x2 + x3 + x4.
pub fn s5_generators() -> Vec<ProjectiveMap> {
    let id = |i: usize, j: usize| (i == j) as u32;
    let mut gens = Vec::new();
    for (a, b) in [(0, 1), (1, 2), (2, 3)] {
        let m = (0..4)
            .map(|i| {
                let src = if i == a { b } else if i == b { a } else { i };
                (0..4).map(|j| id(src, j)).collect()
            })
            .collect();
        gens.push(ProjectiveMap { matrix: m });
    }
    // (4 5): x4 becomes x1 + x2 + x3 + x4
    let m = (0..4).map(|i| (0..4).map(|j| if i == 3 { 1 } else { id(i, j) }).collect()).collect();
    gens.push(ProjectiveMap { matrix: m });
    gens
}

/// (x1^3 + x2^3) x3 + lambda x2^3 x4 + x1 x2 x4^2 + x3^4.
pub fn family_x_poly(f: &Field, lambda: u32) -> SparsePoly<u32> {
    poly(f, &[([3, 0, 1, 0], 1), ([0, 3, 1, 0], 1), ([0, 3, 0, 1], lambda), ([1, 1, 0, 2], 1), ([0, 0, 4, 0], 1)])
}

pub fn family_x(f: &Field, lambda: u32) -> Result<QuarticSurface> {
    if !f.contains(lambda) {
        return Err(Error::Usage("lambda outside the field".into()));
    }
    QuarticSurface::new(f.clone(), family_x_poly(f, lambda), format!("family_x:{lambda:#x}"))
}

/// Search depth used to pick the default member of family X.
pub const FAMILY_X_SEARCH_DEPTH: u32 = 4;

/// Smallest lambda (over the smallest base field that has one) whose only
/// singular point up to degree 4 is [0:0:0:1].
pub fn family_x_default() -> Result<(Field, u32)> {
    for k in 1..=4 {
        let f = Field::standard(k)?;
        for lambda in f.elements() {
            let p = family_x_poly(&f, lambda);
            let s = singular_point_search(&f, &p, FAMILY_X_SEARCH_DEPTH)?;
            if !s.truncated && s.points.len() == 1 && s.points[0].coords == [0, 0, 0, 1] {
                return Ok((f, lambda));
            }
        }
    }
    Err(Error::Internal("no admissible family X parameter found".into()))
}

/// Reduction of the Schur quartic: x1^4 + x1 x2^3 + x3^4 + x3 x4^3.
pub fn schur_char2_poly(f: &Field) -> SparsePoly<u32> {
    poly(f, &[([4, 0, 0, 0], 1), ([1, 3, 0, 0], 1), ([0, 0, 4, 0], 1), ([0, 0, 1, 3], 1)])
}

/// Reduction of the Fermat quartic: (x1 + x2 + x3 + x4)^4.
pub fn fermat_char2_poly(f: &Field) -> SparsePoly<u32> {
    poly(f, &[([4, 0, 0, 0], 1), ([0, 4, 0, 0], 1), ([0, 0, 4, 0], 1), ([0, 0, 0, 4], 1)])
}

/// x3 x1^3 + x4 x2^3 + x1 x2 q2(x3, x4) + q4(x3, x4); coefficients in
/// descending powers of x3.
pub fn family_z_poly(f: &Field, q2: &[u32; 3], q4: &[u32; 5]) -> SparsePoly<u32> {
    let mut terms = vec![([3, 0, 1, 0], 1), ([0, 3, 0, 1], 1)];
    for (i, &c) in q2.iter().enumerate() {
        terms.push(([1, 1, 2 - i as u16, i as u16], c));
    }
    for (i, &c) in q4.iter().enumerate() {
        terms.push(([0, 0, 4 - i as u16, i as u16], c));
    }
    poly(f, &terms)
}

pub fn family_z(f: &Field, q2: &[u32; 3], q4: &[u32; 5]) -> Result<QuarticSurface> {
    let label = format!(
        "family_z:{}:{}",
        q2.iter().map(|c| format!("{c:#x}")).collect::<Vec<_>>().join(","),
        q4.iter().map(|c| format!("{c:#x}")).collect::<Vec<_>>().join(",")
    );
    QuarticSurface::new(f.clone(), family_z_poly(f, q2, q4), label)
}

/// The member with q2 = 0 and q4 = x3^4 + x3^3 x4 + x4^4 over GF(4).
pub fn z0() -> Result<QuarticSurface> {
    family_z(&Field::standard(2)?, &[0, 0, 0], &[1, 1, 0, 0, 1])
}

fn parse_list<const N: usize>(s: &str) -> Result<[u32; N]> {
    let v: Vec<u32> = s.split(',').map(from_hex).collect::<Result<_>>()?;
    v.try_into().map_err(|_| Error::Parse(format!("expected {N} coefficients in {s:?}")))
}

/// Resolve a builtin identifier.
pub fn builtin(id: &str) -> Result<QuarticSurface> {
    let (body, degree) = match id.split_once('@') {
        Some((b, k)) => (b, Some(k.parse::<u32>().map_err(|_| Error::Parse(format!("bad degree in {id:?}")))?)),
        None => (id, None),
    };
    let field = |default: u32| Field::standard(degree.unwrap_or(default));
    let parts: Vec<&str> = body.split(':').collect();
    match parts.as_slice() {
        ["s5_mu0"] => s5_mu0(),
        ["z0"] => z0(),
        ["schur_char2"] => {
            let f = field(1)?;
            QuarticSurface::new(f.clone(), schur_char2_poly(&f), "schur_char2")
        }
        ["fermat_char2"] => {
            let f = field(1)?;
            QuarticSurface::new(f.clone(), fermat_char2_poly(&f), "fermat_char2")
        }
        ["family_x"] => {
            let (f, lambda) = family_x_default()?;
            family_x(&f, lambda)
        }
        ["family_x", l] => family_x(&field(4)?, from_hex(l)?),
        ["family_z", q2, q4] => family_z(&field(2)?, &parse_list(q2)?, &parse_list(q4)?),
        _ => Err(Error::Usage(format!("unknown builtin surface {id:?}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_is_a_fifth_root_of_unity() {
        let f16 = Field::standard(4).unwrap();
        let a = s5_alpha();
        assert_ne!(a, 1);
        assert_eq!(f16.pow(a, 5), 1);
        let mu = s5_mu0_in_gf16();
        assert_ne!(mu, 1);
        assert_eq!(f16.pow(mu, 3), 1);
    }

    #[test]
    fn s5_line_lies_on_surface() {
        let s = s5_mu0().unwrap().base_change(&Field::standard(4).unwrap()).unwrap();
        assert!(s.contains_line(&s5_line()));
        for g in s5_generators() {
            assert!(g.preserves(&s).unwrap());
        }
    }

    #[test]
    fn builtin_ids() {
        assert!(builtin("s5_mu0").is_ok());
        assert!(matches!(builtin("fermat_char2"), Err(Error::Degenerate(_))));
        assert!(builtin("schur_char2").is_ok());
        assert!(builtin("family_z:0,0,0:1,1,0,0,1").is_ok());
        assert!(builtin("family_z:0,0:1,1,0,0,1").is_err());
        assert!(builtin("nope").is_err());
    }
}
