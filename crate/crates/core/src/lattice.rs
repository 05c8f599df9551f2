//! Integer Gram matrices of line configurations: rank and span discriminant.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::IntersectionGraph;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GramLattice {
    pub gram: Vec<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LatticeInvariants {
    pub rank: usize,
    #[serde(serialize_with = "as_string")]
    pub discriminant: BigInt,
    #[serde(rename = "basis-line-ids")]
    pub basis: Vec<usize>,
    #[serde(serialize_with = "as_string")]
    pub index: BigInt,
}

fn as_string<S: serde::Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

impl GramLattice {
    pub fn new(gram: Vec<Vec<i64>>) -> Result<Self> {
        let n = gram.len();
        if gram.iter().any(|r| r.len() != n) {
            return Err(Error::Usage("Gram matrix must be square".into()));
        }
        for i in 0..n {
            for j in 0..n {
                if gram[i][j] != gram[j][i] {
                    return Err(Error::Usage("Gram matrix must be symmetric".into()));
                }
            }
        }
        Ok(GramLattice { gram })
    }

    /// Lines have self-intersection -2 and meet with multiplicity 0 or 1.
    pub fn from_graph(g: &IntersectionGraph) -> Self {
        let n = g.len();
        let gram = (0..n)
            .map(|i| (0..n).map(|j| if i == j { -2 } else { g.meets(i, j) as i64 }).collect())
            .collect();
        GramLattice { gram }
    }

    pub fn len(&self) -> usize {
        self.gram.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gram.is_empty()
    }

    fn big(&self) -> Vec<Vec<BigInt>> {
        self.gram.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    pub fn rank(&self) -> usize {
        bareiss_rank(self.big()).0
    }

    /// Generators whose rows of the Gram matrix are independent, greedily in index order.
    pub fn basis(&self) -> Vec<usize> {
        bareiss_rank(self.big()).1
    }

    pub fn invariants(&self) -> Result<LatticeInvariants> {
        self.invariants_with_basis(&self.basis())
    }

    /// Invariants computed from a chosen nonsingular set of generators.
    pub fn invariants_with_basis(&self, basis: &[usize]) -> Result<LatticeInvariants> {
        let r = self.rank();
        if basis.len() != r {
            return Err(Error::Usage(format!("basis has {} elements, rank is {r}", basis.len())));
        }
        let big = self.big();
        let gbb: Vec<Vec<BigInt>> = basis.iter().map(|&i| basis.iter().map(|&j| big[i][j].clone()).collect()).collect();
        let d0 = bareiss_det(gbb.clone());
        if r > 0 && d0.is_zero() {
            return Err(Error::Internal("chosen generators have singular Gram matrix".into()));
        }
        if r == 0 {
            return Ok(LatticeInvariants { rank: 0, discriminant: BigInt::one(), basis: vec![], index: BigInt::one() });
        }
        // coordinates of all generators in the basis: G_BB c_j = G_Bj
        let rhs: Vec<Vec<BigInt>> = (0..self.len()).map(|j| basis.iter().map(|&i| big[i][j].clone()).collect()).collect();
        let coords = solve_rational(&gbb, &rhs)?;
        let denom = coords.iter().flatten().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let scaled: Vec<Vec<BigInt>> = coords
            .iter()
            .map(|c| c.iter().map(|x| (x * BigRational::from_integer(denom.clone())).to_integer()).collect())
            .collect();
        // index of the span of the scaled coordinates in Z^r
        let sub = lattice_determinant(scaled, r)?;
        // [span : Z^r] = denom^r / [Z^r : scaled span]
        let num = num_traits::pow(denom, r);
        let (index, rem) = num.div_rem(&sub);
        if !rem.is_zero() {
            return Err(Error::Internal("non-integral lattice index".into()));
        }
        let (disc, rem) = d0.div_rem(&(&index * &index));
        if !rem.is_zero() {
            return Err(Error::Internal("index squared does not divide the basis discriminant".into()));
        }
        Ok(LatticeInvariants { rank: r, discriminant: disc, basis: basis.to_vec(), index })
    }

    pub fn span_discriminant(&self) -> Result<BigInt> {
        Ok(self.invariants()?.discriminant)
    }
}

/// Fraction-free elimination: rank and the pivot rows chosen greedily.
fn bareiss_rank(mut m: Vec<Vec<BigInt>>) -> (usize, Vec<usize>) {
    let n = m.len();
    if n == 0 {
        return (0, vec![]);
    }
    let cols = m[0].len();
    // eliminate on the transpose so that independent rows are found in index order
    let mut t: Vec<Vec<BigInt>> = (0..cols).map(|j| (0..n).map(|i| m[i][j].clone()).collect()).collect();
    std::mem::swap(&mut m, &mut t);
    let rows = m.len();
    let mut rank = 0;
    let mut prev = BigInt::one();
    let mut pivots = Vec::new();
    for c in 0..n {
        let Some(p) = (rank..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(rank, p);
        for i in rank + 1..rows {
            for j in c + 1..n {
                let v = (&m[rank][c] * &m[i][j] - &m[i][c] * &m[rank][j]) / &prev;
                m[i][j] = v;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[rank][c].clone();
        pivots.push(c);
        rank += 1;
        if rank == rows {
            break;
        }
    }
    (rank, pivots)
}

pub fn bareiss_det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !m[i][k].is_zero()) else { return BigInt::zero() };
        if p != k {
            m.swap(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (&m[k][k] * &m[i][j] - &m[i][k] * &m[k][j]) / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    if n == 0 {
        BigInt::one()
    } else {
        sign * &m[n - 1][n - 1]
    }
}

/// Solve A x = b for each right hand side, A square nonsingular.
fn solve_rational(a: &[Vec<BigInt>], rhs: &[Vec<BigInt>]) -> Result<Vec<Vec<BigRational>>> {
    let r = a.len();
    let mut m: Vec<Vec<BigRational>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut v: Vec<BigRational> = row.iter().map(|x| BigRational::from_integer(x.clone())).collect();
            v.extend(rhs.iter().map(|b| BigRational::from_integer(b[i].clone())));
            v
        })
        .collect();
    let w = r + rhs.len();
    for c in 0..r {
        let p = (c..r).find(|&i| !m[i][c].is_zero()).ok_or_else(|| Error::Internal("singular system".into()))?;
        m.swap(c, p);
        let inv = m[c][c].recip();
        for j in c..w {
            m[c][j] = &m[c][j] * &inv;
        }
        for i in 0..r {
            if i != c && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..w {
                    let v = &m[i][j] - &f * &m[c][j];
                    m[i][j] = v;
                }
            }
        }
    }
    Ok((0..rhs.len()).map(|k| (0..r).map(|i| m[i][r + k].clone()).collect()).collect())
}

/// |det| of the lattice spanned by integer vectors of length r (which must span Q^r),
/// via Hermite reduction of the generator rows.
pub fn lattice_determinant(mut gens: Vec<Vec<BigInt>>, r: usize) -> Result<BigInt> {
    let mut basis: Vec<Vec<BigInt>> = Vec::new();
    for c in 0..r {
        // gcd-combine all remaining generators on column c
        let mut pivot: Option<Vec<BigInt>> = None;
        let mut rest = Vec::new();
        for g in gens.drain(..) {
            if g[c].is_zero() {
                rest.push(g);
                continue;
            }
            match pivot.take() {
                None => pivot = Some(g),
                Some(p) => {
                    let e = p[c].extended_gcd(&g[c]);
                    let (a, b) = (&p[c] / &e.gcd, &g[c] / &e.gcd);
                    let np: Vec<BigInt> = p.iter().zip(&g).map(|(x, y)| &e.x * x + &e.y * y).collect();
                    let ng: Vec<BigInt> = p.iter().zip(&g).map(|(x, y)| &a * y - &b * x).collect();
                    pivot = Some(np);
                    if ng.iter().any(|x| !x.is_zero()) {
                        rest.push(ng);
                    }
                }
            }
        }
        let p = pivot.ok_or_else(|| Error::Internal("generators do not span".into()))?;
        basis.push(p);
        gens = rest.into_iter().filter(|g| g.iter().any(|x| !x.is_zero())).collect();
    }
    Ok(basis.iter().enumerate().fold(BigInt::one(), |acc, (i, row)| acc * row[i].abs()))
}
