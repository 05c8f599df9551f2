//! Commutative rings as context objects.
//!
//! Elements are plain values; the ring object carries whatever the arithmetic
//! needs (multiplication tables, the coefficient ring of a polynomial ring, ...).

use std::collections::HashMap;
use std::fmt::Debug;
use std::hash::Hash;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::field::Field;

pub trait Ring {
    type El: Clone + PartialEq + Eq + Hash + Debug + Send + Sync;

    fn zero(&self) -> Self::El;
    fn one(&self) -> Self::El;
    fn add(&self, a: &Self::El, b: &Self::El) -> Self::El;
    fn neg(&self, a: &Self::El) -> Self::El;
    fn mul(&self, a: &Self::El, b: &Self::El) -> Self::El;
    fn is_zero(&self, a: &Self::El) -> bool;
    /// Image of an integer under the canonical map Z -> R.
    fn from_bigint(&self, n: &BigInt) -> Self::El;

    fn sub(&self, a: &Self::El, b: &Self::El) -> Self::El {
        self.add(a, &self.neg(b))
    }
    fn from_int(&self, n: i64) -> Self::El {
        self.from_bigint(&BigInt::from(n))
    }
    fn pow(&self, a: &Self::El, e: u32) -> Self::El {
        let mut r = self.one();
        for _ in 0..e {
            r = self.mul(&r, a);
        }
        r
    }
    fn sum<'a, I: IntoIterator<Item = &'a Self::El>>(&self, items: I) -> Self::El
    where
        Self::El: 'a,
    {
        items.into_iter().fold(self.zero(), |acc, x| self.add(&acc, x))
    }
}

impl Ring for Field {
    type El = u32;
    fn zero(&self) -> u32 {
        0
    }
    fn one(&self) -> u32 {
        1
    }
    fn add(&self, a: &u32, b: &u32) -> u32 {
        a ^ b
    }
    fn neg(&self, a: &u32) -> u32 {
        *a
    }
    fn mul(&self, a: &u32, b: &u32) -> u32 {
        Field::mul(self, *a, *b)
    }
    fn is_zero(&self, a: &u32) -> bool {
        *a == 0
    }
    fn from_bigint(&self, n: &BigInt) -> u32 {
        if n.is_odd() {
            1
        } else {
            0
        }
    }
    fn pow(&self, a: &u32, e: u32) -> u32 {
        Field::pow(self, *a, e as u64)
    }
}

/// The integers with arbitrary precision.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Integers;

impl Ring for Integers {
    type El = BigInt;
    fn zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn one(&self) -> BigInt {
        BigInt::one()
    }
    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }
    fn neg(&self, a: &BigInt) -> BigInt {
        -a
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }
    fn is_zero(&self, a: &BigInt) -> bool {
        a.is_zero()
    }
    fn from_bigint(&self, n: &BigInt) -> BigInt {
        n.clone()
    }
}

/// Determinant by Laplace expansion along rows, memoized on the set of used
/// columns. Division free, so it works over any commutative ring; intended
/// for n <= 12 or so.
pub fn determinant<R: Ring>(ring: &R, m: &[Vec<R::El>]) -> R::El {
    let n = m.len();
    if n == 0 {
        return ring.one();
    }
    assert!(n <= 20, "laplace determinant is for small matrices");
    assert!(m.iter().all(|row| row.len() == n), "square matrix required");
    let mut memo: HashMap<u32, R::El> = HashMap::new();
    det_rec(ring, m, 0, 0, &mut memo)
}

fn det_rec<R: Ring>(
    ring: &R,
    m: &[Vec<R::El>],
    row: usize,
    used: u32,
    memo: &mut HashMap<u32, R::El>,
) -> R::El {
    let n = m.len();
    if row == n {
        return ring.one();
    }
    if let Some(v) = memo.get(&used) {
        return v.clone();
    }
    let mut acc = ring.zero();
    let mut sign_pos = true;
    for col in 0..n {
        if used >> col & 1 == 1 {
            continue;
        }
        let entry = &m[row][col];
        if !ring.is_zero(entry) {
            let minor = det_rec(ring, m, row + 1, used | 1 << col, memo);
            let term = ring.mul(entry, &minor);
            acc = if sign_pos { ring.add(&acc, &term) } else { ring.sub(&acc, &term) };
        }
        sign_pos = !sign_pos;
    }
    memo.insert(used, acc.clone());
    acc
}

/// Saturating conversion used in reports.
pub fn bigint_to_i64(n: &BigInt) -> Option<i64> {
    n.to_i64()
}

pub fn bigint_abs(n: &BigInt) -> BigInt {
    n.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_determinants() {
        let z = Integers;
        let m: Vec<Vec<BigInt>> = vec![
            vec![2.into(), 0.into(), 1.into()],
            vec![1.into(), 3.into(), 2.into()],
            vec![1.into(), 1.into(), 1.into()],
        ];
        // 2(3-2) - 0 + 1(1-3) = 0
        assert_eq!(determinant(&z, &m), BigInt::from(0));
        let id: Vec<Vec<BigInt>> =
            (0..5).map(|i| (0..5).map(|j| BigInt::from((i == j) as i64 * 2)).collect()).collect();
        assert_eq!(determinant(&z, &id), BigInt::from(32));
        let swap: Vec<Vec<BigInt>> = vec![vec![0.into(), 1.into()], vec![1.into(), 0.into()]];
        assert_eq!(determinant(&z, &swap), BigInt::from(-1));
    }

    #[test]
    fn field_determinant() {
        let f = Field::standard(2).unwrap();
        let m = vec![vec![2u32, 1], vec![1, 3]];
        // 2*3 + 1 = 1 + 1 = 0 in GF(4)
        assert_eq!(determinant(&f, &m), 0);
    }
}
