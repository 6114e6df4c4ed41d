//! Exact determinants.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::scalar::Rational;

/// Determinant of a square rational matrix.
///
/// Rows are first cleared of denominators, then reduced by fraction-free
/// (Bareiss) elimination, so every intermediate is an exact integer.
pub fn determinant(matrix: &[Vec<Rational>]) -> Rational {
    let n = matrix.len();
    if n == 0 {
        return Rational::one();
    }
    assert!(matrix.iter().all(|row| row.len() == n), "determinant needs a square matrix");
    let mut scale = BigInt::one();
    let mut a: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for row in matrix {
        let lcm = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        scale *= &lcm;
        a.push(row.iter().map(|x| x.numer() * (&lcm / x.denom())).collect());
    }
    Rational::new(bareiss(a), scale)
}

/// Determinant of a square integer matrix by Bareiss elimination.
pub fn bareiss(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * a[n - 1][n - 1].clone()
}

/// Matrix with row and column `skip` removed.
pub fn minor(matrix: &[Vec<Rational>], skip: usize) -> Vec<Vec<Rational>> {
    matrix
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != skip)
        .map(|(_, row)| row.iter().enumerate().filter(|(j, _)| *j != skip).map(|(_, x)| x.clone()).collect())
        .collect()
}
