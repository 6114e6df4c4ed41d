//! Single-site combinatorics.
//!
//! With `x = ψ·ψ` on one site, the pinning weight and the site density expand
//! in `ε` as
//!
//! ```text
//! e^{-ε(z-1)}     = Σ_ℓ ε^ℓ/ℓ! Q_ℓ(x),   Q_ℓ(x) = (1 - √(1+x))^ℓ        = Σ_k b_k(ℓ) x^k
//! e^{-ε(z-1)} / z = Σ_ℓ ε^ℓ/ℓ! P_ℓ(x),   P_ℓ(x) = (1 - √(1+x))^ℓ / √(1+x) = Σ_k a_k(ℓ) x^k
//! ```
//!
//! and `x^{m+1} = 0`, so every sum stops at order `m`.

use alloc::vec::Vec;

use crate::error::Result;
use crate::grassmann::{berezin, l1_norm, series_apply, symmetric_product, Algebra, Element};
use crate::scalar::{big, binomial, factorial, int, pow, Rational, Scalar};

/// Site parameters: `m` fermion pairs, pinning `ε ≥ 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct SingleSiteParams<S> {
    pub m: usize,
    pub eps: S,
}

/// Taylor coefficient `a_k(ℓ)` of `P_ℓ`.
pub fn coeff_a(k: u32, l: u32) -> Rational {
    if k < l {
        return int(0);
    }
    let sign = if k % 2 == 0 { 1 } else { -1 };
    let b = big(binomial(2 * k - l, k - l));
    int(sign) * b * two_pow(l as i64 - 2 * k as i64)
}

/// Taylor coefficient `b_k(ℓ)` of `Q_ℓ`. `Q_0 ≡ 1`, so `b_k(0) = 1{k = 0}`.
pub fn coeff_b(k: u32, l: u32) -> Rational {
    if l == 0 {
        return int(i64::from(k == 0));
    }
    if k < l {
        return int(0);
    }
    let sign = if k % 2 == 0 { 1 } else { -1 };
    let b = big(binomial(2 * k - l - 1, k - l));
    int(sign) * b * two_pow(l as i64 - 2 * k as i64) * int(l as i64) / int(k as i64)
}

fn two_pow(e: i64) -> Rational {
    if e >= 0 {
        pow(&int(2), e as u32)
    } else {
        int(1) / pow(&int(2), (-e) as u32)
    }
}

fn scalar_pow<S: Scalar>(x: &S, e: u32) -> S {
    (0..e).fold(S::one(), |acc, _| acc * x.clone())
}

/// Coefficients `c_k = Σ_ℓ ε^ℓ/ℓ! a_k(ℓ)` (with `inv_z`) or with `b_k(ℓ)`
/// (without), for `k = 0..=m`.
pub fn site_series<S: Scalar>(m: usize, eps: &S, inv_z: bool) -> Vec<S> {
    let m = m as u32;
    (0..=m)
        .map(|k| {
            (0..=k).fold(S::zero(), |acc, l| {
                let c = if inv_z { coeff_a(k, l) } else { coeff_b(k, l) };
                let c = c / big(factorial(l));
                acc + S::from_rational(&c) * scalar_pow(eps, l)
            })
        })
        .collect()
}

/// `e^{-ε(z_j-1)}` as an element of `algebra`.
pub fn pinning_weight<S: Scalar>(algebra: Algebra, j: usize, eps: &S) -> Result<Element<S>> {
    let x = symmetric_product(algebra, j, j)?;
    series_apply(&site_series(algebra.m(), eps, false), &x)
}

/// Site density `ν_j = e^{-ε(z_j-1)} / z_j` as an element of `algebra`.
pub fn site_density<S: Scalar>(algebra: Algebra, j: usize, eps: &S) -> Result<Element<S>> {
    let x = symmetric_product(algebra, j, j)?;
    series_apply(&site_series(algebra.m(), eps, true), &x)
}

/// `Z̃_{ε,m} = 2^m m! Σ_ℓ ε^ℓ/ℓ! |a_m(ℓ)|`.
pub fn single_site_z<S: Scalar>(p: &SingleSiteParams<S>) -> S {
    let m = p.m as u32;
    let prefactor = two_pow(m as i64) * big(factorial(m));
    (0..=m).fold(S::zero(), |acc, l| {
        let c = coeff_a(m, l).abs() * &prefactor / big(factorial(l));
        acc + S::from_rational(&c) * scalar_pow(&p.eps, l)
    })
}

/// `Z̃_{ε,m}` by Berezin integration of the site density.
pub fn single_site_z_engine<S: Scalar>(p: &SingleSiteParams<S>) -> Result<S> {
    let algebra = Algebra::new(1, p.m, false)?;
    let nu = site_density(algebra, 0, &p.eps)?;
    Ok(berezin(&nu, &[0])?.scalar_part())
}

/// `‖(ψ·ψ)^k‖ = 2^k m!/(m-k)!`, zero for `k > m`.
pub fn norm_psi_pow(k: u32, m: u32) -> Rational {
    if k > m {
        return int(0);
    }
    two_pow(k as i64) * big(factorial(m)) / big(factorial(m - k))
}

/// `R_ℓ = Σ_{k=ℓ}^m |a_k(ℓ)|/|a_m(ℓ)| 2^{k-m}/(m-k)!`.
pub fn ratio_r(l: u32, m: u32) -> Rational {
    assert!(l <= m, "ratio_r needs l <= m");
    let am = coeff_a(m, l).abs();
    (l..=m).fold(int(0), |acc, k| {
        acc + coeff_a(k, l).abs() / &am * two_pow(k as i64 - m as i64) / big(factorial(m - k))
    })
}

/// `(‖e^{-ε(z-1)}‖ / Z̃, ‖e^{-ε(z-1)}/z‖ / Z̃)` from engine norms.
pub fn one_point_norm_ratios<S: Scalar>(p: &SingleSiteParams<S>) -> Result<(S, S)> {
    let algebra = Algebra::new(1, p.m, false)?;
    let z = single_site_z(p);
    let pin = l1_norm(&pinning_weight(algebra, 0, &p.eps)?);
    let dens = l1_norm(&site_density(algebra, 0, &p.eps)?);
    let div = |x: S| x.checked_div(&z).expect("single-site partition function is positive");
    Ok((div(pin), div(dens)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn pinned_values() {
        assert_eq!(coeff_a(2, 0), rat(3, 8));
        assert_eq!(coeff_a(0, 1), int(0));
        assert_eq!(coeff_a(1, 0), rat(-1, 2));
        assert_eq!(coeff_b(1, 1), rat(-1, 2));
        assert_eq!(coeff_b(2, 0), int(0));
        assert_eq!(coeff_b(0, 0), int(1));
    }

    #[test]
    fn partition_function_values() {
        let z = |m, eps| single_site_z(&SingleSiteParams { m, eps });
        assert_eq!(z(1, int(0)), int(1));
        assert_eq!(z(2, int(0)), int(3));
        assert_eq!(z(0, rat(7, 3)), int(1));
        assert_eq!(single_site_z_engine(&SingleSiteParams { m: 0, eps: rat(7, 3) }).unwrap(), int(1));
    }

    #[test]
    fn norm_and_ratio_instances() {
        assert_eq!(norm_psi_pow(1, 2), int(4));
        assert_eq!(norm_psi_pow(3, 3), int(48));
        assert_eq!(norm_psi_pow(0, 5), int(1));
        assert_eq!(norm_psi_pow(4, 3), int(0));
        assert_eq!(ratio_r(4, 4), int(1));
        // R_0 at m = 1: 1 + (1 / (1/2)) * (1/2) = 2
        assert_eq!(ratio_r(0, 1), int(2));
    }

    #[test]
    fn density_for_one_color() {
        let a = Algebra::new(1, 1, false).unwrap();
        let nu = site_density::<Rational>(a, 0, &int(0)).unwrap();
        let pair = Element::product_of(
            a,
            &[crate::grassmann::Generator::psibar(0, 1), crate::grassmann::Generator::psi(0, 1)],
            int(1),
        )
        .unwrap();
        assert_eq!(nu, &Element::one(a) - &pair);
        let (pin, dens) = one_point_norm_ratios(&SingleSiteParams { m: 1, eps: int(0) }).unwrap();
        assert_eq!(pin, int(1));
        assert_eq!(dens, int(2));
    }
}
