use alloc::vec::Vec;

use super::{merge_sign, Algebra, Element, Generator, Monomial, Species};
use crate::error::{Error, Result};
use crate::scalar::{factorial, Rational, Scalar};

/// `sum_k coeffs[k] x^k` for an even nilpotent `x`. The sum is finite: it
/// stops at the end of `coeffs` or as soon as `x^k` vanishes.
pub fn series_apply<S: Scalar>(coeffs: &[S], x: &Element<S>) -> Result<Element<S>> {
    if !x.is_even() {
        return Err(Error::Domain("power series argument must be even".into()));
    }
    if !x.scalar_part().is_zero() {
        return Err(Error::Domain(
            "power series argument must have zero scalar part; split it off first".into(),
        ));
    }
    let algebra = x.algebra();
    let mut acc = Element::zero(algebra);
    let mut power = Element::one(algebra);
    for c in coeffs {
        if power.is_zero() {
            break;
        }
        if !c.is_zero() {
            acc = &acc + &power.scale(c);
        }
        power = &power * x;
    }
    Ok(acc)
}

/// Exponential of an even element.
///
/// The nilpotent part is summed exactly. A nonzero scalar part `c` is
/// factored out as `e^c`; in exact mode that is only possible for `c = 0`, so
/// any other scalar part is rejected.
pub fn exp_even<S: Scalar>(x: &Element<S>) -> Result<Element<S>> {
    if !x.is_even() {
        return Err(Error::Domain("exponential of a non-even element".into()));
    }
    let c = x.scalar_part();
    let prefactor = c.exp().ok_or_else(|| {
        Error::Domain("exact exponential needs a zero scalar part; factor e^c out analytically".into())
    })?;
    let nil = x.without_scalar_part();
    // x^k = 0 beyond half the number of generators
    let order = nil.algebra().num_generators() / 2;
    let coeffs: Vec<S> = (0..=order as u32)
        .map(|k| S::from_rational(&(Rational::from_integer(1.into()) / crate::scalar::big(factorial(k)))))
        .collect();
    let e = series_apply(&coeffs, &nil)?;
    Ok(if prefactor == S::one() { e } else { e.scale(&prefactor) })
}

/// Sign and surviving monomial of `∫ dψ_G mono` for the integrated generator
/// mask `g`, or `None` if the monomial lacks one of the integrated generators.
///
/// The integration operator is `∏_{j} ∏_{α} ∂_{ψ̄_{jα}} ∂_{ψ_{jα}}` with left
/// derivatives, rightmost acting first. Each site/color pair operator is even,
/// so the operators commute, and on the canonical pair `ψ̄ψ` one pair operator
/// returns `-1`. Moving the integrated generators in front of the remainder
/// costs one sign per crossing.
#[inline]
fn integrate_monomial(mono: Monomial, g: Monomial) -> Option<(Monomial, bool)> {
    if !mono.contains(g) {
        return None;
    }
    let rest = mono.minus(g);
    let mut parity = g.degree() / 2;
    for bit in g.bits() {
        let below = if bit == 0 { 0 } else { rest.0 & ((1u128 << bit) - 1) };
        parity += below.count_ones();
    }
    Some((rest, parity % 2 == 1))
}

fn integrated_mask(algebra: Algebra, sites: &[usize]) -> Result<Monomial> {
    for &s in sites {
        if s >= algebra.num_sites() {
            return Err(Error::InvalidInput(alloc::format!("site {} outside the algebra", s)));
        }
    }
    Ok(algebra.sites_mask(sites))
}

/// Berezin integral over the field generators of `sites`.
pub fn berezin<S: Scalar>(x: &Element<S>, sites: &[usize]) -> Result<Element<S>> {
    let algebra = x.algebra();
    let g = integrated_mask(algebra, sites)?;
    let terms = x.terms().iter().filter_map(|(mono, c)| {
        integrate_monomial(*mono, g).map(|(rest, neg)| (rest, if neg { -c.clone() } else { c.clone() }))
    });
    Ok(Element::from_terms(algebra, terms.collect::<Vec<_>>()))
}

/// `∫ dψ_sites (a * b)` without forming the full product.
///
/// When `a` lives entirely on the integrated generators (a product of
/// single-site weights, say) each term of `b` meets exactly one partner term
/// of `a`, making this linear in the size of `b`. Otherwise it falls back to
/// the full product.
pub fn integrate_product<S: Scalar>(a: &Element<S>, b: &Element<S>, sites: &[usize]) -> Result<Element<S>> {
    if a.algebra() != b.algebra() {
        return Err(Error::ContextMismatch);
    }
    let algebra = a.algebra();
    let g = integrated_mask(algebra, sites)?;
    if !g.contains(a.support()) {
        return berezin(&a.try_mul(b)?, sites);
    }
    let mut out = Vec::new();
    for (mb, cb) in b.terms() {
        let ma = g.minus(*mb);
        let ca = a.coefficient(ma);
        if ca.is_zero() {
            continue;
        }
        let mut negative = merge_sign(ma, *mb);
        let prod = ma.union(*mb);
        if let Some((rest, neg)) = integrate_monomial(prod, g) {
            negative ^= neg;
            let c = ca * cb.clone();
            out.push((rest, if negative { -c } else { c }));
        }
    }
    Ok(Element::from_terms(algebra, out))
}

/// ℓ¹ norm: sum of absolute values of the coefficients.
pub fn l1_norm<S: Scalar>(x: &Element<S>) -> S {
    x.terms().iter().fold(S::zero(), |acc, (_, c)| acc + c.abs())
}

/// `ψ_i · ψ_j = Σ_α (ψ̄_{iα} ψ_{jα} + ψ̄_{jα} ψ_{iα})`.
pub fn symmetric_product<S: Scalar>(algebra: Algebra, i: usize, j: usize) -> Result<Element<S>> {
    cross_product(algebra, (Species::Field, i), (Species::Field, j))
}

/// `ψ_j · ρ_j = Σ_α (ψ̄_{jα} ρ_{jα} + ρ̄_{jα} ψ_{jα})`.
pub fn source_coupling<S: Scalar>(algebra: Algebra, j: usize) -> Result<Element<S>> {
    cross_product(algebra, (Species::Field, j), (Species::Source, j))
}

fn cross_product<S: Scalar>(
    algebra: Algebra,
    (sa, i): (Species, usize),
    (sb, j): (Species, usize),
) -> Result<Element<S>> {
    let make = |species, site, color, conjugate| Generator { species, site, color, conjugate };
    let mut acc = Element::zero(algebra);
    for alpha in 1..=algebra.m() {
        let t1 = Element::product_of(algebra, &[make(sa, i, alpha, true), make(sb, j, alpha, false)], S::one())?;
        let t2 = Element::product_of(algebra, &[make(sb, j, alpha, true), make(sa, i, alpha, false)], S::one())?;
        acc = &(&acc + &t1) + &t2;
    }
    Ok(acc)
}
