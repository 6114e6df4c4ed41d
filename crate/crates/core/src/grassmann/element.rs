use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use hashbrown::HashMap;

use super::{merge_sign, Algebra, Generator, Monomial};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Element of a Grassmann algebra: a sparse sum of canonical monomials.
///
/// Terms are kept sorted by monomial with zero coefficients pruned, so two
/// equal elements compare equal structurally.
#[derive(Clone, Debug, PartialEq)]
pub struct Element<S> {
    algebra: Algebra,
    terms: Vec<(Monomial, S)>,
}

impl<S: Scalar> Element<S> {
    pub fn zero(algebra: Algebra) -> Self {
        Element { algebra, terms: Vec::new() }
    }

    pub fn one(algebra: Algebra) -> Self {
        Self::scalar(algebra, S::one())
    }

    pub fn scalar(algebra: Algebra, c: S) -> Self {
        Self::monomial(algebra, Monomial::ONE, c)
    }

    pub fn monomial(algebra: Algebra, mono: Monomial, c: S) -> Self {
        let terms = if c.is_zero() { Vec::new() } else { alloc::vec![(mono, c)] };
        Element { algebra, terms }
    }

    pub fn generator(algebra: Algebra, g: Generator) -> Result<Self> {
        Self::product_of(algebra, &[g], S::one())
    }

    /// `c * gens[0] * gens[1] * ...`, or zero when a generator repeats.
    pub fn product_of(algebra: Algebra, gens: &[Generator], c: S) -> Result<Self> {
        match algebra.monomial(gens) {
            Ok((mono, negative)) => {
                let c = if negative { -c } else { c };
                Ok(Self::monomial(algebra, mono, c))
            }
            Err(Error::Domain(_)) => Ok(Self::zero(algebra)),
            Err(e) => Err(e),
        }
    }

    /// Builds an element from arbitrary (monomial, coefficient) pairs,
    /// merging duplicates.
    pub fn from_terms(algebra: Algebra, terms: impl IntoIterator<Item = (Monomial, S)>) -> Self {
        let mut acc: HashMap<Monomial, S> = HashMap::new();
        for (mono, c) in terms {
            accumulate(&mut acc, mono, c);
        }
        Self::from_map(algebra, acc)
    }

    fn from_map(algebra: Algebra, acc: HashMap<Monomial, S>) -> Self {
        let mut terms: Vec<(Monomial, S)> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_unstable_by_key(|(m, _)| *m);
        Element { algebra, terms }
    }

    pub fn algebra(&self) -> Algebra {
        self.algebra
    }

    pub fn terms(&self) -> &[(Monomial, S)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, mono: Monomial) -> S {
        match self.terms.binary_search_by_key(&mono, |(m, _)| *m) {
            Ok(i) => self.terms[i].1.clone(),
            Err(_) => S::zero(),
        }
    }

    /// Coefficient of the ordered product `gens[0] gens[1] ...`, accounting
    /// for the sign of sorting it into canonical order.
    pub fn coefficient_of(&self, gens: &[Generator]) -> Result<S> {
        let (mono, negative) = self.algebra.monomial(gens)?;
        let c = self.coefficient(mono);
        Ok(if negative { -c } else { c })
    }

    pub fn scalar_part(&self) -> S {
        self.coefficient(Monomial::ONE)
    }

    /// `true` when every monomial has even degree (zero counts as even).
    pub fn is_even(&self) -> bool {
        self.terms.iter().all(|(m, _)| m.is_even())
    }

    pub fn is_odd(&self) -> bool {
        self.terms.iter().all(|(m, _)| !m.is_even())
    }

    /// Highest monomial degree present, 0 for scalars and zero.
    pub fn max_degree(&self) -> u32 {
        self.terms.iter().map(|(m, _)| m.degree()).max().unwrap_or(0)
    }

    /// Union of all generators that occur.
    pub fn support(&self) -> Monomial {
        self.terms.iter().fold(Monomial::ONE, |acc, (m, _)| acc.union(*m))
    }

    pub fn without_scalar_part(&self) -> Self {
        Element {
            algebra: self.algebra,
            terms: self.terms.iter().filter(|(m, _)| *m != Monomial::ONE).cloned().collect(),
        }
    }

    pub fn scale(&self, c: &S) -> Self {
        if c.is_zero() {
            return Self::zero(self.algebra);
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, v)| (*m, v.clone() * c.clone()))
            .filter(|(_, v)| !v.is_zero())
            .collect();
        Element { algebra: self.algebra, terms }
    }

    pub fn map_coefficients<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Element<T> {
        let terms = self
            .terms
            .iter()
            .map(|(m, v)| (*m, f(v)))
            .filter(|(_, v)| !v.is_zero())
            .collect();
        Element { algebra: self.algebra, terms }
    }

    /// Keeps only the terms accepted by `keep`.
    pub fn filter_terms(&self, keep: impl Fn(Monomial) -> bool) -> Self {
        Element {
            algebra: self.algebra,
            terms: self.terms.iter().filter(|(m, _)| keep(*m)).cloned().collect(),
        }
    }

    fn check_context(&self, other: &Self) -> Result<()> {
        if self.algebra == other.algebra {
            Ok(())
        } else {
            Err(Error::ContextMismatch)
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_context(other)?;
        Ok(self.combine(other, false))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_context(other)?;
        Ok(self.combine(other, true))
    }

    fn combine(&self, other: &Self, subtract: bool) -> Self {
        // sorted merge
        let mut terms = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let a = &self.terms;
        let b = &other.terms;
        let signed = |c: &S| if subtract { -c.clone() } else { c.clone() };
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                terms.push(a[i].clone());
                i += 1;
            } else if i == a.len() || b[j].0 < a[i].0 {
                terms.push((b[j].0, signed(&b[j].1)));
                j += 1;
            } else {
                let c = a[i].1.clone() + signed(&b[j].1);
                if !c.is_zero() {
                    terms.push((a[i].0, c));
                }
                i += 1;
                j += 1;
            }
        }
        Element { algebra: self.algebra, terms }
    }

    /// Grassmann product `self * other`.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_context(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.algebra));
        }
        // products of elements on disjoint generator sets never collide
        if self.support().is_disjoint(other.support()) {
            let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
            for (ma, ca) in &self.terms {
                for (mb, cb) in &other.terms {
                    let c = ca.clone() * cb.clone();
                    let c = if merge_sign(*ma, *mb) { -c } else { c };
                    terms.push((ma.union(*mb), c));
                }
            }
            terms.sort_unstable_by_key(|(m, _)| *m);
            return Ok(Element { algebra: self.algebra, terms });
        }
        let mut acc: HashMap<Monomial, S> = HashMap::with_capacity(self.terms.len().max(other.terms.len()));
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if !ma.is_disjoint(*mb) {
                    continue;
                }
                let c = ca.clone() * cb.clone();
                let c = if merge_sign(*ma, *mb) { -c } else { c };
                accumulate(&mut acc, ma.union(*mb), c);
            }
        }
        Ok(Self::from_map(self.algebra, acc))
    }

    /// Product keeping only terms whose degree in the generators of `mask`
    /// is at most `max_degree`.
    pub fn try_mul_truncated(&self, other: &Self, mask: Monomial, max_degree: u32) -> Result<Self> {
        self.check_context(other)?;
        let mut acc: HashMap<Monomial, S> = HashMap::new();
        for (ma, ca) in &self.terms {
            let da = Monomial(ma.0 & mask.0).degree();
            if da > max_degree {
                continue;
            }
            for (mb, cb) in &other.terms {
                if !ma.is_disjoint(*mb) || da + Monomial(mb.0 & mask.0).degree() > max_degree {
                    continue;
                }
                let c = ca.clone() * cb.clone();
                let c = if merge_sign(*ma, *mb) { -c } else { c };
                accumulate(&mut acc, ma.union(*mb), c);
            }
        }
        Ok(Self::from_map(self.algebra, acc))
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.algebra);
        for _ in 0..k {
            if acc.is_zero() {
                break;
            }
            acc = &acc * self;
        }
        acc
    }
}

fn accumulate<S: Scalar>(acc: &mut HashMap<Monomial, S>, mono: Monomial, c: S) {
    match acc.get_mut(&mono) {
        Some(v) => v.add_assign_ref(&c),
        None => {
            acc.insert(mono, c);
        }
    }
}

// Operator forms panic on mismatched contexts; use the `try_` methods when
// the contexts are not known to agree.
impl<S: Scalar> Add for &Element<S> {
    type Output = Element<S>;
    fn add(self, rhs: Self) -> Element<S> {
        self.try_add(rhs).expect("Grassmann elements from different algebras")
    }
}

impl<S: Scalar> Sub for &Element<S> {
    type Output = Element<S>;
    fn sub(self, rhs: Self) -> Element<S> {
        self.try_sub(rhs).expect("Grassmann elements from different algebras")
    }
}

impl<S: Scalar> Mul for &Element<S> {
    type Output = Element<S>;
    fn mul(self, rhs: Self) -> Element<S> {
        self.try_mul(rhs).expect("Grassmann elements from different algebras")
    }
}

impl<S: Scalar> Neg for &Element<S> {
    type Output = Element<S>;
    fn neg(self) -> Element<S> {
        Element {
            algebra: self.algebra,
            terms: self.terms.iter().map(|(m, c)| (*m, -c.clone())).collect(),
        }
    }
}

impl<S: Scalar> fmt::Display for Element<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (mono, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            if *mono == Monomial::ONE {
                write!(f, "({})", c)?;
            } else {
                write!(f, "({}) {}", c, self.algebra.render(*mono))?;
            }
        }
        Ok(())
    }
}
