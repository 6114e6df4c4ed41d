//! Sparse finite-dimensional Grassmann algebra.
//!
//! Generators are identified by [`Generator`] and mapped to bit positions of a
//! `u128`, so a monomial is a bitset and products reduce to mask tests plus a
//! popcount-based sign. Canonical generator order (lowest bit first):
//!
//! 1. species: field `psi` before source `rho`;
//! 2. site, ascending;
//! 3. color `1..=m`, ascending;
//! 4. conjugate before plain, i.e. `psibar[j,a]` precedes `psi[j,a]`.
//!
//! With this order each site/color pair appears as `psibar psi` in canonical
//! monomials, which is also how the pretty-printer renders them.

mod calculus;
mod element;

pub use calculus::{
    berezin, exp_even, integrate_product, l1_norm, series_apply, source_coupling, symmetric_product,
};
pub use element::Element;

use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// Maximum number of generators in one algebra context.
pub const GENERATOR_CAPACITY: usize = 128;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Species {
    /// Integration variables `psi`, `psibar`.
    Field,
    /// External variables `rho`, `rhobar` of the generating function.
    Source,
}

/// One Grassmann generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Generator {
    pub species: Species,
    pub site: usize,
    /// Color index in `1..=m`.
    pub color: usize,
    /// `true` for the barred generator.
    pub conjugate: bool,
}

impl Generator {
    pub fn psi(site: usize, color: usize) -> Self {
        Generator { species: Species::Field, site, color, conjugate: false }
    }

    pub fn psibar(site: usize, color: usize) -> Self {
        Generator { species: Species::Field, site, color, conjugate: true }
    }

    pub fn rho(site: usize, color: usize) -> Self {
        Generator { species: Species::Source, site, color, conjugate: false }
    }

    pub fn rhobar(site: usize, color: usize) -> Self {
        Generator { species: Species::Source, site, color, conjugate: true }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let base = match self.species {
            Species::Field => "psi",
            Species::Source => "rho",
        };
        let bar = if self.conjugate { "bar" } else { "" };
        write!(f, "{}{}[{},{}]", base, bar, self.site, self.color)
    }
}

/// Bitset over the generator universe of an [`Algebra`], in canonical order.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(pub u128);

impl Monomial {
    pub const ONE: Monomial = Monomial(0);

    pub fn degree(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_even(self) -> bool {
        self.degree() % 2 == 0
    }

    pub fn contains(self, other: Monomial) -> bool {
        self.0 & other.0 == other.0
    }

    pub fn is_disjoint(self, other: Monomial) -> bool {
        self.0 & other.0 == 0
    }

    pub fn union(self, other: Monomial) -> Monomial {
        Monomial(self.0 | other.0)
    }

    pub fn minus(self, other: Monomial) -> Monomial {
        Monomial(self.0 & !other.0)
    }

    pub fn bits(self) -> impl Iterator<Item = u32> {
        let mut rest = self.0;
        core::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let b = rest.trailing_zeros();
                rest &= rest - 1;
                Some(b)
            }
        })
    }
}

/// Sign picked up when the canonical monomials `a` and `b` (disjoint) are
/// multiplied as `a * b` and the result is sorted: `true` means negative.
#[inline]
pub(crate) fn merge_sign(a: Monomial, b: Monomial) -> bool {
    let mut parity = 0u32;
    let mut rest = b.0;
    while rest != 0 {
        let bit = rest.trailing_zeros();
        rest &= rest - 1;
        // generators of `a` that sit above `bit` must be crossed
        let above = if bit == 127 { 0 } else { a.0 >> (bit + 1) };
        parity ^= above.count_ones();
    }
    parity & 1 == 1
}

/// Generator universe shared by all elements of one computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Algebra {
    num_sites: usize,
    m: usize,
    with_sources: bool,
}

impl Algebra {
    /// Context with `2 m num_sites` field generators, doubled when sources are
    /// enabled. The coefficient ring is fixed by the element type
    /// (`Element<Rational>` or `Element<f64>`).
    pub fn new(num_sites: usize, m: usize, with_sources: bool) -> Result<Self> {
        if num_sites == 0 {
            return Err(Error::InvalidInput("an algebra needs at least one site".into()));
        }
        let requested = 2 * m * num_sites * if with_sources { 2 } else { 1 };
        if requested > GENERATOR_CAPACITY {
            return Err(Error::Capacity { requested, capacity: GENERATOR_CAPACITY });
        }
        Ok(Algebra { num_sites, m, with_sources })
    }

    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn with_sources(&self) -> bool {
        self.with_sources
    }

    pub fn num_generators(&self) -> usize {
        2 * self.m * self.num_sites * if self.with_sources { 2 } else { 1 }
    }

    fn field_count(&self) -> usize {
        2 * self.m * self.num_sites
    }

    /// Bit position of `g`.
    pub fn index(&self, g: Generator) -> Result<u32> {
        if g.site >= self.num_sites || g.color == 0 || g.color > self.m {
            return Err(Error::InvalidInput(alloc::format!(
                "generator {} outside algebra with {} sites and m = {}",
                g,
                self.num_sites,
                self.m
            )));
        }
        let offset = match g.species {
            Species::Field => 0,
            Species::Source if self.with_sources => self.field_count(),
            Species::Source => return Err(Error::SourcesDisabled),
        };
        let pos = offset + 2 * (g.site * self.m + g.color - 1) + usize::from(!g.conjugate);
        Ok(pos as u32)
    }

    pub fn generator(&self, index: u32) -> Generator {
        let idx = index as usize;
        let (species, local) = if idx < self.field_count() {
            (Species::Field, idx)
        } else {
            (Species::Source, idx - self.field_count())
        };
        let pair = local / 2;
        Generator {
            species,
            site: pair / self.m,
            color: pair % self.m + 1,
            conjugate: local % 2 == 0,
        }
    }

    /// All generators, in canonical order.
    pub fn generators(&self) -> Vec<Generator> {
        (0..self.num_generators() as u32).map(|i| self.generator(i)).collect()
    }

    /// Canonical monomial of the ordered product `gens[0] gens[1] ...`, and
    /// whether sorting it flipped the sign.
    pub fn monomial(&self, gens: &[Generator]) -> Result<(Monomial, bool)> {
        let mut mono = Monomial::ONE;
        let mut negative = false;
        for g in gens {
            let bit = Monomial(1u128 << self.index(*g)?);
            if !mono.is_disjoint(bit) {
                return Err(Error::Domain(alloc::format!("repeated generator {}", g)));
            }
            negative ^= merge_sign(mono, bit);
            mono = mono.union(bit);
        }
        Ok((mono, negative))
    }

    /// Mask of the field generators `psi`, `psibar` at `site`.
    pub fn site_mask(&self, site: usize) -> Monomial {
        if self.m == 0 || site >= self.num_sites {
            return Monomial::ONE;
        }
        let width = 2 * self.m;
        let block = if width == 128 { u128::MAX } else { (1u128 << width) - 1 };
        Monomial(block << (width * site))
    }

    pub fn sites_mask(&self, sites: &[usize]) -> Monomial {
        sites.iter().fold(Monomial::ONE, |acc, &s| acc.union(self.site_mask(s)))
    }

    /// Mask of all field generators.
    pub fn field_mask(&self) -> Monomial {
        let n = self.field_count();
        if n == 0 {
            Monomial::ONE
        } else if n == 128 {
            Monomial(u128::MAX)
        } else {
            Monomial((1u128 << n) - 1)
        }
    }

    pub fn source_mask(&self) -> Monomial {
        if !self.with_sources {
            return Monomial::ONE;
        }
        let all = if self.num_generators() == 128 {
            u128::MAX
        } else {
            (1u128 << self.num_generators()) - 1
        };
        Monomial(all & !self.field_mask().0)
    }

    pub fn render(&self, mono: Monomial) -> alloc::string::String {
        use core::fmt::Write;
        let mut out = alloc::string::String::new();
        for (k, b) in mono.bits().enumerate() {
            if k > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{}", self.generator(b));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_counts() {
        let a = Algebra::new(1, 1, false).unwrap();
        assert_eq!(a.num_generators(), 2);
        assert_eq!(a.generator(0), Generator::psibar(0, 1));
        assert_eq!(a.generator(1), Generator::psi(0, 1));
        assert_eq!(Algebra::new(1, 0, false).unwrap().num_generators(), 0);
        assert_eq!(Algebra::new(4, 2, false).unwrap().num_generators(), 16);
        assert_eq!(Algebra::new(4, 2, true).unwrap().num_generators(), 32);
    }

    #[test]
    fn capacity_is_enforced() {
        assert!(Algebra::new(32, 2, false).is_ok());
        assert_eq!(
            Algebra::new(33, 2, false),
            Err(Error::Capacity { requested: 132, capacity: 128 })
        );
        assert!(matches!(Algebra::new(16, 2, true), Ok(_)));
        assert!(matches!(Algebra::new(17, 2, true), Err(Error::Capacity { .. })));
        assert!(Algebra::new(0, 1, false).is_err());
    }

    #[test]
    fn index_round_trips() {
        let a = Algebra::new(3, 2, true).unwrap();
        for i in 0..a.num_generators() as u32 {
            assert_eq!(a.index(a.generator(i)).unwrap(), i);
        }
        assert!(a.index(Generator::psi(3, 1)).is_err());
        assert!(a.index(Generator::psi(0, 3)).is_err());
        let b = Algebra::new(3, 2, false).unwrap();
        assert_eq!(b.index(Generator::rho(0, 1)), Err(Error::SourcesDisabled));
    }

    #[test]
    fn canonical_order_is_species_site_color_conjugate() {
        let a = Algebra::new(2, 2, true).unwrap();
        let order = [
            Generator::psibar(0, 1),
            Generator::psi(0, 1),
            Generator::psibar(0, 2),
            Generator::psi(0, 2),
            Generator::psibar(1, 1),
            Generator::psi(1, 1),
            Generator::psibar(1, 2),
            Generator::psi(1, 2),
            Generator::rhobar(0, 1),
            Generator::rho(0, 1),
        ];
        for w in order.windows(2) {
            assert!(a.index(w[0]).unwrap() < a.index(w[1]).unwrap());
        }
    }

    #[test]
    fn masks() {
        let a = Algebra::new(3, 2, true).unwrap();
        assert_eq!(a.site_mask(1), Monomial(0b1111_0000));
        assert_eq!(a.field_mask().degree(), 12);
        assert_eq!(a.source_mask().degree(), 12);
        assert!(a.field_mask().is_disjoint(a.source_mask()));
    }

    #[test]
    fn merge_sign_counts_crossings() {
        // b0 * b1 is sorted, b1 * b0 needs one swap
        assert!(!merge_sign(Monomial(0b01), Monomial(0b10)));
        assert!(merge_sign(Monomial(0b10), Monomial(0b01)));
        // (b1 b2) * b0: b0 crosses two generators
        assert!(!merge_sign(Monomial(0b110), Monomial(0b001)));
        assert!(merge_sign(Monomial(1 << 127), Monomial(1)));
    }
}
