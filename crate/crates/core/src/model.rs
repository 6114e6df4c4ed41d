//! The fermionic hyperbolic model on a weighted graph.
//!
//! ```text
//! W_ij = β J_ij (-1 - ψ_i·ψ_j + z_i z_j),   ν_j = e^{-ε_j (z_j - 1)} / z_j,
//! Z̃(Y) = ∫ dν_Y e^{-W(Y)},                 W(Y) = Σ_{{i,j} ⊂ Y} W_ij.
//! ```
//!
//! Every `W_ij` is even with zero scalar part, so exact exponentials apply.

use alloc::vec::Vec;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::graph::{members, VertexSet, WeightedGraph};
use crate::grassmann::{
    berezin, exp_even, series_apply, source_coupling, symmetric_product, Algebra, Element, Generator,
};
use crate::scalar::{binomial_general, rat, rational_to_f64, Rational, Scalar};
use crate::singlesite::{single_site_z, site_density, SingleSiteParams};

/// Inverse temperature and number of fermion pairs per site.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams<S> {
    pub beta: S,
    pub m: usize,
}

/// Horospherical field `t`, one finite entry per vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct TField {
    pub t: Vec<f64>,
}

/// `z_j = √(1 + ψ_j·ψ_j)`.
pub fn z_element<S: Scalar>(algebra: Algebra, j: usize) -> Result<Element<S>> {
    binomial_series(algebra, j, &rat(1, 2))
}

/// `1 / z_j`.
pub fn inv_z_element<S: Scalar>(algebra: Algebra, j: usize) -> Result<Element<S>> {
    binomial_series(algebra, j, &rat(-1, 2))
}

fn binomial_series<S: Scalar>(algebra: Algebra, j: usize, r: &Rational) -> Result<Element<S>> {
    let x = symmetric_product(algebra, j, j)?;
    let coeffs: Vec<S> = (0..=algebra.m() as u32).map(|k| S::from_rational(&binomial_general(r, k))).collect();
    series_apply(&coeffs, &x)
}

/// Model objects on one graph: site elements and per-edge Gibbs factors.
#[derive(Clone, Debug)]
pub struct Model<S: Scalar> {
    graph: WeightedGraph,
    params: ModelParams<S>,
    algebra: Algebra,
    z: Vec<Element<S>>,
    nu: Vec<Element<S>>,
    /// `(i, j, W_ij, e^{-W_ij})` for every edge.
    edges: Vec<(usize, usize, Element<S>, Element<S>)>,
    single_site: Vec<S>,
}

impl<S: Scalar> Model<S> {
    pub fn new(graph: &WeightedGraph, params: &ModelParams<S>) -> Result<Self> {
        if params.m == 0 {
            return Err(Error::InvalidInput("the model needs m >= 1".into()));
        }
        let algebra = Algebra::new(graph.num_vertices(), params.m, false)?;
        Self::with_algebra(graph, params, algebra)
    }

    /// Same model inside a larger context (e.g. one with sources).
    pub fn with_algebra(graph: &WeightedGraph, params: &ModelParams<S>, algebra: Algebra) -> Result<Self> {
        if algebra.num_sites() != graph.num_vertices() || algebra.m() != params.m {
            return Err(Error::ContextMismatch);
        }
        let n = graph.num_vertices();
        let mut z = Vec::with_capacity(n);
        let mut nu = Vec::with_capacity(n);
        let mut single_site = Vec::with_capacity(n);
        for j in 0..n {
            let eps = S::from_rational(graph.eps(j));
            z.push(z_element(algebra, j)?);
            nu.push(site_density(algebra, j, &eps)?);
            single_site.push(single_site_z(&SingleSiteParams { m: params.m, eps }));
        }
        let mut edges = Vec::with_capacity(graph.edges().len());
        for (i, j, w) in graph.edges() {
            let coupling = params.beta.clone() * S::from_rational(w);
            if coupling.is_zero() {
                continue;
            }
            let zz = &z[*i] * &z[*j];
            let dot = symmetric_product(algebra, *i, *j)?;
            let inner = &(&zz - &Element::one(algebra)) - &dot;
            let w_ij = inner.scale(&coupling);
            let gibbs = exp_even(&-&w_ij)?;
            edges.push((*i, *j, w_ij, gibbs));
        }
        Ok(Model { graph: graph.clone(), params: params.clone(), algebra, z, nu, edges, single_site })
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    pub fn params(&self) -> &ModelParams<S> {
        &self.params
    }

    pub fn algebra(&self) -> Algebra {
        self.algebra
    }

    pub fn z(&self, j: usize) -> &Element<S> {
        &self.z[j]
    }

    pub fn nu(&self, j: usize) -> &Element<S> {
        &self.nu[j]
    }

    /// `Z̃_{ε_j, m}` of vertex `j`.
    pub fn single_site_z(&self, j: usize) -> &S {
        &self.single_site[j]
    }

    /// `Π_{j ∈ Y} Z̃_{ε_j, m}`.
    pub fn single_site_product(&self, set: VertexSet) -> S {
        members(set).into_iter().fold(S::one(), |acc, j| acc * self.single_site[j].clone())
    }

    fn edges_in(&self, set: VertexSet) -> impl Iterator<Item = &(usize, usize, Element<S>, Element<S>)> {
        self.edges.iter().filter(move |(i, j, _, _)| set >> i & 1 == 1 && set >> j & 1 == 1)
    }

    /// `W(Y)`.
    pub fn w(&self, set: VertexSet) -> Element<S> {
        self.edges_in(set).fold(Element::zero(self.algebra), |acc, e| &acc + &e.2)
    }

    /// `e^{-W(Y)}`, built as the product of the commuting edge factors.
    pub fn gibbs(&self, set: VertexSet) -> Element<S> {
        self.edges_in(set).fold(Element::one(self.algebra), |acc, e| &acc * &e.3)
    }

    /// Product of `e^{-W_vu}` over `u ∈ set`: the factors that attach `v` to
    /// `set`.
    pub fn gibbs_star(&self, v: usize, set: VertexSet) -> Element<S> {
        self.edges
            .iter()
            .filter(|(i, j, _, _)| (*i == v && set >> j & 1 == 1) || (*j == v && set >> i & 1 == 1))
            .fold(Element::one(self.algebra), |acc, e| &acc * &e.3)
    }

    /// `ν^Y = Π_{j ∈ Y} ν_j`.
    pub fn nu_product(&self, set: VertexSet) -> Element<S> {
        members(set).into_iter().fold(Element::one(self.algebra), |acc, j| &acc * &self.nu[j])
    }

    /// `∫ dν_Y e^{-W(Y)} extra`, integrating one site at a time so that
    /// intermediate elements stay local. `extra` must be even.
    pub fn integrate(&self, set: VertexSet, extra: Option<&Element<S>>) -> Result<Element<S>> {
        let mut factors: Vec<Element<S>> = self.edges_in(set).map(|e| e.3.clone()).collect();
        if let Some(x) = extra {
            if !x.is_even() {
                return Err(Error::Domain("inserted observable must be even".into()));
            }
            factors.push(x.clone());
        }
        for s in members(set) {
            let mask = self.algebra.site_mask(s);
            let (touch, mut rest): (Vec<_>, Vec<_>) =
                factors.into_iter().partition(|f| !f.support().is_disjoint(mask));
            let prod = touch.iter().fold(self.nu[s].clone(), |acc, f| &acc * f);
            rest.push(berezin(&prod, &[s])?);
            factors = rest;
        }
        Ok(factors.iter().fold(Element::one(self.algebra), |acc, f| &acc * f))
    }

    /// `Z̃(Y) = ∫ dν_Y e^{-W(Y)}`.
    pub fn partition_function_on(&self, set: VertexSet) -> Result<S> {
        Ok(self.integrate(set, None)?.scalar_part())
    }

    pub fn partition_function(&self) -> Result<S> {
        self.partition_function_on(self.graph.all_vertices())
    }

    /// `ψ̄_{i0,α} ψ_{j0,α}`.
    pub fn observable(&self, i0: usize, j0: usize, alpha: usize) -> Result<Element<S>> {
        Element::product_of(self.algebra, &[Generator::psibar(i0, alpha), Generator::psi(j0, alpha)], S::one())
    }

    /// `∫ dν_Y e^{-W(Y)} ψ̄_{i0,α} ψ_{j0,α}`.
    pub fn observable_integral(&self, set: VertexSet, i0: usize, j0: usize, alpha: usize) -> Result<S> {
        if set >> i0 & 1 == 0 || set >> j0 & 1 == 0 {
            return Ok(S::zero());
        }
        let obs = self.observable(i0, j0, alpha)?;
        Ok(self.integrate(set, Some(&obs))?.scalar_part())
    }

    /// `⟨ψ̄_{i0,α} ψ_{j0,α}⟩ = ∫ dν e^{-W} ψ̄_{i0,α} ψ_{j0,α} / Z̃`.
    pub fn two_point(&self, i0: usize, j0: usize, alpha: usize) -> Result<S> {
        self.check_site(i0)?;
        self.check_site(j0)?;
        if alpha == 0 || alpha > self.params.m {
            return Err(Error::InvalidInput(alloc::format!("color {} outside 1..={}", alpha, self.params.m)));
        }
        let all = self.graph.all_vertices();
        let z = self.partition_function_on(all)?;
        let num = self.observable_integral(all, i0, j0, alpha)?;
        num.checked_div(&z).ok_or(Error::DegenerateNormalisation)
    }

    fn check_site(&self, j: usize) -> Result<()> {
        if j >= self.graph.num_vertices() {
            return Err(Error::InvalidInput(alloc::format!("vertex {} outside the graph", j)));
        }
        Ok(())
    }
}

/// `W(Y)` on `g`.
pub fn build_w<S: Scalar>(g: &WeightedGraph, p: &ModelParams<S>, set: VertexSet) -> Result<Element<S>> {
    Ok(Model::new(g, p)?.w(set))
}

/// `ν_j` in the single-site algebra context of `p.m` colors.
pub fn build_nu<S: Scalar>(algebra: Algebra, j: usize, eps: &S) -> Result<Element<S>> {
    site_density(algebra, j, eps)
}

pub fn partition_function<S: Scalar>(g: &WeightedGraph, p: &ModelParams<S>) -> Result<S> {
    Model::new(g, p)?.partition_function()
}

pub fn two_point<S: Scalar>(g: &WeightedGraph, p: &ModelParams<S>, i0: usize, j0: usize, alpha: usize) -> Result<S> {
    Model::new(g, p)?.two_point(i0, j0, alpha)
}

/// `Z̃(ρ) = ∫ dν e^{-W} e^{(ψ·ρ)}` with the source exponential truncated at
/// total `ρ`-degree `rho_degree`. The result lives in the source generators
/// of a context with sources enabled.
pub fn generating_function<S: Scalar>(g: &WeightedGraph, p: &ModelParams<S>, rho_degree: u32) -> Result<Element<S>> {
    let algebra = Algebra::new(g.num_vertices(), p.m, true)?;
    let model = Model::with_algebra(g, p, algebra)?;
    let sources = algebra.source_mask();
    let mut coupling = Element::zero(algebra);
    for j in 0..g.num_vertices() {
        coupling = &coupling + &source_coupling(algebra, j)?;
    }
    // truncated e^{ψ·ρ}: each power of the coupling raises the ρ-degree by one
    let mut source_exp = Element::one(algebra);
    let mut power = Element::one(algebra);
    let mut factorial = S::one();
    for k in 1..=rho_degree {
        power = power.try_mul_truncated(&coupling, sources, rho_degree)?;
        factorial = factorial * S::from_i64(i64::from(k));
        let inv = S::one().checked_div(&factorial).expect("k! is nonzero");
        source_exp = &source_exp + &power.scale(&inv);
    }
    model.integrate(g.all_vertices(), Some(&source_exp))
}

/// `ln Z̃(ρ) - ln Z̃(0)` truncated at `ρ`-degree 2.
pub fn log_generating_function<S: Scalar>(g: &WeightedGraph, p: &ModelParams<S>) -> Result<Element<S>> {
    let zr = generating_function(g, p, 2)?;
    let z0 = zr.scalar_part();
    let inv = S::one().checked_div(&z0).ok_or(Error::DegenerateNormalisation)?;
    let u = zr.without_scalar_part().scale(&inv);
    let sources = zr.algebra().source_mask();
    let u2 = u.try_mul_truncated(&u, sources, 2)?;
    let half = S::from_rational(&rat(1, 2));
    Ok(&u - &u2.scale(&half))
}

/// Two-point function read off the source expansion: the coefficient of the
/// ordered monomial `ρ_{i0,α} ρ̄_{j0,α}` in `ln Z̃(ρ)`.
pub fn two_point_from_sources<S: Scalar>(
    g: &WeightedGraph,
    p: &ModelParams<S>,
    i0: usize,
    j0: usize,
    alpha: usize,
) -> Result<S> {
    let log = log_generating_function(g, p)?;
    log.coefficient_of(&[Generator::rho(i0, alpha), Generator::rhobar(j0, alpha)])
}

/// `D_ij = -β J_ij` (i ≠ j), `D_jj = β Σ_i J_ij e^{t_i - t_j} + ε_j e^{-t_j}`.
pub fn build_d_matrix(g: &WeightedGraph, beta: f64, t: &TField) -> Result<DMatrix<f64>> {
    let n = g.num_vertices();
    if t.t.len() != n || t.t.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("t-field needs one finite value per vertex".into()));
    }
    let mut d = DMatrix::zeros(n, n);
    for (i, j, w) in g.edges() {
        let bj = beta * rational_to_f64(w);
        d[(*i, *j)] = -bj;
        d[(*j, *i)] = -bj;
        d[(*j, *j)] += bj * libm_exp(t.t[*i] - t.t[*j]);
        d[(*i, *i)] += bj * libm_exp(t.t[*j] - t.t[*i]);
    }
    for j in 0..n {
        d[(j, j)] += rational_to_f64(g.eps(j)) * libm_exp(-t.t[j]);
    }
    Ok(d)
}

fn libm_exp(x: f64) -> f64 {
    num_traits::Float::exp(x)
}

/// Spectral data of `D` used by the positivity check.
#[derive(Clone, Debug, PartialEq)]
pub struct DPositivity {
    /// Smallest eigenvalue of `D` itself (symmetric by construction).
    pub min_eigenvalue: f64,
    /// Smallest eigenvalue of the congruent matrix `e^{t} D e^{t}`, a
    /// weighted Laplacian plus a positive diagonal when `ε > 0`.
    pub min_eigenvalue_congruent: f64,
    /// Smallest eigenvalue of the symmetric part of `e^{t/2} D e^{-t/2}`.
    /// Reported only; it is not guaranteed positive for large `t` gradients.
    pub min_eigenvalue_conjugated: f64,
}

impl DPositivity {
    pub fn is_positive(&self, tolerance: f64) -> bool {
        self.min_eigenvalue > tolerance && self.min_eigenvalue_congruent > tolerance
    }
}

pub fn d_matrix_positivity(d: &DMatrix<f64>, t: &TField) -> DPositivity {
    let n = d.nrows();
    let min_eig = |m: DMatrix<f64>| SymmetricEigen::new(m).eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    let sym = (d + d.transpose()) * 0.5;
    let congruent = DMatrix::from_fn(n, n, |i, j| libm_exp(t.t[i]) * d[(i, j)] * libm_exp(t.t[j]));
    let conj = DMatrix::from_fn(n, n, |i, j| libm_exp(0.5 * (t.t[i] - t.t[j])) * d[(i, j)]);
    let conj_sym = (&conj + conj.transpose()) * 0.5;
    DPositivity {
        min_eigenvalue: min_eig(sym),
        min_eigenvalue_congruent: min_eig(congruent),
        min_eigenvalue_conjugated: min_eig(conj_sym),
    }
}

/// Vertex `j`'s one-site observable integral `∫ dν_j ψ̄_{j,α} ψ_{j,α}`.
pub fn single_site_two_point<S: Scalar>(m: usize, eps: &S) -> Result<S> {
    let algebra = Algebra::new(1, m, false)?;
    let nu = site_density(algebra, 0, eps)?;
    let obs = Element::product_of(algebra, &[Generator::psibar(0, 1), Generator::psi(0, 1)], S::one())?;
    let z = single_site_z(&SingleSiteParams { m, eps: eps.clone() });
    let num = berezin(&(&nu * &obs), &[0])?.scalar_part();
    num.checked_div(&z).ok_or(Error::DegenerateNormalisation)
}

/// `⟨ψ̄_{i0,α} ψ_{j0,α}⟩` for every color `α = 1..=m`.
pub fn two_point_all_colors<S: Scalar>(model: &Model<S>, i0: usize, j0: usize) -> Result<Vec<S>> {
    let mut out = Vec::with_capacity(model.params().m);
    for alpha in 1..=model.params().m {
        out.push(model.two_point(i0, j0, alpha)?);
    }
    Ok(out)
}
