//! Decay certificates built from tree-graph estimates, measured activity
//! constants and the edge-level norm estimates behind them.
//!
//! All constants are inputs. Series are summed in log space and truncated
//! once a geometric tail certificate drops below `1e-30` of the partial sum
//! (`1e-12` for lattice sums);
//! reported values always include that tail, so they are upper bounds.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

// no_std float math; std's inherent methods take over when std is linked
#[allow(unused_imports)]
use num_traits::Float;

use crate::cluster::activities_by_inversion;
use crate::error::{Error, Result};
use crate::forests::kirchhoff_tree_sum;
use crate::graph::{VertexSet, WeightedGraph};
use crate::grassmann::{exp_even, l1_norm, symmetric_product, Algebra, Element};
use crate::model::{z_element, Model, ModelParams};
use crate::scalar::{big, factorial, int, pow, rational_to_f64, Rational, Scalar};
use crate::singlesite::{pinning_weight, single_site_z, SingleSiteParams};

const RELATIVE_CUTOFF: f64 = 1e-30;
const MAX_TERMS: u32 = 1_000_000;
const LATTICE_CUTOFF: f64 = 1e-12;

/// Distance used by exponentially decaying couplings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Metric {
    /// `|i - j|`.
    Euclidean,
    /// `ln(1 + |i - j|)`.
    Log,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum InteractionKind {
    NearestNeighbour,
    /// `J_ij ≤ e^{-rate·dist(i,j)}`.
    Exponential { rate: f64, metric: Metric },
    /// `J_ij ≤ (1 + |i - j|)^{-exponent}`.
    Polynomial { exponent: f64 },
}

/// Coupling class on `Z^d`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InteractionClass {
    pub kind: InteractionKind,
    pub dim: u32,
}

/// Constants a bound was evaluated with.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Constants {
    /// Activity constant `C` in `C (Cβm)^{N-1}`.
    pub c: f64,
    /// Rate constant for the `(C_0 βm)^{dist}` comparison, when supplied.
    pub c0: Option<f64>,
    /// Per-vertex lattice factor: `2d`, the summability constant, or the
    /// larger of the polynomial sum and convolution constants.
    pub lattice_factor: f64,
}

/// `𝒜`, `ℬ` and `𝒜 Σ_N ℬ^{N-1}` for one interaction class.
#[derive(Clone, Debug, PartialEq)]
pub struct DecayBoundReport {
    pub class: InteractionClass,
    pub beta: f64,
    pub m: usize,
    pub dist: f64,
    pub a_value: f64,
    pub b_value: f64,
    /// `None` unless `convergent`.
    pub bound: Option<f64>,
    pub convergent: bool,
    /// Tail certificates already included in `a_value` and `b_value`.
    pub truncation_tail: f64,
    pub constants: Constants,
    /// `(C_0 βm)^{dist}` when `C_0` is given.
    pub scaling: Option<f64>,
}

/// Value of `Σ_{N ≥ start} c (cβm)^{N-1} N^{N-2} / max(N-2, 0)! g^{N-shift}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TreeSeries {
    /// Partial sum plus tail; infinite when divergent.
    pub value: f64,
    pub tail: f64,
    pub convergent: bool,
    pub terms: u32,
}

fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|k| f64::from(k).ln()).sum()
}

fn tree_term(c: f64, cbm: f64, g: f64, shift: u32, n: u32) -> f64 {
    if n == 1 {
        return c * g.powi(1 - shift as i32);
    }
    if cbm == 0.0 || g == 0.0 {
        return 0.0;
    }
    let nf = f64::from(n);
    let ln = c.ln()
        + f64::from(n - 1) * cbm.ln()
        + (nf - 2.0) * nf.ln()
        - ln_factorial(n - 2)
        + (f64::from(n) - f64::from(shift)) * g.ln();
    ln.exp()
}

/// Sums the tree series. Term ratios are at most `x e N/(N-1)` with
/// `x = cβm·g`, so the series converges iff `x e < 1`.
pub fn tree_series(c: f64, cbm: f64, g: f64, shift: u32, start: u32) -> TreeSeries {
    let start = start.max(1);
    let x = cbm * g;
    if x * core::f64::consts::E >= 1.0 {
        return TreeSeries { value: f64::INFINITY, tail: f64::INFINITY, convergent: false, terms: 0 };
    }
    let mut sum = 0.0;
    let mut n = start;
    loop {
        let term = tree_term(c, cbm, g, shift, n);
        sum += term;
        let terms = n - start + 1;
        if term == 0.0 && n >= 2 {
            return TreeSeries { value: sum, tail: 0.0, convergent: true, terms };
        }
        if n >= 3 {
            let nf = f64::from(n);
            let r = x * core::f64::consts::E * nf / (nf - 1.0);
            if r < 1.0 {
                let tail = term * r / (1.0 - r);
                if tail <= RELATIVE_CUTOFF * sum || terms >= MAX_TERMS {
                    return TreeSeries { value: sum + tail, tail, convergent: true, terms };
                }
            }
        }
        n += 1;
    }
}

fn assemble(
    class: InteractionClass,
    beta: f64,
    m: usize,
    dist: f64,
    constants: Constants,
    prefactor: f64,
    a: TreeSeries,
    b: TreeSeries,
) -> DecayBoundReport {
    let a_value = prefactor * a.value;
    let convergent = a.convergent && b.convergent && b.value < 1.0;
    let bound = if convergent { Some(a_value / (1.0 - b.value)) } else { None };
    let scaling = constants.c0.map(|c0| (c0 * beta * m as f64).powf(dist));
    DecayBoundReport {
        class,
        beta,
        m,
        dist,
        a_value,
        b_value: b.value,
        bound,
        convergent,
        truncation_tail: prefactor * a.tail + b.tail,
        constants,
        scaling,
    }
}

fn check_inputs(beta: f64, m: usize, c: f64) -> Result<()> {
    if !(beta >= 0.0 && beta.is_finite()) || m == 0 || !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidInput("need beta >= 0, m >= 1 and C > 0".into()));
    }
    Ok(())
}

/// Nearest-neighbour couplings on `Z^d`:
/// `𝒜 ≤ Σ_{N ≥ dist+1} C (Cβm)^{N-1} N^{N-2} (2d)^N / max(N-2,0)!`, and `ℬ`
/// the same sum from `N = 2`.
pub fn nn_decay_bound(beta: f64, m: usize, d: u32, dist: u32, c: f64, c0: Option<f64>) -> Result<DecayBoundReport> {
    check_inputs(beta, m, c)?;
    if d == 0 {
        return Err(Error::InvalidInput("dimension must be positive".into()));
    }
    let g = 2.0 * f64::from(d);
    let cbm = c * beta * m as f64;
    let a = tree_series(c, cbm, g, 0, dist + 1);
    let b = tree_series(c, cbm, g, 0, 2);
    let class = InteractionClass { kind: InteractionKind::NearestNeighbour, dim: d };
    Ok(assemble(class, beta, m, f64::from(dist), Constants { c, c0, lattice_factor: g }, 1.0, a, b))
}

/// Lattice sum with a certified tail.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LatticeSum {
    /// Upper bound: truncated sum plus tail.
    pub value: f64,
    pub tail: f64,
    pub radius: u32,
}

fn shell_count(k: u32, d: u32) -> f64 {
    if k == 0 {
        1.0
    } else {
        let k = f64::from(k);
        (2.0 * k + 1.0).powi(d as i32) - (2.0 * k - 1.0).powi(d as i32)
    }
}

/// `Σ_{x ∈ Z^d} h(|x|)` for decreasing `h`, with `|x| ≥ |x|_∞` bounding
/// each sup-norm shell. `tail(R)` must bound the shells beyond `R`.
fn shell_sum(d: u32, h: impl Fn(f64) -> f64, tail: impl Fn(u32) -> Option<f64>) -> LatticeSum {
    let mut sum = 0.0;
    let mut k = 0;
    loop {
        sum += shell_count(k, d) * h(f64::from(k));
        if k >= 4 {
            if let Some(t) = tail(k) {
                if t <= LATTICE_CUTOFF * sum || k >= 1 << 20 {
                    // one rounding error per accumulated shell
                    let t = t + f64::from(k + 1) * f64::EPSILON * sum;
                    return LatticeSum { value: sum + t, tail: t, radius: k };
                }
            }
        }
        k += 1;
    }
}

/// `sup_i Σ_j e^{-(a/2) dist(i,j)}` on `Z^d`; `None` when not summable.
pub fn exp_summability(rate: f64, metric: Metric, d: u32) -> Option<LatticeSum> {
    if !(rate > 0.0) || d == 0 {
        return None;
    }
    let half = rate / 2.0;
    let df = f64::from(d);
    // shell k has at most d 2^d (k+1)^{d-1} points
    match metric {
        Metric::Euclidean => {
            let h = move |k: f64| (-half * k).exp();
            let tail = move |r: u32| {
                let ratio = ((f64::from(r) + 3.0) / (f64::from(r) + 2.0)).powf(df - 1.0) * (-half).exp();
                if ratio >= 1.0 {
                    return None;
                }
                let first = df * 2f64.powf(df) * (f64::from(r) + 2.0).powf(df - 1.0) * h(f64::from(r) + 1.0);
                Some(first / (1.0 - ratio))
            };
            Some(shell_sum(d, h, tail))
        }
        Metric::Log => polynomial_sum(half, d),
    }
}

/// `Σ_{x ∈ Z^d} (1 + |x|)^{-a}`; `None` unless `a > d`.
pub fn polynomial_sum(a: f64, d: u32) -> Option<LatticeSum> {
    let df = f64::from(d);
    if !(a > df) {
        return None;
    }
    let h = move |k: f64| (1.0 + k).powf(-a);
    let tail = move |r: u32| Some(df * 2f64.powf(df) * (f64::from(r) + 1.0).powf(df - a) / (a - df));
    Some(shell_sum(d, h, tail))
}

/// Rigorous convolution constant
/// `sup_{x,z} Σ_y f(x-y) f(y-z) / f(x-z) ≤ 2^{a+1} Σ_y f(y)` for
/// `f(x) = (1 + |x|)^{-a}`.
pub fn convolution_constant(a: f64, d: u32) -> Option<f64> {
    polynomial_sum(a, d).map(|s| 2f64.powf(a + 1.0) * s.value)
}

/// Measured `max_{0 ≤ z ≤ R} Σ_{|y| ≤ 4R} f(y) f(y - z) / f(z)` on `Z^1`.
/// A lower estimate of the supremum, reported next to the rigorous constant.
pub fn convolution_ratio_1d(a: f64, radius: u32) -> f64 {
    let f = |x: i64| (1.0 + x.unsigned_abs() as f64).powf(-a);
    let span = 4 * i64::from(radius);
    (0..=i64::from(radius))
        .map(|z| (-span..=span).map(|y| f(y) * f(y - z)).sum::<f64>() / f(z))
        .fold(0.0, f64::max)
}

/// Exponentially decaying couplings: the summability constant `S` replaces
/// `2d`, and `e^{-(a/2) dist}` is extracted from the tree length.
pub fn exp_decay_bound(
    beta: f64,
    m: usize,
    rate: f64,
    metric: Metric,
    d: u32,
    dist: f64,
    c: f64,
) -> Result<DecayBoundReport> {
    check_inputs(beta, m, c)?;
    if !(dist >= 0.0) {
        return Err(Error::InvalidInput("distance must be nonnegative".into()));
    }
    let s = exp_summability(rate, metric, d)
        .ok_or_else(|| Error::Domain("couplings are not summable with half the decay rate".into()))?;
    let l0 = if dist > 0.0 { 2 } else { 1 };
    let cbm = c * beta * m as f64;
    let a = tree_series(c, cbm, s.value, l0, l0);
    let b = tree_series(c, cbm, s.value, 1, 2);
    let prefactor = (-rate / 2.0 * dist).exp();
    let class = InteractionClass { kind: InteractionKind::Exponential { rate, metric }, dim: d };
    let constants = Constants { c, c0: None, lattice_factor: s.value };
    let mut report = assemble(class, beta, m, dist, constants, prefactor, a, b);
    report.truncation_tail += s.tail;
    Ok(report)
}

/// Polynomially decaying couplings, `a > d`: free tree vertices cost the
/// coupling sum, intermediate path vertices the convolution constant.
pub fn poly_decay_bound(beta: f64, m: usize, a: f64, d: u32, dist: f64, c: f64) -> Result<DecayBoundReport> {
    check_inputs(beta, m, c)?;
    if !(dist >= 0.0) {
        return Err(Error::InvalidInput("distance must be nonnegative".into()));
    }
    let sum = polynomial_sum(a, d).ok_or_else(|| Error::Domain("polynomial decay needs a > d".into()))?;
    let conv = 2f64.powf(a + 1.0) * sum.value;
    let factor = sum.value.max(conv);
    let l0 = if dist > 0.0 { 2 } else { 1 };
    let cbm = c * beta * m as f64;
    let series_a = tree_series(c, cbm, factor, l0, l0);
    let series_b = tree_series(c, cbm, sum.value, 1, 2);
    let prefactor = (1.0 + dist).powf(-a);
    let class = InteractionClass { kind: InteractionKind::Polynomial { exponent: a }, dim: d };
    let constants = Constants { c, c0: None, lattice_factor: factor };
    let mut report = assemble(class, beta, m, dist, constants, prefactor, series_a, series_b);
    report.truncation_tail += sum.tail;
    Ok(report)
}

/// Outcome of comparing exact activities with `(βm)^{|Y|-1}` times the
/// weighted spanning-tree sum.
#[derive(Clone, Debug, PartialEq)]
pub struct ActivityBoundReport {
    /// `max_Y (|K(Y)| / ((βm)^{|Y|-1} Σ_T Π J))^{1/|Y|}` over `K` and `K_{i0 j0}`.
    pub c_emp: f64,
    pub c_probe: f64,
    /// Polymer attaining `c_emp`.
    pub worst: Option<VertexSet>,
    /// Polymers with nonzero activity but vanishing tree sum.
    pub counterexamples: Vec<VertexSet>,
    pub polymers_checked: usize,
}

impl ActivityBoundReport {
    pub fn passes(&self) -> bool {
        self.counterexamples.is_empty() && self.c_emp <= self.c_probe
    }
}

/// Exhaustive check over polymers with `|Y| ≤ y_max`, source activities for
/// every ordered pair at color 1.
pub fn activity_bound_check(
    g: &WeightedGraph,
    p: &ModelParams<Rational>,
    y_max: usize,
    c_probe: f64,
) -> Result<ActivityBoundReport> {
    let n = g.num_vertices();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    activity_bound_check_pairs(g, p, y_max, c_probe, &pairs)
}

/// As [`activity_bound_check`], restricted to the given source pairs.
pub fn activity_bound_check_pairs(
    g: &WeightedGraph,
    p: &ModelParams<Rational>,
    y_max: usize,
    c_probe: f64,
    pairs: &[(usize, usize)],
) -> Result<ActivityBoundReport> {
    let bm = &p.beta * int(p.m as i64);
    if bm > int(1) {
        return Err(Error::Domain("activity bounds assume beta m <= 1".into()));
    }
    let model = Model::new(g, p)?;
    let table = activities_by_inversion(&model, pairs, 1)?;
    let mut report = ActivityBoundReport {
        c_emp: 0.0,
        c_probe,
        worst: None,
        counterexamples: Vec::new(),
        polymers_checked: 0,
    };
    let entries = table.k.iter().map(|(s, v)| (*s, v)).chain(table.k2.iter().map(|((s, ..), v)| (*s, v)));
    let mut trees: alloc::collections::BTreeMap<VertexSet, Rational> = alloc::collections::BTreeMap::new();
    for (set, value) in entries {
        let size = set.count_ones() as usize;
        if size > y_max {
            continue;
        }
        report.polymers_checked += 1;
        if value.is_zero() {
            continue;
        }
        let tree = match trees.get(&set) {
            Some(t) => t.clone(),
            None => {
                let t = kirchhoff_tree_sum(g, set)?;
                trees.insert(set, t.clone());
                t
            }
        };
        let denom = pow(&bm, size as u32 - 1) * tree;
        if denom.is_zero() {
            report.counterexamples.push(set);
            continue;
        }
        let ratio = rational_to_f64(&(value.abs() / denom)).powf(1.0 / size as f64);
        if ratio > report.c_emp {
            report.c_emp = ratio;
            report.worst = Some(set);
        }
    }
    report.counterexamples.sort_unstable();
    report.counterexamples.dedup();
    Ok(report)
}

/// One inequality `lhs ≤ rhs` between exact rationals: `lhs` is an upper
/// bound of the norm, `rhs` a lower bound of the estimate.
#[derive(Clone, Debug, PartialEq)]
pub struct NormCheck {
    pub name: String,
    pub edge: (usize, usize),
    pub s: Rational,
    pub lhs: Rational,
    pub rhs: Rational,
}

impl NormCheck {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EdgeNormReport {
    /// `C = 2 (1 + sup_l Σ_l' J_ll')`.
    pub constant: Rational,
    /// `‖A_ll'‖` from the engine, per edge.
    pub a_norms: Vec<((usize, usize), Rational)>,
    pub checks: Vec<NormCheck>,
}

impl EdgeNormReport {
    pub fn holds(&self) -> bool {
        self.checks.iter().all(NormCheck::holds)
    }
}

/// `Σ_{k ≤ order} q^k / k!`, a lower bound of `e^q` for `q ≥ 0`.
pub fn exp_lower(q: &Rational, order: u32) -> Rational {
    let mut term = int(1);
    let mut sum = int(1);
    for k in 1..=order {
        term = term * q / int(i64::from(k));
        sum += &term;
    }
    sum
}

const EXP_ORDER: u32 = 24;
const SERIES_ORDER: u32 = 8;

/// Norm of the truncated series `Σ_{k=k0}^{K} c^{2k} w^k / (2k+odd)!` plus a
/// bound on the remainder using `‖w‖ ≤ (1+2m)^2`.
fn series_norm_upper(w: &Element<Rational>, c: &Rational, m: usize, odd: bool) -> Rational {
    let k0 = if odd { 0 } else { 1 };
    let shift = u32::from(odd);
    let c2 = c * c;
    let mut acc = Element::zero(w.algebra());
    let mut power = if odd { Element::one(w.algebra()) } else { w.clone() };
    for k in k0..=SERIES_ORDER {
        let coeff = pow(&c2, k) / big(factorial(2 * k + shift));
        acc = &acc + &power.scale(&coeff);
        power = &power * w;
    }
    let q = &c2 * pow(&int(1 + 2 * m as i64), 2);
    let next = SERIES_ORDER + 1;
    let first = pow(&q, next) / big(factorial(2 * next + shift));
    let ratio = &q / int(i64::from((2 * next + shift + 1) * (2 * next + shift + 2)));
    let tail = if ratio < int(1) { first / (int(1) - ratio) } else { first * int(1 << 20) };
    l1_norm(&acc) + tail
}

/// Checks, per edge and interpolation parameter `s`, the norm estimates
/// `‖A‖ ≤ 3mβ`, `‖G‖ ≤ e^{2Cmβ}`, `‖B⁰‖ ≤ 3mβJ e^{Cmβ}`, `‖B¹‖ ≤ J e^{Cmβ}`
/// and `‖z_l z_l' ν_l ν_l'‖ ≤ C² Z̃_l Z̃_l'`.
pub fn verify_edge_norm_estimates(
    g: &WeightedGraph,
    beta: &Rational,
    m: usize,
    s_grid: &[Rational],
) -> Result<EdgeNormReport> {
    if m == 0 || *beta < int(0) {
        return Err(Error::InvalidInput("need m >= 1 and beta >= 0".into()));
    }
    let constant = int(2) * (int(1) + g.max_degree_weight());
    let algebra = Algebra::new(2, m, false)?;
    let mf = int(m as i64);
    let cmb = &constant * &mf * beta;
    let e_cmb = exp_lower(&cmb, EXP_ORDER);
    let mut report = EdgeNormReport { constant: constant.clone(), a_norms: Vec::new(), checks: Vec::new() };
    let dot: Element<Rational> = symmetric_product(algebra, 0, 1)?;
    let one = Element::one(algebra);
    let a = (&one + &dot).scale(&-beta.clone());
    let a_norm = l1_norm(&a);
    let z0: Element<Rational> = z_element(algebra, 0)?;
    let z1: Element<Rational> = z_element(algebra, 1)?;
    let w = &(&z0 * &z0) * &(&z1 * &z1);
    for (l, lp, j) in g.edges() {
        let edge = (*l, *lp);
        report.a_norms.push((edge, a_norm.clone()));
        let mut push = |name: &str, s: &Rational, lhs: Rational, rhs: Rational| {
            report.checks.push(NormCheck { name: name.into(), edge, s: s.clone(), lhs, rhs });
        };
        push("norm_a", &int(0), a_norm.clone(), int(3) * &mf * beta);
        for s in s_grid {
            let c = s * beta * j;
            // G = e^{sβJ} exp(sβJ ψ_l·ψ_l')
            let g_norm = l1_norm(&exp_even(&dot.scale(&c))?);
            let margin = int(2) * &cmb - &c;
            push("norm_g", s, g_norm, exp_lower(&margin, EXP_ORDER));
            let b0 = series_norm_upper(&w, &c, m, false);
            push("norm_b0", s, b0, int(3) * &mf * beta * j * &e_cmb);
            let b1 = s * j * series_norm_upper(&w, &c, m, true);
            push("norm_b1", s, b1, j.clone() * &e_cmb);
        }
        let eps_l = g.eps(*l).clone();
        let eps_lp = g.eps(*lp).clone();
        let pin = &pinning_weight(algebra, 0, &eps_l)? * &pinning_weight(algebra, 1, &eps_lp)?;
        let zl = single_site_z(&SingleSiteParams { m, eps: eps_l });
        let zlp = single_site_z(&SingleSiteParams { m, eps: eps_lp });
        push("norm_spurious", &int(0), l1_norm(&pin), &constant * &constant * zl * zlp);
    }
    Ok(report)
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(points: &[(f64, f64)]) -> Option<f64> {
    let n = points.len() as f64;
    if points.len() < 2 {
        return None;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        None
    } else {
        Some(sxy / sxx)
    }
}

/// `|⟨ψ̄_{i0} ψ_j⟩|` for every `j`, color 1, exact.
pub fn two_point_profile(g: &WeightedGraph, p: &ModelParams<Rational>, i0: usize) -> Result<Vec<Rational>> {
    let model = Model::new(g, p)?;
    let mut out = vec![int(0); g.num_vertices()];
    for (j, slot) in out.iter_mut().enumerate() {
        *slot = model.two_point(i0, j, 1)?.abs();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn zero_beta_gives_zero_off_diagonal() {
        let r = nn_decay_bound(0.0, 1, 1, 3, core::f64::consts::E, None).unwrap();
        assert_eq!(r.bound, Some(0.0));
        let r0 = nn_decay_bound(0.0, 1, 1, 0, core::f64::consts::E, None).unwrap();
        assert!(r0.bound.unwrap() > 0.0);
    }

    #[test]
    fn tree_series_against_direct_sum() {
        let (c, cbm, g) = (2.0, 0.01, 2.0);
        let s = tree_series(c, cbm, g, 0, 2);
        let direct: f64 = (2..60).map(|n| tree_term(c, cbm, g, 0, n)).sum();
        assert!((s.value - direct).abs() <= 1e-12 * direct);
        assert!(s.value >= direct);
        assert!(!tree_series(c, 1.0, g, 0, 2).convergent);
    }

    #[test]
    fn divergent_parameters_flagged() {
        let r = nn_decay_bound(0.5, 2, 2, 1, core::f64::consts::E, None).unwrap();
        assert!(!r.convergent);
        assert!(r.bound.is_none());
    }

    #[test]
    fn lattice_sums() {
        // Σ_{x ∈ Z} e^{-|x|/2} = (1 + e^{-1/2}) / (1 - e^{-1/2})
        let q = (-0.5f64).exp();
        let s = exp_summability(1.0, Metric::Euclidean, 1).unwrap();
        assert!((s.value - (1.0 + q) / (1.0 - q)).abs() < 1e-12);
        assert!(polynomial_sum(1.0, 1).is_none());
        let p = polynomial_sum(3.0, 1).unwrap();
        // 2 ζ(3) - 1
        assert!((p.value - (2.0 * 1.202_056_903_159_594 - 1.0)).abs() < 1e-6);
        assert!(p.value >= 2.0 * 1.202_056_903_159_594 - 1.0);
    }

    #[test]
    fn convolution_ratio_is_below_rigorous_constant() {
        let measured = convolution_ratio_1d(2.0, 200);
        assert!(measured.is_finite() && measured > 1.0);
        assert!(measured <= convolution_constant(2.0, 1).unwrap());
    }

    #[test]
    fn exp_lower_bounds() {
        assert_eq!(exp_lower(&int(0), 10), int(1));
        assert!(rational_to_f64(&exp_lower(&rat(1, 2), 20)) <= 0.5f64.exp());
        assert!((rational_to_f64(&exp_lower(&int(1), 20)) - core::f64::consts::E).abs() < 1e-15);
    }

    #[test]
    fn edge_norms_on_one_edge() {
        let g = WeightedGraph::path(2).unwrap();
        let report = verify_edge_norm_estimates(&g, &rat(1, 10), 1, &[int(0), rat(1, 2), int(1)]).unwrap();
        assert!(report.holds(), "{:?}", report.checks.iter().filter(|c| !c.holds()).collect::<Vec<_>>());
        assert_eq!(report.a_norms[0].1, rat(3, 10));
        let at_zero: Vec<_> = report.checks.iter().filter(|c| c.s == int(0) && c.name.starts_with("norm_b")).collect();
        assert!(at_zero.iter().all(|c| c.lhs == int(0)));
    }

    #[test]
    fn slope_fit() {
        let pts = [(0.0, 1.0), (1.0, 3.0), (2.0, 5.0)];
        assert_eq!(fit_slope(&pts), Some(2.0));
        assert_eq!(fit_slope(&pts[..1]), None);
    }

    #[test]
    fn activity_check_at_zero_beta() {
        let g = WeightedGraph::path(3).unwrap();
        let r = activity_bound_check(&g, &ModelParams { beta: int(0), m: 1 }, 3, 10.0).unwrap();
        // only singleton source activities survive
        assert!(r.counterexamples.is_empty());
        assert!(r.passes());
    }
}
