//! Connected parts, polymer activities and the polymer-gas expansion of the
//! two-point function.
//!
//! Connected parts are defined by `e^{-W(Y)} = Σ_{Π part Y} Π_{B ∈ Π} conn(B)`
//! with `conn({j}) = 1`, and computed by anchoring the block that contains the
//! lowest vertex:
//!
//! ```text
//! conn(Y) = e^{-W(Y)} - Σ_{min Y ∈ S ⊊ Y} conn(S) e^{-W(Y \ S)}
//! ```

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use hashbrown::HashMap;

use crate::error::{Error, Result};
use crate::forests::kirchhoff_tree_sum;
use crate::graph::{members, VertexSet, WeightedGraph};
use crate::grassmann::{integrate_product, Element};
use crate::model::{single_site_two_point, Model};
use crate::scalar::{big, factorial, int, Rational, Scalar};

/// Proper nonempty subsets of `set` that contain its lowest element.
fn anchored_subsets(set: VertexSet) -> impl Iterator<Item = VertexSet> {
    let low = set & set.wrapping_neg();
    let rest = set & !low;
    // walk the submasks of `rest`, skipping the full one
    let mut sub = rest;
    let mut done = false;
    core::iter::from_fn(move || loop {
        if done {
            return None;
        }
        let current = sub;
        if sub == 0 {
            done = true;
        } else {
            sub = (sub - 1) & rest;
        }
        if current != rest {
            return Some(low | current);
        }
    })
}

/// Connected parts and activities of one model, memoised by vertex set.
pub struct ClusterExpansion<S: Scalar> {
    model: Model<S>,
    gibbs: HashMap<VertexSet, Arc<Element<S>>>,
    conn: HashMap<VertexSet, Arc<Element<S>>>,
    site_two_point: Vec<S>,
}

impl<S: Scalar> ClusterExpansion<S> {
    pub fn new(model: Model<S>) -> Result<Self> {
        let m = model.params().m;
        let site_two_point = (0..model.graph().num_vertices())
            .map(|j| single_site_two_point(m, &S::from_rational(model.graph().eps(j))))
            .collect::<Result<Vec<_>>>()?;
        Ok(ClusterExpansion { model, gibbs: HashMap::new(), conn: HashMap::new(), site_two_point })
    }

    pub fn model(&self) -> &Model<S> {
        &self.model
    }

    /// `e^{-W(Y)}`, memoised.
    pub fn gibbs(&mut self, set: VertexSet) -> Arc<Element<S>> {
        if let Some(e) = self.gibbs.get(&set) {
            return e.clone();
        }
        let e = if set.count_ones() <= 1 {
            Arc::new(Element::one(self.model.algebra()))
        } else {
            let top = 63 - set.leading_zeros() as usize;
            let rest = set & !(1u64 << top);
            let base = self.gibbs(rest);
            Arc::new(&*base * &self.model.gibbs_star(top, rest))
        };
        self.gibbs.insert(set, e.clone());
        e
    }

    /// `(e^{-W(Y)})_conn`.
    pub fn connected_part(&mut self, set: VertexSet) -> Result<Arc<Element<S>>> {
        if set == 0 || set & !self.model.graph().all_vertices() != 0 {
            return Err(Error::InvalidInput("polymer must be a nonempty vertex set of the graph".into()));
        }
        if let Some(e) = self.conn.get(&set) {
            return Ok(e.clone());
        }
        let mut acc = (*self.gibbs(set)).clone();
        if set.count_ones() > 1 {
            for s in anchored_subsets(set).collect::<Vec<_>>() {
                let part = self.connected_part(s)?;
                let rest = self.gibbs(set & !s);
                acc = &acc - &(&*part * &*rest);
            }
        }
        let e = Arc::new(acc);
        self.conn.insert(set, e.clone());
        Ok(e)
    }

    fn integrate_conn(&mut self, set: VertexSet, insert: Option<&Element<S>>) -> Result<S> {
        let conn = self.connected_part(set)?;
        let nu = self.model.nu_product(set);
        let integrand = match insert {
            Some(obs) => &*conn * obs,
            None => (*conn).clone(),
        };
        let value = integrate_product(&nu, &integrand, &members(set))?.scalar_part();
        let norm = self.model.single_site_product(set);
        value.checked_div(&norm).ok_or(Error::DegenerateNormalisation)
    }

    /// `K(Y) = ∫ dν_Y conn(Y) / Π_{j ∈ Y} Z̃_j`.
    pub fn activity(&mut self, set: VertexSet) -> Result<S> {
        self.integrate_conn(set, None)
    }

    /// `∫ dν_Y conn(Y) ψ̄_{i0,α} ψ_{j0,α} / Π_{j ∈ Y} Z̃_j`, zero unless
    /// `i0, j0 ∈ Y`.
    pub fn activity2_raw(&mut self, set: VertexSet, i0: usize, j0: usize, alpha: usize) -> Result<S> {
        if set >> i0 & 1 == 0 || set >> j0 & 1 == 0 {
            return Ok(S::zero());
        }
        let obs = self.model.observable(i0, j0, alpha)?;
        self.integrate_conn(set, Some(&obs))
    }

    /// Source derivative of the polymer activity at `ρ_{i0,α} ρ̄_{j0,α}`.
    ///
    /// The normalisation `Π Z̃_j(ρ)` depends on the sources too, so for
    /// `i0 = j0` this is the raw integral minus `K(Y) ⟨ψ̄ψ⟩_{i0}` (single-site
    /// two-point function). For `Y = {i0}` it is the single-site term itself.
    pub fn activity2(&mut self, set: VertexSet, i0: usize, j0: usize, alpha: usize) -> Result<S> {
        if set >> i0 & 1 == 0 || set >> j0 & 1 == 0 {
            return Ok(S::zero());
        }
        if set.count_ones() == 1 {
            return Ok(self.site_two_point[i0].clone());
        }
        let raw = self.activity2_raw(set, i0, j0, alpha)?;
        if i0 != j0 {
            return Ok(raw);
        }
        let k = self.activity(set)?;
        Ok(raw - k * self.site_two_point[i0].clone())
    }

    /// Single-site two-point function of vertex `j`.
    pub fn site_two_point(&self, j: usize) -> &S {
        &self.site_two_point[j]
    }

    /// Activities of every polymer with at least two vertices, and the
    /// source activities for each `(i0, j0)` in `pairs` at color `alpha`.
    pub fn table(&mut self, pairs: &[(usize, usize)], alpha: usize) -> Result<ActivityTable<S>> {
        let all = self.model.graph().all_vertices();
        let mut table = ActivityTable::new(self.model.graph().num_vertices());
        for set in 1..=all {
            if set & !all != 0 {
                continue;
            }
            if set.count_ones() >= 2 {
                let k = self.activity(set)?;
                table.k.insert(set, k);
            }
            for &(i0, j0) in pairs {
                if set >> i0 & 1 == 1 && set >> j0 & 1 == 1 {
                    let v = self.activity2(set, i0, j0, alpha)?;
                    table.k2.insert((set, i0, j0, alpha), v);
                }
            }
        }
        Ok(table)
    }
}

/// Exact activities, keyed by polymer. Singletons carry no `K` entry.
#[derive(Clone, Debug, PartialEq)]
pub struct ActivityTable<S> {
    pub num_vertices: usize,
    pub k: BTreeMap<VertexSet, S>,
    pub k2: BTreeMap<(VertexSet, usize, usize, usize), S>,
}

impl<S: Scalar> ActivityTable<S> {
    pub fn new(num_vertices: usize) -> Self {
        ActivityTable { num_vertices, k: BTreeMap::new(), k2: BTreeMap::new() }
    }

    pub fn k(&self, set: VertexSet) -> S {
        self.k.get(&set).cloned().unwrap_or_else(S::zero)
    }

    pub fn k2(&self, set: VertexSet, i0: usize, j0: usize, alpha: usize) -> S {
        self.k2.get(&(set, i0, j0, alpha)).cloned().unwrap_or_else(S::zero)
    }
}

/// Activities from scalar partition functions alone.
///
/// `Z̃(X) = Σ_{Π part X} Π_B ∫ dν_B conn(B)` because integrals over disjoint
/// vertex sets factorise, so the integrated connected parts follow from the
/// same anchored recursion on scalars. Insertions `ψ̄_{i0} ψ_{j0}` split the
/// same way; blocks carrying a lone `ψ̄` or `ψ` integrate to zero.
pub fn activities_by_inversion<S: Scalar>(
    model: &Model<S>,
    pairs: &[(usize, usize)],
    alpha: usize,
) -> Result<ActivityTable<S>> {
    let n = model.graph().num_vertices();
    let all = model.graph().all_vertices();
    let size = 1usize << n;
    let mut z = vec![S::zero(); size];
    let mut k = vec![S::zero(); size];
    z[0] = S::one();
    for set in 1..size as VertexSet {
        z[set as usize] = model.partition_function_on(set)?;
        let mut acc = z[set as usize].clone();
        for s in anchored_subsets(set) {
            acc = acc - k[s as usize].clone() * z[(set & !s) as usize].clone();
        }
        k[set as usize] = acc;
    }
    let mut table = ActivityTable::new(n);
    for set in 1..=all {
        if set.count_ones() >= 2 {
            let norm = model.single_site_product(set);
            table.k.insert(set, k[set as usize].checked_div(&norm).ok_or(Error::DegenerateNormalisation)?);
        }
    }
    for &(i0, j0) in pairs {
        let both = (1u64 << i0) | (1u64 << j0);
        let mut zo = vec![S::zero(); size];
        let mut ko = vec![S::zero(); size];
        for set in 1..size as VertexSet {
            if set & both != both {
                continue;
            }
            zo[set as usize] = model.observable_integral(set, i0, j0, alpha)?;
            let mut acc = zo[set as usize].clone();
            for s in anchored_subsets(set) {
                let rest = set & !s;
                if s & both == both {
                    acc = acc - ko[s as usize].clone() * z[rest as usize].clone();
                } else if rest & both == both {
                    acc = acc - k[s as usize].clone() * zo[rest as usize].clone();
                }
            }
            ko[set as usize] = acc;
            let norm = model.single_site_product(set);
            let raw = ko[set as usize].checked_div(&norm).ok_or(Error::DegenerateNormalisation)?;
            let g = single_site_two_point(model.params().m, &S::from_rational(model.graph().eps(i0)))?;
            let value = if set.count_ones() == 1 {
                g
            } else if i0 == j0 {
                raw - table.k(set) * g
            } else {
                raw
            };
            table.k2.insert((set, i0, j0, alpha), value);
        }
    }
    Ok(table)
}

/// Both sides of `Z̃(Λ) / Π_j Z̃_j = 1 + Σ_N 1/N! Σ Π K(Y_l) φ(Y_1..Y_N)` at
/// vanishing sources.
#[derive(Clone, Debug, PartialEq)]
pub struct PolymerIdentity<S> {
    pub lhs: S,
    pub rhs: S,
}

impl<S: Scalar> PolymerIdentity<S> {
    pub fn residual(&self) -> S {
        self.lhs.clone() - self.rhs.clone()
    }

    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// Checks the polymer-gas representation with activities from connected
/// parts against the partition function computed directly.
pub fn polymer_identity_check<S: Scalar>(expansion: &mut ClusterExpansion<S>) -> Result<PolymerIdentity<S>> {
    let model = expansion.model().clone();
    let all = model.graph().all_vertices();
    let lhs = model
        .partition_function()?
        .checked_div(&model.single_site_product(all))
        .ok_or(Error::DegenerateNormalisation)?;
    // families of pairwise disjoint polymers: the lowest uncovered vertex is
    // either left alone or starts a polymer
    let n = model.graph().num_vertices();
    let mut f = vec![S::zero(); 1usize << n];
    f[0] = S::one();
    for set in 1..=all {
        let low = set & set.wrapping_neg();
        let mut acc = f[(set & !low) as usize].clone();
        let rest = set & !low;
        let mut sub = rest;
        loop {
            if sub != 0 {
                let poly = low | sub;
                let k = expansion.activity(poly)?;
                if !k.is_zero() {
                    acc = acc + k * f[(set & !poly) as usize].clone();
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
        f[set as usize] = acc;
    }
    Ok(PolymerIdentity { lhs, rhs: f[all as usize].clone() })
}

/// Largest family accepted by [`phi_conn`].
pub const MAX_FAMILY: usize = 16;

fn disjoint_family(ys: &[VertexSet], idx: u32) -> bool {
    let mut seen = 0u64;
    let mut rest = idx;
    while rest != 0 {
        let i = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        if seen & ys[i] != 0 {
            return false;
        }
        seen |= ys[i];
    }
    true
}

/// Ursell function of the hard-core interaction
/// `φ(Y_1..Y_N) = Π_{l ≠ l'} 1{Y_l ∩ Y_l' = ∅}`.
pub fn phi_conn(ys: &[VertexSet]) -> i64 {
    let n = ys.len();
    assert!((1..=MAX_FAMILY).contains(&n), "phi_conn supports 1..=16 polymers");
    let full = (1u32 << n) - 1;
    let mut memo = vec![0i64; 1usize << n];
    for idx in 1..=full {
        if idx.count_ones() == 1 {
            memo[idx as usize] = 1;
            continue;
        }
        let low = idx & idx.wrapping_neg();
        let rest = idx & !low;
        let mut acc = i64::from(disjoint_family(ys, idx));
        let mut sub = rest;
        loop {
            let block = low | sub;
            if block != idx {
                let others = idx & !block;
                acc -= memo[block as usize] * i64::from(disjoint_family(ys, others));
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
        memo[idx as usize] = acc;
    }
    memo[full as usize]
}

/// Overlap graph of a polymer family: vertex per polymer, unit edge per
/// intersecting pair.
pub fn overlap_graph(ys: &[VertexSet]) -> Result<WeightedGraph> {
    let mut g = WeightedGraph::new(ys.len())?;
    for a in 0..ys.len() {
        for b in a + 1..ys.len() {
            if ys[a] & ys[b] != 0 {
                g.set_edge(a, b, int(1))?;
            }
        }
    }
    Ok(g)
}

/// `Σ_{T on {1..N}} Π_{{l,l'} ∈ T} 1{Y_l ∩ Y_l' ≠ ∅}`.
pub fn phi_tree_bound(ys: &[VertexSet]) -> Result<Rational> {
    let g = overlap_graph(ys)?;
    kirchhoff_tree_sum(&g, g.all_vertices())
}

/// Partial sums of the polymer series for `⟨ψ̄_{i0,α} ψ_{j0,α}⟩` with the
/// geometric tail certificate.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesReport<S> {
    /// `S_1, ..., S_{N_max}`.
    pub partial_sums: Vec<S>,
    pub a_value: f64,
    pub b_value: f64,
    /// `𝒜 ℬ^{N_max} / (1 - ℬ)`; `None` when `ℬ ≥ 1`.
    pub tail_bound: Option<f64>,
}

impl<S> SeriesReport<S> {
    pub fn convergent(&self) -> bool {
        self.tail_bound.is_some()
    }
}

/// `𝒜 = Σ_{Y ∋ i0, j0} |K_{i0 j0}(Y)| C^{|Y|}` and
/// `ℬ = sup_k Σ_{Y ∋ k, |Y| > 1} |K(Y)| C^{|Y|}`.
pub fn mayer_sums<S: Scalar>(table: &ActivityTable<S>, i0: usize, j0: usize, alpha: usize, c: f64) -> (f64, f64) {
    let powc = |set: VertexSet| num_traits::Float::powi(c, set.count_ones() as i32);
    let a = table
        .k2
        .iter()
        .filter(|((_, a, b, col), _)| (*a, *b, *col) == (i0, j0, alpha))
        .map(|((set, _, _, _), v)| v.abs().to_f64() * powc(*set))
        .sum();
    let b = (0..table.num_vertices)
        .map(|k| {
            table
                .k
                .iter()
                .filter(|(set, _)| *set >> k & 1 == 1)
                .map(|(set, v)| v.abs().to_f64() * powc(*set))
                .sum::<f64>()
        })
        .fold(0.0, f64::max);
    (a, b)
}

/// Result of the cluster-expansion bound `𝒜 / (1 - ℬ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MayerBound {
    pub a_value: f64,
    pub b_value: f64,
    /// `None` when `ℬ ≥ 1` (no bound).
    pub bound: Option<f64>,
}

pub fn mayer_bound<S: Scalar>(table: &ActivityTable<S>, i0: usize, j0: usize, alpha: usize, c: f64) -> MayerBound {
    let (a, b) = mayer_sums(table, i0, j0, alpha, c);
    let bound = if b < 1.0 { Some(a / (1.0 - b)) } else { None };
    MayerBound { a_value: a, b_value: b, bound }
}

/// Partial sums of
/// `1{i0=j0} ⟨ψ̄ψ⟩_{i0} + Σ_N 1/(N-1)! Σ K_{i0 j0}(Y_1) Π_{l≥2} K(Y_l) φ_conn(Y_1..Y_N)`
/// over polymers with `|Y_l| > 1`.
pub fn two_point_series<S: Scalar>(
    table: &ActivityTable<S>,
    site_two_point: &S,
    i0: usize,
    j0: usize,
    alpha: usize,
    n_max: usize,
    c: f64,
) -> SeriesReport<S> {
    let firsts: Vec<(VertexSet, S)> = table
        .k2
        .iter()
        .filter(|((set, a, b, col), v)| (*a, *b, *col) == (i0, j0, alpha) && set.count_ones() > 1 && !v.is_zero())
        .map(|((set, _, _, _), v)| (*set, v.clone()))
        .collect();
    let others: Vec<(VertexSet, S)> =
        table.k.iter().filter(|(_, v)| !v.is_zero()).map(|(s, v)| (*s, v.clone())).collect();
    let mut sum = if i0 == j0 { site_two_point.clone() } else { S::zero() };
    let mut partial_sums = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let inv = S::from_rational(&(int(1) / big(factorial(n as u32 - 1))));
        let mut level = S::zero();
        let mut family = Vec::with_capacity(n);
        for (y1, k2) in &firsts {
            family.clear();
            family.push(*y1);
            accumulate_families(&others, n, &mut family, k2.clone(), &mut level);
        }
        sum = sum + level * inv;
        partial_sums.push(sum.clone());
    }
    let (a, b) = mayer_sums(table, i0, j0, alpha, c);
    let tail_bound = if b < 1.0 { Some(a * num_traits::Float::powi(b, n_max as i32) / (1.0 - b)) } else { None };
    SeriesReport { partial_sums, a_value: a, b_value: b, tail_bound }
}

fn accumulate_families<S: Scalar>(
    others: &[(VertexSet, S)],
    n: usize,
    family: &mut Vec<VertexSet>,
    weight: S,
    out: &mut S,
) {
    if family.len() == n {
        let phi = phi_conn(family);
        if phi != 0 {
            *out = out.clone() + weight * S::from_i64(phi);
        }
        return;
    }
    for (y, k) in others {
        family.push(*y);
        accumulate_families(others, n, family, weight.clone() * k.clone(), out);
        family.pop();
    }
}

/// Coefficients by total size of both sides of
/// `Σ_N 1/N! Σ_{Π part [N]} Π_{I ∈ Π} f(|I|) = Σ_{M ≥ 1} 1/M! (Σ_n f(n)/n!)^M`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpIdentity {
    /// Index `N - 1` holds the total-size-`N` coefficient.
    pub lhs: Vec<Rational>,
    pub rhs: Vec<Rational>,
}

impl ExpIdentity {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }
}

/// `f[n - 1] = f(n)`; `f(n) = 0` beyond the slice.
pub fn exp_partition_identity_check(f: &[Rational], n_max: usize) -> ExpIdentity {
    let fv = |n: usize| f.get(n - 1).cloned().unwrap_or_else(|| int(0));
    let mut lhs = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let mut total = int(0);
        for_each_set_partition(n, |blocks| {
            total += blocks.iter().fold(int(1), |acc, &b| acc * fv(b));
        });
        lhs.push(total / big(factorial(n as u32)));
    }
    // exp of the power series g(t) = Σ_n f(n)/n! t^n, minus one
    let mut g = vec![int(0); n_max + 1];
    for (n, slot) in g.iter_mut().enumerate().skip(1) {
        *slot = fv(n) / big(factorial(n as u32));
    }
    let mut rhs_series = vec![int(0); n_max + 1];
    let mut power = vec![int(0); n_max + 1];
    power[0] = int(1);
    for m in 1..=n_max {
        let mut next = vec![int(0); n_max + 1];
        for (i, p) in power.iter().enumerate() {
            for (j, q) in g.iter().enumerate().skip(1) {
                if i + j <= n_max {
                    next[i + j] += p * q;
                }
            }
        }
        power = next;
        let inv = int(1) / big(factorial(m as u32));
        for (t, p) in power.iter().enumerate() {
            rhs_series[t] += p * &inv;
        }
    }
    ExpIdentity { lhs, rhs: rhs_series[1..].to_vec() }
}

/// Calls `visit` with the block sizes of every set partition of `{0..n}`.
pub fn for_each_set_partition(n: usize, mut visit: impl FnMut(&[usize])) {
    // restricted growth strings
    fn go(pos: usize, n: usize, sizes: &mut Vec<usize>, visit: &mut impl FnMut(&[usize])) {
        if pos == n {
            visit(sizes);
            return;
        }
        for b in 0..sizes.len() {
            sizes[b] += 1;
            go(pos + 1, n, sizes, visit);
            sizes[b] -= 1;
        }
        sizes.push(1);
        go(pos + 1, n, sizes, visit);
        sizes.pop();
    }
    let mut sizes = Vec::new();
    go(0, n, &mut sizes, &mut visit);
}
