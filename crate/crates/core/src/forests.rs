//! Spanning forests, matrix-tree identities and the arboreal gas.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::{VertexSet, WeightedGraph};
use crate::grassmann::{berezin, exp_even, Algebra, Element, Generator};
use crate::linalg::{determinant, minor};
use crate::scalar::{int, Rational};

/// Largest edge count accepted by the exhaustive enumerators.
pub const MAX_ENUMERATION_EDGES: usize = 30;

/// Acyclic edge subset with its component partition (singletons included).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Forest {
    /// Indices into [`WeightedGraph::edges`].
    pub edges: Vec<usize>,
    pub trees: Vec<VertexSet>,
}

/// Union–find with undo, no path compression.
struct Dsu {
    parent: Vec<usize>,
    size: Vec<usize>,
    history: Vec<Option<(usize, usize)>>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu { parent: (0..n).collect(), size: vec![1; n], history: Vec::new() }
    }

    fn find(&self, mut x: usize) -> usize {
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }

    /// Joins the classes of `a` and `b`; `false` if they were already joined.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            self.history.push(None);
            return false;
        }
        if self.size[ra] < self.size[rb] {
            core::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        self.history.push(Some((ra, rb)));
        true
    }

    fn undo(&mut self) {
        if let Some(Some((ra, rb))) = self.history.pop() {
            self.parent[rb] = rb;
            self.size[ra] -= self.size[rb];
        }
    }

    fn classes(&self) -> Vec<VertexSet> {
        let n = self.parent.len();
        let mut by_root = vec![0u64; n];
        for v in 0..n {
            by_root[self.find(v)] |= 1u64 << v;
        }
        by_root.into_iter().filter(|s| *s != 0).collect()
    }
}

/// Calls `visit` once per spanning forest of `g` (every acyclic edge subset).
pub fn for_each_forest(g: &WeightedGraph, mut visit: impl FnMut(&Forest)) -> Result<()> {
    let edges = g.edges();
    if edges.len() > MAX_ENUMERATION_EDGES {
        return Err(Error::Capacity { requested: edges.len(), capacity: MAX_ENUMERATION_EDGES });
    }
    let mut dsu = Dsu::new(g.num_vertices());
    let mut chosen = Vec::new();
    recurse(g, 0, &mut dsu, &mut chosen, &mut visit);
    Ok(())
}

fn recurse(
    g: &WeightedGraph,
    k: usize,
    dsu: &mut Dsu,
    chosen: &mut Vec<usize>,
    visit: &mut impl FnMut(&Forest),
) {
    let edges = g.edges();
    if k == edges.len() {
        visit(&Forest { edges: chosen.clone(), trees: dsu.classes() });
        return;
    }
    recurse(g, k + 1, dsu, chosen, visit);
    let (i, j, _) = &edges[k];
    if dsu.union(*i, *j) {
        chosen.push(k);
        recurse(g, k + 1, dsu, chosen, visit);
        chosen.pop();
    }
    dsu.undo();
}

pub fn enumerate_forests(g: &WeightedGraph) -> Result<Vec<Forest>> {
    let mut out = Vec::new();
    for_each_forest(g, |f| out.push(f.clone()))?;
    Ok(out)
}

fn edge_weight_product(g: &WeightedGraph, f: &Forest) -> Rational {
    f.edges.iter().fold(int(1), |acc, &e| acc * &g.edges()[e].2)
}

fn vertex_sum(values: &[Rational], set: VertexSet) -> Rational {
    crate::graph::members(set).into_iter().fold(int(0), |acc, v| acc + &values[v])
}

/// `Z^arb = Σ_F Π_{e ∈ F} β_e Π_{T ∈ F} (1 + Σ_{i ∈ T} ε_i)`.
pub fn arboreal_z(g: &WeightedGraph) -> Result<Rational> {
    let mut total = int(0);
    for_each_forest(g, |f| {
        let trees = f.trees.iter().fold(int(1), |acc, t| acc * (int(1) + vertex_sum(g.eps_all(), *t)));
        total += edge_weight_product(g, f) * trees;
    })?;
    Ok(total)
}

/// `∫ dψ e^{-(ψ̄, (-Δ^β + 1 + ε̂) ψ)} e^{-Σ_e β_e ψ̄_i ψ_i ψ̄_j ψ_j}` with one
/// color per site.
pub fn h02_partition(g: &WeightedGraph) -> Result<Rational> {
    let n = g.num_vertices();
    let algebra = Algebra::new(n, 1, false)?;
    let pair = |i: usize, j: usize, c: Rational| {
        Element::product_of(algebra, &[Generator::psibar(i, 1), Generator::psi(j, 1)], c)
    };
    let lap = g.laplacian();
    let mut exponent = Element::zero(algebra);
    for i in 0..n {
        for j in 0..n {
            let mut a = -lap[i][j].clone();
            if i == j {
                a += int(1) + g.eps(i);
            }
            if a != int(0) {
                exponent = &exponent + &pair(i, j, a)?;
            }
        }
    }
    for (i, j, w) in g.edges() {
        let quartic = &pair(*i, *i, w.clone())? * &pair(*j, *j, int(1))?;
        exponent = &exponent + &quartic;
    }
    let sites: Vec<usize> = (0..n).collect();
    Ok(berezin(&exp_even(&-&exponent)?, &sites)?.scalar_part())
}

/// Weighted spanning-tree sum of the subgraph induced by `set`, from a
/// cofactor of its Laplacian. One for a single vertex, zero for a
/// disconnected set.
pub fn kirchhoff_tree_sum(g: &WeightedGraph, set: VertexSet) -> Result<Rational> {
    if set == 0 {
        return Err(Error::InvalidInput("tree sum over the empty set".into()));
    }
    if set.count_ones() == 1 {
        return Ok(int(1));
    }
    let sub = g.induced(set)?;
    let lap: Vec<Vec<Rational>> = sub.laplacian().into_iter().map(|r| r.into_iter().map(|x| -x).collect()).collect();
    Ok(determinant(&minor(&lap, 0)))
}

/// Same sum by enumerating forests of the induced subgraph.
pub fn brute_force_tree_sum(g: &WeightedGraph, set: VertexSet) -> Result<Rational> {
    let sub = g.induced(set)?;
    let mut total = int(0);
    for_each_forest(&sub, |f| {
        if f.trees.len() == 1 {
            total += edge_weight_product(&sub, f);
        }
    })?;
    Ok(total)
}

/// Both sides of `det(-Δ + diag d) = Σ_F Π_{e ∈ F} β_e Π_{T ∈ F} Σ_{r ∈ T} d_r`.
#[derive(Clone, Debug, PartialEq)]
pub struct RootedForestCheck {
    pub determinant: Rational,
    pub forest_sum: Rational,
}

impl RootedForestCheck {
    pub fn holds(&self) -> bool {
        self.determinant == self.forest_sum
    }
}

pub fn rooted_forest_det_check(g: &WeightedGraph, d: &[Rational]) -> Result<RootedForestCheck> {
    let n = g.num_vertices();
    if d.len() != n {
        return Err(Error::InvalidInput("one diagonal entry per vertex required".into()));
    }
    let mut m: Vec<Vec<Rational>> = g.laplacian().into_iter().map(|r| r.into_iter().map(|x| -x).collect()).collect();
    for (i, row) in m.iter_mut().enumerate() {
        row[i] += &d[i];
    }
    let mut forest_sum = int(0);
    for_each_forest(g, |f| {
        let roots = f.trees.iter().fold(int(1), |acc, t| acc * vertex_sum(d, *t));
        forest_sum += edge_weight_product(g, f) * roots;
    })?;
    Ok(RootedForestCheck { determinant: determinant(&m), forest_sum })
}
