//! Weighted graphs shared by the model and forest code.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::{int, Rational};

/// Subset of vertices as a bitmask.
pub type VertexSet = u64;

/// Largest vertex count representable by [`VertexSet`].
pub const MAX_VERTICES: usize = 64;

/// Vertices `0..n`, symmetric nonnegative edge weights (`J_ij` or `β_e`) and
/// vertex weights `ε_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    /// `(i, j, w)` with `i < j`, `w > 0`, sorted, one entry per pair.
    edges: Vec<(usize, usize, Rational)>,
    eps: Vec<Rational>,
}

impl WeightedGraph {
    /// Graph on `n` vertices with no edges and `ε ≡ 0`.
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("graph needs at least one vertex".into()));
        }
        if n > MAX_VERTICES {
            return Err(Error::Capacity { requested: n, capacity: MAX_VERTICES });
        }
        Ok(WeightedGraph { n, edges: Vec::new(), eps: vec![int(0); n] })
    }

    /// Sets the weight of `{i, j}`; weight zero removes the edge.
    pub fn set_edge(&mut self, i: usize, j: usize, w: Rational) -> Result<()> {
        if i == j {
            return Err(Error::InvalidInput(alloc::format!("self-loop at {}", i)));
        }
        if i >= self.n || j >= self.n {
            return Err(Error::InvalidInput(alloc::format!("edge {{{}, {}}} outside the graph", i, j)));
        }
        if w.is_negative() {
            return Err(Error::InvalidInput(alloc::format!("negative weight on {{{}, {}}}", i, j)));
        }
        let key = (i.min(j), i.max(j));
        match self.edges.binary_search_by(|e| (e.0, e.1).cmp(&key)) {
            Ok(pos) if w.is_zero() => {
                self.edges.remove(pos);
            }
            Ok(pos) => self.edges[pos].2 = w,
            Err(_) if w.is_zero() => {}
            Err(pos) => self.edges.insert(pos, (key.0, key.1, w)),
        }
        Ok(())
    }

    pub fn set_eps(&mut self, j: usize, eps: Rational) -> Result<()> {
        if j >= self.n {
            return Err(Error::InvalidInput(alloc::format!("vertex {} outside the graph", j)));
        }
        if eps.is_negative() {
            return Err(Error::InvalidInput(alloc::format!("negative field at {}", j)));
        }
        self.eps[j] = eps;
        Ok(())
    }

    pub fn set_uniform_eps(&mut self, eps: &Rational) -> Result<()> {
        for j in 0..self.n {
            self.set_eps(j, eps.clone())?;
        }
        Ok(())
    }

    /// Path `0 - 1 - ... - (n-1)` with unit weights.
    pub fn path(n: usize) -> Result<Self> {
        let mut g = Self::new(n)?;
        for i in 1..n {
            g.set_edge(i - 1, i, int(1))?;
        }
        Ok(g)
    }

    /// Complete graph with unit weights.
    pub fn complete(n: usize) -> Result<Self> {
        let mut g = Self::new(n)?;
        for i in 0..n {
            for j in i + 1..n {
                g.set_edge(i, j, int(1))?;
            }
        }
        Ok(g)
    }

    /// Box `dims[0] x dims[1] x ...` of `Z^d` with unit nearest-neighbour
    /// weights. Vertex index is row-major with the last axis fastest.
    pub fn lattice(dims: &[usize]) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::InvalidInput("lattice dimensions must be positive".into()));
        }
        let n = dims.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d));
        let n = n.ok_or(Error::Capacity { requested: usize::MAX, capacity: MAX_VERTICES })?;
        let mut g = Self::new(n)?;
        let mut stride = 1;
        for axis in (0..dims.len()).rev() {
            for v in 0..n {
                let coord = (v / stride) % dims[axis];
                if coord + 1 < dims[axis] {
                    g.set_edge(v, v + stride, int(1))?;
                }
            }
            stride *= dims[axis];
        }
        Ok(g)
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn all_vertices(&self) -> VertexSet {
        if self.n == 64 {
            u64::MAX
        } else {
            (1u64 << self.n) - 1
        }
    }

    pub fn edges(&self) -> &[(usize, usize, Rational)] {
        &self.edges
    }

    pub fn eps(&self, j: usize) -> &Rational {
        &self.eps[j]
    }

    pub fn eps_all(&self) -> &[Rational] {
        &self.eps
    }

    pub fn weight(&self, i: usize, j: usize) -> Rational {
        let key = (i.min(j), i.max(j));
        match self.edges.binary_search_by(|e| (e.0, e.1).cmp(&key)) {
            Ok(pos) => self.edges[pos].2.clone(),
            Err(_) => int(0),
        }
    }

    /// Edges with both endpoints in `set`.
    pub fn induced_edges(&self, set: VertexSet) -> impl Iterator<Item = &(usize, usize, Rational)> {
        self.edges.iter().filter(move |(i, j, _)| set >> i & 1 == 1 && set >> j & 1 == 1)
    }

    /// Connected components of the subgraph induced by `set`.
    pub fn components(&self, set: VertexSet) -> Vec<VertexSet> {
        let mut left = set;
        let mut out = Vec::new();
        while left != 0 {
            let mut comp = left & left.wrapping_neg();
            loop {
                let mut grown = comp;
                for (i, j, _) in self.induced_edges(set) {
                    if comp >> i & 1 == 1 || comp >> j & 1 == 1 {
                        grown |= (1u64 << i) | (1u64 << j);
                    }
                }
                if grown == comp {
                    break;
                }
                comp = grown;
            }
            out.push(comp);
            left &= !comp;
        }
        out
    }

    pub fn is_connected(&self, set: VertexSet) -> bool {
        self.components(set).len() <= 1
    }

    /// `sup_i Σ_j w_ij`.
    pub fn max_degree_weight(&self) -> Rational {
        let mut sums = vec![int(0); self.n];
        for (i, j, w) in &self.edges {
            sums[*i] += w;
            sums[*j] += w;
        }
        sums.into_iter().max().unwrap_or_else(|| int(0))
    }

    /// Copy with every edge weight multiplied by `factor`.
    pub fn scaled(&self, factor: &Rational) -> Self {
        let mut g = self.clone();
        if factor.is_zero() {
            g.edges.clear();
        } else {
            for e in &mut g.edges {
                e.2 = &e.2 * factor;
            }
        }
        g
    }

    /// Subgraph induced by `set`, relabelled `0..|set|` in ascending order.
    pub fn induced(&self, set: VertexSet) -> Result<Self> {
        let verts = members(set & self.all_vertices());
        let mut g = Self::new(verts.len())?;
        let pos = |v: usize| verts.binary_search(&v).ok();
        for (i, j, w) in self.induced_edges(set) {
            if let (Some(a), Some(b)) = (pos(*i), pos(*j)) {
                g.set_edge(a, b, w.clone())?;
            }
        }
        for (k, v) in verts.iter().enumerate() {
            g.eps[k] = self.eps[*v].clone();
        }
        Ok(g)
    }

    /// Weighted graph Laplacian `Δ` (negative semidefinite: `Δ_ii = -Σ_j w_ij`).
    pub fn laplacian(&self) -> Vec<Vec<Rational>> {
        let mut l = vec![vec![int(0); self.n]; self.n];
        for (i, j, w) in &self.edges {
            l[*i][*j] += w;
            l[*j][*i] += w;
            l[*i][*i] -= w;
            l[*j][*j] -= w;
        }
        l
    }
}

/// Vertices of `set`, ascending.
pub fn members(set: VertexSet) -> Vec<usize> {
    let mut out = Vec::with_capacity(set.count_ones() as usize);
    let mut rest = set;
    while rest != 0 {
        out.push(rest.trailing_zeros() as usize);
        rest &= rest - 1;
    }
    out
}
