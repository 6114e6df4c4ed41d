#![allow(dead_code)]

use hyperfermi_core::graph::WeightedGraph;
use hyperfermi_core::scalar::{rat, Rational};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Rational in `[0, 1]` with denominator at most `den`.
pub fn unit_rational(rng: &mut ChaCha8Rng, den: i64) -> Rational {
    let q = rng.gen_range(1..=den);
    rat(rng.gen_range(0..=q), q)
}

/// Rational in `(0, 1]`.
pub fn positive_rational(rng: &mut ChaCha8Rng, den: i64) -> Rational {
    let q = rng.gen_range(1..=den);
    rat(rng.gen_range(1..=q), q)
}

/// Random simple graph with positive rational weights in `(0, 1]` and
/// vertex fields in `[0, 1]`.
pub fn random_graph(rng: &mut ChaCha8Rng, max_vertices: usize, max_edges: usize, with_eps: bool) -> WeightedGraph {
    let n = rng.gen_range(1..=max_vertices);
    let mut g = WeightedGraph::new(n).unwrap();
    let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    for k in (1..pairs.len()).rev() {
        pairs.swap(k, rng.gen_range(0..=k));
    }
    let edges = rng.gen_range(0..=max_edges.min(pairs.len()));
    for &(i, j) in &pairs[..edges] {
        g.set_edge(i, j, positive_rational(rng, 7)).unwrap();
    }
    if with_eps {
        for v in 0..n {
            g.set_eps(v, unit_rational(rng, 5)).unwrap();
        }
    }
    g
}
