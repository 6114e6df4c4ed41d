mod common;

use hyperfermi_core::cluster::*;
use hyperfermi_core::graph::{VertexSet, WeightedGraph};
use hyperfermi_core::grassmann::Element;
use hyperfermi_core::model::{single_site_two_point, Model, ModelParams};
use hyperfermi_core::scalar::{int, rat, rational_to_f64, Rational};
use proptest::prelude::*;

fn expansion(g: &WeightedGraph, beta: Rational, m: usize) -> ClusterExpansion<Rational> {
    ClusterExpansion::new(Model::new(g, &ModelParams { beta, m }).unwrap()).unwrap()
}

/// Σ over set partitions of `set` of the product of connected parts.
fn resum(ex: &mut ClusterExpansion<Rational>, set: VertexSet) -> Element<Rational> {
    let alg = ex.model().algebra();
    if set == 0 {
        return Element::one(alg);
    }
    let low = set & set.wrapping_neg();
    let rest = set & !low;
    let mut acc = Element::zero(alg);
    let mut sub = rest;
    loop {
        let block = low | sub;
        let part = ex.connected_part(block).unwrap();
        acc = &acc + &(&*part * &resum(ex, set & !block));
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & rest;
    }
    acc
}

#[test]
fn connected_parts_resum_to_gibbs_factor() {
    let mut rng = common::rng(31);
    for _ in 0..8 {
        let g = common::random_graph(&mut rng, 4, 6, true);
        let beta = common::positive_rational(&mut rng, 5);
        for m in 1..=2 {
            let mut ex = expansion(&g, beta.clone(), m);
            let all = g.all_vertices();
            let total = resum(&mut ex, all);
            assert_eq!(total, *ex.gibbs(all));
        }
    }
}

#[test]
fn activities_vanish_on_disconnected_polymers() {
    let mut rng = common::rng(32);
    let mut seen = 0;
    for _ in 0..10 {
        let g = common::random_graph(&mut rng, 5, 5, true);
        let beta = common::positive_rational(&mut rng, 5);
        let mut ex = expansion(&g, beta, 1);
        for set in 1..=g.all_vertices() {
            if set.count_ones() < 2 || g.is_connected(set) {
                continue;
            }
            seen += 1;
            assert!(ex.connected_part(set).unwrap().is_zero());
            assert_eq!(ex.activity(set).unwrap(), int(0));
        }
    }
    assert!(seen > 0);
}

#[test]
fn polymer_identity_on_small_graphs() {
    let mut rng = common::rng(33);
    for _ in 0..6 {
        let g = common::random_graph(&mut rng, 5, 6, true);
        let beta = common::positive_rational(&mut rng, 8);
        for m in 1..=2 {
            let check = polymer_identity_check(&mut expansion(&g, beta.clone(), m)).unwrap();
            assert!(check.holds(), "residual {}", check.residual());
        }
    }
    let mut k4 = WeightedGraph::complete(4).unwrap();
    k4.set_uniform_eps(&rat(1, 4)).unwrap();
    assert!(polymer_identity_check(&mut expansion(&k4, rat(1, 6), 1)).unwrap().holds());
}

#[test]
fn element_and_scalar_routes_agree() {
    let mut rng = common::rng(34);
    for _ in 0..5 {
        let g = common::random_graph(&mut rng, 4, 5, true);
        let beta = common::positive_rational(&mut rng, 6);
        let n = g.num_vertices();
        let pairs: Vec<_> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
        for m in 1..=2 {
            let mut ex = expansion(&g, beta.clone(), m);
            let direct = ex.table(&pairs, m).unwrap();
            let inverted = activities_by_inversion(ex.model(), &pairs, m).unwrap();
            assert_eq!(direct, inverted);
        }
    }
}

#[test]
fn series_converges_within_tail() {
    let e = std::f64::consts::E;
    for eps in [int(0), rat(1, 2)] {
        let mut g = WeightedGraph::path(4).unwrap();
        g.set_uniform_eps(&eps).unwrap();
        let mut ex = expansion(&g, rat(1, 100), 1);
        let pairs = [(0, 3), (1, 1), (0, 1)];
        let table = ex.table(&pairs, 1).unwrap();
        for (i, j) in pairs {
            let exact = ex.model().two_point(i, j, 1).unwrap();
            let report = two_point_series(&table, ex.site_two_point(i), i, j, 1, 4, e);
            let tail = report.tail_bound.expect("convergent");
            let last = report.partial_sums.last().unwrap();
            assert!(rational_to_f64(&(last - &exact)).abs() <= tail, "({}, {})", i, j);
        }
    }
}

#[test]
fn series_at_zero_beta() {
    let mut g = WeightedGraph::path(3).unwrap();
    g.set_uniform_eps(&rat(1, 2)).unwrap();
    let mut ex = expansion(&g, int(0), 2);
    let table = ex.table(&[(1, 1), (0, 2)], 1).unwrap();
    let g1 = single_site_two_point(2, &rat(1, 2)).unwrap();
    let diag = two_point_series(&table, &g1, 1, 1, 1, 3, std::f64::consts::E);
    assert!(diag.partial_sums.iter().all(|s| *s == g1));
    let off = two_point_series(&table, &g1, 0, 2, 1, 3, std::f64::consts::E);
    assert!(off.partial_sums.iter().all(|s| *s == int(0)));
    let bound = mayer_bound(&table, 0, 2, 1, std::f64::consts::E);
    assert_eq!(bound.bound, Some(0.0));
}

#[test]
fn mayer_bound_dominates() {
    for beta in [rat(1, 50), rat(1, 30)] {
        for eps in [int(0), int(1)] {
            let mut g = WeightedGraph::path(4).unwrap();
            g.set_uniform_eps(&eps).unwrap();
            let pairs: Vec<_> = (0..4).flat_map(|i| (0..4).map(move |j| (i, j))).collect();
            let mut ex = expansion(&g, beta.clone(), 1);
            let table = ex.table(&pairs, 1).unwrap();
            for (i, j) in pairs {
                let exact = rational_to_f64(&ex.model().two_point(i, j, 1).unwrap()).abs();
                let bound = mayer_bound(&table, i, j, 1, std::f64::consts::E).bound.unwrap();
                assert!(exact < bound);
            }
        }
    }
}

fn family() -> impl Strategy<Value = Vec<VertexSet>> {
    prop::collection::vec(1u64..64, 1..=6)
}

proptest! {
    #[test]
    fn ursell_function_obeys_tree_bound(ys in family()) {
        let phi = int(phi_conn(&ys));
        let trees = phi_tree_bound(&ys).unwrap();
        prop_assert!(phi.clone() * phi.clone() <= trees.clone() * trees);
    }

    #[test]
    fn ursell_function_is_symmetric(ys in family(), rot in 0usize..6) {
        let mut shuffled = ys.clone();
        let len = shuffled.len();
        shuffled.rotate_left(rot % len);
        prop_assert_eq!(phi_conn(&ys), phi_conn(&shuffled));
    }

    #[test]
    fn identical_polymers_give_signed_factorial(n in 1usize..=7) {
        // complete overlap graph: (-1)^{n-1} (n-1)!
        let ys = vec![0b1u64; n];
        let fact: i64 = (1..n as i64).product();
        let sign = if n % 2 == 1 { 1 } else { -1 };
        prop_assert_eq!(phi_conn(&ys), sign * fact);
    }

    #[test]
    fn exponential_identity_random(f in prop::collection::vec((-9i64..=9, 1i64..=9), 0..=4), n in 1usize..=6) {
        let f: Vec<Rational> = f.into_iter().map(|(p, q)| rat(p, q)).collect();
        prop_assert!(exp_partition_identity_check(&f, n).holds());
    }
}
