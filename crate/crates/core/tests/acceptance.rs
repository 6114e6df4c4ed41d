//! Acceptance suite: one line per criterion, nonzero exit if any fails.

mod common;

use std::collections::HashMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use hyperfermi_core::bounds::{activity_bound_check, exp_lower, fit_slope, two_point_profile, verify_edge_norm_estimates};
use hyperfermi_core::cluster::{
    exp_partition_identity_check, mayer_bound, phi_conn, phi_tree_bound, polymer_identity_check, ClusterExpansion,
};
use hyperfermi_core::forests::{arboreal_z, brute_force_tree_sum, h02_partition, kirchhoff_tree_sum, rooted_forest_det_check};
use hyperfermi_core::graph::{VertexSet, WeightedGraph};
use hyperfermi_core::grassmann::{l1_norm, symmetric_product, Algebra};
use hyperfermi_core::model::{build_d_matrix, d_matrix_positivity, z_element, Model, ModelParams, TField};
use hyperfermi_core::scalar::{big, binomial, int, pow, rat, rational_from_f64, rational_to_f64, Rational, Scalar};
use hyperfermi_core::singlesite::{
    coeff_a, norm_psi_pow, one_point_norm_ratios, ratio_r, single_site_z, single_site_z_engine, SingleSiteParams,
};
use rand::Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, start: Instant) -> Result<(), String> {
    let took = start.elapsed();
    ensure(took <= limit, || format!("took {:.1?}, limit {:?}", took, limit))
}

fn eps_grid() -> [Rational; 4] {
    [int(0), rat(1, 2), int(1), int(3)]
}

fn single_site_closed_form() -> Outcome {
    let start = Instant::now();
    for m in 0..=6 {
        for eps in eps_grid() {
            let p = SingleSiteParams { m, eps: eps.clone() };
            let closed = single_site_z(&p);
            let engine = single_site_z_engine(&p).map_err(|e| e.to_string())?;
            ensure(closed == engine, || format!("m={} eps={}: {} vs {}", m, eps, closed, engine))?;
        }
        let expected = big(binomial(2 * m as u32, m as u32)) / pow(&int(2), 2 * m as u32);
        ensure(coeff_a(m as u32, 0).abs() == expected, || format!("|a_m(0)| at m={}", m))?;
    }
    ensure(single_site_z(&SingleSiteParams { m: 1, eps: int(0) }) == int(1), || "Z(0,1) != 1".into())?;
    within(Duration::from_secs(5), start)?;
    Ok("m <= 6, four fields, anchors Z(0,1) = 1 and |a_m(0)|".into())
}

fn norm_formulas() -> Outcome {
    for m in 1..=6 {
        let alg = Algebra::new(1, m, false).map_err(|e| e.to_string())?;
        let x = symmetric_product::<Rational>(alg, 0, 0).map_err(|e| e.to_string())?;
        for k in 0..=m as u32 {
            let engine = l1_norm(&x.pow(k));
            ensure(engine == norm_psi_pow(k, m as u32), || format!("k={} m={}: {}", k, m, engine))?;
        }
        let z = z_element::<Rational>(alg, 0).map_err(|e| e.to_string())?;
        let z2 = l1_norm(&(&z * &z));
        ensure(z2 == int(1 + 2 * m as i64), || format!("|z^2| = {} at m={}", z2, m))?;
    }
    Ok("0 <= k <= m <= 6 exact".into())
}

fn one_point_estimate() -> Outcome {
    let start = Instant::now();
    let e2 = exp_lower(&int(2), 40);
    let mut worst = int(0);
    for m in 0..=40u32 {
        for l in 0..=m {
            let r = ratio_r(l, m);
            ensure(r <= e2, || format!("R_{}({}) = {} exceeds e^2", l, m, rational_to_f64(&r)))?;
            if r > worst {
                worst = r;
            }
        }
    }
    let mut worst_ratio = int(0);
    for m in 0..=10 {
        for eps in eps_grid() {
            let (pin, dens) = one_point_norm_ratios(&SingleSiteParams { m, eps: eps.clone() }).map_err(|e| e.to_string())?;
            for v in [pin, dens] {
                ensure(v <= int(8), || format!("norm ratio {} at m={} eps={}", v, m, eps))?;
                if v > worst_ratio {
                    worst_ratio = v;
                }
            }
        }
    }
    within(Duration::from_secs(30), start)?;
    Ok(format!(
        "max R = {:.4} <= e^2, max norm ratio = {:.4} <= 8",
        rational_to_f64(&worst),
        rational_to_f64(&worst_ratio)
    ))
}

fn polymer_identity() -> Outcome {
    let start = Instant::now();
    let mut rng = common::rng(4);
    let graphs = [
        ("P3", WeightedGraph::path(3).unwrap()),
        ("P4", WeightedGraph::path(4).unwrap()),
        ("P5", WeightedGraph::path(5).unwrap()),
        ("K4", WeightedGraph::complete(4).unwrap()),
    ];
    let mut count = 0;
    for (name, base) in &graphs {
        for m in 1..=2 {
            for _ in 0..20 {
                let beta = common::positive_rational(&mut rng, 9);
                let eps = common::unit_rational(&mut rng, 5);
                let mut g = base.clone();
                g.set_uniform_eps(&eps).unwrap();
                let model = Model::new(&g, &ModelParams { beta: beta.clone(), m }).map_err(|e| e.to_string())?;
                let mut ex = ClusterExpansion::new(model).map_err(|e| e.to_string())?;
                let check = polymer_identity_check(&mut ex).map_err(|e| e.to_string())?;
                ensure(check.holds(), || {
                    format!("{} m={} beta={} eps={}: residual {}", name, m, beta, eps, check.residual())
                })?;
                count += 1;
            }
        }
    }
    within(Duration::from_secs(120), start)?;
    Ok(format!("{} exact instances, residual 0", count))
}

fn expansion_bound() -> Outcome {
    let graphs = [("P4", WeightedGraph::path(4).unwrap()), ("2x2", WeightedGraph::lattice(&[2, 2]).unwrap())];
    let mut comparisons = 0;
    let mut worst = 0.0f64;
    for (name, base) in &graphs {
        for beta in [rat(1, 20), rat(1, 50), rat(1, 100)] {
            for eps in [int(0), rat(1, 2)] {
                let mut g = base.clone();
                g.set_uniform_eps(&eps).unwrap();
                let model = Model::new(&g, &ModelParams { beta: beta.clone(), m: 1 }).map_err(|e| e.to_string())?;
                let n = g.num_vertices();
                let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
                let mut ex = ClusterExpansion::new(model.clone()).map_err(|e| e.to_string())?;
                let table = ex.table(&pairs, 1).map_err(|e| e.to_string())?;
                for &(i, j) in &pairs {
                    let exact = rational_to_f64(&model.two_point(i, j, 1).map_err(|e| e.to_string())?).abs();
                    let bound = mayer_bound(&table, i, j, 1, std::f64::consts::E);
                    let b = bound.bound.ok_or_else(|| format!("{} beta={} eps={}: B = {} >= 1", name, beta, eps, bound.b_value))?;
                    ensure(exact < b, || format!("{} beta={} eps={} ({},{}): {} vs {}", name, beta, eps, i, j, exact, b))?;
                    worst = worst.max(exact / b);
                    comparisons += 1;
                }
            }
        }
    }
    Ok(format!("{} comparisons, zero violations, max |<>|/bound = {:.3}", comparisons, worst))
}

fn decay_reproduction() -> Outcome {
    let start = Instant::now();
    let beta = rat(1, 100);
    let g = WeightedGraph::path(7).unwrap();
    let p = ModelParams { beta: beta.clone(), m: 1 };
    let profile = two_point_profile(&g, &p, 0).map_err(|e| e.to_string())?;
    for j in 1..profile.len() {
        ensure(profile[j] < profile[j - 1], || format!("not decreasing at j={}", j))?;
    }
    let report = activity_bound_check(&g, &p, 7, f64::INFINITY).map_err(|e| e.to_string())?;
    ensure(report.counterexamples.is_empty(), || format!("activity without tree: {:?}", report.counterexamples))?;
    let c0 = 2.0 * report.c_emp;
    let rate = rational_from_f64(c0).unwrap() * &beta;
    for (j, v) in profile.iter().enumerate() {
        let bound = pow(&rate, j as u32);
        ensure(*v <= bound, || format!("j={}: {} > {}", j, rational_to_f64(v), rational_to_f64(&bound)))?;
    }
    let points: Vec<(f64, f64)> = profile.iter().enumerate().map(|(j, v)| (j as f64, rational_to_f64(v).ln())).collect();
    let slope = fit_slope(&points).unwrap();
    let target = rational_to_f64(&beta).ln();
    ensure((slope - target).abs() <= 1.0, || format!("slope {} vs log beta {}", slope, target))?;
    within(Duration::from_secs(300), start)?;
    Ok(format!("C_emp = {:.4}, slope = {:.4}, log beta = {:.4}", report.c_emp, slope, target))
}

fn ursell_tree_bound() -> Outcome {
    let subsets: Vec<VertexSet> = (1..64).collect();
    let mut total = 0u64;
    let mut graphs = 0;
    for n in 1..=5usize {
        // overlap pattern (pair bits) -> representative family
        let mut seen: HashMap<u32, Vec<VertexSet>> = HashMap::new();
        let mut idx = vec![0usize; n];
        loop {
            let fam: Vec<VertexSet> = idx.iter().map(|&i| subsets[i]).collect();
            let mut pattern = 0u32;
            let mut bit = 0;
            for a in 0..n {
                for b in a + 1..n {
                    if fam[a] & fam[b] != 0 {
                        pattern |= 1 << bit;
                    }
                    bit += 1;
                }
            }
            seen.entry(pattern).or_insert(fam);
            total += 1;
            // next multiset: nondecreasing indices
            let mut k = n;
            while k > 0 && idx[k - 1] == subsets.len() - 1 {
                k -= 1;
            }
            if k == 0 {
                break;
            }
            idx[k - 1] += 1;
            for t in k..n {
                idx[t] = idx[k - 1];
            }
        }
        for fam in seen.values() {
            let phi = int(phi_conn(fam));
            let trees = phi_tree_bound(fam).map_err(|e| e.to_string())?;
            ensure(phi.abs() <= trees, || format!("{:?}: phi = {}, tree bound = {}", fam, phi, trees))?;
        }
        graphs += seen.len();
    }
    Ok(format!("{} families, {} distinct overlap patterns", total, graphs))
}

fn exponential_identity() -> Outcome {
    let mut rng = common::rng(8);
    for trial in 0..20 {
        let f: Vec<Rational> = (0..6).map(|_| rat(rng.gen_range(-9..=9), rng.gen_range(1..=9))).collect();
        let check = exp_partition_identity_check(&f, 6);
        ensure(check.holds(), || format!("trial {}: {:?} vs {:?}", trial, check.lhs, check.rhs))?;
    }
    Ok("20 random f, total size <= 6".into())
}

fn arboreal_duality() -> Outcome {
    let start = Instant::now();
    let mut rng = common::rng(9);
    for trial in 0..100 {
        let g = common::random_graph(&mut rng, 6, 9, true);
        let fermionic = h02_partition(&g).map_err(|e| e.to_string())?;
        let forests = arboreal_z(&g).map_err(|e| e.to_string())?;
        ensure(fermionic == forests, || format!("trial {}: {} vs {}", trial, fermionic, forests))?;
    }
    for beta in [rat(1, 3), rat(2, 7), int(1)] {
        let g = WeightedGraph::complete(3).unwrap().scaled(&beta);
        let expected = int(1) + int(3) * &beta + int(3) * &beta * &beta;
        ensure(h02_partition(&g).map_err(|e| e.to_string())? == expected, || format!("K3 at beta={}", beta))?;
        ensure(arboreal_z(&g).map_err(|e| e.to_string())? == expected, || format!("K3 forests at beta={}", beta))?;
    }
    within(Duration::from_secs(120), start)?;
    Ok("100 random graphs and K3 closed form".into())
}

fn matrix_tree() -> Outcome {
    let start = Instant::now();
    let mut rng = common::rng(10);
    for trial in 0..50 {
        let g = common::random_graph(&mut rng, 7, 14, false);
        let all = g.all_vertices();
        let k = kirchhoff_tree_sum(&g, all).map_err(|e| e.to_string())?;
        let b = brute_force_tree_sum(&g, all).map_err(|e| e.to_string())?;
        ensure(k == b, || format!("trial {}: {} vs {}", trial, k, b))?;
    }
    for n in 1..=8usize {
        let g = WeightedGraph::complete(n).unwrap();
        let cayley = int((n as i64).pow(n.saturating_sub(2) as u32));
        let k = kirchhoff_tree_sum(&g, g.all_vertices()).map_err(|e| e.to_string())?;
        ensure(k == cayley, || format!("K_{}: {}", n, k))?;
    }
    for trial in 0..50 {
        let g = common::random_graph(&mut rng, 7, 14, false);
        let d: Vec<Rational> = (0..g.num_vertices()).map(|_| common::unit_rational(&mut rng, 6)).collect();
        let check = rooted_forest_det_check(&g, &d).map_err(|e| e.to_string())?;
        ensure(check.holds(), || format!("trial {}: {} vs {}", trial, check.determinant, check.forest_sum))?;
    }
    within(Duration::from_secs(60), start)?;
    Ok("50 tree sums, K_N for N <= 8, 50 rooted-forest determinants".into())
}

fn edge_norm_lemmas() -> Outcome {
    let g = WeightedGraph::path(4).unwrap();
    let s_grid = [int(0), rat(1, 2), int(1)];
    let mut checks = 0;
    for m in 1..=3 {
        for beta in [rat(1, 10), rat(1, 100)] {
            let report = verify_edge_norm_estimates(&g, &beta, m, &s_grid).map_err(|e| e.to_string())?;
            if let Some(bad) = report.checks.iter().find(|c| !c.holds()) {
                return Err(format!("m={} beta={}: {} on {:?} at s={}: {} > {}", m, beta, bad.name, bad.edge, bad.s, bad.lhs, bad.rhs));
            }
            let closed = &beta * int(1 + 2 * m as i64);
            ensure(report.a_norms.iter().all(|(_, a)| *a == closed), || format!("|A| != beta(1+2m) at m={}", m))?;
            checks += report.checks.len();
        }
    }
    Ok(format!("{} exact inequalities on all edges of P4", checks))
}

fn d_matrix() -> Outcome {
    let mut rng = common::rng(12);
    let mut floor = f64::INFINITY;
    for eps in [rat(1, 10), int(1)] {
        let mut g = WeightedGraph::path(4).unwrap();
        g.set_uniform_eps(&eps).unwrap();
        for trial in 0..50 {
            let t = TField { t: (0..4).map(|_| rng.gen_range(-3.0..3.0)).collect() };
            let beta = rng.gen_range(0.01..1.0);
            let d = build_d_matrix(&g, beta, &t).map_err(|e| e.to_string())?;
            let pos = d_matrix_positivity(&d, &t);
            ensure(pos.is_positive(1e-10), || format!("eps={} trial {}: {:?}", eps, trial, pos))?;
            floor = floor.min(pos.min_eigenvalue);
        }
    }
    Ok(format!("100 t-fields, eigenvalue floor {:.3e}", floor))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("single-site closed form", single_site_closed_form),
        ("norm formulas", norm_formulas),
        ("one-point estimate", one_point_estimate),
        ("polymer identity", polymer_identity),
        ("expansion bound", expansion_bound),
        ("decay reproduction", decay_reproduction),
        ("Ursell tree bound", ursell_tree_bound),
        ("exponential identity", exponential_identity),
        ("arboreal duality", arboreal_duality),
        ("matrix-tree identities", matrix_tree),
        ("edge norm estimates", edge_norm_lemmas),
        ("D-matrix positivity", d_matrix),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        match outcome {
            Ok(detail) => println!("criterion {:>2} {:<24} PASS ({:.2?}) {}", k + 1, name, took, detail),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} {:<24} FAIL ({:.2?}) {}", k + 1, name, took, why);
            }
        }
    }
    println!("acceptance: {} passed, {} failed", criteria.len() - failed, failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
