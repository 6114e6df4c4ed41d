//! Exact verification suites.

use clap::Args;
use hyperfermi_core::bounds::{exp_lower, verify_edge_norm_estimates};
use hyperfermi_core::cluster::{polymer_identity_check, ClusterExpansion};
use hyperfermi_core::forests::{arboreal_z, h02_partition};
use hyperfermi_core::graph::WeightedGraph;
use hyperfermi_core::grassmann::{l1_norm, symmetric_product, Algebra};
use hyperfermi_core::model::{z_element, Model, ModelParams};
use hyperfermi_core::scalar::{big, binomial, int, pow, rational_to_f64};
use hyperfermi_core::singlesite::{
    coeff_a, norm_psi_pow, one_point_norm_ratios, ratio_r, single_site_z, single_site_z_engine, SingleSiteParams,
};
use hyperfermi_core::{Rational, Scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::input::{graph_json, load_graph, nonnegative, parse_list, parse_rational, rational_string};
use crate::report::{rational, Check, Report};
use crate::{CliError, GraphArgs};

/// Rational `p/q` with `q ≤ den` and `lo ≤ p ≤ q`.
fn random_rational(rng: &mut ChaCha8Rng, den: i64, lo: i64) -> Rational {
    let q = rng.gen_range(1..=den);
    hyperfermi_core::scalar::rat(rng.gen_range(lo..=q), q)
}

fn rational_list(s: &str) -> Result<Vec<Rational>, CliError> {
    parse_list(s, |x| parse_rational(x).and_then(|r| nonnegative("eps", r)))
}

fn usize_list(s: &str) -> Result<Vec<usize>, CliError> {
    parse_list(s, |x| x.trim().parse().map_err(|_| CliError::Parse(format!("'{}' is not a nonnegative integer", x))))
}

fn collect<T: Send>(results: Vec<Result<T, CliError>>) -> Result<Vec<T>, CliError> {
    results.into_iter().collect()
}

#[derive(Args, Debug)]
pub struct SingleSiteArgs {
    /// Largest m for the closed form and the norm formulas.
    #[arg(long, default_value_t = 6)]
    m_max: usize,
    /// Largest m for the ratio sums R_l.
    #[arg(long, default_value_t = 40)]
    ratio_m_max: u32,
    /// Largest m for the one-point norm ratios.
    #[arg(long, default_value_t = 10)]
    norm_ratio_m_max: usize,
    /// Comma-separated pinning fields.
    #[arg(long, default_value = "0,1/2,1,3")]
    eps: String,
}

pub fn single_site(args: &SingleSiteArgs) -> Result<Report, CliError> {
    let eps = rational_list(&args.eps)?;
    let mut report = Report::new("verify-single-site");
    report.input("m_max", args.m_max);
    report.input("ratio_m_max", args.ratio_m_max);
    report.input("norm_ratio_m_max", args.norm_ratio_m_max);
    report.input("eps", eps.iter().map(rational_string).collect::<Vec<_>>());

    let mut z_table = Vec::new();
    for m in 0..=args.m_max {
        for e in &eps {
            let p = SingleSiteParams { m, eps: e.clone() };
            let closed = single_site_z(&p);
            let engine = single_site_z_engine(&p)?;
            let name = format!("z_closed_form[m={},eps={}]", m, e);
            report.checks.push(Check::exact(name, closed == engine, &closed, &engine));
            z_table.push(json!({ "m": m, "eps": rational_string(e), "z": rational_string(&closed) }));
        }
        let central = coeff_a(m as u32, 0).abs();
        let expected = big(binomial(2 * m as u32, m as u32)) / pow(&int(2), 2 * m as u32);
        report.checks.push(Check::exact(format!("central_coefficient[m={}]", m), central == expected, &central, &expected));
    }
    for m in 1..=args.m_max {
        let alg = Algebra::new(1, m, false)?;
        let x = symmetric_product::<Rational>(alg, 0, 0)?;
        for k in 0..=m as u32 {
            let engine = l1_norm(&x.pow(k));
            let closed = norm_psi_pow(k, m as u32);
            report.checks.push(Check::exact(format!("psi_power_norm[m={},k={}]", m, k), engine == closed, &engine, &closed));
        }
        let z = z_element::<Rational>(alg, 0)?;
        let z2 = l1_norm(&(&z * &z));
        let closed = int(1 + 2 * m as i64);
        report.checks.push(Check::exact(format!("z_squared_norm[m={}]", m), z2 == closed, &z2, &closed));
    }

    // lower bound of e², so passing is rigorous
    let e2 = exp_lower(&int(2), 40);
    let ratios: Vec<Rational> = (0..=args.ratio_m_max)
        .into_par_iter()
        .map(|m| (0..=m).map(|l| ratio_r(l, m)).max().unwrap_or_else(|| int(0)))
        .collect();
    for (m, r) in ratios.iter().enumerate() {
        report.checks.push(Check::exact(format!("ratio_sum[m={}]", m), *r <= e2, r, &e2));
    }
    let eight = int(8);
    let mut worst_norm_ratio = int(0);
    for m in 0..=args.norm_ratio_m_max {
        for e in &eps {
            let (pin, dens) = one_point_norm_ratios(&SingleSiteParams { m, eps: e.clone() })?;
            for (label, v) in [("pinning", pin), ("density", dens)] {
                let name = format!("one_point_ratio[{},m={},eps={}]", label, m, e);
                report.checks.push(Check::exact(name, v <= eight, &v, &eight));
                worst_norm_ratio = worst_norm_ratio.max(v);
            }
        }
    }
    let worst_r = ratios.iter().max().cloned().unwrap_or_else(|| int(0));
    report.results = json!({
        "single_site_z": z_table,
        "max_ratio_sum": rational(&worst_r),
        "max_ratio_sum_f64": rational_to_f64(&worst_r),
        "max_one_point_ratio": rational(&worst_norm_ratio),
    });
    Ok(report)
}

#[derive(Args, Debug)]
pub struct PolymerArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Comma-separated numbers of fermion pairs.
    #[arg(long, default_value = "1,2")]
    m: String,
    /// Fixed inverse temperature; random in (0, 1] per trial when absent.
    #[arg(long)]
    beta: Option<String>,
    /// Fixed uniform pinning; random in [0, 1] per vertex when absent.
    #[arg(long)]
    eps: Option<String>,
    #[arg(long, default_value_t = 5)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Default instances: paths on three to five vertices and `K_4`.
fn default_polymer_graphs() -> Result<Vec<(String, WeightedGraph)>, CliError> {
    let mut out = Vec::new();
    for n in 3..=5 {
        out.push((format!("P{}", n), WeightedGraph::path(n)?));
    }
    out.push(("K4".into(), WeightedGraph::complete(4)?));
    Ok(out)
}

pub fn polymer(args: &PolymerArgs) -> Result<Report, CliError> {
    let ms = usize_list(&args.m)?;
    let beta = args.beta.as_deref().map(parse_rational).transpose()?.map(|b| nonnegative("beta", b)).transpose()?;
    let eps = args.eps.as_deref().map(parse_rational).transpose()?.map(|e| nonnegative("eps", e)).transpose()?;
    let graphs = if args.graph.graph.is_some() || args.graph.lattice.is_some() {
        vec![load_graph(args.graph.graph.as_deref(), args.graph.lattice.as_deref(), None, None)?]
            .into_iter()
            .map(|(g, label)| (label, g))
            .collect()
    } else {
        default_polymer_graphs()?
    };
    let trials = if beta.is_some() && eps.is_some() { 1 } else { args.trials };

    let mut report = Report::new("verify-polymer");
    report.input("graphs", graphs.iter().map(|(l, _)| l.clone()).collect::<Vec<_>>());
    report.input("m", ms.clone());
    report.input("beta", beta.as_ref().map_or(Value::Null, rational));
    report.input("eps", eps.as_ref().map_or(Value::Null, rational));
    report.input("trials", trials);
    report.input("seed", args.seed);

    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut jobs = Vec::new();
    for (label, g) in &graphs {
        for &m in &ms {
            for trial in 0..trials {
                let b = beta.clone().unwrap_or_else(|| random_rational(&mut rng, 8, 1));
                let mut inst = g.clone();
                for v in 0..inst.num_vertices() {
                    let e = eps.clone().unwrap_or_else(|| random_rational(&mut rng, 5, 0));
                    inst.set_eps(v, e)?;
                }
                jobs.push((format!("{},m={},trial={}", label, m, trial), inst, b, m));
            }
        }
    }
    let outcomes = collect(
        jobs.par_iter()
            .map(|(name, g, b, m)| {
                let model = Model::new(g, &ModelParams { beta: b.clone(), m: *m })?;
                let check = polymer_identity_check(&mut ClusterExpansion::new(model)?)?;
                Ok((name.clone(), b.clone(), g.eps_all().to_vec(), check))
            })
            .collect(),
    )?;
    let mut instances = Vec::new();
    for (name, b, e, check) in outcomes {
        report.checks.push(Check::exact(format!("polymer_identity[{}]", name), check.holds(), &check.lhs, &check.rhs));
        instances.push(json!({
            "instance": name,
            "beta": rational_string(&b),
            "eps": e.iter().map(rational_string).collect::<Vec<_>>(),
            "partition_function": rational_string(&check.lhs),
        }));
    }
    report.results = json!({ "instances": instances });
    Ok(report)
}

#[derive(Args, Debug)]
pub struct ArborealArgs {
    /// Fixed edge set, reweighted at random per trial. Random graphs with at
    /// most 6 vertices and 9 edges when absent.
    #[arg(long)]
    graph: Option<std::path::PathBuf>,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn random_graph(rng: &mut ChaCha8Rng) -> Result<WeightedGraph, CliError> {
    let n = rng.gen_range(1..=6);
    let mut g = WeightedGraph::new(n)?;
    let mut pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    for k in (1..pairs.len()).rev() {
        pairs.swap(k, rng.gen_range(0..=k));
    }
    let edges = rng.gen_range(0..=pairs.len().min(9));
    for &(i, j) in &pairs[..edges] {
        g.set_edge(i, j, random_rational(rng, 7, 1))?;
    }
    Ok(g)
}

pub fn arboreal(args: &ArborealArgs) -> Result<Report, CliError> {
    let base = args.graph.as_deref().map(|p| load_graph(Some(p), None, None, None)).transpose()?;
    let mut report = Report::new("verify-arboreal");
    report.input("graph", base.as_ref().map_or(Value::Null, |(_, label)| Value::String(label.clone())));
    report.input("trials", args.trials);
    report.input("seed", args.seed);

    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut graphs = Vec::with_capacity(args.trials);
    for _ in 0..args.trials {
        let mut g = match &base {
            Some((g, _)) => {
                let mut h = g.clone();
                for (i, j, _) in g.edges() {
                    h.set_edge(*i, *j, random_rational(&mut rng, 7, 1))?;
                }
                h
            }
            None => random_graph(&mut rng)?,
        };
        for v in 0..g.num_vertices() {
            g.set_eps(v, random_rational(&mut rng, 5, 0))?;
        }
        graphs.push(g);
    }
    let values = collect(
        graphs.par_iter().map(|g| Ok((h02_partition(g)?, arboreal_z(g)?))).collect::<Vec<Result<_, CliError>>>(),
    )?;
    let mut trials = Vec::new();
    for (t, (g, (fermionic, forests))) in graphs.iter().zip(values).enumerate() {
        report.checks.push(Check::exact(format!("duality[trial={}]", t), fermionic == forests, &fermionic, &forests));
        trials.push(json!({ "graph": graph_json(g), "z": rational_string(&forests) }));
    }
    if base.is_none() {
        let beta = random_rational(&mut rng, 9, 1);
        let k3 = WeightedGraph::complete(3)?.scaled(&beta);
        let z = arboreal_z(&k3)?;
        let closed = int(1) + int(3) * &beta + int(3) * &beta * &beta;
        report.checks.push(Check::exact(format!("k3_closed_form[beta={}]", beta), z == closed, &z, &closed));
    }
    report.results = json!({ "trials": trials });
    Ok(report)
}

#[derive(Args, Debug)]
pub struct NormsArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Comma-separated numbers of fermion pairs.
    #[arg(long, default_value = "1,2,3")]
    m: String,
    /// Comma-separated inverse temperatures.
    #[arg(long, default_value = "1/10,1/100")]
    beta: String,
    /// Interpolation parameters in [0, 1].
    #[arg(long, default_value = "0,1/2,1")]
    s_grid: String,
}

pub fn norms(args: &NormsArgs) -> Result<Report, CliError> {
    let (g, label) = load_graph(args.graph.graph.as_deref(), args.graph.lattice.as_deref(), None, Some("1d:4"))?;
    let ms = usize_list(&args.m)?;
    let betas = parse_list(&args.beta, |x| parse_rational(x).and_then(|r| nonnegative("beta", r)))?;
    let s_grid = parse_list(&args.s_grid, parse_rational)?;
    if s_grid.iter().any(|s| *s < int(0) || *s > int(1)) {
        return Err(CliError::Parse("s-grid values must lie in [0, 1]".into()));
    }
    let mut report = Report::new("verify-norms");
    report.input("graph", label);
    report.input("m", ms.clone());
    report.input("beta", betas.iter().map(rational_string).collect::<Vec<_>>());
    report.input("s_grid", s_grid.iter().map(rational_string).collect::<Vec<_>>());

    let mut constant = None;
    let mut a_norms = Vec::new();
    for &m in &ms {
        for beta in &betas {
            let r = verify_edge_norm_estimates(&g, beta, m, &s_grid)?;
            let closed = beta * int(1 + 2 * m as i64);
            let cap = beta * int(3 * m as i64);
            for (edge, a) in &r.a_norms {
                let name = format!("a_norm[edge=({},{}),m={},beta={}]", edge.0, edge.1, m, beta);
                report.checks.push(Check::exact(name, *a == closed && *a <= cap, a, &cap));
            }
            a_norms.push(json!({ "m": m, "beta": rational_string(beta), "norm": rational_string(&closed) }));
            for c in &r.checks {
                let name = format!("{}[edge=({},{}),s={},m={},beta={}]", c.name, c.edge.0, c.edge.1, c.s, m, beta);
                report.checks.push(Check::exact(name, c.holds(), &c.lhs, &c.rhs));
            }
            constant = Some(r.constant);
        }
    }
    report.results = json!({
        "constant": constant.as_ref().map_or(Value::Null, rational),
        "a_norms": a_norms,
    });
    Ok(report)
}
