//! Two-point functions, decay bounds and empirical constants.

use clap::{Args, ValueEnum};
use hyperfermi_core::bounds::{
    activity_bound_check, exp_decay_bound, nn_decay_bound, poly_decay_bound, DecayBoundReport, InteractionKind,
    Metric,
};
use hyperfermi_core::cluster::{mayer_bound, two_point_series, ClusterExpansion};
use hyperfermi_core::graph::{members, WeightedGraph};
use hyperfermi_core::model::{Model, ModelParams};
use hyperfermi_core::scalar::{int, rational_from_f64, rational_to_f64};
use hyperfermi_core::{Rational, Scalar};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::input::{load_graph, nonnegative, parse_float, parse_list, parse_lattice, parse_rational, rational_string};
use crate::report::{float, opt_float, rational, Check, Report, Status};
use crate::{CliError, GraphArgs, Output};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Float,
}

#[derive(Args, Debug)]
pub struct TwoPointArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long, default_value_t = 1)]
    m: usize,
    /// Inverse temperature; a rational string in exact mode.
    #[arg(long)]
    beta: String,
    /// Uniform pinning field, overriding the graph's.
    #[arg(long)]
    eps: Option<String>,
    #[arg(long)]
    i: usize,
    #[arg(long)]
    j: usize,
    /// Color of the observable.
    #[arg(long, default_value_t = 1)]
    alpha: usize,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    mode: Mode,
    /// Also evaluate the cluster expansion up to this many polymers.
    #[arg(long)]
    series: Option<usize>,
    /// Activity constant of the expansion bound.
    #[arg(long, default_value_t = std::f64::consts::E)]
    c: f64,
}

fn series_results<S: Scalar>(
    g: &WeightedGraph,
    beta: S,
    args: &TwoPointArgs,
    value: &S,
    encode: impl Fn(&S) -> Value,
    report: &mut Report,
) -> Result<Value, CliError> {
    let Some(n_max) = args.series else {
        return Ok(Value::Null);
    };
    if n_max == 0 {
        return Err(CliError::Parse("--series needs at least one term".into()));
    }
    let model = Model::new(g, &ModelParams { beta, m: args.m })?;
    let mut ex = ClusterExpansion::new(model)?;
    let table = ex.table(&[(args.i, args.j)], args.alpha)?;
    let s = two_point_series(&table, ex.site_two_point(args.i), args.i, args.j, args.alpha, n_max, args.c);
    let mayer = mayer_bound(&table, args.i, args.j, args.alpha, args.c);
    let last = s.partial_sums.last().cloned().unwrap_or_else(S::zero);
    let error = (last - value.clone()).abs().to_f64();
    let magnitude = value.abs().to_f64();
    // float mode compares up to rounding of the partial sums
    let slack = if S::MODE == hyperfermi_core::scalar::CoefficientMode::Float { 1e-12 * magnitude.max(1.0) } else { 0.0 };
    let conditional = |name: &str, lhs: f64, rhs: Option<f64>| match rhs {
        Some(r) => Check::float(name, lhs <= r + slack, lhs, r, slack),
        None => Check { status: Status::Inconclusive, ..Check::float(name, true, lhs, f64::INFINITY, slack) },
    };
    report.checks.push(conditional("series_within_tail", error, s.tail_bound));
    report.checks.push(conditional("expansion_bound", magnitude, mayer.bound));
    Ok(json!({
        "terms": n_max,
        "partial_sums": s.partial_sums.iter().map(&encode).collect::<Vec<_>>(),
        "a": float(s.a_value),
        "b": float(s.b_value),
        "tail_bound": opt_float(s.tail_bound),
        "truncation_error": float(error),
        "expansion_bound": opt_float(mayer.bound),
    }))
}

pub fn two_point(args: &TwoPointArgs) -> Result<Report, CliError> {
    let eps = match (args.mode, args.eps.as_deref()) {
        (_, None) => None,
        (Mode::Exact, Some(e)) => Some(nonnegative("eps", parse_rational(e)?)?),
        (Mode::Float, Some(e)) => {
            let v = parse_float(e)?;
            Some(nonnegative("eps", rational_from_f64(v).ok_or_else(|| CliError::Parse("eps must be finite".into()))?)?)
        }
    };
    let (g, label) = load_graph(args.graph.graph.as_deref(), args.graph.lattice.as_deref(), eps.as_ref(), None)?;
    let mut report = Report::new("two-point");
    report.input("graph", label);
    report.input("m", args.m);
    report.input("beta", args.beta.clone());
    report.input("eps", eps.as_ref().map_or(Value::Null, rational));
    report.input("i", args.i);
    report.input("j", args.j);
    report.input("alpha", args.alpha);
    report.input("mode", if args.mode == Mode::Exact { "exact" } else { "float" });
    report.input("series", args.series.map_or(Value::Null, Value::from));
    report.input("c", float(args.c));

    report.results = match args.mode {
        Mode::Exact => {
            let beta = nonnegative("beta", parse_rational(&args.beta)?)?;
            let value = Model::new(&g, &ModelParams { beta: beta.clone(), m: args.m })?.two_point(args.i, args.j, args.alpha)?;
            let series = series_results(&g, beta, args, &value, rational, &mut report)?;
            json!({ "value": rational(&value), "value_f64": float(rational_to_f64(&value)), "series": series })
        }
        Mode::Float => {
            let beta = parse_float(&args.beta)?;
            if beta < 0.0 {
                return Err(CliError::Parse("beta must be nonnegative".into()));
            }
            let value = Model::new(&g, &ModelParams { beta, m: args.m })?.two_point(args.i, args.j, args.alpha)?;
            let series = series_results(&g, beta, args, &value, |v: &f64| float(*v), &mut report)?;
            json!({ "value": float(value), "series": series })
        }
    };
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ClassArg {
    Nn,
    Exp,
    Poly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MetricArg {
    Euclidean,
    Log,
}

#[derive(Args, Debug)]
pub struct BoundArgs {
    #[arg(long, value_enum)]
    class: ClassArg,
    #[arg(long)]
    beta: String,
    #[arg(long, default_value_t = 1)]
    m: usize,
    #[arg(long, default_value_t = 1)]
    d: u32,
    /// Distance between the two sites; an integer for nearest-neighbour
    /// couplings, the metric distance otherwise.
    #[arg(long, default_value = "0")]
    dist: String,
    /// Decay rate of exponential couplings.
    #[arg(long)]
    rate: Option<String>,
    #[arg(long, value_enum, default_value_t = MetricArg::Euclidean)]
    metric: MetricArg,
    /// Decay exponent of polynomial couplings.
    #[arg(long)]
    exponent: Option<String>,
    /// Activity constant.
    #[arg(long, default_value_t = std::f64::consts::E)]
    c: f64,
    /// Rate constant for the reported `(C_0 βm)^dist` scaling.
    #[arg(long)]
    c0: Option<f64>,
}

pub fn decay_report_json(r: &DecayBoundReport) -> Value {
    let class = match r.class.kind {
        InteractionKind::NearestNeighbour => json!({ "kind": "nearest_neighbour", "dim": r.class.dim }),
        InteractionKind::Exponential { rate, metric } => json!({
            "kind": "exponential",
            "rate": float(rate),
            "metric": if metric == Metric::Log { "log" } else { "euclidean" },
            "dim": r.class.dim,
        }),
        InteractionKind::Polynomial { exponent } => {
            json!({ "kind": "polynomial", "exponent": float(exponent), "dim": r.class.dim })
        }
    };
    json!({
        "class": class,
        "beta": float(r.beta),
        "m": r.m,
        "dist": float(r.dist),
        "a": float(r.a_value),
        "b": float(r.b_value),
        "bound": opt_float(r.bound),
        "convergent": r.convergent,
        "truncation_tail": float(r.truncation_tail),
        "constants": {
            "c": float(r.constants.c),
            "c0": opt_float(r.constants.c0),
            "lattice_factor": float(r.constants.lattice_factor),
        },
        "scaling": opt_float(r.scaling),
    })
}

pub fn bound(args: &BoundArgs) -> Result<Report, CliError> {
    let beta = parse_float(&args.beta)?;
    let dist = parse_float(&args.dist)?;
    let required = |v: &Option<String>, flag: &str| {
        v.as_deref().ok_or_else(|| CliError::Parse(format!("--class needs {}", flag))).and_then(parse_float)
    };
    let r = match args.class {
        ClassArg::Nn => {
            if dist < 0.0 || dist.fract() != 0.0 || dist > f64::from(u32::MAX) {
                return Err(CliError::Parse("nearest-neighbour distances are nonnegative integers".into()));
            }
            nn_decay_bound(beta, args.m, args.d, dist as u32, args.c, args.c0)?
        }
        ClassArg::Exp => {
            let metric = if args.metric == MetricArg::Log { Metric::Log } else { Metric::Euclidean };
            let mut r = exp_decay_bound(beta, args.m, required(&args.rate, "--rate")?, metric, args.d, dist, args.c)?;
            with_scaling(&mut r, args.c0);
            r
        }
        ClassArg::Poly => {
            let mut r = poly_decay_bound(beta, args.m, required(&args.exponent, "--exponent")?, args.d, dist, args.c)?;
            with_scaling(&mut r, args.c0);
            r
        }
    };
    let mut report = Report::new("bound");
    report.input("class", format!("{:?}", args.class).to_lowercase());
    report.input("beta", float(beta));
    report.input("m", args.m);
    report.input("d", args.d);
    report.input("dist", float(dist));
    report.input("c", float(args.c));
    report.input("c0", opt_float(args.c0));
    if let Some(rate) = &args.rate {
        report.input("rate", rate.clone());
        report.input("metric", format!("{:?}", args.metric).to_lowercase());
    }
    if let Some(a) = &args.exponent {
        report.input("exponent", a.clone());
    }
    report.checks.push(Check {
        status: if r.convergent { Status::Pass } else { Status::Inconclusive },
        ..Check::float("series_convergent", true, r.b_value, 1.0, 0.0)
    });
    report.results = decay_report_json(&r);
    Ok(report)
}

fn with_scaling(r: &mut DecayBoundReport, c0: Option<f64>) {
    r.constants.c0 = c0;
    r.scaling = c0.map(|c0| (c0 * r.beta * r.m as f64).powf(r.dist));
}

#[derive(Args, Debug)]
pub struct ConstantsArgs {
    /// Emit the table as CSV instead of a JSON report.
    #[arg(long)]
    extract: bool,
    /// Comma-separated side lengths.
    #[arg(long, default_value = "3,4,5")]
    lengths: String,
    /// Lattice dimension; every side has the same length.
    #[arg(long, default_value_t = 1)]
    dim: usize,
    #[arg(long, default_value = "1,2")]
    m: String,
    #[arg(long, default_value = "1/20,1/50")]
    beta: String,
    #[arg(long, default_value = "0,1/2")]
    eps: String,
    /// Largest polymer size; every vertex when absent.
    #[arg(long)]
    y_max: Option<usize>,
    /// Constant the measured one is compared with.
    #[arg(long, default_value_t = std::f64::consts::E)]
    c_probe: f64,
}

struct Row {
    lattice: String,
    m: usize,
    beta: Rational,
    eps: Rational,
    c_emp: f64,
    worst: Option<Vec<usize>>,
    polymers: usize,
    counterexamples: usize,
    passes: bool,
}

pub fn constants(args: &ConstantsArgs) -> Result<Output, CliError> {
    let lengths = parse_list(&args.lengths, |x| x.trim().parse::<usize>().map_err(|_| CliError::Parse(format!("bad length '{}'", x))))?;
    let ms = parse_list(&args.m, |x| x.trim().parse::<usize>().map_err(|_| CliError::Parse(format!("bad m '{}'", x))))?;
    let betas = parse_list(&args.beta, |x| parse_rational(x).and_then(|r| nonnegative("beta", r)))?;
    let epss = parse_list(&args.eps, |x| parse_rational(x).and_then(|r| nonnegative("eps", r)))?;
    if args.dim == 0 {
        return Err(CliError::Parse("--dim must be positive".into()));
    }
    let mut jobs = Vec::new();
    for &l in &lengths {
        let spec = format!("{}d:{}", args.dim, vec![l.to_string(); args.dim].join("x"));
        for &m in &ms {
            for beta in &betas {
                for eps in &epss {
                    jobs.push((spec.clone(), m, beta.clone(), eps.clone()));
                }
            }
        }
    }
    let rows: Vec<Row> = jobs
        .par_iter()
        .map(|(spec, m, beta, eps)| {
            let mut g = parse_lattice(spec)?;
            g.set_uniform_eps(eps)?;
            let y_max = args.y_max.unwrap_or(g.num_vertices());
            let r = activity_bound_check(&g, &ModelParams { beta: beta.clone(), m: *m }, y_max, args.c_probe)?;
            Ok(Row {
                lattice: spec.clone(),
                m: *m,
                beta: beta.clone(),
                eps: eps.clone(),
                c_emp: r.c_emp,
                worst: r.worst.map(members),
                polymers: r.polymers_checked,
                counterexamples: r.counterexamples.len(),
                passes: r.passes(),
            })
        })
        .collect::<Vec<Result<Row, CliError>>>()
        .into_iter()
        .collect::<Result<_, _>>()?;
    let passed = rows.iter().all(|r| r.passes);
    let worst_label = |w: &Option<Vec<usize>>| {
        w.as_ref().map_or(String::new(), |v| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";"))
    };

    if args.extract {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| CliError::Parse(format!("csv: {}", e));
        w.write_record(["lattice", "m", "beta", "eps", "c_emp", "worst_polymer", "polymers_checked", "counterexamples"])
            .map_err(io)?;
        for r in &rows {
            w.write_record([
                r.lattice.clone(),
                r.m.to_string(),
                rational_string(&r.beta),
                rational_string(&r.eps),
                format!("{:e}", r.c_emp),
                worst_label(&r.worst),
                r.polymers.to_string(),
                r.counterexamples.to_string(),
            ])
            .map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Parse(format!("csv: {}", e)))?;
        return Ok(Output::Text(String::from_utf8(bytes).expect("csv output is utf-8"), passed));
    }

    let mut report = Report::new("constants");
    report.input("lengths", lengths);
    report.input("dim", args.dim);
    report.input("m", ms);
    report.input("beta", betas.iter().map(rational_string).collect::<Vec<_>>());
    report.input("eps", epss.iter().map(rational_string).collect::<Vec<_>>());
    report.input("y_max", args.y_max.map_or(Value::Null, Value::from));
    report.input("c_probe", float(args.c_probe));
    let mut table = Vec::new();
    for r in &rows {
        let name = format!("activity_bound[{},m={},beta={},eps={}]", r.lattice, r.m, r.beta, r.eps);
        report.checks.push(Check {
            status: if r.passes { Status::Pass } else { Status::Fail },
            ..Check::float(name, true, r.c_emp, args.c_probe, 0.0)
        });
        let mut row = Map::new();
        row.insert("lattice".into(), r.lattice.clone().into());
        row.insert("m".into(), r.m.into());
        row.insert("beta".into(), rational(&r.beta));
        row.insert("eps".into(), rational(&r.eps));
        row.insert("c_emp".into(), float(r.c_emp));
        row.insert("worst_polymer".into(), r.worst.clone().map_or(Value::Null, Value::from));
        row.insert("polymers_checked".into(), r.polymers.into());
        row.insert("counterexamples".into(), r.counterexamples.into());
        table.push(Value::Object(row));
    }
    let max = rows.iter().map(|r| r.c_emp).fold(0.0, f64::max);
    report.results = json!({ "rows": table, "max_c_emp": float(max), "beta_m_cap": rational(&int(1)) });
    Ok(Output::Report(report))
}
