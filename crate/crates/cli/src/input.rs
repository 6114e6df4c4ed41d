//! Parameter strings, graph JSON and lattice shorthand.

use std::collections::BTreeMap;
use std::str::FromStr;

use hyperfermi_core::graph::WeightedGraph;
use hyperfermi_core::scalar::{int, rational_to_f64};
use hyperfermi_core::Rational;
use serde::Deserialize;
use serde_json::Value;

use crate::CliError;

/// `p/q`, an integer, or a plain decimal such as `0.25` (read exactly).
/// Exponent notation is rejected: it is only accepted by [`parse_float`].
pub fn parse_rational(s: &str) -> Result<Rational, CliError> {
    let s = s.trim();
    let bad = || CliError::Parse(format!("'{}' is not a rational (expected p/q, an integer or a decimal)", s));
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let digits = format!("{}{}", whole, frac);
        let scale = format!("1{}", "0".repeat(frac.len()));
        let num = Rational::from_str(&digits).map_err(|_| bad())?;
        let den = Rational::from_str(&scale).map_err(|_| bad())?;
        return Ok(num / den);
    }
    let r = Rational::from_str(s).map_err(|_| bad())?;
    Ok(r)
}

/// Any float syntax, or a rational string.
pub fn parse_float(s: &str) -> Result<f64, CliError> {
    if let Ok(v) = s.trim().parse::<f64>() {
        if v.is_finite() {
            return Ok(v);
        }
    }
    parse_rational(s).map(|r| rational_to_f64(&r))
}

pub fn parse_list<T>(s: &str, item: impl Fn(&str) -> Result<T, CliError>) -> Result<Vec<T>, CliError> {
    s.split(',').filter(|x| !x.trim().is_empty()).map(|x| item(x)).collect()
}

pub fn nonnegative(name: &str, r: Rational) -> Result<Rational, CliError> {
    if r < int(0) {
        return Err(CliError::Parse(format!("{} must be nonnegative, got {}", name, r)));
    }
    Ok(r)
}

/// Always `p/q`, so integers read back unambiguously as rationals.
pub fn rational_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// `"1d:L"` or `"2d:LxW"` (or more axes), unit nearest-neighbour couplings.
pub fn parse_lattice(spec: &str) -> Result<WeightedGraph, CliError> {
    let bad = || CliError::Parse(format!("bad lattice '{}' (expected e.g. 1d:6 or 2d:3x4)", spec));
    let (dim, sizes) = spec.split_once(':').ok_or_else(bad)?;
    let dim: usize = dim.strip_suffix('d').and_then(|d| d.parse().ok()).ok_or_else(bad)?;
    let sizes: Vec<usize> = sizes.split('x').map(|x| x.parse().map_err(|_| bad())).collect::<Result<_, _>>()?;
    if dim == 0 || sizes.len() != dim {
        return Err(bad());
    }
    Ok(WeightedGraph::lattice(&sizes)?)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LatticeJson {
    dim: usize,
    length: usize,
    #[serde(rename = "J", default)]
    coupling: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphJson {
    vertices: Vec<usize>,
    #[serde(default)]
    edges: Vec<(usize, usize, Value)>,
    #[serde(default)]
    eps: BTreeMap<String, Value>,
}

fn json_rational(v: &Value) -> Result<Rational, CliError> {
    match v {
        Value::String(s) => parse_rational(s),
        Value::Number(n) if n.is_i64() => Ok(int(n.as_i64().unwrap_or_default())),
        _ => Err(CliError::Parse(format!("expected a rational string \"p/q\", got {}", v))),
    }
}

/// Graph JSON: `{"vertices":[0,..],"edges":[[i,j,"p/q"]],"eps":{"0":"p/q"}}`
/// with vertices labelled `0..n`, or `{"lattice":{"dim":d,"length":L,"J":"nn"}}`.
pub fn parse_graph_json(text: &str) -> Result<WeightedGraph, CliError> {
    let value: Value = serde_json::from_str(text).map_err(|e| CliError::Parse(format!("graph JSON: {}", e)))?;
    if let Some(lat) = value.get("lattice") {
        let lat: LatticeJson =
            serde_json::from_value(lat.clone()).map_err(|e| CliError::Parse(format!("lattice JSON: {}", e)))?;
        if lat.coupling.as_deref().is_some_and(|c| c != "nn") {
            return Err(CliError::Parse("only nearest-neighbour lattices (\"J\": \"nn\") are supported".into()));
        }
        if lat.dim == 0 {
            return Err(CliError::Parse("lattice dimension must be positive".into()));
        }
        return Ok(WeightedGraph::lattice(&vec![lat.length; lat.dim])?);
    }
    let spec: GraphJson = serde_json::from_value(value).map_err(|e| CliError::Parse(format!("graph JSON: {}", e)))?;
    let n = spec.vertices.len();
    let mut labels = spec.vertices.clone();
    labels.sort_unstable();
    if labels != (0..n).collect::<Vec<_>>() {
        return Err(CliError::Parse("graph vertices must be labelled 0..n-1".into()));
    }
    let mut g = WeightedGraph::new(n)?;
    for (i, j, w) in &spec.edges {
        if *i >= n || *j >= n {
            return Err(CliError::Parse(format!("edge [{}, {}] names an unknown vertex", i, j)));
        }
        g.set_edge(*i, *j, json_rational(w)?).map_err(|e| CliError::Parse(e.to_string()))?;
    }
    for (k, v) in &spec.eps {
        let j: usize = k.parse().map_err(|_| CliError::Parse(format!("eps key '{}' is not a vertex", k)))?;
        if j >= n {
            return Err(CliError::Parse(format!("eps key '{}' is not a vertex", k)));
        }
        g.set_eps(j, json_rational(v)?).map_err(|e| CliError::Parse(e.to_string()))?;
    }
    Ok(g)
}

/// Resolves `--graph` / `--lattice`, falling back to `default` lattice
/// shorthand. A `--eps` value overrides every vertex field.
pub fn load_graph(
    graph: Option<&std::path::Path>,
    lattice: Option<&str>,
    eps: Option<&Rational>,
    default: Option<&str>,
) -> Result<(WeightedGraph, String), CliError> {
    let (mut g, label) = match (graph, lattice) {
        (Some(_), Some(_)) => return Err(CliError::Parse("give either --graph or --lattice, not both".into())),
        (Some(path), None) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Parse(format!("cannot read {}: {}", path.display(), e)))?;
            (parse_graph_json(&text)?, path.display().to_string())
        }
        (None, Some(spec)) => (parse_lattice(spec)?, spec.to_string()),
        (None, None) => match default {
            Some(spec) => (parse_lattice(spec)?, spec.to_string()),
            None => return Err(CliError::Parse("--graph or --lattice is required".into())),
        },
    };
    if let Some(eps) = eps {
        g.set_uniform_eps(eps).map_err(|e| CliError::Parse(e.to_string()))?;
    }
    Ok((g, label))
}

/// Graph as JSON in the input schema.
pub fn graph_json(g: &WeightedGraph) -> Value {
    let eps: serde_json::Map<String, Value> = (0..g.num_vertices())
        .filter(|&j| *g.eps(j) != int(0))
        .map(|j| (j.to_string(), Value::String(rational_string(g.eps(j)))))
        .collect();
    serde_json::json!({
        "vertices": (0..g.num_vertices()).collect::<Vec<_>>(),
        "edges": g.edges().iter().map(|(i, j, w)| serde_json::json!([i, j, rational_string(w)])).collect::<Vec<_>>(),
        "eps": eps,
    })
}
