//! JSON report: `{command, inputs, results, checks, timing?}`.

use hyperfermi_core::Rational;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::input::rational_string;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// The bound exists only conditionally and the condition failed; not a
    /// violation.
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub lhs: Value,
    pub rhs: Value,
    pub tolerance: Value,
}

impl Check {
    /// Exact comparison `lhs relation rhs`.
    pub fn exact(name: impl Into<String>, ok: bool, lhs: &Rational, rhs: &Rational) -> Self {
        Check {
            name: name.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            lhs: rational(lhs),
            rhs: rational(rhs),
            tolerance: Value::String("0/1".into()),
        }
    }

    pub fn float(name: impl Into<String>, ok: bool, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            lhs: float(lhs),
            rhs: float(rhs),
            tolerance: float(tolerance),
        }
    }
}

pub fn rational(r: &Rational) -> Value {
    Value::String(rational_string(r))
}

/// Non-finite values become `null`.
pub fn float(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}

pub fn opt_float(v: Option<f64>) -> Value {
    v.map_or(Value::Null, float)
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: Map<String, Value>,
    pub results: Value,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<Value>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report { command: command.into(), inputs: Map::new(), results: Value::Null, checks: Vec::new(), timing: None }
    }

    pub fn input(&mut self, key: &str, value: impl Into<Value>) {
        self.inputs.insert(key.into(), value.into());
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }
}
