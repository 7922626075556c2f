//! Deterministic JSON and CSV serialisation of a run.
//!
//! Floats are written with 17 significant digits in exponent form; exact
//! rationals are written as `"num/den"` strings next to their float value.

use std::str::FromStr;

use serde_json::{Map, Number, Value};

use ffsieve::bounds::{rational_to_f64, BigRational, BoundReport};

use crate::config::{ExperimentConfig, Format};
use crate::run::{SuiteResult, Work};

/// `{"exact": "a/b", "value": a/b as float}`.
fn exact(x: &BigRational) -> Value {
    let mut m = Map::new();
    m.insert("exact".into(), x.to_string().into());
    m.insert("value".into(), float(rational_to_f64(x)));
    Value::Object(m)
}

/// A JSON number with 17 significant digits; non-finite values become
/// strings.
pub fn float(x: f64) -> Value {
    if x.is_finite() {
        Value::Number(
            Number::from_str(&format!("{x:.16e}")).expect("formatted float is valid JSON"),
        )
    } else {
        Value::String(x.to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub config: ExperimentConfig,
    pub field_order: u32,
    pub tuples: usize,
    pub suites: Vec<SuiteResult>,
    pub bounds: Vec<BoundReport>,
    pub work: Work,
    pub s_q_hash: String,
}

/// Columns of the CSV report, one row per suite and parameter tuple. The
/// numeric columns are filled from the suite's results when present.
pub const CSV_COLUMNS: [&str; 22] = [
    "suite",
    "p",
    "m",
    "q",
    "n",
    "N",
    "Q",
    "k",
    "family",
    "status",
    "violations",
    "s_count",
    "m_count",
    "delta_opt",
    "relative_gap",
    "bound_tineq",
    "bound_general",
    "bound_dim1",
    "bound_kth",
    "bound_power",
    "ratio_power",
    "lemma_ratio",
];

fn params_json(s: &SuiteResult) -> Value {
    let mut m = Map::new();
    m.insert("n".into(), s.params.n.into());
    m.insert("N".into(), s.params.big_n.into());
    m.insert("Q".into(), s.params.q_bound.into());
    m.insert("k".into(), s.params.k.into());
    m.insert("family".into(), s.family.clone().into());
    Value::Object(m)
}

fn bound_json(b: &BoundReport) -> Value {
    let mut m = Map::new();
    for (k, v) in [
        ("q", b.q as u64),
        ("p", b.p as u64),
        ("m", b.m as u64),
        ("n", b.n as u64),
        ("N", b.big_n as u64),
        ("Q", b.q_bound as u64),
        ("k", b.k as u64),
    ] {
        m.insert(k.into(), v.into());
    }
    m.insert("family".into(), b.family.clone().into());
    m.insert("s_count".into(), b.s_count.into());
    m.insert("moduli_count".into(), b.moduli_count.into());
    m.insert("moduli_degree".into(), b.moduli_degree.into());
    m.insert("m_count".into(), b.m_count.map_or(Value::Null, Into::into));
    m.insert(
        "m_tilde".into(),
        Value::Array(b.m_tilde.iter().map(exact).collect()),
    );
    m.insert("delta_opt".into(), b.delta_opt.map_or(Value::Null, float));
    let mut bounds = Map::new();
    for (name, v) in b.explicit_bounds().into_iter().chain(b.asymptotic_bounds()) {
        bounds.insert(name.into(), exact(v));
    }
    bounds.insert("lemma".into(), exact(&b.lemma));
    bounds.insert(
        "general_restricted".into(),
        exact(&b.general.restricted_value),
    );
    m.insert("bounds".into(), Value::Object(bounds));
    m.insert(
        "general_argmax_outside".into(),
        b.general.argmax_outside.into(),
    );
    let mut ratios = Map::new();
    for (name, v) in b.ratios() {
        ratios.insert(name.into(), float(v));
    }
    m.insert("ratios".into(), Value::Object(ratios));
    m.insert(
        "lemma_ratio".into(),
        float(rational_to_f64(b.m_tilde.last().expect("nonempty")) / rational_to_f64(&b.lemma)),
    );
    m.insert(
        "violations".into(),
        Value::Array(b.violations().into_iter().map(|v| v.check.into()).collect()),
    );
    Value::Object(m)
}

impl RunReport {
    pub fn violation_count(&self) -> usize {
        self.suites.iter().map(|s| s.violations.len()).sum()
    }

    pub fn to_value(&self) -> Value {
        let mut config = Map::new();
        for (k, v) in self.config.entries() {
            if k == "grid" {
                let arr = config
                    .entry("grid")
                    .or_insert_with(|| Value::Array(Vec::new()));
                arr.as_array_mut().expect("grid is an array").push(v.into());
            } else {
                config.insert(k.into(), v.into());
            }
        }
        config
            .entry("grid")
            .or_insert_with(|| Value::Array(Vec::new()));

        let suites: Vec<Value> = self
            .suites
            .iter()
            .map(|s| {
                let mut m = Map::new();
                m.insert("suite".into(), s.suite.into());
                m.insert("params".into(), params_json(s));
                m.insert("status".into(), s.status.name().into());
                let violations = s
                    .violations
                    .iter()
                    .map(|v| {
                        let mut o = Map::new();
                        o.insert("check".into(), v.check.clone().into());
                        o.insert("detail".into(), v.detail.clone().into());
                        Value::Object(o)
                    })
                    .collect();
                m.insert("violations".into(), Value::Array(violations));
                m.insert("results".into(), Value::Object(s.results.clone()));
                Value::Object(m)
            })
            .collect();

        let mut timing = Map::new();
        timing.insert("parameter_tuples".into(), self.tuples.into());
        timing.insert("points".into(), self.work.points.into());
        timing.insert("pairs".into(), self.work.pairs.into());
        timing.insert("ball_sums".into(), self.work.ball_sums.into());
        timing.insert("power_iterations".into(), self.work.power_iterations.into());

        let mut top = Map::new();
        top.insert("config".into(), Value::Object(config));
        top.insert("suites".into(), Value::Array(suites));
        top.insert(
            "bounds".into(),
            Value::Array(self.bounds.iter().map(bound_json).collect()),
        );
        top.insert("timing".into(), Value::Object(timing));
        top.insert("version".into(), env!("CARGO_PKG_VERSION").into());
        top.insert("s_q_hash".into(), self.s_q_hash.clone().into());
        Value::Object(top)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_value()).expect("JSON values serialise");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let mut out = CSV_COLUMNS.join(",");
        out.push('\n');
        let cell = |v: Option<&Value>| match v {
            None | Some(Value::Null) => String::new(),
            Some(Value::String(s)) => s.clone(),
            Some(v) => v.to_string(),
        };
        for s in &self.suites {
            let fixed = [
                s.suite.to_string(),
                self.config.p.to_string(),
                self.config.m.to_string(),
                self.field_order.to_string(),
                s.params.n.to_string(),
                s.params.big_n.to_string(),
                s.params.q_bound.to_string(),
                s.params.k.to_string(),
                s.family.clone(),
                s.status.name().to_string(),
                s.violations.len().to_string(),
            ];
            let rest = CSV_COLUMNS[fixed.len()..]
                .iter()
                .map(|c| cell(s.results.get(*c)));
            out.push_str(&fixed.into_iter().chain(rest).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }

    pub fn emit(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }
}
