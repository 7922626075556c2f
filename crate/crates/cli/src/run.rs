//! Suite orchestration over a parameter grid.

use rayon::prelude::*;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use ffsieve::bounds::{rational_to_f64, BoundReport, Measurements, RecursionTables};
use ffsieve::farey::{
    close_pair, closeness_counts, count_m, expected_cardinality, farey_set, monic_tuples,
    write_csv, FareyPoint, ModuliFamily,
};
use ffsieve::gfpoly::{FieldConfig, Poly};
use ffsieve::laurent::{frac_expansion, psi, torus_norm_tuple};
use ffsieve::sieve::{char_ball_sum, duality_check, BallIndex, DualityReport, Violation};

use crate::config::{ExperimentConfig, FamilySpec, GridParam, Suite};
use crate::report::{float, RunReport};
use crate::CliError;

/// Largest S_Q for the dense Gram matrix and operator norms.
pub const DENSE_POINT_LIMIT: usize = 1024;
/// Largest S_Q for checks over all pairs of points.
pub const PAIR_POINT_LIMIT: usize = 1024;
/// Largest ball for the operator-norm computation.
pub const SIEVE_BALL_LIMIT: usize = 1 << 14;
/// Points per parameter tuple given the algebra spot checks.
const ALGEBRA_POINT_SAMPLE: usize = 256;
/// Largest number of f at which the M̃ recursion is evaluated.
const RECURSION_SAMPLE_LIMIT: usize = 20_000;

/// A failing pair (i, j) with its check outcome or evaluation error.
type PairFailure = (usize, usize, Result<(bool, bool), String>);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Params {
    pub n: usize,
    pub big_n: usize,
    pub q_bound: usize,
    pub k: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skipped => "skipped",
        }
    }
}

/// Deterministic work counters; these stand in for wall-clock timing so
/// reports stay byte-identical.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Work {
    pub points: u64,
    pub pairs: u64,
    pub ball_sums: u64,
    pub power_iterations: u64,
}

impl Work {
    fn add(&mut self, o: &Work) {
        self.points += o.points;
        self.pairs += o.pairs;
        self.ball_sums += o.ball_sums;
        self.power_iterations += o.power_iterations;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub suite: &'static str,
    pub params: Params,
    pub family: String,
    pub status: Status,
    pub violations: Vec<Violation>,
    pub results: Map<String, Value>,
    pub work: Work,
}

impl SuiteResult {
    fn new(suite: &'static str, params: Params, family: &ModuliFamily) -> Self {
        SuiteResult {
            suite,
            params,
            family: family.name(),
            status: Status::Pass,
            violations: Vec::new(),
            results: Map::new(),
            work: Work::default(),
        }
    }

    fn skip(&mut self, reason: String) {
        self.status = Status::Skipped;
        self.results
            .insert("skipped_reason".into(), Value::String(reason));
    }

    fn violate(&mut self, check: &str, detail: String) {
        self.violations.push(Violation {
            check: check.into(),
            detail,
        });
    }

    fn put(&mut self, key: &str, v: impl Into<Value>) {
        self.results.insert(key.into(), v.into());
    }

    fn finish(mut self) -> Self {
        if !self.violations.is_empty() {
            self.status = Status::Fail;
        }
        self
    }
}

/// Parameter tuples of the grid in order; the last axis varies fastest.
pub fn expand_grid(cfg: &ExperimentConfig) -> Vec<Params> {
    let mut out = vec![Params {
        n: cfg.n,
        big_n: cfg.big_n,
        q_bound: cfg.q_bound,
        k: cfg.k,
    }];
    for axis in &cfg.grid {
        out = out
            .into_iter()
            .flat_map(|base| {
                (axis.lo..=axis.hi).map(move |v| {
                    let mut p = base;
                    match axis.param {
                        GridParam::N => p.n = v as usize,
                        GridParam::BigN => p.big_n = v as usize,
                        GridParam::Q => p.q_bound = v as usize,
                        GridParam::K => p.k = v,
                    }
                    p
                })
            })
            .collect();
    }
    out
}

fn selected(suite: Suite) -> [bool; 5] {
    // algebra, orthogonality, duality, counts, bounds
    match suite {
        Suite::Verify => [true, true, false, false, false],
        Suite::Duality => [false, false, true, false, false],
        Suite::Count => [false, false, false, true, false],
        Suite::Bound => [false, false, false, false, true],
        Suite::All => [true; 5],
    }
}

fn ball_size(n: usize, big_n: usize, q: u32) -> Option<u64> {
    (q as u64)
        .checked_pow((n * (big_n + 1)) as u32)
        .filter(|&b| b <= 1 << 62)
}

fn algebra_suite(
    cfg: &FieldConfig,
    points: &[FareyPoint],
    params: Params,
    family: &ModuliFamily,
) -> SuiteResult {
    let mut r = SuiteResult::new("algebra", params, family);
    let p = cfg.p();
    let elems: Vec<_> = cfg.elements().collect();
    let mut trace_hist = vec![0u64; p as usize];
    for &a in &elems {
        trace_hist[cfg.trace(a) as usize] += 1;
        if !a.is_zero() {
            match cfg.inv(a) {
                Some(b) if cfg.mul(a, b) == cfg.one() => {}
                _ => r.violate(
                    "field_inverse",
                    format!("element {} has no inverse", a.index()),
                ),
            }
        }
        for &b in &elems {
            if cfg.trace(cfg.add(a, b)) != (cfg.trace(a) + cfg.trace(b)) % p {
                r.violate(
                    "trace_additive",
                    format!("elements {} and {}", a.index(), b.index()),
                );
            }
        }
    }
    if trace_hist.iter().any(|&c| c != cfg.q() as u64 / p as u64) {
        r.violate(
            "trace_balanced",
            format!("trace value counts {trace_hist:?}"),
        );
    }

    // expansions multiply back: r t^D − f · Σ c_j t^{D−j} has degree < deg f
    let depth = params.big_n + 2;
    let sample: Vec<&FareyPoint> = points.iter().take(ALGEBRA_POINT_SAMPLE).collect();
    let ball = BallIndex::new(params.n, params.big_n.min(1), cfg).ok();
    for x in &sample {
        for c in x.coords() {
            let d = c.den().deg() + depth;
            let digits = match frac_expansion(c.num(), c.den(), d, cfg) {
                Ok(e) => e,
                Err(e) => {
                    r.violate("expansion", e.to_string());
                    continue;
                }
            };
            let head: Vec<_> = (1..=d).rev().map(|j| digits.coeff(j)).collect();
            let shifted = c.num().mul(&Poly::monomial(cfg.one(), d), cfg);
            let rest = shifted.sub(&c.den().mul(&Poly::from_coeffs(head), cfg), cfg);
            if !rest.degree().at_most(c.den().deg() as i64 - 1) {
                r.violate(
                    "expansion",
                    format!(
                        "{}/{} does not multiply back",
                        c.num().display(cfg),
                        c.den().display(cfg)
                    ),
                );
            }
        }
        // the character is a homomorphism in g
        if let Some(ball) = &ball {
            let gs = [
                ball.point(0, cfg),
                ball.point(1 % ball.len(), cfg),
                ball.point(ball.len() - 1, cfg),
            ];
            for g in &gs {
                for h in &gs {
                    let sum: Vec<Poly> = g.iter().zip(h).map(|(a, b)| a.add(b, cfg)).collect();
                    let lhs = psi(x.coords(), &sum, cfg);
                    let rhs = psi(x.coords(), g, cfg)
                        .and_then(|a| psi(x.coords(), h, cfg).map(|b| a.times(b)));
                    if lhs.ok() != rhs.ok() {
                        r.violate(
                            "character_additive",
                            format!("at x with denominators {}", x.denominators_string(cfg)),
                        );
                    }
                }
            }
        }
    }
    r.put("field_order", cfg.q());
    r.put("points_checked", sample.len());
    r.work.points = sample.len() as u64;
    r.finish()
}

fn orthogonality_suite(
    cfg: &FieldConfig,
    points: &[FareyPoint],
    params: Params,
    family: &ModuliFamily,
) -> SuiteResult {
    let mut r = SuiteResult::new("orthogonality", params, family);
    let Some(ball) = ball_size(params.n, params.big_n, cfg.q()) else {
        r.skip("ball too large for exact counts".into());
        return r;
    };
    let radius = params.big_n as i64 + 2;
    let check = |x: &[ffsieve::laurent::Fraction]| -> Result<(bool, bool), String> {
        let close = torus_norm_tuple(x, cfg).at_most_inv_pow(radius);
        let got = char_ball_sum(x, params.big_n, cfg).map_err(|e| e.to_string())?;
        let want = if close { ball as i128 } else { 0 };
        Ok((got.as_integer() == Some(want), close))
    };
    let single: Vec<_> = points.par_iter().map(|x| check(x.coords())).collect();
    let mut close_points = 0u64;
    for (x, res) in points.iter().zip(single) {
        match res {
            Ok((true, close)) => close_points += close as u64,
            Ok((false, _)) => r.violate(
                "orthogonality_point",
                format!(
                    "x = {} / {}",
                    x.numerators_string(cfg),
                    x.denominators_string(cfg)
                ),
            ),
            Err(e) => r.violate("orthogonality_point", e),
        }
    }
    r.put("points_checked", points.len());
    r.put("close_points", close_points);
    r.work.points = points.len() as u64;
    r.work.ball_sums = points.len() as u64;
    if points.len() <= PAIR_POINT_LIMIT {
        let failures: Vec<PairFailure> = (0..points.len())
            .into_par_iter()
            .flat_map_iter(|i| {
                (i + 1..points.len()).filter_map(move |j| {
                    let res = check(&points[i].sub(&points[j], cfg));
                    match res {
                        Ok((true, false)) => None,
                        other => Some((i, j, other)),
                    }
                })
            })
            .collect();
        let mut close_pairs = 0u64;
        for (i, j, res) in failures {
            match res {
                Ok((true, true)) => close_pairs += 1,
                Ok(_) => r.violate("orthogonality_pair", format!("points {i} and {j}")),
                Err(e) => r.violate("orthogonality_pair", format!("points {i} and {j}: {e}")),
            }
        }
        let pairs = (points.len() * points.len().saturating_sub(1) / 2) as u64;
        r.put("pairs_checked", pairs);
        r.put("close_pairs", close_pairs);
        r.work.pairs = pairs;
        r.work.ball_sums += pairs;
    } else {
        r.put("pairs_checked", 0);
        r.put(
            "pairs_skipped_reason",
            format!("|S_Q| = {} exceeds {PAIR_POINT_LIMIT}", points.len()),
        );
    }
    r.finish()
}

fn dense_skip_reason(points: usize, params: Params, cfg: &FieldConfig) -> Option<String> {
    let ball = ball_size(params.n, params.big_n, cfg.q());
    if points > DENSE_POINT_LIMIT {
        Some(format!("|S_Q| = {points} exceeds {DENSE_POINT_LIMIT}"))
    } else if ball.is_none_or(|b| b > SIEVE_BALL_LIMIT as u64) {
        Some(format!("ball exceeds {SIEVE_BALL_LIMIT} points"))
    } else {
        None
    }
}

fn duality_suite(
    cfg: &FieldConfig,
    points: &[FareyPoint],
    params: Params,
    family: &ModuliFamily,
    dual: &Option<Result<DualityReport, String>>,
) -> SuiteResult {
    let mut r = SuiteResult::new("duality", params, family);
    match dual {
        None => r.skip(dense_skip_reason(points.len(), params, cfg).unwrap_or_default()),
        Some(Err(e)) => r.violate("duality", e.clone()),
        Some(Ok(d)) => {
            r.put("delta_row", float(d.delta_row));
            r.put("delta_col", float(d.delta_col));
            r.put("relative_gap", float(d.relative_gap));
            r.put("delta_opt", float(d.delta_opt));
            r.put("row_iterations", d.row_iterations);
            r.put("col_iterations", d.col_iterations);
            r.put("trials", d.trials);
            r.put("max_ratio_t", float(d.max_ratio_t));
            r.put("max_ratio_t_dual", float(d.max_ratio_t_dual));
            r.violations.extend(d.violations.iter().cloned());
            r.work.points = points.len() as u64;
            r.work.ball_sums = (points.len() * (points.len() + 1) / 2) as u64;
            r.work.power_iterations = (d.row_iterations + d.col_iterations) as u64;
        }
    }
    r.finish()
}

fn counts_suite(
    cfg: &FieldConfig,
    points: &[FareyPoint],
    params: Params,
    family: &ModuliFamily,
    m_table: &Option<Vec<usize>>,
) -> SuiteResult {
    let mut r = SuiteResult::new("counts", params, family);
    r.put("s_count", points.len());
    match expected_cardinality(family, params.q_bound, cfg) {
        Ok(e) => {
            r.put("expected_cardinality", e);
            if e != points.len() as u64 {
                r.violate(
                    "cardinality",
                    format!("|S_Q| = {} but Σ Π φ = {e}", points.len()),
                );
            }
        }
        Err(e) => r.violate("cardinality", e.to_string()),
    }
    r.work.points = points.len() as u64;
    let Some(table) = m_table else {
        r.put(
            "pairs_skipped_reason",
            format!("|S_Q| = {} exceeds {PAIR_POINT_LIMIT}", points.len()),
        );
        return r.finish();
    };
    r.put(
        "m_table",
        Value::Array(table.iter().map(|&m| m.into()).collect()),
    );
    r.put("m_count", table[params.big_n + 2]);
    if table[0] != points.len() {
        r.violate(
            "count_m_zero",
            format!("M(Q, 0) = {} but |S_Q| = {}", table[0], points.len()),
        );
    }
    if let Some(w) = table.windows(2).position(|w| w[1] > w[0]) {
        r.violate("count_m_monotone", format!("M(Q, {}) < M(Q, {})", w, w + 1));
    }
    let radius = params.big_n as i64 + 2;
    let mismatches: Vec<(usize, usize)> = (0..points.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            (0..points.len()).filter_map(move |j| {
                let fast = close_pair(&points[i], &points[j], radius, cfg).ok();
                let slow =
                    torus_norm_tuple(&points[i].sub(&points[j], cfg), cfg).at_most_inv_pow(radius);
                (fast != Some(slow)).then_some((i, j))
            })
        })
        .collect();
    for (i, j) in mismatches {
        r.violate("close_pair", format!("points {i} and {j}"));
    }
    let pairs = (points.len() * points.len()) as u64;
    r.put("pairs_checked", pairs);
    r.work.pairs = pairs * (table.len() as u64 + 1);
    r.finish()
}

fn bounds_suite(
    cfg: &FieldConfig,
    points: &[FareyPoint],
    params: Params,
    family: &ModuliFamily,
    m_table: &Option<Vec<usize>>,
    dual: &Option<Result<DualityReport, String>>,
) -> (SuiteResult, Option<BoundReport>) {
    let mut r = SuiteResult::new("bounds", params, family);
    let meas = Measurements {
        s_count: points.len() as u64,
        m_count: m_table.as_ref().map(|t| t[params.big_n + 2]),
        delta_opt: dual
            .as_ref()
            .and_then(|d| d.as_ref().ok())
            .map(|d| d.delta_opt),
    };
    let report = match BoundReport::new(family, params.q_bound, params.big_n, cfg, &meas) {
        Ok(rep) => rep,
        Err(e) => {
            r.violate("bounds", e.to_string());
            return (r.finish(), None);
        }
    };
    r.put("s_count", points.len());
    if let Some(m) = meas.m_count {
        r.put("m_count", m);
    }
    if let Some(d) = meas.delta_opt {
        r.put("delta_opt", float(d));
    } else {
        r.put(
            "delta_opt_skipped_reason",
            dense_skip_reason(points.len(), params, cfg).unwrap_or_default(),
        );
    }
    for (name, b) in report
        .explicit_bounds()
        .into_iter()
        .chain(report.asymptotic_bounds())
    {
        r.put(&format!("bound_{name}"), float(rational_to_f64(b)));
    }
    for (name, v) in report.ratios() {
        r.put(&format!("ratio_{name}"), float(v));
    }
    r.put("lemma_ratio", float(report.lemma_ratio()));
    r.put("general_argmax_outside", report.general.argmax_outside);
    r.violations.extend(report.violations());

    // The M̃ recursion is reported, not enforced: it is false for many f.
    if params.n >= 2 {
        let x = params.q_bound;
        let n_f = ((cfg.q() as u64).pow(x as u32 + 2) - 1) / (cfg.q() as u64 - 1);
        if n_f
            .checked_pow(params.n as u32)
            .is_some_and(|c| c <= RECURSION_SAMPLE_LIMIT as u64)
        {
            let k = family.power();
            match RecursionTables::new(params.n, k, x, params.big_n as i64 + 2, cfg) {
                Ok(tables) => {
                    let fs = monic_tuples(params.n, x + 1, cfg);
                    let failed = fs
                        .iter()
                        .filter(|f| tables.check(f).map_or(true, |c| !c.holds))
                        .count();
                    r.put("recursion_checked", fs.len());
                    r.put("recursion_failures", failed);
                }
                Err(e) => r.put("recursion_error", e.to_string()),
            }
        }
    }
    (r.finish(), Some(report))
}

fn build_family(
    cfg: &ExperimentConfig,
    field: &FieldConfig,
    params: Params,
) -> Result<ModuliFamily, CliError> {
    match &cfg.family {
        FamilySpec::Full => Ok(ModuliFamily::full(params.n)),
        FamilySpec::KPower => Ok(ModuliFamily::kth_power(params.k, params.n)),
        FamilySpec::Explicit(path) => crate::config::read_explicit_family(path, params.n, field),
    }
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunReport, CliError> {
    let field = cfg.field()?;
    let which = selected(cfg.suite);
    let mut suites = Vec::new();
    let mut bounds = Vec::new();
    let mut hasher = Sha256::new();
    let tuples = expand_grid(cfg);
    for (t, &params) in tuples.iter().enumerate() {
        let family = build_family(cfg, &field, params)?;
        let points = farey_set(&family, params.q_bound, &field);
        hasher.update(format!(
            "{};n={};Q={}\n",
            family.name(),
            params.n,
            params.q_bound
        ));
        for x in &points {
            hasher.update(format!(
                "{}|{}\n",
                x.numerators_string(&field),
                x.denominators_string(&field)
            ));
        }
        if t == 0 {
            if let Some(path) = &cfg.farey_csv {
                let counts = closeness_counts(&points, params.big_n as i64 + 2, &field);
                let file = std::fs::File::create(path)
                    .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
                write_csv(std::io::BufWriter::new(file), &points, &counts, &field)
                    .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            }
        }

        let needs_dual = which[2] || which[4];
        let dual =
            (needs_dual && dense_skip_reason(points.len(), params, &field).is_none()).then(|| {
                let trials = if which[2] { cfg.trials } else { 0 };
                duality_check(&points, params.big_n, &field, trials, cfg.seed)
                    .map_err(|e| e.to_string())
            });
        let m_table = ((which[3] || which[4]) && points.len() <= PAIR_POINT_LIMIT).then(|| {
            (0..=params.big_n as i64 + 2)
                .map(|radius| count_m(&points, radius, &field).value)
                .collect::<Vec<_>>()
        });

        if which[0] {
            suites.push(algebra_suite(&field, &points, params, &family));
        }
        if which[1] {
            suites.push(orthogonality_suite(&field, &points, params, &family));
        }
        if which[2] {
            suites.push(duality_suite(&field, &points, params, &family, &dual));
        }
        if which[3] {
            suites.push(counts_suite(&field, &points, params, &family, &m_table));
        }
        if which[4] {
            let (res, rep) = bounds_suite(&field, &points, params, &family, &m_table, &dual);
            suites.push(res);
            bounds.extend(rep);
        }
    }
    let mut work = Work::default();
    for s in &suites {
        work.add(&s.work);
    }
    Ok(RunReport {
        config: cfg.clone(),
        field_order: field.q(),
        tuples: tuples.len(),
        suites,
        bounds,
        work,
        s_q_hash: format!("{:x}", hasher.finalize()),
    })
}
