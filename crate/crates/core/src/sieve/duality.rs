//! Both sides of the duality principle, checked numerically.
//!
//! Δ_row is the norm of the ball-side operator B*B that governs T, computed
//! from the exponent matrix. Δ_col is the norm of the Gram matrix BB* that
//! governs T′, assembled independently from ball sums of point differences.
//! They are the same squared top singular value of B.

use num_complex::Complex64;

use super::ball::BallIndex;
use super::forms::{dual_sum_t, sieve_sum_t, CharMatrix};
use super::gram::{gram_matrix, GramMatrix};
use super::power::{gram_operator_norm, operator_norm, BallSideOperator, PowerIterationOptions};
use crate::error::{Error, Result};
use crate::farey::FareyPoint;
use crate::gfpoly::FieldConfig;
use crate::rng::ComplexStream;

/// Allowed relative gap between Δ_row and Δ_col.
pub const DUALITY_TOLERANCE: f64 = 1e-8;
/// Relative slack granted to Δ when testing random sequences.
pub const FORM_GUARD: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub check: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualityReport {
    pub delta_row: f64,
    pub delta_col: f64,
    pub relative_gap: f64,
    /// max(Δ_row, Δ_col); the optimal sieve constant.
    pub delta_opt: f64,
    pub row_iterations: usize,
    pub col_iterations: usize,
    pub trials: usize,
    /// Largest T / (Δ_opt Σ|a|²) over the random draws.
    pub max_ratio_t: f64,
    /// Largest T′ / (Δ_opt Σ|b|²) over the random draws.
    pub max_ratio_t_dual: f64,
    /// Ball-side eigenvector: the coefficient sequence a attaining Δ.
    pub extremal_sequence: Vec<Complex64>,
    pub gram: GramMatrix,
    pub violations: Vec<Violation>,
}

impl DualityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn duality_check(
    points: &[FareyPoint],
    big_n: usize,
    cfg: &FieldConfig,
    trials: usize,
    seed: u64,
) -> Result<DualityReport> {
    if points.is_empty() {
        return Err(Error::InvalidArgument("empty Farey set".into()));
    }
    let ball = BallIndex::new(points[0].dim(), big_n, cfg)?;
    let opts = PowerIterationOptions::default();
    let mut violations = Vec::new();

    let chars = CharMatrix::new(points, &ball, cfg);
    let row = operator_norm(&BallSideOperator(&chars), &opts);
    let gram = gram_matrix(points, big_n, cfg)?;
    let col = gram_operator_norm(&gram, &opts)?;
    for (side, est) in [("row", &row), ("col", &col)] {
        if !est.converged {
            violations.push(Violation {
                check: "convergence".into(),
                detail: format!(
                    "{side} power iteration stopped after {} iterations",
                    est.iterations
                ),
            });
        }
    }
    let delta_opt = row.value.max(col.value);
    let relative_gap = (row.value - col.value).abs() / delta_opt.max(f64::MIN_POSITIVE);
    if relative_gap > DUALITY_TOLERANCE {
        violations.push(Violation {
            check: "duality".into(),
            detail: format!(
                "delta_row {:.17e} and delta_col {:.17e} differ by {relative_gap:.3e}",
                row.value, col.value
            ),
        });
    }

    let delta = delta_opt * (1.0 + FORM_GUARD);
    let mut rng = ComplexStream::new(seed);
    let mut max_ratio_t = 0.0f64;
    let mut max_ratio_t_dual = 0.0f64;
    for trial in 0..trials {
        let a = rng.complex_vec(ball.len());
        let b = rng.complex_vec(points.len());
        let a_mass: f64 = a.iter().map(|z| z.norm_sqr()).sum();
        let b_mass: f64 = b.iter().map(|z| z.norm_sqr()).sum();
        let t = sieve_sum_t(points, big_n, &a, cfg)?;
        let t_dual = dual_sum_t(points, big_n, &b, cfg)?;
        max_ratio_t = max_ratio_t.max(t / (delta_opt * a_mass));
        max_ratio_t_dual = max_ratio_t_dual.max(t_dual / (delta_opt * b_mass));
        if t > delta * a_mass {
            violations.push(Violation {
                check: "form_t".into(),
                detail: format!(
                    "trial {trial}: T = {t:.17e} exceeds {:.17e}",
                    delta * a_mass
                ),
            });
        }
        if t_dual > delta * b_mass {
            violations.push(Violation {
                check: "form_t_dual".into(),
                detail: format!(
                    "trial {trial}: T' = {t_dual:.17e} exceeds {:.17e}",
                    delta * b_mass
                ),
            });
        }
    }

    Ok(DualityReport {
        delta_row: row.value,
        delta_col: col.value,
        relative_gap,
        delta_opt,
        row_iterations: row.iterations,
        col_iterations: col.iterations,
        trials,
        max_ratio_t,
        max_ratio_t_dual,
        extremal_sequence: row.vector,
        gram,
        violations,
    })
}
