//! The sieve bilinear form over B(0, N) ∩ F_q[t]^n and a Farey set.

mod ball;
mod duality;
mod forms;
mod gram;
mod power;

pub use ball::{char_ball_sum, exponent_row, BallIndex, BallSum, MAX_BALL_SIZE};
pub use duality::{duality_check, DualityReport, Violation, DUALITY_TOLERANCE, FORM_GUARD};
pub use forms::{dual_sum_t, sieve_sum_t, CharMatrix};
pub use gram::{gram_matrix, GramMatrix};
pub use power::{
    gram_operator_norm, operator_norm, BallSideOperator, HermitianOperator, PointSideOperator,
    PowerIterationOptions, SpectralEstimate, HERMITIAN_TOLERANCE,
};
