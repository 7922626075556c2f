//! Exact computational laboratory for the large sieve over F_q[t].
//!
//! The crate is organised bottom-up:
//!
//! * [`gfpoly`]: F_q with its trace, and the ring F_q[t].
//! * [`laurent`]: fractional expansions at infinity, the additive
//!   characters E, e and Ψ, and the torus norm.
//! * [`farey`]: restricted Farey sets S_Q, the closeness predicate and
//!   the counting function M(Q, N).
//! * [`sieve`]: ball character sums, the quadratic forms T and T′, the Gram
//!   matrix, its operator norm and the duality check.
//! * [`bounds`]: the explicit and asymptotic sieve bounds and the weighted
//!   denominator count M̃.

pub mod bounds;
pub mod error;
pub mod farey;
pub mod gfpoly;
pub mod laurent;
pub mod rng;
pub mod sieve;

pub use error::{Error, Result};
