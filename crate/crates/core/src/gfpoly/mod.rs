//! Exact arithmetic in F_q = F_p[x]/(h) and in F_q[t].

mod field;
mod poly;

pub use field::{is_prime, FieldConfig, FieldElement, MAX_FIELD_ORDER};
pub use poly::{
    enumerate_monic, enumerate_monic_up_to, enumerate_up_to, euler_phi, factor, Degree, Poly,
};
