//! Exact arithmetic: Laurent polynomials over big integers, exact division
//! by `t_a - t_b`, and combinatorial tables.

mod comb;
mod division;
mod poly;
mod render;

pub use comb::{
    binomial, factorial, signed_ordered_partition_sum, stirling2, stirling2_flag, CombTable,
};
pub use division::{binomial as linear_binomial, exact_div_binomial};
pub use poly::{ExponentVec, LaurentPoly};
pub use render::{coeff_from_json, coeff_to_json, JsonTerm};
