//! Planted benchmarks with ground truth, and the applicability diagnostic.

mod lfr;
mod simple;

pub use lfr::{gen_lfr, solve_min_degree, LfrParams};
pub use simple::{gen_simple, SimpleBenchmarkParams};

/// Expected number of a member's neighbors that a given neighbor is linked to,
/// `((s - 1) p - 1) p`, for planted communities of mean size `s_mean` and
/// internal density `p`. Partial communities appear once this reaches about 2.
pub fn applicability_knn(s_mean: f64, p: f64) -> f64 {
    ((s_mean - 1.0) * p - 1.0) * p
}
