//! Convergence and diversity indicators, their per-run averages, and the
//! rank-sum test used to compare strategies.

mod hv;
mod wilcoxon;

pub use hv::{hv, hv_monte_carlo, HvEstimate, HvReference};
pub use wilcoxon::{wilcoxon_rank_sum, Direction, RankSumTest, ALPHA};

use crate::error::{Error, Result};
use crate::population::euclidean;

/// Inverted generational distance: mean distance from each reference point to
/// its nearest approximation point.
pub fn igd(reference: &[&[f64]], approx: &[&[f64]]) -> Result<f64> {
    if reference.is_empty() || approx.is_empty() {
        return Err(Error::InvalidArgument("IGD needs non-empty reference and approximation sets".into()));
    }
    let total: f64 =
        reference.iter().map(|v| approx.iter().map(|u| euclidean(u, v)).fold(f64::INFINITY, f64::min)).sum();
    Ok(total / reference.len() as f64)
}

/// Mean and sample standard deviation (zero for a single value).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
}

pub fn summarize(values: &[f64]) -> Result<Summary> {
    if values.is_empty() {
        return Err(Error::InvalidArgument("cannot summarize an empty series".into()));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = if values.len() > 1 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    Ok(Summary { mean, std })
}
