//! Two-sided Wilcoxon rank-sum (Mann-Whitney U) test with the normal
//! approximation and tie correction.

use std::fmt;

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

pub const ALPHA: f64 = 0.05;

/// Outcome for the first sample under minimization of the metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Significantly smaller (better).
    Better,
    Equal,
    /// Significantly larger (worse).
    Worse,
}

impl Direction {
    pub fn symbol(self) -> &'static str {
        match self {
            Direction::Better => "+",
            Direction::Equal => "=",
            Direction::Worse => "-",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankSumTest {
    /// Mann-Whitney `U` of the first sample.
    pub u: f64,
    pub z: f64,
    pub p_value: f64,
    pub direction: Direction,
}

impl RankSumTest {
    pub fn significant(&self) -> bool {
        self.direction != Direction::Equal
    }
}

/// Mid-ranks (1-based) of `values`, ties sharing their average rank, plus
/// `Σ (t³ − t)` over tie groups.
fn mid_ranks(values: &[f64]) -> (Vec<f64>, f64) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut ranks = vec![0.0; values.len()];
    let mut ties = 0.0;
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        let avg = (start + end + 1) as f64 / 2.0;
        for &k in &order[start..end] {
            ranks[k] = avg;
        }
        let t = (end - start) as f64;
        ties += t * t * t - t;
        start = end;
    }
    (ranks, ties)
}

pub fn wilcoxon_rank_sum(a: &[f64], b: &[f64]) -> Result<RankSumTest> {
    if a.len() < 5 || b.len() < 5 {
        return Err(Error::InvalidArgument(format!(
            "rank-sum test needs at least 5 values per sample, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    let (n1, n2) = (a.len() as f64, b.len() as f64);
    let n = n1 + n2;
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let (ranks, ties) = mid_ranks(&pooled);
    let w: f64 = ranks[..a.len()].iter().sum();
    let u = w - n1 * (n1 + 1.0) / 2.0;
    let mean = n1 * n2 / 2.0;
    let var = n1 * n2 / 12.0 * ((n + 1.0) - ties / (n * (n - 1.0)));
    if var <= 0.0 {
        return Ok(RankSumTest { u, z: 0.0, p_value: 1.0, direction: Direction::Equal });
    }
    let z = (u - mean) / var.sqrt();
    let std_normal = Normal::standard();
    let p_value = (2.0 * (1.0 - std_normal.cdf(z.abs()))).min(1.0);
    let direction = if p_value >= ALPHA {
        Direction::Equal
    } else if z < 0.0 {
        Direction::Better
    } else {
        Direction::Worse
    };
    Ok(RankSumTest { u, z, p_value, direction })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::RandomSource;

    #[test]
    fn identical_and_separated_samples() {
        let a: Vec<f64> = (1..=20).map(f64::from).collect();
        assert_eq!(wilcoxon_rank_sum(&a, &a).unwrap().direction, Direction::Equal);
        let b: Vec<f64> = (101..=120).map(f64::from).collect();
        let t = wilcoxon_rank_sum(&a, &b).unwrap();
        assert_eq!(t.direction, Direction::Better);
        assert_eq!(t.u, 0.0);
        assert_eq!(wilcoxon_rank_sum(&b, &a).unwrap().direction, Direction::Worse);
        assert_eq!(wilcoxon_rank_sum(&[3.0; 6], &[3.0; 7]).unwrap().direction, Direction::Equal);
        assert!(wilcoxon_rank_sum(&a[..4], &b).is_err());
    }

    #[test]
    fn matches_hand_computed_statistic() {
        // Pooled ranks: 1.0→1, 2.0→2.5 (tied), 3.0→4, 4.0→5, ... a = {1,2,4,6,8}.
        let a = [1.0, 2.0, 4.0, 6.0, 8.0];
        let b = [2.0, 3.0, 5.0, 7.0, 9.0];
        let t = wilcoxon_rank_sum(&a, &b).unwrap();
        let w = 1.0 + 2.5 + 5.0 + 7.0 + 9.0;
        assert_eq!(t.u, w - 15.0);
        let var = 25.0 / 12.0 * (11.0 - 6.0 / 90.0);
        assert!((t.z - (t.u - 12.5) / f64::sqrt(var)).abs() < 1e-12);
    }

    #[test]
    fn null_rejection_rate_is_near_alpha() {
        let mut rng = RandomSource::new(77);
        let trials = 1000;
        let mut rejected = 0;
        for _ in 0..trials {
            let a: Vec<f64> = (0..20).map(|_| rng.normal()).collect();
            let b: Vec<f64> = (0..20).map(|_| rng.normal()).collect();
            if wilcoxon_rank_sum(&a, &b).unwrap().significant() {
                rejected += 1;
            }
        }
        let rate = rejected as f64 / trials as f64;
        assert!((rate - 0.05).abs() <= 0.02, "rejection rate {rate}");
    }
}
