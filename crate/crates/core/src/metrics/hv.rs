//! Exact hypervolume for two and three objectives, and a Monte-Carlo estimator.

use crate::dominance::nondominated_indices;
use crate::error::{Error, Result};
use crate::population::ObjectiveVector;
use crate::problems::ReferenceFront;
use crate::random::RandomSource;

/// Reference point bounding the dominated region.
#[derive(Debug, Clone, PartialEq)]
pub struct HvReference {
    pub r: ObjectiveVector,
}

impl HvReference {
    pub fn new(r: impl Into<ObjectiveVector>) -> Self {
        Self { r: r.into() }
    }

    /// The front's nadir scaled by 1.1; components that are not positive are
    /// shifted by 0.1 instead, so the point always lies beyond the nadir.
    pub fn from_front(front: &ReferenceFront) -> Self {
        let r = front.nadir().iter().map(|&v| if v > 0.0 { 1.1 * v } else { v + 0.1 }).collect::<ObjectiveVector>();
        Self { r }
    }
}

/// Points strictly inside the reference box, non-dominated ones only.
fn contributing<'a>(points: &[&'a [f64]], r: &[f64]) -> Result<Vec<&'a [f64]>> {
    let mut inside = Vec::with_capacity(points.len());
    for p in points {
        if p.len() != r.len() {
            return Err(Error::DimensionMismatch { expected: r.len(), actual: p.len() });
        }
        if p.iter().zip(r).all(|(v, r)| v < r) {
            inside.push(*p);
        }
    }
    Ok(nondominated_indices(&inside).into_iter().map(|i| inside[i]).collect())
}

/// Area dominated by mutually non-dominated 2-D points, sorted by `f1`.
fn sweep_2d(sorted: &[[f64; 2]], r: [f64; 2]) -> f64 {
    let mut area = 0.0;
    let mut ceiling = r[1];
    for p in sorted {
        if p[1] < ceiling {
            area += (r[0] - p[0]) * (ceiling - p[1]);
            ceiling = p[1];
        }
    }
    area
}

/// Exact hypervolume of the union of boxes `[p, r]`. Points not strictly
/// better than `r` in every objective contribute nothing.
pub fn hv(points: &[&[f64]], reference: &HvReference) -> Result<f64> {
    let r = &reference.r[..];
    let pts = contributing(points, r)?;
    match r.len() {
        2 => {
            let mut flat: Vec<[f64; 2]> = pts.iter().map(|p| [p[0], p[1]]).collect();
            flat.sort_by(|a, b| a[0].total_cmp(&b[0]));
            Ok(sweep_2d(&flat, [r[0], r[1]]))
        }
        3 => {
            let mut by_z = pts.clone();
            by_z.sort_by(|a, b| a[2].total_cmp(&b[2]));
            // Slabs between consecutive f3 levels; each slab's cross-section is
            // the 2-D hypervolume of every point at or below it.
            let mut slice: Vec<[f64; 2]> = Vec::with_capacity(by_z.len());
            let mut volume = 0.0;
            for (i, p) in by_z.iter().enumerate() {
                let at = slice.partition_point(|q| q[0] < p[0]);
                slice.insert(at, [p[0], p[1]]);
                let top = by_z.get(i + 1).map_or(r[2], |q| q[2]);
                if top > p[2] {
                    volume += sweep_2d(&slice, [r[0], r[1]]) * (top - p[2]);
                }
            }
            Ok(volume)
        }
        m => Err(Error::InvalidArgument(format!("exact hypervolume supports 2 or 3 objectives, got {m}"))),
    }
}

/// Monte-Carlo hypervolume estimate and its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HvEstimate {
    pub value: f64,
    pub std_error: f64,
}

/// Samples uniformly in the box spanned by the contributing points' minimum
/// and `r`, counting dominated samples.
pub fn hv_monte_carlo(
    points: &[&[f64]],
    reference: &HvReference,
    samples: usize,
    rng: &mut RandomSource,
) -> Result<HvEstimate> {
    if samples < 10_000 {
        return Err(Error::InvalidArgument(format!(
            "Monte-Carlo hypervolume needs at least 10^4 samples, got {samples}"
        )));
    }
    let r = &reference.r[..];
    let pts = contributing(points, r)?;
    if pts.is_empty() {
        return Ok(HvEstimate { value: 0.0, std_error: 0.0 });
    }
    let lo: Vec<f64> = (0..r.len()).map(|j| pts.iter().map(|p| p[j]).fold(f64::INFINITY, f64::min)).collect();
    let box_volume: f64 = lo.iter().zip(r).map(|(l, r)| r - l).product();
    let mut s = vec![0.0; r.len()];
    let mut hits = 0usize;
    for _ in 0..samples {
        for (j, v) in s.iter_mut().enumerate() {
            *v = rng.uniform_in(lo[j], r[j]);
        }
        if pts.iter().any(|p| p.iter().zip(&s).all(|(a, b)| a <= b)) {
            hits += 1;
        }
    }
    let frac = hits as f64 / samples as f64;
    Ok(HvEstimate { value: box_volume * frac, std_error: box_volume * (frac * (1.0 - frac) / samples as f64).sqrt() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hypervolume_examples() {
        let r = HvReference::new(vec![1.0, 1.0]);
        assert_eq!(hv(&[&[0.5, 0.5]], &r).unwrap(), 0.25);
        assert_eq!(hv(&[&[0.25, 0.75], &[0.75, 0.25]], &r).unwrap(), 0.3125);
        assert_eq!(hv(&[&[1.0, 0.2], &[2.0, 0.0]], &r).unwrap(), 0.0);
        assert_eq!(hv(&[], &r).unwrap(), 0.0);
        let r3 = HvReference::new(vec![1.0, 1.0, 1.0]);
        assert!((hv(&[&[0.5, 0.5, 0.5]], &r3).unwrap() - 0.125).abs() < 1e-15);
        // Two unit-corner boxes overlapping in a 0.5 × 0.5 × 0.5 cube.
        let v = hv(&[&[0.0, 0.5, 0.5], &[0.5, 0.0, 0.5]], &r3).unwrap();
        assert!((v - (0.25 + 0.25 - 0.125)).abs() < 1e-15);
        assert!(hv(&[&[0.1; 4]], &HvReference::new(vec![1.0; 4])).is_err());
    }

    #[test]
    fn dominated_points_do_not_change_volume() {
        let r = HvReference::new(vec![2.0, 2.0, 2.0]);
        let base: Vec<&[f64]> = vec![&[0.2, 1.0, 1.5], &[1.0, 0.3, 0.9], &[1.5, 1.5, 0.1]];
        let mut more = base.clone();
        more.push(&[1.6, 1.6, 1.9]);
        assert_eq!(hv(&base, &r).unwrap(), hv(&more, &r).unwrap());
    }

    #[test]
    fn monte_carlo_matches_single_box() {
        let r = HvReference::new(vec![1.0, 1.0]);
        let mut rng = RandomSource::new(5);
        assert_eq!(hv_monte_carlo(&[], &r, 10_000, &mut rng).unwrap().value, 0.0);
        // Box spans exactly the dominated region, so every sample hits.
        let est = hv_monte_carlo(&[&[0.5, 0.5]], &r, 10_000, &mut rng).unwrap();
        assert!((est.value - 0.25).abs() <= 3.0 * est.std_error + 1e-12);
        let small = hv_monte_carlo(&[&[0.2, 0.6], &[0.6, 0.2]], &r, 10_000, &mut rng).unwrap();
        let large = hv_monte_carlo(&[&[0.2, 0.6], &[0.6, 0.2]], &r, 160_000, &mut rng).unwrap();
        assert!(large.std_error < small.std_error / 3.0);
        assert!(hv_monte_carlo(&[&[0.5, 0.5]], &r, 100, &mut rng).is_err());
    }
}
