//! Objective-space subspaces, knee extraction, and knee trajectory prediction
//! in decision space.

use std::f64::consts::PI;

use crate::error::{ensure_len, Error, Result};
use crate::population::{Bounds, DecisionVector, Individual};
use crate::random::RandomSource;

/// Equal-width split of the `f1` range into `n_s` subspaces.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspacePartition {
    pub n_s: usize,
    pub f_min: f64,
    pub f_max: f64,
    pub width: f64,
    /// Subspace index of every member, in input order.
    pub assignment: Vec<usize>,
    /// Set when all members share one `f1` value; everything then sits in subspace 0.
    pub degenerate: bool,
}

impl SubspacePartition {
    /// `[LB, UB]` of subspace `i`.
    pub fn interval(&self, i: usize) -> (f64, f64) {
        let lb = self.f_min + i as f64 * self.width;
        let ub = if i + 1 == self.n_s { self.f_max } else { lb + self.width };
        (lb, ub)
    }

    /// Member indices of subspace `i`.
    pub fn members(&self, i: usize) -> Vec<usize> {
        self.assignment.iter().enumerate().filter(|(_, &s)| s == i).map(|(k, _)| k).collect()
    }
}

/// Splits the population's `f1` range into `n_s` equal intervals. The member
/// at the maximum goes to the last interval. Fewer members than subspaces
/// simply leave some subspaces empty.
pub fn partition(objectives: &[&[f64]], n_s: usize) -> Result<SubspacePartition> {
    if n_s == 0 || objectives.is_empty() {
        return Err(Error::InvalidArgument("partition needs a non-empty population and n_s >= 1".into()));
    }
    let f1 = objectives.iter().map(|f| f[0]);
    let f_min = f1.clone().fold(f64::INFINITY, f64::min);
    let f_max = f1.fold(f64::NEG_INFINITY, f64::max);
    let width = (f_max - f_min) / n_s as f64;
    let degenerate = width.is_nan() || width <= 0.0;
    let assignment = objectives
        .iter()
        .map(|f| if degenerate { 0 } else { (((f[0] - f_min) / width).floor() as usize).min(n_s - 1) })
        .collect();
    Ok(SubspacePartition { n_s, f_min, f_max, width: if degenerate { 0.0 } else { width }, assignment, degenerate })
}

/// Index of the member with the smallest value in objective `j`, ties broken
/// lexicographically on the remaining objectives and then by index.
fn extreme(objs: &[&[f64]], j: usize) -> usize {
    let mut best = 0;
    for k in 1..objs.len() {
        let ord = objs[k][j].total_cmp(&objs[best][j]).then_with(|| {
            objs[k]
                .iter()
                .zip(objs[best].iter())
                .map(|(a, b)| a.total_cmp(b))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        if ord.is_lt() {
            best = k;
        }
    }
    best
}

fn closest_to_ideal(objs: &[&[f64]]) -> usize {
    let m = objs[0].len();
    let ideal: Vec<f64> = (0..m).map(|j| objs.iter().map(|f| f[j]).fold(f64::INFINITY, f64::min)).collect();
    let d = |f: &[f64]| f.iter().zip(&ideal).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
    (0..objs.len()).fold(0, |best, k| if d(objs[k]) < d(objs[best]) { k } else { best })
}

/// Unit-free normal of the line (m = 2) or plane (m = 3) through `pts`, or
/// `None` when the points do not span one.
fn hyperplane_normal(pts: &[&[f64]]) -> Option<Vec<f64>> {
    let n = match pts.len() {
        2 => vec![pts[0][1] - pts[1][1], pts[1][0] - pts[0][0]],
        3 => {
            let u: Vec<f64> = (0..3).map(|j| pts[1][j] - pts[0][j]).collect();
            let v: Vec<f64> = (0..3).map(|j| pts[2][j] - pts[0][j]).collect();
            vec![u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]]
        }
        _ => return None,
    };
    let norm = n.iter().map(|c| c * c).sum::<f64>().sqrt();
    (norm > 1e-12).then(|| n.into_iter().map(|c| c / norm).collect())
}

/// Index of the knee among `objs`: the member farthest from the hyperplane
/// through the per-objective extreme members (lowest index on ties). When the
/// extremes do not span a hyperplane, the member closest to the ideal point.
pub fn extract_knee(objs: &[&[f64]]) -> Option<usize> {
    if objs.is_empty() {
        return None;
    }
    let m = objs[0].len();
    let extremes: Vec<&[f64]> = (0..m).map(|j| objs[extreme(objs, j)]).collect();
    let Some(normal) = hyperplane_normal(&extremes) else {
        return Some(closest_to_ideal(objs));
    };
    let dist = |f: &[f64]| f.iter().zip(extremes[0]).zip(&normal).map(|((a, b), c)| (a - b) * c).sum::<f64>().abs();
    Some((0..objs.len()).fold(0, |best, k| if dist(objs[k]) > dist(objs[best]) { k } else { best }))
}

/// Knee member of a list of individuals.
pub fn knee_of(members: &[Individual]) -> Option<&Individual> {
    let objs: Vec<&[f64]> = members.iter().map(|m| &m.f[..]).collect();
    extract_knee(&objs).map(|k| &members[k])
}

/// Displacement between two consecutive knees in hyperspherical coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Polar {
    pub v: Vec<f64>,
    pub r: f64,
    /// `n − 1` angles; the last one is signed so the round trip is exact.
    pub beta: Vec<f64>,
    /// Set when the knee did not move.
    pub zero: bool,
}

pub fn direction_polar(knee_prev: &[f64], knee_prev2: &[f64]) -> Result<Polar> {
    ensure_len(knee_prev.len(), knee_prev2.len())?;
    let n = knee_prev.len();
    if n < 2 {
        return Err(Error::InvalidArgument("knee direction needs at least two decision variables".into()));
    }
    let v: Vec<f64> = knee_prev.iter().zip(knee_prev2).map(|(a, b)| a - b).collect();
    let r = v.iter().map(|c| c * c).sum::<f64>().sqrt();
    if r == 0.0 {
        return Ok(Polar { v, r, beta: vec![0.0; n - 1], zero: true });
    }
    // tail[j] = sqrt(sum_{d > j} v_d^2)
    let mut tail = vec![0.0f64; n];
    for j in (0..n - 1).rev() {
        tail[j] = (tail[j + 1].powi(2) + v[j + 1].powi(2)).sqrt();
    }
    let mut beta: Vec<f64> = (0..n - 1).map(|j| tail[j].atan2(v[j])).collect();
    beta[n - 2] = v[n - 1].atan2(v[n - 2]);
    Ok(Polar { v, r, beta, zero: false })
}

/// Deflection angle from the density `∝ exp(−|θ|/r)` on `[−π, π]`, by inverse
/// CDF of the folded distribution and a random sign. `r = 0` gives 0.
pub fn sample_deflection(r: f64, rng: &mut RandomSource) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    let mass = -(-PI / r).exp_m1();
    let magnitude = (-r * (-rng.uniform() * mass).ln_1p()).min(PI);
    if rng.uniform() < 0.5 {
        -magnitude
    } else {
        magnitude
    }
}

/// Unnormalized deflection density, maximal at `θ = 0`.
pub fn deflection_density(theta: f64, r: f64) -> f64 {
    if theta.abs() > PI {
        0.0
    } else {
        (-theta.abs() / r).exp()
    }
}

/// Unit vector with hyperspherical angles `β + θ`.
pub fn direction_components(beta: &[f64], theta: &[f64]) -> Result<Vec<f64>> {
    ensure_len(beta.len(), theta.len())?;
    let n = beta.len() + 1;
    let mut out = Vec::with_capacity(n);
    let mut sin_prod = 1.0;
    for (b, t) in beta.iter().zip(theta) {
        let a = b + t;
        out.push(sin_prod * a.cos());
        sin_prod *= a.sin();
    }
    out.push(sin_prod);
    Ok(out)
}

/// `knee_{t−1} + r·Θ(β + θ)`, before clamping.
pub fn akp_step(knee_prev: &[f64], knee_prev2: &[f64], theta: &[f64]) -> Result<DecisionVector> {
    let polar = direction_polar(knee_prev, knee_prev2)?;
    if polar.zero {
        return Ok(knee_prev.into());
    }
    let dir = direction_components(&polar.beta, theta)?;
    Ok(knee_prev.iter().zip(&dir).map(|(k, d)| k + polar.r * d).collect())
}

/// The two most recent true knees of one subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct KneeTrack {
    pub subspace: usize,
    pub prev: Option<Individual>,
    pub prev2: Option<Individual>,
}

impl KneeTrack {
    fn history(&self) -> Result<(&DecisionVector, &DecisionVector)> {
        match (&self.prev, &self.prev2) {
            (Some(a), Some(b)) => Ok((&a.x, &b.x)),
            _ => Err(Error::MissingHistory(self.subspace)),
        }
    }
}

/// Samples one deflection per angle (or uses zeros when `deterministic`) and
/// moves the last knee by `r` along the deflected direction, clamped.
pub fn akp_predict(
    track: &KneeTrack,
    bounds: &Bounds,
    deterministic: bool,
    rng: &mut RandomSource,
) -> Result<DecisionVector> {
    let (prev, prev2) = track.history()?;
    let polar = direction_polar(prev, prev2)?;
    let theta: Vec<f64> =
        polar.beta.iter().map(|_| if deterministic { 0.0 } else { sample_deflection(polar.r, rng) }).collect();
    let mut x = akp_step(prev, prev2, &theta)?;
    bounds.clamp_in_place(&mut x);
    Ok(x)
}

/// `2·knee_{t−1} − knee_{t−2}`, clamped.
pub fn linear_predict(track: &KneeTrack, bounds: &Bounds) -> Result<DecisionVector> {
    let (prev, prev2) = track.history()?;
    let mut x: DecisionVector = prev.iter().zip(prev2.iter()).map(|(a, b)| 2.0 * a - b).collect();
    bounds.clamp_in_place(&mut x);
    Ok(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Predictor {
    Akp,
    Linear,
}

/// Predicted knees for every subspace that has one.
#[derive(Debug, Clone, PartialEq)]
pub struct KneePrediction {
    pub knees: Vec<Option<DecisionVector>>,
    pub source: Predictor,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn track(prev: Vec<f64>, prev2: Vec<f64>) -> KneeTrack {
        let ind = |x: Vec<f64>| Individual::new(x.into(), vec![0.0, 0.0].into(), 0.0);
        KneeTrack { subspace: 0, prev: Some(ind(prev)), prev2: Some(ind(prev2)) }
    }

    #[test]
    fn partition_examples() {
        let objs: Vec<Vec<f64>> = (0..=10).map(|i| vec![i as f64 / 10.0, 1.0 - i as f64 / 10.0]).collect();
        let refs: Vec<&[f64]> = objs.iter().map(|v| &v[..]).collect();
        let p = partition(&refs, 5).unwrap();
        assert!((p.width - 0.2).abs() < 1e-15);
        for i in 0..5 {
            let (lb, ub) = p.interval(i);
            assert!((lb - 0.2 * i as f64).abs() < 1e-12 && (ub - 0.2 * (i + 1) as f64).abs() < 1e-12);
        }
        assert_eq!(p.assignment[10], 4);
        assert_eq!(p.assignment[0], 0);

        let flat = partition(&[&[0.3, 1.0], &[0.3, 0.5]], 5).unwrap();
        assert!(flat.degenerate);
        assert_eq!(flat.assignment, vec![0, 0]);
    }

    #[test]
    fn partition_is_total() {
        let mut rng = RandomSource::new(4);
        let objs: Vec<Vec<f64>> = (0..100).map(|_| vec![rng.uniform_in(-3.0, 7.0), rng.uniform()]).collect();
        let refs: Vec<&[f64]> = objs.iter().map(|v| &v[..]).collect();
        let p = partition(&refs, 5).unwrap();
        let sizes: Vec<usize> = (0..5).map(|i| p.members(i).len()).collect();
        assert_eq!(sizes.iter().sum::<usize>(), 100);
        let widths: f64 = (0..5).map(|i| p.interval(i).1 - p.interval(i).0).sum();
        assert!((widths - (p.f_max - p.f_min)).abs() < 1e-12);
        for (k, &s) in p.assignment.iter().enumerate() {
            let (lb, ub) = p.interval(s);
            assert!(objs[k][0] >= lb - 1e-12 && objs[k][0] <= ub + 1e-12);
        }
    }

    #[test]
    fn knee_examples() {
        assert_eq!(extract_knee(&[&[0.0, 1.0], &[0.2, 0.2], &[1.0, 0.0]]), Some(1));
        assert_eq!(extract_knee(&[&[0.4, 0.4]]), Some(0));
        assert_eq!(extract_knee(&[]), None);
        // Collinear members: every distance is zero, lowest index wins.
        assert_eq!(extract_knee(&[&[0.5, 0.5], &[0.0, 1.0], &[1.0, 0.0]]), Some(0));
        // Three objectives: plane x + y + z = 1 through the axes' unit points.
        let k =
            extract_knee(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0], &[0.2, 0.2, 0.2], &[0.3, 0.3, 0.35]]);
        assert_eq!(k, Some(3));
    }

    #[test]
    fn polar_examples() {
        let p = direction_polar(&[1.0, 1.0], &[0.0, 0.0]).unwrap();
        assert!((p.r - 2f64.sqrt()).abs() < 1e-15);
        assert!((p.beta[0] - PI / 4.0).abs() < 1e-15);
        let q = direction_polar(&[0.0, 0.0, 1.0], &[0.0; 3]).unwrap();
        assert_eq!(q.beta, vec![PI / 2.0, PI / 2.0]);
        let z = direction_polar(&[0.3, 0.3], &[0.3, 0.3]).unwrap();
        assert!(z.zero && z.r == 0.0 && z.beta == vec![0.0]);
    }

    #[test]
    fn components_example() {
        let c = direction_components(&[PI / 4.0], &[0.0]).unwrap();
        assert!((c[0] - 0.5f64.sqrt()).abs() < 1e-15 && (c[1] - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn deflection_moments() {
        let mut rng = RandomSource::new(8);
        assert_eq!(sample_deflection(0.0, &mut rng), 0.0);
        let r = 0.5;
        let draws: Vec<f64> = (0..100_000).map(|_| sample_deflection(r, &mut rng)).collect();
        assert!(draws.iter().all(|t| t.abs() <= PI));
        let abs: Vec<f64> = draws.iter().map(|t| t.abs()).collect();
        let n = abs.len() as f64;
        let mean_abs = abs.iter().sum::<f64>() / n;
        let sd_abs = (abs.iter().map(|a| (a - mean_abs).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        let q = (-PI / r).exp();
        let expected = r - PI * q / (1.0 - q);
        assert!((mean_abs - expected).abs() < 3.0 * sd_abs / n.sqrt(), "{mean_abs} vs {expected}");
        let mean = draws.iter().sum::<f64>() / n;
        let sd = (draws.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        assert!(mean.abs() < 3.0 * sd / n.sqrt());
    }

    #[test]
    fn deflection_density_peaks_at_zero() {
        for r in [0.01, 0.3, 1.0, 10.0] {
            for k in -20..=20 {
                assert!(deflection_density(0.0, r) >= deflection_density(k as f64 * PI / 20.0, r));
            }
        }
    }

    #[test]
    fn prediction_examples() {
        let b = Bounds::uniform(2, -5.0, 5.0);
        let mut rng = RandomSource::new(1);
        let still = track(vec![0.4, 0.6], vec![0.4, 0.6]);
        assert_eq!(akp_predict(&still, &b, false, &mut rng).unwrap().0, vec![0.4, 0.6]);
        assert_eq!(linear_predict(&track(vec![1.0, 1.0], vec![0.0, 0.0]), &b).unwrap().0, vec![2.0, 2.0]);
        assert_eq!(linear_predict(&still, &b).unwrap().0, vec![0.4, 0.6]);
        let clamped = linear_predict(&track(vec![1.0, 1.0], vec![0.0, 0.0]), &Bounds::uniform(2, 0.0, 1.5)).unwrap();
        assert_eq!(clamped.0, vec![1.5, 1.5]);
        let missing = KneeTrack { subspace: 3, prev: None, prev2: None };
        assert!(matches!(linear_predict(&missing, &b), Err(Error::MissingHistory(3))));
        assert!(akp_predict(&missing, &b, false, &mut rng).is_err());
    }

    proptest! {
        #[test]
        fn components_are_unit_vectors(
            beta in prop::collection::vec(-PI..PI, 1..12),
            seed in any::<u64>(),
        ) {
            let mut rng = RandomSource::new(seed);
            let theta: Vec<f64> = beta.iter().map(|_| rng.uniform_in(-PI, PI)).collect();
            let c = direction_components(&beta, &theta).unwrap();
            prop_assert_eq!(c.len(), beta.len() + 1);
            prop_assert!((c.iter().map(|v| v * v).sum::<f64>() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn zero_deflection_round_trips(v in prop::collection::vec(-3.0f64..3.0, 2..12)) {
            let origin = vec![0.0; v.len()];
            let p = direction_polar(&v, &origin).unwrap();
            let c = direction_components(&p.beta, &vec![0.0; p.beta.len()]).unwrap();
            for (a, b) in c.iter().zip(&v) {
                prop_assert!((p.r * a - b).abs() < 1e-12);
            }
        }

        #[test]
        fn step_length_is_r(
            a in prop::collection::vec(-1.0f64..1.0, 5),
            b in prop::collection::vec(-1.0f64..1.0, 5),
            seed in any::<u64>(),
        ) {
            let mut rng = RandomSource::new(seed);
            let r = direction_polar(&a, &b).unwrap().r;
            let theta: Vec<f64> = (0..4).map(|_| sample_deflection(r, &mut rng)).collect();
            let next = akp_step(&a, &b, &theta).unwrap();
            let moved = next.iter().zip(&a).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
            prop_assert!((moved - r).abs() < 1e-12);
        }
    }
}
