//! Simulated binary crossover and polynomial mutation, bounded variants.

use crate::population::{Bounds, DecisionVector};
use crate::random::RandomSource;

const EPS: f64 = 1e-14;

fn spread_factor(u: f64, beta: f64, eta: f64) -> f64 {
    let alpha = 2.0 - beta.powf(-(eta + 1.0));
    if u <= 1.0 / alpha {
        (u * alpha).powf(1.0 / (eta + 1.0))
    } else {
        (1.0 / (2.0 - u * alpha)).powf(1.0 / (eta + 1.0))
    }
}

/// One SBX child of `a` and `b`.
///
/// Each variable is recombined with probability 0.5; the two resulting
/// children are swapped at random per variable, so the returned child is
/// distributed symmetrically around the parents' midpoint.
pub fn sbx_crossover(
    a: &DecisionVector,
    b: &DecisionVector,
    bounds: &Bounds,
    rng: &mut RandomSource,
    eta_c: f64,
    p_c: f64,
) -> DecisionVector {
    if rng.uniform() >= p_c {
        return a.clone();
    }
    let (lo, hi) = (bounds.lower(), bounds.upper());
    let mut child = a.clone();
    for i in 0..a.len() {
        let (c1, c2) = if rng.uniform() < 0.5 && (a[i] - b[i]).abs() > EPS {
            let (y1, y2) = if a[i] < b[i] { (a[i], b[i]) } else { (b[i], a[i]) };
            let u = rng.uniform();
            let span = y2 - y1;
            let bq1 = spread_factor(u, 1.0 + 2.0 * (y1 - lo[i]) / span, eta_c);
            let bq2 = spread_factor(u, 1.0 + 2.0 * (hi[i] - y2) / span, eta_c);
            let c1 = 0.5 * ((y1 + y2) - bq1 * span);
            let c2 = 0.5 * ((y1 + y2) + bq2 * span);
            (c1.clamp(lo[i], hi[i]), c2.clamp(lo[i], hi[i]))
        } else {
            (a[i], b[i])
        };
        child[i] = if rng.uniform() < 0.5 { c1 } else { c2 };
    }
    child
}

/// Polynomial mutation, each gene mutated with probability `p_m`.
pub fn poly_mutation(
    x: &DecisionVector,
    bounds: &Bounds,
    rng: &mut RandomSource,
    eta_m: f64,
    p_m: f64,
) -> DecisionVector {
    let (lo, hi) = (bounds.lower(), bounds.upper());
    let mut y = x.clone();
    let pow = 1.0 / (eta_m + 1.0);
    for i in 0..y.len() {
        if rng.uniform() >= p_m {
            continue;
        }
        let span = hi[i] - lo[i];
        let d1 = (y[i] - lo[i]) / span;
        let d2 = (hi[i] - y[i]) / span;
        let u = rng.uniform();
        let dq = if u < 0.5 {
            let v = 2.0 * u + (1.0 - 2.0 * u) * (1.0 - d1).powf(eta_m + 1.0);
            v.powf(pow) - 1.0
        } else {
            let v = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * (1.0 - d2).powf(eta_m + 1.0);
            1.0 - v.powf(pow)
        };
        y[i] = (y[i] + dq * span).clamp(lo[i], hi[i]);
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sbx_identities() {
        let b = Bounds::uniform(4, 0.0, 1.0);
        let mut rng = RandomSource::new(1);
        let a: DecisionVector = vec![0.1, 0.2, 0.3, 0.4].into();
        let c: DecisionVector = vec![0.9, 0.8, 0.7, 0.6].into();
        assert_eq!(sbx_crossover(&a, &c, &b, &mut rng, 20.0, 0.0), a);
        assert_eq!(sbx_crossover(&a, &a, &b, &mut rng, 20.0, 1.0), a);
    }

    #[test]
    fn sbx_children_center_on_the_midpoint() {
        let b = Bounds::uniform(3, -1.0, 1.0);
        let mut rng = RandomSource::new(2);
        let a: DecisionVector = vec![-0.4, 0.0, 0.2].into();
        let c: DecisionVector = vec![0.4, 0.5, 0.3].into();
        let draws = 10_000;
        let mut mean = [0.0; 3];
        for _ in 0..draws {
            let child = sbx_crossover(&a, &c, &b, &mut rng, 20.0, 1.0);
            assert!(b.contains(&child));
            for (m, v) in mean.iter_mut().zip(child.iter()) {
                *m += v / draws as f64;
            }
        }
        for i in 0..3 {
            assert!((mean[i] - 0.5 * (a[i] + c[i])).abs() < 0.02, "dim {i}: {}", mean[i]);
        }
    }

    #[test]
    fn mutation_identity_and_bounds() {
        let b = Bounds::new(vec![0.0, -2.0], vec![1.0, 2.0]).unwrap();
        let mut rng = RandomSource::new(3);
        let x: DecisionVector = vec![0.5, 1.9].into();
        assert_eq!(poly_mutation(&x, &b, &mut rng, 20.0, 0.0), x);
        for _ in 0..10_000 {
            let start: DecisionVector = vec![rng.uniform(), rng.uniform_in(-2.0, 2.0)].into();
            assert!(b.contains(&poly_mutation(&start, &b, &mut rng, 20.0, 1.0)));
        }
    }

    #[test]
    fn huge_distribution_index_barely_moves() {
        let b = Bounds::uniform(5, 0.0, 1.0);
        let mut rng = RandomSource::new(4);
        for _ in 0..1000 {
            let x: DecisionVector = (0..5).map(|_| rng.uniform()).collect();
            let y = poly_mutation(&x, &b, &mut rng, 1e6, 1.0);
            assert!(x.iter().zip(y.iter()).all(|(p, q)| (p - q).abs() < 1e-3));
        }
    }
}
