//! Pareto dominance under minimization.

use crate::error::{ensure_len, Result};
use crate::population::Population;

/// `a` dominates `b` iff it is no worse in every objective and strictly
/// better in at least one.
pub fn dominates(a: &[f64], b: &[f64]) -> Result<bool> {
    ensure_len(a.len(), b.len())?;
    Ok(dominates_unchecked(a, b))
}

pub(crate) fn dominates_unchecked(a: &[f64], b: &[f64]) -> bool {
    let mut strictly = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        if x < y {
            strictly = true;
        }
    }
    strictly
}

/// Indices of the rows not dominated by any other row, in input order.
/// Equal rows do not dominate each other, so duplicates all survive.
pub fn nondominated_indices(points: &[&[f64]]) -> Vec<usize> {
    if points.is_empty() {
        return Vec::new();
    }
    // Sort by first objective (then the rest lexicographically); a point can only
    // be dominated by one that precedes it or ties with it in this order.
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&i, &j| {
        points[i]
            .iter()
            .zip(points[j])
            .map(|(a, b)| a.total_cmp(b))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });

    let mut front: Vec<usize> = Vec::new();
    let mut keep = vec![false; points.len()];
    for &i in &order {
        if !front.iter().any(|&j| dominates_unchecked(points[j], points[i])) {
            front.push(i);
            keep[i] = true;
        }
    }
    (0..points.len()).filter(|&i| keep[i]).collect()
}

/// Members of `pop` that no other member dominates, preserving order.
pub fn pareto_filter(pop: &Population) -> Population {
    let objs = pop.objectives();
    let members = nondominated_indices(&objs).into_iter().map(|i| pop.members[i].clone()).collect();
    Population::new(members, pop.capacity)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::population::Individual;
    use crate::random::RandomSource;
    use proptest::prelude::*;

    fn pop_of(points: &[Vec<f64>]) -> Population {
        let members = points.iter().map(|f| Individual::new(vec![0.0].into(), f.clone().into(), 0.0)).collect();
        Population::new(members, points.len().max(1))
    }

    fn brute_force(points: &[Vec<f64>]) -> Vec<usize> {
        (0..points.len())
            .filter(|&i| !(0..points.len()).any(|j| j != i && dominates_unchecked(&points[j], &points[i])))
            .collect()
    }

    #[test]
    fn dominance_examples() {
        assert!(dominates(&[0.0, 0.0], &[1.0, 1.0]).unwrap());
        assert!(!dominates(&[0.0, 1.0], &[0.0, 1.0]).unwrap());
        assert!(!dominates(&[0.0, 1.0], &[1.0, 0.0]).unwrap());
        assert!(dominates(&[0.0, 1.0], &[0.0, 2.0]).unwrap());
        assert!(dominates(&[0.0], &[0.0, 1.0]).is_err());
    }

    #[test]
    fn filter_examples() {
        let p = pop_of(&[vec![0.0, 1.0], vec![1.0, 0.0], vec![1.0, 1.0]]);
        let f = pareto_filter(&p);
        assert_eq!(f.objectives(), vec![&[0.0, 1.0][..], &[1.0, 0.0][..]]);

        let single = pop_of(&[vec![0.5, 0.5]]);
        assert_eq!(pareto_filter(&single), single);

        assert!(pareto_filter(&pop_of(&[])).is_empty());
    }

    #[test]
    fn filter_keeps_duplicates() {
        let p = pop_of(&[vec![0.5, 0.5], vec![0.5, 0.5], vec![0.6, 0.6]]);
        assert_eq!(pareto_filter(&p).len(), 2);
    }

    #[test]
    fn filter_matches_brute_force_on_fifty_points() {
        let mut rng = RandomSource::new(11);
        let pts: Vec<Vec<f64>> = (0..50).map(|_| vec![rng.uniform(), rng.uniform()]).collect();
        let refs: Vec<&[f64]> = pts.iter().map(|p| &p[..]).collect();
        assert_eq!(nondominated_indices(&refs), brute_force(&pts));
    }

    fn points(max_len: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
        (1usize..=3).prop_flat_map(move |m| {
            prop::collection::vec(prop::collection::vec((0u8..8).prop_map(|v| v as f64 / 4.0), m), 0..=max_len)
        })
    }

    proptest! {
        #[test]
        fn dominance_is_irreflexive_and_antisymmetric(
            a in prop::collection::vec(-5.0f64..5.0, 3),
            b in prop::collection::vec(-5.0f64..5.0, 3),
        ) {
            prop_assert!(!dominates_unchecked(&a, &a));
            prop_assert!(!(dominates_unchecked(&a, &b) && dominates_unchecked(&b, &a)));
        }

        #[test]
        fn filter_equals_brute_force(pts in points(100)) {
            let refs: Vec<&[f64]> = pts.iter().map(|p| &p[..]).collect();
            prop_assert_eq!(nondominated_indices(&refs), brute_force(&pts));
        }

        #[test]
        fn filter_is_idempotent(pts in points(60)) {
            let once = pareto_filter(&pop_of(&pts));
            prop_assert_eq!(pareto_filter(&once), once);
        }
    }
}
