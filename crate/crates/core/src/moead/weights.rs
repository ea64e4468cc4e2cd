//! Uniformly spread weight vectors and their neighbourhoods.

use crate::error::{Error, Result};
use crate::population::euclidean;
use crate::random::RandomSource;

/// `N` weight vectors on the unit simplex and, for each, the indices of its
/// `T` nearest weights (itself included, nearest first).
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSet {
    vectors: Vec<Vec<f64>>,
    neighbors: Vec<Vec<usize>>,
}

impl WeightSet {
    /// Builds the set from explicit vectors, computing neighbourhoods of size
    /// `min(t, len)`.
    pub fn from_vectors(vectors: Vec<Vec<f64>>, t: usize) -> Result<Self> {
        if vectors.is_empty() || t == 0 {
            return Err(Error::InvalidArgument("weight set needs at least one vector and T >= 1".into()));
        }
        let t = t.min(vectors.len());
        let neighbors = vectors
            .iter()
            .enumerate()
            .map(|(i, w)| {
                let mut order: Vec<(f64, usize)> =
                    vectors.iter().enumerate().map(|(j, v)| (euclidean(w, v), j)).collect();
                // Self first even when another weight coincides with it.
                order.sort_by(|a, b| a.0.total_cmp(&b.0).then((a.1 != i).cmp(&(b.1 != i))).then(a.1.cmp(&b.1)));
                order.into_iter().take(t).map(|(_, j)| j).collect()
            })
            .collect();
        Ok(Self { vectors, neighbors })
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn objectives(&self) -> usize {
        self.vectors[0].len()
    }

    pub fn vector(&self, i: usize) -> &[f64] {
        &self.vectors[i]
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Number of points of the simplex lattice with `h` divisions in `m` objectives.
pub fn lattice_size(h: usize, m: usize) -> usize {
    binomial(h + m - 1, m - 1)
}

/// All compositions of `h` into `m` non-negative parts, scaled by `1/h`.
pub fn simplex_lattice(h: usize, m: usize) -> Vec<Vec<f64>> {
    fn rec(left: usize, slots: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if slots == 1 {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for v in 0..=left {
            prefix.push(v);
            rec(left - v, slots - 1, prefix, out);
            prefix.pop();
        }
    }
    if h == 0 {
        return vec![vec![1.0 / m as f64; m]];
    }
    let mut raw = Vec::new();
    rec(h, m, &mut Vec::with_capacity(m), &mut raw);
    raw.into_iter().map(|c| c.into_iter().map(|v| v as f64 / h as f64).collect()).collect()
}

/// Uniform draw from the unit simplex (normalized exponentials).
fn random_simplex_point(m: usize, rng: &mut RandomSource) -> Vec<f64> {
    let e: Vec<f64> = (0..m).map(|_| -(1.0 - rng.uniform()).ln()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|v| v / s).collect()
}

/// Exactly `n` weights in `m` objectives: the largest simplex lattice that fits,
/// padded with random simplex points.
pub fn weight_vectors(n: usize, m: usize, t: usize, rng: &mut RandomSource) -> Result<WeightSet> {
    if m < 2 || n < m {
        return Err(Error::InvalidArgument(format!("weight_vectors needs m >= 2 and N >= m (N={n}, m={m})")));
    }
    let mut h = 1;
    while lattice_size(h + 1, m) <= n {
        h += 1;
    }
    let mut vectors = simplex_lattice(h, m);
    while vectors.len() < n {
        vectors.push(random_simplex_point(m, rng));
    }
    WeightSet::from_vectors(vectors, t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_bi_objective_weights() {
        let w = weight_vectors(3, 2, 2, &mut RandomSource::new(0)).unwrap();
        assert_eq!(w.vectors(), &[vec![0.0, 1.0], vec![0.5, 0.5], vec![1.0, 0.0]]);
        assert_eq!(w.neighbors(1)[0], 1);
    }

    #[test]
    fn default_sizes_are_exact_and_on_the_simplex() {
        let mut rng = RandomSource::new(1);
        for (n, m) in [(100, 2), (150, 3), (7, 3)] {
            let w = weight_vectors(n, m, 20, &mut rng).unwrap();
            assert_eq!(w.len(), n);
            for v in w.vectors() {
                assert_eq!(v.len(), m);
                assert!(v.iter().all(|&c| c >= 0.0));
                assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            }
        }
        // H = 15 gives 136 lattice points for three objectives.
        assert_eq!(lattice_size(15, 3), 136);
        assert_eq!(lattice_size(16, 3), 153);
    }

    #[test]
    fn neighbors_are_the_nearest_weights() {
        let w = weight_vectors(100, 2, 20, &mut RandomSource::new(2)).unwrap();
        for i in 0..w.len() {
            let nb = w.neighbors(i);
            assert_eq!(nb.len(), 20);
            assert_eq!(nb[0], i);
            let radius = nb.iter().map(|&j| euclidean(w.vector(i), w.vector(j))).fold(0.0, f64::max);
            let inside = (0..w.len()).filter(|&j| euclidean(w.vector(i), w.vector(j)) < radius - 1e-12).count();
            assert!(inside <= 20);
        }
    }

    #[test]
    fn rejects_bad_sizes() {
        let mut rng = RandomSource::new(3);
        assert!(weight_vectors(1, 2, 1, &mut rng).is_err());
        assert!(weight_vectors(10, 1, 1, &mut rng).is_err());
    }
}
