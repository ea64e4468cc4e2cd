//! Value types shared by every stage of the algorithm: decision and objective
//! vectors, evaluated individuals, populations and box bounds.

use std::ops::{Deref, DerefMut};

use crate::error::{ensure_len, Error, Result};

/// A point in decision space.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DecisionVector(pub Vec<f64>);

/// A point in objective space (all objectives minimized).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ObjectiveVector(pub Vec<f64>);

macro_rules! vector_newtype {
    ($name:ident) => {
        impl Deref for $name {
            type Target = [f64];
            fn deref(&self) -> &[f64] {
                &self.0
            }
        }

        impl DerefMut for $name {
            fn deref_mut(&mut self) -> &mut [f64] {
                &mut self.0
            }
        }

        impl From<Vec<f64>> for $name {
            fn from(v: Vec<f64>) -> Self {
                Self(v)
            }
        }

        impl From<&[f64]> for $name {
            fn from(v: &[f64]) -> Self {
                Self(v.to_vec())
            }
        }

        impl FromIterator<f64> for $name {
            fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
                Self(iter.into_iter().collect())
            }
        }

        impl $name {
            pub fn into_inner(self) -> Vec<f64> {
                self.0
            }

            pub fn is_finite(&self) -> bool {
                self.0.iter().all(|v| v.is_finite())
            }
        }
    };
}

vector_newtype!(DecisionVector);
vector_newtype!(ObjectiveVector);

/// Euclidean distance between two equally sized slices.
pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// A decision vector together with its objectives and the time it was evaluated at.
#[derive(Debug, Clone, PartialEq)]
pub struct Individual {
    pub x: DecisionVector,
    pub f: ObjectiveVector,
    pub t_eval: f64,
}

impl Individual {
    pub fn new(x: DecisionVector, f: ObjectiveVector, t_eval: f64) -> Self {
        Self { x, f, t_eval }
    }
}

/// An ordered list of individuals with a nominal capacity.
///
/// `members.len()` may exceed `capacity` only for union pools handed to the
/// optimizer, which truncates them.
#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    pub members: Vec<Individual>,
    pub capacity: usize,
}

impl Population {
    pub fn new(members: Vec<Individual>, capacity: usize) -> Self {
        Self { members, capacity }
    }

    pub fn with_capacity(capacity: usize) -> Self {
        Self { members: Vec::with_capacity(capacity), capacity }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_overfull(&self) -> bool {
        self.members.len() > self.capacity
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Individual> {
        self.members.iter()
    }

    /// Objective vectors in member order.
    pub fn objectives(&self) -> Vec<&[f64]> {
        self.members.iter().map(|m| &m.f[..]).collect()
    }

    /// True when every member was evaluated at time `t`.
    pub fn evaluated_at(&self, t: f64) -> bool {
        self.members.iter().all(|m| m.t_eval == t)
    }
}

impl<'a> IntoIterator for &'a Population {
    type Item = &'a Individual;
    type IntoIter = std::slice::Iter<'a, Individual>;
    fn into_iter(self) -> Self::IntoIter {
        self.members.iter()
    }
}

/// Axis-aligned box constraints of a decision space.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        ensure_len(lower.len(), upper.len())?;
        if let Some(i) = lower.iter().zip(&upper).position(|(l, u)| l.partial_cmp(u) != Some(std::cmp::Ordering::Less))
        {
            return Err(Error::InvalidArgument(format!(
                "bounds[{i}]: lower {} must be strictly below upper {}",
                lower[i], upper[i]
            )));
        }
        Ok(Self { lower, upper })
    }

    /// The same interval `[lo, hi]` on every one of `n` dimensions.
    pub fn uniform(n: usize, lo: f64, hi: f64) -> Self {
        Self::new(vec![lo; n], vec![hi; n]).expect("uniform bounds with lo < hi")
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim() && x.iter().enumerate().all(|(i, v)| *v >= self.lower[i] && *v <= self.upper[i])
    }

    pub fn clamp_in_place(&self, x: &mut [f64]) {
        for (i, v) in x.iter_mut().enumerate() {
            *v = v.max(self.lower[i]).min(self.upper[i]);
        }
    }
}

/// Componentwise projection of `x` onto the box.
pub fn clamp(x: &DecisionVector, b: &Bounds) -> Result<DecisionVector> {
    ensure_len(b.dim(), x.len())?;
    let mut out = x.clone();
    b.clamp_in_place(&mut out);
    Ok(out)
}
