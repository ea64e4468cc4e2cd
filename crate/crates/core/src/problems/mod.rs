//! Time-dependent benchmark problems, the discrete-time controller and
//! reference-front sampling.

mod df;

use std::cell::Cell;
use std::fmt;
use std::str::FromStr;

use crate::dominance::nondominated_indices;
use crate::error::{ensure_len, Error, Result};
use crate::population::{Bounds, DecisionVector, Individual, ObjectiveVector};

/// Environment clock: severity `n_t`, frequency `tau_t` and generation counter `tau`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimeContext {
    pub n_t: u32,
    pub tau_t: u32,
    pub tau: u32,
}

impl TimeContext {
    pub fn new(n_t: u32, tau_t: u32, tau: u32) -> Result<Self> {
        if n_t == 0 || tau_t == 0 {
            return Err(Error::InvalidArgument("n_t and tau_t must be positive".into()));
        }
        Ok(Self { n_t, tau_t, tau })
    }

    /// `t = ⌊τ / τ_t⌋ / n_t`.
    pub fn time(&self) -> f64 {
        time_of(self.n_t, self.tau_t, self.tau)
    }

    /// Index of the environment the counter currently sits in.
    pub fn environment(&self) -> u32 {
        self.tau / self.tau_t
    }
}

pub fn time_of(n_t: u32, tau_t: u32, tau: u32) -> f64 {
    f64::from(tau / tau_t) / f64::from(n_t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DfId {
    Df1,
    Df2,
    Df3,
    Df4,
    Df5,
    Df6,
    Df7,
    Df8,
    Df9,
    Df10,
    Df11,
    Df12,
    Df13,
    Df14,
}

impl DfId {
    pub const ALL: [DfId; 14] = [
        DfId::Df1,
        DfId::Df2,
        DfId::Df3,
        DfId::Df4,
        DfId::Df5,
        DfId::Df6,
        DfId::Df7,
        DfId::Df8,
        DfId::Df9,
        DfId::Df10,
        DfId::Df11,
        DfId::Df12,
        DfId::Df13,
        DfId::Df14,
    ];

    pub fn number(self) -> usize {
        DfId::ALL.iter().position(|&d| d == self).unwrap() + 1
    }

    pub fn objectives(self) -> usize {
        if self.number() <= 9 {
            2
        } else {
            3
        }
    }
}

impl fmt::Display for DfId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DF{}", self.number())
    }
}

impl FromStr for DfId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        lower
            .strip_prefix("df")
            .and_then(|d| d.parse::<usize>().ok())
            .filter(|d| (1..=14).contains(d))
            .map(|d| DfId::ALL[d - 1])
            .ok_or_else(|| Error::UnknownProblem(s.to_string()))
    }
}

/// A DF problem configured with a decision dimension and its box.
#[derive(Debug, Clone, PartialEq)]
pub struct DmopInstance {
    pub id: DfId,
    pub m: usize,
    pub n: usize,
    pub bounds: Bounds,
}

/// Reference points sampled on the analytic front at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceFront {
    pub points: Vec<ObjectiveVector>,
    pub t: f64,
    pub count: usize,
}

impl ReferenceFront {
    pub fn as_slices(&self) -> Vec<&[f64]> {
        self.points.iter().map(|p| &p[..]).collect()
    }

    /// Componentwise maximum of the sampled points.
    pub fn nadir(&self) -> ObjectiveVector {
        let m = self.points[0].len();
        (0..m).map(|j| self.points.iter().map(|p| p[j]).fold(f64::NEG_INFINITY, f64::max)).collect()
    }
}

impl DmopInstance {
    /// `id` with `n` decision variables (`n` must leave at least one distance variable).
    pub fn new(id: DfId, n: usize) -> Result<Self> {
        let m = id.objectives();
        if n <= m {
            return Err(Error::InvalidArgument(format!("{id} needs more than {m} decision variables, got {n}")));
        }
        let (mut lower, mut upper) = (vec![0.0; n], vec![1.0; n]);
        let positions = m - 1;
        let (tail_lo, tail_hi) = match id {
            DfId::Df1 | DfId::Df2 | DfId::Df11 => (0.0, 1.0),
            DfId::Df3 => (-1.0, 2.0),
            DfId::Df4 => (-2.0, 2.0),
            DfId::Df7 => (0.0, 1.0),
            _ => (-1.0, 1.0),
        };
        lower[positions..].fill(tail_lo);
        upper[positions..].fill(tail_hi);
        match id {
            DfId::Df4 => {
                lower[0] = -2.0;
                upper[0] = 2.0;
            }
            DfId::Df7 => {
                lower[0] = 1.0;
                upper[0] = 4.0;
            }
            _ => {}
        }
        Ok(Self { id, m, n, bounds: Bounds::new(lower, upper)? })
    }

    pub fn from_name(name: &str, n: usize) -> Result<Self> {
        Self::new(name.parse()?, n)
    }

    /// Objective vector of `x` at time `t`.
    pub fn evaluate(&self, x: &[f64], t: f64) -> Result<ObjectiveVector> {
        ensure_len(self.n, x.len())?;
        let mut out = Vec::with_capacity(self.m);
        df::evaluate(self.id, x, t, &mut out);
        Ok(ObjectiveVector(out))
    }

    /// A point of the optimal decision manifold at `t`, addressed by `m − 1`
    /// position parameters in `[0, 1]`.
    pub fn optimal_point(&self, t: f64, position: &[f64]) -> Result<DecisionVector> {
        ensure_len(self.m - 1, position.len())?;
        let x = df::optimal_point(self.id, self.n, t, position, self.bounds.upper()[0]);
        Ok(DecisionVector(x))
    }

    /// Uniformly random point of the decision box.
    pub fn random_point(&self, rng: &mut crate::random::RandomSource) -> DecisionVector {
        let (lo, hi) = (self.bounds.lower(), self.bounds.upper());
        (0..self.n).map(|i| rng.uniform_in(lo[i], hi[i])).collect()
    }

    /// Samples the analytic front at time `t`.
    ///
    /// Bi-objective fronts return exactly `count` points from a uniform sweep of
    /// the position parameter (disconnected fronts are swept densely, filtered
    /// and thinned evenly). Tri-objective fronts use a parameter grid of at least
    /// `count` nodes; points that another node dominates (holes, disconnected
    /// segments) are dropped, so fewer than `count` may remain.
    pub fn sample_true_pof(&self, t: f64, count: usize) -> Result<ReferenceFront> {
        if count < 2 {
            return Err(Error::InvalidArgument(format!("reference front needs count >= 2, got {count}")));
        }
        let points = if self.m == 2 { self.sample_biobjective(t, count)? } else { self.sample_triobjective(t, count)? };
        Ok(ReferenceFront { count: points.len(), points, t })
    }

    fn front_point(&self, t: f64, pos: &[f64]) -> Result<ObjectiveVector> {
        let x = self.optimal_point(t, pos)?;
        self.evaluate(&x, t)
    }

    fn sample_biobjective(&self, t: f64, count: usize) -> Result<Vec<ObjectiveVector>> {
        let sweep = |len: usize| -> Result<Vec<ObjectiveVector>> {
            (0..len).map(|i| self.front_point(t, &[i as f64 / (len - 1) as f64])).collect()
        };
        let direct = sweep(count)?;
        if nondominated_indices(&slices(&direct)).len() == count {
            return Ok(direct);
        }
        let dense = sweep(count * 20)?;
        let kept: Vec<ObjectiveVector> =
            nondominated_indices(&slices(&dense)).into_iter().map(|i| dense[i].clone()).collect();
        Ok(thin_evenly(kept, count))
    }

    fn sample_triobjective(&self, t: f64, count: usize) -> Result<Vec<ObjectiveVector>> {
        if matches!(self.id, DfId::Df10 | DfId::Df11 | DfId::Df12) {
            return self.filtered_front(t, &sphere_parameters(self.id, count));
        }
        // Square grids get refined while disconnected segments leave too few survivors.
        let mut k = (count as f64).sqrt().ceil() as usize;
        let max_k = 4 * k;
        loop {
            let step = 1.0 / (k - 1) as f64;
            let grid: Vec<[f64; 2]> =
                (0..k).flat_map(|i| (0..k).map(move |j| [i as f64 * step, j as f64 * step])).collect();
            let front = self.filtered_front(t, &grid)?;
            if front.len() >= count || k >= max_k {
                return Ok(front);
            }
            k = (k * 3 / 2).min(max_k);
        }
    }

    fn filtered_front(&self, t: f64, params: &[[f64; 2]]) -> Result<Vec<ObjectiveVector>> {
        let pts: Vec<ObjectiveVector> = params.iter().map(|p| self.front_point(t, p)).collect::<Result<_>>()?;
        Ok(nondominated_indices(&slices(&pts)).into_iter().map(|i| pts[i].clone()).collect())
    }
}

fn slices(points: &[ObjectiveVector]) -> Vec<&[f64]> {
    points.iter().map(|p| &p[..]).collect()
}

/// Keeps `count` points at evenly spaced indices (first and last included).
fn thin_evenly(points: Vec<ObjectiveVector>, count: usize) -> Vec<ObjectiveVector> {
    if points.len() <= count {
        return points;
    }
    let last = (points.len() - 1) as f64;
    (0..count).map(|i| points[(i as f64 * last / (count - 1) as f64).round() as usize].clone()).collect()
}

/// Simplex-lattice points with the smallest `H` giving at least `count` nodes,
/// projected onto the unit sphere and converted to the two angle parameters of
/// the spherical DF fronts.
fn sphere_parameters(id: DfId, count: usize) -> Vec<[f64; 2]> {
    use std::f64::consts::FRAC_2_PI;
    let mut h = 1;
    while (h + 1) * (h + 2) / 2 < count {
        h += 1;
    }
    let mut out = Vec::new();
    for i in 0..=h {
        for j in 0..=(h - i) {
            let w = [i as f64, j as f64, (h - i - j) as f64];
            let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
            let u = [w[0] / norm, w[1] / norm, w[2] / norm];
            let p = match id {
                // f1 ∝ sin(0.5πx1), (f2, f3) ∝ (sin, cos)(0.5πx2)
                DfId::Df10 | DfId::Df11 => [FRAC_2_PI * u[0].asin(), FRAC_2_PI * u[1].atan2(u[2])],
                // f3 ∝ sin(0.5πx1), (f2, f1) ∝ (sin, cos)(0.5πx2)
                _ => [FRAC_2_PI * u[2].asin(), FRAC_2_PI * u[1].atan2(u[0])],
            };
            out.push([p[0].clamp(0.0, 1.0), p[1].clamp(0.0, 1.0)]);
        }
    }
    out
}

/// Evaluates individuals against one problem at one time and counts calls.
#[derive(Debug)]
pub struct Environment<'a> {
    pub problem: &'a DmopInstance,
    pub t: f64,
    evaluations: Cell<u64>,
}

impl<'a> Environment<'a> {
    pub fn new(problem: &'a DmopInstance, t: f64) -> Self {
        Self { problem, t, evaluations: Cell::new(0) }
    }

    /// Evaluates `x`, clamping it into the box first.
    pub fn individual(&self, mut x: DecisionVector) -> Individual {
        self.problem.bounds.clamp_in_place(&mut x);
        self.evaluations.set(self.evaluations.get() + 1);
        let f = self.problem.evaluate(&x, self.t).expect("decision vector sized by the problem");
        Individual::new(x, f, self.t)
    }

    /// Re-evaluates an existing member at this environment's time.
    pub fn reevaluate(&self, ind: &Individual) -> Individual {
        self.individual(ind.x.clone())
    }

    pub fn random_individual(&self, rng: &mut crate::random::RandomSource) -> Individual {
        self.individual(self.problem.random_point(rng))
    }

    pub fn evaluations(&self) -> u64 {
        self.evaluations.get()
    }
}

/// All fourteen problems with `n = 10`.
pub fn catalog() -> Vec<DmopInstance> {
    DfId::ALL.iter().map(|&id| DmopInstance::new(id, 10).expect("n = 10 is valid for every DF problem")).collect()
}
