//! MOEA/D with Tchebycheff decomposition, the static optimizer run between
//! environment changes.

mod operators;
mod weights;

pub use operators::{poly_mutation, sbx_crossover};
pub use weights::{lattice_size, simplex_lattice, weight_vectors, WeightSet};

use crate::dominance::pareto_filter;
use crate::error::{Error, Result};
use crate::population::{Individual, Population};
use crate::problems::Environment;
use crate::random::RandomSource;

/// Weight used in place of an exact zero so no objective is ignored outright.
pub const ZERO_WEIGHT: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct MoeadConfig {
    /// Neighbourhood size `T`.
    pub neighborhood: usize,
    /// Maximum replacements per offspring (`n_r`).
    pub replacements: usize,
    /// Probability of mating within the neighbourhood.
    pub delta: f64,
    pub eta_c: f64,
    pub p_c: f64,
    pub eta_m: f64,
    /// Per-gene mutation probability; `None` means `1/n`.
    pub p_m: Option<f64>,
}

impl Default for MoeadConfig {
    fn default() -> Self {
        Self { neighborhood: 20, replacements: 2, delta: 0.9, eta_c: 20.0, p_c: 1.0, eta_m: 20.0, p_m: None }
    }
}

/// Running componentwise minimum of every objective vector seen.
#[derive(Debug, Clone, PartialEq)]
pub struct IdealPoint {
    pub z: Vec<f64>,
}

impl IdealPoint {
    pub fn of<'a>(points: impl IntoIterator<Item = &'a [f64]>) -> Self {
        let mut it = points.into_iter();
        let mut ideal = IdealPoint { z: it.next().expect("ideal point of an empty set").to_vec() };
        for p in it {
            ideal.update(p);
        }
        ideal
    }

    pub fn update(&mut self, f: &[f64]) {
        for (z, v) in self.z.iter_mut().zip(f) {
            *z = z.min(*v);
        }
    }
}

/// `max_j w_j · |f_j − z_j|`.
pub fn tchebycheff(f: &[f64], w: &[f64], z: &[f64]) -> f64 {
    f.iter()
        .zip(w)
        .zip(z)
        .map(|((f, w), z)| if *w == 0.0 { ZERO_WEIGHT } else { *w } * (f - z).abs())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone)]
pub struct Moead {
    pub weights: WeightSet,
    pub config: MoeadConfig,
}

impl Moead {
    pub fn new(weights: WeightSet, config: MoeadConfig) -> Self {
        Self { weights, config }
    }

    /// Standard set-up: `n` weights for `m` objectives.
    pub fn with_size(n: usize, m: usize, config: MoeadConfig, rng: &mut RandomSource) -> Result<Self> {
        let weights = weight_vectors(n, m, config.neighborhood, rng)?;
        Ok(Self::new(weights, config))
    }

    /// Gives each subproblem the pool member with the best aggregation value
    /// (members may serve several subproblems).
    pub fn assign(&self, pool: &[Individual], ideal: &IdealPoint) -> Vec<Individual> {
        (0..self.weights.len())
            .map(|i| {
                let w = self.weights.vector(i);
                let best = pool
                    .iter()
                    .map(|m| tchebycheff(&m.f, w, &ideal.z))
                    .enumerate()
                    .fold((0, f64::INFINITY), |acc, (j, g)| if g < acc.1 { (j, g) } else { acc })
                    .0;
                pool[best].clone()
            })
            .collect()
    }

    /// Runs `generations` generations from `init` (already evaluated in `env`)
    /// and returns the non-dominated members of the final population.
    pub fn optimize(
        &self,
        init: &Population,
        env: &Environment,
        generations: usize,
        rng: &mut RandomSource,
    ) -> Result<Population> {
        let pop = self.evolve(init, env, generations, rng)?;
        Ok(pareto_filter(&Population::new(pop, self.weights.len())))
    }

    /// Like [`Moead::optimize`] but returns the whole final population,
    /// one member per subproblem.
    pub fn evolve(
        &self,
        init: &Population,
        env: &Environment,
        generations: usize,
        rng: &mut RandomSource,
    ) -> Result<Vec<Individual>> {
        let n_sub = self.weights.len();
        if generations == 0 {
            return Err(Error::InvalidArgument("optimize needs at least one generation".into()));
        }
        if init.len() < n_sub {
            return Err(Error::InvalidArgument(format!(
                "initial population has {} members, {} subproblems need filling",
                init.len(),
                n_sub
            )));
        }
        let cfg = &self.config;
        let bounds = &env.problem.bounds;
        let p_m = cfg.p_m.unwrap_or(1.0 / env.problem.n as f64);

        let mut ideal = IdealPoint::of(init.iter().map(|m| &m.f[..]));
        let mut pop = self.assign(&init.members, &ideal);
        let everyone: Vec<usize> = (0..n_sub).collect();

        for _ in 0..generations {
            for i in 0..n_sub {
                let pool: &[usize] = if rng.uniform() < cfg.delta { self.weights.neighbors(i) } else { &everyone };
                let (a, b) = two_distinct(pool, rng);
                let child = sbx_crossover(&pop[a].x, &pop[b].x, bounds, rng, cfg.eta_c, cfg.p_c);
                let child = poly_mutation(&child, bounds, rng, cfg.eta_m, p_m);
                let child = env.individual(child);
                ideal.update(&child.f);

                let mut order = pool.to_vec();
                rng.shuffle(&mut order);
                let mut replaced = 0;
                for j in order {
                    if replaced >= cfg.replacements {
                        break;
                    }
                    let w = self.weights.vector(j);
                    if tchebycheff(&child.f, w, &ideal.z) < tchebycheff(&pop[j].f, w, &ideal.z) {
                        pop[j] = child.clone();
                        replaced += 1;
                    }
                }
            }
        }
        Ok(pop)
    }
}

fn two_distinct(pool: &[usize], rng: &mut RandomSource) -> (usize, usize) {
    if pool.len() < 2 {
        return (pool[0], pool[0]);
    }
    let a = rng.below(pool.len());
    let mut b = rng.below(pool.len() - 1);
    if b >= a {
        b += 1;
    }
    (pool[a], pool[b])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{DfId, DmopInstance};

    fn random_pop(env: &Environment, n: usize, rng: &mut RandomSource) -> Population {
        Population::new((0..n).map(|_| env.random_individual(rng)).collect(), n)
    }

    #[test]
    fn tchebycheff_examples() {
        assert_eq!(tchebycheff(&[0.2, 0.4], &[0.5, 0.5], &[0.0, 0.0]), 0.2);
        assert_eq!(tchebycheff(&[0.3, 0.3], &[0.5, 0.5], &[0.3, 0.3]), 0.0);
        assert_eq!(tchebycheff(&[1.0, 0.0], &[0.0, 1.0], &[0.0, 0.0]), 1e-6);
    }

    #[test]
    fn ideal_point_is_a_running_minimum() {
        let mut z = IdealPoint::of([&[1.0, 2.0][..], &[3.0, 0.5][..]]);
        assert_eq!(z.z, vec![1.0, 0.5]);
        z.update(&[2.0, 0.1]);
        assert_eq!(z.z, vec![1.0, 0.1]);
    }

    proptest::proptest! {
        #[test]
        fn ideal_point_is_monotone(updates in proptest::collection::vec(proptest::collection::vec(-10.0f64..10.0, 3), 1..50)) {
            let mut z = IdealPoint::of([&updates[0][..]]);
            for u in &updates {
                let before = z.z.clone();
                z.update(u);
                proptest::prop_assert!(z.z.iter().zip(&before).all(|(a, b)| a <= b));
                proptest::prop_assert!(z.z.iter().zip(u).all(|(a, b)| a <= b));
            }
        }
    }

    #[test]
    fn zero_generations_is_an_error() {
        let p = DmopInstance::new(DfId::Df1, 10).unwrap();
        let env = Environment::new(&p, 0.0);
        let mut rng = RandomSource::new(0);
        let moead = Moead::with_size(20, 2, MoeadConfig::default(), &mut rng).unwrap();
        let init = random_pop(&env, 20, &mut rng);
        assert!(moead.optimize(&init, &env, 0, &mut rng).is_err());
        assert!(moead.optimize(&random_pop(&env, 5, &mut rng), &env, 1, &mut rng).is_err());
    }

    #[test]
    fn one_generation_output_is_nondominated_and_counts_evaluations() {
        let p = DmopInstance::new(DfId::Df3, 10).unwrap();
        let env = Environment::new(&p, 0.3);
        let mut rng = RandomSource::new(1);
        let moead = Moead::with_size(30, 2, MoeadConfig::default(), &mut rng).unwrap();
        let init = random_pop(&env, 30, &mut rng);
        let before = env.evaluations();
        let out = moead.optimize(&init, &env, 1, &mut rng).unwrap();
        assert_eq!(env.evaluations() - before, 30);
        assert_eq!(pareto_filter(&out), out);
        assert!(out.evaluated_at(0.3));
    }

    #[test]
    fn disabled_operators_leave_the_population_fixed() {
        let p = DmopInstance::new(DfId::Df2, 10).unwrap();
        let env = Environment::new(&p, 0.0);
        let mut rng = RandomSource::new(2);
        let cfg = MoeadConfig { p_c: 0.0, p_m: Some(0.0), ..MoeadConfig::default() };
        let moead = Moead::with_size(40, 2, cfg, &mut rng).unwrap();
        let init = random_pop(&env, 60, &mut rng);
        let start = moead.assign(&init.members, &IdealPoint::of(init.iter().map(|m| &m.f[..])));
        let end = moead.evolve(&init, &env, 5, &mut rng).unwrap();
        assert_eq!(start, end);
    }

    #[test]
    fn same_seed_same_result() {
        let p = DmopInstance::new(DfId::Df10, 10).unwrap();
        let env = Environment::new(&p, 0.2);
        let run = |seed| {
            let mut rng = RandomSource::new(seed);
            let moead = Moead::with_size(50, 3, MoeadConfig::default(), &mut rng).unwrap();
            let init = random_pop(&env, 50, &mut rng);
            moead.optimize(&init, &env, 5, &mut rng).unwrap()
        };
        let (a, b) = (run(9), run(9));
        let bits = |p: &Population| -> Vec<u64> { p.iter().flat_map(|m| m.f.iter().map(|v| v.to_bits())).collect() };
        assert_eq!(bits(&a), bits(&b));
    }
}
