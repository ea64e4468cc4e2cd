//! Reaction to an environment change: composes the next optimizer's starting
//! population from denoised predictions, survivors of the previous front and
//! random newcomers, and keeps the knee history the predictions rely on.

use std::fmt;
use std::str::FromStr;

use crate::ddm::{adaptive_psi, denoise_from, GuidanceConfig, NoiseSchedule, Prior, PriorKind, SampleSet};
use crate::error::{Error, Result};
use crate::knee::{akp_predict, knee_of, linear_predict, partition, KneeTrack};
use crate::population::{euclidean, DecisionVector, Individual, Population};
use crate::problems::Environment;
use crate::random::RandomSource;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StrategyKind {
    /// Trend-predicted knees guiding the denoiser.
    Ddm,
    /// Linearly extrapolated knees guiding the denoiser.
    V1,
    /// Previous front plus random individuals.
    V2,
    /// Denoised slots replaced by random individuals.
    V3,
    RandomRestart,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 5] =
        [StrategyKind::Ddm, StrategyKind::V1, StrategyKind::V2, StrategyKind::V3, StrategyKind::RandomRestart];

    pub fn name(self) -> &'static str {
        match self {
            StrategyKind::Ddm => "ddm",
            StrategyKind::V1 => "v1",
            StrategyKind::V2 => "v2",
            StrategyKind::V3 => "v3",
            StrategyKind::RandomRestart => "random",
        }
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StrategyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ddm" => Ok(StrategyKind::Ddm),
            "v1" => Ok(StrategyKind::V1),
            "v2" => Ok(StrategyKind::V2),
            "v3" => Ok(StrategyKind::V3),
            "random" | "random_restart" => Ok(StrategyKind::RandomRestart),
            _ => Err(Error::UnknownStrategy(s.to_string())),
        }
    }
}

/// Where a member of a composed population came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Predicted { subspace: usize },
    Last,
    Random,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResponseConfig {
    /// Number of subspaces along `f1`.
    pub subspaces: usize,
    pub frac_pred: f64,
    pub frac_last: f64,
    pub guidance: GuidanceConfig,
    pub schedule: NoiseSchedule,
    pub prior: PriorKind,
    pub sample_set: SampleSet,
    /// Use zero deflection instead of sampling it.
    pub deterministic_theta: bool,
}

impl Default for ResponseConfig {
    fn default() -> Self {
        Self {
            subspaces: 5,
            frac_pred: 0.4,
            frac_last: 0.4,
            guidance: GuidanceConfig::default(),
            schedule: NoiseSchedule::cosine(100).expect("K = 100 is valid"),
            prior: PriorKind::Knee,
            sample_set: SampleSet::History,
            deterministic_theta: false,
        }
    }
}

impl ResponseConfig {
    pub fn validate(&self) -> Result<()> {
        self.guidance.validate()?;
        if self.subspaces == 0 {
            return Err(Error::Config("response.subspaces must be positive".into()));
        }
        let ok = |f: f64| (0.0..=1.0).contains(&f);
        if !ok(self.frac_pred) || !ok(self.frac_last) || self.frac_pred + self.frac_last > 1.0 + 1e-12 {
            return Err(Error::Config(format!(
                "composition fractions must be in [0, 1] with pred + last <= 1 (got {}, {})",
                self.frac_pred, self.frac_last
            )));
        }
        Ok(())
    }

    /// Slot counts `(pred, last, rand)` for a population of `n`; rounding
    /// remainders go to the random share.
    pub fn shares(&self, n: usize) -> (usize, usize, usize) {
        let pred = (self.frac_pred * n as f64).floor() as usize;
        let last = ((self.frac_last * n as f64).floor() as usize).min(n - pred);
        (pred, last, n - pred - last)
    }
}

/// Everything remembered between environments.
#[derive(Debug, Clone, PartialEq)]
pub struct History {
    pub pos_prev: Option<Population>,
    pub pos_prev2: Option<Population>,
    /// True knees per subspace of the last two recorded fronts.
    pub knees_prev: Vec<Option<Individual>>,
    pub knees_prev2: Vec<Option<Individual>>,
    /// Knees predicted for the environment currently being solved.
    pub predicted: Vec<Option<DecisionVector>>,
    /// Prior spread per subspace for the next prediction.
    pub psi: Vec<f64>,
    /// Number of fronts recorded so far.
    pub recorded: usize,
}

impl History {
    pub fn new(subspaces: usize, guidance: &GuidanceConfig) -> Self {
        Self {
            pos_prev: None,
            pos_prev2: None,
            knees_prev: vec![None; subspaces],
            knees_prev2: vec![None; subspaces],
            predicted: vec![None; subspaces],
            psi: vec![guidance.psi_min; subspaces],
            recorded: 0,
        }
    }

    fn track(&self, i: usize) -> KneeTrack {
        KneeTrack { subspace: i, prev: self.knees_prev[i].clone(), prev2: self.knees_prev2[i].clone() }
    }
}

/// A composed starting population with the provenance of every member.
#[derive(Debug, Clone, PartialEq)]
pub struct Response {
    pub population: Population,
    pub origins: Vec<Origin>,
}

/// Spread-preserving subset: start from the smallest-`f1` member, then
/// repeatedly add the member farthest (in objective space) from those chosen.
pub fn farthest_point_subset(pop: &Population, k: usize) -> Vec<usize> {
    if k >= pop.len() {
        return (0..pop.len()).collect();
    }
    if k == 0 {
        return Vec::new();
    }
    let objs = pop.objectives();
    let first = (0..objs.len()).fold(0, |b, i| if objs[i][0] < objs[b][0] { i } else { b });
    let mut chosen = vec![first];
    let mut gap: Vec<f64> = objs.iter().map(|f| euclidean(f, objs[first])).collect();
    while chosen.len() < k {
        let next = (0..objs.len()).fold(first, |b, i| if gap[i] > gap[b] { i } else { b });
        chosen.push(next);
        for (g, f) in gap.iter_mut().zip(&objs) {
            *g = g.min(euclidean(f, objs[next]));
        }
    }
    chosen
}

/// Splits `total` across groups in proportion to `weights` (largest remainder).
fn apportion(total: usize, weights: &[usize]) -> Vec<usize> {
    let sum: usize = weights.iter().sum();
    if sum == 0 {
        return vec![0; weights.len()];
    }
    let exact: Vec<f64> = weights.iter().map(|&w| total as f64 * w as f64 / sum as f64).collect();
    let mut out: Vec<usize> = exact.iter().map(|e| e.floor() as usize).collect();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| (exact[b] - exact[b].floor()).total_cmp(&(exact[a] - exact[a].floor())).then(a.cmp(&b)));
    let short = total - out.iter().sum::<usize>();
    for &i in order.iter().take(short) {
        out[i] += 1;
    }
    out
}

/// Builds the starting population for the environment `env` and records the
/// knees predicted for it in `hist.predicted`.
pub fn respond(
    kind: StrategyKind,
    hist: &mut History,
    env: &Environment,
    n: usize,
    cfg: &ResponseConfig,
    rng: &mut RandomSource,
) -> Result<Response> {
    let mut rand_rng = rng.fork();
    let mut pred_rng = rng.fork();
    hist.predicted = vec![None; cfg.subspaces];

    let mut members: Vec<Individual> = Vec::with_capacity(n);
    let mut origins: Vec<Origin> = Vec::with_capacity(n);
    let prev = match (&hist.pos_prev, hist.recorded >= 2, kind) {
        (Some(p), true, k) if k != StrategyKind::RandomRestart && !p.is_empty() => p.clone(),
        _ => {
            for _ in 0..n {
                members.push(env.random_individual(&mut rand_rng));
                origins.push(Origin::Random);
            }
            return Ok(Response { population: Population::new(members, n), origins });
        }
    };

    let (mut n_pred, mut n_last, _) = cfg.shares(n);
    if kind == StrategyKind::V2 {
        n_last += n_pred;
        n_pred = 0;
    }

    if matches!(kind, StrategyKind::Ddm | StrategyKind::V1) {
        for (x, subspace) in predicted_members(kind, hist, &prev, env, n_pred, cfg, &mut pred_rng)? {
            members.push(env.individual(x));
            origins.push(Origin::Predicted { subspace });
        }
    }
    // Slots the predictor could not fill (and all of v3's) are random, drawn
    // from the prediction stream so the remaining slots match the full method.
    while members.len() < n_pred {
        members.push(env.random_individual(&mut pred_rng));
        origins.push(Origin::Random);
    }

    for i in farthest_point_subset(&prev, n_last) {
        members.push(env.reevaluate(&prev.members[i]));
        origins.push(Origin::Last);
    }
    while members.len() < n {
        members.push(env.random_individual(&mut rand_rng));
        origins.push(Origin::Random);
    }
    Ok(Response { population: Population::new(members, n), origins })
}

/// Denoised decision vectors and their subspace, `n_pred` in total when every
/// subspace has a knee to aim at.
fn predicted_members(
    kind: StrategyKind,
    hist: &mut History,
    prev: &Population,
    env: &Environment,
    n_pred: usize,
    cfg: &ResponseConfig,
    rng: &mut RandomSource,
) -> Result<Vec<(DecisionVector, usize)>> {
    let bounds = &env.problem.bounds;
    let part = partition(&prev.objectives(), cfg.subspaces)?;
    let groups: Vec<Vec<usize>> = (0..cfg.subspaces).map(|i| part.members(i)).collect();

    for i in 0..cfg.subspaces {
        let track = hist.track(i);
        let Some(last_knee) = &track.prev else { continue };
        let knee = match (kind, track.prev2.is_some()) {
            (StrategyKind::V1, true) => linear_predict(&track, bounds)?,
            (_, true) => akp_predict(&track, bounds, cfg.deterministic_theta, rng)?,
            // Only one knee seen for this subspace: assume it stays put.
            (_, false) => last_knee.x.clone(),
        };
        hist.predicted[i] = Some(knee);
    }

    let weights: Vec<usize> =
        (0..cfg.subspaces).map(|i| if hist.predicted[i].is_some() { groups[i].len() } else { 0 }).collect();
    let quota = apportion(n_pred, &weights);
    let kde = match cfg.prior {
        PriorKind::Kde => Some(Prior::kde(prev.iter().map(|m| m.x.clone()).collect())?),
        PriorKind::Knee => None,
    };

    let mut out = Vec::with_capacity(n_pred);
    for i in 0..cfg.subspaces {
        if quota[i] == 0 {
            continue;
        }
        let mut sub_rng = rng.fork();
        let local: Vec<DecisionVector> = groups[i].iter().map(|&k| prev.members[k].x.clone()).collect();
        let starts: Vec<DecisionVector> = (0..quota[i]).map(|j| local[j % local.len()].clone()).collect();
        let prior = match &kde {
            Some(p) => p.clone(),
            None => Prior::Knee {
                knee: hist.predicted[i].clone().expect("quota only for predicted subspaces"),
                psi: hist.psi[i],
            },
        };
        for x in denoise_from(&starts, &local, &prior, &cfg.schedule, bounds, cfg.sample_set, &mut sub_rng)? {
            out.push((x, i));
        }
    }
    Ok(out)
}

/// Extracts the true knees of the optimized front `pos`, updates the prior
/// spreads from this environment's prediction error and rolls the history.
/// A subspace left empty keeps its previous knee.
pub fn record_truth(hist: &mut History, pos: Population, cfg: &ResponseConfig) -> Result<()> {
    if pos.is_empty() {
        return Err(Error::InvalidArgument("cannot record an empty front".into()));
    }
    let part = partition(&pos.objectives(), cfg.subspaces)?;
    let knees: Vec<Option<Individual>> = (0..cfg.subspaces)
        .map(|i| {
            let group: Vec<Individual> = part.members(i).into_iter().map(|k| pos.members[k].clone()).collect();
            knee_of(&group).cloned().or_else(|| hist.knees_prev[i].clone())
        })
        .collect();
    for ((psi, pred), truth) in hist.psi.iter_mut().zip(&hist.predicted).zip(&knees) {
        *psi = adaptive_psi(pred.as_deref(), truth.as_ref().map(|k| &k.x[..]), &cfg.guidance);
    }
    hist.knees_prev2 = std::mem::replace(&mut hist.knees_prev, knees);
    hist.pos_prev2 = hist.pos_prev.replace(pos);
    hist.predicted = vec![None; cfg.subspaces];
    hist.recorded += 1;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moead::{Moead, MoeadConfig};
    use crate::problems::{DfId, DmopInstance};

    fn optimized_front(p: &DmopInstance, t: f64, seed: u64) -> Population {
        let env = Environment::new(p, t);
        let mut rng = RandomSource::new(seed);
        let moead = Moead::with_size(100, p.m, MoeadConfig::default(), &mut rng).unwrap();
        let init = Population::new((0..100).map(|_| env.random_individual(&mut rng)).collect(), 100);
        moead.optimize(&init, &env, 60, &mut rng).unwrap()
    }

    fn primed(p: &DmopInstance, cfg: &ResponseConfig) -> History {
        let mut h = History::new(cfg.subspaces, &cfg.guidance);
        record_truth(&mut h, optimized_front(p, 0.0, 1), cfg).unwrap();
        record_truth(&mut h, optimized_front(p, 0.1, 2), cfg).unwrap();
        h
    }

    #[test]
    fn strategy_names_round_trip() {
        for k in StrategyKind::ALL {
            assert_eq!(k.name().parse::<StrategyKind>().unwrap(), k);
        }
        assert!(matches!("v9".parse::<StrategyKind>(), Err(Error::UnknownStrategy(_))));
    }

    #[test]
    fn shares_give_remainders_to_random() {
        let cfg = ResponseConfig::default();
        assert_eq!(cfg.shares(100), (40, 40, 20));
        assert_eq!(cfg.shares(150), (60, 60, 30));
        assert_eq!(cfg.shares(7), (2, 2, 3));
        assert_eq!(apportion(10, &[3, 0, 1]), vec![8, 0, 2]);
        assert_eq!(apportion(5, &[0, 0]), vec![0, 0]);
    }

    #[test]
    fn early_environments_are_random() {
        let p = DmopInstance::new(DfId::Df1, 10).unwrap();
        let cfg = ResponseConfig::default();
        let mut h = History::new(cfg.subspaces, &cfg.guidance);
        let env = Environment::new(&p, 0.0);
        let r = respond(StrategyKind::Ddm, &mut h, &env, 100, &cfg, &mut RandomSource::new(0)).unwrap();
        assert_eq!(r.population.len(), 100);
        assert!(r.origins.iter().all(|o| *o == Origin::Random));
        record_truth(&mut h, optimized_front(&p, 0.0, 1), &cfg).unwrap();
        let r = respond(StrategyKind::Ddm, &mut h, &env, 100, &cfg, &mut RandomSource::new(0)).unwrap();
        assert!(r.origins.iter().all(|o| *o == Origin::Random));
    }

    #[test]
    fn full_response_composition() {
        let p = DmopInstance::new(DfId::Df2, 10).unwrap();
        let cfg = ResponseConfig::default();
        for kind in StrategyKind::ALL {
            let mut h = primed(&p, &cfg);
            let env = Environment::new(&p, 0.2);
            let r = respond(kind, &mut h, &env, 100, &cfg, &mut RandomSource::new(3)).unwrap();
            assert_eq!(r.population.len(), 100, "{kind}");
            assert!(r.population.evaluated_at(0.2));
            assert!(r.population.iter().all(|m| p.bounds.contains(&m.x)));
            let count = |pred: fn(&Origin) -> bool| r.origins.iter().filter(|o| pred(o)).count();
            let predicted = count(|o| matches!(o, Origin::Predicted { .. }));
            match kind {
                StrategyKind::Ddm | StrategyKind::V1 => assert_eq!(predicted, 40, "{kind}"),
                _ => assert_eq!(predicted, 0, "{kind}"),
            }
            if kind == StrategyKind::RandomRestart {
                assert_eq!(count(|o| *o == Origin::Random), 100);
            }
        }
    }

    #[test]
    fn v2_keeps_the_whole_previous_front_when_it_fits() {
        let p = DmopInstance::new(DfId::Df1, 10).unwrap();
        let cfg = ResponseConfig::default();
        let mut h = primed(&p, &cfg);
        let prev = h.pos_prev.clone().unwrap();
        let env = Environment::new(&p, 0.2);
        let r = respond(StrategyKind::V2, &mut h, &env, 100, &cfg, &mut RandomSource::new(4)).unwrap();
        let kept = r.population.members.iter().filter(|m| prev.iter().any(|q| q.x == m.x)).count();
        assert_eq!(kept, prev.len().min(80));
    }

    #[test]
    fn v3_differs_from_ddm_only_in_predicted_slots() {
        let p = DmopInstance::new(DfId::Df3, 10).unwrap();
        let cfg = ResponseConfig::default();
        let env = Environment::new(&p, 0.2);
        let mut h1 = primed(&p, &cfg);
        let mut h2 = h1.clone();
        let a = respond(StrategyKind::Ddm, &mut h1, &env, 100, &cfg, &mut RandomSource::new(5)).unwrap();
        let b = respond(StrategyKind::V3, &mut h2, &env, 100, &cfg, &mut RandomSource::new(5)).unwrap();
        for k in 0..100 {
            if matches!(a.origins[k], Origin::Predicted { .. }) {
                assert_eq!(b.origins[k], Origin::Random);
            } else {
                assert_eq!(a.population.members[k], b.population.members[k], "slot {k}");
            }
        }
    }

    #[test]
    fn record_truth_rolls_history_and_sets_psi() {
        let p = DmopInstance::new(DfId::Df1, 10).unwrap();
        let cfg = ResponseConfig::default();
        let mut h = History::new(cfg.subspaces, &cfg.guidance);
        let f0 = optimized_front(&p, 0.0, 1);
        record_truth(&mut h, f0.clone(), &cfg).unwrap();
        assert!(h.psi.iter().all(|&v| v == 0.1));
        let f1 = optimized_front(&p, 0.1, 2);
        record_truth(&mut h, f1.clone(), &cfg).unwrap();
        assert_eq!(h.pos_prev2.as_ref(), Some(&f0));
        assert_eq!(h.pos_prev.as_ref(), Some(&f1));
        assert_eq!(h.recorded, 2);

        // A perfect prediction keeps ψ at its minimum.
        let f2 = optimized_front(&p, 0.2, 3);
        let part = partition(&f2.objectives(), cfg.subspaces).unwrap();
        for i in 0..cfg.subspaces {
            let group: Vec<Individual> = part.members(i).into_iter().map(|k| f2.members[k].clone()).collect();
            h.predicted[i] = knee_of(&group).map(|k| k.x.clone());
        }
        record_truth(&mut h, f2, &cfg).unwrap();
        assert!(h.psi.iter().all(|&v| v == 0.1));
        assert_eq!(h.pos_prev2.as_ref(), Some(&f1));
    }

    #[test]
    fn empty_subspaces_keep_their_previous_knee() {
        let cfg = ResponseConfig::default();
        let mut h = History::new(cfg.subspaces, &cfg.guidance);
        // `tag` marks which front a knee came from.
        let front = |f1s: &[f64], tag: f64| {
            let members: Vec<Individual> = f1s
                .iter()
                .map(|&a| Individual::new(vec![a, tag].into(), vec![a, 1.0 - a.sqrt()].into(), 0.0))
                .collect();
            let n = members.len();
            Population::new(members, n)
        };
        let spread: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
        record_truth(&mut h, front(&spread, 0.5), &cfg).unwrap();
        let first = h.knees_prev.clone();
        assert!(first.iter().all(Option::is_some));

        // Only the outer fifths are populated now.
        record_truth(&mut h, front(&[0.0, 0.05, 0.1, 0.15, 0.85, 0.9, 0.95, 1.0], 0.7), &cfg).unwrap();
        assert_eq!(h.knees_prev[1..4], first[1..4]);
        for i in [0, 4] {
            assert_eq!(h.knees_prev[i].as_ref().unwrap().x[1], 0.7, "subspace {i}");
        }
    }

    #[test]
    fn farthest_points_spread_out() {
        let members = (0..11)
            .map(|i| Individual::new(vec![0.0].into(), vec![i as f64 / 10.0, 1.0 - i as f64 / 10.0].into(), 0.0))
            .collect();
        let pop = Population::new(members, 11);
        let mut pick = farthest_point_subset(&pop, 3);
        pick.sort();
        assert_eq!(pick, vec![0, 5, 10]);
        assert_eq!(farthest_point_subset(&pop, 20).len(), 11);
    }
}
