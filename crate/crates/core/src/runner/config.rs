//! Experiment settings: defaults, INI files and `section.key = value` overrides.

use std::path::Path;

use ini::Ini;

use crate::ddm::{NoiseSchedule, ScheduleKind};
use crate::error::{Error, Result};
use crate::moead::MoeadConfig;
use crate::problems::DfId;
use crate::response::{ResponseConfig, StrategyKind};

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub problems: Vec<DfId>,
    pub n_t: u32,
    pub tau_t: u32,
    pub changes: usize,
    pub runs: usize,
    pub strategy: StrategyKind,
    pub seed: u64,
    /// Population size; `None` picks 100 for two objectives and 150 for three.
    pub pop_size: Option<usize>,
    /// Decision variables.
    pub n_vars: usize,
    pub jobs: usize,
    /// Record wall-clock phase times; when off they are written as 0 so output
    /// files are byte-for-byte reproducible.
    pub timing: bool,
    /// Points sampled on each true front for IGD and the reference point.
    pub reference_points: usize,
    /// Extra optimizer generations in the very first environment.
    pub warmup: usize,
    pub moead: MoeadConfig,
    pub response: ResponseConfig,
    pub ddm_steps: usize,
    pub schedule: ScheduleKind,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            problems: vec![DfId::Df1],
            n_t: 10,
            tau_t: 10,
            changes: 30,
            runs: 20,
            strategy: StrategyKind::Ddm,
            seed: 1,
            pop_size: None,
            n_vars: 10,
            jobs: 1,
            timing: true,
            reference_points: 1000,
            warmup: 0,
            moead: MoeadConfig::default(),
            response: ResponseConfig::default(),
            ddm_steps: 100,
            schedule: ScheduleKind::Cosine,
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.trim().parse().map_err(|_| Error::Config(format!("{key}: cannot parse `{value}`")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "on" => Ok(true),
        "0" | "false" | "no" | "off" => Ok(false),
        _ => Err(Error::Config(format!("{key}: expected a boolean, got `{value}`"))),
    }
}

pub fn parse_problems(value: &str) -> Result<Vec<DfId>> {
    if value.trim().eq_ignore_ascii_case("all") {
        return Ok(DfId::ALL.to_vec());
    }
    value.split(',').map(|p| p.parse()).collect()
}

impl ExperimentConfig {
    /// Population size for a problem with `m` objectives.
    pub fn population_for(&self, m: usize) -> usize {
        self.pop_size.unwrap_or(if m == 2 { 100 } else { 150 })
    }

    /// Reads an INI file (sections `experiment`, `moead`, `ddm`, `response`)
    /// on top of the defaults.
    pub fn from_file(path: &Path) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply_file(path)?;
        Ok(cfg)
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let ini = Ini::load_from_file(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        for (section, props) in ini.iter() {
            let section = section.unwrap_or("experiment");
            for (key, value) in props.iter() {
                self.set(&format!("{section}.{key}"), value)?;
            }
        }
        Ok(())
    }

    /// Sets one `section.key`; unknown keys are configuration errors.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let lower = key.trim().to_ascii_lowercase();
        match lower.as_str() {
            "experiment.problem" | "experiment.problems" => self.problems = parse_problems(value)?,
            "experiment.nt" => self.n_t = parse(key, value)?,
            "experiment.taut" => self.tau_t = parse(key, value)?,
            "experiment.changes" => self.changes = parse(key, value)?,
            "experiment.runs" => self.runs = parse(key, value)?,
            "experiment.strategy" => self.strategy = value.parse()?,
            "experiment.seed" => self.seed = parse(key, value)?,
            "experiment.pop_size" => {
                self.pop_size = if value.trim().eq_ignore_ascii_case("auto") { None } else { Some(parse(key, value)?) }
            }
            "experiment.n" => self.n_vars = parse(key, value)?,
            "experiment.jobs" => self.jobs = parse(key, value)?,
            "experiment.timing" => self.timing = parse_bool(key, value)?,
            "experiment.reference_points" => self.reference_points = parse(key, value)?,
            "experiment.warmup" => self.warmup = parse(key, value)?,
            "moead.t" => self.moead.neighborhood = parse(key, value)?,
            "moead.nr" => self.moead.replacements = parse(key, value)?,
            "moead.delta" => self.moead.delta = parse(key, value)?,
            "moead.eta_c" => self.moead.eta_c = parse(key, value)?,
            "moead.eta_m" => self.moead.eta_m = parse(key, value)?,
            "moead.pc" => self.moead.p_c = parse(key, value)?,
            "moead.pm" => {
                self.moead.p_m = if value.trim().eq_ignore_ascii_case("auto") { None } else { Some(parse(key, value)?) }
            }
            "ddm.k" => self.ddm_steps = parse(key, value)?,
            "ddm.psi_min" => self.response.guidance.psi_min = parse(key, value)?,
            "ddm.psi_max" => self.response.guidance.psi_max = parse(key, value)?,
            "ddm.lambda" => self.response.guidance.lambda = parse(key, value)?,
            "ddm.prior" => self.response.prior = value.parse()?,
            "ddm.schedule" => self.schedule = value.parse()?,
            "ddm.samples" => self.response.sample_set = value.parse()?,
            "response.subspaces" => self.response.subspaces = parse(key, value)?,
            "response.frac_pred" => self.response.frac_pred = parse(key, value)?,
            "response.frac_last" => self.response.frac_last = parse(key, value)?,
            "response.frac_rand" => {
                let r: f64 = parse(key, value)?;
                let implied = 1.0 - self.response.frac_pred - self.response.frac_last;
                if (r - implied).abs() > 1e-9 {
                    return Err(Error::Config(format!(
                        "response.frac_rand = {r} disagrees with 1 - frac_pred - frac_last = {implied}"
                    )));
                }
            }
            "response.deterministic_theta" => self.response.deterministic_theta = parse_bool(key, value)?,
            _ => return Err(Error::Config(format!("unknown configuration key `{key}`"))),
        }
        Ok(())
    }

    /// Rebuilds derived state and checks every setting.
    pub fn finalize(&mut self) -> Result<()> {
        self.response.schedule =
            NoiseSchedule::new(self.schedule, self.ddm_steps).map_err(|e| Error::Config(format!("ddm.K: {e}")))?;
        self.validate()
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if self.problems.is_empty() {
            return fail("no problem selected".into());
        }
        if self.n_t == 0 || self.tau_t == 0 || self.changes == 0 || self.runs == 0 || self.jobs == 0 {
            return fail("nt, taut, changes, runs and jobs must all be positive".into());
        }
        if self.reference_points < 2 {
            return fail("reference_points must be at least 2".into());
        }
        if self.response.schedule.steps() != self.ddm_steps {
            return fail("ddm.K changed without finalize()".into());
        }
        if let Some(n) = self.pop_size {
            if n < 3 {
                return fail(format!("pop_size {n} is too small"));
            }
        }
        let m = &self.moead;
        if m.neighborhood < 2 || m.replacements == 0 || !(0.0..=1.0).contains(&m.delta) || !(0.0..=1.0).contains(&m.p_c)
        {
            return fail("moead: need T >= 2, nr >= 1, delta and pc in [0, 1]".into());
        }
        if m.p_m.is_some_and(|p| !(0.0..=1.0).contains(&p)) || m.eta_c < 0.0 || m.eta_m < 0.0 {
            return fail("moead: need pm in [0, 1] and non-negative distribution indices".into());
        }
        for id in &self.problems {
            if self.n_vars <= id.objectives() {
                return fail(format!("{id} needs more than {} decision variables", id.objectives()));
            }
        }
        self.response.validate()
    }

    /// Every setting as `section.key = value` lines, in INI layout.
    pub fn to_ini_string(&self) -> String {
        let problems: Vec<String> = self.problems.iter().map(|p| p.to_string()).collect();
        let opt = |v: Option<String>| v.unwrap_or_else(|| "auto".into());
        let g = &self.response.guidance;
        format!(
            "[experiment]\nproblem = {}\nnt = {}\ntaut = {}\nchanges = {}\nruns = {}\nstrategy = {}\nseed = {}\n\
             pop_size = {}\nn = {}\njobs = {}\ntiming = {}\nreference_points = {}\nwarmup = {}\n\n\
             [moead]\nT = {}\nnr = {}\ndelta = {}\neta_c = {}\neta_m = {}\npc = {}\npm = {}\n\n\
             [ddm]\nK = {}\npsi_min = {}\npsi_max = {}\nlambda = {}\nprior = {}\nschedule = {}\nsamples = {}\n\n\
             [response]\nsubspaces = {}\nfrac_pred = {}\nfrac_last = {}\ndeterministic_theta = {}\n",
            problems.join(","),
            self.n_t,
            self.tau_t,
            self.changes,
            self.runs,
            self.strategy,
            self.seed,
            opt(self.pop_size.map(|v| v.to_string())),
            self.n_vars,
            self.jobs,
            self.timing,
            self.reference_points,
            self.warmup,
            self.moead.neighborhood,
            self.moead.replacements,
            self.moead.delta,
            self.moead.eta_c,
            self.moead.eta_m,
            self.moead.p_c,
            opt(self.moead.p_m.map(|v| v.to_string())),
            self.ddm_steps,
            g.psi_min,
            g.psi_max,
            g.lambda,
            match self.response.prior {
                crate::ddm::PriorKind::Knee => "knee",
                crate::ddm::PriorKind::Kde => "kde",
            },
            match self.schedule {
                ScheduleKind::Cosine => "cosine",
                ScheduleKind::Linear => "linear",
            },
            match self.response.sample_set {
                crate::ddm::SampleSet::History => "history",
                crate::ddm::SampleSet::Current => "current",
            },
            self.response.subspaces,
            self.response.frac_pred,
            self.response.frac_last,
            self.response.deterministic_theta,
        )
    }
}
