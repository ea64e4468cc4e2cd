//! The dynamic optimization loop over a sequence of environments, repeated
//! over independent runs, with CSV reporting and strategy comparison.

mod config;

pub use config::{parse_problems, ExperimentConfig};

use std::fs::File;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::metrics::{hv, igd, summarize, wilcoxon_rank_sum, Direction, HvReference};
use crate::moead::Moead;
use crate::population::DecisionVector;
use crate::problems::{time_of, DfId, DmopInstance, Environment, ReferenceFront};
use crate::random::{run_seed, RandomSource};
use crate::response::{record_truth, respond, History, StrategyKind};

/// Metrics at the end of one environment.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvRow {
    pub env: usize,
    pub t: f64,
    pub igd: f64,
    pub hv: f64,
    pub resp_ms: f64,
    pub opt_ms: f64,
    /// Hypervolume reference point used for `hv`.
    pub r: Vec<f64>,
}

/// Predicted and extracted knee of one subspace in one environment.
#[derive(Debug, Clone, PartialEq)]
pub struct KneeRow {
    pub env: usize,
    pub t: f64,
    pub subspace: usize,
    pub predicted: Option<DecisionVector>,
    pub truth: Option<DecisionVector>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub problem: DfId,
    pub run: usize,
    pub seed: u64,
    pub rows: Vec<EnvRow>,
    pub migd: f64,
    pub mhv: f64,
    pub evaluations: u64,
    pub knees: Vec<KneeRow>,
}

/// True fronts and reference points of every environment, shared by all runs.
struct Targets {
    fronts: Vec<ReferenceFront>,
    refs: Vec<HvReference>,
}

fn targets(p: &DmopInstance, cfg: &ExperimentConfig) -> Result<Targets> {
    let fronts: Vec<ReferenceFront> =
        (0..cfg.changes).map(|e| p.sample_true_pof(env_time(cfg, e), cfg.reference_points)).collect::<Result<_>>()?;
    let refs = fronts.iter().map(HvReference::from_front).collect();
    Ok(Targets { fronts, refs })
}

/// Time of environment `e` (generation counter at its start).
fn env_time(cfg: &ExperimentConfig, e: usize) -> f64 {
    time_of(cfg.n_t, cfg.tau_t, e as u32 * cfg.tau_t)
}

fn run_one(p: &DmopInstance, cfg: &ExperimentConfig, tg: &Targets, run: usize) -> Result<RunRecord> {
    let seed = run_seed(cfg.seed, run);
    let mut rng = RandomSource::new(seed);
    let n_pop = cfg.population_for(p.m);
    let moead = Moead::with_size(n_pop, p.m, cfg.moead.clone(), &mut rng.fork())?;
    let mut hist = History::new(cfg.response.subspaces, &cfg.response.guidance);
    let mut rows = Vec::with_capacity(cfg.changes);
    let mut knees = Vec::new();
    let mut evaluations = 0;
    let ms = |start: Instant| if cfg.timing { start.elapsed().as_secs_f64() * 1e3 } else { 0.0 };

    for e in 0..cfg.changes {
        let t = env_time(cfg, e);
        let env = Environment::new(p, t);

        let start = Instant::now();
        let init = respond(cfg.strategy, &mut hist, &env, n_pop, &cfg.response, &mut rng)?;
        let resp_ms = ms(start);

        let generations = cfg.tau_t as usize + if e == 0 { cfg.warmup } else { 0 };
        let start = Instant::now();
        let pos = moead.optimize(&init.population, &env, generations, &mut rng)?;
        let opt_ms = ms(start);

        let expected = (n_pop * (generations + 1)) as u64;
        assert_eq!(env.evaluations(), expected, "evaluation count drifted in environment {e}");
        evaluations += env.evaluations();

        let objs = pos.objectives();
        let r = &tg.refs[e];
        rows.push(EnvRow {
            env: e,
            t,
            igd: igd(&tg.fronts[e].as_slices(), &objs)?,
            hv: hv(&objs, r)?,
            resp_ms,
            opt_ms,
            r: r.r.to_vec(),
        });

        let predicted = hist.predicted.clone();
        record_truth(&mut hist, pos, &cfg.response)?;
        for (i, pred) in predicted.into_iter().enumerate() {
            knees.push(KneeRow {
                env: e,
                t,
                subspace: i,
                predicted: pred,
                truth: hist.knees_prev[i].as_ref().map(|k| k.x.clone()),
            });
        }
    }

    let migd = summarize(&rows.iter().map(|r| r.igd).collect::<Vec<_>>())?.mean;
    let mhv = summarize(&rows.iter().map(|r| r.hv).collect::<Vec<_>>())?.mean;
    Ok(RunRecord { problem: p.id, run, seed, rows, migd, mhv, evaluations, knees })
}

/// All runs of every configured problem, problems in order and runs by index.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {} worker threads: {e}", cfg.jobs)))?;
    let mut out = Vec::with_capacity(cfg.problems.len() * cfg.runs);
    for &id in &cfg.problems {
        let p = DmopInstance::new(id, cfg.n_vars)?;
        let tg = targets(&p, cfg)?;
        let records: Vec<RunRecord> = pool
            .install(|| (0..cfg.runs).into_par_iter().map(|run| run_one(&p, cfg, &tg, run)).collect::<Result<_>>())?;
        out.extend(records);
    }
    Ok(out)
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io { path: path.to_path_buf(), source }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> Error + '_ {
    move |source| Error::Csv { path: path.to_path_buf(), source }
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_os_string();
    s.push(suffix);
    PathBuf::from(s)
}

fn writer(path: &Path) -> Result<csv::Writer<File>> {
    let file = File::create(path).map_err(io_err(path))?;
    Ok(csv::Writer::from_writer(file))
}

/// Writes `<path>.rows.csv` and `<path>.summary.csv` for one problem's runs.
pub fn emit_csv(records: &[RunRecord], path: &Path) -> Result<(PathBuf, PathBuf)> {
    let Some(first) = records.first() else {
        return Err(Error::InvalidArgument("no run records to write".into()));
    };
    let rows_path = with_suffix(path, ".rows.csv");
    let summary_path = with_suffix(path, ".summary.csv");

    let m = first.rows.first().map_or(0, |r| r.r.len());
    let mut w = writer(&rows_path)?;
    let mut header: Vec<String> =
        ["run", "env", "t", "igd", "hv", "resp_ms", "opt_ms"].iter().map(|s| s.to_string()).collect();
    header.extend((1..=m).map(|j| format!("r{j}")));
    w.write_record(&header).map_err(csv_err(&rows_path))?;
    for rec in records {
        for row in &rec.rows {
            let mut fields = vec![
                rec.run.to_string(),
                row.env.to_string(),
                row.t.to_string(),
                row.igd.to_string(),
                row.hv.to_string(),
                row.resp_ms.to_string(),
                row.opt_ms.to_string(),
            ];
            fields.extend(row.r.iter().map(|v| v.to_string()));
            w.write_record(&fields).map_err(csv_err(&rows_path))?;
        }
    }
    w.flush().map_err(io_err(&rows_path))?;

    let mut w = writer(&summary_path)?;
    w.write_record(["run", "migd", "mhv"]).map_err(csv_err(&summary_path))?;
    for rec in records {
        w.write_record([rec.run.to_string(), rec.migd.to_string(), rec.mhv.to_string()])
            .map_err(csv_err(&summary_path))?;
    }
    let migd = summarize(&records.iter().map(|r| r.migd).collect::<Vec<_>>())?;
    let mhv = summarize(&records.iter().map(|r| r.mhv).collect::<Vec<_>>())?;
    w.write_record(["mean".to_string(), migd.mean.to_string(), mhv.mean.to_string()])
        .map_err(csv_err(&summary_path))?;
    w.write_record(["std".to_string(), migd.std.to_string(), mhv.std.to_string()]).map_err(csv_err(&summary_path))?;
    w.flush().map_err(io_err(&summary_path))?;
    Ok((rows_path, summary_path))
}

/// Writes every problem's results; with several problems each gets its own
/// `<path>_<DFk>` prefix. The effective settings go to `<path>.config.ini`.
pub fn emit_all(records: &[RunRecord], cfg: &ExperimentConfig, path: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for &id in &cfg.problems {
        let subset: Vec<RunRecord> = records.iter().filter(|r| r.problem == id).cloned().collect();
        let prefix = if cfg.problems.len() == 1 { path.to_path_buf() } else { with_suffix(path, &format!("_{id}")) };
        let (a, b) = emit_csv(&subset, &prefix)?;
        written.extend([a, b]);
    }
    let ini = with_suffix(path, ".config.ini");
    std::fs::write(&ini, cfg.to_ini_string()).map_err(io_err(&ini))?;
    written.push(ini);
    Ok(written)
}

/// Knee trajectories: one line per environment, subspace and kind.
pub fn emit_knees(record: &RunRecord, path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    let n = record.knees.iter().find_map(|k| k.truth.as_ref().or(k.predicted.as_ref())).map_or(0, |x| x.len());
    let mut header: Vec<String> = ["env", "t", "subspace", "kind"].iter().map(|s| s.to_string()).collect();
    header.extend((1..=n).map(|j| format!("x{j}")));
    w.write_record(&header).map_err(csv_err(path))?;
    for k in &record.knees {
        for (kind, x) in [("predicted", &k.predicted), ("true", &k.truth)] {
            if let Some(x) = x {
                let mut fields = vec![k.env.to_string(), k.t.to_string(), k.subspace.to_string(), kind.to_string()];
                fields.extend(x.iter().map(|v| v.to_string()));
                w.write_record(&fields).map_err(csv_err(path))?;
            }
        }
    }
    w.flush().map_err(io_err(path))
}

/// Sampled true front as `f1..fm` lines.
pub fn emit_front(front: &ReferenceFront, path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    let m = front.points.first().map_or(0, |p| p.len());
    w.write_record((1..=m).map(|j| format!("f{j}"))).map_err(csv_err(path))?;
    for p in &front.points {
        w.write_record(p.iter().map(|v| v.to_string())).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// One strategy's results on one problem within a comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct StrategyColumn {
    pub strategy: StrategyKind,
    pub migd_mean: f64,
    pub migd_std: f64,
    pub mhv_mean: f64,
    pub mhv_std: f64,
    /// Rank-sum outcome of the reference strategy against this one: `+` when
    /// the reference is significantly better.
    pub migd_mark: Direction,
    pub mhv_mark: Direction,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub problem: DfId,
    pub n_t: u32,
    pub tau_t: u32,
    pub columns: Vec<StrategyColumn>,
}

/// Marks for `reference` against `other` over paired runs.
pub fn compare_records(reference: &[RunRecord], other: &[RunRecord]) -> Result<(Direction, Direction)> {
    if reference.len() != other.len() {
        return Err(Error::InvalidArgument(format!(
            "paired comparison needs equal run counts, got {} and {}",
            reference.len(),
            other.len()
        )));
    }
    let col = |rs: &[RunRecord], f: fn(&RunRecord) -> f64| rs.iter().map(f).collect::<Vec<f64>>();
    let migd = wilcoxon_rank_sum(&col(reference, |r| r.migd), &col(other, |r| r.migd))?.direction;
    // Larger hypervolume is better, so compare negated values.
    let mhv = wilcoxon_rank_sum(&col(reference, |r| -r.mhv), &col(other, |r| -r.mhv))?.direction;
    Ok((migd, mhv))
}

/// Runs every strategy with the same seeds; the first strategy is the reference.
pub fn compare(strategies: &[StrategyKind], cfg: &ExperimentConfig) -> Result<Vec<CompareRow>> {
    if strategies.len() < 2 {
        return Err(Error::Config("comparison needs at least two strategies".into()));
    }
    let results: Vec<Vec<RunRecord>> = strategies
        .iter()
        .map(|&s| run_experiment(&ExperimentConfig { strategy: s, ..cfg.clone() }))
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for &id in &cfg.problems {
        let per: Vec<Vec<RunRecord>> =
            results.iter().map(|rs| rs.iter().filter(|r| r.problem == id).cloned().collect()).collect();
        let mut columns = Vec::with_capacity(strategies.len());
        for (k, &s) in strategies.iter().enumerate() {
            let (migd_mark, mhv_mark) = compare_records(&per[0], &per[k])?;
            let migd = summarize(&per[k].iter().map(|r| r.migd).collect::<Vec<_>>())?;
            let mhv = summarize(&per[k].iter().map(|r| r.mhv).collect::<Vec<_>>())?;
            columns.push(StrategyColumn {
                strategy: s,
                migd_mean: migd.mean,
                migd_std: migd.std,
                mhv_mean: mhv.mean,
                mhv_std: mhv.std,
                migd_mark,
                mhv_mark,
            });
        }
        rows.push(CompareRow { problem: id, n_t: cfg.n_t, tau_t: cfg.tau_t, columns });
    }
    Ok(rows)
}

/// Wide comparison table: one line per problem and setting.
pub fn emit_comparison(rows: &[CompareRow], path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    let Some(first) = rows.first() else {
        return Err(Error::InvalidArgument("empty comparison".into()));
    };
    let mut header: Vec<String> = vec!["problem".into(), "nt".into(), "taut".into()];
    for c in &first.columns {
        for field in ["migd", "migd_std", "migd_mark", "mhv", "mhv_std", "mhv_mark"] {
            header.push(format!("{}_{field}", c.strategy));
        }
    }
    w.write_record(&header).map_err(csv_err(path))?;
    for row in rows {
        let mut fields = vec![row.problem.to_string(), row.n_t.to_string(), row.tau_t.to_string()];
        for c in &row.columns {
            fields.extend([
                c.migd_mean.to_string(),
                c.migd_std.to_string(),
                c.migd_mark.to_string(),
                c.mhv_mean.to_string(),
                c.mhv_std.to_string(),
                c.mhv_mark.to_string(),
            ]);
        }
        w.write_record(&fields).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}
