use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::info;

use ddmoea::error::{Error, Result};
use ddmoea::problems::DmopInstance;
use ddmoea::response::StrategyKind;
use ddmoea::runner::{compare, emit_all, emit_comparison, emit_front, emit_knees, run_experiment, ExperimentConfig};

#[derive(Parser)]
#[command(name = "ddmoea", version, about = "Dynamic multiobjective optimization experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one strategy and write per-environment and per-run CSV files.
    Run {
        #[command(flatten)]
        common: Common,
        /// ddm, v1, v2, v3 or random.
        #[arg(long)]
        strategy: Option<String>,
        /// Output prefix; `.rows.csv`, `.summary.csv` and `.config.ini` are appended.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run several strategies on the same seeds and tabulate rank-sum marks
    /// against the first one.
    Compare {
        #[command(flatten)]
        common: Common,
        /// Comma-separated strategies, reference first.
        #[arg(long, value_delimiter = ',', required = true)]
        strategies: Vec<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sample the true front of a problem at time t.
    Pof {
        #[arg(long)]
        problem: String,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 1000)]
        count: usize,
        /// Decision variables.
        #[arg(long, default_value_t = 10)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Dump predicted and extracted knees of the first run.
    Knees {
        #[command(flatten)]
        common: Common,
        /// ddm, v1, v2, v3 or random.
        #[arg(long)]
        strategy: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct Common {
    /// INI file with `experiment`, `moead`, `ddm` and `response` sections.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Problem id, comma-separated list, or `all`.
    #[arg(long)]
    problem: Option<String>,
    /// Change severity: time advances by 1/nt per environment.
    #[arg(long)]
    nt: Option<u32>,
    /// Generations per environment.
    #[arg(long)]
    taut: Option<u32>,
    /// Number of environments per run.
    #[arg(long)]
    changes: Option<usize>,
    /// Independent runs; per-run seeds are derived from --seed.
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Runs executed in parallel.
    #[arg(long)]
    jobs: Option<usize>,
    /// Any setting as `section.key=value`; may be repeated.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
    /// Use the most likely (zero) deflection instead of sampling it.
    #[arg(long)]
    deterministic_theta: bool,
    /// Write 0 for wall-clock columns so output is reproducible byte for byte.
    #[arg(long)]
    no_timing: bool,
}

impl Common {
    fn build(&self, strategy: Option<&str>) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_file(path)?,
            None => ExperimentConfig::default(),
        };
        let mut set = |key: &str, value: Option<String>| value.map_or(Ok(()), |v| cfg.set(key, &v));
        set("experiment.problem", self.problem.clone())?;
        set("experiment.nt", self.nt.map(|v| v.to_string()))?;
        set("experiment.taut", self.taut.map(|v| v.to_string()))?;
        set("experiment.changes", self.changes.map(|v| v.to_string()))?;
        set("experiment.runs", self.runs.map(|v| v.to_string()))?;
        set("experiment.seed", self.seed.map(|v| v.to_string()))?;
        set("experiment.jobs", self.jobs.map(|v| v.to_string()))?;
        set("experiment.strategy", strategy.map(str::to_string))?;
        for kv in &self.sets {
            let (k, v) =
                kv.split_once('=').ok_or_else(|| Error::Config(format!("--set expects KEY=VALUE, got `{kv}`")))?;
            cfg.set(k, v)?;
        }
        if self.deterministic_theta {
            cfg.response.deterministic_theta = true;
        }
        if self.no_timing {
            cfg.timing = false;
        }
        cfg.finalize()?;
        Ok(cfg)
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { common, strategy, out } => {
            let cfg = common.build(strategy.as_deref())?;
            let records = run_experiment(&cfg)?;
            for &id in &cfg.problems {
                let migd: Vec<f64> = records.iter().filter(|r| r.problem == id).map(|r| r.migd).collect();
                let s = ddmoea::metrics::summarize(&migd)?;
                println!("{id} ({},{}) {}: MIGD {:.6} ± {:.3e}", cfg.n_t, cfg.tau_t, cfg.strategy, s.mean, s.std);
            }
            for path in emit_all(&records, &cfg, &out)? {
                info!("wrote {}", path.display());
            }
        }
        Command::Compare { common, strategies, out } => {
            let cfg = common.build(None)?;
            let kinds: Vec<StrategyKind> = strategies.iter().map(|s| s.parse()).collect::<Result<_>>()?;
            let rows = compare(&kinds, &cfg)?;
            for row in &rows {
                let cells: Vec<String> =
                    row.columns.iter().map(|c| format!("{} {:.4e}{}", c.strategy, c.migd_mean, c.migd_mark)).collect();
                println!("{} ({},{}): {}", row.problem, row.n_t, row.tau_t, cells.join("  "));
            }
            emit_comparison(&rows, &out)?;
        }
        Command::Pof { problem, t, count, n, out } => {
            let p = DmopInstance::from_name(&problem, n)?;
            emit_front(&p.sample_true_pof(t, count)?, &out)?;
        }
        Command::Knees { common, strategy, out } => {
            let mut cfg = common.build(strategy.as_deref())?;
            cfg.runs = 1;
            if cfg.problems.len() != 1 {
                return Err(Error::Config("knees needs exactly one problem".into()));
            }
            let records = run_experiment(&cfg)?;
            emit_knees(&records[0], &out)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config() { 2 } else { 1 })
        }
    }
}
