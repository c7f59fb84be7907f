use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use active_cc::coverage::Strategy;
use active_cc::harness::grid::{self, RECOVERY_ARI};
use active_cc::harness::{
    ablation_variants, run_repetitions, run_variants, seed_range, strategy_variants, Ablation, ExperimentConfig,
    VariantResult,
};
use active_cc::Error;

/// Benchmark harness for cold-start active correlation clustering.
#[derive(Debug, Parser)]
#[command(name = "active-cc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one experiment (one strategy, `repetitions` seeds).
    Run {
        #[command(flatten)]
        common: Common,
    },
    /// Compare strategies over the same seeds.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Comma-separated strategy ids, e.g. coverage-cost-hard,entropy,unient.
        #[arg(long, value_delimiter = ',', required = true)]
        strategies: Vec<String>,
        /// Number of seeds per strategy, starting at the config seed.
        #[arg(long)]
        seeds: Option<usize>,
    },
    /// Reproduce an ablation grid: switch-point, warm-start or soft-vs-hard.
    Ablate {
        /// switch-point, warm-start or soft-vs-hard.
        ablation: String,
        #[command(flatten)]
        common: Common,
        /// Number of seeds per variant, starting at the config seed.
        #[arg(long)]
        seeds: Option<usize>,
        /// Whether pairs revealed in the warm-start ablation count as queried.
        #[arg(long)]
        warmstart_mark_queried: Option<bool>,
    },
}

#[derive(Debug, Args)]
struct Common {
    /// TOML experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Master seed, overriding the config.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Oracle noise level.
    #[arg(long)]
    gamma: Option<f64>,
    /// Pairs queried per round.
    #[arg(long)]
    batch_size: Option<usize>,
    /// Total query budget.
    #[arg(long)]
    budget: Option<usize>,
}

impl Common {
    fn load(&self) -> Result<ExperimentConfig, Error> {
        let mut cfg = ExperimentConfig::load(&self.config)?;
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(d) = &self.output_dir {
            cfg.output_dir = d.clone();
        }
        if let Some(g) = self.gamma {
            cfg.oracle.gamma = g;
        }
        if let Some(b) = self.batch_size {
            cfg.batch_size = b;
        }
        if let Some(w) = self.budget {
            cfg.budget = Some(w);
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn report(results: &[VariantResult]) -> bool {
    println!(
        "{:<36} {:>6} {:>10} {:>16}",
        "variant", "runs", "final_ari", "queries_to_0.95"
    );
    let mut ok = true;
    for r in results {
        let finals: Vec<f64> = r
            .reps
            .curves()
            .map(|(_, c)| c.last().map_or(f64::NAN, |x| x.ari))
            .collect();
        let mean = finals.iter().sum::<f64>() / finals.len().max(1) as f64;
        let reach = r
            .median_queries_to(RECOVERY_ARI)
            .map_or_else(|| "-".to_string(), |q| q.to_string());
        println!("{:<36} {:>6} {:>10.4} {:>16}", r.name, finals.len(), mean, reach);
        for (seed, err) in r.reps.failures() {
            eprintln!("error: {} seed {seed}: {err}", r.name);
            ok = false;
        }
    }
    ok
}

fn write_grid(dir: &Path, results: &[VariantResult]) -> Result<(), Error> {
    grid::write_grid(dir, results)?;
    println!("wrote {}", dir.display());
    Ok(())
}

fn execute(cmd: Command) -> Result<bool, Error> {
    match cmd {
        Command::Run { common } => {
            let cfg = common.load()?;
            let seeds = seed_range(cfg.seed, cfg.repetitions);
            let reps = run_repetitions(&cfg, &seeds)?;
            let dir = cfg.output_dir.join(cfg.strategy.to_string());
            grid::write_repetitions(&dir, &reps)?;
            println!("wrote {}", dir.display());
            let result = VariantResult {
                name: cfg.strategy.to_string(),
                reps,
            };
            Ok(report(std::slice::from_ref(&result)))
        }
        Command::Sweep {
            common,
            strategies,
            seeds,
        } => {
            let cfg = common.load()?;
            let strategies = strategies
                .iter()
                .map(|s| s.trim().parse::<Strategy>().map_err(|e| Error::Config(e.to_string())))
                .collect::<Result<Vec<_>, _>>()?;
            let seeds = seed_range(cfg.seed, seeds.unwrap_or(cfg.repetitions).max(1));
            let results = run_variants(&strategy_variants(&cfg, &strategies), &seeds)?;
            write_grid(&cfg.output_dir, &results)?;
            Ok(report(&results))
        }
        Command::Ablate {
            ablation,
            common,
            seeds,
            warmstart_mark_queried,
        } => {
            let ablation: Ablation = ablation.parse()?;
            let mut cfg = common.load()?;
            if let Some(mark) = warmstart_mark_queried {
                cfg.init.reveal_mark_queried = mark;
            }
            let seeds = seed_range(cfg.seed, seeds.unwrap_or(cfg.repetitions).max(1));
            let results = run_variants(&ablation_variants(ablation, &cfg), &seeds)?;
            write_grid(&cfg.output_dir.join(ablation.name()), &results)?;
            Ok(report(&results))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_config_error() { 1 } else { 2 })
        }
    }
}
