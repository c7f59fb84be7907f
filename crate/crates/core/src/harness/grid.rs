//! Strategy sweeps and ablation grids, with their output files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use super::config::ExperimentConfig;
use super::output::{summary_line, write_jsonl, write_summary_csv, SUMMARY_HEADER};
use super::repeat::{median_of_options, run_repetitions, Repetitions};
use super::run::queries_to_reach;
use crate::coverage::{AKind, MembershipMode, Strategy};
use crate::data::InitKind;
use crate::error::{Error, Result};
use crate::par::*;

/// ARI level used to report how fast a run recovers the clustering.
pub const RECOVERY_ARI: f64 = 0.95;

/// Switch iteration that never triggers.
pub const NEVER: usize = usize::MAX;

#[derive(Debug, Clone, PartialEq)]
pub struct Variant {
    pub name: String,
    pub cfg: ExperimentConfig,
}

#[derive(Debug)]
pub struct VariantResult {
    pub name: String,
    pub reps: Repetitions,
}

impl VariantResult {
    /// Median over seeds of the queries needed to first reach `threshold`;
    /// `None` if the median run never got there.
    pub fn median_queries_to(&self, threshold: f64) -> Option<usize> {
        let per_seed: Vec<Option<usize>> = self
            .reps
            .runs
            .iter()
            .map(|r| r.result.as_ref().ok().and_then(|c| queries_to_reach(c, threshold)))
            .collect();
        median_of_options(&per_seed)
    }
}

/// Writes one JSON-lines log per successful seed and the summary CSV.
pub fn write_repetitions(dir: &Path, reps: &Repetitions) -> Result<()> {
    fs::create_dir_all(dir)?;
    for (seed, curve) in reps.curves() {
        write_jsonl(&dir.join(format!("seed-{seed}.jsonl")), curve)?;
    }
    write_summary_csv(&dir.join("summary.csv"), &reps.summary)
}

/// Runs every variant over the same seeds, concurrently across variants.
pub fn run_variants(variants: &[Variant], seeds: &[u64]) -> Result<Vec<VariantResult>> {
    for v in variants {
        v.cfg
            .validate()
            .map_err(|e| Error::Config(format!("variant {}: {e}", v.name)))?;
    }
    variants
        .par_iter()
        .map(|v| {
            Ok(VariantResult {
                name: v.name.clone(),
                reps: run_repetitions(&v.cfg, seeds)?,
            })
        })
        .collect::<Vec<Result<VariantResult>>>()
        .into_iter()
        .collect()
}

/// One variant per strategy, all other settings from `base`.
pub fn strategy_variants(base: &ExperimentConfig, strategies: &[Strategy]) -> Vec<Variant> {
    strategies
        .iter()
        .map(|&s| Variant {
            name: s.to_string(),
            cfg: ExperimentConfig {
                strategy: s,
                ..base.clone()
            },
        })
        .collect()
}

/// Per-seed table: `variant,seed,final_queries,final_ari,queries_to_ari_0.95`.
/// The last column is empty when the run never reached the level.
pub fn seed_table(results: &[VariantResult]) -> String {
    let mut out = String::from("variant,seed,final_queries,final_ari,queries_to_ari_0.95\n");
    for r in results {
        for run in &r.reps.runs {
            if let Ok(curve) = &run.result {
                let last = curve.last().expect("runs have a final record");
                let reach = queries_to_reach(curve, RECOVERY_ARI)
                    .map(|q| q.to_string())
                    .unwrap_or_default();
                writeln!(out, "{},{},{},{},{}", r.name, run.seed, last.queries, last.ari, reach).unwrap();
            }
        }
    }
    out
}

/// Summary rows of every variant: `variant,iter,queries,ari_mean,ari_median,ari_std`.
pub fn summary_table(results: &[VariantResult]) -> String {
    let mut out = format!("variant,{SUMMARY_HEADER}\n");
    for r in results {
        for row in &r.reps.summary {
            writeln!(out, "{},{}", r.name, summary_line(row)).unwrap();
        }
    }
    out
}

/// Writes per-variant directories plus `seeds.csv` and `summary.csv` under `dir`.
pub fn write_grid(dir: &Path, results: &[VariantResult]) -> Result<()> {
    fs::create_dir_all(dir)?;
    for r in results {
        write_repetitions(&dir.join(&r.name), &r.reps)?;
    }
    fs::write(dir.join("seeds.csv"), seed_table(results))?;
    fs::write(dir.join("summary.csv"), summary_table(results))?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ablation {
    /// Coverage with different switch points against pure entropy.
    SwitchPoint,
    /// Coverage and entropy with a noise-free fraction of pairs known upfront.
    WarmStart,
    /// Soft against hard memberships, for two switch points and both
    /// initializations.
    SoftVsHard,
}

impl Ablation {
    pub fn name(&self) -> &'static str {
        match self {
            Ablation::SwitchPoint => "switch-point",
            Ablation::WarmStart => "warm-start",
            Ablation::SoftVsHard => "soft-vs-hard",
        }
    }
}

impl FromStr for Ablation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "switch-point" => Ok(Ablation::SwitchPoint),
            "warm-start" => Ok(Ablation::WarmStart),
            "soft-vs-hard" => Ok(Ablation::SoftVsHard),
            _ => Err(Error::Config(format!("unknown ablation '{s}'"))),
        }
    }
}

fn switch_label(s: usize) -> String {
    if s == NEVER {
        "never".into()
    } else {
        s.to_string()
    }
}

/// The coverage variant an ablation studies: the configured one when it is a
/// coverage strategy, otherwise cost with hard memberships.
fn ablated_coverage(base: &ExperimentConfig) -> AKind {
    match base.strategy {
        Strategy::Coverage { a, .. } => a,
        _ => AKind::Cost,
    }
}

pub const SWITCH_POINTS: [usize; 5] = [5, 10, 20, 40, NEVER];
pub const REVEAL_FRACTIONS: [f64; 3] = [0.0, 0.001, 0.01];

pub fn ablation_variants(ablation: Ablation, base: &ExperimentConfig) -> Vec<Variant> {
    let a = ablated_coverage(base);
    let hard = Strategy::Coverage {
        a,
        membership: MembershipMode::Hard,
    };
    let soft = Strategy::Coverage {
        a,
        membership: MembershipMode::Soft,
    };
    let with = |name: String, f: &dyn Fn(&mut ExperimentConfig)| {
        let mut cfg = base.clone();
        f(&mut cfg);
        Variant { name, cfg }
    };
    let mut out = Vec::new();
    match ablation {
        Ablation::SwitchPoint => {
            for sp in SWITCH_POINTS {
                out.push(with(format!("{a}-hard-switch-{}", switch_label(sp)), &|c| {
                    c.strategy = hard;
                    c.switch_iter = sp;
                }));
            }
            out.push(with("entropy".into(), &|c| c.strategy = Strategy::Entropy));
        }
        Ablation::WarmStart => {
            for frac in REVEAL_FRACTIONS {
                for strat in [hard, Strategy::Entropy] {
                    let tag = match strat {
                        Strategy::Entropy => "entropy".to_string(),
                        _ => format!("{a}-hard"),
                    };
                    out.push(with(format!("{tag}-reveal-{frac}"), &|c| {
                        c.strategy = strat;
                        c.init.reveal_fraction = frac;
                    }));
                }
            }
        }
        Ablation::SoftVsHard => {
            for init in [InitKind::Zero, InitKind::Kmeans] {
                let init_name = match init {
                    InitKind::Zero => "zero",
                    InitKind::Kmeans => "kmeans",
                };
                for sp in [base.switch_iter, NEVER] {
                    for (m, strat) in [("hard", hard), ("soft", soft)] {
                        out.push(with(format!("{init_name}-{a}-{m}-switch-{}", switch_label(sp)), &|c| {
                            c.strategy = strat;
                            c.switch_iter = sp;
                            c.init.kind = init;
                        }));
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ablation_grids() {
        let base = ExperimentConfig::default();
        let sp = ablation_variants(Ablation::SwitchPoint, &base);
        assert_eq!(sp.len(), 6);
        assert_eq!(sp[4].name, "cost-hard-switch-never");
        assert_eq!(sp[4].cfg.switch_iter, NEVER);
        assert_eq!(sp[5].cfg.strategy, Strategy::Entropy);

        let ws = ablation_variants(Ablation::WarmStart, &base);
        assert_eq!(ws.len(), 6);
        assert!(ws
            .iter()
            .any(|v| v.name == "entropy-reveal-0.01" && v.cfg.init.reveal_fraction == 0.01));

        let svh = ablation_variants(Ablation::SoftVsHard, &base);
        assert_eq!(svh.len(), 8);
        assert!(svh
            .iter()
            .any(|v| v.name == "kmeans-cost-soft-switch-20" && v.cfg.init.kind == InitKind::Kmeans));
        let names: std::collections::HashSet<_> = svh.iter().map(|v| &v.name).collect();
        assert_eq!(names.len(), 8);

        for name in ["switch-point", "warm-start", "soft-vs-hard"] {
            assert_eq!(name.parse::<Ablation>().unwrap().name(), name);
        }
        assert!("other".parse::<Ablation>().is_err());
    }
}
