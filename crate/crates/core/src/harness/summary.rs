use serde::Serialize;

use super::{BatchResult, ExperimentConfig};
use crate::algorithms::{estimate_from, BiasEstimate, Instrumentation, Termination};
use crate::fitness::FitnessValue;

/// Offspring that are as good as their parent replace it.
pub const TIE_POLICY: &str = "accept-on-equal";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConfigEcho {
    #[serde(flatten)]
    pub config: ExperimentConfig,
    pub tie_policy: &'static str,
}

/// Mean and sample standard deviation over runs of the state at a checkpoint.
/// A run's state at `evaluations` is its last sample taken at or before it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckpointStats {
    pub evaluations: u64,
    pub ones_mean: f64,
    pub ones_std: f64,
    pub level_mean: f64,
    pub level_std: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FinalRecord {
    pub run: usize,
    pub seed: u64,
    pub terminated: Termination,
    pub evaluations: u64,
    pub runtime: Option<u64>,
    pub fitness: FitnessValue,
    pub ones_fraction: f64,
    pub level: usize,
    pub max_level: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentSummary {
    pub config_echo: ConfigEcho,
    pub checkpoints: Vec<CheckpointStats>,
    pub max_level_per_run: Vec<usize>,
    /// Runs whose trajectory reached the function's top level.
    pub runs_reaching_max_level: usize,
    pub fraction_reaching_max_level: f64,
    pub runs_found_optimum: usize,
    /// Mean runtime over the runs that found the optimum; null when none did.
    pub mean_runtime: Option<f64>,
    /// Pooled `E[s10 | s01 > 0]` over all runs; null without events.
    pub selection_bias: Option<BiasEstimate>,
    pub final_records: Vec<FinalRecord>,
}

/// Mean and sample standard deviation (zero for a single value).
pub(crate) fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

impl ExperimentSummary {
    pub fn new(cfg: &ExperimentConfig, batch: &BatchResult) -> Self {
        let ts = &batch.trajectories;
        let checkpoints = cfg
            .checkpoints
            .iter()
            .map(|&e| {
                let at: Vec<_> = ts
                    .iter()
                    .map(|t| t.at(e).unwrap_or(&t.samples[0]))
                    .collect();
                let ones: Vec<f64> = at.iter().map(|s| s.ones_fraction).collect();
                let levels: Vec<f64> = at.iter().map(|s| s.level as f64).collect();
                let (ones_mean, ones_std) = mean_std(&ones);
                let (level_mean, level_std) = mean_std(&levels);
                CheckpointStats {
                    evaluations: e,
                    ones_mean,
                    ones_std,
                    level_mean,
                    level_std,
                }
            })
            .collect();
        let max_level_per_run: Vec<usize> = ts.iter().map(|t| t.max_level()).collect();
        let runs_reaching_max_level = max_level_per_run
            .iter()
            .filter(|&&l| l >= batch.max_level)
            .count();
        let runtimes: Vec<f64> = ts
            .iter()
            .filter_map(|t| t.runtime)
            .map(|r| r as f64)
            .collect();
        let mut pooled = Instrumentation::default();
        for t in ts {
            pooled.merge(&t.instrumentation);
        }
        let final_records = ts
            .iter()
            .enumerate()
            .map(|(run, t)| {
                let last = t.last();
                FinalRecord {
                    run,
                    seed: cfg.run_seed(run),
                    terminated: t.terminated,
                    evaluations: t.total_evaluations,
                    runtime: t.runtime,
                    fitness: last.fitness.clone(),
                    ones_fraction: last.ones_fraction,
                    level: last.level,
                    max_level: t.max_level(),
                }
            })
            .collect();
        ExperimentSummary {
            config_echo: ConfigEcho {
                config: cfg.clone(),
                tie_policy: TIE_POLICY,
            },
            checkpoints,
            runs_reaching_max_level,
            fraction_reaching_max_level: runs_reaching_max_level as f64 / ts.len() as f64,
            max_level_per_run,
            runs_found_optimum: runtimes.len(),
            mean_runtime: (!runtimes.is_empty())
                .then(|| runtimes.iter().sum::<f64>() / runtimes.len() as f64),
            selection_bias: estimate_from(&pooled).ok(),
            final_records,
        }
    }

    pub fn checkpoint(&self, evaluations: u64) -> Option<&CheckpointStats> {
        self.checkpoints
            .iter()
            .find(|c| c.evaluations == evaluations)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes")
    }
}
