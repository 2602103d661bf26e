use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{run_batch, ExperimentConfig, FunctionSpec, OutputPaths};
use crate::algorithms::AlgorithmSpec;
use crate::error::{Error, Result};
use crate::hottopic::HotTopicParams;

pub const FOOTNOTE_CHECKPOINTS: [u64; 3] = [100_000, 200_000, 500_000];

/// The published experiment: `(1+1)`-EA with mutation rate `c/n` on
/// HotTopic(n = 10 000, α = 0.25, β = 0.05, ε = 0.05, L = 100), 20 runs of
/// 500 000 evaluations. For the `(1+1)`-EA rounds and evaluations coincide.
pub fn footnote_config(c: f64, seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        name: Some(format!("footnote-c{c}")),
        function: FunctionSpec::Hottopic {
            params: HotTopicParams::footnote(seed),
        },
        algorithm: AlgorithmSpec::one_plus_lambda_ea(1, c),
        budget: 500_000,
        runs: 20,
        base_seed: seed,
        sample_every: 1000,
        checkpoints: FOOTNOTE_CHECKPOINTS.to_vec(),
        outputs: OutputPaths::default(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingConfig {
    pub template: ExperimentConfig,
    pub n_list: Vec<usize>,
    /// If set, the budget at dimension `n` is `ceil(budget_factor · n ln n)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget_factor: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScalingRow {
    pub n: usize,
    pub runs: usize,
    pub terminated: usize,
    /// Mean runtime over terminated runs.
    pub mean_runtime: Option<f64>,
    /// `mean_runtime / (n ln n)`.
    pub ratio: Option<f64>,
}

impl ScalingRow {
    /// Fewer than 90% of the runs found the optimum.
    pub fn partial(&self) -> bool {
        (self.terminated as f64) < 0.9 * self.runs as f64
    }
}

impl ScalingConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ScalingConfig = serde_json::from_str(text)
            .map_err(|e| Error::config(format!("invalid config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_list.is_empty() {
            return Err(Error::config("n_list is empty"));
        }
        if self.budget_factor.is_some_and(|f| !(f > 0.0)) {
            return Err(Error::config("budget_factor must be positive"));
        }
        for &n in &self.n_list {
            self.at(n).validate()?;
        }
        Ok(())
    }

    pub fn at(&self, n: usize) -> ExperimentConfig {
        let mut cfg = self.template.clone();
        cfg.function = cfg.function.with_dimension(n);
        if let Some(f) = self.budget_factor {
            cfg.budget = (f * n as f64 * (n as f64).ln()).ceil() as u64;
        }
        cfg.checkpoints.retain(|&c| c <= cfg.budget);
        cfg.outputs = OutputPaths::default();
        cfg
    }
}

pub fn run_scaling(cfg: &ScalingConfig, threads: Option<usize>) -> Result<Vec<ScalingRow>> {
    cfg.validate()?;
    cfg.n_list
        .iter()
        .map(|&n| {
            let batch = run_batch(&cfg.at(n), threads)?;
            let runtimes: Vec<f64> = batch
                .trajectories
                .iter()
                .filter_map(|t| t.runtime)
                .map(|r| r as f64)
                .collect();
            let mean = (!runtimes.is_empty())
                .then(|| runtimes.iter().sum::<f64>() / runtimes.len() as f64);
            Ok(ScalingRow {
                n,
                runs: batch.trajectories.len(),
                terminated: runtimes.len(),
                mean_runtime: mean,
                ratio: mean.map(|m| m / (n as f64 * (n as f64).ln())),
            })
        })
        .collect()
}

pub fn write_scaling_csv<W: Write>(mut w: W, rows: &[ScalingRow]) -> std::io::Result<()> {
    writeln!(w, "n,runs,terminated,mean_runtime,ratio")?;
    let opt = |v: Option<f64>| v.map_or(String::new(), |v| v.to_string());
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{}",
            r.n,
            r.runs,
            r.terminated,
            opt(r.mean_runtime),
            opt(r.ratio)
        )?;
    }
    w.flush()
}
