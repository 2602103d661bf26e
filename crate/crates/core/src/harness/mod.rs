//! Seeded experiment batches: configuration, parallel execution, aggregation
//! and the flat-file outputs.
//!
//! A batch is described by one JSON document ([`ExperimentConfig`]). Run `i`
//! uses the seed `mix(base_seed, i)`, so results do not depend on the number of
//! worker threads or on the order in which runs finish.

mod output;
mod presets;
mod summary;

use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algorithms::{self, AlgorithmSpec, Trajectory};
use crate::error::{Error, Result};
use crate::fitness::{BinVal, Fitness, Linear, OneMax, ZeroMax};
use crate::hottopic::{HotTopicInstance, HotTopicParams};
use crate::seed::mix;

pub use output::{read_trajectories_csv, write_trajectories_csv, CsvRow, TRAJECTORY_HEADER};
pub use presets::{
    footnote_config, run_scaling, write_scaling_csv, ScalingConfig, ScalingRow,
    FOOTNOTE_CHECKPOINTS,
};
pub use summary::{CheckpointStats, ExperimentSummary, FinalRecord, TIE_POLICY};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    Onemax { n: usize },
    Zeromax { n: usize },
    Binval { n: usize },
    Linear { n: usize, weights_seed: u64 },
    Hottopic { params: HotTopicParams },
}

impl FunctionSpec {
    pub fn dimension(&self) -> usize {
        match self {
            FunctionSpec::Onemax { n }
            | FunctionSpec::Zeromax { n }
            | FunctionSpec::Binval { n }
            | FunctionSpec::Linear { n, .. } => *n,
            FunctionSpec::Hottopic { params } => params.n,
        }
    }

    /// The same function family at dimension `n`.
    pub fn with_dimension(&self, n: usize) -> FunctionSpec {
        let mut out = self.clone();
        match &mut out {
            FunctionSpec::Onemax { n: m }
            | FunctionSpec::Zeromax { n: m }
            | FunctionSpec::Binval { n: m }
            | FunctionSpec::Linear { n: m, .. } => *m = n,
            FunctionSpec::Hottopic { params } => params.n = n,
        }
        out
    }

    pub fn build(&self) -> Result<Function> {
        let n = self.dimension();
        if n < 2 {
            return Err(Error::config(format!(
                "dimension must be at least 2, got {n}"
            )));
        }
        Ok(match self {
            FunctionSpec::Onemax { n } => Function::OneMax(OneMax { n: *n }),
            FunctionSpec::Zeromax { n } => Function::ZeroMax(ZeroMax { n: *n }),
            FunctionSpec::Binval { n } => Function::BinVal(BinVal { n: *n }),
            FunctionSpec::Linear { n, weights_seed } => {
                Function::Linear(Linear::random(*n, *weights_seed)?)
            }
            FunctionSpec::Hottopic { params } => {
                Function::HotTopic(Box::new(HotTopicInstance::new(params.clone())?))
            }
        })
    }
}

/// A constructed fitness function.
#[derive(Debug)]
pub enum Function {
    OneMax(OneMax),
    ZeroMax(ZeroMax),
    BinVal(BinVal),
    Linear(Linear),
    HotTopic(Box<HotTopicInstance>),
}

impl Function {
    pub fn run(
        &self,
        spec: &AlgorithmSpec,
        budget: u64,
        seed: u64,
        sample_every: u64,
    ) -> Result<Trajectory> {
        match self {
            Function::OneMax(f) => algorithms::run(spec, f, budget, seed, sample_every),
            Function::ZeroMax(f) => algorithms::run(spec, f, budget, seed, sample_every),
            Function::BinVal(f) => algorithms::run(spec, f, budget, seed, sample_every),
            Function::Linear(f) => algorithms::run(spec, f, budget, seed, sample_every),
            Function::HotTopic(f) => algorithms::run(spec, f.as_ref(), budget, seed, sample_every),
        }
    }

    pub fn max_level(&self) -> usize {
        match self {
            Function::HotTopic(f) => f.max_level(),
            _ => 0,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputPaths {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trajectory_csv: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub summary_json: Option<PathBuf>,
}

fn default_sample_every() -> u64 {
    1000
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub function: FunctionSpec,
    pub algorithm: AlgorithmSpec,
    /// Fitness evaluations per run, including initialisation.
    pub budget: u64,
    pub runs: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default = "default_sample_every")]
    pub sample_every: u64,
    #[serde(default)]
    pub checkpoints: Vec<u64>,
    #[serde(default)]
    pub outputs: OutputPaths,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)
            .map_err(|e| Error::config(format!("invalid config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl Into<PathBuf>) -> Result<Self> {
        let path = path.into();
        let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::config("runs must be at least 1"));
        }
        if self.budget == 0 {
            return Err(Error::config("budget must be at least 1"));
        }
        if self.sample_every == 0 {
            return Err(Error::config("sample_every must be at least 1"));
        }
        if let Some(&c) = self.checkpoints.iter().find(|&&c| c > self.budget) {
            return Err(Error::config(format!(
                "checkpoint {c} exceeds the budget {}",
                self.budget
            )));
        }
        self.algorithm
            .prepare(self.function.dimension())
            .map(|_| ())
    }

    pub fn run_seed(&self, run: usize) -> u64 {
        mix(self.base_seed, run as u64)
    }
}

/// Trajectories of a batch, indexed by run.
#[derive(Clone, Debug, PartialEq)]
pub struct BatchResult {
    pub trajectories: Vec<Trajectory>,
    pub max_level: usize,
}

/// Runs every seed of `cfg`. `threads = Some(1)` runs serially on the calling
/// thread; `None` uses rayon's global pool.
pub fn run_batch(cfg: &ExperimentConfig, threads: Option<usize>) -> Result<BatchResult> {
    cfg.validate()?;
    let function = cfg.function.build()?;
    let one = |i: usize| {
        function.run(
            &cfg.algorithm,
            cfg.budget,
            cfg.run_seed(i),
            cfg.sample_every,
        )
    };
    let trajectories = match threads {
        Some(0) => return Err(Error::config("threads must be at least 1")),
        Some(1) => (0..cfg.runs).map(one).collect::<Result<Vec<_>>>()?,
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::Internal(e.to_string()))?
            .install(|| {
                (0..cfg.runs)
                    .into_par_iter()
                    .map(one)
                    .collect::<Result<Vec<_>>>()
            })?,
        None => (0..cfg.runs)
            .into_par_iter()
            .map(one)
            .collect::<Result<Vec<_>>>()?,
    };
    Ok(BatchResult {
        trajectories,
        max_level: function.max_level(),
    })
}

/// Runs a batch, writes the configured outputs and returns the summary.
pub fn run_experiment(cfg: &ExperimentConfig, threads: Option<usize>) -> Result<ExperimentSummary> {
    let batch = run_batch(cfg, threads)?;
    let summary = ExperimentSummary::new(cfg, &batch);
    if let Some(path) = &cfg.outputs.trajectory_csv {
        output::write_csv_file(path, &batch.trajectories)?;
    }
    if let Some(path) = &cfg.outputs.summary_json {
        output::write_json_file(path, &summary)?;
    }
    Ok(summary)
}
