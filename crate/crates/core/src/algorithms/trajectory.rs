use serde::{Deserialize, Serialize};

use crate::bits::BitVector;
use crate::error::{Error, Result};
use crate::fitness::{Fitness, FitnessValue};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Sample {
    pub evaluations: u64,
    pub fitness: FitnessValue,
    pub ones_fraction: f64,
    pub level: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    FoundOptimum,
    BudgetExhausted,
}

/// Running sums over winner offspring (the offspring that competes with the
/// parent) that turned at least one zero-bit of the parent into a one-bit.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Instrumentation {
    /// Number of winner offspring with `s01 > 0`.
    pub events: u64,
    /// `Σ s10` over those offspring.
    pub sum_s10: u64,
    /// `Σ s10²` over those offspring.
    pub sum_s10_sq: u64,
    /// `Σ s01` over those offspring.
    pub sum_s01: u64,
}

impl Instrumentation {
    pub(crate) fn record(&mut self, s01: usize, s10: usize) {
        if s01 > 0 {
            self.events += 1;
            self.sum_s10 += s10 as u64;
            self.sum_s10_sq += (s10 * s10) as u64;
            self.sum_s01 += s01 as u64;
        }
    }

    pub fn merge(&mut self, other: &Instrumentation) {
        self.events += other.events;
        self.sum_s10 += other.sum_s10;
        self.sum_s10_sq += other.sum_s10_sq;
        self.sum_s01 += other.sum_s01;
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub terminated: Termination,
    /// Evaluations used, always a whole number of generations.
    pub total_evaluations: u64,
    /// Index of the evaluation that first hit the optimum.
    pub runtime: Option<u64>,
    pub generations: u64,
    pub instrumentation: Instrumentation,
}

impl Trajectory {
    pub fn last(&self) -> &Sample {
        self.samples
            .last()
            .expect("trajectory has at least one sample")
    }

    /// The last sample taken at or before `evaluations`.
    pub fn at(&self, evaluations: u64) -> Option<&Sample> {
        self.samples
            .iter()
            .take_while(|s| s.evaluations <= evaluations)
            .last()
    }

    pub fn max_level(&self) -> usize {
        self.samples.iter().map(|s| s.level).max().unwrap_or(0)
    }
}

/// Estimate of `E[s10 | s01 > 0]` for the winner offspring.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BiasEstimate {
    pub mean: f64,
    pub standard_error: f64,
    pub events: u64,
}

pub fn selection_bias_estimate(trajectory: &Trajectory) -> Result<BiasEstimate> {
    estimate_from(&trajectory.instrumentation)
}

pub fn estimate_from(ins: &Instrumentation) -> Result<BiasEstimate> {
    if ins.events == 0 {
        return Err(Error::UndefinedEstimate);
    }
    let k = ins.events as f64;
    let mean = ins.sum_s10 as f64 / k;
    let var = if ins.events > 1 {
        ((ins.sum_s10_sq as f64 - k * mean * mean) / (k - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(BiasEstimate {
        mean,
        standard_error: (var / k).sqrt(),
        events: ins.events,
    })
}

/// Collects samples on a fixed evaluation grid.
pub(crate) struct Recorder {
    every: u64,
    next_mark: u64,
    pub samples: Vec<Sample>,
}

impl Recorder {
    pub fn new(every: u64) -> Self {
        Recorder {
            every,
            next_mark: 0,
            samples: Vec::new(),
        }
    }

    pub fn observe<F: Fitness>(
        &mut self,
        f: &F,
        evaluations: u64,
        x: &BitVector,
        state: &F::State,
        value: &FitnessValue,
    ) {
        if evaluations >= self.next_mark {
            self.push(f, evaluations, x, state, value);
            self.next_mark = (evaluations / self.every + 1) * self.every;
        }
    }

    pub fn finish<F: Fitness>(
        &mut self,
        f: &F,
        evaluations: u64,
        x: &BitVector,
        state: &F::State,
        value: &FitnessValue,
    ) {
        if self
            .samples
            .last()
            .is_some_and(|s| s.evaluations == evaluations)
        {
            self.samples.pop();
        }
        self.push(f, evaluations, x, state, value);
    }

    fn push<F: Fitness>(
        &mut self,
        f: &F,
        evaluations: u64,
        x: &BitVector,
        state: &F::State,
        value: &FitnessValue,
    ) {
        self.samples.push(Sample {
            evaluations,
            fitness: value.clone(),
            ones_fraction: x.ones_fraction(),
            level: f.level(state),
        });
    }
}
