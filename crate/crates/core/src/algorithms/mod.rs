//! Elitist algorithms behind one [`run`] entry point.
//!
//! | variant | population | offspring per generation |
//! |---|---|---|
//! | RLS | 1 | 1, exactly one bit flipped |
//! | (1+λ) EA | 1 | λ, standard bit mutation with rate c/n |
//! | (μ+1) EA | μ | 1, standard bit mutation |
//! | (μ+1) GA | μ | 1, fair coin between mutation and uniform crossover |
//! | (1+λ) fast EA | 1 | λ, `s ~ D` uniform distinct flips |
//! | (μ+1) fast EA | μ | 1, `s ~ D` |
//! | (μ+1) fast GA | μ | 1, fair coin between `s ~ D` mutation and uniform crossover |
//! | (1+(λ,λ)) GA | 1 | λ mutants plus λ biased crossovers |
//!
//! Single-parent variants accept an offspring of equal fitness. Population
//! variants remove a uniformly random individual of minimum fitness.

mod mutation;
mod ollga;
mod population;
mod spec;
mod trajectory;

pub use mutation::{sample_distinct, standard_bit_flips};
pub use spec::{AlgorithmSpec, OneFifthRule, Variant};
pub use trajectory::{
    estimate_from, selection_bias_estimate, BiasEstimate, Instrumentation, Sample, Termination,
    Trajectory,
};

use crate::error::{Error, Result};
use crate::fitness::{Fitness, FitnessValue};

/// Single-parent acceptance: the offspring replaces the parent iff it is at
/// least as fit.
pub fn acceptance_rule(parent: &FitnessValue, offspring: &FitnessValue) -> bool {
    offspring >= parent
}

/// Runs `spec` on `f` until the optimum is evaluated or the next generation
/// would exceed `budget` evaluations. A sample is recorded after
/// initialisation, whenever another `sample_every` evaluations have been
/// used, and at termination.
pub fn run<F: Fitness>(
    spec: &AlgorithmSpec,
    f: &F,
    budget: u64,
    seed: u64,
    sample_every: u64,
) -> Result<Trajectory> {
    let n = f.dimension();
    if n < 2 {
        return Err(Error::config("dimension must be at least 2"));
    }
    if sample_every == 0 {
        return Err(Error::config("sample_every must be at least 1"));
    }
    let plan = spec.prepare(n)?;
    if budget < spec.mu as u64 {
        return Err(Error::config(format!(
            "budget {budget} is smaller than the population size {}",
            spec.mu
        )));
    }
    match plan {
        spec::Plan::Population(p) => population::run(&p, f, budget, seed, sample_every),
        spec::Plan::LambdaLambda(p) => ollga::run(&p, f, budget, seed, sample_every),
    }
}
