//! The (μ+λ) EA/GA framework: uniform parent choice, optional fair-coin
//! crossover, elitist selection.

use rand::{Rng, SeedableRng};

use super::acceptance_rule;
use super::mutation::{sample_distinct, standard_bit_flips, uniform_crossover};
use super::spec::{Mutation, PopulationPlan};
use super::trajectory::{Instrumentation, Recorder, Termination, Trajectory};
use crate::bits::BitVector;
use crate::error::Result;
use crate::fitness::{Fitness, FitnessValue};
use crate::seed::SimRng;

pub(crate) struct Individual<S> {
    pub x: BitVector,
    pub state: S,
    pub value: FitnessValue,
}

impl<S: Clone> Clone for Individual<S> {
    fn clone(&self) -> Self {
        Individual {
            x: self.x.clone(),
            state: self.state.clone(),
            value: self.value.clone(),
        }
    }

    fn clone_from(&mut self, source: &Self) {
        self.x.clone_from(&source.x);
        self.state.clone_from(&source.state);
        self.value.clone_from(&source.value);
    }
}

impl<S> Individual<S> {
    pub fn new<F: Fitness<State = S>>(f: &F, x: BitVector) -> Self {
        let state = f.init_state(&x);
        let value = f.value(&x, &state);
        Individual { x, state, value }
    }

    /// Toggles `flips` and updates state and value incrementally.
    pub fn apply<F: Fitness<State = S>>(&mut self, f: &F, flips: &[usize]) {
        f.update(&mut self.state, &self.x, flips);
        self.x.toggle_all(flips);
        self.value = f.value(&self.x, &self.state);
    }
}

/// Index of a maximum, ties broken uniformly at random.
pub(crate) fn argmax_random<'a, R: Rng + ?Sized>(
    values: impl Iterator<Item = &'a FitnessValue>,
    rng: &mut R,
) -> usize {
    let mut best: Option<&FitnessValue> = None;
    let mut best_idx = 0;
    let mut ties = 0u32;
    for (i, v) in values.enumerate() {
        match best.map(|b| v.cmp(b)) {
            None | Some(std::cmp::Ordering::Greater) => {
                best = Some(v);
                best_idx = i;
                ties = 1;
            }
            Some(std::cmp::Ordering::Equal) => {
                ties += 1;
                if rng.random_range(0..ties) == 0 {
                    best_idx = i;
                }
            }
            Some(std::cmp::Ordering::Less) => {}
        }
    }
    best_idx
}

/// Index of a minimum, ties broken uniformly at random.
fn argmin_random<S, R: Rng + ?Sized>(pool: &[Individual<S>], rng: &mut R) -> usize {
    let min = pool.iter().map(|i| &i.value).min().expect("non-empty pool");
    let candidates: Vec<usize> = (0..pool.len()).filter(|&i| pool[i].value == *min).collect();
    candidates[rng.random_range(0..candidates.len())]
}

pub(crate) fn run<F: Fitness>(
    plan: &PopulationPlan,
    f: &F,
    budget: u64,
    seed: u64,
    sample_every: u64,
) -> Result<Trajectory> {
    let n = f.dimension();
    let (mu, lambda) = (plan.mu, plan.lambda);
    let mut rng = SimRng::seed_from_u64(seed);
    let mut recorder = Recorder::new(sample_every);
    let mut instrumentation = Instrumentation::default();
    let mut evaluations = 0u64;
    let mut runtime = None;

    let mut population: Vec<Individual<F::State>> = Vec::with_capacity(mu + lambda);
    for _ in 0..mu {
        let ind = Individual::new(f, BitVector::random(n, &mut rng));
        evaluations += 1;
        if runtime.is_none() && f.is_optimal(&ind.x, &ind.state) {
            runtime = Some(evaluations);
        }
        population.push(ind);
    }
    let best = best_index(&population);
    let b = &population[best];
    recorder.observe(f, evaluations, &b.x, &b.state, &b.value);

    let mut offspring: Vec<Individual<F::State>> = vec![population[0].clone(); lambda];
    let mut transitions = vec![(0usize, 0usize); lambda];
    let mut flips = Vec::new();
    let mut generations = 0u64;

    while runtime.is_none() && evaluations + lambda as u64 <= budget {
        for j in 0..lambda {
            let crossover = plan.crossover && rng.random_bool(0.5);
            let parent = rng.random_range(0..mu);
            if crossover {
                let other = rng.random_range(0..mu);
                let y = uniform_crossover(&population[parent].x, &population[other].x, &mut rng);
                transitions[j] = y.transition_counts(&population[parent].x);
                offspring[j] = Individual::new(f, y);
            } else {
                match &plan.mutation {
                    Mutation::SingleBit => {
                        flips.clear();
                        flips.push(rng.random_range(0..n));
                    }
                    Mutation::Standard { rate } => {
                        standard_bit_flips(n, *rate, &mut rng, &mut flips)
                    }
                    Mutation::Fast(d) => {
                        let s = d.sample(&mut rng);
                        sample_distinct(n, s, &mut rng, &mut flips);
                    }
                }
                let px = &population[parent].x;
                let s01 = flips.iter().filter(|&&p| !px.get(p)).count();
                transitions[j] = (s01, flips.len() - s01);
                offspring[j].clone_from(&population[parent]);
                offspring[j].apply(f, &flips);
            }
            evaluations += 1;
            if runtime.is_none() && f.is_optimal(&offspring[j].x, &offspring[j].state) {
                runtime = Some(evaluations);
            }
        }
        generations += 1;

        let winner = argmax_random(offspring.iter().map(|o| &o.value), &mut rng);
        let (s01, s10) = transitions[winner];
        instrumentation.record(s01, s10);

        if mu == 1 {
            if acceptance_rule(&population[0].value, &offspring[winner].value) {
                std::mem::swap(&mut population[0], &mut offspring[winner]);
            }
        } else {
            population.extend(offspring.iter().cloned());
            for _ in 0..lambda {
                let i = argmin_random(&population, &mut rng);
                population.swap_remove(i);
            }
        }

        let best = best_index(&population);
        let b = &population[best];
        recorder.observe(f, evaluations, &b.x, &b.state, &b.value);
    }

    let best = best_index(&population);
    let b = &population[best];
    recorder.finish(f, evaluations, &b.x, &b.state, &b.value);
    Ok(Trajectory {
        samples: recorder.samples,
        terminated: if runtime.is_some() {
            Termination::FoundOptimum
        } else {
            Termination::BudgetExhausted
        },
        total_evaluations: evaluations,
        runtime,
        generations,
        instrumentation,
    })
}

fn best_index<S>(population: &[Individual<S>]) -> usize {
    let mut best = 0;
    for (i, ind) in population.iter().enumerate() {
        if ind.value > population[best].value {
            best = i;
        }
    }
    best
}
