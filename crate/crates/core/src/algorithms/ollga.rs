//! The (1+(λ,λ)) GA: a mutation phase with a common flip count, then biased
//! crossovers between the parent and the best mutant.

use rand::{Rng, SeedableRng};

use super::acceptance_rule;
use super::mutation::{binomial_count, sample_distinct};
use super::population::{argmax_random, Individual};
use super::spec::LambdaLambdaPlan;
use super::trajectory::{Instrumentation, Recorder, Termination, Trajectory};
use crate::bits::BitVector;
use crate::error::Result;
use crate::fitness::Fitness;
use crate::seed::SimRng;

pub(crate) fn run<F: Fitness>(
    plan: &LambdaLambdaPlan,
    f: &F,
    budget: u64,
    seed: u64,
    sample_every: u64,
) -> Result<Trajectory> {
    let n = f.dimension();
    let mut rng = SimRng::seed_from_u64(seed);
    let mut recorder = Recorder::new(sample_every);
    let mut instrumentation = Instrumentation::default();

    let mut parent = Individual::new(f, BitVector::random(n, &mut rng));
    let mut evaluations = 1u64;
    let mut runtime = f.is_optimal(&parent.x, &parent.state).then_some(1);
    recorder.observe(f, evaluations, &parent.x, &parent.state, &parent.value);

    let (mut lambda, mut c, mut gamma) = (plan.lambda, plan.c, plan.gamma);
    let mut mutants: Vec<Individual<F::State>> = Vec::new();
    let mut mutant_flips: Vec<Vec<usize>> = Vec::new();
    let mut crosses: Vec<Individual<F::State>> = Vec::new();
    let mut cross_flips: Vec<Vec<usize>> = Vec::new();
    let mut scratch = Vec::new();
    let mut generations = 0u64;
    // A mutant can be the optimum although no crossover offspring is.
    let mut optimum: Option<Individual<F::State>> = None;

    loop {
        let count = (lambda.round() as usize).max(1);
        if runtime.is_some() || evaluations + 2 * count as u64 > budget {
            break;
        }
        mutants.resize_with(count, || parent.clone());
        crosses.resize_with(count, || parent.clone());
        mutant_flips.resize_with(count, Vec::new);
        cross_flips.resize_with(count, Vec::new);

        let s = binomial_count(n, (c / n as f64).min(1.0), &mut rng, &mut scratch);
        for j in 0..count {
            sample_distinct(n, s, &mut rng, &mut mutant_flips[j]);
            mutants[j].clone_from(&parent);
            mutants[j].apply(f, &mutant_flips[j]);
            evaluations += 1;
            if runtime.is_none() && f.is_optimal(&mutants[j].x, &mutants[j].state) {
                runtime = Some(evaluations);
                optimum = Some(mutants[j].clone());
            }
        }
        let best_mutant = argmax_random(mutants[..count].iter().map(|m| &m.value), &mut rng);

        for j in 0..count {
            let taken = &mut cross_flips[j];
            taken.clear();
            taken.extend(
                mutant_flips[best_mutant]
                    .iter()
                    .copied()
                    .filter(|_| rng.random_bool(gamma)),
            );
            crosses[j].clone_from(&parent);
            crosses[j].apply(f, &cross_flips[j]);
            evaluations += 1;
            if runtime.is_none() && f.is_optimal(&crosses[j].x, &crosses[j].state) {
                runtime = Some(evaluations);
            }
        }
        generations += 1;

        let winner = argmax_random(crosses[..count].iter().map(|z| &z.value), &mut rng);
        let s01 = cross_flips[winner]
            .iter()
            .filter(|&&p| !parent.x.get(p))
            .count();
        instrumentation.record(s01, cross_flips[winner].len() - s01);

        let improved = crosses[winner].value > parent.value;
        if acceptance_rule(&parent.value, &crosses[winner].value) {
            std::mem::swap(&mut parent, &mut crosses[winner]);
        }
        if let Some(rule) = plan.adaptive {
            lambda = if improved {
                (lambda / rule.factor).max(1.0)
            } else {
                (lambda * rule.factor.powf(0.25)).min(rule.lambda_max)
            };
            c = lambda;
            gamma = ((1.0 - rule.delta_gamma) / lambda).min(1.0);
        }
        recorder.observe(f, evaluations, &parent.x, &parent.state, &parent.value);
    }

    let last = match &optimum {
        Some(o) if o.value > parent.value => o,
        _ => &parent,
    };
    recorder.finish(f, evaluations, &last.x, &last.state, &last.value);
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
