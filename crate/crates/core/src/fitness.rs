//! Fitness values, the oracle trait used by all algorithms, and the simple
//! monotone benchmarks.

use std::fmt;

use rand::Rng;

use crate::bits::BitVector;
use crate::error::{Error, Result};
use crate::seed::substream;

/// A totally ordered fitness value.
///
/// Integer-valued functions (OneMax, linear, HotTopic) use [`FitnessValue::Int`].
/// BinVal is represented by its induced order only: [`FitnessValue::Lex`] holds
/// the bit string as words whose natural order is the lexicographic order of
/// the string read from bit 0 (most significant) onwards. Values of different
/// variants are never compared by the algorithms.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FitnessValue {
    Int(u128),
    Lex(Vec<u64>),
}

impl serde::Serialize for FitnessValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            FitnessValue::Int(v) => match u64::try_from(*v) {
                Ok(v) => s.serialize_u64(v),
                Err(_) => s.collect_str(self),
            },
            FitnessValue::Lex(_) => s.collect_str(self),
        }
    }
}

impl FitnessValue {
    pub fn as_int(&self) -> Option<u128> {
        match self {
            FitnessValue::Int(v) => Some(*v),
            FitnessValue::Lex(_) => None,
        }
    }
}

impl fmt::Display for FitnessValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FitnessValue::Int(v) => write!(f, "{v}"),
            FitnessValue::Lex(words) => {
                f.write_str("0x")?;
                for w in words {
                    write!(f, "{w:016x}")?;
                }
                Ok(())
            }
        }
    }
}

/// A fitness oracle over `{0,1}^n`, to be maximised.
///
/// Implementations keep a per-point `State` so that offspring which differ
/// from their parent in a few positions can be evaluated incrementally:
/// clone the parent's state, call [`Fitness::update`] with the parent and the
/// flipped positions, then flip the bits.
pub trait Fitness: Sync {
    type State: Clone + Send + fmt::Debug;

    fn dimension(&self) -> usize;

    fn init_state(&self, x: &BitVector) -> Self::State;

    /// Updates `state` (which describes `before`) so that it describes
    /// `before` with the distinct positions `flipped` toggled.
    fn update(&self, state: &mut Self::State, before: &BitVector, flipped: &[usize]);

    /// Fitness of `x`, given the state describing it.
    fn value(&self, x: &BitVector, state: &Self::State) -> FitnessValue;

    fn evaluate(&self, x: &BitVector) -> FitnessValue {
        let state = self.init_state(x);
        self.value(x, &state)
    }

    /// Whether `x` is the unique global optimum.
    fn is_optimal(&self, x: &BitVector, _state: &Self::State) -> bool {
        x.ones_count() == x.len()
    }

    /// HotTopic level of `x`; 0 for functions without levels.
    fn level(&self, _state: &Self::State) -> usize {
        0
    }

    /// Number of levels (0 for functions without levels).
    fn max_level(&self) -> usize {
        0
    }
}

pub fn eval_onemax(x: &BitVector) -> FitnessValue {
    FitnessValue::Int(x.ones_count() as u128)
}

/// BinVal ordering: lexicographic, bit 0 most significant.
pub fn eval_binval(x: &BitVector) -> FitnessValue {
    FitnessValue::Lex(x.words().iter().map(|w| w.reverse_bits()).collect())
}

pub fn eval_linear(x: &BitVector, weights: &[u64]) -> Result<FitnessValue> {
    if weights.len() != x.len() {
        return Err(Error::config(format!(
            "weight vector has length {}, expected {}",
            weights.len(),
            x.len()
        )));
    }
    if let Some(i) = weights.iter().position(|&w| w == 0) {
        return Err(Error::config(format!(
            "weight {i} is not strictly positive"
        )));
    }
    let sum: u128 = weights
        .iter()
        .enumerate()
        .filter(|&(i, _)| x.get(i))
        .map(|(_, &w)| w as u128)
        .sum();
    Ok(FitnessValue::Int(sum))
}

/// Number of one-bits.
#[derive(Clone, Copy, Debug)]
pub struct OneMax {
    pub n: usize,
}

impl Fitness for OneMax {
    type State = ();

    fn dimension(&self) -> usize {
        self.n
    }

    fn init_state(&self, _x: &BitVector) {}

    fn update(&self, _state: &mut (), _before: &BitVector, _flipped: &[usize]) {}

    fn value(&self, x: &BitVector, _state: &()) -> FitnessValue {
        eval_onemax(x)
    }
}

/// Number of zero-bits; OneMax with the roles of 0 and 1 exchanged.
#[derive(Clone, Copy, Debug)]
pub struct ZeroMax {
    pub n: usize,
}

impl Fitness for ZeroMax {
    type State = ();

    fn dimension(&self) -> usize {
        self.n
    }

    fn init_state(&self, _x: &BitVector) {}

    fn update(&self, _state: &mut (), _before: &BitVector, _flipped: &[usize]) {}

    fn value(&self, x: &BitVector, _state: &()) -> FitnessValue {
        FitnessValue::Int(x.zeros_count() as u128)
    }

    fn is_optimal(&self, x: &BitVector, _state: &()) -> bool {
        x.ones_count() == 0
    }
}

#[derive(Clone, Copy, Debug)]
pub struct BinVal {
    pub n: usize,
}

impl Fitness for BinVal {
    type State = ();

    fn dimension(&self) -> usize {
        self.n
    }

    fn init_state(&self, _x: &BitVector) {}

    fn update(&self, _state: &mut (), _before: &BitVector, _flipped: &[usize]) {}

    fn value(&self, x: &BitVector, _state: &()) -> FitnessValue {
        eval_binval(x)
    }
}

/// `Σ w_i x_i` with strictly positive integer weights.
#[derive(Clone, Debug)]
pub struct Linear {
    weights: Vec<u64>,
}

impl Linear {
    pub fn new(weights: Vec<u64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::config("linear function needs at least one weight"));
        }
        if let Some(i) = weights.iter().position(|&w| w == 0) {
            return Err(Error::config(format!(
                "weight {i} is not strictly positive"
            )));
        }
        Ok(Linear { weights })
    }

    /// Weights drawn uniformly from `{1, ..., n²}`.
    pub fn random(n: usize, seed: u64) -> Result<Self> {
        let mut rng = substream(seed, 0);
        let top = (n as u64).saturating_mul(n as u64).max(1);
        Linear::new((0..n).map(|_| rng.random_range(1..=top)).collect())
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }
}

impl Fitness for Linear {
    type State = u128;

    fn dimension(&self) -> usize {
        self.weights.len()
    }

    fn init_state(&self, x: &BitVector) -> u128 {
        self.weights
            .iter()
            .enumerate()
            .filter(|&(i, _)| x.get(i))
            .map(|(_, &w)| w as u128)
            .sum()
    }

    fn update(&self, state: &mut u128, before: &BitVector, flipped: &[usize]) {
        for &i in flipped {
            let w = self.weights[i] as u128;
            if before.get(i) {
                *state -= w;
            } else {
                *state += w;
            }
        }
    }

    fn value(&self, _x: &BitVector, state: &u128) -> FitnessValue {
        FitnessValue::Int(*state)
    }
}
