//! Seeded HotTopic instances.
//!
//! An instance consists of `L` levels, each with a "hot topic" set `A_i` of
//! size `⌊αn⌋` and a trigger set `B_i ⊆ A_i` of size `⌊βn⌋`. The level of a
//! point is the largest `i` whose trigger set contains at most `εβn`
//! zero-bits (0 if there is none), and
//!
//! ```text
//! HT(x) = ℓ(x)·n² + n·|x ∩ A_{ℓ+1}| + |x \ A_{ℓ+1}|,   A_{L+1} = ∅.
//! ```
//!
//! Level `i` is generated from its own substream `mix(master_seed, i)`, so
//! levels can be materialised lazily and in any order.

use std::collections::HashMap;
use std::sync::OnceLock;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bits::BitVector;
use crate::error::{Error, Result};
use crate::fitness::{Fitness, FitnessValue};
use crate::seed::substream;

/// Guards `⌊x·n⌋` against products like `0.29 * 100 = 28.999999999999996`.
const FLOOR_SLACK: f64 = 1e-9;

fn floor_product(x: f64, n: f64) -> usize {
    (x * n + FLOOR_SLACK).floor() as usize
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HotTopicParams {
    pub n: usize,
    pub alpha: f64,
    pub beta: f64,
    pub eps_level: f64,
    pub num_levels: usize,
    #[serde(default)]
    pub master_seed: u64,
}

impl HotTopicParams {
    /// Parameters of the published n = 10 000 experiment.
    pub fn footnote(master_seed: u64) -> Self {
        HotTopicParams {
            n: 10_000,
            alpha: 0.25,
            beta: 0.05,
            eps_level: 0.05,
            num_levels: 100,
            master_seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let in_unit = |v: f64| v > 0.0 && v < 1.0;
        if self.n < 2 {
            return Err(Error::config("HotTopic needs n >= 2"));
        }
        if !in_unit(self.alpha) || !in_unit(self.beta) || self.beta > self.alpha {
            return Err(Error::config(format!(
                "HotTopic needs 0 < beta <= alpha < 1, got alpha = {}, beta = {}",
                self.alpha, self.beta
            )));
        }
        if !in_unit(self.eps_level) {
            return Err(Error::config(format!(
                "HotTopic needs 0 < eps_level < 1, got {}",
                self.eps_level
            )));
        }
        if self.num_levels == 0 {
            return Err(Error::config("HotTopic needs at least one level"));
        }
        if self.b_size() == 0 {
            return Err(Error::config(format!(
                "floor(beta * n) = 0 for beta = {}, n = {}",
                self.beta, self.n
            )));
        }
        if self.n > u32::MAX as usize {
            return Err(Error::config("n does not fit the position index type"));
        }
        Ok(())
    }

    pub fn a_size(&self) -> usize {
        floor_product(self.alpha, self.n as f64)
    }

    pub fn b_size(&self) -> usize {
        floor_product(self.beta, self.n as f64)
    }

    /// Largest zero-count `k` with `k <= εβn`.
    ///
    /// For small `n` this can be 0, i.e. a level then requires its whole
    /// trigger set to be one.
    pub fn zero_threshold(&self) -> usize {
        floor_product(self.eps_level * self.beta, self.n as f64)
    }
}

/// The explicit sets of one level, with word masks for fast counting.
#[derive(Clone, Debug)]
pub struct LevelSets {
    pub a: Vec<u32>,
    pub b: Vec<u32>,
    a_mask: Vec<u64>,
    b_mask: Vec<u64>,
}

impl LevelSets {
    fn from_sets(n: usize, mut a: Vec<u32>, mut b: Vec<u32>) -> Self {
        a.sort_unstable();
        b.sort_unstable();
        let to_usize = |v: &[u32]| v.iter().map(|&p| p as usize).collect::<Vec<_>>();
        let a_mask = BitVector::mask_from_positions(n, &to_usize(&a));
        let b_mask = BitVector::mask_from_positions(n, &to_usize(&b));
        LevelSets {
            a,
            b,
            a_mask,
            b_mask,
        }
    }

    pub fn a_mask(&self) -> &[u64] {
        &self.a_mask
    }

    pub fn b_mask(&self) -> &[u64] {
        &self.b_mask
    }

    #[inline]
    pub fn a_contains(&self, pos: usize) -> bool {
        (self.a_mask[pos / 64] >> (pos % 64)) & 1 == 1
    }

    #[inline]
    pub fn b_contains(&self, pos: usize) -> bool {
        (self.b_mask[pos / 64] >> (pos % 64)) & 1 == 1
    }
}

/// Position → levels (0-based level index) whose trigger set contains it.
#[derive(Debug)]
struct ReverseIndex {
    offsets: Vec<u32>,
    levels: Vec<u32>,
}

impl ReverseIndex {
    #[inline]
    fn get(&self, pos: usize) -> &[u32] {
        &self.levels[self.offsets[pos] as usize..self.offsets[pos + 1] as usize]
    }
}

#[derive(Debug)]
pub struct HotTopicInstance {
    params: HotTopicParams,
    threshold: usize,
    levels: Vec<OnceLock<LevelSets>>,
    reverse_b: OnceLock<ReverseIndex>,
}

/// Per-point evaluation cache: zero-counts in every trigger set, the level,
/// the number of ones inside the current hot topic set and the ones-count.
#[derive(Debug, PartialEq, Eq)]
pub struct LevelState {
    /// `zero_counts[i - 1] = |{j ∈ B_i : x_j = 0}|`.
    pub zero_counts: Vec<u32>,
    pub level: usize,
    pub hot_ones: usize,
    pub ones: usize,
}

impl Clone for LevelState {
    fn clone(&self) -> Self {
        LevelState {
            zero_counts: self.zero_counts.clone(),
            level: self.level,
            hot_ones: self.hot_ones,
            ones: self.ones,
        }
    }

    fn clone_from(&mut self, source: &Self) {
        self.zero_counts.clone_from(&source.zero_counts);
        self.level = source.level;
        self.hot_ones = source.hot_ones;
        self.ones = source.ones;
    }
}

impl HotTopicInstance {
    /// Creates an instance whose levels are generated on first use.
    pub fn new(params: HotTopicParams) -> Result<Self> {
        params.validate()?;
        let levels = (0..params.num_levels).map(|_| OnceLock::new()).collect();
        Ok(HotTopicInstance {
            threshold: params.zero_threshold(),
            params,
            levels,
            reverse_b: OnceLock::new(),
        })
    }

    /// Rebuilds an instance from explicit sets (e.g. a JSON dump). The
    /// `master_seed` in `dump.params` is kept only as a label.
    pub fn from_dump(dump: &InstanceDump) -> Result<Self> {
        let params = dump.params.clone();
        params.validate()?;
        if dump.levels.len() != params.num_levels {
            return Err(Error::config(format!(
                "dump has {} levels, params say {}",
                dump.levels.len(),
                params.num_levels
            )));
        }
        let (a_size, b_size) = (params.a_size(), params.b_size());
        let levels: Vec<OnceLock<LevelSets>> = dump
            .levels
            .iter()
            .enumerate()
            .map(|(k, lvl)| {
                let ok_range = lvl.a.iter().chain(&lvl.b).all(|&p| (p as usize) < params.n);
                let a: std::collections::HashSet<u32> = lvl.a.iter().copied().collect();
                if lvl.index != k + 1
                    || !ok_range
                    || a.len() != a_size
                    || lvl.a.len() != a_size
                    || lvl.b.len() != b_size
                    || !lvl.b.iter().all(|p| a.contains(p))
                    || lvl.b.iter().collect::<std::collections::HashSet<_>>().len() != b_size
                {
                    return Err(Error::config(format!("invalid sets for level {}", k + 1)));
                }
                let cell = OnceLock::new();
                let _ = cell.set(LevelSets::from_sets(params.n, lvl.a.clone(), lvl.b.clone()));
                Ok(cell)
            })
            .collect::<Result<_>>()?;
        Ok(HotTopicInstance {
            threshold: params.zero_threshold(),
            params,
            levels,
            reverse_b: OnceLock::new(),
        })
    }

    pub fn params(&self) -> &HotTopicParams {
        &self.params
    }

    pub fn n(&self) -> usize {
        self.params.n
    }

    pub fn num_levels(&self) -> usize {
        self.params.num_levels
    }

    /// Largest admissible zero-count in a trigger set.
    pub fn zero_threshold(&self) -> usize {
        self.threshold
    }

    /// Sets of level `i`, `1 <= i <= L`.
    pub fn level_sets(&self, i: usize) -> &LevelSets {
        assert!(
            (1..=self.params.num_levels).contains(&i),
            "level {i} outside 1..={}",
            self.params.num_levels
        );
        self.levels[i - 1].get_or_init(|| self.generate_level(i))
    }

    fn generate_level(&self, i: usize) -> LevelSets {
        let n = self.params.n;
        let mut rng = substream(self.params.master_seed, i as u64);
        let a = partial_shuffle(n, self.params.a_size(), &mut rng);
        let picks = partial_shuffle(a.len(), self.params.b_size(), &mut rng);
        let b = picks.iter().map(|&k| a[k as usize]).collect();
        LevelSets::from_sets(n, a, b)
    }

    fn reverse_b(&self) -> &ReverseIndex {
        self.reverse_b.get_or_init(|| {
            let n = self.params.n;
            let mut counts = vec![0u32; n + 1];
            for i in 1..=self.num_levels() {
                for &p in &self.level_sets(i).b {
                    counts[p as usize + 1] += 1;
                }
            }
            for p in 0..n {
                counts[p + 1] += counts[p];
            }
            let mut cursor = counts.clone();
            let mut levels = vec![0u32; counts[n] as usize];
            for i in 1..=self.num_levels() {
                for &p in &self.level_sets(i).b {
                    let slot = &mut cursor[p as usize];
                    levels[*slot as usize] = (i - 1) as u32;
                    *slot += 1;
                }
            }
            let index = ReverseIndex {
                offsets: counts,
                levels,
            };
            debug_assert!(self.reverse_index_consistent(&index));
            index
        })
    }

    fn reverse_index_consistent(&self, index: &ReverseIndex) -> bool {
        (0..self.n()).all(|p| {
            let listed = index.get(p);
            let expected: Vec<u32> = (1..=self.num_levels())
                .filter(|&i| self.level_sets(i).b_contains(p))
                .map(|i| (i - 1) as u32)
                .collect();
            listed == expected.as_slice()
        })
    }

    /// Levels (1-based) whose trigger set contains `pos`.
    pub fn levels_with_trigger(&self, pos: usize) -> Vec<usize> {
        self.reverse_b()
            .get(pos)
            .iter()
            .map(|&k| k as usize + 1)
            .collect()
    }

    /// Levels (1-based) whose hot topic set contains `pos`.
    pub fn levels_with_hot_topic(&self, pos: usize) -> Vec<usize> {
        (1..=self.num_levels())
            .filter(|&i| self.level_sets(i).a_contains(pos))
            .collect()
    }

    pub fn materialize_all(&self) {
        self.reverse_b();
    }

    /// Zero-count of `x` in `B_i`.
    pub fn trigger_zeros(&self, x: &BitVector, i: usize) -> usize {
        let sets = self.level_sets(i);
        sets.b.len() - x.ones_in_mask(sets.b_mask())
    }

    /// `ℓ(x)`: the largest level whose trigger set has at most `εβn` zeros.
    pub fn level(&self, x: &BitVector) -> usize {
        (1..=self.num_levels())
            .rev()
            .find(|&i| self.trigger_zeros(x, i) <= self.threshold)
            .unwrap_or(0)
    }

    fn hot_mask(&self, level: usize) -> Option<&[u64]> {
        (level < self.num_levels()).then(|| self.level_sets(level + 1).a_mask())
    }

    fn compose(&self, level: usize, hot_ones: usize, ones: usize) -> FitnessValue {
        let n = self.n() as u128;
        FitnessValue::Int(level as u128 * n * n + n * hot_ones as u128 + (ones - hot_ones) as u128)
    }

    /// Exact HotTopic value from scratch.
    pub fn eval(&self, x: &BitVector) -> FitnessValue {
        let level = self.level(x);
        let hot_ones = self.hot_mask(level).map_or(0, |m| x.ones_in_mask(m));
        self.compose(level, hot_ones, x.ones_count())
    }

    pub fn level_state(&self, x: &BitVector) -> LevelState {
        let zero_counts: Vec<u32> = (1..=self.num_levels())
            .map(|i| self.trigger_zeros(x, i) as u32)
            .collect();
        let level = zero_counts
            .iter()
            .rposition(|&z| z as usize <= self.threshold)
            .map_or(0, |k| k + 1);
        let hot_ones = self.hot_mask(level).map_or(0, |m| x.ones_in_mask(m));
        LevelState {
            zero_counts,
            level,
            hot_ones,
            ones: x.ones_count(),
        }
    }

    pub fn state_value(&self, state: &LevelState) -> FitnessValue {
        self.compose(state.level, state.hot_ones, state.ones)
    }

    /// Whether `state` matches a full recount on `x`.
    pub fn check_state(&self, x: &BitVector, state: &LevelState) -> bool {
        *state == self.level_state(x)
    }

    /// Value of `x` with `flipped` toggled, computed from the state of `x`.
    /// Returns the new value and the state describing the flipped point.
    pub fn eval_ht_incremental(
        &self,
        x: &BitVector,
        state: &LevelState,
        flipped: &[usize],
    ) -> Result<(FitnessValue, LevelState)> {
        if state.zero_counts.len() != self.num_levels() || state.ones != x.ones_count() {
            return Err(Error::Internal(
                "level state does not belong to this point".into(),
            ));
        }
        if cfg!(debug_assertions) && !self.check_state(x, state) {
            return Err(Error::Internal(
                "level state is inconsistent with its point".into(),
            ));
        }
        if let Some(&p) = flipped.iter().find(|&&p| p >= self.n()) {
            return Err(Error::OutOfRange {
                index: p,
                len: self.n(),
            });
        }
        let mut next = state.clone();
        self.apply_flips(&mut next, x, flipped);
        Ok((self.state_value(&next), next))
    }

    /// In-place state update for toggling `flipped` in `before`.
    pub fn apply_flips(&self, state: &mut LevelState, before: &BitVector, flipped: &[usize]) {
        if flipped.is_empty() {
            return;
        }
        let rev = self.reverse_b();
        let thr = self.threshold as u32;
        let mut crossed = false;
        for &p in flipped {
            let was_one = before.get(p);
            for &k in rev.get(p) {
                let z = &mut state.zero_counts[k as usize];
                let old = *z;
                if was_one {
                    *z += 1;
                } else {
                    *z -= 1;
                }
                crossed |= (old <= thr) != (*z <= thr);
            }
            if was_one {
                state.ones -= 1;
            } else {
                state.ones += 1;
            }
        }

        let old_level = state.level;
        if crossed {
            state.level = state
                .zero_counts
                .iter()
                .rposition(|&z| z <= thr)
                .map_or(0, |k| k + 1);
        }

        if state.level == old_level {
            if old_level < self.num_levels() {
                let hot = self.level_sets(old_level + 1);
                for &p in flipped {
                    if hot.a_contains(p) {
                        if before.get(p) {
                            state.hot_ones -= 1;
                        } else {
                            state.hot_ones += 1;
                        }
                    }
                }
            }
        } else if state.level < self.num_levels() {
            let hot = self.level_sets(state.level + 1);
            let mut h = before.ones_in_mask(hot.a_mask());
            for &p in flipped {
                if hot.a_contains(p) {
                    if before.get(p) {
                        h -= 1;
                    } else {
                        h += 1;
                    }
                }
            }
            state.hot_ones = h;
        } else {
            state.hot_ones = 0;
        }
    }

    /// Explicit sets of every level, for cross-implementation testing.
    pub fn dump(&self) -> InstanceDump {
        InstanceDump {
            params: self.params.clone(),
            levels: (1..=self.num_levels())
                .map(|i| {
                    let s = self.level_sets(i);
                    LevelDump {
                        index: i,
                        a: s.a.clone(),
                        b: s.b.clone(),
                    }
                })
                .collect(),
        }
    }

    pub fn dump_json(&self) -> String {
        serde_json::to_string(&self.dump()).expect("instance dump serializes")
    }
}

impl Fitness for HotTopicInstance {
    type State = LevelState;

    fn dimension(&self) -> usize {
        self.n()
    }

    fn init_state(&self, x: &BitVector) -> LevelState {
        self.level_state(x)
    }

    fn update(&self, state: &mut LevelState, before: &BitVector, flipped: &[usize]) {
        self.apply_flips(state, before, flipped);
    }

    fn value(&self, _x: &BitVector, state: &LevelState) -> FitnessValue {
        self.state_value(state)
    }

    fn evaluate(&self, x: &BitVector) -> FitnessValue {
        self.eval(x)
    }

    fn is_optimal(&self, _x: &BitVector, state: &LevelState) -> bool {
        state.ones == self.n()
    }

    fn level(&self, state: &LevelState) -> usize {
        state.level
    }

    fn max_level(&self) -> usize {
        self.num_levels()
    }
}

/// JSON form of an instance: parameters plus the explicit 0-based sets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceDump {
    pub params: HotTopicParams,
    pub levels: Vec<LevelDump>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelDump {
    pub index: usize,
    pub a: Vec<u32>,
    pub b: Vec<u32>,
}

/// First `k` entries of a uniformly random permutation of `0..n`
/// (partial Fisher-Yates on a sparse swap table, O(k) time and memory).
fn partial_shuffle<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Vec<u32> {
    debug_assert!(k <= n);
    let mut swapped: HashMap<usize, usize> = HashMap::with_capacity(2 * k);
    let mut out = Vec::with_capacity(k);
    for i in 0..k {
        let j = rng.random_range(i..n);
        let vi = *swapped.get(&i).unwrap_or(&i);
        let vj = *swapped.get(&j).unwrap_or(&j);
        swapped.insert(j, vi);
        out.push(vj as u32);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::substream;
    use rand::Rng;

    fn params(n: usize, levels: usize, seed: u64) -> HotTopicParams {
        HotTopicParams {
            n,
            alpha: 0.25,
            beta: 0.05,
            eps_level: 0.05,
            num_levels: levels,
            master_seed: seed,
        }
    }

    /// Straightforward evaluation from the dumped sets, no masks or caches.
    fn slow_eval(dump: &InstanceDump, x: &BitVector) -> u128 {
        let p = &dump.params;
        let thr = p.eps_level * p.beta * p.n as f64;
        let mut level = 0;
        for lvl in &dump.levels {
            let zeros = lvl.b.iter().filter(|&&j| !x.get(j as usize)).count();
            if zeros as f64 <= thr + 1e-9 {
                level = lvl.index;
            }
        }
        let n = p.n as u128;
        let hot: Vec<u32> = if level < p.num_levels {
            dump.levels[level].a.clone()
        } else {
            Vec::new()
        };
        let mut v = level as u128 * n * n;
        for i in 0..p.n {
            if x.get(i) {
                v += if hot.contains(&(i as u32)) { n } else { 1 };
            }
        }
        v
    }

    #[test]
    fn set_sizes_and_containment() {
        let inst = HotTopicInstance::new(params(100, 10, 17)).unwrap();
        for i in 1..=10 {
            let s = inst.level_sets(i);
            assert_eq!(s.a.len(), 25);
            assert_eq!(s.b.len(), 5);
            assert!(s.b.iter().all(|p| s.a.binary_search(p).is_ok()));
            let mut a = s.a.clone();
            a.dedup();
            assert_eq!(a.len(), 25);
        }
    }

    #[test]
    fn deterministic_and_order_independent() {
        let p = params(100, 8, 99);
        let one = HotTopicInstance::new(p.clone()).unwrap();
        let two = HotTopicInstance::new(p).unwrap();
        for i in (1..=8).rev() {
            let _ = two.level_sets(i);
        }
        assert_eq!(one.dump(), two.dump());
    }

    #[test]
    fn different_seeds_give_different_sets() {
        let mut differ = 0;
        for s in 0..100u64 {
            let a = HotTopicInstance::new(params(100, 1, 2 * s)).unwrap();
            let b = HotTopicInstance::new(params(100, 1, 2 * s + 1)).unwrap();
            if a.level_sets(1).a != b.level_sets(1).a {
                differ += 1;
            }
        }
        assert!(differ >= 99);
    }

    #[test]
    fn config_errors() {
        let mut p = params(10, 1, 0);
        assert!(matches!(
            HotTopicInstance::new(p.clone()),
            Err(Error::Config(_))
        ));
        p.n = 100;
        p.beta = 0.3;
        assert!(HotTopicInstance::new(p.clone()).is_err());
        p.beta = 0.05;
        p.num_levels = 0;
        assert!(HotTopicInstance::new(p).is_err());
    }

    #[test]
    fn extreme_points() {
        let inst = HotTopicInstance::new(params(200, 12, 5)).unwrap();
        let n = 200u128;
        assert_eq!(inst.level(&BitVector::ones(200)), 12);
        assert_eq!(
            inst.eval(&BitVector::ones(200)),
            FitnessValue::Int(12 * n * n + n)
        );
        assert!(inst.zero_threshold() < inst.params().b_size());
        assert_eq!(inst.level(&BitVector::zeros(200)), 0);
        assert_eq!(inst.eval(&BitVector::zeros(200)), FitnessValue::Int(0));
    }

    #[test]
    fn footnote_scale_level_matches_scan() {
        let inst = HotTopicInstance::new(HotTopicParams::footnote(3)).unwrap();
        assert_eq!(inst.zero_threshold(), 25);
        let dump = inst.dump();
        let b7 = &inst.level_sets(7).b;
        let mut x = BitVector::ones(10_000);
        for &p in b7.iter().take(26) {
            x.toggle(p as usize);
        }
        let oracle = dump
            .levels
            .iter()
            .filter(|l| l.b.iter().filter(|&&j| !x.get(j as usize)).count() <= 25)
            .map(|l| l.index)
            .max()
            .unwrap_or(0);
        assert_eq!(inst.level(&x), oracle);
        assert!(inst.trigger_zeros(&x, 7) == 26);

        // Knock out every level from 100 downwards except those below 40.
        let mut y = BitVector::ones(10_000);
        for i in 40..=100 {
            for &p in inst.level_sets(i).b.iter().take(26) {
                y.set(p as usize, false);
            }
        }
        let expected = (1..=100)
            .rev()
            .find(|&i| inst.trigger_zeros(&y, i) <= 25)
            .unwrap_or(0);
        assert!(expected < 40);
        assert_eq!(inst.level(&y), expected);
        assert_eq!(inst.eval(&y).as_int().unwrap(), slow_eval(&dump, &y));
    }

    #[test]
    fn eval_matches_slow_reimplementation() {
        let mut rng = substream(1, 1);
        for trial in 0..40u64 {
            let p = HotTopicParams {
                n: 64,
                alpha: 0.25,
                beta: 0.125,
                eps_level: 0.3,
                num_levels: 6,
                master_seed: trial,
            };
            let inst = HotTopicInstance::new(p).unwrap();
            let dump = inst.dump();
            for _ in 0..50 {
                // Bias towards many ones so that levels above 0 occur.
                let mut x = BitVector::ones(64);
                let zeros = rng.random_range(0..20);
                for _ in 0..zeros {
                    x.set(rng.random_range(0..64), false);
                }
                assert_eq!(inst.eval(&x).as_int().unwrap(), slow_eval(&dump, &x));
            }
        }
    }

    #[test]
    fn incremental_examples() {
        let inst = HotTopicInstance::new(params(400, 5, 8)).unwrap();
        let mut rng = substream(4, 4);
        let x = BitVector::random(400, &mut rng);
        let st = inst.level_state(&x);
        let (v, st2) = inst.eval_ht_incremental(&x, &st, &[]).unwrap();
        assert_eq!(v, inst.eval(&x));
        assert_eq!(st2, st);

        // 0 -> 1 outside every hot topic set at a level below L.
        let outside: Vec<usize> = (0..400)
            .filter(|&p| !x.get(p) && inst.levels_with_hot_topic(p).is_empty())
            .collect();
        assert!(st.level < 5);
        let p = outside[0];
        let (v2, _) = inst.eval_ht_incremental(&x, &st, &[p]).unwrap();
        assert_eq!(v2.as_int().unwrap(), v.as_int().unwrap() + 1);
    }

    #[test]
    fn incremental_rejects_foreign_state() {
        let inst = HotTopicInstance::new(params(100, 3, 1)).unwrap();
        let x = BitVector::ones(100);
        let st = inst.level_state(&BitVector::zeros(100));
        assert!(matches!(
            inst.eval_ht_incremental(&x, &st, &[0]),
            Err(Error::Internal(_))
        ));
    }

    #[test]
    fn reverse_indexes_agree_with_sets() {
        let inst = HotTopicInstance::new(params(300, 20, 2)).unwrap();
        for pos in 0..300 {
            for i in inst.levels_with_trigger(pos) {
                assert!(inst.level_sets(i).b_contains(pos));
            }
            let trig = inst.levels_with_trigger(pos).len();
            let count = (1..=20)
                .filter(|&i| inst.level_sets(i).b_contains(pos))
                .count();
            assert_eq!(trig, count);
            for i in inst.levels_with_hot_topic(pos) {
                assert!(inst.level_sets(i).a.contains(&(pos as u32)));
            }
        }
    }

    #[test]
    fn dump_round_trips() {
        let inst = HotTopicInstance::new(params(120, 4, 77)).unwrap();
        let json = inst.dump_json();
        let dump: InstanceDump = serde_json::from_str(&json).unwrap();
        let again = HotTopicInstance::from_dump(&dump).unwrap();
        let mut rng = substream(0, 0);
        for _ in 0..100 {
            let x = BitVector::random(120, &mut rng);
            assert_eq!(inst.eval(&x), again.eval(&x));
        }
        let mut bad = dump.clone();
        bad.levels[0].b[0] = (0..120).find(|p| !bad.levels[0].a.contains(p)).unwrap();
        assert!(HotTopicInstance::from_dump(&bad).is_err());
    }
}
