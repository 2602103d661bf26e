//! Flip-count distributions for standard and heavy-tailed mutation.
//!
//! A mutation operator first draws the number `s` of bits to flip from a
//! [`FlipCountDistribution`] and then flips `s` distinct uniformly chosen
//! positions. Besides sampling, a distribution exposes its point
//! probabilities and its falling moments `m1 = E[s]`, `m2 = E[s(s-1)]`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Serialize, Serializer};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Default support cap of a Zipf distribution when neither the spec string
/// nor the caller provides one.
pub const DEFAULT_ZIPF_CAP: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq)]
pub enum DistKind {
    /// Number of successes among `n` Bernoulli(`c/n`) trials.
    Binomial {
        n: usize,
        c: f64,
    },
    /// Poisson(`c`), optionally conditioned on `s <= cap` (the law of
    /// resampling until `s <= cap`).
    Poisson {
        c: f64,
        cap: Option<usize>,
    },
    /// `Pr[s = k] = k^-κ / Z` for `1 <= k <= cap`.
    Zipf {
        kappa: f64,
        cap: usize,
    },
    PointMass(usize),
    /// Explicit probabilities `p_0, ..., p_max`.
    Table(Vec<f64>),
}

#[derive(Clone, Debug)]
enum Sampler {
    Point(usize),
    /// Inversion over a cached CDF; an uncapped Poisson walks its tail when
    /// the uniform draw lands beyond the cached mass.
    Inversion {
        cdf: Vec<f64>,
    },
    Alias {
        table: AliasTable,
        offset: usize,
    },
}

/// Immutable flip-count distribution with a precomputed sampler.
#[derive(Clone, Debug)]
pub struct FlipCountDistribution {
    kind: DistKind,
    sampler: Sampler,
    /// Zipf normalisation constant.
    zipf_norm: f64,
    /// Probability mass of `Poisson(c)` on `0..=cap`.
    poisson_mass: f64,
    /// Point probabilities of a binomial (empty otherwise).
    binomial_pmf: Vec<f64>,
}

impl FlipCountDistribution {
    pub fn binomial(n: usize, c: f64) -> Result<Self> {
        if n == 0 || !(c > 0.0 && c <= n as f64) {
            return Err(Error::config(format!(
                "binomial needs n >= 1 and 0 < c <= n, got n = {n}, c = {c}"
            )));
        }
        let kind = DistKind::Binomial { n, c };
        let pmf = binomial_pmf_table(n, c / n as f64);
        let mut d = Self::with_inversion(kind, &pmf, 1.0);
        d.binomial_pmf = pmf;
        Ok(d)
    }

    pub fn poisson(c: f64, cap: Option<usize>) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::config(format!("poisson needs c > 0, got {c}")));
        }
        let mut pmf = Vec::new();
        let mut p = (-c).exp();
        let mut k = 0usize;
        let mut acc = 0.0;
        // Cache until the remaining mass is negligible (or the cap is reached).
        loop {
            let pk = if p > 0.0 { p } else { poisson_pmf_raw(c, k) };
            pmf.push(pk);
            acc += pk;
            if cap.is_some_and(|m| k >= m) {
                break;
            }
            // Beyond the mode the tail is at most pk·(k+1)/(k+1-c).
            let next = (k + 1) as f64;
            if next > 2.0 * c && pk * next / (next - c) < 1e-18 {
                break;
            }
            k += 1;
            p = pk * c / k as f64;
        }
        let mass = match cap {
            Some(_) => acc.min(1.0),
            None => 1.0,
        };
        Ok(Self::with_inversion(
            DistKind::Poisson { c, cap },
            &pmf,
            mass,
        ))
    }

    pub fn zipf(kappa: f64, cap: usize) -> Result<Self> {
        if !(kappa > 0.0 && kappa.is_finite()) || cap == 0 {
            return Err(Error::config(format!(
                "zipf needs kappa > 0 and a cap >= 1, got kappa = {kappa}, cap = {cap}"
            )));
        }
        let weights: Vec<f64> = (1..=cap).map(|k| (k as f64).powf(-kappa)).collect();
        let norm = kahan_sum(weights.iter().rev().copied());
        Ok(FlipCountDistribution {
            kind: DistKind::Zipf { kappa, cap },
            sampler: Sampler::Alias {
                table: AliasTable::new(&weights),
                offset: 1,
            },
            zipf_norm: norm,
            poisson_mass: 1.0,
            binomial_pmf: Vec::new(),
        })
    }

    pub fn point_mass(k: usize) -> Self {
        FlipCountDistribution {
            kind: DistKind::PointMass(k),
            sampler: Sampler::Point(k),
            zipf_norm: 1.0,
            poisson_mass: 1.0,
            binomial_pmf: Vec::new(),
        }
    }

    pub fn table(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() || probs.iter().any(|&p| !(p >= 0.0 && p.is_finite())) {
            return Err(Error::config("table probabilities must be finite and >= 0"));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::config(format!(
                "table probabilities sum to {total}, expected 1"
            )));
        }
        Ok(FlipCountDistribution {
            sampler: Sampler::Alias {
                table: AliasTable::new(&probs),
                offset: 0,
            },
            kind: DistKind::Table(probs),
            zipf_norm: 1.0,
            poisson_mass: 1.0,
            binomial_pmf: Vec::new(),
        })
    }

    fn with_inversion(kind: DistKind, pmf: &[f64], mass: f64) -> Self {
        let mut cdf = Vec::with_capacity(pmf.len());
        let mut acc = 0.0;
        for &p in pmf {
            acc += p / mass;
            cdf.push(acc);
        }
        FlipCountDistribution {
            kind,
            sampler: Sampler::Inversion { cdf },
            zipf_norm: 1.0,
            poisson_mass: mass,
            binomial_pmf: Vec::new(),
        }
    }

    /// Parses `binomial:c=1.5`, `poisson:c=2`, `zipf:kappa=1.5`, `point:k=3`,
    /// `table:0:0.2,1:0.3,3:0.5`.
    ///
    /// `dimension` supplies `n` for the binomial, the resampling cap for the
    /// Poisson and the support cap for Zipf, unless the string overrides it
    /// (`binomial:c=1,n=100`, `zipf:kappa=2,m=1000`).
    pub fn parse(spec: &str, dimension: Option<usize>) -> Result<Self> {
        let spec = spec.trim();
        let (name, rest) = spec
            .split_once(':')
            .ok_or_else(|| Error::config(format!("malformed distribution spec {spec:?}")))?;
        if name == "table" {
            let mut probs: Vec<f64> = Vec::new();
            for item in rest.split(',') {
                let (k, p) = item
                    .split_once(':')
                    .ok_or_else(|| Error::config(format!("malformed table entry {item:?}")))?;
                let k: usize = parse_num(k)?;
                let p: f64 = parse_num(p)?;
                if probs.len() <= k {
                    probs.resize(k + 1, 0.0);
                }
                if probs[k] != 0.0 {
                    return Err(Error::config(format!("table lists k = {k} twice")));
                }
                probs[k] = p;
            }
            return Self::table(probs);
        }

        let mut keys: Vec<(&str, &str)> = Vec::new();
        for item in rest.split(',') {
            let kv = item
                .split_once('=')
                .ok_or_else(|| Error::config(format!("malformed parameter {item:?}")))?;
            keys.push((kv.0.trim(), kv.1.trim()));
        }
        let get = |key: &str| keys.iter().find(|(k, _)| *k == key).map(|(_, v)| *v);
        let allowed: &[&str] = match name {
            "binomial" => &["c", "n"],
            "poisson" => &["c", "cap"],
            "zipf" => &["kappa", "m"],
            "point" => &["k"],
            other => return Err(Error::config(format!("unknown distribution {other:?}"))),
        };
        if let Some((k, _)) = keys.iter().find(|(k, _)| !allowed.contains(k)) {
            return Err(Error::config(format!("unknown parameter {k:?} for {name}")));
        }
        let required = |key: &str| {
            get(key).ok_or_else(|| Error::config(format!("{name} needs parameter {key}")))
        };
        match name {
            "binomial" => {
                let c = parse_num(required("c")?)?;
                let n = match get("n") {
                    Some(v) => parse_num(v)?,
                    None => dimension.ok_or_else(|| {
                        Error::config("binomial needs n (parameter n=... or a dimension)")
                    })?,
                };
                Self::binomial(n, c)
            }
            "poisson" => {
                let c = parse_num(required("c")?)?;
                let cap = match get("cap") {
                    Some(v) => Some(parse_num(v)?),
                    None => dimension,
                };
                Self::poisson(c, cap)
            }
            "zipf" => {
                let kappa = parse_num(required("kappa")?)?;
                let cap = match get("m") {
                    Some(v) => parse_num(v)?,
                    None => dimension.unwrap_or(DEFAULT_ZIPF_CAP),
                };
                Self::zipf(kappa, cap)
            }
            _ => Ok(Self::point_mass(parse_num(required("k")?)?)),
        }
    }

    pub fn kind(&self) -> &DistKind {
        &self.kind
    }

    /// Largest value with positive probability, if the support is finite.
    pub fn support_max(&self) -> Option<usize> {
        match &self.kind {
            DistKind::Binomial { n, .. } => Some(*n),
            DistKind::Poisson { cap, .. } => *cap,
            DistKind::Zipf { cap, .. } => Some(*cap),
            DistKind::PointMass(k) => Some(*k),
            DistKind::Table(p) => Some(p.len() - 1),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        match &self.sampler {
            Sampler::Point(k) => *k,
            Sampler::Alias { table, offset } => table.sample(rng) + offset,
            Sampler::Inversion { cdf } => {
                let u: f64 = rng.random();
                if let Some(k) = cdf.iter().position(|&c| u < c) {
                    return k;
                }
                match self.kind {
                    // Beyond the cached mass of an uncapped Poisson: walk the tail.
                    DistKind::Poisson { c, cap: None } => {
                        poisson_tail_walk(c, cdf.len(), u, *cdf.last().unwrap())
                    }
                    // Rounding left `u` above the last CDF entry.
                    _ => cdf.len() - 1,
                }
            }
        }
    }

    /// `Pr[s = k]`.
    pub fn pmf(&self, k: usize) -> f64 {
        match &self.kind {
            DistKind::Binomial { .. } => self.binomial_pmf.get(k).copied().unwrap_or(0.0),
            DistKind::Poisson { c, cap } => {
                if cap.is_some_and(|m| k > m) {
                    0.0
                } else {
                    poisson_pmf_raw(*c, k) / self.poisson_mass
                }
            }
            DistKind::Zipf { kappa, cap } => {
                if k == 0 || k > *cap {
                    0.0
                } else {
                    (k as f64).powf(-kappa) / self.zipf_norm
                }
            }
            DistKind::PointMass(m) => (k == *m) as u8 as f64,
            DistKind::Table(p) => p.get(k).copied().unwrap_or(0.0),
        }
    }

    /// An upper bound on `sup_{j > k} Pr[s = j]`.
    pub fn tail_sup_pmf(&self, k: usize) -> f64 {
        if self.support_max().is_some_and(|m| k >= m) {
            return 0.0;
        }
        match &self.kind {
            DistKind::Binomial { n, c } => {
                let mode = ((*n as f64 + 1.0) * c / *n as f64).floor() as usize;
                if k + 1 >= mode {
                    self.pmf(k + 1)
                } else {
                    1.0
                }
            }
            DistKind::Poisson { c, .. } => {
                if (k + 1) as f64 >= c.floor() {
                    self.pmf(k + 1)
                } else {
                    1.0
                }
            }
            DistKind::Zipf { .. } => self.pmf(k + 1),
            DistKind::PointMass(m) => (*m > k) as u8 as f64,
            DistKind::Table(p) => p[k + 1..].iter().copied().fold(0.0, f64::max),
        }
    }

    /// Falling moments and point probabilities.
    pub fn moments(&self) -> MomentReport {
        let (m1, m2) = match &self.kind {
            DistKind::Binomial { n, c } => (*c, c * c * (1.0 - 1.0 / *n as f64)),
            DistKind::Poisson { c, cap: None } => (*c, c * c),
            DistKind::PointMass(k) => {
                let k = *k as f64;
                (k, k * (k - 1.0))
            }
            _ => self.summed_moments(),
        };
        let (m1_capped, m2_capped) = match &self.kind {
            DistKind::Zipf { kappa, .. } => (*kappa <= 2.0, *kappa <= 3.0),
            _ => (false, false),
        };
        let p_ge3 = (1.0 - self.pmf(0) - self.pmf(1) - self.pmf(2)).max(0.0);
        MomentReport {
            m1,
            m2,
            p0: self.pmf(0),
            p1: self.pmf(1),
            p3: self.pmf(3),
            p_ge3,
            m1_cap_dominated: m1_capped,
            m2_cap_dominated: m2_capped,
        }
    }

    fn summed_moments(&self) -> (f64, f64) {
        let mut m1 = 0.0;
        let mut m2 = 0.0;
        let end = self.support_max().unwrap_or(usize::MAX);
        let mut k = 1usize;
        while k <= end {
            let p = self.pmf(k);
            let kf = k as f64;
            m1 += p * kf;
            m2 += p * kf * (kf - 1.0);
            if self.support_max().is_none() && kf > 10.0 && p * kf * kf < 1e-18 {
                break;
            }
            k += 1;
        }
        (m1, m2)
    }

    /// Truncated second falling moment `Σ_{i <= σ} p_i · i(i-1)`.
    pub fn m2_truncated(&self, sigma: usize) -> f64 {
        let end = self.support_max().map_or(sigma, |m| m.min(sigma));
        (2..=end)
            .map(|i| self.pmf(i) * i as f64 * (i as f64 - 1.0))
            .sum()
    }

    /// `s0(δ) = min{σ : m2_{<=σ} >= (1 + δ/2)·m1}`, defined when `m2/m1 >= 1 + δ`.
    pub fn s0(&self, delta: f64) -> Option<usize> {
        let MomentReport { m1, m2, .. } = self.moments();
        if m1 <= 0.0 || m2 / m1 < 1.0 + delta {
            return None;
        }
        let target = (1.0 + delta / 2.0) * m1;
        let mut acc = 0.0;
        let mut i = 2usize;
        loop {
            if self.support_max().is_some_and(|m| i > m) {
                return None;
            }
            acc += self.pmf(i) * i as f64 * (i as f64 - 1.0);
            if acc >= target {
                return Some(i);
            }
            i += 1;
        }
    }
}

impl fmt::Display for FlipCountDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            DistKind::Binomial { n, c } => write!(f, "binomial:c={c},n={n}"),
            DistKind::Poisson { c, cap: Some(m) } => write!(f, "poisson:c={c},cap={m}"),
            DistKind::Poisson { c, cap: None } => write!(f, "poisson:c={c}"),
            DistKind::Zipf { kappa, cap } => write!(f, "zipf:kappa={kappa},m={cap}"),
            DistKind::PointMass(k) => write!(f, "point:k={k}"),
            DistKind::Table(p) => {
                f.write_str("table:")?;
                let entries: Vec<String> = p
                    .iter()
                    .enumerate()
                    .filter(|(_, &q)| q > 0.0)
                    .map(|(k, q)| format!("{k}:{q}"))
                    .collect();
                f.write_str(&entries.join(","))
            }
        }
    }
}

impl Serialize for FlipCountDistribution {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Falling moments of a flip-count distribution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MomentReport {
    pub m1: f64,
    pub m2: f64,
    pub p0: f64,
    pub p1: f64,
    pub p3: f64,
    /// `Pr[s >= 3]`.
    pub p_ge3: f64,
    /// `m1` would diverge without the finite support cap.
    pub m1_cap_dominated: bool,
    /// `m2` would diverge without the finite support cap.
    pub m2_cap_dominated: bool,
}

impl MomentReport {
    pub fn ratio(&self) -> f64 {
        self.m2 / self.m1
    }
}

fn parse_num<T: FromStr>(s: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::config(format!("invalid number {s:?}")))
}

fn kahan_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let y = v - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum
}

fn poisson_pmf_raw(c: f64, k: usize) -> f64 {
    (k as f64 * c.ln() - c - ln_gamma(k as f64 + 1.0)).exp()
}

fn poisson_tail_walk(c: f64, start: usize, u: f64, mut acc: f64) -> usize {
    let mut k = start;
    loop {
        let p = poisson_pmf_raw(c, k);
        acc += p;
        if u < acc || p == 0.0 {
            return k;
        }
        k += 1;
    }
}

/// Point probabilities of Bin(n, p), recurring outwards from the mode and
/// normalised, truncated where the upper tail underflows.
fn binomial_pmf_table(n: usize, p: f64) -> Vec<f64> {
    if p >= 1.0 {
        let mut out = vec![0.0; n + 1];
        out[n] = 1.0;
        return out;
    }
    let mode = (((n as f64 + 1.0) * p).floor() as usize).min(n);
    let (nf, mf) = (n as f64, mode as f64);
    let ln_mode = ln_gamma(nf + 1.0) - ln_gamma(mf + 1.0) - ln_gamma(nf - mf + 1.0)
        + mf * p.ln()
        + (nf - mf) * (-p).ln_1p();
    let odds = p / (1.0 - p);
    let mut out = vec![0.0; mode + 1];
    out[mode] = ln_mode.exp();
    for k in (0..mode).rev() {
        // p_k = p_{k+1} · (k+1) / ((n-k) · odds)
        out[k] = out[k + 1] * (k + 1) as f64 / ((n - k) as f64 * odds);
    }
    let mut k = mode;
    while k < n {
        let next = out[k] * (n - k) as f64 / (k + 1) as f64 * odds;
        if next < 1e-300 {
            break;
        }
        out.push(next);
        k += 1;
    }
    let total = kahan_sum(out.iter().copied());
    out.iter_mut().for_each(|q| *q /= total);
    out
}

/// Vose's alias method over a finite weight vector.
#[derive(Clone, Debug)]
pub struct AliasTable {
    prob: Vec<f64>,
    alias: Vec<usize>,
}

impl AliasTable {
    pub fn new(weights: &[f64]) -> Self {
        let size = weights.len();
        assert!(size > 0, "alias table needs at least one weight");
        let total = kahan_sum(weights.iter().copied());
        let mut prob: Vec<f64> = weights.iter().map(|w| w / total * size as f64).collect();
        let mut alias: Vec<usize> = (0..size).collect();
        let mut small = Vec::new();
        let mut large = Vec::new();
        for (i, &p) in prob.iter().enumerate() {
            if p < 1.0 {
                small.push(i);
            } else {
                large.push(i);
            }
        }
        while let (Some(s), Some(l)) = (small.pop(), large.pop()) {
            alias[s] = l;
            prob[l] -= 1.0 - prob[s];
            if prob[l] < 1.0 {
                small.push(l);
            } else {
                large.push(l);
            }
        }
        // Leftovers are 1 up to rounding.
        for i in small.into_iter().chain(large) {
            prob[i] = 1.0;
        }
        AliasTable { prob, alias }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let i = rng.random_range(0..self.prob.len());
        if rng.random::<f64>() < self.prob[i] {
            i
        } else {
            self.alias[i]
        }
    }
}
