//! The dichotomy functional Φ and the efficient/hard classification.
//!
//! For a flip-count distribution `D` and a density `α` of zero-bits,
//!
//! ```text
//! Φ(α) = E[s(s-1)q^(s-1)] / E[s q^(s-1)] - ((1-α)/α) · Pr[s=1] / E[s q^(s-1)],   q = 1 - α.
//! ```
//!
//! Values above 1 predict stagnation of the `(1+λ)` family on a HotTopic
//! instance; values below 1 for every `α` predict `O(n log n)` optimisation.

use std::fmt;
use std::io::Write;

use serde::Serialize;

use crate::distributions::{DistKind, FlipCountDistribution};
use crate::error::{Error, Result};

pub const DEFAULT_MARGIN: f64 = 1e-3;
pub const DEFAULT_DELTA: f64 = 0.05;
pub const DEFAULT_TOLERANCE: f64 = 1e-13;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PhiEvaluation {
    pub alpha: f64,
    pub value: f64,
    /// Largest `s` included in the sums.
    pub truncation_point: usize,
    /// Upper bound on the mass dropped from each of the three sums.
    pub tail_bound: f64,
}

/// Evaluates Φ by summation, truncating once the dropped tail is below `tolerance`.
pub fn phi_numeric(d: &FlipCountDistribution, alpha: f64, tolerance: f64) -> Result<PhiEvaluation> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::config(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    if !(tolerance > 0.0) {
        return Err(Error::config("tolerance must be positive"));
    }
    let q = 1.0 - alpha;
    let max = d.support_max();
    let mut num = 0.0;
    let mut den = 0.0;
    let mut qpow = 1.0; // q^(k-1)
    let mut k = 1usize;
    let tail_bound = loop {
        let p = d.pmf(k);
        let kf = k as f64;
        den += p * kf * qpow;
        num += p * kf * (kf - 1.0) * qpow;
        if max.is_some_and(|m| k >= m) {
            break 0.0;
        }
        qpow *= q;
        // Terms (j^2 q^(j-1)) for j > k decay with ratio at most r once r < 1.
        let next = kf + 1.0;
        let r = ((next + 1.0) / next).powi(2) * q;
        if r < 1.0 {
            let bound = d.tail_sup_pmf(k) * next * next * qpow / (1.0 - r);
            if bound < tolerance {
                break bound;
            }
        }
        if qpow == 0.0 {
            break 0.0;
        }
        k += 1;
    };
    if den <= 0.0 {
        return Err(Error::UndefinedPhi);
    }
    let value = num / den - (q / alpha) * d.pmf(1) / den;
    Ok(PhiEvaluation {
        alpha,
        value,
        truncation_point: k,
        tail_bound,
    })
}

/// Φ for `Poi(c)`: `(1-α)/α · (cα - e^{-(1-α)c})`.
pub fn phi_closed_poisson(alpha: f64, c: f64) -> f64 {
    (1.0 - alpha) / alpha * (c * alpha - (-(1.0 - alpha) * c).exp())
}

/// `f(c, x) = cx - e^{-c(1-x)} - x/(1-x)`; `Φ(x, c) ≥ 1` iff `f(c, x) ≥ 0`.
pub fn f(c: f64, x: f64) -> f64 {
    c * x - (-c * (1.0 - x)).exp() - x / (1.0 - x)
}

/// `∂f/∂x`.
pub fn df_dx(c: f64, x: f64) -> f64 {
    c - c * (-c * (1.0 - x)).exp() - 1.0 / ((1.0 - x) * (1.0 - x))
}

/// `g₋(x) = (1 - √(1-4x)) / (2x(1-x))`, continuous at `x = 0` with value 1.
pub fn g_minus(x: f64) -> f64 {
    2.0 / ((1.0 + (1.0 - 4.0 * x).sqrt()) * (1.0 - x))
}

pub fn h_minus(x: f64) -> f64 {
    f(g_minus(x), x)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CriticalConstants {
    pub alpha0: f64,
    pub c0: f64,
    /// `f(c₀, α₀)`, zero up to the bisection tolerance.
    pub f_residual: f64,
    /// `∂f/∂x(c₀, α₀)`.
    pub df_dx_residual: f64,
}

fn bisect(mut lo: f64, mut hi: f64, tolerance: f64, mut g: impl FnMut(f64) -> f64) -> f64 {
    let g_lo = g(lo);
    debug_assert!(g_lo < 0.0 && g(hi) > 0.0);
    while hi - lo > tolerance {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Root `α₀` of `h₋` on `[0, 1/4]` and `c₀ = g₋(α₀)`.
pub fn critical_constants(tolerance: f64) -> Result<CriticalConstants> {
    if !(tolerance > 0.0) {
        return Err(Error::config("tolerance must be positive"));
    }
    let alpha0 = bisect(0.0, 0.25, tolerance, h_minus);
    let c0 = g_minus(alpha0);
    Ok(CriticalConstants {
        alpha0,
        c0,
        f_residual: f(c0, alpha0),
        df_dx_residual: df_dx(c0, alpha0),
    })
}

/// `sup_α Φ(α, c)` for `Poi(c)` with its argmax.
pub fn poisson_sup_phi(c: f64) -> (f64, f64) {
    const GRID: usize = 400;
    let (lo, hi) = (1e-6, 1.0 - 1e-6);
    let step = (hi - lo) / GRID as f64;
    let mut best = (lo, f64::NEG_INFINITY);
    for i in 0..=GRID {
        let a = lo + step * i as f64;
        let v = phi_closed_poisson(a, c);
        if v > best.1 {
            best = (a, v);
        }
    }
    // Golden-section refinement around the best grid point.
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = (best.0 - step).max(lo);
    let mut b = (best.0 + step).min(hi);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let (mut f1, mut f2) = (phi_closed_poisson(x1, c), phi_closed_poisson(x2, c));
    while b - a > 1e-12 {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = phi_closed_poisson(x2, c);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = phi_closed_poisson(x1, c);
        }
    }
    let x = 0.5 * (a + b);
    let v = phi_closed_poisson(x, c);
    if v >= best.1 {
        (v, x)
    } else {
        (best.1, best.0)
    }
}

/// Smallest `c` with `sup_α Φ(α, c) ≥ 1` for `Poi(c)`.
pub fn poisson_threshold(tolerance: f64) -> Result<f64> {
    if !(tolerance > 0.0) {
        return Err(Error::config("tolerance must be positive"));
    }
    Ok(bisect(1.0, 4.0, tolerance, |c| poisson_sup_phi(c).0 - 1.0))
}

/// 200 geometric and 200 uniform points on `[1e-3, 1 - 1e-3]`, merged.
pub fn default_grid() -> Vec<f64> {
    let (lo, hi): (f64, f64) = (1e-3, 1.0 - 1e-3);
    let mut grid = Vec::with_capacity(400);
    let ratio = (hi / lo).ln() / 199.0;
    for i in 0..200 {
        grid.push(lo * (ratio * i as f64).exp());
    }
    for i in 0..200 {
        grid.push(lo + (hi - lo) * i as f64 / 199.0);
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    grid
}

/// Uniform grid `step, 2·step, ...` strictly inside `(0, 1)`.
pub fn uniform_grid(step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step < 0.5) {
        return Err(Error::config(format!(
            "grid step must lie in (0, 0.5), got {step}"
        )));
    }
    let count = (1.0 / step).round() as usize;
    Ok((1..count)
        .map(|i| i as f64 * step)
        .filter(|&a| a < 1.0)
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    Efficient,
    Hard,
    Inconclusive,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::Efficient => "efficient",
            Classification::Hard => "hard",
            Classification::Inconclusive => "inconclusive",
        })
    }
}

/// Sufficient conditions stated in terms of moments and point probabilities.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentCriteria {
    pub m1: f64,
    pub m2: f64,
    pub ratio: f64,
    pub m1_cap_dominated: bool,
    pub m2_cap_dominated: bool,
    pub s0: Option<usize>,
    pub p1: f64,
    pub p3: f64,
    pub p_ge3: f64,
    /// `m2/m1 ≤ 1 - δ`.
    pub efficient_ratio: bool,
    /// `m2/m1 ≥ 1 + δ` and `p1 ≤ 1/(C s0)` with `C = 128/(δ² m1)`.
    pub hard_ratio: bool,
    /// Power law with exponent in `(1, 2)`.
    pub hard_power_law: bool,
    /// `p1 ≤ (4/9)·Pr[D ≥ 3] - δ`.
    pub hard_p1_vs_tail: bool,
    /// `p1 < (4/9)·Pr[D = 3]`.
    pub hard_p1_vs_p3: bool,
}

impl MomentCriteria {
    pub fn new(d: &FlipCountDistribution, delta: f64) -> Self {
        let m = d.moments();
        let ratio = m.ratio();
        let s0 = d.s0(delta);
        let hard_ratio = s0.is_some_and(|s0| {
            let c = 128.0 / (delta * delta * m.m1);
            m.p1 <= 1.0 / (c * s0 as f64)
        });
        let hard_power_law =
            matches!(d.kind(), DistKind::Zipf { kappa, .. } if *kappa > 1.0 && *kappa < 2.0);
        MomentCriteria {
            m1: m.m1,
            m2: m.m2,
            ratio,
            m1_cap_dominated: m.m1_cap_dominated,
            m2_cap_dominated: m.m2_cap_dominated,
            s0,
            p1: m.p1,
            p3: m.p3,
            p_ge3: m.p_ge3,
            efficient_ratio: ratio <= 1.0 - delta,
            hard_ratio,
            hard_power_law,
            hard_p1_vs_tail: m.p1 <= 4.0 / 9.0 * m.p_ge3 - delta,
            hard_p1_vs_p3: m.p1 < 4.0 / 9.0 * m.p3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DichotomyReport {
    pub distribution: String,
    pub margin: f64,
    pub delta: f64,
    pub alpha_grid: Vec<f64>,
    pub phi: Vec<f64>,
    pub sup_phi: f64,
    pub argmax_alpha: f64,
    pub classification: Classification,
    /// `α*` when the classification is hard.
    pub witness: Option<f64>,
    pub criteria: MomentCriteria,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassifyOptions {
    pub margin: f64,
    pub delta: f64,
    pub tolerance: f64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            margin: DEFAULT_MARGIN,
            delta: DEFAULT_DELTA,
            tolerance: DEFAULT_TOLERANCE,
        }
    }
}

pub fn classify(
    d: &FlipCountDistribution,
    grid: &[f64],
    opts: ClassifyOptions,
) -> Result<DichotomyReport> {
    if grid.is_empty() {
        return Err(Error::config("alpha grid is empty"));
    }
    if !(opts.margin > 0.0) {
        return Err(Error::config("margin must be positive"));
    }
    if !(opts.delta > 0.0 && opts.delta < 1.0) {
        return Err(Error::config("delta must lie in (0, 1)"));
    }
    let phi = grid
        .iter()
        .map(|&a| phi_numeric(d, a, opts.tolerance).map(|e| e.value))
        .collect::<Result<Vec<_>>>()?;
    let (best, sup_phi) =
        phi.iter()
            .copied()
            .enumerate()
            .fold(
                (0, f64::NEG_INFINITY),
                |acc, (i, v)| if v > acc.1 { (i, v) } else { acc },
            );
    let classification = if sup_phi <= 1.0 - opts.margin {
        Classification::Efficient
    } else if sup_phi >= 1.0 + opts.margin {
        Classification::Hard
    } else {
        Classification::Inconclusive
    };
    Ok(DichotomyReport {
        distribution: d.to_string(),
        margin: opts.margin,
        delta: opts.delta,
        alpha_grid: grid.to_vec(),
        sup_phi,
        argmax_alpha: grid[best],
        witness: (classification == Classification::Hard).then_some(grid[best]),
        classification,
        criteria: MomentCriteria::new(d, opts.delta),
        phi,
    })
}

impl DichotomyReport {
    /// Two-column `alpha,phi` CSV.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "alpha,phi")?;
        for (a, p) in self.alpha_grid.iter().zip(&self.phi) {
            writeln!(w, "{a},{p}")?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn is_consistent(&self) -> bool {
        let sup = self.phi.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let expected = if sup <= 1.0 - self.margin {
            Classification::Efficient
        } else if sup >= 1.0 + self.margin {
            Classification::Hard
        } else {
            Classification::Inconclusive
        };
        sup == self.sup_phi && expected == self.classification
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(s: &str) -> FlipCountDistribution {
        FlipCountDistribution::parse(s, None).unwrap()
    }

    #[test]
    fn point_mass_one_is_negative() {
        let d = dist("point:k=1");
        for a in [0.1, 0.5, 0.9] {
            let e = phi_numeric(&d, a, 1e-12).unwrap();
            assert!((e.value + (1.0 - a) / a).abs() < 1e-15);
            assert_eq!(e.tail_bound, 0.0);
        }
        let r = classify(&d, &default_grid(), ClassifyOptions::default()).unwrap();
        assert_eq!(r.classification, Classification::Efficient);
        assert!(r.is_consistent());
    }

    #[test]
    fn point_mass_three_at_one_third() {
        let d = dist("point:k=3");
        let e = phi_numeric(&d, 1.0 / 3.0, 1e-12).unwrap();
        assert!((e.value - 2.0).abs() < 1e-12);
        let r = classify(&d, &default_grid(), ClassifyOptions::default()).unwrap();
        assert_eq!(r.classification, Classification::Hard);
        assert!(r.witness.is_some());
        assert!(r.criteria.hard_p1_vs_tail);
        assert!(r.criteria.hard_p1_vs_p3);
    }

    #[test]
    fn zero_mass_is_undefined() {
        let d = dist("point:k=0");
        assert!(matches!(
            phi_numeric(&d, 0.3, 1e-12),
            Err(Error::UndefinedPhi)
        ));
        assert!(phi_numeric(&dist("point:k=1"), 1.0, 1e-12).is_err());
    }

    #[test]
    fn closed_form_example() {
        let v = phi_closed_poisson(0.5, 1.0);
        assert!((v - (0.5 - (-0.5f64).exp())).abs() < 1e-15);
        assert!((v + 0.10653).abs() < 1e-5);
        assert!(phi_closed_poisson(0.01, 2.13692) < 0.0);
    }

    #[test]
    fn numeric_matches_closed_form() {
        for i in 0..20 {
            let a = 0.02 + 0.96 * i as f64 / 19.0;
            for c in [0.2, 1.0, 2.5, 6.0] {
                let d = FlipCountDistribution::poisson(c, None).unwrap();
                let e = phi_numeric(&d, a, 1e-14).unwrap();
                assert!(e.tail_bound < 1e-14);
                let want = phi_closed_poisson(a, c);
                assert!(
                    (e.value - want).abs() < 1e-9,
                    "a={a} c={c}: {} vs {want}",
                    e.value
                );
            }
        }
    }

    #[test]
    fn constants() {
        let k = critical_constants(1e-12).unwrap();
        assert!((k.alpha0 - 0.237134).abs() < 1e-4);
        assert!((k.c0 - 2.13692).abs() < 1e-4);
        assert!(k.f_residual.abs() < 1e-9);
        assert!(k.df_dx_residual.abs() < 1e-6);
        assert!(h_minus(0.0) + (-1f64).exp() < 1e-15 && h_minus(0.0) < 0.0);
        assert!((h_minus(0.25) - (1.0 / 3.0 - (-2f64).exp())).abs() < 1e-12);
        let c = poisson_threshold(1e-10).unwrap();
        assert!((c - k.c0).abs() < 1e-4);
        assert!(poisson_sup_phi(k.c0 - 0.05).0 < 1.0);
        assert!(poisson_sup_phi(k.c0 + 0.05).0 > 1.0);
    }

    #[test]
    fn poisson_increasing_in_c() {
        for i in 1..50 {
            let a = i as f64 / 50.0;
            let mut prev = f64::NEG_INFINITY;
            for j in 1..50 {
                let v = phi_closed_poisson(a, j as f64 * 0.2);
                assert!(v > prev);
                prev = v;
            }
        }
    }

    #[test]
    fn poisson_above_threshold_is_hard() {
        let d = FlipCountDistribution::poisson(2.5, None).unwrap();
        let r = classify(&d, &uniform_grid(1e-3).unwrap(), ClassifyOptions::default()).unwrap();
        assert_eq!(r.classification, Classification::Hard);
        let w = r.witness.unwrap();
        assert!((0.1..0.4).contains(&w), "{w}");
    }

    #[test]
    fn zipf_two_is_not_hard() {
        let d = FlipCountDistribution::zipf(2.0, 1_000_000).unwrap();
        let r = classify(&d, &uniform_grid(1e-2).unwrap(), ClassifyOptions::default()).unwrap();
        assert!(r.sup_phi <= 1.0 + 1e-3, "{}", r.sup_phi);
        // Closed form for the uncapped law: Φ = (1-α)/(-ln α) - 1.
        for (&a, &p) in r.alpha_grid.iter().zip(&r.phi).step_by(7) {
            let want = (1.0 - a) / -a.ln() - 1.0;
            assert!((p - want).abs() < 1e-3, "a={a}: {p} vs {want}");
        }
        assert!(!r.criteria.hard_power_law);
        assert!(r.criteria.m1_cap_dominated);
    }

    #[test]
    fn flags() {
        let r = MomentCriteria::new(&dist("zipf:kappa=1.5,m=10000"), 0.05);
        assert!(r.hard_power_law);
        let r = MomentCriteria::new(&FlipCountDistribution::poisson(0.5, None).unwrap(), 0.05);
        assert!(r.efficient_ratio && !r.hard_ratio);
        // Almost no single-bit flips, heavy two-bit flips.
        let r = MomentCriteria::new(&dist("table:2:0.5,4:0.5"), 0.05);
        assert!(r.hard_ratio && !r.efficient_ratio);
        assert_eq!(r.s0, Some(4));
    }

    #[test]
    fn grids() {
        let g = default_grid();
        assert!(g.len() >= 390 && g.len() <= 400);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert!((g[0] - 1e-3).abs() < 1e-15 && (g[g.len() - 1] - 0.999).abs() < 1e-12);
        assert_eq!(uniform_grid(0.01).unwrap().len(), 99);
        assert!(uniform_grid(0.0).is_err());
    }

    #[test]
    fn csv_schema() {
        let r = classify(&dist("point:k=3"), &[0.25, 0.5], ClassifyOptions::default()).unwrap();
        let mut out = Vec::new();
        r.write_csv(&mut out).unwrap();
        let s = String::from_utf8(out).unwrap();
        assert!(s.starts_with("alpha,phi\n0.25,"));
        assert_eq!(s.lines().count(), 3);
        let json: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(json["classification"], "hard");
    }
}
