use serde::{Deserialize, Serialize};

use crate::distributions::FlipCountDistribution;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Rls,
    OnePlusLambdaEa,
    MuPlusOneEa,
    MuPlusOneGa,
    OnePlusLambdaFastEa,
    MuPlusOneFastEa,
    MuPlusOneFastGa,
    OneLambdaLambdaGa,
}

impl Variant {
    fn is_fast(self) -> bool {
        matches!(
            self,
            Variant::OnePlusLambdaFastEa | Variant::MuPlusOneFastEa | Variant::MuPlusOneFastGa
        )
    }

    fn uses_c(self) -> bool {
        matches!(
            self,
            Variant::OnePlusLambdaEa
                | Variant::MuPlusOneEa
                | Variant::MuPlusOneGa
                | Variant::OneLambdaLambdaGa
        )
    }
}

/// Self-adjusting λ for the (1+(λ,λ)) GA: divide by `factor` after a strict
/// improvement, multiply by `factor^(1/4)` otherwise; `c = λ`,
/// `γ = (1 - delta_gamma)/λ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OneFifthRule {
    #[serde(default = "default_factor")]
    pub factor: f64,
    /// Upper bound for λ; defaults to `n`.
    #[serde(default)]
    pub lambda_max: Option<f64>,
    #[serde(default)]
    pub delta_gamma: f64,
}

fn default_factor() -> f64 {
    1.5
}

impl Default for OneFifthRule {
    fn default() -> Self {
        OneFifthRule {
            factor: default_factor(),
            lambda_max: None,
            delta_gamma: 0.0,
        }
    }
}

fn one() -> usize {
    1
}

/// Variant tag plus parameters. Parameters that a variant does not use must
/// be left unset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmSpec {
    pub variant: Variant,
    #[serde(default = "one")]
    pub mu: usize,
    #[serde(default = "one")]
    pub lambda: usize,
    /// Mutation parameter (rate `c/n`); defaults to 1, or to λ for the
    /// (1+(λ,λ)) GA.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    /// Crossover bias of the (1+(λ,λ)) GA; defaults to `1/λ`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    /// Flip-count distribution of the fast variants, e.g. `"zipf:kappa=1.5"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dist: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub adaptive: Option<OneFifthRule>,
}

impl AlgorithmSpec {
    fn base(variant: Variant) -> Self {
        AlgorithmSpec {
            variant,
            mu: 1,
            lambda: 1,
            c: None,
            gamma: None,
            dist: None,
            adaptive: None,
        }
    }

    pub fn rls() -> Self {
        Self::base(Variant::Rls)
    }

    pub fn one_plus_lambda_ea(lambda: usize, c: f64) -> Self {
        AlgorithmSpec {
            lambda,
            c: Some(c),
            ..Self::base(Variant::OnePlusLambdaEa)
        }
    }

    pub fn mu_plus_one_ea(mu: usize, c: f64) -> Self {
        AlgorithmSpec {
            mu,
            c: Some(c),
            ..Self::base(Variant::MuPlusOneEa)
        }
    }

    pub fn mu_plus_one_ga(mu: usize, c: f64) -> Self {
        AlgorithmSpec {
            mu,
            c: Some(c),
            ..Self::base(Variant::MuPlusOneGa)
        }
    }

    pub fn one_plus_lambda_fast_ea(lambda: usize, dist: &str) -> Self {
        AlgorithmSpec {
            lambda,
            dist: Some(dist.to_string()),
            ..Self::base(Variant::OnePlusLambdaFastEa)
        }
    }

    pub fn mu_plus_one_fast_ea(mu: usize, dist: &str) -> Self {
        AlgorithmSpec {
            mu,
            dist: Some(dist.to_string()),
            ..Self::base(Variant::MuPlusOneFastEa)
        }
    }

    pub fn mu_plus_one_fast_ga(mu: usize, dist: &str) -> Self {
        AlgorithmSpec {
            mu,
            dist: Some(dist.to_string()),
            ..Self::base(Variant::MuPlusOneFastGa)
        }
    }

    pub fn one_lambda_lambda_ga(lambda: usize, c: f64, gamma: f64) -> Self {
        AlgorithmSpec {
            lambda,
            c: Some(c),
            gamma: Some(gamma),
            ..Self::base(Variant::OneLambdaLambdaGa)
        }
    }

    pub fn one_lambda_lambda_ga_adaptive(rule: OneFifthRule) -> Self {
        AlgorithmSpec {
            adaptive: Some(rule),
            ..Self::base(Variant::OneLambdaLambdaGa)
        }
    }

    /// Compatibility warnings that do not prevent a run.
    pub fn warnings(&self, n: usize) -> Vec<String> {
        let mut out = Vec::new();
        if matches!(
            self.variant,
            Variant::MuPlusOneFastEa | Variant::MuPlusOneFastGa
        ) {
            if let Some(Ok(d)) = self
                .dist
                .as_deref()
                .map(|s| FlipCountDistribution::parse(s, Some(n)))
            {
                if d.pmf(0) == 0.0 {
                    out.push(format!(
                        "{:?} with Pr[D = 0] = 0: the population cannot duplicate its best point",
                        self.variant
                    ));
                }
            }
        }
        out
    }

    pub(crate) fn prepare(&self, n: usize) -> Result<Plan> {
        let v = self.variant;
        let bad = |msg: String| Err(Error::Config(msg));
        if self.mu == 0 || self.lambda == 0 {
            return bad("mu and lambda must be at least 1".into());
        }
        match v {
            Variant::Rls if self.mu != 1 || self.lambda != 1 => {
                return bad("RLS has mu = lambda = 1".into())
            }
            Variant::OnePlusLambdaEa
            | Variant::OnePlusLambdaFastEa
            | Variant::OneLambdaLambdaGa
                if self.mu != 1 =>
            {
                return bad(format!("{v:?} has mu = 1"))
            }
            Variant::MuPlusOneEa
            | Variant::MuPlusOneGa
            | Variant::MuPlusOneFastEa
            | Variant::MuPlusOneFastGa
                if self.lambda != 1 =>
            {
                return bad(format!("{v:?} has lambda = 1"))
            }
            _ => {}
        }
        if self.gamma.is_some() && v != Variant::OneLambdaLambdaGa {
            return bad("gamma is only used by the (1+(λ,λ)) GA".into());
        }
        if self.adaptive.is_some() && v != Variant::OneLambdaLambdaGa {
            return bad("adaptive parameters are only used by the (1+(λ,λ)) GA".into());
        }
        if self.dist.is_some() != v.is_fast() {
            return bad(if v.is_fast() {
                format!("{v:?} needs a flip-count distribution")
            } else {
                format!("{v:?} does not take a flip-count distribution")
            });
        }
        if self.c.is_some() && !v.uses_c() {
            return bad(format!("{v:?} does not take a mutation parameter c"));
        }
        if let Some(c) = self.c {
            if !(c > 0.0 && c <= n as f64) {
                return bad(format!("mutation parameter c = {c} outside (0, n]"));
            }
        }

        if v == Variant::OneLambdaLambdaGa {
            return self.prepare_lambda_lambda(n);
        }

        let mutation = match v {
            Variant::Rls => Mutation::SingleBit,
            _ if v.is_fast() => {
                let d = FlipCountDistribution::parse(self.dist.as_deref().unwrap(), Some(n))?;
                if d.support_max().is_some_and(|m| m > n) {
                    return bad(format!("flip-count distribution {d} exceeds n = {n}"));
                }
                Mutation::Fast(d)
            }
            _ => Mutation::Standard {
                rate: self.c.unwrap_or(1.0) / n as f64,
            },
        };
        Ok(Plan::Population(PopulationPlan {
            mu: self.mu,
            lambda: self.lambda,
            crossover: matches!(v, Variant::MuPlusOneGa | Variant::MuPlusOneFastGa),
            mutation,
        }))
    }

    fn prepare_lambda_lambda(&self, n: usize) -> Result<Plan> {
        if let Some(rule) = &self.adaptive {
            if self.c.is_some() || self.gamma.is_some() {
                return Err(Error::config(
                    "the adaptive (1+(λ,λ)) GA derives c and gamma from λ",
                ));
            }
            if !(rule.factor > 1.0) || !(0.0..1.0).contains(&rule.delta_gamma) {
                return Err(Error::config(
                    "one-fifth rule needs factor > 1 and 0 <= delta_gamma < 1",
                ));
            }
            let lambda_max = rule.lambda_max.unwrap_or(n as f64);
            if !(lambda_max >= 1.0) {
                return Err(Error::config("lambda_max must be at least 1"));
            }
            let lambda0 = (self.lambda as f64).min(lambda_max);
            return Ok(Plan::LambdaLambda(LambdaLambdaPlan {
                lambda: lambda0,
                c: lambda0,
                gamma: (1.0 - rule.delta_gamma) / lambda0,
                adaptive: Some(AdaptivePlan {
                    factor: rule.factor,
                    lambda_max,
                    delta_gamma: rule.delta_gamma,
                }),
            }));
        }
        let lambda = self.lambda as f64;
        let c = self.c.unwrap_or(lambda).min(n as f64);
        let gamma = self.gamma.unwrap_or(1.0 / lambda);
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::config(format!("gamma = {gamma} outside (0, 1]")));
        }
        Ok(Plan::LambdaLambda(LambdaLambdaPlan {
            lambda,
            c,
            gamma,
            adaptive: None,
        }))
    }
}

#[derive(Clone, Debug)]
pub(crate) enum Mutation {
    SingleBit,
    Standard { rate: f64 },
    Fast(FlipCountDistribution),
}

#[derive(Clone, Debug)]
pub(crate) struct PopulationPlan {
    pub mu: usize,
    pub lambda: usize,
    pub crossover: bool,
    pub mutation: Mutation,
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct AdaptivePlan {
    pub factor: f64,
    pub lambda_max: f64,
    pub delta_gamma: f64,
}

#[derive(Clone, Debug)]
pub(crate) struct LambdaLambdaPlan {
    pub lambda: f64,
    pub c: f64,
    pub gamma: f64,
    pub adaptive: Option<AdaptivePlan>,
}

#[derive(Clone, Debug)]
pub(crate) enum Plan {
    Population(PopulationPlan),
    LambdaLambda(LambdaLambdaPlan),
}
