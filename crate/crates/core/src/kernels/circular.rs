//! Space-time covariances on a network cross circular time, built as cosine
//! series in the angular separation whose coefficients are powers of a
//! completely monotone spatial correlation `g`.
//!
//! Every family is written in terms of `x = g(d/c_S) cos θ`, with
//! `θ ∈ [0, π]`, and equals one at `(0, 0)`.

use serde::{Deserialize, Serialize};

use super::families::pow;
use super::{CovarianceFunction, KernelError, SpatialFamily};
use crate::metrics::{MetricKind, TimeKind};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum CircularFamily {
    /// `((1-ε) / (1 - ε x))^τ`
    NegBinomial { eps: f64, tau: f64 },
    /// `(1-ε)^{2τ} / (1 + ε² - 2ε x)^τ`
    Multiquadric { eps: f64, tau: f64 },
    /// `e^{x-1} (1 + x) / 2`
    SineSeries,
    /// `1 - 2^{-a} (1 - x)^{a/2}`
    SinePower { a: f64 },
    /// `((1 + g²)(1-ε) / (1 + g² - 2ε x))^τ`
    AdaptedMultiquadric { eps: f64, tau: f64 },
    /// `exp(λ (x - 1))`
    Poisson { lambda: f64 },
}

fn open_unit(name: &str, eps: f64) -> Result<(), KernelError> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(KernelError::InvalidParams(format!("{name} eps must lie in (0, 1), got {eps}")))
    }
}

fn positive(name: &str, v: f64) -> Result<(), KernelError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(KernelError::InvalidParams(format!("{name} must be positive and finite, got {v}")))
    }
}

impl CircularFamily {
    pub fn name(&self) -> &'static str {
        match self {
            CircularFamily::NegBinomial { .. } => "neg_binomial",
            CircularFamily::Multiquadric { .. } => "multiquadric",
            CircularFamily::SineSeries => "sine_series",
            CircularFamily::SinePower { .. } => "sine_power",
            CircularFamily::AdaptedMultiquadric { .. } => "adapted_multiquadric",
            CircularFamily::Poisson { .. } => "poisson",
        }
    }

    pub fn validate(&self) -> Result<(), KernelError> {
        match *self {
            CircularFamily::NegBinomial { eps, tau }
            | CircularFamily::Multiquadric { eps, tau }
            | CircularFamily::AdaptedMultiquadric { eps, tau } => {
                open_unit(self.name(), eps)?;
                positive("tau", tau)
            }
            CircularFamily::SineSeries => Ok(()),
            CircularFamily::SinePower { a } => {
                if a > 0.0 && a <= 2.0 {
                    Ok(())
                } else {
                    Err(KernelError::InvalidParams(format!(
                        "sine_power a must lie in (0, 2], got {a}"
                    )))
                }
            }
            CircularFamily::Poisson { lambda } => positive("poisson lambda", lambda),
        }
    }

    /// Value at inner correlation `g ∈ [0, 1]` and angle `θ ∈ [0, π]`.
    #[inline]
    pub fn value(&self, g: f64, theta: f64) -> f64 {
        let x = g * theta.cos();
        match *self {
            CircularFamily::NegBinomial { eps, tau } => pow((1.0 - eps) / (1.0 - eps * x), tau),
            CircularFamily::Multiquadric { eps, tau } => {
                pow((1.0 - eps) * (1.0 - eps) / (1.0 + eps * eps - 2.0 * eps * x), tau)
            }
            CircularFamily::SineSeries => (x - 1.0).exp() * (1.0 + x) / 2.0,
            CircularFamily::SinePower { a } => 1.0 - 0.5f64.powf(a) * pow(1.0 - x, a / 2.0),
            CircularFamily::AdaptedMultiquadric { eps, tau } => {
                let q = 1.0 + g * g;
                pow(q * (1.0 - eps) / (q - 2.0 * eps * x), tau)
            }
            CircularFamily::Poisson { lambda } => (lambda * (x - 1.0)).exp(),
        }
    }
}

fn default_metric() -> MetricKind {
    MetricKind::Resistance
}

/// A circular-time kernel: `σ² C(g(d/c_S), θ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircularSpec {
    pub sigma2: f64,
    #[serde(rename = "c_S")]
    pub c_s: f64,
    pub family: CircularFamily,
    pub g: SpatialFamily,
    #[serde(default = "default_metric")]
    pub metric: MetricKind,
}

impl CircularSpec {
    pub fn validate(&self) -> Result<(), KernelError> {
        positive("sigma2", self.sigma2)?;
        positive("c_S", self.c_s)?;
        self.family.validate()?;
        check_inner(&self.g)
    }

    #[inline]
    pub fn value(&self, d: f64, theta: f64) -> f64 {
        self.sigma2 * self.family.value(self.g.value(d / self.c_s), theta)
    }

    pub fn variance(&self) -> f64 {
        self.sigma2
    }
}

fn check_inner(g: &SpatialFamily) -> Result<(), KernelError> {
    g.validate()?;
    if g.is_completely_monotone() {
        Ok(())
    } else {
        Err(KernelError::InnerFamilyNotCompletelyMonotone(format!("{g:?}")))
    }
}

impl CovarianceFunction for CircularSpec {
    fn metric(&self) -> MetricKind {
        self.metric
    }

    fn time_kind(&self) -> TimeKind {
        TimeKind::Circular
    }

    fn cov(&self, d: f64, u: f64) -> f64 {
        self.value(d, u)
    }
}

/// Checked evaluation of a circular family at spatial distance `d` and
/// angular separation `theta`, without variance scaling.
pub fn eval_circular(
    family: &CircularFamily,
    g_spec: &SpatialFamily,
    c_s: f64,
    d: f64,
    theta: f64,
) -> Result<f64, KernelError> {
    family.validate()?;
    check_inner(g_spec)?;
    positive("c_S", c_s)?;
    if !(d >= 0.0 && d.is_finite()) {
        return Err(KernelError::InvalidArgument(format!("distance must be nonnegative, got {d}")));
    }
    if !(0.0..=std::f64::consts::PI).contains(&theta) {
        return Err(KernelError::InvalidArgument(format!(
            "angular separation must lie in [0, π], got {theta}"
        )));
    }
    Ok(family.value(g_spec.value(d / c_s), theta))
}
