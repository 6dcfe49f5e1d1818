//! Space-time covariance functions on networks.
//!
//! The main object is the composition
//!
//! ```text
//! G(d, u) = σ² ψ(u/c_T)^(-α) φ( (d/c_S) ψ(u/c_T)^(-β) )
//! ```
//!
//! with a spatial correlation `φ` and a temporal function `ψ`. Negative `β`
//! turns the rescaling of distance into a multiplication. Circular time is
//! covered both by this composition (with the lag restricted to `[0, π]`)
//! and by the cosine-series families in [`circular`].

mod bessel;
pub mod circular;
mod config;
mod families;
mod models;
mod validity;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::{temporal_separation, DistanceMatrix, MetricKind, TimeKind};
use families::pow;

pub use bessel::{bessel_k, ln_bessel_k};
pub use circular::{eval_circular, CircularFamily, CircularSpec};
pub use config::{Kernel, KernelConfig};
pub use families::{eval_phi, eval_psi, SpatialFamily, TemporalFamily};
pub use models::{model_askey_st, model_c1, model_c2, model_t, ModelFamily};
pub use config::Scales;
pub use validity::{
    askey_nu_bound, check_circular_validity, check_validity, multiplicative_alpha_bound, ValidityRule, ValidityVerdict,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KernelError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("inner spatial family {0} is not completely monotone for these parameters")]
    InnerFamilyNotCompletelyMonotone(String),
    #[error("distance matrix uses the {found} metric but the kernel expects {expected}")]
    MetricMismatch {
        expected: &'static str,
        found: &'static str,
    },
    #[error("{times} time stamps for {points} points")]
    LengthMismatch { points: usize, times: usize },
}

/// Anything that maps a (spatial distance, temporal separation) pair to a
/// covariance. Implemented by the kernel specs and by test doubles.
pub trait CovarianceFunction: Sync {
    fn metric(&self) -> MetricKind;
    fn time_kind(&self) -> TimeKind;
    /// Covariance at spatial distance `d ≥ 0` and temporal separation `u ≥ 0`.
    fn cov(&self, d: f64, u: f64) -> f64;
}

/// A fully parameterized space-time covariance of the composite form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSpec {
    pub sigma2: f64,
    #[serde(rename = "c_S")]
    pub c_s: f64,
    #[serde(rename = "c_T")]
    pub c_t: f64,
    pub alpha: f64,
    pub beta: f64,
    pub phi: SpatialFamily,
    pub psi: TemporalFamily,
    pub metric: MetricKind,
    #[serde(rename = "time")]
    pub time_kind: TimeKind,
}

impl KernelSpec {
    pub fn validate(&self) -> Result<(), KernelError> {
        for (name, v) in [("sigma2", self.sigma2), ("c_S", self.c_s), ("c_T", self.c_t)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(KernelError::InvalidParams(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        if !self.alpha.is_finite() || !self.beta.is_finite() {
            return Err(KernelError::InvalidParams("alpha and beta must be finite".into()));
        }
        self.phi.validate()?;
        self.psi.validate()
    }

    /// Same model with new variance and scales.
    pub fn with_scales(&self, sigma2: f64, c_s: f64, c_t: f64) -> Self {
        Self {
            sigma2,
            c_s,
            c_t,
            ..*self
        }
    }

    /// `G(0, 0) = σ² ψ(0)^(-α)`.
    pub fn variance(&self) -> f64 {
        self.value(0.0, 0.0)
    }

    /// `G(d, u)` without argument checks.
    #[inline]
    pub fn value(&self, d: f64, u: f64) -> f64 {
        let p = self.psi.value(u / self.c_t);
        let temporal = 1.0 / pow(p, self.alpha);
        let r = if self.beta == 0.0 {
            d / self.c_s
        } else {
            d / (self.c_s * pow(p, self.beta))
        };
        self.sigma2 * temporal * self.phi.value(r)
    }
}

impl CovarianceFunction for KernelSpec {
    fn metric(&self) -> MetricKind {
        self.metric
    }

    fn time_kind(&self) -> TimeKind {
        self.time_kind
    }

    fn cov(&self, d: f64, u: f64) -> f64 {
        self.value(d, u)
    }
}

/// Checked evaluation of the composite kernel.
pub fn eval_gneiting(spec: &KernelSpec, d: f64, u: f64) -> Result<f64, KernelError> {
    spec.validate()?;
    if !(d >= 0.0 && d.is_finite()) {
        return Err(KernelError::InvalidArgument(format!("distance must be nonnegative, got {d}")));
    }
    if !(u >= 0.0 && u.is_finite()) {
        return Err(KernelError::InvalidArgument(format!("time lag must be nonnegative, got {u}")));
    }
    if spec.time_kind == TimeKind::Circular && u > std::f64::consts::PI {
        return Err(KernelError::InvalidArgument(format!(
            "circular time lag must lie in [0, π], got {u}"
        )));
    }
    Ok(spec.value(d, u))
}

/// Gram matrix of `k` over points with pairwise distances `dmat` observed at
/// `times`.
pub fn gram<K: CovarianceFunction + ?Sized>(
    k: &K,
    dmat: &DistanceMatrix,
    times: &[f64],
) -> Result<DMatrix<f64>, KernelError> {
    if dmat.metric() != k.metric() {
        return Err(KernelError::MetricMismatch {
            expected: k.metric().name(),
            found: dmat.metric().name(),
        });
    }
    if times.len() != dmat.len() {
        return Err(KernelError::LengthMismatch {
            points: dmat.len(),
            times: times.len(),
        });
    }
    let n = times.len();
    let kind = k.time_kind();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = k.cov(0.0, 0.0);
        for j in (i + 1)..n {
            let v = k.cov(dmat.get(i, j), temporal_separation(times[i], times[j], kind));
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> KernelSpec {
        KernelSpec {
            sigma2: 1.0,
            c_s: 1.0,
            c_t: 1.0,
            alpha: 1.0,
            beta: 1.0,
            phi: SpatialFamily::GenCauchy { b_s: 1.0, delta_s: 1.0 },
            psi: TemporalFamily::GneitingPsi { a_t: 1.0 },
            metric: MetricKind::Resistance,
            time_kind: TimeKind::Linear,
        }
    }

    #[test]
    fn reference_point() {
        let v = eval_gneiting(&example(), 1.0, 1.0).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(eval_gneiting(&example(), 0.0, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(eval_gneiting(&example(), -1.0, 0.0).is_err());
        let circ = KernelSpec {
            time_kind: TimeKind::Circular,
            ..example()
        };
        assert!(eval_gneiting(&circ, 0.0, 4.0).is_err());
        let bad = KernelSpec {
            c_s: 0.0,
            ..example()
        };
        assert!(eval_gneiting(&bad, 0.0, 0.0).is_err());
    }

    #[test]
    fn separable_at_zero_beta() {
        let k = KernelSpec {
            beta: 0.0,
            alpha: 1.7,
            sigma2: 2.3,
            phi: SpatialFamily::Matern { nu: 1.5 },
            psi: TemporalFamily::DagumPsi { b: 0.7, tau: 0.4 },
            ..example()
        };
        for &d in &[0.0, 0.3, 1.0, 4.0] {
            for &u in &[0.0, 0.2, 1.5, 9.0] {
                let lhs = k.value(d, u);
                let rhs = k.value(d, 0.0) * k.value(0.0, u) / k.value(0.0, 0.0);
                assert!((lhs - rhs).abs() <= 1e-14 * k.variance());
            }
        }
    }

    #[test]
    fn gram_matches_entrywise_evaluation() {
        let d = DistanceMatrix::from_fn(3, MetricKind::Resistance, |i, j| (i + j) as f64 * 0.7);
        let t = [0.0, 0.4, 1.3];
        let k = example();
        let g = gram(&k, &d, &t).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want = k.value(d.get(i, j), (t[i] - t[j]).abs());
                assert_eq!(g[(i, j)], want);
            }
        }
        let geo = DistanceMatrix::from_fn(3, MetricKind::Geodesic, |_, _| 1.0);
        assert!(matches!(gram(&k, &geo, &t), Err(KernelError::MetricMismatch { .. })));
        assert!(matches!(gram(&k, &d, &t[..2]), Err(KernelError::LengthMismatch { .. })));
    }

    #[test]
    fn single_point_and_identical_points() {
        let k = KernelSpec {
            psi: TemporalFamily::PowerPsi { a: 1.0, c: 0.5 },
            alpha: 2.0,
            ..example()
        };
        let one = DistanceMatrix::from_fn(1, MetricKind::Resistance, |_, _| 0.0);
        assert_eq!(gram(&k, &one, &[0.3]).unwrap()[(0, 0)], 4.0);
        let same = DistanceMatrix::from_fn(4, MetricKind::Resistance, |_, _| 0.0);
        let g = gram(&k, &same, &[0.3; 4]).unwrap();
        assert!(g.iter().all(|&v| v == 4.0));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn maximum_at_zero_distance(
                d in 0.0f64..50.0,
                u in 0.0f64..5.0,
                alpha in 0.5f64..3.0,
                beta in -1.0f64..1.0,
                nu in 0.2f64..3.0,
            ) {
                let k = KernelSpec {
                    alpha,
                    beta,
                    phi: SpatialFamily::Matern { nu },
                    ..example()
                };
                prop_assert!(k.value(d, u) <= k.value(0.0, u) * (1.0 + 1e-12));
            }
        }
    }
}
