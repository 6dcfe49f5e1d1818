use serde::{Deserialize, Serialize};

use super::{KernelError, KernelSpec, SpatialFamily, TemporalFamily};
use crate::metrics::{MetricKind, TimeKind};

/// The true model of the model-selection study: generalized Cauchy in
/// space (`b_S = 1`, `δ_S = 2`), `ψ(t) = 1 + t`, `α = 2`, `β = 1`, geodesic
/// distance.
pub fn model_t(sigma2: f64, c_s: f64, c_t: f64) -> KernelSpec {
    KernelSpec {
        sigma2,
        c_s,
        c_t,
        alpha: 2.0,
        beta: 1.0,
        phi: SpatialFamily::GenCauchy {
            b_s: 1.0,
            delta_s: 2.0,
        },
        psi: TemporalFamily::GneitingPsi { a_t: 1.0 },
        metric: MetricKind::Geodesic,
        time_kind: TimeKind::Linear,
    }
}

/// [`model_t`] with straight-line distances in place of network distances.
pub fn model_c1(sigma2: f64, c_s: f64, c_t: f64) -> KernelSpec {
    KernelSpec {
        metric: MetricKind::AmbientEuclidean,
        ..model_t(sigma2, c_s, c_t)
    }
}

/// The second competitor: `φ(r) = 1 - r^{1/2} (1 + r)^{-1/2}` (Dagum with
/// `b = 1`, `τ = 1/2`) and `ψ(t) = 1/2 + t^{1/4}`, `α = 2`, `β = 1`,
/// geodesic distance. The variance at the origin is `σ² (1/2)^{-2} = 4σ²`.
pub fn model_c2(sigma2: f64, c_s: f64, c_t: f64) -> KernelSpec {
    KernelSpec {
        sigma2,
        c_s,
        c_t,
        alpha: 2.0,
        beta: 1.0,
        phi: SpatialFamily::Dagum { b: 1.0, tau: 0.5 },
        psi: TemporalFamily::PowerPsi { a: 0.25, c: 0.5 },
        metric: MetricKind::Geodesic,
        time_kind: TimeKind::Linear,
    }
}

/// Dynamically compactly supported model: Askey in space with
/// `ψ(t) = 1 + t^{a_T}`. At lag `u` the support radius is
/// `c_S ψ(u/c_T)^β`.
pub fn model_askey_st(
    sigma2: f64,
    c_s: f64,
    c_t: f64,
    nu_s: f64,
    alpha: f64,
    beta: f64,
    a_t: f64,
) -> Result<KernelSpec, KernelError> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(KernelError::InvalidParams(format!(
            "askey space-time model needs beta in [0, 1], got {beta}"
        )));
    }
    let spec = KernelSpec {
        sigma2,
        c_s,
        c_t,
        alpha,
        beta,
        phi: SpatialFamily::Askey { nu: nu_s },
        psi: TemporalFamily::GneitingPsi { a_t },
        metric: MetricKind::Geodesic,
        time_kind: TimeKind::Linear,
    };
    spec.validate()?;
    Ok(spec)
}

/// The three models compared by the study, with free `(σ², c_S, c_T)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelFamily {
    T,
    C1,
    C2,
}

impl ModelFamily {
    pub fn name(&self) -> &'static str {
        match self {
            ModelFamily::T => "T",
            ModelFamily::C1 => "C1",
            ModelFamily::C2 => "C2",
        }
    }

    pub fn spec(&self, sigma2: f64, c_s: f64, c_t: f64) -> KernelSpec {
        match self {
            ModelFamily::T => model_t(sigma2, c_s, c_t),
            ModelFamily::C1 => model_c1(sigma2, c_s, c_t),
            ModelFamily::C2 => model_c2(sigma2, c_s, c_t),
        }
    }
}

impl std::str::FromStr for ModelFamily {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "T" => Ok(ModelFamily::T),
            "C1" => Ok(ModelFamily::C1),
            "C2" => Ok(ModelFamily::C2),
            _ => Err(format!("unknown model `{s}` (expected T, C1 or C2)")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_t_fields() {
        let t = model_t(0.9, 100.0, 0.2);
        assert_eq!(t.alpha, 2.0);
        assert_eq!(t.metric, MetricKind::Geodesic);
        assert_eq!(t.variance(), 0.9);
        let c1 = model_c1(0.9, 100.0, 0.2);
        assert_eq!(KernelSpec { metric: MetricKind::Geodesic, ..c1 }, t);
    }

    #[test]
    fn model_c2_values() {
        let c = model_c2(1.0, 1.0, 1.0);
        assert_eq!(c.variance(), 4.0);
        assert!(c.value(1e12, 0.0) < 1e-5);
        // d = 1, u = 1 with ψ(t) = 1/2 + t (a_T = 1) and φ = Dagum(1, 1/2).
        let k = KernelSpec {
            psi: TemporalFamily::PowerPsi { a: 1.0, c: 0.5 },
            ..c
        };
        assert!((k.value(1.0, 1.0) - 0.16335309687392183716).abs() < 1e-15);
    }

    #[test]
    fn askey_support_boundary() {
        let k = model_askey_st(1.3, 2.0, 0.5, 5.0, 6.0, 0.5, 1.0).unwrap();
        for &u in &[0.0, 0.3, 2.0] {
            let radius = k.c_s * super::super::families::pow(k.psi.value(u / k.c_t), k.beta);
            assert_eq!(k.value(radius, u), 0.0);
            assert_eq!(k.value(radius * 1.5, u), 0.0);
            assert!(k.value(radius * 0.999, u) > 0.0);
        }
        assert_eq!(k.value(1.0, 0.0), 1.3 / 32.0);
        let u = 0.7;
        let want = 1.3 / k.psi.value(u / 0.5).powf(6.0);
        assert!((k.value(0.0, u) - want).abs() < 1e-15 * want);
        assert!(model_askey_st(1.0, 1.0, 1.0, 5.0, 6.0, 1.5, 1.0).is_err());
    }
}
