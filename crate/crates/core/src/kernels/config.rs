use serde::{Deserialize, Serialize};

use super::models::ModelFamily;
use super::validity::{check_circular_validity, check_validity, ValidityVerdict};
use super::{CircularSpec, CovarianceFunction, KernelError, KernelSpec};
use crate::metrics::{MetricKind, TimeKind};
use crate::network::TopologyClass;

/// Free parameters of a named model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scales {
    pub sigma2: f64,
    #[serde(rename = "c_S")]
    pub c_s: f64,
    #[serde(rename = "c_T")]
    pub c_t: f64,
}

/// Kernel as read from a JSON file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model")]
pub enum KernelConfig {
    #[serde(rename = "gneiting")]
    Gneiting(KernelSpec),
    T(Scales),
    C1(Scales),
    C2(Scales),
    #[serde(rename = "circular")]
    Circular(CircularSpec),
}

impl KernelConfig {
    /// Resolves named shortcuts and checks parameters.
    pub fn build(&self) -> Result<Kernel, KernelError> {
        let named = |m: ModelFamily, s: &Scales| m.spec(s.sigma2, s.c_s, s.c_t);
        let k = match self {
            KernelConfig::Gneiting(spec) => Kernel::Gneiting(*spec),
            KernelConfig::T(s) => Kernel::Gneiting(named(ModelFamily::T, s)),
            KernelConfig::C1(s) => Kernel::Gneiting(named(ModelFamily::C1, s)),
            KernelConfig::C2(s) => Kernel::Gneiting(named(ModelFamily::C2, s)),
            KernelConfig::Circular(spec) => Kernel::Circular(*spec),
        };
        k.validate()?;
        Ok(k)
    }
}

/// Either kind of kernel, behind one interface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Kernel {
    Gneiting(KernelSpec),
    Circular(CircularSpec),
}

impl Kernel {
    pub fn validate(&self) -> Result<(), KernelError> {
        match self {
            Kernel::Gneiting(s) => s.validate(),
            Kernel::Circular(s) => s.validate(),
        }
    }

    pub fn variance(&self) -> f64 {
        self.cov(0.0, 0.0)
    }

    pub fn validity(&self, topo: &TopologyClass) -> ValidityVerdict {
        match self {
            Kernel::Gneiting(s) => check_validity(s, topo),
            Kernel::Circular(s) => check_circular_validity(s, topo),
        }
    }

    /// Same kernel with the variance multiplied by `k`.
    pub fn scaled(&self, k: f64) -> Self {
        match *self {
            Kernel::Gneiting(s) => Kernel::Gneiting(KernelSpec {
                sigma2: s.sigma2 * k,
                ..s
            }),
            Kernel::Circular(s) => Kernel::Circular(CircularSpec {
                sigma2: s.sigma2 * k,
                ..s
            }),
        }
    }
}

impl From<KernelSpec> for Kernel {
    fn from(s: KernelSpec) -> Self {
        Kernel::Gneiting(s)
    }
}

impl From<CircularSpec> for Kernel {
    fn from(s: CircularSpec) -> Self {
        Kernel::Circular(s)
    }
}

impl CovarianceFunction for Kernel {
    fn metric(&self) -> MetricKind {
        match self {
            Kernel::Gneiting(s) => s.metric,
            Kernel::Circular(s) => s.metric,
        }
    }

    fn time_kind(&self) -> TimeKind {
        match self {
            Kernel::Gneiting(s) => s.time_kind,
            Kernel::Circular(_) => TimeKind::Circular,
        }
    }

    #[inline]
    fn cov(&self, d: f64, u: f64) -> f64 {
        match self {
            Kernel::Gneiting(s) => s.value(d, u),
            Kernel::Circular(s) => s.value(d, u),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{model_t, SpatialFamily, TemporalFamily};

    #[test]
    fn parses_full_spec() {
        let text = r#"{"model":"gneiting","sigma2":1.0,"c_S":2.0,"c_T":0.5,"alpha":2,"beta":1,
            "phi":{"family":"gen_cauchy","b_S":1,"delta_S":2},
            "psi":{"family":"gneiting","a_T":1},"metric":"geodesic","time":"linear"}"#;
        let k = serde_json::from_str::<KernelConfig>(text).unwrap().build().unwrap();
        let Kernel::Gneiting(s) = k else { panic!() };
        assert_eq!(s, model_t(1.0, 2.0, 0.5));
        assert!(matches!(s.phi, SpatialFamily::GenCauchy { .. }));
        assert!(matches!(s.psi, TemporalFamily::GneitingPsi { .. }));
    }

    #[test]
    fn parses_shortcuts() {
        let k: KernelConfig = serde_json::from_str(r#"{"model":"T","sigma2":0.9,"c_S":100,"c_T":0.2}"#).unwrap();
        assert_eq!(k.build().unwrap(), Kernel::Gneiting(model_t(0.9, 100.0, 0.2)));
        let c2: KernelConfig = serde_json::from_str(r#"{"model":"C2","sigma2":1,"c_S":1,"c_T":1}"#).unwrap();
        assert_eq!(c2.build().unwrap().variance(), 4.0);
    }

    #[test]
    fn rejects_unknown_fields_and_bad_values() {
        assert!(serde_json::from_str::<KernelConfig>(
            r#"{"model":"T","sigma2":0.9,"c_S":100,"c_T":0.2,"nugget":1}"#
        )
        .is_err());
        assert!(serde_json::from_str::<KernelConfig>(r#"{"model":"Z"}"#).is_err());
        let bad: KernelConfig = serde_json::from_str(r#"{"model":"T","sigma2":-1,"c_S":1,"c_T":1}"#).unwrap();
        assert!(bad.build().is_err());
    }

    #[test]
    fn parses_circular() {
        let text = r#"{"model":"circular","sigma2":1.5,"c_S":2,"metric":"resistance",
            "family":{"family":"poisson","lambda":2},"g":{"family":"pow_exp","a":1}}"#;
        let k = serde_json::from_str::<KernelConfig>(text).unwrap().build().unwrap();
        assert_eq!(k.time_kind(), TimeKind::Circular);
        assert_eq!(k.variance(), 1.5);
    }
}
