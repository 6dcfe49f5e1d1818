//! Sufficient conditions for positive definiteness, encoded as rules.
//!
//! The checker never proves anything. It reports `Valid` only when a known
//! sufficient condition applies, `Invalid` when a known necessary condition
//! fails, and `Unknown` otherwise.

use std::fmt;

use serde::Serialize;

use super::{CircularFamily, CircularSpec, KernelSpec, SpatialFamily};
use crate::metrics::{MetricKind, TimeKind};
use crate::network::TopologyClass;

/// The sufficient condition behind a `Valid` verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ValidityRule {
    /// Stieltjes `φ`, Bernstein `ψ`, `α ≥ 1`, `β ∈ (0, 1]`, resistance
    /// metric, linear time.
    ResistanceLinear,
    /// As above with circular time and `ψ` restricted to `[0, π]`.
    ResistanceCircular,
    /// As above with the geodesic metric on a tree or a 1-sum of cycles and
    /// trees.
    GeodesicOneSum,
    /// Askey `φ` on a tree with enough smoothness for its leaf count.
    AskeyTree,
    /// `β ∈ [-1, 0)`: completely monotone `φ`, Bernstein `ψ`, on a tree with
    /// `α ≥ 2ℓ + 1` for `ℓ` leaves.
    Multiplicative,
    /// Circular-time cosine series with positive definite coefficients.
    HalfSpectral,
}

impl ValidityRule {
    pub fn citation(&self) -> &'static str {
        match self {
            ValidityRule::ResistanceLinear => {
                "stieltjes phi, bernstein psi, alpha >= 1, beta in (0,1]; resistance metric, linear time"
            }
            ValidityRule::ResistanceCircular => {
                "stieltjes phi, bernstein psi on [0,pi], alpha >= 1, beta in (0,1]; resistance metric, circular time"
            }
            ValidityRule::GeodesicOneSum => {
                "stieltjes phi, bernstein psi, alpha >= 1, beta in (0,1]; geodesic metric on a 1-sum of cycles and trees"
            }
            ValidityRule::AskeyTree => {
                "askey phi with nu >= 4*leaves - 1, alpha >= nu + 1, beta in [0,1]; euclidean tree"
            }
            ValidityRule::Multiplicative => {
                "completely monotone phi, bernstein psi, alpha >= 2 * leaves + 1, beta in [-1,0); euclidean tree"
            }
            ValidityRule::HalfSpectral => {
                "cosine series in circular time with completely monotone inner correlation"
            }
        }
    }
}

impl fmt::Display for ValidityRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.citation())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ValidityVerdict {
    Valid {
        rule: ValidityRule,
        citation: &'static str,
        #[serde(skip_serializing_if = "Option::is_none")]
        note: Option<String>,
    },
    Invalid {
        reason: String,
    },
    Unknown {
        reason: String,
    },
}

impl ValidityVerdict {
    fn valid(rule: ValidityRule) -> Self {
        ValidityVerdict::Valid {
            rule,
            citation: rule.citation(),
            note: None,
        }
    }

    fn invalid(reason: impl Into<String>) -> Self {
        ValidityVerdict::Invalid { reason: reason.into() }
    }

    fn unknown(reason: impl Into<String>) -> Self {
        ValidityVerdict::Unknown { reason: reason.into() }
    }

    pub fn is_valid(&self) -> bool {
        matches!(self, ValidityVerdict::Valid { .. })
    }

    pub fn is_invalid(&self) -> bool {
        matches!(self, ValidityVerdict::Invalid { .. })
    }

    pub fn rule(&self) -> Option<ValidityRule> {
        match self {
            ValidityVerdict::Valid { rule, .. } => Some(*rule),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            ValidityVerdict::Valid { .. } => "valid",
            ValidityVerdict::Invalid { .. } => "invalid",
            ValidityVerdict::Unknown { .. } => "unknown",
        }
    }
}

impl fmt::Display for ValidityVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidityVerdict::Valid { rule, note, .. } => {
                write!(f, "valid ({rule})")?;
                if let Some(n) = note {
                    write!(f, "; note: {n}")?;
                }
                Ok(())
            }
            ValidityVerdict::Invalid { reason } => write!(f, "invalid: {reason}"),
            ValidityVerdict::Unknown { reason } => write!(f, "unknown: {reason}"),
        }
    }
}

/// Smallest Askey exponent accepted on a tree with `leaves` leaves.
pub fn askey_nu_bound(leaves: usize) -> f64 {
    4.0 * leaves as f64 - 1.0
}

/// Smallest `α` accepted for the multiplicative form on a tree with `leaves`
/// leaves.
pub fn multiplicative_alpha_bound(leaves: usize) -> f64 {
    2.0 * leaves as f64 + 1.0
}

fn one_sum(topo: &TopologyClass) -> bool {
    !matches!(topo, TopologyClass::General)
}

pub fn check_validity(spec: &KernelSpec, topo: &TopologyClass) -> ValidityVerdict {
    if spec.metric == MetricKind::AmbientEuclidean {
        return ValidityVerdict::unknown("no sufficient condition covers the ambient euclidean metric on a network");
    }
    if let Err(e) = spec.validate() {
        return ValidityVerdict::invalid(e.to_string());
    }
    let (alpha, beta) = (spec.alpha, spec.beta);

    if let SpatialFamily::Askey { nu } = spec.phi {
        return askey_rule(spec, topo, nu);
    }
    if beta > 1.0 {
        return ValidityVerdict::unknown(format!("beta = {beta} exceeds 1"));
    }
    if beta == 0.0 {
        return ValidityVerdict::unknown("separable case is only covered for the askey family");
    }
    if beta > 0.0 {
        if let SpatialFamily::Matern { nu } = spec.phi {
            if nu > 0.5 {
                return ValidityVerdict::invalid(format!(
                    "matern nu = {nu}: restricted to (0, 1/2] for network distances"
                ));
            }
        }
        if !spec.phi.is_stieltjes() {
            return ValidityVerdict::unknown(format!(
                "{} with these parameters is not on the stieltjes list",
                spec.phi.name()
            ));
        }
        if !spec.psi.is_bernstein() {
            return ValidityVerdict::unknown(format!(
                "{} psi with these parameters is not on the bernstein list",
                spec.psi.name()
            ));
        }
        if alpha < 1.0 {
            return ValidityVerdict::unknown(format!("alpha = {alpha} is below 1"));
        }
        return match spec.metric {
            MetricKind::Resistance => ValidityVerdict::valid(match spec.time_kind {
                TimeKind::Linear => ValidityRule::ResistanceLinear,
                TimeKind::Circular => ValidityRule::ResistanceCircular,
            }),
            _ if one_sum(topo) => ValidityVerdict::valid(ValidityRule::GeodesicOneSum),
            _ => ValidityVerdict::invalid(
                "geodesic metric needs a tree or a 1-sum of cycles and trees; \
                 this graph has a block that is neither an edge nor a cycle",
            ),
        };
    }
    if beta < -1.0 {
        return ValidityVerdict::unknown(format!("beta = {beta} is below -1"));
    }
    if !spec.phi.is_completely_monotone() {
        return ValidityVerdict::unknown(format!(
            "{} with these parameters is not completely monotone",
            spec.phi.name()
        ));
    }
    if !spec.psi.is_bernstein() {
        return ValidityVerdict::unknown(format!(
            "{} psi with these parameters is not on the bernstein list",
            spec.psi.name()
        ));
    }
    let TopologyClass::EuclideanTree { leaf_count } = *topo else {
        return ValidityVerdict::unknown("multiplicative form is only covered on euclidean trees");
    };
    let bound = multiplicative_alpha_bound(leaf_count);
    if alpha < bound {
        return ValidityVerdict::unknown(format!(
            "alpha = {alpha} is below {bound} for a tree with {leaf_count} leaves"
        ));
    }
    ValidityVerdict::Valid {
        rule: ValidityRule::Multiplicative,
        citation: ValidityRule::Multiplicative.citation(),
        note: Some(format!(
            "alpha >= 2 * leaves + 1 = {bound}; alpha = 1 is not positive definite on branching trees"
        )),
    }
}

fn askey_rule(spec: &KernelSpec, topo: &TopologyClass, nu: f64) -> ValidityVerdict {
    let TopologyClass::EuclideanTree { leaf_count } = *topo else {
        return ValidityVerdict::unknown("askey kernels are only covered on euclidean trees");
    };
    if !(0.0..=1.0).contains(&spec.beta) {
        return ValidityVerdict::unknown(format!("askey model needs beta in [0, 1], got {}", spec.beta));
    }
    let bound = askey_nu_bound(leaf_count);
    if nu < bound {
        return ValidityVerdict::invalid(format!(
            "askey nu = {nu} is below the bound {bound} for a tree with {leaf_count} leaves"
        ));
    }
    if spec.alpha < nu + 1.0 {
        return ValidityVerdict::unknown(format!("alpha = {} is below nu + 1 = {}", spec.alpha, nu + 1.0));
    }
    if !spec.psi.is_bernstein() {
        return ValidityVerdict::unknown(format!(
            "{} psi with these parameters is not on the bernstein list",
            spec.psi.name()
        ));
    }
    ValidityVerdict::valid(ValidityRule::AskeyTree)
}

pub fn check_circular_validity(spec: &CircularSpec, topo: &TopologyClass) -> ValidityVerdict {
    if let Err(e) = spec.validate() {
        return ValidityVerdict::invalid(e.to_string());
    }
    if let CircularFamily::AdaptedMultiquadric { .. } = spec.family {
        return ValidityVerdict::unknown(
            "adapted multiquadric needs 2g/(1+g^2) to be positive definite, which is not checked",
        );
    }
    match spec.metric {
        MetricKind::Resistance => ValidityVerdict::valid(ValidityRule::HalfSpectral),
        MetricKind::Geodesic if one_sum(topo) => ValidityVerdict::valid(ValidityRule::HalfSpectral),
        MetricKind::Geodesic => {
            ValidityVerdict::unknown("geodesic inner correlation on a general graph")
        }
        MetricKind::AmbientEuclidean => {
            ValidityVerdict::unknown("no sufficient condition covers the ambient euclidean metric on a network")
        }
    }
}
