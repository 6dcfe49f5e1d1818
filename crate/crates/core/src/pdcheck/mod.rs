//! Empirical positive-definiteness audits.
//!
//! An audit samples space-time configurations on a network, assembles the
//! Gram matrix and records its smallest eigenvalue relative to the largest
//! in magnitude. Passing is evidence, not proof.

mod search;

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kernels::{gram, CovarianceFunction, KernelError};
use crate::metrics::{distance_matrix, MetricError, MetricKind, TimeKind};
use crate::network::{sample_points_with, Network, PointOnNetwork};

pub use search::{counterexample_search, SearchConfig, SearchResult};

/// Largest Gram matrix an audit trial may build.
pub const MAX_GRAM: usize = 500;

#[derive(Debug, Error)]
pub enum PdError {
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("invalid audit configuration: {0}")]
    InvalidConfig(String),
}

fn default_rel_tol() -> f64 {
    1e-8
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditConfig {
    pub n_points: usize,
    pub n_times: usize,
    pub n_trials: usize,
    pub seed: u64,
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
}

impl AuditConfig {
    pub fn new(n_points: usize, n_times: usize, n_trials: usize, seed: u64) -> Self {
        Self {
            n_points,
            n_times,
            n_trials,
            seed,
            rel_tol: default_rel_tol(),
        }
    }

    pub fn validate(&self) -> Result<(), PdError> {
        if self.n_points == 0 || self.n_times == 0 || self.n_trials == 0 {
            return Err(PdError::InvalidConfig(
                "n_points, n_times and n_trials must be at least 1".into(),
            ));
        }
        if self.n_points * self.n_times > MAX_GRAM {
            return Err(PdError::InvalidConfig(format!(
                "n_points * n_times = {} exceeds {MAX_GRAM}",
                self.n_points * self.n_times
            )));
        }
        if !(self.rel_tol >= 0.0) {
            return Err(PdError::InvalidConfig("rel_tol must be nonnegative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

/// Observation locations and times of one Gram matrix, row by row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    pub points: Vec<PointOnNetwork>,
    pub times: Vec<f64>,
}

impl Configuration {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Writes `row,kind,ref_id,offset,time` lines.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        use crate::fmt::fmt_f64;
        writeln!(w, "point_id,kind,ref_id,offset,time")?;
        for (i, (p, t)) in self.points.iter().zip(&self.times).enumerate() {
            match p {
                PointOnNetwork::AtVertex(v) => writeln!(w, "{i},vertex,{v},,{}", fmt_f64(*t))?,
                PointOnNetwork::OnEdge { edge, offset } => {
                    writeln!(w, "{i},edge,{edge},{},{}", fmt_f64(*offset), fmt_f64(*t))?
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub verdict: Verdict,
    pub min_eig_ratio: f64,
    pub worst_trial: usize,
    pub worst_config: Configuration,
    pub n_trials: usize,
    pub matrix_size: usize,
}

/// `λ_min / max |λ|` of a symmetric matrix. Zero matrices give 0.
pub fn min_eig_ratio(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    let eig = m.clone().symmetric_eigenvalues();
    let min = eig.min();
    let scale = eig.amax();
    if scale == 0.0 {
        0.0
    } else {
        min / scale
    }
}

/// Verdict for a matrix supplied directly.
pub fn audit_matrix(m: &DMatrix<f64>, rel_tol: f64) -> (Verdict, f64) {
    let r = min_eig_ratio(m);
    (if r >= -rel_tol { Verdict::Pass } else { Verdict::Fail }, r)
}

/// Gram matrix of `k` at an arbitrary configuration.
pub fn gram_at<K: CovarianceFunction + ?Sized>(
    k: &K,
    net: &Network,
    config: &Configuration,
) -> Result<DMatrix<f64>, PdError> {
    let d = distance_matrix(net, &config.points, k.metric())?;
    Ok(gram(k, &d, &config.times)?)
}

pub(crate) fn sample_time<R: Rng>(rng: &mut R, kind: TimeKind) -> f64 {
    match kind {
        TimeKind::Linear => rng.random_range(0.0..1.0),
        TimeKind::Circular => rng.random_range(0.0..2.0 * PI),
    }
}

pub(crate) fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ trial as u64)
}

/// Checks the metric can be computed on this network before sampling.
pub(crate) fn check_metric(net: &Network, metric: MetricKind) -> Result<(), PdError> {
    if metric == MetricKind::Geodesic {
        let bad = net.check_distance_consistency();
        if !bad.is_empty() {
            return Err(MetricError::InconsistentNetwork { edges: bad }.into());
        }
    }
    Ok(())
}

fn run_trial<K: CovarianceFunction + ?Sized>(
    k: &K,
    net: &Network,
    cfg: &AuditConfig,
    trial: usize,
) -> Result<(f64, Configuration), PdError> {
    let mut rng = trial_rng(cfg.seed, trial);
    let sites = sample_points_with(net, cfg.n_points, &mut rng);
    let stamps: Vec<f64> = (0..cfg.n_times).map(|_| sample_time(&mut rng, k.time_kind())).collect();
    let d = distance_matrix(net, &sites, k.metric())?;
    let mut idx = Vec::with_capacity(sites.len() * stamps.len());
    let mut config = Configuration {
        points: Vec::with_capacity(idx.capacity()),
        times: Vec::with_capacity(idx.capacity()),
    };
    for (i, p) in sites.iter().enumerate() {
        for &t in &stamps {
            idx.push(i);
            config.points.push(*p);
            config.times.push(t);
        }
    }
    let g = gram(k, &d.select(&idx), &config.times)?;
    Ok((min_eig_ratio(&g), config))
}

/// Audits `k` on `net`: every trial draws `n_points` sites and `n_times`
/// time stamps and uses all their combinations. Trials use the seed
/// `seed ^ trial`, so the report does not depend on scheduling.
pub fn audit<K: CovarianceFunction + ?Sized>(
    k: &K,
    net: &Network,
    cfg: &AuditConfig,
) -> Result<AuditReport, PdError> {
    cfg.validate()?;
    check_metric(net, k.metric())?;
    let results: Vec<(f64, Configuration)> = (0..cfg.n_trials)
        .into_par_iter()
        .map(|t| run_trial(k, net, cfg, t))
        .collect::<Result<_, _>>()?;
    let (worst_trial, _) = results
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .0.total_cmp(&b.1 .0).then(a.0.cmp(&b.0)))
        .expect("at least one trial");
    let (ratio, config) = results.into_iter().nth(worst_trial).expect("index in range");
    Ok(AuditReport {
        verdict: if ratio >= -cfg.rel_tol { Verdict::Pass } else { Verdict::Fail },
        min_eig_ratio: ratio,
        worst_trial,
        worst_config: config,
        n_trials: cfg.n_trials,
        matrix_size: cfg.n_points * cfg.n_times,
    })
}

/// `k(d, u) = 1 - d`, which is not a covariance once distances exceed 2.
/// Used to check that the audit can fail.
#[derive(Debug, Clone, Copy)]
pub struct OneMinusDistance {
    pub metric: MetricKind,
}

impl CovarianceFunction for OneMinusDistance {
    fn metric(&self) -> MetricKind {
        self.metric
    }

    fn time_kind(&self) -> TimeKind {
        TimeKind::Linear
    }

    fn cov(&self, d: f64, _u: f64) -> f64 {
        1.0 - d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{model_t, Kernel, KernelSpec};
    use crate::network::{build_network, generate, Edge, GenerateSpec, Vertex};

    fn path3() -> Network {
        build_network(
            (0..2).map(Vertex::new).collect(),
            vec![Edge::new(0, 0, 1, 3.0)],
        )
        .unwrap()
    }

    #[test]
    fn two_by_two_self_test() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, -1.5, -1.5, 1.0]);
        let (v, r) = audit_matrix(&m, 1e-8);
        assert_eq!(v, Verdict::Fail);
        assert!((r + 0.2).abs() < 1e-14);
    }

    #[test]
    fn one_minus_distance_fails() {
        let net = path3();
        let cfg = Configuration {
            points: vec![net.vertex_point(0).unwrap(), net.vertex_point(1).unwrap()],
            times: vec![0.0, 0.0],
        };
        let g = gram_at(&OneMinusDistance { metric: MetricKind::Geodesic }, &net, &cfg).unwrap();
        let eig = g.symmetric_eigenvalues();
        assert!((eig.min() + 1.0).abs() < 1e-14);
        assert!((min_eig_ratio(&g) + 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn model_t_on_tree_passes_and_is_deterministic() {
        let net = generate(&GenerateSpec::RandomTree { n: 20, min_length: 0.5, max_length: 2.0 }, 7).unwrap();
        let k = model_t(1.0, 3.0, 0.3);
        let cfg = AuditConfig::new(20, 3, 4, 11);
        let a = audit(&k, &net, &cfg).unwrap();
        assert_eq!(a.verdict, Verdict::Pass);
        assert_eq!(a.worst_config.len(), 60);
        let b = audit(&k, &net, &cfg).unwrap();
        assert_eq!(a, b);
        let scaled = audit(&Kernel::from(k).scaled(17.0), &net, &cfg).unwrap();
        assert_eq!(scaled.verdict, a.verdict);
        assert!((scaled.min_eig_ratio - a.min_eig_ratio).abs() < 1e-9);
    }

    #[test]
    fn rejects_oversized_configs() {
        let net = path3();
        let k: KernelSpec = model_t(1.0, 1.0, 1.0);
        assert!(matches!(
            audit(&k, &net, &AuditConfig::new(300, 2, 1, 0)),
            Err(PdError::InvalidConfig(_))
        ));
        assert!(audit(&k, &net, &AuditConfig::new(3, 2, 0, 0)).is_err());
    }
}
