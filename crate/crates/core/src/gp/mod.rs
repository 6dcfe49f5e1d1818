//! Gaussian random fields on network × time designs: covariance assembly,
//! simulation, exact likelihood, maximum-likelihood fitting and the
//! model-selection study.

mod chol;
mod fit;
pub mod optim;
mod study;

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use crate::kernels::{CovarianceFunction, Kernel, KernelError};
use crate::metrics::{distance_matrix, temporal_separation, DistanceMatrix, MetricError, MetricKind, TimeKind};
use crate::network::{Network, NetworkError, PointOnNetwork};

pub use fit::{default_init, fit, fit_lags, Bounds, FitOptions, FitResult, Params};
pub use study::{
    run_sim_study, ExperimentReport, ModelSummary, NetworkSource, OptimizerSettings, ReplicateResult, StudyConfig, TrueParams,
};

#[derive(Debug, Error)]
pub enum GpError {
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error("covariance matrix is not positive definite (pivot {column})")]
    NotPositiveDefinite { column: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// Observation sites and times on one network.
#[derive(Debug, Clone)]
pub struct SpaceTimeDesign<'a> {
    pub network: &'a Network,
    pub points: Vec<PointOnNetwork>,
    pub times: Vec<f64>,
    pub time_kind: TimeKind,
}

impl<'a> SpaceTimeDesign<'a> {
    pub fn new(
        network: &'a Network,
        points: Vec<PointOnNetwork>,
        times: Vec<f64>,
        time_kind: TimeKind,
    ) -> Result<Self, GpError> {
        if points.len() != times.len() {
            return Err(GpError::InvalidInput(format!(
                "{} points but {} times",
                points.len(),
                times.len()
            )));
        }
        for &t in &times {
            let ok = match time_kind {
                TimeKind::Linear => t.is_finite(),
                TimeKind::Circular => (0.0..2.0 * PI).contains(&t),
            };
            if !ok {
                return Err(GpError::InvalidInput(format!("time {t} out of range for {time_kind:?} time")));
            }
        }
        for p in &points {
            network.validate_point(p)?;
        }
        Ok(Self {
            network,
            points,
            times,
            time_kind,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Pairwise lags under `metric`.
    pub fn lags(&self, metric: MetricKind) -> Result<Lags, GpError> {
        let d = distance_matrix(self.network, &self.points, metric)?;
        let idx: Vec<usize> = (0..self.len()).collect();
        Ok(Lags::new(&d, &idx, &self.times, self.time_kind))
    }
}

/// Lower-triangle spatial and temporal lags of a design, column by column.
#[derive(Debug, Clone)]
pub struct Lags {
    n: usize,
    metric: MetricKind,
    time_kind: TimeKind,
    d: Vec<f64>,
    u: Vec<f64>,
}

impl Lags {
    /// Observation `i` sits at row `site[i]` of `sites` and at `times[i]`.
    pub fn new(sites: &DistanceMatrix, site: &[usize], times: &[f64], time_kind: TimeKind) -> Self {
        assert_eq!(site.len(), times.len());
        let n = site.len();
        let mut d = Vec::with_capacity(n * (n + 1) / 2);
        let mut u = Vec::with_capacity(d.capacity());
        for j in 0..n {
            for i in j..n {
                d.push(sites.get(site[i], site[j]));
                u.push(temporal_separation(times[i], times[j], time_kind));
            }
        }
        Self {
            n,
            metric: sites.metric(),
            time_kind,
            d,
            u,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn metric(&self) -> MetricKind {
        self.metric
    }

    fn check<K: CovarianceFunction + ?Sized>(&self, k: &K) -> Result<(), GpError> {
        if k.metric() != self.metric {
            return Err(KernelError::MetricMismatch {
                expected: k.metric().name(),
                found: self.metric.name(),
            }
            .into());
        }
        if k.time_kind() != self.time_kind {
            return Err(GpError::InvalidInput(format!(
                "kernel uses {:?} time but the design uses {:?} time",
                k.time_kind(),
                self.time_kind
            )));
        }
        Ok(())
    }

    /// Writes `Σ + nugget I` into the lower triangle of the column-major
    /// buffer `a` (length `n²`).
    fn fill<K: CovarianceFunction + ?Sized>(&self, k: &K, nugget: f64, a: &mut [f64]) {
        let n = self.n;
        let mut p = 0;
        for j in 0..n {
            let col = &mut a[j * n + j..(j + 1) * n];
            let len = n - j;
            for (c, (d, u)) in col.iter_mut().zip(self.d[p..p + len].iter().zip(&self.u[p..p + len])) {
                *c = k.cov(*d, *u);
            }
            col[0] += nugget;
            p += len;
        }
    }

    /// Lower Cholesky factor of `Σ + nugget I`, column-major.
    fn factor<K: CovarianceFunction + ?Sized>(&self, k: &K, nugget: f64, buf: &mut Vec<f64>) -> Result<(), GpError> {
        self.check(k)?;
        buf.resize(self.n * self.n, 0.0);
        self.fill(k, nugget, buf);
        chol::factor(buf, self.n).map_err(|e| GpError::NotPositiveDefinite { column: e.column })
    }

    /// Zero-mean Gaussian log-density of `y`. `buf` is scratch space reused
    /// across calls.
    pub fn loglik<K: CovarianceFunction + ?Sized>(
        &self,
        k: &K,
        nugget: f64,
        y: &[f64],
        buf: &mut Vec<f64>,
    ) -> Result<f64, GpError> {
        if y.len() != self.n {
            return Err(GpError::InvalidInput(format!("{} observations for {} design rows", y.len(), self.n)));
        }
        self.factor(k, nugget, buf)?;
        let mut z = y.to_vec();
        chol::forward_solve(buf, self.n, &mut z);
        let quad: f64 = z.iter().map(|v| v * v).sum();
        let n = self.n as f64;
        Ok(-0.5 * (n * (2.0 * PI).ln() + 2.0 * chol::log_det_half(buf, self.n) + quad))
    }

    /// Dense `Σ + nugget I`.
    pub fn covariance<K: CovarianceFunction + ?Sized>(&self, k: &K, nugget: f64) -> Result<DMatrix<f64>, GpError> {
        self.check(k)?;
        let n = self.n;
        let mut a = vec![0.0; n * n];
        self.fill(k, nugget, &mut a);
        let mut m = DMatrix::from_vec(n, n, a);
        m.fill_upper_triangle_with_lower_triangle();
        Ok(m)
    }

    /// Draws `y = L z` with `z` standard normal from `rng`, retrying once with
    /// jitter `1e-10 · trace / n` if the factorization fails.
    pub(crate) fn draw<K: CovarianceFunction + ?Sized>(
        &self,
        k: &K,
        nugget: f64,
        rngs: impl Iterator<Item = ChaCha8Rng>,
    ) -> Result<Vec<Vec<f64>>, GpError> {
        let n = self.n;
        let mut buf = Vec::new();
        if self.factor(k, nugget, &mut buf).is_err() {
            let cov = self.covariance(k, nugget)?;
            let jitter = 1e-10 * cov.trace() / n.max(1) as f64;
            self.factor(k, nugget + jitter, &mut buf)?;
        }
        Ok(rngs
            .map(|mut rng| {
                let z: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
                chol::lower_mul(&buf, n, &z)
            })
            .collect())
    }
}

/// True model, nugget and seed for simulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimSpec {
    pub kernel: Kernel,
    pub nugget: f64,
    pub seed: u64,
}

fn check_nugget(nugget: f64) -> Result<(), GpError> {
    if nugget >= 0.0 && nugget.is_finite() {
        Ok(())
    } else {
        Err(GpError::InvalidInput(format!("nugget must be nonnegative, got {nugget}")))
    }
}

/// `Σ + nugget I` for the design.
pub fn covariance_matrix<K: CovarianceFunction + ?Sized>(
    design: &SpaceTimeDesign,
    kernel: &K,
    nugget: f64,
) -> Result<DMatrix<f64>, GpError> {
    check_nugget(nugget)?;
    design.lags(kernel.metric())?.covariance(kernel, nugget)
}

/// `n_reps` draws from `N(0, Σ + τ² I)`, one per row. Draw `r` uses the
/// ChaCha stream `r` of the seed, so it does not depend on `n_reps`.
pub fn simulate(design: &SpaceTimeDesign, sim: &SimSpec, n_reps: usize) -> Result<DMatrix<f64>, GpError> {
    check_nugget(sim.nugget)?;
    sim.kernel.validate()?;
    let lags = design.lags(sim.kernel.metric())?;
    let draws = lags.draw(&sim.kernel, sim.nugget, (0..n_reps).map(|r| stream_rng(sim.seed, r as u64)))?;
    Ok(DMatrix::from_fn(n_reps, design.len(), |r, i| draws[r][i]))
}

pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Exact log-likelihood `-½ (n ln 2π + ln det(Σ + τ² I) + yᵀ (Σ + τ² I)⁻¹ y)`.
pub fn loglik<K: CovarianceFunction + ?Sized>(
    design: &SpaceTimeDesign,
    kernel: &K,
    nugget: f64,
    y: &[f64],
) -> Result<f64, GpError> {
    check_nugget(nugget)?;
    design.lags(kernel.metric())?.loglik(kernel, nugget, y, &mut Vec::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{gram, model_t, CovarianceFunction};
    use crate::network::{build_network, generate, Edge, GenerateSpec, Vertex};

    /// Returns a fixed covariance regardless of the lags.
    struct Constant(f64);

    impl CovarianceFunction for Constant {
        fn metric(&self) -> MetricKind {
            MetricKind::Geodesic
        }
        fn time_kind(&self) -> TimeKind {
            TimeKind::Linear
        }
        fn cov(&self, d: f64, u: f64) -> f64 {
            if d == 0.0 && u == 0.0 {
                self.0
            } else {
                0.0
            }
        }
    }

    fn edge() -> Network {
        build_network(vec![Vertex::new(0), Vertex::new(1)], vec![Edge::new(0, 0, 1, 2.0)]).unwrap()
    }

    #[test]
    fn single_point_covariance() {
        let net = edge();
        let design = SpaceTimeDesign::new(&net, vec![net.point(0, 1.0).unwrap()], vec![0.5], TimeKind::Linear).unwrap();
        let k = model_t(0.9, 1.0, 1.0);
        let c = covariance_matrix(&design, &k, 0.1).unwrap();
        assert_eq!(c.shape(), (1, 1));
        assert!((c[(0, 0)] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_nugget_matches_gram() {
        let net = generate(&GenerateSpec::RandomTree { n: 8, min_length: 0.5, max_length: 2.0 }, 1).unwrap();
        let pts = crate::network::sample_points(&net, 5, 2);
        let times = vec![0.1, 0.5, 0.2, 0.9, 0.4];
        let design = SpaceTimeDesign::new(&net, pts.clone(), times.clone(), TimeKind::Linear).unwrap();
        let k = model_t(1.3, 2.0, 0.4);
        let c = covariance_matrix(&design, &k, 0.0).unwrap();
        let d = distance_matrix(&net, &pts, MetricKind::Geodesic).unwrap();
        let g = gram(&k, &d, &times).unwrap();
        assert_eq!(c, g);
        for i in 0..5 {
            for j in 0..5 {
                let want = k.value(d.get(i, j), (times[i] - times[j]).abs());
                assert_eq!(c[(i, j)], want);
            }
        }
    }

    #[test]
    fn loglik_closed_forms() {
        let net = edge();
        let one = SpaceTimeDesign::new(&net, vec![net.vertex_point(0).unwrap()], vec![0.0], TimeKind::Linear).unwrap();
        let k = Constant(1.0);
        assert!((loglik(&one, &k, 0.0, &[0.0]).unwrap() + 0.91893853320467274178).abs() < 1e-15);
        assert!((loglik(&one, &k, 0.0, &[1.0]).unwrap() + 1.4189385332046727418).abs() < 1e-15);

        // Σ + τ² I = [[1.1, 0.5], [0.5, 1.1]] via model T with chosen scales.
        let two = SpaceTimeDesign::new(
            &net,
            vec![net.vertex_point(0).unwrap(), net.vertex_point(1).unwrap()],
            vec![0.0, 0.0],
            TimeKind::Linear,
        )
        .unwrap();
        // (1 + 2/c)^-2 = 0.5  =>  c = 2 / (√2 - 1)
        let k = model_t(1.0, 2.0 / (2f64.sqrt() - 1.0), 1.0);
        let c = covariance_matrix(&two, &k, 0.1).unwrap();
        assert!((c[(0, 1)] - 0.5).abs() < 1e-15);
        let ll = loglik(&two, &k, 0.1, &[1.0, -1.0]).unwrap();
        assert!((ll + 3.4841327358158845855).abs() < 1e-13, "{ll}");
    }

    #[test]
    fn loglik_is_permutation_invariant() {
        let net = generate(&GenerateSpec::RandomTree { n: 10, min_length: 0.5, max_length: 2.0 }, 3).unwrap();
        let pts = crate::network::sample_points(&net, 6, 4);
        let times = vec![0.1, 0.5, 0.2, 0.9, 0.4, 0.7];
        let y = [0.3, -1.2, 0.8, 0.05, -0.4, 1.1];
        let k = model_t(1.0, 3.0, 0.3);
        let a = loglik(&SpaceTimeDesign::new(&net, pts.clone(), times.clone(), TimeKind::Linear).unwrap(), &k, 0.1, &y)
            .unwrap();
        let perm = [3, 0, 5, 1, 4, 2];
        let d = SpaceTimeDesign::new(
            &net,
            perm.iter().map(|&i| pts[i]).collect(),
            perm.iter().map(|&i| times[i]).collect(),
            TimeKind::Linear,
        )
        .unwrap();
        let yp: Vec<f64> = perm.iter().map(|&i| y[i]).collect();
        let b = loglik(&d, &k, 0.1, &yp).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn simulate_identity_moments() {
        let net = edge();
        let pts = vec![net.vertex_point(0).unwrap(), net.vertex_point(1).unwrap(), net.point(0, 1.0).unwrap()];
        let design = SpaceTimeDesign::new(&net, pts, vec![0.0; 3], TimeKind::Linear).unwrap();
        let lags = design.lags(MetricKind::Geodesic).unwrap();
        let reps = 10_000;
        let draws = lags
            .draw(&Constant(0.0), 1.0, (0..reps).map(|r| stream_rng(5, r as u64)))
            .unwrap();
        for i in 0..3 {
            let var: f64 = draws.iter().map(|d| d[i] * d[i]).sum::<f64>() / reps as f64;
            assert!((var - 1.0).abs() < 0.05, "{var}");
        }
    }

    #[test]
    fn simulate_matches_covariance_and_is_deterministic() {
        let net = generate(&GenerateSpec::RandomTree { n: 10, min_length: 0.5, max_length: 2.0 }, 3).unwrap();
        let pts = crate::network::sample_points(&net, 4, 4);
        let design = SpaceTimeDesign::new(&net, pts, vec![0.1, 0.5, 0.2, 0.9], TimeKind::Linear).unwrap();
        let sim = SimSpec {
            kernel: model_t(1.0, 3.0, 0.3).into(),
            nugget: 0.1,
            seed: 42,
        };
        let reps = 10_000;
        let draws = simulate(&design, &sim, reps).unwrap();
        assert_eq!(draws, simulate(&design, &sim, reps).unwrap());
        let cov = covariance_matrix(&design, &sim.kernel, 0.1).unwrap();
        let emp = draws.transpose() * &draws / reps as f64;
        let max_diag = cov.diagonal().max();
        let bound = 5.0 * max_diag / (reps as f64).sqrt();
        assert!((emp - &cov).amax() <= bound);
    }

    #[test]
    fn rejects_mismatched_inputs() {
        let net = edge();
        let p = vec![net.vertex_point(0).unwrap()];
        assert!(SpaceTimeDesign::new(&net, p.clone(), vec![], TimeKind::Linear).is_err());
        assert!(SpaceTimeDesign::new(&net, p.clone(), vec![7.0], TimeKind::Circular).is_err());
        let d = SpaceTimeDesign::new(&net, p, vec![0.0], TimeKind::Linear).unwrap();
        assert!(loglik(&d, &model_t(1.0, 1.0, 1.0), 0.1, &[1.0, 2.0]).is_err());
        assert!(loglik(&d, &model_t(1.0, 1.0, 1.0), -0.1, &[1.0]).is_err());
    }
}
