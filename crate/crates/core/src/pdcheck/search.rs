use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{check_metric, gram_at, min_eig_ratio, sample_time, trial_rng, Configuration, PdError};
use crate::kernels::CovarianceFunction;
use crate::metrics::TimeKind;
use crate::network::{sample_points_with, Network, PointOnNetwork};

fn default_restarts() -> usize {
    4
}

fn default_rel_tol() -> f64 {
    1e-8
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchConfig {
    /// Total number of Gram matrices evaluated, across all restarts.
    pub budget: usize,
    /// Observations per configuration.
    pub n_obs: usize,
    pub seed: u64,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
}

impl SearchConfig {
    pub fn new(budget: usize, n_obs: usize, seed: u64) -> Self {
        Self {
            budget,
            n_obs,
            seed,
            restarts: default_restarts(),
            rel_tol: default_rel_tol(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchResult {
    /// True only when the best configuration, re-evaluated from scratch, has
    /// a ratio at or below `-rel_tol`.
    pub found: bool,
    pub best_min_eig_ratio: f64,
    pub best_config: Configuration,
    pub evaluations: usize,
}

fn perturb_point<R: Rng>(net: &Network, p: PointOnNetwork, rng: &mut R) -> PointOnNetwork {
    if let PointOnNetwork::OnEdge { edge, offset } = p {
        if rng.random_bool(0.5) {
            let len = net.edge(edge).expect("sampled edge exists").length;
            let step = Normal::new(0.0, 0.1 * len).expect("positive scale").sample(rng);
            let o = offset + step;
            if o > 0.0 && o < len {
                return PointOnNetwork::OnEdge { edge, offset: o };
            }
        }
    }
    sample_points_with(net, 1, rng)[0]
}

fn perturb_time<R: Rng>(t: f64, kind: TimeKind, rng: &mut R) -> f64 {
    if rng.random_bool(0.5) {
        return sample_time(rng, kind);
    }
    let t = t + Normal::new(0.0, 0.1).expect("positive scale").sample(rng);
    match kind {
        TimeKind::Linear => t,
        TimeKind::Circular => t.rem_euclid(2.0 * std::f64::consts::PI),
    }
}

fn random_config<R: Rng>(net: &Network, n: usize, kind: TimeKind, rng: &mut R) -> Configuration {
    let points = sample_points_with(net, n, rng);
    let times = (0..n).map(|_| sample_time(rng, kind)).collect();
    Configuration { points, times }
}

fn evaluate<K: CovarianceFunction + ?Sized>(
    k: &K,
    net: &Network,
    c: &Configuration,
) -> Result<f64, PdError> {
    Ok(min_eig_ratio(&gram_at(k, net, c)?))
}

/// Randomized restarts followed by greedy single-observation moves, each
/// accepted only when it lowers the smallest eigenvalue ratio.
///
/// A negative result certifies that `k` is not positive definite on `net`.
/// Not finding one proves nothing.
pub fn counterexample_search<K: CovarianceFunction + ?Sized>(
    k: &K,
    net: &Network,
    cfg: &SearchConfig,
) -> Result<SearchResult, PdError> {
    if cfg.budget == 0 || cfg.n_obs == 0 || cfg.restarts == 0 {
        return Err(PdError::InvalidConfig("budget, n_obs and restarts must be at least 1".into()));
    }
    check_metric(net, k.metric())?;
    let kind = k.time_kind();
    let restarts = cfg.restarts.min(cfg.budget);
    let mut best: Option<(f64, Configuration)> = None;
    let mut used = 0;
    for r in 0..restarts {
        let share = cfg.budget / restarts + usize::from(r < cfg.budget % restarts);
        let mut rng: ChaCha8Rng = trial_rng(cfg.seed, r);
        let mut cur = random_config(net, cfg.n_obs, kind, &mut rng);
        let mut cur_ratio = evaluate(k, net, &cur)?;
        used += 1;
        for _ in 1..share {
            let i = rng.random_range(0..cfg.n_obs);
            let mut cand = cur.clone();
            match rng.random_range(0..3) {
                0 => cand.points[i] = perturb_point(net, cand.points[i], &mut rng),
                1 => cand.times[i] = perturb_time(cand.times[i], kind, &mut rng),
                _ => {
                    cand.points[i] = perturb_point(net, cand.points[i], &mut rng);
                    cand.times[i] = perturb_time(cand.times[i], kind, &mut rng);
                }
            }
            let ratio = evaluate(k, net, &cand)?;
            used += 1;
            if ratio < cur_ratio {
                cur = cand;
                cur_ratio = ratio;
            }
        }
        if best.as_ref().is_none_or(|b| cur_ratio < b.0) {
            best = Some((cur_ratio, cur));
        }
    }
    let (_, config) = best.expect("at least one restart");
    let confirmed = evaluate(k, net, &config)?;
    Ok(SearchResult {
        found: confirmed <= -cfg.rel_tol,
        best_min_eig_ratio: confirmed,
        best_config: config,
        evaluations: used,
    })
}
