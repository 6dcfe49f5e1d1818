//! Desk-scale model-selection study: simulate from the true model on a
//! fixed set of sites, fit every candidate by maximum likelihood and tally
//! which one wins.

use std::io::Write;
use std::path::PathBuf;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fit::default_init;
use super::{fit_lags, stream_rng, Bounds, FitOptions, FitResult, GpError, Lags, Params};
use crate::fmt::fmt_f64;
use crate::kernels::{model_t, ModelFamily};
use crate::metrics::{distance_matrix, MetricKind, TimeKind};
use crate::network::{generate, io::read_network, sample_points_with, GenerateSpec, Network, PointOnNetwork};

/// Loglik differences at or below this count as ties.
pub const TIE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum NetworkSource {
    Generate(GenerateSpec),
    File(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrueParams {
    pub sigma2: f64,
    #[serde(rename = "c_S")]
    pub c_s: f64,
    #[serde(rename = "c_T")]
    pub c_t: f64,
    pub nugget: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizerSettings {
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_starts")]
    pub starts: usize,
}

fn default_max_iter() -> usize {
    FitOptions::default().max_iter
}
fn default_tol() -> f64 {
    FitOptions::default().tol
}
fn default_starts() -> usize {
    FitOptions::default().starts
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self {
            max_iter: default_max_iter(),
            tol: default_tol(),
            starts: default_starts(),
        }
    }
}

fn all_models() -> Vec<ModelFamily> {
    vec![ModelFamily::T, ModelFamily::C1, ModelFamily::C2]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    pub network: NetworkSource,
    pub n_sites: usize,
    pub times_per_site: usize,
    #[serde(rename = "true")]
    pub truth: TrueParams,
    pub n_replicates: usize,
    #[serde(default = "all_models")]
    pub models: Vec<ModelFamily>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Draw the observation times once and reuse them in every replicate.
    #[serde(default)]
    pub fix_times: bool,
    #[serde(default)]
    pub optimizer: OptimizerSettings,
}

impl StudyConfig {
    pub fn validate(&self) -> Result<(), GpError> {
        let bad = |m: &str| Err(GpError::InvalidInput(m.to_string()));
        if self.n_sites == 0 || self.times_per_site == 0 || self.n_replicates == 0 {
            return bad("n_sites, times_per_site and n_replicates must be at least 1");
        }
        if self.models.is_empty() {
            return bad("models must not be empty");
        }
        for (i, m) in self.models.iter().enumerate() {
            if self.models[..i].contains(m) {
                return bad("models must not repeat");
            }
        }
        let t = &self.truth;
        if !(t.sigma2 > 0.0 && t.c_s > 0.0 && t.c_t > 0.0 && t.nugget >= 0.0) {
            return bad("true sigma2, c_S, c_T must be positive and nugget nonnegative");
        }
        if self.optimizer.starts == 0 {
            return bad("optimizer.starts must be at least 1");
        }
        Ok(())
    }

    pub fn load_network(&self) -> Result<Network, GpError> {
        match &self.network {
            NetworkSource::Generate(spec) => Ok(generate(spec, self.seed.unwrap_or(0))?),
            NetworkSource::File(path) => read_network(path).map_err(|e| GpError::InvalidInput(e.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicateResult {
    pub replicate: usize,
    /// One fit per configured model, in order.
    pub fits: Vec<FitResult>,
    /// Index into the model list.
    pub winner: usize,
    pub tie: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelSummary {
    pub model: ModelFamily,
    pub wins: usize,
    pub win_proportion: f64,
    /// Wins decided by the tie-break.
    pub ties: usize,
    pub mae: Params,
    pub rmse: Params,
    pub median: Params,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub models: Vec<ModelFamily>,
    pub truth: TrueParams,
    pub seed: u64,
    pub diameter: f64,
    pub replicates: Vec<ReplicateResult>,
    pub summary: Vec<ModelSummary>,
}

impl ExperimentReport {
    pub fn summary_for(&self, m: ModelFamily) -> Option<&ModelSummary> {
        self.summary.iter().find(|s| s.model == m)
    }

    pub fn write_replicates_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "replicate,model,loglik,sigma2,c_S,c_T,iterations,converged,winner")?;
        for r in &self.replicates {
            for (i, (m, f)) in self.models.iter().zip(&r.fits).enumerate() {
                writeln!(
                    w,
                    "{},{},{},{},{},{},{},{},{}",
                    r.replicate,
                    m.name(),
                    fmt_f64(f.loglik),
                    fmt_f64(f.estimates.sigma2),
                    fmt_f64(f.estimates.c_s),
                    fmt_f64(f.estimates.c_t),
                    f.iterations,
                    f.converged,
                    i == r.winner
                )?;
            }
        }
        Ok(())
    }

    pub fn write_summary_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(
            w,
            "model,wins,win_proportion,ties,mae_sigma2,mae_c_S,mae_c_T,rmse_sigma2,rmse_c_S,rmse_c_T,\
             median_sigma2,median_c_S,median_c_T"
        )?;
        for s in &self.summary {
            let cells: Vec<String> = [s.mae, s.rmse, s.median]
                .iter()
                .flat_map(|p| p.as_array())
                .map(fmt_f64)
                .collect();
            writeln!(
                w,
                "{},{},{},{},{}",
                s.model.name(),
                s.wins,
                fmt_f64(s.win_proportion),
                s.ties,
                cells.join(",")
            )?;
        }
        Ok(())
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn summarize(models: &[ModelFamily], truth: &TrueParams, reps: &[ReplicateResult]) -> Vec<ModelSummary> {
    let n = reps.len() as f64;
    let target = [truth.sigma2, truth.c_s, truth.c_t];
    models
        .iter()
        .enumerate()
        .map(|(m, &model)| {
            let wins = reps.iter().filter(|r| r.winner == m).count();
            let ties = reps.iter().filter(|r| r.winner == m && r.tie).count();
            let mut mae = [0.0; 3];
            let mut mse = [0.0; 3];
            let mut cols: [Vec<f64>; 3] = Default::default();
            for r in reps {
                let est = r.fits[m].estimates.as_array();
                for k in 0..3 {
                    let e = est[k] - target[k];
                    mae[k] += e.abs() / n;
                    mse[k] += e * e / n;
                    cols[k].push(est[k]);
                }
            }
            let [c0, c1, c2] = cols;
            ModelSummary {
                model,
                wins,
                win_proportion: wins as f64 / n,
                ties,
                mae: Params::from_array(mae),
                rmse: Params::from_array(mse.map(f64::sqrt)),
                median: Params {
                    sigma2: median(c0),
                    c_s: median(c1),
                    c_t: median(c2),
                },
            }
        })
        .collect()
}

impl Params {
    fn from_array(a: [f64; 3]) -> Self {
        Self {
            sigma2: a[0],
            c_s: a[1],
            c_t: a[2],
        }
    }
}

struct Setup {
    sites: Vec<PointOnNetwork>,
    fixed_times: Option<Vec<f64>>,
    geodesic: crate::metrics::DistanceMatrix,
    euclidean: Option<crate::metrics::DistanceMatrix>,
    diameter: f64,
}

fn draw_times<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(0.0..1.0)).collect()
}

fn run_replicate(cfg: &StudyConfig, seed: u64, setup: &Setup, r: usize) -> Result<ReplicateResult, GpError> {
    let mut rng = stream_rng(seed, r as u64 + 1);
    let n = cfg.n_sites * cfg.times_per_site;
    let times = match &setup.fixed_times {
        Some(t) => t.clone(),
        None => draw_times(&mut rng, n),
    };
    let site: Vec<usize> = (0..n).map(|i| i / cfg.times_per_site).collect();
    let geo = Lags::new(&setup.geodesic, &site, &times, TimeKind::Linear);
    let euc = setup
        .euclidean
        .as_ref()
        .map(|d| Lags::new(d, &site, &times, TimeKind::Linear));
    let t = &cfg.truth;
    let truth = model_t(t.sigma2, t.c_s, t.c_t);
    let y = geo.draw(&truth, t.nugget, std::iter::once(rng))?.pop().expect("one draw");

    let opts = FitOptions {
        nugget: t.nugget,
        max_iter: cfg.optimizer.max_iter,
        tol: cfg.optimizer.tol,
        starts: cfg.optimizer.starts,
    };
    let init = default_init(&y, &times, t.nugget, setup.diameter);
    let bounds = Bounds::for_diameter(setup.diameter);
    let fits = cfg
        .models
        .iter()
        .map(|&m| {
            let lags = match m {
                ModelFamily::C1 => euc.as_ref().expect("euclidean lags computed when C1 is listed"),
                _ => &geo,
            };
            fit_lags(lags, m, &y, init, &bounds, &opts)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let best = fits.iter().map(|f| f.loglik).fold(f64::NEG_INFINITY, f64::max);
    let close: Vec<usize> = (0..fits.len()).filter(|&i| fits[i].loglik >= best - TIE_TOL).collect();
    Ok(ReplicateResult {
        replicate: r,
        fits,
        winner: close[0],
        tie: close.len() > 1,
    })
}

/// Runs the study. The seed must be resolved; replicate `r` draws from
/// ChaCha stream `r + 1`, so results do not depend on the thread count.
pub fn run_sim_study(cfg: &StudyConfig) -> Result<ExperimentReport, GpError> {
    cfg.validate()?;
    let seed = cfg
        .seed
        .ok_or_else(|| GpError::InvalidInput("study seed must be set".into()))?;
    let net = cfg.load_network()?;
    let mut rng0 = stream_rng(seed, 0);
    let sites = sample_points_with(&net, cfg.n_sites, &mut rng0);
    let fixed_times = cfg
        .fix_times
        .then(|| draw_times(&mut rng0, cfg.n_sites * cfg.times_per_site));
    let geodesic = distance_matrix(&net, &sites, MetricKind::Geodesic)?;
    let euclidean = if cfg.models.contains(&ModelFamily::C1) {
        Some(distance_matrix(&net, &sites, MetricKind::AmbientEuclidean)?)
    } else {
        None
    };
    let setup = Setup {
        sites,
        fixed_times,
        geodesic,
        euclidean,
        diameter: net.diameter(),
    };
    debug_assert_eq!(setup.sites.len(), cfg.n_sites);
    let replicates = (0..cfg.n_replicates)
        .into_par_iter()
        .map(|r| run_replicate(cfg, seed, &setup, r))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ExperimentReport {
        models: cfg.models.clone(),
        truth: cfg.truth,
        seed,
        diameter: setup.diameter,
        summary: summarize(&cfg.models, &cfg.truth, &replicates),
        replicates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> StudyConfig {
        serde_json::from_str(
            r#"{"network":{"generate":{"kind":"river_tree","depth":3}},
                "n_sites":6,"times_per_site":3,
                "true":{"sigma2":0.9,"c_S":100,"c_T":0.2,"nugget":0.1},
                "n_replicates":3,"seed":5,"optimizer":{"max_iter":60}}"#,
        )
        .unwrap()
    }

    #[test]
    fn parses_and_runs() {
        let cfg = tiny();
        assert_eq!(cfg.models, all_models());
        let rep = run_sim_study(&cfg).unwrap();
        assert_eq!(rep.replicates.len(), 3);
        let total: f64 = rep.summary.iter().map(|s| s.win_proportion).sum();
        assert!((total - 1.0).abs() < 1e-12);
        for s in &rep.summary {
            for (a, b) in s.mae.as_array().iter().zip(s.rmse.as_array()) {
                assert!(*a <= b * (1.0 + 1e-12));
            }
        }
        let mut a = Vec::new();
        rep.write_summary_csv(&mut a).unwrap();
        let mut b = Vec::new();
        run_sim_study(&cfg).unwrap().write_summary_csv(&mut b).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_configs() {
        let mut cfg = tiny();
        cfg.seed = None;
        assert!(run_sim_study(&cfg).is_err());
        let mut cfg = tiny();
        cfg.models = vec![ModelFamily::T, ModelFamily::T];
        assert!(cfg.validate().is_err());
        assert!(serde_json::from_str::<StudyConfig>(r#"{"network":{"file":"x"},"bogus":1}"#).is_err());
    }

    #[test]
    fn median_of_even_and_odd() {
        assert_eq!(median(vec![3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(vec![4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
