use serde::{Deserialize, Serialize};

use super::optim::NelderMead;
use super::{GpError, Lags, SpaceTimeDesign};
use crate::kernels::ModelFamily;

/// `(σ², c_S, c_T)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub sigma2: f64,
    #[serde(rename = "c_S")]
    pub c_s: f64,
    #[serde(rename = "c_T")]
    pub c_t: f64,
}

impl Params {
    fn to_log(self) -> [f64; 3] {
        [self.sigma2.ln(), self.c_s.ln(), self.c_t.ln()]
    }

    fn from_log(x: &[f64]) -> Self {
        Self {
            sigma2: x[0].exp(),
            c_s: x[1].exp(),
            c_t: x[2].exp(),
        }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.sigma2, self.c_s, self.c_t]
    }
}

/// Box constraints on the natural scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lo: Params,
    pub hi: Params,
}

impl Bounds {
    /// `σ² ∈ [1e-6, 1e3]`, `c_S ∈ [1e-3 D, 1e2 D]`, `c_T ∈ [1e-4, 1e2]`.
    pub fn for_diameter(diameter: f64) -> Self {
        Self {
            lo: Params {
                sigma2: 1e-6,
                c_s: 1e-3 * diameter,
                c_t: 1e-4,
            },
            hi: Params {
                sigma2: 1e3,
                c_s: 1e2 * diameter,
                c_t: 1e2,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitOptions {
    pub nugget: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Number of starting points: the initial guess, then the guess scaled
    /// by 1.5 and by 0.5.
    #[serde(default = "default_starts")]
    pub starts: usize,
}

fn default_max_iter() -> usize {
    2000
}
fn default_tol() -> f64 {
    1e-8
}
fn default_starts() -> usize {
    3
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            nugget: 0.1,
            max_iter: default_max_iter(),
            tol: default_tol(),
            starts: default_starts(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitResult {
    pub estimates: Params,
    pub loglik: f64,
    /// Log-likelihood at the initial guess; `-inf` if it was not computable.
    pub initial_loglik: f64,
    pub iterations: usize,
    pub converged: bool,
}

const START_SCALES: [f64; 3] = [1.0, 1.5, 0.5];

/// Default initial guess: sample variance minus the nugget (floored at
/// 1e-4), a quarter of the diameter and half the time range.
pub fn default_init(y: &[f64], times: &[f64], nugget: f64, diameter: f64) -> Params {
    let n = y.len().max(1) as f64;
    let mean = y.iter().sum::<f64>() / n;
    let var = y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let (lo, hi) = times
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &t| (a.min(t), b.max(t)));
    let range = if hi > lo { hi - lo } else { 1.0 };
    Params {
        sigma2: (var - nugget).max(1e-4),
        c_s: diameter / 4.0,
        c_t: range / 2.0,
    }
}

/// Maximum likelihood for `family` over `(ln σ², ln c_S, ln c_T)` with
/// precomputed lags.
pub fn fit_lags(
    lags: &Lags,
    family: ModelFamily,
    y: &[f64],
    init: Params,
    bounds: &Bounds,
    opts: &FitOptions,
) -> Result<FitResult, GpError> {
    if y.len() != lags.len() {
        return Err(GpError::InvalidInput(format!("{} observations for {} design rows", y.len(), lags.len())));
    }
    if !(opts.nugget >= 0.0) || opts.starts == 0 {
        return Err(GpError::InvalidInput("nugget must be nonnegative and starts at least 1".into()));
    }
    let template = family.spec(1.0, 1.0, 1.0);
    if template.metric != lags.metric() {
        return Err(GpError::InvalidInput(format!(
            "model {} needs {} distances, got {}",
            family.name(),
            template.metric.name(),
            lags.metric().name()
        )));
    }
    let mut buf = Vec::new();
    let mut nll = |x: &[f64]| {
        let p = Params::from_log(x);
        let k = template.with_scales(p.sigma2, p.c_s, p.c_t);
        match lags.loglik(&k, opts.nugget, y, &mut buf) {
            Ok(v) => -v,
            Err(_) => f64::INFINITY,
        }
    };
    let lo = bounds.lo.to_log();
    let hi = bounds.hi.to_log();
    let x0 = init.to_log();
    let initial = -nll(&x0);
    let nm = NelderMead {
        tol: opts.tol,
        max_iter: opts.max_iter,
        step: 0.5,
    };
    let mut best: Option<FitResult> = None;
    let mut iterations = 0;
    for s in START_SCALES.iter().cycle().take(opts.starts) {
        let start: Vec<f64> = x0.iter().map(|v| v + s.ln()).collect();
        let m = nm.minimize(&mut nll, &start, &lo, &hi);
        iterations += m.iterations;
        let cand = FitResult {
            estimates: Params::from_log(&m.x),
            loglik: -m.value,
            initial_loglik: initial,
            iterations: 0,
            converged: m.converged,
        };
        if best.as_ref().is_none_or(|b| cand.loglik > b.loglik) {
            best = Some(cand);
        }
    }
    let mut best = best.expect("at least one start");
    best.iterations = iterations;
    if !best.loglik.is_finite() {
        return Err(GpError::NotPositiveDefinite { column: 0 });
    }
    Ok(best)
}

/// Fits `family` to `y` observed on `design`. `init` defaults to
/// [`default_init`].
pub fn fit(
    design: &SpaceTimeDesign,
    family: ModelFamily,
    y: &[f64],
    init: Option<Params>,
    opts: &FitOptions,
) -> Result<FitResult, GpError> {
    let diameter = design.network.diameter();
    let init = init.unwrap_or_else(|| default_init(y, &design.times, opts.nugget, diameter));
    let lags = design.lags(family.spec(1.0, 1.0, 1.0).metric)?;
    fit_lags(&lags, family, y, init, &Bounds::for_diameter(diameter), opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gp::{simulate, SimSpec};
    use crate::kernels::model_t;
    use crate::metrics::TimeKind;
    use crate::network::{generate, sample_points, GenerateSpec};

    #[test]
    fn improves_on_init_and_recovers_roughly() {
        let net = generate(&GenerateSpec::RandomTree { n: 15, min_length: 1.0, max_length: 3.0 }, 2).unwrap();
        let sites = sample_points(&net, 15, 3);
        let mut points = Vec::new();
        let mut times = Vec::new();
        for (i, p) in sites.iter().enumerate() {
            for t in 0..4 {
                points.push(*p);
                times.push(((i * 4 + t) as f64 * 0.618).fract());
            }
        }
        let design = SpaceTimeDesign::new(&net, points, times, TimeKind::Linear).unwrap();
        let sim = SimSpec {
            kernel: model_t(0.9, 5.0, 0.2).into(),
            nugget: 0.1,
            seed: 1,
        };
        let y: Vec<f64> = simulate(&design, &sim, 1).unwrap().row(0).iter().copied().collect();
        let opts = FitOptions::default();
        let r = fit(&design, ModelFamily::T, &y, None, &opts).unwrap();
        assert!(r.loglik >= r.initial_loglik);
        assert!(r.converged);
        assert!(r.estimates.sigma2 > 0.2 && r.estimates.sigma2 < 4.0, "{r:?}");
    }

    #[test]
    fn zero_data_drives_variance_to_lower_bound() {
        let net = generate(&GenerateSpec::RandomTree { n: 6, min_length: 1.0, max_length: 2.0 }, 2).unwrap();
        let points = sample_points(&net, 8, 3);
        let times: Vec<f64> = (0..8).map(|i| i as f64 / 8.0).collect();
        let design = SpaceTimeDesign::new(&net, points, times, TimeKind::Linear).unwrap();
        let r = fit(&design, ModelFamily::T, &[0.0; 8], None, &FitOptions::default()).unwrap();
        assert!(r.estimates.sigma2 < 1e-5, "{r:?}");
        assert!(r.converged);
    }
}
