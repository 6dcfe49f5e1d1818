//! The `netkernel` command-line front end.
//!
//! Exit codes: 0 on success, 1 when an input is well formed but rejected
//! (inconsistent network, failed audit, Invalid kernel under `--strict`),
//! 2 when an input cannot be read or parsed.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fmt::fmt_f64;
use crate::gp::{
    fit_lags, run_sim_study, simulate, stream_rng, Bounds, FitOptions, GpError, NetworkSource, OptimizerSettings,
    Params, SimSpec, SpaceTimeDesign, StudyConfig,
};
use crate::kernels::{eval_circular, eval_gneiting, CovarianceFunction, Kernel, KernelConfig, KernelError, ModelFamily};
use crate::metrics::{distance_matrix, MetricKind, TimeKind};
use crate::network::io::{read_network, read_points, IoError};
use crate::network::{generate, sample_points_with, Network, PointOnNetwork};
use crate::pdcheck::{audit, AuditConfig, Verdict};

mod data;

pub use data::{read_observations, write_observations, Observation};

#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable or malformed input.
    #[error("{0}")]
    Input(String),
    /// Well-formed input that failed a check.
    #[error("{0}")]
    Rejected(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Rejected(_) => 1,
        }
    }
}

impl From<GpError> for CliError {
    fn from(e: GpError) -> Self {
        match e {
            GpError::NotPositiveDefinite { .. } => CliError::Rejected(e.to_string()),
            e => CliError::Input(e.to_string()),
        }
    }
}

macro_rules! input_error {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Input(e.to_string())
            }
        }
    )*};
}

input_error!(IoError, KernelError, crate::pdcheck::PdError, crate::metrics::MetricError, crate::network::NetworkError);

#[derive(Debug, Parser)]
#[command(name = "netkernel", version, about = "Space-time covariance on graphs with Euclidean edges")]
pub struct Cli {
    /// Output directory. Commands that write artifacts require it.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Overrides the seed in the config file.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true, env = "NETKERNEL_THREADS")]
    pub threads: Option<usize>,
    /// Refuse to simulate or fit with a kernel whose verdict is Invalid.
    #[arg(long, global = true)]
    pub strict: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Network checks.
    #[command(subcommand)]
    Graph(GraphCommand),
    /// Pairwise distances between points on a network.
    Dist {
        network: PathBuf,
        #[arg(long)]
        points: PathBuf,
        #[arg(long, value_enum, default_value = "geodesic")]
        metric: MetricArg,
    },
    /// Kernel evaluation.
    #[command(subcommand)]
    Kernel(KernelCommand),
    /// Positive-definiteness audits.
    #[command(subcommand)]
    Pd(PdCommand),
    /// Draw Gaussian fields on a network.
    Simulate(ConfigArg),
    /// Maximum-likelihood fit of one model.
    Fit(ConfigArg),
    /// Model-selection simulation study.
    SimStudy(ConfigArg),
}

#[derive(Debug, Subcommand)]
pub enum GraphCommand {
    /// Checks that every edge is a shortest path between its endpoints.
    Validate { path: PathBuf },
    /// Prints size, topology and diameter as JSON.
    Info { path: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum KernelCommand {
    /// Evaluates a kernel on a d × u grid, d-major.
    Eval {
        #[arg(long)]
        spec: PathBuf,
        /// Comma-separated nondecreasing distances.
        #[arg(long, value_delimiter = ',', required = true)]
        d: Vec<f64>,
        /// Comma-separated nondecreasing time lags.
        #[arg(long, value_delimiter = ',', required = true)]
        u: Vec<f64>,
    },
}

#[derive(Debug, Subcommand)]
pub enum PdCommand {
    /// Audits the Gram spectrum on random designs.
    Check {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        network: PathBuf,
        /// Audit settings as JSON; overrides the sizing flags.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 60)]
        n_points: usize,
        #[arg(long, default_value_t = 5)]
        n_times: usize,
        #[arg(long, default_value_t = 20)]
        n_trials: usize,
    },
}

#[derive(Debug, Args)]
pub struct ConfigArg {
    #[arg(long)]
    pub config: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MetricArg {
    Geodesic,
    Resistance,
    Euclidean,
}

impl From<MetricArg> for MetricKind {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::Geodesic => MetricKind::Geodesic,
            MetricArg::Resistance => MetricKind::Resistance,
            MetricArg::Euclidean => MetricKind::AmbientEuclidean,
        }
    }
}

/// Sites of a simulation design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SiteSource {
    /// Uniform by length over the network.
    Sample(usize),
    /// A points CSV.
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub network: NetworkSource,
    pub sites: SiteSource,
    pub times_per_site: usize,
    pub kernel: KernelConfig,
    pub nugget: f64,
    #[serde(default = "one")]
    pub n_reps: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

fn one() -> usize {
    1
}

fn default_nugget() -> f64 {
    FitOptions::default().nugget
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitConfig {
    pub network: NetworkSource,
    /// Observations CSV as written by `simulate`.
    pub data: PathBuf,
    pub model: ModelFamily,
    #[serde(default = "default_nugget")]
    pub nugget: f64,
    /// Replicate to fit.
    #[serde(default)]
    pub rep: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub init: Option<Params>,
    #[serde(default)]
    pub optimizer: OptimizerSettings,
    /// Only used to regenerate a generated network.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Serialize)]
struct RunRecord<'a> {
    command: &'a str,
    version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    strict: bool,
    config: serde_json::Value,
}

/// Parses arguments and runs; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Input("--threads must be at least 1".into()));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| CliError::Input(e.to_string()))?;
    pool.install(|| dispatch(cli))
}

fn dispatch(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Graph(GraphCommand::Validate { path }) => graph_validate(path),
        Command::Graph(GraphCommand::Info { path }) => graph_info(path),
        Command::Dist { network, points, metric } => dist(cli, network, points, (*metric).into()),
        Command::Kernel(KernelCommand::Eval { spec, d, u }) => kernel_eval(cli, spec, d, u),
        Command::Pd(PdCommand::Check {
            spec,
            network,
            config,
            n_points,
            n_times,
            n_trials,
        }) => {
            let cfg = match config {
                Some(p) => {
                    let mut c: AuditConfig = read_json(p)?;
                    if let Some(s) = cli.seed {
                        c.seed = s;
                    }
                    c
                }
                None => AuditConfig::new(*n_points, *n_times, *n_trials, resolve_seed(cli.seed, None)),
            };
            pd_check(cli, spec, network, cfg)
        }
        Command::Simulate(a) => simulate_cmd(cli, &a.config),
        Command::Fit(a) => fit_cmd(cli, &a.config),
        Command::SimStudy(a) => sim_study(cli, &a.config),
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn base_dir(config: &Path) -> PathBuf {
    config.parent().map(Path::to_path_buf).unwrap_or_default()
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn resolve_source(base: &Path, src: &mut NetworkSource) {
    if let NetworkSource::File(p) = src {
        *p = resolve(base, p);
    }
}

fn load_network(src: &NetworkSource, seed: u64) -> Result<Network, CliError> {
    Ok(match src {
        NetworkSource::Generate(spec) => generate(spec, seed)?,
        NetworkSource::File(p) => read_network(p)?,
    })
}

/// Flag, then config, then entropy.
fn resolve_seed(flag: Option<u64>, config: Option<u64>) -> u64 {
    flag.or(config).unwrap_or_else(rand::random)
}

fn require_out(cli: &Cli) -> Result<&Path, CliError> {
    let out = cli
        .out
        .as_deref()
        .ok_or_else(|| CliError::Input("this command needs --out DIR".into()))?;
    fs::create_dir_all(out).map_err(|e| CliError::Input(format!("{}: {e}", out.display())))?;
    Ok(out)
}

fn create(path: &Path) -> Result<std::io::BufWriter<fs::File>, CliError> {
    fs::File::create(path)
        .map(std::io::BufWriter::new)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn write_io(path: &Path, f: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<(), CliError> {
    let mut w = create(path)?;
    f(&mut w)
        .and_then(|_| w.flush())
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn write_run(out: &Path, cli: &Cli, command: &str, seed: Option<u64>, config: &impl Serialize) -> Result<(), CliError> {
    let rec = RunRecord {
        command,
        version: env!("CARGO_PKG_VERSION"),
        seed,
        strict: cli.strict,
        config: serde_json::to_value(config).map_err(|e| CliError::Input(e.to_string()))?,
    };
    let text = serde_json::to_string_pretty(&rec).expect("run record serializes");
    write_io(&out.join("run.json"), |w| writeln!(w, "{text}"))
}

/// Rejects Invalid kernels under `--strict`; otherwise warns.
fn gate(cli: &Cli, what: &str, kernel: &Kernel, net: &Network) -> Result<(), CliError> {
    let verdict = kernel.validity(&net.classify_topology());
    if verdict.is_invalid() {
        let msg = format!("{what}: {verdict}");
        if cli.strict {
            return Err(CliError::Rejected(msg));
        }
        eprintln!("warning: {msg}");
    }
    Ok(())
}

fn graph_validate(path: &Path) -> Result<(), CliError> {
    let net = read_network(path)?;
    let bad = net.check_distance_consistency();
    if bad.is_empty() {
        println!(
            "{}: ok ({} vertices, {} edges)",
            path.display(),
            net.vertex_count(),
            net.edge_count()
        );
        return Ok(());
    }
    let lines: Vec<String> = bad
        .iter()
        .filter_map(|&id| net.edge(id))
        .map(|e| {
            format!(
                "  edge {} ({} - {}, length {}) is longer than another path between its endpoints",
                e.id, e.u, e.v, e.length
            )
        })
        .collect();
    Err(CliError::Rejected(format!(
        "{}: network is not distance consistent\n{}",
        path.display(),
        lines.join("\n")
    )))
}

#[derive(Serialize)]
struct GraphInfo {
    vertices: usize,
    edges: usize,
    total_length: f64,
    diameter: f64,
    topology: crate::network::TopologyClass,
    leaves: usize,
    has_coordinates: bool,
    inconsistent_edges: Vec<u64>,
}

fn graph_info(path: &Path) -> Result<(), CliError> {
    let net = read_network(path)?;
    let info = GraphInfo {
        vertices: net.vertex_count(),
        edges: net.edge_count(),
        total_length: net.total_length(),
        diameter: net.diameter(),
        topology: net.classify_topology(),
        leaves: net.leaves().len(),
        has_coordinates: net.has_coordinates(),
        inconsistent_edges: net.check_distance_consistency(),
    };
    println!("{}", serde_json::to_string_pretty(&info).expect("info serializes"));
    Ok(())
}

fn dist(cli: &Cli, network: &Path, points: &Path, metric: MetricKind) -> Result<(), CliError> {
    let net = read_network(network)?;
    let named = read_points(points, &net)?;
    let pts: Vec<PointOnNetwork> = named.iter().map(|p| p.point).collect();
    let ids: Vec<u64> = named.iter().map(|p| p.id).collect();
    let dm = distance_matrix(&net, &pts, metric)?;
    match &cli.out {
        Some(_) => {
            let out = require_out(cli)?;
            write_io(&out.join("distances.csv"), |w| dm.write_csv(w, &ids))?;
            let cfg = serde_json::json!({"network": network, "points": points, "metric": metric});
            write_run(out, cli, "dist", None, &cfg)
        }
        None => dm
            .write_csv(std::io::stdout().lock(), &ids)
            .map_err(|e| CliError::Input(e.to_string())),
    }
}

fn eval_checked(k: &Kernel, d: f64, u: f64) -> Result<f64, KernelError> {
    match k {
        Kernel::Gneiting(s) => eval_gneiting(s, d, u),
        Kernel::Circular(s) => eval_circular(&s.family, &s.g, s.c_s, d, u).map(|v| s.sigma2 * v),
    }
}

fn check_grid(name: &str, g: &[f64]) -> Result<(), CliError> {
    if g.iter().any(|v| !v.is_finite()) || g.windows(2).any(|w| w[1] < w[0]) {
        return Err(CliError::Input(format!("--{name} must be finite and nondecreasing")));
    }
    Ok(())
}

/// CSV `d,u,value`, d-major.
pub fn emit_eval_grid<W: Write>(k: &Kernel, d: &[f64], u: &[f64], mut w: W) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Input(e.to_string());
    writeln!(w, "d,u,value").map_err(io)?;
    for &dv in d {
        for &uv in u {
            let v = eval_checked(k, dv, uv)?;
            writeln!(w, "{},{},{}", fmt_f64(dv), fmt_f64(uv), fmt_f64(v)).map_err(io)?;
        }
    }
    Ok(())
}

fn kernel_eval(cli: &Cli, spec: &Path, d: &[f64], u: &[f64]) -> Result<(), CliError> {
    check_grid("d", d)?;
    check_grid("u", u)?;
    let cfg: KernelConfig = read_json(spec)?;
    let k = cfg.build()?;
    match &cli.out {
        Some(_) => {
            let out = require_out(cli)?;
            let mut buf = Vec::new();
            emit_eval_grid(&k, d, u, &mut buf)?;
            write_io(&out.join("grid.csv"), |w| w.write_all(&buf))?;
            let rec = serde_json::json!({"spec": cfg, "d": d, "u": u});
            write_run(out, cli, "kernel eval", None, &rec)
        }
        None if d.len() == 1 && u.len() == 1 => {
            println!("{}", fmt_f64(eval_checked(&k, d[0], u[0])?));
            Ok(())
        }
        None => emit_eval_grid(&k, d, u, std::io::stdout().lock()),
    }
}

#[derive(Serialize)]
struct AuditSummary {
    verdict: Verdict,
    min_eig_ratio: f64,
    worst_trial: usize,
    n_trials: usize,
    matrix_size: usize,
    seed: u64,
    validity: crate::kernels::ValidityVerdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    worst_config: Option<String>,
}

fn pd_check(cli: &Cli, spec: &Path, network: &Path, cfg: AuditConfig) -> Result<(), CliError> {
    let k = read_json::<KernelConfig>(spec)?.build()?;
    let net = read_network(network)?;
    let report = audit(&k, &net, &cfg)?;
    let mut summary = AuditSummary {
        verdict: report.verdict,
        min_eig_ratio: report.min_eig_ratio,
        worst_trial: report.worst_trial,
        n_trials: report.n_trials,
        matrix_size: report.matrix_size,
        seed: cfg.seed,
        validity: k.validity(&net.classify_topology()),
        worst_config: None,
    };
    if cli.out.is_some() {
        let out = require_out(cli)?;
        write_io(&out.join("worst_config.csv"), |w| report.worst_config.write_csv(w))?;
        summary.worst_config = Some("worst_config.csv".into());
        let text = serde_json::to_string_pretty(&summary).expect("summary serializes");
        write_io(&out.join("audit.json"), |w| writeln!(w, "{text}"))?;
        let rec = serde_json::json!({"spec": spec, "network": network, "audit": cfg});
        write_run(out, cli, "pd check", Some(cfg.seed), &rec)?;
    }
    println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
    match report.verdict {
        Verdict::Pass => Ok(()),
        Verdict::Fail => Err(CliError::Rejected(format!(
            "audit failed: min eigenvalue ratio {:e} in trial {}",
            report.min_eig_ratio, report.worst_trial
        ))),
    }
}

/// Stream reserved for the simulated design, apart from the draw streams.
const DESIGN_STREAM: u64 = u64::MAX;

fn simulate_cmd(cli: &Cli, path: &Path) -> Result<(), CliError> {
    use rand::Rng;

    let mut cfg: SimulateConfig = read_json(path)?;
    let base = base_dir(path);
    resolve_source(&base, &mut cfg.network);
    if let SiteSource::File(p) = &mut cfg.sites {
        *p = resolve(&base, p);
    }
    let seed = resolve_seed(cli.seed, cfg.seed);
    cfg.seed = Some(seed);
    if cfg.times_per_site == 0 || cfg.n_reps == 0 {
        return Err(CliError::Input(format!("{}: times_per_site and n_reps must be at least 1", path.display())));
    }
    let out = require_out(cli)?;
    let net = load_network(&cfg.network, seed)?;
    let kernel = cfg.kernel.build()?;
    gate(cli, "kernel", &kernel, &net)?;

    let mut rng = stream_rng(seed, DESIGN_STREAM);
    let sites: Vec<(u64, PointOnNetwork)> = match &cfg.sites {
        SiteSource::Sample(n) => sample_points_with(&net, *n, &mut rng)
            .into_iter()
            .enumerate()
            .map(|(i, p)| (i as u64, p))
            .collect(),
        SiteSource::File(p) => read_points(p, &net)?.into_iter().map(|p| (p.id, p.point)).collect(),
    };
    let span = match kernel.time_kind() {
        TimeKind::Linear => 1.0,
        TimeKind::Circular => 2.0 * std::f64::consts::PI,
    };
    let mut obs = Vec::with_capacity(sites.len() * cfg.times_per_site);
    for &(id, point) in &sites {
        for _ in 0..cfg.times_per_site {
            obs.push(Observation {
                rep: 0,
                point_id: id,
                point,
                time: rng.random_range(0.0..span),
                y: 0.0,
            });
        }
    }
    let design = SpaceTimeDesign::new(
        &net,
        obs.iter().map(|o| o.point).collect(),
        obs.iter().map(|o| o.time).collect(),
        kernel.time_kind(),
    )?;
    let sim = SimSpec {
        kernel,
        nugget: cfg.nugget,
        seed,
    };
    let draws = simulate(&design, &sim, cfg.n_reps)?;
    let draws = &draws;
    let rows: Vec<Observation> = (0..cfg.n_reps)
        .flat_map(|r| {
            obs.iter().enumerate().map(move |(i, o)| Observation {
                rep: r,
                y: draws[(r, i)],
                ..*o
            })
        })
        .collect();
    write_io(&out.join("draws.csv"), |w| write_observations(w, &rows))?;
    write_run(out, cli, "simulate", Some(seed), &cfg)?;
    println!("wrote {} rows to {}", rows.len(), out.join("draws.csv").display());
    Ok(())
}

#[derive(Serialize)]
struct FitSummary {
    model: ModelFamily,
    n_obs: usize,
    estimates: Params,
    loglik: f64,
    initial_loglik: f64,
    iterations: usize,
    converged: bool,
    validity: crate::kernels::ValidityVerdict,
}

fn fit_cmd(cli: &Cli, path: &Path) -> Result<(), CliError> {
    let mut cfg: FitConfig = read_json(path)?;
    let base = base_dir(path);
    resolve_source(&base, &mut cfg.network);
    cfg.data = resolve(&base, &cfg.data);
    let seed = match cfg.network {
        NetworkSource::Generate(_) => Some(resolve_seed(cli.seed, cfg.seed)),
        NetworkSource::File(_) => cli.seed.or(cfg.seed),
    };
    cfg.seed = seed;
    let out = require_out(cli)?;
    let net = load_network(&cfg.network, seed.unwrap_or(0))?;
    let obs: Vec<Observation> = read_observations(&cfg.data, &net)?
        .into_iter()
        .filter(|o| o.rep == cfg.rep)
        .collect();
    if obs.is_empty() {
        return Err(CliError::Input(format!("{}: no rows for rep {}", cfg.data.display(), cfg.rep)));
    }
    let template = cfg.model.spec(1.0, 1.0, 1.0);
    let verdict = Kernel::Gneiting(template).validity(&net.classify_topology());
    gate(cli, cfg.model.name(), &Kernel::Gneiting(template), &net)?;
    let design = SpaceTimeDesign::new(
        &net,
        obs.iter().map(|o| o.point).collect(),
        obs.iter().map(|o| o.time).collect(),
        TimeKind::Linear,
    )?;
    let y: Vec<f64> = obs.iter().map(|o| o.y).collect();
    let opts = FitOptions {
        nugget: cfg.nugget,
        max_iter: cfg.optimizer.max_iter,
        tol: cfg.optimizer.tol,
        starts: cfg.optimizer.starts,
    };
    let diameter = net.diameter();
    let init = cfg
        .init
        .unwrap_or_else(|| crate::gp::default_init(&y, &design.times, cfg.nugget, diameter));
    let lags = design.lags(template.metric)?;
    let r = fit_lags(&lags, cfg.model, &y, init, &Bounds::for_diameter(diameter), &opts)?;
    let summary = FitSummary {
        model: cfg.model,
        n_obs: y.len(),
        estimates: r.estimates,
        loglik: r.loglik,
        initial_loglik: r.initial_loglik,
        iterations: r.iterations,
        converged: r.converged,
        validity: verdict,
    };
    let text = serde_json::to_string_pretty(&summary).expect("fit serializes");
    write_io(&out.join("fit.json"), |w| writeln!(w, "{text}"))?;
    write_run(out, cli, "fit", seed, &cfg)?;
    println!("{text}");
    Ok(())
}

fn sim_study(cli: &Cli, path: &Path) -> Result<(), CliError> {
    let mut cfg: StudyConfig = read_json(path)?;
    resolve_source(&base_dir(path), &mut cfg.network);
    let seed = resolve_seed(cli.seed, cfg.seed);
    cfg.seed = Some(seed);
    cfg.validate()?;
    let out = require_out(cli)?;
    let net = cfg.load_network()?;
    let t = cfg.truth;
    for m in &cfg.models {
        gate(cli, m.name(), &Kernel::Gneiting(m.spec(t.sigma2, t.c_s, t.c_t)), &net)?;
    }
    write_run(out, cli, "sim-study", Some(seed), &cfg)?;
    let report = run_sim_study(&cfg)?;
    write_io(&out.join("replicates.csv"), |w| report.write_replicates_csv(w))?;
    write_io(&out.join("summary.csv"), |w| report.write_summary_csv(w))?;
    report
        .write_summary_csv(std::io::stdout().lock())
        .map_err(|e| CliError::Input(e.to_string()))
}
