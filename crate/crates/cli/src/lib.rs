//! Scenario runner behind the `photon-post` binary.
//!
//! A config file selects one command; results are written into an output
//! directory as CSV (sweeps) or JSON (single results and search reports).
//! Sweep points run in parallel and rows are written in grid order, so equal
//! configs give byte-identical files.

pub mod config;
mod output;

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use photon_post::detectors::{observe, DetectorModel, DetectorScenario, ObservedPattern, Outcome};
use photon_post::merit::{distribution_figures, figures_of_merit, Figure, MeritReport};
use photon_post::schemes::{build_chain, chain_asymptotics, pure_success_probability_reduced};
use photon_post::search::{search_improvement, verify_nogo_patterns, verify_nogo_small, SearchReport};
use photon_post::{
    condition_mixed, ComplexMatrix, ConditionalResult, DetectionPattern, InputSpec, Interferometer,
    ModeDistribution,
};
use rayon::prelude::*;
use serde::Serialize;

pub use config::Config;
use config::*;
use output::{fmt_f64, write_csv, write_json};

/// Exit code for configuration errors.
pub const EXIT_CONFIG: i32 = 2;
/// Exit code for inconsistent dimensions.
pub const EXIT_DIMENSION: i32 = 3;
/// Exit code for I/O failures.
pub const EXIT_IO: i32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Dimension(_) => EXIT_DIMENSION,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl From<photon_post::Error> for CliError {
    fn from(e: photon_post::Error) -> Self {
        use photon_post::Error as E;
        match e {
            E::NonSquare { .. }
            | E::DimensionTooLarge { .. }
            | E::MismatchedTotals { .. }
            | E::DimensionMismatch(_)
            | E::BadModeIndex { .. } => CliError::Dimension(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

type Result<T> = std::result::Result<T, CliError>;

/// Parse a config, checking the version and rejecting unknown fields.
pub fn parse_config(text: &str) -> Result<Config> {
    parse_config_with_seed(text, None)
}

/// As [`parse_config`], replacing the config's `seed` when `seed` is given.
pub fn parse_config_with_seed(text: &str, seed: Option<u64>) -> Result<Config> {
    let mut value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid JSON: {e}")))?;
    let obj = value
        .as_object_mut()
        .ok_or_else(|| CliError::Config("config must be a JSON object".into()))?;
    match obj.remove("version") {
        Some(v) if v.as_u64() == Some(CONFIG_VERSION) => {}
        Some(v) => {
            return Err(CliError::Config(format!(
                "field `version`: unsupported value {v}, expected {CONFIG_VERSION}"
            )))
        }
        None => return Err(CliError::Config("missing field `version`".into())),
    }
    let command = match obj.remove("command") {
        Some(serde_json::Value::String(c)) => c,
        _ => return Err(CliError::Config("missing string field `command`".into())),
    };
    if let Some(seed) = seed {
        if Config::takes_seed(&command) {
            obj.insert("seed".into(), seed.into());
        }
    }
    // Variants are decoded directly so error paths survive.
    Ok(match command.as_str() {
        "simulate" => Config::Simulate(typed(value)?),
        "pure-landscape" => Config::PureLandscape(typed(value)?),
        "exp-sweep" => Config::ExpSweep(typed(value)?),
        "chain-sweep" => Config::ChainSweep(typed(value)?),
        "nogo-verify" => Config::NogoVerify(typed(value)?),
        "search" => Config::Search(typed(value)?),
        other => {
            return Err(CliError::Config(format!(
                "field `command`: unknown command `{other}`"
            )))
        }
    })
}

fn typed<T: serde::de::DeserializeOwned>(value: serde_json::Value) -> Result<T> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if path == "." {
            CliError::Config(inner.to_string())
        } else {
            CliError::Config(format!("field `{path}`: {inner}"))
        }
    })
}

/// Run a command, writing its files into `out_dir` (created if missing).
/// Returns the written paths in a fixed order.
pub fn execute(config: &Config, out_dir: &Path, threads: Option<usize>) -> Result<Vec<PathBuf>> {
    let run = || -> Result<Vec<PathBuf>> {
        fs::create_dir_all(out_dir)?;
        match config {
            Config::Simulate(c) => simulate(c, out_dir),
            Config::PureLandscape(c) => pure_landscape(c, out_dir),
            Config::ExpSweep(c) => exp_sweep(c, out_dir),
            Config::ChainSweep(c) => chain_sweep(c, out_dir),
            Config::NogoVerify(c) => nogo_verify(c, out_dir),
            Config::Search(task) => {
                let report = search_improvement(task)?;
                Ok(vec![write_json(&out_dir.join("search.json"), &report)?])
            }
        }
    };
    match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    }
}

fn build_inputs(c: &InputsConfig) -> Result<InputSpec> {
    match (&c.p, &c.distributions) {
        (Some(p), None) => Ok(InputSpec::two_level(p)?),
        (None, Some(d)) => Ok(InputSpec::new(
            d.iter()
                .map(|q| ModeDistribution::new(q.clone()))
                .collect::<photon_post::Result<_>>()?,
        )?),
        _ => Err(CliError::Config(
            "field `inputs`: give exactly one of `p` and `distributions`".into(),
        )),
    }
}

fn build_interferometer(c: &InterferometerConfig, seed: Option<u64>) -> Result<Interferometer> {
    Ok(match c {
        InterferometerConfig::Identity { n_modes } => Interferometer::identity(*n_modes),
        InterferometerConfig::BeamSplitter { theta, phi } => Interferometer::beam_splitter(*theta, *phi),
        InterferometerConfig::Chain { n_modes, epsilon } => build_chain(*n_modes, *epsilon)?.interferometer,
        InterferometerConfig::Haar { n_modes, seed: own } => {
            let seed = own.or(seed).ok_or_else(|| {
                CliError::Config("field `interferometer.seed`: Haar interferometer needs a seed".into())
            })?;
            Interferometer::haar_random(*n_modes, seed)
        }
        InterferometerConfig::Matrix { rows } => {
            let rows: Vec<Vec<Complex64>> = rows
                .iter()
                .map(|r| r.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
                .collect();
            let m = ComplexMatrix::from_rows(&rows)?;
            Interferometer::new(m, photon_post::interferometer::Provenance::Explicit)?
        }
    })
}

#[derive(Serialize)]
struct SimulateOutput<'a> {
    command: &'static str,
    pattern: &'a [Outcome],
    interferometer: &'a Interferometer,
    unnormalized: &'a [f64],
    normalized: Option<&'a [f64]>,
    pattern_probability: f64,
    merit: Option<MeritReport>,
}

fn simulate(c: &SimulateConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let spec = build_inputs(&c.inputs)?;
    let interf = build_interferometer(&c.interferometer, c.seed)?;
    let observed = ObservedPattern(c.pattern.clone());
    let n_measured = interf.n_modes().saturating_sub(1);
    let max_true = spec.max_total_photons();
    let result = match (&c.detectors, observed.as_exact()) {
        (None, Some(exact)) => condition_mixed(&spec, &interf, &exact)?,
        (None, None) => {
            let models = vec![DetectorModel::bucket(max_true.max(2)); n_measured];
            observe(&spec, &interf, &observed, &models)?
        }
        (Some(DetectorsConfig::Scenario(s)), _) => {
            observe(&spec, &interf, &observed, &s.models(interf.n_modes(), max_true))?
        }
        (Some(DetectorsConfig::Models(models)), _) => observe(&spec, &interf, &observed, models)?,
    };
    let merit = match observed.as_exact() {
        Some(exact) if !result.is_null() => Some(figures_of_merit(&result, &spec, &exact)?),
        _ => None,
    };
    let out = SimulateOutput {
        command: "simulate",
        pattern: &c.pattern,
        interferometer: &interf,
        unnormalized: &result.unnormalized,
        normalized: result.normalized.as_deref(),
        pattern_probability: result.pattern_probability,
        merit,
    };
    Ok(vec![write_json(&out_dir.join("simulate.json"), &out)?])
}

fn pure_landscape(c: &LandscapeConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    if c.theta_points < 2 || c.phi_points < 2 {
        return Err(CliError::Config(format!(
            "field `theta_points`/`phi_points`: need at least 2 points per axis, got {} x {}",
            c.theta_points, c.phi_points
        )));
    }
    if !(0.0..=1.0).contains(&c.beta) {
        return Err(CliError::Config(format!(
            "field `beta`: |beta| = {} outside [0, 1]",
            c.beta
        )));
    }
    let axis = |[lo, hi]: [f64; 2], n: usize| -> Vec<f64> {
        (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect()
    };
    let thetas = axis(c.theta_range, c.theta_points);
    let phis = axis(c.phi_range, c.phi_points);
    let rows: Vec<Vec<String>> = (0..thetas.len() * phis.len())
        .into_par_iter()
        .map(|k| {
            let (t, p) = (thetas[k / phis.len()], phis[k % phis.len()]);
            vec![
                fmt_f64(t),
                fmt_f64(p),
                fmt_f64(pure_success_probability_reduced(t, p, c.beta)),
            ]
        })
        .collect();
    let path = out_dir.join("pure_landscape.csv");
    write_csv(&path, &["theta", "phi", "probability"], &rows)?;
    Ok(vec![path])
}

fn check_probability(field: &str, p: f64) -> Result<()> {
    if !(p > 0.0 && p < 1.0) {
        return Err(CliError::Config(format!("field `{field}`: {p} outside (0, 1)")));
    }
    Ok(())
}

fn check_epsilons(eps: &[f64]) -> Result<()> {
    if eps.is_empty() {
        return Err(CliError::Config("field `epsilons`: empty grid".into()));
    }
    if let Some(e) = eps.iter().find(|e| !(**e > 0.0 && **e < 1.0)) {
        return Err(CliError::Config(format!("field `epsilons`: {e} outside (0, 1)")));
    }
    Ok(())
}

fn exp_sweep(c: &ExpSweepConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    check_probability("p_max", c.p_max)?;
    let eps = c.epsilons.values();
    check_epsilons(&eps)?;
    if c.scenarios.is_empty() {
        return Err(CliError::Config("field `scenarios`: empty list".into()));
    }
    let two = c.two_photon_probability;
    if !(0.0..=1.0 - c.p_max).contains(&two) {
        return Err(CliError::Config(format!(
            "field `two_photon_probability`: {two} incompatible with p_max = {}",
            c.p_max
        )));
    }
    let n = c.n_modes;
    let mut written = Vec::new();
    for &scenario in &c.scenarios {
        let spec = match scenario {
            ExpScenario::TwoPhoton => {
                let mode = ModeDistribution::new(vec![1.0 - c.p_max - two, c.p_max, two])?;
                InputSpec::new(vec![mode; n])?
            }
            _ => InputSpec::uniform(n, c.p_max)?,
        };
        let detectors: DetectorScenario = scenario.detectors();
        let models = detectors.models(n, spec.max_total_photons());
        let observed = detectors.observed(n, c.detected);
        let rows: Vec<Vec<String>> = eps
            .par_iter()
            .map(|&e| -> Result<Vec<String>> {
                let chain = build_chain(n, e)?;
                let r = observe(&spec, &chain.interferometer, &observed, &models)?;
                Ok(vec![
                    fmt_f64(e),
                    fmt_f64(r.pattern_probability),
                    fmt_f64(r.prob(1)),
                ])
            })
            .collect::<Result<_>>()?;
        let path = out_dir.join(format!("exp_sweep_{}.csv", scenario.name()));
        write_csv(
            &path,
            &["epsilon", "pattern_probability", "conditional_c1"],
            &rows,
        )?;
        written.push(path);
    }
    Ok(written)
}

fn figure_str(f: Figure) -> String {
    fmt_f64(f.as_f64())
}

fn chain_row(n: usize, d: usize, eps: f64, p: f64) -> Result<Vec<String>> {
    let chain = build_chain(n, eps)?;
    let spec = InputSpec::uniform(n, p)?;
    let pattern: DetectionPattern = chain.pattern_for(d);
    let r: ConditionalResult = condition_mixed(&spec, &chain.interferometer, &pattern)?;
    let (r_out, g_out, pi_out) = match r.normalized.as_deref() {
        Some(q) => distribution_figures(q)?,
        None => (Figure::Undefined, Figure::Undefined, Figure::Undefined),
    };
    let r_in = p / (1.0 - p);
    let (r_lim, g_lim) = chain_asymptotics(n, d)?;
    Ok(vec![
        n.to_string(),
        d.to_string(),
        fmt_f64(eps),
        fmt_f64(r.pattern_probability),
        fmt_f64(r.prob(0)),
        fmt_f64(r.prob(1)),
        fmt_f64(r.prob(2)),
        figure_str(r_out),
        figure_str(g_out),
        figure_str(pi_out),
        fmt_f64(1.0 - p),
        fmt_f64(r_out.as_f64() / r_in),
        fmt_f64(r_lim),
        fmt_f64(g_lim),
    ])
}

pub const CHAIN_SWEEP_HEADER: [&str; 14] = [
    "n_modes",
    "detected",
    "epsilon",
    "pattern_probability",
    "c0",
    "c1",
    "c2",
    "r_out",
    "g_out",
    "pi_out",
    "pi_in",
    "r_ratio",
    "r_asymptote",
    "g_asymptote",
];

fn chain_sweep(c: &ChainSweepConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    check_probability("p_max", c.p_max)?;
    let eps = c.epsilons.values();
    check_epsilons(&eps)?;
    let mut points = Vec::new();
    for &n in &c.n_modes {
        if n < 3 {
            return Err(CliError::Config(format!(
                "field `n_modes`: chain needs N >= 3, got {n}"
            )));
        }
        let ds: Vec<usize> = match &c.detected {
            Some(ds) => ds.clone(),
            None => (1..n).collect(),
        };
        for d in ds {
            if d == 0 || d >= n {
                return Err(CliError::Config(format!(
                    "field `detected`: D = {d} outside 1..{} for N = {n}",
                    n - 1
                )));
            }
            for &e in &eps {
                points.push((n, d, e));
            }
        }
    }
    let rows: Vec<Vec<String>> = points
        .par_iter()
        .map(|&(n, d, e)| chain_row(n, d, e, c.p_max))
        .collect::<Result<_>>()?;
    let path = out_dir.join("chain_sweep.csv");
    write_csv(&path, &CHAIN_SWEEP_HEADER, &rows)?;
    Ok(vec![path])
}

#[derive(Serialize)]
struct NogoOutput {
    command: &'static str,
    reports: Vec<SearchReport>,
}

fn nogo_verify(c: &NogoConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let reports = match c.check {
        NogoCheck::Small => vec![verify_nogo_small(c.n_modes, c.p_max, c.trials, c.seed)?],
        NogoCheck::Patterns => {
            let (a, b) = verify_nogo_patterns(c.n_modes, c.p_max, c.trials, c.seed)?;
            vec![a, b]
        }
    };
    let out = NogoOutput {
        command: "nogo-verify",
        reports,
    };
    Ok(vec![write_json(&out_dir.join("nogo_verify.json"), &out)?])
}

/// Recompute `R` and `G` from the `c0`, `c1`, `c2` columns of a chain-sweep
/// row.
pub fn recompute_r_g(c0: f64, c1: f64, c2: f64) -> (f64, f64) {
    let r = Figure::ratio(c1, c0).as_f64();
    let g = if c1 > 0.0 { c2 * c0 / (c1 * c1) } else { f64::NAN };
    (r, g)
}
