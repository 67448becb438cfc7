//! Scenario configuration files.
//!
//! Every file is a JSON object with `"version": 1` and a `"command"`
//! discriminator; the remaining fields depend on the command and unknown
//! fields are rejected.

use photon_post::detectors::{DetectorModel, DetectorScenario, Outcome};
use photon_post::search::SearchTask;
use serde::Deserialize;

pub const CONFIG_VERSION: u64 = 1;

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Config {
    Simulate(SimulateConfig),
    PureLandscape(LandscapeConfig),
    ExpSweep(ExpSweepConfig),
    ChainSweep(ChainSweepConfig),
    NogoVerify(NogoConfig),
    Search(SearchTask),
}

impl Config {
    pub fn name(&self) -> &'static str {
        match self {
            Config::Simulate(_) => "simulate",
            Config::PureLandscape(_) => "pure-landscape",
            Config::ExpSweep(_) => "exp-sweep",
            Config::ChainSweep(_) => "chain-sweep",
            Config::NogoVerify(_) => "nogo-verify",
            Config::Search(_) => "search",
        }
    }

    /// Commands whose configuration carries a top-level `seed`.
    pub fn takes_seed(command: &str) -> bool {
        matches!(command, "simulate" | "nogo-verify" | "search")
    }
}

/// Input sources: either single-photon probabilities of two-level sources or
/// full photon-number distributions, one per mode.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputsConfig {
    #[serde(default)]
    pub p: Option<Vec<f64>>,
    #[serde(default)]
    pub distributions: Option<Vec<Vec<f64>>>,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InterferometerConfig {
    Identity {
        n_modes: usize,
    },
    BeamSplitter {
        theta: f64,
        phi: f64,
    },
    Chain {
        n_modes: usize,
        epsilon: f64,
    },
    /// Seeded Haar-random unitary; the seed defaults to the config `seed`.
    Haar {
        n_modes: usize,
        #[serde(default)]
        seed: Option<u64>,
    },
    /// Explicit matrix, rows of `[re, im]` pairs.
    Matrix {
        rows: Vec<Vec<[f64; 2]>>,
    },
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum DetectorsConfig {
    Scenario(DetectorScenario),
    Models(Vec<DetectorModel>),
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub inputs: InputsConfig,
    pub interferometer: InterferometerConfig,
    /// Reported outcome per detector on modes `2..N`: counts or `">=k"`.
    pub pattern: Vec<Outcome>,
    #[serde(default)]
    pub detectors: Option<DetectorsConfig>,
    #[serde(default)]
    pub seed: Option<u64>,
}

/// A one-dimensional grid: an explicit list, evenly spaced points, or
/// points evenly spaced in `log10`.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    List(Vec<f64>),
    Linear(LinearGrid),
    Log(LogGrid),
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearGrid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogGrid {
    pub log_min: f64,
    pub log_max: f64,
    pub points: usize,
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        let spaced = |lo: f64, hi: f64, n: usize| -> Vec<f64> {
            match n {
                0 => Vec::new(),
                1 => vec![lo],
                _ => (0..n)
                    .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
                    .collect(),
            }
        };
        match self {
            Grid::List(v) => v.clone(),
            Grid::Linear(g) => spaced(g.min, g.max, g.points),
            Grid::Log(g) => spaced(g.log_min, g.log_max, g.points)
                .into_iter()
                .map(|x| 10f64.powf(x))
                .collect(),
        }
    }
}

fn default_beta() -> f64 {
    1.0
}

fn default_range() -> [f64; 2] {
    [0.0, std::f64::consts::PI]
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LandscapeConfig {
    pub theta_points: usize,
    pub phi_points: usize,
    #[serde(default = "default_range")]
    pub theta_range: [f64; 2],
    #[serde(default = "default_range")]
    pub phi_range: [f64; 2],
    /// `|beta|` of every source.
    #[serde(default = "default_beta")]
    pub beta: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExpScenario {
    Ideal,
    Bucket,
    BucketEfficiency,
    DarkCounts,
    /// `BucketEfficiency` with a two-photon component in every source.
    TwoPhoton,
}

impl ExpScenario {
    pub fn name(self) -> &'static str {
        match self {
            ExpScenario::Ideal => "ideal",
            ExpScenario::Bucket => "bucket",
            ExpScenario::BucketEfficiency => "bucket-efficiency",
            ExpScenario::DarkCounts => "dark-counts",
            ExpScenario::TwoPhoton => "two-photon",
        }
    }

    pub fn detectors(self) -> DetectorScenario {
        match self {
            ExpScenario::Ideal => DetectorScenario::Ideal,
            ExpScenario::Bucket => DetectorScenario::Bucket,
            ExpScenario::BucketEfficiency | ExpScenario::TwoPhoton => DetectorScenario::BucketEfficiency,
            ExpScenario::DarkCounts => DetectorScenario::DarkCounts,
        }
    }
}

fn default_exp_modes() -> usize {
    4
}

fn default_detected() -> usize {
    2
}

fn default_two_photon() -> f64 {
    0.001
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpSweepConfig {
    #[serde(default = "default_exp_modes")]
    pub n_modes: usize,
    pub p_max: f64,
    pub epsilons: Grid,
    pub scenarios: Vec<ExpScenario>,
    /// Photons detected in mode 2 for the ideal scenario.
    #[serde(default = "default_detected")]
    pub detected: usize,
    /// Two-photon probability of each source in the `two-photon` scenario,
    /// taken from the vacuum probability.
    #[serde(default = "default_two_photon")]
    pub two_photon_probability: f64,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainSweepConfig {
    pub n_modes: Vec<usize>,
    /// Detected photon numbers; all of `1..N` when absent.
    #[serde(default)]
    pub detected: Option<Vec<usize>>,
    pub p_max: f64,
    pub epsilons: Grid,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NogoCheck {
    /// Two- and three-mode networks, every pattern.
    Small,
    /// `D = 1` with equal inputs and `D = M - 1` with random inputs.
    Patterns,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NogoConfig {
    pub check: NogoCheck,
    pub n_modes: usize,
    pub p_max: f64,
    pub trials: usize,
    pub seed: u64,
}
