//! Imperfect photodetection as a stochastic map from true photon counts to
//! reported outcomes.
//!
//! An observed outcome mixes the conditional results of every true pattern,
//! weighted by the product of per-detector response probabilities. All mixing
//! happens on unnormalized coefficients.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::conditioner::{condition_mixed, ConditionalResult, DetectionPattern};
use crate::error::{Error, Result};
use crate::fock::InputSpec;
use crate::interferometer::Interferometer;

/// Tolerance on each response row summing to 1.
pub const ROW_SUM_TOL: f64 = 1e-12;

/// A reported detector outcome.
///
/// Serialized as a bare integer for exact counts and as `">=k"` for buckets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "OutcomeRepr", into = "OutcomeRepr")]
pub enum Outcome {
    Count(usize),
    AtLeast(usize),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum OutcomeRepr {
    Count(usize),
    Text(String),
}

impl From<Outcome> for OutcomeRepr {
    fn from(o: Outcome) -> Self {
        match o {
            Outcome::Count(n) => OutcomeRepr::Count(n),
            b @ Outcome::AtLeast(_) => OutcomeRepr::Text(b.to_string()),
        }
    }
}

impl TryFrom<OutcomeRepr> for Outcome {
    type Error = String;

    fn try_from(r: OutcomeRepr) -> std::result::Result<Self, String> {
        match r {
            OutcomeRepr::Count(n) => Ok(Outcome::Count(n)),
            OutcomeRepr::Text(s) => s.parse(),
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Count(n) => write!(f, "{n}"),
            Outcome::AtLeast(n) => write!(f, ">={n}"),
        }
    }
}

impl FromStr for Outcome {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        let parse = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| format!("invalid detector outcome {s:?}; expected an integer or \">=k\""))
        };
        match s.strip_prefix(">=").or_else(|| s.strip_prefix('≥')) {
            Some(rest) => parse(rest).map(Outcome::AtLeast),
            None => parse(s).map(Outcome::Count),
        }
    }
}

/// Response of one detector: `P(reported | true)` for true counts
/// `0..=max_true`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DetectorModelJson", into = "DetectorModelJson")]
pub struct DetectorModel {
    outcomes: Vec<Outcome>,
    /// `response[t][r]`
    response: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DetectorModelJson {
    outcomes: Vec<Outcome>,
    response: Vec<Vec<f64>>,
}

impl From<DetectorModel> for DetectorModelJson {
    fn from(m: DetectorModel) -> Self {
        Self {
            outcomes: m.outcomes,
            response: m.response,
        }
    }
}

impl TryFrom<DetectorModelJson> for DetectorModel {
    type Error = Error;

    fn try_from(j: DetectorModelJson) -> Result<Self> {
        DetectorModel::new(j.outcomes, j.response)
    }
}

impl DetectorModel {
    /// Validate a response matrix: one row per true count starting at 0, one
    /// column per outcome, stochastic rows.
    pub fn new(outcomes: Vec<Outcome>, response: Vec<Vec<f64>>) -> Result<Self> {
        if outcomes.is_empty() || response.is_empty() {
            return Err(Error::BadParameters(
                "detector needs outcomes and at least one row".into(),
            ));
        }
        for (i, o) in outcomes.iter().enumerate() {
            if outcomes[..i].contains(o) {
                return Err(Error::BadParameters(format!("duplicate detector outcome {o}")));
            }
        }
        for (t, row) in response.iter().enumerate() {
            if row.len() != outcomes.len() {
                return Err(Error::DimensionMismatch(format!(
                    "response row {t} has {} entries for {} outcomes",
                    row.len(),
                    outcomes.len()
                )));
            }
            if let Some(&v) = row.iter().find(|v| !(0.0..=1.0).contains(*v)) {
                return Err(Error::InvalidProbability {
                    value: v,
                    context: format!("detector response row {t}"),
                });
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::NotNormalized { sum });
            }
        }
        Ok(Self { outcomes, response })
    }

    /// Exact photon counting up to `max_true`.
    pub fn ideal(max_true: usize) -> Self {
        let outcomes = (0..=max_true).map(Outcome::Count).collect();
        let response = (0..=max_true)
            .map(|t| (0..=max_true).map(|r| if r == t { 1.0 } else { 0.0 }).collect())
            .collect();
        Self { outcomes, response }
    }

    /// Reports 0, 1 or ">=2" faithfully.
    pub fn bucket(max_true: usize) -> Self {
        Self::bucket_with_dark_counts(max_true, 0.0, 0.0)
    }

    /// Reports 0, 1 or ">=2"; a vacuum is reported as ">=2" with probability
    /// `from_zero` and a single photon with probability `from_one`.
    pub fn bucket_with_dark_counts(max_true: usize, from_zero: f64, from_one: f64) -> Self {
        let outcomes = vec![Outcome::Count(0), Outcome::Count(1), Outcome::AtLeast(2)];
        let response = (0..=max_true)
            .map(|t| match t {
                0 => vec![1.0 - from_zero, 0.0, from_zero],
                1 => vec![0.0, 1.0 - from_one, from_one],
                _ => vec![0.0, 0.0, 1.0],
            })
            .collect();
        Self { outcomes, response }
    }

    /// Counting detector that reports `t` true photons as vacuum with
    /// probability `miss^t` and correctly otherwise.
    pub fn vacuum_inefficient(max_true: usize, miss: f64) -> Self {
        let mut m = Self::ideal(max_true);
        for (t, row) in m.response.iter_mut().enumerate().skip(1) {
            let p0 = miss.powi(t as i32);
            row[0] = p0;
            row[t] = 1.0 - p0;
        }
        m
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn response(&self) -> &[Vec<f64>] {
        &self.response
    }

    /// Largest true photon number covered.
    pub fn max_true(&self) -> usize {
        self.response.len() - 1
    }

    /// `P(reported | true)`; 0 for outcomes outside the alphabet.
    pub fn prob(&self, reported: Outcome, true_count: usize) -> f64 {
        match self.outcomes.iter().position(|&o| o == reported) {
            Some(r) => self.response[true_count][r],
            None => 0.0,
        }
    }
}

/// Detector numbers used for the experimental estimates: 90% efficient
/// counting detectors on modes `3..N`, and a ">=2" detector on mode 2 with
/// dark-count probabilities `1e-6` (from vacuum) and `1e-3` (from one photon).
pub fn experimental_detector_suite(max_true: usize) -> (DetectorModel, DetectorModel) {
    (
        DetectorModel::vacuum_inefficient(max_true, 0.1),
        DetectorModel::bucket_with_dark_counts(max_true, 1e-6, 1e-3),
    )
}

/// Detector configurations of increasing realism for the chain experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DetectorScenario {
    /// Exact counting everywhere; outcome `(D, 0, .., 0)`.
    Ideal,
    /// ">=2" on mode 2, exact elsewhere.
    Bucket,
    /// As `Bucket`, with 90% efficient detectors on modes `3..N`.
    BucketEfficiency,
    /// As `BucketEfficiency`, with dark counts on mode 2.
    DarkCounts,
}

impl DetectorScenario {
    pub const ALL: [DetectorScenario; 4] = [
        DetectorScenario::Ideal,
        DetectorScenario::Bucket,
        DetectorScenario::BucketEfficiency,
        DetectorScenario::DarkCounts,
    ];

    /// Models for detectors on modes `2..N`.
    pub fn models(self, n_modes: usize, max_true: usize) -> Vec<DetectorModel> {
        let (lossy, dark) = experimental_detector_suite(max_true);
        let (first, rest) = match self {
            DetectorScenario::Ideal => (DetectorModel::ideal(max_true), DetectorModel::ideal(max_true)),
            DetectorScenario::Bucket => (DetectorModel::bucket(max_true), DetectorModel::ideal(max_true)),
            DetectorScenario::BucketEfficiency => (DetectorModel::bucket(max_true), lossy),
            DetectorScenario::DarkCounts => (dark, lossy),
        };
        let mut models = vec![first];
        models.extend(std::iter::repeat_n(rest, n_modes.saturating_sub(2)));
        models
    }

    /// Outcome kept for `detected` photons in mode 2: the exact count for
    /// `Ideal`, ">=2" otherwise.
    pub fn observed(self, n_modes: usize, detected: usize) -> ObservedPattern {
        let first = match self {
            DetectorScenario::Ideal => Outcome::Count(detected),
            _ => Outcome::AtLeast(2),
        };
        let mut outcomes = vec![first];
        outcomes.extend(std::iter::repeat_n(Outcome::Count(0), n_modes.saturating_sub(2)));
        ObservedPattern(outcomes)
    }
}

/// Reported outcome of each detector on modes `2..N`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ObservedPattern(pub Vec<Outcome>);

impl ObservedPattern {
    pub fn outcomes(&self) -> &[Outcome] {
        &self.0
    }

    /// Exact-count pattern, if every outcome is an exact count.
    pub fn as_exact(&self) -> Option<DetectionPattern> {
        self.0
            .iter()
            .map(|o| match o {
                Outcome::Count(n) => Some(*n),
                Outcome::AtLeast(_) => None,
            })
            .collect::<Option<Vec<_>>>()
            .map(DetectionPattern::new)
    }
}

/// Mode-1 statistics conditioned on detectors reporting `observed`:
/// `c~(obs) = sum_t prod_j P(obs_j | t_j) c~(t)`.
pub fn observe(
    spec: &InputSpec,
    interf: &Interferometer,
    observed: &ObservedPattern,
    models: &[DetectorModel],
) -> Result<ConditionalResult> {
    let n_measured = interf.n_modes().saturating_sub(1);
    if observed.0.len() != n_measured || models.len() != n_measured || spec.n_modes() != interf.n_modes() {
        return Err(Error::DimensionMismatch(format!(
            "{} outcomes and {} detector models for a {}-mode interferometer with {}-mode input",
            observed.0.len(),
            models.len(),
            interf.n_modes(),
            spec.n_modes()
        )));
    }
    let max_total = spec.max_total_photons();
    for (j, (o, m)) in observed.0.iter().zip(models).enumerate() {
        if !m.outcomes().contains(o) {
            return Err(Error::BadParameters(format!(
                "outcome {o} is not reported by the detector on mode {}",
                j + 2
            )));
        }
        if m.max_true() < max_total {
            return Err(Error::DimensionMismatch(format!(
                "detector on mode {} covers {} photons, input can carry {max_total}",
                j + 2,
                m.max_true()
            )));
        }
    }

    let mut acc = vec![0.0];
    for t in DetectionPattern::all_up_to(n_measured, max_total) {
        let weight: f64 = t
            .counts()
            .iter()
            .zip(observed.0.iter().zip(models))
            .map(|(&tj, (&o, m))| m.prob(o, tj))
            .product();
        if weight == 0.0 {
            continue;
        }
        let res = condition_mixed(spec, interf, &t)?;
        ConditionalResult::accumulate(&mut acc, &res, weight);
    }
    Ok(ConditionalResult::from_unnormalized(acc))
}
