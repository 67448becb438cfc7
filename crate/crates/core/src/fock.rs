//! Photon-number configurations and per-mode input distributions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the normalization of a per-mode distribution.
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Tolerance on the normalization accepted by [`distribution_moments`].
pub const MOMENTS_TOL: f64 = 1e-9;

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Occupation numbers over a set of modes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PhotonConfig(Vec<usize>);

impl PhotonConfig {
    pub fn new(counts: Vec<usize>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::DimensionMismatch(
                "a photon configuration needs at least one mode".into(),
            ));
        }
        Ok(Self(counts))
    }

    pub fn vacuum(n_modes: usize) -> Self {
        Self(vec![0; n_modes.max(1)])
    }

    /// Configuration with a single photon-number entry, used for mode-1 states.
    pub fn single(count: usize) -> Self {
        Self(vec![count])
    }

    pub fn counts(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    /// `prod_i counts[i]!`
    pub fn factorial_product(&self) -> f64 {
        self.0.iter().map(|&c| factorial(c)).product()
    }

    /// Concatenation `self ⊗ other` over disjoint mode sets.
    pub fn concat(&self, other: &PhotonConfig) -> PhotonConfig {
        let mut counts = self.0.clone();
        counts.extend_from_slice(&other.0);
        PhotonConfig(counts)
    }
}

impl std::ops::Index<usize> for PhotonConfig {
    type Output = usize;

    fn index(&self, i: usize) -> &usize {
        &self.0[i]
    }
}

impl From<PhotonConfig> for Vec<usize> {
    fn from(c: PhotonConfig) -> Self {
        c.0
    }
}

/// Photon-number distribution of a single input mode.
///
/// Stored densely: `probabilities[k]` is the probability of `k` photons. The
/// support is exactly what was given; there is no implicit tail.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ModeDistribution {
    probabilities: Vec<f64>,
}

impl ModeDistribution {
    pub fn new(probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.is_empty() {
            return Err(Error::BadDistributionShape("empty distribution".into()));
        }
        for &p in &probabilities {
            if !p.is_finite() || !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidProbability {
                    value: p,
                    context: "photon-number probabilities must lie in [0, 1]".into(),
                });
            }
        }
        let sum: f64 = probabilities.iter().sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::NotNormalized { sum });
        }
        Ok(Self { probabilities })
    }

    /// Build from sparse `(photon_count, probability)` pairs.
    pub fn from_pairs(pairs: &[(usize, f64)]) -> Result<Self> {
        let len = pairs.iter().map(|&(k, _)| k + 1).max().unwrap_or(0);
        let mut dense = vec![0.0; len];
        for &(k, p) in pairs {
            dense[k] += p;
        }
        Self::new(dense)
    }

    /// `(1 - p)|0><0| + p|1><1|`
    pub fn two_level(p: f64) -> Result<Self> {
        if !p.is_finite() || !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidProbability {
                value: p,
                context: "single-photon probability must lie in [0, 1]".into(),
            });
        }
        Ok(Self {
            probabilities: vec![1.0 - p, p],
        })
    }

    pub fn vacuum() -> Self {
        Self {
            probabilities: vec![1.0],
        }
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn prob(&self, count: usize) -> f64 {
        self.probabilities.get(count).copied().unwrap_or(0.0)
    }

    /// Largest photon count carrying nonzero probability.
    pub fn support_max(&self) -> usize {
        self.probabilities.iter().rposition(|&p| p > 0.0).unwrap_or(0)
    }

    /// True when the mode is the vacuum with certainty.
    pub fn is_vacuum(&self) -> bool {
        self.support_max() == 0
    }

    pub fn mean(&self) -> f64 {
        self.probabilities
            .iter()
            .enumerate()
            .map(|(k, p)| k as f64 * p)
            .sum()
    }
}

impl TryFrom<Vec<f64>> for ModeDistribution {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<ModeDistribution> for Vec<f64> {
    fn from(d: ModeDistribution) -> Self {
        d.probabilities
    }
}

/// Independent per-mode photon-number distributions of the network inputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct InputSpec {
    modes: Vec<ModeDistribution>,
}

impl InputSpec {
    pub fn new(modes: Vec<ModeDistribution>) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::DimensionMismatch(
                "an input specification needs at least one mode".into(),
            ));
        }
        Ok(Self { modes })
    }

    /// Two-level sources with single-photon probabilities `ps`.
    pub fn two_level(ps: &[f64]) -> Result<Self> {
        let modes = ps
            .iter()
            .map(|&p| ModeDistribution::two_level(p))
            .collect::<Result<Vec<_>>>()?;
        Self::new(modes)
    }

    /// `n_modes` identical two-level sources.
    pub fn uniform(n_modes: usize, p: f64) -> Result<Self> {
        Self::two_level(&vec![p; n_modes])
    }

    pub fn n_modes(&self) -> usize {
        self.modes.len()
    }

    pub fn modes(&self) -> &[ModeDistribution] {
        &self.modes
    }

    pub fn mode(&self, i: usize) -> &ModeDistribution {
        &self.modes[i]
    }

    /// Maximum over modes of the single-photon probability.
    pub fn p_max(&self) -> f64 {
        self.modes.iter().map(|m| m.prob(1)).fold(0.0, f64::max)
    }

    /// Number of modes that are not the vacuum with certainty.
    pub fn active_modes(&self) -> usize {
        self.modes.iter().filter(|m| !m.is_vacuum()).count()
    }

    /// Largest total photon number with nonzero probability.
    pub fn max_total_photons(&self) -> usize {
        self.modes.iter().map(ModeDistribution::support_max).sum()
    }

    /// True when no mode carries probability on two or more photons.
    pub fn is_two_level(&self) -> bool {
        self.modes.iter().all(|m| m.support_max() <= 1)
    }

    /// `P_s = prod_i p_{i, s_i}`.
    pub fn probability(&self, config: &PhotonConfig) -> f64 {
        self.modes
            .iter()
            .zip(config.counts())
            .map(|(m, &k)| m.prob(k))
            .product()
    }

    /// `P'_s = P_s / prod_i s_i!`, the weight entering the conditional sums.
    pub fn weight(&self, config: &PhotonConfig) -> f64 {
        self.probability(config) / config.factorial_product()
    }
}

/// All input configurations with `total_photons` photons and nonzero
/// probability, paired with their weight `P'_s`, in ascending
/// lexicographic order.
pub fn enumerate_inputs(
    spec: &InputSpec,
    total_photons: usize,
) -> impl Iterator<Item = (PhotonConfig, f64)> + '_ {
    let caps: Vec<usize> = spec.modes.iter().map(ModeDistribution::support_max).collect();
    let mut configs = Vec::new();
    let mut prefix = Vec::with_capacity(caps.len());
    collect_compositions(&caps, total_photons, &mut prefix, &mut configs);
    configs.into_iter().filter_map(move |counts| {
        let config = PhotonConfig(counts);
        let w = spec.weight(&config);
        (w > 0.0).then_some((config, w))
    })
}

/// Every vector `v` with `v[i] <= caps[i]` and `sum(v) == total`, ascending
/// lexicographic.
pub(crate) fn compositions_bounded(caps: &[usize], total: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(caps.len());
    collect_compositions(caps, total, &mut prefix, &mut out);
    out
}

fn collect_compositions(
    caps: &[usize],
    remaining: usize,
    prefix: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    let depth = prefix.len();
    if depth == caps.len() {
        if remaining == 0 {
            out.push(prefix.clone());
        }
        return;
    }
    let rest: usize = caps[depth + 1..].iter().sum();
    let lo = remaining.saturating_sub(rest);
    let hi = caps[depth].min(remaining);
    for k in lo..=hi {
        prefix.push(k);
        collect_compositions(caps, remaining - k, prefix, out);
        prefix.pop();
    }
}

/// Mean and variance of a photon-number distribution given as
/// `(n, probability)` pairs.
pub fn distribution_moments(coeffs: &[(usize, f64)]) -> Result<(f64, f64)> {
    let sum: f64 = coeffs.iter().map(|&(_, p)| p).sum();
    if (sum - 1.0).abs() > MOMENTS_TOL {
        return Err(Error::NotNormalized { sum });
    }
    let mean: f64 = coeffs.iter().map(|&(n, p)| n as f64 * p).sum();
    let var: f64 = coeffs
        .iter()
        .map(|&(n, p)| {
            let d = n as f64 - mean;
            d * d * p
        })
        .sum();
    Ok((mean, var))
}
