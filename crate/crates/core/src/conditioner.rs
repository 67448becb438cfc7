//! Conditioning the output of a network on a detection pattern.
//!
//! Modes `2..N` (indices `1..N`) are measured and mode 1 (index 0) is kept.
//! For inputs that are mixtures of Fock states the kept mode is diagonal in
//! the number basis, with unnormalized coefficients
//!
//! ```text
//! c~[n1] = 1 / (n1! prod_j n_j!)  sum_{s : |s| = D + n1}  P'_s |per L[n, s]|^2
//! ```
//!
//! where `n = (n1, n_2, .., n_N)`, `P'_s = P_s / prod_i s_i!` and `D` is the
//! number of detected photons. With this scaling the coefficients sum to the
//! probability of observing the pattern, so every pipeline works on the
//! unnormalized vector and normalizes last.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{
    compositions_bounded, enumerate_inputs, factorial, InputSpec, ModeDistribution, PhotonConfig,
};
use crate::interferometer::Interferometer;
use crate::permanent::permanent_with_multiplicity_slices;

/// Coefficients above this (in magnitude) below zero are an error; smaller
/// negative values are rounding and are clamped to zero.
const NEGATIVE_CLAMP: f64 = 1e-14;

/// Photon counts registered on modes `2..N`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DetectionPattern(Vec<usize>);

impl DetectionPattern {
    pub fn new(counts: Vec<usize>) -> Self {
        Self(counts)
    }

    /// No photons on any of the `n_measured` detectors.
    pub fn zeros(n_measured: usize) -> Self {
        Self(vec![0; n_measured])
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

    /// Total number of detected photons, `D`.
    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    /// `prod_j n_j!`
    pub fn factorial_product(&self) -> f64 {
        self.0.iter().map(|&n| factorial(n)).product()
    }

    /// Every pattern on `n_measured` detectors with total at most `max_total`,
    /// ordered by total and then lexicographically.
    pub fn all_up_to(n_measured: usize, max_total: usize) -> Vec<DetectionPattern> {
        let caps = vec![max_total; n_measured];
        (0..=max_total)
            .flat_map(|d| compositions_bounded(&caps, d))
            .map(DetectionPattern)
            .collect()
    }
}

/// Photon-number statistics of mode 1 after conditioning.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionalResult {
    /// `c~[n1]` for `n1 = 0..=cap`.
    pub unnormalized: Vec<f64>,
    /// Probability of the detection pattern, `sum(c~)`.
    pub pattern_probability: f64,
    /// `c~ / pattern_probability`, absent when the pattern cannot occur.
    pub normalized: Option<Vec<f64>>,
}

impl ConditionalResult {
    /// Build from unnormalized coefficients, clamping rounding noise below
    /// zero.
    pub fn from_unnormalized(mut unnormalized: Vec<f64>) -> Self {
        if unnormalized.is_empty() {
            unnormalized.push(0.0);
        }
        for c in unnormalized.iter_mut() {
            debug_assert!(*c >= -NEGATIVE_CLAMP, "negative coefficient {c}");
            if *c < 0.0 {
                *c = 0.0;
            }
        }
        let pattern_probability: f64 = unnormalized.iter().sum();
        let normalized = (pattern_probability > 0.0)
            .then(|| unnormalized.iter().map(|c| c / pattern_probability).collect());
        Self {
            unnormalized,
            pattern_probability,
            normalized,
        }
    }

    /// Zero-probability result.
    pub fn null() -> Self {
        Self::from_unnormalized(vec![0.0])
    }

    /// True when the pattern has zero probability and no state is defined.
    pub fn is_null(&self) -> bool {
        self.normalized.is_none()
    }

    /// Normalized probability of `n` photons in mode 1 (0 beyond the cap or
    /// for a null result).
    pub fn prob(&self, n: usize) -> f64 {
        self.normalized
            .as_ref()
            .and_then(|c| c.get(n).copied())
            .unwrap_or(0.0)
    }

    /// Largest output photon number represented.
    pub fn cap(&self) -> usize {
        self.unnormalized.len() - 1
    }

    /// Add `weight * other` into this result's unnormalized coefficients.
    pub fn accumulate(acc: &mut Vec<f64>, other: &ConditionalResult, weight: f64) {
        if acc.len() < other.unnormalized.len() {
            acc.resize(other.unnormalized.len(), 0.0);
        }
        for (a, c) in acc.iter_mut().zip(&other.unnormalized) {
            *a += weight * c;
        }
    }
}

fn check_dims(n_spec: usize, interf: &Interferometer, pattern: &DetectionPattern) -> Result<()> {
    let n = interf.n_modes();
    if n_spec != n || pattern.len() + 1 != n {
        return Err(Error::DimensionMismatch(format!(
            "input spec has {n_spec} modes, interferometer {n}, pattern {} detectors (expected {})",
            pattern.len(),
            n.saturating_sub(1)
        )));
    }
    Ok(())
}

/// Mode-1 statistics of a mixed Fock-diagonal input conditioned on an exact
/// detection pattern on modes `2..N`.
pub fn condition_mixed(
    spec: &InputSpec,
    interf: &Interferometer,
    pattern: &DetectionPattern,
) -> Result<ConditionalResult> {
    check_dims(spec.n_modes(), interf, pattern)?;
    let detected = pattern.total();
    let max_total = spec.max_total_photons();
    if detected > max_total {
        return Ok(ConditionalResult::null());
    }
    let cap = max_total - detected;
    let pattern_fact = pattern.factorial_product();
    let matrix = interf.matrix();

    let mut row_reps = Vec::with_capacity(interf.n_modes());
    row_reps.push(0);
    row_reps.extend_from_slice(pattern.counts());

    let mut coeffs = Vec::with_capacity(cap + 1);
    for n1 in 0..=cap {
        row_reps[0] = n1;
        let mut sum = 0.0;
        for (s, weight) in enumerate_inputs(spec, detected + n1) {
            let amp = permanent_with_multiplicity_slices(matrix, &row_reps, s.counts())?;
            sum += weight * amp.norm_sqr();
        }
        coeffs.push(sum / (factorial(n1) * pattern_fact));
    }
    Ok(ConditionalResult::from_unnormalized(coeffs))
}

/// Two-mode special case evaluated from the closed-form double sum over input
/// photon numbers `(k, l)`, detecting `detected` photons in mode 2.
///
/// For a 2x2 unitary the products of matrix elements in the inner sum differ
/// only by a sign `(-1)^m`, so only the magnitudes `|L[i][j]|` are needed:
///
/// ```text
/// c~[k+l-D] += p1[k] p2[l] k! l! D! (k+l-D)!
///              ( sum_m (-1)^m |L11|^(k-D+m) |L21|^(D-m) |L12|^(l-m) |L22|^m
///                        / ((k-D+m)! (D-m)! (l-m)! m!) )^2
/// ```
pub fn condition_mixed_bs_closed_form(
    p1: &ModeDistribution,
    p2: &ModeDistribution,
    bs: &Interferometer,
    detected: usize,
) -> Result<ConditionalResult> {
    if bs.n_modes() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "closed form needs a two-mode beam splitter, got {} modes",
            bs.n_modes()
        )));
    }
    let max_total = p1.support_max() + p2.support_max();
    if detected > max_total {
        return Ok(ConditionalResult::null());
    }
    let t11 = bs.element(0, 0).norm();
    let t12 = bs.element(0, 1).norm();
    let t21 = bs.element(1, 0).norm();
    let t22 = bs.element(1, 1).norm();
    let d = detected;

    let mut coeffs = vec![0.0; max_total - d + 1];
    for k in 0..=p1.support_max() {
        let pk = p1.prob(k);
        if pk == 0.0 {
            continue;
        }
        for l in 0..=p2.support_max() {
            let pl = p2.prob(l);
            if pl == 0.0 || k + l < d {
                continue;
            }
            let n1 = k + l - d;
            let lo = d.saturating_sub(k);
            let hi = d.min(l);
            let mut inner = 0.0;
            for m in lo..=hi {
                let term = t11.powi((k + m - d) as i32)
                    * t21.powi((d - m) as i32)
                    * t12.powi((l - m) as i32)
                    * t22.powi(m as i32)
                    / (factorial(k + m - d) * factorial(d - m) * factorial(l - m) * factorial(m));
                if m % 2 == 0 {
                    inner += term;
                } else {
                    inner -= term;
                }
            }
            coeffs[n1] +=
                pk * pl * factorial(k) * factorial(l) * factorial(d) * factorial(n1) * inner * inner;
        }
    }
    Ok(ConditionalResult::from_unnormalized(coeffs))
}

/// Pure state over a fixed number of modes, as Fock-basis amplitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    n_modes: usize,
    amplitudes: BTreeMap<PhotonConfig, Complex64>,
}

/// Tolerance on `sum |amplitude|^2 = 1`.
pub const PURE_NORM_TOL: f64 = 1e-10;

impl PureState {
    /// Normalized state; errors if the squared norm differs from 1.
    pub fn new(n_modes: usize, amplitudes: BTreeMap<PhotonConfig, Complex64>) -> Result<Self> {
        let state = Self::unnormalized(n_modes, amplitudes)?;
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > PURE_NORM_TOL {
            return Err(Error::NotNormalized { sum: norm });
        }
        Ok(state)
    }

    /// Possibly unnormalized state; check [`PureState::is_normalized`].
    pub fn unnormalized(n_modes: usize, amplitudes: BTreeMap<PhotonConfig, Complex64>) -> Result<Self> {
        if let Some(c) = amplitudes.keys().find(|c| c.len() != n_modes) {
            return Err(Error::DimensionMismatch(format!(
                "configuration {:?} does not have {n_modes} modes",
                c.counts()
            )));
        }
        Ok(Self { n_modes, amplitudes })
    }

    pub fn vacuum(n_modes: usize) -> Self {
        let mut amplitudes = BTreeMap::new();
        amplitudes.insert(PhotonConfig::vacuum(n_modes), Complex64::new(1.0, 0.0));
        Self { n_modes, amplitudes }
    }

    /// Single-mode state `sum_n amps[n] |n>`.
    pub fn single_mode(amps: &[Complex64]) -> Self {
        let amplitudes = amps
            .iter()
            .enumerate()
            .filter(|(_, a)| **a != Complex64::new(0.0, 0.0))
            .map(|(n, &a)| (PhotonConfig::single(n), a))
            .collect();
        Self {
            n_modes: 1,
            amplitudes,
        }
    }

    /// Fock state `|counts>`.
    pub fn fock(counts: Vec<usize>) -> Result<Self> {
        let config = PhotonConfig::new(counts)?;
        let n_modes = config.len();
        let mut amplitudes = BTreeMap::new();
        amplitudes.insert(config, Complex64::new(1.0, 0.0));
        Ok(Self { n_modes, amplitudes })
    }

    /// Tensor product `self ⊗ other`, `other`'s modes appended after `self`'s.
    pub fn tensor(&self, other: &PureState) -> PureState {
        let mut amplitudes = BTreeMap::new();
        for (ca, &a) in &self.amplitudes {
            for (cb, &b) in &other.amplitudes {
                amplitudes.insert(ca.concat(cb), a * b);
            }
        }
        PureState {
            n_modes: self.n_modes + other.n_modes,
            amplitudes,
        }
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn amplitudes(&self) -> &BTreeMap<PhotonConfig, Complex64> {
        &self.amplitudes
    }

    pub fn amplitude(&self, counts: &[usize]) -> Complex64 {
        PhotonConfig::new(counts.to_vec())
            .ok()
            .and_then(|c| self.amplitudes.get(&c).copied())
            .unwrap_or_default()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= PURE_NORM_TOL
    }

    /// Rescaled to unit norm; `None` for the zero vector.
    pub fn normalized(&self) -> Option<PureState> {
        let norm = self.norm_sqr().sqrt();
        (norm > 0.0).then(|| PureState {
            n_modes: self.n_modes,
            amplitudes: self
                .amplitudes
                .iter()
                .map(|(c, &a)| (c.clone(), a / norm))
                .collect(),
        })
    }

    /// `|<other|self>|^2 / (<self|self> <other|other>)`.
    pub fn fidelity(&self, other: &PureState) -> f64 {
        let overlap: Complex64 = self
            .amplitudes
            .iter()
            .filter_map(|(c, &a)| other.amplitudes.get(c).map(|&b| b.conj() * a))
            .sum();
        overlap.norm_sqr() / (self.norm_sqr() * other.norm_sqr())
    }
}

/// Apply a network to a pure state using
/// `<n|U|s> = per(L[n, s]) / sqrt(prod n_i! prod s_i!)`.
pub fn propagate_pure(state: &PureState, interf: &Interferometer) -> Result<PureState> {
    let n = interf.n_modes();
    if state.n_modes != n {
        return Err(Error::DimensionMismatch(format!(
            "{}-mode state through a {n}-mode interferometer",
            state.n_modes
        )));
    }
    let matrix = interf.matrix();
    let mut out: BTreeMap<PhotonConfig, Complex64> = BTreeMap::new();
    let mut by_total: BTreeMap<usize, Vec<Vec<usize>>> = BTreeMap::new();
    for (s, &amp) in &state.amplitudes {
        let total = s.total();
        let outputs = by_total
            .entry(total)
            .or_insert_with(|| compositions_bounded(&vec![total; n], total));
        let s_fact = s.factorial_product();
        for counts in outputs.iter() {
            let per = permanent_with_multiplicity_slices(matrix, counts, s.counts())?;
            let n_fact: f64 = counts.iter().map(|&c| factorial(c)).product();
            let value = amp * per / (n_fact * s_fact).sqrt();
            *out.entry(PhotonConfig::new(counts.clone())?).or_default() += value;
        }
    }
    out.retain(|_, a| *a != Complex64::new(0.0, 0.0));
    Ok(PureState {
        n_modes: n,
        amplitudes: out,
    })
}

/// Mode-1 state after projecting an `N`-mode pure state onto `pattern`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionedPure {
    /// Normalized single-mode state, `None` when the projection vanishes.
    pub state: Option<PureState>,
    /// Unnormalized single-mode projection.
    pub projection: PureState,
    /// Squared norm of the projection.
    pub probability: f64,
}

/// Project modes `2..N` of `state` onto the exact counts in `pattern`.
pub fn condition_pure(state: &PureState, pattern: &DetectionPattern) -> Result<ConditionedPure> {
    if pattern.len() + 1 != state.n_modes {
        return Err(Error::DimensionMismatch(format!(
            "pattern over {} detectors for a {}-mode state",
            pattern.len(),
            state.n_modes
        )));
    }
    let amplitudes: BTreeMap<PhotonConfig, Complex64> = state
        .amplitudes
        .iter()
        .filter(|(c, _)| &c.counts()[1..] == pattern.counts())
        .map(|(c, &a)| (PhotonConfig::single(c[0]), a))
        .collect();
    let projection = PureState {
        n_modes: 1,
        amplitudes,
    };
    let probability = projection.norm_sqr();
    Ok(ConditionedPure {
        state: projection.normalized(),
        projection,
        probability,
    })
}
