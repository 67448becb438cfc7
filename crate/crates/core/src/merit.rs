//! Figures of merit for single-mode photon statistics and the bounds on them.
//!
//! For a diagonal state `sum_n q_n |n><n|`:
//!
//! * `R = q1 / q0`, the one-to-zero photon ratio;
//! * `G = (q2 / q1) / (q1 / q0)`, the normalized two-photon weight (1/2 for
//!   Poisson light, 0 without a two-photon component);
//! * `Pi = (<n^2> - <n>^2) / <n>`, below 1 for sub-Poissonian light.
//!
//! Inputs are summarized by `R_in = p_max / (1 - p_max)` and `Pi_in`, the
//! smallest `Pi` over the input modes (`1 - p_max` for two-level sources).
//! Any conditional result from two-level inputs satisfies
//! `R_out <= R_in (M - D)`.

use serde::{Deserialize, Serialize};

use crate::conditioner::{ConditionalResult, DetectionPattern};
use crate::error::{Error, Result};
use crate::fock::{distribution_moments, factorial, InputSpec, ModeDistribution};
use crate::interferometer::Interferometer;
use crate::permanent::permanent_with_multiplicity_slices;

/// Slack allowed on `R_out <= R_in (M - D)`.
pub const BOUND_TOL: f64 = 1e-9;

/// A figure of merit that may be infinite or undefined.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Figure {
    Finite(f64),
    Infinite,
    Undefined,
}

impl Figure {
    /// `num / den` with `x/0` infinite for `x > 0` and `0/0` undefined.
    pub fn ratio(num: f64, den: f64) -> Self {
        if den > 0.0 {
            Figure::Finite(num / den)
        } else if num > 0.0 {
            Figure::Infinite
        } else {
            Figure::Undefined
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Figure::Finite(x) => Some(x),
            _ => None,
        }
    }

    /// Numeric value with infinity mapped to `f64::INFINITY` and undefined to
    /// NaN.
    pub fn as_f64(self) -> f64 {
        match self {
            Figure::Finite(x) => x,
            Figure::Infinite => f64::INFINITY,
            Figure::Undefined => f64::NAN,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeritReport {
    pub r_out: Figure,
    pub g_out: Figure,
    pub pi_out: Figure,
    pub r_in: Figure,
    pub g_in: Figure,
    pub pi_in: Figure,
    pub p_max: f64,
    /// Normalized single-photon probability of the output.
    pub c1: f64,
    /// `c1 > p_max`.
    pub improvement_c1: bool,
    /// `R_in (M - D)`.
    pub bound_rhs: f64,
    /// Whether `R_out <= R_in (M - D)` holds; only meaningful for two-level
    /// inputs and `None` otherwise.
    pub bound_holds: Option<bool>,
}

fn r_of(q: &[f64]) -> Figure {
    let at = |n: usize| q.get(n).copied().unwrap_or(0.0);
    Figure::ratio(at(1), at(0))
}

fn g_of(q: &[f64]) -> Figure {
    let at = |n: usize| q.get(n).copied().unwrap_or(0.0);
    let (q0, q1, q2) = (at(0), at(1), at(2));
    if q1 > 0.0 {
        Figure::Finite(q2 * q0 / (q1 * q1))
    } else {
        Figure::Undefined
    }
}

/// `Pi` of a normalized dense distribution.
pub fn mandel_pi(q: &[f64]) -> Result<Figure> {
    let pairs: Vec<(usize, f64)> = q.iter().copied().enumerate().collect();
    let (mean, var) = distribution_moments(&pairs)?;
    Ok(if mean > 0.0 {
        Figure::Finite(var / mean)
    } else {
        Figure::Undefined
    })
}

fn mode_pi(m: &ModeDistribution) -> Figure {
    mandel_pi(m.probabilities()).unwrap_or(Figure::Undefined)
}

/// `R`, `G` and `Pi` of a normalized distribution.
pub fn distribution_figures(q: &[f64]) -> Result<(Figure, Figure, Figure)> {
    Ok((r_of(q), g_of(q), mandel_pi(q)?))
}

/// Compare a conditional output with its inputs.
pub fn figures_of_merit(
    result: &ConditionalResult,
    spec: &InputSpec,
    pattern: &DetectionPattern,
) -> Result<MeritReport> {
    let q = result.normalized.as_ref().ok_or(Error::ZeroProbabilityPattern)?;
    let (r_out, g_out, pi_out) = distribution_figures(q)?;
    let p_max = spec.p_max();
    let r_in = Figure::ratio(p_max, 1.0 - p_max);
    let pi_in = spec
        .modes()
        .iter()
        .map(mode_pi)
        .filter_map(Figure::finite)
        .reduce(f64::min)
        .map_or(Figure::Undefined, Figure::Finite);
    let m_minus_d = spec.active_modes().saturating_sub(pattern.total());
    let bound_rhs = r_in.as_f64() * m_minus_d as f64;
    let bound_holds = spec.is_two_level().then(|| bound_satisfied(r_out, bound_rhs));
    let c1 = result.prob(1);
    Ok(MeritReport {
        r_out,
        g_out,
        pi_out,
        r_in,
        g_in: Figure::Finite(0.0),
        pi_in,
        p_max,
        c1,
        improvement_c1: c1 > p_max,
        bound_rhs,
        bound_holds,
    })
}

fn bound_satisfied(r_out: Figure, rhs: f64) -> bool {
    match r_out {
        Figure::Finite(r) => r <= rhs + BOUND_TOL || rhs.is_infinite(),
        Figure::Infinite => rhs.is_infinite(),
        Figure::Undefined => true,
    }
}

/// Check `R_out <= R_in (M - D)` for a two-level input.
///
/// Returns `Ok(None)` when the pattern has zero probability.
pub fn verify_bound(
    result: &ConditionalResult,
    spec: &InputSpec,
    pattern: &DetectionPattern,
) -> Result<Option<bool>> {
    if result.is_null() {
        return Ok(None);
    }
    Ok(figures_of_merit(result, spec, pattern)?.bound_holds)
}

/// `d[n1] = sum_{s ⊆ active, |s| = D + n1} |per L[n, s]|^2` over binary
/// input configurations supported on `active_modes`.
///
/// With every active source at the same `p`, the conditional coefficients are
/// proportional to `d[n1] R^n1 / n1!`.
pub fn d_coefficients(
    interf: &Interferometer,
    pattern: &DetectionPattern,
    active_modes: &[usize],
) -> Result<Vec<f64>> {
    let n = interf.n_modes();
    if pattern.len() + 1 != n {
        return Err(Error::DimensionMismatch(format!(
            "pattern over {} detectors for a {n}-mode interferometer",
            pattern.len()
        )));
    }
    if let Some(&bad) = active_modes.iter().find(|&&m| m >= n) {
        return Err(Error::DimensionMismatch(format!(
            "active mode {bad} outside a {n}-mode interferometer"
        )));
    }
    let mut active: Vec<usize> = active_modes.to_vec();
    active.sort_unstable();
    active.dedup();
    let m = active.len();
    let detected = pattern.total();
    if detected > m {
        return Ok(vec![0.0]);
    }
    let mut row_reps = Vec::with_capacity(n);
    row_reps.push(0);
    row_reps.extend_from_slice(pattern.counts());
    let mut col_reps = vec![0usize; n];

    let mut d = vec![0.0; m - detected + 1];
    for (n1, slot) in d.iter_mut().enumerate() {
        row_reps[0] = n1;
        let k = detected + n1;
        let mut sum = 0.0;
        for subset in k_subsets(m, k) {
            col_reps.iter_mut().for_each(|c| *c = 0);
            for &i in &subset {
                col_reps[active[i]] = 1;
            }
            sum += permanent_with_multiplicity_slices(interf.matrix(), &row_reps, &col_reps)?.norm_sqr();
        }
        *slot = sum;
    }
    Ok(d)
}

/// All `k`-element subsets of `0..m`, lexicographic.
fn k_subsets(m: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            if m - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, m, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, m, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// Normalized `c[n1]` rebuilt from `d` at input ratio `r_in`.
pub fn coefficients_from_d(d: &[f64], r_in: f64) -> Vec<f64> {
    let raw: Vec<f64> = d
        .iter()
        .enumerate()
        .map(|(n, &dn)| dn * r_in.powi(n as i32) / factorial(n))
        .collect();
    let z: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / z).collect()
}

fn multiphoton_sum(d: &[f64], r_in: f64) -> f64 {
    d.iter()
        .enumerate()
        .skip(2)
        .map(|(n, &dn)| dn * r_in.powi(n as i32) / factorial(n))
        .sum()
}

/// `d1 > d0 + sum_{n >= 2} d_n R^n / n!`: whether equal sources with ratio
/// `r_in` gain single-photon probability.
pub fn improvement_predicate(d: &[f64], r_in: f64) -> bool {
    let at = |n: usize| d.get(n).copied().unwrap_or(0.0);
    at(1) > at(0) + multiphoton_sum(d, r_in)
}

/// Largest input ratio at which [`improvement_predicate`] can hold: the root
/// of `d1 = d0 + sum_{n >= 2} d_n R^n / n!`.
///
/// Returns 0 when `d1 <= d0` and infinity when there are no multiphoton
/// terms.
pub fn improvement_threshold(d: &[f64]) -> f64 {
    let at = |n: usize| d.get(n).copied().unwrap_or(0.0);
    let (d0, d1) = (at(0), at(1));
    if d1 <= d0 {
        return 0.0;
    }
    if d.iter().skip(2).all(|&x| x == 0.0) {
        return f64::INFINITY;
    }
    let f = |r: f64| d0 + multiphoton_sum(d, r) - d1;
    let mut hi = 1.0;
    while f(hi) < 0.0 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    while hi - lo > 1e-12 * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
