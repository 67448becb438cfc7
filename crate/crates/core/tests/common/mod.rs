//! Independent reference implementations for integration tests.
//!
//! Nothing here calls the library's permanent or conditioning code: the
//! permanent is a plain sum over permutations and the propagator expands
//! products of creation operators monomial by monomial.

#![allow(dead_code)]

use std::collections::BTreeMap;

use num_complex::Complex64;
use photon_post::merit::BOUND_TOL;
use photon_post::{ComplexMatrix, ConditionalResult, DetectionPattern, InputSpec, Interferometer};

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `sum_sigma prod_i m[i][sigma(i)]` by recursion over unused columns.
pub fn naive_permanent(m: &ComplexMatrix) -> Complex64 {
    fn rec(m: &ComplexMatrix, row: usize, used: &mut Vec<bool>) -> Complex64 {
        if row == m.rows() {
            return Complex64::new(1.0, 0.0);
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for col in 0..m.cols() {
            if !used[col] {
                used[col] = true;
                acc += m[(row, col)] * rec(m, row + 1, used);
                used[col] = false;
            }
        }
        acc
    }
    assert_eq!(m.rows(), m.cols());
    rec(m, 0, &mut vec![false; m.cols()])
}

/// Output amplitudes of the Fock state `|s>` after the network.
///
/// `|s> = prod_i (a_i^dag)^{s_i} / sqrt(s_i!) |0>` with
/// `a_i^dag -> sum_k L[k][i] a_k^dag`; the product is expanded one creation
/// operator at a time and each monomial `prod_k (a_k^dag)^{n_k}` contributes
/// `sqrt(prod_k n_k!)` to the amplitude of `|n>`.
pub fn fock_propagate(l: &ComplexMatrix, s: &[usize]) -> BTreeMap<Vec<usize>, Complex64> {
    let n = l.rows();
    let mut poly: BTreeMap<Vec<usize>, Complex64> = BTreeMap::new();
    poly.insert(vec![0; n], Complex64::new(1.0, 0.0));
    for (i, &si) in s.iter().enumerate() {
        for _ in 0..si {
            let mut next: BTreeMap<Vec<usize>, Complex64> = BTreeMap::new();
            for (mono, coef) in &poly {
                for k in 0..n {
                    let amp = l[(k, i)];
                    if amp == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    let mut m = mono.clone();
                    m[k] += 1;
                    *next.entry(m).or_default() += coef * amp;
                }
            }
            poly = next;
        }
    }
    let s_norm: f64 = s.iter().map(|&x| factorial(x)).product::<f64>().sqrt();
    poly.into_iter()
        .map(|(mono, coef)| {
            let n_norm: f64 = mono.iter().map(|&x| factorial(x)).product::<f64>().sqrt();
            (mono, coef * n_norm / s_norm)
        })
        .collect()
}

/// Unnormalized mode-1 coefficients from the dense propagator, summing over
/// every input Fock state with its probability.
pub fn brute_condition(spec: &InputSpec, interf: &Interferometer, pattern: &DetectionPattern) -> Vec<f64> {
    let n = spec.n_modes();
    let caps: Vec<usize> = spec.modes().iter().map(|m| m.support_max()).collect();
    let max_total: usize = caps.iter().sum();
    let d = pattern.total();
    if d > max_total {
        return vec![0.0];
    }
    let mut out = vec![0.0; max_total - d + 1];
    let mut s = vec![0usize; n];
    loop {
        let prob: f64 = s.iter().enumerate().map(|(i, &k)| spec.mode(i).prob(k)).product();
        if prob > 0.0 {
            for (config, amp) in fock_propagate(interf.matrix(), &s) {
                if &config[1..] == pattern.counts() {
                    out[config[0]] += prob * amp.norm_sqr();
                }
            }
        }
        let mut i = 0;
        loop {
            if i == n {
                return out;
            }
            if s[i] < caps[i] {
                s[i] += 1;
                break;
            }
            s[i] = 0;
            i += 1;
        }
    }
}

/// Assert `R_out <= R_in (M - D)` for a two-level input; returns the excess.
pub fn assert_bound(result: &ConditionalResult, spec: &InputSpec, pattern: &DetectionPattern) -> f64 {
    if !spec.is_two_level() || result.is_null() {
        return f64::NEG_INFINITY;
    }
    let p = spec.p_max();
    let rhs = p / (1.0 - p) * spec.active_modes().saturating_sub(pattern.total()) as f64;
    let (c0, c1) = (result.prob(0), result.prob(1));
    if c0 == 0.0 {
        assert!(c1 == 0.0 || rhs.is_infinite(), "R_out infinite with bound {rhs}");
        return f64::NEG_INFINITY;
    }
    let excess = c1 / c0 - rhs;
    assert!(
        excess <= BOUND_TOL,
        "R_out = {} exceeds R_in (M - D) = {rhs}",
        c1 / c0
    );
    excess
}

/// Largest absolute entrywise difference, padding the shorter vector with 0.
pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| (a.get(i).copied().unwrap_or(0.0) - b.get(i).copied().unwrap_or(0.0)).abs())
        .fold(0.0, f64::max)
}
