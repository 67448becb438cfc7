//! Named constructions: the weakly coupled chain, the three-mode pure-state
//! scheme and purification of super-Poissonian light.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::conditioner::{
    condition_mixed, condition_pure, propagate_pure, ConditionalResult, DetectionPattern, PureState,
};
use crate::error::{Error, Result};
use crate::fock::{InputSpec, ModeDistribution};
use crate::interferometer::{Interferometer, Provenance};

/// `N`-mode chain coupling mode 1 weakly (amplitude `epsilon`) to the
/// symmetric combination of modes `2..N`.
///
/// Rows 1 and 2 of the unitary are
///
/// ```text
/// ( -eps,          sqrt((1 - eps^2)/(N-1)), ..., sqrt((1 - eps^2)/(N-1)) )
/// ( sqrt(1-eps^2), eps/sqrt(N-1),           ..., eps/sqrt(N-1)           )
/// ```
///
/// and the scheme conditions on `D` photons in mode 2 and none in modes
/// `3..N`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainScheme {
    pub n_modes: usize,
    pub epsilon: f64,
    pub interferometer: Interferometer,
}

impl ChainScheme {
    /// `(D, 0, .., 0)` on modes `2..N`.
    pub fn pattern_for(&self, detected: usize) -> DetectionPattern {
        let mut counts = vec![0; self.n_modes - 1];
        counts[0] = detected;
        DetectionPattern::new(counts)
    }
}

fn check_chain_params(n_modes: usize, epsilon: f64) -> Result<()> {
    if n_modes < 3 {
        return Err(Error::BadParameters(format!("chain needs N >= 3, got {n_modes}")));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::BadParameters(format!(
            "chain coupling epsilon = {epsilon} outside (0, 1)"
        )));
    }
    Ok(())
}

/// The two defining rows of the chain unitary.
pub fn chain_rows(n_modes: usize, epsilon: f64) -> Result<[Vec<Complex64>; 2]> {
    check_chain_params(n_modes, epsilon)?;
    let k = (n_modes - 1) as f64;
    let s = (1.0 - epsilon * epsilon).sqrt();
    let mut row1 = vec![Complex64::new((s * s / k).sqrt(), 0.0); n_modes];
    row1[0] = Complex64::new(-epsilon, 0.0);
    let mut row2 = vec![Complex64::new(epsilon / k.sqrt(), 0.0); n_modes];
    row2[0] = Complex64::new(s, 0.0);
    Ok([row1, row2])
}

fn chain_provenance(n_modes: usize, epsilon: f64) -> Provenance {
    Provenance::Scheme {
        name: "chain".into(),
        params: vec![("n_modes".into(), n_modes as f64), ("epsilon".into(), epsilon)],
    }
}

/// Chain scheme with exact rows 1 and 2 and the remaining rows completed by
/// Gram-Schmidt.
pub fn build_chain(n_modes: usize, epsilon: f64) -> Result<ChainScheme> {
    let rows = chain_rows(n_modes, epsilon)?;
    let interferometer =
        Interferometer::complete_rows(&rows, n_modes)?.with_provenance(chain_provenance(n_modes, epsilon));
    Ok(ChainScheme {
        n_modes,
        epsilon,
        interferometer,
    })
}

/// Chain scheme assembled from beam splitters.
///
/// Inputs `3..N` are merged one at a time into mode 2; the `j`-th merge sends
/// a fraction `1/(j+1)` of the new input into mode 2, so the fractions run
/// from 1/2 to 1/(N-1). A final element with `cos(theta) = epsilon` couples
/// modes 1 and 2, and input phase shifts align rows 1 and 2 with
/// [`chain_rows`]. Rows `3..N` differ from [`build_chain`].
pub fn build_chain_from_beam_splitters(n_modes: usize, epsilon: f64) -> Result<ChainScheme> {
    let target = chain_rows(n_modes, epsilon)?;
    let mut elements = Vec::with_capacity(n_modes);
    for (j, new_mode) in (2..n_modes).enumerate() {
        let merged = (j + 1) as f64;
        let theta = (1.0 / (merged + 1.0)).sqrt().asin();
        let bs = Interferometer::beam_splitter(theta, 0.0);
        elements.push(Interferometer::embed_two_mode(&bs, (1, new_mode), n_modes)?);
    }
    let coupler = Interferometer::beam_splitter(epsilon.acos(), std::f64::consts::PI);
    elements.push(Interferometer::embed_two_mode(&coupler, (0, 1), n_modes)?);
    let body = Interferometer::sequence(n_modes, &elements)?;

    let phases: Vec<f64> = (0..n_modes)
        .map(|i| (target[0][i] / body.element(0, i)).arg())
        .collect();
    let aligned = Interferometer::phase_shifts(&phases).then(&body)?;
    Ok(ChainScheme {
        n_modes,
        epsilon,
        interferometer: aligned,
    })
}

/// Small-`epsilon` limits for the chain with `D` detected photons:
/// `(R_out / R_in, G_out)` = `(D(N-D)/(N-1), (D+1)(N-D-1) / (2D(N-D)))`.
pub fn chain_asymptotics(n_modes: usize, detected: usize) -> Result<(f64, f64)> {
    if detected == 0 || detected >= n_modes {
        return Err(Error::BadParameters(format!(
            "chain asymptotics need 1 <= D <= N-1, got D = {detected}, N = {n_modes}"
        )));
    }
    let n = n_modes as f64;
    let d = detected as f64;
    let r = d * (n - d) / (n - 1.0);
    let g = (d + 1.0) * (n - d - 1.0) / (2.0 * d * (n - d));
    Ok((r, g))
}

/// Beam-splitter angles of the three-mode pure-state scheme.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PureSchemeParams {
    pub theta: f64,
    pub phi: f64,
    pub theta_prime: f64,
    pub phi_prime: f64,
}

/// Below this `|sin(theta) cos(theta)|` the first beam splitter is treated as
/// degenerate.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// Second beam splitter that makes the scheme output exactly one photon:
/// `theta' = atan(|cos t - e^{-i phi} sin t| / (sin t cos t))` and
/// `phi' = arg(cos t - e^{-i phi} sin t)`.
pub fn pure_stage2_params(theta: f64, phi: f64) -> Result<PureSchemeParams> {
    let (s, c) = theta.sin_cos();
    if (s * c).abs() < DEGENERACY_TOL {
        return Err(Error::DegenerateTheta { theta });
    }
    let z = Complex64::new(c, 0.0) - Complex64::from_polar(1.0, -phi) * s;
    Ok(PureSchemeParams {
        theta,
        phi,
        theta_prime: (z.norm() / (s * c)).atan(),
        phi_prime: z.arg(),
    })
}

/// Probability that both detection results of the scheme occur:
/// `2 |beta|^6 sin^2 t cos^2 t sin^2 t' (2 cos^2 t' - sin^2 t')^2`.
pub fn pure_success_probability(theta: f64, phi: f64, beta_mag: f64) -> Result<f64> {
    let params = pure_stage2_params(theta, phi)?;
    let (s, c) = theta.sin_cos();
    let (sp, cp) = params.theta_prime.sin_cos();
    let q = 2.0 * cp * cp - sp * sp;
    Ok(2.0 * beta_mag.powi(6) * s * s * c * c * sp * sp * q * q)
}

/// The success probability written in `theta` and `phi` alone. Defined for
/// every angle; it vanishes where the first beam splitter is degenerate.
pub fn pure_success_probability_reduced(theta: f64, phi: f64, beta_mag: f64) -> f64 {
    let s2 = (2.0 * theta).sin();
    let x = phi.cos() * s2;
    let a = 0.5 * s2 * s2;
    let num = a * (1.0 - x) * (a - 1.0 + x).powi(2);
    let den = (0.25 * s2 * s2 + 1.0 - x).powi(3);
    beta_mag.powi(6) * num / den
}

/// Result of running both stages of the pure-state scheme.
#[derive(Clone, Debug, PartialEq)]
pub struct PureSchemeOutcome {
    pub params: PureSchemeParams,
    /// Normalized mode-1 state, `None` if the detection results cannot occur.
    pub output: Option<PureState>,
    /// Joint probability of both detection results.
    pub probability: f64,
}

/// Run the scheme with sources `alpha|0> + beta|1>` (real `alpha >= 0`):
/// modes 1 and 2 meet at `L(theta, phi)` and mode 2 must register no photon;
/// mode 1 then meets mode 3 at `L(theta', phi')` and mode 3 must register two
/// photons.
pub fn run_pure_scheme(theta: f64, phi: f64, beta: Complex64) -> Result<PureSchemeOutcome> {
    let params = pure_stage2_params(theta, phi)?;
    let b2 = beta.norm_sqr();
    if b2 > 1.0 + 1e-12 {
        return Err(Error::BadParameters(format!("|beta|^2 = {b2} exceeds 1")));
    }
    let alpha = Complex64::new((1.0 - b2).max(0.0).sqrt(), 0.0);
    let source = PureState::single_mode(&[alpha, beta]);

    let stage1_in = source.tensor(&source);
    let bs1 = Interferometer::beam_splitter(theta, phi);
    let stage1 = condition_pure(
        &propagate_pure(&stage1_in, &bs1)?,
        &DetectionPattern::new(vec![0]),
    )?;

    let stage2_in = stage1.projection.tensor(&source);
    let bs2 = Interferometer::beam_splitter(params.theta_prime, params.phi_prime);
    let stage2 = condition_pure(
        &propagate_pure(&stage2_in, &bs2)?,
        &DetectionPattern::new(vec![2]),
    )?;

    Ok(PureSchemeOutcome {
        params,
        output: stage2.state,
        probability: stage2.probability,
    })
}

/// Turn a state with no `D`-photon component and at most `D+1` photons into
/// a single photon: mix it with vacuum at `bs` and detect `D` photons in mode
/// 2. Here `D + 1` is the top of the support of `q`.
pub fn purify_super_poissonian(q: &ModeDistribution, bs: &Interferometer) -> Result<ConditionalResult> {
    let top = q.support_max();
    if top == 0 {
        return Err(Error::BadDistributionShape(
            "distribution is the vacuum; no D + 1 photon component".into(),
        ));
    }
    let detected = top - 1;
    if q.prob(detected) != 0.0 {
        return Err(Error::BadDistributionShape(format!(
            "q[{detected}] = {} must vanish",
            q.prob(detected)
        )));
    }
    if bs.n_modes() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "purification needs a two-mode beam splitter, got {} modes",
            bs.n_modes()
        )));
    }
    let sc = bs.element(0, 0).norm() * bs.element(1, 0).norm();
    if sc < DEGENERACY_TOL {
        return Err(Error::BadParameters(
            "beam splitter must have sin(theta) cos(theta) != 0".into(),
        ));
    }
    let spec = InputSpec::new(vec![q.clone(), ModeDistribution::vacuum()])?;
    condition_mixed(&spec, bs, &DetectionPattern::new(vec![detected]))
}
