//! Randomized search over interferometers and detection patterns.
//!
//! Each trial draws a Haar-random unitary (and, optionally, random input
//! efficiencies) from its own ChaCha stream, so trials are independent of
//! scheduling. The best trials are then refined by Nelder-Mead over
//! `U(x) = G(x) U_0`, where `G(x)` is a product of beam splitters on every
//! pair of modes. Each beam splitter takes two coordinates `(a, b)`; it has
//! angle `sqrt(a^2 + b^2)` and phase `atan2(b, a)`, so `x = 0` is `U_0`.
//!
//! Every evaluated two-level result is also checked against
//! `R_out <= R_in (M - D)`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::conditioner::{condition_mixed, ConditionalResult, DetectionPattern};
use crate::error::{Error, Result};
use crate::fock::InputSpec;
use crate::interferometer::{Interferometer, Provenance};
use crate::merit::{distribution_figures, Figure, BOUND_TOL};
use crate::permanent::ComplexMatrix;
use crate::schemes::build_chain;

/// Slack on "no improvement" verdicts.
pub const IMPROVEMENT_TOL: f64 = 1e-9;

pub const NONE_FOUND: &str = "no counterexample at this budget";
pub const FOUND: &str = "improvement found";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// Single-photon probability `c1`; improvement means `c1 > p_max`.
    MaxC1,
    /// `R_out`; improvement means `R_out > R_in`.
    MaxROut,
    /// `c1` over patterns whose output has `G_out <= g_tolerance`.
    MaxC1ZeroG,
}

/// Detection patterns admitted by a search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum PatternFilter {
    /// Every pattern the input can produce.
    All,
    /// Patterns with exactly this many detected photons.
    Total(usize),
    /// Patterns with `D = M - 1`.
    OneBelowActive,
}

fn default_refine_top() -> usize {
    8
}

fn default_refine_iterations() -> usize {
    400
}

fn default_min_probability() -> f64 {
    1e-12
}

fn default_g_tolerance() -> f64 {
    1e-9
}

/// Search parameters. Patterns with probability below `min_probability` are
/// skipped.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchTask {
    pub n_modes: usize,
    pub p_max: f64,
    pub objective: Objective,
    #[serde(default = "all_patterns")]
    pub patterns: PatternFilter,
    /// Draw per-trial efficiencies in `(0, p_max]` with one mode at `p_max`
    /// instead of using `p_max` on every mode.
    #[serde(default)]
    pub random_inputs: bool,
    pub trials: usize,
    #[serde(default = "default_refine_top")]
    pub refine_top: usize,
    #[serde(default = "default_refine_iterations")]
    pub refine_iterations: usize,
    pub seed: u64,
    #[serde(default = "default_min_probability")]
    pub min_probability: f64,
    #[serde(default = "default_g_tolerance")]
    pub g_tolerance: f64,
    /// Also start from the chain scheme with this coupling.
    #[serde(default)]
    pub chain_start: Option<f64>,
}

fn all_patterns() -> PatternFilter {
    PatternFilter::All
}

impl SearchTask {
    pub fn new(n_modes: usize, p_max: f64, objective: Objective, trials: usize, seed: u64) -> Self {
        Self {
            n_modes,
            p_max,
            objective,
            patterns: PatternFilter::All,
            random_inputs: false,
            trials,
            refine_top: default_refine_top(),
            refine_iterations: default_refine_iterations(),
            seed,
            min_probability: default_min_probability(),
            g_tolerance: default_g_tolerance(),
            chain_start: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_modes < 2 {
            return Err(Error::BadParameters(format!(
                "search needs N >= 2, got {}",
                self.n_modes
            )));
        }
        if !(self.p_max > 0.0 && self.p_max < 1.0) {
            return Err(Error::InvalidProbability {
                value: self.p_max,
                context: "p_max must lie in (0, 1)".into(),
            });
        }
        if self.trials == 0 {
            return Err(Error::BadParameters(
                "search budget needs at least one trial".into(),
            ));
        }
        if let Some(eps) = self.chain_start {
            build_chain(self.n_modes, eps)?;
        }
        Ok(())
    }

    /// Value the objective must exceed to count as an improvement.
    pub fn baseline(&self) -> f64 {
        match self.objective {
            Objective::MaxC1 | Objective::MaxC1ZeroG => self.p_max,
            Objective::MaxROut => self.p_max / (1.0 - self.p_max),
        }
    }
}

/// The best point found, with everything needed to recompute it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BestPoint {
    /// Trial index; `trials` denotes the chain start.
    pub trial: usize,
    pub refined: bool,
    /// Single-photon probability of each input mode.
    pub inputs: Vec<f64>,
    pub interferometer: Interferometer,
    pub pattern: DetectionPattern,
    pub value: f64,
    pub c1: f64,
    pub r_out: Figure,
    pub g_out: Figure,
    pub pattern_probability: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub task: SearchTask,
    pub trials_run: usize,
    pub evaluations: u64,
    pub baseline: f64,
    pub best: Option<BestPoint>,
    pub improvement_found: bool,
    pub verdict: String,
    /// Evaluations with `R_out > R_in (M - D) + 1e-9`.
    pub bound_violations: u64,
    /// Largest `R_out - R_in (M - D)` seen.
    pub max_bound_excess: Option<f64>,
    /// For a found improvement with equal inputs: whether the same network
    /// and pattern still improve at half the input efficiency.
    pub monotone_witness: Option<bool>,
}

impl SearchReport {
    pub fn best_value(&self) -> Option<f64> {
        self.best.as_ref().map(|b| b.value)
    }
}

/// Evaluate the objective for one (inputs, network, pattern) triple, or
/// `None` when the pattern is excluded.
pub fn objective_value(objective: Objective, result: &ConditionalResult, g_tolerance: f64) -> Option<f64> {
    let q = result.normalized.as_ref()?;
    let (r, g, _) = distribution_figures(q).ok()?;
    match objective {
        Objective::MaxC1 => Some(result.prob(1)),
        Objective::MaxROut => Some(r.as_f64()),
        Objective::MaxC1ZeroG => match g {
            Figure::Finite(gv) if gv <= g_tolerance => Some(result.prob(1)),
            _ => None,
        },
    }
}

/// Conditional result for two-level inputs with efficiencies `inputs`.
pub fn evaluate_point(
    inputs: &[f64],
    interf: &Interferometer,
    pattern: &DetectionPattern,
) -> Result<ConditionalResult> {
    condition_mixed(&InputSpec::two_level(inputs)?, interf, pattern)
}

#[derive(Clone, Debug, Default)]
struct Tally {
    evaluations: u64,
    violations: u64,
    max_excess: Option<f64>,
}

impl Tally {
    fn merge(&mut self, other: &Tally) {
        self.evaluations += other.evaluations;
        self.violations += other.violations;
        self.max_excess = match (self.max_excess, other.max_excess) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
    }
}

#[derive(Clone, Debug)]
struct Candidate {
    value: f64,
    pattern: DetectionPattern,
    result: ConditionalResult,
}

struct Evaluator<'a> {
    task: &'a SearchTask,
    spec: InputSpec,
    patterns: Vec<DetectionPattern>,
    bound_scale: f64,
    active: usize,
}

impl<'a> Evaluator<'a> {
    fn new(task: &'a SearchTask, inputs: &[f64]) -> Result<Self> {
        let spec = InputSpec::two_level(inputs)?;
        let active = spec.active_modes();
        let patterns = DetectionPattern::all_up_to(task.n_modes - 1, spec.max_total_photons())
            .into_iter()
            .filter(|p| match task.patterns {
                PatternFilter::All => true,
                PatternFilter::Total(d) => p.total() == d,
                PatternFilter::OneBelowActive => p.total() + 1 == active,
            })
            .collect();
        let p_max = spec.p_max();
        Ok(Self {
            task,
            spec,
            patterns,
            bound_scale: p_max / (1.0 - p_max),
            active,
        })
    }

    /// Best admitted pattern for `interf`.
    fn best(&self, interf: &Interferometer, tally: &mut Tally) -> Result<Option<Candidate>> {
        let mut best: Option<Candidate> = None;
        for pattern in &self.patterns {
            let result = condition_mixed(&self.spec, interf, pattern)?;
            tally.evaluations += 1;
            if result.pattern_probability < self.task.min_probability {
                continue;
            }
            let rhs = self.bound_scale * self.active.saturating_sub(pattern.total()) as f64;
            let r_out = result.prob(1) / result.prob(0);
            let excess = if r_out.is_nan() {
                f64::NEG_INFINITY
            } else {
                r_out - rhs
            };
            tally.max_excess = Some(tally.max_excess.map_or(excess, |m| m.max(excess)));
            if excess > BOUND_TOL {
                tally.violations += 1;
            }
            if let Some(v) = objective_value(self.task.objective, &result, self.task.g_tolerance) {
                if best.as_ref().is_none_or(|b| v > b.value) {
                    best = Some(Candidate {
                        value: v,
                        pattern: pattern.clone(),
                        result,
                    });
                }
            }
        }
        Ok(best)
    }
}

#[derive(Clone, Debug)]
struct TrialOutcome {
    trial: usize,
    refined: bool,
    inputs: Vec<f64>,
    interf: Interferometer,
    best: Option<Candidate>,
    tally: Tally,
}

impl TrialOutcome {
    fn value(&self) -> f64 {
        self.best.as_ref().map_or(f64::NEG_INFINITY, |c| c.value)
    }

    /// Larger value first, then smaller trial index.
    fn beats(&self, other: &TrialOutcome) -> bool {
        let (a, b) = (self.value(), other.value());
        a > b || (a == b && (self.trial, self.refined) < (other.trial, other.refined))
    }
}

fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

fn draw_inputs(task: &SearchTask, rng: &mut ChaCha8Rng) -> Vec<f64> {
    if !task.random_inputs {
        return vec![task.p_max; task.n_modes];
    }
    let mut ps: Vec<f64> = (0..task.n_modes)
        .map(|_| task.p_max * rng.random_range(0.05..1.0))
        .collect();
    let top = rng.random_range(0..task.n_modes);
    ps[top] = task.p_max;
    ps
}

fn run_trial(task: &SearchTask, trial: usize) -> Result<TrialOutcome> {
    let mut rng = trial_rng(task.seed, trial);
    let inputs = draw_inputs(task, &mut rng);
    let interf = if trial == task.trials {
        let eps = task.chain_start.expect("chain start requested");
        build_chain(task.n_modes, eps)?.interferometer
    } else {
        Interferometer::haar_random_with(task.n_modes, &mut rng).with_provenance(Provenance::Scheme {
            name: "search_trial".into(),
            params: vec![("trial".into(), trial as f64)],
        })
    };
    let eval = Evaluator::new(task, &inputs)?;
    let mut tally = Tally::default();
    let best = eval.best(&interf, &mut tally)?;
    Ok(TrialOutcome {
        trial,
        refined: false,
        inputs,
        interf,
        best,
        tally,
    })
}

/// Number of coordinates of the pair-mesh chart on `n` modes.
pub fn mesh_dimension(n_modes: usize) -> usize {
    n_modes * (n_modes - 1)
}

/// `G(x) U_0`: apply a beam splitter with coordinates `(x[2k], x[2k+1])` to
/// each pair of modes `(i, j)`, `i < j`, in lexicographic order.
pub fn apply_pair_mesh(base: &ComplexMatrix, x: &[f64]) -> ComplexMatrix {
    let n = base.rows();
    assert_eq!(x.len(), mesh_dimension(n), "mesh coordinates");
    let mut m = base.clone();
    let mut k = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            let (a, b) = (x[k], x[k + 1]);
            k += 2;
            let r = a.hypot(b);
            if r == 0.0 {
                continue;
            }
            let e = Complex64::new(a / r, b / r);
            let (s, c) = r.sin_cos();
            for col in 0..n {
                let (u, v) = (m[(i, col)], m[(j, col)]);
                m[(i, col)] = u * c - e.conj() * v * s;
                m[(j, col)] = e * u * s + v * c;
            }
        }
    }
    m
}

fn refine(task: &SearchTask, start: &TrialOutcome) -> Result<TrialOutcome> {
    let eval = Evaluator::new(task, &start.inputs)?;
    let base = start.interf.matrix().clone();
    let dim = mesh_dimension(task.n_modes);
    let mut tally = Tally::default();
    let mut failure = None;
    let (x, _) = nelder_mead_maximize(
        |x| {
            let m = apply_pair_mesh(&base, x);
            let Ok(u) = Interferometer::new(m, Provenance::Explicit) else {
                return f64::NEG_INFINITY;
            };
            match eval.best(&u, &mut tally) {
                Ok(c) => c.map_or(f64::NEG_INFINITY, |c| c.value),
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::NEG_INFINITY
                }
            }
        },
        &vec![0.0; dim],
        0.2,
        task.refine_iterations,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let interf = Interferometer::new(apply_pair_mesh(&base, &x), Provenance::Explicit)?.with_provenance(
        Provenance::Sequence {
            parts: vec![
                start.interf.provenance().clone(),
                Provenance::Scheme {
                    name: "pair_mesh".into(),
                    params: x.iter().enumerate().map(|(k, &v)| (format!("x{k}"), v)).collect(),
                },
            ],
        },
    );
    let best = eval.best(&interf, &mut tally)?;
    Ok(TrialOutcome {
        trial: start.trial,
        refined: true,
        inputs: start.inputs.clone(),
        interf,
        best,
        tally,
    })
}

/// Maximize `f` from `x0` with an axis-aligned initial simplex of size
/// `step`. Returns the best vertex after `iterations` steps.
pub fn nelder_mead_maximize<F>(mut f: F, x0: &[f64], step: f64, iterations: usize) -> (Vec<f64>, f64)
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    let mut g = |x: &[f64]| -f(x);
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), g(x0)));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += step;
        let v = g(&x);
        simplex.push((x, v));
    }
    let order = |s: &mut Vec<(Vec<f64>, f64)>| s.sort_by(|a, b| a.1.total_cmp(&b.1));
    let along = |c: &[f64], w: &[f64], t: f64| -> Vec<f64> {
        c.iter().zip(w).map(|(ci, wi)| ci + t * (wi - ci)).collect()
    };
    for _ in 0..iterations {
        order(&mut simplex);
        let worst = simplex[n].clone();
        let centroid: Vec<f64> = (0..n)
            .map(|k| simplex[..n].iter().map(|v| v.0[k]).sum::<f64>() / n as f64)
            .collect();
        let xr = along(&centroid, &worst.0, -1.0);
        let fr = g(&xr);
        if fr < simplex[0].1 {
            let xe = along(&centroid, &worst.0, -2.0);
            let fe = g(&xe);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            let (xc, fc) = if fr < worst.1 {
                let xc = along(&centroid, &xr, 0.5);
                let fc = g(&xc);
                (xc, fc)
            } else {
                let xc = along(&centroid, &worst.0, 0.5);
                let fc = g(&xc);
                (xc, fc)
            };
            if fc < worst.1.min(fr) {
                simplex[n] = (xc, fc);
            } else {
                let best = simplex[0].0.clone();
                for v in simplex.iter_mut().skip(1) {
                    v.0 = along(&best, &v.0, 0.5);
                    v.1 = g(&v.0);
                }
            }
        }
    }
    order(&mut simplex);
    let (x, v) = simplex.swap_remove(0);
    (x, -v)
}

/// Haar-random restarts, optional chain start, and Nelder-Mead refinement of
/// the `refine_top` best starts.
pub fn search_improvement(task: &SearchTask) -> Result<SearchReport> {
    task.validate()?;
    let starts = task.trials + usize::from(task.chain_start.is_some());
    let outcomes: Vec<TrialOutcome> = (0..starts)
        .into_par_iter()
        .map(|t| run_trial(task, t))
        .collect::<Result<_>>()?;

    let mut ranked: Vec<&TrialOutcome> = outcomes.iter().filter(|o| o.best.is_some()).collect();
    ranked.sort_by(|a, b| b.value().total_cmp(&a.value()).then(a.trial.cmp(&b.trial)));
    let refined: Vec<TrialOutcome> = if task.refine_iterations > 0 {
        ranked
            .into_iter()
            .take(task.refine_top)
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|o| refine(task, o))
            .collect::<Result<_>>()?
    } else {
        Vec::new()
    };

    let mut tally = Tally::default();
    let mut winner: Option<&TrialOutcome> = None;
    for o in outcomes.iter().chain(&refined) {
        tally.merge(&o.tally);
        if o.best.is_some() && winner.is_none_or(|w| o.beats(w)) {
            winner = Some(o);
        }
    }

    let baseline = task.baseline();
    let best = winner.map(|w| {
        let c = w.best.as_ref().expect("winner has a candidate");
        let q = c.result.normalized.as_deref().expect("admitted patterns occur");
        let (r_out, g_out, _) = distribution_figures(q).expect("normalized");
        BestPoint {
            trial: w.trial,
            refined: w.refined,
            inputs: w.inputs.clone(),
            interferometer: w.interf.clone(),
            pattern: c.pattern.clone(),
            value: c.value,
            c1: c.result.prob(1),
            r_out,
            g_out,
            pattern_probability: c.result.pattern_probability,
        }
    });
    let improvement_found = best
        .as_ref()
        .is_some_and(|b| b.value > baseline + IMPROVEMENT_TOL);
    let monotone_witness = match (&best, improvement_found, task.random_inputs) {
        (Some(b), true, false) => Some(still_improves_at(task, b, 0.5 * task.p_max)?),
        _ => None,
    };
    Ok(SearchReport {
        task: task.clone(),
        trials_run: starts,
        evaluations: tally.evaluations,
        baseline,
        best,
        improvement_found,
        verdict: if improvement_found { FOUND } else { NONE_FOUND }.into(),
        bound_violations: tally.violations,
        max_bound_excess: tally.max_excess,
        monotone_witness,
    })
}

/// Whether `point` still beats the baseline with every input at `p`.
pub fn still_improves_at(task: &SearchTask, point: &BestPoint, p: f64) -> Result<bool> {
    let result = evaluate_point(&vec![p; task.n_modes], &point.interferometer, &point.pattern)?;
    let shifted = SearchTask {
        p_max: p,
        ..task.clone()
    };
    Ok(objective_value(task.objective, &result, task.g_tolerance)
        .is_some_and(|v| v > shifted.baseline() + IMPROVEMENT_TOL))
}

/// No-improvement check with two or three modes: maximize `c1` over all
/// patterns.
pub fn verify_nogo_small(n_modes: usize, p_max: f64, trials: usize, seed: u64) -> Result<SearchReport> {
    if !(2..=3).contains(&n_modes) {
        return Err(Error::BadParameters(format!(
            "small-network check covers N = 2 or 3, got {n_modes}"
        )));
    }
    search_improvement(&SearchTask::new(n_modes, p_max, Objective::MaxC1, trials, seed))
}

/// `R_out <= R_in` checks: `D = 1` with equal inputs, and `D = M - 1` with
/// random inputs. Returns the two reports in that order.
pub fn verify_nogo_patterns(
    n_modes: usize,
    p_max: f64,
    trials: usize,
    seed: u64,
) -> Result<(SearchReport, SearchReport)> {
    let mut single = SearchTask::new(n_modes, p_max, Objective::MaxROut, trials, seed);
    single.patterns = PatternFilter::Total(1);
    let mut top = SearchTask::new(n_modes, p_max, Objective::MaxROut, trials, seed.wrapping_add(1));
    top.patterns = PatternFilter::OneBelowActive;
    top.random_inputs = true;
    Ok((search_improvement(&single)?, search_improvement(&top)?))
}
