//! Acceptance suite. Each test prints one `PASS`/`FAIL` line per criterion
//! before asserting, so `cargo test --test acceptance -- --nocapture` gives a
//! readable summary.

mod common;

use std::f64::consts::{FRAC_PI_4, PI};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{assert_bound, brute_condition, max_diff};
use photon_post::detectors::{observe, DetectorScenario};
use photon_post::merit::{coefficients_from_d, d_coefficients, improvement_predicate, improvement_threshold};
use photon_post::schemes::{
    build_chain, chain_asymptotics, pure_success_probability, pure_success_probability_reduced,
    purify_super_poissonian, run_pure_scheme,
};
use photon_post::search::{
    evaluate_point, nelder_mead_maximize, search_improvement, verify_nogo_patterns, verify_nogo_small,
    Objective, PatternFilter, SearchReport, SearchTask,
};
use photon_post::{
    condition_mixed, condition_mixed_bs_closed_form, figures_of_merit, ConditionalResult, DetectionPattern,
    InputSpec, Interferometer, ModeDistribution, PureState,
};

fn verdict(id: &str, title: &str, ok: bool, detail: &str) {
    println!(
        "{} criterion {id}: {title} | {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "criterion {id} ({title}) failed: {detail}");
}

fn within(elapsed: Duration, limit_secs: u64) -> bool {
    elapsed < Duration::from_secs(limit_secs)
}

fn checked(spec: &InputSpec, u: &Interferometer, pattern: &DetectionPattern) -> ConditionalResult {
    let r = condition_mixed(spec, u, pattern).unwrap();
    assert_bound(&r, spec, pattern);
    r
}

fn report_is_clean(r: &SearchReport) -> bool {
    let reproducible = r.best.as_ref().is_none_or(|b| {
        let again = evaluate_point(&b.inputs, &b.interferometer, &b.pattern).unwrap();
        (again.prob(1) - b.c1).abs() <= 1e-10
    });
    r.bound_violations == 0 && reproducible
}

#[test]
fn criterion_1_pure_scheme_exactness() {
    let start = Instant::now();
    let one = PureState::fock(vec![1]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let mut worst_fid: f64 = 0.0;
    let mut worst_p: f64 = 0.0;
    let mut done = 0;
    while done < 20 {
        let theta = rng.random_range(0.0..PI);
        let phi = rng.random_range(0.0..PI);
        if (theta.sin() * theta.cos()).abs() < 1e-3 {
            continue;
        }
        let beta_mag = rng.random_range(0.1..1.0);
        let beta = Complex64::from_polar(beta_mag, rng.random_range(0.0..2.0 * PI));
        let out = run_pure_scheme(theta, phi, beta).unwrap();
        let state = out.output.expect("detection results occur");
        worst_fid = worst_fid.max(1.0 - state.fidelity(&one));
        worst_p =
            worst_p.max((out.probability - pure_success_probability(theta, phi, beta_mag).unwrap()).abs());
        done += 1;
    }
    let peak = pure_success_probability(FRAC_PI_4, PI, 1.0).unwrap();
    let peak_err = (peak - 16.0 / 81.0).abs();

    // Grid maxima over theta in [0, pi) (period pi) and phi in [0, pi]
    // (P is even in phi, so the edges reflect), refined by Nelder-Mead.
    let (nt, np) = (240usize, 241usize);
    let p_at = |i: usize, j: usize| {
        let theta = PI * i as f64 / nt as f64;
        let phi = PI * j as f64 / (np - 1) as f64;
        pure_success_probability_reduced(theta, phi, 1.0)
    };
    let grid: Vec<Vec<f64>> = (0..nt).map(|i| (0..np).map(|j| p_at(i, j)).collect()).collect();
    let mut peaks = Vec::new();
    for i in 0..nt {
        for j in 0..np {
            let v = grid[i][j];
            if v < 0.1 {
                continue;
            }
            let mut is_max = true;
            for di in [-1i64, 0, 1] {
                for dj in [-1i64, 0, 1] {
                    if di == 0 && dj == 0 {
                        continue;
                    }
                    let ii = (i as i64 + di).rem_euclid(nt as i64) as usize;
                    let jj = (j as i64 + dj).unsigned_abs() as usize;
                    let jj = if jj >= np { 2 * (np - 1) - jj } else { jj };
                    if grid[ii][jj] > v {
                        is_max = false;
                    }
                }
            }
            if is_max {
                let x0 = [PI * i as f64 / nt as f64, PI * j as f64 / (np - 1) as f64];
                let (x, h) = nelder_mead_maximize(
                    |x| pure_success_probability_reduced(x[0], x[1], 1.0),
                    &x0,
                    0.01,
                    400,
                );
                let theta = x[0].rem_euclid(PI);
                let phi = x[1].cos().clamp(-1.0, 1.0).acos();
                if !peaks
                    .iter()
                    .any(|&(t, p, _): &(f64, f64, f64)| (t - theta).abs() < 1e-3 && (p - phi).abs() < 1e-3)
                {
                    peaks.push((theta, phi, h));
                }
            }
        }
    }
    let expected = [
        (FRAC_PI_4, PI),
        (FRAC_PI_4, (13.0f64 / 14.0).acos()),
        (3.0 * FRAC_PI_4, 0.0),
        (3.0 * FRAC_PI_4, (-13.0f64 / 14.0).acos()),
    ];
    let located = expected.iter().all(|&(t, p)| {
        peaks
            .iter()
            .any(|&(pt, pp, _)| (pt - t).abs() < 1e-3 && (pp - p).abs() < 1e-3)
    });
    let height_spread = peaks
        .iter()
        .map(|&(_, _, h)| (h - 16.0 / 81.0).abs())
        .fold(0.0, f64::max);
    let elapsed = start.elapsed();
    let ok = worst_fid <= 1e-10
        && worst_p <= 1e-10
        && peak_err <= 1e-12
        && peaks.len() == 4
        && located
        && height_spread <= 1e-9
        && within(elapsed, 5);
    verdict(
        "1",
        "pure-scheme exactness",
        ok,
        &format!(
            "max 1-F = {worst_fid:.1e}, max |dP| = {worst_p:.1e}, |P(pi/4,pi) - 16/81| = {peak_err:.1e}, \
             {} maxima, height spread {height_spread:.1e}, {elapsed:.2?}",
            peaks.len()
        ),
    );
}

#[test]
fn criterion_2_small_network_nogo() {
    let start = Instant::now();
    let two = verify_nogo_small(2, 0.3, 10_000, 21).unwrap();
    let three = verify_nogo_small(3, 0.2, 10_000, 22).unwrap();
    let elapsed = start.elapsed();
    let b2 = two.best_value().unwrap();
    let b3 = three.best_value().unwrap();
    let ok = b2 <= 0.3 + 1e-9
        && b3 <= 0.2 + 1e-9
        && !two.improvement_found
        && !three.improvement_found
        && report_is_clean(&two)
        && report_is_clean(&three)
        && within(elapsed, 120);
    verdict(
        "2",
        "beam-splitter and three-mode no-go",
        ok,
        &format!(
            "N=2 p=0.3 max c1 = {b2:.12}, N=3 p=0.2 max c1 = {b3:.12}, {} + {} evaluations, {elapsed:.2?}",
            two.evaluations, three.evaluations
        ),
    );
}

#[test]
fn criterion_3_bound() {
    let start = Instant::now();
    let (single, top) = verify_nogo_patterns(4, 0.2, 1_000, 31).unwrap();
    let r_in = 0.2 / 0.8;
    let mut zero_best: f64 = 0.0;
    let mut clean = report_is_clean(&single) && report_is_clean(&top);
    for n in 3..=5 {
        let mut task = SearchTask::new(n, 0.2, Objective::MaxROut, 1_000, 32 + n as u64);
        task.patterns = PatternFilter::Total(0);
        let r = search_improvement(&task).unwrap();
        clean &= report_is_clean(&r);
        zero_best = zero_best.max(r.best_value().unwrap());
    }

    // Random instances with unequal inputs over every pattern.
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
    let mut max_excess = f64::NEG_INFINITY;
    for _ in 0..200 {
        let n = rng.random_range(2..=5);
        let ps: Vec<f64> = (0..n)
            .map(|_| {
                if rng.random_bool(0.2) {
                    0.0
                } else {
                    rng.random_range(0.01..0.99)
                }
            })
            .collect();
        let spec = InputSpec::two_level(&ps).unwrap();
        let u = Interferometer::haar_random(n, rng.random());
        for pattern in DetectionPattern::all_up_to(n - 1, spec.max_total_photons()) {
            let r = checked(&spec, &u, &pattern);
            max_excess = max_excess.max(assert_bound(&r, &spec, &pattern));
        }
    }
    let b1 = single.best_value().unwrap();
    let bt = top.best_value().unwrap();
    let ok =
        clean && b1 <= r_in + 1e-9 && bt <= r_in + 1e-9 && zero_best <= r_in + 1e-9 && max_excess <= 1e-9;
    verdict(
        "3",
        "R_out <= R_in (M - D)",
        ok,
        &format!(
            "D=1 max R = {b1:.12}, D=M-1 max R = {bt:.12}, D=0 max R = {zero_best:.12} (R_in = {r_in}), \
             random max excess = {max_excess:.3e}, {:.2?}",
            start.elapsed()
        ),
    );
}

#[test]
fn criterion_4_chain_asymptotics() {
    let start = Instant::now();
    let mut details = Vec::new();
    let mut ok = true;
    for n in [4usize, 5, 6, 8] {
        let d = n.div_ceil(2);
        let chain = build_chain(n, 1e-3).unwrap();
        let spec = InputSpec::uniform(n, 0.01).unwrap();
        let pattern = chain.pattern_for(d);
        let res = checked(&spec, &chain.interferometer, &pattern);
        let m = figures_of_merit(&res, &spec, &pattern).unwrap();
        let (r_factor, g_limit) = chain_asymptotics(n, d).unwrap();
        let ratio = m.r_out.as_f64() / m.r_in.as_f64();
        let g = m.g_out.as_f64();
        let good = (ratio - r_factor).abs() <= 0.01 * r_factor && (g - g_limit).abs() <= 0.01 * g_limit;
        ok &= good;
        details.push(format!(
            "N={n} D={d}: R/R_in={ratio:.5} (→{r_factor:.5}) G={g:.5} (→{g_limit:.5})"
        ));
    }
    // At D = N - 1 the margin to the bound is O(eps^2) while the amplitude is an
    // O(eps^(N-1)) cancellation residue; below eps ~ 1e-2 that margin is under
    // f64 resolution for N = 8.
    let mut min_gap = f64::INFINITY;
    for n in 4..=8 {
        for &eps in &[0.05, 0.1, 0.5] {
            let chain = build_chain(n, eps).unwrap();
            for &p in &[0.01, 0.2] {
                let spec = InputSpec::uniform(n, p).unwrap();
                for d in 1..n {
                    let pattern = chain.pattern_for(d);
                    let res = checked(&spec, &chain.interferometer, &pattern);
                    let m = figures_of_merit(&res, &spec, &pattern).unwrap();
                    if let Some(pi) = m.pi_out.finite() {
                        min_gap = min_gap.min(pi - m.pi_in.as_f64());
                    }
                }
            }
        }
    }
    ok &= min_gap >= -1e-9;
    let elapsed = start.elapsed();
    ok &= within(elapsed, 60);
    verdict(
        "4",
        "chain-scheme asymptotics",
        ok,
        &format!(
            "{}; min(Pi_out - Pi_in) = {min_gap:.4e}; {elapsed:.2?}",
            details.join("; ")
        ),
    );
}

fn random_distribution(rng: &mut ChaCha8Rng, cap: usize) -> ModeDistribution {
    if cap == 0 {
        return ModeDistribution::vacuum();
    }
    let raw: Vec<f64> = (0..=cap).map(|_| rng.random_range(0.05..1.0)).collect();
    let z: f64 = raw.iter().sum();
    ModeDistribution::new(raw.iter().map(|x| x / z).collect()).unwrap()
}

#[test]
fn criterion_5_oracle_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
    let mut worst_oracle: f64 = 0.0;
    let mut multiphoton = 0;
    for k in 0..50 {
        let n = rng.random_range(2..=4);
        let mut budget = 4usize;
        let caps: Vec<usize> = (0..n)
            .map(|_| {
                let hi = if k % 2 == 0 { 1 } else { 2 };
                let c = rng.random_range(0..=hi.min(budget));
                budget -= c;
                c
            })
            .collect();
        if caps.iter().any(|&c| c > 1) {
            multiphoton += 1;
        }
        let spec = InputSpec::new(caps.iter().map(|&c| random_distribution(&mut rng, c)).collect()).unwrap();
        let u = Interferometer::haar_random(n, rng.random());
        let max_total = spec.max_total_photons();
        for pattern in DetectionPattern::all_up_to(n - 1, max_total) {
            let fast = checked(&spec, &u, &pattern);
            let slow = brute_condition(&spec, &u, &pattern);
            worst_oracle = worst_oracle.max(max_diff(&fast.unnormalized, &slow));
        }
    }

    let mut worst_closed: f64 = 0.0;
    for _ in 0..50 {
        let c1 = rng.random_range(0..=3);
        let c2 = rng.random_range(0..=3);
        let p1 = random_distribution(&mut rng, c1);
        let p2 = random_distribution(&mut rng, c2);
        let bs = Interferometer::beam_splitter(rng.random_range(0.0..PI), rng.random_range(-PI..PI));
        let spec = InputSpec::new(vec![p1.clone(), p2.clone()]).unwrap();
        for d in 0..=(c1 + c2) {
            let closed = condition_mixed_bs_closed_form(&p1, &p2, &bs, d).unwrap();
            let general = checked(&spec, &bs, &DetectionPattern::new(vec![d]));
            worst_closed = worst_closed.max(max_diff(&closed.unnormalized, &general.unnormalized));
        }
    }
    let ok = worst_oracle <= 1e-9 && worst_closed <= 1e-10 && multiphoton > 0;
    verdict(
        "5",
        "oracle equivalence",
        ok,
        &format!(
            "50 instances ({multiphoton} multiphoton): max |dc| vs Fock propagator = {worst_oracle:.2e}; \
             closed form vs general = {worst_closed:.2e}"
        ),
    );
}

#[test]
fn criterion_6_d_reconstruction() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0006);
    let mut worst: f64 = 0.0;
    let mut monotone = true;
    let mut threshold_consistent = true;
    for _ in 0..20 {
        let n = rng.random_range(3..=5);
        let u = Interferometer::haar_random(n, rng.random());
        let d_total = rng.random_range(0..n);
        let mut counts = vec![0usize; n - 1];
        for _ in 0..d_total {
            counts[rng.random_range(0..n - 1)] += 1;
        }
        let pattern = DetectionPattern::new(counts);
        let active: Vec<usize> = (0..n).collect();
        let d = d_coefficients(&u, &pattern, &active).unwrap();
        for &p in &[0.05, 0.2, 0.45, 0.6, 0.85] {
            let spec = InputSpec::uniform(n, p).unwrap();
            let direct = checked(&spec, &u, &pattern);
            let rebuilt = coefficients_from_d(&d, p / (1.0 - p));
            worst = worst.max(max_diff(direct.normalized.as_deref().unwrap(), &rebuilt));
        }
        let grid: Vec<f64> = (0..=400)
            .map(|k| 10f64.powf(-3.0 + 5.0 * k as f64 / 400.0))
            .collect();
        let truth: Vec<bool> = grid.iter().map(|&r| improvement_predicate(&d, r)).collect();
        monotone &= truth.windows(2).all(|w| w[0] || !w[1]);
        let r_star = improvement_threshold(&d);
        threshold_consistent &= grid
            .iter()
            .zip(&truth)
            .all(|(&r, &t)| (r - r_star).abs() < 1e-9 * r_star.max(1.0) || t == (r < r_star));
    }
    let ok = worst <= 1e-9 && monotone && threshold_consistent;
    verdict(
        "6",
        "d-coefficient reconstruction",
        ok,
        &format!("max |dc| = {worst:.2e}, predicate monotone = {monotone}, threshold consistent = {threshold_consistent}"),
    );
}

/// Chain experiment at coupling `eps`: four modes, `p = 0.2`, two-photon
/// input probability `p2` taken from the vacuum.
fn experiment(eps: f64, scenario: DetectorScenario, p2: f64) -> ConditionalResult {
    let chain = build_chain(4, eps).unwrap();
    let mode = ModeDistribution::new(vec![0.8 - p2, 0.2, p2]).unwrap();
    let spec = if p2 > 0.0 {
        InputSpec::new(vec![mode; 4]).unwrap()
    } else {
        InputSpec::uniform(4, 0.2).unwrap()
    };
    let models = scenario.models(4, spec.max_total_photons());
    let observed = scenario.observed(4, 2);
    observe(&spec, &chain.interferometer, &observed, &models).unwrap()
}

/// Interior maximum of `f` on the grid, refined by golden-section search.
fn peak(grid: &[f64], values: &[f64], f: impl Fn(f64) -> f64) -> (usize, f64) {
    let (i, _) =
        values.iter().enumerate().fold(
            (0, f64::NEG_INFINITY),
            |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) },
        );
    let lo = grid[i.saturating_sub(1)].ln();
    let hi = grid[(i + 1).min(grid.len() - 1)].ln();
    let (mut a, mut b) = (lo, hi);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let x1 = b - g * (b - a);
        let x2 = a + g * (b - a);
        if f(x1.exp()) > f(x2.exp()) {
            b = x2;
        } else {
            a = x1;
        }
    }
    (i, f((0.5 * (a + b)).exp()).max(values[i]))
}

#[test]
fn criterion_7_detector_imperfections() {
    let start = Instant::now();
    let grid: Vec<f64> = (0..=90)
        .map(|k| 10f64.powf(-3.0 + 3.0 * k as f64 / 90.0) * 0.9)
        .collect();
    let c1 = |scenario, p2| -> Vec<f64> {
        grid.iter()
            .map(|&e| experiment(e, scenario, p2).prob(1))
            .collect()
    };
    let ideal = c1(DetectorScenario::Ideal, 0.0);
    let bucket = c1(DetectorScenario::Bucket, 0.0);
    let lossy = c1(DetectorScenario::BucketEfficiency, 0.0);
    let dark = c1(DetectorScenario::DarkCounts, 0.0);
    let two = c1(DetectorScenario::BucketEfficiency, 0.001);
    let four = c1(DetectorScenario::BucketEfficiency, 0.004);

    // Ideal crossing of c1 = 0.2 by bisection in epsilon.
    let (mut lo, mut hi) = (0.05, 0.9);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if experiment(mid, DetectorScenario::Ideal, 0.0).prob(1) > 0.2 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let eps_cross = 0.5 * (lo + hi);
    let p_cross = experiment(eps_cross, DetectorScenario::Ideal, 0.0).pattern_probability;
    let crossing_ok = (p_cross - 0.007).abs() <= 0.002;

    let region: Vec<usize> = (0..grid.len()).filter(|&i| ideal[i] > 0.2).collect();
    let bucket_shift = region
        .iter()
        .map(|&i| (ideal[i] - bucket[i]).abs())
        .fold(0.0, f64::max);
    let (eff_lo, eff_hi) = region.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &i| {
        let drop = bucket[i] - lossy[i];
        (a.min(drop), b.max(drop))
    });
    let efficiency_ok = eff_lo >= 0.001 && eff_hi <= 0.005;

    let non_monotone = |v: &[f64]| {
        let (i, _) =
            v.iter().enumerate().fold(
                (0, f64::NEG_INFINITY),
                |(bi, bv), (i, &x)| if x > bv { (i, x) } else { (bi, bv) },
            );
        i > 0 && i + 1 < v.len() && v[0] < v[i] - 1e-3 && v[v.len() - 1] < v[i] - 1e-3
    };
    let (di, dark_max) = peak(&grid, &dark, |e| {
        experiment(e, DetectorScenario::DarkCounts, 0.0).prob(1)
    });
    let (_, two_max) = peak(&grid, &two, |e| {
        experiment(e, DetectorScenario::BucketEfficiency, 0.001).prob(1)
    });
    let (_, four_max) = peak(&grid, &four, |e| {
        experiment(e, DetectorScenario::BucketEfficiency, 0.004).prob(1)
    });
    let dark_ok = non_monotone(&dark) && dark_max > 0.2 && dark[di] < ideal[di];
    let two_ok = non_monotone(&two) && two_max > 0.2;
    let four_ok = four_max <= 0.2;
    let elapsed = start.elapsed();

    println!("    eps          ideal        bucket       efficiency   dark         P2=0.001     P2=0.004");
    for i in (0..grid.len()).step_by(6) {
        println!(
            "    {:<12.4e} {:<12.6} {:<12.6} {:<12.6} {:<12.6} {:<12.6} {:<12.6}",
            grid[i], ideal[i], bucket[i], lossy[i], dark[i], two[i], four[i]
        );
    }
    let ok = crossing_ok
        && bucket_shift < 1e-3
        && efficiency_ok
        && dark_ok
        && two_ok
        && four_ok
        && within(elapsed, 300);
    verdict(
        "7",
        "detector imperfections (four-mode chain, p = 0.2)",
        ok,
        &format!(
            "ideal crosses 0.2 at eps = {eps_cross:.4}, P = {p_cross:.5}; bucket shift {bucket_shift:.2e}; \
             efficiency drop [{eff_lo:.4}, {eff_hi:.4}]; dark max {dark_max:.5}; P2=0.001 max {two_max:.5}; \
             P2=0.004 max {four_max:.5}; {elapsed:.2?}"
        ),
    );
}

#[test]
fn criterion_8_purification() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0008);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let d = rng.random_range(0..=4);
        let mut q: Vec<f64> = (0..=d + 1).map(|_| rng.random_range(0.0..1.0)).collect();
        q[d] = 0.0;
        q[d + 1] += 0.05;
        let z: f64 = q.iter().sum();
        let q = ModeDistribution::new(q.iter().map(|x| x / z).collect()).unwrap();
        let theta = rng.random_range(0.1..(PI / 2.0 - 0.1));
        let bs = Interferometer::beam_splitter(theta, rng.random_range(-PI..PI));
        let r = purify_super_poissonian(&q, &bs).unwrap();
        let c = r.normalized.expect("pattern occurs");
        worst = worst.max(max_diff(&c, &[0.0, 1.0]));
    }
    verdict(
        "8",
        "super-Poissonian purification",
        worst <= 1e-12,
        &format!("max |c - (0,1)| = {worst:.2e}"),
    );
}

#[test]
fn criterion_9_determinism() {
    let configs = [
        r#"{"version": 1, "command": "pure-landscape", "theta_points": 41, "phi_points": 41, "beta": 1.0}"#,
        r#"{"version": 1, "command": "exp-sweep", "n_modes": 4, "p_max": 0.2,
            "epsilons": {"log_min": -3, "log_max": -0.05, "points": 25},
            "scenarios": ["ideal", "bucket", "bucket-efficiency", "dark-counts", "two-photon"]}"#,
        r#"{"version": 1, "command": "chain-sweep", "n_modes": [4, 5], "p_max": 0.05,
            "epsilons": [0.001, 0.01, 0.1]}"#,
        r#"{"version": 1, "command": "search", "n_modes": 3, "p_max": 0.3, "objective": "max_c1",
            "trials": 50, "refine_top": 2, "refine_iterations": 40, "seed": 7}"#,
    ];
    let root = tempfile::tempdir().unwrap();
    let mut files = 0;
    let mut identical = true;
    for (k, text) in configs.iter().enumerate() {
        let config = photon_post_cli::parse_config(text).unwrap();
        let a = root.path().join(format!("{k}a"));
        let b = root.path().join(format!("{k}b"));
        let out_a = photon_post_cli::execute(&config, &a, None).unwrap();
        let out_b = photon_post_cli::execute(&config, &b, None).unwrap();
        for (fa, fb) in out_a.iter().zip(&out_b) {
            files += 1;
            identical &= std::fs::read(fa).unwrap() == std::fs::read(fb).unwrap();
        }
        identical &= out_a.len() == out_b.len();
    }
    verdict(
        "9",
        "byte-identical reruns",
        identical && files > 0,
        &format!("{files} output files compared"),
    );
}

#[test]
fn open_problem_search_at_p_06() {
    let start = Instant::now();
    let task = SearchTask::new(4, 0.6, Objective::MaxC1, 10_000, 60);
    let report = search_improvement(&task).unwrap();
    let clean = report_is_clean(&report);
    let elapsed = start.elapsed();
    let best = report.best_value().unwrap();
    verdict(
        "p=0.6",
        "four-mode search for improvement at p >= 1/2",
        clean && report.trials_run == 10_000,
        &format!(
            "verdict: {}; best c1 = {best:.12} (baseline 0.6); {} evaluations; bound violations {}; {elapsed:.2?}",
            report.verdict, report.evaluations, report.bound_violations
        ),
    );
}
