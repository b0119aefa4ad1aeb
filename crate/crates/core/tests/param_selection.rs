use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use traj_core::params::{select_params, SelectOptions, StopReason};
use traj_core::{global_align, ScoringParams, Trajectory};

const DETOUR: std::ops::Range<usize> = 70..130;

/// Clean 200-point path and a noisy copy that leaves it for 60 points.
fn pair(seed: u64, sigma: f64, offset: f64) -> (Trajectory, Trajectory) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, sigma).unwrap();
    let path = |k: usize| {
        let s = 12.0 * k as f64;
        (s, 60.0 * (s / 500.0).cos())
    };
    let p: Vec<(f64, f64)> = (0..200).map(path).collect();
    let q: Vec<(f64, f64)> = (0..200)
        .map(|k| {
            let (x, y) = path(k);
            let dy = if DETOUR.contains(&k) { offset } else { 0.0 };
            (x + noise.sample(&mut rng), y + dy + noise.sample(&mut rng))
        })
        .collect();
    (Trajectory::from_xy("p", &p), Trajectory::from_xy("q", &q))
}

fn coverage(p: &Trajectory, q: &Trajectory, r: f64) -> f64 {
    let res = global_align(p, q, &ScoringParams::from_threshold(r, 4).unwrap()).unwrap();
    DETOUR.filter(|&k| res.beta[k].is_none()).count() as f64 / DETOUR.len() as f64
}

#[test]
fn detour_coverage_does_not_shrink() {
    let opts = SelectOptions::default();
    let mut good = 0;
    for seed in 0..20 {
        let (p, q) = pair(500 + seed, 5.0, 500.0);
        let trace = select_params(&p, &q, 1000.0, 4, &opts).unwrap();
        let first = coverage(&p, &q, trace.iterations[0].r);
        let last = coverage(&p, &q, trace.final_params.r);
        if last >= first {
            good += 1;
        }
    }
    assert!(good >= 18, "coverage non-decreasing on {good}/20 seeds");
}

#[test]
fn r_min_stops_early() {
    let (p, q) = pair(3, 5.0, 500.0);
    let opts = SelectOptions { r_min: Some(200.0), ..Default::default() };
    let trace = select_params(&p, &q, 1000.0, 4, &opts).unwrap();
    assert!(trace.converged);
    assert_eq!(trace.stop_reason, StopReason::ReachedLowerBound);
    assert_eq!(trace.final_params.r, 200.0);
}

#[test]
fn stricter_assignment_criterion_never_stops_sooner() {
    for seed in 0..5 {
        let (p, q) = pair(40 + seed, 5.0, 500.0);
        let loose = select_params(&p, &q, 1000.0, 4, &SelectOptions::default()).unwrap();
        let strict_opts = SelectOptions { require_same_assignment: true, ..Default::default() };
        let strict = select_params(&p, &q, 1000.0, 4, &strict_opts).unwrap();
        assert!(strict.iterations.len() >= loose.iterations.len());
        assert_eq!(strict.iterations[..loose.iterations.len()], loose.iterations[..]);
    }
}

#[test]
fn max_iters_reports_no_convergence() {
    let (p, q) = pair(9, 5.0, 500.0);
    let opts = SelectOptions { max_iters: 1, rel_tol: 0.0, ..Default::default() };
    let trace = select_params(&p, &q, 1000.0, 4, &opts).unwrap();
    assert_eq!(trace.iterations.len(), 1);
    assert!(!trace.converged);
    assert_eq!(trace.stop_reason, StopReason::MaxIterations);
}
