use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use traj_core::baselines::{dtw, seq_align};
use traj_core::oracle::{brute_force_best, brute_force_dtw, brute_force_matching, OracleMode};
use traj_core::{
    evaluate_score, global_align, global_tables, local_align, validate_monotone, DpTable, ScoringParams, Trajectory,
};

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1e-12)
}

fn random_traj(rng: &mut ChaCha8Rng, id: &str, len: usize) -> Trajectory {
    let pts: Vec<(f64, f64)> = (0..len).map(|_| (rng.gen_range(0.0..100.0), rng.gen_range(0.0..100.0))).collect();
    Trajectory::from_xy(id, &pts)
}

fn random_params(rng: &mut ChaCha8Rng) -> ScoringParams {
    let r = [5.0, 20.0, 60.0][rng.gen_range(0..3)];
    ScoringParams::from_threshold(r, rng.gen_range(0..3)).unwrap()
}

#[test]
fn global_dp_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for case in 0..200 {
        let (m, n) = (rng.gen_range(1..=5), rng.gen_range(1..=5));
        let p = random_traj(&mut rng, "p", m);
        let q = random_traj(&mut rng, "q", n);
        let params = random_params(&mut rng);
        let res = global_align(&p, &q, &params).unwrap();
        let bf = brute_force_best(&p, &q, &params, OracleMode::Global).unwrap();
        assert!(close(res.score, bf.score), "case {case}: dp {} vs brute force {}", res.score, bf.score);
        validate_monotone(&res.alpha, &res.beta).unwrap();
        let eval = evaluate_score(&p, &q, &res.alpha, &res.beta, &params).unwrap();
        assert!(close(eval, res.score), "case {case}: backtrack re-evaluates to {eval}, dp says {}", res.score);
    }
}

#[test]
fn every_prefix_cell_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for case in 0..40 {
        let (m, n) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
        let p = random_traj(&mut rng, "p", m);
        let q = random_traj(&mut rng, "q", n);
        let params = random_params(&mut rng);
        let tables = global_tables(&p, &q, &params, true).unwrap();
        for i in 1..=m {
            for j in 1..=n {
                let pp = Trajectory::new("p", p.points()[..i].to_vec()).unwrap();
                let qq = Trajectory::new("q", q.points()[..j].to_vec()).unwrap();
                let bf = brute_force_best(&pp, &qq, &params, OracleMode::Global).unwrap();
                let v = tables.value(DpTable::Score, i, j).unwrap();
                assert!(close(v, bf.score), "case {case} cell ({i},{j}): {v} vs {}", bf.score);
            }
        }
    }
}

#[test]
fn local_dp_matches_windowed_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for case in 0..100 {
        let (m, n) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
        let p = random_traj(&mut rng, "p", m);
        let q = random_traj(&mut rng, "q", n);
        let base = random_params(&mut rng);
        let factor = [0.0, 1.0, 1.5, 2.0][rng.gen_range(0..4)];
        let params = base.with_tau_factor(factor);
        let res = local_align(&p, &q, &params).unwrap();
        let bf = brute_force_best(&p, &q, &params, OracleMode::LocalWindowed).unwrap();
        assert!(close(res.score, bf.score), "case {case}: dp {} vs brute force {}", res.score, bf.score);
        assert!(res.score >= 0.0);
        if !res.is_empty() {
            let pw = Trajectory::new("p", p.points()[res.p_window()].to_vec()).unwrap();
            let qw = Trajectory::new("q", q.points()[res.q_window()].to_vec()).unwrap();
            let (a, b) = res.window_maps();
            validate_monotone(&a, &b).unwrap();
            let eval = evaluate_score(&pw, &qw, &a, &b, &params).unwrap();
            assert!(close(eval, res.score), "case {case}: window re-evaluates to {eval}, dp says {}", res.score);
        }
    }
}

#[test]
fn dtw_matches_path_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for case in 0..100 {
        let (m, n) = (rng.gen_range(1..=5), rng.gen_range(1..=5));
        let p = random_traj(&mut rng, "p", m);
        let q = random_traj(&mut rng, "q", n);
        let got = dtw(&p, &q).unwrap();
        let want = brute_force_dtw(&p, &q);
        assert!(close(got.total_cost, want), "case {case}: {} vs {want}", got.total_cost);
        let along: f64 = got.distances(&p, &q).iter().sum();
        assert!(close(along, got.total_cost));
    }
}

#[test]
fn seq_align_matches_matching_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for case in 0..100 {
        let (m, n) = (rng.gen_range(1..=5), rng.gen_range(1..=5));
        let p = random_traj(&mut rng, "p", m);
        let q = random_traj(&mut rng, "q", n);
        let params = random_params(&mut rng);
        let got = seq_align(&p, &q, &params).unwrap();
        let want = brute_force_matching(&p, &q, &params);
        assert!(close(got.total_cost, want), "case {case}: {} vs {want}", got.total_cost);
        assert!(got.is_non_crossing());
    }
}
