//! Comparison methods: dynamic time warping, its distance-pruned variant,
//! and one-to-one sequence alignment with affine gap scores.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::scoring::{ScoringParams, Side};
use crate::trajectory::Trajectory;

/// Non-crossing index pairs `(i in P, j in Q)` with their total cost or score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrespondenceSet {
    pub pairs: Vec<(usize, usize)>,
    /// Sum of pair lengths for DTW variants; alignment score for [`seq_align`].
    pub total_cost: f64,
}

impl CorrespondenceSet {
    pub fn is_non_crossing(&self) -> bool {
        let mut sorted = self.pairs.clone();
        sorted.sort_unstable();
        sorted.windows(2).all(|w| w[0].1 <= w[1].1)
    }

    pub fn distances(&self, p: &Trajectory, q: &Trajectory) -> Vec<f64> {
        self.pairs.iter().map(|&(i, j)| p[i].dist_sq(&q[j]).sqrt()).collect()
    }
}

/// Dynamic time warping with Euclidean pair lengths.
///
/// Backtracking prefers the diagonal, then the cell above, then the cell to the left.
pub fn dtw(p: &Trajectory, q: &Trajectory) -> Result<CorrespondenceSet> {
    p.require_non_empty()?;
    q.require_non_empty()?;
    let (m, n) = (p.len(), q.len());
    let dist = |i: usize, j: usize| p[i].dist_sq(&q[j]).sqrt();
    let mut cost = vec![f64::INFINITY; m * n];
    for i in 0..m {
        for j in 0..n {
            let prev = if i == 0 && j == 0 {
                0.0
            } else {
                let diag = if i > 0 && j > 0 { cost[(i - 1) * n + j - 1] } else { f64::INFINITY };
                let up = if i > 0 { cost[(i - 1) * n + j] } else { f64::INFINITY };
                let left = if j > 0 { cost[i * n + j - 1] } else { f64::INFINITY };
                diag.min(up).min(left)
            };
            cost[i * n + j] = dist(i, j) + prev;
        }
    }

    let mut pairs = vec![(m - 1, n - 1)];
    let (mut i, mut j) = (m - 1, n - 1);
    while i > 0 || j > 0 {
        (i, j) = if i == 0 {
            (0, j - 1)
        } else if j == 0 {
            (i - 1, 0)
        } else {
            let diag = cost[(i - 1) * n + j - 1];
            let up = cost[(i - 1) * n + j];
            let left = cost[i * n + j - 1];
            if diag <= up && diag <= left {
                (i - 1, j - 1)
            } else if up <= left {
                (i - 1, j)
            } else {
                (i, j - 1)
            }
        };
        pairs.push((i, j));
    }
    pairs.reverse();
    Ok(CorrespondenceSet { pairs, total_cost: cost[m * n - 1] })
}

/// DTW pairs no longer than `r`; the cost is summed over the survivors.
pub fn dtw_pruned(p: &Trajectory, q: &Trajectory, r: f64) -> Result<CorrespondenceSet> {
    if !(r > 0.0) {
        return Err(crate::error::TrajError::InvalidThreshold(r));
    }
    let full = dtw(p, q)?;
    let pairs: Vec<(usize, usize)> = full
        .pairs
        .into_iter()
        .filter(|&(i, j)| p[i].dist_sq(&q[j]).sqrt() <= r)
        .collect();
    let total_cost = pairs.iter().map(|&(i, j)| p[i].dist_sq(&q[j]).sqrt()).sum();
    Ok(CorrespondenceSet { pairs, total_cost })
}

const MATCH: usize = 0;
const GAP_P: usize = 1;
const GAP_Q: usize = 2;

/// Maximum-score one-to-one non-crossing matching.
///
/// A matched pair scores `1 / (c + d^2)`; every maximal run of unmatched
/// points on either side scores `a + delta * len`. Three states per cell:
/// `(i, j)` matched, `p_i` unmatched, `q_j` unmatched.
pub fn seq_align(p: &Trajectory, q: &Trajectory, params: &ScoringParams) -> Result<CorrespondenceSet> {
    p.require_non_empty()?;
    q.require_non_empty()?;
    params.validate()?;
    let (m, n) = (p.len(), q.len());
    let w = n + 1;
    let open = params.a + params.delta;
    let ext = params.delta;
    let neg = f64::NEG_INFINITY;
    let mut score = vec![[neg; 3]; (m + 1) * w];
    let mut from = vec![[0u8; 3]; (m + 1) * w];
    // The empty prefix pair behaves like a match cell: any gap that follows opens.
    score[0][MATCH] = 0.0;

    let pick = |cands: [f64; 3]| -> (f64, u8) {
        let mut best = (neg, 0u8);
        for (k, v) in cands.into_iter().enumerate() {
            if v > best.0 {
                best = (v, k as u8);
            }
        }
        best
    };

    for i in 0..=m {
        for j in 0..=n {
            if i == 0 && j == 0 {
                continue;
            }
            let idx = i * w + j;
            if i > 0 && j > 0 {
                let d = params.edge_score(&p[i - 1], &q[j - 1]);
                let (v, k) = pick(score[(i - 1) * w + j - 1]);
                score[idx][MATCH] = v + d;
                from[idx][MATCH] = k;
            }
            if i > 0 {
                let up = score[(i - 1) * w + j];
                let (v, k) = pick([up[MATCH] + open, up[GAP_P] + ext, up[GAP_Q] + open]);
                score[idx][GAP_P] = v;
                from[idx][GAP_P] = k;
            }
            if j > 0 {
                let left = score[i * w + j - 1];
                let (v, k) = pick([left[MATCH] + open, left[GAP_P] + open, left[GAP_Q] + ext]);
                score[idx][GAP_Q] = v;
                from[idx][GAP_Q] = k;
            }
        }
    }

    let (total, state) = pick(score[m * w + n]);
    let mut state = state as usize;
    let (mut i, mut j) = (m, n);
    let mut pairs = Vec::new();
    while i > 0 || j > 0 {
        let prev = from[i * w + j][state] as usize;
        match state {
            MATCH => {
                pairs.push((i - 1, j - 1));
                i -= 1;
                j -= 1;
            }
            GAP_P => i -= 1,
            _ => j -= 1,
        }
        state = prev;
    }
    pairs.reverse();
    Ok(CorrespondenceSet { pairs, total_cost: total })
}

/// Unmatched points of a one-to-one matching, as maximal runs per side.
pub fn unmatched_runs(set: &CorrespondenceSet, m: usize, n: usize) -> Vec<(Side, usize, usize)> {
    let mut p_free = vec![true; m];
    let mut q_free = vec![true; n];
    for &(i, j) in &set.pairs {
        p_free[i] = false;
        q_free[j] = false;
    }
    let to_runs = |free: &[bool], side: Side| {
        crate::scoring::gaps_where(free.iter().copied(), side)
            .into_iter()
            .map(move |g| (side, g.start, g.len))
    };
    to_runs(&p_free, Side::P).chain(to_runs(&q_free, Side::Q)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(k: usize, step: f64) -> Trajectory {
        Trajectory::from_xy("l", &(0..k).map(|i| (i as f64 * step, 0.0)).collect::<Vec<_>>())
    }

    #[test]
    fn dtw_identical_is_diagonal() {
        let p = line(6, 10.0);
        let d = dtw(&p, &p).unwrap();
        assert_eq!(d.total_cost, 0.0);
        assert_eq!(d.pairs, (0..6).map(|i| (i, i)).collect::<Vec<_>>());
    }

    #[test]
    fn dtw_single_pair() {
        let p = Trajectory::from_xy("p", &[(0.0, 0.0)]);
        let q = Trajectory::from_xy("q", &[(3.0, 4.0)]);
        let d = dtw(&p, &q).unwrap();
        assert_eq!(d.total_cost, 5.0);
        assert_eq!(d.pairs, vec![(0, 0)]);
    }

    #[test]
    fn pruned_examples() {
        let p = line(5, 10.0);
        assert_eq!(dtw_pruned(&p, &p, 1.0).unwrap(), dtw(&p, &p).unwrap());
        let a = Trajectory::from_xy("a", &[(0.0, 0.0)]);
        let b = Trajectory::from_xy("b", &[(3.0, 4.0)]);
        let pr = dtw_pruned(&a, &b, 4.0).unwrap();
        assert!(pr.pairs.is_empty());
        assert_eq!(pr.total_cost, 0.0);
        assert!(dtw_pruned(&a, &b, 0.0).is_err());
    }

    #[test]
    fn seq_align_identical_points_far_apart() {
        let k = 5;
        let p = line(k, 1000.0);
        let params = ScoringParams::from_threshold(100.0, 0).unwrap();
        let s = seq_align(&p, &p, &params).unwrap();
        assert_eq!(s.pairs, (0..k).map(|i| (i, i)).collect::<Vec<_>>());
        assert!((s.total_cost - k as f64 / params.c).abs() < 1e-15);
    }

    #[test]
    fn seq_align_far_single_points() {
        let a = Trajectory::from_xy("a", &[(0.0, 0.0)]);
        let b = Trajectory::from_xy("b", &[(500.0, 0.0)]);
        let params = ScoringParams::from_threshold(100.0, 0).unwrap();
        let s = seq_align(&a, &b, &params).unwrap();
        assert!(s.pairs.is_empty());
        assert_eq!(s.total_cost, 2.0 / 10050.0);
        assert_eq!(unmatched_runs(&s, 1, 1), vec![(Side::P, 0, 1), (Side::Q, 0, 1)]);
    }

    #[test]
    fn dtw_swap_symmetry() {
        let p = Trajectory::from_xy("p", &[(0.0, 0.0), (5.0, 1.0), (9.0, -2.0), (15.0, 0.0)]);
        let q = Trajectory::from_xy("q", &[(1.0, 1.0), (7.0, 0.0), (14.0, 2.0)]);
        let a = dtw(&p, &q).unwrap();
        let b = dtw(&q, &p).unwrap();
        assert!((a.total_cost - b.total_cost).abs() < 1e-12);
        assert!(a.is_non_crossing() && b.is_non_crossing());
    }
}
