//! Exhaustive reference implementations for tiny instances.
//!
//! Everything here enumerates candidate solutions and scores them term by
//! term. None of it shares code with the dynamic programs it is used to
//! check, apart from the crossing test in [`validate_monotone`].

use std::ops::Range;

use crate::error::{Result, TrajError};
use crate::geometry::Point;
use crate::scoring::{validate_monotone, ScoringParams, Target};
use crate::trajectory::Trajectory;

/// Upper bound on the number of `(alpha, beta)` candidate pairs examined.
pub const ENUMERATION_GUARD: u128 = 10_000_000;

/// One monotone assignment produced by [`enumerate_monotone`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EnumeratedAssignment {
    pub alpha: Vec<Target>,
    pub beta: Vec<Target>,
}

/// All maps of `len` points into `0..targets ∪ {gap}` whose targets are non-decreasing.
fn monotone_maps(len: usize, targets: usize) -> Vec<Vec<Target>> {
    fn rec(pos: usize, min: usize, cur: &mut Vec<Target>, len: usize, targets: usize, out: &mut Vec<Vec<Target>>) {
        if pos == len {
            out.push(cur.clone());
            return;
        }
        cur.push(None);
        rec(pos + 1, min, cur, len, targets, out);
        cur.pop();
        for t in min..targets {
            cur.push(Some(t));
            rec(pos + 1, t, cur, len, targets, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, 0, &mut Vec::with_capacity(len), len, targets, &mut out);
    out
}

/// Every monotone assignment between sequences of `m` and `n` points, each exactly once.
///
/// Alpha and beta candidates are generated separately (each non-crossing on
/// its own) and pairs are then filtered by the full crossing check.
pub fn enumerate_monotone(m: usize, n: usize) -> Result<impl Iterator<Item = EnumeratedAssignment>> {
    let alphas = monotone_maps(m, n);
    let betas = monotone_maps(n, m);
    let pairs = alphas.len() as u128 * betas.len() as u128;
    if pairs > ENUMERATION_GUARD {
        return Err(TrajError::GuardExceeded(pairs));
    }
    Ok(alphas.into_iter().flat_map(move |alpha| {
        betas
            .iter()
            .filter(|beta| validate_monotone(&alpha, beta).is_ok())
            .map(|beta| EnumeratedAssignment { alpha: alpha.clone(), beta: beta.clone() })
            .collect::<Vec<_>>()
    }))
}

/// Maximal runs of `true` in `flags`, as lengths.
fn runs(flags: impl IntoIterator<Item = bool>) -> Vec<usize> {
    let mut out = Vec::new();
    let mut cur = 0;
    for f in flags {
        if f {
            cur += 1;
        } else if cur > 0 {
            out.push(cur);
            cur = 0;
        }
    }
    if cur > 0 {
        out.push(cur);
    }
    out
}

fn edge(u: &Point, v: &Point, params: &ScoringParams) -> f64 {
    let dx = u.x - v.x;
    let dy = u.y - v.y;
    1.0 / (params.c + dx * dx + dy * dy)
}

/// One side of the score written out literally: edges out of `from` plus its gaps.
fn side_score(from: &[Point], to: &[Point], map: &[Target], params: &ScoringParams) -> f64 {
    let tau = params.tau.unwrap_or(0.0);
    let edges: f64 = map
        .iter()
        .enumerate()
        .filter_map(|(k, t)| t.map(|x| edge(&from[k], &to[x], params) - tau))
        .sum();
    let gaps: f64 = runs(map.iter().map(Option::is_none))
        .into_iter()
        .map(|len| params.a + (params.delta - tau) * len as f64)
        .sum();
    edges + gaps
}

/// Score of an assignment, summed term by term.
pub fn literal_score(p: &[Point], q: &[Point], alpha: &[Target], beta: &[Target], params: &ScoringParams) -> f64 {
    side_score(p, q, alpha, params) + side_score(q, p, beta, params)
}

/// Which optimum [`brute_force_best`] searches for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMode {
    Global,
    /// Best over all pairs of contiguous index windows (either may be
    /// empty), floored at zero, using the tau-shifted score.
    LocalWindowed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BruteForce {
    pub score: f64,
    /// Maps over the windows below, in window-relative indices.
    pub alpha: Vec<Target>,
    pub beta: Vec<Target>,
    pub p_window: Range<usize>,
    pub q_window: Range<usize>,
}

fn best_on(p: &[Point], q: &[Point], params: &ScoringParams) -> Result<(f64, Vec<Target>, Vec<Target>)> {
    let alphas = monotone_maps(p.len(), q.len());
    let betas = monotone_maps(q.len(), p.len());
    let pairs = alphas.len() as u128 * betas.len() as u128;
    if pairs > ENUMERATION_GUARD {
        return Err(TrajError::GuardExceeded(pairs));
    }
    // The score separates into an alpha part and a beta part.
    let beta_scores: Vec<f64> = betas.iter().map(|b| side_score(q, p, b, params)).collect();
    let mut best = (f64::NEG_INFINITY, Vec::new(), Vec::new());
    for alpha in &alphas {
        let sa = side_score(p, q, alpha, params);
        for (beta, sb) in betas.iter().zip(&beta_scores) {
            let total = sa + sb;
            if total > best.0 && validate_monotone(alpha, beta).is_ok() {
                best = (total, alpha.clone(), beta.clone());
            }
        }
    }
    Ok(best)
}

/// Exhaustive optimum over all monotone assignments.
pub fn brute_force_best(p: &Trajectory, q: &Trajectory, params: &ScoringParams, mode: OracleMode) -> Result<BruteForce> {
    let (pp, qq) = (p.points(), q.points());
    match mode {
        OracleMode::Global => {
            let params = ScoringParams { tau: None, ..*params };
            let (score, alpha, beta) = best_on(pp, qq, &params)?;
            Ok(BruteForce { score, alpha, beta, p_window: 0..pp.len(), q_window: 0..qq.len() })
        }
        OracleMode::LocalWindowed => {
            if params.tau.is_none() {
                return Err(TrajError::MissingTau);
            }
            let mut best = BruteForce { score: 0.0, alpha: vec![], beta: vec![], p_window: 0..0, q_window: 0..0 };
            for pw in windows(pp.len()) {
                for qw in windows(qq.len()) {
                    if pw.is_empty() && qw.is_empty() {
                        continue;
                    }
                    let (score, alpha, beta) = best_on(&pp[pw.clone()], &qq[qw.clone()], params)?;
                    if score > best.score {
                        best = BruteForce { score, alpha, beta, p_window: pw.clone(), q_window: qw.clone() };
                    }
                }
            }
            Ok(best)
        }
    }
}

/// All contiguous windows of `0..len`, including the empty one.
fn windows(len: usize) -> impl Iterator<Item = Range<usize>> {
    std::iter::once(0..0).chain((0..len).flat_map(move |s| (s + 1..=len).map(move |e| s..e)))
}

/// Every monotone warping path from `(0, 0)` to `(m-1, n-1)` with unit steps.
pub fn enumerate_dtw_paths(m: usize, n: usize) -> Vec<Vec<(usize, usize)>> {
    fn rec(i: usize, j: usize, m: usize, n: usize, cur: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        cur.push((i, j));
        if i + 1 == m && j + 1 == n {
            out.push(cur.clone());
        } else {
            if i + 1 < m && j + 1 < n {
                rec(i + 1, j + 1, m, n, cur, out);
            }
            if i + 1 < m {
                rec(i + 1, j, m, n, cur, out);
            }
            if j + 1 < n {
                rec(i, j + 1, m, n, cur, out);
            }
        }
        cur.pop();
    }
    let mut out = Vec::new();
    if m > 0 && n > 0 {
        rec(0, 0, m, n, &mut Vec::new(), &mut out);
    }
    out
}

/// Minimum total Euclidean length over all warping paths.
pub fn brute_force_dtw(p: &Trajectory, q: &Trajectory) -> f64 {
    enumerate_dtw_paths(p.len(), q.len())
        .iter()
        .map(|path| path.iter().map(|&(i, j)| p[i].dist_sq(&q[j]).sqrt()).sum::<f64>())
        .fold(f64::INFINITY, f64::min)
}

/// Every one-to-one non-crossing matching, as sorted index pairs.
pub fn enumerate_matchings(m: usize, n: usize) -> Vec<Vec<(usize, usize)>> {
    fn rec(i: usize, j: usize, m: usize, n: usize, cur: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        out.push(cur.clone());
        for a in i..m {
            for b in j..n {
                cur.push((a, b));
                rec(a + 1, b + 1, m, n, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(0, 0, m, n, &mut Vec::new(), &mut out);
    out
}

/// Score of a one-to-one matching: one edge score per pair plus gap runs on both sides.
pub fn matching_score(p: &Trajectory, q: &Trajectory, pairs: &[(usize, usize)], params: &ScoringParams) -> f64 {
    let edges: f64 = pairs.iter().map(|&(i, j)| edge(&p[i], &q[j], params)).sum();
    let mut p_free = vec![true; p.len()];
    let mut q_free = vec![true; q.len()];
    for &(i, j) in pairs {
        p_free[i] = false;
        q_free[j] = false;
    }
    let gaps: f64 = runs(p_free)
        .into_iter()
        .chain(runs(q_free))
        .map(|len| params.a + params.delta * len as f64)
        .sum();
    edges + gaps
}

/// Best one-to-one matching score by enumeration.
pub fn brute_force_matching(p: &Trajectory, q: &Trajectory, params: &ScoringParams) -> f64 {
    enumerate_matchings(p.len(), q.len())
        .iter()
        .map(|m| matching_score(p, q, m, params))
        .fold(f64::NEG_INFINITY, f64::max)
}
