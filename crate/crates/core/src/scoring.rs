//! Scoring parameters, the per-edge score, gap extraction and assignment scoring.
//!
//! An assignment is a pair of maps `alpha: P -> Q ∪ {gap}` and
//! `beta: Q -> P ∪ {gap}`. Seen as a directed bipartite graph it is a set of
//! edges `p_i -> q_alpha(i)` and `q_j -> p_beta(j)`; the assignment is
//! monotone when no two edges cross. Opposite edges on the same index pair
//! never cross.

use serde::{Deserialize, Serialize};

use crate::error::{Result, TrajError};
use crate::geometry::Point;
use crate::trajectory::Trajectory;

/// One entry of `alpha` or `beta`: the index of the target point, or `None` for a gap point.
pub type Target = Option<usize>;

/// Parameters of the assignment score.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoringParams {
    /// Offset in the edge score `1 / (c + d^2)`.
    pub c: f64,
    /// Per-point gap extension score.
    pub delta: f64,
    /// Gap opening score, `-l * delta`.
    pub a: f64,
    /// Distance threshold in meters.
    pub r: f64,
    /// Minimum gap length.
    pub l: u32,
    /// Local-mode threshold subtracted from every term.
    pub tau: Option<f64>,
}

impl ScoringParams {
    /// Parameters for threshold `r` and minimum gap length `l`:
    /// `c = r/2`, `delta = 1/(c + r^2)`, `a = -l * delta`.
    pub fn from_threshold(r: f64, l: u32) -> Result<Self> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(TrajError::InvalidThreshold(r));
        }
        let c = r / 2.0;
        let delta = 1.0 / (c + r * r);
        Ok(Self { c, delta, a: -(l as f64) * delta, r, l, tau: None })
    }

    pub fn with_tau(mut self, tau: f64) -> Self {
        self.tau = Some(tau);
        self
    }

    /// `tau = factor * delta`.
    pub fn with_tau_factor(self, factor: f64) -> Self {
        let tau = factor * self.delta;
        self.with_tau(tau)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0) || !self.c.is_finite() {
            return Err(TrajError::InvalidParams(format!("c must be positive, got {}", self.c)));
        }
        if !(self.r > 0.0) {
            return Err(TrajError::InvalidThreshold(self.r));
        }
        if !self.delta.is_finite() || !self.a.is_finite() {
            return Err(TrajError::InvalidParams("non-finite gap scores".into()));
        }
        if self.a > 0.0 {
            return Err(TrajError::InvalidParams(format!("gap opening score must be <= 0, got {}", self.a)));
        }
        if let Some(tau) = self.tau {
            if !(tau >= 0.0) || !tau.is_finite() {
                return Err(TrajError::InvalidParams(format!("tau must be >= 0, got {tau}")));
            }
        }
        Ok(())
    }

    #[inline]
    pub fn edge_score(&self, p: &Point, q: &Point) -> f64 {
        delta_score(p, q, self.c)
    }

    /// Score of one gap of `len` points, shifted by tau when set.
    pub fn gap_score(&self, len: usize) -> f64 {
        let tau = self.tau.unwrap_or(0.0);
        self.a + (self.delta - tau) * len as f64
    }
}

/// `1 / (c + |p - q|^2)`.
#[inline]
pub fn delta_score(p: &Point, q: &Point, c: f64) -> f64 {
    1.0 / (c + p.dist_sq(q))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    P,
    Q,
}

/// A maximal run of gap points on one trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gap {
    pub side: Side,
    pub start: usize,
    pub len: usize,
}

/// Maximal runs of `None` in `map`, in index order.
pub fn gaps_of(map: &[Target], side: Side) -> Vec<Gap> {
    gaps_where(map.iter().map(Option::is_none), side)
}

pub(crate) fn gaps_where(is_gap: impl Iterator<Item = bool>, side: Side) -> Vec<Gap> {
    let mut gaps = Vec::new();
    let mut open: Option<usize> = None;
    let mut idx = 0;
    for g in is_gap {
        match (g, open) {
            (true, None) => open = Some(idx),
            (false, Some(start)) => {
                gaps.push(Gap { side, start, len: idx - start });
                open = None;
            }
            _ => {}
        }
        idx += 1;
    }
    if let Some(start) = open {
        gaps.push(Gap { side, start, len: idx - start });
    }
    gaps
}

/// An optimal (or evaluated) assignment with its score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssignmentResult {
    pub alpha: Vec<Target>,
    pub beta: Vec<Target>,
    pub gaps: Vec<Gap>,
    pub score: f64,
    pub normalized: f64,
}

impl AssignmentResult {
    pub(crate) fn build(alpha: Vec<Target>, beta: Vec<Target>, score: f64, c: f64) -> Self {
        let mut gaps = gaps_of(&alpha, Side::P);
        gaps.extend(gaps_of(&beta, Side::Q));
        let normalized = normalize(score, alpha.len(), beta.len(), c);
        Self { alpha, beta, gaps, score, normalized }
    }

    pub fn edge_count(&self) -> usize {
        self.alpha.iter().chain(&self.beta).filter(|t| t.is_some()).count()
    }

    /// Lengths of all edges, alpha edges first.
    pub fn edge_distances(&self, p: &Trajectory, q: &Trajectory) -> Vec<f64> {
        edge_distances(p, q, &self.alpha, &self.beta)
    }

    /// Same assignment seen from the other trajectory.
    pub fn swapped(&self) -> Self {
        let mut gaps: Vec<Gap> = self
            .gaps
            .iter()
            .map(|g| Gap { side: if g.side == Side::P { Side::Q } else { Side::P }, ..*g })
            .collect();
        gaps.sort_by_key(|g| (g.side == Side::Q, g.start));
        Self { alpha: self.beta.clone(), beta: self.alpha.clone(), gaps, ..*self }
    }
}

pub fn edge_distances(p: &Trajectory, q: &Trajectory, alpha: &[Target], beta: &[Target]) -> Vec<f64> {
    let forward = alpha
        .iter()
        .enumerate()
        .filter_map(|(i, t)| t.map(|j| p[i].dist_sq(&q[j]).sqrt()));
    let backward = beta
        .iter()
        .enumerate()
        .filter_map(|(j, t)| t.map(|i| q[j].dist_sq(&p[i]).sqrt()));
    forward.chain(backward).collect()
}

fn check_shape(p: &Trajectory, q: &Trajectory, alpha: &[Target], beta: &[Target]) -> Result<()> {
    if alpha.len() != p.len() || beta.len() != q.len() {
        return Err(TrajError::ShapeMismatch(format!(
            "alpha has {} entries for {} points, beta has {} entries for {} points",
            alpha.len(),
            p.len(),
            beta.len(),
            q.len()
        )));
    }
    if let Some((i, j)) = alpha.iter().enumerate().find_map(|(i, t)| t.filter(|&j| j >= q.len()).map(|j| (i, j))) {
        return Err(TrajError::ShapeMismatch(format!("alpha[{i}] = {j} out of range")));
    }
    if let Some((j, i)) = beta.iter().enumerate().find_map(|(j, t)| t.filter(|&i| i >= p.len()).map(|i| (j, i))) {
        return Err(TrajError::ShapeMismatch(format!("beta[{j}] = {i} out of range")));
    }
    Ok(())
}

/// Score of an assignment: edge scores plus `a + delta * |g|` per gap.
///
/// With `tau` set, every edge contributes `delta_score - tau` and every gap
/// `a + (delta - tau) * |g|`.
pub fn evaluate_score(
    p: &Trajectory,
    q: &Trajectory,
    alpha: &[Target],
    beta: &[Target],
    params: &ScoringParams,
) -> Result<f64> {
    check_shape(p, q, alpha, beta)?;
    let tau = params.tau.unwrap_or(0.0);
    let mut edges = 0.0;
    for (i, t) in alpha.iter().enumerate() {
        if let Some(j) = *t {
            edges += params.edge_score(&p[i], &q[j]) - tau;
        }
    }
    for (j, t) in beta.iter().enumerate() {
        if let Some(i) = *t {
            edges += params.edge_score(&q[j], &p[i]) - tau;
        }
    }
    let gaps: f64 = gaps_of(alpha, Side::P)
        .iter()
        .chain(gaps_of(beta, Side::Q).iter())
        .map(|g| params.gap_score(g.len))
        .sum();
    Ok(edges + gaps)
}

/// Divides `score` by `(m + n) / c`, the largest score any assignment can reach.
pub fn normalize(score: f64, m: usize, n: usize, c: f64) -> f64 {
    let total = (m + n) as f64;
    if total == 0.0 {
        return 0.0;
    }
    score * c / total
}

/// A pair of crossing edges, given as undirected `(p index, q index)` pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Crossing {
    pub first: (usize, usize),
    pub second: (usize, usize),
}

impl std::fmt::Display for Crossing {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "edges (p{}, q{}) and (p{}, q{}) cross",
            self.first.0, self.first.1, self.second.0, self.second.1
        )
    }
}

/// Checks that the edge set of `(alpha, beta)` is pairwise non-crossing.
///
/// Two index pairs `(i, j)`, `(k, l)` cross iff `i < k && j > l` or vice
/// versa. Sorting the undirected pairs by `(i, j)` reduces the check to the
/// `j` sequence being non-decreasing.
pub fn validate_monotone(alpha: &[Target], beta: &[Target]) -> std::result::Result<(), Crossing> {
    let mut pairs: Vec<(usize, usize)> = alpha
        .iter()
        .enumerate()
        .filter_map(|(i, t)| t.map(|j| (i, j)))
        .chain(beta.iter().enumerate().filter_map(|(j, t)| t.map(|i| (i, j))))
        .collect();
    pairs.sort_unstable();
    // Running maximum of j identifies the earlier edge of a crossing.
    let mut max_pair: Option<(usize, usize)> = None;
    for &pair in &pairs {
        if let Some(prev) = max_pair {
            if prev.1 > pair.1 {
                return Err(Crossing { first: prev, second: pair });
            }
        }
        if max_pair.is_none_or(|m| pair.1 >= m.1) {
            max_pair = Some(pair);
        }
    }
    Ok(())
}
