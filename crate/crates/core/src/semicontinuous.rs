//! Semi-continuous assignment: a point assigned to `q_j` is matched to the
//! closest point of the segment `q_{j-1} q_j` instead of the sample itself.
//!
//! The dynamic program is unchanged; only the edge scores differ, and they
//! differ per direction. For the first sample of a trajectory there is no
//! preceding segment and the sample itself is used.

use serde::{Deserialize, Serialize};

use crate::dp::EdgeScores;
use crate::error::Result;
use crate::geometry::{point_segment_dist, Point};
use crate::global::DPTables;
use crate::local::{slots, window_gaps, LocalResult};
use crate::scoring::{gaps_of, normalize, Gap, ScoringParams, Side, Target};
use crate::trajectory::Trajectory;
use crate::{dp, local};

/// Default tau as a multiple of delta for semi-continuous local assignment.
pub const DEFAULT_TAU_FACTOR: f64 = 2.0;

/// Where on the other polyline a point was assigned.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmentTarget {
    /// Index `j` of the sample ending the segment `(j-1, j)`.
    pub edge_index: usize,
    /// Position along the segment; `1.0` is the sample `j` itself. Always `1.0` for `j = 0`.
    pub t: f64,
    pub point: Point,
}

/// Closest point to `from` on the segment preceding `to[k]`.
pub fn segment_target(from: &Point, to: &[Point], k: usize) -> (SegmentTarget, f64) {
    if k == 0 {
        let d = from.dist_sq(&to[0]);
        return (SegmentTarget { edge_index: 0, t: 1.0, point: to[0] }, d);
    }
    let proj = point_segment_dist(from, &to[k - 1], &to[k]);
    (SegmentTarget { edge_index: k, t: proj.t, point: proj.closest }, proj.dist_sq)
}

/// Semi-continuous edge scores at 0-based `(i, j)`: `(p_i -> segment before q_j, q_j -> segment before p_i)`.
pub fn semicontinuous_delta(p: &Trajectory, q: &Trajectory, c: f64, i: usize, j: usize) -> (f64, f64) {
    let (_, dp) = segment_target(&p[i], q.points(), j);
    let (_, dq) = segment_target(&q[j], p.points(), i);
    (1.0 / (c + dp), 1.0 / (c + dq))
}

struct SegmentEdges<'a> {
    p: &'a Trajectory,
    q: &'a Trajectory,
    c: f64,
}

impl EdgeScores for SegmentEdges<'_> {
    #[inline(always)]
    fn pair(&self, i: usize, j: usize) -> (f64, f64) {
        semicontinuous_delta(self.p, self.q, self.c, i - 1, j - 1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SCResult {
    pub alpha: Vec<Option<SegmentTarget>>,
    pub beta: Vec<Option<SegmentTarget>>,
    pub gaps: Vec<Gap>,
    pub score: f64,
    pub normalized: f64,
}

impl SCResult {
    pub fn index_maps(&self) -> (Vec<Target>, Vec<Target>) {
        let idx = |m: &[Option<SegmentTarget>]| m.iter().map(|t| t.map(|s| s.edge_index)).collect();
        (idx(&self.alpha), idx(&self.beta))
    }

    /// Distances from every assigned point to its realized target, alpha first.
    pub fn edge_distances(&self, p: &Trajectory, q: &Trajectory) -> Vec<f64> {
        let fwd = self.alpha.iter().enumerate().filter_map(|(i, t)| t.map(|s| p[i].dist_sq(&s.point).sqrt()));
        let bwd = self.beta.iter().enumerate().filter_map(|(j, t)| t.map(|s| q[j].dist_sq(&s.point).sqrt()));
        fwd.chain(bwd).collect()
    }

    /// Recomputes the score from the realized target points.
    pub fn evaluate(&self, p: &Trajectory, q: &Trajectory, params: &ScoringParams) -> f64 {
        let edge = |u: &Point, t: &SegmentTarget| 1.0 / (params.c + u.dist_sq(&t.point));
        let edges: f64 = self
            .alpha
            .iter()
            .enumerate()
            .filter_map(|(i, t)| t.as_ref().map(|t| edge(&p[i], t)))
            .chain(self.beta.iter().enumerate().filter_map(|(j, t)| t.as_ref().map(|t| edge(&q[j], t))))
            .sum();
        let gaps: f64 = self.gaps.iter().map(|g| params.a + params.delta * g.len as f64).sum();
        edges + gaps
    }
}

fn realize(p: &Trajectory, q: &Trajectory, alpha: &[Target], beta: &[Target]) -> (Vec<Option<SegmentTarget>>, Vec<Option<SegmentTarget>>) {
    let a = alpha
        .iter()
        .enumerate()
        .map(|(i, t)| t.map(|j| segment_target(&p[i], q.points(), j).0))
        .collect();
    let b = beta
        .iter()
        .enumerate()
        .map(|(j, t)| t.map(|i| segment_target(&q[j], p.points(), i).0))
        .collect();
    (a, b)
}

/// Global semi-continuous assignment.
pub fn semicontinuous_align(p: &Trajectory, q: &Trajectory, params: &ScoringParams) -> Result<SCResult> {
    p.require_non_empty()?;
    q.require_non_empty()?;
    params.validate()?;
    let edges = SegmentEdges { p, q, c: params.c };
    let terms = dp::Terms::global(params.a, params.delta);
    let fwd = dp::forward(p.len(), q.len(), &edges, &terms, true, false);
    let tables = DPTables::from_forward(p.len(), q.len(), fwd);
    let (alpha_idx, beta_idx) = crate::global::backtrack(&tables)?;
    let mut gaps = gaps_of(&alpha_idx, Side::P);
    gaps.extend(gaps_of(&beta_idx, Side::Q));
    let (alpha, beta) = realize(p, q, &alpha_idx, &beta_idx);
    let score = tables.score();
    Ok(SCResult { alpha, beta, gaps, score, normalized: normalize(score, p.len(), q.len(), params.c) })
}

/// Local semi-continuous assignment, plus the realized targets of assigned points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SCLocalResult {
    pub local: LocalResult,
    pub alpha_targets: Vec<Option<SegmentTarget>>,
    pub beta_targets: Vec<Option<SegmentTarget>>,
}

pub fn semicontinuous_local_align(p: &Trajectory, q: &Trajectory, params: &ScoringParams) -> Result<SCLocalResult> {
    p.require_non_empty()?;
    q.require_non_empty()?;
    let edges = SegmentEdges { p, q, c: params.c };
    let raw = local::local_raw(p.len(), q.len(), &edges, params)?;
    let pw = raw.start.0..raw.end.0;
    let qw = raw.start.1..raw.end.1;
    let mut gaps = window_gaps(p.len(), |k| raw.alpha[k].is_none(), pw.clone(), Side::P);
    gaps.extend(window_gaps(q.len(), |k| raw.beta[k].is_none(), qw.clone(), Side::Q));
    let (alpha_targets, beta_targets) = realize(p, q, &raw.alpha, &raw.beta);
    Ok(SCLocalResult {
        local: LocalResult {
            alpha: slots(&raw.alpha, pw),
            beta: slots(&raw.beta, qw),
            gaps,
            score: raw.score,
            end_cell: raw.end,
            start_cell: raw.start,
        },
        alpha_targets,
        beta_targets,
    })
}
