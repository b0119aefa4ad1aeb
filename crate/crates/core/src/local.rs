//! Local assignment: the most similar pair of sub-trajectories.
//!
//! Every edge scores `delta_score - tau`, every gap `a + (delta - tau)|g|`,
//! and the unrestricted table is floored at zero so a poor prefix can be
//! dropped. The answer is the largest cell of that table.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::dp::{self, EdgeScores, Terms};
use crate::error::{Result, TrajError};
use crate::global::DiscreteEdges;
use crate::scoring::{gaps_where, Gap, ScoringParams, Side, Target};
use crate::trajectory::Trajectory;

/// Default tau as a multiple of delta for discrete local assignment.
pub const DEFAULT_TAU_FACTOR: f64 = 1.5;

/// Role of one point in a local assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Slot {
    /// Outside the matched window; not scored.
    Unaligned,
    /// Inside the window, without an outgoing edge.
    Gap,
    /// Inside the window, assigned to this index of the other trajectory.
    To(usize),
}

impl Slot {
    pub fn target(self) -> Option<usize> {
        match self {
            Slot::To(k) => Some(k),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalResult {
    pub alpha: Vec<Slot>,
    pub beta: Vec<Slot>,
    /// Gaps inside the windows, in absolute indices.
    pub gaps: Vec<Gap>,
    pub score: f64,
    /// DP cell (prefix lengths) where the best score was reached.
    pub end_cell: (usize, usize),
    /// DP cell where the backtrace hit the zero floor (or the origin).
    pub start_cell: (usize, usize),
}

impl LocalResult {
    pub fn is_empty(&self) -> bool {
        self.score == 0.0
    }

    pub fn p_window(&self) -> Range<usize> {
        self.start_cell.0..self.end_cell.0
    }

    pub fn q_window(&self) -> Range<usize> {
        self.start_cell.1..self.end_cell.1
    }

    /// Maps restricted to the windows, with window-relative indices.
    pub fn window_maps(&self) -> (Vec<Target>, Vec<Target>) {
        let (pw, qw) = (self.p_window(), self.q_window());
        let alpha = self.alpha[pw.clone()].iter().map(|s| s.target().map(|j| j - qw.start)).collect();
        let beta = self.beta[qw].iter().map(|s| s.target().map(|i| i - pw.start)).collect();
        (alpha, beta)
    }
}

pub(crate) struct LocalRaw {
    pub alpha: Vec<Target>,
    pub beta: Vec<Target>,
    pub score: f64,
    pub start: (usize, usize),
    pub end: (usize, usize),
}

pub(crate) fn local_raw<E: EdgeScores>(m: usize, n: usize, edges: &E, params: &ScoringParams) -> Result<LocalRaw> {
    params.validate()?;
    let tau = params.tau.ok_or(TrajError::MissingTau)?;
    let terms = Terms::local(params.a, params.delta, tau);
    let fwd = dp::forward(m, n, edges, &terms, true, false);
    let (score, bi, bj) = fwd.best;
    if score <= 0.0 {
        return Ok(LocalRaw { alpha: vec![None; m], beta: vec![None; n], score: 0.0, start: (0, 0), end: (0, 0) });
    }
    let prov = fwd.prov.expect("provenance requested");
    let (alpha, beta, stop) = dp::backtrace(m, n, &prov, (bi, bj))?;
    let start = match stop {
        dp::Stop::Origin => (0, 0),
        dp::Stop::Reset(i, j) => (i, j),
    };
    Ok(LocalRaw { alpha, beta, score, start, end: (bi, bj) })
}

pub(crate) fn slots(map: &[Target], window: Range<usize>) -> Vec<Slot> {
    map.iter()
        .enumerate()
        .map(|(k, t)| match t {
            _ if !window.contains(&k) => Slot::Unaligned,
            None => Slot::Gap,
            Some(x) => Slot::To(*x),
        })
        .collect()
}

pub(crate) fn window_gaps(map_len: usize, is_gap: impl Fn(usize) -> bool, window: Range<usize>, side: Side) -> Vec<Gap> {
    gaps_where((0..map_len).map(|k| window.contains(&k) && is_gap(k)), side)
}

/// Best local assignment. `params.tau` must be set.
pub fn local_align(p: &Trajectory, q: &Trajectory, params: &ScoringParams) -> Result<LocalResult> {
    p.require_non_empty()?;
    q.require_non_empty()?;
    let edges = DiscreteEdges { p, q, c: params.c };
    let raw = local_raw(p.len(), q.len(), &edges, params)?;
    let pw = raw.start.0..raw.end.0;
    let qw = raw.start.1..raw.end.1;
    let mut gaps = window_gaps(p.len(), |k| raw.alpha[k].is_none(), pw.clone(), Side::P);
    gaps.extend(window_gaps(q.len(), |k| raw.beta[k].is_none(), qw.clone(), Side::Q));
    Ok(LocalResult {
        alpha: slots(&raw.alpha, pw),
        beta: slots(&raw.beta, qw),
        gaps,
        score: raw.score,
        end_cell: raw.end,
        start_cell: raw.start,
    })
}
