//! JSON document written by `traj align`.

use serde::Serialize;

use traj_core::baselines::{unmatched_runs, CorrespondenceSet};
use traj_core::params::ParamTrace;
use traj_core::semicontinuous::{SCLocalResult, SegmentTarget};
use traj_core::{AssignmentResult, Gap, LocalResult, SCResult, ScoringParams, Side, Slot, Target, Trajectory};

#[derive(Debug, Serialize)]
pub struct ParamsOut {
    pub a: f64,
    pub delta: f64,
    pub c: f64,
    pub r: f64,
    pub l: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
}

impl From<&ScoringParams> for ParamsOut {
    fn from(p: &ScoringParams) -> Self {
        Self { a: p.a, delta: p.delta, c: p.c, r: p.r, l: p.l, tau: p.tau }
    }
}

/// One entry of `alpha` / `beta`.
#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum TargetOut {
    Index(usize),
    Segment { edge: usize, t: f64 },
}

#[derive(Debug, Serialize)]
pub struct EdgeOut {
    pub side: Side,
    pub from: usize,
    pub to: usize,
    pub dist: f64,
}

#[derive(Debug, Serialize)]
pub struct AlignDoc {
    pub mode: &'static str,
    pub params: ParamsOut,
    pub score: f64,
    pub normalized: Option<f64>,
    pub alpha: Vec<Option<TargetOut>>,
    pub beta: Vec<Option<TargetOut>>,
    pub gaps: Vec<Gap>,
    pub edge_distances: Vec<EdgeOut>,
    /// Half-open windows `[start, end)` of a local assignment.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_window: Option<[usize; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_window: Option<[usize; 2]>,
    /// Correspondence pairs `[i, j]` of the baselines.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pairs: Option<Vec<(usize, usize)>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub param_trace: Option<ParamTrace>,
}

impl AlignDoc {
    fn new(mode: &'static str, params: &ScoringParams, score: f64, normalized: Option<f64>) -> Self {
        Self {
            mode,
            params: params.into(),
            score,
            normalized,
            alpha: Vec::new(),
            beta: Vec::new(),
            gaps: Vec::new(),
            edge_distances: Vec::new(),
            p_window: None,
            q_window: None,
            pairs: None,
            param_trace: None,
        }
    }

    pub fn global(mode: &'static str, params: &ScoringParams, res: &AssignmentResult, p: &Trajectory, q: &Trajectory) -> Self {
        let mut doc = Self::new(mode, params, res.score, Some(res.normalized));
        doc.alpha = index_targets(&res.alpha);
        doc.beta = index_targets(&res.beta);
        doc.gaps = res.gaps.clone();
        doc.edge_distances = index_edges(&res.alpha, &res.beta, p, q);
        doc
    }

    pub fn local(mode: &'static str, params: &ScoringParams, res: &LocalResult, p: &Trajectory, q: &Trajectory) -> Self {
        let mut doc = Self::new(mode, params, res.score, None);
        let alpha: Vec<Target> = res.alpha.iter().map(|s| s.target()).collect();
        let beta: Vec<Target> = res.beta.iter().map(|s| s.target()).collect();
        doc.alpha = index_targets(&alpha);
        doc.beta = index_targets(&beta);
        doc.gaps = res.gaps.clone();
        doc.edge_distances = index_edges(&alpha, &beta, p, q);
        doc.p_window = Some([res.start_cell.0, res.end_cell.0]);
        doc.q_window = Some([res.start_cell.1, res.end_cell.1]);
        doc
    }

    pub fn semicontinuous(params: &ScoringParams, res: &SCResult, p: &Trajectory, q: &Trajectory) -> Self {
        let mut doc = Self::new("semicontinuous", params, res.score, Some(res.normalized));
        doc.alpha = segment_targets(&res.alpha);
        doc.beta = segment_targets(&res.beta);
        doc.gaps = res.gaps.clone();
        doc.edge_distances = segment_edges(&res.alpha, &res.beta, p, q);
        doc
    }

    pub fn semicontinuous_local(params: &ScoringParams, res: &SCLocalResult, p: &Trajectory, q: &Trajectory) -> Self {
        let mut doc = Self::local("semicontinuous-local", params, &res.local, p, q);
        let keep = |slots: &[Slot], targets: &[Option<SegmentTarget>]| -> Vec<Option<SegmentTarget>> {
            slots.iter().zip(targets).map(|(s, t)| if s.target().is_some() { *t } else { None }).collect()
        };
        let alpha = keep(&res.local.alpha, &res.alpha_targets);
        let beta = keep(&res.local.beta, &res.beta_targets);
        doc.alpha = segment_targets(&alpha);
        doc.beta = segment_targets(&beta);
        doc.edge_distances = segment_edges(&alpha, &beta, p, q);
        doc
    }

    pub fn baseline(
        mode: &'static str,
        params: &ScoringParams,
        set: &CorrespondenceSet,
        normalized: Option<f64>,
        p: &Trajectory,
        q: &Trajectory,
    ) -> Self {
        let mut doc = Self::new(mode, params, set.total_cost, normalized);
        doc.alpha = vec![None; p.len()];
        doc.beta = vec![None; q.len()];
        doc.gaps = unmatched_runs(set, p.len(), q.len())
            .into_iter()
            .map(|(side, start, len)| Gap { side, start, len })
            .collect();
        doc.edge_distances = set
            .pairs
            .iter()
            .map(|&(i, j)| EdgeOut { side: Side::P, from: i, to: j, dist: p[i].dist_sq(&q[j]).sqrt() })
            .collect();
        doc.pairs = Some(set.pairs.clone());
        doc
    }
}

fn index_targets(map: &[Target]) -> Vec<Option<TargetOut>> {
    map.iter().map(|t| t.map(TargetOut::Index)).collect()
}

fn segment_targets(map: &[Option<SegmentTarget>]) -> Vec<Option<TargetOut>> {
    map.iter().map(|t| t.map(|s| TargetOut::Segment { edge: s.edge_index, t: s.t })).collect()
}

fn index_edges(alpha: &[Target], beta: &[Target], p: &Trajectory, q: &Trajectory) -> Vec<EdgeOut> {
    let fwd = alpha.iter().enumerate().filter_map(|(i, t)| {
        t.map(|j| EdgeOut { side: Side::P, from: i, to: j, dist: p[i].dist_sq(&q[j]).sqrt() })
    });
    let bwd = beta.iter().enumerate().filter_map(|(j, t)| {
        t.map(|i| EdgeOut { side: Side::Q, from: j, to: i, dist: q[j].dist_sq(&p[i]).sqrt() })
    });
    fwd.chain(bwd).collect()
}

fn segment_edges(alpha: &[Option<SegmentTarget>], beta: &[Option<SegmentTarget>], p: &Trajectory, q: &Trajectory) -> Vec<EdgeOut> {
    let fwd = alpha.iter().enumerate().filter_map(|(i, t)| {
        t.map(|s| EdgeOut { side: Side::P, from: i, to: s.edge_index, dist: p[i].dist_sq(&s.point).sqrt() })
    });
    let bwd = beta.iter().enumerate().filter_map(|(j, t)| {
        t.map(|s| EdgeOut { side: Side::Q, from: j, to: s.edge_index, dist: q[j].dist_sq(&s.point).sqrt() })
    });
    fwd.chain(bwd).collect()
}
