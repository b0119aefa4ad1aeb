//! Iterative inference of the distance threshold `r`.
//!
//! Starting from a generous guess, align, take the rms of the shorter edge
//! distances and set `r` to a small multiple of it. Repeat until `r` settles.

use serde::{Deserialize, Serialize};

use crate::error::{Result, TrajError};
use crate::global::global_align;
use crate::scoring::{AssignmentResult, ScoringParams};
use crate::trajectory::Trajectory;

/// Smallest threshold ever used, in meters.
pub const R_FLOOR: f64 = 1e-6;

/// Root mean square of the smallest `ceil((1 - discard_frac) * len)` values.
pub fn rms_of(distances: &[f64], discard_frac: f64) -> Result<f64> {
    if distances.is_empty() {
        return Err(TrajError::EmptyInput("rms of no distances"));
    }
    if !(0.0..1.0).contains(&discard_frac) {
        return Err(TrajError::InvalidParams(format!("discard fraction must be in [0, 1), got {discard_frac}")));
    }
    let mut sorted = distances.to_vec();
    sorted.sort_by(f64::total_cmp);
    let keep = (((1.0 - discard_frac) * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
    let sum_sq: f64 = sorted[..keep].iter().map(|d| d * d).sum();
    Ok((sum_sq / keep as f64).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectOptions {
    pub discard_frac: f64,
    pub c1: f64,
    pub rel_tol: f64,
    pub max_iters: usize,
    pub r_min: Option<f64>,
    /// Also require the assignment to repeat exactly before declaring convergence.
    pub require_same_assignment: bool,
}

impl Default for SelectOptions {
    fn default() -> Self {
        Self { discard_frac: 0.1, c1: 2.0, rel_tol: 0.01, max_iters: 50, r_min: None, require_same_assignment: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Iteration {
    /// Threshold used for this iteration's alignment.
    pub r: f64,
    pub rms: f64,
    pub score: f64,
    pub matched_edge_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    Converged,
    ReachedLowerBound,
    ZeroDistanceFixpoint,
    MaxIterations,
    NoEdges,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamTrace {
    pub iterations: Vec<Iteration>,
    pub converged: bool,
    pub stop_reason: StopReason,
    pub options: SelectOptions,
    pub final_params: ScoringParams,
    /// Assignment under `final_params`.
    #[serde(skip)]
    pub final_assignment: Option<AssignmentResult>,
}

impl ParamTrace {
    /// `iter,r,rms,score,edges` rows with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("iter,r,rms,score,edges\n");
        for (k, it) in self.iterations.iter().enumerate() {
            out.push_str(&format!("{k},{},{},{},{}\n", it.r, it.rms, it.score, it.matched_edge_count));
        }
        out
    }
}

/// Runs the threshold iteration from the initial guess `r_hat`.
pub fn select_params(p: &Trajectory, q: &Trajectory, r_hat: f64, l: u32, opts: &SelectOptions) -> Result<ParamTrace> {
    if !(r_hat > 0.0) || !r_hat.is_finite() {
        return Err(TrajError::InvalidThreshold(r_hat));
    }
    if !(opts.c1 > 0.0) || opts.max_iters == 0 || !(opts.rel_tol >= 0.0) {
        return Err(TrajError::InvalidParams("c1 must be > 0, max_iters >= 1, rel_tol >= 0".into()));
    }
    let mut iterations = Vec::new();
    let mut r = r_hat;
    let mut previous: Option<AssignmentResult> = None;

    let (stop_reason, final_r, last) = loop {
        let params = ScoringParams::from_threshold(r, l)?;
        let res = global_align(p, q, &params)?;
        let distances = res.edge_distances(p, q);
        if distances.is_empty() {
            iterations.push(Iteration { r, rms: 0.0, score: res.score, matched_edge_count: 0 });
            break (StopReason::NoEdges, r, res);
        }
        let rms = rms_of(&distances, opts.discard_frac)?;
        iterations.push(Iteration { r, rms, score: res.score, matched_edge_count: distances.len() });
        let r_next = opts.c1 * rms;

        if r_next == 0.0 {
            break (StopReason::ZeroDistanceFixpoint, opts.r_min.unwrap_or(0.0).max(R_FLOOR), res);
        }
        if let Some(r_min) = opts.r_min {
            if r_next <= r_min {
                break (StopReason::ReachedLowerBound, r_min.max(R_FLOOR), res);
            }
        }
        let settled = (r_next - r).abs() / r < opts.rel_tol;
        let same = previous.as_ref().is_some_and(|prev| prev.alpha == res.alpha && prev.beta == res.beta);
        if settled && (!opts.require_same_assignment || same) {
            break (StopReason::Converged, r, res);
        }
        if iterations.len() >= opts.max_iters {
            break (StopReason::MaxIterations, r, res);
        }
        r = r_next.max(R_FLOOR);
        previous = Some(res);
    };

    let final_params = ScoringParams::from_threshold(final_r, l)?;
    let final_assignment = if final_r == iterations.last().map(|it| it.r).unwrap_or(f64::NAN) {
        last
    } else {
        global_align(p, q, &final_params)?
    };
    let converged = matches!(
        stop_reason,
        StopReason::Converged | StopReason::ReachedLowerBound | StopReason::ZeroDistanceFixpoint
    );
    Ok(ParamTrace {
        iterations,
        converged,
        stop_reason,
        options: *opts,
        final_params,
        final_assignment: Some(final_assignment),
    })
}
