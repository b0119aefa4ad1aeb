//! Similarity of point-sampled trajectories under a gap-aware, asymmetric
//! assignment model.
//!
//! Each sample point of one trajectory is either assigned to a sample of the
//! other or left as a gap point. Assignments must be monotone (no two
//! correspondences cross). An edge between `p` and `q` scores
//! `1 / (c + |p - q|^2)` and a maximal gap of `k` points scores `a + delta * k`.
//! The best assignment is found by a dynamic program in `O(mn)` time.
//!
//! Besides the global model the crate provides local (best sub-trajectory)
//! and semi-continuous (closest point on the preceding segment) variants,
//! iterative threshold selection, the DTW / pruned DTW / sequence alignment
//! baselines, dataset-level analysis and brute-force references.

mod dp;

pub mod analysis;
pub mod baselines;
pub mod error;
pub mod geometry;
pub mod global;
pub mod local;
pub mod oracle;
pub mod params;
pub mod scoring;
pub mod semicontinuous;
pub mod trajectory;

pub use error::{Result, TrajError};
pub use geometry::{euclidean_dist, point_segment_dist, Point};
pub use global::{backtrack, global_align, global_score_linear_space, global_tables, DPTables, DpTable};
pub use local::{local_align, LocalResult, Slot};
pub use scoring::{
    delta_score, evaluate_score, gaps_of, normalize, validate_monotone, AssignmentResult, Gap, ScoringParams, Side,
    Target,
};
pub use semicontinuous::{semicontinuous_align, semicontinuous_local_align, SCResult, SegmentTarget};
pub use trajectory::{load_trajectory, project_geo, CsvFormat, GeoPoint, Trajectory};
