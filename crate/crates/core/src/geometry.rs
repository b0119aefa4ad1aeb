//! Planar points and the two distance primitives the scoring model needs.

use serde::{Deserialize, Serialize};

/// A sample point in a local planar frame, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    #[inline]
    pub fn dist_sq(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }
}

/// Euclidean (L2) distance between two points.
#[inline]
pub fn euclidean_dist(p: &Point, q: &Point) -> f64 {
    p.dist_sq(q).sqrt()
}

/// Closest point on a segment, as returned by [`point_segment_dist`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentProjection {
    pub dist: f64,
    /// Squared distance; never larger than either squared endpoint distance.
    pub dist_sq: f64,
    pub closest: Point,
    /// Interpolation parameter along `s0 -> s1`, clamped to `[0, 1]`.
    pub t: f64,
}

/// Distance from `p` to the segment `s0 s1`.
///
/// A degenerate segment (`s0 == s1`) yields `t = 0` and `closest = s0`.
pub fn point_segment_dist(p: &Point, s0: &Point, s1: &Point) -> SegmentProjection {
    let dx = s1.x - s0.x;
    let dy = s1.y - s0.y;
    let len_sq = dx * dx + dy * dy;
    if len_sq == 0.0 {
        let dist_sq = p.dist_sq(s0);
        return SegmentProjection {
            dist: dist_sq.sqrt(),
            dist_sq,
            closest: *s0,
            t: 0.0,
        };
    }
    let t = (((p.x - s0.x) * dx + (p.y - s0.y) * dy) / len_sq).clamp(0.0, 1.0);
    // Snap the clamped ends exactly so the distance never exceeds an endpoint distance.
    let closest = if t == 0.0 {
        *s0
    } else if t == 1.0 {
        *s1
    } else {
        Point::new(s0.x + t * dx, s0.y + t * dy)
    };
    // Interior rounding can overshoot an endpoint distance by an ulp.
    let dist_sq = p.dist_sq(&closest).min(p.dist_sq(s0)).min(p.dist_sq(s1));
    SegmentProjection { dist: dist_sq.sqrt(), dist_sq, closest, t }
}
