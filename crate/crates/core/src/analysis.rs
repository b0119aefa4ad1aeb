//! Dataset-level analysis: all-pairs comparison, per-point importance and
//! distance histograms.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{dtw, dtw_pruned, seq_align, unmatched_runs, CorrespondenceSet};
use crate::error::{Result, TrajError};
use crate::global::global_align;
use crate::scoring::{AssignmentResult, ScoringParams, Side};
use crate::trajectory::Trajectory;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Assignment,
    Dtw,
    DtwPruned,
    SeqAlign,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Assignment => "assignment",
            Method::Dtw => "dtw",
            Method::DtwPruned => "dtw-pruned",
            Method::SeqAlign => "seqalign",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PairDetail {
    Assignment(AssignmentResult),
    Correspondences(CorrespondenceSet),
}

/// Comparison of trajectories `a < b` (indices into the input slice).
#[derive(Debug, Clone, PartialEq)]
pub struct PairResult {
    pub a: usize,
    pub b: usize,
    pub score: f64,
    pub normalized: Option<f64>,
    pub edges: usize,
    pub gaps_p: usize,
    pub gaps_q: usize,
    pub detail: PairDetail,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairTable {
    pub method: Method,
    pub ids: Vec<String>,
    pub results: Vec<PairResult>,
}

impl PairTable {
    /// `idA,idB,score,normalized,edges,gapsP,gapsQ`; `normalized` is blank for DTW variants.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("idA,idB,score,normalized,edges,gapsP,gapsQ\n");
        for r in &self.results {
            let norm = r.normalized.map(|v| v.to_string()).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                self.ids[r.a], self.ids[r.b], r.score, norm, r.edges, r.gaps_p, r.gaps_q
            );
        }
        out
    }
}

fn compare(trajs: &[Trajectory], a: usize, b: usize, method: Method, params: &ScoringParams) -> Result<PairResult> {
    let (p, q) = (&trajs[a], &trajs[b]);
    Ok(match method {
        Method::Assignment => {
            let res = global_align(p, q, params)?;
            let gaps_p = res.gaps.iter().filter(|g| g.side == Side::P).count();
            PairResult {
                a,
                b,
                score: res.score,
                normalized: Some(res.normalized),
                edges: res.edge_count(),
                gaps_p,
                gaps_q: res.gaps.len() - gaps_p,
                detail: PairDetail::Assignment(res),
            }
        }
        Method::Dtw | Method::DtwPruned | Method::SeqAlign => {
            let set = match method {
                Method::Dtw => dtw(p, q)?,
                Method::DtwPruned => dtw_pruned(p, q, params.r)?,
                _ => seq_align(p, q, params)?,
            };
            let runs = unmatched_runs(&set, p.len(), q.len());
            let gaps_p = runs.iter().filter(|r| r.0 == Side::P).count();
            let normalized = (method == Method::SeqAlign)
                .then(|| crate::scoring::normalize(set.total_cost, p.len(), q.len(), params.c));
            PairResult {
                a,
                b,
                score: set.total_cost,
                normalized,
                edges: set.pairs.len(),
                gaps_p,
                gaps_q: runs.len() - gaps_p,
                detail: PairDetail::Correspondences(set),
            }
        }
    })
}

/// Compares every unordered pair once, in `(a, b)` lexicographic order.
///
/// Pairs are independent; with `parallel` they are spread over the rayon
/// pool. The output does not depend on the worker count.
pub fn all_pairs(trajs: &[Trajectory], method: Method, params: &ScoringParams, parallel: bool) -> Result<PairTable> {
    if trajs.len() < 2 {
        return Err(TrajError::TooFewTrajectories(trajs.len()));
    }
    let pairs: Vec<(usize, usize)> = (0..trajs.len())
        .flat_map(|a| (a + 1..trajs.len()).map(move |b| (a, b)))
        .collect();
    let results = if parallel {
        pairs.par_iter().map(|&(a, b)| compare(trajs, a, b, method, params)).collect::<Result<Vec<_>>>()?
    } else {
        pairs.iter().map(|&(a, b)| compare(trajs, a, b, method, params)).collect::<Result<Vec<_>>>()?
    };
    Ok(PairTable { method, ids: trajs.iter().map(|t| t.id().to_string()).collect(), results })
}

/// How per-point importance is counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ImportanceTag {
    /// Number of other trajectories that receive an outgoing edge from the point.
    Assignment,
    /// Number of DTW pairs the point takes part in, over all comparisons.
    Dtw,
    /// Number of other trajectories with a surviving pruned-DTW pair at the point.
    DtwPruned,
}

impl ImportanceTag {
    pub fn method(self) -> Method {
        match self {
            ImportanceTag::Assignment => Method::Assignment,
            ImportanceTag::Dtw => Method::Dtw,
            ImportanceTag::DtwPruned => Method::DtwPruned,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImportanceMap {
    pub tag: ImportanceTag,
    /// One entry per input trajectory, in input order.
    pub counts: Vec<(String, Vec<u32>)>,
}

impl ImportanceMap {
    /// `trajectory_id,point_index,x,y,count`, sorted by id then point index.
    pub fn to_csv(&self, trajs: &[Trajectory]) -> String {
        let mut order: Vec<usize> = (0..self.counts.len()).collect();
        order.sort_by(|&x, &y| self.counts[x].0.cmp(&self.counts[y].0));
        let mut out = String::from("trajectory_id,point_index,x,y,count\n");
        for t in order {
            let (id, counts) = &self.counts[t];
            for (k, c) in counts.iter().enumerate() {
                let pt = trajs[t][k];
                let _ = writeln!(out, "{id},{k},{},{},{c}", pt.x, pt.y);
            }
        }
        out
    }
}

pub fn importance(trajs: &[Trajectory], table: &PairTable, tag: ImportanceTag) -> Result<ImportanceMap> {
    if table.method != tag.method() {
        return Err(TrajError::MethodMismatch {
            expected: tag.method().name().into(),
            found: table.method.name().into(),
        });
    }
    let mut counts: Vec<Vec<u32>> = trajs.iter().map(|t| vec![0; t.len()]).collect();
    for r in &table.results {
        match (&r.detail, tag) {
            (PairDetail::Assignment(res), ImportanceTag::Assignment) => {
                for (i, t) in res.alpha.iter().enumerate() {
                    counts[r.a][i] += t.is_some() as u32;
                }
                for (j, t) in res.beta.iter().enumerate() {
                    counts[r.b][j] += t.is_some() as u32;
                }
            }
            (PairDetail::Correspondences(set), ImportanceTag::Dtw) => {
                for &(i, j) in &set.pairs {
                    counts[r.a][i] += 1;
                    counts[r.b][j] += 1;
                }
            }
            (PairDetail::Correspondences(set), ImportanceTag::DtwPruned) => {
                let mut seen_a = vec![false; trajs[r.a].len()];
                let mut seen_b = vec![false; trajs[r.b].len()];
                for &(i, j) in &set.pairs {
                    seen_a[i] = true;
                    seen_b[j] = true;
                }
                for (c, s) in counts[r.a].iter_mut().zip(seen_a) {
                    *c += s as u32;
                }
                for (c, s) in counts[r.b].iter_mut().zip(seen_b) {
                    *c += s as u32;
                }
            }
            _ => {
                return Err(TrajError::MethodMismatch {
                    expected: tag.method().name().into(),
                    found: "mismatched pair detail".into(),
                })
            }
        }
    }
    Ok(ImportanceMap {
        tag,
        counts: trajs.iter().map(|t| t.id().to_string()).zip(counts).collect(),
    })
}

/// Smallest distance represented on a log axis, in meters.
pub const LOG_EPS: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramSpec {
    pub bins: usize,
    pub log_scale: bool,
    /// `bins + 1` edges in meters.
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
    pub mean: f64,
    pub rms: f64,
    pub mean_bin: usize,
    pub rms_bin: usize,
}

impl HistogramSpec {
    /// `bin_lo,bin_hi,count,is_mean_bin,is_rms_bin`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_lo,bin_hi,count,is_mean_bin,is_rms_bin\n");
        for k in 0..self.bins {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                self.edges[k],
                self.edges[k + 1],
                self.counts[k],
                k == self.mean_bin,
                k == self.rms_bin
            );
        }
        out
    }
}

/// Equal-width histogram over `[min, max]`, in linear or log10 space.
pub fn distance_histogram(distances: &[f64], bins: usize, log_scale: bool) -> Result<HistogramSpec> {
    if distances.is_empty() {
        return Err(TrajError::EmptyInput("histogram of no distances"));
    }
    if bins == 0 {
        return Err(TrajError::InvalidParams("histogram needs at least one bin".into()));
    }
    if distances.iter().any(|d| !d.is_finite() || *d < 0.0) {
        return Err(TrajError::InvalidParams("distances must be finite and non-negative".into()));
    }
    let fwd = |d: f64| if log_scale { d.max(LOG_EPS).log10() } else { d };
    let inv = |v: f64| if log_scale { 10f64.powf(v) } else { v };
    let lo = distances.iter().map(|&d| fwd(d)).fold(f64::INFINITY, f64::min);
    let hi = distances.iter().map(|&d| fwd(d)).fold(f64::NEG_INFINITY, f64::max);
    let width = (hi - lo) / bins as f64;
    let bin_of = |d: f64| -> usize {
        if width == 0.0 {
            return 0;
        }
        let k = ((fwd(d) - lo) / width).floor();
        (k.max(0.0) as usize).min(bins - 1)
    };

    let mut counts = vec![0usize; bins];
    for &d in distances {
        counts[bin_of(d)] += 1;
    }
    let n = distances.len() as f64;
    let mean = distances.iter().sum::<f64>() / n;
    let rms = (distances.iter().map(|d| d * d).sum::<f64>() / n).sqrt();
    let edges = (0..=bins).map(|k| inv(lo + width * k as f64)).collect();
    Ok(HistogramSpec {
        bins,
        log_scale,
        edges,
        counts,
        mean,
        rms,
        mean_bin: bin_of(mean),
        rms_bin: bin_of(rms),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(id: &str, k: usize, dy: f64) -> Trajectory {
        Trajectory::from_xy(id, &(0..k).map(|i| (i as f64 * 30.0, dy)).collect::<Vec<_>>())
    }

    #[test]
    fn two_identical_trajectories() {
        let t = vec![line("a", 6, 0.0), line("b", 6, 0.0)];
        let params = ScoringParams::from_threshold(100.0, 4).unwrap();
        let table = all_pairs(&t, Method::Assignment, &params, false).unwrap();
        assert_eq!(table.results.len(), 1);
        assert!((table.results[0].normalized.unwrap() - 1.0).abs() < 1e-12);
        let imp = importance(&t, &table, ImportanceTag::Assignment).unwrap();
        assert!(imp.counts.iter().all(|(_, c)| c.iter().all(|&x| x == 1)));
    }

    #[test]
    fn far_trajectories_have_zero_importance() {
        let t = vec![line("a", 5, 0.0), line("b", 5, 5000.0)];
        let params = ScoringParams::from_threshold(100.0, 0).unwrap();
        let table = all_pairs(&t, Method::Assignment, &params, false).unwrap();
        let imp = importance(&t, &table, ImportanceTag::Assignment).unwrap();
        assert!(imp.counts.iter().all(|(_, c)| c.iter().all(|&x| x == 0)));
    }

    #[test]
    fn dtw_importance_covers_everything() {
        let t = vec![line("a", 5, 0.0), line("b", 7, 5000.0), line("c", 3, 40.0)];
        let params = ScoringParams::from_threshold(100.0, 0).unwrap();
        let table = all_pairs(&t, Method::Dtw, &params, true).unwrap();
        assert_eq!(table.results.len(), 3);
        let imp = importance(&t, &table, ImportanceTag::Dtw).unwrap();
        assert!(imp.counts.iter().all(|(_, c)| c.iter().all(|&x| x >= 1)));
        assert!(importance(&t, &table, ImportanceTag::Assignment).is_err());
    }

    #[test]
    fn too_few_trajectories() {
        let params = ScoringParams::from_threshold(100.0, 0).unwrap();
        assert!(matches!(
            all_pairs(&[line("a", 3, 0.0)], Method::Dtw, &params, false),
            Err(TrajError::TooFewTrajectories(1))
        ));
    }

    #[test]
    fn histogram_log_bins() {
        let h = distance_histogram(&[1.0, 10.0, 100.0], 3, true).unwrap();
        assert_eq!(h.counts, vec![1, 1, 1]);
        assert!((h.edges[0] - 1.0).abs() < 1e-12 && (h.edges[3] - 100.0).abs() < 1e-9);
    }

    #[test]
    fn histogram_constant_values() {
        let h = distance_histogram(&[4.0; 7], 5, false).unwrap();
        assert_eq!(h.counts.iter().filter(|&&c| c > 0).count(), 1);
        assert_eq!(h.counts[0], 7);
        assert_eq!((h.mean, h.rms), (4.0, 4.0));
        assert_eq!((h.mean_bin, h.rms_bin), (0, 0));
    }

    #[test]
    fn histogram_zero_distance_on_log_axis() {
        let h = distance_histogram(&[0.0, 1.0, 10.0], 4, true).unwrap();
        assert_eq!(h.counts[0], 1);
        assert_eq!(h.counts.iter().sum::<usize>(), 3);
    }

    #[test]
    fn histogram_errors() {
        assert!(distance_histogram(&[], 3, false).is_err());
        assert!(distance_histogram(&[1.0], 0, false).is_err());
    }

    proptest::proptest! {
        #[test]
        fn histogram_counts_and_moments(
            d in proptest::collection::vec(0.0..1e4f64, 1..200),
            bins in 1usize..40,
            log in proptest::bool::ANY,
        ) {
            let h = distance_histogram(&d, bins, log).unwrap();
            proptest::prop_assert_eq!(h.counts.iter().sum::<usize>(), d.len());
            proptest::prop_assert!(h.mean <= h.rms * (1.0 + 1e-12));
            proptest::prop_assert_eq!(h.edges.len(), bins + 1);
        }
    }
}
