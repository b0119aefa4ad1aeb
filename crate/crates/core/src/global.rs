//! Optimal global assignment in `O(mn)` time.

use crate::dp::{self, Cell, EdgeScores, Forward, Terms};
use crate::error::{Result, TrajError};
use crate::scoring::{AssignmentResult, ScoringParams, Target};
use crate::trajectory::Trajectory;

/// The eight restricted score functions kept by the dynamic program.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DpTable {
    /// No restriction.
    Score,
    /// `p_i` is a gap point.
    GapP,
    /// `q_j` is a gap point.
    GapQ,
    /// Both `p_i` and `q_j` are gap points.
    GapBoth,
    /// `p_i` has no outgoing edge and contributes no score itself.
    PhiP,
    /// `q_j` has no outgoing edge and contributes no score itself.
    PhiQ,
    /// `p_i` unscored without outgoing edge, `q_j` a gap point.
    PhiPGapQ,
    /// `p_i` a gap point, `q_j` unscored without outgoing edge.
    GapPPhiQ,
}

impl DpTable {
    pub const ALL: [DpTable; 8] = [
        DpTable::GapBoth,
        DpTable::GapPPhiQ,
        DpTable::PhiPGapQ,
        DpTable::PhiP,
        DpTable::PhiQ,
        DpTable::GapP,
        DpTable::GapQ,
        DpTable::Score,
    ];

    fn slot(self) -> usize {
        match self {
            DpTable::GapBoth => dp::GG,
            DpTable::GapPPhiQ => dp::GF,
            DpTable::PhiPGapQ => dp::FG,
            DpTable::PhiP => dp::FS,
            DpTable::PhiQ => dp::SF,
            DpTable::GapP => dp::GS,
            DpTable::GapQ => dp::SG,
            DpTable::Score => dp::S,
        }
    }
}

/// Discrete edge scores `1 / (c + |p_i - q_j|^2)`, identical in both directions.
pub(crate) struct DiscreteEdges<'a> {
    pub p: &'a Trajectory,
    pub q: &'a Trajectory,
    pub c: f64,
}

impl EdgeScores for DiscreteEdges<'_> {
    #[inline(always)]
    fn pair(&self, i: usize, j: usize) -> (f64, f64) {
        let d = 1.0 / (self.c + self.p[i - 1].dist_sq(&self.q[j - 1]));
        (d, d)
    }
}

/// Forward-pass output: backtracking provenance for every cell, the final
/// cell's values and, on request, every table value.
#[derive(Debug, Clone)]
pub struct DPTables {
    m: usize,
    n: usize,
    prov: Vec<u32>,
    last: Cell,
    values: Option<Vec<Cell>>,
}

impl DPTables {
    pub(crate) fn from_forward(m: usize, n: usize, fwd: Forward) -> Self {
        Self {
            m,
            n,
            prov: fwd.prov.unwrap_or_default(),
            last: fwd.last,
            values: fwd.values,
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    /// Optimal score of the full instance.
    pub fn score(&self) -> f64 {
        self.last[dp::S]
    }

    /// Value of `table` at `(i, j)` (prefix lengths); requires tables built with values retained.
    pub fn value(&self, table: DpTable, i: usize, j: usize) -> Option<f64> {
        let values = self.values.as_ref()?;
        if i > self.m || j > self.n {
            return None;
        }
        Some(values[i * (self.n + 1) + j][table.slot()])
    }

    pub(crate) fn provenance(&self) -> &[u32] {
        &self.prov
    }

    #[cfg(test)]
    pub(crate) fn provenance_mut(&mut self) -> &mut Vec<u32> {
        &mut self.prov
    }
}

fn check_inputs(p: &Trajectory, q: &Trajectory, params: &ScoringParams) -> Result<()> {
    p.require_non_empty()?;
    q.require_non_empty()?;
    params.validate()
}

/// Runs the forward pass with full provenance. With `keep_values` every
/// table value is retained as well (memory `8 * (m+1) * (n+1)` doubles).
pub fn global_tables(p: &Trajectory, q: &Trajectory, params: &ScoringParams, keep_values: bool) -> Result<DPTables> {
    check_inputs(p, q, params)?;
    let edges = DiscreteEdges { p, q, c: params.c };
    let terms = Terms::global(params.a, params.delta);
    let fwd = dp::forward(p.len(), q.len(), &edges, &terms, true, keep_values);
    Ok(DPTables::from_forward(p.len(), q.len(), fwd))
}

/// Recovers one optimal assignment from the forward-pass provenance.
pub fn backtrack(tables: &DPTables) -> Result<(Vec<Target>, Vec<Target>)> {
    let (m, n) = tables.dims();
    match dp::backtrace(m, n, tables.provenance(), (m, n))? {
        (alpha, beta, dp::Stop::Origin) => Ok((alpha, beta)),
        (_, _, dp::Stop::Reset(i, j)) => Err(TrajError::CorruptTables { i, j, reason: "reset in a global table" }),
    }
}

/// Maximum-score monotone assignment between `p` and `q`.
///
/// Any `tau` in `params` is ignored; see [`crate::local::local_align`].
pub fn global_align(p: &Trajectory, q: &Trajectory, params: &ScoringParams) -> Result<AssignmentResult> {
    let params = ScoringParams { tau: None, ..*params };
    let tables = global_tables(p, q, &params, false)?;
    let (alpha, beta) = backtrack(&tables)?;
    Ok(AssignmentResult::build(alpha, beta, tables.score(), params.c))
}

/// Optimal score only, keeping two rows of each table.
pub fn global_score_linear_space(p: &Trajectory, q: &Trajectory, params: &ScoringParams) -> Result<f64> {
    check_inputs(p, q, params)?;
    let edges = DiscreteEdges { p, q, c: params.c };
    let terms = Terms::global(params.a, params.delta);
    Ok(dp::forward(p.len(), q.len(), &edges, &terms, false, false).last[dp::S])
}
