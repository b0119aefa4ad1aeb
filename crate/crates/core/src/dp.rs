//! The eight-table dynamic program shared by the global, local and
//! semi-continuous assignment variants.
//!
//! For prefixes `P_i`, `Q_j` every table holds the best score of a monotone
//! assignment under a restriction on the last points `p_i` and `q_j`:
//!
//! | table | restriction |
//! |-------|-------------|
//! | `S`   | none |
//! | `GS`  | `p_i` is a scored gap point |
//! | `SG`  | `q_j` is a scored gap point |
//! | `GG`  | both are scored gap points |
//! | `FS`  | `p_i` has no outgoing edge and is not scored (its edge is added by the caller) |
//! | `SF`  | same for `q_j` |
//! | `GF`  | `p_i` scored gap, `q_j` unscored without outgoing edge |
//! | `FG`  | `p_i` unscored without outgoing edge, `q_j` scored gap |
//!
//! Unsatisfiable states hold `-inf`. Within a cell the tables are evaluated
//! in the order `GG, GF, FG, FS, SF, GS, SG, S`; the first maximal argument
//! wins, which fixes backtracking.

use crate::error::{Result, TrajError};
use crate::scoring::Target;

pub(crate) const GG: usize = 0;
pub(crate) const GF: usize = 1;
pub(crate) const FG: usize = 2;
pub(crate) const FS: usize = 3;
pub(crate) const SF: usize = 4;
pub(crate) const GS: usize = 5;
pub(crate) const SG: usize = 6;
pub(crate) const S: usize = 7;

pub(crate) type Cell = [f64; 8];

const NEG: f64 = f64::NEG_INFINITY;
const NEG_CELL: Cell = [NEG; 8];
const NO_ARG: u32 = 0xF;
/// Provenance of the zero floor in the local `S` table.
pub(crate) const RESET_ARG: u32 = 4;

/// Scores of the two directed edges available at a cell (1-based indices).
pub(crate) trait EdgeScores {
    /// `(score of p_i -> q_j, score of q_j -> p_i)`.
    fn pair(&self, i: usize, j: usize) -> (f64, f64);
}

/// Per-term scores after the local shift has been applied.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Terms {
    pub open: f64,
    pub ext: f64,
    pub tau: f64,
    pub floor: bool,
}

impl Terms {
    pub fn global(a: f64, delta: f64) -> Self {
        Self { open: a + delta, ext: delta, tau: 0.0, floor: false }
    }

    pub fn local(a: f64, delta: f64, tau: f64) -> Self {
        let ext = delta - tau;
        Self { open: a + ext, ext, tau, floor: true }
    }
}

#[inline(always)]
fn argmax<const N: usize>(args: [f64; N]) -> (f64, u32) {
    let mut best = NEG;
    let mut idx = NO_ARG;
    for (k, v) in args.into_iter().enumerate() {
        if v > best {
            best = v;
            idx = k as u32;
        }
    }
    (best, idx)
}

/// Evaluates one cell from the cell above (`i - 1, j`) and to the left (`i, j - 1`).
#[inline(always)]
pub(crate) fn cell<E: EdgeScores>(i: usize, j: usize, up: &Cell, left: &Cell, edges: &E, t: &Terms) -> (Cell, u32) {
    let mut v = NEG_CELL;
    let mut prov = 0u32;
    let mut set = |v: &mut Cell, table: usize, (val, arg): (f64, u32)| {
        v[table] = val;
        prov |= arg << (4 * table);
    };

    if i == 0 && j == 0 {
        for table in 0..S {
            set(&mut v, table, (NEG, NO_ARG));
        }
        set(&mut v, S, (0.0, NO_ARG));
        return (v, prov);
    }

    let has_p = i > 0;
    let has_q = j > 0;
    let (dp, dq) = if has_p && has_q {
        let (sp, sq) = edges.pair(i, j);
        (sp - t.tau, sq - t.tau)
    } else {
        (NEG, NEG)
    };
    let (open, ext) = (t.open, t.ext);

    let gg = if has_p && has_q {
        argmax([up[SG] + open, up[GG] + ext, left[GS] + open, left[GG] + ext])
    } else {
        (NEG, NO_ARG)
    };
    set(&mut v, GG, gg);

    let gf = if has_p && has_q {
        argmax([up[SF] + open, up[GF] + ext, left[GS]])
    } else {
        (NEG, NO_ARG)
    };
    set(&mut v, GF, gf);

    let fg = if has_p && has_q {
        argmax([left[FS] + open, left[FG] + ext, up[SG]])
    } else {
        (NEG, NO_ARG)
    };
    set(&mut v, FG, fg);

    let fs = if has_p {
        argmax([v[FG], up[SF] + dq, left[FS] + dq, up[S]])
    } else {
        (NEG, NO_ARG)
    };
    set(&mut v, FS, fs);

    let sf = if has_q {
        argmax([v[GF], left[FS] + dp, up[SF] + dp, left[S]])
    } else {
        (NEG, NO_ARG)
    };
    set(&mut v, SF, sf);

    let gs = if has_p {
        argmax([up[S] + open, up[GS] + ext, v[GF] + dq, v[GG]])
    } else {
        (NEG, NO_ARG)
    };
    set(&mut v, GS, gs);

    let sg = if has_q {
        argmax([left[S] + open, left[SG] + ext, v[FG] + dp, v[GG]])
    } else {
        (NEG, NO_ARG)
    };
    set(&mut v, SG, sg);

    let s = if t.floor {
        argmax([v[GS], v[SG], v[FS] + dp, v[SF] + dq, 0.0])
    } else {
        argmax([v[GS], v[SG], v[FS] + dp, v[SF] + dq])
    };
    set(&mut v, S, s);

    (v, prov)
}

/// Result of a forward pass.
#[derive(Debug, Clone)]
pub(crate) struct Forward {
    /// Table values at `(m, n)`.
    pub last: Cell,
    /// Largest `S` value over all cells and its cell; ties keep the smallest `(i, j)`.
    pub best: (f64, usize, usize),
    pub prov: Option<Vec<u32>>,
    pub values: Option<Vec<Cell>>,
}

/// Row-by-row forward pass keeping two rows of values.
///
/// Provenance (4 bits per table, one `u32` per cell) and full value tables
/// are retained only on request.
pub(crate) fn forward<E: EdgeScores>(
    m: usize,
    n: usize,
    edges: &E,
    terms: &Terms,
    keep_prov: bool,
    keep_values: bool,
) -> Forward {
    let width = n + 1;
    let mut prov = keep_prov.then(|| vec![0u32; (m + 1) * width]);
    let mut values = keep_values.then(|| Vec::with_capacity((m + 1) * width));
    let mut prev = vec![NEG_CELL; width];
    let mut cur = vec![NEG_CELL; width];
    let mut best = (0.0, 0, 0);

    for i in 0..=m {
        for j in 0..=n {
            let up = if i == 0 { &NEG_CELL } else { &prev[j] };
            let left = if j == 0 { NEG_CELL } else { cur[j - 1] };
            let (vals, pv) = cell(i, j, up, &left, edges, terms);
            cur[j] = vals;
            if let Some(p) = prov.as_mut() {
                p[i * width + j] = pv;
            }
            if vals[S] > best.0 {
                best = (vals[S], i, j);
            }
        }
        if let Some(vs) = values.as_mut() {
            vs.extend_from_slice(&cur);
        }
        std::mem::swap(&mut prev, &mut cur);
    }

    Forward { last: prev[n], best, prov, values }
}

/// Where a backtrace ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Stop {
    Origin,
    /// The local zero floor won at this cell.
    Reset(usize, usize),
}

/// Follows provenance from `S(i, j)` and returns the assignment maps.
pub(crate) fn backtrace(
    m: usize,
    n: usize,
    prov: &[u32],
    from: (usize, usize),
) -> Result<(Vec<Target>, Vec<Target>, Stop)> {
    let width = n + 1;
    if prov.len() != (m + 1) * width {
        return Err(TrajError::CorruptTables { i: m, j: n, reason: "provenance has the wrong size" });
    }
    let mut alpha: Vec<Target> = vec![None; m];
    let mut beta: Vec<Target> = vec![None; n];
    let (mut table, mut i, mut j) = (S, from.0, from.1);

    loop {
        if table == S && i == 0 && j == 0 {
            return Ok((alpha, beta, Stop::Origin));
        }
        let arg = (prov[i * width + j] >> (4 * table)) & 0xF;
        let corrupt = |reason| TrajError::CorruptTables { i, j, reason };
        if arg == NO_ARG {
            return Err(corrupt("no provenance for a reachable state"));
        }
        let step_up = |i: usize| i.checked_sub(1).ok_or(TrajError::CorruptTables { i, j, reason: "row underflow" });
        let step_left = |j: usize| j.checked_sub(1).ok_or(TrajError::CorruptTables { i, j, reason: "column underflow" });
        let (ci, cj) = (i, j);
        let mut p_to_q = false;
        let mut q_to_p = false;

        (table, i, j) = match (table, arg) {
            (GG, 0) => (SG, step_up(i)?, j),
            (GG, 1) => (GG, step_up(i)?, j),
            (GG, 2) => (GS, i, step_left(j)?),
            (GG, 3) => (GG, i, step_left(j)?),

            (GF, 0) => (SF, step_up(i)?, j),
            (GF, 1) => (GF, step_up(i)?, j),
            (GF, 2) => (GS, i, step_left(j)?),

            (FG, 0) => (FS, i, step_left(j)?),
            (FG, 1) => (FG, i, step_left(j)?),
            (FG, 2) => (SG, step_up(i)?, j),

            (FS, 0) => (FG, i, j),
            (FS, 1) => {
                q_to_p = true;
                (SF, step_up(i)?, j)
            }
            (FS, 2) => {
                q_to_p = true;
                (FS, i, step_left(j)?)
            }
            (FS, 3) => (S, step_up(i)?, j),

            (SF, 0) => (GF, i, j),
            (SF, 1) => {
                p_to_q = true;
                (FS, i, step_left(j)?)
            }
            (SF, 2) => {
                p_to_q = true;
                (SF, step_up(i)?, j)
            }
            (SF, 3) => (S, i, step_left(j)?),

            (GS, 0) => (S, step_up(i)?, j),
            (GS, 1) => (GS, step_up(i)?, j),
            (GS, 2) => {
                q_to_p = true;
                (GF, i, j)
            }
            (GS, 3) => (GG, i, j),

            (SG, 0) => (S, i, step_left(j)?),
            (SG, 1) => (SG, i, step_left(j)?),
            (SG, 2) => {
                p_to_q = true;
                (FG, i, j)
            }
            (SG, 3) => (GG, i, j),

            (S, 0) => (GS, i, j),
            (S, 1) => (SG, i, j),
            (S, 2) => {
                p_to_q = true;
                (FS, i, j)
            }
            (S, 3) => {
                q_to_p = true;
                (SF, i, j)
            }
            (S, RESET_ARG) => return Ok((alpha, beta, Stop::Reset(i, j))),
            _ => return Err(corrupt("unknown provenance code")),
        };

        // Every edge term is the edge between p_ci and q_cj of the cell just left.
        if p_to_q {
            alpha[ci - 1] = Some(cj - 1);
        }
        if q_to_p {
            beta[cj - 1] = Some(ci - 1);
        }
    }
}
