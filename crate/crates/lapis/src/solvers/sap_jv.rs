//! Shortest augmenting path solver with column reduction preprocessing.
//!
//! The classic three-phase scheme: column reduction, reduction transfer and
//! two rounds of auction-like augmenting row reduction knock out most of the
//! matching cheaply; the remaining free rows are matched with a bucketed
//! Dijkstra over reduced costs. Rectangular instances are accepted
//! directly: the matrix is zero-padded internally and the duals are
//! normalized afterwards so every column that ends up unmatched carries a
//! zero dual.

use crate::model::WeightMatrix;
use crate::solvers::{OpStats, SolverResult};
use crate::{Assignment, DualSolution, Error, Result};

const UNSET: usize = usize::MAX;
const BIG: i64 = i64::MAX / 4;

pub fn solve_sap_jv(w: &WeightMatrix) -> Result<SolverResult> {
    if w.sense() != crate::model::Sense::Minimize {
        return Err(Error::BadParameter(
            "the sap-jv solver minimizes; negate the weights first".into(),
        ));
    }
    if w.rows() > w.cols() {
        // Solve the transpose and mirror pairs and duals back.
        let mut t = Vec::with_capacity(w.rows() * w.cols());
        for j in 0..w.cols() {
            for i in 0..w.rows() {
                t.push(w.at(i, j));
            }
        }
        let tm = WeightMatrix::new(w.cols(), w.rows(), w.sense(), t)?;
        let res = solve_sap_jv(&tm)?;
        let pairs = res.assignment.pairs.iter().map(|&(i, j)| (j, i)).collect();
        return Ok(SolverResult {
            assignment: Assignment::from_pairs(w, pairs)?,
            dual: DualSolution {
                u: res.dual.v,
                v: res.dual.u,
            },
            stats: res.stats,
        });
    }

    let (square, pad) = w.balance();
    let (rowsol, mut v, mut stats) = core(&square)?;
    let side = square.rows();
    let mut u: Vec<i64> = (0..side)
        .map(|i| square.at(i, rowsol[i]) - v[rowsol[i]])
        .collect();
    stats.iterations = stats.iterations.max(1);

    if pad.is_padded() {
        // Every dummy row is matched at cost zero, which pins the duals of
        // its column at the overall maximum; shifting all column duals by
        // that maximum zeroes the unmatched columns while keeping
        // feasibility, tightness and the dual sum intact.
        let shift = *v.iter().max().expect("nonempty duals");
        for vj in v.iter_mut() {
            *vj -= shift;
        }
        for ui in u.iter_mut() {
            *ui += shift;
        }
    }

    let pairs: Vec<(usize, usize)> = rowsol
        .iter()
        .copied()
        .enumerate()
        .filter(|&(i, j)| i < w.rows() && j < w.cols())
        .collect();
    let assignment = Assignment::from_pairs(w, pairs)?;
    u.truncate(w.rows());
    v.truncate(w.cols());
    let dual = DualSolution { u, v };
    debug_assert!(dual.is_feasible(w));
    debug_assert!(dual.tight_on(w, &assignment));
    debug_assert_eq!(dual.sum(), assignment.cost);
    Ok(SolverResult {
        assignment,
        dual,
        stats,
    })
}

/// Square solve returning the row-to-column map and column duals.
fn core(w: &WeightMatrix) -> Result<(Vec<usize>, Vec<i64>, OpStats)> {
    let n = w.rows();
    let mut stats = OpStats::default();
    let mut rowsol = vec![UNSET; n];
    let mut colsol = vec![UNSET; n];
    let mut v = vec![0i64; n];
    let mut matches = vec![0u32; n];

    // Column reduction: each column dual takes the column minimum and rows
    // that are the unique minimum of some column get assigned.
    for j in (0..n).rev() {
        let mut min = w.at(0, j);
        let mut imin = 0usize;
        for i in 1..n {
            stats.comparisons += 1;
            if w.at(i, j) < min {
                min = w.at(i, j);
                imin = i;
            }
        }
        stats.min_finds += 1;
        v[j] = min;
        matches[imin] += 1;
        if matches[imin] == 1 {
            rowsol[imin] = j;
            colsol[j] = imin;
        } else {
            colsol[j] = UNSET;
        }
    }

    // Reduction transfer: uniquely assigned rows push slack onto their
    // column dual.
    let mut free: Vec<usize> = Vec::with_capacity(n);
    for i in 0..n {
        if matches[i] == 0 {
            free.push(i);
        } else if matches[i] == 1 && n > 1 {
            let j1 = rowsol[i];
            let mut min = BIG;
            for j in 0..n {
                if j == j1 {
                    continue;
                }
                stats.comparisons += 1;
                min = min.min(w.at(i, j) - v[j]);
            }
            stats.min_finds += 1;
            v[j1] -= min;
        }
    }

    // Augmenting row reduction, two passes: free rows bid on their best
    // column, displacing the current owner when the two best reduced costs
    // differ.
    for _ in 0..2 {
        let mut k = 0usize;
        let prev_free = std::mem::take(&mut free);
        let mut guard = 0u64;
        let limit = 1000 + 100 * (n as u64) * (n as u64);
        let mut pending = prev_free;
        while k < pending.len() {
            guard += 1;
            if guard > limit {
                return Err(Error::TooLarge(
                    "augmenting row reduction failed to make progress".into(),
                ));
            }
            let i = pending[k];
            k += 1;
            stats.steps += 1;
            let mut umin = w.at(i, 0) - v[0];
            let mut j1 = 0usize;
            let mut usubmin = BIG;
            let mut j2 = UNSET;
            for j in 1..n {
                let h = w.at(i, j) - v[j];
                stats.comparisons += 1;
                if h < usubmin {
                    if h >= umin {
                        usubmin = h;
                        j2 = j;
                    } else {
                        usubmin = umin;
                        umin = h;
                        j2 = j1;
                        j1 = j;
                    }
                }
            }
            stats.min_finds += 2;
            let mut i0 = colsol[j1];
            if umin < usubmin {
                v[j1] -= usubmin - umin;
            } else if i0 != UNSET {
                j1 = j2;
                i0 = colsol[j1];
            }
            rowsol[i] = j1;
            colsol[j1] = i;
            stats.iterations += 1;
            if i0 != UNSET {
                rowsol[i0] = UNSET;
                if umin < usubmin {
                    // Retry the displaced row immediately.
                    k -= 1;
                    pending[k] = i0;
                } else {
                    free.push(i0);
                }
            }
        }
    }

    // Augmentation: shortest alternating path per remaining free row, with
    // columns bucketed by tentative distance.
    let mut d = vec![0i64; n];
    let mut pred = vec![0usize; n];
    let mut collist: Vec<usize> = (0..n).collect();
    for f in 0..free.len() {
        let freerow = free[f];
        stats.iterations += 1;
        for j in 0..n {
            d[j] = w.at(freerow, j) - v[j];
            pred[j] = freerow;
            collist[j] = j;
        }
        let mut low = 0usize;
        let mut up = 0usize;
        let mut last: isize = -1;
        let mut min_d = 0i64;
        let mut endofpath = 0usize;
        let mut found = false;
        while !found {
            stats.steps += 1;
            if up == low {
                last = low as isize - 1;
                min_d = d[collist[up]];
                up += 1;
                stats.min_finds += 1;
                for k in up..n {
                    let j = collist[k];
                    let h = d[j];
                    stats.comparisons += 1;
                    if h <= min_d {
                        if h < min_d {
                            up = low;
                            min_d = h;
                        }
                        collist[k] = collist[up];
                        collist[up] = j;
                        up += 1;
                    }
                }
                for k in low..up {
                    if colsol[collist[k]] == UNSET {
                        endofpath = collist[k];
                        found = true;
                        break;
                    }
                }
            }
            if !found {
                let j1 = collist[low];
                low += 1;
                let i = colsol[j1];
                let h = w.at(i, j1) - v[j1] - min_d;
                for k in up..n {
                    let j = collist[k];
                    let v2 = w.at(i, j) - v[j] - h;
                    stats.comparisons += 1;
                    if v2 < d[j] {
                        pred[j] = i;
                        if v2 == min_d {
                            if colsol[j] == UNSET {
                                endofpath = j;
                                found = true;
                                break;
                            }
                            collist[k] = collist[up];
                            collist[up] = j;
                            up += 1;
                        }
                        d[j] = v2;
                    }
                }
            }
        }
        for k in 0..=last {
            let j1 = collist[k as usize];
            v[j1] += d[j1] - min_d;
        }
        let mut j = endofpath;
        loop {
            let i = pred[j];
            colsol[j] = i;
            let next = rowsol[i];
            rowsol[i] = j;
            if i == freerow {
                break;
            }
            j = next;
        }
    }

    Ok((rowsol, v, stats))
}
