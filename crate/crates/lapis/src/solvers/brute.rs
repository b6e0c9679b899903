//! Exhaustive oracle for small instances.

use crate::model::{Sense, WeightMatrix};
use crate::{Assignment, Error, Result};

/// Largest matched side the oracle will enumerate.
pub const MAX_ORACLE_SIDE: usize = 10;

/// Enumerates every maximum matching and returns an optimal one.
///
/// Rectangular instances are matched along the smaller side. Ties are
/// broken deterministically: the result is the lexicographically smallest
/// optimal pair list (in the row-major orientation of the enumeration).
/// Intended as a test oracle, so the matched side is capped at
/// [`MAX_ORACLE_SIDE`].
pub fn brute_force(w: &WeightMatrix) -> Result<Assignment> {
    if w.rows() > w.cols() {
        let t = transpose(w)?;
        let a = brute_force(&t)?;
        let pairs = a.pairs.iter().map(|&(i, j)| (j, i)).collect();
        return Assignment::from_pairs(w, pairs);
    }
    let (rows, cols) = (w.rows(), w.cols());
    if rows > MAX_ORACLE_SIDE {
        return Err(Error::TooLarge(format!(
            "oracle enumerates at most {MAX_ORACLE_SIDE} matched rows, got {rows}"
        )));
    }

    let mut best: Option<Vec<usize>> = None;
    let mut best_cost = 0i64;
    let mut chosen = vec![0usize; rows];
    let mut used = vec![false; cols];
    // Depth-first over rows, columns tried in increasing order, so complete
    // matchings appear in lexicographic order and only strictly better costs
    // replace the incumbent.
    let mut stack_cost = vec![0i64; rows + 1];
    let mut row = 0usize;
    let mut next_col = vec![0usize; rows];
    loop {
        if row == rows {
            let cost = stack_cost[rows];
            let better = match (&best, w.sense()) {
                (None, _) => true,
                (Some(_), Sense::Minimize) => cost < best_cost,
                (Some(_), Sense::Maximize) => cost > best_cost,
            };
            if better {
                best = Some(chosen.clone());
                best_cost = cost;
            }
            row -= 1;
            used[chosen[row]] = false;
            continue;
        }
        let mut advanced = false;
        while next_col[row] < cols {
            let j = next_col[row];
            next_col[row] += 1;
            if used[j] {
                continue;
            }
            chosen[row] = j;
            used[j] = true;
            stack_cost[row + 1] = stack_cost[row] + w.at(row, j);
            row += 1;
            if row < rows {
                next_col[row] = 0;
            }
            advanced = true;
            break;
        }
        if advanced {
            continue;
        }
        next_col[row] = 0;
        if row == 0 {
            break;
        }
        row -= 1;
        used[chosen[row]] = false;
    }

    let sigma = best.expect("at least one matching exists");
    let pairs: Vec<(usize, usize)> = sigma.iter().copied().enumerate().collect();
    Assignment::from_pairs(w, pairs)
}

fn transpose(w: &WeightMatrix) -> Result<WeightMatrix> {
    let mut t = Vec::with_capacity(w.rows() * w.cols());
    for j in 0..w.cols() {
        for i in 0..w.rows() {
            t.push(w.at(i, j));
        }
    }
    WeightMatrix::new(w.cols(), w.rows(), w.sense(), t)
}
