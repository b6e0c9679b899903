//! Shortest augmenting path solver with Dijkstra and dual potentials.
//!
//! Starts from row and column reductions, matches greedily along tight
//! edges, then augments one free row at a time along a shortest path in the
//! reduced-cost graph, updating the potentials so reduced costs stay
//! nonnegative. Runs in O(n^3) with a dense Dijkstra.

use crate::model::WeightMatrix;
use crate::solvers::{require_square_min, OpStats, SolverResult};
use crate::{Assignment, DualSolution, Result};

pub fn solve_sap_acm(w: &WeightMatrix) -> Result<SolverResult> {
    let n = require_square_min(w, "the sap-acm solver")?;
    let mut stats = OpStats::default();

    // Dual-feasible start: u takes row minima, v the residual column minima.
    let mut u = vec![0i64; n];
    let mut v = vec![0i64; n];
    for i in 0..n {
        let mut m = w.at(i, 0);
        for j in 1..n {
            stats.comparisons += 1;
            m = m.min(w.at(i, j));
        }
        stats.min_finds += 1;
        u[i] = m;
    }
    for j in 0..n {
        let mut m = w.at(0, j) - u[0];
        for i in 1..n {
            stats.comparisons += 1;
            m = m.min(w.at(i, j) - u[i]);
        }
        stats.min_finds += 1;
        v[j] = m;
    }

    // Greedy matching along tight edges.
    let mut row_mate = vec![usize::MAX; n];
    let mut col_mate = vec![usize::MAX; n];
    let mut mated = 0usize;
    for i in 0..n {
        for j in 0..n {
            if col_mate[j] != usize::MAX {
                continue;
            }
            stats.zero_tests += 1;
            if w.at(i, j) - u[i] - v[j] == 0 {
                row_mate[i] = j;
                col_mate[j] = i;
                mated += 1;
                break;
            }
        }
    }

    let mut dist = vec![0i64; n];
    let mut dad = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    while mated < n {
        stats.iterations += 1;
        let s = (0..n)
            .find(|&i| row_mate[i] == usize::MAX)
            .expect("a free row exists while mated < n");
        for k in 0..n {
            dist[k] = w.at(s, k) - u[s] - v[k];
            dad[k] = usize::MAX;
            seen[k] = false;
        }

        let mut j;
        loop {
            stats.steps += 1;
            // Closest unseen column.
            j = usize::MAX;
            for k in 0..n {
                if seen[k] {
                    continue;
                }
                if j == usize::MAX {
                    j = k;
                } else {
                    stats.comparisons += 1;
                    if dist[k] < dist[j] {
                        j = k;
                    }
                }
            }
            stats.min_finds += 1;
            seen[j] = true;
            if col_mate[j] == usize::MAX {
                break;
            }
            let i = col_mate[j];
            for k in 0..n {
                if seen[k] {
                    continue;
                }
                let new_dist = dist[j] + w.at(i, k) - u[i] - v[k];
                stats.comparisons += 1;
                if new_dist < dist[k] {
                    dist[k] = new_dist;
                    dad[k] = j;
                }
            }
        }

        // Shift potentials so every visited edge stays tight or nonnegative.
        for k in 0..n {
            if k == j || !seen[k] {
                continue;
            }
            let i = col_mate[k];
            v[k] += dist[k] - dist[j];
            u[i] -= dist[k] - dist[j];
        }
        u[s] += dist[j];

        // Augment along parent pointers.
        while dad[j] != usize::MAX {
            let d = dad[j];
            col_mate[j] = col_mate[d];
            row_mate[col_mate[j]] = j;
            j = d;
        }
        col_mate[j] = s;
        row_mate[s] = j;
        mated += 1;
    }

    let pairs: Vec<(usize, usize)> = row_mate.iter().copied().enumerate().collect();
    let assignment = Assignment::from_pairs(w, pairs)?;
    let dual = DualSolution { u, v };
    debug_assert!(dual.is_feasible(w));
    debug_assert!(dual.tight_on(w, &assignment));
    Ok(SolverResult {
        assignment,
        dual,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Sense;
    use crate::solvers::brute_force;

    #[test]
    fn matches_oracle_and_certifies() {
        let w = WeightMatrix::from_rows(
            &[
                vec![7, 5, 11, 8],
                vec![5, 4, 1, 9],
                vec![9, 3, 2, 8],
                vec![1, 2, 3, 4],
            ],
            Sense::Minimize,
        )
        .unwrap();
        let res = solve_sap_acm(&w).unwrap();
        assert_eq!(res.assignment.cost, brute_force(&w).unwrap().cost);
        assert_eq!(res.dual.sum(), res.assignment.cost);
        assert!(res.dual.is_feasible(&w));
        assert!(res.dual.tight_on(&w, &res.assignment));
    }

    #[test]
    fn handles_negative_weights() {
        let w =
            WeightMatrix::from_rows(&[vec![-3, 0], vec![0, -7]], Sense::Minimize).unwrap();
        let res = solve_sap_acm(&w).unwrap();
        assert_eq!(res.assignment.cost, -10);
    }
}
