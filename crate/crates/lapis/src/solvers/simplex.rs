//! Exact integer simplex on the inequality-form assignment LP.
//!
//! The minimization instance is rewritten as a maximization over
//! nonnegative benefits, relaxed to `Ax <= 1, x >= 0`, and solved with a
//! fraction-free tableau: entries stay det-scaled integers and every pivot
//! division is exact, so no floating point or rational arithmetic is
//! involved. Because the constraint matrix is totally unimodular every
//! basis determinant is one, the scale factor never grows and basic
//! solutions are 0/1 vectors. Bland's rule keeps the pivot sequence finite
//! despite the heavy degeneracy of assignment polytopes.

use crate::model::{LpInstance, Sense, WeightMatrix};
use crate::solvers::{require_square_min, OpStats, SolverResult};
use crate::{Assignment, DualSolution, Error, Result};

/// Raw LP optimum: variable values, constraint duals and the pivot count.
#[derive(Debug, Clone)]
pub struct LpSolution {
    pub objective: i64,
    pub x: Vec<i64>,
    pub duals: Vec<i64>,
    pub pivots: u64,
}

/// Solves the inequality-form LP and reads the result as an assignment of
/// the benefit (maximize) instance: pairs from the `x = 1` cells, cost
/// equal to the LP optimum, duals from the slack columns of the final
/// tableau.
pub fn solve_simplex(lp: &LpInstance) -> Result<SolverResult> {
    let n = lp.side;
    let (sol, stats) = solve_lp_max(lp)?;

    let mut row_used = vec![false; n];
    let mut col_used = vec![false; n];
    let mut pairs = Vec::with_capacity(n);
    for i in 0..n {
        for j in 0..n {
            if sol.x[lp.var(i, j)] == 1 {
                pairs.push((i, j));
                row_used[i] = true;
                col_used[j] = true;
            }
        }
    }
    // The LP can leave zero-objective cells unmatched; complementary
    // slackness zeroes the duals of the rows and columns involved, so any
    // completion along them is tight. Lowest indices first.
    let free_cols: Vec<usize> = (0..n).filter(|&j| !col_used[j]).collect();
    let mut next_free = free_cols.into_iter();
    for i in 0..n {
        if !row_used[i] {
            let j = next_free
                .next()
                .expect("equal numbers of free rows and columns");
            pairs.push((i, j));
        }
    }
    pairs.sort_unstable();
    let assignment = Assignment {
        pairs,
        cost: sol.objective,
    };
    let dual = DualSolution {
        u: sol.duals[..n].to_vec(),
        v: sol.duals[n..].to_vec(),
    };
    Ok(SolverResult {
        assignment,
        dual,
        stats,
    })
}

/// Full pipeline for a minimization instance: rewrite as nonnegative
/// benefits, relax, solve, and map cost and duals back.
pub fn solve_simplex_min(w: &WeightMatrix) -> Result<SolverResult> {
    let n = require_square_min(w, "the simplex solver")?;
    let mf = w.to_max_form()?;
    let lp = mf.matrix.to_lp()?;
    let res = solve_simplex(&lp)?;
    let assignment = Assignment::from_pairs(w, res.assignment.pairs)?;
    if assignment.cost != mf.cost_from_benefit(res.assignment.cost, n) {
        return Err(Error::Internal(
            "assignment cost disagrees with the LP optimum".into(),
        ));
    }
    let dual = mf.duals_from_lp(&res.dual.u, &res.dual.v);
    debug_assert!(dual.is_feasible(w));
    debug_assert!(dual.tight_on(w, &assignment));
    Ok(SolverResult {
        assignment,
        dual,
        stats: res.stats,
    })
}

/// Solves `max c.x  s.t.  Ax <= b, x >= 0` exactly. Requires `b >= 0`.
pub fn solve_lp_max(lp: &LpInstance) -> Result<(LpSolution, OpStats)> {
    if lp.sense != Sense::Maximize {
        return Err(Error::BadParameter(
            "the tableau solver expects a maximization LP".into(),
        ));
    }
    if lp.b.iter().any(|&b| b < 0) {
        return Err(Error::BadParameter(
            "the initial slack basis needs nonnegative right-hand sides".into(),
        ));
    }
    let m = lp.n_constraints();
    let nv = lp.n_vars();
    let nt = nv + m;
    let rhs = nt;
    let mut stats = OpStats::default();

    // Rows 0..m are constraints, row m carries reduced costs `z - c`.
    let mut t = vec![vec![0i64; nt + 1]; m + 1];
    for i in 0..m {
        t[i][..nv].copy_from_slice(&lp.a[i]);
        t[i][nv + i] = 1;
        t[i][rhs] = lp.b[i];
    }
    for j in 0..nv {
        t[m][j] = -lp.objective[j];
    }
    let mut basis: Vec<usize> = (nv..nt).collect();
    let mut denom = 1i64;
    let mut pivots = 0u64;
    let pivot_cap = 1_000_000u64;

    loop {
        // Bland: entering variable is the lowest index with negative
        // reduced cost.
        stats.min_finds += 1;
        let mut enter = None;
        for j in 0..nt {
            stats.comparisons += 1;
            if t[m][j] < 0 {
                enter = Some(j);
                break;
            }
        }
        let Some(c) = enter else { break };

        // Exact ratio test by cross-multiplication; ties go to the lowest
        // basic variable index.
        let mut leave: Option<usize> = None;
        for r in 0..m {
            if t[r][c] <= 0 {
                continue;
            }
            let better = match leave {
                None => true,
                Some(cur) => {
                    stats.comparisons += 1;
                    let lhs = mul(t[r][rhs], t[cur][c])?;
                    let rhs_v = mul(t[cur][rhs], t[r][c])?;
                    lhs < rhs_v || (lhs == rhs_v && basis[r] < basis[cur])
                }
            };
            if better {
                leave = Some(r);
            }
        }
        let Some(r) = leave else {
            return Err(Error::Internal(
                "LP is unbounded, which cannot happen on an assignment polytope".into(),
            ));
        };

        let p = t[r][c];
        for i in 0..=m {
            if i == r {
                continue;
            }
            let factor = t[i][c];
            for j in 0..=nt {
                let num = mul(t[i][j], p)?
                    .checked_sub(mul(factor, t[r][j])?)
                    .ok_or_else(overflow)?;
                t[i][j] = div_exact(num, denom)?;
            }
        }
        denom = p;
        basis[r] = c;
        pivots += 1;
        stats.iterations = pivots;
        stats.steps = pivots;
        if pivots > pivot_cap {
            return Err(Error::Internal(format!(
                "simplex exceeded {pivot_cap} pivots"
            )));
        }
    }

    let mut x = vec![0i64; nv];
    for r in 0..m {
        if basis[r] < nv {
            x[basis[r]] = div_exact(t[r][rhs], denom)?;
        }
    }
    let mut duals = Vec::with_capacity(m);
    for i in 0..m {
        duals.push(div_exact(t[m][nv + i], denom)?);
    }
    let objective = div_exact(t[m][rhs], denom)?;
    Ok((
        LpSolution {
            objective,
            x,
            duals,
            pivots,
        },
        stats,
    ))
}

fn overflow() -> Error {
    Error::TooLarge("tableau arithmetic overflows 64 bits".into())
}

fn mul(a: i64, b: i64) -> Result<i64> {
    a.checked_mul(b).ok_or_else(overflow)
}

fn div_exact(num: i64, den: i64) -> Result<i64> {
    if den == 0 || num % den != 0 {
        return Err(Error::Internal(format!(
            "inexact tableau division {num}/{den}"
        )));
    }
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::brute_force;

    #[test]
    fn matches_oracle_and_certifies() {
        let w = WeightMatrix::from_rows(
            &[vec![4, 1, 3], vec![2, 0, 5], vec![3, 2, 2]],
            Sense::Minimize,
        )
        .unwrap();
        let res = solve_simplex_min(&w).unwrap();
        assert_eq!(res.assignment.cost, brute_force(&w).unwrap().cost);
        assert_eq!(res.dual.sum(), res.assignment.cost);
        assert!(res.dual.is_feasible(&w));
        assert!(res.dual.tight_on(&w, &res.assignment));
    }

    #[test]
    fn benefit_side_objective() {
        // Max form of [[1,2],[2,4]] has M = 4; the LP optimum is the total
        // benefit 2*4 - 4 = 4 on the off-diagonal matching.
        let w = WeightMatrix::from_rows(&[vec![1, 2], vec![2, 4]], Sense::Minimize).unwrap();
        let mf = w.to_max_form().unwrap();
        let res = solve_simplex(&mf.matrix.to_lp().unwrap()).unwrap();
        assert_eq!(res.assignment.cost, 4);
        assert_eq!(res.assignment.pairs, vec![(0, 1), (1, 0)]);
        assert_eq!(mf.cost_from_benefit(res.assignment.cost, 2), 4);
    }

    #[test]
    fn lp_relaxation_is_integral() {
        let w = WeightMatrix::from_rows(
            &[vec![7, 2, 9, 4], vec![4, 4, 4, 1], vec![1, 0, 3, 3], vec![5, 6, 2, 8]],
            Sense::Minimize,
        )
        .unwrap();
        let lp = w.to_max_form().unwrap().matrix.to_lp().unwrap();
        let (sol, _) = solve_lp_max(&lp).unwrap();
        assert!(sol.x.iter().all(|&x| x == 0 || x == 1));
        assert!(sol.duals.iter().all(|&y| y >= 0));
    }

    #[test]
    fn ties_at_zero_benefit_get_completed() {
        // Constant matrix: every benefit is zero, the LP may match nothing.
        let w = WeightMatrix::from_rows(&[vec![5, 5], vec![5, 5]], Sense::Minimize).unwrap();
        let res = solve_simplex_min(&w).unwrap();
        assert_eq!(res.assignment.pairs.len(), 2);
        assert_eq!(res.assignment.cost, 10);
        assert_eq!(res.dual.sum(), 10);
    }
}
