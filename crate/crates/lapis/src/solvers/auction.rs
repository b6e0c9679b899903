//! Epsilon-scaling forward auction.
//!
//! Minimization is rewritten as a maximization over benefits scaled by
//! `n + 1`, so an assignment that is within `n` of optimal in scaled units
//! is exactly optimal. Epsilon starts at `(n + 1)` times the largest weight
//! magnitude and shrinks by `alpha` per phase, ending with a phase at one;
//! prices persist across phases, the assignment is rebuilt. Afterwards
//! exact integral duals are recovered from the prices by relaxing the
//! tight-edge difference constraints to a fixpoint.

use std::collections::VecDeque;

use crate::model::WeightMatrix;
use crate::solvers::{require_square_min, OpStats, SolverResult};
use crate::{Assignment, DualSolution, Error, Result};

pub const DEFAULT_ALPHA: f64 = 4.0;

const UNSET: usize = usize::MAX;

/// Starting epsilon in pre-scaling units: the largest weight magnitude,
/// at least one. The solver multiplies it by `n + 1` like the weights.
pub fn initial_epsilon(w: &WeightMatrix) -> i64 {
    w.max_abs().max(1)
}

pub fn solve_auction(w: &WeightMatrix, alpha: f64) -> Result<SolverResult> {
    let n = require_square_min(w, "the auction solver")?;
    if !(alpha > 1.0) || !alpha.is_finite() {
        return Err(Error::BadParameter(format!(
            "auction scaling factor must be a finite number greater than 1, got {alpha}"
        )));
    }
    let scale = n as i64 + 1;
    // Prices can reach the order of n^2 max scaled benefit; insist the
    // whole range fits i64 up front instead of failing mid-run.
    (n as i64)
        .checked_pow(2)
        .and_then(|nn| nn.checked_mul(scale))
        .and_then(|f| f.checked_mul(initial_epsilon(w)))
        .ok_or_else(|| {
            Error::TooLarge("auction price bound n^2 (n+1) max|w| overflows 64 bits".into())
        })?;
    let benefit = |i: usize, j: usize| -> Result<i64> {
        w.at(i, j)
            .checked_mul(scale)
            .map(|b| -b)
            .ok_or_else(|| Error::TooLarge("scaled benefits overflow 64 bits".into()))
    };

    let mut stats = OpStats::default();
    let mut prices = vec![0i64; n];
    let mut owner = vec![UNSET; n];
    let mut eps = scale * initial_epsilon(w);
    loop {
        owner.fill(UNSET);
        let mut queue: VecDeque<usize> = (0..n).collect();
        let mut round_guard = 0u64;
        let limit = 10_000 + 2_000 * (n as u64).pow(2);
        while let Some(i) = queue.pop_front() {
            round_guard += 1;
            if round_guard > limit {
                return Err(Error::Internal(format!(
                    "auction phase at epsilon {eps} exceeded {limit} bids"
                )));
            }
            stats.iterations += 1;

            // Best and second-best net value; lowest column wins ties.
            let mut best_j = 0usize;
            let mut best = benefit(i, 0)?
                .checked_sub(prices[0])
                .ok_or_else(|| Error::TooLarge("auction prices overflow 64 bits".into()))?;
            let mut second = i64::MIN;
            for j in 1..n {
                let val = benefit(i, j)?
                    .checked_sub(prices[j])
                    .ok_or_else(|| Error::TooLarge("auction prices overflow 64 bits".into()))?;
                stats.comparisons += 1;
                if val > best {
                    second = best;
                    best = val;
                    best_j = j;
                } else if val > second {
                    second = val;
                }
            }
            stats.min_finds += 2;
            let bid = if second == i64::MIN {
                eps
            } else {
                best - second + eps
            };
            prices[best_j] = prices[best_j]
                .checked_add(bid)
                .ok_or_else(|| Error::TooLarge("auction prices overflow 64 bits".into()))?;
            if owner[best_j] != UNSET {
                queue.push_back(owner[best_j]);
            }
            owner[best_j] = i;
        }
        if eps == 1 {
            break;
        }
        let next = ((eps as f64) / alpha).floor() as i64;
        eps = next.clamp(1, eps - 1);
    }

    let mut sigma = vec![UNSET; n];
    for j in 0..n {
        sigma[owner[j]] = j;
    }
    let pairs: Vec<(usize, usize)> = sigma.iter().copied().enumerate().collect();
    let assignment = Assignment::from_pairs(w, pairs)?;

    let dual = repair_duals(w, &sigma, &prices, scale, &mut stats)?;
    debug_assert_eq!(dual.sum(), assignment.cost);
    Ok(SolverResult {
        assignment,
        dual,
        stats,
    })
}

/// Turns auction prices into exact integral duals.
///
/// For an optimal assignment the system `v[j] - v[sigma(i)] <= w[i][j] -
/// w[i][sigma(i)]` is feasible (its constraint graph has no negative
/// cycle), and any finite starting point relaxes to a fixpoint within n
/// synchronous sweeps. Seeding with the descaled prices keeps the values
/// small. Tightness on matched pairs then defines `u`.
fn repair_duals(
    w: &WeightMatrix,
    sigma: &[usize],
    prices: &[i64],
    scale: i64,
    stats: &mut OpStats,
) -> Result<DualSolution> {
    let n = sigma.len();
    let mut v: Vec<i64> = prices.iter().map(|&p| (-p).div_euclid(scale)).collect();
    for _ in 0..n {
        let mut changed = false;
        for i in 0..n {
            let base = v[sigma[i]] - w.at(i, sigma[i]);
            for j in 0..n {
                let bound = base + w.at(i, j);
                stats.comparisons += 1;
                if bound < v[j] {
                    v[j] = bound;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let u: Vec<i64> = (0..n).map(|i| w.at(i, sigma[i]) - v[sigma[i]]).collect();
    let dual = DualSolution { u, v };
    if !dual.is_feasible(w) {
        return Err(Error::Internal(
            "auction produced a suboptimal assignment: dual repair found no fixpoint".into(),
        ));
    }
    Ok(dual)
}
