//! Six-step Hungarian method (Munkres) with explicit dual tracking.
//!
//! The reduced matrix always equals `w[i][j] - u[i] - v[j]`: the row
//! reduction stores each row minimum in `u`, and every cover adjustment
//! moves its minimum into the duals (`u[i] -= m` on covered rows,
//! `v[j] += m` on uncovered columns). Reduced entries stay nonnegative, so
//! the duals are feasible at every point and tight on starred zeros.

use crate::model::WeightMatrix;
use crate::solvers::{require_square_min, OpStats, SolverResult};
use crate::{Assignment, DualSolution, Result};

/// Snapshot of the duals at the two steps that modify them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DualEvent {
    /// Row reduction finished; `u` holds the subtracted row minima.
    RowReduction { u: Vec<i64> },
    /// A cover adjustment by `minval` was applied.
    Adjustment {
        minval: i64,
        u: Vec<i64>,
        v: Vec<i64>,
    },
}

const NONE: u8 = 0;
const STAR: u8 = 1;
const PRIME: u8 = 2;

#[derive(Debug, Clone, Copy)]
enum Step {
    Star,
    CoverColumns,
    Prime,
    Augment { row: usize, col: usize },
    Adjust,
}

struct Munkres<'a> {
    w: &'a WeightMatrix,
    n: usize,
    c: Vec<i64>,
    u: Vec<i64>,
    v: Vec<i64>,
    marks: Vec<u8>,
    row_cov: Vec<bool>,
    col_cov: Vec<bool>,
    stats: OpStats,
    trace: Option<Vec<DualEvent>>,
}

pub fn solve_hungarian(w: &WeightMatrix) -> Result<SolverResult> {
    run(w, false).map(|(res, _)| res)
}

/// Like [`solve_hungarian`] but also returns every dual update.
pub fn solve_hungarian_traced(w: &WeightMatrix) -> Result<(SolverResult, Vec<DualEvent>)> {
    let (res, trace) = run(w, true)?;
    Ok((res, trace.expect("trace was requested")))
}

fn run(w: &WeightMatrix, record: bool) -> Result<(SolverResult, Option<Vec<DualEvent>>)> {
    let n = require_square_min(w, "the hungarian solver")?;
    let mut m = Munkres {
        w,
        n,
        c: w.entries().to_vec(),
        u: vec![0; n],
        v: vec![0; n],
        marks: vec![NONE; n * n],
        row_cov: vec![false; n],
        col_cov: vec![false; n],
        stats: OpStats::default(),
        trace: record.then(Vec::new),
    };

    m.reduce_rows();
    let mut step = Step::Star;
    loop {
        m.stats.steps += 1;
        step = match step {
            Step::Star => m.star_zeros(),
            Step::CoverColumns => match m.cover_starred_columns() {
                Some(next) => next,
                None => break,
            },
            Step::Prime => m.prime_zeros(),
            Step::Augment { row, col } => m.augment(row, col),
            Step::Adjust => m.adjust(),
        };
    }
    m.stats.iterations = m.stats.steps;

    let mut pairs = Vec::with_capacity(n);
    for i in 0..n {
        for j in 0..n {
            if m.marks[i * n + j] == STAR {
                pairs.push((i, j));
            }
        }
    }
    let assignment = Assignment::from_pairs(w, pairs)?;
    let dual = DualSolution { u: m.u, v: m.v };
    debug_assert!(dual.is_feasible(w));
    debug_assert!(dual.tight_on(w, &assignment));
    Ok((
        SolverResult {
            assignment,
            dual,
            stats: m.stats,
        },
        m.trace,
    ))
}

impl Munkres<'_> {
    fn at(&self, i: usize, j: usize) -> i64 {
        self.c[i * self.n + j]
    }

    fn is_zero(&mut self, i: usize, j: usize) -> bool {
        self.stats.zero_tests += 1;
        self.at(i, j) == 0
    }

    fn reduce_rows(&mut self) {
        self.stats.steps += 1;
        for i in 0..self.n {
            let mut minval = self.at(i, 0);
            for j in 1..self.n {
                self.stats.comparisons += 1;
                minval = minval.min(self.at(i, j));
            }
            self.stats.min_finds += 1;
            for j in 0..self.n {
                self.c[i * self.n + j] -= minval;
            }
            self.u[i] = minval;
        }
        if let Some(trace) = &mut self.trace {
            trace.push(DualEvent::RowReduction { u: self.u.clone() });
        }
    }

    fn star_zeros(&mut self) -> Step {
        let mut row_star = vec![false; self.n];
        let mut col_star = vec![false; self.n];
        for i in 0..self.n {
            for j in 0..self.n {
                if !row_star[i] && !col_star[j] && self.is_zero(i, j) {
                    self.marks[i * self.n + j] = STAR;
                    row_star[i] = true;
                    col_star[j] = true;
                }
            }
        }
        Step::CoverColumns
    }

    /// Covers columns with stars; `None` means the matching is complete.
    fn cover_starred_columns(&mut self) -> Option<Step> {
        let mut covered = 0;
        for j in 0..self.n {
            let starred = (0..self.n).any(|i| self.marks[i * self.n + j] == STAR);
            self.col_cov[j] = starred;
            covered += usize::from(starred);
        }
        (covered < self.n).then_some(Step::Prime)
    }

    fn find_uncovered_zero(&mut self) -> Option<(usize, usize)> {
        for i in 0..self.n {
            if self.row_cov[i] {
                continue;
            }
            for j in 0..self.n {
                if !self.col_cov[j] && self.is_zero(i, j) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    fn star_in_row(&self, i: usize) -> Option<usize> {
        (0..self.n).find(|&j| self.marks[i * self.n + j] == STAR)
    }

    fn star_in_col(&self, j: usize) -> Option<usize> {
        (0..self.n).find(|&i| self.marks[i * self.n + j] == STAR)
    }

    fn prime_in_row(&self, i: usize) -> Option<usize> {
        (0..self.n).find(|&j| self.marks[i * self.n + j] == PRIME)
    }

    fn prime_zeros(&mut self) -> Step {
        loop {
            let Some((i, j)) = self.find_uncovered_zero() else {
                return Step::Adjust;
            };
            self.marks[i * self.n + j] = PRIME;
            match self.star_in_row(i) {
                Some(j_star) => {
                    self.row_cov[i] = true;
                    self.col_cov[j_star] = false;
                }
                None => return Step::Augment { row: i, col: j },
            }
        }
    }

    fn augment(&mut self, row: usize, col: usize) -> Step {
        let mut path = vec![(row, col)];
        loop {
            let (_, j) = *path.last().expect("path is nonempty");
            match self.star_in_col(j) {
                Some(i) => {
                    path.push((i, j));
                    let jp = self.prime_in_row(i).expect("primed row on the path");
                    path.push((i, jp));
                }
                None => break,
            }
        }
        for &(i, j) in &path {
            let m = &mut self.marks[i * self.n + j];
            *m = if *m == STAR { NONE } else { STAR };
        }
        for mark in &mut self.marks {
            if *mark == PRIME {
                *mark = NONE;
            }
        }
        self.row_cov.fill(false);
        self.col_cov.fill(false);
        Step::CoverColumns
    }

    fn adjust(&mut self) -> Step {
        let mut minval = i64::MAX;
        let mut seen = 0u64;
        for i in 0..self.n {
            if self.row_cov[i] {
                continue;
            }
            for j in 0..self.n {
                if !self.col_cov[j] {
                    seen += 1;
                    minval = minval.min(self.at(i, j));
                }
            }
        }
        self.stats.min_finds += 1;
        self.stats.comparisons += seen.saturating_sub(1);
        for i in 0..self.n {
            for j in 0..self.n {
                if self.row_cov[i] {
                    self.c[i * self.n + j] += minval;
                }
                if !self.col_cov[j] {
                    self.c[i * self.n + j] -= minval;
                }
            }
        }
        for i in 0..self.n {
            if self.row_cov[i] {
                self.u[i] -= minval;
            }
        }
        for j in 0..self.n {
            if !self.col_cov[j] {
                self.v[j] += minval;
            }
        }
        if let Some(trace) = &mut self.trace {
            trace.push(DualEvent::Adjustment {
                minval,
                u: self.u.clone(),
                v: self.v.clone(),
            });
        }
        debug_assert!((0..self.n).all(|i| {
            (0..self.n).all(|j| {
                self.at(i, j) >= 0 && self.at(i, j) == self.w.at(i, j) - self.u[i] - self.v[j]
            })
        }));
        Step::Prime
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Sense;
    use crate::solvers::brute_force;

    #[test]
    fn small_instance_matches_oracle() {
        let w = WeightMatrix::from_rows(
            &[vec![4, 1, 3], vec![2, 0, 5], vec![3, 2, 2]],
            Sense::Minimize,
        )
        .unwrap();
        let res = solve_hungarian(&w).unwrap();
        assert_eq!(res.assignment.cost, brute_force(&w).unwrap().cost);
        assert_eq!(res.dual.sum(), res.assignment.cost);
        assert!(res.dual.is_feasible(&w));
        assert!(res.dual.tight_on(&w, &res.assignment));
    }

    #[test]
    fn trace_starts_with_row_minima() {
        let w = WeightMatrix::from_rows(
            &[vec![7, 2, 9], vec![4, 4, 4], vec![1, 0, 3]],
            Sense::Minimize,
        )
        .unwrap();
        let (_, trace) = solve_hungarian_traced(&w).unwrap();
        match &trace[0] {
            DualEvent::RowReduction { u } => assert_eq!(u, &vec![2, 4, 0]),
            other => panic!("expected row reduction first, got {other:?}"),
        }
    }

    #[test]
    fn negative_entries_are_fine() {
        let w = WeightMatrix::from_rows(&[vec![-5, 3], vec![2, -4]], Sense::Minimize).unwrap();
        let res = solve_hungarian(&w).unwrap();
        assert_eq!(res.assignment.cost, -9);
        assert_eq!(res.assignment.pairs, vec![(0, 0), (1, 1)]);
    }
}
