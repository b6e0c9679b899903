//! Oblivious executions of the assignment solvers.
//!
//! Each driver mirrors its cleartext counterpart step for step, but every
//! weight, dual, reduced cost, distance and price lives in a [`SharedValue`]
//! from input to output. What the cleartext versions read directly, these
//! obtain through protocols: zero tests for tight edges, comparison trees
//! for minima, opened branch bits where the control flow genuinely forks.
//! Matching structure, covers and queue bookkeeping are public, exactly the
//! trade-off the leakage log documents. With the countermeasure enabled the
//! weight matrix is shuffled in both dimensions first, so every published
//! position refers to a secretly permuted coordinate system, and results are
//! mapped back at the end.
//!
//! Magnitude budget: masked comparisons need `bound + 1 + kappa + 1 <= 60`
//! field bits. Duals and reduced costs stay within `(n+1) * 2^bits`, so the
//! Hungarian and shortest-path drivers are comfortable for any `bits <= 14`
//! at desk sizes. The auction driver is the tight one: its public starting
//! epsilon comes from the declared bound (never from the secret weights) and
//! prices can reach `5n * (n+1) * 2^bits`, which at `kappa = 40` caps the
//! usable weight width around 7 bits for n = 8. Declare tight bounds via
//! [`WeightMatrix::with_bits`] when running the auction obliviously.

use super::engine::{CostModel, Engine, LeakageLog, McConfig, SharedValue, Tag};
use crate::model::WeightMatrix;
use crate::solvers::{require_square_min, Algorithm, OpStats, SolverResult};
use crate::{Assignment, DualSolution, Error, Result};

const UNSET: usize = usize::MAX;

/// Outcome of an oblivious solve: the usual solver result plus the full
/// protocol accounting.
#[derive(Debug)]
pub struct ObliviousRun {
    pub result: SolverResult,
    pub log: LeakageLog,
    pub cost: CostModel,
}

fn bits_of(x: usize) -> u32 {
    (usize::BITS - x.leading_zeros()).max(1)
}

/// Execute a solver over secret-shared weights.
///
/// With `countermeasure` on, a two-dimensional oblivious shuffle precedes
/// the solve and everything is mapped back afterwards, so the positions the
/// protocol publishes are decoupled from the true ones.
pub fn run_oblivious(
    algorithm: Algorithm,
    w: &WeightMatrix,
    cfg: McConfig,
    countermeasure: bool,
) -> Result<ObliviousRun> {
    if algorithm == Algorithm::Simplex {
        return Err(Error::BadParameter(
            "the oblivious runtime drives hungarian, sap-acm, sap-jv and auction".into(),
        ));
    }
    let n = require_square_min(w, "the oblivious runtime")?;

    let mut e = Engine::new(cfg);
    let mut shared: Vec<Vec<SharedValue>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            row.push(e.share(w.at(i, j), w.bits(), Tag::Weight)?);
        }
        shared.push(row);
    }

    let handles = if countermeasure {
        let (shuffled, handles) = e.shuffle2d(&shared)?;
        shared = shuffled;
        Some(handles)
    } else {
        None
    };

    let solved = match algorithm {
        Algorithm::Hungarian => hungarian_oblivious(&mut e, &shared, w.bits())?,
        Algorithm::SapAcm => sap_acm_oblivious(&mut e, &shared, w.bits())?,
        Algorithm::SapJv => sap_jv_oblivious(&mut e, &shared, w.bits())?,
        Algorithm::Auction => auction_oblivious(&mut e, &shared, w.bits())?,
        Algorithm::Simplex => unreachable!("rejected above"),
    };
    let Solved {
        pairs,
        u: u_sh,
        v: v_sh,
        steps,
        iterations,
    } = solved;

    // Map everything back through the secret permutations and close the
    // countermeasure bracket with the inverse shuffle.
    let (pairs, u_sh, v_sh, weights) = match &handles {
        Some(h) => {
            let mapped: Vec<(usize, usize)> =
                pairs.iter().map(|&(i, j)| h.to_original(i, j)).collect();
            let mut u = vec![None; n];
            let mut v = vec![None; n];
            for i in 0..n {
                u[h.row[i]] = Some(u_sh[i].clone());
                v[h.col[i]] = Some(v_sh[i].clone());
            }
            let unshuffled = e.unshuffle2d(&shared, h);
            (
                mapped,
                u.into_iter().map(|x| x.expect("permutation is total")).collect(),
                v.into_iter().map(|x| x.expect("permutation is total")).collect(),
                unshuffled,
            )
        }
        None => (pairs, u_sh, v_sh, shared),
    };

    // Designated outputs: assignment cost and the dual certificate.
    let mut cost_sh = e.constant(0);
    for &(i, j) in &pairs {
        cost_sh = e.add(&cost_sh, &weights[i][j]);
    }
    let cost_val = e.output(&cost_sh);
    let u = e.output_vec(&u_sh);
    let v = e.output_vec(&v_sh);

    let assignment = Assignment::from_pairs(w, pairs)?;
    if assignment.cost != cost_val {
        return Err(Error::Internal(format!(
            "oblivious cost opening {cost_val} disagrees with the assignment cost {}",
            assignment.cost
        )));
    }
    let dual = DualSolution { u, v };
    if !dual.is_feasible(w) || !dual.tight_on(w, &assignment) || dual.sum() != assignment.cost {
        return Err(Error::Internal(
            "oblivious solve produced a non-certifying dual".into(),
        ));
    }

    e.log_iterations("solve", iterations);
    e.stamp_local_time();
    let stats = OpStats {
        steps,
        zero_tests: e.cost.zero_tests,
        min_finds: e.cost.min_finds,
        comparisons: e.cost.comparisons,
        iterations,
    };
    Ok(ObliviousRun {
        result: SolverResult {
            assignment,
            dual,
            stats,
        },
        log: e.log,
        cost: e.cost,
    })
}

struct Solved {
    pairs: Vec<(usize, usize)>,
    u: Vec<SharedValue>,
    v: Vec<SharedValue>,
    steps: u64,
    iterations: u64,
}

// ----- Hungarian -----

const NONE: u8 = 0;
const STAR: u8 = 1;
const PRIME: u8 = 2;

/// Munkres over shares. The reduced matrix, duals and every minimum stay
/// secret; zero patterns are tested in vectorized batches per epoch (the
/// values only change at reductions and adjustments, so the opened booleans
/// are cached between them), and covers are public bookkeeping logged as
/// covering bits.
fn hungarian_oblivious(
    e: &mut Engine,
    w: &[Vec<SharedValue>],
    wbits: u32,
) -> Result<Solved> {
    let n = w.len();
    let dual_bits = wbits + bits_of(n + 1) + 1;
    let c_bits = dual_bits + 2;

    let mut c: Vec<Vec<SharedValue>> = w.to_vec();
    let zero = e.constant(0);
    let mut u: Vec<SharedValue> = vec![zero.clone(); n];
    let mut v: Vec<SharedValue> = vec![zero.clone(); n];
    let mut marks = vec![NONE; n * n];
    let mut row_cov = vec![false; n];
    let mut col_cov = vec![false; n];
    let mut steps = 0u64;

    // Row reduction.
    steps += 1;
    for i in 0..n {
        let minval = e.min_value(&c[i])?;
        for j in 0..n {
            let r = e.sub(&c[i][j], &minval);
            c[i][j] = e.rebound(&r, c_bits);
        }
        u[i] = minval;
        u[i].tag = Tag::Dual;
    }

    // One vectorized zero sweep per epoch; entries only change at
    // reductions and adjustments.
    let mut zeros: Vec<bool> = {
        let flat: Vec<SharedValue> = c.iter().flatten().cloned().collect();
        e.zero_test_batch(&flat)
    };

    // Star zeros greedily.
    steps += 1;
    {
        let mut row_star = vec![false; n];
        let mut col_star = vec![false; n];
        for i in 0..n {
            for j in 0..n {
                if !row_star[i] && !col_star[j] && zeros[i * n + j] {
                    marks[i * n + j] = STAR;
                    row_star[i] = true;
                    col_star[j] = true;
                }
            }
        }
    }

    enum Step {
        CoverColumns,
        Prime,
        Augment { row: usize, col: usize },
        Adjust,
    }

    let mut step = Step::CoverColumns;
    loop {
        steps += 1;
        step = match step {
            Step::CoverColumns => {
                let mut covered = 0;
                for j in 0..n {
                    let starred = (0..n).any(|i| marks[i * n + j] == STAR);
                    if col_cov[j] != starred {
                        e.log_cover("col", j, starred);
                    }
                    col_cov[j] = starred;
                    covered += usize::from(starred);
                }
                if covered == n {
                    break;
                }
                Step::Prime
            }
            Step::Prime => loop {
                let mut found = None;
                for i in 0..n {
                    if row_cov[i] {
                        continue;
                    }
                    for j in 0..n {
                        if !col_cov[j] && zeros[i * n + j] {
                            found = Some((i, j));
                            break;
                        }
                    }
                    if found.is_some() {
                        break;
                    }
                }
                let Some((i, j)) = found else {
                    break Step::Adjust;
                };
                marks[i * n + j] = PRIME;
                match (0..n).find(|&j2| marks[i * n + j2] == STAR) {
                    Some(j_star) => {
                        row_cov[i] = true;
                        e.log_cover("row", i, true);
                        col_cov[j_star] = false;
                        e.log_cover("col", j_star, false);
                    }
                    None => break Step::Augment { row: i, col: j },
                }
            },
            Step::Augment { row, col } => {
                let mut path = vec![(row, col)];
                loop {
                    let (_, j) = *path.last().expect("path is nonempty");
                    match (0..n).find(|&i| marks[i * n + j] == STAR) {
                        Some(i) => {
                            path.push((i, j));
                            let jp = (0..n)
                                .find(|&j2| marks[i * n + j2] == PRIME)
                                .expect("primed row on the path");
                            path.push((i, jp));
                        }
                        None => break,
                    }
                }
                for &(i, j) in &path {
                    let m = &mut marks[i * n + j];
                    *m = if *m == STAR { NONE } else { STAR };
                }
                for mark in marks.iter_mut() {
                    if *mark == PRIME {
                        *mark = NONE;
                    }
                }
                row_cov.fill(false);
                col_cov.fill(false);
                Step::CoverColumns
            }
            Step::Adjust => {
                let uncovered: Vec<SharedValue> = (0..n)
                    .filter(|&i| !row_cov[i])
                    .flat_map(|i| {
                        (0..n)
                            .filter(|&j| !col_cov[j])
                            .map(move |j| (i, j))
                    })
                    .map(|(i, j)| c[i][j].clone())
                    .collect();
                let minval = e.min_value(&uncovered)?;
                for i in 0..n {
                    for j in 0..n {
                        if row_cov[i] {
                            let r = e.add(&c[i][j], &minval);
                            c[i][j] = e.rebound(&r, c_bits);
                        }
                        if !col_cov[j] {
                            let r = e.sub(&c[i][j], &minval);
                            c[i][j] = e.rebound(&r, c_bits);
                        }
                    }
                }
                for i in 0..n {
                    if row_cov[i] {
                        let r = e.sub(&u[i], &minval);
                        u[i] = e.rebound(&r, dual_bits);
                        u[i].tag = Tag::Dual;
                    }
                }
                for j in 0..n {
                    if !col_cov[j] {
                        let r = e.add(&v[j], &minval);
                        v[j] = e.rebound(&r, dual_bits);
                        v[j].tag = Tag::Dual;
                    }
                }
                let flat: Vec<SharedValue> = c.iter().flatten().cloned().collect();
                zeros = e.zero_test_batch(&flat);
                Step::Prime
            }
        };
    }

    let mut pairs = Vec::with_capacity(n);
    for i in 0..n {
        for j in 0..n {
            if marks[i * n + j] == STAR {
                pairs.push((i, j));
            }
        }
    }
    Ok(Solved {
        pairs,
        u,
        v,
        steps,
        iterations: steps,
    })
}

// ----- shortest augmenting path, reduction start -----

/// Dijkstra-based shortest augmenting paths over shares. Row and column
/// reductions and all distances stay secret; the scan order publishes which
/// column each Dijkstra step settles (argmin positions) and which tentative
/// distances improve (branch bits), matching the cleartext control flow.
fn sap_acm_oblivious(
    e: &mut Engine,
    w: &[Vec<SharedValue>],
    wbits: u32,
) -> Result<Solved> {
    let n = w.len();
    let dual_bits = wbits + bits_of(n + 1) + 1;
    let dist_bits = dual_bits + 2;
    let mut steps = 0u64;
    let mut iterations = 0u64;

    let mut u: Vec<SharedValue> = Vec::with_capacity(n);
    for i in 0..n {
        let mut m = e.min_value(&w[i])?;
        m.tag = Tag::Dual;
        u.push(m);
    }
    let mut v: Vec<SharedValue> = Vec::with_capacity(n);
    for j in 0..n {
        let col: Vec<SharedValue> = (0..n).map(|i| e.sub(&w[i][j], &u[i])).collect();
        let mut m = e.min_value(&col)?;
        m.tag = Tag::Dual;
        v.push(m);
    }

    // Greedy matching along tight edges, one vectorized zero sweep per row.
    let mut row_mate = vec![UNSET; n];
    let mut col_mate = vec![UNSET; n];
    let mut mated = 0usize;
    for i in 0..n {
        let open_cols: Vec<usize> = (0..n).filter(|&j| col_mate[j] == UNSET).collect();
        if open_cols.is_empty() {
            break;
        }
        let slacks: Vec<SharedValue> = open_cols
            .iter()
            .map(|&j| {
                let s = e.sub(&w[i][j], &u[i]);
                e.sub(&s, &v[j])
            })
            .collect();
        let hits = e.zero_test_batch(&slacks);
        if let Some(k) = hits.iter().position(|&z| z) {
            let j = open_cols[k];
            row_mate[i] = j;
            col_mate[j] = i;
            mated += 1;
        }
    }

    while mated < n {
        iterations += 1;
        let s = (0..n)
            .find(|&i| row_mate[i] == UNSET)
            .expect("a free row exists while mated < n");
        let mut dist: Vec<SharedValue> = (0..n)
            .map(|k| {
                let d = e.sub(&w[s][k], &u[s]);
                let d = e.sub(&d, &v[k]);
                e.rebound(&d, dist_bits)
            })
            .collect();
        let mut dad = vec![UNSET; n];
        let mut seen = vec![false; n];

        let mut j;
        loop {
            steps += 1;
            let unseen: Vec<usize> = (0..n).filter(|&k| !seen[k]).collect();
            let vals: Vec<SharedValue> =
                unseen.iter().map(|&k| dist[k].clone()).collect();
            let (pos, _) = e.min_index_open(&vals, "dijkstra")?;
            j = unseen[pos];
            seen[j] = true;
            e.log_cover("scan-col", j, true);
            if col_mate[j] == UNSET {
                break;
            }
            let i = col_mate[j];
            let targets: Vec<usize> = (0..n).filter(|&k| !seen[k]).collect();
            let mut cand = Vec::with_capacity(targets.len());
            for &k in &targets {
                let nd = e.add(&dist[j], &w[i][k]);
                let nd = e.sub(&nd, &u[i]);
                let nd = e.sub(&nd, &v[k]);
                cand.push(e.rebound(&nd, dist_bits));
            }
            let pairs: Vec<(SharedValue, SharedValue)> = targets
                .iter()
                .zip(&cand)
                .map(|(&k, nd)| (nd.clone(), dist[k].clone()))
                .collect();
            let improved = e.less_than_open_batch(&pairs, "relax")?;
            for ((&k, nd), better) in targets.iter().zip(cand).zip(improved) {
                if better {
                    dist[k] = nd;
                    dad[k] = j;
                }
            }
        }

        for k in 0..n {
            if k == j || !seen[k] {
                continue;
            }
            let i = col_mate[k];
            let delta = e.sub(&dist[k], &dist[j]);
            let vk = e.add(&v[k], &delta);
            v[k] = e.rebound(&vk, dual_bits);
            v[k].tag = Tag::Dual;
            let ui = e.sub(&u[i], &delta);
            u[i] = e.rebound(&ui, dual_bits);
            u[i].tag = Tag::Dual;
        }
        let us = e.add(&u[s], &dist[j]);
        u[s] = e.rebound(&us, dual_bits);
        u[s].tag = Tag::Dual;

        while dad[j] != UNSET {
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
    Ok(Solved {
        pairs,
        u,
        v,
        steps,
        iterations: iterations.max(1),
    })
}

// ----- shortest augmenting path, column reduction start -----

/// The three-phase scheme over shares: column reduction, reduction
/// transfer, two augmenting row reduction passes, then bucketed Dijkstra.
/// Column duals stay secret; the bucket logic publishes its comparisons as
/// branch bits and its settled columns as argmin positions, exactly where
/// the cleartext version reads them.
fn sap_jv_oblivious(
    e: &mut Engine,
    w: &[Vec<SharedValue>],
    wbits: u32,
) -> Result<Solved> {
    let n = w.len();
    let dual_bits = wbits + bits_of(n + 1) + 1;
    let dist_bits = dual_bits + 2;
    let mut steps = 0u64;
    let mut iterations = 0u64;

    let mut rowsol = vec![UNSET; n];
    let mut colsol = vec![UNSET; n];
    let zero = e.constant(0);
    let mut v: Vec<SharedValue> = vec![zero; n];
    let mut matches = vec![0u32; n];

    for j in (0..n).rev() {
        let col: Vec<SharedValue> = (0..n).map(|i| w[i][j].clone()).collect();
        let (imin, minval) = e.min_index_open(&col, "col-reduction")?;
        v[j] = minval;
        v[j].tag = Tag::Dual;
        matches[imin] += 1;
        if matches[imin] == 1 {
            rowsol[imin] = j;
            colsol[j] = imin;
        } else {
            colsol[j] = UNSET;
        }
    }

    let mut free: Vec<usize> = Vec::with_capacity(n);
    for i in 0..n {
        if matches[i] == 0 {
            free.push(i);
        } else if matches[i] == 1 && n > 1 {
            let j1 = rowsol[i];
            let others: Vec<SharedValue> = (0..n)
                .filter(|&j| j != j1)
                .map(|j| e.sub(&w[i][j], &v[j]))
                .collect();
            let min = e.min_value(&others)?;
            let nv = e.sub(&v[j1], &min);
            v[j1] = e.rebound(&nv, dual_bits);
            v[j1].tag = Tag::Dual;
        }
    }

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
            steps += 1;
            let h: Vec<SharedValue> = (0..n).map(|j| e.sub(&w[i][j], &v[j])).collect();
            let (mut j1, umin) = e.min_index_open(&h, "arr-best")?;
            let rest_idx: Vec<usize> = (0..n).filter(|&j| j != j1).collect();
            let (j2, usubmin) = if rest_idx.is_empty() {
                (UNSET, None)
            } else {
                let rest: Vec<SharedValue> =
                    rest_idx.iter().map(|&j| h[j].clone()).collect();
                let (pos, val) = e.min_index_open(&rest, "arr-second")?;
                (rest_idx[pos], Some(val))
            };
            let mut i0 = colsol[j1];
            let strictly_better = match &usubmin {
                Some(usub) => e.less_than_open(&umin, usub, "arr-gap")?,
                None => true,
            };
            if strictly_better {
                if let Some(usub) = &usubmin {
                    let gap = e.sub(usub, &umin);
                    let nv = e.sub(&v[j1], &gap);
                    v[j1] = e.rebound(&nv, dual_bits);
                    v[j1].tag = Tag::Dual;
                }
            } else if i0 != UNSET {
                j1 = j2;
                i0 = colsol[j1];
            }
            rowsol[i] = j1;
            colsol[j1] = i;
            iterations += 1;
            if i0 != UNSET {
                rowsol[i0] = UNSET;
                if strictly_better {
                    k -= 1;
                    pending[k] = i0;
                } else {
                    free.push(i0);
                }
            }
        }
    }

    let mut collist: Vec<usize> = (0..n).collect();
    for f in 0..free.len() {
        let freerow = free[f];
        iterations += 1;
        let mut d: Vec<SharedValue> = (0..n)
            .map(|j| {
                let dj = e.sub(&w[freerow][j], &v[j]);
                e.rebound(&dj, dist_bits)
            })
            .collect();
        let mut pred = vec![freerow; n];
        for (j, c) in collist.iter_mut().enumerate() {
            *c = j;
        }
        let mut low = 0usize;
        let mut up = 0usize;
        let mut last: isize = -1;
        let mut min_d = d[0].clone();
        let mut endofpath = 0usize;
        let mut found = false;
        while !found {
            steps += 1;
            if up == low {
                last = low as isize - 1;
                min_d = d[collist[up]].clone();
                up += 1;
                for k in up..n {
                    let j = collist[k];
                    let le = !e.less_than_open(&min_d, &d[j], "bucket-le")?;
                    if le {
                        let lt = e.less_than_open(&d[j], &min_d, "bucket-lt")?;
                        if lt {
                            up = low;
                            min_d = d[j].clone();
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
                e.log_cover("settled-col", j1, true);
                let i = colsol[j1];
                let h = e.sub(&w[i][j1], &v[j1]);
                let h = e.sub(&h, &min_d);
                for k in up..n {
                    let j = collist[k];
                    let v2 = e.sub(&w[i][j], &v[j]);
                    let v2 = e.sub(&v2, &h);
                    let v2 = e.rebound(&v2, dist_bits);
                    if e.less_than_open(&v2, &d[j], "relax")? {
                        pred[j] = i;
                        let gap = e.sub(&v2, &min_d);
                        if e.zero_test(&gap) {
                            if colsol[j] == UNSET {
                                d[j] = v2;
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
            let delta = e.sub(&d[j1], &min_d);
            let nv = e.add(&v[j1], &delta);
            v[j1] = e.rebound(&nv, dual_bits);
            v[j1].tag = Tag::Dual;
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

    let mut u = Vec::with_capacity(n);
    for i in 0..n {
        let j = rowsol[i];
        let mut ui = e.sub(&w[i][j], &v[j]);
        ui = e.rebound(&ui, dual_bits);
        ui.tag = Tag::Dual;
        u.push(ui);
    }
    let pairs: Vec<(usize, usize)> = rowsol.iter().copied().enumerate().collect();
    Ok(Solved {
        pairs,
        u,
        v,
        steps,
        iterations: iterations.max(1),
    })
}

// ----- auction -----

/// Epsilon-scaling auction over shares. Benefits, prices and bids stay
/// secret; each bid publishes only which column won (an argmin position in
/// the shuffled coordinate system when the countermeasure is on). The
/// starting epsilon comes from the declared public weight bound, never from
/// the secret maximum, so the epsilon schedule is public data.
fn auction_oblivious(
    e: &mut Engine,
    w: &[Vec<SharedValue>],
    wbits: u32,
) -> Result<Solved> {
    let n = w.len();
    let scale = n as i64 + 1;
    let scale_bits = bits_of(n + 1);
    let price_bits = wbits + scale_bits + bits_of(5 * n);
    let val_bits = price_bits + 1;
    let mut steps = 0u64;
    let mut iterations = 0u64;

    let benefits: Vec<Vec<SharedValue>> = w
        .iter()
        .map(|row| {
            row.iter()
                .map(|x| {
                    let mut b = e.mul_pub(x, -scale);
                    b.tag = Tag::Derived;
                    b
                })
                .collect()
        })
        .collect();

    let zero = e.constant(0);
    let mut prices: Vec<SharedValue> = vec![zero; n];
    for p in prices.iter_mut() {
        p.tag = Tag::Dual;
    }
    let mut owner = vec![UNSET; n];
    let eps0 = scale * ((1i64 << wbits) - 1).max(1);
    let mut eps = eps0;
    loop {
        steps += 1;
        owner.fill(UNSET);
        let mut queue: std::collections::VecDeque<usize> = (0..n).collect();
        let mut round_guard = 0u64;
        let limit = 10_000 + 2_000 * (n as u64).pow(2);
        while let Some(i) = queue.pop_front() {
            round_guard += 1;
            if round_guard > limit {
                return Err(Error::Internal(format!(
                    "auction phase at epsilon {eps} exceeded {limit} bids"
                )));
            }
            iterations += 1;

            let neg_vals: Vec<SharedValue> = (0..n)
                .map(|j| {
                    let val = e.sub(&benefits[i][j], &prices[j]);
                    let val = e.rebound(&val, val_bits);
                    e.neg(&val)
                })
                .collect();
            let (best_j, neg_best) = e.min_index_open(&neg_vals, "bid")?;
            let bid = if n == 1 {
                e.constant(eps)
            } else {
                let rest: Vec<SharedValue> = (0..n)
                    .filter(|&j| j != best_j)
                    .map(|j| neg_vals[j].clone())
                    .collect();
                let neg_second = e.min_value(&rest)?;
                // best - second = (-second) - (-best)
                let gap = e.sub(&neg_second, &neg_best);
                e.add_pub(&gap, eps)
            };
            let np = e.add(&prices[best_j], &bid);
            prices[best_j] = e.rebound(&np, price_bits);
            prices[best_j].tag = Tag::Dual;
            if owner[best_j] != UNSET {
                queue.push_back(owner[best_j]);
            }
            owner[best_j] = i;
        }
        if eps == 1 {
            break;
        }
        let next = ((eps as f64) / crate::solvers::auction::DEFAULT_ALPHA).floor() as i64;
        eps = next.clamp(1, eps - 1);
    }

    let mut sigma = vec![UNSET; n];
    for j in 0..n {
        sigma[owner[j]] = j;
    }

    // Dual repair: relax the tight-edge difference constraints to a
    // fixpoint. The constraint graph of an optimal assignment has no
    // negative cycle, so n in-place sweeps from any start converge; the
    // sweep count is fixed and public, and every update is an oblivious
    // select, so nothing about the values leaks.
    let zero = e.constant(0);
    let mut v: Vec<SharedValue> = vec![zero; n];
    for vj in v.iter_mut() {
        vj.tag = Tag::Dual;
    }
    for _ in 0..n {
        for i in 0..n {
            let base = e.sub(&v[sigma[i]], &w[i][sigma[i]]);
            for j in 0..n {
                let bound = e.add(&base, &w[i][j]);
                let bound = e.rebound(&bound, dualish_bits(wbits, n));
                let lt = e.less_than(&bound, &v[j])?;
                let nv = e.mux(&lt, &bound, &v[j]);
                v[j] = e.rebound(&nv, dualish_bits(wbits, n));
                v[j].tag = Tag::Dual;
            }
        }
    }
    let mut u = Vec::with_capacity(n);
    for i in 0..n {
        let mut ui = e.sub(&w[i][sigma[i]], &v[sigma[i]]);
        ui = e.rebound(&ui, dualish_bits(wbits, n));
        ui.tag = Tag::Dual;
        u.push(ui);
    }

    let pairs: Vec<(usize, usize)> = sigma.iter().copied().enumerate().collect();
    Ok(Solved {
        pairs,
        u,
        v,
        steps,
        iterations,
    })
}

fn dualish_bits(wbits: u32, n: usize) -> u32 {
    wbits + bits_of(n + 1) + 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Sense;
    use crate::solvers::{brute_force, solve};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn random_w(n: usize, seed: u64, hi: i64, bits: u32) -> WeightMatrix {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let entries: Vec<i64> = (0..n * n).map(|_| rng.gen_range(0..=hi)).collect();
        WeightMatrix::with_bits(n, n, Sense::Minimize, entries, bits).unwrap()
    }

    fn cfg(seed: u64) -> McConfig {
        McConfig {
            seed,
            ..McConfig::default()
        }
    }

    #[test]
    fn pipeline_example() {
        let w = WeightMatrix::with_bits(2, 2, Sense::Minimize, vec![1, 2, 2, 4], 4).unwrap();
        let run = run_oblivious(Algorithm::Hungarian, &w, cfg(7), false).unwrap();
        assert_eq!(run.result.assignment.cost, 4);
        assert!(!run.log.is_empty());
        assert!(run.log.is_hygienic());
        assert_eq!(run.result.dual.sum(), 4);
    }

    #[test]
    fn all_algorithms_match_oracle() {
        for algo in [
            Algorithm::Hungarian,
            Algorithm::SapAcm,
            Algorithm::SapJv,
            Algorithm::Auction,
        ] {
            for seed in 0..8 {
                let n = 2 + (seed as usize % 5);
                let w = random_w(n, seed * 31 + 5, 100, 7);
                let want = brute_force(&w).unwrap().cost;
                let run = run_oblivious(algo, &w, cfg(seed), false)
                    .unwrap_or_else(|err| panic!("{algo} seed {seed}: {err}"));
                assert_eq!(run.result.assignment.cost, want, "{algo} seed {seed}");
                assert!(run.log.is_hygienic());
            }
        }
    }

    #[test]
    fn countermeasure_preserves_cost() {
        for seed in 0..10 {
            let w = random_w(6, 900 + seed, 100, 7);
            let want = solve(Algorithm::Hungarian, &w).unwrap().assignment.cost;
            let run = run_oblivious(Algorithm::Hungarian, &w, cfg(seed), true).unwrap();
            assert_eq!(run.result.assignment.cost, want, "seed {seed}");
            assert!(run.result.dual.is_feasible(&w));
        }
    }

    #[test]
    fn simplex_is_not_oblivious() {
        let w = random_w(3, 1, 50, 7);
        let err = run_oblivious(Algorithm::Simplex, &w, cfg(0), false).unwrap_err();
        assert!(matches!(err, Error::BadParameter(_)));
    }

    #[test]
    fn latency_shifts_simulated_time_linearly() {
        let w = random_w(4, 2, 80, 7);
        let run = run_oblivious(Algorithm::SapJv, &w, cfg(3), false).unwrap();
        let t0 = run.cost.at_latency(0.0).simulated_time_ms();
        let t20 = run.cost.at_latency(20.0).simulated_time_ms();
        assert!(t0 < t20);
        assert_eq!(t20 - t0, run.cost.rounds as f64 * 20.0);
    }

    #[test]
    fn auction_width_budget_is_enforced() {
        // 16 declared bits push the masked comparison past the field budget.
        let w = WeightMatrix::with_bits(
            8,
            8,
            Sense::Minimize,
            (0..64).map(|x| x % 7).collect(),
            16,
        )
        .unwrap();
        let err = run_oblivious(Algorithm::Auction, &w, cfg(0), false).unwrap_err();
        assert!(matches!(err, Error::BitBudget { .. }), "got {err:?}");
    }
}
