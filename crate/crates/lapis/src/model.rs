//! Instance model: weight matrices, assignments, duals and the LP view.
//!
//! Everything downstream (solvers, certificates, the MPC engine and the
//! proof layer) works on these types. Weights are `i64` with a declared
//! magnitude bound so the arithmetic layers can budget bits explicitly.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::{Error, Result};

/// Hard cap on the declared magnitude bound.
pub const MAX_BITS: u32 = 40;

/// Default magnitude bound: weights fit 16 bits.
pub const DEFAULT_BITS: u32 = 16;

/// Optimization direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sense {
    Minimize,
    Maximize,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sense::Minimize => write!(f, "min"),
            Sense::Maximize => write!(f, "max"),
        }
    }
}

impl FromStr for Sense {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "min" => Ok(Sense::Minimize),
            "max" => Ok(Sense::Maximize),
            other => Err(Error::Parse(format!(
                "unknown sense {other:?}, expected \"min\" or \"max\""
            ))),
        }
    }
}

/// Dense row-major cost matrix with a declared entry bound `|w| < 2^bits`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightMatrix {
    rows: usize,
    cols: usize,
    sense: Sense,
    bits: u32,
    w: Vec<i64>,
}

/// Smallest `b` with `|value| < 2^b`, at least [`DEFAULT_BITS`].
pub fn bits_for(max_abs: i64) -> u32 {
    let b = 64 - (max_abs as u64).leading_zeros();
    b.max(DEFAULT_BITS)
}

impl WeightMatrix {
    /// Builds a matrix from row-major entries, deriving the bit bound.
    pub fn new(rows: usize, cols: usize, sense: Sense, entries: Vec<i64>) -> Result<Self> {
        let max_abs = entries.iter().map(|e| e.unsigned_abs()).max().unwrap_or(0);
        Self::with_bits(rows, cols, sense, entries, bits_for(max_abs as i64))
    }

    /// Builds a matrix and enforces the given bit bound on every entry.
    pub fn with_bits(
        rows: usize,
        cols: usize,
        sense: Sense,
        entries: Vec<i64>,
        bits: u32,
    ) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Shape("matrix must have at least one row and column".into()));
        }
        if entries.len() != rows * cols {
            return Err(Error::Shape(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if bits == 0 || bits > MAX_BITS {
            return Err(Error::BadParameter(format!(
                "bit bound must be in 1..={MAX_BITS}, got {bits}"
            )));
        }
        let limit = 1i64 << bits;
        for (k, &value) in entries.iter().enumerate() {
            if value <= -limit || value >= limit {
                return Err(Error::EntryOutOfRange {
                    row: k / cols,
                    col: k % cols,
                    value,
                    bits,
                });
            }
        }
        Ok(WeightMatrix {
            rows,
            cols,
            sense,
            bits,
            w: entries,
        })
    }

    /// Builds a matrix from nested rows.
    pub fn from_rows(rows: &[Vec<i64>], sense: Sense) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Shape("matrix must have at least one row".into()));
        }
        let cols = rows[0].len();
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::Shape(format!(
                    "row {i} has {} entries, expected {cols}",
                    r.len()
                )));
            }
        }
        let flat: Vec<i64> = rows.iter().flatten().copied().collect();
        Self::new(rows.len(), cols, sense, flat)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn entries(&self) -> &[i64] {
        &self.w
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> i64 {
        debug_assert!(i < self.rows && j < self.cols);
        self.w[i * self.cols + j]
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Side length of a square matrix.
    pub fn side(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::Shape(format!(
                "expected a square matrix, got {}x{}",
                self.rows, self.cols
            )))
        }
    }

    pub fn max_abs(&self) -> i64 {
        self.w.iter().map(|e| e.abs()).max().unwrap_or(0)
    }

    /// Same weights with the opposite sense and negated entries.
    ///
    /// Solving the result solves the original: assignments carry over
    /// unchanged and objective values flip sign.
    pub fn negated(&self) -> WeightMatrix {
        let sense = match self.sense {
            Sense::Minimize => Sense::Maximize,
            Sense::Maximize => Sense::Minimize,
        };
        WeightMatrix {
            rows: self.rows,
            cols: self.cols,
            sense,
            bits: self.bits,
            w: self.w.iter().map(|&x| -x).collect(),
        }
    }

    /// Pads a rectangular instance to a square one with zero-cost dummies.
    ///
    /// Padding with zeros preserves the optimum: dummy rows or columns match
    /// for free, so restricting an optimal square matching to the original
    /// rows and columns yields an optimal rectangular matching.
    pub fn balance(&self) -> (WeightMatrix, PadInfo) {
        let side = self.rows.max(self.cols);
        let mut w = vec![0i64; side * side];
        for i in 0..self.rows {
            for j in 0..self.cols {
                w[i * side + j] = self.at(i, j);
            }
        }
        let padded = WeightMatrix {
            rows: side,
            cols: side,
            sense: self.sense,
            bits: self.bits,
            w,
        };
        let info = PadInfo {
            orig_rows: self.rows,
            orig_cols: self.cols,
            side,
        };
        (padded, info)
    }

    /// Rewrites a minimization instance as an equivalent maximization over
    /// nonnegative benefits `M - w` where `M` is the largest weight.
    pub fn to_max_form(&self) -> Result<MaxForm> {
        if self.sense != Sense::Minimize {
            return Err(Error::BadParameter(
                "max-form transform expects a minimization instance".into(),
            ));
        }
        let offset = *self.w.iter().max().expect("matrix is nonempty");
        let benefits: Vec<i64> = self.w.iter().map(|&x| offset - x).collect();
        let max_benefit = benefits.iter().copied().max().unwrap_or(0);
        let matrix = WeightMatrix::with_bits(
            self.rows,
            self.cols,
            Sense::Maximize,
            benefits,
            bits_for(max_benefit),
        )?;
        Ok(MaxForm { matrix, offset })
    }

    /// Explicit inequality-form LP for a square instance.
    ///
    /// Variables are the n^2 cells in row-major order; the 2n constraints
    /// bound each row sum and column sum by one. The constraint matrix is
    /// totally unimodular, so basic solutions are integral and the
    /// relaxation is exact.
    pub fn to_lp(&self) -> Result<LpInstance> {
        let side = self.side()?;
        let n_vars = side * side;
        let mut a = vec![vec![0i64; n_vars]; 2 * side];
        for i in 0..side {
            for j in 0..side {
                a[i][i * side + j] = 1;
                a[side + j][i * side + j] = 1;
            }
        }
        Ok(LpInstance {
            side,
            sense: self.sense,
            objective: self.w.clone(),
            a,
            b: vec![1; 2 * side],
        })
    }

    /// Serializes to the plain text format (`rows cols sense` header).
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.rows, self.cols, self.sense);
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.at(i, j).to_string()).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    /// Serializes to the CSV variant (`rows,cols,sense` header).
    pub fn to_csv(&self) -> String {
        let mut out = format!("{},{},{}\n", self.rows, self.cols, self.sense);
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.at(i, j).to_string()).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Metadata recorded by [`WeightMatrix::balance`], used to undo padding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PadInfo {
    pub orig_rows: usize,
    pub orig_cols: usize,
    pub side: usize,
}

impl PadInfo {
    pub fn is_padded(&self) -> bool {
        self.orig_rows != self.side || self.orig_cols != self.side
    }

    /// Drops dummy pairs from a square assignment and recomputes the cost
    /// on the original rectangular matrix.
    pub fn strip(&self, assignment: &Assignment, original: &WeightMatrix) -> Result<Assignment> {
        if original.rows != self.orig_rows || original.cols != self.orig_cols {
            return Err(Error::Shape(format!(
                "pad info is for a {}x{} matrix, got {}x{}",
                self.orig_rows, self.orig_cols, original.rows, original.cols
            )));
        }
        let pairs: Vec<(usize, usize)> = assignment
            .pairs
            .iter()
            .copied()
            .filter(|&(i, j)| i < self.orig_rows && j < self.orig_cols)
            .collect();
        Assignment::from_pairs(original, pairs)
    }
}

/// A minimization instance rewritten as nonnegative benefits.
#[derive(Debug, Clone)]
pub struct MaxForm {
    pub matrix: WeightMatrix,
    /// The shift `M`: `benefit = M - weight`.
    pub offset: i64,
}

impl MaxForm {
    /// Maps an optimal benefit total back to the original cost.
    pub fn cost_from_benefit(&self, benefit: i64, matched: usize) -> i64 {
        self.offset * matched as i64 - benefit
    }

    /// Maps optimal LP duals `(y_rows, y_cols)` of the benefit instance to
    /// feasible, tight duals of the original minimization instance.
    pub fn duals_from_lp(&self, y_rows: &[i64], y_cols: &[i64]) -> DualSolution {
        DualSolution {
            u: y_rows.iter().map(|&y| self.offset - y).collect(),
            v: y_cols.iter().map(|&y| -y).collect(),
        }
    }
}

/// Inequality-form LP `opt c.x  s.t.  Ax <= b, x >= 0` for a square instance.
#[derive(Debug, Clone)]
pub struct LpInstance {
    pub side: usize,
    pub sense: Sense,
    /// Objective coefficients, one per cell in row-major order.
    pub objective: Vec<i64>,
    /// Constraint matrix: rows `0..side` bound row sums, `side..2*side`
    /// bound column sums. Entries are 0 or 1.
    pub a: Vec<Vec<i64>>,
    pub b: Vec<i64>,
}

impl LpInstance {
    pub fn n_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn n_constraints(&self) -> usize {
        self.a.len()
    }

    /// Variable index of cell `(i, j)`.
    pub fn var(&self, i: usize, j: usize) -> usize {
        i * self.side + j
    }
}

/// A (partial) matching given as `(row, col)` pairs plus its total weight.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Assignment {
    pub pairs: Vec<(usize, usize)>,
    pub cost: i64,
}

impl Assignment {
    /// Builds an assignment from pairs, validating and computing the cost.
    /// Pairs are stored sorted by row.
    pub fn from_pairs(w: &WeightMatrix, mut pairs: Vec<(usize, usize)>) -> Result<Assignment> {
        pairs.sort_unstable();
        let mut used_col = vec![false; w.cols()];
        let mut cost = 0i64;
        let mut last_row = None;
        for &(i, j) in &pairs {
            if i >= w.rows() || j >= w.cols() {
                return Err(Error::Shape(format!(
                    "pair ({i},{j}) is out of bounds for a {}x{} matrix",
                    w.rows(),
                    w.cols()
                )));
            }
            if last_row == Some(i) {
                return Err(Error::Shape(format!("row {i} is matched twice")));
            }
            if used_col[j] {
                return Err(Error::Shape(format!("column {j} is matched twice")));
            }
            used_col[j] = true;
            last_row = Some(i);
            cost += w.at(i, j);
        }
        Ok(Assignment { pairs, cost })
    }

    /// Checks structure against a matrix: pairs in range, rows and columns
    /// pairwise distinct, every row of a square matrix matched, and the
    /// stored cost equal to the recomputed one.
    pub fn validate(&self, w: &WeightMatrix) -> Result<()> {
        let rebuilt = Assignment::from_pairs(w, self.pairs.clone())?;
        if w.is_square() && self.pairs.len() != w.rows() {
            return Err(Error::Shape(format!(
                "square instance needs {} pairs, got {}",
                w.rows(),
                self.pairs.len()
            )));
        }
        if rebuilt.cost != self.cost {
            return Err(Error::Shape(format!(
                "stored cost {} does not match recomputed cost {}",
                self.cost, rebuilt.cost
            )));
        }
        Ok(())
    }

    /// Row-to-column map for a complete square assignment.
    pub fn permutation(&self, side: usize) -> Option<Vec<usize>> {
        if self.pairs.len() != side {
            return None;
        }
        let mut sigma = vec![usize::MAX; side];
        for &(i, j) in &self.pairs {
            if i >= side || j >= side || sigma[i] != usize::MAX {
                return None;
            }
            sigma[i] = j;
        }
        if sigma.iter().any(|&j| j == usize::MAX) {
            return None;
        }
        Some(sigma)
    }
}

/// Row and column duals. For a minimization instance feasibility means
/// `u[i] + v[j] <= w[i][j]` everywhere; for maximization the inequality
/// flips.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct DualSolution {
    pub u: Vec<i64>,
    pub v: Vec<i64>,
}

impl DualSolution {
    pub fn sum(&self) -> i64 {
        self.u.iter().sum::<i64>() + self.v.iter().sum::<i64>()
    }

    /// First dual constraint violated by these duals, if any.
    pub fn first_violation(&self, w: &WeightMatrix) -> Option<(usize, usize)> {
        for i in 0..w.rows() {
            for j in 0..w.cols() {
                let lhs = self.u[i] + self.v[j];
                let bad = match w.sense() {
                    Sense::Minimize => lhs > w.at(i, j),
                    Sense::Maximize => lhs < w.at(i, j),
                };
                if bad {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn is_feasible(&self, w: &WeightMatrix) -> bool {
        self.u.len() == w.rows() && self.v.len() == w.cols() && self.first_violation(w).is_none()
    }

    /// True when every matched pair is tight: `u[i] + v[j] == w[i][j]`.
    pub fn tight_on(&self, w: &WeightMatrix, assignment: &Assignment) -> bool {
        assignment
            .pairs
            .iter()
            .all(|&(i, j)| self.u[i] + self.v[j] == w.at(i, j))
    }
}

/// Parses either text format; the CSV variant is recognized by commas.
///
/// Plain format: a `rows cols sense` header line, then `rows*cols` integers
/// separated by whitespace. `#` starts a comment. CSV: the same header and
/// one comma-separated line per row.
pub fn parse_matrix(text: &str) -> Result<WeightMatrix> {
    let meaningful: Vec<&str> = text
        .lines()
        .map(|l| match l.find('#') {
            Some(pos) => l[..pos].trim(),
            None => l.trim(),
        })
        .filter(|l| !l.is_empty())
        .collect();
    let Some(header) = meaningful.first() else {
        return Err(Error::Parse("empty matrix file".into()));
    };
    let csv = header.contains(',');
    let split = |line: &str| -> Vec<String> {
        if csv {
            line.split(',').map(|t| t.trim().to_string()).collect()
        } else {
            line.split_whitespace().map(str::to_string).collect()
        }
    };
    let head = split(header);
    if head.len() != 3 {
        return Err(Error::Parse(format!(
            "header must be `rows cols sense`, got {header:?}"
        )));
    }
    let rows: usize = head[0]
        .parse()
        .map_err(|_| Error::Parse(format!("bad row count {:?}", head[0])))?;
    let cols: usize = head[1]
        .parse()
        .map_err(|_| Error::Parse(format!("bad column count {:?}", head[1])))?;
    let sense: Sense = head[2].parse()?;
    let mut entries = Vec::with_capacity(rows * cols);
    for line in &meaningful[1..] {
        for tok in split(line) {
            if tok.is_empty() {
                continue;
            }
            let value: i64 = tok
                .parse()
                .map_err(|_| Error::Parse(format!("bad integer {tok:?}")))?;
            entries.push(value);
        }
    }
    if entries.len() != rows * cols {
        return Err(Error::Parse(format!(
            "expected {} entries, found {}",
            rows * cols,
            entries.len()
        )));
    }
    WeightMatrix::new(rows, cols, sense, entries)
}

pub fn read_matrix(path: &Path) -> Result<WeightMatrix> {
    let text = std::fs::read_to_string(path)?;
    parse_matrix(&text)
}

/// Writes the CSV variant when the extension is `.csv`, plain text otherwise.
pub fn write_matrix(path: &Path, w: &WeightMatrix) -> Result<()> {
    let csv = path.extension().is_some_and(|e| e == "csv");
    let text = if csv { w.to_csv() } else { w.to_text() };
    std::fs::write(path, text)?;
    Ok(())
}
