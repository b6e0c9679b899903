//! LP-duality optimality certificates and their cleartext verification.
//!
//! A certificate pairs the public outcome of a solve (assignment and
//! optimum) with the private witness that proves it optimal (the weights
//! and a feasible dual solution whose value meets the optimum). Checking
//! it is O(n^2) and needs no solver: weak duality makes any matching of
//! cost `sum(u) + sum(v)` optimal.

use std::fmt;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::model::{Sense, WeightMatrix};
use crate::solvers::SolverResult;
use crate::{Assignment, DualSolution, Error, Result};

/// Public statement plus private witness.
#[derive(Debug, Clone)]
pub struct OptimalityCertificate {
    /// Private witness: the instance itself.
    pub weights: WeightMatrix,
    /// Public: the claimed optimal matching.
    pub assignment: Assignment,
    /// Private witness: feasible duals that meet the optimum.
    pub dual: DualSolution,
    /// Public: the claimed optimal value.
    pub optimum: i64,
}

/// First failed verification condition, in checking order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// Condition 1: the optimum is not the weight sum over the pairs.
    CostMismatch { claimed: i64, actual: i64 },
    /// Condition 2: the pairs do not form a complete matching.
    BadStructure { reason: String },
    /// Condition 3: the dual value misses the optimum.
    DualSumMismatch { dual_sum: i64, optimum: i64 },
    /// Condition 4: a dual constraint is violated, reported at the first
    /// offending cell in row-major order.
    DualInfeasible { i: usize, j: usize, lhs: i64, w: i64 },
}

impl Violation {
    /// Index of the violated condition, 1 through 4.
    pub fn condition(&self) -> u8 {
        match self {
            Violation::CostMismatch { .. } => 1,
            Violation::BadStructure { .. } => 2,
            Violation::DualSumMismatch { .. } => 3,
            Violation::DualInfeasible { .. } => 4,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::CostMismatch { claimed, actual } => write!(
                f,
                "condition 1: claimed optimum {claimed} but the pairs sum to {actual}"
            ),
            Violation::BadStructure { reason } => {
                write!(f, "condition 2: assignment is not a complete matching: {reason}")
            }
            Violation::DualSumMismatch { dual_sum, optimum } => write!(
                f,
                "condition 3: dual value {dual_sum} does not equal the optimum {optimum}"
            ),
            Violation::DualInfeasible { i, j, lhs, w } => write!(
                f,
                "condition 4: dual constraint violated at ({i},{j}): u+v = {lhs} vs weight {w}"
            ),
        }
    }
}

/// Bundles a solver result into a certificate, refusing if the result does
/// not actually certify (which would indicate a solver bug).
pub fn extract_certificate(w: &WeightMatrix, result: &SolverResult) -> Result<OptimalityCertificate> {
    let cert = OptimalityCertificate {
        weights: w.clone(),
        assignment: result.assignment.clone(),
        dual: result.dual.clone(),
        optimum: result.assignment.cost,
    };
    verify_certificate_clear(&cert)?;
    Ok(cert)
}

/// Checks the four optimality conditions in order and reports the first
/// violation:
///
/// 1. the optimum equals the weight sum over the assignment pairs,
/// 2. the pairs form a complete matching (row/column-disjoint, in range),
/// 3. the dual value `sum(u) + sum(v)` equals the optimum,
/// 4. the duals are feasible on all cells (`u[i] + v[j] <= w[i][j]` when
///    minimizing, flipped when maximizing).
pub fn verify_certificate_clear(cert: &OptimalityCertificate) -> Result<()> {
    let w = &cert.weights;
    if cert.dual.u.len() != w.rows() || cert.dual.v.len() != w.cols() {
        return Err(Error::CertificateShape(format!(
            "dual has {}+{} entries for a {}x{} matrix",
            cert.dual.u.len(),
            cert.dual.v.len(),
            w.rows(),
            w.cols()
        )));
    }

    let reject = |v: Violation| Err(Error::CertificateRejected(v));

    // Condition 1: claimed optimum vs recomputed pair sum. Out-of-range
    // pairs are a structure problem, so they defer to condition 2.
    let in_range = cert
        .assignment
        .pairs
        .iter()
        .all(|&(i, j)| i < w.rows() && j < w.cols());
    if in_range {
        let actual: i64 = cert.assignment.pairs.iter().map(|&(i, j)| w.at(i, j)).sum();
        if actual != cert.optimum || cert.assignment.cost != cert.optimum {
            return reject(Violation::CostMismatch {
                claimed: cert.optimum,
                actual,
            });
        }
    }

    // Condition 2: complete matching.
    if let Err(e) = Assignment::from_pairs(w, cert.assignment.pairs.clone()) {
        return reject(Violation::BadStructure {
            reason: e.to_string(),
        });
    }
    let want = w.rows().min(w.cols());
    if cert.assignment.pairs.len() != want {
        return reject(Violation::BadStructure {
            reason: format!(
                "{} pairs, but a complete matching has {want}",
                cert.assignment.pairs.len()
            ),
        });
    }

    // Condition 3: dual value meets the optimum.
    let dual_sum = cert.dual.sum();
    if dual_sum != cert.optimum {
        return reject(Violation::DualSumMismatch {
            dual_sum,
            optimum: cert.optimum,
        });
    }

    // Condition 4: dual feasibility everywhere.
    if let Some((i, j)) = cert.dual.first_violation(w) {
        return reject(Violation::DualInfeasible {
            i,
            j,
            lhs: cert.dual.u[i] + cert.dual.v[j],
            w: w.at(i, j),
        });
    }
    Ok(())
}

/// The pairs on which the dual constraints hold with equality.
///
/// For a valid certificate this is exactly the assignment: feasibility
/// plus `sum(u) + sum(v) = cost` forces zero slack on every matched pair.
/// A pair with nonzero slack therefore means the certificate is malformed.
pub fn tight_edge_set(cert: &OptimalityCertificate) -> Result<Vec<(usize, usize)>> {
    for &(i, j) in &cert.assignment.pairs {
        if i >= cert.weights.rows() || j >= cert.weights.cols() {
            return Err(Error::CertificateShape(format!(
                "pair ({i},{j}) is out of range"
            )));
        }
        let slack = cert.weights.at(i, j) - cert.dual.u[i] - cert.dual.v[j];
        if slack != 0 {
            return Err(Error::CertificateShape(format!(
                "pair ({i},{j}) has nonzero slack {slack}"
            )));
        }
    }
    Ok(cert.assignment.pairs.clone())
}

#[derive(serde::Serialize, serde::Deserialize)]
struct PublicJson {
    format: String,
    rows: usize,
    cols: usize,
    sense: String,
    optimum: i64,
    pairs: Vec<(usize, usize)>,
}

#[derive(serde::Serialize, serde::Deserialize)]
struct WitnessJson {
    format: String,
    certificate_id: String,
    weights: Vec<i64>,
    u: Vec<i64>,
    v: Vec<i64>,
}

const PUBLIC_FORMAT: &str = "assignment-certificate-public/v1";
const WITNESS_FORMAT: &str = "assignment-certificate-witness/v1";

fn public_struct(cert: &OptimalityCertificate) -> PublicJson {
    PublicJson {
        format: PUBLIC_FORMAT.into(),
        rows: cert.weights.rows(),
        cols: cert.weights.cols(),
        sense: cert.weights.sense().to_string(),
        optimum: cert.optimum,
        pairs: cert.assignment.pairs.clone(),
    }
}

/// Canonical JSON of the public part (assignment and optimum only).
pub fn public_json(cert: &OptimalityCertificate) -> String {
    serde_json::to_string_pretty(&public_struct(cert)).expect("plain data serializes")
}

/// Certificate identifier: hash of the canonical public part.
pub fn certificate_id(cert: &OptimalityCertificate) -> String {
    let compact = serde_json::to_string(&public_struct(cert)).expect("plain data serializes");
    hex::encode(Sha256::digest(compact.as_bytes()))
}

/// JSON of the private witness, tagged with the certificate id.
pub fn witness_json(cert: &OptimalityCertificate) -> String {
    let w = WitnessJson {
        format: WITNESS_FORMAT.into(),
        certificate_id: certificate_id(cert),
        weights: cert.weights.entries().to_vec(),
        u: cert.dual.u.clone(),
        v: cert.dual.v.clone(),
    };
    serde_json::to_string_pretty(&w).expect("plain data serializes")
}

/// Writes `<stem>.public.json` and `<stem>.witness.json`.
pub fn write_certificate(cert: &OptimalityCertificate, stem: &Path) -> Result<(String, String)> {
    let public_path = stem.with_extension("public.json");
    let witness_path = stem.with_extension("witness.json");
    std::fs::write(&public_path, public_json(cert))?;
    std::fs::write(&witness_path, witness_json(cert))?;
    Ok((
        public_path.to_string_lossy().into_owned(),
        witness_path.to_string_lossy().into_owned(),
    ))
}

/// Reads a certificate back from its two files, checking that the witness
/// matches the public part (by id) and the declared dimensions.
pub fn read_certificate(public_path: &Path, witness_path: &Path) -> Result<OptimalityCertificate> {
    let pub_text = std::fs::read_to_string(public_path)?;
    let wit_text = std::fs::read_to_string(witness_path)?;
    parse_certificate(&pub_text, &wit_text)
}

/// [`read_certificate`] on in-memory JSON instead of files.
pub fn parse_certificate(pub_text: &str, wit_text: &str) -> Result<OptimalityCertificate> {
    let p: PublicJson = serde_json::from_str(pub_text)?;
    let wjson: WitnessJson = serde_json::from_str(wit_text)?;
    if p.format != PUBLIC_FORMAT {
        return Err(Error::Parse(format!("unknown public format {:?}", p.format)));
    }
    if wjson.format != WITNESS_FORMAT {
        return Err(Error::Parse(format!(
            "unknown witness format {:?}",
            wjson.format
        )));
    }
    let sense: Sense = p.sense.parse()?;
    let weights = WeightMatrix::new(p.rows, p.cols, sense, wjson.weights)?;
    let cert = OptimalityCertificate {
        assignment: Assignment {
            pairs: p.pairs,
            cost: p.optimum,
        },
        optimum: p.optimum,
        dual: DualSolution {
            u: wjson.u,
            v: wjson.v,
        },
        weights,
    };
    let expect_id = certificate_id(&cert);
    if wjson.certificate_id != expect_id {
        return Err(Error::Parse(format!(
            "witness is for certificate {} but the public part hashes to {expect_id}",
            wjson.certificate_id
        )));
    }
    Ok(cert)
}
