//! Python view of the assignment toolkit: solving, certification,
//! commitment-based proofs and the simulated oblivious backend.
//!
//! Matrices cross the boundary as `list[list[int]]` with a sense string;
//! proofs are `bytes` in the same serialized format the CLI writes.

use pyo3::exceptions::{PyIOError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyBytes, PyDict};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use lapis::bench;
use lapis::certificate::{
    certificate_id, extract_certificate, parse_certificate, public_json,
    verify_certificate_clear, witness_json,
};
use lapis::model::Sense;
use lapis::mpc::{run_oblivious as run_oblivious_rs, McConfig};
use lapis::solvers::{brute_force as brute_force_rs, solve as solve_rs, Algorithm};
use lapis::zk::{
    decode_proof, encode_proof, prove_optimality, setup_sized, verify_optimality, Blindings,
};
use lapis::{Error, WeightMatrix};

const DEFAULT_CONTEXT: &str = "assignment-proof/v1";

fn pyerr(e: Error) -> PyErr {
    match e {
        Error::Io(_) => PyIOError::new_err(e.to_string()),
        Error::Internal(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn to_matrix(rows: &[Vec<i64>], sense: &str) -> PyResult<WeightMatrix> {
    let sense: Sense = sense.parse().map_err(pyerr)?;
    WeightMatrix::from_rows(rows, sense).map_err(pyerr)
}

fn to_rows(w: &WeightMatrix) -> Vec<Vec<i64>> {
    (0..w.rows())
        .map(|i| (0..w.cols()).map(|j| w.at(i, j)).collect())
        .collect()
}

fn parse_algo(name: &str) -> PyResult<Algorithm> {
    name.parse().map_err(pyerr)
}

/// Optimal assignment plus duals and operation counters.
#[pyclass(frozen)]
struct SolveResult {
    #[pyo3(get)]
    cost: i64,
    #[pyo3(get)]
    pairs: Vec<(usize, usize)>,
    #[pyo3(get)]
    u: Vec<i64>,
    #[pyo3(get)]
    v: Vec<i64>,
    stats: [(&'static str, u64); 5],
}

#[pymethods]
impl SolveResult {
    /// Operation counters as a dict.
    #[getter]
    fn stats<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let d = PyDict::new(py);
        for (k, n) in self.stats {
            d.set_item(k, n)?;
        }
        Ok(d)
    }

    fn __repr__(&self) -> String {
        format!("SolveResult(cost={}, pairs={:?})", self.cost, self.pairs)
    }
}

/// Outcome of a secret-shared run: result, protocol cost, leakage summary.
#[pyclass(frozen)]
struct ObliviousResult {
    #[pyo3(get)]
    cost: i64,
    #[pyo3(get)]
    pairs: Vec<(usize, usize)>,
    #[pyo3(get)]
    rounds: u64,
    #[pyo3(get)]
    opened_values: u64,
    #[pyo3(get)]
    zero_tests: u64,
    #[pyo3(get)]
    comparisons: u64,
    #[pyo3(get)]
    secure_mults: u64,
    #[pyo3(get)]
    min_finds: u64,
    #[pyo3(get)]
    hygienic: bool,
    #[pyo3(get)]
    leakage_digest: String,
    #[pyo3(get)]
    leakage_events: usize,
}

#[pymethods]
impl ObliviousResult {
    /// Modeled time in ms at one microsecond per secure operation plus one
    /// latency charge per communication round.
    fn simulated_ms(&self, latency_ms: f64) -> f64 {
        (self.zero_tests + self.comparisons + self.secure_mults + self.opened_values) as f64
            * 1e-3
            + self.rounds as f64 * latency_ms
    }

    fn __repr__(&self) -> String {
        format!(
            "ObliviousResult(cost={}, rounds={}, hygienic={})",
            self.cost, self.rounds, self.hygienic
        )
    }
}

/// Solve one instance exactly.
#[pyfunction]
#[pyo3(signature = (rows, algorithm = "hungarian", sense = "min"))]
fn solve(rows: Vec<Vec<i64>>, algorithm: &str, sense: &str) -> PyResult<SolveResult> {
    let w = to_matrix(&rows, sense)?;
    let res = solve_rs(parse_algo(algorithm)?, &w).map_err(pyerr)?;
    Ok(SolveResult {
        cost: res.assignment.cost,
        pairs: res.assignment.pairs,
        u: res.dual.u,
        v: res.dual.v,
        stats: [
            ("steps", res.stats.steps),
            ("comparisons", res.stats.comparisons),
            ("zero_tests", res.stats.zero_tests),
            ("min_finds", res.stats.min_finds),
            ("iterations", res.stats.iterations),
        ],
    })
}

/// Exhaustive optimal cost; the oracle the solvers are tested against.
#[pyfunction]
#[pyo3(signature = (rows, sense = "min"))]
fn brute_force_cost(rows: Vec<Vec<i64>>, sense: &str) -> PyResult<i64> {
    let w = to_matrix(&rows, sense)?;
    Ok(brute_force_rs(&w).map_err(pyerr)?.cost)
}

/// Uniform random instance, deterministic per seed.
#[pyfunction]
#[pyo3(signature = (n, width = 16, seed = 0))]
fn gen_random(n: usize, width: u32, seed: u64) -> Vec<Vec<i64>> {
    to_rows(&bench::gen_random(n, width, seed))
}

/// Preferred-slot structured instance, deterministic per seed.
#[pyfunction]
#[pyo3(signature = (n, seed = 0))]
fn gen_structured(n: usize, seed: u64) -> Vec<Vec<i64>> {
    to_rows(&bench::gen_structured(n, seed))
}

/// Solve and emit the certificate pair `(public_json, witness_json)`.
#[pyfunction]
#[pyo3(signature = (rows, algorithm = "hungarian", sense = "min"))]
fn certify(rows: Vec<Vec<i64>>, algorithm: &str, sense: &str) -> PyResult<(String, String)> {
    let w = to_matrix(&rows, sense)?;
    let res = solve_rs(parse_algo(algorithm)?, &w).map_err(pyerr)?;
    let cert = extract_certificate(&w, &res).map_err(pyerr)?;
    verify_certificate_clear(&cert).map_err(pyerr)?;
    Ok((public_json(&cert), witness_json(&cert)))
}

/// Check a certificate pair; returns the certificate id, raises ValueError
/// if any of the four optimality conditions fails.
#[pyfunction]
fn verify_certificate(public_json: &str, witness_json: &str) -> PyResult<String> {
    let cert = parse_certificate(public_json, witness_json).map_err(pyerr)?;
    verify_certificate_clear(&cert).map_err(pyerr)?;
    Ok(certificate_id(&cert))
}

/// Turn a certificate pair into a serialized optimality proof.
#[pyfunction]
#[pyo3(signature = (public_json, witness_json, label = DEFAULT_CONTEXT, width = 16, seed = None))]
fn prove<'py>(
    py: Python<'py>,
    public_json: &str,
    witness_json: &str,
    label: &str,
    width: u32,
    seed: Option<u64>,
) -> PyResult<Bound<'py, PyBytes>> {
    let cert = parse_certificate(public_json, witness_json).map_err(pyerr)?;
    let n = cert.weights.rows();
    let ctx = setup_sized(label, n, width);
    let mut rng = match seed {
        Some(s) => ChaCha20Rng::seed_from_u64(s),
        None => {
            let mut buf = [0u8; 32];
            rand::rngs::OsRng.fill_bytes(&mut buf);
            ChaCha20Rng::from_seed(buf)
        }
    };
    let blinds = Blindings::random(n, &mut rng);
    let (commitments, proof) = prove_optimality(&ctx, &cert, &blinds, &mut rng).map_err(pyerr)?;
    Ok(PyBytes::new(py, &encode_proof(&commitments, &proof)))
}

/// Verify a serialized proof; returns its public statement as a dict,
/// raises ValueError if the transcript is malformed or the statement false.
#[pyfunction]
#[pyo3(signature = (proof_bytes, label = DEFAULT_CONTEXT))]
fn verify_proof<'py>(
    py: Python<'py>,
    proof_bytes: &[u8],
    label: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let (commitments, proof) = decode_proof(proof_bytes).map_err(pyerr)?;
    let ctx = setup_sized(label, commitments.n, proof.width);
    verify_optimality(&ctx, &commitments, &proof.assignment, proof.optimum, &proof)
        .map_err(pyerr)?;
    let d = PyDict::new(py);
    d.set_item("n", commitments.n)?;
    d.set_item("optimum", proof.optimum)?;
    d.set_item("pairs", &proof.assignment)?;
    d.set_item("width", proof.width)?;
    d.set_item("commitments", commitments.len())?;
    Ok(d)
}

/// Solve over secret-shared weights on the simulated three-party runtime.
#[pyfunction]
#[pyo3(signature = (rows, algorithm = "sap-acm", sense = "min", seed = 0, shuffle = false))]
fn run_oblivious(
    rows: Vec<Vec<i64>>,
    algorithm: &str,
    sense: &str,
    seed: u64,
    shuffle: bool,
) -> PyResult<ObliviousResult> {
    let w = to_matrix(&rows, sense)?;
    let cfg = McConfig {
        seed,
        ..Default::default()
    };
    let run = run_oblivious_rs(parse_algo(algorithm)?, &w, cfg, shuffle).map_err(pyerr)?;
    Ok(ObliviousResult {
        cost: run.result.assignment.cost,
        pairs: run.result.assignment.pairs,
        rounds: run.cost.rounds,
        opened_values: run.cost.opened_values,
        zero_tests: run.cost.zero_tests,
        comparisons: run.cost.comparisons,
        secure_mults: run.cost.secure_mults,
        min_finds: run.cost.min_finds,
        hygienic: run.log.is_hygienic(),
        leakage_digest: run.log.digest(),
        leakage_events: run.log.len(),
    })
}

#[pymodule]
fn lapis_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<SolveResult>()?;
    m.add_class::<ObliviousResult>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force_cost, m)?)?;
    m.add_function(wrap_pyfunction!(gen_random, m)?)?;
    m.add_function(wrap_pyfunction!(gen_structured, m)?)?;
    m.add_function(wrap_pyfunction!(certify, m)?)?;
    m.add_function(wrap_pyfunction!(verify_certificate, m)?)?;
    m.add_function(wrap_pyfunction!(prove, m)?)?;
    m.add_function(wrap_pyfunction!(verify_proof, m)?)?;
    m.add_function(wrap_pyfunction!(run_oblivious, m)?)?;
    m.add("ALGORITHMS", vec!["hungarian", "sap-acm", "sap-jv", "auction", "simplex"])?;
    m.add("DEFAULT_CONTEXT", DEFAULT_CONTEXT)?;
    Ok(())
}
