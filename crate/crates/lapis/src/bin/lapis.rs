//! Command-line front end: solving, certification, proving, verification,
//! benchmark grids and the shuffle countermeasure demo.
//!
//! Exit codes: 0 success, 1 usage or input problem, 2 verification failed,
//! 3 solver or internal error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use lapis::bench::{self, GridSpec};
use lapis::certificate::{
    certificate_id, extract_certificate, read_certificate, verify_certificate_clear,
    write_certificate,
};
use lapis::model::read_matrix;
use lapis::mpc::{run_oblivious, McConfig};
use lapis::solvers::OpStats;
use lapis::zk::{
    decode_proof, encode_proof, manifest, prove_optimality, setup_sized, verify_optimality,
    Blindings, Reject,
};
use lapis::{solve, Algorithm, Error, Result, WeightMatrix};

const OUT_DIR_ENV: &str = "LAPIS_OUT_DIR";
const DEFAULT_CONTEXT: &str = "assignment-proof/v1";

#[derive(Parser)]
#[command(
    name = "lapis",
    version,
    about = "Assignment solvers with optimality certificates, commitment-based \
             proofs and a simulated multi-party backend"
)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Solve one instance and print assignment, cost, duals and counters.
    Solve(SolveArgs),
    /// Solve and write the public/witness certificate file pair.
    Certify(CertifyArgs),
    /// Turn a certificate file pair into a serialized optimality proof.
    Prove(ProveArgs),
    /// Check a serialized proof; exits 2 if it does not verify.
    Verify(VerifyArgs),
    /// Run a benchmark grid and emit records as CSV.
    Bench(BenchArgs),
    /// Compare leakage logs of oblivious runs with and without shuffling.
    ShuffleDemo(ShuffleDemoArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Instance source: random, structured, or file.
    #[arg(long, default_value = "random")]
    data: String,
    /// Side length for generated instances.
    #[arg(long, default_value_t = 8)]
    n: usize,
    /// Generator seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Entry bit width for random instances.
    #[arg(long, default_value_t = 16)]
    width: u32,
    /// Matrix file, required with --data file.
    #[arg(long = "in", value_name = "PATH")]
    input: Option<PathBuf>,
}

impl InputArgs {
    fn load(&self) -> Result<WeightMatrix> {
        match self.data.as_str() {
            "file" => {
                let path = self.input.as_ref().ok_or_else(|| {
                    Error::BadParameter("--data file needs --in <PATH>".into())
                })?;
                read_matrix(path)
            }
            "random" => Ok(bench::gen_random(self.n, self.width, self.seed)),
            "structured" => Ok(bench::gen_structured(self.n, self.seed)),
            other => Err(Error::BadParameter(format!(
                "unknown data source {other:?}, expected random, structured or file"
            ))),
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, default_value = "hungarian")]
    algo: String,
    #[command(flatten)]
    input: InputArgs,
}

#[derive(Args)]
struct CertifyArgs {
    #[arg(long, default_value = "hungarian")]
    algo: String,
    #[command(flatten)]
    input: InputArgs,
    /// Output stem; writes <stem>.public.json and <stem>.witness.json.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ProveArgs {
    /// Public certificate file.
    #[arg(long)]
    public: PathBuf,
    /// Witness certificate file.
    #[arg(long)]
    witness: PathBuf,
    /// Proof output path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Generator context label; the verifier must use the same one.
    #[arg(long, default_value = DEFAULT_CONTEXT)]
    label: String,
    /// Range width in bits for committed values and slacks.
    #[arg(long, default_value_t = 16)]
    width: u32,
    /// Blinding seed; omit for fresh system randomness.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Serialized proof file.
    #[arg(long)]
    proof: PathBuf,
    /// Generator context label used at proving time.
    #[arg(long, default_value = DEFAULT_CONTEXT)]
    label: String,
    /// Public certificate file to cross-check the proof statement against.
    #[arg(long)]
    public: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated algorithms, or "all".
    #[arg(long, default_value = "all")]
    algo: String,
    /// Sizes: comma list and/or ranges, e.g. "4,6,8" or "10..50:10".
    #[arg(long, default_value = "4,6,8")]
    n: String,
    /// Comma-separated generator seeds.
    #[arg(long, default_value = "0,1,2")]
    seeds: String,
    /// Comma-separated simulated round-trip latencies in ms.
    #[arg(long, default_value = "0")]
    latency: String,
    /// Input distribution: random or structured.
    #[arg(long, default_value = "random")]
    data: String,
    /// Entry bit width for generated instances.
    #[arg(long, default_value_t = 8)]
    width: u32,
    /// Also run the oblivious backend (and the simplex cost model).
    #[arg(long)]
    mpc: bool,
    /// Rerun oblivious cells under the shuffle countermeasure.
    #[arg(long)]
    shuffle: bool,
    /// Output directory; files land here instead of stdout.
    #[arg(long, env = OUT_DIR_ENV)]
    out: Option<PathBuf>,
    /// Suppress the timestamp header so output is byte-stable.
    #[arg(long)]
    no_timestamp: bool,
    /// Also render the aligned summary tables.
    #[arg(long)]
    tables: bool,
}

#[derive(Args)]
struct ShuffleDemoArgs {
    #[arg(long, default_value = "sap-acm")]
    algo: String,
    #[arg(long, default_value_t = 6)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 8)]
    width: u32,
}

fn main() -> ExitCode {
    // Die quietly when the read end of a pipe closes early, like other
    // line-printing tools.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

/// 1 for anything wrong with flags or input files, 2 when a certificate or
/// proof fails to verify, 3 for solver and internal failures.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::CertificateRejected(_) | Error::ProofRejected(_) | Error::MalformedProof(_) => 2,
        Error::Internal(_) => 3,
        _ => 1,
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.verb {
        Verb::Solve(a) => cmd_solve(a),
        Verb::Certify(a) => cmd_certify(a),
        Verb::Prove(a) => cmd_prove(a),
        Verb::Verify(a) => cmd_verify(a),
        Verb::Bench(a) => cmd_bench(a),
        Verb::ShuffleDemo(a) => cmd_shuffle_demo(a),
    }
}

fn out_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."))
}

fn print_stats(stats: &OpStats) {
    println!(
        "stats     : steps={} comparisons={} zero_tests={} min_finds={} iterations={}",
        stats.steps, stats.comparisons, stats.zero_tests, stats.min_finds, stats.iterations
    );
}

fn cmd_solve(a: SolveArgs) -> Result<()> {
    let algo: Algorithm = a.algo.parse()?;
    let w = a.input.load()?;
    let res = solve(algo, &w)?;
    println!("algorithm : {algo}");
    println!(
        "instance  : {}x{} {}, {}-bit entries",
        w.rows(),
        w.cols(),
        w.sense(),
        w.bits()
    );
    println!("cost      : {}", res.assignment.cost);
    let pairs: Vec<String> = res
        .assignment
        .pairs
        .iter()
        .map(|(i, j)| format!("({i},{j})"))
        .collect();
    println!("assignment: {}", pairs.join(" "));
    println!("u         : {:?}", res.dual.u);
    println!("v         : {:?}", res.dual.v);
    print_stats(&res.stats);
    Ok(())
}

fn cmd_certify(a: CertifyArgs) -> Result<()> {
    let algo: Algorithm = a.algo.parse()?;
    let w = a.input.load()?;
    let res = solve(algo, &w)?;
    let cert = extract_certificate(&w, &res)?;
    verify_certificate_clear(&cert)?;
    let stem = a.out.unwrap_or_else(|| out_dir().join("certificate"));
    let (public, witness) = write_certificate(&cert, &stem)?;
    println!("certificate id: {}", certificate_id(&cert));
    println!("optimum       : {}", cert.optimum);
    println!("public  -> {public}");
    println!("witness -> {witness}");
    Ok(())
}

fn cmd_prove(a: ProveArgs) -> Result<()> {
    let cert = read_certificate(&a.public, &a.witness)?;
    verify_certificate_clear(&cert)?;
    let n = cert.weights.rows();
    let ctx = setup_sized(&a.label, n, a.width);
    let mut rng = match a.seed {
        Some(seed) => ChaCha20Rng::seed_from_u64(seed),
        None => ChaCha20Rng::from_entropy(),
    };
    let blinds = Blindings::random(n, &mut rng);
    let (commitments, proof) = prove_optimality(&ctx, &cert, &blinds, &mut rng)?;
    let bytes = encode_proof(&commitments, &proof);
    let out = a.out.unwrap_or_else(|| out_dir().join("proof.bin"));
    std::fs::write(&out, &bytes)?;
    print!("{}", manifest(&commitments, &proof));
    println!("wrote {} bytes -> {}", bytes.len(), out.display());
    Ok(())
}

fn cmd_verify(a: VerifyArgs) -> Result<()> {
    let bytes = std::fs::read(&a.proof)?;
    let (commitments, proof) = decode_proof(&bytes)?;
    let ctx = setup_sized(&a.label, commitments.n, proof.width);
    verify_optimality(
        &ctx,
        &commitments,
        &proof.assignment,
        proof.optimum,
        &proof,
    )?;
    if let Some(public) = &a.public {
        cross_check_public(public, &commitments.n, &proof.assignment, proof.optimum)?;
        println!("statement matches {}", public.display());
    }
    println!(
        "proof verified: n={}, optimum={}, {} commitments, {} bytes",
        commitments.n,
        proof.optimum,
        commitments.len(),
        bytes.len()
    );
    Ok(())
}

/// Checks that a proof's public statement equals the published certificate
/// (dimensions, assignment and optimum). A mismatch is a verification
/// failure, not an I/O problem.
fn cross_check_public(
    path: &Path,
    n: &usize,
    pairs: &[(usize, usize)],
    optimum: i64,
) -> Result<()> {
    let text = std::fs::read_to_string(path)?;
    let v: serde_json::Value = serde_json::from_str(&text)?;
    let field = |k: &str| {
        v.get(k)
            .cloned()
            .ok_or_else(|| Error::Parse(format!("public file lacks field {k:?}")))
    };
    let rows = field("rows")?.as_u64().unwrap_or(0) as usize;
    let got_opt = field("optimum")?.as_i64().unwrap_or(i64::MIN);
    let got_pairs: Vec<(usize, usize)> = serde_json::from_value(field("pairs")?)?;
    let mismatch = |what: &str| {
        Err(Error::ProofRejected(Reject::Structure(format!(
            "proof statement disagrees with the public certificate on {what}"
        ))))
    };
    if rows != *n {
        return mismatch("the instance size");
    }
    if got_opt != optimum {
        return mismatch("the optimum");
    }
    if got_pairs != pairs {
        return mismatch("the assignment");
    }
    Ok(())
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<T>()
                .map_err(|_| Error::Parse(format!("bad {what} value {t:?}")))
        })
        .collect()
}

/// Sizes accept comma-separated items where each item is a number or an
/// inclusive range "a..b" with optional step "a..b:s".
fn parse_sizes(s: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        if let Some((range, step)) = item
            .split_once(':')
            .map(|(r, s)| (r, Some(s)))
            .or(Some((item, None)))
        {
            if let Some((a, b)) = range.split_once("..") {
                let a: usize = a
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad size {a:?}")))?;
                let b: usize = b
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad size {b:?}")))?;
                let step: usize = match step {
                    Some(s) => s
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad step {s:?}")))?,
                    None => 1,
                };
                if step == 0 || b < a {
                    return Err(Error::Parse(format!("bad size range {item:?}")));
                }
                out.extend((a..=b).step_by(step));
            } else {
                out.push(
                    item.parse()
                        .map_err(|_| Error::Parse(format!("bad size {item:?}")))?,
                );
            }
        }
    }
    if out.is_empty() {
        return Err(Error::Parse("no sizes given".into()));
    }
    Ok(out)
}

fn parse_algorithms(s: &str) -> Result<Vec<Algorithm>> {
    if s == "all" {
        return Ok(Algorithm::ALL.to_vec());
    }
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(str::parse)
        .collect()
}

fn cmd_bench(a: BenchArgs) -> Result<()> {
    let spec = GridSpec {
        algorithms: parse_algorithms(&a.algo)?,
        ns: parse_sizes(&a.n)?,
        seeds: parse_list(&a.seeds, "seed")?,
        latencies_ms: parse_list(&a.latency, "latency")?,
        data: a.data.parse()?,
        width: a.width,
        mpc: a.mpc,
        shuffle: a.shuffle,
    };
    let records = bench::run_grid(&spec)?;
    let stamp = if a.no_timestamp {
        None
    } else {
        Some(format!(
            "unix:{}",
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0)
        ))
    };
    let csv = bench::to_csv(&records, stamp.as_deref());

    let report = if a.tables {
        Some(bench::report_tables(&records)?)
    } else {
        None
    };

    match &a.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            let path = dir.join("bench.csv");
            std::fs::write(&path, &csv)?;
            println!("wrote {} records -> {}", records.len(), path.display());
            if let Some(report) = &report {
                for (name, table_csv) in &report.csvs {
                    let path = dir.join(name);
                    std::fs::write(&path, table_csv)?;
                    println!("wrote table -> {}", path.display());
                }
                print!("{}", report.text);
            }
        }
        None => {
            print!("{csv}");
            if let Some(report) = &report {
                print!("{}", report.text);
            }
        }
    }
    Ok(())
}

fn cmd_shuffle_demo(a: ShuffleDemoArgs) -> Result<()> {
    let algo: Algorithm = a.algo.parse()?;
    let w = bench::gen_random(a.n, a.width, a.seed);
    let clear_cost = solve(algo, &w)?.assignment.cost;
    println!(
        "{algo} on a random {n}x{n} instance (width {}, seed {}), clear optimum {clear_cost}",
        a.width,
        a.seed,
        n = a.n
    );
    println!(
        "{:<10} {:>6} {:>9} {:>8} {:>9} {:>10}  {}",
        "run", "cost", "rounds", "opened", "events", "hygienic", "log digest"
    );
    for (countermeasure, name) in [(false, "plain"), (true, "shuffled")] {
        let cfg = McConfig {
            seed: a.seed,
            ..Default::default()
        };
        let run = run_oblivious(algo, &w, cfg, countermeasure)?;
        if run.result.assignment.cost != clear_cost {
            return Err(Error::Internal(format!(
                "oblivious run returned {} but the clear optimum is {clear_cost}",
                run.result.assignment.cost
            )));
        }
        println!(
            "{:<10} {:>6} {:>9} {:>8} {:>9} {:>10}  {}",
            name,
            run.result.assignment.cost,
            run.cost.rounds,
            run.cost.opened_values,
            run.log.len(),
            if run.log.is_hygienic() { "yes" } else { "no" },
            &run.log.digest()[..16]
        );
    }
    println!(
        "the shuffled log publishes positions of permuted cells only; \
         the plain log pins argmin positions to true matrix cells"
    );
    Ok(())
}
