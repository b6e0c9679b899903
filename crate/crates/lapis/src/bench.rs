//! Problem generators, the benchmark grid, and table rendering.
//!
//! Benchmark output is deterministic by construction: the `runtime_ms`
//! column is a counted-operation model (one microsecond per elementary
//! secure operation, plus `rounds * latency` for oblivious runs), never a
//! wall clock. Identical flags and seeds therefore give byte-identical
//! CSV, and latency sweeps are exactly affine per cell.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::model::{Sense, WeightMatrix};
use crate::mpc::{run_oblivious, CostModel, McConfig};
use crate::solvers::{brute_force, solve, Algorithm, OpStats};
use crate::{Error, Result};

/// Input distribution of a bench cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum DataKind {
    Random,
    Structured,
}

impl fmt::Display for DataKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DataKind::Random => write!(f, "random"),
            DataKind::Structured => write!(f, "structured"),
        }
    }
}

impl FromStr for DataKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(DataKind::Random),
            "structured" => Ok(DataKind::Structured),
            other => Err(Error::Parse(format!(
                "unknown data kind {other:?}, expected \"random\" or \"structured\""
            ))),
        }
    }
}

/// One measured cell. CSV columns follow the field order exactly.
#[derive(Debug, Clone)]
pub struct BenchRecord {
    pub algorithm: String,
    pub n: usize,
    pub data: DataKind,
    pub seed: u64,
    pub runtime_ms: f64,
    pub rounds: u64,
    pub zero_tests: u64,
    pub min_finds: u64,
    pub iterations: u64,
    pub latency_ms: f64,
}

pub const CSV_HEADER: &str =
    "algorithm,n,data,seed,runtime_ms,rounds,zero_tests,min_finds,iterations,latency_ms";

impl BenchRecord {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{:.3},{},{},{},{},{:.1}",
            self.algorithm,
            self.n,
            self.data,
            self.seed,
            self.runtime_ms,
            self.rounds,
            self.zero_tests,
            self.min_finds,
            self.iterations,
            self.latency_ms
        )
    }
}

/// Uniform i.i.d. entries in `[0, 2^width)`, deterministic per seed.
pub fn gen_random(n: usize, width: u32, seed: u64) -> WeightMatrix {
    let mut rng = ChaCha20Rng::seed_from_u64(seed ^ 0x8e11_ba5e_0000_0000);
    let entries: Vec<i64> = (0..n * n).map(|_| rng.gen_range(0..(1i64 << width))).collect();
    WeightMatrix::with_bits(n, n, Sense::Minimize, entries, width).expect("entries fit the width")
}

const STRUCT_SLOPE: i64 = 10;
const STRUCT_NOISE: i64 = 4;

/// Structured proxy instances: each row has a preferred column and costs
/// grow with distance from it, plus small noise. This is a stand-in
/// distribution for slot-preference workloads, not measured data; the
/// noise amplitude stays below the slope so the row minimum is always at
/// the preferred column.
pub fn gen_structured(n: usize, seed: u64) -> WeightMatrix {
    let mut rng = ChaCha20Rng::seed_from_u64(seed ^ 0x57a6_c7a2_0000_0000);
    let mut entries = Vec::with_capacity(n * n);
    for _ in 0..n {
        let pref = rng.gen_range(0..n) as i64;
        for j in 0..n as i64 {
            entries.push(STRUCT_SLOPE * (j - pref).abs() + rng.gen_range(0..=STRUCT_NOISE));
        }
    }
    let max = entries.iter().copied().max().unwrap_or(1).max(1);
    let bits = 64 - (max as u64).leading_zeros();
    WeightMatrix::with_bits(n, n, Sense::Minimize, entries, bits).expect("entries fit the bound")
}

/// Milliseconds for a cleartext run under the unit-cost operation model.
pub fn clear_runtime_ms(stats: &OpStats) -> f64 {
    (stats.steps + stats.zero_tests + stats.comparisons + stats.min_finds) as f64 * 1e-3
}

/// Milliseconds for an oblivious run: counted secure operations at one
/// microsecond each, plus one latency charge per communication round.
pub fn mpc_runtime_ms(cost: &CostModel, latency_ms: f64) -> f64 {
    secure_ops(cost) as f64 * 1e-3 + cost.rounds as f64 * latency_ms
}

/// Elementary secure operations: zero tests, masked comparisons, secure
/// multiplications and openings. Aggregates (min-finds) are excluded so
/// nothing is double counted.
pub fn secure_ops(cost: &CostModel) -> u64 {
    cost.zero_tests + cost.comparisons + cost.secure_mults + cost.opened_values
}

/// The single scalar used for cross-algorithm cost comparisons: rounds
/// plus counted secure operations, each an elementary protocol event.
pub fn composite_cost(cost: &CostModel) -> u64 {
    cost.rounds + secure_ops(cost)
}

/// Cost model for a fully oblivious dense-tableau simplex, derived from a
/// cleartext run's pivot count. The oblivious runtime does not drive
/// simplex, so this is a model, and a deliberately conservative one: per
/// pivot it charges an entering-variable tournament over all columns, a
/// ratio-test tournament over the rows, one batched tableau elimination,
/// and the opened tournament bits; operand-width growth from fraction-free
/// pivoting is ignored, which only undercounts.
pub fn simplex_secure_model(n: usize, pivots: u64) -> CostModel {
    let cols = (n * n + 2 * n) as u64;
    let rows = 2 * n as u64;
    let log2 = |x: u64| 64 - (x.max(2) - 1).leading_zeros() as u64;
    let mut c = CostModel::default();
    c.comparisons = pivots * (cols - 1 + rows - 1);
    c.secure_mults = pivots * (rows + 1) * (cols + 1);
    c.opened_values = pivots * (log2(cols) + log2(rows));
    c.rounds = pivots * (3 * (log2(cols) + log2(rows)) + 1);
    c
}

/// What to run: the full cross product of algorithms, sizes and seeds,
/// with a latency sweep for the oblivious cells.
#[derive(Debug, Clone)]
pub struct GridSpec {
    pub algorithms: Vec<Algorithm>,
    pub ns: Vec<usize>,
    pub seeds: Vec<u64>,
    pub latencies_ms: Vec<f64>,
    pub data: DataKind,
    pub width: u32,
    /// Also run each non-simplex algorithm obliviously (simplex gets the
    /// modeled cost) at every latency.
    pub mpc: bool,
    /// Additionally rerun the oblivious cells under the shuffle
    /// countermeasure.
    pub shuffle: bool,
}

fn generate(data: DataKind, n: usize, width: u32, seed: u64) -> WeightMatrix {
    match data {
        DataKind::Random => gen_random(n, width, seed),
        DataKind::Structured => gen_structured(n, seed),
    }
}

/// Run the grid. Every cell is checked for cross-algorithm cost agreement,
/// and against the brute-force oracle for n <= 8; a mismatch aborts the
/// whole run, since it means a solver bug.
pub fn run_grid(spec: &GridSpec) -> Result<Vec<BenchRecord>> {
    if spec.algorithms.is_empty() || spec.ns.is_empty() || spec.seeds.is_empty() {
        return Err(Error::BadParameter(
            "bench grid needs at least one algorithm, size and seed".into(),
        ));
    }
    let latencies = if spec.latencies_ms.is_empty() {
        vec![0.0]
    } else {
        spec.latencies_ms.clone()
    };
    let mut records = Vec::new();

    for &n in &spec.ns {
        for &seed in &spec.seeds {
            let w = generate(spec.data, n, spec.width, seed);
            let oracle = if n <= 8 {
                Some(brute_force(&w)?.cost)
            } else {
                None
            };
            let mut agreed: Option<i64> = None;
            for &algo in &spec.algorithms {
                let res = solve(algo, &w)?;
                let cost = res.assignment.cost;
                if let Some(oc) = oracle {
                    if cost != oc {
                        return Err(Error::Internal(format!(
                            "{algo} returned {cost} but the oracle says {oc} \
                             (n={n}, seed={seed}, {} data)",
                            spec.data
                        )));
                    }
                }
                match agreed {
                    None => agreed = Some(cost),
                    Some(c) if c != cost => {
                        return Err(Error::Internal(format!(
                            "{algo} returned {cost}, other solvers {c} \
                             (n={n}, seed={seed}, {} data)",
                            spec.data
                        )));
                    }
                    _ => {}
                }
                records.push(BenchRecord {
                    algorithm: algo.name().to_string(),
                    n,
                    data: spec.data,
                    seed,
                    runtime_ms: clear_runtime_ms(&res.stats),
                    rounds: 0,
                    zero_tests: res.stats.zero_tests,
                    min_finds: res.stats.min_finds,
                    iterations: res.stats.iterations,
                    latency_ms: 0.0,
                });

                if !spec.mpc {
                    continue;
                }
                if algo == Algorithm::Simplex {
                    let model = simplex_secure_model(n, res.stats.iterations);
                    for &lat in &latencies {
                        records.push(BenchRecord {
                            algorithm: "simplex-model".into(),
                            n,
                            data: spec.data,
                            seed,
                            runtime_ms: mpc_runtime_ms(&model, lat),
                            rounds: model.rounds,
                            zero_tests: model.zero_tests,
                            min_finds: res.stats.min_finds,
                            iterations: res.stats.iterations,
                            latency_ms: lat,
                        });
                    }
                    continue;
                }
                let variants: &[(bool, &str)] = if spec.shuffle {
                    &[(false, "-mpc"), (true, "-mpc+shuffle")]
                } else {
                    &[(false, "-mpc")]
                };
                for &(shuffled, suffix) in variants {
                    let cfg = McConfig {
                        seed,
                        ..Default::default()
                    };
                    let run = match run_oblivious(algo, &w, cfg, shuffled) {
                        Ok(run) => run,
                        // Price scaling can push an algorithm's masked
                        // comparisons past the field's bit budget at the
                        // requested width; such cells run clear only.
                        Err(Error::BitBudget { .. }) => continue,
                        Err(e) => return Err(e),
                    };
                    if run.result.assignment.cost != agreed.unwrap() {
                        return Err(Error::Internal(format!(
                            "oblivious {algo} returned {} but the clear cost is {} \
                             (n={n}, seed={seed})",
                            run.result.assignment.cost,
                            agreed.unwrap()
                        )));
                    }
                    for &lat in &latencies {
                        records.push(BenchRecord {
                            algorithm: format!("{}{suffix}", algo.name()),
                            n,
                            data: spec.data,
                            seed,
                            runtime_ms: mpc_runtime_ms(&run.cost, lat),
                            rounds: run.cost.rounds,
                            zero_tests: run.cost.zero_tests,
                            min_finds: run.cost.min_finds,
                            iterations: run.result.stats.iterations,
                            latency_ms: lat,
                        });
                    }
                }
            }
        }
    }
    sort_records(&mut records);
    Ok(records)
}

fn sort_records(records: &mut [BenchRecord]) {
    records.sort_by(|a, b| {
        (&a.algorithm, a.data, a.n, a.seed)
            .cmp(&(&b.algorithm, b.data, b.n, b.seed))
            .then(a.latency_ms.total_cmp(&b.latency_ms))
    });
}

/// Render records as CSV. The timestamp header line is optional so that
/// output can be byte-identical across runs.
pub fn to_csv(records: &[BenchRecord], timestamp: Option<&str>) -> String {
    let mut out = String::new();
    if let Some(ts) = timestamp {
        out.push_str(&format!("# generated {ts}\n"));
    }
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

/// Parsed-back view of [`to_csv`] output (used by the CLI to re-render
/// tables from a stored CSV).
pub fn from_csv(text: &str) -> Result<Vec<BenchRecord>> {
    let mut records = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line == CSV_HEADER {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 10 {
            return Err(Error::Parse(format!("bad bench row {line:?}")));
        }
        let num = |s: &str| -> Result<u64> {
            s.parse().map_err(|_| Error::Parse(format!("bad count {s:?}")))
        };
        let fl = |s: &str| -> Result<f64> {
            s.parse().map_err(|_| Error::Parse(format!("bad number {s:?}")))
        };
        records.push(BenchRecord {
            algorithm: f[0].to_string(),
            n: num(f[1])? as usize,
            data: f[2].parse()?,
            seed: num(f[3])?,
            runtime_ms: fl(f[4])?,
            rounds: num(f[5])?,
            zero_tests: num(f[6])?,
            min_finds: num(f[7])?,
            iterations: num(f[8])?,
            latency_ms: fl(f[9])?,
        });
    }
    Ok(records)
}

/// Aligned text plus one CSV per table.
#[derive(Debug)]
pub struct Report {
    pub text: String,
    pub csvs: Vec<(String, String)>,
}

type GroupKey = (String, DataKind);

fn check_grid(records: &[BenchRecord]) -> Result<BTreeMap<GroupKey, Vec<&BenchRecord>>> {
    if records.is_empty() {
        return Err(Error::BadParameter("no bench records to report".into()));
    }
    let mut groups: BTreeMap<GroupKey, Vec<&BenchRecord>> = BTreeMap::new();
    for r in records {
        groups
            .entry((r.algorithm.clone(), r.data))
            .or_default()
            .push(r);
    }
    let mut missing = Vec::new();
    for ((algo, data), rows) in &groups {
        let mut ns: Vec<usize> = rows.iter().map(|r| r.n).collect();
        let mut seeds: Vec<u64> = rows.iter().map(|r| r.seed).collect();
        let mut lats: Vec<u64> = rows.iter().map(|r| r.latency_ms.to_bits()).collect();
        for v in [&mut ns] {
            v.sort_unstable();
            v.dedup();
        }
        seeds.sort_unstable();
        seeds.dedup();
        lats.sort_unstable();
        lats.dedup();
        for &n in &ns {
            for &seed in &seeds {
                for &lat in &lats {
                    let lat = f64::from_bits(lat);
                    if !rows.iter().any(|r| {
                        r.n == n && r.seed == seed && r.latency_ms.to_bits() == lat.to_bits()
                    }) {
                        missing.push(format!(
                            "{algo}/{data} n={n} seed={seed} latency={lat}"
                        ));
                    }
                }
            }
        }
    }
    if !missing.is_empty() {
        missing.truncate(12);
        return Err(Error::BadParameter(format!(
            "incomplete bench grid, missing cells: {}",
            missing.join("; ")
        )));
    }
    Ok(groups)
}

fn mean<I: Iterator<Item = f64>>(it: I) -> f64 {
    let (mut sum, mut k) = (0.0, 0usize);
    for x in it {
        sum += x;
        k += 1;
    }
    if k == 0 {
        0.0
    } else {
        sum / k as f64
    }
}

/// Build the report tables: one operation-count table per algorithm
/// (columns n / steps / time / iszero / min), a latency sweep table per
/// oblivious algorithm, and a shuffle-overhead table when both plain and
/// shuffled oblivious records are present. Rows ascend in n; values are
/// means over seeds. Errors on an empty or incomplete grid.
pub fn report_tables(records: &[BenchRecord]) -> Result<Report> {
    let groups = check_grid(records)?;
    let mut text = String::new();
    let mut csvs = Vec::new();

    for ((algo, data), rows) in &groups {
        let mut ns: Vec<usize> = rows.iter().map(|r| r.n).collect();
        ns.sort_unstable();
        ns.dedup();
        let mut lats: Vec<f64> = rows.iter().map(|r| r.latency_ms).collect();
        lats.sort_by(f64::total_cmp);
        lats.dedup_by(|a, b| a.to_bits() == b.to_bits());
        let base_lat = lats[0];

        text.push_str(&format!("== {algo} on {data} data ==\n"));
        text.push_str(&format!(
            "{:>6} {:>12} {:>12} {:>10} {:>8} {:>8}\n",
            "n", "iterations", "time_ms", "iszero", "min", "rounds"
        ));
        let mut csv = String::from("n,iterations,time_ms,zero_tests,min_finds,rounds\n");
        for &n in &ns {
            let cell: Vec<&&BenchRecord> = rows
                .iter()
                .filter(|r| r.n == n && r.latency_ms.to_bits() == base_lat.to_bits())
                .collect();
            let iters = mean(cell.iter().map(|r| r.iterations as f64));
            let time = mean(cell.iter().map(|r| r.runtime_ms));
            let iszero = mean(cell.iter().map(|r| r.zero_tests as f64));
            let minf = mean(cell.iter().map(|r| r.min_finds as f64));
            let rounds = mean(cell.iter().map(|r| r.rounds as f64));
            text.push_str(&format!(
                "{n:>6} {iters:>12.1} {time:>12.3} {iszero:>10.1} {minf:>8.1} {rounds:>8.1}\n"
            ));
            csv.push_str(&format!(
                "{n},{iters:.1},{time:.3},{iszero:.1},{minf:.1},{rounds:.1}\n"
            ));
        }
        text.push('\n');
        csvs.push((format!("{algo}-{data}.csv"), csv));

        if lats.len() > 1 {
            text.push_str(&format!(
                "== {algo} on {data} data: simulated ms by latency ==\n"
            ));
            let mut header = format!("{:>6}", "n");
            let mut csv = String::from("n");
            for &l in &lats {
                header.push_str(&format!(" {:>11}", format!("L={l}ms")));
                csv.push_str(&format!(",latency_{l}ms"));
            }
            text.push_str(&header);
            text.push('\n');
            csv.push('\n');
            for &n in &ns {
                let mut line = format!("{n:>6}");
                let mut row = format!("{n}");
                for &l in &lats {
                    let t = mean(
                        rows.iter()
                            .filter(|r| r.n == n && r.latency_ms.to_bits() == l.to_bits())
                            .map(|r| r.runtime_ms),
                    );
                    line.push_str(&format!(" {t:>11.3}"));
                    row.push_str(&format!(",{t:.3}"));
                }
                text.push_str(&line);
                text.push('\n');
                csv.push_str(&row);
                csv.push('\n');
            }
            text.push('\n');
            csvs.push((format!("{algo}-{data}-latency.csv"), csv));
        }
    }

    // Shuffle overhead, where both variants exist.
    let shuffled: Vec<&GroupKey> = groups
        .keys()
        .filter(|(a, _)| a.ends_with("-mpc+shuffle"))
        .collect();
    if !shuffled.is_empty() {
        text.push_str("== shuffle countermeasure overhead (latency 0, op-model ms) ==\n");
        text.push_str(&format!(
            "{:<22} {:>6} {:>10} {:>14} {:>10} {:>14}\n",
            "algorithm", "n", "rounds", "rounds+shuf", "time_ms", "time+shuf"
        ));
        let mut csv =
            String::from("algorithm,n,rounds,rounds_shuffled,time_ms,time_ms_shuffled\n");
        for key in shuffled {
            let base_key = (key.0.replace("+shuffle", ""), key.1);
            let Some(base) = groups.get(&base_key) else {
                continue;
            };
            let shuf = &groups[key];
            let mut ns: Vec<usize> = shuf.iter().map(|r| r.n).collect();
            ns.sort_unstable();
            ns.dedup();
            for &n in &ns {
                let pick = |rows: &Vec<&BenchRecord>, f: fn(&BenchRecord) -> f64| {
                    mean(
                        rows.iter()
                            .filter(|r| r.n == n && r.latency_ms == 0.0)
                            .map(|r| f(r)),
                    )
                };
                let r0 = pick(base, |r| r.rounds as f64);
                let r1 = pick(shuf, |r| r.rounds as f64);
                let t0 = pick(base, |r| r.runtime_ms);
                let t1 = pick(shuf, |r| r.runtime_ms);
                text.push_str(&format!(
                    "{:<22} {n:>6} {r0:>10.1} {r1:>14.1} {t0:>10.3} {t1:>14.3}\n",
                    base_key.0
                ));
                csv.push_str(&format!(
                    "{},{n},{r0:.1},{r1:.1},{t0:.3},{t1:.3}\n",
                    base_key.0
                ));
            }
        }
        text.push('\n');
        csvs.push(("shuffle-overhead.csv".into(), csv));
    }

    Ok(Report { text, csvs })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_generator_is_deterministic_and_bounded() {
        let a = gen_random(10, 16, 7);
        let b = gen_random(10, 16, 7);
        assert_eq!(a, b);
        assert!(a.entries().iter().all(|&e| (0..65536).contains(&e)));
        assert_ne!(a, gen_random(10, 16, 8));
    }

    #[test]
    fn random_entry_mean_is_near_half_range() {
        let w = gen_random(100, 16, 42);
        let mean = w.entries().iter().sum::<i64>() as f64 / (100.0 * 100.0);
        let target = 32767.5;
        assert!(
            (mean - target).abs() < 0.05 * target,
            "mean {mean} strays from {target}"
        );
    }

    #[test]
    fn structured_rows_prefer_one_slot() {
        let w = gen_structured(12, 3);
        for i in 0..12 {
            let row: Vec<i64> = (0..12).map(|j| w.at(i, j)).collect();
            let pref = (0..12).min_by_key(|&j| row[j]).unwrap();
            for j in 0..12 {
                for k in 0..12 {
                    let (dj, dk) = (
                        (j as i64 - pref as i64).abs(),
                        (k as i64 - pref as i64).abs(),
                    );
                    if dj < dk {
                        assert!(
                            row[j] < row[k],
                            "row {i}: cost at distance {dj} not below distance {dk}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn structured_cost_tracks_distance() {
        let w = gen_structured(20, 9);
        let mut pairs = Vec::new();
        for i in 0..20 {
            let pref = (0..20).min_by_key(|&j| w.at(i, j)).unwrap() as f64;
            for j in 0..20 {
                pairs.push(((j as f64 - pref).abs(), w.at(i, j) as f64));
            }
        }
        let n = pairs.len() as f64;
        let (mx, my) = (
            pairs.iter().map(|p| p.0).sum::<f64>() / n,
            pairs.iter().map(|p| p.1).sum::<f64>() / n,
        );
        let cov: f64 = pairs.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
        let vx: f64 = pairs.iter().map(|(x, _)| (x - mx).powi(2)).sum();
        let vy: f64 = pairs.iter().map(|(_, y)| (y - my).powi(2)).sum();
        let corr = cov / (vx * vy).sqrt();
        assert!(corr > 0.9, "distance/cost correlation only {corr:.3}");
    }

    #[test]
    fn grid_csv_is_deterministic() {
        let spec = GridSpec {
            algorithms: vec![Algorithm::Hungarian, Algorithm::SapAcm],
            ns: vec![4, 6],
            seeds: vec![1, 2],
            latencies_ms: vec![0.0, 5.0],
            data: DataKind::Random,
            width: 8,
            mpc: true,
            shuffle: false,
        };
        let a = to_csv(&run_grid(&spec).unwrap(), None);
        let b = to_csv(&run_grid(&spec).unwrap(), None);
        assert_eq!(a, b);
        assert!(a.starts_with(CSV_HEADER));
        let back = from_csv(&a).unwrap();
        assert_eq!(to_csv(&back, None), a);
    }

    #[test]
    fn mpc_runtime_is_affine_in_latency() {
        let spec = GridSpec {
            algorithms: vec![Algorithm::SapJv],
            ns: vec![5],
            seeds: vec![3],
            latencies_ms: vec![0.0, 5.0, 10.0, 15.0, 20.0],
            data: DataKind::Random,
            width: 8,
            mpc: true,
            shuffle: false,
        };
        let records = run_grid(&spec).unwrap();
        let mpc: Vec<&BenchRecord> = records
            .iter()
            .filter(|r| r.algorithm == "sap-jv-mpc")
            .collect();
        assert_eq!(mpc.len(), 5);
        let base = mpc[0];
        for r in &mpc {
            let expect = base.runtime_ms + r.rounds as f64 * r.latency_ms;
            assert!((r.runtime_ms - expect).abs() < 1e-9);
            assert_eq!(r.rounds, base.rounds);
        }
    }

    #[test]
    fn report_needs_records_and_a_full_grid() {
        assert!(report_tables(&[]).is_err());
        let spec = GridSpec {
            algorithms: vec![Algorithm::Hungarian],
            ns: vec![4, 5],
            seeds: vec![1, 2],
            latencies_ms: vec![0.0],
            data: DataKind::Random,
            width: 8,
            mpc: false,
            shuffle: false,
        };
        let mut records = run_grid(&spec).unwrap();
        let report = report_tables(&records).unwrap();
        assert!(report.text.contains("== hungarian on random data =="));
        assert!(report.text.contains("iszero"));
        assert!(report.text.contains("min"));

        records.remove(1);
        let err = report_tables(&records).unwrap_err();
        assert!(err.to_string().contains("missing cells"));
    }

    #[test]
    fn report_rows_ascend_in_n() {
        let spec = GridSpec {
            algorithms: vec![Algorithm::SapAcm],
            ns: vec![7, 4, 5],
            seeds: vec![1],
            latencies_ms: vec![0.0],
            data: DataKind::Structured,
            width: 8,
            mpc: false,
            shuffle: false,
        };
        let report = report_tables(&run_grid(&spec).unwrap()).unwrap();
        let pos = |n: usize| report.text.find(&format!("\n     {n} ")).unwrap();
        assert!(pos(4) < pos(5) && pos(5) < pos(7));
    }

    #[test]
    fn simplex_model_dwarfs_measured_runs() {
        let w = gen_random(10, 8, 5);
        let res = solve(Algorithm::Simplex, &w).unwrap();
        let model = simplex_secure_model(10, res.stats.iterations);
        let acm = run_oblivious(
            Algorithm::SapAcm,
            &w,
            McConfig {
                seed: 5,
                ..Default::default()
            },
            false,
        )
        .unwrap();
        assert!(composite_cost(&model) > 10 * composite_cost(&acm.cost));
    }
}
