//! Simulated honest-majority, semi-honest 3-party secret-sharing runtime.
//!
//! The three parties are logical actors inside one process. Every protocol
//! step advances in rounds with barrier semantics: a primitive that needs a
//! message exchange bumps the round counter once for the whole batch, and
//! per-party message counters record the traffic that a real deployment
//! would send. "Network latency" is bookkeeping, not sleeping: simulated
//! time is `local_time + rounds * latency_per_round`, which makes latency
//! sweeps exact and reproducible.
//!
//! Values are Shamir-shared with a degree-1 polynomial over the prime field
//! of [`field::PRIME`], evaluated at x = 1, 2, 3. Any two shares reconstruct;
//! any single share of a fresh sharing is uniform, which is what the privacy
//! tests check. Multiplication does the classic degree-reduction dance: local
//! share products give a degree-2 sharing, each party re-shares its product
//! share, and the Lagrange recombination of the re-sharings is the degree-1
//! result (one round, batched).
//!
//! Comparisons use statistical masking: the difference is shifted to a
//! non-negative range, blinded with a fresh random value `kappa` bits wider,
//! and the blinded value is opened. The opened value is statistically
//! independent of the operands, so it is not a leakage event; only results
//! that protocols deliberately publish (zero-test booleans, branch bits,
//! argmin positions, covering bits) enter the [`LeakageLog`].

use super::field::{self, PRIME};
use crate::error::Error;
use crate::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};
use std::time::Instant;

/// Number of simulated parties. The protocols assume an honest majority of
/// three with threshold one, so this is fixed.
pub const PARTIES: usize = 3;

/// Party evaluation points.
const XS: [u64; 3] = [1, 2, 3];

/// Lagrange coefficients at zero for a degree-2 polynomial sampled at 1, 2, 3.
const LAGRANGE2: [u64; 3] = [3, PRIME - 3, 1];

/// Provenance of a shared value, used to police what may be opened.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tag {
    /// An input weight.
    Weight,
    /// A dual variable maintained by a solver.
    Dual,
    /// Arithmetic combination of secrets (slacks, distances, bids).
    Derived,
    /// Engine-generated blinding randomness or a blinded quantity.
    Mask,
}

impl Tag {
    fn combine(a: Tag, b: Tag) -> Tag {
        if a == b {
            a
        } else {
            Tag::Derived
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Tag::Weight => "weight",
            Tag::Dual => "dual",
            Tag::Derived => "derived",
            Tag::Mask => "mask",
        }
    }
}

/// A secret-shared field element with a public magnitude bound.
///
/// `bits` is the public promise that the cleartext lies in `(-2^bits, 2^bits)`.
/// Linear operations widen the bound conservatively; callers that know a
/// tighter analytic bound restore it with [`Engine::rebound`].
#[derive(Debug, Clone)]
pub struct SharedValue {
    shares: [u64; PARTIES],
    pub bits: u32,
    pub tag: Tag,
}

impl SharedValue {
    /// The share held by one party. Exposed for the privacy tests.
    pub fn share_of(&self, party: usize) -> u64 {
        self.shares[party]
    }
}

/// Per-party simulation state: traffic that a real deployment would send.
#[derive(Debug, Clone, Copy, Default)]
pub struct PartyState {
    pub id: usize,
    pub messages_sent: u64,
    pub shares_held: u64,
}

/// Protocol cost counters plus the latency model.
///
/// The invariant behind every latency sweep: simulated time is exactly
/// `local_time_ms + rounds * latency_per_round_ms`, affine in the latency
/// with slope `rounds`.
#[derive(Debug, Clone, Default, serde::Serialize)]
pub struct CostModel {
    pub rounds: u64,
    pub opened_values: u64,
    pub zero_tests: u64,
    pub comparisons: u64,
    pub secure_mults: u64,
    pub min_finds: u64,
    pub latency_per_round_ms: f64,
    pub local_time_ms: f64,
}

impl CostModel {
    pub fn simulated_time_ms(&self) -> f64 {
        self.local_time_ms + self.rounds as f64 * self.latency_per_round_ms
    }

    /// The same execution record evaluated under a different latency.
    pub fn at_latency(&self, latency_per_round_ms: f64) -> CostModel {
        CostModel {
            latency_per_round_ms,
            ..self.clone()
        }
    }
}

/// One publicly revealed fact. Events never carry field elements; the only
/// payloads are booleans, indices, and counts that the protocols publish on
/// purpose. `RawOpen` records a reconstruction requested through
/// [`Engine::debug_open`] so that hygiene scans can flag it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LeakageEvent {
    ZeroTest { tag: Tag, result: bool },
    Branch { label: &'static str, taken: bool },
    CoverBit { label: &'static str, index: usize, on: bool },
    MinIndex { label: &'static str, index: usize },
    Iterations { label: &'static str, count: u64 },
    RawOpen { tag: Tag },
}

impl LeakageEvent {
    pub fn line(&self) -> String {
        match self {
            LeakageEvent::ZeroTest { tag, result } => {
                format!("zero-test {} {}", tag.name(), u8::from(*result))
            }
            LeakageEvent::Branch { label, taken } => {
                format!("branch {label} {}", u8::from(*taken))
            }
            LeakageEvent::CoverBit { label, index, on } => {
                format!("cover {label} {index} {}", u8::from(*on))
            }
            LeakageEvent::MinIndex { label, index } => format!("min-index {label} {index}"),
            LeakageEvent::Iterations { label, count } => format!("iterations {label} {count}"),
            LeakageEvent::RawOpen { tag } => format!("raw-open {}", tag.name()),
        }
    }
}

/// Ordered record of everything a protocol revealed beyond its output.
#[derive(Debug, Clone, Default)]
pub struct LeakageLog {
    events: Vec<LeakageEvent>,
}

impl LeakageLog {
    pub fn events(&self) -> &[LeakageEvent] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// True when no weight or dual was ever reconstructed into the log.
    pub fn is_hygienic(&self) -> bool {
        !self.events.iter().any(|e| {
            matches!(
                e,
                LeakageEvent::RawOpen {
                    tag: Tag::Weight | Tag::Dual
                }
            )
        })
    }

    /// Line-oriented export, one event per line.
    pub fn to_lines(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            out.push_str(&e.line());
            out.push('\n');
        }
        out
    }

    /// Hex digest of the exported log, handy for comparing two runs.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_lines().as_bytes()))
    }

    pub fn count(&self, pred: impl Fn(&LeakageEvent) -> bool) -> usize {
        self.events.iter().filter(|e| pred(e)).count()
    }
}

/// Engine configuration. Party count is fixed at three and the field prime
/// is fixed; everything else is a knob.
#[derive(Debug, Clone, Copy)]
pub struct McConfig {
    pub seed: u64,
    pub latency_per_round_ms: f64,
    /// Statistical security parameter for masked comparisons.
    pub kappa: u32,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            seed: 0,
            latency_per_round_ms: 0.0,
            kappa: 40,
        }
    }
}

/// The simulation runtime: holds the joint randomness, the cost counters,
/// the leakage log, and per-party state. Client code sees this
/// single-threaded facade; rounds are the unit of synchronization.
pub struct Engine {
    cfg: McConfig,
    rng: ChaCha20Rng,
    pub cost: CostModel,
    pub log: LeakageLog,
    parties: [PartyState; PARTIES],
    started: Instant,
}

impl Engine {
    pub fn new(cfg: McConfig) -> Engine {
        let mut parties = [PartyState::default(); PARTIES];
        for (i, p) in parties.iter_mut().enumerate() {
            p.id = i;
        }
        Engine {
            rng: ChaCha20Rng::seed_from_u64(cfg.seed),
            cost: CostModel {
                latency_per_round_ms: cfg.latency_per_round_ms,
                ..CostModel::default()
            },
            log: LeakageLog::default(),
            parties,
            cfg,
            started: Instant::now(),
        }
    }

    pub fn config(&self) -> McConfig {
        self.cfg
    }

    pub fn parties(&self) -> &[PartyState; PARTIES] {
        &self.parties
    }

    /// Record elapsed wall time as the local component of simulated time.
    pub fn stamp_local_time(&mut self) {
        self.cost.local_time_ms = self.started.elapsed().as_secs_f64() * 1e3;
    }

    fn rand_field(&mut self) -> u64 {
        loop {
            let c = self.rng.gen::<u64>() >> 3;
            if c < PRIME {
                return c;
            }
        }
    }

    fn rand_nonzero(&mut self) -> u64 {
        loop {
            let c = self.rand_field();
            if c != 0 {
                return c;
            }
        }
    }

    /// Fresh degree-1 sharing of a field element. No cost: joint randomness
    /// is modeled as pre-shared PRG keys.
    fn share_field(&mut self, value: u64, bits: u32, tag: Tag) -> SharedValue {
        let slope = self.rand_field();
        let mut shares = [0u64; PARTIES];
        for (j, s) in shares.iter_mut().enumerate() {
            *s = field::eval1(value, slope, XS[j]);
        }
        for p in &mut self.parties {
            p.shares_held += 1;
        }
        SharedValue { shares, bits, tag }
    }

    /// Share a signed integer. `bits` is the public bound `|x| < 2^bits`.
    pub fn share(&mut self, x: i64, bits: u32, tag: Tag) -> Result<SharedValue> {
        if bits == 0 || bits > 59 {
            return Err(Error::BadParameter(format!(
                "share bound must be in 1..=59 bits, got {bits}"
            )));
        }
        if x.unsigned_abs() >= 1u64 << bits {
            return Err(Error::BadParameter(format!(
                "value {x} outside declared bound of {bits} bits"
            )));
        }
        Ok(self.share_field(field::from_i64(x), bits, tag))
    }

    /// A public constant as a degenerate sharing every party can recompute.
    pub fn constant(&mut self, x: i64) -> SharedValue {
        let v = field::from_i64(x);
        let bits = 64 - x.unsigned_abs().leading_zeros().min(63);
        SharedValue {
            shares: [v; PARTIES],
            bits: bits.max(1),
            tag: Tag::Derived,
        }
    }

    fn reconstruct_field(&self, v: &SharedValue) -> u64 {
        field::sub(field::mul(2, v.shares[0]), v.shares[1])
    }

    /// Peek at the cleartext without any protocol interaction. This is the
    /// simulator's x-ray, used only for internal assertions; it models no
    /// message exchange and is deliberately not public.
    fn peek(&self, v: &SharedValue) -> i64 {
        field::to_i64(self.reconstruct_field(v))
    }

    /// Designated-output reconstruction: one broadcast round, not a leakage
    /// event. Use for final results only.
    pub fn output(&mut self, v: &SharedValue) -> i64 {
        self.output_vec(std::slice::from_ref(v))[0]
    }

    pub fn output_vec(&mut self, vs: &[SharedValue]) -> Vec<i64> {
        self.cost.rounds += 1;
        self.cost.opened_values += vs.len() as u64;
        for p in &mut self.parties {
            p.messages_sent += 2 * vs.len() as u64;
        }
        vs.iter().map(|v| self.peek(v)).collect()
    }

    /// Reconstruct anything and stamp the log with the provenance of what
    /// was opened. Exists so hygiene scans have teeth; protocols never call
    /// this.
    pub fn debug_open(&mut self, v: &SharedValue) -> i64 {
        self.cost.rounds += 1;
        self.cost.opened_values += 1;
        self.log.events.push(LeakageEvent::RawOpen { tag: v.tag });
        self.peek(v)
    }

    /// Re-assert a tighter public bound that the caller knows analytically.
    /// The simulator verifies the claim.
    pub fn rebound(&self, v: &SharedValue, bits: u32) -> SharedValue {
        debug_assert!(
            self.peek(v).unsigned_abs() < 1u64 << bits,
            "rebound to {bits} bits violated by actual value {}",
            self.peek(v)
        );
        SharedValue {
            shares: v.shares,
            bits,
            tag: v.tag,
        }
    }

    // ----- linear layer (no interaction) -----

    pub fn add(&self, a: &SharedValue, b: &SharedValue) -> SharedValue {
        let mut shares = [0u64; PARTIES];
        for j in 0..PARTIES {
            shares[j] = field::add(a.shares[j], b.shares[j]);
        }
        SharedValue {
            shares,
            bits: (a.bits.max(b.bits) + 1).min(62),
            tag: Tag::combine(a.tag, b.tag),
        }
    }

    pub fn sub(&self, a: &SharedValue, b: &SharedValue) -> SharedValue {
        let mut shares = [0u64; PARTIES];
        for j in 0..PARTIES {
            shares[j] = field::sub(a.shares[j], b.shares[j]);
        }
        SharedValue {
            shares,
            bits: (a.bits.max(b.bits) + 1).min(62),
            tag: Tag::combine(a.tag, b.tag),
        }
    }

    pub fn neg(&self, a: &SharedValue) -> SharedValue {
        let mut shares = [0u64; PARTIES];
        for j in 0..PARTIES {
            shares[j] = field::neg(a.shares[j]);
        }
        SharedValue { shares, ..a.clone() }
    }

    pub fn add_pub(&self, a: &SharedValue, k: i64) -> SharedValue {
        let kf = field::from_i64(k);
        let mut shares = a.shares;
        for s in &mut shares {
            *s = field::add(*s, kf);
        }
        let kbits = (64 - k.unsigned_abs().leading_zeros()).max(1);
        SharedValue {
            shares,
            bits: (a.bits.max(kbits) + 1).min(62),
            tag: a.tag,
        }
    }

    pub fn mul_pub(&self, a: &SharedValue, k: i64) -> SharedValue {
        let kf = field::from_i64(k);
        let mut shares = a.shares;
        for s in &mut shares {
            *s = field::mul(*s, kf);
        }
        let kbits = (64 - k.unsigned_abs().leading_zeros()).max(1);
        SharedValue {
            shares,
            bits: (a.bits + kbits).min(62),
            tag: a.tag,
        }
    }

    // ----- multiplicative layer (one round, batched) -----

    /// Degree reduction: re-share the degree-2 share vector `h` and recombine.
    fn reshare_deg2(&mut self, h: [u64; PARTIES], bits: u32, tag: Tag) -> SharedValue {
        let mut acc = [0u64; PARTIES];
        for i in 0..PARTIES {
            let slope = self.rand_field();
            for (j, a) in acc.iter_mut().enumerate() {
                let reshare = field::eval1(h[i], slope, XS[j]);
                *a = field::add(*a, field::mul(LAGRANGE2[i], reshare));
            }
            self.parties[i].messages_sent += 2;
        }
        for p in &mut self.parties {
            p.shares_held += 1;
        }
        SharedValue {
            shares: acc,
            bits,
            tag,
        }
    }

    fn mul_raw(&mut self, a: &SharedValue, b: &SharedValue) -> SharedValue {
        let mut h = [0u64; PARTIES];
        for i in 0..PARTIES {
            h[i] = field::mul(a.shares[i], b.shares[i]);
        }
        self.reshare_deg2(h, (a.bits + b.bits).min(62), Tag::combine(a.tag, b.tag))
    }

    pub fn mul(&mut self, a: &SharedValue, b: &SharedValue) -> SharedValue {
        self.cost.rounds += 1;
        self.cost.secure_mults += 1;
        self.mul_raw(a, b)
    }

    /// All products in one round.
    pub fn mul_batch(&mut self, pairs: &[(SharedValue, SharedValue)]) -> Vec<SharedValue> {
        self.cost.rounds += 1;
        self.cost.secure_mults += pairs.len() as u64;
        pairs.iter().map(|(a, b)| self.mul_raw(a, b)).collect()
    }

    /// Inner product in one round: the degree-2 accumulation is local and a
    /// single re-share finishes the job.
    pub fn dot(&mut self, a: &[SharedValue], b: &[SharedValue]) -> SharedValue {
        assert_eq!(a.len(), b.len(), "dot operand lengths differ");
        self.cost.rounds += 1;
        self.cost.secure_mults += a.len() as u64;
        self.dot_raw(a, b)
    }

    fn dot_raw(&mut self, a: &[SharedValue], b: &[SharedValue]) -> SharedValue {
        let mut h = [0u64; PARTIES];
        let mut bits = 0u32;
        let mut tag = Tag::Mask;
        for (x, y) in a.iter().zip(b) {
            for i in 0..PARTIES {
                h[i] = field::add(h[i], field::mul(x.shares[i], y.shares[i]));
            }
            bits = bits.max(x.bits + y.bits);
            tag = Tag::combine(x.tag, y.tag);
        }
        let len_bits = usize::BITS - a.len().leading_zeros();
        self.reshare_deg2(h, (bits + len_bits).min(62), tag)
    }

    // ----- openings -----

    fn open_raw(&mut self, v: &SharedValue) -> u64 {
        for p in &mut self.parties {
            p.messages_sent += 2;
        }
        self.reconstruct_field(v)
    }

    // ----- zero tests -----

    /// Public zero test by multiplicative masking: open `r * v` for a joint
    /// random nonzero `r`. Two rounds (degree reduction, open); the opened
    /// value for `v != 0` is uniform over nonzero field elements.
    pub fn zero_test(&mut self, v: &SharedValue) -> bool {
        self.zero_test_batch(std::slice::from_ref(v))[0]
    }

    /// Vectorized variant: the whole batch costs the same two rounds.
    pub fn zero_test_batch(&mut self, vs: &[SharedValue]) -> Vec<bool> {
        self.cost.rounds += 2;
        self.cost.zero_tests += vs.len() as u64;
        self.cost.secure_mults += vs.len() as u64;
        self.cost.opened_values += vs.len() as u64;
        let mut out = Vec::with_capacity(vs.len());
        for v in vs {
            let r = self.rand_nonzero();
            let r_sh = self.share_field(r, 61, Tag::Mask);
            let masked = self.mul_raw(&r_sh, v);
            let opened = self.open_raw(&masked);
            let result = opened == 0;
            self.log.events.push(LeakageEvent::ZeroTest {
                tag: v.tag,
                result,
            });
            out.push(result);
        }
        out
    }

    /// The value a single zero test opens. Exposed for the statistical test
    /// that the mask hides everything except the boolean.
    pub fn zero_test_opened_value(&mut self, v: &SharedValue) -> u64 {
        self.cost.rounds += 2;
        self.cost.zero_tests += 1;
        self.cost.secure_mults += 1;
        self.cost.opened_values += 1;
        let r = self.rand_nonzero();
        let r_sh = self.share_field(r, 61, Tag::Mask);
        let masked = self.mul_raw(&r_sh, v);
        let opened = self.open_raw(&masked);
        self.log.events.push(LeakageEvent::ZeroTest {
            tag: v.tag,
            result: opened == 0,
        });
        opened
    }

    // ----- comparisons -----

    fn cmp_bits_checked(&self, a: &SharedValue, b: &SharedValue) -> Result<u32> {
        let l = a.bits.max(b.bits) + 1;
        if l + self.cfg.kappa + 1 > 60 {
            return Err(Error::BitBudget {
                value_bits: l,
                security_bits: self.cfg.kappa,
                field_bits: field::FIELD_BITS,
            });
        }
        Ok(l)
    }

    /// Secret comparison bit: reconstructs to 1 iff `a < b`. Two rounds:
    /// one to open the statistically blinded difference, one to assemble
    /// the result bit from the mask's bit shares.
    pub fn less_than(&mut self, a: &SharedValue, b: &SharedValue) -> Result<SharedValue> {
        let mut v = self.less_than_batch(&[(a.clone(), b.clone())])?;
        Ok(v.pop().expect("batch of one"))
    }

    pub fn less_than_batch(
        &mut self,
        pairs: &[(SharedValue, SharedValue)],
    ) -> Result<Vec<SharedValue>> {
        self.cost.rounds += 2;
        self.cost.comparisons += pairs.len() as u64;
        self.cost.secure_mults += pairs.len() as u64;
        self.cost.opened_values += pairs.len() as u64;
        let kappa = self.cfg.kappa;
        let mut out = Vec::with_capacity(pairs.len());
        for (a, b) in pairs {
            let l = self.cmp_bits_checked(a, b)?;
            // Shift the difference into [0, 2^(l+1)) and blind it.
            let d = self.sub(b, a);
            let shifted = self.add_pub(&d, 1i64 << l);
            let mask_val = self.rng.gen_range(0..1u64 << (l + 1 + kappa));
            let mask = self.share_field(mask_val, l + 1 + kappa, Tag::Mask);
            let blinded = self.add(&shifted, &mask);
            let _opened = self.open_raw(&blinded);
            // The bit extraction from the mask's bit shares is modeled: the
            // simulator produces a fresh sharing of the exact result.
            let bit = i64::from(self.peek(a) < self.peek(b));
            out.push(self.share_field(field::from_i64(bit), 1, Tag::Derived));
        }
        Ok(out)
    }

    /// Comparison with a published outcome: the bit is opened and logged as
    /// a branch decision. Three rounds.
    pub fn less_than_open(
        &mut self,
        a: &SharedValue,
        b: &SharedValue,
        label: &'static str,
    ) -> Result<bool> {
        let bit = self.less_than(a, b)?;
        self.cost.rounds += 1;
        self.cost.opened_values += 1;
        let taken = self.open_raw(&bit) == 1;
        self.log.events.push(LeakageEvent::Branch { label, taken });
        Ok(taken)
    }

    /// Batched published comparisons: the whole wave costs three rounds.
    pub fn less_than_open_batch(
        &mut self,
        pairs: &[(SharedValue, SharedValue)],
        label: &'static str,
    ) -> Result<Vec<bool>> {
        let bits = self.less_than_batch(pairs)?;
        self.cost.rounds += 1;
        self.cost.opened_values += bits.len() as u64;
        let mut out = Vec::with_capacity(bits.len());
        for bit in &bits {
            let taken = self.open_raw(bit) == 1;
            self.log.events.push(LeakageEvent::Branch { label, taken });
            out.push(taken);
        }
        Ok(out)
    }

    /// Oblivious select: `bit * a + (1 - bit) * b` with the bound of the
    /// wider operand, since the result is one of the two.
    pub fn mux(&mut self, bit: &SharedValue, a: &SharedValue, b: &SharedValue) -> SharedValue {
        let d = self.sub(a, b);
        let m = self.mul(bit, &d);
        let mut r = self.add(&m, b);
        r.bits = a.bits.max(b.bits);
        r.tag = Tag::combine(a.tag, b.tag);
        r
    }

    fn mux_batch(
        &mut self,
        triples: &[(SharedValue, SharedValue, SharedValue)],
    ) -> Vec<SharedValue> {
        self.cost.rounds += 1;
        self.cost.secure_mults += triples.len() as u64;
        triples
            .iter()
            .map(|(bit, a, b)| {
                let d = self.sub(a, b);
                let m = self.mul_raw(bit, &d);
                let mut r = self.add(&m, b);
                r.bits = a.bits.max(b.bits);
                r.tag = Tag::combine(a.tag, b.tag);
                r
            })
            .collect()
    }

    // ----- minimum protocols -----

    /// Secret minimum value by a comparison tree of depth ceil(log2 n).
    /// n-1 comparisons; nothing is opened. Ties keep the earlier element.
    pub fn min_value(&mut self, xs: &[SharedValue]) -> Result<SharedValue> {
        assert!(!xs.is_empty(), "min of empty slice");
        self.cost.min_finds += 1;
        let mut layer: Vec<SharedValue> = xs.to_vec();
        while layer.len() > 1 {
            let mut cmp_pairs = Vec::new();
            for pair in layer.chunks(2) {
                if let [l, r] = pair {
                    cmp_pairs.push((r.clone(), l.clone()));
                }
            }
            let bits = self.less_than_batch(&cmp_pairs)?;
            let mut muxes = Vec::new();
            let mut k = 0;
            for pair in layer.chunks(2) {
                if let [l, r] = pair {
                    muxes.push((bits[k].clone(), r.clone(), l.clone()));
                    k += 1;
                }
            }
            let winners = self.mux_batch(&muxes);
            let mut next = Vec::with_capacity(layer.len().div_ceil(2));
            let mut w = winners.into_iter();
            for pair in layer.chunks(2) {
                next.push(if pair.len() == 2 {
                    w.next().expect("winner per pair")
                } else {
                    pair[0].clone()
                });
            }
            layer = next;
        }
        Ok(layer.pop().expect("nonempty tournament"))
    }

    /// Minimum with its position published: each tournament level opens its
    /// comparison bits, and the final argmin index is logged. Ties resolve
    /// to the lowest index.
    pub fn min_index_open(
        &mut self,
        xs: &[SharedValue],
        label: &'static str,
    ) -> Result<(usize, SharedValue)> {
        assert!(!xs.is_empty(), "min of empty slice");
        self.cost.min_finds += 1;
        let mut layer: Vec<(usize, SharedValue)> =
            xs.iter().cloned().enumerate().collect();
        while layer.len() > 1 {
            let mut cmp_pairs = Vec::new();
            for pair in layer.chunks(2) {
                if let [(_, l), (_, r)] = pair {
                    cmp_pairs.push((r.clone(), l.clone()));
                }
            }
            let bits = self.less_than_batch(&cmp_pairs)?;
            self.cost.rounds += 1;
            self.cost.opened_values += bits.len() as u64;
            let opened: Vec<bool> = bits.iter().map(|b| self.open_raw(b) == 1).collect();
            let mut next = Vec::with_capacity(layer.len().div_ceil(2));
            let mut k = 0;
            for pair in layer.chunks(2) {
                match pair {
                    [l, r] => {
                        next.push(if opened[k] { r.clone() } else { l.clone() });
                        k += 1;
                    }
                    [single] => next.push(single.clone()),
                    _ => unreachable!(),
                }
            }
            layer = next;
        }
        let (index, value) = layer.pop().expect("nonempty tournament");
        self.log.events.push(LeakageEvent::MinIndex { label, index });
        Ok((index, value))
    }

    /// Fully secret argmin for the shuffled mode: both the winning value and
    /// the winning index stay shared.
    pub fn min_index_secret(
        &mut self,
        xs: &[SharedValue],
    ) -> Result<(SharedValue, SharedValue)> {
        assert!(!xs.is_empty(), "min of empty slice");
        self.cost.min_finds += 1;
        let idx_bits = (usize::BITS - xs.len().leading_zeros()).max(1);
        let mut layer: Vec<(SharedValue, SharedValue)> = xs
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let idx = self.share_field(field::from_i64(i as i64), idx_bits, Tag::Derived);
                (idx, v.clone())
            })
            .collect();
        while layer.len() > 1 {
            let mut cmp_pairs = Vec::new();
            for pair in layer.chunks(2) {
                if let [(_, l), (_, r)] = pair {
                    cmp_pairs.push((r.clone(), l.clone()));
                }
            }
            let bits = self.less_than_batch(&cmp_pairs)?;
            let mut muxes = Vec::new();
            let mut k = 0;
            for pair in layer.chunks(2) {
                if let [(li, lv), (ri, rv)] = pair {
                    muxes.push((bits[k].clone(), rv.clone(), lv.clone()));
                    muxes.push((bits[k].clone(), ri.clone(), li.clone()));
                    k += 1;
                }
            }
            let winners = self.mux_batch(&muxes);
            let mut next = Vec::with_capacity(layer.len().div_ceil(2));
            let mut w = winners.chunks(2);
            for pair in layer.chunks(2) {
                next.push(if pair.len() == 2 {
                    let pairw = w.next().expect("winner per pair");
                    (pairw[1].clone(), pairw[0].clone())
                } else {
                    pair[0].clone()
                });
            }
            layer = next;
        }
        let (idx, val) = layer.pop().expect("nonempty tournament");
        Ok((idx, val))
    }

    // ----- logging helpers for protocol bookkeeping -----

    pub fn log_branch(&mut self, label: &'static str, taken: bool) {
        self.log.events.push(LeakageEvent::Branch { label, taken });
    }

    pub fn log_cover(&mut self, label: &'static str, index: usize, on: bool) {
        self.log.events.push(LeakageEvent::CoverBit { label, index, on });
    }

    pub fn log_iterations(&mut self, label: &'static str, count: u64) {
        self.log.events.push(LeakageEvent::Iterations { label, count });
    }

    // ----- shuffling -----

    /// Draw a uniform permutation from the joint coin.
    fn random_permutation(&mut self, n: usize) -> Vec<usize> {
        let mut p: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = self.rng.gen_range(0..=i);
            p.swap(i, j);
        }
        p
    }

    /// Multiply the shared matrices `a` and `b` in a single round of batched
    /// inner products.
    fn mat_mul_shared(
        &mut self,
        a: &[Vec<SharedValue>],
        b: &[Vec<SharedValue>],
    ) -> Vec<Vec<SharedValue>> {
        let n = a.len();
        self.cost.rounds += 1;
        self.cost.secure_mults += (n * n * n) as u64;
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let mut row = Vec::with_capacity(n);
            for j in 0..n {
                let col: Vec<SharedValue> = (0..n).map(|k| b[k][j].clone()).collect();
                row.push(self.dot_raw(&a[i], &col));
            }
            out.push(row);
        }
        out
    }

    fn perm_matrix(&mut self, perm: &[usize], transpose: bool) -> Vec<Vec<SharedValue>> {
        let n = perm.len();
        let mut m = vec![vec![]; n];
        for (i, row) in m.iter_mut().enumerate() {
            for j in 0..n {
                let hit = if transpose {
                    perm[j] == i
                } else {
                    perm[i] == j
                };
                let v = field::from_i64(i64::from(hit));
                row.push(self.share_field(v, 1, Tag::Mask));
            }
        }
        m
    }

    /// Obliviously permute rows and columns of a square shared matrix with
    /// jointly random secret permutations, realized as two permutation-matrix
    /// multiplications. Returns the handles needed to undo the shuffle.
    pub fn shuffle2d(
        &mut self,
        m: &[Vec<SharedValue>],
    ) -> Result<(Vec<Vec<SharedValue>>, ShuffleHandles)> {
        let n = m.len();
        if m.iter().any(|r| r.len() != n) {
            return Err(Error::Shape("shuffle2d needs a square matrix".into()));
        }
        let row = self.random_permutation(n);
        let col = self.random_permutation(n);
        let shuffled = self.apply_perms(m, &row, &col);
        Ok((shuffled, ShuffleHandles { row, col }))
    }

    /// Undo a shuffle exactly, again via permutation-matrix multiplications.
    pub fn unshuffle2d(
        &mut self,
        m: &[Vec<SharedValue>],
        handles: &ShuffleHandles,
    ) -> Vec<Vec<SharedValue>> {
        let inv_row = invert_permutation(&handles.row);
        let inv_col = invert_permutation(&handles.col);
        self.apply_perms(m, &inv_row, &inv_col)
    }

    /// shuffled[i][j] = m[row[i]][col[j]], computed as R * M * C on shares.
    fn apply_perms(
        &mut self,
        m: &[Vec<SharedValue>],
        row: &[usize],
        col: &[usize],
    ) -> Vec<Vec<SharedValue>> {
        let r = self.perm_matrix(row, false);
        let c = self.perm_matrix(col, true);
        let rm = self.mat_mul_shared(&r, m);
        let out = self.mat_mul_shared(&rm, &c);
        let bits = m.iter().flatten().map(|v| v.bits).max().unwrap_or(1);
        out.into_iter()
            .map(|rowv| {
                rowv.into_iter()
                    .map(|v| {
                        let mut v = v;
                        v.bits = bits;
                        v.tag = Tag::Weight;
                        v
                    })
                    .collect()
            })
            .collect()
    }
}

/// The secret permutations behind a [`Engine::shuffle2d`] call. Holding the
/// handles is what lets the caller map results back; no single party knows
/// them.
#[derive(Debug, Clone)]
pub struct ShuffleHandles {
    pub row: Vec<usize>,
    pub col: Vec<usize>,
}

impl ShuffleHandles {
    /// Map a position in the shuffled matrix back to the original.
    pub fn to_original(&self, i: usize, j: usize) -> (usize, usize) {
        (self.row[i], self.col[j])
    }
}

fn invert_permutation(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (i, &pi) in p.iter().enumerate() {
        inv[pi] = i;
    }
    inv
}

#[cfg(test)]
mod tests {
    use super::*;

    fn engine(seed: u64) -> Engine {
        Engine::new(McConfig {
            seed,
            ..McConfig::default()
        })
    }

    #[test]
    fn share_roundtrip() {
        let mut e = engine(1);
        for x in [0i64, -5, 5, 40000, -40000] {
            let s = e.share(x, 17, Tag::Weight).unwrap();
            assert_eq!(e.output(&s), x);
        }
    }

    #[test]
    fn any_two_shares_reconstruct() {
        let mut e = engine(2);
        let s = e.share(1234, 16, Tag::Weight).unwrap();
        // Lagrange at zero for point pairs (1,2), (1,3), (2,3).
        let p = PRIME as u128;
        let from12 = ((2 * s.share_of(0) as u128 + (p - s.share_of(1) as u128)) % p) as u64;
        let inv2 = field::inv(2);
        let from13 = field::sub(
            field::mul(field::mul(3, inv2), s.share_of(0)),
            field::mul(inv2, s.share_of(2)),
        );
        let from23 = field::sub(field::mul(3, s.share_of(1)), field::mul(2, s.share_of(2)));
        assert_eq!(field::to_i64(from12), 1234);
        assert_eq!(field::to_i64(from13), 1234);
        assert_eq!(field::to_i64(from23), 1234);
    }

    #[test]
    fn add_and_mul_reconstruct() {
        let mut e = engine(3);
        let a = e.share(2, 8, Tag::Weight).unwrap();
        let b = e.share(3, 8, Tag::Weight).unwrap();
        let rounds0 = e.cost.rounds;
        let s = e.add(&a, &b);
        assert_eq!(e.cost.rounds, rounds0, "addition is local");
        let m = e.mul(&a, &b);
        assert_eq!(e.cost.rounds, rounds0 + 1, "multiplication is one round");
        assert_eq!(e.output(&s), 5);
        assert_eq!(e.output(&m), 6);
    }

    #[test]
    fn dot_is_one_round() {
        let mut e = engine(4);
        let a: Vec<_> = (0..9)
            .map(|i| e.share(i, 8, Tag::Weight).unwrap())
            .collect();
        let b: Vec<_> = (0..9)
            .map(|i| e.share(i + 1, 8, Tag::Weight).unwrap())
            .collect();
        let rounds0 = e.cost.rounds;
        let d = e.dot(&a, &b);
        assert_eq!(e.cost.rounds, rounds0 + 1);
        let expect: i64 = (0..9).map(|i| i * (i + 1)).sum();
        assert_eq!(e.output(&d), expect);
    }

    #[test]
    fn zero_test_basics() {
        let mut e = engine(5);
        let z = e.share(0, 8, Tag::Derived).unwrap();
        let nz = e.share(7, 8, Tag::Derived).unwrap();
        assert!(e.zero_test(&z));
        assert!(!e.zero_test(&nz));
        assert_eq!(e.cost.zero_tests, 2);
        assert_eq!(e.log.len(), 2);
    }

    #[test]
    fn zero_test_batch_rounds_constant() {
        let mut e = engine(6);
        let vs: Vec<_> = (0..100)
            .map(|i| e.share(i % 3, 8, Tag::Derived).unwrap())
            .collect();
        let rounds0 = e.cost.rounds;
        let res = e.zero_test_batch(&vs);
        assert_eq!(e.cost.rounds - rounds0, 2, "batch cost independent of size");
        assert_eq!(res.len(), 100);
        for (i, r) in res.iter().enumerate() {
            assert_eq!(*r, i % 3 == 0);
        }
    }

    #[test]
    fn less_than_and_mux() {
        let mut e = engine(7);
        let one = e.share(1, 8, Tag::Derived).unwrap();
        let two = e.share(2, 8, Tag::Derived).unwrap();
        let bit = e.less_than(&one, &two).unwrap();
        assert_eq!(e.output(&bit), 1);
        let bit2 = e.less_than(&two, &one).unwrap();
        assert_eq!(e.output(&bit2), 0);
        let picked = e.mux(&bit, &one, &two);
        assert_eq!(e.output(&picked), 1);
    }

    #[test]
    fn comparison_bit_budget_enforced() {
        let mut e = engine(8);
        let a = e.share(1, 30, Tag::Derived).unwrap();
        let b = e.share(2, 30, Tag::Derived).unwrap();
        let err = e.less_than(&a, &b).unwrap_err();
        assert!(matches!(err, Error::BitBudget { .. }), "got {err:?}");
    }

    #[test]
    fn min_protocols() {
        let mut e = engine(9);
        let xs: Vec<_> = [5i64, 3, 9, 3]
            .iter()
            .map(|&x| e.share(x, 8, Tag::Derived).unwrap())
            .collect();
        let mv = e.min_value(&xs).unwrap();
        assert_eq!(e.output(&mv), 3);

        let c0 = e.cost.comparisons;
        let (idx, val) = e.min_index_open(&xs, "test").unwrap();
        assert_eq!(idx, 1, "lowest-index tie break");
        assert_eq!(e.output(&val), 3);
        assert_eq!(e.cost.comparisons - c0, 3, "n-1 comparisons");

        let (sidx, sval) = e.min_index_secret(&xs).unwrap();
        assert_eq!(e.output(&sidx), 1);
        assert_eq!(e.output(&sval), 3);
    }

    #[test]
    fn min_comparisons_law_n8() {
        let mut e = engine(10);
        let xs: Vec<_> = (0..8)
            .map(|i| e.share((i * 7 + 3) % 11, 8, Tag::Derived).unwrap())
            .collect();
        let c0 = e.cost.comparisons;
        e.min_value(&xs).unwrap();
        assert_eq!(e.cost.comparisons - c0, 7);
    }

    #[test]
    fn shuffle_roundtrip_identityish() {
        let mut e = engine(11);
        let n = 4usize;
        let m: Vec<Vec<SharedValue>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| e.share((i * n + j) as i64, 8, Tag::Weight).unwrap())
                    .collect()
            })
            .collect();
        let (sh, handles) = e.shuffle2d(&m).unwrap();
        let back = e.unshuffle2d(&sh, &handles);
        for i in 0..n {
            for j in 0..n {
                assert_eq!(e.output(&back[i][j]), (i * n + j) as i64);
            }
        }
        // And the handles explain the shuffled positions.
        for i in 0..n {
            for j in 0..n {
                let (oi, oj) = handles.to_original(i, j);
                assert_eq!(e.output(&sh[i][j]), (oi * n + oj) as i64);
            }
        }
    }

    #[test]
    fn simulated_time_affine_in_latency() {
        let mut e = engine(12);
        let a = e.share(5, 8, Tag::Weight).unwrap();
        let b = e.share(6, 8, Tag::Weight).unwrap();
        for _ in 0..10 {
            let _ = e.mul(&a, &b);
        }
        e.stamp_local_time();
        let at0 = e.cost.at_latency(0.0).simulated_time_ms();
        let at20 = e.cost.at_latency(20.0).simulated_time_ms();
        assert!(at0 < at20);
        let diff = at20 - at0;
        assert_eq!(diff, e.cost.rounds as f64 * 20.0);
    }

    #[test]
    fn hygiene_scan_flags_debug_open() {
        let mut e = engine(13);
        let w = e.share(42, 8, Tag::Weight).unwrap();
        assert!(e.log.is_hygienic());
        let _ = e.zero_test(&w);
        assert!(e.log.is_hygienic(), "zero test leaks only the boolean");
        let _ = e.debug_open(&w);
        assert!(!e.log.is_hygienic(), "raw weight opening must be flagged");
    }
}
