//! Aggregated range proof.
//!
//! Proves that each of `m` committed values lies in `[0, 2^nb)` with a
//! single transcript of `2 * (log2(m) + log2(nb)) + 4` group elements and
//! five scalars. The committed values are decomposed into one long bit
//! vector; a polynomial identity ties the bits to the commitments, and the
//! inner-product argument compresses the bit vectors.
//!
//! With challenges `y`, `z` the constant term of the proven polynomial
//! satisfies `t0 = sum_j z^(2+j) * v_j + delta(y, z)` where
//! `delta(y, z) = (z - z^2) * sum_i y^i - (2^nb - 1) * sum_j z^(3+j)`,
//! and the per-bit weight vector is `d[j*nb + i] = z^(2+j) * 2^i`.

use curve25519_dalek::ristretto::{CompressedRistretto, RistrettoPoint};
use curve25519_dalek::scalar::Scalar;
use curve25519_dalek::traits::{IsIdentity, VartimeMultiscalarMul};
use rand::{CryptoRng, RngCore};

use super::ipp::{self, InnerProductProof};
use super::transcript::Transcript;
use crate::zk::group::GroupContext;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RangeProof {
    pub a: CompressedRistretto,
    pub s: CompressedRistretto,
    pub t1: CompressedRistretto,
    pub t2: CompressedRistretto,
    pub t_hat: Scalar,
    pub taux: Scalar,
    pub mu: Scalar,
    pub ipp: InnerProductProof,
}

impl RangeProof {
    /// Group elements in the transcript, inner-product rounds included.
    pub fn group_elements(&self) -> usize {
        4 + self.ipp.l_vec.len() + self.ipp.r_vec.len()
    }

    /// Scalars in the transcript.
    pub fn scalars(&self) -> usize {
        5
    }
}

/// Why a range verification failed.
#[derive(Debug)]
pub enum RangeFail {
    /// The transcript does not parse against the expected shape.
    Malformed(String),
    /// Well-formed transcript, false statement.
    Rejected,
}

pub fn rand_scalar<R: RngCore + CryptoRng>(rng: &mut R) -> Scalar {
    let mut b = [0u8; 64];
    rng.fill_bytes(&mut b);
    Scalar::from_bytes_mod_order_wide(&b)
}

fn inner(a: &[Scalar], b: &[Scalar]) -> Scalar {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn powers(x: Scalar, n: usize) -> Vec<Scalar> {
    let mut out = Vec::with_capacity(n);
    let mut acc = Scalar::ONE;
    for _ in 0..n {
        out.push(acc);
        acc *= x;
    }
    out
}

/// Prove that every value lies in `[0, 2^width)`. Values outside the range
/// are masked to their low bits, which yields a transcript the verifier
/// rejects; the optimality layer screens honest inputs before committing.
pub fn prove_aggregated<R: RngCore + CryptoRng>(
    ctx: &GroupContext,
    transcript: &mut Transcript,
    values: &[i64],
    blinds: &[Scalar],
    rng: &mut R,
) -> RangeProof {
    let m = values.len();
    let nb = ctx.width as usize;
    assert!(m.is_power_of_two(), "aggregation size must be a power of two");
    assert_eq!(blinds.len(), m);
    let n_total = m * nb;
    assert!(
        n_total <= ctx.g_vec.len(),
        "context too small: {n_total} bits needed"
    );

    transcript.append_u64("range-m", m as u64);
    transcript.append_u64("range-width", nb as u64);
    for (v, gamma) in values.iter().zip(blinds) {
        let c = (ctx.b * super::group::scalar_from_i64(*v) + ctx.b_blind * gamma).compress();
        transcript.append_point("range-v", &c);
    }

    let masked: Vec<u64> = values
        .iter()
        .map(|v| (v.rem_euclid(1i64 << nb)) as u64)
        .collect();

    let mut a_l = Vec::with_capacity(n_total);
    for v in &masked {
        for i in 0..nb {
            a_l.push(Scalar::from((v >> i) & 1));
        }
    }
    let a_r: Vec<Scalar> = a_l.iter().map(|b| b - Scalar::ONE).collect();

    let alpha = rand_scalar(rng);
    let rho = rand_scalar(rng);
    let s_l: Vec<Scalar> = (0..n_total).map(|_| rand_scalar(rng)).collect();
    let s_r: Vec<Scalar> = (0..n_total).map(|_| rand_scalar(rng)).collect();

    let g = &ctx.g_vec[..n_total];
    let h = &ctx.h_vec[..n_total];
    let a = RistrettoPoint::vartime_multiscalar_mul(
        std::iter::once(&alpha).chain(a_l.iter()).chain(a_r.iter()),
        std::iter::once(&ctx.b_blind).chain(g.iter()).chain(h.iter()),
    )
    .compress();
    let s = RistrettoPoint::vartime_multiscalar_mul(
        std::iter::once(&rho).chain(s_l.iter()).chain(s_r.iter()),
        std::iter::once(&ctx.b_blind).chain(g.iter()).chain(h.iter()),
    )
    .compress();

    transcript.append_point("range-a", &a);
    transcript.append_point("range-s", &s);
    let y = transcript.challenge_scalar("range-y");
    let z = transcript.challenge_scalar("range-z");

    let y_pow = powers(y, n_total);
    let z_pow = powers(z, m + 2);
    let two_pow = powers(Scalar::from(2u64), nb);
    let d: Vec<Scalar> = (0..n_total)
        .map(|i| z_pow[2 + i / nb] * two_pow[i % nb])
        .collect();

    let l0: Vec<Scalar> = a_l.iter().map(|b| b - z).collect();
    let l1 = s_l;
    let r0: Vec<Scalar> = (0..n_total)
        .map(|i| y_pow[i] * (a_r[i] + z) + d[i])
        .collect();
    let r1: Vec<Scalar> = (0..n_total).map(|i| y_pow[i] * s_r[i]).collect();

    let t1_scalar = inner(&l0, &r1) + inner(&l1, &r0);
    let t2_scalar = inner(&l1, &r1);
    let tau1 = rand_scalar(rng);
    let tau2 = rand_scalar(rng);
    let t1 = (ctx.b * t1_scalar + ctx.b_blind * tau1).compress();
    let t2 = (ctx.b * t2_scalar + ctx.b_blind * tau2).compress();

    transcript.append_point("range-t1", &t1);
    transcript.append_point("range-t2", &t2);
    let x = transcript.challenge_scalar("range-x");

    let l: Vec<Scalar> = (0..n_total).map(|i| l0[i] + l1[i] * x).collect();
    let r: Vec<Scalar> = (0..n_total).map(|i| r0[i] + r1[i] * x).collect();
    let t_hat = inner(&l, &r);
    let mut taux = tau2 * x * x + tau1 * x;
    for (j, gamma) in blinds.iter().enumerate() {
        taux += z_pow[2 + j] * gamma;
    }
    let mu = alpha + rho * x;

    transcript.append_scalar("range-that", &t_hat);
    transcript.append_scalar("range-taux", &taux);
    transcript.append_scalar("range-mu", &mu);
    let w = transcript.challenge_scalar("range-w");
    let q = ctx.b * w;

    let y_inv = y.invert();
    let y_inv_pow = powers(y_inv, n_total);
    let h_prime: Vec<RistrettoPoint> = (0..n_total).map(|i| h[i] * y_inv_pow[i]).collect();

    let ipp = ipp::prove(transcript, &q, g, &h_prime, l, r);

    RangeProof {
        a,
        s,
        t1,
        t2,
        t_hat,
        taux,
        mu,
        ipp,
    }
}

/// Verify an aggregated range proof against derived value commitments.
///
/// Both polynomial and inner-product checks fold into one multiscalar
/// equation, weighted by a transcript-derived batching scalar.
pub fn verify_aggregated(
    ctx: &GroupContext,
    transcript: &mut Transcript,
    commitments: &[RistrettoPoint],
    proof: &RangeProof,
) -> Result<(), RangeFail> {
    let m = commitments.len();
    let nb = ctx.width as usize;
    if !m.is_power_of_two() || m == 0 {
        return Err(RangeFail::Malformed(format!(
            "aggregation size {m} is not a power of two"
        )));
    }
    let n_total = m * nb;
    if n_total > ctx.g_vec.len() {
        return Err(RangeFail::Malformed(format!(
            "context too small: {n_total} bits needed"
        )));
    }

    transcript.append_u64("range-m", m as u64);
    transcript.append_u64("range-width", nb as u64);
    for c in commitments {
        transcript.append_point("range-v", &c.compress());
    }

    transcript.append_point("range-a", &proof.a);
    transcript.append_point("range-s", &proof.s);
    let y = transcript.challenge_scalar("range-y");
    let z = transcript.challenge_scalar("range-z");
    transcript.append_point("range-t1", &proof.t1);
    transcript.append_point("range-t2", &proof.t2);
    let x = transcript.challenge_scalar("range-x");
    transcript.append_scalar("range-that", &proof.t_hat);
    transcript.append_scalar("range-taux", &proof.taux);
    transcript.append_scalar("range-mu", &proof.mu);
    let w = transcript.challenge_scalar("range-w");

    let vs = ipp::verification_scalars(&proof.ipp, n_total, transcript)
        .map_err(RangeFail::Malformed)?;
    let c = transcript.challenge_scalar("range-batch");

    let decompress = |p: &CompressedRistretto, what: &str| {
        p.decompress()
            .ok_or_else(|| RangeFail::Malformed(format!("non-canonical point in {what}")))
    };
    let a_pt = decompress(&proof.a, "A")?;
    let s_pt = decompress(&proof.s, "S")?;
    let t1_pt = decompress(&proof.t1, "T1")?;
    let t2_pt = decompress(&proof.t2, "T2")?;
    let mut lr_pts = Vec::with_capacity(2 * proof.ipp.l_vec.len());
    for p in proof.ipp.l_vec.iter().chain(&proof.ipp.r_vec) {
        lr_pts.push(decompress(p, "inner-product rounds")?);
    }

    let y_pow = powers(y, n_total);
    let y_inv_pow = powers(y.invert(), n_total);
    let z_pow = powers(z, m + 3);
    let two_pow = powers(Scalar::from(2u64), nb);
    let d: Vec<Scalar> = (0..n_total)
        .map(|i| z_pow[2 + i / nb] * two_pow[i % nb])
        .collect();

    let sum_y: Scalar = y_pow.iter().sum();
    let sum_2: Scalar = two_pow.iter().sum();
    let sum_z: Scalar = (0..m).map(|j| z_pow[3 + j]).sum();
    let delta = (z - z * z) * sum_y - sum_2 * sum_z;

    let s_inv: Vec<Scalar> = vs.s.iter().map(|x| x.invert()).collect();
    let ab = proof.ipp.a * proof.ipp.b;

    // One combined equation; every term must cancel to the identity.
    let mut scalars: Vec<Scalar> = Vec::new();
    let mut points: Vec<RistrettoPoint> = Vec::new();

    for i in 0..n_total {
        scalars.push(proof.ipp.a * vs.s[i] + z);
        points.push(ctx.g_vec[i]);
    }
    for i in 0..n_total {
        scalars.push(y_inv_pow[i] * (proof.ipp.b * s_inv[i] - d[i]) - z);
        points.push(ctx.h_vec[i]);
    }
    scalars.push(w * (ab - proof.t_hat) + c * (proof.t_hat - delta));
    points.push(ctx.b);
    scalars.push(proof.mu + c * proof.taux);
    points.push(ctx.b_blind);
    scalars.push(-Scalar::ONE);
    points.push(a_pt);
    scalars.push(-x);
    points.push(s_pt);
    scalars.push(-c * x);
    points.push(t1_pt);
    scalars.push(-c * x * x);
    points.push(t2_pt);
    for (j, v) in commitments.iter().enumerate() {
        scalars.push(-c * z_pow[2 + j]);
        points.push(*v);
    }
    for (k, p) in lr_pts.iter().enumerate() {
        let coeff = if k < proof.ipp.l_vec.len() {
            vs.u_sq[k]
        } else {
            vs.u_inv_sq[k - proof.ipp.l_vec.len()]
        };
        scalars.push(-coeff);
        points.push(*p);
    }

    if RistrettoPoint::vartime_multiscalar_mul(&scalars, &points).is_identity() {
        Ok(())
    } else {
        Err(RangeFail::Rejected)
    }
}
