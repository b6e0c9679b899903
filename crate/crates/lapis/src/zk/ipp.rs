//! Logarithmic inner-product argument.
//!
//! Proves knowledge of vectors `a`, `b` with
//! `P = <a, G> + <b, H> + <a, b> * Q` using `2 * log2(n)` group elements
//! and two final scalars. Each round halves the vectors: after drawing a
//! folding challenge `u` the new witness is `a_lo * u + a_hi * u^-1` and
//! `b_lo * u^-1 + b_hi * u`, and the commitment folds as
//! `P' = u^2 * L + P + u^-2 * R`.

use curve25519_dalek::ristretto::{CompressedRistretto, RistrettoPoint};
use curve25519_dalek::scalar::Scalar;
use curve25519_dalek::traits::VartimeMultiscalarMul;

use super::transcript::Transcript;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InnerProductProof {
    pub l_vec: Vec<CompressedRistretto>,
    pub r_vec: Vec<CompressedRistretto>,
    pub a: Scalar,
    pub b: Scalar,
}

fn inner(a: &[Scalar], b: &[Scalar]) -> Scalar {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Prove `<a, b>` against generators `g`, `h` and inner-product base `q`.
/// Vector length must be a power of two.
pub fn prove(
    transcript: &mut Transcript,
    q: &RistrettoPoint,
    g: &[RistrettoPoint],
    h: &[RistrettoPoint],
    mut a: Vec<Scalar>,
    mut b: Vec<Scalar>,
) -> InnerProductProof {
    let mut n = a.len();
    assert!(n.is_power_of_two());
    assert_eq!(b.len(), n);
    let mut g = g[..n].to_vec();
    let mut h = h[..n].to_vec();
    let rounds = n.trailing_zeros() as usize;
    let mut l_vec = Vec::with_capacity(rounds);
    let mut r_vec = Vec::with_capacity(rounds);

    while n > 1 {
        n /= 2;
        let (a_lo, a_hi) = a.split_at(n);
        let (b_lo, b_hi) = b.split_at(n);
        let (g_lo, g_hi) = g.split_at(n);
        let (h_lo, h_hi) = h.split_at(n);

        let c_l = inner(a_lo, b_hi);
        let c_r = inner(a_hi, b_lo);
        let l = RistrettoPoint::vartime_multiscalar_mul(
            a_lo.iter().chain(b_hi.iter()).chain(std::iter::once(&c_l)),
            g_hi.iter().chain(h_lo.iter()).chain(std::iter::once(q)),
        )
        .compress();
        let r = RistrettoPoint::vartime_multiscalar_mul(
            a_hi.iter().chain(b_lo.iter()).chain(std::iter::once(&c_r)),
            g_lo.iter().chain(h_hi.iter()).chain(std::iter::once(q)),
        )
        .compress();

        transcript.append_point("ipp-l", &l);
        transcript.append_point("ipp-r", &r);
        let u = transcript.challenge_scalar("ipp-u");
        let u_inv = u.invert();
        l_vec.push(l);
        r_vec.push(r);

        a = (0..n).map(|i| a_lo[i] * u + a_hi[i] * u_inv).collect();
        b = (0..n).map(|i| b_lo[i] * u_inv + b_hi[i] * u).collect();
        g = (0..n)
            .map(|i| RistrettoPoint::vartime_multiscalar_mul([&u_inv, &u], [&g_lo[i], &g_hi[i]]))
            .collect();
        h = (0..n)
            .map(|i| RistrettoPoint::vartime_multiscalar_mul([&u, &u_inv], [&h_lo[i], &h_hi[i]]))
            .collect();
    }

    InnerProductProof {
        l_vec,
        r_vec,
        a: a[0],
        b: b[0],
    }
}

/// Challenge products the verifier needs: per-round `u^2` and `u^-2`, and
/// the folding coefficients `s_i` such that the final generator is
/// `<s, G>` (and `<s^-1, H>` for the companion side).
pub struct VerificationScalars {
    pub u_sq: Vec<Scalar>,
    pub u_inv_sq: Vec<Scalar>,
    pub s: Vec<Scalar>,
}

/// Replay the transcript and compute the verifier's folded coefficients.
/// Returns an error string when the proof shape does not match `n`.
pub fn verification_scalars(
    proof: &InnerProductProof,
    n: usize,
    transcript: &mut Transcript,
) -> Result<VerificationScalars, String> {
    if !n.is_power_of_two() || n == 0 {
        return Err(format!("inner-product size {n} is not a power of two"));
    }
    let rounds = n.trailing_zeros() as usize;
    if proof.l_vec.len() != rounds || proof.r_vec.len() != rounds {
        return Err(format!(
            "inner-product proof has {} rounds, expected {rounds}",
            proof.l_vec.len()
        ));
    }

    let mut challenges = Vec::with_capacity(rounds);
    for (l, r) in proof.l_vec.iter().zip(&proof.r_vec) {
        transcript.append_point("ipp-l", l);
        transcript.append_point("ipp-r", r);
        challenges.push(transcript.challenge_scalar("ipp-u"));
    }

    let mut u_sq = Vec::with_capacity(rounds);
    let mut u_inv = Vec::with_capacity(rounds);
    for u in &challenges {
        u_sq.push(u * u);
        u_inv.push(u.invert());
    }
    let u_inv_sq: Vec<Scalar> = u_inv.iter().map(|x| x * x).collect();

    // s_i is the product over rounds of u_k or u_k^-1, picked by bit i of
    // the index (most significant round first).
    let mut s = Vec::with_capacity(n);
    for i in 0..n {
        let mut acc = Scalar::ONE;
        for (k, u) in challenges.iter().enumerate() {
            let bit = (i >> (rounds - 1 - k)) & 1;
            acc *= if bit == 1 { *u } else { u_inv[k] };
        }
        s.push(acc);
    }

    Ok(VerificationScalars { u_sq, u_inv_sq, s })
}
