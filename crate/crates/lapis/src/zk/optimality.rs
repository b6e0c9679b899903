//! Commitment-level optimality proofs.
//!
//! The prover commits to the witness (weights and duals), publishes the
//! assignment and optimum, and shows the four optimality conditions on the
//! commitments:
//!
//! * structure: the assignment is a complete matching, checked in clear,
//! * dual sum: the homomorphic sum of all dual commitments opens to the
//!   optimum, shown by revealing the aggregate blinding,
//! * tight edges: each matched pair's derived slack commitment
//!   `C_w - C_u - C_v` opens to zero, shown by revealing its blinding,
//! * feasibility: all `n^2` derived slack commitments hold values in
//!   `[0, 2^width)`, shown by one aggregated range proof.
//!
//! Tightness on a complete matching plus the dual-sum opening force the
//! matching's cost to equal the optimum, so nothing else about the weights
//! leaks. The range proof batches `next_pow2(n^2)` ranges; the padding
//! slots commit to zero under fresh blindings and ride along.

use curve25519_dalek::ristretto::RistrettoPoint;
use curve25519_dalek::scalar::Scalar;
use curve25519_dalek::traits::VartimeMultiscalarMul;
use rand::{CryptoRng, RngCore};

use super::group::{next_pow2, scalar_from_i64, GroupContext};
use super::pedersen::{commit, commit_instance, Blindings, Commitment, InstanceCommitments};
use super::range::{self, rand_scalar, RangeFail, RangeProof};
use super::transcript::Transcript;
use super::Reject;
use crate::certificate::{verify_certificate_clear, OptimalityCertificate};
use crate::model::Sense;
use crate::{Error, Result};

const DOMAIN: &str = "assignment-optimality-proof/v1";

/// Everything the verifier needs beyond the instance commitments.
#[derive(Clone, Debug)]
pub struct FeasibilityProof {
    pub n: usize,
    pub width: u32,
    pub sense: Sense,
    pub optimum: i64,
    pub assignment: Vec<(usize, usize)>,
    /// Opening of the blinding on `sum(C_u) + sum(C_v)`.
    pub beta_sum: Scalar,
    /// Opening of the blinding on each matched pair's slack commitment,
    /// in assignment order.
    pub tight_blinds: Vec<Scalar>,
    /// Commitments to zero that pad the range batch to a power of two.
    pub dummies: Vec<Commitment>,
    /// Aggregated range proof over all padded slack commitments.
    pub range: RangeProof,
}

/// Transcript group-element and scalar counts for side `n` and the given
/// range width: `(2 * (log2(next_pow2(n^2)) + log2(width)) + 4, 5)`.
pub fn proof_size(n: usize, width: u32) -> (usize, usize) {
    let m = next_pow2(n * n);
    let rounds = m.trailing_zeros() + width.next_power_of_two().trailing_zeros();
    (2 * rounds as usize + 4, 5)
}

fn slack_sign(sense: Sense) -> i64 {
    match sense {
        Sense::Minimize => 1,
        Sense::Maximize => -1,
    }
}

fn seed_transcript(proof_n: usize, ctx: &GroupContext, p: &ProofStatement<'_>) -> Transcript {
    let mut t = Transcript::new(DOMAIN);
    t.append_bytes("context-label", ctx.label.as_bytes());
    t.append_u64("n", proof_n as u64);
    t.append_u64("width", ctx.width as u64);
    t.append_bytes("sense", p.sense.to_string().as_bytes());
    t.append_i64("optimum", p.optimum);
    for &(i, j) in p.assignment {
        t.append_u64("pair-row", i as u64);
        t.append_u64("pair-col", j as u64);
    }
    for c in &p.commitments.points {
        t.append_point("instance", c);
    }
    for d in p.dummies {
        t.append_point("dummy", d);
    }
    t.append_scalar("beta-sum", p.beta_sum);
    for b in p.tight_blinds {
        t.append_scalar("tight", b);
    }
    t
}

struct ProofStatement<'a> {
    sense: Sense,
    optimum: i64,
    assignment: &'a [(usize, usize)],
    commitments: &'a InstanceCommitments,
    dummies: &'a [Commitment],
    beta_sum: &'a Scalar,
    tight_blinds: &'a [Scalar],
}

/// Prove a verified certificate. Rejects certificates that do not pass the
/// cleartext check, and instances whose slacks do not fit the range width.
pub fn prove_optimality<R: RngCore + CryptoRng>(
    ctx: &GroupContext,
    cert: &OptimalityCertificate,
    blinds: &Blindings,
    rng: &mut R,
) -> Result<(InstanceCommitments, FeasibilityProof)> {
    verify_certificate_clear(cert)?;
    let n = cert.weights.rows();
    let sign = slack_sign(cert.weights.sense());
    let bound = 1i64 << ctx.width;
    for i in 0..n {
        for j in 0..n {
            let s = sign * (cert.weights.at(i, j) - cert.dual.u[i] - cert.dual.v[j]);
            if !(0..bound).contains(&s) {
                return Err(Error::WidthOverflow {
                    value: s,
                    width: ctx.width,
                });
            }
        }
    }
    prove_optimality_unchecked(ctx, cert, blinds, rng)
}

/// Prove without screening the certificate first. A false certificate
/// still produces a transcript, but one the verifier rejects; this exists
/// so soundness can be exercised end to end.
pub fn prove_optimality_unchecked<R: RngCore + CryptoRng>(
    ctx: &GroupContext,
    cert: &OptimalityCertificate,
    blinds: &Blindings,
    rng: &mut R,
) -> Result<(InstanceCommitments, FeasibilityProof)> {
    let n = cert.weights.rows();
    let sense = cert.weights.sense();
    let sign = slack_sign(sense);
    let commitments = commit_instance(ctx, cert, blinds)?;

    let m = next_pow2(n * n);
    let mut values = Vec::with_capacity(m);
    let mut gammas = Vec::with_capacity(m);
    for i in 0..n {
        for j in 0..n {
            values.push(sign * (cert.weights.at(i, j) - cert.dual.u[i] - cert.dual.v[j]));
            gammas.push(
                scalar_from_i64(sign)
                    * (blinds.w[i * n + j] - blinds.u[i] - blinds.v[j]),
            );
        }
    }
    let mut dummies = Vec::with_capacity(m - n * n);
    for _ in n * n..m {
        let gamma = rand_scalar(rng);
        dummies.push(commit(ctx, 0, &gamma).compress());
        values.push(0);
        gammas.push(gamma);
    }

    let beta_sum: Scalar = blinds.u.iter().chain(&blinds.v).sum();
    let tight_blinds: Vec<Scalar> = cert
        .assignment
        .pairs
        .iter()
        .map(|&(i, j)| gammas[i * n + j])
        .collect();

    let mut transcript = seed_transcript(
        n,
        ctx,
        &ProofStatement {
            sense,
            optimum: cert.optimum,
            assignment: &cert.assignment.pairs,
            commitments: &commitments,
            dummies: &dummies,
            beta_sum: &beta_sum,
            tight_blinds: &tight_blinds,
        },
    );
    let range = range::prove_aggregated(ctx, &mut transcript, &values, &gammas, rng);

    let proof = FeasibilityProof {
        n,
        width: ctx.width,
        sense,
        optimum: cert.optimum,
        assignment: cert.assignment.pairs.clone(),
        beta_sum,
        tight_blinds,
        dummies,
        range,
    };
    Ok((commitments, proof))
}

/// Check a proof against the published commitments and public outputs.
///
/// Errors distinguish a malformed transcript ([`Error::MalformedProof`])
/// from a well-formed transcript whose statement is false
/// ([`Error::ProofRejected`]). Conditions are checked in the order
/// structure, dual sum, tight edges, range.
pub fn verify_optimality(
    ctx: &GroupContext,
    commitments: &InstanceCommitments,
    assignment: &[(usize, usize)],
    optimum: i64,
    proof: &FeasibilityProof,
) -> Result<()> {
    let n = commitments.n;
    let reject = |r: Reject| Err(Error::ProofRejected(r));
    let malformed = |msg: String| Err(Error::MalformedProof(msg));

    // Shape of the transcript itself.
    if proof.width != ctx.width {
        return malformed(format!(
            "proof is for width {} but the context uses {}",
            proof.width, ctx.width
        ));
    }
    if commitments.len() != n * n + 2 * n {
        return malformed(format!(
            "expected {} instance commitments, got {}",
            n * n + 2 * n,
            commitments.len()
        ));
    }
    let m = next_pow2(n * n);
    if proof.dummies.len() != m - n * n {
        return malformed(format!(
            "expected {} padding commitments, got {}",
            m - n * n,
            proof.dummies.len()
        ));
    }
    if proof.tight_blinds.len() != proof.assignment.len() {
        return malformed(format!(
            "{} tight-edge openings for {} pairs",
            proof.tight_blinds.len(),
            proof.assignment.len()
        ));
    }

    // Statement consistency and assignment structure, in clear.
    if proof.n != n || proof.optimum != optimum || proof.assignment != assignment {
        return reject(Reject::Structure(
            "proof statement does not match the claimed outputs".into(),
        ));
    }
    if assignment.len() != n {
        return reject(Reject::Structure(format!(
            "{} pairs for side {n}",
            assignment.len()
        )));
    }
    let mut row_seen = vec![false; n];
    let mut col_seen = vec![false; n];
    for &(i, j) in assignment {
        if i >= n || j >= n {
            return reject(Reject::Structure(format!("pair ({i},{j}) out of range")));
        }
        if row_seen[i] || col_seen[j] {
            return reject(Reject::Structure(format!(
                "pair ({i},{j}) reuses a row or column"
            )));
        }
        row_seen[i] = true;
        col_seen[j] = true;
    }

    // Decompress everything once.
    let mut pts = Vec::with_capacity(commitments.len());
    for c in &commitments.points {
        match c.decompress() {
            Some(p) => pts.push(p),
            None => return malformed("non-canonical instance commitment".into()),
        }
    }
    let mut dummy_pts = Vec::with_capacity(proof.dummies.len());
    for c in &proof.dummies {
        match c.decompress() {
            Some(p) => dummy_pts.push(p),
            None => return malformed("non-canonical padding commitment".into()),
        }
    }
    let w_at = |i: usize, j: usize| &pts[i * n + j];
    let u_at = |i: usize| &pts[n * n + i];
    let v_at = |j: usize| &pts[n * n + n + j];

    // Dual sum: sum of all dual commitments opens to the optimum.
    let dual_total: RistrettoPoint = pts[n * n..].iter().sum();
    if dual_total != commit(ctx, optimum, &proof.beta_sum) {
        return reject(Reject::DualSum);
    }

    // Derived slack commitments, row-major, then padding.
    let sign = scalar_from_i64(slack_sign(proof.sense));
    let mut slacks = Vec::with_capacity(m);
    for i in 0..n {
        for j in 0..n {
            slacks.push(RistrettoPoint::vartime_multiscalar_mul(
                [&sign, &(-sign), &(-sign)],
                [w_at(i, j), u_at(i), v_at(j)],
            ));
        }
    }
    slacks.extend(dummy_pts);

    // Tight edges: matched slacks open to zero.
    for (&(i, j), gamma) in assignment.iter().zip(&proof.tight_blinds) {
        if slacks[i * n + j] != ctx.b_blind * gamma {
            return reject(Reject::TightEdge { i, j });
        }
    }

    // Feasibility: every slack is in range.
    let mut transcript = seed_transcript(
        proof.n,
        ctx,
        &ProofStatement {
            sense: proof.sense,
            optimum: proof.optimum,
            assignment: &proof.assignment,
            commitments,
            dummies: &proof.dummies,
            beta_sum: &proof.beta_sum,
            tight_blinds: &proof.tight_blinds,
        },
    );
    match range::verify_aggregated(ctx, &mut transcript, &slacks, &proof.range) {
        Ok(()) => Ok(()),
        Err(RangeFail::Malformed(msg)) => malformed(msg),
        Err(RangeFail::Rejected) => reject(Reject::Range),
    }
}
