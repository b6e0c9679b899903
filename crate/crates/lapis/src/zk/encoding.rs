//! Proof wire format.
//!
//! A proof file is a magic tag followed by three length-prefixed sections:
//! commitments, public inputs, transcript. All counts and lengths are
//! little-endian `u32`, group elements are 32-byte canonical compressed
//! points, scalars are 32-byte canonical field encodings. Decoding is
//! strict: trailing bytes, short sections or non-canonical scalars are
//! malformed.

use curve25519_dalek::ristretto::CompressedRistretto;
use curve25519_dalek::scalar::Scalar;

use super::ipp::InnerProductProof;
use super::optimality::{proof_size, FeasibilityProof};
use super::pedersen::{Commitment, InstanceCommitments};
use super::range::RangeProof;
use crate::model::Sense;
use crate::{Error, Result};

const MAGIC: &[u8; 8] = b"LZKP0001";

fn put_u32(out: &mut Vec<u8>, x: usize) {
    out.extend_from_slice(&(x as u32).to_le_bytes());
}

fn put_point(out: &mut Vec<u8>, p: &Commitment) {
    out.extend_from_slice(p.as_bytes());
}

fn put_scalar(out: &mut Vec<u8>, s: &Scalar) {
    out.extend_from_slice(s.as_bytes());
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(buf: &'a [u8]) -> Self {
        Reader { buf, pos: 0 }
    }

    fn take(&mut self, len: usize, what: &str) -> Result<&'a [u8]> {
        if self.pos + len > self.buf.len() {
            return Err(Error::MalformedProof(format!("truncated {what}")));
        }
        let s = &self.buf[self.pos..self.pos + len];
        self.pos += len;
        Ok(s)
    }

    fn u32(&mut self, what: &str) -> Result<usize> {
        let b = self.take(4, what)?;
        Ok(u32::from_le_bytes(b.try_into().unwrap()) as usize)
    }

    fn i64(&mut self, what: &str) -> Result<i64> {
        let b = self.take(8, what)?;
        Ok(i64::from_le_bytes(b.try_into().unwrap()))
    }

    fn point(&mut self, what: &str) -> Result<Commitment> {
        let b = self.take(32, what)?;
        Ok(CompressedRistretto(b.try_into().unwrap()))
    }

    fn scalar(&mut self, what: &str) -> Result<Scalar> {
        let b: [u8; 32] = self.take(32, what)?.try_into().unwrap();
        Option::<Scalar>::from(Scalar::from_canonical_bytes(b))
            .ok_or_else(|| Error::MalformedProof(format!("non-canonical scalar in {what}")))
    }

    fn done(&self, what: &str) -> Result<()> {
        if self.pos != self.buf.len() {
            return Err(Error::MalformedProof(format!(
                "{} trailing bytes after {what}",
                self.buf.len() - self.pos
            )));
        }
        Ok(())
    }
}

fn sense_code(s: Sense) -> u8 {
    match s {
        Sense::Minimize => 0,
        Sense::Maximize => 1,
    }
}

/// Serialize commitments and proof into the three-section wire format.
pub fn encode_proof(commitments: &InstanceCommitments, proof: &FeasibilityProof) -> Vec<u8> {
    let mut commits = Vec::new();
    put_u32(&mut commits, commitments.n);
    for p in &commitments.points {
        put_point(&mut commits, p);
    }
    put_u32(&mut commits, proof.dummies.len());
    for p in &proof.dummies {
        put_point(&mut commits, p);
    }

    let mut public = Vec::new();
    put_u32(&mut public, proof.width as usize);
    public.push(sense_code(proof.sense));
    public.extend_from_slice(&proof.optimum.to_le_bytes());
    put_u32(&mut public, proof.assignment.len());
    for &(i, j) in &proof.assignment {
        put_u32(&mut public, i);
        put_u32(&mut public, j);
    }
    put_scalar(&mut public, &proof.beta_sum);
    put_u32(&mut public, proof.tight_blinds.len());
    for b in &proof.tight_blinds {
        put_scalar(&mut public, b);
    }

    let mut transcript = Vec::new();
    put_point(&mut transcript, &proof.range.a);
    put_point(&mut transcript, &proof.range.s);
    put_point(&mut transcript, &proof.range.t1);
    put_point(&mut transcript, &proof.range.t2);
    put_u32(&mut transcript, proof.range.ipp.l_vec.len());
    for p in proof.range.ipp.l_vec.iter().chain(&proof.range.ipp.r_vec) {
        put_point(&mut transcript, p);
    }
    put_scalar(&mut transcript, &proof.range.t_hat);
    put_scalar(&mut transcript, &proof.range.taux);
    put_scalar(&mut transcript, &proof.range.mu);
    put_scalar(&mut transcript, &proof.range.ipp.a);
    put_scalar(&mut transcript, &proof.range.ipp.b);

    let mut out = Vec::with_capacity(
        MAGIC.len() + 12 + commits.len() + public.len() + transcript.len(),
    );
    out.extend_from_slice(MAGIC);
    for section in [&commits, &public, &transcript] {
        put_u32(&mut out, section.len());
        out.extend_from_slice(section);
    }
    out
}

/// Parse the wire format back. Strict: every count, length and scalar must
/// be exactly right, so `encode(decode(bytes)) == bytes`.
pub fn decode_proof(bytes: &[u8]) -> Result<(InstanceCommitments, FeasibilityProof)> {
    let mut r = Reader::new(bytes);
    let magic = r.take(8, "magic")?;
    if magic != MAGIC {
        return Err(Error::MalformedProof("bad magic".into()));
    }
    let mut sections = Vec::with_capacity(3);
    for name in ["commitments", "public inputs", "transcript"] {
        let len = r.u32(name)?;
        sections.push(Reader::new(r.take(len, name)?));
    }
    r.done("the last section")?;
    let [mut commits, mut public, mut transcript]: [Reader; 3] =
        sections.try_into().ok().expect("three sections");

    let n = commits.u32("side")?;
    if n == 0 || n > 4096 {
        return Err(Error::MalformedProof(format!("unreasonable side {n}")));
    }
    let mut points = Vec::with_capacity(n * n + 2 * n);
    for _ in 0..n * n + 2 * n {
        points.push(commits.point("instance commitments")?);
    }
    let dummy_count = commits.u32("padding count")?;
    if dummy_count != n.pow(2).next_power_of_two() - n * n {
        return Err(Error::MalformedProof(format!(
            "padding count {dummy_count} does not fit side {n}"
        )));
    }
    let mut dummies = Vec::with_capacity(dummy_count);
    for _ in 0..dummy_count {
        dummies.push(commits.point("padding commitments")?);
    }
    commits.done("commitments")?;
    let commitments = InstanceCommitments { n, points };

    let width = public.u32("width")? as u32;
    if width == 0 || width > 32 {
        return Err(Error::MalformedProof(format!("unreasonable width {width}")));
    }
    let sense = match public.take(1, "sense")?[0] {
        0 => Sense::Minimize,
        1 => Sense::Maximize,
        other => {
            return Err(Error::MalformedProof(format!("unknown sense code {other}")));
        }
    };
    let optimum = public.i64("optimum")?;
    let pair_count = public.u32("pair count")?;
    if pair_count != n {
        return Err(Error::MalformedProof(format!(
            "{pair_count} pairs for side {n}"
        )));
    }
    let mut assignment = Vec::with_capacity(pair_count);
    for _ in 0..pair_count {
        let i = public.u32("pair row")?;
        let j = public.u32("pair col")?;
        assignment.push((i, j));
    }
    let beta_sum = public.scalar("dual-sum opening")?;
    let tight_count = public.u32("tight-edge count")?;
    if tight_count != n {
        return Err(Error::MalformedProof(format!(
            "{tight_count} tight-edge openings for side {n}"
        )));
    }
    let mut tight_blinds = Vec::with_capacity(tight_count);
    for _ in 0..tight_count {
        tight_blinds.push(public.scalar("tight-edge openings")?);
    }
    public.done("public inputs")?;

    let a = transcript.point("A")?;
    let s = transcript.point("S")?;
    let t1 = transcript.point("T1")?;
    let t2 = transcript.point("T2")?;
    let rounds = transcript.u32("round count")?;
    let expected_rounds = (proof_size(n, width).0 - 4) / 2;
    if rounds != expected_rounds {
        return Err(Error::MalformedProof(format!(
            "{rounds} folding rounds, expected {expected_rounds}"
        )));
    }
    let mut l_vec = Vec::with_capacity(rounds);
    let mut r_vec = Vec::with_capacity(rounds);
    for _ in 0..rounds {
        l_vec.push(transcript.point("folding rounds")?);
    }
    for _ in 0..rounds {
        r_vec.push(transcript.point("folding rounds")?);
    }
    let t_hat = transcript.scalar("t-hat")?;
    let taux = transcript.scalar("tau-x")?;
    let mu = transcript.scalar("mu")?;
    let ipp_a = transcript.scalar("final a")?;
    let ipp_b = transcript.scalar("final b")?;
    transcript.done("transcript")?;

    let proof = FeasibilityProof {
        n,
        width,
        sense,
        optimum,
        assignment,
        beta_sum,
        tight_blinds,
        dummies,
        range: RangeProof {
            a,
            s,
            t1,
            t2,
            t_hat,
            taux,
            mu,
            ipp: InnerProductProof {
                l_vec,
                r_vec,
                a: ipp_a,
                b: ipp_b,
            },
        },
    };
    Ok((commitments, proof))
}

/// Human-readable summary of a proof's composition, with the transcript
/// size checked against the closed-form count.
pub fn manifest(commitments: &InstanceCommitments, proof: &FeasibilityProof) -> String {
    let (groups, scalars) = proof_size(proof.n, proof.width);
    let actual_groups = proof.range.group_elements();
    let encoded = encode_proof(commitments, proof).len();
    let check = if actual_groups == groups && proof.range.scalars() == scalars {
        "ok"
    } else {
        "MISMATCH"
    };
    format!(
        "optimality proof manifest\n\
         side:                      {}\n\
         range width:               {} bits\n\
         sense:                     {}\n\
         instance commitments:      {}\n\
         padding commitments:       {}\n\
         ranges proven:             {}\n\
         opening scalars:           {} (1 dual sum + {} tight edges)\n\
         transcript group elements: {actual_groups}\n\
         transcript scalars:        {}\n\
         size formula 2*(log2({})+log2({}))+4 = {groups} group, {scalars} scalar: {check}\n\
         encoded bytes:             {encoded}\n",
        proof.n,
        proof.width,
        proof.sense,
        commitments.len(),
        proof.dummies.len(),
        proof.n * proof.n + proof.dummies.len(),
        1 + proof.tight_blinds.len(),
        proof.tight_blinds.len(),
        proof.range.scalars(),
        (proof.n * proof.n).next_power_of_two(),
        proof.width,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificate::extract_certificate;
    use crate::model::WeightMatrix;
    use crate::solvers::{solve, Algorithm};
    use crate::zk::group::setup_sized;
    use crate::zk::optimality::prove_optimality;
    use crate::zk::pedersen::Blindings;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn sample() -> (InstanceCommitments, FeasibilityProof) {
        let ctx = setup_sized("encode-test", 3, 16);
        let mut rng = StdRng::seed_from_u64(9);
        let w = WeightMatrix::from_rows(
            &[vec![3, 1, 4], vec![1, 5, 9], vec![2, 6, 5]],
            crate::model::Sense::Minimize,
        )
        .unwrap();
        let res = solve(Algorithm::SapJv, &w).unwrap();
        let cert = extract_certificate(&w, &res).unwrap();
        let blinds = Blindings::random(3, &mut rng);
        prove_optimality(&ctx, &cert, &blinds, &mut rng).unwrap()
    }

    #[test]
    fn roundtrip_is_bit_exact() {
        let (cs, proof) = sample();
        let bytes = encode_proof(&cs, &proof);
        let (cs2, proof2) = decode_proof(&bytes).unwrap();
        assert_eq!(encode_proof(&cs2, &proof2), bytes);
        assert_eq!(cs2, cs);
    }

    #[test]
    fn truncation_is_malformed() {
        let (cs, proof) = sample();
        let bytes = encode_proof(&cs, &proof);
        for cut in [3, 8, 20, bytes.len() - 1] {
            assert!(matches!(
                decode_proof(&bytes[..cut]),
                Err(Error::MalformedProof(_))
            ));
        }
    }

    #[test]
    fn trailing_bytes_are_malformed() {
        let (cs, proof) = sample();
        let mut bytes = encode_proof(&cs, &proof);
        bytes.push(0);
        assert!(matches!(
            decode_proof(&bytes),
            Err(Error::MalformedProof(_))
        ));
    }

    #[test]
    fn non_canonical_scalar_is_malformed() {
        let (cs, proof) = sample();
        let mut bytes = encode_proof(&cs, &proof);
        // Last 32 bytes are the final inner-product scalar.
        let last = bytes.len() - 1;
        bytes[last] = 0xff;
        bytes[last - 31..].iter_mut().for_each(|b| *b = 0xff);
        assert!(matches!(
            decode_proof(&bytes),
            Err(Error::MalformedProof(_))
        ));
    }

    #[test]
    fn manifest_reports_the_size_formula() {
        let (cs, proof) = sample();
        let text = manifest(&cs, &proof);
        assert!(text.contains("transcript group elements: 20"));
        assert!(text.contains("transcript scalars:        5"));
        assert!(text.contains(": ok"));
        assert!(text.contains("ranges proven:             16"));
    }
}
