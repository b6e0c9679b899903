//! End-to-end properties of the commitment-based optimality proofs:
//! completeness, desk-scale soundness by exhaustive witness mutation,
//! transcript size law, statistical hiding of the blinded components, and
//! the serialization round trip.

use lapis::certificate::{extract_certificate, OptimalityCertificate};
use lapis::model::{Sense, WeightMatrix};
use lapis::solvers::{solve, Algorithm};
use lapis::zk::{
    self, commit_instance, decode_proof, encode_proof, proof_size, prove_optimality,
    prove_optimality_unchecked, setup_sized, verify_optimality, Blindings, Reject,
};
use lapis::Error;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn random_cert(n: usize, seed: u64) -> OptimalityCertificate {
    let mut rng = StdRng::seed_from_u64(seed);
    let entries: Vec<i64> = (0..n * n).map(|_| rng.gen_range(0..=60)).collect();
    let w = WeightMatrix::new(n, n, Sense::Minimize, entries).unwrap();
    let res = solve(Algorithm::SapJv, &w).unwrap();
    extract_certificate(&w, &res).unwrap()
}

#[test]
fn completeness_over_random_instances() {
    let ctx = setup_sized("zk-props-complete", 8, 16);
    let mut rng = StdRng::seed_from_u64(0x5eed);
    for trial in 0..100u64 {
        let n = 2 + (trial as usize % 7);
        let cert = random_cert(n, 9000 + trial);
        let blinds = Blindings::random(n, &mut rng);
        let (cs, proof) = prove_optimality(&ctx, &cert, &blinds, &mut rng).unwrap();
        assert_eq!(cs.len(), n * n + 2 * n);
        verify_optimality(&ctx, &cs, &cert.assignment.pairs, cert.optimum, &proof)
            .unwrap_or_else(|e| panic!("trial {trial} (n={n}) rejected: {e}"));
    }
}

#[test]
fn commitment_count_law() {
    let ctx = setup_sized("zk-props-count", 10, 16);
    let mut rng = StdRng::seed_from_u64(1);
    for n in [2usize, 10] {
        let cert = random_cert(n, n as u64);
        let blinds = Blindings::random(n, &mut rng);
        let cs = commit_instance(&ctx, &cert, &blinds).unwrap();
        assert_eq!(cs.len(), n * n + 2 * n);
    }
}

#[test]
fn assignment_weight_commitments_sum_to_the_optimum() {
    let ctx = setup_sized("zk-props-homo", 4, 16);
    let mut rng = StdRng::seed_from_u64(2);
    let n = 4;
    let cert = random_cert(n, 77);
    let blinds = Blindings::random(n, &mut rng);
    let cs = commit_instance(&ctx, &cert, &blinds).unwrap();

    let total = cert
        .assignment
        .pairs
        .iter()
        .map(|&(i, j)| cs.w(i, j).decompress().unwrap())
        .sum::<curve25519_dalek::ristretto::RistrettoPoint>();
    let gamma_sum: curve25519_dalek::scalar::Scalar = cert
        .assignment
        .pairs
        .iter()
        .map(|&(i, j)| blinds.w[i * n + j])
        .sum();
    assert_eq!(
        total,
        zk::pedersen::commit(&ctx, cert.optimum, &gamma_sum)
    );
}

/// Every single-position witness mutation that falsifies the statement is
/// caught. Weights are pushed below the dual bound (slack turns negative),
/// which breaks a tight-edge opening on matched cells and the range bound
/// elsewhere; each dual bump breaks the dual-sum opening.
#[test]
fn soundness_by_exhaustive_single_mutation() {
    let ctx = setup_sized("zk-props-sound", 3, 16);
    let mut rng = StdRng::seed_from_u64(3);
    let n = 3;
    let cert = random_cert(n, 123);
    let matched: Vec<(usize, usize)> = cert.assignment.pairs.clone();

    let mut rejects = Vec::new();
    for pos in 0..n * n + 2 * n {
        let mut bad = cert.clone();
        if pos < n * n {
            let (i, j) = (pos / n, pos % n);
            let slack = bad.weights.at(i, j) - bad.dual.u[i] - bad.dual.v[j];
            let mut entries = bad.weights.entries().to_vec();
            entries[pos] -= slack + 1;
            bad.weights =
                WeightMatrix::new(n, n, Sense::Minimize, entries).unwrap();
        } else if pos < n * n + n {
            bad.dual.u[pos - n * n] += 1;
        } else {
            bad.dual.v[pos - n * n - n] += 1;
        }

        let blinds = Blindings::random(n, &mut rng);
        let (cs, proof) =
            prove_optimality_unchecked(&ctx, &bad, &blinds, &mut rng).unwrap();
        let err = verify_optimality(&ctx, &cs, &bad.assignment.pairs, bad.optimum, &proof)
            .expect_err(&format!("mutation at position {pos} was accepted"));
        match err {
            Error::ProofRejected(r) => rejects.push((pos, r)),
            other => panic!("mutation at {pos} gave {other} instead of a rejection"),
        }
    }

    for (pos, r) in rejects {
        if pos < n * n {
            let cell = (pos / n, pos % n);
            if matched.contains(&cell) {
                assert_eq!(
                    r,
                    Reject::TightEdge {
                        i: cell.0,
                        j: cell.1
                    },
                    "matched weight at {cell:?}"
                );
            } else {
                assert_eq!(r, Reject::Range, "unmatched weight at {cell:?}");
            }
        } else {
            assert_eq!(r, Reject::DualSum, "dual at position {pos}");
        }
    }
}

#[test]
fn forged_negative_slack_is_rejected() {
    // u_0 incremented after the solve: the dual-sum opening breaks, and
    // with a corrected optimum claim the slack range breaks instead.
    let ctx = setup_sized("zk-props-forge", 3, 16);
    let mut rng = StdRng::seed_from_u64(4);
    let mut cert = random_cert(3, 321);
    cert.dual.u[0] += 1;
    let blinds = Blindings::random(3, &mut rng);
    let (cs, proof) = prove_optimality_unchecked(&ctx, &cert, &blinds, &mut rng).unwrap();
    let err =
        verify_optimality(&ctx, &cs, &cert.assignment.pairs, cert.optimum, &proof).unwrap_err();
    assert!(matches!(err, Error::ProofRejected(Reject::DualSum)));

    // Claiming optimum+1 to re-balance the sum leaves a negative slack on
    // row 0's matched cell, so the tight edge or the range bound fails.
    let mut cert2 = random_cert(3, 321);
    cert2.dual.u[0] += 1;
    cert2.optimum += 1;
    cert2.assignment.cost += 1;
    let (cs2, proof2) = prove_optimality_unchecked(&ctx, &cert2, &blinds, &mut rng).unwrap();
    let err2 = verify_optimality(
        &ctx,
        &cs2,
        &cert2.assignment.pairs,
        cert2.optimum,
        &proof2,
    )
    .unwrap_err();
    assert!(matches!(err2, Error::ProofRejected(_)));
}

#[test]
fn transcript_size_matches_the_formula_table() {
    let ctx = setup_sized("zk-props-size", 16, 16);
    let mut rng = StdRng::seed_from_u64(5);
    let expect = [(4usize, 20), (5, 22), (8, 24), (11, 26), (16, 28)];
    for (n, groups) in expect {
        assert_eq!(proof_size(n, 16), (groups, 5));
        let cert = random_cert(n, 500 + n as u64);
        let blinds = Blindings::random(n, &mut rng);
        let (cs, proof) = prove_optimality(&ctx, &cert, &blinds, &mut rng).unwrap();
        assert_eq!(proof.range.group_elements(), groups, "n={n}");
        assert_eq!(proof.range.scalars(), 5, "n={n}");
        verify_optimality(&ctx, &cs, &cert.assignment.pairs, cert.optimum, &proof).unwrap();
    }
}

#[test]
fn serialization_roundtrip_and_manifest() {
    let ctx = setup_sized("zk-props-encode", 5, 16);
    let mut rng = StdRng::seed_from_u64(6);
    let cert = random_cert(5, 808);
    let blinds = Blindings::random(5, &mut rng);
    let (cs, proof) = prove_optimality(&ctx, &cert, &blinds, &mut rng).unwrap();

    let bytes = encode_proof(&cs, &proof);
    let (cs2, proof2) = decode_proof(&bytes).unwrap();
    assert_eq!(encode_proof(&cs2, &proof2), bytes);
    verify_optimality(&ctx, &cs2, &cert.assignment.pairs, cert.optimum, &proof2).unwrap();

    let text = zk::manifest(&cs2, &proof2);
    assert!(text.contains("transcript group elements: 22"));
    assert!(text.contains(": ok"));
}

/// Blinding-dependent transcript components look uniform, and two
/// witnesses with the same public outputs produce statistically
/// indistinguishable byte streams.
#[test]
fn blinded_components_hide_the_witness() {
    let ctx = setup_sized("zk-props-hide", 3, 16);
    let w1 = WeightMatrix::from_rows(
        &[vec![3, 1, 4], vec![1, 5, 9], vec![2, 6, 5]],
        Sense::Minimize,
    )
    .unwrap();
    let w2 = WeightMatrix::from_rows(
        &[vec![10, 1, 4], vec![1, 5, 9], vec![2, 6, 5]],
        Sense::Minimize,
    )
    .unwrap();

    let r1 = solve(Algorithm::Hungarian, &w1).unwrap();
    let r2 = solve(Algorithm::Hungarian, &w2).unwrap();
    assert_eq!(r1.assignment.pairs, r2.assignment.pairs);
    assert_eq!(r1.assignment.cost, r2.assignment.cost);
    let certs = [
        extract_certificate(&w1, &r1).unwrap(),
        extract_certificate(&w2, &r2).unwrap(),
    ];

    // Low 24 bytes of each blinded element; the top bytes of a canonical
    // encoding are structurally biased for points and scalars alike.
    let mut corpora: Vec<Vec<u8>> = vec![Vec::new(), Vec::new()];
    for (which, cert) in certs.iter().enumerate() {
        let mut rng = StdRng::seed_from_u64(40 + which as u64);
        for _ in 0..150 {
            let blinds = Blindings::random(3, &mut rng);
            let (_, proof) = prove_optimality(&ctx, cert, &blinds, &mut rng).unwrap();
            for part in [
                proof.range.a.as_bytes(),
                proof.range.s.as_bytes(),
                proof.range.t1.as_bytes(),
                proof.range.t2.as_bytes(),
                proof.range.taux.as_bytes(),
                proof.range.mu.as_bytes(),
            ] {
                corpora[which].extend_from_slice(&part[..24]);
            }
        }
    }

    // Uniformity of each corpus over 16 high-nibble buckets; chi-squared
    // critical value for df=15 at the 1% level.
    const CHI2_15_001: f64 = 30.578;
    let histogram = |bytes: &[u8]| {
        let mut h = [0f64; 16];
        for b in bytes {
            h[(b >> 4) as usize] += 1.0;
        }
        h
    };
    for corpus in &corpora {
        let h = histogram(corpus);
        let expected = corpus.len() as f64 / 16.0;
        let chi2: f64 = h.iter().map(|c| (c - expected).powi(2) / expected).sum();
        assert!(chi2 < CHI2_15_001, "blinded bytes not uniform: {chi2:.1}");
    }

    // Two-sample homogeneity between the corpora.
    let (ha, hb) = (histogram(&corpora[0]), histogram(&corpora[1]));
    let chi2: f64 = ha
        .iter()
        .zip(&hb)
        .map(|(a, b)| (a - b).powi(2) / (a + b))
        .sum();
    assert!(
        chi2 < CHI2_15_001,
        "transcripts distinguish the witnesses: {chi2:.1}"
    );
}

/// Proving cost grows roughly linearly in the padded batch size.
#[test]
fn prove_time_growth_is_bounded() {
    let ctx = setup_sized("zk-props-growth", 16, 16);
    let mut rng = StdRng::seed_from_u64(7);
    let mut timed = |n: usize| {
        let cert = random_cert(n, 700 + n as u64);
        let blinds = Blindings::random(n, &mut rng);
        let mut best = f64::INFINITY;
        for _ in 0..3 {
            let start = std::time::Instant::now();
            let (cs, proof) = prove_optimality(&ctx, &cert, &blinds, &mut rng).unwrap();
            best = best.min(start.elapsed().as_secs_f64());
            std::hint::black_box((cs, proof));
        }
        best
    };
    // Batch sizes 256 and 4096 bits: 16x the work, so the ratio should
    // sit near 16 and must stay well clear of quadratic blowup (256x).
    let t4 = timed(4);
    let t16 = timed(16);
    let ratio = t16 / t4;
    assert!(ratio > 2.0, "n=16 proving suspiciously cheap: {ratio:.2}");
    assert!(ratio < 100.0, "proving blew up superlinearly: {ratio:.2}");
}
