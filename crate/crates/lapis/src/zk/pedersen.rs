//! Pedersen commitments over the instance.
//!
//! A commitment to `x` with blinding `gamma` is `x * B + gamma * B_blind`.
//! Commitments are additively homomorphic, which is what lets the verifier
//! derive slack commitments `C_w - C_u - C_v` without ever seeing the
//! weights or duals.

use curve25519_dalek::ristretto::{CompressedRistretto, RistrettoPoint};
use curve25519_dalek::scalar::Scalar;
use rand::{CryptoRng, RngCore};

use super::group::{scalar_from_i64, GroupContext};
use super::range::rand_scalar;
use crate::certificate::OptimalityCertificate;
use crate::{Error, Result};

/// A single Pedersen commitment, in canonical compressed form.
pub type Commitment = CompressedRistretto;

/// Commit to a signed value.
pub fn commit(ctx: &GroupContext, value: i64, blinding: &Scalar) -> RistrettoPoint {
    ctx.b * scalar_from_i64(value) + ctx.b_blind * blinding
}

/// The prover's blinding factors, one per committed value.
#[derive(Clone)]
pub struct Blindings {
    /// Row-major, one per weight.
    pub w: Vec<Scalar>,
    /// One per row dual.
    pub u: Vec<Scalar>,
    /// One per column dual.
    pub v: Vec<Scalar>,
}

impl Blindings {
    pub fn random<R: RngCore + CryptoRng>(n: usize, rng: &mut R) -> Self {
        Blindings {
            w: (0..n * n).map(|_| rand_scalar(rng)).collect(),
            u: (0..n).map(|_| rand_scalar(rng)).collect(),
            v: (0..n).map(|_| rand_scalar(rng)).collect(),
        }
    }
}

/// The `n^2 + 2n` instance commitments in canonical order: the weights
/// row-major, then the row duals, then the column duals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstanceCommitments {
    pub n: usize,
    pub points: Vec<Commitment>,
}

impl InstanceCommitments {
    pub fn w(&self, i: usize, j: usize) -> &Commitment {
        &self.points[i * self.n + j]
    }

    pub fn u(&self, i: usize) -> &Commitment {
        &self.points[self.n * self.n + i]
    }

    pub fn v(&self, j: usize) -> &Commitment {
        &self.points[self.n * self.n + self.n + j]
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Commit to a certificate's witness: every weight and both dual vectors.
///
/// Every committed value must fit the context's range width in magnitude;
/// anything larger could not support the slack range proof downstream.
pub fn commit_instance(
    ctx: &GroupContext,
    cert: &OptimalityCertificate,
    blinds: &Blindings,
) -> Result<InstanceCommitments> {
    let n = cert.weights.rows();
    if cert.weights.cols() != n {
        return Err(Error::Shape(format!(
            "proofs cover square instances, got {}x{}",
            n,
            cert.weights.cols()
        )));
    }
    if blinds.w.len() != n * n || blinds.u.len() != n || blinds.v.len() != n {
        return Err(Error::BadParameter(
            "blinding count does not match the instance".into(),
        ));
    }
    let bound = 1i64 << ctx.width;
    let check = |value: i64| -> Result<()> {
        if value.abs() >= bound {
            return Err(Error::WidthOverflow {
                value,
                width: ctx.width,
            });
        }
        Ok(())
    };

    let mut points = Vec::with_capacity(n * n + 2 * n);
    for i in 0..n {
        for j in 0..n {
            let w = cert.weights.at(i, j);
            check(w)?;
            points.push(commit(ctx, w, &blinds.w[i * n + j]).compress());
        }
    }
    for i in 0..n {
        check(cert.dual.u[i])?;
        points.push(commit(ctx, cert.dual.u[i], &blinds.u[i]).compress());
    }
    for j in 0..n {
        check(cert.dual.v[j])?;
        points.push(commit(ctx, cert.dual.v[j], &blinds.v[j]).compress());
    }
    Ok(InstanceCommitments { n, points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Sense, WeightMatrix};
    use crate::solvers::{solve, Algorithm};
    use crate::zk::group::setup_sized;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    fn demo_cert() -> OptimalityCertificate {
        let w = WeightMatrix::from_rows(&[vec![1, 2], vec![2, 4]], Sense::Minimize).unwrap();
        let res = solve(Algorithm::Hungarian, &w).unwrap();
        crate::certificate::extract_certificate(&w, &res).unwrap()
    }

    #[test]
    fn commitments_are_homomorphic() {
        let ctx = setup_sized("pedersen-test", 2, 16);
        let mut rng = StdRng::seed_from_u64(3);
        let g1 = rand_scalar(&mut rng);
        let g2 = rand_scalar(&mut rng);
        let c = commit(&ctx, 7, &g1) + commit(&ctx, -3, &g2);
        assert_eq!(c, commit(&ctx, 4, &(g1 + g2)));
    }

    #[test]
    fn instance_layout_is_row_major_then_duals() {
        let ctx = setup_sized("pedersen-layout", 2, 16);
        let mut rng = StdRng::seed_from_u64(4);
        let cert = demo_cert();
        let blinds = Blindings::random(2, &mut rng);
        let cs = commit_instance(&ctx, &cert, &blinds).unwrap();
        assert_eq!(cs.len(), 4 + 4);
        assert_eq!(
            *cs.w(1, 0),
            commit(&ctx, cert.weights.at(1, 0), &blinds.w[2]).compress()
        );
        assert_eq!(
            *cs.u(1),
            commit(&ctx, cert.dual.u[1], &blinds.u[1]).compress()
        );
        assert_eq!(
            *cs.v(0),
            commit(&ctx, cert.dual.v[0], &blinds.v[0]).compress()
        );
    }

    #[test]
    fn oversized_values_are_refused() {
        let ctx = setup_sized("pedersen-wide", 2, 16);
        let mut rng = StdRng::seed_from_u64(5);
        let w = WeightMatrix::from_rows(
            &[vec![1 << 20, 2], vec![2, 4]],
            Sense::Minimize,
        )
        .unwrap();
        let res = solve(Algorithm::Hungarian, &w).unwrap();
        let cert = crate::certificate::extract_certificate(&w, &res).unwrap();
        let blinds = Blindings::random(2, &mut rng);
        assert!(matches!(
            commit_instance(&ctx, &cert, &blinds),
            Err(Error::WidthOverflow { .. })
        ));
    }
}
