//! Fiat-Shamir transcript as a SHA-512 hash chain.
//!
//! Every absorbed item is framed with a label and a length, so the byte
//! stream parses unambiguously. Challenges both read and advance the chain
//! state, which binds each challenge to everything absorbed before it.
//!
//! Challenge derivation order for an optimality proof, fixed by the prover
//! and verifier alike:
//!
//! 1. domain label, then the public statement (`n`, range width, optimum,
//!    assignment pairs),
//! 2. the instance commitments in their canonical order, the dummy-slack
//!    commitments, the dual-sum blinding opening and the tight-edge
//!    blinding openings,
//! 3. range proof: absorb `A`, `S`, draw `y`, draw `z`, absorb `T1`, `T2`,
//!    draw `x`,
//! 4. inner-product base weight `w`, then one folding challenge per
//!    halving round, each drawn after absorbing that round's `L`, `R`,
//! 5. the batching weight `c` used by the verifier's combined check.

use curve25519_dalek::ristretto::CompressedRistretto;
use curve25519_dalek::scalar::Scalar;
use sha2::{Digest, Sha512};

pub struct Transcript {
    state: [u8; 64],
}

impl Transcript {
    pub fn new(domain: &str) -> Self {
        let mut t = Transcript { state: [0u8; 64] };
        t.append_bytes("domain", domain.as_bytes());
        t
    }

    fn absorb(&mut self, label: &str, payload: &[u8]) {
        let mut h = Sha512::new();
        h.update(self.state);
        h.update((label.len() as u64).to_le_bytes());
        h.update(label.as_bytes());
        h.update((payload.len() as u64).to_le_bytes());
        h.update(payload);
        self.state = h.finalize().into();
    }

    pub fn append_bytes(&mut self, label: &str, data: &[u8]) {
        self.absorb(label, data);
    }

    pub fn append_u64(&mut self, label: &str, x: u64) {
        self.absorb(label, &x.to_le_bytes());
    }

    pub fn append_i64(&mut self, label: &str, x: i64) {
        self.absorb(label, &x.to_le_bytes());
    }

    pub fn append_point(&mut self, label: &str, p: &CompressedRistretto) {
        self.absorb(label, p.as_bytes());
    }

    pub fn append_scalar(&mut self, label: &str, s: &Scalar) {
        self.absorb(label, s.as_bytes());
    }

    /// Draw a challenge scalar and advance the chain.
    pub fn challenge_scalar(&mut self, label: &str) -> Scalar {
        let mut h = Sha512::new();
        h.update(self.state);
        h.update((label.len() as u64).to_le_bytes());
        h.update(label.as_bytes());
        h.update(b"challenge");
        let wide: [u8; 64] = h.finalize().into();
        self.absorb(label, &wide);
        Scalar::from_bytes_mod_order_wide(&wide)
    }
}
