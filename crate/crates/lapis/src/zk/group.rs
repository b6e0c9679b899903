//! Transparent group setup over Ristretto.
//!
//! All generators are derived by hashing a public label, so the setup has no
//! trapdoor and two parties running it with the same label agree bit for
//! bit. The derived points have no known discrete-log relations to each
//! other by construction.

use curve25519_dalek::ristretto::RistrettoPoint;
use curve25519_dalek::scalar::Scalar;
use sha2::Sha512;

/// Default bit width of a single proven range.
pub const RANGE_WIDTH: u32 = 16;

/// Largest problem side the default context supports; the generator vectors
/// are sized for `next_pow2(MAX_SIDE^2) * RANGE_WIDTH` batched range bits.
pub const MAX_SIDE: usize = 16;

/// Prime-order group description with hash-derived generators.
pub struct GroupContext {
    pub label: String,
    /// Bit width of each proven range.
    pub width: u32,
    /// Base for committed values.
    pub b: RistrettoPoint,
    /// Base for blinding factors.
    pub b_blind: RistrettoPoint,
    /// Bit-commitment generator vector.
    pub g_vec: Vec<RistrettoPoint>,
    /// Companion generator vector.
    pub h_vec: Vec<RistrettoPoint>,
}

fn derive_point(label: &str, section: &str, index: usize) -> RistrettoPoint {
    let msg = format!("{label}/{section}/{index}");
    RistrettoPoint::hash_from_bytes::<Sha512>(msg.as_bytes())
}

/// Smallest power of two at least `x`.
pub fn next_pow2(x: usize) -> usize {
    x.next_power_of_two()
}

/// Deterministic transparent setup: same label, same context.
pub fn setup(label: &str) -> GroupContext {
    setup_sized(label, MAX_SIDE, RANGE_WIDTH)
}

/// Setup with explicit capacity, for contexts beyond the default bound.
pub fn setup_sized(label: &str, max_side: usize, width: u32) -> GroupContext {
    let capacity = next_pow2(max_side * max_side) * width as usize;
    GroupContext {
        label: label.to_string(),
        width,
        b: derive_point(label, "value-base", 0),
        b_blind: derive_point(label, "blinding-base", 0),
        g_vec: (0..capacity).map(|i| derive_point(label, "bit", i)).collect(),
        h_vec: (0..capacity)
            .map(|i| derive_point(label, "companion", i))
            .collect(),
    }
}

/// Embed a signed integer as a scalar.
pub fn scalar_from_i64(x: i64) -> Scalar {
    if x >= 0 {
        Scalar::from(x as u64)
    } else {
        -Scalar::from(x.unsigned_abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn setup_is_deterministic() {
        let a = setup_sized("ctx-test", 2, 16);
        let b = setup_sized("ctx-test", 2, 16);
        assert_eq!(a.b, b.b);
        assert_eq!(a.b_blind, b.b_blind);
        assert_eq!(a.g_vec, b.g_vec);
        assert_eq!(a.h_vec, b.h_vec);
    }

    #[test]
    fn different_labels_differ() {
        let a = setup_sized("ctx-a", 2, 16);
        let b = setup_sized("ctx-b", 2, 16);
        assert_ne!(a.b, b.b);
        assert_ne!(a.g_vec[0], b.g_vec[0]);
    }

    #[test]
    fn default_capacity_covers_the_largest_side() {
        let ctx = setup("capacity-check");
        let need = next_pow2(MAX_SIDE * MAX_SIDE) * RANGE_WIDTH as usize;
        assert!(ctx.g_vec.len() >= need);
        assert!(ctx.h_vec.len() >= need);
    }

    #[test]
    fn signed_scalar_embedding() {
        assert_eq!(scalar_from_i64(5), Scalar::from(5u64));
        assert_eq!(scalar_from_i64(-5) + Scalar::from(5u64), Scalar::ZERO);
    }
}
