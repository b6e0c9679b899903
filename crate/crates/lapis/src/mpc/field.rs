//! Arithmetic modulo a fixed 62-bit prime.
//!
//! The prime is the smallest prime above 2^61, which leaves enough headroom
//! to embed signed integers of up to 60 bits via the centered representation
//! `x mod p` with lift to `(-p/2, p/2]`.

/// The field modulus, `2^61 + 15`.
pub const PRIME: u64 = 2_305_843_009_213_693_967;

/// Bits available below the modulus; masked values must stay under `2^60`
/// so the centered lift is unambiguous.
pub const FIELD_BITS: u32 = 61;

#[inline]
pub fn add(a: u64, b: u64) -> u64 {
    let s = a + b;
    if s >= PRIME {
        s - PRIME
    } else {
        s
    }
}

#[inline]
pub fn sub(a: u64, b: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + PRIME - b
    }
}

#[inline]
pub fn neg(a: u64) -> u64 {
    if a == 0 {
        0
    } else {
        PRIME - a
    }
}

#[inline]
pub fn mul(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % PRIME as u128) as u64
}

pub fn pow(mut base: u64, mut exp: u64) -> u64 {
    let mut acc = 1u64;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul(acc, base);
        }
        base = mul(base, base);
        exp >>= 1;
    }
    acc
}

/// Multiplicative inverse by Fermat's little theorem. Panics on zero.
pub fn inv(a: u64) -> u64 {
    assert!(a != 0, "zero has no inverse");
    pow(a, PRIME - 2)
}

/// Embed a signed integer as a field element.
#[inline]
pub fn from_i64(x: i64) -> u64 {
    if x >= 0 {
        x as u64 % PRIME
    } else {
        PRIME - ((-(x as i128)) as u64 % PRIME)
    }
}

/// Centered lift: the unique representative in `(-p/2, p/2]`.
#[inline]
pub fn to_i64(v: u64) -> i64 {
    if v > PRIME / 2 {
        -((PRIME - v) as i64)
    } else {
        v as i64
    }
}

/// Evaluate the degree-1 polynomial `c0 + c1 x` at `x`.
#[inline]
pub fn eval1(c0: u64, c1: u64, x: u64) -> u64 {
    add(c0, mul(c1, x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modulus_is_prime_sized() {
        assert!(PRIME > 1 << 61);
        assert!(PRIME < 1 << 62);
    }

    #[test]
    fn signed_roundtrip() {
        for x in [0i64, 1, -1, 5, -5, i64::from(i32::MAX), -(1 << 59)] {
            assert_eq!(to_i64(from_i64(x)), x, "roundtrip of {x}");
        }
    }

    #[test]
    fn inverse_law() {
        for a in [1u64, 2, 3, 12345, PRIME - 1] {
            assert_eq!(mul(a, inv(a)), 1);
        }
    }

    #[test]
    fn add_sub_wraparound() {
        assert_eq!(add(PRIME - 1, 1), 0);
        assert_eq!(sub(0, 1), PRIME - 1);
        assert_eq!(neg(1), PRIME - 1);
        assert_eq!(neg(0), 0);
    }
}
