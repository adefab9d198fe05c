//! Prime-field arithmetic and parameter validation.
//!
//! Residues are plain `u64` values in `[0, p)`. Moduli are limited to
//! `p < 2^31` so a product of two residues always fits in a `u64`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest modulus accepted (exclusive).
pub const MAX_MODULUS: u64 = 1 << 31;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParamError {
    #[error("modulus {0} is not a prime below 2^31")]
    NotPrime(u64),
    #[error("degree {0} must be at least 2")]
    DegreeTooSmall(u32),
    #[error("degree {d} does not divide p - 1 = {}", .p - 1)]
    DegreeNotDividing { p: u64, d: u32 },
    #[error("leading coefficient is zero modulo {0}")]
    ZeroLeadingCoefficient(u64),
    #[error("constant term {c} is not a residue modulo {p}")]
    ConstantOutOfRange { p: u64, c: u64 },
}

/// Validated parameters of `f(X) = A X^d + C` over `F_p`, together with the
/// fixed primitive `d`-th root of unity `gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldParams {
    pub p: u64,
    pub d: u32,
    pub a: u64,
    pub c: u64,
    pub gamma: u64,
}

impl FieldParams {
    /// Validate `(p, d, a)`, reduce `a` modulo `p`, and pick the smallest
    /// primitive `d`-th root of unity.
    pub fn new(p: u64, d: u32, a: u64, c: u64) -> Result<Self, ParamError> {
        validate_params(p, d, a)?;
        if c >= p {
            return Err(ParamError::ConstantOutOfRange { p, c });
        }
        let gamma = primitive_dth_root(p, d)?;
        Ok(Self { p, d, a: a % p, c, gamma })
    }
}

/// Deterministic trial division; adequate for `n < 2^31`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 || n % 3 == 0 {
        return false;
    }
    let mut i = 5;
    while i * i <= n {
        if n % i == 0 || n % (i + 2) == 0 {
            return false;
        }
        i += 6;
    }
    true
}

/// Accepts iff `p` is a prime below 2^31, `d >= 2`, `d | p - 1` and
/// `A != 0 (mod p)`.
pub fn validate_params(p: u64, d: u32, a: u64) -> Result<(), ParamError> {
    if p >= MAX_MODULUS || !is_prime(p) {
        return Err(ParamError::NotPrime(p));
    }
    if d < 2 {
        return Err(ParamError::DegreeTooSmall(d));
    }
    if (p - 1) % d as u64 != 0 {
        return Err(ParamError::DegreeNotDividing { p, d });
    }
    if a % p == 0 {
        return Err(ParamError::ZeroLeadingCoefficient(p));
    }
    Ok(())
}

#[inline]
pub fn mul_mod(x: u64, y: u64, p: u64) -> u64 {
    x * y % p
}

/// `x^e mod p` by square-and-multiply, with `0^0 = 1`.
pub fn pow_mod(x: u64, mut e: u64, p: u64) -> u64 {
    debug_assert!(p >= 2);
    let mut base = x % p;
    let mut acc = 1 % p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        e >>= 1;
    }
    acc
}

/// Multiplicative order of a unit `x`, found by direct stepping.
pub fn multiplicative_order(x: u64, p: u64) -> Option<u64> {
    let x = x % p;
    if x == 0 {
        return None;
    }
    let mut acc = x;
    let mut e = 1;
    while acc != 1 {
        acc = mul_mod(acc, x, p);
        e += 1;
    }
    Some(e)
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut q = 2;
    while q * q <= n {
        if n % q == 0 {
            out.push(q);
            while n % q == 0 {
                n /= q;
            }
        }
        q += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Smallest `gamma` in `[2, p - 1]` of multiplicative order exactly `d`.
pub fn primitive_dth_root(p: u64, d: u32) -> Result<u64, ParamError> {
    if d < 2 {
        return Err(ParamError::DegreeTooSmall(d));
    }
    if p < 3 || (p - 1) % d as u64 != 0 {
        return Err(ParamError::DegreeNotDividing { p, d });
    }
    let d64 = d as u64;
    let factors = prime_factors(d64);
    // order is exactly d iff x^d = 1 and x^(d/q) != 1 for each prime q | d
    (2..p)
        .find(|&x| {
            pow_mod(x, d64, p) == 1 && factors.iter().all(|&q| pow_mod(x, d64 / q, p) != 1)
        })
        .ok_or(ParamError::DegreeNotDividing { p, d })
}

/// Primes in `[lo, hi]`, ascending.
pub fn primes_in(lo: u64, hi: u64) -> Vec<u64> {
    (lo..=hi).filter(|&n| is_prime(n)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation_examples() {
        assert_eq!(validate_params(5, 2, 1), Ok(()));
        assert_eq!(validate_params(5, 3, 1), Err(ParamError::DegreeNotDividing { p: 5, d: 3 }));
        assert_eq!(validate_params(5, 2, 0), Err(ParamError::ZeroLeadingCoefficient(5)));
        assert_eq!(validate_params(9, 2, 1), Err(ParamError::NotPrime(9)));
        assert_eq!(validate_params(7, 1, 1), Err(ParamError::DegreeTooSmall(1)));
        assert_eq!(validate_params(7, 2, 14), Err(ParamError::ZeroLeadingCoefficient(7)));
    }

    #[test]
    fn pow_mod_examples() {
        assert_eq!(pow_mod(3, 4, 5), 1);
        assert_eq!(pow_mod(0, 0, 7), 1);
        assert_eq!(pow_mod(6, 0, 7), 1);
        assert_eq!(pow_mod(2, 10, 1_000_003), 1024);
        assert_eq!(pow_mod(0, 5, 7), 0);
    }

    #[test]
    fn fermat_small_primes() {
        for p in primes_in(2, 200) {
            for x in 1..p {
                assert_eq!(pow_mod(x, p - 1, p), 1, "x={x} p={p}");
            }
        }
    }

    #[test]
    fn primitive_root_examples() {
        assert_eq!(primitive_dth_root(5, 2), Ok(4));
        assert_eq!(primitive_dth_root(7, 3), Ok(2));
        assert_eq!(primitive_dth_root(13, 4), Ok(5));
        assert!(primitive_dth_root(5, 3).is_err());
    }

    #[test]
    fn primitive_root_has_exact_order() {
        for p in primes_in(3, 400) {
            for d in 2..=(p - 1) as u32 {
                if (p - 1) % d as u64 != 0 {
                    continue;
                }
                let g = primitive_dth_root(p, d).unwrap();
                assert_eq!(pow_mod(g, d as u64, p), 1);
                for e in 1..d as u64 {
                    assert_ne!(pow_mod(g, e, p), 1, "p={p} d={d} g={g} e={e}");
                }
                // smallest: nothing below it has order d
                for x in 2..g {
                    assert_ne!(multiplicative_order(x, p), Some(d as u64));
                }
            }
        }
    }

    #[test]
    fn valid_params_admit_root() {
        for p in primes_in(2, 300) {
            for d in 2..12 {
                if validate_params(p, d, 1).is_ok() {
                    assert!(FieldParams::new(p, d, 1, 0).is_ok());
                }
            }
        }
    }

    #[test]
    fn primality() {
        let small: Vec<u64> = primes_in(0, 30);
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert!(is_prime(2_147_483_647));
        assert!(!is_prime(2_147_483_649));
    }
}
