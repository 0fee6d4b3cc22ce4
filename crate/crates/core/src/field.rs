//! Arithmetic in a prime field GF(q).
//!
//! Elements are plain `u64` residues in `[0, q)`. Moduli are restricted to
//! primes below 2^32 so that a product of two residues fits in a `u64`;
//! primality is checked by trial division, which is cheap at that size.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default modulus used for parameter sweeps.
pub const DEFAULT_MODULUS: u64 = 65537;

/// A prime field GF(q).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u64", into = "u64")]
pub struct PrimeField {
    modulus: u64,
}

/// The elementary operations exposed by [`PrimeField::apply`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Inv,
    Pow,
}

fn is_prime(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    if q.is_multiple_of(2) {
        return q == 2;
    }
    let mut d = 3u64;
    while d * d <= q {
        if q.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

impl PrimeField {
    pub fn new(modulus: u64) -> Result<Self> {
        if modulus >= 1 << 32 || !is_prime(modulus) {
            return Err(Error::NotPrime(modulus));
        }
        Ok(Self { modulus })
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Reduces an arbitrary integer into the field.
    #[inline]
    pub fn elem(&self, v: u64) -> u64 {
        v % self.modulus
    }

    /// Maps a signed integer into the field (`-1` becomes `q - 1`).
    #[inline]
    pub fn from_i64(&self, v: i64) -> u64 {
        v.rem_euclid(self.modulus as i64) as u64
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.modulus {
            s - self.modulus
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            self.modulus - (b - a)
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.modulus - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        (a * b) % self.modulus
    }

    pub fn pow(&self, base: u64, mut exp: u64) -> u64 {
        let mut base = base % self.modulus;
        let mut acc = 1 % self.modulus;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse via Fermat's little theorem.
    pub fn inv(&self, a: u64) -> Result<u64> {
        if a.is_multiple_of(self.modulus) {
            return Err(Error::DivisionByZero(self.modulus));
        }
        Ok(self.pow(a, self.modulus - 2))
    }

    pub fn div(&self, a: u64, b: u64) -> Result<u64> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Applies `op` to `(a, b)`. `Inv` ignores `b`; `Pow` treats `b` as the exponent.
    pub fn apply(&self, op: FieldOp, a: u64, b: u64) -> Result<u64> {
        let (a, b) = (self.elem(a), b);
        Ok(match op {
            FieldOp::Add => self.add(a, self.elem(b)),
            FieldOp::Sub => self.sub(a, self.elem(b)),
            FieldOp::Mul => self.mul(a, self.elem(b)),
            FieldOp::Inv => self.inv(a)?,
            FieldOp::Pow => self.pow(a, b),
        })
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        rng.gen_range(0..self.modulus)
    }
}

impl TryFrom<u64> for PrimeField {
    type Error = Error;

    fn try_from(q: u64) -> Result<Self> {
        Self::new(q)
    }
}

impl From<PrimeField> for u64 {
    fn from(f: PrimeField) -> u64 {
        f.modulus
    }
}
