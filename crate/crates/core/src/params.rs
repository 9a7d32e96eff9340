//! Ground parameters and the shared computation context.
//!
//! A context fixes once and for all: the field F_{q^m} (q = p^s), the
//! ramification index e of the series variable u = T^{-1/e}, and the
//! working precision N in u-adic units. Every value in a computation holds
//! an `Arc` to its context; mixing values from incompatible contexts is a
//! programming error and panics.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fq::Fqm;

/// Upper bound q^n for the finite lattices that enumerative sums walk.
pub const MAX_ENUM: u64 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundParams {
    /// Field characteristic.
    pub p: u8,
    /// q = p^s.
    pub s: u32,
    /// Residue extension degree: coefficients live in F_{q^m}.
    pub m: u32,
    /// Ramification index: the series variable is u = T^{-1/e}.
    pub e: i64,
    /// Precision bound in u-adic units: values are known modulo u^N.
    pub n: i64,
}

impl GroundParams {
    pub fn q(&self) -> u64 {
        (0..self.s).fold(1u64, |acc, _| acc * self.p as u64)
    }
}

pub struct Context {
    pub params: GroundParams,
    pub fq: Fqm,
}

pub type Ctx = Arc<Context>;

impl Context {
    /// Build a context from q (must be a prime power <= 9), m, e and the
    /// precision bound n (u-adic units).
    pub fn new(q: u64, m: u32, e: i64, n: i64) -> Result<Ctx> {
        let (p, s) = match q {
            2 => (2, 1),
            3 => (3, 1),
            4 => (2, 2),
            5 => (5, 1),
            7 => (7, 1),
            8 => (2, 3),
            9 => (3, 2),
            _ => {
                return Err(Error::UnsupportedParams(format!(
                    "q = {q} is not a prime power between 2 and 9"
                )))
            }
        };
        if e < 1 || e > 64 {
            return Err(Error::UnsupportedParams(format!("e = {e} (need 1 <= e <= 64)")));
        }
        if n < 4 || n > 1 << 14 {
            return Err(Error::UnsupportedParams(format!("precision n = {n} out of range")));
        }
        let fq = Fqm::new(p, s, m)?;
        Ok(Arc::new(Context {
            params: GroundParams { p, s, m, e, n },
            fq,
        }))
    }

    pub fn q(&self) -> u64 {
        self.params.q()
    }

    /// Same field and ramification, different working precision.
    pub fn with_precision(&self, n: i64) -> Result<Ctx> {
        Context::new(self.q(), self.params.m, self.params.e, n)
    }

    pub fn compatible(&self, other: &Context) -> bool {
        self.params == other.params
    }

    /// q^k as u64, or an error when it leaves the enumeration envelope.
    pub fn q_pow_checked(&self, k: u32) -> Result<u64> {
        let mut acc = 1u64;
        for _ in 0..k {
            acc = acc
                .checked_mul(self.q())
                .filter(|&v| v <= MAX_ENUM)
                .ok_or_else(|| {
                    Error::UnsupportedParams(format!(
                        "q^{k} exceeds the enumeration envelope {MAX_ENUM}"
                    ))
                })?;
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn envelope_is_enforced() {
        assert!(Context::new(11, 1, 1, 64).is_err());
        assert!(Context::new(6, 1, 1, 64).is_err());
        assert!(Context::new(3, 13, 1, 64).is_err());
        assert!(Context::new(3, 1, 0, 64).is_err());
        assert!(Context::new(3, 1, 1, 1).is_err());
        let ctx = Context::new(9, 12, 8, 240).unwrap();
        assert_eq!(ctx.q(), 9);
        assert!(ctx.q_pow_checked(30).is_err());
    }
}

impl std::fmt::Debug for Context {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "Context(q={}, m={}, e={}, n={})",
            self.q(),
            self.params.m,
            self.params.e,
            self.params.n
        )
    }
}
