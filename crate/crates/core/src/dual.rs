//! Dual numbers over the series field: exact forward-mode differentiation.
//!
//! A dual number is val + eps*der with eps^2 = 0. Because the coefficient
//! field has characteristic p, the derivative of any q-power vanishes
//! identically: (val + eps*der)^{q^j} = val^{q^j}. Non-archimedean finite
//! differences are useless here (q-power terms drop all low-order
//! information), so every functional determinant in the crate is computed
//! through these lifts.

use crate::error::Result;
use crate::params::Ctx;
use crate::series::Puiseux;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dual {
    pub val: Puiseux,
    pub der: Puiseux,
}

impl Dual {
    /// Lift with derivative 1: the active variable.
    pub fn active(z: Puiseux) -> Dual {
        let one = Puiseux::one(&z.ctx);
        Dual { val: z, der: one }
    }

    /// Lift with derivative 0: a constant.
    pub fn constant(z: Puiseux) -> Dual {
        let zero = Puiseux::zero(&z.ctx);
        Dual { val: z, der: zero }
    }

    pub fn add(&self, o: &Dual) -> Dual {
        Dual { val: self.val.add(&o.val), der: self.der.add(&o.der) }
    }

    pub fn sub(&self, o: &Dual) -> Dual {
        Dual { val: self.val.sub(&o.val), der: self.der.sub(&o.der) }
    }

    pub fn neg(&self) -> Dual {
        Dual { val: self.val.neg(), der: self.der.neg() }
    }

    pub fn mul(&self, o: &Dual) -> Dual {
        Dual {
            val: self.val.mul(&o.val),
            der: self.val.mul(&o.der).add(&self.der.mul(&o.val)),
        }
    }

    /// (val + eps der)^{-1} = val^{-1} - eps der val^{-2}.
    pub fn inv(&self) -> Result<Dual> {
        let vi = self.val.inv()?;
        let der = self.der.mul(&vi).mul(&vi).neg();
        Ok(Dual { val: vi, der })
    }

    pub fn div(&self, o: &Dual) -> Result<Dual> {
        Ok(self.mul(&o.inv()?))
    }

    /// q^j-th power; the derivative dies in characteristic p.
    pub fn q_power(&self, j: u32) -> Dual {
        if j == 0 {
            return self.clone();
        }
        Dual {
            val: self.val.q_power(j),
            der: Puiseux::zero(&self.val.ctx),
        }
    }

    pub fn ctx(&self) -> &Ctx {
        &self.val.ctx
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Context;

    #[test]
    fn product_rule_and_char_p() {
        let c = Context::new(2, 1, 1, 64).unwrap();
        let z = Puiseux::t_pow(&c, 1);
        let x = Dual::active(z.clone());
        // der(x*x) = 2z = 0 in characteristic 2
        let sq = x.mul(&x);
        assert!(sq.der.is_zero_to_prec());
        let c3 = Context::new(3, 1, 1, 64).unwrap();
        let z3 = Puiseux::t_pow(&c3, 1);
        let x3 = Dual::active(z3.clone());
        let sq3 = x3.mul(&x3);
        // der = 2z
        assert_eq!(sq3.der, z3.scale(c3.fq.from_int(2)));
        // der(x^q) = 0
        assert!(x3.q_power(1).der.is_exact_zero());
    }

    #[test]
    fn quotient_rule() {
        let c = Context::new(3, 1, 1, 80).unwrap();
        let z = Puiseux::t_pow(&c, 1).add(&Puiseux::one(&c));
        let x = Dual::active(z.clone());
        // der(1/x) = -1/z^2
        let inv = x.inv().unwrap();
        let expect = z.mul(&z).inv().unwrap().neg();
        assert!(inv.der.sub(&expect).is_zero_to_prec());
    }
}
