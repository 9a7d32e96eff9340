//! The computational model of C_oo: truncated Puiseux series in
//! u = T^(-1/e) over F_{q^m}.
//!
//! A value is a finite sum of terms coeff * u^k (k an integer, coefficients
//! nonzero) together with a precision bound: either `Exact`, or
//! `Finite(P)` meaning the value is known modulo terms of order >= P.
//! Valuations are exact rationals: v(z) = (least exponent)/e, and
//! log z = -v(z), normalized so that log T = 1 (T = u^{-e}).
//!
//! Precision propagates pessimistically through every operation
//! (ultrametric min-rule); operations that would have to guess a valuation
//! fail with `IndeterminateValuation` instead. Division expands the inverse
//! by Newton iteration to the propagated precision; inverting anything but
//! a monomial therefore yields a finite window of relative width at most
//! the context precision n.

use num::rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fq::FqmEl;
use crate::params::Ctx;

/// Precision bound on the exponent axis, in u-adic units.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum Prec {
    Finite(i64),
    Exact,
}

impl Prec {
    pub fn add(self, k: i64) -> Prec {
        match self {
            Prec::Finite(p) => Prec::Finite(p + k),
            Prec::Exact => Prec::Exact,
        }
    }

    pub fn scale(self, f: i64) -> Result<Prec> {
        match self {
            Prec::Finite(p) => p
                .checked_mul(f)
                .map(Prec::Finite)
                .ok_or_else(|| Error::UnsupportedParams("precision overflow".into())),
            Prec::Exact => Ok(Prec::Exact),
        }
    }

    pub fn finite(self) -> Option<i64> {
        match self {
            Prec::Finite(p) => Some(p),
            Prec::Exact => None,
        }
    }
}

/// A truncated Puiseux series: element of F_{q^m}((u)) known modulo u^prec.
#[derive(Clone)]
pub struct Puiseux {
    pub ctx: Ctx,
    /// Sorted by exponent, strictly increasing, no zero coefficients,
    /// every exponent below `prec`.
    terms: Vec<(i64, FqmEl)>,
    prec: Prec,
}

impl PartialEq for Puiseux {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms && self.prec == other.prec
    }
}
impl Eq for Puiseux {}

impl std::fmt::Debug for Puiseux {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.display())
    }
}

impl Puiseux {
    pub fn zero(ctx: &Ctx) -> Puiseux {
        Puiseux { ctx: ctx.clone(), terms: Vec::new(), prec: Prec::Exact }
    }

    /// Zero known only modulo u^p.
    pub fn zero_prec(ctx: &Ctx, p: i64) -> Puiseux {
        Puiseux { ctx: ctx.clone(), terms: Vec::new(), prec: Prec::Finite(p) }
    }

    pub fn one(ctx: &Ctx) -> Puiseux {
        Puiseux::monomial(ctx, 0, ctx.fq.one())
    }

    pub fn monomial(ctx: &Ctx, exp: i64, coeff: FqmEl) -> Puiseux {
        let terms = if coeff.is_zero() { Vec::new() } else { vec![(exp, coeff)] };
        Puiseux { ctx: ctx.clone(), terms, prec: Prec::Exact }
    }

    pub fn from_int(ctx: &Ctx, n: i64) -> Puiseux {
        Puiseux::monomial(ctx, 0, ctx.fq.from_int(n))
    }

    /// T^k = u^{-e k}.
    pub fn t_pow(ctx: &Ctx, k: i64) -> Puiseux {
        Puiseux::monomial(ctx, -ctx.params.e * k, ctx.fq.one())
    }

    /// Embed a polynomial in T exactly.
    pub fn from_poly(p: &crate::poly::PolyA) -> Puiseux {
        let ctx = &p.ctx;
        let e = ctx.params.e;
        let mut terms: Vec<(i64, FqmEl)> = p
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, &c)| (-e * i as i64, c))
            .collect();
        terms.sort_by_key(|t| t.0);
        Puiseux { ctx: ctx.clone(), terms, prec: Prec::Exact }
    }

    pub fn from_terms(ctx: &Ctx, mut terms: Vec<(i64, FqmEl)>, prec: Prec) -> Puiseux {
        terms.sort_by_key(|t| t.0);
        let mut merged: Vec<(i64, FqmEl)> = Vec::with_capacity(terms.len());
        for (e, c) in terms {
            if let Some(last) = merged.last_mut() {
                if last.0 == e {
                    last.1 = ctx.fq.add(last.1, c);
                    continue;
                }
            }
            merged.push((e, c));
        }
        merged.retain(|(e, c)| !c.is_zero() && Prec::Finite(*e) < prec);
        Puiseux { ctx: ctx.clone(), terms: merged, prec }
    }

    pub fn prec(&self) -> Prec {
        self.prec
    }

    pub fn terms(&self) -> &[(i64, FqmEl)] {
        &self.terms
    }

    /// No visible terms in the precision window.
    pub fn is_zero_to_prec(&self) -> bool {
        self.terms.is_empty()
    }

    /// Exactly the zero element.
    pub fn is_exact_zero(&self) -> bool {
        self.terms.is_empty() && self.prec == Prec::Exact
    }

    /// Least visible exponent.
    pub fn ord_exp(&self) -> Option<i64> {
        self.terms.first().map(|t| t.0)
    }

    /// Exponent below which nothing can hide: visible order, else precision.
    fn ord_bound(&self) -> Prec {
        match self.ord_exp() {
            Some(o) => Prec::Finite(o),
            None => self.prec,
        }
    }

    pub fn leading(&self) -> Option<(i64, FqmEl)> {
        self.terms.first().copied()
    }

    /// log_q |z| = -v(z) as an exact rational, in units of 1/e.
    pub fn logq(&self) -> Result<Ratio<i64>> {
        match self.ord_exp() {
            Some(o) => Ok(Ratio::new(-o, self.ctx.params.e)),
            None => Err(Error::IndeterminateValuation),
        }
    }

    /// v(z) as an exact rational.
    pub fn valuation(&self) -> Result<Ratio<i64>> {
        Ok(-self.logq()?)
    }

    fn assert_compatible(&self, other: &Puiseux) {
        let a = &self.ctx.params;
        let b = &other.ctx.params;
        assert!(
            a.p == b.p && a.s == b.s && a.m == b.m && a.e == b.e,
            "incompatible series contexts"
        );
    }

    pub fn add(&self, other: &Puiseux) -> Puiseux {
        self.assert_compatible(other);
        let prec = self.prec.min(other.prec);
        let fq = &self.ctx.fq;
        let mut terms = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() || j < other.terms.len() {
            let ta = self.terms.get(i);
            let tb = other.terms.get(j);
            match (ta, tb) {
                (Some(&(ea, ca)), Some(&(eb, cb))) => {
                    if ea == eb {
                        let c = fq.add(ca, cb);
                        if !c.is_zero() {
                            terms.push((ea, c));
                        }
                        i += 1;
                        j += 1;
                    } else if ea < eb {
                        terms.push((ea, ca));
                        i += 1;
                    } else {
                        terms.push((eb, cb));
                        j += 1;
                    }
                }
                (Some(&t), None) => {
                    terms.push(t);
                    i += 1;
                }
                (None, Some(&t)) => {
                    terms.push(t);
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        terms.retain(|(e, _)| Prec::Finite(*e) < prec);
        Puiseux { ctx: self.ctx.clone(), terms, prec }
    }

    pub fn neg(&self) -> Puiseux {
        let fq = &self.ctx.fq;
        Puiseux {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|&(e, c)| (e, fq.neg(c))).collect(),
            prec: self.prec,
        }
    }

    pub fn sub(&self, other: &Puiseux) -> Puiseux {
        self.add(&other.neg())
    }

    /// Multiply by a field constant.
    pub fn scale(&self, a: FqmEl) -> Puiseux {
        if a.is_zero() {
            // 0 * (x + O(u^P)) = O(u^P) only if x unknown; the product of an
            // exact zero with anything is exact zero.
            return Puiseux { ctx: self.ctx.clone(), terms: Vec::new(), prec: Prec::Exact };
        }
        let fq = &self.ctx.fq;
        Puiseux {
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|&(e, c)| (e, fq.mul(a, c))).collect(),
            prec: self.prec,
        }
    }

    /// Multiply by coeff * u^k.
    pub fn mul_monomial(&self, k: i64, coeff: FqmEl) -> Puiseux {
        let scaled = self.scale(coeff);
        Puiseux {
            ctx: self.ctx.clone(),
            terms: scaled.terms.iter().map(|&(e, c)| (e + k, c)).collect(),
            prec: scaled.prec.add(k),
        }
    }

    pub fn mul(&self, other: &Puiseux) -> Puiseux {
        self.assert_compatible(other);
        if self.is_exact_zero() || other.is_exact_zero() {
            return Puiseux::zero(&self.ctx);
        }
        // prec = min(ord(x)+prec(y), ord(y)+prec(x)); termless operands use
        // their precision bound as the order bound.
        let pa = match (self.ord_bound(), other.prec) {
            (Prec::Finite(o), Prec::Finite(p)) => Prec::Finite(o + p),
            _ => Prec::Exact,
        };
        let pb = match (other.ord_bound(), self.prec) {
            (Prec::Finite(o), Prec::Finite(p)) => Prec::Finite(o + p),
            _ => Prec::Exact,
        };
        let prec = pa.min(pb);
        if self.terms.is_empty() || other.terms.is_empty() {
            return Puiseux { ctx: self.ctx.clone(), terms: Vec::new(), prec };
        }
        let lo = self.ord_exp().unwrap() + other.ord_exp().unwrap();
        let hi_terms = self.terms.last().unwrap().0 + other.terms.last().unwrap().0 + 1;
        let hi = match prec {
            Prec::Finite(p) => p.min(hi_terms),
            Prec::Exact => hi_terms,
        };
        if hi <= lo {
            return Puiseux { ctx: self.ctx.clone(), terms: Vec::new(), prec };
        }
        let width = (hi - lo) as usize;
        assert!(width <= 1 << 22, "series window too wide: {width}");
        let fq = &self.ctx.fq;
        let mut acc = vec![FqmEl::ZERO; width];
        for &(ea, ca) in &self.terms {
            for &(eb, cb) in &other.terms {
                let e = ea + eb;
                if e >= hi {
                    break;
                }
                let idx = (e - lo) as usize;
                acc[idx] = fq.add(acc[idx], fq.mul(ca, cb));
            }
        }
        let terms: Vec<(i64, FqmEl)> = acc
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (lo + i as i64, c))
            .collect();
        Puiseux { ctx: self.ctx.clone(), terms, prec }
    }

    /// z^{q^j}: Frobenius on coefficients, exponents scaled by q^j.
    /// Never uses repeated multiplication.
    pub fn q_power(&self, j: u32) -> Puiseux {
        if j == 0 {
            return self.clone();
        }
        let fq = &self.ctx.fq;
        let factor = {
            let mut acc: i64 = 1;
            for _ in 0..j {
                acc = acc.checked_mul(self.ctx.q() as i64).expect("q-power exponent overflow");
            }
            acc
        };
        let terms: Vec<(i64, FqmEl)> = self
            .terms
            .iter()
            .map(|&(e, c)| (e.checked_mul(factor).expect("exponent overflow"), fq.frob_q(c, j)))
            .collect();
        let prec = self.prec.scale(factor).expect("precision overflow");
        Puiseux { ctx: self.ctx.clone(), terms, prec }
    }

    /// Multiplicative inverse. Fails on exact zero (`DivisionByZero`) and on
    /// values with no visible leading term (`IndeterminateValuation`).
    pub fn inv(&self) -> Result<Puiseux> {
        let (b, lead) = match self.leading() {
            Some(t) => t,
            None => {
                return Err(if self.prec == Prec::Exact {
                    Error::DivisionByZero
                } else {
                    Error::IndeterminateValuation
                })
            }
        };
        let fq = &self.ctx.fq;
        let lead_inv = fq.inv(lead)?;
        if self.terms.len() == 1 {
            // monomials invert exactly
            let mut out = Puiseux::monomial(&self.ctx, -b, lead_inv);
            if let Prec::Finite(p) = self.prec {
                // 1/(y + O(u^P)) = 1/y + O(u^{P-2b})
                out.prec = Prec::Finite(p - 2 * b);
                out.terms.retain(|(e, _)| Prec::Finite(*e) < out.prec);
            }
            return Ok(out);
        }
        // Relative target: min(prec(y) - ord(y), n).
        let n = self.ctx.params.n;
        let rel = match self.prec {
            Prec::Finite(p) => (p - b).min(n),
            Prec::Exact => n,
        };
        if rel <= 0 {
            return Err(Error::PrecisionExhausted("inverse has empty window".into()));
        }
        // w = y / (lead u^b) - 1, relative series with ord >= 1.
        let unit = self.mul_monomial(-b, lead_inv);
        let one = Puiseux::one(&self.ctx);
        let w = unit.sub(&one).truncated(rel);
        // Newton: z <- z + z(1 - (1+w)z), doubling the correct order. The
        // iterate's window is re-opened to the new target each round; that
        // claim is exactly the Newton invariant (the error squares), not
        // something the min-rule could certify on its own.
        let mut z = one.clone();
        let mut correct = w.ord_exp().unwrap_or(rel);
        loop {
            if correct >= rel {
                break;
            }
            let target = (2 * correct).min(rel);
            let zt = Puiseux {
                ctx: self.ctx.clone(),
                terms: z.terms.iter().filter(|(e, _)| *e < target).cloned().collect(),
                prec: Prec::Finite(target),
            };
            let prod = zt.mul(&w.truncated(target)).add(&zt); // (1+w) z
            let err = Puiseux::one(&self.ctx).sub(&prod).truncated(target);
            z = zt.add(&zt.mul(&err)).truncated(target);
            correct = target;
        }
        // assemble: lead_inv * u^{-b} * z, with propagated precision
        let mut out = z.mul_monomial(-b, lead_inv);
        let abs_prec = match self.prec {
            Prec::Finite(p) => Prec::Finite((p - 2 * b).min(n - b)),
            Prec::Exact => Prec::Finite(n - b),
        };
        out.prec = abs_prec;
        out.terms.retain(|(e, _)| Prec::Finite(*e) < out.prec);
        Ok(out)
    }

    pub fn div(&self, other: &Puiseux) -> Result<Puiseux> {
        Ok(self.mul(&other.inv()?))
    }

    /// Integer power; negative exponents go through `inv`.
    pub fn pow_int(&self, k: i64) -> Result<Puiseux> {
        if k == 0 {
            return Ok(Puiseux::one(&self.ctx));
        }
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc: Option<Puiseux> = None;
        let mut sq = base;
        loop {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => sq.clone(),
                    Some(a) => a.mul(&sq),
                });
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            sq = sq.mul(&sq);
        }
        Ok(acc.unwrap())
    }

    /// The same value under a context that differs only in working
    /// precision (the field and ramification must agree).
    pub fn with_ctx(&self, ctx: &Ctx) -> Puiseux {
        let a = &self.ctx.params;
        let b = &ctx.params;
        assert!(
            a.p == b.p && a.s == b.s && a.m == b.m && a.e == b.e,
            "incompatible series contexts"
        );
        Puiseux { ctx: ctx.clone(), terms: self.terms.clone(), prec: self.prec }
    }

    /// Forget everything at or above the given exponent.
    pub fn truncated(&self, at: i64) -> Puiseux {
        let prec = self.prec.min(Prec::Finite(at));
        let mut terms = self.terms.clone();
        terms.retain(|(e, _)| Prec::Finite(*e) < prec);
        Puiseux { ctx: self.ctx.clone(), terms, prec }
    }

    /// Two values agree on the intersection of their windows, which must be
    /// nonempty beyond both leading terms.
    pub fn agrees_with(&self, other: &Puiseux) -> bool {
        self.sub(other).is_zero_to_prec()
    }

    pub fn display(&self) -> String {
        if self.terms.is_empty() {
            return match self.prec {
                Prec::Exact => "0".into(),
                Prec::Finite(p) => format!("O(u^{p})"),
            };
        }
        let mut parts = Vec::new();
        for &(e, c) in self.terms.iter() {
            let cs = self.ctx.fq.to_string(c);
            let cs = cs.trim_end_matches('0');
            let cs = if cs.is_empty() { "1".to_string() } else { cs.to_string() };
            let base = match e {
                0 => cs.clone(),
                1 => format!("{cs}*u"),
                _ => format!("{cs}*u^{e}"),
            };
            parts.push(base);
        }
        let mut s = parts.join(" + ");
        if let Prec::Finite(p) = self.prec {
            s.push_str(&format!(" + O(u^{p})"));
        }
        s
    }
}

/// JSON form of a series value.
#[derive(Serialize, Deserialize)]
pub struct SeriesJson {
    pub e: i64,
    pub m: u32,
    /// null encodes an exact value.
    pub prec: Option<i64>,
    /// [exponent, coefficient-digits] pairs, exponents strictly increasing.
    pub terms: Vec<(i64, String)>,
}

impl Puiseux {
    pub fn to_json(&self) -> SeriesJson {
        SeriesJson {
            e: self.ctx.params.e,
            m: self.ctx.params.m,
            prec: self.prec.finite(),
            terms: self
                .terms
                .iter()
                .map(|&(e, c)| (e, self.ctx.fq.to_string(c)))
                .collect(),
        }
    }

    pub fn from_json(ctx: &Ctx, j: &SeriesJson) -> Result<Puiseux> {
        if j.e != ctx.params.e || j.m != ctx.params.m {
            return Err(Error::Parse("series context mismatch".into()));
        }
        let prec = match j.prec {
            Some(p) => Prec::Finite(p),
            None => Prec::Exact,
        };
        let terms = j
            .terms
            .iter()
            .map(|(e, s)| Ok((*e, ctx.fq.parse(s)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Puiseux::from_terms(ctx, terms, prec))
    }
}

/// Recursive-descent parser for series literals.
///
/// Grammar: tokens `T`, `u`, `w` (generator of F_{q^m}), unsigned integers,
/// operators + - * / ^ and parentheses; `T` means u^{-e}. Exponents are
/// (possibly negative) integer literals.
pub fn parse_series(ctx: &Ctx, input: &str) -> Result<Puiseux> {
    let mut p = Parser { ctx, chars: input.chars().collect(), pos: 0 };
    let v = p.expr()?;
    p.skip_ws();
    if p.pos != p.chars.len() {
        return Err(Error::Parse(format!("trailing input at position {}", p.pos)));
    }
    Ok(v)
}

struct Parser<'a> {
    ctx: &'a Ctx,
    chars: Vec<char>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.peek().map_or(false, |c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Puiseux> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?);
            } else if self.eat('-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Puiseux> {
        let mut acc = self.factor()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(&self.factor()?);
            } else if self.eat('/') {
                acc = acc.div(&self.factor()?)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<Puiseux> {
        self.skip_ws();
        if self.eat('-') {
            return Ok(self.factor()?.neg());
        }
        let atom = self.atom()?;
        if self.eat('^') {
            let k = self.int_exponent()?;
            return atom.pow_int(k);
        }
        Ok(atom)
    }

    fn atom(&mut self) -> Result<Puiseux> {
        self.skip_ws();
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let v = self.expr()?;
                if !self.eat(')') {
                    return Err(Error::Parse("expected ')'".into()));
                }
                Ok(v)
            }
            Some('T') => {
                self.pos += 1;
                Ok(Puiseux::t_pow(self.ctx, 1))
            }
            Some('u') => {
                self.pos += 1;
                Ok(Puiseux::monomial(self.ctx, 1, self.ctx.fq.one()))
            }
            Some('w') => {
                self.pos += 1;
                Ok(Puiseux::monomial(self.ctx, 0, self.ctx.fq.gen_w()))
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.unsigned_int()?;
                Ok(Puiseux::from_int(self.ctx, n))
            }
            other => Err(Error::Parse(format!("unexpected token {other:?}"))),
        }
    }

    fn unsigned_int(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        while self.peek().map_or(false, |c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::Parse("expected integer".into()));
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().map_err(|_| Error::Parse(format!("bad integer '{s}'")))
    }

    fn int_exponent(&mut self) -> Result<i64> {
        self.skip_ws();
        if self.eat('(') {
            let neg = self.eat('-');
            let n = self.unsigned_int()?;
            if !self.eat(')') {
                return Err(Error::Parse("expected ')' after exponent".into()));
            }
            return Ok(if neg { -n } else { n });
        }
        let neg = self.eat('-');
        let n = self.unsigned_int()?;
        Ok(if neg { -n } else { n })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Context;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ctx(q: u64, m: u32, e: i64, n: i64) -> Ctx {
        Context::new(q, m, e, n).unwrap()
    }

    pub(crate) fn random_series(ctx: &Ctx, rng: &mut ChaCha8Rng, lo: i64, hi: i64, k: usize) -> Puiseux {
        let mut terms = Vec::new();
        for _ in 0..k {
            let e = rng.gen_range(lo..hi);
            let code = rng.gen_range(0..ctx.fq.qm);
            let digits: Vec<u8> = {
                let mut c = code;
                (0..ctx.params.m)
                    .map(|_| {
                        let d = (c % ctx.q()) as u8;
                        c /= ctx.q();
                        d
                    })
                    .collect()
            };
            terms.push((e, ctx.fq.from_digits(&digits).unwrap()));
        }
        Puiseux::from_terms(ctx, terms, Prec::Exact)
    }

    #[test]
    fn monomial_inverse_is_exact() {
        let c = ctx(2, 1, 1, 64);
        let t = Puiseux::t_pow(&c, 1);
        let ti = t.inv().unwrap();
        let prod = t.mul(&ti);
        assert!(prod.is_exact_zero() == false);
        assert_eq!(prod, Puiseux::one(&c));
        assert_eq!(prod.prec(), Prec::Exact);
    }

    #[test]
    fn ultrametric_strict_case() {
        let c = ctx(3, 1, 1, 64);
        // v(x) = 0, v(y) = 1 -> v(x+y) = 0
        let x = Puiseux::one(&c);
        let y = Puiseux::monomial(&c, 1, c.fq.one());
        assert_eq!(x.add(&y).valuation().unwrap(), Ratio::new(0, 1));
    }

    #[test]
    fn product_with_window() {
        let c = ctx(3, 1, 1, 64);
        let u = Puiseux::monomial(&c, 1, c.fq.one());
        let one = Puiseux::one(&c);
        let a = one.add(&u).truncated(3);
        let b = one.sub(&u).truncated(3);
        let p = a.mul(&b);
        // (1+u)(1-u) = 1 - u^2 with window 3
        assert_eq!(p.prec(), Prec::Finite(3));
        assert_eq!(p.terms().len(), 2);
        assert_eq!(p.terms()[0], (0, c.fq.one()));
        assert_eq!(p.terms()[1].0, 2);
        assert_eq!(p.terms()[1].1, c.fq.from_int(-1));
    }

    #[test]
    fn logq_of_named_values() {
        let c = ctx(3, 1, 2, 64);
        assert_eq!(Puiseux::t_pow(&c, 1).logq().unwrap(), Ratio::new(1, 1));
        assert_eq!(Puiseux::one(&c).logq().unwrap(), Ratio::new(0, 1));
        let u = Puiseux::monomial(&c, 1, c.fq.one());
        assert_eq!(u.logq().unwrap(), Ratio::new(-1, 2));
        assert!(Puiseux::zero(&c).logq().is_err());
    }

    #[test]
    fn q_power_examples() {
        let c = ctx(2, 1, 1, 64);
        let one = Puiseux::one(&c);
        let u = Puiseux::monomial(&c, 1, c.fq.one());
        let z = one.add(&u);
        let zq = z.q_power(1);
        // (1+u)^2 = 1 + u^2 in characteristic 2
        assert_eq!(zq.terms().len(), 2);
        assert_eq!(zq.terms()[1].0, 2);
        // constants in F_q are fixed
        let k = Puiseux::from_int(&c, 1);
        assert_eq!(k.q_power(3), k);
    }

    #[test]
    fn q_power_matches_repeated_multiplication() {
        let c = ctx(3, 2, 2, 200);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..40 {
            let z = random_series(&c, &mut rng, -6, 10, 8);
            for j in 1..=2u32 {
                let fast = z.q_power(j);
                let mut slow = Puiseux::one(&c);
                let reps = (0..j).fold(1u64, |a, _| a * c.q());
                for _ in 0..reps {
                    slow = slow.mul(&z);
                }
                assert!(fast.sub(&slow).is_zero_to_prec());
            }
        }
    }

    #[test]
    fn ultrametric_equality_case_sampled() {
        let c = ctx(3, 1, 2, 128);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut checked = 0;
        while checked < 1000 {
            let x = random_series(&c, &mut rng, -10, 20, 5);
            let y = random_series(&c, &mut rng, -10, 20, 5);
            let (vx, vy) = match (x.valuation(), y.valuation()) {
                (Ok(a), Ok(b)) => (a, b),
                _ => continue,
            };
            if vx == vy {
                continue;
            }
            assert_eq!(x.add(&y).valuation().unwrap(), vx.min(vy));
            checked += 1;
        }
    }

    #[test]
    fn ring_laws_sampled() {
        let c = ctx(2, 2, 2, 96);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let a = random_series(&c, &mut rng, -5, 12, 4);
            let b = random_series(&c, &mut rng, -5, 12, 4);
            let z = random_series(&c, &mut rng, -5, 12, 4);
            let lhs = a.mul(&b.mul(&z));
            let rhs = a.mul(&b).mul(&z);
            assert!(lhs.sub(&rhs).is_zero_to_prec());
            let lhs = a.mul(&b.add(&z));
            let rhs = a.mul(&b).add(&a.mul(&z));
            assert!(lhs.sub(&rhs).is_zero_to_prec());
        }
    }

    #[test]
    fn inverse_roundtrip() {
        let c = ctx(3, 1, 2, 80);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..30 {
            let mut z = random_series(&c, &mut rng, -4, 10, 5);
            if z.is_zero_to_prec() {
                continue;
            }
            z = z.add(&Puiseux::monomial(&c, -5, c.fq.one()));
            let zi = z.inv().unwrap();
            let prod = z.mul(&zi);
            let diff = prod.sub(&Puiseux::one(&c));
            assert!(diff.is_zero_to_prec(), "z * z^-1 != 1: {}", diff.display());
        }
    }

    #[test]
    fn division_by_exact_zero_vs_indeterminate() {
        let c = ctx(2, 1, 1, 64);
        assert_eq!(Puiseux::zero(&c).inv().unwrap_err(), Error::DivisionByZero);
        assert_eq!(
            Puiseux::zero_prec(&c, 10).inv().unwrap_err(),
            Error::IndeterminateValuation
        );
    }

    #[test]
    fn parser_accepts_grammar() {
        let c = ctx(2, 2, 2, 64);
        let v = parse_series(&c, "T^-1 + 1 + u^3").unwrap();
        assert_eq!(v.terms().len(), 3);
        // T^{-1} is small: exponent +e
        assert_eq!(v.ord_exp(), Some(0));
        let w = parse_series(&c, "w^2 * u - T").unwrap();
        assert_eq!(w.terms().len(), 2);
        let paren = parse_series(&c, "(1 + u) * (1 - u)").unwrap();
        assert_eq!(paren.terms().len(), 2); // char 2: 1 + u^2
        assert!(parse_series(&c, "T +").is_err());
        assert!(parse_series(&c, "v").is_err());
        // T is u^{-e}
        let t = parse_series(&c, "T").unwrap();
        assert_eq!(t, parse_series(&c, "u^-2").unwrap());
    }

    #[test]
    fn json_roundtrip() {
        let c = ctx(3, 2, 2, 64);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let z = random_series(&c, &mut rng, -8, 16, 6).truncated(12);
            let j = z.to_json();
            let text = serde_json::to_string(&j).unwrap();
            let back: SeriesJson = serde_json::from_str(&text).unwrap();
            assert_eq!(Puiseux::from_json(&c, &back).unwrap(), z);
        }
    }
}
