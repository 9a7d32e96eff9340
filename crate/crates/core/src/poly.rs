//! The polynomial ring A = F_q[T], its fraction field K = F_q(T), and the
//! Carlitz module quantities that live entirely inside A.
//!
//! Everything here is exact; the infinite place is handled through
//! v(f/g) = deg g - deg f, normalized so that log T = 1.

use crate::error::{Error, Result};
use crate::fq::FqmEl;
use crate::params::Ctx;

/// A polynomial over F_q in the variable T, little-endian coefficients.
/// Coefficients are subfield elements of F_{q^m}; the vector carries no
/// trailing zeros, so the zero polynomial has an empty vector.
#[derive(Clone)]
pub struct PolyA {
    pub ctx: Ctx,
    c: Vec<FqmEl>,
}

impl PartialEq for PolyA {
    fn eq(&self, other: &Self) -> bool {
        self.c == other.c
    }
}
impl Eq for PolyA {}

impl std::fmt::Debug for PolyA {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "PolyA({})", self.display())
    }
}

impl PolyA {
    pub fn zero(ctx: &Ctx) -> PolyA {
        PolyA { ctx: ctx.clone(), c: Vec::new() }
    }

    pub fn one(ctx: &Ctx) -> PolyA {
        PolyA::constant(ctx, ctx.fq.one())
    }

    pub fn constant(ctx: &Ctx, a: FqmEl) -> PolyA {
        let mut p = PolyA { ctx: ctx.clone(), c: vec![a] };
        p.trim();
        p
    }

    /// The variable T.
    pub fn t(ctx: &Ctx) -> PolyA {
        PolyA { ctx: ctx.clone(), c: vec![ctx.fq.zero(), ctx.fq.one()] }
    }

    /// T^k.
    pub fn t_pow(ctx: &Ctx, k: usize) -> PolyA {
        let mut c = vec![ctx.fq.zero(); k + 1];
        c[k] = ctx.fq.one();
        PolyA { ctx: ctx.clone(), c }
    }

    pub fn from_coeffs(ctx: &Ctx, coeffs: Vec<FqmEl>) -> PolyA {
        let mut p = PolyA { ctx: ctx.clone(), c: coeffs };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.c.last().map_or(false, |x| x.is_zero()) {
            self.c.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree, or None for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.c.is_empty() {
            None
        } else {
            Some(self.c.len() - 1)
        }
    }

    pub fn coeff(&self, i: usize) -> FqmEl {
        self.c.get(i).copied().unwrap_or(FqmEl::ZERO)
    }

    pub fn coeffs(&self) -> &[FqmEl] {
        &self.c
    }

    pub fn leading(&self) -> Option<FqmEl> {
        self.c.last().copied()
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == Some(self.ctx.fq.one())
    }

    pub fn add(&self, other: &PolyA) -> PolyA {
        let fq = &self.ctx.fq;
        let n = self.c.len().max(other.c.len());
        let mut c = Vec::with_capacity(n);
        for i in 0..n {
            c.push(fq.add(self.coeff(i), other.coeff(i)));
        }
        PolyA::from_coeffs(&self.ctx, c)
    }

    pub fn sub(&self, other: &PolyA) -> PolyA {
        let fq = &self.ctx.fq;
        let n = self.c.len().max(other.c.len());
        let mut c = Vec::with_capacity(n);
        for i in 0..n {
            c.push(fq.sub(self.coeff(i), other.coeff(i)));
        }
        PolyA::from_coeffs(&self.ctx, c)
    }

    pub fn neg(&self) -> PolyA {
        let fq = &self.ctx.fq;
        PolyA::from_coeffs(&self.ctx, self.c.iter().map(|&x| fq.neg(x)).collect())
    }

    pub fn mul(&self, other: &PolyA) -> PolyA {
        if self.is_zero() || other.is_zero() {
            return PolyA::zero(&self.ctx);
        }
        let fq = &self.ctx.fq;
        let mut c = vec![FqmEl::ZERO; self.c.len() + other.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.c.iter().enumerate() {
                c[i + j] = fq.add(c[i + j], fq.mul(a, b));
            }
        }
        PolyA::from_coeffs(&self.ctx, c)
    }

    pub fn scale(&self, a: FqmEl) -> PolyA {
        let fq = &self.ctx.fq;
        PolyA::from_coeffs(&self.ctx, self.c.iter().map(|&x| fq.mul(a, x)).collect())
    }

    /// q^k-th power: Frobenius on coefficients, exponents scaled by q^k.
    pub fn pow_qk(&self, k: u32) -> PolyA {
        if self.is_zero() || k == 0 {
            return self.clone();
        }
        let fq = &self.ctx.fq;
        let step = {
            let mut acc: usize = 1;
            for _ in 0..k {
                acc = acc.checked_mul(self.ctx.q() as usize).expect("exponent overflow");
            }
            acc
        };
        let mut c = vec![FqmEl::ZERO; (self.c.len() - 1) * step + 1];
        for (i, &a) in self.c.iter().enumerate() {
            if !a.is_zero() {
                c[i * step] = fq.frob_q(a, k);
            }
        }
        PolyA::from_coeffs(&self.ctx, c)
    }

    pub fn divrem(&self, den: &PolyA) -> Result<(PolyA, PolyA)> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let fq = &self.ctx.fq;
        let dd = den.degree().unwrap();
        let lead_inv = fq.inv(den.leading().unwrap())?;
        let mut rem = self.c.clone();
        if rem.len() <= dd {
            return Ok((PolyA::zero(&self.ctx), self.clone()));
        }
        let mut quo = vec![FqmEl::ZERO; rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            let f = fq.mul(rem[i], lead_inv);
            if f.is_zero() {
                continue;
            }
            quo[i - dd] = f;
            for (j, &dc) in den.c.iter().enumerate() {
                rem[i - dd + j] = fq.sub(rem[i - dd + j], fq.mul(f, dc));
            }
        }
        Ok((PolyA::from_coeffs(&self.ctx, quo), PolyA::from_coeffs(&self.ctx, rem)))
    }

    pub fn gcd(&self, other: &PolyA) -> PolyA {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b).expect("gcd: nonzero divisor");
            a = b;
            b = r;
        }
        // normalize monic
        if let Some(l) = a.leading() {
            let li = a.ctx.fq.inv(l).unwrap();
            a = a.scale(li);
        }
        a
    }

    /// Serialize as "c0,c1,..." with F_q coefficients as integers 0..q-1.
    pub fn to_coeff_string(&self) -> String {
        self.c
            .iter()
            .map(|&x| self.ctx.fq.fq_code(x).map(|d| d.to_string()))
            .collect::<Result<Vec<_>>>()
            .unwrap_or_else(|_| vec!["?".into()])
            .join(",")
    }

    pub fn parse_coeff_string(ctx: &Ctx, s: &str) -> Result<PolyA> {
        if s.trim().is_empty() {
            return Ok(PolyA::zero(ctx));
        }
        let coeffs = s
            .split(',')
            .map(|tok| {
                let code: usize = tok
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad coefficient '{tok}'")))?;
                if code as u64 >= ctx.q() {
                    return Err(Error::Parse(format!("coefficient {code} out of range")));
                }
                Ok(ctx.fq.fq_elements()[code])
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PolyA::from_coeffs(ctx, coeffs))
    }

    /// Human-readable form like "T^4 + 2*T + 1".
    pub fn display(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let fq = &self.ctx.fq;
        let mut parts = Vec::new();
        for (i, &a) in self.c.iter().enumerate().rev() {
            if a.is_zero() {
                continue;
            }
            let code = fq.fq_code(a).map(|d| d.to_string()).unwrap_or_else(|_| "?".into());
            let term = match (i, code.as_str()) {
                (0, c) => c.to_string(),
                (1, "1") => "T".into(),
                (1, c) => format!("{c}*T"),
                (_, "1") => format!("T^{i}"),
                (_, c) => format!("{c}*T^{i}"),
            };
            parts.push(term);
        }
        parts.join(" + ")
    }
}

/// [a,k] = a^{q^k} - a.
pub fn bracket(a: &PolyA, k: u32) -> PolyA {
    a.pow_qk(k).sub(a)
}

/// [k] = [T,k] = T^{q^k} - T.
pub fn bracket_t(ctx: &Ctx, k: u32) -> PolyA {
    bracket(&PolyA::t(ctx), k)
}

/// D_k = [k] [k-1]^q ... [1]^{q^{k-1}}; D_0 = 1 (empty product).
pub fn d_factor(ctx: &Ctx, k: u32) -> PolyA {
    let mut acc = PolyA::one(ctx);
    for j in 1..=k {
        acc = acc.mul(&bracket_t(ctx, j).pow_qk(k - j));
    }
    acc
}

/// Coefficients of the Carlitz operator polynomial rho_a(X) = sum c_k X^{q^k},
/// computed by Horner composition of rho_T = T*tau^0 + tau in the twisted
/// ring A{tau}. Returns (c_0, ..., c_d), d = deg a; c_0 = a.
pub fn carlitz_coeffs(a: &PolyA) -> Result<Vec<PolyA>> {
    if a.is_zero() {
        return Err(Error::ZeroInput);
    }
    let ctx = &a.ctx;
    let d = a.degree().unwrap();
    // acc holds rho_b for the current Horner tail b, as tau coefficients.
    let mut acc: Vec<PolyA> = vec![PolyA::constant(ctx, a.coeff(d))];
    for i in (0..d).rev() {
        // acc <- rho_T * acc + c_i: (T tau^0 + tau) * sum g_j tau^j
        //      = sum T g_j tau^j + sum g_j^q tau^{j+1}
        let mut next: Vec<PolyA> = Vec::with_capacity(acc.len() + 1);
        let t = PolyA::t(ctx);
        for j in 0..=acc.len() {
            let mut v = PolyA::zero(ctx);
            if j < acc.len() {
                v = t.mul(&acc[j]);
            }
            if j > 0 {
                v = v.add(&acc[j - 1].pow_qk(1));
            }
            next.push(v);
        }
        next[0] = next[0].add(&PolyA::constant(ctx, a.coeff(i)));
        acc = next;
    }
    Ok(acc)
}

/// A reduced fraction in K = F_q(T); denominator monic and nonzero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatK {
    pub num: PolyA,
    pub den: PolyA,
}

impl RatK {
    pub fn from_poly(p: PolyA) -> RatK {
        let one = PolyA::one(&p.ctx);
        RatK { num: p, den: one }
    }

    pub fn new(num: PolyA, den: PolyA) -> Result<RatK> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut r = RatK { num, den };
        r.reduce();
        Ok(r)
    }

    fn reduce(&mut self) {
        if self.num.is_zero() {
            self.den = PolyA::one(&self.den.ctx);
            return;
        }
        let g = self.num.gcd(&self.den);
        if g.degree() != Some(0) {
            self.num = self.num.divrem(&g).unwrap().0;
            self.den = self.den.divrem(&g).unwrap().0;
        }
        let lead = self.den.leading().unwrap();
        if lead != self.den.ctx.fq.one() {
            let li = self.den.ctx.fq.inv(lead).unwrap();
            self.num = self.num.scale(li);
            self.den = self.den.scale(li);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn sub(&self, other: &RatK) -> RatK {
        let num = self.num.mul(&other.den).sub(&other.num.mul(&self.den));
        let den = self.den.mul(&other.den);
        RatK::new(num, den).unwrap()
    }

    pub fn mul(&self, other: &RatK) -> RatK {
        RatK::new(self.num.mul(&other.num), self.den.mul(&other.den)).unwrap()
    }

    pub fn div(&self, other: &RatK) -> Result<RatK> {
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        RatK::new(self.num.mul(&other.den), self.den.mul(&other.num))
    }

    /// v_oo(f/g) = deg g - deg f, or None for the zero fraction (v = +oo).
    pub fn v_infinity(&self) -> Option<i64> {
        let dn = self.num.degree()? as i64;
        let dd = self.den.degree().unwrap() as i64;
        Some(dd - dn)
    }
}
