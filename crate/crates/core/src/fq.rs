//! Exact arithmetic in the finite field F_{q^m}, q = p^s.
//!
//! The field is realized as F_p[x]/(f) where f is the *canonical* modulus:
//! the lexicographically least monic irreducible polynomial of degree
//! d = s*m over F_p (coefficient vectors (c_0, ..., c_{d-1}) ordered as
//! base-p integers). On top of that we fix
//!
//! * `w`, the canonical generator of F_{q^m}^*: the least element (in the
//!   same integer encoding) of multiplicative order q^m - 1;
//! * `zeta = w^((q^m-1)/(q-1))`, the induced generator of F_q^*.
//!
//! Both choices are deterministic functions of (p, s, m), so every value in
//! the crate serializes reproducibly. Elements of F_q are encoded as the
//! integers 0..q-1 through their F_p-coordinates in the basis
//! (1, zeta, ..., zeta^{s-1}); elements of F_{q^m} as strings of m such
//! digits in the basis (1, w, ..., w^{m-1}). `w` generates F_{q^m} over F_q
//! because it lies in no proper subfield, so these bases are valid.
//!
//! Elements are fixed-size coefficient vectors over F_p; all operations are
//! pure functions taking the field context by reference.

use crate::error::{Error, Result};

/// Largest supported F_p-degree of the field: p = 2, s = 3, m = 12.
pub const MAX_D: usize = 36;

/// An element of F_{q^m}: F_p-coordinates in the power basis of the modulus.
/// Only the first `d` entries are meaningful; the rest stay zero.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FqmEl {
    c: [u8; MAX_D],
}

impl std::fmt::Debug for FqmEl {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(fm, "FqmEl{:?}", &self.c[..])
    }
}

impl FqmEl {
    pub const ZERO: FqmEl = FqmEl { c: [0; MAX_D] };

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0)
    }
}

/// Context for F_{q^m} arithmetic. Immutable once constructed.
pub struct Fqm {
    pub p: u8,
    pub s: u32,
    pub m: u32,
    /// d = s*m, the F_p-degree of the field.
    pub d: usize,
    /// q = p^s.
    pub q: u64,
    /// q^m, the field order.
    pub qm: u64,
    /// Low coefficients of the canonical monic modulus (degree d).
    modulus: [u8; MAX_D],
    /// red_rows[k] = x^{d+k} mod f, for k in 0..d-1.
    red_rows: Vec<FqmEl>,
    /// frob_cols[j][t] = (x^t)^{q^j} for j in 0..m, t in 0..d.
    frob_cols: Vec<Vec<FqmEl>>,
    /// Canonical generator of F_{q^m}^*.
    w: FqmEl,
    /// Canonical generator of F_q^* (zeta = w^((q^m-1)/(q-1))).
    zeta: FqmEl,
    /// All q elements of the subfield F_q, indexed by their integer code.
    fq_by_code: Vec<FqmEl>,
    /// Inverse of the F_p-matrix whose columns are zeta^i * w^j
    /// (column index j*s + i); row-major, d x d. Maps an element to its
    /// (F_q over F_p)-digit vector.
    decomp_inv: Vec<u8>,
}

fn pow_u64(b: u64, e: u32) -> u64 {
    (0..e).fold(1u64, |acc, _| acc * b)
}

/// Polynomial helpers over F_p used only during context construction.
mod fppoly {
    /// Coefficient vectors, little endian, no trailing zeros.
    pub fn trim(v: &mut Vec<u8>) {
        while v.last() == Some(&0) {
            v.pop();
        }
    }

    fn inv_mod(x: u8, p: u8) -> u8 {
        (1..p).find(|&y| (x as u16 * y as u16) % p as u16 == 1).unwrap()
    }

    pub fn rem(mut a: Vec<u8>, f: &[u8], p: u8) -> Vec<u8> {
        trim(&mut a);
        let flead_inv = inv_mod(*f.last().unwrap(), p);
        while a.len() >= f.len() {
            let factor = (*a.last().unwrap() as u16 * flead_inv as u16 % p as u16) as u8;
            let shift = a.len() - f.len();
            for (i, &fc) in f.iter().enumerate() {
                let sub = (factor as u16 * fc as u16) % p as u16;
                let idx = i + shift;
                a[idx] = ((a[idx] as u16 + p as u16 - sub) % p as u16) as u8;
            }
            trim(&mut a);
        }
        a
    }

    pub fn gcd(mut a: Vec<u8>, mut b: Vec<u8>, p: u8) -> Vec<u8> {
        trim(&mut a);
        trim(&mut b);
        while !b.is_empty() {
            let r = rem(a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    /// p-th power of a mod f: exponents scale by p, coefficients are fixed.
    pub fn frob_p(a: &[u8], f: &[u8], p: u8) -> Vec<u8> {
        let mut out = vec![0u8; a.len().saturating_sub(1) * p as usize + 1];
        for (i, &c) in a.iter().enumerate() {
            if c != 0 {
                out[i * p as usize] = c;
            }
        }
        rem(out, f, p)
    }
}

impl Fqm {
    pub fn new(p: u8, s: u32, m: u32) -> Result<Fqm> {
        if !matches!(p, 2 | 3 | 5 | 7) {
            return Err(Error::UnsupportedParams(format!("p = {p} (need a prime <= 7)")));
        }
        let q = pow_u64(p as u64, s);
        if q < 2 || q > 9 {
            return Err(Error::UnsupportedParams(format!("q = {q} (need 2 <= q <= 9)")));
        }
        if m < 1 || m > 12 {
            return Err(Error::UnsupportedParams(format!("m = {m} (need 1 <= m <= 12)")));
        }
        let d = (s * m) as usize;
        let qm = pow_u64(q, m);

        let modulus_vec = Self::canonical_modulus(p, d);
        let mut modulus = [0u8; MAX_D];
        modulus[..d].copy_from_slice(&modulus_vec[..d]);

        // x^{d+k} mod f for k = 0..d-2, used in schoolbook reduction.
        let mut full = modulus_vec.clone();
        full.push(1);
        let mut red_rows: Vec<FqmEl> = Vec::with_capacity(d.saturating_sub(1));
        let mut xk = fppoly::rem(
            {
                let mut v = vec![0u8; d + 1];
                v[d] = 1;
                v
            },
            &full,
            p,
        );
        for _ in 0..d.saturating_sub(1) {
            let mut el = FqmEl::ZERO;
            el.c[..xk.len()].copy_from_slice(&xk);
            red_rows.push(el);
            let mut v = xk.clone();
            v.insert(0, 0);
            xk = fppoly::rem(v, &full, p);
        }

        let mut fq = Fqm {
            p,
            s,
            m,
            d,
            q,
            qm,
            modulus,
            red_rows,
            frob_cols: Vec::new(),
            w: FqmEl::ZERO,
            zeta: FqmEl::ZERO,
            fq_by_code: Vec::new(),
            decomp_inv: Vec::new(),
        };

        // Frobenius tables: (x^t)^{q^j}. Build x^{q} by repeated p-powers,
        // then iterate.
        let mut cols0: Vec<FqmEl> = Vec::with_capacity(d);
        for t in 0..d {
            let mut el = FqmEl::ZERO;
            el.c[t] = 1;
            cols0.push(el);
        }
        let mut tables = vec![cols0];
        for j in 1..m as usize {
            let prev = &tables[j - 1];
            let next: Vec<FqmEl> = (0..d).map(|t| fq.frob_q_slow(prev[t])).collect();
            tables.push(next);
        }
        // frob_q_slow needs no table; set afterwards.
        fq.frob_cols = tables;

        // Canonical generator w: least integer encoding >= 2 with full order.
        let order_facs = factorize(qm - 1);
        let mut w = FqmEl::ZERO;
        'search: for code in 2..qm {
            let el = fq.el_from_integer(code);
            if fq.has_order(el, qm - 1, &order_facs) {
                w = el;
                break 'search;
            }
        }
        if w.is_zero() && qm > 2 {
            return Err(Error::UnsupportedParams("no generator found".into()));
        }
        if qm == 2 {
            w = fq.one();
        }
        fq.w = w;
        fq.zeta = fq.pow(w, (qm - 1) / (q - 1).max(1));
        if q == 2 {
            fq.zeta = fq.one();
        }

        // Subfield table indexed by integer code via the zeta power basis.
        let mut fq_by_code = vec![FqmEl::ZERO; q as usize];
        let mut zpow: Vec<FqmEl> = Vec::with_capacity(s as usize);
        let mut acc = fq.one();
        for _ in 0..s {
            zpow.push(acc);
            acc = fq.mul(acc, fq.zeta);
        }
        for code in 0..q {
            let mut el = FqmEl::ZERO;
            let mut c = code;
            for zp in zpow.iter() {
                let digit = (c % p as u64) as u8;
                c /= p as u64;
                el = fq.add(el, fq.scale(*zp, digit));
            }
            fq_by_code[code as usize] = el;
        }
        fq.fq_by_code = fq_by_code;

        // Decomposition matrix: columns zeta^i w^j, inverted over F_p.
        let mut cols: Vec<FqmEl> = Vec::with_capacity(d);
        let mut wpow = fq.one();
        for _ in 0..m {
            for i in 0..s as usize {
                cols.push(fq.mul(zpow[i], wpow));
            }
            wpow = fq.mul(wpow, fq.w);
        }
        fq.decomp_inv = invert_matrix(&cols, d, p)
            .ok_or_else(|| Error::UnsupportedParams("field basis is degenerate".into()))?;

        Ok(fq)
    }

    /// Lexicographically least monic irreducible of degree d over F_p.
    fn canonical_modulus(p: u8, d: usize) -> Vec<u8> {
        let mut coeffs = vec![0u8; d];
        loop {
            if Self::is_irreducible(&coeffs, p, d) {
                return coeffs.clone();
            }
            // increment base-p counter
            let mut i = 0;
            loop {
                coeffs[i] += 1;
                if coeffs[i] < p {
                    break;
                }
                coeffs[i] = 0;
                i += 1;
                assert!(i < d, "no irreducible polynomial found");
            }
        }
    }

    fn is_irreducible(low: &[u8], p: u8, d: usize) -> bool {
        let mut f = low.to_vec();
        f.push(1);
        if d == 1 {
            return true;
        }
        // h_k = x^{p^k} mod f by iterated p-th powers.
        let x = vec![0u8, 1];
        let mut h = x.clone();
        let mut hs = Vec::with_capacity(d);
        for _ in 0..d {
            h = fppoly::frob_p(&h, &f, p);
            hs.push(h.clone());
        }
        // x^{p^d} == x mod f
        let mut hx = hs[d - 1].clone();
        fppoly::trim(&mut hx);
        let mut xx = x.clone();
        fppoly::trim(&mut xx);
        if hx != xx {
            return false;
        }
        // gcd(x^{p^{d/l}} - x, f) == 1 for prime divisors l of d
        for l in [2usize, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31] {
            if l > d {
                break;
            }
            if d % l == 0 {
                let k = d / l;
                let mut diff = hs[k - 1].clone();
                if diff.len() < 2 {
                    diff.resize(2, 0);
                }
                diff[1] = (diff[1] + p - 1) % p;
                let g = fppoly::gcd(f.clone(), diff, p);
                if g.len() != 1 {
                    return false;
                }
            }
        }
        true
    }

    fn has_order(&self, el: FqmEl, n: u64, facs: &[u64]) -> bool {
        if el.is_zero() {
            return false;
        }
        if self.pow(el, n) != self.one() {
            return false;
        }
        facs.iter().all(|&f| self.pow(el, n / f) != self.one())
    }

    pub fn zero(&self) -> FqmEl {
        FqmEl::ZERO
    }

    pub fn one(&self) -> FqmEl {
        let mut el = FqmEl::ZERO;
        el.c[0] = 1;
        el
    }

    /// Canonical multiplicative generator of F_{q^m}^*.
    pub fn gen_w(&self) -> FqmEl {
        self.w
    }

    /// Canonical multiplicative generator of F_q^*.
    pub fn gen_zeta(&self) -> FqmEl {
        self.zeta
    }

    /// The element with the given F_p-coordinate integer encoding.
    fn el_from_integer(&self, code: u64) -> FqmEl {
        let mut el = FqmEl::ZERO;
        let mut c = code;
        for i in 0..self.d {
            el.c[i] = (c % self.p as u64) as u8;
            c /= self.p as u64;
        }
        el
    }

    /// Embed a small integer (element of the prime field).
    pub fn from_int(&self, n: i64) -> FqmEl {
        let r = n.rem_euclid(self.p as i64) as u8;
        let mut el = FqmEl::ZERO;
        el.c[0] = r;
        el
    }

    pub fn add(&self, a: FqmEl, b: FqmEl) -> FqmEl {
        let mut out = FqmEl::ZERO;
        for i in 0..self.d {
            out.c[i] = (a.c[i] + b.c[i]) % self.p;
        }
        out
    }

    pub fn sub(&self, a: FqmEl, b: FqmEl) -> FqmEl {
        let mut out = FqmEl::ZERO;
        for i in 0..self.d {
            out.c[i] = (a.c[i] + self.p - b.c[i]) % self.p;
        }
        out
    }

    pub fn neg(&self, a: FqmEl) -> FqmEl {
        self.sub(FqmEl::ZERO, a)
    }

    fn scale(&self, a: FqmEl, k: u8) -> FqmEl {
        let mut out = FqmEl::ZERO;
        for i in 0..self.d {
            out.c[i] = (a.c[i] as u16 * k as u16 % self.p as u16) as u8;
        }
        out
    }

    pub fn mul(&self, a: FqmEl, b: FqmEl) -> FqmEl {
        let d = self.d;
        let mut acc = [0u16; 2 * MAX_D];
        for i in 0..d {
            let ai = a.c[i] as u16;
            if ai == 0 {
                continue;
            }
            for j in 0..d {
                acc[i + j] += ai * b.c[j] as u16;
            }
        }
        // reduce overflow degrees using precomputed rows
        let p16 = self.p as u16;
        for k in (d..2 * d - 1).rev() {
            let c = acc[k] % p16;
            if c != 0 {
                let row = &self.red_rows[k - d];
                for j in 0..d {
                    acc[j] += c * row.c[j] as u16;
                }
            }
            acc[k] = 0;
        }
        let mut out = FqmEl::ZERO;
        for j in 0..d {
            out.c[j] = (acc[j] % p16) as u8;
        }
        out
    }

    pub fn pow(&self, mut base: FqmEl, mut e: u64) -> FqmEl {
        let mut out = self.one();
        while e > 0 {
            if e & 1 == 1 {
                out = self.mul(out, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        out
    }

    pub fn inv(&self, a: FqmEl) -> Result<FqmEl> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(a, self.qm - 2))
    }

    /// q^j-th power Frobenius without tables (used while building them).
    fn frob_q_slow(&self, a: FqmEl) -> FqmEl {
        self.pow(a, self.q)
    }

    /// a^{q^j}, reduced through x^{q^m} = x.
    pub fn frob_q(&self, a: FqmEl, j: u32) -> FqmEl {
        let j = (j % self.m) as usize;
        if j == 0 {
            return a;
        }
        let cols = &self.frob_cols[j];
        let mut acc = [0u16; MAX_D];
        for t in 0..self.d {
            let c = a.c[t] as u16;
            if c == 0 {
                continue;
            }
            let col = &cols[t];
            for i in 0..self.d {
                acc[i] += c * col.c[i] as u16;
            }
        }
        let mut out = FqmEl::ZERO;
        for i in 0..self.d {
            out.c[i] = (acc[i] % self.p as u16) as u8;
        }
        out
    }

    /// All q elements of the subfield F_q, indexed by integer code.
    pub fn fq_elements(&self) -> &[FqmEl] {
        &self.fq_by_code
    }

    /// True if the element lies in the subfield F_q (fixed by Frobenius).
    pub fn in_fq(&self, a: FqmEl) -> bool {
        self.frob_q(a, 1) == a
    }

    /// Integer code 0..q-1 of a subfield element.
    pub fn fq_code(&self, a: FqmEl) -> Result<u8> {
        let digits = self.digits(a);
        for j in 1..self.m as usize {
            if digits[j] != 0 {
                return Err(Error::Parse("element is not in the base subfield".into()));
            }
        }
        Ok(digits[0])
    }

    /// The m base-q digits of an element in the basis (1, w, ..., w^{m-1}),
    /// each digit encoding an F_q coefficient through the zeta power basis.
    pub fn digits(&self, a: FqmEl) -> Vec<u8> {
        let d = self.d;
        // fp digit vector = decomp_inv * coords(a)
        let mut fp = vec![0u8; d];
        for r in 0..d {
            let mut acc = 0u16;
            for c in 0..d {
                acc += self.decomp_inv[r * d + c] as u16 * a.c[c] as u16;
            }
            fp[r] = (acc % self.p as u16) as u8;
        }
        let mut out = vec![0u8; self.m as usize];
        for j in 0..self.m as usize {
            let mut code = 0u64;
            for i in (0..self.s as usize).rev() {
                code = code * self.p as u64 + fp[j * self.s as usize + i] as u64;
            }
            out[j] = code as u8;
        }
        out
    }

    /// Inverse of `digits`.
    pub fn from_digits(&self, digits: &[u8]) -> Result<FqmEl> {
        if digits.len() > self.m as usize {
            return Err(Error::Parse(format!(
                "too many digits for m = {}: {}",
                self.m,
                digits.len()
            )));
        }
        let mut out = FqmEl::ZERO;
        let mut wpow = self.one();
        for (j, &dig) in digits.iter().enumerate() {
            if dig as u64 >= self.q {
                return Err(Error::Parse(format!("digit {dig} out of range for q = {}", self.q)));
            }
            out = self.add(out, self.mul(self.fq_by_code[dig as usize], wpow));
            if j + 1 < digits.len() {
                wpow = self.mul(wpow, self.w);
            }
        }
        Ok(out)
    }

    /// Compact string form: m base-q digits, little endian, e.g. "201".
    pub fn to_string(&self, a: FqmEl) -> String {
        self.digits(a).iter().map(|d| char::from(b'0' + d)).collect()
    }

    pub fn parse(&self, s: &str) -> Result<FqmEl> {
        let digits: Vec<u8> = s
            .chars()
            .map(|c| {
                c.to_digit(10)
                    .map(|d| d as u8)
                    .ok_or_else(|| Error::Parse(format!("bad field digit '{c}'")))
            })
            .collect::<Result<_>>()?;
        self.from_digits(&digits)
    }

    /// The canonical modulus, low coefficients first (degree d is monic).
    pub fn modulus(&self) -> &[u8] {
        &self.modulus[..self.d]
    }
}

fn factorize(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut f = 2u64;
    while f * f <= n {
        if n % f == 0 {
            out.push(f);
            while n % f == 0 {
                n /= f;
            }
        }
        f += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Invert the d x d matrix over F_p whose columns are the given elements.
/// Returns the row-major inverse, or None if singular.
fn invert_matrix(cols: &[FqmEl], d: usize, p: u8) -> Option<Vec<u8>> {
    let mut a = vec![0i16; d * 2 * d];
    for r in 0..d {
        for c in 0..d {
            a[r * 2 * d + c] = cols[c].c[r] as i16;
        }
        a[r * 2 * d + d + r] = 1;
    }
    let p16 = p as i16;
    let inv_mod = |x: i16| -> i16 {
        // p <= 7: brute force
        (1..p16).find(|&y| (x * y) % p16 == 1).unwrap_or(0)
    };
    let mut row = 0;
    for col in 0..d {
        let pivot = (row..d).find(|&r| a[r * 2 * d + col] % p16 != 0)?;
        a.swap_with_slice_rows(pivot, row, 2 * d);
        let pv = inv_mod(a[row * 2 * d + col].rem_euclid(p16));
        for j in 0..2 * d {
            a[row * 2 * d + j] = (a[row * 2 * d + j] * pv).rem_euclid(p16);
        }
        for r in 0..d {
            if r != row {
                let f = a[r * 2 * d + col].rem_euclid(p16);
                if f != 0 {
                    for j in 0..2 * d {
                        a[r * 2 * d + j] =
                            (a[r * 2 * d + j] - f * a[row * 2 * d + j]).rem_euclid(p16);
                    }
                }
            }
        }
        row += 1;
    }
    let mut out = vec![0u8; d * d];
    for r in 0..d {
        for c in 0..d {
            out[r * d + c] = a[r * 2 * d + d + c] as u8;
        }
    }
    Some(out)
}

trait SwapRows {
    fn swap_with_slice_rows(&mut self, r1: usize, r2: usize, stride: usize);
}

impl SwapRows for Vec<i16> {
    fn swap_with_slice_rows(&mut self, r1: usize, r2: usize, stride: usize) {
        if r1 == r2 {
            return;
        }
        for j in 0..stride {
            self.swap(r1 * stride + j, r2 * stride + j);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_moduli_match_hand_computation() {
        // F_4: x^2 + x + 1 is the least irreducible quadratic over F_2.
        let f4 = Fqm::new(2, 2, 1).unwrap();
        assert_eq!(f4.modulus(), &[1, 1]);
        // F_8: x^3 + x + 1.
        let f8 = Fqm::new(2, 3, 1).unwrap();
        assert_eq!(f8.modulus(), &[1, 1, 0]);
        // F_9: x^2 + 1 (since -1 is a non-square mod 3).
        let f9 = Fqm::new(3, 2, 1).unwrap();
        assert_eq!(f9.modulus(), &[1, 0]);
    }

    #[test]
    fn prime_field_generators() {
        let f3 = Fqm::new(3, 1, 1).unwrap();
        assert_eq!(f3.to_string(f3.gen_w()), "2");
        let f7 = Fqm::new(7, 1, 1).unwrap();
        assert_eq!(f7.to_string(f7.gen_w()), "3");
    }

    #[test]
    fn field_axioms_sampled() {
        for (p, s, m) in [(2, 1, 3), (3, 1, 2), (2, 2, 2), (5, 1, 2)] {
            let f = Fqm::new(p, s, m).unwrap();
            let els: Vec<FqmEl> = (0..f.qm.min(64)).map(|c| f.el_from_integer(c)).collect();
            for &a in &els {
                for &b in &els {
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    assert_eq!(f.add(a, b), f.add(b, a));
                    // Frobenius is additive and multiplicative
                    assert_eq!(f.frob_q(f.add(a, b), 1), f.add(f.frob_q(a, 1), f.frob_q(b, 1)));
                    assert_eq!(f.frob_q(f.mul(a, b), 1), f.mul(f.frob_q(a, 1), f.frob_q(b, 1)));
                }
                if !a.is_zero() {
                    let ai = f.inv(a).unwrap();
                    assert_eq!(f.mul(a, ai), f.one());
                }
                // x^{q^m} = x
                let mut x = a;
                for _ in 0..m {
                    x = f.frob_q(x, 1);
                }
                assert_eq!(x, a);
            }
        }
    }

    #[test]
    fn frobenius_fixes_exactly_fq() {
        let f = Fqm::new(2, 1, 4).unwrap();
        let mut fixed = 0;
        for c in 0..f.qm {
            let a = f.el_from_integer(c);
            if f.frob_q(a, 1) == a {
                fixed += 1;
                assert!(f.in_fq(a));
            }
        }
        assert_eq!(fixed, f.q);
    }

    #[test]
    fn subfield_codes_roundtrip() {
        for (p, s, m) in [(2, 1, 2), (3, 1, 3), (2, 2, 3), (3, 2, 2)] {
            let f = Fqm::new(p, s, m).unwrap();
            for code in 0..f.q {
                let el = f.fq_elements()[code as usize];
                assert!(f.in_fq(el));
                assert_eq!(f.fq_code(el).unwrap() as u64, code);
            }
            // digit strings roundtrip on random-ish elements
            for c in (0..f.qm).step_by(7) {
                let el = f.el_from_integer(c);
                let s = f.to_string(el);
                assert_eq!(f.parse(&s).unwrap(), el);
            }
        }
    }

    #[test]
    fn generator_has_full_order() {
        for (p, s, m) in [(2, 1, 4), (3, 1, 3), (2, 2, 2)] {
            let f = Fqm::new(p, s, m).unwrap();
            let n = f.qm - 1;
            let mut seen = std::collections::HashSet::new();
            let mut acc = f.one();
            for _ in 0..n {
                acc = f.mul(acc, f.gen_w());
                seen.insert(acc);
            }
            assert_eq!(seen.len() as u64, n);
            assert_eq!(f.pow(f.gen_zeta(), f.q - 1), f.one());
        }
    }
}
