//! The twisted polynomial ring C_oo{tau}, tau c = c^q tau.
//!
//! A twisted polynomial sum a_i tau^i acts on C_oo as the q-additive
//! polynomial sum a_i X^{q^i}. Multiplication is composition:
//! (a tau^i)(b tau^j) = a b^{q^i} tau^{i+j}. The coefficients are generic
//! over `TauCoeff` so that the same machinery runs on plain series and on
//! dual numbers (for functional determinants).
//!
//! Newton polygons are computed from coefficient valuations only; the crate
//! never extracts roots.

use num::rational::Ratio;
use num::Zero;

use crate::dual::Dual;
use crate::error::{Error, Result};
use crate::lattice::Spectrum;
use crate::params::Ctx;
use crate::series::{Prec, Puiseux};

/// Coefficient rings for the twisted ring: plain series or dual numbers.
pub trait TauCoeff: Clone {
    fn ctx(&self) -> &Ctx;
    fn zero(ctx: &Ctx) -> Self;
    fn one(ctx: &Ctx) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn inv(&self) -> Result<Self>;
    fn q_power(&self, j: u32) -> Self;
    fn is_zero_to_prec(&self) -> bool;
    /// Constant lift of a plain series value.
    fn lift(z: Puiseux) -> Self;
    /// The underlying series value (value part for duals).
    fn val_part(&self) -> &Puiseux;
}

impl TauCoeff for Puiseux {
    fn ctx(&self) -> &Ctx {
        &self.ctx
    }
    fn zero(ctx: &Ctx) -> Self {
        Puiseux::zero(ctx)
    }
    fn one(ctx: &Ctx) -> Self {
        Puiseux::one(ctx)
    }
    fn add(&self, o: &Self) -> Self {
        Puiseux::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        Puiseux::sub(self, o)
    }
    fn neg(&self) -> Self {
        Puiseux::neg(self)
    }
    fn mul(&self, o: &Self) -> Self {
        Puiseux::mul(self, o)
    }
    fn inv(&self) -> Result<Self> {
        Puiseux::inv(self)
    }
    fn q_power(&self, j: u32) -> Self {
        Puiseux::q_power(self, j)
    }
    fn is_zero_to_prec(&self) -> bool {
        Puiseux::is_zero_to_prec(self)
    }
    fn lift(z: Puiseux) -> Self {
        z
    }
    fn val_part(&self) -> &Puiseux {
        self
    }
}

impl TauCoeff for Dual {
    fn ctx(&self) -> &Ctx {
        Dual::ctx(self)
    }
    fn zero(ctx: &Ctx) -> Self {
        Dual::constant(Puiseux::zero(ctx))
    }
    fn one(ctx: &Ctx) -> Self {
        Dual::constant(Puiseux::one(ctx))
    }
    fn add(&self, o: &Self) -> Self {
        Dual::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        Dual::sub(self, o)
    }
    fn neg(&self) -> Self {
        Dual::neg(self)
    }
    fn mul(&self, o: &Self) -> Self {
        Dual::mul(self, o)
    }
    fn inv(&self) -> Result<Self> {
        Dual::inv(self)
    }
    fn q_power(&self, j: u32) -> Self {
        Dual::q_power(self, j)
    }
    fn is_zero_to_prec(&self) -> bool {
        self.val.is_zero_to_prec() && self.der.is_zero_to_prec()
    }
    fn lift(z: Puiseux) -> Self {
        Dual::constant(z)
    }
    fn val_part(&self) -> &Puiseux {
        &self.val
    }
}

/// Twisted polynomial sum coeffs[i] tau^i. Also used for truncations of
/// twisted power series, in which case the length is the truncation order.
#[derive(Clone, Debug)]
pub struct TauPoly<S = Puiseux> {
    pub coeffs: Vec<S>,
}

impl<S: TauCoeff> TauPoly<S> {
    pub fn new(coeffs: Vec<S>) -> TauPoly<S> {
        TauPoly { coeffs }
    }

    /// The identity tau^0.
    pub fn identity(ctx: &Ctx) -> TauPoly<S> {
        TauPoly { coeffs: vec![S::one(ctx)] }
    }

    pub fn x_only(ctx: &Ctx) -> TauPoly<S> {
        TauPoly::identity(ctx)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, i: usize) -> Option<&S> {
        self.coeffs.get(i)
    }

    pub fn ctx(&self) -> &Ctx {
        self.coeffs.first().expect("empty twisted polynomial").ctx()
    }

    pub fn add(&self, other: &TauPoly<S>) -> TauPoly<S> {
        let ctx = self.ctx().clone();
        let n = self.len().max(other.len());
        let zero = S::zero(&ctx);
        let coeffs = (0..n)
            .map(|i| {
                let a = self.coeff(i).unwrap_or(&zero);
                let b = other.coeff(i).unwrap_or(&zero);
                a.add(b)
            })
            .collect();
        TauPoly { coeffs }
    }

    /// Twisted product: coefficient k of fg is sum_{i+j=k} f_i g_j^{q^i}.
    pub fn mul(&self, other: &TauPoly<S>) -> TauPoly<S> {
        self.mul_trunc(other, usize::MAX)
    }

    /// Twisted product truncated to tau-order < kmax.
    pub fn mul_trunc(&self, other: &TauPoly<S>, kmax: usize) -> TauPoly<S> {
        let ctx = self.ctx().clone();
        let full = self.len() + other.len() - 1;
        let n = full.min(kmax);
        let mut out = vec![S::zero(&ctx); n];
        for (i, fi) in self.coeffs.iter().enumerate() {
            if i >= n {
                break;
            }
            if fi.is_zero_to_prec() && fi.val_part().prec() == Prec::Exact {
                continue;
            }
            for (j, gj) in other.coeffs.iterate_upto(n.saturating_sub(i)) {
                let term = fi.mul(&gj.q_power(i as u32));
                out[i + j] = out[i + j].add(&term);
            }
        }
        TauPoly { coeffs: out }
    }

    /// Evaluate as a q-additive polynomial: sum f_i z^{q^i}.
    pub fn eval(&self, z: &S) -> S {
        let ctx = self.ctx().clone();
        let mut acc = S::zero(&ctx);
        let mut zq = z.clone();
        for (i, fi) in self.coeffs.iter().enumerate() {
            if i > 0 {
                zq = zq.q_power(1);
            }
            acc = acc.add(&fi.mul(&zq));
        }
        acc
    }

    /// Compositional inverse up to tau-order < kmax, by the recursion
    /// beta_k = -sum_{i=1..k} alpha_i beta_{k-i}^{q^i} (alpha_0 = beta_0 = 1).
    ///
    /// When the input is the exponential of a lattice, the output is its
    /// logarithm and -beta_j is the Eisenstein series of weight q^j - 1.
    pub fn inverse(&self, kmax: usize) -> Result<TauPoly<S>> {
        let ctx = self.ctx().clone();
        let one = S::one(&ctx);
        match self.coeff(0) {
            Some(c0) if c0.sub(&one).is_zero_to_prec() => {}
            _ => return Err(Error::NotNormalized),
        }
        let mut beta: Vec<S> = Vec::with_capacity(kmax);
        beta.push(one);
        for k in 1..kmax {
            let mut acc = S::zero(&ctx);
            for i in 1..=k {
                if let Some(ai) = self.coeff(i) {
                    let term = ai.mul(&beta[k - i].q_power(i as u32));
                    acc = acc.add(&term);
                }
            }
            beta.push(acc.neg());
        }
        Ok(TauPoly { coeffs: beta })
    }
}

trait IterateUpto<'a, T> {
    fn iterate_upto(&'a self, n: usize) -> std::iter::Take<std::iter::Enumerate<std::slice::Iter<'a, T>>>;
}

impl<'a, T> IterateUpto<'a, T> for Vec<T> {
    fn iterate_upto(&'a self, n: usize) -> std::iter::Take<std::iter::Enumerate<std::slice::Iter<'a, T>>> {
        self.iter().enumerate().take(n)
    }
}

/// Lower convex hull of the points (q^i, v(f_i)), with derived segments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolygon {
    /// Hull vertices, abscissas strictly increasing.
    pub vertices: Vec<(i128, Ratio<i64>)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segment {
    /// Horizontal length (difference of abscissas).
    pub length: i128,
    /// Slope; equals the log of the roots it accounts for.
    pub slope: Ratio<i64>,
}

impl NewtonPolygon {
    pub fn segments(&self) -> Vec<Segment> {
        self.vertices
            .windows(2)
            .map(|w| {
                let (x0, y0) = w[0];
                let (x1, y1) = w[1];
                let dy = y1 - y0;
                let dx = x1 - x0;
                let dx64 = i64::try_from(dx).expect("polygon abscissa overflow");
                let slope = Ratio::new(*dy.numer(), dy.denom() * dx64);
                Segment { length: dx, slope }
            })
            .collect()
    }
}

/// Newton polygon of a twisted polynomial from coefficient valuations.
///
/// Coefficients that vanish exactly are skipped. A coefficient with no
/// visible term but finite precision is tolerated only when its precision
/// bound certifies it lies on or above the hull of the visible points;
/// otherwise the polygon is not determined and the call fails.
pub fn newton_polygon(f: &TauPoly<Puiseux>) -> Result<NewtonPolygon> {
    let ctx = f.ctx();
    let e = ctx.params.e;
    let q = ctx.q() as i128;
    let mut pts: Vec<(i128, Ratio<i64>)> = Vec::new();
    let mut bounded: Vec<(i128, i64)> = Vec::new(); // (abscissa, prec bound)
    let mut x = 1i128;
    for (i, c) in f.coeffs.iter().enumerate() {
        if i > 0 {
            x = x.checked_mul(q).ok_or_else(|| {
                Error::UnsupportedParams("Newton polygon abscissa overflow".into())
            })?;
        }
        match c.ord_exp() {
            Some(o) => pts.push((x, Ratio::new(o, e))),
            None => match c.prec() {
                Prec::Exact => {} // exact zero: no point
                Prec::Finite(p) => bounded.push((x, p)),
            },
        }
    }
    if pts.is_empty() {
        return Err(Error::ZeroInput);
    }
    let hull = lower_hull(&pts);
    // verify hidden coefficients cannot dip below the hull
    for (x, p) in bounded {
        let bound = Ratio::new(p, e);
        if let Some(hy) = hull_value_at(&hull, x) {
            if Ratio::new(*bound.numer() as i128, *bound.denom() as i128) < hy {
                return Err(Error::IndeterminateValuation);
            }
        }
    }
    Ok(NewtonPolygon { vertices: hull })
}

fn lower_hull(pts: &[(i128, Ratio<i64>)]) -> Vec<(i128, Ratio<i64>)> {
    let mut hull: Vec<(i128, Ratio<i64>)> = Vec::new();
    for &(x, y) in pts {
        while hull.len() >= 2 {
            let (x1, y1) = hull[hull.len() - 2];
            let (x2, y2) = hull[hull.len() - 1];
            // drop (x2,y2) if it lies on or above segment (x1,y1)-(x,y)
            let lhs = big(y2 - y1) * (x - x1);
            let rhs = big(y - y1) * (x2 - x1);
            if lhs >= rhs {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push((x, y));
    }
    hull
}

fn big(r: Ratio<i64>) -> Ratio<i128> {
    Ratio::new(*r.numer() as i128, *r.denom() as i128)
}

fn hull_value_at(hull: &[(i128, Ratio<i64>)], x: i128) -> Option<Ratio<i128>> {
    if hull.len() == 1 {
        return if hull[0].0 == x { Some(big(hull[0].1)) } else { None };
    }
    for w in hull.windows(2) {
        let (x1, y1) = w[0];
        let (x2, y2) = w[1];
        if x1 <= x && x <= x2 {
            let t = big(y2 - y1) * Ratio::new(x - x1, x2 - x1);
            return Some(big(y1) + t);
        }
    }
    None
}

/// Spectrum of a lattice from the Newton polygon of its exponential:
/// a segment from abscissa q^a to q^b of slope t contributes b - a copies
/// of t (there are q^b - q^a lattice elements of log equal to t).
pub fn np_to_spectrum(np: &NewtonPolygon, ctx: &Ctx) -> Result<Spectrum> {
    let q = ctx.q() as i128;
    if np.vertices.is_empty() {
        return Err(Error::MalformedPolygon("empty polygon".into()));
    }
    if np.vertices[0].0 != 1 {
        return Err(Error::MalformedPolygon(
            "polygon must start at abscissa 1".into(),
        ));
    }
    let mut exps = Vec::with_capacity(np.vertices.len());
    for &(x, _) in &np.vertices {
        let mut v = x;
        let mut k = 0u32;
        while v > 1 {
            if v % q != 0 {
                return Err(Error::MalformedPolygon(format!(
                    "abscissa {x} is not a power of q"
                )));
            }
            v /= q;
            k += 1;
        }
        exps.push(k);
    }
    let mut logs = Vec::new();
    for (i, seg) in np.segments().iter().enumerate() {
        let copies = exps[i + 1] - exps[i];
        for _ in 0..copies {
            logs.push(seg.slope);
        }
    }
    Spectrum::new(logs)
}

/// Newton polygon of the exponential of a lattice with the given spectrum.
pub fn spectrum_to_np(spec: &Spectrum, ctx: &Ctx) -> Result<NewtonPolygon> {
    let q = ctx.q() as i128;
    let mut vertices = vec![(1i128, Ratio::zero())];
    let logs = spec.logs();
    let mut i = 0usize;
    let mut x = 1i128;
    let mut y = Ratio::zero();
    while i < logs.len() {
        let t = logs[i];
        let mut j = i;
        while j < logs.len() && logs[j] == t {
            j += 1;
        }
        let x_next = (i..j).fold(x, |acc, _| acc * q);
        let dx = x_next - x;
        let dx64 = i64::try_from(dx)
            .map_err(|_| Error::UnsupportedParams("polygon abscissa overflow".into()))?;
        y += t * Ratio::new(dx64, 1);
        x = x_next;
        vertices.push((x, y));
        i = j;
    }
    Ok(NewtonPolygon { vertices })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Context;
    use crate::poly::{carlitz_coeffs, PolyA};

    fn ctx(q: u64) -> Ctx {
        Context::new(q, 1, 1, 96).unwrap()
    }

    #[test]
    fn twist_law() {
        let c = ctx(2);
        let w = Puiseux::t_pow(&c, 1).add(&Puiseux::one(&c));
        // tau * (c tau^0) = c^q tau
        let tau = TauPoly::new(vec![Puiseux::zero(&c), Puiseux::one(&c)]);
        let con = TauPoly::new(vec![w.clone()]);
        let prod = tau.mul(&con);
        assert!(prod.coeffs[0].is_zero_to_prec());
        assert!(prod.coeffs[1].sub(&w.q_power(1)).is_zero_to_prec());
        // identity
        let f = TauPoly::new(vec![w.clone(), Puiseux::t_pow(&c, 2)]);
        let idp = f.mul(&TauPoly::identity(&c));
        for (a, b) in idp.coeffs.iter().zip(f.coeffs.iter()) {
            assert!(a.sub(b).is_zero_to_prec());
        }
    }

    #[test]
    fn square_of_carlitz_operator() {
        // (T + tau)^2 = T^2 + (T^2+T) tau + tau^2 over F_2, matching the
        // Carlitz coefficients of T^2.
        let c = ctx(2);
        let phi_t = TauPoly::new(vec![Puiseux::t_pow(&c, 1), Puiseux::one(&c)]);
        let sq = phi_t.mul(&phi_t);
        let cs = carlitz_coeffs(&PolyA::t_pow(&c, 2)).unwrap();
        assert_eq!(sq.len(), 3);
        for (k, ck) in cs.iter().enumerate() {
            assert!(sq.coeffs[k].sub(&Puiseux::from_poly(ck)).is_zero_to_prec());
        }
    }

    #[test]
    fn ring_laws_random() {
        use rand::{Rng, SeedableRng};
        let c = ctx(3);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let mut rand_tau = |len: usize| {
            let coeffs = (0..len)
                .map(|_| {
                    let k = rng.gen_range(-4i64..4);
                    let co = rng.gen_range(0..3i64);
                    Puiseux::monomial(&c, k, c.fq.from_int(co)).add(&Puiseux::one(&c))
                })
                .collect();
            TauPoly::new(coeffs)
        };
        for _ in 0..10 {
            let f = rand_tau(3);
            let g = rand_tau(4);
            let h = rand_tau(2);
            let lhs = f.mul(&g.mul(&h));
            let rhs = f.mul(&g).mul(&h);
            for (a, b) in lhs.coeffs.iter().zip(rhs.coeffs.iter()) {
                assert!(a.sub(b).is_zero_to_prec());
            }
            let lhs = f.mul(&g.add(&h));
            let rhs = f.mul(&g).add(&f.mul(&h));
            for (a, b) in lhs.coeffs.iter().zip(rhs.coeffs.iter()) {
                assert!(a.sub(b).is_zero_to_prec());
            }
            // composition law: eval(f*g, z) = eval(f, eval(g, z))
            let z = Puiseux::t_pow(&c, 1).add(&Puiseux::one(&c));
            let lhs = f.mul(&g).eval(&z);
            let rhs = f.eval(&g.eval(&z));
            assert!(lhs.sub(&rhs).is_zero_to_prec());
        }
    }

    #[test]
    fn additive_on_points() {
        let c = ctx(3);
        let f = TauPoly::new(vec![
            Puiseux::t_pow(&c, 1),
            Puiseux::one(&c),
            Puiseux::t_pow(&c, -1),
        ]);
        let x = Puiseux::t_pow(&c, 2).add(&Puiseux::one(&c));
        let y = Puiseux::t_pow(&c, 1).add(&Puiseux::monomial(&c, 3, c.fq.one()));
        let lhs = f.eval(&x.add(&y));
        let rhs = f.eval(&x).add(&f.eval(&y));
        assert!(lhs.sub(&rhs).is_zero_to_prec());
    }

    #[test]
    fn inverse_recursion() {
        let c = ctx(3);
        // f = tau^0 inverts to itself
        let id: TauPoly = TauPoly::identity(&c);
        let inv = id.inverse(5).unwrap();
        assert!(inv.coeffs[0].sub(&Puiseux::one(&c)).is_zero_to_prec());
        for k in 1..5 {
            assert!(inv.coeffs[k].is_zero_to_prec());
        }
        // beta_1 = -alpha_1
        let a1 = Puiseux::t_pow(&c, -1);
        let f = TauPoly::new(vec![Puiseux::one(&c), a1.clone()]);
        let g = f.inverse(4).unwrap();
        assert!(g.coeffs[1].add(&a1).is_zero_to_prec());
        // roundtrip: f * f^{-1} = tau^0 up to the truncation order
        let prod = f.mul_trunc(&g, 4);
        assert!(prod.coeffs[0].sub(&Puiseux::one(&c)).is_zero_to_prec());
        for k in 1..4 {
            assert!(prod.coeffs[k].is_zero_to_prec(), "k={k}");
        }
        // not normalized
        let bad = TauPoly::new(vec![Puiseux::t_pow(&c, 1)]);
        assert_eq!(bad.inverse(3).unwrap_err(), Error::NotNormalized);
    }

    #[test]
    fn newton_polygon_shapes() {
        let c = ctx(2);
        let one = Puiseux::one(&c);
        // X^{q^l} - X: one segment of slope 0 and length q^l - 1
        let l = 3usize;
        let mut coeffs = vec![Puiseux::zero(&c); l + 1];
        coeffs[0] = one.neg();
        coeffs[l] = one.clone();
        let np = newton_polygon(&TauPoly::new(coeffs)).unwrap();
        let segs = np.segments();
        assert_eq!(segs.len(), 1);
        assert_eq!(segs[0].length, 7);
        assert_eq!(segs[0].slope, Ratio::zero());
        // f = X: no segments, no nonzero roots
        let np = newton_polygon(&TauPoly::new(vec![one.clone()])).unwrap();
        assert!(np.segments().is_empty());
        // Carlitz T-torsion shape X + T^{-1} X^q: slope 1/(q-1), length q-1
        let f = TauPoly::new(vec![one.clone(), Puiseux::t_pow(&c, -1)]);
        let np = newton_polygon(&f).unwrap();
        let segs = np.segments();
        assert_eq!(segs.len(), 1);
        assert_eq!(segs[0].length, 1);
        assert_eq!(segs[0].slope, Ratio::new(1, 1)); // q = 2: 1/(q-1) = 1
    }

    #[test]
    fn hidden_coefficient_below_hull_is_rejected() {
        let c = ctx(2);
        let one = Puiseux::one(&c);
        // middle coefficient unknown to O(u^-5): could dip below the hull
        let f = TauPoly::new(vec![
            one.clone(),
            crate::series::Puiseux::zero_prec(&c, -5),
            one.clone(),
        ]);
        assert_eq!(newton_polygon(&f).unwrap_err(), Error::IndeterminateValuation);
        // unknown but certified above the hull is fine
        let f = TauPoly::new(vec![
            one.clone(),
            crate::series::Puiseux::zero_prec(&c, 50),
            one.clone(),
        ]);
        assert!(newton_polygon(&f).is_ok());
    }

    #[test]
    fn spectrum_np_roundtrip() {
        let c3 = ctx(3);
        // separable 2-dim: logs (s1 < s2) -> lengths (q-1), (q-1)q
        let spec = Spectrum::new(vec![Ratio::new(1, 1), Ratio::new(2, 1)]).unwrap();
        let np = spectrum_to_np(&spec, &c3).unwrap();
        let segs = np.segments();
        assert_eq!(segs.len(), 2);
        assert_eq!(segs[0].length, 2);
        assert_eq!(segs[1].length, 6);
        assert_eq!(np_to_spectrum(&np, &c3).unwrap(), spec);
        // 1-inseparable: logs (s, s) -> one segment of length q^2 - 1
        let spec = Spectrum::new(vec![Ratio::new(1, 2), Ratio::new(1, 2)]).unwrap();
        let np = spectrum_to_np(&spec, &c3).unwrap();
        let segs = np.segments();
        assert_eq!(segs.len(), 1);
        assert_eq!(segs[0].length, 8);
        assert_eq!(np_to_spectrum(&np, &c3).unwrap(), spec);
        // single segment slope s length q-1: spectrum of a 1-dim lattice
        let spec1 = Spectrum::new(vec![Ratio::new(3, 1)]).unwrap();
        let np1 = spectrum_to_np(&spec1, &c3).unwrap();
        assert_eq!(np1.segments().len(), 1);
        assert_eq!(np1.segments()[0].length, 2);
        assert_eq!(np_to_spectrum(&np1, &c3).unwrap(), spec1);
        // malformed: abscissa not a power of q
        let bad = NewtonPolygon {
            vertices: vec![(1, Ratio::zero()), (5, Ratio::new(1, 1))],
        };
        assert!(matches!(
            np_to_spectrum(&bad, &c3),
            Err(Error::MalformedPolygon(_))
        ));
    }
}
