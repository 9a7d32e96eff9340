//! Finite F_q-lattices and rank-r A-lattices in the series model.
//!
//! A finite lattice is an F_q-subspace of C_oo given by an ordered basis of
//! series values; an A-lattice of rank r is presented by a frame
//! (omega_1, ..., omega_r) with omega_r = 1. The central algorithm is the
//! successive-minimum-basis (SMB) reduction: sort by valuation, then within
//! each equal-valuation block Gaussian-eliminate the leading residues over
//! F_q; a dependent leading row is replaced by the eliminated combination
//! (which has strictly larger valuation) and re-inserted. The output basis
//! lambda_1, ..., lambda_n satisfies |sum a_i lambda_i| = max of |lambda_i|
//! over the nonzero F_q-coefficients a_i, and its sequence of logs is the
//! spectrum, an invariant of the lattice.

use num::rational::Ratio;

use crate::error::{Error, Result};
use crate::fq::FqmEl;
use crate::params::{Ctx, MAX_ENUM};
use crate::series::{Prec, Puiseux};
use crate::tau::{TauCoeff, TauPoly};

/// Non-decreasing sequence of logs of an F-SMB.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Spectrum {
    logs: Vec<Ratio<i64>>,
}

impl Spectrum {
    pub fn new(logs: Vec<Ratio<i64>>) -> Result<Spectrum> {
        if logs.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::MalformedPolygon(
                "spectrum must be non-decreasing".into(),
            ));
        }
        Ok(Spectrum { logs })
    }

    pub fn logs(&self) -> &[Ratio<i64>] {
        &self.logs
    }

    pub fn len(&self) -> usize {
        self.logs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.logs.is_empty()
    }

    /// Entries k and k+1 coincide (1-indexed).
    pub fn is_k_inseparable(&self, k: usize) -> bool {
        k >= 1 && k < self.logs.len() && self.logs[k - 1] == self.logs[k]
    }

    pub fn as_strings(&self) -> Vec<String> {
        self.logs.iter().map(|r| format!("{}/{}", r.numer(), r.denom())).collect()
    }
}

/// An ordered F_q-basis of a finite lattice.
#[derive(Clone, Debug)]
pub struct FiniteLattice {
    pub ctx: Ctx,
    pub basis: Vec<Puiseux>,
}

impl FiniteLattice {
    pub fn new(ctx: &Ctx, basis: Vec<Puiseux>) -> FiniteLattice {
        FiniteLattice { ctx: ctx.clone(), basis }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn spectrum(&self) -> Result<Spectrum> {
        let logs = self
            .basis
            .iter()
            .map(|b| b.logq())
            .collect::<Result<Vec<_>>>()?;
        Spectrum::new(logs)
    }

    /// All q^dim elements, indexed so that the base-q digits of the index
    /// are the F_q-coefficients of the basis vectors.
    pub fn enumerate(&self) -> Result<Vec<Puiseux>> {
        let ctx = self.ctx();
        let q = ctx.q();
        let total = ctx.q_pow_checked(self.dim() as u32)?;
        if total > 1 << 14 {
            return Err(Error::UnsupportedParams(format!(
                "enumeration of q^{} = {total} elements exceeds the in-memory cap",
                self.dim()
            )));
        }
        let mut elems = vec![Puiseux::zero(ctx)];
        for b in &self.basis {
            let mut next = Vec::with_capacity(elems.len() * q as usize);
            for code in 0..q as usize {
                let scaled = b.scale(ctx.fq.fq_elements()[code]);
                for x in &elems {
                    next.push(x.add(&scaled));
                }
            }
            elems = next;
        }
        Ok(elems)
    }
}

/// F-SMB reduction of the given generators.
pub fn smb_finite(gens: &[Puiseux]) -> Result<FiniteLattice> {
    if gens.is_empty() {
        return Err(Error::Usage("cannot reduce an empty generator list".into()));
    }
    let ctx = gens[0].ctx.clone();
    // entries keep their original index for the stable tie-break
    let mut entries: Vec<(usize, Puiseux)> = gens.iter().cloned().enumerate().collect();
    let max_rounds = 64 + gens.len() * (2 * ctx.params.n as usize + 64);
    for _round in 0..max_rounds {
        for (_, z) in &entries {
            if z.is_exact_zero() {
                return Err(Error::DependentGenerators);
            }
            if z.is_zero_to_prec() {
                return Err(Error::PrecisionExhausted(
                    "generator vanished to precision during reduction".into(),
                ));
            }
        }
        // smallest absolute value first: largest u-adic order first
        entries.sort_by(|a, b| {
            let oa = a.1.ord_exp().unwrap();
            let ob = b.1.ord_exp().unwrap();
            ob.cmp(&oa).then(a.0.cmp(&b.0))
        });
        let mut replaced = false;
        let mut i = 0;
        while i < entries.len() {
            let ord = entries[i].1.ord_exp().unwrap();
            let mut j = i;
            while j < entries.len() && entries[j].1.ord_exp().unwrap() == ord {
                j += 1;
            }
            if let Some((idx, reduced)) = eliminate_block(&ctx, &entries[i..j])? {
                entries[i + idx].1 = reduced;
                replaced = true;
                break;
            }
            i = j;
        }
        if !replaced {
            let basis = entries.into_iter().map(|(_, z)| z).collect();
            return Ok(FiniteLattice { ctx, basis });
        }
    }
    Err(Error::PrecisionExhausted(
        "successive minimum reduction did not terminate".into(),
    ))
}

/// Within an equal-valuation block, find the first element whose leading
/// residue depends F_q-linearly on its predecessors; return its index in
/// the block and the eliminated combination. None if all independent.
fn eliminate_block(
    ctx: &Ctx,
    block: &[(usize, Puiseux)],
) -> Result<Option<(usize, Puiseux)>> {
    let m = ctx.params.m as usize;
    let fq = &ctx.fq;
    // pivots: (reduced residue coords over F_q, reduced series)
    let mut pivots: Vec<(Vec<FqmEl>, Puiseux)> = Vec::new();
    for (bidx, (_, z)) in block.iter().enumerate() {
        let mut coords = residue_coords(ctx, z);
        let mut ser = z.clone();
        for (pvec, pser) in &pivots {
            let col = pvec.iter().position(|c| !c.is_zero()).unwrap();
            if !coords[col].is_zero() {
                let f = fq.mul(coords[col], fq.inv(pvec[col])?);
                for t in 0..m {
                    coords[t] = fq.sub(coords[t], fq.mul(f, pvec[t]));
                }
                ser = ser.sub(&pser.scale(f));
            }
        }
        if coords.iter().all(|c| c.is_zero()) {
            return Ok(Some((bidx, ser)));
        }
        pivots.push((coords, ser));
    }
    Ok(None)
}

/// F_q-coordinates of the leading residue of z in the basis (1, w, ..., w^{m-1}).
fn residue_coords(ctx: &Ctx, z: &Puiseux) -> Vec<FqmEl> {
    let (_, lead) = z.leading().expect("residue of zero");
    ctx.fq
        .digits(lead)
        .iter()
        .map(|&d| ctx.fq.fq_elements()[d as usize])
        .collect()
}

/// A rank-r frame (omega_1, ..., omega_r), omega_r = 1, presenting the
/// A-lattice sum A omega_i.
#[derive(Clone, Debug)]
pub struct ALatticeFrame {
    pub omega: Vec<Puiseux>,
}

impl ALatticeFrame {
    pub fn new(omega: Vec<Puiseux>) -> Result<ALatticeFrame> {
        if omega.is_empty() {
            return Err(Error::Usage("frame must have rank >= 1".into()));
        }
        let ctx = &omega[0].ctx;
        let one = Puiseux::one(ctx);
        if !omega.last().unwrap().sub(&one).is_exact_zero() {
            return Err(Error::NotInFundamentalDomain(
                "last frame coordinate must be exactly 1".into(),
            ));
        }
        Ok(ALatticeFrame { omega })
    }

    pub fn rank(&self) -> usize {
        self.omega.len()
    }

    pub fn ctx(&self) -> &Ctx {
        &self.omega[0].ctx
    }

    /// x_i = log omega_i.
    pub fn logs(&self) -> Result<Vec<Ratio<i64>>> {
        self.omega.iter().map(|o| o.logq()).collect()
    }
}

/// Index order of the truncation basis {T^j omega_i}: sorted by the log
/// x_i + j, ties by i descending (so lambda_1 = omega_r, lambda_2 = T omega_r
/// when |T omega_r| <= |omega_{r-1}|, and so on).
pub fn truncation_order(logs: &[Ratio<i64>], d: u32) -> Vec<(u32, usize)> {
    let r = logs.len();
    let mut keys: Vec<(Ratio<i64>, usize, u32)> = Vec::with_capacity(r * d as usize);
    for (i, &x) in logs.iter().enumerate() {
        for j in 0..d {
            keys.push((x + Ratio::new(j as i64, 1), i, j));
        }
    }
    keys.sort_by(|a, b| a.0.cmp(&b.0).then(b.1.cmp(&a.1)));
    keys.into_iter().map(|(_, i, j)| (j, i)).collect()
}

/// The finite sublattice {sum a_i omega_i : deg a_i < d} with its basis
/// {T^j omega_i} listed in the order of `truncation_order`.
pub fn truncate_a_lattice(frame: &ALatticeFrame, d: u32) -> Result<FiniteLattice> {
    let r = frame.rank();
    if d == 0 {
        return Err(Error::Usage("truncation degree must be positive".into()));
    }
    if r as u64 * d as u64 > 64 {
        return Err(Error::UnsupportedParams(format!(
            "truncation dimension {} exceeds the envelope",
            r as u64 * d as u64
        )));
    }
    let logs = frame.logs()?;
    let order = truncation_order(&logs, d);
    let basis = order
        .into_iter()
        .map(|(j, i)| {
            let t = Puiseux::t_pow(frame.ctx(), j as i64);
            frame.omega[i].mul(&t)
        })
        .collect();
    Ok(FiniteLattice { ctx: frame.ctx().clone(), basis })
}

/// Generic basis truncation used by the forms pipeline (works on dual
/// numbers as well); ordering comes from the frame logs.
pub fn truncate_basis<S: TauCoeff>(coeffs: &[S], logs: &[Ratio<i64>], d: u32) -> Vec<S> {
    let ctx = coeffs[0].ctx().clone();
    truncation_order(logs, d)
        .into_iter()
        .map(|(j, i)| {
            let t = S::lift(Puiseux::t_pow(&ctx, j as i64));
            coeffs[i].mul(&t)
        })
        .collect()
}

/// Exponential e_V of the span of the basis, as a twisted polynomial
/// sum alpha_i tau^i with alpha_0 = 1.
///
/// For dim <= 3 the linear factors over all q^n elements are multiplied out;
/// larger spaces go through the subspace recursion
/// e_{V + F lambda} = e_{F lambda'} o e_V with lambda' = e_V(lambda).
pub fn exp_finite(v: &FiniteLattice) -> Result<TauPoly<Puiseux>> {
    if v.dim() <= 3 {
        exp_basis_direct(v.ctx(), &v.basis)
    } else {
        exp_basis(v.ctx(), &v.basis)
    }
}

/// Subspace recursion, generic over the coefficient ring.
pub fn exp_basis<S: TauCoeff>(ctx: &Ctx, basis: &[S]) -> Result<TauPoly<S>> {
    let mut e = TauPoly::identity(ctx);
    for lam in basis {
        let image = e.eval(lam);
        if image.val_part().is_zero_to_prec() {
            return Err(if image.val_part().is_exact_zero() {
                Error::DependentGenerators
            } else {
                Error::PrecisionExhausted(
                    "exponential image of a basis vector vanished to precision".into(),
                )
            });
        }
        // e_{F mu}(X) = X - mu^{1-q} X^q; mu^{1-q} = mu^{-q} * mu = (mu^{-1})^q mu...
        // computed as (1/mu)^{q-1} = (1/mu)^q * mu.
        let mi = image.inv()?;
        let c = mi.q_power(1).mul(&image).neg();
        let factor = TauPoly::new(vec![S::one(ctx), c]);
        e = factor.mul(&e);
    }
    Ok(e)
}

/// Direct product of the q^n linear factors (X - v).
fn exp_basis_direct(ctx: &Ctx, basis: &[Puiseux]) -> Result<TauPoly<Puiseux>> {
    let v = FiniteLattice { ctx: ctx.clone(), basis: basis.to_vec() };
    let monic = monic_product(&v)?;
    // e_V = f_V / gamma_0, so alpha_k = gamma_k / gamma_0
    let g0inv = monic.coeffs[0].inv()?;
    let coeffs = monic.coeffs.iter().map(|g| g.mul(&g0inv)).collect();
    Ok(TauPoly::new(coeffs))
}

/// Coefficients gamma_k of the monic product prod_{v in V} (X - v)
/// = sum gamma_k X^{q^k}; gamma_n = 1.
pub fn gamma_coeffs(v: &FiniteLattice) -> Result<Vec<Puiseux>> {
    Ok(monic_product(v)?.coeffs)
}

fn monic_product(v: &FiniteLattice) -> Result<TauPoly<Puiseux>> {
    let ctx = v.ctx().clone();
    let elems = v.enumerate()?;
    // dense polynomial in X, degree grows to q^n
    let mut dense: Vec<Puiseux> = vec![Puiseux::one(&ctx)];
    for el in &elems {
        let neg = el.neg();
        let mut next = vec![Puiseux::zero(&ctx); dense.len() + 1];
        for (i, c) in dense.iter().enumerate() {
            // (X - v) * c X^i
            next[i + 1] = next[i + 1].add(c);
            if !neg.is_exact_zero() {
                next[i] = next[i].add(&c.mul(&neg));
            }
        }
        dense = next;
    }
    // extract q-power slots; everything else must cancel
    let n = v.dim();
    let q = ctx.q();
    let mut out = Vec::with_capacity(n + 1);
    let mut slot = 1u64;
    for k in 0..=n {
        out.push(dense[slot as usize].clone());
        if k < n {
            slot *= q;
        }
    }
    for (i, c) in dense.iter().enumerate() {
        let is_slot = {
            let mut s = 1u64;
            let mut found = false;
            for _ in 0..=n {
                if s as usize == i {
                    found = true;
                    break;
                }
                s *= q;
            }
            found
        };
        if !is_slot && i > 0 {
            assert!(
                c.is_zero_to_prec(),
                "product over a full F_q-space must be q-additive"
            );
        }
    }
    Ok(TauPoly::new(out))
}

/// E_k(V) = sum of lambda^{-k} over nonzero lambda; E_0 = -1 by convention.
pub fn eisenstein_finite(v: &FiniteLattice, k: u32) -> Result<Puiseux> {
    let ctx = v.ctx().clone();
    if k == 0 {
        return Ok(Puiseux::from_int(&ctx, -1));
    }
    let elems = v.enumerate()?;
    let mut acc = Puiseux::zero(&ctx);
    for el in elems.iter().skip(1) {
        acc = acc.add(&el.pow_int(-(k as i64))?);
    }
    Ok(acc)
}

/// Moore determinant data of an SMB-ordered finite lattice: computes
/// M(phi_j) = sum_{0 != lambda = sum a_i lambda_i} a_j / lambda and returns
/// det_{1 <= i,j <= rp} (M(phi_j)^{q^i}).
pub fn moore_det(v: &FiniteLattice, rp: usize) -> Result<Puiseux> {
    let ctx = v.ctx().clone();
    let n = v.dim();
    if rp < 1 || rp > n {
        return Err(Error::Usage(format!("need 1 <= r' <= dim, got {rp}")));
    }
    let moore = moore_sums(v)?;
    // matrix rows i = 1..rp of M(phi_j)^{q^i}
    let mat: Vec<Vec<Puiseux>> = (1..=rp)
        .map(|i| (0..rp).map(|j| moore[j].q_power(i as u32)).collect())
        .collect();
    Ok(det_small(&ctx, &mat))
}

/// The sums M(phi_j) for all coordinate functionals phi_j.
pub fn moore_sums(v: &FiniteLattice) -> Result<Vec<Puiseux>> {
    let ctx = v.ctx().clone();
    let n = v.dim();
    let q = ctx.q();
    let total = ctx.q_pow_checked(n as u32)?;
    if total > MAX_ENUM {
        return Err(Error::UnsupportedParams("lattice too large to enumerate".into()));
    }
    let elems = v.enumerate()?;
    let mut sums = vec![Puiseux::zero(&ctx); n];
    for (idx, el) in elems.iter().enumerate().skip(1) {
        let li = el.inv()?;
        let mut rest = idx as u64;
        for j in 0..n {
            let digit = (rest % q) as usize;
            rest /= q;
            if digit != 0 {
                sums[j] = sums[j].add(&li.scale(ctx.fq.fq_elements()[digit]));
            }
        }
    }
    Ok(sums)
}

/// Determinant by Laplace expansion; fine for the small matrices used here.
pub fn det_small(ctx: &Ctx, mat: &[Vec<Puiseux>]) -> Puiseux {
    let n = mat.len();
    match n {
        0 => Puiseux::one(ctx),
        1 => mat[0][0].clone(),
        2 => mat[0][0].mul(&mat[1][1]).sub(&mat[0][1].mul(&mat[1][0])),
        _ => {
            let mut acc = Puiseux::zero(ctx);
            for j in 0..n {
                let minor: Vec<Vec<Puiseux>> = mat[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(c, _)| *c != j)
                            .map(|(_, v)| v.clone())
                            .collect()
                    })
                    .collect();
                let term = mat[0][j].mul(&det_small(ctx, &minor));
                acc = if j % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
            }
            acc
        }
    }
}

/// Torsion basis mu_i = e(omega_i / T) from a truncated exponential series.
/// The series must carry enough tau-order for the evaluation tail to fall
/// below its own window.
pub fn torsion_basis(e: &TauPoly<Puiseux>, frame: &ALatticeFrame) -> Result<Vec<Puiseux>> {
    let ctx = frame.ctx().clone();
    let tinv = Puiseux::t_pow(&ctx, -1);
    let mut out = Vec::with_capacity(frame.rank());
    for om in &frame.omega {
        let z = om.mul(&tinv);
        let val = eval_checked(e, &z)?;
        out.push(val);
    }
    Ok(out)
}

/// Evaluate a truncated exponential. The dropped tau-tail is bounded by
/// the order of the last included term (the terms of a convergent
/// exponential evaluation grow monotonically past the truncation point at
/// desk scale); the result window is capped there. Fails when even the
/// leading term cannot be certified.
pub fn eval_checked(e: &TauPoly<Puiseux>, z: &Puiseux) -> Result<Puiseux> {
    let val = e.eval(z);
    let kmax = e.len() - 1;
    let last = e.coeffs[kmax].mul(&z.q_power(kmax as u32));
    let window = match val.prec() {
        Prec::Finite(p) => p,
        Prec::Exact => i64::MAX / 4,
    };
    let last_ord = match last.ord_exp() {
        Some(o) => o,
        None => return Ok(val),
    };
    if last_ord < window {
        let capped = val.truncated(last_ord);
        if capped.is_zero_to_prec() {
            return Err(Error::PrecisionExhausted(format!(
                "exponential series truncated too early: tail order {last_ord} hides the value"
            )));
        }
        return Ok(capped);
    }
    Ok(val)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Context;
    use num::Zero;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ctx(q: u64, m: u32) -> Ctx {
        Context::new(q, m, 2, 120).unwrap()
    }

    fn rat(n: i64, d: i64) -> Ratio<i64> {
        Ratio::new(n, d)
    }

    #[test]
    fn smb_already_minimal() {
        let c = ctx(2, 1);
        let gens = vec![Puiseux::one(&c), Puiseux::t_pow(&c, 1)];
        let v = smb_finite(&gens).unwrap();
        assert_eq!(v.spectrum().unwrap().logs(), &[rat(0, 1), rat(1, 1)]);
        assert_eq!(v.basis[0], gens[0]);
        assert_eq!(v.basis[1], gens[1]);
    }

    #[test]
    fn smb_reduces_dependent_residues() {
        let c = ctx(3, 1);
        // gens (1, 1 + T^{-1}): SMB is (T^{-1}, 1) with logs (-1, 0)
        let one = Puiseux::one(&c);
        let g2 = one.add(&Puiseux::t_pow(&c, -1));
        let v = smb_finite(&[one, g2]).unwrap();
        assert_eq!(v.spectrum().unwrap().logs(), &[rat(-1, 1), rat(0, 1)]);
        assert_eq!(v.basis[0], Puiseux::t_pow(&c, -1));
    }

    #[test]
    fn smb_constant_field_basis_is_inseparable() {
        // F_q-basis of F^{(2)} inside F_{q^m}, m even: logs (0, 0)
        let c = ctx(2, 2);
        let w = Puiseux::monomial(&c, 0, c.fq.gen_w());
        let one = Puiseux::one(&c);
        let v = smb_finite(&[one, w]).unwrap();
        assert_eq!(v.spectrum().unwrap().logs(), &[rat(0, 1), rat(0, 1)]);
        let spec = v.spectrum().unwrap();
        assert!(spec.is_k_inseparable(1));
    }

    #[test]
    fn smb_detects_dependence() {
        let c = ctx(2, 1);
        let one = Puiseux::one(&c);
        let sum = one.add(&one); // = 0 in char 2
        assert_eq!(smb_finite(&[one.clone(), sum]).unwrap_err(), Error::DependentGenerators);
        let t = Puiseux::t_pow(&c, 1);
        assert_eq!(
            smb_finite(&[t.clone(), one.clone(), t.add(&one)]).unwrap_err(),
            Error::DependentGenerators
        );
    }

    #[test]
    fn smb_invariance_under_basis_change() {
        let c = ctx(3, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..10 {
            let v = random_lattice(&c, &mut rng, 3);
            let spec1 = v.spectrum().unwrap();
            // apply a random invertible F_q change of generators
            let fqels = c.fq.fq_elements().to_vec();
            let n = v.dim();
            let gens2: Vec<Puiseux> = loop {
                let mat: Vec<Vec<FqmEl>> = (0..n)
                    .map(|_| (0..n).map(|_| fqels[rng.gen_range(0..fqels.len())]).collect())
                    .collect();
                let gens: Vec<Puiseux> = (0..n)
                    .map(|i| {
                        let mut acc = Puiseux::zero(&c);
                        for j in 0..n {
                            acc = acc.add(&v.basis[j].scale(mat[i][j]));
                        }
                        acc
                    })
                    .collect();
                if let Ok(v2) = smb_finite(&gens) {
                    if v2.dim() == n {
                        break v2.basis;
                    }
                }
            };
            let v2 = FiniteLattice::new(&c, gens2);
            assert_eq!(v2.spectrum().unwrap(), spec1);
        }
    }

    #[test]
    fn smb_norm_property_exhaustive() {
        // |sum a_i lambda_i| = max |lambda_i| over nonzero a_i, full
        // enumeration in dimension <= 3.
        let c = ctx(2, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..8 {
            let v = random_lattice(&c, &mut rng, 3);
            let elems = v.enumerate().unwrap();
            let logs: Vec<Ratio<i64>> =
                v.basis.iter().map(|b| b.logq().unwrap()).collect();
            let q = c.q();
            for (idx, el) in elems.iter().enumerate().skip(1) {
                let mut rest = idx as u64;
                let mut expect: Option<Ratio<i64>> = None;
                for j in 0..v.dim() {
                    let digit = rest % q;
                    rest /= q;
                    if digit != 0 {
                        expect = Some(match expect {
                            None => logs[j],
                            Some(m) => m.max(logs[j]),
                        });
                    }
                }
                assert_eq!(el.logq().unwrap(), expect.unwrap());
            }
        }
    }

    pub(crate) fn random_lattice(c: &Ctx, rng: &mut ChaCha8Rng, n: usize) -> FiniteLattice {
        loop {
            let gens: Vec<Puiseux> = (0..n)
                .map(|_| {
                    let ord = rng.gen_range(-6i64..6);
                    let ncode = rng.gen_range(1..c.fq.qm);
                    let lead = {
                        let digits: Vec<u8> = {
                            let mut x = ncode;
                            (0..c.params.m)
                                .map(|_| {
                                    let d = (x % c.q()) as u8;
                                    x /= c.q();
                                    d
                                })
                                .collect()
                        };
                        c.fq.from_digits(&digits).unwrap()
                    };
                    let mut z = Puiseux::monomial(c, ord, lead);
                    for _ in 0..rng.gen_range(0..3) {
                        let e = rng.gen_range(ord + 1..ord + 8);
                        let cf = c.fq.gen_w();
                        z = z.add(&Puiseux::monomial(c, e, cf));
                    }
                    z
                })
                .collect();
            if let Ok(v) = smb_finite(&gens) {
                if v.dim() == n {
                    return v;
                }
            }
        }
    }

    #[test]
    fn exp_of_trivial_and_line() {
        let c = ctx(2, 1);
        // V = {0}: e_V = X
        let v = FiniteLattice::new(&c, vec![]);
        let e = exp_finite(&v).unwrap();
        assert_eq!(e.len(), 1);
        assert_eq!(e.coeffs[0], Puiseux::one(&c));
        // V = F_q * 1: e_V = X - X^q
        let v = FiniteLattice::new(&c, vec![Puiseux::one(&c)]);
        let e = exp_finite(&v).unwrap();
        assert_eq!(e.len(), 2);
        assert!(e.coeffs[0].sub(&Puiseux::one(&c)).is_zero_to_prec());
        assert!(e.coeffs[1].add(&Puiseux::one(&c)).is_zero_to_prec());
    }

    #[test]
    fn exp_recursion_matches_direct_product() {
        let c = ctx(3, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..6 {
            let v = random_lattice(&c, &mut rng, 3);
            let direct = exp_basis_direct(&c, &v.basis).unwrap();
            let rec = exp_basis(&c, &v.basis).unwrap();
            assert_eq!(direct.len(), rec.len());
            for (a, b) in direct.coeffs.iter().zip(rec.coeffs.iter()) {
                assert!(a.sub(b).is_zero_to_prec());
            }
        }
    }

    #[test]
    fn exp_kernel_contains_basis() {
        let c = ctx(2, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..6 {
            let v = random_lattice(&c, &mut rng, 4);
            let e = exp_finite(&v).unwrap();
            for b in &v.basis {
                let img = e.eval(b);
                assert!(
                    img.is_zero_to_prec(),
                    "kernel violation: {}",
                    img.display()
                );
            }
        }
    }

    #[test]
    fn eisenstein_finite_small_cases() {
        let c3 = ctx(3, 1);
        let line = FiniteLattice::new(&c3, vec![Puiseux::one(&c3)]);
        // E_0 = -1
        assert_eq!(
            eisenstein_finite(&line, 0).unwrap(),
            Puiseux::from_int(&c3, -1)
        );
        // V = F_q: E_{q-1} = sum of 1 over q-1 elements = -1
        let e = eisenstein_finite(&line, 2).unwrap();
        assert_eq!(e, Puiseux::from_int(&c3, -1));
        // k not divisible by q-1 (q > 2): 0
        let e = eisenstein_finite(&line, 3).unwrap();
        assert!(e.is_zero_to_prec());
    }

    #[test]
    fn moore_sums_line_case() {
        // V = F_q lambda: M(phi_1) = -1/lambda, det = (-1/lambda)^q != 0
        let c = ctx(3, 1);
        let lam = Puiseux::t_pow(&c, 1);
        let v = FiniteLattice::new(&c, vec![lam.clone()]);
        let m = moore_sums(&v).unwrap();
        let expect = lam.inv().unwrap().neg();
        assert!(m[0].sub(&expect).is_zero_to_prec());
        let det = moore_det(&v, 1).unwrap();
        assert!(det.sub(&expect.q_power(1)).is_zero_to_prec());
        assert!(!det.is_zero_to_prec());
    }

    #[test]
    fn moore_scaling_homogeneity() {
        let c = ctx(2, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let v = random_lattice(&c, &mut rng, 2);
        let t = Puiseux::t_pow(&c, 1);
        let scaled = FiniteLattice::new(&c, v.basis.iter().map(|b| b.mul(&t)).collect());
        let m1 = moore_sums(&v).unwrap();
        let m2 = moore_sums(&scaled).unwrap();
        let ti = t.inv().unwrap();
        for (a, b) in m1.iter().zip(m2.iter()) {
            assert!(a.mul(&ti).sub(b).is_zero_to_prec());
        }
    }

    #[test]
    fn moore_nonvanishing_random() {
        let c = ctx(3, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        for _ in 0..10 {
            let n = rng.gen_range(1..=3);
            let v = random_lattice(&c, &mut rng, n);
            for rp in 1..=n {
                let det = moore_det(&v, rp).unwrap();
                assert!(!det.is_zero_to_prec(), "vanishing Moore determinant");
            }
        }
    }

    #[test]
    fn gamma_of_constant_field_basis() {
        // V = F_q-basis of F^{(l)}: monic product is X^{q^l} - X
        let c = ctx(2, 2);
        let w = Puiseux::monomial(&c, 0, c.fq.gen_w());
        let v = FiniteLattice::new(&c, vec![Puiseux::one(&c), w]);
        let g = gamma_coeffs(&v).unwrap();
        assert_eq!(g.len(), 3);
        assert!(g[0].add(&Puiseux::one(&c)).is_zero_to_prec()); // -X
        assert!(g[1].is_zero_to_prec());
        assert!(g[2].sub(&Puiseux::one(&c)).is_zero_to_prec()); // X^{q^2}
        // V = {0}: product is X
        let v0 = FiniteLattice::new(&c, vec![]);
        let g0 = gamma_coeffs(&v0).unwrap();
        assert_eq!(g0.len(), 1);
        assert_eq!(g0[0], Puiseux::one(&c));
    }

    #[test]
    fn gamma_consistency_with_exp() {
        let c = ctx(3, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..5 {
            let v = random_lattice(&c, &mut rng, 2);
            let g = gamma_coeffs(&v).unwrap();
            let e = exp_finite(&v).unwrap();
            // gamma_k = alpha_k / alpha_n
            let an_inv = e.coeffs[v.dim()].inv().unwrap();
            for (gk, ak) in g.iter().zip(e.coeffs.iter()) {
                assert!(gk.sub(&ak.mul(&an_inv)).is_zero_to_prec());
            }
        }
    }

    #[test]
    fn truncation_basics() {
        let c = ctx(2, 2);
        let wt = Puiseux::monomial(&c, -c.params.e, c.fq.gen_w());
        let frame = ALatticeFrame::new(vec![wt.clone(), Puiseux::one(&c)]).unwrap();
        // d = 1: the basis is the frame set
        let v1 = truncate_a_lattice(&frame, 1).unwrap();
        assert_eq!(v1.dim(), 2);
        // reverse-frame order: omega_r first
        assert_eq!(v1.basis[0], Puiseux::one(&c));
        assert_eq!(v1.basis[1], wt);
        // d = 2 contains d = 1 as a subset
        let v2 = truncate_a_lattice(&frame, 2).unwrap();
        assert_eq!(v2.dim(), 4);
        for b in &v1.basis {
            assert!(v2.basis.iter().any(|x| x == b));
        }
        // spectrum of the truncation = sorted multiset {x_i + j}
        let spec = smb_finite(&v2.basis).unwrap().spectrum().unwrap();
        assert_eq!(
            spec.logs(),
            &[rat(0, 1), rat(1, 1), rat(1, 1), rat(2, 1)]
        );
    }

    #[test]
    fn insep_lattice_newton_polygon_unchanged_when_alpha_dropped() {
        // 1-inseparable lattice: alpha_1's point is above the polygon, so
        // replacing alpha_1 by 0 leaves it unchanged.
        let c = ctx(2, 2);
        let w = Puiseux::monomial(&c, 0, c.fq.gen_w());
        let v = FiniteLattice::new(&c, vec![Puiseux::one(&c), w]);
        let e = exp_finite(&v).unwrap();
        let np1 = crate::tau::newton_polygon(&e).unwrap();
        let mut dropped = e.clone();
        dropped.coeffs[1] = Puiseux::zero(&c);
        let np2 = crate::tau::newton_polygon(&dropped).unwrap();
        assert_eq!(np1, np2);
        // and the spectrum has s_1 = s_2
        let spec = crate::tau::np_to_spectrum(&np1, &c).unwrap();
        assert_eq!(spec.logs()[0], spec.logs()[1]);
        assert_eq!(spec.logs()[0], Ratio::zero());
    }
}
