//! Modular-form values at a rank-r frame: the exponential coefficients
//! alpha_k (para-Eisenstein series), the logarithm coefficients beta_k
//! (with E_{q^k-1} = -beta_k), the operator coefficients g_k of phi_T,
//! general coefficient forms of phi_a, Eisenstein series by direct
//! summation, normalizations against the Carlitz module, and functional
//! determinants via dual-number lifts.
//!
//! alpha_k for an A-lattice is the limit of alpha_k of its finite
//! truncations {sum a_i omega_i : deg a_i < d}. The tail of that limit
//! shrinks double-exponentially in d (full-coset cancellations), so the
//! profile builder raises d until the coefficients are unchanged at working
//! precision for two consecutive steps and records the degree it used.

use num::rational::Ratio;
use rayon::prelude::*;

use crate::building;
use crate::dual::Dual;
use crate::error::{Error, Result};
use crate::lattice::{det_small, truncate_basis, ALatticeFrame};
use crate::params::{Ctx, MAX_ENUM};
use crate::poly::{bracket, bracket_t, carlitz_coeffs, d_factor, PolyA};
use crate::series::Puiseux;
use crate::tau::{TauCoeff, TauPoly};

/// Stabilization policy for the truncation-degree loop.
#[derive(Clone, Copy, Debug)]
pub struct StabilizePolicy {
    /// Give up past this truncation degree.
    pub d_cap: u32,
    /// Verify the frame is fundamental before computing.
    pub check_fundamental: bool,
}

impl Default for StabilizePolicy {
    fn default() -> Self {
        StabilizePolicy { d_cap: 12, check_fundamental: true }
    }
}

/// Values of the basic forms at one frame.
#[derive(Clone, Debug)]
pub struct FormsProfile<S = Puiseux> {
    /// The frame coordinates the profile was computed from.
    pub omega: Vec<S>,
    pub kmax: usize,
    /// Truncation degree at which the coefficients stabilized.
    pub d_used: u32,
    /// alpha_0..alpha_kmax, the exponential coefficients.
    pub alpha: Vec<S>,
    /// beta_0..beta_kmax, the logarithm coefficients; E_{q^k-1} = -beta_k.
    pub beta: Vec<S>,
    /// g_0..g_kmax with g_0 = T; g_k = 0 for k > rank (kept as a check).
    pub g: Vec<S>,
}

impl<S: TauCoeff> FormsProfile<S> {
    pub fn rank(&self) -> usize {
        self.omega.len()
    }

    pub fn ctx(&self) -> &Ctx {
        self.omega[0].ctx()
    }

    /// E_{q^k-1} = -beta_k.
    pub fn eisenstein_special(&self, k: usize) -> S {
        self.beta[k].neg()
    }

    /// The discriminant Delta = g_r.
    pub fn delta(&self) -> &S {
        &self.g[self.rank()]
    }

    /// phi_T as a twisted polynomial (length rank+1).
    pub fn phi_t(&self) -> TauPoly<S> {
        TauPoly::new(self.g[..=self.rank()].to_vec())
    }

    /// The exponential truncated at the stored tau-order.
    pub fn exp_series(&self) -> TauPoly<S> {
        TauPoly::new(self.alpha.clone())
    }
}

/// Profile of the basic forms at a fundamental frame.
pub fn alpha_series(
    frame: &ALatticeFrame,
    kmax: usize,
    policy: StabilizePolicy,
) -> Result<FormsProfile<Puiseux>> {
    if policy.check_fundamental {
        let cert = building::is_fundamental(frame)?;
        if !cert.fundamental {
            return Err(Error::NotInFundamentalDomain(cert.reason));
        }
    }
    let logs = frame.logs()?;
    profile_from_coeffs(&frame.omega, &logs, kmax, policy)
}

/// Generic profile builder; `coeffs` are the frame coordinates (plain or
/// dual), `logs` their valuations.
pub fn profile_from_coeffs<S: TauCoeff>(
    coeffs: &[S],
    logs: &[Ratio<i64>],
    kmax: usize,
    policy: StabilizePolicy,
) -> Result<FormsProfile<S>> {
    let ctx = coeffs[0].ctx().clone();
    let r = coeffs.len();
    let zero = S::zero(&ctx);
    let mut prev: Option<Vec<S>> = None;
    let mut stable = 0u32;
    let mut d_used = 0;
    let mut alpha: Option<Vec<S>> = None;
    for d in 1..=policy.d_cap {
        if (r as u64) * (d as u64) > 64 {
            return Err(Error::TruncationNotStabilized(d));
        }
        let basis = truncate_basis(coeffs, logs, d);
        let e = crate::lattice::exp_basis(&ctx, &basis)?;
        let cur: Vec<S> = (0..=kmax)
            .map(|k| e.coeff(k).cloned().unwrap_or_else(|| zero.clone()))
            .collect();
        if let Some(p) = &prev {
            let agree = p
                .iter()
                .zip(cur.iter())
                .all(|(a, b)| a.sub(b).is_zero_to_prec());
            stable = if agree { stable + 1 } else { 0 };
        }
        if stable >= 2 {
            d_used = d;
            alpha = Some(cur);
            break;
        }
        prev = Some(cur);
    }
    let alpha = alpha.ok_or(Error::TruncationNotStabilized(policy.d_cap))?;
    let beta = TauPoly::new(alpha.clone()).inverse(kmax + 1)?.coeffs;
    // g_k = [T,k] alpha_k - sum_{0<i<k} g_i alpha_{k-i}^{q^i}; g_0 = T.
    let mut g: Vec<S> = vec![S::lift(Puiseux::t_pow(&ctx, 1))];
    for k in 1..=kmax {
        let br = S::lift(Puiseux::from_poly(&bracket_t(&ctx, k as u32)));
        let mut acc = br.mul(&alpha[k]);
        for i in 1..k {
            acc = acc.sub(&g[i].mul(&alpha[k - i].q_power(i as u32)));
        }
        g.push(acc);
    }
    Ok(FormsProfile { omega: coeffs.to_vec(), kmax, d_used, alpha, beta, g })
}

/// E_k at the frame by direct summation over {sum a_i omega_i : deg a_i < d},
/// all nonzero tuples. This is the independent oracle for -beta_j at
/// k = q^j - 1; it never touches the exponential machinery.
pub fn eisenstein_direct(frame: &ALatticeFrame, k: u32, d: u32) -> Result<Puiseux> {
    Ok(eisenstein_direct_many(frame, &[k], d)?.remove(0))
}

/// Several weights in one pass; each lattice element is inverted once.
pub fn eisenstein_direct_many(
    frame: &ALatticeFrame,
    ks: &[u32],
    d: u32,
) -> Result<Vec<Puiseux>> {
    if ks.iter().any(|&k| k == 0) {
        return Err(Error::Usage("weight must be positive".into()));
    }
    let ctx = frame.ctx().clone();
    let r = frame.rank();
    let q = ctx.q();
    let total = ctx.q_pow_checked((r as u32) * d)?;
    if total > MAX_ENUM {
        return Err(Error::UnsupportedParams(
            "Eisenstein truncation too large to enumerate".into(),
        ));
    }
    // basis vector t = i*d + j represents T^j omega_i
    let mut vecs = Vec::with_capacity(r * d as usize);
    for om in &frame.omega {
        for j in 0..d {
            vecs.push(om.mul(&Puiseux::t_pow(&ctx, j as i64)));
        }
    }
    let fqels = ctx.fq.fq_elements().to_vec();
    let terms = |idx: u64| -> Result<Vec<Puiseux>> {
        let mut lam = Puiseux::zero(&ctx);
        let mut rest = idx;
        for v in &vecs {
            let digit = (rest % q) as usize;
            rest /= q;
            if digit != 0 {
                lam = lam.add(&v.scale(fqels[digit]));
            }
        }
        let li = lam.inv()?;
        ks.iter().map(|&k| pow_neg_with_inverse(&lam, &li, k)).collect()
    };
    let zeros = || vec![Puiseux::zero(&ctx); ks.len()];
    (1..total)
        .into_par_iter()
        .try_fold(zeros, |acc, idx| -> Result<Vec<Puiseux>> {
            let ts = terms(idx)?;
            Ok(acc.iter().zip(ts.iter()).map(|(a, t)| a.add(t)).collect())
        })
        .try_reduce(zeros, |a, b| {
            Ok(a.iter().zip(b.iter()).map(|(x, y)| x.add(y)).collect())
        })
}

/// lambda^{-k} from a precomputed inverse, through the base-q digits of k:
/// Frobenius powers and a handful of multiplications. k = q^j - 1 takes the
/// short route lambda * (lambda^{-1})^{q^j}.
fn pow_neg_with_inverse(lam: &Puiseux, li: &Puiseux, k: u32) -> Result<Puiseux> {
    let ctx = &lam.ctx;
    let q = ctx.q() as u32;
    {
        let mut pw = 1u64;
        let mut j = 0u32;
        while pw < k as u64 + 1 {
            pw *= q as u64;
            j += 1;
        }
        if pw == k as u64 + 1 {
            return Ok(lam.mul(&li.q_power(j)));
        }
    }
    let mut acc: Option<Puiseux> = None;
    let mut rest = k;
    let mut j = 0u32;
    while rest > 0 {
        let digit = rest % q;
        rest /= q;
        if digit > 0 {
            let base = li.q_power(j); // (lambda^{-1})^{q^j}
            let p = base.pow_int(digit as i64)?;
            acc = Some(match acc {
                None => p,
                Some(a) => a.mul(&p),
            });
        }
        j += 1;
    }
    Ok(acc.expect("k > 0"))
}

/// Coefficients of phi_a built from phi_T by Horner composition in the
/// twisted ring. Output length is rank * deg a + 1.
pub fn coefficient_forms<S: TauCoeff>(profile: &FormsProfile<S>, a: &PolyA) -> Result<Vec<S>> {
    let ctx = profile.ctx().clone();
    let deg = match a.degree() {
        None | Some(0) => return Err(Error::Usage("a must be nonconstant".into())),
        Some(d) => d,
    };
    let phi_t = profile.phi_t();
    let lift_const = |c| S::lift(Puiseux::monomial(&ctx, 0, c));
    let mut acc = TauPoly::new(vec![lift_const(a.coeff(deg))]);
    for i in (0..deg).rev() {
        acc = phi_t.mul(&acc);
        acc.coeffs[0] = acc.coeffs[0].add(&lift_const(a.coeff(i)));
    }
    Ok(acc.coeffs)
}

/// pibar^n for n a multiple of q-1, through the operational definition
/// pibar^{q-1} = [T,1] alpha_1(A) on the rank-one frame of the lattice A.
pub fn pibar_power(ctx: &Ctx, n: i64) -> Result<Puiseux> {
    let q1 = ctx.q() as i64 - 1;
    if n.rem_euclid(q1.max(1)) != 0 {
        return Err(Error::IllDefinedExponent(n));
    }
    if n == 0 {
        return Ok(Puiseux::one(ctx));
    }
    let frame = ALatticeFrame::new(vec![Puiseux::one(ctx)])?;
    let policy = StabilizePolicy { check_fundamental: false, ..Default::default() };
    let profile = alpha_series(&frame, 1, policy)?;
    let base = Puiseux::from_poly(&bracket_t(ctx, 1)).mul(&profile.alpha[1]);
    base.pow_int(n / q1)
}

/// Normalized pair (l~_k, a~_k): the coefficient form of phi_a and the
/// para-Eisenstein series, both divided by their values on the lattice A.
pub fn normalize_forms(
    profile: &FormsProfile<Puiseux>,
    a: &PolyA,
    k: usize,
) -> Result<(Puiseux, Puiseux)> {
    let ctx = profile.ctx().clone();
    let deg = a.degree().ok_or(Error::ZeroInput)?;
    if k > deg && k > 0 {
        return Err(Error::ZeroCarlitzCoefficient(k as u32));
    }
    let qk = (0..k).try_fold(1i64, |acc, _| {
        acc.checked_mul(ctx.q() as i64)
            .ok_or_else(|| Error::UnsupportedParams("q^k overflow".into()))
    })?;
    let pib = pibar_power(&ctx, 1 - qk)?;
    let carl = carlitz_coeffs(a)?;
    let ck = Puiseux::from_poly(&carl[k]);
    let ell = coefficient_forms(profile, a)?;
    let lk = ell
        .get(k)
        .cloned()
        .unwrap_or_else(|| Puiseux::zero(&ctx));
    let l_norm = pib.mul(&ck.inv()?).mul(&lk);
    let dk = Puiseux::from_poly(&d_factor(&ctx, k as u32));
    let a_norm = pib.mul(&dk).mul(&profile.alpha[k]);
    Ok((l_norm, a_norm))
}

/// One row of the convergence table for a = T^d.
#[derive(Clone, Debug)]
pub struct ConvergenceRow {
    pub d: u32,
    /// v(l~_k - a~_k); None when the difference vanishes to precision.
    pub v_diff: Option<Ratio<i64>>,
    /// v(1 - D_k c_k / [a,k]) computed exactly in K; None means the ratio
    /// is exactly 1.
    pub v_carlitz_ratio: Option<Ratio<i64>>,
}

/// Convergence of the normalized coefficient forms towards the normalized
/// para-Eisenstein series, for a = T^d over the listed degrees. The frame
/// must satisfy log omega_{r-1} >= k (rank-one frames qualify trivially).
pub fn convergence_report(
    profile: &FormsProfile<Puiseux>,
    k: usize,
    degrees: &[u32],
) -> Result<Vec<ConvergenceRow>> {
    let ctx = profile.ctx().clone();
    let r = profile.rank();
    if r >= 2 {
        let logs: Vec<Ratio<i64>> = profile
            .omega
            .iter()
            .map(|o| o.logq())
            .collect::<Result<_>>()?;
        if logs[r - 2] < Ratio::new(k as i64, 1) {
            return Err(Error::NotInFk(k as i64));
        }
    }
    let mut rows = Vec::with_capacity(degrees.len());
    for &d in degrees {
        let a = PolyA::t_pow(&ctx, d as usize);
        let (l_norm, a_norm) = normalize_forms(profile, &a, k)?;
        let diff = l_norm.sub(&a_norm);
        let v_diff = diff.valuation().ok();
        // Lemma column, exact in K
        let dk_ck = crate::poly::RatK::from_poly(
            d_factor(&ctx, k as u32).mul(&carlitz_coeffs(&a)?[k]),
        );
        let br = crate::poly::RatK::from_poly(bracket(&a, k as u32));
        let ratio = dk_ck.div(&br)?;
        let one = crate::poly::RatK::from_poly(PolyA::one(&ctx));
        let v_ratio = one.sub(&ratio).v_infinity().map(|v| Ratio::new(v, 1));
        rows.push(ConvergenceRow { d, v_diff, v_carlitz_ratio: v_ratio });
    }
    Ok(rows)
}

/// Which family of forms a functional determinant differentiates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DetFamily {
    /// para-Eisenstein series alpha_1..alpha_{r'}
    Alpha,
    /// Eisenstein series E_{q-1}, ..., E_{q^{r'}-1}
    Eisenstein,
    /// coefficient forms of phi_a
    Coeff(PolyA),
}

/// det over 1 <= i,j <= r' of d f_i / d omega_j, computed by dual-number
/// lifts with one active coordinate per column (omega_r = 1 stays fixed).
pub fn jacobian_det(
    frame: &ALatticeFrame,
    family: DetFamily,
    rp: usize,
) -> Result<Puiseux> {
    let ctx = frame.ctx().clone();
    let r = frame.rank();
    if rp < 1 || rp >= r {
        return Err(Error::Usage(format!("need 1 <= r' < r, got r' = {rp}")));
    }
    let logs = frame.logs()?;
    let kmax = r.max(rp);
    let mut cols: Vec<Vec<Puiseux>> = Vec::with_capacity(rp);
    for j in 0..rp {
        let duals: Vec<Dual> = frame
            .omega
            .iter()
            .enumerate()
            .map(|(t, om)| {
                if t == j {
                    Dual::active(om.clone())
                } else {
                    Dual::constant(om.clone())
                }
            })
            .collect();
        let policy = StabilizePolicy { check_fundamental: false, ..Default::default() };
        let profile = profile_from_coeffs(&duals, &logs, kmax, policy)?;
        let col: Vec<Puiseux> = (1..=rp)
            .map(|i| -> Result<Puiseux> {
                let fi = match &family {
                    DetFamily::Alpha => profile.alpha[i].clone(),
                    DetFamily::Eisenstein => profile.beta[i].neg(),
                    DetFamily::Coeff(a) => {
                        let ell = coefficient_forms(&profile, a)?;
                        ell.get(i)
                            .cloned()
                            .unwrap_or_else(|| Dual::constant(Puiseux::zero(&ctx)))
                    }
                };
                Ok(fi.der)
            })
            .collect::<Result<_>>()?;
        cols.push(col);
    }
    // matrix[i][j] = d f_{i+1} / d omega_{j+1}
    let mat: Vec<Vec<Puiseux>> = (0..rp)
        .map(|i| (0..rp).map(|j| cols[j][i].clone()).collect())
        .collect();
    Ok(det_small(&ctx, &mat))
}

/// A value counts as vanishing when its visible leading log is below
/// -(n/e)/2, the precision floor of the context.
pub fn vanishes_to_floor(z: &Puiseux) -> bool {
    let ctx = &z.ctx;
    let floor = -Ratio::new(ctx.params.n, 2 * ctx.params.e);
    match z.logq() {
        Ok(l) => l < floor,
        Err(_) => true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::params::Context;
    use num::Zero;

    fn ctx(q: u64, m: u32, e: i64, n: i64) -> Ctx {
        Context::new(q, m, e, n).unwrap()
    }

    fn rank1_frame(c: &Ctx) -> ALatticeFrame {
        ALatticeFrame::new(vec![Puiseux::one(c)]).unwrap()
    }

    #[test]
    fn rank_one_profile_matches_carlitz_normalization() {
        // On the lattice A: g_1 = [T,1] alpha_1(A) = pibar^{q-1}, and
        // log alpha_k(A) = q(q^k-1)/(q-1) - k q^k.
        for q in [2u64, 3] {
            let c = ctx(q, 1, 1, 160);
            let frame = rank1_frame(&c);
            let policy = StabilizePolicy { check_fundamental: false, ..Default::default() };
            let profile = alpha_series(&frame, 3, policy).unwrap();
            assert_eq!(profile.alpha[0], Puiseux::one(&c));
            let qi = q as i64;
            for k in 1..=3usize {
                let qk = qi.pow(k as u32);
                let expect = Ratio::new(qi * (qk - 1), qi - 1) - Ratio::new(k as i64 * qk, 1);
                assert_eq!(
                    profile.alpha[k].logq().unwrap(),
                    expect,
                    "q={q} k={k}"
                );
            }
            // pibar^{q-1} has log q
            let pib = pibar_power(&c, qi - 1).unwrap();
            assert_eq!(pib.logq().unwrap(), Ratio::new(qi, 1));
            assert_eq!(pibar_power(&c, 0).unwrap(), Puiseux::one(&c));
            // exponent 1 - q^2 gives log -q(q+1)
            let pw = pibar_power(&c, 1 - qi * qi).unwrap();
            assert_eq!(pw.logq().unwrap(), Ratio::new(-qi * (qi + 1), 1));
            if q > 2 {
                assert!(matches!(
                    pibar_power(&c, 1),
                    Err(Error::IllDefinedExponent(1))
                ));
            }
        }
    }

    #[test]
    fn exp_log_recursion_closure_rank1() {
        let c = ctx(3, 1, 1, 120);
        let frame = rank1_frame(&c);
        let policy = StabilizePolicy { check_fundamental: false, ..Default::default() };
        let profile = alpha_series(&frame, 4, policy).unwrap();
        // sum_{i+j=k} alpha_i beta_j^{q^i} = 0 and the mirrored form
        for k in 1..=4usize {
            let mut s1 = Puiseux::zero(&c);
            let mut s2 = Puiseux::zero(&c);
            for i in 0..=k {
                let j = k - i;
                s1 = s1.add(&profile.alpha[i].mul(&profile.beta[j].q_power(i as u32)));
                s2 = s2.add(&profile.alpha[i].q_power(j as u32).mul(&profile.beta[j]));
            }
            assert!(s1.is_zero_to_prec(), "k={k}: {}", s1.display());
            assert!(s2.is_zero_to_prec(), "k={k}: {}", s2.display());
        }
    }

    #[test]
    fn normalized_values_on_lattice_a_are_one() {
        // Remark-style check: on the rank-one frame of A both normalized
        // quantities equal 1.
        let c = ctx(2, 1, 1, 160);
        let frame = rank1_frame(&c);
        let policy = StabilizePolicy { check_fundamental: false, ..Default::default() };
        let profile = alpha_series(&frame, 3, policy).unwrap();
        for k in 1..=2usize {
            let a = PolyA::t_pow(&c, k + 2);
            let (l_norm, a_norm) = normalize_forms(&profile, &a, k).unwrap();
            let one = Puiseux::one(&c);
            assert!(l_norm.sub(&one).is_zero_to_prec(), "l~_{k}: {}", l_norm.display());
            assert!(a_norm.sub(&one).is_zero_to_prec(), "a~_{k}: {}", a_norm.display());
        }
    }

    #[test]
    fn error_paths() {
        let c = ctx(3, 2, 1, 120);
        let frame = ALatticeFrame::new(vec![
            Puiseux::monomial(&c, -1, c.fq.gen_w()),
            Puiseux::one(&c),
        ])
        .unwrap();
        let profile = alpha_series(&frame, 2, StabilizePolicy::default()).unwrap();
        // normalization index beyond deg a
        let a = PolyA::t(&c);
        assert!(matches!(
            normalize_forms(&profile, &a, 2),
            Err(Error::ZeroCarlitzCoefficient(2))
        ));
        // convergence region requires log omega_{r-1} >= k
        assert!(matches!(
            convergence_report(&profile, 2, &[2, 3]),
            Err(Error::NotInFk(2))
        ));
        // jacobian rank bound
        assert!(jacobian_det(&frame, DetFamily::Alpha, 2).is_err());
        // direct sum needs a positive weight
        assert!(eisenstein_direct(&frame, 0, 2).is_err());
    }

    #[test]
    fn carlitz_ratio_column_is_exact() {
        let c = ctx(2, 1, 1, 120);
        let frame = rank1_frame(&c);
        let policy = StabilizePolicy { check_fundamental: false, ..Default::default() };
        let profile = alpha_series(&frame, 2, policy).unwrap();
        let rows = convergence_report(&profile, 2, &[2, 3, 4, 5, 6]).unwrap();
        // k = 2: strictly increasing finite valuations
        let mut last: Option<Ratio<i64>> = None;
        for row in &rows {
            let v = row.v_carlitz_ratio.expect("finite for k = 2");
            if let Some(l) = last {
                assert!(v > l, "not increasing: {l} -> {v}");
            }
            last = Some(v);
        }
        // k = 1: the ratio is exactly 1 for every degree
        let rows = convergence_report(&profile, 1, &[1, 2, 3]).unwrap();
        for row in &rows {
            assert_eq!(row.v_carlitz_ratio, None);
        }
    }
}
