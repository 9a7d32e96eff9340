//! The apartment and Weyl chamber of the building, the building map on the
//! fundamental domain, the inseparability complexes W(k), fiber sampling,
//! and the affineness checker for log|f| of units.
//!
//! Points of the apartment are rational vectors (x_1, ..., x_r) with
//! x_r = 0; the Weyl chamber is x_1 >= x_2 >= ... >= x_r, with walls
//! x_i = x_{i+1}. A fundamental frame maps to the point of its coordinate
//! logs. Membership in W(k) is decided through the sorted multiset
//! {x_i + j : 1 <= i <= r, j >= 0}, which equals the spectrum of any frame
//! over the point.

use num::rational::Ratio;
use num::{One, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fq::FqmEl;
use crate::lattice::{smb_finite, ALatticeFrame, Spectrum};
use crate::params::Ctx;
use crate::series::Puiseux;

/// A rational point of the apartment, last coordinate zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApartmentPoint {
    pub x: Vec<Ratio<i64>>,
}

impl ApartmentPoint {
    pub fn new(x: Vec<Ratio<i64>>) -> Result<ApartmentPoint> {
        if x.is_empty() || !x.last().unwrap().is_zero() {
            return Err(Error::Usage("apartment point needs x_r = 0".into()));
        }
        Ok(ApartmentPoint { x })
    }

    pub fn rank(&self) -> usize {
        self.x.len()
    }

    pub fn in_weyl_chamber(&self) -> bool {
        self.x.windows(2).all(|w| w[0] >= w[1])
    }

    /// Indices i with x_i = x_{i+1} (1-based, i < r).
    pub fn walls(&self) -> Vec<usize> {
        self.x
            .windows(2)
            .enumerate()
            .filter(|(_, w)| w[0] == w[1])
            .map(|(i, _)| i + 1)
            .collect()
    }

    pub fn as_strings(&self) -> Vec<String> {
        self.x.iter().map(|r| format!("{}/{}", r.numer(), r.denom())).collect()
    }
}

/// Integral chamber vertex sum n_i k_i, k_i = (1,...,1,0,...,0) (i ones).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, serde::Serialize)]
pub struct WeylVertex {
    /// Coefficients (n_1, ..., n_{r-1}).
    pub n: Vec<u32>,
}

impl WeylVertex {
    pub fn to_point(&self) -> ApartmentPoint {
        let r = self.n.len() + 1;
        let mut x = vec![Ratio::zero(); r];
        for (i, &ni) in self.n.iter().enumerate() {
            // k_{i+1} has ones in positions 1..=i+1
            for t in 0..=i {
                x[t] += Ratio::new(ni as i64, 1);
            }
        }
        ApartmentPoint { x }
    }
}

/// The building map: a fundamental frame goes to its coordinate logs.
pub fn building_map(frame: &ALatticeFrame) -> Result<ApartmentPoint> {
    let cert = is_fundamental(frame)?;
    if !cert.fundamental {
        return Err(Error::NotInFundamentalDomain(cert.reason));
    }
    ApartmentPoint::new(frame.logs()?)
}

/// Evidence recorded by the fundamental-domain decision.
#[derive(Clone, Debug)]
pub struct FundamentalCert {
    pub fundamental: bool,
    pub reason: String,
    /// Per congruence class: (indices, observed spectrum, predicted).
    pub class_spectra: Vec<(Vec<usize>, Spectrum, Spectrum)>,
}

pub const DEFAULT_D_CHECK: u32 = 3;

/// Decide whether the reversed frame coordinates form an SMB of the
/// A-lattice they span: (1) the logs must descend weakly to x_r = 0;
/// (2) within each class of indices whose logs are congruent mod Z, the
/// truncated class sublattice must realize exactly the predicted spectrum
/// {x_i + j}. Violating relations recur within one T-degree period, so a
/// bounded truncation decides.
pub fn is_fundamental(frame: &ALatticeFrame) -> Result<FundamentalCert> {
    is_fundamental_with(frame, DEFAULT_D_CHECK)
}

pub fn is_fundamental_with(frame: &ALatticeFrame, d_check: u32) -> Result<FundamentalCert> {
    let logs = frame.logs()?;
    let r = frame.rank();
    let fail = |reason: String| FundamentalCert {
        fundamental: false,
        reason,
        class_spectra: Vec::new(),
    };
    if logs[r - 1] != Ratio::zero() {
        return Ok(fail("last coordinate must have log 0".into()));
    }
    for i in 0..r - 1 {
        if logs[i] < logs[i + 1] {
            return Ok(fail(format!(
                "logs must descend: x_{} = {} < x_{} = {}",
                i + 1,
                logs[i],
                i + 2,
                logs[i + 1]
            )));
        }
    }
    // congruence classes mod Z
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for i in 0..r {
        let mut placed = false;
        for cl in classes.iter_mut() {
            if (logs[cl[0]] - logs[i]).is_integer() {
                cl.push(i);
                placed = true;
                break;
            }
        }
        if !placed {
            classes.push(vec![i]);
        }
    }
    let mut class_spectra = Vec::new();
    for cl in &classes {
        let mut gens = Vec::new();
        let mut predicted = Vec::new();
        for &i in cl {
            for j in 0..d_check {
                gens.push(frame.omega[i].mul(&Puiseux::t_pow(frame.ctx(), j as i64)));
                predicted.push(logs[i] + Ratio::new(j as i64, 1));
            }
        }
        predicted.sort();
        let predicted = Spectrum::new(predicted)?;
        let observed = match smb_finite(&gens) {
            Ok(v) => v.spectrum()?,
            Err(Error::DependentGenerators) => {
                return Ok(fail(format!(
                    "class {:?} is linearly dependent over the base field",
                    cl.iter().map(|i| i + 1).collect::<Vec<_>>()
                )))
            }
            Err(e) => return Err(e),
        };
        let ok = observed == predicted;
        class_spectra.push((cl.clone(), observed, predicted));
        if !ok {
            let (cl, obs, pred) = class_spectra.last().unwrap();
            return Ok(FundamentalCert {
                fundamental: false,
                reason: format!(
                    "class {:?}: observed spectrum {:?} differs from predicted {:?}",
                    cl.iter().map(|i| i + 1).collect::<Vec<_>>(),
                    obs.as_strings(),
                    pred.as_strings()
                ),
                class_spectra: class_spectra.clone(),
            });
        }
    }
    Ok(FundamentalCert { fundamental: true, reason: String::new(), class_spectra })
}

/// First L entries of the sorted multiset {x_i + j : 1 <= i <= r, j >= 0}.
/// Equals the spectrum of the truncation of any frame over x.
pub fn insep_multiset(x: &ApartmentPoint, len: usize) -> Vec<Ratio<i64>> {
    let r = x.rank();
    let mut js = vec![0i64; r];
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        let mut best: Option<(Ratio<i64>, usize)> = None;
        for i in 0..r {
            let v = x.x[i] + Ratio::new(js[i], 1);
            // ties prefer larger index, mirroring the SMB ordering
            let better = match best {
                None => true,
                Some((bv, bi)) => v < bv || (v == bv && i > bi),
            };
            if better {
                best = Some((v, i));
            }
        }
        let (v, i) = best.unwrap();
        js[i] += 1;
        out.push(v);
    }
    out
}

/// x lies in W(k): entries k and k+1 of the multiset coincide.
pub fn wk_member(x: &ApartmentPoint, k: usize) -> bool {
    if k < 1 {
        return false;
    }
    let m = insep_multiset(x, k + 1);
    m[k - 1] == m[k]
}

/// All integral chamber vertices with coefficients <= max_coeff lying in W(k).
pub fn wk_vertices(r: usize, k: usize, max_coeff: u32) -> Vec<WeylVertex> {
    assert!(r >= 2, "need rank >= 2");
    let dims = r - 1;
    let mut out = Vec::new();
    let total = (max_coeff as u64 + 1).pow(dims as u32);
    for idx in 0..total {
        let mut n = Vec::with_capacity(dims);
        let mut rest = idx;
        for _ in 0..dims {
            n.push((rest % (max_coeff as u64 + 1)) as u32);
            rest /= max_coeff as u64 + 1;
        }
        let v = WeylVertex { n };
        if wk_member(&v.to_point(), k) {
            out.push(v);
        }
    }
    out.sort();
    out
}

/// Sample `count` frames over the given chamber point: omega_i =
/// theta_i T^{x_i} (1 + rho_i) with residues theta_i independent over F_q
/// within each congruence class and short random higher-order tails rho_i.
/// Every output is certified fundamental.
pub fn fiber_sample(
    ctx: &Ctx,
    x: &ApartmentPoint,
    count: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<ALatticeFrame>> {
    let r = x.rank();
    if !x.in_weyl_chamber() {
        return Err(Error::Usage("point is outside the Weyl chamber".into()));
    }
    if (ctx.params.m as usize) < r {
        return Err(Error::UnsupportedParams(format!(
            "need m >= r for independent residues (m = {}, r = {r})",
            ctx.params.m
        )));
    }
    let e = ctx.params.e;
    for xi in &x.x {
        if !(xi * Ratio::new(e, 1)).is_integer() {
            return Err(Error::UnsupportedParams(format!(
                "coordinate {xi} needs denominator dividing e = {e}"
            )));
        }
    }
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count {
        attempts += 1;
        if attempts > 200 * (count + 1) {
            return Err(Error::PrecisionExhausted(
                "fiber sampling failed to find fundamental frames".into(),
            ));
        }
        let mut omega = Vec::with_capacity(r);
        for i in 0..r {
            if i == r - 1 {
                omega.push(Puiseux::one(ctx));
                continue;
            }
            let exp = -(x.x[i] * Ratio::new(e, 1)).to_integer();
            let theta = random_nonzero(ctx, rng);
            let mut z = Puiseux::monomial(ctx, exp, theta);
            // short tail keeps downstream sums fast
            for _ in 0..rng.gen_range(0..=2) {
                let off = rng.gen_range(1..=4i64);
                let c = random_nonzero(ctx, rng);
                z = z.add(&Puiseux::monomial(ctx, exp + off, c));
            }
            omega.push(z);
        }
        let frame = ALatticeFrame::new(omega)?;
        let cert = is_fundamental(&frame)?;
        if cert.fundamental {
            out.push(frame);
        }
    }
    Ok(out)
}

fn random_nonzero(ctx: &Ctx, rng: &mut ChaCha8Rng) -> FqmEl {
    loop {
        let digits: Vec<u8> = (0..ctx.params.m)
            .map(|_| rng.gen_range(0..ctx.q()) as u8)
            .collect();
        let el = ctx.fq.from_digits(&digits).unwrap();
        if !el.is_zero() {
            return el;
        }
    }
}

/// One barycentric probe of the affineness identity.
#[derive(Clone, Debug)]
pub struct AffineSample {
    pub barycentric: Vec<Ratio<i64>>,
    pub point: ApartmentPoint,
    /// log f at the interpolated point.
    pub lhs: Ratio<i64>,
    /// barycentric combination of the vertex logs.
    pub rhs: Ratio<i64>,
    pub equal: bool,
}

#[derive(Clone, Debug)]
pub struct AffineReport {
    pub vertex_logs: Vec<Ratio<i64>>,
    pub samples: Vec<AffineSample>,
    pub all_equal: bool,
}

/// Check log f(sum t_i k_i) = sum t_i log f(k_i) for each barycentric
/// sample, where f is evaluated through `form` on fiber frames. The value
/// at every touched point is certified fiber-constant across
/// `fiber_count` samples first.
pub fn affine_check(
    ctx: &Ctx,
    form: &mut dyn FnMut(&ALatticeFrame) -> Result<Puiseux>,
    vertices: &[WeylVertex],
    samples: &[Vec<Ratio<i64>>],
    fiber_count: usize,
    rng: &mut ChaCha8Rng,
) -> Result<AffineReport> {
    let mut log_at = |x: &ApartmentPoint, rng: &mut ChaCha8Rng| -> Result<Ratio<i64>> {
        let frames = fiber_sample(ctx, x, fiber_count.max(1), rng)?;
        let mut common: Option<Ratio<i64>> = None;
        for f in &frames {
            let v = form(f)?;
            let l = v.logq()?;
            match common {
                None => common = Some(l),
                Some(c) if c == l => {}
                Some(c) => {
                    return Err(Error::FiberNotConstant(format!(
                        "log {l} != log {c} over the same point"
                    )))
                }
            }
        }
        Ok(common.unwrap())
    };
    let vertex_logs: Vec<Ratio<i64>> = vertices
        .iter()
        .map(|v| log_at(&v.to_point(), rng))
        .collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(samples.len());
    let mut all_equal = true;
    for t in samples {
        if t.len() != vertices.len() {
            return Err(Error::Usage(
                "barycentric tuple length must match vertex count".into(),
            ));
        }
        let sum: Ratio<i64> = t.iter().cloned().sum();
        if !sum.is_one() {
            return Err(Error::Usage("barycentric coordinates must sum to 1".into()));
        }
        let r = vertices[0].to_point().rank();
        let mut x = vec![Ratio::zero(); r];
        for (ti, v) in t.iter().zip(vertices.iter()) {
            for (c, vx) in x.iter_mut().zip(v.to_point().x.iter()) {
                *c += ti * vx;
            }
        }
        let point = ApartmentPoint::new(x)?;
        let lhs = log_at(&point, rng)?;
        let rhs: Ratio<i64> = t
            .iter()
            .zip(vertex_logs.iter())
            .map(|(ti, li)| ti * li)
            .sum();
        let equal = lhs == rhs;
        all_equal &= equal;
        out.push(AffineSample { barycentric: t.clone(), point, lhs, rhs, equal });
    }
    Ok(AffineReport { vertex_logs, samples: out, all_equal })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Context;
    use rand::SeedableRng;

    fn ctx(q: u64, m: u32, e: i64) -> Ctx {
        Context::new(q, m, e, 120).unwrap()
    }

    fn rat(n: i64, d: i64) -> Ratio<i64> {
        Ratio::new(n, d)
    }

    fn pt(v: Vec<Ratio<i64>>) -> ApartmentPoint {
        ApartmentPoint::new(v).unwrap()
    }

    #[test]
    fn building_map_basics() {
        let c = ctx(2, 2, 2);
        // omega = (wT, 1): x = (1, 0)
        let wt = Puiseux::monomial(&c, -c.params.e, c.fq.gen_w());
        let f = ALatticeFrame::new(vec![wt, Puiseux::one(&c)]).unwrap();
        let x = building_map(&f).unwrap();
        assert_eq!(x.x, vec![rat(1, 1), rat(0, 1)]);
        assert!(x.in_weyl_chamber());
        // omega = (u^{-1}, 1) with e = 2: x = (1/2, 0)
        let f = ALatticeFrame::new(vec![
            Puiseux::monomial(&c, -1, c.fq.one()),
            Puiseux::one(&c),
        ])
        .unwrap();
        let x = building_map(&f).unwrap();
        assert_eq!(x.x, vec![rat(1, 2), rat(0, 1)]);
        // basis of the degree-r constant field maps to the origin
        let w = Puiseux::monomial(&c, 0, c.fq.gen_w());
        let f = ALatticeFrame::new(vec![w, Puiseux::one(&c)]).unwrap();
        let x = building_map(&f).unwrap();
        assert_eq!(x.x, vec![rat(0, 1), rat(0, 1)]);
    }

    #[test]
    fn fundamental_detection() {
        let c = ctx(2, 2, 2);
        let one = Puiseux::one(&c);
        // (wT, 1) is fundamental
        let wt = Puiseux::monomial(&c, -c.params.e, c.fq.gen_w());
        let f = ALatticeFrame::new(vec![wt, one.clone()]).unwrap();
        assert!(is_fundamental(&f).unwrap().fundamental);
        // (T, 1) is K_oo-dependent (T = T*1), not a rank-2 frame
        let f = ALatticeFrame::new(vec![Puiseux::t_pow(&c, 1), one.clone()]).unwrap();
        assert!(!is_fundamental(&f).unwrap().fundamental);
        // (1, 1) is K_oo-dependent, not fundamental
        let f = ALatticeFrame::new(vec![one.clone(), one.clone()]).unwrap();
        assert!(!is_fundamental(&f).unwrap().fundamental);
        // residues w, 1 independent: a 1-inseparable fiber point
        let w = Puiseux::monomial(&c, 0, c.fq.gen_w());
        let f = ALatticeFrame::new(vec![w.add(&Puiseux::t_pow(&c, -1)), one.clone()]).unwrap();
        assert!(is_fundamental(&f).unwrap().fundamental);
        // residues 1, 1 dependent: the combination drops below log 0
        let bad = one.add(&Puiseux::t_pow(&c, -1).scale(c.fq.gen_w()));
        let f = ALatticeFrame::new(vec![bad, one.clone()]).unwrap();
        assert!(!is_fundamental(&f).unwrap().fundamental);
        // logs out of order
        let f = ALatticeFrame::new(vec![Puiseux::t_pow(&c, -1), one.clone()]).unwrap();
        assert!(!is_fundamental(&f).unwrap().fundamental);
    }

    #[test]
    fn insep_multiset_examples() {
        // x = 0, r = 3: (0,0,0,1,1,1,2,2,2)
        let x = pt(vec![rat(0, 1), rat(0, 1), rat(0, 1)]);
        assert_eq!(
            insep_multiset(&x, 9),
            vec![0, 0, 0, 1, 1, 1, 2, 2, 2]
                .into_iter()
                .map(|n| rat(n, 1))
                .collect::<Vec<_>>()
        );
        // x = (1,1,0): (0,1,1,1,2,2,2)
        let x = pt(vec![rat(1, 1), rat(1, 1), rat(0, 1)]);
        assert_eq!(
            insep_multiset(&x, 7),
            vec![0, 1, 1, 1, 2, 2, 2]
                .into_iter()
                .map(|n| rat(n, 1))
                .collect::<Vec<_>>()
        );
        // r = 1: (0,1,2,3,...)
        let x = pt(vec![rat(0, 1)]);
        assert_eq!(
            insep_multiset(&x, 4),
            vec![rat(0, 1), rat(1, 1), rat(2, 1), rat(3, 1)]
        );
    }

    #[test]
    fn wk_membership_examples() {
        // wall points are in W(1)
        let x = pt(vec![rat(2, 1), rat(0, 1), rat(0, 1)]);
        assert!(wk_member(&x, 1));
        // r = 3, x = 0: k = 2 yes, k = 3 no
        let x = pt(vec![rat(0, 1), rat(0, 1), rat(0, 1)]);
        assert!(wk_member(&x, 2));
        assert!(!wk_member(&x, 3));
        // r = 3, x = (1,0,0), k = 4
        let x = pt(vec![rat(1, 1), rat(0, 1), rat(0, 1)]);
        assert!(wk_member(&x, 4));
    }

    #[test]
    fn wk_vertex_atlases() {
        let names = |vs: &[WeylVertex]| -> Vec<Vec<u32>> {
            vs.iter().map(|v| v.n.clone()).collect()
        };
        // r = 2, k = 1: only the origin among vertices
        let vs = wk_vertices(2, 1, 5);
        assert_eq!(names(&vs), vec![vec![0]]);
        // r = 3, k = 2, box 3: 0 and k_2 + n k_1
        let vs = wk_vertices(3, 2, 3);
        let mut expect = vec![vec![0u32, 0]];
        for n in 0..=3u32 {
            expect.push(vec![n, 1]);
        }
        expect.sort();
        assert_eq!(names(&vs), expect);
        // r = 3, k = 3, box 2: k_2, 2k_2 + n k_1, n k_1 (n >= 1)
        let vs = wk_vertices(3, 3, 2);
        let mut expect = vec![vec![0u32, 1]];
        for n in 0..=2u32 {
            expect.push(vec![n, 2]);
        }
        for n in 1..=2u32 {
            expect.push(vec![n, 0]);
        }
        expect.sort();
        assert_eq!(names(&vs), expect);
        // r = 3, k = 4, box 2: 0, k_1, k_1+k_2+n k_1, 2k_2, 3k_2... (3k_2 has
        // coefficient 3 > box, so only n_2 <= 2 parts appear)
        let vs = wk_vertices(3, 4, 2);
        let mut expect: Vec<Vec<u32>> = vec![vec![0, 0], vec![1, 0], vec![0, 2]];
        for n in 0..=1u32 {
            expect.push(vec![1 + n, 1]);
        }
        expect.sort();
        assert_eq!(names(&vs), expect);
    }

    #[test]
    fn wk1_matches_wall_membership() {
        let mut rng = ChaCha8Rng::seed_from_u64(123);
        for _ in 0..100 {
            let den = [1i64, 2, 3][rng.gen_range(0..3)];
            let a = rat(rng.gen_range(0..6), den);
            let b = rat(rng.gen_range(0..6), den);
            let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
            let x = pt(vec![hi, lo, rat(0, 1)]);
            let on_wall = x.x[1] == x.x[2];
            assert_eq!(wk_member(&x, 1), on_wall, "x = {:?}", x.x);
        }
    }

    #[test]
    fn fiber_sampling_certifies() {
        let c = ctx(2, 2, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = pt(vec![rat(0, 1), rat(0, 1)]);
        let frames = fiber_sample(&c, &x, 4, &mut rng).unwrap();
        assert_eq!(frames.len(), 4);
        for f in &frames {
            assert!(is_fundamental(&f).unwrap().fundamental);
            assert_eq!(f.logs().unwrap(), vec![rat(0, 1), rat(0, 1)]);
        }
        // count = 0 gives an empty list
        assert!(fiber_sample(&c, &x, 0, &mut rng).unwrap().is_empty());
        // denominators must divide e
        let bad = pt(vec![rat(1, 3), rat(0, 1)]);
        assert!(fiber_sample(&c, &bad, 1, &mut rng).is_err());
        // m >= r enforced
        let c1 = ctx(2, 1, 2);
        let x2 = pt(vec![rat(1, 1), rat(0, 1)]);
        assert!(matches!(
            fiber_sample(&c1, &x2, 1, &mut rng),
            Err(Error::UnsupportedParams(_))
        ));
    }

    #[test]
    fn frame_reordering_maps_to_same_point() {
        // unimodularly changed bases give the same chamber point
        let c = ctx(3, 3, 2);
        let t = Puiseux::t_pow(&c, 1);
        let w = c.fq.gen_w();
        let w2 = c.fq.mul(w, w);
        let om1 = t.mul(&t).scale(w2); // w^2 T^2
        let om2 = t.scale(w); // w T
        let f = ALatticeFrame::new(vec![om1.clone(), om2.clone(), Puiseux::one(&c)]).unwrap();
        let x = building_map(&f).unwrap();
        // unimodular change omega_1 + T*omega_2 (same log as omega_1)
        let f2 = ALatticeFrame::new(vec![
            om1.add(&t.mul(&om2)),
            om2.clone(),
            Puiseux::one(&c),
        ])
        .unwrap();
        let x2 = building_map(&f2).unwrap();
        assert_eq!(x, x2);
    }
}
