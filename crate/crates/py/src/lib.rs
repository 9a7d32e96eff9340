//! Python bindings: exact series arithmetic, Carlitz data, form profiles,
//! building-map combinatorics and the verification harness.
//!
//! The module mirrors the `dmf` CLI: construct a `Context` fixing
//! (q, m, e, precision), then compute. All outputs are exact: field
//! elements as digit strings, valuations as fraction strings, structured
//! results as JSON.

use num::rational::Ratio;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use dmf_core::building as bld;
use dmf_core::forms;
use dmf_core::lattice;
use dmf_core::poly::{bracket, carlitz_coeffs, d_factor, PolyA};
use dmf_core::series::{parse_series, Puiseux};
use dmf_core::verify;
use dmf_core::{Context as CoreContext, Ctx};

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_rat(s: &str) -> PyResult<Ratio<i64>> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: i64 = n.parse().map_err(|_| err(format!("bad rational '{s}'")))?;
    let d: i64 = d.parse().map_err(|_| err(format!("bad rational '{s}'")))?;
    if d == 0 {
        return Err(err("zero denominator"));
    }
    Ok(Ratio::new(n, d))
}

fn rat_str(r: &Ratio<i64>) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// A truncated Puiseux series value bound to its context.
#[pyclass(from_py_object)]
#[derive(Clone)]
struct Series {
    inner: Puiseux,
}

#[pymethods]
impl Series {
    fn __repr__(&self) -> String {
        self.inner.display()
    }

    fn __str__(&self) -> String {
        self.inner.display()
    }

    fn __add__(&self, other: &Series) -> Series {
        Series { inner: self.inner.add(&other.inner) }
    }

    fn __sub__(&self, other: &Series) -> Series {
        Series { inner: self.inner.sub(&other.inner) }
    }

    fn __mul__(&self, other: &Series) -> Series {
        Series { inner: self.inner.mul(&other.inner) }
    }

    fn __truediv__(&self, other: &Series) -> PyResult<Series> {
        Ok(Series { inner: self.inner.div(&other.inner).map_err(err)? })
    }

    fn __eq__(&self, other: &Series) -> bool {
        self.inner == other.inner
    }

    /// log_q of the absolute value, as an exact fraction string.
    fn log(&self) -> PyResult<String> {
        Ok(rat_str(&self.inner.logq().map_err(err)?))
    }

    fn q_power(&self, j: u32) -> Series {
        Series { inner: self.inner.q_power(j) }
    }

    fn inverse(&self) -> PyResult<Series> {
        Ok(Series { inner: self.inner.inv().map_err(err)? })
    }

    fn is_zero(&self) -> bool {
        self.inner.is_zero_to_prec()
    }

    /// JSON form {e, m, prec, terms: [[exp, digits], ...]}.
    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner.to_json()).unwrap()
    }
}

/// Computation context: the field F_{q^m}, the ramification index e and
/// the working precision in u-adic units.
#[pyclass]
struct Context {
    ctx: Ctx,
}

#[pymethods]
impl Context {
    #[new]
    #[pyo3(signature = (q, m=2, e=2, prec=240))]
    fn new(q: u64, m: u32, e: i64, prec: i64) -> PyResult<Self> {
        Ok(Context { ctx: CoreContext::new(q, m, e, prec).map_err(err)? })
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.ctx)
    }

    /// Parse a series literal: tokens T, u, w, integers, + - * / ^.
    fn parse(&self, expr: &str) -> PyResult<Series> {
        Ok(Series { inner: parse_series(&self.ctx, expr).map_err(err)? })
    }

    /// Coefficients of the Carlitz operator polynomial of a, as
    /// comma-separated coefficient strings over F_q.
    fn carlitz(&self, a: &str) -> PyResult<Vec<String>> {
        let a = self.poly(a)?;
        Ok(carlitz_coeffs(&a)
            .map_err(err)?
            .iter()
            .map(|c| c.to_coeff_string())
            .collect())
    }

    /// a^{q^k} - a as a coefficient string.
    fn bracket(&self, a: &str, k: u32) -> PyResult<String> {
        Ok(bracket(&self.poly(a)?, k).to_coeff_string())
    }

    /// The product D_k of twisted brackets, as a coefficient string.
    fn d_factor(&self, k: u32) -> String {
        d_factor(&self.ctx, k).to_coeff_string()
    }

    /// First entries of the sorted multiset {x_i + j} over a chamber point.
    fn insep_multiset(&self, x: Vec<String>, len: usize) -> PyResult<Vec<String>> {
        let pt = self.point(&x)?;
        Ok(bld::insep_multiset(&pt, len).iter().map(rat_str).collect())
    }

    /// Whether the point lies in W(k).
    fn wk_member(&self, x: Vec<String>, k: usize) -> PyResult<bool> {
        Ok(bld::wk_member(&self.point(&x)?, k))
    }

    /// The building-map image of a fundamental frame.
    fn building_map(&self, omega: Vec<String>) -> PyResult<Vec<String>> {
        let frame = self.frame(&omega)?;
        let x = bld::building_map(&frame).map_err(err)?;
        Ok(x.as_strings())
    }

    /// Fundamental-domain decision with its reason.
    fn is_fundamental(&self, omega: Vec<String>) -> PyResult<(bool, String)> {
        let frame = self.frame(&omega)?;
        let cert = bld::is_fundamental(&frame).map_err(err)?;
        Ok((cert.fundamental, cert.reason))
    }

    /// Seeded fundamental frames over a chamber point.
    #[pyo3(signature = (x, count, seed=1))]
    fn fiber_sample(&self, x: Vec<String>, count: usize, seed: u64) -> PyResult<Vec<Vec<Series>>> {
        let pt = self.point(&x)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let frames = bld::fiber_sample(&self.ctx, &pt, count, &mut rng).map_err(err)?;
        Ok(frames
            .into_iter()
            .map(|f| f.omega.into_iter().map(|inner| Series { inner }).collect())
            .collect())
    }

    /// Profile of alpha, beta and g values at a frame, as JSON.
    #[pyo3(signature = (omega, kmax=4))]
    fn forms(&self, omega: Vec<String>, kmax: usize) -> PyResult<String> {
        let frame = self.frame(&omega)?;
        let profile =
            forms::alpha_series(&frame, kmax, forms::StabilizePolicy::default()).map_err(err)?;
        let entry = |v: &[Puiseux]| -> Vec<serde_json::Value> {
            v.iter()
                .map(|z| {
                    serde_json::json!({
                        "log": z.logq().map(|l| rat_str(&l)).ok(),
                        "value": z.to_json(),
                    })
                })
                .collect()
        };
        Ok(serde_json::json!({
            "d_used": profile.d_used,
            "alpha": entry(&profile.alpha),
            "beta": entry(&profile.beta),
            "g": entry(&profile.g),
        })
        .to_string())
    }

    /// Eisenstein series by direct summation at truncation degree d.
    #[pyo3(signature = (omega, k, d=3))]
    fn eisenstein(&self, omega: Vec<String>, k: u32, d: u32) -> PyResult<Series> {
        let frame = self.frame(&omega)?;
        Ok(Series { inner: forms::eisenstein_direct(&frame, k, d).map_err(err)? })
    }

    /// Spectrum and Newton polygon of the exponential of the lattice
    /// spanned by the generators, as JSON.
    fn newton_polygon(&self, gens: Vec<String>) -> PyResult<String> {
        let gens = gens
            .iter()
            .map(|g| parse_series(&self.ctx, g))
            .collect::<Result<Vec<_>, _>>()
            .map_err(err)?;
        let v = lattice::smb_finite(&gens).map_err(err)?;
        let e = lattice::exp_finite(&v).map_err(err)?;
        let np = dmf_core::tau::newton_polygon(&e).map_err(err)?;
        let spec = dmf_core::tau::np_to_spectrum(&np, &self.ctx).map_err(err)?;
        Ok(serde_json::json!({
            "spectrum": spec.as_strings(),
            "vertices": np.vertices.iter()
                .map(|(x, y)| serde_json::json!([x.to_string(), rat_str(y)]))
                .collect::<Vec<_>>(),
        })
        .to_string())
    }

    /// Run a verification suite; returns (passed, report_json).
    #[pyo3(signature = (suite, seed=1))]
    fn verify(&self, suite: &str, seed: u64) -> PyResult<(bool, String)> {
        let rep = verify::run_suite(suite, verify::VerifyConfig { seed }).map_err(err)?;
        Ok((rep.passed, serde_json::to_string(&rep).unwrap()))
    }
}

impl Context {
    fn poly(&self, expr: &str) -> PyResult<PolyA> {
        let z = parse_series(&self.ctx, expr).map_err(err)?;
        let e = self.ctx.params.e;
        let mut coeffs = Vec::new();
        for &(exp, c) in z.terms() {
            if exp > 0 || exp % e != 0 {
                return Err(err(format!("term u^{exp} is not a power of T")));
            }
            let deg = (-exp / e) as usize;
            if coeffs.len() <= deg {
                coeffs.resize(deg + 1, self.ctx.fq.zero());
            }
            coeffs[deg] = c;
        }
        Ok(PolyA::from_coeffs(&self.ctx, coeffs))
    }

    fn point(&self, x: &[String]) -> PyResult<bld::ApartmentPoint> {
        let coords = x.iter().map(|s| parse_rat(s)).collect::<PyResult<Vec<_>>>()?;
        bld::ApartmentPoint::new(coords).map_err(err)
    }

    fn frame(&self, omega: &[String]) -> PyResult<lattice::ALatticeFrame> {
        let coords = omega
            .iter()
            .map(|s| parse_series(&self.ctx, s))
            .collect::<Result<Vec<_>, _>>()
            .map_err(err)?;
        lattice::ALatticeFrame::new(coords).map_err(err)
    }
}

/// Vertices of W(k) in the coefficient box, rank r.
#[pyfunction]
fn wk_vertices(r: usize, k: usize, max_coeff: u32) -> Vec<Vec<u32>> {
    bld::wk_vertices(r, k, max_coeff)
        .into_iter()
        .map(|v| v.n)
        .collect()
}

/// Names of the available verification suites.
#[pyfunction]
fn suites() -> Vec<String> {
    verify::SUITES.iter().map(|s| s.to_string()).collect()
}

#[pymodule]
fn dmf(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Context>()?;
    m.add_class::<Series>()?;
    m.add_function(wrap_pyfunction!(wk_vertices, m)?)?;
    m.add_function(wrap_pyfunction!(suites, m)?)?;
    Ok(())
}
