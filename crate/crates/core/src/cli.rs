//! Command-line front end: exact computations and the verification harness.
//!
//! Output is JSON by default (CSV for the tabular reports); every run with
//! the same arguments and seed produces byte-identical output. Exit codes:
//! 0 all good, 1 computational error or failed check, 2 usage error.

use std::io::Write;

use clap::{Args, Parser, Subcommand};
use num::rational::Ratio;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::building::{
    building_map, fiber_sample, insep_multiset, is_fundamental, wk_vertices, ApartmentPoint,
};
use crate::error::{Error, Result};
use crate::forms::{alpha_series, convergence_report, eisenstein_direct, StabilizePolicy};
use crate::lattice::{smb_finite, ALatticeFrame};
use crate::params::{Context, Ctx};
use crate::poly::{carlitz_coeffs, PolyA};
use crate::series::{parse_series, Prec, Puiseux};
use crate::tau::{newton_polygon, np_to_spectrum};
use crate::verify::{run_all, run_suite, SuiteReport, VerifyConfig, SUITES};

#[derive(Parser)]
#[command(
    name = "dmf",
    about = "Exact arithmetic for rank-r Drinfeld modular forms over Fq[T]",
    version
)]
struct Cli {
    #[command(flatten)]
    ground: GroundArgs,
    /// Output format: json or csv (csv only for tabular reports)
    #[arg(long, global = true, default_value = "json")]
    format: String,
    /// Write output to this file instead of stdout
    #[arg(long, global = true)]
    out: Option<String>,
    /// Seed for all randomized constructions
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct GroundArgs {
    /// Field size q (prime power, 2..9)
    #[arg(long, global = true, default_value_t = 2)]
    q: u64,
    /// Residue extension degree m (coefficients live in F_{q^m})
    #[arg(long, global = true, default_value_t = 2)]
    m: u32,
    /// Ramification index e (the series variable is u = T^{-1/e})
    #[arg(long, global = true, default_value_t = 2)]
    e: i64,
    /// Working precision in u-adic units
    #[arg(long = "prec", global = true, default_value_t = 240)]
    prec: i64,
}

#[derive(Subcommand)]
enum Cmd {
    /// Coefficients of the Carlitz operator polynomial of a
    Carlitz {
        /// Polynomial in T, e.g. "T^2+T+1"
        #[arg(long)]
        a: String,
    },
    /// Profile of alpha, beta (Eisenstein) and g coefficients at a frame
    Forms {
        /// Comma-separated frame coordinates, last must be 1
        #[arg(long)]
        omega: String,
        #[arg(long, default_value_t = 4)]
        kmax: usize,
    },
    /// Eisenstein series E_k at a frame by direct summation
    Eisenstein {
        #[arg(long)]
        omega: String,
        #[arg(long)]
        k: u32,
        /// Truncation degree of the polynomial tuples
        #[arg(long, default_value_t = 3)]
        d: u32,
    },
    /// Coefficients of the operator polynomial of a at a frame
    Coeffs {
        #[arg(long)]
        omega: String,
        #[arg(long)]
        a: String,
    },
    /// First entries of the spectrum multiset over a chamber point
    Spectrum {
        #[arg(long)]
        r: usize,
        /// Comma-separated rationals like "1,1/2,0"
        #[arg(long)]
        x: String,
        #[arg(long, default_value_t = 8)]
        len: usize,
    },
    /// Newton polygon and spectrum of the exponential of a finite lattice
    Np {
        /// Semicolon-separated generators, e.g. "1;T;w*u^2"
        #[arg(long)]
        gens: String,
    },
    /// Vertices of the inseparability complex W(k) in a coefficient box
    Wk {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        k: usize,
        #[arg(long = "box", default_value_t = 5)]
        box_: u32,
    },
    /// Building-map image of a fundamental frame
    Map {
        #[arg(long)]
        omega: String,
    },
    /// Sample fundamental frames over a chamber point
    Fiber {
        #[arg(long)]
        x: String,
        #[arg(long, default_value_t = 3)]
        count: usize,
    },
    /// Convergence table of normalized coefficient forms
    Converge {
        #[arg(long)]
        omega: String,
        #[arg(long)]
        k: usize,
        /// Comma-separated degrees for a = T^d
        #[arg(long)]
        degrees: String,
    },
    /// Run a verification suite (or "all")
    Verify {
        /// Suite name or "all"
        suite: String,
    },
}

/// Entry point used by the binary; maps errors to exit codes.
pub fn main_entry() {
    let args = merge_config_env();
    let cli = Cli::parse_from(args);
    match run(&cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            let code = match e {
                Error::Usage(_) => 2,
                _ => 1,
            };
            let obj = json!({"error": {"kind": error_kind(&e), "message": e.to_string()}});
            println!("{}", serde_json::to_string_pretty(&obj).unwrap());
            std::process::exit(code);
        }
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::UnsupportedParams(_) => "UnsupportedParams",
        Error::ZeroInput => "ZeroInput",
        Error::IndeterminateValuation => "IndeterminateValuation",
        Error::DivisionByZero => "DivisionByZero",
        Error::NotNormalized => "NotNormalized",
        Error::MalformedPolygon(_) => "MalformedPolygon",
        Error::DependentGenerators => "DependentGenerators",
        Error::PrecisionExhausted(_) => "PrecisionExhausted",
        Error::TruncationNotStabilized(_) => "TruncationNotStabilized",
        Error::IllDefinedExponent(_) => "IllDefinedExponent",
        Error::ZeroCarlitzCoefficient(_) => "ZeroCarlitzCoefficient",
        Error::NotInFk(_) => "NotInFk",
        Error::NotInFundamentalDomain(_) => "NotInFundamentalDomain",
        Error::FiberNotConstant(_) => "FiberNotConstant",
        Error::Parse(_) => "Parse",
        Error::Usage(_) => "Usage",
    }
}

/// Prepend defaults from the config file named by DMF_CONFIG, if present.
/// The file is a JSON object of long-flag names to values.
fn merge_config_env() -> Vec<String> {
    let mut args: Vec<String> = std::env::args().collect();
    let Ok(path) = std::env::var("DMF_CONFIG") else {
        return args;
    };
    let Ok(text) = std::fs::read_to_string(&path) else {
        return args;
    };
    let Ok(Value::Object(map)) = serde_json::from_str::<Value>(&text) else {
        return args;
    };
    let mut defaults = Vec::new();
    for (k, v) in map {
        let rendered = match v {
            Value::String(s) => s,
            other => other.to_string(),
        };
        // only prepend when the flag is not given explicitly
        if !args.iter().any(|a| a == &format!("--{k}") || a.starts_with(&format!("--{k}="))) {
            defaults.push(format!("--{k}={rendered}"));
        }
    }
    if args.len() > 1 {
        let rest = args.split_off(2.min(args.len()));
        args.extend(defaults);
        args.extend(rest);
    }
    args
}

fn parse_rat(s: &str) -> Result<Ratio<i64>> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| Error::Usage(format!("bad rational '{s}'")))?;
        let d: i64 = d.trim().parse().map_err(|_| Error::Usage(format!("bad rational '{s}'")))?;
        if d == 0 {
            return Err(Error::Usage("zero denominator".into()));
        }
        Ok(Ratio::new(n, d))
    } else {
        let n: i64 = s.parse().map_err(|_| Error::Usage(format!("bad rational '{s}'")))?;
        Ok(Ratio::new(n, 1))
    }
}

fn parse_frame(ctx: &Ctx, spec: &str) -> Result<ALatticeFrame> {
    let omega = spec
        .split(',')
        .map(|s| parse_series(ctx, s))
        .collect::<Result<Vec<_>>>()?;
    ALatticeFrame::new(omega)
}

fn rat_str(r: &Ratio<i64>) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn series_json(z: &Puiseux) -> Value {
    serde_json::to_value(z.to_json()).unwrap()
}

fn run(cli: &Cli) -> Result<i32> {
    let ctx = Context::new(cli.ground.q, cli.ground.m, cli.ground.e, cli.ground.prec)?;
    let header = json!({
        "q": cli.ground.q, "m": cli.ground.m, "e": cli.ground.e,
        "prec": cli.ground.prec, "seed": cli.seed,
    });
    let (payload, exit, csv): (Value, i32, Option<String>) = match &cli.cmd {
        Cmd::Carlitz { a } => {
            let a = poly_from_expr(&ctx, a)?;
            let cs = carlitz_coeffs(&a)?;
            let coeffs: Vec<String> = cs.iter().map(|c| c.to_coeff_string()).collect();
            let display: Vec<String> = cs.iter().map(|c| c.display()).collect();
            (json!({"a": a.display(), "coeffs": coeffs, "display": display}), 0, None)
        }
        Cmd::Forms { omega, kmax } => {
            let frame = parse_frame(&ctx, omega)?;
            let profile = alpha_series(&frame, *kmax, StabilizePolicy::default())?;
            let logs = |v: &[Puiseux]| -> Vec<Value> {
                v.iter()
                    .map(|z| match z.logq() {
                        Ok(l) => json!({"log": rat_str(&l), "value": series_json(z)}),
                        Err(_) => json!({"log": Value::Null, "value": series_json(z)}),
                    })
                    .collect()
            };
            (
                json!({
                    "d_used": profile.d_used,
                    "alpha": logs(&profile.alpha),
                    "beta": logs(&profile.beta),
                    "g": logs(&profile.g),
                }),
                0,
                None,
            )
        }
        Cmd::Eisenstein { omega, k, d } => {
            let frame = parse_frame(&ctx, omega)?;
            let v = eisenstein_direct(&frame, *k, *d)?;
            (
                json!({
                    "k": k, "d": d,
                    "log": v.logq().map(|l| rat_str(&l)).ok(),
                    "value": series_json(&v),
                }),
                0,
                None,
            )
        }
        Cmd::Coeffs { omega, a } => {
            let frame = parse_frame(&ctx, omega)?;
            let a = poly_from_expr(&ctx, a)?;
            let profile = alpha_series(&frame, frame.rank(), StabilizePolicy::default())?;
            let ell = crate::forms::coefficient_forms(&profile, &a)?;
            (
                json!({
                    "a": a.display(),
                    "coeffs": ell.iter().map(series_json).collect::<Vec<_>>(),
                }),
                0,
                None,
            )
        }
        Cmd::Spectrum { r, x, len } => {
            let point = parse_point(x, *r)?;
            let m = insep_multiset(&point, *len);
            (
                json!({"x": point.as_strings(), "multiset": m.iter().map(rat_str).collect::<Vec<_>>()}),
                0,
                None,
            )
        }
        Cmd::Np { gens } => {
            let gens = gens
                .split(';')
                .map(|s| parse_series(&ctx, s))
                .collect::<Result<Vec<_>>>()?;
            let v = smb_finite(&gens)?;
            let e = crate::lattice::exp_finite(&v)?;
            let np = newton_polygon(&e)?;
            let spec = np_to_spectrum(&np, &ctx)?;
            (
                json!({
                    "spectrum": spec.as_strings(),
                    "vertices": np.vertices.iter()
                        .map(|(x, y)| json!([x.to_string(), rat_str(y)]))
                        .collect::<Vec<_>>(),
                    "segments": np.segments().iter()
                        .map(|s| json!({"length": s.length.to_string(), "slope": rat_str(&s.slope)}))
                        .collect::<Vec<_>>(),
                }),
                0,
                None,
            )
        }
        Cmd::Wk { r, k, box_ } => {
            let vs = wk_vertices(*r, *k, *box_);
            let rows: Vec<Vec<u32>> = vs.iter().map(|v| v.n.clone()).collect();
            let csv = {
                let mut s = (1..*r).map(|i| format!("n{i}")).collect::<Vec<_>>().join(",");
                s.push('\n');
                for row in &rows {
                    s.push_str(
                        &row.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(","),
                    );
                    s.push('\n');
                }
                s
            };
            (json!({"r": r, "k": k, "box": box_, "vertices": rows}), 0, Some(csv))
        }
        Cmd::Map { omega } => {
            let frame = parse_frame(&ctx, omega)?;
            let x = building_map(&frame)?;
            let cert = is_fundamental(&frame)?;
            (
                json!({"x": x.as_strings(), "fundamental": cert.fundamental}),
                0,
                None,
            )
        }
        Cmd::Fiber { x, count } => {
            let parts: Vec<Ratio<i64>> = x
                .split(',')
                .map(parse_rat)
                .collect::<Result<Vec<_>>>()?;
            let point = ApartmentPoint::new(parts)?;
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            let frames = fiber_sample(&ctx, &point, *count, &mut rng)?;
            (
                json!({
                    "x": point.as_strings(),
                    "frames": frames.iter()
                        .map(|f| f.omega.iter().map(series_json).collect::<Vec<_>>())
                        .collect::<Vec<_>>(),
                }),
                0,
                None,
            )
        }
        Cmd::Converge { omega, k, degrees } => {
            let frame = parse_frame(&ctx, omega)?;
            let degrees: Vec<u32> = degrees
                .split(',')
                .map(|s| s.trim().parse().map_err(|_| Error::Usage(format!("bad degree '{s}'"))))
                .collect::<Result<Vec<_>>>()?;
            let profile = alpha_series(&frame, (*k).max(frame.rank()), StabilizePolicy::default())?;
            let rows = convergence_report(&profile, *k, &degrees)?;
            let csv = {
                let mut s = String::from("d,v_diff,v_carlitz_ratio\n");
                for row in &rows {
                    s.push_str(&format!(
                        "{},{},{}\n",
                        row.d,
                        row.v_diff.map(|v| rat_str(&v)).unwrap_or_else(|| "below_floor".into()),
                        row.v_carlitz_ratio.map(|v| rat_str(&v)).unwrap_or_else(|| "inf".into()),
                    ));
                }
                s
            };
            (
                json!({
                    "k": k,
                    "rows": rows.iter().map(|row| json!({
                        "d": row.d,
                        "v_diff": row.v_diff.map(|v| rat_str(&v)),
                        "v_carlitz_ratio": row.v_carlitz_ratio.map(|v| rat_str(&v)),
                    })).collect::<Vec<_>>(),
                }),
                0,
                Some(csv),
            )
        }
        Cmd::Verify { suite } => {
            let cfg = VerifyConfig { seed: cli.seed };
            let reports: Vec<SuiteReport> = if suite == "all" {
                run_all(cfg)?
            } else {
                vec![run_suite(suite, cfg)?]
            };
            let all_pass = reports.iter().all(|r| r.passed);
            for r in &reports {
                eprint!("{}", r.render());
            }
            (
                json!({
                    "suites": reports,
                    "passed": all_pass,
                    "available": SUITES,
                }),
                if all_pass { 0 } else { 1 },
                None,
            )
        }
    };
    let text = if cli.format == "csv" {
        match csv {
            Some(c) => c,
            None => {
                return Err(Error::Usage(
                    "csv output is only available for tabular commands (wk, converge)".into(),
                ))
            }
        }
    } else if cli.format == "json" {
        let full = json!({"params": header, "result": payload});
        serde_json::to_string_pretty(&full).unwrap() + "\n"
    } else {
        return Err(Error::Usage(format!("unknown format '{}'", cli.format)));
    };
    match &cli.out {
        Some(path) => {
            let mut f = std::fs::File::create(path)
                .map_err(|e| Error::Usage(format!("cannot open {path}: {e}")))?;
            f.write_all(text.as_bytes())
                .map_err(|e| Error::Usage(format!("write failed: {e}")))?;
        }
        None => print!("{text}"),
    }
    Ok(exit)
}

fn parse_point(x: &str, r: usize) -> Result<ApartmentPoint> {
    let parts: Vec<Ratio<i64>> = x.split(',').map(parse_rat).collect::<Result<Vec<_>>>()?;
    if parts.len() != r {
        return Err(Error::Usage(format!(
            "expected {r} coordinates, got {}",
            parts.len()
        )));
    }
    ApartmentPoint::new(parts)
}

/// Parse a polynomial in T through the series grammar: the expression must
/// be an exact polynomial in T with coefficients in F_q.
fn poly_from_expr(ctx: &Ctx, expr: &str) -> Result<PolyA> {
    let z = parse_series(ctx, expr)?;
    if z.prec() != Prec::Exact {
        return Err(Error::Parse("polynomial input must be exact".into()));
    }
    let e = ctx.params.e;
    let mut coeffs: Vec<crate::fq::FqmEl> = Vec::new();
    for &(exp, c) in z.terms() {
        if exp > 0 || exp % e != 0 {
            return Err(Error::Parse(format!(
                "term u^{exp} is not a power of T"
            )));
        }
        let deg = (-exp / e) as usize;
        if !ctx.fq.in_fq(c) {
            return Err(Error::Parse("coefficient is not in the base field F_q".into()));
        }
        if coeffs.len() <= deg {
            coeffs.resize(deg + 1, ctx.fq.zero());
        }
        coeffs[deg] = c;
    }
    Ok(PolyA::from_coeffs(ctx, coeffs))
}
