//! `rsym` command line: JSON in, JSON out.

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::ToPrimitive;
use rsym::analytic::{cycle_table, verify_cocycle, verify_integral_psi, DEFAULT_NODES};
use rsym::contfrac::{cf_of_real, conjugate_expansion, hyperbolic_to_word, CFExpansion};
use rsym::modular_group::{classify, normalize_hyperbolic, Mat2};
use rsym::qforms::{enumerate_straddling, filter_straddle_point, reduce_cycle, BQF};
use rsym::symbols_classical::{classical_report, ClassicalMethod};
use rsym::symbols_hyperbolic::{
    gamma_class, geodesics_coincide, intersection_count_oracle, phi_hyp_forms, psi_hyp_first, psi_hyp_second,
};
use rsym::{Error, Real};
use serde_json::{json, Value};
use std::process::ExitCode;
use std::time::Instant;

const SCHEMA: u32 = 1;

#[derive(Parser)]
#[command(name = "rsym", version, about = "Classical and hyperbolic Dedekind and Rademacher symbols")]
struct Cli {
    /// Print a readable table instead of JSON.
    #[arg(long, global = true)]
    pretty: bool,
    /// Worker threads for data-parallel steps. Output does not depend on it.
    #[arg(long, global = true, env = "RSYM_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Dedekind symbol Phi and Rademacher symbol Psi of a matrix.
    Classical {
        #[arg(long, allow_hyphen_values = true)]
        matrix: String,
        #[arg(long, value_enum, default_value = "formula")]
        method: ClassicalArg,
    },
    /// Continued fraction of a rational "p/q" or quadratic irrational "(p+q*sqrt(d))/r".
    Cf {
        #[arg(long, allow_hyphen_values = true)]
        value: String,
    },
    /// Expansion of the Galois conjugate of "pre;period".
    Conj {
        #[arg(long, allow_hyphen_values = true)]
        cf: String,
    },
    /// Reduced cycle of a form, optionally the class forms straddling a rational.
    Forms {
        #[arg(long, allow_hyphen_values = true)]
        class: String,
        #[arg(long, allow_hyphen_values = true)]
        straddle: Option<String>,
        /// Keep only forms whose roots also enclose this point.
        #[arg(long, allow_hyphen_values = true)]
        filter: Option<String>,
    },
    /// Hyperbolic Dedekind symbol.
    HypPhi(Pair),
    /// Hyperbolic Rademacher symbol.
    HypPsi {
        #[command(flatten)]
        pair: Pair,
        #[arg(long, value_enum, default_value = "first")]
        method: HypArg,
        /// Search depth for the oracle.
        #[arg(long, default_value_t = 8)]
        depth: usize,
    },
    /// Floating point corroboration.
    #[command(subcommand)]
    Analytic(AnalyticCmd),
    /// Fixed regression cases. Exit code 1 on any mismatch.
    Selftest,
}

#[derive(Args)]
struct Pair {
    #[arg(long, allow_hyphen_values = true)]
    gamma: String,
    #[arg(long, allow_hyphen_values = true)]
    sigma: String,
}

#[derive(Subcommand)]
enum AnalyticCmd {
    /// Cycle integrals of j_m along the geodesic of gamma.
    Val {
        #[arg(long, allow_hyphen_values = true)]
        gamma: String,
        #[arg(long, default_value_t = 10)]
        max_m: usize,
        #[arg(long, default_value_t = DEFAULT_NODES)]
        nodes: usize,
        /// Print the table as CSV.
        #[arg(long)]
        csv: bool,
    },
    /// Compare both sides of the transformation law of F_gamma.
    VerifyCocycle {
        #[command(flatten)]
        pair: Pair,
        /// Point "x,y" meaning x + iy.
        #[arg(long, allow_hyphen_values = true, default_value = "-0.5,1.0")]
        z: String,
        #[arg(long, default_value_t = 200)]
        truncation: usize,
    },
    /// Partial values of the integral expression for Psi.
    VerifyIntegral {
        #[command(flatten)]
        pair: Pair,
        #[arg(long, default_value_t = 4)]
        n_max: usize,
        #[arg(long, default_value_t = 200)]
        truncation: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ClassicalArg {
    Formula,
    Cf,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum HypArg {
    First,
    Second,
    Oracle,
    All,
}

type Out = Result<Value, Error>;

fn matrix(s: &str) -> Result<Mat2, Error> {
    s.parse()
}

fn sorted_strings<T: ToString>(v: &[T]) -> Vec<String> {
    let mut out: Vec<String> = v.iter().map(ToString::to_string).collect();
    out.sort();
    out
}

/// Integer lists as JSON numbers rather than the digit layout of `BigInt`.
fn ints(v: &[BigInt]) -> Value {
    Value::Array(
        v.iter()
            .map(|x| x.to_i64().map(|n| json!(n)).unwrap_or_else(|| json!(x.to_string())))
            .collect(),
    )
}

fn result(command: &str, inputs: Value, value: Value, witnesses: Value, meta: Value) -> Value {
    let mut meta = meta;
    meta["version"] = json!(env!("CARGO_PKG_VERSION"));
    meta["schema"] = json!(SCHEMA);
    json!({ "command": command, "inputs": inputs, "value": value, "witnesses": witnesses, "meta": meta })
}

fn classical(m: &str, method: ClassicalArg) -> Out {
    let g = matrix(m)?;
    let method = match method {
        ClassicalArg::Formula => ClassicalMethod::DedekindFormula,
        ClassicalArg::Cf => ClassicalMethod::CFWord,
    };
    let r = classical_report(&g, method)?;
    Ok(result(
        "classical",
        json!({ "matrix": g, "method": method }),
        json!({ "phi": r.phi, "psi": r.psi }),
        Value::Null,
        json!({ "class": classify(&g) }),
    ))
}

fn cf(v: &str) -> Out {
    let x: Real = v.parse()?;
    let e = cf_of_real(&x);
    Ok(result(
        "cf",
        json!({ "value": x }),
        json!(e.to_string()),
        json!({ "preperiod": ints(&e.preperiod), "period": ints(&e.period) }),
        json!({}),
    ))
}

fn conj(s: &str) -> Out {
    let e: CFExpansion = s.parse()?;
    let c = conjugate_expansion(&e)?;
    Ok(result(
        "conj",
        json!({ "cf": e.to_string() }),
        json!(c.to_string()),
        json!({ "value": c.value() }),
        json!({}),
    ))
}

fn forms(class: &str, straddle: Option<&str>, filter: Option<&str>) -> Out {
    let q: BQF = class.parse()?;
    let cls = reduce_cycle(&q);
    let mut witnesses = json!({ "cycle": cls.cycle() });
    let mut inputs = json!({ "class": q });
    let value = match straddle {
        None => json!(cls.cycle().len()),
        Some(x) => {
            let x: Real = x.parse()?;
            let r = x.as_rational().cloned().ok_or_else(|| Error::Parse("straddle point must be rational".into()))?;
            inputs["straddle"] = json!(x);
            let mut list = enumerate_straddling(&cls, &r);
            if let Some(p) = filter {
                let p: Real = p.parse()?;
                inputs["filter"] = json!(p);
                list = filter_straddle_point(&list, &p);
            }
            witnesses["straddling"] = json!(sorted_strings(&list));
            json!(list.len())
        }
    };
    Ok(result("forms", inputs, value, witnesses, json!({ "discriminant": cls.disc().to_string() })))
}

fn hyp_phi(p: &Pair) -> Out {
    let (g, s) = (matrix(&p.gamma)?, matrix(&p.sigma)?);
    let cls = gamma_class(&g)?;
    let (phi, list) = phi_hyp_forms(&cls, &s);
    Ok(result(
        "hyp-phi",
        json!({ "gamma": g, "sigma": s }),
        json!(phi),
        json!({ "straddling": sorted_strings(&list) }),
        json!({}),
    ))
}

fn hyp_psi(p: &Pair, method: HypArg, depth: usize) -> Out {
    let (g, s) = (matrix(&p.gamma)?, matrix(&p.sigma)?);
    gamma_class(&g)?;
    let (sn, _) = normalize_hyperbolic(&s).map_err(|_| Error::SigmaNotHyperbolic)?;
    let mut values = serde_json::Map::new();
    let mut witnesses = serde_json::Map::new();
    let want = |m: HypArg| method == m || method == HypArg::All;
    if want(HypArg::First) {
        let r = psi_hyp_first(&g, &s)?;
        values.insert("first".into(), json!(r.psi));
        witnesses.insert(
            "first".into(),
            json!({
                "phi": r.phi,
                "sigma_used": r.sigma_used,
                "straddling": sorted_strings(&r.straddling),
                "straddling_both": sorted_strings(&r.straddling_both),
            }),
        );
    }
    if want(HypArg::Second) {
        let (_, gw, _) = hyperbolic_to_word(&g)?;
        let (_, sw, e) = hyperbolic_to_word(&sn)?;
        let sw: Vec<_> = sw.iter().cycle().take(sw.len() * e as usize).cloned().collect();
        let r = psi_hyp_second(&gw, &sw);
        values.insert("second".into(), json!(r.psi));
        witnesses.insert(
            "second".into(),
            json!({ "gamma_word": ints(&gw), "sigma_word": ints(&sw), "psi_correction": r.psi_correction, "min_sum": r.min_sum }),
        );
    }
    if want(HypArg::Oracle) {
        match intersection_count_oracle(&g, &sn, depth)? {
            None => {
                values.insert("oracle".into(), Value::Null);
                witnesses.insert("oracle".into(), json!({ "declined": "coinciding geodesics" }));
            }
            Some(r) => {
                let v = if r.stable { json!(-(r.count as i64)) } else { Value::Null };
                values.insert("oracle".into(), v);
                witnesses.insert("oracle".into(), json!(r));
            }
        }
    }
    let known: Vec<i64> = values.values().filter_map(Value::as_i64).collect();
    let agree = known.windows(2).all(|w| w[0] == w[1]);
    let value = match (method, known.first()) {
        (HypArg::All, Some(&v)) if agree => json!(v),
        (HypArg::All, _) => Value::Null,
        (_, Some(&v)) => json!(v),
        _ => Value::Null,
    };
    Ok(result(
        "hyp-psi",
        json!({ "gamma": g, "sigma": s, "method": method_name(method), "depth": depth }),
        value,
        json!({ "methods": values, "details": witnesses }),
        json!({ "agree": agree, "coinciding": geodesics_coincide(&g, &sn)? }),
    ))
}

fn method_name(m: HypArg) -> &'static str {
    match m {
        HypArg::First => "first",
        HypArg::Second => "second",
        HypArg::Oracle => "oracle",
        HypArg::All => "all",
    }
}

fn complex(s: &str) -> Result<Complex64, Error> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad number {t:?}"))))
        .collect::<Result<_, _>>()?;
    match v[..] {
        [x, y] => Ok(Complex64::new(x, y)),
        _ => Err(Error::Parse(format!("expected x,y, got {s:?}"))),
    }
}

fn c_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn analytic(cmd: &AnalyticCmd) -> Out {
    let start = Instant::now();
    let mut out = match cmd {
        AnalyticCmd::Val { gamma, max_m, nodes, .. } => {
            let g = matrix(gamma)?;
            let t = cycle_table(&g, *max_m, *nodes)?;
            result(
                "analytic val",
                json!({ "gamma": g, "max_m": max_m, "nodes": nodes }),
                json!(t.values),
                json!({ "imag": t.imag, "error": t.error }),
                json!({ "nodes": nodes }),
            )
        }
        AnalyticCmd::VerifyCocycle { pair, z, truncation } => {
            let (g, s, z) = (matrix(&pair.gamma)?, matrix(&pair.sigma)?, complex(z)?);
            let r = verify_cocycle(&g, &s, z, *truncation)?;
            result(
                "analytic verify-cocycle",
                json!({ "gamma": g, "sigma": s, "z": c_json(z) }),
                json!(r.residual),
                json!({ "lhs": c_json(r.lhs), "rhs": c_json(r.rhs), "forms": sorted_strings(&r.forms) }),
                json!({ "truncation": truncation }),
            )
        }
        AnalyticCmd::VerifyIntegral { pair, n_max, truncation } => {
            let (g, s) = (matrix(&pair.gamma)?, matrix(&pair.sigma)?);
            let r = verify_integral_psi(&g, &s, *n_max, *truncation)?;
            result(
                "analytic verify-integral",
                json!({ "gamma": g, "sigma": s, "n_max": n_max }),
                json!(r.partials),
                json!({ "exact_psi": r.exact_psi, "base_point": c_json(r.base_point) }),
                json!({ "truncation": truncation }),
            )
        }
    };
    out["meta"]["seconds"] = json!(start.elapsed().as_secs_f64());
    Ok(out)
}

fn selftest() -> (Value, bool) {
    let checks = rsym::selftest::run_all();
    let ok = checks.iter().all(|c| c.pass);
    let v = result("selftest", json!({}), json!(ok), json!(checks), json!({}));
    (v, ok)
}

/// Indented `key: value` lines, one scalar per line.
fn pretty(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                if x.is_object() || (x.is_array() && x.as_array().unwrap().iter().any(|y| y.is_object())) {
                    out.push_str(&format!("{pad}{k}:\n"));
                    pretty(x, indent + 1, out);
                } else {
                    out.push_str(&format!("{pad}{k}: {}\n", scalar(x)));
                }
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                out.push_str(&format!("{pad}[{i}]\n"));
                pretty(x, indent + 1, out);
            }
        }
        x => out.push_str(&format!("{pad}{}\n", scalar(x))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(a) => a.iter().map(scalar).collect::<Vec<_>>().join("  "),
        x => x.to_string(),
    }
}

fn csv(v: &Value) -> String {
    let vals = v["value"].as_array().cloned().unwrap_or_default();
    let errs = v["witnesses"]["error"].as_array().cloned().unwrap_or_default();
    let mut s = String::from("m,value,error\n");
    for (m, (x, e)) in vals.iter().zip(&errs).enumerate() {
        s.push_str(&format!("{m},{x},{e}\n"));
    }
    s
}

fn emit(v: &Value, as_pretty: bool) {
    if as_pretty {
        let mut s = String::new();
        pretty(v, 0, &mut s);
        print!("{s}");
    } else {
        println!("{}", serde_json::to_string(v).expect("serializable"));
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        // only fails if a pool already exists, which cannot happen here
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let out = match &cli.cmd {
        Cmd::Classical { matrix, method } => classical(matrix, *method),
        Cmd::Cf { value } => cf(value),
        Cmd::Conj { cf: s } => conj(s),
        Cmd::Forms { class, straddle, filter } => forms(class, straddle.as_deref(), filter.as_deref()),
        Cmd::HypPhi(p) => hyp_phi(p),
        Cmd::HypPsi { pair, method, depth } => hyp_psi(pair, *method, *depth),
        Cmd::Analytic(a) => {
            let r = analytic(a);
            if let (Ok(v), AnalyticCmd::Val { csv: true, .. }) = (&r, a) {
                print!("{}", csv(v));
                return ExitCode::SUCCESS;
            }
            r
        }
        Cmd::Selftest => {
            let (v, ok) = selftest();
            emit(&v, cli.pretty);
            return if ok { ExitCode::SUCCESS } else { ExitCode::from(1) };
        }
    };
    match out {
        Ok(v) => {
            emit(&v, cli.pretty);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
