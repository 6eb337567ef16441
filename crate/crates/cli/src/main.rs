mod casefile;

use anyhow::{anyhow, bail, Result};
use casefile::{parse_args, parse_cases, parse_window, CaseSpec};
use clap::{Parser, Subcommand, ValueEnum};
use detloci::detschemes::{build_flag, build_matrix, random_matrix_checked, HomMatrix, MatrixSpec};
use detloci::gfpoly::PrimeField;
use detloci::gradedhom::{coker_tensor_dim, ext1_mi_dim, hf_quotient, hom_dim, Target};
use detloci::invariants::{self as inv, DegreeData};
use detloci::verifier::{self, CaseReport, RunOptions, Verdict};
use rayon::prelude::*;
use serde_json::{json, Value};
use std::process::ExitCode;

const DEFAULT_WINDOW: (i64, i64) = (-3, 5);

#[derive(Parser)]
#[command(name = "detloci", version, about = "Dimension invariants and graded verification for determinantal loci")]
struct Cli {
    /// Field characteristic.
    #[arg(long, global = true, default_value_t = 101)]
    prime: u32,
    /// Seed for random matrices and `rand` entries; overrides the case file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Degree window d0..d1.
    #[arg(long, global = true, allow_hyphen_values = true)]
    window: Option<String>,
    /// Emit JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Case file; `---` separates cases in batch mode.
    #[arg(long, global = true)]
    case: Option<std::path::PathBuf>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form invariants of the degree data.
    Invariants {
        /// Case as key=value pairs.
        pairs: Vec<String>,
    },
    /// Predicted dimension with its status.
    Predict { pairs: Vec<String> },
    /// Numerical predicates only.
    Check { pairs: Vec<String> },
    /// One quantity from the engine over the degree window.
    Compute {
        what: What,
        pairs: Vec<String>,
    },
    /// Full report with identities; exit code 1 when a check fails.
    Verify {
        /// Built-in case name or `all`.
        #[arg(long)]
        catalog: Option<String>,
        pairs: Vec<String>,
    },
    /// List built-in cases.
    Catalog,
}

#[derive(Clone, Copy, ValueEnum)]
enum What {
    Hf,
    Hom,
    Fib1,
    Fib2,
    Ext1,
    Syz,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn load_cases(cli: &Cli, pairs: &[String]) -> Result<Vec<CaseSpec>> {
    match (&cli.case, pairs.is_empty()) {
        (Some(_), false) => bail!("give either --case or key=value pairs, not both"),
        (Some(path), true) => {
            let text = std::fs::read_to_string(path).map_err(|e| anyhow!("reading {}: {e}", path.display()))?;
            parse_cases(&text)
        }
        (None, false) => Ok(vec![parse_args(pairs)?]),
        (None, true) => bail!("no case given; pass key=value pairs or --case FILE"),
    }
}

fn window(cli: &Cli, case: Option<&CaseSpec>) -> Result<Option<(i64, i64)>> {
    match &cli.window {
        Some(w) => Ok(Some(parse_window(w)?)),
        None => Ok(case.and_then(|c| c.window)),
    }
}

fn prime(cli: &Cli, case: &CaseSpec) -> u32 {
    if cli.prime != 101 {
        cli.prime
    } else {
        case.prime.unwrap_or(cli.prime)
    }
}

/// Runs each case in parallel and returns results in input order.
fn per_case<T: Send>(cases: &[CaseSpec], f: impl Fn(&CaseSpec) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    cases.par_iter().map(f).collect()
}

fn emit(cli: &Cli, values: Vec<Value>, text: Vec<String>) {
    if cli.json {
        println!("{}", serde_json::to_string_pretty(&Value::Array(values)).expect("json"));
    } else {
        for t in text {
            print!("{t}");
        }
    }
}

fn run(cli: &Cli) -> Result<bool> {
    match &cli.cmd {
        Command::Catalog => {
            let entries = verifier::catalog();
            let values = entries.iter().map(|e| json!({"name": e.name, "description": e.description})).collect();
            let text = entries.iter().map(|e| format!("{:<26} {}\n", e.name, e.description)).collect();
            emit(cli, values, text);
            Ok(true)
        }
        Command::Invariants { pairs } => {
            let cases = load_cases(cli, pairs)?;
            let out = per_case(&cases, |c| Ok(invariants_json(&c.data)))?;
            let text = out.iter().zip(&cases).map(|(v, c)| render_object(c, v)).collect();
            emit(cli, out, text);
            Ok(true)
        }
        Command::Predict { pairs } => {
            let cases = load_cases(cli, pairs)?;
            let out = per_case(&cases, |c| Ok(serde_json::to_value(inv::predict_dim(&c.data))?))?;
            let text = out
                .iter()
                .zip(&cases)
                .map(|(v, c)| format!("{}{} ({}, {})\n", label(c), v["value"], v["status"].as_str().unwrap_or(""), v["source"].as_str().unwrap_or("")))
                .collect();
            emit(cli, out, text);
            Ok(true)
        }
        Command::Check { pairs } => {
            let cases = load_cases(cli, pairs)?;
            let out = per_case(&cases, |c| Ok(serde_json::to_value(inv::check_conditions(&c.data))?))?;
            let text = out.iter().zip(&cases).map(|(v, c)| render_object(c, v)).collect();
            emit(cli, out, text);
            Ok(true)
        }
        Command::Compute { what, pairs } => {
            let cases = load_cases(cli, pairs)?;
            let out = per_case(&cases, |c| {
                let w = window(cli, Some(c))?.unwrap_or(DEFAULT_WINDOW);
                compute(c, *what, prime(cli, c), cli.seed, w)
            })?;
            let text = out.iter().zip(&cases).map(|(v, c)| render_object(c, v)).collect();
            emit(cli, out, text);
            Ok(true)
        }
        Command::Verify { catalog, pairs } => {
            let reports: Vec<CaseReport> = match catalog {
                Some(name) => {
                    if cli.case.is_some() || !pairs.is_empty() {
                        bail!("--catalog cannot be combined with a case");
                    }
                    verifier::verify_catalog(name, cli.prime)?
                }
                None => {
                    let cases = load_cases(cli, pairs)?;
                    per_case(&cases, |c| {
                        let opts = RunOptions { prime: prime(cli, c), quantities: c.checks.clone(), window: window(cli, Some(c))? };
                        let mut r = verifier::run_case(&c.data, &c.matrix(cli.seed), &opts)?;
                        r.name = c.name.clone();
                        Ok(r)
                    })?
                }
            };
            let ok = reports.iter().all(|r| r.verdict == Verdict::Pass);
            let values = reports.iter().map(|r| serde_json::to_value(r).expect("json")).collect();
            let text = reports.iter().map(CaseReport::render_text).collect();
            emit(cli, values, text);
            Ok(ok)
        }
    }
}

fn label(c: &CaseSpec) -> String {
    c.name.as_ref().map(|n| format!("{n}: ")).unwrap_or_default()
}

fn render_object(c: &CaseSpec, v: &Value) -> String {
    let mut s = String::new();
    if let Some(n) = &c.name {
        s.push_str(&format!("case {n}\n"));
    }
    if let Value::Object(m) = v {
        for (k, x) in m {
            s.push_str(&format!("  {k:<16} {x}\n"));
        }
    }
    s
}

fn invariants_json(d: &DegreeData) -> Value {
    let mut m = serde_json::Map::new();
    m.insert("codim".into(), json!(d.codim()));
    m.insert("dim_A".into(), json!(d.dim_a()));
    m.insert("lambda_c".into(), json!(inv::lambda_c(d)));
    m.insert("ell".into(), json!((1..=d.c).map(|i| inv::ell(d, i)).collect::<Vec<_>>()));
    m.insert("h".into(), json!((3..=d.c).map(|i| inv::h(d, i)).collect::<Vec<_>>()));
    m.insert("K".into(), json!((3..=d.c).map(|i| inv::k_term(d, i)).collect::<Vec<_>>()));
    m.insert("K_total".into(), json!(inv::k_total(d)));
    m.insert("Kprime".into(), json!((3..=d.r).map(|i| inv::k_prime(d, i)).collect::<Vec<_>>()));
    m.insert("Kprime_total".into(), json!(inv::k_prime_total(d)));
    m.insert("s_r".into(), json!(inv::s_r(d)));
    m.insert("mdg".into(), json!(inv::mdg(d)));
    m.insert("mdr".into(), json!(inv::mdr(d)));
    if let Ok(k) = inv::kappa_1(d) {
        m.insert("kappa_1".into(), json!(k));
    }
    if let Ok(k) = inv::kappa_prime(d) {
        m.insert("kappa_prime".into(), json!(k));
    }
    Value::Object(m)
}

fn build(c: &CaseSpec, p: u32, seed: Option<u64>) -> Result<(HomMatrix, Option<u64>)> {
    let field = PrimeField::new(p)?;
    Ok(match c.matrix(seed) {
        MatrixSpec::Random { seed } => {
            let (m, s) = random_matrix_checked(&c.data, field, seed)?;
            (m, Some(s))
        }
        spec => (build_matrix(&c.data, &spec, field)?, None),
    })
}

fn compute(c: &CaseSpec, what: What, p: u32, seed: Option<u64>, (lo, hi): (i64, i64)) -> Result<Value> {
    let d = &c.data;
    let (m, seed_used) = build(c, p, seed)?;
    let flag = build_flag(&m, d.r)?;
    let a = flag.stage(d.c);
    let top = d.a(d.cols());
    let degrees: Vec<i64> = (lo..=hi).collect();
    let series = |f: &(dyn Fn(i64) -> Result<i64> + Sync)| -> Result<Value> {
        let vals = degrees.par_iter().map(|&v| f(v)).collect::<Result<Vec<_>>>()?;
        Ok(json!({"degrees": degrees, "values": vals}))
    };
    let has_b = d.c >= 3 - d.r;
    let body = match what {
        What::Hf => series(&|v| Ok(hf_quotient(a, v)))?,
        What::Hom => series(&|v| Ok(hom_dim(&a.syzygies(), Target::Quotient(&a.ideal()), v)?))?,
        What::Fib1 => {
            if !has_b {
                bail!("fib1 needs c >= 3-r");
            }
            let b = flag.stage(d.c - 1);
            series(&|v| Ok(hom_dim(&b.syzygies(), Target::Subquotient { big: &a.ideal(), small: &b.ideal() }, v)?))?
        }
        What::Fib2 => series(&|v| Ok(coker_tensor_dim(&m, Some(&a.ideal()), top + v)))?,
        What::Ext1 => json!({"value": ext1_mi_dim(&m)}),
        What::Syz => {
            let s = a.syzygies();
            json!({"generator_degrees": s.gen_degrees(), "syzygy_degrees": s.syz_degrees(), "bound": s.bound, "complete": s.complete})
        }
    };
    let mut out = json!({"quantity": what_name(what), "prime": p});
    if let Some(s) = seed_used {
        out["seed_used"] = json!(s);
    }
    if let (Value::Object(o), Value::Object(b)) = (&mut out, body) {
        o.extend(b);
    }
    Ok(out)
}

fn what_name(w: What) -> &'static str {
    match w {
        What::Hf => "hf",
        What::Hom => "hom",
        What::Fib1 => "fib1",
        What::Fib2 => "fib2",
        What::Ext1 => "ext1",
        What::Syz => "syz",
    }
}
