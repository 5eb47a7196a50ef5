//! `farey`: expansions, enumeration, paths, self-checks and diagrams for `F_N`.
//!
//! Exit status is 0 on success, 2 for bad input or a modulus outside an operation's
//! domain, and 1 for a failed internal invariant or a failing check suite.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use farey_core::arith::parse_decimal;
use farey_core::cf::{convergents, evaluate, fins, int_json, validate_cf};
use farey_core::checks::{run_suite, SuiteOptions, SUITES};
use farey_core::diagram::{edges_jsonl, plot_svg, PlotRequest};
use farey_core::graph::edges_in;
use farey_core::path::{cf_to_path, first_violation, is_well_directed, make_well_directed, path_from_infinity, path_to_cf};
use farey_core::{
    enumerate_expansions, expand_rational, expand_real, CfExpansion, Convergents, Error, ExtendedRational, Modulus,
    Path, Real,
};

#[derive(Parser)]
#[command(name = "farey", version, about = "Farey subgraphs F_N and F_N-continued fractions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// The modulus N.
    #[arg(long = "n", short = 'n')]
    n: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the result here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// The deterministic expansion of a vertex, a surd, or a decimal.
    Expand {
        #[command(flatten)]
        common: Common,
        /// `p/q` or `a+b*sqrt(d)`.
        #[arg(required_unless_present = "real")]
        x: Option<String>,
        /// A decimal literal, expanded as the exact rational it denotes.
        #[arg(long, conflicts_with = "x", allow_hyphen_values = true)]
        real: Option<String>,
        /// Number of terms for inputs with infinite expansions.
        #[arg(long, default_value_t = 20)]
        max_terms: usize,
    },
    /// Every finite expansion of a vertex of F_{p^l}.
    Enumerate {
        #[command(flatten)]
        common: Common,
        x: String,
    },
    /// Analyse a path `inf -> ... -> p/q`, or give the paths to a single vertex.
    Path {
        #[command(flatten)]
        common: Common,
        path: String,
    },
    /// Convergents, fins and value of a continued fraction `1/0+ N/b+ e/a ...`.
    Convergents {
        #[command(flatten)]
        common: Common,
        cf: String,
    },
    /// Run a property suite.
    Check {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(SUITES))]
        suite: String,
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        qmax: Option<u64>,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        max_terms: usize,
    },
    /// An SVG of the edges over `[lo, hi]`, or the edge list as JSON lines.
    Plot {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        lo: String,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        hi: String,
        #[arg(long)]
        qmax: u64,
        /// A path to draw on top; repeatable.
        #[arg(long)]
        highlight: Vec<String>,
        /// Emit `{"n","from","to"}` lines instead of SVG.
        #[arg(long)]
        edges: bool,
    },
}

enum Output {
    Json(Value),
    Text(String),
}

type Run = Result<(Output, bool), Error>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (common, result) = dispatch(cli.command);
    match result {
        Ok((out, ok)) => {
            let body = match (out, common.format) {
                (Output::Json(v), Format::Json) => format!("{}\n", serde_json::to_string_pretty(&v).unwrap()),
                (Output::Json(v), Format::Text) => text_of(&v),
                (Output::Text(s), _) => s,
            };
            if let Err(e) = emit(&common.out, &body) {
                eprintln!("farey: cannot write output: {e}");
                return ExitCode::from(2);
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("farey: {e}");
            ExitCode::from(if e.is_domain() { 2 } else { 1 })
        }
    }
}

fn emit(out: &Option<PathBuf>, body: &str) -> std::io::Result<()> {
    match out {
        Some(p) => fs::write(p, body),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

/// Plain rendering for `--format text`: the `text` field if present, else `key: value` lines.
fn text_of(v: &Value) -> String {
    if let Some(lines) = v.get("text") {
        return match lines {
            Value::Array(a) => a.iter().map(|l| format!("{}\n", l.as_str().unwrap_or_default())).collect(),
            Value::String(s) => format!("{s}\n"),
            other => format!("{other}\n"),
        };
    }
    match v {
        Value::Object(o) => o.iter().map(|(k, x)| format!("{k}: {x}\n")).collect(),
        Value::Array(a) => a.iter().map(text_of).collect(),
        other => format!("{other}\n"),
    }
}

fn dispatch(cmd: Command) -> (Common, Run) {
    match cmd {
        Command::Expand { common, x, real, max_terms } => {
            let r = expand(&common, x.as_deref(), real.as_deref(), max_terms);
            (common, r)
        }
        Command::Enumerate { common, x } => {
            let r = enumerate(&common, &x);
            (common, r)
        }
        Command::Path { common, path } => {
            let r = path_cmd(&common, &path);
            (common, r)
        }
        Command::Convergents { common, cf } => {
            let r = convergents_cmd(&common, &cf);
            (common, r)
        }
        Command::Check { suite, common, qmax, samples, seed, max_terms } => {
            let opts = SuiteOptions { n: common.n, qmax, samples, seed, terms: max_terms };
            let r = check(&suite, &opts);
            (common, r)
        }
        Command::Plot { common, lo, hi, qmax, highlight, edges } => {
            let r = plot(&common, &lo, &hi, qmax, &highlight, edges);
            (common, r)
        }
    }
}

fn modulus(c: &Common) -> Result<Modulus, Error> {
    Modulus::new(c.n)
}

fn table(seq: &Convergents) -> Value {
    let rows: Vec<Value> = (0..=seq.last_index() as isize)
        .map(|i| json!({"i": i, "p": int_json(seq.p(i)), "q": int_json(seq.q(i)), "value": seq.vertex(i).to_string()}))
        .collect();
    Value::Array(rows)
}

fn text_lines(cf: &CfExpansion, seq: &Convergents) -> Vec<String> {
    let mut lines = vec![cf.to_string()];
    for i in 0..=seq.last_index() as isize {
        lines.push(format!("{i}\t{}", seq.vertex(i)));
    }
    lines
}

fn expand(c: &Common, x: Option<&str>, real: Option<&str>, max_terms: usize) -> Run {
    let m = modulus(c)?;
    m.require_prime_power()?;
    let (input, kind, value) = match (x, real) {
        (_, Some(d)) => (d.to_string(), "decimal", Real::from(parse_decimal(d)?)),
        (Some(s), None) if s.contains("sqrt") => (s.to_string(), "surd", s.parse::<Real>()?),
        (Some(s), None) => {
            let v: ExtendedRational = s.parse()?;
            let cf = expand_rational(&v, &m)?;
            let seq = convergents(&cf)?;
            return Ok((
                Output::Json(json!({
                    "x": v.to_string(), "N": m.n(), "input": "rational", "exact": true,
                    "expansion": cf.to_json(), "cf": cf.to_string(),
                    "convergents": table(&seq), "text": text_lines(&cf, &seq),
                })),
                true,
            ));
        }
        (None, None) => return Err(Error::Malformed("nothing to expand".into())),
    };
    let r = expand_real(&value, &m, max_terms)?;
    let seq = convergents(&r.cf)?;
    let mut out = json!({
        "x": input, "N": m.n(), "input": kind, "exact": r.exact, "terms": r.cf.len(),
        "expansion": r.cf.to_json(), "cf": r.cf.to_string(), "residual": r.residual.to_string(),
        "convergents": table(&seq), "text": text_lines(&r.cf, &seq),
    });
    if kind == "decimal" {
        out["exact_value"] = json!(value.to_string());
    }
    Ok((Output::Json(out), true))
}

fn enumerate(c: &Common, x: &str) -> Run {
    let m = modulus(c)?;
    let v: ExtendedRational = x.parse()?;
    let set = enumerate_expansions(&v, &m)?;
    let mut out = set.to_json();
    out["text"] = json!(set.expansions.iter().map(|e| e.to_string()).collect::<Vec<_>>());
    Ok((Output::Json(out), true))
}

fn path_cmd(c: &Common, s: &str) -> Run {
    let m = modulus(c)?;
    if !s.contains("->") {
        let v: ExtendedRational = s.parse()?;
        let ancestors = path_from_infinity(&v, &m)?;
        let cf = expand_rational(&v, &m)?;
        let det = cf_to_path(&cf)?;
        return Ok((
            Output::Json(json!({
                "x": v.to_string(), "N": m.n(),
                "ancestor_path": ancestors.to_json(), "deterministic_path": det.to_json(), "cf": cf.to_string(),
                "text": [ancestors.to_string(), det.to_string()],
            })),
            true,
        ));
    }
    let p = Path::parse(m.clone(), s)?;
    p.check()?;
    let wd = is_well_directed(&p);
    let mut out = json!({"N": m.n(), "path": p.to_json(), "well_directed": wd});
    if wd {
        let cf = path_to_cf(&p)?;
        out["cf"] = json!(cf.to_string());
        out["text"] = json!([format!("well directed: {cf}")]);
    } else {
        let fixed = make_well_directed(&p)?;
        out["first_violation"] = json!(first_violation(&p));
        out["repaired"] = fixed.to_json();
        out["repaired_cf"] = json!(path_to_cf(&fixed)?.to_string());
        out["text"] = json!([format!("not well directed; repaired: {fixed}")]);
    }
    Ok((Output::Json(out), true))
}

fn convergents_cmd(c: &Common, s: &str) -> Run {
    let m = modulus(c)?;
    let cf: CfExpansion = s.parse()?;
    if cf.modulus() != &m {
        return Err(Error::Malformed(format!("{cf} has N = {}, not {}", cf.modulus(), m)));
    }
    if let Err(v) = validate_cf(&cf) {
        return Err(Error::InvalidCf(v));
    }
    let seq = convergents(&cf)?;
    let ys: Vec<String> = fins(&cf)?.iter().map(|y| y.to_string()).collect();
    let value = evaluate(&cf)?;
    let out = json!({
        "cf": cf.to_string(), "N": m.n(), "value": value.to_string(), "convergents": table(&seq),
        "fins": ys, "path": cf_to_path(&cf)?.to_json(), "text": text_lines(&cf, &seq),
    });
    Ok((Output::Json(out), true))
}

fn check(suite: &str, opts: &SuiteOptions) -> Run {
    let reports = run_suite(suite, opts)?;
    let ok = reports.iter().all(|r| r.passed);
    let text: Vec<String> = reports
        .iter()
        .map(|r| format!("{} {} checked={}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.checked))
        .collect();
    let out = json!({
        "suite": suite, "passed": ok,
        "reports": reports.iter().map(|r| r.to_json()).collect::<Vec<_>>(), "text": text,
    });
    Ok((Output::Json(out), ok))
}

fn plot(c: &Common, lo: &str, hi: &str, qmax: u64, highlight: &[String], edges: bool) -> Run {
    let m = modulus(c)?;
    let ratio = |s: &str| -> Result<_, Error> {
        let v: ExtendedRational = s.parse()?;
        v.to_ratio().ok_or_else(|| Error::Malformed(format!("interval endpoint {s} must be finite")))
    };
    let req = PlotRequest {
        modulus: m.clone(),
        lo: ratio(lo)?,
        hi: ratio(hi)?,
        qmax: qmax.into(),
        highlight: highlight.iter().map(|s| Path::parse(m.clone(), s)).collect::<Result<_, _>>()?,
    };
    if edges {
        let list = edges_in(&m, &req.lo, &req.hi, &req.qmax)?;
        return Ok((Output::Text(edges_jsonl(&m, &list)), true));
    }
    Ok((Output::Text(plot_svg(&req)?), true))
}
