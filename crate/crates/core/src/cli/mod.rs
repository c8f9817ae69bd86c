//! Batch command-line front end.
//!
//! Every command writes either CSV (comma separated, header row, LF line
//! endings) or a single JSON [`OutputRecord`] with sorted keys to stdout.
//! Failures exit non-zero and print a JSON error record to stderr.

mod format;
mod record;
pub mod verify;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

pub use format::{format_sig, json_number};
pub use record::{OutputRecord, Status};

use crate::dist::{quantile, GpdParams, MassWalker, Sampler};
use crate::error::Error;
use crate::euler::{difference_exact, difference_float, parse_rational, DifferenceQuery};
use crate::report::VerificationReport;
use crate::series::{
    classify_convergence, lambda0, root_test_value, s_by_rearrangement, s_closed_form, s_series,
};
use verify::VerifyConfig;

/// Exit status for argument and domain errors.
pub const EXIT_ERROR: i32 = 2;
/// Exit status when `verify` ran but at least one check failed.
pub const EXIT_CHECK_FAILED: i32 = 1;

#[derive(Debug, Parser)]
#[command(
    name = "gpd",
    version,
    about = "Generalized Poisson distribution toolkit"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Significant digits for real-valued output.
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u8).range(1..=17))]
    pub digits: u8,
}

#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    #[arg(long)]
    pub theta: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Table of pmf and cdf for n = 0..=n-max.
    Pmf {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        n_max: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// P(X <= n).
    Cdf {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        n: u64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Smallest n with cdf(n) >= u.
    Quantile {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        u: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Seeded inversion samples (ChaCha8 generator).
    Sample {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        count: usize,
        /// Emit counts per value instead of the raw draws.
        #[arg(long)]
        histogram: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Direct sum of S(θ, λ) against 1/(1-λ); with --k-max also the
    /// column-order double sum.
    SSeries {
        #[arg(long)]
        theta: f64,
        #[arg(long, allow_hyphen_values = true)]
        lambda: f64,
        #[arg(long, default_value_t = 1e-12)]
        tolerance: f64,
        #[arg(long)]
        k_max: Option<u32>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Re-run every identity check over a (θ, λ) grid.
    Verify {
        /// Comma-separated θ grid.
        #[arg(long, value_delimiter = ',')]
        theta: Vec<f64>,
        /// Comma-separated λ grid.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        lambda: Vec<f64>,
        #[arg(long, default_value_t = 1e-10)]
        tolerance: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// k-th difference of (A + Bn)^p, exact and in floating point.
    EulerDiff {
        /// A as an integer, p/q or decimal.
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        #[arg(long)]
        p: u32,
        #[arg(long)]
        k: u32,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Root of λ e^λ = e^-1.
    Lambda0 {
        #[arg(long, default_value_t = 1e-15)]
        tolerance: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Convergence class of the series at λ.
    Classify {
        #[arg(long, allow_hyphen_values = true)]
        lambda: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
}

/// What a command printed and how it exits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Self {
            stdout,
            stderr: String::new(),
            code: 0,
        }
    }
}

/// Rendering context shared by the commands.
struct Emit {
    format: Format,
    digits: usize,
}

impl Emit {
    fn new(out: &OutputArgs) -> Self {
        Self {
            format: out.format,
            digits: out.digits as usize,
        }
    }

    fn num(&self, x: f64) -> Value {
        json_number(x, self.digits)
    }

    fn text(&self, x: f64) -> String {
        format_sig(x, self.digits)
    }

    fn csv(&self, header: &[&str], rows: &[Vec<String>]) -> String {
        let mut s = header.join(",");
        s.push('\n');
        for row in rows {
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }
}

fn params_record(command: &str, p: &ParamArgs, emit: &Emit) -> OutputRecord {
    OutputRecord::new(command)
        .input("theta", emit.num(p.theta))
        .input("lambda", emit.num(p.lambda))
}

fn error_outcome(record: OutputRecord, err: &Error) -> Outcome {
    let mut record = record;
    record.status = Status::Error;
    record.output("error", err.to_string());
    Outcome {
        stdout: String::new(),
        stderr: format!("{}\n", record.to_json()),
        code: EXIT_ERROR,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_from<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                Outcome::ok(text)
            } else {
                Outcome {
                    stdout: String::new(),
                    stderr: text,
                    code,
                }
            }
        }
    }
}

pub fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Pmf { params, n_max, out } => cmd_pmf(params, *n_max, out),
        Command::Cdf { params, n, out } => cmd_cdf(params, *n, out),
        Command::Quantile { params, u, out } => cmd_quantile(params, *u, out),
        Command::Sample {
            params,
            seed,
            count,
            histogram,
            out,
        } => cmd_sample(params, *seed, *count, *histogram, out),
        Command::SSeries {
            theta,
            lambda,
            tolerance,
            k_max,
            out,
        } => cmd_s_series(*theta, *lambda, *tolerance, *k_max, out),
        Command::Verify {
            theta,
            lambda,
            tolerance,
            out,
        } => cmd_verify(theta, lambda, *tolerance, out),
        Command::EulerDiff { a, b, p, k, out } => cmd_euler_diff(a, b, *p, *k, out),
        Command::Lambda0 { tolerance, out } => cmd_lambda0(*tolerance, out),
        Command::Classify { lambda, out } => cmd_classify(*lambda, out),
    }
}

pub fn cmd_pmf(p: &ParamArgs, n_max: u64, out: &OutputArgs) -> Outcome {
    let emit = Emit::new(out);
    let record = params_record("pmf", p, &emit).input("n_max", n_max);
    let params = match GpdParams::new(p.theta, p.lambda) {
        Ok(v) => v,
        Err(e) => return error_outcome(record, &e),
    };
    let mut walker = MassWalker::new(params);
    let rows: Vec<(u64, f64, f64)> = (0..=n_max)
        .map(|_| {
            let step = walker.step();
            (step.term.n, step.term.probability, step.cdf.min(1.0))
        })
        .collect();
    match emit.format {
        Format::Csv => Outcome::ok(
            emit.csv(
                &["n", "pmf", "cdf"],
                &rows
                    .iter()
                    .map(|&(n, p, c)| vec![n.to_string(), emit.text(p), emit.text(c)])
                    .collect::<Vec<_>>(),
            ),
        ),
        Format::Json => {
            let mut record = record;
            let table: Vec<Value> = rows
                .iter()
                .map(|&(n, p, c)| json!({"n": n, "pmf": emit.num(p), "cdf": emit.num(c)}))
                .collect();
            record.output("rows", table);
            Outcome::ok(record.to_json() + "\n")
        }
    }
}

pub fn cmd_cdf(p: &ParamArgs, n: u64, out: &OutputArgs) -> Outcome {
    let emit = Emit::new(out);
    let record = params_record("cdf", p, &emit).input("n", n);
    let params = match GpdParams::new(p.theta, p.lambda) {
        Ok(v) => v,
        Err(e) => return error_outcome(record, &e),
    };
    let value = crate::dist::cdf(&params, n);
    match emit.format {
        Format::Csv => {
            Outcome::ok(emit.csv(&["n", "cdf"], &[vec![n.to_string(), emit.text(value)]]))
        }
        Format::Json => {
            let mut record = record;
            record.output("cdf", emit.num(value));
            Outcome::ok(record.to_json() + "\n")
        }
    }
}

pub fn cmd_quantile(p: &ParamArgs, u: f64, out: &OutputArgs) -> Outcome {
    let emit = Emit::new(out);
    let record = params_record("quantile", p, &emit).input("u", emit.num(u));
    let result = GpdParams::new(p.theta, p.lambda).and_then(|params| quantile(&params, u));
    let n = match result {
        Ok(n) => n,
        Err(e) => return error_outcome(record, &e),
    };
    match emit.format {
        Format::Csv => Outcome::ok(emit.csv(&["u", "n"], &[vec![emit.text(u), n.to_string()]])),
        Format::Json => {
            let mut record = record;
            record.output("n", n);
            Outcome::ok(record.to_json() + "\n")
        }
    }
}

pub fn cmd_sample(
    p: &ParamArgs,
    seed: u64,
    count: usize,
    histogram: bool,
    out: &OutputArgs,
) -> Outcome {
    let emit = Emit::new(out);
    let record = params_record("sample", p, &emit)
        .input("seed", seed)
        .input("count", count)
        .input("histogram", histogram);
    let draws = GpdParams::new(p.theta, p.lambda).and_then(|params| {
        if count == 0 {
            return Err(Error::Domain {
                param: "count",
                value: 0.0,
                bound: "count >= 1",
            });
        }
        Sampler::new(params).sample(seed, count)
    });
    let draws = match draws {
        Ok(d) => d,
        Err(e) => return error_outcome(record, &e),
    };

    let n = draws.len() as f64;
    let mean = draws.iter().map(|&x| x as f64).sum::<f64>() / n;
    let variance = if draws.len() > 1 {
        draws
            .iter()
            .map(|&x| (x as f64 - mean).powi(2))
            .sum::<f64>()
            / (n - 1.0)
    } else {
        0.0
    };
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    if histogram {
        for &x in &draws {
            *counts.entry(x).or_default() += 1;
        }
    }

    match emit.format {
        Format::Csv => {
            let body = if histogram {
                let rows: Vec<Vec<String>> = counts
                    .iter()
                    .map(|(v, c)| vec![v.to_string(), c.to_string()])
                    .collect();
                emit.csv(&["n", "count"], &rows)
            } else {
                let mut s = String::from("sample\n");
                for x in &draws {
                    writeln!(s, "{x}").expect("write to string");
                }
                s
            };
            Outcome {
                stdout: body,
                stderr: format!(
                    "mean={} variance={}\n",
                    emit.text(mean),
                    emit.text(variance)
                ),
                code: 0,
            }
        }
        Format::Json => {
            let mut record = record;
            if histogram {
                let rows: Vec<Value> = counts
                    .iter()
                    .map(|(v, c)| json!({"n": v, "count": c}))
                    .collect();
                record.output("histogram", rows);
            } else {
                record.output("samples", draws);
            }
            record.output("mean", emit.num(mean));
            record.output("variance", emit.num(variance));
            Outcome::ok(record.to_json() + "\n")
        }
    }
}

pub fn cmd_s_series(
    theta: f64,
    lambda: f64,
    tolerance: f64,
    k_max: Option<u32>,
    out: &OutputArgs,
) -> Outcome {
    let emit = Emit::new(out);
    let mut record = OutputRecord::new("s-series")
        .input("theta", emit.num(theta))
        .input("lambda", emit.num(lambda))
        .input("tolerance", emit.num(tolerance));
    if let Some(k) = k_max {
        record = record.input("k_max", k);
    }
    let computed = (|| {
        let closed = s_closed_form(lambda)?;
        let direct = s_series(theta, lambda, tolerance)?;
        let rearranged = k_max
            .map(|k| s_by_rearrangement(theta, lambda, k))
            .transpose()?;
        Ok::<_, Error>((closed, direct, rearranged))
    })();
    let (closed, direct, rearranged) = match computed {
        Ok(v) => v,
        Err(e) => return error_outcome(record, &e),
    };
    let mut methods = vec![("direct", direct)];
    if let Some(r) = rearranged {
        methods.push(("rearranged", r));
    }
    match emit.format {
        Format::Csv => {
            let mut rows: Vec<Vec<String>> = methods
                .iter()
                .map(|(name, r)| {
                    vec![
                        name.to_string(),
                        emit.text(r.value),
                        r.terms_used.to_string(),
                        emit.text(r.tail_bound),
                        emit.text((r.value - closed).abs()),
                    ]
                })
                .collect();
            rows.push(vec![
                "closed-form".into(),
                emit.text(closed),
                String::new(),
                String::new(),
                String::new(),
            ]);
            Outcome::ok(emit.csv(
                &["method", "value", "terms_used", "tail_bound", "residual"],
                &rows,
            ))
        }
        Format::Json => {
            record.output("closed_form", emit.num(closed));
            for (name, r) in &methods {
                record.output(
                    name,
                    json!({
                        "value": emit.num(r.value),
                        "terms_used": r.terms_used,
                        "tail_bound": emit.num(r.tail_bound),
                        "converged": r.converged,
                    }),
                );
                record.residual(name, emit.num((r.value - closed).abs()));
            }
            Outcome::ok(record.to_json() + "\n")
        }
    }
}

fn report_json(r: &VerificationReport, emit: &Emit) -> Value {
    let inputs: serde_json::Map<String, Value> = r
        .inputs
        .iter()
        .map(|(k, v)| (k.clone(), emit.num(*v)))
        .collect();
    let mut v = json!({
        "identity": r.identity,
        "formula": r.formula,
        "inputs": inputs,
        "residual": emit.num(r.residual),
        "tolerance": emit.num(r.tolerance),
        "passed": r.passed,
    });
    if let Some(d) = &r.detail {
        v["detail"] = Value::String(d.clone());
    }
    v
}

pub fn cmd_verify(thetas: &[f64], lambdas: &[f64], tolerance: f64, out: &OutputArgs) -> Outcome {
    let emit = Emit::new(out);
    let mut config = VerifyConfig {
        tolerance,
        ..VerifyConfig::default()
    };
    if !thetas.is_empty() {
        config.thetas = thetas.to_vec();
    }
    if !lambdas.is_empty() {
        config.lambdas = lambdas.to_vec();
    }
    let record = OutputRecord::new("verify")
        .input("tolerance", emit.num(tolerance))
        .input(
            "theta",
            config
                .thetas
                .iter()
                .map(|&t| emit.num(t))
                .collect::<Vec<_>>(),
        )
        .input(
            "lambda",
            config
                .lambdas
                .iter()
                .map(|&l| emit.num(l))
                .collect::<Vec<_>>(),
        );
    if !(tolerance > 0.0) {
        return error_outcome(
            record,
            &Error::domain("tolerance", tolerance, "tolerance > 0"),
        );
    }
    if let Some(&t) = config
        .thetas
        .iter()
        .find(|t| !(**t > 0.0) || !t.is_finite())
    {
        return error_outcome(record, &Error::domain("theta", t, "theta > 0 (finite)"));
    }
    if let Some(&l) = config.lambdas.iter().find(|l| !l.is_finite()) {
        return error_outcome(record, &Error::domain("lambda", l, "finite lambda"));
    }

    let reports = verify::run_suite(&config);
    let failed = reports.iter().filter(|r| !r.passed).count();
    let code = if failed == 0 { 0 } else { EXIT_CHECK_FAILED };
    let stdout = match emit.format {
        Format::Csv => {
            let cell = |r: &VerificationReport, key: &str| {
                r.inputs.get(key).map(|v| emit.text(*v)).unwrap_or_default()
            };
            let rows: Vec<Vec<String>> = reports
                .iter()
                .map(|r| {
                    vec![
                        r.identity.clone(),
                        cell(r, "theta"),
                        cell(r, "lambda"),
                        emit.text(r.residual),
                        emit.text(r.tolerance),
                        if r.passed { "pass" } else { "fail" }.to_owned(),
                    ]
                })
                .collect();
            emit.csv(
                &[
                    "identity",
                    "theta",
                    "lambda",
                    "residual",
                    "tolerance",
                    "status",
                ],
                &rows,
            )
        }
        Format::Json => {
            let mut record = record;
            record.output(
                "checks",
                reports
                    .iter()
                    .map(|r| report_json(r, &emit))
                    .collect::<Vec<_>>(),
            );
            record.output("passed", reports.len() - failed);
            record.output("failed", failed);
            let mut worst: BTreeMap<&str, f64> = BTreeMap::new();
            for r in &reports {
                let w = worst.entry(r.identity.as_str()).or_insert(0.0);
                *w = w.max(r.residual);
            }
            for (k, v) in worst {
                record.residual(k, emit.num(v));
            }
            if failed > 0 {
                record.status = Status::Error;
            }
            record.to_json() + "\n"
        }
    };
    Outcome {
        stdout,
        stderr: if failed > 0 {
            format!("{failed} of {} checks failed\n", reports.len())
        } else {
            String::new()
        },
        code,
    }
}

pub fn cmd_euler_diff(a: &str, b: &str, p: u32, k: u32, out: &OutputArgs) -> Outcome {
    let emit = Emit::new(out);
    let record = OutputRecord::new("euler-diff")
        .input("a", a)
        .input("b", b)
        .input("p", p)
        .input("k", k);
    let computed = (|| {
        let ra = parse_rational(a)?;
        let rb = parse_rational(b)?;
        let float_a = num_traits::ToPrimitive::to_f64(&ra).unwrap_or(f64::NAN);
        let float_b = num_traits::ToPrimitive::to_f64(&rb).unwrap_or(f64::NAN);
        let exact = difference_exact(&DifferenceQuery::new(ra, rb, p, k)?);
        let float = difference_float(float_a, float_b, p, k)?;
        Ok::<_, Error>((exact, float))
    })();
    let (exact, float) = match computed {
        Ok(v) => v,
        Err(e) => return error_outcome(record, &e),
    };
    match emit.format {
        Format::Csv => Outcome::ok(emit.csv(
            &["a", "b", "p", "k", "exact", "float"],
            &[vec![
                a.to_owned(),
                b.to_owned(),
                p.to_string(),
                k.to_string(),
                exact.to_string(),
                emit.text(float),
            ]],
        )),
        Format::Json => {
            let mut record = record;
            record.output("exact", exact.to_string());
            record.output("float", emit.num(float));
            record.residual("float_vs_exact", emit.num((float - exact.to_f64()).abs()));
            Outcome::ok(record.to_json() + "\n")
        }
    }
}

pub fn cmd_lambda0(tolerance: f64, out: &OutputArgs) -> Outcome {
    let emit = Emit::new(out);
    let record = OutputRecord::new("lambda0").input("tolerance", emit.num(tolerance));
    let l = match lambda0(tolerance) {
        Ok(l) => l,
        Err(e) => return error_outcome(record, &e),
    };
    match emit.format {
        Format::Csv => Outcome::ok(emit.csv(
            &["lambda0", "residual"],
            &[vec![emit.text(l.value), emit.text(l.residual.abs())]],
        )),
        Format::Json => {
            let mut record = record;
            record.output("lambda0", emit.num(l.value));
            record.residual("defining_equation", emit.num(l.residual.abs()));
            Outcome::ok(record.to_json() + "\n")
        }
    }
}

pub fn cmd_classify(lambda: f64, out: &OutputArgs) -> Outcome {
    let emit = Emit::new(out);
    let class = classify_convergence(lambda);
    let rt = root_test_value(lambda);
    match emit.format {
        Format::Csv => Outcome::ok(emit.csv(
            &["lambda", "class", "root_test_value"],
            &[vec![emit.text(lambda), class.to_string(), emit.text(rt)]],
        )),
        Format::Json => {
            let mut record = OutputRecord::new("classify").input("lambda", emit.num(lambda));
            record.output("class", class.to_string());
            record.output("root_test_value", emit.num(rt));
            Outcome::ok(record.to_json() + "\n")
        }
    }
}

/// Entry point used by the `gpd` binary.
pub fn main() -> i32 {
    let outcome = run_from(std::env::args_os());
    print!("{}", outcome.stdout);
    eprint!("{}", outcome.stderr);
    outcome.code
}
