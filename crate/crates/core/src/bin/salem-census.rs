use std::io::{self, BufRead, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde_json::json;

use salem_census::census::{resolve_work_dir, CensusReport, Coordinator, OutputFormat, RunConfig};
use salem_census::salem::{classify_with_bits, parse_height, parse_record_line, Classification};
use salem_census::sqrt::{find_decompositions, verify_decomposition};
use salem_census::theory::{mean_mult_bound, theory_row};
use salem_census::{Error, IntPoly};

const NEGATIVE: u8 = 1;
const INPUT_ERROR: u8 = 2;
const OVER_BUDGET: u8 = 3;

#[derive(Parser)]
#[command(
    name = "salem-census",
    version,
    about = "Exact Salem number censuses and their asymptotics"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Working precision for root enclosures.
    #[arg(long, global = true, default_value_t = 256)]
    precision_bits: u32,
    /// Refuse censuses whose candidate estimate exceeds this (accepts 1e9).
    #[arg(long, global = true, default_value = "1e9", value_parser = parse_budget)]
    budget: u64,
    /// Number of shards (default: available parallelism).
    #[arg(long, global = true)]
    shards: Option<usize>,
    #[arg(long, global = true, default_value = "csv")]
    format: OutputFormat,
    /// Checkpoint directory; defaults to $SALEM_CENSUS_DIR when set.
    #[arg(long, global = true, value_name = "DIR")]
    resume: Option<PathBuf>,
    /// Seed for the shard scheduling order.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a polynomial (`x^2-3x+1`, `1,-3,1`, a record line, or `-` for stdin).
    Check { poly: String },
    /// List the square-root witnesses of a Salem polynomial.
    Sqroot { poly: String },
    /// Count Salem numbers of degree 2m up to Q.
    Count {
        #[arg(long)]
        m: usize,
        #[arg(long = "max", value_name = "Q", value_parser = parse_q)]
        max: BigRational,
        /// Run the square-rootable census.
        #[arg(long)]
        sq: bool,
        /// Write the record stream to this file.
        #[arg(long, value_name = "FILE")]
        records: Option<PathBuf>,
    },
    /// Count over several Q and fit the growth exponent.
    Sweep {
        #[arg(long)]
        m: usize,
        #[arg(long = "max", value_name = "Q1,Q2,...", value_delimiter = ',', value_parser = parse_q, required = true)]
        max: Vec<BigRational>,
        #[arg(long)]
        sq: bool,
    },
    /// Main-term predictions for (m, Q) or the multiplicity bound for (n, L).
    Theory {
        #[arg(long, requires = "max", conflicts_with_all = ["dim", "length"])]
        m: Option<u32>,
        #[arg(long = "max", value_name = "Q", requires = "m", value_parser = parse_q)]
        max: Option<BigRational>,
        #[arg(long, requires = "length")]
        dim: Option<u32>,
        #[arg(long, requires = "dim")]
        length: Option<f64>,
    },
}

fn parse_budget(s: &str) -> Result<u64, String> {
    let v: f64 = s.parse().map_err(|_| format!("not a number: {s}"))?;
    if !(v >= 0.0) || v > u64::MAX as f64 {
        return Err(format!("out of range: {s}"));
    }
    Ok(v as u64)
}

fn parse_q(s: &str) -> Result<BigRational, String> {
    parse_height(s).map_err(|e| e.to_string())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::BudgetExceeded { .. } => OVER_BUDGET,
        _ => INPUT_ERROR,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    let g = cli.global;
    let config = RunConfig {
        precision_bits: g.precision_bits,
        budget: g.budget,
        shards: g.shards.unwrap_or_else(|| RunConfig::default().shards),
        format: g.format,
        seed: g.seed,
    };
    config.validate()?;
    let mut out = io::stdout().lock();
    match cli.command {
        Command::Check { poly } => cmd_check(&poly, &config, &mut out),
        Command::Sqroot { poly } => cmd_sqroot(&poly, &config, &mut out),
        Command::Count {
            m,
            max,
            sq,
            records,
        } => {
            let coord = Coordinator::new(config.clone())?.with_work_dir(resolve_work_dir(g.resume));
            let outcome = coord.count(m, &max, sq)?;
            if let Some(path) = records {
                std::fs::write(&path, outcome.record_stream()).map_err(|e| io_err(&path, e))?;
            }
            let report = CensusReport {
                rows: vec![outcome.row],
                slopes: vec![],
            };
            write!(out, "{}", report.render(config.format)).map_err(stdout_err)?;
            Ok(0)
        }
        Command::Sweep { m, max, sq } => {
            let coord = Coordinator::new(config.clone())?.with_work_dir(resolve_work_dir(g.resume));
            let (report, errors) = coord.sweep(m, &max, sq);
            write!(out, "{}", report.render(config.format)).map_err(stdout_err)?;
            for (q, e) in &errors {
                eprintln!("Q = {q}: {e}");
            }
            Ok(errors.first().map_or(0, |(_, e)| exit_code(e)))
        }
        Command::Theory {
            m,
            max,
            dim,
            length,
        } => {
            let value = match (m, max, dim, length) {
                (Some(m), Some(q), None, None) => {
                    let q = q.to_f64().unwrap_or(f64::NAN);
                    serde_json::to_value(theory_row(m, q)?)
                }
                (None, None, Some(n), Some(l)) => serde_json::to_value(mean_mult_bound(n, l)?),
                _ => {
                    return Err(Error::InvalidArgument(
                        "theory needs either --m and --max or --dim and --length".into(),
                    ))
                }
            }
            .expect("theory values serialize");
            writeln!(out, "{}", serde_json::to_string_pretty(&value).unwrap())
                .map_err(stdout_err)?;
            Ok(0)
        }
    }
}

fn io_err(path: &std::path::Path, e: io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source: e,
    }
}

fn stdout_err(e: io::Error) -> Error {
    io_err(std::path::Path::new("<stdout>"), e)
}

/// A polynomial or a record line; the recorded `λ` is returned for comparison.
fn parse_input(text: &str) -> Result<(IntPoly, Option<f64>), Error> {
    if let Ok((lambda, _, p)) = parse_record_line(text) {
        return Ok((p, Some(lambda)));
    }
    Ok((IntPoly::parse(text)?, None))
}

fn cmd_check(poly: &str, config: &RunConfig, out: &mut impl Write) -> Result<u8, Error> {
    if poly.trim() == "-" {
        return check_stream(config, out);
    }
    let (p, _) = parse_input(poly)?;
    let c = classify_with_bits(&p, config.precision_bits)?;
    let text = match config.format {
        OutputFormat::Json => {
            serde_json::to_string_pretty(&classification_json(&c)).unwrap() + "\n"
        }
        OutputFormat::Csv => classification_text(&c),
    };
    write!(out, "{text}").map_err(stdout_err)?;
    Ok(if c.is_salem() { 0 } else { NEGATIVE })
}

fn classification_json(c: &Classification) -> serde_json::Value {
    match c {
        Classification::Salem(r) => json!({
            "classification": "Salem",
            "m": r.m,
            "lambda": r.lambda.center.re.to_string(),
            "lambda_radius": r.lambda.radius.to_f64(),
            "record": r.record_line(),
        }),
        Classification::Cyclotomic { order } => {
            json!({"classification": "Cyclotomic", "order": order})
        }
        Classification::ReducibleOrOther => json!({"classification": "ReducibleOrOther"}),
    }
}

fn classification_text(c: &Classification) -> String {
    match c {
        Classification::Salem(r) => format!(
            "Salem\nm: {}\nlambda: {:.40} +/- {:.3e}\nrecord: {}\n",
            r.m,
            r.lambda.center.re,
            r.lambda.radius.to_f64(),
            r.record_line()
        ),
        Classification::Cyclotomic { order } => format!("Cyclotomic\norder: {order}\n"),
        Classification::ReducibleOrOther => "ReducibleOrOther\n".to_string(),
    }
}

/// One verdict per stdin line; indented witness lines are skipped. Exit 0
/// iff every line is Salem and agrees with its recorded `λ`.
fn check_stream(config: &RunConfig, out: &mut impl Write) -> Result<u8, Error> {
    let mut code = 0;
    for line in io::stdin().lock().lines() {
        let line = line.map_err(|e| io_err(std::path::Path::new("<stdin>"), e))?;
        if line.trim().is_empty() || line.starts_with(char::is_whitespace) {
            continue;
        }
        let (p, recorded) = parse_input(&line)?;
        let c = classify_with_bits(&p, config.precision_bits)?;
        let verdict = match (&c, recorded) {
            (Classification::Salem(r), Some(l)) if (r.lambda_f64() - l).abs() > 1e-12 * l => {
                code = NEGATIVE;
                format!(
                    "lambda mismatch ({} recorded, {} computed)",
                    l,
                    r.lambda_f64()
                )
            }
            (Classification::Salem(r), _) => format!("Salem {}", r.record_line()),
            (other, _) => {
                code = NEGATIVE;
                classification_text(other)
                    .lines()
                    .collect::<Vec<_>>()
                    .join(" ")
            }
        };
        writeln!(out, "{verdict}").map_err(stdout_err)?;
    }
    Ok(code)
}

fn cmd_sqroot(poly: &str, config: &RunConfig, out: &mut impl Write) -> Result<u8, Error> {
    let (p, _) = parse_input(poly)?;
    let record = match classify_with_bits(&p, config.precision_bits)? {
        Classification::Salem(r) => r,
        _ => return Err(Error::NotSalem(p.to_string())),
    };
    let found = find_decompositions(&record)?;
    let checked: Vec<_> = found.iter().map(|d| (d, verify_decomposition(d))).collect();
    match config.format {
        OutputFormat::Json => {
            let items: Vec<_> = checked
                .iter()
                .map(|(d, v)| {
                    json!({
                        "alpha": d.alpha,
                        "A": d.a.to_coeff_list(),
                        "B": d.b.to_coeff_list(),
                        "phi": d.witness_line().rsplit("; ").next().unwrap_or_default(),
                        "verified": v.is_ok(),
                    })
                })
                .collect();
            let v = json!({"record": record.record_line(), "witnesses": items});
            writeln!(out, "{}", serde_json::to_string_pretty(&v).unwrap()).map_err(stdout_err)?;
        }
        OutputFormat::Csv => {
            writeln!(out, "record: {}", record.record_line()).map_err(stdout_err)?;
            writeln!(out, "witnesses: {}", checked.len()).map_err(stdout_err)?;
            for (d, v) in &checked {
                let flag = match v {
                    Ok(()) => "verified".to_string(),
                    Err(f) => format!("FAILED ({f})"),
                };
                writeln!(out, "{}  {flag}", d.witness_line()).map_err(stdout_err)?;
            }
        }
    }
    let all_ok = checked.iter().all(|(_, v)| v.is_ok());
    Ok(if !checked.is_empty() && all_ok {
        0
    } else {
        NEGATIVE
    })
}
