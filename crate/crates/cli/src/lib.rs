//! Command-line front end for `otlab`. Every subcommand parses its inputs,
//! calls one library operation and renders the result unchanged.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use num_rational::Ratio;
use serde::Serialize;

use otlab::admissible::{greedy_admissible_submatrix_within, AdmissibleResult, ADMISSIBLE_BUDGET};
use otlab::exact::parse_rational;
use otlab::figure::{block_points, figure_csv, figure_region_scan_within, FigurePoint, ScanMode, FIGURE_BUDGET};
use otlab::fourier::{
    lemma41_monte_carlo, lemma41_probability_within, prop43_check_within, Lemma41Report, MonteCarlo, Prop43Report,
    ENUMERATION_BUDGET, SPECTRUM_BUDGET,
};
use otlab::modlinalg::{all_columns_matrix, block_construction, ModMatrix};
use otlab::numtheory::{bound_table, Bound, BoundReport};
use otlab::oddtown::{certify, singleton_family, split, support_reduce, verify_family, SetFamily, Verdict};
use otlab::solver::{max_oddtown, NODE_BUDGET};
use otlab::{par, ErrorKind};

pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Parser)]
#[command(name = "otlab", version, about = "Exact computations on modular Oddtown families")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Worker threads for parallel operations; 0 uses every core.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    /// Report destination; `-` is standard output.
    #[arg(long, global = true, default_value = "-")]
    pub output: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Overrides the operation's enumeration budget (node budget for `solve`).
    #[arg(long, global = true, env = "OTLAB_BUDGET", value_parser = clap::value_parser!(u64).range(1..))]
    pub budget: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Construction {
    Singletons,
    Block,
    AllColumns,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the Oddtown conditions.
    Verify {
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        ell: u64,
    },
    /// Per-prime certificate of a valid family.
    Certify {
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        ell: u64,
    },
    /// Split by divisibility of set sizes by the `index`-th prime power of ell.
    Split {
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        ell: u64,
        /// 0-based, primes increasing.
        #[arg(long, default_value_t = 0)]
        index: usize,
    },
    /// Closed-form upper bounds on family size.
    Bounds {
        #[arg(long)]
        ell: u64,
        #[arg(long)]
        n: u64,
    },
    /// Largest family on [n] by exhaustive search.
    Solve {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        ell: u64,
    },
    /// Spectrum bound and 0–1 image probability for a matrix over F_p.
    FourierCheck {
        #[arg(long)]
        matrix: PathBuf,
        /// Reinterpret the entries modulo this prime.
        #[arg(long)]
        p: Option<u64>,
        /// Also estimate the probability from this many samples.
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Greedy maximal σ-admissible column submatrix and its lower bound.
    Admissible {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        p: Option<u64>,
        /// Rational threshold such as `1/2` or `0.25`.
        #[arg(long)]
        sigma: String,
    },
    /// Emit a standard family or matrix.
    Construct {
        #[arg(value_enum)]
        kind: Construction,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        a: Option<usize>,
        #[arg(long)]
        b: Option<usize>,
    },
    /// Achievable (log r / d, log c / d) points plus block-construction points.
    FigureData {
        #[arg(long, default_value_t = 3)]
        max_r: usize,
        #[arg(long, default_value_t = 3)]
        max_c: usize,
        #[arg(long, default_value_t = 3)]
        p: u64,
        #[arg(long, default_value_t = 3)]
        max_block: usize,
        /// Random matrices per shape instead of exhaustive enumeration.
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Shrink the ground set while preserving all congruences.
    Reduce {
        #[arg(long)]
        family: PathBuf,
        #[arg(long)]
        ell: u64,
    },
}

/// Rendered report and the exit status it implies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rendered {
    pub body: String,
    pub exit: i32,
}

#[derive(Debug, Serialize)]
pub struct SplitReport {
    pub index: usize,
    pub prime_power: u64,
    pub not_divisible: SetFamily,
    pub divisible: SetFamily,
}

#[derive(Debug, Serialize)]
pub struct FourierReport {
    pub prop43: Prop43Report,
    pub lemma41: Lemma41Report,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub monte_carlo: Option<MonteCarlo>,
}

#[derive(Debug, Serialize)]
pub struct FigureReport {
    pub p: u64,
    pub points: Vec<FigurePoint>,
}

pub fn json<T: Serialize>(value: &T) -> anyhow::Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

pub fn read_family(path: &Path) -> anyhow::Result<SetFamily> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(SetFamily::parse_json(&text)?)
}

pub fn read_matrix(path: &Path, p: Option<u64>) -> anyhow::Result<ModMatrix> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let m = ModMatrix::from_csv(&text)?;
    Ok(match p {
        Some(p) => m.with_modulus(p)?,
        None => m,
    })
}

fn bound_cell(b: &Bound) -> String {
    b.value().map_or_else(|| "NA".to_string(), |v| v.to_string())
}

fn bounds_csv(r: &BoundReport) -> String {
    format!(
        "modulus,n,omega,trivial,szegedy,thm11,thm12,epsilon\n{},{},{},{},{},{},{},{}/{}\n",
        r.modulus,
        r.n,
        r.omega,
        r.trivial,
        bound_cell(&r.szegedy),
        bound_cell(&r.thm11),
        bound_cell(&r.thm12),
        r.epsilon.numer(),
        r.epsilon.denom()
    )
}

/// Executes the subcommand and renders its report.
pub fn execute(cli: &Cli) -> anyhow::Result<Rendered> {
    let ok = |body: String| Rendered { body, exit: 0 };
    let csv_unsupported = |name: &str| -> anyhow::Result<Rendered> {
        bail!(otlab::Error::InvalidArgument(format!("{name} has no CSV output")))
    };
    let csv = cli.format == Format::Csv;
    let budget = |default: u64| cli.budget.unwrap_or(default);
    match &cli.command {
        Command::Verify { family, ell } => {
            if csv {
                return csv_unsupported("verify");
            }
            let verdict = verify_family(&read_family(family)?, *ell)?;
            let exit = if matches!(verdict, Verdict::Valid) { 0 } else { 1 };
            Ok(Rendered { body: json(&verdict)?, exit })
        }
        Command::Certify { family, ell } => {
            if csv {
                return csv_unsupported("certify");
            }
            Ok(ok(json(&certify(&read_family(family)?, *ell)?)?))
        }
        Command::Split { family, ell, index } => {
            if csv {
                return csv_unsupported("split");
            }
            let (not_divisible, divisible) = split(&read_family(family)?, *ell, *index)?;
            let prime_power = otlab::numtheory::factorize(*ell)?.factors[*index].value();
            Ok(ok(json(&SplitReport { index: *index, prime_power, not_divisible, divisible })?))
        }
        Command::Bounds { ell, n } => {
            let report = bound_table(*ell, *n)?;
            Ok(ok(if csv { bounds_csv(&report) } else { json(&report)? }))
        }
        Command::Solve { n, ell } => {
            if csv {
                return csv_unsupported("solve");
            }
            let result = max_oddtown(*n, *ell, budget(NODE_BUDGET))?;
            let exit = if result.optimal { 0 } else { 2 };
            Ok(Rendered { body: json(&result)?, exit })
        }
        Command::FourierCheck { matrix, p, samples, seed } => {
            if csv {
                return csv_unsupported("fourier-check");
            }
            let l = read_matrix(matrix, *p)?;
            let prop43 = prop43_check_within(&l, budget(ENUMERATION_BUDGET), budget(SPECTRUM_BUDGET))?;
            let lemma41 = lemma41_probability_within(&l, budget(ENUMERATION_BUDGET))?;
            let monte_carlo = samples.map(|s| lemma41_monte_carlo(&l, s, *seed)).transpose()?;
            Ok(ok(json(&FourierReport { prop43, lemma41, monte_carlo })?))
        }
        Command::Admissible { matrix, p, sigma } => {
            if csv {
                return csv_unsupported("admissible");
            }
            let l = read_matrix(matrix, *p)?;
            let sigma: Ratio<i64> = parse_rational(sigma)?;
            let result: AdmissibleResult = greedy_admissible_submatrix_within(&l, &sigma, budget(ADMISSIBLE_BUDGET))?;
            Ok(ok(json(&result)?))
        }
        Command::Construct { kind, n, a, b } => {
            let need = |v: &Option<usize>, flag: &str| {
                v.ok_or_else(|| otlab::Error::InvalidArgument(format!("construct {kind:?} needs --{flag}")))
            };
            match kind {
                Construction::Singletons => {
                    if csv {
                        return csv_unsupported("construct singletons");
                    }
                    Ok(ok(json(&singleton_family(need(n, "n")?)?)?))
                }
                Construction::Block | Construction::AllColumns => {
                    let m = if *kind == Construction::Block {
                        block_construction(need(a, "a")?, need(b, "b")?)?
                    } else {
                        all_columns_matrix(need(n, "n")?)?
                    };
                    Ok(ok(if csv { m.to_csv() } else { json(&m)? }))
                }
            }
        }
        Command::FigureData { max_r, max_c, p, max_block, samples, seed } => {
            let mode = match samples {
                Some(s) => ScanMode::Sampled { samples: *s, seed: *seed },
                None => ScanMode::Exhaustive,
            };
            let mut points = figure_region_scan_within(*max_r, *max_c, *p, mode, budget(FIGURE_BUDGET))?;
            if *max_block > 0 {
                points.extend(block_points(*max_block, *p)?);
            }
            Ok(ok(if csv { figure_csv(&points) } else { json(&FigureReport { p: *p, points })? }))
        }
        Command::Reduce { family, ell } => {
            if csv {
                return csv_unsupported("reduce");
            }
            Ok(ok(json(&support_reduce(&read_family(family)?, *ell)?)?))
        }
    }
}

/// Exit status for a failed run: 2 for budget errors, 1 otherwise.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    match err.downcast_ref::<otlab::Error>() {
        Some(e) if e.kind() == ErrorKind::Resource => 2,
        _ => 1,
    }
}

/// Runs the command on the requested number of threads and writes the report.
pub fn run(cli: &Cli) -> i32 {
    let result = par::with_threads(cli.threads, || execute(cli));
    match result.and_then(|r| write_report(&cli.output, &r.body).map(|_| r.exit)) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            exit_code(&err)
        }
    }
}

fn write_report(path: &Path, body: &str) -> anyhow::Result<()> {
    if path.as_os_str() == "-" {
        use std::io::Write;
        let mut out = std::io::stdout().lock();
        out.write_all(body.as_bytes())?;
        out.flush()?;
    } else {
        fs::write(path, body).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}
