//! Command-line front end for the frobstat experiments.

pub mod parse;
mod render;

use std::ffi::OsString;
use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use frobstat::exp::{
    field_for_order, run_bateman_horn, run_curve_sections, run_galois_detect, run_plane_intersections, run_q_scan,
    BHConfig, ExecOptions, ExpError, GaloisConfig, IntersectConfig, Mode, ScanConfig, ScanExperiment,
    SectionsConfig, DEFAULT_BUDGET,
};
use frobstat::groups::{full_cycle_probability, predict, GroupShape};
use frobstat::mpoly::IntBiPoly;
use frobstat::selftest;
use frobstat::stats::POOL_THRESHOLD;
use thiserror::Error;

use parse::{parse_poly, parse_poly_list, ParseError, VARS_T, VARS_TX};

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_HYPOTHESIS: u8 = 2;
pub const EXIT_INVARIANT: u8 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutFormat {
    Tsv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "frobstat", version, about = "Frobenius-class statistics of polynomial values over finite fields")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = OutFormat::Tsv, global = true)]
    out: OutFormat,
    /// Suppress warnings on standard error.
    #[arg(long, global = true)]
    quiet: bool,
    /// Treat violated hypotheses as errors (exit code 2).
    #[arg(long, global = true)]
    strict: bool,
    /// Worker threads (0: one per core). Results do not depend on this.
    #[arg(long, default_value_t = 0, global = true)]
    workers: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Traversal {
    /// Trial budget: enumerate every case when there are at most this many, otherwise draw this many samples.
    #[arg(long, conflicts_with = "exhaustive")]
    samples: Option<u64>,
    /// Enumerate every case.
    #[arg(long)]
    exhaustive: bool,
    /// Sample even when enumeration would fit in the budget.
    #[arg(long, requires = "samples")]
    force_sample: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl Traversal {
    fn mode(&self) -> Mode {
        match (self.exhaustive, self.samples, self.force_sample) {
            (true, _, _) => Mode::Exhaustive,
            (false, Some(n), true) => Mode::Sample(n),
            (false, Some(n), false) => Mode::Budget(n),
            (false, None, _) => Mode::Budget(DEFAULT_BUDGET),
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Predicted class distribution for a group shape.
    Predict {
        #[arg(long, value_delimiter = ',', required = true)]
        degrees: Vec<u32>,
        /// Defaults to 1 for every component.
        #[arg(long, value_delimiter = ',')]
        splittings: Option<Vec<u32>>,
    },
    /// Classes of F_i(t, f(t)) over polynomials f of degree n.
    Bh {
        /// A polynomial in t and x; repeat for several components.
        #[arg(long = "F", required = true)]
        polys: Vec<String>,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        q: u64,
        /// Splitting degrees, one per F (required when q is not prime).
        #[arg(long, value_delimiter = ',')]
        nu: Option<Vec<u32>>,
        #[command(flatten)]
        traversal: Traversal,
    },
    /// Classes of the intersection of two random plane curves.
    Intersect {
        #[arg(long)]
        d1: u32,
        #[arg(long)]
        d2: u32,
        #[arg(long)]
        q: u64,
        #[command(flatten)]
        traversal: Traversal,
    },
    /// Classes of f_0 + A_1 f_1 + ... + A_n f_n.
    Sections {
        /// Comma-separated polynomials in t.
        #[arg(long)]
        param: String,
        #[arg(long)]
        q: u64,
        #[command(flatten)]
        traversal: Traversal,
    },
    /// Chi-square test of the sections law against the symmetric group.
    Galois {
        #[arg(long)]
        param: String,
        #[arg(long, value_delimiter = ',', required = true)]
        q: Vec<u64>,
        #[arg(long, default_value_t = 1e-3)]
        alpha: f64,
        #[command(flatten)]
        traversal: Traversal,
    },
    /// Runs an experiment over several q and fits the decay exponent of the tv distance.
    Scan {
        #[arg(long = "exp", value_enum)]
        experiment: ScanKind,
        #[arg(long = "F")]
        polys: Vec<String>,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long, value_delimiter = ',')]
        nu: Option<Vec<u32>>,
        #[arg(long)]
        d1: Option<u32>,
        #[arg(long)]
        d2: Option<u32>,
        #[arg(long)]
        param: Option<String>,
        #[arg(long, value_delimiter = ',', required = true)]
        q: Vec<u64>,
        #[command(flatten)]
        traversal: Traversal,
    },
    /// Runs the oracle-equivalence suites.
    Selftest {
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ScanKind {
    Bh,
    Intersect,
    Sections,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("cannot parse {what} '{src}': {err}")]
    Parse { what: &'static str, src: String, err: ParseError },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Exp(#[from] ExpError),
    #[error("{0}")]
    Invariant(String),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Exp(e) if e.is_hypothesis_violation() => EXIT_HYPOTHESIS,
            CliError::Exp(e) if e.is_invariant_failure() => EXIT_INVARIANT,
            CliError::Invariant(_) => EXIT_INVARIANT,
            _ => EXIT_USAGE,
        }
    }
}

fn parse_f(src: &str) -> Result<IntBiPoly, CliError> {
    parse_poly(src, VARS_TX)
        .map(|p| p.to_int_bipoly())
        .map_err(|err| CliError::Parse { what: "polynomial", src: src.into(), err })
}

fn parse_param(src: &str) -> Result<Vec<IntBiPoly>, CliError> {
    parse_poly_list(src, VARS_T)
        .map(|l| l.iter().map(|p| p.to_int_bipoly()).collect())
        .map_err(|err| CliError::Parse { what: "parametrization", src: src.into(), err })
}

fn require<T>(value: Option<T>, flag: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("--{flag} is required for this experiment")))
}

fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let exec = ExecOptions::with_workers(cli.workers);
    let warn = |err: &mut dyn Write, warnings: &[String]| -> Result<(), CliError> {
        if !cli.quiet {
            for w in warnings {
                writeln!(err, "warning: {w}")?;
            }
        }
        Ok(())
    };
    match &cli.command {
        Command::Predict { degrees, splittings } => {
            let splittings = splittings.clone().unwrap_or_else(|| vec![1; degrees.len()]);
            let shape = GroupShape::new(degrees.clone(), splittings).map_err(ExpError::from)?;
            let law = predict(&shape).map_err(ExpError::from)?;
            let full = full_cycle_probability(&shape).map_err(ExpError::from)?;
            render::prediction(out, cli.out, &shape, &law, full)?;
        }
        Command::Bh { polys, n, q, nu, traversal } => {
            let field = field_for_order(*q)?;
            let polys = polys.iter().map(|s| parse_f(s).map(|p| p.bind(&field))).collect::<Result<_, _>>()?;
            let cfg = BHConfig {
                polys,
                n: *n,
                mode: traversal.mode(),
                seed: traversal.seed,
                strict: cli.strict,
                nu: nu.clone(),
                pool_threshold: POOL_THRESHOLD,
            };
            let report = run_bateman_horn(&cfg, &exec)?;
            warn(err, &report.warnings)?;
            render::report(out, cli.out, &report)?;
        }
        Command::Intersect { d1, d2, q, traversal } => {
            let cfg = IntersectConfig { mode: traversal.mode(), seed: traversal.seed, ..IntersectConfig::new(*d1, *d2, *q) };
            let report = run_plane_intersections(&cfg, &exec)?;
            warn(err, &report.warnings)?;
            render::report(out, cli.out, &report)?;
        }
        Command::Sections { param, q, traversal } => {
            let cfg = SectionsConfig { mode: traversal.mode(), seed: traversal.seed, ..SectionsConfig::new(parse_param(param)?, *q) };
            let report = run_curve_sections(&cfg, &exec)?;
            warn(err, &report.warnings)?;
            render::report(out, cli.out, &report)?;
        }
        Command::Galois { param, q, alpha, traversal } => {
            let cfg = GaloisConfig {
                mode: traversal.mode(),
                seed: traversal.seed,
                ..GaloisConfig::new(parse_param(param)?, q.clone(), *alpha)
            };
            let report = run_galois_detect(&cfg, &exec)?;
            warn(err, &report.warnings)?;
            render::galois(out, cli.out, &report)?;
        }
        Command::Scan { experiment, polys, n, nu, d1, d2, param, q, traversal } => {
            let experiment = match experiment {
                ScanKind::Bh => {
                    if polys.is_empty() {
                        return Err(CliError::Usage("--F is required for this experiment".into()));
                    }
                    ScanExperiment::BatemanHorn {
                        polys: polys.iter().map(|s| parse_f(s)).collect::<Result<_, _>>()?,
                        n: require(*n, "n")?,
                        nu: nu.clone(),
                    }
                }
                ScanKind::Intersect => ScanExperiment::Intersections { d1: require(*d1, "d1")?, d2: require(*d2, "d2")? },
                ScanKind::Sections => ScanExperiment::Sections { param: parse_param(require(param.as_ref(), "param")?)? },
            };
            let cfg = ScanConfig {
                mode: traversal.mode(),
                seed: traversal.seed,
                strict: cli.strict,
                ..ScanConfig::new(experiment, q.clone())
            };
            let report = run_q_scan(&cfg, &exec)?;
            warn(err, &report.warnings)?;
            for r in &report.reports {
                warn(err, &r.warnings)?;
            }
            render::scan(out, cli.out, &report)?;
        }
        Command::Selftest { seed } => {
            let outcomes = selftest::run_all(*seed);
            render::selftest(out, cli.out, &outcomes)?;
            let failed: Vec<&str> = outcomes.iter().filter(|o| !o.passed()).map(|o| o.name).collect();
            if !failed.is_empty() {
                return Err(CliError::Invariant(format!("failed suites: {}", failed.join(", "))));
            }
        }
    }
    Ok(())
}

/// Parses `args` (program name first), runs the command, and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli, out, err) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
