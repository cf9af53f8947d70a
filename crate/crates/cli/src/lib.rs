//! Command-line front end: instance files, checks and reports.

pub mod instance;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};
use poisore::extension::{
    build_double_poisson_ore_unchecked, build_poisson_ore_single_unchecked, check_dedata, check_poisson_ore,
    ConditionReport,
};
use poisore::verify::{run_suite, CheckStatus, Suite, SuiteOptions, VerdictReport, VerifyError};
use poisore::{EnvAlgebra, JacobiVerdict, PoissonAlgebra};

pub use instance::{load_instance, parse_instance, Extension, InstanceError, InstanceFile};
pub use report::{emit_report, Format};

#[derive(Parser, Debug)]
#[command(
    name = "poisore",
    version,
    about = "Poisson enveloping algebras of double Poisson-Ore extensions"
)]
struct Cli {
    /// Report format.
    #[arg(long, value_enum, default_value = "text", global = true)]
    format: Format,
    /// Print every elapsed time as 0 ms.
    #[arg(long, global = true)]
    no_timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the Jacobi identity of the base bracket on generator triples.
    CheckJacobi { file: PathBuf },
    /// Check the extension data of a `dedata` or `ore` instance.
    CheckDedata { file: PathBuf },
    /// Print the normal form of a product in the enveloping algebra.
    Nf { file: PathBuf, expr: String },
    /// Run verification suites on the enveloping algebra.
    Verify {
        file: PathBuf,
        #[arg(long, default_value = "all", value_parser = clap::builder::PossibleValuesParser::new(Suite::NAMES))]
        suite: String,
        #[arg(long, default_value_t = poisore::verify::DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = poisore::verify::DEFAULT_DEGREE)]
        degree: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Exit status: all checks passed.
pub const EXIT_PASS: i32 = 0;
/// Exit status: at least one check failed.
pub const EXIT_FAIL: i32 = 1;
/// Exit status: bad usage or unreadable input.
pub const EXIT_USAGE: i32 = 2;

fn report(name: &str, start: Instant, failure: Option<String>) -> VerdictReport {
    VerdictReport {
        name: name.to_string(),
        status: if failure.is_some() {
            CheckStatus::Fail
        } else {
            CheckStatus::Pass
        },
        witness: failure,
        elapsed: start.elapsed(),
    }
}

fn jacobi_report(name: &str, p: &mut PoissonAlgebra) -> VerdictReport {
    let start = Instant::now();
    let failure = match p.check_jacobi() {
        JacobiVerdict::Pass => None,
        JacobiVerdict::Fail {
            triple: (i, j, k),
            defect,
        } => {
            let v = p.vars();
            Some(format!(
                "({}, {}, {}): {}",
                v.name(i),
                v.name(j),
                v.name(k),
                defect
            ))
        }
    };
    report(name, start, failure)
}

fn condition_reports(prefix: &str, start: Instant, r: &ConditionReport) -> Vec<VerdictReport> {
    r.conditions
        .iter()
        .map(|c| report(&format!("{prefix}-{}", c.condition), start, c.witness()))
        .collect()
}

enum Outcome {
    Reports(Vec<VerdictReport>),
    Usage(String),
}

fn failed(reports: &[VerdictReport]) -> Vec<VerdictReport> {
    reports.iter().filter(|r| !r.passed()).cloned().collect()
}

/// Builds the enveloping algebra, or returns the failing prerequisite checks.
fn prepare(inst: InstanceFile) -> Result<EnvAlgebra, Outcome> {
    let mut base = inst.algebra;
    let jacobi = jacobi_report("jacobi", &mut base);
    if !jacobi.passed() {
        return Err(Outcome::Reports(vec![jacobi]));
    }
    let usage = |e: &dyn std::fmt::Display| Outcome::Usage(e.to_string());
    match inst.extension {
        Extension::None => EnvAlgebra::plain(base).map_err(|e| usage(&e)),
        Extension::Double(d) => {
            let start = Instant::now();
            let r = check_dedata(&base, &d).map_err(|e| usage(&e))?;
            if !r.passed() {
                return Err(Outcome::Reports(failed(&condition_reports("dedata", start, &r))));
            }
            EnvAlgebra::double(&base, &d).map_err(|e| usage(&e))
        }
        Extension::Single(s) => {
            let start = Instant::now();
            let r = check_poisson_ore(&base, &s).map_err(|e| usage(&e))?;
            if !r.passed() {
                return Err(Outcome::Reports(failed(&condition_reports("ore", start, &r))));
            }
            EnvAlgebra::single(&base, &s).map_err(|e| usage(&e))
        }
    }
}

fn check_dedata_command(inst: InstanceFile) -> Outcome {
    let mut base = inst.algebra;
    let jacobi = jacobi_report("jacobi", &mut base);
    if !jacobi.passed() {
        return Outcome::Reports(vec![jacobi]);
    }
    let mut reports = vec![jacobi];
    let start = Instant::now();
    let (conditions, extended) = match &inst.extension {
        Extension::None => {
            return Outcome::Usage("instance has no `dedata` or `ore` section".into());
        }
        Extension::Double(d) => (
            check_dedata(&base, d).map(|r| condition_reports("dedata", start, &r)),
            build_double_poisson_ore_unchecked(&base, d),
        ),
        Extension::Single(s) => (
            check_poisson_ore(&base, s).map(|r| condition_reports("ore", start, &r)),
            build_poisson_ore_single_unchecked(&base, s, "x"),
        ),
    };
    match (conditions, extended) {
        (Ok(c), Ok(mut ext)) => {
            reports.extend(c);
            reports.push(jacobi_report("extension-jacobi", &mut ext));
            Outcome::Reports(reports)
        }
        (Err(e), _) | (_, Err(e)) => Outcome::Usage(e.to_string()),
    }
}

fn verify_command(inst: InstanceFile, suite: &str, opts: SuiteOptions) -> Outcome {
    let env = match prepare(inst) {
        Ok(env) => env,
        Err(o) => return o,
    };
    let suite = Suite::from_name(suite).expect("validated by the argument parser");
    match run_suite(&env, suite, opts) {
        Ok(r) => Outcome::Reports(r),
        Err(VerifyError::Layer(msg)) => Outcome::Usage(format!("suite not applicable: {msg}")),
        Err(e) => Outcome::Usage(e.to_string()),
    }
}

/// Runs one command line; returns the process exit status. Results go to
/// `out`, diagnostics to `err`.
pub fn run_command<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = sink.write_all(rendered.as_bytes());
            return code;
        }
    };
    let load = |file: &PathBuf| load_instance(file);
    let outcome = match &cli.command {
        Command::CheckJacobi { file } => match load(file) {
            Ok(mut inst) => Outcome::Reports(vec![jacobi_report("jacobi", &mut inst.algebra)]),
            Err(e) => Outcome::Usage(e.to_string()),
        },
        Command::CheckDedata { file } => match load(file) {
            Ok(inst) => check_dedata_command(inst),
            Err(e) => Outcome::Usage(e.to_string()),
        },
        Command::Nf { file, expr } => match load(file)
            .map_err(|e| Outcome::Usage(e.to_string()))
            .and_then(prepare)
        {
            Ok(env) => match env.parse_element(expr) {
                Ok(u) => {
                    let _ = writeln!(out, "{}", env.render(&u));
                    return EXIT_PASS;
                }
                Err(e) => Outcome::Usage(e.to_string()),
            },
            Err(o) => o,
        },
        Command::Verify {
            file,
            suite,
            samples,
            degree,
            seed,
        } => match load(file) {
            Ok(inst) => verify_command(
                inst,
                suite,
                SuiteOptions {
                    samples: *samples,
                    degree: *degree,
                    seed: *seed,
                },
            ),
            Err(e) => Outcome::Usage(e.to_string()),
        },
    };
    match outcome {
        Outcome::Reports(reports) => {
            let _ = out.write_all(emit_report(&reports, cli.format, !cli.no_timing).as_bytes());
            if reports.iter().all(VerdictReport::passed) {
                EXIT_PASS
            } else {
                EXIT_FAIL
            }
        }
        Outcome::Usage(msg) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
    }
}
