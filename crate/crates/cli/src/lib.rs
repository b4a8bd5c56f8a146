//! Command-line driver: identity suites, exact Gaussian moments and
//! fourth-moment experiments.

pub mod experiment;
pub mod oracle;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use chaos_core::convert::{h2j_table, ConversionTable};
use chaos_core::exact::format_complex;
use chaos_core::exec::Execution;
use chaos_core::identities::{run_identities, HermiteSource, MAX_DEGREE};
use clap::{Parser, Subcommand};

use experiment::{ExperimentConfig, ExperimentError};
use oracle::OracleError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_IDENTITY: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;
pub const EXIT_NO_INPUT: i32 = 66;

#[derive(Debug, Parser)]
#[command(name = "chaos", version, about = "Complex Wiener chaos identities, Gaussian moments and fourth-moment experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run every exact and pathwise identity suite up to a degree.
    Identities {
        #[arg(long, default_value_t = 6)]
        max_degree: u32,
        #[arg(long)]
        out: PathBuf,
        /// Perturb J_{m,n} (given as `m,n`) to exercise the failure path.
        #[arg(long, hide = true, value_parser = parse_pair)]
        tamper: Option<(u32, u32)>,
    },
    /// Print the exact expectation described by an expression file.
    Oracle { file: PathBuf },
    /// Run a JSON-configured experiment.
    Experiment {
        config: PathBuf,
        /// Output directory; overrides `output` in the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Size of a dedicated worker pool; results do not depend on it.
        #[arg(long, conflicts_with = "sequential")]
        workers: Option<usize>,
        #[arg(long)]
        sequential: bool,
    },
}

fn parse_pair(s: &str) -> Result<(u32, u32), String> {
    let (a, b) = s.split_once(',').ok_or("expected `m,n`")?;
    Ok((
        a.trim().parse().map_err(|_| format!("bad index `{a}`"))?,
        b.trim().parse().map_err(|_| format!("bad index `{b}`"))?,
    ))
}

/// Output of one invocation: exit code plus what goes to stdout and stderr.
#[derive(Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Self { code: EXIT_OK, stdout, stderr: String::new() }
    }

    fn fail(code: i32, stderr: String) -> Self {
        Self { code, stdout: String::new(), stderr }
    }
}

/// Parses arguments (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK { Outcome::ok(text) } else { Outcome::fail(code, text) };
        }
    };
    match cli.command {
        Command::Identities { max_degree, out, tamper } => cmd_identities(max_degree, &out, tamper),
        Command::Oracle { file } => cmd_oracle(&file),
        Command::Experiment { config, out, workers, sequential } => {
            let exec = match (workers, sequential) {
                (_, true) => Some(Execution::Sequential),
                (Some(0), _) => return Outcome::fail(EXIT_USAGE, "--workers must be positive\n".into()),
                (Some(w), _) => Some(Execution::Workers(w)),
                (None, false) => None,
            };
            cmd_experiment(&config, out.as_deref(), exec)
        }
    }
}

fn table_csv(t: &ConversionTable) -> String {
    let mut s = String::from("row,col,coefficient\n");
    for (i, row) in t.rows().iter().enumerate() {
        for (j, c) in row.iter().enumerate() {
            s.push_str(&format!("{i},{j},{}\n", format_complex(c)));
        }
    }
    s
}

pub fn cmd_identities(max_degree: u32, out: &Path, tamper: Option<(u32, u32)>) -> Outcome {
    if max_degree > MAX_DEGREE {
        return Outcome::fail(
            EXIT_USAGE,
            format!("--max-degree {max_degree} exceeds the symbolic budget of {MAX_DEGREE}\n"),
        );
    }
    let src = match tamper {
        Some((m, n)) => HermiteSource::tampered(m, n),
        None => HermiteSource::standard(),
    };
    let report = match run_identities(max_degree, &src) {
        Ok(r) => r,
        Err(e) => return Outcome::fail(EXIT_FAILURE, format!("{e}\n")),
    };
    let text = report.to_text();
    let write = || -> std::io::Result<()> {
        fs::create_dir_all(out)?;
        fs::write(out.join("identities.txt"), &text)?;
        for n in 0..=max_degree {
            let t = h2j_table(n);
            fs::write(out.join(format!("h2j_complex_to_real_{n}.csv")), table_csv(&t.complex_to_real))?;
            fs::write(out.join(format!("h2j_real_to_complex_{n}.csv")), table_csv(&t.real_to_complex))?;
        }
        Ok(())
    };
    if let Err(e) = write() {
        return Outcome::fail(EXIT_FAILURE, format!("writing {}: {e}\n", out.display()));
    }
    if report.pass() {
        Outcome::ok(text)
    } else {
        Outcome {
            code: EXIT_IDENTITY,
            stdout: text,
            stderr: format!("failing identities: {}\n", report.failing().join(", ")),
        }
    }
}

pub fn cmd_oracle(file: &Path) -> Outcome {
    let text = match fs::read_to_string(file) {
        Ok(t) => t,
        Err(e) => return Outcome::fail(EXIT_NO_INPUT, format!("{}: {e}\n", file.display())),
    };
    match oracle::evaluate(&text) {
        Ok(v) => Outcome::ok(format!("{}\n", format_complex(&v))),
        Err(e @ OracleError::Parse { .. }) => Outcome::fail(EXIT_DATA, format!("parse error: {e}\n")),
        Err(e @ OracleError::Budget { .. }) => Outcome::fail(EXIT_USAGE, format!("{e}\n")),
        Err(e @ OracleError::Core(chaos_core::ChaosError::DegreeBudget { .. })) => {
            Outcome::fail(EXIT_USAGE, format!("{e}\n"))
        }
        Err(e) => Outcome::fail(EXIT_FAILURE, format!("{e}\n")),
    }
}

fn experiment_code(e: &ExperimentError) -> i32 {
    match e {
        ExperimentError::Config(_) => EXIT_DATA,
        ExperimentError::MissingFile { .. } => EXIT_NO_INPUT,
        ExperimentError::Execution(_) => EXIT_FAILURE,
    }
}

pub fn cmd_experiment(config: &Path, out: Option<&Path>, exec: Option<Execution>) -> Outcome {
    let fail = |e: ExperimentError| Outcome::fail(experiment_code(&e), format!("{e}\n"));
    let cfg = match ExperimentConfig::load(config) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    let base = config.parent().unwrap_or(Path::new("."));
    let Some(out) = out.map(Path::to_path_buf).or_else(|| cfg.output.as_ref().map(|p| base.join(p))) else {
        return Outcome::fail(EXIT_USAGE, "no output directory: pass --out or set `output`\n".into());
    };
    let exec = exec.unwrap_or(match cfg.workers {
        Some(w) if w > 0 => Execution::Workers(w),
        _ => Execution::Parallel,
    });
    let result = experiment::run(&cfg, base, exec).and_then(|o| {
        experiment::write_outputs(&out, &o)?;
        Ok(o)
    });
    match result {
        Ok(o) => Outcome::ok(format!("{}\nwrote {}\n", experiment::summary(&o), out.display())),
        Err(e) => fail(e),
    }
}
