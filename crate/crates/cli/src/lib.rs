//! Command-line surface of `stepharm`: argument parsing, table output and
//! the oracle report. The binary is a thin wrapper around [`run`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
pub mod commands;
pub mod output;
pub mod verify;

use std::ffi::OsString;
use std::fs;

use clap::Parser;
use serde_json::{json, Map};
use stepharm::special_fn::Lanczos;

use args::{Cli, Command, Fault, Format};
use output::{emit, sidecar, RunManifest};

/// Failure classes, each with its own exit status.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    VerificationFailed,
    BadArgs(String),
    MissingLevel(String),
    Numerical(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::VerificationFailed => 1,
            CliError::BadArgs(_) | CliError::Io(_) => 2,
            CliError::MissingLevel(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::VerificationFailed => write!(f, "verification failed"),
            CliError::BadArgs(m) => write!(f, "invalid arguments: {m}"),
            CliError::MissingLevel(m) => write!(f, "{m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(m) => write!(f, "cannot write output: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<stepharm::Error> for CliError {
    fn from(e: stepharm::Error) -> Self {
        match e {
            stepharm::Error::Domain(_) | stepharm::Error::InvalidConfig(_) => CliError::BadArgs(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

/// Parses `STEPHARM_THREADS`: unset, empty or 0 means one thread per core.
pub fn thread_count(value: Option<&str>) -> Result<usize, CliError> {
    match value.map(str::trim) {
        None | Some("") => Ok(0),
        Some(v) => v
            .parse::<usize>()
            .map_err(|_| CliError::BadArgs(format!("STEPHARM_THREADS must be a non-negative integer, got {v:?}"))),
    }
}

fn configure_threads() -> Result<(), CliError> {
    let n = thread_count(std::env::var("STEPHARM_THREADS").ok().as_deref())?;
    // a pool built earlier in the same process is kept
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Runs one invocation and returns the process exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            if e != CliError::VerificationFailed {
                eprintln!("stepharm: {e}");
            }
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    configure_threads()?;
    let dest = cli.output.as_deref();
    if let Command::Verify { report, inject_fault } = &cli.command {
        let kernel = match inject_fault {
            Some(Fault::Gamma) => verify::corrupted_kernel(),
            None => Lanczos::G7,
        };
        let checks = verify::run_checks(&kernel);
        print!("{}", verify::report_text(&checks));
        let mut params = Map::new();
        params.insert("inject_fault".into(), json!(inject_fault.map(|_| "gamma")));
        let manifest = RunManifest::new("verify", params);
        let table = verify::report_table(&checks);
        fs::write(report, table.to_json(&manifest)).map_err(|e| CliError::Io(format!("{}: {e}", report.display())))?;
        return if checks.iter().all(verify::Check::passed) { Ok(()) } else { Err(CliError::VerificationFailed) };
    }

    let config = cli.units.resolve()?;
    let mut params = commands::unit_parameters(&config);
    let (name, table) = match &cli.command {
        Command::Levels => ("levels", commands::levels(&config)?),
        Command::Delay { beta_min, beta_max, steps } => {
            params.insert("beta_min".into(), json!(beta_min));
            params.insert("beta_max".into(), json!(beta_max));
            params.insert("steps".into(), json!(steps));
            ("delay", commands::delay(&config, *beta_min, *beta_max, *steps)?)
        }
        Command::Eigenfunction { n, x_min, x_max, points } => {
            params.insert("n".into(), json!(n));
            params.insert("x_min".into(), json!(x_min));
            params.insert("x_max".into(), json!(x_max));
            params.insert("points".into(), json!(points));
            ("eigenfunction", commands::eigenfunction(&config, *n, *x_min, *x_max, *points)?)
        }
        Command::Resonances { beta_max } => {
            params.insert("beta_max".into(), json!(beta_max));
            ("resonances", commands::resonances(&config, *beta_max)?)
        }
        Command::Wavepacket(args) => {
            let spec = commands::packet_spec(&config, args)?;
            params.insert("k_center".into(), json!(spec.k_center));
            params.insert("sigma_k".into(), json!(spec.sigma_k));
            params.insert("x_start".into(), json!(spec.x_start));
            params.insert("t_max".into(), json!(args.t_max));
            params.insert("frames".into(), json!(args.frames));
            params.insert("points".into(), json!(args.points));
            params.insert("include_interior".into(), json!(args.include_interior));
            params.insert("mirror".into(), json!(args.mirror));
            let run = commands::wavepacket(&config, args)?;
            let manifest = RunManifest::new("wavepacket", params);
            match (&args.summary, cli.format) {
                (Some(path), Format::Csv) => emit(&run.summary, &manifest, Format::Csv, Some(path))?,
                (Some(path), Format::Json) => {
                    fs::write(path, run.summary.to_json(&manifest))
                        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
                }
                (None, _) => eprint!("summary\n{}", run.summary.to_csv()),
            }
            return emit(&run.frames, &manifest, cli.format, dest);
        }
        Command::Verify { .. } => unreachable!("handled above"),
    };
    let manifest = RunManifest::new(name, params);
    emit(&table, &manifest, cli.format, dest)
}

/// Path of the manifest written next to a CSV output.
pub fn manifest_path(output: &std::path::Path) -> std::path::PathBuf {
    sidecar(output, ".manifest.json")
}
