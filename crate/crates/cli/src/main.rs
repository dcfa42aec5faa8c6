mod commands;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use cjde_core::instance::{load_instance, LoadedInstance};

use commands::{EtaSource, InputError};
use report::Report;

/// Exact verification of split Courant–Jacobi algebroids and their deformations.
#[derive(Parser)]
#[command(name = "cjde", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the Courant–Jacobi axioms and {Θ,Θ} = 0.
    Check { file: PathBuf },
    /// Analyse a deformation: MC equation, graph involutivity, Kuranishi class, formal extension.
    Deform {
        file: PathBuf,
        #[arg(long, conflicts_with = "random", required_unless_present = "random")]
        eta: Option<String>,
        #[arg(long)]
        random: Option<u64>,
        #[arg(long, default_value_t = 4)]
        order: usize,
    },
    /// Change the complement by ε and check the induced L∞ isomorphism.
    Complement {
        file: PathBuf,
        #[arg(long)]
        epsilon: String,
        #[arg(long, default_value_t = 5)]
        trunc: usize,
        #[arg(long, hide = true)]
        corrupt_m2: bool,
    },
    /// Cohomology of the de Rham complex of the instance (point base only).
    Cohomology {
        file: PathBuf,
        #[arg(long)]
        degree: Option<usize>,
    },
    /// Seeded property checks on built-in and random instances.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn load(path: &Path) -> Result<LoadedInstance, InputError> {
    load_instance(path).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn run(cmd: Cmd, r: &mut Report) -> Result<(), InputError> {
    match cmd {
        Cmd::Check { file } => commands::check(&load(&file)?, r),
        Cmd::Deform { file, eta, random, order } => {
            let src = match (eta, random) {
                (Some(n), _) => EtaSource::Named(n),
                (None, Some(s)) => EtaSource::Random(s),
                (None, None) => unreachable!("clap requires one of --eta/--random"),
            };
            commands::deform(&load(&file)?, src, order, r)?
        }
        Cmd::Complement { file, epsilon, trunc, corrupt_m2 } => commands::complement(&load(&file)?, &epsilon, trunc, corrupt_m2, r)?,
        Cmd::Cohomology { file, degree } => commands::cohomology_cmd(&load(&file)?, degree, r)?,
        Cmd::Selftest { seed } => commands::selftest(seed, r),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut report = Report::default();
    if let Err(e) = run(cli.cmd, &mut report) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let text = match cli.format {
        Format::Json => report.render_json(),
        Format::Text => report.render_text(),
    };
    match &cli.out {
        Some(p) => {
            if let Err(e) = std::fs::write(p, &text) {
                eprintln!("error: {}: {e}", p.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    ExitCode::from(if report.failed() { 1 } else { 0 })
}
