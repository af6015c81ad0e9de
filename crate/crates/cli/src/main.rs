//! `scatterbound`: exact values, numeric solutions and bounds for 1-D scattering.

mod commands;
mod doc;
mod error;
mod grid;
mod table;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{GreybodyArgs, Output, Settings};
use error::CliError;
use grid::Grid;
use table::Format;

#[derive(Debug, Parser)]
#[command(
    name = "scatterbound",
    version,
    about = "Transmission probabilities and rigorous bounds for one-dimensional scattering"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    format: Format,

    /// Write to this file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Relative tolerance for integration and quadrature.
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(Debug, Args)]
struct PotentialGrid {
    /// Potential document: a TOML file, or inline `kind=delta,g=2`.
    #[arg(long)]
    potential: String,

    /// Energy grid `lo:hi:n[:log]`, or a single energy.
    #[arg(long)]
    energy: Grid,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Closed-form T and R for solvable families.
    Exact(PotentialGrid),
    /// Numeric T, R and Bogoliubov magnitudes.
    Solve(PotentialGrid),
    /// Bounds on T by identifier.
    Bound {
        #[command(flatten)]
        target: PotentialGrid,
        /// Comma-separated bound ids, or `all` for every applicable bound.
        #[arg(long, default_value = "all")]
        bounds: String,
    },
    /// Bounds and numeric greybody factors for Schwarzschild black holes.
    Greybody {
        #[arg(long, default_value_t = 1.0)]
        mass: f64,
        #[arg(long)]
        spin: u32,
        #[arg(long)]
        ell: u32,
        /// A single frequency.
        #[arg(long, conflicts_with = "sweep", required_unless_present = "sweep")]
        omega: Option<f64>,
        /// Frequency grid `lo:hi:n[:log]`.
        #[arg(long)]
        sweep: Option<Grid>,
    },
    /// Brackets T for a target using a reference potential.
    Compare {
        /// Reference potential document.
        #[arg(long)]
        reference: String,
        #[command(flatten)]
        target: PotentialGrid,
    },
    /// T and selected lower bounds over a parameter axis and an energy grid.
    Sweep {
        #[command(flatten)]
        target: PotentialGrid,
        /// Document field to vary; dotted for nested tables (`base.v0`).
        #[arg(long)]
        param: String,
        /// Values of the parameter, `lo:hi:n[:log]`.
        #[arg(long)]
        values: Grid,
        /// Comma-separated bound ids, or `all`.
        #[arg(long, default_value = "case1")]
        bounds: String,
    },
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("SCATTERBOUND_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("SCATTERBOUND_THREADS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("thread pool: {e}")))
}

fn run(cli: Cli) -> Result<Output, CliError> {
    configure_threads()?;
    let s = Settings::new(cli.tol)?;
    Ok(match cli.command {
        Command::Exact(pg) => commands::exact(&doc::load(&pg.potential)?, &pg.energy.points(), &s),
        Command::Solve(pg) => commands::solve(&doc::load(&pg.potential)?, &pg.energy.points(), &s),
        Command::Bound { target, bounds } => {
            let ids = commands::bound_selection(&bounds)?;
            commands::bound(&doc::load(&target.potential)?, &target.energy.points(), ids.as_deref(), &s)
        }
        Command::Greybody { mass, spin, ell, omega, sweep } => {
            let omegas = match (omega, sweep) {
                (Some(w), _) => vec![w],
                (None, Some(g)) => g.points(),
                (None, None) => return Err(CliError::Usage("give --omega or --sweep".into())),
            };
            commands::greybody(&GreybodyArgs { mass, spin, ell }, &omegas, &s)
        }
        Command::Compare { reference, target } => {
            let r = doc::load(&reference)?;
            commands::compare(&r, &doc::load(&target.potential)?, &target.energy.points(), &s)
        }
        Command::Sweep { target, param, values, bounds } => {
            let ids = commands::bound_selection(&bounds)?
                .unwrap_or_else(|| scatterbound::registry::BOUND_IDS.iter().map(|s| s.to_string()).collect());
            let base = doc::load_table(&target.potential)?;
            commands::sweep(&base, &param, &values.points(), &target.energy.points(), &ids, &s)?
        }
    })
}

fn emit(output: &Output, format: Format, out: Option<&PathBuf>) -> Result<(), CliError> {
    let mut sink: Box<dyn Write> = match out {
        Some(p) => {
            Box::new(BufWriter::new(File::create(p).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?))
        }
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    output.table.write(format, &mut sink)?;
    sink.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let (format, out) = (cli.format, cli.out.clone());
    let result = run(cli).and_then(|output| {
        emit(&output, format, out.as_ref())?;
        output.failure.map_or(Ok(()), Err)
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("scatterbound: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
