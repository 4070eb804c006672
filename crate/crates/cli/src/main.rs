use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use kerr_faraday_cli::{batch, pipeline, scenario, CliError, Command, Format, Options};
use serde_json::json;

/// Gravitational Faraday rotation along Kerr null geodesics.
#[derive(Parser)]
#[command(name = "kerr-faraday", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Integrate the photon orbit; writes trajectory and frame samples.
    Integrate(Common),
    /// Faraday angle along the orbit; writes the rotation table.
    Faraday(Common),
    /// Cross-check the closed forms against the transport oracle.
    Verify(Common),
    /// Critical points of the Faraday angle.
    CriticalPoints(Common),
    /// Plot data: polar and 3D orbit, angle curve, ergosphere boundary.
    EmitPlots(Common),
    /// Run many scenarios (files or directories) in parallel.
    Batch(BatchArgs),
}

#[derive(Args)]
struct Flags {
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Override the integration tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Override the final affine parameter.
    #[arg(long = "s-max", allow_negative_numbers = true)]
    s_max: Option<f64>,
    /// Run the transport oracle and write the verification report.
    #[arg(long)]
    verify: bool,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

impl Flags {
    fn options(&self) -> Options {
        Options {
            tol: self.tol,
            s_max: self.s_max,
            verify: self.verify,
            format: self.format,
        }
    }
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    scenario: PathBuf,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Args)]
struct BatchArgs {
    /// Scenario files or directories of `*.toml` files.
    #[arg(long, required = true, num_args = 1..)]
    scenario: Vec<PathBuf>,
    #[command(flatten)]
    flags: Flags,
}

fn report(e: &CliError, file: Option<&Path>) -> ExitCode {
    eprintln!("{}", e.to_json(file));
    ExitCode::from(e.exit_code())
}

fn single(cmd: Command, args: &Common) -> ExitCode {
    let path = args.scenario.as_path();
    let result = scenario::load(path)
        .map_err(CliError::from)
        .and_then(|l| pipeline::run(&l, cmd, &args.flags.options()))
        .and_then(|a| {
            a.write(&args.flags.out)?;
            let files: Vec<&String> = a.files.keys().collect();
            println!(
                "{}",
                json!({ "out": args.flags.out.display().to_string(), "files": files })
            );
            a.status()
        });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report(&e, Some(path)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        Cmd::Integrate(a) => single(Command::Integrate, a),
        Cmd::Faraday(a) => single(Command::Faraday, a),
        Cmd::Verify(a) => single(Command::Verify, a),
        Cmd::CriticalPoints(a) => single(Command::CriticalPoints, a),
        Cmd::EmitPlots(a) => single(Command::EmitPlots, a),
        Cmd::Batch(a) => {
            let paths = match batch::collect(&a.scenario) {
                Ok(p) => p,
                Err(e) => return report(&e, None),
            };
            let outcomes = batch::run(&paths, &a.flags.out, &a.flags.options());
            for o in &outcomes {
                println!("{}", o.to_json());
            }
            ExitCode::from(batch::exit_code(&outcomes))
        }
    }
}
