use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use wold_cli::spec::Action;
use wold_cli::{parse_spec, parse_verify_input, run, to_precise_json, to_text, Overrides, RunOptions, EXIT_ERROR};

#[derive(Parser, Debug)]
#[command(name = "wold", version, about = "Equal-range checks and joint Wold decompositions of isometry tuples")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Test the equal-range conditions only
    Check(Common),
    /// Check, decompose and verify
    Decompose(Common),
    /// Re-run the pipeline from a spec or an earlier JSON report and compare
    Verify(Common),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args, Debug)]
struct Common {
    /// Spec file, or `-` for stdin
    #[arg(long)]
    spec: PathBuf,

    /// Use this depth on every axis
    #[arg(long)]
    depth: Option<u64>,

    /// Largest power in the decomposition chains
    #[arg(long)]
    max_power: Option<u64>,

    /// Largest power tested by the equal-range checks
    #[arg(long)]
    cap: Option<u64>,

    /// Numerical tolerance, in (0, 1e-2]
    #[arg(long)]
    tol: Option<f64>,

    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Report block figures on the interior window only
    #[arg(long, default_value_t = false)]
    interior_only: bool,

    /// Add the elapsed time to the report, which then differs between runs
    #[arg(long, default_value_t = false)]
    timing: bool,
}

fn read_input(path: &PathBuf) -> std::io::Result<String> {
    if path.as_os_str() == "-" {
        let mut text = String::new();
        std::io::stdin().read_to_string(&mut text)?;
        Ok(text)
    } else {
        std::fs::read_to_string(path)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (action, args) = match cli.command {
        Command::Check(a) => (Action::Check, a),
        Command::Decompose(a) => (Action::Decompose, a),
        Command::Verify(a) => (Action::Verify, a),
    };
    let text = match read_input(&args.spec) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args.spec.display());
            return ExitCode::from(EXIT_ERROR as u8);
        }
    };
    let mut options = RunOptions::for_command(action);
    options.interior_only = args.interior_only;
    options.timing = args.timing;
    let parsed = if action == Action::Verify {
        parse_verify_input(&text).map(|input| {
            options.recorded = input.recorded;
            input.spec
        })
    } else {
        parse_spec(&text)
    };
    let mut spec = match parsed {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_ERROR as u8);
        }
    };
    let overrides = Overrides { depth: args.depth, max_power: args.max_power, cap: args.cap, tol: args.tol };
    if let Err(e) = overrides.apply(&mut spec) {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_ERROR as u8);
    }
    let outcome = run(&spec, &options);
    match args.format {
        Format::Json => print!("{}", to_precise_json(&outcome.report)),
        Format::Text => print!("{}", to_text(&outcome.report)),
    }
    for e in &outcome.report.errors {
        eprintln!("error: {e}");
    }
    ExitCode::from(outcome.exit_code as u8)
}
