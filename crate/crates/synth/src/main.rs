use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use synth::{cmd_evaluate, cmd_synthesize, ArraySize, CliError, Overrides};

/// Low-sidelobe planar array synthesis by cuckoo search.
#[derive(Debug, Parser)]
#[command(name = "synth", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Optimize element amplitudes and write result, pattern, convergence and excitation files.
    Run(RunArgs),
    /// Measure an existing excitation on the configured cut.
    Eval(EvalArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Flat TOML run configuration; defaults apply to every omitted key.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, conflicts_with = "seeds")]
    seed: Option<u64>,
    /// Comma-separated seeds, one synthesis each.
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Fraction of nests abandoned per iteration.
    #[arg(long)]
    pa: Option<f64>,
    #[arg(long)]
    iters: Option<usize>,
    /// Number of nests.
    #[arg(long)]
    pop: Option<usize>,
    /// Azimuth of the optimized cut, degrees.
    #[arg(long)]
    phi: Option<f64>,
    /// Element counts as MxN.
    #[arg(long)]
    size: Option<ArraySize>,
    /// Evaluation threads (0 = all cores). Does not affect results.
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Headerless CSV of M rows by N amplitudes.
    #[arg(long)]
    excitation: PathBuf,
    /// Directory for pattern.csv (default: config out_dir, else the working directory).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    phi: Option<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut stdout = std::io::stdout().lock();
    let outcome = match cli.command {
        Command::Run(args) => {
            let overrides = Overrides {
                seed: args.seed,
                seeds: args.seeds,
                out_dir: args.out,
                pa: args.pa,
                max_iterations: args.iters,
                population: args.pop,
                phi_deg: args.phi,
                size: args.size,
            };
            cmd_synthesize(args.config.as_deref(), &overrides, args.threads, &mut stdout).map(|_| ())
        }
        Command::Eval(args) => {
            let overrides = Overrides {
                out_dir: args.out,
                phi_deg: args.phi,
                ..Default::default()
            };
            cmd_evaluate(args.config.as_deref(), &args.excitation, &overrides, &mut stdout).map(|_| ())
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            if let CliError::Structured { kind, message } = &err {
                let line = serde_json::json!({ "error": kind, "message": message });
                println!("{line}");
            }
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
