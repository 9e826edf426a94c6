use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mzsim::emit::{self, Format};
use mzsim::{execute, parse_grid_arg, Command, ScenarioConfig, ScenarioError, ScenarioResult};

#[derive(Parser)]
#[command(name = "mzsim", version, about = "Phase-estimation scenarios for a Mach-Zehnder interferometer")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Evaluate the configured scenario at its own parameters.
    Run(Common),
    /// Evaluate a one-parameter grid.
    Sweep(Common),
    /// Phase-drift Monte Carlo around each scheme's optimum.
    Drift(Common),
    /// Simulated heralded photon counting.
    Counts(Common),
    /// Check the configuration and exit.
    Validate(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the seed in the configuration.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; without it the report goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "both")]
    format: Format,
    #[arg(long, env = "MZSIM_THREADS")]
    threads: Option<usize>,
    /// `<param>=<start>:<stop>:<step>`, one of phi, alpha_sq, r, T, L, D, nbar, nbar_env, m.
    #[arg(long)]
    grid: Option<String>,
}

fn run(command: Command, args: Common) -> ScenarioResult<()> {
    let mut cfg = ScenarioConfig::from_path(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let grid = args.grid.as_deref().map(parse_grid_arg).transpose()?;
    if let Some((p, g)) = &grid {
        cfg.check_sweep(*p, g, "--grid")?;
    }
    if command == Command::Validate {
        println!("{}: ok", args.config.display());
        return Ok(());
    }
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = args.threads {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| ScenarioError::Output(e.to_string()))?;
    let report = pool.install(|| execute(command, &cfg, grid))?;
    match &args.out {
        Some(dir) => {
            for path in emit::write_dir(&report, dir, args.format)? {
                eprintln!("wrote {}", path.display());
            }
        }
        None => emit::write_stdout(&report, args.format)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Sub::Run(a) => (Command::Run, a),
        Sub::Sweep(a) => (Command::Sweep, a),
        Sub::Drift(a) => (Command::Drift, a),
        Sub::Counts(a) => (Command::Counts, a),
        Sub::Validate(a) => (Command::Validate, a),
    };
    match run(command, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
