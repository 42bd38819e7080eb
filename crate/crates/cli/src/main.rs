use std::path::PathBuf;
use std::process::ExitCode;

use adlab_cli::commands::{self, CommandFn, Context, Outcome};
use adlab_cli::config::{preset, ExperimentConfig};
use adlab_cli::CliError;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "adlab", version, about = "Asymptotic Dirichlet experiments on rotationally symmetric model manifolds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the warp function and check the comparison bounds.
    Jacobi(Common),
    /// Build the Young pair and audit its bounds.
    Young(Common),
    /// Solve on the largest ball of the schedule.
    Solve(Common),
    /// Run the exhaustion and the diagnostic suite.
    Exhaust(Common),
    /// Partial integrals of the parabolicity test.
    Parabolicity(Common),
    /// Aggregate prior artifacts into a summary.
    Report(Common),
    /// All of the above in order.
    Run(Common),
    /// Print a preset as TOML.
    Preset { name: String },
}

#[derive(Args)]
struct Common {
    #[arg(long, value_name = "PATH", conflicts_with = "preset")]
    config: Option<PathBuf>,
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, value_name = "N")]
    threads: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

fn load(c: &Common) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match (&c.config, &c.preset) {
        (Some(p), _) => ExperimentConfig::load(p)?,
        (None, Some(name)) => preset(name)?,
        (None, None) => {
            return Err(CliError::Validation { path: "--config".into(), reason: "pass --config PATH or --preset NAME".into() })
        }
    };
    if let Some(dir) = &c.out {
        cfg.output.dir = dir.clone();
    }
    if let Some(seed) = c.seed {
        cfg.diagnostics.seed = seed;
    }
    if let Some(n) = c.threads {
        if n == 0 {
            return Err(CliError::Validation { path: "--threads".into(), reason: "must be positive".into() });
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Validation { path: "--threads".into(), reason: e.to_string() })?;
    }
    Ok(cfg)
}

fn dispatch(cmd: Command) -> Result<Outcome, CliError> {
    let (name, common, f): (&str, Common, CommandFn) = match cmd {
        Command::Jacobi(c) => ("jacobi", c, commands::jacobi),
        Command::Young(c) => ("young", c, commands::young),
        Command::Solve(c) => ("solve", c, commands::solve),
        Command::Exhaust(c) => ("exhaust", c, commands::exhaust),
        Command::Parabolicity(c) => ("parabolicity", c, commands::parabolicity),
        Command::Report(c) => ("report", c, commands::report),
        Command::Run(c) => {
            let ctx = Context::new(load(&c)?)?;
            return commands::run(&ctx);
        }
        Command::Preset { name } => {
            print!("{}", preset(&name)?.to_toml());
            return Ok(Outcome::default());
        }
    };
    let ctx = Context::new(load(&common)?)?;
    ctx.stage(name, f)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match dispatch(cli.command) {
        Ok(o) => {
            if !o.failed_checks.is_empty() {
                eprintln!("diagnostic checks failed: {}", o.failed_checks.join(", "));
            }
            o.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
