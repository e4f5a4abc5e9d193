use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use fieldfuse::harness::config::SceneConfig;
use fieldfuse::harness::{run_experiment, Command, Overrides};

/// Registration and novel-view blending for volumetric radiance fields.
#[derive(Parser)]
#[command(name = "fieldfuse", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Scene configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Override the scene seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Override the blend strategy (nearest, idw-2d, idw-3d, idw-sample).
    #[arg(long, global = true)]
    strategy: Option<String>,

    /// Override the blending rate.
    #[arg(long, global = true)]
    gamma: Option<f64>,

    /// Override the distance-test ratio.
    #[arg(long, global = true)]
    tau: Option<f64>,

    /// Override the per-ray sample budget.
    #[arg(long, global = true)]
    budget: Option<usize>,

    /// Output directory (default: ./out).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Render the full scene from every configured camera.
    Render,
    /// Register field B against field A and write the report and transform.
    Register,
    /// Render blended novel views with the configured strategy.
    Blend,
    /// Compare every strategy against the reference render (PSNR/SSIM CSV).
    Evaluate,
    /// Sweep the blending rate over a geometric grid for all IDW strategies.
    SweepGamma,
    /// Sweep the query-pose count ratio and record registration errors.
    SweepRho,
}

fn run(cli: &Cli) -> fieldfuse::Result<()> {
    let config_path = cli.config.as_ref().ok_or_else(|| {
        fieldfuse::Error::InvalidArgument("--config PATH is required".into())
    })?;
    let scene = SceneConfig::load(config_path)?;
    let command = match cli.command {
        Cmd::Render => Command::Render,
        Cmd::Register => Command::Register,
        Cmd::Blend => Command::Blend,
        Cmd::Evaluate => Command::Evaluate,
        Cmd::SweepGamma => Command::SweepGamma,
        Cmd::SweepRho => Command::SweepRho,
    };
    let overrides = Overrides {
        seed: cli.seed,
        strategy: cli.strategy.clone(),
        gamma: cli.gamma,
        tau: cli.tau,
        budget: cli.budget,
        out: cli.out.clone(),
    };
    for artifact in run_experiment(&scene, command, &overrides)? {
        println!("{}", artifact.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
