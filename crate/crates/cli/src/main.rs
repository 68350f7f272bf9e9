//! `toposurf` — batch driver for the roughness-classification pipeline.
//!
//! Exit codes: 0 success, 1 config error, 2 data error, 3 I/O error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use toposurf::pipeline::{self, PipelineConfig, Stage};
use toposurf::Error;

#[derive(Parser)]
#[command(name = "toposurf", version, about = "Surface-roughness classification pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// Pipeline config (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Override the dataset seed from the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Dump persistence diagrams for TDA featurizations.
    #[arg(long)]
    dump_diagrams: bool,
    /// Dump mean lines and APSD grids for classical featurizations.
    #[arg(long)]
    dump_intermediates: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the synthetic dataset only.
    Generate(RunArgs),
    /// Generate (or reuse) the dataset and compute feature matrices.
    Featurize(RunArgs),
    /// Run featurization plus cross-validated classification.
    Classify(RunArgs),
    /// Full pipeline: dataset, features, classification, summary, manifest.
    Run(RunArgs),
    /// Merge CvReport JSONs from run directories into one CSV on stdout.
    Report {
        /// Run directories containing a `reports/` folder.
        dirs: Vec<PathBuf>,
        /// Write the merged CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    match dispatch() {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Parameter(_) | Error::Config(_) => 1,
        Error::Data(_) => 2,
        Error::Io(_) => 3,
    }
}

fn dispatch() -> Result<(), Error> {
    let cli = Cli::parse();
    match cli.command {
        Command::Generate(args) => run_stage(args, Stage::Generate),
        Command::Featurize(args) => run_stage(args, Stage::Featurize),
        Command::Classify(args) | Command::Run(args) => run_stage(args, Stage::Classify),
        Command::Report { dirs, out } => {
            if dirs.is_empty() {
                return Err(Error::Config("report needs at least one run directory".into()));
            }
            let (csv, warnings) = pipeline::report(&dirs)?;
            for w in warnings {
                eprintln!("warning: {w}");
            }
            match out {
                Some(path) => std::fs::write(path, csv)?,
                None => print!("{csv}"),
            }
            Ok(())
        }
    }
}

fn run_stage(args: RunArgs, stage: Stage) -> Result<(), Error> {
    let mut config = PipelineConfig::from_toml_file(&args.config)?;
    if let Some(seed) = args.seed {
        config.dataset.seed = seed;
    }
    config.dump_diagrams |= args.dump_diagrams;
    config.dump_intermediates |= args.dump_intermediates;

    let manifest = pipeline::run_stages(&config, &args.out, args.jobs, stage)?;
    eprintln!(
        "done: digest {} -> {}",
        manifest.config_digest,
        args.out.display()
    );
    if stage == Stage::Classify {
        let summary = std::fs::read_to_string(&manifest.summary_file)?;
        print!("{summary}");
    }
    Ok(())
}
