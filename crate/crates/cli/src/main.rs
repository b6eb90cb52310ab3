mod commands;
mod config;
mod failure;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use specgan_core::analysis::SvmConfig;

use crate::config::RunConfig;
use crate::failure::Failure;

/// Conditional WGAN-GP for hyperspectral spectra: ingest, train, sample,
/// interpolate, analyze and run augmentation experiments.
#[derive(Parser)]
#[command(name = "specgan", version, after_long_help = config::keys_help())]
struct Cli {
    /// Log progress to stderr.
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ConfigArgs {
    /// `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one config key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

impl ConfigArgs {
    fn load(&self) -> Result<RunConfig, Failure> {
        RunConfig::load(self.config.as_deref(), &self.overrides)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Write the bundled synthetic mini-cube as a table.
    Synth {
        #[arg(long)]
        out: PathBuf,
        /// Also write cube.hdr, cube.raw and labels.raw here.
        #[arg(long)]
        raw_dir: Option<PathBuf>,
        #[arg(long, default_value_t = 2018)]
        seed: u64,
    },
    /// Convert a raw cube with a label map into a table.
    Convert {
        #[arg(long)]
        header: PathBuf,
        #[arg(long)]
        payload: PathBuf,
        #[arg(long)]
        labels: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Keep reflectances as decoded instead of rescaling to [0, 1].
        #[arg(long)]
        no_normalize: bool,
    },
    /// Train the GAN; writes checkpoints and losses.csv into out_dir.
    #[command(after_long_help = config::keys_help())]
    Train(ConfigArgs),
    /// Generate spectra of one class.
    Sample {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        class: u16,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Walk the latent and label space; writes <out>.hsit, <out>.csv, <out>.svg.
    Interpolate {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        from_class: u16,
        #[arg(long)]
        to_class: u16,
        #[arg(long, default_value_t = 64)]
        steps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Use the same noise vector at both ends.
        #[arg(long)]
        fixed_noise: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Class statistics, PCA projection and SVM separation of real vs fake.
    Analyze {
        #[arg(long)]
        real: PathBuf,
        /// Generated tables; repeat to combine classes sampled separately.
        #[arg(long, required = true)]
        fake: Vec<PathBuf>,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = SvmConfig::default().regularization)]
        svm_regularization: f64,
        #[arg(long, default_value_t = SvmConfig::default().epochs)]
        svm_epochs: usize,
    },
    /// Classifier accuracy with and without generated rows; writes report.csv and report.json.
    #[command(after_long_help = config::keys_help())]
    AugmentEval(ConfigArgs),
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Synth { out, raw_dir, seed } => commands::synth(&out, raw_dir.as_deref(), seed),
        Command::Convert { header, payload, labels, out, no_normalize } => {
            commands::convert(&header, &payload, &labels, &out, !no_normalize)
        }
        Command::Train(args) => commands::train(&args.load()?),
        Command::Sample { checkpoint, class, n, seed, out } => commands::sample(&checkpoint, class, n, seed, &out),
        Command::Interpolate { checkpoint, from_class, to_class, steps, seed, fixed_noise, out } => {
            let req = commands::InterpolationRequest { from_class, to_class, steps, seed, fixed_noise };
            commands::interpolate(&checkpoint, &req, &out)
        }
        Command::Analyze { real, fake, out_dir, seed, svm_regularization, svm_epochs } => {
            let svm = SvmConfig { regularization: svm_regularization, epochs: svm_epochs, seed: 0 };
            commands::analyze(&real, &fake, &out_dir, seed, svm)
        }
        Command::AugmentEval(args) => commands::augment_eval(&args.load()?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let first = e.to_string().lines().next().unwrap_or("invalid arguments").to_string();
            eprintln!("{}", Failure::config(first.trim_start_matches("error: ")));
            return ExitCode::from(2);
        }
    };
    let level = if cli.verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{f}");
            ExitCode::from(f.code() as u8)
        }
    }
}
