use std::path::PathBuf;
use std::process;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dtwmerge::Pairing;
use dtwmerge_cli::{run, Command, ExitStatus, OutputFormat, RunConfig};

#[derive(Debug, Parser)]
#[command(
    name = "dtwmerge",
    version,
    about = "DTW-Merge augmentation and 1NN-DTW evaluation for UCR datasets"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Write <NAME>_TRAIN_AUG.tsv with DTW-Merge samples appended to the training split.
    Augment {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        aug: AugArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Score 1NN-DTW on each dataset's test split and write <NAME>_report.json.
    Evaluate {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        aug: AugArgs,
        #[command(flatten)]
        run: RunArgs,
        /// Sakoe-Chiba band radius; unconstrained when omitted.
        #[arg(long = "band")]
        band: Option<usize>,
        /// Train on the augmented training split.
        #[arg(long)]
        augmented: bool,
        /// Directory holding <NAME>_TRAIN_AUG.tsv files; without it augmentation runs in memory.
        #[arg(long = "aug-dir")]
        aug_dir: Option<PathBuf>,
        /// In-memory augmentation repeats (seeds seed, seed+1, ...); accuracy is averaged.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        repeats: u64,
    },
    /// Compare two directories of evaluation reports.
    Compare {
        baseline: PathBuf,
        augmented: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Describe datasets: sizes, classes, lengths, z-normalization.
    Summarize {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Debug, Args)]
struct DataArgs {
    /// Archive root: holds <NAME>/<NAME>_TRAIN.tsv or <NAME>_TRAIN.tsv.
    #[arg(long = "data-dir")]
    data_dir: PathBuf,
    /// Comma-separated dataset names; all discoverable datasets when omitted.
    #[arg(long, value_delimiter = ',')]
    datasets: Vec<String>,
}

#[derive(Debug, Args)]
struct AugArgs {
    #[arg(long, env = "DTWMERGE_SEED", default_value_t = 0)]
    seed: u64,
    /// Synthetic samples per training sample.
    #[arg(long, default_value_t = 1)]
    factor: usize,
    #[arg(long, value_enum, default_value_t = PairingArg::Random)]
    pairing: PairingArg,
    /// Smooth the junction of each merged series.
    #[arg(long)]
    smooth: bool,
    #[arg(long = "smooth-window", default_value_t = 3)]
    smooth_window: usize,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long = "out", default_value = "out")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PairingArg {
    Random,
    RoundRobin,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

fn base_config(command: Command, data: Option<DataArgs>, run: RunArgs) -> RunConfig {
    let mut config = RunConfig::new(
        command,
        data.as_ref()
            .map(|d| d.data_dir.clone())
            .unwrap_or_default(),
        run.out,
    );
    if let Some(d) = data {
        config.dataset_names = d.datasets;
    }
    config.format = match run.format {
        FormatArg::Json => OutputFormat::Json,
        FormatArg::Csv => OutputFormat::Csv,
    };
    config.jobs = run.jobs;
    config
}

fn apply_aug(config: &mut RunConfig, aug: AugArgs) {
    config.seed = aug.seed;
    config.factor = aug.factor;
    config.pairing = match aug.pairing {
        PairingArg::Random => Pairing::RandomSameClass,
        PairingArg::RoundRobin => Pairing::RoundRobinSameClass,
    };
    config.smooth = aug.smooth;
    config.smooth_window = aug.smooth_window;
}

fn main() {
    let cli = Cli::parse();
    let config = match cli.command {
        Sub::Augment { data, aug, run } => {
            let mut c = base_config(Command::Augment, Some(data), run);
            apply_aug(&mut c, aug);
            c
        }
        Sub::Evaluate {
            data,
            aug,
            run,
            band,
            augmented,
            aug_dir,
            repeats,
        } => {
            let mut c = base_config(Command::Evaluate, Some(data), run);
            apply_aug(&mut c, aug);
            c.band_radius = band;
            c.augmented = augmented;
            c.augmented_dir = aug_dir;
            c.repeats = repeats as usize;
            c
        }
        Sub::Compare {
            baseline,
            augmented,
            run,
        } => {
            let mut c = base_config(Command::Compare, None, run);
            c.compare_dirs = Some((baseline, augmented));
            c
        }
        Sub::Summarize { data, run } => base_config(Command::Summarize, Some(data), run),
    };

    let status = match run(&config) {
        Ok(status) => status,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitStatus::UsageError
        }
    };
    process::exit(status.code());
}
