//! Dataset-level runs behind the `dtwmerge` binary.
//!
//! Each dataset is processed in isolation: a failure is recorded in the run
//! manifest and the remaining datasets still produce their outputs.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use dtwmerge::evaluation::{check_test_labels, ComparisonSummary};
use dtwmerge::series::{equalize_lengths, LabeledDataset, Split};
use dtwmerge::ucr::{read_ucr_file, split_path, write_atomic, DatasetSummary};
use dtwmerge::{
    accuracy, augment_dataset, compare_runs, load_ucr_split, nn1_dtw_classify, summarize,
    write_ucr, AugmentationConfig, EvaluationReport, Pairing,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const REPORT_SUFFIX: &str = "_report.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Augment,
    Evaluate,
    Compare,
    Summarize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    PartialFailure = 1,
    UsageError = 2,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub dataset_dir: PathBuf,
    /// Empty means every dataset found under `dataset_dir`.
    pub dataset_names: Vec<String>,
    pub seed: u64,
    pub factor: usize,
    pub pairing: Pairing,
    pub smooth: bool,
    pub smooth_window: usize,
    pub band_radius: Option<usize>,
    pub augmented: bool,
    /// Where `evaluate --augmented` finds `<NAME>_TRAIN_AUG.tsv`; augments in memory when unset.
    pub augmented_dir: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub format: OutputFormat,
    pub jobs: usize,
    pub repeats: usize,
    /// Report directories for `compare`: baseline then augmented.
    pub compare_dirs: Option<(PathBuf, PathBuf)>,
}

impl RunConfig {
    pub fn new(
        command: Command,
        dataset_dir: impl Into<PathBuf>,
        output_dir: impl Into<PathBuf>,
    ) -> Self {
        let aug = AugmentationConfig::default();
        Self {
            command,
            dataset_dir: dataset_dir.into(),
            dataset_names: Vec::new(),
            seed: aug.seed,
            factor: aug.factor,
            pairing: aug.pairing,
            smooth: aug.smooth_junction,
            smooth_window: aug.smooth_window,
            band_radius: None,
            augmented: false,
            augmented_dir: None,
            output_dir: output_dir.into(),
            format: OutputFormat::Json,
            jobs: 0,
            repeats: 1,
            compare_dirs: None,
        }
    }

    pub fn augmentation(&self, seed: u64) -> AugmentationConfig {
        AugmentationConfig {
            factor: self.factor,
            pairing: self.pairing,
            seed,
            smooth_junction: self.smooth,
            smooth_window: self.smooth_window,
            inclusive_suffix: false,
        }
    }

    fn fingerprinted(&self) -> Fingerprinted {
        let augmenting = self.command == Command::Augment || self.augmented;
        Fingerprinted {
            command: self.command,
            seed: self.seed,
            augmentation: augmenting.then(|| self.augmentation(self.seed)),
            band_radius: self.band_radius,
            augmented: self.augmented,
            repeats: self.repeats,
        }
    }

    /// Hash of every setting that affects output data. Paths are excluded.
    pub fn fingerprint(&self) -> String {
        let json = serde_json::to_vec(&self.fingerprinted()).expect("config serializes");
        hex::encode(&Sha256::digest(&json)[..8])
    }
}

#[derive(Debug, Clone, Serialize)]
struct Fingerprinted {
    command: Command,
    seed: u64,
    augmentation: Option<AugmentationConfig>,
    band_radius: Option<usize>,
    augmented: bool,
    repeats: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "status")]
pub enum DatasetOutcome {
    Ok,
    Failed { error: String },
}

#[derive(Debug, Clone, Serialize)]
struct RunManifest<'a, T: Serialize> {
    command: Command,
    seed: u64,
    config_fingerprint: String,
    config: &'a Fingerprinted,
    datasets: Vec<ManifestEntry<T>>,
}

#[derive(Debug, Clone, Serialize)]
struct ManifestEntry<T: Serialize> {
    name: String,
    #[serde(flatten)]
    outcome: DatasetOutcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    result: Option<T>,
}

/// Directory holding `<name>_TRAIN.tsv`: either `dir/<name>/` or `dir` itself.
pub fn dataset_location(dir: &Path, name: &str) -> PathBuf {
    let nested = dir.join(name);
    if split_path(&nested, name, Split::Train).is_file() {
        nested
    } else {
        dir.to_owned()
    }
}

/// Names of every dataset with a training file under `dir`, sorted.
pub fn discover_datasets(dir: &Path) -> anyhow::Result<Vec<String>> {
    let mut names = Vec::new();
    for entry in fs::read_dir(dir).with_context(|| format!("reading {}", dir.display()))? {
        let entry = entry?;
        let file_name = entry.file_name().to_string_lossy().into_owned();
        let path = entry.path();
        if path.is_dir() {
            if split_path(&path, &file_name, Split::Train).is_file() {
                names.push(file_name);
            }
        } else if let Some(name) = file_name.strip_suffix("_TRAIN.tsv") {
            names.push(name.to_owned());
        }
    }
    names.sort();
    names.dedup();
    Ok(names)
}

fn resolve_names(config: &RunConfig) -> anyhow::Result<Vec<String>> {
    let names = if config.dataset_names.is_empty() {
        discover_datasets(&config.dataset_dir)?
    } else {
        config.dataset_names.clone()
    };
    if names.is_empty() {
        bail!("no datasets found under {}", config.dataset_dir.display());
    }
    Ok(names)
}

fn thread_pool(jobs: usize) -> anyhow::Result<rayon::ThreadPool> {
    Ok(rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?)
}

/// Runs `work` for every dataset on the configured pool, in name order.
fn per_dataset<T, F>(
    config: &RunConfig,
    names: &[String],
    work: F,
) -> anyhow::Result<Vec<ManifestEntry<T>>>
where
    T: Serialize + Send,
    F: Fn(&str) -> anyhow::Result<T> + Sync,
{
    let pool = thread_pool(config.jobs)?;
    Ok(pool.install(|| {
        names
            .par_iter()
            .map(|name| match work(name) {
                Ok(result) => ManifestEntry {
                    name: name.clone(),
                    outcome: DatasetOutcome::Ok,
                    result: Some(result),
                },
                Err(e) => {
                    eprintln!("{name}: {e:#}");
                    ManifestEntry {
                        name: name.clone(),
                        outcome: DatasetOutcome::Failed {
                            error: format!("{e:#}"),
                        },
                        result: None,
                    }
                }
            })
            .collect()
    }))
}

fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> anyhow::Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    write_atomic(path, &bytes).with_context(|| format!("writing {}", path.display()))
}

fn finish<T: Serialize>(
    config: &RunConfig,
    file: &str,
    entries: Vec<ManifestEntry<T>>,
) -> anyhow::Result<ExitStatus> {
    let failed = entries.iter().any(|e| e.outcome != DatasetOutcome::Ok);
    let fingerprinted = config.fingerprinted();
    let manifest = RunManifest {
        command: config.command,
        seed: config.seed,
        config_fingerprint: config.fingerprint(),
        config: &fingerprinted,
        datasets: entries,
    };
    write_json(&config.output_dir.join(file), &manifest)?;
    Ok(if failed {
        ExitStatus::PartialFailure
    } else {
        ExitStatus::Success
    })
}

fn prepare_output(config: &RunConfig) -> anyhow::Result<()> {
    fs::create_dir_all(&config.output_dir)
        .with_context(|| format!("creating {}", config.output_dir.display()))
}

/// Equalizes a variable-length training split, then appends DTW-Merge samples.
pub fn augmented_train(
    train: &LabeledDataset,
    aug: &AugmentationConfig,
) -> dtwmerge::Result<(LabeledDataset, AugmentInfo)> {
    let equalized = !train.is_equal_length();
    let base = if equalized {
        equalize_lengths(train, aug.seed)
    } else {
        train.clone()
    };
    let out = augment_dataset(&base, aug)?;
    let info = AugmentInfo {
        equalized,
        series_length: base.length_range().1,
        n_original: train.len(),
        n_synthetic: out.dataset.len() - train.len(),
        self_merge_warnings: out.self_merges,
    };
    Ok((out.dataset, info))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugmentInfo {
    pub equalized: bool,
    pub series_length: usize,
    pub n_original: usize,
    pub n_synthetic: usize,
    /// Synthetic items that copy their source because its class has one member.
    pub self_merge_warnings: usize,
}

#[derive(Debug, Clone, Serialize)]
struct AugmentManifest<'a> {
    dataset: &'a str,
    seed: u64,
    factor: usize,
    pairing: Pairing,
    smooth: bool,
    config_fingerprint: String,
    #[serde(flatten)]
    info: AugmentInfo,
}

pub fn augmented_file_name(name: &str) -> String {
    format!("{name}_TRAIN_AUG.tsv")
}

/// Writes `<NAME>_TRAIN_AUG.tsv` and `<NAME>_augment.json` per dataset.
pub fn cmd_augment(config: &RunConfig) -> anyhow::Result<ExitStatus> {
    let names = resolve_names(config)?;
    prepare_output(config)?;
    let aug = config.augmentation(config.seed);
    aug.validate()?;
    let entries = per_dataset(config, &names, |name| {
        let dir = dataset_location(&config.dataset_dir, name);
        let train = read_ucr_file(&split_path(&dir, name, Split::Train), name, Split::Train)?;
        let (out, info) = augmented_train(&train, &aug)?;
        write_ucr(&out, &config.output_dir.join(augmented_file_name(name)))?;
        let manifest = AugmentManifest {
            dataset: name,
            seed: aug.seed,
            factor: aug.factor,
            pairing: aug.pairing,
            smooth: aug.smooth_junction,
            config_fingerprint: config.fingerprint(),
            info: info.clone(),
        };
        write_json(
            &config.output_dir.join(format!("{name}_augment.json")),
            &manifest,
        )?;
        Ok(info)
    })?;
    finish(config, "augment_manifest.json", entries)
}

/// Per-dataset evaluation record as written to `<NAME>_report.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRecord {
    #[serde(flatten)]
    pub report: EvaluationReport,
    pub seed: u64,
    pub augmented: bool,
    pub band_radius: Option<usize>,
    pub n_train: usize,
    pub n_test: usize,
    /// Accuracy of each repeat; the report accuracy is their mean.
    pub run_accuracies: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub augmentation: Option<AugmentInfo>,
}

fn evaluate_one(config: &RunConfig, name: &str) -> anyhow::Result<ReportRecord> {
    let dir = dataset_location(&config.dataset_dir, name);
    let pair = load_ucr_split(&dir, name)?;
    check_test_labels(&pair.train, &pair.test)?;
    let actual: Vec<_> = pair
        .test
        .items()
        .iter()
        .map(|it| it.label.clone())
        .collect();
    let score = |train: &LabeledDataset| -> anyhow::Result<f64> {
        let predicted = nn1_dtw_classify(train, &pair.test, config.band_radius)?;
        Ok(accuracy(&predicted, &actual)?)
    };

    let (run_accuracies, n_train, augmentation) = match (config.augmented, &config.augmented_dir) {
        (false, _) => (vec![score(&pair.train)?], pair.train.len(), None),
        (true, Some(aug_dir)) => {
            let path = aug_dir.join(augmented_file_name(name));
            let train = read_ucr_file(&path, name, Split::Train)?;
            (vec![score(&train)?], train.len(), None)
        }
        (true, None) => {
            let mut accs = Vec::with_capacity(config.repeats);
            let mut last = None;
            for r in 0..config.repeats.max(1) {
                let aug = config.augmentation(config.seed.wrapping_add(r as u64));
                let (train, info) = augmented_train(&pair.train, &aug)?;
                accs.push(score(&train)?);
                last = Some((train.len(), info));
            }
            let (n, info) = last.expect("at least one repeat");
            (accs, n, Some(info))
        }
    };

    let mean_acc = run_accuracies.iter().sum::<f64>() / run_accuracies.len() as f64;
    let report = EvaluationReport::new(
        name,
        mean_acc,
        pair.metadata.n_classes,
        config.fingerprint(),
    )?;
    let record = ReportRecord {
        report,
        seed: config.seed,
        augmented: config.augmented,
        band_radius: config.band_radius,
        n_train,
        n_test: pair.test.len(),
        run_accuracies,
        augmentation,
    };
    write_json(
        &config.output_dir.join(format!("{name}{REPORT_SUFFIX}")),
        &record,
    )?;
    Ok(record)
}

/// 1NN-DTW on each dataset, writing `<NAME>_report.json`.
pub fn cmd_evaluate(config: &RunConfig) -> anyhow::Result<ExitStatus> {
    let names = resolve_names(config)?;
    prepare_output(config)?;
    if config.augmented {
        config.augmentation(config.seed).validate()?;
    }
    let entries = per_dataset(config, &names, |name| evaluate_one(config, name))?;
    if config.format == OutputFormat::Csv {
        let reports: Vec<&EvaluationReport> = entries
            .iter()
            .filter_map(|e| e.result.as_ref().map(|r| &r.report))
            .collect();
        write_reports_csv(&config.output_dir.join("reports.csv"), &reports)?;
    }
    finish(config, "evaluate_manifest.json", entries)
}

fn write_reports_csv(path: &Path, reports: &[&EvaluationReport]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "dataset",
        "accuracy",
        "error",
        "n_classes",
        "pce",
        "config_fingerprint",
    ])?;
    for r in reports {
        w.write_record([
            r.dataset_name.clone(),
            r.accuracy.to_string(),
            r.error.to_string(),
            r.n_classes.to_string(),
            r.pce.to_string(),
            r.config_fingerprint.clone(),
        ])?;
    }
    write_atomic(path, &w.into_inner()?)?;
    Ok(())
}

/// Every `*_report.json` in `dir`, in file-name order.
pub fn read_reports(dir: &Path) -> anyhow::Result<Vec<EvaluationReport>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .is_some_and(|n| n.to_string_lossy().ends_with(REPORT_SUFFIX))
        })
        .collect();
    paths.sort();
    paths
        .iter()
        .map(|p| {
            let text = fs::read_to_string(p)?;
            let record: ReportRecord =
                serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))?;
            Ok(record.report)
        })
        .collect()
}

/// Compares two report directories; writes `comparison.json` (and `comparison.csv`).
pub fn cmd_compare(config: &RunConfig) -> anyhow::Result<ExitStatus> {
    let Some((base_dir, aug_dir)) = &config.compare_dirs else {
        bail!("compare needs a baseline and an augmented report directory");
    };
    let baseline = read_reports(base_dir)?;
    let augmented = read_reports(aug_dir)?;
    let summary = match compare_runs(&baseline, &augmented) {
        Ok(s) => s,
        Err(e @ dtwmerge::Error::DatasetMismatch(_)) => {
            eprintln!("{e}");
            return Ok(ExitStatus::UsageError);
        }
        Err(e) => return Err(e.into()),
    };
    prepare_output(config)?;
    write_json(&config.output_dir.join("comparison.json"), &summary)?;
    if config.format == OutputFormat::Csv {
        write_comparison_csv(&config.output_dir.join("comparison.csv"), &summary)?;
    }
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(ExitStatus::Success)
}

fn write_comparison_csv(path: &Path, summary: &ComparisonSummary) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "dataset",
        "baseline_accuracy",
        "augmented_accuracy",
        "delta",
    ])?;
    for d in &summary.per_dataset {
        w.write_record([
            d.name.clone(),
            d.baseline_accuracy.to_string(),
            d.augmented_accuracy.to_string(),
            d.delta().to_string(),
        ])?;
    }
    write_atomic(path, &w.into_inner()?)?;
    Ok(())
}

/// Dataset summaries as a JSON array, to `summary.json` in the output directory.
pub fn cmd_summarize(config: &RunConfig) -> anyhow::Result<(ExitStatus, Vec<DatasetSummary>)> {
    let names = resolve_names(config)?;
    prepare_output(config)?;
    let entries = per_dataset(config, &names, |name| {
        let dir = dataset_location(&config.dataset_dir, name);
        Ok(summarize(&load_ucr_split(&dir, name)?))
    })?;
    let summaries: Vec<DatasetSummary> = entries.iter().filter_map(|e| e.result.clone()).collect();
    println!("{}", serde_json::to_string_pretty(&summaries)?);
    let status = finish(config, "summary.json", entries)?;
    Ok((status, summaries))
}

pub fn run(config: &RunConfig) -> anyhow::Result<ExitStatus> {
    match config.command {
        Command::Augment => cmd_augment(config),
        Command::Evaluate => cmd_evaluate(config),
        Command::Compare => cmd_compare(config),
        Command::Summarize => cmd_summarize(config).map(|(s, _)| s),
    }
}
