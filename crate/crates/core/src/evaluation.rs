//! 1NN-DTW classification and the statistics used to compare runs with and
//! without augmentation.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

use crate::dtw::distance_within;
use crate::error::{Error, Result};
use crate::series::{check_values, Label, LabeledDataset};

/// Index and distance of the closest candidate, skipping `exclude`.
///
/// Ties go to the lowest index.
fn nearest<'a, I>(
    query: &[f64],
    candidates: I,
    band_radius: Option<usize>,
    exclude: Option<usize>,
) -> Option<(usize, f64)>
where
    I: Iterator<Item = &'a [f64]>,
{
    let mut best: Option<(usize, f64)> = None;
    for (i, cand) in candidates.enumerate() {
        if Some(i) == exclude {
            continue;
        }
        let cutoff = best.map_or(f64::INFINITY, |(_, d)| d);
        if let Some(d) = distance_within(query, cand, band_radius, cutoff) {
            if best.is_none_or(|(_, b)| d < b) {
                best = Some((i, d));
            }
        }
    }
    best
}

fn check_band(
    train: &LabeledDataset,
    test: &LabeledDataset,
    band_radius: Option<usize>,
) -> Result<()> {
    if let Some(r) = band_radius {
        let (train_lo, train_hi) = train.length_range();
        let (test_lo, test_hi) = test.length_range();
        let spread = train_hi.abs_diff(test_lo).max(test_hi.abs_diff(train_lo));
        if r < spread {
            // feasibility is only guaranteed when the radius covers the length gap
            return Err(Error::InvalidConfig(format!(
                "band radius {r} is below the length difference {spread}"
            )));
        }
    }
    Ok(())
}

/// Predicts each test label as the label of its DTW-nearest training series.
pub fn nn1_dtw_classify(
    train: &LabeledDataset,
    test: &LabeledDataset,
    band_radius: Option<usize>,
) -> Result<Vec<Label>> {
    check_band(train, test, band_radius)?;
    let train_items = train.items();
    Ok(test
        .items()
        .par_iter()
        .map(|q| {
            let candidates = train_items.iter().map(|t| t.series.as_slice());
            let (i, _) = nearest(q.series.as_slice(), candidates, band_radius, None)
                .expect("non-empty training split with a feasible band");
            train_items[i].label.clone()
        })
        .collect())
}

/// Nearest training neighbour of a single query: `(index, distance)`.
pub fn nearest_neighbor(
    train: &LabeledDataset,
    query: &[f64],
    band_radius: Option<usize>,
) -> Result<(usize, f64)> {
    check_values(query)?;
    let candidates = train.items().iter().map(|t| t.series.as_slice());
    nearest(query, candidates, band_radius, None)
        .ok_or_else(|| Error::InvalidConfig("no training series reachable within the band".into()))
}

/// Classifies every training item against all the others.
pub fn leave_one_out_classify(
    train: &LabeledDataset,
    band_radius: Option<usize>,
) -> Result<Vec<Label>> {
    if train.len() < 2 {
        return Err(Error::InvalidDataset(
            "leave-one-out needs at least two items".into(),
        ));
    }
    check_band(train, train, band_radius)?;
    let items = train.items();
    Ok((0..items.len())
        .into_par_iter()
        .map(|k| {
            let candidates = items.iter().map(|t| t.series.as_slice());
            let (i, _) = nearest(items[k].series.as_slice(), candidates, band_radius, Some(k))
                .expect("at least one other item");
            items[i].label.clone()
        })
        .collect())
}

/// Fails with [`Error::UnknownLabel`] if the test split has a class the training split lacks.
pub fn check_test_labels(train: &LabeledDataset, test: &LabeledDataset) -> Result<()> {
    let known = train.labels();
    match test.items().iter().find(|it| !known.contains(&it.label)) {
        Some(it) => Err(Error::UnknownLabel(it.label.to_string())),
        None => Ok(()),
    }
}

pub fn accuracy(predicted: &[Label], actual: &[Label]) -> Result<f64> {
    if predicted.len() != actual.len() {
        return Err(Error::InvalidInput(format!(
            "{} predictions for {} labels",
            predicted.len(),
            actual.len()
        )));
    }
    if predicted.is_empty() {
        return Err(Error::InvalidInput("no predictions".into()));
    }
    let hits = predicted.iter().zip(actual).filter(|(p, a)| p == a).count();
    Ok(hits as f64 / predicted.len() as f64)
}

/// Per-class error: test error divided by the number of classes.
pub fn pce(error: f64, n_classes: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&error) {
        return Err(Error::InvalidInput(format!(
            "error rate {error} outside [0, 1]"
        )));
    }
    if n_classes == 0 {
        return Err(Error::InvalidInput("class count must be positive".into()));
    }
    Ok(error / n_classes as f64)
}

/// Mean per-class error over datasets.
pub fn mpce(pces: &[f64]) -> Result<f64> {
    if pces.is_empty() {
        return Err(Error::InvalidInput("no per-class errors to average".into()));
    }
    Ok(pces.iter().sum::<f64>() / pces.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTest {
    pub t_value: f64,
    /// Two-sided.
    pub p_value: f64,
    pub df: usize,
}

/// Paired t-test on `a - b`, two-sided.
///
/// When every difference is zero the statistic is taken as `t = 0, p = 1`.
pub fn paired_t_test(a: &[f64], b: &[f64]) -> Result<TTest> {
    if a.len() != b.len() {
        return Err(Error::InvalidInput(format!(
            "paired samples differ in length: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let n = a.len();
    if n < 2 {
        return Err(Error::InvalidInput(
            "paired t-test needs at least two pairs".into(),
        ));
    }
    let df = n - 1;
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    if diffs.iter().all(|d| *d == 0.0) {
        return Ok(TTest {
            t_value: 0.0,
            p_value: 1.0,
            df,
        });
    }
    let mean = diffs.iter().sum::<f64>() / n as f64;
    let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / df as f64;
    let t_value = mean / (var.sqrt() / (n as f64).sqrt());
    Ok(TTest {
        t_value,
        p_value: t_two_sided_p(t_value, df as f64),
        df,
    })
}

/// `P(|T| >= |t|)` for Student's t with `df` degrees of freedom.
fn t_two_sided_p(t: f64, df: f64) -> f64 {
    if t.is_nan() {
        return 1.0;
    }
    let x = df / (df + t * t);
    beta_reg(df / 2.0, 0.5, x).clamp(0.0, 1.0)
}

/// Scores for one dataset from one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub dataset_name: String,
    pub accuracy: f64,
    pub error: f64,
    pub n_classes: usize,
    pub pce: f64,
    pub config_fingerprint: String,
}

impl EvaluationReport {
    pub fn new(
        dataset_name: impl Into<String>,
        accuracy: f64,
        n_classes: usize,
        config_fingerprint: impl Into<String>,
    ) -> Result<Self> {
        let error = 1.0 - accuracy;
        Ok(Self {
            dataset_name: dataset_name.into(),
            accuracy,
            error,
            n_classes,
            pce: pce(error, n_classes)?,
            config_fingerprint: config_fingerprint.into(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetComparison {
    pub name: String,
    pub baseline_accuracy: f64,
    pub augmented_accuracy: f64,
}

impl DatasetComparison {
    pub fn delta(&self) -> f64 {
        self.augmented_accuracy - self.baseline_accuracy
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonSummary {
    pub per_dataset: Vec<DatasetComparison>,
    pub mpce_baseline: f64,
    pub mpce_augmented: f64,
    /// Paired t statistic of augmented minus baseline accuracy; `None` for a single dataset.
    pub t_value: Option<f64>,
    pub p_value: Option<f64>,
    pub mean_accuracy_delta: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct WinLoss {
    pub wins: usize,
    pub losses: usize,
    pub ties: usize,
}

impl ComparisonSummary {
    /// Win/loss/tie counts of the augmented run per group of `group_of` (dataset name to group).
    /// Datasets without a group are collected under `"other"`.
    pub fn win_loss_by_group(
        &self,
        group_of: &HashMap<String, String>,
    ) -> BTreeMap<String, WinLoss> {
        let mut out: BTreeMap<String, WinLoss> = BTreeMap::new();
        for d in &self.per_dataset {
            let group = group_of
                .get(&d.name)
                .cloned()
                .unwrap_or_else(|| "other".into());
            let entry = out.entry(group).or_default();
            match d.delta() {
                x if x > 0.0 => entry.wins += 1,
                x if x < 0.0 => entry.losses += 1,
                _ => entry.ties += 1,
            }
        }
        out
    }
}

/// Pairs reports by dataset name and summarizes augmented against baseline.
pub fn compare_runs(
    baseline: &[EvaluationReport],
    augmented: &[EvaluationReport],
) -> Result<ComparisonSummary> {
    let sorted = |r: &[EvaluationReport]| {
        let mut v = r.to_vec();
        v.sort_by(|a, b| a.dataset_name.cmp(&b.dataset_name));
        v
    };
    let (base, aug) = (sorted(baseline), sorted(augmented));
    let names =
        |r: &[EvaluationReport]| r.iter().map(|x| x.dataset_name.clone()).collect::<Vec<_>>();
    if names(&base) != names(&aug) {
        return Err(Error::DatasetMismatch(format!(
            "baseline has {:?}, augmented has {:?}",
            names(&base),
            names(&aug)
        )));
    }
    if base.is_empty() {
        return Err(Error::DatasetMismatch("no reports to compare".into()));
    }

    let per_dataset: Vec<DatasetComparison> = base
        .iter()
        .zip(&aug)
        .map(|(b, a)| DatasetComparison {
            name: b.dataset_name.clone(),
            baseline_accuracy: b.accuracy,
            augmented_accuracy: a.accuracy,
        })
        .collect();
    let base_acc: Vec<f64> = per_dataset.iter().map(|d| d.baseline_accuracy).collect();
    let aug_acc: Vec<f64> = per_dataset.iter().map(|d| d.augmented_accuracy).collect();
    let test = (per_dataset.len() >= 2)
        .then(|| paired_t_test(&aug_acc, &base_acc))
        .transpose()?;

    Ok(ComparisonSummary {
        mpce_baseline: mpce(&base.iter().map(|r| r.pce).collect::<Vec<_>>())?,
        mpce_augmented: mpce(&aug.iter().map(|r| r.pce).collect::<Vec<_>>())?,
        t_value: test.map(|t| t.t_value),
        p_value: test.map(|t| t.p_value),
        mean_accuracy_delta: per_dataset
            .iter()
            .map(DatasetComparison::delta)
            .sum::<f64>()
            / per_dataset.len() as f64,
        per_dataset,
    })
}
