//! Univariate series, labelled datasets and the preprocessing applied before
//! augmentation: z-normalization and variable-length equalization.

use std::collections::BTreeSet;
use std::fmt;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{item_rng, Domain};

/// A non-empty sequence of finite real values.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries(Vec<f64>);

impl TimeSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        check_values(&values)?;
        Ok(Self(values))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.0.len()
    }
}

impl AsRef<[f64]> for TimeSeries {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for TimeSeries {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

/// Rejects empty input and non-finite values.
pub(crate) fn check_values(values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::InvalidSeries("series is empty".into()));
    }
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidSeries(format!(
            "non-finite value {} at index {i}",
            values[i]
        )));
    }
    Ok(())
}

/// Opaque class key. UCR labels are compared as strings, never renumbered.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Label(String);

impl Label {
    pub fn new(key: impl Into<String>) -> Self {
        Self(key.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Self {
        Self(s.to_owned())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSeries {
    pub series: TimeSeries,
    pub label: Label,
}

impl LabeledSeries {
    pub fn new(series: TimeSeries, label: impl Into<Label>) -> Self {
        Self {
            series,
            label: label.into(),
        }
    }
}

/// An ordered, non-empty collection of labelled series from one split.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    name: String,
    split: Split,
    items: Vec<LabeledSeries>,
}

impl LabeledDataset {
    pub fn new(name: impl Into<String>, split: Split, items: Vec<LabeledSeries>) -> Result<Self> {
        let name = name.into();
        if items.is_empty() {
            return Err(Error::InvalidDataset(format!(
                "{name} ({split:?}) has no items"
            )));
        }
        Ok(Self { name, split, items })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn split(&self) -> Split {
        self.split
    }

    pub fn items(&self) -> &[LabeledSeries] {
        &self.items
    }

    pub fn into_items(self) -> Vec<LabeledSeries> {
        self.items
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn labels(&self) -> BTreeSet<&Label> {
        self.items.iter().map(|it| &it.label).collect()
    }

    pub fn n_classes(&self) -> usize {
        self.labels().len()
    }

    /// `(min, max)` series length.
    pub fn length_range(&self) -> (usize, usize) {
        self.items
            .iter()
            .map(|it| it.series.len())
            .fold((usize::MAX, 0), |(lo, hi), n| (lo.min(n), hi.max(n)))
    }

    pub fn is_equal_length(&self) -> bool {
        let (lo, hi) = self.length_range();
        lo == hi
    }

    /// Same split, name and labels with each series replaced by `f(index, series)`.
    pub(crate) fn with_series<F>(&self, f: F) -> Self
    where
        F: Fn(usize, &TimeSeries) -> TimeSeries + Sync,
    {
        let items = self
            .items
            .par_iter()
            .enumerate()
            .map(|(i, it)| LabeledSeries {
                series: f(i, &it.series),
                label: it.label.clone(),
            })
            .collect();
        Self {
            name: self.name.clone(),
            split: self.split,
            items,
        }
    }
}

/// Divisor used for the standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StdConvention {
    /// Divide by `n`.
    Population,
    /// Divide by `n - 1`; what the UCR archive files use.
    Sample,
}

fn mean_and_std(values: &[f64], convention: StdConvention) -> (f64, f64) {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let divisor = match convention {
        StdConvention::Sample if n > 1 => n - 1,
        _ => n,
    };
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / divisor as f64;
    (mean, var.sqrt())
}

/// Rescales to zero mean and unit population standard deviation.
///
/// A constant series maps to all zeros.
pub fn z_normalize(values: &[f64]) -> Result<TimeSeries> {
    check_values(values)?;
    let (mean, std) = mean_and_std(values, StdConvention::Population);
    let out = if std == 0.0 {
        vec![0.0; values.len()]
    } else {
        values.iter().map(|v| (v - mean) / std).collect()
    };
    Ok(TimeSeries(out))
}

/// `|mean| <= tol` and `|std - 1| <= tol`, with the population standard deviation.
pub fn is_z_normalized(values: &[f64], tol: f64) -> bool {
    is_z_normalized_with(values, tol, StdConvention::Population)
}

pub fn is_z_normalized_with(values: &[f64], tol: f64, convention: StdConvention) -> bool {
    if values.is_empty() {
        return false;
    }
    let (mean, std) = mean_and_std(values, convention);
    mean.abs() <= tol && (std - 1.0).abs() <= tol
}

/// Average series length rounded to the nearest integer, ties upward.
pub fn mean_length(dataset: &LabeledDataset) -> usize {
    let n = dataset.len();
    let total: usize = dataset.items().iter().map(|it| it.series.len()).sum();
    // floor(total / n + 1/2) in integers
    ((2 * total + n) / (2 * n)).max(1)
}

/// Inserts the mean of `values[pair]` and `values[pair + 1]` between them.
///
/// A single-element series has no adjacent pair; its value is duplicated.
pub fn insert_median(values: &mut Vec<f64>, pair: usize) -> Result<()> {
    match values.len() {
        0 => Err(Error::InvalidSeries("series is empty".into())),
        1 if pair == 0 => {
            values.push(values[0]);
            Ok(())
        }
        n if pair + 1 < n => {
            let mid = (values[pair] + values[pair + 1]) / 2.0;
            values.insert(pair + 1, mid);
            Ok(())
        }
        n => Err(Error::InvalidIndex {
            index: pair,
            len: n,
        }),
    }
}

/// Drops or inserts one random time step at a time until `values` has length `target`.
pub fn equalize_series<R: Rng + ?Sized>(values: &mut Vec<f64>, target: usize, rng: &mut R) {
    debug_assert!(target >= 1 && !values.is_empty());
    while values.len() > target {
        let i = rng.random_range(0..values.len());
        values.remove(i);
    }
    while values.len() < target {
        let pair = if values.len() == 1 {
            0
        } else {
            rng.random_range(0..values.len() - 1)
        };
        insert_median(values, pair).expect("pair index in range");
    }
}

/// Brings every series to [`mean_length`] by random single-step drops or
/// median insertions. Item `i` draws from its own stream of `seed`.
pub fn equalize_lengths(dataset: &LabeledDataset, seed: u64) -> LabeledDataset {
    let target = mean_length(dataset);
    dataset.with_series(|i, series| {
        if series.len() == target {
            return series.clone();
        }
        let mut values = series.as_slice().to_vec();
        let mut rng = item_rng(seed, Domain::Equalize, i, 0);
        equalize_series(&mut values, target, &mut rng);
        TimeSeries(values)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn dataset(series: &[&[f64]]) -> LabeledDataset {
        let items = series
            .iter()
            .enumerate()
            .map(|(i, s)| {
                LabeledSeries::new(
                    TimeSeries::new(s.to_vec()).unwrap(),
                    Label::new(i.to_string()),
                )
            })
            .collect();
        LabeledDataset::new("t", Split::Train, items).unwrap()
    }

    fn lengths(lens: &[usize]) -> LabeledDataset {
        let items = lens
            .iter()
            .map(|&n| LabeledSeries::new(TimeSeries::new(vec![0.0; n]).unwrap(), "a"))
            .collect();
        LabeledDataset::new("t", Split::Train, items).unwrap()
    }

    #[test]
    fn rejects_empty_and_non_finite() {
        assert!(matches!(
            TimeSeries::new(vec![]),
            Err(Error::InvalidSeries(_))
        ));
        assert!(matches!(
            TimeSeries::new(vec![1.0, f64::NAN]),
            Err(Error::InvalidSeries(_))
        ));
        assert!(matches!(z_normalize(&[]), Err(Error::InvalidSeries(_))));
        assert!(matches!(
            LabeledDataset::new("x", Split::Test, vec![]),
            Err(Error::InvalidDataset(_))
        ));
    }

    #[test]
    fn z_normalize_small_example() {
        // mean 2, population variance 2/3
        let expected = 1.0 / (2.0f64 / 3.0).sqrt();
        let z = z_normalize(&[1.0, 2.0, 3.0]).unwrap();
        assert!((z.as_slice()[0] + expected).abs() < 1e-12);
        assert!(z.as_slice()[1].abs() < 1e-12);
        assert!((z.as_slice()[2] - expected).abs() < 1e-12);
        assert!((expected - 1.224744871391589).abs() < 1e-12);
    }

    #[test]
    fn z_normalize_constant_is_zeros() {
        assert_eq!(z_normalize(&[5.0, 5.0, 5.0]).unwrap().as_slice(), &[0.0; 3]);
    }

    #[test]
    fn z_normalized_check() {
        let z = z_normalize(&[3.0, -1.0, 8.5, 2.0]).unwrap();
        assert!(is_z_normalized(z.as_slice(), 1e-6));
        assert!(!is_z_normalized(&[0.0, 10.0, 20.0], 1e-6));
        assert!(is_z_normalized(&[-1.0, 1.0], 1e-6));
        let s = 0.5f64.sqrt();
        assert!(!is_z_normalized(&[-s, s], 1e-6));
        assert!(is_z_normalized_with(&[-s, s], 1e-6, StdConvention::Sample));
    }

    #[test]
    fn mean_length_rounding() {
        assert_eq!(mean_length(&lengths(&[4, 6])), 5);
        assert_eq!(mean_length(&lengths(&[3, 3, 3])), 3);
        assert_eq!(mean_length(&lengths(&[3, 4])), 4);
        assert_eq!(mean_length(&lengths(&[1, 2, 2])), 2);
    }

    #[test]
    fn insert_median_forced_pair() {
        let mut v = vec![2.0, 4.0];
        insert_median(&mut v, 0).unwrap();
        assert_eq!(v, vec![2.0, 3.0, 4.0]);
        assert!(matches!(
            insert_median(&mut v, 2),
            Err(Error::InvalidIndex { index: 2, len: 3 })
        ));
    }

    #[test]
    fn single_value_lengthens_by_duplication() {
        let mut v = vec![7.0];
        equalize_series(&mut v, 4, &mut ChaCha8Rng::seed_from_u64(0));
        assert_eq!(v, vec![7.0; 4]);
    }

    #[test]
    fn equalize_mixed_example() {
        let ds = dataset(&[&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0], &[1.0, 3.0, 5.0, 7.0]]);
        let out = equalize_lengths(&ds, 11);
        assert!(out.items().iter().all(|it| it.series.len() == 5));
        let grown = out.items()[1].series.as_slice();
        let pair_means = [2.0, 4.0, 6.0];
        let inserted: Vec<_> = grown
            .iter()
            .filter(|v| ![1.0, 3.0, 5.0, 7.0].contains(*v))
            .collect();
        assert_eq!(inserted.len(), 1);
        assert!(pair_means.contains(inserted[0]));
    }

    #[test]
    fn equalize_noop_when_equal() {
        let ds = dataset(&[&[1.0, 2.0], &[3.0, 4.0]]);
        assert_eq!(equalize_lengths(&ds, 3), ds);
    }

    fn is_subsequence(short: &[f64], long: &[f64]) -> bool {
        let mut it = long.iter();
        short.iter().all(|s| it.any(|l| l == s))
    }

    proptest! {
        #[test]
        fn z_normalize_is_idempotent(v in prop::collection::vec(-1e3f64..1e3, 1..64)) {
            let once = z_normalize(&v).unwrap();
            let twice = z_normalize(once.as_slice()).unwrap();
            for (a, b) in once.as_slice().iter().zip(twice.as_slice()) {
                prop_assert!((a - b).abs() <= 1e-9);
            }
        }

        #[test]
        fn equalize_laws(
            series in prop::collection::vec(prop::collection::vec(-10f64..10.0, 1..20), 1..8),
            seed in any::<u64>(),
        ) {
            let items = series
                .iter()
                .enumerate()
                .map(|(i, s)| LabeledSeries::new(TimeSeries::new(s.clone()).unwrap(), Label::new(format!("c{}", i % 3))))
                .collect();
            let ds = LabeledDataset::new("p", Split::Train, items).unwrap();
            let target = mean_length(&ds);
            let out = equalize_lengths(&ds, seed);
            prop_assert_eq!(out.len(), ds.len());
            prop_assert_eq!(&out, &equalize_lengths(&ds, seed));
            for (a, b) in ds.items().iter().zip(out.items()) {
                prop_assert_eq!(&a.label, &b.label);
                prop_assert_eq!(b.series.len(), target);
                let (src, dst) = (a.series.as_slice(), b.series.as_slice());
                if src.len() >= target {
                    prop_assert!(is_subsequence(dst, src));
                } else {
                    prop_assert!(is_subsequence(src, dst));
                }
            }
        }

        #[test]
        fn each_step_is_sub_or_super_sequence(
            v in prop::collection::vec(-10f64..10.0, 2..20),
            seed in any::<u64>(),
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut shrink = v.clone();
            equalize_series(&mut shrink, v.len() - 1, &mut rng);
            prop_assert!(is_subsequence(&shrink, &v));
            let mut grow = v.clone();
            equalize_series(&mut grow, v.len() + 1, &mut rng);
            prop_assert!(is_subsequence(&v, &grow));
        }
    }
}
