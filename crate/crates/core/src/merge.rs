//! DTW-Merge augmentation.
//!
//! Two same-class series are aligned with [`dtw`]; a split point is drawn
//! along the warping path from a Gaussian centred on its midpoint, and the
//! prefix of the first series up to the split is joined to the suffix of the
//! second series after it.

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dtw::{dtw, WarpingPath};
use crate::error::{Error, Result};
use crate::rng::{item_rng, Domain};
use crate::series::{check_values, Label, LabeledDataset, LabeledSeries, TimeSeries};

/// A split point on a warping path of length `L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SplitSample {
    /// 1-based position on the path, in `[1, L]`.
    pub position: usize,
    /// `L / 2`
    pub mu: f64,
    /// `L / 10`
    pub sigma_squared: f64,
}

impl SplitSample {
    /// 0-based index into [`WarpingPath::pairs`].
    pub fn index(&self) -> usize {
        self.position - 1
    }
}

/// Draws from `N(L/2, L/10)`, rounds to the nearest integer and clamps into `[1, L]`.
pub fn sample_split_index<R: Rng + ?Sized>(path_length: usize, rng: &mut R) -> SplitSample {
    assert!(path_length >= 1, "warping paths are never empty");
    let l = path_length as f64;
    let mu = l / 2.0;
    let sigma_squared = l / 10.0;
    let normal = Normal::new(mu, sigma_squared.sqrt()).expect("finite positive deviation");
    let draw = normal.sample(rng).round();
    let position = draw.clamp(1.0, l) as usize;
    SplitSample {
        position,
        mu,
        sigma_squared,
    }
}

/// Joins `x[..=p]` with the part of `y` after `q`, where `(p, q)` is the path
/// pair at `split_index`. With `inclusive_suffix` the suffix starts at `y[q]`.
pub fn splice(
    x: &[f64],
    y: &[f64],
    path: &WarpingPath,
    split_index: usize,
    inclusive_suffix: bool,
) -> Result<Vec<f64>> {
    let (p, q) = path.get(split_index).ok_or(Error::InvalidIndex {
        index: split_index,
        len: path.len(),
    })?;
    if p >= x.len() || q >= y.len() {
        return Err(Error::InvalidInput(format!(
            "path pair ({p}, {q}) outside series of lengths {} and {}",
            x.len(),
            y.len()
        )));
    }
    let start = if inclusive_suffix { q } else { q + 1 };
    let mut out = Vec::with_capacity(p + 1 + y.len() - start);
    out.extend_from_slice(&x[..=p]);
    out.extend_from_slice(&y[start..]);
    Ok(out)
}

/// Replaces the value at `junction` with the mean of the input over a window
/// of `window` values centred on it, truncated at the series edges.
pub fn smooth_junction(values: &[f64], junction: usize, window: usize) -> Result<TimeSeries> {
    check_values(values)?;
    check_window(window)?;
    if junction >= values.len() {
        return Err(Error::InvalidIndex {
            index: junction,
            len: values.len(),
        });
    }
    let half = window / 2;
    let lo = junction.saturating_sub(half);
    let hi = (junction + half).min(values.len() - 1);
    let span = &values[lo..=hi];
    let mut out = values.to_vec();
    out[junction] = span.iter().sum::<f64>() / span.len() as f64;
    TimeSeries::new(out)
}

fn check_window(window: usize) -> Result<()> {
    if window < 3 || window.is_multiple_of(2) {
        return Err(Error::InvalidConfig(format!(
            "smoothing window must be odd and at least 3, got {window}"
        )));
    }
    Ok(())
}

/// Per-merge options. The defaults reproduce plain DTW-Merge.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergeOptions {
    pub inclusive_suffix: bool,
    /// Smoothing window applied at the junction, if any.
    pub smooth_window: Option<usize>,
}

/// A merged series together with where it was cut.
#[derive(Debug, Clone, PartialEq)]
pub struct Merged {
    pub series: TimeSeries,
    pub split: SplitSample,
    /// The aligned pair `(p, q)` at the split, 0-based.
    pub aligned: (usize, usize),
    /// Index of the first suffix value in `series` (or the last value when the suffix is empty).
    pub junction: usize,
    pub path_length: usize,
}

pub fn dtw_merge_with<R: Rng + ?Sized>(
    x: &[f64],
    y: &[f64],
    options: &MergeOptions,
    rng: &mut R,
) -> Result<Merged> {
    if let Some(w) = options.smooth_window {
        check_window(w)?;
    }
    let path = dtw(x, y)?.path;
    let split = sample_split_index(path.len(), rng);
    let aligned = path.pairs()[split.index()];
    let values = splice(x, y, &path, split.index(), options.inclusive_suffix)?;
    let junction = (aligned.0 + 1).min(values.len() - 1);
    let series = match options.smooth_window {
        Some(w) => smooth_junction(&values, junction, w)?,
        None => TimeSeries::new(values)?,
    };
    Ok(Merged {
        series,
        split,
        aligned,
        junction,
        path_length: path.len(),
    })
}

/// One DTW-Merge sample of `x` and `y` with the default options.
pub fn dtw_merge<R: Rng + ?Sized>(x: &[f64], y: &[f64], rng: &mut R) -> Result<TimeSeries> {
    dtw_merge_with(x, y, &MergeOptions::default(), rng).map(|m| m.series)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pairing {
    /// Partner drawn uniformly from the other members of the class.
    #[default]
    RandomSameClass,
    /// Partners taken in turn from the other members of the class.
    RoundRobinSameClass,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AugmentationConfig {
    /// Synthetic samples per original training sample.
    pub factor: usize,
    pub pairing: Pairing,
    pub seed: u64,
    pub smooth_junction: bool,
    pub smooth_window: usize,
    pub inclusive_suffix: bool,
}

impl Default for AugmentationConfig {
    fn default() -> Self {
        Self {
            factor: 1,
            pairing: Pairing::RandomSameClass,
            seed: 0,
            smooth_junction: false,
            smooth_window: 3,
            inclusive_suffix: false,
        }
    }
}

impl AugmentationConfig {
    pub fn validate(&self) -> Result<()> {
        check_window(self.smooth_window)
    }

    pub fn merge_options(&self) -> MergeOptions {
        MergeOptions {
            inclusive_suffix: self.inclusive_suffix,
            smooth_window: self.smooth_junction.then_some(self.smooth_window),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Augmented {
    /// Originals followed by `factor * n` synthetic items.
    pub dataset: LabeledDataset,
    /// Synthetic items produced by merging a singleton-class series with itself.
    pub self_merges: usize,
}

/// Appends `factor` DTW-Merge samples per training item.
///
/// Synthetic item `replica * n + i` uses item `i` as the prefix source and a
/// classmate as the suffix source, and draws from its own random stream, so
/// the output is independent of scheduling.
pub fn augment_dataset(train: &LabeledDataset, config: &AugmentationConfig) -> Result<Augmented> {
    config.validate()?;
    let items = train.items();
    let n = items.len();

    let mut classes: BTreeMap<&Label, Vec<usize>> = BTreeMap::new();
    for (i, it) in items.iter().enumerate() {
        classes.entry(&it.label).or_default().push(i);
    }
    let options = config.merge_options();

    let synthetic: Vec<(LabeledSeries, bool)> = (0..config.factor * n)
        .into_par_iter()
        .map(|k| {
            let (replica, source) = (k / n, k % n);
            let mut rng = item_rng(config.seed, Domain::Augment, source, replica);
            let a = &items[source];
            let members = &classes[&a.label];
            let partner = pick_partner(members, source, replica, config.pairing, &mut rng);
            let merged = dtw_merge_with(
                a.series.as_slice(),
                items[partner].series.as_slice(),
                &options,
                &mut rng,
            )?;
            Ok((
                LabeledSeries {
                    series: merged.series,
                    label: a.label.clone(),
                },
                partner == source,
            ))
        })
        .collect::<Result<_>>()?;

    let self_merges = synthetic.iter().filter(|(_, s)| *s).count();
    let mut all = items.to_vec();
    all.extend(synthetic.into_iter().map(|(it, _)| it));
    Ok(Augmented {
        dataset: LabeledDataset::new(train.name(), train.split(), all)?,
        self_merges,
    })
}

/// A classmate of `source` other than itself, or `source` when it is alone in its class.
fn pick_partner<R: Rng + ?Sized>(
    members: &[usize],
    source: usize,
    replica: usize,
    pairing: Pairing,
    rng: &mut R,
) -> usize {
    let others = members.len() - 1;
    if others == 0 {
        return source;
    }
    let rank = members.binary_search(&source).expect("source is a member");
    let slot = match pairing {
        Pairing::RandomSameClass => rng.random_range(0..others),
        Pairing::RoundRobinSameClass => (rank + replica) % others,
    };
    // skip over the source's own slot
    members[if slot >= rank { slot + 1 } else { slot }]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::Split;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn ds(items: &[(&[f64], &str)]) -> LabeledDataset {
        let items = items
            .iter()
            .map(|(v, l)| LabeledSeries::new(TimeSeries::new(v.to_vec()).unwrap(), *l))
            .collect();
        LabeledDataset::new("d", Split::Train, items).unwrap()
    }

    #[test]
    fn unit_path_always_splits_at_one() {
        let mut r = rng(1);
        for _ in 0..100 {
            let s = sample_split_index(1, &mut r);
            assert_eq!(s.position, 1);
            assert_eq!(s.index(), 0);
        }
    }

    #[test]
    fn sampler_is_deterministic() {
        let a: Vec<_> = (0..20)
            .map({
                let mut r = rng(9);
                move |_| sample_split_index(37, &mut r).position
            })
            .collect();
        let b: Vec<_> = (0..20)
            .map({
                let mut r = rng(9);
                move |_| sample_split_index(37, &mut r).position
            })
            .collect();
        assert_eq!(a, b);
    }

    #[test]
    fn splice_on_hand_traced_path() {
        let (x, y) = ([0.0, 1.0, 2.0], [0.0, 2.0]);
        let path = dtw(&x, &y).unwrap().path;
        assert_eq!(path.pairs(), &[(0, 0), (1, 0), (2, 1)]);
        assert_eq!(
            splice(&x, &y, &path, 1, false).unwrap(),
            vec![0.0, 1.0, 2.0]
        );
        // last pair: all of x, nothing of y
        assert_eq!(splice(&x, &y, &path, 2, false).unwrap(), x.to_vec());
        // first pair: x[0] then y[1..]
        assert_eq!(splice(&x, &y, &path, 0, false).unwrap(), vec![0.0, 2.0]);
        assert_eq!(
            splice(&x, &y, &path, 1, true).unwrap(),
            vec![0.0, 1.0, 0.0, 2.0]
        );
        assert!(matches!(
            splice(&x, &y, &path, 3, false),
            Err(Error::InvalidIndex { index: 3, len: 3 })
        ));
    }

    #[test]
    fn smoothing_examples() {
        let s = smooth_junction(&[0.0, 0.0, 9.0, 9.0], 1, 3).unwrap();
        assert_eq!(s.as_slice(), &[0.0, 3.0, 9.0, 9.0]);
        let s = smooth_junction(&[2.0, 4.0, 9.0], 0, 3).unwrap();
        assert_eq!(s.as_slice(), &[3.0, 4.0, 9.0]);
        let s = smooth_junction(&[1.0, 5.0, 5.0, 5.0, 5.0, 1.0], 2, 3).unwrap();
        assert_eq!(s.as_slice(), &[1.0, 5.0, 5.0, 5.0, 5.0, 1.0]);
        assert!(matches!(
            smooth_junction(&[1.0, 2.0], 2, 3),
            Err(Error::InvalidIndex { index: 2, len: 2 })
        ));
        assert!(matches!(
            smooth_junction(&[1.0, 2.0], 0, 4),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn factor_zero_is_identity() {
        let train = ds(&[(&[1.0, 2.0], "a"), (&[3.0, 1.0], "b")]);
        let cfg = AugmentationConfig {
            factor: 0,
            ..Default::default()
        };
        let out = augment_dataset(&train, &cfg).unwrap();
        assert_eq!(out.dataset, train);
        assert_eq!(out.self_merges, 0);
    }

    #[test]
    fn factor_one_doubles_and_keeps_labels() {
        let train = ds(&[
            (&[1.0, 2.0, 3.0], "a"),
            (&[0.0, 5.0, 1.0], "b"),
            (&[1.0, 3.0, 3.0], "a"),
            (&[0.5, 4.0, 1.0], "b"),
        ]);
        for pairing in [Pairing::RandomSameClass, Pairing::RoundRobinSameClass] {
            let cfg = AugmentationConfig {
                pairing,
                ..Default::default()
            };
            let out = augment_dataset(&train, &cfg).unwrap();
            assert_eq!(out.dataset.len(), 8);
            assert_eq!(out.self_merges, 0);
            for i in 0..4 {
                assert_eq!(out.dataset.items()[4 + i].label, train.items()[i].label);
            }
            assert_eq!(out, augment_dataset(&train, &cfg).unwrap());
        }
    }

    #[test]
    fn singleton_classes_self_merge() {
        let train = ds(&[(&[1.0, 4.0, 2.0], "a"), (&[7.0, 0.0], "b")]);
        let out = augment_dataset(&train, &AugmentationConfig::default()).unwrap();
        assert_eq!(out.self_merges, 2);
        assert_eq!(&out.dataset.items()[2..], train.items());
    }

    #[test]
    fn round_robin_cycles_classmates() {
        let members = [0, 2, 5, 7];
        let mut r = rng(0);
        let seen: Vec<_> = (0..3)
            .map(|k| pick_partner(&members, 2, k, Pairing::RoundRobinSameClass, &mut r))
            .collect();
        assert_eq!(seen, vec![5, 7, 0]);
    }

    #[test]
    fn invalid_smoothing_config() {
        let train = ds(&[(&[1.0], "a")]);
        let cfg = AugmentationConfig {
            smooth_window: 2,
            ..Default::default()
        };
        assert!(matches!(
            augment_dataset(&train, &cfg),
            Err(Error::InvalidConfig(_))
        ));
    }

    fn series(max: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-5f64..5.0, 1..=max)
    }

    proptest! {
        #[test]
        fn self_merge_is_identity(x in series(40), seed in any::<u64>()) {
            let merged = dtw_merge(&x, &x, &mut rng(seed)).unwrap();
            prop_assert_eq!(merged.as_slice(), &x[..]);
        }

        #[test]
        fn length_law_and_provenance(x in series(30), y in series(30), seed in any::<u64>()) {
            let m = dtw_merge_with(&x, &y, &MergeOptions::default(), &mut rng(seed)).unwrap();
            let (p, q) = m.aligned;
            let out = m.series.as_slice();
            prop_assert_eq!(out.len(), (p + 1) + (y.len() - (q + 1)));
            prop_assert_eq!(&out[..=p], &x[..=p]);
            prop_assert_eq!(&out[p + 1..], &y[q + 1..]);
            prop_assert!(m.split.position >= 1 && m.split.position <= m.path_length);
        }

        #[test]
        fn random_pairing_never_pairs_with_self(
            labels in prop::collection::vec(0u8..3, 2..12),
            seed in any::<u64>(),
        ) {
            let items = labels
                .iter()
                .enumerate()
                .map(|(i, l)| LabeledSeries::new(
                    TimeSeries::new(vec![i as f64, *l as f64, 1.0]).unwrap(),
                    Label::new(l.to_string()),
                ))
                .collect();
            let train = LabeledDataset::new("p", Split::Train, items).unwrap();
            let singletons = (0..3u8).filter(|c| labels.iter().filter(|l| *l == c).count() == 1).count();
            let cfg = AugmentationConfig { seed, factor: 2, ..Default::default() };
            let out = augment_dataset(&train, &cfg).unwrap();
            prop_assert_eq!(out.self_merges, 2 * singletons);
            prop_assert_eq!(out.dataset.len(), 3 * labels.len());
        }
    }
}
