//! Library behaviour on real UCR archive datasets.

use std::path::{Path, PathBuf};

use dtwmerge::evaluation::check_test_labels;
use dtwmerge::ucr::SeriesLength;
use dtwmerge::{
    augment_dataset, equalize_lengths, load_ucr_split, mean_length, AugmentationConfig, Pairing,
};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/ucr")
}

#[test]
fn loads_fixed_and_variable_length_datasets() {
    let gun = load_ucr_split(&fixtures().join("GunPoint"), "GunPoint").unwrap();
    assert_eq!(gun.metadata.n_train, 50);
    assert_eq!(gun.metadata.n_test, 150);
    assert_eq!(gun.metadata.n_classes, 2);
    assert_eq!(gun.metadata.length, SeriesLength::Fixed(150));
    check_test_labels(&gun.train, &gun.test).unwrap();

    let pick = load_ucr_split(
        &fixtures().join("PickupGestureWiimoteZ"),
        "PickupGestureWiimoteZ",
    )
    .unwrap();
    assert_eq!(pick.metadata.n_classes, 10);
    assert!(matches!(
        pick.metadata.length,
        SeriesLength::Variable { min: 29, max: 361 }
    ));
    assert!(pick
        .train
        .items()
        .iter()
        .all(|it| it.series.as_slice().iter().all(|v| v.is_finite())));
}

#[test]
fn equalization_on_variable_length_archive() {
    let pick = load_ucr_split(
        &fixtures().join("PickupGestureWiimoteZ"),
        "PickupGestureWiimoteZ",
    )
    .unwrap();
    let target = mean_length(&pick.train);
    let eq = equalize_lengths(&pick.train, 5);
    assert!(eq.items().iter().all(|it| it.series.len() == target));
    assert_eq!(eq, equalize_lengths(&pick.train, 5));
    assert_ne!(eq, equalize_lengths(&pick.train, 6));
}

#[test]
fn augmentation_keeps_labels_and_values() {
    let pair = load_ucr_split(&fixtures().join("ArrowHead"), "ArrowHead").unwrap();
    for pairing in [Pairing::RandomSameClass, Pairing::RoundRobinSameClass] {
        let cfg = AugmentationConfig {
            factor: 2,
            pairing,
            seed: 99,
            ..Default::default()
        };
        let out = augment_dataset(&pair.train, &cfg).unwrap();
        let n = pair.train.len();
        assert_eq!(out.dataset.len(), 3 * n);
        assert_eq!(out.self_merges, 0);
        assert_eq!(&out.dataset.items()[..n], pair.train.items());
        for (k, synth) in out.dataset.items()[n..].iter().enumerate() {
            let source = &pair.train.items()[k % n];
            assert_eq!(synth.label, source.label);
            // the prefix comes from the source series
            assert_eq!(synth.series.as_slice()[0], source.series.as_slice()[0]);
            // every value comes from a classmate
            let classmates: Vec<f64> = pair
                .train
                .items()
                .iter()
                .filter(|it| it.label == source.label)
                .flat_map(|it| it.series.as_slice().iter().copied())
                .collect();
            assert!(synth
                .series
                .as_slice()
                .iter()
                .all(|v| classmates.contains(v)));
        }
        assert_eq!(out, augment_dataset(&pair.train, &cfg).unwrap());
    }
}
