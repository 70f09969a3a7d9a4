//! DTW-Merge: augmenting univariate time-series training sets by splicing
//! same-class series at a point of their optimal DTW alignment.
//!
//! * [`series`]: series and dataset types, z-normalization, length equalization
//! * [`dtw`]: exact DTW with path extraction, banded DTW and a brute-force oracle
//! * [`merge`]: the merge itself and dataset-level augmentation
//! * [`ucr`]: UCR archive TSV input/output
//! * [`evaluation`]: 1NN-DTW, PCE/MPCE and paired t-tests

pub mod dtw;
pub mod error;
pub mod evaluation;
pub mod merge;
pub mod rng;
pub mod series;
pub mod ucr;

pub use dtw::{dtw, dtw_banded, dtw_distance, oracle_dtw, DtwResult, WarpingPath};
pub use error::{Error, Result};
pub use evaluation::{
    accuracy, compare_runs, mpce, nn1_dtw_classify, paired_t_test, pce, ComparisonSummary,
    EvaluationReport, TTest,
};
pub use merge::{
    augment_dataset, dtw_merge, sample_split_index, smooth_junction, AugmentationConfig, Augmented,
    Pairing, SplitSample,
};
pub use series::{
    equalize_lengths, is_z_normalized, mean_length, z_normalize, Label, LabeledDataset,
    LabeledSeries, Split, TimeSeries,
};
pub use ucr::{load_ucr_split, summarize, write_ucr, DatasetPair};
