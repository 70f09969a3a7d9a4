//! Reading and writing the UCR 2018 archive's TSV layout.
//!
//! One series per row: the class label, then the values, tab separated.
//! Variable-length datasets pad shorter rows with trailing `NaN` fields.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::series::{
    is_z_normalized_with, Label, LabeledDataset, LabeledSeries, Split, StdConvention, TimeSeries,
};

/// Tolerance used when reporting whether archive series are z-normalized.
/// Archive values are stored with about eight significant digits.
pub const Z_NORMALIZED_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum SeriesLength {
    Fixed(usize),
    Variable { min: usize, max: usize },
}

impl SeriesLength {
    fn of(datasets: &[&LabeledDataset]) -> Self {
        let (min, max) = datasets
            .iter()
            .map(|d| d.length_range())
            .fold((usize::MAX, 0), |(lo, hi), (a, b)| (lo.min(a), hi.max(b)));
        if min == max {
            SeriesLength::Fixed(min)
        } else {
            SeriesLength::Variable { min, max }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatasetMetadata {
    pub length: SeriesLength,
    pub n_classes: usize,
    pub n_train: usize,
    pub n_test: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetPair {
    pub name: String,
    pub train: LabeledDataset,
    pub test: LabeledDataset,
    pub metadata: DatasetMetadata,
}

impl DatasetPair {
    pub fn new(name: impl Into<String>, train: LabeledDataset, test: LabeledDataset) -> Self {
        let metadata = DatasetMetadata {
            length: SeriesLength::of(&[&train, &test]),
            n_classes: train.n_classes(),
            n_train: train.len(),
            n_test: test.len(),
        };
        Self {
            name: name.into(),
            train,
            test,
            metadata,
        }
    }
}

pub fn split_path(dir: &Path, name: &str, split: Split) -> PathBuf {
    let suffix = match split {
        Split::Train => "TRAIN",
        Split::Test => "TEST",
    };
    dir.join(format!("{name}_{suffix}.tsv"))
}

/// Loads `<name>_TRAIN.tsv` and `<name>_TEST.tsv` from `dir`.
pub fn load_ucr_split(dir: &Path, name: &str) -> Result<DatasetPair> {
    let train = read_ucr_file(&split_path(dir, name, Split::Train), name, Split::Train)?;
    let test = read_ucr_file(&split_path(dir, name, Split::Test), name, Split::Test)?;
    Ok(DatasetPair::new(name, train, test))
}

pub fn read_ucr_file(path: &Path, name: &str, split: Split) -> Result<LabeledDataset> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == io::ErrorKind::NotFound => {
            return Err(Error::FileNotFound(path.to_owned()))
        }
        Err(e) => return Err(e.into()),
    };
    let items = parse_ucr(&text, path)?;
    LabeledDataset::new(name, split, items)
}

/// Parses TSV text. Falls back to commas when the first row has no tab.
pub fn parse_ucr(text: &str, path: &Path) -> Result<Vec<LabeledSeries>> {
    let sep = match text.lines().find(|l| !l.trim().is_empty()) {
        Some(first) if !first.contains('\t') && first.contains(',') => ',',
        _ => '\t',
    };
    text.lines()
        .enumerate()
        .filter(|(_, line)| !line.trim().is_empty())
        .map(|(i, line)| parse_row(line, sep, i + 1, path))
        .collect()
}

fn parse_row(line: &str, sep: char, row: usize, path: &Path) -> Result<LabeledSeries> {
    let mut fields = line.split(sep).map(str::trim);
    let label = fields.next().unwrap_or_default();
    if label.is_empty() {
        return Err(Error::ParseError {
            path: path.to_owned(),
            row,
            column: 1,
            message: "missing class label".into(),
        });
    }
    let mut values = Vec::new();
    for (i, field) in fields.enumerate() {
        let column = i + 2;
        let v: f64 = field.parse().map_err(|_| Error::ParseError {
            path: path.to_owned(),
            row,
            column,
            message: format!("not a number: {field:?}"),
        })?;
        if v.is_infinite() {
            return Err(Error::ParseError {
                path: path.to_owned(),
                row,
                column,
                message: format!("non-finite value {field:?}"),
            });
        }
        values.push(v);
    }
    while values.last().is_some_and(|v| v.is_nan()) {
        values.pop();
    }
    if values.is_empty() {
        return Err(Error::EmptySeries {
            path: path.to_owned(),
            row,
        });
    }
    if let Some(i) = values.iter().position(|v| v.is_nan()) {
        return Err(Error::MissingValueUnsupported {
            path: path.to_owned(),
            row,
            column: i + 2,
        });
    }
    Ok(LabeledSeries::new(
        TimeSeries::new(values)?,
        Label::new(label),
    ))
}

/// Renders `dataset` in the archive layout, padding short rows with `NaN`.
///
/// Values use Rust's shortest round-trip formatting.
pub fn format_ucr(dataset: &LabeledDataset) -> String {
    let (_, width) = dataset.length_range();
    let mut out = String::new();
    for item in dataset.items() {
        out.push_str(item.label.as_str());
        for v in item.series.as_slice() {
            write!(out, "\t{v:?}").expect("writing to a String");
        }
        for _ in item.series.len()..width {
            out.push_str("\tNaN");
        }
        out.push('\n');
    }
    out
}

/// Writes `dataset` to `path`, replacing it atomically.
pub fn write_ucr(dataset: &LabeledDataset, path: &Path) -> Result<()> {
    if dataset.len() == 0 {
        return Err(Error::InvalidDataset(format!(
            "{} has no items",
            dataset.name()
        )));
    }
    write_atomic(path, format_ucr(dataset).as_bytes())
}

/// Writes to a sibling temporary file and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::InvalidInput(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(
        ".{}.{}.tmp",
        file_name.to_string_lossy(),
        std::process::id()
    ));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.map_err(Error::from)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatasetSummary {
    pub name: String,
    pub n_train: usize,
    pub n_test: usize,
    pub n_classes: usize,
    pub length: SeriesLength,
    /// Fraction of training series that are z-normalized at [`Z_NORMALIZED_TOL`]
    /// under either standard-deviation convention.
    pub z_normalized_fraction: f64,
    pub z_normalized: bool,
    /// Convention every training series satisfies, if one does.
    pub z_convention: Option<StdConvention>,
}

pub fn summarize(pair: &DatasetPair) -> DatasetSummary {
    let train = pair.train.items();
    let passes =
        |it: &&LabeledSeries, c| is_z_normalized_with(it.series.as_slice(), Z_NORMALIZED_TOL, c);
    let normalized = train
        .iter()
        .filter(|it| passes(it, StdConvention::Population) || passes(it, StdConvention::Sample))
        .count();
    let z_convention = [StdConvention::Population, StdConvention::Sample]
        .into_iter()
        .find(|&c| train.iter().all(|it| passes(&it, c)));
    DatasetSummary {
        name: pair.name.clone(),
        n_train: pair.metadata.n_train,
        n_test: pair.metadata.n_test,
        n_classes: pair.metadata.n_classes,
        length: pair.metadata.length,
        z_normalized_fraction: normalized as f64 / train.len() as f64,
        z_normalized: normalized == train.len(),
        z_convention,
    }
}
