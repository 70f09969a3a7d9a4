//! Python bindings: `import dtwmerge`.
//!
//! Series cross the boundary as lists of floats, labels as strings.

use std::path::PathBuf;

use dtwmerge::rng::{item_rng, Domain};
use dtwmerge::ucr::{self, DatasetPair};
use dtwmerge::{
    merge::{dtw_merge_with, MergeOptions},
    Error, Label, LabeledDataset, LabeledSeries, Pairing, Split, TimeSeries,
};
use pyo3::exceptions::{PyFileNotFoundError, PyIOError, PyValueError};
use pyo3::prelude::*;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::FileNotFound(_) => PyFileNotFoundError::new_err(e.to_string()),
        Error::Io(_) => PyIOError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn parse_split(s: &str) -> PyResult<Split> {
    match s.to_ascii_lowercase().as_str() {
        "train" => Ok(Split::Train),
        "test" => Ok(Split::Test),
        _ => Err(PyValueError::new_err(format!(
            "split must be 'train' or 'test', got {s:?}"
        ))),
    }
}

fn parse_pairing(s: &str) -> PyResult<Pairing> {
    match s {
        "random" | "random-same-class" => Ok(Pairing::RandomSameClass),
        "round-robin" | "round-robin-same-class" => Ok(Pairing::RoundRobinSameClass),
        _ => Err(PyValueError::new_err(format!("unknown pairing {s:?}"))),
    }
}

fn labels(v: Vec<String>) -> Vec<Label> {
    v.into_iter().map(Label::new).collect()
}

/// Optimal DTW alignment: `distance` and a 0-based `path` of `(p, q)` pairs.
#[pyclass(name = "DtwResult", module = "dtwmerge", frozen, skip_from_py_object)]
struct PyDtwResult {
    #[pyo3(get)]
    distance: f64,
    #[pyo3(get)]
    path: Vec<(usize, usize)>,
}

#[pymethods]
impl PyDtwResult {
    fn __repr__(&self) -> String {
        format!(
            "DtwResult(distance={:?}, path_length={})",
            self.distance,
            self.path.len()
        )
    }
}

impl From<dtwmerge::DtwResult> for PyDtwResult {
    fn from(r: dtwmerge::DtwResult) -> Self {
        Self {
            distance: r.distance,
            path: r.path.pairs().to_vec(),
        }
    }
}

/// A labelled split: parallel lists of series and labels.
#[pyclass(name = "Dataset", module = "dtwmerge", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyDataset {
    inner: LabeledDataset,
}

#[pymethods]
impl PyDataset {
    #[new]
    #[pyo3(signature = (series, labels, name = "dataset".to_string(), split = "train"))]
    fn new(
        series: Vec<Vec<f64>>,
        labels: Vec<String>,
        name: String,
        split: &str,
    ) -> PyResult<Self> {
        if series.len() != labels.len() {
            return Err(PyValueError::new_err(format!(
                "{} series but {} labels",
                series.len(),
                labels.len()
            )));
        }
        let items = series
            .into_iter()
            .zip(labels)
            .map(|(s, l)| Ok(LabeledSeries::new(TimeSeries::new(s)?, Label::new(l))))
            .collect::<dtwmerge::Result<Vec<_>>>()
            .map_err(py_err)?;
        let inner = LabeledDataset::new(name, parse_split(split)?, items).map_err(py_err)?;
        Ok(Self { inner })
    }

    /// Reads one `<NAME>_TRAIN.tsv` / `<NAME>_TEST.tsv` file.
    #[staticmethod]
    #[pyo3(signature = (path, name = None, split = "train"))]
    fn read(path: PathBuf, name: Option<String>, split: &str) -> PyResult<Self> {
        let name = name.unwrap_or_else(|| {
            path.file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default()
        });
        let inner = ucr::read_ucr_file(&path, &name, parse_split(split)?).map_err(py_err)?;
        Ok(Self { inner })
    }

    fn write(&self, path: PathBuf) -> PyResult<()> {
        ucr::write_ucr(&self.inner, &path).map_err(py_err)
    }

    #[getter]
    fn name(&self) -> &str {
        self.inner.name()
    }

    #[getter]
    fn split(&self) -> &'static str {
        match self.inner.split() {
            Split::Train => "train",
            Split::Test => "test",
        }
    }

    #[getter]
    fn series(&self) -> Vec<Vec<f64>> {
        self.inner
            .items()
            .iter()
            .map(|it| it.series.as_slice().to_vec())
            .collect()
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.inner
            .items()
            .iter()
            .map(|it| it.label.to_string())
            .collect()
    }

    #[getter]
    fn classes(&self) -> Vec<String> {
        self.inner
            .labels()
            .into_iter()
            .map(|l| l.to_string())
            .collect()
    }

    #[getter]
    fn n_classes(&self) -> usize {
        self.inner.n_classes()
    }

    /// `(min, max)` series length.
    #[getter]
    fn length_range(&self) -> (usize, usize) {
        self.inner.length_range()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Dataset(name={:?}, split={:?}, n={}, classes={})",
            self.inner.name(),
            self.split(),
            self.inner.len(),
            self.inner.n_classes()
        )
    }

    /// Resamples every series to the rounded mean length.
    #[pyo3(signature = (seed = 0))]
    fn equalize(&self, seed: u64) -> Self {
        Self {
            inner: dtwmerge::equalize_lengths(&self.inner, seed),
        }
    }

    /// Appends `factor` DTW-Merge samples per item.
    /// Returns `(augmented, self_merges)`.
    #[allow(clippy::too_many_arguments)]
    #[pyo3(signature = (factor = 1, seed = 0, pairing = "random", smooth = false, smooth_window = 3, inclusive_suffix = false))]
    fn augment(
        &self,
        py: Python<'_>,
        factor: usize,
        seed: u64,
        pairing: &str,
        smooth: bool,
        smooth_window: usize,
        inclusive_suffix: bool,
    ) -> PyResult<(Self, usize)> {
        let config = dtwmerge::AugmentationConfig {
            factor,
            pairing: parse_pairing(pairing)?,
            seed,
            smooth_junction: smooth,
            smooth_window,
            inclusive_suffix,
        };
        let out = py
            .detach(|| dtwmerge::augment_dataset(&self.inner, &config))
            .map_err(py_err)?;
        Ok((Self { inner: out.dataset }, out.self_merges))
    }

    /// 1NN-DTW labels for every series of `test`, using `self` as the training split.
    #[pyo3(signature = (test, band = None))]
    fn classify(
        &self,
        py: Python<'_>,
        test: &PyDataset,
        band: Option<usize>,
    ) -> PyResult<Vec<String>> {
        let predicted = py
            .detach(|| dtwmerge::nn1_dtw_classify(&self.inner, &test.inner, band))
            .map_err(py_err)?;
        Ok(predicted.into_iter().map(|l| l.to_string()).collect())
    }
}

/// Loads `<dir>/<name>_TRAIN.tsv` and `<dir>/<name>_TEST.tsv` as `(train, test)`.
#[pyfunction]
fn load_ucr(dir: PathBuf, name: &str) -> PyResult<(PyDataset, PyDataset)> {
    let DatasetPair { train, test, .. } = ucr::load_ucr_split(&dir, name).map_err(py_err)?;
    Ok((PyDataset { inner: train }, PyDataset { inner: test }))
}

#[pyfunction]
fn dtw(x: Vec<f64>, y: Vec<f64>) -> PyResult<PyDtwResult> {
    dtwmerge::dtw(&x, &y).map(Into::into).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (x, y, band = None))]
fn dtw_distance(x: Vec<f64>, y: Vec<f64>, band: Option<usize>) -> PyResult<f64> {
    match band {
        Some(r) => dtwmerge::dtw::dtw_banded_distance(&x, &y, r),
        None => dtwmerge::dtw_distance(&x, &y),
    }
    .map_err(py_err)
}

#[pyfunction]
fn dtw_banded(x: Vec<f64>, y: Vec<f64>, band: usize) -> PyResult<PyDtwResult> {
    dtwmerge::dtw_banded(&x, &y, band)
        .map(Into::into)
        .map_err(py_err)
}

/// Exhaustive path enumeration, lengths up to 10.
#[pyfunction]
fn oracle_dtw(x: Vec<f64>, y: Vec<f64>) -> PyResult<f64> {
    dtwmerge::oracle_dtw(&x, &y).map_err(py_err)
}

#[pyfunction]
fn z_normalize(x: Vec<f64>) -> PyResult<Vec<f64>> {
    dtwmerge::z_normalize(&x)
        .map(TimeSeries::into_vec)
        .map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (x, tol = 1e-4))]
fn is_z_normalized(x: Vec<f64>, tol: f64) -> bool {
    dtwmerge::is_z_normalized(&x, tol)
}

/// `(position, mu, sigma_squared)` for a path of length `path_length`; position is 1-based.
#[pyfunction]
#[pyo3(signature = (path_length, seed = 0))]
fn sample_split_index(path_length: usize, seed: u64) -> PyResult<(usize, f64, f64)> {
    if path_length == 0 {
        return Err(PyValueError::new_err("path_length must be at least 1"));
    }
    let s = dtwmerge::sample_split_index(path_length, &mut item_rng(seed, Domain::Augment, 0, 0));
    Ok((s.position, s.mu, s.sigma_squared))
}

/// One merged series of `x` (prefix) and `y` (suffix).
#[pyfunction]
#[pyo3(signature = (x, y, seed = 0, inclusive_suffix = false, smooth_window = None))]
fn dtw_merge(
    x: Vec<f64>,
    y: Vec<f64>,
    seed: u64,
    inclusive_suffix: bool,
    smooth_window: Option<usize>,
) -> PyResult<Vec<f64>> {
    let options = MergeOptions {
        inclusive_suffix,
        smooth_window,
    };
    let mut rng = item_rng(seed, Domain::Augment, 0, 0);
    dtw_merge_with(&x, &y, &options, &mut rng)
        .map(|m| m.series.into_vec())
        .map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (x, junction, window = 3))]
fn smooth_junction(x: Vec<f64>, junction: usize, window: usize) -> PyResult<Vec<f64>> {
    dtwmerge::smooth_junction(&x, junction, window)
        .map(TimeSeries::into_vec)
        .map_err(py_err)
}

#[pyfunction]
fn accuracy(predicted: Vec<String>, actual: Vec<String>) -> PyResult<f64> {
    dtwmerge::accuracy(&labels(predicted), &labels(actual)).map_err(py_err)
}

#[pyfunction]
fn pce(error: f64, n_classes: usize) -> PyResult<f64> {
    dtwmerge::pce(error, n_classes).map_err(py_err)
}

#[pyfunction]
fn mpce(pces: Vec<f64>) -> PyResult<f64> {
    dtwmerge::mpce(&pces).map_err(py_err)
}

/// Two-sided paired t-test on `a - b`: `(t, p, df)`.
#[pyfunction]
fn paired_t_test(a: Vec<f64>, b: Vec<f64>) -> PyResult<(f64, f64, usize)> {
    let t = dtwmerge::paired_t_test(&a, &b).map_err(py_err)?;
    Ok((t.t_value, t.p_value, t.df))
}

#[pymodule]
#[pyo3(name = "dtwmerge")]
fn dtwmerge_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyDtwResult>()?;
    m.add_class::<PyDataset>()?;
    m.add_function(wrap_pyfunction!(load_ucr, m)?)?;
    m.add_function(wrap_pyfunction!(dtw, m)?)?;
    m.add_function(wrap_pyfunction!(dtw_distance, m)?)?;
    m.add_function(wrap_pyfunction!(dtw_banded, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_dtw, m)?)?;
    m.add_function(wrap_pyfunction!(z_normalize, m)?)?;
    m.add_function(wrap_pyfunction!(is_z_normalized, m)?)?;
    m.add_function(wrap_pyfunction!(sample_split_index, m)?)?;
    m.add_function(wrap_pyfunction!(dtw_merge, m)?)?;
    m.add_function(wrap_pyfunction!(smooth_junction, m)?)?;
    m.add_function(wrap_pyfunction!(accuracy, m)?)?;
    m.add_function(wrap_pyfunction!(pce, m)?)?;
    m.add_function(wrap_pyfunction!(mpce, m)?)?;
    m.add_function(wrap_pyfunction!(paired_t_test, m)?)?;
    Ok(())
}
