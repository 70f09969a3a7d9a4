//! Exact dynamic time warping.
//!
//! Local cost is `|x[p] - y[q]|` and the step set is `{(1,0), (0,1), (1,1)}`
//! with both endpoints aligned. Accumulation is always in `f64`.
//!
//! Indices in [`WarpingPath`] are 0-based.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::series::check_values;

/// Aligned index pairs from `(0, 0)` to `(M - 1, N - 1)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct WarpingPath(Vec<(usize, usize)>);

impl WarpingPath {
    /// Wraps `pairs` after checking the path invariants for series of lengths `m` and `n`.
    pub fn new(pairs: Vec<(usize, usize)>, m: usize, n: usize) -> Result<Self> {
        let path = Self(pairs);
        path.validate(m, n)?;
        Ok(path)
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.0
    }

    /// `L`, the number of aligned pairs.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn get(&self, k: usize) -> Option<(usize, usize)> {
        self.0.get(k).copied()
    }

    /// Checks endpoints and that every step is one of `(1,0)`, `(0,1)`, `(1,1)`.
    pub fn validate(&self, m: usize, n: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidInput(format!("warping path: {msg}")));
        match (self.0.first(), self.0.last()) {
            (Some(&(0, 0)), Some(&last)) if last == (m.wrapping_sub(1), n.wrapping_sub(1)) => {}
            _ => return bad(format!("must run from (0, 0) to ({}, {})", m - 1, n - 1)),
        }
        for w in self.0.windows(2) {
            let (dp, dq) = (w[1].0.wrapping_sub(w[0].0), w[1].1.wrapping_sub(w[0].1));
            if !matches!((dp, dq), (1, 0) | (0, 1) | (1, 1)) {
                return bad(format!("illegal step {:?} -> {:?}", w[0], w[1]));
            }
        }
        Ok(())
    }

    /// Sum of local costs along the path, accumulated from the start.
    pub fn cost(&self, x: &[f64], y: &[f64]) -> f64 {
        self.0
            .iter()
            .fold(0.0, |acc, &(p, q)| acc + local_cost(x[p], y[q]))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DtwResult {
    pub distance: f64,
    pub path: WarpingPath,
}

#[inline]
fn local_cost(a: f64, b: f64) -> f64 {
    (a - b).abs()
}

/// Admissible cells of the accumulated-cost matrix, 1-based.
#[derive(Debug, Clone, Copy)]
enum Window {
    Full,
    /// `|p - q * M / N| <= radius`, endpoints always admissible.
    Band {
        radius: usize,
        m: usize,
        n: usize,
    },
}

impl Window {
    fn band(radius: usize, m: usize, n: usize) -> Self {
        if radius >= m.max(n) {
            Window::Full
        } else {
            Window::Band { radius, m, n }
        }
    }

    #[inline]
    fn admits(self, p: usize, q: usize) -> bool {
        match self {
            Window::Full => true,
            Window::Band { radius, m, n } => {
                (p == 1 && q == 1) || (p == m && q == n) || (p * n).abs_diff(q * m) <= radius * n
            }
        }
    }

    /// Column span `[lo, hi]` that can hold admissible cells in row `p`.
    #[inline]
    fn columns(self, p: usize, n: usize) -> (usize, usize) {
        match self {
            Window::Full => (1, n),
            Window::Band { radius, m, .. } => {
                // |p*n - q*m| <= r*n  <=>  (p - r)*n/m <= q <= (p + r)*n/m
                let lo = (p.saturating_sub(radius) * n).div_ceil(m).max(1);
                let hi = ((p + radius) * n / m).min(n);
                let lo = if p == 1 { 1 } else { lo };
                let hi = if p == m { n } else { hi };
                (lo, hi)
            }
        }
    }
}

/// Full `(M+1) x (N+1)` accumulated-cost matrix, row-major, with an infinite border.
fn accumulate(x: &[f64], y: &[f64], window: Window) -> Vec<f64> {
    let (m, n) = (x.len(), y.len());
    let w = n + 1;
    let mut acc = vec![f64::INFINITY; (m + 1) * w];
    acc[0] = 0.0;
    for p in 1..=m {
        let (lo, hi) = window.columns(p, n);
        for q in lo..=hi {
            if !window.admits(p, q) {
                continue;
            }
            let best = acc[(p - 1) * w + q - 1]
                .min(acc[p * w + q - 1])
                .min(acc[(p - 1) * w + q]);
            acc[p * w + q] = local_cost(x[p - 1], y[q - 1]) + best;
        }
    }
    acc
}

/// Two-row variant of [`accumulate`] returning only the final cell.
///
/// Returns `None` as soon as every cell of a row exceeds `cutoff`; the final
/// value can then only be larger.
fn accumulate_last(x: &[f64], y: &[f64], window: Window, cutoff: f64) -> Option<f64> {
    let (m, n) = (x.len(), y.len());
    let mut prev = vec![f64::INFINITY; n + 1];
    let mut cur = vec![f64::INFINITY; n + 1];
    prev[0] = 0.0;
    for p in 1..=m {
        cur.fill(f64::INFINITY);
        let (lo, hi) = window.columns(p, n);
        let mut row_min = f64::INFINITY;
        for q in lo..=hi {
            if !window.admits(p, q) {
                continue;
            }
            let best = prev[q - 1].min(cur[q - 1]).min(prev[q]);
            let v = local_cost(x[p - 1], y[q - 1]) + best;
            cur[q] = v;
            row_min = row_min.min(v);
        }
        if row_min > cutoff {
            return None;
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    Some(prev[n])
}

/// Walks back from `(M, N)`, preferring the diagonal, then the step that
/// decreases `q`, then the step that decreases `p`.
fn backtrack(acc: &[f64], m: usize, n: usize) -> WarpingPath {
    let w = n + 1;
    let (mut p, mut q) = (m, n);
    let mut pairs = Vec::with_capacity(m + n - 1);
    pairs.push((p - 1, q - 1));
    while (p, q) != (1, 1) {
        let diag = acc[(p - 1) * w + q - 1];
        let left = acc[p * w + q - 1];
        let up = acc[(p - 1) * w + q];
        let mut step = (p - 1, q - 1, diag);
        if left < step.2 {
            step = (p, q - 1, left);
        }
        if up < step.2 {
            step = (p - 1, q, up);
        }
        p = step.0;
        q = step.1;
        pairs.push((p - 1, q - 1));
    }
    pairs.reverse();
    WarpingPath(pairs)
}

fn check_pair(x: &[f64], y: &[f64]) -> Result<()> {
    check_values(x)?;
    check_values(y)
}

fn solve(x: &[f64], y: &[f64], window: Window) -> Option<DtwResult> {
    let (m, n) = (x.len(), y.len());
    let acc = accumulate(x, y, window);
    let distance = acc[m * (n + 1) + n];
    if !distance.is_finite() {
        return None;
    }
    Some(DtwResult {
        distance,
        path: backtrack(&acc, m, n),
    })
}

/// Optimal warping path and its cost.
pub fn dtw(x: &[f64], y: &[f64]) -> Result<DtwResult> {
    check_pair(x, y)?;
    Ok(solve(x, y, Window::Full).expect("unconstrained DTW is always feasible"))
}

/// Same value as `dtw(x, y)?.distance` using `O(N)` memory.
pub fn dtw_distance(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    Ok(accumulate_last(x, y, Window::Full, f64::INFINITY).expect("no cutoff"))
}

/// DTW restricted to cells with `|p - q*M/N| <= band_radius` (1-based).
pub fn dtw_banded(x: &[f64], y: &[f64], band_radius: usize) -> Result<DtwResult> {
    check_pair(x, y)?;
    let (m, n) = (x.len(), y.len());
    solve(x, y, Window::band(band_radius, m, n)).ok_or(Error::BandInfeasible {
        m,
        n,
        radius: band_radius,
    })
}

/// Distance-only form of [`dtw_banded`].
pub fn dtw_banded_distance(x: &[f64], y: &[f64], band_radius: usize) -> Result<f64> {
    check_pair(x, y)?;
    let (m, n) = (x.len(), y.len());
    accumulate_last(x, y, Window::band(band_radius, m, n), f64::INFINITY)
        .filter(|d| d.is_finite())
        .ok_or(Error::BandInfeasible {
            m,
            n,
            radius: band_radius,
        })
}

/// Distance, or `None` once it is certain to exceed `cutoff`.
///
/// Inputs must already be validated. Used by the nearest-neighbour search.
pub(crate) fn distance_within(
    x: &[f64],
    y: &[f64],
    band_radius: Option<usize>,
    cutoff: f64,
) -> Option<f64> {
    let window = match band_radius {
        None => Window::Full,
        Some(r) => Window::band(r, x.len(), y.len()),
    };
    accumulate_last(x, y, window, cutoff).filter(|d| d.is_finite() && *d <= cutoff)
}

/// Largest length accepted by [`oracle_dtw`].
pub const ORACLE_MAX_LEN: usize = 10;

/// Minimum path cost by exhaustive enumeration of every warping path.
///
/// Exponential; intended as an independent check on the dynamic program.
pub fn oracle_dtw(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    let (m, n) = (x.len(), y.len());
    if m > ORACLE_MAX_LEN || n > ORACLE_MAX_LEN {
        return Err(Error::OracleTooLarge {
            m,
            n,
            cap: ORACLE_MAX_LEN,
        });
    }

    fn walk(x: &[f64], y: &[f64], p: usize, q: usize, cost: f64, best: &mut f64) {
        let cost = cost + local_cost(x[p], y[q]);
        if p + 1 == x.len() && q + 1 == y.len() {
            if cost < *best {
                *best = cost;
            }
            return;
        }
        if p + 1 < x.len() && q + 1 < y.len() {
            walk(x, y, p + 1, q + 1, cost, best);
        }
        if q + 1 < y.len() {
            walk(x, y, p, q + 1, cost, best);
        }
        if p + 1 < x.len() {
            walk(x, y, p + 1, q, cost, best);
        }
    }

    let mut best = f64::INFINITY;
    walk(x, y, 0, 0, 0.0, &mut best);
    Ok(best)
}
