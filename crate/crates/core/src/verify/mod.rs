//! Grid-scan certification of scalar inequalities `lhs(x) <= rhs(x)`.
//!
//! A scan evaluates the margin `lhs - rhs` on a grid. Points whose margin
//! exceeds `violation_tol` are grouped into runs; each run is widened to the
//! surrounding sign change of the raw margin and both ends are bisected to
//! `refine_tol`. The reported interval endpoints are the outer bisection
//! points (margin <= 0), so every interval brackets the violation.
//!
//! This is floating-point certification with stated tolerances, not
//! interval arithmetic.

mod manifest;
mod suites;
mod two_sided;

pub use manifest::{run_suite, suite_ids, Check, Expectation, ExpectedScan, SuiteOutcome};
pub use suites::*;
pub use two_sided::*;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// Scan parameters shared by all suites.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuiteConfig {
    pub grid_size: usize,
    pub violation_tol: f64,
    pub refine_tol: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            grid_size: 2000,
            violation_tol: 1e-9,
            refine_tol: 1e-6,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_size < 100 {
            return Err(Error::Config(format!(
                "grid_size must be at least 100, got {}",
                self.grid_size
            )));
        }
        for (name, v) in [("violation_tol", self.violation_tol), ("refine_tol", self.refine_tol)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// Outcome of one scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReport {
    pub suite_id: String,
    pub grid_size: usize,
    pub passed: bool,
    /// Largest margin `lhs - rhs` on the grid; positive means a violation.
    pub max_violation: f64,
    pub argmax: f64,
    /// Violation intervals bracketed by zeros of the raw margin.
    pub failure_intervals: Vec<(f64, f64)>,
    /// The same intervals bracketed by zeros of `margin - violation_tol`.
    pub tolerance_intervals: Vec<(f64, f64)>,
}

/// Which interval endpoints belong to the scanned grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoints {
    Closed,
    /// Left endpoint excluded, typically where equality is known to hold.
    OpenLeft,
    OpenRight,
    Open,
}

/// `count` evenly spaced points on `[lo, hi]` with the endpoints hit
/// exactly, minus the excluded ones.
pub fn uniform_grid(lo: f64, hi: f64, count: usize, ends: Endpoints) -> Vec<f64> {
    let last = count.max(2) - 1;
    let mut g: Vec<f64> = (0..=last)
        .map(|i| match i {
            0 => lo,
            _ if i == last => hi,
            _ => lo + (hi - lo) * i as f64 / last as f64,
        })
        .collect();
    if matches!(ends, Endpoints::OpenRight | Endpoints::Open) {
        g.pop();
    }
    if matches!(ends, Endpoints::OpenLeft | Endpoints::Open) {
        g.remove(0);
    }
    g
}

/// Certifies `lhs(x) <= rhs(x)` on the closed interval.
pub fn certify<L, R>(suite_id: &str, lhs: L, rhs: R, interval: (f64, f64), cfg: &SuiteConfig) -> Result<ScanReport>
where
    L: Fn(f64) -> f64 + Sync,
    R: Fn(f64) -> f64 + Sync,
{
    let (lo, hi) = interval;
    if !(lo < hi) {
        return Err(crate::error::domain("lo", lo, format!("(-inf, hi = {hi})")));
    }
    cfg.validate()?;
    let grid = uniform_grid(lo, hi, cfg.grid_size, Endpoints::Closed);
    certify_margin(suite_id, |x| Ok(lhs(x) - rhs(x)), &grid, cfg)
}

/// Certifies `margin(x) <= 0` (up to `violation_tol`) on an explicit grid.
///
/// The margin may be `-inf` (for example a log of an empty tail); NaN and
/// `+inf` are reported as [`Error::NonFinite`].
pub fn certify_margin<M>(suite_id: &str, margin: M, grid: &[f64], cfg: &SuiteConfig) -> Result<ScanReport>
where
    M: Fn(f64) -> Result<f64> + Sync,
{
    cfg.validate()?;
    let values: Vec<f64> = grid.par_iter().map(|&x| checked(&margin, x)).collect::<Result<_>>()?;
    certify_values(suite_id, grid, &values, margin, cfg)
}

/// Like [`certify_margin`] with margins already evaluated on the grid;
/// `margin` is only called during refinement.
pub fn certify_values<M>(
    suite_id: &str,
    grid: &[f64],
    values: &[f64],
    margin: M,
    cfg: &SuiteConfig,
) -> Result<ScanReport>
where
    M: Fn(f64) -> Result<f64>,
{
    cfg.validate()?;
    if grid.is_empty() || grid.len() != values.len() {
        return Err(Error::Config(format!(
            "grid of {} points with {} margin values",
            grid.len(),
            values.len()
        )));
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Config("scan grid must be strictly increasing".into()));
    }
    if let Some(i) = values.iter().position(|v| v.is_nan() || *v == f64::INFINITY) {
        return Err(Error::NonFinite { param: grid[i] });
    }

    let mut imax = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[imax] {
            imax = i;
        }
    }
    let max_violation = values[imax];
    let tol = cfg.violation_tol;
    let passed = max_violation <= tol;

    let mut failure_intervals = Vec::new();
    let mut tolerance_intervals = Vec::new();
    let mut i = 0;
    while i < grid.len() {
        if values[i] <= tol {
            i += 1;
            continue;
        }
        let mut j = i;
        while j + 1 < grid.len() && values[j + 1] > tol {
            j += 1;
        }
        // raw margin: widen the run to the enclosing sign change
        let mut l = i;
        while l > 0 && values[l - 1] > 0.0 {
            l -= 1;
        }
        let mut r = j;
        while r + 1 < grid.len() && values[r + 1] > 0.0 {
            r += 1;
        }
        let raw_lo = edge(&margin, grid, l, Side::Left, 0.0, cfg)?;
        let raw_hi = edge(&margin, grid, r, Side::Right, 0.0, cfg)?;
        failure_intervals.push((raw_lo, raw_hi));
        let tol_lo = edge(&margin, grid, i, Side::Left, tol, cfg)?;
        let tol_hi = edge(&margin, grid, j, Side::Right, tol, cfg)?;
        tolerance_intervals.push((tol_lo, tol_hi));
        i = j + 1;
    }

    Ok(ScanReport {
        suite_id: suite_id.to_string(),
        grid_size: grid.len(),
        passed,
        max_violation,
        argmax: grid[imax],
        failure_intervals: merge(failure_intervals),
        tolerance_intervals: merge(tolerance_intervals),
    })
}

fn checked<M: Fn(f64) -> Result<f64>>(margin: &M, x: f64) -> Result<f64> {
    let v = margin(x)?;
    if v.is_nan() || v == f64::INFINITY {
        return Err(Error::NonFinite { param: x });
    }
    Ok(v)
}

#[derive(Clone, Copy)]
enum Side {
    Left,
    Right,
}

/// Bisects between grid point `k` (margin above `level`) and its outer
/// neighbour; returns the outer bracket point. At the grid boundary the
/// boundary point itself is returned.
fn edge<M>(margin: &M, grid: &[f64], k: usize, side: Side, level: f64, cfg: &SuiteConfig) -> Result<f64>
where
    M: Fn(f64) -> Result<f64>,
{
    let outer_idx = match side {
        Side::Left if k == 0 => return Ok(grid[0]),
        Side::Right if k + 1 == grid.len() => return Ok(grid[k]),
        Side::Left => k - 1,
        Side::Right => k + 1,
    };
    let mut outer = grid[outer_idx];
    let mut inner = grid[k];
    while (inner - outer).abs() > cfg.refine_tol {
        let mid = 0.5 * (inner + outer);
        if mid == inner || mid == outer {
            break;
        }
        if checked(margin, mid)? > level {
            inner = mid;
        } else {
            outer = mid;
        }
    }
    Ok(outer)
}

fn merge(mut intervals: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    intervals.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(intervals.len());
    for (lo, hi) in intervals {
        match out.last_mut() {
            Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
            _ => out.push((lo, hi)),
        }
    }
    out
}

/// Root of `f` on `[lo, hi]` by bisection, given a sign change.
pub fn bisect_root<F>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut flo = f(lo)?;
    let fhi = f(hi)?;
    if flo.is_nan() || fhi.is_nan() || flo.signum() == fhi.signum() {
        return Err(Error::Config(format!("no sign change on [{lo}, {hi}]")));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let fm = f(mid)?;
        if fm.is_nan() {
            return Err(Error::NonFinite { param: mid });
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
