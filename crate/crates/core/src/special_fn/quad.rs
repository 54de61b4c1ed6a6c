//! Globally adaptive Gauss–Legendre quadrature.
//!
//! Every panel carries a coarse estimate (one 10-point rule over the panel)
//! and a fine estimate (the same rule over both halves). The panel with the
//! largest `|fine - coarse|` is bisected until the summed error estimate
//! meets `max(abs_tol, rel_tol * |result|)`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use crate::error::{Error, Result};

const ORDER: usize = 10;
const MAX_PANELS: usize = 1 << 16;

/// Tolerances for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Maximum number of bisections applied to any single panel.
    pub max_depth: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            max_depth: 60,
        }
    }
}

impl QuadratureSpec {
    /// Purely relative accuracy, for integrals whose magnitude is unknown
    /// in advance (cap tails, scaled moments).
    pub fn relative(rel_tol: f64) -> Self {
        Self {
            abs_tol: f64::MIN_POSITIVE,
            rel_tol,
            max_depth: 60,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::Config(format!(
                "quadrature tolerances must be positive (abs {}, rel {})",
                self.abs_tol, self.rel_tol
            )));
        }
        if self.max_depth < 10 {
            return Err(Error::Config(format!(
                "quadrature max_depth must be at least 10, got {}",
                self.max_depth
            )));
        }
        Ok(())
    }
}

/// Nodes and weights of the Gauss–Legendre rule on [-1, 1], by Newton
/// iteration on the Legendre polynomial.
fn rule() -> &'static ([f64; ORDER], [f64; ORDER]) {
    static RULE: OnceLock<([f64; ORDER], [f64; ORDER])> = OnceLock::new();
    RULE.get_or_init(|| {
        let mut nodes = [0.0; ORDER];
        let mut weights = [0.0; ORDER];
        let n = ORDER as f64;
        for i in 0..ORDER {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(ORDER, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(ORDER, x);
            if d != 0.0 {
                dp = d;
            }
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        (nodes, weights)
    })
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn gauss<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> f64 {
    let (nodes, weights) = rule();
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    let mut acc = 0.0;
    for (x, w) in nodes.iter().zip(weights) {
        acc += w * f(mid + half * x);
    }
    acc * half
}

#[derive(Debug)]
struct Panel {
    lo: f64,
    hi: f64,
    left: f64,
    right: f64,
    err: f64,
    depth: u32,
}

impl Panel {
    fn new<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, coarse: f64, depth: u32) -> Self {
        let mid = 0.5 * (lo + hi);
        let left = gauss(f, lo, mid);
        let right = gauss(f, mid, hi);
        let err = (left + right - coarse).abs();
        Self {
            lo,
            hi,
            left,
            right,
            err,
            depth,
        }
    }

    fn value(&self) -> f64 {
        self.left + self.right
    }
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        // Largest error first; ties resolved by position for determinism.
        self.err
            .total_cmp(&other.err)
            .then_with(|| other.lo.total_cmp(&self.lo))
    }
}

/// Integrates `f` over `[lo, hi]`.
///
/// Fails with [`Error::NoConvergence`] when a panel would have to be split
/// beyond `spec.max_depth`, and with [`Error::NonFinite`] when `f` returns
/// NaN or an infinity at a quadrature node.
pub fn integrate<F>(f: F, lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    spec.validate()?;
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::NonFinite {
            param: if lo.is_finite() { hi } else { lo },
        });
    }
    if lo > hi {
        return Err(crate::error::domain("lo", lo, format!("(-inf, hi = {hi}]")));
    }
    if lo == hi {
        return Ok(0.0);
    }

    let coarse = gauss(&f, lo, hi);
    let first = Panel::new(&f, lo, hi, coarse, 0);
    let mut total = first.value();
    let mut total_err = first.err;
    if !total.is_finite() {
        return Err(non_finite(&f, lo, hi));
    }
    let mut heap = BinaryHeap::new();
    heap.push(first);

    while total_err > spec.abs_tol.max(spec.rel_tol * total.abs()) {
        let worst = heap.pop().expect("heap is never empty");
        if worst.depth >= spec.max_depth || heap.len() + 2 > MAX_PANELS {
            return Err(Error::NoConvergence {
                lo: worst.lo,
                hi: worst.hi,
                max_depth: spec.max_depth,
            });
        }
        let mid = 0.5 * (worst.lo + worst.hi);
        let a = Panel::new(&f, worst.lo, mid, worst.left, worst.depth + 1);
        let b = Panel::new(&f, mid, worst.hi, worst.right, worst.depth + 1);
        total += a.value() + b.value() - worst.value();
        total_err += a.err + b.err - worst.err;
        if !total.is_finite() {
            return Err(non_finite(&f, worst.lo, worst.hi));
        }
        heap.push(a);
        heap.push(b);
        if total_err <= spec.abs_tol.max(spec.rel_tol * total.abs()) {
            // Running sums drift; confirm against a fresh summation.
            total_err = heap.iter().map(|p| p.err).sum();
        }
    }

    let mut panels = heap.into_vec();
    panels.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    Ok(panels.iter().map(Panel::value).sum())
}

fn non_finite<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Error {
    let (nodes, _) = rule();
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    let bad = nodes
        .iter()
        .flat_map(|x| {
            [
                mid + half * x,
                0.5 * (lo + mid) + 0.5 * half * x,
                0.5 * (mid + hi) + 0.5 * half * x,
            ]
        })
        .find(|&x| !f(x).is_finite())
        .unwrap_or(mid);
    Error::NonFinite { param: bad }
}
