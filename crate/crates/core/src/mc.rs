//! Monte Carlo checks of the tail bounds on the sphere and in Gauss space.
//!
//! Samples are drawn in chunks of [`CHUNK`]; chunk `i` uses ChaCha8 seeded
//! with the run seed on stream `i`, so results do not depend on how rayon
//! schedules the chunks. Gaussian variates come from `rand_distr`'s ziggurat
//! `StandardNormal`; sphere points are normalized Gaussian vectors.

use std::f64::consts::{FRAC_PI_2, PI};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::cap::{cap_tail, SphereDim};
use crate::error::{domain, Error, Result};
use crate::special_fn::wallis;
use crate::verify::{
    certify_margin, uniform_grid, Check, Endpoints, Expectation, ScanReport, SuiteConfig, SuiteOutcome,
};

pub const CHUNK: usize = 4096;
pub const MIN_SAMPLES: usize = 10_000;
/// Asymptotic 99% critical value of `√N · D_N` for the one-sample
/// Kolmogorov-Smirnov statistic.
pub const KS_CRITICAL_99: f64 = 1.628;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McConfig {
    pub seed: u64,
    pub samples: usize,
    pub t_grid: Vec<f64>,
}

impl McConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples < MIN_SAMPLES {
            return Err(Error::Config(format!("samples = {} < {MIN_SAMPLES}", self.samples)));
        }
        if self.t_grid.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
            return Err(Error::Config("t grid must be finite and nonnegative".into()));
        }
        if self.t_grid.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Config("t grid must be sorted ascending".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmpiricalTail {
    pub t: f64,
    pub p_hat: f64,
    pub std_err: f64,
    pub bound: f64,
}

impl EmpiricalTail {
    /// `p_hat <= bound + k · std_err`.
    pub fn within(&self, k: f64) -> bool {
        self.p_hat <= self.bound + k * self.std_err
    }
}

/// Evaluates `f` on `count` draws, in a fixed order.
fn chunked<T, F>(count: usize, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng) -> T + Sync,
{
    let chunks = count.div_ceil(CHUNK);
    let per_chunk: Vec<Vec<T>> = (0..chunks)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let len = CHUNK.min(count - i * CHUNK);
            (0..len).map(|_| f(&mut rng)).collect()
        })
        .collect();
    per_chunk.into_iter().flatten().collect()
}

fn gaussian_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

fn sphere_point(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let mut x = gaussian_vector(rng, n);
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 {
            x.iter_mut().for_each(|v| *v /= norm);
            return x;
        }
    }
}

/// `count` uniform points on `S^{n-1}`.
pub fn sample_sphere(dim: SphereDim, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let n = dim.n() as usize;
    chunked(count, seed, |rng| sphere_point(rng, n))
}

/// `count` standard Gaussian vectors in `R^n`.
pub fn sample_gaussian(n: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    chunked(count, seed, |rng| gaussian_vector(rng, n))
}

/// 1-Lipschitz functions on the sphere (geodesic metric), all depending on
/// `θ = arcsin u_1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum SphereFn {
    /// `θ`
    Coordinate,
    /// Geodesic distance to the cap `{θ >= a}`: `max(a - θ, 0)`.
    CapDistance(f64),
    /// `min(θ, a)`
    Truncation(f64),
}

impl SphereFn {
    pub fn eval(&self, u: &[f64]) -> f64 {
        let theta = u[0].clamp(-1.0, 1.0).asin();
        match *self {
            SphereFn::Coordinate => theta,
            SphereFn::CapDistance(a) => (a - theta).max(0.0),
            SphereFn::Truncation(a) => theta.min(a),
        }
    }
}

fn parse_level(id: &str, rest: &str) -> Result<f64> {
    let a: f64 = rest.parse().map_err(|_| Error::Unknown {
        kind: "function",
        id: id.to_string(),
    })?;
    if !(-FRAC_PI_2..=FRAC_PI_2).contains(&a) {
        return Err(domain("a", a, "[-pi/2, pi/2]"));
    }
    Ok(a)
}

impl FromStr for SphereFn {
    type Err = Error;

    /// `coord`, `cap-dist:<a>`, `phi:<a>`.
    fn from_str(id: &str) -> Result<Self> {
        match id.split_once(':') {
            None if id == "coord" => Ok(SphereFn::Coordinate),
            Some(("cap-dist", a)) => Ok(SphereFn::CapDistance(parse_level(id, a)?)),
            Some(("phi", a)) => Ok(SphereFn::Truncation(parse_level(id, a)?)),
            _ => Err(Error::Unknown {
                kind: "function",
                id: id.to_string(),
            }),
        }
    }
}

/// 1-Lipschitz functions on `R^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GaussFn {
    /// `x_1`
    Coordinate,
    /// `|x|`
    Norm,
    /// Distance to the half-space `{x_1 <= 0}`.
    HalfSpace,
}

impl GaussFn {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            GaussFn::Coordinate => x[0],
            GaussFn::Norm => x.iter().map(|v| v * v).sum::<f64>().sqrt(),
            GaussFn::HalfSpace => x[0].max(0.0),
        }
    }
}

impl FromStr for GaussFn {
    type Err = Error;

    fn from_str(id: &str) -> Result<Self> {
        match id {
            "coord" => Ok(GaussFn::Coordinate),
            "norm" => Ok(GaussFn::Norm),
            "halfspace" => Ok(GaussFn::HalfSpace),
            _ => Err(Error::Unknown {
                kind: "function",
                id: id.to_string(),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Center {
    Median,
    Mean,
    /// A known value used in place of the mean (for example an exact
    /// `E φ_a`); bounded like the mean.
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sides {
    Upper,
    Two,
}

fn center_of(sorted: &[f64], center: Center) -> f64 {
    match center {
        Center::Median => {
            let k = sorted.len();
            if k % 2 == 1 {
                sorted[k / 2]
            } else {
                0.5 * (sorted[k / 2 - 1] + sorted[k / 2])
            }
        }
        Center::Mean => sorted.iter().sum::<f64>() / sorted.len() as f64,
        Center::Fixed(c) => c,
    }
}

/// Fraction of sorted values with `v >= x`.
fn frac_at_least(sorted: &[f64], x: f64) -> f64 {
    let below = sorted.partition_point(|&v| v < x);
    (sorted.len() - below) as f64 / sorted.len() as f64
}

/// Fraction of sorted values with `v <= x`.
fn frac_at_most(sorted: &[f64], x: f64) -> f64 {
    sorted.partition_point(|&v| v <= x) as f64 / sorted.len() as f64
}

/// Bound constant in front of `e^{-c t²/2}`: `½` for the one-sided
/// deviation above the median, 1 otherwise.
fn bound_constant(center: Center, sides: Sides) -> f64 {
    match (center, sides) {
        (Center::Median, Sides::Upper) => 0.5,
        _ => 1.0,
    }
}

fn tails(mut values: Vec<f64>, center: Center, sides: Sides, rate: f64, t_grid: &[f64]) -> Vec<EmpiricalTail> {
    values.sort_by(f64::total_cmp);
    let c = center_of(&values, center);
    let n = values.len() as f64;
    let constant = bound_constant(center, sides);
    t_grid
        .iter()
        .map(|&t| {
            let upper = frac_at_least(&values, c + t);
            let p_hat = match sides {
                Sides::Upper => upper,
                Sides::Two if t == 0.0 => 1.0,
                Sides::Two => upper + frac_at_most(&values, c - t),
            };
            EmpiricalTail {
                t,
                p_hat,
                std_err: (p_hat * (1.0 - p_hat) / n).sqrt(),
                bound: constant * (-0.5 * rate * t * t).exp(),
            }
        })
        .collect()
}

/// Empirical deviations of `f` on `S^{n-1}` against `C e^{-nt²/2}`.
pub fn empirical_deviation(
    dim: SphereDim,
    f: SphereFn,
    center: Center,
    sides: Sides,
    cfg: &McConfig,
) -> Result<Vec<EmpiricalTail>> {
    cfg.validate()?;
    let n = dim.n() as usize;
    let values = chunked(cfg.samples, cfg.seed, |rng| f.eval(&sphere_point(rng, n)));
    Ok(tails(values, center, sides, dim.n() as f64, &cfg.t_grid))
}

/// Empirical deviations of `f` under `γ_n` against `C e^{-t²/2}`.
pub fn empirical_gaussian(
    n: usize,
    f: GaussFn,
    center: Center,
    sides: Sides,
    cfg: &McConfig,
) -> Result<Vec<EmpiricalTail>> {
    cfg.validate()?;
    if n == 0 {
        return Err(domain("n", 0.0, "n >= 1"));
    }
    let values = chunked(cfg.samples, cfg.seed, |rng| f.eval(&gaussian_vector(rng, n)));
    Ok(tails(values, center, sides, 1.0, &cfg.t_grid))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KsResult {
    pub samples: usize,
    pub distance: f64,
    pub critical: f64,
    pub passed: bool,
}

/// Kolmogorov-Smirnov distance between sampled `arcsin u_1` and its exact
/// law `P(θ <= x) = 1 - μ(K^x)`.
pub fn arcsin_ks(dim: SphereDim, samples: usize, seed: u64) -> Result<KsResult> {
    let n = dim.n() as usize;
    let mut theta = chunked(samples, seed, |rng| SphereFn::Coordinate.eval(&sphere_point(rng, n)));
    theta.sort_by(f64::total_cmp);
    let cdf: Vec<f64> = theta
        .par_iter()
        .map(|&x| Ok(1.0 - cap_tail(dim, x)?))
        .collect::<Result<_>>()?;
    let m = samples as f64;
    let distance = cdf
        .iter()
        .enumerate()
        .map(|(i, &f)| (f - i as f64 / m).max((i + 1) as f64 / m - f))
        .fold(0.0, f64::max);
    let critical = KS_CRITICAL_99 / m.sqrt();
    Ok(KsResult {
        samples,
        distance,
        critical,
        passed: distance < critical,
    })
}

/// Log density of `√n θ` for `θ ~ ν_n`:
/// `g_n(s) = (2I_{n-2}√n)^{-1} cos^{n-2}(s/√n)` on `|s| <= π√n/2`.
pub fn ln_rescaled_density(dim: SphereDim, s: f64) -> f64 {
    let nf = dim.n() as f64;
    let x = s / nf.sqrt();
    if x.abs() > FRAC_PI_2 {
        return f64::NEG_INFINITY;
    }
    let w = wallis(dim.n() - 2);
    let body = if dim.n() == 2 { 0.0 } else { (nf - 2.0) * x.cos().ln() };
    body - (2.0f64.ln() + w.log_value + 0.5 * nf.ln())
}

/// `ln g_n(s) <= -½ ln 2π - (n-2)s²/(2n)` on `[0, π√n/2]`.
pub fn density_domination_check(dim: SphereDim, cfg: &SuiteConfig) -> Result<ScanReport> {
    if dim.n() < 3 {
        return Err(domain("n", dim.n() as f64, "n >= 3"));
    }
    let nf = dim.n() as f64;
    let grid = uniform_grid(0.0, FRAC_PI_2 * nf.sqrt(), cfg.grid_size, Endpoints::Closed);
    certify_margin(
        &format!("density/n={}", dim.n()),
        |s| Ok(ln_rescaled_density(dim, s) + 0.5 * (2.0 * PI).ln() + (nf - 2.0) * s * s / (2.0 * nf)),
        &grid,
        cfg,
    )
}

pub fn suite_density(cfg: &SuiteConfig) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new("density");
    for n in 3..=40 {
        out.expect(density_domination_check(SphereDim::new(n)?, cfg)?, Expectation::Pass);
    }
    let d3 = SphereDim::new(3)?;
    out.check(Check::within(
        "g_3(0)",
        ln_rescaled_density(d3, 0.0).exp(),
        1.0 / (2.0 * 3f64.sqrt()),
        1e-15,
    ));
    out.check(Check::at_most(
        "g_3(0) against (2 pi)^(-1/2)",
        ln_rescaled_density(d3, 0.0).exp(),
        1.0 / (2.0 * PI).sqrt(),
    ));
    let big = SphereDim::new(10_000)?;
    let limit = (-0.5f64).exp() / (2.0 * PI).sqrt();
    out.check(Check::within(
        "g_10000(1)",
        ln_rescaled_density(big, 1.0).exp(),
        limit,
        1e-3,
    ));
    let worst = (3..=40u32)
        .map(|n| (n as f64 - 2.0) / n as f64)
        .fold(f64::INFINITY, f64::min);
    out.check(Check::at_least("min (n-2)/n over 3 <= n <= 40", worst, 1.0 / 3.0));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(samples: usize) -> McConfig {
        McConfig {
            seed: 7,
            samples,
            t_grid: (1..=20).map(|i| 0.05 * i as f64).collect(),
        }
    }

    #[test]
    fn config_validation() {
        assert!(cfg(100).validate().is_err());
        let mut c = cfg(MIN_SAMPLES);
        assert!(c.validate().is_ok());
        c.t_grid = vec![0.2, 0.1];
        assert!(c.validate().is_err());
        c.t_grid = vec![-0.1];
        assert!(c.validate().is_err());
    }

    #[test]
    fn streams_are_reproducible_and_partition_free() {
        let d = SphereDim::new(5).unwrap();
        let a = sample_sphere(d, 10_000, 3);
        let b = sample_sphere(d, 10_000, 3);
        assert_eq!(a, b);
        // a shorter run is a prefix of a longer one
        let c = sample_sphere(d, 5_000, 3);
        assert_eq!(&a[..5_000], &c[..]);
        assert_ne!(a, sample_sphere(d, 10_000, 4));
        assert!(a
            .iter()
            .all(|u| (u.iter().map(|v| v * v).sum::<f64>() - 1.0).abs() < 1e-12));
    }

    #[test]
    fn coordinate_moments() {
        let n = 6;
        let pts = sample_sphere(SphereDim::new(n).unwrap(), 50_000, 11);
        let m = pts.len() as f64;
        let mean = pts.iter().map(|u| u[0]).sum::<f64>() / m;
        let sq = pts.iter().map(|u| u[0] * u[0]).sum::<f64>() / m;
        let se = (1.0 / n as f64 / m).sqrt();
        assert!(mean.abs() < 3.0 * se, "{mean}");
        // Var(u1²) = 2(n-1)/(n²(n+2))
        let var_sq = 2.0 * (n as f64 - 1.0) / ((n * n) as f64 * (n as f64 + 2.0));
        assert!((sq - 1.0 / n as f64).abs() < 3.0 * (var_sq / m).sqrt(), "{sq}");
    }

    #[test]
    fn function_ids() {
        assert_eq!("coord".parse::<SphereFn>().unwrap(), SphereFn::Coordinate);
        assert_eq!("phi:0.5".parse::<SphereFn>().unwrap(), SphereFn::Truncation(0.5));
        assert_eq!("cap-dist:-1".parse::<SphereFn>().unwrap(), SphereFn::CapDistance(-1.0));
        assert!("phi:2".parse::<SphereFn>().is_err());
        assert!(matches!("sin".parse::<SphereFn>(), Err(Error::Unknown { .. })));
        assert_eq!("norm".parse::<GaussFn>().unwrap(), GaussFn::Norm);
        assert!("x2".parse::<GaussFn>().is_err());
    }

    #[test]
    fn median_split() {
        let d = SphereDim::new(10).unwrap();
        let c = McConfig {
            t_grid: vec![0.0],
            ..cfg(20_000)
        };
        let r = empirical_deviation(d, SphereFn::Coordinate, Center::Median, Sides::Upper, &c).unwrap();
        assert!((r[0].p_hat - 0.5).abs() < 3.0 * r[0].std_err + 1e-4);
        let r = empirical_deviation(d, SphereFn::Coordinate, Center::Median, Sides::Two, &c).unwrap();
        assert_eq!(r[0].p_hat, 1.0);
    }

    #[test]
    fn density_values() {
        let d = SphereDim::new(3).unwrap();
        assert!((ln_rescaled_density(d, 0.0).exp() - 1.0 / (2.0 * 3f64.sqrt())).abs() < 1e-15);
        assert_eq!(ln_rescaled_density(d, 10.0), f64::NEG_INFINITY);
        let cfg = SuiteConfig {
            grid_size: 400,
            ..Default::default()
        };
        assert!(
            density_domination_check(SphereDim::new(7).unwrap(), &cfg)
                .unwrap()
                .passed
        );
    }
}
