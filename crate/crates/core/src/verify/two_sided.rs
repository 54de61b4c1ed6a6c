//! One- and two-sided tail profiles of the extremal functions against
//! `e^{-nt²/2}`, plus the auxiliary inequalities used to reduce the
//! two-sided comparison to one-variable checks.

use std::f64::consts::{FRAC_PI_2, PI};

use super::manifest::{Check, Expectation, SuiteOutcome};
use super::suites::dim;
use super::{bisect_root, certify_margin, uniform_grid, Endpoints, SuiteConfig};
use crate::cap::cap_tail;
use crate::error::Result;
use crate::extremal::{eta_of_a, refined_a_grid, t_of_a, two_sided_complement, two_sided_tail};
use crate::special_fn::{gauss_upper_tail, komatu_bound, wallis};

/// `e^{1/2}/2`, the one-sided constant for `a >= 0` obtained via Komatu's
/// bound.
pub const KOMATU_CONSTANT: f64 = 0.824_360_635_350_064;

fn profile_grid(cfg: &SuiteConfig) -> Vec<f64> {
    refined_a_grid(cfg.grid_size, (cfg.grid_size / 10).max(10))
}

fn one_sided_margin(n: u32, a: f64, constant: f64) -> Result<f64> {
    let d = dim(n);
    let t = t_of_a(d, a)?;
    Ok(cap_tail(d, a)? - constant * (-0.5 * n as f64 * t * t).exp())
}

/// Largest `μ(K^a) e^{nt(a)²/2}` over the grid points with `a >= 0`.
pub fn empirical_one_sided_constant(n: u32, grid: &[f64]) -> Result<f64> {
    let d = dim(n);
    grid.iter()
        .filter(|&&a| a >= 0.0)
        .map(|&a| {
            let t = t_of_a(d, a)?;
            Ok(cap_tail(d, a)? * (0.5 * n as f64 * t * t).exp())
        })
        .try_fold(0.0f64, |m, r: Result<f64>| Ok(m.max(r?)))
}

pub fn suite_one_sided(dims: &[u32], cfg: &SuiteConfig) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new("one-sided");
    let grid = profile_grid(cfg);
    // a = 0 is where the ratio peaks; an even grid size would skip it
    let positive: Vec<f64> = std::iter::once(0.0)
        .chain(grid.iter().copied().filter(|&a| a > 0.0))
        .collect();
    for &n in dims {
        let r = certify_margin(&format!("one-sided/n={n}"), |a| one_sided_margin(n, a, 1.0), &grid, cfg)?;
        out.expect(r, Expectation::Pass);
        if n == 2 {
            // equality only at a = -π/2
            let interior = &grid[1..];
            let worst = interior
                .iter()
                .map(|&a| one_sided_margin(2, a, 1.0))
                .try_fold(f64::NEG_INFINITY, |m, r: Result<f64>| Ok::<_, crate::Error>(m.max(r?)))?;
            out.check(Check::below("n = 2 largest margin for a > -pi/2", worst, 0.0));
            out.check(Check::within(
                "n = 2 margin at a = -pi/2",
                one_sided_margin(2, -FRAC_PI_2, 1.0)?,
                0.0,
                0.0,
            ));
        } else {
            let r = certify_margin(
                &format!("one-sided/komatu-constant/n={n}"),
                |a| one_sided_margin(n, a, KOMATU_CONSTANT),
                &positive,
                cfg,
            )?;
            out.expect(r, Expectation::Pass);
        }
        out.check(Check::report(
            format!("smallest one-sided constant for a >= 0, n = {n}"),
            empirical_one_sided_constant(n, &positive)?,
        ));
    }
    out.check(Check::within("e^(1/2)/2", 0.5f64.exp() / 2.0, KOMATU_CONSTANT, 1e-15));
    Ok(out)
}

pub fn suite_one_sided_default(cfg: &SuiteConfig) -> Result<SuiteOutcome> {
    suite_one_sided(&(2..=20).collect::<Vec<_>>(), cfg)
}

/// `ln(1 - G) - ln(1 - F)`: `F <= G` written through the complements,
/// which keeps resolution where both tails are close to 1.
fn two_sided_log_margin(n: u32, a: f64) -> Result<f64> {
    let d = dim(n);
    let t = t_of_a(d, a)?;
    let one_minus_g = -(-0.5 * n as f64 * t * t).exp_m1();
    Ok(one_minus_g.ln() - two_sided_complement(d, a)?.ln())
}

/// `F(a) - G(a)`.
fn two_sided_linear_margin(n: u32, a: f64) -> Result<f64> {
    let d = dim(n);
    let t = t_of_a(d, a)?;
    Ok(two_sided_tail(d, a)? - (-0.5 * n as f64 * t * t).exp())
}

/// `½(e^{-na²/2} + e^{-n(a+2η)²/2}) - e^{-n(a+η)²/2}`.
fn concavity_margin(n: u32, a: f64) -> Result<f64> {
    let nf = n as f64;
    let eta = eta_of_a(dim(n), a)?;
    let g = |s: f64| (-0.5 * nf * s * s).exp();
    Ok(0.5 * (g(a) + g(a + 2.0 * eta)) - g(a + eta))
}

/// `η(a) - (√(a² + 2 ln 1.5 / n) - a)`.
fn eta_room_margin(n: u32, a: f64) -> Result<f64> {
    let nf = n as f64;
    Ok(eta_of_a(dim(n), a)? - ((a * a + 2.0 * 1.5f64.ln() / nf).sqrt() - a))
}

/// Largest `v` allowed for `b = u/√n` in the small-`b` case:
/// `√n I_{n-1} e^{-u²/2} / 2`.
fn small_b_v(n: u32, u: f64) -> f64 {
    (n as f64).sqrt() * wallis(n - 1).value * (-0.5 * u * u).exp() / 2.0
}

/// `ln(1 - e^{-v²/2}) - ln(c ∫_u^{u+2v} e^{-s²/2} ds)`.
fn gaussian_window_margin(c: f64, u: f64, v: f64) -> f64 {
    let window = gauss_upper_tail(u) - gauss_upper_tail(u + 2.0 * v);
    (-(-0.5 * v * v).exp_m1()).ln() - (c * window).ln()
}

fn small_b_margin(n: u32, u: f64) -> f64 {
    let c = 1.0 / (2.0 * wallis(n - 2).value * (n as f64).sqrt());
    gaussian_window_margin(c, u, small_b_v(n, u))
}

/// Logs of both sides of the `n → ∞` small-`b` comparison at
/// `v = √(π/8) e^{-u²/2}`: `(ln P(u <= Z <= u+2v), ln(1 - e^{-v²/2}))`.
pub fn small_b_limit_sides(u: f64) -> (f64, f64) {
    let v = (PI / 8.0).sqrt() * (-0.5 * u * u).exp();
    let window = (gauss_upper_tail(u) - gauss_upper_tail(u + 2.0 * v)) / (2.0 * PI).sqrt();
    (window.ln(), (-(-0.5 * v * v).exp_m1()).ln())
}

fn asymptotic_small_b_margin(u: f64) -> f64 {
    let (lhs, rhs) = small_b_limit_sides(u);
    rhs - lhs
}

/// `ln(e^{-u²/2}/(4u²)) - ln(e^{-(u+2v)²/2})` with
/// `v = e^{-u²/2}/(√(2π) u²)`.
fn large_b_log_margin(u: f64) -> f64 {
    let v = (-0.5 * u * u).exp() / ((2.0 * PI).sqrt() * u * u);
    -0.5 * u * u - (4.0 * u * u).ln() + 0.5 * (u + 2.0 * v).powi(2)
}

/// `(2/5) · 2e^{-u²/2}/(u+√(u²+2)) - 2 ln 1.5/(u+√(u²+2 ln 1.5))`.
fn komatu_room_margin(u: f64) -> Result<f64> {
    let l = 2.0 * 1.5f64.ln();
    Ok(0.4 * komatu_bound(u)? - l / (u + (u * u + l).sqrt()))
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let m = points.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = points.iter().map(|&(x, y)| (x.ln(), y.ln())).unzip();
    let mx = lx.iter().sum::<f64>() / m;
    let my = ly.iter().sum::<f64>() / m;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// `(1 - F, 1 - G)` at `a = -π/2 + z`.
pub fn complements_near_pole(n: u32, z: f64) -> Result<(f64, f64)> {
    let d = dim(n);
    let a = -FRAC_PI_2 + z;
    let t = t_of_a(d, a)?;
    Ok((two_sided_complement(d, a)?, -(-0.5 * n as f64 * t * t).exp_m1()))
}

pub fn suite_two_sided(dims: &[u32], cfg: &SuiteConfig) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new("two-sided");
    let full = profile_grid(cfg);
    let grid = &full[1..];
    for &n in dims {
        let nf = n as f64;
        let r = certify_margin(&format!("two-sided/n={n}"), |a| two_sided_log_margin(n, a), grid, cfg)?;
        out.expect(r, Expectation::Pass);
        let r = certify_margin(
            &format!("two-sided/linear/n={n}"),
            |a| two_sided_linear_margin(n, a),
            &full,
            cfg,
        )?;
        out.expect(r, Expectation::Pass);

        let edge = 1.0 / nf.sqrt();
        let a_max = bisect_root(|a| Ok(t_of_a(dim(n), a)? - edge), 0.0, FRAC_PI_2, 1e-14)?;
        let sub = uniform_grid(0.0, a_max, cfg.grid_size, Endpoints::Closed);
        let r = certify_margin(
            &format!("two-sided/concavity/n={n}"),
            |a| concavity_margin(n, a),
            &sub,
            cfg,
        )?;
        out.expect(r, Expectation::Pass);

        if n >= 3 {
            let sub = uniform_grid(0.5 * edge, FRAC_PI_2, cfg.grid_size, Endpoints::Closed);
            let r = certify_margin(
                &format!("two-sided/eta-room/n={n}"),
                |a| eta_room_margin(n, a),
                &sub,
                cfg,
            )?;
            out.expect(r, Expectation::Pass);
            let sub = uniform_grid(0.0, 2.52, cfg.grid_size, Endpoints::Closed);
            let r = certify_margin(
                &format!("two-sided/small-b/n={n}"),
                |u| Ok(small_b_margin(n, u)),
                &sub,
                cfg,
            )?;
            out.expect(r, Expectation::Pass);
        }
    }
    if dims.contains(&3) {
        out.check(Check::within(
            "n = 3 tail at a = -pi/2",
            two_sided_tail(dim(3), -FRAC_PI_2)?,
            1.0,
            0.0,
        ));
        near_pole_checks(&mut out)?;
        let sub = uniform_grid(0.0, 2.52, cfg.grid_size, Endpoints::Closed);
        let r = certify_margin(
            "two-sided/small-b-range",
            |u| Ok(u + 2.0 * small_b_v(3, u) - 2.67),
            &sub,
            cfg,
        )?;
        out.expect(r, Expectation::Pass);
    }

    let sub = uniform_grid(0.5, 10.0, cfg.grid_size, Endpoints::Closed);
    out.expect(
        certify_margin("two-sided/komatu-room", komatu_room_margin, &sub, cfg)?,
        Expectation::Pass,
    );
    let sub = uniform_grid(0.0, 0.5, cfg.grid_size, Endpoints::Closed);
    let r = certify_margin("two-sided/small-a", |u| Ok(u + komatu_bound(u)? / 2.0 - 1.0), &sub, cfg)?;
    out.expect(r, Expectation::Pass);
    let sub = uniform_grid(0.0, 0.69, cfg.grid_size, Endpoints::Closed);
    let r = certify_margin(
        "two-sided/small-a-erfc",
        |u| Ok(u + gauss_upper_tail(u) / 2.0 - 1.0),
        &sub,
        cfg,
    )?;
    out.expect(r, Expectation::Pass);
    let sub = uniform_grid(0.0, 3.0, cfg.grid_size, Endpoints::Closed);
    let r = certify_margin(
        "two-sided/small-b-limit",
        |u| Ok(asymptotic_small_b_margin(u)),
        &sub,
        cfg,
    )?;
    out.expect(r, Expectation::Pass);
    for lo in [6f64.sqrt(), 0.84] {
        let sub = uniform_grid(lo, 10.0, cfg.grid_size, Endpoints::Closed);
        let r = certify_margin(
            &format!("two-sided/large-b-limit/u>={lo:.4}"),
            |u| Ok(large_b_log_margin(u)),
            &sub,
            cfg,
        )?;
        out.expect(r, Expectation::Pass);
    }
    out.check(Check::at_least(
        "large-b limit: ratio of sides at u = sqrt(6)",
        (-large_b_log_margin(6f64.sqrt())).exp(),
        23.0,
    ));
    Ok(out)
}

/// Orders of contact of `F` and `G` with 1 at `a = -π/2` for `n = 3`.
fn near_pole_checks(out: &mut SuiteOutcome) -> Result<()> {
    let zs = [0.1, 0.05, 0.025];
    let pts = zs
        .iter()
        .map(|&z| complements_near_pole(3, z).map(|c| (z, c)))
        .collect::<Result<Vec<_>>>()?;
    let f: Vec<(f64, f64)> = pts.iter().map(|&(z, (f, _))| (z, f)).collect();
    let g: Vec<(f64, f64)> = pts.iter().map(|&(z, (_, g))| (z, g)).collect();
    out.check(Check::within(
        "n = 3 order of 1 - F at a = -pi/2",
        log_log_slope(&f),
        4.0,
        0.1,
    ));
    out.check(Check::within(
        "n = 3 order of 1 - G at a = -pi/2",
        log_log_slope(&g),
        6.0,
        0.1,
    ));
    let (cf, cg) = complements_near_pole(3, 0.01)?;
    out.check(Check::within(
        "n = 3 (1 - F)/z^4 at z = 0.01",
        cf / 0.01f64.powi(4),
        1.0 / 12.0,
        1e-3,
    ));
    out.check(Check::within(
        "n = 3 (1 - G)/z^6 at z = 0.01",
        cg / 0.01f64.powi(6),
        1.0 / 96.0,
        1e-3,
    ));
    let (cf, cg) = pts[2].1;
    out.check(Check::report("n = 3 (1 - F)/(1 - G) at z = 0.025", cf / cg));
    Ok(())
}

pub fn suite_two_sided_default(cfg: &SuiteConfig) -> Result<SuiteOutcome> {
    suite_two_sided(&(3..=20).collect::<Vec<_>>(), cfg)
}

/// On the circle the two-sided bound fails.
pub fn suite_two_sided_n2(cfg: &SuiteConfig) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new("two-sided-n2");
    let grid = &profile_grid(cfg)[1..];
    let r = certify_margin("two-sided-n2", |a| two_sided_log_margin(2, a), grid, cfg)?;
    out.expect(r, Expectation::FailAnywhere);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn komatu_constant_value() {
        assert!((KOMATU_CONSTANT - 0.5f64.exp() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn one_sided_constant_peaks_at_zero() {
        // n = 2: t(0) = π/8, so the ratio at 0 is e^{π²/64}/2
        let c2 = empirical_one_sided_constant(2, &[0.0, 0.1, 0.5, 1.0]).unwrap();
        assert!((c2 - 0.5 * (PI * PI / 64.0).exp()).abs() < 1e-12, "{c2}");
        // large n approaches e^{1/(4π)}/2 from above
        let floor = 0.5 * (1.0 / (4.0 * PI)).exp();
        let c = empirical_one_sided_constant(400, &[0.0, 0.01, 0.05]).unwrap();
        assert!(c > floor && c - floor < 1e-3, "{c}");
    }

    #[test]
    fn slope_fit() {
        let pts: Vec<(f64, f64)> = [0.1, 0.2, 0.4].iter().map(|&x: &f64| (x, 3.0 * x.powi(4))).collect();
        assert!((log_log_slope(&pts) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn large_b_ratio_at_sqrt6() {
        let r = (-large_b_log_margin(6f64.sqrt())).exp();
        assert!(r > 23.0 && r < 24.0, "{r}");
    }

    #[test]
    fn small_b_limit_margin() {
        let worst = uniform_grid(0.0, 3.0, 2000, Endpoints::Closed)
            .into_iter()
            .map(asymptotic_small_b_margin)
            .fold(f64::NEG_INFINITY, f64::max);
        assert!((worst + 0.5346).abs() < 1e-3, "{worst}");
    }

    #[test]
    fn circle_fails() {
        let cfg = SuiteConfig {
            grid_size: 400,
            ..Default::default()
        };
        assert!(suite_two_sided_n2(&cfg).unwrap().ok());
    }

    #[test]
    fn pole_orders() {
        let mut out = SuiteOutcome::new("t");
        near_pole_checks(&mut out).unwrap();
        assert!(out.ok(), "{:#?}", out.checks);
    }
}
