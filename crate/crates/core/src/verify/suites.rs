//! Suites for the Wallis constants, the `q_n` family, the cosine/exponential
//! comparison bounds, the `n >= 3` cap estimate with constant 2/5, and the
//! Gaussian case.

use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;

use super::manifest::{Check, Expectation, SuiteOutcome};
use super::{bisect_root, certify, certify_margin, certify_values, uniform_grid, Endpoints, SuiteConfig};
use crate::cap::{cap_tail, ln_cap_tail, ln_q_n, ln_q_n_xi, q_n, SphereDim};
use crate::error::Result;
use crate::extremal::{gaussian_profile, gaussian_t, gaussian_t_quadrature};
use crate::special_fn::{
    gauss_upper_tail, integrate, kappa, komatu_bound, normal_tail, sampford_bound, wallis, QuadratureSpec,
};

pub(crate) fn dim(n: u32) -> SphereDim {
    SphereDim::new(n).expect("suite dimensions are >= 2")
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

/// `(4 D(h/2) - D(h)) / 3` with central differences `D`.
pub fn richardson_derivative<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    let d = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    (4.0 * d(0.5 * h) - d(h)) / 3.0
}

/// Recurrence, sandwich and `κ` identities for `I_m`, and the value of
/// `I_k I_{k+1}`.
pub fn suite_wallis(_cfg: &SuiteConfig) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new("wallis");
    let i = |m: u32| wallis(m).value;

    let recurrence = (2..=200u32)
        .map(|m| rel(i(m), (m as f64 - 1.0) / m as f64 * i(m - 2)))
        .fold(0.0, f64::max);
    out.check(Check::at_most("recurrence max rel error, m <= 200", recurrence, 1e-12));

    let sandwich = (1..=200u32)
        .filter(|&m| {
            let mf = m as f64;
            !((PI / (2.0 * mf + 2.0)).sqrt() <= i(m) && i(m) <= (PI / (2.0 * mf + 1.0)).sqrt())
        })
        .count();
    out.check(Check::at_most(
        "sandwich violations, 1 <= m <= 200",
        sandwich as f64,
        0.0,
    ));

    let mut kappa_prod = 0.0f64;
    let mut wallis_kappa = 0.0f64;
    for n in 1..=200u32 {
        let k = kappa(n)?.value;
        kappa_prod = kappa_prod.max(rel(k * kappa(n + 1)?.value, n as f64));
        wallis_kappa = wallis_kappa.max(rel(i(n - 1), (PI / 2.0).sqrt() / k));
    }
    out.check(Check::at_most(
        "kappa_n kappa_(n+1) = n, max rel error",
        kappa_prod,
        1e-10,
    ));
    out.check(Check::at_most(
        "I_m = sqrt(pi/2)/kappa_(m+1), max rel error",
        wallis_kappa,
        1e-10,
    ));

    let spec = QuadratureSpec::default();
    let mut quad = 0.0f64;
    for m in 0..=60 {
        let q = integrate(|t| t.cos().powi(m), 0.0, FRAC_PI_2, &spec)?;
        quad = quad.max((q - i(m as u32)).abs());
    }
    out.check(Check::at_most("I_m against quadrature, m <= 60", quad, 1e-10));

    let floor = (PI / 2.0).sqrt();
    let bad = (3..200u32)
        .filter(|&m| {
            let s = |k: u32, j: u32| i(k) * (j as f64).sqrt();
            !(s(m, m + 1) < s(m - 1, m)
                && s(m - 1, m + 1) < s(m - 2, m)
                && s(m - 1, m) >= floor
                && s(m - 2, m) >= floor)
        })
        .count();
    out.check(Check::at_most(
        "I_(m-1) sqrt(m), I_(m-2) sqrt(m) decreasing and >= sqrt(pi/2), violations",
        bad as f64,
        0.0,
    ));

    let standard = (1..=200u32)
        .map(|k| rel(i(k) * i(k + 1), PI / (2.0 * (k as f64 + 1.0))))
        .fold(0.0, f64::max);
    out.check(Check::at_most(
        "I_k I_(k+1) = pi/(2(k+1)), max rel error",
        standard,
        1e-10,
    ));
    let shifted = (2..=200u32)
        .map(|k| rel(i(k) * i(k + 1), PI / (2.0 * (k as f64 - 1.0))))
        .fold(f64::INFINITY, f64::min);
    out.check(Check::at_least(
        "I_k I_(k+1) = pi/(2(k-1)) rejected, min rel deviation",
        shifted,
        1e-3,
    ));
    // The coefficient 4(n-1) in the reduced two-sided condition comes from
    // I_(n-2) I_(n-1) = pi/(2(n-1)), the standard identity at k = n-2.
    let coefficient = (3..=200u32)
        .map(|n| rel(i(n - 2) * i(n - 1), PI / (2.0 * (n as f64 - 1.0))))
        .fold(0.0, f64::max);
    out.check(Check::at_most(
        "I_(n-2) I_(n-1) = pi/(2(n-1)), max rel error",
        coefficient,
        1e-10,
    ));
    Ok(out)
}

/// `cos x <= e^{-x²/2}` on `[0, π/2]`.
pub fn suite_cos_exp(cfg: &SuiteConfig) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new("cos-exp");
    let r = certify("cos-exp", f64::cos, |x| (-0.5 * x * x).exp(), (0.0, FRAC_PI_2), cfg)?;
    out.expect(r, Expectation::Pass);
    Ok(out)
}

/// `q_2 <= 1` fails on a single interval.
pub fn suite_q2_fail(cfg: &SuiteConfig) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new("q2-fail");
    let grid = uniform_grid(0.0, FRAC_PI_2, cfg.grid_size, Endpoints::Closed);
    let r = certify_margin("q2-fail", |x| Ok(q_n(dim(2), x)? - 1.0), &grid, cfg)?;
    out.expect(r, Expectation::FailOn(vec![(1.05858, 1.18588)]));
    out.check(Check::within("q_2(0)", q_n(dim(2), 0.0)?, 1.0, 0.0));
    Ok(out)
}

/// Closed forms of `q_3`, `q_4` continued to negative `x`, for derivatives
/// at the origin.
fn q_closed(n: u32, x: f64) -> f64 {
    match n {
        3 => (1.0 - x.sin()) * (1.5 * x * x).exp(),
        4 => (PI - 2.0 * x - 2.0 * x.cos() * x.sin()) / PI * (2.0 * x * x).exp(),
        _ => unreachable!("closed forms exist for n = 3, 4"),
    }
}

/// `q_3 <= 1`, `q_4 <= 1`, their slopes at 0 and the ordering
/// `q_4 <= q_3 <= q_2`.
pub fn suite_q34(cfg: &SuiteConfig) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new("q34");
    // equality at x = 0 is checked exactly, not scanned
    let grid = uniform_grid(0.0, FRAC_PI_2, cfg.grid_size, Endpoints::OpenLeft);
    for n in [3, 4] {
        let r = certify_margin(&format!("q34/q{n}"), |x| Ok(q_n(dim(n), x)? - 1.0), &grid, cfg)?;
        out.expect(r, Expectation::Pass);
        out.check(Check::within(format!("q_{n}(0)"), q_n(dim(n), 0.0)?, 1.0, 0.0));
    }
    let d3 = richardson_derivative(|x| q_closed(3, x), 0.0, 1e-5);
    out.check(Check::within("q_3'(0)", d3, -1.0, 1e-6));
    let d4 = richardson_derivative(|x| q_closed(4, x), 0.0, 1e-5);
    out.check(Check::within("q_4'(0)", d4, -4.0 / PI, 1e-6));
    for (lo, hi) in [(4, 3), (3, 2)] {
        let r = certify_margin(
            &format!("q34/q{lo}<=q{hi}"),
            |x| Ok(q_n(dim(lo), x)? - q_n(dim(hi), x)?),
            &grid,
            cfg,
        )?;
        out.expect(r, Expectation::Pass);
    }
    Ok(out)
}

fn g_fn(x: f64) -> f64 {
    // 1 - sin x = 2 sin²(π/4 - x/2)
    let one_minus_sin = 2.0 * (std::f64::consts::FRAC_PI_4 - 0.5 * x).sin().powi(2);
    3.0 * x - x.cos() / one_minus_sin
}

/// Maximum of `g(x) = 3x - cos x / (1 - sin x)` on `[0, π/2)`.
pub fn g_max() -> Result<(f64, f64)> {
    // g'(x) = 3 - 1/(1 - sin x)
    let x0 = bisect_root(|x| Ok(3.0 - 1.0 / (1.0 - x.sin())), 0.0, 1.2, 1e-15)?;
    Ok((x0, g_fn(x0)))
}

pub fn suite_g_max(cfg: &SuiteConfig) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new("g-max");
    let (x0, g0) = g_max()?;
    out.check(Check::within("x0", x0, (2.0f64 / 3.0).asin(), 1e-8));
    out.check(Check::within("g(x0)", g0, -0.046885, 1e-5));
    out.check(Check::below("g(x0) < 0", g0, 0.0));
    out.check(Check::within("g(0)", g_fn(0.0), -1.0, 1e-15));
    let r = certify("g-max/g<=0", g_fn, |_| 0.0, (0.0, 1.5), cfg)?;
    out.expect(r, Expectation::Pass);
    Ok(out)
}

pub const MONOTONE_XI: [f64; 4] = [0.0, 1.0, 2.0, 4.0];

/// `q_{n+2,ξ} <= q_{n,ξ}` on the closed grid, `n = 2..=40`.
pub fn suite_monotone(cfg: &SuiteConfig) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new("monotone");
    let grid = uniform_grid(0.0, FRAC_PI_2, cfg.grid_size, Endpoints::Closed);
    // ln q_n on the grid for n = 2..=42, shared by every ξ
    let table: Vec<Vec<f64>> = (2..=42u32)
        .into_par_iter()
        .map(|n| grid.iter().map(|&x| ln_q_n(dim(n), x)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    for n in 2..=40u32 {
        let lo = &table[(n - 2) as usize];
        let hi = &table[n as usize];
        for xi in MONOTONE_XI {
            let values: Vec<f64> = grid
                .iter()
                .zip(hi.iter().zip(lo))
                .map(|(&x, (&a, &b))| (a + 0.5 * xi * x * x).exp() - (b + 0.5 * xi * x * x).exp())
                .collect();
            let id = format!("monotone/n={n}/xi={xi}");
            let margin = |x: f64| Ok(ln_q_n_xi(dim(n + 2), x, xi)?.exp() - ln_q_n_xi(dim(n), x, xi)?.exp());
            let r = certify_values(&id, &grid, &values, margin, cfg)?;
            out.expect(r, Expectation::Pass);
        }
    }
    Ok(out)
}

/// `μ(K^x) <= ½ e^{-nx²/2}` for `n = 3..=40`, strict away from `x = 0`.
pub fn suite_hemisphere(cfg: &SuiteConfig) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new("hemisphere");
    let grid = uniform_grid(0.0, FRAC_PI_2, cfg.grid_size, Endpoints::OpenLeft);
    let mut worst = f64::NEG_INFINITY;
    let mut at_zero = 0.0f64;
    for n in 3..=40u32 {
        let d = dim(n);
        let nf = n as f64;
        let r = certify_margin(
            &format!("hemisphere/n={n}"),
            |x| Ok(cap_tail(d, x)? - 0.5 * (-0.5 * nf * x * x).exp()),
            &grid,
            cfg,
        )?;
        worst = worst.max(r.max_violation);
        out.expect(r, Expectation::Pass);
        at_zero = at_zero.max((cap_tail(d, 0.0)? - 0.5).abs());
    }
    out.check(Check::within("equality at x = 0", at_zero, 0.0, 0.0));
    out.check(Check::below("largest margin for x > 0", worst, 0.0));
    Ok(out)
}

/// `q_{4,1}`, `q_{6,2}` stay below 1; `q_{3,1}`, `q_{5,2}` do not.
pub fn suite_q_excess(cfg: &SuiteConfig) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new("q-excess");
    let grid = uniform_grid(0.0, FRAC_PI_2, cfg.grid_size, Endpoints::Closed);
    for (n, xi, expect) in [
        (4, 1.0, Expectation::Pass),
        (6, 2.0, Expectation::Pass),
        (3, 1.0, Expectation::FailAnywhere),
        (5, 2.0, Expectation::FailAnywhere),
    ] {
        let r = certify_margin(&format!("q-excess/q{n},{xi}"), |x| ln_q_n_xi(dim(n), x, xi), &grid, cfg)?;
        out.expect(r, expect);
    }
    Ok(out)
}

/// `h_n(s) = (n-2) ln cos(s/√n) + s²/2`.
pub fn h_n(n: u32, s: f64) -> f64 {
    let nf = n as f64;
    (nf - 2.0) * (s / nf.sqrt()).cos().ln() + 0.5 * s * s
}

/// Lower comparison `cos^{n-2} θ >= e^{-nθ²/2}` near 0 and upper comparison
/// `cos^{n-1} θ <= e^{-nθ²/2}` beyond `√(6/n)`.
pub fn suite_cos_powers(cfg: &SuiteConfig) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new("cos-powers");
    for n in 3..=60u32 {
        let nf = n as f64;
        let c = match n {
            3 => 2.67,
            4 => 2.89,
            _ => 3.0,
        };
        let grid = uniform_grid(0.0, c / nf.sqrt(), cfg.grid_size, Endpoints::Closed);
        let r = certify_margin(
            &format!("cos-powers/lower/n={n}"),
            |th| Ok(-h_n(n, th * nf.sqrt())),
            &grid,
            cfg,
        )?;
        out.expect(r, Expectation::Pass);
        let grid = uniform_grid((6.0 / nf).sqrt(), FRAC_PI_2, cfg.grid_size, Endpoints::Closed);
        let r = certify_margin(
            &format!("cos-powers/upper/n={n}"),
            |th| Ok((nf - 1.0) * th.cos().ln() + 0.5 * nf * th * th),
            &grid,
            cfg,
        )?;
        out.expect(r, Expectation::Pass);
    }

    let h0 = (3..=60).map(|n| h_n(n, 0.0).abs()).fold(0.0, f64::max);
    out.check(Check::within("max |h_n(0)|", h0, 0.0, 0.0));
    let dh0 = (3..=60)
        .map(|n| richardson_derivative(|s| h_n(n, s), 0.0, 1e-5).abs())
        .fold(0.0, f64::max);
    out.check(Check::at_most("max |h_n'(0)|", dh0, 1e-8));
    out.check(Check::at_least("h_3(2.67)", h_n(3, 2.67), 0.0));
    out.check(Check::at_least("h_4(2.89)", h_n(4, 2.89), 0.0));
    let min_h3 = (5..=60).map(|n| h_n(n, 3.0)).fold(f64::INFINITY, f64::min);
    out.check(Check::at_least("min h_n(3), 5 <= n <= 60", min_h3, 0.0));
    let rises = (7..60).filter(|&n| h_n(n + 1, 3.0) > h_n(n, 3.0)).count();
    out.check(Check::at_most("increases of h_n(3), 7 <= n <= 60", rises as f64, 0.0));
    let seq: Vec<f64> = (3..=60u32)
        .map(|n| (6.0 / n as f64).sqrt().cos().powi(n as i32 - 1))
        .collect();
    let drops = seq.windows(2).filter(|w| !(w[1] > w[0])).count();
    out.check(Check::at_most(
        "decreases of cos^(n-1) sqrt(6/n), 3 <= n <= 60",
        drops as f64,
        0.0,
    ));
    out.check(Check::below("cos^59 sqrt(6/60)", seq[seq.len() - 1], (-3.0f64).exp()));
    Ok(out)
}

/// Dimensions covered by the 2/5 cap estimate suite.
pub fn twofifths_dims() -> Vec<u32> {
    (3..=60).chain([100, 500]).collect()
}

/// `ln μ(K^{u/√n}) - ln(0.4) + u²/2`.
fn twofifths_margin_u(n: u32, u: f64) -> Result<f64> {
    let x = u / (n as f64).sqrt();
    Ok(ln_cap_tail(dim(n), x)? - 0.4f64.ln() + 0.5 * u * u)
}

/// Smallest `u = x√3` from which `μ(K^x) <= (2/5) e^{-3x²/2}` holds on `S²`.
pub fn twofifths_threshold_n3() -> Result<f64> {
    bisect_root(|u| twofifths_margin_u(3, u), 0.5, 0.6, 1e-12)
}

/// Lower bound `½ - (2I_{n-2}√n)^{-1} ∫_0^u e^{-s²/2} ds` on `μ(K^{u/√n})`
/// minus `(2/5) e^{-u²/2}`; `n = None` uses the Gaussian limit.
fn ideal_margin(n: Option<u32>, u: f64) -> f64 {
    let c = match n {
        Some(n) => 1.0 / (2.0 * wallis(n - 2).value * (n as f64).sqrt()),
        None => 1.0 / (2.0 * PI).sqrt(),
    };
    let partial = gauss_upper_tail(0.0) - gauss_upper_tail(u);
    0.5 - c * partial - 0.4 * (-0.5 * u * u).exp()
}

pub fn suite_twofifths(cfg: &SuiteConfig) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new("twofifths");
    for n in twofifths_dims() {
        let d = dim(n);
        let lo = crate::cap::twofifths_threshold(d) / (n as f64).sqrt();
        let grid = uniform_grid(lo, FRAC_PI_2, cfg.grid_size, Endpoints::Closed);
        let r = certify_margin(
            &format!("twofifths/n={n}"),
            |x| Ok(ln_cap_tail(d, x)? - 0.4f64.ln() + 0.5 * n as f64 * x * x),
            &grid,
            cfg,
        )?;
        out.expect(r, Expectation::Pass);
    }

    let u_star = twofifths_threshold_n3()?;
    out.check(Check::in_range("n = 3 threshold u*", u_star, 0.545, 0.556));
    out.check(Check::at_most("u* below the 0.551 guard", u_star, 0.551));

    let coeff = (3..=60u32)
        .map(|n| {
            let x = (6.0 / n as f64).sqrt();
            Ok(1.0 / ((2.0 * PI).sqrt() * kappa(n)?.value * x.sin()))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    out.check(Check::at_most("max (sqrt(2 pi) kappa_n sin sqrt(6/n))^-1", coeff, 0.4));

    let grid = uniform_grid(0.5, 2.5, cfg.grid_size, Endpoints::Closed);
    let r = certify_margin("twofifths/ideal", |u| Ok(ideal_margin(None, u)), &grid, cfg)?;
    out.expect(r, Expectation::Pass);
    let grid = uniform_grid(0.5, 6f64.sqrt(), cfg.grid_size, Endpoints::Closed);
    let holds: Vec<bool> = (3..=60u32)
        .map(|n| grid.iter().all(|&u| ideal_margin(Some(n), u) <= 0.0))
        .collect();
    let first = holds.iter().rposition(|h| !h).map_or(3, |i| i + 4) as f64;
    out.check(Check::within(
        "smallest n with the finite-n ideal bound for all larger n <= 60",
        first,
        30.0,
        0.0,
    ));
    Ok(out)
}

/// `α = 1/(96e⁶) + π/(4√2 e³)`.
pub fn large_b_alpha() -> f64 {
    1.0 / (96.0 * (6.0f64).exp()) + PI / (4.0 * 2f64.sqrt() * (3.0f64).exp())
}

/// The constraint's extreme value `t = I_{n-1} cos^n b / (π n sin² b)`.
pub fn large_b_t(n: u32, b: f64) -> f64 {
    wallis(n - 1).value * b.cos().powi(n as i32) / (PI * n as f64 * b.sin().powi(2))
}

/// The large-`b` regime of the two-sided reduction: its constant `α` and
/// the side ratios it controls.
pub fn suite_large_b(cfg: &SuiteConfig) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new("large-b");
    let alpha = large_b_alpha();
    for n in 3..=60u32 {
        let nf = n as f64;
        let grid = uniform_grid((6.0 / nf).sqrt(), FRAC_PI_2 - 1e-6, cfg.grid_size, Endpoints::Closed);
        let r = certify_margin(
            &format!("large-b/ratio-power/n={n}"),
            |b| {
                let t = large_b_t(n, b);
                let c2 = (b + 2.0 * t).cos().ln();
                let rhs = 2.0 * c2 - (4.0 * (nf - 1.0)).ln() - 2.0 * b.sin().ln();
                Ok(rhs - nf * (c2 - b.cos().ln()))
            },
            &grid,
            cfg,
        )?;
        out.expect(r, Expectation::Pass);
        let r = certify_margin(
            &format!("large-b/ratio/n={n}"),
            |b| Ok(1.0 - alpha / nf - (b + 2.0 * large_b_t(n, b)).cos() / b.cos()),
            &grid,
            cfg,
        )?;
        out.expect(r, Expectation::Pass);
    }

    out.check(Check::below("alpha", alpha, 0.028));
    out.check(Check::above("(1 - alpha/3)^3", (1.0 - alpha / 3.0).powi(3), 0.97));
    let c = wallis(2).value * 3f64.sqrt();
    let u2 = 6.0f64;
    let rebuilt = c * c * 2.0 * (-u2).exp() / (PI * PI * u2 * u2) + c * (-0.5 * u2).exp() / u2.sqrt();
    out.check(Check::within(
        "alpha from I_2 sqrt(3) at u = sqrt(6)",
        rebuilt,
        alpha,
        1e-15,
    ));
    let worst = (3..=60u32)
        .map(|n| wallis(n - 1).value * (n as f64).sqrt())
        .fold(0.0, f64::max);
    out.check(Check::within("max I_(n-1) sqrt(n), n >= 3", worst, c, 1e-15));
    out.check(Check::within(
        "3/(8u^2) at u = sqrt(6)",
        3.0 / (8.0 * 6.0),
        1.0 / 16.0,
        0.0,
    ));
    Ok(out)
}

/// Gaussian two-sided profile against `e^{-t²/2}` and the Gaussian tail
/// bound orderings.
pub fn suite_gaussian(cfg: &SuiteConfig) -> Result<SuiteOutcome> {
    let mut out = SuiteOutcome::new("gaussian");
    let grid = uniform_grid(-6.0, 6.0, cfg.grid_size, Endpoints::Closed);
    let profile = gaussian_profile(&grid)?;
    let values: Vec<f64> = profile.iter().map(|p| p.two_sided - p.exp_bound).collect();
    let margin = |a: f64| {
        let p = gaussian_profile(&[a])?[0];
        Ok(p.two_sided - p.exp_bound)
    };
    out.expect(
        certify_values("gaussian/two-sided", &grid, &values, margin, cfg)?,
        Expectation::Pass,
    );

    let grid = uniform_grid(0.0, 10.0, cfg.grid_size, Endpoints::Closed);
    let r = certify_margin(
        "gaussian/tail<=sampford",
        |u| Ok(gauss_upper_tail(u).ln() - sampford_bound(u)?.ln()),
        &grid,
        cfg,
    )?;
    out.expect(r, Expectation::Pass);
    let r = certify_margin(
        "gaussian/sampford<=komatu",
        |u| Ok(sampford_bound(u)?.ln() - komatu_bound(u)?.ln()),
        &grid,
        cfg,
    )?;
    out.expect(r, Expectation::Pass);

    out.check(Check::within("t(0)", gaussian_t(0.0)?, 1.0 / (2.0 * PI).sqrt(), 1e-15));
    out.check(Check::at_most("t(-10)", gaussian_t(-10.0)?, 1e-6));
    let far = gaussian_profile(&[10.0])?[0];
    out.check(Check::at_most("|E phi_10|", far.mean_phi.abs(), 1e-6));
    let mut diff = 0.0f64;
    for a in uniform_grid(-8.0, 8.0, 65, Endpoints::Closed) {
        diff = diff.max((gaussian_t(a)? - gaussian_t_quadrature(a)?).abs());
    }
    out.check(Check::at_most("t(a): closed form against quadrature", diff, 1e-10));
    let tail_err = (0..=20)
        .map(|i| {
            let u = 0.5 * i as f64;
            let q =
                integrate(|s| (-0.5 * s * s).exp(), u, u + 40.0, &QuadratureSpec::default()).unwrap_or(f64::INFINITY);
            (q - gauss_upper_tail(u)).abs()
        })
        .fold(0.0, f64::max);
    out.check(Check::at_most("erfc tail against quadrature", tail_err, 1e-12));
    out.check(Check::within("normal tail at 0", normal_tail(0.0), 0.5, 1e-16));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> SuiteConfig {
        SuiteConfig {
            grid_size: 400,
            ..Default::default()
        }
    }

    #[test]
    fn g_maximum() {
        let (x0, g0) = g_max().unwrap();
        assert!((x0 - (2.0f64 / 3.0).asin()).abs() < 1e-12);
        assert!((g0 + 0.046885).abs() < 1e-5);
    }

    #[test]
    fn h_values() {
        assert!((h_n(3, 2.67) - 0.033153).abs() < 1e-5);
        assert!((h_n(4, 2.89) - 0.024590).abs() < 1e-5);
        assert!((h_n(5, 3.0) - 0.05363).abs() < 1e-4);
        assert!(h_n(4, 3.0) < 0.0);
    }

    #[test]
    fn threshold_for_three_dimensions() {
        let u = twofifths_threshold_n3().unwrap();
        assert!((u - 0.550357236663951).abs() < 1e-9, "{u}");
    }

    #[test]
    fn ideal_bound_boundary() {
        let grid = uniform_grid(0.5, 6f64.sqrt(), 2000, Endpoints::Closed);
        let worst = |n| {
            grid.iter()
                .map(|&u| ideal_margin(Some(n), u))
                .fold(f64::NEG_INFINITY, f64::max)
        };
        assert!(worst(29) > 0.0 && worst(30) < 0.0);
    }

    #[test]
    fn alpha_constant() {
        assert!((large_b_alpha() - 0.0276755849092).abs() < 1e-12);
    }

    #[test]
    fn small_suites_meet_expectations() {
        for s in [
            suite_wallis,
            suite_cos_exp,
            suite_q2_fail,
            suite_q34,
            suite_g_max,
            suite_q_excess,
        ] {
            let o = s(&cfg()).unwrap();
            assert!(o.ok(), "{o:#?}");
        }
    }
}
