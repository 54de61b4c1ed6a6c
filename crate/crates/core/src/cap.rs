//! The marginal measure `ν_n` of `θ = arcsin u_1` under the uniform measure
//! on `S^{n-1}`, spherical-cap volumes, cap upper bounds and the normalized
//! cap-tail kernels `q_n`, `q_{n,ξ}`.
//!
//! Notation: `v_n(r)` is the normalized volume of a cap of geodesic radius
//! `r`, and `μ(K^a) = ν_n([a, π/2])` is the measure of `{u : u_1 >= sin a}`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, LN_2, PI};

use crate::error::{domain, Result};
use crate::special_fn::{integrate, kappa, ln_beta_reg, wallis, QuadratureSpec};

/// Above this dimension cap volumes come from the incomplete Beta function
/// instead of quadrature.
pub const BETA_ROUTE_MIN_DIM: u32 = 10_000;

/// Relative slack applied to the lower end of the [`cap_bound_twofifths`]
/// domain, so that thresholds computed as `u / √n` are not rejected by a
/// rounding error.
const THRESHOLD_SLACK: f64 = 1e-12;

/// Dimension of the ambient space; the sphere is `S^{n-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SphereDim(u32);

impl SphereDim {
    pub fn new(n: u32) -> Result<Self> {
        if n < 2 {
            return Err(domain("n", n as f64, "n >= 2"));
        }
        Ok(Self(n))
    }

    pub fn n(self) -> u32 {
        self.0
    }

    pub(crate) fn nf(self) -> f64 {
        self.0 as f64
    }

    /// `ln(2 I_{n-2})`, the log normalizer of `ν_n`.
    pub fn ln_normalizer(self) -> f64 {
        LN_2 + wallis(self.0 - 2).log_value
    }
}

fn quad_spec() -> QuadratureSpec {
    QuadratureSpec::relative(1e-12)
}

fn check_radius(r: f64) -> Result<()> {
    if !(0.0..=FRAC_PI_2).contains(&r) {
        return Err(domain("r", r, "[0, pi/2]"));
    }
    Ok(())
}

fn check_angle(a: f64) -> Result<()> {
    if !(-FRAC_PI_2..=FRAC_PI_2).contains(&a) {
        return Err(domain("a", a, "[-pi/2, pi/2]"));
    }
    Ok(())
}

/// Density `(2I_{n-2})^{-1} cos^{n-2} θ` of `ν_n`; zero outside `[-π/2, π/2]`.
pub fn nu_density_at(dim: SphereDim, theta: f64) -> f64 {
    if !(theta.abs() <= FRAC_PI_2) {
        return 0.0;
    }
    if dim.n() == 2 {
        return 1.0 / PI;
    }
    if theta.abs() == FRAC_PI_2 {
        return 0.0;
    }
    ((dim.nf() - 2.0) * theta.cos().ln() - dim.ln_normalizer()).exp()
}

/// `ln v_n(r)`.
pub fn ln_cap_volume(dim: SphereDim, r: f64) -> Result<f64> {
    check_radius(r)?;
    if r == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    if r == FRAC_PI_2 {
        return Ok(-LN_2);
    }
    let n = dim.n();
    if n == 2 {
        return Ok((r / PI).ln());
    }
    if n > BETA_ROUTE_MIN_DIM {
        return ln_volume_beta(dim, r);
    }
    ln_volume_quad(dim, r)
}

/// `v_n(r) = (2I_{n-2})^{-1} ∫_0^r sin^{n-2} θ dθ` for `r ∈ [0, π/2]`.
pub fn cap_volume(dim: SphereDim, r: f64) -> Result<f64> {
    Ok(ln_cap_volume(dim, r)?.exp())
}

fn ln_volume_quad(dim: SphereDim, r: f64) -> Result<f64> {
    // Factor out sin^{n-2} r so the integrand is bounded by 1 and the
    // relative tolerance applies to a quantity of order one.
    let k = (dim.n() - 2) as i32;
    let s = r.sin();
    let scaled = integrate(|y| (y.sin() / s).powi(k), 0.0, r, &quad_spec())?;
    Ok((k as f64) * s.ln() + scaled.ln() - dim.ln_normalizer())
}

fn ln_volume_beta(dim: SphereDim, r: f64) -> Result<f64> {
    // v_n(r) = ½ I_{sin²r}((n-1)/2, ½)
    let s2 = r.sin().powi(2);
    Ok(ln_beta_reg(0.5 * (dim.nf() - 1.0), 0.5, s2)? - LN_2)
}

/// `μ(K^a) = ν_n([a, π/2])` for `a ∈ [-π/2, π/2]`.
pub fn cap_tail(dim: SphereDim, a: f64) -> Result<f64> {
    check_angle(a)?;
    if a >= 0.0 {
        cap_volume(dim, FRAC_PI_2 - a)
    } else {
        Ok(1.0 - cap_volume(dim, FRAC_PI_2 + a)?)
    }
}

/// `ln μ(K^a)`, accurate also when the tail underflows.
pub fn ln_cap_tail(dim: SphereDim, a: f64) -> Result<f64> {
    check_angle(a)?;
    if a >= 0.0 {
        ln_cap_volume(dim, FRAC_PI_2 - a)
    } else {
        Ok((-cap_volume(dim, FRAC_PI_2 + a)?).ln_1p())
    }
}

/// `ν_n([lo, hi])` computed directly rather than as a difference of tails,
/// so that short intervals keep full relative accuracy.
pub fn nu_interval(dim: SphereDim, lo: f64, hi: f64) -> Result<f64> {
    check_angle(lo)?;
    check_angle(hi)?;
    if lo > hi {
        return Err(domain("lo", lo, format!("[-pi/2, hi = {hi}]")));
    }
    if lo == hi {
        return Ok(0.0);
    }
    let n = dim.n();
    if n == 2 {
        return Ok((hi - lo) / PI);
    }
    if n > BETA_ROUTE_MIN_DIM {
        return Ok(cap_tail(dim, lo)? - cap_tail(dim, hi)?);
    }
    let k = (n - 2) as i32;
    let peak = if lo <= 0.0 && hi >= 0.0 {
        0.0
    } else {
        lo.abs().min(hi.abs())
    };
    let c = peak.cos();
    let scaled = integrate(|y| (y.cos() / c).powi(k), lo, hi, &quad_spec())?;
    Ok(((k as f64) * c.ln() + scaled.ln() - dim.ln_normalizer()).exp())
}

/// `ν_n([hi - width, hi])`, parametrized by the width so that intervals
/// narrower than the spacing of floats near `hi` are still resolved.
pub fn nu_below(dim: SphereDim, hi: f64, width: f64) -> Result<f64> {
    check_angle(hi)?;
    if !(width >= 0.0 && width <= hi + FRAC_PI_2 + 1e-15) {
        return Err(domain("width", width, format!("[0, hi + pi/2] with hi = {hi}")));
    }
    if width == 0.0 {
        return Ok(0.0);
    }
    let n = dim.n();
    if n == 2 {
        return Ok(width / PI);
    }
    let lo = (hi - width).max(-FRAC_PI_2);
    if n > BETA_ROUTE_MIN_DIM {
        return nu_interval(dim, lo, hi);
    }
    let k = (n - 2) as i32;
    let peak = if lo <= 0.0 && hi >= 0.0 {
        0.0
    } else {
        lo.abs().min(hi.abs())
    };
    let c = peak.cos();
    let scaled = integrate(
        |s| ((hi - s).max(-FRAC_PI_2).cos() / c).powi(k),
        0.0,
        width,
        &quad_spec(),
    )?;
    Ok(((k as f64) * c.ln() + scaled.ln() - dim.ln_normalizer()).exp())
}

/// `½ sin^{n-1} r`, an upper bound for `v_n(r)` with equality at `r = 0`
/// and `r = π/2`.
pub fn cap_bound_halfcos(dim: SphereDim, r: f64) -> Result<f64> {
    check_radius(r)?;
    Ok(0.5 * r.sin().powi(dim.n() as i32 - 1))
}

/// `(√(2π) κ_n cos r)^{-1} sin^{n-1} r`, an upper bound for `v_n(r)` that
/// is sharper than [`cap_bound_halfcos`] unless `r` is close to `π/2`.
pub fn cap_bound_kappa(dim: SphereDim, r: f64) -> Result<f64> {
    if !(0.0..FRAC_PI_2).contains(&r) {
        return Err(domain("r", r, "[0, pi/2)"));
    }
    let k = kappa(dim.n())?.value;
    Ok(r.sin().powi(dim.n() as i32 - 1) / ((2.0 * PI).sqrt() * k * r.cos()))
}

/// Smallest admissible `u = x√n` for [`cap_bound_twofifths`].
pub fn twofifths_threshold(dim: SphereDim) -> f64 {
    if dim.n() == 3 {
        0.551
    } else {
        0.5
    }
}

/// `(2/5) e^{-nx²/2}`, an upper bound for `μ(K^x)` when
/// `x √n >= 1/2` (`>= 0.551` for `n = 3`).
pub fn cap_bound_twofifths(dim: SphereDim, x: f64) -> Result<f64> {
    if dim.n() < 3 {
        return Err(domain("n", dim.nf(), "n >= 3"));
    }
    let lo = twofifths_threshold(dim) / dim.nf().sqrt();
    if !(x >= lo * (1.0 - THRESHOLD_SLACK) && x <= FRAC_PI_2) {
        return Err(domain("x", x, format!("[{lo}, pi/2]")));
    }
    Ok(0.4 * (-0.5 * dim.nf() * x * x).exp())
}

fn check_q_arg(x: f64) -> Result<()> {
    if !(0.0..=FRAC_PI_2).contains(&x) {
        return Err(domain("x", x, "[0, pi/2]"));
    }
    Ok(())
}

/// `ln q_n(x)`; closed forms for `n = 2, 3, 4`, the integral otherwise.
pub fn ln_q_n(dim: SphereDim, x: f64) -> Result<f64> {
    check_q_arg(x)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    let y = FRAC_PI_2 - x;
    match dim.n() {
        2 => Ok((2.0 * y / PI).ln() + x * x),
        // 1 - sin x = 2 sin²(π/4 - x/2), free of cancellation near π/2
        3 => Ok(LN_2 + 2.0 * (FRAC_PI_4 - 0.5 * x).sin().ln() + 1.5 * x * x),
        // π - 2x - 2 cos x sin x = 2y - sin 2y
        4 => Ok((2.0 * y - (2.0 * y).sin()).ln() - PI.ln() + 2.0 * x * x),
        _ => ln_q_n_integral(dim, x),
    }
}

/// `ln q_n(x)` from the cap-tail integral, for every `n`.
pub fn ln_q_n_integral(dim: SphereDim, x: f64) -> Result<f64> {
    check_q_arg(x)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    Ok(LN_2 + ln_cap_tail(dim, x)? + 0.5 * dim.nf() * x * x)
}

/// `q_n(x) = (∫_x^{π/2} cos^{n-2} θ dθ / I_{n-2}) e^{nx²/2}`, with
/// `q_n(0) = 1` exactly.
pub fn q_n(dim: SphereDim, x: f64) -> Result<f64> {
    Ok(ln_q_n(dim, x)?.exp())
}

fn check_xi(xi: f64) -> Result<()> {
    if !(xi >= 0.0 && xi.is_finite()) {
        return Err(domain("xi", xi, "[0, inf)"));
    }
    Ok(())
}

/// `ln q_{n,ξ}(x) = ln q_n(x) + ξx²/2`.
pub fn ln_q_n_xi(dim: SphereDim, x: f64, xi: f64) -> Result<f64> {
    check_xi(xi)?;
    Ok(ln_q_n(dim, x)? + 0.5 * xi * x * x)
}

/// `q_{n,ξ}(x) = q_n(x) e^{ξx²/2}`.
pub fn q_n_xi(dim: SphereDim, x: f64, xi: f64) -> Result<f64> {
    Ok(ln_q_n_xi(dim, x, xi)?.exp())
}
