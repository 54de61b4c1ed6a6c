//! Tail profiles of the truncations `φ_a(θ) = min(θ, a)`, the extremal
//! 1-Lipschitz functions of `θ = arcsin u_1` for deviations from the mean.
//!
//! For each level `a` the deviation scale is `t(a) = a - E φ_a`, the
//! one-sided tail is `F_1(a) = ν_n([a, π/2])` and the two-sided tail is
//! `F(a) = ν_n(|φ_a - E φ_a| >= t(a))`. These are compared with
//! `G(a) = e^{-n t(a)²/2}`.

use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;
use serde::Serialize;

use crate::cap::{cap_tail, nu_below, SphereDim};
use crate::error::{domain, Error, Result};
use crate::special_fn::{integrate, normal_pdf, normal_tail, QuadratureSpec};

/// One row of a tail profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailProfilePoint {
    pub a: f64,
    pub t: f64,
    pub mean_phi: f64,
    pub one_sided: f64,
    pub two_sided: f64,
    pub exp_bound: f64,
}

fn check_level(a: f64) -> Result<()> {
    if !(-FRAC_PI_2..=FRAC_PI_2).contains(&a) {
        return Err(domain("a", a, "[-pi/2, pi/2]"));
    }
    Ok(())
}

/// `(2I_{n-2})^{-1} ∫_0^z (z - y) sin^{n-2} y dy` for `z ∈ [0, π/2]`.
///
/// Both `E(a - θ)^+` (with `z = a + π/2`) and `E(θ - a)^+` (with
/// `z = π/2 - a`) reduce to this integral after the substitution
/// `θ = ∓(π/2 - y)`.
pub fn partial_moment(dim: SphereDim, z: f64) -> Result<f64> {
    if !(0.0..=FRAC_PI_2).contains(&z) {
        return Err(domain("z", z, "[0, pi/2]"));
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    let k = (dim.n() - 2) as i32;
    let s = z.sin();
    let spec = QuadratureSpec::relative(1e-12);
    let scaled = integrate(|y| (z - y) * (y.sin() / s).powi(k), 0.0, z, &spec)?;
    Ok(((k as f64) * s.ln() + scaled.ln() - dim.ln_normalizer()).exp())
}

/// `t(a) = a - E φ_a`; nondecreasing, `t(-π/2) = 0`, `t(π/2) = π/2`.
pub fn t_of_a(dim: SphereDim, a: f64) -> Result<f64> {
    check_level(a)?;
    if a <= 0.0 {
        partial_moment(dim, a + FRAC_PI_2)
    } else {
        Ok(a + partial_moment(dim, FRAC_PI_2 - a)?)
    }
}

/// `E φ_a = a - t(a)`.
pub fn mean_phi(dim: SphereDim, a: f64) -> Result<f64> {
    check_level(a)?;
    if a <= 0.0 {
        Ok(a - partial_moment(dim, a + FRAC_PI_2)?)
    } else {
        Ok(-partial_moment(dim, FRAC_PI_2 - a)?)
    }
}

/// `η(a) = t(a) - a = -E φ_a = ∫_a^{π/2} μ(K^x) dx` for `a >= 0`.
pub fn eta_of_a(dim: SphereDim, a: f64) -> Result<f64> {
    if !(0.0..=FRAC_PI_2).contains(&a) {
        return Err(domain("a", a, "[0, pi/2]"));
    }
    partial_moment(dim, FRAC_PI_2 - a)
}

/// `ν_n(φ_a >= E φ_a + t(a)) = μ(K^a)`.
pub fn one_sided_tail(dim: SphereDim, a: f64) -> Result<f64> {
    cap_tail(dim, a)
}

/// `ν_n(|φ_a - E φ_a| >= t(a)) = μ(K^a) + μ(K^{2t-a})`, the second term
/// vanishing once `2t - a > π/2`.
pub fn two_sided_tail(dim: SphereDim, a: f64) -> Result<f64> {
    let t = t_of_a(dim, a)?;
    two_sided_from(dim, a, t)
}

fn two_sided_from(dim: SphereDim, a: f64, t: f64) -> Result<f64> {
    let upper = cap_tail(dim, a)?;
    let reflected = 2.0 * t - a;
    let lower = if reflected > FRAC_PI_2 {
        0.0
    } else {
        cap_tail(dim, reflected)?
    };
    Ok(upper + lower)
}

/// `1 - F(a) = ν_n([max(a - 2t, -π/2), a])`, evaluated directly so that it
/// keeps relative accuracy when `F(a)` is within rounding of 1, including
/// when `2t` is below the float spacing at `a`.
pub fn two_sided_complement(dim: SphereDim, a: f64) -> Result<f64> {
    let t = t_of_a(dim, a)?;
    nu_below(dim, a, (2.0 * t).min(a + FRAC_PI_2))
}

/// `constant · e^{-n t²/2}`.
pub fn exp_bound(dim: SphereDim, t: f64, constant: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(domain("t", t, "[0, inf)"));
    }
    if !(constant > 0.0 && constant <= 1.0) {
        return Err(domain("constant", constant, "(0, 1]"));
    }
    Ok(constant * (-0.5 * dim.nf() * t * t).exp())
}

fn point(dim: SphereDim, a: f64) -> Result<TailProfilePoint> {
    let t = t_of_a(dim, a)?;
    Ok(TailProfilePoint {
        a,
        t,
        mean_phi: mean_phi(dim, a)?,
        one_sided: cap_tail(dim, a)?,
        two_sided: two_sided_from(dim, a, t)?,
        exp_bound: exp_bound(dim, t, 1.0)?,
    })
}

/// Evaluates the profile at every grid point, in grid order.
pub fn profile(dim: SphereDim, a_grid: &[f64]) -> Result<Vec<TailProfilePoint>> {
    a_grid.par_iter().map(|&a| point(dim, a)).collect()
}

/// Uniform grid of `uniform` points on `[-π/2, π/2]`, merged with
/// `geometric` points whose distance to `-π/2` is log-spaced in
/// `[1e-4, 0.1]`. Sorted, without duplicates.
pub fn refined_a_grid(uniform: usize, geometric: usize) -> Vec<f64> {
    let last = uniform.max(2) - 1;
    let mut g: Vec<f64> = (0..uniform)
        .map(|i| match i {
            _ if i == last => FRAC_PI_2,
            _ => -FRAC_PI_2 + std::f64::consts::PI * i as f64 / last as f64,
        })
        .collect();
    for i in 0..geometric {
        let e = -4.0 + 3.0 * i as f64 / (geometric.max(2) - 1) as f64;
        g.push(-FRAC_PI_2 + 10f64.powf(e));
    }
    g.sort_by(f64::total_cmp);
    g.dedup();
    g
}

/// Standard Gaussian analogue: `t(a) = E(a - Z)^+ = φ(a) + aΦ(a)`.
pub fn gaussian_t(a: f64) -> Result<f64> {
    if !a.is_finite() {
        return Err(Error::NonFinite { param: a });
    }
    // aΦ(a) + φ(a) = φ(a) - |a| Q̄(|a|) for a < 0
    let t = if a >= 0.0 {
        a * (1.0 - normal_tail(a)) + normal_pdf(a)
    } else {
        normal_pdf(a) + a * normal_tail(-a)
    };
    Ok(t.max(0.0))
}

/// `t(a) = a + ∫_a^∞ Q̄(x) dx` by quadrature truncated at `a + 40`; a
/// cross-check for [`gaussian_t`].
pub fn gaussian_t_quadrature(a: f64) -> Result<f64> {
    if !a.is_finite() {
        return Err(Error::NonFinite { param: a });
    }
    let spec = QuadratureSpec::default();
    Ok(a + integrate(normal_tail, a, a + 40.0, &spec)?)
}

/// Gaussian profile: one-sided `Q̄(a)`, two-sided `Q̄(a) + Q̄(2t - a)`,
/// comparator `e^{-t²/2}`.
pub fn gaussian_profile(a_grid: &[f64]) -> Result<Vec<TailProfilePoint>> {
    a_grid
        .par_iter()
        .map(|&a| {
            let t = gaussian_t(a)?;
            let one = normal_tail(a);
            Ok(TailProfilePoint {
                a,
                t,
                mean_phi: a - t,
                one_sided: one,
                two_sided: one + normal_tail(2.0 * t - a),
                exp_bound: (-0.5 * t * t).exp(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special_fn::gauss_upper_tail;
    use std::f64::consts::PI;

    fn dim(n: u32) -> SphereDim {
        SphereDim::new(n).unwrap()
    }

    fn grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
        (0..count)
            .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
            .collect()
    }

    #[test]
    fn circle_closed_forms() {
        let d = dim(2);
        for a in grid(-FRAC_PI_2, FRAC_PI_2, 41) {
            let t = t_of_a(d, a).unwrap();
            let exact = (a + FRAC_PI_2).powi(2) / (2.0 * PI);
            assert!((t - exact).abs() < 1e-13, "a={a}");
            assert!((one_sided_tail(d, a).unwrap() - (0.5 - a / PI)).abs() < 1e-15);
        }
        assert!((mean_phi(d, 0.0).unwrap() + PI / 8.0).abs() < 1e-14);
    }

    #[test]
    fn endpoint_values() {
        for n in [2, 3, 10] {
            let d = dim(n);
            assert_eq!(t_of_a(d, -FRAC_PI_2).unwrap(), 0.0);
            assert_eq!(mean_phi(d, -FRAC_PI_2).unwrap(), -FRAC_PI_2);
            assert_eq!(mean_phi(d, FRAC_PI_2).unwrap(), 0.0);
            assert_eq!(eta_of_a(d, FRAC_PI_2).unwrap(), 0.0);
            assert_eq!(two_sided_tail(d, -FRAC_PI_2).unwrap(), 1.0);
            assert_eq!(two_sided_tail(d, FRAC_PI_2).unwrap(), 0.0);
            assert_eq!(one_sided_tail(d, -FRAC_PI_2).unwrap(), 1.0);
            assert_eq!(one_sided_tail(d, 0.0).unwrap(), 0.5);
        }
        assert!(eta_of_a(dim(3), -0.1).is_err());
        assert!(t_of_a(dim(3), 1.6).is_err());
    }

    #[test]
    fn three_dimensional_eta() {
        let expected = (FRAC_PI_2 - 1.0) / 2.0;
        assert!((eta_of_a(dim(3), 0.0).unwrap() - expected).abs() < 1e-14);
        assert!((t_of_a(dim(3), 0.0).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn single_integral_matches_tail_integral() {
        // t(a) = a + ∫_a^{π/2} μ(K^x) dx, integrated over cap tails directly
        let spec = QuadratureSpec {
            abs_tol: 1e-13,
            rel_tol: 1e-13,
            max_depth: 60,
        };
        for n in [2, 3, 5, 17] {
            let d = dim(n);
            for a in grid(-1.5, 1.5, 13) {
                let nested = a + integrate(|x| cap_tail(d, x).unwrap(), a, FRAC_PI_2, &spec).unwrap();
                let t = t_of_a(d, a).unwrap();
                assert!((t - nested).abs() < 1e-11, "n={n} a={a}: {t} vs {nested}");
            }
        }
    }

    #[test]
    fn eta_below_gaussian_majorant() {
        for n in [3, 5, 10, 40] {
            let d = dim(n);
            let sn = (n as f64).sqrt();
            for a in grid(0.0, FRAC_PI_2, 30) {
                let majorant = 0.5 * gauss_upper_tail(a * sn) / sn;
                assert!(eta_of_a(d, a).unwrap() <= majorant, "n={n} a={a}");
            }
        }
    }

    #[test]
    fn profile_invariants() {
        let g = refined_a_grid(200, 40);
        for n in [2, 3, 4, 9, 25] {
            let p = profile(dim(n), &g).unwrap();
            assert_eq!(p.len(), g.len());
            for w in p.windows(2) {
                let (x, y) = (w[0], w[1]);
                let dm = y.mean_phi - x.mean_phi;
                assert!(dm >= -1e-13 && dm <= y.a - x.a + 1e-13, "n={n} a={}", y.a);
                assert!(y.t >= x.t - 1e-13);
            }
            for q in &p {
                assert!((q.t - (q.a - q.mean_phi)).abs() < 1e-13);
                assert!(q.t >= 0.0);
                assert!(q.mean_phi <= q.a);
                assert!(q.one_sided <= q.two_sided + 1e-15 && q.two_sided <= 1.0 + 1e-12);
                assert_eq!(q.exp_bound, (-0.5 * n as f64 * q.t * q.t).exp());
            }
        }
    }

    #[test]
    fn profile_at_pole_is_degenerate() {
        let p = profile(dim(3), &[-FRAC_PI_2]).unwrap();
        assert_eq!(p[0].t, 0.0);
        assert_eq!(p[0].two_sided, 1.0);
        assert_eq!(p[0].exp_bound, 1.0);
    }

    #[test]
    fn complement_matches_tail() {
        for n in [2, 3, 8] {
            let d = dim(n);
            for a in grid(-1.5, 1.5, 25) {
                let f = two_sided_tail(d, a).unwrap();
                let c = two_sided_complement(d, a).unwrap();
                assert!((f + c - 1.0).abs() < 1e-12, "n={n} a={a}");
            }
        }
    }

    #[test]
    fn exp_bound_values() {
        assert_eq!(exp_bound(dim(3), 0.0, 1.0).unwrap(), 1.0);
        let v = exp_bound(dim(3), 1.0, 0.5).unwrap();
        assert!((v - 0.5 * (-1.5f64).exp()).abs() < 1e-16);
        assert!(exp_bound(dim(3), -1.0, 1.0).is_err());
        assert!(exp_bound(dim(3), 1.0, 1.5).is_err());
        assert!(exp_bound(dim(3), 1.0, 0.5f64.exp() / 2.0).is_ok());
    }

    #[test]
    fn gaussian_scale() {
        let t0 = gaussian_t(0.0).unwrap();
        assert!((t0 - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-15);
        for a in grid(-8.0, 8.0, 33) {
            let t = gaussian_t(a).unwrap();
            let q = gaussian_t_quadrature(a).unwrap();
            assert!((t - q).abs() < 1e-10, "a={a}: {t} vs {q}");
        }
        assert!(gaussian_t(-10.0).unwrap() < 1e-6);
        let far = gaussian_profile(&[10.0]).unwrap()[0];
        assert!(far.mean_phi.abs() < 1e-6);
        assert!(gaussian_t(f64::NAN).is_err());
    }

    #[test]
    fn gaussian_profile_values() {
        let p = gaussian_profile(&[0.0, -40.0]).unwrap();
        let t0 = 1.0 / (2.0 * PI).sqrt();
        assert!((p[0].two_sided - (0.5 + normal_tail(2.0 * t0))).abs() < 1e-15);
        assert!(p[1].t < 1e-300 && p[1].two_sided == 1.0 + normal_tail(40.0));
        let g = grid(-6.0, 6.0, 601);
        for q in gaussian_profile(&g).unwrap() {
            assert!(q.two_sided <= q.exp_bound + 1e-12, "a={}", q.a);
        }
    }

    #[test]
    fn refined_grid_shape() {
        let g = refined_a_grid(100, 10);
        assert_eq!(g.len(), 110);
        assert_eq!(g[0], -FRAC_PI_2);
        assert_eq!(*g.last().unwrap(), FRAC_PI_2);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert!((g[1] + FRAC_PI_2 - 1e-4).abs() < 1e-15);
    }
}
