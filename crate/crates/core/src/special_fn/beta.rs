//! Regularized incomplete Beta function in log space.
//!
//! Continued fraction (modified Lentz) with the usual symmetry switch
//! `I_x(a, b) = 1 - I_{1-x}(b, a)` past the mean.

use super::ln_gamma_half_ratio;
use crate::error::{Error, Result};

const MAX_ITER: usize = 100_000;
const EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;

/// `ln B(a, b)`; uses the cancellation-free half ratio when `b = 1/2`.
pub fn ln_beta(a: f64, b: f64) -> f64 {
    if b == 0.5 {
        // B(a, 1/2) = Γ(a)Γ(1/2)/Γ(a+1/2)
        0.5 * std::f64::consts::PI.ln() - ln_gamma_half_ratio(a)
    } else if a == 0.5 {
        ln_beta(b, a)
    } else {
        libm::lgamma(a) + libm::lgamma(b) - libm::lgamma(a + b)
    }
}

/// `ln I_x(a, b)` for `a, b > 0`, `0 <= x <= 1`.
pub fn ln_beta_reg(a: f64, b: f64, x: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return Err(crate::error::domain("a, b", a.min(b), "(0, inf)"));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(crate::error::domain("x", x, "[0, 1]"));
    }
    if x == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    if x == 1.0 {
        return Ok(0.0);
    }
    let ln_front = a * x.ln() + b * (-x).ln_1p() - ln_beta(a, b);
    if x < (a + 1.0) / (a + b + 2.0) {
        Ok(ln_front + continued_fraction(a, b, x)?.ln() - a.ln())
    } else {
        let ln_comp = ln_front + continued_fraction(b, a, 1.0 - x)?.ln() - b.ln();
        Ok((-ln_comp.exp()).ln_1p())
    }
}

fn continued_fraction(a: f64, b: f64, x: f64) -> Result<f64> {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            return Ok(h);
        }
    }
    Err(Error::NoConvergence {
        lo: 0.0,
        hi: x,
        max_depth: MAX_ITER as u32,
    })
}
