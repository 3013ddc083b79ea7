//! Closed-form means of `exp(-psi/eps)` over edges and triangles for
//! piecewise linear `psi`.
//!
//! Both means factor out `exp(-psi_min/eps)` so the remaining factor lies in
//! `(0, 1]` and never overflows.

use super::log_scaled::{neg_ratio, LogScaled};
use crate::error::{Error, Result};

/// Spread (in units of `eps`) below which the triangle mean switches to its
/// Taylor series.
const SERIES_SPREAD: f64 = 0.1;
const SERIES_TERMS: usize = 24;

/// `(1 - exp(-t)) / t` for `t >= 0`, equal to 1 at 0.
pub fn phi1(t: f64) -> f64 {
    if t < 1e-8 {
        1.0 - 0.5 * t
    } else {
        -(-t).exp_m1() / t
    }
}

fn ln_phi1(t: f64) -> f64 {
    if t > 40.0 {
        // 1 - exp(-t) rounds to 1
        -t.ln()
    } else {
        phi1(t).ln()
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")))
    }
}

/// Mean of `exp(-psi/eps)` along an edge on which `psi` varies linearly
/// from `psi_a` to `psi_b`.
pub fn edge_exp_mean(psi_a: f64, psi_b: f64, eps: f64) -> Result<LogScaled> {
    check_eps(eps)?;
    let min = psi_a.min(psi_b);
    let spread = (psi_a - psi_b).abs() / eps;
    let (hi, lo) = neg_ratio(min, eps);
    Ok(LogScaled::from_log_parts(1, hi, lo + ln_phi1(spread)))
}

/// Mean of `exp(-y)` over a triangle whose vertex values of `y` are
/// `0 <= s <= t`. This is twice the second divided difference of `exp` at
/// `(0, -s, -t)`.
pub fn tri_mean_shifted(s: f64, t: f64) -> f64 {
    debug_assert!(0.0 <= s && s <= t);
    if t <= SERIES_SPREAD {
        // 2 * sum_n h_n(-s, -t) / (n + 2)!, h_n the complete homogeneous
        // symmetric polynomial of degree n.
        let (y1, y2) = (-s, -t);
        let mut h = 1.0;
        let mut y1_pow = 1.0;
        let mut fact = 2.0;
        let mut sum = h / fact;
        for n in 1..SERIES_TERMS {
            y1_pow *= y1;
            h = y2 * h + y1_pow;
            fact *= (n + 2) as f64;
            sum += h / fact;
        }
        2.0 * sum
    } else {
        2.0 * (phi1(s) - (-s).exp() * phi1(t - s)) / t
    }
}

/// Mean of `exp(-psi/eps)` over a triangle with linear `psi` taking the
/// given vertex values.
pub fn tri_exp_mean(psi_1: f64, psi_2: f64, psi_3: f64, eps: f64) -> Result<LogScaled> {
    check_eps(eps)?;
    let mut v = [psi_1, psi_2, psi_3];
    v.sort_by(|a, b| a.total_cmp(b));
    let s = (v[1] - v[0]) / eps;
    let t = ((v[2] - v[0]) / eps).max(s);
    let (hi, lo) = neg_ratio(v[0], eps);
    Ok(LogScaled::from_log_parts(1, hi, lo + tri_mean_shifted(s, t).ln()))
}
