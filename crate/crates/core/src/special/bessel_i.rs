use std::f64::consts::PI;

use num_complex::Complex64;

use super::{gamma, ln_gamma, BesselEval, BesselMethod};
use crate::error::{LabError, Result};
use crate::quadrature::{adaptive_integrate, AdaptiveOptions};

/// Largest `Re z` for which the unscaled value is returned.
const UNSCALED_LIMIT: f64 = 700.0;

fn check(nu: f64, z: Complex64, scaled: bool) -> Result<()> {
    if nu < 0.0 || !nu.is_finite() {
        return Err(LabError::UnsupportedOrder(nu));
    }
    if !(z.re.is_finite() && z.im.is_finite()) || z.re < 0.0 {
        return Err(LabError::Domain(format!(
            "I_nu needs Re z >= 0, got z = {z}"
        )));
    }
    if !scaled && z.re > UNSCALED_LIMIT {
        return Err(LabError::Overflow(format!(
            "I_nu({z}) overflows; request the scaled value"
        )));
    }
    Ok(())
}

fn use_series(nu: f64, z: Complex64) -> bool {
    let r = z.norm();
    r <= 8.0 || r * r <= 4.0 * (nu + 1.0)
}

/// `I_ν(z)` (or `e^{-Re z} I_ν(z)` when `scaled`) for `ν ≥ 0`, `Re z ≥ 0`.
pub fn bessel_i(nu: f64, z: Complex64, scaled: bool) -> Result<Complex64> {
    Ok(bessel_i_eval(nu, z, scaled)?.value)
}

/// Like [`bessel_i`] but also reports which representation was used.
pub fn bessel_i_eval(nu: f64, z: Complex64, scaled: bool) -> Result<BesselEval> {
    check(nu, z, scaled)?;
    let (value, method) = if use_series(nu, z) {
        (series_unchecked(nu, z, scaled), BesselMethod::Series)
    } else {
        (split_unchecked(nu, z, scaled), BesselMethod::MbesselSplit)
    };
    Ok(BesselEval {
        order: nu,
        argument: z,
        value,
        scaled,
        method,
    })
}

/// Ascending series `Σ (z/2)^{2m+ν} / (m! Γ(m+ν+1))`.
pub fn bessel_i_series(nu: f64, z: Complex64, scaled: bool) -> Result<Complex64> {
    check(nu, z, scaled)?;
    Ok(series_unchecked(nu, z, scaled))
}

fn series_unchecked(nu: f64, z: Complex64, scaled: bool) -> Complex64 {
    if z.norm() == 0.0 {
        return Complex64::new(if nu == 0.0 { 1.0 } else { 0.0 }, 0.0);
    }
    let half = z * 0.5;
    let log_lead = half.ln() * nu - ln_gamma(nu + 1.0);
    let lead = if nu < 100.0 {
        if nu == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            (half.ln() * nu).exp() / gamma(nu + 1.0)
        }
    } else {
        log_lead.exp()
    };
    let q = half * half;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut m = 0.0f64;
    loop {
        m += 1.0;
        term = term * q / (m * (m + nu));
        sum += term;
        if term.norm() < 1e-17 * sum.norm() && m > z.norm() {
            break;
        }
        if m > 2000.0 {
            break;
        }
    }
    let value = lead * sum;
    if scaled {
        value * (-z.re).exp()
    } else {
        value
    }
}

/// Two-integral representation
/// `(1/π)∫_0^π e^{z cos s} cos(νs) ds − (sin νπ/π)∫_0^∞ e^{−z cosh s − νs} ds`.
///
/// The second integral runs along a rotated path: first the vertical leg
/// `s = −iθ`, `θ ∈ [0, arg z]`, then the horizontal ray `s = u − i·arg z`,
/// where `Re(z cosh s)` grows monotonically so the integrand decays for every
/// `z` in the closed right half-plane, including the imaginary axis.
pub fn bessel_i_split(nu: f64, z: Complex64, scaled: bool) -> Result<Complex64> {
    check(nu, z, scaled)?;
    Ok(split_unchecked(nu, z, scaled))
}

fn split_unchecked(nu: f64, z: Complex64, scaled: bool) -> Complex64 {
    let r = z.norm();
    if r == 0.0 {
        return Complex64::new(if nu == 0.0 { 1.0 } else { 0.0 }, 0.0);
    }
    // Every exponential carries the factor e^{-Re z} when scaled, so the
    // integrands stay O(1).
    let shift = if scaled { z.re } else { 0.0 };
    let opts = AdaptiveOptions {
        initial_panels: (((2.0 * z.im.abs() + nu * PI) / 4.0).ceil() as usize).max(2),
        abs_tol: 1e-15,
        rel_tol: 1e-14,
        max_panels: 40_000,
    };
    let first = adaptive_integrate(
        |s| (z * s.cos() - shift).exp() * (nu * s).cos(),
        0.0,
        PI,
        opts,
    )
    .value
        / PI;

    let sn = (nu * PI).sin();
    if sn.abs() < 1e-15 {
        return first;
    }
    let phi = z.arg();
    let i = Complex64::i();
    let vertical = if phi != 0.0 {
        let leg = adaptive_integrate(
            |theta| (-z * theta.cos() + i * (nu * theta) - shift).exp(),
            0.0,
            phi,
            AdaptiveOptions {
                initial_panels: ((r * phi.abs() / 4.0).ceil() as usize).max(1),
                ..opts
            },
        );
        -i * leg.value
    } else {
        Complex64::new(0.0, 0.0)
    };
    let u_max = (60.0 / r).asinh() + 1.0;
    let rot = Complex64::new(0.0, -phi);
    let horizontal = adaptive_integrate(
        |u| {
            let s = rot + u;
            (-z * s.cosh() - s * nu - shift).exp()
        },
        0.0,
        u_max,
        AdaptiveOptions {
            initial_panels: ((r * (phi.sin() * phi.cos()).abs() / 4.0).ceil() as usize).max(4),
            ..opts
        },
    );
    first - (vertical + horizontal.value) * (sn / PI)
}
