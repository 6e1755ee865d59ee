use std::f64::consts::PI;

use num_complex::Complex64;

use super::dd::Dd;
use super::{gamma, ln_gamma, BesselEval, BesselMethod};
use crate::error::{LabError, Result};
use crate::quadrature::{adaptive_integrate_real, gauss_jacobi, AdaptiveOptions};

const POISSON_MAX_ORDER: f64 = 2.5;
const SERIES_MAX_ARG: f64 = 40.0;

fn check_order(nu: f64) -> Result<()> {
    if nu < 0.0 || !nu.is_finite() {
        return Err(LabError::UnsupportedOrder(nu));
    }
    Ok(())
}

/// The double-double series keeps ~1e-17 absolute accuracy while its largest
/// term, roughly `e^x/(2πx)`, stays below ~1e15.
fn series_region(nu: f64, x: f64) -> bool {
    x <= 2f64.max(nu / 2.0) || x <= SERIES_MAX_ARG
}

fn asymptotic_region(nu: f64, x: f64) -> bool {
    x > 30.0 + nu * nu
}

/// `J_ν(x)` for `ν ≥ 0`, `x ≥ 0`, with automatic method selection.
pub fn bessel_j(nu: f64, x: f64) -> Result<f64> {
    Ok(bessel_j_eval(nu, x)?.value.re)
}

/// Like [`bessel_j`] but also reports which representation was used.
pub fn bessel_j_eval(nu: f64, x: f64) -> Result<BesselEval> {
    check_order(nu)?;
    if x < 0.0 || !x.is_finite() {
        return Err(LabError::Domain(format!(
            "J_nu needs a finite non-negative argument, got {x}"
        )));
    }
    let (value, method) = if series_region(nu, x) {
        (bessel_j_series(nu, x)?, BesselMethod::Series)
    } else if asymptotic_region(nu, x) {
        (bessel_j_asymptotic(nu, x)?, BesselMethod::Asymptotic)
    } else if nu <= POISSON_MAX_ORDER {
        (bessel_j_poisson(nu, x)?, BesselMethod::PoissonIntegral)
    } else {
        (bessel_j_split(nu, x)?, BesselMethod::MbesselSplit)
    };
    Ok(BesselEval {
        order: nu,
        argument: Complex64::new(x, 0.0),
        value: Complex64::new(value, 0.0),
        scaled: false,
        method,
    })
}

/// Ascending series `Σ (-1)^m (x/2)^{2m+ν} / (m! Γ(m+ν+1))`, accumulated in
/// double-double so the cancellation at moderate `x` costs nothing.
pub fn bessel_j_series(nu: f64, x: f64) -> Result<f64> {
    check_order(nu)?;
    if x == 0.0 {
        return Ok(if nu == 0.0 { 1.0 } else { 0.0 });
    }
    let lead = if nu < 100.0 {
        (x / 2.0).powf(nu) / gamma(nu + 1.0)
    } else {
        (nu * (x / 2.0).ln() - ln_gamma(nu + 1.0)).exp()
    };
    let q = -(Dd::prod(x, x) * Dd::new(0.25));
    let mut term = Dd::new(1.0);
    let mut sum = Dd::new(1.0);
    let mut m = 0.0f64;
    loop {
        m += 1.0;
        let denom = Dd::new(m) * Dd::sum(m, nu);
        term = term * q / denom;
        sum = sum + term;
        if term.hi.abs() < 1e-32 * sum.hi.abs().max(1e-300) && m > x {
            break;
        }
        if m > 500.0 {
            break;
        }
    }
    Ok(lead * sum.to_f64())
}

/// Poisson integral `(x/2)^ν/(Γ(ν+½)Γ(½)) ∫_{-1}^{1} cos(sx) (1-s²)^{ν-½} ds`
/// by Gauss–Jacobi quadrature with weight exponent `ν - ½`.
pub fn bessel_j_poisson(nu: f64, x: f64) -> Result<f64> {
    check_order(nu)?;
    let n = (0.6 * x + 24.0).ceil() as usize;
    let rule = gauss_jacobi(n, nu - 0.5, nu - 0.5)?;
    let integral: f64 = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(&s, &w)| w * (s * x).cos())
        .sum();
    let pref = (nu * (x / 2.0).ln() - ln_gamma(nu + 0.5) - 0.5 * PI.ln()).exp();
    Ok(pref * integral)
}

/// Schläfli split `(1/π)∫_0^π cos(νs − x sin s) ds − (sin νπ/π)∫_0^∞ e^{−x sinh s − νs} ds`.
pub fn bessel_j_split(nu: f64, x: f64) -> Result<f64> {
    check_order(nu)?;
    let phase = x + nu;
    let opts = AdaptiveOptions {
        initial_panels: ((phase / 3.0).ceil() as usize).max(2),
        abs_tol: 1e-15,
        rel_tol: 1e-14,
        max_panels: 20_000,
    };
    let (first, _) = adaptive_integrate_real(|s| (nu * s - x * s.sin()).cos(), 0.0, PI, opts);
    let mut value = first / PI;
    let sn = (nu * PI).sin();
    if sn.abs() > 1e-300 && x > 0.0 {
        let s_max = (60.0 / x).asinh() + 1.0;
        let (second, _) = adaptive_integrate_real(
            |s| (-x * s.sinh() - nu * s).exp(),
            0.0,
            s_max,
            AdaptiveOptions {
                initial_panels: 4,
                ..opts
            },
        );
        value -= sn / PI * second;
    }
    Ok(value)
}

/// Hankel large-argument expansion `√(2/(πx)) (P cos ω − Q sin ω)`.
pub fn bessel_j_asymptotic(nu: f64, x: f64) -> Result<f64> {
    check_order(nu)?;
    let mu = 4.0 * nu * nu;
    let omega = x - nu * PI / 2.0 - PI / 4.0;
    let mut p = 0.0f64;
    let mut q = 0.0;
    let mut a = 1.0f64; // a_k(ν) / x^k
    let mut prev = f64::INFINITY;
    for k in 0..60 {
        let mag = a.abs();
        if mag > prev {
            break;
        }
        match k % 4 {
            0 => p += a,
            1 => q += a,
            2 => p -= a,
            _ => q -= a,
        }
        if mag < 1e-17 * p.abs().max(1e-300) {
            break;
        }
        prev = mag;
        let j = (k + 1) as f64;
        a *= (mu - (2.0 * j - 1.0).powi(2)) / (j * 8.0 * x);
    }
    Ok((2.0 / (PI * x)).sqrt() * (p * omega.cos() - q * omega.sin()))
}

/// The small-argument envelope `x^ν / (2^ν Γ(ν+½) Γ(½))`.
pub fn small_argument_bound(nu: f64, x: f64) -> f64 {
    (nu * (x / 2.0).ln() - ln_gamma(nu + 0.5) - 0.5 * PI.ln()).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn j_half(x: f64) -> f64 {
        (2.0 / (PI * x)).sqrt() * x.sin()
    }

    #[test]
    fn half_order_closed_form() {
        for &x in &[0.3, 1.0, 3.7, 10.0, 25.0, 100.0, 500.0] {
            let got = bessel_j(0.5, x).unwrap();
            let want = j_half(x);
            assert!((got - want).abs() <= 1e-10 * want.abs().max(1e-3), "x={x}: {got} vs {want}");
        }
    }

    #[test]
    fn each_method_matches_half_order() {
        for &x in &[2.5, 8.0, 17.0, 31.0] {
            let want = j_half(x);
            for (name, got) in [
                ("series", bessel_j_series(0.5, x).unwrap()),
                ("poisson", bessel_j_poisson(0.5, x).unwrap()),
                ("split", bessel_j_split(0.5, x).unwrap()),
            ] {
                assert!((got - want).abs() < 1e-11, "{name} x={x}: {got} vs {want}");
            }
        }
        assert!((bessel_j_asymptotic(0.5, 40.0).unwrap() - j_half(40.0)).abs() < 1e-14);
    }

    #[test]
    fn negative_order_rejected() {
        assert!(matches!(
            bessel_j(-0.1, 1.0),
            Err(LabError::UnsupportedOrder(_))
        ));
    }

    #[test]
    fn switch_points_are_continuous() {
        for &nu in &[0.0, 0.25, 1.7, 2.5] {
            let xa = 30.0 + nu * nu;
            let below = bessel_j_poisson(nu, xa).unwrap();
            let above = bessel_j_asymptotic(nu, xa).unwrap();
            assert!((below - above).abs() < 1e-9 * below.abs().max(0.05));
            let xs = 2f64.max(nu / 2.0);
            let s = bessel_j_series(nu, xs).unwrap();
            let p = bessel_j_poisson(nu, xs).unwrap();
            assert!((s - p).abs() < 1e-9 * s.abs());
        }
        for &nu in &[3.5, 6.0, 12.25] {
            let xs = 2f64.max(nu / 2.0);
            let s = bessel_j_series(nu, xs).unwrap();
            let p = bessel_j_split(nu, xs).unwrap();
            assert!((s - p).abs() < 1e-9 * s.abs(), "nu={nu}: {s} vs {p}");
            let xa = 30.0 + nu * nu;
            let a = bessel_j_asymptotic(nu, xa).unwrap();
            let p = bessel_j_split(nu, xa).unwrap();
            assert!((a - p).abs() < 1e-9 * a.abs().max(0.05), "nu={nu}: {a} vs {p}");
        }
    }
}
