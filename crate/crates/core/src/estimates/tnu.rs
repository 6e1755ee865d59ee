//! Time decay of the frequency-localized radial propagator
//! `T_ν g(t, r₁) = ∫ K^l_ν(t; r₁, r₂) g(r₂) r₂^{n−1} dr₂`, where
//! `K^l_ν = (r₁r₂)^{−(n−2)/2} ∫ e^{itρ²} J_ν(r₁ρ) J_ν(r₂ρ) φ(ρ) ρ dρ`.
//!
//! The `L^{p'} → L^p` norm is probed from below with the refocusing family
//! `g_t = H_ν[e^{−itρ²} φ]`: then `T_ν g_t = H_ν[φ²]` for every `t`, while
//! `‖g_t‖_{p'}` grows like `t^{(n/2)(1−2/p)}`.

use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::fit::loglog_fit;
use super::report::{Check, ScanReport};
use crate::error::{LabError, Result};
use crate::hankel::{lp_phi, HankelTransform, ModeCoefficient, RadialGrid, DEFAULT_R_MIN};

#[derive(Debug, Clone, Serialize)]
pub struct TnuSetup {
    pub n: usize,
    pub r_max: f64,
    pub panels: usize,
}

impl Default for TnuSetup {
    fn default() -> Self {
        Self {
            n: 3,
            r_max: 40.0,
            panels: 96,
        }
    }
}

/// `‖T_ν g_t‖_p / ‖g_t‖_{p'}` at each time.
pub fn tnu_ratios(nu: f64, p: f64, times: &[f64], setup: &TnuSetup) -> Result<Vec<f64>> {
    if !(p >= 2.0) {
        return Err(LabError::Parameter(format!("T_nu check needs p >= 2, got {p}")));
    }
    let grid = RadialGrid::new(setup.n, DEFAULT_R_MIN, setup.r_max, setup.panels)?;
    let tr = HankelTransform::symmetric(nu, grid)?;
    let phi: Vec<Complex64> = tr.rho_grid.nodes.iter().map(|&r| Complex64::new(lp_phi(r), 0.0)).collect();
    let phi2: Vec<Complex64> = phi.iter().map(|v| v * v).collect();
    let out = tr.inverse(&phi2)?;
    let num = tr.r_grid.lp_norm(&out, p);
    let f = ModeCoefficient::new(0, nu, tr.inverse(&phi)?)?;
    let p_dual = if p.is_infinite() { 1.0 } else { p / (p - 1.0) };
    times
        .par_iter()
        .map(|&t| {
            let g = tr.evolve(&f, -t)?;
            Ok(num / g.lp_norm(p_dual))
        })
        .collect()
}

/// Fitted `t`-slope of the ratio against `−(n/2)(1 − 2/p)`, tolerance 0.1.
pub fn tnu_decay_check(nu: f64, p: f64, times: &[f64], setup: &TnuSetup) -> Result<ScanReport> {
    let start = Instant::now();
    let n = setup.n as f64;
    let bound = (n - 2.0) / 2.0;
    if !(nu > 0.0 && nu <= bound) {
        return Err(LabError::Parameter(format!("T_nu check needs 0 < nu <= (n-2)/2, got {nu}")));
    }
    let sigma = nu - bound;
    let p_sigma = if sigma >= 0.0 { f64::INFINITY } else { n / sigma.abs() };
    if p >= p_sigma {
        return Err(LabError::Parameter(format!("p = {p} is not below p(sigma) = {p_sigma}")));
    }
    let ratios = tnu_ratios(nu, p, times, setup)?;
    let target = -(n / 2.0) * (1.0 - 2.0 / p);
    let mut report = ScanReport::new(&format!("tnu_decay_nu{nu}_p{p}"), "tnu_decay_check", "radial");
    report
        .range("t", times)
        .range("nu", &[nu])
        .range("p", &[p])
        .provenance("setup", setup)
        .provenance("p_sigma", if p_sigma.is_finite() { Some(p_sigma) } else { None })
        .provenance("test_family", "g_t = H_nu[exp(-i t rho^2) phi(rho)]");
    let fit = loglog_fit(times, &ratios);
    report.observed = fit.map_or(f64::NAN, |f| f.slope);
    report.check(Check::within("time_slope", report.observed, target, 0.1));
    if let [.., (t1, r1), (t2, r2)] = times.iter().zip(&ratios).collect::<Vec<_>>()[..] {
        report.provenance("last_local_slope", (r2 / r1).ln() / (t2 / t1).ln());
    }
    report.note("the ratio is a lower bound for the operator norm attained by a refocusing family");
    report.columns = ["t", "ratio"].map(String::from).to_vec();
    report.samples = times.iter().zip(&ratios).map(|(t, r)| vec![*t, *r]).collect();
    report.runtime = start.elapsed();
    report.finish();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn l2_ratio_is_constant() {
        let r = tnu_ratios(0.25, 2.0, &[1.0, 4.0, 16.0], &TnuSetup::default()).unwrap();
        for v in &r {
            assert!((v / r[0] - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn rejects_p_at_or_above_p_sigma() {
        assert!(tnu_decay_check(0.25, 12.0, &[1.0, 2.0], &TnuSetup::default()).is_err());
        assert!(tnu_decay_check(0.75, 4.0, &[1.0, 2.0], &TnuSetup::default()).is_err());
    }

    #[test]
    fn doubled_resolution_agrees() {
        let times = [2.0, 8.0];
        let a = tnu_ratios(0.25, 8.0, &times, &TnuSetup::default()).unwrap();
        let b = tnu_ratios(
            0.25,
            8.0,
            &times,
            &TnuSetup {
                panels: 192,
                ..Default::default()
            },
        )
        .unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-3 * y, "{x} {y}");
        }
    }
}
