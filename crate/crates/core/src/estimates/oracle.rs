//! Oracle and identity checks: free closed forms, the two kernel routes, L² conservation.

use std::f64::consts::PI;
use std::time::Instant;

use rayon::prelude::*;

use super::dispersive::ScaledGrid;
use super::report::{Check, ScanReport};
use crate::angular::{SpectrumSummary, Structure};
use crate::error::{LabError, Result};
use crate::hankel::{HankelTransform, ModeCoefficient, RadialGrid};
use crate::propagator::{full_kernel, Flavor, KernelField, KernelOptions, PairGrid, PointPair, Regularization};

pub const HEAT_TOL: f64 = 1e-6;
pub const MODULUS_TOL: f64 = 1e-5;
pub const PATH_TOL: f64 = 1e-6;
pub const L2_TOL: f64 = 1e-6;

fn dist2(p: &PointPair) -> f64 {
    p.r1 * p.r1 + p.r2 * p.r2 - 2.0 * p.r1 * p.r2 * p.delta.cos()
}

pub fn free_heat(n: usize, t: f64, p: &PointPair) -> f64 {
    (4.0 * PI * t).powf(-(n as f64) / 2.0) * (-dist2(p) / (4.0 * t)).exp()
}

/// Compares the mode-sum kernels of a free spectrum with
/// `(4πt)^{−n/2}e^{−|x−y|²/(4t)}` and `|(4πit)^{−n/2}|`.
///
/// The heat error at a pair is divided by the Gaussian at `δ = 0` for the same
/// radii, the largest value the kernel takes on that radial pair. Pointwise
/// relative error is meaningless near the antipode, where the Gaussian is
/// `~e^{−2z}` and below the double-precision floor of the partial sums.
pub fn free_kernel_oracle(summary: &SpectrumSummary, times: &[f64], grid: &ScaledGrid, cutoff: usize) -> Result<ScanReport> {
    let start = Instant::now();
    match summary.structure {
        Structure::ConstantScalar { c: 0.0 } => {}
        _ => {
            return Err(LabError::Scenario(format!(
                "free-kernel oracle needs a = 0, A = 0 (scenario '{}')",
                summary.label
            )))
        }
    }
    let n = summary.n;
    let fields: Vec<(f64, Vec<PointPair>, KernelField, KernelField)> = times
        .par_iter()
        .map(|&t| {
            let g = grid.pairs(n, t);
            let heat = full_kernel(summary, t, &g, cutoff, Flavor::Heat, KernelOptions::default())?;
            let schr = full_kernel(summary, t, &g, cutoff, Flavor::Schrodinger, KernelOptions::default())?;
            Ok((t, g.pairs, heat, schr))
        })
        .collect::<Result<_>>()?;

    let mut heat_err: f64 = 0.0;
    let mut mod_err: f64 = 0.0;
    let mut used = 0;
    let mut rows = Vec::new();
    for (t, pairs, heat, schr) in &fields {
        used = heat.cutoff;
        let modulus = (4.0 * PI * t).powf(-(n as f64) / 2.0);
        for ((p, h), s) in pairs.iter().zip(&heat.samples).zip(&schr.samples) {
            let exact = free_heat(n, *t, p);
            let peak = modulus * (-(p.r1 - p.r2).powi(2) / (4.0 * t)).exp();
            let eh = (h.value() - exact).norm() / peak;
            let es = (s.value().norm() - modulus).abs() / modulus;
            heat_err = heat_err.max(eh);
            mod_err = mod_err.max(es);
            rows.push(vec![*t, p.r1, p.r2, p.delta, h.re, exact, s.re, s.im, eh, es]);
        }
    }
    let mut report = ScanReport::new("free_kernel_oracle", "free_kernel_oracle", &summary.label);
    report
        .range("t", times)
        .provenance("grid", grid)
        .provenance("cutoff", used);
    report.observed = heat_err;
    report.check(Check::at_most("heat_rel_error", heat_err, HEAT_TOL));
    report.check(Check::at_most("schrodinger_modulus_rel_error", mod_err, MODULUS_TOL));
    report.note("heat error is relative to the Gaussian at delta = 0 on the same radial pair");
    report.columns = ["t", "r1", "r2", "delta", "heat", "heat_exact", "schr_re", "schr_im", "heat_err", "modulus_err"]
        .map(String::from)
        .to_vec();
    report.samples = rows;
    report.runtime = start.elapsed();
    report.finish();
    Ok(report)
}

/// Weber complex-time route against the two-integral route
/// (`cos(s√P)`, `e^{−s√P}` per cluster) at arbitrary sample points.
pub fn path_equivalence(summary: &SpectrumSummary, points: &[(f64, PointPair)], cutoff: usize, flavor: Flavor) -> Result<ScanReport> {
    let start = Instant::now();
    let n = summary.n;
    let split = KernelOptions {
        mbessel_split: true,
        regularization: Regularization::Fixed { eps: 0.0 },
        ..Default::default()
    };
    let rows: Vec<Vec<f64>> = points
        .par_iter()
        .map(|(t, p)| {
            let g = PairGrid::from_pairs(n, vec![p.clone()]);
            let a = full_kernel(summary, *t, &g, cutoff, flavor, KernelOptions::default())?.samples[0].value();
            let b = full_kernel(summary, *t, &g, cutoff, flavor, split)?.samples[0].value();
            Ok(vec![*t, p.r1, p.r2, p.delta, a.re, a.im, b.re, b.im, (a - b).norm() / a.norm()])
        })
        .collect::<Result<_>>()?;
    let worst = rows.iter().map(|r| r[8]).fold(0.0, f64::max);
    let mut report = ScanReport::new("path_equivalence", "path_equivalence", &summary.label);
    report
        .range("t", &points.iter().map(|p| p.0).collect::<Vec<_>>())
        .provenance("cutoff", summary.modes_in_clusters(summary.clusters_within(cutoff)))
        .provenance("flavor", flavor)
        .provenance("points", points.len());
    report.observed = worst;
    report.check(Check::at_most("max_rel_difference", worst, PATH_TOL));
    report.columns = ["t", "r1", "r2", "delta", "weber_re", "weber_im", "split_re", "split_im", "rel_diff"]
        .map(String::from)
        .to_vec();
    report.samples = rows;
    report.runtime = start.elapsed();
    report.finish();
    Ok(report)
}

/// Radial profile used for the L² checks: a Gaussian bump at `r = 2`.
pub fn l2_bump(r: f64) -> f64 {
    (-2.0 * (r - 2.0) * (r - 2.0)).exp()
}

/// Per-mode Hankel unitarity `‖H_ν f‖ = ‖f‖` and conservation
/// `‖e^{itρ²}‖ = ‖f‖` after evolution.
pub fn hankel_l2_scan(grid: &RadialGrid, nus: &[f64], times: &[f64]) -> Result<ScanReport> {
    let start = Instant::now();
    let f = grid.sample(|r| l2_bump(r).into());
    let f_norm = grid.lp_norm(&f, 2.0);
    let rows: Vec<Vec<Vec<f64>>> = nus
        .par_iter()
        .map(|&nu| {
            let h = HankelTransform::symmetric(nu, grid.clone())?;
            let unitary = (grid.lp_norm(&h.forward(&f)?, 2.0) - f_norm).abs() / f_norm;
            let mode = ModeCoefficient::new(0, nu, f.clone())?;
            times
                .iter()
                .map(|&t| {
                    let prof = h.evolve(&mode, t)?;
                    let conserved = (prof.lp_norm(2.0) - f_norm).abs() / f_norm;
                    let route = if prof.route == crate::hankel::EvolutionRoute::Direct { 0.0 } else { 1.0 };
                    Ok(vec![nu, t, unitary, conserved, route])
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let rows: Vec<Vec<f64>> = rows.into_iter().flatten().collect();
    let unitary = rows.iter().map(|r| r[2]).fold(0.0, f64::max);
    let conserved = rows.iter().map(|r| r[3]).fold(0.0, f64::max);
    let mut report = ScanReport::new("hankel_l2", "hankel_l2_scan", "radial");
    report.range("nu", nus).range("t", times).provenance("grid_panels", grid.panels).provenance("r_max", grid.r_max);
    report.observed = unitary.max(conserved);
    report.check(Check::at_most("unitarity_rel_error", unitary, L2_TOL));
    report.check(Check::at_most("l2_conservation_rel_error", conserved, L2_TOL));
    report.columns = ["nu", "t", "unitarity_err", "conservation_err", "far_field_route"].map(String::from).to_vec();
    report.samples = rows;
    report.runtime = start.elapsed();
    report.finish();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angular::{builtin, closed_form_spectrum, PotentialPair};
    use crate::estimates::report::Verdict;

    #[test]
    fn free_oracle_small_grid() {
        let spec = closed_form_spectrum(&PotentialPair::free(3).unwrap(), 50).unwrap();
        let grid = ScaledGrid {
            radii: 4,
            angles: 3,
            ..Default::default()
        };
        let r = free_kernel_oracle(&spec, &[0.25], &grid, usize::MAX).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{:?}", r.checks);
    }

    #[test]
    fn rejects_non_free() {
        let spec = closed_form_spectrum(&builtin("constant_a:-3/16", 3).unwrap(), 4).unwrap();
        assert!(free_kernel_oracle(&spec, &[0.25], &ScaledGrid::default(), 16).is_err());
    }
}
