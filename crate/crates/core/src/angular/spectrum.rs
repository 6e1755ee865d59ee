use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;

use super::assemble::{assemble_operator, AngularBasis, HermitianMatrix};
use super::harmonics::{real_harmonics, shell_multiplicity, sphere_area, zonal_projectors, SphereRule};
use super::{PotentialPair, Structure};
use crate::error::{LabError, Result};
use crate::serde_util::serialize_extended;

/// Relative width inside which eigenvalues are treated as one cluster.
const CLUSTER_TOL: f64 = 1e-9;

/// How an eigenfunction is represented.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Eigenfunction {
    /// `e^{ikθ}/√(2π)` on S¹.
    Fourier { k: i64 },
    /// Real orthonormal harmonic `Y_l^m` on S².
    Harmonic { l: usize, m: i64 },
    /// Member of the degree-`l` shell on S^{n-1}, `n ≥ 4`; only the shell
    /// projector is available.
    Shell { l: usize },
    /// Column `k` of the Galerkin coefficient matrix.
    Expansion,
}

/// One eigentriple of `L_{A,a}`.
#[derive(Debug, Clone, Serialize)]
pub struct AngularMode {
    pub k: usize,
    pub mu: f64,
    pub nu: f64,
    /// Samples on the assembly quadrature nodes (Galerkin modes only).
    #[serde(skip)]
    pub psi: Vec<Complex64>,
    pub psi_sup: f64,
    pub eigenfunction: Eigenfunction,
}

/// A maximal run of modes sharing one `ν` (an eigenspace up to round-off).
#[derive(Debug, Clone, Serialize)]
pub struct Cluster {
    pub nu: f64,
    pub mu: f64,
    pub start: usize,
    pub len: usize,
    /// Shell degree for rotation-invariant spectra.
    pub shell: Option<usize>,
}

/// Sorted spectrum of `L_{A,a}` and the constants derived from its bottom.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumSummary {
    pub n: usize,
    pub label: String,
    pub nu0: f64,
    pub alpha: f64,
    /// `n/|α|` for `α < 0`, infinite otherwise.
    #[serde(serialize_with = "serialize_extended")]
    pub p_alpha: f64,
    /// Least-squares slope of `log ν_k²` against `log(1+k)` over the middle
    /// third of the modes.
    pub weyl_fit: Option<f64>,
    /// Smallest `C` with `psi_sup² ≤ C (1+ν²)^{(n-2)/2}` over all modes.
    pub sup_constant: f64,
    pub closed_form: bool,
    pub basis: Option<AngularBasis>,
    pub structure: Structure,
    pub clusters: Vec<Cluster>,
    pub modes: Vec<AngularMode>,
    #[serde(skip)]
    coefficients: Option<DMatrix<Complex64>>,
    #[serde(skip)]
    nodes: Option<SphereRule>,
}

fn derived_constants(n: usize, nu0: f64) -> (f64, f64) {
    let alpha = -(n as f64 - 2.0) / 2.0 + nu0;
    let p_alpha = if alpha >= 0.0 {
        f64::INFINITY
    } else {
        n as f64 / alpha.abs()
    };
    (alpha, p_alpha)
}

fn shift(n: usize) -> f64 {
    (n as f64 - 2.0).powi(2) / 4.0
}

fn positivity(n: usize, mu0: f64) -> Result<f64> {
    let shifted = mu0 + shift(n);
    if !(shifted > 0.0) {
        return Err(LabError::NotPositive { mu0, shifted });
    }
    Ok(shifted.sqrt())
}

fn weyl_slope(modes: &[AngularMode]) -> Option<f64> {
    let count = modes.len();
    if count < 9 {
        return None;
    }
    let (lo, hi) = (count / 3, 2 * count / 3);
    let pts: Vec<(f64, f64)> = modes[lo..hi]
        .iter()
        .map(|m| ((1.0 + m.k as f64).ln(), (m.nu * m.nu).ln()))
        .collect();
    crate::estimates::fit::linear_fit(&pts).map(|f| f.slope)
}

fn sup_constant(n: usize, modes: &[AngularMode]) -> f64 {
    modes
        .iter()
        .map(|m| m.psi_sup * m.psi_sup / (1.0 + m.nu * m.nu).powf((n as f64 - 2.0) / 2.0))
        .fold(0.0, f64::max)
}

fn build_clusters(modes: &[AngularMode], shells: Option<&[usize]>) -> Vec<Cluster> {
    let mut clusters: Vec<Cluster> = Vec::new();
    for (i, m) in modes.iter().enumerate() {
        let shell = shells.map(|s| s[i]);
        if let Some(last) = clusters.last_mut() {
            let same = match (shell, last.shell) {
                (Some(a), Some(b)) => a == b,
                _ => (m.nu - last.nu).abs() <= CLUSTER_TOL * (1.0 + m.nu),
            };
            if same {
                last.len += 1;
                continue;
            }
        }
        clusters.push(Cluster {
            nu: m.nu,
            mu: m.mu,
            start: i,
            len: 1,
            shell,
        });
    }
    clusters
}

/// Diagonalizes an assembled matrix and keeps the lowest `count` modes.
pub fn solve_spectrum(
    matrix: &HermitianMatrix,
    p: &PotentialPair,
    count: usize,
) -> Result<SpectrumSummary> {
    let dim = matrix.data.nrows();
    if count == 0 || count > dim / 2 {
        return Err(LabError::Parameter(format!(
            "mode count {count} must be in 1..={} (half the basis dimension {dim})",
            dim / 2
        )));
    }
    let n = matrix.basis.n();
    let eig = SymmetricEigen::new(matrix.data.clone());
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mu0 = eig.eigenvalues[order[0]];
    positivity(n, mu0)?;

    let rule = matrix.basis.quadrature();
    let table: Vec<Vec<Complex64>> = rule.points.iter().map(|x| matrix.basis.evaluate(x)).collect();
    let mut coefficients = DMatrix::<Complex64>::zeros(dim, count);
    let mut modes = Vec::with_capacity(count);
    for (k, &col) in order.iter().take(count).enumerate() {
        let mu = eig.eigenvalues[col];
        let v = eig.eigenvectors.column(col);
        coefficients.set_column(k, &v);
        let psi: Vec<Complex64> = table
            .iter()
            .map(|row| row.iter().zip(v.iter()).map(|(b, c)| b * c).sum())
            .collect();
        let psi_sup = psi.iter().map(|z| z.norm()).fold(0.0, f64::max);
        modes.push(AngularMode {
            k,
            mu,
            nu: (mu + shift(n)).max(0.0).sqrt(),
            psi,
            psi_sup,
            eigenfunction: Eigenfunction::Expansion,
        });
    }
    let nu0 = modes[0].nu;
    let (alpha, p_alpha) = derived_constants(n, nu0);
    let clusters = build_clusters(&modes, None);
    Ok(SpectrumSummary {
        n,
        label: p.label.clone(),
        nu0,
        alpha,
        p_alpha,
        weyl_fit: weyl_slope(&modes),
        sup_constant: sup_constant(n, &modes),
        closed_form: false,
        basis: Some(matrix.basis),
        structure: p.structure,
        clusters,
        modes,
        coefficients: Some(coefficients),
        nodes: Some(rule),
    })
}

/// Exact spectrum of rotation-invariant (`A ≡ 0`, `a ≡ c`, any `n ≥ 2`) and
/// constant-flux circle potentials, through degree `max_degree`.
pub fn closed_form_spectrum(p: &PotentialPair, max_degree: usize) -> Result<SpectrumSummary> {
    let n = p.n;
    let mut modes = Vec::new();
    let mut shells = Vec::new();
    let (c, phi) = match p.structure {
        Structure::ConstantScalar { c } => (c, 0.0),
        Structure::ConstantFlux { phi, c } => (c, phi),
        Structure::General => {
            return Err(LabError::Parameter(format!(
                "potential '{}' has no closed-form spectrum",
                p.label
            )))
        }
    };
    if n == 2 {
        let kmax = max_degree as i64;
        let mut ks: Vec<i64> = (-kmax..=kmax).collect();
        ks.sort_by(|a, b| {
            let fa = (*a as f64 - phi).powi(2);
            let fb = (*b as f64 - phi).powi(2);
            fa.total_cmp(&fb).then(a.cmp(b))
        });
        // Keep only modes whose partner under reflection about Φ is present.
        let cutoff = (kmax as f64 - phi.abs()).max(0.0);
        for k in ks {
            let d = (k as f64 - phi).abs();
            if d > cutoff + 1e-12 && max_degree > 0 {
                continue;
            }
            let mu = d * d + c;
            modes.push(AngularMode {
                k: modes.len(),
                mu,
                nu: mu.max(0.0).sqrt(),
                psi: Vec::new(),
                psi_sup: 1.0 / (2.0 * std::f64::consts::PI).sqrt(),
                eigenfunction: Eigenfunction::Fourier { k },
            });
        }
        positivity(2, modes[0].mu)?;
    } else {
        positivity(n, c)?;
        let area = sphere_area(n);
        for l in 0..=max_degree {
            let mu = (l * (l + n - 2)) as f64 + c;
            let mult = shell_multiplicity(n, l);
            let sup = (mult as f64 / area).sqrt();
            for j in 0..mult {
                let eigenfunction = if n == 3 {
                    Eigenfunction::Harmonic {
                        l,
                        m: j as i64 - l as i64,
                    }
                } else {
                    Eigenfunction::Shell { l }
                };
                modes.push(AngularMode {
                    k: modes.len(),
                    mu,
                    nu: (mu + shift(n)).sqrt(),
                    psi: Vec::new(),
                    psi_sup: sup,
                    eigenfunction,
                });
                shells.push(l);
            }
        }
    }
    let nu0 = modes[0].nu;
    let (alpha, p_alpha) = derived_constants(n, nu0);
    let clusters = build_clusters(&modes, if n >= 3 { Some(&shells) } else { None });
    Ok(SpectrumSummary {
        n,
        label: p.label.clone(),
        nu0,
        alpha,
        p_alpha,
        weyl_fit: weyl_slope(&modes),
        sup_constant: sup_constant(n, &modes),
        closed_form: true,
        basis: None,
        structure: p.structure,
        clusters,
        modes,
        coefficients: None,
        nodes: None,
    })
}

/// Closed form when available, otherwise Galerkin with `basis_size` and the
/// lowest `count` modes.
pub fn compute_spectrum(p: &PotentialPair, basis_size: usize, count: usize) -> Result<SpectrumSummary> {
    if p.structure != Structure::General {
        let degree = if p.n == 2 {
            basis_size
        } else {
            // Smallest degree whose complete shells hold `count` modes.
            let mut total = 0;
            let mut l = 0;
            loop {
                total += shell_multiplicity(p.n, l);
                if total >= count {
                    break l;
                }
                l += 1;
            }
        };
        return closed_form_spectrum(p, degree);
    }
    let matrix = assemble_operator(p, basis_size)?;
    solve_spectrum(&matrix, p, count)
}

impl SpectrumSummary {
    /// Indices of modes with `ν_k < (n−2)/2`.
    pub fn low_modes(&self) -> Vec<usize> {
        let bound = (self.n as f64 - 2.0) / 2.0;
        self.modes.iter().filter(|m| m.nu < bound).map(|m| m.k).collect()
    }

    /// Number of leading clusters that fit inside a mode budget `k`.
    pub fn clusters_within(&self, k: usize) -> usize {
        self.clusters
            .iter()
            .take_while(|c| c.start + c.len <= k)
            .count()
    }

    /// Total modes in the first `clusters` clusters.
    pub fn modes_in_clusters(&self, clusters: usize) -> usize {
        self.clusters[..clusters].iter().map(|c| c.len).sum()
    }

    /// Whether kernels depend on the two angular points only through `x̂·ŷ`.
    pub fn is_zonal(&self) -> bool {
        matches!(self.structure, Structure::ConstantScalar { .. })
    }

    /// Eigenfunction samples on the assembly nodes, with the node rule.
    pub fn node_samples(&self) -> Option<&SphereRule> {
        self.nodes.as_ref()
    }

    /// Values `ψ_k(x)` of the first `count` modes at a unit vector.
    pub fn mode_values(&self, x: &[f64], count: usize) -> Result<Vec<Complex64>> {
        let count = count.min(self.modes.len());
        if let (Some(basis), Some(coef)) = (&self.basis, &self.coefficients) {
            let b = basis.evaluate(x);
            return Ok((0..count)
                .map(|k| coef.column(k).iter().zip(&b).map(|(c, e)| c * e).sum())
                .collect());
        }
        match self.n {
            2 => {
                let theta = x[1].atan2(x[0]);
                let norm = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
                Ok(self.modes[..count]
                    .iter()
                    .map(|m| match m.eigenfunction {
                        Eigenfunction::Fourier { k } => Complex64::from_polar(norm, k as f64 * theta),
                        _ => unreachable!("circle modes are Fourier modes"),
                    })
                    .collect())
            }
            3 => {
                let lmax = self.modes[..count]
                    .iter()
                    .map(|m| match m.eigenfunction {
                        Eigenfunction::Harmonic { l, .. } => l,
                        _ => 0,
                    })
                    .max()
                    .unwrap_or(0);
                let y = real_harmonics(lmax, x);
                Ok(self.modes[..count]
                    .iter()
                    .map(|m| match m.eigenfunction {
                        Eigenfunction::Harmonic { l, m } => {
                            Complex64::new(y[super::harmonics::sh_index(l, m)], 0.0)
                        }
                        _ => unreachable!("sphere modes are harmonics"),
                    })
                    .collect())
            }
            n => Err(LabError::Parameter(format!(
                "individual eigenfunctions are not available on S^{}; use cluster projectors",
                n - 1
            ))),
        }
    }

    /// Cluster projector kernels `Σ_{k∈c} ψ_k(x) ψ̄_k(y)` for the first
    /// `clusters` clusters.
    pub fn cluster_projectors(&self, x: &[f64], y: &[f64], clusters: usize) -> Result<Vec<Complex64>> {
        let clusters = clusters.min(self.clusters.len());
        if self.is_zonal() && self.n >= 3 {
            let t: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
            let lmax = self.clusters[..clusters]
                .iter()
                .map(|c| c.shell.unwrap_or(0))
                .max()
                .unwrap_or(0);
            let z = zonal_projectors(self.n, t, lmax);
            return Ok(self.clusters[..clusters]
                .iter()
                .map(|c| Complex64::new(z[c.shell.unwrap_or(0)], 0.0))
                .collect());
        }
        let count = self.modes_in_clusters(clusters);
        let px = self.mode_values(x, count)?;
        let py = self.mode_values(y, count)?;
        Ok(self.clusters[..clusters]
            .iter()
            .map(|c| {
                (c.start..c.start + c.len)
                    .map(|k| px[k] * py[k].conj())
                    .sum()
            })
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angular::builtin;

    #[test]
    fn free_sphere_spectrum() {
        let p = PotentialPair::free(3).unwrap();
        let m = assemble_operator(&p, 14).unwrap();
        let s = solve_spectrum(&m, &p, 64).unwrap();
        let mut idx = 0;
        for l in 0..8usize {
            for _ in 0..(2 * l + 1) {
                assert!((s.modes[idx].mu - (l * (l + 1)) as f64).abs() < 1e-8);
                idx += 1;
            }
        }
        assert!((s.nu0 - 0.5).abs() < 1e-12);
        assert_eq!(s.alpha, 0.0);
        assert!(s.p_alpha.is_infinite());
        assert_eq!(s.clusters.len(), 8);
        for mode in &s.modes {
            let norm: f64 = mode
                .psi
                .iter()
                .zip(&s.node_samples().unwrap().weights)
                .map(|(z, w)| z.norm_sqr() * w)
                .sum();
            assert!((norm - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn inverse_square_shift() {
        let p = builtin("constant_a:-3/16", 3).unwrap();
        let s = closed_form_spectrum(&p, 5).unwrap();
        assert!((s.modes[0].mu + 0.1875).abs() < 1e-15);
        assert!((s.nu0 - 0.25).abs() < 1e-15);
        assert!((s.alpha + 0.25).abs() < 1e-15);
        assert!((s.p_alpha - 12.0).abs() < 1e-12);
        assert_eq!(s.low_modes(), vec![0]);
    }

    #[test]
    fn positivity_boundary_rejected() {
        let p = builtin("constant_a:-1/4", 3).unwrap();
        assert!(matches!(
            closed_form_spectrum(&p, 3),
            Err(LabError::NotPositive { .. })
        ));
        let m = assemble_operator(&p, 4).unwrap();
        assert!(matches!(
            solve_spectrum(&m, &p, 8),
            Err(LabError::NotPositive { .. })
        ));
    }

    #[test]
    fn galerkin_and_closed_form_projectors_agree() {
        let p = builtin("constant_a:0.3", 3).unwrap();
        let exact = closed_form_spectrum(&p, 4).unwrap();
        let mut general = p.clone();
        general.structure = Structure::General;
        let m = assemble_operator(&general, 10).unwrap();
        let gal = solve_spectrum(&m, &general, 25).unwrap();
        let x = [0.6, 0.0, 0.8];
        let y = [0.0, -0.28, 0.96];
        let a = exact.cluster_projectors(&x, &y, 5).unwrap();
        let b = gal.cluster_projectors(&x, &y, 5).unwrap();
        for (u, v) in a.iter().zip(&b) {
            assert!((u - v).norm() < 1e-10);
        }
        // Individual harmonics reproduce the zonal sum too.
        let xs = exact.mode_values(&x, 25).unwrap();
        let ys = exact.mode_values(&y, 25).unwrap();
        let direct: Complex64 = (9..16).map(|k| xs[k] * ys[k].conj()).sum();
        assert!((direct - a[3]).norm() < 1e-12);
    }

    #[test]
    fn paper_example_spectrum_is_converged() {
        let p = PotentialPair::paper_3d_example();
        let coarse = compute_spectrum(&p, 12, 40).unwrap();
        let fine = compute_spectrum(&p, 24, 40).unwrap();
        for (a, b) in coarse.modes.iter().zip(&fine.modes) {
            assert!((a.mu - b.mu).abs() < 1e-8, "{} vs {}", a.mu, b.mu);
        }
        // L = −Δ − 2m + sin²θ: the lowest eigenvalue lies between the
        // m = 1 shell bound (2 − 2 + 0) and the free-bound + sup |A|².
        assert!(coarse.modes[0].mu > -1.0 && coarse.modes[0].mu < 1.0);
    }

    #[test]
    fn circle_gauge_shift_permutes_spectrum() {
        let a = closed_form_spectrum(&PotentialPair::ab_flux(0.3).unwrap(), 30).unwrap();
        let b = closed_form_spectrum(&PotentialPair::ab_flux(1.3).unwrap(), 30).unwrap();
        for (x, y) in a.modes.iter().zip(&b.modes).take(20) {
            assert!((x.mu - y.mu).abs() < 1e-10);
        }
    }
}
