use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use super::harmonics::{real_harmonics, real_harmonics_with_gradient, sh_degree_order, SphereRule};
use super::PotentialPair;
use crate::error::{LabError, Result};

/// Galerkin basis: exact eigenfunctions of −Δ on S¹ or S².
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AngularBasis {
    /// `e^{ikθ}/√(2π)`, `|k| ≤ kmax`, ordered by `k`.
    Fourier { kmax: usize },
    /// Real orthonormal `Y_l^m`, `l ≤ lmax`, ordered by `(l, m)`.
    Harmonic { lmax: usize },
}

impl AngularBasis {
    pub fn dim(&self) -> usize {
        match *self {
            AngularBasis::Fourier { kmax } => 2 * kmax + 1,
            AngularBasis::Harmonic { lmax } => (lmax + 1) * (lmax + 1),
        }
    }

    pub fn n(&self) -> usize {
        match self {
            AngularBasis::Fourier { .. } => 2,
            AngularBasis::Harmonic { .. } => 3,
        }
    }

    /// Eigenvalue of −Δ for basis element `idx`.
    pub fn laplace_eigenvalue(&self, idx: usize) -> f64 {
        match *self {
            AngularBasis::Fourier { kmax } => {
                let k = idx as f64 - kmax as f64;
                k * k
            }
            AngularBasis::Harmonic { .. } => {
                let (l, _) = sh_degree_order(idx);
                (l * (l + 1)) as f64
            }
        }
    }

    /// All basis functions evaluated at a unit vector.
    pub fn evaluate(&self, point: &[f64]) -> Vec<Complex64> {
        match *self {
            AngularBasis::Fourier { kmax } => {
                let theta = point[1].atan2(point[0]);
                let norm = 1.0 / (2.0 * PI).sqrt();
                (0..=2 * kmax)
                    .map(|i| {
                        let k = i as f64 - kmax as f64;
                        Complex64::from_polar(norm, k * theta)
                    })
                    .collect()
            }
            AngularBasis::Harmonic { lmax } => real_harmonics(lmax, point)
                .into_iter()
                .map(|v| Complex64::new(v, 0.0))
                .collect(),
        }
    }

    /// Quadrature rule used for assembly and eigenfunction samples.
    pub fn quadrature(&self) -> SphereRule {
        match *self {
            AngularBasis::Fourier { kmax } => SphereRule::circle(4 * kmax + 128),
            AngularBasis::Harmonic { lmax } => SphereRule::product(2 * lmax + 6, 4 * lmax + 12),
        }
    }
}

/// Dense Hermitian matrix of `L_{A,a}` in an [`AngularBasis`].
#[derive(Debug, Clone)]
pub struct HermitianMatrix {
    pub basis: AngularBasis,
    pub data: DMatrix<Complex64>,
    /// `max |M − M^*|` before symmetrization.
    pub hermiticity_defect: f64,
}

fn basis_for(p: &PotentialPair, basis_size: usize) -> Result<AngularBasis> {
    if basis_size < 1 {
        return Err(LabError::Parameter("basis_size must be >= 1".into()));
    }
    match p.n {
        2 => Ok(AngularBasis::Fourier { kmax: basis_size }),
        3 => Ok(AngularBasis::Harmonic { lmax: basis_size }),
        n => Err(LabError::Parameter(format!(
            "Galerkin assembly is implemented on S^1 and S^2 only (n = {n}); \
             higher dimensions are available in closed form for constant a, A = 0"
        ))),
    }
}

fn defect(m: &DMatrix<Complex64>) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            d = d.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    d
}

fn symmetrize(m: DMatrix<Complex64>) -> DMatrix<Complex64> {
    let adj = m.adjoint();
    (m + adj) * Complex64::new(0.5, 0.0)
}

/// Quadratic-form assembly
/// `M_jk = ∫ conj((i∇ + A)e_j)·(i∇ + A)e_k + a ē_j e_k`,
/// which is Hermitian by construction and needs no derivative of `A`.
pub fn assemble_operator(p: &PotentialPair, basis_size: usize) -> Result<HermitianMatrix> {
    let basis = basis_for(p, basis_size)?;
    let rule = basis.quadrature();
    p.validate_on(&rule.points)?;
    let data = match basis {
        AngularBasis::Fourier { kmax } => assemble_circle(p, kmax, &rule),
        AngularBasis::Harmonic { lmax } => assemble_sphere(p, lmax, &rule, false, 0.0).0,
    };
    let hermiticity_defect = defect(&data);
    Ok(HermitianMatrix {
        basis,
        data: symmetrize(data),
        hermiticity_defect,
    })
}

/// Direct assembly of `∫ ē_j L e_k` with the operator written as
/// `−Δ + |A|² + a + i div A + 2i A·∇`. Uses the registered divergence if any,
/// else central differences with step `h`. Symmetrized afterwards.
pub fn assemble_operator_strong(
    p: &PotentialPair,
    basis_size: usize,
    h: f64,
) -> Result<HermitianMatrix> {
    let basis = basis_for(p, basis_size)?;
    let rule = basis.quadrature();
    p.validate_on(&rule.points)?;
    let data = match basis {
        AngularBasis::Fourier { kmax } => assemble_circle_strong(p, kmax, &rule, h),
        AngularBasis::Harmonic { lmax } => assemble_sphere(p, lmax, &rule, true, h).0,
    };
    let hermiticity_defect = defect(&data);
    Ok(HermitianMatrix {
        basis,
        data: symmetrize(data),
        hermiticity_defect,
    })
}

fn circle_alpha(p: &PotentialPair, x: &[f64]) -> f64 {
    let a = p.vector_at(x);
    -a[0] * x[1] + a[1] * x[0]
}

fn assemble_circle(p: &PotentialPair, kmax: usize, rule: &SphereRule) -> DMatrix<Complex64> {
    let dim = 2 * kmax + 1;
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    let ks: Vec<f64> = (0..dim).map(|i| i as f64 - kmax as f64).collect();
    for (x, &w) in rule.points.iter().zip(&rule.weights) {
        let theta = x[1].atan2(x[0]);
        let al = circle_alpha(p, x);
        let a = p.a(x);
        let scale = w / (2.0 * PI);
        for (j, &kj) in ks.iter().enumerate() {
            for (k, &kk) in ks.iter().enumerate() {
                let f = (al - kj) * (al - kk) + a;
                m[(j, k)] += Complex64::from_polar(scale * f, (kk - kj) * theta);
            }
        }
    }
    m
}

fn assemble_circle_strong(
    p: &PotentialPair,
    kmax: usize,
    rule: &SphereRule,
    h: f64,
) -> DMatrix<Complex64> {
    let dim = 2 * kmax + 1;
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    let ks: Vec<f64> = (0..dim).map(|i| i as f64 - kmax as f64).collect();
    for (x, &w) in rule.points.iter().zip(&rule.weights) {
        let theta = x[1].atan2(x[0]);
        let al = circle_alpha(p, x);
        let div = p.divergence_at(x, h);
        let a = p.a(x);
        let scale = w / (2.0 * PI);
        for (j, &kj) in ks.iter().enumerate() {
            for (k, &kk) in ks.iter().enumerate() {
                // L e_k = (k² + α² + a + iα' − 2αk) e_k
                let f = Complex64::new(kk * kk + al * al + a - 2.0 * al * kk, div);
                m[(j, k)] += f * Complex64::from_polar(scale, (kk - kj) * theta);
            }
        }
    }
    m
}

/// Returns the matrix and the per-node harmonic value table.
pub(crate) fn assemble_sphere(
    p: &PotentialPair,
    lmax: usize,
    rule: &SphereRule,
    strong: bool,
    h: f64,
) -> (DMatrix<Complex64>, DMatrix<f64>) {
    let dim = (lmax + 1) * (lmax + 1);
    let nodes = rule.len();
    let mut v = DMatrix::<f64>::zeros(nodes, dim);
    let mut g = DMatrix::<f64>::zeros(nodes, dim);
    let mut wf = DMatrix::<f64>::zeros(nodes, dim);
    let mut wv = DMatrix::<f64>::zeros(nodes, dim);
    let mut wdiv = DMatrix::<f64>::zeros(nodes, dim);
    for (q, (x, &w)) in rule.points.iter().zip(&rule.weights).enumerate() {
        let (vals, grads) = real_harmonics_with_gradient(lmax, x);
        let a_vec = p.vector_at(x);
        let f = a_vec.iter().map(|c| c * c).sum::<f64>() + p.a(x);
        let div = if strong { p.divergence_at(x, h) } else { 0.0 };
        for k in 0..dim {
            v[(q, k)] = vals[k];
            g[(q, k)] = (0..3).map(|i| a_vec[i] * grads[k][i]).sum();
            wf[(q, k)] = w * f * vals[k];
            wv[(q, k)] = w * vals[k];
            wdiv[(q, k)] = w * div * vals[k];
        }
    }
    let real = v.transpose() * &wf;
    let t = wv.transpose() * &g;
    let imag = if strong {
        v.transpose() * &wdiv + &t * 2.0
    } else {
        &t - t.transpose()
    };
    let mut m = DMatrix::<Complex64>::from_fn(dim, dim, |i, j| Complex64::new(real[(i, j)], imag[(i, j)]));
    for k in 0..dim {
        let (l, _) = sh_degree_order(k);
        m[(k, k)] += Complex64::new((l * (l + 1)) as f64, 0.0);
    }
    (m, v)
}
