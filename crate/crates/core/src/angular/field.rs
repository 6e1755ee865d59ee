use serde::Serialize;

use super::PotentialPair;
use crate::error::{LabError, Result};

/// `sup |A(x̂)·x̂|` over the given unit vectors.
pub fn check_gauge(p: &PotentialPair, nodes: &[Vec<f64>]) -> Result<f64> {
    if nodes.is_empty() {
        return Err(LabError::Parameter("check_gauge needs at least one node".into()));
    }
    p.validate_on(nodes)?;
    Ok(nodes
        .iter()
        .map(|x| {
            let a = p.vector_at(x);
            a.iter().zip(x).map(|(u, v)| u * v).sum::<f64>().abs()
        })
        .fold(0.0, f64::max))
}

/// Magnetic field matrix `B_ij = ∂_j A^i − ∂_i A^j` of the ambient potential and
/// its tangential part `(B_τ)_j = Σ_i x̂_i B_ij` at sample points.
#[derive(Debug, Clone, Serialize)]
pub struct FieldDiagnostics {
    pub points: Vec<Vec<f64>>,
    /// Row-major `n × n` matrices, one per point.
    pub b: Vec<Vec<f64>>,
    pub b_tau: Vec<Vec<f64>>,
    pub b_tau_sup: f64,
    /// `max |B_τ(x)·x|`; zero up to round-off since `B` is antisymmetric.
    pub b_tau_radial: f64,
    pub step: f64,
}

/// Diagnostics for `A(x) = A(x/|x|)/|x|` at every `r·x̂`, `r ∈ radii`, `x̂ ∈ nodes`.
pub fn field_diagnostics(
    p: &PotentialPair,
    radii: &[f64],
    nodes: &[Vec<f64>],
    h: f64,
) -> Result<FieldDiagnostics> {
    if radii.iter().any(|&r| !(r > 0.0)) {
        return Err(LabError::Domain(
            "field diagnostics need radii > 0 (the potential is singular at the origin)".into(),
        ));
    }
    p.validate_on(nodes)?;
    let points: Vec<Vec<f64>> = radii
        .iter()
        .flat_map(|&r| nodes.iter().map(move |x| x.iter().map(|c| c * r).collect()))
        .collect();
    let field = |x: &[f64]| {
        let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
        let u: Vec<f64> = x.iter().map(|c| c / r).collect();
        p.vector_at(&u).into_iter().map(|c| c / r).collect::<Vec<f64>>()
    };
    ambient_field_diagnostics(field, &points, h)
}

/// Same diagnostics for an arbitrary ambient vector field.
pub fn ambient_field_diagnostics<F: Fn(&[f64]) -> Vec<f64>>(
    field: F,
    points: &[Vec<f64>],
    h: f64,
) -> Result<FieldDiagnostics> {
    let mut b_all = Vec::with_capacity(points.len());
    let mut tau_all = Vec::with_capacity(points.len());
    let mut sup: f64 = 0.0;
    let mut radial: f64 = 0.0;
    for x in points {
        let n = x.len();
        let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !(r > 0.0) {
            return Err(LabError::Domain("sample point at the origin".into()));
        }
        // d[i][j] = ∂_j A^i
        let mut d = vec![vec![0.0; n]; n];
        let mut q = x.clone();
        for j in 0..n {
            q[j] = x[j] + h;
            let plus = field(&q);
            q[j] = x[j] - h;
            let minus = field(&q);
            q[j] = x[j];
            for i in 0..n {
                d[i][j] = (plus[i] - minus[i]) / (2.0 * h);
            }
        }
        let mut b = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = d[i][j] - d[j][i];
                b[i * n + j] = v;
                b[j * n + i] = -v;
            }
        }
        let tau: Vec<f64> = (0..n)
            .map(|j| (0..n).map(|i| x[i] / r * b[i * n + j]).sum())
            .collect();
        sup = sup.max(tau.iter().map(|c| c * c).sum::<f64>().sqrt());
        radial = radial.max(tau.iter().zip(x).map(|(t, c)| t * c).sum::<f64>().abs());
        b_all.push(b);
        tau_all.push(tau);
    }
    Ok(FieldDiagnostics {
        points: points.to_vec(),
        b: b_all,
        b_tau: tau_all,
        b_tau_sup: sup,
        b_tau_radial: radial,
        step: h,
    })
}
