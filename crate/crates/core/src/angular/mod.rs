//! Angular operator `L_{A,a} = −Δ_S + |A|² + a + i div_S A + 2i A·∇_S` on
//! S^{n-1}: potentials, Galerkin assembly, spectra and field diagnostics.

mod assemble;
mod field;
pub mod harmonics;
mod spectrum;

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

pub use assemble::{assemble_operator, assemble_operator_strong, AngularBasis, HermitianMatrix};
pub use field::{check_gauge, field_diagnostics, FieldDiagnostics};
pub use spectrum::{
    closed_form_spectrum, compute_spectrum, solve_spectrum, AngularMode, Cluster, Eigenfunction,
    SpectrumSummary,
};

pub type ScalarField = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type VectorField = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// What is known in closed form about a potential pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Structure {
    /// `A ≡ 0`, `a ≡ c`: rotation invariant, spectrum known in every dimension.
    ConstantScalar { c: f64 },
    /// `n = 2`, `A = Φ·τ̂` with constant flux `Φ`, `a ≡ c`.
    ConstantFlux { phi: f64, c: f64 },
    General,
}

/// Angular potentials `a(x̂)` and `A(x̂)` on S^{n-1} together with the dimension.
///
/// Points are unit vectors of length `n`; `A` returns an ambient vector of the
/// same length that should be tangent to the sphere.
#[derive(Clone)]
pub struct PotentialPair {
    pub n: usize,
    pub label: String,
    pub scalar: ScalarField,
    pub vector: VectorField,
    /// Analytic `div_S A`, when registered. Otherwise finite differences are used.
    pub divergence: Option<ScalarField>,
    pub structure: Structure,
    /// Whether the fields are known to be C^∞.
    pub smooth: bool,
}

impl fmt::Debug for PotentialPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PotentialPair")
            .field("n", &self.n)
            .field("label", &self.label)
            .field("structure", &self.structure)
            .field("smooth", &self.smooth)
            .finish()
    }
}

fn zero_vector(n: usize) -> VectorField {
    Arc::new(move |_: &[f64]| vec![0.0; n])
}

fn check_dimension(n: usize) -> Result<()> {
    if n < 2 {
        return Err(LabError::Parameter(format!("dimension must be >= 2, got {n}")));
    }
    Ok(())
}

impl PotentialPair {
    pub fn free(n: usize) -> Result<Self> {
        Self::constant_a(n, 0.0).map(|mut p| {
            p.label = "free".into();
            p
        })
    }

    pub fn constant_a(n: usize, c: f64) -> Result<Self> {
        check_dimension(n)?;
        if !c.is_finite() {
            return Err(LabError::Potential(format!("non-finite constant a = {c}")));
        }
        Ok(Self {
            n,
            label: format!("constant_a:{c}"),
            scalar: Arc::new(move |_: &[f64]| c),
            vector: zero_vector(n),
            divergence: Some(Arc::new(|_: &[f64]| 0.0)),
            structure: Structure::ConstantScalar { c },
            smooth: true,
        })
    }

    /// Aharonov–Bohm potential on S¹: `A(θ) = Φ (−sin θ, cos θ)`.
    pub fn ab_flux(phi: f64) -> Result<Self> {
        if !phi.is_finite() {
            return Err(LabError::Potential(format!("non-finite flux {phi}")));
        }
        Ok(Self {
            n: 2,
            label: format!("ab_flux:{phi}"),
            scalar: Arc::new(|_: &[f64]| 0.0),
            vector: Arc::new(move |x: &[f64]| vec![-phi * x[1], phi * x[0]]),
            divergence: Some(Arc::new(|_: &[f64]| 0.0)),
            structure: Structure::ConstantFlux { phi, c: 0.0 },
            smooth: true,
        })
    }

    /// The three-dimensional field `A(x̂) = (−x̂₂, x̂₁, 0)`, `a ≡ 0`, whose
    /// ambient extension `A(x)/|x|` has vanishing trapping component.
    pub fn paper_3d_example() -> Self {
        Self {
            n: 3,
            label: "paper_3d_example".into(),
            scalar: Arc::new(|_: &[f64]| 0.0),
            vector: Arc::new(|x: &[f64]| vec![-x[1], x[0], 0.0]),
            divergence: Some(Arc::new(|_: &[f64]| 0.0)),
            structure: Structure::General,
            smooth: true,
        }
    }

    /// Arbitrary user fields; the divergence will be taken by finite differences.
    pub fn custom(n: usize, label: &str, scalar: ScalarField, vector: VectorField) -> Result<Self> {
        check_dimension(n)?;
        Ok(Self {
            n,
            label: label.into(),
            scalar,
            vector,
            divergence: None,
            structure: Structure::General,
            smooth: false,
        })
    }

    /// Potentials given by coefficients in the harmonic basis, see [`HarmonicPotential`].
    pub fn from_harmonic(n: usize, spec: &HarmonicPotential) -> Result<Self> {
        spec.build(n)
    }

    pub fn is_validation_circle(&self) -> bool {
        self.n == 2
    }

    pub fn a(&self, x: &[f64]) -> f64 {
        (self.scalar)(x)
    }

    pub fn vector_at(&self, x: &[f64]) -> Vec<f64> {
        (self.vector)(x)
    }

    /// `div_S A` at `x`, analytic if registered, else central differences with
    /// step `h` on the 0-homogeneous extension `A(x/|x|)`.
    pub fn divergence_at(&self, x: &[f64], h: f64) -> f64 {
        if let Some(d) = &self.divergence {
            return d(x);
        }
        fd_divergence(&self.vector, x, h)
    }

    /// Evaluates both fields at every point, failing on non-finite output.
    pub fn validate_on(&self, points: &[Vec<f64>]) -> Result<()> {
        for p in points {
            if p.len() != self.n {
                return Err(LabError::Potential(format!(
                    "sample point of length {} for dimension {}",
                    p.len(),
                    self.n
                )));
            }
            let a = self.a(p);
            let v = self.vector_at(p);
            if !a.is_finite() || v.len() != self.n || v.iter().any(|c| !c.is_finite()) {
                return Err(LabError::Potential(format!(
                    "{}: non-finite or malformed value at {:?}",
                    self.label, p
                )));
            }
        }
        Ok(())
    }

    /// Constant shift `c` if `A ≡ 0` and `a ≡ c`.
    pub fn constant_shift(&self) -> Option<f64> {
        match self.structure {
            Structure::ConstantScalar { c } => Some(c),
            _ => None,
        }
    }
}

fn project_to_sphere(x: &[f64]) -> Vec<f64> {
    let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    x.iter().map(|v| v / r).collect()
}

fn fd_divergence(field: &VectorField, x: &[f64], h: f64) -> f64 {
    let n = x.len();
    let mut div = 0.0;
    let mut q = x.to_vec();
    for i in 0..n {
        q[i] = x[i] + h;
        let plus = field(&project_to_sphere(&q))[i];
        q[i] = x[i] - h;
        let minus = field(&project_to_sphere(&q))[i];
        q[i] = x[i];
        div += (plus - minus) / (2.0 * h);
    }
    div
}

/// Coefficient description of smooth potentials.
///
/// Each entry is `[l, m, c]`. On S² (`n = 3`) the scalar potential is
/// `a = Σ c·Y_l^m` over real orthonormal harmonics and the magnetic potential is
/// the toroidal field `A = Σ c·x̂ × ∇Y_l^m`, tangent and divergence free by
/// construction. On S¹ (`n = 2`) `l` is the frequency `k ≥ 0` and `m = +1`
/// selects `cos kθ`, `m = −1` selects `sin kθ`; the magnetic potential is
/// `A = α(θ)·(−sin θ, cos θ)` with `α` given by the same kind of sum.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HarmonicPotential {
    #[serde(default)]
    pub a: Vec<(i64, i64, f64)>,
    #[serde(default)]
    pub magnetic: Vec<(i64, i64, f64)>,
}

impl HarmonicPotential {
    fn check_terms(&self, n: usize) -> Result<()> {
        for &(l, m, c) in self.a.iter().chain(&self.magnetic) {
            let ok = match n {
                2 => l >= 0 && (m == 1 || m == -1),
                3 => l >= 0 && m.abs() <= l,
                _ => false,
            };
            if !ok || !c.is_finite() {
                return Err(LabError::Potential(format!(
                    "invalid harmonic term [{l}, {m}, {c}] for dimension {n}"
                )));
            }
        }
        Ok(())
    }

    fn build(&self, n: usize) -> Result<PotentialPair> {
        if n != 2 && n != 3 {
            return Err(LabError::Potential(format!(
                "harmonic coefficient potentials are supported for n = 2, 3 only (got {n})"
            )));
        }
        self.check_terms(n)?;
        let scalar_terms = self.a.clone();
        let magnetic_terms = self.magnetic.clone();
        let only_constant_a = self.magnetic.iter().all(|t| t.2 == 0.0)
            && self.a.iter().all(|&(l, _, c)| l == 0 || c == 0.0);
        let constant_value = |terms: &[(i64, i64, f64)], n: usize| -> f64 {
            terms
                .iter()
                .filter(|t| t.0 == 0)
                .map(|&(_, m, c)| {
                    if n == 3 {
                        c / (4.0 * PI).sqrt()
                    } else if m == 1 {
                        c
                    } else {
                        0.0
                    }
                })
                .sum()
        };
        let structure = if only_constant_a {
            Structure::ConstantScalar {
                c: constant_value(&self.a, n),
            }
        } else if n == 2
            && self.a.iter().all(|&(l, _, c)| l == 0 || c == 0.0)
            && self.magnetic.iter().all(|&(l, _, c)| l == 0 || c == 0.0)
        {
            Structure::ConstantFlux {
                phi: constant_value(&self.magnetic, 2),
                c: constant_value(&self.a, 2),
            }
        } else {
            Structure::General
        };
        let label = "harmonic".to_string();
        if n == 2 {
            let st = scalar_terms.clone();
            let mt = magnetic_terms.clone();
            let mt2 = magnetic_terms.clone();
            return Ok(PotentialPair {
                n,
                label,
                scalar: Arc::new(move |x: &[f64]| fourier_sum(&st, x[1].atan2(x[0]), false)),
                vector: Arc::new(move |x: &[f64]| {
                    let al = fourier_sum(&mt, x[1].atan2(x[0]), false);
                    vec![-al * x[1], al * x[0]]
                }),
                divergence: Some(Arc::new(move |x: &[f64]| {
                    fourier_sum(&mt2, x[1].atan2(x[0]), true)
                })),
                structure,
                smooth: true,
            });
        }
        let lmax_a = scalar_terms.iter().map(|t| t.0).max().unwrap_or(0) as usize;
        let lmax_m = magnetic_terms.iter().map(|t| t.0).max().unwrap_or(0) as usize;
        Ok(PotentialPair {
            n,
            label,
            scalar: Arc::new(move |x: &[f64]| {
                let y = harmonics::real_harmonics(lmax_a, x);
                scalar_terms
                    .iter()
                    .map(|&(l, m, c)| c * y[harmonics::sh_index(l as usize, m)])
                    .sum()
            }),
            vector: Arc::new(move |x: &[f64]| {
                if magnetic_terms.is_empty() {
                    return vec![0.0; 3];
                }
                let p = off_pole(x);
                let (_, g) = harmonics::real_harmonics_with_gradient(lmax_m, &p);
                let mut grad = [0.0; 3];
                for &(l, m, c) in &magnetic_terms {
                    let gi = g[harmonics::sh_index(l as usize, m)];
                    for k in 0..3 {
                        grad[k] += c * gi[k];
                    }
                }
                cross(&p, &grad).to_vec()
            }),
            divergence: Some(Arc::new(|_: &[f64]| 0.0)),
            structure,
            smooth: true,
        })
    }
}

fn fourier_sum(terms: &[(i64, i64, f64)], theta: f64, derivative: bool) -> f64 {
    terms
        .iter()
        .map(|&(k, m, c)| {
            let kt = k as f64 * theta;
            match (m == 1, derivative) {
                (true, false) => c * kt.cos(),
                (false, false) => c * kt.sin(),
                (true, true) => -c * k as f64 * kt.sin(),
                (false, true) => c * k as f64 * kt.cos(),
            }
        })
        .sum()
}

/// Nudges a point off the poles so that azimuthal derivatives are finite.
fn off_pole(x: &[f64]) -> Vec<f64> {
    let s = (x[0] * x[0] + x[1] * x[1]).sqrt();
    if s > 1e-10 {
        return x.to_vec();
    }
    let theta: f64 = if x[2] > 0.0 { 1e-10 } else { PI - 1e-10 };
    harmonics::unit_vector(theta, 0.0).to_vec()
}

pub(crate) fn cross(a: &[f64], b: &[f64]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Names accepted by [`builtin`], with a one-line description each.
pub fn list_builtins() -> Vec<(&'static str, &'static str)> {
    vec![
        ("free", "a = 0, A = 0 (any n >= 2)"),
        ("constant_a:c", "a = c constant, A = 0 (any n >= 2); c may be a fraction like -3/16"),
        ("ab_flux:phi", "Aharonov-Bohm flux phi on the circle (n = 2 validation mode only)"),
        ("paper_3d_example", "A = (-x2, x1, 0) on S^2, a = 0 (n = 3); B_tau = 0"),
    ]
}

fn parse_number(s: &str) -> Result<f64> {
    let s = s.trim();
    let parsed = if let Some((num, den)) = s.split_once('/') {
        match (num.trim().parse::<f64>(), den.trim().parse::<f64>()) {
            (Ok(a), Ok(b)) if b != 0.0 => Some(a / b),
            _ => None,
        }
    } else {
        s.parse::<f64>().ok()
    };
    parsed
        .filter(|v| v.is_finite())
        .ok_or_else(|| LabError::Potential(format!("cannot parse number '{s}'")))
}

/// Resolves a named built-in potential for dimension `n`.
pub fn builtin(name: &str, n: usize) -> Result<PotentialPair> {
    let (head, arg) = match name.split_once(':') {
        Some((h, a)) => (h.trim(), Some(a)),
        None => (name.trim(), None),
    };
    let need_arg = || {
        arg.ok_or_else(|| LabError::Potential(format!("built-in '{head}' needs a parameter")))
    };
    match head {
        "free" => PotentialPair::free(n),
        "constant_a" => {
            let c = parse_number(need_arg()?)?;
            let mut p = PotentialPair::constant_a(n, c)?;
            p.label = name.to_string();
            Ok(p)
        }
        "ab_flux" => {
            if n != 2 {
                return Err(LabError::Potential(
                    "ab_flux is only available in the n = 2 validation mode".into(),
                ));
            }
            let phi = parse_number(need_arg()?)?;
            let mut p = PotentialPair::ab_flux(phi)?;
            p.label = name.to_string();
            Ok(p)
        }
        "paper_3d_example" => {
            if n != 3 {
                return Err(LabError::Potential(
                    "paper_3d_example is defined for n = 3".into(),
                ));
            }
            Ok(PotentialPair::paper_3d_example())
        }
        _ => Err(LabError::Potential(format!("unknown built-in potential '{name}'"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_resolve() {
        let p = builtin("constant_a:-3/16", 3).unwrap();
        assert_eq!(p.constant_shift(), Some(-0.1875));
        assert!(builtin("ab_flux:0.5", 3).is_err());
        assert!(matches!(
            builtin("ab_flux:0.5", 2).unwrap().structure,
            Structure::ConstantFlux { phi, .. } if phi == 0.5
        ));
        assert!(builtin("nonsense", 3).is_err());
        assert!(builtin("constant_a:abc", 3).is_err());
    }

    #[test]
    fn toroidal_fields_are_tangent_and_divergence_free() {
        let spec = HarmonicPotential {
            a: vec![(2, 1, 0.3)],
            magnetic: vec![(1, 0, 0.7), (3, -2, 0.2)],
        };
        let p = PotentialPair::from_harmonic(3, &spec).unwrap();
        assert_eq!(p.structure, Structure::General);
        for &(th, ph) in &[(0.3, 0.1), (1.2, 2.0), (2.9, -1.0)] {
            let x = harmonics::unit_vector(th, ph);
            let a = p.vector_at(&x);
            let dot: f64 = a.iter().zip(&x).map(|(u, v)| u * v).sum();
            assert!(dot.abs() < 1e-14);
            assert!(fd_divergence(&p.vector, &x, 1e-4).abs() < 1e-6);
        }
    }

    #[test]
    fn constant_harmonic_potentials_are_recognized() {
        let spec = HarmonicPotential {
            a: vec![(0, 0, (4.0 * PI).sqrt() * 0.25)],
            magnetic: vec![],
        };
        let p = PotentialPair::from_harmonic(3, &spec).unwrap();
        match p.structure {
            Structure::ConstantScalar { c } => assert!((c - 0.25).abs() < 1e-15),
            other => panic!("{other:?}"),
        }
        let circ = HarmonicPotential {
            a: vec![],
            magnetic: vec![(0, 1, 0.3)],
        };
        let p = PotentialPair::from_harmonic(2, &circ).unwrap();
        assert!(matches!(p.structure, Structure::ConstantFlux { phi, .. } if (phi - 0.3).abs() < 1e-15));
    }
}
