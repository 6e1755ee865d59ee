//! Real spherical harmonics on S², Fourier modes on S¹, zonal projectors on
//! S^{n-1}, and product quadrature rules on the sphere.

use std::f64::consts::PI;

use crate::quadrature::gauss_legendre;
use crate::special::ln_gamma;

/// Position of `Y_l^m` (`-l ≤ m ≤ l`) in the real harmonic basis.
pub fn sh_index(l: usize, m: i64) -> usize {
    ((l * l + l) as i64 + m) as usize
}

/// Inverse of [`sh_index`].
pub fn sh_degree_order(idx: usize) -> (usize, i64) {
    let l = (idx as f64).sqrt().floor() as usize;
    let l = if (l + 1) * (l + 1) <= idx { l + 1 } else { l };
    (l, idx as i64 - (l * l + l) as i64)
}

fn tri(l: usize, m: usize) -> usize {
    l * (l + 1) / 2 + m
}

/// Fully normalized associated Legendre functions `P̄_l^m(cos θ)`
/// (so that `∫ |P̄_l^m|² 2π sin θ dθ = 1`) and their θ-derivatives.
pub struct LegendreTable {
    lmax: usize,
    values: Vec<f64>,
    dtheta: Vec<f64>,
}

impl LegendreTable {
    pub fn new(lmax: usize, theta: f64) -> Self {
        let x = theta.cos();
        let s = theta.sin();
        let size = tri(lmax, lmax) + 1;
        let mut values = vec![0.0; size];
        values[0] = 1.0 / (4.0 * PI).sqrt();
        for m in 1..=lmax {
            let mf = m as f64;
            values[tri(m, m)] = ((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * s * values[tri(m - 1, m - 1)];
        }
        for m in 0..lmax {
            let mf = m as f64;
            values[tri(m + 1, m)] = (2.0 * mf + 3.0).sqrt() * x * values[tri(m, m)];
            for l in (m + 2)..=lmax {
                let lf = l as f64;
                let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
                let b = (((lf - 1.0).powi(2) - mf * mf) / (4.0 * (lf - 1.0).powi(2) - 1.0)).sqrt();
                values[tri(l, m)] = a * (x * values[tri(l - 1, m)] - b * values[tri(l - 2, m)]);
            }
        }
        let mut dtheta = vec![0.0; size];
        if s.abs() > 1e-300 {
            for l in 0..=lmax {
                let lf = l as f64;
                for m in 0..=l {
                    let mf = m as f64;
                    let prev = if l > m { values[tri(l - 1, m)] } else { 0.0 };
                    let c = if l > m {
                        ((2.0 * lf + 1.0) / (2.0 * lf - 1.0) * (lf - mf) * (lf + mf)).sqrt()
                    } else {
                        0.0
                    };
                    dtheta[tri(l, m)] = (lf * x * values[tri(l, m)] - c * prev) / s;
                }
            }
        }
        Self {
            lmax,
            values,
            dtheta,
        }
    }

    pub fn lmax(&self) -> usize {
        self.lmax
    }

    pub fn value(&self, l: usize, m: usize) -> f64 {
        self.values[tri(l, m)]
    }

    pub fn dtheta(&self, l: usize, m: usize) -> f64 {
        self.dtheta[tri(l, m)]
    }
}

/// Spherical angles `(θ, φ)` of a unit vector in ℝ³.
pub fn spherical_angles(p: &[f64]) -> (f64, f64) {
    let theta = p[2].clamp(-1.0, 1.0).acos();
    let phi = p[1].atan2(p[0]);
    (theta, phi)
}

pub fn unit_vector(theta: f64, phi: f64) -> [f64; 3] {
    [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()]
}

/// Values of every real harmonic `Y_l^m`, `l ≤ lmax`, at a point of S².
pub fn real_harmonics(lmax: usize, point: &[f64]) -> Vec<f64> {
    let (theta, phi) = spherical_angles(point);
    let table = LegendreTable::new(lmax, theta);
    let mut out = vec![0.0; (lmax + 1) * (lmax + 1)];
    let r2 = std::f64::consts::SQRT_2;
    for l in 0..=lmax {
        out[sh_index(l, 0)] = table.value(l, 0);
        for m in 1..=l {
            let p = r2 * table.value(l, m);
            let mp = m as f64 * phi;
            out[sh_index(l, m as i64)] = p * mp.cos();
            out[sh_index(l, -(m as i64))] = p * mp.sin();
        }
    }
    out
}

/// Values and ambient (tangential) surface gradients of every real harmonic.
/// The point must not be a pole.
pub fn real_harmonics_with_gradient(lmax: usize, point: &[f64]) -> (Vec<f64>, Vec<[f64; 3]>) {
    let (theta, phi) = spherical_angles(point);
    let table = LegendreTable::new(lmax, theta);
    let dim = (lmax + 1) * (lmax + 1);
    let mut vals = vec![0.0; dim];
    let mut grads = vec![[0.0; 3]; dim];
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let e_theta = [ct * cp, ct * sp, -st];
    let e_phi = [-sp, cp, 0.0];
    let r2 = std::f64::consts::SQRT_2;
    let combine = |dt: f64, dp_over_sin: f64| {
        [
            dt * e_theta[0] + dp_over_sin * e_phi[0],
            dt * e_theta[1] + dp_over_sin * e_phi[1],
            dt * e_theta[2] + dp_over_sin * e_phi[2],
        ]
    };
    for l in 0..=lmax {
        let i0 = sh_index(l, 0);
        vals[i0] = table.value(l, 0);
        grads[i0] = combine(table.dtheta(l, 0), 0.0);
        for m in 1..=l {
            let mf = m as f64;
            let p = r2 * table.value(l, m);
            let dp = r2 * table.dtheta(l, m);
            let (sm, cm) = (mf * phi).sin_cos();
            let ic = sh_index(l, m as i64);
            let is = sh_index(l, -(m as i64));
            vals[ic] = p * cm;
            vals[is] = p * sm;
            grads[ic] = combine(dp * cm, -mf * p * sm / st);
            grads[is] = combine(dp * sm, mf * p * cm / st);
        }
    }
    (vals, grads)
}

/// Surface measure |S^{n-1}|.
pub fn sphere_area(n: usize) -> f64 {
    let h = n as f64 / 2.0;
    2.0 * (h * PI.ln() - ln_gamma(h)).exp()
}

/// Dimension of the degree-`l` eigenspace of −Δ on S^{n-1}.
pub fn shell_multiplicity(n: usize, l: usize) -> usize {
    if n == 2 {
        return if l == 0 { 1 } else { 2 };
    }
    binomial(l + n - 1, n - 1) - if l >= 2 { binomial(l + n - 3, n - 1) } else { 0 }
}

fn binomial(a: usize, b: usize) -> usize {
    if b > a {
        return 0;
    }
    let b = b.min(a - b);
    let mut r: u128 = 1;
    for i in 0..b {
        r = r * (a - i) as u128 / (i + 1) as u128;
    }
    r as usize
}

/// Reproducing kernels of the degree-`l` shells on S^{n-1} (`n ≥ 2`) evaluated
/// at `cos δ = t`, for `l = 0..=lmax`. Each entry equals `Σ_m Y_l^m(x) Y_l^m(y)`.
pub fn zonal_projectors(n: usize, t: f64, lmax: usize) -> Vec<f64> {
    let t = t.clamp(-1.0, 1.0);
    let mut out = Vec::with_capacity(lmax + 1);
    if n == 2 {
        // Chebyshev: 1/(2π) for l = 0, cos(lδ)/π otherwise.
        let delta = t.acos();
        for l in 0..=lmax {
            out.push(if l == 0 {
                1.0 / (2.0 * PI)
            } else {
                (l as f64 * delta).cos() / PI
            });
        }
        return out;
    }
    let lambda = (n as f64 - 2.0) / 2.0;
    let area = sphere_area(n);
    let mut c_prev = 0.0;
    let mut c = 1.0;
    for l in 0..=lmax {
        let lf = l as f64;
        if l == 1 {
            c_prev = c;
            c = 2.0 * lambda * t;
        } else if l >= 2 {
            let next = (2.0 * t * (lf + lambda - 1.0) * c - (lf + 2.0 * lambda - 2.0) * c_prev) / lf;
            c_prev = c;
            c = next;
        }
        out.push((2.0 * lf + n as f64 - 2.0) / ((n as f64 - 2.0) * area) * c);
    }
    out
}

/// Quadrature nodes (unit vectors) and weights on S¹ or S².
#[derive(Debug, Clone)]
pub struct SphereRule {
    pub n: usize,
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl SphereRule {
    /// Uniform trapezoid rule with `m` nodes on S¹.
    pub fn circle(m: usize) -> Self {
        let h = 2.0 * PI / m as f64;
        let points = (0..m)
            .map(|j| {
                let th = h * j as f64;
                vec![th.cos(), th.sin()]
            })
            .collect();
        Self {
            n: 2,
            points,
            weights: vec![h; m],
        }
    }

    /// Gauss–Legendre in cos θ times uniform azimuth, exact for spherical
    /// polynomials of degree `< min(2·n_theta, n_phi)`.
    pub fn product(n_theta: usize, n_phi: usize) -> Self {
        let gl = gauss_legendre(n_theta);
        let h = 2.0 * PI / n_phi as f64;
        let mut points = Vec::with_capacity(n_theta * n_phi);
        let mut weights = Vec::with_capacity(n_theta * n_phi);
        for (&x, &w) in gl.nodes.iter().zip(&gl.weights) {
            let theta = x.acos();
            for j in 0..n_phi {
                let phi = h * (j as f64 + 0.5);
                points.push(unit_vector(theta, phi).to_vec());
                weights.push(w * h);
            }
        }
        Self { n: 3, points, weights }
    }

    /// Product rule matched to the harmonic basis of degree `lmax`.
    pub fn for_degree(lmax: usize) -> Self {
        Self::product(2 * lmax + 2, 4 * lmax + 4)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonics_are_orthonormal() {
        let lmax = 6;
        let rule = SphereRule::for_degree(lmax);
        let dim = (lmax + 1) * (lmax + 1);
        let mut gram = vec![0.0; dim * dim];
        for (p, w) in rule.points.iter().zip(&rule.weights) {
            let y = real_harmonics(lmax, p);
            for i in 0..dim {
                for j in 0..dim {
                    gram[i * dim + j] += w * y[i] * y[j];
                }
            }
        }
        for i in 0..dim {
            for j in 0..dim {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((gram[i * dim + j] - want).abs() < 1e-12, "({i},{j})");
            }
        }
    }

    #[test]
    fn gradients_match_finite_differences() {
        let lmax = 5;
        let p = unit_vector(1.1, 0.7);
        let (_, grads) = real_harmonics_with_gradient(lmax, &p);
        let h = 1e-6;
        for dir in [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]] {
            // Directional derivative of the 0-homogeneous extension.
            let shift = |s: f64| {
                let q: Vec<f64> = (0..3).map(|i| p[i] + s * dir[i]).collect();
                let r = q.iter().map(|v| v * v).sum::<f64>().sqrt();
                real_harmonics(lmax, &q.iter().map(|v| v / r).collect::<Vec<_>>())
            };
            let (plus, minus) = (shift(h), shift(-h));
            for i in 0..grads.len() {
                let fd = (plus[i] - minus[i]) / (2.0 * h);
                let an: f64 = (0..3).map(|k| grads[i][k] * dir[k]).sum();
                assert!((fd - an).abs() < 1e-7, "index {i}: {fd} vs {an}");
            }
        }
    }

    #[test]
    fn addition_theorem_matches_zonal_projector() {
        let lmax = 8;
        let x = unit_vector(0.4, 1.3);
        let y = unit_vector(2.2, -0.9);
        let t: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        let yx = real_harmonics(lmax, &x);
        let yy = real_harmonics(lmax, &y);
        let zonal = zonal_projectors(3, t, lmax);
        for l in 0..=lmax {
            let s: f64 = (-(l as i64)..=l as i64)
                .map(|m| yx[sh_index(l, m)] * yy[sh_index(l, m)])
                .sum();
            assert!((s - zonal[l]).abs() < 1e-12);
        }
    }

    #[test]
    fn multiplicities_and_areas() {
        assert_eq!(shell_multiplicity(3, 4), 9);
        assert_eq!(shell_multiplicity(4, 2), 9);
        assert_eq!(shell_multiplicity(5, 1), 5);
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-13);
        assert!((sphere_area(4) - 2.0 * PI * PI).abs() < 1e-12);
        // Trace of the zonal projector equals multiplicity / area.
        for n in [3usize, 4, 5] {
            let z = zonal_projectors(n, 1.0, 4);
            for (l, zl) in z.iter().enumerate().take(5) {
                let want = shell_multiplicity(n, l) as f64 / sphere_area(n);
                assert!((zl - want).abs() < 1e-12 * want.max(1.0));
            }
        }
    }

    #[test]
    fn index_roundtrip() {
        for idx in 0..100 {
            let (l, m) = sh_degree_order(idx);
            assert_eq!(sh_index(l, m), idx);
        }
    }
}
