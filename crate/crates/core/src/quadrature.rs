//! Quadrature rules: Gauss–Legendre and Gauss–Jacobi node generation, composite
//! panel rules, and an adaptive Gauss–Kronrod integrator for complex-valued
//! (possibly oscillatory) integrands.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use crate::error::{LabError, Result};
use crate::special::{gamma, ln_gamma};

/// Nodes and weights of an `n`-point rule on the reference interval [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integrates `f` over `[a, b]` with the affine map of the reference rule.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }

    /// Mapped nodes and weights on `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, w * half))
    }
}

fn legendre_cache() -> &'static Mutex<HashMap<usize, Arc<GaussRule>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussRule>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Gauss–Legendre rule with `n` nodes (ascending). Cached per `n`.
pub fn gauss_legendre(n: usize) -> Arc<GaussRule> {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    if let Some(rule) = legendre_cache().lock().unwrap().get(&n) {
        return Arc::clone(rule);
    }
    let rule = Arc::new(compute_gauss_legendre(n));
    legendre_cache()
        .lock()
        .unwrap()
        .insert(n, Arc::clone(&rule));
    rule
}

fn compute_gauss_legendre(n: usize) -> GaussRule {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    let nf = n as f64;
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    GaussRule { nodes, weights }
}

/// Legendre polynomial `P_n(x)` and its derivative.
pub fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

type JacobiKey = (usize, u64, u64);

fn jacobi_cache() -> &'static Mutex<HashMap<JacobiKey, Arc<GaussRule>>> {
    static CACHE: OnceLock<Mutex<HashMap<JacobiKey, Arc<GaussRule>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Gauss–Jacobi rule for the weight `(1-x)^alpha (1+x)^beta` on [-1, 1].
///
/// Nodes come from Newton iteration on the three-term recurrence; if that fails
/// to produce strictly ordered nodes inside (-1, 1) the rule falls back to the
/// Golub–Welsch eigenvalue construction. Rules are cached per `(n, alpha, beta)`.
pub fn gauss_jacobi(n: usize, alpha: f64, beta: f64) -> Result<Arc<GaussRule>> {
    if n == 0 || alpha <= -1.0 || beta <= -1.0 {
        return Err(LabError::Parameter(format!(
            "Gauss-Jacobi needs n >= 1 and alpha, beta > -1 (got n={n}, alpha={alpha}, beta={beta})"
        )));
    }
    let key = (n, alpha.to_bits(), beta.to_bits());
    if let Some(rule) = jacobi_cache().lock().unwrap().get(&key) {
        return Ok(Arc::clone(rule));
    }
    let rule = match jacobi_newton(n, alpha, beta) {
        Some(rule) => rule,
        None => golub_welsch_jacobi(n, alpha, beta),
    };
    let rule = Arc::new(rule);
    jacobi_cache()
        .lock()
        .unwrap()
        .insert(key, Arc::clone(&rule));
    Ok(rule)
}

// The initial-guess coefficients (6.28 among them) are empirical fits, not τ.
#[allow(clippy::approx_constant)]
fn jacobi_newton(n: usize, alf: f64, bet: f64) -> Option<GaussRule> {
    let nf = n as f64;
    let alfbet = alf + bet;
    let mut x = vec![0.0f64; n];
    let mut w = vec![0.0f64; n];
    let mut z = 0.0f64;
    for i in 0..n {
        let idx = i + 1;
        if idx == 1 {
            let an = alf / nf;
            let bn = bet / nf;
            let r1 = (1.0 + alf) * (2.78 / (4.0 + nf * nf) + 0.768 * an / nf);
            let r2 = 1.0 + 1.48 * an + 0.96 * bn + 0.452 * an * an + 0.83 * an * bn;
            z = 1.0 - r1 / r2;
        } else if idx == 2 {
            let r1 = (4.1 + alf) / ((1.0 + alf) * (1.0 + 0.156 * alf));
            let r2 = 1.0 + 0.06 * (nf - 8.0) * (1.0 + 0.12 * alf) / nf;
            let r3 = 1.0 + 0.012 * bet * (1.0 + 0.25 * alf.abs()) / nf;
            z -= (1.0 - z) * r1 * r2 * r3;
        } else if idx == 3 {
            let r1 = (1.67 + 0.28 * alf) / (1.0 + 0.37 * alf);
            let r2 = 1.0 + 0.22 * (nf - 8.0) / nf;
            let r3 = 1.0 + 8.0 * bet / ((6.28 + bet) * nf * nf);
            z -= (x[0] - z) * r1 * r2 * r3;
        } else if idx == n - 1 {
            let r1 = (1.0 + 0.235 * bet) / (0.766 + 0.119 * bet);
            let r2 = 1.0 / (1.0 + 0.639 * (nf - 4.0) / (1.0 + 0.71 * (nf - 4.0)));
            let r3 = 1.0 / (1.0 + 20.0 * alf / ((7.5 + alf) * nf * nf));
            z += (z - x[n - 4]) * r1 * r2 * r3;
        } else if idx == n {
            let r1 = (1.0 + 0.37 * bet) / (1.67 + 0.28 * bet);
            let r2 = 1.0 / (1.0 + 0.22 * (nf - 8.0) / nf);
            let r3 = 1.0 / (1.0 + 8.0 * alf / ((6.28 + alf) * nf * nf));
            z += (z - x[n - 3]) * r1 * r2 * r3;
        } else {
            z = 3.0 * x[i - 1] - 3.0 * x[i - 2] + x[i - 3];
        }
        // (P_n, P_{n-1}, P_n') at z, and the last recurrence denominator.
        let eval = |z: f64| {
            let mut temp = 2.0 + alfbet;
            let mut p1 = (alf - bet + temp * z) / 2.0;
            let mut p2 = 1.0;
            for j in 2..=n {
                let jf = j as f64;
                let p3 = p2;
                p2 = p1;
                temp = 2.0 * jf + alfbet;
                let a = 2.0 * jf * (jf + alfbet) * (temp - 2.0);
                let b = (temp - 1.0) * (alf * alf - bet * bet + temp * (temp - 2.0) * z);
                let c = 2.0 * (jf - 1.0 + alf) * (jf - 1.0 + bet) * temp;
                p1 = (b * p2 - c * p3) / a;
            }
            let pp = (nf * (alf - bet - temp * z) * p1 + 2.0 * (nf + alf) * (nf + bet) * p2) / (temp * (1.0 - z * z));
            (p1, p2, pp, temp)
        };
        let mut converged = false;
        for _ in 0..60 {
            let (p1, _, pp, _) = eval(z);
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 {
                converged = true;
                break;
            }
        }
        // Weights from the recurrence at the converged node, not the previous iterate.
        let (_, p2, pp, temp) = eval(z);
        if !converged || !z.is_finite() || z.abs() >= 1.0 || (i > 0 && z >= x[i - 1]) {
            return None;
        }
        x[i] = z;
        w[i] = (ln_gamma(alf + nf) + ln_gamma(bet + nf)
            - ln_gamma(nf + 1.0)
            - ln_gamma(nf + alfbet + 1.0))
        .exp()
            * temp
            * 2f64.powf(alfbet)
            / (pp * p2);
    }
    x.reverse();
    w.reverse();
    if w.iter().any(|v| !v.is_finite() || *v <= 0.0) {
        return None;
    }
    // The log-gamma prefactor is shared by every weight and carries ~n·ulp
    // error from cancelling large logs; pin the total to the exact mass.
    let mass = 2f64.powf(alfbet + 1.0) * gamma(alf + 1.0) * gamma(bet + 1.0) / gamma(alfbet + 2.0);
    let scale = mass / w.iter().sum::<f64>();
    w.iter_mut().for_each(|v| *v *= scale);
    Some(GaussRule {
        nodes: x,
        weights: w,
    })
}

/// Golub–Welsch construction from the symmetric Jacobi matrix of the recurrence.
pub fn golub_welsch_jacobi(n: usize, alpha: f64, beta: f64) -> GaussRule {
    let mut m = nalgebra::DMatrix::<f64>::zeros(n, n);
    let ab = alpha + beta;
    for k in 0..n {
        let kf = k as f64;
        let denom = (2.0 * kf + ab) * (2.0 * kf + ab + 2.0);
        let diag = if denom.abs() < 1e-300 {
            (beta - alpha) / (ab + 2.0)
        } else {
            (beta * beta - alpha * alpha) / denom
        };
        m[(k, k)] = diag;
        if k + 1 < n {
            let k1 = kf + 1.0;
            let off = if k == 0 {
                // (k1 + ab) cancels against (2k1 + ab - 1) here
                (4.0 * (alpha + 1.0) * (beta + 1.0) / ((ab + 2.0).powi(2) * (ab + 3.0))).sqrt()
            } else {
                let num = 4.0 * k1 * (k1 + alpha) * (k1 + beta) * (k1 + ab);
                let den =
                    (2.0 * k1 + ab).powi(2) * (2.0 * k1 + ab + 1.0) * (2.0 * k1 + ab - 1.0);
                (num / den).sqrt()
            };
            m[(k, k + 1)] = off;
            m[(k + 1, k)] = off;
        }
    }
    let mu0 = (ab + 1.0) * std::f64::consts::LN_2 + ln_gamma(alpha + 1.0) + ln_gamma(beta + 1.0)
        - ln_gamma(ab + 2.0);
    let mu0 = mu0.exp();
    let eig = nalgebra::SymmetricEigen::new(m);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    GaussRule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    }
}

/// Composite Gauss–Legendre rule over the panels delimited by `breaks`.
pub fn composite_rule(breaks: &[f64], order: usize) -> (Vec<f64>, Vec<f64>) {
    let rule = gauss_legendre(order);
    let mut nodes = Vec::with_capacity(order * breaks.len().saturating_sub(1));
    let mut weights = Vec::with_capacity(nodes.capacity());
    for pair in breaks.windows(2) {
        for (x, w) in rule.mapped(pair[0], pair[1]) {
            nodes.push(x);
            weights.push(w);
        }
    }
    (nodes, weights)
}

// Kronrod 15-point abscissae / weights and the embedded 7-point Gauss weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod15<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> (Complex64, f64) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let fc = f(mid);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(mid - dx) + f(mid + dx);
        kron += s * WGK[j];
        if j % 2 == 1 {
            gauss += s * WG[j / 2];
        }
    }
    let kron = kron * half;
    let gauss = gauss * half;
    (kron, (kron - gauss).norm())
}

/// Stopping rules for [`adaptive_integrate`].
#[derive(Debug, Clone, Copy)]
pub struct AdaptiveOptions {
    /// Number of equal panels the interval is split into before refinement.
    pub initial_panels: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        Self {
            initial_panels: 1,
            abs_tol: 1e-14,
            rel_tol: 1e-12,
            max_panels: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct AdaptiveResult {
    pub value: Complex64,
    pub error: f64,
    pub panels: usize,
}

struct Segment {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive Gauss–Kronrod (7/15) quadrature of a complex integrand.
///
/// The interval is first cut into `initial_panels` equal panels; oscillatory
/// integrands should size this by the total phase variation.
pub fn adaptive_integrate<F: FnMut(f64) -> Complex64>(
    mut f: F,
    a: f64,
    b: f64,
    opts: AdaptiveOptions,
) -> AdaptiveResult {
    if a == b {
        return AdaptiveResult {
            value: Complex64::new(0.0, 0.0),
            error: 0.0,
            panels: 0,
        };
    }
    let init = opts.initial_panels.max(1);
    let mut heap = BinaryHeap::with_capacity(init * 2);
    let mut total = Complex64::new(0.0, 0.0);
    let mut total_err = 0.0;
    let h = (b - a) / init as f64;
    for i in 0..init {
        let lo = a + h * i as f64;
        let hi = if i + 1 == init { b } else { lo + h };
        let (value, error) = kronrod15(&mut f, lo, hi);
        total += value;
        total_err += error;
        heap.push(Segment {
            a: lo,
            b: hi,
            value,
            error,
        });
    }
    while total_err > opts.abs_tol.max(opts.rel_tol * total.norm()) && heap.len() < opts.max_panels
    {
        let seg = match heap.pop() {
            Some(s) => s,
            None => break,
        };
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a || mid >= seg.b {
            heap.push(seg);
            break;
        }
        let (v1, e1) = kronrod15(&mut f, seg.a, mid);
        let (v2, e2) = kronrod15(&mut f, mid, seg.b);
        total += v1 + v2 - seg.value;
        total_err += e1 + e2 - seg.error;
        heap.push(Segment {
            a: seg.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Segment {
            a: mid,
            b: seg.b,
            value: v2,
            error: e2,
        });
    }
    // Re-sum to shed the drift of the running updates.
    let mut value = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    let panels = heap.len();
    for seg in heap {
        value += seg.value;
        error += seg.error;
    }
    AdaptiveResult {
        value,
        error,
        panels,
    }
}

/// Real-valued convenience wrapper around [`adaptive_integrate`].
pub fn adaptive_integrate_real<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    opts: AdaptiveOptions,
) -> (f64, f64) {
    let r = adaptive_integrate(|x| Complex64::new(f(x), 0.0), a, b, opts);
    (r.value.re, r.error)
}
