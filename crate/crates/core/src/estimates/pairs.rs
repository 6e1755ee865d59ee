//! Admissible exponent pairs `Λ_s` and their restriction `Λ_{s,ν₀}`.
//!
//! Both sets are intervals in `x = 1/p` along the scaling line
//! `2/q + n/x⁻¹ = n/2 − s`, so set relations are decided exactly on the
//! interval endpoints.

use serde::Serialize;

use crate::angular::SpectrumSummary;
use crate::serde_util::serialize_extended;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct AdmissiblePair {
    #[serde(serialize_with = "serialize_extended")]
    pub q: f64,
    #[serde(serialize_with = "serialize_extended")]
    pub p: f64,
    pub s: f64,
    pub n: usize,
    /// `2/q + n/p − (n/2 − s)`, zero up to round-off.
    pub scaling_defect: f64,
    pub satisfies_scaling: bool,
    /// `p < p(α)`.
    pub in_restricted_set: bool,
}

fn inv(v: f64) -> f64 {
    if v.is_infinite() {
        0.0
    } else {
        1.0 / v
    }
}

fn recip(x: f64) -> f64 {
    if x == 0.0 {
        f64::INFINITY
    } else {
        1.0 / x
    }
}

impl AdmissiblePair {
    /// Pair on the scaling line through `1/p = x`; `None` when `q` would leave
    /// `[2, ∞]` or the pair is the excluded `(2, ∞, 2)`.
    pub fn on_line(n: usize, s: f64, p: f64, p_alpha: f64) -> Option<Self> {
        let x = inv(p);
        if !(0.0..=0.5).contains(&x) {
            return None;
        }
        let two_over_q = n as f64 / 2.0 - s - n as f64 * x;
        if !(-1e-15..=1.0 + 1e-15).contains(&two_over_q) {
            return None;
        }
        let two_over_q = two_over_q.clamp(0.0, 1.0);
        let q = recip(two_over_q / 2.0);
        if n == 2 && x == 0.0 && two_over_q == 1.0 {
            return None;
        }
        let defect = 2.0 * inv(q) + n as f64 * inv(p) - (n as f64 / 2.0 - s);
        Some(Self {
            q,
            p,
            s,
            n,
            scaling_defect: defect,
            satisfies_scaling: defect.abs() <= 1e-12,
            in_restricted_set: p < p_alpha,
        })
    }
}

/// Interval of admissible `1/p` values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InverseExponentInterval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl InverseExponentInterval {
    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_closed { x >= self.lo } else { x > self.lo };
        let below = if self.hi_closed { x <= self.hi } else { x < self.hi };
        above && below
    }

    fn is_empty(&self) -> bool {
        self.lo > self.hi || (self.lo == self.hi && !(self.lo_closed && self.hi_closed))
    }
}

/// `Λ_s` as an interval in `1/p`, `None` when empty.
pub fn lambda_s(n: usize, s: f64) -> Option<InverseExponentInterval> {
    let nf = n as f64;
    // 2/q = n/2 − s − n x ∈ [0, 1] and x ∈ [0, 1/2].
    let lo_line = (nf / 2.0 - s - 1.0) / nf;
    let hi_line = (nf / 2.0 - s) / nf;
    let (lo, mut lo_closed) = if lo_line > 0.0 { (lo_line, true) } else { (0.0, true) };
    let (hi, hi_closed) = if hi_line < 0.5 { (hi_line, true) } else { (0.5, true) };
    // (q, p, n) = (2, ∞, 2) sits at x = 0 exactly when s = 0.
    if n == 2 && lo == 0.0 && lo_line == 0.0 {
        lo_closed = false;
    }
    let iv = InverseExponentInterval {
        lo,
        hi,
        lo_closed,
        hi_closed,
    };
    (!iv.is_empty()).then_some(iv)
}

/// `Λ_{s,ν₀} = Λ_s ∩ {p < p(α)}`, i.e. `1/p > |α|/n` for `α < 0` and
/// `1/p > 0` for `α ≥ 0`.
pub fn lambda_s_nu0(n: usize, s: f64, alpha: f64) -> Option<InverseExponentInterval> {
    let base = lambda_s(n, s)?;
    let bound = if alpha < 0.0 { alpha.abs() / n as f64 } else { 0.0 };
    let mut iv = base;
    if bound > iv.lo || (bound == iv.lo && iv.lo_closed) {
        iv.lo = bound;
        iv.lo_closed = false;
    }
    (!iv.is_empty()).then_some(iv)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SetRelation {
    /// `Λ_{s,ν₀} = Λ_s`.
    Equal,
    /// `∅ ≠ Λ_{s,ν₀} ⊊ Λ_s`.
    StrictSubset,
    /// `Λ_{s,ν₀} = ∅`.
    Empty,
}

pub fn compare_sets(n: usize, s: f64, nu0: f64) -> SetRelation {
    let alpha = -(n as f64 - 2.0) / 2.0 + nu0;
    match (lambda_s(n, s), lambda_s_nu0(n, s, alpha)) {
        (_, None) => SetRelation::Empty,
        (Some(a), Some(b)) if a == b => SetRelation::Equal,
        _ => SetRelation::StrictSubset,
    }
}

/// `count` pairs spread uniformly in `1/p` across `Λ_s`, flagged by
/// membership in `Λ_{s,ν₀}`. The boundary pair `p = p(α)` is included when it
/// lies on the line. Empty when `Λ_{s,ν₀}` is empty.
pub fn enumerate_pairs(s: f64, summary: &SpectrumSummary, count: usize) -> Vec<AdmissiblePair> {
    let n = summary.n;
    if s < 0.0 || lambda_s_nu0(n, s, summary.alpha).is_none() {
        return Vec::new();
    }
    let iv = match lambda_s(n, s) {
        Some(iv) => iv,
        None => return Vec::new(),
    };
    let mut xs: Vec<f64> = Vec::new();
    let count = count.max(2);
    for i in 0..count {
        let x = iv.lo + (iv.hi - iv.lo) * i as f64 / (count - 1) as f64;
        if iv.contains(x) {
            xs.push(x);
        }
    }
    let boundary = if summary.alpha < 0.0 { summary.alpha.abs() / n as f64 } else { 0.0 };
    if iv.contains(boundary) && !xs.contains(&boundary) {
        xs.push(boundary);
    }
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    xs.into_iter()
        .filter_map(|x| AdmissiblePair::on_line(n, s, recip(x), summary.p_alpha))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::angular::{builtin, closed_form_spectrum, PotentialPair};

    #[test]
    fn endpoints_at_s_zero() {
        let free = closed_form_spectrum(&PotentialPair::free(3).unwrap(), 2).unwrap();
        let pairs = enumerate_pairs(0.0, &free, 5);
        let first = pairs.first().unwrap();
        let last = pairs.last().unwrap();
        assert!((first.p - 6.0).abs() < 1e-12 && (first.q - 2.0).abs() < 1e-12);
        assert!((last.p - 2.0).abs() < 1e-12 && last.q.is_infinite());
        assert!(pairs.iter().all(|p| p.satisfies_scaling && p.in_restricted_set));
    }

    #[test]
    fn p_alpha_is_excluded() {
        let p = builtin("constant_a:-3/16", 3).unwrap();
        let spec = closed_form_spectrum(&p, 2).unwrap();
        assert!((spec.p_alpha - 12.0).abs() < 1e-12);
        let at = AdmissiblePair::on_line(3, 1.0, 12.0, spec.p_alpha).unwrap();
        assert!(!at.in_restricted_set);
        let below = AdmissiblePair::on_line(3, 1.0, 11.9, spec.p_alpha).unwrap();
        assert!(below.in_restricted_set && below.satisfies_scaling);
        let pairs = enumerate_pairs(1.0, &spec, 7);
        assert!(pairs.iter().any(|q| (q.p - 12.0).abs() < 1e-9 && !q.in_restricted_set));
        assert!(enumerate_pairs(1.25, &spec, 7).is_empty());
    }

    #[test]
    fn two_dimensional_endpoint_excluded() {
        assert!(AdmissiblePair::on_line(2, 0.0, f64::INFINITY, f64::INFINITY).is_none());
        assert!(!lambda_s(2, 0.0).unwrap().contains(0.0));
    }

    #[test]
    fn exact_threshold_is_nu0() {
        // For n = 3 the equality Λ_{s,ν₀} = Λ_s holds exactly for s < ν₀.
        assert_eq!(compare_sets(3, 0.2, 0.25), SetRelation::Equal);
        assert_eq!(compare_sets(3, 0.25, 0.25), SetRelation::StrictSubset);
        assert_eq!(compare_sets(3, 1.2, 0.25), SetRelation::StrictSubset);
        assert_eq!(compare_sets(3, 1.25, 0.25), SetRelation::Empty);
        assert_eq!(compare_sets(3, 0.49, 0.5), SetRelation::Equal);
        assert_eq!(compare_sets(3, 0.5, 0.5), SetRelation::StrictSubset);
    }
}
