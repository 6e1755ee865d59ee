//! Property tests for structural identities that hold for every input.

use num_complex::Complex64;
use proptest::prelude::*;

use dispersive_lab::estimates::pairs::{compare_sets, lambda_s, lambda_s_nu0, AdmissiblePair, SetRelation};
use dispersive_lab::estimates::{Check, ScanReport, Verdict};
use dispersive_lab::hankel::{lp_phi, lp_phi_quadratic, HankelTransform, RadialGrid, DEFAULT_R_MIN};
use dispersive_lab::propagator::{radial_mode_kernel, Flavor, Regularization};

fn rank(r: SetRelation) -> u8 {
    match r {
        SetRelation::Equal => 0,
        SetRelation::StrictSubset => 1,
        SetRelation::Empty => 2,
    }
}

proptest! {
    #[test]
    fn pairs_lie_on_the_scaling_line(n in 2usize..=3, s in 0.0f64..1.4, u in 0.0f64..=1.0) {
        if let Some(iv) = lambda_s(n, s) {
            let x = iv.lo + u * (iv.hi - iv.lo);
            let p = if x == 0.0 { f64::INFINITY } else { 1.0 / x };
            if let Some(pair) = AdmissiblePair::on_line(n, s, p, f64::INFINITY) {
                prop_assert!(pair.scaling_defect.abs() < 1e-12);
                prop_assert!(pair.q >= 2.0 - 1e-12);
                prop_assert!(pair.p >= 2.0 - 1e-12);
            }
        }
    }

    #[test]
    fn restricted_set_is_a_subset(s in 0.0f64..2.0, nu0 in 0.05f64..1.5, u in 0.0f64..=1.0) {
        let alpha = nu0 - 0.5;
        if let Some(r) = lambda_s_nu0(3, s, alpha) {
            let x = r.lo + u * (r.hi - r.lo);
            if r.contains(x) {
                prop_assert!(lambda_s(3, s).unwrap().contains(x));
            }
        }
    }

    #[test]
    fn set_relation_is_monotone_in_s(nu0 in 0.05f64..1.5, s in 0.0f64..2.5, ds in 0.0f64..1.0) {
        prop_assert!(rank(compare_sets(3, s, nu0)) <= rank(compare_sets(3, s + ds, nu0)));
    }

    #[test]
    fn lp_partition_of_unity(log_lambda in -20.0f64..20.0) {
        let lambda = log_lambda.exp2();
        let linear: f64 = (-30..=30).map(|j| lp_phi(lambda * 2f64.powi(-j))).sum();
        let quadratic: f64 = (-30..=30).map(|j| lp_phi_quadratic(j, lambda).powi(2)).sum();
        prop_assert!((linear - 1.0).abs() < 1e-14);
        prop_assert!((quadratic - 1.0).abs() < 1e-14);
    }

    #[test]
    fn heat_mode_kernel_is_symmetric_and_positive(
        nu in 0.0f64..3.0, t in 0.05f64..5.0, r1 in 0.1f64..5.0, r2 in 0.1f64..5.0,
    ) {
        let a = radial_mode_kernel(nu, 3, t, r1, r2, Flavor::Heat, Regularization::Richardson).unwrap();
        let b = radial_mode_kernel(nu, 3, t, r2, r1, Flavor::Heat, Regularization::Richardson).unwrap();
        prop_assert!(a.re > 0.0);
        prop_assert!((a - b).norm() <= 1e-13 * a.norm());
    }

    #[test]
    fn widening_a_bound_never_breaks_a_pass(obs in 0.0f64..1.0, bound in 0.0f64..1.0, extra in 0.0f64..1.0) {
        if Check::at_most("x", obs, bound).pass {
            prop_assert!(Check::at_most("x", obs, bound + extra).pass);
        }
        if Check::at_least("x", obs, bound).pass {
            prop_assert!(Check::at_least("x", obs, bound - extra).pass);
        }
        if Check::within("x", obs, 0.5, bound).pass {
            prop_assert!(Check::within("x", obs, 0.5, bound + extra).pass);
        }
    }

    #[test]
    fn one_failing_check_fails_the_report(passes in proptest::collection::vec(any::<bool>(), 1..6)) {
        let mut r = ScanReport::new("p", "p", "p");
        for (i, &ok) in passes.iter().enumerate() {
            r.check(Check::at_most(&format!("c{i}"), if ok { 0.0 } else { 2.0 }, 1.0));
        }
        r.finish();
        let want = if passes.iter().all(|&p| p) { Verdict::Pass } else { Verdict::Fail };
        prop_assert_eq!(r.verdict, want);
        r.mark_report_only();
        r.finish();
        prop_assert_eq!(r.verdict, Verdict::ReportOnly);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn hankel_transform_is_unitary(nu in 0.0f64..3.0, center in 2.5f64..4.0, width in 0.3f64..0.55) {
        let grid = RadialGrid::new(3, DEFAULT_R_MIN, 40.0, 64).unwrap();
        let f = grid.sample(|r| Complex64::new((-((r - center) / width).powi(2)).exp(), 0.0));
        let h = HankelTransform::symmetric(nu, grid.clone()).unwrap();
        let g = h.forward(&f).unwrap();
        let (a, b) = (grid.lp_norm(&f, 2.0), grid.lp_norm(&g, 2.0));
        prop_assert!((a - b).abs() <= 1e-6 * a, "nu {} |f| {} |Hf| {}", nu, a, b);
        let back = h.inverse(&g).unwrap();
        let diff: Vec<Complex64> = back.iter().zip(&f).map(|(x, y)| x - y).collect();
        let err = grid.lp_norm(&diff, 2.0) / a;
        prop_assert!(err < 1e-6, "roundtrip {}", err);
    }
}

#[test]
fn refinement_turns_pass_into_unstable() {
    assert_eq!(Verdict::refine(Verdict::Pass, Verdict::Fail), Verdict::Unstable);
    assert_eq!(Verdict::refine(Verdict::Fail, Verdict::Pass), Verdict::Pass);
    assert_eq!(Verdict::refine(Verdict::Pass, Verdict::Pass), Verdict::Pass);
}
