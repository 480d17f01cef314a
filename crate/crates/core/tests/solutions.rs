mod common;

use common::*;
use proptest::prelude::*;
use singular_sl::solutions::*;
use singular_sl::volterra::{Branch, HalfPlane, IterationConfig};
use singular_sl::{Complex64, Error};

#[test]
fn free_case_reproduces_plane_waves() {
    let lam = c(5.0, 0.0);
    let fs = fundamental_system(&free(), lam, 0.0, &IterationConfig::default()).unwrap();
    for b in [&fs.plus, &fs.minus] {
        assert!(b.sup_phi() <= 1e-12 && b.sup_psi() <= 1e-12);
    }
    let i = c(0.0, 1.0);
    for (k, &t) in fs.plus.t.iter().enumerate() {
        assert!((fs.plus.y[k] - (i * lam * t).exp()).norm() <= 1e-12);
        assert!((fs.minus.y[k] - (-i * lam * t).exp()).norm() <= 1e-12);
    }
    assert!(fs.wronskian.iter().all(|w| (w - c(0.0, -10.0)).norm() <= 1e-10));
}

#[test]
fn constant_density_has_zero_remainders() {
    for lam in [c(10.0, 1.0), c(30.0, 0.5)] {
        let fs = fundamental_system(&constant_rho(), lam, 0.0, &IterationConfig::default()).unwrap();
        assert!(fs.plus.sup_phi() <= 1e-10 && fs.minus.sup_phi() <= 1e-10);
        assert!(fs.plus.sup_psi() <= 1e-10 && fs.minus.sup_psi() <= 1e-10);
        // t = 2x, so the leading phase runs twice as fast in x.
        let x = fs.minus.x[fs.minus.x.len() / 3];
        let k = fs.minus.x.len() / 3;
        let lead = 4f64.powf(-0.25) * (c(0.0, -2.0) * lam * x).exp();
        assert!((fs.minus.y[k] - lead).norm() <= 1e-10);
    }
}

#[test]
fn remainders_vanish_at_their_anchors() {
    let fs = fundamental_system(&smooth(), c(30.0, 3.0), 0.0, &IterationConfig::default()).unwrap();
    let n = fs.plus.phi.len();
    assert!(fs.minus.phi[0].norm() <= 1e-14 && fs.minus.psi[0].norm() <= 1e-14);
    assert!(fs.plus.phi[n - 1].norm() <= 1e-14 && fs.plus.psi[n - 1].norm() <= 1e-14);
}

#[test]
fn wronskian_is_preserved() {
    let fs = fundamental_system(&smooth(), c(30.0, 3.0), 0.0, &IterationConfig::default()).unwrap();
    assert!(fs.wronskian_defect() <= 1e-6, "{}", fs.wronskian_defect());
    let cfg = IterationConfig { n_min: 4096, ..Default::default() };
    let fs = fundamental_system(&delta(), c(40.0, 0.0), 0.0, &cfg).unwrap();
    assert!(fs.wronskian_defect() <= 1e-6, "{}", fs.wronskian_defect());
}

#[test]
fn lower_convention_relabels_and_flips_the_wronskian() {
    let fs = solve_lower_halfplane(&free(), c(-5.0, 0.0), 0.0, &IterationConfig::default()).unwrap();
    assert_eq!(fs.halfplane, HalfPlane::Lower);
    assert_eq!(fs.plus.branch, Branch::Plus);
    assert!(fs.wronskian.iter().all(|w| (w - c(0.0, 10.0)).norm() <= 1e-10));
    let i = c(0.0, 1.0);
    for (k, &t) in fs.plus.t.iter().enumerate() {
        assert!((fs.plus.y[k] - (-i * 5.0 * t).exp()).norm() <= 1e-12);
    }
}

#[test]
fn lower_convention_is_the_conjugate_for_real_spectral_points() {
    let cfg = IterationConfig { n_min: 4096, ..Default::default() };
    for cs in [delta(), smooth()] {
        let lam = c(40.0, 0.0);
        let upper = solve(&cs, lam, 0.0, HalfPlane::Upper, &cfg).unwrap();
        let lower = solve(&cs, lam, 0.0, HalfPlane::Lower, &cfg).unwrap();
        let d = conjugate_symmetry_defect(&upper, &lower);
        assert!(d <= 1e-8, "{d}");
    }
}

#[test]
fn conventions_agree_in_the_strip_when_anchors_do_not_matter() {
    let cfg = IterationConfig::default();
    let lam = c(5.0, -2.0);
    let upper = solve(&free(), lam, 3.0, HalfPlane::Upper, &cfg).unwrap();
    let lower = solve(&free(), lam, 3.0, HalfPlane::Lower, &cfg).unwrap();
    assert!(convention_difference(&upper, &lower) <= 1e-8);
}

#[test]
fn remainder_sweep_reports_decay() {
    let lams: Vec<Complex64> = [25.0, 50.0, 100.0, 200.0, 400.0].iter().map(|&s| c(s, 0.0)).collect();
    let report = remainder_sweep(&smooth(), &lams, 2.0, HalfPlane::Upper, &IterationConfig::default()).unwrap();
    assert!(report.passed());
    let (_, phi) = report.lists()[1];
    assert!(phi.last().unwrap() * 4.0 < phi[0]);

    let free_report = remainder_sweep(&free(), &lams, 2.0, HalfPlane::Upper, &IterationConfig::default()).unwrap();
    assert!(free_report.passed());
}

#[test]
fn remainder_sweep_requires_ordering() {
    let lams = [c(50.0, 0.0), c(25.0, 0.0)];
    let err = remainder_sweep(&free(), &lams, 0.0, HalfPlane::Upper, &IterationConfig::default()).unwrap_err();
    assert!(matches!(err, Error::Config(_)));
}

#[test]
fn sweep_points_isolate_failures() {
    let lams = [c(0.5, 0.0), c(5.0, 0.0), c(10.0, -3.0)];
    let out = sweep_points(&free(), &lams, 1.0, HalfPlane::Upper, &IterationConfig::default());
    assert!(matches!(out[0], Err(Error::MuGuard { .. })));
    assert!(out[1].is_ok());
    assert!(matches!(out[2], Err(Error::HalfPlane(_))));
}

#[test]
fn grid_refinement_is_second_order() {
    let lam = c(30.0, 3.0);
    let at = |n: usize| fundamental_system(&smooth(), lam, 0.0, &IterationConfig { n_min: n, ..Default::default() }).unwrap();
    let (coarse, mid, fine) = (at(1 << 10), at(1 << 11), at(1 << 12));
    let diff = |a: &FundamentalSystem, b: &FundamentalSystem| {
        let stride = (b.minus.y.len() - 1) / (a.minus.y.len() - 1);
        (0..a.minus.y.len()).map(|k| (a.minus.y[k] - b.minus.y[k * stride]).norm()).fold(0.0, f64::max)
    };
    let ratio = diff(&coarse, &mid) / diff(&mid, &fine);
    assert!(ratio > 3.0 && ratio < 5.0, "{ratio}");
}

#[test]
fn solve_is_deterministic() {
    let cfg = IterationConfig::default();
    let a = fundamental_system(&delta(), c(40.0, 4.0), 0.0, &cfg).unwrap();
    let b = fundamental_system(&delta(), c(40.0, 4.0), 0.0, &cfg).unwrap();
    assert_eq!(a.plus.y, b.plus.y);
    assert_eq!(a.minus.y_quasi, b.minus.y_quasi);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn wronskian_holds_across_the_upper_half_plane(re in 2.0f64..60.0, im in -1.5f64..4.0) {
        let fs = fundamental_system(&smooth(), c(re, im), 2.0, &IterationConfig { n_min: 4096, ..Default::default() }).unwrap();
        prop_assert!(fs.wronskian_defect() <= 1e-6);
        prop_assert!(fs.residual() <= 1e-9);
    }
}
