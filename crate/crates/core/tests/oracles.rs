mod common;

use common::*;
use singular_sl::coefficients::{Profile, Side};
use singular_sl::oracle::*;
use singular_sl::solutions::fundamental_system;
use singular_sl::volterra::{Branch, Endpoint, HalfPlane};
use singular_sl::Complex64;

struct Golden {
    file: &'static str,
    smooth: bool,
    lambda: Complex64,
    branch: Branch,
}

const GOLDEN: [Golden; 4] = [
    Golden { file: "smooth_lambda_30+3i_plus.csv", smooth: true, lambda: Complex64::new(30.0, 3.0), branch: Branch::Plus },
    Golden { file: "smooth_lambda_30+3i_minus.csv", smooth: true, lambda: Complex64::new(30.0, 3.0), branch: Branch::Minus },
    Golden { file: "delta_lambda_40_plus.csv", smooth: false, lambda: Complex64::new(40.0, 0.0), branch: Branch::Plus },
    Golden { file: "delta_lambda_40_minus.csv", smooth: false, lambda: Complex64::new(40.0, 0.0), branch: Branch::Minus },
];

fn reference(g: &Golden) -> OracleSolution {
    let xs = golden_abscissae();
    let anchor = g.branch.anchor(HalfPlane::Upper);
    if g.smooth {
        adaptive_reference(&smooth(), g.lambda, g.branch, anchor, 1e-15, &xs).unwrap()
    } else {
        transfer_matrix_delta(c(2.0, 0.0), 0.5, g.lambda, delta().interval(), g.branch, anchor, &xs).unwrap()
    }
}

/// Set `SINGULAR_SL_WRITE_GOLDEN=1` to regenerate the frozen files.
#[test]
fn golden_files_match_fresh_oracles() {
    let regenerate = std::env::var_os("SINGULAR_SL_WRITE_GOLDEN").is_some();
    for g in &GOLDEN {
        let path = data_dir().join(g.file);
        let fresh = reference(g);
        if regenerate {
            write_golden(&path, &fresh).unwrap();
        }
        if g.smooth {
            assert!(fresh.est_error <= 1e-8, "{}: est_error {}", g.file, fresh.est_error);
        }
        let frozen = read_golden(&path, fresh.method).unwrap();
        assert_eq!(frozen.x, fresh.x);
        let d = frozen.sup_difference(&fresh.x, &fresh.y, &fresh.y_quasi).unwrap();
        assert!(d <= 1e-9, "{}: {d}", g.file);
    }
}

#[test]
fn solver_matches_golden_files() {
    let smooth_fs = fundamental_system(&smooth(), c(30.0, 3.0), 0.0, &fine()).unwrap();
    let delta_fs = fundamental_system(&delta(), c(40.0, 0.0), 0.0, &fine()).unwrap();
    for g in &GOLDEN {
        let frozen = read_golden(&data_dir().join(g.file), OracleMethod::AdaptiveReference).unwrap();
        let fs = if g.smooth { &smooth_fs } else { &delta_fs };
        let b = fs.branch(g.branch);
        let d = frozen.sup_difference(&b.x, &b.y, &b.y_quasi).unwrap();
        assert!(d <= 1e-6, "{}: {d}", g.file);
    }
}

#[test]
fn adaptive_reference_agrees_with_closed_form_on_free_case() {
    let cs = free();
    let xs: Vec<f64> = (0..=64).map(|k| std::f64::consts::PI * k as f64 / 64.0).collect();
    for br in [Branch::Plus, Branch::Minus] {
        let r = adaptive_reference(&cs, c(5.0, 0.0), br, br.anchor(HalfPlane::Upper), 1e-10, &xs).unwrap();
        let f = constant_closed_form(1.0, c(5.0, 0.0), cs.interval(), br, &xs).unwrap();
        let d = f.sup_difference(&xs, &r.y, &r.y_quasi).unwrap();
        assert!(d <= 1e-6 && d <= 100.0 * r.est_error.max(1e-10), "{d} vs est {}", r.est_error);
    }
}

#[test]
fn delta_oracle_with_zero_strength_is_closed_form() {
    let cs = free();
    let xs: Vec<f64> = (0..=32).map(|k| std::f64::consts::PI * k as f64 / 32.0).collect();
    for br in [Branch::Plus, Branch::Minus] {
        for anchor in [Endpoint::Left, Endpoint::Right] {
            let d = transfer_matrix_delta(c(0.0, 0.0), 1.0, c(5.0, 0.0), cs.interval(), br, anchor, &xs).unwrap();
            let f = constant_closed_form(1.0, c(5.0, 0.0), cs.interval(), br, &xs).unwrap();
            assert!(f.sup_difference(&xs, &d.y, &d.y_quasi).unwrap() <= 1e-12);
        }
    }
}

#[test]
fn oracle_wronskian_is_constant() {
    // W_t e^{-F} with F = P - ln(rho / rho(a)) / 2 equals
    // (y+ yq- - y- yq+) e^{-P} / sqrt(rho(a)) in x-variable quantities.
    let cs = smooth();
    let xs = golden_abscissae();
    let lam = c(30.0, 3.0);
    let plus = adaptive_reference(&cs, lam, Branch::Plus, Endpoint::Right, 1e-13, &xs).unwrap();
    let minus = adaptive_reference(&cs, lam, Branch::Minus, Endpoint::Left, 1e-13, &xs).unwrap();
    let w: Vec<Complex64> = (0..xs.len())
        .map(|k| (plus.y[k] * minus.y_quasi[k] - minus.y[k] * plus.y_quasi[k]) * (-cs.big_p(xs[k])).exp())
        .collect();
    let defect = w.iter().map(|v| (v - w[0]).norm()).fold(0.0, f64::max) / w[0].norm();
    assert!(defect <= 1e-8, "{defect}");
}

#[test]
fn mollified_steps_converge_to_the_delta_oracle() {
    // u_eps = 1 + tanh((x - 1/2) / eps), rho' u_eps = 0 since rho = 1.
    let lam = c(20.0, 0.0);
    let xs = golden_abscissae();
    let far: Vec<f64> = xs.iter().copied().filter(|x| (x - 0.5).abs() >= 0.25).collect();
    let exact = transfer_matrix_delta(c(2.0, 0.0), 0.5, lam, delta().interval(), Branch::Minus, Endpoint::Left, &far).unwrap();
    let mut prev = f64::INFINITY;
    for eps in [1e-2, 1e-3] {
        let u = Profile::custom(move |x: f64, _side: Side| c(1.0 + ((x - 0.5) / eps).tanh(), 0.0), vec![]);
        let base = 1.0 + (-0.5f64 / eps).tanh();
        let cs = set(1.0, Profile::zero(), u, Profile::constant(1.0), Profile::zero());
        let r = adaptive_reference(&cs, lam, Branch::Minus, Endpoint::Left, 1e-12, &far).unwrap();
        // The mollified potential carries u(a) = base instead of 0; h_x subtracts it.
        assert!(base.abs() < 1e-12);
        let d = exact.sup_difference(&far, &r.y, &r.y_quasi).unwrap();
        assert!(d < prev, "eps = {eps}: {d} vs {prev}");
        prev = d;
    }
    assert!(prev < 0.05, "{prev}");
}
