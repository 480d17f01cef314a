use std::ffi::{CStr, CString};
use std::ptr;

use singular_sl_ffi::*;

const FREE: &str = r#"{"interval":[0,3.141592653589793],
  "rho":{"kind":"expr","name":"constant","params":{"value":1}},
  "rho_prime":{"kind":"expr","name":"constant","params":{"value":0}}}"#;

const DELTA: &str = r#"{"interval":[0,1],
  "u":{"kind":"expr","name":"step","params":{"x0":0.5,"height":2.0}},
  "rho":{"kind":"expr","name":"constant","params":{"value":1}},
  "rho_prime":{"kind":"expr","name":"constant","params":{"value":0}}}"#;

fn problem(json: &str) -> *mut SslProblem {
    let text = CString::new(json).unwrap();
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { ssl_problem_from_json(text.as_ptr(), &mut p) }, SslStatus::Ok);
    assert!(!p.is_null());
    p
}

fn last_error() -> String {
    let p = ssl_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn free_problem_round_trip() {
    let p = problem(FREE);
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(ssl_solve(p, 5.0, 0.0, 0.0, SslHalfPlane::Upper, ptr::null(), &mut s), SslStatus::Ok);
        assert!(ssl_last_error().is_null());
        let n = ssl_system_len(s);
        assert_eq!(n, 513);
        let (mut t, mut y, mut yq) = (vec![0.0; n], vec![0.0; 2 * n], vec![0.0; 2 * n]);
        assert_eq!(ssl_system_copy_grid(s, ptr::null_mut(), t.as_mut_ptr(), n), SslStatus::Ok);
        assert_eq!(ssl_system_copy_branch(s, SslBranch::Plus, y.as_mut_ptr(), yq.as_mut_ptr(), n), SslStatus::Ok);
        for k in 0..n {
            assert!((y[2 * k] - (5.0 * t[k]).cos()).abs() < 1e-12);
            assert!((y[2 * k + 1] - (5.0 * t[k]).sin()).abs() < 1e-12);
        }
        let mut phi = vec![1.0; 2 * n];
        assert_eq!(ssl_system_copy_remainders(s, SslBranch::Minus, phi.as_mut_ptr(), ptr::null_mut(), n), SslStatus::Ok);
        assert!(phi.iter().all(|v| v.abs() < 1e-12));
        let mut w = f64::NAN;
        assert_eq!(ssl_system_wronskian_defect(s, &mut w), SslStatus::Ok);
        assert!(w < 1e-10);
        ssl_system_free(s);
        ssl_problem_free(p);
    }
}

#[test]
fn delta_problem_with_custom_config() {
    let p = problem(DELTA);
    let cfg = SslConfig { n_min: 4096, ..ssl_config_default() };
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(ssl_solve(p, 40.0, -2.0, 2.0, SslHalfPlane::Lower, &cfg, &mut s), SslStatus::Ok);
        assert_eq!(ssl_system_len(s), 4097);
        let mut w = 0.0;
        ssl_system_wronskian_defect(s, &mut w);
        assert!(w <= 1e-6);
        ssl_system_free(s);
        ssl_problem_free(p);
    }
}

#[test]
fn errors_map_to_status_codes() {
    let bad = CString::new(r#"{"interval":[0,1]}"#).unwrap();
    let mut p = ptr::null_mut();
    unsafe {
        assert_eq!(ssl_problem_from_json(bad.as_ptr(), &mut p), SslStatus::Spec);
        assert!(p.is_null());
        assert!(last_error().starts_with("SpecError"));
        assert_eq!(ssl_problem_from_json(ptr::null(), &mut p), SslStatus::InvalidArgument);
    }

    let p = problem(FREE);
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(ssl_solve(p, 0.5, 0.0, 0.0, SslHalfPlane::Upper, ptr::null(), &mut s), SslStatus::HalfPlane);
        assert!(s.is_null());
        assert!(last_error().contains("mu_min"));
        assert_eq!(ssl_solve(p, 5.0, -3.0, 1.0, SslHalfPlane::Upper, ptr::null(), &mut s), SslStatus::HalfPlane);
        let cfg = SslConfig { n_max: 1, ..ssl_config_default() };
        assert_eq!(ssl_solve(ptr::null(), 5.0, 0.0, 0.0, SslHalfPlane::Upper, &cfg, &mut s), SslStatus::InvalidArgument);

        assert_eq!(ssl_solve(p, 5.0, 0.0, 0.0, SslHalfPlane::Upper, ptr::null(), &mut s), SslStatus::Ok);
        let mut short = vec![0.0; 4];
        assert_eq!(ssl_system_copy_grid(s, short.as_mut_ptr(), ptr::null_mut(), 2), SslStatus::InvalidArgument);
        assert_eq!(ssl_system_len(ptr::null()), 0);
        ssl_system_free(s);
        ssl_problem_free(p);
        ssl_problem_free(ptr::null_mut());
        ssl_system_free(ptr::null_mut());
    }
}

#[test]
fn header_declares_the_interface() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/singular_sl.h")).unwrap();
    for name in [
        "SslProblem", "SslSystem", "SSL_STATUS_OK", "ssl_problem_from_json", "ssl_problem_free", "ssl_solve",
        "ssl_system_copy_branch", "ssl_system_copy_grid", "ssl_system_copy_remainders", "ssl_system_free", "ssl_last_error",
    ] {
        assert!(header.contains(name), "{name}");
    }
}

/// Compile and run a C client against the generated header and shared library.
#[test]
fn c_client_links_and_runs() {
    use std::path::PathBuf;
    use std::process::Command;

    let Some(cc) = ["cc", "gcc", "clang"].into_iter().find(|c| Command::new(c).arg("--version").output().is_ok()) else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    // target/<profile>/deps/abi-* -> target/<profile>
    let lib_dir = std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf();
    if !lib_dir.join("libsingular_sl_ffi.so").exists() {
        eprintln!("shared library not found in {}; skipping", lib_dir.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let status = Command::new(cc)
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg("-L")
        .arg(&lib_dir)
        .args(["-lsingular_sl_ffi", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&exe).env("LD_LIBRARY_PATH", &lib_dir).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("nodes 513"));
}
