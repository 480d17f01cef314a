#![allow(dead_code)]

use std::path::PathBuf;

use singular_sl::coefficients::{CoefficientSet, IngestOptions, Interval, Primitive, Profile};
use singular_sl::volterra::IterationConfig;
use singular_sl::Complex64;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn set(b: f64, p: Profile, u: Profile, rho: Profile, rho_prime: Profile) -> CoefficientSet {
    CoefficientSet::new(Interval::new(0.0, b).unwrap(), p, u, rho, rho_prime, &[], &IngestOptions::default()).unwrap()
}

/// `p = u = 0`, `rho = 1` on `[0, pi]`.
pub fn free() -> CoefficientSet {
    set(std::f64::consts::PI, Profile::zero(), Profile::zero(), Profile::constant(1.0), Profile::zero())
}

/// `p = u = 0`, `rho = 4` on `[0, 1]`.
pub fn constant_rho() -> CoefficientSet {
    set(1.0, Profile::zero(), Profile::zero(), Profile::constant(4.0), Profile::zero())
}

/// `p = sin x`, `u = cos x - 1`, `rho = e^x` on `[0, 1]`.
pub fn smooth() -> CoefficientSet {
    let p = Profile::expr(Primitive::Sin { amplitude: 1.0, frequency: 1.0, phase: 0.0, offset: 0.0 });
    let u = Profile::expr(Primitive::Cos { amplitude: 1.0, frequency: 1.0, phase: 0.0, offset: -1.0 });
    let e = Profile::expr(Primitive::Exp { amplitude: 1.0, rate: 1.0, offset: 0.0 });
    set(1.0, p, u, e.clone(), e)
}

/// `q = 2 delta(x - 1/2)` through a step in `u`, `rho = 1`, `p = 0` on `[0, 1]`.
pub fn delta() -> CoefficientSet {
    let u = Profile::expr(Primitive::Step { x0: 0.5, height: 2.0, base: 0.0 });
    set(1.0, Profile::zero(), u, Profile::constant(1.0), Profile::zero())
}

/// Grid fine enough for 1e-6 absolute agreement with the references.
pub fn fine() -> IterationConfig {
    IterationConfig { n_min: 1 << 16, ..Default::default() }
}

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("data")
}

pub fn specs_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("..").join("..").join("specs")
}

/// 257 uniform abscissae on `[0, 1]`; always nodes of power-of-two grids.
pub fn golden_abscissae() -> Vec<f64> {
    (0..=256).map(|k| k as f64 / 256.0).collect()
}
