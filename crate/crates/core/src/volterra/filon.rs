//! Filon-trapezoid rule for `int e^{-2 mu s} psi`: `psi` is replaced by its
//! linear interpolant on each cell and the product with the exponential is
//! integrated in closed form, so accuracy does not degrade with `|mu| dt`.

use num_complex::Complex64;

/// `(1 - e^{-w}) / w`, stable near `w = 0`.
pub(crate) fn phi1(w: Complex64) -> Complex64 {
    if w.norm() < 0.5 {
        // sum_m (-w)^m / (m + 1)!
        let mut term = Complex64::new(1.0, 0.0);
        let mut acc = term;
        for m in 1..24 {
            term *= -w / (m as f64 + 1.0);
            acc += term;
        }
        acc
    } else {
        (1.0 - (-w).exp()) / w
    }
}

/// `(1 - e^{-w} (1 + w)) / w^2`, stable near `w = 0`.
pub(crate) fn phi2(w: Complex64) -> Complex64 {
    if w.norm() < 0.5 {
        // sum_m (-1)^m (m + 1) w^m / (m + 2)!
        let mut pow = Complex64::new(1.0, 0.0);
        let mut fact = 2.0;
        let mut acc = Complex64::new(0.5, 0.0);
        for m in 1..24 {
            pow *= -w;
            fact *= m as f64 + 2.0;
            acc += pow * ((m as f64 + 1.0) / fact);
        }
        acc
    } else {
        (1.0 - (-w).exp() * (1.0 + w)) / (w * w)
    }
}

/// Per-cell weights of `int_0^dt e^{-2 mu s} psi(s) ds` where `psi` is linear
/// with value `near` at `s = 0` and `far` at `s = dt`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct CellWeights {
    /// `e^{-2 mu dt}`, carries the running integral across the cell.
    pub decay: Complex64,
    pub near: Complex64,
    pub far: Complex64,
}

impl CellWeights {
    pub fn new(mu: Complex64, dt: f64) -> Self {
        let w = 2.0 * mu * dt;
        let p1 = phi1(w);
        let p2 = phi2(w);
        CellWeights { decay: (-w).exp(), near: (p1 - p2) * dt, far: p2 * dt }
    }
}
