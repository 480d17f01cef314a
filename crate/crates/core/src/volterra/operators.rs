use num_complex::Complex64;

use super::filon::CellWeights;
use super::{Direction, HalfPlane, SpectralPoint};
use crate::coefficients::Side;
use crate::error::{Error, Result};
use crate::liouville::TransformedSystem;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Two grid functions `(z1, z2)` on the nodes of a transformed system.
#[derive(Clone, Debug, PartialEq)]
pub struct Pair {
    pub z1: Vec<Complex64>,
    pub z2: Vec<Complex64>,
}

impl Pair {
    pub fn constant(n: usize, v: Complex64) -> Self {
        Pair { z1: vec![v; n], z2: vec![v; n] }
    }

    pub fn len(&self) -> usize {
        self.z1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z1.is_empty()
    }

    pub fn sup_norm(&self) -> f64 {
        self.z1.iter().chain(&self.z2).map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// `A + B` (forward) or `A1 + B1` (backward) discretised on the grid of a
/// transformed system. The smooth kernel is integrated by the trapezoid rule,
/// the oscillatory one by the Filon-trapezoid rule.
#[derive(Clone, Debug)]
pub struct KernelOperator<'a> {
    ts: &'a TransformedSystem,
    direction: Direction,
    /// `eps / mu`, `eps = +1` forward and `-1` backward.
    g_scale: Complex64,
    eps: f64,
    weights: Vec<CellWeights>,
}

impl<'a> KernelOperator<'a> {
    pub fn new(ts: &'a TransformedSystem, sp: &SpectralPoint, direction: Direction) -> Result<Self> {
        if sp.halfplane() != HalfPlane::Upper {
            return Err(Error::HalfPlane("kernel operators are defined in the upper convention".into()));
        }
        let mu = sp.mu();
        if -2.0 * mu.re * ts.h > 2.0 * sp.r() * ts.h + 50.0 {
            return Err(Error::HalfPlane(format!("kernel growth e^{{{}}} is out of range", -2.0 * mu.re * ts.h)));
        }
        let eps = match direction {
            Direction::Forward => 1.0,
            Direction::Backward => -1.0,
        };
        let weights = ts.t.windows(2).map(|c| CellWeights::new(mu, c[1] - c[0])).collect();
        Ok(KernelOperator { ts, direction, g_scale: eps / mu, eps, weights })
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn len(&self) -> usize {
        self.weights.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Smooth and oscillatory integrands (without the `eps / 2` factor) at
    /// node `k` approached from `side`.
    #[inline]
    fn integrands(&self, z: &Pair, k: usize, side: Side) -> (Complex64, Complex64) {
        let s = self.ts.sigma.at(k, side);
        let d = self.ts.f.at(k, side) - s;
        let gm = self.ts.g.at(k, side) * self.g_scale;
        let (z1, z2) = (z.z1[k], z.z2[k]);
        ((s + gm) * z1 + d * z2, (s - gm) * z1 - d * z2)
    }

    /// Scalar parts `a = (A z)_1 = (A z)_2` and `b = (B z)_1 = -(B z)_2`.
    fn parts(&self, z: &Pair, a: &mut [Complex64], b: &mut [Complex64]) {
        let n = self.len();
        assert_eq!(z.len(), n, "grid function length mismatch");
        let half = 0.5 * self.eps;
        match self.direction {
            Direction::Forward => {
                a[0] = ZERO;
                b[0] = ZERO;
                let mut start = self.integrands(z, 0, Side::Right);
                for k in 0..n - 1 {
                    let w = &self.weights[k];
                    let end = self.integrands(z, k + 1, Side::Left);
                    let dt = self.ts.t[k + 1] - self.ts.t[k];
                    a[k + 1] = a[k] + (start.0 + end.0) * (half * 0.5 * dt);
                    b[k + 1] = w.decay * b[k] + (w.near * end.1 + w.far * start.1) * half;
                    start = if self.ts.sigma.left[k + 1] == self.ts.sigma.right[k + 1]
                        && self.ts.f.left[k + 1] == self.ts.f.right[k + 1]
                    {
                        end
                    } else {
                        self.integrands(z, k + 1, Side::Right)
                    };
                }
            }
            Direction::Backward => {
                a[n - 1] = ZERO;
                b[n - 1] = ZERO;
                let mut end = self.integrands(z, n - 1, Side::Left);
                for k in (0..n - 1).rev() {
                    let w = &self.weights[k];
                    let start = self.integrands(z, k, Side::Right);
                    let dt = self.ts.t[k + 1] - self.ts.t[k];
                    a[k] = a[k + 1] + (start.0 + end.0) * (half * 0.5 * dt);
                    b[k] = w.decay * b[k + 1] + (w.near * start.1 + w.far * end.1) * half;
                    end = if self.ts.sigma.left[k] == self.ts.sigma.right[k] && self.ts.f.left[k] == self.ts.f.right[k] {
                        start
                    } else {
                        self.integrands(z, k, Side::Left)
                    };
                }
            }
        }
    }

    /// `out = (A + B) z`
    pub fn apply_sum_into(&self, z: &Pair, out: &mut Pair) {
        let (a, b) = (&mut out.z1, &mut out.z2);
        self.parts(z, a, b);
        for k in 0..a.len() {
            let (x, y) = (a[k], b[k]);
            a[k] = x + y;
            b[k] = x - y;
        }
    }

    pub fn apply_sum(&self, z: &Pair) -> Pair {
        let mut out = Pair::constant(self.len(), ZERO);
        self.apply_sum_into(z, &mut out);
        out
    }

    /// `(A z, B z)` separately.
    pub fn apply_split(&self, z: &Pair) -> (Pair, Pair) {
        let n = self.len();
        let mut a = vec![ZERO; n];
        let mut b = vec![ZERO; n];
        self.parts(z, &mut a, &mut b);
        let minus_b = b.iter().map(|v| -v).collect();
        (Pair { z1: a.clone(), z2: a }, Pair { z1: b, z2: minus_b })
    }
}

/// `A z`: smooth kernel, integrals over `[0, t]`.
pub fn apply_a(ts: &TransformedSystem, sp: &SpectralPoint, z: &Pair) -> Result<Pair> {
    Ok(KernelOperator::new(ts, sp, Direction::Forward)?.apply_split(z).0)
}

/// `B z`: kernel `e^{-2 mu (t - xi)}`, integrals over `[0, t]`.
pub fn apply_b(ts: &TransformedSystem, sp: &SpectralPoint, z: &Pair) -> Result<Pair> {
    Ok(KernelOperator::new(ts, sp, Direction::Forward)?.apply_split(z).1)
}

/// `A1 z`: smooth kernel, integrals over `[t, h]`.
pub fn apply_a1(ts: &TransformedSystem, sp: &SpectralPoint, z: &Pair) -> Result<Pair> {
    Ok(KernelOperator::new(ts, sp, Direction::Backward)?.apply_split(z).0)
}

/// `B1 z`: kernel `e^{2 mu (t - xi)}`, integrals over `[t, h]`.
pub fn apply_b1(ts: &TransformedSystem, sp: &SpectralPoint, z: &Pair) -> Result<Pair> {
    Ok(KernelOperator::new(ts, sp, Direction::Backward)?.apply_split(z).1)
}

/// `int_0^t e^{-2 mu (t - xi)} psi(xi) d xi` (forward) or
/// `int_t^h e^{2 mu (t - xi)} psi(xi) d xi` (backward) at every node, with
/// `psi` piecewise linear between the nodes.
pub fn oscillatory_integral(t: &[f64], psi: &[Complex64], mu: Complex64, direction: Direction) -> Vec<Complex64> {
    assert_eq!(t.len(), psi.len(), "grid and samples differ in length");
    let n = t.len();
    let mut out = vec![ZERO; n];
    match direction {
        Direction::Forward => {
            for k in 0..n.saturating_sub(1) {
                let w = CellWeights::new(mu, t[k + 1] - t[k]);
                out[k + 1] = w.decay * out[k] + w.near * psi[k + 1] + w.far * psi[k];
            }
        }
        Direction::Backward => {
            for k in (0..n.saturating_sub(1)).rev() {
                let w = CellWeights::new(mu, t[k + 1] - t[k]);
                out[k] = w.decay * out[k + 1] + w.near * psi[k] + w.far * psi[k + 1];
            }
        }
    }
    out
}
