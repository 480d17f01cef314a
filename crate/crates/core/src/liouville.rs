//! Change of variables `t = int_a^x sqrt(rho)` and the coefficients of the
//! transformed first-order system in `t`.

use num_complex::Complex64;

use crate::coefficients::{aligned_grid, CoefficientSet, Side};
use crate::error::{Error, Result};
use crate::quadrature::{gauss5, gauss5_real};

/// Minimum node count for a map grid; breakpoints are always added as nodes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Resolution {
    pub min_points: usize,
}

impl Resolution {
    pub fn new(min_points: usize) -> Self {
        Resolution { min_points }
    }

    /// Uniform cells before breakpoint insertion: the next power of two with
    /// at least `min_points` nodes. Coarser power-of-two grids are therefore
    /// always node subsets of finer ones.
    pub fn cells(&self) -> usize {
        (self.min_points.max(2) - 1).next_power_of_two()
    }
}

#[derive(Clone, Debug)]
pub struct LiouvilleMap {
    x: Vec<f64>,
    t: Vec<f64>,
    h: f64,
    sqrt_rho: Vec<f64>,
    cs_a: f64,
}

impl LiouvilleMap {
    pub fn x_grid(&self) -> &[f64] {
        &self.x
    }

    pub fn t_grid(&self) -> &[f64] {
        &self.t
    }

    /// Total transformed length `h = int_a^b sqrt(rho)`.
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// `sqrt(rho)` at the grid nodes.
    pub fn sqrt_rho(&self) -> &[f64] {
        &self.sqrt_rho
    }

    /// `t(x)` for arbitrary `x` in `[a, b]`.
    pub fn t_of_x(&self, cs: &CoefficientSet, x: f64) -> f64 {
        if x <= self.cs_a {
            return 0.0;
        }
        let i = self.x.partition_point(|&s| s <= x).saturating_sub(1).min(self.x.len() - 1);
        if self.x[i] == x {
            return self.t[i];
        }
        self.t[i] + gauss5_real(|s| cs.rho(s).sqrt(), self.x[i], x)
    }

    /// Monotone piecewise-linear inverse `x(t)`.
    pub fn x_of_t(&self, t: f64) -> f64 {
        let n = self.t.len();
        if t <= 0.0 {
            return self.x[0];
        }
        if t >= self.h {
            return self.x[n - 1];
        }
        let i = self.t.partition_point(|&s| s <= t).saturating_sub(1).min(n - 2);
        let w = (t - self.t[i]) / (self.t[i + 1] - self.t[i]);
        self.x[i] + w * (self.x[i + 1] - self.x[i])
    }

    /// Largest `|x(t(x)) - x|` over the grid nodes.
    pub fn round_trip_defect(&self) -> f64 {
        self.x.iter().zip(&self.t).map(|(&x, &t)| (self.x_of_t(t) - x).abs()).fold(0.0, f64::max)
    }
}

/// Build the `x <-> t` map on a breakpoint-aligned grid.
pub fn build_map(cs: &CoefficientSet, resolution: Resolution) -> Result<LiouvilleMap> {
    if resolution.min_points < 16 {
        return Err(Error::Grid(format!("resolution must be >= 16 points, got {}", resolution.min_points)));
    }
    let x = aligned_grid(cs.interval(), resolution.cells(), cs.breakpoints());
    let mut t = Vec::with_capacity(x.len());
    let mut acc = 0.0;
    t.push(0.0);
    for cell in x.windows(2) {
        acc += gauss5_real(|s| cs.rho(s).sqrt(), cell[0], cell[1]);
        t.push(acc);
    }
    if !acc.is_finite() || acc <= 0.0 {
        return Err(Error::Integrability { quantity: "sqrt(rho)", value: acc });
    }
    let sqrt_rho = x.iter().map(|&s| cs.rho(s).sqrt()).collect();
    Ok(LiouvilleMap { h: acc, x, t, sqrt_rho, cs_a: cs.interval().a() })
}

/// Node samples that may be discontinuous: `left[k]` and `right[k]` are the
/// one-sided limits at node `k`. They coincide away from breakpoints.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoSided {
    pub left: Vec<Complex64>,
    pub right: Vec<Complex64>,
}

impl TwoSided {
    fn from_fn<F: Fn(usize, Side) -> Complex64>(n: usize, f: F) -> Self {
        TwoSided { left: (0..n).map(|k| f(k, Side::Left)).collect(), right: (0..n).map(|k| f(k, Side::Right)).collect() }
    }

    fn zip_with<F: Fn(Complex64, Complex64) -> Complex64>(&self, other: &TwoSided, f: F) -> Self {
        TwoSided {
            left: self.left.iter().zip(&other.left).map(|(&a, &b)| f(a, b)).collect(),
            right: self.right.iter().zip(&other.right).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.left.len()
    }

    pub fn is_empty(&self) -> bool {
        self.left.is_empty()
    }

    pub fn at(&self, k: usize, side: Side) -> Complex64 {
        match side {
            Side::Left => self.left[k],
            Side::Right => self.right[k],
        }
    }

    /// Values at the start and end of cell `k` (`[t_k, t_{k+1}]`).
    pub fn cell(&self, k: usize) -> (Complex64, Complex64) {
        (self.right[k], self.left[k + 1])
    }

    pub fn sup_norm(&self) -> f64 {
        self.left.iter().chain(&self.right).map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Coefficients of the transformed system on the map grid.
#[derive(Clone, Debug)]
pub struct TransformedSystem {
    pub x: Vec<f64>,
    pub t: Vec<f64>,
    pub h: f64,
    /// `p / sqrt(rho) - rho'_t / (2 rho)` with `rho'_t = rho'_x / sqrt(rho)`.
    pub f: TwoSided,
    /// Antiderivative of `q / rho` in `t`, `sigma(0) = 0`.
    pub sigma: TwoSided,
    /// `f sigma - sigma^2`
    pub g: TwoSided,
    /// `F(t) = int_0^t f`, trapezoid in `t`.
    pub big_f: Vec<Complex64>,
    /// `int_a^x q / sqrt(rho) dx`, computed in `x`.
    pub h_x: TwoSided,
    /// `P(x)` at the nodes.
    pub big_p: Vec<Complex64>,
    pub rho: Vec<f64>,
}

/// `sigma(t) = u/sqrt(rho) - u(a)/sqrt(rho(a)) + int_a^x rho' u / (2 rho^{3/2})`.
///
/// Only point values of `u` enter, plus an absolutely convergent correction
/// integral evaluated by Gauss-Legendre on breakpoint-aligned cells.
pub fn compute_sigma(cs: &CoefficientSet, map: &LiouvilleMap) -> TwoSided {
    let x = map.x_grid();
    let n = x.len();
    let integrand = |s: f64| cs.rho_prime(s, Side::Left) * cs.u(s, Side::Left) / (2.0 * cs.rho(s).powf(1.5));
    let mut correction = Vec::with_capacity(n);
    let mut acc = Complex64::new(0.0, 0.0);
    correction.push(acc);
    for cell in x.windows(2) {
        acc += gauss5(integrand, cell[0], cell[1]);
        correction.push(acc);
    }
    let base = cs.u(x[0], Side::Right) / cs.rho(x[0]).sqrt();
    TwoSided::from_fn(n, |k, side| {
        let side = clamp_side(k, n, side);
        cs.u(x[k], side) / map.sqrt_rho()[k] - base + correction[k]
    })
}

fn clamp_side(k: usize, n: usize, side: Side) -> Side {
    if k == 0 {
        Side::Right
    } else if k == n - 1 {
        Side::Left
    } else {
        side
    }
}

/// Cumulative trapezoid of two-sided samples over `nodes`.
fn cumulative_trapezoid(nodes: &[f64], values: &TwoSided) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(nodes.len());
    let mut acc = Complex64::new(0.0, 0.0);
    out.push(acc);
    for k in 0..nodes.len() - 1 {
        let (lo, hi) = values.cell(k);
        acc += (lo + hi) * (0.5 * (nodes[k + 1] - nodes[k]));
        out.push(acc);
    }
    out
}

pub fn transform(cs: &CoefficientSet, map: &LiouvilleMap) -> Result<TransformedSystem> {
    let x = map.x_grid().to_vec();
    let t = map.t_grid().to_vec();
    let n = x.len();
    let rho: Vec<f64> = x.iter().map(|&s| cs.rho(s)).collect();

    let f = TwoSided::from_fn(n, |k, side| {
        let side = clamp_side(k, n, side);
        let sr = rho[k].sqrt();
        cs.p(x[k], side) / sr - Complex64::new(0.5 * cs.rho_prime(x[k], side) / (rho[k] * sr), 0.0)
    });
    let sigma = compute_sigma(cs, map);
    let g = f.zip_with(&sigma, |f, s| f * s - s * s);
    let big_f = cumulative_trapezoid(&t, &f);

    // h_x by the x-variable route: boundary term plus trapezoid of the correction.
    let corr = TwoSided::from_fn(n, |k, side| {
        let side = clamp_side(k, n, side);
        cs.rho_prime(x[k], side) * cs.u(x[k], side) / (2.0 * rho[k].powf(1.5))
    });
    let corr_int = cumulative_trapezoid(&x, &corr);
    let base = cs.u(x[0], Side::Right) / rho[0].sqrt();
    let h_x = TwoSided::from_fn(n, |k, side| {
        let side = clamp_side(k, n, side);
        cs.u(x[k], side) / rho[k].sqrt() - base + corr_int[k]
    });

    let big_p: Vec<Complex64> = x.iter().map(|&s| cs.big_p(s)).collect();

    for (name, v) in [("f", f.sup_norm()), ("sigma", sigma.sup_norm()), ("g", g.sup_norm())] {
        if !v.is_finite() {
            return Err(Error::Integrability { quantity: name, value: v });
        }
    }
    if big_f.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::Integrability { quantity: "F", value: f64::INFINITY });
    }

    Ok(TransformedSystem { h: map.h(), x, t, f, sigma, g, big_f, h_x, big_p, rho })
}

impl TransformedSystem {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// `max |sigma(t(x)) - h_x(x)|` over nodes and both one-sided limits.
    pub fn sigma_consistency_defect(&self) -> f64 {
        let left = self.sigma.left.iter().zip(&self.h_x.left);
        let right = self.sigma.right.iter().zip(&self.h_x.right);
        left.chain(right).map(|(s, h)| (s - h).norm()).fold(0.0, f64::max)
    }

    /// `max |F/2 - P/2 + ln(rho)/4 - ln(rho(a))/4|` over the grid.
    pub fn identity_defect(&self) -> f64 {
        let ln_rho_a = self.rho[0].ln();
        (0..self.len())
            .map(|k| (0.5 * self.big_f[k] - 0.5 * self.big_p[k] + 0.25 * (self.rho[k].ln() - ln_rho_a)).norm())
            .fold(0.0, f64::max)
    }

    /// `v = |f| + |g| + |sigma|` per cell endpoint, integrated by trapezoid.
    pub fn envelope_integral(&self) -> f64 {
        let v = |k: usize, side: Side| self.f.at(k, side).norm() + self.g.at(k, side).norm() + self.sigma.at(k, side).norm();
        (0..self.len() - 1)
            .map(|k| 0.5 * (self.t[k + 1] - self.t[k]) * (v(k, Side::Right) + v(k + 1, Side::Left)))
            .sum()
    }
}
