//! Volterra formulation of the transformed system and its Picard solution.
//!
//! With `mu = -i lambda` the solution is written `y = e^{mu t} z1`,
//! `y^[1] = mu e^{mu t} z2` (forward sweep from `t = 0`) or
//! `y = e^{-mu t} z1`, `y^[1] = -mu e^{-mu t} z2` (backward sweep from
//! `t = h`). In both cases `z = (1, 1) + (A + B) z` where `A` has a smooth
//! kernel and `B` carries the factor `e^{-+2 mu (t - xi)}`.

mod filon;
mod operators;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::liouville::TransformedSystem;

pub use operators::{apply_a, apply_a1, apply_b, apply_b1, oscillatory_integral, KernelOperator, Pair};

pub const DEFAULT_MU_MIN: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum HalfPlane {
    /// `Im lambda >= -r`
    Upper,
    /// `Im lambda <= r`
    Lower,
}

/// Integration direction of a Volterra sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Integrals over `[0, t]`; solution anchored at `t = 0`.
    Forward,
    /// Integrals over `[t, h]`; solution anchored at `t = h`.
    Backward,
}

/// One of the two solutions `y_+ ~ e^{+i lambda t}` and `y_- ~ e^{-i lambda t}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    /// Sweep used in the upper convention: `e^{-i lambda t} = e^{mu t}` is
    /// built forward, `e^{+i lambda t} = e^{-mu t}` backward.
    pub fn direction(self) -> Direction {
        match self {
            Branch::Plus => Direction::Backward,
            Branch::Minus => Direction::Forward,
        }
    }

    /// Endpoint where the branch equals its leading term. The lower
    /// convention swaps the sweeps and therefore the anchors.
    pub fn anchor(self, halfplane: HalfPlane) -> Endpoint {
        match (self.direction(), halfplane) {
            (Direction::Forward, HalfPlane::Upper) | (Direction::Backward, HalfPlane::Lower) => Endpoint::Left,
            _ => Endpoint::Right,
        }
    }

    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }

    pub fn other(self) -> Branch {
        match self {
            Branch::Plus => Branch::Minus,
            Branch::Minus => Branch::Plus,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Branch::Plus => "plus",
            Branch::Minus => "minus",
        }
    }
}

/// Interval endpoint `a` (left) or `b` (right).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Endpoint {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralPoint {
    lambda: Complex64,
    mu: Complex64,
    halfplane: HalfPlane,
    r: f64,
}

impl SpectralPoint {
    pub fn new(lambda: Complex64, r: f64, halfplane: HalfPlane) -> Result<Self> {
        Self::with_mu_min(lambda, r, halfplane, DEFAULT_MU_MIN)
    }

    pub fn with_mu_min(lambda: Complex64, r: f64, halfplane: HalfPlane, mu_min: f64) -> Result<Self> {
        if !(r >= 0.0) || !r.is_finite() {
            return Err(Error::Config(format!("r must be a finite nonnegative number, got {r}")));
        }
        if !lambda.re.is_finite() || !lambda.im.is_finite() {
            return Err(Error::Config(format!("lambda must be finite, got {lambda}")));
        }
        let mu = Complex64::new(0.0, -1.0) * lambda;
        if mu.norm() < mu_min {
            return Err(Error::MuGuard { mu_abs: mu.norm(), mu_min });
        }
        match halfplane {
            HalfPlane::Upper if lambda.im < -r => {
                return Err(Error::HalfPlane(format!("Im lambda = {} < -r = {}", lambda.im, -r)));
            }
            HalfPlane::Lower if lambda.im > r => {
                return Err(Error::HalfPlane(format!("Im lambda = {} > r = {}", lambda.im, r)));
            }
            _ => {}
        }
        Ok(SpectralPoint { lambda, mu, halfplane, r })
    }

    pub fn lambda(&self) -> Complex64 {
        self.lambda
    }

    /// `mu = -i lambda`
    pub fn mu(&self) -> Complex64 {
        self.mu
    }

    pub fn halfplane(&self) -> HalfPlane {
        self.halfplane
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// Largest `|e^{-2 mu s}|`, `0 <= s <= h`: the kernel envelope constant.
    pub fn envelope_constant(&self, h: f64) -> f64 {
        (-2.0 * self.mu.re * h).exp().max(1.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IterationConfig {
    /// Relative sup-norm stopping tolerance.
    pub tol: f64,
    pub n_max: usize,
    /// Grid points per wavelength of `e^{2 mu t}`.
    pub kappa: f64,
    pub n_min: usize,
}

impl Default for IterationConfig {
    fn default() -> Self {
        IterationConfig { tol: 1e-10, n_max: 200, kappa: 8.0, n_min: 512 }
    }
}

impl IterationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::Config(format!("tol must be positive, got {}", self.tol)));
        }
        if self.n_max < 1 {
            return Err(Error::Config("n_max must be >= 1".into()));
        }
        if !(self.kappa >= 4.0) {
            return Err(Error::Config(format!("kappa must be >= 4, got {}", self.kappa)));
        }
        if self.n_min < 16 {
            return Err(Error::Config(format!("n_min must be >= 16, got {}", self.n_min)));
        }
        Ok(())
    }

    /// `max(n_min, ceil(kappa (|lambda| h / pi + 1)))`
    pub fn required_points(&self, lambda: Complex64, h: f64) -> usize {
        let osc = (self.kappa * (lambda.norm() * h / std::f64::consts::PI + 1.0)).ceil() as usize;
        self.n_min.max(osc)
    }
}

#[derive(Clone, Debug)]
pub struct IterationState {
    pub z1: Vec<Complex64>,
    pub z2: Vec<Complex64>,
    pub direction: Direction,
    pub iterations_used: usize,
    pub final_increment: f64,
    /// Factorial tail bound on the Neumann series beyond the last sweep.
    pub apriori_tail_bound: f64,
    /// `sup |z - (1,1) - (A+B) z|` after convergence.
    pub residual: f64,
    pub grid_points: usize,
}

/// Diagnostics record exported as JSON.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IterationDiagnostics {
    pub iterations: usize,
    pub final_increment: f64,
    pub apriori_tail_bound: f64,
    pub grid_points: usize,
    pub residual: f64,
}

impl IterationState {
    pub fn diagnostics(&self) -> IterationDiagnostics {
        IterationDiagnostics {
            iterations: self.iterations_used,
            final_increment: self.final_increment,
            apriori_tail_bound: self.apriori_tail_bound,
            grid_points: self.grid_points,
            residual: self.residual,
        }
    }
}

/// `2 (2C)^n F_h^n / n!`, the norm bound on the n-th power of a 2x2 Volterra
/// operator whose kernel entries are bounded by `C v(xi)` with `int v = F_h`.
pub fn apriori_bound(c: f64, f_h: f64, n: usize) -> f64 {
    if c == 0.0 || f_h == 0.0 {
        return 0.0;
    }
    let ln_fact: f64 = (2..=n).map(|k| (k as f64).ln()).sum();
    (2f64.ln() + n as f64 * (2.0 * c * f_h).ln() - ln_fact).exp()
}

/// `sum_{k > n} apriori_bound(c, f_h, k)`
pub fn apriori_tail(c: f64, f_h: f64, n: usize) -> f64 {
    let x = 2.0 * c * f_h;
    if x == 0.0 {
        return 0.0;
    }
    let ln_x = x.ln();
    let mut ln_term = 2f64.ln() + (1..=n + 1).map(|k| ln_x - (k as f64).ln()).sum::<f64>();
    let mut sum = 0.0;
    let mut k = n + 1;
    loop {
        let term = ln_term.exp();
        sum += term;
        if !sum.is_finite() {
            return f64::INFINITY;
        }
        if k as f64 > x && term <= 1e-17 * sum {
            return sum;
        }
        k += 1;
        ln_term += ln_x - (k as f64).ln();
    }
}

fn sup_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn sup(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// Iterate `z <- (1,1) + (A + B) z` from `z = (1,1)` until the sup-norm
/// increment falls below `tol (1 + sup |z|)`.
pub fn picard_solve(
    ts: &TransformedSystem,
    sp: &SpectralPoint,
    direction: Direction,
    cfg: &IterationConfig,
) -> Result<IterationState> {
    cfg.validate()?;
    let required = cfg.required_points(sp.lambda(), ts.h);
    if ts.len() < required {
        return Err(Error::Grid(format!(
            "grid has {} points but |lambda| = {} needs at least {}",
            ts.len(),
            sp.lambda().norm(),
            required
        )));
    }
    let op = KernelOperator::new(ts, sp, direction)?;
    let n = ts.len();
    let one = Complex64::new(1.0, 0.0);
    let mut z = Pair { z1: vec![one; n], z2: vec![one; n] };
    let mut next = Pair { z1: vec![one; n], z2: vec![one; n] };

    let c = sp.envelope_constant(ts.h);
    let f_h = ts.envelope_integral();

    for iteration in 1..=cfg.n_max {
        op.apply_sum_into(&z, &mut next);
        for k in 0..n {
            next.z1[k] += one;
            next.z2[k] += one;
        }
        let increment = sup_diff(&next.z1, &z.z1).max(sup_diff(&next.z2, &z.z2));
        std::mem::swap(&mut z, &mut next);
        let scale = sup(&z.z1).max(sup(&z.z2));
        if !increment.is_finite() || !scale.is_finite() {
            return Err(Error::NoConvergence { iterations: iteration, increment });
        }
        if increment <= cfg.tol * (1.0 + scale) {
            op.apply_sum_into(&z, &mut next);
            let residual = (0..n)
                .map(|k| (z.z1[k] - one - next.z1[k]).norm().max((z.z2[k] - one - next.z2[k]).norm()))
                .fold(0.0, f64::max);
            return Ok(IterationState {
                z1: z.z1,
                z2: z.z2,
                direction,
                iterations_used: iteration,
                final_increment: increment,
                apriori_tail_bound: apriori_tail(c, f_h, iteration),
                residual,
                grid_points: n,
            });
        }
        if iteration == cfg.n_max {
            return Err(Error::NoConvergence { iterations: iteration, increment });
        }
    }
    unreachable!("n_max >= 1 is validated")
}
