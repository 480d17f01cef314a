//! Problem data for `-y'' + p y' + q y = lambda^2 rho y` on `[a, b]`.
//!
//! The potential `q` is a distribution and never appears here: it is carried
//! exclusively by its antiderivative `u`. Every profile can be evaluated with
//! a one-sided limit so that jump locations are reproduced exactly.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::{gauss5, gauss5_nodes, gauss5_real};

/// Which one-sided limit to take at a jump.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    a: f64,
    b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::Domain(format!("endpoints must be finite, got [{a}, {b}]")));
        }
        if a >= b {
            return Err(Error::Domain(format!("need a < b, got [{a}, {b}]")));
        }
        Ok(Interval { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.a && x <= self.b
    }
}

/// Closed-form building blocks accepted in problem files.
#[derive(Clone, Debug, PartialEq)]
pub enum Primitive {
    Constant { value: f64 },
    /// `sum_k coeffs[k] x^k`
    Polynomial { coeffs: Vec<f64> },
    /// `amplitude * sin(frequency x + phase) + offset`
    Sin { amplitude: f64, frequency: f64, phase: f64, offset: f64 },
    /// `amplitude * cos(frequency x + phase) + offset`
    Cos { amplitude: f64, frequency: f64, phase: f64, offset: f64 },
    /// `amplitude * exp(rate x) + offset`
    Exp { amplitude: f64, rate: f64, offset: f64 },
    /// `base + height * 1[x > x0]`, left-continuous at `x0`.
    Step { x0: f64, height: f64, base: f64 },
    /// `amplitude * frac((x - origin) / period)`, left-continuous at the teeth.
    Sawtooth { period: f64, amplitude: f64, origin: f64 },
}

impl Primitive {
    pub fn eval(&self, x: f64, side: Side) -> f64 {
        match self {
            Primitive::Constant { value } => *value,
            Primitive::Polynomial { coeffs } => coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c),
            Primitive::Sin { amplitude, frequency, phase, offset } => {
                amplitude * (frequency * x + phase).sin() + offset
            }
            Primitive::Cos { amplitude, frequency, phase, offset } => {
                amplitude * (frequency * x + phase).cos() + offset
            }
            Primitive::Exp { amplitude, rate, offset } => amplitude * (rate * x).exp() + offset,
            Primitive::Step { x0, height, base } => {
                let on = if x > *x0 {
                    true
                } else if x < *x0 {
                    false
                } else {
                    side == Side::Right
                };
                if on {
                    base + height
                } else {
                    *base
                }
            }
            Primitive::Sawtooth { period, amplitude, origin } => {
                let s = (x - origin) / period;
                let frac = s - s.floor();
                if frac == 0.0 && side == Side::Left {
                    *amplitude
                } else {
                    amplitude * frac
                }
            }
        }
    }

    /// Jump locations inside `[lo, hi]`.
    fn jumps(&self, lo: f64, hi: f64) -> Vec<f64> {
        match self {
            Primitive::Step { x0, height, .. } if *height != 0.0 && *x0 >= lo && *x0 <= hi => {
                vec![*x0]
            }
            Primitive::Sawtooth { period, amplitude, origin } if *amplitude != 0.0 => {
                let first = ((lo - origin) / period).ceil() as i64;
                let last = ((hi - origin) / period).floor() as i64;
                (first..=last).map(|k| origin + k as f64 * period).collect()
            }
            _ => Vec::new(),
        }
    }
}

/// Tabulated profile: piecewise-linear between samples.
///
/// A repeated abscissa encodes a jump (first value is the left limit, second
/// the right limit). Sample intervals that contain a registered breakpoint in
/// their interior are piecewise constant instead: the left sample value up to
/// the breakpoint and the right sample value after it.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledProfile {
    x: Vec<f64>,
    values: Vec<Complex64>,
    constant_across: Vec<f64>,
}

impl SampledProfile {
    pub fn new(x: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if x.is_empty() || x.len() != values.len() {
            return Err(Error::Spec(format!(
                "sample arrays must be non-empty and of equal length (got {} and {})",
                x.len(),
                values.len()
            )));
        }
        if x.iter().any(|v| !v.is_finite()) || values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Spec("samples must be finite".into()));
        }
        if x.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Spec("sample abscissae must be non-decreasing".into()));
        }
        if x.windows(3).any(|w| w[0] == w[1] && w[1] == w[2]) {
            return Err(Error::Spec("an abscissa may repeat at most twice".into()));
        }
        Ok(SampledProfile { x, values, constant_across: Vec::new() })
    }

    fn eval(&self, x: f64, side: Side) -> Complex64 {
        let xs = &self.x;
        let n = xs.len();
        let lo = xs.partition_point(|&s| s < x);
        let hi = xs.partition_point(|&s| s <= x);
        if lo < hi {
            return match side {
                Side::Left => self.values[lo],
                Side::Right => self.values[hi - 1],
            };
        }
        if lo == 0 {
            return self.values[0];
        }
        if lo == n {
            return self.values[n - 1];
        }
        let i = lo - 1;
        let (x0, x1) = (xs[i], xs[i + 1]);
        if let Some(&c) = self.constant_across.iter().find(|&&c| c > x0 && c < x1) {
            let right = x > c || (x == c && side == Side::Right);
            return if right { self.values[i + 1] } else { self.values[i] };
        }
        let w = (x - x0) / (x1 - x0);
        self.values[i] * (1.0 - w) + self.values[i + 1] * w
    }

    fn jumps(&self) -> Vec<f64> {
        self.x.windows(2).filter(|w| w[0] == w[1]).map(|w| w[0]).collect()
    }
}

type ProfileFn = dyn Fn(f64, Side) -> Complex64 + Send + Sync;

/// A coefficient function on `[a, b]`.
#[derive(Clone)]
pub enum Profile {
    Expr { primitive: Primitive, scale: Complex64 },
    Samples(SampledProfile),
    /// Arbitrary closure with its jump locations (library use only).
    Custom { f: Arc<ProfileFn>, jumps: Vec<f64> },
}

impl fmt::Debug for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Profile::Expr { primitive, scale } => {
                f.debug_struct("Expr").field("primitive", primitive).field("scale", scale).finish()
            }
            Profile::Samples(s) => f.debug_tuple("Samples").field(s).finish(),
            Profile::Custom { jumps, .. } => f.debug_struct("Custom").field("jumps", jumps).finish(),
        }
    }
}

impl Profile {
    pub fn zero() -> Self {
        Profile::constant(0.0)
    }

    pub fn constant(value: f64) -> Self {
        Profile::expr(Primitive::Constant { value })
    }

    pub fn expr(primitive: Primitive) -> Self {
        Profile::Expr { primitive, scale: Complex64::new(1.0, 0.0) }
    }

    pub fn scaled(primitive: Primitive, scale: Complex64) -> Self {
        Profile::Expr { primitive, scale }
    }

    pub fn custom<F>(f: F, jumps: Vec<f64>) -> Self
    where
        F: Fn(f64, Side) -> Complex64 + Send + Sync + 'static,
    {
        Profile::Custom { f: Arc::new(f), jumps }
    }

    pub fn eval(&self, x: f64, side: Side) -> Complex64 {
        match self {
            Profile::Expr { primitive, scale } => scale * primitive.eval(x, side),
            Profile::Samples(s) => s.eval(x, side),
            Profile::Custom { f, .. } => f(x, side),
        }
    }

    fn jumps(&self, interval: &Interval) -> Vec<f64> {
        match self {
            Profile::Expr { primitive, scale } if *scale != Complex64::new(0.0, 0.0) => {
                primitive.jumps(interval.a, interval.b)
            }
            Profile::Expr { .. } => Vec::new(),
            Profile::Samples(s) => s.jumps(),
            Profile::Custom { jumps, .. } => jumps.clone(),
        }
    }

    /// True when the profile is a closed-form constant (used to pick oracles).
    pub fn as_constant(&self) -> Option<Complex64> {
        match self {
            Profile::Expr { primitive: Primitive::Constant { value }, scale } => Some(scale * value),
            _ => None,
        }
    }

    fn is_real_valued(&self) -> bool {
        match self {
            Profile::Expr { scale, .. } => scale.im == 0.0,
            Profile::Samples(s) => s.values.iter().all(|v| v.im == 0.0),
            Profile::Custom { .. } => true,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct IngestOptions {
    /// Lower bound required of rho on the validation grid.
    pub rho_min: f64,
    /// Number of uniform cells in the validation grid (breakpoints are added).
    pub validation_cells: usize,
    /// Running-sum overflow guard for the integrability surrogates.
    pub overflow_guard: f64,
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions { rho_min: 1e-8, validation_cells: 4096, overflow_guard: 1e12 }
    }
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct ConditionCheck {
    pub name: &'static str,
    pub value: f64,
    pub passed: bool,
}

/// Grid surrogates for the coefficient conditions.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct ValidationReport {
    pub p_l2_squared: f64,
    pub u_l2_squared: f64,
    pub rho_prime_u_l1: f64,
    pub rho_min_observed: f64,
    pub checks: Vec<ConditionCheck>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Validated problem data. Immutable after construction.
#[derive(Clone, Debug)]
pub struct CoefficientSet {
    interval: Interval,
    p: Profile,
    u: Profile,
    rho: Profile,
    rho_prime: Profile,
    breakpoints: Vec<f64>,
    p_nodes: Vec<f64>,
    p_table: Vec<Complex64>,
    report: ValidationReport,
}

/// Uniform grid of `cells` cells on the interval with every breakpoint
/// present as a node. Breakpoints closer than `1e-12 (b - a)` to a uniform
/// node replace that node.
pub fn aligned_grid(interval: &Interval, cells: usize, breakpoints: &[f64]) -> Vec<f64> {
    let (a, b) = (interval.a, interval.b);
    let snap = 1e-12 * (b - a);
    let mut grid: Vec<f64> = (0..=cells)
        .map(|k| if k == cells { b } else { a + (b - a) * k as f64 / cells as f64 })
        .collect();
    for &c in breakpoints {
        if c <= a || c >= b {
            continue;
        }
        let pos = grid.partition_point(|&x| x < c);
        let near_left = pos > 0 && (c - grid[pos - 1]).abs() <= snap;
        let near_right = pos < grid.len() && (grid[pos] - c).abs() <= snap;
        if near_right {
            if pos != grid.len() - 1 {
                grid[pos] = c;
            }
        } else if near_left {
            if pos - 1 != 0 {
                grid[pos - 1] = c;
            }
        } else {
            grid.insert(pos, c);
        }
    }
    grid
}

impl CoefficientSet {
    pub fn new(
        interval: Interval,
        p: Profile,
        u: Profile,
        rho: Profile,
        rho_prime: Profile,
        declared_breakpoints: &[f64],
        opts: &IngestOptions,
    ) -> Result<Self> {
        if !rho.is_real_valued() || !rho_prime.is_real_valued() {
            return Err(Error::Spec("rho and rho_prime must be real-valued".into()));
        }
        if opts.validation_cells < 16 {
            return Err(Error::Grid(format!("validation grid needs >= 16 cells, got {}", opts.validation_cells)));
        }
        let span = interval.length();
        let mut breakpoints = Vec::new();
        for &c in declared_breakpoints {
            if !c.is_finite() || !interval.contains(c) {
                return Err(Error::Spec(format!("breakpoint {c} lies outside [{}, {}]", interval.a, interval.b)));
            }
            breakpoints.push(c);
        }
        breakpoints.extend(u.jumps(&interval));
        breakpoints.extend(rho_prime.jumps(&interval));
        breakpoints.extend(p.jumps(&interval));
        breakpoints.retain(|c| interval.contains(*c));
        breakpoints.sort_by(f64::total_cmp);
        breakpoints.dedup_by(|x, y| (*x - *y).abs() <= 1e-14 * span);

        let mut u = u;
        let mut rho_prime = rho_prime;
        for profile in [&mut u, &mut rho_prime] {
            if let Profile::Samples(s) = profile {
                s.constant_across = breakpoints.clone();
            }
        }

        let mut cs = CoefficientSet {
            interval,
            p,
            u,
            rho,
            rho_prime,
            breakpoints,
            p_nodes: Vec::new(),
            p_table: Vec::new(),
            report: ValidationReport {
                p_l2_squared: 0.0,
                u_l2_squared: 0.0,
                rho_prime_u_l1: 0.0,
                rho_min_observed: f64::INFINITY,
                checks: Vec::new(),
            },
        };
        cs.tabulate(opts)?;
        Ok(cs)
    }

    fn tabulate(&mut self, opts: &IngestOptions) -> Result<()> {
        let grid = aligned_grid(&self.interval, opts.validation_cells, &self.breakpoints);
        let guard = opts.overflow_guard;
        let mut p_sq = 0.0;
        let mut u_sq = 0.0;
        let mut rpu = 0.0;
        let mut rho_min = f64::INFINITY;
        let mut p_table = Vec::with_capacity(grid.len());
        let mut acc = Complex64::new(0.0, 0.0);
        p_table.push(acc);

        let mut observe_rho = |x: f64, side: Side| {
            let r = self.rho.eval(x, side).re;
            if r < rho_min || r.is_nan() {
                rho_min = if r.is_nan() { f64::NEG_INFINITY } else { r };
            }
        };
        for cell in grid.windows(2) {
            let (lo, hi) = (cell[0], cell[1]);
            observe_rho(lo, Side::Right);
            observe_rho(hi, Side::Left);
            for x in gauss5_nodes(lo, hi) {
                observe_rho(x, Side::Left);
            }
        }
        if rho_min < opts.rho_min {
            return Err(Error::Positivity { min: rho_min, floor: opts.rho_min });
        }

        for cell in grid.windows(2) {
            let (lo, hi) = (cell[0], cell[1]);
            p_sq += gauss5_real(|x| self.p.eval(x, Side::Left).norm_sqr(), lo, hi);
            u_sq += gauss5_real(|x| self.u.eval(x, Side::Left).norm_sqr(), lo, hi);
            rpu += gauss5_real(
                |x| (self.rho_prime.eval(x, Side::Left).re * self.u.eval(x, Side::Left)).norm(),
                lo,
                hi,
            );
            for (name, value) in [("p in L2", p_sq), ("u in L2", u_sq), ("rho' u in L1", rpu)] {
                if !(value <= guard) {
                    return Err(Error::Integrability { quantity: name, value });
                }
            }
            acc += gauss5(|x| self.p.eval(x, Side::Left), lo, hi);
            if !acc.re.is_finite() || !acc.im.is_finite() {
                return Err(Error::Integrability { quantity: "P", value: f64::INFINITY });
            }
            p_table.push(acc);
        }

        self.report = ValidationReport {
            p_l2_squared: p_sq,
            u_l2_squared: u_sq,
            rho_prime_u_l1: rpu,
            rho_min_observed: rho_min,
            checks: vec![
                ConditionCheck { name: "rho >= rho_min", value: rho_min, passed: rho_min >= opts.rho_min },
                ConditionCheck { name: "p in L2", value: p_sq, passed: p_sq <= guard },
                ConditionCheck { name: "u in L2", value: u_sq, passed: u_sq <= guard },
                ConditionCheck { name: "rho' u in L1", value: rpu, passed: rpu <= guard },
            ],
        };
        self.p_nodes = grid;
        self.p_table = p_table;
        Ok(())
    }

    pub fn interval(&self) -> &Interval {
        &self.interval
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn p(&self, x: f64, side: Side) -> Complex64 {
        self.p.eval(x, side)
    }

    pub fn u(&self, x: f64, side: Side) -> Complex64 {
        self.u.eval(x, side)
    }

    pub fn rho(&self, x: f64) -> f64 {
        self.rho.eval(x, Side::Left).re
    }

    pub fn rho_prime(&self, x: f64, side: Side) -> f64 {
        self.rho_prime.eval(x, side).re
    }

    pub fn p_profile(&self) -> &Profile {
        &self.p
    }

    pub fn u_profile(&self) -> &Profile {
        &self.u
    }

    pub fn rho_profile(&self) -> &Profile {
        &self.rho
    }

    pub fn rho_prime_profile(&self) -> &Profile {
        &self.rho_prime
    }

    /// `P(x) = int_a^x p`, with `P(a) = 0`.
    pub fn big_p(&self, x: f64) -> Complex64 {
        let nodes = &self.p_nodes;
        if x <= nodes[0] {
            return Complex64::new(0.0, 0.0);
        }
        let i = nodes.partition_point(|&s| s <= x).saturating_sub(1).min(nodes.len() - 1);
        if nodes[i] == x {
            return self.p_table[i];
        }
        self.p_table[i] + gauss5(|s| self.p.eval(s, Side::Left), nodes[i], x)
    }

    /// Nodes and values of the tabulated `P`.
    pub fn p_tabulation(&self) -> (&[f64], &[Complex64]) {
        (&self.p_nodes, &self.p_table)
    }

    pub fn report(&self) -> &ValidationReport {
        &self.report
    }
}

/// Integral surrogates and pass/fail per coefficient condition.
pub fn validate_conditions(cs: &CoefficientSet) -> ValidationReport {
    cs.report.clone()
}
