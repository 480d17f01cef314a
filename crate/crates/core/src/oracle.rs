//! Independent reference solutions used to validate the solver.
//!
//! Every oracle returns the solution `y` and the x-variable quasi-derivative
//! `y' - h_x sqrt(rho) y` at requested abscissae, normalised like the solver:
//! `y` and the quasi-derivative equal their leading terms at the anchor
//! endpoint.

use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;

use crate::coefficients::{CoefficientSet, Interval, Side};
use crate::error::{Error, Result};
use crate::volterra::{Branch, Endpoint};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleMethod {
    ClosedFormConstant,
    TransferMatrixDelta,
    AdaptiveReference,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleSolution {
    pub x: Vec<f64>,
    pub y: Vec<Complex64>,
    pub y_quasi: Vec<Complex64>,
    pub method: OracleMethod,
    pub est_error: f64,
}

impl OracleSolution {
    /// `max(sup |y - y_ref|, sup |y_quasi - y_quasi_ref|)` at shared abscissae.
    /// `x` of `other` must be a subset of the solver nodes passed in `grid`.
    pub fn sup_difference(&self, grid: &[f64], y: &[Complex64], y_quasi: &[Complex64]) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for (k, &x) in self.x.iter().enumerate() {
            let j = grid
                .binary_search_by(|s| s.total_cmp(&x))
                .map_err(|_| Error::Grid(format!("oracle abscissa {x} is not a solver node")))?;
            worst = worst.max((self.y[k] - y[j]).norm()).max((self.y_quasi[k] - y_quasi[j]).norm());
        }
        Ok(worst)
    }
}

fn check_points(interval: &Interval, xs: &[f64]) -> Result<()> {
    if xs.is_empty() {
        return Err(Error::Domain("no output abscissae".into()));
    }
    if xs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain("output abscissae must be strictly increasing".into()));
    }
    if xs[0] < interval.a() || xs[xs.len() - 1] > interval.b() {
        return Err(Error::Domain("output abscissae leave the interval".into()));
    }
    Ok(())
}

/// `p = u = 0`, `rho = rho0`: `y = rho0^{-1/4} e^{+-i lambda sqrt(rho0) (x - a)}`.
pub fn constant_closed_form(
    rho0: f64,
    lambda: Complex64,
    interval: &Interval,
    branch: Branch,
    xs: &[f64],
) -> Result<OracleSolution> {
    if !(rho0 > 0.0) {
        return Err(Error::Positivity { min: rho0, floor: 0.0 });
    }
    check_points(interval, xs)?;
    let k = branch.sign() * I * lambda;
    let sr = rho0.sqrt();
    let y: Vec<Complex64> = xs.iter().map(|&x| (k * sr * (x - interval.a())).exp() / sr.sqrt()).collect();
    let y_quasi = y.iter().map(|v| k * sr * v).collect();
    Ok(OracleSolution { x: xs.to_vec(), y, y_quasi, method: OracleMethod::ClosedFormConstant, est_error: 0.0 })
}

/// `p = 0`, `rho = 1`, `q = c delta(x - x0)`, i.e. `u` jumps by `c` at `x0`.
///
/// On each side of `x0` the solution is a combination of `e^{+-i lambda x}`;
/// `y` and `y' - (u - u(a)) y` are continuous across `x0`.
pub fn transfer_matrix_delta(
    c: Complex64,
    x0: f64,
    lambda: Complex64,
    interval: &Interval,
    branch: Branch,
    anchor: Endpoint,
    xs: &[f64],
) -> Result<OracleSolution> {
    if !(x0 > interval.a() && x0 < interval.b()) {
        return Err(Error::Domain(format!("delta location {x0} is not inside ({}, {})", interval.a(), interval.b())));
    }
    check_points(interval, xs)?;
    let (a, b) = (interval.a(), interval.b());
    let k = branch.sign() * I * lambda;
    // (y, y') at a point propagated over a distance s where y'' = -lambda^2 y.
    let propagate = |y: Complex64, dy: Complex64, s: f64| {
        let (c_, s_) = ((lambda * s).cos(), (lambda * s).sin());
        (y * c_ + dy * s_ / lambda, -y * lambda * s_ + dy * c_)
    };
    // h_x = 0 left of x0 (and at x0), c right of it.
    let hx = |x: f64| if x > x0 { c } else { Complex64::new(0.0, 0.0) };
    let (y0, dy0_left) = match anchor {
        Endpoint::Left => propagate(Complex64::new(1.0, 0.0), k, x0 - a),
        Endpoint::Right => {
            let yb = (k * (b - a)).exp();
            // quasi-derivative k yb at b, so y'(b) = (k + c) yb
            let (y0, dy0_right) = propagate(yb, (k + c) * yb, x0 - b);
            (y0, dy0_right - c * y0)
        }
    };
    let dy0_right = dy0_left + c * y0;
    let mut y = Vec::with_capacity(xs.len());
    let mut y_quasi = Vec::with_capacity(xs.len());
    for &x in xs {
        let (v, dv) = if x <= x0 { propagate(y0, dy0_left, x - x0) } else { propagate(y0, dy0_right, x - x0) };
        y.push(v);
        y_quasi.push(dv - hx(x) * v);
    }
    Ok(OracleSolution { x: xs.to_vec(), y, y_quasi, method: OracleMethod::TransferMatrixDelta, est_error: 0.0 })
}

// Dormand-Prince 5(4).
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] =
    [5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0];

const DIM: usize = 5;
type State = [Complex64; DIM];

/// State: `y`, quasi-derivative `Y`, `t`, `P`, and the correction integral
/// `int_a^x u rho' / (2 rho^{3/2})` entering `h_x`.
struct Rhs<'a> {
    cs: &'a CoefficientSet,
    lambda2: Complex64,
    base: Complex64,
    side: Side,
}

impl Rhs<'_> {
    fn eval(&self, x: f64, s: &State) -> State {
        let cs = self.cs;
        let rho = cs.rho(x);
        let sr = rho.sqrt();
        let rp = cs.rho_prime(x, self.side);
        let u = cs.u(x, self.side);
        let p = cs.p(x, self.side);
        let hx = u / sr - self.base + s[4];
        let w = hx * sr;
        let (y, yq) = (s[0], s[1]);
        [
            w * y + yq,
            ((p - w) * w - self.lambda2 * rho - hx * rp / (2.0 * sr)) * y + (p - w) * yq,
            Complex64::new(sr, 0.0),
            p,
            u * rp / (2.0 * rho * sr),
        ]
    }
}

fn axpy(s: &State, h: f64, terms: &[(f64, &State)]) -> State {
    let mut out = *s;
    for (c, k) in terms {
        for i in 0..DIM {
            out[i] += k[i] * (h * c);
        }
    }
    out
}

struct Dp5Outcome {
    states: Vec<State>,
    est_error: f64,
}

/// Integrate from `x_start` through `targets` (monotone, same direction),
/// landing exactly on each target.
fn dp5(rhs: &Rhs, x_start: f64, s0: State, targets: &[f64], tol: f64, span: f64) -> Result<Dp5Outcome> {
    let mut x = x_start;
    let mut s = s0;
    let dir = if targets.last().copied().unwrap_or(x_start) >= x_start { 1.0 } else { -1.0 };
    let mut h = dir * span * 1e-3;
    let h_min = 1e-12 * span;
    let mut est = 0.0;
    let mut states = Vec::with_capacity(targets.len());
    for &target in targets {
        while (target - x) * dir > 0.0 {
            let last = (x + h - target) * dir >= 0.0;
            let step = if last { target - x } else { h };
            let mut k = [[Complex64::new(0.0, 0.0); DIM]; 7];
            k[0] = rhs.eval(x, &s);
            for i in 1..7 {
                let terms: Vec<(f64, &State)> = (0..i).map(|j| (A[i][j], &k[j])).collect();
                k[i] = rhs.eval(x + C[i] * step, &axpy(&s, step, &terms));
            }
            let y5 = axpy(&s, step, &(0..7).map(|j| (B5[j], &k[j])).collect::<Vec<_>>());
            let mut err: f64 = 0.0;
            let mut raw: f64 = 0.0;
            for i in 0..DIM {
                let e: Complex64 = (0..7).map(|j| k[j][i] * ((B5[j] - B4[j]) * step)).sum();
                let scale = tol * (1.0 + s[i].norm().max(y5[i].norm()));
                err = err.max(e.norm() / scale);
                raw = raw.max(e.norm());
            }
            if !err.is_finite() {
                return Err(Error::Stiffness { x, step });
            }
            if err <= 1.0 {
                x = if last { target } else { x + step };
                s = y5;
                est += raw;
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            if err <= 1.0 && last {
                // keep the pre-clamp step for the next interval
                h = dir * h.abs().max(step.abs() * factor);
            } else {
                h = step * factor;
            }
            if h.abs() < h_min {
                return Err(Error::Stiffness { x, step: h.abs() });
            }
        }
        states.push(s);
    }
    Ok(Dp5Outcome { states, est_error: est })
}

/// Adaptive Dormand-Prince 5(4) integration of the x-variable first-order
/// system for `(y, y' - h_x sqrt(rho) y)` with local tolerance `tol`.
/// Restricted to coefficient sets without breakpoints.
pub fn adaptive_reference(
    cs: &CoefficientSet,
    lambda: Complex64,
    branch: Branch,
    anchor: Endpoint,
    tol: f64,
    xs: &[f64],
) -> Result<OracleSolution> {
    if !cs.breakpoints().is_empty() {
        return Err(Error::Domain("adaptive reference requires coefficients without breakpoints".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::Config(format!("tol must be positive, got {tol}")));
    }
    let iv = cs.interval();
    check_points(iv, xs)?;
    let (a, b) = (iv.a(), iv.b());
    let span = b - a;
    let base = cs.u(a, Side::Right) / cs.rho(a).sqrt();
    let k = branch.sign() * I * lambda;
    let zero = Complex64::new(0.0, 0.0);
    let fwd = Rhs { cs, lambda2: lambda * lambda, base, side: Side::Right };
    let (states, est_error) = match anchor {
        Endpoint::Left => {
            let ra = cs.rho(a);
            let s0 = [Complex64::new(ra.powf(-0.25), 0.0), k * ra.powf(0.25), zero, zero, zero];
            let out = dp5(&fwd, a, s0, xs, tol, span)?;
            (out.states, out.est_error)
        }
        Endpoint::Right => {
            // Auxiliary quantities at b first, then the solution from b back to a.
            let aux0 = [zero, zero, zero, zero, zero];
            let aux = dp5(&fwd, a, aux0, &[b], tol * 1e-2, span)?.states[0];
            let rb = cs.rho(b);
            let lead = (0.5 * aux[3] + k * aux[2].re).exp() * rb.powf(-0.25);
            let sb = [lead, k * rb.sqrt() * lead, aux[2], aux[3], aux[4]];
            let bwd = Rhs { side: Side::Left, ..fwd };
            let rev: Vec<f64> = xs.iter().rev().copied().collect();
            let out = dp5(&bwd, b, sb, &rev, tol, span)?;
            (out.states.into_iter().rev().collect(), out.est_error)
        }
    };
    let y = states.iter().map(|s| s[0]).collect();
    let y_quasi = states.iter().map(|s| s[1]).collect();
    Ok(OracleSolution { x: xs.to_vec(), y, y_quasi, method: OracleMethod::AdaptiveReference, est_error })
}

pub const GOLDEN_HEADER: &str = "# singular-sl v1";

/// Write `x, Re y, Im y, Re y_quasi, Im y_quasi` rows with a version header.
pub fn write_golden(path: &Path, sol: &OracleSolution) -> Result<()> {
    let mut file = std::fs::File::create(path)?;
    use std::io::Write;
    writeln!(file, "{GOLDEN_HEADER}")?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(["x", "re_y", "im_y", "re_y_quasi", "im_y_quasi"])?;
    for k in 0..sol.x.len() {
        w.write_record(
            [sol.x[k], sol.y[k].re, sol.y[k].im, sol.y_quasi[k].re, sol.y_quasi[k].im].map(|v| format!("{v:.17e}")),
        )?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_golden(path: &Path, method: OracleMethod) -> Result<OracleSolution> {
    let text = std::fs::read_to_string(path)?;
    let body = text
        .strip_prefix(GOLDEN_HEADER)
        .ok_or_else(|| Error::Spec(format!("{} lacks the '{GOLDEN_HEADER}' header", path.display())))?;
    let mut rd = csv::Reader::from_reader(body.trim_start().as_bytes());
    let mut sol = OracleSolution { x: vec![], y: vec![], y_quasi: vec![], method, est_error: 0.0 };
    for rec in rd.records() {
        let rec = rec?;
        let v: Vec<f64> = rec
            .iter()
            .map(|s| s.trim().parse::<f64>().map_err(|e| Error::Spec(format!("bad number '{s}': {e}"))))
            .collect::<Result<_>>()?;
        if v.len() != 5 {
            return Err(Error::Spec(format!("expected 5 columns, found {}", v.len())));
        }
        sol.x.push(v[0]);
        sol.y.push(Complex64::new(v[1], v[2]));
        sol.y_quasi.push(Complex64::new(v[3], v[4]));
    }
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::{IngestOptions, Primitive, Profile};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn anchor(b: Branch) -> Endpoint {
        b.anchor(crate::volterra::HalfPlane::Upper)
    }

    fn grid(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..=n).map(|k| a + (b - a) * k as f64 / n as f64).collect()
    }

    #[test]
    fn closed_form_values() {
        let pi = std::f64::consts::PI;
        let iv = Interval::new(0.0, pi).unwrap();
        let xs = grid(0.0, pi, 8);
        let plus = constant_closed_form(1.0, c(5.0, 0.0), &iv, Branch::Plus, &xs).unwrap();
        let minus = constant_closed_form(1.0, c(5.0, 0.0), &iv, Branch::Minus, &xs).unwrap();
        for (k, &x) in xs.iter().enumerate() {
            assert!((plus.y[k] - (I * 5.0 * x).exp()).norm() < 1e-14);
            assert!((minus.y_quasi[k] - c(0.0, -5.0) * (-I * 5.0 * x).exp()).norm() < 1e-13);
        }
        let iv = Interval::new(0.0, 1.0).unwrap();
        let four = constant_closed_form(4.0, c(5.0, 0.0), &iv, Branch::Plus, &[0.0, 0.3]).unwrap();
        assert!((four.y[1] - (I * 3.0).exp() / 2f64.sqrt()).norm() < 1e-15);
    }

    #[test]
    fn delta_without_jump_is_free() {
        let iv = Interval::new(0.0, 1.0).unwrap();
        let xs = grid(0.0, 1.0, 16);
        for br in [Branch::Plus, Branch::Minus] {
            let d = transfer_matrix_delta(c(0.0, 0.0), 0.5, c(40.0, 1.0), &iv, br, anchor(br), &xs).unwrap();
            let f = constant_closed_form(1.0, c(40.0, 1.0), &iv, br, &xs).unwrap();
            for k in 0..xs.len() {
                assert!((d.y[k] - f.y[k]).norm() < 1e-12 * (1.0 + f.y[k].norm()));
                assert!((d.y_quasi[k] - f.y_quasi[k]).norm() < 1e-10 * (1.0 + f.y_quasi[k].norm()));
            }
        }
    }

    #[test]
    fn delta_matching_conditions() {
        let iv = Interval::new(0.0, 1.0).unwrap();
        let (cc, x0, lam) = (c(2.0, 0.0), 0.5, c(40.0, 0.0));
        let e = 1e-9;
        for br in [Branch::Plus, Branch::Minus] {
            let d = transfer_matrix_delta(cc, x0, lam, &iv, br, anchor(br), &[x0 - e, x0, x0 + e]).unwrap();
            assert!((d.y[0] - d.y[2]).norm() < 1e-6);
            assert!((d.y_quasi[0] - d.y_quasi[2]).norm() < 1e-5);
            // classical derivative jumps by c y(x0)
            let dl = d.y_quasi[1];
            let dr = d.y_quasi[2] + cc * d.y[2];
            assert!((dr - dl - cc * d.y[1]).norm() < 1e-5, "{br:?}");
        }
        // anchors
        let xs = [0.0, 1.0];
        let m = transfer_matrix_delta(cc, x0, lam, &iv, Branch::Minus, Endpoint::Left, &xs).unwrap();
        assert!((m.y[0] - 1.0).norm() < 1e-15 && (m.y_quasi[0] - c(0.0, -40.0)).norm() < 1e-13);
        let p = transfer_matrix_delta(cc, x0, lam, &iv, Branch::Plus, Endpoint::Right, &xs).unwrap();
        assert!((p.y[1] - (I * 40.0).exp()).norm() < 1e-14);
        assert!((p.y_quasi[1] - I * 40.0 * (I * 40.0).exp()).norm() < 1e-12);
        assert!(matches!(transfer_matrix_delta(cc, 1.0, lam, &iv, Branch::Plus, Endpoint::Right, &xs), Err(Error::Domain(_))));
    }

    #[test]
    fn reference_matches_closed_form() {
        let cs = CoefficientSet::new(
            Interval::new(0.0, 1.0).unwrap(),
            Profile::zero(),
            Profile::zero(),
            Profile::constant(4.0),
            Profile::zero(),
            &[],
            &IngestOptions::default(),
        )
        .unwrap();
        let xs = grid(0.0, 1.0, 32);
        for br in [Branch::Plus, Branch::Minus] {
            let r = adaptive_reference(&cs, c(5.0, 0.0), br, anchor(br), 1e-11, &xs).unwrap();
            let f = constant_closed_form(4.0, c(5.0, 0.0), cs.interval(), br, &xs).unwrap();
            let d = f.sup_difference(&xs, &r.y, &r.y_quasi).unwrap();
            assert!(d <= 1e-9, "{br:?}: {d}");
            assert_eq!(r.x, xs);
        }
    }

    #[test]
    fn breakpoints_are_rejected() {
        let cs = CoefficientSet::new(
            Interval::new(0.0, 1.0).unwrap(),
            Profile::zero(),
            Profile::expr(Primitive::Step { x0: 0.5, height: 1.0, base: 0.0 }),
            Profile::constant(1.0),
            Profile::zero(),
            &[],
            &IngestOptions::default(),
        )
        .unwrap();
        assert!(matches!(adaptive_reference(&cs, c(5.0, 0.0), Branch::Plus, Endpoint::Right, 1e-10, &[0.0]), Err(Error::Domain(_))));
    }

    #[test]
    fn golden_round_trip() {
        let iv = Interval::new(0.0, 1.0).unwrap();
        let sol = transfer_matrix_delta(c(2.0, 0.0), 0.5, c(40.0, 0.0), &iv, Branch::Plus, Endpoint::Right, &grid(0.0, 1.0, 8)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.csv");
        write_golden(&path, &sol).unwrap();
        let back = read_golden(&path, OracleMethod::TransferMatrixDelta).unwrap();
        assert_eq!(back, sol);
    }
}
