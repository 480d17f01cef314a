//! Fundamental system `y_+-`, quasi-derivatives, remainders against the
//! leading terms `rho^{-1/4} exp(P/2 +- i lambda t)` and Wronskian checks.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::coefficients::CoefficientSet;
use crate::error::{Error, Result};
use crate::liouville::{build_map, transform, LiouvilleMap, Resolution, TransformedSystem};
use crate::volterra::{
    picard_solve, Branch, HalfPlane, IterationConfig, IterationDiagnostics, IterationState, SpectralPoint,
};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Smallest leading-term magnitude accepted before normalisation fails.
pub const LEADING_FLOOR: f64 = 1e-300;

pub const DEFAULT_DECAY_THRESHOLD: f64 = 0.05;

/// Remainder sizes treated as exact zeros by the decay criterion.
const NUMERICAL_ZERO: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct SolutionBranch {
    pub branch: Branch,
    pub lambda: Complex64,
    pub x: Vec<f64>,
    pub t: Vec<f64>,
    pub y: Vec<Complex64>,
    /// `y' - h_x sqrt(rho) y`
    pub y_quasi: Vec<Complex64>,
    /// t-variable quasi-derivative, `y_quasi / sqrt(rho)`.
    pub y_quasi_t: Vec<Complex64>,
    pub phi: Vec<Complex64>,
    pub psi: Vec<Complex64>,
    pub z1: Vec<Complex64>,
    pub z2: Vec<Complex64>,
    pub diagnostics: IterationDiagnostics,
}

impl SolutionBranch {
    pub fn sup_phi(&self) -> f64 {
        sup(&self.phi)
    }

    pub fn sup_psi(&self) -> f64 {
        sup(&self.psi)
    }

    fn relabel(mut self, branch: Branch, lambda: Complex64) -> Self {
        self.branch = branch;
        self.lambda = lambda;
        self
    }
}

fn sup(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[derive(Clone, Debug)]
pub struct FundamentalSystem {
    pub lambda: Complex64,
    pub halfplane: HalfPlane,
    pub r: f64,
    pub plus: SolutionBranch,
    pub minus: SolutionBranch,
    /// `W = y_+ y_-^[1] - y_- y_+^[1]` with t-variable quasi-derivatives.
    pub wronskian: Vec<Complex64>,
    /// `W e^{-F}`
    pub normalized_wronskian: Vec<Complex64>,
}

impl FundamentalSystem {
    /// `max |W e^{-F} - W(0)| / |W(0)|`
    pub fn wronskian_defect(&self) -> f64 {
        let w0 = self.normalized_wronskian[0];
        self.normalized_wronskian.iter().map(|w| (w - w0).norm()).fold(0.0, f64::max) / w0.norm()
    }

    pub fn branch(&self, branch: Branch) -> &SolutionBranch {
        match branch {
            Branch::Plus => &self.plus,
            Branch::Minus => &self.minus,
        }
    }

    /// Largest fixed-point residual of the two Picard solves.
    pub fn residual(&self) -> f64 {
        self.plus.diagnostics.residual.max(self.minus.diagnostics.residual)
    }
}

/// Grid and transformed coefficients sized for a spectral parameter.
#[derive(Clone, Debug)]
pub struct Discretization {
    pub map: LiouvilleMap,
    pub ts: TransformedSystem,
}

/// Build the map on the coarsest power-of-two grid allowed by `cfg` for `lambda`.
pub fn discretize(cs: &CoefficientSet, lambda: Complex64, cfg: &IterationConfig) -> Result<Discretization> {
    cfg.validate()?;
    let mut map = build_map(cs, Resolution::new(cfg.n_min))?;
    let needed = cfg.required_points(lambda, map.h());
    if needed > map.len() {
        map = build_map(cs, Resolution::new(needed))?;
    }
    let ts = transform(cs, &map)?;
    Ok(Discretization { map, ts })
}

/// Scale `y`, `y^[1]` to the solver output and divide by the leading terms.
///
/// Forward (minus) solutions are normalised at `a` by `rho(a)^{-1/4}`,
/// backward (plus) ones at `b` by `rho(b)^{-1/4} e^{P(b)/2}`, so that in both
/// cases `phi` and `psi` vanish at the anchor.
pub fn assemble_branch(
    ts: &TransformedSystem,
    sp: &SpectralPoint,
    state: &IterationState,
    branch: Branch,
) -> Result<SolutionBranch> {
    if state.direction != branch.direction() {
        return Err(Error::Config(format!("{} branch needs a {:?} sweep", branch.name(), branch.direction())));
    }
    let n = ts.len();
    let mu = sp.mu();
    let lambda = sp.lambda();
    let last = n - 1;
    let norm = match branch {
        Branch::Minus => Complex64::new(ts.rho[0].powf(-0.25), 0.0),
        Branch::Plus => ts.rho[last].powf(-0.25) * (0.5 * ts.big_p[last]).exp(),
    };
    // y = norm e^{s mu t} z1 and y^[1] = s mu norm e^{s mu t} z2, s = -+1.
    let s = -branch.sign();
    let k = branch.sign() * I * lambda;
    let mut out = SolutionBranch {
        branch,
        lambda,
        x: ts.x.clone(),
        t: ts.t.clone(),
        y: Vec::with_capacity(n),
        y_quasi: Vec::with_capacity(n),
        y_quasi_t: Vec::with_capacity(n),
        phi: Vec::with_capacity(n),
        psi: Vec::with_capacity(n),
        z1: state.z1.clone(),
        z2: state.z2.clone(),
        diagnostics: state.diagnostics(),
    };
    for j in 0..n {
        let t = ts.t[j];
        let e = (s * mu * t).exp();
        let lead_exp = (0.5 * ts.big_p[j] + k * t).exp();
        if !(lead_exp.norm() >= LEADING_FLOOR) {
            return Err(Error::Normalization { x: ts.x[j], magnitude: lead_exp.norm() });
        }
        let sr = ts.rho[j].sqrt();
        let y = norm * e * state.z1[j];
        let yq_t = s * mu * norm * e * state.z2[j];
        let yq = sr * yq_t;
        let lead = lead_exp / sr.sqrt();
        let lead_q = k * sr.sqrt() * lead_exp;
        out.phi.push(y / lead - 1.0);
        out.psi.push(yq / lead_q - 1.0);
        out.y.push(y);
        out.y_quasi_t.push(yq_t);
        out.y_quasi.push(yq);
    }
    if out.y.iter().chain(&out.y_quasi).any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::Normalization { x: f64::NAN, magnitude: f64::INFINITY });
    }
    Ok(out)
}

fn wronskian_of(ts: &TransformedSystem, plus: &SolutionBranch, minus: &SolutionBranch) -> (Vec<Complex64>, Vec<Complex64>) {
    let w: Vec<Complex64> = (0..ts.len())
        .map(|j| plus.y[j] * minus.y_quasi_t[j] - minus.y[j] * plus.y_quasi_t[j])
        .collect();
    let nw = w.iter().zip(&ts.big_f).map(|(w, f)| w * (-f).exp()).collect();
    (w, nw)
}

fn solve_branch(ts: &TransformedSystem, sp: &SpectralPoint, branch: Branch, cfg: &IterationConfig) -> Result<SolutionBranch> {
    let state = picard_solve(ts, sp, branch.direction(), cfg)?;
    assemble_branch(ts, sp, &state, branch)
}

/// Both branches in the upper convention on a prepared discretisation.
pub fn fundamental_system_on(disc: &Discretization, sp: &SpectralPoint, cfg: &IterationConfig) -> Result<FundamentalSystem> {
    if sp.halfplane() != HalfPlane::Upper {
        return Err(Error::HalfPlane("use solve_lower_halfplane for the lower convention".into()));
    }
    let ts = &disc.ts;
    let (plus, minus) = rayon::join(
        || solve_branch(ts, sp, Branch::Plus, cfg),
        || solve_branch(ts, sp, Branch::Minus, cfg),
    );
    let (plus, minus) = (plus?, minus?);
    finish(ts, sp.lambda(), HalfPlane::Upper, sp.r(), plus, minus)
}

fn finish(
    ts: &TransformedSystem,
    lambda: Complex64,
    halfplane: HalfPlane,
    r: f64,
    plus: SolutionBranch,
    minus: SolutionBranch,
) -> Result<FundamentalSystem> {
    let (wronskian, normalized_wronskian) = wronskian_of(ts, &plus, &minus);
    let w0 = normalized_wronskian[0];
    if !(w0.norm() > 0.0) || !w0.re.is_finite() || !w0.im.is_finite() {
        return Err(Error::Invariant { name: "wronskian nonzero", defect: w0.norm(), tol: 0.0 });
    }
    Ok(FundamentalSystem { lambda, halfplane, r, plus, minus, wronskian, normalized_wronskian })
}

/// Fundamental system for `Im lambda >= -r`.
pub fn fundamental_system(cs: &CoefficientSet, lambda: Complex64, r: f64, cfg: &IterationConfig) -> Result<FundamentalSystem> {
    let sp = SpectralPoint::new(lambda, r, HalfPlane::Upper)?;
    let disc = discretize(cs, lambda, cfg)?;
    fundamental_system_on(&disc, &sp, cfg)
}

/// Fundamental system for `Im lambda <= r`, obtained from the upper
/// convention at `-lambda` with the branch labels exchanged.
pub fn solve_lower_halfplane(cs: &CoefficientSet, lambda: Complex64, r: f64, cfg: &IterationConfig) -> Result<FundamentalSystem> {
    SpectralPoint::new(lambda, r, HalfPlane::Lower)?;
    let disc = discretize(cs, lambda, cfg)?;
    lower_on(&disc, lambda, r, cfg)
}

fn lower_on(disc: &Discretization, lambda: Complex64, r: f64, cfg: &IterationConfig) -> Result<FundamentalSystem> {
    let mirrored = SpectralPoint::new(-lambda, r, HalfPlane::Upper)?;
    let upper = fundamental_system_on(disc, &mirrored, cfg)?;
    let plus = upper.minus.relabel(Branch::Plus, lambda);
    let minus = upper.plus.relabel(Branch::Minus, lambda);
    finish(&disc.ts, lambda, HalfPlane::Lower, r, plus, minus)
}

/// Dispatch on the half-plane convention.
pub fn solve(
    cs: &CoefficientSet,
    lambda: Complex64,
    r: f64,
    halfplane: HalfPlane,
    cfg: &IterationConfig,
) -> Result<FundamentalSystem> {
    match halfplane {
        HalfPlane::Upper => fundamental_system(cs, lambda, r, cfg),
        HalfPlane::Lower => solve_lower_halfplane(cs, lambda, r, cfg),
    }
}

/// Dispatch on a prepared discretisation.
pub fn solve_on(
    disc: &Discretization,
    lambda: Complex64,
    r: f64,
    halfplane: HalfPlane,
    cfg: &IterationConfig,
) -> Result<FundamentalSystem> {
    match halfplane {
        HalfPlane::Upper => fundamental_system_on(disc, &SpectralPoint::new(lambda, r, HalfPlane::Upper)?, cfg),
        HalfPlane::Lower => {
            SpectralPoint::new(lambda, r, HalfPlane::Lower)?;
            lower_on(disc, lambda, r, cfg)
        }
    }
}

/// Sup-norms of the remainders at one spectral point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RemainderSample {
    pub lambda: [f64; 2],
    pub sup_phi_plus: f64,
    pub sup_phi_minus: f64,
    pub sup_psi_plus: f64,
    pub sup_psi_minus: f64,
    pub iterations: usize,
    pub wall_seconds: f64,
}

impl RemainderSample {
    pub fn from_system(fs: &FundamentalSystem, wall_seconds: f64) -> Self {
        RemainderSample {
            lambda: [fs.lambda.re, fs.lambda.im],
            sup_phi_plus: fs.plus.sup_phi(),
            sup_phi_minus: fs.minus.sup_phi(),
            sup_psi_plus: fs.plus.sup_psi(),
            sup_psi_minus: fs.minus.sup_psi(),
            iterations: fs.plus.diagnostics.iterations.max(fs.minus.diagnostics.iterations),
            wall_seconds,
        }
    }
}

/// Solve each spectral point independently (in parallel); results keep the
/// input order.
pub fn sweep_points(
    cs: &CoefficientSet,
    lambdas: &[Complex64],
    r: f64,
    halfplane: HalfPlane,
    cfg: &IterationConfig,
) -> Vec<Result<RemainderSample>> {
    lambdas
        .par_iter()
        .map(|&lambda| {
            let start = std::time::Instant::now();
            let fs = solve(cs, lambda, r, halfplane, cfg)?;
            Ok(RemainderSample::from_system(&fs, start.elapsed().as_secs_f64()))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayReport {
    pub lambda_sequence: Vec<[f64; 2]>,
    pub sup_phi_plus: Vec<f64>,
    pub sup_phi_minus: Vec<f64>,
    pub sup_psi_plus: Vec<f64>,
    pub sup_psi_minus: Vec<f64>,
    pub halfplane: HalfPlane,
    pub r: f64,
    pub threshold: f64,
}

impl DecayReport {
    pub fn from_samples(samples: &[RemainderSample], halfplane: HalfPlane, r: f64) -> Self {
        DecayReport {
            lambda_sequence: samples.iter().map(|s| s.lambda).collect(),
            sup_phi_plus: samples.iter().map(|s| s.sup_phi_plus).collect(),
            sup_phi_minus: samples.iter().map(|s| s.sup_phi_minus).collect(),
            sup_psi_plus: samples.iter().map(|s| s.sup_psi_plus).collect(),
            sup_psi_minus: samples.iter().map(|s| s.sup_psi_minus).collect(),
            halfplane,
            r,
            threshold: DEFAULT_DECAY_THRESHOLD,
        }
    }

    pub fn lists(&self) -> [(&'static str, &[f64]); 4] {
        [
            ("phi_plus", &self.sup_phi_plus),
            ("phi_minus", &self.sup_phi_minus),
            ("psi_plus", &self.sup_psi_plus),
            ("psi_minus", &self.sup_psi_minus),
        ]
    }

    /// Each list ends at or below the threshold and at or below half its
    /// first entry. Lists that are zero to rounding pass.
    pub fn passed(&self) -> bool {
        self.lists().iter().all(|(_, l)| decays(l, self.threshold))
    }
}

fn decays(list: &[f64], threshold: f64) -> bool {
    match (list.first(), list.last()) {
        (Some(&first), Some(&last)) => {
            let negligible = list.iter().all(|v| *v <= NUMERICAL_ZERO);
            negligible || (last <= threshold && last <= 0.5 * first)
        }
        _ => false,
    }
}

/// Remainder sup-norms along a sequence of spectral parameters ordered by
/// increasing `|lambda|`.
pub fn remainder_sweep(
    cs: &CoefficientSet,
    lambdas: &[Complex64],
    r: f64,
    halfplane: HalfPlane,
    cfg: &IterationConfig,
) -> Result<DecayReport> {
    if lambdas.windows(2).any(|w| w[0].norm() > w[1].norm()) {
        return Err(Error::Config("sweep must be ordered by increasing |lambda|".into()));
    }
    let samples = sweep_points(cs, lambdas, r, halfplane, cfg).into_iter().collect::<Result<Vec<_>>>()?;
    Ok(DecayReport::from_samples(&samples, halfplane, r))
}

/// `sup |y_-(lambda) - conj(y_+(lambda))|` between a lower-convention
/// system and an upper one at the same real `lambda`; both branches are
/// then anchored at `b`, so for real coefficients this vanishes.
pub fn conjugate_symmetry_defect(upper: &FundamentalSystem, lower: &FundamentalSystem) -> f64 {
    let pairs = [(&lower.minus, &upper.plus), (&lower.plus, &upper.minus)];
    pairs
        .iter()
        .flat_map(|(a, b)| {
            a.y.iter().zip(&b.y).map(|(p, q)| (p - q.conj()).norm()).chain(
                a.y_quasi.iter().zip(&b.y_quasi).map(|(p, q)| (p - q.conj()).norm()),
            )
        })
        .fold(0.0, f64::max)
}

/// `sup |y_upper - y_lower|` and the same for quasi-derivatives, per branch.
pub fn convention_difference(upper: &FundamentalSystem, lower: &FundamentalSystem) -> f64 {
    [Branch::Plus, Branch::Minus]
        .iter()
        .flat_map(|&b| {
            let (u, l) = (upper.branch(b), lower.branch(b));
            u.y.iter().zip(&l.y).chain(u.y_quasi.iter().zip(&l.y_quasi)).map(|(p, q)| (p - q).norm())
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::{IngestOptions, Interval, Primitive, Profile};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn constant_rho(rho0: f64, b: f64) -> CoefficientSet {
        CoefficientSet::new(
            Interval::new(0.0, b).unwrap(),
            Profile::zero(),
            Profile::zero(),
            Profile::constant(rho0),
            Profile::zero(),
            &[],
            &IngestOptions::default(),
        )
        .unwrap()
    }

    #[test]
    fn free_case_is_exact() {
        let cs = constant_rho(1.0, std::f64::consts::PI);
        let fs = fundamental_system(&cs, c(5.0, 0.0), 0.0, &IterationConfig::default()).unwrap();
        for j in 0..fs.plus.x.len() {
            let x = fs.plus.x[j];
            assert!((fs.plus.y[j] - (I * 5.0 * x).exp()).norm() < 1e-13);
            assert!((fs.plus.y_quasi[j] - I * 5.0 * (I * 5.0 * x).exp()).norm() < 1e-12);
            assert!((fs.wronskian[j] - c(0.0, -10.0)).norm() < 1e-12);
        }
        assert!(fs.plus.sup_phi() < 1e-13 && fs.minus.sup_psi() < 1e-13);
        assert!(fs.wronskian_defect() < 1e-14);
    }

    #[test]
    fn constant_rho_leading_term() {
        let cs = constant_rho(4.0, 1.0);
        let fs = fundamental_system(&cs, c(5.0, 0.0), 0.0, &IterationConfig::default()).unwrap();
        for j in 0..fs.plus.x.len() {
            let x = fs.plus.x[j];
            assert!((fs.plus.y[j] - (I * 10.0 * x).exp() / 2f64.sqrt()).norm() < 1e-13);
            assert!((fs.minus.y[j] - (-I * 10.0 * x).exp() / 2f64.sqrt()).norm() < 1e-13);
        }
        assert!(fs.plus.sup_phi() < 1e-13 && fs.minus.sup_phi() < 1e-13);
    }

    #[test]
    fn lower_convention_relabels() {
        let cs = constant_rho(1.0, std::f64::consts::PI);
        let cfg = IterationConfig::default();
        let lo = solve_lower_halfplane(&cs, c(-5.0, 0.0), 0.0, &cfg).unwrap();
        let up = fundamental_system(&cs, c(5.0, 0.0), 0.0, &cfg).unwrap();
        assert_eq!(lo.plus.y, up.minus.y);
        assert_eq!(lo.minus.y, up.plus.y);
        assert_eq!(lo.plus.branch, Branch::Plus);
        for w in &lo.wronskian {
            assert!((w - c(0.0, 10.0)).norm() < 1e-12, "{w}");
        }
        assert!(matches!(solve_lower_halfplane(&cs, c(5.0, 4.0), 3.0, &cfg), Err(Error::HalfPlane(_))));
    }

    #[test]
    fn real_problem_conjugate_symmetry() {
        let p = Profile::expr(Primitive::Sin { amplitude: 1.0, frequency: 1.0, phase: 0.0, offset: 0.0 });
        let u = Profile::expr(Primitive::Cos { amplitude: 1.0, frequency: 1.0, phase: 0.0, offset: -1.0 });
        let e = Profile::expr(Primitive::Exp { amplitude: 1.0, rate: 1.0, offset: 0.0 });
        let cs =
            CoefficientSet::new(Interval::new(0.0, 1.0).unwrap(), p, u, e.clone(), e, &[], &IngestOptions::default())
                .unwrap();
        let cfg = IterationConfig::default();
        let up = fundamental_system(&cs, c(20.0, 0.0), 0.0, &cfg).unwrap();
        let lo = solve_lower_halfplane(&cs, c(20.0, 0.0), 0.0, &cfg).unwrap();
        assert!(conjugate_symmetry_defect(&up, &lo) <= 10.0 * cfg.tol * 100.0);
        assert!(up.residual() <= 10.0 * cfg.tol);
    }

    #[test]
    fn mismatched_sweep_is_rejected() {
        let cs = constant_rho(1.0, 1.0);
        let disc = discretize(&cs, c(5.0, 0.0), &IterationConfig::default()).unwrap();
        let sp = SpectralPoint::new(c(5.0, 0.0), 0.0, HalfPlane::Upper).unwrap();
        let state = picard_solve(&disc.ts, &sp, Branch::Minus.direction(), &IterationConfig::default()).unwrap();
        assert!(assemble_branch(&disc.ts, &sp, &state, Branch::Plus).is_err());
    }

    #[test]
    fn free_sweep_is_all_zero() {
        let cs = constant_rho(1.0, 1.0);
        let ls: Vec<Complex64> = (0..4).map(|k| c(25.0 * 2f64.powi(k), 0.0)).collect();
        let rep = remainder_sweep(&cs, &ls, 0.0, HalfPlane::Upper, &IterationConfig::default()).unwrap();
        assert!(rep.passed());
        assert!(rep.sup_phi_plus.iter().all(|v| *v < 1e-12));
        assert_eq!(rep.lambda_sequence.len(), 4);
        assert!(remainder_sweep(&cs, &[c(50.0, 0.0), c(25.0, 0.0)], 0.0, HalfPlane::Upper, &IterationConfig::default())
            .is_err());
    }
}
