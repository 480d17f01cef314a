//! Command-line front end: `solve`, `sweep`, `verify`, `compare-oracle`.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use crate::coefficients::{CoefficientSet, IngestOptions, Primitive, Profile};
use crate::error::{Error, Result};
use crate::oracle::{adaptive_reference, constant_closed_form, transfer_matrix_delta, OracleSolution};
use crate::problem::{ingest_coefficients, ProblemSpec};
use crate::solutions::{discretize, solve_on, DecayReport, FundamentalSystem, RemainderSample, SolutionBranch};
use crate::volterra::{Branch, HalfPlane, IterationConfig};

pub const CSV_HEADER: &str = "# singular-sl v1";

pub mod exit {
    pub const OK: i32 = 0;
    pub const OTHER: i32 = 1;
    pub const SPEC: i32 = 2;
    pub const NO_CONVERGENCE: i32 = 3;
    pub const HALF_PLANE: i32 = 4;
    pub const PARTIAL: i32 = 5;
    pub const INVARIANT: i32 = 6;
}

/// Exit status for an error class.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Spec(_) | Error::Domain(_) | Error::Positivity { .. } | Error::Integrability { .. } => exit::SPEC,
        Error::NoConvergence { .. } => exit::NO_CONVERGENCE,
        Error::HalfPlane(_) | Error::MuGuard { .. } => exit::HALF_PLANE,
        Error::Invariant { .. } => exit::INVARIANT,
        _ => exit::OTHER,
    }
}

#[derive(Parser, Debug)]
#[command(name = "singular-sl", version, about = "Fundamental solutions of Sturm-Liouville equations with distributional potentials")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve at one spectral point and write branch tables.
    Solve(RunArgs),
    /// Remainder sup-norms along a list or geometric sequence of spectral points.
    Sweep(RunArgs),
    /// Check Wronskian, sigma/h_x consistency, the P/F identity and fixed-point residuals.
    Verify(RunArgs),
    /// Compare both branches against an independent reference solution.
    CompareOracle(RunArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum HalfPlaneArg {
    Upper,
    Lower,
    /// Upper when `Im lambda >= -r`, lower otherwise.
    Auto,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    /// Problem description (JSON).
    #[arg(long)]
    pub spec: PathBuf,
    /// Spectral parameter as `re,im` (or `re`); repeatable.
    #[arg(long = "lambda", value_parser = parse_complex, allow_hyphen_values = true)]
    pub lambdas: Vec<Complex64>,
    /// Geometric sequence: `start=<re,im> factor=<f> count=<n>`.
    #[arg(long, num_args = 1..=3, value_name = "KEY=VALUE", allow_hyphen_values = true)]
    pub sweep: Option<Vec<String>>,
    #[arg(long, default_value_t = 0.0)]
    pub r: f64,
    #[arg(long, value_enum, default_value_t = HalfPlaneArg::Upper)]
    pub halfplane: HalfPlaneArg,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Minimum number of grid points.
    #[arg(long)]
    pub n_min: Option<usize>,
    /// Picard iteration cap.
    #[arg(long)]
    pub n_max: Option<usize>,
    /// Output file (standard output when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Add wall-clock columns to sweep tables (makes output run-dependent).
    #[arg(long)]
    pub timings: bool,
}

pub fn parse_complex(s: &str) -> std::result::Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| t.parse::<f64>().map_err(|e| format!("'{t}' is not a number: {e}"));
    let z = match parts.as_slice() {
        [re] => Complex64::new(num(re)?, 0.0),
        [re, im] => Complex64::new(num(re)?, num(im)?),
        _ => return Err(format!("expected 're,im', got '{s}'")),
    };
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(format!("'{s}' is not finite"));
    }
    Ok(z)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeometricSweep {
    pub start: Complex64,
    pub factor: f64,
    pub count: usize,
}

impl GeometricSweep {
    pub fn parse(tokens: &[String]) -> Result<Self> {
        let (mut start, mut factor, mut count) = (None, None, None);
        for tok in tokens.iter().flat_map(|t| t.split_whitespace()) {
            let (key, value) = tok.split_once('=').ok_or_else(|| Error::Config(format!("expected key=value, got '{tok}'")))?;
            match key {
                "start" => start = Some(parse_complex(value).map_err(Error::Config)?),
                "factor" => factor = Some(value.parse::<f64>().map_err(|e| Error::Config(format!("factor: {e}")))?),
                "count" => count = Some(value.parse::<usize>().map_err(|e| Error::Config(format!("count: {e}")))?),
                other => return Err(Error::Config(format!("unknown sweep key '{other}'"))),
            }
        }
        let sweep = GeometricSweep {
            start: start.ok_or_else(|| Error::Config("sweep needs start=<re,im>".into()))?,
            factor: factor.ok_or_else(|| Error::Config("sweep needs factor=<f>".into()))?,
            count: count.ok_or_else(|| Error::Config("sweep needs count=<n>".into()))?,
        };
        if sweep.count < 1 {
            return Err(Error::Config("sweep count must be >= 1".into()));
        }
        if !(sweep.factor > 1.0) || !sweep.factor.is_finite() {
            return Err(Error::Config("sweep factor must be > 1".into()));
        }
        Ok(sweep)
    }

    pub fn points(&self) -> Vec<Complex64> {
        (0..self.count).map(|k| self.start * self.factor.powi(k as i32)).collect()
    }
}

/// Resolved run configuration shared by all commands.
pub struct RunConfig {
    pub spec_path: PathBuf,
    pub cs: CoefficientSet,
    pub lambdas: Vec<Complex64>,
    pub r: f64,
    pub halfplane: HalfPlaneArg,
    pub iteration: IterationConfig,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub timings: bool,
}

impl RunConfig {
    pub fn from_args(args: &RunArgs) -> Result<Self> {
        let spec = ProblemSpec::from_path(&args.spec)?;
        let cs = ingest_coefficients(&spec, &IngestOptions::default())?;
        let mut lambdas = args.lambdas.clone();
        if let Some(tokens) = &args.sweep {
            lambdas.extend(GeometricSweep::parse(tokens)?.points());
        }
        if lambdas.is_empty() {
            return Err(Error::Config("no spectral parameter given (--lambda or --sweep)".into()));
        }
        if !(args.r >= 0.0) || !args.r.is_finite() {
            return Err(Error::Config(format!("r must be finite and nonnegative, got {}", args.r)));
        }
        let mut iteration = IterationConfig::default();
        if let Some(tol) = args.tol {
            iteration.tol = tol;
        }
        if let Some(kappa) = args.kappa {
            iteration.kappa = kappa;
        }
        if let Some(n) = args.n_min {
            iteration.n_min = n;
        }
        if let Some(n) = args.n_max {
            iteration.n_max = n;
        }
        iteration.validate()?;
        Ok(RunConfig {
            spec_path: args.spec.clone(),
            cs,
            lambdas,
            r: args.r,
            halfplane: args.halfplane,
            iteration,
            out: args.out.clone(),
            format: args.format,
            timings: args.timings,
        })
    }

    pub fn halfplane_for(&self, lambda: Complex64) -> HalfPlane {
        match self.halfplane {
            HalfPlaneArg::Upper => HalfPlane::Upper,
            HalfPlaneArg::Lower => HalfPlane::Lower,
            HalfPlaneArg::Auto if lambda.im >= -self.r => HalfPlane::Upper,
            HalfPlaneArg::Auto => HalfPlane::Lower,
        }
    }

    pub fn solve(&self, lambda: Complex64) -> Result<FundamentalSystem> {
        let disc = discretize(&self.cs, lambda, &self.iteration)?;
        solve_on(&disc, lambda, self.r, self.halfplane_for(lambda), &self.iteration)
    }

    fn single_lambda(&self) -> Result<Complex64> {
        match self.lambdas.as_slice() {
            [l] => Ok(*l),
            _ => Err(Error::Config(format!("expected exactly one spectral parameter, got {}", self.lambdas.len()))),
        }
    }
}

fn c2(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".diagnostics.json");
    PathBuf::from(s)
}

/// Diagnostics of a fundamental system without the sample arrays.
pub fn system_diagnostics(fs: &FundamentalSystem) -> serde_json::Value {
    json!({
        "lambda": c2(fs.lambda),
        "halfplane": fs.halfplane,
        "r": fs.r,
        "grid_points": fs.plus.x.len(),
        "wronskian_0": c2(fs.normalized_wronskian[0]),
        "wronskian_defect": fs.wronskian_defect(),
        "sup_phi": {"plus": fs.plus.sup_phi(), "minus": fs.minus.sup_phi()},
        "sup_psi": {"plus": fs.plus.sup_psi(), "minus": fs.minus.sup_psi()},
        "iteration": {"plus": fs.plus.diagnostics, "minus": fs.minus.diagnostics},
    })
}

const BRANCH_COLUMNS: [&str; 8] = ["re_y", "im_y", "re_yq", "im_yq", "re_phi", "im_phi", "re_psi", "im_psi"];

/// Branch table with the versioned header line.
pub fn solution_csv(fs: &FundamentalSystem) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    let mut cols = vec!["x".to_string(), "t".to_string()];
    for b in ["plus", "minus"] {
        cols.extend(BRANCH_COLUMNS.iter().map(|c| format!("{c}_{b}")));
    }
    cols.push("re_w_norm".into());
    cols.push("im_w_norm".into());
    out.push_str(&cols.join(","));
    out.push('\n');
    let row = |br: &SolutionBranch, j: usize| {
        [br.y[j], br.y_quasi[j], br.phi[j], br.psi[j]].iter().flat_map(|z| [z.re, z.im]).collect::<Vec<f64>>()
    };
    for j in 0..fs.plus.x.len() {
        let mut vals = vec![fs.plus.x[j], fs.plus.t[j]];
        vals.extend(row(&fs.plus, j));
        vals.extend(row(&fs.minus, j));
        vals.push(fs.normalized_wronskian[j].re);
        vals.push(fs.normalized_wronskian[j].im);
        let line: Vec<String> = vals.iter().map(|v| format!("{v:e}")).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

fn branch_json(br: &SolutionBranch) -> serde_json::Value {
    let pairs = |v: &[Complex64]| v.iter().map(|z| c2(*z)).collect::<Vec<_>>();
    json!({
        "x": br.x, "t": br.t,
        "y": pairs(&br.y), "y_quasi": pairs(&br.y_quasi),
        "phi": pairs(&br.phi), "psi": pairs(&br.psi),
    })
}

fn cmd_solve(cfg: &RunConfig) -> Result<i32> {
    let fs = cfg.solve(cfg.single_lambda()?)?;
    let diag = system_diagnostics(&fs);
    match cfg.format {
        Format::Csv => {
            write_output(cfg.out.as_deref(), &solution_csv(&fs))?;
            if let Some(p) = &cfg.out {
                std::fs::write(sidecar(p), serde_json::to_string_pretty(&diag)? + "\n")?;
            }
        }
        Format::Json => {
            let doc = json!({
                "version": CSV_HEADER.trim_start_matches("# "),
                "diagnostics": diag,
                "branches": {"plus": branch_json(&fs.plus), "minus": branch_json(&fs.minus)},
            });
            write_output(cfg.out.as_deref(), &(serde_json::to_string(&doc)? + "\n"))?;
        }
    }
    Ok(exit::OK)
}

#[derive(Serialize)]
struct SweepRow {
    lambda: [f64; 2],
    abs_lambda: f64,
    status: String,
    result: Option<RemainderSample>,
}

fn failure_status(err: &Error) -> String {
    match err {
        Error::MuGuard { .. } | Error::HalfPlane(_) => "FAILED(guard)".into(),
        other => format!("FAILED({})", other.kind()),
    }
}

fn cmd_sweep(cfg: &RunConfig) -> Result<i32> {
    if cfg.lambdas.windows(2).any(|w| w[0].norm() > w[1].norm()) {
        return Err(Error::Config("sweep points must be ordered by increasing |lambda|".into()));
    }
    let results: Vec<Result<RemainderSample>> = {
        use rayon::prelude::*;
        cfg.lambdas
            .par_iter()
            .map(|&l| {
                let start = std::time::Instant::now();
                let fs = cfg.solve(l)?;
                Ok(RemainderSample::from_system(&fs, start.elapsed().as_secs_f64()))
            })
            .collect()
    };
    let mut rows = Vec::with_capacity(results.len());
    let mut ok_samples = Vec::new();
    for (l, res) in cfg.lambdas.iter().zip(results) {
        match res {
            Ok(s) => {
                ok_samples.push(s.clone());
                rows.push(SweepRow { lambda: c2(*l), abs_lambda: l.norm(), status: "ok".into(), result: Some(s) });
            }
            Err(e) => rows.push(SweepRow { lambda: c2(*l), abs_lambda: l.norm(), status: failure_status(&e), result: None }),
        }
    }
    let partial = ok_samples.len() < rows.len();
    let halfplane = cfg.halfplane_for(cfg.lambdas[0]);
    let report = DecayReport::from_samples(&ok_samples, halfplane, cfg.r);
    let verdict = if !partial && report.passed() { "PASS" } else { "FAIL" };
    match cfg.format {
        Format::Csv => {
            let mut out = String::new();
            writeln!(out, "{CSV_HEADER}").unwrap();
            let mut header = "re_lambda,im_lambda,abs_lambda,sup_phi_plus,sup_phi_minus,sup_psi_plus,sup_psi_minus,iterations,status".to_string();
            if cfg.timings {
                header.push_str(",wall_seconds");
            }
            writeln!(out, "{header}").unwrap();
            for row in &rows {
                let mut line = format!("{:e},{:e},{:e}", row.lambda[0], row.lambda[1], row.abs_lambda);
                match &row.result {
                    Some(s) => write!(
                        line,
                        ",{:e},{:e},{:e},{:e},{}",
                        s.sup_phi_plus, s.sup_phi_minus, s.sup_psi_plus, s.sup_psi_minus, s.iterations
                    )
                    .unwrap(),
                    None => line.push_str(",,,,,"),
                }
                write!(line, ",{}", row.status).unwrap();
                if cfg.timings {
                    match &row.result {
                        Some(s) => write!(line, ",{:.6}", s.wall_seconds).unwrap(),
                        None => line.push(','),
                    }
                }
                writeln!(out, "{line}").unwrap();
            }
            writeln!(out, "# decay {verdict}").unwrap();
            write_output(cfg.out.as_deref(), &out)?;
        }
        Format::Json => {
            let rows_json: Vec<serde_json::Value> = rows
                .iter()
                .map(|r| {
                    let mut v = serde_json::to_value(r).unwrap();
                    if let (false, Some(res)) = (cfg.timings, v.get_mut("result").and_then(|r| r.as_object_mut())) {
                        res.remove("wall_seconds");
                    }
                    v
                })
                .collect();
            let doc = json!({"rows": rows_json, "report": report, "verdict": verdict});
            write_output(cfg.out.as_deref(), &(serde_json::to_string_pretty(&doc)? + "\n"))?;
        }
    }
    Ok(if partial { exit::PARTIAL } else { exit::OK })
}

/// Tolerances used by `verify`.
pub const WRONSKIAN_TOL: f64 = 1e-6;
pub const SIGMA_TOL: f64 = 1e-6;
pub const IDENTITY_TOL: f64 = 1e-6;

#[derive(Clone, Debug, Serialize)]
pub struct InvariantCheck {
    pub lambda: [f64; 2],
    pub name: &'static str,
    pub defect: f64,
    pub tol: f64,
    pub passed: bool,
}

/// Invariant defects for one spectral point.
pub fn invariant_checks(cfg: &RunConfig, lambda: Complex64) -> Result<Vec<InvariantCheck>> {
    let disc = discretize(&cfg.cs, lambda, &cfg.iteration)?;
    let fs = solve_on(&disc, lambda, cfg.r, cfg.halfplane_for(lambda), &cfg.iteration)?;
    let check = |name, defect: f64, tol| InvariantCheck { lambda: c2(lambda), name, defect, tol, passed: defect <= tol };
    Ok(vec![
        check("wronskian", fs.wronskian_defect(), WRONSKIAN_TOL),
        check("sigma_of_t_equals_h_x", disc.ts.sigma_consistency_defect(), SIGMA_TOL),
        check("f_integral_identity", disc.ts.identity_defect(), IDENTITY_TOL),
        check("fixed_point_residual", fs.residual(), 10.0 * cfg.iteration.tol),
    ])
}

fn cmd_verify(cfg: &RunConfig) -> Result<i32> {
    let mut checks = Vec::new();
    for &l in &cfg.lambdas {
        checks.extend(invariant_checks(cfg, l)?);
    }
    let all = checks.iter().all(|c| c.passed);
    match cfg.format {
        Format::Csv => {
            let mut out = format!("{CSV_HEADER}\nre_lambda,im_lambda,invariant,defect,tol,status\n");
            for c in &checks {
                let status = if c.passed { "pass" } else { "FAIL" };
                writeln!(out, "{:e},{:e},{},{:e},{:e},{status}", c.lambda[0], c.lambda[1], c.name, c.defect, c.tol).unwrap();
            }
            write_output(cfg.out.as_deref(), &out)?;
        }
        Format::Json => {
            let doc = json!({"checks": checks, "passed": all});
            write_output(cfg.out.as_deref(), &(serde_json::to_string_pretty(&doc)? + "\n"))?;
        }
    }
    Ok(if all { exit::OK } else { exit::INVARIANT })
}

/// Reference method applicable to a coefficient set, if any.
pub enum OracleChoice {
    Constant { rho0: f64 },
    Delta { c: Complex64, x0: f64 },
    Adaptive,
}

pub fn choose_oracle(cs: &CoefficientSet) -> Result<OracleChoice> {
    let zero = Some(Complex64::new(0.0, 0.0));
    let p0 = cs.p_profile().as_constant() == zero;
    let rho = cs.rho_profile().as_constant();
    let rp0 = cs.rho_prime_profile().as_constant() == zero;
    if p0 && rp0 {
        if let Some(rho0) = rho {
            if cs.u_profile().as_constant().is_some() {
                return Ok(OracleChoice::Constant { rho0: rho0.re });
            }
            if rho0 == Complex64::new(1.0, 0.0) {
                if let Profile::Expr { primitive: Primitive::Step { x0, height, .. }, scale } = cs.u_profile() {
                    return Ok(OracleChoice::Delta { c: scale * height, x0: *x0 });
                }
            }
        }
    }
    if cs.breakpoints().is_empty() {
        Ok(OracleChoice::Adaptive)
    } else {
        Err(Error::Config("no reference solution is available for these coefficients".into()))
    }
}

pub fn oracle_for(
    cs: &CoefficientSet,
    choice: &OracleChoice,
    lambda: Complex64,
    branch: Branch,
    halfplane: HalfPlane,
    xs: &[f64],
) -> Result<OracleSolution> {
    let anchor = branch.anchor(halfplane);
    match choice {
        OracleChoice::Constant { rho0 } => constant_closed_form(*rho0, lambda, cs.interval(), branch, xs),
        OracleChoice::Delta { c, x0 } => transfer_matrix_delta(*c, *x0, lambda, cs.interval(), branch, anchor, xs),
        OracleChoice::Adaptive => adaptive_reference(cs, lambda, branch, anchor, 1e-14, xs),
    }
}

/// At most `max_points` solver nodes including both endpoints.
pub fn subsample(x: &[f64], max_points: usize) -> Vec<f64> {
    let n = x.len();
    let stride = (n - 1).div_ceil(max_points.max(2) - 1).max(1);
    let mut out: Vec<f64> = x.iter().step_by(stride).copied().collect();
    if *out.last().unwrap() != x[n - 1] {
        out.push(x[n - 1]);
    }
    out
}

fn cmd_compare_oracle(cfg: &RunConfig) -> Result<i32> {
    let choice = choose_oracle(&cfg.cs)?;
    let mut records = Vec::new();
    let mut all = true;
    for &l in &cfg.lambdas {
        let fs = cfg.solve(l)?;
        let hp = fs.halfplane;
        for br in [Branch::Plus, Branch::Minus] {
            let b = fs.branch(br);
            let xs = subsample(&b.x, 1025);
            let o = oracle_for(&cfg.cs, &choice, l, br, hp, &xs)?;
            let diff = o.sup_difference(&b.x, &b.y, &b.y_quasi)?;
            let tol = (1e-6f64).max(100.0 * o.est_error);
            all &= diff <= tol;
            records.push(json!({
                "lambda": c2(l), "branch": br, "method": o.method,
                "sup_difference": diff, "est_error": o.est_error, "tol": tol, "passed": diff <= tol,
            }));
        }
    }
    match cfg.format {
        Format::Csv => {
            let mut out = format!("{CSV_HEADER}\nre_lambda,im_lambda,branch,method,sup_difference,est_error,tol,status\n");
            for r in &records {
                writeln!(
                    out,
                    "{:e},{:e},{},{},{:e},{:e},{:e},{}",
                    r["lambda"][0].as_f64().unwrap(),
                    r["lambda"][1].as_f64().unwrap(),
                    r["branch"].as_str().unwrap(),
                    r["method"].as_str().unwrap(),
                    r["sup_difference"].as_f64().unwrap(),
                    r["est_error"].as_f64().unwrap(),
                    r["tol"].as_f64().unwrap(),
                    if r["passed"].as_bool().unwrap() { "pass" } else { "FAIL" },
                )
                .unwrap();
            }
            write_output(cfg.out.as_deref(), &out)?;
        }
        Format::Json => {
            let doc = json!({"comparisons": records, "passed": all});
            write_output(cfg.out.as_deref(), &(serde_json::to_string_pretty(&doc)? + "\n"))?;
        }
    }
    Ok(if all { exit::OK } else { exit::INVARIANT })
}

/// Machine-readable error record written to standard error.
pub fn error_record(err: &Error) -> serde_json::Value {
    json!({"error": err.kind(), "message": err.to_string(), "exit_code": exit_code(err)})
}

fn dispatch(cli: &Cli) -> Result<i32> {
    let args = match &cli.command {
        Command::Solve(a) | Command::Sweep(a) | Command::Verify(a) | Command::CompareOracle(a) => a,
    };
    let cfg = RunConfig::from_args(args)?;
    let run = || match &cli.command {
        Command::Solve(_) => cmd_solve(&cfg),
        Command::Sweep(_) => cmd_sweep(&cfg),
        Command::Verify(_) => cmd_verify(&cfg),
        Command::CompareOracle(_) => cmd_compare_oracle(&cfg),
    };
    match args.jobs {
        Some(0) => Err(Error::Config("--jobs must be >= 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(run),
        None => run(),
    }
}

/// Run the command line and return the process exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => exit::OK,
                _ => exit::OTHER,
            };
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("{}", error_record(&err));
            exit_code(&err)
        }
    }
}
