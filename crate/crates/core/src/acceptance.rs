//! The regression suite: one runner per acceptance criterion.
//!
//! Each criterion produces a [`CriterionReport`] made of individual checks. The
//! same runner backs the `acceptance` test target and the `minres regress`
//! command. Stretch targets only run when [`SuiteConfig::stretch`] is set.

use std::f64::consts::PI;
use std::fmt;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::chebyshev::{cheb_coeffs_with, default_nodes, QuadratureRule};
use crate::functions::Builtin;
use crate::kernels::{
    apply_kernel, conv_rate_bound, eval_kernel, kpm_coefficient, kpm_jackson, linspace, product_kernel,
    prop1_bound_lipschitz, resolution, uniform_error_with, univariate_minres_oracle, univariate_sigma2,
    KernelCoefficients,
};
use crate::reference::Reference;
use crate::sdp_model::solve_full;
use crate::solver::SolverConfig;
use crate::symmetry::irreps::multiplicities_by_characters;
use crate::symmetry::{compute_blocks, solve_reduced};
use crate::Execution;

/// Environment variable that switches on the stretch targets.
pub const STRETCH_ENV: &str = "MINRES_STRETCH";

pub const CRITERIA: [u8; 8] = [1, 2, 3, 4, 5, 6, 7, 8];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "SKIP",
        })
    }
}

/// One comparison inside a criterion.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measured: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub note: String,
}

impl Check {
    fn abs(name: impl Into<String>, expected: f64, measured: f64, tol: f64) -> Self {
        let ok = (expected - measured).abs() <= tol;
        Self::value(name, ok, expected, measured, tol)
    }

    fn rel(name: impl Into<String>, expected: f64, measured: f64, tol: f64) -> Self {
        let ok = (expected - measured).abs() <= tol * expected.abs();
        Self::value(name, ok, expected, measured, tol)
    }

    /// `measured <= bound`.
    fn at_most(name: impl Into<String>, bound: f64, measured: f64) -> Self {
        Self::value(name, measured <= bound, bound, measured, 0.0)
    }

    fn value(name: impl Into<String>, ok: bool, expected: f64, measured: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            expected: Some(expected),
            measured: Some(measured),
            tolerance: Some(tol),
            note: String::new(),
        }
    }

    fn flag(name: impl Into<String>, ok: bool, note: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            expected: None,
            measured: None,
            tolerance: None,
            note: note.into(),
        }
    }

    fn error(name: impl Into<String>, err: impl fmt::Display) -> Self {
        Self::flag(name, false, err.to_string())
    }

    fn skip(name: impl Into<String>, note: impl Into<String>) -> Self {
        Self {
            status: Status::Skip,
            ..Self::flag(name, true, note)
        }
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionReport {
    pub id: u8,
    pub title: &'static str,
    pub status: Status,
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
    pub elapsed_s: f64,
    pub budget_s: Option<f64>,
}

impl CriterionReport {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }

    pub fn count(&self, status: Status) -> usize {
        self.checks.iter().filter(|c| c.status == status).count()
    }
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] criterion {}: {} ({} pass, {} fail, {} skip; {:.2} s)",
            self.status,
            self.id,
            self.title,
            self.count(Status::Pass),
            self.count(Status::Fail),
            self.count(Status::Skip),
            self.elapsed_s
        )
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub passed: bool,
    pub stretch: bool,
    pub criteria: Vec<CriterionReport>,
}

impl SuiteReport {
    pub fn to_json(&self) -> crate::Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub reference: Reference,
    pub solver: SolverConfig,
    /// Run the optional stretch targets as well.
    pub stretch: bool,
    /// Points per axis for uniform error grids.
    pub grid: usize,
    pub seed: u64,
    pub execution: Execution,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            reference: Reference::embedded(),
            solver: SolverConfig::default(),
            stretch: false,
            grid: 501,
            seed: 7,
            execution: Execution::default(),
        }
    }
}

impl SuiteConfig {
    /// Defaults, with stretch targets enabled when `MINRES_STRETCH` is set to
    /// anything other than `0` or an empty string.
    pub fn from_env() -> Self {
        let stretch = std::env::var(STRETCH_ENV).is_ok_and(|v| !v.is_empty() && v != "0");
        Self {
            stretch,
            ..Self::default()
        }
    }
}

pub fn title(id: u8) -> &'static str {
    match id {
        1 => "univariate closed form",
        2 => "sigma^2 table, SDP column",
        3 => "sigma^2 table, product column",
        4 => "block structure",
        5 => "full vs reduced equivalence",
        6 => "decoupled degrees",
        7 => "approximation errors",
        8 => "property suite",
        _ => "unknown criterion",
    }
}

fn budget(id: u8) -> Option<f64> {
    match id {
        1 => Some(10.0),
        2 => Some(600.0),
        4 => Some(60.0),
        5 => Some(300.0),
        _ => None,
    }
}

pub fn run_suite(cfg: &SuiteConfig) -> SuiteReport {
    let criteria: Vec<_> = CRITERIA.iter().map(|&id| run_criterion(id, cfg)).collect();
    SuiteReport {
        passed: criteria.iter().all(|c| c.status != Status::Fail),
        stretch: cfg.stretch,
        criteria,
    }
}

/// Run a single criterion; unknown ids produce a failed report.
pub fn run_criterion(id: u8, cfg: &SuiteConfig) -> CriterionReport {
    let start = Instant::now();
    let mut warnings = Vec::new();
    let mut checks = match id {
        1 => univariate(cfg),
        2 => sdp_table(cfg, &mut warnings),
        3 => product_table(cfg, &mut warnings),
        4 => block_structure(cfg, &mut warnings),
        5 => full_vs_reduced(cfg),
        6 => decoupled(cfg, &mut warnings),
        7 => approximation(cfg, &mut warnings),
        8 => properties(cfg),
        _ => vec![Check::flag("criterion id", false, format!("no criterion {id}"))],
    };
    let elapsed_s = start.elapsed().as_secs_f64();
    let budget_s = budget(id);
    if let Some(b) = budget_s {
        checks.push(Check::at_most("runtime budget (s)", b, elapsed_s));
    }
    for c in checks.iter().filter(|c| c.status == Status::Skip) {
        warnings.push(format!("skipped {}: {}", c.name, c.note));
    }
    let status = if checks.iter().any(|c| c.status == Status::Fail) {
        Status::Fail
    } else if checks.iter().all(|c| c.status == Status::Skip || c.name.starts_with("runtime")) {
        Status::Skip
    } else {
        Status::Pass
    };
    CriterionReport {
        id,
        title: title(id),
        status,
        checks,
        warnings,
        elapsed_s,
        budget_s,
    }
}

fn solver(cfg: &SuiteConfig) -> SolverConfig {
    SolverConfig {
        execution: cfg.execution,
        ..cfg.solver.clone()
    }
}

fn max_abs_diff(a: &KernelCoefficients, b: &KernelCoefficients) -> f64 {
    a.values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn univariate(cfg: &SuiteConfig) -> Vec<Check> {
    let sc = solver(cfg);
    let mut checks = Vec::new();
    for r in 1..=20 {
        let solved = match solve_full(1, r, r, &sc) {
            Ok(s) => s,
            Err(e) => {
                checks.push(Check::error(format!("r={r} solve"), e));
                continue;
            }
        };
        checks.push(Check::abs(format!("r={r} sigma^2"), univariate_sigma2(r), solved.sigma2, 1e-7));
        let g_err = (0..=r)
            .map(|k| (solved.kernel.get(&[k]) - kpm_coefficient(r, k)).abs())
            .fold(0.0, f64::max);
        checks.push(Check::abs(format!("r={r} max |g_k - g_k^KPM|"), 0.0, g_err, 1e-7));
    }
    // The eigenvector oracle is independent of the closed form and the SDP.
    for r in [5, 20] {
        match univariate_minres_oracle(r) {
            Ok((_, sigma2)) => checks.push(Check::abs(
                format!("r={r} eigen oracle sigma^2"),
                univariate_sigma2(r),
                sigma2,
                1e-7,
            )),
            Err(e) => checks.push(Check::error(format!("r={r} eigen oracle"), e)),
        }
    }
    checks
}

fn sdp_table(cfg: &SuiteConfig, warnings: &mut Vec<String>) -> Vec<Check> {
    let sc = solver(cfg);
    let cases: [(usize, &[u32]); 3] = [(2, &[1, 2, 3, 4, 10, 20]), (3, &[1, 3, 6, 9]), (4, &[1, 2, 4])];
    let mut checks = Vec::new();
    for (n, rs) in cases {
        for &r in rs {
            let name = format!("n={n} r={r}");
            let Some(expected) = cfg.reference.table2(n, r) else {
                checks.push(Check::skip(name, "no fixture value"));
                continue;
            };
            match solve_reduced(n, r, r, &sc) {
                Ok(s) => checks.push(Check::abs(name, expected, s.sigma2, 1e-3)),
                Err(e) => checks.push(Check::error(name, e)),
            }
        }
    }
    if checks.iter().any(|c| c.status == Status::Skip) {
        warnings.push("sigma^2 fixture is incomplete".into());
    }
    checks
}

fn product_table(cfg: &SuiteConfig, _warnings: &mut Vec<String>) -> Vec<Check> {
    let mut checks = Vec::new();
    for (n, degree) in [(2usize, 4u32), (2, 10), (3, 9), (4, 8)] {
        let r_uni = degree / n as u32;
        let name = format!("n={n} degree={degree}");
        let kernel = kpm_jackson(r_uni).and_then(|k| product_kernel(&vec![k; n]));
        let measured = match kernel {
            Ok(k) => resolution(&k),
            Err(e) => {
                checks.push(Check::error(name, e));
                continue;
            }
        };
        let analytic = n as f64 * (1.0 - (PI / (r_uni as f64 + 2.0)).cos());
        checks.push(Check::abs(format!("{name} analytic"), analytic, measured, 1e-12));
        match cfg.reference.product(n, degree) {
            Some(expected) => checks.push(Check::abs(format!("{name} table"), expected, measured, 1e-3)),
            None => checks.push(Check::skip(format!("{name} table"), "no fixture value")),
        }
    }
    checks
}

fn block_structure(cfg: &SuiteConfig, _warnings: &mut Vec<String>) -> Vec<Check> {
    let mut cases: Vec<(usize, u32)> = (2..=4).flat_map(|n| (1..=6).map(move |r| (n, r))).collect();
    cases.extend([(5, 5), (3, 10)]);
    let mut checks = Vec::new();
    for (n, r) in cases {
        let name = format!("n={n} r={r}");
        let blocks = match compute_blocks(n, r) {
            Ok(b) => b,
            Err(e) => {
                checks.push(Check::error(name, e));
                continue;
            }
        };
        let by_characters: Vec<usize> = multiplicities_by_characters(n, r).into_iter().map(|(_, k)| k).collect();
        checks.push(Check::flag(
            format!("{name} character oracle"),
            blocks.dims == by_characters,
            format!("blocks {:?}, characters {:?}", blocks.dims, by_characters),
        ));
        match cfg.reference.table1_row(n, r) {
            Some(row) => {
                let ok = blocks.dims == row.blocks && blocks.order() == row.s && blocks.k() == row.blocks.len();
                checks.push(Check::flag(
                    format!("{name} table"),
                    ok,
                    format!("computed {:?} s={}, expected {:?} s={}", blocks.dims, blocks.order(), row.blocks, row.s),
                ));
            }
            None => checks.push(Check::skip(format!("{name} table"), "row missing from fixture")),
        }
    }
    checks
}

fn full_vs_reduced(cfg: &SuiteConfig) -> Vec<Check> {
    let sc = solver(cfg);
    let cases = (1..=6)
        .map(|r| (2, r))
        .chain((1..=4).map(|r| (3, r)))
        .chain((1..=3).map(|r| (4, r)));
    let mut checks = Vec::new();
    for (n, r) in cases {
        let name = format!("n={n} r={r}");
        match (solve_full(n, r, r, &sc), solve_reduced(n, r, r, &sc)) {
            (Ok(f), Ok(red)) => {
                checks.push(Check::abs(format!("{name} optimum"), f.sigma2, red.sigma2, 1e-6));
                checks.push(Check::abs(
                    format!("{name} max coefficient gap"),
                    0.0,
                    max_abs_diff(&f.kernel, &red.kernel),
                    1e-6,
                ));
            }
            (Err(e), _) | (_, Err(e)) => checks.push(Check::error(name, e)),
        }
    }
    checks
}

fn decoupled(cfg: &SuiteConfig, _warnings: &mut Vec<String>) -> Vec<Check> {
    let sc = solver(cfg);
    let mut checks = Vec::new();
    for (n, r, rp, stretch) in [(2usize, 3u32, 4u32, false), (2, 5, 7, false), (3, 2, 4, false), (3, 10, 18, true)] {
        let name = format!("n={n} r={r} r'={rp}");
        if stretch && !cfg.stretch {
            checks.push(Check::skip(name, format!("stretch target; set {STRETCH_ENV}=1")));
            continue;
        }
        let Some(expected) = cfg.reference.decoupled(n, r, rp) else {
            checks.push(Check::skip(name, "no fixture value"));
            continue;
        };
        match solve_reduced(n, r, rp, &sc) {
            Ok(s) => checks.push(Check::abs(name, expected, s.sigma2, 1e-3)),
            Err(e) => checks.push(Check::error(name, e)),
        }
    }
    checks
}

/// Largest `|f|` on the error grid.
fn grid_sup(f: Builtin, grid: usize, exec: Execution) -> f64 {
    let axis = linspace(grid);
    exec.max(grid * grid, |p| f.eval(&[axis[p / grid], axis[p % grid]]).abs())
}

fn approximation(cfg: &SuiteConfig, warnings: &mut Vec<String>) -> Vec<Check> {
    let sc = solver(cfg);
    let mut degrees = vec![10];
    if cfg.stretch {
        degrees.push(50);
    }
    let mut checks = Vec::new();
    for r in degrees {
        let kernels = [
            ("sdp", solve_reduced(2, r, r, &sc).map(|s| s.kernel)),
            ("product", kpm_jackson(r / 2).and_then(|k| product_kernel(&[k.clone(), k]))),
        ];
        for func in [Builtin::Qsin, Builtin::Peaks] {
            let coeffs = cheb_coeffs_with(cfg.execution, |x| func.eval(x), 2, r, default_nodes(r));
            let sup = grid_sup(func, cfg.grid, cfg.execution);
            for (label, kernel) in &kernels {
                let name = format!("{} r={r} {label}", func.name());
                let Some(expected) = cfg.reference.approx_error(func.name(), r, label) else {
                    checks.push(Check::skip(name, "no fixture value"));
                    continue;
                };
                let measured = match (kernel, &coeffs) {
                    (Ok(k), Ok(c)) => apply_kernel(k, c)
                        .and_then(|a| uniform_error_with(cfg.execution, |x| func.eval(x), &a, cfg.grid)),
                    (Err(e), _) => Err(crate::Error::NumericalFailure(e.to_string())),
                    (_, Err(e)) => Err(crate::Error::NumericalFailure(e.to_string())),
                };
                match measured {
                    Ok(m) => {
                        let mut check = Check::rel(name, expected, m, 0.05);
                        // A non-negative kernel with unit mass cannot err by more than 2 sup|f|.
                        if expected > 2.0 * sup {
                            let note = format!("reference value exceeds 2 sup|f| = {:.4} on the grid", 2.0 * sup);
                            warnings.push(format!("{}: {note}", check.name));
                            check = check.with_note(note);
                        }
                        checks.push(check);
                    }
                    Err(e) => checks.push(Check::error(name, e)),
                }
            }
        }
    }
    if !cfg.stretch {
        checks.push(Check::skip("r=50 targets", format!("stretch targets; set {STRETCH_ENV}=1")));
    }
    checks
}

fn properties(cfg: &SuiteConfig) -> Vec<Check> {
    let sc = solver(cfg);
    let mut checks = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    // Bivariate optima for r = 1..=10 drive most of the checks.
    let mut sweep = Vec::new();
    for r in 1..=10u32 {
        match solve_reduced(2, r, r, &sc) {
            Ok(s) => sweep.push((r, s.kernel, s.sigma2)),
            Err(e) => checks.push(Check::error(format!("n=2 r={r} solve"), e)),
        }
    }
    let mut kernels: Vec<(String, KernelCoefficients)> = sweep
        .iter()
        .filter(|(r, ..)| *r <= 8)
        .map(|(r, k, _)| (format!("sdp n=2 r={r}"), k.clone()))
        .collect();
    for (n, r) in [(1usize, 6u32), (3, 3), (3, 4)] {
        match solve_full(n, r, r, &sc) {
            Ok(s) => kernels.push((format!("sdp n={n} r={r}"), s.kernel)),
            Err(e) => checks.push(Check::error(format!("n={n} r={r} solve"), e)),
        }
    }
    if let Ok(k) = kpm_jackson(4).and_then(|k| product_kernel(&[k.clone(), k])) {
        kernels.push(("product n=2 degree=8".into(), k));
    }

    for (name, k) in &kernels {
        let n = k.n();
        let mut min = f64::INFINITY;
        for _ in 0..2000 {
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            min = min.min(eval_kernel(k, &x, &y).unwrap_or(f64::NEG_INFINITY));
        }
        checks.push(Check::value(format!("{name} min sampled K"), min >= -1e-6, -1e-6, min, 0.0));

        let quad = QuadratureRule::new(n, k.r() as usize + 1);
        let mass_err = quad.map_or(f64::INFINITY, |q| {
            (0..5)
                .map(|_| {
                    let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
                    (q.integrate(|y| eval_kernel(k, &x, y).unwrap_or(f64::NAN)) - 1.0).abs()
                })
                .fold(0.0, f64::max)
        });
        checks.push(Check::abs(format!("{name} unit mass"), 0.0, mass_err, 1e-8));

        if n <= 2 && k.r() <= 8 {
            let m = k.r() as usize / 2 + 3;
            let integral = QuadratureRule::new(2 * n, m).map_or(f64::NAN, |q| {
                q.integrate(|z| {
                    let (x, y) = z.split_at(n);
                    let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum();
                    d2 * eval_kernel(k, x, y).unwrap_or(f64::NAN)
                })
            });
            checks.push(Check::abs(format!("{name} resolution integral"), resolution(k), integral, 1e-6));
        }
        if name.starts_with("sdp") {
            checks.push(Check::abs(format!("{name} permutation asymmetry"), 0.0, k.asymmetry(), 1e-6));
        }
    }

    for pair in sweep.windows(2) {
        let ((r0, _, s0), (r1, _, s1)) = (&pair[0], &pair[1]);
        checks.push(Check::at_most(format!("sigma^2 monotone n=2 r={r0}->{r1}"), s0 + 1e-8, *s1));
    }
    for (r, _, sigma2) in sweep.iter().filter(|(r, ..)| *r >= 2) {
        if let Ok(bound) = conv_rate_bound(2, *r) {
            checks.push(Check::at_most(format!("rate bound n=2 r={r}"), bound + 1e-8, *sigma2));
        }
    }

    for f in Builtin::ALL {
        let (Some(lip), Some(2)) = (f.lipschitz(), f.dim()) else {
            continue;
        };
        for (r, k, sigma2) in &sweep {
            let bound = prop1_bound_lipschitz(lip, sigma2.max(0.0).sqrt());
            let err = cheb_coeffs_with(cfg.execution, |x| f.eval(x), 2, *r, default_nodes(*r))
                .and_then(|c| apply_kernel(k, &c))
                .and_then(|a| uniform_error_with(cfg.execution, |x| f.eval(x), &a, cfg.grid));
            match err {
                Ok(e) => checks.push(Check::at_most(format!("{} error bound r={r}", f.name()), bound, e)),
                Err(e) => checks.push(Check::error(format!("{} error bound r={r}", f.name()), e)),
            }
        }
    }
    checks
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_table1_row_is_skipped_with_warning() {
        let mut cfg = SuiteConfig::default();
        cfg.reference.table1.retain(|row| !(row.n == 3 && row.r == 10));
        let report = run_criterion(4, &cfg);
        assert_eq!(report.status, Status::Pass);
        assert_eq!(report.count(Status::Skip), 1);
        assert!(report.warnings.iter().any(|w| w.contains("n=3 r=10")));
    }

    #[test]
    fn empty_fixture_skips_table_checks() {
        let cfg = SuiteConfig {
            reference: Reference::from_json("{}").unwrap(),
            ..SuiteConfig::default()
        };
        let report = run_criterion(6, &cfg);
        assert_eq!(report.status, Status::Skip);
        assert_eq!(report.count(Status::Fail), 0);
    }

    #[test]
    fn unknown_criterion_fails() {
        let report = run_criterion(42, &SuiteConfig::default());
        assert_eq!(report.status, Status::Fail);
        assert!(report.to_string().starts_with("[FAIL] criterion 42"));
    }

    #[test]
    fn report_serializes() {
        let report = SuiteReport {
            passed: true,
            stretch: false,
            criteria: vec![run_criterion(3, &SuiteConfig::default())],
        };
        let json: serde_json::Value = serde_json::from_str(&report.to_json().unwrap()).unwrap();
        assert_eq!(json["criteria"][0]["status"], "pass");
    }
}
