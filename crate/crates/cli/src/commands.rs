use std::io::Write;
use std::path::Path;

use anyhow::Context as _;
use clap::ValueEnum;
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde_json::json;

use minres_core::acceptance::{run_criterion, Status, SuiteConfig, SuiteReport, CRITERIA, STRETCH_ENV};
use minres_core::chebyshev::{cheb_coeffs, cheb_eval_multi, default_nodes};
use minres_core::functions::Builtin;
use minres_core::indexcomb::MultiIndex;
use minres_core::kernels::{
    apply_kernel, dirichlet, eval_kernel, fejer, grid_point, kpm_jackson, linspace, product_kernel, read_coeff_file,
    resolution, uniform_error, write_coeff_file, KernelCoefficients,
};
use minres_core::reference::Reference;
use minres_core::sdp_model::{solve_full, SolvedKernel};
use minres_core::solver::{solve, SolverConfig};
use minres_core::symmetry::{build_reduced_sdp_with, compute_blocks_seeded, extract_coefficients_reduced, DEFAULT_SEED};
use minres_core::Execution;

use crate::config::parse_degrees;
use crate::{
    usage, ApproxArgs, BlocksArgs, Context, Format, InspectArgs, KernelGridArgs, KernelKind, RegressArgs, SigmaArgs,
    SolverArgs, SweepArgs, Symmetry,
};

/// Coefficient agreement required between full and reduced solves.
const AGREE_TOL: f64 = 1e-6;

/// Fixed 6-decimal rendering used for every printed or dumped sigma^2.
fn fmt6(v: f64) -> String {
    format!("{v:.6}")
}

/// Flag, then config value, then nothing.
fn pick_enum<T: ValueEnum>(flag: Option<T>, file: &Option<String>, key: &str) -> anyhow::Result<Option<T>> {
    match (flag, file) {
        (Some(v), _) => Ok(Some(v)),
        (None, Some(s)) => T::from_str(s, true)
            .map(Some)
            .map_err(|_| usage(format!("config key '{key}' has invalid value '{s}'"))),
        (None, None) => Ok(None),
    }
}

fn required<T>(v: Option<T>, flag: &str) -> anyhow::Result<T> {
    v.ok_or_else(|| usage(format!("--{flag} is required (flag or config file)")))
}

fn single_degree(flag: Option<u32>, file: &Option<String>, key: &str) -> anyhow::Result<Option<u32>> {
    if flag.is_some() {
        return Ok(flag);
    }
    match file {
        None => Ok(None),
        Some(s) => match parse_degrees(s).map_err(usage)?.as_slice() {
            [d] => Ok(Some(*d)),
            _ => Err(usage(format!("config key '{key}' must be a single degree here"))),
        },
    }
}

fn solver_config(ctx: &Context, a: &SolverArgs) -> anyhow::Result<SolverConfig> {
    let d = SolverConfig::default();
    let f = &ctx.file;
    let cfg = SolverConfig {
        tol_gap: a.tol_gap.or(f.tol_gap).unwrap_or(d.tol_gap),
        tol_feas: a.tol_feas.or(f.tol_feas).unwrap_or(d.tol_feas),
        max_iters: a.max_iters.or(f.max_iters).unwrap_or(d.max_iters),
        step_fraction: a.step_fraction.or(f.step_fraction).unwrap_or(d.step_fraction),
        verbose: ctx.verbose,
        execution: d.execution,
    };
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    Ok(cfg)
}

fn check_degrees(n: usize, r: u32, rp: u32) -> anyhow::Result<()> {
    if n == 0 {
        return Err(usage("--n must be positive"));
    }
    if rp < r {
        return Err(usage(format!("--rprime {rp} must be at least --r {r}")));
    }
    Ok(())
}

/// Solve with or without the symmetry reduction. The univariate case has no
/// symmetry to exploit and always uses the full program.
fn solve_kernel(n: usize, r: u32, rp: u32, reduced: bool, seed: u64, cfg: &SolverConfig) -> anyhow::Result<SolvedKernel> {
    if !reduced || n == 1 {
        return Ok(solve_full(n, r, rp, cfg)?);
    }
    let sdp = build_reduced_sdp_with(n, r, rp, seed, cfg.execution)?;
    let solution = solve(&sdp.problem, cfg)?;
    let kernel = extract_coefficients_reduced(&sdp, &solution)?;
    let sigma2 = solution.objective_value + sdp.problem.offset;
    Ok(SolvedKernel {
        kernel,
        sigma2,
        solution,
    })
}

fn max_gap(a: &KernelCoefficients, b: &KernelCoefficients) -> f64 {
    a.values().iter().zip(b.values()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn sigma(ctx: &Context, a: SigmaArgs) -> anyhow::Result<bool> {
    let f = &ctx.file;
    let n = required(a.n.or(f.n), "n")?;
    let r = required(single_degree(a.r, &f.r, "r")?, "r")?;
    let rp = single_degree(a.rprime, &f.rprime, "rprime")?.unwrap_or(r);
    check_degrees(n, r, rp)?;
    let symmetry = pick_enum(a.symmetry, &f.symmetry, "symmetry")?.unwrap_or(Symmetry::On);
    let format = pick_enum(a.format, &f.format, "format")?.unwrap_or(Format::Text);
    let seed = a.seed.or(f.seed).unwrap_or(DEFAULT_SEED);
    let out = a.out.or_else(|| f.out.clone());
    let cfg = solver_config(ctx, &a.solver)?;

    let (primary, full) = match symmetry {
        Symmetry::On => (solve_kernel(n, r, rp, true, seed, &cfg)?, None),
        Symmetry::Off => (solve_kernel(n, r, rp, false, seed, &cfg)?, None),
        Symmetry::Both => {
            let red = solve_kernel(n, r, rp, true, seed, &cfg)?;
            let full = solve_kernel(n, r, rp, false, seed, &cfg)?;
            (red, Some(full))
        }
    };
    let comparison = full.as_ref().map(|fu| {
        let d_sigma = (fu.sigma2 - primary.sigma2).abs();
        let d_coeff = max_gap(&fu.kernel, &primary.kernel);
        (fu.sigma2, d_sigma, d_coeff, d_sigma <= AGREE_TOL && d_coeff <= AGREE_TOL)
    });

    let mut stdout = std::io::stdout().lock();
    match format {
        Format::Text => {
            writeln!(stdout, "{}", fmt6(primary.sigma2))?;
            if let Some((fs, ds, dc, ok)) = comparison {
                writeln!(
                    stdout,
                    "full {} reduced {}: |d sigma^2| = {ds:.1e}, max |d g| = {dc:.1e} ({})",
                    fmt6(fs),
                    fmt6(primary.sigma2),
                    if ok { "agree" } else { "DISAGREE" }
                )?;
            }
        }
        Format::Json => {
            let mut v = json!({
                "n": n, "r": r, "r_prime": rp,
                "symmetry": format!("{symmetry:?}").to_lowercase(),
                "sigma2": fmt6(primary.sigma2).parse::<f64>()?,
                "iterations": primary.solution.iterations,
            });
            if let Some((fs, ds, dc, ok)) = comparison {
                v["sigma2_full"] = json!(fmt6(fs).parse::<f64>()?);
                v["sigma2_gap"] = json!(ds);
                v["coefficient_gap"] = json!(dc);
                v["agree"] = json!(ok);
            }
            writeln!(stdout, "{}", serde_json::to_string_pretty(&v)?)?;
        }
        Format::Csv => {
            writeln!(stdout, "n,r,r_prime,sigma2")?;
            writeln!(stdout, "{n},{r},{rp},{}", fmt6(primary.sigma2))?;
        }
    }
    if let Some(path) = out {
        write_coeff_file(&primary.kernel, &path).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(comparison.is_none_or(|c| c.3))
}

pub fn sweep(ctx: &Context, a: SweepArgs) -> anyhow::Result<bool> {
    let f = &ctx.file;
    let n = required(a.n.or(f.n), "n")?;
    let rs = parse_degrees(&required(a.r.or_else(|| f.r.clone()), "r")?).map_err(usage)?;
    let rps = a.rprime.or_else(|| f.rprime.clone()).map(|s| parse_degrees(&s).map_err(usage)).transpose()?;
    let symmetry = pick_enum(a.symmetry, &f.symmetry, "symmetry")?.unwrap_or(Symmetry::On);
    if symmetry == Symmetry::Both {
        return Err(usage("sweep takes --symmetry on or off"));
    }
    let format = pick_enum(a.format, &f.format, "format")?.unwrap_or(Format::Text);
    let seed = a.seed.or(f.seed).unwrap_or(DEFAULT_SEED);
    let out = a.out.or_else(|| f.out.clone());
    // Jobs run concurrently, so each solve stays on one thread.
    let cfg = SolverConfig {
        execution: Execution::Sequential,
        ..solver_config(ctx, &a.solver)?
    };

    let jobs: Vec<(u32, u32)> = match rps {
        None => rs.iter().map(|&r| (r, r)).collect(),
        Some(rps) => {
            let [r] = rs[..] else {
                return Err(usage("a sweep over --rprime needs a single --r"));
            };
            rps.into_iter().map(|rp| (r, rp)).collect()
        }
    };
    for &(r, rp) in &jobs {
        check_degrees(n, r, rp)?;
    }
    let reduced = symmetry == Symmetry::On;
    let run = |&(r, rp): &(u32, u32)| solve_kernel(n, r, rp, reduced, seed, &cfg).map(|s| s.sigma2);
    #[cfg(feature = "parallel")]
    let results: Vec<_> = jobs.par_iter().map(run).collect();
    #[cfg(not(feature = "parallel"))]
    let results: Vec<_> = jobs.iter().map(run).collect();

    let mut ok = true;
    let mut rows = Vec::new();
    for (&(r, rp), res) in jobs.iter().zip(results) {
        match res {
            Ok(s) => rows.push((r, rp, fmt6(s))),
            Err(e) => {
                ok = false;
                eprintln!("error: n={n} r={r} r'={rp}: {e:#}");
            }
        }
    }

    let mut stdout = std::io::stdout().lock();
    match format {
        Format::Text => {
            for (r, rp, s) in &rows {
                writeln!(stdout, "n={n} r={r} r'={rp} sigma2={s}")?;
            }
        }
        Format::Json => {
            let v: Vec<_> = rows
                .iter()
                .map(|(r, rp, s)| json!({"n": n, "r": r, "r_prime": rp, "sigma2": s.parse::<f64>().unwrap_or(f64::NAN)}))
                .collect();
            writeln!(stdout, "{}", serde_json::to_string_pretty(&v)?)?;
        }
        Format::Csv => write_sweep_csv(&mut stdout, n, &rows)?,
    }
    if let Some(path) = out {
        let file = std::fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        write_sweep_csv(file, n, &rows)?;
    }
    Ok(ok)
}

fn write_sweep_csv<W: Write>(w: W, n: usize, rows: &[(u32, u32, String)]) -> anyhow::Result<()> {
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(["n", "r", "r_prime", "sigma2"])?;
    for (r, rp, s) in rows {
        csv.write_record([n.to_string(), r.to_string(), rp.to_string(), s.clone()])?;
    }
    csv.flush()?;
    Ok(())
}

/// The function being approximated.
enum Target {
    Builtin(Builtin),
    /// A Chebyshev expansion `sum c_a T_a(x)` read from a JSON table.
    Table { terms: Vec<(MultiIndex, f64)> },
}

#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct TableFile {
    n: usize,
    terms: Vec<TableTerm>,
}

#[derive(serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct TableTerm {
    alpha: Vec<u32>,
    c: f64,
}

impl Target {
    fn parse(spec: &str, n: usize) -> anyhow::Result<Self> {
        if let Some(path) = spec.strip_prefix("table:") {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
            let table: TableFile = serde_json::from_str(&text).with_context(|| format!("parsing {path}"))?;
            if table.n != n || table.terms.iter().any(|t| t.alpha.len() != n) {
                return Err(usage(format!("table {path} is not over n = {n} variables")));
            }
            let terms = table.terms.into_iter().map(|t| (MultiIndex::new(t.alpha), t.c)).collect();
            return Ok(Target::Table { terms });
        }
        let b: Builtin = spec.parse().map_err(|e: minres_core::Error| usage(e.to_string()))?;
        b.check_dim(n).map_err(|e| usage(format!("{b}: {e}")))?;
        Ok(Target::Builtin(b))
    }

    fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Target::Builtin(b) => b.eval(x),
            Target::Table { terms } => terms
                .iter()
                .map(|(a, c)| c * cheb_eval_multi(a, x).unwrap_or(f64::NAN))
                .sum(),
        }
    }
}

/// Build the requested kernel of dimension `n` and degree `r`.
fn build_kernel(
    kind: KernelKind,
    n: usize,
    r: u32,
    coeffs: Option<&Path>,
    cfg: &SolverConfig,
) -> anyhow::Result<KernelCoefficients> {
    if let Some(path) = coeffs {
        let k = read_coeff_file(path).with_context(|| format!("reading {}", path.display()))?;
        if k.n() != n || k.r() != r {
            return Err(usage(format!(
                "kernel/degree mismatch: {} holds n={} r={}, requested n={n} r={r}",
                path.display(),
                k.n(),
                k.r()
            )));
        }
        return Ok(k);
    }
    let per_axis = || {
        if !r.is_multiple_of(n as u32) {
            Err(usage(format!(
                "kernel/degree mismatch: a product of {n} univariate kernels needs r divisible by {n}, got {r}"
            )))
        } else {
            Ok(r / n as u32)
        }
    };
    Ok(match kind {
        KernelKind::Sdp => solve_kernel(n, r, r, true, DEFAULT_SEED, cfg)?.kernel,
        KernelKind::Dirichlet => dirichlet(n, r)?,
        KernelKind::Product => product_kernel(&vec![kpm_jackson(per_axis()?)?; n])?,
        KernelKind::Fejer => product_kernel(&vec![fejer(per_axis()?)?; n])?,
    })
}

pub fn approx(ctx: &Context, a: ApproxArgs) -> anyhow::Result<bool> {
    let f = &ctx.file;
    let n = required(a.n.or(f.n), "n")?;
    let r = required(single_degree(a.r, &f.r, "r")?, "r")?;
    check_degrees(n, r, r)?;
    let func = required(a.func.or_else(|| f.func.clone()), "func")?;
    let target = Target::parse(&func, n)?;
    let kind = pick_enum(a.kernel, &f.kernel, "kernel")?.unwrap_or(KernelKind::Sdp);
    let grid = a.grid.or(f.grid).unwrap_or(501);
    if grid < 2 {
        return Err(usage("--grid needs at least 2 points per axis"));
    }
    let nodes = a.nodes.unwrap_or_else(|| default_nodes(r));
    let format = pick_enum(a.format, &f.format, "format")?.unwrap_or(Format::Text);
    let out = a.out.or_else(|| f.out.clone());
    let cfg = solver_config(ctx, &a.solver)?;

    let kernel = build_kernel(kind, n, r, a.coeffs.as_deref(), &cfg)?;
    let eval = |x: &[f64]| target.eval(x);
    let coeffs = cheb_coeffs(eval, n, r, nodes).map_err(|e| usage(e.to_string()))?;
    let approx = apply_kernel(&kernel, &coeffs)?;
    let error = uniform_error(eval, &approx, grid)?;

    let mut stdout = std::io::stdout().lock();
    match format {
        Format::Text => writeln!(stdout, "{}", fmt6(error))?,
        Format::Json => {
            let v = json!({
                "func": func, "kernel": format!("{kind:?}").to_lowercase(), "n": n, "r": r,
                "grid": grid, "nodes": nodes, "error": error, "sigma2": resolution(&kernel),
            });
            writeln!(stdout, "{}", serde_json::to_string_pretty(&v)?)?;
        }
        Format::Csv => {
            writeln!(stdout, "func,kernel,n,r,grid,error")?;
            writeln!(stdout, "{func},{},{n},{r},{grid},{}", format!("{kind:?}").to_lowercase(), fmt6(error))?;
        }
    }
    if let Some(path) = out {
        let file = std::fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        let mut csv = csv::Writer::from_writer(std::io::BufWriter::new(file));
        let mut header: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
        header.extend(["f".into(), "approx".into()]);
        csv.write_record(&header)?;
        let axis = linspace(grid);
        let mut x = vec![0.0; n];
        for p in 0..grid.pow(n as u32) {
            grid_point(&axis, n, p, &mut x);
            let mut rec: Vec<String> = x.iter().map(|v| v.to_string()).collect();
            rec.push(target.eval(&x).to_string());
            rec.push(approx.eval(&x)?.to_string());
            csv.write_record(&rec)?;
        }
        csv.flush()?;
    }
    Ok(true)
}

pub fn blocks(ctx: &Context, a: BlocksArgs) -> anyhow::Result<bool> {
    let f = &ctx.file;
    let n = required(a.n.or(f.n), "n")?;
    let r = required(single_degree(a.r, &f.r, "r")?, "r")?;
    check_degrees(n, r, r)?;
    let seed = a.seed.or(f.seed).unwrap_or(DEFAULT_SEED);
    let format = pick_enum(a.format, &f.format, "format")?.unwrap_or(Format::Text);
    let b = compute_blocks_seeded(n, r, seed)?;
    let list = |sep: &str| b.dims.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(sep);

    let mut stdout = std::io::stdout().lock();
    match format {
        Format::Text => writeln!(stdout, "{} blocks: {}; s={}", b.k(), list(", "), b.order())?,
        Format::Json => {
            let v = json!({
                "n": n, "r": r, "k": b.k(), "blocks": b.dims, "s": b.order(),
                "irrep_dims": b.irrep_dims, "partitions": b.partitions,
            });
            writeln!(stdout, "{}", serde_json::to_string_pretty(&v)?)?;
        }
        Format::Csv => {
            writeln!(stdout, "n,r,k,blocks,s")?;
            writeln!(stdout, "{n},{r},{},{},{}", b.k(), list(";"), b.order())?;
        }
    }
    Ok(true)
}

pub fn kernel_grid(ctx: &Context, a: KernelGridArgs) -> anyhow::Result<bool> {
    let f = &ctx.file;
    let cfg = solver_config(ctx, &a.solver)?;
    let kernel = match &a.coeffs {
        Some(path) if a.n.is_none() && a.r.is_none() => {
            read_coeff_file(path).with_context(|| format!("reading {}", path.display()))?
        }
        coeffs => {
            let n = required(a.n.or(f.n), "n")?;
            let r = required(single_degree(a.r, &f.r, "r")?, "r")?;
            check_degrees(n, r, r)?;
            let kind = pick_enum(a.kernel, &f.kernel, "kernel")?.unwrap_or(KernelKind::Sdp);
            build_kernel(kind, n, r, coeffs.as_deref(), &cfg)?
        }
    };
    let n = kernel.n();
    let y = a.y.unwrap_or_else(|| vec![0.0; n]);
    if y.len() != n {
        return Err(usage(format!("--y has {} entries, expected {n}", y.len())));
    }
    let grid = a.grid.or(f.grid).unwrap_or(101);
    if grid < 2 {
        return Err(usage("--grid needs at least 2 points per axis"));
    }
    let out: Box<dyn Write> = match a.out.or_else(|| f.out.clone()) {
        Some(path) => Box::new(std::io::BufWriter::new(
            std::fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?,
        )),
        None => Box::new(std::io::stdout().lock()),
    };
    let mut csv = csv::Writer::from_writer(out);
    let mut header: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    header.push("k".into());
    csv.write_record(&header)?;
    let axis = linspace(grid);
    let mut x = vec![0.0; n];
    for p in 0..grid.pow(n as u32) {
        grid_point(&axis, n, p, &mut x);
        let mut rec: Vec<String> = x.iter().map(|v| v.to_string()).collect();
        rec.push(eval_kernel(&kernel, &x, &y).map_err(|e| usage(e.to_string()))?.to_string());
        csv.write_record(&rec)?;
    }
    csv.flush()?;
    Ok(true)
}

pub fn inspect(ctx: &Context, a: InspectArgs) -> anyhow::Result<bool> {
    let k = read_coeff_file(&a.path).with_context(|| format!("reading {}", a.path.display()))?;
    let format = pick_enum(a.format, &ctx.file.format, "format")?.unwrap_or(Format::Text);
    let orbits = k.orbit_values();
    let unit: Vec<f64> = (0..k.n()).map(|i| k.g_unit(i)).collect();
    let mut stdout = std::io::stdout().lock();
    match format {
        Format::Json | Format::Csv => {
            let v = json!({
                "n": k.n(), "r": k.r(), "provenance": k.provenance().as_str(),
                "sigma2": resolution(&k), "g0": k.g0(), "g_unit": unit,
                "coefficients": k.values().len(), "orbits": orbits.len(),
            });
            writeln!(stdout, "{}", serde_json::to_string_pretty(&v)?)?;
        }
        Format::Text => {
            writeln!(stdout, "n           {}", k.n())?;
            writeln!(stdout, "r           {}", k.r())?;
            writeln!(stdout, "provenance  {}", k.provenance().as_str())?;
            writeln!(stdout, "sigma2      {}", fmt6(resolution(&k)))?;
            writeln!(stdout, "g0          {}", fmt6(k.g0()))?;
            writeln!(stdout, "g_e1        {}", fmt6(unit[0]))?;
            writeln!(stdout, "entries     {} ({} orbits)", k.values().len(), orbits.len())?;
        }
    }
    Ok(true)
}

pub fn regress(ctx: &Context, a: RegressArgs) -> anyhow::Result<bool> {
    let ids = match a.only {
        Some(ids) => {
            if let Some(bad) = ids.iter().find(|id| !CRITERIA.contains(id)) {
                return Err(usage(format!("no acceptance criterion {bad}")));
            }
            ids
        }
        None => CRITERIA.to_vec(),
    };
    let mut cfg = SuiteConfig::from_env();
    if a.stretch {
        cfg.stretch = true;
    }
    if a.fast {
        cfg.stretch = false;
    }
    if let Some(path) = &a.fixtures {
        cfg.reference = Reference::load(path).with_context(|| format!("loading fixtures {}", path.display()))?;
    }
    if let Some(g) = a.grid.or(ctx.file.grid) {
        cfg.grid = g;
    }
    if ctx.verbose {
        eprintln!("stretch targets: {} (set {STRETCH_ENV}=1 or pass --stretch)", cfg.stretch);
    }

    let mut criteria = Vec::new();
    for id in ids {
        let report = run_criterion(id, &cfg);
        println!("{report}");
        for c in report.failures() {
            let detail = match (c.expected, c.measured) {
                (Some(e), Some(m)) => format!("expected {e}, measured {m}"),
                _ => String::new(),
            };
            println!("    fail {}: {detail} {}", c.name, c.note);
        }
        for w in &report.warnings {
            eprintln!("    warning: {w}");
        }
        criteria.push(report);
    }
    let report = SuiteReport {
        passed: criteria.iter().all(|c| c.status != Status::Fail),
        stretch: cfg.stretch,
        criteria,
    };
    if let Some(path) = &a.report {
        std::fs::write(path, report.to_json()?).with_context(|| format!("writing {}", path.display()))?;
    }
    if !report.passed {
        print_failed(&report);
    }
    Ok(report.passed)
}

fn print_failed(report: &SuiteReport) {
    let failed: Vec<String> = report
        .criteria
        .iter()
        .filter(|c| c.status == Status::Fail)
        .map(|c| c.id.to_string())
        .collect();
    println!("failed criteria: {}", failed.join(", "));
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_decimal_rendering() {
        assert_eq!(fmt6(0.5487091234), "0.548709");
        assert_eq!(fmt6(1.5), "1.500000");
    }

    #[test]
    fn table_target_evaluates_expansion() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.json");
        std::fs::write(&path, r#"{"n": 2, "terms": [{"alpha": [0, 0], "c": 1.0}, {"alpha": [2, 1], "c": 0.5}]}"#)
            .unwrap();
        let t = Target::parse(&format!("table:{}", path.display()), 2).unwrap();
        let x = [0.3, -0.4];
        let expect = 1.0 + 0.5 * (2.0 * 0.09 - 1.0) * -0.4;
        assert!((t.eval(&x) - expect).abs() < 1e-14);
        assert!(Target::parse(&format!("table:{}", path.display()), 3).is_err());
    }

    #[test]
    fn product_kernels_need_divisible_degree() {
        let cfg = SolverConfig::default();
        let e = build_kernel(KernelKind::Product, 2, 5, None, &cfg).unwrap_err();
        assert!(e.is::<crate::UsageError>());
        assert_eq!(build_kernel(KernelKind::Fejer, 2, 6, None, &cfg).unwrap().r(), 6);
    }
}
