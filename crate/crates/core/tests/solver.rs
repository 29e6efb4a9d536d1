//! End-to-end solves of the full and reduced programs.

use minres_core::kernels::{read_coeff_file, univariate_sigma2, write_coeff_file, Provenance};
use minres_core::sdp_model::{build_full_sdp, solve_full};
use minres_core::solver::{solve, SolverConfig};
use minres_core::symmetry::solve_reduced;
use minres_core::{Error, Execution};

#[test]
fn univariate_full_program_hits_closed_form() {
    let s = solve_full(1, 5, 5, &SolverConfig::default()).unwrap();
    assert!((s.sigma2 - univariate_sigma2(5)).abs() < 1e-7);
    assert!((s.sigma2 - 0.0990).abs() < 5e-5);
}

#[test]
fn reduced_program_trivariate_degree_six() {
    let s = solve_reduced(3, 6, 6, &SolverConfig::default()).unwrap();
    assert!((s.sigma2 - 0.7764).abs() < 1e-3, "{}", s.sigma2);
    assert_eq!(s.kernel.provenance(), Provenance::Sdp);
    assert!(s.kernel.is_permutation_invariant(1e-9));
}

#[test]
fn certified_residuals_and_complementarity() {
    let cfg = SolverConfig::default();
    let sdp = build_full_sdp(2, 4, 4).unwrap();
    let sol = solve(&sdp.problem, &cfg).unwrap();
    let trace_scale = sol.x.trace().abs().max(sol.s.trace().abs());
    assert!(sol.x.min_eigenvalue() >= -1e-8 * (1.0 + trace_scale));
    assert!(sol.s.min_eigenvalue() >= -1e-8 * (1.0 + trace_scale));
    assert!(sol.x.inner(&sol.s).abs() / (1.0 + sol.objective_value.abs()) <= 10.0 * cfg.tol_gap);
    let b_inf = sdp.problem.rhs().iter().fold(0.0f64, |m, b| m.max(b.abs()));
    for (k, c) in sdp.problem.constraints.iter().enumerate() {
        let lhs: f64 = c.blocks.iter().map(|(b, a)| a.inner(&sol.x.blocks[*b])).sum();
        assert!((lhs - c.rhs).abs() <= 10.0 * cfg.tol_feas * (1.0 + b_inf), "constraint {k}");
    }
}

#[test]
fn solves_are_deterministic_across_policies() {
    let seq = SolverConfig {
        execution: Execution::Sequential,
        ..SolverConfig::default()
    };
    let par = SolverConfig {
        execution: Execution::Parallel,
        ..SolverConfig::default()
    };
    let a = solve_reduced(3, 4, 4, &seq).unwrap();
    let b = solve_reduced(3, 4, 4, &par).unwrap();
    let c = solve_reduced(3, 4, 4, &par).unwrap();
    assert_eq!(a.solution.iterations, b.solution.iterations);
    assert_eq!(a.sigma2.to_bits(), b.sigma2.to_bits());
    assert_eq!(b.kernel.values(), c.kernel.values());
}

#[test]
fn decoupled_gram_degree_improves_resolution() {
    let cfg = SolverConfig::default();
    let tight = solve_reduced(2, 3, 3, &cfg).unwrap();
    let loose = solve_reduced(2, 3, 4, &cfg).unwrap();
    let full = solve_full(2, 3, 4, &cfg).unwrap();
    assert!((loose.sigma2 - 0.691).abs() < 1e-3);
    assert!(loose.sigma2 < tight.sigma2);
    assert!((loose.sigma2 - full.sigma2).abs() < 1e-6);
    assert_eq!(loose.kernel.provenance(), Provenance::SdpDecoupled);
}

#[test]
fn iteration_cap_surfaces_best_iterate() {
    let cfg = SolverConfig {
        max_iters: 3,
        ..SolverConfig::default()
    };
    match solve_full(2, 3, 3, &cfg) {
        Err(Error::NonConvergence { iterations, best }) => {
            assert_eq!(iterations, 3);
            assert_eq!(best.iterations, best.iterations.min(3));
        }
        other => panic!("expected non-convergence, got {other:?}"),
    }
}

#[test]
fn coefficient_file_round_trip_is_bitwise() {
    let s = solve_reduced(2, 5, 5, &SolverConfig::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("k.json");
    write_coeff_file(&s.kernel, &path).unwrap();
    let back = read_coeff_file(&path).unwrap();
    let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(back.values()), bits(s.kernel.values()));
    assert_eq!(back.provenance(), s.kernel.provenance());
}
