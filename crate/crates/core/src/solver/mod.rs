//! Primal-dual interior-point method for block-diagonal SDPs.
//!
//! Infeasible-start path following with the HKM search direction and a
//! Mehrotra predictor-corrector step. Each iteration forms the dense Schur
//! complement `H_ij = sum_b <A_ib, X_b A_jb S_b^-1>` and solves it by Cholesky
//! (LU as a fallback).

mod problem;

pub use problem::{BlockData, Constraint, SdpProblem, SparseSym};

use nalgebra::{DMatrix, DVector};

use crate::exec::Execution;
use crate::{Error, Result};

/// Dense symmetric blocks conforming to a problem's `block_dims`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockMatrix {
    pub blocks: Vec<DMatrix<f64>>,
}

impl BlockMatrix {
    pub fn zeros(dims: &[usize]) -> Self {
        Self {
            blocks: dims.iter().map(|&d| DMatrix::zeros(d, d)).collect(),
        }
    }

    pub fn scaled_identity(dims: &[usize], s: impl Fn(usize) -> f64) -> Self {
        Self {
            blocks: dims
                .iter()
                .enumerate()
                .map(|(b, &d)| DMatrix::identity(d, d) * s(b))
                .collect(),
        }
    }

    pub fn dims(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.nrows()).collect()
    }

    pub fn inner(&self, other: &BlockMatrix) -> f64 {
        self.blocks.iter().zip(&other.blocks).map(|(a, b)| a.dot(b)).sum()
    }

    pub fn frobenius(&self) -> f64 {
        self.inner(self).sqrt()
    }

    pub fn trace(&self) -> f64 {
        self.blocks.iter().map(|b| b.trace()).sum()
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: f64, other: &BlockMatrix) -> BlockMatrix {
        BlockMatrix {
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(a, b)| a + b * s)
                .collect(),
        }
    }

    /// Smallest eigenvalue over all blocks.
    pub fn min_eigenvalue(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| b.clone().symmetric_eigenvalues().min())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Stopping tolerances and step control.
#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub tol_gap: f64,
    pub tol_feas: f64,
    pub max_iters: usize,
    pub step_fraction: f64,
    pub verbose: bool,
    /// Policy for forming the Schur complement; the result does not depend on it.
    pub execution: Execution,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol_gap: 1e-8,
            tol_feas: 1e-8,
            max_iters: 200,
            step_fraction: 0.98,
            verbose: false,
            execution: Execution::default(),
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol_gap > 0.0 && self.tol_feas > 0.0) {
            return Err(Error::Parameter("solver tolerances must be positive".into()));
        }
        if !(self.step_fraction > 0.0 && self.step_fraction < 1.0) {
            return Err(Error::Parameter("step fraction must lie in (0, 1)".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::Parameter("max_iters must be positive".into()));
        }
        Ok(())
    }
}

/// Scaled residuals of a primal-dual point.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Residuals {
    /// `max_k |<A_k, X> - b_k| / (1 + ||b||_inf)`.
    pub primal: f64,
    /// `||C - A^T y - S||_F / (1 + ||C||_F)`.
    pub dual: f64,
    /// `|<C, X> - b^T y| / (1 + |<C, X>| + |b^T y|)`.
    pub gap: f64,
}

impl Residuals {
    fn worst(&self) -> f64 {
        self.primal.max(self.dual).max(self.gap)
    }
}

#[derive(Clone, Debug)]
pub struct SdpSolution {
    pub x: BlockMatrix,
    pub y: Vec<f64>,
    pub s: BlockMatrix,
    /// `<C, X>`, without the problem offset.
    pub objective_value: f64,
    /// `b^T y`, without the problem offset.
    pub dual_objective: f64,
    pub iterations: usize,
    pub residuals: Residuals,
}

/// Precomputed per-block view of the constraints.
struct Layout<'a> {
    dims: Vec<usize>,
    weights: Vec<f64>,
    /// For each block, the constraints touching it.
    by_block: Vec<Vec<(usize, &'a BlockData)>>,
    /// Dense copies of blocks too full for outer-product products.
    dense: Vec<Vec<Option<DMatrix<f64>>>>,
    c: BlockMatrix,
    b: DVector<f64>,
}

impl<'a> Layout<'a> {
    fn new(p: &'a SdpProblem) -> Self {
        let dims = p.block_dims.clone();
        let mut by_block: Vec<Vec<(usize, &BlockData)>> = vec![Vec::new(); dims.len()];
        for (j, con) in p.constraints.iter().enumerate() {
            for (b, data) in &con.blocks {
                if !data.is_zero() {
                    by_block[*b].push((j, data));
                }
            }
        }
        let dense = by_block
            .iter()
            .zip(&dims)
            .map(|(list, &k)| {
                list.iter()
                    .map(|(_, d)| match d {
                        BlockData::Sparse(s) if s.nnz() < k => None,
                        other => Some(other.to_dense()),
                    })
                    .collect()
            })
            .collect();
        let mut c = BlockMatrix::zeros(&dims);
        for (b, data) in &p.objective {
            data.add_scaled_to(1.0, &mut c.blocks[*b]);
        }
        Self {
            dims,
            weights: p.barrier_weights.clone(),
            by_block,
            dense,
            c,
            b: DVector::from_vec(p.rhs()),
        }
    }

    fn m(&self) -> usize {
        self.b.len()
    }

    /// `A(X)`.
    fn apply(&self, x: &BlockMatrix) -> DVector<f64> {
        let mut out = DVector::zeros(self.m());
        for (b, list) in self.by_block.iter().enumerate() {
            for (j, data) in list {
                out[*j] += data.inner(&x.blocks[b]);
            }
        }
        out
    }

    /// `A^T y = sum_k y_k A_k`.
    fn adjoint(&self, y: &DVector<f64>) -> BlockMatrix {
        let mut out = BlockMatrix::zeros(&self.dims);
        for (b, list) in self.by_block.iter().enumerate() {
            for (j, data) in list {
                if y[*j] != 0.0 {
                    data.add_scaled_to(y[*j], &mut out.blocks[b]);
                }
            }
        }
        out
    }

    /// `H_ij = sum_b <A_ib, X_b A_jb W_b>`.
    fn schur(&self, exec: Execution, x: &BlockMatrix, w: &BlockMatrix) -> DMatrix<f64> {
        let m = self.m();
        // Position of each constraint within each block list, for column work.
        let mut slots: Vec<Vec<(usize, usize)>> = vec![Vec::new(); m];
        for (b, list) in self.by_block.iter().enumerate() {
            for (pos, (j, _)) in list.iter().enumerate() {
                slots[*j].push((b, pos));
            }
        }
        let columns = exec.map(m, |j| {
            let mut col = vec![0.0; j + 1];
            for &(b, pos) in &slots[j] {
                let (xb, wb) = (&x.blocks[b], &w.blocks[b]);
                let t = match (&self.dense[b][pos], self.by_block[b][pos].1) {
                    (Some(a), _) => xb * a * wb,
                    (None, BlockData::Sparse(s)) => outer_product_form(s, xb, wb),
                    (None, BlockData::Dense(a)) => xb * a * wb,
                };
                for (i, data) in &self.by_block[b] {
                    if *i <= j {
                        col[*i] += data.inner(&t);
                    }
                }
            }
            col
        });
        let mut h = DMatrix::zeros(m, m);
        for (j, col) in columns.into_iter().enumerate() {
            for (i, v) in col.into_iter().enumerate() {
                h[(i, j)] = v;
                h[(j, i)] = v;
            }
        }
        h
    }
}

/// `X A W` for sparse symmetric `A` as a sum of rank-one terms.
fn outer_product_form(a: &SparseSym, x: &DMatrix<f64>, w: &DMatrix<f64>) -> DMatrix<f64> {
    let k = x.nrows();
    let mut t = DMatrix::zeros(k, k);
    for &(p, q, v) in a.entries() {
        t.ger(v, &x.column(p), &w.row(q).transpose(), 1.0);
        if p != q {
            t.ger(v, &x.column(q), &w.row(p).transpose(), 1.0);
        }
    }
    t
}

fn sym(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Factorization of the Schur complement.
enum SchurFactor {
    Cholesky(nalgebra::Cholesky<f64, nalgebra::Dyn>),
    Lu(nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>),
}

impl SchurFactor {
    fn new(h: DMatrix<f64>) -> Result<Self> {
        if let Some(c) = h.clone().cholesky() {
            return Ok(SchurFactor::Cholesky(c));
        }
        let lu = h.lu();
        if lu.is_invertible() {
            Ok(SchurFactor::Lu(lu))
        } else {
            Err(Error::NumericalFailure("Schur complement is singular".into()))
        }
    }

    fn solve(&self, rhs: &DVector<f64>) -> Result<DVector<f64>> {
        let out = match self {
            SchurFactor::Cholesky(c) => c.solve(rhs),
            SchurFactor::Lu(lu) => lu
                .solve(rhs)
                .ok_or_else(|| Error::NumericalFailure("Schur solve failed".into()))?,
        };
        if out.iter().all(|v| v.is_finite()) {
            Ok(out)
        } else {
            Err(Error::NumericalFailure("Schur solve produced non-finite values".into()))
        }
    }
}

const REFINE_STEPS: usize = 3;

/// Relative centrality required of a returned iterate.
pub const CENTER_TOL: f64 = 1e-6;

/// Iterations without a better residual before giving up.
const STALL_ITERS: usize = 40;

/// Centering steps taken at `mu*` before accepting the best centered iterate.
const MAX_CENTER_STEPS: usize = 8;

fn inverse_spd(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let c = m
        .clone()
        .cholesky()
        .ok_or_else(|| Error::NumericalFailure("dual slack lost positive definiteness".into()))?;
    Ok(sym(&c.inverse()))
}

/// Largest `a` with `M + a dM` positive semidefinite (may be infinite).
fn max_step(m: &BlockMatrix, dm: &BlockMatrix) -> Result<f64> {
    let mut alpha = f64::INFINITY;
    for (mb, db) in m.blocks.iter().zip(&dm.blocks) {
        let l = mb
            .clone()
            .cholesky()
            .ok_or_else(|| Error::NumericalFailure("iterate lost positive definiteness".into()))?
            .unpack();
        let half = l
            .solve_lower_triangular(db)
            .ok_or_else(|| Error::NumericalFailure("triangular solve failed".into()))?;
        let scaled = l
            .solve_lower_triangular(&half.transpose())
            .ok_or_else(|| Error::NumericalFailure("triangular solve failed".into()))?;
        let lmin = sym(&scaled).symmetric_eigenvalues().min();
        if lmin < 0.0 {
            alpha = alpha.min(-1.0 / lmin);
        }
    }
    Ok(alpha)
}

fn is_pd(m: &BlockMatrix) -> bool {
    m.blocks.iter().all(|b| b.clone().cholesky().is_some())
}

/// Take `step_fraction` of the way to the boundary, capped at 1, halving on
/// factorization failure.
fn step_length(m: &BlockMatrix, dm: &BlockMatrix, fraction: f64) -> Result<(f64, BlockMatrix)> {
    let mut alpha = (fraction * max_step(m, dm)?).min(1.0);
    for _ in 0..30 {
        let next = m.axpy(alpha, dm);
        if is_pd(&next) {
            return Ok((alpha, next));
        }
        alpha *= 0.5;
    }
    Err(Error::NumericalFailure("no positive definite step found".into()))
}

/// Search direction for `dX = T - X dS W`, `dS = Rd - A^T dy`, with the
/// Schur system refined until `A(dX)` reproduces `rp`.
#[allow(clippy::too_many_arguments)]
fn direction(
    lay: &Layout,
    factor: &SchurFactor,
    x: &BlockMatrix,
    w: &BlockMatrix,
    rp: &DVector<f64>,
    rd: &BlockMatrix,
    target: &BlockMatrix,
    g: &BlockMatrix,
) -> Result<(BlockMatrix, BlockMatrix, DVector<f64>)> {
    let build = |dy: &DVector<f64>| {
        let ds = rd.axpy(-1.0, &lay.adjoint(dy));
        let dx = BlockMatrix {
            blocks: (0..x.blocks.len())
                .map(|b| sym(&(&target.blocks[b] - &x.blocks[b] * &ds.blocks[b] * &w.blocks[b])))
                .collect(),
        };
        (dx, ds)
    };
    let mut dy = factor.solve(&(rp - lay.apply(g)))?;
    let (mut dx, mut ds) = build(&dy);
    let mut err = (rp - lay.apply(&dx)).amax();
    for _ in 0..REFINE_STEPS {
        if err <= 1e-15 * (1.0 + rp.amax()) {
            break;
        }
        let cand_dy = &dy + factor.solve(&(rp - lay.apply(&dx)))?;
        let (cand_dx, cand_ds) = build(&cand_dy);
        let cand_err = (rp - lay.apply(&cand_dx)).amax();
        if cand_err >= err {
            break;
        }
        (dy, dx, ds, err) = (cand_dy, cand_dx, cand_ds, cand_err);
    }
    Ok((dx, ds, dy))
}

/// Largest relative deviation of the eigenvalues of `X^1/2 S X^1/2` from the
/// weighted central-path value `w_b mu`.
fn centrality(x: &BlockMatrix, s: &BlockMatrix, weights: &[f64], mu: f64) -> f64 {
    let mut worst = 0.0f64;
    for ((xb, sb), w) in x.blocks.iter().zip(&s.blocks).zip(weights) {
        let Some(c) = xb.clone().cholesky() else {
            return f64::INFINITY;
        };
        let l = c.unpack();
        let m = sym(&(l.transpose() * sb * &l));
        for lam in m.symmetric_eigenvalues().iter() {
            worst = worst.max((lam / (w * mu) - 1.0).abs());
        }
    }
    worst
}

/// Solve `problem` from the standard infeasible start.
///
/// The optimal face of an SDP need not be a single point. To make the
/// returned solution well defined the solver stops on the (weighted) central
/// path at `mu* = tol_gap / (2 sum_b w_b k_b)`: once `mu` reaches that level it
/// switches to pure centering steps, and it only reports convergence when the
/// iterate is centered within [`CENTER_TOL`]. Problems that share a central
/// path therefore return the same point. When rounding prevents reaching
/// that centrality, the best centered iterate within tolerance after
/// [`MAX_CENTER_STEPS`] centering steps is returned.
pub fn solve(problem: &SdpProblem, config: &SolverConfig) -> Result<SdpSolution> {
    config.validate()?;
    problem.validate()?;
    let lay = Layout::new(problem);
    let dims = lay.dims.clone();
    let m = lay.m();
    let total_weight: f64 = dims.iter().zip(&lay.weights).map(|(&k, &w)| k as f64 * w).sum();
    let b_norm = lay.b.amax();
    let c_norm = lay.c.frobenius();
    let mu_target = 0.5 * config.tol_gap / total_weight;

    let mut x = BlockMatrix::scaled_identity(&dims, |b| 1.0 / dims[b] as f64);
    let mut s = BlockMatrix::scaled_identity(&dims, |_| 1.0);
    let mut y = DVector::zeros(m);
    let mut best: Option<SdpSolution> = None;
    let mut centering = false;
    let mut center_steps = 0;
    let mut centered: Option<(f64, SdpSolution)> = None;
    let mut last_iter = 0;

    let snapshot = |x: &BlockMatrix, y: &DVector<f64>, s: &BlockMatrix, it: usize, res: Residuals| {
        SdpSolution {
            x: x.clone(),
            y: y.iter().copied().collect(),
            s: s.clone(),
            objective_value: lay.c.inner(x),
            dual_objective: lay.b.dot(y),
            iterations: it,
            residuals: res,
        }
    };

    for iter in 0..=config.max_iters {
        last_iter = iter;
        let rp = &lay.b - lay.apply(&x);
        let rd = lay.c.axpy(-1.0, &lay.adjoint(&y)).axpy(-1.0, &s);
        let pobj = lay.c.inner(&x);
        let dobj = lay.b.dot(&y);
        let res = Residuals {
            primal: rp.amax() / (1.0 + b_norm),
            dual: rd.frobenius() / (1.0 + c_norm),
            gap: (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs()),
        };
        let mu = x.inner(&s) / total_weight;
        let feasible = res.primal <= config.tol_feas && res.dual <= config.tol_feas;
        centering |= feasible && mu <= 2.0 * mu_target;
        let delta = if centering {
            centrality(&x, &s, &lay.weights, mu_target)
        } else {
            f64::INFINITY
        };

        if config.verbose {
            eprintln!(
                "iter {iter:3}  pobj {pobj:+.10e}  dobj {dobj:+.10e}  gap {:.2e}  pinf {:.2e}  dinf {:.2e}  mu {mu:.2e}  cent {delta:.1e}",
                res.gap, res.primal, res.dual
            );
        }

        if best.as_ref().is_none_or(|b| res.worst() < b.residuals.worst()) {
            best = Some(snapshot(&x, &y, &s, iter, res));
        }
        if res.gap <= config.tol_gap && feasible {
            if delta <= CENTER_TOL {
                return Ok(snapshot(&x, &y, &s, iter, res));
            }
            if centered.as_ref().is_none_or(|(d, _)| delta < *d) {
                centered = Some((delta, snapshot(&x, &y, &s, iter, res)));
            }
        }
        if centering {
            // Rounding in the Schur solve bounds how well the smallest
            // eigenvalues can be centered; settle for the best iterate.
            if center_steps >= MAX_CENTER_STEPS {
                if let Some((_, sol)) = centered.take() {
                    return Ok(sol);
                }
            }
            center_steps += 1;
        }
        if x.frobenius() > 1e10 || y.amax() > 1e12 || s.frobenius() > 1e12 {
            return Err(Error::Infeasible(format!(
                "iterates diverged at iteration {iter} (|X| = {:.1e}, |y| = {:.1e})",
                x.frobenius(),
                y.amax()
            )));
        }
        if iter == config.max_iters || best.as_ref().is_some_and(|b| iter - b.iterations >= STALL_ITERS) {
            break;
        }

        let w = BlockMatrix {
            blocks: s.blocks.iter().map(inverse_spd).collect::<Result<_>>()?,
        };
        let factor = SchurFactor::new(lay.schur(config.execution, &x, &w))?;
        let xrdw: Vec<DMatrix<f64>> = (0..dims.len())
            .map(|b| &x.blocks[b] * &rd.blocks[b] * &w.blocks[b])
            .collect();
        let rhs_of = |target: &[DMatrix<f64>]| BlockMatrix {
            blocks: (0..dims.len()).map(|b| sym(&(&target[b] - &xrdw[b]))).collect(),
        };

        let (target, sigma) = if centering {
            // Pure Newton step towards the central point at mu*.
            let target: Vec<DMatrix<f64>> = (0..dims.len())
                .map(|b| &w.blocks[b] * (mu_target * lay.weights[b]) - &x.blocks[b])
                .collect();
            (target, mu_target / mu)
        } else {
            // Predictor (affine scaling) direction.
            let neg_x: Vec<DMatrix<f64>> = x.blocks.iter().map(|b| -b).collect();
            let g = rhs_of(&neg_x);
            let neg_x = BlockMatrix { blocks: neg_x };
            let (dx_a, ds_a, _) = direction(&lay, &factor, &x, &w, &rp, &rd, &neg_x, &g)?;
            let ap = (config.step_fraction * max_step(&x, &dx_a)?).min(1.0);
            let ad = (config.step_fraction * max_step(&s, &ds_a)?).min(1.0);
            let mu_aff = x.axpy(ap, &dx_a).inner(&s.axpy(ad, &ds_a)) / total_weight;
            let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3).max(mu_target / mu);

            // Corrector with centering and second-order term.
            let target: Vec<DMatrix<f64>> = (0..dims.len())
                .map(|b| {
                    &w.blocks[b] * (sigma * mu * lay.weights[b])
                        - &x.blocks[b]
                        - &dx_a.blocks[b] * &ds_a.blocks[b] * &w.blocks[b]
                })
                .collect();
            (target, sigma)
        };
        let g = rhs_of(&target);
        let target = BlockMatrix { blocks: target };
        let (dx, ds, dy) = direction(&lay, &factor, &x, &w, &rp, &rd, &target, &g)?;

        let (ap, x_next) = step_length(&x, &dx, config.step_fraction)?;
        let (ad, s_next) = step_length(&s, &ds, config.step_fraction)?;
        x = BlockMatrix {
            blocks: x_next.blocks.iter().map(sym).collect(),
        };
        s = BlockMatrix {
            blocks: s_next.blocks.iter().map(sym).collect(),
        };
        y += dy * ad;
        if config.verbose {
            eprintln!("          sigma {sigma:.3e}  step primal {ap:.4}  dual {ad:.4}");
        }
    }

    let best = best.expect("at least one iterate recorded");
    Err(Error::NonConvergence {
        iterations: last_iter,
        best: Box::new(best),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// min x s.t. [[x, 1], [1, x]] >= 0, written in standard form over a 2x2 block:
    /// X_00 = X_11, X_01 = 1, minimize X_00.
    fn eigen_problem() -> SdpProblem {
        let obj = SparseSym::from_triplets(2, [(0, 0, 1.0)]);
        let eq = SparseSym::from_triplets(2, [(0, 0, 1.0), (1, 1, -1.0)]);
        let off = SparseSym::from_triplets(2, [(0, 1, 0.5)]);
        SdpProblem::new(
            vec![2],
            vec![(0, BlockData::Sparse(obj))],
            vec![
                Constraint {
                    blocks: vec![(0, BlockData::Sparse(eq))],
                    rhs: 0.0,
                    label: "diag".into(),
                },
                Constraint {
                    blocks: vec![(0, BlockData::Sparse(off))],
                    rhs: 1.0,
                    label: "off".into(),
                },
            ],
            0.0,
        )
        .unwrap()
    }

    #[test]
    fn two_by_two_eigenvalue_problem() {
        let sol = solve(&eigen_problem(), &SolverConfig::default()).unwrap();
        assert!((sol.objective_value - 1.0).abs() < 1e-7, "{}", sol.objective_value);
        assert!(sol.x.min_eigenvalue() > -1e-8);
        assert!(sol.s.min_eigenvalue() > -1e-8);
    }

    #[test]
    fn deterministic_and_policy_independent() {
        let p = eigen_problem();
        let seq = SolverConfig {
            execution: Execution::Sequential,
            ..SolverConfig::default()
        };
        let a = solve(&p, &seq).unwrap();
        let b = solve(&p, &SolverConfig::default()).unwrap();
        assert_eq!(a.iterations, b.iterations);
        assert_eq!(a.x, b.x);
    }

    #[test]
    fn iteration_cap_reports_best_iterate() {
        let cfg = SolverConfig {
            max_iters: 2,
            ..SolverConfig::default()
        };
        match solve(&eigen_problem(), &cfg) {
            Err(Error::NonConvergence { iterations, best }) => {
                assert_eq!(iterations, 2);
                assert!(best.residuals.gap.is_finite());
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn infeasible_problem_is_flagged() {
        // X_00 = -1 with X >= 0 has no solution.
        let a = SparseSym::from_triplets(1, [(0, 0, 1.0)]);
        let p = SdpProblem::new(
            vec![1],
            vec![],
            vec![Constraint {
                blocks: vec![(0, BlockData::Sparse(a))],
                rhs: -1.0,
                label: "neg".into(),
            }],
            0.0,
        )
        .unwrap();
        assert!(solve(&p, &SolverConfig::default()).is_err());
    }
}
