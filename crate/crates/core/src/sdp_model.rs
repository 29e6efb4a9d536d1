//! The full semidefinite program for the minimum-resolution kernel.
//!
//! The Gram matrix `M` is indexed by `N^n_{r'}` (`r' = r` unless the degrees
//! are decoupled). Writing `D_d` for the 0/1 matrix selecting the entries
//! `(a, b)` with `a - b = +-d`, the program is
//!
//! ```text
//! minimize   n - 1/2 sum_i <M, D_{e_i}>
//! subject to <M, D_g - D_{w_I(g)}> = 0   g in N^n_r \ 0, I in the subset family
//!            <M, D_d> = 0                 |d|_1 > r
//!            Tr M = 1,  M >= 0
//! ```
//!
//! and the kernel coefficients are `g_a = 1/2 <M, D_a>`, `g_0 = Tr M`.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::DMatrix;

use crate::indexcomb::{
    build_gamma_set, build_index_set, build_index_set_capped, build_subset_family, omega,
    IndexSet, MultiIndex, SignedIndex, Subset, SubsetFamily, DEFAULT_SIZE_CAP,
};
use crate::kernels::{resolution, KernelCoefficients, Provenance};
use crate::solver::{solve, BlockData, Constraint, SdpProblem, SdpSolution, SolverConfig, SparseSym};
use crate::{Error, Result};

/// Tolerance for `g_0 = 1` and for agreement across sign patterns.
pub const EXTRACTION_TOL: f64 = 1e-7;

/// `C^(g, I)`: ones where `a - b = +- w_I(g)`.
#[derive(Clone, Debug)]
pub struct ConstraintMatrix {
    pub gamma: SignedIndex,
    pub subset: Subset,
    pub entries: SparseSym,
}

impl PartialEq for ConstraintMatrix {
    /// Matrices compare by entries only, whatever `(g, I)` produced them.
    fn eq(&self, other: &Self) -> bool {
        self.entries == other.entries
    }
}

pub fn build_constraint_matrix(gamma: &SignedIndex, subset: Subset, index_set: &IndexSet) -> ConstraintMatrix {
    let target = omega(subset, gamma);
    let neg = target.neg();
    let s = index_set.len();
    let mut triplets = Vec::new();
    for i in 0..s {
        for j in i..s {
            let d = SignedIndex::difference(index_set.get(i), index_set.get(j));
            if d == target || d == neg {
                triplets.push((i, j, 1.0));
            }
        }
    }
    ConstraintMatrix {
        gamma: gamma.clone(),
        subset,
        entries: SparseSym::from_triplets(s, triplets),
    }
}

/// Gram entries grouped by the sign class of `a - b` (upper triangle only).
pub(crate) fn difference_classes(gram: &IndexSet) -> BTreeMap<SignedIndex, Vec<(usize, usize)>> {
    let mut classes: BTreeMap<SignedIndex, Vec<(usize, usize)>> = BTreeMap::new();
    for i in 0..gram.len() {
        for j in i..gram.len() {
            let d = SignedIndex::difference(gram.get(i), gram.get(j)).sign_class();
            classes.entry(d).or_default().push((i, j));
        }
    }
    classes
}

fn indicator(dim: usize, pairs: &[(usize, usize)]) -> SparseSym {
    SparseSym::from_triplets(dim, pairs.iter().map(|&(i, j)| (i, j, 1.0)))
}

/// The assembled full program together with the data needed to read a kernel
/// back from its solution.
#[derive(Clone, Debug)]
pub struct FullSdp {
    pub n: usize,
    pub r: u32,
    pub r_gram: u32,
    pub gram: IndexSet,
    pub kernel_index: IndexSet,
    pub family: SubsetFamily,
    classes: BTreeMap<SignedIndex, Vec<(usize, usize)>>,
    pub problem: SdpProblem,
}

impl FullSdp {
    pub fn provenance(&self) -> Provenance {
        if self.r_gram == self.r {
            Provenance::Sdp
        } else {
            Provenance::SdpDecoupled
        }
    }

    /// `<X, D_d>` for the sign class of `d`; 0 if no Gram entry realizes it.
    pub fn class_inner(&self, x: &DMatrix<f64>, d: &SignedIndex) -> f64 {
        self.classes.get(&d.sign_class()).map_or(0.0, |pairs| {
            pairs
                .iter()
                .map(|&(i, j)| if i == j { x[(i, j)] } else { x[(i, j)] + x[(j, i)] })
                .sum()
        })
    }
}

pub fn build_full_sdp(n: usize, r: u32, r_gram: u32) -> Result<FullSdp> {
    build_full_sdp_capped(n, r, r_gram, DEFAULT_SIZE_CAP)
}

pub fn build_full_sdp_capped(n: usize, r: u32, r_gram: u32, cap: usize) -> Result<FullSdp> {
    if r_gram < r {
        return Err(Error::Parameter(format!(
            "Gram degree {r_gram} must be at least the kernel degree {r}"
        )));
    }
    let gram = build_index_set_capped(n, r_gram, cap)?;
    let kernel_index = build_index_set(n, r)?;
    let family = build_subset_family(n)?;
    let classes = difference_classes(&gram);
    let s = gram.len();
    let mat = |d: &SignedIndex| classes.get(&d.sign_class()).map(|p| indicator(s, p));

    let mut constraints = Vec::new();

    // Sign-pattern symmetry of every kernel coefficient.
    for gamma in kernel_index.iter().filter(|a| !a.is_zero()) {
        let g = gamma.to_signed();
        let pivot = mat(&g).expect("every |d|_1 <= r is realizable");
        let mut seen = BTreeSet::from([g.sign_class()]);
        for &subset in family.subsets().iter().filter(|s| !s.is_empty()) {
            let flipped = omega(subset, &g).sign_class();
            if !seen.insert(flipped.clone()) {
                continue;
            }
            let other = mat(&flipped).expect("sign flips preserve realizability");
            let triplets = pivot
                .entries()
                .iter()
                .copied()
                .chain(other.entries().iter().map(|&(i, j, v)| (i, j, -v)));
            constraints.push(Constraint {
                blocks: vec![(0, BlockData::Sparse(SparseSym::from_triplets(s, triplets)))],
                rhs: 0.0,
                label: format!("sym {gamma} I={subset}"),
            });
        }
    }

    // Differences beyond degree r must vanish.
    let mut vanished = BTreeSet::new();
    for gamma in build_gamma_set(n, r, r_gram)? {
        for &subset in family.subsets() {
            let d = omega(subset, &gamma.to_signed()).sign_class();
            if !vanished.insert(d.clone()) {
                continue;
            }
            if let Some(m) = mat(&d) {
                constraints.push(Constraint {
                    blocks: vec![(0, BlockData::Sparse(m))],
                    rhs: 0.0,
                    label: format!("vanish {d}"),
                });
            }
        }
    }

    constraints.push(Constraint {
        blocks: vec![(0, BlockData::Sparse(SparseSym::identity(s)))],
        rhs: 1.0,
        label: "trace".into(),
    });

    let objective = SparseSym::from_triplets(
        s,
        (0..n).flat_map(|i| {
            let e = MultiIndex::unit(n, i).to_signed();
            classes[&e].iter().map(|&(a, b)| (a, b, -0.5)).collect::<Vec<_>>()
        }),
    );

    let problem = SdpProblem::new(
        vec![s],
        vec![(0, BlockData::Sparse(objective))],
        constraints,
        n as f64,
    )?;
    Ok(FullSdp {
        n,
        r,
        r_gram,
        gram,
        kernel_index,
        family,
        classes,
        problem,
    })
}

/// Numerical rank of the constraint set, via pivoted Cholesky of the Gram
/// matrix `G_kl = sum_b w_b <A_kb, A_lb>` with relative pivot tolerance `tol`.
pub fn constraint_rank(problem: &SdpProblem, tol: f64) -> usize {
    let m = problem.constraints.len();
    let mut g = DMatrix::<f64>::zeros(m, m);
    let dense: Vec<Vec<(usize, DMatrix<f64>)>> = problem
        .constraints
        .iter()
        .map(|c| c.blocks.iter().map(|(b, d)| (*b, d.to_dense())).collect())
        .collect();
    for k in 0..m {
        for l in k..m {
            let mut v = 0.0;
            for (bk, ak) in &dense[k] {
                for (bl, al) in &dense[l] {
                    if bk == bl {
                        v += problem.barrier_weights[*bk] * ak.dot(al);
                    }
                }
            }
            g[(k, l)] = v;
            g[(l, k)] = v;
        }
    }
    pivoted_cholesky_rank(g, tol)
}

pub(crate) fn pivoted_cholesky_rank(mut g: DMatrix<f64>, tol: f64) -> usize {
    let m = g.nrows();
    let scale = (0..m).map(|i| g[(i, i)]).fold(0.0, f64::max);
    if scale <= 0.0 {
        return 0;
    }
    let mut rank = 0;
    let mut active: Vec<usize> = (0..m).collect();
    while !active.is_empty() {
        let (pos, &p) = active
            .iter()
            .enumerate()
            .max_by(|a, b| g[(*a.1, *a.1)].total_cmp(&g[(*b.1, *b.1)]))
            .expect("non-empty");
        let d = g[(p, p)];
        if d <= tol * scale {
            break;
        }
        rank += 1;
        active.swap_remove(pos);
        let col: Vec<f64> = active.iter().map(|&i| g[(i, p)]).collect();
        for (a, &i) in active.iter().enumerate() {
            for (b, &j) in active.iter().enumerate() {
                g[(i, j)] -= col[a] * col[b] / d;
            }
        }
    }
    rank
}

/// A solved kernel with its resolution and the raw solver output.
#[derive(Clone, Debug)]
pub struct SolvedKernel {
    pub kernel: KernelCoefficients,
    /// Optimal value including the offset.
    pub sigma2: f64,
    pub solution: SdpSolution,
}

/// Read `g` off a solution of the full program, checking `g_0 = 1` and that
/// every sign pattern of each coefficient carries the same value.
pub fn extract_coefficients(sdp: &FullSdp, solution: &SdpSolution) -> Result<KernelCoefficients> {
    let x = solution
        .x
        .blocks
        .first()
        .ok_or_else(|| Error::InconsistentSolution("solution has no blocks".into()))?;
    let g0 = x.trace();
    if (g0 - 1.0).abs() > EXTRACTION_TOL {
        return Err(Error::InconsistentSolution(format!("g_0 = Tr X = {g0}, expected 1")));
    }
    let mut g = Vec::with_capacity(sdp.kernel_index.len());
    for gamma in sdp.kernel_index.iter() {
        if gamma.is_zero() {
            g.push(g0);
            continue;
        }
        let sg = gamma.to_signed();
        let value = 0.5 * sdp.class_inner(x, &sg);
        for &subset in sdp.family.subsets() {
            let other = 0.5 * sdp.class_inner(x, &omega(subset, &sg));
            if (other - value).abs() > EXTRACTION_TOL {
                return Err(Error::InconsistentSolution(format!(
                    "g_{gamma} = {value} but sign pattern I={subset} gives {other}"
                )));
            }
        }
        g.push(value);
    }
    KernelCoefficients::new(sdp.kernel_index.clone(), g, sdp.provenance())
}

/// Build, solve and extract the full program.
pub fn solve_full(n: usize, r: u32, r_gram: u32, config: &SolverConfig) -> Result<SolvedKernel> {
    let sdp = build_full_sdp(n, r, r_gram)?;
    let solution = solve(&sdp.problem, config)?;
    let kernel = extract_coefficients(&sdp, &solution)?;
    let sigma2 = solution.objective_value + sdp.problem.offset;
    debug_assert!((resolution(&kernel) - sigma2).abs() < 1e-6);
    Ok(SolvedKernel {
        kernel,
        sigma2,
        solution,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constraint_matrix_examples() {
        let s1 = build_index_set(1, 1).unwrap();
        let c = build_constraint_matrix(&SignedIndex(vec![1]), Subset::EMPTY, &s1);
        assert_eq!(c.entries.entries(), &[(0, 1, 1.0)]);

        let s2 = build_index_set(2, 2).unwrap();
        let c = build_constraint_matrix(&SignedIndex(vec![0, 0]), Subset::EMPTY, &s2);
        assert_eq!(c.entries, SparseSym::identity(6));

        let s21 = build_index_set(2, 1).unwrap();
        let c = build_constraint_matrix(&SignedIndex(vec![1, 1]), Subset::from_coords(&[1]), &s21);
        // (1,0) and (0,1) are positions 1 and 2.
        assert_eq!(c.entries.entries(), &[(1, 2, 1.0)]);
        let same = build_constraint_matrix(&SignedIndex(vec![-1, 1]), Subset::EMPTY, &s21);
        assert_eq!(c, same);
    }

    #[test]
    fn univariate_degree_one_problem() {
        let sdp = build_full_sdp(1, 1, 1).unwrap();
        assert_eq!(sdp.problem.block_dims, vec![2]);
        assert_eq!(sdp.problem.constraints.len(), 1);
        let sol = solve(&sdp.problem, &SolverConfig::default()).unwrap();
        assert!((sol.objective_value + sdp.problem.offset - 0.5).abs() < 1e-7);
        let k = extract_coefficients(&sdp, &sol).unwrap();
        assert!((k.values()[1] - 0.5).abs() < 1e-7);
    }

    #[test]
    fn constraints_are_independent() {
        for (n, r, rg) in [(1, 3, 3), (2, 2, 2), (2, 2, 3), (3, 2, 2)] {
            let sdp = build_full_sdp(n, r, rg).unwrap();
            let m = sdp.problem.constraints.len();
            assert_eq!(constraint_rank(&sdp.problem, 1e-10), m, "({n},{r},{rg})");
        }
    }

    #[test]
    fn rank_detects_dependence() {
        let g = DMatrix::from_row_slice(3, 3, &[1.0, 1.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 2.0]);
        assert_eq!(pivoted_cholesky_rank(g, 1e-10), 2);
    }
}
