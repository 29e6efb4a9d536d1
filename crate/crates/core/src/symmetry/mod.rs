//! Symmetry reduction under coordinate permutations.
//!
//! The optimal Gram matrix can be taken invariant under `S_n` acting on
//! `N^n_{r'}`. Invariant matrices are block diagonal in a symmetry-adapted basis:
//! one block per irreducible representation, repeated once per copy. The basis
//! is found numerically from random invariant matrices and the irreducible
//! representations are identified by their characters.

pub mod irreps;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exec::Execution;
use crate::indexcomb::{
    build_index_set, build_index_set_capped, build_subset_family, omega, IndexSet, MultiIndex,
    SignedIndex, DEFAULT_SIZE_CAP,
};
use crate::kernels::{resolution, KernelCoefficients, Provenance};
use crate::sdp_model::{SolvedKernel, EXTRACTION_TOL};
use crate::solver::{solve, BlockData, Constraint, SdpProblem, SdpSolution, SolverConfig};
use crate::{Error, Result};

pub const DEFAULT_SEED: u64 = 0x6d69_6e72_6573;
pub const MAX_ATTEMPTS: usize = 5;

/// Relative tolerance for off-block mass and copy agreement.
pub const BLOCK_TOL: f64 = 1e-8;
const CLUSTER_TOL: f64 = 1e-9;
const COUPLING_TOL: f64 = 1e-8;

/// Orbit key of the ordered pair `(a, b)` under simultaneous permutation.
fn pair_key(a: &MultiIndex, b: &MultiIndex) -> Vec<(u32, u32)> {
    let mut key: Vec<(u32, u32)> = a
        .entries()
        .iter()
        .copied()
        .zip(b.entries().iter().copied())
        .collect();
    key.sort_unstable();
    key
}

/// `(1/n!) sum_s P_s A P_s^T`, computed by averaging over orbits of index pairs.
pub fn reynolds_average(a: &DMatrix<f64>, gram: &IndexSet) -> Result<DMatrix<f64>> {
    let s = gram.len();
    if a.nrows() != s || a.ncols() != s {
        return Err(Error::DimensionMismatch {
            expected: s,
            found: a.nrows(),
        });
    }
    let mut sums: HashMap<Vec<(u32, u32)>, (f64, usize)> = HashMap::new();
    let keys: Vec<Vec<Vec<(u32, u32)>>> = (0..s)
        .map(|i| (0..s).map(|j| pair_key(gram.get(i), gram.get(j))).collect())
        .collect();
    for i in 0..s {
        for j in 0..s {
            let e = sums.entry(keys[i][j].clone()).or_default();
            e.0 += a[(i, j)];
            e.1 += 1;
        }
    }
    Ok(DMatrix::from_fn(s, s, |i, j| {
        let (sum, count) = sums[&keys[i][j]];
        sum / count as f64
    }))
}

/// A random symmetric matrix that is invariant under the action: one uniform
/// value in `[-1, 1]` per orbit of unordered index pairs.
pub fn random_invariant<R: Rng>(gram: &IndexSet, rng: &mut R) -> DMatrix<f64> {
    let s = gram.len();
    let mut values: BTreeMap<Vec<(u32, u32)>, f64> = BTreeMap::new();
    let mut keys = Vec::with_capacity(s * (s + 1) / 2);
    for i in 0..s {
        for j in i..s {
            let k1 = pair_key(gram.get(i), gram.get(j));
            let k2 = pair_key(gram.get(j), gram.get(i));
            keys.push((i, j, k1.min(k2)));
        }
    }
    // Draw in key order so the matrix depends only on the seed.
    for (_, _, k) in &keys {
        values.entry(k.clone()).or_insert(0.0);
    }
    for v in values.values_mut() {
        *v = rng.gen_range(-1.0..=1.0);
    }
    let mut m = DMatrix::zeros(s, s);
    for (i, j, k) in keys {
        let v = values[&k];
        m[(i, j)] = v;
        m[(j, i)] = v;
    }
    m
}

/// Symmetry-adapted block structure of the invariant matrices over `N^n_{r'}`.
#[derive(Clone, Debug)]
pub struct SymmetryBlocks {
    pub n: usize,
    pub r_gram: u32,
    /// Block orders `k_i`: multiplicity of each irreducible representation.
    pub dims: Vec<usize>,
    /// Dimension `d_i` of each irreducible representation (number of copies of block `i`).
    pub irrep_dims: Vec<usize>,
    /// Partition labelling each irreducible representation.
    pub partitions: Vec<Vec<usize>>,
    /// Orthogonal `s x s` matrix; columns grouped by block, then by copy.
    pub basis: DMatrix<f64>,
    offsets: Vec<usize>,
}

impl SymmetryBlocks {
    /// Number of distinct blocks `k(n, r)`.
    pub fn k(&self) -> usize {
        self.dims.len()
    }

    pub fn order(&self) -> usize {
        self.basis.nrows()
    }

    /// Columns of copy `t` of block `i`.
    pub fn copy_basis(&self, i: usize, t: usize) -> DMatrix<f64> {
        let m = self.dims[i];
        self.basis.columns(self.offsets[i] + t * m, m).into_owned()
    }

    /// `B_i^T A B_i` for every block, using the first copy.
    pub fn reduce(&self, a: &DMatrix<f64>) -> Vec<DMatrix<f64>> {
        (0..self.k())
            .map(|i| {
                let b = self.copy_basis(i, 0);
                b.transpose() * a * b
            })
            .collect()
    }

    /// `sum_i sum_t B_it X_i B_it^T`: the invariant matrix with reduced blocks `x`.
    pub fn lift(&self, x: &[DMatrix<f64>]) -> DMatrix<f64> {
        let s = self.order();
        let mut m = DMatrix::zeros(s, s);
        for (i, xi) in x.iter().enumerate() {
            for t in 0..self.irrep_dims[i] {
                let b = self.copy_basis(i, t);
                m += &b * xi * b.transpose();
            }
        }
        m
    }

    /// Frobenius mass of `basis^T A basis` outside the diagonal blocks, relative to `|A|_F`.
    pub fn off_block_mass(&self, a: &DMatrix<f64>) -> f64 {
        let t = self.basis.transpose() * a * &self.basis;
        let mut label = Vec::with_capacity(self.order());
        for i in 0..self.k() {
            for c in 0..self.irrep_dims[i] {
                label.extend(std::iter::repeat_n((i, c), self.dims[i]));
            }
        }
        let mut off = 0.0;
        for p in 0..t.nrows() {
            for q in 0..t.ncols() {
                if label[p] != label[q] {
                    off += t[(p, q)] * t[(p, q)];
                }
            }
        }
        off.sqrt() / a.norm().max(f64::MIN_POSITIVE)
    }

    /// Largest difference between copies of the same block, relative to `|A|_F`.
    pub fn copy_mismatch(&self, a: &DMatrix<f64>) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.k() {
            let b0 = self.copy_basis(i, 0);
            let first = b0.transpose() * a * &b0;
            for t in 1..self.irrep_dims[i] {
                let b = self.copy_basis(i, t);
                worst = worst.max((b.transpose() * a * &b - &first).norm());
            }
        }
        worst / a.norm().max(f64::MIN_POSITIVE)
    }

    /// `max |B^T B - I|`.
    pub fn orthonormality_error(&self) -> f64 {
        let g = self.basis.transpose() * &self.basis;
        (g - DMatrix::identity(self.order(), self.order())).amax()
    }
}

pub fn compute_blocks(n: usize, r_gram: u32) -> Result<SymmetryBlocks> {
    compute_blocks_seeded(n, r_gram, DEFAULT_SEED)
}

/// Block-diagonalize the invariant algebra, retrying with fresh randomness on
/// failure.
pub fn compute_blocks_seeded(n: usize, r_gram: u32, seed: u64) -> Result<SymmetryBlocks> {
    let gram = build_index_set(n, r_gram)?;
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(attempt as u64));
        if let Ok(b) = try_blocks(n, r_gram, &gram, &mut rng) {
            return Ok(b);
        }
    }
    Err(Error::Degeneracy {
        attempts: MAX_ATTEMPTS,
    })
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut root = x;
    while parent[root] != root {
        root = parent[root];
    }
    let mut cur = x;
    while parent[cur] != root {
        let next = parent[cur];
        parent[cur] = root;
        cur = next;
    }
    root
}

/// Nearest orthogonal matrix (polar factor).
fn polar(c: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let svd = c.clone().svd(true, true);
    let (u, vt) = svd
        .u
        .zip(svd.v_t)
        .ok_or_else(|| Error::NumericalFailure("SVD failed".into()))?;
    Ok(u * vt)
}

fn try_blocks<R: Rng>(n: usize, r_gram: u32, gram: &IndexSet, rng: &mut R) -> Result<SymmetryBlocks> {
    let s = gram.len();
    let a1 = random_invariant(gram, rng);
    let a2 = random_invariant(gram, rng);
    let a3 = random_invariant(gram, rng);

    let eig = a1.symmetric_eigen();
    let mut order: Vec<usize> = (0..s).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let q = DMatrix::from_fn(s, s, |p, c| eig.eigenvectors[(p, order[c])]);
    let lambda: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let scale = lambda.iter().fold(1.0f64, |m, v| m.max(v.abs()));

    // Eigenvalue clusters: each is one copy of an irreducible representation.
    let mut clusters: Vec<(usize, usize)> = Vec::new();
    let mut start = 0;
    for c in 1..=s {
        if c == s || lambda[c] - lambda[c - 1] > CLUSTER_TOL * scale {
            clusters.push((start, c - start));
            start = c;
        }
    }

    // Clusters coupled by a second invariant matrix share an isotypic component.
    let z = q.transpose() * &a2 * &q;
    let nc = clusters.len();
    let threshold = COUPLING_TOL * a2.norm();
    let mut weight = DMatrix::<f64>::zeros(nc, nc);
    let mut parent: Vec<usize> = (0..nc).collect();
    for l in 0..nc {
        for p in (l + 1)..nc {
            let (sl, dl) = clusters[l];
            let (sp, dp) = clusters[p];
            let w = z.view((sl, sp), (dl, dp)).norm();
            weight[(l, p)] = w;
            weight[(p, l)] = w;
            if w > threshold {
                let (a, b) = (find(&mut parent, l), find(&mut parent, p));
                parent[a] = b;
            }
        }
    }
    let mut components: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for l in 0..nc {
        let root = find(&mut parent, l);
        components.entry(root).or_default().push(l);
    }

    let classes = irreps::partitions(n);
    let perms: Vec<Vec<usize>> = classes
        .iter()
        .map(|mu| permuted_positions(gram, &irreps::cycle_type_representative(mu)))
        .collect();

    struct Component {
        partition_rank: usize,
        partition: Vec<usize>,
        d: usize,
        copies: Vec<DMatrix<f64>>,
    }
    let mut found: Vec<Component> = Vec::new();
    for members in components.values() {
        let d = clusters[members[0]].1;
        if members.iter().any(|&l| clusters[l].1 != d) {
            return Err(Error::BasisQuality("eigenvalue clusters of unequal size coupled".into()));
        }
        // Align each eigenspace with its neighbour along a maximum spanning tree.
        let mut rot: Vec<Option<DMatrix<f64>>> = vec![None; nc];
        rot[members[0]] = Some(DMatrix::identity(d, d));
        for _ in 1..members.len() {
            let mut best: Option<(f64, usize, usize)> = None;
            for &p in members.iter().filter(|&&p| rot[p].is_some()) {
                for &l in members.iter().filter(|&&l| rot[l].is_none()) {
                    if best.is_none_or(|(w, _, _)| weight[(l, p)] > w) {
                        best = Some((weight[(l, p)], l, p));
                    }
                }
            }
            let (_, l, p) = best.expect("component is connected");
            let (sl, _) = clusters[l];
            let (sp, _) = clusters[p];
            let c = z.view((sl, sp), (d, d)) * rot[p].as_ref().expect("aligned parent");
            rot[l] = Some(polar(&c)?);
        }
        let copies: Vec<DMatrix<f64>> = members
            .iter()
            .map(|&l| {
                let (sl, _) = clusters[l];
                q.columns(sl, d) * rot[l].as_ref().expect("all aligned")
            })
            .collect();

        // Identify the representation from the character of one copy.
        let v = &copies[0];
        let chi: Vec<f64> = perms
            .iter()
            .map(|perm| {
                (0..s)
                    .map(|a| (0..d).map(|t| v[(a, t)] * v[(perm[a], t)]).sum::<f64>())
                    .sum()
            })
            .collect();
        let (rank, err) = classes
            .iter()
            .enumerate()
            .map(|(idx, lambda)| {
                let e = classes
                    .iter()
                    .zip(&chi)
                    .map(|(mu, x)| (irreps::character(lambda, mu) as f64 - x).abs())
                    .fold(0.0, f64::max);
                (idx, e)
            })
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("at least one partition");
        if err > 1e-6 {
            return Err(Error::BasisQuality(format!("unidentified representation (character error {err:.1e})")));
        }
        found.push(Component {
            partition_rank: rank,
            partition: classes[rank].clone(),
            d,
            copies,
        });
    }
    found.sort_by_key(|c| c.partition_rank);
    if found.windows(2).any(|w| w[0].partition_rank == w[1].partition_rank) {
        return Err(Error::BasisQuality("representation split across components".into()));
    }

    let mut basis = DMatrix::zeros(s, s);
    let mut offsets = Vec::with_capacity(found.len());
    let mut col = 0;
    for comp in &found {
        offsets.push(col);
        for t in 0..comp.d {
            for copy in &comp.copies {
                basis.set_column(col, &copy.column(t));
                col += 1;
            }
        }
    }
    let blocks = SymmetryBlocks {
        n,
        r_gram,
        dims: found.iter().map(|c| c.copies.len()).collect(),
        irrep_dims: found.iter().map(|c| c.d).collect(),
        partitions: found.iter().map(|c| c.partition.clone()).collect(),
        basis,
        offsets,
    };

    let off = blocks.off_block_mass(&a3);
    let mismatch = blocks.copy_mismatch(&a3);
    let ortho = blocks.orthonormality_error();
    if off > BLOCK_TOL || mismatch > BLOCK_TOL || ortho > 1e-10 {
        return Err(Error::BasisQuality(format!(
            "validation failed: off-block {off:.1e}, copy mismatch {mismatch:.1e}, orthonormality {ortho:.1e}"
        )));
    }
    Ok(blocks)
}

/// For each Gram position, the position of the index with coordinates permuted by `perm`.
fn permuted_positions(gram: &IndexSet, perm: &[usize]) -> Vec<usize> {
    gram.iter()
        .map(|a| {
            let e: Vec<u32> = perm.iter().map(|&p| a.entries()[p]).collect();
            gram.position(&e).expect("index sets are permutation closed")
        })
        .collect()
}

/// The symmetry-reduced program.
///
/// Each constraint is indexed by an orbit of differences under permutations and
/// global sign. For an invariant Gram matrix `M`, `<M, D_d>` takes one value
/// `v_c` on an orbit `c`, and `v_c = sum_i d_i <X_i, B_i^T U_c B_i> / p_c`
/// where `U_c` sums the indicators of the `p_c` sign classes in the orbit.
#[derive(Clone, Debug)]
pub struct ReducedSdp {
    pub n: usize,
    pub r: u32,
    pub r_gram: u32,
    pub gram: IndexSet,
    pub kernel_index: IndexSet,
    pub blocks: SymmetryBlocks,
    /// Functionals `v_c` for the orbits of kernel multi-indices.
    kernel_functionals: BTreeMap<SignedIndex, Vec<DMatrix<f64>>>,
    pub problem: SdpProblem,
}

impl ReducedSdp {
    pub fn provenance(&self) -> Provenance {
        if self.r_gram == self.r {
            Provenance::Sdp
        } else {
            Provenance::SdpDecoupled
        }
    }
}

fn functional_value(f: &[DMatrix<f64>], x: &[DMatrix<f64>]) -> f64 {
    f.iter().zip(x).map(|(a, b)| a.dot(b)).sum()
}

pub fn build_reduced_sdp(n: usize, r: u32, r_gram: u32) -> Result<ReducedSdp> {
    build_reduced_sdp_with(n, r, r_gram, DEFAULT_SEED, Execution::default())
}

pub fn build_reduced_sdp_with(
    n: usize,
    r: u32,
    r_gram: u32,
    seed: u64,
    exec: Execution,
) -> Result<ReducedSdp> {
    if r_gram < r {
        return Err(Error::Parameter(format!(
            "Gram degree {r_gram} must be at least the kernel degree {r}"
        )));
    }
    let gram = build_index_set_capped(n, r_gram, DEFAULT_SIZE_CAP)?;
    let kernel_index = build_index_set(n, r)?;
    let family = build_subset_family(n)?;
    let blocks = compute_blocks_seeded(n, r_gram, seed)?;
    let s = gram.len();

    // Gram pairs grouped by orbit of their difference, with the sign classes seen.
    type OrbitPairs = (Vec<(usize, usize)>, BTreeSet<SignedIndex>);
    let mut orbits: BTreeMap<SignedIndex, OrbitPairs> = BTreeMap::new();
    for i in 0..s {
        for j in i..s {
            let d = SignedIndex::difference(gram.get(i), gram.get(j));
            let e = orbits.entry(d.perm_sign_class()).or_default();
            e.0.push((i, j));
            e.1.insert(d.sign_class());
        }
    }
    let keys: Vec<&SignedIndex> = orbits.keys().collect();
    let rows: Vec<DMatrix<f64>> = (0..blocks.k())
        .map(|i| blocks.copy_basis(i, 0).transpose())
        .collect();

    let functionals: Vec<Vec<DMatrix<f64>>> = exec.map(keys.len(), |c| {
        let (pairs, signs) = &orbits[keys[c]];
        let p_c = signs.len() as f64;
        (0..blocks.k())
            .map(|i| {
                let bt = &rows[i];
                let m = blocks.dims[i];
                let mut off = DMatrix::zeros(m, m);
                let mut diag = DMatrix::zeros(m, m);
                for &(p, q) in pairs {
                    if p == q {
                        diag.ger(1.0, &bt.column(p), &bt.column(p), 1.0);
                    } else {
                        off.ger(1.0, &bt.column(p), &bt.column(q), 1.0);
                    }
                }
                let mut f = &off + off.transpose() + diag;
                f *= blocks.irrep_dims[i] as f64 / p_c;
                f.iter_mut().for_each(|v| {
                    if v.abs() < 1e-14 {
                        *v = 0.0
                    }
                });
                f
            })
            .collect()
    });
    let position: BTreeMap<&SignedIndex, usize> = keys.iter().enumerate().map(|(c, k)| (*k, c)).collect();
    let functional = |d: &SignedIndex| -> Option<&Vec<DMatrix<f64>>> {
        position.get(&d.perm_sign_class()).map(|&c| &functionals[c])
    };
    let as_blocks = |f: Vec<DMatrix<f64>>| -> Vec<(usize, BlockData)> {
        f.into_iter()
            .enumerate()
            .filter(|(_, m)| m.iter().any(|&v| v != 0.0))
            .map(|(i, m)| (i, BlockData::Dense(m)))
            .collect()
    };

    let mut constraints = Vec::new();
    let mut kernel_functionals = BTreeMap::new();
    let mut linked = BTreeSet::new();
    for gamma in kernel_index.iter().filter(|a| a.is_sorted()) {
        let g = gamma.to_signed();
        let pivot_key = g.perm_sign_class();
        let pivot = functional(&g).expect("every |d|_1 <= r is realizable");
        kernel_functionals.insert(pivot_key.clone(), pivot.clone());
        if gamma.is_zero() {
            continue;
        }
        for &subset in family.subsets().iter().filter(|s| !s.is_empty()) {
            let flipped = omega(subset, &g);
            let key = flipped.perm_sign_class();
            if key == pivot_key || !linked.insert(key) {
                continue;
            }
            let other = functional(&flipped).expect("sign flips preserve realizability");
            let diff: Vec<DMatrix<f64>> = pivot.iter().zip(other).map(|(a, b)| a - b).collect();
            constraints.push(Constraint {
                blocks: as_blocks(diff),
                rhs: 0.0,
                label: format!("sym {gamma} I={subset}"),
            });
        }
    }
    for (c, key) in keys.iter().enumerate() {
        if key.l1_norm() > r {
            constraints.push(Constraint {
                blocks: as_blocks(functionals[c].clone()),
                rhs: 0.0,
                label: format!("vanish {key}"),
            });
        }
    }
    let zero = SignedIndex(vec![0; n]);
    constraints.push(Constraint {
        blocks: as_blocks(functional(&zero).expect("zero difference").clone()),
        rhs: 1.0,
        label: "trace".into(),
    });

    let e = MultiIndex::unit(n, 0).to_signed();
    let objective: Vec<DMatrix<f64>> = functional(&e)
        .expect("unit differences are realizable")
        .iter()
        .map(|f| f * (-0.5 * n as f64))
        .collect();

    let problem = SdpProblem::new(blocks.dims.clone(), as_blocks(objective), constraints, n as f64)?
        .with_barrier_weights(blocks.irrep_dims.iter().map(|&d| d as f64).collect())?;

    Ok(ReducedSdp {
        n,
        r,
        r_gram,
        gram,
        kernel_index,
        blocks,
        kernel_functionals,
        problem,
    })
}

/// Read `g` off a reduced solution.
///
/// Coefficients come from the orbit functionals; the invariant Gram matrix is
/// then reconstructed to confirm `g_0 = 1`, that all `g_{e_i}` agree, and that
/// every permutation and sign pattern of each coefficient carries one value.
pub fn extract_coefficients_reduced(sdp: &ReducedSdp, solution: &SdpSolution) -> Result<KernelCoefficients> {
    let x = &solution.x.blocks;
    let mut values = BTreeMap::new();
    for gamma in sdp.kernel_index.iter().filter(|a| a.is_sorted()) {
        let f = &sdp.kernel_functionals[&gamma.to_signed().perm_sign_class()];
        let v = functional_value(f, x);
        values.insert(gamma.clone(), if gamma.is_zero() { v } else { 0.5 * v });
    }
    let g0 = values[&MultiIndex::zero(sdp.n)];
    if (g0 - 1.0).abs() > EXTRACTION_TOL {
        return Err(Error::InconsistentSolution(format!("g_0 = {g0}, expected 1")));
    }

    let m = sdp.blocks.lift(x);
    let mut class_sums: HashMap<SignedIndex, f64> = HashMap::new();
    for i in 0..sdp.gram.len() {
        for j in i..sdp.gram.len() {
            let d = SignedIndex::difference(sdp.gram.get(i), sdp.gram.get(j)).sign_class();
            *class_sums.entry(d).or_default() += if i == j { m[(i, j)] } else { 2.0 * m[(i, j)] };
        }
    }
    let family = build_subset_family(sdp.n)?;
    for gamma in sdp.kernel_index.iter().filter(|a| !a.is_zero()) {
        let expect = values[&gamma.sorted()];
        for &subset in family.subsets() {
            let d = omega(subset, &gamma.to_signed()).sign_class();
            let got = 0.5 * class_sums.get(&d).copied().unwrap_or(0.0);
            if (got - expect).abs() > EXTRACTION_TOL {
                return Err(Error::InconsistentSolution(format!(
                    "g_{gamma} = {expect} but the reconstructed Gram matrix gives {got} for {d}"
                )));
            }
        }
    }
    KernelCoefficients::from_orbit_values(sdp.n, sdp.r, &values, sdp.provenance())
}

/// Build, solve and extract the reduced program.
pub fn solve_reduced(n: usize, r: u32, r_gram: u32, config: &SolverConfig) -> Result<SolvedKernel> {
    let sdp = build_reduced_sdp(n, r, r_gram)?;
    let solution = solve(&sdp.problem, config)?;
    let kernel = extract_coefficients_reduced(&sdp, &solution)?;
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
    fn reynolds_examples() {
        let gram = build_index_set(2, 1).unwrap();
        let id = DMatrix::identity(3, 3);
        assert_eq!(reynolds_average(&id, &gram).unwrap(), id);

        // Single 1 at ((1,0),(0,0)) and its mirror.
        let mut a = DMatrix::zeros(3, 3);
        a[(1, 0)] = 1.0;
        a[(0, 1)] = 1.0;
        let avg = reynolds_average(&a, &gram).unwrap();
        assert!((avg[(1, 0)] - 0.5).abs() < 1e-15);
        assert!((avg[(2, 0)] - 0.5).abs() < 1e-15);
        assert!((avg[(0, 2)] - 0.5).abs() < 1e-15);
        assert_eq!(avg[(1, 2)], 0.0);
    }

    #[test]
    fn random_invariant_is_fixed_by_reynolds() {
        let gram = build_index_set(3, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_invariant(&gram, &mut rng);
        let avg = reynolds_average(&a, &gram).unwrap();
        assert!((avg - &a).amax() < 1e-15);
        assert!((a.transpose() - &a).amax() == 0.0);
    }

    #[test]
    fn small_block_structures() {
        let b = compute_blocks(2, 2).unwrap();
        assert_eq!(b.dims, vec![4, 2]);
        assert_eq!(b.irrep_dims, vec![1, 1]);
        let b = compute_blocks(3, 3).unwrap();
        assert_eq!(b.dims, vec![7, 6, 1]);
        assert_eq!(b.partitions, vec![vec![3], vec![2, 1], vec![1, 1, 1]]);
        assert!(b.orthonormality_error() < 1e-10);
    }

    #[test]
    fn univariate_has_one_block() {
        let b = compute_blocks(1, 4).unwrap();
        assert_eq!(b.dims, vec![5]);
    }
}
