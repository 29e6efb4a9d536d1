//! Kernel coefficients, closed-form kernels, kernel application and error bounds.
//!
//! Coefficients are stored in the convention
//! `K(x, y) = 1 + sum_{a != 0} 2^H(a) g_a T_a(x) T_a(y)`; the `2^H(a)` factor is
//! applied at evaluation time and never stored in `g`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::chebyshev::{cheb_table, check_domain, ChebCoeffs};
use crate::exec::Execution;
use crate::indexcomb::{build_index_set, IndexSet, MultiIndex};
use crate::{Error, Result};

/// Where a set of kernel coefficients came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    ClosedFormKpm,
    Fejer,
    Dirichlet,
    Product,
    Sdp,
    SdpDecoupled,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::ClosedFormKpm => "closed-form-kpm",
            Provenance::Fejer => "fejer",
            Provenance::Dirichlet => "dirichlet",
            Provenance::Product => "product",
            Provenance::Sdp => "sdp",
            Provenance::SdpDecoupled => "sdp-decoupled",
        }
    }
}

/// Damping coefficients `g_a` over `N^n_r`, aligned with `index`.
#[derive(Clone, Debug)]
pub struct KernelCoefficients {
    provenance: Provenance,
    index: IndexSet,
    g: Vec<f64>,
}

impl KernelCoefficients {
    pub fn new(index: IndexSet, g: Vec<f64>, provenance: Provenance) -> Result<Self> {
        if g.len() != index.len() {
            return Err(Error::DimensionMismatch {
                expected: index.len(),
                found: g.len(),
            });
        }
        if let Some(v) = g.iter().find(|v| !v.is_finite()) {
            return Err(Error::Parameter(format!("non-finite kernel coefficient {v}")));
        }
        Ok(Self { provenance, index, g })
    }

    /// Build a permutation-invariant kernel from one value per orbit representative.
    ///
    /// Representatives missing from `values` get coefficient 0.
    pub fn from_orbit_values(
        n: usize,
        r: u32,
        values: &BTreeMap<MultiIndex, f64>,
        provenance: Provenance,
    ) -> Result<Self> {
        let index = build_index_set(n, r)?;
        let g = index
            .iter()
            .map(|a| values.get(&a.sorted()).copied().unwrap_or(0.0))
            .collect();
        Self::new(index, g, provenance)
    }

    pub fn n(&self) -> usize {
        self.index.n()
    }

    pub fn r(&self) -> u32 {
        self.index.r()
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn index(&self) -> &IndexSet {
        &self.index
    }

    pub fn values(&self) -> &[f64] {
        &self.g
    }

    /// `g_a`, or 0 outside `N^n_r`.
    pub fn get(&self, alpha: &[u32]) -> f64 {
        self.index.position(alpha).map_or(0.0, |i| self.g[i])
    }

    pub fn g0(&self) -> f64 {
        self.g[0]
    }

    /// `g_{e_i}` for the 0-based coordinate `i`; 0 when `r = 0`.
    pub fn g_unit(&self, i: usize) -> f64 {
        self.get(MultiIndex::unit(self.n(), i).entries())
    }

    /// Largest deviation `|g_a - g_{sort(a)}|` over the index set.
    pub fn asymmetry(&self) -> f64 {
        self.index
            .iter()
            .zip(&self.g)
            .map(|(a, &v)| (v - self.get(a.sorted().entries())).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_permutation_invariant(&self, tol: f64) -> bool {
        self.asymmetry() <= tol
    }

    /// One `(representative, g)` pair per orbit, in canonical order.
    pub fn orbit_values(&self) -> Vec<(MultiIndex, f64)> {
        self.index
            .iter()
            .zip(&self.g)
            .filter(|(a, _)| a.is_sorted())
            .map(|(a, &v)| (a.clone(), v))
            .collect()
    }
}

/// All-ones coefficients: the identity on polynomials of degree `r`.
pub fn dirichlet(n: usize, r: u32) -> Result<KernelCoefficients> {
    let index = build_index_set(n, r)?;
    let g = vec![1.0; index.len()];
    KernelCoefficients::new(index, g, Provenance::Dirichlet)
}

/// Univariate Fejér kernel, `g_k = 1 - k / (r + 1)`.
pub fn fejer(r: u32) -> Result<KernelCoefficients> {
    let index = build_index_set(1, r)?;
    let g = (0..=r).map(|k| 1.0 - k as f64 / (r + 1) as f64).collect();
    KernelCoefficients::new(index, g, Provenance::Fejer)
}

/// Jackson coefficient `g_k` of the univariate minimum-resolution kernel of degree `r`.
pub fn kpm_coefficient(r: u32, k: u32) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let q = PI / (r + 2) as f64;
    let kq = k as f64 * q;
    ((r - k + 2) as f64 * kq.cos() + kq.sin() / q.tan()) / (r + 2) as f64
}

/// Univariate minimum-resolution (Jackson) kernel in closed form.
pub fn kpm_jackson(r: u32) -> Result<KernelCoefficients> {
    let index = build_index_set(1, r)?;
    let g = (0..=r).map(|k| kpm_coefficient(r, k)).collect();
    KernelCoefficients::new(index, g, Provenance::ClosedFormKpm)
}

/// `1 - cos(pi / (r + 2))`, the optimal univariate resolution.
pub fn univariate_sigma2(r: u32) -> f64 {
    1.0 - (PI / (r + 2) as f64).cos()
}

/// Unit-norm amplitudes `a_0..a_r` of a univariate kernel `p(phi) = |sum a_k e^{ik phi}|^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct UnivariateAmplitudes {
    a: Vec<f64>,
}

impl UnivariateAmplitudes {
    pub fn new(a: Vec<f64>) -> Result<Self> {
        let norm: f64 = a.iter().map(|v| v * v).sum();
        if a.is_empty() || (norm - 1.0).abs() > 1e-12 {
            return Err(Error::Parameter(format!(
                "amplitudes must have unit norm, got squared norm {norm}"
            )));
        }
        Ok(Self { a })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.a
    }

    pub fn degree(&self) -> u32 {
        self.a.len() as u32 - 1
    }

    /// Autocorrelations `g_k = sum_v a_v a_{v+k}`.
    pub fn coefficients(&self) -> Vec<f64> {
        (0..self.a.len())
            .map(|k| self.a.iter().zip(&self.a[k..]).map(|(x, y)| x * y).sum())
            .collect()
    }

    pub fn kernel(&self, provenance: Provenance) -> Result<KernelCoefficients> {
        let index = build_index_set(1, self.degree())?;
        KernelCoefficients::new(index, self.coefficients(), provenance)
    }
}

/// Minimum-resolution univariate kernel from the smallest eigenpair of the
/// tridiagonal matrix with 1 on the diagonal and -1/2 off it.
///
/// Independent of the closed form; returns the amplitudes and `sigma^2`.
pub fn univariate_minres_oracle(r: u32) -> Result<(UnivariateAmplitudes, f64)> {
    let m = r as usize + 1;
    let t = DMatrix::from_fn(m, m, |i, j| match i.abs_diff(j) {
        0 => 1.0,
        1 => -0.5,
        _ => 0.0,
    });
    let eig = t
        .try_symmetric_eigen(1e-15, 10_000)
        .ok_or_else(|| Error::NumericalFailure("tridiagonal eigensolver did not converge".into()))?;
    let (imin, &lambda) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a: &(usize, &f64), b: &(usize, &f64)| a.1.total_cmp(b.1))
        .expect("non-empty spectrum");
    let mut a: Vec<f64> = eig.eigenvectors.column(imin).iter().copied().collect();
    // Perron vector: choose the all-positive sign.
    if a.iter().sum::<f64>() < 0.0 {
        a.iter_mut().for_each(|v| *v = -*v);
    }
    let norm = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    a.iter_mut().for_each(|v| *v /= norm);
    Ok((UnivariateAmplitudes::new(a)?, lambda))
}

/// Tensor product of univariate kernels of equal degree `r`.
///
/// The result has degree `n r`, `g_a = prod_i g_{a_i}` on the box `a_i <= r`
/// and 0 elsewhere.
pub fn product_kernel(parts: &[KernelCoefficients]) -> Result<KernelCoefficients> {
    let first = parts
        .first()
        .ok_or_else(|| Error::Parameter("product kernel needs at least one factor".into()))?;
    if parts.iter().any(|p| p.n() != 1) {
        return Err(Error::Parameter("product kernel factors must be univariate".into()));
    }
    let r = first.r();
    if parts.iter().any(|p| p.r() != r) {
        return Err(Error::Parameter("product kernel factors must share one degree".into()));
    }
    let n = parts.len();
    let index = build_index_set(n, n as u32 * r)?;
    let g = index
        .iter()
        .map(|a| {
            a.entries()
                .iter()
                .zip(parts)
                .map(|(&k, p)| if k <= r { p.values()[k as usize] } else { 0.0 })
                .product()
        })
        .collect();
    KernelCoefficients::new(index, g, Provenance::Product)
}

/// `sigma^2 = sum_i (1 - g_{e_i})`.
pub fn resolution(k: &KernelCoefficients) -> f64 {
    (0..k.n()).map(|i| 1.0 - k.g_unit(i)).sum()
}

/// Per-axis Chebyshev tables for a point, after domain checks.
fn axis_tables(x: &[f64], r: u32) -> Result<Vec<Vec<f64>>> {
    x.iter()
        .map(|&xi| Ok(cheb_table(r as usize, check_domain(xi)?)))
        .collect()
}

/// `K(x, y)`.
pub fn eval_kernel(k: &KernelCoefficients, x: &[f64], y: &[f64]) -> Result<f64> {
    let n = k.n();
    for p in [x, y] {
        if p.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: p.len(),
            });
        }
    }
    let tx = axis_tables(x, k.r())?;
    let ty = axis_tables(y, k.r())?;
    let mut acc = 0.0;
    for (a, &g) in k.index().iter().zip(k.values()) {
        if a.is_zero() {
            acc += 1.0;
            continue;
        }
        let mut term = g * f64::from(1u32 << a.hamming());
        for (i, &e) in a.entries().iter().enumerate() {
            term *= tx[i][e as usize] * ty[i][e as usize];
        }
        acc += term;
    }
    Ok(acc)
}

/// Chebyshev coefficients `b_a` of a polynomial over `N^n_r`.
#[derive(Clone, Debug)]
pub struct ChebApproximation {
    index: IndexSet,
    b: Vec<f64>,
    trie: Trie,
}

/// Coefficients nested by leading exponent, for axis-by-axis Clenshaw.
#[derive(Clone, Debug)]
enum Trie {
    Leaf(Vec<f64>),
    Node(Vec<Trie>),
}

fn build_trie(index: &IndexSet, b: &[f64], prefix: &mut Vec<u32>, budget: u32) -> Trie {
    let n = index.n();
    if prefix.len() + 1 == n {
        let mut leaf = Vec::with_capacity(budget as usize + 1);
        for a in 0..=budget {
            prefix.push(a);
            leaf.push(index.position(prefix).map_or(0.0, |i| b[i]));
            prefix.pop();
        }
        return Trie::Leaf(leaf);
    }
    let mut children = Vec::with_capacity(budget as usize + 1);
    for a in 0..=budget {
        prefix.push(a);
        children.push(build_trie(index, b, prefix, budget - a));
        prefix.pop();
    }
    Trie::Node(children)
}

/// `sum_k c_k T_k(x)` by Clenshaw's recurrence.
pub fn clenshaw(c: &[f64], x: f64) -> f64 {
    let (mut b1, mut b2) = (0.0, 0.0);
    for &ck in c.iter().skip(1).rev() {
        let b0 = ck + 2.0 * x * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    c.first().copied().unwrap_or(0.0) + x * b1 - b2
}

fn eval_trie(t: &Trie, x: &[f64]) -> f64 {
    match t {
        Trie::Leaf(c) => clenshaw(c, x[0]),
        Trie::Node(children) => {
            let inner: Vec<f64> = children.iter().map(|c| eval_trie(c, &x[1..])).collect();
            clenshaw(&inner, x[0])
        }
    }
}

impl ChebApproximation {
    pub fn new(index: IndexSet, b: Vec<f64>) -> Result<Self> {
        if b.len() != index.len() {
            return Err(Error::DimensionMismatch {
                expected: index.len(),
                found: b.len(),
            });
        }
        if b.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parameter("approximation has non-finite coefficients".into()));
        }
        let trie = build_trie(&index, &b, &mut Vec::new(), index.r());
        Ok(Self { index, b, trie })
    }

    pub fn n(&self) -> usize {
        self.index.n()
    }

    pub fn r(&self) -> u32 {
        self.index.r()
    }

    pub fn index(&self) -> &IndexSet {
        &self.index
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.b
    }

    pub fn get(&self, alpha: &[u32]) -> f64 {
        self.index.position(alpha).map_or(0.0, |i| self.b[i])
    }

    /// Value at `x` by nested per-axis Clenshaw recurrences.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        self.check_point(x)?;
        let x: Vec<f64> = x.iter().map(|v| v.clamp(-1.0, 1.0)).collect();
        Ok(eval_trie(&self.trie, &x))
    }

    /// Value at `x` by direct summation of `b_a T_a(x)`.
    pub fn eval_naive(&self, x: &[f64]) -> Result<f64> {
        self.check_point(x)?;
        let t = axis_tables(x, self.r())?;
        Ok(self
            .index
            .iter()
            .zip(&self.b)
            .map(|(a, &b)| {
                a.entries()
                    .iter()
                    .enumerate()
                    .fold(b, |acc, (i, &e)| acc * t[i][e as usize])
            })
            .sum())
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: x.len(),
            });
        }
        for &v in x {
            check_domain(v)?;
        }
        Ok(())
    }
}

/// The damped expansion `b_0 = c_0`, `b_a = 2^H(a) g_a c_a`.
pub fn apply_kernel(k: &KernelCoefficients, c: &ChebCoeffs) -> Result<ChebApproximation> {
    if k.n() != c.n() || k.r() != c.r() {
        return Err(Error::SupportMismatch(format!(
            "kernel is over N^{}_{} but coefficients are over N^{}_{}",
            k.n(),
            k.r(),
            c.n(),
            c.r()
        )));
    }
    let b = k
        .index()
        .iter()
        .zip(k.values().iter().zip(&c.c))
        .map(|(a, (&g, &ca))| {
            if a.is_zero() {
                ca
            } else {
                f64::from(1u32 << a.hamming()) * g * ca
            }
        })
        .collect();
    ChebApproximation::new(k.index().clone(), b)
}

pub fn eval_approx(a: &ChebApproximation, x: &[f64]) -> Result<f64> {
    a.eval(x)
}

/// `m` equispaced points on `[-1, 1]` including both endpoints.
pub fn linspace(m: usize) -> Vec<f64> {
    (0..m)
        .map(|j| -1.0 + 2.0 * j as f64 / (m - 1) as f64)
        .collect()
}

/// Coordinates of flat point `p` on the uniform grid (first axis slowest).
pub fn grid_point(axis: &[f64], n: usize, mut p: usize, out: &mut [f64]) {
    let m = axis.len();
    for i in (0..n).rev() {
        out[i] = axis[p % m];
        p /= m;
    }
}

/// `max |f(x) - a(x)|` over the uniform tensor grid with endpoints.
pub fn uniform_error<F>(f: F, a: &ChebApproximation, grid_per_axis: usize) -> Result<f64>
where
    F: Fn(&[f64]) -> f64 + Sync + Send,
{
    uniform_error_with(Execution::default(), f, a, grid_per_axis)
}

pub fn uniform_error_with<F>(
    exec: Execution,
    f: F,
    a: &ChebApproximation,
    grid_per_axis: usize,
) -> Result<f64>
where
    F: Fn(&[f64]) -> f64 + Sync + Send,
{
    if grid_per_axis < 2 {
        return Err(Error::Parameter("error grid needs at least 2 points per axis".into()));
    }
    let n = a.n();
    let axis = linspace(grid_per_axis);
    let points = grid_per_axis
        .checked_pow(n as u32)
        .ok_or(Error::TooLarge {
            size: usize::MAX,
            cap: usize::MAX,
        })?;
    Ok(exec.max(points, |p| {
        let mut x = vec![0.0; n];
        grid_point(&axis, n, p, &mut x);
        (f(&x) - eval_trie(&a.trie, &x)).abs()
    }))
}

/// `2 (1 + pi / sqrt 2) omega_f(sigma)`.
pub fn prop1_bound<W>(omega_f: W, sigma: f64) -> f64
where
    W: Fn(f64) -> f64,
{
    2.0 * (1.0 + PI / 2f64.sqrt()) * omega_f(sigma)
}

/// The bound for an `L`-Lipschitz function, `omega_f(d) = L d`.
pub fn prop1_bound_lipschitz(lipschitz: f64, sigma: f64) -> f64 {
    prop1_bound(|d| lipschitz * d, sigma)
}

/// `n (1 - cos(n pi / (r + n)))`, an upper bound on the optimal `sigma^2` for `r >= n`.
pub fn conv_rate_bound(n: usize, r: u32) -> Result<f64> {
    if (r as usize) < n {
        return Err(Error::Parameter(format!(
            "convergence-rate bound needs r >= n, got n = {n}, r = {r}"
        )));
    }
    let n_f = n as f64;
    Ok(n_f * (1.0 - (n_f * PI / (r as f64 + n_f)).cos()))
}

pub const COEFF_SCHEMA: &str = "minres-kernel/1";
pub const COEFF_CONVENTION: &str = "K=1+sum 2^H(a) g_a T_a(x)T_a(y)";

#[derive(Debug, Serialize, Deserialize)]
struct CoeffFile {
    schema: String,
    n: usize,
    r: u32,
    sigma2: f64,
    convention: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    provenance: Option<Provenance>,
    coeffs: Vec<CoeffEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
struct CoeffEntry {
    alpha: Vec<u32>,
    g: f64,
}

/// Serialize a permutation-invariant kernel, one entry per orbit representative.
pub fn to_coeff_json(k: &KernelCoefficients) -> Result<String> {
    if !k.is_permutation_invariant(0.0) {
        return Err(Error::Format(
            "only permutation-invariant kernels can be written; the file lists orbit representatives".into(),
        ));
    }
    let file = CoeffFile {
        schema: COEFF_SCHEMA.into(),
        n: k.n(),
        r: k.r(),
        sigma2: resolution(k),
        convention: COEFF_CONVENTION.into(),
        provenance: Some(k.provenance()),
        coeffs: k
            .orbit_values()
            .into_iter()
            .map(|(a, g)| CoeffEntry {
                alpha: a.entries().to_vec(),
                g,
            })
            .collect(),
    };
    Ok(serde_json::to_string_pretty(&file)?)
}

/// Parse a coefficient file and expand orbit representatives to all of `N^n_r`.
pub fn from_coeff_json(text: &str) -> Result<KernelCoefficients> {
    let file: CoeffFile = serde_json::from_str(text)?;
    if file.schema != COEFF_SCHEMA {
        return Err(Error::Format(format!("unknown schema {:?}", file.schema)));
    }
    if file.convention != COEFF_CONVENTION {
        return Err(Error::Format(format!("unsupported convention {:?}", file.convention)));
    }
    let mut values = BTreeMap::new();
    for e in &file.coeffs {
        let a = MultiIndex::new(e.alpha.clone());
        if a.len() != file.n || a.degree() > file.r || !a.is_sorted() {
            return Err(Error::Format(format!(
                "entry {a} is not a sorted multi-index in N^{}_{}",
                file.n, file.r
            )));
        }
        if values.insert(a.clone(), e.g).is_some() {
            return Err(Error::Format(format!("duplicate entry {a}")));
        }
    }
    let provenance = file.provenance.unwrap_or(Provenance::Sdp);
    KernelCoefficients::from_orbit_values(file.n, file.r, &values, provenance)
}

pub fn write_coeff_file(k: &KernelCoefficients, path: &Path) -> Result<()> {
    std::fs::write(path, to_coeff_json(k)?)?;
    Ok(())
}

pub fn read_coeff_file(path: &Path) -> Result<KernelCoefficients> {
    from_coeff_json(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chebyshev::cheb_coeffs;

    #[test]
    fn closed_forms() {
        assert_eq!(dirichlet(1, 2).unwrap().values(), &[1.0, 1.0, 1.0]);
        assert_eq!(resolution(&dirichlet(2, 3).unwrap()), 0.0);

        let f = fejer(2).unwrap();
        let expect = [1.0, 2.0 / 3.0, 1.0 / 3.0];
        for (g, e) in f.values().iter().zip(expect) {
            assert!((g - e).abs() < 1e-15);
        }
        assert!((resolution(&f) - 1.0 / 3.0).abs() < 1e-15);

        let k = kpm_jackson(1).unwrap();
        assert!((k.values()[1] - 0.5).abs() < 1e-14);
        assert!((resolution(&kpm_jackson(2).unwrap()) - 0.2929).abs() < 1e-4);
        assert!((resolution(&kpm_jackson(10).unwrap()) - 0.0341).abs() < 1e-4);
    }

    #[test]
    fn oracle_small_cases() {
        let (a, s) = univariate_minres_oracle(1).unwrap();
        assert!((s - 0.5).abs() < 1e-14);
        let h = 1.0 / 2f64.sqrt();
        assert!(a.as_slice().iter().all(|v| (v - h).abs() < 1e-12));
        let (_, s) = univariate_minres_oracle(2).unwrap();
        assert!((s - univariate_sigma2(2)).abs() < 1e-14);
    }

    #[test]
    fn product_examples() {
        let p = product_kernel(&[kpm_jackson(1).unwrap(), kpm_jackson(1).unwrap()]).unwrap();
        assert_eq!(p.r(), 2);
        assert!((resolution(&p) - 1.0).abs() < 1e-14);
        assert_eq!(p.get(&[2, 0]), 0.0);
        assert!((p.get(&[1, 1]) - 0.25).abs() < 1e-14);

        let p = product_kernel(&[kpm_jackson(2).unwrap(), kpm_jackson(2).unwrap()]).unwrap();
        assert!((resolution(&p) - 0.5858).abs() < 1e-4);

        let d = product_kernel(&[dirichlet(1, 2).unwrap(), dirichlet(1, 2).unwrap()]).unwrap();
        for (a, &g) in d.index().iter().zip(d.values()) {
            let inside = a.entries().iter().all(|&e| e <= 2);
            assert_eq!(g, if inside { 1.0 } else { 0.0 });
        }

        assert!(product_kernel(&[kpm_jackson(1).unwrap(), kpm_jackson(2).unwrap()]).is_err());
    }

    #[test]
    fn kernel_evaluation() {
        let d = dirichlet(1, 1).unwrap();
        assert!((eval_kernel(&d, &[1.0], &[1.0]).unwrap() - 3.0).abs() < 1e-15);
        assert!(eval_kernel(&d, &[1.5], &[1.0]).is_err());
    }

    #[test]
    fn apply_examples() {
        let k = kpm_jackson(4).unwrap();
        let k2 = product_kernel(&[k.clone(), k]).unwrap();
        let one = cheb_coeffs(|_| 1.0, 2, 8, 16).unwrap();
        let a = apply_kernel(&k2, &one).unwrap();
        assert!((a.get(&[0, 0]) - 1.0).abs() < 1e-14);
        assert!(a.coefficients()[1..].iter().all(|v| v.abs() < 1e-14));

        let t10 = cheb_coeffs(|x| x[0], 2, 8, 16).unwrap();
        let a = apply_kernel(&k2, &t10).unwrap();
        assert!((a.get(&[1, 0]) - k2.get(&[1, 0])).abs() < 1e-14);

        let d = dirichlet(2, 3).unwrap();
        let poly = |x: &[f64]| x[0] * x[0] * x[1] - 0.5 * x[1] + 0.25;
        let c = cheb_coeffs(poly, 2, 3, 16).unwrap();
        let a = apply_kernel(&d, &c).unwrap();
        for x in [[0.3, -0.4], [1.0, 1.0], [-0.9, 0.2]] {
            assert!((a.eval(&x).unwrap() - poly(&x)).abs() < 1e-13);
        }

        let wrong = cheb_coeffs(|_| 1.0, 2, 2, 16).unwrap();
        assert!(matches!(apply_kernel(&d, &wrong), Err(Error::SupportMismatch(_))));
    }

    #[test]
    fn approx_evaluation() {
        // x_1^2 = (T_0 + T_2(x_1)) / 2
        let index = build_index_set(2, 2).unwrap();
        let mut b = vec![0.0; index.len()];
        b[index.position(&[0, 0]).unwrap()] = 0.5;
        b[index.position(&[2, 0]).unwrap()] = 0.5;
        let a = ChebApproximation::new(index, b).unwrap();
        assert!((a.eval(&[0.5, -0.3]).unwrap() - 0.25).abs() < 1e-14);
        assert!(a.eval(&[0.5, 2.0]).is_err());
    }

    #[test]
    fn bounds() {
        assert_eq!(prop1_bound_lipschitz(3.0, 0.0), 0.0);
        let b = prop1_bound_lipschitz(2.0, 0.1);
        assert!((b - 2.0 * (1.0 + PI / 2f64.sqrt()) * 0.2).abs() < 1e-15);
        assert!((conv_rate_bound(2, 4).unwrap() - 1.0).abs() < 1e-14);
        assert!((conv_rate_bound(3, 9).unwrap() - 0.8787).abs() < 1e-3);
        assert!(conv_rate_bound(3, 2).is_err());
        for r in 1..20 {
            assert!(conv_rate_bound(1, r).unwrap() >= univariate_sigma2(r));
        }
    }

    #[test]
    fn coefficient_file_round_trip() {
        let k = kpm_jackson(3).unwrap();
        let k2 = product_kernel(&[k.clone(), k]).unwrap();
        let text = to_coeff_json(&k2).unwrap();
        let back = from_coeff_json(&text).unwrap();
        assert_eq!(back.values(), k2.values());
        assert_eq!(back.provenance(), Provenance::Product);

        let mut raw: serde_json::Value = serde_json::from_str(&text).unwrap();
        raw["schema"] = "other".into();
        assert!(matches!(from_coeff_json(&raw.to_string()), Err(Error::Format(_))));
    }
}
