//! Chebyshev polynomials of the first kind on `[-1,1]^n`.
//!
//! The measure is the product Chebyshev measure
//! `dmu(x) = prod_i (pi sqrt(1 - x_i^2))^-1 dx_i`, under which
//! `<T_a, T_b> = c_a delta_{ab}` with `c_a = 2^-H(a)`.

use std::f64::consts::PI;

use crate::exec::Execution;
use crate::indexcomb::{build_index_set, IndexSet, MultiIndex};
use crate::{Error, Result};

/// Slack allowed outside `[-1, 1]` before a point is rejected.
pub const DOMAIN_SLACK: f64 = 1e-12;

pub(crate) fn check_domain(x: f64) -> Result<f64> {
    // Written so that NaN is rejected too.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(x.abs() <= 1.0 + DOMAIN_SLACK) {
        return Err(Error::Domain { value: x });
    }
    Ok(x.clamp(-1.0, 1.0))
}

/// `T_k(x)` by the three-term recurrence.
pub fn cheb_eval(k: usize, x: f64) -> Result<f64> {
    let x = check_domain(x)?;
    Ok(cheb_unchecked(k, x))
}

fn cheb_unchecked(k: usize, x: f64) -> f64 {
    match k {
        0 => 1.0,
        1 => x,
        _ => {
            let (mut prev, mut cur) = (1.0, x);
            for _ in 1..k {
                let next = 2.0 * x * cur - prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// `[T_0(x), .., T_r(x)]` without domain checks.
pub(crate) fn cheb_table(r: usize, x: f64) -> Vec<f64> {
    let mut t = Vec::with_capacity(r + 1);
    t.push(1.0);
    if r >= 1 {
        t.push(x);
    }
    for k in 2..=r {
        t.push(2.0 * x * t[k - 1] - t[k - 2]);
    }
    t
}

/// `T_a(x) = prod_i T_{a_i}(x_i)`.
pub fn cheb_eval_multi(alpha: &MultiIndex, x: &[f64]) -> Result<f64> {
    if alpha.len() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: alpha.len(),
            found: x.len(),
        });
    }
    alpha
        .entries()
        .iter()
        .zip(x)
        .try_fold(1.0, |acc, (&k, &xi)| Ok(acc * cheb_eval(k as usize, xi)?))
}

/// `c_a = (1/2)^H(a)`.
pub fn c_alpha(alpha: &MultiIndex) -> f64 {
    0.5f64.powi(alpha.hamming() as i32)
}

/// `<T_a, T_b>_mu`, computed analytically.
pub fn inner_product(alpha: &MultiIndex, beta: &MultiIndex) -> Result<f64> {
    if alpha.len() != beta.len() {
        return Err(Error::DimensionMismatch {
            expected: alpha.len(),
            found: beta.len(),
        });
    }
    Ok(if alpha == beta { c_alpha(alpha) } else { 0.0 })
}

/// Per-axis node count used for general (non-polynomial) integrands.
pub fn default_nodes(r: u32) -> usize {
    64usize.max(4 * (r as usize + 1))
}

/// Tensor Chebyshev-Gauss rule with `m` nodes per axis.
///
/// Nodes `x_j = cos((2j - 1) pi / 2m)` with uniform weight `1/m` per axis. The
/// rule integrates polynomials of per-axis degree `<= 2m - 1` exactly against
/// `mu`.
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    n: usize,
    nodes: Vec<f64>,
}

impl QuadratureRule {
    pub fn new(n: usize, m: usize) -> Result<Self> {
        if n == 0 || m == 0 {
            return Err(Error::Parameter("quadrature needs n >= 1 and m >= 1".into()));
        }
        let nodes = (1..=m)
            .map(|j| ((2 * j - 1) as f64 * PI / (2 * m) as f64).cos())
            .collect();
        Ok(Self { n, nodes })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nodes_per_axis(&self) -> usize {
        self.nodes.len()
    }

    pub fn axis_nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn num_points(&self) -> usize {
        self.nodes.len().pow(self.n as u32)
    }

    /// The weight shared by every tensor node, `(1/m)^n`.
    pub fn weight(&self) -> f64 {
        (self.nodes.len() as f64).powi(-(self.n as i32))
    }

    /// Coordinates of tensor node `flat` (first axis slowest).
    pub fn point(&self, mut flat: usize, out: &mut [f64]) {
        let m = self.nodes.len();
        for i in (0..self.n).rev() {
            out[i] = self.nodes[flat % m];
            flat /= m;
        }
    }

    pub fn integrate<F>(&self, f: F) -> f64
    where
        F: Fn(&[f64]) -> f64,
    {
        let mut x = vec![0.0; self.n];
        let mut acc = 0.0;
        for p in 0..self.num_points() {
            self.point(p, &mut x);
            acc += f(&x);
        }
        acc * self.weight()
    }
}

/// Chebyshev coefficients `c_a(f) = <f, T_a>_mu` over `N^n_r`, aligned with `index`.
#[derive(Clone, Debug)]
pub struct ChebCoeffs {
    pub index: IndexSet,
    pub c: Vec<f64>,
}

impl ChebCoeffs {
    pub fn n(&self) -> usize {
        self.index.n()
    }

    pub fn r(&self) -> u32 {
        self.index.r()
    }

    pub fn get(&self, alpha: &[u32]) -> f64 {
        self.index.position(alpha).map_or(0.0, |i| self.c[i])
    }
}

/// Chebyshev coefficients of `f` by tensor quadrature with `m` nodes per axis.
///
/// `f` is evaluated once per tensor node; with the parallel policy it is called
/// concurrently and must be safe to share.
pub fn cheb_coeffs<F>(f: F, n: usize, r: u32, m: usize) -> Result<ChebCoeffs>
where
    F: Fn(&[f64]) -> f64 + Sync + Send,
{
    cheb_coeffs_with(Execution::default(), f, n, r, m)
}

pub fn cheb_coeffs_with<F>(exec: Execution, f: F, n: usize, r: u32, m: usize) -> Result<ChebCoeffs>
where
    F: Fn(&[f64]) -> f64 + Sync + Send,
{
    if m < r as usize + 1 {
        return Err(Error::Parameter(format!(
            "quadrature needs at least r + 1 = {} nodes per axis, got {m}",
            r + 1
        )));
    }
    let index = build_index_set(n, r)?;
    let rule = QuadratureRule::new(n, m)?;
    let deg = r as usize + 1;
    let table: Vec<Vec<f64>> = rule.axis_nodes().iter().map(|&x| cheb_table(r as usize, x)).collect();

    let values = exec.map(rule.num_points(), |p| {
        let mut x = vec![0.0; n];
        rule.point(p, &mut x);
        f(&x)
    });

    // Contract the last axis repeatedly: shape (m^(n-j), deg^j) after j steps.
    let mut data = values;
    let mut outer = rule.num_points();
    let mut inner = 1usize;
    for _ in 0..n {
        outer /= m;
        let mut next = vec![0.0; outer * deg * inner];
        for o in 0..outer {
            for (j, tj) in table.iter().enumerate() {
                let src = &data[(o * m + j) * inner..(o * m + j + 1) * inner];
                for (k, &t) in tj.iter().enumerate() {
                    let dst = &mut next[(o * deg + k) * inner..(o * deg + k + 1) * inner];
                    for (d, &s) in dst.iter_mut().zip(src) {
                        *d += t * s;
                    }
                }
            }
        }
        data = next;
        inner *= deg;
    }

    // data is now indexed by (a_1, .., a_n) in row-major order over [0, deg)^n.
    let w = rule.weight();
    let c = index
        .iter()
        .map(|a| {
            let flat = a
                .entries()
                .iter()
                .fold(0usize, |acc, &e| acc * deg + e as usize);
            data[flat] * w
        })
        .collect();
    Ok(ChebCoeffs { index, c })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(e: &[u32]) -> MultiIndex {
        MultiIndex::new(e.to_vec())
    }

    #[test]
    fn univariate_examples() {
        assert_eq!(cheb_eval(0, 0.3).unwrap(), 1.0);
        assert_eq!(cheb_eval(1, 0.3).unwrap(), 0.3);
        assert!((cheb_eval(2, 0.5).unwrap() + 0.5).abs() < 1e-15);
        assert!(matches!(cheb_eval(3, 1.1), Err(Error::Domain { .. })));
        assert!(cheb_eval(3, 1.0 + 1e-13).is_ok());
    }

    #[test]
    fn multivariate_examples() {
        assert_eq!(cheb_eval_multi(&mi(&[0, 0]), &[0.1, -0.7]).unwrap(), 1.0);
        assert!((cheb_eval_multi(&mi(&[1, 1]), &[0.5, 0.5]).unwrap() - 0.25).abs() < 1e-15);
        assert!((cheb_eval_multi(&mi(&[2, 1]), &[0.5, 1.0]).unwrap() + 0.5).abs() < 1e-15);
        assert!(cheb_eval_multi(&mi(&[2, 1]), &[0.5]).is_err());
    }

    #[test]
    fn inner_product_examples() {
        assert_eq!(inner_product(&mi(&[1, 0]), &mi(&[1, 0])).unwrap(), 0.5);
        assert_eq!(inner_product(&mi(&[0, 0]), &mi(&[0, 0])).unwrap(), 1.0);
        assert_eq!(inner_product(&mi(&[1, 0]), &mi(&[0, 1])).unwrap(), 0.0);
        assert!(inner_product(&mi(&[1]), &mi(&[0, 1])).is_err());
    }

    #[test]
    fn coeffs_of_constant() {
        let c = cheb_coeffs(|_| 1.0, 2, 2, 8).unwrap();
        for (a, v) in c.index.iter().zip(&c.c) {
            let expect = if a.is_zero() { 1.0 } else { 0.0 };
            assert!((v - expect).abs() < 1e-14, "{a}: {v}");
        }
    }

    #[test]
    fn coeffs_of_t11_and_square() {
        let c = cheb_coeffs(|x| x[0] * x[1], 2, 2, 8).unwrap();
        assert!((c.get(&[1, 1]) - 0.25).abs() < 1e-14);
        let total: f64 = c.c.iter().map(|v| v.abs()).sum();
        assert!((total - 0.25).abs() < 1e-13);

        let c = cheb_coeffs(|x| x[0] * x[0], 2, 2, 8).unwrap();
        assert!((c.get(&[0, 0]) - 0.5).abs() < 1e-14);
        assert!((c.get(&[2, 0]) - 0.25).abs() < 1e-14);
        assert!(c.get(&[0, 2]).abs() < 1e-14);
        assert!(c.get(&[1, 1]).abs() < 1e-14);
    }

    #[test]
    fn too_few_nodes() {
        assert!(cheb_coeffs(|_| 1.0, 1, 5, 5).is_err());
        assert!(cheb_coeffs(|_| 1.0, 1, 5, 6).is_ok());
    }

    #[test]
    fn execution_policies_agree() {
        let f = |x: &[f64]| (3.0 * x[0]).sin() * x[1].exp();
        let a = cheb_coeffs_with(Execution::Sequential, f, 2, 6, 32).unwrap();
        let b = cheb_coeffs_with(Execution::Parallel, f, 2, 6, 32).unwrap();
        assert_eq!(a.c, b.c);
    }
}
