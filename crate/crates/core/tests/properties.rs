//! Property tests for the building blocks, each against an independent oracle.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use proptest::prelude::*;

use minres_core::chebyshev::{cheb_coeffs, cheb_eval, cheb_eval_multi, inner_product, QuadratureRule};
use minres_core::indexcomb::{
    build_gamma_set, build_index_set, build_subset_family, omega, sign_patterns, MultiIndex, SignedIndex, Subset,
};
use minres_core::kernels::{
    apply_kernel, dirichlet, eval_kernel, fejer, kpm_jackson, product_kernel, resolution, KernelCoefficients,
};
use minres_core::sdp_model::build_constraint_matrix;
use minres_core::symmetry::compute_blocks;
use minres_core::symmetry::irreps::multiplicities_by_characters;

fn unit() -> impl Strategy<Value = f64> {
    -1.0f64..=1.0
}

fn product_of(parts: usize, r: u32) -> KernelCoefficients {
    product_kernel(&vec![kpm_jackson(r).unwrap(); parts]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn recurrence_matches_cosine(k in 0usize..60, theta in 0.0f64..PI) {
        let t = cheb_eval(k, theta.cos()).unwrap();
        prop_assert!((t - (k as f64 * theta).cos()).abs() < 1e-11);
    }

    /// `2^H(g) prod cos(g_i p_i)` equals the sum over sign flips inside the support.
    #[test]
    fn product_of_cosines_expands_over_support(
        g in prop::collection::vec(-4i32..=4, 1..=4),
        phi in prop::collection::vec(-PI..PI, 4),
    ) {
        let n = g.len();
        let gamma = SignedIndex(g.clone());
        let support: Vec<usize> = (0..n).filter(|&i| g[i] != 0).collect();
        let h = support.len() as i32;
        let lhs = 2f64.powi(h) * (0..n).map(|i| (g[i] as f64 * phi[i]).cos()).product::<f64>();
        let rhs: f64 = (0u64..1 << support.len())
            .map(|mask| {
                let coords: Vec<usize> =
                    support.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &i)| i).collect();
                let w = omega(Subset::from_coords(&coords), &gamma);
                w.0.iter().zip(&phi).map(|(&e, &p)| e as f64 * p).sum::<f64>().cos()
            })
            .sum();
        prop_assert!((lhs - rhs).abs() < 1e-10);
        // Summing over every subset instead counts each term 2^(n - H) times.
        let all: f64 = (0u64..1 << n)
            .map(|mask| {
                let w = omega(Subset(mask), &gamma);
                w.0.iter().zip(&phi).map(|(&e, &p)| e as f64 * p).sum::<f64>().cos()
            })
            .sum();
        prop_assert!((2f64.powi(n as i32) * lhs / 2f64.powi(h) - all).abs() < 1e-9);
    }

    #[test]
    fn quadrature_is_exact_on_products(
        a in prop::collection::vec(0u32..5, 2),
        b in prop::collection::vec(0u32..5, 2),
    ) {
        let (a, b) = (MultiIndex::new(a), MultiIndex::new(b));
        let q = QuadratureRule::new(2, 6).unwrap();
        let got = q.integrate(|x| cheb_eval_multi(&a, x).unwrap() * cheb_eval_multi(&b, x).unwrap());
        prop_assert!((got - inner_product(&a, &b).unwrap()).abs() < 1e-13);
    }

    #[test]
    fn product_kernels_are_non_negative(
        r in 1u32..8,
        x in prop::collection::vec(unit(), 2),
        y in prop::collection::vec(unit(), 2),
    ) {
        let k = product_of(2, r);
        prop_assert!(eval_kernel(&k, &x, &y).unwrap() >= -1e-12);
    }

    #[test]
    fn kernels_have_unit_mass(r in 1u32..6, x in prop::collection::vec(unit(), 2)) {
        let q = QuadratureRule::new(2, r as usize * 2 + 1).unwrap();
        for k in [product_of(2, r), dirichlet(2, r).unwrap()] {
            let mass = q.integrate(|y| eval_kernel(&k, &x, y).unwrap());
            prop_assert!((mass - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn kernels_are_permutation_invariant(
        r in 1u32..5,
        x in prop::collection::vec(unit(), 3),
        y in prop::collection::vec(unit(), 3),
    ) {
        let k = product_of(3, r);
        let (px, py) = ([x[2], x[0], x[1]], [y[2], y[0], y[1]]);
        let d = eval_kernel(&k, &x, &y).unwrap() - eval_kernel(&k, &px, &py).unwrap();
        prop_assert!(d.abs() < 1e-12);
    }

    /// The coefficient path agrees with direct quadrature of `int K(x, y) f(y) dmu(y)`.
    #[test]
    fn apply_kernel_matches_direct_integration(
        r in 1u32..6,
        w in prop::collection::vec(-2.0f64..2.0, 2),
        x in prop::collection::vec(unit(), 2),
    ) {
        let f = |y: &[f64]| (w[0] * y[0] + w[1] * y[1]).exp();
        let k = product_of(2, r);
        let approx = apply_kernel(&k, &cheb_coeffs(f, 2, 2 * r, 48).unwrap()).unwrap();
        let q = QuadratureRule::new(2, 48).unwrap();
        let direct = q.integrate(|y| eval_kernel(&k, &x, y).unwrap() * f(y));
        prop_assert!((approx.eval(&x).unwrap() - direct).abs() < 1e-11);
    }
}

#[test]
fn dirichlet_reproduces_polynomials() {
    let p = |x: &[f64]| 3.0 * x[0] * x[0] * x[1] - x[1] + 0.5;
    let approx = apply_kernel(&dirichlet(2, 3).unwrap(), &cheb_coeffs(p, 2, 3, 8).unwrap()).unwrap();
    for x in [[0.3, -0.2], [1.0, 1.0], [-0.9, 0.4]] {
        assert!((approx.eval(&x).unwrap() - p(&x)).abs() < 1e-13);
    }
}

#[test]
fn resolution_integral_matches_coefficients() {
    for k in [fejer(5).unwrap(), kpm_jackson(7).unwrap(), product_of(2, 3)] {
        let n = k.n();
        let q = QuadratureRule::new(2 * n, k.r() as usize / 2 + 3).unwrap();
        let integral = q.integrate(|z| {
            let (x, y) = z.split_at(n);
            let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum();
            d2 * eval_kernel(&k, x, y).unwrap()
        });
        assert!((integral - resolution(&k)).abs() < 1e-12, "{integral} vs {}", resolution(&k));
    }
}

#[test]
fn block_orders_match_character_oracle() {
    for n in 2..=5 {
        for r in 1..=5 {
            let blocks = compute_blocks(n, r).unwrap();
            let oracle: Vec<usize> = multiplicities_by_characters(n, r).into_iter().map(|(_, k)| k).collect();
            assert_eq!(blocks.dims, oracle, "n={n} r={r}");
            let total: usize = blocks.dims.iter().zip(&blocks.irrep_dims).map(|(k, d)| k * d).sum();
            assert_eq!(total, blocks.order());
        }
    }
}

/// Brute force: every `|a - b|` over the Gram index set with degree above `r`.
fn gamma_brute_force(n: usize, r: u32, r_gram: u32) -> BTreeSet<Vec<u32>> {
    let gram = build_index_set(n, r_gram).unwrap();
    let mut out = BTreeSet::new();
    for a in gram.iter() {
        for b in gram.iter() {
            let d: Vec<u32> = a.entries().iter().zip(b.entries()).map(|(x, y)| x.abs_diff(*y)).collect();
            if d.iter().sum::<u32>() > r {
                out.insert(d);
            }
        }
    }
    out
}

#[test]
fn gamma_set_matches_brute_force() {
    for n in 1..=3 {
        for r in 1..=3 {
            for r_gram in r..=r + 2 {
                let got: BTreeSet<Vec<u32>> = build_gamma_set(n, r, r_gram)
                    .unwrap()
                    .iter()
                    .map(|g| g.entries().to_vec())
                    .collect();
                assert_eq!(got, gamma_brute_force(n, r, r_gram), "n={n} r={r} r'={r_gram}");
            }
        }
    }
}

/// The constraint matrices over all sign patterns of `g` cover exactly the
/// Gram pairs with `|a - b| = g`.
#[test]
fn constraint_matrices_cover_every_pair() {
    let (n, r) = (3, 2);
    let gram = build_index_set(n, r).unwrap();
    let family = build_subset_family(n).unwrap();
    for g in build_gamma_set(n, 0, r).unwrap() {
        let gamma = g.to_signed();
        let mut covered = BTreeSet::new();
        for pattern in sign_patterns(&family, &gamma) {
            let c = build_constraint_matrix(&pattern, Subset::EMPTY, &gram);
            for &(i, j, v) in c.entries.entries() {
                assert_eq!(v, 1.0);
                assert!(covered.insert((i.min(j), i.max(j))), "pair counted twice for {g}");
            }
        }
        let expected: BTreeSet<(usize, usize)> = (0..gram.len())
            .flat_map(|i| (i..gram.len()).map(move |j| (i, j)))
            .filter(|&(i, j)| {
                let d = SignedIndex::difference(gram.get(i), gram.get(j));
                d.abs() == g
            })
            .collect();
        assert_eq!(covered, expected, "{g}");
    }
}
