//! Partitions and irreducible characters of the symmetric group.

use std::collections::HashMap;

/// Partitions of `n` in lexicographically descending order, e.g.
/// `[4], [3,1], [2,2], [2,1,1], [1,1,1,1]`.
pub fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(rem: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rem == 0 {
            out.push(cur.clone());
            return;
        }
        for part in (1..=rem.min(max)).rev() {
            cur.push(part);
            rec(rem - part, part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// A permutation of `0..n` with cycle type `mu` (cycles on consecutive points).
pub fn cycle_type_representative(mu: &[usize]) -> Vec<usize> {
    let n: usize = mu.iter().sum();
    let mut perm = vec![0; n];
    let mut start = 0;
    for &len in mu {
        for k in 0..len {
            perm[start + k] = start + (k + 1) % len;
        }
        start += len;
    }
    perm
}

/// Size of the centralizer of a permutation with cycle type `mu`:
/// `prod_k k^{m_k} m_k!`.
pub fn centralizer_size(mu: &[usize]) -> f64 {
    let mut counts: HashMap<usize, usize> = HashMap::new();
    for &k in mu {
        *counts.entry(k).or_default() += 1;
    }
    counts
        .iter()
        .map(|(&k, &m)| (k as f64).powi(m as i32) * (1..=m).map(|v| v as f64).product::<f64>())
        .product()
}

/// Irreducible character `chi^lambda` at cycle type `mu`, by the
/// Murnaghan-Nakayama rule on beta-sets.
pub fn character(lambda: &[usize], mu: &[usize]) -> i64 {
    let len = lambda.len();
    let beta: Vec<usize> = lambda.iter().enumerate().map(|(i, &l)| l + len - 1 - i).collect();
    let mut memo = HashMap::new();
    mn(&beta, mu, &mut memo)
}

fn mn(beta: &[usize], mu: &[usize], memo: &mut HashMap<(Vec<usize>, usize), i64>) -> i64 {
    let Some((&k, rest)) = mu.split_first() else {
        return 1;
    };
    let mut key_beta = beta.to_vec();
    key_beta.sort_unstable();
    let key = (key_beta, mu.len());
    if let Some(&v) = memo.get(&key) {
        return v;
    }
    let mut total = 0;
    for (idx, &b) in beta.iter().enumerate() {
        if b < k || beta.contains(&(b - k)) {
            continue;
        }
        // Each beta number jumped over flips the sign of the rim hook.
        let between = beta.iter().filter(|&&c| c > b - k && c < b).count();
        let sign = if between % 2 == 0 { 1 } else { -1 };
        let mut next = beta.to_vec();
        next[idx] = b - k;
        total += sign * mn(&next, rest, memo);
    }
    memo.insert(key, total);
    total
}

/// Dimension of the irreducible representation `lambda`.
pub fn irrep_dimension(lambda: &[usize]) -> usize {
    let n: usize = lambda.iter().sum();
    character(lambda, &vec![1; n]) as usize
}

/// Multiplicity of each irreducible representation in the permutation
/// representation of `S_n` on `N^n_r`, by the character inner product.
///
/// Returns `(partition, multiplicity)` for the non-zero multiplicities, in the
/// order of [`partitions`].
pub fn multiplicities_by_characters(n: usize, r: u32) -> Vec<(Vec<usize>, usize)> {
    let classes = partitions(n);
    let fixed: Vec<f64> = classes.iter().map(|mu| fixed_points(mu, r) as f64).collect();
    let z: Vec<f64> = classes.iter().map(|mu| centralizer_size(mu)).collect();
    classes
        .iter()
        .filter_map(|lambda| {
            let m: f64 = classes
                .iter()
                .enumerate()
                .map(|(c, mu)| character(lambda, mu) as f64 * fixed[c] / z[c])
                .sum();
            let m = m.round() as usize;
            (m > 0).then(|| (lambda.clone(), m))
        })
        .collect()
}

/// Number of `a in N^n_r` fixed by a permutation of cycle type `mu`: `a` must
/// be constant on cycles, so count `(c_1..c_k)` with `sum len_j c_j <= r`.
fn fixed_points(mu: &[usize], r: u32) -> u64 {
    let r = r as usize;
    // ways[t] = number of assignments with weighted sum exactly t.
    let mut ways = vec![0u64; r + 1];
    ways[0] = 1;
    for &len in mu {
        let mut next = vec![0u64; r + 1];
        for (t, &w) in ways.iter().enumerate() {
            if w == 0 {
                continue;
            }
            let mut u = t;
            while u <= r {
                next[u] += w;
                u += len;
            }
        }
        ways = next;
    }
    ways.iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partitions_of_four() {
        assert_eq!(
            partitions(4),
            vec![vec![4], vec![3, 1], vec![2, 2], vec![2, 1, 1], vec![1, 1, 1, 1]]
        );
        assert_eq!(partitions(5).len(), 7);
    }

    #[test]
    fn character_table_of_s3() {
        // Classes (1,1,1), (2,1), (3).
        let table = [
            (vec![3], [1, 1, 1]),
            (vec![2, 1], [2, 0, -1]),
            (vec![1, 1, 1], [1, -1, 1]),
        ];
        let classes = [vec![1, 1, 1], vec![2, 1], vec![3]];
        for (lambda, row) in table {
            for (mu, expect) in classes.iter().zip(row) {
                assert_eq!(character(&lambda, mu), expect, "{lambda:?} at {mu:?}");
            }
        }
    }

    #[test]
    fn dimensions_and_orthogonality() {
        let dims: Vec<usize> = partitions(5).iter().map(|l| irrep_dimension(l)).collect();
        assert_eq!(dims, vec![1, 4, 5, 6, 5, 4, 1]);
        let classes = partitions(5);
        for a in &classes {
            for b in &classes {
                let s: f64 = classes
                    .iter()
                    .map(|mu| (character(a, mu) * character(b, mu)) as f64 / centralizer_size(mu))
                    .sum();
                assert!((s - f64::from(a == b)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn cycle_representative() {
        assert_eq!(cycle_type_representative(&[3, 1]), vec![1, 2, 0, 3]);
    }

    #[test]
    fn multiplicities_match_small_case() {
        // N^2_2 splits into 4 symmetric and 2 antisymmetric directions.
        assert_eq!(
            multiplicities_by_characters(2, 2),
            vec![(vec![2], 4), (vec![1, 1], 2)]
        );
    }
}
