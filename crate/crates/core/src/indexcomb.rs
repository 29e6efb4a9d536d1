//! Multi-index sets, sign flips, subset families and permutation orbits.
//!
//! Every matrix and coefficient vector in the crate is indexed by the set
//! `N^n_r = { a in N^n : a_1 + ... + a_n <= r }` in one canonical order:
//! ascending total degree, and within a degree descending lexicographic order
//! (so `(1,0)` precedes `(0,1)`).

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::{Error, Result};

/// Default refusal threshold for `s(n, r)`.
pub const DEFAULT_SIZE_CAP: usize = 5000;

/// An exponent vector in `N^n` with its cached total degree.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    entries: Vec<u32>,
    degree: u32,
}

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        let degree = entries.iter().sum();
        Self { entries, degree }
    }

    pub fn zero(n: usize) -> Self {
        Self::new(vec![0; n])
    }

    /// The unit vector `e_i` (0-based `i`).
    pub fn unit(n: usize, i: usize) -> Self {
        let mut entries = vec![0; n];
        entries[i] = 1;
        Self::new(entries)
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.degree == 0
    }

    /// Number of non-zero entries.
    pub fn hamming(&self) -> u32 {
        self.entries.iter().filter(|&&e| e != 0).count() as u32
    }

    /// The orbit representative: entries sorted ascending.
    pub fn sorted(&self) -> MultiIndex {
        let mut entries = self.entries.clone();
        entries.sort_unstable();
        MultiIndex {
            entries,
            degree: self.degree,
        }
    }

    pub fn is_sorted(&self) -> bool {
        self.entries.windows(2).all(|w| w[0] <= w[1])
    }

    pub fn to_signed(&self) -> SignedIndex {
        SignedIndex(self.entries.iter().map(|&e| e as i32).collect())
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree
            .cmp(&other.degree)
            .then_with(|| other.entries.cmp(&self.entries))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// An integer vector that may have negative entries, e.g. a difference `a - b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignedIndex(pub Vec<i32>);

impl SignedIndex {
    pub fn difference(a: &MultiIndex, b: &MultiIndex) -> Self {
        SignedIndex(
            a.entries
                .iter()
                .zip(&b.entries)
                .map(|(&x, &y)| x as i32 - y as i32)
                .collect(),
        )
    }

    pub fn entries(&self) -> &[i32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn l1_norm(&self) -> u32 {
        self.0.iter().map(|e| e.unsigned_abs()).sum()
    }

    pub fn neg(&self) -> SignedIndex {
        SignedIndex(self.0.iter().map(|e| -e).collect())
    }

    /// Entrywise absolute value.
    pub fn abs(&self) -> MultiIndex {
        MultiIndex::new(self.0.iter().map(|e| e.unsigned_abs()).collect())
    }

    /// Canonical representative of `{d, -d}`: the first non-zero entry is positive.
    pub fn sign_class(&self) -> SignedIndex {
        match self.0.iter().find(|&&e| e != 0) {
            Some(&e) if e < 0 => self.neg(),
            _ => self.clone(),
        }
    }

    /// Canonical representative of the orbit of `d` under coordinate
    /// permutations and global negation.
    pub fn perm_sign_class(&self) -> SignedIndex {
        let mut a = self.0.clone();
        a.sort_unstable();
        let mut b: Vec<i32> = self.0.iter().map(|e| -e).collect();
        b.sort_unstable();
        SignedIndex(a.min(b))
    }

    /// Whether `d = a - b` for some `a, b` of total degree at most `r_gram`.
    pub fn is_realizable(&self, r_gram: u32) -> bool {
        let pos: u32 = self.0.iter().filter(|&&e| e > 0).map(|&e| e as u32).sum();
        let neg: u32 = self.0.iter().filter(|&&e| e < 0).map(|&e| (-e) as u32).sum();
        pos <= r_gram && neg <= r_gram
    }
}

impl fmt::Display for SignedIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// Checked binomial coefficient.
pub fn binomial(n: usize, k: usize) -> Option<usize> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > usize::MAX as u128 {
            return None;
        }
    }
    Some(acc as usize)
}

/// `s(n, r) = C(n + r, r)`, the size of `N^n_r`.
pub fn index_set_size(n: usize, r: usize) -> Option<usize> {
    binomial(n.checked_add(r)?, r)
}

/// `N^n_r` in canonical order together with a position lookup.
#[derive(Clone, Debug)]
pub struct IndexSet {
    n: usize,
    r: u32,
    indices: Vec<MultiIndex>,
    position: HashMap<Vec<u32>, usize>,
}

impl IndexSet {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn get(&self, i: usize) -> &MultiIndex {
        &self.indices[i]
    }

    pub fn position(&self, entries: &[u32]) -> Option<usize> {
        self.position.get(entries).copied()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, MultiIndex> {
        self.indices.iter()
    }
}

/// `N^n_r` in canonical order, refusing sets larger than [`DEFAULT_SIZE_CAP`].
pub fn build_index_set(n: usize, r: u32) -> Result<IndexSet> {
    build_index_set_capped(n, r, DEFAULT_SIZE_CAP)
}

pub fn build_index_set_capped(n: usize, r: u32, cap: usize) -> Result<IndexSet> {
    if n == 0 {
        return Err(Error::Parameter("dimension n must be at least 1".into()));
    }
    let size = index_set_size(n, r as usize).unwrap_or(usize::MAX);
    if size > cap {
        return Err(Error::TooLarge { size, cap });
    }
    let mut indices = Vec::with_capacity(size);
    let mut buf = vec![0u32; n];
    for d in 0..=r {
        compositions(d, 0, &mut buf, &mut indices);
    }
    debug_assert_eq!(indices.len(), size);
    let position = indices
        .iter()
        .enumerate()
        .map(|(i, a)| (a.entries.clone(), i))
        .collect();
    Ok(IndexSet {
        n,
        r,
        indices,
        position,
    })
}

// All compositions of `remaining` into buf[pos..], leading entry descending.
fn compositions(remaining: u32, pos: usize, buf: &mut [u32], out: &mut Vec<MultiIndex>) {
    if pos + 1 == buf.len() {
        buf[pos] = remaining;
        out.push(MultiIndex::new(buf.to_vec()));
        return;
    }
    for first in (0..=remaining).rev() {
        buf[pos] = first;
        compositions(remaining - first, pos + 1, buf, out);
    }
}

/// A subset of the coordinates `{0, .., n-1}` stored as a bit mask.
///
/// Displayed 1-based, e.g. `{2,3}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Subset(pub u64);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    /// Build from 0-based coordinates.
    pub fn from_coords(coords: &[usize]) -> Self {
        Subset(coords.iter().fold(0, |m, &i| m | (1 << i)))
    }

    pub fn full(n: usize) -> Self {
        Subset((1u64 << n) - 1)
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn complement(self, n: usize) -> Self {
        Subset(!self.0 & Subset::full(n).0)
    }

    pub fn coords(self) -> impl Iterator<Item = usize> {
        (0..64).filter(move |&i| self.contains(i))
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.coords().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", i + 1)?;
        }
        write!(f, "}}")
    }
}

/// `omega_I(gamma)`: negate the entries of `gamma` indexed by `subset`.
pub fn omega(subset: Subset, gamma: &SignedIndex) -> SignedIndex {
    SignedIndex(
        gamma
            .0
            .iter()
            .enumerate()
            .map(|(i, &e)| if subset.contains(i) { -e } else { e })
            .collect(),
    )
}

/// Subsets of `[n]` containing exactly one of each complementary pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetFamily {
    n: usize,
    subsets: Vec<Subset>,
}

impl SubsetFamily {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn subsets(&self) -> &[Subset] {
        &self.subsets
    }

    pub fn len(&self) -> usize {
        self.subsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsets.is_empty()
    }
}

/// The canonical family: every subset not containing the first coordinate,
/// ordered by bit mask.
pub fn build_subset_family(n: usize) -> Result<SubsetFamily> {
    if n == 0 || n > 32 {
        return Err(Error::Parameter(format!("subset family needs 1 <= n <= 32, got {n}")));
    }
    let subsets = (0..1u64 << (n - 1)).map(|k| Subset(k << 1)).collect();
    Ok(SubsetFamily { n, subsets })
}

/// Representatives of the differences that must vanish from the Gram expansion.
///
/// Returns every non-negative `g = |a - b|` with `a, b in N^n_{r_gram}` and
/// `|g|_1 > r`, one per class under sign flips, in canonical order.
pub fn build_gamma_set(n: usize, r: u32, r_gram: u32) -> Result<Vec<MultiIndex>> {
    if r_gram < r {
        return Err(Error::Parameter(format!(
            "Gram degree {r_gram} must be at least the kernel degree {r}"
        )));
    }
    // |g|_1 <= 2 r_gram for any realizable difference.
    let candidates = build_index_set_capped(n, 2 * r_gram, usize::MAX)?;
    let mut out = Vec::new();
    for g in candidates.iter().filter(|g| g.degree() > r) {
        let support: Vec<usize> = (0..n).filter(|&i| g.entries[i] != 0).collect();
        let realizable = (0u64..1 << support.len()).any(|mask| {
            let flips: Vec<usize> = support
                .iter()
                .enumerate()
                .filter(|(k, _)| mask >> k & 1 == 1)
                .map(|(_, &i)| i)
                .collect();
            omega(Subset::from_coords(&flips), &g.to_signed()).is_realizable(r_gram)
        });
        if realizable {
            out.push(g.clone());
        }
    }
    Ok(out)
}

/// Partition of `N^n_r` into orbits under coordinate permutations.
#[derive(Clone, Debug)]
pub struct OrbitTable {
    n: usize,
    r: u32,
    orbits: BTreeMap<MultiIndex, Vec<MultiIndex>>,
}

impl OrbitTable {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    /// Sorted representatives in canonical order.
    pub fn representatives(&self) -> impl Iterator<Item = &MultiIndex> {
        self.orbits.keys()
    }

    pub fn members(&self, rep: &MultiIndex) -> Option<&[MultiIndex]> {
        self.orbits.get(rep).map(Vec::as_slice)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, &[MultiIndex])> {
        self.orbits.iter().map(|(k, v)| (k, v.as_slice()))
    }

    pub fn len(&self) -> usize {
        self.orbits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orbits.is_empty()
    }
}

pub fn build_orbits(n: usize, r: u32) -> Result<OrbitTable> {
    let set = build_index_set(n, r)?;
    Ok(orbits_of(&set))
}

pub fn orbits_of(set: &IndexSet) -> OrbitTable {
    let mut orbits: BTreeMap<MultiIndex, Vec<MultiIndex>> = BTreeMap::new();
    for a in set.iter() {
        orbits.entry(a.sorted()).or_default().push(a.clone());
    }
    OrbitTable {
        n: set.n(),
        r: set.r(),
        orbits,
    }
}

/// `n! / prod(multiplicity!)` for the repeated values of `alpha`.
pub fn orbit_size(alpha: &MultiIndex) -> usize {
    let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
    for &e in alpha.entries() {
        *counts.entry(e).or_default() += 1;
    }
    let mut size: u128 = (1..=alpha.len() as u128).product();
    for &c in counts.values() {
        size /= (1..=c as u128).product::<u128>();
    }
    size as usize
}

/// All distinct sign-flip images `omega_I(g)` for `I` in the family, as sign classes.
pub fn sign_patterns(family: &SubsetFamily, gamma: &SignedIndex) -> BTreeSet<SignedIndex> {
    family
        .subsets()
        .iter()
        .map(|&i| omega(i, gamma).sign_class())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(e: &[u32]) -> MultiIndex {
        MultiIndex::new(e.to_vec())
    }

    #[test]
    fn index_set_examples() {
        let s = build_index_set(1, 2).unwrap();
        let e: Vec<_> = s.iter().map(|a| a.entries().to_vec()).collect();
        assert_eq!(e, vec![vec![0], vec![1], vec![2]]);
        assert_eq!(build_index_set(2, 2).unwrap().len(), 6);
        assert_eq!(build_index_set(5, 10).unwrap().len(), 3003);
    }

    #[test]
    fn canonical_order_n2() {
        let s = build_index_set(2, 2).unwrap();
        let e: Vec<_> = s.iter().map(|a| a.entries().to_vec()).collect();
        assert_eq!(
            e,
            vec![
                vec![0, 0],
                vec![1, 0],
                vec![0, 1],
                vec![2, 0],
                vec![1, 1],
                vec![0, 2]
            ]
        );
        assert!(s.indices().windows(2).all(|w| w[0] < w[1]));
        assert_eq!(s.position(&[1, 1]), Some(4));
    }

    #[test]
    fn size_cap_refuses() {
        assert_eq!(build_index_set(5, 11).unwrap().len(), 4368);
        match build_index_set(5, 12) {
            Err(Error::TooLarge { size, cap }) => {
                assert_eq!(size, 6188);
                assert_eq!(cap, DEFAULT_SIZE_CAP);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(build_index_set(6, 12), Err(Error::TooLarge { .. })));
        assert!(build_index_set_capped(5, 12, 10_000).is_ok());
        assert!(build_index_set(0, 3).is_err());
    }

    #[test]
    fn omega_examples() {
        let g = SignedIndex(vec![1, -2]);
        assert_eq!(omega(Subset::EMPTY, &g), g);
        assert_eq!(omega(Subset::from_coords(&[0]), &g), SignedIndex(vec![-1, -2]));
        assert_eq!(omega(Subset::full(2), &g), g.neg());
    }

    #[test]
    fn subset_family_examples() {
        let f1 = build_subset_family(1).unwrap();
        assert_eq!(f1.subsets(), &[Subset::EMPTY]);
        let f2 = build_subset_family(2).unwrap();
        assert_eq!(f2.subsets(), &[Subset::EMPTY, Subset::from_coords(&[1])]);
        let f3 = build_subset_family(3).unwrap();
        let shown: Vec<String> = f3.subsets().iter().map(|s| s.to_string()).collect();
        assert_eq!(shown, vec!["{}", "{2}", "{3}", "{2,3}"]);
    }

    #[test]
    fn subset_family_covers_power_set() {
        for n in 1..=6 {
            let f = build_subset_family(n).unwrap();
            assert_eq!(f.len(), 1 << (n - 1));
            let mut all = BTreeSet::new();
            for &s in f.subsets() {
                assert!(!f.subsets().contains(&s.complement(n)));
                all.insert(s);
                all.insert(s.complement(n));
            }
            assert_eq!(all.len(), 1 << n);
        }
    }

    #[test]
    fn gamma_set_univariate_is_empty() {
        for r in 0..8 {
            assert!(build_gamma_set(1, r, r).unwrap().is_empty());
        }
    }

    #[test]
    fn gamma_set_small() {
        assert_eq!(build_gamma_set(2, 1, 1).unwrap(), vec![mi(&[1, 1])]);
        assert_eq!(
            build_gamma_set(2, 2, 2).unwrap(),
            vec![mi(&[2, 1]), mi(&[1, 2]), mi(&[2, 2])]
        );
        assert!(build_gamma_set(2, 3, 2).is_err());
    }

    #[test]
    fn orbit_examples() {
        assert_eq!(build_orbits(2, 1).unwrap().len(), 2);
        let o = build_orbits(2, 2).unwrap();
        let reps: Vec<_> = o.representatives().cloned().collect();
        assert_eq!(reps, vec![mi(&[0, 0]), mi(&[0, 1]), mi(&[1, 1]), mi(&[0, 2])]);
        assert_eq!(orbit_size(&mi(&[0, 1, 1])), 3);
        let o3 = build_orbits(3, 2).unwrap();
        assert_eq!(o3.members(&mi(&[0, 1, 1])).unwrap().len(), 3);
    }

    #[test]
    fn sign_classes() {
        assert_eq!(SignedIndex(vec![0, -1, 2]).sign_class(), SignedIndex(vec![0, 1, -2]));
        assert_eq!(
            SignedIndex(vec![2, -1]).perm_sign_class(),
            SignedIndex(vec![-2, 1]).perm_sign_class()
        );
        assert!(SignedIndex(vec![2, -2]).is_realizable(2));
        assert!(!SignedIndex(vec![2, 2]).is_realizable(2));
    }
}
