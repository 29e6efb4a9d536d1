//! Published reference values used by the acceptance suite.
//!
//! The data ship as `fixtures/reference.json` and are embedded at compile time.
//! A different file can be loaded to run the suite against edited fixtures.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::Result;

/// Block orders of the reduced program and the unreduced order `s(n, r)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockRow {
    pub n: usize,
    pub r: u32,
    pub blocks: Vec<usize>,
    pub s: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SigmaRow {
    pub n: usize,
    pub r: u32,
    pub sigma2: f64,
}

/// Resolution of a product of `n` univariate kernels of total degree `degree`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductRow {
    pub n: usize,
    pub degree: u32,
    pub sigma2: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecoupledRow {
    pub n: usize,
    pub r: u32,
    pub r_prime: u32,
    pub sigma2: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproxRow {
    pub func: String,
    pub r: u32,
    /// `sdp` or `product`.
    pub kernel: String,
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Reference {
    #[serde(default)]
    pub table1: Vec<BlockRow>,
    #[serde(default)]
    pub table2_sdp: Vec<SigmaRow>,
    #[serde(default)]
    pub table2_kpm: Vec<ProductRow>,
    #[serde(default)]
    pub decoupled: Vec<DecoupledRow>,
    /// Plotted `sigma^2_r` curves; more digits than the table for some rows.
    #[serde(default)]
    pub sigma_curves: Vec<SigmaRow>,
    #[serde(default)]
    pub approx_errors: Vec<ApproxRow>,
}

const EMBEDDED: &str = include_str!("../fixtures/reference.json");

impl Reference {
    pub fn embedded() -> Self {
        Self::from_json(EMBEDDED).expect("embedded reference fixture is valid")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn table1_row(&self, n: usize, r: u32) -> Option<&BlockRow> {
        self.table1.iter().find(|b| b.n == n && b.r == r)
    }

    pub fn table2(&self, n: usize, r: u32) -> Option<f64> {
        self.table2_sdp.iter().find(|s| s.n == n && s.r == r).map(|s| s.sigma2)
    }

    pub fn product(&self, n: usize, degree: u32) -> Option<f64> {
        self.table2_kpm
            .iter()
            .find(|s| s.n == n && s.degree == degree)
            .map(|s| s.sigma2)
    }

    pub fn decoupled(&self, n: usize, r: u32, r_prime: u32) -> Option<f64> {
        self.decoupled
            .iter()
            .find(|d| d.n == n && d.r == r && d.r_prime == r_prime)
            .map(|d| d.sigma2)
    }

    pub fn sigma_curve(&self, n: usize, r: u32) -> Option<f64> {
        self.sigma_curves.iter().find(|s| s.n == n && s.r == r).map(|s| s.sigma2)
    }

    pub fn approx_error(&self, func: &str, r: u32, kernel: &str) -> Option<f64> {
        self.approx_errors
            .iter()
            .find(|a| a.func == func && a.r == r && a.kernel == kernel)
            .map(|a| a.error)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_fixture_loads() {
        let r = Reference::embedded();
        assert_eq!(r.table1_row(5, 5).unwrap().blocks, vec![19, 25, 14, 8, 3]);
        assert_eq!(r.table2(2, 10), Some(0.1655));
        assert_eq!(r.product(4, 8), Some(1.1716));
        assert_eq!(r.decoupled(3, 10, 18), Some(0.3089));
        assert_eq!(r.approx_error("peaks", 10, "product"), Some(11.6499));
        assert_eq!(r.sigma_curve(1, 7), Some(0.0603));
    }

    #[test]
    fn table1_rows_are_consistent() {
        // 40 rows, each with s(n, r) = C(n + r, r).
        let r = Reference::embedded();
        assert_eq!(r.table1.len(), 40);
        for row in &r.table1 {
            let s = (1..=row.n).fold(1usize, |acc, i| acc * (row.r as usize + i) / i);
            assert_eq!(row.s, s, "{row:?}");
        }
    }

    #[test]
    fn missing_sections_default_to_empty() {
        let r = Reference::from_json("{}").unwrap();
        assert!(r.table1.is_empty() && r.table1_row(2, 1).is_none());
    }
}
