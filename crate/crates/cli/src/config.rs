//! Optional JSON sidecar. Flags override its values, which override defaults.

use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Deserialize;

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    pub n: Option<usize>,
    #[serde(deserialize_with = "degrees")]
    pub r: Option<String>,
    #[serde(deserialize_with = "degrees")]
    pub rprime: Option<String>,
    pub symmetry: Option<String>,
    pub grid: Option<usize>,
    pub func: Option<String>,
    pub kernel: Option<String>,
    pub format: Option<String>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub tol_gap: Option<f64>,
    pub tol_feas: Option<f64>,
    pub max_iters: Option<usize>,
    pub step_fraction: Option<f64>,
}

/// Degrees may be written as a number (`4`) or a string (`"1..10"`).
fn degrees<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Option<String>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Spec {
        Number(u32),
        Text(String),
    }
    Ok(Option::<Spec>::deserialize(d)?.map(|s| match s {
        Spec::Number(v) => v.to_string(),
        Spec::Text(t) => t,
    }))
}

impl FileConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}

/// Inclusive list of degrees: `4`, `1..10` or `2,4,8`.
pub fn parse_degrees(s: &str) -> Result<Vec<u32>, String> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once("..") {
        let b = b.strip_prefix('=').unwrap_or(b);
        let (a, b): (u32, u32) = (
            a.trim().parse().map_err(|_| format!("bad range start in '{s}'"))?,
            b.trim().parse().map_err(|_| format!("bad range end in '{s}'"))?,
        );
        if a > b {
            return Err(format!("empty range '{s}'"));
        }
        return Ok((a..=b).collect());
    }
    s.split(',')
        .map(|t| t.trim().parse().map_err(|_| format!("bad degree '{t}'")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_lists() {
        assert_eq!(parse_degrees("4").unwrap(), vec![4]);
        assert_eq!(parse_degrees("1..3").unwrap(), vec![1, 2, 3]);
        assert_eq!(parse_degrees("1..=2").unwrap(), vec![1, 2]);
        assert_eq!(parse_degrees("2, 5").unwrap(), vec![2, 5]);
        assert!(parse_degrees("5..1").is_err());
        assert!(parse_degrees("x").is_err());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(serde_json::from_str::<FileConfig>(r#"{"n": 2, "bogus": 1}"#).is_err());
        let c: FileConfig = serde_json::from_str(r#"{"n": 2, "r": 4, "rprime": "4..8", "tol-gap": 1e-7}"#).unwrap();
        assert_eq!((c.n, c.tol_gap), (Some(2), Some(1e-7)));
        assert_eq!((c.r.as_deref(), c.rprime.as_deref()), (Some("4"), Some("4..8")));
    }
}
