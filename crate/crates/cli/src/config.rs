use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use mapgf::series::Rational;
use serde::Deserialize;

/// Settings that may come from a TOML file; command-line flags win.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub family: Option<String>,
    pub order: Option<usize>,
    #[serde(default)]
    pub stats: Vec<String>,
    pub step: Option<String>,
    pub format: Option<String>,
    pub out: Option<PathBuf>,
    pub oracle_cap: Option<usize>,
    pub max_spread: Option<f64>,
    pub golden: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

pub fn parse_format(s: &str) -> Result<Format> {
    Ok(match s {
        "json" => Format::Json,
        "csv" => Format::Csv,
        "text" => Format::Text,
        _ => bail!("unknown format {s:?} (json, csv or text)"),
    })
}

/// Marker sample step `h`, as `p/q` or an integer; must lie in (0, 1/4].
pub fn parse_step(s: &str) -> Result<Rational> {
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim().parse::<i64>()?, q.trim().parse::<i64>()?),
        None => (s.trim().parse::<i64>()?, 1),
    };
    if q <= 0 || p <= 0 || 4 * p > q {
        bail!("step {s} must lie in (0, 1/4]");
    }
    Ok(Rational::new(p.into(), q.into()))
}
