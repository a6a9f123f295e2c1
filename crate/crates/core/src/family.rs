//! The ten map families and the statistics that can be marked on them.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::maps::Flags;
use crate::series::{Marker, MarkerSet, SeriesError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Family {
    M1,
    M2l,
    M2b,
    M3,
    M4,
    M5,
    B1,
    B2,
    B3,
    B4,
    B5,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FamilyError {
    #[error("unknown family `{0}`")]
    UnknownFamily(String),
    #[error("cannot parse statistic `{0}`")]
    BadStatistic(String),
}

impl Family {
    pub const ALL: [Family; 11] = [
        Family::M1,
        Family::M2l,
        Family::M2b,
        Family::M3,
        Family::M4,
        Family::M5,
        Family::B1,
        Family::B2,
        Family::B3,
        Family::B4,
        Family::B5,
    ];

    pub fn contains(self, f: &Flags) -> bool {
        let base = match self {
            Family::M1 | Family::B1 => true,
            Family::M2l => f.loopless,
            Family::M2b | Family::B3 => f.bridgeless,
            Family::M3 | Family::B2 => f.simple,
            Family::M4 | Family::B4 => f.two_connected,
            Family::M5 | Family::B5 => f.two_connected && f.simple,
        };
        base && (!self.is_bipartite() || f.bipartite)
    }

    pub fn is_bipartite(self) -> bool {
        matches!(self, Family::B1 | Family::B2 | Family::B3 | Family::B4 | Family::B5)
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::M1 => "M1",
            Family::M2l => "M2l",
            Family::M2b => "M2b",
            Family::M3 => "M3",
            Family::M4 => "M4",
            Family::M5 => "M5",
            Family::B1 => "B1",
            Family::B2 => "B2",
            Family::B3 => "B3",
            Family::B4 => "B4",
            Family::B5 => "B5",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = FamilyError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Family::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| FamilyError::UnknownFamily(s.to_string()))
    }
}

/// A quantity marked by one series variable.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Statistic {
    /// Degree of the root face (catalytic variable `t`).
    RootDegree,
    /// Non-root faces of degree `l` (`x{l}`).
    Faces(usize),
    /// Non-root pure `l`-gons (`xh{l}`).
    Gons(usize),
    /// All faces of degree `l`, root face included (`xr{l}`).
    FacesRoot(usize),
    /// All pure `l`-gons, root face included (`xhr{l}`).
    GonsRoot(usize),
    /// Occurrences of a library pattern whose interior avoids the root face.
    Pattern(String),
    /// Pattern occurrences with the root face allowed inside.
    PatternRoot(String),
}

impl Statistic {
    pub fn marker_name(&self) -> String {
        match self {
            Statistic::RootDegree => "t".into(),
            Statistic::Faces(l) => format!("x{l}"),
            Statistic::Gons(l) => format!("xh{l}"),
            Statistic::FacesRoot(l) => format!("xr{l}"),
            Statistic::GonsRoot(l) => format!("xhr{l}"),
            Statistic::Pattern(p) => format!("xp:{p}"),
            Statistic::PatternRoot(p) => format!("xpr:{p}"),
        }
    }

    /// Inverse of [`Statistic::marker_name`].
    pub fn from_marker_name(s: &str) -> Result<Self, FamilyError> {
        let bad = || FamilyError::BadStatistic(s.to_string());
        if s == "t" {
            return Ok(Statistic::RootDegree);
        }
        if let Some(p) = s.strip_prefix("xpr:") {
            return Ok(Statistic::PatternRoot(p.to_string()));
        }
        if let Some(p) = s.strip_prefix("xp:") {
            return Ok(Statistic::Pattern(p.to_string()));
        }
        let num = |rest: &str| rest.parse::<usize>().ok().filter(|&l| l >= 1).ok_or_else(bad);
        if let Some(r) = s.strip_prefix("xhr") {
            return Ok(Statistic::GonsRoot(num(r)?));
        }
        if let Some(r) = s.strip_prefix("xh") {
            return Ok(Statistic::Gons(num(r)?));
        }
        if let Some(r) = s.strip_prefix("xr") {
            return Ok(Statistic::FacesRoot(num(r)?));
        }
        if let Some(r) = s.strip_prefix('x') {
            return Ok(Statistic::Faces(num(r)?));
        }
        Err(bad())
    }
}

/// A family with an ordered list of marked statistics.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub family: Family,
    pub stats: Vec<Statistic>,
}

impl FamilySpec {
    pub fn new(family: Family, stats: Vec<Statistic>) -> Self {
        FamilySpec { family, stats }
    }

    pub fn plain(family: Family) -> Self {
        FamilySpec { family, stats: Vec::new() }
    }

    /// Raw markers with bounds large enough for maps of size `n_max`
    /// (at most `2 n_max` faces or corners of anything).
    pub fn markers(&self, n_max: usize) -> Result<MarkerSet, SeriesError> {
        let bound = (2 * n_max + 2) as u32;
        MarkerSet::new(self.stats.iter().map(|s| Marker::raw(s.marker_name(), bound)).collect())
    }
}
