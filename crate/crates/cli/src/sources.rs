use std::fmt;

use anyhow::Result;
use mapgf::family::{Family, FamilySpec, Statistic};
use mapgf::maps::oracle_series;
use mapgf::pipeline::{family_counts, m1_gons_from_m4, m4_two_faces, to_series};
use mapgf::series::{MultiSeries, Rational};
use mapgf::tutte::{restrict_bipartite, solve_m1};
use num_traits::One;

/// A request beyond what the library can compute; exit status 3.
#[derive(Debug)]
pub struct Capability(pub String);

impl fmt::Display for Capability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Capability {}

pub fn capability<T>(msg: impl Into<String>) -> Result<T> {
    Err(Capability(msg.into()).into())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Source {
    /// Oracle up to its size cap, otherwise the DP or an extraction.
    Auto,
    Oracle,
    Dp,
    Extract,
}

impl Source {
    pub fn name(self) -> &'static str {
        match self {
            Source::Auto => "auto",
            Source::Oracle => "oracle",
            Source::Dp => "dp",
            Source::Extract => "extract",
        }
    }
}

/// The family's series with the requested markers, and the source used.
pub fn family_series(
    family: Family,
    stats: &[Statistic],
    order: usize,
    source: Source,
    oracle_cap: usize,
) -> Result<(MultiSeries, Source)> {
    let spec = FamilySpec::new(family, stats.to_vec());
    let chosen = match source {
        Source::Auto if stats.is_empty() && dp_supports(family, stats) => Source::Dp,
        Source::Auto if stats.is_empty() => Source::Extract,
        Source::Auto if order <= oracle_cap => Source::Oracle,
        Source::Auto if dp_supports(family, stats) => Source::Dp,
        Source::Auto => Source::Extract,
        s => s,
    };
    let series = match chosen {
        Source::Oracle => {
            if order > oracle_cap {
                return capability(format!("map-oracle: order {order} exceeds the enumeration cap {oracle_cap}"));
            }
            oracle_series(&spec, order, oracle_cap)?
        }
        Source::Dp => dp_series(family, stats, order)?,
        Source::Extract => extracted_series(family, stats, order)?,
        Source::Auto => unreachable!(),
    };
    Ok((series, chosen))
}

fn dp_supports(family: Family, stats: &[Statistic]) -> bool {
    matches!(family, Family::M1 | Family::B1)
        && stats.iter().all(|s| matches!(s, Statistic::RootDegree | Statistic::Faces(_)))
}

fn dp_series(family: Family, stats: &[Statistic], order: usize) -> Result<MultiSeries> {
    if !dp_supports(family, stats) {
        return capability(format!(
            "tutte-dp: only M1 and B1 with root degree and face markers, not {}",
            FamilySpec::new(family, stats.to_vec()).markers(order)?.names().join(",")
        ));
    }
    if stats.is_empty() {
        return Ok(to_series(&family_counts(family, order)?)?);
    }
    let max_degree = stats.iter().filter_map(|s| if let Statistic::Faces(l) = s { Some(*l) } else { None }).max();
    // the bipartite restriction needs every degree tracked
    let max_degree = if family == Family::B1 { 2 * order } else { max_degree.unwrap_or(0) };
    let mut f = solve_m1(order, max_degree)?;
    if family == Family::B1 {
        f = restrict_bipartite(&f)?;
    }
    let keep: Vec<String> = stats.iter().map(|s| s.marker_name()).collect();
    for name in f.markers().names().into_iter().map(String::from).collect::<Vec<_>>() {
        if !keep.contains(&name) {
            f = f.specialize(&name, &Rational::one())?;
        }
    }
    // marker order as requested
    Ok(f.embed(&FamilySpec::new(family, stats.to_vec()).markers(order)?)?)
}

fn extracted_series(family: Family, stats: &[Statistic], order: usize) -> Result<MultiSeries> {
    let cap = order as u32;
    let centered = match (family, stats) {
        (_, []) => return Ok(to_series(&family_counts(family, order)?)?),
        (Family::M4, [Statistic::Faces(2)]) => m4_two_faces(cap, order)?,
        (Family::M1, [Statistic::Gons(2)]) => m1_gons_from_m4(&m4_two_faces(cap, order)?, cap, order)?,
        _ => {
            return capability(
                "scheme-engine: extraction beyond the oracle covers plain series, M4 with x2 and M1 with xh2",
            )
        }
    };
    let name = stats[0].marker_name();
    let raw = FamilySpec::new(family, stats.to_vec()).markers(order)?;
    Ok(centered.recenter(&name, false)?.embed(&raw)?)
}

