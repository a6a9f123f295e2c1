use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

use crate::family::{Family, FamilySpec, Statistic};
use crate::series::{int, Mono, MultiSeries};

use super::pattern::find_pattern;
use super::{classify, for_each_map, stats, CombMap, MapError, MapStats, PatternSpec};

/// Exponent of the marker of `s` for a map with statistics `st`.
pub fn statistic_value(st: &MapStats, s: &Statistic) -> usize {
    match s {
        Statistic::RootDegree => st.root_degree(),
        Statistic::Faces(l) => st.faces(*l, false),
        Statistic::Gons(l) => st.pure_gons(*l, false),
        Statistic::FacesRoot(l) => st.faces(*l, true),
        Statistic::GonsRoot(l) => st.pure_gons(*l, true),
        Statistic::Pattern(p) => st.pattern(p),
        Statistic::PatternRoot(p) => st.pattern(p) + st.root_touching.get(p).copied().unwrap_or(0),
    }
}

fn patterns_of(specs: &[&FamilySpec]) -> Result<Vec<PatternSpec>, MapError> {
    let mut names: Vec<&str> = specs
        .iter()
        .flat_map(|s| s.stats.iter())
        .filter_map(|s| match s {
            Statistic::Pattern(p) | Statistic::PatternRoot(p) => Some(p.as_str()),
            _ => None,
        })
        .collect();
    names.sort_unstable();
    names.dedup();
    names.into_iter().map(find_pattern).collect()
}

/// Exact counting series of several families at once, from one enumeration
/// pass per size. Sizes `1..=n_max`; no constant term.
pub fn oracle_series_all(specs: &[FamilySpec], n_max: usize, limit: usize) -> Result<Vec<MultiSeries>, MapError> {
    let refs: Vec<&FamilySpec> = specs.iter().collect();
    let patterns = patterns_of(&refs)?;
    let mut tallies: Vec<BTreeMap<(usize, Mono), u64>> = vec![BTreeMap::new(); specs.len()];
    for n in 1..=n_max {
        let local: Mutex<Vec<HashMap<Mono, u64>>> = Mutex::new(vec![HashMap::new(); specs.len()]);
        for_each_map(n, limit, |m: &CombMap| {
            let flags = classify(m);
            let members: Vec<usize> = (0..specs.len()).filter(|&i| specs[i].family.contains(&flags)).collect();
            if members.is_empty() {
                return;
            }
            let st = stats(m, &patterns);
            let monos: Vec<Mono> =
                members.iter().map(|&i| specs[i].stats.iter().map(|s| statistic_value(&st, s) as u32).collect()).collect();
            let mut guard = local.lock().unwrap();
            for (&i, mono) in members.iter().zip(monos) {
                *guard[i].entry(mono).or_default() += 1;
            }
        })?;
        for (i, counts) in local.into_inner().unwrap().into_iter().enumerate() {
            for (mono, c) in counts {
                tallies[i].insert((n, mono), c);
            }
        }
    }
    specs
        .iter()
        .zip(tallies)
        .map(|(spec, tally)| {
            let markers = spec.markers(n_max)?;
            let terms = tally.into_iter().map(|((n, mono), c)| (n, mono, int(c as i64)));
            Ok(MultiSeries::from_terms(&markers, n_max, terms)?)
        })
        .collect()
}

pub fn oracle_series(spec: &FamilySpec, n_max: usize, limit: usize) -> Result<MultiSeries, MapError> {
    Ok(oracle_series_all(std::slice::from_ref(spec), n_max, limit)?.remove(0))
}

/// Plain counts of all eleven families for sizes `1..=n_max`.
pub fn family_counts(n_max: usize, limit: usize) -> Result<BTreeMap<Family, Vec<u64>>, MapError> {
    let specs: Vec<FamilySpec> = Family::ALL.iter().map(|&f| FamilySpec::plain(f)).collect();
    let series = oracle_series_all(&specs, n_max, limit)?;
    Ok(Family::ALL
        .iter()
        .zip(series)
        .map(|(&f, s)| {
            let counts = (1..=n_max).map(|n| s.degree_sum(n).to_integer().try_into().unwrap_or(u64::MAX)).collect();
            (f, counts)
        })
        .collect())
}
