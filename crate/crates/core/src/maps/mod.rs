//! Rooted planar maps as rotation systems, with exhaustive generation and the
//! statistics the counting series are built from.

mod classify;
mod enumerate;
mod oracle;
mod pattern;
mod stats;

pub use classify::{classify, Flags};
pub use enumerate::{enumerate_maps, for_each_map, DEFAULT_LIMIT, HARD_LIMIT};
pub use oracle::{family_counts, oracle_series, oracle_series_all, statistic_value};
pub use pattern::{find_pattern, pattern_library, PatternSpec};
pub use stats::{exterior_edge_check, stats, MapStats};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MapError {
    #[error("map size {n} exceeds the enumeration limit {limit}")]
    SizeLimit { n: usize, limit: usize },
    #[error("the vertex map (size 0) is not enumerated")]
    EmptyMap,
    #[error("unknown pattern `{0}`")]
    UnknownPattern(String),
    #[error("invalid rotation system: {0}")]
    Invalid(String),
    #[error(transparent)]
    Series(#[from] crate::series::SeriesError),
}

/// A rooted map on `2n` half-edges.
///
/// `sigma` rotates counterclockwise around vertices, `alpha` pairs half-edges
/// into edges. Faces are the cycles of `sigma ∘ alpha`; the root face is the
/// cycle through `root`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CombMap {
    pub sigma: Vec<u32>,
    pub alpha: Vec<u32>,
    pub root: u32,
}

/// Cycle decomposition of a permutation: `(cycle id per element, cycle count)`.
pub(crate) fn cycles(perm: impl Fn(usize) -> usize, len: usize) -> (Vec<usize>, usize) {
    let mut id = vec![usize::MAX; len];
    let mut count = 0;
    for start in 0..len {
        if id[start] != usize::MAX {
            continue;
        }
        let mut h = start;
        while id[h] == usize::MAX {
            id[h] = count;
            h = perm(h);
        }
        count += 1;
    }
    (id, count)
}

impl CombMap {
    pub fn new(sigma: Vec<u32>, alpha: Vec<u32>, root: u32) -> Result<Self, MapError> {
        let m = CombMap { sigma, alpha, root };
        m.validate()?;
        Ok(m)
    }

    /// Build from counterclockwise vertex rotations. Edge `e` owns half-edges
    /// `2e` and `2e + 1`; each rotation lists half-edge ids.
    pub fn from_rotations(rotations: &[Vec<u32>], root: u32) -> Result<Self, MapError> {
        let h = rotations.iter().map(|r| r.len()).sum::<usize>();
        let mut sigma = vec![u32::MAX; h];
        for rot in rotations {
            for (i, &x) in rot.iter().enumerate() {
                let slot = sigma.get_mut(x as usize).ok_or_else(|| MapError::Invalid(format!("half-edge {x}")))?;
                *slot = rot[(i + 1) % rot.len()];
            }
        }
        let alpha = (0..h as u32).map(|x| x ^ 1).collect();
        CombMap::new(sigma, alpha, root)
    }

    fn validate(&self) -> Result<(), MapError> {
        let h = self.sigma.len();
        if h == 0 || h % 2 == 1 || self.alpha.len() != h || self.root as usize >= h {
            return Err(MapError::Invalid("sizes".into()));
        }
        let mut seen = vec![false; h];
        for &s in &self.sigma {
            let s = s as usize;
            if s >= h || seen[s] {
                return Err(MapError::Invalid("sigma is not a permutation".into()));
            }
            seen[s] = true;
        }
        for (i, &a) in self.alpha.iter().enumerate() {
            if a as usize >= h || a as usize == i || self.alpha[a as usize] as usize != i {
                return Err(MapError::Invalid("alpha is not a fixed-point-free involution".into()));
            }
        }
        // transitivity
        let mut seen = vec![false; h];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut reached = 1;
        while let Some(x) = stack.pop() {
            for y in [self.sigma[x] as usize, self.alpha[x] as usize] {
                if !seen[y] {
                    seen[y] = true;
                    reached += 1;
                    stack.push(y);
                }
            }
        }
        if reached != h {
            return Err(MapError::Invalid("not connected".into()));
        }
        Ok(())
    }

    pub fn size(&self) -> usize {
        self.sigma.len() / 2
    }

    pub fn half_edges(&self) -> usize {
        self.sigma.len()
    }

    /// Face permutation `sigma ∘ alpha`.
    pub fn phi(&self, h: usize) -> usize {
        self.sigma[self.alpha[h] as usize] as usize
    }

    pub fn vertices(&self) -> (Vec<usize>, usize) {
        cycles(|h| self.sigma[h] as usize, self.half_edges())
    }

    pub fn faces(&self) -> (Vec<usize>, usize) {
        cycles(|h| self.phi(h), self.half_edges())
    }

    pub fn genus(&self) -> i64 {
        let v = self.vertices().1 as i64;
        let f = self.faces().1 as i64;
        let e = self.size() as i64;
        (2 - (v - e + f)) / 2
    }

    pub fn is_planar(&self) -> bool {
        let v = self.vertices().1 as i64;
        let f = self.faces().1 as i64;
        v - self.size() as i64 + f == 2
    }

    /// `n;sigma-cycles;alpha-pairs;root`, e.g. `1;(0 1);(0 1);0` for the loop.
    pub fn dump(&self) -> String {
        let (vid, nv) = self.vertices();
        let mut cyc = Vec::new();
        for v in 0..nv {
            let start = vid.iter().position(|&x| x == v).unwrap();
            let mut c = vec![start];
            let mut h = self.sigma[start] as usize;
            while h != start {
                c.push(h);
                h = self.sigma[h] as usize;
            }
            cyc.push(format!("({})", c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")));
        }
        let pairs: Vec<String> = (0..self.half_edges())
            .filter(|&h| (self.alpha[h] as usize) > h)
            .map(|h| format!("({} {})", h, self.alpha[h]))
            .collect();
        format!("{};{};{};{}", self.size(), cyc.join(""), pairs.join(""), self.root)
    }

    pub fn parse_dump(line: &str) -> Result<Self, MapError> {
        let bad = || MapError::Invalid(format!("cannot parse `{line}`"));
        let parts: Vec<&str> = line.trim().split(';').collect();
        if parts.len() != 4 {
            return Err(bad());
        }
        let n: usize = parts[0].parse().map_err(|_| bad())?;
        let groups = |s: &str| -> Result<Vec<Vec<u32>>, MapError> {
            s.split(')')
                .filter(|g| !g.trim().is_empty())
                .map(|g| {
                    g.trim()
                        .trim_start_matches('(')
                        .split_whitespace()
                        .map(|x| x.parse().map_err(|_| bad()))
                        .collect()
                })
                .collect()
        };
        let mut sigma = vec![u32::MAX; 2 * n];
        for c in groups(parts[1])? {
            for (i, &x) in c.iter().enumerate() {
                *sigma.get_mut(x as usize).ok_or_else(bad)? = c[(i + 1) % c.len()];
            }
        }
        let mut alpha = vec![u32::MAX; 2 * n];
        for p in groups(parts[2])? {
            if p.len() != 2 {
                return Err(bad());
            }
            *alpha.get_mut(p[0] as usize).ok_or_else(bad)? = p[1];
            *alpha.get_mut(p[1] as usize).ok_or_else(bad)? = p[0];
        }
        if sigma.contains(&u32::MAX) || alpha.contains(&u32::MAX) {
            return Err(bad());
        }
        CombMap::new(sigma, alpha, parts[3].parse().map_err(|_| bad())?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loop_and_link() {
        let lp = CombMap::new(vec![1, 0], vec![1, 0], 0).unwrap();
        assert_eq!(lp.vertices().1, 1);
        assert_eq!(lp.faces().1, 2);
        assert!(lp.is_planar());
        let link = CombMap::new(vec![0, 1], vec![1, 0], 0).unwrap();
        assert_eq!(link.vertices().1, 2);
        assert_eq!(link.faces().1, 1);
        assert_eq!(link.genus(), 0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(CombMap::new(vec![0, 1], vec![0, 1], 0).is_err());
        assert!(CombMap::new(vec![0, 0], vec![1, 0], 0).is_err());
        // two disjoint loops
        assert!(CombMap::new(vec![1, 0, 3, 2], vec![1, 0, 3, 2], 0).is_err());
    }

    #[test]
    fn dump_round_trip() {
        let m = CombMap::new(vec![2, 3, 0, 1], vec![1, 0, 3, 2], 1).unwrap();
        let d = m.dump();
        assert_eq!(d, "2;(0 2)(1 3);(0 1)(2 3);1");
        assert_eq!(CombMap::parse_dump(&d).unwrap(), m);
    }
}
