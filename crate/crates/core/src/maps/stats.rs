use std::collections::{BTreeMap, BTreeSet, HashSet};

use super::{CombMap, PatternSpec};

/// Exact statistics of one map.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MapStats {
    pub size: usize,
    /// Degree of each face, indexed by face id.
    pub face_degrees: Vec<usize>,
    pub face_pure: Vec<bool>,
    pub root_face: usize,
    /// Pattern name → number of occurrences with all interior faces non-root.
    pub patterns: BTreeMap<String, usize>,
    /// Pattern name → occurrences whose interior faces touch the root face.
    /// These are excluded from `patterns` and reported separately.
    pub root_touching: BTreeMap<String, usize>,
    /// Pattern name → pairs of counted occurrences sharing an interior face.
    pub overlapping: BTreeMap<String, usize>,
}

impl MapStats {
    pub fn root_degree(&self) -> usize {
        self.face_degrees[self.root_face]
    }

    /// Faces of degree `l`, optionally counting the root face.
    pub fn faces(&self, l: usize, root_included: bool) -> usize {
        self.count(|f| self.face_degrees[f] == l, root_included)
    }

    /// Pure `l`-gons: faces with `l` distinct vertices. Their edges are then
    /// distinct too, except for the face of the single link edge, which
    /// counts as a pure 2-gon.
    pub fn pure_gons(&self, l: usize, root_included: bool) -> usize {
        self.count(|f| self.face_degrees[f] == l && self.face_pure[f], root_included)
    }

    fn count(&self, pred: impl Fn(usize) -> bool, root_included: bool) -> usize {
        (0..self.face_degrees.len()).filter(|&f| (root_included || f != self.root_face) && pred(f)).count()
    }

    pub fn pattern(&self, name: &str) -> usize {
        self.patterns.get(name).copied().unwrap_or(0)
    }
}

pub fn stats(m: &CombMap, patterns: &[PatternSpec]) -> MapStats {
    let (vid, _) = m.vertices();
    let (fid, nf) = m.faces();
    let mut face_degrees = vec![0; nf];
    let mut verts: Vec<HashSet<usize>> = vec![HashSet::new(); nf];
    for h in 0..m.half_edges() {
        let f = fid[h];
        face_degrees[f] += 1;
        verts[f].insert(vid[h]);
    }
    let face_pure = (0..nf).map(|f| verts[f].len() == face_degrees[f]).collect();
    let mut st = MapStats {
        size: m.size(),
        face_degrees,
        face_pure,
        root_face: fid[m.root as usize],
        ..Default::default()
    };
    for p in patterns {
        let occ = occurrences(m, p);
        let (inner, touching): (Vec<_>, Vec<_>) = occ.into_iter().partition(|o| !o.contains(&st.root_face));
        let mut overlaps = 0;
        for i in 0..inner.len() {
            for j in i + 1..inner.len() {
                if !inner[i].is_disjoint(&inner[j]) {
                    overlaps += 1;
                }
            }
        }
        st.patterns.insert(p.name.clone(), inner.len());
        st.root_touching.insert(p.name.clone(), touching.len());
        st.overlapping.insert(p.name.clone(), overlaps);
    }
    st
}

/// Occurrences of `p` in `m`, each given by the set of faces of `m` that the
/// interior faces of `p` land on.
///
/// An occurrence is an injective map of the half-edges of `p` into those of
/// `m` that commutes with `alpha` everywhere and with the face permutation on
/// interior faces of `p`, and is injective on vertices. Occurrences that
/// differ only by an automorphism of `p` have the same interior image and
/// count once.
fn occurrences(m: &CombMap, p: &PatternSpec) -> Vec<BTreeSet<usize>> {
    let pm = &p.map;
    let hp = pm.half_edges();
    let (pf, _) = pm.faces();
    let (pv, npv) = pm.vertices();
    let (mv, _) = m.vertices();
    let (mf, _) = m.faces();
    let exterior = pf[pm.root as usize];
    let interior = |h: usize| pf[h] != exterior;
    let Some(start) = (0..hp).find(|&h| interior(h)) else {
        return Vec::new();
    };

    let mut images: HashSet<Vec<usize>> = HashSet::new();
    let mut result = Vec::new();
    'outer: for g in 0..m.half_edges() {
        let mut phi = vec![usize::MAX; hp];
        let mut used = HashSet::new();
        phi[start] = g;
        used.insert(g);
        let mut stack = vec![start];
        while let Some(h) = stack.pop() {
            let mut forced = vec![(pm.alpha[h] as usize, m.alpha[phi[h]] as usize)];
            if interior(h) {
                forced.push((pm.phi(h), m.phi(phi[h])));
            }
            for (ph, mh) in forced {
                if phi[ph] == usize::MAX {
                    if !used.insert(mh) {
                        continue 'outer;
                    }
                    phi[ph] = mh;
                    stack.push(ph);
                } else if phi[ph] != mh {
                    continue 'outer;
                }
            }
        }
        if phi.contains(&usize::MAX) {
            continue;
        }
        let mut vmap = vec![usize::MAX; npv];
        for h in 0..hp {
            let target = mv[phi[h]];
            if vmap[pv[h]] == usize::MAX {
                vmap[pv[h]] = target;
            } else if vmap[pv[h]] != target {
                continue 'outer;
            }
        }
        let distinct: HashSet<usize> = vmap.iter().copied().collect();
        if distinct.len() != npv {
            continue;
        }
        let mut key: Vec<usize> = (0..hp).filter(|&h| interior(h)).map(|h| phi[h]).collect();
        key.sort_unstable();
        if images.insert(key) {
            result.push((0..hp).filter(|&h| interior(h)).map(|h| mf[phi[h]]).collect());
        }
    }
    result
}

/// Double-counting identity on the union of pure `l`-gons (root face
/// included): with `k` such faces spanning `p` edges, exactly `2p − l·k`
/// edge sides lie outside them.
pub fn exterior_edge_check(m: &CombMap, l: usize) -> bool {
    let st = stats(m, &[]);
    let (fid, _) = m.faces();
    let gons: HashSet<usize> = (0..st.face_degrees.len())
        .filter(|&f| st.face_degrees[f] == l && st.face_pure[f])
        .collect();
    let k = gons.len();
    let union: HashSet<usize> = (0..m.half_edges())
        .filter(|&h| gons.contains(&fid[h]))
        .map(|h| h.min(m.alpha[h] as usize))
        .collect();
    let p = union.len();
    let outside = (0..m.half_edges())
        .filter(|&h| union.contains(&h.min(m.alpha[h] as usize)) && !gons.contains(&fid[h]))
        .count();
    outside as i64 == 2 * p as i64 - (l * k) as i64
}
