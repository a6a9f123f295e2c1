use super::{classify, CombMap, MapError};

/// A pattern map whose root face plays the role of the exterior.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternSpec {
    pub name: String,
    pub map: CombMap,
    /// Number of edges.
    pub size: usize,
    /// Degree of the exterior (root) face.
    pub boundary: usize,
    /// Interior sides of edges, `2·size − boundary`.
    pub interior_sides: usize,
    pub loopless: bool,
    pub bipartite: bool,
    pub two_connected: bool,
    /// True when the exterior face is a pure polygon.
    pub simple_boundary: bool,
}

impl PatternSpec {
    /// Build from rotations, rooting on a half-edge of `exterior_edge` whose
    /// face has degree `exterior_degree`.
    pub fn from_rotations(
        name: &str,
        rotations: &[Vec<u32>],
        exterior_edge: u32,
        exterior_degree: usize,
    ) -> Result<Self, MapError> {
        let probe = CombMap::from_rotations(rotations, 0)?;
        if !probe.is_planar() {
            return Err(MapError::Invalid(format!("pattern `{name}` is not planar")));
        }
        let (fid, nf) = probe.faces();
        let mut deg = vec![0; nf];
        for &f in &fid {
            deg[f] += 1;
        }
        let root = [2 * exterior_edge, 2 * exterior_edge + 1]
            .into_iter()
            .find(|&h| deg[fid[h as usize]] == exterior_degree)
            .ok_or_else(|| MapError::Invalid(format!("pattern `{name}` has no such exterior")))?;
        let map = CombMap { root, ..probe };
        let flags = classify(&map);
        let size = map.size();
        let st = super::stats(&map, &[]);
        Ok(PatternSpec {
            name: name.to_string(),
            size,
            boundary: exterior_degree,
            interior_sides: 2 * size - exterior_degree,
            loopless: flags.loopless,
            bipartite: flags.bipartite,
            two_connected: flags.two_connected,
            simple_boundary: st.face_pure[st.root_face],
            map,
        })
    }

    /// Cycle with `l` vertices and `l` edges.
    pub fn ellgon(l: usize) -> Self {
        assert!(l >= 1);
        let l32 = l as u32;
        let rotations: Vec<Vec<u32>> = if l == 1 {
            vec![vec![0, 1]]
        } else {
            (0..l32).map(|i| vec![2 * i, 2 * ((i + l32 - 1) % l32) + 1]).collect()
        };
        Self::from_rotations(&format!("ellgon:{l}"), &rotations, 0, l).expect("cycle pattern")
    }
}

/// The hardcoded patterns. Non-self-intersection is assumed for these, not
/// checked; `stats` reports overlapping occurrences when they happen.
pub fn pattern_library() -> Vec<PatternSpec> {
    let mut v: Vec<PatternSpec> = (1..=6).map(PatternSpec::ellgon).collect();
    // two triangles abc, abd glued along ab; exterior a-c-b-d
    v.push(
        PatternSpec::from_rotations(
            "double-triangle",
            &[vec![0, 5, 9], vec![2, 1, 6], vec![4, 3], vec![7, 8]],
            1,
            4,
        )
        .expect("double-triangle"),
    );
    // square abcd with a second edge ab outside it, enclosing a digon
    v.push(
        PatternSpec::from_rotations("digon-square", &[vec![0, 7, 8], vec![2, 1, 9], vec![4, 3], vec![5, 6]], 4, 4)
            .expect("digon-square"),
    );
    v
}

pub fn find_pattern(name: &str) -> Result<PatternSpec, MapError> {
    pattern_library()
        .into_iter()
        .find(|p| p.name == name)
        .ok_or_else(|| MapError::UnknownPattern(name.to_string()))
}
