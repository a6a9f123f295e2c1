use std::collections::HashSet;

use super::CombMap;

/// Family membership flags of a single map.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Flags {
    pub loopless: bool,
    pub bridgeless: bool,
    pub simple: bool,
    pub bipartite: bool,
    pub two_connected: bool,
}

pub fn classify(m: &CombMap) -> Flags {
    let (vid, nv) = m.vertices();
    let (fid, _) = m.faces();
    let h = m.half_edges();
    let edges: Vec<(usize, usize)> = (0..h)
        .filter(|&x| (m.alpha[x] as usize) > x)
        .map(|x| (vid[x], vid[m.alpha[x] as usize]))
        .collect();

    let loopless = edges.iter().all(|&(a, b)| a != b);
    // in a planar map an edge is a bridge iff the same face lies on both sides
    let bridgeless = (0..h).all(|x| fid[x] != fid[m.alpha[x] as usize]);
    let simple = loopless && {
        let mut seen = HashSet::new();
        edges.iter().all(|&(a, b)| seen.insert((a.min(b), a.max(b))))
    };

    let bipartite = two_colourable(&edges, nv);
    let even_faces = {
        let mut deg = vec![0usize; h];
        for &f in &fid {
            deg[f] += 1;
        }
        deg.iter().all(|d| d % 2 == 0)
    };
    assert_eq!(bipartite, even_faces, "bicolouring disagrees with face parity on {}", m.dump());

    Flags { loopless, bridgeless, simple, bipartite, two_connected: !separable(&edges, nv) }
}

fn two_colourable(edges: &[(usize, usize)], nv: usize) -> bool {
    let mut adj = vec![Vec::new(); nv];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut colour = vec![u8::MAX; nv];
    colour[0] = 0;
    let mut stack = vec![0];
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if colour[w] == u8::MAX {
                colour[w] = 1 - colour[v];
                stack.push(w);
            } else if colour[w] == colour[v] {
                return false;
            }
        }
    }
    true
}

/// Separable: the edge set splits into two non-empty parts meeting in exactly
/// one vertex. Equivalently, some vertex `v` splits the edges into at least
/// two classes when edges are joined only through endpoints other than `v`.
fn separable(edges: &[(usize, usize)], nv: usize) -> bool {
    if edges.len() < 2 {
        return false;
    }
    (0..nv).any(|v| {
        let mut parent: Vec<usize> = (0..edges.len()).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let nxt = p[y];
                p[y] = r;
                y = nxt;
            }
            r
        }
        let mut by_vertex: Vec<Option<usize>> = vec![None; nv];
        for (i, &(a, b)) in edges.iter().enumerate() {
            for w in [a, b] {
                if w == v {
                    continue;
                }
                match by_vertex[w] {
                    None => by_vertex[w] = Some(i),
                    Some(j) => {
                        let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                        parent[ri] = rj;
                    }
                }
            }
        }
        let roots: HashSet<usize> = (0..edges.len()).map(|i| find(&mut parent, i)).collect();
        roots.len() >= 2
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loop_link_double_edge() {
        let lp = CombMap::new(vec![1, 0], vec![1, 0], 0).unwrap();
        let f = classify(&lp);
        assert!(!f.loopless && f.two_connected && f.bridgeless && !f.bipartite);

        let link = CombMap::new(vec![0, 1], vec![1, 0], 0).unwrap();
        let f = classify(&link);
        assert!(!f.bridgeless && f.bipartite && f.simple && f.two_connected);

        // two vertices joined by two parallel edges
        let dbl = CombMap::new(vec![2, 3, 0, 1], vec![1, 0, 3, 2], 0).unwrap();
        let f = classify(&dbl);
        assert!(!f.simple && f.two_connected && f.bipartite && f.loopless && f.bridgeless);
    }

    #[test]
    fn path_of_two_edges_is_separable() {
        // a - b - c
        let m = CombMap::from_rotations(&[vec![0], vec![1, 2], vec![3]], 0).unwrap();
        let f = classify(&m);
        assert!(!f.two_connected && f.simple && !f.bridgeless);
    }
}
