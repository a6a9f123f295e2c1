use rayon::prelude::*;

use super::{CombMap, MapError};

/// Default enumeration limit on the number of edges.
pub const DEFAULT_LIMIT: usize = 6;
/// Nothing above this size is ever enumerated.
pub const HARD_LIMIT: usize = 7;

const NONE: u32 = u32::MAX;

/// Partial rotation system under canonical construction.
///
/// Half-edges are labelled in the order in which the traversal "process
/// label i: first alpha(i), then sigma(i), giving a fresh label to any
/// unlabelled image" discovers them, starting from the root 0. Every rooted
/// map has exactly one such labelling, so building all consistent labellings
/// enumerates each rooted map exactly once with no isomorphism test.
#[derive(Clone)]
struct Partial {
    sigma: Vec<u32>,
    sigma_hit: Vec<bool>,
    alpha: Vec<u32>,
    next: u32,
    /// Label being processed and whether its alpha step is done.
    cursor: u32,
    alpha_done: bool,
}

impl Partial {
    fn new(n: usize) -> Self {
        let h = 2 * n;
        Partial {
            sigma: vec![NONE; h],
            sigma_hit: vec![false; h],
            alpha: vec![NONE; h],
            next: 1,
            cursor: 0,
            alpha_done: false,
        }
    }

    fn total(&self) -> u32 {
        self.sigma.len() as u32
    }

    /// Finished, dead, or expandable.
    fn children(&self) -> Step {
        let i = self.cursor;
        if i == self.total() {
            return Step::Done;
        }
        if i >= self.next {
            // ran out of labelled half-edges before using them all: disconnected
            return Step::Dead;
        }
        let iu = i as usize;
        let mut out = Vec::new();
        if !self.alpha_done {
            if self.alpha[iu] != NONE {
                let mut c = self.clone();
                c.alpha_done = true;
                out.push(c);
                return Step::Expand(out);
            }
            for j in (i + 1)..self.next {
                if self.alpha[j as usize] == NONE {
                    let mut c = self.clone();
                    c.alpha[iu] = j;
                    c.alpha[j as usize] = i;
                    c.alpha_done = true;
                    out.push(c);
                }
            }
            if self.next < self.total() {
                let mut c = self.clone();
                let j = c.next;
                c.next += 1;
                c.alpha[iu] = j;
                c.alpha[j as usize] = i;
                c.alpha_done = true;
                out.push(c);
            }
        } else {
            for k in 0..self.next {
                if !self.sigma_hit[k as usize] {
                    let mut c = self.clone();
                    c.sigma[iu] = k;
                    c.sigma_hit[k as usize] = true;
                    c.advance();
                    out.push(c);
                }
            }
            if self.next < self.total() {
                let mut c = self.clone();
                let k = c.next;
                c.next += 1;
                c.sigma[iu] = k;
                c.sigma_hit[k as usize] = true;
                c.advance();
                out.push(c);
            }
        }
        Step::Expand(out)
    }

    fn advance(&mut self) {
        self.cursor += 1;
        self.alpha_done = false;
    }

    fn finish(self) -> CombMap {
        CombMap { sigma: self.sigma, alpha: self.alpha, root: 0 }
    }
}

enum Step {
    Done,
    Dead,
    Expand(Vec<Partial>),
}

fn dfs<F: Fn(&CombMap) + Sync>(p: Partial, f: &F) {
    match p.children() {
        Step::Done => {
            let m = p.finish();
            if m.is_planar() {
                f(&m);
            }
        }
        Step::Dead => {}
        Step::Expand(children) => {
            for c in children {
                dfs(c, f);
            }
        }
    }
}

/// Call `f` on every rooted planar map with `n` edges, in parallel over
/// disjoint subtrees of the construction. Each map is labelled canonically
/// (root half-edge 0).
pub fn for_each_map<F: Fn(&CombMap) + Sync>(n: usize, limit: usize, f: F) -> Result<(), MapError> {
    if n == 0 {
        return Err(MapError::EmptyMap);
    }
    let limit = limit.min(HARD_LIMIT);
    if n > limit {
        return Err(MapError::SizeLimit { n, limit });
    }
    // expand breadth-first until there is enough work to share out
    let mut frontier = vec![Partial::new(n)];
    let mut finished = Vec::new();
    while frontier.len() < 256 {
        let mut next = Vec::new();
        let mut grew = false;
        for p in frontier {
            match p.children() {
                Step::Done => finished.push(p),
                Step::Dead => {}
                Step::Expand(c) => {
                    grew = true;
                    next.extend(c);
                }
            }
        }
        frontier = next;
        if !grew {
            break;
        }
    }
    for p in finished {
        let m = p.finish();
        if m.is_planar() {
            f(&m);
        }
    }
    frontier.into_par_iter().for_each(|p| dfs(p, &f));
    Ok(())
}

/// All rooted planar maps with `n` edges accepted by `filter`, in a
/// deterministic order (sorted by rotation system).
pub fn enumerate_maps<P: Fn(&CombMap) -> bool + Sync>(
    n: usize,
    limit: usize,
    filter: P,
) -> Result<Vec<CombMap>, MapError> {
    let out = std::sync::Mutex::new(Vec::new());
    for_each_map(n, limit, |m| {
        if filter(m) {
            out.lock().unwrap().push(m.clone());
        }
    })?;
    let mut v = out.into_inner().unwrap();
    v.sort_by(|a, b| (&a.sigma, &a.alpha).cmp(&(&b.sigma, &b.alpha)));
    Ok(v)
}
