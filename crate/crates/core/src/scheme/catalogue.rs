use crate::family::{Family, FamilySpec, Statistic};
use crate::maps::{classify, find_pattern, PatternSpec};

use super::{Expr, Ring, SchemeError, SchemeSpec};

/// Scheme kinds, `inner-outer`.
pub const SCHEME_KINDS: [&str; 9] =
    ["m1-m2l", "m1-m2b", "m2l-m3", "m1-m4", "m4-m5", "b1-b3", "b1-b2", "b1-b4", "b4-b5"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Shape {
    /// Inner loses its loops or bridges, with a coreless correction term.
    Core { bridges: bool },
    /// Edges of the outer family are substituted by inner maps.
    Edge,
    /// Root block: every corner of the outer map receives an inner map.
    Block,
}

fn kind(k: &str) -> Option<(Family, Family, Shape)> {
    use Family::*;
    Some(match k {
        "m1-m2l" => (M1, M2l, Shape::Core { bridges: false }),
        "m1-m2b" => (M1, M2b, Shape::Core { bridges: true }),
        "b1-b3" => (B1, B3, Shape::Core { bridges: true }),
        "m2l-m3" => (M2l, M3, Shape::Edge),
        "m4-m5" => (M4, M5, Shape::Edge),
        "b1-b2" => (B1, B2, Shape::Edge),
        "b4-b5" => (B4, B5, Shape::Edge),
        "m1-m4" => (M1, M4, Shape::Block),
        "b1-b4" => (B1, B4, Shape::Block),
        _ => return None,
    })
}

/// A representative instance of every scheme kind and statistic, with face
/// degrees tracked up to `max_face` in the face-count schemes.
pub fn builtin_schemes(max_face: usize) -> Vec<SchemeSpec> {
    builtin_ids().iter().map(|id| find_scheme(id, max_face).expect("builtin scheme")).collect()
}

fn builtin_ids() -> Vec<String> {
    let mut ids: Vec<String> = SCHEME_KINDS.iter().map(|k| k.to_string()).collect();
    for k in ["m1-m4", "m1-m2b"] {
        ids.extend((1..=4).map(|l| format!("{k}.ellgon:{l}")));
    }
    ids.extend((2..=4).map(|l| format!("m1-m2l.ellgon:{l}")));
    for k in ["b1-b4", "b1-b3"] {
        ids.extend([2, 4].map(|l| format!("{k}.ellgon:{l}")));
    }
    ids.extend(["m1-m4.ellgons:2,3", "m1-m2l.ellgons:2,3", "m1-m2b.ellgons:1,2,3", "b1-b4.ellgons:2,4", "b1-b3.ellgons:2,4"].map(String::from));
    for k in ["m1-m4", "m1-m2l", "m1-m2b"] {
        ids.push(format!("{k}.pattern:double-triangle"));
    }
    for k in ["m1-m4", "b1-b4", "b1-b3"] {
        ids.push(format!("{k}.pattern:digon-square"));
    }
    for k in ["m1-m2l", "m1-m2b", "b1-b3", "m1-m4", "b1-b4"] {
        ids.push(format!("{k}.faces"));
    }
    ids.extend(["m1-m4.faces:2", "m1-m4.faces:2,3", "b1-b4.faces:2,4"].map(String::from));
    for k in ["m2l-m3", "m4-m5"] {
        ids.push(format!("{k}.ellgons-root:1,2,3"));
        ids.push(format!("{k}.faces-root:1,2,3"));
    }
    for k in ["b1-b2", "b4-b5"] {
        ids.push(format!("{k}.ellgons-root:2,4"));
        ids.push(format!("{k}.faces-root:2,4"));
    }
    ids
}

/// Parse a scheme id: `KIND`, `KIND.ellgon:L`, `KIND.ellgons:L1,L2,..`,
/// `KIND.pattern:NAME`, `KIND.faces`, `KIND.faces:L1,..` (block schemes),
/// `KIND.ellgons-root:..`, `KIND.faces-root:..`.
pub fn find_scheme(id: &str, max_face: usize) -> Result<SchemeSpec, SchemeError> {
    let (k, stat) = match id.split_once('.') {
        Some((k, s)) => (k, Some(s)),
        None => (id, None),
    };
    let (inner, outer, shape) = kind(k).ok_or_else(|| SchemeError::UnknownScheme(id.to_string()))?;
    let invalid = |reason: &str| SchemeError::InvalidScheme { id: id.to_string(), reason: reason.to_string() };
    let list = |s: &str| -> Result<Vec<usize>, SchemeError> {
        let v: Vec<usize> = s
            .split(',')
            .map(|x| x.trim().parse::<usize>().ok().filter(|&l| l >= 1))
            .collect::<Option<_>>()
            .ok_or_else(|| invalid("expected a list of positive integers"))?;
        let mut sorted = v.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != v.len() {
            return Err(invalid("repeated face degree"));
        }
        Ok(v)
    };
    let b = Builder { id, inner, outer };

    let Some(stat) = stat else {
        return Ok(match shape {
            Shape::Core { .. } => b.core(Vec::new(), Vec::new()),
            Shape::Edge => b.edge(Vec::new()),
            Shape::Block => b.block(Vec::new(), Vec::new()),
        });
    };
    let (what, arg) = stat.split_once(':').unwrap_or((stat, ""));
    match (what, shape) {
        ("ellgon" | "ellgons", Shape::Core { .. } | Shape::Block) => {
            let ls = list(arg)?;
            if what == "ellgon" && ls.len() != 1 {
                return Err(invalid("`ellgon` takes one degree; use `ellgons`"));
            }
            if k == "m1-m2l" && ls.contains(&1) {
                return Err(invalid("loops are removed by the loopless core, so 1-gons cannot be tracked"));
            }
            let gons = ls.into_iter().map(|l| (Statistic::Gons(l), l)).collect();
            Ok(b.marked(shape, gons))
        }
        ("pattern", Shape::Core { .. } | Shape::Block) => {
            let p = find_pattern(arg)?;
            check_pattern(&p, shape).map_err(|r| invalid(&r))?;
            Ok(b.marked(shape, vec![(Statistic::Pattern(p.name.clone()), p.interior_sides)]))
        }
        ("faces", Shape::Core { bridges }) => {
            if !arg.is_empty() {
                return Err(invalid("`faces` takes no argument"));
            }
            Ok(b.faces_core(face_degrees(inner, max_face), bridges))
        }
        ("faces", Shape::Block) => {
            if arg.is_empty() {
                return Ok(b.faces_block(face_degrees(inner, max_face)));
            }
            let mut ls = list(arg)?;
            ls.sort_unstable();
            let top = *ls.last().unwrap();
            let from = if inner.is_bipartite() || ls[0] == 2 { 2 } else { 1 };
            if ls != face_degrees(inner, top).into_iter().filter(|&l| l >= from).collect::<Vec<_>>() {
                return Err(invalid("face degrees must be all degrees up to the largest, optionally without 1"));
            }
            Ok(b.faces_block(ls))
        }
        ("ellgons-root", Shape::Edge) => Ok(b.edge(list(arg)?.into_iter().map(Statistic::GonsRoot).collect())),
        ("faces-root", Shape::Edge) => Ok(b.edge(list(arg)?.into_iter().map(Statistic::FacesRoot).collect())),
        _ => Err(invalid("statistic not available for this scheme kind")),
    }
}

fn check_pattern(p: &PatternSpec, shape: Shape) -> Result<(), String> {
    match shape {
        Shape::Block if !p.two_connected => Err("pattern must be 2-connected".into()),
        Shape::Core { bridges: false } if !p.loopless => Err("pattern must be loopless".into()),
        Shape::Core { bridges: true } if !classify(&p.map).bridgeless => {
            Err("pattern must be bridgeless".into())
        }
        _ => Ok(()),
    }
}

fn face_degrees(f: Family, max_face: usize) -> Vec<usize> {
    (1..=max_face).filter(|l| !f.is_bipartite() || l % 2 == 0).collect()
}

struct Builder<'a> {
    id: &'a str,
    inner: Family,
    outer: Family,
}

fn p() -> Expr {
    Expr::one_plus_inner()
}

impl Builder<'_> {
    fn spec(&self, inner: Vec<Statistic>, outer: Vec<Statistic>, z: Expr, bindings: Vec<(String, Expr)>, correction: Option<Expr>, ring: Ring) -> SchemeSpec {
        SchemeSpec {
            id: self.id.to_string(),
            inner: FamilySpec::new(self.inner, inner),
            outer: FamilySpec::new(self.outer, outer),
            z_subst: z,
            bindings,
            correction,
            ring,
        }
    }

    fn marked(&self, shape: Shape, marks: Vec<(Statistic, usize)>) -> SchemeSpec {
        let stats: Vec<Statistic> = marks.iter().map(|(s, _)| s.clone()).collect();
        let bindings = match shape {
            Shape::Core { .. } => core_bindings(&marks),
            _ => block_bindings(&marks),
        };
        match shape {
            Shape::Core { .. } => self.core(stats, bindings),
            _ => self.block(stats, bindings),
        }
    }

    /// `inner = outer(z S²; v) + z (1+inner)²` with `S = 1/(1 − z(1+inner))`.
    fn core(&self, stats: Vec<Statistic>, bindings: Vec<(String, Expr)>) -> SchemeSpec {
        let s = seq();
        let u = Expr::Z * s.pow(2);
        let corr = Expr::Z * p().pow(2);
        self.spec(stats.clone(), stats, u, bindings, Some(corr), Ring::AtT1)
    }

    /// `inner = outer(z (1+inner)²; v)`.
    fn block(&self, stats: Vec<Statistic>, bindings: Vec<(String, Expr)>) -> SchemeSpec {
        self.spec(stats.clone(), stats, Expr::Z * p().pow(2), bindings, None, Ring::AtT1)
    }

    /// `inner = outer(z (1+inner); x)`, root faces included in the marked
    /// statistics. For 2-connected maps the loop is not a valid edge
    /// substitute and is excluded.
    fn edge(&self, stats: Vec<Statistic>) -> SchemeSpec {
        let loop_map = PatternSpec::ellgon(1).map;
        let (u, corr) = if self.inner == Family::M4 {
            let lp = Expr::MapTerm(loop_map);
            (Expr::Z * (p() - lp.clone()), Some(lp))
        } else {
            (Expr::Z * p(), None)
        };
        self.spec(stats.clone(), stats, u, Vec::new(), corr, Ring::AtT1)
    }

    /// Face counts around a loopless or bridgeless core. Loops (bridges)
    /// hang in the corners of the core as sequences counted by `S`, each
    /// raising the degree of its face by one (two).
    fn faces_core(&self, degrees: Vec<usize>, bridges: bool) -> SchemeSpec {
        let mut stats = vec![Statistic::RootDegree];
        stats.extend(degrees.iter().map(|&l| Statistic::Faces(l)));
        let (step, corr) = if bridges {
            (Expr::Z * Expr::T.pow(2) * p(), Expr::Z * Expr::T.pow(2) * p().pow(2))
        } else {
            // the face inside a loop has degree one more than the root face
            // of the map it contains
            let inside = p().shift_faces(1);
            (Expr::Z * Expr::T * inside.clone(), Expr::Z * Expr::T * inside * p())
        };
        let s = (Expr::one() - step).inv();
        let mut bindings = vec![("t".to_string(), Expr::T * s.clone())];
        for &l in &degrees {
            bindings.push((format!("x{l}"), s.clone().pow(l as u32).shift_faces(l)));
        }
        self.spec(stats.clone(), stats, Expr::Z, bindings, Some(corr), Ring::Full)
    }

    /// Face counts through the root block: every corner receives a map whose
    /// root face merges into the face of the corner.
    fn faces_block(&self, degrees: Vec<usize>) -> SchemeSpec {
        let mut inner = vec![Statistic::RootDegree];
        inner.extend(degrees.iter().map(|&l| Statistic::Faces(l)));
        let outer: Vec<Statistic> = degrees.iter().map(|&l| Statistic::Faces(l)).collect();
        let p1 = p().at_t1();
        let bindings = degrees
            .iter()
            .map(|&l| (format!("x{l}"), p().pow(l as u32).shift_faces(l) * p1.clone().pow(l as u32).inv()))
            .collect();
        let u = Expr::Z * p1.clone().pow(2);
        // untracked 1-faces: only the loop map has a non-root one, contributing y·x1
        let correction = (!self.inner.is_bipartite() && !degrees.contains(&1))
            .then(|| u.clone() * (p().shift_faces(1) * p1.inv() - Expr::one()));
        self.spec(inner, outer, u, bindings, correction, Ring::AtT1)
    }
}

/// `1/(1 − z(1+inner))`.
fn seq() -> Expr {
    (Expr::one() - Expr::Z * p()).inv()
}

/// `v = (S^l − 1 + x)/S^l`.
fn core_bindings(marks: &[(Statistic, usize)]) -> Vec<(String, Expr)> {
    marks
        .iter()
        .map(|(s, l)| {
            let sl = seq().pow(*l as u32);
            let name = s.marker_name();
            (name.clone(), (sl.clone() - Expr::one() + Expr::var(name)) * sl.inv())
        })
        .collect()
}

/// `v = ((1+inner)^l − 1 + x)/(1+inner)^l`.
fn block_bindings(marks: &[(Statistic, usize)]) -> Vec<(String, Expr)> {
    marks
        .iter()
        .map(|(s, l)| {
            let pl = p().pow(*l as u32);
            let name = s.marker_name();
            (name.clone(), (pl.clone() - Expr::one() + Expr::var(name)) * pl.inv())
        })
        .collect()
}
