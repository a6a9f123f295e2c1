//! Composition schemes between map families, stored as expression data, with
//! coefficientwise verification and triangular extraction of the outer series.

mod catalogue;
mod expr;

use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::family::{FamilySpec, Statistic};
use crate::maps::{find_pattern, MapError, PatternSpec};
use crate::series::{format_rational, MarkerSet, Mono, MultiSeries, PowerCache, Rational, SeriesError};

pub use catalogue::{builtin_schemes, find_scheme, SCHEME_KINDS};
pub use expr::{Evaluator, Expr, InnerSeries, Ring};

#[derive(Debug, Error)]
pub enum SchemeError {
    #[error("inner series known to order {have}, {need} requested")]
    InsufficientOrder { have: usize, need: usize },
    #[error("scheme needs the inner series with its full dependence on t")]
    NeedsFullInner,
    #[error("system is not triangular: {0}")]
    NotTriangular(String),
    #[error("inconsistent scheme at z-degree {degree}: {detail}")]
    Inconsistent { degree: usize, detail: String },
    #[error("unknown scheme `{0}`")]
    UnknownScheme(String),
    #[error("invalid scheme `{id}`: {reason}")]
    InvalidScheme { id: String, reason: String },
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Map(#[from] MapError),
}

/// Inner side minus correction, substitution for `z`, marker bindings.
type Sides = (MultiSeries, MultiSeries, Vec<(String, MultiSeries)>);

/// `inner = outer(u; v) + correction`, all sides evaluated in `ring`.
#[derive(Clone, Debug)]
pub struct SchemeSpec {
    pub id: String,
    pub inner: FamilySpec,
    pub outer: FamilySpec,
    /// Substitution for the size variable of the outer family.
    pub z_subst: Expr,
    /// Substitutions for outer markers, by marker name. Unlisted outer
    /// markers pass through unchanged; an unlisted `t` becomes [`Expr::T`].
    pub bindings: Vec<(String, Expr)>,
    pub correction: Option<Expr>,
    pub ring: Ring,
}

/// Outcome of checking a scheme coefficientwise.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SchemeResidual {
    pub scheme: String,
    pub order: usize,
    /// Largest absolute residual coefficient, as an exact rational string.
    pub max_abs: String,
    pub markers: Vec<String>,
    /// First nonzero residual term `(n, exponents, coefficient)`.
    pub first_failing: Option<(usize, Mono, String)>,
}

impl SchemeResidual {
    pub fn is_zero(&self) -> bool {
        self.first_failing.is_none()
    }
}

impl SchemeSpec {
    /// Patterns needed to evaluate map terms over the inner statistics.
    pub fn patterns(&self) -> Result<Vec<PatternSpec>, SchemeError> {
        let mut v = Vec::new();
        for s in &self.inner.stats {
            if let Statistic::Pattern(p) | Statistic::PatternRoot(p) = s {
                v.push(find_pattern(p)?);
            }
        }
        Ok(v)
    }

    /// Evaluated substitutions: `(inner side − correction, u, bindings)` in the ring.
    fn sides(
        &self,
        ev: &Evaluator<'_>,
        outer_markers: &MarkerSet,
    ) -> Result<Sides, SchemeError> {
        let mut lhs = ev.eval(&Expr::Inner, &self.ring)?;
        if let Some(c) = &self.correction {
            lhs = lhs.sub(&ev.eval(c, &self.ring)?)?;
        }
        let u = ev.eval(&self.z_subst, &self.ring)?;
        let ring_markers = ev.markers(&self.ring)?;
        let mut bindings = Vec::new();
        for name in outer_markers.names() {
            let e = match self.bindings.iter().find(|(n, _)| n == name) {
                Some((_, e)) => e.clone(),
                None if name == "t" => Expr::T,
                None if ring_markers.index_of(name).is_some() => continue,
                None => {
                    return Err(SchemeError::InvalidScheme {
                        id: self.id.clone(),
                        reason: format!("outer marker `{name}` has no binding and no inner counterpart"),
                    })
                }
            };
            bindings.push((name.to_string(), ev.eval(&e, &self.ring)?));
        }
        Ok((lhs, u, bindings))
    }

    /// Residual `inner − correction − outer(u; v)` to order `order`.
    pub fn verify(&self, inner: &InnerSeries, outer: &MultiSeries, order: usize) -> Result<SchemeResidual, SchemeError> {
        if outer.order() < order {
            return Err(SchemeError::InsufficientOrder { have: outer.order(), need: order });
        }
        let patterns = self.patterns()?;
        let ev = Evaluator::new(inner, &self.inner, &patterns, order)?;
        let (lhs, u, bindings) = self.sides(&ev, outer.markers())?;
        let target = ev.markers(&self.ring)?;
        let composed = outer.truncate(order).substitute(&target, &bindings, Some(&u))?;
        let residual = lhs.sub(&composed)?;
        Ok(SchemeResidual {
            scheme: self.id.clone(),
            order,
            max_abs: format_rational(&residual.max_abs_coeff()),
            markers: target.names().iter().map(|s| s.to_string()).collect(),
            first_failing: residual.first_term().map(|(n, m, c)| (n, m, format_rational(&c))),
        })
    }

    /// Outer markers for extraction: the ring markers named like the outer
    /// statistics, with their bounds and centering.
    pub fn outer_markers(&self, ev: &Evaluator<'_>) -> Result<MarkerSet, SchemeError> {
        let ring = ev.markers(&self.ring)?;
        let mut v = Vec::new();
        for s in &self.outer.stats {
            let name = s.marker_name();
            let i = ring.index_of(&name).ok_or_else(|| {
                SchemeError::NotTriangular(format!("outer marker `{name}` is not a marker of the inner ring"))
            })?;
            v.push(ring.markers()[i].clone());
        }
        Ok(MarkerSet::new(v)?)
    }

    /// Solve `inner = outer(u; v) + correction` for the outer series, one
    /// z-degree at a time. Needs `[z^1]u` to be a nonzero constant and each
    /// marker substitution to reduce to its own marker at `z = 0`.
    pub fn extract_outer(&self, inner: &InnerSeries, order: usize) -> Result<MultiSeries, SchemeError> {
        let patterns = self.patterns()?;
        let ev = Evaluator::new(inner, &self.inner, &patterns, order)?;
        let outer_markers = self.outer_markers(&ev)?;
        let target = ev.markers(&self.ring)?;
        let (lhs, u, bindings) = self.sides(&ev, &outer_markers)?;

        let u1 = leading_constant(&u)?;
        for (name, b) in &bindings {
            let x = MultiSeries::var(&target, order, name)?;
            if b.degree_terms(0) != x.degree_terms(0) {
                return Err(SchemeError::NotTriangular(format!("substitution for `{name}` is not `{name} + O(z)`")));
            }
        }
        if !lhs.degree_terms(0).is_empty() {
            return Err(SchemeError::Inconsistent { degree: 0, detail: "inner side has a constant term".into() });
        }

        // positions of outer markers inside the ring
        let pos: Vec<usize> = outer_markers.names().iter().map(|n| target.index_of(n).unwrap()).collect();
        let centered: Vec<bool> = outer_markers.markers().iter().map(|m| m.centered).collect();
        // the values entering each outer marker: v, or v − 1 when centered
        let mut base: Vec<MultiSeries> = Vec::with_capacity(pos.len());
        for (k, name) in outer_markers.names().iter().enumerate() {
            let v = match bindings.iter().find(|(n, _)| n == name) {
                Some((_, b)) => b.clone(),
                None => MultiSeries::var(&target, order, name)?,
            };
            base.push(if centered[k] { v.sub(&MultiSeries::one(&target, order))? } else { v });
        }
        let mut powers: Vec<PowerCache> = base.into_iter().map(PowerCache::new).collect();

        let mut outer = MultiSeries::zero(&outer_markers, order);
        let mut acc = MultiSeries::zero(&target, order);
        let mut u_pow = MultiSeries::one(&target, order);
        let mut scale = Rational::one();
        for n in 1..=order {
            u_pow = u_pow.mul(&u)?;
            scale *= &u1;
            let mut diff = lhs.degree_terms(n).clone();
            for (mono, c) in acc.degree_terms(n) {
                let e = diff.entry(mono.clone()).or_insert_with(Rational::zero);
                *e -= c;
            }
            let mut terms = Vec::new();
            for (mono, c) in diff {
                if c.is_zero() {
                    continue;
                }
                if let Some(i) = (0..mono.len()).find(|&i| mono[i] != 0 && !pos.contains(&i)) {
                    return Err(SchemeError::Inconsistent {
                        degree: n,
                        detail: format!("unmatched term in marker `{}`", target.names()[i]),
                    });
                }
                terms.push((pos.iter().map(|&p| mono[p]).collect::<Mono>(), c / &scale));
            }
            if terms.is_empty() {
                continue;
            }
            let room = order - n;
            let mut slice = MultiSeries::zero(&target, room);
            for (mono, c) in &terms {
                let mut prod = MultiSeries::constant(&target, room, c.clone());
                for (k, &e) in mono.iter().enumerate() {
                    if e == 0 {
                        continue;
                    }
                    prod = prod.mul(&powers[k].get(e, room)?)?;
                }
                slice = slice.add(&prod)?;
            }
            acc.accumulate_product(&slice, &u_pow)?;
            outer = outer.add(&MultiSeries::from_terms(&outer_markers, order, terms.into_iter().map(|(m, c)| (n, m, c)))?)?;
        }
        Ok(outer)
    }
}

/// `[z^1]u`, required to be a nonzero constant.
fn leading_constant(u: &MultiSeries) -> Result<Rational, SchemeError> {
    if !u.degree_terms(0).is_empty() {
        return Err(SchemeError::NotTriangular("size substitution has a constant term".into()));
    }
    let d1 = u.degree_terms(1);
    match d1.iter().next() {
        Some((m, c)) if d1.len() == 1 && m.iter().all(|&e| e == 0) && !c.is_zero() => Ok(c.clone()),
        _ => Err(SchemeError::NotTriangular("[z^1] of the size substitution is not a nonzero constant".into())),
    }
}
