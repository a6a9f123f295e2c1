use std::ops::{Add, Mul, Sub};

use num_traits::One;

use crate::family::{FamilySpec, Statistic};
use crate::maps::{statistic_value, stats, CombMap, PatternSpec};
use crate::series::{Marker, MarkerSet, MultiSeries, Rational, SeriesError};

use super::SchemeError;

/// Series-valued expression over the inner series of a scheme.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Z,
    /// The catalytic root-degree variable `t`.
    T,
    /// A marker of the inner series, by name; 1 when the inner does not track it.
    Var(String),
    Const(Rational),
    Inner,
    /// The inner series at `t = 1`.
    InnerAtT1,
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Inv(Box<Expr>),
    Pow(Box<Expr>, u32),
    /// `base` at `t = 1`.
    AtT1(Box<Expr>),
    /// `Σ_k [t^k](base) · x_{k+shift}`, with `x_j = 1` for untracked `j`.
    ShiftFaces(Box<Expr>, usize),
    /// The monomial of one fixed map under the inner statistics, times `z^size`.
    MapTerm(CombMap),
}

impl Expr {
    pub fn int(n: i64) -> Expr {
        Expr::Const(Rational::from_integer(n.into()))
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn var(name: impl Into<String>) -> Expr {
        Expr::Var(name.into())
    }

    pub fn inv(self) -> Expr {
        Expr::Inv(Box::new(self))
    }

    pub fn pow(self, k: u32) -> Expr {
        Expr::Pow(Box::new(self), k)
    }

    pub fn at_t1(self) -> Expr {
        Expr::AtT1(Box::new(self))
    }

    pub fn shift_faces(self, shift: usize) -> Expr {
        Expr::ShiftFaces(Box::new(self), shift)
    }

    /// `1 + Inner`.
    pub fn one_plus_inner() -> Expr {
        Expr::one() + Expr::Inner
    }

    fn uses_t(&self) -> bool {
        match self {
            Expr::T | Expr::Inner => true,
            Expr::Z | Expr::Var(_) | Expr::Const(_) | Expr::InnerAtT1 | Expr::MapTerm(_) => false,
            Expr::AtT1(_) | Expr::ShiftFaces(..) => false,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => a.uses_t() || b.uses_t(),
            Expr::Inv(a) | Expr::Pow(a, _) => a.uses_t(),
        }
    }
}

impl Add for Expr {
    type Output = Expr;
    fn add(self, o: Expr) -> Expr {
        Expr::Add(Box::new(self), Box::new(o))
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(self, o: Expr) -> Expr {
        Expr::Sub(Box::new(self), Box::new(o))
    }
}

impl Mul for Expr {
    type Output = Expr;
    fn mul(self, o: Expr) -> Expr {
        Expr::Mul(Box::new(self), Box::new(o))
    }
}

/// The inner series: either complete, or split into its value at `t = 1`
/// and its first few `t`-coefficients (enough for schemes that look at the
/// catalytic variable only through low root-face degrees).
#[derive(Clone, Debug)]
pub enum InnerSeries {
    Full(MultiSeries),
    Split { at_t1: MultiSeries, low: Vec<MultiSeries> },
}

impl InnerSeries {
    pub fn order(&self) -> usize {
        match self {
            InnerSeries::Full(s) => s.order(),
            InnerSeries::Split { at_t1, .. } => at_t1.order(),
        }
    }

    /// Markers apart from `t`.
    pub fn base_markers(&self) -> Result<MarkerSet, SeriesError> {
        match self {
            InnerSeries::Full(s) => {
                if s.markers().index_of("t").is_some() {
                    s.markers().without("t")
                } else {
                    Ok(s.markers().clone())
                }
            }
            InnerSeries::Split { at_t1, .. } => Ok(at_t1.markers().clone()),
        }
    }

    pub fn has_t(&self) -> bool {
        match self {
            InnerSeries::Full(s) => s.markers().index_of("t").is_some(),
            InnerSeries::Split { .. } => true,
        }
    }
}

/// Where an expression is evaluated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Ring {
    /// The markers of a full inner series, `t` included.
    Full,
    /// All markers but `t`, which is set to 1.
    AtT1,
    /// All markers but `t`, plus `t` truncated above `t^k`.
    LowT(u32),
}

pub struct Evaluator<'a> {
    inner: &'a InnerSeries,
    inner_spec: &'a FamilySpec,
    patterns: &'a [PatternSpec],
    order: usize,
    base: MarkerSet,
    /// Largest tracked non-root face degree.
    max_face: usize,
}

impl<'a> Evaluator<'a> {
    pub fn new(
        inner: &'a InnerSeries,
        inner_spec: &'a FamilySpec,
        patterns: &'a [PatternSpec],
        order: usize,
    ) -> Result<Self, SchemeError> {
        if inner.order() < order {
            return Err(SchemeError::InsufficientOrder { have: inner.order(), need: order });
        }
        let base = inner.base_markers()?;
        let max_face = base
            .names()
            .iter()
            .filter_map(|n| match Statistic::from_marker_name(n) {
                Ok(Statistic::Faces(l)) => Some(l),
                _ => None,
            })
            .max()
            .unwrap_or(0);
        Ok(Evaluator { inner, inner_spec, patterns, order, base, max_face })
    }

    pub fn markers(&self, ring: &Ring) -> Result<MarkerSet, SchemeError> {
        Ok(match ring {
            Ring::Full => match self.inner {
                InnerSeries::Full(s) => s.markers().clone(),
                InnerSeries::Split { .. } => return Err(SchemeError::NeedsFullInner),
            },
            Ring::AtT1 => self.base.clone(),
            Ring::LowT(k) => {
                let mut m = self.base.markers().to_vec();
                m.push(Marker::centered("t", (*k).max(1)));
                MarkerSet::new(m)?
            }
        })
    }

    fn t_value(&self, ring: &Ring, target: &MarkerSet) -> Result<MultiSeries, SchemeError> {
        Ok(match ring {
            Ring::Full => MultiSeries::var(target, self.order, "t")?,
            Ring::AtT1 => MultiSeries::one(target, self.order),
            Ring::LowT(_) => {
                let mut mono = vec![0; target.len()];
                *mono.last_mut().unwrap() = 1;
                MultiSeries::monomial(target, self.order, 0, mono, Rational::one())?
            }
        })
    }

    fn inner_in(&self, ring: &Ring, target: &MarkerSet) -> Result<MultiSeries, SchemeError> {
        let order = self.order;
        match (self.inner, ring) {
            (InnerSeries::Full(s), Ring::Full) => Ok(s.truncate(order)),
            (InnerSeries::Full(s), Ring::AtT1) => {
                if s.markers().index_of("t").is_some() {
                    Ok(s.specialize("t", &Rational::one())?.truncate(order))
                } else {
                    Ok(s.truncate(order))
                }
            }
            (InnerSeries::Full(s), Ring::LowT(k)) => {
                let mut acc = MultiSeries::zero(target, order);
                let t = self.t_value(ring, target)?;
                let mut tk = MultiSeries::one(target, order);
                for j in 0..=*k {
                    let c = if s.markers().index_of("t").is_some() {
                        s.extract_t(j)?
                    } else if j == 0 {
                        s.clone()
                    } else {
                        break;
                    };
                    acc = acc.add(&c.truncate(order).embed(target)?.mul(&tk)?)?;
                    tk = tk.mul(&t)?;
                }
                Ok(acc)
            }
            (InnerSeries::Split { at_t1, .. }, Ring::AtT1) => Ok(at_t1.truncate(order)),
            (InnerSeries::Split { low, .. }, Ring::LowT(k)) => {
                if low.len() <= *k as usize {
                    return Err(SchemeError::NeedsFullInner);
                }
                let mut acc = MultiSeries::zero(target, order);
                let t = self.t_value(ring, target)?;
                let mut tk = MultiSeries::one(target, order);
                for c in low.iter().take(*k as usize + 1) {
                    acc = acc.add(&c.truncate(order).embed(target)?.mul(&tk)?)?;
                    tk = tk.mul(&t)?;
                }
                Ok(acc)
            }
            (InnerSeries::Split { .. }, Ring::Full) => Err(SchemeError::NeedsFullInner),
        }
    }

    pub fn eval(&self, e: &Expr, ring: &Ring) -> Result<MultiSeries, SchemeError> {
        let target = self.markers(ring)?;
        self.eval_in(e, ring, &target)
    }

    fn eval_in(&self, e: &Expr, ring: &Ring, target: &MarkerSet) -> Result<MultiSeries, SchemeError> {
        let order = self.order;
        Ok(match e {
            Expr::Z => MultiSeries::z(target, order),
            Expr::T => self.t_value(ring, target)?,
            Expr::Var(name) => {
                if target.index_of(name).is_some() && name != "t" {
                    MultiSeries::var(target, order, name)?
                } else {
                    MultiSeries::one(target, order)
                }
            }
            Expr::Const(c) => MultiSeries::constant(target, order, c.clone()),
            Expr::Inner => self.inner_in(ring, target)?,
            Expr::InnerAtT1 => self.inner_in(&Ring::AtT1, &self.base)?.embed(target)?,
            Expr::Add(a, b) => self.eval_in(a, ring, target)?.add(&self.eval_in(b, ring, target)?)?,
            Expr::Sub(a, b) => self.eval_in(a, ring, target)?.sub(&self.eval_in(b, ring, target)?)?,
            Expr::Mul(a, b) => self.eval_in(a, ring, target)?.mul(&self.eval_in(b, ring, target)?)?,
            Expr::Inv(a) => self.eval_in(a, ring, target)?.invert_unit()?,
            Expr::Pow(a, k) => self.eval_in(a, ring, target)?.pow(*k)?,
            Expr::AtT1(a) => {
                if matches!(ring, Ring::Full) && !a.uses_t() {
                    self.eval_in(a, ring, target)?
                } else {
                    self.eval_in(a, &Ring::AtT1, &self.base)?.embed(target)?
                }
            }
            Expr::ShiftFaces(base, shift) => self.shift_faces(base, *shift, ring, target)?,
            Expr::MapTerm(m) => self.map_term(m, ring, target)?,
        })
    }

    /// `b(t=1) + Σ_{k: k+shift tracked} [t^k]b · (x_{k+shift} − 1)`.
    fn shift_faces(&self, base: &Expr, shift: usize, ring: &Ring, target: &MarkerSet) -> Result<MultiSeries, SchemeError> {
        let order = self.order;
        let at1 = self.eval_in(&Expr::AtT1(Box::new(base.clone())), ring, target)?;
        let tracked: Vec<usize> = (shift.max(1)..=self.max_face)
            .filter(|j| self.base.index_of(&format!("x{j}")).is_some())
            .collect();
        let Some(&top) = tracked.last() else {
            return Ok(at1);
        };
        let kmax = (top - shift) as u32;
        // t-coefficients of the base
        let coeffs: Vec<MultiSeries> = match ring {
            Ring::Full => {
                let full = self.eval_in(base, ring, target)?;
                (0..=kmax)
                    .map(|k| -> Result<MultiSeries, SchemeError> { Ok(full.extract_t(k)?.embed(target)?) })
                    .collect::<Result<_, _>>()?
            }
            _ => {
                let low_ring = Ring::LowT(kmax);
                let low_markers = self.markers(&low_ring)?;
                let low = self.eval_in(base, &low_ring, &low_markers)?;
                (0..=kmax)
                    .map(|k| -> Result<MultiSeries, SchemeError> {
                        Ok(low.extract_marker("t", k)?.embed(target)?)
                    })
                    .collect::<Result<_, _>>()?
            }
        };
        let one = MultiSeries::one(target, order);
        let mut acc = at1;
        for j in tracked {
            let k = j - shift;
            let x = self.eval_in(&Expr::Var(format!("x{j}")), ring, target)?;
            acc = acc.add(&coeffs[k].mul(&x.sub(&one)?)?)?;
        }
        Ok(acc)
    }

    fn map_term(&self, m: &CombMap, ring: &Ring, target: &MarkerSet) -> Result<MultiSeries, SchemeError> {
        let st = stats(m, self.patterns);
        let mut term = MultiSeries::one(target, self.order).shift_z(m.size());
        for s in &self.inner_spec.stats {
            let e = statistic_value(&st, s) as u32;
            if e == 0 {
                continue;
            }
            let v = match s {
                Statistic::RootDegree => self.t_value(ring, target)?,
                _ => self.eval_in(&Expr::Var(s.marker_name()), ring, target)?,
            };
            term = term.mul(&v.pow(e)?)?;
        }
        Ok(term)
    }
}
