//! All rooted planar maps by root-edge decomposition, with the root-face
//! degree `t` as catalytic variable.
//!
//! Writing `F = 1 + M1` (the vertex map included), removing the root edge
//! either splits the map in two at an isthmus, whose root faces merge into the
//! new root face, or deletes a chord from the root corner to a corner of the
//! root face, which closes a non-root face:
//!
//! ```text
//! F = 1 + z t² F² + z Σ_{n,d} f_{n,d} zⁿ Σ_{j=0}^{d} t^{j+1} x_{d+1−j}
//! ```
//!
//! A closed face never changes degree again, so untracked degrees can be
//! given weight 1 as soon as they are closed.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::series::{Marker, MarkerSet, MultiSeries, Rational, SeriesError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TutteError {
    #[error("face degree {degree} is not tracked; bipartite restriction needs x1..x{needed}")]
    Lumped { degree: usize, needed: usize },
    #[error("series has no root-degree marker `t`")]
    NoCatalytic,
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Markers `t, x1, …, x_D` with bounds fit for maps of size `order`.
pub fn catalytic_markers(order: usize, max_degree: usize) -> Result<MarkerSet, SeriesError> {
    let bound = (2 * order + 2) as u32;
    let mut m = vec![Marker::raw("t", bound)];
    m.extend((1..=max_degree).map(|l| Marker::raw(format!("x{l}"), bound)));
    MarkerSet::new(m)
}

/// `M1(z, t; x_1..x_D)` to order `order`, without the vertex map. Faces of
/// degree above `max_degree` are not marked.
pub fn solve_m1(order: usize, max_degree: usize) -> Result<MultiSeries, SeriesError> {
    let markers = catalytic_markers(order, max_degree)?;
    let z = MultiSeries::z(&markers, order);
    let t = MultiSeries::var(&markers, order, "t")?;
    let zt2 = z.mul(&t.pow(2)?)?;
    let one = MultiSeries::one(&markers, order);
    let f = MultiSeries::fixed_point(&markers, order, |f| {
        let isthmus = zt2.mul(&f.mul(f)?)?;
        let chord = close_root_face(f, max_degree)?.shift_z(1);
        one.add(&isthmus)?.add(&chord)
    })?;
    f.sub(&one)
}

/// The linear chord operator `t^d ↦ Σ_{j=0}^{d} t^{j+1} x_{d+1−j}`.
fn close_root_face(f: &MultiSeries, max_degree: usize) -> Result<MultiSeries, SeriesError> {
    let mut terms = Vec::new();
    for (n, mono, c) in f.terms() {
        let d = mono[0] as usize;
        for j in 0..=d {
            let closed = d + 1 - j;
            let mut m = mono.clone();
            m[0] = (j + 1) as u32;
            if closed <= max_degree {
                m[closed] += 1;
            }
            terms.push((n, m, c.clone()));
        }
    }
    MultiSeries::from_terms(f.markers(), f.order(), terms)
}

/// Keep only maps whose faces all have even degree, which for planar maps is
/// the same as being bipartite. Every odd degree up to `2·order` must be
/// tracked, otherwise odd faces would be invisible.
pub fn restrict_bipartite(f: &MultiSeries) -> Result<MultiSeries, TutteError> {
    let markers = f.markers();
    let t = markers.index_of("t").ok_or(TutteError::NoCatalytic)?;
    let needed = 2 * f.order();
    let mut odd = Vec::new();
    for l in (1..=needed).step_by(2) {
        let idx = markers.index_of(&format!("x{l}")).ok_or(TutteError::Lumped { degree: l, needed })?;
        odd.push(idx);
    }
    let terms = f
        .terms()
        .filter(|(_, mono, _)| mono[t] % 2 == 0 && odd.iter().all(|&i| mono[i] == 0))
        .map(|(n, mono, c)| (n, mono.clone(), c.clone()));
    Ok(MultiSeries::from_terms(markers, f.order(), terms)?)
}

/// Coefficient ring of the dense recursion.
pub trait DpCoeff: Clone + Send + Sync {
    fn zero_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn add_assign(&mut self, other: &Self);
    fn mul(&self, other: &Self) -> Self;
}

impl DpCoeff for BigInt {
    fn zero_like(&self) -> Self {
        BigInt::zero()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add_assign(&mut self, other: &Self) {
        *self += other;
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
}

/// Integer polynomial in one variable `s`, truncated above degree `len − 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncPoly(pub Vec<BigInt>);

impl TruncPoly {
    pub fn constant(c: i64, len: usize) -> Self {
        let mut v = vec![BigInt::zero(); len];
        v[0] = BigInt::from(c);
        TruncPoly(v)
    }

    /// `1 + s`.
    pub fn one_plus_s(len: usize) -> Self {
        let mut p = Self::constant(1, len);
        if len > 1 {
            p.0[1] = BigInt::one();
        }
        p
    }
}

impl DpCoeff for TruncPoly {
    fn zero_like(&self) -> Self {
        TruncPoly(vec![BigInt::zero(); self.0.len()])
    }
    fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }
    fn add_assign(&mut self, other: &Self) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += b;
        }
    }
    fn mul(&self, other: &Self) -> Self {
        let k = self.0.len();
        let mut out = vec![BigInt::zero(); k];
        for (i, a) in self.0.iter().enumerate() {
            if Zero::is_zero(a) {
                continue;
            }
            for (j, b) in other.0.iter().enumerate().take(k - i) {
                out[i + j] += a * b;
            }
        }
        TruncPoly(out)
    }
}

/// Table `g[n][d]` of the recursion, scaled so that the isthmus term carries
/// a ring constant `isthmus` and closing a face of degree `l` multiplies by
/// `weight(l)`. With `isthmus = 1` this is `[zⁿ t^d]F` itself.
pub fn catalytic_table<C: DpCoeff>(order: usize, one: &C, isthmus: &C, weight: impl Fn(usize) -> C) -> Vec<Vec<C>> {
    let zero = one.zero_like();
    let weights: Vec<C> = (0..=2 * order + 1).map(&weight).collect();
    let mut g: Vec<Vec<C>> = vec![vec![one.clone()]];
    for n in 1..=order {
        let prev = &g;
        let mut row: Vec<C> = (0..=2 * n)
            .into_par_iter()
            .map(|d| {
                let mut acc = zero.clone();
                if d < 2 {
                    return acc;
                }
                let rest = d - 2;
                for a in 0..n {
                    let b = n - 1 - a;
                    let (ga, gb) = (&prev[a], &prev[b]);
                    let lo = rest.saturating_sub(gb.len() - 1);
                    let hi = rest.min(ga.len() - 1);
                    for d1 in lo..=hi {
                        let (x, y) = (&ga[d1], &gb[rest - d1]);
                        if !x.is_zero() && !y.is_zero() {
                            acc.add_assign(&x.mul(y));
                        }
                    }
                }
                if acc.is_zero() {
                    acc
                } else {
                    acc.mul(isthmus)
                }
            })
            .collect();
        for (d, c) in g[n - 1].iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for j in 0..=d {
                row[j + 1].add_assign(&c.mul(&weights[d + 1 - j]));
            }
        }
        g.push(row);
    }
    g
}

/// Counts `[zⁿ]M1` at `t = 1` with face weights `x_l = weight(l)`, for
/// `n = 0..=order` (entry 0 is 0). With `bipartite`, only maps whose faces
/// are all even are kept.
pub fn m1_counts(order: usize, weight: impl Fn(usize) -> Rational, bipartite: bool) -> Vec<Rational> {
    let ws: Vec<Rational> = (0..=2 * order + 1)
        .map(|l| if bipartite && l % 2 == 1 { Rational::zero() } else { weight(l) })
        .collect();
    // common denominator q: run the recursion on integers g = f·qⁿ
    let q = ws.iter().fold(BigInt::one(), |acc, w| num_integer::lcm(acc, w.denom().clone()));
    let num: Vec<BigInt> = ws.iter().map(|w| w.numer() * (&q / w.denom())).collect();
    let g = catalytic_table(order, &BigInt::one(), &q, |l| num[l].clone());
    let mut qn = BigInt::one();
    let mut out = vec![Rational::zero()];
    for row in g.iter().skip(1) {
        qn *= &q;
        let sum: BigInt = row.iter().enumerate().filter(|(d, _)| !bipartite || d % 2 == 0).map(|(_, c)| c).sum();
        out.push(Rational::new(sum, qn.clone()));
    }
    out
}

/// `M1` with one centered marker `s = x − 1` on the faces whose degree is in
/// `tracked`, truncated above `s^cap`.
///
/// Returns the series at `t = 1` and the coefficients `[t^k]` for
/// `k = 0..=t_cap`, all over markers `{name}` (centered, bound `cap`). The
/// vertex map is excluded throughout, so `[t^0]` vanishes.
pub fn m1_centered(
    order: usize,
    tracked: &[usize],
    name: &str,
    cap: u32,
    t_cap: usize,
    bipartite: bool,
) -> Result<(MultiSeries, Vec<MultiSeries>), SeriesError> {
    let len = cap as usize + 1;
    let one = TruncPoly::constant(1, len);
    let weight = |l: usize| {
        if bipartite && l % 2 == 1 {
            TruncPoly::constant(0, len)
        } else if tracked.contains(&l) {
            TruncPoly::one_plus_s(len)
        } else {
            TruncPoly::constant(1, len)
        }
    };
    let g = catalytic_table(order, &one, &one, weight);
    let markers = MarkerSet::new(vec![Marker::centered(name, cap)])?;
    let as_terms = |n: usize, p: &TruncPoly| -> Vec<(usize, Vec<u32>, Rational)> {
        p.0.iter()
            .enumerate()
            .filter(|(_, c)| !Zero::is_zero(*c))
            .map(|(e, c)| (n, vec![e as u32], Rational::from_integer(c.clone())))
            .collect()
    };
    let mut at1 = Vec::new();
    for (n, row) in g.iter().enumerate().skip(1) {
        let mut sum = one.zero_like();
        for (d, c) in row.iter().enumerate() {
            if !bipartite || d % 2 == 0 {
                sum.add_assign(c);
            }
        }
        at1.extend(as_terms(n, &sum));
    }
    let at1 = MultiSeries::from_terms(&markers, order, at1)?;
    let mut low = Vec::new();
    for k in 0..=t_cap {
        let mut terms = Vec::new();
        if !(bipartite && k % 2 == 1) {
            for (n, row) in g.iter().enumerate().skip(1) {
                if let Some(c) = row.get(k) {
                    terms.extend(as_terms(n, c));
                }
            }
        }
        low.push(MultiSeries::from_terms(&markers, order, terms)?);
    }
    Ok((at1, low))
}
