//! Exact truncated multivariate power series in `z` with rational coefficients
//! that are polynomials in a finite set of markers.
//!
//! A marker is either *raw* (the stored exponent is the exponent of `x`) or
//! *centered* (the stored exponent is the exponent of `s = x - 1`). Raw markers
//! carry a hard exponent bound: exceeding it is an error, never a silent clamp.
//! Centered markers are truncated at their bound, which is the ideal
//! `s^(max+1)` and therefore compatible with ring operations.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Rational = BigRational;
/// Exponent tuple, one entry per marker of the owning [`MarkerSet`].
pub type Mono = Vec<u32>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("marker sets differ")]
    MarkerMismatch,
    #[error("constant term is zero; series is not a unit")]
    ZeroConstantTerm,
    #[error("exponent {exp} of marker `{marker}` exceeds its bound {max}")]
    ExponentOverflow { marker: String, exp: u32, max: u32 },
    #[error("z-binding must have zero constant term")]
    ZValuation,
    #[error("z-exponent {n} beyond truncation order {order}")]
    OrderOutOfRange { n: usize, order: usize },
    #[error("functional is not contracting at z-degree {degree}")]
    NotContracting { degree: usize },
    #[error("unknown marker `{0}`")]
    UnknownMarker(String),
    #[error("invalid marker set: {0}")]
    InvalidMarkers(String),
    #[error("binding for centered marker `{0}` is not divisible by the centered target markers")]
    NonCenteredBinding(String),
    #[error("malformed series JSON: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, SeriesError>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Marker {
    pub name: String,
    pub max_exp: u32,
    #[serde(default)]
    pub centered: bool,
}

impl Marker {
    pub fn raw(name: impl Into<String>, max_exp: u32) -> Self {
        Marker { name: name.into(), max_exp, centered: false }
    }

    pub fn centered(name: impl Into<String>, max_exp: u32) -> Self {
        Marker { name: name.into(), max_exp, centered: true }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct MarkerSet {
    markers: Vec<Marker>,
}

impl MarkerSet {
    pub fn new(markers: Vec<Marker>) -> Result<Self> {
        for (i, m) in markers.iter().enumerate() {
            if m.max_exp == 0 {
                return Err(SeriesError::InvalidMarkers(format!("`{}` has bound 0", m.name)));
            }
            if markers[..i].iter().any(|o| o.name == m.name) {
                return Err(SeriesError::InvalidMarkers(format!("duplicate `{}`", m.name)));
            }
        }
        Ok(MarkerSet { markers })
    }

    pub fn empty() -> Self {
        MarkerSet::default()
    }

    pub fn len(&self) -> usize {
        self.markers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.markers.is_empty()
    }

    pub fn markers(&self) -> &[Marker] {
        &self.markers
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.markers.iter().position(|m| m.name == name)
    }

    pub fn names(&self) -> Vec<&str> {
        self.markers.iter().map(|m| m.name.as_str()).collect()
    }

    pub fn has_centered(&self) -> bool {
        self.markers.iter().any(|m| m.centered)
    }

    /// The same set with one marker removed.
    pub fn without(&self, name: &str) -> Result<MarkerSet> {
        let idx = self.index_of(name).ok_or_else(|| SeriesError::UnknownMarker(name.into()))?;
        let mut markers = self.markers.clone();
        markers.remove(idx);
        Ok(MarkerSet { markers })
    }

    fn unit(&self) -> Mono {
        vec![0; self.len()]
    }

    /// Multiply two monomials. `Ok(None)` means the product was truncated away
    /// by a centered marker.
    fn combine(&self, a: &[u32], b: &[u32]) -> Result<Option<Mono>> {
        let mut out = Vec::with_capacity(a.len());
        for ((m, &ea), &eb) in self.markers.iter().zip(a).zip(b) {
            let e = ea + eb;
            if e > m.max_exp {
                if m.centered {
                    return Ok(None);
                }
                return Err(SeriesError::ExponentOverflow {
                    marker: m.name.clone(),
                    exp: e,
                    max: m.max_exp,
                });
            }
            out.push(e);
        }
        Ok(Some(out))
    }
}

/// Truncated series `Σ_{n ≤ order} z^n P_n(markers)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiSeries {
    markers: MarkerSet,
    order: usize,
    coeffs: Vec<BTreeMap<Mono, Rational>>,
}

fn add_into(map: &mut BTreeMap<Mono, Rational>, key: Mono, c: Rational) {
    use std::collections::btree_map::Entry;
    match map.entry(key) {
        Entry::Vacant(v) => {
            if !c.is_zero() {
                v.insert(c);
            }
        }
        Entry::Occupied(mut o) => {
            *o.get_mut() += c;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

impl MultiSeries {
    pub fn zero(markers: &MarkerSet, order: usize) -> Self {
        MultiSeries { markers: markers.clone(), order, coeffs: vec![BTreeMap::new(); order + 1] }
    }

    pub fn constant(markers: &MarkerSet, order: usize, c: Rational) -> Self {
        let mut s = Self::zero(markers, order);
        add_into(&mut s.coeffs[0], markers.unit(), c);
        s
    }

    pub fn one(markers: &MarkerSet, order: usize) -> Self {
        Self::constant(markers, order, Rational::one())
    }

    /// The series `z` (zero when `order == 0`).
    pub fn z(markers: &MarkerSet, order: usize) -> Self {
        let mut s = Self::zero(markers, order);
        if order >= 1 {
            s.coeffs[1].insert(markers.unit(), Rational::one());
        }
        s
    }

    /// The value of marker `name` as a series: `x` for a raw marker and
    /// `1 + s` for a centered one.
    pub fn var(markers: &MarkerSet, order: usize, name: &str) -> Result<Self> {
        let idx = markers.index_of(name).ok_or_else(|| SeriesError::UnknownMarker(name.into()))?;
        let mut s = Self::zero(markers, order);
        let mut mono = markers.unit();
        mono[idx] = 1;
        s.coeffs[0].insert(mono, Rational::one());
        if markers.markers[idx].centered {
            add_into(&mut s.coeffs[0], markers.unit(), Rational::one());
        }
        Ok(s)
    }

    /// A single term `c · z^n · Π markers^mono`.
    pub fn monomial(markers: &MarkerSet, order: usize, n: usize, mono: Mono, c: Rational) -> Result<Self> {
        if mono.len() != markers.len() {
            return Err(SeriesError::MarkerMismatch);
        }
        if n > order {
            return Err(SeriesError::OrderOutOfRange { n, order });
        }
        for (m, &e) in markers.markers.iter().zip(&mono) {
            if e > m.max_exp {
                return Err(SeriesError::ExponentOverflow { marker: m.name.clone(), exp: e, max: m.max_exp });
            }
        }
        let mut s = Self::zero(markers, order);
        add_into(&mut s.coeffs[n], mono, c);
        Ok(s)
    }

    /// Sum of terms `c · z^n · Π markers^mono`; exponents are bounds-checked.
    pub fn from_terms(
        markers: &MarkerSet,
        order: usize,
        terms: impl IntoIterator<Item = (usize, Mono, Rational)>,
    ) -> Result<Self> {
        let mut s = Self::zero(markers, order);
        for (n, mono, c) in terms {
            if mono.len() != markers.len() {
                return Err(SeriesError::MarkerMismatch);
            }
            if n > order {
                return Err(SeriesError::OrderOutOfRange { n, order });
            }
            for (m, &e) in markers.markers.iter().zip(&mono) {
                if e > m.max_exp {
                    return Err(SeriesError::ExponentOverflow { marker: m.name.clone(), exp: e, max: m.max_exp });
                }
            }
            add_into(&mut s.coeffs[n], mono, c);
        }
        Ok(s)
    }

    /// Univariate (marker-free) series from a coefficient list starting at `z^0`.
    pub fn from_coeffs(coeffs: &[Rational], order: usize) -> Self {
        let markers = MarkerSet::empty();
        let mut s = Self::zero(&markers, order);
        for (n, c) in coeffs.iter().enumerate().take(order + 1) {
            add_into(&mut s.coeffs[n], Vec::new(), c.clone());
        }
        s
    }

    pub fn markers(&self) -> &MarkerSet {
        &self.markers
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// All terms of degree `n` in `z`.
    pub fn degree_terms(&self, n: usize) -> &BTreeMap<Mono, Rational> {
        &self.coeffs[n]
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, &Mono, &Rational)> {
        self.coeffs.iter().enumerate().flat_map(|(n, m)| m.iter().map(move |(k, c)| (n, k, c)))
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.iter().map(|m| m.len()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|m| m.is_empty())
    }

    /// Lowest `z`-degree carrying a nonzero term.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|m| !m.is_empty())
    }

    pub fn constant_term(&self) -> Rational {
        self.coeffs[0].get(&self.markers.unit()).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order);
        MultiSeries { markers: self.markers.clone(), order, coeffs: self.coeffs[..=order].to_vec() }
    }

    fn check_markers(&self, other: &Self) -> Result<()> {
        if self.markers != other.markers {
            return Err(SeriesError::MarkerMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_markers(other)?;
        let order = self.order.min(other.order);
        let mut out = self.truncate(order);
        for (n, m) in other.coeffs.iter().enumerate().take(order + 1) {
            for (k, c) in m {
                add_into(&mut out.coeffs[n], k.clone(), c.clone());
            }
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for m in &mut out.coeffs {
            for c in m.values_mut() {
                *c = -c.clone();
            }
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(&self.markers, self.order);
        }
        let mut out = self.clone();
        for m in &mut out.coeffs {
            for v in m.values_mut() {
                *v *= c;
            }
        }
        out
    }

    /// Multiply by `z^k`, dropping what falls beyond the order.
    pub fn shift_z(&self, k: usize) -> Self {
        let mut out = Self::zero(&self.markers, self.order);
        for n in 0..=self.order {
            if n + k <= self.order {
                out.coeffs[n + k] = self.coeffs[n].clone();
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_markers(other)?;
        let order = self.order.min(other.order);
        let mut out = Self::zero(&self.markers, order);
        for (na, ma) in self.coeffs.iter().enumerate().take(order + 1) {
            if ma.is_empty() {
                continue;
            }
            for (nb, mb) in other.coeffs.iter().enumerate().take(order + 1 - na) {
                for (ka, ca) in ma {
                    for (kb, cb) in mb {
                        if let Some(k) = self.markers.combine(ka, kb)? {
                            add_into(&mut out.coeffs[na + nb], k, ca * cb);
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, mut k: u32) -> Result<Self> {
        let mut acc = Self::one(&self.markers, self.order);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Integer power; negative exponents go through [`MultiSeries::invert_unit`].
    pub fn powi(&self, k: i64) -> Result<Self> {
        if k >= 0 {
            self.pow(k as u32)
        } else {
            self.invert_unit()?.pow((-k) as u32)
        }
    }

    /// Multiplicative inverse. Requires the constant term (at `z^0` and all
    /// marker exponents zero) to be nonzero, and the `z^0` part to be that
    /// constant alone unless every other `z^0` term is nilpotent through a
    /// centered marker.
    pub fn invert_unit(&self) -> Result<Self> {
        let c0 = self.constant_term();
        if c0.is_zero() {
            return Err(SeriesError::ZeroConstantTerm);
        }
        // a = c0 (1 + e), 1/a = (1/c0) Σ (-e)^j; e is nilpotent in the truncated ring.
        let inv_c0 = c0.recip();
        let one = Self::one(&self.markers, self.order);
        let e = self.scale(&inv_c0).sub(&one)?;
        let centered: Vec<usize> =
            (0..self.markers.len()).filter(|&i| self.markers.markers[i].centered).collect();
        if e.coeffs[0].keys().any(|m| !centered.iter().any(|&i| m[i] > 0)) {
            // z^0 carries raw-marker terms: the geometric series would not terminate.
            return Err(SeriesError::ZeroConstantTerm);
        }
        let neg_e = e.neg();
        let mut acc = one.clone();
        let mut term = one;
        loop {
            term = term.mul(&neg_e)?;
            if term.is_zero() {
                break;
            }
            acc = acc.add(&term)?;
        }
        Ok(acc.scale(&inv_c0))
    }

    /// Coefficient of `z^n · markers^mono`.
    pub fn coeff(&self, n: usize, mono: &[u32]) -> Result<Rational> {
        if n > self.order {
            return Err(SeriesError::OrderOutOfRange { n, order: self.order });
        }
        if mono.len() != self.markers.len() {
            return Err(SeriesError::MarkerMismatch);
        }
        Ok(self.coeffs[n].get(mono).cloned().unwrap_or_else(Rational::zero))
    }

    /// Sum of all coefficients at `z^n` (every marker set to 1 in its stored
    /// coordinate, so for a centered marker this is `s = 1`).
    pub fn degree_sum(&self, n: usize) -> Rational {
        self.coeffs[n].values().fold(Rational::zero(), |a, c| a + c)
    }

    /// The `[t^k]` operator: keep terms whose exponent of `t` equals `k` and
    /// drop the marker `t`.
    pub fn extract_marker(&self, t: &str, k: u32) -> Result<Self> {
        let idx = self.markers.index_of(t).ok_or_else(|| SeriesError::UnknownMarker(t.into()))?;
        if k > self.markers.markers[idx].max_exp {
            return Err(SeriesError::ExponentOverflow {
                marker: t.into(),
                exp: k,
                max: self.markers.markers[idx].max_exp,
            });
        }
        let markers = self.markers.without(t)?;
        let mut out = Self::zero(&markers, self.order);
        for (n, m) in self.coeffs.iter().enumerate() {
            for (mono, c) in m {
                if mono[idx] == k {
                    let mut key = mono.clone();
                    key.remove(idx);
                    out.coeffs[n].insert(key, c.clone());
                }
            }
        }
        Ok(out)
    }

    pub fn extract_t(&self, k: u32) -> Result<Self> {
        self.extract_marker("t", k)
    }

    /// Set marker `name` to the rational value `value` and remove it.
    /// For a centered marker this sets `s = value - 1`; when the marker is
    /// truncated the result is exact only modulo the truncation.
    pub fn specialize(&self, name: &str, value: &Rational) -> Result<Self> {
        let idx = self.markers.index_of(name).ok_or_else(|| SeriesError::UnknownMarker(name.into()))?;
        let base = if self.markers.markers[idx].centered { value - Rational::one() } else { value.clone() };
        let max = self.markers.markers[idx].max_exp as usize;
        let mut powers = Vec::with_capacity(max + 1);
        let mut p = Rational::one();
        for _ in 0..=max {
            powers.push(p.clone());
            p *= &base;
        }
        let markers = self.markers.without(name)?;
        let mut out = Self::zero(&markers, self.order);
        for (n, m) in self.coeffs.iter().enumerate() {
            for (mono, c) in m {
                let w = c * &powers[mono[idx] as usize];
                let mut key = mono.clone();
                key.remove(idx);
                add_into(&mut out.coeffs[n], key, w);
            }
        }
        Ok(out)
    }

    /// Rewrite the series over a different marker set by name. Markers absent
    /// from `target` must not occur in the series; markers absent from the
    /// source are introduced with exponent 0. Centering must agree.
    pub fn embed(&self, target: &MarkerSet) -> Result<Self> {
        let mut map = Vec::with_capacity(self.markers.len());
        for m in &self.markers.markers {
            map.push(target.index_of(&m.name).map(|j| {
                let tm = &target.markers[j];
                (j, tm.centered == m.centered)
            }));
        }
        let mut out = Self::zero(target, self.order);
        for (n, terms) in self.coeffs.iter().enumerate() {
            for (mono, c) in terms {
                let mut key = target.unit();
                for (i, &e) in mono.iter().enumerate() {
                    if e == 0 {
                        continue;
                    }
                    match map[i] {
                        Some((j, true)) => {
                            if e > target.markers[j].max_exp {
                                if target.markers[j].centered {
                                    key.clear();
                                    break;
                                }
                                return Err(SeriesError::ExponentOverflow {
                                    marker: target.markers[j].name.clone(),
                                    exp: e,
                                    max: target.markers[j].max_exp,
                                });
                            }
                            key[j] = e;
                        }
                        Some((_, false)) => return Err(SeriesError::MarkerMismatch),
                        None => return Err(SeriesError::UnknownMarker(self.markers.markers[i].name.clone())),
                    }
                }
                if key.len() == target.len() {
                    add_into(&mut out.coeffs[n], key, c.clone());
                }
            }
        }
        Ok(out)
    }

    /// Switch marker `name` between raw and centered coordinates
    /// (`x = 1 + s`). Going raw → centered may truncate at the bound.
    pub fn recenter(&self, name: &str, centered: bool) -> Result<Self> {
        let idx = self.markers.index_of(name).ok_or_else(|| SeriesError::UnknownMarker(name.into()))?;
        if self.markers.markers[idx].centered == centered {
            return Ok(self.clone());
        }
        let mut markers = self.markers.clone();
        markers.markers[idx].centered = centered;
        // x^e = Σ C(e,j) s^j and s^e = Σ C(e,j) (-1)^(e-j) x^j.
        let mut out = Self::zero(&markers, self.order);
        for (n, terms) in self.coeffs.iter().enumerate() {
            for (mono, c) in terms {
                let e = mono[idx];
                let mut binom = BigInt::one();
                for j in 0..=e {
                    if j > 0 {
                        binom = binom * BigInt::from(e - j + 1) / BigInt::from(j);
                    }
                    if j > markers.markers[idx].max_exp {
                        if centered {
                            break;
                        }
                        return Err(SeriesError::ExponentOverflow {
                            marker: name.into(),
                            exp: j,
                            max: markers.markers[idx].max_exp,
                        });
                    }
                    let mut w = c * Rational::from_integer(binom.clone());
                    if !centered && (e - j) % 2 == 1 {
                        w = -w;
                    }
                    let mut key = mono.clone();
                    key[idx] = j;
                    add_into(&mut out.coeffs[n], key, w);
                }
            }
        }
        Ok(out)
    }

    /// Composition. Every marker of `self` is replaced by its binding (given as
    /// the *value* of the marker, i.e. `x ← v`) or, when unbound, by the
    /// same-named marker of `target`. If `z_binding` is given it must have
    /// zero constant term and replaces `z`.
    ///
    /// When `self` stores a marker centered, the binding enters through
    /// `v - 1`; if `target` truncates centered markers, `v - 1` must then lie
    /// in the ideal they generate so that the truncation stays exact.
    pub fn substitute(
        &self,
        target: &MarkerSet,
        bindings: &[(String, MultiSeries)],
        z_binding: Option<&MultiSeries>,
    ) -> Result<MultiSeries> {
        for (name, b) in bindings {
            if self.markers.index_of(name).is_none() {
                return Err(SeriesError::UnknownMarker(name.clone()));
            }
            if b.markers != *target {
                return Err(SeriesError::MarkerMismatch);
            }
        }
        let mut order = self.order;
        for (_, b) in bindings {
            order = order.min(b.order);
        }
        if let Some(zb) = z_binding {
            if zb.markers != *target {
                return Err(SeriesError::MarkerMismatch);
            }
            if !zb.coeffs[0].is_empty() {
                return Err(SeriesError::ZValuation);
            }
            order = order.min(zb.order);
        } else {
            // z is unchanged, so the outer order bounds the result directly
            order = order.min(self.order);
        }

        // Base series for each outer marker: the value, or value - 1 if centered.
        let one = MultiSeries::one(target, order);
        let mut bases = Vec::with_capacity(self.markers.len());
        for m in &self.markers.markers {
            let value = match bindings.iter().find(|(n, _)| *n == m.name) {
                Some((_, b)) => b.truncate(order),
                None => MultiSeries::var(target, order, &m.name)?,
            };
            let base = if m.centered { value.sub(&one)? } else { value };
            if m.centered && target.has_centered() && !base.in_centered_ideal() {
                return Err(SeriesError::NonCenteredBinding(m.name.clone()));
            }
            bases.push(base);
        }
        let zbase = match z_binding {
            Some(zb) => zb.truncate(order),
            None => MultiSeries::z(target, order),
        };

        let mut cache: Vec<PowerCache> = bases.into_iter().map(PowerCache::new).collect();
        let mut zcache = vec![one.clone()];
        let mut out = MultiSeries::zero(target, order);
        for (n, terms) in self.coeffs.iter().enumerate() {
            if terms.is_empty() {
                continue;
            }
            // y^n contributes at z-degree ≥ n; beyond `order` nothing survives
            if n > order {
                break;
            }
            while zcache.len() <= n {
                let next = zcache.last().unwrap().mul(&zbase)?;
                zcache.push(next);
            }
            let Some(val) = zcache[n].valuation() else {
                continue;
            };
            // the marker part is only needed up to what y^n leaves room for
            let room = order - val.min(order);
            let mut degree_sum = MultiSeries::zero(target, room);
            for (mono, c) in terms {
                let mut prod = MultiSeries::constant(target, room, c.clone());
                for (i, &e) in mono.iter().enumerate() {
                    if e == 0 {
                        continue;
                    }
                    prod = prod.mul(&cache[i].get(e, room)?)?;
                    if prod.is_zero() {
                        break;
                    }
                }
                degree_sum = degree_sum.add(&prod)?;
            }
            out.accumulate_product(&degree_sum, &zcache[n])?;
        }
        Ok(out)
    }

    /// `self += a·b` up to `self.order`, trusting the caller that the product
    /// is determined there (e.g. `b` has large enough valuation).
    pub fn accumulate_product(&mut self, a: &Self, b: &Self) -> Result<()> {
        let order = self.order;
        for (na, ma) in a.coeffs.iter().enumerate().take(order + 1) {
            if ma.is_empty() {
                continue;
            }
            for (nb, mb) in b.coeffs.iter().enumerate().take(order + 1 - na) {
                for (ka, ca) in ma {
                    for (kb, cb) in mb {
                        if let Some(k) = self.markers.combine(ka, kb)? {
                            add_into(&mut self.coeffs[na + nb], k, ca * cb);
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// True when every term has positive total degree in centered markers.
    fn in_centered_ideal(&self) -> bool {
        let centered: Vec<usize> = (0..self.markers.len()).filter(|&i| self.markers.markers[i].centered).collect();
        self.terms().all(|(_, mono, _)| centered.iter().any(|&i| mono[i] > 0))
    }

    /// Solve `Y = Φ(Y)` to order `order` by iteration from `Y = 0`.
    ///
    /// Φ must be contracting in the z-adic sense: `[z^n]Φ(Y)` may depend only
    /// on coefficients of `Y` of z-degree below `n`. Each iteration then fixes
    /// one more degree, so `order + 1` iterations suffice; anything still
    /// moving after that is reported as non-contracting.
    pub fn fixed_point<F>(markers: &MarkerSet, order: usize, phi: F) -> Result<MultiSeries>
    where
        F: Fn(&MultiSeries) -> Result<MultiSeries>,
    {
        let mut y = MultiSeries::zero(markers, order);
        for _ in 0..order + 3 {
            let next = phi(&y)?.truncate(order);
            if next.order < order {
                return Err(SeriesError::OrderOutOfRange { n: order, order: next.order });
            }
            if next == y {
                return Ok(y);
            }
            y = next;
        }
        let again = phi(&y)?.truncate(order);
        let degree = (0..=order).find(|&n| again.coeffs[n] != y.coeffs[n]).unwrap_or(order);
        Err(SeriesError::NotContracting { degree })
    }

    /// Maximum absolute value over all coefficients (zero for the zero series).
    pub fn max_abs_coeff(&self) -> Rational {
        self.terms().map(|(_, _, c)| c.abs()).max().unwrap_or_else(Rational::zero)
    }

    /// First nonzero term in canonical order.
    pub fn first_term(&self) -> Option<(usize, Mono, Rational)> {
        self.terms().next().map(|(n, m, c)| (n, m.clone(), c.clone()))
    }

    /// Canonical JSON: terms sorted by `(n, exponents)`.
    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self
            .terms()
            .map(|(n, mono, c)| serde_json::json!([n, mono, format_rational(c)]))
            .collect();
        serde_json::json!({
            "markers": self.markers.markers,
            "order": self.order,
            "terms": terms,
        })
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let bad = |m: &str| SeriesError::Json(m.to_string());
        let markers: Vec<Marker> = serde_json::from_value(value.get("markers").cloned().ok_or_else(|| bad("markers"))?)
            .map_err(|e| SeriesError::Json(e.to_string()))?;
        let markers = MarkerSet::new(markers)?;
        let order = value.get("order").and_then(|o| o.as_u64()).ok_or_else(|| bad("order"))? as usize;
        let mut s = MultiSeries::zero(&markers, order);
        for t in value.get("terms").and_then(|t| t.as_array()).ok_or_else(|| bad("terms"))? {
            let arr = t.as_array().ok_or_else(|| bad("term"))?;
            if arr.len() != 3 {
                return Err(bad("term arity"));
            }
            let n = arr[0].as_u64().ok_or_else(|| bad("term degree"))? as usize;
            let mono: Mono = serde_json::from_value(arr[1].clone()).map_err(|e| SeriesError::Json(e.to_string()))?;
            let c = parse_rational(arr[2].as_str().ok_or_else(|| bad("coefficient"))?).ok_or_else(|| bad("coefficient"))?;
            let single = MultiSeries::monomial(&markers, order, n, mono, c)?;
            s = s.add(&single)?;
        }
        Ok(s)
    }
}

/// Powers of one series, each kept at the order it was last needed.
/// Asking for a lower order than before reuses the stored power; powers are
/// built at the requested order so raw marker bounds are not exceeded by
/// terms that would be truncated anyway.
pub struct PowerCache {
    base: MultiSeries,
    powers: Vec<MultiSeries>,
}

impl PowerCache {
    pub fn new(base: MultiSeries) -> Self {
        let one = MultiSeries::one(&base.markers, base.order);
        PowerCache { base, powers: vec![one] }
    }

    /// `base^e` to order `order` (at most the order of the base).
    pub fn get(&mut self, e: u32, order: usize) -> Result<MultiSeries> {
        let order = order.min(self.base.order);
        let e = e as usize;
        let mut j = e.min(self.powers.len() - 1);
        while j > 0 && self.powers[j].order < order {
            j -= 1;
        }
        if j == e {
            return Ok(self.powers[e].truncate(order));
        }
        let base = self.base.truncate(order);
        let mut p = self.powers[j].truncate(order);
        for i in j + 1..=e {
            p = p.mul(&base)?;
            if i < self.powers.len() {
                self.powers[i] = p.clone();
            } else {
                self.powers.push(p.clone());
            }
        }
        Ok(p)
    }
}

pub fn format_rational(c: &Rational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                return None;
            }
            Some(Rational::new(p.trim().parse().ok()?, q))
        }
        None => Some(Rational::from_integer(s.parse().ok()?)),
    }
}

impl fmt::Display for MultiSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (n, mono, c) in self.terms() {
            let mut factors = Vec::new();
            if n == 1 {
                factors.push("z".to_string());
            } else if n > 1 {
                factors.push(format!("z^{n}"));
            }
            for (m, &e) in self.markers.markers.iter().zip(mono) {
                let name = if m.centered { format!("({}-1)", m.name) } else { m.name.clone() };
                match e {
                    0 => {}
                    1 => factors.push(name),
                    _ => factors.push(format!("{name}^{e}")),
                }
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            if factors.is_empty() {
                write!(f, "{}", format_rational(&mag))?;
            } else if mag.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{}*{}", format_rational(&mag), factors.join("*"))?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(z^{})", self.order + 1)
    }
}
