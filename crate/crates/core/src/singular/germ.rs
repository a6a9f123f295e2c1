//! Local data of 3/2-singular germs and the two operations on them: inverting
//! a germ, and transferring a pair of germs `u = f1(z,x)`, `v = f2(z,x)` to
//! germs of `z` and `x` in the new variables `(u, v)`.
//!
//! Convention: a germ with side `σ` stands for
//! `a0 + a2 (z − ρ) + a3 |z − ρ|^{3/2} + a4 (z − ρ)^2`, valid for `σ(z − ρ) ≥ 0`.
//! The usual generating-function case is `σ = −1`, where the 3/2 term is
//! `(ρ − z)^{3/2}`. With a positive linear coefficient every formula below
//! coincides with the purely formal one, e.g. `A3 = −a3 / a2^{5/2}`.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::SingularError;
use crate::series::Rational;

/// Coefficient field for germ data.
pub trait Scalar: Clone + Debug + PartialEq + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self> {
    fn from_i64(n: i64) -> Self;
    /// `None` on division by zero.
    fn checked_div(&self, other: &Self) -> Option<Self>;
    /// Exact zero test, or a relative tolerance against `scale` for floats.
    fn negligible(&self, scale: &Self) -> bool;
    fn signum(&self) -> i32;
    /// Square root of a nonnegative value; `None` when not representable.
    fn sqrt(&self) -> Option<Self>;
    fn to_f64(&self) -> f64;
}

impl Scalar for f64 {
    fn from_i64(n: i64) -> Self {
        n as f64
    }
    fn checked_div(&self, other: &Self) -> Option<Self> {
        (*other != 0.0).then(|| self / other)
    }
    fn negligible(&self, scale: &Self) -> bool {
        self.abs() <= 1e-12 * scale.abs()
    }
    fn signum(&self) -> i32 {
        if *self > 0.0 {
            1
        } else if *self < 0.0 {
            -1
        } else {
            0
        }
    }
    fn sqrt(&self) -> Option<Self> {
        (*self >= 0.0).then(|| f64::sqrt(*self))
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for Rational {
    fn from_i64(n: i64) -> Self {
        Rational::from_integer(BigInt::from(n))
    }
    fn checked_div(&self, other: &Self) -> Option<Self> {
        (!other.is_zero()).then(|| self / other)
    }
    fn negligible(&self, _scale: &Self) -> bool {
        self.is_zero()
    }
    fn signum(&self) -> i32 {
        if self.is_positive() {
            1
        } else if self.is_negative() {
            -1
        } else {
            0
        }
    }
    fn sqrt(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let (n, d) = (self.numer(), self.denom());
        let (rn, rd) = (n.sqrt(), d.sqrt());
        (&rn * &rn == *n && &rd * &rd == *d).then(|| Rational::new(rn, rd))
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// Truncated power series in a local variable, coefficient `k` of `w^k`.
/// A scalar is a series of length one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Local<S>(pub Vec<S>);

impl<S: Scalar> Local<S> {
    pub fn constant(c: S, len: usize) -> Self {
        let mut v = vec![S::from_i64(0); len.max(1)];
        v[0] = c;
        Local(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn value(&self) -> &S {
        &self.0[0]
    }

    fn coeff(&self, k: usize) -> S {
        self.0.get(k).cloned().unwrap_or_else(|| S::from_i64(0))
    }

    /// Zero-padded or truncated to `len` coefficients.
    pub fn resize(&self, len: usize) -> Self {
        Local((0..len.max(1)).map(|k| self.coeff(k)).collect())
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.len().min(o.len());
        Local((0..n).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.len().min(o.len());
        Local((0..n).map(|k| self.coeff(k) - o.coeff(k)).collect())
    }

    pub fn scale(&self, c: &S) -> Self {
        Local(self.0.iter().map(|a| a.clone() * c.clone()).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.len().min(o.len());
        Local(
            (0..n)
                .map(|k| (0..=k).fold(S::from_i64(0), |acc, i| acc + self.0[i].clone() * o.0[k - i].clone()))
                .collect(),
        )
    }

    pub fn inv(&self) -> Option<Self> {
        let c0 = self.0[0].clone();
        let mut out = vec![S::from_i64(1).checked_div(&c0)?];
        for k in 1..self.len() {
            let s = (1..=k).fold(S::from_i64(0), |acc, i| acc + self.0[i].clone() * out[k - i].clone());
            out.push((-s).checked_div(&c0)?);
        }
        Some(Local(out))
    }

    pub fn div(&self, o: &Self) -> Option<Self> {
        Some(self.mul(&o.inv()?))
    }

    /// Square root with positive constant term.
    pub fn sqrt(&self) -> Option<Self> {
        let r0 = self.0[0].sqrt()?;
        let two_r0 = r0.clone() + r0.clone();
        let mut out = vec![r0];
        for k in 1..self.len() {
            let s = (1..k).fold(S::from_i64(0), |acc, i| acc + out[i].clone() * out[k - i].clone());
            out.push((self.0[k].clone() - s).checked_div(&two_r0)?);
        }
        Some(Local(out))
    }

    /// `|a|^{3/2}`, where the sign of `a` is read off its constant term.
    pub fn abs_three_halves(&self) -> Option<Self> {
        let a = if self.0[0].signum() < 0 { self.scale(&S::from_i64(-1)) } else { self.clone() };
        Some(a.mul(&a.sqrt()?))
    }

    pub fn derivative(&self) -> Self {
        if self.len() == 1 {
            return Local(vec![S::from_i64(0)]);
        }
        Local((1..self.len()).map(|k| S::from_i64(k as i64) * self.0[k].clone()).collect())
    }

    /// `self(inner)` for an `inner` series without constant term.
    pub fn compose(&self, inner: &Self) -> Self {
        let n = inner.len();
        let mut out = Local::constant(S::from_i64(0), n);
        let mut pow = Local::constant(S::from_i64(1), n);
        for k in 0..self.len().min(n) {
            out = out.add(&pow.scale(&self.0[k]));
            pow = pow.mul(inner);
        }
        out
    }

    /// Compositional inverse of a series with zero constant and nonzero
    /// linear term.
    pub fn revert(&self) -> Option<Self> {
        let n = self.len();
        let a1 = self.coeff(1);
        let mut b = Local::constant(S::from_i64(0), n);
        if n > 1 {
            b.0[1] = S::from_i64(1).checked_div(&a1)?;
        }
        // b ← b − (a∘b − w)/a1, one new coefficient per pass
        for _ in 2..n {
            let r = self.compose(&b);
            for k in 2..n {
                let corr = r.0[k].checked_div(&a1)?;
                b.0[k] = b.0[k].clone() - corr;
            }
        }
        Some(b)
    }

    pub fn eval(&self, w: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * w + c.to_f64())
    }

    pub fn to_f64(&self) -> Local<f64> {
        Local(self.0.iter().map(|c| c.to_f64()).collect())
    }
}

/// `a0 + a2 (z − ρ) + a3 |z − ρ|^{3/2} [+ a4 (z − ρ)^2]` on the side `σ(z − ρ) ≥ 0`,
/// every entry a series in `x − center`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "S: Serialize", deserialize = "S: Deserialize<'de> + Scalar"))]
pub struct SingularGerm<S = f64> {
    pub rho: Local<S>,
    pub a0: Local<S>,
    pub a2: Local<S>,
    pub a3: Local<S>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a4: Option<Local<S>>,
    /// Expansion point of the entries: `x0` for germs in `x`, `u0` for transferred germs.
    #[serde(default = "unit")]
    pub center: S,
    #[serde(default = "minus_one")]
    pub side: i8,
}

fn unit<S: Scalar>() -> S {
    S::from_i64(1)
}

fn minus_one() -> i8 {
    -1
}

impl<S: Scalar> SingularGerm<S> {
    /// Scalar germ on the side `z < ρ`.
    pub fn scalar(rho: S, a0: S, a2: S, a3: S) -> Self {
        SingularGerm {
            rho: Local(vec![rho]),
            a0: Local(vec![a0]),
            a2: Local(vec![a2]),
            a3: Local(vec![a3]),
            a4: None,
            center: S::from_i64(1),
            side: -1,
        }
    }

    /// Common truncation length of the entries.
    pub fn len(&self) -> usize {
        let mut n = self.rho.len().min(self.a0.len()).min(self.a2.len()).min(self.a3.len());
        if let Some(a4) = &self.a4 {
            n = n.min(a4.len());
        }
        n
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn check(&self) -> Result<(), SingularError> {
        if self.is_empty() {
            return Err(SingularError::Degenerate("germ has no coefficients".into()));
        }
        if self.side != 1 && self.side != -1 {
            return Err(SingularError::Degenerate(format!("side must be ±1, got {}", self.side)));
        }
        if self.a3.value().signum() == 0 {
            return Err(SingularError::Degenerate("a3 = 0: no 3/2 term".into()));
        }
        Ok(())
    }

    /// Value of the germ at `z` for the local parameter `w = x − center`.
    pub fn eval(&self, z: f64, w: f64) -> f64 {
        let d = z - self.rho.eval(w);
        let mut f = self.a0.eval(w) + self.a2.eval(w) * d + self.a3.eval(w) * d.abs().powf(1.5);
        if let Some(a4) = &self.a4 {
            f += a4.eval(w) * d * d;
        }
        f
    }
}

/// Inverse germ of `u = f(z)` near `u0 = a0`: `z = ρ + A2 (u − u0) + A3 |u − u0|^{3/2} + A4 (u − u0)^2`.
/// Entries that are series invert parametrically, coefficient by coefficient.
pub fn invert_germ<S: Scalar>(f: &SingularGerm<S>) -> Result<SingularGerm<S>, SingularError> {
    f.check()?;
    let n = f.len();
    let (a2, a3) = (f.a2.resize(n), f.a3.resize(n));
    let sign = a2.value().signum();
    if sign == 0 {
        return Err(SingularError::Degenerate("a2 = 0: linear coefficient vanishes".into()));
    }
    let side = f.side * sign as i8;
    let big_a2 = a2.inv().ok_or_else(|| SingularError::Degenerate("a2 = 0".into()))?;
    let abs32 = a2.abs_three_halves().ok_or_else(|| SingularError::Inexact("|a2|^{3/2}".into()))?;
    let big_a3 = a3
        .div(&a2.mul(&abs32))
        .ok_or_else(|| SingularError::Degenerate("a2 = 0".into()))?
        .scale(&S::from_i64(-1));
    let big_a4 = match &f.a4 {
        None => None,
        Some(a4) => {
            // A4 = −(a4 A2² + (3/2) σ' a3 |A2|^{3/2} A3 / A2) / a2
            let a4 = a4.resize(n);
            let abs_a2_inv32 = big_a2.abs_three_halves().ok_or_else(|| SingularError::Inexact("|A2|^{3/2}".into()))?;
            let mid = a3.mul(&abs_a2_inv32).mul(&big_a3).mul(&a2).scale(&S::from_i64(3 * side as i64));
            let half = mid.div(&Local::constant(S::from_i64(2), n)).unwrap();
            let num = a4.mul(&big_a2).mul(&big_a2).add(&half);
            Some(num.mul(&big_a2).scale(&S::from_i64(-1)))
        }
    };
    Ok(SingularGerm {
        rho: f.a0.resize(n),
        a0: f.rho.resize(n),
        a2: big_a2,
        a3: big_a3,
        a4: big_a4,
        center: f.center.clone(),
        side,
    })
}

/// Result of transferring `u = f1(z,x)`, `v = f2(z,x)`. Every series here is
/// in `u − u0`; the germs are in the variable `v` with `u` as parameter,
/// so their `rho` entry is the singular curve `R(u)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "S: Serialize", deserialize = "S: Deserialize<'de> + Scalar"))]
pub struct Transfer<S = f64> {
    pub u0: S,
    /// Inverse of `α(x) = g1(ρ(x), x)`, as `β(u)`.
    pub beta: Local<S>,
    /// Singular curve `R(u) = g2(ρ(β(u)), β(u))`.
    pub curve: Local<S>,
    /// `J_{3,u} = g_{2,z}/g_{1,z}` at `(ρ(x), x)`, in `x − center`.
    pub j3u: Local<S>,
    /// `J_4 = (h2 g_{1,z} − h1 g_{2,z}) / (g_{1,z} |g_{1,z}|^{3/2})` at `(ρ(x), x)`, in `x − center`.
    pub j4: Local<S>,
    pub z_germ: SingularGerm<S>,
    pub x_germ: SingularGerm<S>,
}

/// Invert the pair `u = f1(z,x)`, `v = f2(z,x)` near the singular curve.
pub fn transfer<S: Scalar>(f1: &SingularGerm<S>, f2: &SingularGerm<S>) -> Result<Transfer<S>, SingularError> {
    f1.check()?;
    f2.check()?;
    let n = f1.len().min(f2.len());
    if n < 2 {
        return Err(SingularError::Degenerate("transfer needs germs with at least a linear term in x".into()));
    }
    if f1.side != f2.side || f1.center != f2.center {
        return Err(SingularError::Degenerate("germs differ in side or center".into()));
    }
    let rho = f1.rho.resize(n);
    let differs = rho.sub(&f2.rho.resize(n)).0.iter().zip(&rho.0).any(|(d, c)| {
        let scale = if c.signum() == 0 { S::from_i64(1) } else { c.clone() };
        !d.negligible(&scale)
    });
    if differs {
        return Err(SingularError::Degenerate("germs do not share ρ(x)".into()));
    }
    let r = |l: &Local<S>| l.resize(n);
    let (g1z, h1, g2z, h2) = (r(&f1.a2), r(&f1.a3), r(&f2.a2), r(&f2.a3));
    for (name, c) in [("g_{1,z}", &g1z), ("h_1", &h1), ("g_{2,z}", &g2z), ("h_2", &h2)] {
        if c.value().signum() == 0 {
            return Err(SingularError::Degenerate(format!("{name} vanishes at the singularity")));
        }
    }
    let p = h2.mul(&g1z);
    let q = h1.mul(&g2z);
    if p.value().clone().sub(q.value().clone()).negligible(&(p.value().clone() + q.value().clone())) {
        return Err(SingularError::Degenerate("coupling condition h2·g1z ≠ h1·g2z fails".into()));
    }
    let g1z_abs32 = g1z.abs_three_halves().ok_or_else(|| SingularError::Inexact("|g_{1,z}|^{3/2}".into()))?;
    let g1z_52 = g1z.mul(&g1z_abs32);
    let inexact = |what: &str| SingularError::Degenerate(format!("{what} vanishes"));
    let j1u = g1z.inv().ok_or_else(|| inexact("g_{1,z}"))?;
    let j2 = h1.div(&g1z_52).ok_or_else(|| inexact("g_{1,z}"))?.scale(&S::from_i64(-1));
    let j3u = g2z.div(&g1z).ok_or_else(|| inexact("g_{1,z}"))?;
    let j4 = p.sub(&q).div(&g1z_52).ok_or_else(|| inexact("g_{1,z}"))?;
    let side_u = f1.side as i32 * g1z.value().signum();

    // recentre on the singular curve: x = β(u)
    let alpha = r(&f1.a0);
    let kappa = r(&f2.a0);
    let alpha_d = alpha.derivative().resize(n);
    if alpha_d.value().signum() == 0 {
        return Err(SingularError::Degenerate("α'(x0) = 0: singular curve not invertible in x".into()));
    }
    let mut shifted = alpha.clone();
    shifted.0[0] = S::from_i64(0);
    let beta_off = shifted.revert().ok_or_else(|| inexact("α'"))?;
    let at_beta = |l: &Local<S>| l.compose(&beta_off);
    let curve = at_beta(&kappa);
    let ad = at_beta(&alpha_d);
    let kd = at_beta(&kappa.derivative().resize(n));
    let rd = at_beta(&rho.derivative().resize(n));
    let ad_abs32 = ad.abs_three_halves().ok_or_else(|| SingularError::Inexact("|α'|^{3/2}".into()))?;

    // v − R(u) = c1 (x − β) + c3 |x − β|^{3/2}
    let c1 = kd.sub(&at_beta(&j3u).mul(&ad));
    let c3 = at_beta(&j4).mul(&ad_abs32);
    if c1.value().signum() == 0 {
        return Err(SingularError::Degenerate("∂v/∂x vanishes on the singular curve".into()));
    }
    let side_x = side_u * -ad.value().signum();
    let side_v = side_x * c1.value().signum();
    let c1_abs32 = c1.abs_three_halves().ok_or_else(|| SingularError::Inexact("|c1|^{3/2}".into()))?;
    let x_a2 = c1.inv().ok_or_else(|| inexact("c1"))?;
    let x_a3 = c3.div(&c1.mul(&c1_abs32)).ok_or_else(|| inexact("c1"))?.scale(&S::from_i64(-1));

    // z − ρ(β) = d1 (x − β) + J2 |α'|^{3/2} |x − β|^{3/2}
    let d1 = rd.sub(&at_beta(&j1u).mul(&ad));
    let z_a2 = d1.mul(&x_a2);
    let z_a3 = d1.mul(&x_a3).add(&at_beta(&j2).mul(&ad_abs32).div(&c1_abs32).ok_or_else(|| inexact("c1"))?);

    let x_value = Local::constant(f1.center.clone(), n).add(&beta_off);
    let u0 = alpha.value().clone();
    let germ = |a0: Local<S>, a2: Local<S>, a3: Local<S>| SingularGerm {
        rho: curve.clone(),
        a0,
        a2,
        a3,
        a4: None,
        center: u0.clone(),
        side: side_v as i8,
    };
    Ok(Transfer {
        u0: u0.clone(),
        beta: x_value.clone(),
        curve: curve.clone(),
        j3u,
        j4,
        z_germ: germ(at_beta(&rho), z_a2, z_a3),
        x_germ: germ(x_value, x_a2, x_a3),
    })
}
