//! Central-limit parameters of a marker from the moving singularity `ρ(x)`.
//!
//! With `λ(s) = log(ρ(1)/ρ(e^s))` the quasi-power form gives mean `μ n` and
//! variance `σ² n`, where `μ = λ'(0) = −ρ'(1)/ρ(1)` and
//! `σ² = λ''(0) = μ + μ² − ρ''(1)/ρ(1)`. The derivatives of `ρ` are central
//! differences over the sample points `1 − h, 1, 1 + h`.

use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use super::estimate::{richardson, spread};
use super::{estimate_singularity, SingularError};
use crate::series::{rat, Rational};

pub const DEFAULT_STEP: (i64, i64) = (1, 64);

/// Largest negative variance still attributed to estimation noise.
const VARIANCE_TOL: f64 = 1e-4;

#[derive(Clone, Debug, Serialize)]
pub struct CltParams {
    pub mu: f64,
    pub sigma2: f64,
    /// `ρ` at `1 − h, 1, 1 + h`.
    pub rho: [f64; 3],
    /// Largest estimator spread over the three points.
    pub spread: f64,
}

/// `coeffs[i]` is the counting series at marker value `1 + (i − 1) h`.
pub fn clt_params(coeffs: [&[Rational]; 3], h: &Rational) -> Result<CltParams, SingularError> {
    if *h <= Rational::zero() || *h > rat(1, 4) {
        return Err(SingularError::Degenerate("step must lie in (0, 1/4]".into()));
    }
    let mut est = Vec::with_capacity(3);
    for c in coeffs {
        est.push(estimate_singularity(c)?);
    }
    let (m, c, p) = (&est[0].rho_exact, &est[1].rho_exact, &est[2].rho_exact);
    let two = Rational::from_integer(2.into());
    let d1 = (p - m) / (&two * h);
    let d2 = (p - &two * c + m) / (h * h);
    let mu = -(&d1 / c);
    let sigma2 = &mu + &mu * &mu - &d2 / c;
    let sigma2 = sigma2.to_f64().unwrap_or(f64::NAN);
    if sigma2 < -VARIANCE_TOL {
        return Err(SingularError::NegativeVariance(sigma2));
    }
    Ok(CltParams {
        mu: mu.to_f64().unwrap_or(f64::NAN),
        sigma2,
        rho: [est[0].rho, est[1].rho, est[2].rho],
        spread: est.iter().map(|e| e.rho_spread).fold(0.0, f64::max),
    })
}

/// `E X_n / n` from the counting series `total` and the series `marked` of
/// marker counts summed over objects, `[z^n] ∂_x F` at `x = 1`.
pub fn mean_per_size(total: &[Rational], marked: &[Rational], n: usize) -> Option<f64> {
    let t = total.get(n)?;
    if t.is_zero() {
        return None;
    }
    (marked.get(n)? / t / Rational::from_integer(n.into())).to_f64()
}

/// `lim E X_n / n` by Richardson extrapolation of `E X_n / n` over the top
/// of the series, with the spread over the last three levels.
pub fn mean_limit(total: &[Rational], marked: &[Rational]) -> Result<(f64, f64), SingularError> {
    let n_max = total.len().min(marked.len()).saturating_sub(1);
    let levels = (n_max / 5).min(8);
    if n_max < 20 {
        return Err(SingularError::TooShort { have: n_max, need: 20 });
    }
    let first = n_max - levels;
    let mut seq = Vec::with_capacity(levels + 1);
    for n in first..=n_max {
        if total[n].is_zero() {
            return Err(SingularError::NonPositive(n));
        }
        seq.push(&marked[n] / &total[n] / Rational::from_integer(n.into()));
    }
    let table: Vec<f64> = richardson(&seq, first, levels).iter().map(|r| r.to_f64().unwrap_or(f64::NAN)).collect();
    Ok((table[levels], spread(&table)))
}
