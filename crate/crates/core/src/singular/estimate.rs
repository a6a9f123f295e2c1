//! Singularity estimation for series with `f_n ~ C ρ^{-n} n^{β}`.
//!
//! Ratios and their Richardson tables are computed exactly over the
//! rationals, so the extrapolation itself loses no precision; only the final
//! values are rounded to `f64`.

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::{SingularError, SingularGerm};
use crate::series::{int, Rational};

const MIN_LEN: usize = 20;
/// Singular terms fitted by [`germ_from_coefficients`] by default.
pub const GERM_FIT_TERMS: usize = 12;

#[derive(Clone, Debug, Serialize)]
pub struct SingularityEstimate {
    pub rho: f64,
    /// Exponent `β` in `f_n ~ C ρ^{-n} n^{β}`; `−2.5` for a 3/2-singularity.
    pub exponent: f64,
    /// Largest deviation of `rho` over the last three extrapolation levels
    /// up to the chosen one.
    pub rho_spread: f64,
    pub exponent_spread: f64,
    /// Size range `(first, last)` of the coefficients that entered.
    pub orders: (usize, usize),
    pub levels: usize,
    /// Extrapolated `ρ` before rounding.
    #[serde(skip)]
    pub rho_exact: Rational,
}

/// Richardson table of a sequence `a_n = a + c1/n + c2/n² + …` given at
/// `n = first, first+1, …`; entry `k` uses the last `k+1` terms.
pub(super) fn richardson(seq: &[Rational], first: usize, levels: usize) -> Vec<Rational> {
    let last = first + seq.len() - 1;
    let mut fact = vec![Rational::one()];
    for j in 1..=levels {
        fact.push(&fact[j - 1] * int(j as i64));
    }
    (0..=levels)
        .map(|k| {
            let m = last - k;
            let mut acc = Rational::zero();
            for j in 0..=k {
                let n = int((m + j) as i64);
                let mut term = &seq[m + j - first] * num_traits::pow(n, k) / (&fact[j] * &fact[k - j]);
                if (k + j) % 2 == 1 {
                    term = -term;
                }
                acc += term;
            }
            acc
        })
        .collect()
}

pub(super) fn spread(values: &[f64]) -> f64 {
    let k = values.len() - 1;
    (k.saturating_sub(2)..k).map(|i| (values[k] - values[i]).abs()).fold(0.0, f64::max)
}

fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Estimate `ρ` and the exponent from `coeffs[n] = f_n` (index 0 ignored).
pub fn estimate_singularity(coeffs: &[Rational]) -> Result<SingularityEstimate, SingularError> {
    let n_max = coeffs.len().saturating_sub(1);
    if n_max < MIN_LEN {
        return Err(SingularError::TooShort { have: n_max, need: MIN_LEN });
    }
    let max_levels = (n_max / 5).min(8);
    // ratios f_n / f_{n−1} on the window that feeds the table
    let first = n_max - max_levels;
    for n in first - 1..=n_max {
        if !coeffs[n].is_positive() {
            return Err(SingularError::NonPositive(n));
        }
    }
    let ratios: Vec<Rational> = (first..=n_max).map(|n| &coeffs[n] / &coeffs[n - 1]).collect();
    let rho_levels: Vec<Rational> = richardson(&ratios, first, max_levels).iter().map(|a| a.recip()).collect();
    let rho_f: Vec<f64> = rho_levels.iter().map(to_f64).collect();
    let (levels, rho_spread) = best_level(&rho_f);
    let rho_exact = rho_levels[levels].clone();

    // n (ρ f_n / f_{n−1} − 1) → β
    let slopes: Vec<Rational> =
        ratios.iter().enumerate().map(|(i, r)| int((first + i) as i64) * (r * &rho_exact - Rational::one())).collect();
    let beta_f: Vec<f64> = richardson(&slopes, first, max_levels).iter().map(to_f64).collect();
    let (beta_level, exponent_spread) = best_level(&beta_f);
    Ok(SingularityEstimate {
        rho: rho_f[levels],
        exponent: beta_f[beta_level],
        rho_spread,
        exponent_spread,
        orders: (n_max - levels - 1, n_max),
        levels,
        rho_exact,
    })
}

/// Level of a Richardson table with the smallest spread, from level 2 on.
/// High levels amplify subdominant oscillations, so the deepest level is
/// not always the most accurate.
fn best_level(table: &[f64]) -> (usize, f64) {
    (2..table.len())
        .map(|k| (k, spread(&table[..=k])))
        .filter(|(_, s)| s.is_finite())
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap_or((table.len() - 1, f64::INFINITY))
}

/// `[w^n] (1 − w)^{j + 1/2}` for `n = 0..=len`.
fn half_binomial_coeffs(j: usize, len: usize) -> Vec<Rational> {
    let a = Rational::new((2 * j as i64 + 1).into(), 2.into());
    let mut out = vec![Rational::one()];
    for n in 1..=len {
        let k = int(n as i64);
        let prev = &out[n - 1];
        out.push(-(prev * (&a - &k + Rational::one())) / &k);
    }
    out
}

fn solve(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(c, p);
        b.swap(c, p);
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = &a[r][c] / &a[c][c];
                for k in c..n {
                    let d = &f * &a[c][k];
                    a[r][k] -= d;
                }
                let d = &f * &b[c];
                b[r] -= d;
            }
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

/// Scalar germ `(ρ; a0, a2, a3)` of a series with a 3/2-singularity at the
/// given `ρ`. The singular part is removed by fitting
/// `Σ_j K_j (1 − z/ρ)^{j + 1/2}`, `j = 1..=terms`, to the last coefficients;
/// the remainder converges fast enough to be summed directly at `z = ρ`.
pub fn germ_from_coefficients(
    coeffs: &[Rational],
    rho: &Rational,
    terms: usize,
) -> Result<SingularGerm<f64>, SingularError> {
    let n_max = coeffs.len().saturating_sub(1);
    if n_max < MIN_LEN.max(2 * terms) {
        return Err(SingularError::TooShort { have: n_max, need: MIN_LEN.max(2 * terms) });
    }
    let mut e = Vec::with_capacity(n_max + 1);
    let mut p = Rational::one();
    for c in coeffs {
        e.push(c * &p);
        p *= rho;
    }
    let basis: Vec<Vec<Rational>> = (1..=terms).map(|j| half_binomial_coeffs(j, n_max)).collect();
    let rows: Vec<usize> = (n_max + 1 - terms..=n_max).collect();
    let a = rows.iter().map(|&n| basis.iter().map(|b| b[n].clone()).collect()).collect();
    let rhs = rows.iter().map(|&n| e[n].clone()).collect();
    let k = solve(a, rhs).ok_or_else(|| SingularError::Degenerate("singular fit is not solvable".into()))?;

    let mut a0 = Rational::zero();
    let mut a2 = Rational::zero();
    for n in 0..=n_max {
        let mut r = e[n].clone();
        for (kj, b) in k.iter().zip(&basis) {
            r -= kj * &b[n];
        }
        a2 += int(n as i64) * &r;
        a0 += r;
    }
    // the fitted part vanishes at z = ρ together with its derivative
    let rho_f = to_f64(rho);
    Ok(SingularGerm::scalar(rho_f, to_f64(&a0), to_f64(&a2) / rho_f, to_f64(&k[0]) / rho_f.powf(1.5)))
}
