//! Univariate counting sequences of every family at orders beyond the
//! oracle: the catalytic solution for general and bipartite maps, followed
//! by a chain of scheme extractions.

use num_traits::{One, ToPrimitive};
use serde::Serialize;
use thiserror::Error;

use crate::family::Family;
use crate::scheme::{find_scheme, InnerSeries, SchemeError};
use crate::series::{Marker, MarkerSet, MultiSeries, Rational, SeriesError};
use crate::singular::{
    clt_params, estimate_singularity, mean_limit, mean_per_size, CltParams, germ_from_coefficients, transfer, Local, SingularError, SingularGerm, GERM_FIT_TERMS,
};
use crate::tutte::{m1_centered, m1_counts};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Singular(#[from] SingularError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("value {0} has no exact rational form")]
    NotFinite(f64),
    #[error("{0}")]
    Unsupported(String),
}

/// Scheme that extracts `family` and the family it is extracted from.
pub fn source(family: Family) -> Option<(&'static str, Family)> {
    use Family::*;
    Some(match family {
        M1 | B1 => return None,
        M2l => ("m1-m2l", M1),
        M2b => ("m1-m2b", M1),
        M3 => ("m2l-m3", M2l),
        M4 => ("m1-m4", M1),
        M5 => ("m4-m5", M4),
        B2 => ("b1-b2", B1),
        B3 => ("b1-b3", B1),
        B4 => ("b1-b4", B1),
        B5 => ("b4-b5", B4),
    })
}

pub fn to_series(coeffs: &[Rational]) -> Result<MultiSeries, SchemeError> {
    let order = coeffs.len().saturating_sub(1);
    let terms = coeffs.iter().enumerate().map(|(n, c)| (n, vec![], c.clone()));
    Ok(MultiSeries::from_terms(&MarkerSet::empty(), order, terms)?)
}

pub fn to_coeffs(s: &MultiSeries) -> Result<Vec<Rational>, SchemeError> {
    (0..=s.order()).map(|n| Ok(s.coeff(n, &[])?)).collect()
}

/// `[z^n]` of the family's counting series for `n = 0..=order`, without the
/// vertex map.
pub fn family_counts(family: Family, order: usize) -> Result<Vec<Rational>, SchemeError> {
    match source(family) {
        None => Ok(m1_counts(order, |_| Rational::one(), family == Family::B1)),
        Some((id, from)) => {
            let inner = to_series(&family_counts(from, order)?)?;
            let scheme = find_scheme(id, 1)?;
            to_coeffs(&scheme.extract_outer(&InnerSeries::Full(inner), order)?)
        }
    }
}

/// General maps by size with pure 2-gons marked by the centered marker
/// `xh2`, obtained from 2-connected maps with 2-faces marked (`x2`, centered)
/// through the block decomposition
/// `M1(z; x) = M4(z (1 + M1)^2; 1 + (x − 1)/(1 + M1)^2)`.
pub fn m1_gons_from_m4(m4: &MultiSeries, cap: u32, order: usize) -> Result<MultiSeries, SchemeError> {
    let markers = MarkerSet::new(vec![Marker::centered(TWO_GONS, cap)])?;
    // step k fixes [z^k]; it only needs the lower degrees, so it runs at order k
    let mut m = MultiSeries::zero(&markers, 0);
    for k in 1..=order {
        let low = MultiSeries::from_terms(&markers, k, m.terms().map(|(n, mono, c)| (n, mono.clone(), c.clone())))?;
        let one = MultiSeries::one(&markers, k);
        let s = MultiSeries::var(&markers, k, TWO_GONS)?.sub(&one)?;
        let p2 = one.add(&low)?.pow(2)?;
        let u = MultiSeries::z(&markers, k).mul(&p2)?;
        let v = one.add(&s.mul(&p2.invert_unit()?)?)?;
        m = m4.truncate(k).substitute(&markers, &[(TWO_FACES.to_string(), v)], Some(&u))?;
    }
    Ok(m)
}

const TWO_GONS: &str = "xh2";
const TWO_FACES: &str = "x2";

/// `M4(y; x2)` with `x2` centered and truncated at `cap`.
pub fn m4_two_faces(cap: u32, order: usize) -> Result<MultiSeries, SchemeError> {
    let (at_t1, low) = m1_centered(order, &[2], TWO_FACES, cap, 1, false)?;
    find_scheme("m1-m4.faces:2", 2)?.extract_outer(&InnerSeries::Split { at_t1, low }, order)
}

/// Radius of M4 at `x2 = v` predicted by transferring the germ of
/// `M1(z; xh2 = x)` through the block decomposition, against a direct
/// estimate from the counting series of M4 at `v`.
#[derive(Clone, Debug, Serialize)]
pub struct TransferCheck {
    /// Value `x` of the 2-gon marker in M1.
    pub x: f64,
    /// Value `v` of the 2-face marker in M4 it maps to.
    pub v: f64,
    pub predicted: f64,
    pub predicted_spread: f64,
    pub estimated: f64,
    pub estimated_spread: f64,
    /// `dρ/dv` from the transferred curve and by finite differences.
    pub slope_predicted: f64,
    pub slope_estimated: f64,
}

impl TransferCheck {
    pub fn agrees(&self) -> bool {
        (self.predicted - self.estimated).abs() <= self.predicted_spread + self.estimated_spread
    }
}

/// Germ of the block substitution pair `u = z (1 + M)^2`,
/// `v = 1 + (x − 1)/(1 + M)^2` from the germ of `M` (entries of length 2).
fn block_pair(m: &SingularGerm<f64>) -> (SingularGerm<f64>, SingularGerm<f64>) {
    let one = Local::constant(1.0, 2);
    let w = Local(vec![m.center - 1.0, 1.0]);
    let p = one.add(&m.a0);
    let rp = m.rho.mul(&p);
    let g1 = SingularGerm {
        a0: rp.mul(&p),
        a2: p.mul(&p).add(&rp.mul(&m.a2).scale(&2.0)),
        a3: rp.mul(&m.a3).scale(&2.0),
        ..m.clone()
    };
    let p3 = p.mul(&p).mul(&p).inv().expect("1 + M(ρ) > 0");
    let f = w.mul(&p3).scale(&-2.0);
    let g2 = SingularGerm {
        a0: one.add(&w.mul(&p).mul(&p3)),
        a2: f.mul(&m.a2),
        a3: f.mul(&m.a3),
        ..m.clone()
    };
    (g1, g2)
}

fn exact(x: f64) -> Result<Rational, PipelineError> {
    Rational::from_float(x).ok_or(PipelineError::NotFinite(x))
}

fn radius(series: &MultiSeries, name: &str, value: &Rational) -> Result<(f64, f64, Rational), PipelineError> {
    let e = estimate_singularity(&to_coeffs(&series.specialize(name, value)?)?)?;
    Ok((e.rho, e.rho_spread, e.rho_exact))
}

/// Run the transfer at `x = 1 ± h`. At `x = 1` the second substitution
/// loses its singular part, so the transfer does not apply there.
pub fn two_gon_transfer_check(order: usize, cap: u32, h: &Rational) -> Result<Vec<TransferCheck>, PipelineError> {
    let m4 = m4_two_faces(cap, order)?;
    let m1 = m1_gons_from_m4(&m4, cap, order)?;
    let hf = h.to_f64().unwrap_or(f64::NAN);
    let mut germs = Vec::new();
    let mut spreads = Vec::new();
    for j in -2..=2i64 {
        let x = Rational::one() + h * Rational::from_integer(j.into());
        let coeffs = to_coeffs(&m1.specialize(TWO_GONS, &x)?)?;
        let e = estimate_singularity(&coeffs)?;
        germs.push(germ_from_coefficients(&coeffs, &e.rho_exact, GERM_FIT_TERMS)?);
        spreads.push(e.rho_spread);
    }
    let mut out = Vec::new();
    for j in [1usize, 3] {
        let x = 1.0 + (j as f64 - 2.0) * hf;
        let (lo, mid, hi) = (&germs[j - 1], &germs[j], &germs[j + 1]);
        let entry = |f: fn(&SingularGerm<f64>) -> f64| Local(vec![f(mid), (f(hi) - f(lo)) / (2.0 * hf)]);
        let germ = SingularGerm {
            rho: entry(|g| g.rho.0[0]),
            a0: entry(|g| g.a0.0[0]),
            a2: entry(|g| g.a2.0[0]),
            a3: entry(|g| g.a3.0[0]),
            a4: None,
            center: x,
            side: -1,
        };
        let (g1, g2) = block_pair(&germ);
        let t = transfer(&g1, &g2)?;
        let v = *t.curve.value();
        let slope_predicted = 1.0 / t.curve.0[1];

        let (estimated, estimated_spread, _) = radius(&m4, TWO_FACES, &exact(v)?)?;
        let dv = hf / 4.0;
        let (up, _, _) = radius(&m4, TWO_FACES, &exact(v + dv)?)?;
        let (down, _, _) = radius(&m4, TWO_FACES, &exact(v - dv)?)?;

        // a wrong ρ shifts M(ρ) by about a2 δ
        let (r, a0, a2) = (germ.rho.0[0], germ.a0.0[0], germ.a2.0[0]);
        let d = spreads[j];
        let du = (1.0 + a0).powi(2) * d + 2.0 * r * (1.0 + a0) * a2.abs() * d;
        let dv_err = 2.0 * (x - 1.0).abs() * a2.abs() * d / (1.0 + a0).powi(3);
        out.push(TransferCheck {
            x,
            v,
            predicted: t.u0,
            predicted_spread: du + slope_predicted.abs() * dv_err,
            estimated,
            estimated_spread,
            slope_predicted,
            slope_estimated: (up - down) / (2.0 * dv),
        });
    }
    Ok(out)
}

/// CLT parameters of a marker next to the independent estimate from the
/// mean of the marker over objects of each size.
#[derive(Clone, Debug, Serialize)]
pub struct CltReport {
    pub family: Family,
    pub marker: String,
    pub order: usize,
    #[serde(flatten)]
    pub clt: CltParams,
    /// Extrapolated `lim E X_n / n` and its spread.
    pub mean_limit: f64,
    pub mean_limit_spread: f64,
    /// `E X_N / N` at the top order.
    pub mean_at_order: f64,
}

fn clt_report(
    family: Family,
    marker: String,
    order: usize,
    h: &Rational,
    at: impl Fn(&Rational) -> Result<Vec<Rational>, PipelineError>,
    marked: &[Rational],
) -> Result<CltReport, PipelineError> {
    let one = Rational::one();
    let (lo, mid, hi) = (at(&(&one - h))?, at(&one)?, at(&(&one + h))?);
    let clt = clt_params([&lo, &mid, &hi], h)?;
    let (limit, limit_spread) = mean_limit(&mid, marked)?;
    Ok(CltReport {
        family,
        marker,
        order,
        clt,
        mean_limit: limit,
        mean_limit_spread: limit_spread,
        mean_at_order: mean_per_size(&mid, marked, order).unwrap_or(f64::NAN),
    })
}

/// Non-root faces of the given degree in general or bipartite maps.
pub fn face_clt(family: Family, degree: usize, order: usize, h: &Rational) -> Result<CltReport, PipelineError> {
    let bipartite = match family {
        Family::M1 => false,
        Family::B1 => true,
        _ => return Err(PipelineError::Unsupported(format!("face statistics are computed for M1 and B1, not {family}"))),
    };
    let name = format!("x{degree}");
    let (at1, _) = m1_centered(order, &[degree], &name, 1, 0, bipartite)?;
    let marked = to_coeffs(&at1.extract_marker(&name, 1)?)?;
    let at = |x: &Rational| Ok(m1_counts(order, |l| if l == degree { x.clone() } else { Rational::one() }, bipartite));
    clt_report(family, name, order, h, at, &marked)
}

/// Non-root pure 2-gons in general maps, through [`m1_gons_from_m4`].
pub fn two_gon_clt(order: usize, h: &Rational) -> Result<CltReport, PipelineError> {
    let m1 = m1_gons_from_m4(&m4_two_faces(6, order)?, 6, order)?;
    let marked = to_coeffs(&m1.extract_marker(TWO_GONS, 1)?)?;
    let at = |x: &Rational| to_coeffs(&m1.specialize(TWO_GONS, x)?).map_err(PipelineError::from);
    clt_report(Family::M1, TWO_GONS.to_string(), order, h, at, &marked)
}
