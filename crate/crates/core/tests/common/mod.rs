//! Germ checks shared by the singular tests and the acceptance suite.
#![allow(dead_code)]

use mapgf::series::{int, rat, Rational};
use mapgf::singular::{invert_germ, transfer, Local, SingularError, SingularGerm};
use num_traits::One;
use proptest::prelude::*;

pub fn local(v: &[(i64, i64)]) -> Local<Rational> {
    Local(v.iter().map(|&(n, d)| rat(n, d)).collect())
}

pub fn nonzero() -> impl Strategy<Value = (i64, i64)> {
    (-9i64..=9, 1i64..=5).prop_filter("nonzero", |(n, _)| *n != 0)
}

fn germ_value(f: &SingularGerm, z: f64) -> f64 {
    f.eval(z, 0.0)
}

/// z with `f(z) = u` on the side `z < ρ`, by bisection.
fn bisect(f: &SingularGerm, u: f64) -> f64 {
    let rho = f.rho.0[0];
    let (mut lo, mut hi) = (rho - 0.05, rho);
    let up = f.a2.0[0] > 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (germ_value(f, mid) < u) == up {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}


/// Local arithmetic helpers for synthetic pairs given by polynomials.
type Poly = fn(f64, f64) -> f64;

struct Pair {
    g: [Poly; 2],
    gz: [Poly; 2],
    h: [Poly; 2],
}

fn rho_of(x: f64) -> f64 {
    1.0 - (x - 1.0) / 2.0
}

impl Pair {
    fn f(&self, i: usize, z: f64, x: f64) -> f64 {
        let d = rho_of(x) - z;
        (self.g[i])(z, x) + (self.h[i])(z, x) * d.abs().powf(1.5)
    }

    /// Germ entries as Taylor series in x − 1, from exact polynomial data
    /// sampled by finite differences on a fine complex-free stencil.
    fn germ(&self, i: usize, len: usize) -> SingularGerm {
        let taylor = |p: &dyn Fn(f64) -> f64| -> Local<f64> {
            // polynomials of low degree: fit exactly by Newton interpolation on integers
            let pts: Vec<f64> = (0..len).map(|k| p(1.0 + 0.125 * k as f64)).collect();
            Local(interp_taylor(&pts, 0.125))
        };
        SingularGerm {
            rho: taylor(&|x| rho_of(x)),
            a0: taylor(&|x| (self.g[i])(rho_of(x), x)),
            a2: taylor(&|x| (self.gz[i])(rho_of(x), x)),
            a3: taylor(&|x| (self.h[i])(rho_of(x), x)),
            a4: None,
            center: 1.0,
            side: -1,
        }
    }
}

/// Taylor coefficients at 0 of the interpolating polynomial through `(k·step, y_k)`.
fn interp_taylor(y: &[f64], step: f64) -> Vec<f64> {
    let n = y.len();
    // forward differences → Newton form → monomial basis
    let mut diff = y.to_vec();
    let mut newton = Vec::new();
    for k in 0..n {
        newton.push(diff[0]);
        diff = diff.windows(2).map(|w| w[1] - w[0]).collect();
        let _ = k;
    }
    let mut out = vec![0.0; n];
    // basis polynomial Π_{j<k} (x − j·step) / (k! step^k)
    let mut basis = vec![1.0];
    let mut fact = 1.0;
    for (k, c) in newton.iter().enumerate() {
        if k > 0 {
            fact *= k as f64 * step;
            let shift = (k - 1) as f64 * step;
            let mut next = vec![0.0; basis.len() + 1];
            for (i, b) in basis.iter().enumerate() {
                next[i + 1] += b;
                next[i] -= shift * b;
            }
            basis = next;
        }
        for (i, b) in basis.iter().enumerate() {
            out[i] += c * b / fact;
        }
    }
    out
}

fn pairs() -> Vec<Pair> {
    vec![
        Pair {
            g: [|z, x| 2.0 + z + 0.3 * z * x + 0.2 * x, |z, x| x + 0.5 * z + 0.2 * z * z],
            gz: [|_, x| 1.0 + 0.3 * x, |z, _| 0.5 + 0.4 * z],
            h: [|_, x| 1.0 + 0.1 * x, |z, _| -0.7 + 0.2 * z],
        },
        Pair {
            g: [|z, x| z * (1.0 + x) + 0.1 * z * z + x, |z, x| 2.0 * x - z * x],
            gz: [|z, x| 1.0 + x + 0.2 * z, |_, x| -x],
            h: [|z, _| 0.5 + z, |_, x| 0.3 * x],
        },
        Pair {
            g: [|z, x| 3.0 * z - 0.5 * x * x, |z, x| x * x + z],
            gz: [|_, _| 3.0, |_, _| 1.0],
            h: [|_, _| -1.2, |z, x| 0.4 + 0.1 * z * x],
        },
    ]
}

/// Newton's method for `(f1, f2)(z, x) = (u, v)`.
fn solve2(p: &Pair, u: f64, v: f64, mut z: f64, mut x: f64) -> (f64, f64) {
    for _ in 0..100 {
        let r = [p.f(0, z, x) - u, p.f(1, z, x) - v];
        if r[0].abs().max(r[1].abs()) < 1e-15 {
            break;
        }
        let e = 1e-7;
        let j = [
            [(p.f(0, z + e, x) - p.f(0, z - e, x)) / (2.0 * e), (p.f(0, z, x + e) - p.f(0, z, x - e)) / (2.0 * e)],
            [(p.f(1, z + e, x) - p.f(1, z - e, x)) / (2.0 * e), (p.f(1, z, x + e) - p.f(1, z, x - e)) / (2.0 * e)],
        ];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        z -= (r[0] * j[1][1] - r[1] * j[0][1]) / det;
        x -= (j[0][0] * r[1] - j[1][0] * r[0]) / det;
    }
    (z, x)
}

/// `x` with `α(x) = u`, where `α(x) = f1(ρ(x), x)`.
fn solve_alpha(p: &Pair, u: f64) -> f64 {
    let alpha = |x: f64| (p.g[0])(rho_of(x), x);
    let mut x = 1.0;
    for _ in 0..100 {
        let d = (alpha(x + 1e-6) - alpha(x - 1e-6)) / 2e-6;
        x -= (alpha(x) - u) / d;
    }
    x
}




/// Germs with series entries of length 3 whose `a2` has a rational square root.
pub fn exact_germs() -> impl Strategy<Value = SingularGerm<Rational>> {
    (
        prop::collection::vec((-9i64..=9, 1i64..=5), 3),
        prop::collection::vec((-9i64..=9, 1i64..=5), 3),
        (1i64..=7, 1i64..=4),
        prop::collection::vec((-9i64..=9, 1i64..=5), 2),
        prop::collection::vec(nonzero(), 3),
    )
        .prop_map(|(rho, a0, q, a2_tail, a3)| {
            let mut a2 = vec![(q.0 * q.0, q.1 * q.1)];
            a2.extend(a2_tail);
            SingularGerm {
                rho: local(&rho),
                a0: local(&a0),
                a2: local(&a2),
                a3: local(&a3),
                a4: None,
                center: Rational::one(),
                side: -1,
            }
        })
}

/// G(u0) = z0, G'(u0) g'(z0) = 1 and g'(z0) H + h g'(z0)^{-3/2} = 0,
/// coefficientwise in x.
pub fn inversion_identities(f: &SingularGerm<Rational>) -> Result<(), String> {
    let g = invert_germ(f).map_err(|e| e.to_string())?;
    let n = f.len();
    if g.a0 != f.rho || g.rho != f.a0 {
        return Err("centre and value are not swapped".into());
    }
    if f.a2.mul(&g.a2) != Local::constant(Rational::one(), n) {
        return Err("linear terms are not reciprocal".into());
    }
    let lhs = f.a2.mul(&g.a3).add(&f.a3.mul(&g.a2.abs_three_halves().ok_or("no square root")?));
    if lhs != Local::constant(int(0), n) {
        return Err("3/2 terms do not cancel".into());
    }
    Ok(())
}

/// Distance between the inverse germ and a bisection inverse at 10 random germs.
pub fn bisection_errors() -> Vec<f64> {
    let mut rng = 0x2545f4914f6cdd1du64;
    let mut next = || {
        rng ^= rng << 13;
        rng ^= rng >> 7;
        rng ^= rng << 17;
        (rng >> 11) as f64 / (1u64 << 53) as f64
    };
    let mut out = Vec::new();
    for _ in 0..10 {
        let mut f = SingularGerm::scalar(0.5 + next(), next() - 0.5, 0.5 + 2.0 * next(), next() - 0.5);
        f.a4 = Some(Local(vec![next() - 0.5]));
        let g = invert_germ(&f).unwrap();
        // u < u0 on the side z < ρ since a2 > 0
        let u = f.a0.0[0] - 1e-5 * (1.0 + next());
        out.push((bisect(&f, u) - g.eval(u, 0.0)).abs());
    }
    out
}

#[derive(Debug)]
pub struct TransferRun {
    /// Largest error of `R(u)` and `β(u)` against Newton solves.
    pub curve_error: f64,
    /// Germ errors at offsets `1e-2 / 2^j` from the singular curve.
    pub errors: Vec<f64>,
    pub on_branch: bool,
}

impl TransferRun {
    pub fn min_order(&self) -> f64 {
        self.errors.windows(2).map(|w| (w[0] / w[1]).log2()).fold(f64::INFINITY, f64::min)
    }
}

pub fn transfer_runs() -> Vec<TransferRun> {
    let mut out = Vec::new();
    for p in pairs() {
        let t = transfer(&p.germ(0, 8), &p.germ(1, 8)).unwrap();
        let (zg, xg) = (&t.z_germ, &t.x_germ);
        let mut curve_error = 0f64;
        for du in [-4e-3, -1e-3, 1e-3, 4e-3] {
            let x = solve_alpha(&p, t.u0 + du);
            let r = (p.g[1])(rho_of(x), x);
            curve_error = curve_error.max((t.curve.eval(du) - r).abs()).max((t.beta.eval(du) - x).abs());
        }
        let du = 2e-3;
        let u = t.u0 + du;
        let r = t.curve.eval(du);
        let mut errors = Vec::new();
        let mut on_branch = true;
        for j in 0..10 {
            let d = xg.side as f64 * 1e-2 / 2f64.powi(j);
            let xp = xg.a0.eval(du) + xg.a2.eval(du) * d + xg.a3.eval(du) * d.abs().powf(1.5);
            let zp = zg.a0.eval(du) + zg.a2.eval(du) * d + zg.a3.eval(du) * d.abs().powf(1.5);
            let (z, x) = solve2(&p, u, r + d, zp, xp);
            on_branch &= rho_of(x) - z >= -1e-12;
            errors.push((x - xp).abs().max((z - zp).abs()));
        }
        out.push(TransferRun { curve_error, errors, on_branch });
    }
    out
}

/// A pair with `h2 = c h1` and `g2z = g1z` (so `J4 = (c − 1) h1 / g1z^{3/2}`),
/// and the same pair at the coupling `c = g2z/g1z`.
pub fn coupling_pair(c: f64, g2z: f64) -> (SingularGerm, SingularGerm) {
    let f1 = SingularGerm {
        rho: Local(vec![1.0, -0.5]),
        a0: Local(vec![2.0, 1.0]),
        a2: Local(vec![4.0, 0.0]),
        a3: Local(vec![3.0, 0.0]),
        a4: None,
        center: 1.0,
        side: -1,
    };
    let mut f2 = f1.clone();
    f2.a0 = Local(vec![0.5, 3.0]);
    f2.a2 = Local(vec![g2z, 0.0]);
    f2.a3 = f1.a3.scale(&c);
    (f1, f2)
}

/// Whether the transfer rejects the pair for failing the coupling condition.
pub fn coupling_fails(f1: &SingularGerm, f2: &SingularGerm) -> bool {
    matches!(transfer(f1, f2), Err(SingularError::Degenerate(m)) if m.contains("coupling"))
}
