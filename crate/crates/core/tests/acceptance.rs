//! Acceptance suite: one PASS/FAIL line per criterion.

mod common;

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use mapgf::family::{Family, FamilySpec};
use mapgf::maps::{classify, exterior_edge_check, family_counts as oracle_counts, for_each_map, oracle_series_all, DEFAULT_LIMIT};
use mapgf::pipeline::{face_clt, family_counts, two_gon_clt, two_gon_transfer_check};
use mapgf::scheme::{builtin_schemes, find_scheme, InnerSeries, SCHEME_KINDS};
use mapgf::series::{int, rat, Rational};
use mapgf::singular::estimate_singularity;
use mapgf::tutte::m1_counts;
use num_traits::One;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn oracle_totals() -> Outcome {
    let expected: Vec<u64> = vec![2, 9, 54, 378, 2916, 24057];
    let oracle = oracle_counts(6, DEFAULT_LIMIT).map_err(|e| e.to_string())?;
    let enumerated = oracle[&Family::M1].clone();
    let dp: Vec<Rational> = m1_counts(6, |_| Rational::one(), false)[1..].to_vec();
    let same = enumerated.iter().zip(&dp).all(|(a, b)| int(*a as i64) == *b);
    check(enumerated == expected && same, format!("enumerated {enumerated:?}, catalytic DP agrees: {same}"))
}

/// Criteria 2 and 3 share one oracle run at n = 6.
fn scheme_catalogue() -> (Outcome, Outcome) {
    let n = 6;
    let schemes = builtin_schemes(2 * n);
    let specs: Vec<FamilySpec> = schemes.iter().flat_map(|s| [s.inner.clone(), s.outer.clone()]).collect();
    let series = match oracle_series_all(&specs, n, DEFAULT_LIMIT) {
        Ok(s) => s,
        Err(e) => return (Err(e.to_string()), Err(e.to_string())),
    };
    let (mut uni, mut multi) = ((0, Vec::new()), (0, Vec::new()));
    for (i, s) in schemes.iter().enumerate() {
        let univariate = SCHEME_KINDS.contains(&s.id.as_str());
        let order = if univariate || !s.id.contains("ellgon") { 5 } else { 6 };
        let inner = InnerSeries::Full(series[2 * i].clone());
        let ok = matches!(s.verify(&inner, &series[2 * i + 1], order), Ok(r) if r.is_zero());
        let tally = if univariate { &mut uni } else { &mut multi };
        tally.0 += 1;
        if !ok {
            tally.1.push(s.id.clone());
        }
    }
    let report = |(count, failed): (usize, Vec<String>), what: &str| {
        check(failed.is_empty(), format!("{} of {count} {what} schemes with zero residual; failing {failed:?}", count - failed.len()))
    };
    (report(uni, "univariate"), report(multi, "marked"))
}

fn extraction() -> Outcome {
    let n = 6;
    let mut notes = Vec::new();
    let mut ok = true;
    for l in [2, 3] {
        let s = find_scheme(&format!("m1-m4.ellgon:{l}"), 2 * n).map_err(|e| e.to_string())?;
        let v = oracle_series_all(&[s.inner.clone(), s.outer.clone()], n, DEFAULT_LIMIT).map_err(|e| e.to_string())?;
        let extracted = s.extract_outer(&InnerSeries::Full(v[0].clone()), n).map_err(|e| e.to_string())?;
        let same = extracted == v[1];
        ok &= same;
        notes.push(format!("{l}-gons exact: {same}"));
    }
    let m1 = oracle_series_all(&[FamilySpec::plain(Family::M1)], 3, DEFAULT_LIMIT).map_err(|e| e.to_string())?;
    let m4 = find_scheme("m1-m4", 3)
        .and_then(|s| s.extract_outer(&InnerSeries::Full(m1[0].clone()), 3))
        .map_err(|e| e.to_string())?;
    let first: Vec<Rational> = (1..=3).map(|k| m4.coeff(k, &[]).unwrap()).collect();
    ok &= first == vec![int(2), int(1), int(2)];
    notes.push(format!("M4 [y^1..3] = {}", first.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", ")));
    check(ok, notes.join("; "))
}

fn exterior_edges() -> Outcome {
    let (total, passed) = (AtomicUsize::new(0), AtomicUsize::new(0));
    for n in 1..=6 {
        for_each_map(n, DEFAULT_LIMIT, |m| {
            if classify(m).two_connected {
                total.fetch_add(1, Ordering::Relaxed);
                if (1..=6).all(|l| exterior_edge_check(m, l)) {
                    passed.fetch_add(1, Ordering::Relaxed);
                }
            }
        })
        .map_err(|e| e.to_string())?;
    }
    let (t, p) = (total.into_inner(), passed.into_inner());
    check(t > 0 && t == p, format!("{p} of {t} 2-connected maps, sizes 1..6, l = 1..6"))
}

fn germ_algebra() -> Outcome {
    let mut runner = TestRunner::new(Config { cases: 1000, failure_persistence: None, ..Config::default() });
    let exact = runner.run(&common::exact_germs(), |f| common::inversion_identities(&f).map_err(TestCaseError::fail));
    let bisection = common::bisection_errors().into_iter().fold(0.0, f64::max);
    let runs = common::transfer_runs();
    let worst = runs.iter().map(|r| r.curve_error.max(r.errors[9])).fold(0.0, f64::max);
    let order = runs.iter().map(|r| r.min_order()).fold(f64::INFINITY, f64::min);
    let branch = runs.iter().all(|r| r.on_branch);
    let (f1, f2) = common::coupling_pair(2.0, 8.0);
    let (g1, g2) = common::coupling_pair(6.5 / 3.0, 8.0);
    let coupling = common::coupling_fails(&f1, &f2) && !common::coupling_fails(&g1, &g2);
    check(
        exact.is_ok() && bisection <= 1e-10 && worst <= 1e-8 && order >= 1.9 && branch && runs.len() == 3 && coupling,
        format!(
            "1000 exact inversions {}; bisection error {bisection:.1e}; 3 transfer pairs error {worst:.1e}, order {order:.2}; coupling error path {}",
            if exact.is_ok() { "ok" } else { "failed" },
            if coupling { "exact" } else { "wrong" }
        ),
    )
}

fn singularities() -> Outcome {
    let order = 60;
    let mut ok = true;
    let mut notes = Vec::new();
    for f in Family::ALL {
        let counts = family_counts(f, order).map_err(|e| e.to_string())?;
        let e = estimate_singularity(&counts).map_err(|e| e.to_string())?;
        let good = (e.exponent + 2.5).abs() <= 0.05;
        ok &= good;
        if f == Family::M1 {
            let gap = (e.rho - 1.0 / 12.0).abs();
            ok &= gap <= 1e-4;
            notes.push(format!("M1 |rho - 1/12| = {gap:.1e}"));
        }
        notes.push(format!("{f} {:.3}", e.exponent));
    }
    check(ok, format!("N = {order}: {}", notes.join(", ")))
}

fn clt() -> Outcome {
    let h = rat(1, 64);
    let mut ok = true;
    let mut notes = Vec::new();
    let mut min_var = f64::INFINITY;
    let mut reports = Vec::new();
    for l in 1..=6 {
        reports.push(face_clt(Family::M1, l, 60, &h).map_err(|e| e.to_string())?);
    }
    for l in [2, 3, 4, 6] {
        reports.push(face_clt(Family::B1, l, 60, &h).map_err(|e| e.to_string())?);
    }
    reports.push(two_gon_clt(40, &h).map_err(|e| e.to_string())?);
    for r in &reports {
        min_var = min_var.min(r.clt.sigma2);
        if r.family == Family::M1 && (r.marker == "x2" || r.marker == "x3") {
            let rel = (r.clt.mu / r.mean_limit - 1.0).abs();
            ok &= rel <= 0.01;
            notes.push(format!(
                "{}: mu {:.6} vs lim E X_n/n {:.6} (rel {rel:.1e}; raw E X_60/60 {:.6})",
                r.marker, r.clt.mu, r.mean_limit, r.mean_at_order
            ));
        }
    }
    ok &= min_var >= -1e-4;
    notes.push(format!("min sigma2 over {} statistics {min_var:.4}", reports.len()));
    check(ok, notes.join("; "))
}

fn transfer_consistency() -> Outcome {
    let checks = two_gon_transfer_check(40, 6, &rat(1, 64)).map_err(|e| e.to_string())?;
    let ok = !checks.is_empty() && checks.iter().all(|c| c.agrees());
    let notes: Vec<String> = checks
        .iter()
        .map(|c| {
            format!(
                "x2-hat = {:.6}: predicted rho {:.12} at v = {:.6}, estimated {:.12}, gap {:.1e} within {:.1e}",
                c.x,
                c.predicted,
                c.v,
                c.estimated,
                (c.predicted - c.estimated).abs(),
                c.predicted_spread + c.estimated_spread
            )
        })
        .collect();
    check(ok, notes.join("; "))
}

fn main() -> ExitCode {
    let titles = [
        "oracle ground truth",
        "univariate scheme catalogue",
        "marked scheme catalogue",
        "extraction",
        "exterior edge double counting",
        "germ algebra",
        "singularity estimation",
        "CLT parameters",
        "transfer consistency",
    ];
    let timed = |f: &dyn Fn() -> Outcome| {
        let t = Instant::now();
        let r = f();
        (r, t.elapsed().as_secs_f64())
    };
    let mut results: BTreeMap<usize, (Outcome, f64)> = BTreeMap::new();
    results.insert(1, timed(&oracle_totals));
    let t = Instant::now();
    let (two, three) = scheme_catalogue();
    let s = t.elapsed().as_secs_f64();
    results.insert(2, (two, s));
    results.insert(3, (three, s));
    results.insert(4, timed(&extraction));
    results.insert(5, timed(&exterior_edges));
    results.insert(6, timed(&germ_algebra));
    results.insert(7, timed(&singularities));
    results.insert(8, timed(&clt));
    results.insert(9, timed(&transfer_consistency));

    let mut failed = 0;
    for (i, (r, secs)) in &results {
        let (tag, detail) = match r {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {i} {tag} [{}] ({secs:.1}s): {detail}", titles[i - 1]);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
