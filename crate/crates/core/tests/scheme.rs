use mapgf::family::{Family, FamilySpec, Statistic};
use mapgf::maps::{oracle_series, oracle_series_all, DEFAULT_LIMIT};
use mapgf::scheme::{builtin_schemes, find_scheme, Expr, InnerSeries, SchemeError, SchemeSpec};
use mapgf::series::{int, Rational};
use mapgf::tutte::solve_m1;

fn oracle_pair(s: &SchemeSpec, n: usize) -> (InnerSeries, mapgf::series::MultiSeries) {
    let mut v = oracle_series_all(&[s.inner.clone(), s.outer.clone()], n, DEFAULT_LIMIT).unwrap();
    let outer = v.pop().unwrap();
    (InnerSeries::Full(v.pop().unwrap()), outer)
}

#[test]
fn catalogue_matches_oracle() {
    let n = 6;
    let schemes = builtin_schemes(2 * n);
    let mut specs = Vec::new();
    for s in &schemes {
        specs.push(s.inner.clone());
        specs.push(s.outer.clone());
    }
    let series = oracle_series_all(&specs, n, DEFAULT_LIMIT).unwrap();
    for (i, s) in schemes.iter().enumerate() {
        let inner = InnerSeries::Full(series[2 * i].clone());
        let outer = &series[2 * i + 1];
        let r = s.verify(&inner, outer, n).unwrap();
        assert!(r.is_zero(), "{}: {:?}", s.id, r.first_failing);
        assert_eq!(&s.extract_outer(&inner, n).unwrap(), outer, "{}", s.id);
    }
}

fn fails(s: &SchemeSpec, n: usize) -> bool {
    let (inner, outer) = oracle_pair(s, n);
    !s.verify(&inner, &outer, n).unwrap().is_zero()
}

#[test]
fn literal_readings_fail() {
    let n = 4;
    // the face inside a root loop indexed by the root degree of its contents
    let mut s = find_scheme("m1-m2l.faces", 2 * n).unwrap();
    let p = Expr::one_plus_inner();
    let inside = Expr::var("x1") + Expr::Inner.shift_faces(0);
    let step = Expr::Z * Expr::T * inside.clone();
    s.correction = Some(Expr::Z * Expr::T * inside * p);
    let seq = (Expr::one() - step).inv();
    for (name, e) in s.bindings.iter_mut() {
        if name == "t" {
            *e = Expr::T * seq.clone();
        } else {
            let l: usize = name[1..].parse().unwrap();
            *e = seq.clone().pow(l as u32).shift_faces(l);
        }
    }
    assert!(fails(&s, n));

    // root degree substituted by the sequence factor alone
    let mut s = find_scheme("m1-m2b.faces", 2 * n).unwrap();
    let seq = (Expr::one() - Expr::Z * Expr::T.pow(2) * Expr::one_plus_inner()).inv();
    s.bindings.retain(|(name, _)| name != "t");
    s.bindings.push(("t".into(), seq));
    assert!(fails(&s, n));

    // 2-connected maps through their simple core without removing the loop
    let mut s = find_scheme("m4-m5", n).unwrap();
    s.z_subst = Expr::Z * Expr::one_plus_inner();
    s.correction = None;
    assert!(fails(&s, n));

    // coreless term written without the empty map
    let mut s = find_scheme("m1-m2l.ellgon:2", n).unwrap();
    s.correction = Some(Expr::Z * Expr::Inner.pow(2));
    assert!(fails(&s, n));
}

#[test]
fn block_extraction_from_general_maps() {
    let s = find_scheme("m1-m4", 3).unwrap();
    let m1 = oracle_series(&FamilySpec::plain(Family::M1), 3, DEFAULT_LIMIT).unwrap();
    let m4 = s.extract_outer(&InnerSeries::Full(m1), 3).unwrap();
    assert_eq!((1..=3).map(|n| m4.coeff(n, &[]).unwrap()).collect::<Vec<_>>(), vec![int(2), int(1), int(2)]);
}

#[test]
fn round_trip_from_catalytic_solution() {
    let n = 8;
    let inner = InnerSeries::Full(solve_m1(n, 2 * n).unwrap());
    for id in ["m1-m4.faces", "m1-m2l.faces", "m1-m2b.faces"] {
        let s = find_scheme(id, 2 * n).unwrap();
        let outer = s.extract_outer(&inner, n).unwrap();
        assert!(s.verify(&inner, &outer, n).unwrap().is_zero(), "{id}");
    }
    // at face markers 1, the face-count extraction of 2-connected maps is the plain one
    let s = find_scheme("m1-m4.faces", 2 * n).unwrap();
    let m4 = s.extract_outer(&inner, n).unwrap();
    let m1 = match &inner {
        InnerSeries::Full(f) => f.specialize("t", &Rational::from_integer(1.into())).unwrap(),
        _ => unreachable!(),
    };
    let plain = find_scheme("m1-m4", n).unwrap();
    let mut m1_plain = m1;
    for l in 1..=2 * n {
        m1_plain = m1_plain.specialize(&format!("x{l}"), &int(1)).unwrap();
    }
    let m4_plain = plain.extract_outer(&InnerSeries::Full(m1_plain), n).unwrap();
    let mut m4_spec = m4;
    for l in 1..=2 * n {
        m4_spec = m4_spec.specialize(&format!("x{l}"), &int(1)).unwrap();
    }
    assert_eq!(m4_spec, m4_plain);
}

#[test]
fn specialization_square() {
    let n = 6;
    let s = find_scheme("m1-m4.ellgon:2", n).unwrap();
    let (inner, _) = oracle_pair(&s, n);
    let marked = s.extract_outer(&inner, n).unwrap().specialize("xh2", &int(1)).unwrap();
    let InnerSeries::Full(m1) = inner else { unreachable!() };
    let plain = find_scheme("m1-m4", n).unwrap();
    let unmarked = plain.extract_outer(&InnerSeries::Full(m1.specialize("xh2", &int(1)).unwrap()), n).unwrap();
    assert_eq!(marked, unmarked);
}

#[test]
fn loopless_and_bridgeless_differ_on_patterns() {
    let n = 6;
    let pat = Statistic::Pattern("ellgon:1".into());
    let specs = [
        FamilySpec::new(Family::M2l, vec![pat.clone()]),
        FamilySpec::new(Family::M2b, vec![pat]),
    ];
    let v = oracle_series_all(&specs, n, DEFAULT_LIMIT).unwrap();
    assert_ne!(v[0], v[1]);
    assert_eq!(v[0].specialize("xp:ellgon:1", &int(1)).unwrap(), v[1].specialize("xp:ellgon:1", &int(1)).unwrap());
}

#[test]
fn corrupted_outer_is_pinpointed() {
    let n = 4;
    let s = find_scheme("m1-m4.ellgon:3", n).unwrap();
    let (inner, outer) = oracle_pair(&s, n);
    let bump = mapgf::series::MultiSeries::monomial(outer.markers(), n, 3, vec![1], int(1)).unwrap();
    let r = s.verify(&inner, &outer.add(&bump).unwrap(), n).unwrap();
    assert_eq!(r.first_failing, Some((3, vec![1], "-1".to_string())));
}

#[test]
fn catalogue_errors() {
    assert!(matches!(find_scheme("m1-m9", 4), Err(SchemeError::UnknownScheme(_))));
    assert!(matches!(find_scheme("m1-m2l.ellgon:1", 4), Err(SchemeError::InvalidScheme { .. })));
    assert!(find_scheme("m1-m2b.ellgon:1", 4).is_ok());
    assert!(matches!(find_scheme("m1-m4.ellgon:2,3", 4), Err(SchemeError::InvalidScheme { .. })));
    assert!(matches!(find_scheme("m2l-m3.faces", 4), Err(SchemeError::InvalidScheme { .. })));
    assert!(matches!(find_scheme("m1-m4.faces:3", 4), Err(SchemeError::InvalidScheme { .. })));
    assert!(matches!(find_scheme("m1-m4.faces:1,3", 4), Err(SchemeError::InvalidScheme { .. })));
    assert!(matches!(find_scheme("m1-m4.pattern:nope", 4), Err(SchemeError::Map(_))));
    let s = find_scheme("m1-m4", 4).unwrap();
    let m1 = oracle_series(&FamilySpec::plain(Family::M1), 3, DEFAULT_LIMIT).unwrap();
    assert!(matches!(
        s.extract_outer(&InnerSeries::Full(m1), 4),
        Err(SchemeError::InsufficientOrder { have: 3, need: 4 })
    ));
}
