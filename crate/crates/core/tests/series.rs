use mapgf::series::{rat, Marker, MarkerSet, MultiSeries, Rational};
use proptest::prelude::*;

const ORDER: usize = 5;

fn markers() -> MarkerSet {
    MarkerSet::new(vec![Marker::raw("y", 20), Marker::centered("s", 3)]).unwrap()
}

fn series(terms: Vec<(usize, u32, u32, i64, i64)>) -> MultiSeries {
    let t = terms.into_iter().map(|(n, a, b, p, q)| (n, vec![a, b], rat(p, q)));
    MultiSeries::from_terms(&markers(), ORDER, t).unwrap()
}

fn arb_series() -> impl Strategy<Value = MultiSeries> {
    prop::collection::vec((0..=ORDER, 0..=2u32, 0..=2u32, -5..=5i64, 1..=4i64), 0..8).prop_map(series)
}

/// Series in `s` only, for binding the raw marker.
fn arb_binding() -> impl Strategy<Value = MultiSeries> {
    prop::collection::vec((0..=ORDER, 0..=3u32, -3..=3i64, 1..=3i64), 0..5)
        .prop_map(|v| series(v.into_iter().map(|(n, b, p, q)| (n, 0, b, p, q)).collect()))
}

/// `a` made a unit: no raw marker at `z^0` and a nonzero constant.
fn unit_constant(a: &MultiSeries) -> MultiSeries {
    let kept = a.terms().filter(|(n, m, _)| *n > 0 || m[0] == 0).map(|(n, m, c)| (n, m.clone(), c.clone()));
    let a = MultiSeries::from_terms(&markers(), ORDER, kept).unwrap();
    let c = a.coeff(0, &[0, 0]).unwrap();
    let shift = if c == Rational::from_integer(0.into()) { rat(1, 1) } else { rat(0, 1) };
    a.add(&MultiSeries::constant(&markers(), ORDER, shift)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn ring_axioms(a in arb_series(), b in arb_series(), c in arb_series()) {
        prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        prop_assert_eq!(a.add(&b).unwrap().add(&c).unwrap(), a.add(&b.add(&c).unwrap()).unwrap());
        let left = a.mul(&b.add(&c).unwrap()).unwrap();
        prop_assert_eq!(left, a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap());
        prop_assert!(a.sub(&a).unwrap().is_zero());
        prop_assert_eq!(a.mul(&MultiSeries::one(&markers(), ORDER)).unwrap(), a);
    }

    #[test]
    fn invert_round_trip(a in arb_series()) {
        let u = unit_constant(&a);
        let inv = u.invert_unit().unwrap();
        prop_assert_eq!(u.mul(&inv).unwrap(), MultiSeries::one(&markers(), ORDER));
    }

    #[test]
    fn substitute_is_a_homomorphism(a in arb_series(), b in arb_series(), y in arb_binding(), w in arb_series()) {
        // z ← z·w keeps valuation 1
        let u = MultiSeries::z(&markers(), ORDER).mul(&w).unwrap();
        let sub = |x: &MultiSeries| x.substitute(&markers(), &[("y".to_string(), y.clone())], Some(&u)).unwrap();
        prop_assert_eq!(sub(&a.mul(&b).unwrap()), sub(&a).mul(&sub(&b)).unwrap());
        prop_assert_eq!(sub(&a.add(&b).unwrap()), sub(&a).add(&sub(&b)).unwrap());
    }

    #[test]
    fn fixed_point_has_zero_residual(a in arb_series(), b in arb_series()) {
        let z = MultiSeries::z(&markers(), ORDER);
        let phi = |y: &MultiSeries| z.mul(&a.add(&b.mul(&y.mul(y)?)?)?);
        let y = MultiSeries::fixed_point(&markers(), ORDER, phi).unwrap();
        prop_assert_eq!(phi(&y).unwrap(), y);
    }
}
