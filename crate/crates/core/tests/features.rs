use proptest::prelude::*;
use tabsyn_core::features::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-9)
}

fn point() -> impl Strategy<Value = GeoPoint> {
    (-60.0..60.0f64, -170.0..170.0f64).prop_map(|(lat, lon)| GeoPoint::new(lat, lon).unwrap())
}

proptest! {
    #[test]
    fn ndvi_is_bounded(nir in 0.0..1.0f64, red in 0.0..1.0f64) {
        prop_assume!(nir + red > 0.0);
        let v = ndvi(&BandSample { blue: 0.0, red, nir }).unwrap();
        prop_assert!((-1.0..=1.0).contains(&v));
    }

    #[test]
    fn evi_numerator_is_antisymmetric(nir in 0.0..1.0f64, red in 0.0..1.0f64, blue in 0.0..0.3f64) {
        let s = BandSample { blue, red, nir };
        let den = nir + 6.0 * red - 7.5 * blue + 1.0;
        prop_assume!(den.abs() > 1e-6);
        // swap the bands in the numerator and keep the same denominator by
        // moving the difference onto blue
        let swapped_den_blue = (red + 6.0 * nir + 1.0 - den) / 7.5;
        let t = BandSample { blue: swapped_den_blue, red: nir, nir: red };
        let (a, b) = (evi(&s).unwrap(), evi(&t).unwrap());
        prop_assert!((a + b).abs() <= 1e-12 * a.abs().max(1.0));
    }

    #[test]
    fn distance_ignores_vertex_order(p in point(), a in point(), b in point(), c in point()) {
        let fwd = Polyline::new(vec![a, b, c]).unwrap();
        let rev = Polyline::new(vec![c, b, a]).unwrap();
        let d1 = distance_to_nearest_line(p, &[fwd]).unwrap();
        let d2 = distance_to_nearest_line(p, &[rev]).unwrap();
        prop_assert!(rel(d1, d2) <= 1e-6);
    }

    #[test]
    fn midpoint_subdivision_changes_nothing(
        a in point(),
        (dlat, dlon) in (-1.0..1.0f64, -1.0..1.0f64),
        (plat, plon) in (-3.0..3.0f64, -3.0..3.0f64),
    ) {
        let b = GeoPoint::new(a.lat + dlat, a.lon + dlon).unwrap();
        let p = GeoPoint::new(a.lat + plat, a.lon + plon).unwrap();
        let mid = GeoPoint::new((a.lat + b.lat) / 2.0, (a.lon + b.lon) / 2.0).unwrap();
        let whole = distance_to_nearest_line(p, &[Polyline::new(vec![a, b]).unwrap()]).unwrap();
        let split = distance_to_nearest_line(p, &[Polyline::new(vec![a, mid, b]).unwrap()]).unwrap();
        prop_assert!(rel(whole, split) <= 1e-6);
    }
}
