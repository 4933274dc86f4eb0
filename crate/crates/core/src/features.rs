//! Feature math used when assembling a dataset: vegetation indices from
//! band reflectances and the distance from a point to the nearest
//! power line.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const EARTH_RADIUS_M: f64 = 6_371_000.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandSample {
    pub blue: f64,
    pub red: f64,
    pub nir: f64,
}

/// Treats a sum as zero when it vanishes relative to its largest term.
fn vanishes(sum: f64, terms: &[f64]) -> bool {
    let scale = terms.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    sum.abs() <= 4.0 * f64::EPSILON * scale
}

/// `(nir - red) / (nir + red)`
pub fn ndvi(s: &BandSample) -> Result<f64> {
    let den = s.nir + s.red;
    if vanishes(den, &[s.nir, s.red]) {
        return Err(Error::ZeroDenominator);
    }
    Ok((s.nir - s.red) / den)
}

/// `2.5 (nir - red) / (nir + 6 red - 7.5 blue + 1)`
pub fn evi(s: &BandSample) -> Result<f64> {
    let den = s.nir + 6.0 * s.red - 7.5 * s.blue + 1.0;
    if vanishes(den, &[s.nir, 6.0 * s.red, 7.5 * s.blue, 1.0]) {
        return Err(Error::ZeroDenominator);
    }
    Ok(2.5 * (s.nir - s.red) / den)
}

/// Latitude and longitude in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoPoint {
    pub lat: f64,
    pub lon: f64,
}

impl GeoPoint {
    pub fn new(lat: f64, lon: f64) -> Result<Self> {
        if !(-90.0..=90.0).contains(&lat) || !(-180.0..=180.0).contains(&lon) {
            return Err(Error::invalid("latitude or longitude out of range"));
        }
        Ok(GeoPoint { lat, lon })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polyline {
    points: Vec<GeoPoint>,
}

impl Polyline {
    pub fn new(points: Vec<GeoPoint>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::invalid("a polyline needs at least two points"));
        }
        Ok(Polyline { points })
    }

    pub fn points(&self) -> &[GeoPoint] {
        &self.points
    }
}

/// Great-circle distance in meters (haversine).
pub fn haversine(a: GeoPoint, b: GeoPoint) -> f64 {
    let (p1, p2) = (a.lat.to_radians(), b.lat.to_radians());
    let dp = p2 - p1;
    let dl = (b.lon - a.lon).to_radians();
    let h = libm::pow(libm::sin(dp / 2.0), 2.0) + libm::cos(p1) * libm::cos(p2) * libm::pow(libm::sin(dl / 2.0), 2.0);
    2.0 * EARTH_RADIUS_M * libm::asin(libm::sqrt(h.min(1.0)))
}

/// Longitude difference folded into `[-180, 180)`.
fn wrap_lon(d: f64) -> f64 {
    let w = (d + 180.0) % 360.0;
    (if w < 0.0 { w + 360.0 } else { w }) - 180.0
}

/// Distance from `p` to segment `a-b`, the segment being the straight line
/// in latitude/longitude. The closest point is first estimated in an
/// equirectangular plane centered on `p`, then refined by a golden-section
/// search of the great-circle distance along the segment. The refinement
/// keeps the result independent of how a line is cut into segments.
fn segment_distance(p: GeoPoint, a: GeoPoint, b: GeoPoint) -> f64 {
    let dlon = wrap_lon(b.lon - a.lon);
    let at = |t: f64| {
        haversine(
            p,
            GeoPoint {
                lat: a.lat + t * (b.lat - a.lat),
                lon: a.lon + t * dlon,
            },
        )
    };
    let k = libm::cos(p.lat.to_radians());
    let project = |q: GeoPoint| (wrap_lon(q.lon - p.lon) * k, q.lat - p.lat);
    let (ax, ay) = project(a);
    let (bx, by) = project(b);
    let (dx, dy) = (bx - ax, by - ay);
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return at(0.0);
    }
    let planar = (-(ax * dx + ay * dy) / len2).clamp(0.0, 1.0);

    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let (mut f1, mut f2) = (at(x1), at(x2));
    for _ in 0..80 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = at(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = at(x2);
        }
    }
    [at(planar), f1, f2, at(0.0), at(1.0)].into_iter().fold(f64::INFINITY, f64::min)
}

/// Meters from `p` to the closest segment of any line.
pub fn distance_to_nearest_line(p: GeoPoint, lines: &[Polyline]) -> Result<f64> {
    if lines.is_empty() {
        return Err(Error::NoLines);
    }
    let d = lines
        .iter()
        .flat_map(|l| l.points.windows(2))
        .map(|w| segment_distance(p, w[0], w[1]))
        .fold(f64::INFINITY, f64::min);
    Ok(d)
}

#[cfg(test)]
mod tests {
    use alloc::vec;

    use super::*;

    fn pt(lat: f64, lon: f64) -> GeoPoint {
        GeoPoint::new(lat, lon).unwrap()
    }

    #[test]
    fn ndvi_cases() {
        let s = |nir, red| BandSample { blue: 0.0, red, nir };
        assert_eq!(ndvi(&s(0.3, 0.3)).unwrap(), 0.0);
        assert_eq!(ndvi(&s(0.5, 0.1)).unwrap(), 0.4 / 0.6);
        assert_eq!(ndvi(&s(0.7, 0.0)).unwrap(), 1.0);
        assert_eq!(ndvi(&s(0.0, 0.0)), Err(Error::ZeroDenominator));
    }

    #[test]
    fn evi_cases() {
        let v = evi(&BandSample {
            blue: 0.05,
            red: 0.1,
            nir: 0.5,
        })
        .unwrap();
        assert!((v - 2.5 * 0.4 / 1.725).abs() < 1e-15);
        assert!((v - 0.5797).abs() < 1e-4);
        let flat = BandSample {
            blue: 0.2,
            red: 0.3,
            nir: 0.3,
        };
        assert_eq!(evi(&flat).unwrap(), 0.0);
        let (nir, red) = (0.5, 0.1);
        let zero = BandSample {
            blue: (nir + 6.0 * red + 1.0) / 7.5,
            red,
            nir,
        };
        assert_eq!(evi(&zero), Err(Error::ZeroDenominator));
    }

    #[test]
    fn vertex_and_north_offset() {
        let line = Polyline::new(vec![pt(0.0, -1.0), pt(0.0, 1.0)]).unwrap();
        assert_eq!(distance_to_nearest_line(pt(0.0, 1.0), &[line.clone()]).unwrap(), 0.0);
        let d = distance_to_nearest_line(pt(0.01, 0.3), &[line]).unwrap();
        let want = 0.01f64.to_radians() * EARTH_RADIUS_M;
        assert!((d - want).abs() < 1e-6, "{d} vs {want}");
        assert!((d - 1111.95).abs() < 0.01);
    }

    #[test]
    fn nearest_of_two_lines() {
        let near = Polyline::new(vec![pt(10.0, 10.0), pt(10.0, 11.0)]).unwrap();
        let far = Polyline::new(vec![pt(12.0, 10.0), pt(12.0, 11.0)]).unwrap();
        let p = pt(10.2, 10.5);
        let a = distance_to_nearest_line(p, &[near.clone(), far.clone()]).unwrap();
        assert_eq!(a, distance_to_nearest_line(p, &[near]).unwrap());
        assert_eq!(distance_to_nearest_line(p, &[]), Err(Error::NoLines));
    }

    #[test]
    fn invalid_geometry() {
        assert!(GeoPoint::new(91.0, 0.0).is_err());
        assert!(GeoPoint::new(0.0, -180.5).is_err());
        assert!(Polyline::new(vec![pt(0.0, 0.0)]).is_err());
    }

    #[test]
    fn antimeridian_segment() {
        let line = Polyline::new(vec![pt(0.0, 179.5), pt(0.0, -179.5)]).unwrap();
        let d = distance_to_nearest_line(pt(0.01, 180.0), &[line]).unwrap();
        assert!((d - 0.01f64.to_radians() * EARTH_RADIUS_M).abs() < 1e-6);
    }
}
