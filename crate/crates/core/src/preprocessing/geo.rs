//! Geodesic distances on the WGS84 ellipsoid and bounding-box normalization.

use serde::{Deserialize, Serialize};

use super::normalize::affine_normalize;

const WGS84_A: f64 = 6_378_137.0;
const WGS84_F: f64 = 1.0 / 298.257_223_563;
const WGS84_B: f64 = WGS84_A * (1.0 - WGS84_F);
const MEAN_RADIUS: f64 = 6_371_008.8;

const CONVERGENCE: f64 = 1e-12;
const MAX_ITERATIONS: usize = 200;

/// Point in decimal degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoPoint {
    pub lat: f64,
    pub lon: f64,
}

impl GeoPoint {
    pub fn new(lat: f64, lon: f64) -> Self {
        GeoPoint { lat, lon }
    }

    /// Coordinate-wise midpoint; adequate for segments of a few hundred meters.
    pub fn midpoint(self, other: GeoPoint) -> GeoPoint {
        GeoPoint::new((self.lat + other.lat) / 2.0, (self.lon + other.lon) / 2.0)
    }
}

/// Result of the inverse geodesic problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geodesic {
    pub meters: f64,
    /// False when Vincenty's iteration did not converge (near-antipodal
    /// points) and the value is a great-circle approximation.
    pub converged: bool,
}

/// Inverse geodesic distance in meters (Vincenty), with a great-circle
/// fallback when the iteration fails to converge.
pub fn geodesic_distance(p: GeoPoint, q: GeoPoint) -> f64 {
    let g = vincenty_inverse(p, q);
    if !g.converged {
        log::warn!(
            "Vincenty did not converge for ({}, {}) -> ({}, {}); using great-circle distance",
            p.lat,
            p.lon,
            q.lat,
            q.lon
        );
    }
    g.meters
}

pub fn vincenty_inverse(p: GeoPoint, q: GeoPoint) -> Geodesic {
    if p == q {
        return Geodesic {
            meters: 0.0,
            converged: true,
        };
    }
    let f = WGS84_F;
    let l = (q.lon - p.lon).to_radians();
    let u1 = ((1.0 - f) * p.lat.to_radians().tan()).atan();
    let u2 = ((1.0 - f) * q.lat.to_radians().tan()).atan();
    let (sin_u1, cos_u1) = u1.sin_cos();
    let (sin_u2, cos_u2) = u2.sin_cos();

    let mut lambda = l;
    for _ in 0..MAX_ITERATIONS {
        let (sin_lambda, cos_lambda) = lambda.sin_cos();
        let sin_sigma = ((cos_u2 * sin_lambda).powi(2)
            + (cos_u1 * sin_u2 - sin_u1 * cos_u2 * cos_lambda).powi(2))
        .sqrt();
        if sin_sigma == 0.0 {
            return Geodesic {
                meters: 0.0,
                converged: true,
            };
        }
        let cos_sigma = sin_u1 * sin_u2 + cos_u1 * cos_u2 * cos_lambda;
        let sigma = sin_sigma.atan2(cos_sigma);
        let sin_alpha = cos_u1 * cos_u2 * sin_lambda / sin_sigma;
        let cos_sq_alpha = 1.0 - sin_alpha * sin_alpha;
        // equatorial line: cos_sq_alpha = 0
        let cos_2sigma_m = if cos_sq_alpha != 0.0 {
            cos_sigma - 2.0 * sin_u1 * sin_u2 / cos_sq_alpha
        } else {
            0.0
        };
        let c = f / 16.0 * cos_sq_alpha * (4.0 + f * (4.0 - 3.0 * cos_sq_alpha));
        let prev = lambda;
        lambda = l
            + (1.0 - c)
                * f
                * sin_alpha
                * (sigma + c * sin_sigma * (cos_2sigma_m + c * cos_sigma * (-1.0 + 2.0 * cos_2sigma_m * cos_2sigma_m)));
        if (lambda - prev).abs() < CONVERGENCE {
            let u_sq = cos_sq_alpha * (WGS84_A * WGS84_A - WGS84_B * WGS84_B) / (WGS84_B * WGS84_B);
            let a_coef = 1.0 + u_sq / 16384.0 * (4096.0 + u_sq * (-768.0 + u_sq * (320.0 - 175.0 * u_sq)));
            let b_coef = u_sq / 1024.0 * (256.0 + u_sq * (-128.0 + u_sq * (74.0 - 47.0 * u_sq)));
            let delta_sigma = b_coef
                * sin_sigma
                * (cos_2sigma_m
                    + b_coef / 4.0
                        * (cos_sigma * (-1.0 + 2.0 * cos_2sigma_m * cos_2sigma_m)
                            - b_coef / 6.0
                                * cos_2sigma_m
                                * (-3.0 + 4.0 * sin_sigma * sin_sigma)
                                * (-3.0 + 4.0 * cos_2sigma_m * cos_2sigma_m)));
            return Geodesic {
                meters: WGS84_B * a_coef * (sigma - delta_sigma),
                converged: true,
            };
        }
    }
    Geodesic {
        meters: great_circle(p, q),
        converged: false,
    }
}

/// Haversine distance on the mean-radius sphere.
pub fn great_circle(p: GeoPoint, q: GeoPoint) -> f64 {
    let (phi1, phi2) = (p.lat.to_radians(), q.lat.to_radians());
    let dphi = phi2 - phi1;
    let dlambda = (q.lon - p.lon).to_radians();
    let h = (dphi / 2.0).sin().powi(2) + phi1.cos() * phi2.cos() * (dlambda / 2.0).sin().powi(2);
    2.0 * MEAN_RADIUS * h.sqrt().min(1.0).asin()
}

/// Smallest lat/lon rectangle containing a set of points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoBounds {
    pub min_lat: f64,
    pub max_lat: f64,
    pub min_lon: f64,
    pub max_lon: f64,
}

impl GeoBounds {
    pub fn enclosing(points: &[GeoPoint]) -> Option<Self> {
        let first = points.first()?;
        Some(points.iter().fold(
            GeoBounds {
                min_lat: first.lat,
                max_lat: first.lat,
                min_lon: first.lon,
                max_lon: first.lon,
            },
            |b, p| GeoBounds {
                min_lat: b.min_lat.min(p.lat),
                max_lat: b.max_lat.max(p.lat),
                min_lon: b.min_lon.min(p.lon),
                max_lon: b.max_lon.max(p.lon),
            },
        ))
    }

    /// `(x, y)` in `[0, 1]^2`: longitude along x, latitude along y.
    pub fn normalize(&self, p: GeoPoint) -> (f64, f64) {
        (
            affine_normalize(p.lon, self.min_lon, self.max_lon).expect("ordered bounds"),
            affine_normalize(p.lat, self.min_lat, self.max_lat).expect("ordered bounds"),
        )
    }
}

/// Normalizes points against their own bounding rectangle.
pub fn normalize_spatial(points: &[GeoPoint]) -> (Vec<(f64, f64)>, Option<GeoBounds>) {
    match GeoBounds::enclosing(points) {
        Some(b) => (points.iter().map(|&p| b.normalize(p)).collect(), Some(b)),
        None => (vec![], None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn equator_degree() {
        let d = geodesic_distance(GeoPoint::new(0.0, 0.0), GeoPoint::new(0.0, 1.0));
        assert!((d - 111_319.490_793).abs() < 1e-3, "{d}");
        assert_eq!(geodesic_distance(GeoPoint::new(41.9, 12.5), GeoPoint::new(41.9, 12.5)), 0.0);
    }

    #[test]
    fn agrees_with_karney_reference_values() {
        // Computed with geographiclib (Karney's algorithm), WGS84.
        let cases = [
            ((41.9028, 12.4964), (41.8902, 12.4922), 1442.2456458976303),
            ((41.95, 12.40), (41.80, 12.65), 26613.33826987077),
            ((-33.9, 18.4), (51.5, -0.12), 9632341.016456127),
        ];
        for ((la1, lo1), (la2, lo2), expected) in cases {
            let d = geodesic_distance(GeoPoint::new(la1, lo1), GeoPoint::new(la2, lo2));
            assert!((d - expected).abs() < 1e-3, "{d} vs {expected}");
        }
    }

    #[test]
    fn antipodal_falls_back() {
        let g = vincenty_inverse(GeoPoint::new(0.0, 0.0), GeoPoint::new(0.5, 179.7));
        assert!(!g.converged);
        assert!(g.meters > 19_000_000.0);
    }

    #[test]
    fn spatial_normalization() {
        let (xy, b) = normalize_spatial(&[GeoPoint::new(41.9, 12.5)]);
        assert_eq!(xy, vec![(0.0, 0.0)]);
        assert!(b.is_some());
        let pts = [GeoPoint::new(41.8, 12.4), GeoPoint::new(42.0, 12.6), GeoPoint::new(41.9, 12.5)];
        let (xy, _) = normalize_spatial(&pts);
        assert_eq!(xy[0], (0.0, 0.0));
        assert_eq!(xy[1], (1.0, 1.0));
        assert!((xy[2].0 - 0.5).abs() < 1e-9 && (xy[2].1 - 0.5).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn symmetric(lat1 in -80.0..80.0f64, lon1 in -179.0..179.0f64, lat2 in -80.0..80.0f64, lon2 in -179.0..179.0f64) {
            let (p, q) = (GeoPoint::new(lat1, lon1), GeoPoint::new(lat2, lon2));
            let a = vincenty_inverse(p, q);
            let b = vincenty_inverse(q, p);
            prop_assume!(a.converged && b.converged);
            prop_assert!((a.meters - b.meters).abs() < 1e-6 * a.meters.max(1.0));
        }

        #[test]
        fn planar_agreement_within_a_kilometer(lat in 35.0..50.0f64, lon in 5.0..20.0f64, dn in -600.0..600.0f64, de in -600.0..600.0f64) {
            // Local tangent-plane oracle using the ellipsoid's radii of curvature.
            let phi = lat.to_radians();
            let e2 = WGS84_F * (2.0 - WGS84_F);
            let w = (1.0 - e2 * phi.sin().powi(2)).sqrt();
            let meridional = WGS84_A * (1.0 - e2) / w.powi(3);
            let prime_vertical = WGS84_A / w;
            let q = GeoPoint::new(lat + (dn / meridional).to_degrees(), lon + (de / (prime_vertical * phi.cos())).to_degrees());
            let planar = (dn * dn + de * de).sqrt();
            prop_assume!(planar > 1.0);
            let d = geodesic_distance(GeoPoint::new(lat, lon), q);
            prop_assert!((d - planar).abs() / planar < 0.005);
        }
    }
}
