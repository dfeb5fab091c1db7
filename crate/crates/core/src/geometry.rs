//! Array response vectors and angular bookkeeping for the four UPAs.
//!
//! Each terminal carries four identical half-wave uniform planar arrays
//! mounted on the faces of a cube. UPA `k` has its boresight at azimuth
//! `(k-1)·π/2`, elevation `π/2`, and serves the sector
//! `|φ - (k-1)π/2| ≤ π/4`, `π/4 ≤ θ ≤ 3π/4`.
//!
//! Element ordering inside every response vector is n_z-major, n_y-minor,
//! with both centered indices ascending: entry `z·N_y + y` holds the
//! element at `(n_y, n_z) = (y - (N_y-1)/2, z - (N_z-1)/2)`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};
use std::fmt;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Complex column vector used for steering vectors and codewords.
pub type CVector = DVector<Complex64>;

/// Slack applied to closed sector boundaries so that directions computed
/// through trigonometric round trips still land inside.
const BOUNDARY_SLACK: f64 = 1e-12;

/// Index of one of the four UPAs, `1..=4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct Upa(u8);

impl Upa {
    pub const ALL: [Upa; 4] = [Upa(1), Upa(2), Upa(3), Upa(4)];

    pub fn new(k: usize) -> Result<Self> {
        if (1..=4).contains(&k) {
            Ok(Upa(k as u8))
        } else {
            Err(Error::arg(format!("UPA index must be in 1..=4, got {k}")))
        }
    }

    /// One-based index `k`.
    pub fn get(self) -> usize {
        self.0 as usize
    }

    pub fn offset(self) -> usize {
        self.0 as usize - 1
    }

    /// Azimuth of the array boresight, `(k-1)·π/2`.
    pub fn boresight_azimuth(self) -> f64 {
        self.offset() as f64 * FRAC_PI_2
    }
}

impl TryFrom<u8> for Upa {
    type Error = Error;

    fn try_from(k: u8) -> Result<Self> {
        Upa::new(k as usize)
    }
}

impl From<Upa> for u8 {
    fn from(u: Upa) -> u8 {
        u.0
    }
}

impl fmt::Display for Upa {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Element counts of one UPA; spacing is half a wavelength.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrayGeometry {
    n_y: usize,
    n_z: usize,
}

impl ArrayGeometry {
    pub fn new(n_y: usize, n_z: usize) -> Result<Self> {
        if n_y == 0 || n_z == 0 {
            return Err(Error::arg(format!(
                "array dimensions must be positive, got {n_y}x{n_z}"
            )));
        }
        Ok(ArrayGeometry { n_y, n_z })
    }

    pub fn n_y(&self) -> usize {
        self.n_y
    }

    pub fn n_z(&self) -> usize {
        self.n_z
    }

    pub fn element_count(&self) -> usize {
        self.n_y * self.n_z
    }

    /// Centered element indices `-(n-1)/2, ..., (n-1)/2` along y.
    pub fn y_indices(&self) -> impl Iterator<Item = f64> + '_ {
        centered(self.n_y)
    }

    pub fn z_indices(&self) -> impl Iterator<Item = f64> + '_ {
        centered(self.n_z)
    }
}

fn centered(n: usize) -> impl Iterator<Item = f64> {
    let half = (n as f64 - 1.0) / 2.0;
    (0..n).map(move |i| i as f64 - half)
}

/// A propagation direction. Azimuth is measured from the x-axis and kept
/// in `(-π, π]`; elevation is measured from the z-axis, in `[0, π]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Direction {
    pub azimuth: f64,
    pub elevation: f64,
}

impl Direction {
    /// Panics if `elevation` is outside `[0, π]` or either angle is not finite.
    pub fn new(azimuth: f64, elevation: f64) -> Self {
        Self::try_new(azimuth, elevation).expect("invalid direction")
    }

    pub fn try_new(azimuth: f64, elevation: f64) -> Result<Self> {
        if !azimuth.is_finite() || !elevation.is_finite() {
            return Err(Error::arg("direction angles must be finite"));
        }
        if !(-BOUNDARY_SLACK..=PI + BOUNDARY_SLACK).contains(&elevation) {
            return Err(Error::arg(format!("elevation {elevation} outside [0, pi]")));
        }
        Ok(Direction {
            azimuth: wrap_angle(azimuth),
            elevation: elevation.clamp(0.0, PI),
        })
    }

    /// The same direction with azimuth shifted by `delta`.
    pub fn rotated(self, delta: f64) -> Self {
        Direction::new(self.azimuth + delta, self.elevation)
    }
}

/// Wrap an angle into `(-π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut r = a.rem_euclid(two_pi);
    if r > PI {
        r -= two_pi;
    }
    r
}

/// Spatial frequencies `(u, v)` seen by UPA `k`:
/// `u = sin(φ - (k-1)π/2)·sin θ`, `v = cos θ`.
pub fn spatial_frequencies(k: Upa, dir: Direction) -> (f64, f64) {
    let u = (dir.azimuth - k.boresight_azimuth()).sin() * dir.elevation.sin();
    (u, dir.elevation.cos())
}

/// Unit-norm response `exp(jπ(n_y·u + n_z·v)) / √N_a` for given spatial
/// frequencies. Also serves virtual-angle codewords directly.
pub fn response_from_spatial(geom: &ArrayGeometry, u: f64, v: f64) -> CVector {
    let (ay, az) = response_factors(geom, u, v);
    let mut out = CVector::zeros(geom.element_count());
    for (z, cz) in az.iter().enumerate() {
        for (y, cy) in ay.iter().enumerate() {
            out[z * geom.n_y + y] = cz * cy;
        }
    }
    out
}

/// Separable factors of the response: `a = a_z ⊗ a_y`, each carrying
/// `1/√N` of its axis so that the product is unit norm.
pub(crate) fn response_factors(geom: &ArrayGeometry, u: f64, v: f64) -> (Vec<Complex64>, Vec<Complex64>) {
    let sy = 1.0 / (geom.n_y as f64).sqrt();
    let sz = 1.0 / (geom.n_z as f64).sqrt();
    let ay = geom
        .y_indices()
        .map(|n| Complex64::from_polar(sy, PI * n * u))
        .collect();
    let az = geom
        .z_indices()
        .map(|n| Complex64::from_polar(sz, PI * n * v))
        .collect();
    (ay, az)
}

/// Array response vector of UPA `k` toward `dir`.
pub fn steering_vector(geom: &ArrayGeometry, k: Upa, dir: Direction) -> CVector {
    let (u, v) = spatial_frequencies(k, dir);
    response_from_spatial(geom, u, v)
}

/// Elevation map `Θ(θ) = -cos θ`, increasing on `[0, π]`.
pub fn theta_map(theta: f64) -> f64 {
    debug_assert!((-BOUNDARY_SLACK..=PI + BOUNDARY_SLACK).contains(&theta));
    -theta.cos()
}

/// Azimuth map `Φ(φ) = sin(φ - (k-1)π/2) + √2(k-1)`; increasing on the
/// sector of UPA `k`, which it sends to an interval of width √2 centred at
/// `√2(k-1)`.
pub fn phi_map(k: Upa, phi: f64) -> f64 {
    (phi - k.boresight_azimuth()).sin() + SQRT_2 * k.offset() as f64
}

/// Inverse of [`theta_map`] for `Θ ∈ [-1, 1]`.
pub fn theta_unmap(mapped: f64) -> f64 {
    (-mapped).clamp(-1.0, 1.0).acos()
}

/// Inverse of [`phi_map`] on the front half-space of UPA `k`.
pub fn phi_unmap(k: Upa, mapped: f64) -> f64 {
    (mapped - SQRT_2 * k.offset() as f64).clamp(-1.0, 1.0).asin() + k.boresight_azimuth()
}

/// The angular sector served by one UPA.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageRange {
    pub upa: Upa,
    pub azimuth: (f64, f64),
    pub elevation: (f64, f64),
}

impl CoverageRange {
    pub fn of(k: Upa) -> Self {
        let c = k.boresight_azimuth();
        CoverageRange {
            upa: k,
            azimuth: (c - FRAC_PI_4, c + FRAC_PI_4),
            elevation: (FRAC_PI_4, 3.0 * FRAC_PI_4),
        }
    }

    /// Closed-interval membership with azimuth compared modulo 2π.
    pub fn contains(&self, dir: Direction) -> bool {
        let offset = wrap_angle(dir.azimuth - self.upa.boresight_azimuth());
        offset.abs() <= FRAC_PI_4 + BOUNDARY_SLACK
            && dir.elevation >= self.elevation.0 - BOUNDARY_SLACK
            && dir.elevation <= self.elevation.1 + BOUNDARY_SLACK
    }
}

pub fn coverage_contains(k: Upa, dir: Direction) -> bool {
    CoverageRange::of(k).contains(dir)
}

/// The UPA whose sector contains `dir`, preferring the lower index on
/// shared azimuth boundaries. `None` above or below the elevation band.
pub fn upa_for_direction(dir: Direction) -> Option<Upa> {
    Upa::ALL.into_iter().find(|&k| coverage_contains(k, dir))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn geom(ny: usize, nz: usize) -> ArrayGeometry {
        ArrayGeometry::new(ny, nz).unwrap()
    }

    #[test]
    fn single_element_response_is_one() {
        let a = steering_vector(&geom(1, 1), Upa::new(1).unwrap(), Direction::new(0.7, 1.1));
        assert_eq!(a.len(), 1);
        assert_abs_diff_eq!(a[0].re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(a[0].im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn two_element_broadside_phases() {
        // n_y = -1/2, +1/2 with sin φ sin θ = 1.
        let a = steering_vector(&geom(2, 1), Upa::new(1).unwrap(), Direction::new(FRAC_PI_2, FRAC_PI_2));
        let s = 1.0 / 2f64.sqrt();
        assert_abs_diff_eq!(a[0].re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(a[0].im, -s, epsilon = 1e-15);
        assert_abs_diff_eq!(a[1].re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(a[1].im, s, epsilon = 1e-15);
    }

    #[test]
    fn boresight_of_upa2_is_flat() {
        let a = steering_vector(&geom(8, 8), Upa::new(2).unwrap(), Direction::new(FRAC_PI_2, FRAC_PI_2));
        for x in a.iter() {
            assert_abs_diff_eq!(x.re, 0.125, epsilon = 1e-12);
            assert_abs_diff_eq!(x.im, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn element_order_is_z_major() {
        // Elevation-only phase: entries within one z row are equal.
        let g = geom(3, 2);
        let a = steering_vector(&g, Upa::new(1).unwrap(), Direction::new(0.0, 1.0));
        assert_abs_diff_eq!((a[0] - a[2]).norm(), 0.0, epsilon = 1e-15);
        assert!((a[0] - a[3]).norm() > 1e-3);
    }

    #[test]
    fn invalid_upa_rejected() {
        assert!(Upa::new(0).is_err());
        assert!(Upa::new(5).is_err());
        assert!(ArrayGeometry::new(0, 4).is_err());
    }

    #[test]
    fn maps_at_reference_points() {
        assert_abs_diff_eq!(theta_map(FRAC_PI_2), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(theta_map(FRAC_PI_4), -SQRT_2 / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(theta_map(3.0 * FRAC_PI_4), SQRT_2 / 2.0, epsilon = 1e-15);
        let k1 = Upa::new(1).unwrap();
        let k3 = Upa::new(3).unwrap();
        assert_abs_diff_eq!(phi_map(k1, 0.0), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(phi_map(k3, PI), 2.0 * SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(phi_map(k1, FRAC_PI_4), SQRT_2 / 2.0, epsilon = 1e-15);
    }

    #[test]
    fn maps_are_monotone_on_their_domains() {
        let n = 1000;
        for k in Upa::ALL {
            let (lo, hi) = CoverageRange::of(k).azimuth;
            let vals: Vec<f64> = (0..=n)
                .map(|i| phi_map(k, lo + (hi - lo) * i as f64 / n as f64))
                .collect();
            assert!(vals.windows(2).all(|w| w[1] > w[0]));
            let base = SQRT_2 * k.offset() as f64;
            assert_abs_diff_eq!(vals[0], base - SQRT_2 / 2.0, epsilon = 1e-12);
            assert_abs_diff_eq!(vals[n], base + SQRT_2 / 2.0, epsilon = 1e-12);
        }
        let th: Vec<f64> = (0..=n).map(|i| theta_map(PI * i as f64 / n as f64)).collect();
        assert!(th.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn coverage_examples() {
        let k = |i| Upa::new(i).unwrap();
        assert!(coverage_contains(k(1), Direction::new(0.0, FRAC_PI_2)));
        assert!(!coverage_contains(k(1), Direction::new(FRAC_PI_2, FRAC_PI_2)));
        assert!(coverage_contains(k(4), Direction::new(3.0 * FRAC_PI_2, FRAC_PI_4)));
    }

    #[test]
    fn upa_lookup_examples() {
        assert_eq!(upa_for_direction(Direction::new(0.1, 1.6)).map(Upa::get), Some(1));
        assert_eq!(upa_for_direction(Direction::new(PI, FRAC_PI_2)).map(Upa::get), Some(3));
        assert_eq!(upa_for_direction(Direction::new(0.0, 0.1)), None);
        // Shared boundary between UPA 1 and 2 resolves to 1; between 4 and 1 to 1.
        assert_eq!(
            upa_for_direction(Direction::new(FRAC_PI_4, FRAC_PI_2)).map(Upa::get),
            Some(1)
        );
        assert_eq!(
            upa_for_direction(Direction::new(-FRAC_PI_4, FRAC_PI_2)).map(Upa::get),
            Some(1)
        );
        assert_eq!(
            upa_for_direction(Direction::new(5.0 * FRAC_PI_4, FRAC_PI_2)).map(Upa::get),
            Some(3)
        );
    }

    #[test]
    fn wrap_keeps_pi() {
        assert_abs_diff_eq!(wrap_angle(PI), PI, epsilon = 1e-15);
        assert_abs_diff_eq!(wrap_angle(-PI), PI, epsilon = 1e-15);
        assert_abs_diff_eq!(wrap_angle(3.0 * FRAC_PI_2), -FRAC_PI_2, epsilon = 1e-15);
    }

    #[test]
    fn unmaps_invert_maps() {
        for k in Upa::ALL {
            let phi = k.boresight_azimuth() + 0.3;
            assert_abs_diff_eq!(phi_unmap(k, phi_map(k, phi)), phi, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(theta_unmap(theta_map(0.9)), 0.9, epsilon = 1e-12);
    }

    fn arb_dir() -> impl Strategy<Value = Direction> {
        (-PI..PI, 0.0..PI).prop_map(|(a, e)| Direction::new(a, e))
    }

    proptest! {
        #[test]
        fn steering_is_unit_norm(ny in 1usize..12, nz in 1usize..12, k in 1usize..=4, d in arb_dir()) {
            let a = steering_vector(&geom(ny, nz), Upa::new(k).unwrap(), d);
            prop_assert!((a.norm() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn steering_rotation_identity(ny in 1usize..10, nz in 1usize..10, k in 1usize..=4, d in arb_dir()) {
            let g = geom(ny, nz);
            let upa = Upa::new(k).unwrap();
            let a = steering_vector(&g, upa, d);
            let b = steering_vector(&g, Upa::new(1).unwrap(), d.rotated(-upa.boresight_azimuth()));
            prop_assert!((a - b).camax() < 1e-12);
        }

        #[test]
        fn inner_products_bounded(d1 in arb_dir(), d2 in arb_dir(), k in 1usize..=4) {
            let g = geom(6, 5);
            let upa = Upa::new(k).unwrap();
            let a = steering_vector(&g, upa, d1);
            let b = steering_vector(&g, upa, d2);
            prop_assert!((a.dotc(&a).norm() - 1.0).abs() < 1e-12);
            prop_assert!(a.dotc(&b).norm() <= 1.0 + 1e-12);
        }

        #[test]
        fn sectors_tile_the_azimuth_circle(az in -PI..PI, el in FRAC_PI_4..(3.0 * FRAC_PI_4)) {
            let d = Direction::new(az, el);
            let hits = Upa::ALL.iter().filter(|&&k| coverage_contains(k, d)).count();
            // Interior directions hit exactly one sector, boundaries two.
            let on_edge = Upa::ALL.iter().any(|k| {
                (wrap_angle(az - k.boresight_azimuth()).abs() - FRAC_PI_4).abs() < 1e-9
            });
            prop_assert!(hits == 1 || (on_edge && hits == 2));
            prop_assert!(upa_for_direction(d).is_some());
        }
    }
}
