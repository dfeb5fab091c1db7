//! Narrow-beam directions and the 4N×4N direction grid.
//!
//! Both are laid out uniformly in the sine/cosine coordinates
//! `x = sin(φ - (k-1)π/2)` and `y = cos θ`, in which half-wave arrays have
//! direction-independent beam widths. Grid block indices are one-based.
//! Block `l` of the elevation axis has `cos θ` increasing with `l`, so
//! `Θ = -cos θ` decreases along it.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use serde::Serialize;

use crate::geometry::{Direction, Upa};

/// Centre of narrow beam `n` (or `p`) in sine/cosine coordinates:
/// `√2(2n - 1 - N) / (2N)`.
pub fn narrow_center(n: usize, per_axis: usize) -> f64 {
    SQRT_2 * (2.0 * n as f64 - 1.0 - per_axis as f64) / (2.0 * per_axis as f64)
}

/// One stage-S beam with its grid coordinates `(n, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NarrowBeam {
    /// One-based codeword index `i = (p-1)·N + n`.
    pub index: usize,
    pub n: usize,
    pub p: usize,
    pub direction: Direction,
}

/// Codeword index `i` to `(n, p)`: `n = ((i-1) mod N) + 1`, `p = ceil(i/N)`.
pub fn narrow_index_to_np(i: usize, per_axis: usize) -> (usize, usize) {
    debug_assert!(i >= 1 && per_axis >= 1);
    ((i - 1) % per_axis + 1, i.div_ceil(per_axis))
}

/// The N² narrow-beam directions of UPA `k`, ordered by codeword index.
pub fn narrow_beam_angles(per_axis: usize, k: Upa) -> Vec<NarrowBeam> {
    (1..=per_axis * per_axis)
        .map(|i| {
            let (n, p) = narrow_index_to_np(i, per_axis);
            let phi = narrow_center(n, per_axis).asin() + k.boresight_azimuth();
            let theta = narrow_center(p, per_axis).acos();
            NarrowBeam {
                index: i,
                n,
                p,
                direction: Direction::new(phi, theta),
            }
        })
        .collect()
}

/// Grid-block centre coordinate for block `j ∈ 1..=4N`.
///
/// The central 2N blocks split `(-√2/2, √2/2)` evenly; the N blocks on
/// either side split the remaining `(-1, -√2/2)` and `(√2/2, 1)`.
pub fn grid_coordinate(j: usize, per_axis: usize) -> f64 {
    let n = per_axis as f64;
    let jf = j as f64;
    let outer = 1.0 - FRAC_1_SQRT_2;
    if j <= per_axis {
        outer * (2.0 * jf - 1.0) / (2.0 * n) - 1.0
    } else if j <= 3 * per_axis {
        SQRT_2 * (2.0 * (jf - n) - 1.0) / (4.0 * n) - FRAC_1_SQRT_2
    } else {
        outer * (2.0 * (jf - 3.0 * n) - 1.0) / (2.0 * n) + FRAC_1_SQRT_2
    }
}

/// Edges of grid block `j` in the same coordinate.
pub fn grid_block_edges(j: usize, per_axis: usize) -> (f64, f64) {
    let n = per_axis as f64;
    let outer = (1.0 - FRAC_1_SQRT_2) / n;
    let inner = FRAC_1_SQRT_2 / n;
    let jf = j as f64;
    if j <= per_axis {
        (-1.0 + outer * (jf - 1.0), -1.0 + outer * jf)
    } else if j <= 3 * per_axis {
        let lo = -FRAC_1_SQRT_2 + inner * (jf - n - 1.0);
        (lo, lo + inner)
    } else {
        let lo = FRAC_1_SQRT_2 + outer * (jf - 3.0 * n - 1.0);
        (lo, lo + outer)
    }
}

/// Centres of the 4N×4N grid blocks covering the front half-space of one UPA.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirectionGrid {
    pub upa: Upa,
    pub per_axis: usize,
    /// `sin(φ - (k-1)π/2)` at each azimuth block centre.
    pub azimuth_sine: Vec<f64>,
    /// `cos θ` at each elevation block centre.
    pub elevation_cosine: Vec<f64>,
}

impl DirectionGrid {
    pub fn build(per_axis: usize, k: Upa) -> Self {
        let coords: Vec<f64> = (1..=4 * per_axis).map(|j| grid_coordinate(j, per_axis)).collect();
        DirectionGrid {
            upa: k,
            per_axis,
            azimuth_sine: coords.clone(),
            elevation_cosine: coords,
        }
    }

    pub fn blocks_per_axis(&self) -> usize {
        4 * self.per_axis
    }

    pub fn azimuth(&self, j: usize) -> f64 {
        self.azimuth_sine[j - 1].asin() + self.upa.boresight_azimuth()
    }

    pub fn elevation(&self, l: usize) -> f64 {
        self.elevation_cosine[l - 1].acos()
    }

    pub fn center(&self, j: usize, l: usize) -> Direction {
        Direction::new(self.azimuth(j), self.elevation(l))
    }

    /// Grid block `(j, l)` containing a direction in front of the UPA.
    pub fn block_of(&self, dir: Direction) -> Option<(usize, usize)> {
        let x = (dir.azimuth - self.upa.boresight_azimuth()).sin();
        if (dir.azimuth - self.upa.boresight_azimuth()).cos() < 0.0 {
            return None;
        }
        let y = dir.elevation.cos();
        let find = |c: f64| {
            (1..=self.blocks_per_axis()).find(|&j| {
                let (lo, hi) = grid_block_edges(j, self.per_axis);
                c >= lo && (c < hi || j == self.blocks_per_axis())
            })
        };
        Some((find(x)?, find(y)?))
    }

    /// Row of block `(j, l)` in the steering dictionary and target matrix:
    /// elevation-major, azimuth-minor.
    pub fn flat_index(&self, j: usize, l: usize) -> usize {
        (l - 1) * self.blocks_per_axis() + (j - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{coverage_contains, phi_map};
    use approx::assert_abs_diff_eq;
    use std::collections::HashSet;

    fn k(i: usize) -> Upa {
        Upa::new(i).unwrap()
    }

    #[test]
    fn single_beam_is_boresight() {
        let b = narrow_beam_angles(1, k(1));
        assert_eq!(b.len(), 1);
        assert_abs_diff_eq!(b[0].direction.azimuth, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(b[0].direction.elevation, std::f64::consts::FRAC_PI_2, epsilon = 1e-15);
    }

    #[test]
    fn first_beam_angles_n4() {
        // Frozen from a 30-digit evaluation of arcsin/arccos(-3√2/8).
        let b = narrow_beam_angles(4, k(1));
        assert_abs_diff_eq!(b[0].direction.azimuth, -0.558_989_866_024_985_5, epsilon = 1e-12);
        assert_abs_diff_eq!(b[0].direction.elevation, 2.129_786_192_819_882, epsilon = 1e-12);
    }

    #[test]
    fn index_map_is_bijective() {
        for n in 1..=8 {
            let seen: HashSet<_> = (1..=n * n).map(|i| narrow_index_to_np(i, n)).collect();
            assert_eq!(seen.len(), n * n);
            assert!(seen.iter().all(|&(a, b)| (1..=n).contains(&a) && (1..=n).contains(&b)));
            assert_eq!(narrow_index_to_np(1, n), (1, 1));
            assert_eq!(narrow_index_to_np(n, n), (n, 1));
            assert_eq!(narrow_index_to_np(n * n, n), (n, n));
        }
    }

    #[test]
    fn narrow_beams_inside_sector_and_evenly_spaced() {
        for per_axis in [2, 4, 8] {
            for upa in Upa::ALL {
                let beams = narrow_beam_angles(per_axis, upa);
                assert!(beams.iter().all(|b| coverage_contains(upa, b.direction)));
                let xs: Vec<f64> = beams[..per_axis]
                    .iter()
                    .map(|b| phi_map(upa, b.direction.azimuth))
                    .collect();
                for w in xs.windows(2) {
                    assert_abs_diff_eq!(w[1] - w[0], SQRT_2 / per_axis as f64, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn grid_reference_values_n4() {
        let g = DirectionGrid::build(4, k(1));
        assert_abs_diff_eq!(g.azimuth(5), -0.667_110_357_974_676_9, epsilon = 1e-12);
        assert_abs_diff_eq!(g.azimuth(1), -1.299_365_813_998_201_5, epsilon = 1e-12);
    }

    #[test]
    fn grid_is_monotone_and_symmetric() {
        for n in [1, 2, 4, 8, 16] {
            let g = DirectionGrid::build(n, k(2));
            assert!(g.azimuth_sine.windows(2).all(|w| w[1] > w[0]));
            assert!(g.elevation_cosine.windows(2).all(|w| w[1] > w[0]));
            assert_abs_diff_eq!(g.azimuth_sine[2 * n - 1], -g.azimuth_sine[2 * n], epsilon = 1e-15);
            for j in 1..=4 * n {
                let (lo, hi) = grid_block_edges(j, n);
                assert_abs_diff_eq!((lo + hi) / 2.0, grid_coordinate(j, n), epsilon = 1e-14);
            }
            assert_abs_diff_eq!(grid_block_edges(1, n).0, -1.0, epsilon = 1e-14);
            assert_abs_diff_eq!(grid_block_edges(4 * n, n).1, 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn block_lookup_finds_centres() {
        let g = DirectionGrid::build(4, k(3));
        for j in 1..=16 {
            for l in 1..=16 {
                assert_eq!(g.block_of(g.center(j, l)), Some((j, l)));
            }
        }
        assert_eq!(g.block_of(Direction::new(0.0, 1.0)), None);
    }

    #[test]
    fn central_blocks_pair_up_under_narrow_beams() {
        // Blocks N+2n-1 and N+2n straddle narrow centre n.
        let n = 8;
        for b in 1..=n {
            let mid = (grid_coordinate(n + 2 * b - 1, n) + grid_coordinate(n + 2 * b, n)) / 2.0;
            assert_abs_diff_eq!(mid, narrow_center(b, n), epsilon = 1e-14);
        }
    }
}
