//! Coverage sets, buffer zones and least-squares target matrices.
//!
//! Stage `s` of an `S`-stage codebook splits the central `2N×2N` block
//! square `{N+1..3N}²` into `2^s` rectangles of `ν` azimuth by `δ`
//! elevation blocks, `μ` of them per elevation row.

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};

/// Narrow beams per axis for an `S`-stage codebook, `N = 2^(S/2)`.
pub fn per_axis_for_stages(stages: usize) -> Result<usize> {
    if !stages.is_multiple_of(2) {
        return Err(Error::arg(format!(
            "stage count {stages} is odd; N^2 = 2^S needs an even S"
        )));
    }
    Ok(1usize << (stages / 2))
}

fn pow2_ceil_half(numerator: i64) -> usize {
    // ceil(a/2) for any sign of a, then the power of two used by ν, δ and μ.
    let exp = (numerator as f64 / 2.0).ceil() as i64;
    debug_assert!(exp >= 0);
    1usize << exp
}

/// Blocks covered by codeword `i` of stage `s`. Ranges are one-based and
/// inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CoverageSet {
    pub stage: usize,
    pub index: usize,
    pub azimuth: (usize, usize),
    pub elevation: (usize, usize),
    /// Blocks per elevation row.
    pub nu: usize,
    /// Blocks per azimuth column.
    pub delta: usize,
    /// Beams of this stage per elevation row.
    pub mu: usize,
}

impl CoverageSet {
    pub fn new(stages: usize, stage: usize, index: usize) -> Result<Self> {
        let per_axis = per_axis_for_stages(stages)?;
        if stage > stages || index == 0 || index > 1 << stage {
            return Err(Error::arg(format!(
                "no codeword ({stage}, {index}) in a {stages}-stage codebook"
            )));
        }
        let (big_s, s) = (stages as i64, stage as i64);
        let nu = 2 * pow2_ceil_half(big_s - s);
        let delta = 2 * pow2_ceil_half(big_s - s - 1);
        let mu = pow2_ceil_half(s - 1);
        let col = (index - 1) % mu;
        let row = index.div_ceil(mu);
        Ok(CoverageSet {
            stage,
            index,
            azimuth: (per_axis + nu * col + 1, per_axis + nu * (col + 1)),
            elevation: (per_axis + delta * (row - 1) + 1, per_axis + delta * row),
            nu,
            delta,
            mu,
        })
    }

    pub fn contains(&self, j: usize, l: usize) -> bool {
        (self.azimuth.0..=self.azimuth.1).contains(&j) && (self.elevation.0..=self.elevation.1).contains(&l)
    }

    pub fn is_within(&self, other: &CoverageSet) -> bool {
        self.azimuth.0 >= other.azimuth.0
            && self.azimuth.1 <= other.azimuth.1
            && self.elevation.0 >= other.elevation.0
            && self.elevation.1 <= other.elevation.1
    }

    /// All `(j, l)` block pairs, elevation-major.
    pub fn blocks(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (self.elevation.0..=self.elevation.1).flat_map(move |l| (self.azimuth.0..=self.azimuth.1).map(move |j| (j, l)))
    }

    pub fn block_count(&self) -> usize {
        self.nu * self.delta
    }
}

/// Ring of width `w` around a coverage set, clipped to `{1..4N}²`.
pub fn buffer_set(stages: usize, stage: usize, index: usize, width: usize) -> Result<BTreeSet<(usize, usize)>> {
    let cov = CoverageSet::new(stages, stage, index)?;
    let limit = 4 * per_axis_for_stages(stages)?;
    let widen = |(a, b): (usize, usize)| (a.saturating_sub(width).max(1), (b + width).min(limit));
    let (j0, j1) = widen(cov.azimuth);
    let (l0, l1) = widen(cov.elevation);
    Ok((l0..=l1)
        .flat_map(|l| (j0..=j1).map(move |j| (j, l)))
        .filter(|&(j, l)| !cov.contains(j, l))
        .collect())
}

/// Target amplitudes for all codewords of one stage: `16N² × 2^s`, with 1
/// on covered blocks, `buffer_gain` on the buffer ring and 0 elsewhere.
/// Rows follow [`DirectionGrid::flat_index`](super::DirectionGrid::flat_index).
pub fn target_matrix(stages: usize, stage: usize, width: usize, buffer_gain: f64) -> Result<DMatrix<f64>> {
    let blocks = 4 * per_axis_for_stages(stages)?;
    let cols = 1usize << stage;
    let mut xi = DMatrix::zeros(blocks * blocks, cols);
    for i in 1..=cols {
        let cov = CoverageSet::new(stages, stage, i)?;
        for (j, l) in buffer_set(stages, stage, i, width)? {
            xi[((l - 1) * blocks + j - 1, i - 1)] = buffer_gain;
        }
        for (j, l) in cov.blocks() {
            xi[((l - 1) * blocks + j - 1, i - 1)] = 1.0;
        }
    }
    Ok(xi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn stage_one_of_four() {
        let c = CoverageSet::new(4, 1, 1).unwrap();
        assert_eq!((c.nu, c.delta, c.mu), (8, 4, 1));
        assert_eq!(c.azimuth, (5, 12));
        assert_eq!(c.elevation, (5, 8));
    }

    #[test]
    fn narrow_stage_second_beam() {
        let c = CoverageSet::new(4, 4, 2).unwrap();
        assert_eq!((c.nu, c.delta, c.mu), (2, 2, 4));
        assert_eq!(c.azimuth, (7, 8));
        assert_eq!(c.elevation, (5, 6));
    }

    #[test]
    fn stage_zero_is_whole_square() {
        let c = CoverageSet::new(4, 0, 1).unwrap();
        assert_eq!((c.nu, c.delta, c.mu), (8, 8, 1));
        assert_eq!((c.azimuth, c.elevation), ((5, 12), (5, 12)));
    }

    #[test]
    fn out_of_range_rejected() {
        assert!(CoverageSet::new(4, 5, 1).is_err());
        assert!(CoverageSet::new(4, 2, 0).is_err());
        assert!(CoverageSet::new(4, 2, 5).is_err());
        assert!(CoverageSet::new(3, 1, 1).is_err());
    }

    #[test]
    fn counts_are_consistent() {
        for big_s in [2, 4, 6, 8] {
            let n = per_axis_for_stages(big_s).unwrap();
            for s in 0..=big_s {
                let c = CoverageSet::new(big_s, s, 1).unwrap();
                let rows = (1 << s) / c.mu;
                assert_eq!(c.nu * c.mu, 2 * n);
                assert_eq!(rows * c.delta, 2 * n);
            }
        }
    }

    #[test]
    fn buffer_examples() {
        assert!(buffer_set(4, 2, 3, 0).unwrap().is_empty());
        let b = buffer_set(4, 4, 1, 1).unwrap();
        assert_eq!(b.len(), 12);
        assert!(b.iter().all(|&(j, l)| (4..=7).contains(&j) && (4..=7).contains(&l)));
        assert_eq!(buffer_set(4, 0, 1, 1).unwrap().len(), 36);
    }

    #[test]
    fn buffer_clips_at_grid_edge() {
        // Stage 0 of S=2: coverage {3..6}², ring of width 3 reaches past {1..8}.
        let b = buffer_set(2, 0, 1, 3).unwrap();
        assert_eq!(b.len(), 64 - 16);
    }

    #[test]
    fn target_column_sums() {
        let big_s = 4;
        for s in 0..=big_s {
            let xi = target_matrix(big_s, s, 0, 0.5).unwrap();
            assert_eq!(xi.nrows(), 256);
            assert_eq!(xi.ncols(), 1 << s);
            let c = CoverageSet::new(big_s, s, 1).unwrap();
            for col in xi.column_iter() {
                assert_abs_diff_eq!(col.sum(), (c.nu * c.delta) as f64, epsilon = 1e-12);
                assert!(col.iter().all(|&x| x == 0.0 || x == 1.0));
            }
        }
        let xi = target_matrix(big_s, big_s, 1, 0.5).unwrap();
        for i in 1..=16 {
            let ring = buffer_set(big_s, big_s, i, 1).unwrap().len() as f64;
            assert_abs_diff_eq!(xi.column(i - 1).sum(), 4.0 + 0.5 * ring, epsilon = 1e-12);
        }
    }
}
