//! Least-squares synthesis of wide beams.
//!
//! A wide codeword `ω` is chosen so that `A^H ω` approximates a target
//! amplitude profile over the grid, where the columns of `A` are the
//! steering vectors at the grid-block centres. The minimum-norm solution
//! `ω = (A^H)^+ ξ` equals `(A A^H)^{-1} A ξ` whenever `A` has full row
//! rank; singular values below `tolerance · σ_max` are discarded.

use nalgebra::{Complex, DMatrix};
use num_complex::Complex64;

use super::grid::DirectionGrid;
use crate::error::{Error, Result};
use crate::geometry::{steering_vector, ArrayGeometry, CVector};

/// `N_a × 16N²` matrix of grid steering vectors, columns ordered
/// elevation-major as in [`DirectionGrid::flat_index`].
pub fn steering_dictionary(geom: &ArrayGeometry, grid: &DirectionGrid) -> DMatrix<Complex64> {
    let blocks = grid.blocks_per_axis();
    let mut a = DMatrix::zeros(geom.element_count(), blocks * blocks);
    for l in 1..=blocks {
        for j in 1..=blocks {
            let col = steering_vector(geom, grid.upa, grid.center(j, l));
            a.set_column(grid.flat_index(j, l), &col);
        }
    }
    a
}

/// Regularized pseudo-inverse of `A^H`, reusable across stages.
#[derive(Debug, Clone)]
pub struct WideBeamSolver {
    pinv: DMatrix<Complex64>,
    rank: usize,
}

impl WideBeamSolver {
    pub fn new(dictionary: &DMatrix<Complex64>, tolerance: f64) -> Result<Self> {
        if tolerance.is_nan() || tolerance < 0.0 {
            return Err(Error::arg(format!(
                "pinv tolerance must be non-negative, got {tolerance}"
            )));
        }
        let svd = dictionary.adjoint().svd(true, true);
        let sigma_max = svd.singular_values.max();
        let cutoff = tolerance * sigma_max;
        let rank = svd.singular_values.iter().filter(|&&s| s > cutoff).count();
        if rank == 0 {
            return Err(Error::Synthesis(
                "steering dictionary has no usable singular values".into(),
            ));
        }
        let pinv = svd
            .pseudo_inverse(cutoff)
            .map_err(|e| Error::Synthesis(e.to_string()))?;
        Ok(WideBeamSolver { pinv, rank })
    }

    /// Number of singular values kept.
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Minimum-norm least-squares solutions, one per target column, before
    /// normalization.
    pub fn solve_raw(&self, targets: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        &self.pinv * targets
    }

    /// Unit-norm codewords for each target column.
    pub fn solve(&self, targets: &DMatrix<f64>) -> Result<Vec<CVector>> {
        let targets = targets.map(|x| Complex::new(x, 0.0));
        let raw = self.solve_raw(&targets);
        raw.column_iter()
            .enumerate()
            .map(|(i, col)| {
                let norm = col.norm();
                if norm > 1e-12 && norm.is_finite() {
                    Ok(col / Complex::new(norm, 0.0))
                } else {
                    Err(Error::Synthesis(format!(
                        "target column {} yields a zero codeword",
                        i + 1
                    )))
                }
            })
            .collect()
    }
}

/// One-shot wide-beam solve for a dictionary and target matrix.
pub fn solve_wide_beams(
    dictionary: &DMatrix<Complex64>,
    targets: &DMatrix<f64>,
    tolerance: f64,
) -> Result<Vec<CVector>> {
    WideBeamSolver::new(dictionary, tolerance)?.solve(targets)
}
