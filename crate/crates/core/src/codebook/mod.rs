//! Hierarchical codebooks for one UPA.
//!
//! Stage `S` holds `N² = 2^S` narrow beams, steering vectors placed
//! uniformly in sine/cosine coordinates over the UPA's sector. Stages
//! `0..S` hold wide beams synthesized by least squares so that codeword
//! `(s, i)` covers exactly the blocks of its two children in stage `s+1`.
//! A buffer ring around each coverage set is given an intermediate target
//! gain to keep the synthesized patterns free of trenches.

mod coverage;
mod grid;
mod synthesis;

use std::f64::consts::FRAC_PI_4;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use coverage::{buffer_set, per_axis_for_stages, target_matrix, CoverageSet};
pub use grid::{
    grid_block_edges, grid_coordinate, narrow_beam_angles, narrow_center, narrow_index_to_np, DirectionGrid, NarrowBeam,
};
pub use synthesis::{solve_wide_beams, steering_dictionary, WideBeamSolver};

use crate::error::{Error, Result};
use crate::geometry::{response_from_spatial, steering_vector, ArrayGeometry, CVector, Direction, Upa};

pub const DEFAULT_BUFFER_WIDTH: usize = 1;
pub const DEFAULT_BUFFER_GAIN: f64 = 0.5;
/// Relative singular-value cutoff for the wide-beam solve. Large arrays
/// (16×16 and up) have steering dictionaries with condition numbers near
/// 1e4; keeping those directions spends most of the codeword power outside
/// the visible region.
pub const DEFAULT_PINV_TOLERANCE: f64 = 1e-2;

/// Parameters shared by every UPA's codebook.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CodebookConfig {
    pub geometry: ArrayGeometry,
    /// Narrow beams per axis, `N`, with `N² = 2^S`.
    pub per_axis: usize,
    /// Buffer ring width `w` in grid blocks.
    pub buffer_width: usize,
    /// Target amplitude `χ` on the buffer ring.
    pub buffer_gain: f64,
    pub pinv_tolerance: f64,
}

impl CodebookConfig {
    pub fn new(geometry: ArrayGeometry, per_axis: usize) -> Result<Self> {
        let cfg = CodebookConfig {
            geometry,
            per_axis,
            buffer_width: DEFAULT_BUFFER_WIDTH,
            buffer_gain: DEFAULT_BUFFER_GAIN,
            pinv_tolerance: DEFAULT_PINV_TOLERANCE,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_buffer(mut self, width: usize, gain: f64) -> Result<Self> {
        self.buffer_width = width;
        self.buffer_gain = gain;
        self.validate()?;
        Ok(self)
    }

    pub fn with_pinv_tolerance(mut self, tolerance: f64) -> Result<Self> {
        self.pinv_tolerance = tolerance;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.per_axis;
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::config(format!(
                "N = {n}: N^2 must be 2^S for an integer S >= 1, so N must be a power of two >= 2"
            )));
        }
        if !(self.buffer_gain > 0.0 && self.buffer_gain < 1.0) {
            return Err(Error::config(format!(
                "buffer gain must lie in (0, 1), got {}",
                self.buffer_gain
            )));
        }
        if !(self.pinv_tolerance >= 0.0 && self.pinv_tolerance.is_finite()) {
            return Err(Error::config(format!(
                "pinv tolerance must be finite and non-negative, got {}",
                self.pinv_tolerance
            )));
        }
        Ok(())
    }

    /// Number of stages below the root, `S = log2(N²)`.
    pub fn stage_count(&self) -> usize {
        2 * self.per_axis.trailing_zeros() as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BeamKind {
    Narrow,
    Wide,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Codeword {
    pub weights: CVector,
    pub upa: Upa,
    pub stage: usize,
    /// One-based index within the stage.
    pub index: usize,
    pub kind: BeamKind,
}

/// The bottom stage of a codebook: `N²` steering vectors.
#[derive(Debug, Clone)]
pub struct NarrowCodebook {
    pub upa: Upa,
    pub geometry: ArrayGeometry,
    pub per_axis: usize,
    pub beams: Vec<Codeword>,
    pub directions: Vec<Direction>,
}

impl NarrowCodebook {
    fn from_directions(
        geometry: ArrayGeometry,
        upa: Upa,
        per_axis: usize,
        stage: usize,
        directions: Vec<Direction>,
    ) -> Self {
        let beams = directions
            .iter()
            .enumerate()
            .map(|(i, &d)| Codeword {
                weights: steering_vector(&geometry, upa, d),
                upa,
                stage,
                index: i + 1,
                kind: BeamKind::Narrow,
            })
            .collect();
        NarrowCodebook {
            upa,
            geometry,
            per_axis,
            beams,
            directions,
        }
    }
}

/// Narrow stage of the proposed design, codeword `i ↦ (n, p)`.
pub fn build_narrow_stage(cfg: &CodebookConfig, k: Upa) -> NarrowCodebook {
    let dirs = narrow_beam_angles(cfg.per_axis, k)
        .into_iter()
        .map(|b| b.direction)
        .collect();
    NarrowCodebook::from_directions(cfg.geometry, k, cfg.per_axis, cfg.stage_count(), dirs)
}

/// Full `S+1`-stage codebook of one UPA.
#[derive(Debug, Clone)]
pub struct HierarchicalCodebook {
    pub config: CodebookConfig,
    pub upa: Upa,
    pub grid: DirectionGrid,
    wide: Vec<Vec<Codeword>>,
    narrow: NarrowCodebook,
    coverage: Vec<Vec<CoverageSet>>,
    children: Vec<Vec<[usize; 2]>>,
}

impl HierarchicalCodebook {
    pub fn stage_count(&self) -> usize {
        self.config.stage_count()
    }

    pub fn stage(&self, s: usize) -> &[Codeword] {
        if s == self.stage_count() {
            &self.narrow.beams
        } else {
            &self.wide[s]
        }
    }

    pub fn codeword(&self, s: usize, i: usize) -> Result<&Codeword> {
        if s > self.stage_count() || i == 0 || i > 1 << s {
            return Err(Error::arg(format!(
                "no codeword ({s}, {i}) in a {}-stage codebook",
                self.stage_count()
            )));
        }
        Ok(&self.stage(s)[i - 1])
    }

    pub fn narrow(&self) -> &NarrowCodebook {
        &self.narrow
    }

    pub fn coverage(&self, s: usize, i: usize) -> &CoverageSet {
        &self.coverage[s][i - 1]
    }

    /// One-based stage-`s+1` indices of the two children of `(s, i)`.
    pub fn children(&self, s: usize, i: usize) -> [usize; 2] {
        self.children[s][i - 1]
    }

    pub fn codewords(&self) -> impl Iterator<Item = &Codeword> {
        (0..=self.stage_count()).flat_map(move |s| self.stage(s).iter())
    }
}

/// Build every stage of UPA `k`'s codebook.
pub fn build_hierarchical_codebook(cfg: &CodebookConfig, k: Upa) -> Result<HierarchicalCodebook> {
    cfg.validate()?;
    let stages = cfg.stage_count();
    let grid = DirectionGrid::build(cfg.per_axis, k);
    let dictionary = steering_dictionary(&cfg.geometry, &grid);
    let solver = WideBeamSolver::new(&dictionary, cfg.pinv_tolerance)?;

    let mut wide = Vec::with_capacity(stages);
    for s in 0..stages {
        let xi = target_matrix(stages, s, cfg.buffer_width, cfg.buffer_gain)?;
        let beams = solver
            .solve(&xi)?
            .into_iter()
            .enumerate()
            .map(|(i, weights)| Codeword {
                weights,
                upa: k,
                stage: s,
                index: i + 1,
                kind: BeamKind::Wide,
            })
            .collect();
        wide.push(beams);
    }

    let coverage: Vec<Vec<CoverageSet>> = (0..=stages)
        .map(|s| {
            (1..=1usize << s)
                .map(|i| CoverageSet::new(stages, s, i))
                .collect::<Result<_>>()
        })
        .collect::<Result<_>>()?;
    let children = link_children(&coverage)?;

    Ok(HierarchicalCodebook {
        config: *cfg,
        upa: k,
        grid,
        wide,
        narrow: build_narrow_stage(cfg, k),
        coverage,
        children,
    })
}

/// Parent-child links by coverage containment.
fn link_children(coverage: &[Vec<CoverageSet>]) -> Result<Vec<Vec<[usize; 2]>>> {
    coverage
        .windows(2)
        .map(|pair| {
            let (parents, next) = (&pair[0], &pair[1]);
            parents
                .iter()
                .map(|parent| {
                    let kids: Vec<&CoverageSet> = next.iter().filter(|c| c.is_within(parent)).collect();
                    let covered: usize = kids.iter().map(|c| c.block_count()).sum();
                    match kids.as_slice() {
                        [a, b] if covered == parent.block_count() => Ok([a.index, b.index]),
                        _ => Err(Error::Synthesis(format!(
                            "codeword ({}, {}) does not split into two children",
                            parent.stage, parent.index
                        ))),
                    }
                })
                .collect()
        })
        .collect()
}

/// Codebook designs available for comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CodebookKind {
    /// Worst-case-optimal narrow beams with buffered wide beams.
    Proposed,
    /// Same narrow beams, wide beams fitted without a buffer ring.
    InverseNoBuffer,
    /// Narrow beams uniform in real azimuth/elevation angle.
    UniformReal,
    /// Narrow beams uniform in virtual (spatial) angle.
    UniformVirtual,
}

impl CodebookKind {
    pub const ALL: [CodebookKind; 4] = [
        CodebookKind::Proposed,
        CodebookKind::InverseNoBuffer,
        CodebookKind::UniformReal,
        CodebookKind::UniformVirtual,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CodebookKind::Proposed => "proposed",
            CodebookKind::InverseNoBuffer => "inverse_no_buffer",
            CodebookKind::UniformReal => "uniform_real",
            CodebookKind::UniformVirtual => "uniform_virtual",
        }
    }

    pub fn is_hierarchical(self) -> bool {
        matches!(self, CodebookKind::Proposed | CodebookKind::InverseNoBuffer)
    }
}

impl fmt::Display for CodebookKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CodebookKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CodebookKind::ALL
            .into_iter()
            .find(|k| k.name() == s.trim())
            .ok_or_else(|| Error::config(format!("unknown codebook kind '{s}'")))
    }
}

/// Either a full hierarchy or a bare narrow stage.
#[derive(Debug, Clone)]
pub enum Codebook {
    Hierarchical(HierarchicalCodebook),
    NarrowOnly(NarrowCodebook),
}

impl Codebook {
    pub fn narrow(&self) -> &NarrowCodebook {
        match self {
            Codebook::Hierarchical(h) => h.narrow(),
            Codebook::NarrowOnly(n) => n,
        }
    }

    pub fn hierarchical(&self) -> Option<&HierarchicalCodebook> {
        match self {
            Codebook::Hierarchical(h) => Some(h),
            Codebook::NarrowOnly(_) => None,
        }
    }
}

/// Narrow directions midpoint-uniform in real angle over the sector.
pub fn uniform_real_angles(per_axis: usize, k: Upa) -> Vec<Direction> {
    let step = 2.0 * FRAC_PI_4 / per_axis as f64;
    (1..=per_axis * per_axis)
        .map(|i| {
            let (n, p) = narrow_index_to_np(i, per_axis);
            let phi = -FRAC_PI_4 + (n as f64 - 0.5) * step + k.boresight_azimuth();
            let theta = FRAC_PI_4 + (p as f64 - 0.5) * step;
            Direction::new(phi, theta)
        })
        .collect()
}

/// Virtual-angle narrow beams: spatial frequencies `(u, v)` midpoint-uniform
/// over `[-√2/2, √2/2]²`. Returns the beam directions `(φ, θ)` with
/// `cos θ = v` and `sin(φ - (k-1)π/2) sin θ = u`.
pub fn uniform_virtual_angles(per_axis: usize, k: Upa) -> Vec<Direction> {
    (1..=per_axis * per_axis)
        .map(|i| {
            let (n, p) = narrow_index_to_np(i, per_axis);
            let (u, v) = (narrow_center(n, per_axis), narrow_center(p, per_axis));
            let theta = v.acos();
            let phi = (u / theta.sin()).asin() + k.boresight_azimuth();
            Direction::new(phi, theta)
        })
        .collect()
}

fn uniform_virtual_codebook(cfg: &CodebookConfig, k: Upa) -> NarrowCodebook {
    let mut book = NarrowCodebook::from_directions(
        cfg.geometry,
        k,
        cfg.per_axis,
        cfg.stage_count(),
        uniform_virtual_angles(cfg.per_axis, k),
    );
    // Codewords straight from the virtual angles; identical to the steering
    // vectors of the stored directions up to rounding.
    for b in &mut book.beams {
        let (n, p) = narrow_index_to_np(b.index, cfg.per_axis);
        b.weights = response_from_spatial(
            &cfg.geometry,
            narrow_center(n, cfg.per_axis),
            narrow_center(p, cfg.per_axis),
        );
    }
    book
}

/// Build the codebook of the given design for UPA `k`.
pub fn build_codebook(kind: CodebookKind, cfg: &CodebookConfig, k: Upa) -> Result<Codebook> {
    cfg.validate()?;
    Ok(match kind {
        CodebookKind::Proposed => Codebook::Hierarchical(build_hierarchical_codebook(cfg, k)?),
        CodebookKind::InverseNoBuffer => {
            let mut plain = *cfg;
            plain.buffer_width = 0;
            Codebook::Hierarchical(build_hierarchical_codebook(&plain, k)?)
        }
        CodebookKind::UniformReal => Codebook::NarrowOnly(NarrowCodebook::from_directions(
            cfg.geometry,
            k,
            cfg.per_axis,
            cfg.stage_count(),
            uniform_real_angles(cfg.per_axis, k),
        )),
        CodebookKind::UniformVirtual => Codebook::NarrowOnly(uniform_virtual_codebook(cfg, k)),
    })
}
