//! Evaluation: worst-case narrow-beam gain, beam-pattern rasters and
//! Monte Carlo alignment-rate sweeps.
//!
//! Rasters are uniform in the mapped coordinates `Φ` and `Θ = -cos θ`,
//! where narrow beams are evenly spaced. Over the sector of UPA `k` both
//! span an interval of width `√2`: `Θ ∈ [-√2/2, √2/2]` and
//! `Φ ∈ √2(k-1) + [-√2/2, √2/2]`.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{noise_power_for_snr, random_alpha, ElementGain, LosLink, MeasurementConfig};
use crate::codebook::{
    build_codebook, build_narrow_stage, grid_block_edges, CodebookConfig, CodebookKind, Codeword, HierarchicalCodebook,
    NarrowCodebook,
};
use crate::error::{Error, Result};
use crate::geometry::{phi_unmap, theta_unmap, ArrayGeometry, CVector, Direction, Upa};
use crate::training::{
    exhaustive_pair_count, exhaustive_search, hierarchical_slot_count, hierarchical_training_against, QuadCodebook,
    TrainingSetup,
};

/// Smallest raster accepted by the brute-force worst-case search.
pub const MIN_WORST_CASE_RESOLUTION: usize = 64;

/// `β` of the worst-case expression: 1 for odd `N`, `sin(acos(√2/(2N)))`
/// for even `N`.
pub fn worst_case_beta(per_axis: usize) -> f64 {
    if per_axis % 2 == 1 {
        1.0
    } else {
        (SQRT_2 / (2.0 * per_axis as f64)).acos().sin()
    }
}

/// Closed-form normalized worst-case value of the proposed narrow beams,
/// as the ratio of Dirichlet kernels
/// `sin(√2 N_z π/4N) sin(√2 β N_y π/4N) / (N_y N_z sin(√2π/4N) sin(√2βπ/4N))`.
///
/// This ratio is an array-factor amplitude: it equals `|a^H f|` at the
/// corner shared by four neighbouring beams. Compare
/// [`worst_case_power_closed_form`] with power gains.
pub fn worst_case_gain_closed_form(per_axis: usize, n_y: usize, n_z: usize) -> f64 {
    let n = per_axis as f64;
    let beta = worst_case_beta(per_axis);
    let arg = SQRT_2 * PI / (4.0 * n);
    let dirichlet = |count: usize, scale: f64| {
        let m = count as f64;
        (m * scale * arg).sin() / (m * (scale * arg).sin())
    };
    dirichlet(n_z, 1.0) * dirichlet(n_y, beta)
}

/// Square of [`worst_case_gain_closed_form`], on the `|a^H f|²` scale.
pub fn worst_case_power_closed_form(per_axis: usize, n_y: usize, n_z: usize) -> f64 {
    worst_case_gain_closed_form(per_axis, n_y, n_z).powi(2)
}

/// `n` evenly spaced points covering `[lo, hi]` inclusive.
fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![(lo + hi) / 2.0];
    }
    let step = (hi - lo) / (n - 1) as f64;
    (0..n)
        .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
        .collect()
}

/// Largest `|a_k^H f|²` over `codewords` at every `(x, y)` raster point,
/// with `x = sin(φ - (k-1)π/2)` and `y = cos θ`. Row-major in `y`.
///
/// Uses the separable structure of the response: for each row the
/// elevation factor is folded into every codeword first, leaving an
/// `N_y`-term sum per column.
fn max_gain_raster(geom: &ArrayGeometry, codewords: &[&CVector], xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let ny = geom.n_y();
    let sy = 1.0 / (ny as f64).sqrt();
    let sz = 1.0 / (geom.n_z() as f64).sqrt();
    let y_idx: Vec<f64> = geom.y_indices().collect();
    let z_idx: Vec<f64> = geom.z_indices().collect();
    let rows: Vec<Vec<f64>> = ys
        .par_iter()
        .map(|&y| {
            let az: Vec<Complex64> = z_idx.iter().map(|&n| Complex64::from_polar(sz, -PI * n * y)).collect();
            let folded: Vec<Vec<Complex64>> = codewords
                .iter()
                .map(|f| {
                    (0..ny)
                        .map(|iy| az.iter().enumerate().map(|(iz, c)| c * f[iz * ny + iy]).sum())
                        .collect()
                })
                .collect();
            let sin_theta = (1.0 - y * y).max(0.0).sqrt();
            let mut phasor = vec![Complex64::new(0.0, 0.0); ny];
            xs.iter()
                .map(|&x| {
                    let u = x * sin_theta;
                    for (p, &n) in phasor.iter_mut().zip(&y_idx) {
                        *p = Complex64::from_polar(sy, -PI * n * u);
                    }
                    folded
                        .iter()
                        .map(|b| b.iter().zip(&phasor).map(|(b, p)| b * p).sum::<Complex64>().norm_sqr())
                        .fold(0.0, f64::max)
                })
                .collect()
        })
        .collect();
    rows.concat()
}

/// Location and value of the worst-case point found by brute force.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WorstCasePoint {
    pub gain: f64,
    pub phi_mapped: f64,
    pub theta_mapped: f64,
    pub direction: Direction,
}

/// Minimum over a `resolution × resolution` raster of the sector of the
/// best narrow-beam gain `max_f |a_k^H f|²`. Unit-norm steering and
/// codewords put the on-centre best case at 1, so the value is already
/// normalized. The first minimum in raster order is reported.
pub fn worst_case_search(narrow: &NarrowCodebook, resolution: usize) -> Result<WorstCasePoint> {
    if resolution < MIN_WORST_CASE_RESOLUTION {
        return Err(Error::arg(format!(
            "worst-case resolution must be at least {MIN_WORST_CASE_RESOLUTION}, got {resolution}"
        )));
    }
    let axis = linspace(-FRAC_1_SQRT_2, FRAC_1_SQRT_2, resolution);
    // Θ = -cos θ, so the y axis is the same symmetric interval reversed.
    let ys: Vec<f64> = axis.iter().map(|t| -t).collect();
    let weights: Vec<&CVector> = narrow.beams.iter().map(|c| &c.weights).collect();
    let gains = max_gain_raster(&narrow.geometry, &weights, &axis, &ys);
    let (idx, &gain) = gains
        .iter()
        .enumerate()
        .fold((0, &f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best });
    let (r, c) = (idx / resolution, idx % resolution);
    let k = narrow.upa;
    let phi_mapped = axis[c] + SQRT_2 * k.offset() as f64;
    let theta_mapped = axis[r];
    Ok(WorstCasePoint {
        gain,
        phi_mapped,
        theta_mapped,
        direction: Direction::new(phi_unmap(k, phi_mapped), theta_unmap(theta_mapped)),
    })
}

/// Brute-force normalized worst-case gain of a narrow stage.
pub fn worst_case_gain_bruteforce(narrow: &NarrowCodebook, resolution: usize) -> Result<f64> {
    worst_case_search(narrow, resolution).map(|p| p.gain)
}

/// One row of the worst-case comparison table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WorstCaseRow {
    pub per_axis: usize,
    pub codebook: CodebookKind,
    /// Closed form as an amplitude and squared; proposed beams only.
    pub closed_form: Option<f64>,
    pub closed_form_power: Option<f64>,
    pub bruteforce: f64,
}

/// Worst-case gains of the narrow stages of `kinds` for each `N`, on UPA 1.
pub fn worst_case_table(
    geometry: ArrayGeometry,
    per_axis: &[usize],
    kinds: &[CodebookKind],
    resolution: usize,
) -> Result<Vec<WorstCaseRow>> {
    let mut rows = Vec::new();
    for &n in per_axis {
        let cfg = CodebookConfig::new(geometry, n)?;
        for &kind in kinds {
            // Both hierarchical kinds share the proposed narrow stage.
            let narrow = if kind.is_hierarchical() {
                build_narrow_stage(&cfg, Upa::ALL[0])
            } else {
                build_codebook(kind, &cfg, Upa::ALL[0])?.narrow().clone()
            };
            let closed = (kind == CodebookKind::Proposed)
                .then(|| worst_case_gain_closed_form(n, geometry.n_y(), geometry.n_z()));
            rows.push(WorstCaseRow {
                per_axis: n,
                codebook: kind,
                closed_form: closed,
                closed_form_power: closed.map(|c| c * c),
                bruteforce: worst_case_gain_bruteforce(&narrow, resolution)?,
            });
        }
    }
    Ok(rows)
}

/// Sampled `|a_k(φ,θ)^H ω|²` of one codeword over the sector.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PatternRaster {
    pub upa: Upa,
    pub stage: usize,
    pub index: usize,
    /// Column coordinates `Φ`.
    pub phi_mapped: Vec<f64>,
    /// Row coordinates `Θ`.
    pub theta_mapped: Vec<f64>,
    /// Linear gains, row-major: `gain[r * phi_mapped.len() + c]`.
    pub gain: Vec<f64>,
}

impl PatternRaster {
    pub fn at(&self, row: usize, col: usize) -> f64 {
        self.gain[row * self.phi_mapped.len() + col]
    }

    pub fn phi_rad(&self, col: usize) -> f64 {
        phi_unmap(self.upa, self.phi_mapped[col])
    }

    pub fn theta_rad(&self, row: usize) -> f64 {
        theta_unmap(self.theta_mapped[row])
    }

    pub fn max(&self) -> f64 {
        self.gain.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.gain.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Raster of `codeword` on a `resolution × resolution` grid over the
/// mapped sector of its UPA.
pub fn beam_pattern(codeword: &Codeword, geom: &ArrayGeometry, resolution: usize) -> Result<PatternRaster> {
    if resolution < 2 {
        return Err(Error::arg(format!(
            "pattern resolution must be at least 2, got {resolution}"
        )));
    }
    if codeword.weights.len() != geom.element_count() {
        return Err(Error::arg(format!(
            "codeword has {} weights but the array has {} elements",
            codeword.weights.len(),
            geom.element_count()
        )));
    }
    let axis = linspace(-FRAC_1_SQRT_2, FRAC_1_SQRT_2, resolution);
    let ys: Vec<f64> = axis.iter().map(|t| -t).collect();
    let gain = max_gain_raster(geom, &[&codeword.weights], &axis, &ys);
    let shift = SQRT_2 * codeword.upa.offset() as f64;
    Ok(PatternRaster {
        upa: codeword.upa,
        stage: codeword.stage,
        index: codeword.index,
        phi_mapped: axis.iter().map(|p| p + shift).collect(),
        theta_mapped: axis,
        gain,
    })
}

/// Smallest gain of codeword `(s, i)` over its own coverage rectangle,
/// sampled at `samples_per_block` midpoints per grid block and axis.
pub fn min_coverage_gain(
    book: &HierarchicalCodebook,
    stage: usize,
    index: usize,
    samples_per_block: usize,
) -> Result<f64> {
    if samples_per_block == 0 {
        return Err(Error::arg("samples_per_block must be positive"));
    }
    let cw = book.codeword(stage, index)?;
    let cov = book.coverage(stage, index);
    let n = book.config.per_axis;
    let midpoints = |(first, last): (usize, usize)| -> Vec<f64> {
        (first..=last)
            .flat_map(|j| {
                let (lo, hi) = grid_block_edges(j, n);
                let step = (hi - lo) / samples_per_block as f64;
                (0..samples_per_block).map(move |t| lo + step * (t as f64 + 0.5))
            })
            .collect()
    };
    let xs = midpoints(cov.azimuth);
    let ys = midpoints(cov.elevation);
    let gains = max_gain_raster(&book.config.geometry, &[&cw.weights], &xs, &ys);
    Ok(gains.into_iter().fold(f64::INFINITY, f64::min))
}

/// Inputs of an alignment-rate sweep shared by all codebook kinds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepConfig {
    pub codebook: CodebookConfig,
    pub tx_gain: ElementGain,
    pub rx_gain: ElementGain,
    pub transmit_power: f64,
    pub split_phase1_power: bool,
    pub seed: u64,
}

impl SweepConfig {
    pub fn new(codebook: CodebookConfig, seed: u64) -> Self {
        SweepConfig {
            codebook,
            tx_gain: ElementGain::default(),
            rx_gain: ElementGain::default(),
            transmit_power: 1.0,
            split_phase1_power: false,
            seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPoint {
    pub snr_db: f64,
    pub success_rate: f64,
    /// Half-width of the normal-approximation 95% interval.
    pub ci_halfwidth: f64,
    pub mean_norm_gain: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub codebook: CodebookKind,
    pub seed: u64,
    pub trials: usize,
    pub hierarchical_slots: u64,
    pub exhaustive_pairs: u64,
    pub points: Vec<SweepPoint>,
}

/// Random LoS link: a uniformly chosen UPA on each side, AoD and AoA
/// uniform in the mapped coordinates of that UPA's sector, unit-magnitude
/// path gain with uniform phase.
pub fn random_link<R: Rng + ?Sized>(rng: &mut R, tx_gain: ElementGain, rx_gain: ElementGain) -> LosLink {
    let draw = |rng: &mut R| {
        let k = Upa::ALL[rng.random_range(0..4)];
        let x: f64 = rng.random_range(-FRAC_1_SQRT_2..=FRAC_1_SQRT_2);
        let y: f64 = rng.random_range(-FRAC_1_SQRT_2..=FRAC_1_SQRT_2);
        Direction::new(x.asin() + k.boresight_azimuth(), y.acos())
    };
    let aod = draw(rng);
    let aoa = draw(rng);
    let alpha = random_alpha(rng);
    LosLink::new(aod, aoa, alpha)
        .expect("unit path gain")
        .with_gains(tx_gain, rx_gain)
}

/// Per-SNR success rate and mean normalized gain of hierarchical training
/// for each codebook kind.
///
/// Trial `t` draws its link from a ChaCha8 generator seeded with
/// `seed + t`; the measurement noise at SNR point `p` uses the same seed on
/// stream `p + 1`. Every kind therefore sees the same links and the same
/// noise draws, and results do not depend on thread scheduling.
pub fn alignment_rate_sweep(
    cfg: &SweepConfig,
    kinds: &[CodebookKind],
    snr_db: &[f64],
    trials: usize,
) -> Result<Vec<SweepResult>> {
    if trials < 1 {
        return Err(Error::config("trials must be at least 1"));
    }
    if snr_db.is_empty() {
        return Err(Error::config("SNR grid is empty"));
    }
    let noise: Vec<f64> = snr_db
        .iter()
        .map(|&s| noise_power_for_snr(s, cfg.transmit_power, 1.0, cfg.tx_gain, cfg.rx_gain))
        .collect();
    let stages = cfg.codebook.stage_count();
    kinds
        .iter()
        .map(|&kind| {
            let books = QuadCodebook::build(kind, &cfg.codebook)?;
            let per_trial: Vec<Vec<(bool, f64)>> = (0..trials as u64)
                .into_par_iter()
                .map(|t| {
                    let trial_seed = cfg.seed.wrapping_add(t);
                    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
                    let link = random_link(&mut rng, cfg.tx_gain, cfg.rx_gain);
                    let reference = exhaustive_search(&link, books.narrow_books());
                    noise
                        .iter()
                        .enumerate()
                        .map(|(p, &sigma2)| {
                            let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
                            rng.set_stream(p as u64 + 1);
                            let setup = TrainingSetup {
                                measurement: MeasurementConfig {
                                    transmit_power: cfg.transmit_power,
                                    noise_power: sigma2,
                                    seed: trial_seed,
                                },
                                split_phase1_power: cfg.split_phase1_power,
                            };
                            let out = hierarchical_training_against(&link, &books, &setup, &reference, &mut rng);
                            (out.success, out.normalized_gain)
                        })
                        .collect()
                })
                .collect();
            let n = trials as f64;
            let points = snr_db
                .iter()
                .enumerate()
                .map(|(p, &snr)| {
                    let successes = per_trial.iter().filter(|r| r[p].0).count() as f64;
                    let gain: f64 = per_trial.iter().map(|r| r[p].1).sum();
                    let rate = successes / n;
                    SweepPoint {
                        snr_db: snr,
                        success_rate: rate,
                        ci_halfwidth: 1.96 * (rate * (1.0 - rate) / n).sqrt(),
                        mean_norm_gain: gain / n,
                    }
                })
                .collect();
            Ok(SweepResult {
                codebook: kind,
                seed: cfg.seed,
                trials,
                hierarchical_slots: hierarchical_slot_count(stages),
                exhaustive_pairs: exhaustive_pair_count(cfg.codebook.per_axis),
                points,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codebook::{build_hierarchical_codebook, narrow_beam_angles, BeamKind};
    use crate::geometry::steering_vector;
    use approx::assert_abs_diff_eq;

    fn geom(n: usize) -> ArrayGeometry {
        ArrayGeometry::new(n, n).unwrap()
    }

    fn upa(k: usize) -> Upa {
        Upa::new(k).unwrap()
    }

    fn narrow(n_el: usize, per_axis: usize) -> NarrowCodebook {
        build_narrow_stage(&CodebookConfig::new(geom(n_el), per_axis).unwrap(), upa(1))
    }

    #[test]
    fn closed_form_reference_values() {
        assert_abs_diff_eq!(worst_case_gain_closed_form(8, 8, 8), 0.656_098, epsilon = 1e-6);
        assert_abs_diff_eq!(worst_case_gain_closed_form(4, 8, 8), 0.137_178, epsilon = 1e-6);
        for n in 1..=9 {
            assert_abs_diff_eq!(worst_case_gain_closed_form(n, 1, 1), 1.0, epsilon = 1e-15);
        }
        assert_eq!(worst_case_beta(3), 1.0);
        assert_abs_diff_eq!(worst_case_beta(2), (1.0 - 0.125f64).sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn closed_form_is_the_central_corner_gain() {
        // Four beams meet at the sector centre when N is even; the squared
        // closed form is the gain of each of them there.
        for (n, el) in [(2, 8), (4, 8), (8, 8), (8, 16), (4, 5)] {
            let nb = narrow(el, n);
            let a = steering_vector(&nb.geometry, upa(1), Direction::new(0.0, std::f64::consts::FRAC_PI_2));
            let best = nb
                .beams
                .iter()
                .map(|c| a.dotc(&c.weights).norm_sqr())
                .fold(0.0, f64::max);
            assert_abs_diff_eq!(best, worst_case_power_closed_form(n, el, el), epsilon = 1e-12);
        }
    }

    #[test]
    fn raster_kernel_matches_direct_evaluation() {
        let g = ArrayGeometry::new(3, 5).unwrap();
        let cfg = CodebookConfig::new(g, 2).unwrap();
        let book = build_hierarchical_codebook(&cfg, upa(1)).unwrap();
        let cws: Vec<&CVector> = book.codewords().map(|c| &c.weights).collect();
        let xs = [-0.6, 0.0, 0.31];
        let ys = [0.5, -0.2];
        let raster = max_gain_raster(&g, &cws, &xs, &ys);
        for (r, &y) in ys.iter().enumerate() {
            for (c, &x) in xs.iter().enumerate() {
                let a = steering_vector(&g, upa(1), Direction::new(f64::asin(x), y.acos()));
                let want = cws.iter().map(|w| a.dotc(w).norm_sqr()).fold(0.0, f64::max);
                assert_abs_diff_eq!(raster[r * 3 + c], want, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn single_beam_worst_case_is_at_a_corner() {
        let g = geom(4);
        let beams = narrow_beam_angles(1, upa(1));
        let nb = NarrowCodebook {
            upa: upa(1),
            geometry: g,
            per_axis: 1,
            beams: vec![Codeword {
                weights: steering_vector(&g, upa(1), beams[0].direction),
                upa: upa(1),
                stage: 0,
                index: 1,
                kind: BeamKind::Narrow,
            }],
            directions: vec![beams[0].direction],
        };
        let wc = worst_case_gain_bruteforce(&nb, 64).unwrap();
        let corner = [(-1.0, -1.0), (-1.0, 1.0), (1.0, -1.0), (1.0, 1.0)]
            .iter()
            .map(|&(sx, sy): &(f64, f64)| {
                let x = sx * FRAC_1_SQRT_2;
                let y = sy * FRAC_1_SQRT_2;
                let a = steering_vector(&g, upa(1), Direction::new(x.asin(), y.acos()));
                a.dotc(&nb.beams[0].weights).norm_sqr()
            })
            .fold(f64::INFINITY, f64::min);
        assert_abs_diff_eq!(wc, corner, epsilon = 1e-12);
    }

    #[test]
    fn worst_case_rejects_coarse_raster() {
        assert!(worst_case_gain_bruteforce(&narrow(4, 2), 63).is_err());
    }

    #[test]
    fn worst_case_increases_with_n() {
        let vals: Vec<f64> = [2, 4, 8]
            .iter()
            .map(|&n| worst_case_gain_bruteforce(&narrow(8, n), 128).unwrap())
            .collect();
        assert!(vals.windows(2).all(|w| w[1] > w[0]), "{vals:?}");
    }

    #[test]
    fn worst_case_point_is_reported_in_sector() {
        let p = worst_case_search(&narrow(8, 4), 65).unwrap();
        assert!(crate::geometry::coverage_contains(upa(1), p.direction));
        assert!(p.gain > 0.0 && p.gain < 1.0);
    }

    #[test]
    fn narrow_pattern_peaks_at_its_centre() {
        let nb = narrow(8, 4);
        let g = nb.geometry;
        // With 33 samples per axis the raster step is √2/32, so every
        // N = 4 centre (odd multiples of √2/8) is a raster node. Beam 6 is
        // (n, p) = (2, 2): x = -√2/8 and Θ = -cos θ = √2/8.
        let raster = beam_pattern(&nb.beams[5], &g, 33).unwrap();
        assert!(raster.max() <= 1.0 + 1e-12);
        assert_abs_diff_eq!(raster.at(20, 12), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(raster.at(20, 12), raster.max(), epsilon = 1e-15);
    }

    #[test]
    fn pattern_coordinates_round_trip() {
        let cfg = CodebookConfig::new(geom(4), 2).unwrap();
        let book = build_hierarchical_codebook(&cfg, upa(2)).unwrap();
        let raster = beam_pattern(book.codeword(0, 1).unwrap(), &cfg.geometry, 5).unwrap();
        assert_eq!(raster.gain.len(), 25);
        assert_abs_diff_eq!(raster.phi_mapped[0], SQRT_2 - FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(raster.phi_rad(2), std::f64::consts::FRAC_PI_2, epsilon = 1e-12);
        assert_abs_diff_eq!(raster.theta_rad(2), std::f64::consts::FRAC_PI_2, epsilon = 1e-12);
        assert_abs_diff_eq!(raster.theta_rad(0), std::f64::consts::FRAC_PI_4, epsilon = 1e-12);
        assert!(raster.gain.iter().all(|&g| (0.0..=1.0 + 1e-12).contains(&g)));
    }

    #[test]
    fn pattern_is_rotation_invariant() {
        let cfg = CodebookConfig::new(geom(4), 2).unwrap();
        let b1 = build_hierarchical_codebook(&cfg, upa(1)).unwrap();
        let b3 = build_hierarchical_codebook(&cfg, upa(3)).unwrap();
        for s in 0..=2 {
            for i in 1..=b1.stage(s).len() {
                let r1 = beam_pattern(b1.codeword(s, i).unwrap(), &cfg.geometry, 17).unwrap();
                let r3 = beam_pattern(b3.codeword(s, i).unwrap(), &cfg.geometry, 17).unwrap();
                for (a, b) in r1.gain.iter().zip(&r3.gain) {
                    assert_abs_diff_eq!(a, b, epsilon = 1e-10);
                }
                for (a, b) in r1.phi_mapped.iter().zip(&r3.phi_mapped) {
                    assert_abs_diff_eq!(b - a, 2.0 * SQRT_2, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn pattern_rejects_bad_input() {
        let nb = narrow(4, 2);
        assert!(beam_pattern(&nb.beams[0], &nb.geometry, 1).is_err());
        assert!(beam_pattern(&nb.beams[0], &geom(3), 8).is_err());
    }

    #[test]
    fn narrow_coverage_gain_is_bounded_by_one() {
        let cfg = CodebookConfig::new(geom(8), 4).unwrap();
        let book = build_hierarchical_codebook(&cfg, upa(1)).unwrap();
        for i in 1..=16 {
            let g = min_coverage_gain(&book, 4, i, 4).unwrap();
            assert!(g > 0.0 && g <= 1.0);
        }
        assert!(min_coverage_gain(&book, 4, 17, 4).is_err());
    }

    #[test]
    fn sweep_is_deterministic_and_bounded() {
        let cfg = SweepConfig::new(CodebookConfig::new(geom(4), 2).unwrap(), 17);
        let kinds = [CodebookKind::Proposed, CodebookKind::InverseNoBuffer];
        let a = alignment_rate_sweep(&cfg, &kinds, &[0.0, 30.0], 40).unwrap();
        let b = alignment_rate_sweep(&cfg, &kinds, &[0.0, 30.0], 40).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 2);
        for r in &a {
            assert_eq!(r.hierarchical_slots, 10);
            assert_eq!(r.exhaustive_pairs, 256);
            for p in &r.points {
                assert!((0.0..=1.0).contains(&p.success_rate));
                assert!(p.mean_norm_gain > 0.0 && p.mean_norm_gain <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn sweep_rejects_empty_inputs() {
        let cfg = SweepConfig::new(CodebookConfig::new(geom(4), 2).unwrap(), 0);
        assert!(alignment_rate_sweep(&cfg, &[CodebookKind::Proposed], &[10.0], 0).is_err());
        assert!(alignment_rate_sweep(&cfg, &[CodebookKind::Proposed], &[], 5).is_err());
        assert!(alignment_rate_sweep(&cfg, &[CodebookKind::UniformReal], &[10.0], 5).is_err());
    }

    #[test]
    fn random_links_land_in_the_drawn_sectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let l = random_link(&mut rng, ElementGain::default(), ElementGain::default());
            assert!(crate::geometry::upa_for_direction(l.aod).is_some());
            assert!(crate::geometry::upa_for_direction(l.aoa).is_some());
            assert!(l.optimal_gain() > 0.0);
        }
    }
}
