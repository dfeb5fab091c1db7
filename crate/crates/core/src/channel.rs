//! Line-of-sight link between two quadruple-UPA terminals.
//!
//! The channel from transmit UPA `k` to receive UPA `m` is the rank-one
//! matrix `G_t G_r α · a_m(aoa) a_k(aod)^H`. Beamformed responses are
//! evaluated through the factorization
//! `w^H H f = G_t G_r α (w^H a_m)(a_k^H f)` without forming `H`.
//!
//! The reverse link (receiver transmitting back) uses `H^H`, so a codeword
//! has the same pattern whether it transmits or receives.

use std::f64::consts::{PI, SQRT_2};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{coverage_contains, steering_vector, ArrayGeometry, CVector, Direction, Upa};

/// Linear gain of an ideal sector element that radiates all of its power
/// into one UPA's sector of `π√2/2` sr: `4π / (π√2/2) = 4√2`.
pub const DEFAULT_SECTOR_GAIN: f64 = 4.0 * SQRT_2;

/// Per-element radiation pattern.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "gain", rename_all = "snake_case")]
pub enum ElementGain {
    /// Constant gain inside the UPA's sector, zero outside.
    IdealSector(f64),
    Isotropic(f64),
}

impl Default for ElementGain {
    fn default() -> Self {
        ElementGain::IdealSector(DEFAULT_SECTOR_GAIN)
    }
}

impl ElementGain {
    pub fn eval(&self, k: Upa, dir: Direction) -> f64 {
        match *self {
            ElementGain::IdealSector(g) => {
                if coverage_contains(k, dir) {
                    g
                } else {
                    0.0
                }
            }
            ElementGain::Isotropic(g) => g,
        }
    }

    /// Gain toward a direction inside the UPA's own sector.
    pub fn peak(&self) -> f64 {
        match *self {
            ElementGain::IdealSector(g) | ElementGain::Isotropic(g) => g,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LosLink {
    pub aod: Direction,
    pub aoa: Direction,
    pub alpha: Complex64,
    pub tx_gain: ElementGain,
    pub rx_gain: ElementGain,
}

impl LosLink {
    pub fn new(aod: Direction, aoa: Direction, alpha: Complex64) -> Result<Self> {
        if alpha.norm().is_nan() || alpha.norm() <= 0.0 {
            return Err(Error::arg("LoS path gain must be non-zero"));
        }
        Ok(LosLink {
            aod,
            aoa,
            alpha,
            tx_gain: ElementGain::default(),
            rx_gain: ElementGain::default(),
        })
    }

    pub fn with_gains(mut self, tx: ElementGain, rx: ElementGain) -> Self {
        self.tx_gain = tx;
        self.rx_gain = rx;
        self
    }

    /// Scalar `G_t(k) G_r(m) α` multiplying the rank-one channel.
    pub fn path_coefficient(&self, k: Upa, m: Upa) -> Complex64 {
        self.alpha * (self.tx_gain.eval(k, self.aod) * self.rx_gain.eval(m, self.aoa))
    }

    /// Steering vectors of the path at both ends for a UPA pair.
    pub fn endpoints(&self, geom: &ArrayGeometry, k: Upa, m: Upa) -> LinkEndpoints {
        LinkEndpoints {
            coefficient: self.path_coefficient(k, m),
            departure: steering_vector(geom, k, self.aod),
            arrival: steering_vector(geom, m, self.aoa),
        }
    }

    /// Largest squared singular value over all sixteen UPA pairs; the gain
    /// of unconstrained steering-vector beamforming.
    pub fn optimal_gain(&self) -> f64 {
        Upa::ALL
            .iter()
            .flat_map(|&k| Upa::ALL.iter().map(move |&m| (k, m)))
            .map(|(k, m)| self.path_coefficient(k, m).norm_sqr())
            .fold(0.0, f64::max)
    }
}

/// Factored channel of one UPA pair.
#[derive(Debug, Clone)]
pub struct LinkEndpoints {
    pub coefficient: Complex64,
    pub departure: CVector,
    pub arrival: CVector,
}

impl LinkEndpoints {
    /// `w^H H f`.
    pub fn response(&self, f: &CVector, w: &CVector) -> Complex64 {
        if self.coefficient == Complex64::new(0.0, 0.0) {
            return self.coefficient;
        }
        self.coefficient * w.dotc(&self.arrival) * self.departure.dotc(f)
    }
}

/// Explicit channel matrix `H_{k,m}` (`N_a × N_a`).
pub fn los_channel(link: &LosLink, geom: &ArrayGeometry, k: Upa, m: Upa) -> DMatrix<Complex64> {
    let e = link.endpoints(geom, k, m);
    &e.arrival * e.departure.adjoint() * e.coefficient
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementConfig {
    pub transmit_power: f64,
    pub noise_power: f64,
    pub seed: u64,
}

impl MeasurementConfig {
    pub fn new(transmit_power: f64, noise_power: f64, seed: u64) -> Result<Self> {
        if transmit_power.is_nan() || transmit_power <= 0.0 || noise_power.is_nan() || noise_power < 0.0 {
            return Err(Error::arg(format!(
                "need P > 0 and noise power >= 0, got P = {transmit_power}, noise = {noise_power}"
            )));
        }
        Ok(MeasurementConfig {
            transmit_power,
            noise_power,
            seed,
        })
    }

    pub fn noiseless(transmit_power: f64) -> Self {
        MeasurementConfig {
            transmit_power,
            noise_power: 0.0,
            seed: 0,
        }
    }
}

/// `|signal + w^H n|²` with `n ~ CN(0, σ² I)`; exactly `|signal|²` when
/// `σ² = 0`, in which case no random numbers are drawn.
pub fn noisy_power<R: Rng + ?Sized>(noise_power: f64, signal: Complex64, combiner: &CVector, rng: &mut R) -> f64 {
    if noise_power == 0.0 {
        return signal.norm_sqr();
    }
    let scale = (noise_power / 2.0).sqrt();
    let mut noise = Complex64::new(0.0, 0.0);
    for w in combiner.iter() {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        noise += w.conj() * Complex64::new(re * scale, im * scale);
    }
    (signal + noise).norm_sqr()
}

/// Received power `|√P w^H H f + w^H n|²`.
pub fn measure<R: Rng + ?Sized>(
    cfg: &MeasurementConfig,
    channel: &DMatrix<Complex64>,
    f: &CVector,
    w: &CVector,
    rng: &mut R,
) -> f64 {
    let signal = w.dotc(&(channel * f)) * cfg.transmit_power.sqrt();
    noisy_power(cfg.noise_power, signal, w, rng)
}

/// Post-beamforming SNR `P |w^H H f|² / σ²`; infinite without noise.
pub fn effective_snr(
    cfg: &MeasurementConfig,
    link: &LosLink,
    f: &CVector,
    w: &CVector,
    geom: &ArrayGeometry,
    k: Upa,
    m: Upa,
) -> f64 {
    let gain = link.endpoints(geom, k, m).response(f, w).norm_sqr();
    if cfg.noise_power == 0.0 {
        f64::INFINITY
    } else {
        cfg.transmit_power * gain / cfg.noise_power
    }
}

/// Pre-beamforming SNR `P |α|² G_t G_r / σ²` in dB, using the in-sector
/// element gains.
pub fn link_snr_db(cfg: &MeasurementConfig, alpha: Complex64, tx: ElementGain, rx: ElementGain) -> f64 {
    10.0 * (cfg.transmit_power * alpha.norm_sqr() * tx.peak() * rx.peak() / cfg.noise_power).log10()
}

/// Noise power that realizes a pre-beamforming SNR of `snr_db`.
pub fn noise_power_for_snr(snr_db: f64, transmit_power: f64, alpha_gain: f64, tx: ElementGain, rx: ElementGain) -> f64 {
    transmit_power * alpha_gain * tx.peak() * rx.peak() / 10f64.powf(snr_db / 10.0)
}

/// Unit-magnitude path gain with uniform phase.
pub fn random_alpha<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::from_polar(1.0, rng.random_range(-PI..PI))
}
