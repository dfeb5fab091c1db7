//! Train one random link hierarchically at a few noise levels and compare
//! with exhaustive search.

use quadbeam::channel::{noise_power_for_snr, ElementGain, MeasurementConfig};
use quadbeam::codebook::{CodebookConfig, CodebookKind};
use quadbeam::geometry::ArrayGeometry;
use quadbeam::metrics::random_link;
use quadbeam::training::{exhaustive_search, hierarchical_training, phase1, QuadCodebook, TrainingSetup};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> quadbeam::Result<()> {
    let cfg = CodebookConfig::new(ArrayGeometry::new(8, 8)?, 8)?;
    let books = QuadCodebook::build(CodebookKind::Proposed, &cfg)?;
    let gain = ElementGain::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let link = random_link(&mut rng, gain, gain);
    println!(
        "AoD ({:+.3}, {:.3})  AoA ({:+.3}, {:.3})",
        link.aod.azimuth, link.aod.elevation, link.aoa.azimuth, link.aoa.elevation
    );

    let ex = exhaustive_search(&link, books.narrow_books());
    println!(
        "exhaustive: UPAs ({}, {}) beams ({}, {})  {} pairs  normalized gain {:.3}",
        ex.tx_upa, ex.rx_upa, ex.tx_beam, ex.rx_beam, ex.measurement_slots, ex.normalized_gain
    );

    let p1 = phase1(
        &link,
        &books,
        &TrainingSetup::new(MeasurementConfig::noiseless(1.0)),
        &mut rng,
    );
    println!(
        "phase 1 alone picks UPAs ({}, {}) in {} slots",
        p1.tx_upa, p1.rx_upa, p1.slots
    );

    for snr in [0.0, 15.0, 30.0, 60.0] {
        let sigma2 = noise_power_for_snr(snr, 1.0, 1.0, gain, gain);
        let setup = TrainingSetup::new(MeasurementConfig::new(1.0, sigma2, 0)?);
        let out = hierarchical_training(&link, &books, &setup, &mut rng);
        println!(
            "{snr:>5.1} dB: UPAs ({}, {}) beams ({:>2}, {:>2})  {} slots  normalized gain {:.3}  {}",
            out.tx_upa,
            out.rx_upa,
            out.tx_beam,
            out.rx_beam,
            out.measurement_slots,
            out.normalized_gain,
            if out.success { "matches exhaustive" } else { "differs" }
        );
    }
    Ok(())
}
