//! Monte Carlo alignment rate versus SNR for the buffered and unbuffered
//! wide-beam designs.
//!
//! Usage: `alignment_sweep [trials] [seed]`

use quadbeam::codebook::{CodebookConfig, CodebookKind};
use quadbeam::geometry::ArrayGeometry;
use quadbeam::metrics::{alignment_rate_sweep, SweepConfig};

fn main() -> quadbeam::Result<()> {
    let mut args = std::env::args().skip(1);
    let trials = args.next().map_or(300, |a| a.parse().expect("trial count"));
    let seed = args.next().map_or(1, |a| a.parse().expect("seed"));
    let cfg = SweepConfig::new(CodebookConfig::new(ArrayGeometry::new(8, 8)?, 8)?, seed);
    let snr = [0.0, 10.0, 20.0, 30.0, 40.0, 50.0];
    let kinds = [CodebookKind::Proposed, CodebookKind::InverseNoBuffer];

    let results = alignment_rate_sweep(&cfg, &kinds, &snr, trials)?;
    println!(
        "{trials} trials, {} slots per training vs {} exhaustive pairs",
        results[0].hierarchical_slots, results[0].exhaustive_pairs
    );
    print!("{:>8}", "SNR dB");
    for r in &results {
        print!("  {:>24}", r.codebook.name());
    }
    println!();
    for (i, s) in snr.iter().enumerate() {
        print!("{s:>8.1}");
        for r in &results {
            let p = &r.points[i];
            print!(
                "  {:>6.3} +/- {:.3} g {:.3}",
                p.success_rate, p.ci_halfwidth, p.mean_norm_gain
            );
        }
        println!();
    }
    Ok(())
}
