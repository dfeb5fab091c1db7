//! Synthesize wide beams with and without the buffer ring, compare their
//! worst in-coverage gain and write pattern rasters as CSV.
//!
//! Usage: `wide_beam_patterns [output_dir]`

use std::fmt::Write as _;
use std::path::PathBuf;

use quadbeam::codebook::{build_codebook, CodebookConfig, CodebookKind};
use quadbeam::geometry::{ArrayGeometry, Upa};
use quadbeam::metrics::{beam_pattern, min_coverage_gain};

fn main() -> quadbeam::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "patterns".into()));
    std::fs::create_dir_all(&out)?;
    let cfg = CodebookConfig::new(ArrayGeometry::new(16, 16)?, 8)?.with_buffer(1, 0.5)?;
    let k = Upa::new(1)?;

    for kind in [CodebookKind::Proposed, CodebookKind::InverseNoBuffer] {
        let book = build_codebook(kind, &cfg, k)?;
        let book = book.hierarchical().expect("hierarchical design");
        println!("{kind}");
        for s in 0..3 {
            let worst = (1..=1usize << s)
                .map(|i| min_coverage_gain(book, s, i, 4))
                .collect::<quadbeam::Result<Vec<_>>>()?
                .into_iter()
                .fold(f64::INFINITY, f64::min);
            println!("  stage {s}: worst in-coverage gain {worst:.3e}");

            let raster = beam_pattern(book.codeword(s, 1)?, &cfg.geometry, 101)?;
            let mut csv = String::from("phi_mapped,theta_mapped,gain_linear\n");
            for r in 0..raster.theta_mapped.len() {
                for c in 0..raster.phi_mapped.len() {
                    let _ = writeln!(
                        csv,
                        "{},{},{}",
                        raster.phi_mapped[c],
                        raster.theta_mapped[r],
                        raster.at(r, c)
                    );
                }
            }
            std::fs::write(out.join(format!("{kind}_stage{s}.csv")), csv)?;
        }
    }
    println!("rasters written to {}", out.display());
    Ok(())
}
