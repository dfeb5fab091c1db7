//! Worst-case gain of the proposed narrow beams against the uniform
//! benchmarks, with the closed-form value for comparison.
//!
//! Usage: `worst_case_gain [n_elements] [resolution]`

use quadbeam::codebook::{build_codebook, build_narrow_stage, CodebookConfig, CodebookKind};
use quadbeam::geometry::{ArrayGeometry, Upa};
use quadbeam::metrics::{worst_case_gain_bruteforce, worst_case_power_closed_form, worst_case_search};

fn main() -> quadbeam::Result<()> {
    let mut args = std::env::args()
        .skip(1)
        .map(|a| a.parse::<usize>().expect("integer argument"));
    let elements = args.next().unwrap_or(8);
    let resolution = args.next().unwrap_or(256);
    let geom = ArrayGeometry::new(elements, elements)?;
    let k = Upa::new(1)?;

    println!("{elements}x{elements} elements, {resolution} samples per axis");
    println!(
        "{:>3}  {:>10}  {:>10}  {:>10}  {:>10}",
        "N", "closed^2", "proposed", "real", "virtual"
    );
    for n in [2, 4, 8, 16] {
        let cfg = CodebookConfig::new(geom, n)?;
        let proposed = build_narrow_stage(&cfg, k);
        let real = build_codebook(CodebookKind::UniformReal, &cfg, k)?;
        let virt = build_codebook(CodebookKind::UniformVirtual, &cfg, k)?;
        println!(
            "{n:>3}  {:>10.6}  {:>10.6}  {:>10.6}  {:>10.6}",
            worst_case_power_closed_form(n, elements, elements),
            worst_case_gain_bruteforce(&proposed, resolution)?,
            worst_case_gain_bruteforce(real.narrow(), resolution)?,
            worst_case_gain_bruteforce(virt.narrow(), resolution)?,
        );
    }

    let p = worst_case_search(&build_narrow_stage(&CodebookConfig::new(geom, 8)?, k), resolution)?;
    println!(
        "N = 8 minimum at Phi {:+.4}, Theta {:+.4} (azimuth {:+.4} rad, elevation {:.4} rad)",
        p.phi_mapped, p.theta_mapped, p.direction.azimuth, p.direction.elevation
    );
    Ok(())
}
