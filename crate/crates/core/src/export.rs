//! Text serializations of codebooks, rasters, sweeps and worst-case tables.
//!
//! CSV files start with the resolved configuration as `# key = value`
//! comment lines, followed by a header row. Floats use Rust's shortest
//! round-trip formatting except codeword weights, which are written in
//! scientific notation with 17 significant digits. JSON is pretty-printed
//! with a fixed field order. All output is a pure function of its inputs.

use std::fmt::Write as _;

use serde::Serialize;

use crate::codebook::{narrow_index_to_np, Codebook, CodebookKind, CoverageSet};
use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::geometry::Upa;
use crate::metrics::{PatternRaster, SweepResult, WorstCaseRow};

fn preamble(cfg: &ExperimentConfig) -> String {
    cfg.to_text().lines().map(|l| format!("# {l}\n")).collect()
}

/// One row per weight: `upa,stage,index,element_index,re,im`, with
/// one-based stage indices and zero-based element indices.
pub fn codebook_csv(cfg: &ExperimentConfig, books: &[Codebook]) -> String {
    let mut out = preamble(cfg);
    out.push_str("upa,stage,index,element_index,re,im\n");
    for book in books {
        let words: Vec<_> = match book {
            Codebook::Hierarchical(h) => h.codewords().collect(),
            Codebook::NarrowOnly(n) => n.beams.iter().collect(),
        };
        for cw in words {
            for (e, w) in cw.weights.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{:.16e},{:.16e}",
                    cw.upa, cw.stage, cw.index, e, w.re, w.im
                );
            }
        }
    }
    out
}

#[derive(Serialize)]
struct NarrowEntry {
    index: usize,
    n: usize,
    p: usize,
    azimuth_rad: f64,
    elevation_rad: f64,
}

#[derive(Serialize)]
struct UpaEntry<'a> {
    upa: Upa,
    narrow: Vec<NarrowEntry>,
    coverage: Vec<&'a CoverageSet>,
}

#[derive(Serialize)]
struct CodebookSidecar<'a> {
    config: &'a ExperimentConfig,
    codebook: CodebookKind,
    stages: usize,
    per_axis: usize,
    elements: usize,
    codewords_per_upa: usize,
    upas: Vec<UpaEntry<'a>>,
}

/// JSON description of a codebook file: configuration, narrow-beam angles
/// and, for hierarchical designs, the coverage set of every codeword.
pub fn codebook_sidecar(cfg: &ExperimentConfig, kind: CodebookKind, books: &[Codebook]) -> Result<String> {
    let first = books[0].narrow();
    let stages = 2 * first.per_axis.trailing_zeros() as usize;
    let upas = books
        .iter()
        .map(|b| {
            let nb = b.narrow();
            let narrow = nb
                .directions
                .iter()
                .enumerate()
                .map(|(i, d)| {
                    let (n, p) = narrow_index_to_np(i + 1, nb.per_axis);
                    NarrowEntry {
                        index: i + 1,
                        n,
                        p,
                        azimuth_rad: d.azimuth,
                        elevation_rad: d.elevation,
                    }
                })
                .collect();
            let coverage = match b {
                Codebook::Hierarchical(h) => (0..=stages)
                    .flat_map(|s| (1..=1usize << s).map(move |i| (s, i)))
                    .map(|(s, i)| h.coverage(s, i))
                    .collect(),
                Codebook::NarrowOnly(_) => Vec::new(),
            };
            UpaEntry {
                upa: nb.upa,
                narrow,
                coverage,
            }
        })
        .collect();
    let codewords_per_upa = if kind.is_hierarchical() {
        (1 << (stages + 1)) - 1
    } else {
        first.beams.len()
    };
    let doc = CodebookSidecar {
        config: cfg,
        codebook: kind,
        stages,
        per_axis: first.per_axis,
        elements: first.geometry.element_count(),
        codewords_per_upa,
        upas,
    };
    Ok(serde_json::to_string_pretty(&doc)? + "\n")
}

/// `phi_mapped,theta_mapped,phi_rad,theta_rad,gain_linear,gain_db`, one row
/// per raster point in row-major order. Zero gain is written as `-inf` dB.
pub fn raster_csv(cfg: &ExperimentConfig, raster: &PatternRaster) -> String {
    let mut out = preamble(cfg);
    let _ = writeln!(
        out,
        "# upa = {}\n# stage = {}\n# index = {}",
        raster.upa, raster.stage, raster.index
    );
    out.push_str("phi_mapped,theta_mapped,phi_rad,theta_rad,gain_linear,gain_db\n");
    for r in 0..raster.theta_mapped.len() {
        for c in 0..raster.phi_mapped.len() {
            let g = raster.at(r, c);
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                raster.phi_mapped[c],
                raster.theta_mapped[r],
                raster.phi_rad(c),
                raster.theta_rad(r),
                g,
                10.0 * g.log10()
            );
        }
    }
    out
}

#[derive(Serialize)]
struct SweepDoc<'a> {
    config: &'a ExperimentConfig,
    snr_definition: &'static str,
    results: &'a [SweepResult],
}

pub fn sweep_json(cfg: &ExperimentConfig, results: &[SweepResult]) -> Result<String> {
    let doc = SweepDoc {
        config: cfg,
        snr_definition: "pre-beamforming P|alpha|^2 G_t G_r / sigma^2 with |alpha| = 1 and in-sector element gains",
        results,
    };
    Ok(serde_json::to_string_pretty(&doc)? + "\n")
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// `n,codebook,closed_form,closed_form_power,bruteforce`; the closed-form
/// columns are empty for benchmark designs.
pub fn worstcase_csv(cfg: &ExperimentConfig, rows: &[WorstCaseRow]) -> String {
    let mut out = preamble(cfg);
    out.push_str("n,codebook,closed_form,closed_form_power,bruteforce\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.per_axis,
            r.codebook,
            opt(r.closed_form),
            opt(r.closed_form_power),
            r.bruteforce
        );
    }
    out
}

/// Fixed-width table of worst-case rows for terminal output.
pub fn worstcase_table(rows: &[WorstCaseRow]) -> String {
    let fmt = |x: Option<f64>| x.map(|v| format!("{v:.6}")).unwrap_or_else(|| "-".into());
    let mut out = format!(
        "{:>4}  {:<16}  {:>11}  {:>11}  {:>11}\n",
        "N", "codebook", "closed", "closed^2", "bruteforce"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{:>4}  {:<16}  {:>11}  {:>11}  {:>11.6}",
            r.per_axis,
            r.codebook.name(),
            fmt(r.closed_form),
            fmt(r.closed_form_power),
            r.bruteforce
        );
    }
    out
}
