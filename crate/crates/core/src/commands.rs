//! Subcommands of the `quadbeam` binary. Each writes its files under the
//! configured output directory and returns their paths with a short
//! human-readable summary.

use std::fs;
use std::path::{Path, PathBuf};

use crate::codebook::{build_codebook, Codebook, CodebookKind};
use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::export;
use crate::geometry::Upa;
use crate::metrics::{alignment_rate_sweep, beam_pattern, worst_case_table};

/// Process exit status for an error: 2 for bad configuration or
/// arguments, 3 for numerical failures, 1 for I/O and serialization.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) | Error::InvalidArgument(_) => 2,
        Error::Synthesis(_) => 3,
        Error::Io(_) | Error::Json(_) => 1,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub files: Vec<PathBuf>,
    pub summary: String,
}

fn write(dir: &Path, name: &str, contents: &str, files: &mut Vec<PathBuf>) -> Result<()> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, contents)?;
    files.push(path);
    Ok(())
}

fn build_all(cfg: &ExperimentConfig, kind: CodebookKind) -> Result<Vec<Codebook>> {
    let cb = cfg.codebook_config()?;
    Upa::ALL.iter().map(|&k| build_codebook(kind, &cb, k)).collect()
}

/// Build each configured codebook kind for all four UPAs and write
/// `codebook_<kind>.csv` with its `codebook_<kind>.json` sidecar.
pub fn cmd_codebook(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let mut files = Vec::new();
    let mut summary = String::new();
    for &kind in &cfg.codebooks {
        let books = build_all(cfg, kind)?;
        write(
            &cfg.output_dir,
            &format!("codebook_{kind}.csv"),
            &export::codebook_csv(cfg, &books),
            &mut files,
        )?;
        write(
            &cfg.output_dir,
            &format!("codebook_{kind}.json"),
            &export::codebook_sidecar(cfg, kind, &books)?,
            &mut files,
        )?;
        let per_upa = match &books[0] {
            Codebook::Hierarchical(h) => h.codewords().count(),
            Codebook::NarrowOnly(n) => n.beams.len(),
        };
        summary.push_str(&format!("{kind}: {per_upa} codewords per UPA\n"));
    }
    Ok(Report { files, summary })
}

/// Raster of codeword `(stage, index)` of UPA `upa` in the given design.
pub fn cmd_pattern(
    cfg: &ExperimentConfig,
    kind: CodebookKind,
    upa: usize,
    stage: usize,
    index: usize,
) -> Result<Report> {
    cfg.validate()?;
    let k = Upa::new(upa).map_err(|e| Error::config(e.to_string()))?;
    let cb = cfg.codebook_config()?;
    let stages = cb.stage_count();
    if stage > stages || index == 0 || index > 1 << stage {
        return Err(Error::config(format!(
            "codeword (stage {stage}, index {index}) does not exist: stages run 0..={stages} with 2^s codewords each"
        )));
    }
    let book = build_codebook(kind, &cb, k)?;
    let cw = match &book {
        Codebook::Hierarchical(h) => h.codeword(stage, index)?,
        Codebook::NarrowOnly(n) if stage == stages => &n.beams[index - 1],
        Codebook::NarrowOnly(_) => {
            return Err(Error::config(format!(
                "codebook '{kind}' has only its narrow stage {stages}"
            )));
        }
    };
    let raster = beam_pattern(cw, &cb.geometry, cfg.pattern_resolution)?;
    let mut files = Vec::new();
    let name = format!("pattern_{kind}_k{upa}_s{stage}_i{index}.csv");
    write(&cfg.output_dir, &name, &export::raster_csv(cfg, &raster), &mut files)?;
    let summary = format!(
        "{kind} UPA {upa} codeword ({stage}, {index}): gain range [{:.4e}, {:.4e}]\n",
        raster.min(),
        raster.max()
    );
    Ok(Report { files, summary })
}

/// Alignment-rate sweep over the configured SNR grid for each
/// hierarchical codebook kind, written to `sweep.json`.
pub fn cmd_sweep(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    if let Some(k) = cfg.codebooks.iter().find(|k| !k.is_hierarchical()) {
        return Err(Error::config(format!(
            "codebook '{k}' has no wide beams and cannot be swept"
        )));
    }
    let results = alignment_rate_sweep(&cfg.sweep_config()?, &cfg.codebooks, &cfg.snr_db, cfg.trials)?;
    let mut files = Vec::new();
    write(
        &cfg.output_dir,
        "sweep.json",
        &export::sweep_json(cfg, &results)?,
        &mut files,
    )?;
    let mut summary = String::new();
    for r in &results {
        summary.push_str(&format!(
            "{} ({} slots vs {} pairs)\n",
            r.codebook, r.hierarchical_slots, r.exhaustive_pairs
        ));
        for p in &r.points {
            summary.push_str(&format!(
                "  {:>7.2} dB  rate {:.3} +/- {:.3}  gain {:.3}\n",
                p.snr_db, p.success_rate, p.ci_halfwidth, p.mean_norm_gain
            ));
        }
    }
    Ok(Report { files, summary })
}

/// Closed-form and brute-force worst-case gains for each configured `N`,
/// written to `worstcase.csv`.
pub fn cmd_worstcase(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let rows = worst_case_table(
        cfg.geometry()?,
        &cfg.worstcase_n,
        &cfg.worstcase_codebooks,
        cfg.worstcase_resolution,
    )?;
    let mut files = Vec::new();
    write(
        &cfg.output_dir,
        "worstcase.csv",
        &export::worstcase_csv(cfg, &rows),
        &mut files,
    )?;
    Ok(Report {
        files,
        summary: export::worstcase_table(&rows),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(dir: &Path, extra: &str) -> ExperimentConfig {
        let text = format!("n_y = 4\nn_z = 4\nn = 2\noutput_dir = {}\n{extra}", dir.display());
        ExperimentConfig::parse(&text).unwrap()
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Config("x".into())), 2);
        assert_eq!(exit_code(&Error::Synthesis("x".into())), 3);
    }

    #[test]
    fn pattern_index_checks() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = config(dir.path(), "");
        for (stage, index) in [(3, 1), (1, 3), (0, 0)] {
            let err = cmd_pattern(&cfg, CodebookKind::Proposed, 1, stage, index).unwrap_err();
            assert_eq!(exit_code(&err), 2);
        }
        assert_eq!(
            exit_code(&cmd_pattern(&cfg, CodebookKind::Proposed, 5, 0, 1).unwrap_err()),
            2
        );
        assert_eq!(
            exit_code(&cmd_pattern(&cfg, CodebookKind::UniformReal, 1, 0, 1).unwrap_err()),
            2
        );
        let ok = cmd_pattern(&cfg, CodebookKind::UniformReal, 2, 2, 4).unwrap();
        assert!(ok.files[0].ends_with("pattern_uniform_real_k2_s2_i4.csv"));
    }

    #[test]
    fn sweep_rejects_narrow_only_kinds() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = config(dir.path(), "codebooks = proposed,uniform_virtual\ntrials = 2\n");
        assert_eq!(exit_code(&cmd_sweep(&cfg).unwrap_err()), 2);
    }
}
