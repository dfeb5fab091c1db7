use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use quadbeam::codebook::CodebookKind;
use quadbeam::commands::{self, exit_code, Report};
use quadbeam::config::{ConfigSource, ExperimentConfig};
use quadbeam::Result;

/// Codebook construction and beam-training experiments for quadruple-UPA
/// terminals.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Configuration file of `key = value` lines.
    #[arg(long, short, global = true)]
    config: Option<PathBuf>,
    /// Override a configuration key; may be repeated.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
    /// Output directory.
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,
    /// Narrow beams per axis.
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Elements along y.
    #[arg(long, global = true)]
    ny: Option<usize>,
    /// Elements along z.
    #[arg(long, global = true)]
    nz: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    trials: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Build codebooks and write their weights and sidecars.
    Codebook,
    /// Rasterize one codeword's beam pattern.
    Pattern {
        #[arg(long)]
        stage: usize,
        #[arg(long)]
        index: usize,
        #[arg(long, default_value_t = 1)]
        upa: usize,
        #[arg(long, default_value = "proposed")]
        codebook: String,
    },
    /// Alignment rate versus SNR.
    Sweep,
    /// Closed-form and brute-force worst-case narrow-beam gain.
    Worstcase,
}

fn resolve(common: &Common) -> Result<ExperimentConfig> {
    let mut src = match &common.config {
        Some(path) => ConfigSource::load(path)?,
        None => ConfigSource::default(),
    };
    for pair in &common.overrides {
        src.set_pair(pair)?;
    }
    let flags = [
        ("n", common.n.map(|v| v.to_string())),
        ("n_y", common.ny.map(|v| v.to_string())),
        ("n_z", common.nz.map(|v| v.to_string())),
        ("seed", common.seed.map(|v| v.to_string())),
        ("trials", common.trials.map(|v| v.to_string())),
        ("output_dir", common.out.as_ref().map(|p| p.display().to_string())),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            src.set(key, &v)?;
        }
    }
    src.resolve()
}

fn run(cli: &Cli) -> Result<Report> {
    let cfg = resolve(&cli.common)?;
    match &cli.command {
        Command::Codebook => commands::cmd_codebook(&cfg),
        Command::Pattern {
            stage,
            index,
            upa,
            codebook,
        } => {
            let kind: CodebookKind = codebook.parse()?;
            commands::cmd_pattern(&cfg, kind, *upa, *stage, *index)
        }
        Command::Sweep => commands::cmd_sweep(&cfg),
        Command::Worstcase => commands::cmd_worstcase(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            print!("{}", report.summary);
            for f in &report.files {
                println!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
