//! `gfl synth`: train the tabular GAN on the working corpus and write a
//! synthetic dataset plus its fidelity report.

use std::path::PathBuf;

use gfl_core::data::{fidelity_report, save_csv, summarize};
use gfl_core::gan::{generate, train_gan};

use crate::artifacts::{self, RunDirs};
use crate::config::RunConfig;
use crate::error::{Result, Stage};

const FIDELITY_BINS: usize = 20;

#[derive(Debug, clap::Args)]
pub struct SynthArgs {
    /// Real corpus CSV to train on; defaults to the built-in surrogate.
    #[arg(long)]
    pub real: Option<PathBuf>,
    /// Synthetic rows to generate.
    #[arg(long)]
    pub count: Option<usize>,
    /// Generator/discriminator training epochs.
    #[arg(long)]
    pub gan_epochs: Option<usize>,
}

pub fn run(mut config: RunConfig, args: &SynthArgs, dirs: &RunDirs) -> Result<()> {
    if let Some(count) = args.count {
        config.synth_rows = count;
    }
    if let Some(epochs) = args.gan_epochs {
        config.gan_epochs = epochs;
    }

    let real = super::load_corpus(&config, args.real.as_deref())?;
    let gan_config = config.gan_config();
    gan_config.validate().validation("checking GAN settings")?;

    let trained = train_gan(&real, &gan_config).runtime("training the GAN")?;
    let synthetic = generate(&trained.state, config.synth_rows, config.stage_seed("generate"))
        .runtime("sampling the generator")?;

    let data_path = dirs.data.join("synthetic.csv");
    save_csv(&synthetic, &data_path).runtime("writing the synthetic dataset")?;

    let summary = summarize(&synthetic).runtime("summarizing the synthetic dataset")?;
    let summary_path = dirs.reports.join("synthetic_summary.csv");
    write_summary(&summary_path, &summary)?;

    let fidelity =
        fidelity_report(&real, &synthetic, FIDELITY_BINS).runtime("scoring fidelity")?;
    let fidelity_path = dirs.reports.join("fidelity.csv");
    artifacts::write_fidelity(&fidelity_path, &fidelity)?;

    let mean_fidelity: f64 =
        fidelity.iter().map(|(_, s)| s).sum::<f64>() / fidelity.len() as f64;
    println!(
        "synthesized {} rows from {} real rows ({} epochs)",
        synthetic.len(),
        real.len(),
        config.gan_epochs
    );
    println!("mean histogram intersection over {FIDELITY_BINS} bins: {mean_fidelity:.3}");
    println!("wrote {}", data_path.display());
    println!("wrote {}", fidelity_path.display());
    Ok(())
}

fn write_summary(path: &std::path::Path, summary: &[gfl_core::data::ColumnSummary]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).runtime("creating the summary file")?;
    w.write_record(["column", "min", "max", "mean", "sd"])
        .runtime("writing summary")?;
    for column in summary {
        w.write_record([
            column.name.clone(),
            format!("{}", column.min),
            format!("{}", column.max),
            format!("{}", column.mean),
            format!("{}", column.sd),
        ])
        .runtime("writing summary")?;
    }
    w.flush().runtime("writing summary")?;
    Ok(())
}
