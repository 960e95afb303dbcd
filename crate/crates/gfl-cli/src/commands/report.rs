//! `gfl report`: re-rate a recorded time ledger into energy under the
//! current power draws, without re-running anything.

use std::path::PathBuf;

use gfl_runtime::{energy_cfl, energy_dfl};

use crate::artifacts::{self, RunDirs};
use crate::config::RunConfig;
use crate::error::{classify_run, Result};

/// Which protocol produced the ledger. It decides where exchange time is
/// spent: against the server in centralized runs, between edge nodes in
/// decentralized ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ProtocolKind {
    Cfl,
    Dfl,
}

#[derive(Debug, clap::Args)]
pub struct ReportArgs {
    /// Ledger CSV from a previous run's logs directory.
    #[arg(long)]
    pub ledger: PathBuf,
    /// Protocol that produced the ledger.
    #[arg(long, value_enum)]
    pub protocol: ProtocolKind,
}

pub fn run(config: RunConfig, args: &ReportArgs, dirs: &RunDirs) -> Result<()> {
    let ledger = artifacts::read_ledger(&args.ledger)?;
    let rates = config.power_rates()?;
    let energy = match args.protocol {
        ProtocolKind::Cfl => energy_cfl(&ledger, &rates),
        ProtocolKind::Dfl => energy_dfl(&ledger, &rates),
    }
    .map_err(|e| classify_run(e, "rating the ledger"))?;
    let t_fl = ledger.total_fl_secs();

    println!("t_fl: {t_fl} s");
    println!(
        "at {} W edge / {} W cloud: edge {} J, cloud {} J, total {} J",
        rates.edge_watts,
        rates.cloud_watts,
        energy.edge_joules,
        energy.cloud_joules,
        energy.total_joules
    );
    let path = dirs.reports.join("energy.csv");
    artifacts::write_energy(&path, &energy, &rates, t_fl)?;
    println!("wrote {}", path.display());
    Ok(())
}
