use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "qent", version, about = "Entanglement of three-qubit UPB bound-entangled states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Shifts,
    Genshifts,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CertifyTarget {
    Shifts,
    Genshifts,
    /// The maximally mixed state; state-level checks only.
    MaximallyMixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MeasureArg {
    Eg,
    Ec,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SingleMeasure {
    Eg,
    Ec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, clap::Args)]
pub struct Search {
    #[arg(long, default_value_t = 64)]
    pub restarts: usize,
    /// Master seed; QENT_SEED overrides it when set.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Entanglement of ρ_Q with a minimally-entangled basis certificate.
    Measures {
        #[arg(long, value_enum, default_value_t = FamilyArg::Shifts)]
        family: FamilyArg,
        /// |⟨0|φ⟩|² of the GenShifts parameter.
        #[arg(long, default_value_t = 0.5)]
        overlap: f64,
        #[arg(long, value_enum, default_value_t = MeasureArg::Both)]
        measure: MeasureArg,
        #[command(flatten)]
        search: Search,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Both measures across the GenShifts family as CSV.
    Sweep {
        #[arg(long, default_value_t = 101)]
        points: usize,
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = [SingleMeasure::Eg, SingleMeasure::Ec])]
        measures: Vec<SingleMeasure>,
        #[command(flatten)]
        search: Search,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The closed-form minimally-entangled bases of the Shifts complement.
    Basis {
        #[arg(long, value_enum)]
        measure: SingleMeasure,
    },
    /// Unextendibility, PPT, permutation symmetry and biseparable basis checks.
    Certify {
        #[arg(long, value_enum, default_value_t = CertifyTarget::Shifts)]
        family: CertifyTarget,
        #[arg(long, default_value_t = 0.5)]
        overlap: f64,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[command(flatten)]
        search: Search,
        #[arg(long, default_value_t = 721)]
        theta_points: usize,
        #[arg(long, default_value_t = 1441)]
        phi_points: usize,
    },
}
