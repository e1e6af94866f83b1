use std::path::PathBuf;

use clap::Parser;
use viscap_cli::{run, Command};

/// Scattering resonances of 1-D Schrödinger operators by complex absorbing
/// potentials, checked against Birman-Schwinger determinants.
#[derive(Parser)]
#[command(name = "viscap", version)]
struct Args {
    command: Command,
    /// JSON run configuration; omitted fields take their defaults.
    #[arg(long)]
    config: PathBuf,
    /// Artifact directory (default: `output_dir` from the config, else `.`).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() {
    let a = Args::parse();
    std::process::exit(run(a.command, &a.config, a.out.as_deref()));
}
