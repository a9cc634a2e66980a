//! Command line surface. Every subcommand takes the same flag set; values
//! are kept as raw strings here and validated during [`crate::settings`]
//! merging so that flag and config-file handling share one code path.

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "driftgame-cli", version, about = "Drifting-game simulation harness")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Play one game and emit its CSV row.
    Simulate(CommonArgs),
    /// Print the matching upper and lower bound reports.
    Bounds(CommonArgs),
    /// Run a grid of games over horizons and gammas, then judge convergence.
    Sweep(CommonArgs),
    /// Certify a tiny-instance minimax value by exhaustive induction.
    Oracle(CommonArgs),
    /// Run the named invariant suites.
    Check(CommonArgs),
}

#[derive(Debug, Default, Args)]
pub struct CommonArgs {
    /// Game variant: v1, v2, v3 or v4.
    #[arg(long)]
    pub variant: Option<String>,
    /// Horizon; sweep accepts a comma-separated increasing list.
    #[arg(long = "T")]
    pub horizon: Option<String>,
    /// Chip count; defaults to the theorem requirement, capped at 100000.
    #[arg(long = "N")]
    pub n_chips: Option<String>,
    /// Payoff scale; sweep accepts a comma-separated list.
    #[arg(long)]
    pub gamma: Option<String>,
    /// Shift exponent in (0, 1).
    #[arg(long)]
    pub theta: Option<String>,
    /// Master RNG seed.
    #[arg(long)]
    pub seed: Option<String>,
    /// Player: potential or uniform.
    #[arg(long)]
    pub player: Option<String>,
    /// Adversary: randomized, combinatorial, greedy or randomFeasible.
    #[arg(long)]
    pub adversary: Option<String>,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    pub out: Option<String>,
    /// Flat key = value config file; explicit flags win.
    #[arg(long)]
    pub config: Option<String>,
    /// Repetitions per sweep cell.
    #[arg(long)]
    pub reps: Option<String>,
    /// Worker threads for sweep (0 = all cores). Results never depend on it.
    #[arg(long)]
    pub jobs: Option<String>,
}
