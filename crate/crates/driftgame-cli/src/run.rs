//! One full game run: strategy construction, play-out, bound reports, and
//! the per-run audit used by the harness and its tests.

use std::fmt;
use std::str::FromStr;

use driftgame::bounds::{lambda_spec, n_requirement, theorem_bounds, BoundReport, Side};
use driftgame::engine::{play, Adversary, EngineError, GameConfig, PlayOptions, Player, Variant};
use driftgame::strategies::{
    CombinatorialDrift, GreedyDescent, PotentialPlayer, RandomFeasibleDrift, RandomizedDrift,
    UniformPlayer,
};

use crate::CliError;

/// Run count cap when the theorem requirement is used as a default.
pub const CHIP_CAP: u128 = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlayerKind {
    Potential,
    Uniform,
}

impl FromStr for PlayerKind {
    type Err = CliError;

    fn from_str(raw: &str) -> Result<Self, CliError> {
        match raw {
            "potential" => Ok(PlayerKind::Potential),
            "uniform" => Ok(PlayerKind::Uniform),
            _ => Err(CliError::Config(format!("unknown player {raw}"))),
        }
    }
}

impl fmt::Display for PlayerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PlayerKind::Potential => "potential",
            PlayerKind::Uniform => "uniform",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdversaryKind {
    Randomized,
    Combinatorial,
    Greedy,
    RandomFeasible,
}

impl FromStr for AdversaryKind {
    type Err = CliError;

    fn from_str(raw: &str) -> Result<Self, CliError> {
        match raw {
            "randomized" => Ok(AdversaryKind::Randomized),
            "combinatorial" => Ok(AdversaryKind::Combinatorial),
            "greedy" => Ok(AdversaryKind::Greedy),
            "randomFeasible" => Ok(AdversaryKind::RandomFeasible),
            _ => Err(CliError::Config(format!("unknown adversary {raw}"))),
        }
    }
}

impl fmt::Display for AdversaryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AdversaryKind::Randomized => "randomized",
            AdversaryKind::Combinatorial => "combinatorial",
            AdversaryKind::Greedy => "greedy",
            AdversaryKind::RandomFeasible => "randomFeasible",
        })
    }
}

/// Everything one game needs; sweep cells clone this with their own
/// horizon, gamma and chip count.
#[derive(Debug, Clone)]
pub struct RunSpec {
    pub variant: Variant,
    pub horizon: u32,
    pub n_chips: usize,
    pub gamma: f64,
    pub theta: f64,
    pub seed: u64,
    pub player: PlayerKind,
    pub adversary: AdversaryKind,
}

/// Summary of one completed game.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub loss: f64,
    pub min_slack: f64,
    pub retries: u64,
    pub upper: BoundReport,
    pub lower: BoundReport,
    /// For the sampling adversary: fraction of rounds whose expected
    /// lower-potential increment was nonnegative (reported, not asserted).
    pub increment_fraction: Option<f64>,
    pub lattice_valid: bool,
    pub lattice_drift: Option<f64>,
    /// Traced mean upper potential at the start and end of the game.
    pub lambda_upper: Option<(f64, f64)>,
    pub lambda_lower: Option<(f64, f64)>,
}

/// Default chip count: the theorem requirement, capped to keep runs
/// tractable. Returns the count and whether the cap was hit.
pub fn default_chips(variant: Variant, horizon: u32, theta: f64) -> (usize, bool) {
    let need = n_requirement(variant, horizon, theta);
    if need > CHIP_CAP {
        (CHIP_CAP as usize, true)
    } else {
        (need as usize, false)
    }
}

/// Whether this pairing of variant and adversary only ever emits counter
/// lattice moves, making exact position reconstruction mandatory.
pub fn expects_lattice(variant: Variant, adversary: AdversaryKind) -> bool {
    match variant {
        // The down move -1-delta is off the 1-delta lattice by design.
        Variant::V1 => false,
        Variant::V2 => adversary == AdversaryKind::Combinatorial,
        Variant::V3 => true,
        Variant::V4 => adversary != AdversaryKind::RandomFeasible,
    }
}

pub fn run_single(
    spec: &RunSpec,
    stream: u64,
    trace_potentials: bool,
) -> Result<RunRecord, CliError> {
    let config = GameConfig::new(
        spec.variant,
        spec.horizon,
        spec.n_chips,
        spec.gamma,
        spec.theta,
        spec.seed,
    )
    .map_err(|e| CliError::Config(format!("invalid game: {e}")))?;
    let upper = theorem_bounds(&config, Side::Upper);
    let lower = theorem_bounds(&config, Side::Lower);

    let mut opts = PlayOptions::default();
    if trace_potentials {
        opts.upper_potential = Some(
            lambda_spec(&config, Side::Upper)
                .map_err(|e| CliError::Failure(format!("upper potential: {e}")))?,
        );
        opts.lower_potential = Some(
            lambda_spec(&config, Side::Lower)
                .map_err(|e| CliError::Failure(format!("lower potential: {e}")))?,
        );
    }

    let player: Box<dyn Player> = match spec.player {
        PlayerKind::Potential => Box::new(PotentialPlayer::for_config(&config)),
        PlayerKind::Uniform => Box::new(UniformPlayer),
    };
    let adversary: Box<dyn Adversary> = match spec.adversary {
        AdversaryKind::Randomized => Box::new(
            RandomizedDrift::for_config(&config)
                .map_err(|e| CliError::Config(format!("randomized adversary: {e}")))?,
        ),
        AdversaryKind::Combinatorial => Box::new(
            CombinatorialDrift::for_config(&config)
                .map_err(|e| CliError::Config(format!("combinatorial adversary: {e}")))?,
        ),
        AdversaryKind::Greedy => Box::new(GreedyDescent),
        AdversaryKind::RandomFeasible => Box::new(RandomFeasibleDrift),
    };

    let trace = play(&config, player.as_ref(), adversary.as_ref(), stream, &opts).map_err(
        |e| match e {
            EngineError::AdversaryAbort { time, redraws } => CliError::Abort(format!(
                "adversary found no feasible step at t = {time} after {redraws} draws"
            )),
            other => CliError::Failure(format!("engine rejected the run: {other}")),
        },
    )?;

    let increment_fraction = (spec.adversary == AdversaryKind::Randomized).then(|| {
        let held = trace
            .steps
            .iter()
            .filter(|s| s.expected_lower_increment.is_some_and(|v| v >= -1e-12))
            .count();
        held as f64 / trace.steps.len().max(1) as f64
    });
    let lambda_upper = trace
        .steps
        .first()
        .and_then(|s| s.lambda_upper)
        .zip(trace.final_lambda_upper);
    let lambda_lower = trace
        .steps
        .first()
        .and_then(|s| s.lambda_lower)
        .zip(trace.final_lambda_lower);

    Ok(RunRecord {
        loss: trace.mean_loss,
        min_slack: trace.min_slack,
        retries: trace.total_redraws,
        upper,
        lower,
        increment_fraction,
        lattice_valid: trace.lattice_valid,
        lattice_drift: trace.lattice_drift,
        lambda_upper,
        lambda_lower,
    })
}

/// Feasibility audit every run must satisfy: no slack beyond the engine
/// tolerance, and exact counter reconstruction whenever the strategy pair
/// guarantees lattice moves.
pub fn audit_record(spec: &RunSpec, record: &RunRecord) -> Result<(), CliError> {
    if record.min_slack < -1e-12 {
        return Err(CliError::Failure(format!(
            "slack {:.3e} beyond tolerance",
            record.min_slack
        )));
    }
    if expects_lattice(spec.variant, spec.adversary) && !record.lattice_valid {
        return Err(CliError::Failure(
            "moves left the counter lattice unexpectedly".into(),
        ));
    }
    if let Some(drift) = record.lattice_drift {
        if drift > 1e-9 {
            return Err(CliError::Failure(format!(
                "float positions drifted {drift:.3e} from the counter reconstruction"
            )));
        }
    }
    Ok(())
}
