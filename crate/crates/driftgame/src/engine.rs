//! Game mechanics: configuration, state, admissibility, stepping, loss.
//!
//! A game runs for `T` rounds at integer times t = -T, ..., -1. Each round
//! the player puts a probability vector p over the N chips, the adversary
//! answers with per-chip steps z from the variant's move set subject to
//! p . z >= 0, and chips drift by z. At t = 0 the player pays the fraction
//! of chips at or below the loss boundary.
//!
//! Binary-step variants with a drift constraint are handled in shifted
//! coordinates: the raw game (steps in {-1,+1}, constraint p . z >= delta,
//! loss at s <= 0) is translated by delta per round, giving steps in
//! {-1-delta, 1-delta}, constraint p . z >= 0, and loss at s <= -delta*T.
//! The interval variants get the same treatment. Variants without a drift
//! constraint (delta = 0) instead place the loss boundary at -R.

use crate::rng::RunRng;
use crate::special::{PotentialSpec, SpecialError};
use std::fmt;
use std::str::FromStr;

/// Slack below which the weighted-step constraint counts as violated.
pub const SLACK_TOL: f64 = 1e-12;

/// Weight-sum deviation from 1 tolerated on the simplex.
pub const SIMPLEX_TOL: f64 = 1e-12;

/// The four game variants.
///
/// * `V1`: steps {-1-delta, 1-delta}, loss at s <= -delta*T
/// * `V2`: steps [-1-delta, 1-delta], loss at s <= -delta*T
/// * `V3`: steps {-1, +1}, loss at s <= -R
/// * `V4`: steps [-1, +1], loss at s <= -R
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    V1,
    V2,
    V3,
    V4,
}

impl Variant {
    /// Interval move sets (V2/V4) as opposed to two-point sets (V1/V3).
    pub fn interval_steps(self) -> bool {
        matches!(self, Variant::V2 | Variant::V4)
    }

    /// Variants whose drift rate comes from the constraint (V1/V2); the
    /// others put the drift into the loss boundary.
    pub fn constrained_drift(self) -> bool {
        matches!(self, Variant::V1 | Variant::V2)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Variant::V1 => "v1",
            Variant::V2 => "v2",
            Variant::V3 => "v3",
            Variant::V4 => "v4",
        };
        f.write_str(s)
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "v1" => Ok(Variant::V1),
            "v2" => Ok(Variant::V2),
            "v3" => Ok(Variant::V3),
            "v4" => Ok(Variant::V4),
            other => Err(format!("unknown variant '{other}' (expected v1|v2|v3|v4)")),
        }
    }
}

/// Per-chip step set of a variant, with exact endpoint values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MoveSet {
    Pair { down: f64, up: f64 },
    Interval { lo: f64, hi: f64 },
}

impl MoveSet {
    /// Membership; bit-exact comparison for the two-point sets.
    pub fn contains(&self, z: f64) -> bool {
        match *self {
            MoveSet::Pair { down, up } => z == down || z == up,
            MoveSet::Interval { lo, hi } => z >= lo && z <= hi,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum EngineError {
    HorizonZero,
    NoChips,
    BadGamma(f64),
    BadTheta(f64),
    /// gamma too large for the horizon: the drift rate would exceed 1.
    DriftTooLarge { delta: f64 },
    DimensionMismatch { expected: usize, got: usize },
    WeightNegative { index: usize, value: f64 },
    WeightsOffSimplex { sum: f64 },
    MoveOutsideSet { index: usize, value: f64 },
    ConstraintViolated { dot: f64 },
    GameFinished,
    GameUnfinished { time: i64 },
    AdversaryAbort { time: i64, redraws: u32 },
    Domain(SpecialError),
}

impl fmt::Display for EngineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EngineError::HorizonZero => write!(f, "horizon must be at least 1"),
            EngineError::NoChips => write!(f, "chip count must be at least 1"),
            EngineError::BadGamma(g) => write!(f, "gamma {g} is not a finite nonnegative real"),
            EngineError::BadTheta(t) => write!(f, "theta {t} is outside (0, 1)"),
            EngineError::DriftTooLarge { delta } => {
                write!(f, "drift rate delta = {delta} exceeds 1; lower gamma or raise T")
            }
            EngineError::DimensionMismatch { expected, got } => {
                write!(f, "expected {expected} entries, got {got}")
            }
            EngineError::WeightNegative { index, value } => {
                write!(f, "weight[{index}] = {value} is negative or NaN")
            }
            EngineError::WeightsOffSimplex { sum } => {
                write!(f, "weights sum to {sum}, not 1")
            }
            EngineError::MoveOutsideSet { index, value } => {
                write!(f, "move[{index}] = {value} lies outside the variant's step set")
            }
            EngineError::ConstraintViolated { dot } => {
                write!(f, "weighted step p.z = {dot} violates the drift constraint")
            }
            EngineError::GameFinished => write!(f, "game already at its final time"),
            EngineError::GameUnfinished { time } => {
                write!(f, "loss undefined before the final time (currently t = {time})")
            }
            EngineError::AdversaryAbort { time, redraws } => {
                write!(f, "adversary found no feasible step at t = {time} after {redraws} redraws")
            }
            EngineError::Domain(e) => write!(f, "potential domain error: {e}"),
        }
    }
}

impl std::error::Error for EngineError {}

impl From<SpecialError> for EngineError {
    fn from(e: SpecialError) -> Self {
        EngineError::Domain(e)
    }
}

/// Validated game description. The drift rate delta and the loss offset are
/// derived from (variant, gamma, T) at construction and fixed thereafter.
#[derive(Debug, Clone, PartialEq)]
pub struct GameConfig {
    variant: Variant,
    horizon: u32,
    n_chips: usize,
    gamma: f64,
    theta: f64,
    seed: u64,
    delta: f64,
    loss_offset: f64,
}

impl GameConfig {
    /// Scalings: V1/V2 take delta = sqrt(2 gamma / T) (must be <= 1), loss
    /// offset delta*T; V3/V4 take delta = 0, loss offset R = sqrt(2 gamma T).
    pub fn new(
        variant: Variant,
        horizon: u32,
        n_chips: usize,
        gamma: f64,
        theta: f64,
        seed: u64,
    ) -> Result<Self, EngineError> {
        if horizon == 0 {
            return Err(EngineError::HorizonZero);
        }
        if n_chips == 0 {
            return Err(EngineError::NoChips);
        }
        if !gamma.is_finite() || gamma < 0.0 {
            return Err(EngineError::BadGamma(gamma));
        }
        if !theta.is_finite() || theta <= 0.0 || theta >= 1.0 {
            return Err(EngineError::BadTheta(theta));
        }
        let t = horizon as f64;
        let (delta, loss_offset) = if variant.constrained_drift() {
            let delta = (2.0 * gamma / t).sqrt();
            if delta > 1.0 {
                return Err(EngineError::DriftTooLarge { delta });
            }
            (delta, delta * t)
        } else {
            (0.0, (2.0 * gamma * t).sqrt())
        };
        Ok(GameConfig { variant, horizon, n_chips, gamma, theta, seed, delta, loss_offset })
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn horizon(&self) -> u32 {
        self.horizon
    }

    pub fn n_chips(&self) -> usize {
        self.n_chips
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Chips at or below -loss_offset at the final time count as losses.
    pub fn loss_offset(&self) -> f64 {
        self.loss_offset
    }

    /// Spacing of the step lattice: 1 - delta for the drift-constrained
    /// variants, 1 otherwise.
    pub fn lattice_unit(&self) -> f64 {
        1.0 - self.delta
    }

    pub fn move_set(&self) -> MoveSet {
        match self.variant {
            Variant::V1 => MoveSet::Pair { down: -1.0 - self.delta, up: 1.0 - self.delta },
            Variant::V2 => MoveSet::Interval { lo: -1.0 - self.delta, hi: 1.0 - self.delta },
            Variant::V3 => MoveSet::Pair { down: -1.0, up: 1.0 },
            Variant::V4 => MoveSet::Interval { lo: -1.0, hi: 1.0 },
        }
    }
}

/// Chip positions at a game time in [-T, 0].
///
/// Alongside the floating positions the state counts signed lattice steps
/// per chip. While every move so far has been 0 or +-lattice_unit (bit
/// exact), `lattice_valid` holds and positions reconstruct exactly as
/// counter * unit; the first off-lattice move clears the flag.
#[derive(Debug, Clone, PartialEq)]
pub struct GameState {
    time: i64,
    positions: Vec<f64>,
    counters: Vec<i64>,
    lattice_valid: bool,
    unit: f64,
}

impl GameState {
    pub fn initial(config: &GameConfig) -> Self {
        GameState {
            time: -(config.horizon as i64),
            positions: vec![0.0; config.n_chips],
            counters: vec![0; config.n_chips],
            lattice_valid: true,
            unit: config.lattice_unit(),
        }
    }

    pub fn time(&self) -> i64 {
        self.time
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn counters(&self) -> &[i64] {
        &self.counters
    }

    pub fn lattice_valid(&self) -> bool {
        self.lattice_valid
    }

    /// Best available position of chip i: exact lattice reconstruction when
    /// valid, accumulated floating position otherwise.
    pub fn position(&self, i: usize) -> f64 {
        if self.lattice_valid {
            self.counters[i] as f64 * self.unit
        } else {
            self.positions[i]
        }
    }

    /// Test fixture: a mid-game state with prescribed float positions.
    #[cfg(test)]
    pub(crate) fn with_positions(config: &GameConfig, time: i64, positions: Vec<f64>) -> Self {
        GameState {
            time,
            counters: vec![0; positions.len()],
            lattice_valid: false,
            unit: config.lattice_unit(),
            positions,
        }
    }
}

/// Neumaier-compensated sum; the plain running sum can drift past the
/// simplex and slack tolerances once N reaches the 1e5 range.
pub(crate) fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for x in values {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

pub(crate) fn dot(w: &[f64], z: &[f64]) -> f64 {
    compensated_sum(w.iter().zip(z).map(|(a, b)| a * b))
}

fn check_dims(config: &GameConfig, v: &[f64]) -> Result<(), EngineError> {
    if v.len() != config.n_chips {
        return Err(EngineError::DimensionMismatch { expected: config.n_chips, got: v.len() });
    }
    Ok(())
}

fn validate_weights(config: &GameConfig, weights: &[f64]) -> Result<(), EngineError> {
    check_dims(config, weights)?;
    for (i, &w) in weights.iter().enumerate() {
        if w < 0.0 || !w.is_finite() {
            return Err(EngineError::WeightNegative { index: i, value: w });
        }
    }
    let sum = compensated_sum(weights.iter().copied());
    if (sum - 1.0).abs() > SIMPLEX_TOL {
        return Err(EngineError::WeightsOffSimplex { sum });
    }
    Ok(())
}

/// Whether the step vector is playable against the given weights: every
/// entry in the variant's move set and p . z >= -SLACK_TOL. Assumes the
/// weights already lie on the simplex; only dimensions are checked.
pub fn admissible(config: &GameConfig, weights: &[f64], moves: &[f64]) -> Result<bool, EngineError> {
    check_dims(config, weights)?;
    check_dims(config, moves)?;
    let set = config.move_set();
    if moves.iter().any(|&z| !set.contains(z)) {
        return Ok(false);
    }
    Ok(dot(weights, moves) >= -SLACK_TOL)
}

/// Advance the state by one round. Returns the constraint slack p . z.
pub fn step(
    config: &GameConfig,
    state: &mut GameState,
    weights: &[f64],
    moves: &[f64],
) -> Result<f64, EngineError> {
    if state.time >= 0 {
        return Err(EngineError::GameFinished);
    }
    check_dims(config, weights)?;
    check_dims(config, moves)?;
    let set = config.move_set();
    for (i, &z) in moves.iter().enumerate() {
        if !set.contains(z) {
            return Err(EngineError::MoveOutsideSet { index: i, value: z });
        }
    }
    let slack = dot(weights, moves);
    if slack < -SLACK_TOL {
        return Err(EngineError::ConstraintViolated { dot: slack });
    }
    let unit = state.unit;
    for (i, &z) in moves.iter().enumerate() {
        state.positions[i] += z;
        if state.lattice_valid {
            if z == unit {
                state.counters[i] += 1;
            } else if z == -unit {
                state.counters[i] -= 1;
            } else if z != 0.0 {
                state.lattice_valid = false;
            }
        }
    }
    state.time += 1;
    Ok(slack)
}

/// Per-chip loss indicators at the final time; the boundary is inclusive.
pub fn chip_losses(config: &GameConfig, state: &GameState) -> Result<Vec<bool>, EngineError> {
    if state.time != 0 {
        return Err(EngineError::GameUnfinished { time: state.time });
    }
    let boundary = -config.loss_offset;
    Ok((0..config.n_chips).map(|i| state.position(i) <= boundary).collect())
}

/// Mean loss over chips at the final time.
pub fn final_loss(config: &GameConfig, state: &GameState) -> Result<f64, EngineError> {
    let losses = chip_losses(config, state)?;
    let hits = losses.iter().filter(|&&l| l).count();
    Ok(hits as f64 / losses.len() as f64)
}

/// A player maps (config, state) to a weight vector on the simplex.
pub trait Player {
    fn weights(&self, config: &GameConfig, state: &GameState) -> Vec<f64>;
}

/// One adversary response.
#[derive(Debug, Clone)]
pub struct AdversaryMove {
    pub moves: Vec<f64>,
    /// Rejected draws before this one (0 for deterministic adversaries).
    pub redraws: u32,
    /// For sampling adversaries that track the lower potential: the
    /// expectation of the next potential increment under the raw draw.
    pub expected_lower_increment: Option<f64>,
}

/// Raised when a sampling adversary exhausts its redraw budget.
#[derive(Debug, Clone, Copy)]
pub struct AdversaryAbort {
    pub redraws: u32,
}

/// An adversary maps (config, state, weights) to a feasible step vector,
/// drawing randomness from the per-run stream.
pub trait Adversary {
    fn moves(
        &self,
        config: &GameConfig,
        state: &GameState,
        weights: &[f64],
        rng: &mut RunRng,
    ) -> Result<AdversaryMove, AdversaryAbort>;
}

/// What `play` should record beyond the loss summary.
#[derive(Debug, Clone, Default)]
pub struct PlayOptions {
    /// Keep full per-round weight and move vectors (memory scales with N*T).
    pub record_vectors: bool,
    /// Upper potential to trace per round.
    pub upper_potential: Option<PotentialSpec>,
    /// Lower potential to trace per round.
    pub lower_potential: Option<PotentialSpec>,
}

/// One recorded round.
#[derive(Debug, Clone)]
pub struct StepRecord {
    pub time: i64,
    pub slack: f64,
    pub redraws: u32,
    pub lambda_upper: Option<f64>,
    pub lambda_lower: Option<f64>,
    pub expected_lower_increment: Option<f64>,
}

/// Full record of one game.
#[derive(Debug, Clone)]
pub struct GameTrace {
    pub steps: Vec<StepRecord>,
    pub weights_log: Option<Vec<Vec<f64>>>,
    pub moves_log: Option<Vec<Vec<f64>>>,
    pub final_lambda_upper: Option<f64>,
    pub final_lambda_lower: Option<f64>,
    pub per_chip_loss: Vec<bool>,
    pub mean_loss: f64,
    pub min_slack: f64,
    pub total_redraws: u64,
    /// True when every move stayed on the counter lattice, so final
    /// positions are reconstructed exactly as counter * unit.
    pub lattice_valid: bool,
    /// When the lattice held: worst gap between the shadow float positions
    /// and the exact counter reconstruction.
    pub lattice_drift: Option<f64>,
}

impl GameTrace {
    /// Realized increments of the traced lower potential, one per round,
    /// if it was traced.
    pub fn lower_increments(&self) -> Option<Vec<f64>> {
        let final_value = self.final_lambda_lower?;
        let mut values = Vec::with_capacity(self.steps.len() + 1);
        for s in &self.steps {
            values.push(s.lambda_lower?);
        }
        values.push(final_value);
        Some(values.windows(2).map(|w| w[1] - w[0]).collect())
    }
}

fn mean_potential(
    spec: &PotentialSpec,
    state: &GameState,
    n: usize,
    t: f64,
) -> Result<f64, EngineError> {
    let mut acc = 0.0;
    for i in 0..n {
        acc += spec.eval(state.position(i), t)?;
    }
    Ok(acc / n as f64)
}

/// Run a full game. The rng stream should be the run's index when several
/// runs share one master seed.
pub fn play(
    config: &GameConfig,
    player: &dyn Player,
    adversary: &dyn Adversary,
    stream: u64,
    opts: &PlayOptions,
) -> Result<GameTrace, EngineError> {
    let mut rng = RunRng::new(config.seed, stream);
    let mut state = GameState::initial(config);
    let n = config.n_chips;
    let rounds = config.horizon as usize;
    let mut steps = Vec::with_capacity(rounds);
    let mut weights_log = opts.record_vectors.then(|| Vec::with_capacity(rounds));
    let mut moves_log = opts.record_vectors.then(|| Vec::with_capacity(rounds));
    let mut min_slack = f64::INFINITY;
    let mut total_redraws = 0u64;

    while state.time < 0 {
        let time = state.time;
        let weights = player.weights(config, &state);
        validate_weights(config, &weights)?;
        let lambda_upper = match &opts.upper_potential {
            Some(spec) => Some(mean_potential(spec, &state, n, time as f64)?),
            None => None,
        };
        let lambda_lower = match &opts.lower_potential {
            Some(spec) => Some(mean_potential(spec, &state, n, time as f64)?),
            None => None,
        };
        let response = adversary
            .moves(config, &state, &weights, &mut rng)
            .map_err(|abort| EngineError::AdversaryAbort { time, redraws: abort.redraws })?;
        let slack = step(config, &mut state, &weights, &response.moves)?;
        min_slack = min_slack.min(slack);
        total_redraws += response.redraws as u64;
        steps.push(StepRecord {
            time,
            slack,
            redraws: response.redraws,
            lambda_upper,
            lambda_lower,
            expected_lower_increment: response.expected_lower_increment,
        });
        if let Some(log) = weights_log.as_mut() {
            log.push(weights);
        }
        if let Some(log) = moves_log.as_mut() {
            log.push(response.moves);
        }
    }

    let final_lambda_upper = match &opts.upper_potential {
        Some(spec) => Some(mean_potential(spec, &state, n, 0.0)?),
        None => None,
    };
    let final_lambda_lower = match &opts.lower_potential {
        Some(spec) => Some(mean_potential(spec, &state, n, 0.0)?),
        None => None,
    };
    let per_chip_loss = chip_losses(config, &state)?;
    let mean_loss = per_chip_loss.iter().filter(|&&l| l).count() as f64 / n as f64;
    let lattice_valid = state.lattice_valid();
    let lattice_drift = lattice_valid.then(|| {
        let unit = config.lattice_unit();
        state
            .positions()
            .iter()
            .zip(state.counters())
            .map(|(&p, &c)| (p - c as f64 * unit).abs())
            .fold(0.0, f64::max)
    });

    Ok(GameTrace {
        steps,
        weights_log,
        moves_log,
        final_lambda_upper,
        final_lambda_lower,
        per_chip_loss,
        mean_loss,
        min_slack,
        total_redraws,
        lattice_valid,
        lattice_drift,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v3_config(horizon: u32, n: usize, gamma: f64) -> GameConfig {
        GameConfig::new(Variant::V3, horizon, n, gamma, 0.5, 1).unwrap()
    }

    #[test]
    fn config_scalings() {
        // delta = sqrt(2*1/32) = 1/4 exactly
        let c = GameConfig::new(Variant::V1, 32, 2, 1.0, 0.5, 0).unwrap();
        assert_eq!(c.delta(), 0.25);
        assert_eq!(c.loss_offset(), 8.0);
        assert_eq!(c.lattice_unit(), 0.75);
        assert_eq!(c.move_set(), MoveSet::Pair { down: -1.25, up: 0.75 });

        // R = sqrt(2*0.25*2) = 1 exactly
        let c = v3_config(2, 2, 0.25);
        assert_eq!(c.delta(), 0.0);
        assert_eq!(c.loss_offset(), 1.0);
        assert_eq!(c.move_set(), MoveSet::Pair { down: -1.0, up: 1.0 });
    }

    #[test]
    fn config_rejects_bad_parameters() {
        assert_eq!(
            GameConfig::new(Variant::V1, 0, 1, 0.0, 0.5, 0).unwrap_err(),
            EngineError::HorizonZero
        );
        assert_eq!(
            GameConfig::new(Variant::V1, 4, 0, 0.0, 0.5, 0).unwrap_err(),
            EngineError::NoChips
        );
        assert!(matches!(
            GameConfig::new(Variant::V1, 4, 1, -1.0, 0.5, 0).unwrap_err(),
            EngineError::BadGamma(_)
        ));
        assert!(matches!(
            GameConfig::new(Variant::V1, 4, 1, 0.0, 1.0, 0).unwrap_err(),
            EngineError::BadTheta(_)
        ));
        // gamma = 2, T = 2 gives delta = sqrt(2) > 1
        assert!(matches!(
            GameConfig::new(Variant::V2, 2, 1, 2.0, 0.5, 0).unwrap_err(),
            EngineError::DriftTooLarge { .. }
        ));
        // same gamma is fine for the unconstrained variants
        assert!(GameConfig::new(Variant::V4, 2, 1, 2.0, 0.5, 0).is_ok());
    }

    #[test]
    fn admissible_examples() {
        let c = v3_config(4, 2, 0.0);
        assert!(admissible(&c, &[0.5, 0.5], &[1.0, -1.0]).unwrap());
        assert!(!admissible(&c, &[0.5, 0.5], &[1.0, 0.5]).unwrap());
        assert!(!admissible(&c, &[0.25, 0.75], &[1.0, -1.0]).unwrap());

        let c1 = GameConfig::new(Variant::V1, 200, 1, 1.0, 0.5, 0).unwrap();
        let MoveSet::Pair { down, up } = c1.move_set() else { unreachable!() };
        assert!(admissible(&c1, &[1.0], &[up]).unwrap());
        assert!(!admissible(&c1, &[1.0], &[down]).unwrap());
        assert!(matches!(
            admissible(&c1, &[0.5, 0.5], &[up]),
            Err(EngineError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn step_and_loss() {
        let c = v3_config(1, 2, 0.5); // R = 1
        let mut s = GameState::initial(&c);
        assert_eq!(s.time(), -1);
        let slack = step(&c, &mut s, &[0.5, 0.5], &[-1.0, 1.0]).unwrap();
        assert_eq!(slack, 0.0);
        assert_eq!(s.positions(), &[-1.0, 1.0]);
        assert_eq!(s.counters(), &[-1, 1]);
        assert!(s.lattice_valid());
        assert_eq!(final_loss(&c, &s).unwrap(), 0.5);
        assert_eq!(step(&c, &mut s, &[0.5, 0.5], &[1.0, 1.0]).unwrap_err(), EngineError::GameFinished);
    }

    #[test]
    fn loss_boundary_is_inclusive() {
        // gamma = 0 puts the boundary at the origin; bring both chips back
        let c = v3_config(2, 2, 0.0);
        let mut s = GameState::initial(&c);
        step(&c, &mut s, &[0.5, 0.5], &[1.0, -1.0]).unwrap();
        step(&c, &mut s, &[0.5, 0.5], &[-1.0, 1.0]).unwrap();
        assert_eq!(final_loss(&c, &s).unwrap(), 1.0);
    }

    #[test]
    fn loss_requires_final_time() {
        let c = v3_config(2, 1, 0.0);
        let s = GameState::initial(&c);
        assert_eq!(final_loss(&c, &s).unwrap_err(), EngineError::GameUnfinished { time: -2 });
    }

    #[test]
    fn step_rejects_bad_moves() {
        let c = v3_config(2, 2, 0.0);
        let mut s = GameState::initial(&c);
        assert_eq!(
            step(&c, &mut s, &[0.5, 0.5], &[0.5, 1.0]).unwrap_err(),
            EngineError::MoveOutsideSet { index: 0, value: 0.5 }
        );
        assert_eq!(
            step(&c, &mut s, &[0.5, 0.5], &[-1.0, -1.0]).unwrap_err(),
            EngineError::ConstraintViolated { dot: -1.0 }
        );
        assert_eq!(s.time(), -2, "failed steps must not advance the state");
    }

    #[test]
    fn lattice_tracking() {
        // V2 with delta = 1/4: unit 0.75, interval [-1.25, 0.75]
        let c = GameConfig::new(Variant::V2, 32, 2, 1.0, 0.5, 0).unwrap();
        let u = c.lattice_unit();
        let mut s = GameState::initial(&c);
        step(&c, &mut s, &[0.5, 0.5], &[u, 0.0]).unwrap();
        step(&c, &mut s, &[0.5, 0.5], &[u, -u]).unwrap();
        assert!(s.lattice_valid());
        assert_eq!(s.counters(), &[2, -1]);
        assert_eq!(s.position(0), 1.5);
        assert_eq!(s.position(1), -0.75);
        // an off-lattice interior move drops the exact tracking
        step(&c, &mut s, &[0.5, 0.5], &[0.3, 0.0]).unwrap();
        assert!(!s.lattice_valid());
        assert!((s.position(0) - 1.8).abs() < 1e-15);
    }

    #[test]
    fn v1_down_moves_leave_the_lattice() {
        // with delta > 0 the down move -1-delta is not a multiple of the
        // unit 1-delta, so taking it ends exact tracking
        let c = GameConfig::new(Variant::V1, 32, 2, 1.0, 0.5, 0).unwrap();
        let MoveSet::Pair { down, up } = c.move_set() else { unreachable!() };
        let mut s = GameState::initial(&c);
        step(&c, &mut s, &[1.0, 0.0], &[up, up]).unwrap();
        assert!(s.lattice_valid());
        step(&c, &mut s, &[1.0, 0.0], &[up, down]).unwrap();
        assert!(!s.lattice_valid());
        assert_eq!(s.position(0), 1.5);
        assert_eq!(s.position(1), up + down);
    }

    struct FixedPlayer;

    impl Player for FixedPlayer {
        fn weights(&self, config: &GameConfig, _state: &GameState) -> Vec<f64> {
            vec![1.0 / config.n_chips() as f64; config.n_chips()]
        }
    }

    struct UpDownAdversary;

    impl Adversary for UpDownAdversary {
        fn moves(
            &self,
            config: &GameConfig,
            state: &GameState,
            _weights: &[f64],
            _rng: &mut RunRng,
        ) -> Result<AdversaryMove, AdversaryAbort> {
            let n = config.n_chips();
            let flip = state.time() % 2 == 0;
            let moves = (0..n)
                .map(|i| if (i % 2 == 0) ^ flip { 1.0 } else { -1.0 })
                .collect();
            Ok(AdversaryMove { moves, redraws: 0, expected_lower_increment: None })
        }
    }

    struct StuckAdversary;

    impl Adversary for StuckAdversary {
        fn moves(
            &self,
            _config: &GameConfig,
            _state: &GameState,
            _weights: &[f64],
            _rng: &mut RunRng,
        ) -> Result<AdversaryMove, AdversaryAbort> {
            Err(AdversaryAbort { redraws: 64 })
        }
    }

    #[test]
    fn play_surfaces_adversary_aborts() {
        let c = v3_config(4, 2, 0.0);
        let err = play(&c, &FixedPlayer, &StuckAdversary, 0, &PlayOptions::default()).unwrap_err();
        assert_eq!(err, EngineError::AdversaryAbort { time: -4, redraws: 64 });
    }

    #[test]
    fn play_records_a_full_trace() {
        let c = v3_config(4, 2, 0.0);
        let opts = PlayOptions { record_vectors: true, ..Default::default() };
        let trace = play(&c, &FixedPlayer, &UpDownAdversary, 0, &opts).unwrap();
        assert_eq!(trace.steps.len(), 4);
        assert_eq!(trace.weights_log.as_ref().unwrap().len(), 4);
        assert_eq!(trace.per_chip_loss.len(), 2);
        assert!(trace.min_slack >= -SLACK_TOL);
        assert_eq!(trace.steps[0].time, -4);
        assert_eq!(trace.steps[3].time, -1);
        assert!((0.0..=1.0).contains(&trace.mean_loss));
    }
}
