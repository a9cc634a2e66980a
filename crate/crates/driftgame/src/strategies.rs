//! Potential-based player and the adversaries played against it.
//!
//! The player weighs chips by the slope of the upper potential one step
//! ahead, so whatever feasible steps the adversary picks, the mean upper
//! potential cannot increase. The adversaries come in four flavors:
//!
//! * `RandomizedDrift`: i.i.d. biased coin steps with mean drift alpha,
//!   redrawn until feasible. Drives the two-point lower bounds when the
//!   chip count is large.
//! * `CombinatorialDrift`: deterministic pairing of chips into up/down
//!   halves balanced by lower-potential slope, freezing chips once they
//!   pass the shifted boundary. Drives the interval lower bounds.
//! * `RandomFeasibleDrift`: uniform steps redrawn until feasible; a null
//!   opponent for sanity runs.
//! * `GreedyDescent`: sends everything down, then lifts the heaviest chips
//!   just far enough to restore feasibility.

use crate::bounds::{shift_params, Side};
use crate::engine::{
    compensated_sum, dot, Adversary, AdversaryAbort, AdversaryMove, GameConfig, GameState,
    MoveSet, Player, Variant,
};
use crate::rng::RunRng;
use crate::special::{g_derivatives, g_eval, g_tilde_eval, SpaceTimePoint};
use std::fmt;

/// Total feasibility attempts a sampling adversary makes per round.
pub const REDRAW_BUDGET: u32 = 64;

#[derive(Debug, Clone, PartialEq)]
pub enum StrategyError {
    /// Partition input must be nonnegative and finite.
    PartitionValueInvalid { index: usize, value: f64 },
    /// The randomized drift alpha must lie strictly inside (0, 1 - delta).
    StepBiasOutOfRange { alpha: f64, limit: f64 },
    /// No deterministic pairing adversary exists for this variant.
    UnsupportedVariant(Variant),
}

impl fmt::Display for StrategyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StrategyError::PartitionValueInvalid { index, value } => {
                write!(f, "partition value[{index}] = {value} is negative or NaN")
            }
            StrategyError::StepBiasOutOfRange { alpha, limit } => {
                write!(f, "step bias alpha = {alpha} lies outside (0, {limit})")
            }
            StrategyError::UnsupportedVariant(v) => {
                write!(
                    f,
                    "no pairing adversary for {v}: flipping a balanced partition restores \
                     a nonnegative weighted step but not the raw drift constraint when the \
                     step set is asymmetric"
                )
            }
        }
    }
}

impl std::error::Error for StrategyError {}

fn uniform_weights(n: usize) -> Vec<f64> {
    vec![1.0 / n as f64; n]
}

/// Absorb the normalization residual into the largest entry so the sum is
/// exact to one rounding, independent of length.
fn pin_simplex(weights: &mut [f64]) {
    let residual = 1.0 - compensated_sum(weights.iter().copied());
    if residual == 0.0 {
        return;
    }
    let mut imax = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w > weights[imax] {
            imax = i;
        }
    }
    weights[imax] += residual;
}

fn endpoints(config: &GameConfig) -> (f64, f64) {
    match config.move_set() {
        MoveSet::Pair { down, up } => (down, up),
        MoveSet::Interval { lo, hi } => (lo, hi),
    }
}

/// Split nonnegative values into +/- groups whose sums differ by at most
/// the largest value: sort descending, then greedily assign each value to
/// the lighter side (ties go to +). Returns per-index signs.
pub fn balanced_partition(values: &[f64]) -> Result<Vec<i8>, StrategyError> {
    for (index, &value) in values.iter().enumerate() {
        if !value.is_finite() || value < 0.0 {
            return Err(StrategyError::PartitionValueInvalid { index, value });
        }
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]).then(i.cmp(&j)));
    let mut signs = vec![0i8; values.len()];
    let (mut plus, mut minus) = (0.0f64, 0.0f64);
    for idx in order {
        if plus <= minus {
            signs[idx] = 1;
            plus += values[idx];
        } else {
            signs[idx] = -1;
            minus += values[idx];
        }
    }
    Ok(signs)
}

/// Weights proportional to the upper potential's downhill slope one round
/// ahead.
///
/// For the two-point variants every chip carries mass -g'(s + Theta - beta,
/// t + 1 - tau) > 0. For the interval variants (beta = 0) chips at or past
/// the boundary (s + Theta <= 0) get exactly zero, which also keeps the
/// evaluation away from the truncated potential's kink; the rest carry
/// -2 g'. If the whole mass underflows, the player falls back to uniform
/// over the chips that should have carried it (or over everything).
#[derive(Debug, Clone)]
pub struct PotentialPlayer {
    beta: f64,
    tau: f64,
    underflow_floor: f64,
}

impl PotentialPlayer {
    pub fn for_config(config: &GameConfig) -> Self {
        let p = shift_params(config, Side::Upper);
        PotentialPlayer { beta: p.beta, tau: p.tau, underflow_floor: 1e-300 }
    }
}

impl Player for PotentialPlayer {
    fn weights(&self, config: &GameConfig, state: &GameState) -> Vec<f64> {
        let n = config.n_chips();
        let t_eval = state.time() as f64 + 1.0 - self.tau;
        let interval = config.variant().interval_steps();
        let mut mags = vec![0.0; n];
        let mut active = vec![false; n];
        for i in 0..n {
            let x = state.position(i) + config.loss_offset()
                - if interval { 0.0 } else { self.beta };
            if interval && x <= 0.0 {
                continue;
            }
            active[i] = true;
            let Ok(p) = SpaceTimePoint::new(x, t_eval) else {
                return uniform_weights(n);
            };
            let slope = g_derivatives(p).d1;
            mags[i] = if interval { -2.0 * slope } else { -slope };
        }
        let total = compensated_sum(mags.iter().copied());
        // NaN must take the fallback branch too, hence the explicit test.
        if total.is_nan() || total <= self.underflow_floor {
            let k = active.iter().filter(|&&a| a).count();
            if k == 0 {
                return uniform_weights(n);
            }
            let share = 1.0 / k as f64;
            return active.iter().map(|&a| if a { share } else { 0.0 }).collect();
        }
        for m in mags.iter_mut() {
            *m /= total;
        }
        pin_simplex(&mut mags);
        mags
    }
}

/// Equal weight on every chip.
#[derive(Debug, Clone)]
pub struct UniformPlayer;

impl Player for UniformPlayer {
    fn weights(&self, config: &GameConfig, _state: &GameState) -> Vec<f64> {
        uniform_weights(config.n_chips())
    }
}

/// Value of the variant's base potential (g or its truncation) at an
/// already-shifted point; None only on domain errors, which cannot occur
/// mid-game.
fn base_value(config: &GameConfig, s: f64, t: f64) -> Option<f64> {
    let p = SpaceTimePoint::new(s, t).ok()?;
    Some(if config.variant().interval_steps() { g_tilde_eval(p) } else { g_eval(p) })
}

/// I.i.d. biased steps: each chip moves up with probability
/// (1 + delta + alpha)/2, giving every chip mean drift alpha; the whole
/// vector is redrawn until the weighted step is nonnegative.
#[derive(Debug, Clone)]
pub struct RandomizedDrift {
    alpha: f64,
    beta: f64,
    tau: f64,
}

impl RandomizedDrift {
    /// alpha = T^(-1 - theta/4); it must stay below 1 - delta for the up
    /// probability to be a probability.
    pub fn for_config(config: &GameConfig) -> Result<Self, StrategyError> {
        let t = config.horizon() as f64;
        let alpha = t.powf(-1.0 - config.theta() / 4.0);
        let limit = 1.0 - config.delta();
        if !(alpha > 0.0 && alpha < limit) {
            return Err(StrategyError::StepBiasOutOfRange { alpha, limit });
        }
        let p = shift_params(config, Side::Lower);
        Ok(RandomizedDrift { alpha, beta: p.beta, tau: p.tau })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    fn up_probability(&self, config: &GameConfig) -> f64 {
        (1.0 + config.delta() + self.alpha) / 2.0
    }

    fn raw_draw(&self, config: &GameConfig, rng: &mut RunRng) -> Vec<f64> {
        let (down, up) = endpoints(config);
        let q = self.up_probability(config);
        (0..config.n_chips()).map(|_| if rng.uniform() < q { up } else { down }).collect()
    }

    /// Mean increment of the traced lower potential under one raw
    /// (unconditioned) draw from the current state; the potential's
    /// vertical offset cancels in the difference.
    fn expected_increment(&self, config: &GameConfig, state: &GameState) -> Option<f64> {
        let (down, up) = endpoints(config);
        let q = self.up_probability(config);
        let shift = config.loss_offset() + self.beta;
        let t_now = state.time() as f64 - self.tau;
        let t_next = state.time() as f64 + 1.0 - self.tau;
        let mut acc = 0.0;
        for i in 0..config.n_chips() {
            let s = state.position(i) + shift;
            let before = base_value(config, s, t_now)?;
            let after_up = base_value(config, s + up, t_next)?;
            let after_down = base_value(config, s + down, t_next)?;
            acc += q * after_up + (1.0 - q) * after_down - before;
        }
        Some(acc / config.n_chips() as f64)
    }
}

impl Adversary for RandomizedDrift {
    fn moves(
        &self,
        config: &GameConfig,
        state: &GameState,
        weights: &[f64],
        rng: &mut RunRng,
    ) -> Result<AdversaryMove, AdversaryAbort> {
        let expected_lower_increment = self.expected_increment(config, state);
        for attempt in 0..REDRAW_BUDGET {
            let draw = self.raw_draw(config, rng);
            if dot(weights, &draw) >= 0.0 {
                return Ok(AdversaryMove {
                    moves: draw,
                    redraws: attempt,
                    expected_lower_increment,
                });
            }
        }
        Err(AdversaryAbort { redraws: REDRAW_BUDGET })
    }
}

/// Uniform feasible steps: each chip's move is drawn uniformly from the
/// move set and the vector is redrawn until feasible.
#[derive(Debug, Clone)]
pub struct RandomFeasibleDrift;

impl Adversary for RandomFeasibleDrift {
    fn moves(
        &self,
        config: &GameConfig,
        _state: &GameState,
        weights: &[f64],
        rng: &mut RunRng,
    ) -> Result<AdversaryMove, AdversaryAbort> {
        let n = config.n_chips();
        for attempt in 0..REDRAW_BUDGET {
            let draw: Vec<f64> = match config.move_set() {
                MoveSet::Pair { down, up } => {
                    (0..n).map(|_| if rng.uniform() < 0.5 { down } else { up }).collect()
                }
                MoveSet::Interval { lo, hi } => (0..n).map(|_| rng.uniform_in(lo, hi)).collect(),
            };
            if dot(weights, &draw) >= 0.0 {
                return Ok(AdversaryMove { moves: draw, redraws: attempt, expected_lower_increment: None });
            }
        }
        Err(AdversaryAbort { redraws: REDRAW_BUDGET })
    }
}

/// All chips down, then lift whole chips in decreasing weight order until
/// the weighted step is nonnegative. Always feasible: with everything up
/// the weighted step is the top endpoint, which is nonnegative.
#[derive(Debug, Clone)]
pub struct GreedyDescent;

impl Adversary for GreedyDescent {
    fn moves(
        &self,
        config: &GameConfig,
        _state: &GameState,
        weights: &[f64],
        _rng: &mut RunRng,
    ) -> Result<AdversaryMove, AdversaryAbort> {
        let (down, up) = endpoints(config);
        let n = config.n_chips();
        let mut z = vec![down; n];
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| weights[j].total_cmp(&weights[i]).then(i.cmp(&j)));
        // track the weighted step incrementally; re-verify with the
        // compensated dot before stopping, since the running estimate can
        // sit a few ulps above the true value
        let mut estimate = dot(weights, &z);
        let mut pos = 0;
        while pos < n {
            if estimate >= 0.0 {
                let exact = dot(weights, &z);
                if exact >= 0.0 {
                    break;
                }
                estimate = exact;
            }
            let i = order[pos];
            z[i] = up;
            estimate += weights[i] * (up - down);
            pos += 1;
        }
        Ok(AdversaryMove { moves: z, redraws: 0, expected_lower_increment: None })
    }
}

/// Deterministic pairing adversary: freeze chips at or past the shifted
/// boundary, split the rest into up/down halves balanced by the lower
/// potential's slope, and orient the halves so the weighted step is
/// nonnegative.
///
/// Freezing decisions run on the integer step counters while the state is
/// lattice-exact, so a chip exactly on the boundary is recognized without
/// float comparisons; the float threshold is only a fallback.
#[derive(Debug, Clone)]
pub struct CombinatorialDrift {
    beta: f64,
    tau: f64,
    critical_counter: Option<i64>,
    critical_value: f64,
}

impl CombinatorialDrift {
    pub fn for_config(config: &GameConfig) -> Result<Self, StrategyError> {
        if config.variant() == Variant::V1 {
            return Err(StrategyError::UnsupportedVariant(Variant::V1));
        }
        let p = shift_params(config, Side::Lower);
        let unit = config.lattice_unit();
        let (critical_counter, critical_value) = match config.variant() {
            // V3 chips never freeze: with zero drift the pairing stays
            // feasible everywhere
            Variant::V3 => (None, f64::NEG_INFINITY),
            _ => {
                let threshold = config.loss_offset() + p.beta;
                // the lower shifts put the boundary on the lattice exactly
                let k = (threshold / unit).round() as i64;
                (Some(-k), -threshold)
            }
        };
        Ok(CombinatorialDrift { beta: p.beta, tau: p.tau, critical_counter, critical_value })
    }

    fn frozen(&self, state: &GameState, i: usize) -> bool {
        match (self.critical_counter, state.lattice_valid()) {
            (Some(k), true) => state.counters()[i] <= k,
            (Some(_), false) => state.position(i) <= self.critical_value,
            (None, _) => false,
        }
    }
}

impl Adversary for CombinatorialDrift {
    fn moves(
        &self,
        config: &GameConfig,
        state: &GameState,
        weights: &[f64],
        _rng: &mut RunRng,
    ) -> Result<AdversaryMove, AdversaryAbort> {
        let n = config.n_chips();
        let unit = config.lattice_unit();
        let shift = config.loss_offset() + self.beta;
        let t_next = state.time() as f64 + 1.0 - self.tau;
        let interval = config.variant().interval_steps();
        let mut active = Vec::with_capacity(n);
        let mut mags = Vec::with_capacity(n);
        for i in 0..n {
            if self.frozen(state, i) {
                continue;
            }
            let x = state.position(i) + shift;
            // active chips sit strictly right of the shifted boundary, so
            // x > 0 and the kink is never touched; the branches below are
            // pure defense
            let slope = if interval && x <= 0.0 {
                0.0
            } else {
                match SpaceTimePoint::new(x, t_next) {
                    Ok(p) => {
                        let d1 = g_derivatives(p).d1;
                        if interval { -2.0 * d1 } else { -d1 }
                    }
                    Err(_) => 0.0,
                }
            };
            active.push(i);
            mags.push(slope);
        }
        let signs = balanced_partition(&mags)
            .expect("potential slopes are nonnegative and finite");
        let weighted = compensated_sum(
            active.iter().zip(&signs).map(|(&i, &s)| f64::from(s) * weights[i]),
        );
        let flip = weighted < 0.0;
        let mut z = vec![0.0; n];
        for (k, &i) in active.iter().enumerate() {
            let sigma = if flip { -signs[k] } else { signs[k] };
            z[i] = f64::from(sigma) * unit;
        }
        Ok(AdversaryMove { moves: z, redraws: 0, expected_lower_increment: None })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{play, step, PlayOptions};
    use proptest::prelude::*;

    fn config(variant: Variant, horizon: u32, n: usize, gamma: f64) -> GameConfig {
        GameConfig::new(variant, horizon, n, gamma, 0.5, 7).unwrap()
    }

    #[test]
    fn partition_worked_example() {
        let signs = balanced_partition(&[0.5, 0.4, 0.3, 0.2, 0.1]).unwrap();
        assert_eq!(signs, vec![1, -1, -1, 1, 1]);
        let sum: f64 = signs.iter().zip([0.5, 0.4, 0.3, 0.2, 0.1]).map(|(&s, v)| f64::from(s) * v).sum();
        assert!((sum - 0.1).abs() < 1e-15);
    }

    #[test]
    fn partition_splits_equal_values_evenly() {
        let signs = balanced_partition(&[0.25, 0.25, 0.25, 0.25]).unwrap();
        let plus = signs.iter().filter(|&&s| s == 1).count();
        assert_eq!(plus, 2);
        let sum: f64 = signs.iter().map(|&s| f64::from(s) * 0.25).sum();
        assert_eq!(sum, 0.0);
    }

    #[test]
    fn partition_rejects_bad_input() {
        assert!(matches!(
            balanced_partition(&[0.1, -0.2]).unwrap_err(),
            StrategyError::PartitionValueInvalid { index: 1, .. }
        ));
        assert!(balanced_partition(&[f64::NAN]).is_err());
    }

    #[test]
    fn player_uniform_on_equal_positions() {
        let c = config(Variant::V3, 100, 4, 0.5);
        let s = GameState::initial(&c);
        let w = PotentialPlayer::for_config(&c).weights(&c, &s);
        for &wi in &w {
            assert!((wi - 0.25).abs() <= 1e-12, "weights {w:?}");
        }
        assert!((compensated_sum(w.iter().copied()) - 1.0).abs() <= 1e-15);
    }

    #[test]
    fn player_favors_chips_near_the_boundary() {
        let c = config(Variant::V3, 100, 2, 0.5);
        let mut s = GameState::initial(&c);
        // park chip 1 at +50 while chip 0 oscillates around 0
        for k in 0..50 {
            let z0 = if k % 2 == 0 { 1.0 } else { -1.0 };
            step(&c, &mut s, &[0.5, 0.5], &[z0, 1.0]).unwrap();
        }
        assert_eq!(s.position(0), 0.0);
        assert_eq!(s.position(1), 50.0);
        let w = PotentialPlayer::for_config(&c).weights(&c, &s);
        assert!(w[0] > w[1], "weights {w:?}");
        assert!(w[1] > 0.0);
    }

    #[test]
    fn player_zeroes_chips_at_the_truncation() {
        // V2, delta = 1/2, Theta = 8: drive chip 0 to exactly -8 while the
        // weight rides on chip 1
        let c = config(Variant::V2, 16, 2, 2.0);
        assert_eq!(c.delta(), 0.5);
        let mut s = GameState::initial(&c);
        for _ in 0..5 {
            step(&c, &mut s, &[0.0, 1.0], &[-1.5, 0.0]).unwrap();
        }
        step(&c, &mut s, &[0.0, 1.0], &[-0.5, 0.0]).unwrap();
        assert_eq!(s.position(0), -8.0);
        let w = PotentialPlayer::for_config(&c).weights(&c, &s);
        assert_eq!(w[0], 0.0);
        assert_eq!(w[1], 1.0);
    }

    #[test]
    fn player_uniform_when_every_chip_is_past_the_boundary() {
        // delta = 1/8 (gamma = 1/8, T = 16): Theta = 2, steps in
        // [-1.125, 0.875]; free-fall each chip in turn past -2
        let c = config(Variant::V2, 16, 2, 0.125);
        let mut s = GameState::initial(&c);
        for _ in 0..2 {
            step(&c, &mut s, &[0.0, 1.0], &[-1.125, 0.0]).unwrap();
        }
        for _ in 0..2 {
            step(&c, &mut s, &[1.0, 0.0], &[0.0, -1.125]).unwrap();
        }
        assert!(s.position(0) < -2.0 && s.position(1) < -2.0);
        let w = PotentialPlayer::for_config(&c).weights(&c, &s);
        assert_eq!(w, vec![0.5, 0.5]);
    }

    #[test]
    fn randomized_raw_draw_has_mean_drift_alpha() {
        let c = config(Variant::V1, 100, 50, 0.5);
        let adv = RandomizedDrift::for_config(&c).unwrap();
        let alpha = adv.alpha();
        let weights = uniform_weights(50);
        let mut rng = RunRng::new(11, 0);
        let draws = 2000;
        let mut slacks = Vec::with_capacity(draws);
        for _ in 0..draws {
            let z = adv.raw_draw(&c, &mut rng);
            slacks.push(dot(&weights, &z));
        }
        let mean = slacks.iter().sum::<f64>() / draws as f64;
        let var = slacks.iter().map(|s| (s - mean) * (s - mean)).sum::<f64>() / draws as f64;
        let se = (var / draws as f64).sqrt();
        assert!(
            (mean - alpha).abs() <= 3.0 * se + 1e-12,
            "mean {mean}, alpha {alpha}, se {se}"
        );
    }

    #[test]
    fn randomized_succeeds_within_budget() {
        let c = config(Variant::V1, 100, 500, 0.5);
        let adv = RandomizedDrift::for_config(&c).unwrap();
        let s = GameState::initial(&c);
        let weights = uniform_weights(500);
        let mut ok = 0;
        for stream in 0..1000 {
            let mut rng = RunRng::new(13, stream);
            if adv.moves(&c, &s, &weights, &mut rng).is_ok() {
                ok += 1;
            }
        }
        assert!(ok >= 990, "only {ok}/1000 rounds found a feasible draw");
    }

    #[test]
    fn randomized_reports_the_expected_increment() {
        let c = config(Variant::V1, 64, 20, 0.5);
        let adv = RandomizedDrift::for_config(&c).unwrap();
        let s = GameState::initial(&c);
        let mut rng = RunRng::new(5, 0);
        let mv = adv.moves(&c, &s, &uniform_weights(20), &mut rng).unwrap();
        let e = mv.expected_lower_increment.unwrap();
        assert!(e.is_finite());
    }

    #[test]
    fn randomized_rejects_degenerate_bias() {
        // T = 1 gives alpha = 1, never below 1 - delta
        let c = config(Variant::V3, 1, 2, 0.125);
        assert!(matches!(
            RandomizedDrift::for_config(&c).unwrap_err(),
            StrategyError::StepBiasOutOfRange { .. }
        ));
    }

    #[test]
    fn combinatorial_rejects_the_asymmetric_two_point_set() {
        let c = config(Variant::V1, 16, 2, 0.5);
        assert!(matches!(
            CombinatorialDrift::for_config(&c).unwrap_err(),
            StrategyError::UnsupportedVariant(Variant::V1)
        ));
    }

    #[test]
    fn combinatorial_orients_the_pairing_toward_the_weights() {
        // R = 4, two chips at the origin: equal slopes, partition (+, -)
        let c = config(Variant::V4, 16, 2, 0.5);
        assert_eq!(c.loss_offset(), 4.0);
        let s = GameState::initial(&c);
        let adv = CombinatorialDrift::for_config(&c).unwrap();
        let mut rng = RunRng::new(0, 0);
        let mv = adv.moves(&c, &s, &[0.7, 0.3], &mut rng).unwrap();
        assert_eq!(mv.moves, vec![1.0, -1.0]);
        let mv = adv.moves(&c, &s, &[0.3, 0.7], &mut rng).unwrap();
        assert_eq!(mv.moves, vec![-1.0, 1.0]);
    }

    #[test]
    fn combinatorial_freezes_chips_past_the_shifted_boundary() {
        // R = 4, beta = ceil(4 + 2) - 4 = 2: freeze at -6 and below
        let c = config(Variant::V4, 16, 2, 0.5);
        let adv = CombinatorialDrift::for_config(&c).unwrap();
        let mut s = GameState::initial(&c);
        for _ in 0..6 {
            step(&c, &mut s, &[0.0, 1.0], &[-1.0, 0.0]).unwrap();
        }
        for _ in 0..6 {
            step(&c, &mut s, &[1.0, 0.0], &[0.0, -1.0]).unwrap();
        }
        assert_eq!(s.counters(), &[-6, -6]);
        let mut rng = RunRng::new(0, 0);
        let mv = adv.moves(&c, &s, &[0.5, 0.5], &mut rng).unwrap();
        assert_eq!(mv.moves, vec![0.0, 0.0], "chips on the boundary freeze");
        assert_eq!(dot(&[0.5, 0.5], &mv.moves), 0.0);
    }

    #[test]
    fn combinatorial_never_freezes_without_drift() {
        let c = config(Variant::V3, 16, 2, 0.5);
        let adv = CombinatorialDrift::for_config(&c).unwrap();
        let mut s = GameState::initial(&c);
        for _ in 0..10 {
            step(&c, &mut s, &[0.0, 1.0], &[-1.0, 1.0]).unwrap();
        }
        assert_eq!(s.position(0), -10.0);
        let mut rng = RunRng::new(0, 0);
        let mv = adv.moves(&c, &s, &[0.5, 0.5], &mut rng).unwrap();
        assert!(mv.moves[0] != 0.0 && mv.moves[1] != 0.0);
    }

    #[test]
    fn greedy_lifts_the_heaviest_chips_first() {
        let c = config(Variant::V3, 16, 3, 0.5);
        let s = GameState::initial(&c);
        let mut rng = RunRng::new(0, 0);
        let mv = GreedyDescent.moves(&c, &s, &[0.6, 0.3, 0.1], &mut rng).unwrap();
        assert_eq!(mv.moves, vec![1.0, -1.0, -1.0]);
        let mv = GreedyDescent.moves(&c, &s, &[0.5, 0.5, 0.0], &mut rng).unwrap();
        assert_eq!(mv.moves, vec![1.0, -1.0, -1.0]);
    }

    #[test]
    fn random_feasible_stays_in_the_move_set() {
        let c = config(Variant::V4, 16, 3, 0.5);
        let s = GameState::initial(&c);
        let w = uniform_weights(3);
        let mut rng = RunRng::new(3, 4);
        for _ in 0..100 {
            let mv = RandomFeasibleDrift.moves(&c, &s, &w, &mut rng).unwrap();
            assert!(mv.moves.iter().all(|&z| (-1.0..=1.0).contains(&z)));
            assert!(dot(&w, &mv.moves) >= 0.0);
        }
    }

    #[test]
    fn full_game_with_potential_player() {
        for variant in [Variant::V2, Variant::V3, Variant::V4] {
            let c = config(variant, 32, 8, 0.5);
            let player = PotentialPlayer::for_config(&c);
            let adv = CombinatorialDrift::for_config(&c).unwrap();
            let trace = play(&c, &player, &adv, 0, &PlayOptions::default()).unwrap();
            assert!(trace.min_slack >= -1e-12, "{variant}: slack {}", trace.min_slack);
            assert!((0.0..=1.0).contains(&trace.mean_loss));
        }
        let c = config(Variant::V1, 64, 40, 0.5);
        let player = PotentialPlayer::for_config(&c);
        let adv = RandomizedDrift::for_config(&c).unwrap();
        let trace = play(&c, &player, &adv, 0, &PlayOptions::default()).unwrap();
        assert!(trace.min_slack >= -1e-12);
    }

    proptest! {
        #[test]
        fn player_weights_form_a_simplex(
            positions in prop::collection::vec(-30.0f64..30.0, 1..40),
        ) {
            let c = GameConfig::new(Variant::V3, 64, positions.len(), 0.5, 0.5, 0).unwrap();
            let s = GameState::with_positions(&c, -10, positions);
            let w = PotentialPlayer::for_config(&c).weights(&c, &s);
            prop_assert!(w.iter().all(|&wi| wi >= 0.0));
            let sum = compensated_sum(w.iter().copied());
            prop_assert!((sum - 1.0).abs() <= 1e-12, "sum {sum}");
        }

        #[test]
        fn player_peaks_at_the_chip_nearest_the_shifted_boundary(
            positions in prop::collection::vec(-20.0f64..20.0, 2..20),
        ) {
            let c = GameConfig::new(Variant::V3, 64, positions.len(), 0.5, 0.5, 0).unwrap();
            let shift = c.loss_offset() - shift_params(&c, Side::Upper).beta;
            let score = |p: f64| (p + shift).abs();
            let mut best = 0;
            for (i, &p) in positions.iter().enumerate() {
                if score(p) < score(positions[best]) {
                    best = i;
                }
            }
            // skip near-ties, where rounding may pick either chip
            let margin = positions
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != best)
                .map(|(_, &p)| score(p) - score(positions[best]))
                .fold(f64::INFINITY, f64::min);
            prop_assume!(margin > 1e-6);
            let s = GameState::with_positions(&c, -10, positions);
            let w = PotentialPlayer::for_config(&c).weights(&c, &s);
            let mut argmax = 0;
            for (i, &wi) in w.iter().enumerate() {
                if wi > w[argmax] {
                    argmax = i;
                }
            }
            prop_assert_eq!(argmax, best);
        }

        #[test]
        fn partition_signed_sum_is_bounded_by_the_maximum(
            values in prop::collection::vec(0.0f64..1.0, 1..60),
        ) {
            let signs = balanced_partition(&values).unwrap();
            let signed: f64 = signs.iter().zip(&values).map(|(&s, &v)| f64::from(s) * v).sum();
            let max = values.iter().copied().fold(0.0f64, f64::max);
            prop_assert!(signed.abs() <= max + 1e-12, "signed {signed}, max {max}");
        }
    }
}
