//! Exact minimax oracle for tiny two-point games.
//!
//! Backward induction over the full position lattice gives the game value
//! `value(state, k) = min over weights p of max over feasible moves z of
//! value(state + z, k + 1)`, with the fraction of lost chips as the final
//! value. Chips are tracked in undrifted coordinates where both move sets
//! are {-1, +1}: a v1 game with drift `delta` keeps the constraint
//! `p . z >= delta` and loses chips that finish at or below 0, while a v3
//! game keeps `p . z >= 0` and loses chips at or below `-radius`. (The
//! play-out engine uses the drifted frame where v1 moves are
//! {-1-delta, 1-delta}; subtracting the accumulated drift maps one frame
//! onto the other round by round.) Staying on the integer lattice with a
//! rational drift makes every feasibility test exact.
//!
//! The min over the continuous weight simplex is bracketed by a finite
//! grid p = (n_1, .., n_N) / G:
//!
//! * restricting the min to grid points can only raise it, so the grid
//!   min is an upper envelope;
//! * charging the constraint an extra margin of N/G (an L1 covering
//!   radius of the grid cells; moves have |z_i| = 1) keeps only moves
//!   that stay feasible for every weight vector near the grid point, so
//!   the inner max shrinks and the resulting grid min sits at or below
//!   the continuous min. An empty tightened move set contributes 0, the
//!   smallest possible value.
//!
//! Both envelopes are evaluated at the configured resolution and at twice
//! it; [`dpp_minimax`] intersects the two brackets into one certified
//! interval around the true minimax value.

use std::error::Error;
use std::fmt;

use crate::engine::Variant;

/// Hard cap on `(2 * position_bound + 1)^n_chips * (horizon + 1)` and on
/// the number of grid weight vectors at the doubled resolution.
const STATE_BUDGET: u64 = 1_000_000;

const MAX_HORIZON: u32 = 8;
const MAX_CHIPS: usize = 3;
const MAX_GRID: u32 = 256;
const MAX_DRIFT_DEN: u32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleError {
    /// Horizon outside 1..=8.
    BadHorizon(u32),
    /// Chip count outside 1..=3.
    BadChipCount(usize),
    /// Drift ratio with a zero denominator, a denominator above 64, or a
    /// value above 1.
    BadDriftRatio { num: u32, den: u32 },
    /// Grid resolution outside 1..=256.
    BadGrid(u32),
    /// Position bound too small to contain the walk.
    BadPositionBound { bound: u32, horizon: u32 },
    /// State or grid enumeration would exceed the fixed budget.
    BudgetExceeded { states: u64, limit: u64 },
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::BadHorizon(t) => {
                write!(f, "oracle horizon must be in 1..={MAX_HORIZON}, got {t}")
            }
            OracleError::BadChipCount(n) => {
                write!(f, "oracle chip count must be in 1..={MAX_CHIPS}, got {n}")
            }
            OracleError::BadDriftRatio { num, den } => {
                write!(
                    f,
                    "drift ratio {num}/{den} is not a rational in [0, 1] \
                     with denominator 1..={MAX_DRIFT_DEN}"
                )
            }
            OracleError::BadGrid(g) => {
                write!(f, "grid resolution must be in 1..={MAX_GRID}, got {g}")
            }
            OracleError::BadPositionBound { bound, horizon } => {
                write!(
                    f,
                    "position bound {bound} cannot contain a horizon-{horizon} walk"
                )
            }
            OracleError::BudgetExceeded { states, limit } => {
                write!(f, "enumeration would visit {states} states, budget is {limit}")
            }
        }
    }
}

impl Error for OracleError {}

/// A tiny instance the oracle can value exactly.
///
/// Only the two-point variants are supported: interval move sets admit a
/// continuum of adversary moves and have no finite backward induction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    variant: Variant,
    horizon: u32,
    n_chips: usize,
    grid_resolution: u32,
    position_bound: u32,
    delta_num: u32,
    delta_den: u32,
    radius: u32,
}

impl OracleConfig {
    /// A v1-style game: moves +-1, constraint `p . z >= num/den`, chips
    /// lost at final positions <= 0.
    pub fn drift(
        horizon: u32,
        n_chips: usize,
        delta_num: u32,
        delta_den: u32,
    ) -> Result<Self, OracleError> {
        let cfg = OracleConfig {
            variant: Variant::V1,
            horizon,
            n_chips,
            grid_resolution: 16,
            position_bound: horizon,
            delta_num,
            delta_den,
            radius: 0,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// A v3-style game: moves +-1, constraint `p . z >= 0`, chips lost at
    /// final positions <= -radius.
    pub fn radius(horizon: u32, n_chips: usize, radius: u32) -> Result<Self, OracleError> {
        let cfg = OracleConfig {
            variant: Variant::V3,
            horizon,
            n_chips,
            grid_resolution: 16,
            position_bound: horizon,
            delta_num: 0,
            delta_den: 1,
            radius,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Replaces the simplex grid resolution (default 16).
    pub fn with_grid(mut self, resolution: u32) -> Result<Self, OracleError> {
        self.grid_resolution = resolution;
        self.validate()?;
        Ok(self)
    }

    /// Replaces the position bound (default: the horizon itself).
    pub fn with_position_bound(mut self, bound: u32) -> Result<Self, OracleError> {
        self.position_bound = bound;
        self.validate()?;
        Ok(self)
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

    pub fn grid_resolution(&self) -> u32 {
        self.grid_resolution
    }

    pub fn position_bound(&self) -> u32 {
        self.position_bound
    }

    /// Drift constraint as an exact rational (0/1 for v3).
    pub fn drift_ratio(&self) -> (u32, u32) {
        (self.delta_num, self.delta_den)
    }

    pub fn loss_radius(&self) -> u32 {
        self.radius
    }

    /// Final positions at or below this are lost.
    fn loss_threshold(&self) -> i64 {
        match self.variant {
            Variant::V1 => 0,
            Variant::V3 => -i64::from(self.radius),
            _ => unreachable!("constructors only build v1 and v3 instances"),
        }
    }

    fn validate(&self) -> Result<(), OracleError> {
        if self.horizon == 0 || self.horizon > MAX_HORIZON {
            return Err(OracleError::BadHorizon(self.horizon));
        }
        if self.n_chips == 0 || self.n_chips > MAX_CHIPS {
            return Err(OracleError::BadChipCount(self.n_chips));
        }
        if self.delta_den == 0 || self.delta_den > MAX_DRIFT_DEN || self.delta_num > self.delta_den
        {
            return Err(OracleError::BadDriftRatio {
                num: self.delta_num,
                den: self.delta_den,
            });
        }
        if self.grid_resolution == 0 || self.grid_resolution > MAX_GRID {
            return Err(OracleError::BadGrid(self.grid_resolution));
        }
        if self.position_bound < self.horizon {
            return Err(OracleError::BadPositionBound {
                bound: self.position_bound,
                horizon: self.horizon,
            });
        }
        let span = 2 * u64::from(self.position_bound) + 1;
        let states = span.pow(self.n_chips as u32) * (u64::from(self.horizon) + 1);
        if states > STATE_BUDGET {
            return Err(OracleError::BudgetExceeded {
                states,
                limit: STATE_BUDGET,
            });
        }
        // dpp_minimax also solves at twice the configured resolution.
        let weights = grid_vector_count(self.n_chips, 2 * u64::from(self.grid_resolution));
        if weights > STATE_BUDGET {
            return Err(OracleError::BudgetExceeded {
                states: weights,
                limit: STATE_BUDGET,
            });
        }
        Ok(())
    }
}

/// Number of nonnegative integer vectors of length `n` summing to `total`.
fn grid_vector_count(n: usize, total: u64) -> u64 {
    match n {
        1 => 1,
        2 => total + 1,
        3 => (total + 1) * (total + 2) / 2,
        _ => unreachable!("chip count is validated to 1..=3"),
    }
}

/// Certified bracket around the true minimax value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleInterval {
    pub lower: f64,
    pub upper: f64,
}

impl OracleInterval {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, value: f64) -> bool {
        self.lower <= value && value <= self.upper
    }
}

/// Values the instance by backward induction, bracketing the continuous
/// weight minimization with the configured grid and once more with twice
/// its resolution. The returned interval contains the true minimax value.
pub fn dpp_minimax(cfg: &OracleConfig) -> OracleInterval {
    let (coarse_lo, coarse_hi) = solve(cfg, cfg.grid_resolution);
    let (fine_lo, fine_hi) = solve(cfg, 2 * cfg.grid_resolution);
    OracleInterval {
        lower: coarse_lo.max(fine_lo),
        upper: coarse_hi.min(fine_hi),
    }
}

/// One lower/upper envelope pair at a fixed grid resolution.
fn solve(cfg: &OracleConfig, grid: u32) -> (f64, f64) {
    let tables = backward_tables(cfg, grid);
    (tables[0].lo[0], tables[0].hi[0])
}

/// Envelope values for every state at one level. Level `k` holds the
/// positions reachable after `k` moves: each coordinate lives on
/// {-k, -k+2, .., k} and is stored by its digit `d = (position + k) / 2`,
/// so a level-`k` state index is `sum of d_i * (k+1)^i`.
#[derive(Debug, Clone)]
struct LevelTable {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

fn backward_tables(cfg: &OracleConfig, grid: u32) -> Vec<LevelTable> {
    let n = cfg.n_chips;
    let horizon = cfg.horizon as usize;
    let masks = feasibility_masks(cfg, grid);
    let final_table = final_level(cfg);
    let mut tables = vec![final_table; horizon + 1];
    for level in (0..horizon).rev() {
        tables[level] = step_back(&tables[level + 1], level, n, &masks);
    }
    tables
}

/// Values at the final level: the fraction of chips at or below the loss
/// threshold.
fn final_level(cfg: &OracleConfig) -> LevelTable {
    let n = cfg.n_chips;
    let horizon = i64::from(cfg.horizon);
    let stride = (cfg.horizon + 1) as usize;
    // digit d encodes position 2d - horizon; the hit test 2d - T <= thr
    // becomes d <= floor((thr + T) / 2).
    let max_hit_digit = (cfg.loss_threshold() + horizon).div_euclid(2);
    let count = stride.pow(n as u32);
    let mut values = Vec::with_capacity(count);
    for idx in 0..count {
        let mut rest = idx;
        let mut hits = 0usize;
        for _ in 0..n {
            let digit = (rest % stride) as i64;
            rest /= stride;
            if digit <= max_hit_digit {
                hits += 1;
            }
        }
        values.push(hits as f64 / n as f64);
    }
    LevelTable {
        lo: values.clone(),
        hi: values,
    }
}

/// Builds level `level` from level `level + 1`. Move pattern `m` sends
/// digit `d_i` to `d_i + bit_i(m)` one level down, so each child index is
/// the state's rebased index plus a pattern offset.
fn step_back(next: &LevelTable, level: usize, n: usize, masks: &[(u16, u16)]) -> LevelTable {
    let stride = level + 1;
    let next_stride = level + 2;
    let patterns = 1usize << n;
    let mut offsets = [0usize; 8];
    for (m, slot) in offsets.iter_mut().enumerate().take(patterns) {
        let mut off = 0usize;
        let mut base = 1usize;
        for i in 0..n {
            if m >> i & 1 == 1 {
                off += base;
            }
            base *= next_stride;
        }
        *slot = off;
    }

    let count = stride.pow(n as u32);
    let mut lo = Vec::with_capacity(count);
    let mut hi = Vec::with_capacity(count);
    let mut child_lo = [0.0f64; 8];
    let mut child_hi = [0.0f64; 8];
    for idx in 0..count {
        // Rebase the digit vector onto the wider next-level stride.
        let mut rest = idx;
        let mut rebased = 0usize;
        let mut base = 1usize;
        for _ in 0..n {
            rebased += (rest % stride) * base;
            rest /= stride;
            base *= next_stride;
        }
        for m in 0..patterns {
            let child = rebased + offsets[m];
            child_lo[m] = next.lo[child];
            child_hi[m] = next.hi[child];
        }

        let mut best_hi = f64::INFINITY;
        let mut best_lo = f64::INFINITY;
        for &(exact, tight) in masks {
            let mut worst_hi = f64::NEG_INFINITY;
            for (m, &value) in child_hi.iter().enumerate().take(patterns) {
                if exact >> m & 1 == 1 && value > worst_hi {
                    worst_hi = value;
                }
            }
            if worst_hi < best_hi {
                best_hi = worst_hi;
            }
            let mut worst_lo = 0.0f64;
            for (m, &value) in child_lo.iter().enumerate().take(patterns) {
                if tight >> m & 1 == 1 && value > worst_lo {
                    worst_lo = value;
                }
            }
            if worst_lo < best_lo {
                best_lo = worst_lo;
            }
        }
        lo.push(best_lo);
        hi.push(best_hi);
    }
    LevelTable { lo, hi }
}

/// Feasible move patterns for every grid weight vector, deduplicated.
///
/// Bit `m` of a mask selects the pattern whose chip `i` moves up when
/// `m >> i & 1 == 1` and down otherwise. With weights `n_i / G` the signed
/// sum is `s(m) = sum of sign_i * n_i`, and
///
/// * exact feasibility (`p . z >= delta`) is `den * s(m) >= num * G`;
/// * tightened feasibility charges the covering margin N/G on top:
///   `den * s(m) >= num * G + den * N`.
///
/// The all-up pattern always passes the exact test, so upper-envelope move
/// sets are never empty; tightened sets may be, which the caller scores 0.
fn feasibility_masks(cfg: &OracleConfig, grid: u32) -> Vec<(u16, u16)> {
    let n = cfg.n_chips;
    let g = i64::from(grid);
    let num = i64::from(cfg.delta_num);
    let den = i64::from(cfg.delta_den);
    let patterns = 1usize << n;
    let mut masks = Vec::new();
    let mut parts = vec![0i64; n];
    for_each_composition(0, g, &mut parts, &mut |parts: &[i64]| {
        let mut exact = 0u16;
        let mut tight = 0u16;
        for m in 0..patterns {
            let mut signed = 0i64;
            for (i, &part) in parts.iter().enumerate() {
                if m >> i & 1 == 1 {
                    signed += part;
                } else {
                    signed -= part;
                }
            }
            if den * signed >= num * g {
                exact |= 1 << m;
            }
            if den * signed >= num * g + den * n as i64 {
                tight |= 1 << m;
            }
        }
        masks.push((exact, tight));
    });
    masks.sort_unstable();
    masks.dedup();
    masks
}

/// Visits every way to fill `parts[slot..]` with nonnegative integers
/// summing to `remaining`.
fn for_each_composition<F: FnMut(&[i64])>(
    slot: usize,
    remaining: i64,
    parts: &mut Vec<i64>,
    visit: &mut F,
) {
    if slot + 1 == parts.len() {
        parts[slot] = remaining;
        visit(parts);
        return;
    }
    for value in 0..=remaining {
        parts[slot] = value;
        for_each_composition(slot + 1, remaining - value, parts, visit);
    }
}
