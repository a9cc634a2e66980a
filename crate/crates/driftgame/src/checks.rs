//! Runtime verification: an independent quadrature oracle for the Gaussian
//! tail integral, finite-difference derivative probes, and named invariant
//! suites runnable from tests or the CLI.
//!
//! The oracle here never calls into [`crate::special`]'s rational
//! approximation; it integrates exp(-x^2) directly so the two paths can be
//! compared against each other.

use crate::bounds::{theorem_bounds, Side};
use crate::engine::{play, GameConfig, PlayOptions, Variant};
use crate::rng::RunRng;
use crate::special::{g_derivatives, g_eval, g_tilde_eval, tail_integral, SpaceTimePoint};
use crate::strategies::{balanced_partition, CombinatorialDrift, PotentialPlayer, RandomizedDrift};

#[allow(clippy::excessive_precision)] // quoted beyond f64, rounds to nearest
const INV_SQRT_PI: f64 = 0.564_189_583_547_756_28;

fn gauss_density(x: f64) -> f64 {
    (-x * x).exp() * INV_SQRT_PI
}

fn simpson(f: impl Fn(f64) -> f64 + Copy, a: f64, b: f64) -> f64 {
    (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b))
}

fn adaptive(
    f: impl Fn(f64) -> f64 + Copy,
    a: f64,
    b: f64,
    whole: f64,
    eps: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let left = simpson(f, a, m);
    let right = simpson(f, m, b);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * eps {
        left + right + delta / 15.0
    } else {
        adaptive(f, a, m, left, 0.5 * eps, depth - 1) + adaptive(f, m, b, right, 0.5 * eps, depth - 1)
    }
}

/// Integral of exp(-x^2)/sqrt(pi) over [a, infinity), by adaptive Simpson
/// quadrature on [a, cutoff]. The truncated tail beyond the cutoff is below
/// 1e-36, far under the quadrature tolerance.
pub fn tail_integral_quadrature(a: f64) -> f64 {
    assert!(!a.is_nan(), "quadrature oracle: NaN bound");
    if a == f64::INFINITY {
        return 0.0;
    }
    if a == f64::NEG_INFINITY {
        return 1.0;
    }
    let cutoff = (a + 8.0).max(9.0);
    adaptive(
        gauss_density,
        a,
        cutoff,
        simpson(gauss_density, a, cutoff),
        1e-16,
        48,
    )
    .clamp(0.0, 1.0)
}

/// Five-point central estimate of df/dx, O(h^4).
pub fn central_deriv(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    let r3 = 0.5 * (f(x + h) - f(x - h));
    let r5 = (4.0 / 3.0) * (f(x + 0.5 * h) - f(x - 0.5 * h)) - (1.0 / 3.0) * r3;
    r5 / h
}

/// Three-point central estimate of d2f/dx2, O(h^2).
pub fn central_second_deriv(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)
}

/// Result of one named invariant suite.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

/// Runs every suite in a fixed order.
pub fn run_all_checks() -> Vec<CheckOutcome> {
    vec![
        check_tail_accuracy(),
        check_heat_residuals(),
        check_decay_profiles(),
        check_partition_balance(),
        check_bound_limits(),
        check_determinism(),
    ]
}

fn point(s: f64, t: f64) -> SpaceTimePoint {
    SpaceTimePoint::new(s, t).expect("check grids stay inside the domain")
}

/// Tail integral against the quadrature oracle at 1000 points of [-6, 6],
/// plus the exact center value.
pub fn check_tail_accuracy() -> CheckOutcome {
    let mut worst = 0.0f64;
    for i in 0..1000 {
        let a = -6.0 + 12.0 * i as f64 / 999.0;
        let diff = (tail_integral(a) - tail_integral_quadrature(a)).abs();
        worst = worst.max(diff);
    }
    let center = (tail_integral(0.0) - 0.5).abs();
    CheckOutcome {
        name: "tail-accuracy",
        pass: worst <= 1e-12 && center <= 1e-15,
        detail: format!("max |tail - quadrature| {worst:.3e}, center defect {center:.3e}"),
    }
}

/// Finite-difference heat residuals d/dt f + (1/2) d2/ds2 f for the smooth
/// potential on s in [-10, 10], t in [-100, -1], and for the truncated
/// potential away from its kink (where the curvature term is clipped at 0).
pub fn check_heat_residuals() -> CheckOutcome {
    let h = 1e-4;
    let mut worst = 0.0f64;
    for &t in &[-1.0, -2.0, -5.0, -10.0, -30.0, -100.0] {
        for k in 0..=40 {
            let s = -10.0 + 0.5 * k as f64;
            let dt = central_deriv(|tt| g_eval(point(s, tt)), t, h);
            let d2 = central_second_deriv(|ss| g_eval(point(ss, t)), s, h);
            worst = worst.max((dt + 0.5 * d2).abs());
            if s > 0.25 {
                let dt = central_deriv(|tt| g_tilde_eval(point(s, tt)), t, h);
                let d2 = central_second_deriv(|ss| g_tilde_eval(point(ss, t)), s, h);
                worst = worst.max((dt + 0.5 * d2.max(0.0)).abs());
            }
        }
    }
    CheckOutcome {
        name: "heat-residual",
        pass: worst <= 1e-4,
        detail: format!("max residual {worst:.3e}"),
    }
}

/// Derivative decay in similarity coordinates: on s = x sqrt(-t) grids the
/// rescaled profiles |d1| sqrt(-t), |d2| (-t), |d3| (-t)^(3/2) and
/// |dtt| t^2 collapse onto fixed curves, so their suprema match across
/// four decades of t and the slope peak equals 1/sqrt(2 pi).
pub fn check_decay_profiles() -> CheckOutcome {
    const PEAK: f64 = 0.398_942_280_401_432_7;
    let times = [-1.0f64, -10.0, -100.0, -1000.0];
    let mut sups = [[0.0f64; 4]; 4];
    for (row, &t) in times.iter().enumerate() {
        let scale = (-t).sqrt();
        let mut sup = [0.0f64; 4];
        for k in -512..=512 {
            let x = k as f64 / 64.0;
            let d = g_derivatives(point(x * scale, t));
            sup[0] = sup[0].max(d.d1.abs() * scale);
            sup[1] = sup[1].max(d.d2.abs() * -t);
            sup[2] = sup[2].max(d.d3.abs() * scale * -t);
            sup[3] = sup[3].max(d.dtt.abs() * t * t);
        }
        sups[row] = sup;
    }
    let mut peak_defect = 0.0f64;
    let mut worst_ratio = 1.0f64;
    for family in 0..4 {
        let column = sups.iter().map(|row| row[family]);
        let hi = column.clone().fold(f64::MIN, f64::max);
        let lo = column.fold(f64::MAX, f64::min);
        worst_ratio = worst_ratio.max(hi / lo);
    }
    for row in &sups {
        peak_defect = peak_defect.max((row[0] - PEAK).abs());
    }
    CheckOutcome {
        name: "decay-profile",
        pass: peak_defect <= 1e-6 && worst_ratio <= 1.01,
        detail: format!("slope peak defect {peak_defect:.3e}, worst sup ratio {worst_ratio:.6}"),
    }
}

/// Signed balancing of nonnegative values: 10^4 random instances obey the
/// |signed sum| <= max bound, and on small instances the greedy result is
/// cross-checked against all 2^n sign patterns.
pub fn check_partition_balance() -> CheckOutcome {
    let mut rng = RunRng::new(0x5eed, 0);
    let tol = 1e-12;
    let mut worst_excess = f64::MIN;
    for trial in 0..10_000 {
        let n = 1 + (rng.uniform() * 200.0) as usize;
        let mut values: Vec<f64> = (0..n).map(|_| rng.uniform()).collect();
        if trial % 97 == 0 {
            values[0] = 0.0;
        }
        let signs = match balanced_partition(&values) {
            Ok(signs) => signs,
            Err(e) => {
                return CheckOutcome {
                    name: "partition-balance",
                    pass: false,
                    detail: format!("rejected valid input: {e}"),
                }
            }
        };
        let signed: f64 = values.iter().zip(&signs).map(|(v, &s)| v * f64::from(s)).sum();
        let max = values.iter().fold(0.0f64, |acc, &v| acc.max(v));
        worst_excess = worst_excess.max(signed.abs() - max);
    }
    let mut exhaustive_defect = f64::MIN;
    for n in 1..=12usize {
        for _ in 0..25 {
            let values: Vec<f64> = (0..n).map(|_| rng.uniform()).collect();
            let signs = balanced_partition(&values).expect("positive finite values");
            let signed: f64 = values.iter().zip(&signs).map(|(v, &s)| v * f64::from(s)).sum();
            let max = values.iter().fold(0.0f64, |acc, &v| acc.max(v));
            worst_excess = worst_excess.max(signed.abs() - max);
            let best = (0..1u32 << n)
                .map(|mask| {
                    values
                        .iter()
                        .enumerate()
                        .map(|(i, &v)| if mask >> i & 1 == 1 { v } else { -v })
                        .sum::<f64>()
                        .abs()
                })
                .fold(f64::MAX, f64::min);
            // The optimum can never sit above what greedy achieved.
            exhaustive_defect = exhaustive_defect.max(best - signed.abs());
        }
    }
    CheckOutcome {
        name: "partition-balance",
        pass: worst_excess <= tol && exhaustive_defect <= tol,
        detail: format!(
            "worst |signed| - max = {worst_excess:.3e}, worst optimum - greedy = {exhaustive_defect:.3e}"
        ),
    }
}

/// At horizon 10^8 each main term sits within 1e-2 of its limit, both
/// sides of one variant share the limit exactly, and the interval-variant
/// limits are exactly twice the two-point ones.
pub fn check_bound_limits() -> CheckOutcome {
    let mut worst = 0.0f64;
    let mut leading = [0.0f64; 4];
    for (i, variant) in [Variant::V1, Variant::V2, Variant::V3, Variant::V4]
        .into_iter()
        .enumerate()
    {
        let config = GameConfig::new(variant, 100_000_000, 1, 0.5, 0.5, 0)
            .expect("limit-check configuration is valid");
        let upper = theorem_bounds(&config, Side::Upper);
        let lower = theorem_bounds(&config, Side::Lower);
        if upper.leading_limit != lower.leading_limit {
            return CheckOutcome {
                name: "bound-limits",
                pass: false,
                detail: format!("sides disagree on the {variant} limit"),
            };
        }
        worst = worst.max((upper.main_term - upper.leading_limit).abs());
        worst = worst.max((lower.main_term - lower.leading_limit).abs());
        leading[i] = upper.leading_limit;
    }
    let doubled = leading[1] == 2.0 * leading[0] && leading[3] == 2.0 * leading[2];
    CheckOutcome {
        name: "bound-limits",
        pass: worst <= 1e-2 && doubled,
        detail: format!("max |main - limit| {worst:.3e}, interval limits doubled: {doubled}"),
    }
}

/// Same seed and stream replay bit-identically; different streams move
/// differently.
pub fn check_determinism() -> CheckOutcome {
    let opts = PlayOptions {
        record_vectors: true,
        ..PlayOptions::default()
    };
    let v3 = GameConfig::new(Variant::V3, 32, 8, 0.5, 0.5, 41).expect("valid");
    let player = PotentialPlayer::for_config(&v3);
    let pairing = CombinatorialDrift::for_config(&v3).expect("v3 supports pairing");
    let a = play(&v3, &player, &pairing, 3, &opts).expect("clean run");
    let b = play(&v3, &player, &pairing, 3, &opts).expect("clean run");
    let replay_ok = a.mean_loss.to_bits() == b.mean_loss.to_bits()
        && a.min_slack.to_bits() == b.min_slack.to_bits()
        && a.total_redraws == b.total_redraws
        && a.moves_log == b.moves_log
        && a.per_chip_loss == b.per_chip_loss;

    let v1 = GameConfig::new(Variant::V1, 64, 24, 0.5, 0.5, 41).expect("valid");
    let player = PotentialPlayer::for_config(&v1);
    let sampler = RandomizedDrift::for_config(&v1).expect("valid bias");
    let c = play(&v1, &player, &sampler, 4, &opts).expect("clean run");
    let d = play(&v1, &player, &sampler, 4, &opts).expect("clean run");
    let e = play(&v1, &player, &sampler, 5, &opts).expect("clean run");
    let sampled_ok = c.moves_log == d.moves_log && c.moves_log != e.moves_log;
    CheckOutcome {
        name: "determinism",
        pass: replay_ok && sampled_ok,
        detail: format!("replay identical: {replay_ok}, streams distinct: {sampled_ok}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values computed with 50-digit interval arithmetic.
    #[test]
    #[allow(clippy::excessive_precision)]
    fn quadrature_matches_high_precision_references() {
        let cases = [
            (0.0, 0.5),
            (1.0, 0.078649603525142565),
            (0.5, 0.23975006109347673),
            (2.0, 0.0023388674905236329),
            (3.0, 1.1045248499292721e-5),
            (-1.0, 0.92135039647485743),
        ];
        for (a, want) in cases {
            let got = tail_integral_quadrature(a);
            assert!(
                (got - want).abs() <= 1e-14,
                "quadrature({a}) = {got}, want {want}"
            );
        }
    }

    #[test]
    fn quadrature_limits() {
        assert_eq!(tail_integral_quadrature(f64::INFINITY), 0.0);
        assert_eq!(tail_integral_quadrature(f64::NEG_INFINITY), 1.0);
        assert!(tail_integral_quadrature(9.5) < 1e-35);
    }

    #[test]
    fn central_deriv_on_polynomial() {
        let d = central_deriv(|x| x * x * x, 2.0, 1e-3);
        assert!((d - 12.0).abs() < 1e-9);
    }

    #[test]
    fn all_named_suites_pass() {
        for outcome in run_all_checks() {
            assert!(outcome.pass, "{}: {}", outcome.name, outcome.detail);
        }
    }
}
