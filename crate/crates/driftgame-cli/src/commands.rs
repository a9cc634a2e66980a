//! Subcommand implementations. CSV goes to --out (or stdout); the human
//! summary goes to the other channel so the CSV bytes stay clean.

use std::fmt::Write as _;
use std::fs;

use driftgame::bounds::{theorem_bounds, Side};
use driftgame::checks::run_all_checks;
use driftgame::engine::{GameConfig, Variant};
use driftgame::oracle::{dpp_minimax, OracleConfig};

use crate::cli::CommonArgs;
use crate::csv::{float_field, run_row, RUN_HEADER, SWEEP_HEADER};
use crate::run::{audit_record, default_chips, run_single, RunSpec};
use crate::settings::Settings;
use crate::sweep::{run_sweep, SweepSpec};
use crate::CliError;

fn emit_csv(out: &Option<String>, csv_text: &str, summary: &str) -> Result<(), CliError> {
    match out {
        Some(path) => {
            fs::write(path, csv_text)
                .map_err(|e| CliError::Config(format!("cannot write {path}: {e}")))?;
            print!("{summary}");
        }
        None => {
            print!("{csv_text}");
            eprint!("{summary}");
        }
    }
    Ok(())
}

fn resolve_chips(settings: &Settings, variant: Variant, horizon: u32, theta: f64) -> Result<usize, CliError> {
    match settings.usize_opt("N")? {
        Some(n) => Ok(n),
        None => {
            let (n, capped) = default_chips(variant, horizon, theta);
            if capped {
                eprintln!("warning: T = {horizon}: theorem chip requirement exceeds {n}, capped");
            }
            Ok(n)
        }
    }
}

pub fn cmd_simulate(args: &CommonArgs) -> Result<(), CliError> {
    let settings = Settings::merge(args)?;
    let variant = settings.variant()?;
    let horizon = settings.u32_or("T", 64)?;
    let gamma = settings.f64_or("gamma", 0.5)?;
    let theta = settings.f64_or("theta", 0.5)?;
    let seed = settings.u64_or("seed", 0)?;
    let spec = RunSpec {
        variant,
        horizon,
        n_chips: resolve_chips(&settings, variant, horizon, theta)?,
        gamma,
        theta,
        seed,
        player: settings.player()?,
        adversary: settings.adversary(variant)?,
    };

    let record = run_single(&spec, 0, true)?;
    audit_record(&spec, &record)?;

    let row = run_row(
        spec.variant,
        spec.horizon,
        spec.n_chips,
        spec.gamma,
        spec.theta,
        spec.seed,
        record.loss,
        record.min_slack,
        record.upper.main_term,
        record.lower.main_term,
        record.retries,
    );
    let csv_text = format!("{RUN_HEADER}\n{row}\n");

    let mut summary = String::new();
    let _ = writeln!(
        summary,
        "run variant={} T={} N={} gamma={} theta={} seed={} player={} adversary={}",
        spec.variant,
        spec.horizon,
        spec.n_chips,
        float_field(spec.gamma),
        float_field(spec.theta),
        spec.seed,
        spec.player,
        spec.adversary,
    );
    let _ = writeln!(
        summary,
        "loss={} minSlack={} retries={}",
        float_field(record.loss),
        float_field(record.min_slack),
        record.retries,
    );
    let _ = writeln!(
        summary,
        "upperMain={} lowerMain={} leadingLimit={}",
        float_field(record.upper.main_term),
        float_field(record.lower.main_term),
        float_field(record.upper.leading_limit),
    );
    if let Some((start, end)) = record.lambda_upper {
        let _ = writeln!(
            summary,
            "lambdaUpper start={} end={}",
            float_field(start),
            float_field(end)
        );
    }
    if let Some((start, end)) = record.lambda_lower {
        let _ = writeln!(
            summary,
            "lambdaLower start={} end={}",
            float_field(start),
            float_field(end)
        );
    }
    if let Some(fraction) = record.increment_fraction {
        let _ = writeln!(summary, "incrementFraction={}", float_field(fraction));
    }
    let _ = writeln!(
        summary,
        "lattice valid={} drift={}",
        record.lattice_valid,
        record
            .lattice_drift
            .map_or_else(|| "-".to_string(), float_field),
    );
    emit_csv(&args.out, &csv_text, &summary)
}

pub fn cmd_bounds(args: &CommonArgs) -> Result<(), CliError> {
    let settings = Settings::merge(args)?;
    let variant = settings.variant()?;
    let horizon = settings.u32_or("T", 64)?;
    let gamma = settings.f64_or("gamma", 0.5)?;
    let theta = settings.f64_or("theta", 0.5)?;
    let config = GameConfig::new(variant, horizon, 1, gamma, theta, 0)
        .map_err(|e| CliError::Config(format!("invalid game: {e}")))?;
    for side in [Side::Upper, Side::Lower] {
        let report = theorem_bounds(&config, side);
        println!(
            "side={} variant={} T={} gamma={} theta={} a={} b={} mainTerm={} leadingLimit={} \
             errorExponent={} beta={} tau={} nRequirement={}",
            report.side,
            report.variant,
            report.horizon,
            float_field(report.gamma),
            float_field(report.theta),
            float_field(report.a),
            float_field(report.b),
            float_field(report.main_term),
            float_field(report.leading_limit),
            float_field(report.error_exponent),
            float_field(report.beta),
            float_field(report.tau),
            report
                .n_requirement
                .map_or_else(|| "-".to_string(), |n| n.to_string()),
        );
    }
    Ok(())
}

pub fn cmd_sweep(args: &CommonArgs) -> Result<(), CliError> {
    let settings = Settings::merge(args)?;
    let variant = settings.variant()?;
    let spec = SweepSpec {
        variant,
        horizons: settings.horizon_list_or(64)?,
        gammas: settings.gamma_list_or(0.5)?,
        theta: settings.f64_or("theta", 0.5)?,
        reps: settings.u32_or("reps", 1)?,
        seed: settings.u64_or("seed", 0)?,
        n_override: settings.usize_opt("N")?,
        player: settings.player()?,
        adversary: settings.adversary(variant)?,
        jobs: settings.u64_or("jobs", 0)? as usize,
    };
    let outcome = run_sweep(&spec)?;
    for warning in &outcome.warnings {
        eprintln!("warning: {warning}");
    }

    let mut csv_text = String::from(SWEEP_HEADER);
    csv_text.push('\n');
    for run in &outcome.runs {
        let record = match &run.outcome {
            Ok(record) => record,
            Err(_) => continue,
        };
        let cell = &outcome.cells[run.cell];
        let slope = outcome
            .slopes
            .iter()
            .find(|gs| gs.gamma == cell.gamma)
            .and_then(|gs| gs.slope);
        let base = run_row(
            spec.variant,
            cell.horizon,
            cell.n_chips,
            cell.gamma,
            spec.theta,
            spec.seed,
            record.loss,
            record.min_slack,
            record.upper.main_term,
            record.lower.main_term,
            record.retries,
        );
        let _ = writeln!(
            csv_text,
            "{base},{},{},{}",
            float_field(cell.mean_loss),
            float_field(cell.gap),
            slope.map_or_else(|| "NaN".to_string(), float_field),
        );
    }

    let mut summary = String::new();
    for cell in &outcome.cells {
        let _ = write!(
            summary,
            "cell gamma={} T={} N={} meanLoss={} gap={} upperMain={} lowerMain={} \
             minSlack={} successes={} failures={}",
            float_field(cell.gamma),
            cell.horizon,
            cell.n_chips,
            float_field(cell.mean_loss),
            float_field(cell.gap),
            float_field(cell.upper_main),
            float_field(cell.lower_main),
            float_field(cell.min_slack),
            cell.successes,
            cell.failures,
        );
        if let Some(fraction) = cell.increment_fraction {
            let _ = write!(summary, " incrementFraction={}", float_field(fraction));
        }
        if let Some(note) = &cell.failure_note {
            let _ = write!(summary, " note={note:?}");
        }
        summary.push('\n');
    }
    for gs in &outcome.slopes {
        let _ = writeln!(
            summary,
            "slope gamma={} value={}",
            float_field(gs.gamma),
            gs.slope
                .map_or_else(|| "undefined".to_string(), float_field),
        );
    }
    let verdict = &outcome.verdict;
    let flag = |ok: bool| if ok { "ok" } else { "FAIL" };
    let _ = writeln!(
        summary,
        "verdict bracket={} trend={} slope={} failures={} -> {}",
        flag(verdict.bracket_ok),
        flag(verdict.trend_ok),
        verdict.slope_ok.map_or("skipped", flag),
        verdict.total_failures,
        if verdict.pass { "PASS" } else { "FAIL" },
    );

    emit_csv(&args.out, &csv_text, &summary)?;
    if !outcome.verdict.pass {
        return Err(CliError::Failure("sweep verdict failed".into()));
    }
    Ok(())
}

/// Drift ratios must land on a small rational grid for the oracle's exact
/// integer feasibility tests.
fn rationalize(x: f64) -> Option<(u32, u32)> {
    for den in 1..=64u32 {
        let num = (x * f64::from(den)).round();
        if (0.0..=f64::from(den)).contains(&num) && (x - num / f64::from(den)).abs() <= 1e-9 {
            return Some((num as u32, den));
        }
    }
    None
}

pub fn cmd_oracle(args: &CommonArgs) -> Result<(), CliError> {
    let settings = Settings::merge(args)?;
    let variant = settings.variant()?;
    let horizon = settings.u32_or("T", 4)?;
    let n_chips = settings.usize_opt("N")?.unwrap_or(2);
    let gamma = settings.f64_or("gamma", 0.5)?;
    let grid = settings.grid_or(16)?;
    let config = match variant {
        Variant::V1 => {
            let delta = (2.0 * gamma / f64::from(horizon)).sqrt();
            let (num, den) = rationalize(delta).ok_or_else(|| {
                CliError::Config(format!(
                    "delta = {delta} is not n/d with d <= 64; pick gamma = d^2 T / 2 * (n/d)^2 style values"
                ))
            })?;
            OracleConfig::drift(horizon, n_chips, num, den)
        }
        Variant::V3 => {
            let radius = (2.0 * gamma * f64::from(horizon)).sqrt();
            let rounded = radius.round();
            if (radius - rounded).abs() > 1e-9 {
                return Err(CliError::Config(format!(
                    "loss radius {radius} is not an integer; pick gamma = R^2 / (2 T)"
                )));
            }
            OracleConfig::radius(horizon, n_chips, rounded as u32)
        }
        other => {
            return Err(CliError::Config(format!(
                "oracle handles the two-point variants v1 and v3, got {other}"
            )))
        }
    }
    .and_then(|cfg| cfg.with_grid(grid))
    .map_err(|e| CliError::Config(e.to_string()))?;

    let interval = dpp_minimax(&config);
    let (num, den) = config.drift_ratio();
    println!(
        "oracle variant={} T={} N={} delta={num}/{den} radius={} grid={}",
        config.variant(),
        config.horizon(),
        config.n_chips(),
        config.loss_radius(),
        config.grid_resolution(),
    );
    println!("lowerEnvelope={}", float_field(interval.lower));
    println!("upperEnvelope={}", float_field(interval.upper));
    println!("width={}", float_field(interval.width()));
    Ok(())
}

pub fn cmd_check(_args: &CommonArgs) -> Result<(), CliError> {
    let mut failed = Vec::new();
    for outcome in run_all_checks() {
        let status = if outcome.pass { "PASS" } else { "FAIL" };
        println!("check {}: {status} ({})", outcome.name, outcome.detail);
        if !outcome.pass {
            failed.push(outcome.name);
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Failure(format!(
            "checks failed: {}",
            failed.join(", ")
        )))
    }
}
