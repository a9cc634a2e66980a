//! Merged run settings: a flat key = value config file overlaid by
//! explicit flags, with typed getters that turn bad values into
//! configuration errors.

use std::collections::BTreeMap;
use std::fs;

use driftgame::engine::Variant;

use crate::cli::CommonArgs;
use crate::run::{AdversaryKind, PlayerKind};
use crate::CliError;

/// Keys the config file may define; one per flag (out and config stay
/// flag-only), plus the oracle grid resolution.
const KNOWN_KEYS: &[&str] = &[
    "variant",
    "T",
    "N",
    "gamma",
    "theta",
    "seed",
    "player",
    "adversary",
    "reps",
    "jobs",
    "grid",
];

#[derive(Debug, Default, Clone)]
pub struct Settings {
    map: BTreeMap<&'static str, String>,
}

impl Settings {
    /// Loads the config file named by the flags (if any), then overlays
    /// every explicitly given flag on top.
    pub fn merge(args: &CommonArgs) -> Result<Self, CliError> {
        let mut settings = Settings::default();
        if let Some(path) = &args.config {
            settings.load_file(path)?;
        }
        settings.overlay("variant", &args.variant);
        settings.overlay("T", &args.horizon);
        settings.overlay("N", &args.n_chips);
        settings.overlay("gamma", &args.gamma);
        settings.overlay("theta", &args.theta);
        settings.overlay("seed", &args.seed);
        settings.overlay("player", &args.player);
        settings.overlay("adversary", &args.adversary);
        settings.overlay("reps", &args.reps);
        settings.overlay("jobs", &args.jobs);
        Ok(settings)
    }

    fn load_file(&mut self, path: &str) -> Result<(), CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {path}: {e}")))?;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!("{path}:{}: expected key = value", lineno + 1))
            })?;
            let key = key.trim();
            let value = value.trim();
            let known = KNOWN_KEYS
                .iter()
                .find(|&&k| k == key)
                .ok_or_else(|| {
                    CliError::Config(format!("{path}:{}: unknown key {key}", lineno + 1))
                })?;
            self.map.insert(known, value.to_string());
        }
        Ok(())
    }

    fn overlay(&mut self, key: &'static str, value: &Option<String>) {
        if let Some(v) = value {
            self.map.insert(key, v.clone());
        }
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(String::as_str)
    }

    pub fn variant(&self) -> Result<Variant, CliError> {
        let raw = self
            .get("variant")
            .ok_or_else(|| CliError::Config("missing required --variant".into()))?;
        raw.parse()
            .map_err(|_| CliError::Config(format!("unknown variant {raw}")))
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64, CliError> {
        match self.get(key) {
            None => Ok(default),
            Some(raw) => raw
                .parse()
                .map_err(|_| CliError::Config(format!("{key}: bad number {raw}"))),
        }
    }

    pub fn u64_or(&self, key: &str, default: u64) -> Result<u64, CliError> {
        match self.get(key) {
            None => Ok(default),
            Some(raw) => raw
                .parse()
                .map_err(|_| CliError::Config(format!("{key}: bad integer {raw}"))),
        }
    }

    pub fn u32_or(&self, key: &str, default: u32) -> Result<u32, CliError> {
        self.u64_or(key, u64::from(default)).and_then(|v| {
            u32::try_from(v).map_err(|_| CliError::Config(format!("{key}: {v} is out of range")))
        })
    }

    pub fn usize_opt(&self, key: &str) -> Result<Option<usize>, CliError> {
        match self.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|_| CliError::Config(format!("{key}: bad integer {raw}"))),
        }
    }

    /// Comma-separated horizon list; a single value is a one-cell list. An
    /// explicitly empty value yields an empty list for the caller to
    /// reject.
    pub fn horizon_list_or(&self, default: u32) -> Result<Vec<u32>, CliError> {
        match self.get("T") {
            None => Ok(vec![default]),
            Some(raw) => split_list(raw)
                .into_iter()
                .map(|item| {
                    item.parse()
                        .map_err(|_| CliError::Config(format!("T: bad integer {item}")))
                })
                .collect(),
        }
    }

    pub fn gamma_list_or(&self, default: f64) -> Result<Vec<f64>, CliError> {
        match self.get("gamma") {
            None => Ok(vec![default]),
            Some(raw) => split_list(raw)
                .into_iter()
                .map(|item| {
                    item.parse()
                        .map_err(|_| CliError::Config(format!("gamma: bad number {item}")))
                })
                .collect(),
        }
    }

    pub fn player(&self) -> Result<PlayerKind, CliError> {
        match self.get("player") {
            None => Ok(PlayerKind::Potential),
            Some(raw) => raw.parse(),
        }
    }

    /// Default adversary drives the matching lower bound: sampled steps on
    /// v1 (whose pairing adversary does not exist), the pairing adversary
    /// otherwise.
    pub fn adversary(&self, variant: Variant) -> Result<AdversaryKind, CliError> {
        match self.get("adversary") {
            None => Ok(match variant {
                Variant::V1 => AdversaryKind::Randomized,
                _ => AdversaryKind::Combinatorial,
            }),
            Some(raw) => raw.parse(),
        }
    }

    pub fn grid_or(&self, default: u32) -> Result<u32, CliError> {
        self.u32_or("grid", default)
    }
}

fn split_list(raw: &str) -> Vec<String> {
    if raw.trim().is_empty() {
        return Vec::new();
    }
    raw.split(',').map(|s| s.trim().to_string()).collect()
}
