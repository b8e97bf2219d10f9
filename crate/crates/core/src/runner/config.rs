//! Scenario configuration: named presets, TOML files and overrides.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::chsh::agent::PriorKind;
use crate::epd::agent::{EpdPriorKind, EpdUpdate};
use crate::error::{Error, Result};

/// Environment variable naming the directory for run outputs when no
/// explicit path is given.
pub const OUTPUT_DIR_ENV: &str = "QBGAME_OUTPUT_DIR";

pub const DEFAULT_SEED: u64 = 20_230_511;
pub const DEFAULT_EPS: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Game {
    Chsh,
    Epd,
}

impl Game {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "chsh" => Ok(Game::Chsh),
            "epd" | "prisoners" => Ok(Game::Epd),
            _ => Err(Error::UnknownName {
                kind: "game",
                name: s.to_string(),
                expected: "chsh, epd".to_string(),
            }),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Game::Chsh => "chsh",
            Game::Epd => "epd",
        }
    }

    pub fn default_sims(self) -> usize {
        10
    }

    pub fn default_rounds(self) -> usize {
        match self {
            Game::Chsh => 500,
            Game::Epd => 1000,
        }
    }

    pub fn iterations(self) -> usize {
        match self {
            Game::Chsh => 3,
            Game::Epd => 1,
        }
    }
}

impl fmt::Display for Game {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Priors {
    Chsh(PriorKind, PriorKind),
    Epd(EpdPriorKind, EpdPriorKind),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    JsonLines,
}

impl OutputFormat {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "jsonl" | "json-lines" => Ok(OutputFormat::JsonLines),
            _ => Err(Error::UnknownName {
                kind: "output format",
                name: s.to_string(),
                expected: "csv, jsonl".to_string(),
            }),
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::JsonLines => "jsonl",
        }
    }
}

pub struct Preset {
    pub game: Game,
    pub name: &'static str,
    pub gamma_ebits: f64,
    pub prior_a: &'static str,
    pub prior_b: &'static str,
}

pub const PRESETS: [Preset; 8] = [
    Preset { game: Game::Chsh, name: "finding-advantage", gamma_ebits: 1.0, prior_a: "uniform", prior_b: "uniform" },
    Preset { game: Game::Chsh, name: "making-do", gamma_ebits: 0.0, prior_a: "uniform", prior_b: "uniform" },
    Preset { game: Game::Chsh, name: "overcoming-bias", gamma_ebits: 0.7, prior_a: "skew-classical", prior_b: "uniform" },
    Preset { game: Game::Chsh, name: "good-enough", gamma_ebits: 0.3, prior_a: "skew-quantum", prior_b: "uniform" },
    Preset { game: Game::Epd, name: "bohrs-horseshoe", gamma_ebits: 1.0, prior_a: "low-low", prior_b: "low-low" },
    Preset { game: Game::Epd, name: "faith-alone", gamma_ebits: 0.0, prior_a: "high-high", prior_b: "high-high" },
    Preset { game: Game::Epd, name: "double-down", gamma_ebits: 0.9, prior_a: "low-low", prior_b: "high-high" },
    Preset { game: Game::Epd, name: "fools-gold", gamma_ebits: 0.4, prior_a: "low-high", prior_b: "low-high" },
];

pub fn find_preset(game: Game, name: &str) -> Result<&'static Preset> {
    PRESETS
        .iter()
        .find(|p| p.game == game && p.name == name)
        .ok_or_else(|| Error::UnknownName {
            kind: "scenario",
            name: name.to_string(),
            expected: PRESETS
                .iter()
                .filter(|p| p.game == game)
                .map(|p| p.name)
                .collect::<Vec<_>>()
                .join(", "),
        })
}

/// Unvalidated settings, as read from a TOML file or assembled from flags.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub game: Option<String>,
    pub scenario: Option<String>,
    pub gamma_ebits: Option<f64>,
    pub prior_a: Option<String>,
    pub prior_b: Option<String>,
    pub sims: Option<usize>,
    pub rounds: Option<usize>,
    pub iterations: Option<usize>,
    pub eps: Option<f64>,
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
    pub format: Option<String>,
    /// Prisoner belief update: "separate" (default) or "joint".
    pub epd_update: Option<String>,
}

impl RawConfig {
    pub fn from_toml_str(text: &str, path: &Path) -> Result<Self> {
        toml::from_str(text).map_err(|source| Error::ParseConfig {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::ReadConfig {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text, path)
    }

    /// Fields set in `overrides` win.
    pub fn merge(self, overrides: RawConfig) -> RawConfig {
        RawConfig {
            game: overrides.game.or(self.game),
            scenario: overrides.scenario.or(self.scenario),
            gamma_ebits: overrides.gamma_ebits.or(self.gamma_ebits),
            prior_a: overrides.prior_a.or(self.prior_a),
            prior_b: overrides.prior_b.or(self.prior_b),
            sims: overrides.sims.or(self.sims),
            rounds: overrides.rounds.or(self.rounds),
            iterations: overrides.iterations.or(self.iterations),
            eps: overrides.eps.or(self.eps),
            seed: overrides.seed.or(self.seed),
            output: overrides.output.or(self.output),
            format: overrides.format.or(self.format),
            epd_update: overrides.epd_update.or(self.epd_update),
        }
    }

    pub fn resolve(self) -> Result<ScenarioConfig> {
        let game = Game::parse(
            self.game
                .as_deref()
                .ok_or_else(|| Error::InvalidConfig("game is required (chsh or epd)".into()))?,
        )?;
        let preset = self.scenario.as_deref().map(|s| find_preset(game, s)).transpose()?;
        let gamma_ebits = self
            .gamma_ebits
            .or(preset.map(|p| p.gamma_ebits))
            .ok_or_else(|| Error::InvalidConfig("gamma_ebits is required without a named scenario".into()))?;
        if !(0.0..=1.0).contains(&gamma_ebits) {
            return Err(Error::InvalidConfig(format!("gamma_ebits must lie in [0, 1], got {gamma_ebits}")));
        }
        let prior_name = |given: &Option<String>, from_preset: Option<&'static str>, seat: &str| {
            given
                .clone()
                .or(from_preset.map(str::to_string))
                .ok_or_else(|| Error::InvalidConfig(format!("{seat} is required without a named scenario")))
        };
        let pa = prior_name(&self.prior_a, preset.map(|p| p.prior_a), "prior_a")?;
        let pb = prior_name(&self.prior_b, preset.map(|p| p.prior_b), "prior_b")?;
        let priors = match game {
            Game::Chsh => Priors::Chsh(PriorKind::parse(&pa)?, PriorKind::parse(&pb)?),
            Game::Epd => Priors::Epd(EpdPriorKind::parse(&pa)?, EpdPriorKind::parse(&pb)?),
        };
        let sims = self.sims.unwrap_or(game.default_sims());
        let rounds = self.rounds.unwrap_or(game.default_rounds());
        if sims == 0 {
            return Err(Error::InvalidConfig("sims must be at least 1".into()));
        }
        if rounds == 0 {
            return Err(Error::InvalidConfig("rounds must be at least 1".into()));
        }
        let iterations = self.iterations.unwrap_or(game.iterations());
        if iterations != game.iterations() {
            return Err(Error::InvalidConfig(format!(
                "{game} rounds have exactly {} iteration(s), got {iterations}",
                game.iterations()
            )));
        }
        let eps = self.eps.unwrap_or(DEFAULT_EPS);
        if !(0.0..1.0).contains(&eps) {
            return Err(Error::InvalidConfig(format!("eps must lie in [0, 1), got {eps}")));
        }
        let format = self.format.as_deref().map(OutputFormat::parse).transpose()?.unwrap_or_default();
        let epd_update = self.epd_update.as_deref().map(EpdUpdate::parse).transpose()?.unwrap_or_default();
        Ok(ScenarioConfig {
            game,
            label: self.scenario.unwrap_or_else(|| "custom".to_string()),
            gamma_ebits,
            priors,
            sims,
            rounds,
            eps,
            seed: self.seed.unwrap_or(DEFAULT_SEED),
            output: self.output,
            format,
            epd_update,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub game: Game,
    /// Preset name, or "custom".
    pub label: String,
    pub gamma_ebits: f64,
    pub priors: Priors,
    pub sims: usize,
    pub rounds: usize,
    pub eps: f64,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
    /// Ignored for CHSH.
    pub epd_update: EpdUpdate,
}

impl ScenarioConfig {
    pub fn named(game: Game, scenario: &str) -> Result<Self> {
        RawConfig {
            game: Some(game.name().to_string()),
            scenario: Some(scenario.to_string()),
            ..Default::default()
        }
        .resolve()
    }

    pub fn iterations(&self) -> usize {
        self.game.iterations()
    }

    /// Explicit output path, else `<dir>/<game>-<label>-seed<seed>.<ext>` where
    /// `<dir>` comes from [`OUTPUT_DIR_ENV`] or defaults to the working directory.
    pub fn output_path(&self) -> PathBuf {
        if let Some(p) = &self.output {
            return p.clone();
        }
        let dir = std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."));
        dir.join(format!("{}-{}-seed{}.{}", self.game, self.label, self.seed, self.format.extension()))
    }
}
