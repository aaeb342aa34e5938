//! Run configuration: built-in defaults, config-file values, and
//! command-line flags, resolved in that order of increasing precedence,
//! with `SDE_SEED` trumping everything for the seed.
//!
//! The resolved settings are embedded verbatim in every report so a run
//! is reproducible from its own output.

use std::collections::BTreeMap;
use std::path::PathBuf;

use evosearch::SearchConfig;
use exprcore::Profile;
use serde::Serialize;
use targets::DistributionSpec;
use thiserror::Error;

/// All tunable knobs of a fit, with the published defaults.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct FitSettings {
    pub alpha: f64,
    pub tau: f64,
    pub gamma: f64,
    pub populations: usize,
    pub pop_size: usize,
    pub iterations: usize,
    pub max_size: usize,
    pub restarts: usize,
    /// Profile names, e.g. `["1", "2"]`.
    pub profiles: Vec<String>,
    pub enable_mixture: bool,
    pub enable_zeroinfl: bool,
    pub seed: u64,
    /// Stagnation cutoff per population. Not a command-line flag; exposed
    /// for programmatic callers that trade depth for wall time.
    pub patience: usize,
}

impl Default for FitSettings {
    fn default() -> Self {
        FitSettings {
            alpha: 0.5,
            tau: 4.0,
            gamma: 1.0,
            populations: 30,
            pop_size: 60,
            iterations: 3000,
            max_size: 15,
            restarts: 8,
            profiles: vec!["1".into(), "2".into()],
            enable_mixture: false,
            enable_zeroinfl: false,
            seed: 0,
            patience: 300,
        }
    }
}

/// A sparse layer of settings: `None` means "not specified here, fall
/// through to the next layer down".
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub alpha: Option<f64>,
    pub tau: Option<f64>,
    pub gamma: Option<f64>,
    pub populations: Option<usize>,
    pub pop_size: Option<usize>,
    pub iterations: Option<usize>,
    pub max_size: Option<usize>,
    pub restarts: Option<usize>,
    pub profiles: Option<Vec<String>>,
    pub enable_mixture: Option<bool>,
    pub enable_zeroinfl: Option<bool>,
    pub seed: Option<u64>,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config line {line}: expected key=value, got `{text}`")]
    Malformed { line: usize, text: String },
    #[error("config line {line}: unknown key `{key}` (valid keys: {valid})")]
    UnknownKey { line: usize, key: String, valid: &'static str },
    #[error("config line {line}: cannot parse `{value}` as {kind} for key `{key}`")]
    BadValue { line: usize, key: String, value: String, kind: &'static str },
    #[error("unknown profile `{0}` (valid: 1, 2, uniform, profile1, profile2)")]
    UnknownProfile(String),
    #[error("SDE_SEED is set but not a valid u64: `{0}`")]
    BadEnvSeed(String),
    #[error("exactly one input source required: --input <csv>, or --family <spec> with --samples <M>")]
    InputSource,
    #[error("{0} must be positive")]
    NonPositive(&'static str),
}

const VALID_KEYS: &str = "alpha, tau, gamma, populations, pop-size, iterations, max-size, \
                          restarts, profiles, enable-mixture, enable-zeroinfl, seed";

/// Parse a `key=value` config file body. Keys use the flag spellings;
/// blank lines and `#` comments are skipped.
pub fn parse_config_file(text: &str) -> Result<Overrides, ConfigError> {
    let mut o = Overrides::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (key, value) = trimmed.split_once('=').ok_or_else(|| ConfigError::Malformed {
            line,
            text: trimmed.to_string(),
        })?;
        let (key, value) = (key.trim(), value.trim());
        let bad = |kind: &'static str| ConfigError::BadValue {
            line,
            key: key.to_string(),
            value: value.to_string(),
            kind,
        };
        match key {
            "alpha" => o.alpha = Some(value.parse().map_err(|_| bad("float"))?),
            "tau" => o.tau = Some(value.parse().map_err(|_| bad("float"))?),
            "gamma" => o.gamma = Some(value.parse().map_err(|_| bad("float"))?),
            "populations" => o.populations = Some(value.parse().map_err(|_| bad("integer"))?),
            "pop-size" => o.pop_size = Some(value.parse().map_err(|_| bad("integer"))?),
            "iterations" => o.iterations = Some(value.parse().map_err(|_| bad("integer"))?),
            "max-size" => o.max_size = Some(value.parse().map_err(|_| bad("integer"))?),
            "restarts" => o.restarts = Some(value.parse().map_err(|_| bad("integer"))?),
            "profiles" => {
                o.profiles = Some(value.split(',').map(|s| s.trim().to_string()).collect())
            }
            "enable-mixture" => o.enable_mixture = Some(value.parse().map_err(|_| bad("bool"))?),
            "enable-zeroinfl" => o.enable_zeroinfl = Some(value.parse().map_err(|_| bad("bool"))?),
            "seed" => o.seed = Some(value.parse().map_err(|_| bad("integer"))?),
            _ => {
                return Err(ConfigError::UnknownKey {
                    line,
                    key: key.to_string(),
                    valid: VALID_KEYS,
                })
            }
        }
    }
    Ok(o)
}

impl FitSettings {
    /// Layer `o` on top of `self`, taking every field `o` specifies.
    pub fn apply(mut self, o: &Overrides) -> FitSettings {
        macro_rules! take {
            ($($field:ident),*) => {
                $(if let Some(v) = &o.$field { self.$field = v.clone(); })*
            };
        }
        take!(
            alpha, tau, gamma, populations, pop_size, iterations, max_size, restarts, profiles,
            enable_mixture, enable_zeroinfl, seed
        );
        self
    }

    /// Defaults ← config file ← command-line flags ← `SDE_SEED`.
    pub fn resolve(
        file: Option<&Overrides>,
        flags: &Overrides,
        env_seed: Option<&str>,
    ) -> Result<FitSettings, ConfigError> {
        let mut s = FitSettings::default();
        if let Some(f) = file {
            s = s.apply(f);
        }
        s = s.apply(flags);
        if let Some(raw) = env_seed {
            s.seed = raw.trim().parse().map_err(|_| ConfigError::BadEnvSeed(raw.to_string()))?;
        }
        s.check()?;
        Ok(s)
    }

    fn check(&self) -> Result<(), ConfigError> {
        if !(self.alpha > 0.0) {
            return Err(ConfigError::NonPositive("alpha"));
        }
        if !(self.gamma > 0.0) {
            return Err(ConfigError::NonPositive("gamma"));
        }
        if self.populations == 0 {
            return Err(ConfigError::NonPositive("populations"));
        }
        if self.pop_size == 0 {
            return Err(ConfigError::NonPositive("pop-size"));
        }
        if self.iterations == 0 {
            return Err(ConfigError::NonPositive("iterations"));
        }
        if self.max_size == 0 {
            return Err(ConfigError::NonPositive("max-size"));
        }
        Ok(())
    }

    /// Cost profiles referenced by the `profiles` field.
    pub fn resolve_profiles(&self) -> Result<Vec<Profile>, ConfigError> {
        self.profiles
            .iter()
            .map(|name| match name.as_str() {
                "1" => Ok(Profile::profile1()),
                "2" => Ok(Profile::profile2()),
                other => {
                    Profile::by_name(other).ok_or_else(|| ConfigError::UnknownProfile(other.into()))
                }
            })
            .collect()
    }

    /// The search-engine view of these settings.
    pub fn search_config(&self) -> SearchConfig {
        SearchConfig {
            populations: self.populations,
            pop_size: self.pop_size,
            iterations: self.iterations,
            patience: self.patience,
            max_size: self.max_size,
            refit_restarts: self.restarts,
            seed: self.seed,
            enable_logaddexp: self.enable_mixture,
            enable_logdelta0: self.enable_zeroinfl,
            ..SearchConfig::default()
        }
    }

    /// JSON rendering for report embedding (flag spellings as keys).
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("settings serialize")
    }

    /// Stable FNV-1a hash of the serialized settings, for bench metadata.
    pub fn config_hash(&self) -> String {
        let text = serde_json::to_string(self).expect("settings serialize");
        format!("{:016x}", targets::subseed(0, &text))
    }
}

/// Where the counts come from: a CSV on disk, or a sampled synthetic
/// target. Exactly one.
#[derive(Clone, Debug)]
pub enum InputSource {
    CountsCsv(PathBuf),
    Synthetic { spec: DistributionSpec, samples: u64 },
}

impl InputSource {
    /// Report-embeddable description.
    pub fn describe(&self) -> BTreeMap<String, serde_json::Value> {
        let mut m = BTreeMap::new();
        match self {
            InputSource::CountsCsv(path) => {
                m.insert("input".into(), serde_json::json!(path.display().to_string()));
            }
            InputSource::Synthetic { spec, samples } => {
                m.insert("family".into(), serde_json::json!(targets::format_spec(spec)));
                m.insert("samples".into(), serde_json::json!(samples));
            }
        }
        m
    }
}

/// A fully resolved fit run.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub input: InputSource,
    pub settings: FitSettings,
    /// JSON report destination; `None` keeps the report in memory only.
    pub out: Option<PathBuf>,
    pub plot_data: Option<PathBuf>,
    pub progress: Option<PathBuf>,
}
