//! Plain-text config files: one `key = value` per line, `#` comments and
//! blank lines allowed. Strict mode — unknown or duplicate keys are
//! errors, and every type error names the key and line.
//!
//! Keys: r, gain, use_cluster, mean_xt, mean_yt, mean_xc, mean_yc,
//! engine, mc_samples, mc_seed. Missing keys fall back to the defaults
//! (r = 0.35, gain = 1.0, use_cluster = true, means 0, engine = both).
//! Command-line flags override file values.

use std::fmt;
use std::path::Path;

use cvcx::{EngineChoice, ExperimentConfig, Gains, McSettings};

pub const KNOWN_KEYS: [&str; 10] = [
    "r",
    "gain",
    "use_cluster",
    "mean_xt",
    "mean_yt",
    "mean_xc",
    "mean_yc",
    "engine",
    "mc_samples",
    "mc_seed",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConfigError {
    Syntax { line: usize, content: String },
    UnknownKey { line: usize, key: String },
    DuplicateKey { line: usize, key: String },
    BadValue { line: usize, key: String, message: String },
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Syntax { line, content } => {
                write!(f, "line {line}: expected `key = value`, got `{content}`")
            }
            ConfigError::UnknownKey { line, key } => {
                write!(
                    f,
                    "line {line}: unknown key `{key}` (known keys: {})",
                    KNOWN_KEYS.join(", ")
                )
            }
            ConfigError::DuplicateKey { line, key } => {
                write!(f, "line {line}: key `{key}` set twice")
            }
            ConfigError::BadValue { line, key, message } => {
                write!(f, "line {line}: bad value for `{key}`: {message}")
            }
        }
    }
}

impl std::error::Error for ConfigError {}

/// The keys a config file actually set.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FileConfig {
    pub r: Option<f64>,
    pub gain: Option<f64>,
    pub use_cluster: Option<bool>,
    pub mean_xt: Option<f64>,
    pub mean_yt: Option<f64>,
    pub mean_xc: Option<f64>,
    pub mean_yc: Option<f64>,
    pub engine: Option<EngineChoice>,
    pub mc_samples: Option<u64>,
    pub mc_seed: Option<u64>,
}

impl FileConfig {
    /// Overlay the file values onto a config (defaults or an earlier layer).
    pub fn apply_to(&self, config: &mut ExperimentConfig) {
        if let Some(r) = self.r {
            config.r = r;
        }
        if let Some(g) = self.gain {
            config.gains = Gains::uniform(g);
        }
        if let Some(u) = self.use_cluster {
            config.use_cluster = u;
        }
        if let Some(v) = self.mean_xt {
            config.input_means.xt = v;
        }
        if let Some(v) = self.mean_yt {
            config.input_means.yt = v;
        }
        if let Some(v) = self.mean_xc {
            config.input_means.xc = v;
        }
        if let Some(v) = self.mean_yc {
            config.input_means.yc = v;
        }
        if let Some(e) = self.engine {
            config.engine = e;
        }
        match (self.mc_samples, self.mc_seed, &mut config.mc) {
            (None, None, _) => {}
            (samples, seed, Some(mc)) => {
                if let Some(s) = samples {
                    mc.samples = s;
                }
                if let Some(s) = seed {
                    mc.seed = s;
                }
            }
            (samples, seed, mc @ None) => {
                *mc = Some(McSettings {
                    samples: samples.unwrap_or(1_000_000),
                    seed: seed.unwrap_or(0),
                });
            }
        }
    }
}

/// Parse config text. Never panics on malformed input.
pub fn parse_config_str(text: &str) -> Result<FileConfig, ConfigError> {
    let mut out = FileConfig::default();
    let mut seen: Vec<&str> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let content = content.trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = match content.split_once('=') {
            Some((k, v)) => (k.trim(), v.trim()),
            None => {
                return Err(ConfigError::Syntax {
                    line,
                    content: content.to_string(),
                })
            }
        };
        let Some(&known) = KNOWN_KEYS.iter().find(|&&k| k == key) else {
            return Err(ConfigError::UnknownKey {
                line,
                key: key.to_string(),
            });
        };
        if seen.contains(&known) {
            return Err(ConfigError::DuplicateKey {
                line,
                key: key.to_string(),
            });
        }
        seen.push(known);
        match known {
            "r" => {
                let v = parse_float(line, key, value)?;
                if v < 0.0 {
                    return Err(ConfigError::BadValue {
                        line,
                        key: key.to_string(),
                        message: format!("squeezing parameter must be nonnegative, got {v}"),
                    });
                }
                out.r = Some(v);
            }
            "gain" => out.gain = Some(parse_float(line, key, value)?),
            "use_cluster" => out.use_cluster = Some(parse_bool(line, key, value)?),
            "mean_xt" => out.mean_xt = Some(parse_float(line, key, value)?),
            "mean_yt" => out.mean_yt = Some(parse_float(line, key, value)?),
            "mean_xc" => out.mean_xc = Some(parse_float(line, key, value)?),
            "mean_yc" => out.mean_yc = Some(parse_float(line, key, value)?),
            "engine" => out.engine = Some(parse_engine(line, key, value)?),
            "mc_samples" => out.mc_samples = Some(parse_u64(line, key, value)?),
            "mc_seed" => out.mc_seed = Some(parse_u64(line, key, value)?),
            _ => unreachable!("key list covered above"),
        }
    }
    Ok(out)
}

/// Parse a config file from disk.
pub fn parse_config_file(path: &Path) -> anyhow::Result<FileConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| anyhow::anyhow!("cannot read config {}: {e}", path.display()))?;
    parse_config_str(&text).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))
}

fn parse_float(line: usize, key: &str, value: &str) -> Result<f64, ConfigError> {
    let v: f64 = value.parse().map_err(|_| ConfigError::BadValue {
        line,
        key: key.to_string(),
        message: format!("expected a number, got `{value}`"),
    })?;
    if !v.is_finite() {
        return Err(ConfigError::BadValue {
            line,
            key: key.to_string(),
            message: format!("value must be finite, got `{value}`"),
        });
    }
    Ok(v)
}

fn parse_bool(line: usize, key: &str, value: &str) -> Result<bool, ConfigError> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(ConfigError::BadValue {
            line,
            key: key.to_string(),
            message: format!("expected true or false, got `{value}`"),
        }),
    }
}

fn parse_u64(line: usize, key: &str, value: &str) -> Result<u64, ConfigError> {
    value.parse().map_err(|_| ConfigError::BadValue {
        line,
        key: key.to_string(),
        message: format!("expected a nonnegative integer, got `{value}`"),
    })
}

fn parse_engine(line: usize, key: &str, value: &str) -> Result<EngineChoice, ConfigError> {
    match value {
        "covariance" => Ok(EngineChoice::Covariance),
        "heisenberg" => Ok(EngineChoice::Heisenberg),
        "both" => Ok(EngineChoice::Both),
        _ => Err(ConfigError::BadValue {
            line,
            key: key.to_string(),
            message: format!("expected covariance, heisenberg, or both, got `{value}`"),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_keeps_all_defaults() {
        let fc = parse_config_str("").unwrap();
        assert_eq!(fc, FileConfig::default());
        let mut config = ExperimentConfig::default();
        fc.apply_to(&mut config);
        assert_eq!(config.r, 0.35);
        assert_eq!(config.gains, Gains::uniform(1.0));
        assert!(config.use_cluster);
    }

    #[test]
    fn scalar_gain_broadcasts() {
        let fc = parse_config_str("gain = 0.95\n").unwrap();
        let mut config = ExperimentConfig::default();
        fc.apply_to(&mut config);
        assert_eq!(config.gains, Gains::uniform(0.95));
    }

    #[test]
    fn negative_r_names_the_constraint() {
        let err = parse_config_str("r = -1").unwrap_err();
        match err {
            ConfigError::BadValue { line, key, message } => {
                assert_eq!((line, key.as_str()), (1, "r"));
                assert!(message.contains("nonnegative"), "{message}");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn unknown_key_rejected_with_line() {
        let err = parse_config_str("r = 0.2\nbogus = 7\n").unwrap_err();
        assert_eq!(
            err,
            ConfigError::UnknownKey {
                line: 2,
                key: "bogus".into()
            }
        );
    }

    #[test]
    fn type_error_names_key_and_line() {
        let err = parse_config_str("\n# comment\nmean_xc = fast\n").unwrap_err();
        match err {
            ConfigError::BadValue { line, key, .. } => {
                assert_eq!((line, key.as_str()), (3, "mean_xc"));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn duplicate_key_rejected() {
        let err = parse_config_str("r = 0.1\nr = 0.2\n").unwrap_err();
        assert!(matches!(err, ConfigError::DuplicateKey { line: 2, .. }));
    }

    #[test]
    fn comments_and_whitespace_ignored() {
        let fc = parse_config_str("  r = 0.5  # operating point\n\nengine = heisenberg\n").unwrap();
        assert_eq!(fc.r, Some(0.5));
        assert_eq!(fc.engine, Some(EngineChoice::Heisenberg));
    }

    #[test]
    fn mc_keys_fill_settings() {
        let fc = parse_config_str("mc_samples = 5000\nmc_seed = 42\n").unwrap();
        let mut config = ExperimentConfig::default();
        fc.apply_to(&mut config);
        assert_eq!(
            config.mc,
            Some(McSettings {
                samples: 5000,
                seed: 42
            })
        );
    }
}
