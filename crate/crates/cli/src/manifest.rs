//! Run manifests: every emitted report embeds the command, the resolved
//! configuration, engine versions, seed, timestamp, and output paths, so
//! a report is reproducible from its own header.

use cvcx::ExperimentConfig;

#[derive(Debug, Clone)]
pub struct RunManifest {
    pub command: String,
    pub config: ExperimentConfig,
    pub version: String,
    pub seed: Option<u64>,
    pub rng: Option<String>,
    pub timestamp: String,
    pub output_paths: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str, config: &ExperimentConfig) -> Self {
        Self {
            command: command.to_string(),
            config: config.clone(),
            version: format!("cvcx {}", env!("CARGO_PKG_VERSION")),
            seed: None,
            rng: None,
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            output_paths: Vec::new(),
        }
    }

    pub fn with_seed(mut self, seed: u64, rng: &str) -> Self {
        self.seed = Some(seed);
        self.rng = Some(rng.to_string());
        self
    }

    pub fn record_output(&mut self, path: &str) {
        self.output_paths.push(path.to_string());
    }

    /// Key-value lines embedded at the top of every report.
    pub fn lines(&self) -> Vec<(String, String)> {
        let c = &self.config;
        let mut out = vec![
            ("command".into(), self.command.clone()),
            ("version".into(), self.version.clone()),
            ("engine".into(), c.engine.name().into()),
            ("timestamp".into(), self.timestamp.clone()),
            ("r".into(), c.r.to_string()),
            ("gain_xt".into(), c.gains.xt.to_string()),
            ("gain_yt".into(), c.gains.yt.to_string()),
            ("gain_xc".into(), c.gains.xc.to_string()),
            ("gain_yc".into(), c.gains.yc.to_string()),
            ("use_cluster".into(), c.use_cluster.to_string()),
            ("mean_xt".into(), c.input_means.xt.to_string()),
            ("mean_yt".into(), c.input_means.yt.to_string()),
            ("mean_xc".into(), c.input_means.xc.to_string()),
            ("mean_yc".into(), c.input_means.yc.to_string()),
        ];
        if let Some(seed) = self.seed {
            out.push(("seed".into(), seed.to_string()));
        }
        if let Some(rng) = &self.rng {
            out.push(("rng".into(), rng.clone()));
        }
        if !self.output_paths.is_empty() {
            out.push(("outputs".into(), self.output_paths.join(";")));
        }
        out
    }
}
