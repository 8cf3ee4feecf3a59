use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agent::DqnConfig;
use crate::environment::EnvConfig;
use crate::lp::PivotRule;
use crate::problem::Overrides;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config: {0}")]
    Io(#[from] std::io::Error),
    #[error("config syntax: {0}")]
    Syntax(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

/// Everything a proving run needs. Mirrors the TOML config file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub episodes: usize,
    /// End training at the first verified certificate.
    pub stop_on_proof: bool,
    pub solver: PivotRule,
    pub env: EnvConfig,
    pub dqn: DqnConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 7,
            episodes: 50,
            stop_on_proof: true,
            solver: PivotRule::Bland,
            env: EnvConfig::default(),
            dqn: DqnConfig::default(),
        }
    }
}

/// Optional settings layered over a [`RunConfig`], from a problem file or
/// the command line.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConfigPatch {
    pub seed: Option<u64>,
    pub max_steps: Option<usize>,
    pub episodes: Option<usize>,
    pub hidden: Option<usize>,
    pub layers: Option<usize>,
    pub discount: Option<f64>,
    pub lr: Option<f64>,
    pub batch: Option<usize>,
    pub capacity: Option<usize>,
    pub target_sync: Option<usize>,
    pub eps_penalty: Option<f64>,
    pub lemma_degree_cap: Option<u32>,
}

impl From<&Overrides> for ConfigPatch {
    fn from(o: &Overrides) -> Self {
        Self {
            hidden: o.hidden,
            layers: o.layers,
            max_steps: o.max_steps,
            episodes: o.episodes,
            lemma_degree_cap: o.lemma_degree_cap,
            ..Self::default()
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let c: RunConfig = toml::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn patched(mut self, p: &ConfigPatch) -> Self {
        macro_rules! set {
            ($field:expr, $value:expr) => {
                if let Some(v) = $value {
                    $field = v;
                }
            };
        }
        set!(self.seed, p.seed);
        set!(self.env.max_steps, p.max_steps);
        set!(self.episodes, p.episodes);
        set!(self.dqn.hidden, p.hidden);
        set!(self.dqn.layers, p.layers);
        set!(self.dqn.discount, p.discount);
        set!(self.dqn.optimizer.lr, p.lr);
        set!(self.dqn.batch, p.batch);
        set!(self.dqn.capacity, p.capacity);
        set!(self.dqn.target_sync, p.target_sync);
        set!(self.env.eps_penalty, p.eps_penalty);
        if p.lemma_degree_cap.is_some() {
            self.env.lemma_degree_cap = p.lemma_degree_cap;
        }
        self
    }

    /// `self`, then the problem's own overrides, then `cli`.
    pub fn resolve(&self, problem: &Overrides, cli: &ConfigPatch) -> Result<Self, ConfigError> {
        let c = self.clone().patched(&problem.into()).patched(cli);
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |msg: &str| Err(ConfigError::Invalid(msg.to_string()));
        let d = &self.dqn;
        if self.env.max_steps == 0 {
            return bad("max_steps must be positive");
        }
        if d.hidden == 0 || d.batch == 0 || d.capacity == 0 || d.target_sync == 0 {
            return bad("hidden, batch, capacity and target_sync must be positive");
        }
        if !(0.0..=1.0).contains(&d.discount) {
            return bad("discount must lie in [0, 1]");
        }
        if !(d.optimizer.lr > 0.0 && d.optimizer.lr.is_finite()) {
            return bad("lr must be positive");
        }
        for e in [d.eps_start, d.eps_end, d.eps_decay_fraction] {
            if !(0.0..=1.0).contains(&e) {
                return bad("epsilon settings must lie in [0, 1]");
            }
        }
        if !(self.env.success_tol >= 0.0 && self.env.reward_tol >= 0.0) {
            return bad("tolerances must be non-negative");
        }
        Ok(())
    }
}
