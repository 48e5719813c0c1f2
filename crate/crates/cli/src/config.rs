use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use stancenet::ingest::DEFAULT_LEMMAS;
use stancenet::lingstats::{StatsConfig, DEFAULT_ALPHA};
use stancenet::propagation::{Accumulation, PropagationConfig, DEFAULT_GAMMA};

use crate::Overrides;

/// Every knob of a run. Relative paths in a config file are resolved
/// against the file's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub input: Vec<PathBuf>,
    pub seeds: Option<PathBuf>,
    /// Lexicon config; the built-in lexicon when absent.
    pub lexicons: Option<PathBuf>,
    pub gamma: u64,
    pub alpha: f64,
    pub lemmas: Vec<String>,
    pub out: PathBuf,
    pub min_user_tweets: usize,
    pub raw_denominators: bool,
    pub literal_dilution: bool,
    pub dedup_for_networks: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            input: Vec::new(),
            seeds: None,
            lexicons: None,
            gamma: DEFAULT_GAMMA,
            alpha: DEFAULT_ALPHA,
            lemmas: DEFAULT_LEMMAS.iter().map(|s| s.to_string()).collect(),
            out: PathBuf::from("out"),
            min_user_tweets: 1,
            raw_denominators: false,
            literal_dilution: false,
            dedup_for_networks: false,
        }
    }
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let mut config: PipelineConfig =
            toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new(""));
        let rebase = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        config.input.iter_mut().for_each(rebase);
        config.seeds.iter_mut().for_each(rebase);
        config.lexicons.iter_mut().for_each(rebase);
        rebase(&mut config.out);
        Ok(config)
    }

    /// Config file (if any) with command-line flags on top.
    pub fn resolve(overrides: &Overrides) -> Result<Self> {
        let mut config = match &overrides.config {
            Some(path) => Self::load(path)?,
            None => Self::default(),
        };
        if !overrides.input.is_empty() {
            config.input = overrides.input.clone();
        }
        if let Some(seeds) = &overrides.seeds {
            config.seeds = Some(seeds.clone());
        }
        if let Some(lexicons) = &overrides.lexicons {
            config.lexicons = Some(lexicons.clone());
        }
        if let Some(gamma) = overrides.gamma {
            config.gamma = gamma;
        }
        if let Some(alpha) = overrides.alpha {
            config.alpha = alpha;
        }
        if let Some(out) = &overrides.out {
            config.out = out.clone();
        }
        config.raw_denominators |= overrides.raw_denominators;
        config.literal_dilution |= overrides.literal_dilution;
        config.dedup_for_networks |= overrides.dedup_for_networks;
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<()> {
        if self.gamma < 1 {
            bail!("gamma must be at least 1, got {}", self.gamma);
        }
        self.stats().validate()?;
        if self.lemmas.iter().any(|l| l.trim().is_empty()) {
            bail!("lemmas must be non-empty strings");
        }
        Ok(())
    }

    pub fn require_input(&self) -> Result<()> {
        if self.input.is_empty() {
            bail!("no input files; pass --input or set `input` in the config");
        }
        for path in &self.input {
            if !path.is_file() {
                bail!("input file {} does not exist", path.display());
            }
        }
        Ok(())
    }

    pub fn require_seeds(&self) -> Result<&Path> {
        match &self.seeds {
            None => bail!("no seed file; pass --seeds or set `seeds` in the config"),
            Some(p) if !p.is_file() => bail!("seed file {} does not exist", p.display()),
            Some(p) => Ok(p),
        }
    }

    pub fn propagation(&self) -> PropagationConfig {
        PropagationConfig {
            gamma: self.gamma,
            accumulation: if self.literal_dilution {
                Accumulation::LiteralDilution
            } else {
                Accumulation::LabeledOnly
            },
        }
    }

    pub fn stats(&self) -> StatsConfig {
        StatsConfig {
            alpha: self.alpha,
            min_user_tweets: self.min_user_tweets,
        }
    }
}
