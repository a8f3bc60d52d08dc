//! Experiment configuration: a plain-text `section.key = value` format
//! with one-to-one command-line twins; command-line values win.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::autoencoder::AutoencoderConfig;
use crate::corpus::DictionaryConfig;
use crate::error::{Error, Result};
use crate::harness::synth::SynthConfig;

/// Which hybrid models an experiment trains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileSelection {
    None,
    Raw,
    Latent,
    Both,
}

impl ProfileSelection {
    pub fn wants_raw(&self) -> bool {
        matches!(self, ProfileSelection::Raw | ProfileSelection::Both)
    }

    pub fn wants_latent(&self) -> bool {
        matches!(self, ProfileSelection::Latent | ProfileSelection::Both)
    }
}

impl std::str::FromStr for ProfileSelection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(ProfileSelection::None),
            "raw" => Ok(ProfileSelection::Raw),
            "latent" => Ok(ProfileSelection::Latent),
            "both" => Ok(ProfileSelection::Both),
            other => Err(Error::Config(format!("unknown profile selection '{other}'"))),
        }
    }
}

/// Named dataset subset presets: requested (users, items) sizes.
pub fn subset_preset(name: &str) -> Option<(usize, usize)> {
    match name {
        "rb_u50_i200" => Some((50, 200)),
        "rb_u500_i2k" => Some((500, 2000)),
        "rb_u5k_i20k" => Some((5000, 20000)),
        "a_u200_i120" => Some((200, 120)),
        "a_u2k_i1k" => Some((2000, 1000)),
        "a_u20k_i12k" => Some((20000, 12000)),
        "a_u210k_i120k" => Some((210000, 120000)),
        _ => None,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub input: Option<PathBuf>,
    pub synth: Option<SynthConfig>,
    pub subset: Option<(usize, usize)>,
    pub seed: u64,
    pub profile: ProfileSelection,
    pub raw_dict: DictionaryConfig,
    pub ae_dict: DictionaryConfig,
    pub nmf_k: usize,
    pub nmf_lambda_u: f64,
    pub nmf_lambda_i: f64,
    pub nmf_iters: usize,
    pub nmf_tol: f64,
    pub alpha: f64,
    pub autoencoder: AutoencoderConfig,
    pub summarizer_enabled: bool,
    pub max_eval_pairs: usize,
    pub sentiment_enabled: bool,
    pub sentiment_epochs: usize,
    pub sentiment_lambda_grid: Vec<f64>,
    pub center_f: bool,
    /// Not part of the serialized experiment description: the written
    /// config echo must be identical wherever the run lands.
    #[serde(skip)]
    pub out_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            input: None,
            synth: None,
            subset: None,
            seed: 0,
            profile: ProfileSelection::Raw,
            raw_dict: DictionaryConfig {
                max_size: 100_000,
                min_doc_freq: 10,
                remove_stopwords: false,
            },
            ae_dict: DictionaryConfig {
                max_size: 5000,
                min_doc_freq: 0,
                remove_stopwords: true,
            },
            nmf_k: 16,
            nmf_lambda_u: 0.05,
            nmf_lambda_i: 0.05,
            nmf_iters: 200,
            nmf_tol: 1e-6,
            alpha: 1.0,
            autoencoder: AutoencoderConfig::default(),
            summarizer_enabled: true,
            max_eval_pairs: 50,
            sentiment_enabled: true,
            sentiment_epochs: 30,
            sentiment_lambda_grid: vec![1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0],
            center_f: false,
            out_dir: PathBuf::from("revrec_out"),
        }
    }
}

/// Parses `key = value` lines; `#` starts a comment, blank lines are
/// ignored. Later assignments overwrite earlier ones.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>> {
    let mut pairs = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Config(format!(
                "config line {}: expected 'key = value', got '{raw}'",
                lineno + 1
            )));
        };
        pairs.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(pairs)
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse::<T>()
        .map_err(|_| Error::Config(format!("invalid value '{value}' for key '{key}'")))
}

impl ExperimentConfig {
    /// Applies one `section.key = value` assignment.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "corpus.input" => self.input = Some(PathBuf::from(value)),
            "corpus.raw_max_size" => self.raw_dict.max_size = parse(key, value)?,
            "corpus.raw_min_doc_freq" => self.raw_dict.min_doc_freq = parse(key, value)?,
            "corpus.raw_remove_stopwords" => self.raw_dict.remove_stopwords = parse(key, value)?,
            "corpus.ae_max_size" => self.ae_dict.max_size = parse(key, value)?,
            "corpus.ae_min_doc_freq" => self.ae_dict.min_doc_freq = parse(key, value)?,
            "corpus.ae_remove_stopwords" => self.ae_dict.remove_stopwords = parse(key, value)?,
            "subset.users" => {
                let users = parse(key, value)?;
                let items = self.subset.map(|(_, i)| i).unwrap_or(usize::MAX);
                self.subset = Some((users, items));
            }
            "subset.items" => {
                let items = parse(key, value)?;
                let users = self.subset.map(|(u, _)| u).unwrap_or(usize::MAX);
                self.subset = Some((users, items));
            }
            "subset.preset" => {
                self.subset = Some(subset_preset(value).ok_or_else(|| {
                    Error::Config(format!("unknown subset preset '{value}'"))
                })?);
            }
            "synth.users" => self.synth_mut().n_users = parse(key, value)?,
            "synth.items" => self.synth_mut().n_items = parse(key, value)?,
            "synth.rank" => self.synth_mut().latent_rank = parse(key, value)?,
            "synth.vocab" => self.synth_mut().vocab_size = parse(key, value)?,
            "synth.noise" => self.synth_mut().noise = parse(key, value)?,
            "synth.style_tokens" => self.synth_mut().style_tokens = parse(key, value)?,
            "synth.reviews_per_user" => self.synth_mut().reviews_per_user = parse(key, value)?,
            "run.seed" => self.seed = parse(key, value)?,
            "run.profile" => self.profile = parse(key, value)?,
            "run.out" => self.out_dir = PathBuf::from(value),
            "nmf.k" => self.nmf_k = parse(key, value)?,
            "nmf.lambda_u" => self.nmf_lambda_u = parse(key, value)?,
            "nmf.lambda_i" => self.nmf_lambda_i = parse(key, value)?,
            "nmf.iters" => self.nmf_iters = parse(key, value)?,
            "nmf.tol" => self.nmf_tol = parse(key, value)?,
            "ratings.alpha" => self.alpha = parse(key, value)?,
            "autoencoder.coding_dim" => self.autoencoder.coding_dim = parse(key, value)?,
            "autoencoder.epochs" => self.autoencoder.epochs = parse(key, value)?,
            "autoencoder.learning_rate" => self.autoencoder.learning_rate = parse(key, value)?,
            "autoencoder.batch_size" => self.autoencoder.batch_size = parse(key, value)?,
            "autoencoder.corruption" => self.autoencoder.corruption = parse(key, value)?,
            "summarizer.enabled" => self.summarizer_enabled = parse(key, value)?,
            "summarizer.max_eval_pairs" => self.max_eval_pairs = parse(key, value)?,
            "sentiment.enabled" => self.sentiment_enabled = parse(key, value)?,
            "sentiment.epochs" => self.sentiment_epochs = parse(key, value)?,
            "sentiment.lambda_grid" => {
                let grid: Result<Vec<f64>> =
                    value.split(',').map(|v| parse(key, v.trim())).collect();
                let grid = grid?;
                if grid.is_empty() {
                    return Err(Error::Config("sentiment.lambda_grid is empty".into()));
                }
                self.sentiment_lambda_grid = grid;
            }
            "sentiment.center_f" => self.center_f = parse(key, value)?,
            other => {
                return Err(Error::Config(format!("unknown config key '{other}'")));
            }
        }
        Ok(())
    }

    fn synth_mut(&mut self) -> &mut SynthConfig {
        self.synth.get_or_insert_with(SynthConfig::default)
    }

    pub fn from_pairs(pairs: &BTreeMap<String, String>) -> Result<Self> {
        let mut config = ExperimentConfig::default();
        for (key, value) in pairs {
            config.apply(key, value)?;
        }
        Ok(config)
    }

    pub fn from_text(text: &str) -> Result<Self> {
        Self::from_pairs(&parse_config_text(text)?)
    }
}
