//! Model persistence: self-describing JSON files whose round trip
//! reproduces predictions bit for bit at double precision.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::autoencoder::{AutoencoderConfig, AutoencoderParams};
use crate::corpus::Dictionary;
use crate::error::{Error, Result};
use crate::ratings::HybridRatingModel;
use crate::sentiment::LinearClassifier;

const RATINGS_FORMAT: &str = "revrec/ratings";
const AUTOENCODER_FORMAT: &str = "revrec/autoencoder";
const SENTIMENT_FORMAT: &str = "revrec/sentiment";
const VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Envelope<T> {
    format: String,
    version: u32,
    payload: T,
}

fn save<T: Serialize>(path: &Path, format: &str, payload: &T) -> Result<()> {
    let envelope = Envelope {
        format: format.to_string(),
        version: VERSION,
        payload,
    };
    let mut out = BufWriter::new(File::create(path)?);
    serde_json::to_writer(&mut out, &envelope)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(())
}

fn load<T: DeserializeOwned>(path: &Path, format: &str) -> Result<T> {
    let file = File::open(path)
        .map_err(|e| Error::Data(format!("cannot open {}: {e}", path.display())))?;
    let envelope: Envelope<T> = serde_json::from_reader(BufReader::new(file))?;
    if envelope.format != format {
        return Err(Error::Data(format!(
            "{} holds '{}', expected '{format}'",
            path.display(),
            envelope.format
        )));
    }
    if envelope.version != VERSION {
        return Err(Error::Data(format!(
            "unsupported model version {}",
            envelope.version
        )));
    }
    Ok(envelope.payload)
}

pub fn save_ratings_model(path: impl AsRef<Path>, model: &HybridRatingModel) -> Result<()> {
    save(path.as_ref(), RATINGS_FORMAT, model)
}

pub fn load_ratings_model(path: impl AsRef<Path>) -> Result<HybridRatingModel> {
    load(path.as_ref(), RATINGS_FORMAT)
}

/// Persisted autoencoder: parameters, the dictionary its inputs use and
/// the training configuration that produced it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AutoencoderArtifact {
    pub params: AutoencoderParams,
    pub dict: Dictionary,
    pub config: AutoencoderConfig,
}

pub fn save_autoencoder(path: impl AsRef<Path>, artifact: &AutoencoderArtifact) -> Result<()> {
    save(path.as_ref(), AUTOENCODER_FORMAT, artifact)
}

pub fn load_autoencoder(path: impl AsRef<Path>) -> Result<AutoencoderArtifact> {
    load(path.as_ref(), AUTOENCODER_FORMAT)
}

/// Persisted polarity classifier. Combined classifiers embed the frozen
/// rating model so that evaluation needs no extra files.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SentimentArtifact {
    pub classifier: LinearClassifier,
    pub dict: Dictionary,
    pub center_offsets: bool,
    pub recommender: Option<HybridRatingModel>,
}

pub fn save_sentiment(path: impl AsRef<Path>, artifact: &SentimentArtifact) -> Result<()> {
    save(path.as_ref(), SENTIMENT_FORMAT, artifact)
}

pub fn load_sentiment(path: impl AsRef<Path>) -> Result<SentimentArtifact> {
    load(path.as_ref(), SENTIMENT_FORMAT)
}
