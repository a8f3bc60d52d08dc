//! Review ingestion, tokenization, sentence segmentation, dictionaries,
//! binary bag-of-words vectors and dataset splits.
//!
//! Everything here is deterministic: identical input bytes (and seeds, for
//! splits) produce identical structures.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::sync::OnceLock;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const STOPWORDS_FILE: &str = include_str!("../data/stopwords.txt");

fn stopwords() -> &'static HashSet<&'static str> {
    static SET: OnceLock<HashSet<&'static str>> = OnceLock::new();
    SET.get_or_init(|| {
        STOPWORDS_FILE
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .collect()
    })
}

/// Lowercases and splits on any run of non-alphanumeric characters.
pub fn tokenize(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

/// One sentence of a review: raw text plus its token sequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    pub text: String,
    pub tokens: Vec<String>,
}

impl Sentence {
    pub fn new(text: &str) -> Self {
        Sentence {
            text: text.to_string(),
            tokens: tokenize(text),
        }
    }

    pub fn word_count(&self) -> usize {
        self.tokens.len()
    }
}

/// Splits a review into sentences. The title, when present, becomes the
/// first sentence as a whole. The body is split after `.`, `!` or `?`
/// followed by whitespace or end of text; blank fragments are dropped.
pub fn segment_sentences(title: Option<&str>, body: &str) -> Vec<Sentence> {
    let mut sentences = Vec::new();
    if let Some(t) = title {
        let t = t.trim();
        if !t.is_empty() {
            sentences.push(Sentence::new(t));
        }
    }
    let chars: Vec<char> = body.chars().collect();
    let mut start = 0;
    for idx in 0..chars.len() {
        if matches!(chars[idx], '.' | '!' | '?') {
            let at_end = idx + 1 == chars.len();
            if at_end || chars[idx + 1].is_whitespace() {
                let fragment: String = chars[start..=idx].iter().collect();
                let fragment = fragment.trim();
                if !fragment.is_empty() {
                    sentences.push(Sentence::new(fragment));
                }
                start = idx + 1;
            }
        }
    }
    if start < chars.len() {
        let fragment: String = chars[start..].iter().collect();
        let fragment = fragment.trim();
        if !fragment.is_empty() {
            sentences.push(Sentence::new(fragment));
        }
    }
    sentences
}

/// One user appreciation: user, item, unified 1-5 rating and the review
/// text segmented into sentences (title first).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReviewRecord {
    pub user_id: String,
    pub item_id: String,
    pub rating: u8,
    pub title: Option<String>,
    pub body: String,
    pub sentences: Vec<Sentence>,
}

impl ReviewRecord {
    pub fn new(
        user_id: impl Into<String>,
        item_id: impl Into<String>,
        rating: u8,
        title: Option<String>,
        body: impl Into<String>,
    ) -> Self {
        let body = body.into();
        let sentences = segment_sentences(title.as_deref(), &body);
        ReviewRecord {
            user_id: user_id.into(),
            item_id: item_id.into(),
            rating,
            title,
            body,
            sentences,
        }
    }

    /// All tokens of the review in sentence order (title first).
    pub fn tokens(&self) -> Vec<String> {
        self.sentences
            .iter()
            .flat_map(|s| s.tokens.iter().cloned())
            .collect()
    }

    pub fn word_count(&self) -> usize {
        self.sentences.iter().map(Sentence::word_count).sum()
    }
}

/// Maps a raw rating from its source scale onto the unified 1-5 integer
/// scale (affine map, rounded half-up; endpoints map exactly).
pub fn normalize_rating(raw: f64, source_min: f64, source_max: f64) -> Result<u8> {
    if !(source_max > source_min) || !source_min.is_finite() || !source_max.is_finite() {
        return Err(Error::Config(format!(
            "invalid rating scale [{source_min}, {source_max}]"
        )));
    }
    if !raw.is_finite() || raw < source_min || raw > source_max {
        return Err(Error::Data(format!(
            "rating {raw} outside scale [{source_min}, {source_max}]"
        )));
    }
    let mapped = 1.0 + 4.0 * (raw - source_min) / (source_max - source_min);
    Ok(mapped.round() as u8)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DictionaryConfig {
    pub max_size: usize,
    pub min_doc_freq: usize,
    pub remove_stopwords: bool,
}

impl Default for DictionaryConfig {
    fn default() -> Self {
        DictionaryConfig {
            max_size: 100_000,
            min_doc_freq: 0,
            remove_stopwords: false,
        }
    }
}

/// Token-to-index map over a fixed vocabulary. Indices are dense,
/// assigned by decreasing document frequency with lexicographic
/// tie-breaking, so reconstruction from the same corpus is exact.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Dictionary {
    token_to_index: BTreeMap<String, u32>,
    pub config: DictionaryConfig,
}

impl Dictionary {
    pub fn len(&self) -> usize {
        self.token_to_index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.token_to_index.is_empty()
    }

    pub fn index_of(&self, token: &str) -> Option<u32> {
        self.token_to_index.get(token).copied()
    }

    pub fn tokens(&self) -> impl Iterator<Item = (&str, u32)> {
        self.token_to_index.iter().map(|(t, &i)| (t.as_str(), i))
    }

    /// Test helper: builds a dictionary from an explicit token list,
    /// assigning indices in the given order.
    pub fn from_tokens<I, S>(tokens: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let token_to_index = tokens
            .into_iter()
            .enumerate()
            .map(|(i, t)| (t.into(), i as u32))
            .collect();
        Dictionary {
            token_to_index,
            config: DictionaryConfig::default(),
        }
    }
}

/// Builds a dictionary from training records: document-frequency counts,
/// stopword and min-doc-freq filtering, then the `max_size` most frequent
/// tokens (ties broken lexicographically).
pub fn build_dictionary(records: &[ReviewRecord], config: &DictionaryConfig) -> Result<Dictionary> {
    let mut doc_freq: HashMap<&str, usize> = HashMap::new();
    for record in records {
        let mut seen: HashSet<&str> = HashSet::new();
        for sentence in &record.sentences {
            for token in &sentence.tokens {
                seen.insert(token.as_str());
            }
        }
        for token in seen {
            *doc_freq.entry(token).or_insert(0) += 1;
        }
    }
    let mut ranked: Vec<(&str, usize)> = doc_freq
        .into_iter()
        .filter(|(token, freq)| {
            *freq >= config.min_doc_freq && !(config.remove_stopwords && stopwords().contains(token))
        })
        .collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    ranked.truncate(config.max_size);
    if ranked.is_empty() {
        return Err(Error::Config(
            "dictionary is empty after frequency and stopword filtering".into(),
        ));
    }
    let token_to_index = ranked
        .into_iter()
        .enumerate()
        .map(|(i, (token, _))| (token.to_string(), i as u32))
        .collect();
    Ok(Dictionary {
        token_to_index,
        config: config.clone(),
    })
}

/// Binary bag of words over a fixed dictionary: sorted distinct indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseBinaryVector {
    pub dims: u32,
    pub active: Vec<u32>,
}

impl SparseBinaryVector {
    pub fn empty(dims: u32) -> Self {
        SparseBinaryVector { dims, active: Vec::new() }
    }

    pub fn from_indices(dims: u32, indices: impl IntoIterator<Item = u32>) -> Self {
        let mut active: Vec<u32> = indices.into_iter().collect();
        active.sort_unstable();
        active.dedup();
        debug_assert!(active.iter().all(|&i| i < dims));
        SparseBinaryVector { dims, active }
    }

    pub fn is_empty(&self) -> bool {
        self.active.is_empty()
    }

    pub fn len_active(&self) -> usize {
        self.active.len()
    }

    pub fn norm(&self) -> f64 {
        (self.active.len() as f64).sqrt()
    }

    /// Intersection size of two sorted index lists.
    pub fn dot(&self, other: &SparseBinaryVector) -> usize {
        let (mut i, mut j, mut count) = (0, 0, 0);
        while i < self.active.len() && j < other.active.len() {
            match self.active[i].cmp(&other.active[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    count += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        count
    }

    /// Cosine of two binary vectors; 0 when either is empty. The norm
    /// product is computed as one square root of an integer so that
    /// self-similarity is exactly 1.
    pub fn cosine(&self, other: &SparseBinaryVector) -> f64 {
        if self.is_empty() || other.is_empty() {
            return 0.0;
        }
        self.dot(other) as f64 / ((self.len_active() * other.len_active()) as f64).sqrt()
    }

    pub fn union(&self, other: &SparseBinaryVector) -> SparseBinaryVector {
        let mut active = Vec::with_capacity(self.active.len() + other.active.len());
        active.extend_from_slice(&self.active);
        active.extend_from_slice(&other.active);
        active.sort_unstable();
        active.dedup();
        SparseBinaryVector { dims: self.dims, active }
    }
}

/// Binary vectorization: index active iff the token occurs at least once;
/// out-of-dictionary tokens are ignored.
pub fn vectorize(tokens: &[String], dict: &Dictionary) -> SparseBinaryVector {
    let indices = tokens.iter().filter_map(|t| dict.index_of(t));
    SparseBinaryVector::from_indices(dict.len() as u32, indices)
}

/// Union bag of words of several token sequences (e.g. all sentences of a
/// document, or all documents of a user).
pub fn vectorize_all<'a>(
    token_lists: impl IntoIterator<Item = &'a [String]>,
    dict: &Dictionary,
) -> SparseBinaryVector {
    let indices = token_lists
        .into_iter()
        .flat_map(|tokens| tokens.iter().filter_map(|t| dict.index_of(t)));
    SparseBinaryVector::from_indices(dict.len() as u32, indices)
}

/// Disjoint train/validation/test partition, 80/10/10 up to rounding.
#[derive(Debug, Clone)]
pub struct DatasetSplit {
    pub train: Vec<ReviewRecord>,
    pub validation: Vec<ReviewRecord>,
    pub test: Vec<ReviewRecord>,
    pub seed: u64,
}

impl DatasetSplit {
    pub fn counts(&self) -> (usize, usize, usize) {
        (self.train.len(), self.validation.len(), self.test.len())
    }
}

/// Deterministic shuffle under `seed`, then 80/10/10 partition by position.
pub fn split_dataset(records: Vec<ReviewRecord>, seed: u64) -> Result<DatasetSplit> {
    let n = records.len();
    if n < 3 {
        return Err(Error::Data(format!(
            "need at least 3 records to split, got {n}"
        )));
    }
    let mut indices: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    indices.shuffle(&mut rng);

    let n_train = (0.8 * n as f64).round() as usize;
    let n_val = (0.1 * n as f64).round() as usize;
    let mut shuffled: Vec<Option<ReviewRecord>> = records.into_iter().map(Some).collect();
    let take = |range: std::ops::Range<usize>, shuffled: &mut Vec<Option<ReviewRecord>>| {
        indices[range]
            .iter()
            .map(|&i| shuffled[i].take().expect("index taken twice"))
            .collect::<Vec<_>>()
    };
    let train = take(0..n_train, &mut shuffled);
    let validation = take(n_train..n_train + n_val, &mut shuffled);
    let test = take(n_train + n_val..n, &mut shuffled);
    Ok(DatasetSplit { train, validation, test, seed })
}

/// Keeps the `n_users` users and `n_items` items with the most reviews
/// (ties by ascending id), then the records whose user and item both
/// survive.
pub fn select_subset(
    records: Vec<ReviewRecord>,
    n_users: usize,
    n_items: usize,
) -> Vec<ReviewRecord> {
    fn top_ids<'a>(counts: HashMap<&'a str, usize>, n: usize) -> HashSet<&'a str> {
        let mut ranked: Vec<(&str, usize)> = counts.into_iter().collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        ranked.truncate(n);
        ranked.into_iter().map(|(id, _)| id).collect()
    }

    let mut user_counts: HashMap<&str, usize> = HashMap::new();
    let mut item_counts: HashMap<&str, usize> = HashMap::new();
    for r in &records {
        *user_counts.entry(r.user_id.as_str()).or_insert(0) += 1;
        *item_counts.entry(r.item_id.as_str()).or_insert(0) += 1;
    }
    let users: HashSet<String> = top_ids(user_counts, n_users)
        .into_iter()
        .map(str::to_string)
        .collect();
    let items: HashSet<String> = top_ids(item_counts, n_items)
        .into_iter()
        .map(str::to_string)
        .collect();
    records
        .into_iter()
        .filter(|r| users.contains(&r.user_id) && items.contains(&r.item_id))
        .collect()
}

fn default_rating_min() -> f64 {
    1.0
}

fn default_rating_max() -> f64 {
    5.0
}

/// One line of the JSONL exchange format. Unknown fields are ignored.
#[derive(Debug, Deserialize)]
struct ReviewWireIn {
    user_id: String,
    item_id: String,
    rating: f64,
    #[serde(default = "default_rating_min")]
    rating_min: f64,
    #[serde(default = "default_rating_max")]
    rating_max: f64,
    #[serde(default)]
    title: Option<String>,
    text: String,
}

#[derive(Debug, Serialize)]
struct ReviewWireOut<'a> {
    user_id: &'a str,
    item_id: &'a str,
    rating: u8,
    #[serde(skip_serializing_if = "Option::is_none")]
    title: Option<&'a str>,
    text: &'a str,
}

/// Result of reading a JSONL review file: parsed records plus the number
/// of records skipped because their rating failed normalization.
#[derive(Debug)]
pub struct IngestOutcome {
    pub records: Vec<ReviewRecord>,
    pub skipped: usize,
}

pub fn parse_reviews_jsonl(reader: impl Read) -> Result<IngestOutcome> {
    let reader = BufReader::new(reader);
    let mut records = Vec::new();
    let mut skipped = 0usize;
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let wire: ReviewWireIn = serde_json::from_str(&line).map_err(|e| {
            Error::Data(format!("line {}: malformed review: {e}", lineno + 1))
        })?;
        match normalize_rating(wire.rating, wire.rating_min, wire.rating_max) {
            Ok(rating) => records.push(ReviewRecord::new(
                wire.user_id,
                wire.item_id,
                rating,
                wire.title,
                wire.text,
            )),
            Err(_) => skipped += 1,
        }
    }
    Ok(IngestOutcome { records, skipped })
}

pub fn read_reviews_jsonl(path: impl AsRef<Path>) -> Result<IngestOutcome> {
    let file = File::open(path.as_ref()).map_err(|e| {
        Error::Data(format!("cannot open {}: {e}", path.as_ref().display()))
    })?;
    parse_reviews_jsonl(file)
}

pub fn write_reviews_jsonl(path: impl AsRef<Path>, records: &[ReviewRecord]) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for r in records {
        let wire = ReviewWireOut {
            user_id: &r.user_id,
            item_id: &r.item_id,
            rating: r.rating,
            title: r.title.as_deref(),
            text: &r.body,
        };
        serde_json::to_writer(&mut out, &wire)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}
