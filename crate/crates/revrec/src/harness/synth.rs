//! Synthetic review corpora with planted structure.
//!
//! Ratings come from non-negative low-rank user/item factors plus noise,
//! quantized onto the 1-5 scale. Review texts mix sentiment words tied to
//! the rating, per-item aspect words, and (optionally) taste-cluster and
//! per-user style words, so text profiles genuinely carry rating signal.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::ReviewRecord;

const POSITIVE_WORDS: [&str; 12] = [
    "great", "excellent", "amazing", "wonderful", "perfect", "fantastic", "superb", "tasty",
    "smooth", "lovely", "crisp", "balanced",
];

const NEGATIVE_WORDS: [&str; 12] = [
    "bad", "terrible", "awful", "bland", "stale", "boring", "watery", "harsh", "weak", "flat",
    "sour", "disappointing",
];

/// Fraction of reviews whose sentiment words are drawn from a random
/// pool instead of the rating's own, leaving text-only polarity signal
/// imperfect.
const SENTIMENT_FLIP: f64 = 0.15;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthConfig {
    pub n_users: usize,
    pub n_items: usize,
    pub latent_rank: usize,
    pub vocab_size: usize,
    pub noise: f64,
    pub seed: u64,
    /// Adds taste-cluster theme words and per-user quirk words.
    pub style_tokens: bool,
    pub reviews_per_user: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_users: 60,
            n_items: 40,
            latent_rank: 4,
            vocab_size: 40,
            noise: 0.4,
            seed: 0,
            style_tokens: true,
            reviews_per_user: 12,
        }
    }
}

struct ReviewDraft {
    title: Option<String>,
    body: String,
}

fn compose_review(
    rng: &mut ChaCha8Rng,
    config: &SynthConfig,
    user: usize,
    cluster: usize,
    item: usize,
    rating: u8,
) -> ReviewDraft {
    let mut bag: Vec<String> = Vec::new();

    // sentiment words, occasionally drawn from the wrong pool
    let flipped = rng.random::<f64>() < SENTIMENT_FLIP;
    let n_sentiment = rng.random_range(2..=4);
    for _ in 0..n_sentiment {
        let positive = if flipped {
            rng.random::<f64>() < 0.5
        } else {
            match rating {
                4 | 5 => true,
                1 | 2 => false,
                _ => rng.random::<f64>() < 0.5,
            }
        };
        let pool: &[&str] = if positive { &POSITIVE_WORDS } else { &NEGATIVE_WORDS };
        bag.push(pool[rng.random_range(0..pool.len())].to_string());
    }

    // item aspect words shared by every review of the item
    for suffix in ["a", "b"] {
        if rng.random::<f64>() < 0.7 {
            bag.push(format!("aspect{item}{suffix}"));
        }
    }

    if config.style_tokens {
        for _ in 0..2 {
            bag.push(format!("theme{}x{}", cluster, rng.random_range(0..8)));
        }
        for _ in 0..rng.random_range(1..=2) {
            bag.push(format!("quirk{}x{}", user, rng.random_range(0..3)));
        }
    }

    // common background vocabulary
    for _ in 0..rng.random_range(3..=5) {
        bag.push(format!("word{}", rng.random_range(0..config.vocab_size.max(1))));
    }

    bag.shuffle(rng);

    let title = if rng.random::<f64>() < 0.5 && bag.len() > 2 {
        let n = rng.random_range(2..=3.min(bag.len()));
        Some(bag[..n].join(" "))
    } else {
        None
    };

    let n_sentences = rng.random_range(1..=3).min(bag.len().max(1));
    let per_sentence = bag.len().div_ceil(n_sentences);
    let body = bag
        .chunks(per_sentence.max(1))
        .map(|chunk| format!("{}.", chunk.join(" ")))
        .collect::<Vec<_>>()
        .join(" ");

    ReviewDraft { title, body }
}

/// Generates a deterministic corpus under the planted-factor model.
pub fn generate_synthetic_corpus(config: &SynthConfig) -> Vec<ReviewRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let rank = config.latent_rank.max(1);
    let clusters = rank;

    // Expected on- and off-cluster user factor magnitudes; the item
    // factor range is calibrated so dot products center near 3.
    let denom = 1.2 + 0.325 * (rank - 1) as f64;
    let item_mean = 3.0 / denom;
    let item_low = 0.3f64.min(item_mean);
    let item_high = 2.0 * item_mean - item_low;

    let user_clusters: Vec<usize> = (0..config.n_users).map(|_| rng.random_range(0..clusters)).collect();
    let user_factors: Vec<Vec<f64>> = (0..config.n_users)
        .map(|u| {
            (0..rank)
                .map(|d| {
                    if d == user_clusters[u] {
                        1.0 + 0.4 * rng.random::<f64>()
                    } else {
                        0.25 + 0.15 * rng.random::<f64>()
                    }
                })
                .collect()
        })
        .collect();
    let item_factors: Vec<Vec<f64>> = (0..config.n_items)
        .map(|_| {
            (0..rank)
                .map(|_| item_low + (item_high - item_low) * rng.random::<f64>())
                .collect()
        })
        .collect();

    let per_user = config.reviews_per_user.min(config.n_items).max(1);
    let mut records = Vec::with_capacity(config.n_users * per_user);
    for user in 0..config.n_users {
        let mut items: Vec<usize> = (0..config.n_items).collect();
        items.shuffle(&mut rng);
        items.truncate(per_user);
        for item in items {
            let dot: f64 = user_factors[user]
                .iter()
                .zip(&item_factors[item])
                .map(|(a, b)| a * b)
                .sum();
            let noise = (2.0 * rng.random::<f64>() - 1.0) * config.noise;
            let rating = (dot + noise).round().clamp(1.0, 5.0) as u8;
            let draft =
                compose_review(&mut rng, config, user, user_clusters[user], item, rating);
            records.push(ReviewRecord::new(
                format!("user{user:04}"),
                format!("item{item:04}"),
                rating,
                draft.title,
                draft.body,
            ));
        }
    }
    records
}
