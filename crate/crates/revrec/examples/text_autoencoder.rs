//! Train the tied-weight sentence autoencoder and use its latent codes
//! to compare user text profiles.
//!
//! ```sh
//! cargo run --example text_autoencoder
//! ```

use revrec::autoencoder::{decode, encode, train, AutoencoderConfig, TrainingSentence};
use revrec::corpus::{build_dictionary, vectorize, DictionaryConfig};
use revrec::harness::{generate_synthetic_corpus, SynthConfig};
use revrec::ratings::{build_text_profile, similarity_latent, ProfileKind, TextProfile};

fn main() -> revrec::Result<()> {
    let corpus = generate_synthetic_corpus(&SynthConfig {
        n_users: 40,
        n_items: 25,
        latent_rank: 3,
        vocab_size: 30,
        noise: 0.4,
        seed: 5,
        style_tokens: true,
        reviews_per_user: 12,
    });
    let dict = build_dictionary(
        &corpus,
        &DictionaryConfig { max_size: 5000, min_doc_freq: 3, remove_stopwords: true },
    )?;

    // one sample per sentence, weighted by 1/sentences-in-review
    let mut samples = Vec::new();
    for record in &corpus {
        let weight = 1.0 / record.sentences.len().max(1) as f64;
        for sentence in &record.sentences {
            samples.push(TrainingSentence {
                vector: vectorize(&sentence.tokens, &dict),
                weight,
            });
        }
    }
    println!("training on {} sentences over a {}-word dictionary", samples.len(), dict.len());

    let trained = train(
        &samples,
        &AutoencoderConfig {
            coding_dim: 16,
            epochs: 80,
            learning_rate: 0.1,
            batch_size: 32,
            seed: 1,
            corruption: 0.0,
        },
    )?;
    println!(
        "reconstruction loss: {:.2} -> {:.2} after {} epochs",
        trained.epoch_losses[0],
        trained.epoch_losses.last().unwrap(),
        trained.epoch_losses.len() - 1
    );

    // reconstruction separates present from absent words
    let mut active_prob = 0.0;
    let mut inactive_prob = 0.0;
    let mut active_n = 0usize;
    let mut inactive_n = 0usize;
    for sample in samples.iter().take(100) {
        let code = encode(&trained.params, &sample.vector)?;
        let reconstruction = decode(&trained.params, &code)?;
        for (idx, &p) in reconstruction.iter().enumerate() {
            if sample.vector.active.binary_search(&(idx as u32)).is_ok() {
                active_prob += p;
                active_n += 1;
            } else {
                inactive_prob += p;
                inactive_n += 1;
            }
        }
    }
    println!(
        "mean reconstruction: present words {:.3}, absent words {:.3}",
        active_prob / active_n as f64,
        inactive_prob / inactive_n as f64
    );

    // sentence codes: overlapping sentences land closer in latent space
    // than disjoint ones
    let sentences = [
        "great excellent smooth balanced",
        "excellent smooth lovely great",
        "awful watery bland stale",
    ];
    let codes: Vec<_> = sentences
        .iter()
        .map(|text| {
            let vector = vectorize(&revrec::corpus::tokenize(text), &dict);
            encode(&trained.params, &vector)
        })
        .collect::<revrec::Result<_>>()?;
    let dist = |a: &ndarray::Array1<f64>, b: &ndarray::Array1<f64>| -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
    };
    println!("\nlatent distances between sentence codes:");
    println!("  positive vs positive: {:.4}", dist(&codes[0], &codes[1]));
    println!("  positive vs negative: {:.4}", dist(&codes[0], &codes[2]));

    // user profiles encode the union of everything the user wrote
    let profile_of = |user: &str| -> revrec::Result<TextProfile> {
        let records: Vec<_> = corpus.iter().filter(|r| r.user_id == user).collect();
        build_text_profile(&records, ProfileKind::Latent, &dict, Some(&trained.params), 1.0)
    };
    let a = profile_of(&corpus[0].user_id)?;
    let b = profile_of(&corpus[30].user_id)?;
    println!(
        "\nprofile similarity 1/(alpha + distance): self {:.4}, other {:.4}",
        similarity_latent(&a, &a)?,
        similarity_latent(&a, &b)?
    );
    Ok(())
}
