//! Generate a synthetic review corpus, inspect a few records and build
//! the basic corpus structures: dictionary, vectors and splits.
//!
//! ```sh
//! cargo run --example synthetic_corpus
//! ```

use revrec::corpus::{build_dictionary, split_dataset, vectorize, DictionaryConfig};
use revrec::harness::{generate_synthetic_corpus, SynthConfig};

fn main() -> revrec::Result<()> {
    let config = SynthConfig {
        n_users: 50,
        n_items: 30,
        latent_rank: 3,
        vocab_size: 30,
        noise: 0.4,
        seed: 42,
        style_tokens: true,
        reviews_per_user: 12,
    };
    let corpus = generate_synthetic_corpus(&config);
    println!("generated {} reviews from {} users", corpus.len(), config.n_users);

    for record in corpus.iter().take(3) {
        println!(
            "\n{} on {} rated {}:",
            record.user_id, record.item_id, record.rating
        );
        for sentence in &record.sentences {
            println!("  - {}", sentence.text);
        }
    }

    let split = split_dataset(corpus, 7)?;
    let (train, val, test) = split.counts();
    println!("\nsplit sizes: train={train} val={val} test={test}");

    let dict = build_dictionary(
        &split.train,
        &DictionaryConfig { max_size: 1000, min_doc_freq: 2, remove_stopwords: false },
    )?;
    println!("dictionary: {} tokens with document frequency >= 2", dict.len());

    let sample = &split.train[0];
    let vector = vectorize(&sample.tokens(), &dict);
    println!(
        "first training review activates {} of {} dictionary slots (norm {:.3})",
        vector.len_active(),
        vector.dims,
        vector.norm()
    );
    Ok(())
}
