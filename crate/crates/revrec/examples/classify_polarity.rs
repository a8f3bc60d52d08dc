//! Polarity classification: a text-only hinge classifier versus the
//! combined model that adds the rating predictor's output to the score.
//!
//! ```sh
//! cargo run --example classify_polarity
//! ```

use revrec::corpus::{build_dictionary, split_dataset, DictionaryConfig};
use revrec::harness::{generate_synthetic_corpus, SynthConfig};
use revrec::ratings::{fit_hybrid, HybridSettings};
use revrec::sentiment::{
    build_examples, evaluate_error, predict_polarity, rating_offsets, train_combined,
    train_text_svm,
};

fn main() -> revrec::Result<()> {
    let corpus = generate_synthetic_corpus(&SynthConfig {
        n_users: 100,
        n_items: 60,
        latent_rank: 4,
        vocab_size: 50,
        noise: 0.5,
        seed: 2,
        style_tokens: true,
        reviews_per_user: 20,
    });
    let split = split_dataset(corpus, 2)?;
    let dict = build_dictionary(
        &split.train,
        &DictionaryConfig { max_size: 100_000, min_doc_freq: 1, remove_stopwords: false },
    )?;
    let recommender = fit_hybrid(
        &split.train,
        &split.validation,
        dict.clone(),
        None,
        HybridSettings { k: 4, lambda_u: 0.5, lambda_i: 0.5, ..HybridSettings::default() },
    )?;

    // ratings 1-2 become negative, 4-5 positive, 3 is dropped
    let train_ex = build_examples(&split.train, &dict)?;
    let test_ex = build_examples(&split.test, &dict)?;
    println!(
        "{} train / {} test labeled examples after dropping neutral reviews",
        train_ex.len(),
        test_ex.len()
    );

    let lambda = 0.01;
    let text = train_text_svm(&train_ex, dict.len(), lambda, 30, 0)?;
    let combined = train_combined(&train_ex, &recommender, dict.len(), lambda, 30, 0, false)?;

    let zero = vec![0.0; test_ex.len()];
    let offsets = rating_offsets(&test_ex, &recommender, false);
    println!(
        "text-only test error: {:.2}%",
        evaluate_error(&text, &test_ex, &zero)? * 100.0
    );
    println!(
        "combined test error:  {:.2}%",
        evaluate_error(&combined, &test_ex, &offsets)? * 100.0
    );

    let example = &test_ex[0];
    let offset = recommender.predict(&example.user, &example.item);
    println!(
        "\nsample: actual {:?}, text-only {:?}, combined {:?} (rating prediction {:.2})",
        example.label,
        predict_polarity(&text, &example.features, 0.0),
        predict_polarity(&combined, &example.features, offset),
        offset
    );
    Ok(())
}
