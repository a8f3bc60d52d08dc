//! Train the five-component hybrid rating predictor and compare its test
//! error against the single-component baselines.
//!
//! ```sh
//! cargo run --example rating_prediction
//! ```

use revrec::corpus::{build_dictionary, split_dataset, DictionaryConfig};
use revrec::harness::{generate_synthetic_corpus, SynthConfig};
use revrec::ratings::{evaluate_mse, fit_hybrid, predict_mf, HybridSettings, ProfileKind};

fn main() -> revrec::Result<()> {
    let corpus = generate_synthetic_corpus(&SynthConfig {
        n_users: 120,
        n_items: 80,
        latent_rank: 4,
        vocab_size: 50,
        noise: 0.5,
        seed: 3,
        style_tokens: true,
        reviews_per_user: 25,
    });
    let split = split_dataset(corpus, 3)?;
    let dict = build_dictionary(
        &split.train,
        &DictionaryConfig { max_size: 100_000, min_doc_freq: 1, remove_stopwords: false },
    )?;

    let model = fit_hybrid(
        &split.train,
        &split.validation,
        dict,
        None,
        HybridSettings {
            profile: ProfileKind::Raw,
            k: 4,
            lambda_u: 0.5,
            lambda_i: 0.5,
            alpha: 1.0,
            seed: 3,
            max_iters: 150,
            tol: 1e-7,
        },
    )?;
    println!("combination weights fitted on validation: {:?}\n", model.betas);

    let clamp = |x: f64| x.clamp(1.0, 5.0);
    let bias = &model.bias;
    let rows: Vec<(&str, f64)> = vec![
        ("overall mean", evaluate_mse(|_, _| clamp(bias.mean), &split.test)?),
        ("user mean", evaluate_mse(|u, _| clamp(bias.user_bias(u)), &split.test)?),
        ("item mean", evaluate_mse(|_, i| clamp(bias.item_bias(i)), &split.test)?),
        (
            "matrix factorization",
            evaluate_mse(|u, i| clamp(predict_mf(&model.factors, u, i)), &split.test)?,
        ),
        ("hybrid (text profiles)", evaluate_mse(|u, i| model.predict(u, i), &split.test)?),
    ];
    println!("test MSE per predictor:");
    for (name, mse) in &rows {
        println!("  {name:<24} {mse:.4}");
    }

    let sample = &split.test[0];
    println!(
        "\nsample prediction for ({}, {}): {:.2} (actual {})",
        sample.user_id,
        sample.item_id,
        model.predict(&sample.user_id, &sample.item_id),
        sample.rating
    );
    let components = model.component_vector(&sample.user_id, &sample.item_id);
    println!("  components  mu={:.2} mu_u={:.2} mu_i={:.2} mf={:.2} text={:.2}",
        components[0], components[1], components[2], components[3], components[4]);
    Ok(())
}
