//! The whole experiment in one call: corpus, split, all models, the
//! three evaluations and aggregated gains, written to an output tree.
//!
//! ```sh
//! cargo run --example full_pipeline
//! ```

use revrec::harness::{run_experiment, ExperimentConfig};

fn main() -> revrec::Result<()> {
    let config = ExperimentConfig::from_text(
        "\
synth.users = 40
synth.items = 30
synth.rank = 3
synth.vocab = 30
synth.reviews_per_user = 15
run.seed = 7
run.profile = both
run.out = target/full_pipeline_out
corpus.raw_min_doc_freq = 1
corpus.ae_min_doc_freq = 1
nmf.k = 4
nmf.lambda_u = 0.5
nmf.lambda_i = 0.5
nmf.iters = 80
autoencoder.coding_dim = 12
autoencoder.epochs = 10
summarizer.max_eval_pairs = 30
sentiment.epochs = 20
sentiment.lambda_grid = 0.001, 0.01, 0.1, 1.0
",
    )?;
    let outputs = run_experiment(&config)?;
    for table in &outputs.tables {
        println!("{}", table.to_text());
    }
    println!("full output tree under {}", outputs.out_dir.display());
    Ok(())
}
