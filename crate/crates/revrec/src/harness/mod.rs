//! Experiment harness: configuration, synthetic corpora, result tables
//! and the end-to-end pipeline behind the `revrec` command-line tool.

pub mod config;
pub mod pipeline;
pub mod synth;
pub mod tables;

pub use config::{parse_config_text, subset_preset, ExperimentConfig, ProfileSelection};
pub use pipeline::{run_experiment, stage_seed, RunOutputs};
pub use synth::{generate_synthetic_corpus, SynthConfig};
pub use tables::{compute_gains, ResultTable};
