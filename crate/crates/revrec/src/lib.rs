//! Hybrid review recommendation toolkit.
//!
//! Three user-facing predictions built from review corpora:
//!
//! - **Ratings** — a five-component predictor combining global/user/item
//!   means, masked non-negative matrix factorization and a text-profile
//!   similarity term, with weights fitted on validation data
//!   ([`ratings`]).
//! - **Review text** — personalized extractive summaries assembled from
//!   sentences other users wrote about the item, scored by profile and
//!   rating similarity ([`summarizer`]), evaluated with recall-oriented
//!   ROUGE-n ([`rouge`]).
//! - **Polarity** — a hinge-loss text classifier optionally combined with
//!   the rating predictor ([`sentiment`]).
//!
//! [`corpus`] handles ingestion, tokenization, dictionaries and splits;
//! [`autoencoder`] provides the latent text representation; [`harness`]
//! wires everything into a reproducible experiment pipeline behind the
//! `revrec` command-line tool. Runnable walkthroughs for each capability
//! live in the crate's `examples/` directory.

pub mod autoencoder;
pub mod corpus;
pub mod error;
pub mod harness;
pub mod model_io;
pub mod ratings;
pub mod rouge;
pub mod sentiment;
pub mod summarizer;

pub use error::{Error, Result};
