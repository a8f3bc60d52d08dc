//! Command-line front end; all logic lives in the library.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use serde_json::json;

use revrec::autoencoder::{train as train_autoencoder, TrainingSentence};
use revrec::corpus::{
    build_dictionary, read_reviews_jsonl, select_subset, split_dataset, tokenize, vectorize,
    write_reviews_jsonl, DictionaryConfig, ReviewRecord,
};
use revrec::error::{Error, Result};
use revrec::harness::{
    compute_gains, generate_synthetic_corpus, parse_config_text, run_experiment, subset_preset,
    ExperimentConfig, ResultTable, SynthConfig,
};
use revrec::model_io::{
    load_autoencoder, load_ratings_model, load_sentiment, save_autoencoder, save_ratings_model,
    save_sentiment, AutoencoderArtifact, SentimentArtifact,
};
use revrec::ratings::{
    evaluate_mse, fit_hybrid, predict_mf, EncoderBundle, HybridSettings, ProfileKind,
};
use revrec::rouge::rouge_n;
use revrec::sentiment::{
    build_examples, evaluate_error, rating_offsets, train_combined, train_text_svm,
};
use revrec::summarizer::{
    average_length, generate_1s, generate_ct, generate_xs, global_average_length,
    review_candidates, sentence_candidates, CandidateScorer, GeneratedReview, SummaryMode,
};

#[derive(Parser)]
#[command(
    name = "revrec",
    version,
    about = "Hybrid review recommendation: ratings, generated reviews, polarity"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct DictArgs {
    /// Dictionary size cap.
    #[arg(long, default_value_t = 100_000)]
    dict_max_size: usize,
    /// Keep only tokens appearing in at least this many documents.
    #[arg(long, default_value_t = 1)]
    dict_min_doc_freq: usize,
    /// Drop stopwords from the dictionary.
    #[arg(long, default_value_t = false)]
    dict_remove_stopwords: bool,
}

impl DictArgs {
    fn config(&self) -> DictionaryConfig {
        DictionaryConfig {
            max_size: self.dict_max_size,
            min_doc_freq: self.dict_min_doc_freq,
            remove_stopwords: self.dict_remove_stopwords,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Normalize raw reviews into the unified JSONL format.
    Ingest {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Keep the most active users and most reviewed items.
    Subset {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        users: Option<usize>,
        #[arg(long)]
        items: Option<usize>,
        /// Named preset (e.g. rb_u50_i200) instead of explicit sizes.
        #[arg(long)]
        preset: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Deterministic 80/10/10 split.
    Split {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Train the hybrid rating model.
    TrainRatings {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        val: PathBuf,
        #[arg(long, default_value = "raw")]
        profile: String,
        #[arg(long, default_value_t = 16)]
        k: usize,
        #[arg(long, default_value_t = 0.05)]
        lambda_u: f64,
        #[arg(long, default_value_t = 0.05)]
        lambda_i: f64,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        iters: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Trained autoencoder file; required for the latent profile.
        #[arg(long)]
        autoencoder: Option<PathBuf>,
        #[command(flatten)]
        dict: DictArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train the sentence autoencoder.
    TrainAutoencoder {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1000)]
        coding_dim: usize,
        #[arg(long, default_value_t = 20)]
        epochs: usize,
        #[arg(long, default_value_t = 0.1)]
        lr: f64,
        #[arg(long, default_value_t = 32)]
        batch_size: usize,
        #[arg(long, default_value_t = 0.0)]
        corruption: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Autoencoder dictionary size cap.
        #[arg(long, default_value_t = 5000)]
        dict_max_size: usize,
        /// Keep only tokens appearing in at least this many documents.
        #[arg(long, default_value_t = 1)]
        dict_min_doc_freq: usize,
        /// Keep stopwords in the dictionary (dropped by default).
        #[arg(long, default_value_t = false)]
        dict_keep_stopwords: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train a polarity classifier (text-only or combined with ratings).
    TrainSentiment {
        /// `text` or `combined`.
        #[arg(long, default_value = "text")]
        mode: String,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        val: PathBuf,
        /// Fitted rating model; required in combined mode.
        #[arg(long)]
        ratings_model: Option<PathBuf>,
        /// Fixed regularization weight; omitted = validation grid search.
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long, default_value_t = 30)]
        epochs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Recenter rating predictions by -3 inside the combined score.
        #[arg(long, default_value_t = false)]
        center_f: bool,
        #[command(flatten)]
        dict: DictArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a personalized review for one pair, or a batch.
    Summarize {
        #[arg(long)]
        model: PathBuf,
        /// Training reviews: the candidate sentence source.
        #[arg(long)]
        train: PathBuf,
        #[arg(long, default_value = "xs")]
        mode: String,
        #[arg(long)]
        user: Option<String>,
        #[arg(long)]
        item: Option<String>,
        /// Word budget for xs mode; defaults to the user's average length.
        #[arg(long)]
        target_length: Option<usize>,
        /// JSONL of {user_id, item_id} pairs for batch generation.
        #[arg(long)]
        pairs: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Mean squared error of a rating model on a test set.
    EvalMse {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        test: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// ROUGE-n of generated reviews against the actual test reviews.
    EvalRouge {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        refs: PathBuf,
        /// Comma-separated n-gram orders.
        #[arg(long, default_value = "1,2,3")]
        n: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Classification error of a polarity classifier on a test set.
    EvalSentiment {
        #[arg(long)]
        clf: PathBuf,
        #[arg(long)]
        test: PathBuf,
    },
    /// Aggregate relative gains over result tables.
    Gains {
        #[arg(long, num_args = 1.., required = true)]
        tables: Vec<PathBuf>,
        #[arg(long)]
        baseline: String,
        /// Treat the metric as a score (ROUGE) instead of an error.
        #[arg(long, default_value_t = false)]
        higher_is_better: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a synthetic corpus with planted structure.
    Synth {
        #[arg(long, default_value_t = 60)]
        users: usize,
        #[arg(long, default_value_t = 40)]
        items: usize,
        #[arg(long, default_value_t = 4)]
        rank: usize,
        #[arg(long, default_value_t = 40)]
        vocab: usize,
        #[arg(long, default_value_t = 0.4)]
        noise: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 12)]
        reviews_per_user: usize,
        #[arg(long, default_value_t = false)]
        no_style_tokens: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Full pipeline from a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides run.out from the config.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Extra `section.key=value` overrides, applied after the file.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
}

fn read_records(path: &PathBuf) -> Result<Vec<ReviewRecord>> {
    let outcome = read_reviews_jsonl(path)?;
    if outcome.skipped > 0 {
        eprintln!("warning: skipped {} records with bad ratings", outcome.skipped);
    }
    Ok(outcome.records)
}

fn load_encoder_bundle(path: &PathBuf) -> Result<EncoderBundle> {
    let artifact = load_autoencoder(path)?;
    Ok(EncoderBundle { params: artifact.params, dict: artifact.dict })
}

#[derive(Deserialize)]
struct PairLine {
    user_id: String,
    item_id: String,
}

fn generated_to_json(user: &str, item: &str, mode: SummaryMode, review: &GeneratedReview) -> String {
    let sources: Vec<_> = review
        .selected
        .iter()
        .zip(&review.scores)
        .map(|(c, s)| json!({"author": c.author, "rating": c.author_rating, "score": s}))
        .collect();
    json!({
        "user": user,
        "item": item,
        "mode": mode.label().to_lowercase(),
        "text": review.text(),
        "sources": sources,
    })
    .to_string()
}

fn summarize_pair(
    model: &revrec::ratings::HybridRatingModel,
    train: &[ReviewRecord],
    user: &str,
    item: &str,
    mode: SummaryMode,
    target_length: Option<usize>,
) -> Result<GeneratedReview> {
    let scorer = CandidateScorer::for_pair(model, user, item)?;
    Ok(match mode {
        SummaryMode::SingleSentence => {
            generate_1s(&sentence_candidates(train, item, user), &scorer)
        }
        SummaryMode::CompleteText => generate_ct(&review_candidates(train, item, user), &scorer),
        SummaryMode::MultiSentence => {
            let length = target_length.unwrap_or_else(|| {
                let user_reviews: Vec<&ReviewRecord> =
                    train.iter().filter(|r| r.user_id == user).collect();
                average_length(&user_reviews, global_average_length(train))
            });
            generate_xs(&sentence_candidates(train, item, user), &scorer, length)
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Ingest { input, out } => {
            let outcome = read_reviews_jsonl(&input)?;
            write_reviews_jsonl(&out, &outcome.records)?;
            println!(
                "ingested {} records ({} skipped) -> {}",
                outcome.records.len(),
                outcome.skipped,
                out.display()
            );
            Ok(())
        }
        Command::Subset { input, users, items, preset, out } => {
            let (n_users, n_items) = match preset {
                Some(name) => subset_preset(&name)
                    .ok_or_else(|| Error::Config(format!("unknown preset '{name}'")))?,
                None => (users.unwrap_or(usize::MAX), items.unwrap_or(usize::MAX)),
            };
            let records = read_records(&input)?;
            let kept = select_subset(records, n_users, n_items);
            write_reviews_jsonl(&out, &kept)?;
            println!("kept {} records -> {}", kept.len(), out.display());
            Ok(())
        }
        Command::Split { input, seed, out_dir } => {
            let records = read_records(&input)?;
            let split = split_dataset(records, seed)?;
            fs::create_dir_all(&out_dir)?;
            write_reviews_jsonl(out_dir.join("train.jsonl"), &split.train)?;
            write_reviews_jsonl(out_dir.join("val.jsonl"), &split.validation)?;
            write_reviews_jsonl(out_dir.join("test.jsonl"), &split.test)?;
            let meta = json!({
                "seed": seed,
                "n_train": split.train.len(),
                "n_val": split.validation.len(),
                "n_test": split.test.len(),
            });
            fs::write(
                out_dir.join("split_meta.json"),
                serde_json::to_string_pretty(&meta)? + "\n",
            )?;
            println!(
                "split {}/{}/{} -> {}",
                split.train.len(),
                split.validation.len(),
                split.test.len(),
                out_dir.display()
            );
            Ok(())
        }
        Command::TrainRatings {
            input,
            val,
            profile,
            k,
            lambda_u,
            lambda_i,
            alpha,
            seed,
            iters,
            tol,
            autoencoder,
            dict,
            out,
        } => {
            let train = read_records(&input)?;
            let validation = read_records(&val)?;
            let profile: ProfileKind = profile.parse()?;
            let raw_dict = build_dictionary(&train, &dict.config())?;
            let encoder = match (profile, &autoencoder) {
                (ProfileKind::Latent, Some(path)) => Some(load_encoder_bundle(path)?),
                (ProfileKind::Latent, None) => {
                    return Err(Error::Config(
                        "--profile latent requires --autoencoder".into(),
                    ))
                }
                _ => None,
            };
            let settings = HybridSettings {
                profile,
                k,
                lambda_u,
                lambda_i,
                alpha,
                seed,
                max_iters: iters,
                tol,
            };
            let model = fit_hybrid(&train, &validation, raw_dict, encoder, settings)?;
            save_ratings_model(&out, &model)?;
            println!("trained ratings model (betas {:?}) -> {}", model.betas, out.display());
            Ok(())
        }
        Command::TrainAutoencoder {
            input,
            coding_dim,
            epochs,
            lr,
            batch_size,
            corruption,
            seed,
            dict_max_size,
            dict_min_doc_freq,
            dict_keep_stopwords,
            out,
        } => {
            let train = read_records(&input)?;
            let dict_config = DictionaryConfig {
                max_size: dict_max_size,
                min_doc_freq: dict_min_doc_freq,
                remove_stopwords: !dict_keep_stopwords,
            };
            let ae_dict = build_dictionary(&train, &dict_config)?;
            let mut samples = Vec::new();
            for record in &train {
                let count = record.sentences.len();
                if count == 0 {
                    continue;
                }
                for sentence in &record.sentences {
                    samples.push(TrainingSentence {
                        vector: vectorize(&sentence.tokens, &ae_dict),
                        weight: 1.0 / count as f64,
                    });
                }
            }
            let config = revrec::autoencoder::AutoencoderConfig {
                coding_dim,
                epochs,
                learning_rate: lr,
                batch_size,
                seed,
                corruption,
            };
            let trained = train_autoencoder(&samples, &config)?;
            println!(
                "autoencoder loss {:.4} -> {:.4} over {} epochs",
                trained.epoch_losses.first().unwrap_or(&0.0),
                trained.epoch_losses.last().unwrap_or(&0.0),
                epochs
            );
            save_autoencoder(
                &out,
                &AutoencoderArtifact { params: trained.params, dict: ae_dict, config },
            )?;
            println!("saved -> {}", out.display());
            Ok(())
        }
        Command::TrainSentiment {
            mode,
            input,
            val,
            ratings_model,
            lambda,
            epochs,
            seed,
            center_f,
            dict,
            out,
        } => {
            let train = read_records(&input)?;
            let validation = read_records(&val)?;
            let recommender = match mode.as_str() {
                "text" => None,
                "combined" => {
                    let path = ratings_model.as_ref().ok_or_else(|| {
                        Error::Config("--mode combined requires --ratings-model".into())
                    })?;
                    Some(load_ratings_model(path)?)
                }
                other => {
                    return Err(Error::Config(format!(
                        "unknown sentiment mode '{other}' (use text or combined)"
                    )))
                }
            };
            let feature_dict = match &recommender {
                Some(model) => model.raw_dict.clone(),
                None => build_dictionary(&train, &dict.config())?,
            };
            let train_ex = build_examples(&train, &feature_dict)?;
            let val_ex = build_examples(&validation, &feature_dict)?;
            let dims = feature_dict.len();
            let grid: Vec<f64> = match lambda {
                Some(l) => vec![l],
                None => vec![1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0],
            };
            let val_offsets = match &recommender {
                Some(model) => rating_offsets(&val_ex, model, center_f),
                None => vec![0.0; val_ex.len()],
            };
            let mut best = None;
            for &l in &grid {
                let clf = match &recommender {
                    Some(model) => {
                        train_combined(&train_ex, model, dims, l, epochs, seed, center_f)?
                    }
                    None => train_text_svm(&train_ex, dims, l, epochs, seed)?,
                };
                let err = evaluate_error(&clf, &val_ex, &val_offsets)?;
                if best.as_ref().map(|(e, _, _)| err < *e).unwrap_or(true) {
                    best = Some((err, l, clf));
                }
            }
            let (val_err, chosen, classifier) =
                best.ok_or_else(|| Error::Config("empty lambda grid".into()))?;
            println!("lambda {chosen} (validation error {:.2}%)", val_err * 100.0);
            save_sentiment(
                &out,
                &SentimentArtifact {
                    classifier,
                    dict: feature_dict,
                    center_offsets: center_f,
                    recommender,
                },
            )?;
            println!("saved -> {}", out.display());
            Ok(())
        }
        Command::Summarize { model, train, mode, user, item, target_length, pairs, out } => {
            let model = load_ratings_model(&model)?;
            let train = read_records(&train)?;
            let mode: SummaryMode = mode.parse()?;
            match (pairs, user, item) {
                (Some(pairs_path), _, _) => {
                    let file = fs::File::open(&pairs_path)?;
                    let out_path = out.ok_or_else(|| {
                        Error::Config("batch summarize requires --out".into())
                    })?;
                    let mut writer = BufWriter::new(fs::File::create(&out_path)?);
                    let mut count = 0usize;
                    for line in BufReader::new(file).lines() {
                        let line = line?;
                        if line.trim().is_empty() {
                            continue;
                        }
                        let pair: PairLine = serde_json::from_str(&line)
                            .map_err(|e| Error::Data(format!("bad pair line: {e}")))?;
                        let review = summarize_pair(
                            &model,
                            &train,
                            &pair.user_id,
                            &pair.item_id,
                            mode,
                            target_length,
                        )?;
                        writeln!(
                            writer,
                            "{}",
                            generated_to_json(&pair.user_id, &pair.item_id, mode, &review)
                        )?;
                        count += 1;
                    }
                    writer.flush()?;
                    println!("wrote {count} generated reviews -> {}", out_path.display());
                }
                (None, Some(user), Some(item)) => {
                    let review =
                        summarize_pair(&model, &train, &user, &item, mode, target_length)?;
                    if review.selected.is_empty() {
                        eprintln!("warning: no candidate sentences for this pair");
                    }
                    match out {
                        Some(path) => {
                            fs::write(&path, review.text() + "\n")?;
                            println!("wrote review -> {}", path.display());
                        }
                        None => println!("{}", review.text()),
                    }
                }
                _ => {
                    return Err(Error::Config(
                        "summarize needs either --pairs or both --user and --item".into(),
                    ))
                }
            }
            Ok(())
        }
        Command::EvalMse { model, test, out } => {
            let model = load_ratings_model(&model)?;
            let test = read_records(&test)?;
            let clamp = |x: f64| x.clamp(1.0, 5.0);
            let bias = &model.bias;
            let mut table = ResultTable::new("mse", "", 0, vec!["mse".into()]);
            table.push_row("mu", vec![evaluate_mse(|_, _| clamp(bias.mean), &test)?]);
            table.push_row("mu_u", vec![evaluate_mse(|u, _| clamp(bias.user_bias(u)), &test)?]);
            table.push_row("mu_i", vec![evaluate_mse(|_, i| clamp(bias.item_bias(i)), &test)?]);
            table.push_row(
                "mf",
                vec![evaluate_mse(|u, i| clamp(predict_mf(&model.factors, u, i)), &test)?],
            );
            table.push_row("hybrid", vec![evaluate_mse(|u, i| model.predict(u, i), &test)?]);
            print!("{}", table.to_text());
            if let Some(path) = out {
                fs::write(&path, table.to_csv())?;
            }
            Ok(())
        }
        Command::EvalRouge { pred, refs, n, out } => {
            let orders: Result<Vec<usize>> = n
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::Config(format!("bad n value '{s}'")))
                })
                .collect();
            let orders = orders?;
            if orders.is_empty() || orders.iter().any(|&n| !(1..=3).contains(&n)) {
                return Err(Error::Config("--n takes orders in 1..=3".into()));
            }
            let refs = read_records(&refs)?;
            let mut references: BTreeMap<(String, String), Vec<String>> = BTreeMap::new();
            for r in &refs {
                references.insert((r.user_id.clone(), r.item_id.clone()), r.tokens());
            }
            #[derive(Deserialize)]
            struct PredLine {
                user: String,
                item: String,
                mode: String,
                text: String,
            }
            let file = fs::File::open(&pred)?;
            let mut rows = Vec::new();
            let mut sums: BTreeMap<usize, f64> = BTreeMap::new();
            for line in BufReader::new(file).lines() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let p: PredLine = serde_json::from_str(&line)
                    .map_err(|e| Error::Data(format!("bad prediction line: {e}")))?;
                let key = (p.user.clone(), p.item.clone());
                let reference = references.get(&key).ok_or_else(|| {
                    Error::Data(format!("no reference review for ({}, {})", p.user, p.item))
                })?;
                let candidate = tokenize(&p.text);
                let scores: Vec<f64> = orders
                    .iter()
                    .map(|&n| rouge_n(&candidate, reference, n))
                    .collect();
                for (&n, &s) in orders.iter().zip(&scores) {
                    *sums.entry(n).or_insert(0.0) += s;
                }
                rows.push((p, scores));
            }
            if rows.is_empty() {
                return Err(Error::Data("no predictions to score".into()));
            }
            let mut csv = String::from("user,item,mode");
            for n in &orders {
                csv.push_str(&format!(",rouge_{n}"));
            }
            csv.push('\n');
            for (p, scores) in &rows {
                csv.push_str(&format!("{},{},{}", p.user, p.item, p.mode));
                for s in scores {
                    csv.push_str(&format!(",{s:.6}"));
                }
                csv.push('\n');
            }
            fs::write(&out, csv)?;
            for n in &orders {
                println!("mean rouge-{n}: {:.4}", sums[n] / rows.len() as f64);
            }
            println!("wrote {} scored rows -> {}", rows.len(), out.display());
            Ok(())
        }
        Command::EvalSentiment { clf, test } => {
            let artifact = load_sentiment(&clf)?;
            let test = read_records(&test)?;
            let examples = build_examples(&test, &artifact.dict)?;
            if examples.is_empty() {
                return Err(Error::Data(
                    "no labeled test examples after dropping rating-3 reviews".into(),
                ));
            }
            let offsets = match &artifact.recommender {
                Some(model) => rating_offsets(&examples, model, artifact.center_offsets),
                None => vec![0.0; examples.len()],
            };
            let error = evaluate_error(&artifact.classifier, &examples, &offsets)?;
            println!("classification error: {:.2}% ({} examples)", error * 100.0, examples.len());
            Ok(())
        }
        Command::Gains { tables, baseline, higher_is_better, out } => {
            let mut parsed = Vec::new();
            for path in &tables {
                let text = fs::read_to_string(path)
                    .map_err(|e| Error::Data(format!("cannot read {}: {e}", path.display())))?;
                let name = path
                    .file_stem()
                    .map(|s| s.to_string_lossy().to_string())
                    .unwrap_or_else(|| "table".into());
                parsed.push(ResultTable::from_csv(name, &text)?);
            }
            let refs: Vec<&ResultTable> = parsed.iter().collect();
            let gains = compute_gains(&refs, &baseline, higher_is_better)?;
            print!("{}", gains.to_text());
            if let Some(path) = out {
                fs::write(&path, gains.to_csv())?;
            }
            Ok(())
        }
        Command::Synth {
            users,
            items,
            rank,
            vocab,
            noise,
            seed,
            reviews_per_user,
            no_style_tokens,
            out,
        } => {
            let config = SynthConfig {
                n_users: users,
                n_items: items,
                latent_rank: rank,
                vocab_size: vocab,
                noise,
                seed,
                style_tokens: !no_style_tokens,
                reviews_per_user,
            };
            let corpus = generate_synthetic_corpus(&config);
            write_reviews_jsonl(&out, &corpus)?;
            println!("wrote {} synthetic reviews -> {}", corpus.len(), out.display());
            Ok(())
        }
        Command::Run { config, out, set } => {
            let text = fs::read_to_string(&config)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", config.display())))?;
            let pairs = parse_config_text(&text)?;
            let mut experiment = ExperimentConfig::from_pairs(&pairs)?;
            for assignment in &set {
                let (key, value) = assignment.split_once('=').ok_or_else(|| {
                    Error::Config(format!("--set expects key=value, got '{assignment}'"))
                })?;
                experiment.apply(key.trim(), value.trim())?;
            }
            if let Some(dir) = out {
                experiment.out_dir = dir;
            }
            let outputs = run_experiment(&experiment)?;
            for table in &outputs.tables {
                println!("{}", table.to_text());
            }
            println!("outputs -> {}", outputs.out_dir.display());
            Ok(())
        }
    }
}
