//! Generate personalized reviews for one (user, item) pair with the
//! three selection procedures and compare them to a random baseline.
//!
//! ```sh
//! cargo run --example generate_reviews
//! ```

use revrec::corpus::{build_dictionary, split_dataset, DictionaryConfig};
use revrec::harness::{generate_synthetic_corpus, SynthConfig};
use revrec::ratings::{fit_hybrid, HybridSettings};
use revrec::rouge::rouge_n;
use revrec::summarizer::{
    average_length, generate_1s, generate_ct, generate_random, generate_xs,
    global_average_length, review_candidates, sentence_candidates, CandidateScorer, SummaryMode,
};

fn main() -> revrec::Result<()> {
    let corpus = generate_synthetic_corpus(&SynthConfig {
        n_users: 60,
        n_items: 40,
        latent_rank: 4,
        vocab_size: 40,
        noise: 0.4,
        seed: 9,
        style_tokens: true,
        reviews_per_user: 15,
    });
    let split = split_dataset(corpus, 9)?;
    let dict = build_dictionary(
        &split.train,
        &DictionaryConfig { max_size: 100_000, min_doc_freq: 1, remove_stopwords: false },
    )?;
    let model = fit_hybrid(
        &split.train,
        &split.validation,
        dict,
        None,
        HybridSettings { k: 4, lambda_u: 0.5, lambda_i: 0.5, ..HybridSettings::default() },
    )?;

    // a test pair whose item has candidate sentences from other users
    let target = split
        .test
        .iter()
        .find(|r| {
            split
                .train
                .iter()
                .any(|t| t.item_id == r.item_id && t.user_id != r.user_id)
        })
        .expect("a pair with candidates");
    let (user, item) = (target.user_id.as_str(), target.item_id.as_str());
    println!("target pair: {user} x {item}");
    println!(
        "predicted rating {:.2}, actual {}\n",
        model.predict(user, item),
        target.rating
    );

    let sentences = sentence_candidates(&split.train, item, user);
    let reviews = review_candidates(&split.train, item, user);
    println!("{} candidate sentences, {} candidate reviews", sentences.len(), reviews.len());

    let scorer = CandidateScorer::for_pair(&model, user, item)?;
    let user_reviews: Vec<_> = split.train.iter().filter(|r| r.user_id == user).collect();
    let budget = average_length(&user_reviews, global_average_length(&split.train));
    println!("word budget from the user's average review length: {budget}\n");

    let single = generate_1s(&sentences, &scorer);
    let complete = generate_ct(&reviews, &scorer);
    let greedy = generate_xs(&sentences, &scorer, budget);
    let random = generate_random(&sentences, SummaryMode::MultiSentence, budget, 1234, &model.raw_dict);

    let reference = target.tokens();
    for (label, review) in [
        ("1S best sentence", &single),
        ("CT best review", &complete),
        ("XS greedy", &greedy),
        ("XS random baseline", &random),
    ] {
        println!("{label} (ROUGE-1 {:.3}):", rouge_n(&review.tokens(), &reference, 1));
        println!("  \"{}\"", review.text());
        for (candidate, score) in review.selected.iter().zip(&review.scores) {
            println!(
                "    from {} (rated {}), selection score {:.3}",
                candidate.author, candidate.author_rating, score
            );
        }
        println!();
    }
    println!("actual review written by the user:\n  \"{}\"", target.body);
    Ok(())
}
