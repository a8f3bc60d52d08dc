//! ROUGE-n scoring basics, plus the metric-optimizing oracle selectors
//! that bound what any selection procedure can reach.
//!
//! ```sh
//! cargo run --example rouge_scoring
//! ```

use revrec::corpus::{tokenize, Sentence};
use revrec::rouge::rouge_n;
use revrec::summarizer::{generate_oracle, Candidate, SummaryMode};

fn main() {
    let reference = tokenize("The beer pours a deep amber color with a thick head");

    for (candidate, label) in [
        ("The beer pours a deep amber color with a thick head", "identical"),
        ("deep amber color and a thick head on this beer", "paraphrase"),
        ("terrible service at the hotel", "unrelated"),
    ] {
        let tokens = tokenize(candidate);
        println!("{label}:");
        for n in 1..=3 {
            println!("  ROUGE-{n} = {:.3}", rouge_n(&tokens, &reference, n));
        }
    }

    // recall orientation: padding the candidate never hurts
    let short = tokenize("deep amber");
    let padded = tokenize("deep amber plus many extra unrelated words here");
    println!(
        "\nrecall orientation: short {:.3}, padded {:.3}",
        rouge_n(&short, &reference, 1),
        rouge_n(&padded, &reference, 1)
    );

    // oracle selection: pick the candidate that maximizes ROUGE-1
    let pool: Vec<Candidate> = [
        ("alice", 4, "the color is a deep amber"),
        ("bob", 2, "i did not enjoy this at all"),
        ("carol", 5, "thick head and a wonderful amber pour"),
    ]
    .into_iter()
    .map(|(author, rating, text)| Candidate {
        sentence: Sentence::new(text),
        author: author.to_string(),
        author_rating: rating,
        item: "beer".to_string(),
        position: 0,
    })
    .collect();
    let best = generate_oracle(&pool, &reference, 1, SummaryMode::SingleSentence, 0);
    println!(
        "\noracle pick: \"{}\" by {} (ROUGE-1 {:.3})",
        best.text(),
        best.selected[0].author,
        best.scores[0]
    );
}
