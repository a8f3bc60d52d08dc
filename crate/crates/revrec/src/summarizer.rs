//! Personalized extractive review generation.
//!
//! Candidates are sentences (or whole reviews) that other users wrote
//! about the target item. Each is scored by the average of a text
//! similarity against the target user's profile and a rating similarity
//! against the predicted rating; three procedures select from the pool:
//! best single sentence, best complete review, and greedy multi-sentence
//! selection with a diversity penalty. Random and metric-optimizing
//! selectors with the same control flow serve as evaluation bounds.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::autoencoder::{encode, AutoencoderParams};
use crate::corpus::{vectorize, Dictionary, ReviewRecord, Sentence, SparseBinaryVector};
use crate::error::{Error, Result};
use crate::ratings::{HybridRatingModel, TextProfile};
use crate::rouge::rouge_n;

/// Generation procedure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SummaryMode {
    /// Best single sentence.
    SingleSentence,
    /// Best complete review, treated as one long sentence.
    CompleteText,
    /// Greedy multi-sentence selection up to a target length.
    MultiSentence,
}

impl SummaryMode {
    pub fn label(&self) -> &'static str {
        match self {
            SummaryMode::SingleSentence => "1S",
            SummaryMode::CompleteText => "CT",
            SummaryMode::MultiSentence => "XS",
        }
    }
}

impl std::str::FromStr for SummaryMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "1s" => Ok(SummaryMode::SingleSentence),
            "ct" => Ok(SummaryMode::CompleteText),
            "xs" => Ok(SummaryMode::MultiSentence),
            other => Err(Error::Config(format!("unknown summary mode '{other}'"))),
        }
    }
}

/// One selectable unit: a sentence (or whole review) written by another
/// user about the target item.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub sentence: Sentence,
    pub author: String,
    pub author_rating: u8,
    pub item: String,
    /// Sentence index within the author's review; 0 for whole reviews.
    pub position: usize,
}

/// An assembled review: the selected candidates in selection order plus
/// the criterion value each selection achieved.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedReview {
    pub selected: Vec<Candidate>,
    pub mode: SummaryMode,
    pub scores: Vec<f64>,
    pub target_length: usize,
    /// True when the pool ran out before the target length was reached
    /// (or was empty to begin with).
    pub pool_exhausted: bool,
}

impl GeneratedReview {
    pub fn text(&self) -> String {
        self.selected
            .iter()
            .map(|c| c.sentence.text.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn word_count(&self) -> usize {
        self.selected.iter().map(|c| c.sentence.tokens.len()).sum()
    }

    pub fn tokens(&self) -> Vec<String> {
        self.selected
            .iter()
            .flat_map(|c| c.sentence.tokens.iter().cloned())
            .collect()
    }
}

/// Sentence-level candidate pool for an item: training reviews only,
/// excluding the target user's own sentences, in training order.
pub fn sentence_candidates(
    train: &[ReviewRecord],
    item: &str,
    exclude_user: &str,
) -> Vec<Candidate> {
    train
        .iter()
        .filter(|r| r.item_id == item && r.user_id != exclude_user)
        .flat_map(|r| {
            r.sentences.iter().enumerate().map(|(position, sentence)| Candidate {
                sentence: sentence.clone(),
                author: r.user_id.clone(),
                author_rating: r.rating,
                item: r.item_id.clone(),
                position,
            })
        })
        .collect()
}

/// Whole-review candidate pool: each review becomes one long sentence.
pub fn review_candidates(
    train: &[ReviewRecord],
    item: &str,
    exclude_user: &str,
) -> Vec<Candidate> {
    train
        .iter()
        .filter(|r| r.item_id == item && r.user_id != exclude_user)
        .map(|r| {
            let text = r
                .sentences
                .iter()
                .map(|s| s.text.as_str())
                .collect::<Vec<_>>()
                .join(" ");
            Candidate {
                sentence: Sentence { text, tokens: r.tokens() },
                author: r.user_id.clone(),
                author_rating: r.rating,
                item: r.item_id.clone(),
                position: 0,
            }
        })
        .collect()
}

/// Rating similarity `1 / (1 + |r - r_hat|)` between a candidate's actual
/// rating and the predicted rating for the target pair.
pub fn rating_similarity(r_other: u8, r_hat: f64) -> f64 {
    1.0 / (1.0 + (r_other as f64 - r_hat).abs())
}

/// Scores candidates for one (user, item) pair: the mean of the text
/// similarity against the target profile and the rating similarity
/// against the predicted rating.
pub struct CandidateScorer<'a> {
    profile: Option<&'a TextProfile>,
    raw_dict: &'a Dictionary,
    encoder: Option<&'a AutoencoderParams>,
    ae_dict: Option<&'a Dictionary>,
    alpha: f64,
    r_hat: f64,
}

impl<'a> CandidateScorer<'a> {
    pub fn new(
        profile: Option<&'a TextProfile>,
        raw_dict: &'a Dictionary,
        encoder: Option<&'a AutoencoderParams>,
        ae_dict: Option<&'a Dictionary>,
        alpha: f64,
        r_hat: f64,
    ) -> Result<Self> {
        if let Some(TextProfile::Latent { .. }) = profile {
            if encoder.is_none() || ae_dict.is_none() {
                return Err(Error::Config(
                    "scoring against a latent profile requires the autoencoder and its dictionary"
                        .into(),
                ));
            }
        }
        Ok(CandidateScorer { profile, raw_dict, encoder, ae_dict, alpha, r_hat })
    }

    /// Scorer for a (user, item) pair backed by a fitted rating model:
    /// the user's stored profile and the model's clamped prediction.
    pub fn for_pair(model: &'a HybridRatingModel, user: &str, item: &str) -> Result<Self> {
        let profile = model.profiles.get(user);
        let (encoder, ae_dict) = match &model.encoder {
            Some(bundle) => (Some(&bundle.params), Some(&bundle.dict)),
            None => (None, None),
        };
        CandidateScorer::new(
            profile,
            &model.raw_dict,
            encoder,
            ae_dict,
            model.settings.alpha,
            model.predict(user, item),
        )
    }

    pub fn r_hat(&self) -> f64 {
        self.r_hat
    }

    /// Text similarity of a token sequence against the target profile,
    /// with the sentence vectorized as a one-document profile. Missing
    /// and empty raw profiles score 0.
    pub fn text_similarity(&self, tokens: &[String]) -> f64 {
        match self.profile {
            None => 0.0,
            Some(TextProfile::Raw(profile)) => {
                vectorize(tokens, self.raw_dict).cosine(profile)
            }
            Some(TextProfile::Latent { vector, .. }) => {
                let encoder = self.encoder.expect("validated at construction");
                let ae_dict = self.ae_dict.expect("validated at construction");
                let code = encode(encoder, &vectorize(tokens, ae_dict))
                    .expect("dictionary and encoder dimensions agree");
                let dist = code
                    .iter()
                    .zip(vector)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                1.0 / (self.alpha + dist)
            }
        }
    }

    pub fn score(&self, candidate: &Candidate) -> f64 {
        (self.text_similarity(&candidate.sentence.tokens)
            + rating_similarity(candidate.author_rating, self.r_hat))
            / 2.0
    }
}

/// Average of the two similarities for one candidate.
pub fn score_candidate(candidate: &Candidate, scorer: &CandidateScorer) -> f64 {
    scorer.score(candidate)
}

/// Index of the best-scoring live candidate; exact score ties broken by
/// ascending (author, sentence position).
fn best_index(candidates: &[Candidate], alive: &[usize], scores: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for &idx in alive {
        match best {
            None => best = Some(idx),
            Some(b) => {
                let better = scores[idx] > scores[b]
                    || (scores[idx] == scores[b]
                        && (candidates[idx].author.as_str(), candidates[idx].position)
                            < (candidates[b].author.as_str(), candidates[b].position));
                if better {
                    best = Some(idx);
                }
            }
        }
    }
    best
}

fn empty_review(mode: SummaryMode, target_length: usize) -> GeneratedReview {
    GeneratedReview {
        selected: Vec::new(),
        mode,
        scores: Vec::new(),
        target_length,
        pool_exhausted: true,
    }
}

fn single_from_scores(
    candidates: &[Candidate],
    scores: &[f64],
    mode: SummaryMode,
) -> GeneratedReview {
    let alive: Vec<usize> = (0..candidates.len()).collect();
    match best_index(candidates, &alive, scores) {
        None => empty_review(mode, 0),
        Some(idx) => GeneratedReview {
            selected: vec![candidates[idx].clone()],
            mode,
            scores: vec![scores[idx]],
            target_length: 0,
            pool_exhausted: false,
        },
    }
}

/// Greedy selection: the plain best candidate first, then repeatedly the
/// candidate maximizing its score minus the cosine overlap with the text
/// selected so far, until the target word count is reached or the pool
/// runs out.
fn greedy_from_scores(
    candidates: &[Candidate],
    scores: &[f64],
    target_length: usize,
    dict: &Dictionary,
) -> GeneratedReview {
    if candidates.is_empty() {
        return empty_review(SummaryMode::MultiSentence, target_length);
    }
    let vectors: Vec<SparseBinaryVector> = candidates
        .iter()
        .map(|c| vectorize(&c.sentence.tokens, dict))
        .collect();
    let mut alive: Vec<usize> = (0..candidates.len()).collect();
    let first = best_index(candidates, &alive, scores).expect("pool is non-empty");
    alive.retain(|&i| i != first);

    let mut selected = vec![candidates[first].clone()];
    let mut picked_scores = vec![scores[first]];
    let mut accumulated = vectors[first].clone();
    let mut words = candidates[first].sentence.tokens.len();
    let mut pool_exhausted = false;
    while words < target_length {
        if alive.is_empty() {
            pool_exhausted = true;
            break;
        }
        let penalized: Vec<f64> = candidates
            .iter()
            .enumerate()
            .map(|(i, _)| scores[i] - vectors[i].cosine(&accumulated))
            .collect();
        let pick = best_index(candidates, &alive, &penalized).expect("alive is non-empty");
        alive.retain(|&i| i != pick);
        selected.push(candidates[pick].clone());
        picked_scores.push(penalized[pick]);
        accumulated = accumulated.union(&vectors[pick]);
        words += candidates[pick].sentence.tokens.len();
    }
    GeneratedReview {
        selected,
        mode: SummaryMode::MultiSentence,
        scores: picked_scores,
        target_length,
        pool_exhausted,
    }
}

/// Best single sentence by the combined similarity score.
pub fn generate_1s(candidates: &[Candidate], scorer: &CandidateScorer) -> GeneratedReview {
    let scores: Vec<f64> = candidates.iter().map(|c| scorer.score(c)).collect();
    single_from_scores(candidates, &scores, SummaryMode::SingleSentence)
}

/// Best complete review; callers pass whole-review candidates from
/// [`review_candidates`].
pub fn generate_ct(reviews: &[Candidate], scorer: &CandidateScorer) -> GeneratedReview {
    let scores: Vec<f64> = reviews.iter().map(|c| scorer.score(c)).collect();
    single_from_scores(reviews, &scores, SummaryMode::CompleteText)
}

/// Greedy multi-sentence selection with a binary bag-of-words diversity
/// penalty against the text selected so far.
pub fn generate_xs(
    candidates: &[Candidate],
    scorer: &CandidateScorer,
    target_length: usize,
) -> GeneratedReview {
    let scores: Vec<f64> = candidates.iter().map(|c| scorer.score(c)).collect();
    greedy_from_scores(candidates, &scores, target_length, scorer.raw_dict)
}

/// Baseline with the scoring function replaced by seeded uniform noise;
/// the control flow of the requested mode is unchanged.
pub fn generate_random(
    candidates: &[Candidate],
    mode: SummaryMode,
    target_length: usize,
    seed: u64,
    dict: &Dictionary,
) -> GeneratedReview {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scores: Vec<f64> = candidates.iter().map(|_| rng.random::<f64>()).collect();
    match mode {
        SummaryMode::SingleSentence | SummaryMode::CompleteText => {
            single_from_scores(candidates, &scores, mode)
        }
        SummaryMode::MultiSentence => greedy_from_scores(candidates, &scores, target_length, dict),
    }
}

/// Evaluation-time selector that directly optimizes ROUGE-n against the
/// reference review. Single modes take the exact argmax; the greedy mode
/// uses forward selection of the accumulated score, which is not
/// guaranteed optimal.
pub fn generate_oracle(
    candidates: &[Candidate],
    reference_tokens: &[String],
    n: usize,
    mode: SummaryMode,
    target_length: usize,
) -> GeneratedReview {
    match mode {
        SummaryMode::SingleSentence | SummaryMode::CompleteText => {
            let scores: Vec<f64> = candidates
                .iter()
                .map(|c| rouge_n(&c.sentence.tokens, reference_tokens, n))
                .collect();
            single_from_scores(candidates, &scores, mode)
        }
        SummaryMode::MultiSentence => {
            if candidates.is_empty() {
                return empty_review(mode, target_length);
            }
            let first_scores: Vec<f64> = candidates
                .iter()
                .map(|c| rouge_n(&c.sentence.tokens, reference_tokens, n))
                .collect();
            let mut alive: Vec<usize> = (0..candidates.len()).collect();
            let first = best_index(candidates, &alive, &first_scores).expect("non-empty pool");
            alive.retain(|&i| i != first);
            let mut selected = vec![candidates[first].clone()];
            let mut picked_scores = vec![first_scores[first]];
            let mut accumulated = candidates[first].sentence.tokens.clone();
            let mut words = accumulated.len();
            let mut pool_exhausted = false;
            while words < target_length {
                if alive.is_empty() {
                    pool_exhausted = true;
                    break;
                }
                let extended: Vec<f64> = candidates
                    .iter()
                    .map(|c| {
                        let mut tokens = accumulated.clone();
                        tokens.extend(c.sentence.tokens.iter().cloned());
                        rouge_n(&tokens, reference_tokens, n)
                    })
                    .collect();
                let pick = best_index(candidates, &alive, &extended).expect("alive non-empty");
                alive.retain(|&i| i != pick);
                selected.push(candidates[pick].clone());
                picked_scores.push(extended[pick]);
                accumulated.extend(candidates[pick].sentence.tokens.iter().cloned());
                words = accumulated.len();
            }
            GeneratedReview {
                selected,
                mode,
                scores: picked_scores,
                target_length,
                pool_exhausted,
            }
        }
    }
}

/// Mean word count of the user's training reviews, rounded half-up;
/// users without training reviews fall back to the provided global mean.
pub fn average_length(user_reviews: &[&ReviewRecord], global_mean: usize) -> usize {
    if user_reviews.is_empty() {
        return global_mean;
    }
    let total: usize = user_reviews.iter().map(|r| r.word_count()).sum();
    (total as f64 / user_reviews.len() as f64).round() as usize
}

/// Mean word count over a whole training set, rounded half-up.
pub fn global_average_length(train: &[ReviewRecord]) -> usize {
    if train.is_empty() {
        return 0;
    }
    let total: usize = train.iter().map(|r| r.word_count()).sum();
    (total as f64 / train.len() as f64).round() as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::tokenize;

    fn dict8() -> Dictionary {
        Dictionary::from_tokens(["w0", "w1", "w2", "w3", "w4", "w5", "w6", "w7"])
    }

    fn candidate(author: &str, rating: u8, position: usize, text: &str) -> Candidate {
        Candidate {
            sentence: Sentence::new(text),
            author: author.to_string(),
            author_rating: rating,
            item: "item".to_string(),
            position,
        }
    }

    fn raw_profile(tokens: &str, dict: &Dictionary) -> TextProfile {
        TextProfile::Raw(vectorize(&tokenize(tokens), dict))
    }

    #[test]
    fn rating_similarity_examples() {
        assert_eq!(rating_similarity(4, 4.0), 1.0);
        assert_eq!(rating_similarity(1, 5.0), 0.2);
        assert_eq!(rating_similarity(3, 4.5), 0.4);
    }

    #[test]
    fn score_is_the_mean_of_the_two_similarities() {
        let dict = dict8();
        // sentence has 5 dictionary words, profile 5, sharing 3: cosine 0.6
        let profile = raw_profile("w0 w1 w2 w3 w4", &dict);
        let scorer =
            CandidateScorer::new(Some(&profile), &dict, None, None, 1.0, 3.0).unwrap();
        let c = candidate("a", 4, 0, "w0 w1 w2 w5 w6");
        assert_eq!(scorer.text_similarity(&c.sentence.tokens), 0.6);
        assert_eq!(rating_similarity(4, 3.0), 0.5);
        assert!((scorer.score(&c) - 0.55).abs() < 1e-15);
    }

    #[test]
    fn empty_profile_scores_only_the_rating_term() {
        let dict = dict8();
        let profile = TextProfile::Raw(SparseBinaryVector::empty(dict.len() as u32));
        let scorer =
            CandidateScorer::new(Some(&profile), &dict, None, None, 1.0, 4.0).unwrap();
        let c = candidate("a", 4, 0, "w0 w1");
        assert_eq!(scorer.score(&c), 0.5); // sigma_r = 1, sigma_t = 0
    }

    #[test]
    fn missing_profile_behaves_like_no_text_information() {
        let dict = dict8();
        let scorer = CandidateScorer::new(None, &dict, None, None, 1.0, 4.0).unwrap();
        let c = candidate("a", 2, 0, "w0 w1");
        assert_eq!(scorer.score(&c), rating_similarity(2, 4.0) / 2.0);
    }

    #[test]
    fn scores_stay_in_unit_interval_for_raw_profiles() {
        let dict = dict8();
        let profile = raw_profile("w0 w3 w5", &dict);
        let scorer =
            CandidateScorer::new(Some(&profile), &dict, None, None, 1.0, 2.5).unwrap();
        for rating in 1..=5u8 {
            for text in ["w0", "w0 w1 w2 w3", "w6 w7", ""] {
                let c = candidate("a", rating, 0, text);
                let h = scorer.score(&c);
                assert!((0.0..=1.0).contains(&h), "h = {h}");
            }
        }
    }

    #[test]
    fn single_sentence_selects_the_single_candidate() {
        let dict = dict8();
        let scorer = CandidateScorer::new(None, &dict, None, None, 1.0, 5.0).unwrap();
        let pool = vec![candidate("a", 3, 0, "w0 w1")];
        let review = generate_1s(&pool, &scorer);
        assert_eq!(review.selected.len(), 1);
        assert!(!review.pool_exhausted);
        assert_eq!(review.text(), "w0 w1");
    }

    #[test]
    fn single_sentence_takes_the_argmax() {
        let dict = dict8();
        // No profile: score is sigma_r / 2, maximized by the rating
        // closest to r_hat = 5.
        let scorer = CandidateScorer::new(None, &dict, None, None, 1.0, 5.0).unwrap();
        let pool = vec![
            candidate("a", 1, 0, "w0"),
            candidate("b", 5, 0, "w1"),
            candidate("c", 3, 0, "w2"),
        ];
        let review = generate_1s(&pool, &scorer);
        assert_eq!(review.selected[0].author, "b");
    }

    #[test]
    fn empty_pool_is_flagged_not_an_error() {
        let dict = dict8();
        let scorer = CandidateScorer::new(None, &dict, None, None, 1.0, 3.0).unwrap();
        let review = generate_1s(&[], &scorer);
        assert!(review.selected.is_empty());
        assert!(review.pool_exhausted);
    }

    fn random_pool(rng: &mut ChaCha8Rng, dict: &Dictionary, size: usize) -> Vec<Candidate> {
        (0..size)
            .map(|i| {
                let len = rng.random_range(1..6);
                let words: Vec<String> = (0..len)
                    .map(|_| format!("w{}", rng.random_range(0..8)))
                    .collect();
                let _ = dict;
                candidate(
                    &format!("u{}", rng.random_range(0..7)),
                    rng.random_range(1..=5),
                    i,
                    &words.join(" "),
                )
            })
            .collect()
    }

    /// Independent exhaustive argmax with the documented tie rule.
    fn brute_force_best(pool: &[Candidate], scorer: &CandidateScorer) -> Candidate {
        let mut best: Option<(f64, &Candidate)> = None;
        for c in pool {
            let s = scorer.score(c);
            let replace = match &best {
                None => true,
                Some((bs, bc)) => {
                    s > *bs
                        || (s == *bs
                            && (c.author.as_str(), c.position) < (bc.author.as_str(), bc.position))
                }
            };
            if replace {
                best = Some((s, c));
            }
        }
        best.unwrap().1.clone()
    }

    #[test]
    fn selection_equals_brute_force_argmax_on_random_pools() {
        let dict = dict8();
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for trial in 0..200 {
            let size = rng.random_range(1..30);
            let pool = random_pool(&mut rng, &dict, size);
            let profile = raw_profile("w0 w2 w4 w6", &dict);
            let r_hat = 1.0 + 4.0 * rng.random::<f64>();
            let scorer =
                CandidateScorer::new(Some(&profile), &dict, None, None, 1.0, r_hat).unwrap();
            let fast = generate_1s(&pool, &scorer);
            let slow = brute_force_best(&pool, &scorer);
            assert_eq!(fast.selected[0], slow, "trial {trial}");
            let ct = generate_ct(&pool, &scorer);
            assert_eq!(ct.selected[0], slow, "trial {trial} (ct)");
        }
    }

    #[test]
    fn complete_text_identical_to_profile_is_maximal() {
        let dict = dict8();
        let profile = raw_profile("w0 w1 w2", &dict);
        let scorer =
            CandidateScorer::new(Some(&profile), &dict, None, None, 1.0, 4.0).unwrap();
        let perfect = candidate("a", 4, 0, "w0 w1 w2");
        assert_eq!(scorer.score(&perfect), 1.0);
        let pool = vec![candidate("b", 1, 0, "w6 w7"), perfect.clone()];
        let review = generate_ct(&pool, &scorer);
        assert_eq!(review.selected[0], perfect);
        assert_eq!(review.scores[0], 1.0);
    }

    #[test]
    fn equal_ratings_reduce_ranking_to_text_similarity() {
        let dict = dict8();
        let profile = raw_profile("w0 w1 w2 w3", &dict);
        let scorer =
            CandidateScorer::new(Some(&profile), &dict, None, None, 1.0, 2.0).unwrap();
        let pool = vec![
            candidate("a", 3, 0, "w6 w7"),
            candidate("b", 3, 0, "w0 w1 w2"),
            candidate("c", 3, 0, "w0 w5"),
        ];
        let by_h = generate_1s(&pool, &scorer);
        let best_by_text = pool
            .iter()
            .max_by(|x, y| {
                scorer
                    .text_similarity(&x.sentence.tokens)
                    .partial_cmp(&scorer.text_similarity(&y.sentence.tokens))
                    .unwrap()
            })
            .unwrap();
        assert_eq!(&by_h.selected[0], best_by_text);
    }

    #[test]
    fn greedy_with_zero_target_is_exactly_the_single_pick() {
        let dict = dict8();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let size = rng.random_range(1..15);
            let pool = random_pool(&mut rng, &dict, size);
            let profile = raw_profile("w1 w3", &dict);
            let scorer =
                CandidateScorer::new(Some(&profile), &dict, None, None, 1.0, 3.0).unwrap();
            let xs = generate_xs(&pool, &scorer, 0);
            let single = generate_1s(&pool, &scorer);
            assert_eq!(xs.selected, single.selected);
        }
    }

    #[test]
    fn greedy_prefers_diverse_candidates_at_equal_score() {
        let dict = dict8();
        // r_hat equal to every rating makes sigma_r constant, and no
        // profile zeroes sigma_t: all raw scores are equal.
        let scorer = CandidateScorer::new(None, &dict, None, None, 1.0, 3.0).unwrap();
        let pool = vec![
            candidate("a", 3, 0, "w0 w1"),
            candidate("b", 3, 0, "w0 w1"), // duplicate of the first pick
            candidate("c", 3, 0, "w5 w6"), // disjoint
        ];
        let review = generate_xs(&pool, &scorer, 4);
        assert_eq!(review.selected.len(), 2);
        assert_eq!(review.selected[0].author, "a");
        assert_eq!(review.selected[1].author, "c");
    }

    #[test]
    fn greedy_contracts_on_random_pools() {
        let dict = dict8();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let pool = random_pool(&mut rng, &dict, 20);
            let profile = raw_profile("w0 w4", &dict);
            let scorer =
                CandidateScorer::new(Some(&profile), &dict, None, None, 1.0, 2.5).unwrap();
            let target = rng.random_range(1..40);
            let review = generate_xs(&pool, &scorer, target);
            // no duplicates
            for (i, a) in review.selected.iter().enumerate() {
                for b in &review.selected[i + 1..] {
                    assert_ne!(a, b);
                }
            }
            // all but the last selection stay under the target
            if review.selected.len() >= 2 {
                let before_last: usize = review.selected[..review.selected.len() - 1]
                    .iter()
                    .map(|c| c.sentence.tokens.len())
                    .sum();
                assert!(before_last < target);
            }
            // reached the target or exhausted the pool
            assert!(review.word_count() >= target || review.pool_exhausted);
        }
    }

    #[test]
    fn random_selector_is_deterministic_and_respects_mode() {
        let dict = dict8();
        let pool = vec![
            candidate("a", 1, 0, "w0 w1 w2"),
            candidate("b", 5, 0, "w3 w4"),
            candidate("c", 3, 1, "w5"),
        ];
        let a = generate_random(&pool, SummaryMode::SingleSentence, 0, 99, &dict);
        let b = generate_random(&pool, SummaryMode::SingleSentence, 0, 99, &dict);
        assert_eq!(a, b);
        let single = generate_random(&pool[..1], SummaryMode::SingleSentence, 0, 1, &dict);
        assert_eq!(single.selected[0].author, "a");
        let xs = generate_random(&pool, SummaryMode::MultiSentence, 100, 7, &dict);
        assert!(xs.pool_exhausted);
        assert_eq!(xs.selected.len(), 3);
    }

    #[test]
    fn oracle_finds_an_exact_reference_copy() {
        let reference = tokenize("w0 w1 w2 w3");
        let pool = vec![
            candidate("a", 3, 0, "w5 w6"),
            candidate("b", 3, 0, "w0 w1 w2 w3"),
        ];
        for n in 1..=3 {
            let review =
                generate_oracle(&pool, &reference, n, SummaryMode::SingleSentence, 0);
            assert_eq!(review.selected[0].author, "b");
            assert_eq!(review.scores[0], 1.0);
        }
    }

    #[test]
    fn oracle_dominates_model_selection_per_instance() {
        let dict = dict8();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..50 {
            let size = rng.random_range(1..20);
            let pool = random_pool(&mut rng, &dict, size);
            let reference: Vec<String> = (0..rng.random_range(2..10))
                .map(|_| format!("w{}", rng.random_range(0..8)))
                .collect();
            let profile = raw_profile("w0 w1", &dict);
            let scorer =
                CandidateScorer::new(Some(&profile), &dict, None, None, 1.0, 3.5).unwrap();
            let model_pick = generate_1s(&pool, &scorer);
            let oracle_pick =
                generate_oracle(&pool, &reference, 1, SummaryMode::SingleSentence, 0);
            let model_rouge = rouge_n(&model_pick.tokens(), &reference, 1);
            let oracle_rouge = rouge_n(&oracle_pick.tokens(), &reference, 1);
            assert!(oracle_rouge >= model_rouge);
        }
    }

    #[test]
    fn oracle_greedy_respects_the_length_stop() {
        let reference = tokenize("w0 w1 w2 w3 w4 w5");
        let pool = vec![
            candidate("a", 3, 0, "w0 w1"),
            candidate("b", 3, 0, "w2 w3"),
            candidate("c", 3, 0, "w4 w5"),
        ];
        let review = generate_oracle(&pool, &reference, 1, SummaryMode::MultiSentence, 5);
        assert!(review.word_count() >= 5);
        assert_eq!(review.selected.len(), 3);
        let zero = generate_oracle(&pool, &reference, 1, SummaryMode::MultiSentence, 0);
        assert_eq!(zero.selected.len(), 1);
    }

    #[test]
    fn average_length_examples() {
        let ten = ReviewRecord::new("u", "i", 3, None, "w0 w1 w2 w3 w4 w5 w6 w7 w8 w9");
        let twenty = ReviewRecord::new(
            "u",
            "i2",
            3,
            None,
            "a0 a1 a2 a3 a4 a5 a6 a7 a8 a9 b0 b1 b2 b3 b4 b5 b6 b7 b8 b9",
        );
        assert_eq!(average_length(&[&ten, &twenty], 99), 15);
        assert_eq!(average_length(&[], 42), 42);
        let seven = ReviewRecord::new("u", "i", 3, None, "one two three four five six seven");
        assert_eq!(average_length(&[&seven], 99), 7);
    }
}
