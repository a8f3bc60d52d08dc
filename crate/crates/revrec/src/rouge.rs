//! Recall-oriented ROUGE-n scoring: the fraction of the reference's
//! n-grams found in the candidate, with clipped multiset matching.

use std::collections::HashMap;

/// Contiguous n-grams of a token sequence, with multiplicity.
#[derive(Debug, Clone)]
pub struct NgramMultiset {
    pub n: usize,
    counts: HashMap<Vec<String>, usize>,
    total: usize,
}

impl NgramMultiset {
    pub fn total(&self) -> usize {
        self.total
    }

    pub fn count(&self, gram: &[String]) -> usize {
        self.counts.get(gram).copied().unwrap_or(0)
    }
}

pub fn ngrams(tokens: &[String], n: usize) -> NgramMultiset {
    assert!(n >= 1, "n-gram order must be at least 1");
    let mut counts: HashMap<Vec<String>, usize> = HashMap::new();
    let mut total = 0;
    if tokens.len() >= n {
        for window in tokens.windows(n) {
            *counts.entry(window.to_vec()).or_insert(0) += 1;
            total += 1;
        }
    }
    NgramMultiset { n, counts, total }
}

/// ROUGE-n recall of `candidate` against `reference`: clipped n-gram
/// matches divided by the reference n-gram count. A reference too short
/// to contain any n-gram scores 0.
pub fn rouge_n(candidate: &[String], reference: &[String], n: usize) -> f64 {
    let reference_grams = ngrams(reference, n);
    if reference_grams.total() == 0 {
        return 0.0;
    }
    let candidate_grams = ngrams(candidate, n);
    let mut matched = 0usize;
    for (gram, &ref_count) in &reference_grams.counts {
        matched += ref_count.min(candidate_grams.count(gram));
    }
    matched as f64 / reference_grams.total() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn toks(text: &str) -> Vec<String> {
        crate::corpus::tokenize(text)
    }

    /// Position-level reference matcher: each candidate n-gram occurrence
    /// can satisfy at most one reference occurrence.
    fn brute_force_rouge(candidate: &[String], reference: &[String], n: usize) -> f64 {
        if reference.len() < n {
            return 0.0;
        }
        let cand: Vec<&[String]> = if candidate.len() >= n {
            candidate.windows(n).collect()
        } else {
            Vec::new()
        };
        let mut used = vec![false; cand.len()];
        let mut matched = 0usize;
        let mut total = 0usize;
        for gram in reference.windows(n) {
            total += 1;
            for (j, c) in cand.iter().enumerate() {
                if !used[j] && *c == gram {
                    used[j] = true;
                    matched += 1;
                    break;
                }
            }
        }
        matched as f64 / total as f64
    }

    #[test]
    fn ngram_examples() {
        let g1 = ngrams(&toks("a b a"), 1);
        assert_eq!(g1.count(&["a".to_string()]), 2);
        assert_eq!(g1.count(&["b".to_string()]), 1);
        assert_eq!(g1.total(), 3);
        let g2 = ngrams(&toks("a b a"), 2);
        assert_eq!(g2.count(&["a".to_string(), "b".to_string()]), 1);
        assert_eq!(g2.count(&["b".to_string(), "a".to_string()]), 1);
        let g3 = ngrams(&toks("a"), 3);
        assert_eq!(g3.total(), 0);
    }

    #[test]
    fn ngram_total_matches_length_formula() {
        for len in 0..12usize {
            let tokens: Vec<String> = (0..len).map(|i| format!("t{}", i % 3)).collect();
            for n in 1..=4usize {
                let expected = if len >= n { len - n + 1 } else { 0 };
                assert_eq!(ngrams(&tokens, n).total(), expected);
            }
        }
    }

    #[test]
    fn rouge_identity_and_disjoint() {
        let r = toks("the beer pours a deep amber color");
        for n in 1..=3 {
            assert_eq!(rouge_n(&r, &r, n), 1.0);
        }
        let c = toks("completely different words entirely");
        for n in 1..=3 {
            assert_eq!(rouge_n(&c, &r, n), 0.0);
        }
    }

    #[test]
    fn rouge_hand_checked_example() {
        let reference = toks("the beer is good");
        let candidate = toks("good beer");
        assert_eq!(rouge_n(&candidate, &reference, 1), 0.5);
    }

    #[test]
    fn rouge_empty_reference_scores_zero() {
        let c = toks("anything");
        assert_eq!(rouge_n(&c, &[], 1), 0.0);
        assert_eq!(rouge_n(&c, &toks("one two"), 3), 0.0);
    }

    #[test]
    fn rouge_matches_brute_force_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for n in 1..=3usize {
            for _ in 0..100 {
                let len_c = rng.random_range(0..30);
                let len_r = rng.random_range(1..30);
                let cand: Vec<String> =
                    (0..len_c).map(|_| format!("w{}", rng.random_range(0..6))).collect();
                let reference: Vec<String> =
                    (0..len_r).map(|_| format!("w{}", rng.random_range(0..6))).collect();
                let fast = rouge_n(&cand, &reference, n);
                let slow = brute_force_rouge(&cand, &reference, n);
                assert_eq!(fast, slow, "n={n} cand={cand:?} ref={reference:?}");
            }
        }
    }

    #[test]
    fn rouge_is_monotone_under_candidate_extension() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let reference: Vec<String> =
                (0..rng.random_range(2..15)).map(|_| format!("w{}", rng.random_range(0..5))).collect();
            let mut cand: Vec<String> =
                (0..rng.random_range(0..10)).map(|_| format!("w{}", rng.random_range(0..5))).collect();
            for n in 1..=3usize {
                let before = rouge_n(&cand, &reference, n);
                let mut extended = cand.clone();
                extended.push(format!("w{}", rng.random_range(0..5)));
                let after = rouge_n(&extended, &reference, n);
                assert!(after >= before);
            }
            cand.push("w0".to_string());
        }
    }

    #[test]
    fn rouge_is_recall_oriented_not_symmetric() {
        let a = toks("good beer good beer extra words here");
        let b = toks("good beer");
        assert_eq!(rouge_n(&a, &b, 1), 1.0);
        assert!(rouge_n(&b, &a, 1) < 1.0);
    }
}
