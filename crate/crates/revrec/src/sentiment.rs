//! Polarity classification from review text, ratings, or both.
//!
//! Labels come from the rating thresholding rule (1-2 negative, 4-5
//! positive, 3 dropped). The classifier is a linear model trained by
//! seeded stochastic subgradient descent on the hinge loss; in combined
//! mode the frozen rating predictor's output is added to the text score
//! inside both the loss and the decision function.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{Dictionary, ReviewRecord, SparseBinaryVector};
use crate::error::{Error, Result};
use crate::ratings::HybridRatingModel;

/// Binary polarity label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Polarity {
    Negative,
    Positive,
}

impl Polarity {
    pub fn sign(&self) -> f64 {
        match self {
            Polarity::Negative => -1.0,
            Polarity::Positive => 1.0,
        }
    }
}

/// Rating thresholding: 1-2 negative, 4-5 positive, 3 dropped (`None`).
pub fn label_from_rating(rating: u8) -> Result<Option<Polarity>> {
    match rating {
        1 | 2 => Ok(Some(Polarity::Negative)),
        3 => Ok(None),
        4 | 5 => Ok(Some(Polarity::Positive)),
        other => Err(Error::Data(format!("rating {other} outside the 1-5 scale"))),
    }
}

/// One labeled review: binary bag of words over the raw dictionary plus
/// the pair identifiers needed to query the rating predictor.
#[derive(Debug, Clone)]
pub struct PolarityExample {
    pub features: SparseBinaryVector,
    pub label: Polarity,
    pub user: String,
    pub item: String,
    pub rating: u8,
}

/// Vectorizes records into polarity examples; rating-3 records drop out.
pub fn build_examples(records: &[ReviewRecord], dict: &Dictionary) -> Result<Vec<PolarityExample>> {
    let mut examples = Vec::new();
    for r in records {
        if let Some(label) = label_from_rating(r.rating)? {
            let tokens = r.tokens();
            examples.push(PolarityExample {
                features: crate::corpus::vectorize(&tokens, dict),
                label,
                user: r.user_id.clone(),
                item: r.item_id.clone(),
                rating: r.rating,
            });
        }
    }
    Ok(examples)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassifierMode {
    TextOnly,
    Combined,
}

/// Linear polarity classifier over the raw dictionary.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LinearClassifier {
    pub weights: Vec<f64>,
    pub lambda: f64,
    pub mode: ClassifierMode,
}

impl LinearClassifier {
    /// Text score `w . d`.
    pub fn text_score(&self, features: &SparseBinaryVector) -> f64 {
        features
            .active
            .iter()
            .map(|&idx| self.weights[idx as usize])
            .sum()
    }
}

/// `max(0, x)`.
pub fn hinge(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        0.0
    }
}

/// Regularized hinge objective: mean hinge loss plus `lambda ||w||^2`.
/// `offsets[i]` is added to the text score of example `i` (zero in
/// text-only mode, the frozen rating prediction in combined mode).
pub fn objective(
    weights: &[f64],
    examples: &[PolarityExample],
    offsets: &[f64],
    lambda: f64,
) -> f64 {
    let mut loss = 0.0;
    for (example, &offset) in examples.iter().zip(offsets) {
        let score: f64 = example
            .features
            .active
            .iter()
            .map(|&idx| weights[idx as usize])
            .sum::<f64>()
            + offset;
        loss += hinge(1.0 - score * example.label.sign());
    }
    loss / examples.len() as f64 + lambda * weights.iter().map(|w| w * w).sum::<f64>()
}

/// Full-batch subgradient of [`objective`] at a non-kink point.
pub fn objective_subgradient(
    weights: &[f64],
    examples: &[PolarityExample],
    offsets: &[f64],
    lambda: f64,
) -> Vec<f64> {
    let mut grad: Vec<f64> = weights.iter().map(|w| 2.0 * lambda * w).collect();
    let scale = 1.0 / examples.len() as f64;
    for (example, &offset) in examples.iter().zip(offsets) {
        let sign = example.label.sign();
        let score: f64 = example
            .features
            .active
            .iter()
            .map(|&idx| weights[idx as usize])
            .sum::<f64>()
            + offset;
        if 1.0 - score * sign > 0.0 {
            for &idx in &example.features.active {
                grad[idx as usize] -= scale * sign;
            }
        }
    }
    grad
}

/// Shared trainer: seeded stochastic subgradient descent with step
/// `1 / (lambda * t)` over shuffled epochs, no averaging. Both training
/// modes go through this one path, so combined training with zero
/// offsets reproduces text-only training bit for bit.
pub fn train_with_fixed_offsets(
    examples: &[PolarityExample],
    offsets: &[f64],
    dims: usize,
    lambda: f64,
    epochs: usize,
    seed: u64,
    mode: ClassifierMode,
) -> Result<LinearClassifier> {
    if examples.is_empty() {
        return Err(Error::Data("no polarity examples to train on".into()));
    }
    if lambda <= 0.0 {
        return Err(Error::Config("lambda must be positive".into()));
    }
    let has_pos = examples.iter().any(|e| e.label == Polarity::Positive);
    let has_neg = examples.iter().any(|e| e.label == Polarity::Negative);
    if !has_pos || !has_neg {
        return Err(Error::Data(
            "training set must contain both polarity classes".into(),
        ));
    }
    let mut weights = vec![0.0f64; dims];
    let mut order: Vec<usize> = (0..examples.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = 1u64;
    for _ in 0..epochs {
        order.shuffle(&mut rng);
        for &idx in &order {
            let example = &examples[idx];
            let step = 1.0 / (lambda * t as f64);
            let sign = example.label.sign();
            let score: f64 = example
                .features
                .active
                .iter()
                .map(|&i| weights[i as usize])
                .sum::<f64>()
                + offsets[idx];
            // subgradient step on hinge + lambda ||w||^2
            let shrink = 1.0 - 2.0 * step * lambda;
            for w in weights.iter_mut() {
                *w *= shrink;
            }
            if 1.0 - score * sign > 0.0 {
                for &i in &example.features.active {
                    weights[i as usize] += step * sign;
                }
            }
            t += 1;
        }
    }
    if weights.iter().any(|w| !w.is_finite()) {
        return Err(Error::Numerical("classifier weights diverged".into()));
    }
    Ok(LinearClassifier { weights, lambda, mode })
}

/// Text-only hinge classifier.
pub fn train_text_svm(
    examples: &[PolarityExample],
    dims: usize,
    lambda: f64,
    epochs: usize,
    seed: u64,
) -> Result<LinearClassifier> {
    let offsets = vec![0.0; examples.len()];
    train_with_fixed_offsets(
        examples,
        &offsets,
        dims,
        lambda,
        epochs,
        seed,
        ClassifierMode::TextOnly,
    )
}

/// Precomputed, frozen rating predictions for a set of examples. With
/// `center`, predictions are shifted by -3 to sit symmetrically around
/// the class boundary.
pub fn rating_offsets(
    examples: &[PolarityExample],
    recommender: &HybridRatingModel,
    center: bool,
) -> Vec<f64> {
    examples
        .iter()
        .map(|e| {
            let f = recommender.predict(&e.user, &e.item);
            if center {
                f - 3.0
            } else {
                f
            }
        })
        .collect()
}

/// Combined classifier: the rating prediction is added to the text score
/// inside the hinge; only the text weights are learned.
pub fn train_combined(
    examples: &[PolarityExample],
    recommender: &HybridRatingModel,
    dims: usize,
    lambda: f64,
    epochs: usize,
    seed: u64,
    center: bool,
) -> Result<LinearClassifier> {
    let offsets = rating_offsets(examples, recommender, center);
    train_with_fixed_offsets(
        examples,
        &offsets,
        dims,
        lambda,
        epochs,
        seed,
        ClassifierMode::Combined,
    )
}

/// Sign of the mode's score; an exact zero counts as positive.
pub fn predict_polarity(
    model: &LinearClassifier,
    features: &SparseBinaryVector,
    offset: f64,
) -> Polarity {
    let score = model.text_score(features) + offset;
    if score >= 0.0 {
        Polarity::Positive
    } else {
        Polarity::Negative
    }
}

/// Fraction of misclassified examples.
pub fn evaluate_error(
    model: &LinearClassifier,
    examples: &[PolarityExample],
    offsets: &[f64],
) -> Result<f64> {
    if examples.is_empty() {
        return Err(Error::Data("cannot evaluate on an empty example set".into()));
    }
    let wrong = examples
        .iter()
        .zip(offsets)
        .filter(|(e, &o)| predict_polarity(model, &e.features, o) != e.label)
        .count();
    Ok(wrong as f64 / examples.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn labels_match_the_thresholding_table() {
        assert_eq!(label_from_rating(1).unwrap(), Some(Polarity::Negative));
        assert_eq!(label_from_rating(2).unwrap(), Some(Polarity::Negative));
        assert_eq!(label_from_rating(3).unwrap(), None);
        assert_eq!(label_from_rating(4).unwrap(), Some(Polarity::Positive));
        assert_eq!(label_from_rating(5).unwrap(), Some(Polarity::Positive));
        assert!(label_from_rating(0).is_err());
        assert!(label_from_rating(6).is_err());
    }

    #[test]
    fn hinge_is_piecewise_linear() {
        assert_eq!(hinge(-2.0), 0.0);
        assert_eq!(hinge(0.0), 0.0);
        assert_eq!(hinge(1.5), 1.5);
    }

    fn example(active: &[u32], dims: u32, label: Polarity) -> PolarityExample {
        PolarityExample {
            features: SparseBinaryVector::from_indices(dims, active.iter().copied()),
            label,
            user: "u".into(),
            item: "i".into(),
            rating: if label == Polarity::Positive { 5 } else { 1 },
        }
    }

    /// Positives always contain feature 0, negatives feature 1.
    fn separable_fixture(n: usize, dims: u32, seed: u64) -> Vec<PolarityExample> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|i| {
                let positive = i % 2 == 0;
                let marker = if positive { 0 } else { 1 };
                let mut active = vec![marker];
                for f in 2..dims {
                    if rng.random::<f64>() < 0.3 {
                        active.push(f);
                    }
                }
                example(
                    &active,
                    dims,
                    if positive { Polarity::Positive } else { Polarity::Negative },
                )
            })
            .collect()
    }

    #[test]
    fn separable_data_reaches_zero_training_error() {
        let examples = separable_fixture(40, 12, 3);
        let model = train_text_svm(&examples, 12, 1e-3, 120, 7).unwrap();
        let offsets = vec![0.0; examples.len()];
        let err = evaluate_error(&model, &examples, &offsets).unwrap();
        assert_eq!(err, 0.0);
    }

    #[test]
    fn heavy_regularization_shrinks_the_weights() {
        let examples = separable_fixture(40, 12, 4);
        let model = train_text_svm(&examples, 12, 1e6, 30, 7).unwrap();
        let norm = model.weights.iter().map(|w| w * w).sum::<f64>().sqrt();
        assert!(norm < 1e-2, "norm = {norm}");
    }

    #[test]
    fn objective_decreases_over_epochs() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let dims = 20u32;
        let examples: Vec<PolarityExample> = (0..60)
            .map(|i| {
                let positive = i % 2 == 0;
                let active: Vec<u32> = (0..dims)
                    .filter(|_| rng.random::<f64>() < if positive { 0.4 } else { 0.2 })
                    .collect();
                example(
                    &active,
                    dims,
                    if positive { Polarity::Positive } else { Polarity::Negative },
                )
            })
            .collect();
        let offsets = vec![0.0; examples.len()];
        let after_1 = train_text_svm(&examples, dims as usize, 0.01, 1, 5).unwrap();
        let after_10 = train_text_svm(&examples, dims as usize, 0.01, 10, 5).unwrap();
        let obj_1 = objective(&after_1.weights, &examples, &offsets, 0.01);
        let obj_10 = objective(&after_10.weights, &examples, &offsets, 0.01);
        assert!(obj_10 < obj_1, "objective rose from {obj_1} to {obj_10}");
    }

    #[test]
    fn subgradient_matches_finite_differences_at_non_kink_points() {
        let dims = 10usize;
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let examples: Vec<PolarityExample> = (0..12)
            .map(|i| {
                let active: Vec<u32> =
                    (0..dims as u32).filter(|_| rng.random::<f64>() < 0.4).collect();
                example(
                    &active,
                    dims as u32,
                    if i % 2 == 0 { Polarity::Positive } else { Polarity::Negative },
                )
            })
            .collect();
        let offsets: Vec<f64> = (0..examples.len()).map(|_| rng.random::<f64>()).collect();
        let weights: Vec<f64> = (0..dims).map(|_| rng.random::<f64>() * 0.37 - 0.11).collect();
        let lambda = 0.05;
        let analytic = objective_subgradient(&weights, &examples, &offsets, lambda);
        let eps = 1e-6;
        for d in 0..dims {
            let mut plus = weights.clone();
            plus[d] += eps;
            let mut minus = weights.clone();
            minus[d] -= eps;
            let numeric = (objective(&plus, &examples, &offsets, lambda)
                - objective(&minus, &examples, &offsets, lambda))
                / (2.0 * eps);
            let denom = analytic[d].abs().max(numeric.abs()).max(1e-8);
            assert!(
                (analytic[d] - numeric).abs() / denom < 1e-4,
                "dim {d}: analytic {} vs numeric {numeric}",
                analytic[d]
            );
        }
    }

    #[test]
    fn zero_offsets_reproduce_text_only_training_bit_for_bit() {
        let examples = separable_fixture(30, 10, 8);
        let offsets = vec![0.0; examples.len()];
        let text = train_text_svm(&examples, 10, 0.01, 25, 42).unwrap();
        let combined = train_with_fixed_offsets(
            &examples,
            &offsets,
            10,
            0.01,
            25,
            42,
            ClassifierMode::Combined,
        )
        .unwrap();
        assert_eq!(text.weights, combined.weights);
    }

    #[test]
    fn large_offsets_keep_weights_at_zero() {
        // Every example already satisfies the margin through its offset,
        // so no hinge subgradient ever fires and w stays at 0.
        let examples = separable_fixture(20, 8, 2);
        let offsets: Vec<f64> = examples.iter().map(|e| 2.0 * e.label.sign()).collect();
        let model = train_with_fixed_offsets(
            &examples,
            &offsets,
            8,
            0.01,
            10,
            3,
            ClassifierMode::Combined,
        )
        .unwrap();
        assert!(model.weights.iter().all(|&w| w == 0.0));
    }

    #[test]
    fn tie_rule_and_sign_examples() {
        let model = LinearClassifier {
            weights: vec![0.0; 4],
            lambda: 1.0,
            mode: ClassifierMode::TextOnly,
        };
        let features = SparseBinaryVector::from_indices(4, [0, 1]);
        assert_eq!(predict_polarity(&model, &features, 0.0), Polarity::Positive);
        assert_eq!(predict_polarity(&model, &features, 2.3), Polarity::Positive);
        assert_eq!(predict_polarity(&model, &features, -0.1), Polarity::Negative);
    }

    #[test]
    fn evaluate_error_examples() {
        let examples = vec![
            example(&[0], 4, Polarity::Positive),
            example(&[1], 4, Polarity::Negative),
        ];
        let mut model = LinearClassifier {
            weights: vec![1.0, -1.0, 0.0, 0.0],
            lambda: 1.0,
            mode: ClassifierMode::TextOnly,
        };
        let offsets = vec![0.0; 2];
        assert_eq!(evaluate_error(&model, &examples, &offsets).unwrap(), 0.0);
        model.weights = vec![0.0; 4];
        // constant positive prediction on a balanced set
        assert_eq!(evaluate_error(&model, &examples, &offsets).unwrap(), 0.5);
        assert!(evaluate_error(&model, &[], &[]).is_err());
    }

    #[test]
    fn single_class_input_is_rejected() {
        let examples = vec![example(&[0], 4, Polarity::Positive)];
        assert!(matches!(
            train_text_svm(&examples, 4, 0.01, 5, 0),
            Err(Error::Data(_))
        ));
    }

    #[test]
    fn weight_norm_trend_over_the_lambda_grid() {
        let examples = separable_fixture(60, 16, 12);
        let grid = [1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0];
        let norms: Vec<f64> = grid
            .iter()
            .map(|&lambda| {
                let model = train_text_svm(&examples, 16, lambda, 40, 5).unwrap();
                model.weights.iter().map(|w| w * w).sum::<f64>().sqrt()
            })
            .collect();
        let inversions = norms.windows(2).filter(|w| w[1] > w[0] + 1e-12).count();
        assert!(inversions <= 1, "norms not mostly decreasing: {norms:?}");
    }
}
