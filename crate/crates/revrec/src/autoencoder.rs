//! Tied-weight sigmoid autoencoder over binary sentence vectors.
//!
//! Encoding is `sig(W s + b)`, decoding is `sig(W^T h + b')` with the same
//! weight matrix, trained by minibatch SGD on the weighted squared
//! reconstruction error.

use ndarray::{Array1, Array2};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::SparseBinaryVector;
use crate::error::{Error, Result};

/// Numerically stable logistic function, exact for |t| up to ~700.
pub fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// Tied-weight parameters: one matrix serves encoder and decoder.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AutoencoderParams {
    /// coding_dim x vocab_size weight matrix.
    pub weights: Array2<f64>,
    /// Hidden-layer bias, length coding_dim.
    pub hidden_bias: Array1<f64>,
    /// Reconstruction bias, length vocab_size.
    pub visible_bias: Array1<f64>,
}

impl AutoencoderParams {
    pub fn coding_dim(&self) -> usize {
        self.weights.nrows()
    }

    pub fn vocab_size(&self) -> usize {
        self.weights.ncols()
    }

    pub fn zeros(coding_dim: usize, vocab_size: usize) -> Self {
        AutoencoderParams {
            weights: Array2::zeros((coding_dim, vocab_size)),
            hidden_bias: Array1::zeros(coding_dim),
            visible_bias: Array1::zeros(vocab_size),
        }
    }

    fn check_finite(&self) -> Result<()> {
        let finite = self.weights.iter().all(|v| v.is_finite())
            && self.hidden_bias.iter().all(|v| v.is_finite())
            && self.visible_bias.iter().all(|v| v.is_finite());
        if finite {
            Ok(())
        } else {
            Err(Error::Numerical("autoencoder parameters are not finite".into()))
        }
    }
}

/// `sig(W s + b)`, summing only the active columns of the sparse input.
pub fn encode(params: &AutoencoderParams, input: &SparseBinaryVector) -> Result<Array1<f64>> {
    if input.dims as usize != params.vocab_size() {
        return Err(Error::Data(format!(
            "encode: input has {} dims, autoencoder expects {}",
            input.dims,
            params.vocab_size()
        )));
    }
    let mut z = params.hidden_bias.clone();
    for &idx in &input.active {
        z += &params.weights.column(idx as usize);
    }
    Ok(z.mapv(sigmoid))
}

/// `sig(W^T h + b')`.
pub fn decode(params: &AutoencoderParams, code: &Array1<f64>) -> Result<Array1<f64>> {
    if code.len() != params.coding_dim() {
        return Err(Error::Data(format!(
            "decode: code has {} dims, autoencoder expects {}",
            code.len(),
            params.coding_dim()
        )));
    }
    let z = params.weights.t().dot(code) + &params.visible_bias;
    Ok(z.mapv(sigmoid))
}

/// One training sentence: binary vector plus its sample weight (the
/// per-document averaging weight 1/κ for a document of κ sentences).
#[derive(Debug, Clone)]
pub struct TrainingSentence {
    pub vector: SparseBinaryVector,
    pub weight: f64,
}

impl TrainingSentence {
    pub fn unweighted(vector: SparseBinaryVector) -> Self {
        TrainingSentence { vector, weight: 1.0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AutoencoderConfig {
    pub coding_dim: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub seed: u64,
    /// Probability of dropping each active input bit before encoding
    /// (denoising-style corruption). 0 disables corruption.
    pub corruption: f64,
}

impl Default for AutoencoderConfig {
    fn default() -> Self {
        AutoencoderConfig {
            coding_dim: 1000,
            epochs: 20,
            learning_rate: 0.1,
            batch_size: 32,
            seed: 0,
            corruption: 0.0,
        }
    }
}

#[derive(Debug)]
pub struct TrainedAutoencoder {
    pub params: AutoencoderParams,
    /// Full-pass weighted loss; index 0 is the loss before any update.
    pub epoch_losses: Vec<f64>,
}

/// Parameter gradients in the same layout as [`AutoencoderParams`].
#[derive(Debug)]
pub struct Gradients {
    pub weights: Array2<f64>,
    pub hidden_bias: Array1<f64>,
    pub visible_bias: Array1<f64>,
}

impl Gradients {
    fn zeros(coding_dim: usize, vocab_size: usize) -> Self {
        Gradients {
            weights: Array2::zeros((coding_dim, vocab_size)),
            hidden_bias: Array1::zeros(coding_dim),
            visible_bias: Array1::zeros(vocab_size),
        }
    }
}

fn sample_reconstruction(
    params: &AutoencoderParams,
    input: &SparseBinaryVector,
) -> Result<(Array1<f64>, Array1<f64>)> {
    let hidden = encode(params, input)?;
    let reconstruction = decode(params, &hidden)?;
    Ok((hidden, reconstruction))
}

fn squared_error(input: &SparseBinaryVector, reconstruction: &Array1<f64>) -> f64 {
    let mut err: f64 = reconstruction.iter().map(|&x| x * x).sum();
    for &idx in &input.active {
        let x = reconstruction[idx as usize];
        // replace x^2 by (1 - x)^2 on active coordinates
        err += 1.0 - 2.0 * x;
    }
    err
}

/// Total weighted reconstruction loss over a sample set.
pub fn batch_loss(params: &AutoencoderParams, samples: &[TrainingSentence]) -> Result<f64> {
    let mut loss = 0.0;
    for sample in samples {
        let (_, reconstruction) = sample_reconstruction(params, &sample.vector)?;
        loss += sample.weight * squared_error(&sample.vector, &reconstruction);
    }
    Ok(loss)
}

fn accumulate_gradient(
    params: &AutoencoderParams,
    sample: &TrainingSentence,
    grads: &mut Gradients,
) -> Result<f64> {
    let input = &sample.vector;
    let (hidden, reconstruction) = sample_reconstruction(params, input)?;
    let loss = sample.weight * squared_error(input, &reconstruction);

    // delta on the reconstruction pre-activation
    let mut delta_out = Array1::<f64>::zeros(params.vocab_size());
    for (j, d) in delta_out.iter_mut().enumerate() {
        let x = reconstruction[j];
        *d = 2.0 * sample.weight * x * x * (1.0 - x);
    }
    for &idx in &input.active {
        let j = idx as usize;
        let x = reconstruction[j];
        delta_out[j] = 2.0 * sample.weight * (x - 1.0) * x * (1.0 - x);
    }

    grads.visible_bias += &delta_out;
    // decoder contribution: outer(hidden, delta_out)
    for (j, &d) in delta_out.iter().enumerate() {
        if d != 0.0 {
            grads.weights.column_mut(j).scaled_add(d, &hidden);
        }
    }
    // backpropagate to the hidden layer
    let back = params.weights.dot(&delta_out);
    let delta_hidden =
        ndarray::Zip::from(&back).and(&hidden).map_collect(|&b, &h| b * h * (1.0 - h));
    grads.hidden_bias += &delta_hidden;
    // encoder contribution: outer(delta_hidden, input), input binary sparse
    for &idx in &input.active {
        grads.weights.column_mut(idx as usize).scaled_add(1.0, &delta_hidden);
    }
    Ok(loss)
}

/// Full-batch analytic gradient of [`batch_loss`]; encoder and decoder
/// contributions to the shared weight matrix are summed.
pub fn batch_gradient(
    params: &AutoencoderParams,
    samples: &[TrainingSentence],
) -> Result<Gradients> {
    let mut grads = Gradients::zeros(params.coding_dim(), params.vocab_size());
    for sample in samples {
        accumulate_gradient(params, sample, &mut grads)?;
    }
    Ok(grads)
}

fn corrupt(
    vector: &SparseBinaryVector,
    corruption: f64,
    rng: &mut ChaCha8Rng,
) -> SparseBinaryVector {
    let kept = vector
        .active
        .iter()
        .copied()
        .filter(|_| rng.random::<f64>() >= corruption)
        .collect::<Vec<_>>();
    SparseBinaryVector { dims: vector.dims, active: kept }
}

/// Trains the autoencoder by seeded minibatch SGD on the weighted squared
/// reconstruction loss. Reports the full-pass loss before training and
/// after every epoch.
pub fn train(samples: &[TrainingSentence], config: &AutoencoderConfig) -> Result<TrainedAutoencoder> {
    if samples.is_empty() {
        return Err(Error::Data("autoencoder training set is empty".into()));
    }
    if config.coding_dim == 0 || config.batch_size == 0 {
        return Err(Error::Config(
            "coding_dim and batch_size must be positive".into(),
        ));
    }
    let vocab_size = samples[0].vector.dims as usize;
    if samples.iter().any(|s| s.vector.dims as usize != vocab_size) {
        return Err(Error::Data("training sentences have mixed dimensions".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let bound = (6.0 / (config.coding_dim + vocab_size) as f64).sqrt();
    let mut params = AutoencoderParams {
        weights: Array2::from_shape_fn((config.coding_dim, vocab_size), |_| {
            rng.random_range(-bound..bound)
        }),
        hidden_bias: Array1::zeros(config.coding_dim),
        visible_bias: Array1::zeros(vocab_size),
    };

    let mut epoch_losses = vec![batch_loss(&params, samples)?];
    let mut order: Vec<usize> = (0..samples.len()).collect();
    for epoch in 1..=config.epochs {
        order.shuffle(&mut rng);
        for batch in order.chunks(config.batch_size) {
            let mut grads = Gradients::zeros(config.coding_dim, vocab_size);
            for &idx in batch {
                if config.corruption > 0.0 {
                    let noisy = corrupt(&samples[idx].vector, config.corruption, &mut rng);
                    let corrupted = TrainingSentence {
                        vector: noisy,
                        weight: samples[idx].weight,
                    };
                    accumulate_gradient(&params, &corrupted, &mut grads)?;
                } else {
                    accumulate_gradient(&params, &samples[idx], &mut grads)?;
                }
            }
            let step = config.learning_rate / batch.len() as f64;
            params.weights.scaled_add(-step, &grads.weights);
            params.hidden_bias.scaled_add(-step, &grads.hidden_bias);
            params.visible_bias.scaled_add(-step, &grads.visible_bias);
        }
        let loss = batch_loss(&params, samples)?;
        if !loss.is_finite() {
            return Err(Error::Numerical(format!(
                "autoencoder loss diverged at epoch {epoch}: {loss}"
            )));
        }
        epoch_losses.push(loss);
    }
    params.check_finite()?;
    Ok(TrainedAutoencoder { params, epoch_losses })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sparse(dims: u32, active: &[u32]) -> SparseBinaryVector {
        SparseBinaryVector::from_indices(dims, active.iter().copied())
    }

    fn toy_params(coding: usize, vocab: usize, seed: u64) -> AutoencoderParams {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        AutoencoderParams {
            weights: Array2::from_shape_fn((coding, vocab), |_| rng.random_range(-0.5..0.5)),
            hidden_bias: Array1::from_shape_fn(coding, |_| rng.random_range(-0.5..0.5)),
            visible_bias: Array1::from_shape_fn(vocab, |_| rng.random_range(-0.5..0.5)),
        }
    }

    #[test]
    fn sigmoid_examples() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert!((sigmoid(40.0) - 1.0).abs() < 1e-15);
        let t = 1.37;
        assert!((sigmoid(-t) - (1.0 - sigmoid(t))).abs() < 1e-15);
        assert!(sigmoid(-745.0) > 0.0);
        assert!(sigmoid(745.0) < 1.0 + 1e-15);
    }

    #[test]
    fn encode_zero_params_gives_half() {
        let params = AutoencoderParams::zeros(3, 5);
        let code = encode(&params, &sparse(5, &[0, 4])).unwrap();
        assert!(code.iter().all(|&v| v == 0.5));
    }

    #[test]
    fn encode_empty_input_is_sigmoid_of_bias() {
        let mut params = AutoencoderParams::zeros(2, 4);
        params.hidden_bias[0] = 1.0;
        params.hidden_bias[1] = -2.0;
        let code = encode(&params, &sparse(4, &[])).unwrap();
        assert_eq!(code[0], sigmoid(1.0));
        assert_eq!(code[1], sigmoid(-2.0));
    }

    #[test]
    fn encode_matches_dense_oracle() {
        let params = toy_params(4, 9, 11);
        let input = sparse(9, &[1, 3, 8]);
        let sparse_code = encode(&params, &input).unwrap();
        // dense oracle
        let mut dense = Array1::<f64>::zeros(9);
        for &i in &input.active {
            dense[i as usize] = 1.0;
        }
        let dense_code = (params.weights.dot(&dense) + &params.hidden_bias).mapv(sigmoid);
        for (a, b) in sparse_code.iter().zip(dense_code.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn encode_output_is_strictly_inside_unit_interval() {
        let params = toy_params(6, 12, 3);
        for active in [vec![], vec![0], vec![2, 5, 11]] {
            let code = encode(&params, &sparse(12, &active)).unwrap();
            assert!(code.iter().all(|&v| v > 0.0 && v < 1.0));
        }
    }

    #[test]
    fn encode_rejects_dimension_mismatch() {
        let params = AutoencoderParams::zeros(3, 5);
        assert!(encode(&params, &sparse(6, &[0])).is_err());
    }

    #[test]
    fn decode_zero_params_and_shape() {
        let params = AutoencoderParams::zeros(3, 7);
        let out = decode(&params, &Array1::zeros(3)).unwrap();
        assert_eq!(out.len(), 7);
        assert!(out.iter().all(|&v| v == 0.5));
        assert!(decode(&params, &Array1::zeros(4)).is_err());
    }

    #[test]
    fn decode_matches_dense_oracle() {
        let params = toy_params(4, 9, 5);
        let code = Array1::from_shape_fn(4, |i| 0.1 + 0.2 * i as f64);
        let fast = decode(&params, &code).unwrap();
        let oracle = (params.weights.t().dot(&code) + &params.visible_bias).mapv(sigmoid);
        for (a, b) in fast.iter().zip(oracle.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn loss_of_zero_params_on_empty_inputs() {
        // With W=0, b'=0 every reconstructed coordinate is 0.5, so an
        // all-zero input costs 0.25 per coordinate.
        let vocab = 8;
        let params = AutoencoderParams::zeros(3, vocab);
        let samples: Vec<TrainingSentence> = (0..5)
            .map(|_| TrainingSentence::unweighted(sparse(vocab as u32, &[])))
            .collect();
        let loss = batch_loss(&params, &samples).unwrap();
        assert!((loss - 5.0 * vocab as f64 * 0.25).abs() < 1e-12);
    }

    #[test]
    fn gradient_matches_central_finite_differences() {
        let coding = 4;
        let vocab = 6;
        let params = toy_params(coding, vocab, 17);
        let samples = vec![
            TrainingSentence { vector: sparse(6, &[0, 2]), weight: 0.5 },
            TrainingSentence { vector: sparse(6, &[1, 3, 5]), weight: 1.0 / 3.0 },
            TrainingSentence { vector: sparse(6, &[]), weight: 1.0 },
        ];
        let grads = batch_gradient(&params, &samples).unwrap();
        let eps = 1e-5;
        let check = |analytic: f64, perturb: &dyn Fn(&mut AutoencoderParams, f64)| {
            let mut plus = params.clone();
            perturb(&mut plus, eps);
            let mut minus = params.clone();
            perturb(&mut minus, -eps);
            let numeric = (batch_loss(&plus, &samples).unwrap()
                - batch_loss(&minus, &samples).unwrap())
                / (2.0 * eps);
            let denom = analytic.abs().max(numeric.abs()).max(1e-8);
            assert!(
                (analytic - numeric).abs() / denom < 1e-4,
                "analytic {analytic} vs numeric {numeric}"
            );
        };
        for r in 0..coding {
            for c in 0..vocab {
                check(grads.weights[[r, c]], &|p, d| p.weights[[r, c]] += d);
            }
        }
        for r in 0..coding {
            check(grads.hidden_bias[r], &|p, d| p.hidden_bias[r] += d);
        }
        for c in 0..vocab {
            check(grads.visible_bias[c], &|p, d| p.visible_bias[c] += d);
        }
    }

    fn memorization_fixture() -> (Vec<TrainingSentence>, AutoencoderConfig) {
        let samples: Vec<TrainingSentence> = (0..50)
            .map(|_| TrainingSentence::unweighted(sparse(6, &[0, 2, 5])))
            .collect();
        let config = AutoencoderConfig {
            coding_dim: 4,
            epochs: 200,
            learning_rate: 0.1,
            batch_size: 32,
            seed: 9,
            corruption: 0.0,
        };
        (samples, config)
    }

    #[test]
    fn training_memorizes_a_repeated_sentence() {
        let (samples, config) = memorization_fixture();
        let trained = train(&samples, &config).unwrap();
        let initial = trained.epoch_losses[0];
        let last = *trained.epoch_losses.last().unwrap();
        assert!(
            last < 0.5 * initial,
            "loss {last} did not halve from {initial}"
        );
    }

    #[test]
    fn training_loss_is_mostly_non_increasing() {
        let (samples, config) = memorization_fixture();
        let trained = train(&samples, &config).unwrap();
        let losses = &trained.epoch_losses;
        let decreasing = losses
            .windows(2)
            .filter(|w| w[1] <= w[0] + 1e-12)
            .count();
        assert!(decreasing as f64 >= 0.9 * (losses.len() - 1) as f64);
    }

    #[test]
    fn training_is_deterministic_per_seed() {
        let (samples, config) = memorization_fixture();
        let a = train(&samples, &config).unwrap();
        let b = train(&samples, &config).unwrap();
        assert_eq!(a.params.weights, b.params.weights);
        assert_eq!(a.epoch_losses, b.epoch_losses);
    }

    #[test]
    fn training_rejects_empty_input() {
        assert!(train(&[], &AutoencoderConfig::default()).is_err());
    }
}
