//! Hybrid rating prediction: bias terms, masked non-negative matrix
//! factorization, user text-profile similarity and the least-squares
//! combination of the five component predictors.

use std::collections::BTreeMap;

use ndarray::{Array2, Zip};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::autoencoder::{encode, AutoencoderParams};
use crate::corpus::{vectorize_all, Dictionary, ReviewRecord, SparseBinaryVector};
use crate::error::{Error, Result};

/// Overall, per-user and per-item mean ratings on the training set.
/// Unseen users and items fall back to the overall mean.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BiasModel {
    pub mean: f64,
    pub user_means: BTreeMap<String, f64>,
    pub item_means: BTreeMap<String, f64>,
}

impl BiasModel {
    pub fn user_bias(&self, user: &str) -> f64 {
        self.user_means.get(user).copied().unwrap_or(self.mean)
    }

    pub fn item_bias(&self, item: &str) -> f64 {
        self.item_means.get(item).copied().unwrap_or(self.mean)
    }
}

pub fn fit_biases(train: &[ReviewRecord]) -> Result<BiasModel> {
    if train.is_empty() {
        return Err(Error::Data("cannot fit biases on an empty training set".into()));
    }
    let mut user_sums: BTreeMap<String, (f64, usize)> = BTreeMap::new();
    let mut item_sums: BTreeMap<String, (f64, usize)> = BTreeMap::new();
    let mut total = 0.0;
    for r in train {
        total += r.rating as f64;
        let u = user_sums.entry(r.user_id.clone()).or_insert((0.0, 0));
        u.0 += r.rating as f64;
        u.1 += 1;
        let i = item_sums.entry(r.item_id.clone()).or_insert((0.0, 0));
        i.0 += r.rating as f64;
        i.1 += 1;
    }
    let mean = total / train.len() as f64;
    let collapse = |sums: BTreeMap<String, (f64, usize)>| {
        sums.into_iter()
            .map(|(id, (sum, n))| (id, sum / n as f64))
            .collect::<BTreeMap<String, f64>>()
    };
    Ok(BiasModel {
        mean,
        user_means: collapse(user_sums),
        item_means: collapse(item_sums),
    })
}

/// Non-negative latent factors for users and items.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FactorModel {
    pub user_factors: BTreeMap<String, Vec<f64>>,
    pub item_factors: BTreeMap<String, Vec<f64>>,
    pub k: usize,
    pub lambda_u: f64,
    pub lambda_i: f64,
}

/// Dot product of the stored factors; unseen user or item predicts 0,
/// the bias terms carry the fallback.
pub fn predict_mf(model: &FactorModel, user: &str, item: &str) -> f64 {
    match (model.user_factors.get(user), model.item_factors.get(item)) {
        (Some(u), Some(i)) => u.iter().zip(i).map(|(a, b)| a * b).sum(),
        _ => 0.0,
    }
}

/// Raw output of the masked factorization on index space.
#[derive(Debug, Clone)]
pub struct MaskedNmfFit {
    pub row_factors: Array2<f64>,
    pub col_factors: Array2<f64>,
    /// Regularized masked objective, index 0 before the first update.
    pub objective_trace: Vec<f64>,
}

const NMF_EPS: f64 = 1e-12;

/// Alternating multiplicative sub-updates applied per recorded iteration.
/// Each sub-update is itself monotone, so the objective trace stays
/// non-increasing; bundling them makes one iteration converge as far as
/// ten plain sweeps.
const NMF_INNER_UPDATES: usize = 10;

fn masked_objective(
    entries: &[(usize, usize, f64)],
    rows: &Array2<f64>,
    cols: &Array2<f64>,
    lambda_u: f64,
    lambda_i: f64,
) -> f64 {
    let mut err = 0.0;
    for &(r, c, v) in entries {
        let pred = rows.row(r).dot(&cols.row(c));
        err += (v - pred) * (v - pred);
    }
    err + lambda_u * rows.iter().map(|x| x * x).sum::<f64>()
        + lambda_i * cols.iter().map(|x| x * x).sum::<f64>()
}

/// Multiplicative-update non-negative factorization restricted to the
/// observed cells. Each sweep updates the row factors with the column
/// factors fixed and then the reverse, which keeps the regularized
/// objective non-increasing and all entries non-negative.
#[allow(clippy::too_many_arguments)]
pub fn masked_nmf(
    entries: &[(usize, usize, f64)],
    n_rows: usize,
    n_cols: usize,
    k: usize,
    lambda_u: f64,
    lambda_i: f64,
    max_iters: usize,
    tol: f64,
    seed: u64,
) -> Result<MaskedNmfFit> {
    if k == 0 {
        return Err(Error::Config("latent dimension k must be at least 1".into()));
    }
    if lambda_u < 0.0 || lambda_i < 0.0 {
        return Err(Error::Config("regularization weights must be non-negative".into()));
    }
    if entries.is_empty() {
        return Err(Error::Data("masked factorization needs observed entries".into()));
    }
    let mean = entries.iter().map(|&(_, _, v)| v).sum::<f64>() / entries.len() as f64;
    let scale = (mean.max(f64::EPSILON) / k as f64).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Array2::from_shape_fn((n_rows, k), |_| rng.random::<f64>() * scale);
    let mut cols = Array2::from_shape_fn((n_cols, k), |_| rng.random::<f64>() * scale);

    let mut trace = vec![masked_objective(entries, &rows, &cols, lambda_u, lambda_i)];
    for _ in 0..max_iters {
        for _ in 0..NMF_INNER_UPDATES {
            update_factor(entries, &mut rows, &cols, lambda_u, false);
            update_factor(entries, &mut cols, &rows, lambda_i, true);
        }
        let objective = masked_objective(entries, &rows, &cols, lambda_u, lambda_i);
        if !objective.is_finite() {
            return Err(Error::Numerical(
                "masked factorization objective is not finite".into(),
            ));
        }
        let previous = *trace.last().unwrap();
        trace.push(objective);
        if previous > 0.0 && (previous - objective) / previous < tol {
            break;
        }
    }
    Ok(MaskedNmfFit {
        row_factors: rows,
        col_factors: cols,
        objective_trace: trace,
    })
}

/// One multiplicative update of `target` with `fixed` held constant.
/// With `transposed`, entries are read as (fixed_idx, target_idx, value).
fn update_factor(
    entries: &[(usize, usize, f64)],
    target: &mut Array2<f64>,
    fixed: &Array2<f64>,
    lambda: f64,
    transposed: bool,
) {
    let (n, k) = target.dim();
    let mut numerator = Array2::<f64>::zeros((n, k));
    let mut denominator = Array2::<f64>::zeros((n, k));
    for &(r, c, v) in entries {
        let (t, f) = if transposed { (c, r) } else { (r, c) };
        let pred = target.row(t).dot(&fixed.row(f));
        numerator.row_mut(t).scaled_add(v, &fixed.row(f));
        denominator.row_mut(t).scaled_add(pred, &fixed.row(f));
    }
    if lambda > 0.0 {
        denominator.scaled_add(lambda, target);
    }
    Zip::from(target)
        .and(&numerator)
        .and(&denominator)
        .for_each(|t, &num, &den| *t *= num / (den + NMF_EPS));
}

/// Factorizes training ratings directly (not residuals) with a masked
/// multiplicative-update solver.
#[allow(clippy::too_many_arguments)]
pub fn fit_nmf(
    train: &[ReviewRecord],
    k: usize,
    lambda_u: f64,
    lambda_i: f64,
    max_iters: usize,
    tol: f64,
    seed: u64,
) -> Result<FactorModel> {
    if train.is_empty() {
        return Err(Error::Data("cannot factorize an empty training set".into()));
    }
    let mut users: Vec<String> = Vec::new();
    let mut items: Vec<String> = Vec::new();
    let mut user_index: BTreeMap<&str, usize> = BTreeMap::new();
    let mut item_index: BTreeMap<&str, usize> = BTreeMap::new();
    for r in train {
        if !user_index.contains_key(r.user_id.as_str()) {
            user_index.insert(r.user_id.as_str(), users.len());
            users.push(r.user_id.clone());
        }
        if !item_index.contains_key(r.item_id.as_str()) {
            item_index.insert(r.item_id.as_str(), items.len());
            items.push(r.item_id.clone());
        }
    }
    if k > users.len().min(items.len()) {
        eprintln!(
            "warning: k={k} exceeds min(#users={}, #items={}); factorization proceeds",
            users.len(),
            items.len()
        );
    }
    let entries: Vec<(usize, usize, f64)> = train
        .iter()
        .map(|r| {
            (
                user_index[r.user_id.as_str()],
                item_index[r.item_id.as_str()],
                r.rating as f64,
            )
        })
        .collect();
    let fit = masked_nmf(
        &entries,
        users.len(),
        items.len(),
        k,
        lambda_u,
        lambda_i,
        max_iters,
        tol,
        seed,
    )?;
    let user_factors = users
        .iter()
        .enumerate()
        .map(|(idx, id)| (id.clone(), fit.row_factors.row(idx).to_vec()))
        .collect();
    let item_factors = items
        .iter()
        .enumerate()
        .map(|(idx, id)| (id.clone(), fit.col_factors.row(idx).to_vec()))
        .collect();
    Ok(FactorModel {
        user_factors,
        item_factors,
        k,
        lambda_u,
        lambda_i,
    })
}

/// Which text representation a model uses for user profiles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileKind {
    None,
    Raw,
    Latent,
}

impl std::str::FromStr for ProfileKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(ProfileKind::None),
            "raw" => Ok(ProfileKind::Raw),
            "latent" => Ok(ProfileKind::Latent),
            other => Err(Error::Config(format!("unknown profile kind '{other}'"))),
        }
    }
}

/// A user's aggregated text: binary bag of words of everything they
/// wrote, or its autoencoder code.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TextProfile {
    Raw(SparseBinaryVector),
    Latent { vector: Vec<f64>, alpha: f64 },
}

impl TextProfile {
    pub fn kind(&self) -> ProfileKind {
        match self {
            TextProfile::Raw(_) => ProfileKind::Raw,
            TextProfile::Latent { .. } => ProfileKind::Latent,
        }
    }
}

/// Builds one user's profile from their training reviews: the union bag
/// of words (raw) or the autoencoder code of that union (latent).
pub fn build_text_profile(
    user_records: &[&ReviewRecord],
    kind: ProfileKind,
    dict: &Dictionary,
    encoder: Option<&AutoencoderParams>,
    alpha: f64,
) -> Result<TextProfile> {
    let token_lists = user_records
        .iter()
        .flat_map(|r| r.sentences.iter().map(|s| s.tokens.as_slice()));
    let union = vectorize_all(token_lists, dict);
    match kind {
        ProfileKind::Raw => Ok(TextProfile::Raw(union)),
        ProfileKind::Latent => {
            let encoder = encoder.ok_or_else(|| {
                Error::Config("latent profiles require a trained autoencoder".into())
            })?;
            let code = encode(encoder, &union)?;
            Ok(TextProfile::Latent { vector: code.to_vec(), alpha })
        }
        ProfileKind::None => Err(Error::Config("profile kind 'none' has no profile".into())),
    }
}

/// Cosine similarity of two raw profiles; 0 when either is empty.
pub fn similarity_raw(p: &TextProfile, q: &TextProfile) -> Result<f64> {
    match (p, q) {
        (TextProfile::Raw(a), TextProfile::Raw(b)) => Ok(a.cosine(b)),
        _ => Err(Error::Config("similarity_raw requires two raw profiles".into())),
    }
}

/// Inverse Euclidean distance `1 / (alpha + ||p - q||)` of two latent
/// profiles.
pub fn similarity_latent(p: &TextProfile, q: &TextProfile) -> Result<f64> {
    match (p, q) {
        (
            TextProfile::Latent { vector: a, alpha },
            TextProfile::Latent { vector: b, .. },
        ) => {
            if a.len() != b.len() {
                return Err(Error::Data(format!(
                    "latent profile dimensions differ: {} vs {}",
                    a.len(),
                    b.len()
                )));
            }
            let dist = a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt();
            Ok(1.0 / (alpha + dist))
        }
        _ => Err(Error::Config("similarity_latent requires two latent profiles".into())),
    }
}

/// Dispatches on profile kind; kinds must match.
pub fn profile_similarity(p: &TextProfile, q: &TextProfile) -> Result<f64> {
    match p {
        TextProfile::Raw(_) => similarity_raw(p, q),
        TextProfile::Latent { .. } => similarity_latent(p, q),
    }
}

/// Per-item list of (user, rating) pairs from the training set, in
/// training order.
pub type TrainIndex = BTreeMap<String, Vec<(String, u8)>>;

pub fn build_train_index(train: &[ReviewRecord]) -> TrainIndex {
    let mut index: TrainIndex = BTreeMap::new();
    for r in train {
        index
            .entry(r.item_id.clone())
            .or_default()
            .push((r.user_id.clone(), r.rating));
    }
    index
}

/// Text-profile prediction term: the similarity-weighted sum of training
/// ratings for the item, divided by the item's training review count.
/// Items without training reviews (and users without any profile)
/// contribute 0.
pub fn predict_text_term(
    user: &str,
    item: &str,
    profiles: &BTreeMap<String, TextProfile>,
    train_index: &TrainIndex,
) -> f64 {
    let Some(reviews) = train_index.get(item) else {
        return 0.0;
    };
    if reviews.is_empty() {
        return 0.0;
    }
    let Some(target) = profiles.get(user) else {
        return 0.0;
    };
    let mut sum = 0.0;
    for (other, rating) in reviews {
        let other_profile = profiles
            .get(other)
            .expect("every training user has a profile");
        let sim = profile_similarity(other_profile, target)
            .expect("profiles within a model share one kind");
        sum += *rating as f64 * sim;
    }
    sum / reviews.len() as f64
}

fn solve_linear_5(mut a: [[f64; 5]; 5], mut b: [f64; 5]) -> Option<[f64; 5]> {
    let scale = a
        .iter()
        .flatten()
        .fold(0.0f64, |acc, &v| acc.max(v.abs()));
    let threshold = 1e-12 * scale.max(1.0);
    for col in 0..5 {
        let pivot_row = (col..5)
            .max_by(|&x, &y| a[x][col].abs().partial_cmp(&a[y][col].abs()).unwrap())?;
        if a[pivot_row][col].abs() < threshold {
            return None;
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        for row in col + 1..5 {
            let factor = a[row][col] / a[col][col];
            for c in col..5 {
                a[row][c] -= factor * a[col][c];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = [0.0; 5];
    for row in (0..5).rev() {
        let mut acc = b[row];
        for c in row + 1..5 {
            acc -= a[row][c] * x[c];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

/// Ordinary least squares of the targets on the five component columns,
/// solved by the normal equations with a 1e-8 ridge fallback when the
/// Gram matrix is singular.
pub fn fit_betas(components: &[[f64; 5]], targets: &[f64]) -> Result<[f64; 5]> {
    if components.len() != targets.len() {
        return Err(Error::Data("component rows and targets differ in length".into()));
    }
    if components.len() < 5 {
        return Err(Error::Data(format!(
            "need at least 5 fitting points, got {}",
            components.len()
        )));
    }
    let mut xtx = [[0.0f64; 5]; 5];
    let mut xty = [0.0f64; 5];
    for (row, &y) in components.iter().zip(targets) {
        for a in 0..5 {
            xty[a] += row[a] * y;
            for b in 0..5 {
                xtx[a][b] += row[a] * row[b];
            }
        }
    }
    if let Some(betas) = solve_linear_5(xtx, xty) {
        return Ok(betas);
    }
    let mut ridged = xtx;
    for (d, row) in ridged.iter_mut().enumerate() {
        row[d] += 1e-8;
    }
    solve_linear_5(ridged, xty)
        .ok_or_else(|| Error::Numerical("normal equations unsolvable even with ridge".into()))
}

/// Trained autoencoder together with its own dictionary.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EncoderBundle {
    pub params: AutoencoderParams,
    pub dict: Dictionary,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HybridSettings {
    pub profile: ProfileKind,
    pub k: usize,
    pub lambda_u: f64,
    pub lambda_i: f64,
    pub alpha: f64,
    pub seed: u64,
    pub max_iters: usize,
    pub tol: f64,
}

impl Default for HybridSettings {
    fn default() -> Self {
        HybridSettings {
            profile: ProfileKind::Raw,
            k: 16,
            lambda_u: 0.05,
            lambda_i: 0.05,
            alpha: 1.0,
            seed: 0,
            max_iters: 200,
            tol: 1e-6,
        }
    }
}

/// The five-component rating predictor with fitted combination weights.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HybridRatingModel {
    pub betas: [f64; 5],
    pub bias: BiasModel,
    pub factors: FactorModel,
    pub profiles: BTreeMap<String, TextProfile>,
    pub train_index: TrainIndex,
    pub raw_dict: Dictionary,
    pub encoder: Option<EncoderBundle>,
    pub settings: HybridSettings,
}

impl HybridRatingModel {
    /// The raw component predictions for one pair: overall mean, user
    /// mean, item mean, factor dot product and the text term, with the
    /// documented fallbacks for unseen users and items.
    pub fn component_vector(&self, user: &str, item: &str) -> [f64; 5] {
        let text_term = if self.settings.profile == ProfileKind::None {
            0.0
        } else {
            predict_text_term(user, item, &self.profiles, &self.train_index)
        };
        [
            self.bias.mean,
            self.bias.user_bias(user),
            self.bias.item_bias(item),
            predict_mf(&self.factors, user, item),
            text_term,
        ]
    }

    /// Unclamped weighted combination.
    pub fn predict_raw(&self, user: &str, item: &str) -> f64 {
        let comps = self.component_vector(user, item);
        self.betas.iter().zip(comps).map(|(b, c)| b * c).sum()
    }

    /// Final prediction, clamped to the rating scale.
    pub fn predict(&self, user: &str, item: &str) -> f64 {
        self.predict_raw(user, item).clamp(1.0, 5.0)
    }
}

/// Trains every component on `train` and fits the combination weights on
/// `fit_set` (the validation set in the standard protocol).
pub fn fit_hybrid(
    train: &[ReviewRecord],
    fit_set: &[ReviewRecord],
    raw_dict: Dictionary,
    encoder: Option<EncoderBundle>,
    settings: HybridSettings,
) -> Result<HybridRatingModel> {
    let bias = fit_biases(train)?;
    let factors = fit_nmf(
        train,
        settings.k,
        settings.lambda_u,
        settings.lambda_i,
        settings.max_iters,
        settings.tol,
        settings.seed,
    )?;
    let mut profiles: BTreeMap<String, TextProfile> = BTreeMap::new();
    if settings.profile != ProfileKind::None {
        let mut per_user: BTreeMap<&str, Vec<&ReviewRecord>> = BTreeMap::new();
        for r in train {
            per_user.entry(r.user_id.as_str()).or_default().push(r);
        }
        for (user, records) in per_user {
            let profile = match settings.profile {
                ProfileKind::Raw => {
                    build_text_profile(&records, ProfileKind::Raw, &raw_dict, None, settings.alpha)?
                }
                ProfileKind::Latent => {
                    let bundle = encoder.as_ref().ok_or_else(|| {
                        Error::Config("latent profiles require an autoencoder bundle".into())
                    })?;
                    build_text_profile(
                        &records,
                        ProfileKind::Latent,
                        &bundle.dict,
                        Some(&bundle.params),
                        settings.alpha,
                    )?
                }
                ProfileKind::None => unreachable!(),
            };
            profiles.insert(user.to_string(), profile);
        }
    }
    let train_index = build_train_index(train);
    let mut model = HybridRatingModel {
        betas: [0.0; 5],
        bias,
        factors,
        profiles,
        train_index,
        raw_dict,
        encoder,
        settings,
    };
    let components: Vec<[f64; 5]> = fit_set
        .iter()
        .map(|r| model.component_vector(&r.user_id, &r.item_id))
        .collect();
    let targets: Vec<f64> = fit_set.iter().map(|r| r.rating as f64).collect();
    model.betas = fit_betas(&components, &targets)?;
    Ok(model)
}

/// Mean squared error of a predictor over a test set.
pub fn evaluate_mse(
    predict: impl Fn(&str, &str) -> f64,
    test: &[ReviewRecord],
) -> Result<f64> {
    if test.is_empty() {
        return Err(Error::Data("cannot evaluate MSE on an empty set".into()));
    }
    let sum: f64 = test
        .iter()
        .map(|r| {
            let err = predict(&r.user_id, &r.item_id) - r.rating as f64;
            err * err
        })
        .sum();
    Ok(sum / test.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Dictionary;

    fn record(user: &str, item: &str, rating: u8, text: &str) -> ReviewRecord {
        ReviewRecord::new(user, item, rating, None, text)
    }

    #[test]
    fn biases_are_exact_means() {
        let train = vec![record("u", "a", 4, "t."), record("u", "b", 2, "t.")];
        let bias = fit_biases(&train).unwrap();
        assert_eq!(bias.mean, 3.0);
        assert_eq!(bias.user_bias("u"), 3.0);

        let train2 = vec![record("a", "i", 5, "t."), record("b", "i", 1, "t.")];
        let bias2 = fit_biases(&train2).unwrap();
        assert_eq!(bias2.mean, 3.0);
        assert_eq!(bias2.user_bias("a"), 5.0);
        assert_eq!(bias2.user_bias("b"), 1.0);
        assert_eq!(bias2.item_bias("i"), 3.0);
    }

    #[test]
    fn biases_fall_back_to_overall_mean() {
        let train = vec![record("u", "i", 4, "t.")];
        let bias = fit_biases(&train).unwrap();
        assert_eq!(bias.user_bias("stranger"), 4.0);
        assert_eq!(bias.item_bias("unknown"), 4.0);
    }

    #[test]
    fn biases_reject_empty_train() {
        assert!(matches!(fit_biases(&[]), Err(Error::Data(_))));
    }

    #[test]
    fn predict_mf_examples() {
        let mut model = FactorModel {
            user_factors: BTreeMap::new(),
            item_factors: BTreeMap::new(),
            k: 2,
            lambda_u: 0.0,
            lambda_i: 0.0,
        };
        model.user_factors.insert("u".into(), vec![1.0, 2.0]);
        model.user_factors.insert("z".into(), vec![0.0, 0.0]);
        model.item_factors.insert("i".into(), vec![3.0, 1.0]);
        assert_eq!(predict_mf(&model, "u", "i"), 5.0);
        assert_eq!(predict_mf(&model, "z", "i"), 0.0);
        assert_eq!(predict_mf(&model, "ghost", "i"), 0.0);
    }

    fn rank_one_entries(n_rows: usize, n_cols: usize, seed: u64) -> Vec<(usize, usize, f64)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u: Vec<f64> = (0..n_rows).map(|_| 0.5 + rng.random::<f64>()).collect();
        let v: Vec<f64> = (0..n_cols).map(|_| 0.5 + rng.random::<f64>()).collect();
        let mut entries = Vec::new();
        for (r, &a) in u.iter().enumerate() {
            for (c, &b) in v.iter().enumerate() {
                entries.push((r, c, a * b));
            }
        }
        entries
    }

    #[test]
    fn nmf_recovers_a_rank_one_matrix() {
        let entries = rank_one_entries(8, 6, 1);
        let fit = masked_nmf(&entries, 8, 6, 1, 0.0, 0.0, 500, 0.0, 7).unwrap();
        let initial = fit.objective_trace[0];
        let last = *fit.objective_trace.last().unwrap();
        assert!(last < 1e-6 * initial, "residual {last} vs initial {initial}");
    }

    #[test]
    fn nmf_objective_is_monotone_and_factors_non_negative() {
        for seed in 0..5u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
            let entries: Vec<(usize, usize, f64)> = (0..120)
                .map(|_| {
                    (
                        rng.random_range(0..10),
                        rng.random_range(0..12),
                        1.0 + 4.0 * rng.random::<f64>(),
                    )
                })
                .collect();
            let fit = masked_nmf(&entries, 10, 12, 4, 0.1, 0.2, 60, 0.0, seed).unwrap();
            for pair in fit.objective_trace.windows(2) {
                assert!(pair[1] <= pair[0] + 1e-10, "objective increased: {pair:?}");
            }
            assert!(fit.row_factors.iter().all(|&v| v >= 0.0));
            assert!(fit.col_factors.iter().all(|&v| v >= 0.0));
        }
    }

    #[test]
    fn nmf_ignores_masked_out_cells() {
        // Two full matrices differing only outside the mask produce the
        // same observed entries, hence bit-identical factors.
        let mask: Vec<(usize, usize)> = vec![(0, 0), (0, 2), (1, 1), (2, 0), (2, 2), (3, 1)];
        let base = Array2::from_shape_fn((4, 3), |(r, c)| 1.0 + ((r * 3 + c) % 5) as f64);
        let mut perturbed = base.clone();
        for r in 0..4 {
            for c in 0..3 {
                if !mask.contains(&(r, c)) {
                    perturbed[[r, c]] += 100.0;
                }
            }
        }
        let extract = |m: &Array2<f64>| -> Vec<(usize, usize, f64)> {
            mask.iter().map(|&(r, c)| (r, c, m[[r, c]])).collect()
        };
        let fit_a = masked_nmf(&extract(&base), 4, 3, 2, 0.01, 0.01, 50, 0.0, 3).unwrap();
        let fit_b = masked_nmf(&extract(&perturbed), 4, 3, 2, 0.01, 0.01, 50, 0.0, 3).unwrap();
        assert_eq!(fit_a.row_factors, fit_b.row_factors);
        assert_eq!(fit_a.col_factors, fit_b.col_factors);
    }

    #[test]
    fn fit_nmf_builds_factor_maps() {
        let train = vec![
            record("u1", "i1", 4, "t."),
            record("u1", "i2", 2, "t."),
            record("u2", "i1", 5, "t."),
        ];
        let model = fit_nmf(&train, 2, 0.05, 0.05, 80, 0.0, 0).unwrap();
        assert_eq!(model.user_factors.len(), 2);
        assert_eq!(model.item_factors.len(), 2);
        assert!(model.user_factors.values().all(|v| v.len() == 2));
        assert!(predict_mf(&model, "u1", "i1") > 0.0);
    }

    fn raw_profile(indices: &[u32]) -> TextProfile {
        TextProfile::Raw(SparseBinaryVector::from_indices(16, indices.iter().copied()))
    }

    fn latent_profile(vector: Vec<f64>, alpha: f64) -> TextProfile {
        TextProfile::Latent { vector, alpha }
    }

    #[test]
    fn raw_profile_is_union_of_texts() {
        let dict = Dictionary::from_tokens(["a", "b", "c"]);
        let r1 = record("u", "i1", 3, "a b");
        let r2 = record("u", "i2", 4, "b c");
        let profile =
            build_text_profile(&[&r1, &r2], ProfileKind::Raw, &dict, None, 1.0).unwrap();
        match profile {
            TextProfile::Raw(v) => assert_eq!(v.active, vec![0, 1, 2]),
            _ => panic!("expected raw profile"),
        }
    }

    #[test]
    fn empty_profile_and_latent_range() {
        let dict = Dictionary::from_tokens(["a"]);
        let profile = build_text_profile(&[], ProfileKind::Raw, &dict, None, 1.0).unwrap();
        match &profile {
            TextProfile::Raw(v) => assert!(v.is_empty()),
            _ => panic!(),
        }
        let encoder = AutoencoderParams::zeros(3, 1);
        let r = record("u", "i", 3, "a");
        let latent =
            build_text_profile(&[&r], ProfileKind::Latent, &dict, Some(&encoder), 1.0).unwrap();
        match latent {
            TextProfile::Latent { vector, .. } => {
                assert_eq!(vector.len(), 3);
                assert!(vector.iter().all(|&v| v > 0.0 && v < 1.0));
            }
            _ => panic!(),
        }
    }

    #[test]
    fn latent_without_encoder_is_an_error() {
        let dict = Dictionary::from_tokens(["a"]);
        assert!(matches!(
            build_text_profile(&[], ProfileKind::Latent, &dict, None, 1.0),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn similarity_raw_examples() {
        let p = raw_profile(&[0, 1]);
        let q = raw_profile(&[1, 2]);
        let disjoint = raw_profile(&[5, 6]);
        assert_eq!(similarity_raw(&p, &p).unwrap(), 1.0);
        assert_eq!(similarity_raw(&p, &disjoint).unwrap(), 0.0);
        assert_eq!(similarity_raw(&p, &q).unwrap(), 0.5);
        assert!(similarity_raw(&p, &latent_profile(vec![0.1], 1.0)).is_err());
    }

    #[test]
    fn similarity_latent_examples() {
        let p = latent_profile(vec![0.0, 0.0], 1.0);
        assert_eq!(similarity_latent(&p, &p).unwrap(), 1.0);
        let q = latent_profile(vec![3.0, 0.0], 1.0);
        assert_eq!(similarity_latent(&p, &q).unwrap(), 0.25);
        let half = latent_profile(vec![0.0, 0.0], 0.5);
        let half2 = latent_profile(vec![0.0, 0.0], 0.5);
        assert_eq!(similarity_latent(&half, &half2).unwrap(), 2.0);
        let bad = latent_profile(vec![0.0], 1.0);
        assert!(similarity_latent(&p, &bad).is_err());
    }

    #[test]
    fn similarity_ranges() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..50 {
            let a: Vec<u32> = (0..16).filter(|_| rng.random::<f64>() < 0.4).collect();
            let b: Vec<u32> = (0..16).filter(|_| rng.random::<f64>() < 0.4).collect();
            let raw = similarity_raw(&raw_profile(&a), &raw_profile(&b)).unwrap();
            assert!((0.0..=1.0).contains(&raw));
            let alpha = 0.5 + rng.random::<f64>();
            let p = latent_profile((0..4).map(|_| rng.random::<f64>()).collect(), alpha);
            let q = latent_profile((0..4).map(|_| rng.random::<f64>()).collect(), alpha);
            let latent = similarity_latent(&p, &q).unwrap();
            assert!(latent > 0.0 && latent <= 1.0 / alpha);
        }
    }

    #[test]
    fn text_term_examples() {
        let mut profiles = BTreeMap::new();
        profiles.insert("target".to_string(), raw_profile(&[0, 1]));
        profiles.insert("same".to_string(), raw_profile(&[0, 1]));
        profiles.insert("half_a".to_string(), raw_profile(&[1, 2]));
        profiles.insert("half_b".to_string(), raw_profile(&[0, 3]));
        let mut index: TrainIndex = BTreeMap::new();
        index.insert("solo".into(), vec![("same".into(), 4)]);
        index.insert(
            "pair".into(),
            vec![("half_a".into(), 4), ("half_b".into(), 2)],
        );
        assert_eq!(predict_text_term("target", "solo", &profiles, &index), 4.0);
        assert_eq!(predict_text_term("target", "pair", &profiles, &index), 1.5);
        assert_eq!(predict_text_term("target", "nobody", &profiles, &index), 0.0);
        // bounded by the top rating times the largest similarity
        for item in ["solo", "pair"] {
            let g = predict_text_term("target", item, &profiles, &index);
            assert!((0.0..=5.0).contains(&g));
        }
    }

    #[test]
    fn betas_recover_an_exact_component() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut components = Vec::new();
        let mut targets = Vec::new();
        for _ in 0..40 {
            let row = [
                rng.random::<f64>(),
                rng.random::<f64>(),
                rng.random::<f64>(),
                rng.random::<f64>(),
                rng.random::<f64>(),
            ];
            targets.push(row[2]);
            components.push(row);
        }
        let betas = fit_betas(&components, &targets).unwrap();
        for (idx, beta) in betas.iter().enumerate() {
            let expected = if idx == 2 { 1.0 } else { 0.0 };
            assert!(
                (beta - expected).abs() < 1e-6,
                "beta[{idx}] = {beta}, expected {expected}"
            );
        }
    }

    #[test]
    fn betas_zero_out_a_zero_column() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut components = Vec::new();
        let mut targets = Vec::new();
        for _ in 0..30 {
            let row = [rng.random::<f64>(), rng.random::<f64>(), 0.0, rng.random::<f64>(), rng.random::<f64>()];
            targets.push(row[0] + 0.5 * row[3]);
            components.push(row);
        }
        let betas = fit_betas(&components, &targets).unwrap();
        assert!(betas[2].abs() < 1e-6);
    }

    #[test]
    fn betas_satisfy_the_normal_equations() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let components: Vec<[f64; 5]> = (0..60)
            .map(|_| {
                [
                    1.0,
                    rng.random::<f64>() * 4.0 + 1.0,
                    rng.random::<f64>() * 4.0 + 1.0,
                    rng.random::<f64>() * 4.0,
                    rng.random::<f64>(),
                ]
            })
            .collect();
        let targets: Vec<f64> = components
            .iter()
            .map(|row| 0.3 * row[1] + 0.6 * row[2] + rng.random::<f64>() * 0.1)
            .collect();
        let betas = fit_betas(&components, &targets).unwrap();
        let m = components.len() as f64;
        for a in 0..5 {
            let gradient: f64 = components
                .iter()
                .zip(&targets)
                .map(|(row, &y)| {
                    let pred: f64 = row.iter().zip(betas).map(|(x, b)| x * b).sum();
                    row[a] * (pred - y)
                })
                .sum::<f64>()
                / m;
            assert!(gradient.abs() < 1e-6, "gradient[{a}] = {gradient}");
        }
    }

    #[test]
    fn betas_combination_dominates_single_components() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let components: Vec<[f64; 5]> = (0..80)
            .map(|_| {
                [
                    3.0,
                    rng.random::<f64>() * 4.0 + 1.0,
                    rng.random::<f64>() * 4.0 + 1.0,
                    rng.random::<f64>() * 4.0,
                    rng.random::<f64>() * 2.0,
                ]
            })
            .collect();
        let targets: Vec<f64> = components
            .iter()
            .map(|row| (0.4 * row[1] + 0.5 * row[2] + rng.random::<f64>()).clamp(1.0, 5.0))
            .collect();
        let betas = fit_betas(&components, &targets).unwrap();
        let mse = |predict: &dyn Fn(&[f64; 5]) -> f64| {
            components
                .iter()
                .zip(&targets)
                .map(|(row, &y)| (predict(row) - y) * (predict(row) - y))
                .sum::<f64>()
                / components.len() as f64
        };
        let combined = mse(&|row| row.iter().zip(betas).map(|(x, b)| x * b).sum());
        for idx in 0..5 {
            let single = mse(&|row| row[idx]);
            assert!(combined <= single + 1e-9);
        }
    }

    #[test]
    fn fit_betas_rejects_tiny_fit_sets() {
        let components = vec![[1.0; 5]; 4];
        let targets = vec![1.0; 4];
        assert!(matches!(
            fit_betas(&components, &targets),
            Err(Error::Data(_))
        ));
    }

    #[test]
    fn hybrid_predictions_are_clamped() {
        let train = vec![
            record("u1", "i1", 5, "great beer here."),
            record("u1", "i2", 4, "solid lager taste."),
            record("u2", "i1", 5, "great beer indeed."),
            record("u2", "i2", 3, "passable brew overall."),
            record("u3", "i1", 4, "tasty and great."),
        ];
        let val = vec![
            record("u1", "i1", 5, "v."),
            record("u2", "i2", 3, "v."),
            record("u3", "i1", 4, "v."),
            record("u1", "i2", 4, "v."),
            record("u2", "i1", 5, "v."),
        ];
        let dict = crate::corpus::build_dictionary(
            &train,
            &crate::corpus::DictionaryConfig {
                max_size: 100,
                min_doc_freq: 0,
                remove_stopwords: false,
            },
        )
        .unwrap();
        let mut model = fit_hybrid(
            &train,
            &val,
            dict,
            None,
            HybridSettings { k: 2, ..HybridSettings::default() },
        )
        .unwrap();
        // Force extreme weights to exercise the clamp.
        model.betas = [10.0, 0.0, 0.0, 0.0, 0.0];
        assert_eq!(model.predict("u1", "i1"), 5.0);
        model.betas = [0.01, 0.0, 0.0, 0.0, 0.0];
        assert_eq!(model.predict("u1", "i1"), 1.0);
        model.betas = [1.0, 0.0, 0.0, 0.0, 0.0];
        let mean = model.bias.mean;
        assert_eq!(model.predict("u1", "i1"), mean);
    }

    #[test]
    fn mse_examples() {
        let test = vec![record("u", "a", 1, "t."), record("u", "b", 5, "t.")];
        let perfect = evaluate_mse(
            |_, item| if item == "a" { 1.0 } else { 5.0 },
            &test,
        )
        .unwrap();
        assert_eq!(perfect, 0.0);
        let constant = evaluate_mse(|_, _| 3.0, &test).unwrap();
        assert_eq!(constant, 4.0);
        assert!(evaluate_mse(|_, _| 0.0, &[]).is_err());
    }
}
