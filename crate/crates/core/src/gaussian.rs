//! Linear Gaussian model of counterfactual augmentation.
//!
//! Examples are `x = [x_b1, x_b2, ...]` with a binary label `y` drawn
//! uniformly from `{-1, +1}` and each feature block drawn from
//! `N(y * mean, sigma^2 I)` conditionally independent given the label.
//! Blocks are either *robust* (their joint distribution with the label is
//! invariant at test time) or *spurious* (it may shift).
//!
//! The module provides the closed-form weight vectors for this model
//! (`closed_form_weights`, `invariant_weights`, `incomplete_weights`), an exact
//! empirical least-squares learner that serves as their Monte Carlo oracle,
//! the error functional `E[(w_inv^T x - w^T x)^2]` evaluated exactly through
//! the second-moment matrix, and label-flipping counterfactual edits
//! (`optimal_edit`, `incomplete_edit`, `apply`, `augment`).

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::ops::Range;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::linalg::{self, LinalgError, SymMatrix};

#[derive(Debug, Error, PartialEq)]
pub enum GaussianError {
    #[error("invalid spec: {reason}")]
    InvalidSpec { reason: String },
    #[error("dataset must contain at least one sample")]
    EmptyDataset,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("unknown block `{name}`")]
    UnknownBlock { name: String },
    #[error("block `{name}` is spurious; counterfactual edits may only perturb robust blocks")]
    SpuriousEdit { name: String },
    #[error("edit set must name at least one block")]
    EmptyEditSet,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Whether a feature block keeps its relation to the label at test time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum BlockRole {
    Robust,
    Spurious,
}

impl BlockRole {
    pub fn as_str(&self) -> &'static str {
        match self {
            BlockRole::Robust => "robust",
            BlockRole::Spurious => "spurious",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "robust" => Some(BlockRole::Robust),
            "spurious" => Some(BlockRole::Spurious),
            _ => None,
        }
    }
}

/// One feature block: a per-class mean vector and an isotropic
/// class-conditional standard deviation.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureBlock {
    pub name: String,
    pub role: BlockRole,
    pub mean: Vec<f64>,
    pub sigma: f64,
}

impl FeatureBlock {
    pub fn new(name: &str, role: BlockRole, mean: Vec<f64>, sigma: f64) -> Self {
        Self {
            name: name.to_string(),
            role,
            mean,
            sigma,
        }
    }

    pub fn robust(name: &str, mean: Vec<f64>, sigma: f64) -> Self {
        Self::new(name, BlockRole::Robust, mean, sigma)
    }

    pub fn spurious(name: &str, mean: Vec<f64>, sigma: f64) -> Self {
        Self::new(name, BlockRole::Spurious, mean, sigma)
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }
}

/// How block names map onto coordinate ranges of the concatenated feature
/// space. Ranges partition `[0, d)` in block order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockLayout {
    entries: Vec<(String, usize, usize)>, // name, start, len
    dim: usize,
}

impl BlockLayout {
    fn from_blocks(blocks: &[FeatureBlock]) -> Self {
        let mut entries = Vec::with_capacity(blocks.len());
        let mut start = 0;
        for b in blocks {
            entries.push((b.name.clone(), start, b.dim()));
            start += b.dim();
        }
        Self {
            entries,
            dim: start,
        }
    }

    /// A single anonymous block spanning the whole space; used for models
    /// fitted from raw samples, which carry no block structure.
    pub fn single(dim: usize) -> Self {
        Self {
            entries: vec![("all".to_string(), 0, dim)],
            dim,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn range_of(&self, name: &str) -> Option<Range<usize>> {
        self.entries
            .iter()
            .find(|(n, _, _)| n == name)
            .map(|(_, start, len)| *start..*start + *len)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Range<usize>)> {
        self.entries
            .iter()
            .map(|(n, start, len)| (n.as_str(), *start..*start + *len))
    }
}

/// The generative model: an ordered list of feature blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianSpec {
    blocks: Vec<FeatureBlock>,
    layout: BlockLayout,
}

impl GaussianSpec {
    /// Validates and builds a spec. Requires every block to have dimension
    /// >= 1 and a finite `sigma > 0`, unique block names, and at least one
    /// > robust and one spurious block.
    pub fn new(blocks: Vec<FeatureBlock>) -> Result<Self, GaussianError> {
        let invalid = |reason: &str| GaussianError::InvalidSpec {
            reason: reason.to_string(),
        };
        if blocks.is_empty() {
            return Err(invalid("no feature blocks"));
        }
        for b in &blocks {
            if b.mean.is_empty() {
                return Err(GaussianError::InvalidSpec {
                    reason: format!("block `{}` has dimension 0", b.name),
                });
            }
            if b.sigma <= 0.0 || !b.sigma.is_finite() {
                return Err(GaussianError::InvalidSpec {
                    reason: format!("block `{}` must have finite sigma > 0", b.name),
                });
            }
            if b.mean.iter().any(|m| !m.is_finite()) {
                return Err(GaussianError::InvalidSpec {
                    reason: format!("block `{}` has a non-finite mean entry", b.name),
                });
            }
        }
        for (i, b) in blocks.iter().enumerate() {
            if blocks[..i].iter().any(|other| other.name == b.name) {
                return Err(GaussianError::InvalidSpec {
                    reason: format!("duplicate block name `{}`", b.name),
                });
            }
        }
        if !blocks.iter().any(|b| b.role == BlockRole::Robust) {
            return Err(invalid("at least one robust block is required"));
        }
        if !blocks.iter().any(|b| b.role == BlockRole::Spurious) {
            return Err(invalid("at least one spurious block is required"));
        }
        let layout = BlockLayout::from_blocks(&blocks);
        Ok(Self { blocks, layout })
    }

    pub fn blocks(&self) -> &[FeatureBlock] {
        &self.blocks
    }

    pub fn layout(&self) -> &BlockLayout {
        &self.layout
    }

    /// Total feature dimension `d`.
    pub fn dim(&self) -> usize {
        self.layout.dim()
    }

    fn block(&self, name: &str) -> Result<&FeatureBlock, GaussianError> {
        self.blocks
            .iter()
            .find(|b| b.name == name)
            .ok_or_else(|| GaussianError::UnknownBlock {
                name: name.to_string(),
            })
    }

    /// The concatenated per-class mean vector `mu = E[y x]`.
    pub fn mean_vector(&self) -> Vec<f64> {
        self.blocks.iter().flat_map(|b| b.mean.iter().copied()).collect()
    }

    /// Draws `n` labeled samples: `y` uniform over `{-1, +1}`, then each
    /// block from `N(y * mean, sigma^2 I)`. Deterministic for a fixed seed.
    pub fn sample_dataset(&self, n: usize, seed: u64) -> Result<Vec<LabeledSample>, GaussianError> {
        if n == 0 {
            return Err(GaussianError::EmptyDataset);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut samples = Vec::with_capacity(n);
        for _ in 0..n {
            let y = if rng.random::<bool>() { 1.0 } else { -1.0 };
            let mut x = Vec::with_capacity(self.dim());
            for b in &self.blocks {
                for &m in &b.mean {
                    let eps: f64 = rng.sample(StandardNormal);
                    x.push(y * m + b.sigma * eps);
                }
            }
            samples.push(LabeledSample { x, y });
        }
        Ok(samples)
    }

    /// The closed-form weights `[Sigma_b^{-1} mu_b]` over every block, i.e.
    /// `mean / sigma^2` per coordinate, using the class-conditional
    /// covariances `Sigma_b = sigma_b^2 I`. See `fit_least_squares` for the
    /// exact empirical minimizer; the two agree in direction, not in scale
    /// (the minimizer carries a rank-one correction factor).
    pub fn closed_form_weights(&self) -> LinearModel {
        let weights = self
            .blocks
            .iter()
            .flat_map(|b| {
                let inv_var = 1.0 / (b.sigma * b.sigma);
                b.mean.iter().map(move |m| m * inv_var)
            })
            .collect();
        LinearModel {
            weights,
            layout: self.layout.clone(),
        }
    }

    /// The robust model: `mean / sigma^2` on robust blocks, exactly zero on
    /// every spurious coordinate.
    pub fn invariant_weights(&self) -> LinearModel {
        let names: Vec<&str> = self
            .blocks
            .iter()
            .filter(|b| b.role == BlockRole::Robust)
            .map(|b| b.name.as_str())
            .collect();
        self.incomplete_weights(&names)
            .expect("spec always has a robust block")
    }

    /// The closed-form model learned from incompletely augmented data:
    /// `mean / sigma^2` on the named (edited) robust blocks, zero elsewhere.
    /// Unedited robust blocks become indistinguishable from spurious ones.
    pub fn incomplete_weights(&self, edited: &[&str]) -> Result<LinearModel, GaussianError> {
        self.check_edit_set(edited)?;
        let weights = self
            .blocks
            .iter()
            .flat_map(|b| {
                let scale = if edited.contains(&b.name.as_str()) {
                    1.0 / (b.sigma * b.sigma)
                } else {
                    0.0
                };
                b.mean.iter().map(move |m| m * scale)
            })
            .collect();
        Ok(LinearModel {
            weights,
            layout: self.layout.clone(),
        })
    }

    /// The second-moment matrix `M = E[x x^T]`: `sigma_b^2 I + mu_b mu_b^T`
    /// on the (b, b) diagonal block and `mu_a mu_b^T` across blocks.
    pub fn second_moment(&self) -> SecondMoment {
        let d = self.dim();
        let mu = self.mean_vector();
        let mut m = SymMatrix::zeros(d);
        for i in 0..d {
            for j in 0..d {
                m.set(i, j, mu[i] * mu[j]);
            }
        }
        for (b, (_, range)) in self.blocks.iter().zip(self.layout.iter()) {
            let var = b.sigma * b.sigma;
            for i in range {
                m.set(i, i, m.get(i, i) + var);
            }
        }
        SecondMoment { matrix: m }
    }

    /// The error of `w` against the robust model:
    /// `E[(w_inv^T x - w^T x)^2] = (w_inv - w)^T M (w_inv - w)`,
    /// evaluated exactly. Zero exactly when `w` equals the robust model.
    pub fn model_error(&self, model: &LinearModel) -> Result<f64, GaussianError> {
        if model.weights.len() != self.dim() {
            return Err(GaussianError::DimensionMismatch {
                expected: self.dim(),
                got: model.weights.len(),
            });
        }
        let w_inv = self.invariant_weights();
        let diff: Vec<f64> = w_inv
            .weights
            .iter()
            .zip(&model.weights)
            .map(|(a, b)| a - b)
            .collect();
        Ok(self.second_moment().matrix.quadratic_form(&diff))
    }

    /// Monte Carlo estimate of the same error over the given samples.
    /// Returns `(estimate, standard_error)`.
    pub fn mc_model_error(
        &self,
        model: &LinearModel,
        samples: &[LabeledSample],
    ) -> Result<(f64, f64), GaussianError> {
        if model.weights.len() != self.dim() {
            return Err(GaussianError::DimensionMismatch {
                expected: self.dim(),
                got: model.weights.len(),
            });
        }
        if samples.is_empty() {
            return Err(GaussianError::EmptyDataset);
        }
        let w_inv = self.invariant_weights();
        let diff: Vec<f64> = w_inv
            .weights
            .iter()
            .zip(&model.weights)
            .map(|(a, b)| a - b)
            .collect();
        let n = samples.len() as f64;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for s in samples {
            let proj = linalg::dot(&diff, &s.x);
            let sq = proj * proj;
            sum += sq;
            sum_sq += sq * sq;
        }
        let mean = sum / n;
        let var = (sum_sq / n - mean * mean).max(0.0);
        Ok((mean, libm::sqrt(var / n)))
    }

    /// The label-flipping edit that maximizes the likelihood of the flipped
    /// label: `-2 mean` on every robust block, zero on spurious blocks.
    pub fn optimal_edit(&self) -> EditVector {
        let names: Vec<&str> = self
            .blocks
            .iter()
            .filter(|b| b.role == BlockRole::Robust)
            .map(|b| b.name.as_str())
            .collect();
        self.incomplete_edit(&names)
            .expect("spec always has a robust block")
    }

    /// An edit restricted to the named robust blocks: `-2 mean` there, zero
    /// displacement everywhere else. Rejects spurious or unknown names.
    pub fn incomplete_edit(&self, edited: &[&str]) -> Result<EditVector, GaussianError> {
        self.check_edit_set(edited)?;
        let displacement = self
            .blocks
            .iter()
            .flat_map(|b| {
                let scale = if edited.contains(&b.name.as_str()) {
                    -2.0
                } else {
                    0.0
                };
                b.mean.iter().map(move |m| m * scale)
            })
            .collect();
        Ok(EditVector {
            displacement,
            layout: self.layout.clone(),
        })
    }

    fn check_edit_set(&self, edited: &[&str]) -> Result<(), GaussianError> {
        if edited.is_empty() {
            return Err(GaussianError::EmptyEditSet);
        }
        for name in edited {
            let block = self.block(name)?;
            if block.role == BlockRole::Spurious {
                return Err(GaussianError::SpuriousEdit {
                    name: block.name.clone(),
                });
            }
        }
        Ok(())
    }

    /// Posterior probability of `y = +1` given `x` under the generative
    /// model with its uniform label prior:
    /// `logistic(2 * sum_b mean_b^T x_b / sigma_b^2)`.
    pub fn class_posterior(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dim(), "x length must equal the model dimension");
        let score = 2.0 * linalg::dot(&self.closed_form_weights().weights, x);
        logistic(score)
    }

    /// Average log-likelihood of the flipped label over the samples after
    /// applying the edit: `mean_i log p(x_i + y_i z | -y_i)` under the
    /// class-conditional Gaussian densities.
    pub fn flip_log_likelihood(
        &self,
        samples: &[LabeledSample],
        edit: &EditVector,
    ) -> Result<f64, GaussianError> {
        if edit.displacement.len() != self.dim() {
            return Err(GaussianError::DimensionMismatch {
                expected: self.dim(),
                got: edit.displacement.len(),
            });
        }
        if samples.is_empty() {
            return Err(GaussianError::EmptyDataset);
        }
        let mu = self.mean_vector();
        let mut total = 0.0;
        for s in samples {
            let mut ll = 0.0;
            for (b, (_, range)) in self.blocks.iter().zip(self.layout.iter()) {
                let var = b.sigma * b.sigma;
                let mut sq = 0.0;
                for i in range.clone() {
                    // Edited coordinate under the flipped label -y: the
                    // target mean is -y * mu, so the residual is
                    // x + y*z + y*mu.
                    let r = s.x[i] + s.y * edit.displacement[i] + s.y * mu[i];
                    sq += r * r;
                }
                ll -= sq / (2.0 * var)
                    + 0.5 * (range.len() as f64) * libm::log(2.0 * core::f64::consts::PI * var);
            }
            total += ll;
        }
        Ok(total / samples.len() as f64)
    }

    /// Numerically maximizes [`Self::flip_log_likelihood`] over the
    /// displacement of the named robust blocks by gradient ascent on the
    /// Monte Carlo objective (all other blocks stay at zero displacement).
    ///
    /// With the population expectation the maximizer is `-2 mean` per edited
    /// block; on a finite sample it lands within sampling error of that.
    pub fn maximize_flip_likelihood(
        &self,
        samples: &[LabeledSample],
        edited: &[&str],
    ) -> Result<EditVector, GaussianError> {
        self.check_edit_set(edited)?;
        if samples.is_empty() {
            return Err(GaussianError::EmptyDataset);
        }
        for s in samples {
            if s.x.len() != self.dim() {
                return Err(GaussianError::DimensionMismatch {
                    expected: self.dim(),
                    got: s.x.len(),
                });
            }
        }
        // Sufficient statistic of the quadratic objective: t = mean(y * x).
        let n = samples.len() as f64;
        let mut t = vec![0.0; self.dim()];
        for s in samples {
            for (ti, xi) in t.iter_mut().zip(&s.x) {
                *ti += s.y * xi;
            }
        }
        for ti in &mut t {
            *ti /= n;
        }

        let mu = self.mean_vector();
        let mut z = vec![0.0; self.dim()];
        let edited_ranges: Vec<Range<usize>> = self
            .blocks
            .iter()
            .zip(self.layout.iter())
            .filter(|(b, _)| edited.contains(&b.name.as_str()))
            .map(|(_, (_, range))| range)
            .collect();

        // d/dz_i of the average log-likelihood is -(z_i + mu_i + t_i) / var;
        // ascend with a step proportional to var so every block converges at
        // the same geometric rate.
        let step = 0.5;
        for _ in 0..200 {
            let mut max_grad = 0.0_f64;
            for range in &edited_ranges {
                for i in range.clone() {
                    let grad = -(z[i] + mu[i] + t[i]);
                    z[i] += step * grad;
                    max_grad = max_grad.max(grad.abs());
                }
            }
            if max_grad < 1e-12 {
                break;
            }
        }
        Ok(EditVector {
            displacement: z,
            layout: self.layout.clone(),
        })
    }
}

/// One example: a feature vector and its label in `{-1, +1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSample {
    pub x: Vec<f64>,
    pub y: f64,
}

/// A linear model `y = w^T x` over the concatenated feature space.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    layout: BlockLayout,
}

impl LinearModel {
    /// Wraps raw weights with no block structure.
    pub fn from_weights(weights: Vec<f64>) -> Self {
        let layout = BlockLayout::single(weights.len());
        Self { weights, layout }
    }

    pub fn layout(&self) -> &BlockLayout {
        &self.layout
    }

    /// The weight coordinates of a named block, if the layout has one.
    pub fn block(&self, name: &str) -> Option<&[f64]> {
        self.layout.range_of(name).map(|r| &self.weights[r])
    }
}

/// A label-dependent displacement: applying it to `(x, y)` yields
/// `(x + y * z, -y)`, so examples of opposite labels move in opposite
/// directions. Unedited blocks carry zero displacement.
#[derive(Debug, Clone, PartialEq)]
pub struct EditVector {
    displacement: Vec<f64>,
    layout: BlockLayout,
}

impl EditVector {
    pub fn displacement(&self) -> &[f64] {
        &self.displacement
    }

    pub fn layout(&self) -> &BlockLayout {
        &self.layout
    }

    pub fn block(&self, name: &str) -> Option<&[f64]> {
        self.layout.range_of(name).map(|r| &self.displacement[r])
    }

    /// Produces the counterfactual `(x + y * z, -y)`. Applying the same edit
    /// twice returns the original sample: the second application is scaled by
    /// the flipped label, cancelling the displacement.
    pub fn apply(&self, sample: &LabeledSample) -> Result<LabeledSample, GaussianError> {
        if sample.x.len() != self.displacement.len() {
            return Err(GaussianError::DimensionMismatch {
                expected: self.displacement.len(),
                got: sample.x.len(),
            });
        }
        let x = sample
            .x
            .iter()
            .zip(&self.displacement)
            .map(|(xi, zi)| xi + sample.y * zi)
            .collect();
        Ok(LabeledSample {
            x,
            y: -sample.y,
        })
    }
}

/// The original samples plus the counterfactual of each; `2n` in total.
pub fn augment(
    samples: &[LabeledSample],
    edit: &EditVector,
) -> Result<Vec<LabeledSample>, GaussianError> {
    if samples.is_empty() {
        return Err(GaussianError::EmptyDataset);
    }
    let mut out = Vec::with_capacity(samples.len() * 2);
    out.extend_from_slice(samples);
    for s in samples {
        out.push(edit.apply(s)?);
    }
    Ok(out)
}

/// The exact empirical least-squares minimizer of `mean (w^T x - y)^2`,
/// solved from the normal equations `(mean x x^T) w = mean y x` by Cholesky.
/// Fails with a singular-matrix error when the empirical second moment is
/// rank-deficient (fewer than `d` distinct samples, duplicated data, ...).
#[allow(clippy::needless_range_loop)]
pub fn fit_least_squares(samples: &[LabeledSample]) -> Result<LinearModel, GaussianError> {
    let d = match samples.first() {
        Some(s) => s.x.len(),
        None => return Err(GaussianError::EmptyDataset),
    };
    let n = samples.len() as f64;
    let mut moment = SymMatrix::zeros(d);
    let mut rhs = vec![0.0; d];
    for s in samples {
        if s.x.len() != d {
            return Err(GaussianError::DimensionMismatch {
                expected: d,
                got: s.x.len(),
            });
        }
        for i in 0..d {
            rhs[i] += s.y * s.x[i];
            for j in i..d {
                moment.add_symmetric(i, j, s.x[i] * s.x[j]);
            }
        }
    }
    for i in 0..d {
        rhs[i] /= n;
        for j in 0..d {
            moment.set(i, j, moment.get(i, j) / n);
        }
    }
    let weights = moment.solve_spd(&rhs)?;
    Ok(LinearModel::from_weights(weights))
}

/// Empirical `E[x x^T]` with a per-entry standard error, for Monte Carlo
/// checks against [`GaussianSpec::second_moment`].
pub fn empirical_second_moment(
    samples: &[LabeledSample],
) -> Result<(SymMatrix, SymMatrix), GaussianError> {
    let d = match samples.first() {
        Some(s) => s.x.len(),
        None => return Err(GaussianError::EmptyDataset),
    };
    let n = samples.len() as f64;
    let mut mean = SymMatrix::zeros(d);
    let mut mean_sq = SymMatrix::zeros(d);
    for s in samples {
        if s.x.len() != d {
            return Err(GaussianError::DimensionMismatch {
                expected: d,
                got: s.x.len(),
            });
        }
        for i in 0..d {
            for j in 0..d {
                let prod = s.x[i] * s.x[j];
                mean.set(i, j, mean.get(i, j) + prod);
                mean_sq.set(i, j, mean_sq.get(i, j) + prod * prod);
            }
        }
    }
    let mut se = SymMatrix::zeros(d);
    for i in 0..d {
        for j in 0..d {
            let m = mean.get(i, j) / n;
            let var = (mean_sq.get(i, j) / n - m * m).max(0.0);
            mean.set(i, j, m);
            se.set(i, j, libm::sqrt(var / n));
        }
    }
    Ok((mean, se))
}

/// `E[x x^T]`, symmetric and positive definite for every valid spec.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondMoment {
    pub matrix: SymMatrix,
}

/// Numerically stable `1 / (1 + exp(-t))`.
fn logistic(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + libm::exp(-t))
    } else {
        let e = libm::exp(t);
        e / (1.0 + e)
    }
}
