//! From-scratch trainable autoencoders.
//!
//! Two variants share one training loop: a dense 204 -> 17 -> 204
//! autoencoder (ReLU code, sigmoid output) and an LSTM sequence
//! autoencoder whose encoder final state is the code. Both are trained
//! with minibatch gradient descent on masked MSE and carry exact
//! analytic gradients, checked against finite differences in the tests.

pub mod dense;
pub mod lstm;

use alloc::vec::Vec;
use core::fmt;

use libm::exp;

use crate::rng::{derive_seed, shuffle, SplitMix64};
use crate::window::HourSequence;

pub use dense::{DenseGrads, DenseParams};
pub use lstm::{LstmGrads, LstmParams};

pub(crate) fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + exp(-x))
}

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

#[allow(clippy::needless_range_loop)]
impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: alloc::vec![0.0; rows * cols],
        }
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    /// y = A x
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.cols);
        debug_assert_eq!(y.len(), self.rows);
        for r in 0..self.rows {
            let row = &self.data[r * self.cols..(r + 1) * self.cols];
            let mut acc = 0.0;
            for (a, b) in row.iter().zip(x.iter()) {
                acc += a * b;
            }
            y[r] = acc;
        }
    }

    /// y += A^T x
    pub fn matvec_t_add(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.rows);
        debug_assert_eq!(y.len(), self.cols);
        for r in 0..self.rows {
            let row = &self.data[r * self.cols..(r + 1) * self.cols];
            let xr = x[r];
            for (yc, a) in y.iter_mut().zip(row.iter()) {
                *yc += a * xr;
            }
        }
    }

    /// A += a b^T
    pub fn add_outer(&mut self, a: &[f64], b: &[f64]) {
        debug_assert_eq!(a.len(), self.rows);
        debug_assert_eq!(b.len(), self.cols);
        for r in 0..self.rows {
            let row = &mut self.data[r * self.cols..(r + 1) * self.cols];
            let ar = a[r];
            for (w, bv) in row.iter_mut().zip(b.iter()) {
                *w += ar * bv;
            }
        }
    }

    pub fn scaled_add(&mut self, other: &Matrix, scale: f64) {
        debug_assert_eq!(self.data.len(), other.data.len());
        for (a, b) in self.data.iter_mut().zip(other.data.iter()) {
            *a += scale * b;
        }
    }

    /// Xavier uniform fill: U(-limit, limit), limit = sqrt(6/(fan_in+fan_out)).
    pub fn xavier_fill(&mut self, fan_in: usize, fan_out: usize, rng: &mut SplitMix64) {
        let limit = libm::sqrt(6.0 / (fan_in + fan_out) as f64);
        for v in self.data.iter_mut() {
            *v = rng.next_range(-limit, limit);
        }
    }
}

pub(crate) fn vec_scaled_add(dst: &mut [f64], src: &[f64], scale: f64) {
    for (a, b) in dst.iter_mut().zip(src.iter()) {
        *a += scale * b;
    }
}

/// Which autoencoder architecture to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Dense,
    Lstm,
}

/// Training hyperparameters. Defaults are the simplest deterministic
/// choice and are overridable everywhere they are consumed.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub variant: Variant,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
    /// Compute MSE only over unmasked positions (default true).
    pub mask_loss: bool,
    /// Hidden width for the LSTM variant.
    pub hidden_dim: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            variant: Variant::Dense,
            learning_rate: 1e-3,
            epochs: 200,
            batch_size: 32,
            seed: 42,
            mask_loss: true,
            hidden_dim: 17,
        }
    }
}

/// Per-epoch loss record.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainHistory {
    pub train_mse: Vec<f64>,
    pub val_mse: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrainError {
    EmptyDataset,
}

impl fmt::Display for TrainError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrainError::EmptyDataset => write!(f, "training set is empty"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for TrainError {}

/// Parameters for either variant, behind one reconstruction interface.
#[derive(Debug, Clone, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum ModelParams {
    Dense(DenseParams),
    Lstm(LstmParams),
}

impl ModelParams {
    pub fn init(config: &TrainConfig) -> ModelParams {
        match config.variant {
            Variant::Dense => ModelParams::Dense(DenseParams::init(config.seed)),
            Variant::Lstm => ModelParams::Lstm(LstmParams::init(config.hidden_dim, config.seed)),
        }
    }

    pub fn variant(&self) -> Variant {
        match self {
            ModelParams::Dense(_) => Variant::Dense,
            ModelParams::Lstm(_) => Variant::Lstm,
        }
    }

    /// Reconstruct a scaled 204-value sequence.
    pub fn reconstruct(&self, values: &[f64], mask: &[bool]) -> Vec<f64> {
        match self {
            ModelParams::Dense(p) => p.forward(values).1,
            ModelParams::Lstm(p) => p.forward(values, mask).recon_flat(),
        }
    }

    /// Code-layer activations: 17 values for dense, hidden_dim for LSTM.
    pub fn encode(&self, values: &[f64], mask: &[bool]) -> Vec<f64> {
        match self {
            ModelParams::Dense(p) => p.forward(values).0,
            ModelParams::Lstm(p) => p.forward(values, mask).code,
        }
    }
}

/// Masked mean squared error between a reconstruction and its target.
///
/// With `mask_loss`, only mask-true positions contribute (0 when none);
/// otherwise every position counts.
pub fn loss_mse(recon: &[f64], target: &[f64], mask: &[bool], mask_loss: bool) -> f64 {
    debug_assert_eq!(recon.len(), target.len());
    debug_assert_eq!(recon.len(), mask.len());
    let mut sum = 0.0;
    let mut n = 0usize;
    for i in 0..recon.len() {
        if !mask_loss || mask[i] {
            let d = recon[i] - target[i];
            sum += d * d;
            n += 1;
        }
    }
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// d(loss)/d(recon) for `loss_mse`, written into `d_recon`.
pub(crate) fn loss_mse_backward(
    recon: &[f64],
    target: &[f64],
    mask: &[bool],
    mask_loss: bool,
    d_recon: &mut [f64],
) {
    let n = if mask_loss {
        mask.iter().filter(|&&m| m).count()
    } else {
        recon.len()
    };
    if n == 0 {
        d_recon.fill(0.0);
        return;
    }
    let scale = 2.0 / n as f64;
    for i in 0..recon.len() {
        d_recon[i] = if !mask_loss || mask[i] {
            scale * (recon[i] - target[i])
        } else {
            0.0
        };
    }
}

/// Mean masked MSE of a model over a dataset.
pub fn dataset_mse(params: &ModelParams, sequences: &[HourSequence], mask_loss: bool) -> f64 {
    if sequences.is_empty() {
        return 0.0;
    }
    let mut total = 0.0;
    for s in sequences {
        let recon = params.reconstruct(&s.values, &s.mask);
        total += loss_mse(&recon, &s.values, &s.mask, mask_loss);
    }
    total / sequences.len() as f64
}

/// Minibatch gradient descent. Deterministic given the config seed: the
/// per-epoch shuffle order is seeded and gradient accumulation runs in
/// batch order on a single thread.
pub fn train(
    train_set: &[HourSequence],
    val_set: &[HourSequence],
    config: &TrainConfig,
) -> Result<(ModelParams, TrainHistory), TrainError> {
    if train_set.is_empty() {
        return Err(TrainError::EmptyDataset);
    }
    let mut params = ModelParams::init(config);
    train_from(&mut params, train_set, val_set, config).map(|h| (params, h))
}

/// Train starting from existing parameters (used by `train` and tests).
pub fn train_from(
    params: &mut ModelParams,
    train_set: &[HourSequence],
    val_set: &[HourSequence],
    config: &TrainConfig,
) -> Result<TrainHistory, TrainError> {
    if train_set.is_empty() {
        return Err(TrainError::EmptyDataset);
    }
    let mut order: Vec<usize> = (0..train_set.len()).collect();
    let mut history = TrainHistory {
        train_mse: Vec::with_capacity(config.epochs),
        val_mse: Vec::with_capacity(config.epochs),
    };
    for epoch in 0..config.epochs {
        let mut rng = SplitMix64::new(derive_seed(config.seed, &[SHUFFLE_TAG, epoch as u64]));
        shuffle(&mut order, &mut rng);
        for batch in order.chunks(config.batch_size) {
            step_batch(params, train_set, batch, config);
        }
        history.train_mse.push(dataset_mse(params, train_set, config.mask_loss));
        history.val_mse.push(dataset_mse(params, val_set, config.mask_loss));
    }
    Ok(history)
}

// Domain tag for the shuffle stream, kept out of the sampling streams.
const SHUFFLE_TAG: u64 = 0x7368_7566_666c_6531;

fn step_batch(
    params: &mut ModelParams,
    train_set: &[HourSequence],
    batch: &[usize],
    config: &TrainConfig,
) {
    // The descent objective is the per-example summed squared error,
    // averaged over the minibatch; masked MSE stays the reported metric.
    // Each example's MSE gradient is weighted by its position count.
    let scale = -config.learning_rate / batch.len() as f64;
    match params {
        ModelParams::Dense(p) => {
            let mut grads = DenseGrads::zeros();
            for &i in batch {
                let s = &train_set[i];
                let w = loss_positions(&s.mask, config.mask_loss);
                p.backward_weighted(&s.values, &s.mask, config.mask_loss, w, &mut grads);
            }
            p.apply_update(&grads, scale);
        }
        ModelParams::Lstm(p) => {
            let mut grads = LstmGrads::zeros(p.hidden_dim);
            for &i in batch {
                let s = &train_set[i];
                let w = loss_positions(&s.mask, config.mask_loss);
                p.backward_weighted(&s.values, &s.mask, config.mask_loss, w, &mut grads);
            }
            p.apply_update(&grads, scale);
        }
    }
}

/// Number of positions contributing to the loss for one example.
fn loss_positions(mask: &[bool], mask_loss: bool) -> f64 {
    if mask_loss {
        mask.iter().filter(|&&m| m).count() as f64
    } else {
        mask.len() as f64
    }
}
