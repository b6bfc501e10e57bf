use serde::Serialize;

use super::dataset::{Dataset, Which};
use super::splitmix::permutation;
use crate::error::{invalid, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrainConfig {
    pub lr: f64,
    pub epochs: u32,
    pub l2: f64,
    /// Mini-batch size; 0 means full batch.
    pub batch: usize,
    /// Seeds the per-epoch mini-batch order (unused for full batch).
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            lr: 1.0,
            epochs: 1000,
            l2: 0.0,
            batch: 0,
            seed: 1,
        }
    }
}

/// Logistic probe: P(y = 1 | x) = σ(w·x + b).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub train_config: TrainConfig,
}

impl LinearModel {
    pub fn zeros(feature_count: usize, train_config: TrainConfig) -> Self {
        Self {
            weights: vec![0.0; feature_count],
            bias: 0.0,
            train_config,
        }
    }

    pub fn logit(&self, row: u64) -> f64 {
        let mut z = self.bias;
        let mut bits = row;
        while bits != 0 {
            z += self.weights[bits.trailing_zeros() as usize];
            bits &= bits - 1;
        }
        z
    }

    pub fn predict_proba(&self, row: u64) -> f64 {
        sigmoid(self.logit(row))
    }
}

pub(crate) fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// ln(1 + e^z) without overflow.
fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

/// −ln P(label) under logit `z`.
pub(crate) fn nll(z: f64, label: bool) -> f64 {
    if label {
        softplus(-z)
    } else {
        softplus(z)
    }
}

/// Mean negative log-likelihood (nats) over `rows` plus (l2/2)‖w‖².
pub fn objective(ds: &Dataset, model: &LinearModel, rows: &[usize]) -> f64 {
    let data: f64 = rows.iter().map(|&i| nll(model.logit(ds.row(i)), ds.label(i))).sum::<f64>() / rows.len() as f64;
    data + 0.5 * model.train_config.l2 * model.weights.iter().map(|w| w * w).sum::<f64>()
}

/// Per-byte partial sums of the weights: the logit of a row is the bias plus
/// one lookup per 8-bit chunk of its mask.
struct ByteTables {
    chunks: usize,
    sums: Vec<f64>,
}

impl ByteTables {
    fn new(weights: &[f64]) -> Self {
        let chunks = weights.len().div_ceil(8);
        let mut sums = vec![0.0; chunks * 256];
        for c in 0..chunks {
            let w = &weights[8 * c..weights.len().min(8 * c + 8)];
            let table = &mut sums[256 * c..256 * c + 256];
            for byte in 1..256usize {
                let low = byte.trailing_zeros() as usize;
                table[byte] = table[byte & (byte - 1)] + w.get(low).copied().unwrap_or(0.0);
            }
        }
        Self { chunks, sums }
    }

    fn dot(&self, row: u64) -> f64 {
        (0..self.chunks)
            .map(|c| self.sums[256 * c + (row >> (8 * c) & 0xFF) as usize])
            .sum()
    }
}

/// Analytic gradient of [`objective`] and the data term (nats) at the same point.
pub fn gradient(ds: &Dataset, model: &LinearModel, rows: &[usize]) -> (Vec<f64>, f64, f64) {
    let tables = ByteTables::new(&model.weights);
    let mut residual_by_byte = vec![0.0; tables.chunks * 256];
    let mut gb = 0.0;
    let mut loss = 0.0;
    for &i in rows {
        let row = ds.row(i);
        let z = model.bias + tables.dot(row);
        let label = ds.label(i);
        let e = (-z.abs()).exp();
        let p = if z >= 0.0 { 1.0 / (1.0 + e) } else { e / (1.0 + e) };
        let signed = if label { -z } else { z };
        loss += signed.max(0.0) + (1.0 + e).ln();
        let r = p - f64::from(u8::from(label));
        gb += r;
        for c in 0..tables.chunks {
            residual_by_byte[256 * c + (row >> (8 * c) & 0xFF) as usize] += r;
        }
    }
    let mut gw = vec![0.0; model.weights.len()];
    for (j, g) in gw.iter_mut().enumerate() {
        let (c, bit) = (j / 8, j % 8);
        *g = (0..256)
            .filter(|byte| byte >> bit & 1 == 1)
            .map(|byte| residual_by_byte[256 * c + byte])
            .sum();
    }
    let m = rows.len() as f64;
    let l2 = model.train_config.l2;
    for (g, w) in gw.iter_mut().zip(&model.weights) {
        *g = *g / m + l2 * w;
    }
    (gw, gb / m, loss / m)
}

/// A trained model and its learning curve: mean training log-loss in bits
/// before each epoch and after the last one.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainingRun {
    pub model: LinearModel,
    pub curve_bits: Vec<f64>,
}

/// Gradient descent on the L2-regularized logistic loss from zero weights.
pub fn train_logistic(ds: &Dataset, config: TrainConfig) -> Result<TrainingRun> {
    let train = ds.indices(Which::Train);
    if train.is_empty() {
        return Err(invalid("empty training split"));
    }
    if !(config.lr > 0.0) || !config.lr.is_finite() {
        return Err(invalid(format!("learning rate must be positive, got {}", config.lr)));
    }
    if !(config.l2 >= 0.0) || !config.l2.is_finite() {
        return Err(invalid(format!("l2 must be non-negative, got {}", config.l2)));
    }
    let mut model = LinearModel::zeros(ds.feature_count, config);
    let mut curve_bits = Vec::with_capacity(config.epochs as usize + 1);
    let to_bits = std::f64::consts::LOG2_E;

    for epoch in 0..config.epochs {
        if config.batch == 0 || config.batch >= train.len() {
            let (gw, gb, loss) = gradient(ds, &model, train);
            check_finite(loss, epoch)?;
            curve_bits.push(loss * to_bits);
            step(&mut model, &gw, gb, config.lr);
        } else {
            let order = permutation(train.len(), config.seed ^ u64::from(epoch));
            let mut epoch_loss = 0.0;
            let mut batch_rows: Vec<usize> = Vec::with_capacity(config.batch);
            for chunk in order.chunks(config.batch) {
                batch_rows.clear();
                batch_rows.extend(chunk.iter().map(|&j| train[j]));
                let (gw, gb, loss) = gradient(ds, &model, &batch_rows);
                epoch_loss += loss * chunk.len() as f64;
                step(&mut model, &gw, gb, config.lr);
            }
            let loss = epoch_loss / train.len() as f64;
            check_finite(loss, epoch)?;
            curve_bits.push(loss * to_bits);
        }
        if model.weights.iter().any(|w| !w.is_finite()) || !model.bias.is_finite() {
            return Err(Error::Divergence(format!("non-finite weights after epoch {epoch}")));
        }
    }
    let (_, _, loss) = gradient(ds, &model, train);
    check_finite(loss, config.epochs)?;
    curve_bits.push(loss * to_bits);
    Ok(TrainingRun { model, curve_bits })
}

fn check_finite(loss: f64, epoch: u32) -> Result<()> {
    if loss.is_finite() {
        Ok(())
    } else {
        Err(Error::Divergence(format!("loss became {loss} at epoch {epoch}; lower the learning rate")))
    }
}

fn step(model: &mut LinearModel, gw: &[f64], gb: f64, lr: f64) {
    for (w, g) in model.weights.iter_mut().zip(gw) {
        *w -= lr * g;
    }
    model.bias -= lr * gb;
}

/// Largest relative difference between the analytic gradient and central
/// differences of [`objective`] on the first ≤ 64 training rows.
pub fn gradient_check(ds: &Dataset, model: &LinearModel, epsilon: f64) -> Result<f64> {
    if !(1e-7..=1e-3).contains(&epsilon) {
        return Err(invalid(format!("epsilon {epsilon} outside [1e-7, 1e-3]")));
    }
    if model.weights.len() != ds.feature_count {
        return Err(invalid("model width does not match dataset"));
    }
    let train = ds.indices(Which::Train);
    let rows = &train[..train.len().min(64)];
    if rows.is_empty() {
        return Err(invalid("empty training split"));
    }
    let (gw, gb, _) = gradient(ds, model, rows);
    let numeric = |perturb: &dyn Fn(&mut LinearModel, f64)| {
        let mut plus = model.clone();
        perturb(&mut plus, epsilon);
        let mut minus = model.clone();
        perturb(&mut minus, -epsilon);
        (objective(ds, &plus, rows) - objective(ds, &minus, rows)) / (2.0 * epsilon)
    };
    let rel = |a: f64, n: f64| (a - n).abs() / a.abs().max(n.abs()).max(1e-8);
    let mut worst = rel(gb, numeric(&|m, e| m.bias += e));
    for (j, &g) in gw.iter().enumerate() {
        worst = worst.max(rel(g, numeric(&|m, e| m.weights[j] += e)));
    }
    Ok(worst)
}
