use serde::Serialize;

use super::dataset::{Dataset, Which};
use super::model::LinearModel;
use crate::error::{invalid, Result};

const CLAMP: f64 = 1e-15;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Metrics {
    pub accuracy: f64,
    pub balanced_accuracy: f64,
    pub log_loss_bits: f64,
    pub mcc: f64,
    /// max(rate, 1 − rate) on the evaluated split.
    pub baseline_accuracy: f64,
    pub mean_predicted_rate: f64,
}

/// Metrics of probabilistic predictions thresholded at 0.5.
pub fn metrics_from_predictions(probs: &[f64], labels: &[bool]) -> Result<Metrics> {
    if probs.len() != labels.len() {
        return Err(invalid("predictions and labels differ in length"));
    }
    if probs.is_empty() {
        return Err(invalid("empty split"));
    }
    let (mut tp, mut tn, mut fp, mut fneg) = (0u64, 0u64, 0u64, 0u64);
    let mut loss = 0.0;
    let mut psum = 0.0;
    for (&p, &y) in probs.iter().zip(labels) {
        if !(0.0..=1.0).contains(&p) {
            return Err(invalid(format!("probability {p} outside [0, 1]")));
        }
        psum += p;
        let q = p.clamp(CLAMP, 1.0 - CLAMP);
        loss -= if y { q.log2() } else { (1.0 - q).log2() };
        match (p >= 0.5, y) {
            (true, true) => tp += 1,
            (false, false) => tn += 1,
            (true, false) => fp += 1,
            (false, true) => fneg += 1,
        }
    }
    let m = probs.len() as f64;
    let pos = (tp + fneg) as f64;
    let neg = (tn + fp) as f64;
    let balanced_accuracy = match (pos > 0.0, neg > 0.0) {
        (true, true) => 0.5 * (tp as f64 / pos + tn as f64 / neg),
        (true, false) => tp as f64 / pos,
        _ => tn as f64 / neg,
    };
    let (tpf, tnf, fpf, fnf) = (tp as f64, tn as f64, fp as f64, fneg as f64);
    let denom = ((tpf + fpf) * (tpf + fnf) * (tnf + fpf) * (tnf + fnf)).sqrt();
    let mcc = if denom > 0.0 { (tpf * tnf - fpf * fnf) / denom } else { 0.0 };
    let rate = pos / m;
    Ok(Metrics {
        accuracy: (tp + tn) as f64 / m,
        balanced_accuracy,
        log_loss_bits: loss / m,
        mcc,
        baseline_accuracy: rate.max(1.0 - rate),
        mean_predicted_rate: psum / m,
    })
}

fn split_labels(ds: &Dataset, which: Which) -> Result<(&[usize], Vec<bool>)> {
    let idx = ds.indices(which);
    if idx.is_empty() {
        return Err(invalid(format!("empty {which:?} split")));
    }
    Ok((idx, idx.iter().map(|&i| ds.label(i)).collect()))
}

pub fn evaluate(model: &LinearModel, ds: &Dataset, which: Which) -> Result<Metrics> {
    if model.weights.len() != ds.feature_count {
        return Err(invalid(format!(
            "model has {} weights, dataset {} features",
            model.weights.len(),
            ds.feature_count
        )));
    }
    let (idx, labels) = split_labels(ds, which)?;
    let probs: Vec<f64> = idx.iter().map(|&i| model.predict_proba(ds.row(i))).collect();
    metrics_from_predictions(&probs, &labels)
}

/// The density baseline: majority-class accuracy on the split and the
/// log-loss of the constant predictor p = training positive rate.
pub fn baseline_metrics(ds: &Dataset, which: Which) -> Result<Metrics> {
    let (_, labels) = split_labels(ds, which)?;
    let p = ds
        .positive_rate(Which::Train)
        .ok_or_else(|| invalid("empty training split"))?;
    let m = metrics_from_predictions(&vec![p; labels.len()], &labels)?;
    Ok(Metrics {
        accuracy: m.baseline_accuracy,
        balanced_accuracy: 0.5,
        mcc: 0.0,
        ..m
    })
}
