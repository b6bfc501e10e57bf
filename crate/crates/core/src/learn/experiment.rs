use serde::Serialize;

use super::dataset::{make_dataset, Dataset, FeatureConfig, Split, Task, Which};
use super::metrics::{baseline_metrics, evaluate, Metrics};
use super::model::{train_logistic, LinearModel, TrainConfig};
use crate::error::Result;
use crate::sieve::{OmegaSegment, PrimeSet};

/// One probe experiment: dataset, features and optimizer.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LearnConfig {
    pub task: Task,
    #[serde(rename = "N")]
    pub n: u64,
    pub split: Split,
    pub features: FeatureConfig,
    pub train: TrainConfig,
    /// Also train with the parity column removed and report it under `ablations`.
    pub ablate_bit0: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Ablation {
    pub name: String,
    pub test: Metrics,
    pub info_gain_bits: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LearnReport {
    pub task: Task,
    #[serde(rename = "N")]
    pub n: u64,
    pub split: Split,
    pub seed: u64,
    pub config: LearnConfig,
    pub train: Metrics,
    pub test: Metrics,
    /// Density baseline on the test split.
    pub baseline: Metrics,
    /// Baseline test log-loss minus model test log-loss.
    pub info_gain_bits: f64,
    pub ablations: Vec<Ablation>,
    #[serde(skip)]
    pub model: LinearModel,
    /// Mean training log-loss (bits) before each epoch and after the last.
    #[serde(skip)]
    pub curve_bits: Vec<f64>,
}

pub fn run_experiment(config: &LearnConfig, primes: &PrimeSet, omega: Option<&OmegaSegment>) -> Result<LearnReport> {
    let ds = make_dataset(config.task, config.n, config.split, primes, omega, config.features)?;
    run_on(config, &ds)
}

/// As [`run_experiment`] on a prebuilt dataset.
pub fn run_on(config: &LearnConfig, ds: &Dataset) -> Result<LearnReport> {
    let baseline = baseline_metrics(ds, Which::Test)?;
    let run = train_logistic(ds, config.train)?;
    let train = evaluate(&run.model, ds, Which::Train)?;
    let test = evaluate(&run.model, ds, Which::Test)?;
    let mut ablations = Vec::new();
    if config.ablate_bit0 {
        let ablated = ds.with_features(FeatureConfig { ablate_bit0: true, ..ds.features });
        let model = train_logistic(&ablated, config.train)?.model;
        let test = evaluate(&model, &ablated, Which::Test)?;
        ablations.push(Ablation {
            name: "bit0".into(),
            info_gain_bits: baseline.log_loss_bits - test.log_loss_bits,
            test,
        });
    }
    Ok(LearnReport {
        task: config.task,
        n: config.n,
        split: config.split,
        seed: config.train.seed,
        config: *config,
        train,
        test,
        info_gain_bits: baseline.log_loss_bits - test.log_loss_bits,
        baseline,
        ablations,
        model: run.model,
        curve_bits: run.curve_bits,
    })
}
