//! Logistic probes on binary digits: how much of a label beyond its base
//! rate a linear model can extract.

mod dataset;
mod experiment;
mod metrics;
mod model;
mod splitmix;

pub use dataset::{featurize, make_dataset, Dataset, FeatureConfig, Split, Task, Which, DEFAULT_TRAIN_FRAC};
pub use experiment::{run_experiment, run_on, Ablation, LearnConfig, LearnReport};
pub use metrics::{baseline_metrics, evaluate, metrics_from_predictions, Metrics};
pub use model::{gradient, gradient_check, objective, train_logistic, LinearModel, TrainConfig, TrainingRun};
pub use splitmix::{permutation, SplitMix64};
