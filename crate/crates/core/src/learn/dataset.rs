use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::splitmix::permutation;
use crate::error::{invalid, Error, Result};
use crate::sieve::{OmegaSegment, PrimeSet};
use crate::stats::{loglog, MIN_EK_N};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Task {
    /// label(n) = [n is prime]
    #[serde(rename = "prime")]
    Prime,
    /// label(n) = [ω(n) > ln ln N]
    #[serde(rename = "ek")]
    EkSign,
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Task::Prime => "prime",
            Task::EkSign => "ek",
        })
    }
}

impl FromStr for Task {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "prime" => Ok(Task::Prime),
            "ek" | "ek_sign" => Ok(Task::EkSign),
            other => Err(format!("unknown task {other:?} (expected prime or ek)")),
        }
    }
}

pub const DEFAULT_TRAIN_FRAC: f64 = 0.8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Split {
    /// Train on `[2, ⌊frac·N⌋)`, test on the rest: an extrapolation split.
    Range { train_frac: f64 },
    /// Seeded permutation; the first `⌊frac·count⌋` integers train.
    Shuffle { seed: u64, train_frac: f64 },
}

impl Split {
    pub fn name(&self) -> &'static str {
        match self {
            Split::Range { .. } => "range",
            Split::Shuffle { .. } => "shuffle",
        }
    }

    fn train_frac(&self) -> f64 {
        match *self {
            Split::Range { train_frac } | Split::Shuffle { train_frac, .. } => train_frac,
        }
    }
}

/// Optional extra columns beyond the raw binary digits.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FeatureConfig {
    /// One-hot `n mod 3` and `n mod 5` (8 columns).
    pub engineered: bool,
    /// Zero out the parity column.
    pub ablate_bit0: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Which {
    Train,
    Test,
}

/// Labeled integers `2..=N`. Each row is a bitmask over at most 64 binary features.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub task: Task,
    pub n: u64,
    /// Number of binary digits.
    pub width: u32,
    pub feature_count: usize,
    pub features: FeatureConfig,
    pub split: Split,
    pub(crate) rows: Vec<u64>,
    pub(crate) labels: Vec<bool>,
    pub(crate) train: Vec<usize>,
    pub(crate) test: Vec<usize>,
}

impl Dataset {
    /// A dataset from explicit feature masks and labels. Row `i` stands for
    /// the integer `i + 2`.
    pub fn from_rows(
        rows: Vec<u64>,
        labels: Vec<bool>,
        feature_count: usize,
        train: Vec<usize>,
        test: Vec<usize>,
    ) -> Result<Dataset> {
        if rows.len() != labels.len() {
            return Err(invalid("rows and labels differ in length"));
        }
        if feature_count > 64 || rows.iter().any(|&r| feature_count < 64 && r >> feature_count != 0) {
            return Err(invalid(format!("rows use features beyond {feature_count}")));
        }
        let mut seen = vec![false; rows.len()];
        for &i in train.iter().chain(&test) {
            match seen.get_mut(i) {
                Some(s) if !*s => *s = true,
                _ => return Err(invalid(format!("split index {i} repeated or out of range"))),
            }
        }
        Ok(Dataset {
            task: Task::Prime,
            n: rows.len() as u64 + 1,
            width: feature_count as u32,
            feature_count,
            features: FeatureConfig::default(),
            split: Split::Range { train_frac: train.len() as f64 / rows.len().max(1) as f64 },
            rows,
            labels,
            train,
            test,
        })
    }

    /// Integer represented by row `i`.
    pub fn number(&self, i: usize) -> u64 {
        i as u64 + 2
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row(&self, i: usize) -> u64 {
        self.rows[i]
    }

    pub fn label(&self, i: usize) -> bool {
        self.labels[i]
    }

    /// Label of the integer `n`.
    pub fn label_of(&self, n: u64) -> Option<bool> {
        n.checked_sub(2).and_then(|i| self.labels.get(i as usize)).copied()
    }

    pub fn indices(&self, which: Which) -> &[usize] {
        match which {
            Which::Train => &self.train,
            Which::Test => &self.test,
        }
    }

    /// Fraction of positive labels in a split.
    pub fn positive_rate(&self, which: Which) -> Option<f64> {
        let idx = self.indices(which);
        (!idx.is_empty()).then(|| idx.iter().filter(|&&i| self.labels[i]).count() as f64 / idx.len() as f64)
    }

    /// Same integers and labels with a different feature configuration.
    pub fn with_features(&self, features: FeatureConfig) -> Dataset {
        let mut ds = self.clone();
        ds.features = features;
        ds.feature_count = feature_count(self.width, features);
        ds.rows = (0..self.len())
            .map(|i| feature_mask(self.number(i), self.width, features))
            .collect();
        ds
    }
}

/// Little-endian binary digits of `n`: feature `j` is bit `j`.
pub fn featurize(n: u64, width: u32) -> Result<Vec<u8>> {
    if width < 64 && n >> width != 0 {
        return Err(Error::Range(format!("{n} does not fit in {width} bits")));
    }
    Ok((0..width).map(|j| (n >> j & 1) as u8).collect())
}

fn feature_count(width: u32, features: FeatureConfig) -> usize {
    width as usize + if features.engineered { 8 } else { 0 }
}

fn feature_mask(n: u64, width: u32, features: FeatureConfig) -> u64 {
    let mut mask = n;
    if features.engineered {
        mask |= 1 << (width as u64 + n % 3);
        mask |= 1 << (width as u64 + 3 + n % 5);
    }
    if features.ablate_bit0 {
        mask &= !1;
    }
    mask
}

/// Builds the labeled dataset over `[2, n]`.
///
/// `omega` must cover `[2, n]` for [`Task::EkSign`]; `primes` must reach `n`
/// for [`Task::Prime`].
pub fn make_dataset(
    task: Task,
    n: u64,
    split: Split,
    primes: &PrimeSet,
    omega: Option<&OmegaSegment>,
    features: FeatureConfig,
) -> Result<Dataset> {
    if n < MIN_EK_N {
        return Err(Error::Domain(format!("datasets need N ≥ {MIN_EK_N}, got {n}")));
    }
    let frac = split.train_frac();
    if !(frac > 0.0 && frac < 1.0) {
        return Err(invalid(format!("train fraction {frac} outside (0, 1)")));
    }
    let width = 64 - n.leading_zeros();
    if feature_count(width, features) > 64 {
        return Err(Error::Capacity(format!("{width}-bit integers leave no room for engineered features")));
    }
    let labels: Vec<bool> = match task {
        Task::Prime => {
            if primes.limit() < n {
                return Err(Error::Range(format!("primes known up to {}, need {n}", primes.limit())));
            }
            (2..=n).map(|k| primes.contains(k)).collect()
        }
        Task::EkSign => {
            let seg = omega.ok_or_else(|| invalid("ek task needs ω values"))?;
            if seg.lo() > 2 || seg.hi() <= n {
                return Err(Error::Range(format!(
                    "ω known on [{}, {}), need [2, {n}]",
                    seg.lo(),
                    seg.hi()
                )));
            }
            let threshold = loglog(n)?;
            let start = (2 - seg.lo()) as usize;
            seg.omega()[start..start + (n - 1) as usize]
                .iter()
                .map(|&w| f64::from(w) > threshold)
                .collect()
        }
    };
    let rows: Vec<u64> = (2..=n).map(|k| feature_mask(k, width, features)).collect();
    let count = rows.len();
    let (train, test) = match split {
        Split::Range { train_frac } => {
            let cut = ((n as f64 * train_frac).floor() as u64).clamp(3, n);
            let cut_idx = (cut - 2) as usize;
            ((0..cut_idx).collect(), (cut_idx..count).collect())
        }
        Split::Shuffle { seed, train_frac } => {
            let perm = permutation(count, seed);
            let cut = ((count as f64 * train_frac).floor() as usize).clamp(1, count - 1);
            let mut train = perm[..cut].to_vec();
            let mut test = perm[cut..].to_vec();
            train.sort_unstable();
            test.sort_unstable();
            (train, test)
        }
    };
    Ok(Dataset {
        task,
        n,
        width,
        feature_count: feature_count(width, features),
        features,
        split,
        rows,
        labels,
        train,
        test,
    })
}
