//! Maximum-entropy reference laws and entropy accounting.
//!
//! The geometric law is the entropy maximizer on {0, 1, …} under a mean
//! constraint; the Poisson law is the classical reference for ω(n). Entropy
//! reports are in bits, internal arithmetic uses natural logarithms.

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::sieve::{prime_count, PrimeSet};
use crate::stats::{loglog, MomentLedger, MERTENS};

pub const DEFAULT_TAIL_CUT: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PmfKind {
    Geometric { mean: f64 },
    Poisson { lambda: f64 },
    Empirical,
}

/// A probability mass function on `support_min, support_min + 1, …`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiscretePmf {
    pub support_min: u64,
    pub probabilities: Vec<f64>,
    pub descriptor: PmfKind,
}

impl DiscretePmf {
    /// Normalized empirical law from counts indexed by value.
    pub fn from_histogram(hist: &[u64]) -> Result<Self> {
        let total: u64 = hist.iter().sum();
        if total == 0 {
            return Err(invalid("empirical histogram has no mass"));
        }
        Ok(Self {
            support_min: 0,
            probabilities: hist.iter().map(|&c| c as f64 / total as f64).collect(),
            descriptor: PmfKind::Empirical,
        })
    }

    pub fn prob(&self, k: u64) -> f64 {
        k.checked_sub(self.support_min)
            .and_then(|i| self.probabilities.get(i as usize))
            .copied()
            .unwrap_or(0.0)
    }

    /// Largest value with a stored probability.
    pub fn support_max(&self) -> u64 {
        self.support_min + self.probabilities.len().saturating_sub(1) as u64
    }

    pub fn total_mass(&self) -> f64 {
        self.probabilities.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.values().map(|(k, p)| k as f64 * p).sum()
    }

    pub fn entropy_bits(&self) -> f64 {
        entropy_bits(&self.probabilities)
    }

    fn values(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        (self.support_min..).zip(self.probabilities.iter().copied())
    }
}

/// −Σ p log₂ p with 0 log 0 = 0.
pub fn entropy_bits(probabilities: &[f64]) -> f64 {
    -probabilities
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.ln())
        .sum::<f64>()
        / std::f64::consts::LN_2
}

/// Binary entropy in bits.
pub fn bernoulli_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(invalid(format!("probability {p} outside [0, 1]")));
    }
    Ok(entropy_bits(&[p, 1.0 - p]))
}

/// Geometric law on {0, 1, …} with the given mean, truncated once the
/// remaining tail mass drops below `tail_cut`.
pub fn maxent_geometric(mean: f64, tail_cut: f64) -> Result<DiscretePmf> {
    if !(mean >= 0.0) || !mean.is_finite() {
        return Err(invalid(format!("geometric mean must be finite and ≥ 0, got {mean}")));
    }
    if !(tail_cut > 0.0 && tail_cut <= 1e-6) {
        return Err(invalid(format!("tail cut must lie in (0, 1e-6], got {tail_cut}")));
    }
    let p0 = 1.0 / (1.0 + mean);
    let ratio = mean / (1.0 + mean);
    let mut probabilities = vec![p0];
    // mass beyond index k is ratio^(k+1)
    let mut tail = ratio;
    while tail >= tail_cut {
        let last = *probabilities.last().expect("nonempty");
        probabilities.push(last * ratio);
        tail *= ratio;
    }
    Ok(DiscretePmf {
        support_min: 0,
        probabilities,
        descriptor: PmfKind::Geometric { mean },
    })
}

/// Poisson(λ) on `0..=k_max` by the recurrence p(k) = p(k−1)·λ/k.
pub fn poisson_pmf(lambda: f64, k_max: u64) -> Result<DiscretePmf> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(invalid(format!("Poisson rate must be finite and ≥ 0, got {lambda}")));
    }
    let mut probabilities = Vec::with_capacity(k_max as usize + 1);
    let mut p = (-lambda).exp();
    probabilities.push(p);
    for k in 1..=k_max {
        p *= lambda / k as f64;
        probabilities.push(p);
    }
    let pmf = DiscretePmf {
        support_min: 0,
        probabilities,
        descriptor: PmfKind::Poisson { lambda },
    };
    if k_max < lambda.ceil() as u64 + 40 && 1.0 - pmf.total_mass() >= 1e-9 {
        return Err(invalid(format!(
            "k_max = {k_max} leaves Poisson({lambda}) tail ≥ 1e-9"
        )));
    }
    Ok(pmf)
}

/// ½ Σ |a(k) − b(k)| over the union of supports.
pub fn total_variation(a: &DiscretePmf, b: &DiscretePmf) -> f64 {
    let lo = a.support_min.min(b.support_min);
    let hi = a.support_max().max(b.support_max());
    let sum: f64 = (lo..=hi).map(|k| (a.prob(k) - b.prob(k)).abs()).sum();
    (0.5 * sum).min(1.0)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityEntropyRecord {
    pub n: u64,
    pub pi_n: u64,
    /// π(N)/N
    pub density: f64,
    pub entropy_bits: f64,
    /// N · entropy_bits
    pub total_bits: f64,
    /// π(N) · log₂ N
    pub naive_list_bits: f64,
    /// Per-symbol log-loss of always predicting the density; equals `entropy_bits`.
    pub constant_rate_log_loss_bits: f64,
}

pub fn prime_density_entropy_report(n: u64, ps: &PrimeSet) -> Result<DensityEntropyRecord> {
    if n < 3 {
        return Err(invalid(format!("density report needs N ≥ 3, got {n}")));
    }
    if n > ps.limit() {
        return Err(Error::Range(format!("N = {n} beyond sieve limit {}", ps.limit())));
    }
    let pi_n = prime_count(ps, n)?;
    let density = pi_n as f64 / n as f64;
    let entropy_bits = bernoulli_entropy(density)?;
    let log_loss = -(pi_n as f64 * density.log2() + (n - pi_n) as f64 * (1.0 - density).log2()) / n as f64;
    Ok(DensityEntropyRecord {
        n,
        pi_n,
        density,
        entropy_bits,
        total_bits: n as f64 * entropy_bits,
        naive_list_bits: pi_n as f64 * (n as f64).log2(),
        constant_rate_log_loss_bits: log_loss,
    })
}

/// Everything written to `maxent.json`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MaxentReport {
    #[serde(flatten)]
    pub density: DensityEntropyRecord,
    pub lambda_used: f64,
    pub tv_geometric: f64,
    pub tv_poisson: f64,
    pub empirical_entropy_bits: f64,
    pub geometric_entropy_bits: f64,
    pub poisson_entropy_bits: f64,
}

/// Compares the empirical ω law of `ledger` (which must end at `n`) with
/// geometric and Poisson laws of mean ln ln N + M.
pub fn maxent_report(n: u64, ps: &PrimeSet, ledger: &MomentLedger) -> Result<MaxentReport> {
    if ledger.n_max() != Some(n) {
        return Err(invalid(format!(
            "ledger covers up to {:?}, report asked for N = {n}",
            ledger.n_max()
        )));
    }
    let density = prime_density_entropy_report(n, ps)?;
    let lambda = loglog(n)? + MERTENS;
    let empirical = DiscretePmf::from_histogram(ledger.histogram())?;
    let geometric = maxent_geometric(lambda, DEFAULT_TAIL_CUT)?;
    let poisson = poisson_pmf(lambda, lambda.ceil() as u64 + 40)?;
    Ok(MaxentReport {
        density,
        lambda_used: lambda,
        tv_geometric: total_variation(&empirical, &geometric),
        tv_poisson: total_variation(&empirical, &poisson),
        empirical_entropy_bits: empirical.entropy_bits(),
        geometric_entropy_bits: geometric.entropy_bits(),
        poisson_entropy_bits: poisson.entropy_bits(),
    })
}
