//! Exact streaming statistics of ω(n).
//!
//! A [`MomentLedger`] keeps integer sums and a histogram, so means and
//! variances are computed once from exact integers and never drift with the
//! order in which segments arrive. Reports center every sampled `n` on the
//! single constant `ln ln N` where `N` is the largest integer covered.

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::sieve::OmegaSegment;

/// Mertens' constant: Σ_{p≤N} 1/p = ln ln N + M + o(1).
pub const MERTENS: f64 = 0.2614972128;

/// Histogram slots for ω values `0..HIST_CAP`.
pub const HIST_CAP: usize = 32;

/// Standardized range covered by report histograms.
pub const HIST_RANGE: (f64, f64) = (-4.0, 4.2);
pub const DEFAULT_BINS: u32 = 41;

/// Multipliers λ for the tail fractions P(|ω − ln ln N| ≥ λ √(ln ln N)).
pub const CHEBYSHEV_LAMBDAS: [u32; 3] = [1, 2, 3];

/// Smallest `N` for which [`ek_standardize`] is defined.
pub const MIN_EK_N: u64 = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MomentLedger {
    count: u64,
    sum_omega: u128,
    sum_omega_sq: u128,
    hist: [u64; HIST_CAP],
    /// Disjoint half-open ranges, sorted and coalesced.
    covered: Vec<(u64, u64)>,
}

impl Default for MomentLedger {
    fn default() -> Self {
        Self::new()
    }
}

impl MomentLedger {
    pub fn new() -> Self {
        Self {
            count: 0,
            sum_omega: 0,
            sum_omega_sq: 0,
            hist: [0; HIST_CAP],
            covered: Vec::new(),
        }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn sum_omega(&self) -> u128 {
        self.sum_omega
    }

    pub fn sum_omega_sq(&self) -> u128 {
        self.sum_omega_sq
    }

    pub fn histogram(&self) -> &[u64; HIST_CAP] {
        &self.hist
    }

    /// Smallest covered integer.
    pub fn n_min(&self) -> Option<u64> {
        self.covered.first().map(|r| r.0)
    }

    /// Largest covered integer (inclusive).
    pub fn n_max(&self) -> Option<u64> {
        self.covered.last().map(|r| r.1 - 1)
    }

    pub fn covered(&self) -> &[(u64, u64)] {
        &self.covered
    }

    pub fn accumulate(&mut self, seg: &OmegaSegment) -> Result<()> {
        self.accumulate_counts(seg.lo(), seg.omega())
    }

    /// Adds ω values for the integers `lo, lo+1, …`.
    pub fn accumulate_counts(&mut self, lo: u64, omega: &[u8]) -> Result<()> {
        if omega.is_empty() {
            return Ok(());
        }
        let hi = lo + omega.len() as u64;
        let mut local = [0u64; HIST_CAP];
        for &w in omega {
            let slot = local.get_mut(usize::from(w)).ok_or_else(|| {
                Error::Capacity(format!("ω = {w} exceeds histogram cap {HIST_CAP}"))
            })?;
            *slot += 1;
        }
        let delta = Self::from_hist(local, vec![(lo, hi)]);
        *self = self.merge(&delta)?;
        Ok(())
    }

    fn from_hist(hist: [u64; HIST_CAP], covered: Vec<(u64, u64)>) -> Self {
        let mut ledger = Self { hist, covered, ..Self::new() };
        for (k, &c) in hist.iter().enumerate() {
            let k = k as u128;
            ledger.count += c;
            ledger.sum_omega += k * u128::from(c);
            ledger.sum_omega_sq += k * k * u128::from(c);
        }
        ledger
    }

    /// Exact union of two ledgers over disjoint ranges.
    pub fn merge(&self, other: &MomentLedger) -> Result<MomentLedger> {
        let mut ranges: Vec<(u64, u64)> = self.covered.iter().chain(&other.covered).copied().collect();
        ranges.sort_unstable();
        let mut covered: Vec<(u64, u64)> = Vec::with_capacity(ranges.len());
        for (lo, hi) in ranges {
            match covered.last_mut() {
                Some(last) if lo < last.1 => {
                    return Err(invalid(format!(
                        "range [{lo}, {hi}) overlaps [{}, {})",
                        last.0, last.1
                    )))
                }
                Some(last) if lo == last.1 => last.1 = hi,
                _ => covered.push((lo, hi)),
            }
        }
        let mut hist = self.hist;
        for (h, o) in hist.iter_mut().zip(other.hist.iter()) {
            *h += o;
        }
        Ok(MomentLedger {
            count: self.count + other.count,
            sum_omega: self.sum_omega + other.sum_omega,
            sum_omega_sq: self.sum_omega_sq + other.sum_omega_sq,
            hist,
            covered,
        })
    }

    pub fn mean(&self) -> Option<f64> {
        (self.count > 0).then(|| self.sum_omega as f64 / self.count as f64)
    }

    /// Population variance from the exact integer sums.
    pub fn variance(&self) -> Option<f64> {
        if self.count == 0 {
            return None;
        }
        let c = u128::from(self.count);
        let exact = c
            .checked_mul(self.sum_omega_sq)
            .zip(self.sum_omega.checked_mul(self.sum_omega))
            .zip(c.checked_mul(c));
        Some(match exact {
            Some(((a, b), d)) => (a - b) as f64 / d as f64,
            None => {
                let m = self.sum_omega as f64 / self.count as f64;
                self.sum_omega_sq as f64 / self.count as f64 - m * m
            }
        })
    }
}

/// ln ln N, defined for N > e.
pub fn loglog(n: u64) -> Result<f64> {
    if n < 3 {
        return Err(Error::Domain(format!("ln ln N needs N > e, got N = {n}")));
    }
    Ok((n as f64).ln().ln())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HardyRamanujanReport {
    pub n: u64,
    pub count: u64,
    pub mean: f64,
    pub variance: f64,
    pub loglog_n: f64,
    pub mertens_shift: f64,
    /// mean − (ln ln N + M)
    pub mean_deviation: f64,
    /// variance − ln ln N
    pub variance_deviation: f64,
    /// `(λ, fraction)` pairs for λ in [`CHEBYSHEV_LAMBDAS`].
    pub chebyshev_fractions: Vec<(u32, f64)>,
}

impl HardyRamanujanReport {
    pub fn chebyshev(&self, lambda: u32) -> Option<f64> {
        self.chebyshev_fractions
            .iter()
            .find(|(l, _)| *l == lambda)
            .map(|&(_, f)| f)
    }
}

pub fn hardy_ramanujan_report(ledger: &MomentLedger) -> Result<HardyRamanujanReport> {
    if ledger.count() < 2 {
        return Err(invalid(format!(
            "need at least two integers, ledger has {}",
            ledger.count()
        )));
    }
    let n = ledger.n_max().expect("nonempty ledger");
    let loglog_n = loglog(n)?;
    let mean = ledger.mean().expect("nonempty ledger");
    let variance = ledger.variance().expect("nonempty ledger");
    let sd = loglog_n.sqrt();
    let chebyshev_fractions = CHEBYSHEV_LAMBDAS
        .iter()
        .map(|&lambda| {
            let tail: u64 = ledger
                .hist
                .iter()
                .enumerate()
                .filter(|&(k, _)| (k as f64 - loglog_n).abs() >= f64::from(lambda) * sd)
                .map(|(_, &c)| c)
                .sum();
            (lambda, tail as f64 / ledger.count() as f64)
        })
        .collect();
    Ok(HardyRamanujanReport {
        n,
        count: ledger.count(),
        mean,
        variance,
        loglog_n,
        mertens_shift: MERTENS,
        mean_deviation: mean - (loglog_n + MERTENS),
        variance_deviation: variance - loglog_n,
        chebyshev_fractions,
    })
}

/// (ω − ln ln N) / √(ln ln N).
pub fn ek_standardize(omega: u32, n: u64) -> Result<f64> {
    if n < MIN_EK_N {
        return Err(Error::Domain(format!(
            "Erdős–Kac standardization needs N ≥ {MIN_EK_N}, got {n}"
        )));
    }
    let ll = loglog(n)?;
    Ok((f64::from(omega) - ll) / ll.sqrt())
}

/// Kolmogorov–Smirnov distance between the lattice law of ω (standardized
/// at N = `ledger.n_max()`) and the standard normal.
pub fn ks_distance_to_normal(ledger: &MomentLedger) -> Result<f64> {
    if ledger.count() == 0 {
        return Err(invalid("empty ledger"));
    }
    let n = ledger.n_max().expect("nonempty ledger");
    let atoms = ledger
        .hist
        .iter()
        .enumerate()
        .map(|(k, &c)| Ok((ek_standardize(k as u32, n)?, c)))
        .collect::<Result<Vec<_>>>()?;
    ks_distance_atoms(&atoms)
}

/// KS distance between a discrete law given as `(point, weight)` atoms in
/// increasing point order and Φ. Both one-sided limits are checked at every
/// atom, which gives the exact supremum over the real line.
pub fn ks_distance_atoms(atoms: &[(f64, u64)]) -> Result<f64> {
    let total: u64 = atoms.iter().map(|a| a.1).sum();
    if total == 0 {
        return Err(invalid("no mass to compare"));
    }
    if atoms.windows(2).any(|w| w[0].0 > w[1].0) {
        return Err(invalid("atoms must be sorted by point"));
    }
    let mut below = 0u64;
    let mut sup = 0.0f64;
    for &(t, w) in atoms {
        let phi = normal_cdf(t)?;
        let left = below as f64 / total as f64;
        below += w;
        let right = below as f64 / total as f64;
        sup = sup.max((left - phi).abs()).max((right - phi).abs());
    }
    Ok(sup)
}

/// KS distance with per-integer centering: every `n ≥ 16` is standardized
/// with its own ln ln n instead of the range endpoint.
pub fn ks_distance_per_n(seg: &OmegaSegment) -> Result<f64> {
    let mut z: Vec<f64> = seg
        .iter()
        .filter(|&(n, _)| n >= MIN_EK_N)
        .map(|(n, w)| ek_standardize(u32::from(w), n))
        .collect::<Result<_>>()?;
    if z.is_empty() {
        return Err(invalid("no integers ≥ 16 in segment"));
    }
    z.sort_by(f64::total_cmp);
    let mut atoms: Vec<(f64, u64)> = Vec::new();
    for t in z {
        match atoms.last_mut() {
            Some(last) if last.0 == t => last.1 += 1,
            _ => atoms.push((t, 1)),
        }
    }
    ks_distance_atoms(&atoms)
}

/// Standard normal CDF via the Abramowitz–Stegun 7.1.26 approximation of
/// erf (|error| ≤ 1.5e-7 on erf, so ≤ 7.5e-8 on Φ).
pub fn normal_cdf(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(invalid(format!("normal_cdf of non-finite {x}")));
    }
    Ok(phi(x))
}

fn phi(x: f64) -> f64 {
    if x < 0.0 {
        return 1.0 - phi(-x);
    }
    const P: f64 = 0.327_591_1;
    const A: [f64; 5] = [0.254_829_592, -0.284_496_736, 1.421_413_741, -1.453_152_027, 1.061_405_429];
    let z = x / std::f64::consts::SQRT_2;
    let t = 1.0 / (1.0 + P * z);
    let poly = t * (A[0] + t * (A[1] + t * (A[2] + t * (A[3] + t * A[4]))));
    let erf = 1.0 - poly * (-z * z).exp();
    0.5 * (1.0 + erf)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    /// Fraction of the sample whose standardized value falls in `[lo, hi)`.
    pub mass: f64,
    /// Empirical CDF at `hi`.
    pub empirical_cdf: f64,
    /// Φ(`hi`).
    pub normal_cdf: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EkReport {
    pub hardy_ramanujan: HardyRamanujanReport,
    pub ks_distance: f64,
    pub histogram: Vec<HistogramBin>,
    /// Mass standardized below / at-or-above the histogram range.
    pub underflow_mass: f64,
    pub overflow_mass: f64,
}

/// Full Erdős–Kac report: Hardy–Ramanujan moments, KS distance and a
/// standardized histogram with `bins` uniform bins over [`HIST_RANGE`].
pub fn erdos_kac_report(ledger: &MomentLedger, bins: u32) -> Result<EkReport> {
    if bins == 0 {
        return Err(invalid("histogram needs at least one bin"));
    }
    let hardy_ramanujan = hardy_ramanujan_report(ledger)?;
    let ks_distance = ks_distance_to_normal(ledger)?;
    let n = hardy_ramanujan.n;
    let total = ledger.count() as f64;
    let atoms: Vec<(f64, u64)> = ledger
        .hist
        .iter()
        .enumerate()
        .map(|(k, &c)| Ok((ek_standardize(k as u32, n)?, c)))
        .collect::<Result<_>>()?;

    let (lo, hi) = HIST_RANGE;
    let edge = |j: u32| lo + (hi - lo) * f64::from(j) / f64::from(bins);
    let mass_in = |a: f64, b: f64| {
        atoms
            .iter()
            .filter(|(t, _)| *t >= a && *t < b)
            .map(|a| a.1)
            .sum::<u64>() as f64
            / total
    };
    let cdf_at = |x: f64| atoms.iter().filter(|(t, _)| *t <= x).map(|a| a.1).sum::<u64>() as f64 / total;
    let histogram = (0..bins)
        .map(|j| {
            let (a, b) = (edge(j), edge(j + 1));
            Ok(HistogramBin {
                lo: a,
                hi: b,
                mass: mass_in(a, b),
                empirical_cdf: cdf_at(b),
                normal_cdf: normal_cdf(b)?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(EkReport {
        hardy_ramanujan,
        ks_distance,
        histogram,
        underflow_mass: mass_in(f64::NEG_INFINITY, lo),
        overflow_mass: mass_in(hi, f64::INFINITY),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sieve::{sieve_omega_segment, sieve_primes};

    fn ledger_upto(n: u64) -> MomentLedger {
        let base = sieve_primes(n.isqrt().max(2)).unwrap();
        let mut ledger = MomentLedger::new();
        ledger
            .accumulate(&sieve_omega_segment(2, n + 1, &base, false).unwrap())
            .unwrap();
        ledger
    }

    #[test]
    fn single_integer_ledger() {
        let ledger = ledger_upto(2);
        assert_eq!((ledger.count(), ledger.sum_omega(), ledger.sum_omega_sq()), (1, 1, 1));
    }

    #[test]
    fn sum_up_to_100() {
        let ledger = ledger_upto(100);
        assert_eq!(ledger.sum_omega(), 171);
        let hr = hardy_ramanujan_report(&ledger).unwrap();
        assert_eq!(hr.n, 100);
        assert_eq!(hr.mean, 171.0 / 99.0);
    }

    #[test]
    fn merge_split_at_50_commutes() {
        let base = sieve_primes(10).unwrap();
        let mut a = MomentLedger::new();
        a.accumulate(&sieve_omega_segment(2, 50, &base, false).unwrap()).unwrap();
        let mut b = MomentLedger::new();
        b.accumulate(&sieve_omega_segment(50, 100, &base, false).unwrap()).unwrap();
        let ab = a.merge(&b).unwrap();
        assert_eq!(ab, b.merge(&a).unwrap());
        assert_eq!(ab.covered(), &[(2, 100)]);
    }

    #[test]
    fn overlap_is_rejected() {
        let base = sieve_primes(10).unwrap();
        let mut ledger = MomentLedger::new();
        ledger.accumulate(&sieve_omega_segment(2, 50, &base, false).unwrap()).unwrap();
        let err = ledger.accumulate(&sieve_omega_segment(40, 60, &base, false).unwrap());
        assert!(matches!(err, Err(Error::InvalidArgument(_))));
        assert_eq!(ledger.count(), 48);
    }

    #[test]
    fn histogram_cap_is_enforced() {
        let mut ledger = MomentLedger::new();
        assert!(matches!(ledger.accumulate_counts(2, &[1, 32]), Err(Error::Capacity(_))));
        assert_eq!(ledger, MomentLedger::new());
    }

    #[test]
    fn degenerate_ledger_has_zero_variance() {
        // 2 and 3 are both prime
        let ledger = ledger_upto(3);
        let hr = hardy_ramanujan_report(&ledger).unwrap();
        assert_eq!(hr.variance, 0.0);
    }

    #[test]
    fn report_errors() {
        assert!(matches!(hardy_ramanujan_report(&ledger_upto(2)), Err(Error::InvalidArgument(_))));
        let mut two = MomentLedger::new();
        two.accumulate_counts(1, &[0, 1]).unwrap();
        assert!(matches!(hardy_ramanujan_report(&two), Err(Error::Domain(_))));
        assert!(matches!(ks_distance_to_normal(&MomentLedger::new()), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn standardization() {
        assert!(matches!(ek_standardize(1, 15), Err(Error::Domain(_))));
        let z = ek_standardize(3, 1_000_000).unwrap();
        assert!((z - 0.23093).abs() < 1e-5, "{z}");
        let ll = loglog(1_000_000).unwrap();
        assert!((ll - 2.62579).abs() < 1e-5);
    }

    #[test]
    fn single_atom_at_zero() {
        let d = ks_distance_atoms(&[(0.0, 10)]).unwrap();
        assert!((d - 0.5).abs() < 1e-9);
    }

    #[test]
    fn atoms_on_the_normal_curve_leave_only_jumps() {
        // right limits equal Φ exactly at each atom, so only left limits contribute
        let points = [-1.0, 0.0, 1.0, 2.0];
        let total = 1u64 << 40;
        let mut prev = 0u64;
        let mut atoms = Vec::new();
        for (i, &t) in points.iter().enumerate() {
            let upto = if i + 1 == points.len() {
                total
            } else {
                (phi(t) * total as f64).round() as u64
            };
            atoms.push((t, upto - prev));
            prev = upto;
        }
        let d = ks_distance_atoms(&atoms).unwrap();
        let last_jump = 1.0 - phi(1.0);
        let max_jump = atoms.iter().map(|a| a.1 as f64 / total as f64).fold(0.0, f64::max);
        assert!((d - max_jump.max(last_jump)).abs() < 1e-9, "{d} {max_jump}");
    }

    #[test]
    fn normal_cdf_values() {
        assert!((normal_cdf(0.0).unwrap() - 0.5).abs() < 1e-8);
        for x in [0.5, 1.0, 2.0] {
            let s = normal_cdf(x).unwrap() + normal_cdf(-x).unwrap();
            assert!((s - 1.0).abs() < 3e-7);
        }
        assert!(normal_cdf(f64::NAN).is_err());
        assert!(normal_cdf(f64::INFINITY).is_err());
    }

    #[test]
    fn normal_cdf_is_monotone() {
        let mut prev = 0.0;
        for i in -80_000..=80_000 {
            let v = phi(f64::from(i) * 1e-4);
            assert!(v >= prev, "decrease at {}", f64::from(i) * 1e-4);
            prev = v;
        }
    }

    #[test]
    fn histogram_mass_sums_to_one() {
        let report = erdos_kac_report(&ledger_upto(10_000), DEFAULT_BINS).unwrap();
        assert_eq!(report.histogram.len(), 41);
        let total: f64 = report.histogram.iter().map(|b| b.mass).sum::<f64>()
            + report.underflow_mass
            + report.overflow_mass;
        assert!((total - 1.0).abs() < 1e-12);
        assert!((report.histogram[40].hi - 4.2).abs() < 1e-12);
        assert!(report.ks_distance > 0.0 && report.ks_distance <= 1.0);
    }
}
