//! Prime generation and per-integer prime-factor counts.
//!
//! [`sieve_primes`] builds a plain bitset sieve of Eratosthenes. The factor
//! counts ω(n) (distinct primes) and Ω(n) (with multiplicity) come from a
//! segmented sieve: every base prime `p ≤ √(hi−1)` walks its multiples in
//! `[lo, hi)`, bumps the count and divides the p-power out of a residual copy
//! of `n`. Whatever is left above 1 afterwards is a single prime larger than
//! `√(hi−1)` and contributes one more factor.
//!
//! [`trial_division_omega`] is the slow reference used to check the sieve.

use std::thread;

use crate::error::{invalid, Error, Result};

/// Largest limit accepted by [`sieve_primes`].
pub const MAX_PRIME_LIMIT: u64 = 1 << 32;

/// Default number of integers per segment.
pub const DEFAULT_SEGMENT_SIZE: u64 = 1 << 20;

/// Immutable prime membership for `0..=limit`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeSet {
    limit: u64,
    words: Vec<u64>,
}

impl PrimeSet {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Membership test. Values above the limit are reported as not prime.
    pub fn contains(&self, n: u64) -> bool {
        if n > self.limit {
            return false;
        }
        self.words[(n / 64) as usize] >> (n % 64) & 1 == 1
    }

    /// π(limit).
    pub fn count(&self) -> u64 {
        self.words.iter().map(|w| u64::from(w.count_ones())).sum()
    }

    /// Primes in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let base = i as u64 * 64;
            BitIter(w).map(move |b| base + u64::from(b))
        })
    }
}

struct BitIter(u64);

impl Iterator for BitIter {
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
        if self.0 == 0 {
            return None;
        }
        let b = self.0.trailing_zeros();
        self.0 &= self.0 - 1;
        Some(b)
    }
}

/// Exact prime membership for every `n ≤ limit`.
pub fn sieve_primes(limit: u64) -> Result<PrimeSet> {
    if limit < 2 {
        return Err(invalid(format!("sieve limit must be at least 2, got {limit}")));
    }
    if limit > MAX_PRIME_LIMIT {
        return Err(Error::Capacity(format!(
            "sieve limit {limit} exceeds the cap {MAX_PRIME_LIMIT}"
        )));
    }
    let nwords = (limit / 64 + 1) as usize;
    let mut words = vec![!0u64; nwords];
    // clear 0, 1 and everything above the limit
    words[0] &= !0b11;
    let tail = (limit % 64) + 1;
    if tail < 64 {
        words[nwords - 1] &= (1u64 << tail) - 1;
    }
    let clear = |words: &mut [u64], n: u64| words[(n / 64) as usize] &= !(1u64 << (n % 64));
    let mut p = 2u64;
    while p * p <= limit {
        if words[(p / 64) as usize] >> (p % 64) & 1 == 1 {
            let mut m = p * p;
            while m <= limit {
                clear(&mut words, m);
                m += p;
            }
        }
        p += 1;
    }
    Ok(PrimeSet { limit, words })
}

/// π(upto) for `upto ≤ ps.limit()`.
pub fn prime_count(ps: &PrimeSet, upto: u64) -> Result<u64> {
    if upto > ps.limit {
        return Err(Error::Range(format!(
            "prime_count({upto}) beyond sieve limit {}",
            ps.limit
        )));
    }
    let full = (upto / 64) as usize;
    let mut count: u64 = ps.words[..full]
        .iter()
        .map(|w| u64::from(w.count_ones()))
        .sum();
    let rem = upto % 64 + 1;
    let mask = if rem == 64 { !0 } else { (1u64 << rem) - 1 };
    count += u64::from((ps.words[full] & mask).count_ones());
    Ok(count)
}

/// ω(n) (and optionally Ω(n)) for every `n` in `[lo, hi)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OmegaSegment {
    pub(crate) lo: u64,
    pub(crate) hi: u64,
    pub(crate) omega: Vec<u8>,
    pub(crate) big_omega: Option<Vec<u8>>,
}

impl OmegaSegment {
    /// Builds a segment from raw counts; `omega.len()` must equal `hi − lo`.
    pub fn from_parts(lo: u64, hi: u64, omega: Vec<u8>, big_omega: Option<Vec<u8>>) -> Result<Self> {
        check_bounds(lo, hi)?;
        let len = (hi - lo) as usize;
        if omega.len() != len || big_omega.as_ref().is_some_and(|b| b.len() != len) {
            return Err(invalid(format!(
                "segment [{lo}, {hi}) needs {len} counts, got {}",
                omega.len()
            )));
        }
        Ok(Self { lo, hi, omega, big_omega })
    }

    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    pub fn omega(&self) -> &[u8] {
        &self.omega
    }

    pub fn big_omega(&self) -> Option<&[u8]> {
        self.big_omega.as_deref()
    }

    /// ω(n) for `n` inside the segment.
    pub fn omega_of(&self, n: u64) -> Option<u8> {
        (self.lo..self.hi)
            .contains(&n)
            .then(|| self.omega[(n - self.lo) as usize])
    }

    /// `(n, ω(n))` pairs in increasing `n`.
    pub fn iter(&self) -> impl Iterator<Item = (u64, u8)> + '_ {
        (self.lo..).zip(self.omega.iter().copied())
    }

    /// Appends the segment `[self.hi, next.hi)`.
    pub fn extend(&mut self, next: OmegaSegment) -> Result<()> {
        if next.lo != self.hi {
            return Err(invalid(format!(
                "cannot append [{}, {}) to [{}, {})",
                next.lo, next.hi, self.lo, self.hi
            )));
        }
        match (&mut self.big_omega, next.big_omega) {
            (Some(a), Some(b)) => a.extend_from_slice(&b),
            (None, None) => {}
            _ => return Err(invalid("cannot mix segments with and without Ω")),
        }
        self.omega.extend_from_slice(&next.omega);
        self.hi = next.hi;
        Ok(())
    }
}

fn check_bounds(lo: u64, hi: u64) -> Result<()> {
    if hi <= lo {
        return Err(invalid(format!("empty or reversed segment [{lo}, {hi})")));
    }
    if lo < 2 {
        return Err(invalid(format!("segments start at 2 or above, got lo = {lo}")));
    }
    Ok(())
}

/// Segmented-sieve factor counts over `[lo, hi)`.
///
/// `base_primes` must cover `√(hi−1)`. Ω is only tracked when `with_big_omega` is set.
pub fn sieve_omega_segment(
    lo: u64,
    hi: u64,
    base_primes: &PrimeSet,
    with_big_omega: bool,
) -> Result<OmegaSegment> {
    check_bounds(lo, hi)?;
    let top = hi - 1;
    let root = top.isqrt();
    if base_primes.limit < root {
        return Err(Error::Precondition(format!(
            "base primes up to {} do not cover sqrt({top}) = {root}",
            base_primes.limit
        )));
    }
    let len = (hi - lo) as usize;
    let mut omega = vec![0u8; len];
    let mut big = with_big_omega.then(|| vec![0u8; len]);
    let mut residual: Vec<u64> = (lo..hi).collect();

    for p in base_primes.iter().take_while(|&p| p <= root) {
        let first = lo.div_ceil(p) * p;
        let mut idx = (first - lo) as usize;
        while idx < len {
            omega[idx] += 1;
            let r = &mut residual[idx];
            let mut e = 0u8;
            while *r % p == 0 {
                *r /= p;
                e += 1;
            }
            if let Some(b) = big.as_mut() {
                b[idx] += e;
            }
            idx += p as usize;
        }
    }
    for (i, &r) in residual.iter().enumerate() {
        if r > 1 {
            omega[i] += 1;
            if let Some(b) = big.as_mut() {
                b[i] += 1;
            }
        }
    }
    Ok(OmegaSegment { lo, hi, omega, big_omega: big })
}

/// Sieves `[lo, hi)` in chunks of `segment_size`, spreading the chunks over
/// `workers` threads. The result does not depend on the schedule.
pub fn sieve_omega_range(
    lo: u64,
    hi: u64,
    base_primes: &PrimeSet,
    segment_size: u64,
    workers: usize,
    with_big_omega: bool,
) -> Result<OmegaSegment> {
    check_bounds(lo, hi)?;
    if segment_size == 0 {
        return Err(invalid("segment size must be positive"));
    }
    let bounds: Vec<(u64, u64)> = (lo..hi)
        .step_by(segment_size as usize)
        .map(|a| (a, a.saturating_add(segment_size).min(hi)))
        .collect();
    let workers = workers.clamp(1, bounds.len());

    let mut parts: Vec<Result<OmegaSegment>> = if workers == 1 {
        bounds
            .iter()
            .map(|&(a, b)| sieve_omega_segment(a, b, base_primes, with_big_omega))
            .collect()
    } else {
        let mut slots: Vec<Option<Result<OmegaSegment>>> = (0..bounds.len()).map(|_| None).collect();
        thread::scope(|s| {
            let handles: Vec<_> = (0..workers)
                .map(|w| {
                    let bounds = &bounds;
                    s.spawn(move || {
                        bounds
                            .iter()
                            .enumerate()
                            .skip(w)
                            .step_by(workers)
                            .map(|(i, &(a, b))| (i, sieve_omega_segment(a, b, base_primes, with_big_omega)))
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            for h in handles {
                for (i, part) in h.join().expect("sieve worker panicked") {
                    slots[i] = Some(part);
                }
            }
        });
        slots.into_iter().map(|s| s.expect("every segment scheduled")).collect()
    };

    let mut iter = parts.drain(..);
    let mut acc = iter.next().expect("at least one segment")?;
    for part in iter {
        acc.extend(part?)?;
    }
    Ok(acc)
}

/// ω(n) for all `2 ≤ n ≤ n_max`, sieving its own base primes.
pub fn omega_upto(n_max: u64, segment_size: u64, workers: usize) -> Result<OmegaSegment> {
    if n_max < 2 {
        return Err(invalid(format!("n_max must be at least 2, got {n_max}")));
    }
    let base = sieve_primes(n_max.isqrt().max(2))?;
    sieve_omega_range(2, n_max + 1, &base, segment_size, workers, false)
}

/// `(ω(n), Ω(n))` by trial division.
pub fn trial_division_omega(n: u64) -> Result<(u32, u32)> {
    if n == 0 {
        return Err(invalid("ω(0) is undefined"));
    }
    let mut m = n;
    let (mut distinct, mut total) = (0u32, 0u32);
    let mut d = 2u64;
    while d <= m / d {
        if m % d == 0 {
            distinct += 1;
            while m % d == 0 {
                m /= d;
                total += 1;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if m > 1 {
        distinct += 1;
        total += 1;
    }
    Ok((distinct, total))
}
