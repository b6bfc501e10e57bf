//! Exhaustive program enumeration: dyadic mass, invariance gaps and the
//! divergent sum on the non-prefix-free machine.

use std::collections::BTreeMap;

use serde::Serialize;

use super::{decode, toy_complexity, BitString, Decoded, DecodeError, Dyadic, Machine, MAX_CUTOFF};
use crate::error::{Error, Result};

/// Largest output length covered by [`invariance_gap`].
pub const MAX_INVARIANCE_LEN: u32 = 14;

fn require_cutoff(cutoff: u32) -> Result<()> {
    if cutoff > MAX_CUTOFF {
        return Err(Error::Capacity(format!(
            "cutoff {cutoff} exceeds the enumeration bound {MAX_CUTOFF}"
        )));
    }
    Ok(())
}

/// Calls `visit` on every complete program of at most `cutoff` bits for a
/// prefix-free machine, depth first, `0` before `1`.
///
/// A prefix that already decodes is a leaf (no extension can decode), and a
/// prefix rejected as malformed stays rejected, so only dangling prefixes are
/// extended.
pub fn for_each_program<F: FnMut(&[bool], &Decoded)>(machine: Machine, cutoff: u32, mut visit: F) -> Result<()> {
    require_cutoff(cutoff)?;
    if !machine.is_prefix_free() {
        return Err(Error::Unsupported(format!("{machine} programs are not prefix-free")));
    }
    fn walk<F: FnMut(&[bool], &Decoded)>(machine: Machine, prefix: &mut Vec<bool>, cutoff: usize, visit: &mut F) {
        match decode(machine, prefix) {
            Ok(d) => visit(prefix, &d),
            Err(DecodeError::Dangling) if prefix.len() < cutoff => {
                for b in [false, true] {
                    prefix.push(b);
                    walk(machine, prefix, cutoff, visit);
                    prefix.pop();
                }
            }
            Err(_) => {}
        }
    }
    walk(machine, &mut Vec::with_capacity(cutoff as usize), cutoff as usize, &mut visit);
    Ok(())
}

/// Σ 2^-|p| over programs `p` of at most `cutoff` bits, grouped by output.
///
/// On U0 a program is any string whose decoded prefix is a U1 program, so a
/// U1 program `q` stands for `2^(cutoff−|q|+1) − 1` strings and contributes
/// `(cutoff − |q| + 1) · 2^-|q|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniversalMassEstimate {
    machine: Machine,
    cutoff: u32,
    /// Numerators over 2^cutoff.
    numerators: BTreeMap<BitString, u128>,
    programs_by_length: Vec<u64>,
}

impl UniversalMassEstimate {
    pub fn machine(&self) -> Machine {
        self.machine
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn mass(&self, x: &BitString) -> Dyadic {
        self.numerators
            .get(x)
            .map_or(Dyadic::ZERO, |&n| Dyadic::new(n, self.cutoff))
    }

    /// `(output, mass)` in shortlex order of outputs.
    pub fn iter(&self) -> impl Iterator<Item = (&BitString, Dyadic)> + '_ {
        self.numerators
            .iter()
            .map(move |(x, &n)| (x, Dyadic::new(n, self.cutoff)))
    }

    pub fn len(&self) -> usize {
        self.numerators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.numerators.is_empty()
    }

    pub fn total(&self) -> Dyadic {
        Dyadic::new(self.numerators.values().sum(), self.cutoff)
    }

    /// Number of valid programs of each length `0..=cutoff`.
    pub fn programs_by_length(&self) -> &[u64] {
        &self.programs_by_length
    }

    /// Σ 2^-|p| over programs with `|p| ≤ c`.
    pub fn total_at(&self, c: u32) -> Dyadic {
        self.programs_by_length
            .iter()
            .enumerate()
            .take(c as usize + 1)
            .map(|(len, &count)| Dyadic::new(u128::from(count), len as u32))
            .sum()
    }
}

pub fn enumerate_mass(machine: Machine, cutoff: u32) -> Result<UniversalMassEstimate> {
    require_cutoff(cutoff)?;
    let base = if machine.is_prefix_free() { machine } else { Machine::U1 };
    let mut numerators: BTreeMap<BitString, u128> = BTreeMap::new();
    let mut programs_by_length = vec![0u64; cutoff as usize + 1];
    for_each_program(base, cutoff, |p, d| {
        let len = p.len() as u32;
        let weight = if machine.is_prefix_free() {
            programs_by_length[len as usize] += 1;
            1u128 << (cutoff - len)
        } else {
            for (ext, slot) in programs_by_length.iter_mut().enumerate().skip(len as usize) {
                *slot += 1 << (ext as u32 - len);
            }
            u128::from(cutoff - len + 1) << (cutoff - len)
        };
        *numerators.entry(d.output.clone()).or_default() += weight;
    })?;
    Ok(UniversalMassEstimate {
        machine,
        cutoff,
        numerators,
        programs_by_length,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvarianceReport {
    pub n_max: u32,
    /// |K_U1(x) − K_U2(x)|
    pub per_x_gap: BTreeMap<BitString, u32>,
    /// Largest gap among strings of each length `0..=n_max`.
    pub gap_by_length: Vec<u32>,
    pub c_measured: u32,
}

pub fn invariance_gap(n_max: u32) -> Result<InvarianceReport> {
    if n_max > MAX_INVARIANCE_LEN {
        return Err(Error::Capacity(format!(
            "n_max {n_max} exceeds {MAX_INVARIANCE_LEN}"
        )));
    }
    let mut per_x_gap = BTreeMap::new();
    let mut gap_by_length = Vec::with_capacity(n_max as usize + 1);
    for len in 0..=n_max {
        let mut worst = 0;
        for x in BitString::all_of_length(len) {
            let gap = toy_complexity(Machine::U1, &x)?.abs_diff(toy_complexity(Machine::U2, &x)?);
            worst = worst.max(gap);
            per_x_gap.insert(x, gap);
        }
        gap_by_length.push(worst);
    }
    let c_measured = gap_by_length.iter().copied().max().unwrap_or(0);
    Ok(InvarianceReport {
        n_max,
        per_x_gap,
        gap_by_length,
        c_measured,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DivergenceSum {
    pub sum: Dyadic,
    /// Length of the shortest U0 program for `x`, if one fits in the cutoff.
    pub shortest: Option<u32>,
}

impl DivergenceSum {
    pub fn found(&self) -> bool {
        self.shortest.is_some()
    }
}

/// Σ 2^-|p| over every U0 program of at most `cutoff` bits printing `x`.
pub fn divergence_partial_sum(x: &BitString, cutoff: u32) -> Result<DivergenceSum> {
    require_cutoff(cutoff)?;
    let mut numerator = 0u128;
    let mut shortest: Option<u32> = None;
    for_each_program(Machine::U1, cutoff, |p, d| {
        if d.output == *x {
            let len = p.len() as u32;
            numerator += u128::from(cutoff - len + 1) << (cutoff - len);
            shortest = Some(shortest.map_or(len, |s| s.min(len)));
        }
    })?;
    Ok(DivergenceSum {
        sum: Dyadic::new(numerator, cutoff),
        shortest,
    })
}

/// Spearman rank correlation between K(x) and −log₂ m(x) over all `x` with
/// `|x| ≤ n_max`, masses taken at `cutoff`. Outputs without a program inside
/// the cutoff rank as −log₂ 0 = +∞.
pub fn coding_theorem_correlation(machine: Machine, n_max: u32, cutoff: u32) -> Result<f64> {
    if n_max > MAX_INVARIANCE_LEN {
        return Err(Error::Capacity(format!("n_max {n_max} exceeds {MAX_INVARIANCE_LEN}")));
    }
    let mass = enumerate_mass(machine, cutoff)?;
    let mut k = Vec::new();
    let mut surprise = Vec::new();
    for len in 0..=n_max {
        for x in BitString::all_of_length(len) {
            k.push(f64::from(toy_complexity(machine, &x)?));
            surprise.push(-mass.mass(&x).to_f64().log2());
        }
    }
    Ok(pearson(&average_ranks(&k), &average_ranks(&surprise)))
}

/// 1-based ranks, ties sharing their average rank.
fn average_ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut ranks = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &t in &idx[i..=j] {
            ranks[t] = r;
        }
        i = j + 1;
    }
    ranks
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}
