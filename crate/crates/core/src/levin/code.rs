//! Bitstrings and the Elias γ / δ integer codes.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use super::DecodeError;

/// A finite binary string, ordered shortlex (by length, then lexicographically).
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn new() -> Self {
        Self(Vec::new())
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    /// The `len` low bits of `value`, most significant first.
    pub fn from_value(value: u64, len: u32) -> Self {
        Self((0..len).rev().map(|i| value >> i & 1 == 1).collect())
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, bit: bool) {
        self.0.push(bit);
    }

    /// Every bitstring of exactly `len` bits, in increasing order.
    pub fn all_of_length(len: u32) -> impl Iterator<Item = BitString> {
        assert!(len < 64, "bitstring enumeration limited to 63 bits");
        (0..1u64 << len).map(move |v| Self::from_value(v, len))
    }

    /// `self` concatenated `k` times.
    pub fn repeat(&self, k: usize) -> Self {
        Self(self.0.repeat(k))
    }

    /// Block lengths `d` (dividing the length) such that the string is its
    /// first `d` bits repeated.
    pub fn periods(&self) -> impl Iterator<Item = usize> + '_ {
        let n = self.len();
        (1..=n).filter(move |&d| n % d == 0 && (d..n).all(|i| self.0[i] == self.0[i - d]))
    }
}

impl Ord for BitString {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for BitString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseBitStringError(pub char);

impl fmt::Display for ParseBitStringError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "bitstrings contain only '0' and '1', found {:?}", self.0)
    }
}

impl std::error::Error for ParseBitStringError {}

impl FromStr for BitString {
    type Err = ParseBitStringError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(ParseBitStringError(other)),
            })
            .collect::<Result<_, _>>()
            .map(Self)
    }
}

/// Self-delimiting code for positive integers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IntCode {
    Gamma,
    Delta,
}

fn floor_log2(m: u64) -> u32 {
    63 - m.leading_zeros()
}

/// |γ(m)| = 2⌊log₂ m⌋ + 1.
pub fn gamma_len(m: u64) -> u32 {
    assert!(m >= 1, "γ codes positive integers");
    2 * floor_log2(m) + 1
}

/// |δ(m)| = |γ(⌊log₂ m⌋ + 1)| + ⌊log₂ m⌋.
pub fn delta_len(m: u64) -> u32 {
    assert!(m >= 1, "δ codes positive integers");
    let b = floor_log2(m);
    gamma_len(u64::from(b) + 1) + b
}

/// ⌊log₂ m⌋ zeros, then m in binary.
pub fn push_gamma(out: &mut BitString, m: u64) {
    assert!(m >= 1, "γ codes positive integers");
    let b = floor_log2(m);
    out.0.extend(std::iter::repeat_n(false, b as usize));
    out.0.extend(BitString::from_value(m, b + 1).0);
}

/// γ(⌊log₂ m⌋ + 1), then m in binary without its leading 1.
pub fn push_delta(out: &mut BitString, m: u64) {
    assert!(m >= 1, "δ codes positive integers");
    let b = floor_log2(m);
    push_gamma(out, u64::from(b) + 1);
    out.0.extend(BitString::from_value(m, b).0);
}

impl IntCode {
    pub fn len(self, m: u64) -> u32 {
        match self {
            IntCode::Gamma => gamma_len(m),
            IntCode::Delta => delta_len(m),
        }
    }

    pub fn push(self, out: &mut BitString, m: u64) {
        match self {
            IntCode::Gamma => push_gamma(out, m),
            IntCode::Delta => push_delta(out, m),
        }
    }
}

/// Cursor over a bit slice. Running out of bits reports [`DecodeError::Dangling`].
pub(crate) struct BitReader<'a> {
    bits: &'a [bool],
    pos: usize,
}

impl<'a> BitReader<'a> {
    pub(crate) fn new(bits: &'a [bool]) -> Self {
        Self { bits, pos: 0 }
    }

    pub(crate) fn position(&self) -> usize {
        self.pos
    }

    pub(crate) fn remaining(&self) -> usize {
        self.bits.len() - self.pos
    }

    pub(crate) fn bit(&mut self) -> Result<bool, DecodeError> {
        let b = *self.bits.get(self.pos).ok_or(DecodeError::Dangling)?;
        self.pos += 1;
        Ok(b)
    }

    pub(crate) fn take(&mut self, n: usize) -> Result<&'a [bool], DecodeError> {
        if self.remaining() < n {
            return Err(DecodeError::Dangling);
        }
        let s = &self.bits[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn uint(&mut self, n: u32) -> Result<u64, DecodeError> {
        Ok(self
            .take(n as usize)?
            .iter()
            .fold(0u64, |acc, &b| acc << 1 | u64::from(b)))
    }

    pub(crate) fn gamma(&mut self) -> Result<u64, DecodeError> {
        let mut zeros = 0u32;
        while !self.bit()? {
            zeros += 1;
            if zeros > 63 {
                return Err(DecodeError::Overflow);
            }
        }
        Ok(1 << zeros | self.uint(zeros)?)
    }

    pub(crate) fn delta(&mut self) -> Result<u64, DecodeError> {
        let b = self.gamma()? - 1;
        if b > 63 {
            return Err(DecodeError::Overflow);
        }
        Ok(1 << b | self.uint(b as u32)?)
    }

    pub(crate) fn read(&mut self, code: IntCode) -> Result<u64, DecodeError> {
        match code {
            IntCode::Gamma => self.gamma(),
            IntCode::Delta => self.delta(),
        }
    }
}
