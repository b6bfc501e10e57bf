//! Toy machines for exact description-length and algorithmic-probability
//! experiments.
//!
//! The machines are decoders, not universal computers: that is what makes
//! exact complexity and exact mass computable here, while the real K_U is not.
//!
//! Program format for [`Machine::U1`]:
//!
//! ```text
//! 0 γ(ℓ+1) payload[ℓ]              LITERAL: output = payload
//! 1 γ(k) γ(ℓ+1) block[ℓ]           REPEAT:  output = block repeated k times (k ≥ 1, ℓ ≥ 1)
//! ```
//!
//! γ(m) is ⌊log₂ m⌋ zeros followed by m in binary. [`Machine::U2`] swaps the
//! meaning of the mode bit and uses Elias δ in place of γ. [`Machine::U0`]
//! decodes like U1 but ignores bits left over after a complete program, so
//! every extension of a program is again a program for the same output.
//!
//! A REPEAT with an empty block is rejected ([`DecodeError::EmptyBlock`]).
//! The only program for the empty output is therefore the LITERAL `01`
//! (U1) or `11` (U2).

mod code;
mod complexity;
mod dyadic;
mod mass;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

pub use code::{delta_len, gamma_len, push_delta, push_gamma, BitString, IntCode, ParseBitStringError};
pub use complexity::{
    complexity_table_bruteforce, shortest_program, toy_complexity, toy_complexity_bruteforce,
};
pub use dyadic::Dyadic;
pub use mass::{
    coding_theorem_correlation, divergence_partial_sum, enumerate_mass, for_each_program,
    invariance_gap, DivergenceSum, InvarianceReport, UniversalMassEstimate, MAX_INVARIANCE_LEN,
};

use code::BitReader;

/// Largest program length enumerated exhaustively.
pub const MAX_CUTOFF: u32 = 26;

/// Decoded outputs longer than this are refused.
pub const MAX_OUTPUT_BITS: u64 = 1 << 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Machine {
    U0,
    U1,
    U2,
}

impl Machine {
    pub fn description(self) -> &'static str {
        match self {
            Machine::U1 => "prefix-free; mode 0 = literal, 1 = repeat; Elias gamma fields",
            Machine::U2 => "prefix-free; mode 1 = literal, 0 = repeat; Elias delta fields",
            Machine::U0 => "U1 decoder accepting trailing bits (not prefix-free)",
        }
    }

    pub fn is_prefix_free(self) -> bool {
        !matches!(self, Machine::U0)
    }

    pub fn int_code(self) -> IntCode {
        match self {
            Machine::U0 | Machine::U1 => IntCode::Gamma,
            Machine::U2 => IntCode::Delta,
        }
    }

    /// Mode bit selecting LITERAL.
    pub fn literal_bit(self) -> bool {
        matches!(self, Machine::U2)
    }
}

impl fmt::Display for Machine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Machine::U0 => "u0",
            Machine::U1 => "u1",
            Machine::U2 => "u2",
        })
    }
}

impl FromStr for Machine {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "u0" => Ok(Machine::U0),
            "u1" => Ok(Machine::U1),
            "u2" => Ok(Machine::U2),
            other => Err(format!("unknown machine {other:?} (expected u0, u1 or u2)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Error)]
pub enum DecodeError {
    /// Input ended inside a field: an incomplete program.
    #[error("incomplete program: input ends mid-field")]
    Dangling,
    /// A complete program was followed by more bits: not a program.
    #[error("not a program: {trailing} bits after a complete program of {consumed}")]
    Trailing { consumed: usize, trailing: usize },
    #[error("not a program: REPEAT with an empty block")]
    EmptyBlock,
    #[error("not a program: integer field exceeds 64 bits")]
    Overflow,
    #[error("output longer than {MAX_OUTPUT_BITS} bits")]
    OutputTooLong,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decoded {
    pub output: BitString,
    /// Bits read by the decoder; equals the program length for U1/U2.
    pub consumed: usize,
}

/// Runs `machine` on `bits`.
pub fn decode(machine: Machine, bits: &[bool]) -> Result<Decoded, DecodeError> {
    let mut r = BitReader::new(bits);
    let code = machine.int_code();
    let output = if r.bit()? == machine.literal_bit() {
        let len = r.read(code)? - 1;
        if len > MAX_OUTPUT_BITS {
            return Err(DecodeError::OutputTooLong);
        }
        BitString::from_bits(r.take(len as usize)?.to_vec())
    } else {
        let k = r.read(code)?;
        let len = r.read(code)? - 1;
        if len == 0 {
            return Err(DecodeError::EmptyBlock);
        }
        if k.saturating_mul(len) > MAX_OUTPUT_BITS {
            return Err(DecodeError::OutputTooLong);
        }
        BitString::from_bits(r.take(len as usize)?.to_vec()).repeat(k as usize)
    };
    let consumed = r.position();
    if machine.is_prefix_free() && r.remaining() > 0 {
        return Err(DecodeError::Trailing {
            consumed,
            trailing: r.remaining(),
        });
    }
    Ok(Decoded { output, consumed })
}

/// A candidate program together with its decode result.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToyProgram {
    pub bits: BitString,
    pub machine: Machine,
    pub decode: Result<Decoded, DecodeError>,
}

impl ToyProgram {
    pub fn new(machine: Machine, bits: BitString) -> Self {
        let decode = decode(machine, bits.bits());
        Self { bits, machine, decode }
    }

    pub fn output(&self) -> Option<&BitString> {
        self.decode.as_ref().ok().map(|d| &d.output)
    }
}
