use std::collections::HashMap;

use super::{decode, BitString, Machine, MAX_CUTOFF};
use crate::error::{Error, Result};

fn require_prefix_free(machine: Machine) -> Result<()> {
    if machine.is_prefix_free() {
        Ok(())
    } else {
        Err(Error::Unsupported(format!(
            "complexity on {machine} is not meaningful: its programs are not prefix-free"
        )))
    }
}

fn require_cutoff(cutoff: u32) -> Result<()> {
    if cutoff > MAX_CUTOFF {
        return Err(Error::Capacity(format!(
            "cutoff {cutoff} exceeds the enumeration bound {MAX_CUTOFF}"
        )));
    }
    Ok(())
}

/// Program shapes that can print `x`, as `(k, block_len)`; `None` is LITERAL.
fn candidates(x: &BitString) -> impl Iterator<Item = Option<(u64, usize)>> + '_ {
    std::iter::once(None).chain(x.periods().map(|d| Some(((x.len() / d) as u64, d))))
}

fn cost(machine: Machine, x: &BitString, shape: Option<(u64, usize)>) -> u32 {
    let code = machine.int_code();
    match shape {
        None => 1 + code.len(x.len() as u64 + 1) + x.len() as u32,
        Some((k, d)) => 1 + code.len(k) + code.len(d as u64 + 1) + d as u32,
    }
}

/// Exact K(x) on U1 or U2, from code lengths alone.
pub fn toy_complexity(machine: Machine, x: &BitString) -> Result<u32> {
    require_prefix_free(machine)?;
    Ok(candidates(x)
        .map(|s| cost(machine, x, s))
        .min()
        .expect("literal always available"))
}

/// A shortest program for `x` (ties broken toward LITERAL, then shorter blocks).
pub fn shortest_program(machine: Machine, x: &BitString) -> Result<BitString> {
    require_prefix_free(machine)?;
    let shape = candidates(x)
        .min_by_key(|&s| cost(machine, x, s))
        .expect("literal always available");
    let code = machine.int_code();
    let mut p = BitString::new();
    match shape {
        None => {
            p.push(machine.literal_bit());
            code.push(&mut p, x.len() as u64 + 1);
            x.bits().iter().for_each(|&b| p.push(b));
        }
        Some((k, d)) => {
            p.push(!machine.literal_bit());
            code.push(&mut p, k);
            code.push(&mut p, d as u64 + 1);
            x.bits()[..d].iter().for_each(|&b| p.push(b));
        }
    }
    Ok(p)
}

/// Shortest program for `x` of at most `cutoff` bits, found by decoding every
/// bitstring in shortlex order.
pub fn toy_complexity_bruteforce(machine: Machine, x: &BitString, cutoff: u32) -> Result<Option<u32>> {
    require_cutoff(cutoff)?;
    for len in 0..=cutoff {
        let hit = BitString::all_of_length(len)
            .any(|p| decode(machine, p.bits()).is_ok_and(|d| d.output == *x));
        if hit {
            return Ok(Some(len));
        }
    }
    Ok(None)
}

/// Brute-force complexity of every output of length `≤ max_output_len`
/// reachable by a program of at most `cutoff` bits.
pub fn complexity_table_bruteforce(
    machine: Machine,
    cutoff: u32,
    max_output_len: usize,
) -> Result<HashMap<BitString, u32>> {
    require_cutoff(cutoff)?;
    let mut table = HashMap::new();
    for len in 0..=cutoff {
        for p in BitString::all_of_length(len) {
            if let Ok(d) = decode(machine, p.bits()) {
                if d.output.len() <= max_output_len {
                    table.entry(d.output).or_insert(len);
                }
            }
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(toy_complexity(Machine::U1, &bs("")).unwrap(), 2);
        assert_eq!(toy_complexity(Machine::U1, &bs("1")).unwrap(), 5);
        assert_eq!(toy_complexity(Machine::U1, &bs("0101")).unwrap(), 9);
        assert_eq!(toy_complexity(Machine::U2, &bs("")).unwrap(), 2);
        assert!(matches!(toy_complexity(Machine::U0, &bs("1")), Err(Error::Unsupported(_))));
    }

    #[test]
    fn bruteforce_examples() {
        assert_eq!(toy_complexity_bruteforce(Machine::U1, &bs(""), 8).unwrap(), Some(2));
        assert_eq!(toy_complexity_bruteforce(Machine::U1, &bs("1"), 8).unwrap(), Some(5));
        assert_eq!(toy_complexity_bruteforce(Machine::U1, &bs("0101"), 12).unwrap(), Some(9));
        let long = bs("01101001100101101001");
        assert_eq!(toy_complexity_bruteforce(Machine::U1, &long, 8).unwrap(), None);
        assert!(matches!(
            toy_complexity_bruteforce(Machine::U1, &long, 27),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn shortest_programs_decode_back() {
        for m in [Machine::U1, Machine::U2] {
            for len in 0..=8 {
                for x in BitString::all_of_length(len) {
                    let p = shortest_program(m, &x).unwrap();
                    assert_eq!(p.len() as u32, toy_complexity(m, &x).unwrap());
                    assert_eq!(decode(m, p.bits()).unwrap().output, x);
                }
            }
        }
        assert_eq!(shortest_program(Machine::U1, &bs("0101")).unwrap(), bs("101001101"));
    }

    #[test]
    fn literal_bound() {
        for len in 0..=10u32 {
            for x in BitString::all_of_length(len) {
                let k = toy_complexity(Machine::U1, &x).unwrap();
                assert!(k <= len + super::super::gamma_len(u64::from(len) + 1) + 1);
            }
        }
    }
}
