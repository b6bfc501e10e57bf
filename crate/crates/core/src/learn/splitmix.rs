//! SplitMix64 and the Fisher–Yates permutation used by shuffle splits.
//!
//! Normative: the generator adds 0x9E3779B97F4A7C15 to its state and mixes
//! with the shifts 30/27/31 and multipliers 0xBF58476D1CE4E5B9 /
//! 0x94D049BB133111EB. The permutation starts from the identity and, for
//! `i = len−1` down to `1`, swaps slot `i` with slot `next() mod (i+1)`.

#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
}

pub fn permutation(len: usize, seed: u64) -> Vec<usize> {
    let mut rng = SplitMix64::new(seed);
    let mut p: Vec<usize> = (0..len).collect();
    for i in (1..len).rev() {
        let j = (rng.next_u64() % (i as u64 + 1)) as usize;
        p.swap(i, j);
    }
    p
}
