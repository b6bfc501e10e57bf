use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

/// Exact non-negative dyadic rational `num / 2^log2_den`, kept in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: u128,
    log2_den: u32,
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic { num: 0, log2_den: 0 };
    pub const ONE: Dyadic = Dyadic { num: 1, log2_den: 0 };

    pub fn new(num: u128, log2_den: u32) -> Self {
        if num == 0 {
            return Self::ZERO;
        }
        let shift = num.trailing_zeros().min(log2_den);
        Self {
            num: num >> shift,
            log2_den: log2_den - shift,
        }
    }

    /// 2^-k
    pub fn pow2_neg(k: u32) -> Self {
        Self::new(1, k)
    }

    pub fn numerator(self) -> u128 {
        self.num
    }

    pub fn log2_denominator(self) -> u32 {
        self.log2_den
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 * (-f64::from(self.log2_den)).exp2()
    }

    /// Numerator over `2^log2_den`, or `None` if that denominator is too small
    /// or the result overflows.
    pub fn numerator_over(self, log2_den: u32) -> Option<u128> {
        let shift = log2_den.checked_sub(self.log2_den)?;
        let scaled = self.num.checked_shl(shift)?;
        (scaled >> shift == self.num).then_some(scaled)
    }

    fn common(self, other: Self) -> (u128, u128, u32) {
        let den = self.log2_den.max(other.log2_den);
        let a = self.numerator_over(den).expect("dyadic overflow");
        let b = other.numerator_over(den).expect("dyadic overflow");
        (a, b, den)
    }
}

impl Add for Dyadic {
    type Output = Dyadic;

    fn add(self, other: Dyadic) -> Dyadic {
        let (a, b, den) = self.common(other);
        Dyadic::new(a.checked_add(b).expect("dyadic overflow"), den)
    }
}

impl std::iter::Sum for Dyadic {
    fn sum<I: Iterator<Item = Dyadic>>(iter: I) -> Dyadic {
        iter.fold(Dyadic::ZERO, Add::add)
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b, _) = self.common(*other);
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.log2_den == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/2^{}", self.num, self.log2_den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lowest_terms() {
        assert_eq!(Dyadic::new(4, 4), Dyadic::new(1, 2));
        assert_eq!(Dyadic::new(6, 1), Dyadic::new(3, 0));
        assert_eq!(Dyadic::new(0, 9), Dyadic::ZERO);
        assert_eq!(Dyadic::new(1, 2).to_string(), "1/2^2");
    }

    #[test]
    fn arithmetic() {
        let quarter = Dyadic::pow2_neg(2);
        assert_eq!(quarter + quarter, Dyadic::pow2_neg(1));
        assert_eq!(quarter + quarter + quarter + quarter, Dyadic::ONE);
        assert!(Dyadic::new(3, 3) < Dyadic::pow2_neg(1));
        assert_eq!(Dyadic::new(3, 3).numerator_over(5), Some(12));
        assert_eq!(Dyadic::new(3, 3).numerator_over(2), None);
        assert_eq!(Dyadic::new(5, 3).to_f64(), 0.625);
    }
}
