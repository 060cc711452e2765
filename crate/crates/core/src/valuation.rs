use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use num_rational::Ratio;
use num_traits::Zero;
use serde::{Serialize, Serializer};

/// Additive valuation normalized by `v(p) = 1`, with a top element for
/// values indistinguishable from zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PValuation {
    Finite(Ratio<i64>),
    Infinite,
}

impl PValuation {
    pub fn integer(v: i64) -> Self {
        PValuation::Finite(Ratio::from_integer(v))
    }

    /// Converts a valuation counted in powers of a uniformizer of a field with
    /// ramification index `e`.
    pub fn from_pi_units(v: i64, e: usize) -> Self {
        PValuation::Finite(Ratio::new(v, e as i64))
    }

    pub fn new(num: i64, den: i64) -> Self {
        PValuation::Finite(Ratio::new(num, den))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, PValuation::Infinite)
    }

    pub fn finite(&self) -> Option<Ratio<i64>> {
        match self {
            PValuation::Finite(r) => Some(*r),
            PValuation::Infinite => None,
        }
    }

    pub fn numerator(&self) -> Option<i64> {
        self.finite().map(|r| *r.numer())
    }

    pub fn denominator(&self) -> Option<i64> {
        self.finite().map(|r| *r.denom())
    }

    /// Value in uniformizer units for ramification index `e`, rounded down.
    pub fn floor_pi_units(&self, e: usize) -> Option<i64> {
        self.finite()
            .map(|r| (r * Ratio::from_integer(e as i64)).floor().to_integer())
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            PValuation::Finite(r) => *r.numer() as f64 / *r.denom() as f64,
            PValuation::Infinite => f64::INFINITY,
        }
    }
}

impl Ord for PValuation {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (PValuation::Infinite, PValuation::Infinite) => Ordering::Equal,
            (PValuation::Infinite, _) => Ordering::Greater,
            (_, PValuation::Infinite) => Ordering::Less,
            (PValuation::Finite(a), PValuation::Finite(b)) => a.cmp(b),
        }
    }
}

impl PartialOrd for PValuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for PValuation {
    type Output = PValuation;
    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (PValuation::Finite(a), PValuation::Finite(b)) => PValuation::Finite(a + b),
            _ => PValuation::Infinite,
        }
    }
}

impl fmt::Display for PValuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PValuation::Infinite => write!(f, "inf"),
            PValuation::Finite(r) if r.denom() == &1 || r.is_zero() => write!(f, "{}", r.numer()),
            PValuation::Finite(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

impl Serialize for PValuation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_puts_infinite_on_top() {
        let a = PValuation::new(1, 2);
        let b = PValuation::integer(1);
        assert!(a < b);
        assert!(b < PValuation::Infinite);
        assert_eq!(a + a, b);
        assert_eq!(PValuation::from_pi_units(2, 4), a);
    }

    #[test]
    fn display_forms() {
        assert_eq!(PValuation::new(3, 2).to_string(), "3/2");
        assert_eq!(PValuation::integer(-2).to_string(), "-2");
        assert_eq!(PValuation::Infinite.to_string(), "inf");
    }
}
