//! Ideals of the integers, by nonnegative generator.

use num_integer::Integer;

/// The ideal `gZ`; `0` encodes `{0}` and `1` encodes all of `Z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IdealZ(u64);

impl IdealZ {
    pub fn new(generator: u64) -> Self {
        IdealZ(generator)
    }

    /// `{0}`.
    pub fn trivial() -> Self {
        IdealZ(0)
    }

    /// All of `Z`.
    pub fn full() -> Self {
        IdealZ(1)
    }

    pub fn generator(&self) -> u64 {
        self.0
    }

    /// `aZ` intersect `bZ` = `lcm(a,b) Z`; `{0}` absorbs.
    pub fn intersect(&self, other: &IdealZ) -> IdealZ {
        if self.0 == 0 || other.0 == 0 {
            IdealZ(0)
        } else {
            IdealZ(self.0.lcm(&other.0))
        }
    }

    /// `aZ + bZ = gcd(a,b) Z`; `{0}` is neutral.
    pub fn sum(&self, other: &IdealZ) -> IdealZ {
        IdealZ(self.0.gcd(&other.0))
    }

    pub fn contains(&self, k: i64) -> bool {
        if self.0 == 0 {
            k == 0
        } else {
            k.rem_euclid(self.0 as i64) == 0
        }
    }

    /// `aZ` is a subset of `bZ` iff `b` divides `a` (with `{0}` least).
    pub fn is_subset(&self, other: &IdealZ) -> bool {
        if self.0 == 0 {
            true
        } else if other.0 == 0 {
            false
        } else {
            self.0 % other.0 == 0
        }
    }
}

impl core::fmt::Display for IdealZ {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self.0 {
            0 => write!(f, "{{0}}"),
            1 => write!(f, "Z"),
            g => write!(f, "{g}Z"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_operations() {
        let four = IdealZ::new(4);
        let six = IdealZ::new(6);
        assert_eq!(four.intersect(&six), IdealZ::new(12));
        assert_eq!(four.sum(&six), IdealZ::new(2));
        assert_eq!(IdealZ::trivial().intersect(&IdealZ::new(5)), IdealZ::trivial());
        assert_eq!(IdealZ::trivial().sum(&IdealZ::new(5)), IdealZ::new(5));
        assert!(IdealZ::new(12).is_subset(&four));
        assert!(!four.is_subset(&IdealZ::new(12)));
        assert!(IdealZ::trivial().is_subset(&four));
        assert!(four.contains(-8));
        assert!(!four.contains(6));
        assert!(IdealZ::trivial().contains(0));
    }
}
