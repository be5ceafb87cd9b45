//! Direct-sum shapes: ordered lists of sequence-space copies and
//! finite-dimensional factors.

use alloc::string::String;
use alloc::vec::Vec;

/// One summand of a direct sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Factor {
    /// A copy of the one-sided sequence space.
    Seq,
    /// A finite-dimensional space of the given dimension.
    Fin(usize),
}

/// Ordered direct sum of factors. The empty shape is the zero space and is
/// permitted (it shows up as a trivial complement).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct SpaceShape {
    factors: Vec<Factor>,
}

impl SpaceShape {
    pub fn new(factors: Vec<Factor>) -> Self {
        SpaceShape { factors }
    }

    pub fn empty() -> Self {
        SpaceShape {
            factors: Vec::new(),
        }
    }

    pub fn seq() -> Self {
        SpaceShape {
            factors: alloc::vec![Factor::Seq],
        }
    }

    pub fn fin(n: usize) -> Self {
        SpaceShape {
            factors: alloc::vec![Factor::Fin(n)],
        }
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn seq_count(&self) -> usize {
        self.factors
            .iter()
            .filter(|f| matches!(f, Factor::Seq))
            .count()
    }

    pub fn is_all_fin(&self) -> bool {
        self.seq_count() == 0
    }

    /// Total dimension of the finite factors.
    pub fn fin_dim(&self) -> usize {
        self.factors
            .iter()
            .map(|f| match f {
                Factor::Seq => 0,
                Factor::Fin(n) => *n,
            })
            .sum()
    }

    /// Indices of the sequence factors, in order.
    pub fn seq_positions(&self) -> Vec<usize> {
        self.factors
            .iter()
            .enumerate()
            .filter_map(|(i, f)| matches!(f, Factor::Seq).then_some(i))
            .collect()
    }

    /// Concatenation `self (+) other`.
    pub fn concat(&self, other: &SpaceShape) -> SpaceShape {
        let mut factors = self.factors.clone();
        factors.extend_from_slice(&other.factors);
        SpaceShape { factors }
    }

    /// True when `prefix` is an initial segment of this shape's factor list.
    pub fn starts_with(&self, prefix: &SpaceShape) -> bool {
        self.factors.len() >= prefix.factors.len()
            && self.factors[..prefix.factors.len()] == prefix.factors[..]
    }

    pub fn describe(&self) -> String {
        if self.factors.is_empty() {
            return String::from("0");
        }
        let mut out = String::new();
        for (i, f) in self.factors.iter().enumerate() {
            if i > 0 {
                out.push_str(" (+) ");
            }
            match f {
                Factor::Seq => out.push_str("Seq"),
                Factor::Fin(n) => out.push_str(&alloc::format!("Fin({n})")),
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_basics() {
        let x = SpaceShape::new(alloc::vec![Factor::Seq, Factor::Fin(3)]);
        assert_eq!(x.seq_count(), 1);
        assert_eq!(x.fin_dim(), 3);
        assert_eq!(x.seq_positions(), alloc::vec![0]);
        assert!(x.starts_with(&SpaceShape::seq()));
        assert!(!x.starts_with(&SpaceShape::fin(3)));
        assert_eq!(
            SpaceShape::seq().concat(&SpaceShape::fin(2)).describe(),
            "Seq (+) Fin(2)"
        );
        assert_eq!(SpaceShape::empty().describe(), "0");
    }
}
