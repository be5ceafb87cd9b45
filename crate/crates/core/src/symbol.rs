//! Banded Laurent symbols.
//!
//! A symbol `a(z) = sum a_j z^j` over a finite offset window `[lo, hi]`
//! determines the Toeplitz part of a sequence-space operator through the
//! matrix rule `T_{ij} = a_{i-j}`. Offset `d > 0` contributes the `d`-th
//! forward-shift diagonal, `d < 0` the backward one.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::poly::Poly;
use crate::scalar::Scalar;

/// Finitely supported Laurent-polynomial symbol; zero coefficients are never
/// stored, so equality is structural.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LaurentSymbol {
    coeffs: BTreeMap<i64, Scalar>,
}

impl LaurentSymbol {
    pub fn zero() -> Self {
        LaurentSymbol::default()
    }

    pub fn one() -> Self {
        LaurentSymbol::monomial(0, crate::scalar::one())
    }

    /// The symbol `c * z^d`.
    pub fn monomial(d: i64, c: Scalar) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(d, c);
        }
        LaurentSymbol { coeffs }
    }

    pub fn from_coeffs(items: impl IntoIterator<Item = (i64, Scalar)>) -> Self {
        let mut s = LaurentSymbol::zero();
        for (d, c) in items {
            s.add_coeff(d, c);
        }
        s
    }

    fn add_coeff(&mut self, d: i64, c: Scalar) {
        if c.is_zero() {
            return;
        }
        use alloc::collections::btree_map::Entry;
        match self.coeffs.entry(d) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Lowest offset with a nonzero coefficient.
    pub fn lo(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    /// Highest offset with a nonzero coefficient.
    pub fn hi(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn coeff(&self, d: i64) -> Scalar {
        self.coeffs.get(&d).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &Scalar)> {
        self.coeffs.iter().map(|(d, c)| (*d, c))
    }

    /// `Some((d, c))` when the symbol is exactly `c * z^d` with `c != 0`.
    pub fn as_monomial(&self) -> Option<(i64, &Scalar)> {
        if self.coeffs.len() == 1 {
            self.coeffs.iter().next().map(|(d, c)| (*d, c))
        } else {
            None
        }
    }

    pub fn add(&self, other: &LaurentSymbol) -> LaurentSymbol {
        let mut out = self.clone();
        for (d, c) in &other.coeffs {
            out.add_coeff(*d, c.clone());
        }
        out
    }

    pub fn neg(&self) -> LaurentSymbol {
        LaurentSymbol {
            coeffs: self.coeffs.iter().map(|(d, c)| (*d, -c)).collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> LaurentSymbol {
        if c.is_zero() {
            return LaurentSymbol::zero();
        }
        LaurentSymbol {
            coeffs: self.coeffs.iter().map(|(d, a)| (*d, a * c)).collect(),
        }
    }

    /// Laurent product.
    pub fn mul(&self, other: &LaurentSymbol) -> LaurentSymbol {
        let mut out = LaurentSymbol::zero();
        for (d1, c1) in &self.coeffs {
            for (d2, c2) in &other.coeffs {
                out.add_coeff(d1 + d2, c1 * c2);
            }
        }
        out
    }

    /// Numerator polynomial: `(lo, f)` with `a(z) = z^lo * f(z)`, `f(0) != 0`.
    /// `None` for the zero symbol.
    pub fn numerator(&self) -> Option<(i64, Poly)> {
        let lo = self.lo()?;
        let hi = self.hi().unwrap();
        let mut coeffs = Vec::with_capacity((hi - lo + 1) as usize);
        for d in lo..=hi {
            coeffs.push(self.coeff(d));
        }
        Some((lo, Poly::new(coeffs)))
    }
}
