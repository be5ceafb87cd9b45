//! Rational polynomials with exact root location.
//!
//! The one tool the operator layer needs from this module is an exact count of
//! polynomial zeros relative to the unit circle: band operators are Fredholm
//! precisely when their symbol has no zeros on the circle, and the Fredholm
//! index is read off from the number of zeros strictly inside the disk.
//!
//! The count is computed without any floating point:
//!
//! 1. the Möbius substitution `z = (1+w)/(1-w)` carries the open unit disk to
//!    the open left half-plane and the circle to the imaginary axis (with
//!    `z = -1` going to infinity, detected separately via `f(-1)`);
//! 2. writing `i^{-n} F(i*w) = P(w) + i*Q(w)` with real `P`, `Q` and
//!    `deg P = n`, zeros of `F` on the imaginary axis are exactly the common
//!    real zeros of `P` and `Q`, found through a Sturm chain of `gcd(P, Q)`;
//! 3. in their absence, the number of zeros of `F` in the left half-plane is
//!    `(n - I)/2`, where `I` is the Cauchy index of `Q/P` over the whole real
//!    line, evaluated exactly with a signed remainder sequence.
//!
//! Step 3 is the classical Routh–Hurwitz count in Cauchy-index form; the unit
//! tests pin it against polynomials assembled from factors with known root
//! locations.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::scalar::Scalar;

/// Dense univariate polynomial over Q, coefficients in ascending degree,
/// trimmed so the leading coefficient is nonzero (zero polynomial = empty).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<Scalar>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Scalar>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: Scalar) -> Self {
        Poly::new(vec![c])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; 0 for constants and for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn leading(&self) -> Option<&Scalar> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        let mut acc = Scalar::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * crate::scalar::qi(k as i64))
                .collect(),
        )
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new(
            (0..n)
                .map(|k| {
                    let a = self.coeffs.get(k).cloned().unwrap_or_else(Scalar::zero);
                    let b = other.coeffs.get(k).cloned().unwrap_or_else(Scalar::zero);
                    a + b
                })
                .collect(),
        )
    }

    pub fn neg(&self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Scalar::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn scale(&self, c: &Scalar) -> Poly {
        Poly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Exact euclidean remainder of `self` by `div` (over Q).
    pub fn rem(&self, div: &Poly) -> Poly {
        assert!(!div.is_zero(), "division by zero polynomial");
        let dd = div.degree();
        if dd == 0 {
            return Poly::zero();
        }
        let dlead = div.leading().unwrap().clone();
        let mut r = self.clone();
        while !r.is_zero() && r.degree() >= dd {
            let shift = r.degree() - dd;
            let factor = r.leading().unwrap() / &dlead;
            let mut sub = vec![Scalar::zero(); shift];
            sub.extend(div.coeffs.iter().map(|c| c * &factor));
            r = r.sub(&Poly::new(sub));
        }
        r
    }

    /// Monic gcd over Q.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        match a.leading() {
            Some(lead) if !lead.is_one() => {
                let inv = Scalar::one() / lead;
                a.scale(&inv)
            }
            _ => a,
        }
    }

    /// Divides by the absolute value of the leading coefficient. Positive
    /// rescaling keeps every sign-variation computation intact while holding
    /// coefficient growth down along remainder sequences.
    fn normalized_signs(&self) -> Poly {
        match self.leading() {
            None => Poly::zero(),
            Some(lead) => {
                let inv = Scalar::one() / lead.abs();
                self.scale(&inv)
            }
        }
    }

    fn sign_at_pos_inf(&self) -> i8 {
        match self.leading() {
            None => 0,
            Some(c) => {
                if c.is_positive() {
                    1
                } else {
                    -1
                }
            }
        }
    }

    fn sign_at_neg_inf(&self) -> i8 {
        let s = self.sign_at_pos_inf();
        if self.degree() % 2 == 1 {
            -s
        } else {
            s
        }
    }
}

fn variations(signs: impl Iterator<Item = i8>) -> usize {
    let mut prev = 0i8;
    let mut count = 0;
    for s in signs {
        if s == 0 {
            continue;
        }
        if prev != 0 && s != prev {
            count += 1;
        }
        prev = s;
    }
    count
}

/// Signed remainder sequence `f0 = p, f1 = q, f_{k+1} = -rem(f_{k-1}, f_k)`.
fn signed_remainder_chain(p: &Poly, q: &Poly) -> Vec<Poly> {
    let mut chain = Vec::new();
    chain.push(p.normalized_signs());
    if q.is_zero() {
        return chain;
    }
    chain.push(q.normalized_signs());
    loop {
        let n = chain.len();
        let r = chain[n - 2].rem(&chain[n - 1]).neg();
        if r.is_zero() {
            break;
        }
        chain.push(r.normalized_signs());
    }
    chain
}

/// Cauchy index of `q/p` over the whole real line: the number of points where
/// `q/p` jumps from -inf to +inf minus those where it jumps from +inf to
/// -inf. Computed as the sign-variation difference of the signed remainder
/// sequence between the two ends of the line.
pub fn cauchy_index_line(p: &Poly, q: &Poly) -> i64 {
    if p.is_zero() || q.is_zero() {
        return 0;
    }
    let chain = signed_remainder_chain(p, q);
    let v_neg = variations(chain.iter().map(|f| f.sign_at_neg_inf()));
    let v_pos = variations(chain.iter().map(|f| f.sign_at_pos_inf()));
    v_neg as i64 - v_pos as i64
}

/// Number of distinct real roots (Sturm's theorem over the whole line).
pub fn count_real_roots(f: &Poly) -> usize {
    if f.is_zero() || f.degree() == 0 {
        return 0;
    }
    let square_free = {
        let g = f.gcd(&f.derivative());
        if g.degree() == 0 {
            f.clone()
        } else {
            // divide out repeated factors: f / gcd(f, f')
            div_exact(f, &g)
        }
    };
    let chain = signed_remainder_chain(&square_free, &square_free.derivative());
    let v_neg = variations(chain.iter().map(|p| p.sign_at_neg_inf()));
    let v_pos = variations(chain.iter().map(|p| p.sign_at_pos_inf()));
    v_neg - v_pos
}

/// Exact quotient for a known-divisible pair.
fn div_exact(f: &Poly, g: &Poly) -> Poly {
    let glead = g.leading().expect("nonzero divisor").clone();
    let gd = g.degree();
    if gd == 0 {
        let inv = Scalar::one() / &glead;
        return f.scale(&inv);
    }
    let mut r = f.clone();
    let mut q = vec![Scalar::zero(); f.degree().saturating_sub(gd) + 1];
    while !r.is_zero() && r.degree() >= gd {
        let shift = r.degree() - gd;
        let factor = r.leading().unwrap() / &glead;
        q[shift] = factor.clone();
        let mut sub = vec![Scalar::zero(); shift];
        sub.extend(g.coeffs.iter().map(|c| c * &factor));
        r = r.sub(&Poly::new(sub));
    }
    debug_assert!(r.is_zero(), "div_exact on a non-divisible pair");
    Poly::new(q)
}

/// Location of the zeros of a polynomial relative to the unit circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiskCount {
    /// At least one zero lies on the unit circle.
    OnCircle,
    /// No zeros on the circle; `inside` zeros strictly inside the open disk,
    /// counted with multiplicity.
    Off { inside: usize },
}

/// Counts the zeros of `f` (with `f(0) != 0`) relative to the unit circle.
pub fn unit_disk_roots(f: &Poly) -> DiskCount {
    assert!(!f.is_zero(), "zero polynomial has no root locus");
    assert!(
        !f.coeffs[0].is_zero(),
        "factor out powers of z before counting"
    );
    let n = f.degree();
    if n == 0 {
        return DiskCount::Off { inside: 0 };
    }
    let one = Scalar::one();
    let minus_one = -Scalar::one();
    if f.eval(&one).is_zero() || f.eval(&minus_one).is_zero() {
        return DiskCount::OnCircle;
    }

    // F(w) = (1-w)^n * f((1+w)/(1-w)); deg F = n exactly since f(-1) != 0.
    let f_half_plane = mobius_to_half_plane(f);
    debug_assert_eq!(f_half_plane.degree(), n);

    // i^{-n} F(i w) = P(w) + i Q(w): split by (j - n) mod 4.
    let mut p_coeffs = vec![Scalar::zero(); n + 1];
    let mut q_coeffs = vec![Scalar::zero(); n + 1];
    for (j, b) in f_half_plane.coeffs.iter().enumerate() {
        match (j + 4 * n - n) % 4 {
            0 => p_coeffs[j] = b.clone(),
            1 => q_coeffs[j] = b.clone(),
            2 => p_coeffs[j] = -b.clone(),
            _ => q_coeffs[j] = -b.clone(),
        }
    }
    let p = Poly::new(p_coeffs);
    let q = Poly::new(q_coeffs);
    debug_assert_eq!(p.degree(), n);

    // Common real zeros of P and Q are zeros of f on the circle.
    let g = p.gcd(&q);
    if g.degree() >= 1 && count_real_roots(&g) > 0 {
        return DiskCount::OnCircle;
    }

    let index = cauchy_index_line(&p, &q);
    let twice_inside = n as i64 - index;
    debug_assert!(twice_inside >= 0 && twice_inside % 2 == 0);
    DiskCount::Off {
        inside: (twice_inside / 2) as usize,
    }
}

/// `(1-w)^n f((1+w)/(1-w))` for `n = deg f`.
fn mobius_to_half_plane(f: &Poly) -> Poly {
    let n = f.degree();
    let one_plus = Poly::new(vec![Scalar::one(), Scalar::one()]);
    let one_minus = Poly::new(vec![Scalar::one(), -Scalar::one()]);
    // powers of (1+w) and (1-w) up to n
    let mut plus_pows = Vec::with_capacity(n + 1);
    let mut minus_pows = Vec::with_capacity(n + 1);
    plus_pows.push(Poly::constant(Scalar::one()));
    minus_pows.push(Poly::constant(Scalar::one()));
    for k in 1..=n {
        plus_pows.push(plus_pows[k - 1].mul(&one_plus));
        minus_pows.push(minus_pows[k - 1].mul(&one_minus));
    }
    let mut acc = Poly::zero();
    for (k, a) in f.coeffs.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        acc = acc.add(&plus_pows[k].mul(&minus_pows[n - k]).scale(a));
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, qi};

    fn poly(cs: &[i64]) -> Poly {
        Poly::new(cs.iter().map(|&c| qi(c)).collect())
    }

    fn poly_q(cs: &[(i64, i64)]) -> Poly {
        Poly::new(cs.iter().map(|&(n, d)| q(n, d)).collect())
    }

    #[test]
    fn remainder_and_gcd() {
        // (z^2 - 1) mod (z - 1) = 0
        let a = poly(&[-1, 0, 1]);
        let b = poly(&[-1, 1]);
        assert!(a.rem(&b).is_zero());
        assert_eq!(a.gcd(&b), b.normalized_signs());
        // coprime pair
        let c = poly(&[1, 1]);
        let d = poly(&[2, 1]);
        assert_eq!(c.gcd(&d).degree(), 0);
    }

    #[test]
    fn sturm_counts_real_roots() {
        // (z-1)(z+2)(z-1/3): three real roots
        let f = poly(&[-1, 1]).mul(&poly(&[2, 1])).mul(&poly_q(&[(-1, 3), (1, 1)]));
        assert_eq!(count_real_roots(&f), 3);
        // z^2 + 1: none
        assert_eq!(count_real_roots(&poly(&[1, 0, 1])), 0);
        // repeated root counted once: (z-1)^2
        assert_eq!(count_real_roots(&poly(&[1, -2, 1])), 1);
    }

    #[test]
    fn cauchy_index_matches_sturm_special_case() {
        // Ind(f'/f) over the line = number of distinct real roots.
        let f = poly(&[-2, 1]).mul(&poly(&[3, 1])).mul(&poly(&[0, 1]));
        assert_eq!(cauchy_index_line(&f, &f.derivative()), 3);
    }

    // Independent oracle: build polynomials as products of factors with known
    // root locations and compare against the computed disk count.

    fn linear(root_n: i64, root_d: i64) -> (Poly, usize, bool) {
        // z - r
        let r = q(root_n, root_d);
        let inside = r.abs() < qi(1);
        let on = r.abs() == qi(1);
        (Poly::new(vec![-r, qi(1)]), usize::from(inside), on)
    }

    fn conj_pair(modulus: (i64, i64), cos_num: (i64, i64)) -> (Poly, usize, bool) {
        // z^2 - 2 r cos(t) z + r^2, roots r e^{+-it}
        let r = q(modulus.0, modulus.1);
        let c = q(cos_num.0, cos_num.1);
        let f = Poly::new(vec![&r * &r, qi(-2) * &r * &c, qi(1)]);
        let inside = r.abs() < qi(1);
        let on = r.abs() == qi(1);
        (f, if inside { 2 } else { 0 }, on)
    }

    #[test]
    fn disk_count_on_constructed_products() {
        let factors: Vec<(Poly, usize, bool)> = alloc::vec![
            linear(1, 2),
            linear(-1, 3),
            linear(3, 1),
            linear(-5, 2),
            linear(1, 1), // on circle
            conj_pair((1, 2), (1, 3)),
            conj_pair((3, 2), (-2, 5)),
            conj_pair((1, 1), (1, 7)), // on circle
            conj_pair((2, 3), (0, 1)),
        ];
        // all subsets of size <= 3 of off-circle factors, plus spot checks with
        // circle factors included
        let off: Vec<&(Poly, usize, bool)> = factors.iter().filter(|t| !t.2).collect();
        for i in 0..off.len() {
            for j in i..off.len() {
                let f = off[i].0.mul(&off[j].0);
                let expect = off[i].1 + off[j].1;
                assert_eq!(
                    unit_disk_roots(&f),
                    DiskCount::Off { inside: expect },
                    "factors {i},{j}"
                );
                for k in j..off.len() {
                    let g = f.mul(&off[k].0);
                    let expect = expect + off[k].1;
                    assert_eq!(
                        unit_disk_roots(&g),
                        DiskCount::Off { inside: expect },
                        "factors {i},{j},{k}"
                    );
                }
            }
        }
        for t in factors.iter().filter(|t| t.2) {
            let f = t.0.mul(&off[0].0);
            assert_eq!(unit_disk_roots(&f), DiskCount::OnCircle);
        }
    }

    #[test]
    fn disk_count_handles_multiplicities_and_reciprocal_pairs() {
        // (z - 1/2)^3: 3 inside
        let f = poly_q(&[(-1, 2), (1, 1)]);
        let f3 = f.mul(&f).mul(&f);
        assert_eq!(unit_disk_roots(&f3), DiskCount::Off { inside: 3 });

        // reciprocal pair (z - 2)(z - 1/2) = z^2 - 5/2 z + 1: palindromic but
        // no circle zeros — exactly the case naive Schur-Cohn transforms die on
        let g = poly(&[-2, 1]).mul(&poly_q(&[(-1, 2), (1, 1)]));
        assert_eq!(unit_disk_roots(&g), DiskCount::Off { inside: 1 });

        // z^2 + 1: roots +-i on the circle
        assert_eq!(unit_disk_roots(&poly(&[1, 0, 1])), DiskCount::OnCircle);

        // constant
        assert_eq!(unit_disk_roots(&poly(&[7])), DiskCount::Off { inside: 0 });
    }
}
