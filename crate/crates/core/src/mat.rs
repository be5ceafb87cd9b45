//! Exact dense linear algebra over Q.
//!
//! Gaussian elimination with the lowest-index pivot convention: scanning a
//! column, the first usable row wins, and free columns keep their natural
//! order. This makes every derived object (ranks, kernels, complements,
//! particular solutions) deterministic, which the operator constructions
//! rely on for reproducibility.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::scalar::Scalar;

/// Column vector over Q.
pub type QVec = Vec<Scalar>;

/// Dense row-major rational matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    entries: Vec<Scalar>,
}

impl core::fmt::Debug for Mat {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        writeln!(f, "Mat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                write!(f, "{} ", self.at(i, j))?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Mat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            entries: vec![Scalar::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zero(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = Scalar::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<QVec>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Mat {
            rows: r,
            cols: c,
            entries: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Mat {
            rows,
            cols,
            entries,
        }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_cols(ambient: usize, cols: &[QVec]) -> Self {
        Mat::from_fn(ambient, cols.len(), |i, j| cols[j][i].clone())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, i: usize, j: usize) -> &Scalar {
        &self.entries[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut Scalar {
        &mut self.entries[i * self.cols + j]
    }

    pub fn col(&self, j: usize) -> QVec {
        (0..self.rows).map(|i| self.at(i, j).clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|x| x.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    if i == j {
                        self.at(i, j).is_one()
                    } else {
                        self.at(i, j).is_zero()
                    }
                })
            })
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(self.cols, self.rows, |i, j| self.at(j, i).clone())
    }

    pub fn add(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat::from_fn(self.rows, self.cols, |i, j| self.at(i, j) + other.at(i, j))
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat::from_fn(self.rows, self.cols, |i, j| self.at(i, j) - other.at(i, j))
    }

    pub fn scale(&self, c: &Scalar) -> Mat {
        Mat::from_fn(self.rows, self.cols, |i, j| self.at(i, j) * c)
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "shape mismatch in mul");
        Mat::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = Scalar::zero();
            for l in 0..self.cols {
                if !self.at(i, l).is_zero() && !other.at(l, j).is_zero() {
                    acc += self.at(i, l) * other.at(l, j);
                }
            }
            acc
        })
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> QVec {
        assert_eq!(self.cols, v.len(), "shape mismatch in mul_vec");
        (0..self.rows)
            .map(|i| {
                let mut acc = Scalar::zero();
                for j in 0..self.cols {
                    if !self.at(i, j).is_zero() && !v[j].is_zero() {
                        acc += self.at(i, j) * &v[j];
                    }
                }
                acc
            })
            .collect()
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hcat(&self, other: &Mat) -> Mat {
        assert_eq!(self.rows, other.rows);
        Mat::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self.at(i, j).clone()
            } else {
                other.at(i, j - self.cols).clone()
            }
        })
    }

    /// Reduced row echelon form; returns the pivot columns in order.
    /// Pivot selection is always the first (lowest-index) nonzero row.
    pub fn rref(&self) -> (Mat, Vec<usize>) {
        let mut a = self.clone();
        let mut pivots = Vec::new();
        let mut pr = 0usize;
        for col in 0..a.cols {
            if pr >= a.rows {
                break;
            }
            let Some(sel) = (pr..a.rows).find(|&r| !a.at(r, col).is_zero()) else {
                continue;
            };
            if sel != pr {
                for j in 0..a.cols {
                    let tmp = a.at(sel, j).clone();
                    *a.at_mut(sel, j) = a.at(pr, j).clone();
                    *a.at_mut(pr, j) = tmp;
                }
            }
            let inv = {
                let p = a.at(pr, col).clone();
                Scalar::one() / p
            };
            for j in col..a.cols {
                let v = a.at(pr, j) * &inv;
                *a.at_mut(pr, j) = v;
            }
            for r in 0..a.rows {
                if r != pr && !a.at(r, col).is_zero() {
                    let f = a.at(r, col).clone();
                    for j in col..a.cols {
                        let v = a.at(r, j) - &(a.at(pr, j) * &f);
                        *a.at_mut(r, j) = v;
                    }
                }
            }
            pivots.push(col);
            pr += 1;
        }
        (a, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of `{x : self * x = 0}`, one vector per free column in
    /// ascending column order; the free coordinate is set to 1.
    pub fn null_space(&self) -> Vec<QVec> {
        let (r, pivots) = self.rref();
        let pivot_of_col: Vec<Option<usize>> = {
            let mut v = vec![None; self.cols];
            for (row, &col) in pivots.iter().enumerate() {
                v[col] = Some(row);
            }
            v
        };
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_of_col[free].is_some() {
                continue;
            }
            let mut x = vec![Scalar::zero(); self.cols];
            x[free] = Scalar::one();
            for (row, &col) in pivots.iter().enumerate() {
                x[col] = -r.at(row, free).clone();
            }
            basis.push(x);
        }
        basis
    }

    /// Any exact solution of `self * x = b`, or `None` when `b` is not in the
    /// column space. Free variables are set to 0 (first-pivot convention).
    pub fn solve(&self, b: &[Scalar]) -> Option<QVec> {
        assert_eq!(self.rows, b.len(), "shape mismatch in solve");
        let aug = self.hcat(&Mat::from_cols(self.rows, &[b.to_vec()]));
        let (r, pivots) = aug.rref();
        if pivots.contains(&self.cols) {
            return None; // pivot in the rhs column: inconsistent
        }
        let mut x = vec![Scalar::zero(); self.cols];
        for (row, &col) in pivots.iter().enumerate() {
            x[col] = r.at(row, self.cols).clone();
        }
        Some(x)
    }

    /// Solves `self * X = rhs` column by column; `None` if any column fails.
    pub fn solve_mat(&self, rhs: &Mat) -> Option<Mat> {
        assert_eq!(self.rows, rhs.rows);
        let mut cols = Vec::with_capacity(rhs.cols);
        for j in 0..rhs.cols {
            cols.push(self.solve(&rhs.col(j))?);
        }
        Some(Mat::from_cols(self.cols, &cols))
    }

    /// Exact inverse, or `None` when singular.
    pub fn inverse(&self) -> Option<Mat> {
        if self.rows != self.cols {
            return None;
        }
        let inv = self.solve_mat(&Mat::identity(self.rows))?;
        if self.mul(&inv).is_identity() {
            Some(inv)
        } else {
            None
        }
    }

    /// Indices of a maximal independent subset of the columns, chosen greedily
    /// from the left.
    pub fn independent_cols(&self) -> Vec<usize> {
        self.rref().1
    }
}

/// Extends `subspace` (independent vectors of length `ambient_dim`) to a basis
/// of the ambient space by greedily adjoining standard basis vectors with the
/// smallest usable index. Returns only the adjoined vectors.
///
/// Fails with `DependentInput` when the given vectors are not independent.
pub fn complement_basis(subspace: &[QVec], ambient_dim: usize) -> Result<Vec<QVec>, DependentInput> {
    for v in subspace {
        assert_eq!(v.len(), ambient_dim, "vector length != ambient dimension");
    }
    let k = subspace.len();
    let mut m = Mat::from_cols(ambient_dim, subspace);
    if m.rank() != k {
        return Err(DependentInput);
    }
    let mut chosen = Vec::new();
    for i in 0..ambient_dim {
        if m.cols() == ambient_dim {
            break;
        }
        let mut e = vec![Scalar::zero(); ambient_dim];
        e[i] = Scalar::one();
        let cand = m.hcat(&Mat::from_cols(ambient_dim, &[e.clone()]));
        if cand.rank() == m.cols() + 1 {
            m = cand;
            chosen.push(e);
        }
    }
    debug_assert_eq!(m.cols(), ambient_dim);
    Ok(chosen)
}

/// Input vectors passed to [`complement_basis`] were linearly dependent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DependentInput;

impl core::fmt::Display for DependentInput {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "input vectors are linearly dependent")
    }
}

impl core::error::Error for DependentInput {}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, qi};

    fn m(rows: &[&[i64]]) -> Mat {
        Mat::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| qi(x)).collect())
                .collect(),
        )
    }

    #[test]
    fn rank_examples() {
        assert_eq!(Mat::identity(2).rank(), 2);
        assert_eq!(Mat::zero(3, 4).rank(), 0);
        assert_eq!(m(&[&[1, 2], &[2, 4]]).rank(), 1);
    }

    #[test]
    fn null_space_examples() {
        assert!(Mat::identity(3).null_space().is_empty());

        let ns = m(&[&[1, 1]]).null_space();
        assert_eq!(ns.len(), 1);
        // forced up to scale: (1, -1) direction
        assert_eq!(&ns[0][0] * qi(-1), ns[0][1]);

        let a = m(&[&[1, 2], &[2, 4]]);
        let ns = a.null_space();
        assert_eq!(ns.len(), 1);
        assert!(a.mul_vec(&ns[0]).iter().all(|x| x.is_zero()));
        // proportional to (2, -1)
        assert_eq!(&ns[0][0] * qi(-1), &ns[0][1] * qi(2));
    }

    #[test]
    fn solve_examples() {
        let b = [qi(3), qi(5)];
        assert_eq!(Mat::identity(2).solve(&b).unwrap(), vec![qi(3), qi(5)]);

        // first-pivot convention: free variable pinned to 0
        assert_eq!(m(&[&[1, 1]]).solve(&[qi(2)]).unwrap(), vec![qi(2), qi(0)]);

        assert!(m(&[&[1], &[1]]).solve(&[qi(1), qi(2)]).is_none());
    }

    #[test]
    fn solve_postcondition() {
        let a = m(&[&[2, 1, 0], &[0, 1, 1]]);
        let x = vec![q(1, 2), qi(3), qi(-7)];
        let b = a.mul_vec(&x);
        let sol = a.solve(&b).expect("consistent");
        assert_eq!(a.mul_vec(&sol), b);
    }

    #[test]
    fn complement_examples() {
        let got = complement_basis(&[], 2).unwrap();
        assert_eq!(got, vec![vec![qi(1), qi(0)], vec![qi(0), qi(1)]]);

        let got = complement_basis(&[vec![qi(1), qi(0), qi(0)]], 3).unwrap();
        assert_eq!(got, vec![vec![qi(0), qi(1), qi(0)], vec![qi(0), qi(0), qi(1)]]);

        let got = complement_basis(&[vec![qi(1), qi(1)]], 2).unwrap();
        assert_eq!(got, vec![vec![qi(1), qi(0)]]);

        assert_eq!(
            complement_basis(&[vec![qi(1), qi(2)], vec![qi(2), qi(4)]], 2),
            Err(DependentInput)
        );
    }

    #[test]
    fn inverse_round_trip() {
        let a = m(&[&[2, 1], &[1, 1]]);
        let inv = a.inverse().unwrap();
        assert!(a.mul(&inv).is_identity());
        assert!(inv.mul(&a).is_identity());
        assert!(m(&[&[1, 2], &[2, 4]]).inverse().is_none());
    }
}
