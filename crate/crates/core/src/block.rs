//! Block operators between direct sums of sequence and finite factors.
//!
//! A `BlockOp` is a grid of entries indexed by (codomain factor, domain
//! factor). Sequence-to-sequence cells are band-plus-finite-rank operators;
//! cells touching a finite factor are finitely supported maps; finite-to-
//! finite cells are dense rational matrices. The grid is closed under exact
//! addition, scaling and composition, which is all the coupling constructions
//! need.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::error::OpError;
use crate::mat::Mat;
use crate::scalar::Scalar;
use crate::seqop::{Correction, SeqOp};
use crate::shape::{Factor, SpaceShape};

/// Finitely supported rectangular map, 1-based `(row, col)` indices.
///
/// Used for the two mixed cells: sequence -> finite (row bound = dimension of
/// the finite factor) and finite -> sequence (column bound = dimension).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SparseMap {
    entries: BTreeMap<(usize, usize), Scalar>,
}

impl SparseMap {
    pub fn zero() -> Self {
        SparseMap::default()
    }

    pub fn from_entries(items: impl IntoIterator<Item = (usize, usize, Scalar)>) -> Self {
        let mut m = SparseMap::zero();
        for (i, j, v) in items {
            m.add_entry(i, j, v);
        }
        m
    }

    pub fn add_entry(&mut self, i: usize, j: usize, v: Scalar) {
        assert!(i >= 1 && j >= 1, "sparse map indices are 1-based");
        if v.is_zero() {
            return;
        }
        use alloc::collections::btree_map::Entry;
        match self.entries.entry((i, j)) {
            Entry::Vacant(e) => {
                e.insert(v);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += v;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &Scalar)> {
        self.entries.iter().map(|(&(i, j), v)| (i, j, v))
    }

    pub fn at(&self, i: usize, j: usize) -> Scalar {
        self.entries
            .get(&(i, j))
            .cloned()
            .unwrap_or_else(Scalar::zero)
    }

    pub fn max_row(&self) -> usize {
        self.entries.keys().map(|&(i, _)| i).max().unwrap_or(0)
    }

    pub fn max_col(&self) -> usize {
        self.entries.keys().map(|&(_, j)| j).max().unwrap_or(0)
    }

    pub fn add(&self, other: &SparseMap) -> SparseMap {
        let mut out = self.clone();
        for (i, j, v) in other.iter() {
            out.add_entry(i, j, v.clone());
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> SparseMap {
        if c.is_zero() {
            return SparseMap::zero();
        }
        SparseMap {
            entries: self.entries.iter().map(|(&k, v)| (k, v * c)).collect(),
        }
    }

    pub fn neg(&self) -> SparseMap {
        SparseMap {
            entries: self.entries.iter().map(|(&k, v)| (k, -v)).collect(),
        }
    }
}

/// One cell of the block grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Entry {
    /// Seq -> Seq.
    Seq(SeqOp),
    /// Fin(n) -> Fin(m): an `m x n` matrix.
    Fin(Mat),
    /// Seq -> Fin(m): finitely many columns act, rows bounded by `m`.
    SeqToFin(SparseMap),
    /// Fin(n) -> Seq: columns bounded by `n`, finitely many rows hit.
    FinToSeq(SparseMap),
}

impl Entry {
    fn zero_for(cod: &Factor, dom: &Factor) -> Entry {
        match (cod, dom) {
            (Factor::Seq, Factor::Seq) => Entry::Seq(SeqOp::zero()),
            (Factor::Fin(m), Factor::Fin(n)) => Entry::Fin(Mat::zero(*m, *n)),
            (Factor::Fin(_), Factor::Seq) => Entry::SeqToFin(SparseMap::zero()),
            (Factor::Seq, Factor::Fin(_)) => Entry::FinToSeq(SparseMap::zero()),
        }
    }

    /// Identity entry of the square cell on `f`.
    pub fn identity_like(f: &Factor) -> Entry {
        match f {
            Factor::Seq => Entry::Seq(SeqOp::identity()),
            Factor::Fin(n) => Entry::Fin(Mat::identity(*n)),
        }
    }

    fn is_zero(&self) -> bool {
        match self {
            Entry::Seq(t) => t.is_zero(),
            Entry::Fin(m) => m.is_zero(),
            Entry::SeqToFin(s) | Entry::FinToSeq(s) => s.is_zero(),
        }
    }

    fn add(&self, other: &Entry) -> Entry {
        match (self, other) {
            (Entry::Seq(a), Entry::Seq(b)) => Entry::Seq(a.add(b)),
            (Entry::Fin(a), Entry::Fin(b)) => Entry::Fin(a.add(b)),
            (Entry::SeqToFin(a), Entry::SeqToFin(b)) => Entry::SeqToFin(a.add(b)),
            (Entry::FinToSeq(a), Entry::FinToSeq(b)) => Entry::FinToSeq(a.add(b)),
            _ => unreachable!("entry variants fixed by the shapes"),
        }
    }

    fn scale(&self, c: &Scalar) -> Entry {
        match self {
            Entry::Seq(a) => Entry::Seq(a.scale(c)),
            Entry::Fin(a) => Entry::Fin(a.scale(c)),
            Entry::SeqToFin(a) => Entry::SeqToFin(a.scale(c)),
            Entry::FinToSeq(a) => Entry::FinToSeq(a.scale(c)),
        }
    }

    fn neg(&self) -> Entry {
        self.scale(&-crate::scalar::one())
    }

    fn validate(&self, cod: &Factor, dom: &Factor) -> Result<(), OpError> {
        let ok = match (self, cod, dom) {
            (Entry::Seq(_), Factor::Seq, Factor::Seq) => true,
            (Entry::Fin(m), Factor::Fin(r), Factor::Fin(c)) => m.rows() == *r && m.cols() == *c,
            (Entry::SeqToFin(s), Factor::Fin(m), Factor::Seq) => s.max_row() <= *m,
            (Entry::FinToSeq(s), Factor::Seq, Factor::Fin(n)) => s.max_col() <= *n,
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(OpError::ShapeMismatch(String::from(
                "entry variant or dimensions do not match the factor pair",
            )))
        }
    }
}

/// Composition of one grid cell pair: `a . b` through the middle factor.
fn entry_compose(a: &Entry, b: &Entry) -> Entry {
    match (a, b) {
        // middle factor Seq
        (Entry::Seq(a), Entry::Seq(b)) => Entry::Seq(a.compose(b)),
        (Entry::Seq(a), Entry::FinToSeq(b)) => {
            // apply the band operator to each finite column
            let mut out = SparseMap::zero();
            let mut cols: BTreeMap<usize, Vec<(usize, Scalar)>> = BTreeMap::new();
            for (i, j, v) in b.iter() {
                cols.entry(j).or_default().push((i, v.clone()));
            }
            for (j, col) in cols {
                let len = col.iter().map(|(i, _)| *i).max().unwrap_or(0);
                let mut dense = vec![Scalar::zero(); len];
                for (i, v) in col {
                    dense[i - 1] = v;
                }
                for (i0, v) in a.apply(&dense).into_iter().enumerate() {
                    out.add_entry(i0 + 1, j, v);
                }
            }
            Entry::FinToSeq(out)
        }
        (Entry::SeqToFin(a), Entry::Seq(b)) => {
            // pull each finite row functional back through the band operator:
            // (a b)_{ik} = sum_l a_{il} b_{lk}
            let mut out = SparseMap::zero();
            for (i, l, v) in a.iter() {
                if let (Some(lo), Some(hi)) = (b.symbol().lo(), b.symbol().hi()) {
                    for off in lo..=hi {
                        let k = l as i64 - off;
                        if k >= 1 {
                            out.add_entry(i, k as usize, v * b.symbol().coeff(off));
                        }
                    }
                }
                for (l2, k, w) in b.correction().iter() {
                    if l2 == l {
                        out.add_entry(i, k, v * w);
                    }
                }
            }
            Entry::SeqToFin(out)
        }
        (Entry::SeqToFin(a), Entry::FinToSeq(b)) => {
            // Fin -> Seq -> Fin collapses to a finite matrix
            let m = a.max_row();
            let n = b.max_col();
            let mut out = SparseMap::zero();
            for (i, l, v) in a.iter() {
                for (l2, k, w) in b.iter() {
                    if l2 == l {
                        out.add_entry(i, k, v * w);
                    }
                }
            }
            // dimensions come from the enclosing shapes; build a bounding Mat
            let mut mat = Mat::zero(m, n);
            for (i, k, v) in out.iter() {
                *mat.at_mut(i - 1, k - 1) = v.clone();
            }
            Entry::Fin(mat)
        }
        // middle factor Fin
        (Entry::Fin(a), Entry::Fin(b)) => Entry::Fin(a.mul(b)),
        (Entry::Fin(a), Entry::SeqToFin(b)) => {
            let mut out = SparseMap::zero();
            for (l, k, v) in b.iter() {
                for i in 0..a.rows() {
                    let c = a.at(i, l - 1);
                    if !c.is_zero() {
                        out.add_entry(i + 1, k, c * v);
                    }
                }
            }
            Entry::SeqToFin(out)
        }
        (Entry::FinToSeq(a), Entry::Fin(b)) => {
            let mut out = SparseMap::zero();
            for (i, l, v) in a.iter() {
                for k in 0..b.cols() {
                    let c = b.at(l - 1, k);
                    if !c.is_zero() {
                        out.add_entry(i, k + 1, v * c);
                    }
                }
            }
            Entry::FinToSeq(out)
        }
        (Entry::FinToSeq(a), Entry::SeqToFin(b)) => {
            // Seq -> Fin -> Seq: a finite-rank sequence operator
            let mut corr = Correction::zero();
            for (i, l, v) in a.iter() {
                for (l2, j, w) in b.iter() {
                    if l2 == l {
                        corr.add_entry(i, j, v * w);
                    }
                }
            }
            Entry::Seq(SeqOp::from_correction(corr))
        }
        _ => unreachable!("illegal entry pairing rejected by shape checks"),
    }
}

/// Per-factor component of a vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FactorVec {
    /// Finitely supported sequence component, dense from coordinate 1,
    /// trailing zeros allowed on input but trimmed on comparison.
    Seq(Vec<Scalar>),
    /// Finite component of exact length.
    Fin(Vec<Scalar>),
}

impl FactorVec {
    fn trimmed(&self) -> FactorVec {
        match self {
            FactorVec::Seq(v) => {
                let mut v = v.clone();
                while v.last().is_some_and(|c| c.is_zero()) {
                    v.pop();
                }
                FactorVec::Seq(v)
            }
            FactorVec::Fin(v) => FactorVec::Fin(v.clone()),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FactorVec::Seq(v) | FactorVec::Fin(v) => v.iter().all(|c| c.is_zero()),
        }
    }
}

/// Vector in a direct sum: one component per factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockVec {
    pub parts: Vec<FactorVec>,
}

impl BlockVec {
    pub fn zero(shape: &SpaceShape) -> Self {
        BlockVec {
            parts: shape
                .factors()
                .iter()
                .map(|f| match f {
                    Factor::Seq => FactorVec::Seq(Vec::new()),
                    Factor::Fin(n) => FactorVec::Fin(vec![Scalar::zero(); *n]),
                })
                .collect(),
        }
    }

    /// Standard basis vector: coordinate `coord` (1-based) of factor `factor`.
    pub fn basis(shape: &SpaceShape, factor: usize, coord: usize) -> Self {
        let mut v = BlockVec::zero(shape);
        match (&shape.factors()[factor], &mut v.parts[factor]) {
            (Factor::Seq, FactorVec::Seq(part)) => {
                part.resize(coord, Scalar::zero());
                part[coord - 1] = crate::scalar::one();
            }
            (Factor::Fin(n), FactorVec::Fin(part)) => {
                assert!(coord <= *n, "coordinate beyond finite factor");
                part[coord - 1] = crate::scalar::one();
            }
            _ => unreachable!(),
        }
        v
    }

    pub fn canonical(&self) -> BlockVec {
        BlockVec {
            parts: self.parts.iter().map(|p| p.trimmed()).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.parts.iter().all(|p| p.is_zero())
    }

    /// First `n` coordinates of every sequence factor (finite factors are
    /// returned whole): the verification probe.
    pub fn prefix(&self, n: usize) -> Vec<Vec<Scalar>> {
        self.parts
            .iter()
            .map(|p| match p {
                FactorVec::Seq(v) => {
                    let mut out = v.clone();
                    out.resize(n, Scalar::zero());
                    out
                }
                FactorVec::Fin(v) => v.clone(),
            })
            .collect()
    }
}

/// Operator between direct sums, stored as a (codomain x domain) grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockOp {
    domain: SpaceShape,
    codomain: SpaceShape,
    entries: Vec<Entry>, // row-major: entries[i * dom_len + j]
}

impl BlockOp {
    pub fn zero(domain: SpaceShape, codomain: SpaceShape) -> Self {
        let entries = codomain
            .factors()
            .iter()
            .flat_map(|cf| domain.factors().iter().map(move |df| Entry::zero_for(cf, df)))
            .collect();
        BlockOp {
            domain,
            codomain,
            entries,
        }
    }

    pub fn identity(shape: &SpaceShape) -> Self {
        let mut op = BlockOp::zero(shape.clone(), shape.clone());
        for (i, f) in shape.factors().iter().enumerate() {
            op.set_entry(i, i, Entry::identity_like(f)).unwrap();
        }
        op
    }

    /// Wraps a sequence operator as a 1x1 block on the `[Seq]` shape.
    pub fn from_seq(t: SeqOp) -> Self {
        let mut op = BlockOp::zero(SpaceShape::seq(), SpaceShape::seq());
        op.set_entry(0, 0, Entry::Seq(t)).unwrap();
        op
    }

    /// Wraps a matrix as a 1x1 block on finite shapes.
    pub fn from_mat(m: Mat) -> Self {
        let (dom, cod) = (SpaceShape::fin(m.cols()), SpaceShape::fin(m.rows()));
        let mut op = BlockOp::zero(dom, cod);
        op.set_entry(0, 0, Entry::Fin(m)).unwrap();
        op
    }

    pub fn domain(&self) -> &SpaceShape {
        &self.domain
    }

    pub fn codomain(&self) -> &SpaceShape {
        &self.codomain
    }

    pub fn entry(&self, cod_factor: usize, dom_factor: usize) -> &Entry {
        &self.entries[cod_factor * self.domain.len() + dom_factor]
    }

    pub fn set_entry(
        &mut self,
        cod_factor: usize,
        dom_factor: usize,
        e: Entry,
    ) -> Result<(), OpError> {
        e.validate(
            &self.codomain.factors()[cod_factor],
            &self.domain.factors()[dom_factor],
        )?;
        self.entries[cod_factor * self.domain.len() + dom_factor] = e;
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        self == &BlockOp::identity(&self.domain)
    }

    pub fn add(&self, other: &BlockOp) -> Result<BlockOp, OpError> {
        if self.domain != other.domain || self.codomain != other.codomain {
            return Err(OpError::ShapeMismatch(alloc::format!(
                "add: ({}) -> ({}) vs ({}) -> ({})",
                self.domain.describe(),
                self.codomain.describe(),
                other.domain.describe(),
                other.codomain.describe()
            )));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.add(b))
            .collect();
        Ok(BlockOp {
            domain: self.domain.clone(),
            codomain: self.codomain.clone(),
            entries,
        })
    }

    pub fn sub(&self, other: &BlockOp) -> Result<BlockOp, OpError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> BlockOp {
        BlockOp {
            domain: self.domain.clone(),
            codomain: self.codomain.clone(),
            entries: self.entries.iter().map(|e| e.neg()).collect(),
        }
    }

    pub fn scale(&self, c: &Scalar) -> BlockOp {
        BlockOp {
            domain: self.domain.clone(),
            codomain: self.codomain.clone(),
            entries: self.entries.iter().map(|e| e.scale(c)).collect(),
        }
    }

    /// Exact composition `self . other` (apply `other` first).
    pub fn compose(&self, other: &BlockOp) -> Result<BlockOp, OpError> {
        if self.domain != other.codomain {
            return Err(OpError::ShapeMismatch(alloc::format!(
                "compose: ({}) does not match ({})",
                self.domain.describe(),
                other.codomain.describe()
            )));
        }
        let mut out = BlockOp::zero(other.domain.clone(), self.codomain.clone());
        for i in 0..self.codomain.len() {
            for k in 0..other.domain.len() {
                let mut acc = Entry::zero_for(
                    &self.codomain.factors()[i],
                    &other.domain.factors()[k],
                );
                for j in 0..self.domain.len() {
                    let a = self.entry(i, j);
                    let b = other.entry(j, k);
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    let prod = entry_compose(a, b);
                    // normalize Fin dims coming out of SeqToFin . FinToSeq
                    let prod = match (prod, &self.codomain.factors()[i], &other.domain.factors()[k])
                    {
                        (Entry::Fin(m), Factor::Fin(r), Factor::Fin(c)) => {
                            let mut full = Mat::zero(*r, *c);
                            for ri in 0..m.rows().min(*r) {
                                for ci in 0..m.cols().min(*c) {
                                    *full.at_mut(ri, ci) = m.at(ri, ci).clone();
                                }
                            }
                            Entry::Fin(full)
                        }
                        (p, _, _) => p,
                    };
                    acc = acc.add(&prod);
                }
                out.set_entry(i, k, acc)?;
            }
        }
        Ok(out)
    }

    /// Exact image of a block vector.
    pub fn apply(&self, x: &BlockVec) -> Result<BlockVec, OpError> {
        if x.parts.len() != self.domain.len() {
            return Err(OpError::ShapeMismatch(String::from(
                "vector does not match operator domain",
            )));
        }
        for (part, f) in x.parts.iter().zip(self.domain.factors()) {
            match (part, f) {
                (FactorVec::Seq(_), Factor::Seq) => {}
                (FactorVec::Fin(v), Factor::Fin(n)) if v.len() == *n => {}
                _ => {
                    return Err(OpError::ShapeMismatch(String::from(
                        "vector component does not match factor",
                    )))
                }
            }
        }
        let mut out = BlockVec::zero(&self.codomain);
        for i in 0..self.codomain.len() {
            for j in 0..self.domain.len() {
                let e = self.entry(i, j);
                match (e, &x.parts[j], &mut out.parts[i]) {
                    (Entry::Seq(t), FactorVec::Seq(v), FactorVec::Seq(acc)) => {
                        let img = t.apply(v);
                        if acc.len() < img.len() {
                            acc.resize(img.len(), Scalar::zero());
                        }
                        for (idx, val) in img.into_iter().enumerate() {
                            acc[idx] += val;
                        }
                    }
                    (Entry::Fin(m), FactorVec::Fin(v), FactorVec::Fin(acc)) => {
                        for (idx, val) in m.mul_vec(v).into_iter().enumerate() {
                            acc[idx] += val;
                        }
                    }
                    (Entry::SeqToFin(s), FactorVec::Seq(v), FactorVec::Fin(acc)) => {
                        for (r, c, val) in s.iter() {
                            if c <= v.len() && !v[c - 1].is_zero() {
                                acc[r - 1] += val * &v[c - 1];
                            }
                        }
                    }
                    (Entry::FinToSeq(s), FactorVec::Fin(v), FactorVec::Seq(acc)) => {
                        for (r, c, val) in s.iter() {
                            if !v[c - 1].is_zero() {
                                if acc.len() < r {
                                    acc.resize(r, Scalar::zero());
                                }
                                acc[r - 1] += val * &v[c - 1];
                            }
                        }
                    }
                    _ => unreachable!("entry variants fixed by shapes"),
                }
            }
        }
        Ok(out.canonical())
    }

    /// Structural equality after canonical trimming (both sides are stored
    /// trimmed, so plain equality suffices; kept for readability at call
    /// sites that assert algebraic identities).
    pub fn equals(&self, other: &BlockOp) -> bool {
        self == other
    }

    /// Adds `v` at matrix position (`cod_coord` of factor `cod_factor`,
    /// `dom_coord` of factor `dom_factor`), 1-based coordinates.
    pub fn add_scalar_entry(
        &mut self,
        cod_factor: usize,
        cod_coord: usize,
        dom_factor: usize,
        dom_coord: usize,
        v: Scalar,
    ) {
        if v.is_zero() {
            return;
        }
        let cf = self.codomain.factors()[cod_factor];
        let df = self.domain.factors()[dom_factor];
        let idx = cod_factor * self.domain.len() + dom_factor;
        match (&mut self.entries[idx], cf, df) {
            (Entry::Seq(t), Factor::Seq, Factor::Seq) => {
                let mut corr = t.correction().clone();
                corr.add_entry(cod_coord, dom_coord, v);
                *t = SeqOp::new(t.symbol().clone(), corr);
            }
            (Entry::Fin(m), Factor::Fin(_), Factor::Fin(_)) => {
                *m.at_mut(cod_coord - 1, dom_coord - 1) = m.at(cod_coord - 1, dom_coord - 1) + v;
            }
            (Entry::SeqToFin(s), Factor::Fin(_), Factor::Seq)
            | (Entry::FinToSeq(s), Factor::Seq, Factor::Fin(_)) => {
                s.add_entry(cod_coord, dom_coord, v);
            }
            _ => unreachable!("entry variants fixed by shapes"),
        }
    }

    /// Copies `sub`'s grid into this operator with its factors placed at
    /// offsets `cod_at`/`dom_at`. The target cells must currently be zero.
    pub fn insert_block(&mut self, cod_at: usize, dom_at: usize, sub: &BlockOp) {
        for i in 0..sub.codomain.len() {
            for j in 0..sub.domain.len() {
                debug_assert_eq!(
                    self.codomain.factors()[cod_at + i],
                    sub.codomain.factors()[i]
                );
                debug_assert_eq!(self.domain.factors()[dom_at + j], sub.domain.factors()[j]);
                self.set_entry(cod_at + i, dom_at + j, sub.entry(i, j).clone())
                    .expect("sub-block factors match");
            }
        }
    }
}

/// Block-diagonal sum of two operators.
pub fn block_diag(a: &BlockOp, b: &BlockOp) -> BlockOp {
    let domain = a.domain().concat(b.domain());
    let codomain = a.codomain().concat(b.codomain());
    let mut out = BlockOp::zero(domain, codomain);
    for i in 0..a.codomain().len() {
        for j in 0..a.domain().len() {
            out.set_entry(i, j, a.entry(i, j).clone()).unwrap();
        }
    }
    let (ri, rj) = (a.codomain().len(), a.domain().len());
    for i in 0..b.codomain().len() {
        for j in 0..b.domain().len() {
            out.set_entry(ri + i, rj + j, b.entry(i, j).clone()).unwrap();
        }
    }
    out
}

/// The permutation operator sending factor `perm[i]` of `shape` to position
/// `i` of the permuted codomain; composing with its inverse permutation gives
/// the identity.
pub fn block_permute(shape: &SpaceShape, perm: &[usize]) -> BlockOp {
    assert_eq!(perm.len(), shape.len(), "permutation length mismatch");
    let codomain = SpaceShape::new(perm.iter().map(|&j| shape.factors()[j]).collect());
    let mut out = BlockOp::zero(shape.clone(), codomain);
    for (i, &j) in perm.iter().enumerate() {
        out.set_entry(i, j, Entry::identity_like(&shape.factors()[j]))
            .unwrap();
    }
    out
}

/// Inverse of a permutation slice.
pub fn invert_perm(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0usize; perm.len()];
    for (i, &j) in perm.iter().enumerate() {
        inv[j] = i;
    }
    inv
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::qi;

    fn seq_fin_shape(n: usize) -> SpaceShape {
        SpaceShape::new(vec![Factor::Seq, Factor::Fin(n)])
    }

    #[test]
    fn identity_composes_to_itself() {
        let shape = seq_fin_shape(2);
        let id = BlockOp::identity(&shape);
        assert_eq!(id.compose(&id).unwrap(), id);
    }

    #[test]
    fn permute_round_trip() {
        let shape = seq_fin_shape(1);
        let p = block_permute(&shape, &[1, 0]);
        let back = block_permute(p.codomain(), &invert_perm(&[1, 0]));
        assert!(back.compose(&p).unwrap().is_identity());
        assert!(p.compose(&back).unwrap().is_identity());
    }

    #[test]
    fn diag_and_apply() {
        let d = block_diag(
            &BlockOp::from_seq(SeqOp::shift(-1)),
            &BlockOp::from_mat(Mat::identity(3)),
        );
        // apply to (e_2, (1,2,3)): seq part shifts down
        let x = BlockVec {
            parts: vec![
                FactorVec::Seq(vec![qi(0), qi(1)]),
                FactorVec::Fin(vec![qi(1), qi(2), qi(3)]),
            ],
        };
        let y = d.apply(&x).unwrap();
        assert_eq!(
            y,
            BlockVec {
                parts: vec![
                    FactorVec::Seq(vec![qi(1)]),
                    FactorVec::Fin(vec![qi(1), qi(2), qi(3)]),
                ],
            }
        );
    }

    #[test]
    fn mixed_cell_composition() {
        // T: [Seq] -> [Seq, Fin(2)] with a head extraction, then project back
        let dom = SpaceShape::seq();
        let cod = seq_fin_shape(2);
        let mut t = BlockOp::zero(dom.clone(), cod.clone());
        t.set_entry(0, 0, Entry::Seq(SeqOp::shift(-2))).unwrap();
        t.set_entry(
            1,
            0,
            Entry::SeqToFin(SparseMap::from_entries([
                (1, 1, qi(1)),
                (2, 2, qi(1)),
            ])),
        )
        .unwrap();
        let mut back = BlockOp::zero(cod.clone(), dom.clone());
        back.set_entry(0, 0, Entry::Seq(SeqOp::shift(2))).unwrap();
        back.set_entry(
            0,
            1,
            Entry::FinToSeq(SparseMap::from_entries([
                (1, 1, qi(1)),
                (2, 2, qi(1)),
            ])),
        )
        .unwrap();
        // back . t = identity on [Seq]: head restored, tail restored
        let round = back.compose(&t).unwrap();
        assert!(round.is_identity());
    }

    #[test]
    fn shape_mismatch_reported() {
        let a = BlockOp::identity(&SpaceShape::seq());
        let b = BlockOp::identity(&seq_fin_shape(1));
        assert!(matches!(a.compose(&b), Err(OpError::ShapeMismatch(_))));
        assert!(matches!(a.add(&b), Err(OpError::ShapeMismatch(_))));
    }
}
