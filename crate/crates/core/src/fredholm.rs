//! Fredholm analysis: membership, index, and full kernel/cokernel data.
//!
//! Membership and index are decided exactly for every band symbol: a band
//! operator is Fredholm precisely when its symbol has no zeros on the unit
//! circle (finite-rank corrections never matter), and its index is minus the
//! winding number of the symbol, read off from the exact count of numerator
//! zeros inside the disk. Matrix convention `T_{ij} = a_{i-j} + F_{ij}`,
//! index = -winding; stated here once because sign conventions differ across
//! texts.
//!
//! Full Fredholm data comes from one of two backends:
//!
//! * EXACT, for monomial-class block operators: the window reduction makes
//!   alpha, beta, kernel basis and range complement finite rational
//!   computations. Every result is recomputed at windows padded by
//!   [`BackendConfig::recheck_pad`] and cross-checked; the bases are also
//!   verified by exact application.
//! * VALIDATED-NUMERIC, for general band symbols on `[Seq]`: decaying
//!   recurrence modes matched against the correction window in floating
//!   point (see [`crate::numeric`]); counts only, never certified.

use alloc::string::String;
use alloc::vec::Vec;

use crate::block::{BlockOp, BlockVec, Entry};
use crate::error::OpError;
use crate::poly::{unit_disk_roots, DiskCount};
use crate::seqop::SeqOp;
use crate::window::WindowView;

/// Backend parameters.
#[derive(Debug, Clone)]
pub struct BackendConfig {
    /// Relative pivot tolerance of the numeric backend.
    pub numeric_tolerance: f64,
    /// Extra window padding for the exact backend's self-check.
    pub recheck_pad: usize,
}

impl Default for BackendConfig {
    fn default() -> Self {
        BackendConfig {
            numeric_tolerance: 1e-9,
            recheck_pad: 5,
        }
    }
}

/// Exact Fredholm data of an operator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FredholmData {
    /// Kernel dimension.
    pub alpha: usize,
    /// Range codimension.
    pub beta: usize,
    /// `alpha - beta`, always exact (even for the numeric backend, which
    /// takes it from the winding count).
    pub index: i64,
    /// Kernel basis; finitely supported, exact, empty for the numeric backend.
    pub kernel_basis: Vec<BlockVec>,
    /// Standard basis vectors spanning a complement of the range; empty for
    /// the numeric backend.
    pub range_complement: Vec<BlockVec>,
    /// Sequence-window size the data was computed on.
    pub window: usize,
    /// True when produced by the exact backend.
    pub certified: bool,
}

/// Fredholm membership for a band-plus-finite-rank operator, decided exactly:
/// the symbol must be nonzero and its numerator polynomial must have no zeros
/// on the unit circle.
pub fn is_fredholm(t: &SeqOp) -> bool {
    match t.symbol().numerator() {
        None => false,
        Some((_, f)) => !matches!(unit_disk_roots(&f), DiskCount::OnCircle),
    }
}

/// Exact Fredholm index of a band-plus-finite-rank operator: with
/// `a(z) = z^lo f(z)`, the index is `-(lo + Z_in(f))` where `Z_in` counts
/// numerator zeros strictly inside the disk. Invariant under any change of
/// the correction.
pub fn index(t: &SeqOp) -> Result<i64, OpError> {
    let Some((lo, f)) = t.symbol().numerator() else {
        return Err(OpError::NotFredholm);
    };
    match unit_disk_roots(&f) {
        DiskCount::OnCircle => Err(OpError::NotFredholm),
        DiskCount::Off { inside } => Ok(-(lo + inside as i64)),
    }
}

/// Exact index of a block operator. Handles all-finite shapes, shapes with a
/// single sequence factor on each side (any band symbol), and monomial-class
/// operators with several sequence factors.
pub fn block_index(op: &BlockOp) -> Result<i64, OpError> {
    let dom = op.domain();
    let cod = op.codomain();
    let fin_shift = dom.fin_dim() as i64 - cod.fin_dim() as i64;
    match (dom.seq_positions().as_slice(), cod.seq_positions().as_slice()) {
        ([], []) => Ok(fin_shift),
        ([j], [i]) => {
            let Entry::Seq(t) = op.entry(*i, *j) else {
                unreachable!("seq cell variant fixed by shapes")
            };
            Ok(index(t)? + fin_shift)
        }
        _ => {
            let view = WindowView::of(op, &[], &[])?;
            Ok(view.total_dom() as i64 - view.total_cod() as i64)
        }
    }
}

/// Exact Fredholm data of a monomial-class block operator, self-checked at a
/// padded window.
pub fn fredholm_data_exact(op: &BlockOp, cfg: &BackendConfig) -> Result<FredholmData, OpError> {
    let view = WindowView::of(op, &[], &[])?;
    for r in &view.routes {
        debug_assert!(!num_traits::Zero::is_zero(&r.coeff));
    }
    let kernel = view.kernel();
    let alpha = kernel.len();
    let beta = view.total_cod() - view.rank();
    let range_complement = view.range_complement();
    let data = FredholmData {
        alpha,
        beta,
        index: alpha as i64 - beta as i64,
        kernel_basis: kernel,
        range_complement,
        window: view.max_seq_window(),
        certified: true,
    };

    // window certificate: recompute on padded windows and compare
    let pad: Vec<usize> = view
        .dom_win
        .iter()
        .zip(op.domain().factors())
        .map(|(w, f)| match f {
            crate::shape::Factor::Seq => w + cfg.recheck_pad,
            crate::shape::Factor::Fin(n) => *n,
        })
        .collect();
    let padded = WindowView::of(op, &pad, &[])?;
    let alpha2 = padded.kernel().len();
    let beta2 = padded.total_cod() - padded.rank();
    if (alpha2, beta2) != (alpha, beta) {
        return Err(OpError::BackendDisagreement(alloc::format!(
            "window recheck: ({alpha},{beta}) at W, ({alpha2},{beta2}) at W+{}",
            cfg.recheck_pad
        )));
    }
    // exactness certificates
    for v in &data.kernel_basis {
        if !op.apply(v)?.is_zero() {
            return Err(OpError::BackendDisagreement(String::from(
                "kernel vector fails exact application",
            )));
        }
    }
    debug_assert!(data
        .range_complement
        .iter()
        .all(|v| matches!(view.solve(v), Ok(None))));
    Ok(data)
}

/// Full Fredholm data with backend dispatch: exact where the operator is
/// monomial-class, validated-numeric for general band symbols on `[Seq]`.
pub fn fredholm_data(op: &BlockOp, cfg: &BackendConfig) -> Result<FredholmData, OpError> {
    match fredholm_data_exact(op, cfg) {
        Ok(d) => Ok(d),
        Err(OpError::NotRepresentable(_)) => {
            if let ([0], [0]) = (
                op.domain().seq_positions().as_slice(),
                op.codomain().seq_positions().as_slice(),
            ) {
                if op.domain().len() == 1 && op.codomain().len() == 1 {
                    let Entry::Seq(t) = op.entry(0, 0) else {
                        unreachable!()
                    };
                    return crate::numeric::fredholm_data_numeric(t, cfg);
                }
            }
            Err(OpError::NotRepresentable(String::from(
                "numeric backend handles only single-sequence operators",
            )))
        }
        Err(e) => Err(e),
    }
}

/// Convenience wrapper for plain sequence operators.
pub fn fredholm_data_seq(t: &SeqOp, cfg: &BackendConfig) -> Result<FredholmData, OpError> {
    fredholm_data(&BlockOp::from_seq(t.clone()), cfg)
}
