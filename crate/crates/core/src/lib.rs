//! Exact laboratory for equivalence after extension (EAE) and Schur coupling (SC)
//! of Fredholm operators.
//!
//! The crate has three layers:
//!
//! * an exact-arithmetic substrate: rational scalars, dense rational matrices
//!   ([`mat`]) and rational polynomials with Sturm-chain root counting ([`poly`]);
//! * a computable operator class: banded Toeplitz symbols plus finite-rank
//!   corrections on the one-sided sequence space ([`seqop`]), block operators
//!   over direct sums of sequence and finite-dimensional factors ([`block`]),
//!   and exact Fredholm data for them ([`fredholm`]);
//! * the constructive coupling algorithms ([`coupling`]) and a symbolic
//!   index-ideal calculus over Banach-space descriptors ([`spaces`]).
//!
//! Everything outside [`numeric`] is exact: results are rational, deterministic
//! and certified by algebraic identities rather than tolerances.

#![no_std]

extern crate alloc;

pub mod block;
pub mod coupling;
pub mod error;
pub mod fredholm;
pub mod mat;
pub mod numeric;
pub mod poly;
pub mod scalar;
pub mod seqop;
pub mod shape;
pub mod spaces;
pub mod symbol;
pub(crate) mod window;

pub use block::{block_diag, block_permute, BlockOp, BlockVec, Entry, FactorVec, SparseMap};
pub use coupling::{Extension, InvOp, SchurCouple, Witness};
pub use error::OpError;
pub use fredholm::{BackendConfig, FredholmData};
pub use mat::{Mat, QVec};
pub use scalar::Scalar;
pub use seqop::{Correction, SeqOp};
pub use shape::{Factor, SpaceShape};
pub use symbol::LaurentSymbol;
