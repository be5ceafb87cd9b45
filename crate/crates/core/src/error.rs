//! Error type shared by the operator and coupling layers.

use alloc::string::String;

/// Failure modes of operator construction, Fredholm analysis and coupling.
///
/// `NoSolution`-style outcomes (a vector outside a range, say) are ordinary
/// values elsewhere; these variants are contract violations or honest
/// refusals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OpError {
    /// Block shapes do not line up for the requested operation.
    ShapeMismatch(String),
    /// The operator is not Fredholm (symbol vanishes on the unit circle,
    /// or a sequence factor carries no usable symbol).
    NotFredholm,
    /// The exact backend cannot represent this computation: it needs
    /// monomial tail behaviour that the operator does not have.
    NotRepresentable(String),
    /// The validated-numeric backend disagreed with its cross-checks;
    /// the tolerance must be tightened.
    BackendDisagreement(String),
    /// Kernel-dimension target below the Fredholm index: no finite-rank
    /// perturbation can reach it.
    IndexObstruction { index: i64, requested: i64 },
    /// The witness-perturbation lemma needs a nonzero index.
    ZeroIndexInput,
    /// Witness index does not match the operator index.
    IndexMismatch { expected: i64, found: i64 },
    /// The operators are not equivalent after extension (alpha/beta differ).
    NotEAE,
    /// Range-alignment requires equal range codimensions.
    BetaMismatch { left: usize, right: usize },
    /// A certified inverse was requested for a non-invertible operator.
    NotInvertible,
    /// Input vectors were linearly dependent.
    DependentInput,
}

impl core::fmt::Display for OpError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            OpError::ShapeMismatch(d) => write!(f, "shape mismatch: {d}"),
            OpError::NotFredholm => write!(f, "operator is not Fredholm"),
            OpError::NotRepresentable(d) => write!(f, "not representable in the exact backend: {d}"),
            OpError::BackendDisagreement(d) => write!(f, "numeric backend disagreement: {d}"),
            OpError::IndexObstruction { index, requested } => write!(
                f,
                "kernel dimension {requested} unreachable: finite-rank perturbations keep index {index}"
            ),
            OpError::ZeroIndexInput => write!(f, "witness perturbation requires nonzero index"),
            OpError::IndexMismatch { expected, found } => {
                write!(f, "index mismatch: expected {expected}, found {found}")
            }
            OpError::NotEAE => write!(f, "operators are not equivalent after extension"),
            OpError::BetaMismatch { left, right } => {
                write!(f, "range codimensions differ: {left} vs {right}")
            }
            OpError::NotInvertible => write!(f, "operator is not invertible"),
            OpError::DependentInput => write!(f, "input vectors are linearly dependent"),
        }
    }
}

impl core::error::Error for OpError {}

impl From<crate::mat::DependentInput> for OpError {
    fn from(_: crate::mat::DependentInput) -> Self {
        OpError::DependentInput
    }
}
