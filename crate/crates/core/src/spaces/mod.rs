//! Symbolic calculus over Banach-space descriptors.
//!
//! Spaces enter as atoms with declared index-ideal data and pairwise
//! relations; sums of atoms are handled by closure rules. The engine computes
//! the realizable-index ideal of a space, the extension-equivalence index of
//! a pair, two-sided bounds on the coupling-index set, and per-index verdicts
//! on whether the two equivalences coincide — answering `Unknown` where the
//! declared facts leave a genuine gap rather than guessing.

pub mod desc;
pub mod ideal;
pub mod rules;
pub mod scenarios;

pub use desc::{Atom, IphiDecl, Relation, RelationTable, SpaceDesc};
pub use ideal::IdealZ;
pub use rules::{
    eae_index, iphi_of, isc_bounds, sc_index, verdict, Bounds, IscBounds, ScIndex, Trail, Verdict,
};
pub use scenarios::{builtin_scenarios, Claim, Expectation, SpaceScenario};
