//! Space descriptors and the declared-fact table.
//!
//! Exotic facts (realizable-index ideals of the shift spaces, incomparability
//! of specific pairs, coupling witnesses for particular indices) are axioms
//! declared with citations, never derived: their proofs live in
//! infinite-dimensional analysis outside the computable model. The engine
//! only closes the table under the implication chain total => essential =>
//! projective, isomorphism symmetry, and the componentwise rule for sums.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

/// Declared realizable-index ideal of an atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IphiDecl {
    /// The set of realizable Fredholm indices is exactly `gZ`.
    Exact(u64),
    /// Not declared; the engine works with `{0} <= I_Phi <= Z`.
    Unknown,
}

/// A named space with its declared data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atom {
    pub name: String,
    pub iphi: IphiDecl,
    /// Whether the space contains a complemented copy of its own square;
    /// gates the additive closure of coupling-index lower bounds.
    pub has_complemented_square: bool,
}

/// Descriptor: an atom or a finite direct sum.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum SpaceDesc {
    Atom(String),
    Sum(Vec<SpaceDesc>),
}

impl SpaceDesc {
    pub fn atom(name: &str) -> Self {
        SpaceDesc::Atom(name.to_string())
    }

    pub fn sum(parts: impl IntoIterator<Item = SpaceDesc>) -> Self {
        SpaceDesc::Sum(parts.into_iter().collect())
    }

    /// Flattened atom list (a multiset, order preserved).
    pub fn atoms(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            SpaceDesc::Atom(a) => out.push(a),
            SpaceDesc::Sum(parts) => {
                for p in parts {
                    p.collect_atoms(out);
                }
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        self.atoms().is_empty()
    }

    pub fn describe(&self) -> String {
        let atoms = self.atoms();
        if atoms.is_empty() {
            return String::from("0");
        }
        atoms.join(" (+) ")
    }
}

/// Pairwise relation strength, ordered by how much it forces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Relation {
    Unknown,
    ProjectivelyIncomparable,
    EssentiallyIncomparable,
    TotallyIncomparable,
    Isomorphic,
}

impl Relation {
    /// True when the relation implies essential incomparability
    /// (total does; isomorphic certainly does not).
    pub fn at_least_essential(&self) -> bool {
        matches!(
            self,
            Relation::EssentiallyIncomparable | Relation::TotallyIncomparable
        )
    }

    pub fn at_least_projective(&self) -> bool {
        matches!(
            self,
            Relation::ProjectivelyIncomparable
                | Relation::EssentiallyIncomparable
                | Relation::TotallyIncomparable
        )
    }
}

/// Declared coupling witness: the pair of atoms admits coupled Fredholm
/// operators of index `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScWitnessFact {
    pub x: String,
    pub y: String,
    pub k: u64,
    pub citation: String,
}

/// The fact table a scenario evaluates against.
#[derive(Debug, Clone, Default)]
pub struct RelationTable {
    atoms: BTreeMap<String, Atom>,
    relations: BTreeMap<(String, String), Relation>,
    complemented: Vec<(String, SpaceDesc)>,
    sc_witnesses: Vec<ScWitnessFact>,
}

impl RelationTable {
    pub fn new() -> Self {
        RelationTable::default()
    }

    pub fn add_atom(&mut self, name: &str, iphi: IphiDecl, has_complemented_square: bool) {
        self.atoms.insert(
            name.to_string(),
            Atom {
                name: name.to_string(),
                iphi,
                has_complemented_square,
            },
        );
    }

    pub fn atom(&self, name: &str) -> Option<&Atom> {
        self.atoms.get(name)
    }

    pub fn atom_names(&self) -> impl Iterator<Item = &str> {
        self.atoms.keys().map(|s| s.as_str())
    }

    pub fn declare(&mut self, a: &str, b: &str, rel: Relation) {
        let key = ordered(a, b);
        self.relations.insert(key, rel);
    }

    pub fn declare_complemented(&mut self, atom: &str, in_desc: SpaceDesc) {
        self.complemented.push((atom.to_string(), in_desc));
    }

    pub fn declare_sc_witness(&mut self, x: &str, y: &str, k: u64, citation: &str) {
        self.sc_witnesses.push(ScWitnessFact {
            x: x.to_string(),
            y: y.to_string(),
            k,
            citation: citation.to_string(),
        });
    }

    /// Declared relation between two atoms; an atom is isomorphic to itself.
    pub fn relation(&self, a: &str, b: &str) -> Relation {
        if a == b {
            return Relation::Isomorphic;
        }
        self.relations
            .get(&ordered(a, b))
            .copied()
            .unwrap_or(Relation::Unknown)
    }

    /// Isomorphism test between atoms, closed under symmetry (the table is
    /// small enough that declared facts are expected to be transitively
    /// complete; no closure pass is attempted).
    pub fn isomorphic(&self, a: &str, b: &str) -> bool {
        self.relation(a, b) == Relation::Isomorphic
    }

    /// Essential incomparability between descriptors: componentwise over the
    /// atom pairs, since the inessential operators form an operator ideal.
    /// The empty descriptor is incomparable with everything.
    pub fn ess_incomparable(&self, x: &SpaceDesc, y: &SpaceDesc) -> bool {
        x.atoms().iter().all(|a| {
            y.atoms()
                .iter()
                .all(|b| self.relation(a, b).at_least_essential())
        })
    }

    pub fn witnesses_for(&self, x: &str, y: &str) -> Vec<&ScWitnessFact> {
        self.sc_witnesses
            .iter()
            .filter(|w| {
                (w.x == x && w.y == y) || (w.x == y && w.y == x)
            })
            .collect()
    }

    /// Whether `y` is (isomorphic to) a complemented subspace of `x`:
    /// either the atoms of `y` inject into the atoms of `x` up to declared
    /// isomorphism, or a declared fact says so for a single atom.
    pub fn complemented_in(&self, y: &SpaceDesc, x: &SpaceDesc) -> bool {
        let ya = y.atoms();
        let xa = x.atoms();
        if multiset_injects(&ya, &xa, |a, b| a == b || self.isomorphic(a, b)) {
            return true;
        }
        if let [single] = ya.as_slice() {
            return self
                .complemented
                .iter()
                .any(|(a, d)| a == single && &d.atoms() == &xa);
        }
        false
    }

    /// All atoms of the descriptor carry the complemented-square flag; a sum
    /// of such spaces contains a complemented copy of its square by
    /// interleaving the factor squares.
    pub fn has_complemented_square(&self, d: &SpaceDesc) -> bool {
        let atoms = d.atoms();
        !atoms.is_empty()
            && atoms
                .iter()
                .all(|a| self.atom(a).is_some_and(|at| at.has_complemented_square))
    }
}

fn ordered(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

fn multiset_injects(from: &[&str], into: &[&str], eq: impl Fn(&str, &str) -> bool) -> bool {
    // greedy bipartite matching; the instances are tiny
    let mut used = alloc::vec![false; into.len()];
    fn try_match(
        i: usize,
        from: &[&str],
        into: &[&str],
        eq: &impl Fn(&str, &str) -> bool,
        used: &mut [bool],
    ) -> bool {
        if i == from.len() {
            return true;
        }
        for j in 0..into.len() {
            if !used[j] && eq(from[i], into[j]) {
                used[j] = true;
                if try_match(i + 1, from, into, eq, used) {
                    return true;
                }
                used[j] = false;
            }
        }
        false
    }
    try_match(0, from, into, &eq, &mut used)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> RelationTable {
        let mut t = RelationTable::new();
        t.add_atom("a", IphiDecl::Exact(1), true);
        t.add_atom("b", IphiDecl::Exact(2), false);
        t.add_atom("c", IphiDecl::Unknown, false);
        t.declare("a", "b", Relation::TotallyIncomparable);
        t
    }

    #[test]
    fn relations_are_symmetric_and_graded() {
        let t = table();
        assert!(t.relation("a", "b").at_least_essential());
        assert!(t.relation("b", "a").at_least_essential());
        assert!(t.relation("a", "b").at_least_projective());
        assert_eq!(t.relation("a", "c"), Relation::Unknown);
        assert_eq!(t.relation("a", "a"), Relation::Isomorphic);
    }

    #[test]
    fn componentwise_sum_rule() {
        let mut t = table();
        let ab = SpaceDesc::sum([SpaceDesc::atom("a"), SpaceDesc::atom("b")]);
        // (a (+) b) vs c: unknown until both pairs are declared
        assert!(!t.ess_incomparable(&ab, &SpaceDesc::atom("c")));
        t.declare("a", "c", Relation::EssentiallyIncomparable);
        t.declare("b", "c", Relation::TotallyIncomparable);
        assert!(t.ess_incomparable(&ab, &SpaceDesc::atom("c")));
        // the empty space is incomparable with everything
        assert!(t.ess_incomparable(&SpaceDesc::Sum(Vec::new()), &ab));
    }

    #[test]
    fn complemented_injection() {
        let t = table();
        let x = SpaceDesc::sum([SpaceDesc::atom("a"), SpaceDesc::atom("b")]);
        assert!(t.complemented_in(&SpaceDesc::atom("a"), &x));
        assert!(t.complemented_in(&x, &x));
        assert!(!t.complemented_in(
            &SpaceDesc::sum([SpaceDesc::atom("a"), SpaceDesc::atom("a")]),
            &x
        ));
    }

    #[test]
    fn square_flag_propagates_to_sums() {
        let mut t = table();
        t.add_atom("a2", IphiDecl::Exact(1), true);
        let good = SpaceDesc::sum([SpaceDesc::atom("a"), SpaceDesc::atom("a2")]);
        let bad = SpaceDesc::sum([SpaceDesc::atom("a"), SpaceDesc::atom("b")]);
        assert!(t.has_complemented_square(&good));
        assert!(!t.has_complemented_square(&bad));
    }
}
