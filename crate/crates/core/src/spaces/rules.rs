//! The index-ideal rule engine.
//!
//! Everything is computed as certified two-sided bounds: a lower ideal that
//! provably consists of realizable indices and an upper ideal that provably
//! contains them all. A result is exact when the two coincide; otherwise the
//! verdict layer reports `Unknown` rather than leaning on the (open)
//! conjecture that the coupling-index set is an ideal. Every rule firing is
//! recorded in a citation trail.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::desc::{IphiDecl, RelationTable, SpaceDesc};
use super::ideal::IdealZ;

/// Two-sided ideal bounds: `lower` is a certified subset, `upper` a certified
/// superset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bounds {
    pub lower: IdealZ,
    pub upper: IdealZ,
}

impl Bounds {
    pub fn exact(&self) -> bool {
        self.lower == self.upper
    }

    pub fn exactly(g: u64) -> Bounds {
        Bounds {
            lower: IdealZ::new(g),
            upper: IdealZ::new(g),
        }
    }
}

/// Citation trail: one line per rule firing.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Trail(pub Vec<String>);

impl Trail {
    pub fn new() -> Self {
        Trail::default()
    }

    pub fn push(&mut self, entry: String) {
        self.0.push(entry);
    }

    pub fn lines(&self) -> &[String] {
        &self.0
    }
}

/// Bounds on the realizable-index ideal of a space: exact for declared atoms;
/// for sums, the lower bound adds the factor ideals (always sound) and the
/// upper bound matches it when all factor pairs are essentially incomparable.
pub fn iphi_of(x: &SpaceDesc, rel: &RelationTable, trail: &mut Trail) -> Bounds {
    let atoms = x.atoms();
    if atoms.is_empty() {
        return Bounds::exactly(0);
    }
    let mut lower = IdealZ::trivial();
    let mut upper_sum = IdealZ::trivial();
    let mut all_known = true;
    for a in &atoms {
        match rel.atom(a).map(|at| at.iphi) {
            Some(IphiDecl::Exact(g)) => {
                lower = lower.sum(&IdealZ::new(g));
                upper_sum = upper_sum.sum(&IdealZ::new(g));
            }
            Some(IphiDecl::Unknown) | None => {
                all_known = false;
                upper_sum = upper_sum.sum(&IdealZ::full());
            }
        }
    }
    if atoms.len() == 1 {
        let b = if all_known {
            Bounds {
                lower,
                upper: lower,
            }
        } else {
            Bounds {
                lower: IdealZ::trivial(),
                upper: IdealZ::full(),
            }
        };
        return b;
    }
    // pairwise essential incomparability lets the sum rule become an equality
    let pairwise_ess = atoms.iter().enumerate().all(|(i, a)| {
        atoms
            .iter()
            .skip(i + 1)
            .all(|b| rel.relation(a, b).at_least_essential())
    });
    let upper = if pairwise_ess && all_known {
        trail.push(format!(
            "Lemma 3.7: factors of {} pairwise essentially incomparable, index ideal adds up exactly",
            x.describe()
        ));
        upper_sum
    } else {
        IdealZ::full()
    };
    if lower != upper {
        trail.push(format!(
            "Lemma 3.7: lower bound {} for I_Phi({}) from factor ideals",
            lower,
            x.describe()
        ));
    }
    Bounds { lower, upper }
}

/// Bounds on the extension-equivalence ideal `eae(X,Y) Z`, the intersection
/// of the two realizable-index ideals.
pub fn eae_index(
    x: &SpaceDesc,
    y: &SpaceDesc,
    rel: &RelationTable,
    trail: &mut Trail,
) -> Bounds {
    let bx = iphi_of(x, rel, trail);
    let by = iphi_of(y, rel, trail);
    let bounds = Bounds {
        lower: bx.lower.intersect(&by.lower),
        upper: bx.upper.intersect(&by.upper),
    };
    trail.push(format!(
        "Cor 3.4: eae ideal = I_Phi({}) intersect I_Phi({}) in [{}, {}]",
        x.describe(),
        y.describe(),
        bounds.lower,
        bounds.upper
    ));
    bounds
}

/// Two-sided bounds on the coupling-index set with exactness flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IscBounds {
    pub lower: IdealZ,
    pub upper: IdealZ,
    pub exact: bool,
}

/// Bounds on the coupling-index set of the pair, with the citation trail of
/// every rule that fired.
pub fn isc_bounds(x: &SpaceDesc, y: &SpaceDesc, rel: &RelationTable) -> (IscBounds, Trail) {
    let mut eval = Eval {
        rel,
        memo: BTreeMap::new(),
        emitted: alloc::collections::BTreeSet::new(),
    };
    let (b, trail) = eval.run(x, y, 0);
    let mut out = Trail::new();
    eval.merge(&mut out, &memo_key(x, y), &trail);
    (b, out)
}

type Key = (Vec<String>, Vec<String>);

fn memo_key(x: &SpaceDesc, y: &SpaceDesc) -> Key {
    let mut a: Vec<String> = x.atoms().iter().map(|s| String::from(*s)).collect();
    let mut b: Vec<String> = y.atoms().iter().map(|s| String::from(*s)).collect();
    a.sort();
    b.sort();
    (a, b)
}

struct Eval<'a> {
    rel: &'a RelationTable,
    memo: BTreeMap<Key, (IscBounds, Trail)>,
    emitted: alloc::collections::BTreeSet<Key>,
}

impl<'a> Eval<'a> {
    /// Appends a sub-pair's trail to `out` at most once per evaluation.
    fn merge(&mut self, out: &mut Trail, key: &Key, trail: &Trail) {
        if self.emitted.insert(key.clone()) {
            for line in trail.lines() {
                out.push(line.clone());
            }
        }
    }

    fn run(&mut self, x: &SpaceDesc, y: &SpaceDesc, depth: usize) -> (IscBounds, Trail) {
        let key = memo_key(x, y);
        if let Some(hit) = self.memo.get(&key) {
            return hit.clone();
        }
        let rel = self.rel;
        let pair = format!("({}, {})", x.describe(), y.describe());
        let mut trail = Trail::new();
        let mut lowers: Vec<IdealZ> = Vec::new(); // each a certified subset

        // the identity pair is always coupled
        lowers.push(IdealZ::trivial());
        trail.push(format!("Lemma 5.1(i): 0 in I_SC{pair}"));

        // I_SC is contained in the eae ideal
        let eae = eae_index(x, y, rel, &mut trail);
        let mut upper = eae.upper;
        trail.push(format!("Prop 1.6(iii): I_SC{pair} within {upper}"));

        // essentially incomparable spaces couple only at index 0
        if !x.is_empty() && !y.is_empty() && rel.ess_incomparable(x, y) {
            upper = IdealZ::trivial();
            trail.push(format!(
                "Thm 1.7(i): pair {pair} essentially incomparable, so I_SC = {{0}}"
            ));
        }

        // complemented-subspace rule, in both orientations
        let bx = iphi_of(x, rel, &mut trail);
        let by = iphi_of(y, rel, &mut trail);
        if !y.is_empty() && rel.complemented_in(y, x) {
            lowers.push(by.lower);
            upper = upper.intersect(&by.upper);
            trail.push(format!(
                "Prop 5.5: {} complemented in {}, I_SC{pair} = I_Phi({})",
                y.describe(),
                x.describe(),
                y.describe()
            ));
        }
        if !x.is_empty() && rel.complemented_in(x, y) {
            lowers.push(bx.lower);
            upper = upper.intersect(&bx.upper);
            trail.push(format!(
                "Prop 5.5: {} complemented in {}, I_SC{pair} = I_Phi({})",
                x.describe(),
                y.describe(),
                x.describe()
            ));
        }

        // declared witnesses at the atom level
        if let (SpaceDesc::Atom(a), SpaceDesc::Atom(b)) = (canonical(x), canonical(y)) {
            for w in rel.witnesses_for(&a, &b) {
                lowers.push(IdealZ::new(w.k));
                trail.push(format!(
                    "{}: declared coupling witness at index {} for {pair}, Lemma 5.1(iii) closes under multiples",
                    w.citation, w.k
                ));
            }
        }

        // decomposition rules over factor splits
        if depth < 6 {
            let xa = x.atoms();
            let ya = y.atoms();
            for xmask in submasks(xa.len()) {
                for ymask in submasks(ya.len()) {
                    // x2/y2 are the retained parts
                    let (x1, x2) = split(&xa, xmask);
                    let (y1, y2) = split(&ya, ymask);
                    if x2.atoms().len() == xa.len() && y2.atoms().len() == ya.len() {
                        continue; // the identity split
                    }
                    if x2.is_empty() || y2.is_empty() {
                        continue;
                    }
                    let ess = rel.ess_incomparable(&x1, &y1)
                        && rel.ess_incomparable(&x1, &y2)
                        && rel.ess_incomparable(&x2, &y1);
                    let inner_key = memo_key(&x2, &y2);
                    let (inner, inner_trail) = self.run(&x2, &y2, depth + 1);
                    if ess {
                        self.merge(&mut trail, &inner_key, &inner_trail);
                        trail.push(format!(
                            "Lemma 5.8(ii): side factors essentially incomparable, I_SC{pair} = I_SC(({}, {}))",
                            x2.describe(),
                            y2.describe()
                        ));
                        lowers.push(inner.lower);
                        upper = upper.intersect(&inner.upper);
                    } else if inner.lower != IdealZ::trivial() {
                        self.merge(&mut trail, &inner_key, &inner_trail);
                        trail.push(format!(
                            "Lemma 5.8(i): I_SC(({}, {})) within I_SC{pair}",
                            x2.describe(),
                            y2.describe()
                        ));
                        lowers.push(inner.lower);
                    }
                }
            }
        }

        // merge the certified lower ideals: additive closure is only
        // available behind the complemented-square gate, otherwise the best
        // single ideal is kept (the union need not be an ideal)
        let additive = rel.has_complemented_square(x) || rel.has_complemented_square(y);
        let mut lower = IdealZ::trivial();
        if additive {
            for l in &lowers {
                lower = lower.sum(l);
            }
            if lowers.iter().filter(|l| **l != IdealZ::trivial()).count() > 1 {
                trail.push(format!(
                    "Prop 5.4 via Remark 5.6: complemented square available, lower bounds add to {lower}"
                ));
            }
        } else {
            for l in &lowers {
                if *l == IdealZ::trivial() {
                    continue;
                }
                if lower == IdealZ::trivial() || l.generator() < lower.generator() {
                    lower = *l;
                }
            }
        }
        // a certified member set can never exceed the certified superset
        if !lower.is_subset(&upper) {
            // bounds crossed: the declared facts are inconsistent; keep the
            // provable intersection and leave a trace
            trail.push(format!(
                "warning: declared facts for {pair} give lower {lower} outside upper {upper}"
            ));
            lower = lower.intersect(&upper);
        }
        let out = IscBounds {
            lower,
            upper,
            exact: lower == upper,
        };
        self.memo.insert(key, (out, trail.clone()));
        (out, trail)
    }
}

fn canonical(d: &SpaceDesc) -> SpaceDesc {
    match d.atoms().as_slice() {
        [one] => SpaceDesc::atom(one),
        many => SpaceDesc::Sum(many.iter().map(|a| SpaceDesc::atom(a)).collect()),
    }
}

fn submasks(n: usize) -> impl Iterator<Item = usize> {
    0..(1usize << n)
}

fn split(atoms: &[&str], keep_mask: usize) -> (SpaceDesc, SpaceDesc) {
    let mut kept = Vec::new();
    let mut rest = Vec::new();
    for (i, a) in atoms.iter().enumerate() {
        if keep_mask & (1 << i) != 0 {
            kept.push(SpaceDesc::atom(a));
        } else {
            rest.push(SpaceDesc::atom(a));
        }
    }
    (SpaceDesc::Sum(rest), SpaceDesc::Sum(kept))
}

/// The coupling index extracted from the bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScIndex {
    /// Bounds closed: `sc` is the generator of the coupling-index ideal.
    Exact(u64),
    /// Open gap: `sc` is at most `at_most` (when known nonzero realizable)
    /// and is a multiple of `multiple_of`.
    Unknown {
        at_most: Option<u64>,
        multiple_of: u64,
    },
}

/// `sc(X,Y)`: the smallest positive coupling index, or 0 when there is none.
pub fn sc_index(x: &SpaceDesc, y: &SpaceDesc, rel: &RelationTable) -> (ScIndex, Trail) {
    let (b, mut trail) = isc_bounds(x, y, rel);
    let out = if b.exact {
        trail.push(format!(
            "Eq. (1.8): sc = min of I_SC intersect N with I_SC = {}",
            b.lower
        ));
        ScIndex::Exact(b.lower.generator())
    } else {
        ScIndex::Unknown {
            at_most: (b.lower.generator() > 0).then_some(b.lower.generator()),
            multiple_of: b.upper.generator(),
        }
    };
    (out, trail)
}

/// Per-index verdict on whether the two equivalences coincide.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// Both sets are nonempty and equal.
    EqualNonempty,
    /// Both sets are empty (no Fredholm operators of this index on one side).
    EqualEmpty,
    /// Extension-equivalent pairs exist but none of them are coupled.
    StrictlyContained,
    /// The declared facts do not decide the question.
    Unknown,
}

impl core::fmt::Display for Verdict {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let s = match self {
            Verdict::EqualNonempty => "EqualNonempty",
            Verdict::EqualEmpty => "EqualEmpty",
            Verdict::StrictlyContained => "StrictlyContained",
            Verdict::Unknown => "Unknown",
        };
        write!(f, "{s}")
    }
}

/// Decides whether the coupled pairs of index `k` coincide with the
/// extension-equivalent pairs of index `k`.
pub fn verdict(
    x: &SpaceDesc,
    y: &SpaceDesc,
    rel: &RelationTable,
    k: i64,
) -> (Verdict, Trail) {
    let (b, mut trail) = isc_bounds(x, y, rel);
    let eae = eae_index(x, y, rel, &mut trail);
    let v = if k == 0 {
        trail.push(String::from(
            "Eq. (1.6): SC_0 = EAE_0 unconditionally, witnessed by the identity pair",
        ));
        Verdict::EqualNonempty
    } else if b.lower.contains(k) {
        trail.push(format!(
            "Thm 1.5(ii): {k} in the certified coupling set {}, so SC_{k} = EAE_{k} nonempty",
            b.lower
        ));
        Verdict::EqualNonempty
    } else if !eae.upper.contains(k) {
        trail.push(format!(
            "Thm 1.5(iii) with Prop 3.1: {k} outside the eae ideal {}, both sets empty",
            eae.upper
        ));
        Verdict::EqualEmpty
    } else if eae.lower.contains(k) && !b.upper.contains(k) {
        trail.push(format!(
            "Thm 1.5(ii): EAE_{k} nonempty ({k} in {}), no coupling ({k} outside {})",
            eae.lower, b.upper
        ));
        Verdict::StrictlyContained
    } else {
        trail.push(format!(
            "Question 5.10 gap: {k} between certified bounds [{}, {}]",
            b.lower, b.upper
        ));
        Verdict::Unknown
    };
    (v, trail)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::desc::Relation;

    fn gm_l2(k: u64) -> (SpaceDesc, SpaceDesc, RelationTable) {
        let mut t = RelationTable::new();
        t.add_atom("gm", IphiDecl::Exact(k), false);
        t.add_atom("l2", IphiDecl::Exact(1), true);
        t.declare("gm", "l2", Relation::TotallyIncomparable);
        (SpaceDesc::atom("gm"), SpaceDesc::atom("l2"), t)
    }

    #[test]
    fn iphi_examples() {
        let mut t = RelationTable::new();
        t.add_atom("gm6", IphiDecl::Exact(6), false);
        t.add_atom("gm4", IphiDecl::Exact(4), false);
        t.add_atom("lp", IphiDecl::Exact(1), true);
        t.add_atom("lq", IphiDecl::Exact(1), true);
        t.declare("gm4", "gm6", Relation::EssentiallyIncomparable);
        let mut trail = Trail::new();

        let b = iphi_of(&SpaceDesc::atom("gm6"), &t, &mut trail);
        assert_eq!(b, Bounds::exactly(6));

        let sum = SpaceDesc::sum([SpaceDesc::atom("gm4"), SpaceDesc::atom("gm6")]);
        let b = iphi_of(&sum, &t, &mut trail);
        assert_eq!(b, Bounds::exactly(2));

        // no declared relation: lower = upper = Z anyway because 1 absorbs
        let sum = SpaceDesc::sum([SpaceDesc::atom("lp"), SpaceDesc::atom("lq")]);
        let b = iphi_of(&sum, &t, &mut trail);
        assert_eq!(b.lower, IdealZ::full());
        assert_eq!(b.upper, IdealZ::full());
    }

    #[test]
    fn eae_examples() {
        let (x, y, t) = gm_l2(4);
        let mut trail = Trail::new();
        let b = eae_index(&x, &y, &t, &mut trail);
        assert_eq!(b, Bounds::exactly(4));

        // identical classical space: eae = 1
        let mut t = RelationTable::new();
        t.add_atom("l2", IphiDecl::Exact(1), true);
        let b = eae_index(
            &SpaceDesc::atom("l2"),
            &SpaceDesc::atom("l2"),
            &t,
            &mut Trail::new(),
        );
        assert_eq!(b, Bounds::exactly(1));

        // a finite-dimensional (iphi {0}) side forces eae = 0
        let mut t = RelationTable::new();
        t.add_atom("fin", IphiDecl::Exact(0), false);
        t.add_atom("l2", IphiDecl::Exact(1), true);
        let b = eae_index(
            &SpaceDesc::atom("fin"),
            &SpaceDesc::atom("l2"),
            &t,
            &mut Trail::new(),
        );
        assert_eq!(b, Bounds::exactly(0));
    }

    #[test]
    fn isc_examples() {
        // essentially incomparable: exactly {0}
        let (x, y, t) = gm_l2(3);
        let (b, _) = isc_bounds(&x, &y, &t);
        assert!(b.exact);
        assert_eq!(b.lower, IdealZ::trivial());

        // X = Y = l2: exactly Z
        let mut t = RelationTable::new();
        t.add_atom("l2", IphiDecl::Exact(1), true);
        let l2 = SpaceDesc::atom("l2");
        let (b, _) = isc_bounds(&l2, &l2, &t);
        assert!(b.exact);
        assert_eq!(b.lower, IdealZ::full());
    }

    #[test]
    fn additive_closure_gate() {
        // two witness ideals 4Z and 6Z; without the square flag the lower
        // bound stays 4Z, with it the bounds add to 2Z
        let mut t = RelationTable::new();
        t.add_atom("a4", IphiDecl::Exact(4), false);
        t.add_atom("a6", IphiDecl::Exact(6), false);
        t.add_atom("b4", IphiDecl::Unknown, false);
        t.add_atom("b6", IphiDecl::Unknown, false);
        t.declare("a4", "a6", Relation::TotallyIncomparable);
        t.declare("a4", "b6", Relation::TotallyIncomparable);
        t.declare("a6", "b4", Relation::TotallyIncomparable);
        t.declare("b4", "b6", Relation::TotallyIncomparable);
        t.declare_sc_witness("a4", "b4", 4, "declared");
        t.declare_sc_witness("a6", "b6", 6, "declared");
        let x = SpaceDesc::sum([SpaceDesc::atom("a4"), SpaceDesc::atom("a6")]);
        let y = SpaceDesc::sum([SpaceDesc::atom("b4"), SpaceDesc::atom("b6")]);
        let (b, _) = isc_bounds(&x, &y, &t);
        assert_eq!(b.lower, IdealZ::new(4));
        assert!(!b.exact);

        let mut t2 = t.clone();
        t2.add_atom("a4", IphiDecl::Exact(4), true);
        t2.add_atom("a6", IphiDecl::Exact(6), true);
        let (b2, _) = isc_bounds(&x, &y, &t2);
        assert_eq!(b2.lower, IdealZ::new(2));
    }

    #[test]
    fn monotonicity_under_new_facts() {
        // adding a relation tightens (or keeps) the bounds
        let mut t = RelationTable::new();
        t.add_atom("gm", IphiDecl::Exact(2), false);
        t.add_atom("l2", IphiDecl::Exact(1), true);
        let x = SpaceDesc::atom("gm");
        let y = SpaceDesc::atom("l2");
        let (before, _) = isc_bounds(&x, &y, &t);
        t.declare("gm", "l2", Relation::TotallyIncomparable);
        let (after, _) = isc_bounds(&x, &y, &t);
        // more knowledge: upper shrinks (or stays), lower grows (or stays)
        assert!(after.upper.is_subset(&before.upper));
        assert!(before.lower.is_subset(&after.lower));
    }

    #[test]
    fn verdict_examples() {
        // lp vs lq, k = 3: strictly contained
        let mut t = RelationTable::new();
        t.add_atom("lp", IphiDecl::Exact(1), true);
        t.add_atom("lq", IphiDecl::Exact(1), true);
        t.declare("lp", "lq", Relation::TotallyIncomparable);
        let (v, _) = verdict(&SpaceDesc::atom("lp"), &SpaceDesc::atom("lq"), &t, 3);
        assert_eq!(v, Verdict::StrictlyContained);
        // k = 0 is always shared
        let (v, _) = verdict(&SpaceDesc::atom("lp"), &SpaceDesc::atom("lq"), &t, 0);
        assert_eq!(v, Verdict::EqualNonempty);

        // gm(2) vs l2 at k = 3: nothing there at all
        let (x, y, t) = gm_l2(2);
        let (v, _) = verdict(&x, &y, &t, 3);
        assert_eq!(v, Verdict::EqualEmpty);

        // unknown when the gap is genuine: same atoms, no declared relation
        let mut t = RelationTable::new();
        t.add_atom("p", IphiDecl::Exact(1), false);
        t.add_atom("q", IphiDecl::Exact(1), false);
        let (v, _) = verdict(&SpaceDesc::atom("p"), &SpaceDesc::atom("q"), &t, 2);
        assert_eq!(v, Verdict::Unknown);
    }
}
