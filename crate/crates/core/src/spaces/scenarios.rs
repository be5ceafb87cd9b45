//! The built-in scenario library.
//!
//! Each scenario fixes a pair of space descriptors, the declared fact table,
//! the indices to examine, and the expected outputs with their citations.
//! The exotic ingredients — shift spaces with a prescribed index ideal, the
//! hyperplane space with no nontrivial Fredholm indices, subspaces carrying a
//! declared coupling witness — enter purely as axioms here.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::desc::{IphiDecl, Relation, RelationTable, SpaceDesc};
use super::rules::Verdict;

/// An expected output with its citation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expectation {
    pub claim: Claim,
    pub citation: String,
}

/// The checkable claims a scenario can carry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Claim {
    /// `eae(X,Y)` equals this generator, exactly.
    Eae(u64),
    /// `sc(X,Y)` equals this generator, exactly.
    Sc(u64),
    /// The coupling-index set is exactly this ideal.
    IscGenerator(u64),
    /// The verdict at index `k`.
    VerdictAt(i64, Verdict),
}

/// A space-calculus scenario: a descriptor pair over a fact table.
#[derive(Debug, Clone)]
pub struct SpaceScenario {
    pub name: String,
    pub description: String,
    pub table: RelationTable,
    pub x: SpaceDesc,
    pub y: SpaceDesc,
    pub ks: Vec<i64>,
    pub expectations: Vec<Expectation>,
}

fn expect(claim: Claim, citation: &str) -> Expectation {
    Expectation {
        claim,
        citation: citation.to_string(),
    }
}

fn default_ks() -> Vec<i64> {
    (-3..=3).collect()
}

/// Classical sequence space: hyperplane-isomorphic, unconditional basis,
/// complemented square.
fn classical(t: &mut RelationTable, name: &str) {
    t.add_atom(name, IphiDecl::Exact(1), true);
}

/// Shift space with index ideal `kZ`: indecomposable, no complemented square.
fn shift_space(t: &mut RelationTable, name: &str, k: u64) {
    t.add_atom(name, IphiDecl::Exact(k), false);
}

/// Subspace atom with undeclared index ideal.
fn opaque_subspace(t: &mut RelationTable, name: &str) {
    t.add_atom(name, IphiDecl::Unknown, false);
}

fn lp_lq() -> SpaceScenario {
    let mut t = RelationTable::new();
    classical(&mut t, "lp");
    classical(&mut t, "lq");
    t.declare("lp", "lq", Relation::TotallyIncomparable);
    let mut expectations = vec![
        expect(Claim::Eae(1), "Thm 1.2(ii)"),
        expect(Claim::Sc(0), "Thm 1.7(i)"),
        expect(Claim::IscGenerator(0), "Thm 1.7(i)"),
        expect(Claim::VerdictAt(0, Verdict::EqualNonempty), "Eq. (1.6)"),
    ];
    for k in default_ks() {
        if k != 0 {
            expectations.push(expect(
                Claim::VerdictAt(k, Verdict::StrictlyContained),
                "Thm 1.2(ii)",
            ));
        }
    }
    SpaceScenario {
        name: String::from("lp-lq"),
        description: String::from(
            "totally incomparable classical sequence spaces: extension equivalence everywhere, coupling only at index 0",
        ),
        table: t,
        x: SpaceDesc::atom("lp"),
        y: SpaceDesc::atom("lq"),
        ks: default_ks(),
        expectations,
    }
}

fn gm_vs_l2(k0: u64) -> SpaceScenario {
    let mut t = RelationTable::new();
    shift_space(&mut t, "gm", k0);
    classical(&mut t, "l2");
    t.declare("gm", "l2", Relation::TotallyIncomparable);
    SpaceScenario {
        name: format!("gm-vs-l2({k0})"),
        description: format!(
            "shift space with index ideal {k0}Z against a classical space: eae = {k0}, sc = 0"
        ),
        table: t,
        x: SpaceDesc::atom("gm"),
        y: SpaceDesc::atom("l2"),
        ks: default_ks(),
        expectations: vec![
            expect(Claim::Eae(k0), "Thm 1.7(ii)"),
            expect(Claim::Sc(0), "Thm 1.7(i)"),
            expect(Claim::IscGenerator(0), "Thm 1.7(i)"),
        ],
    }
}

/// Shared exotic core of the projective-incomparability scenarios: the shift
/// space `gm` with ideal `k0 Z` and its opaque subspace `y2` carrying a
/// declared coupling witness at `k0`.
fn gm_with_witness(t: &mut RelationTable, k0: u64) {
    shift_space(t, "gm", k0);
    opaque_subspace(t, "y2");
    t.declare_sc_witness("gm", "y2", k0, "Lemma 6.2(ii)");
}

fn improj_equal(k0: u64) -> SpaceScenario {
    let mut t = RelationTable::new();
    gm_with_witness(&mut t, k0);
    classical(&mut t, "l2");
    t.declare("gm", "l2", Relation::TotallyIncomparable);
    t.declare("y2", "l2", Relation::Unknown);
    SpaceScenario {
        name: format!("improj-equal({k0})"),
        description: format!(
            "projectively incomparable pair with sc = eae = {k0}: shift space against a classical space united with the witness subspace"
        ),
        table: t,
        x: SpaceDesc::atom("gm"),
        y: SpaceDesc::sum([SpaceDesc::atom("l2"), SpaceDesc::atom("y2")]),
        ks: default_ks(),
        expectations: vec![
            expect(Claim::Eae(k0), "Thm 1.9(i)"),
            expect(Claim::Sc(k0), "Thm 1.9(i)"),
            expect(Claim::IscGenerator(k0), "Thm 1.9(i)"),
        ],
    }
}

fn improj_k0(k0: u64) -> SpaceScenario {
    let mut t = RelationTable::new();
    gm_with_witness(&mut t, k0);
    classical(&mut t, "lp");
    classical(&mut t, "lq");
    t.declare("lp", "lq", Relation::TotallyIncomparable);
    t.declare("lp", "gm", Relation::TotallyIncomparable);
    t.declare("lp", "y2", Relation::TotallyIncomparable);
    t.declare("lq", "gm", Relation::TotallyIncomparable);
    SpaceScenario {
        name: if k0 == 3 {
            String::from("improj-k0")
        } else {
            format!("improj-k0({k0})")
        },
        description: format!(
            "projectively incomparable pair with eae = 1 but coupling ideal {k0}Z"
        ),
        table: t,
        x: SpaceDesc::sum([SpaceDesc::atom("lp"), SpaceDesc::atom("gm")]),
        y: SpaceDesc::sum([SpaceDesc::atom("lq"), SpaceDesc::atom("y2")]),
        ks: default_ks(),
        expectations: vec![
            expect(Claim::Eae(1), "Thm 1.9(ii)"),
            expect(Claim::IscGenerator(k0), "Thm 1.9(ii)"),
            expect(Claim::Sc(k0), "Thm 1.9(ii)"),
        ],
    }
}

fn united_i(k0: u64) -> SpaceScenario {
    let mut t = RelationTable::new();
    gm_with_witness(&mut t, k0);
    classical(&mut t, "c0");
    t.add_atom("xg", IphiDecl::Exact(0), false); // hyperplane-rigid space
    t.declare("gm", "c0", Relation::TotallyIncomparable);
    t.declare("gm", "xg", Relation::TotallyIncomparable);
    t.declare("c0", "xg", Relation::TotallyIncomparable);
    t.declare("y2", "xg", Relation::TotallyIncomparable);
    t.declare("y2", "c0", Relation::Unknown);
    SpaceScenario {
        name: format!("united-i({k0})"),
        description: format!(
            "common united factor: sc = eae = {k0} across a shared hyperplane-rigid summand"
        ),
        table: t,
        x: SpaceDesc::sum([SpaceDesc::atom("gm"), SpaceDesc::atom("xg")]),
        y: SpaceDesc::sum([
            SpaceDesc::atom("c0"),
            SpaceDesc::atom("y2"),
            SpaceDesc::atom("xg"),
        ]),
        ks: default_ks(),
        expectations: vec![
            expect(Claim::Eae(k0), "Thm 1.11(i)"),
            expect(Claim::Sc(k0), "Thm 1.11(i)"),
            expect(Claim::IscGenerator(k0), "Thm 1.11(i)"),
        ],
    }
}

fn united_ii(k0: u64) -> SpaceScenario {
    let mut t = RelationTable::new();
    gm_with_witness(&mut t, k0);
    classical(&mut t, "l1");
    classical(&mut t, "c0");
    t.add_atom("xg", IphiDecl::Exact(0), false);
    t.declare("l1", "c0", Relation::TotallyIncomparable);
    t.declare("l1", "gm", Relation::TotallyIncomparable);
    t.declare("l1", "y2", Relation::TotallyIncomparable);
    t.declare("l1", "xg", Relation::TotallyIncomparable);
    t.declare("gm", "c0", Relation::TotallyIncomparable);
    t.declare("gm", "xg", Relation::TotallyIncomparable);
    t.declare("c0", "xg", Relation::TotallyIncomparable);
    t.declare("y2", "xg", Relation::TotallyIncomparable);
    t.declare("y2", "c0", Relation::Unknown);
    SpaceScenario {
        name: format!("united-ii({k0})"),
        description: format!(
            "united variant with eae = 1 and coupling ideal {k0}Z through the shared rigid summand"
        ),
        table: t,
        x: SpaceDesc::sum([
            SpaceDesc::atom("l1"),
            SpaceDesc::atom("gm"),
            SpaceDesc::atom("xg"),
        ]),
        y: SpaceDesc::sum([
            SpaceDesc::atom("c0"),
            SpaceDesc::atom("y2"),
            SpaceDesc::atom("xg"),
        ]),
        ks: default_ks(),
        expectations: vec![
            expect(Claim::Eae(1), "Thm 1.11(ii)"),
            expect(Claim::IscGenerator(k0), "Thm 1.11(ii)"),
            expect(Claim::Sc(k0), "Thm 1.11(ii)"),
        ],
    }
}

fn beyond_proj() -> SpaceScenario {
    let mut t = RelationTable::new();
    classical(&mut t, "lp");
    classical(&mut t, "lq");
    shift_space(&mut t, "gm3", 3);
    t.declare("lp", "lq", Relation::TotallyIncomparable);
    t.declare("lp", "gm3", Relation::TotallyIncomparable);
    t.declare("lq", "gm3", Relation::TotallyIncomparable);
    SpaceScenario {
        name: String::from("beyond-proj"),
        description: String::from(
            "shared complemented factor with ideal 3Z: sc equals the eae index of the common part",
        ),
        table: t,
        x: SpaceDesc::sum([SpaceDesc::atom("lp"), SpaceDesc::atom("gm3")]),
        y: SpaceDesc::sum([SpaceDesc::atom("lq"), SpaceDesc::atom("gm3")]),
        ks: default_ks(),
        expectations: vec![
            expect(Claim::Eae(1), "Prop 1.10"),
            expect(Claim::Sc(3), "Prop 1.10"),
            expect(Claim::IscGenerator(3), "Prop 1.10"),
            expect(Claim::VerdictAt(3, Verdict::EqualNonempty), "Prop 1.10"),
            expect(Claim::VerdictAt(1, Verdict::StrictlyContained), "Prop 1.10"),
        ],
    }
}

fn james_triple() -> SpaceScenario {
    let mut t = RelationTable::new();
    // quasi-reflexive James spaces: hyperplane-isomorphic but without
    // complemented squares
    t.add_atom("jp", IphiDecl::Exact(1), false);
    t.add_atom("jq", IphiDecl::Exact(1), false);
    t.declare("jp", "jq", Relation::EssentiallyIncomparable);
    SpaceScenario {
        name: String::from("james-triple"),
        description: String::from(
            "James-space triples: the coupling ideal is all of Z through the shared factor, with no additive-closure flag in sight",
        ),
        table: t,
        x: SpaceDesc::sum([
            SpaceDesc::atom("jp"),
            SpaceDesc::atom("jp"),
            SpaceDesc::atom("jq"),
        ]),
        y: SpaceDesc::sum([
            SpaceDesc::atom("jp"),
            SpaceDesc::atom("jq"),
            SpaceDesc::atom("jq"),
        ]),
        ks: default_ks(),
        expectations: vec![
            expect(Claim::Eae(1), "Ex. 5.9"),
            expect(Claim::IscGenerator(1), "Ex. 5.9"),
            expect(Claim::Sc(1), "Ex. 5.9"),
            expect(Claim::VerdictAt(2, Verdict::EqualNonempty), "Ex. 5.9"),
        ],
    }
}

fn gm_hyperplane() -> SpaceScenario {
    let mut t = RelationTable::new();
    t.add_atom("xg", IphiDecl::Exact(0), false);
    SpaceScenario {
        name: String::from("gm-hyperplane"),
        description: String::from(
            "hyperplane-rigid space against itself: only index 0 exists at all",
        ),
        table: t,
        x: SpaceDesc::atom("xg"),
        y: SpaceDesc::atom("xg"),
        ks: default_ks(),
        expectations: vec![
            expect(Claim::Eae(0), "Thm 6.3"),
            expect(Claim::Sc(0), "Thm 6.3"),
            expect(Claim::VerdictAt(0, Verdict::EqualNonempty), "Eq. (1.6)"),
            expect(Claim::VerdictAt(2, Verdict::EqualEmpty), "Thm 1.5(iii)"),
        ],
    }
}

/// Every built-in scenario, in a fixed order.
pub fn builtin_scenarios() -> Vec<SpaceScenario> {
    let mut out = vec![lp_lq()];
    for k0 in 0..=5 {
        out.push(gm_vs_l2(k0));
    }
    for k0 in 1..=5 {
        out.push(improj_equal(k0));
    }
    out.push(improj_k0(3));
    for k0 in 1..=5 {
        out.push(united_i(k0));
        out.push(united_ii(k0));
    }
    out.push(beyond_proj());
    out.push(james_triple());
    out.push(gm_hyperplane());
    out
}
