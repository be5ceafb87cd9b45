//! Scenario file schema and validation.

use std::collections::BTreeMap;

use serde::Deserialize;
use thiserror::Error;

use schurlab_core::block::{BlockOp, Entry, SparseMap};
use schurlab_core::mat::Mat;
use schurlab_core::seqop::{Correction, SeqOp};
use schurlab_core::shape::{Factor, SpaceShape};
use schurlab_core::spaces::{IphiDecl, Relation, RelationTable, SpaceDesc};
use schurlab_core::symbol::LaurentSymbol;
use schurlab_core::Scalar;

#[derive(Debug, Error)]
pub enum SchemaError {
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("schema: {0}")]
    Invalid(String),
}

fn invalid(msg: impl Into<String>) -> SchemaError {
    SchemaError::Invalid(msg.into())
}

/// Top-level scenario file.
#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ScenarioFile {
    Space(SpaceFile),
    Operator(OperatorFile),
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<ScenarioFile, SchemaError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn name(&self) -> &str {
        match self {
            ScenarioFile::Space(s) => &s.name,
            ScenarioFile::Operator(o) => &o.name,
        }
    }
}

// ---------------------------------------------------------------------------
// space scenarios

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceFile {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub atoms: Vec<AtomDecl>,
    #[serde(default)]
    pub relations: Vec<(String, String, String)>,
    #[serde(default)]
    pub complemented: Vec<(String, DescExpr)>,
    #[serde(default)]
    pub sc_witnesses: Vec<(String, String, u64, String)>,
    pub pairs: Vec<(DescExpr, DescExpr)>,
    #[serde(default)]
    pub ks: Vec<i64>,
    #[serde(default)]
    pub expectations: Vec<ExpectationDecl>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomDecl {
    pub name: String,
    /// Exact generator, or the string "unknown".
    pub iphi: serde_json::Value,
    #[serde(default)]
    pub flags: Vec<String>,
}

/// Descriptor expression: an atom name or a list of atom names (a sum).
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum DescExpr {
    Atom(String),
    Sum(Vec<String>),
}

impl DescExpr {
    pub fn to_desc(&self) -> SpaceDesc {
        match self {
            DescExpr::Atom(a) => SpaceDesc::atom(a),
            DescExpr::Sum(parts) => {
                SpaceDesc::sum(parts.iter().map(|a| SpaceDesc::atom(a)))
            }
        }
    }

    fn atom_names(&self) -> Vec<&str> {
        match self {
            DescExpr::Atom(a) => vec![a.as_str()],
            DescExpr::Sum(p) => p.iter().map(|s| s.as_str()).collect(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectationDecl {
    pub claim: String,
    #[serde(default)]
    pub k: Option<i64>,
    pub expected: serde_json::Value,
    #[serde(default)]
    pub citation: String,
}

/// A validated space scenario ready for evaluation.
pub struct SpaceRun {
    pub name: String,
    pub description: String,
    pub table: RelationTable,
    pub pairs: Vec<(SpaceDesc, SpaceDesc)>,
    pub ks: Vec<i64>,
    pub expectations: Vec<ExpectationDecl>,
}

impl SpaceFile {
    pub fn validate(&self) -> Result<SpaceRun, SchemaError> {
        let mut table = RelationTable::new();
        for a in &self.atoms {
            let iphi = match &a.iphi {
                serde_json::Value::Number(n) => {
                    let g = n
                        .as_u64()
                        .ok_or_else(|| invalid(format!("atom {}: iphi must be a nonnegative integer", a.name)))?;
                    IphiDecl::Exact(g)
                }
                serde_json::Value::String(s) if s == "unknown" => IphiDecl::Unknown,
                other => {
                    return Err(invalid(format!(
                        "atom {}: iphi must be an integer or \"unknown\", got {other}",
                        a.name
                    )))
                }
            };
            let mut square = false;
            for f in &a.flags {
                match f.as_str() {
                    "complemented-square" => square = true,
                    other => return Err(invalid(format!("atom {}: unknown flag {other}", a.name))),
                }
            }
            table.add_atom(&a.name, iphi, square);
        }
        let known = |n: &str| table.atom(n).is_some();
        for (a, b, r) in &self.relations {
            if !known(a) || !known(b) {
                return Err(invalid(format!("relation references undeclared atom: {a}, {b}")));
            }
            let rel = match r.as_str() {
                "totally-incomparable" => Relation::TotallyIncomparable,
                "essentially-incomparable" => Relation::EssentiallyIncomparable,
                "projectively-incomparable" => Relation::ProjectivelyIncomparable,
                "isomorphic" => Relation::Isomorphic,
                "unknown" => Relation::Unknown,
                other => return Err(invalid(format!("unknown relation kind {other}"))),
            };
            table.declare(a, b, rel);
        }
        for (a, d) in &self.complemented {
            if !known(a) || d.atom_names().iter().any(|n| !known(n)) {
                return Err(invalid("complemented fact references undeclared atom"));
            }
            table.declare_complemented(a, d.to_desc());
        }
        for (a, b, k, cite) in &self.sc_witnesses {
            if !known(a) || !known(b) {
                return Err(invalid("witness fact references undeclared atom"));
            }
            table.declare_sc_witness(a, b, *k, cite);
        }
        let mut pairs = Vec::new();
        for (x, y) in &self.pairs {
            for n in x.atom_names().iter().chain(y.atom_names().iter()) {
                if !known(n) {
                    return Err(invalid(format!("pair references undeclared atom {n}")));
                }
            }
            pairs.push((x.to_desc(), y.to_desc()));
        }
        if pairs.is_empty() {
            return Err(invalid("a space scenario needs at least one pair"));
        }
        let ks = if self.ks.is_empty() {
            (-3..=3).collect()
        } else {
            self.ks.clone()
        };
        for e in &self.expectations {
            match e.claim.as_str() {
                "eae" | "sc" | "isc" => {}
                "verdict" => {
                    if e.k.is_none() {
                        return Err(invalid("verdict expectation needs a k"));
                    }
                }
                other => return Err(invalid(format!("unknown claim {other}"))),
            }
        }
        Ok(SpaceRun {
            name: self.name.clone(),
            description: self.description.clone(),
            table,
            pairs,
            ks,
            expectations: self.expectations.clone(),
        })
    }
}

// ---------------------------------------------------------------------------
// operator scenarios

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorFile {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub shapes: BTreeMap<String, Vec<FactorExpr>>,
    #[serde(default)]
    pub operators: BTreeMap<String, OperatorDecl>,
    pub program: Vec<StepDecl>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum FactorExpr {
    /// `"seq"`.
    Seq(String),
    /// `{"fin": n}`.
    Fin(BTreeMap<String, usize>),
}

impl FactorExpr {
    fn to_factor(&self) -> Result<Factor, SchemaError> {
        match self {
            FactorExpr::Seq(s) if s == "seq" => Ok(Factor::Seq),
            FactorExpr::Seq(s) => Err(invalid(format!("unknown factor {s}"))),
            FactorExpr::Fin(m) => match m.get("fin") {
                Some(&n) if m.len() == 1 => Ok(Factor::Fin(n)),
                _ => Err(invalid("finite factor must be {\"fin\": n}")),
            },
        }
    }
}

pub fn parse_shape(factors: &[FactorExpr]) -> Result<SpaceShape, SchemaError> {
    Ok(SpaceShape::new(
        factors
            .iter()
            .map(|f| f.to_factor())
            .collect::<Result<_, _>>()?,
    ))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorDecl {
    pub domain: String,
    pub codomain: String,
    /// Grid of entries, row-major over (codomain factor, domain factor).
    pub blocks: Vec<Vec<EntryDecl>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryDecl {
    /// Sequence cell: list of `[offset, "p/q"]`.
    #[serde(default)]
    pub symbol: Option<Vec<(i64, String)>>,
    /// Sequence cell correction: list of `[row, col, "p/q"]`.
    #[serde(default)]
    pub correction: Option<Vec<(usize, usize, String)>>,
    /// Finite cell: dense matrix of rational strings.
    #[serde(default)]
    pub matrix: Option<Vec<Vec<String>>>,
    /// Mixed cell: sparse `[row, col, "p/q"]` triples.
    #[serde(default)]
    pub map: Option<Vec<(usize, usize, String)>>,
}

fn rat(s: &str) -> Result<Scalar, SchemaError> {
    schurlab_core::scalar::parse(s).map_err(invalid)
}

impl OperatorDecl {
    pub fn build(
        &self,
        shapes: &BTreeMap<String, SpaceShape>,
    ) -> Result<BlockOp, SchemaError> {
        let dom = shapes
            .get(&self.domain)
            .ok_or_else(|| invalid(format!("unknown shape {}", self.domain)))?
            .clone();
        let cod = shapes
            .get(&self.codomain)
            .ok_or_else(|| invalid(format!("unknown shape {}", self.codomain)))?
            .clone();
        if self.blocks.len() != cod.len() || self.blocks.iter().any(|r| r.len() != dom.len()) {
            return Err(invalid(format!(
                "block grid must be {} x {}",
                cod.len(),
                dom.len()
            )));
        }
        let mut op = BlockOp::zero(dom.clone(), cod.clone());
        for (i, row) in self.blocks.iter().enumerate() {
            for (j, cell) in row.iter().enumerate() {
                let entry = cell.build(&cod.factors()[i], &dom.factors()[j])?;
                op.set_entry(i, j, entry)
                    .map_err(|e| invalid(format!("cell ({i},{j}): {e}")))?;
            }
        }
        Ok(op)
    }
}

impl EntryDecl {
    fn build(&self, cod: &Factor, dom: &Factor) -> Result<Entry, SchemaError> {
        match (cod, dom) {
            (Factor::Seq, Factor::Seq) => {
                if self.matrix.is_some() || self.map.is_some() {
                    return Err(invalid("sequence cell takes symbol/correction only"));
                }
                let mut symbol = LaurentSymbol::zero();
                if let Some(coeffs) = &self.symbol {
                    let mut parsed = Vec::new();
                    for (d, c) in coeffs {
                        parsed.push((*d, rat(c)?));
                    }
                    symbol = LaurentSymbol::from_coeffs(parsed);
                }
                let mut corr = Correction::zero();
                if let Some(entries) = &self.correction {
                    for (r, c, v) in entries {
                        if *r == 0 || *c == 0 {
                            return Err(invalid("correction indices are 1-based"));
                        }
                        corr.add_entry(*r, *c, rat(v)?);
                    }
                }
                Ok(Entry::Seq(SeqOp::new(symbol, corr)))
            }
            (Factor::Fin(m), Factor::Fin(n)) => {
                let rows = self
                    .matrix
                    .as_ref()
                    .ok_or_else(|| invalid("finite cell needs a matrix"))?;
                if rows.len() != *m || rows.iter().any(|r| r.len() != *n) {
                    return Err(invalid(format!("matrix must be {m} x {n}")));
                }
                let mut mat = Mat::zero(*m, *n);
                for (i, row) in rows.iter().enumerate() {
                    for (j, v) in row.iter().enumerate() {
                        *mat.at_mut(i, j) = rat(v)?;
                    }
                }
                Ok(Entry::Fin(mat))
            }
            (codf, domf) => {
                let entries = self.map.as_ref().ok_or_else(|| {
                    invalid("mixed sequence/finite cell needs a sparse map")
                })?;
                let mut s = SparseMap::zero();
                for (r, c, v) in entries {
                    if *r == 0 || *c == 0 {
                        return Err(invalid("map indices are 1-based"));
                    }
                    s.add_entry(*r, *c, rat(v)?);
                }
                match (codf, domf) {
                    (Factor::Fin(_), Factor::Seq) => Ok(Entry::SeqToFin(s)),
                    (Factor::Seq, Factor::Fin(_)) => Ok(Entry::FinToSeq(s)),
                    _ => unreachable!(),
                }
            }
        }
    }
}

/// One program step: an operation with named arguments, an optional binding
/// and an optional expected value.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepDecl {
    pub op: String,
    #[serde(default, rename = "let")]
    pub bind: Option<String>,
    #[serde(default)]
    pub arg: Option<String>,
    #[serde(default)]
    pub u: Option<String>,
    #[serde(default)]
    pub v: Option<String>,
    #[serde(default)]
    pub r: Option<String>,
    #[serde(default)]
    pub witness: Option<String>,
    #[serde(default)]
    pub couple: Option<String>,
    #[serde(default)]
    pub extension: Option<String>,
    #[serde(default)]
    pub z: Option<Vec<FactorExpr>>,
    #[serde(default)]
    pub m: Option<i64>,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub vector: Option<Vec<Vec<String>>>,
    #[serde(default)]
    pub expect: Option<serde_json::Value>,
    #[serde(default)]
    pub citation: String,
}
