//! Report structure and emission.
//!
//! One report per scenario. The JSON form is deterministic byte for byte:
//! all collections are ordered, and no timestamps or environment data are
//! recorded.

use serde::Serialize;
use std::io::Write;

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub name: String,
    pub kind: String,
    pub inputs: Vec<KeyValue>,
    pub computed: Vec<Computed>,
    pub verdicts: Vec<VerdictLine>,
    pub rule_trail: Vec<String>,
    pub expectations: Vec<ExpectationLine>,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct KeyValue {
    pub key: String,
    pub value: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Computed {
    pub name: String,
    pub value: String,
    /// `"exact"` or `"non-certified"` (numeric backend).
    pub certainty: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerdictLine {
    pub pair: String,
    pub k: i64,
    pub verdict: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExpectationLine {
    pub claim: String,
    pub expected: String,
    pub got: String,
    pub pass: bool,
    pub citation: String,
}

impl Report {
    pub fn new(name: &str, kind: &str) -> Report {
        Report {
            name: name.to_string(),
            kind: kind.to_string(),
            inputs: Vec::new(),
            computed: Vec::new(),
            verdicts: Vec::new(),
            rule_trail: Vec::new(),
            expectations: Vec::new(),
            pass: true,
        }
    }

    pub fn input(&mut self, key: &str, value: impl Into<String>) {
        self.inputs.push(KeyValue {
            key: key.to_string(),
            value: value.into(),
        });
    }

    pub fn computed(&mut self, name: impl Into<String>, value: impl Into<String>, exact: bool) {
        self.computed.push(Computed {
            name: name.into(),
            value: value.into(),
            certainty: if exact { "exact" } else { "non-certified" }.to_string(),
        });
    }

    pub fn expectation(
        &mut self,
        claim: impl Into<String>,
        expected: impl Into<String>,
        got: impl Into<String>,
        citation: impl Into<String>,
    ) {
        let expected = expected.into();
        let got = got.into();
        let pass = expected == got;
        if !pass {
            self.pass = false;
        }
        self.expectations.push(ExpectationLine {
            claim: claim.into(),
            expected,
            got,
            pass,
            citation: citation.into(),
        });
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }

    /// Human-readable rendering.
    pub fn render_text(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(out, "=== {} ({}) ===", self.name, self.kind)?;
        for kv in &self.inputs {
            writeln!(out, "  {}: {}", kv.key, kv.value)?;
        }
        if !self.computed.is_empty() {
            writeln!(out, "computed:")?;
            for c in &self.computed {
                writeln!(out, "  {} = {}  [{}]", c.name, c.value, c.certainty)?;
            }
        }
        if !self.verdicts.is_empty() {
            writeln!(out, "verdicts:")?;
            for v in &self.verdicts {
                writeln!(out, "  {} at k = {}: {}", v.pair, v.k, v.verdict)?;
            }
        }
        if !self.rule_trail.is_empty() {
            writeln!(out, "rule trail:")?;
            for line in &self.rule_trail {
                writeln!(out, "  - {line}")?;
            }
        }
        if !self.expectations.is_empty() {
            writeln!(out, "expectations:")?;
            for e in &self.expectations {
                let mark = if e.pass { "ok" } else { "FAIL" };
                let cite = if e.citation.is_empty() {
                    String::new()
                } else {
                    format!("  [{}]", e.citation)
                };
                writeln!(
                    out,
                    "  [{mark}] {}: expected {}, got {}{cite}",
                    e.claim, e.expected, e.got
                )?;
            }
        }
        writeln!(out, "result: {}", if self.pass { "PASS" } else { "FAIL" })?;
        Ok(())
    }
}

/// Serializes a batch of reports as one JSON document.
pub fn batch_json(reports: &[Report]) -> String {
    if reports.len() == 1 {
        reports[0].to_json()
    } else {
        serde_json::to_string_pretty(reports).expect("report serialization")
    }
}
