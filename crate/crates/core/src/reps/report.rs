//! Unitarity reports: JSON records and the plain-text table.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{KmxError, Result};
use crate::scalar::Scalar;
use crate::verma::{FormContext, GramBlock, Mode, Verdict};

/// Normalization note embedded in every report.
pub const CONVENTIONS: &str = "Cartan matrix A_jk = alpha_k(h_j); invariant form normalized so that \
long roots have (alpha, alpha) = 2 (not the Killing form); level Lambda(c) = sum_i a_i^v Lambda(h_i) \
with comarks a^v; H(v, v) = 1, H linear in the first slot, H(x u, w) = H(u, omega(x) w); \
psd verdicts hold up to the stated depth (and degree window), indefinite verdicts are final.";

/// Matrices larger than this print as dimensions only in text tables.
pub const TEXT_MATRIX_LIMIT: usize = 12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContextSummary {
    pub algebra: String,
    pub functional: String,
    pub mode: Mode,
    pub omega: String,
    pub parameters: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockRecord {
    pub drop: Vec<i64>,
    pub degree: Option<i64>,
    pub window: Option<i64>,
    pub dim: usize,
    pub words: Vec<String>,
    pub matrix: Vec<Vec<Scalar>>,
    pub verdict: Verdict,
    pub exact: bool,
    pub kernel: Vec<Vec<Scalar>>,
}

impl BlockRecord {
    pub fn from_block(ctx: &FormContext, b: &GramBlock) -> BlockRecord {
        BlockRecord {
            drop: b.drop.clone(),
            degree: b.degree,
            window: b.window,
            dim: b.dim(),
            words: b.words.iter().map(|w| ctx.word_name(w)).collect(),
            matrix: b.matrix.clone(),
            verdict: b.verdict.clone(),
            exact: b.exact,
            kernel: b.kernel.clone(),
        }
    }

    pub fn to_json_string(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| KmxError::Internal(e.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status")]
pub enum Overall {
    UnitaryUpToDepth { depth: i64 },
    NonUnitary { drop: Vec<i64>, window: Option<i64>, witness: Vec<Scalar>, value: Scalar },
    Inconclusive { reason: String },
}

impl Overall {
    pub fn label(&self) -> String {
        match self {
            Overall::UnitaryUpToDepth { depth } => format!("UnitaryUpToDepth({depth})"),
            Overall::NonUnitary { drop, .. } => format!("NonUnitary(drop {drop:?})"),
            Overall::Inconclusive { reason } => format!("Inconclusive({reason})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyResult {
    pub samples: usize,
    pub passed: bool,
    pub counterexample: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnitarityReport {
    pub context: ContextSummary,
    pub depth: i64,
    pub window: Option<i64>,
    pub overall: Overall,
    pub exact: bool,
    pub consistency: Option<ConsistencyResult>,
    pub conventions: String,
    pub blocks: Vec<BlockRecord>,
}

fn fmt_row(r: &[Scalar]) -> String {
    let cells: Vec<String> = r.iter().map(|v| v.to_string()).collect();
    format!("[{}]", cells.join(", "))
}

pub fn block_text(b: &BlockRecord, out: &mut String) {
    let label = match (b.degree, b.window) {
        (Some(d), _) => format!("degree {d}"),
        (None, Some(m)) => format!("window {m}"),
        (None, None) => String::new(),
    };
    let _ = writeln!(
        out,
        "drop {:?}  {label}  dim {}  {}{}",
        b.drop,
        b.dim,
        b.verdict.label(),
        if b.exact { "" } else { "  (approximate)" }
    );
    if b.dim <= TEXT_MATRIX_LIMIT {
        for (w, row) in b.words.iter().zip(&b.matrix) {
            let _ = writeln!(out, "    {:<24} {}", w, fmt_row(row));
        }
    }
    if let Verdict::Indefinite { witness, value } = &b.verdict {
        let _ = writeln!(out, "    witness {} with x*Hx = {value}", fmt_row(witness));
    }
}

impl UnitarityReport {
    pub fn to_json_string(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| KmxError::Internal(e.to_string()))
    }

    pub fn from_json_str(s: &str) -> Result<UnitarityReport> {
        serde_json::from_str(s).map_err(|e| KmxError::Parse(e.to_string()))
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let c = &self.context;
        let _ = writeln!(out, "algebra     {}", c.algebra);
        let _ = writeln!(out, "functional  {} ({:?}, omega {})", c.functional, c.mode, c.omega);
        for (k, v) in &c.parameters {
            let _ = writeln!(out, "  {k} = {v}");
        }
        let _ = write!(out, "depth       {}", self.depth);
        if let Some(m) = self.window {
            let _ = write!(out, ", window {m}");
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "overall     {}", self.overall.label());
        let _ = writeln!(out, "exact       {}", self.exact);
        if let Some(r) = &self.consistency {
            let status = if r.passed { "passed" } else { "FAILED" };
            let _ = writeln!(out, "consistency {status} on {} samples", r.samples);
            if let Some(u) = &r.counterexample {
                let _ = writeln!(out, "  u = {u}");
            }
        }
        let _ = writeln!(out);
        for b in &self.blocks {
            block_text(b, &mut out);
        }
        out
    }
}
