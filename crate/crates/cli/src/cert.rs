//! The certificate file: a tree family in plain JSON.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use aqpack::construct::{CaseTag, SteinerTree, TreeFamily};
use aqpack::topology::{AugmentedCube, Edge, Vertex};

pub const SCHEMA_VERSION: &str = "1";
pub const TOOL_ID: &str = "aqpack";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateDoc {
    pub schema_version: String,
    pub n: u32,
    pub s: Vec<String>,
    pub case: String,
    pub fallback_used: bool,
    pub trees: Vec<TreeDoc>,
    pub tool: ToolDoc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeDoc {
    pub edges: Vec<[String; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToolDoc {
    pub id: String,
    pub version: String,
}

impl ToolDoc {
    pub fn current() -> Self {
        ToolDoc { id: TOOL_ID.into(), version: env!("CARGO_PKG_VERSION").into() }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CertError {
    #[error("malformed certificate: {0}")]
    Json(String),
    #[error("unsupported schema_version {0:?} (expected \"1\")")]
    Version(String),
    #[error("bad dimension {0}")]
    Dimension(u32),
    #[error("vertex {label:?} is not a {n}-bit binary string")]
    Label { label: String, n: u32 },
    #[error("certificate names {0} terminals, expected 3")]
    TerminalCount(usize),
    #[error("unknown case tag {0:?}")]
    Case(String),
}

impl CertificateDoc {
    pub fn from_family(family: &TreeFamily) -> Self {
        CertificateDoc {
            schema_version: SCHEMA_VERSION.into(),
            n: family.dim,
            s: family.terminals.iter().map(Vertex::to_string).collect(),
            case: family.case().map_or_else(String::new, |t| t.name().to_string()),
            fallback_used: family.fallback_used,
            trees: family
                .trees
                .iter()
                .map(|t| TreeDoc {
                    edges: t
                        .edges
                        .iter()
                        .map(|e| {
                            let (a, b) = e.endpoints();
                            [a.to_string(), b.to_string()]
                        })
                        .collect(),
                })
                .collect(),
            tool: ToolDoc::current(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    pub fn parse(text: &str) -> Result<Self, CertError> {
        let doc: CertificateDoc = serde_json::from_str(text).map_err(|e| CertError::Json(e.to_string()))?;
        if doc.schema_version != SCHEMA_VERSION {
            return Err(CertError::Version(doc.schema_version));
        }
        Ok(doc)
    }

    /// The family the certificate describes. Structural problems (bad
    /// labels, wrong terminal count) are errors; graph-theoretic ones are
    /// left to the verifier.
    pub fn to_family(&self) -> Result<(AugmentedCube, TreeFamily), CertError> {
        let cube = AugmentedCube::new(self.n).map_err(|_| CertError::Dimension(self.n))?;
        let vertex = |label: &str| -> Result<Vertex, CertError> {
            let bad = || CertError::Label { label: label.into(), n: self.n };
            let v: Vertex = label.parse().map_err(|_| bad())?;
            if v.dim() != self.n {
                return Err(bad());
            }
            Ok(v)
        };
        if !self.case.is_empty() {
            self.case.parse::<CaseTag>().map_err(|_| CertError::Case(self.case.clone()))?;
        }
        let terminals: Vec<Vertex> = self.s.iter().map(|l| vertex(l)).collect::<Result<_, _>>()?;
        let terminals: [Vertex; 3] =
            terminals.try_into().map_err(|t: Vec<Vertex>| CertError::TerminalCount(t.len()))?;
        let mut trees = Vec::with_capacity(self.trees.len());
        for t in &self.trees {
            let edges = t
                .edges
                .iter()
                .map(|[a, b]| Ok(Edge::new(vertex(a)?, vertex(b)?)))
                .collect::<Result<Vec<_>, CertError>>()?;
            trees.push(SteinerTree { terminals, edges });
        }
        let mut family = TreeFamily::from_trees(self.n, terminals, trees);
        family.fallback_used = self.fallback_used;
        Ok((cube, family))
    }
}
