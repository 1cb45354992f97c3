//! JSON documents plus DOT and edge-list export.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arrays::Decomposition;
use crate::lift::StarFactor;
use crate::params::{Star, Vertex};
use crate::verify::{verify_urd, Violation};

pub const FORMAT_VERSION: u32 = 1;

/// On-disk form of a decomposition. Keys serialize in declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct DecompositionDocument {
    pub format_version: u32,
    pub v: u32,
    pub n: u32,
    pub s: u32,
    pub one_factor: Vec<[Vertex; 2]>,
    pub star_classes: Vec<Vec<Star>>,
}

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported formatVersion {0}, expected {FORMAT_VERSION}")]
    Version(u32),
    #[error("field s = {declared} but starClasses has {found} entries")]
    ClassCount { declared: u32, found: usize },
    #[error("document is not a valid decomposition: {0}")]
    Invalid(Violation),
}

impl From<&Decomposition> for DecompositionDocument {
    fn from(d: &Decomposition) -> Self {
        Self {
            format_version: FORMAT_VERSION,
            v: d.v,
            n: d.n,
            s: d.star_classes.len() as u32,
            one_factor: d.one_factor.iter().map(|&(u, x)| [u, x]).collect(),
            star_classes: d.star_classes.iter().map(|c| c.stars.clone()).collect(),
        }
    }
}

impl From<DecompositionDocument> for Decomposition {
    fn from(doc: DecompositionDocument) -> Self {
        let v = doc.v;
        Decomposition {
            v,
            n: doc.n,
            one_factor: doc.one_factor.into_iter().map(|[u, x]| (u, x)).collect(),
            star_classes: doc
                .star_classes
                .into_iter()
                .map(|stars| StarFactor { v, stars })
                .collect(),
        }
    }
}

pub fn to_json(d: &Decomposition) -> String {
    let mut out = serde_json::to_string_pretty(&DecompositionDocument::from(d))
        .expect("documents always serialize");
    out.push('\n');
    out
}

/// Parse a document; unless `skip_verify` is set, also require that it is a
/// valid decomposition.
pub fn from_json(text: &str, skip_verify: bool) -> Result<Decomposition, DocumentError> {
    let doc: DecompositionDocument =
        serde_json::from_str(text).map_err(|e| DocumentError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
    if doc.format_version != FORMAT_VERSION {
        return Err(DocumentError::Version(doc.format_version));
    }
    if doc.s as usize != doc.star_classes.len() {
        return Err(DocumentError::ClassCount {
            declared: doc.s,
            found: doc.star_classes.len(),
        });
    }
    let d = Decomposition::from(doc);
    if !skip_verify {
        if let Some(v) = verify_urd(&d).violations.into_iter().next() {
            return Err(DocumentError::Invalid(v));
        }
    }
    Ok(d)
}

/// Undirected multigraph with one cluster per class; cluster 0 is the
/// 1-factor.
pub fn to_dot(d: &Decomposition) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "graph urd_v{}_n{} {{", d.v, d.n);
    let _ = writeln!(out, "  subgraph cluster_0 {{\n    label=\"1-factor\";");
    for &(u, x) in &d.one_factor {
        let _ = writeln!(out, "    {u} -- {x};");
    }
    out.push_str("  }\n");
    for (i, class) in d.star_classes.iter().enumerate() {
        let _ = writeln!(
            out,
            "  subgraph cluster_{} {{\n    label=\"class {}\";",
            i + 1,
            i + 1
        );
        for star in &class.stars {
            for (c, l) in star.edges() {
                let _ = writeln!(out, "    {c} -- {l};");
            }
        }
        out.push_str("  }\n");
    }
    out.push_str("}\n");
    out
}

/// One `u x class` line per edge; class 0 is the 1-factor.
pub fn to_edge_list(d: &Decomposition) -> String {
    let mut out = String::new();
    for &(u, x) in &d.one_factor {
        let _ = writeln!(out, "{u} {x} 0");
    }
    for (i, class) in d.star_classes.iter().enumerate() {
        for star in &class.stars {
            for (c, l) in star.edges() {
                let _ = writeln!(out, "{c} {l} {}", i + 1);
            }
        }
    }
    out
}
