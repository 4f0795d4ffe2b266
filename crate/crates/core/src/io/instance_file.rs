//! The versioned TOML instance format.
//!
//! ```toml
//! [meta]
//! name = "ring"
//! version = 1
//!
//! [[nodes]]
//! id = "n1"
//! lsr_candidate = true
//! lsr_install_cost = 10
//!
//! [[links]]
//! a = "n1"
//! b = "n2"
//! fixed_cost = 4
//! module_size = 10
//! module_cost = 3
//! max_modules = 2
//!
//! [[demands]]
//! id = "d1"
//! source = "n1"
//! sinks = ["n2"]
//! bandwidth = 4
//!
//! [policy]
//! k_paths = 2
//! logical_edges = { rule = "full-mesh" }
//!
//! [solver]
//! mode = "ls"
//! ```

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::optimizer::SolverConfig;
use crate::scalar::Scalar;
use crate::synthesis::{CandidatePolicy, Demand, Instance, InstanceError, TransportLink, TransportNode};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Meta {
    name: String,
    version: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound(deserialize = "C: Deserialize<'de>"))]
struct InstanceFile<C> {
    meta: Meta,
    nodes: Vec<TransportNode<C>>,
    #[serde(default)]
    links: Vec<TransportLink<C>>,
    #[serde(default)]
    demands: Vec<Demand>,
    #[serde(default)]
    policy: CandidatePolicy,
    #[serde(default)]
    solver: SolverConfig,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("not UTF-8: {0}")]
    Encoding(String),
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("meta.version: unsupported version {0} (expected {FORMAT_VERSION})")]
    Version(u32),
    #[error(transparent)]
    Invalid(#[from] InstanceError),
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

/// Parses and validates an instance document.
pub fn parse_instance<C: Scalar + DeserializeOwned>(bytes: &[u8]) -> Result<Instance<C>, ParseError> {
    let text = std::str::from_utf8(bytes).map_err(|e| ParseError::Encoding(e.to_string()))?;
    let file: InstanceFile<C> = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((0, 0), |s| line_col(text, s.start));
        ParseError::Syntax { line, column, message: e.message().trim().replace('\n', " ") }
    })?;
    if file.meta.version != FORMAT_VERSION {
        return Err(ParseError::Version(file.meta.version));
    }
    let instance = Instance {
        name: file.meta.name,
        transport_nodes: file.nodes,
        transport_links: file.links,
        demands: file.demands,
        policy: file.policy,
        solver: file.solver,
    };
    instance.validate()?;
    Ok(instance)
}

pub fn serialize_instance<C: Scalar + Serialize>(instance: &Instance<C>) -> String {
    let file = InstanceFile {
        meta: Meta { name: instance.name.clone(), version: FORMAT_VERSION },
        nodes: instance.transport_nodes.clone(),
        links: instance.transport_links.clone(),
        demands: instance.demands.clone(),
        policy: instance.policy,
        solver: instance.solver.clone(),
    };
    toml::to_string(&file).expect("instance serializes to TOML")
}
