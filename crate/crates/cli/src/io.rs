//! Input loading: JSON files to core types, with the file path in every
//! error message.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use curvetrace_core::dehn::{validate_dehn, DehnParameter};
use curvetrace_core::graph::PantsGraph;
use curvetrace_core::moduli::{Angles, Twists};

use crate::Failure;

fn parse<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> Result<T, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::input(format!("{what} file {}: {e}", path.display())))
}

/// Parses a graph without judging it; `PantsGraph::new` restores the id
/// ordering the rest of the crate assumes.
pub fn load_graph(path: &Path) -> Result<PantsGraph, Failure> {
    let g: PantsGraph = parse(path, "graph")?;
    Ok(PantsGraph::new(g.vertices, g.edges))
}

/// Loads a graph and refuses malformed ones, naming every violation.
pub fn load_valid_graph(path: &Path) -> Result<PantsGraph, Failure> {
    let g = load_graph(path)?;
    let violations = g.validate();
    if violations.is_empty() {
        return Ok(g);
    }
    let list: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
    Err(Failure::input(format!(
        "graph {} is malformed: {}",
        path.display(),
        list.join("; ")
    )))
}

/// Parses a Dehn parameter file without checking it against a graph.
pub fn load_dehn_raw(path: &Path) -> Result<DehnParameter, Failure> {
    parse(path, "dehn parameter")
}

/// Loads a Dehn parameter and refuses inadmissible ones.
pub fn load_dehn(path: &Path, g: &PantsGraph) -> Result<DehnParameter, Failure> {
    let d = load_dehn_raw(path)?;
    let violations = validate_dehn(g, &d);
    if violations.is_empty() {
        return Ok(d);
    }
    let list: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
    Err(Failure::input(format!(
        "dehn parameter {} is inadmissible: {}",
        path.display(),
        list.join("; ")
    )))
}

pub fn load_angles(path: &Path) -> Result<Angles, Failure> {
    parse::<BTreeMap<usize, f64>>(path, "angle")
}

pub fn load_twists(path: &Path) -> Result<Twists, Failure> {
    parse::<BTreeMap<usize, f64>>(path, "twist")
}
