//! Error type shared by all core operations.

use crate::graph::EdgeId;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("angles violate the moment polytope at trinion {trinion}")]
    OutsideDelta { trinion: usize },

    #[error("edge {edge} has central holonomy (angle 0 or pi); torus action undefined")]
    CentralHolonomy { edge: EdgeId },

    #[error("representation point is not in the interior of the moment polytope")]
    NotInterior,

    #[error("no interior point found after {draws} rejection draws (margin {margin})")]
    EmptyInterior { draws: u64, margin: f64 },

    #[error("twist undefined on edge {edge}: m = 0")]
    TwistUndefined { edge: EdgeId },

    #[error("edge {edge} does not exist in the graph")]
    UnknownEdge { edge: EdgeId },

    #[error("no angle given for edge {edge}")]
    MissingAngle { edge: EdgeId },

    #[error("angle {value} on edge {edge} outside [0, pi]")]
    AngleOutOfRange { edge: EdgeId, value: f64 },

    #[error("object was built for a different graph")]
    GraphMismatch,

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid Dehn parameter: {0}")]
    InvalidDehn(String),

    #[error("word references generator {index} but only {count} are assigned")]
    UnassignedGenerator { index: usize, count: usize },

    #[error("phi(0, {l}, _) undefined for negative twist count")]
    NegativeCoreCount { l: i64 },

    #[error("evaluation matrix would have {requested} columns, above the cap of {cap}; pass an explicit override to proceed")]
    TooManyColumns { requested: usize, cap: usize },

    #[error("grid size {given} for edge {edge} is below the exactness bound {needed}")]
    GridTooSmall { edge: EdgeId, given: usize, needed: usize },

    #[error("invalid arc: {0}")]
    InvalidArc(String),

    #[error("independence verdict differs across seeds; sample size too small to trust")]
    UnstableVerdict,

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
