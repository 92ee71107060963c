//! Pants decompositions as decorated graphs.
//!
//! A compact surface with negative Euler characteristic is cut along disjoint
//! circles into trinions (three-holed spheres). We record the combinatorics as
//! a graph: one trivalent vertex per trinion, one univalent vertex per
//! boundary component of the surface, and one edge per gluing annulus. Each
//! edge end names the vertex slot it occupies; trinions have slots 1..3,
//! boundary vertices only slot 1. Loop edges (both ends on the same trinion)
//! are allowed. The `reversed` flag selects between the two admissible
//! gluings of an annulus boundary, identity or complex conjugation of the
//! circle parameter.

use serde::{Deserialize, Serialize};
use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BTreeSet};
use std::hash::{Hash, Hasher};

use crate::error::{Error, Result};

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VertexKind {
    Trinion,
    Boundary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vertex {
    pub id: VertexId,
    pub kind: VertexKind,
}

/// One attachment point of an annulus: a vertex together with the slot taken.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeEnd {
    pub vertex: VertexId,
    pub slot: u8,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub id: EdgeId,
    pub end0: EdgeEnd,
    pub end1: EdgeEnd,
    #[serde(default)]
    pub reversed: bool,
}

impl Edge {
    pub fn ends(&self) -> [EdgeEnd; 2] {
        [self.end0, self.end1]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PantsGraph {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
}

/// A single failed well-formedness condition, reported as data so callers can
/// collect all of them instead of stopping at the first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GraphViolation {
    DuplicateVertexId(VertexId),
    DuplicateEdgeId(EdgeId),
    UnknownVertex { edge: EdgeId, vertex: VertexId },
    BadSlot { edge: EdgeId, vertex: VertexId, slot: u8 },
    SlotUnfilled { vertex: VertexId, slot: u8 },
    SlotOverfilled { vertex: VertexId, slot: u8 },
    NoTrinion,
}

impl std::fmt::Display for GraphViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GraphViolation::DuplicateVertexId(v) => write!(f, "duplicate vertex id {v}"),
            GraphViolation::DuplicateEdgeId(e) => write!(f, "duplicate edge id {e}"),
            GraphViolation::UnknownVertex { edge, vertex } => {
                write!(f, "edge {edge} references unknown vertex {vertex}")
            }
            GraphViolation::BadSlot { edge, vertex, slot } => {
                write!(f, "edge {edge} uses invalid slot {slot} at vertex {vertex}")
            }
            GraphViolation::SlotUnfilled { vertex, slot } => {
                write!(f, "slot ({vertex},{slot}) unfilled")
            }
            GraphViolation::SlotOverfilled { vertex, slot } => {
                write!(f, "two edges claim slot ({vertex},{slot})")
            }
            GraphViolation::NoTrinion => {
                write!(f, "graph has no trinion, so the Euler characteristic is not negative")
            }
        }
    }
}

impl PantsGraph {
    pub fn new(vertices: Vec<Vertex>, edges: Vec<Edge>) -> Self {
        let mut g = PantsGraph { vertices, edges };
        g.vertices.sort_by_key(|v| v.id);
        g.edges.sort_by_key(|e| e.id);
        g
    }

    pub fn vertex(&self, id: VertexId) -> Option<&Vertex> {
        self.vertices.iter().find(|v| v.id == id)
    }

    pub fn edge(&self, id: EdgeId) -> Result<&Edge> {
        self.edges
            .iter()
            .find(|e| e.id == id)
            .ok_or(Error::UnknownEdge { edge: id })
    }

    pub fn trinions(&self) -> impl Iterator<Item = &Vertex> {
        self.vertices.iter().filter(|v| v.kind == VertexKind::Trinion)
    }

    /// Number of trinions; the glued surface has Euler characteristic minus this.
    pub fn trinion_count(&self) -> usize {
        self.trinions().count()
    }

    /// An edge is external when it touches a boundary vertex; multicurves stay
    /// away from the boundary, so external edges never carry strands.
    pub fn is_external(&self, id: EdgeId) -> Result<bool> {
        let e = self.edge(id)?;
        Ok(e.ends().iter().any(|end| {
            self.vertex(end.vertex)
                .map(|v| v.kind == VertexKind::Boundary)
                .unwrap_or(false)
        }))
    }

    /// Ids of internal edges in ascending order. This ordering fixes the
    /// coordinate order of the twist torus everywhere downstream.
    pub fn internal_edges(&self) -> Vec<EdgeId> {
        self.edges
            .iter()
            .filter(|e| !self.is_external(e.id).unwrap_or(false))
            .map(|e| e.id)
            .collect()
    }

    pub fn edge_ids(&self) -> Vec<EdgeId> {
        self.edges.iter().map(|e| e.id).collect()
    }

    /// The edge end occupying (vertex, slot), with which side of the edge it is.
    pub fn end_at(&self, vertex: VertexId, slot: u8) -> Option<(EdgeId, u8)> {
        for e in &self.edges {
            if e.end0.vertex == vertex && e.end0.slot == slot {
                return Some((e.id, 0));
            }
            if e.end1.vertex == vertex && e.end1.slot == slot {
                return Some((e.id, 1));
            }
        }
        None
    }

    pub fn validate(&self) -> Vec<GraphViolation> {
        let mut out = Vec::new();
        let mut vids = BTreeSet::new();
        for v in &self.vertices {
            if !vids.insert(v.id) {
                out.push(GraphViolation::DuplicateVertexId(v.id));
            }
        }
        let mut eids = BTreeSet::new();
        let mut fill: BTreeMap<(VertexId, u8), usize> = BTreeMap::new();
        for e in &self.edges {
            if !eids.insert(e.id) {
                out.push(GraphViolation::DuplicateEdgeId(e.id));
            }
            for end in e.ends() {
                match self.vertex(end.vertex) {
                    None => out.push(GraphViolation::UnknownVertex {
                        edge: e.id,
                        vertex: end.vertex,
                    }),
                    Some(v) => {
                        let ok = match v.kind {
                            VertexKind::Trinion => (1..=3).contains(&end.slot),
                            VertexKind::Boundary => end.slot == 1,
                        };
                        if ok {
                            *fill.entry((end.vertex, end.slot)).or_insert(0) += 1;
                        } else {
                            out.push(GraphViolation::BadSlot {
                                edge: e.id,
                                vertex: end.vertex,
                                slot: end.slot,
                            });
                        }
                    }
                }
            }
        }
        for v in &self.vertices {
            let slots: &[u8] = match v.kind {
                VertexKind::Trinion => &[1, 2, 3],
                VertexKind::Boundary => &[1],
            };
            for &s in slots {
                match fill.get(&(v.id, s)).copied().unwrap_or(0) {
                    0 => out.push(GraphViolation::SlotUnfilled { vertex: v.id, slot: s }),
                    1 => {}
                    _ => out.push(GraphViolation::SlotOverfilled { vertex: v.id, slot: s }),
                }
            }
        }
        if self.trinion_count() == 0 {
            out.push(GraphViolation::NoTrinion);
        }
        out
    }

    pub fn require_valid(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidGraph(
                v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; "),
            ))
        }
    }

    /// Structural fingerprint used to detect objects built for another graph.
    pub fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        for v in &self.vertices {
            (v.id, v.kind == VertexKind::Trinion).hash(&mut h);
        }
        for e in &self.edges {
            (e.id, e.end0.vertex, e.end0.slot, e.end1.vertex, e.end1.slot, e.reversed)
                .hash(&mut h);
        }
        h.finish()
    }

    /// One trinion; slots 1 and 2 glued to each other by a loop edge, slot 3
    /// open. The glued surface is a torus with one boundary circle.
    pub fn one_holed_torus() -> Self {
        PantsGraph::new(
            vec![
                Vertex { id: 0, kind: VertexKind::Trinion },
                Vertex { id: 1, kind: VertexKind::Boundary },
            ],
            vec![
                Edge {
                    id: 0,
                    end0: EdgeEnd { vertex: 0, slot: 1 },
                    end1: EdgeEnd { vertex: 0, slot: 2 },
                    reversed: false,
                },
                Edge {
                    id: 1,
                    end0: EdgeEnd { vertex: 0, slot: 3 },
                    end1: EdgeEnd { vertex: 1, slot: 1 },
                    reversed: false,
                },
            ],
        )
    }

    /// Two trinions glued along one annulus (slot 3 to slot 3), four open
    /// boundary circles.
    pub fn four_holed_sphere() -> Self {
        let mut vertices = vec![
            Vertex { id: 0, kind: VertexKind::Trinion },
            Vertex { id: 1, kind: VertexKind::Trinion },
        ];
        for id in 2..6 {
            vertices.push(Vertex { id, kind: VertexKind::Boundary });
        }
        PantsGraph::new(
            vertices,
            vec![
                Edge {
                    id: 0,
                    end0: EdgeEnd { vertex: 0, slot: 3 },
                    end1: EdgeEnd { vertex: 1, slot: 3 },
                    reversed: false,
                },
                Edge {
                    id: 1,
                    end0: EdgeEnd { vertex: 0, slot: 1 },
                    end1: EdgeEnd { vertex: 2, slot: 1 },
                    reversed: false,
                },
                Edge {
                    id: 2,
                    end0: EdgeEnd { vertex: 0, slot: 2 },
                    end1: EdgeEnd { vertex: 3, slot: 1 },
                    reversed: false,
                },
                Edge {
                    id: 3,
                    end0: EdgeEnd { vertex: 1, slot: 1 },
                    end1: EdgeEnd { vertex: 4, slot: 1 },
                    reversed: false,
                },
                Edge {
                    id: 4,
                    end0: EdgeEnd { vertex: 1, slot: 2 },
                    end1: EdgeEnd { vertex: 5, slot: 1 },
                    reversed: false,
                },
            ],
        )
    }

    /// Closed genus-2 surface: two trinions glued along all three slots,
    /// slot i to slot i.
    pub fn genus_two() -> Self {
        PantsGraph::new(
            vec![
                Vertex { id: 0, kind: VertexKind::Trinion },
                Vertex { id: 1, kind: VertexKind::Trinion },
            ],
            (0..3)
                .map(|i| Edge {
                    id: i,
                    end0: EdgeEnd { vertex: 0, slot: (i + 1) as u8 },
                    end1: EdgeEnd { vertex: 1, slot: (i + 1) as u8 },
                    reversed: false,
                })
                .collect(),
        )
    }

    /// Closed genus-2 surface cut along a separating system: two one-holed
    /// tori joined by a central annulus. Edges 0 and 2 share no trinion,
    /// which makes this the smallest example with a disjoint edge pair.
    pub fn genus_two_separating() -> Self {
        PantsGraph::new(
            vec![
                Vertex { id: 0, kind: VertexKind::Trinion },
                Vertex { id: 1, kind: VertexKind::Trinion },
            ],
            vec![
                Edge {
                    id: 0,
                    end0: EdgeEnd { vertex: 0, slot: 1 },
                    end1: EdgeEnd { vertex: 0, slot: 2 },
                    reversed: false,
                },
                Edge {
                    id: 1,
                    end0: EdgeEnd { vertex: 0, slot: 3 },
                    end1: EdgeEnd { vertex: 1, slot: 3 },
                    reversed: false,
                },
                Edge {
                    id: 2,
                    end0: EdgeEnd { vertex: 1, slot: 1 },
                    end1: EdgeEnd { vertex: 1, slot: 2 },
                    reversed: false,
                },
            ],
        )
    }
}
