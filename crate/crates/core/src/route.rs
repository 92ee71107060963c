//! Concrete routing of a Dehn parameter into curve components.
//!
//! An admissible parameter determines one multicurve up to isotopy. We fix a
//! representative: inside each annulus, `m` disjoint strands where strand `i`
//! enters at point `i` on side 0 and leaves at point `(i + t) mod m` on side
//! 1, winding `floor((i + t) / m)` times around the core; inside each
//! trinion, the unique crossing-free pattern of arcs joining the boundary
//! points. Following strands and arcs around decomposes the curve into closed
//! components, each a cyclic alternation of annulus crossings and trinion
//! arcs. Edges with `m = 0` and `t > 0` contribute `t` standalone copies of
//! their core circle.
//!
//! Conventions (fixed once, used consistently by the holonomy evaluation):
//!
//! * Boundary points of a slot are indexed 0..m in increasing circle angle.
//! * Seen from inside a trinion, the three slots sit in the cyclic order
//!   1, 2, 3. Arc endpoints on a slot are grouped in blocks: first the family
//!   shared with the previous slot, then self-arc points, then the family
//!   shared with the next slot. Parallel families pair endpoints in reversed
//!   index order (innermost to innermost), self-arcs pair point `q` with the
//!   mirrored point, giving concentric nested loops around the lower-numbered
//!   other slot.
//! * A gluing identifies annulus-side indices with trinion point indices
//!   directly on side 0. On side 1 the identification reverses orientation,
//!   so plain gluings flip the index (`i -> m-1-i`) and `reversed` gluings,
//!   which conjugate the circle parameter, compose with a second flip and
//!   leave indices unchanged. This is what makes `(m, 0)` route to `m`
//!   parallel copies.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::dehn::{validate_dehn, DehnParameter};
use crate::error::{Error, Result};
use crate::graph::{EdgeId, PantsGraph, VertexId};

/// Arc family counts of one trinion, determined by the slot values (m1, m2, m3).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArcCounts {
    /// Parallel arcs between distinct slots: [1-2, 1-3, 2-3].
    pub between: [u64; 3],
    /// Self-arc family when one slot value exceeds the sum of the others.
    pub self_arcs: Option<SelfArcFamily>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelfArcFamily {
    /// Slot carrying both endpoints of every self-arc.
    pub slot: u8,
    /// Slot the nested self-arcs go around: the lower-numbered other slot.
    pub encircles: u8,
    pub count: u64,
}

impl ArcCounts {
    pub fn pair_count(&self, a: u8, b: u8) -> u64 {
        match (a.min(b), a.max(b)) {
            (1, 2) => self.between[0],
            (1, 3) => self.between[1],
            (2, 3) => self.between[2],
            _ => 0,
        }
    }

    fn self_count_at(&self, slot: u8) -> u64 {
        match self.self_arcs {
            Some(f) if f.slot == slot => f.count,
            _ => 0,
        }
    }
}

/// Slot values with even sum split uniquely into crossing-free arc families:
/// when the triangle inequalities hold, `x_ab = (m_a + m_b - m_c) / 2`;
/// when one slot dominates, everything else attaches to it and the excess
/// closes into self-arcs.
pub fn arc_counts(m: [u64; 3]) -> Result<ArcCounts> {
    let sum: u64 = m.iter().sum();
    if sum % 2 == 1 {
        return Err(Error::InvalidDehn(format!(
            "odd slot sum {sum} at a trinion"
        )));
    }
    if let Some(k) = (0..3).find(|&k| 2 * m[k] > sum) {
        let others: Vec<usize> = (0..3).filter(|&i| i != k).collect();
        let (i, j) = (others[0], others[1]);
        let mut between = [0u64; 3];
        set_pair(&mut between, k as u8 + 1, i as u8 + 1, m[i]);
        set_pair(&mut between, k as u8 + 1, j as u8 + 1, m[j]);
        Ok(ArcCounts {
            between,
            self_arcs: Some(SelfArcFamily {
                slot: k as u8 + 1,
                encircles: i as u8 + 1, // others is sorted, so i is the lower slot
                count: (2 * m[k] - sum) / 2,
            }),
        })
    } else {
        Ok(ArcCounts {
            between: [
                (m[0] + m[1] - m[2]) / 2,
                (m[0] + m[2] - m[1]) / 2,
                (m[1] + m[2] - m[0]) / 2,
            ],
            self_arcs: None,
        })
    }
}

fn set_pair(between: &mut [u64; 3], a: u8, b: u8, v: u64) {
    match (a.min(b), a.max(b)) {
        (1, 2) => between[0] = v,
        (1, 3) => between[1] = v,
        (2, 3) => between[2] = v,
        _ => unreachable!("distinct slots in 1..=3"),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ArcKind {
    /// Plain arc between two distinct slots; holonomy-trivial basepoint path.
    Between { slots: (u8, u8) },
    /// Arc leaving and re-entering the same slot around another one; its
    /// holonomy is the loop around the encircled slot.
    SelfArc { slot: u8, encircles: u8 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArcEndpoint {
    pub slot: u8,
    pub point: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrinionArc {
    pub kind: ArcKind,
    pub ends: [ArcEndpoint; 2],
}

/// Fully laid out arcs of one trinion plus the point-to-arc incidence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrinionArcPattern {
    pub slot_m: [u64; 3],
    pub counts: ArcCounts,
    pub arcs: Vec<TrinionArc>,
    /// per slot (index 0..3 for slots 1..=3): point -> (arc index, end 0|1)
    point_map: [Vec<(usize, u8)>; 3],
}

const NEXT_SLOT: [u8; 4] = [0, 2, 3, 1];
const PREV_SLOT: [u8; 4] = [0, 3, 1, 2];

impl TrinionArcPattern {
    pub fn build(slot_m: [u64; 3]) -> Result<Self> {
        let counts = arc_counts(slot_m)?;
        let mut arcs = Vec::new();
        let mut point_map: [Vec<(usize, u8)>; 3] = [
            vec![(usize::MAX, 0); slot_m[0] as usize],
            vec![(usize::MAX, 0); slot_m[1] as usize],
            vec![(usize::MAX, 0); slot_m[2] as usize],
        ];
        // block offsets within each slot: [to-prev][self][to-next]
        let off_self = |s: u8| counts.pair_count(s, PREV_SLOT[s as usize]);
        let off_next =
            |s: u8| off_self(s) + 2 * counts.self_count_at(s);
        // distinct-slot families walk the cyclic slot order
        for s in 1..=3u8 {
            let s2 = NEXT_SLOT[s as usize];
            let x = counts.pair_count(s, s2);
            for k in 0..x {
                let e0 = ArcEndpoint { slot: s, point: off_next(s) + k };
                let e1 = ArcEndpoint { slot: s2, point: x - 1 - k };
                let idx = arcs.len();
                arcs.push(TrinionArc {
                    kind: ArcKind::Between { slots: (s.min(s2), s.max(s2)) },
                    ends: [e0, e1],
                });
                point_map[s as usize - 1][e0.point as usize] = (idx, 0);
                point_map[s2 as usize - 1][e1.point as usize] = (idx, 1);
            }
        }
        if let Some(f) = counts.self_arcs {
            let base = off_self(f.slot);
            for q in 0..f.count {
                let e0 = ArcEndpoint { slot: f.slot, point: base + q };
                let e1 = ArcEndpoint { slot: f.slot, point: base + 2 * f.count - 1 - q };
                let idx = arcs.len();
                arcs.push(TrinionArc {
                    kind: ArcKind::SelfArc { slot: f.slot, encircles: f.encircles },
                    ends: [e0, e1],
                });
                point_map[f.slot as usize - 1][e0.point as usize] = (idx, 0);
                point_map[f.slot as usize - 1][e1.point as usize] = (idx, 1);
            }
        }
        debug_assert!(point_map
            .iter()
            .all(|pm| pm.iter().all(|&(a, _)| a != usize::MAX)));
        Ok(TrinionArcPattern { slot_m, counts, arcs, point_map })
    }

    pub fn arc_at(&self, slot: u8, point: u64) -> (usize, u8) {
        self.point_map[slot as usize - 1][point as usize]
    }
}

/// One traversal of an annulus by a strand.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossStep {
    pub edge: EdgeId,
    /// Strand label: its point on side 0.
    pub inlet: u64,
    /// Its point on side 1, `(inlet + t) mod m`.
    pub outlet: u64,
    /// Net turns around the core, `floor((inlet + t) / m)`.
    pub winding: i64,
    /// Direction of this traversal.
    pub from_side0: bool,
}

/// One traversal of a trinion arc.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArcStep {
    pub trinion: VertexId,
    pub kind: ArcKind,
    /// Index of the arc within its trinion's arc list.
    pub arc: usize,
    /// True when walked from `ends[0]` to `ends[1]`.
    pub forward: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Step {
    Cross(CrossStep),
    Arc(ArcStep),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Component {
    /// Closed chain of crossings and arcs, starting with its smallest
    /// crossing taken from side 0; steps alternate Cross, Arc, Cross, ...
    Strand(Vec<Step>),
    /// One parallel copy of an edge core (from m = 0, t > 0).
    Core { edge: EdgeId },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveRoute {
    pub graph_fingerprint: u64,
    pub components: Vec<Component>,
    pub patterns: BTreeMap<VertexId, TrinionArcPattern>,
    /// Crossing counts per edge; equals the Dehn `m` it was routed from.
    pub crossings: BTreeMap<EdgeId, u64>,
}

impl CurveRoute {
    pub fn crossing_count(&self, edge: EdgeId) -> u64 {
        self.crossings.get(&edge).copied().unwrap_or(0)
    }

    pub fn strand_component_count(&self) -> usize {
        self.components
            .iter()
            .filter(|c| matches!(c, Component::Strand(_)))
            .count()
    }

    pub fn core_component_count(&self) -> usize {
        self.components
            .iter()
            .filter(|c| matches!(c, Component::Core { .. }))
            .count()
    }

    /// Sum of windings over all crossings of the edge; equals the Dehn `t`
    /// when `m > 0`.
    pub fn winding_sum(&self, edge: EdgeId) -> i64 {
        self.components
            .iter()
            .map(|c| match c {
                Component::Strand(steps) => steps
                    .iter()
                    .map(|s| match s {
                        Step::Cross(x) if x.edge == edge => x.winding,
                        _ => 0,
                    })
                    .sum(),
                Component::Core { .. } => 0,
            })
            .sum()
    }
}

struct EdgeTable {
    m: u64,
    t: i64,
    ends: [(VertexId, u8); 2],
    reversed: bool,
}

impl EdgeTable {
    fn outlet(&self, inlet: u64) -> u64 {
        (inlet as i64 + self.t).rem_euclid(self.m as i64) as u64
    }

    fn inlet_of_outlet(&self, outlet: u64) -> u64 {
        (outlet as i64 - self.t).rem_euclid(self.m as i64) as u64
    }

    fn winding(&self, inlet: u64) -> i64 {
        (inlet as i64 + self.t).div_euclid(self.m as i64)
    }

    /// Annulus index on `side` -> point index on the attached slot.
    fn point_of_index(&self, side: u8, idx: u64) -> u64 {
        if side == 0 || self.reversed {
            idx
        } else {
            self.m - 1 - idx
        }
    }

    /// Inverse of `point_of_index`; the maps are involutions.
    fn index_of_point(&self, side: u8, point: u64) -> u64 {
        self.point_of_index(side, point)
    }
}

/// Route an admissible Dehn parameter into its curve components.
pub fn route(g: &PantsGraph, d: &DehnParameter) -> Result<CurveRoute> {
    g.require_valid()?;
    let violations = validate_dehn(g, d);
    if !violations.is_empty() {
        return Err(Error::InvalidDehn(
            violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "),
        ));
    }

    let mut patterns = BTreeMap::new();
    for v in g.trinions() {
        let mut slot_m = [0u64; 3];
        for slot in 1..=3u8 {
            let (e, _) = g.end_at(v.id, slot).expect("validated graph fills slots");
            slot_m[slot as usize - 1] = d.m(e);
        }
        patterns.insert(v.id, TrinionArcPattern::build(slot_m)?);
    }

    let mut tables: BTreeMap<EdgeId, EdgeTable> = BTreeMap::new();
    for e in &g.edges {
        tables.insert(
            e.id,
            EdgeTable {
                m: d.m(e.id),
                t: d.t(e.id),
                ends: [(e.end0.vertex, e.end0.slot), (e.end1.vertex, e.end1.slot)],
                reversed: e.reversed,
            },
        );
    }

    // slot -> edge end lookup
    let mut slot_to_end: BTreeMap<(VertexId, u8), (EdgeId, u8)> = BTreeMap::new();
    for v in g.trinions() {
        for slot in 1..=3u8 {
            slot_to_end.insert((v.id, slot), g.end_at(v.id, slot).unwrap());
        }
    }

    let mut components = Vec::new();
    let mut crossings: BTreeMap<EdgeId, u64> = BTreeMap::new();
    let mut visited: BTreeMap<EdgeId, Vec<bool>> = tables
        .iter()
        .map(|(&e, t)| (e, vec![false; t.m as usize]))
        .collect();

    for (&eid, table) in &tables {
        for start in 0..table.m {
            if visited[&eid][start as usize] {
                continue;
            }
            let mut steps = Vec::new();
            let mut cur_edge = eid;
            let mut cur_strand = start;
            let mut from_side0 = true;
            loop {
                visited.get_mut(&cur_edge).unwrap()[cur_strand as usize] = true;
                *crossings.entry(cur_edge).or_insert(0) += 1;
                let tab = &tables[&cur_edge];
                steps.push(Step::Cross(CrossStep {
                    edge: cur_edge,
                    inlet: cur_strand,
                    outlet: tab.outlet(cur_strand),
                    winding: tab.winding(cur_strand),
                    from_side0,
                }));
                // arrive at a trinion boundary point
                let arr_side = if from_side0 { 1 } else { 0 };
                let arr_idx = if from_side0 { tab.outlet(cur_strand) } else { cur_strand };
                let (v, slot) = tab.ends[arr_side as usize];
                let point = tab.point_of_index(arr_side, arr_idx);
                let pat = &patterns[&v];
                let (arc_idx, entered_end) = pat.arc_at(slot, point);
                let arc = pat.arcs[arc_idx];
                let forward = entered_end == 0;
                steps.push(Step::Arc(ArcStep {
                    trinion: v,
                    kind: arc.kind,
                    arc: arc_idx,
                    forward,
                }));
                let exit = arc.ends[if forward { 1 } else { 0 }];
                // leave through the edge attached to the exit slot
                let (next_edge, next_side) = slot_to_end[&(v, exit.slot)];
                let next_tab = &tables[&next_edge];
                let next_idx = next_tab.index_of_point(next_side, exit.point);
                let (next_strand, next_from_side0) = if next_side == 0 {
                    (next_idx, true)
                } else {
                    (next_tab.inlet_of_outlet(next_idx), false)
                };
                if next_edge == eid && next_strand == start {
                    assert!(
                        next_from_side0,
                        "closed component must return in its starting direction"
                    );
                    break;
                }
                assert!(
                    !visited[&next_edge][next_strand as usize],
                    "strand visited twice; pairing tables inconsistent"
                );
                cur_edge = next_edge;
                cur_strand = next_strand;
                from_side0 = next_from_side0;
            }
            components.push(Component::Strand(steps));
        }
    }

    // standalone core copies from m = 0, t > 0 (internal or external edges)
    for (&eid, table) in &tables {
        if table.m == 0 && table.t > 0 {
            for _ in 0..table.t {
                components.push(Component::Core { edge: eid });
            }
        }
    }

    Ok(CurveRoute {
        graph_fingerprint: g.fingerprint(),
        components,
        patterns,
        crossings,
    })
}
