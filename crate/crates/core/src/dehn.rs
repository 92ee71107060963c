//! Dehn coordinates for multicurves.
//!
//! A multicurve on the decomposed surface is described by one pair per edge:
//! `m` counts intersections with the annulus core, `t` is the twisting
//! integer. Admissibility:
//!
//! * at every trinion the incident `m` values sum to an even number (a loop
//!   edge counts twice),
//! * `m = 0` forces `t >= 0` (then `t` counts parallel copies of the core),
//! * external edges carry no strands, so `m = 0` there.
//!
//! These conditions characterise exactly the isotopy classes of multicurves,
//! so routing (see `route`) can treat any admissible pair as a curve.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, PantsGraph, VertexId};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DehnParameter {
    /// Edges absent from the map carry (0, 0).
    pub entries: BTreeMap<EdgeId, (u64, i64)>,
}

impl DehnParameter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: &[(EdgeId, u64, i64)]) -> Self {
        let mut d = Self::new();
        for &(e, m, t) in pairs {
            d.set(e, m, t);
        }
        d
    }

    pub fn set(&mut self, edge: EdgeId, m: u64, t: i64) {
        if m == 0 && t == 0 {
            self.entries.remove(&edge);
        } else {
            self.entries.insert(edge, (m, t));
        }
    }

    pub fn m(&self, edge: EdgeId) -> u64 {
        self.entries.get(&edge).map(|&(m, _)| m).unwrap_or(0)
    }

    pub fn t(&self, edge: EdgeId) -> i64 {
        self.entries.get(&edge).map(|&(_, t)| t).unwrap_or(0)
    }

    pub fn is_empty_curve(&self) -> bool {
        self.entries.values().all(|&(m, t)| m == 0 && t == 0)
    }

    /// The same multicurve with `l` extra twists along edge `j`. Twisting is
    /// only defined transverse to the curve, hence the `m >= 1` requirement.
    pub fn twist(&self, j: EdgeId, l: i64) -> Result<DehnParameter> {
        if self.m(j) == 0 {
            return Err(Error::TwistUndefined { edge: j });
        }
        let mut d = self.clone();
        let (m, t) = (d.m(j), d.t(j));
        d.set(j, m, t + l);
        Ok(d)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DehnViolation {
    UnknownEdge(EdgeId),
    ExternalEdgeWithStrands { edge: EdgeId, m: u64 },
    NegativeCoreCopies { edge: EdgeId, t: i64 },
    OddTrinionSum { vertex: VertexId, sum: u64 },
}

impl std::fmt::Display for DehnViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DehnViolation::UnknownEdge(e) => write!(f, "parameter set on unknown edge {e}"),
            DehnViolation::ExternalEdgeWithStrands { edge, m } => {
                write!(f, "external edge {edge} has m = {m}, must be 0")
            }
            DehnViolation::NegativeCoreCopies { edge, t } => {
                write!(f, "edge {edge} has m = 0 and t = {t} < 0")
            }
            DehnViolation::OddTrinionSum { vertex, sum } => {
                write!(f, "trinion {vertex} sees odd strand-end count {sum}")
            }
        }
    }
}

pub fn validate_dehn(g: &PantsGraph, d: &DehnParameter) -> Vec<DehnViolation> {
    let mut out = Vec::new();
    let known = g.edge_ids();
    for (&e, &(m, t)) in &d.entries {
        if !known.contains(&e) {
            out.push(DehnViolation::UnknownEdge(e));
            continue;
        }
        if m == 0 && t < 0 {
            out.push(DehnViolation::NegativeCoreCopies { edge: e, t });
        }
        if m > 0 && g.is_external(e).unwrap_or(false) {
            out.push(DehnViolation::ExternalEdgeWithStrands { edge: e, m });
        }
    }
    for v in g.trinions() {
        let mut sum = 0u64;
        for slot in 1..=3 {
            if let Some((e, _)) = g.end_at(v.id, slot) {
                sum += d.m(e);
            }
        }
        if sum % 2 == 1 {
            out.push(DehnViolation::OddTrinionSum { vertex: v.id, sum });
        }
    }
    out
}

pub fn is_admissible(g: &PantsGraph, d: &DehnParameter) -> bool {
    validate_dehn(g, d).is_empty()
}

/// All admissible parameters with every internal `m <= m_max` and `|t| <= t_max`
/// (for `m = 0` edges that means `0 <= t <= t_max`). External edges stay at
/// (0, 0). Results come in lexicographic order: the `m` vector over internal
/// edges in ascending edge order is the primary key, the `t` vector the
/// secondary one. This order is what the independence matrix columns use.
pub fn enumerate_dehn(g: &PantsGraph, m_max: u64, t_max: u64) -> Result<Vec<DehnParameter>> {
    g.require_valid()?;
    let edges = g.internal_edges();
    let mut out = Vec::new();
    let mut m = vec![0u64; edges.len()];
    loop {
        let mut cand = DehnParameter::new();
        for (i, &e) in edges.iter().enumerate() {
            cand.set(e, m[i], 0);
        }
        if parity_ok(g, &cand) {
            push_twist_range(&edges, &m, t_max, &mut out);
        }
        if !increment(&mut m, m_max) {
            break;
        }
    }
    Ok(out)
}

fn parity_ok(g: &PantsGraph, d: &DehnParameter) -> bool {
    validate_dehn(g, d)
        .iter()
        .all(|v| !matches!(v, DehnViolation::OddTrinionSum { .. }))
}

fn push_twist_range(edges: &[EdgeId], m: &[u64], t_max: u64, out: &mut Vec<DehnParameter>) {
    let lo: Vec<i64> = m.iter().map(|&mj| if mj == 0 { 0 } else { -(t_max as i64) }).collect();
    let hi = t_max as i64;
    let mut t = lo.clone();
    loop {
        let mut d = DehnParameter::new();
        for (i, &e) in edges.iter().enumerate() {
            d.set(e, m[i], t[i]);
        }
        out.push(d);
        // odometer over t, last edge fastest
        let mut pos = edges.len();
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            if t[pos] < hi {
                t[pos] += 1;
                for v in t[pos + 1..].iter_mut().zip(&lo[pos + 1..]) {
                    *v.0 = *v.1;
                }
                break;
            }
        }
    }
}

fn increment(m: &mut [u64], m_max: u64) -> bool {
    let mut pos = m.len();
    loop {
        if pos == 0 {
            return false;
        }
        pos -= 1;
        if m[pos] < m_max {
            m[pos] += 1;
            for v in &mut m[pos + 1..] {
                *v = 0;
            }
            return true;
        }
    }
}
