//! Trace functions of multicurves, evaluated by composing holonomies along
//! routed components.
//!
//! Every closed component becomes a word of explicit SU(2) factors. Crossing
//! an annulus from side 0 to side 1 contributes, in order of application,
//!
//! * the frame change out of the side-0 trinion gauge into the edge
//!   eigenframe (inverse of the side-0 frame matrix),
//! * the core winding factor diag(e^{i w a}, e^{-i w a}),
//! * the twist factor diag(e^{2 pi i theta}, e^{-2 pi i theta}),
//! * the frame change into the side-1 gauge: side-1 frame matrix times the
//!   eigenline swap, which accounts for the core appearing with opposite
//!   orientation from the far side.
//!
//! Crossings taken from side 1 contribute the inverse factors. Arcs between
//! distinct slots of a trinion are gauge-trivial; a self-arc contributes the
//! loop holonomy of the slot it encircles, inverted when the arc is walked
//! against its stored orientation. The conjugation identity
//! (crossing) H_0 (crossing)^{-1} = H_1^{-1} — transporting the side-0 slot
//! loop across the annulus gives the inverse of the side-1 slot loop — makes
//! the word of a closed component a genuine holonomy, so its trace is a
//! conjugation invariant.
//!
//! The value attached to a multicurve is the product over components of
//! -tr(holonomy); components that are standalone core copies of an edge with
//! rotation angle `a` contribute -2 cos a without any routing.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::{PantsGraph, VertexId};
use crate::moduli::RepresentationPoint;
use crate::route::{ArcKind, Component, CrossStep, CurveRoute, Step};
use crate::su2::Mat2;

/// Ordered list of atomic SU(2) factors; `factors[0]` is applied first, so
/// the composed holonomy is `factors[n-1] * ... * factors[0]`.
#[derive(Clone, Debug, PartialEq)]
pub struct HolonomyWord {
    pub factors: Vec<Mat2>,
}

impl HolonomyWord {
    pub fn product(&self) -> Mat2 {
        self.factors
            .iter()
            .fold(Mat2::identity(), |acc, f| f.mul(&acc))
    }

    pub fn special_unitary_defect(&self) -> f64 {
        self.product().special_unitary_defect()
    }
}

/// Evaluated trace of a multicurve: the product of one factor -tr(g) per
/// closed component. SU(2) traces are real, so factors live in [-2, 2].
#[derive(Clone, Debug, PartialEq)]
pub struct TraceValue {
    pub value: f64,
    pub factors: Vec<f64>,
}

/// Holonomy of a canonical trinion arc in the trinion's own gauge: identity
/// between distinct slots, the encircled slot's loop for a self-arc.
pub fn arc_holonomy(
    rep: &RepresentationPoint,
    trinion: VertexId,
    kind: ArcKind,
) -> Result<Mat2> {
    let t = rep
        .trinions
        .get(&trinion)
        .ok_or_else(|| Error::InvalidArc(format!("no trinion {trinion} at this point")))?;
    match kind {
        ArcKind::Between { slots: (a, b) } => {
            if !(1..=3).contains(&a) || !(1..=3).contains(&b) || a == b {
                return Err(Error::InvalidArc(format!("bad slot pair ({a}, {b})")));
            }
            Ok(Mat2::identity())
        }
        ArcKind::SelfArc { slot, encircles } => {
            if !(1..=3).contains(&slot) || !(1..=3).contains(&encircles) || slot == encircles {
                return Err(Error::InvalidArc(format!(
                    "bad self-arc slots ({slot}, {encircles})"
                )));
            }
            Ok(*t.slot_holonomy(encircles))
        }
    }
}

fn push_crossing(
    factors: &mut Vec<Mat2>,
    g: &PantsGraph,
    rep: &RepresentationPoint,
    x: &CrossStep,
) -> Result<()> {
    let edge = g.edge(x.edge)?;
    let [e0, e1] = edge.ends();
    let f0 = rep.trinions[&e0.vertex].frame(e0.slot).matrix();
    let f1 = rep.trinions[&e1.vertex].frame(e1.slot).matrix();
    let a = rep.angle(x.edge)?;
    let theta = rep.twist(x.edge)?;
    let winding = Mat2::rotation(x.winding as f64 * a);
    let twist = Mat2::twist(theta);
    let out = f1.mul(&Mat2::eigen_swap());
    if x.from_side0 {
        factors.push(f0.inverse());
        factors.push(winding);
        factors.push(twist);
        factors.push(out);
    } else {
        factors.push(out.inverse());
        factors.push(twist.inverse());
        factors.push(winding.inverse());
        factors.push(f0);
    }
    Ok(())
}

/// Word of one closed strand component, step factors in traversal order.
pub fn strand_word(
    g: &PantsGraph,
    rep: &RepresentationPoint,
    steps: &[Step],
) -> Result<HolonomyWord> {
    let mut factors = Vec::with_capacity(steps.len() * 2);
    for step in steps {
        match step {
            Step::Cross(x) => push_crossing(&mut factors, g, rep, x)?,
            Step::Arc(a) => {
                let h = arc_holonomy(rep, a.trinion, a.kind)?;
                if matches!(a.kind, ArcKind::SelfArc { .. }) {
                    factors.push(if a.forward { h } else { h.inverse() });
                }
            }
        }
    }
    Ok(HolonomyWord { factors })
}

/// Evaluate the trace function of a routed multicurve at a representation
/// point on the same graph.
pub fn trace_of_route(
    g: &PantsGraph,
    rep: &RepresentationPoint,
    r: &CurveRoute,
) -> Result<TraceValue> {
    rep.check_graph(g)?;
    if r.graph_fingerprint != g.fingerprint() {
        return Err(Error::GraphMismatch);
    }
    let mut factors = Vec::with_capacity(r.components.len());
    let mut value = 1.0;
    for comp in &r.components {
        let f = match comp {
            Component::Strand(steps) => {
                let tr = strand_word(g, rep, steps)?.product().trace();
                debug_assert!(tr.im.abs() < 1e-9, "strand trace drifted off the real line");
                -tr.re
            }
            Component::Core { edge } => -2.0 * rep.angle(*edge)?.cos(),
        };
        factors.push(f);
        value *= f;
    }
    Ok(TraceValue { value, factors })
}

fn letter(assignment: &[Mat2], l: isize) -> Result<Mat2> {
    if l == 0 {
        return Err(Error::Parse("word letter 0 names no generator".into()));
    }
    let index = l.unsigned_abs() - 1;
    let m = assignment.get(index).ok_or(Error::UnassignedGenerator {
        index,
        count: assignment.len(),
    })?;
    Ok(if l > 0 { *m } else { m.inverse() })
}

/// Evaluate a word over assigned generators; letter `k > 0` is generator
/// `k - 1`, `k < 0` its inverse, read left to right as a group product.
pub fn evaluate_word(assignment: &[Mat2], word: &[isize]) -> Result<Mat2> {
    let mut p = Mat2::identity();
    for &l in word {
        p = p.mul(&letter(assignment, l)?);
    }
    Ok(p)
}

/// -tr of the evaluated word; the empty word gives -2.
pub fn word_trace(assignment: &[Mat2], word: &[isize]) -> Result<f64> {
    Ok(-evaluate_word(assignment, word)?.trace().re)
}

fn inverse_word(word: &[isize]) -> Vec<isize> {
    word.iter().rev().map(|&l| -l).collect()
}

/// Residual of the fundamental trace identity in character form:
/// |chi_a chi_b + chi_{ab} + chi_{a^{-1} b}|, zero in exact arithmetic.
pub fn check_trace_relation(assignment: &[Mat2], a: &[isize], b: &[isize]) -> Result<f64> {
    let chi_a = word_trace(assignment, a)?;
    let chi_b = word_trace(assignment, b)?;
    let ab: Vec<isize> = a.iter().chain(b.iter()).copied().collect();
    let ainv_b: Vec<isize> = inverse_word(a).into_iter().chain(b.iter().copied()).collect();
    let chi_ab = word_trace(assignment, &ab)?;
    let chi_ainv_b = word_trace(assignment, &ainv_b)?;
    Ok((chi_a * chi_b + chi_ab + chi_ainv_b).abs())
}

/// Complex trace of one strand component's holonomy, for diagnostics.
pub fn component_trace(
    g: &PantsGraph,
    rep: &RepresentationPoint,
    steps: &[Step],
) -> Result<Complex64> {
    Ok(strand_word(g, rep, steps)?.product().trace())
}
