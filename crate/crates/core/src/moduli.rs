//! Points of the SU(2) character variety in angle-twist coordinates.
//!
//! One rotation angle per edge prescribes the conjugacy class of the
//! holonomy around the annulus core; angles live in the moment polytope cut
//! out by the trinion inequalities. Given admissible angles we build explicit
//! trinion holonomies, one eigenframe per slot, and a twist angle per
//! internal edge fixing how the trinion gauges are glued across the annulus.
//! The compact torus acts by shifting twists, one circle per internal edge.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, PantsGraph, VertexId};
use crate::su2::Mat2;

/// Holonomy angles, one per edge, radians in [0, pi].
pub type Angles = BTreeMap<EdgeId, f64>;
/// Gluing twists, one per internal edge, fractions of a full turn in [0, 1).
pub type Twists = BTreeMap<EdgeId, f64>;

/// Below this |sin a| the holonomy is treated as central (a in {0, pi}).
const DEGENERATE_SIN: f64 = 1e-12;

/// Rejection sampling gives up after this many draws.
const MAX_DRAWS: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DeltaLocation {
    Interior,
    Boundary,
    Outside,
}

fn check_angles(g: &PantsGraph, angles: &Angles) -> Result<()> {
    for e in g.edge_ids() {
        let a = *angles.get(&e).ok_or(Error::MissingAngle { edge: e })?;
        if !(0.0..=PI).contains(&a) || !a.is_finite() {
            return Err(Error::AngleOutOfRange { edge: e, value: a });
        }
    }
    Ok(())
}

/// The four linear slacks of one trinion; all nonnegative exactly on the
/// moment polytope, all positive exactly on its interior.
fn trinion_slacks(a: [f64; 3]) -> [f64; 4] {
    [
        a[1] + a[2] - a[0],
        a[0] + a[2] - a[1],
        a[0] + a[1] - a[2],
        2.0 * PI - a[0] - a[1] - a[2],
    ]
}

fn trinion_angles(g: &PantsGraph, angles: &Angles, v: VertexId) -> [f64; 3] {
    let mut a = [0.0; 3];
    for slot in 1..=3u8 {
        let (e, _) = g.end_at(v, slot).expect("validated graph fills slots");
        a[slot as usize - 1] = angles[&e];
    }
    a
}

/// Smallest slack over all trinions and faces.
pub fn delta_slack(g: &PantsGraph, angles: &Angles) -> Result<f64> {
    g.require_valid()?;
    check_angles(g, angles)?;
    let mut min = f64::INFINITY;
    for v in g.trinions() {
        for s in trinion_slacks(trinion_angles(g, angles, v.id)) {
            min = min.min(s);
        }
    }
    Ok(min)
}

pub fn in_delta(g: &PantsGraph, angles: &Angles) -> Result<DeltaLocation> {
    let slack = delta_slack(g, angles)?;
    Ok(if slack > 0.0 {
        DeltaLocation::Interior
    } else if slack == 0.0 {
        DeltaLocation::Boundary
    } else {
        DeltaLocation::Outside
    })
}

/// Eigenbasis of a slot holonomy: `plus` spans the e^{+ia} eigenline,
/// `minus` the e^{-ia} one. The pair is orthonormal, the symplectic pairing
/// plus_1 minus_2 - plus_2 minus_1 equals one, and the phase is pinned by
/// making the largest component of `plus` real positive, so identical inputs
/// rebuild bitwise identical frames.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenFrame {
    pub plus: [Complex64; 2],
    pub minus: [Complex64; 2],
}

impl EigenFrame {
    pub fn standard() -> Self {
        EigenFrame {
            plus: [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            minus: [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        }
    }

    /// Columns (plus, minus); special unitary by the invariants above.
    pub fn matrix(&self) -> Mat2 {
        Mat2::new(self.plus[0], self.minus[0], self.plus[1], self.minus[1])
    }

    fn diagonalizing(h: &Mat2, a: f64) -> Self {
        if a.sin().abs() <= DEGENERATE_SIN {
            return EigenFrame::standard();
        }
        let lambda = Complex64::from_polar(1.0, a);
        // two algebraic candidates for the e^{+ia} eigenvector; at least one
        // is bounded away from zero when the eigenvalues are distinct
        let cand_a = [h.m[0][1], lambda - h.m[0][0]];
        let cand_b = [lambda - h.m[1][1], h.m[1][0]];
        let n2 = |v: &[Complex64; 2]| v[0].norm_sqr() + v[1].norm_sqr();
        let mut v = if n2(&cand_a) >= n2(&cand_b) { cand_a } else { cand_b };
        let norm = n2(&v).sqrt();
        v[0] /= norm;
        v[1] /= norm;
        // phase normalization: largest component real positive
        let anchor = if v[0].norm() >= v[1].norm() { v[0] } else { v[1] };
        let phase = anchor.conj() / anchor.norm();
        v[0] *= phase;
        v[1] *= phase;
        EigenFrame {
            plus: v,
            minus: [-v[1].conj(), v[0].conj()],
        }
    }
}

/// Holonomies of one trinion: x, y, z go around slots 1, 2, 3 and compose to
/// the identity (z is defined as (xy)^{-1}).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrinionMatrices {
    pub x: Mat2,
    pub y: Mat2,
    pub z: Mat2,
    pub frames: [EigenFrame; 3],
}

impl TrinionMatrices {
    pub fn slot_holonomy(&self, slot: u8) -> &Mat2 {
        match slot {
            1 => &self.x,
            2 => &self.y,
            3 => &self.z,
            _ => panic!("slot out of range"),
        }
    }

    pub fn frame(&self, slot: u8) -> &EigenFrame {
        &self.frames[slot as usize - 1]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepresentationPoint {
    pub graph_fingerprint: u64,
    pub angles: Angles,
    pub twists: Twists,
    pub trinions: BTreeMap<VertexId, TrinionMatrices>,
    /// Edges whose holonomy is +-I; the torus action skips them.
    pub degenerate_edges: Vec<EdgeId>,
}

fn tilted(alpha: f64, n_z: f64, n_x: f64) -> Mat2 {
    let (s, c) = alpha.sin_cos();
    Mat2::new(
        Complex64::new(c, s * n_z),
        Complex64::new(0.0, s * n_x),
        Complex64::new(0.0, s * n_x),
        Complex64::new(c, -s * n_z),
    )
}

/// Build the representation point over `g` with the given angles and twists.
/// Requires the angles to lie in the moment polytope; on the boundary the
/// construction still succeeds but some holonomies become central or
/// commuting, and the affected edges are flagged.
pub fn build_representation(
    g: &PantsGraph,
    angles: &Angles,
    twists: &Twists,
) -> Result<RepresentationPoint> {
    g.require_valid()?;
    check_angles(g, angles)?;
    for v in g.trinions() {
        let a = trinion_angles(g, angles, v.id);
        if trinion_slacks(a).iter().any(|&s| s < 0.0) {
            return Err(Error::OutsideDelta { trinion: v.id });
        }
    }

    let internal = g.internal_edges();
    let mut tw: Twists = BTreeMap::new();
    for e in &internal {
        let t = twists.get(e).copied().unwrap_or(0.0);
        if !t.is_finite() {
            return Err(Error::Parse(format!("twist on edge {e} is not finite")));
        }
        tw.insert(*e, t.rem_euclid(1.0));
    }

    let mut trinions = BTreeMap::new();
    for v in g.trinions() {
        let a = trinion_angles(g, angles, v.id);
        let (s1, s2) = (a[0].sin(), a[1].sin());
        let deg1 = s1.abs() <= DEGENERATE_SIN;
        let deg2 = s2.abs() <= DEGENERATE_SIN;
        let x;
        let y;
        if deg1 || deg2 {
            // a central slot forces the remaining angles to agree up to the
            // sign of the central holonomy; the polytope boundary guarantees
            // this, so a mismatch here means the inputs were outside after all
            let eps = |alpha: f64| if alpha.cos() >= 0.0 { 1.0 } else { -1.0 };
            let consistent = if deg1 {
                (a[2].cos() - eps(a[0]) * a[1].cos()).abs() <= 1e-9
            } else {
                (a[2].cos() - eps(a[1]) * a[0].cos()).abs() <= 1e-9
            };
            if !consistent {
                return Err(Error::OutsideDelta { trinion: v.id });
            }
            x = if deg1 {
                Mat2::rotation(if eps(a[0]) > 0.0 { 0.0 } else { PI })
            } else {
                Mat2::rotation(a[0])
            };
            y = if deg2 {
                Mat2::rotation(if eps(a[1]) > 0.0 { 0.0 } else { PI })
            } else {
                Mat2::rotation(a[1])
            };
        } else {
            let n_z = ((a[0].cos() * a[1].cos() - a[2].cos()) / (s1 * s2)).clamp(-1.0, 1.0);
            let n_x = (1.0 - n_z * n_z).sqrt();
            x = Mat2::rotation(a[0]);
            y = tilted(a[1], n_z, n_x);
        }
        let z = x.mul(&y).inverse();
        let frames = [
            EigenFrame::diagonalizing(&x, a[0]),
            EigenFrame::diagonalizing(&y, a[1]),
            EigenFrame::diagonalizing(&z, a[2]),
        ];
        trinions.insert(v.id, TrinionMatrices { x, y, z, frames });
    }

    let degenerate_edges = g
        .edge_ids()
        .into_iter()
        .filter(|e| angles[e].sin().abs() <= DEGENERATE_SIN)
        .collect();

    Ok(RepresentationPoint {
        graph_fingerprint: g.fingerprint(),
        angles: angles.clone(),
        twists: tw,
        trinions,
        degenerate_edges,
    })
}

impl RepresentationPoint {
    pub fn angle(&self, edge: EdgeId) -> Result<f64> {
        self.angles.get(&edge).copied().ok_or(Error::UnknownEdge { edge })
    }

    pub fn twist(&self, edge: EdgeId) -> Result<f64> {
        self.twists.get(&edge).copied().ok_or(Error::UnknownEdge { edge })
    }

    pub fn is_degenerate(&self, edge: EdgeId) -> bool {
        self.degenerate_edges.contains(&edge)
    }

    pub fn check_graph(&self, g: &PantsGraph) -> Result<()> {
        if self.graph_fingerprint == g.fingerprint() {
            Ok(())
        } else {
            Err(Error::GraphMismatch)
        }
    }

    /// Shift the twist of every listed internal edge; angles and matrices are
    /// untouched. Integer shifts reduce to zero first, so acting by a full
    /// turn is exactly the identity.
    pub fn act(&self, shifts: &Twists) -> Result<RepresentationPoint> {
        let mut out = self.clone();
        for (&e, &t) in shifts {
            let theta = out
                .twists
                .get_mut(&e)
                .ok_or(Error::UnknownEdge { edge: e })?;
            if self.degenerate_edges.contains(&e) && t != 0.0 {
                return Err(Error::CentralHolonomy { edge: e });
            }
            let frac = t.rem_euclid(1.0);
            let mut next = *theta + frac;
            if next >= 1.0 {
                next -= 1.0;
            }
            *theta = next;
        }
        Ok(out)
    }

    pub fn act_edge(&self, edge: EdgeId, t: f64) -> Result<RepresentationPoint> {
        let mut shifts = Twists::new();
        shifts.insert(edge, t);
        self.act(&shifts)
    }
}

/// Draw angles uniformly until every trinion slack clears `margin`
/// (interpreted as slack in the defining inequalities), then draw twists
/// uniformly in [0, 1). Deterministic for a fixed seed: angles are drawn in
/// ascending edge order, then twists in ascending internal edge order.
pub fn sample_interior(
    g: &PantsGraph,
    margin: f64,
    seed: u64,
) -> Result<(Angles, Twists)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_interior_with(g, margin, &mut rng)
}

/// As `sample_interior`, drawing from a caller-owned stream so several
/// points can share one seed.
pub fn sample_interior_with<R: Rng>(
    g: &PantsGraph,
    margin: f64,
    rng: &mut R,
) -> Result<(Angles, Twists)> {
    g.require_valid()?;
    let edges = g.edge_ids();
    for _ in 0..MAX_DRAWS {
        let mut angles = Angles::new();
        for &e in &edges {
            angles.insert(e, rng.gen_range(0.0..PI));
        }
        if delta_slack(g, &angles)? >= margin {
            let mut twists = Twists::new();
            for e in g.internal_edges() {
                twists.insert(e, rng.gen_range(0.0..1.0));
            }
            return Ok((angles, twists));
        }
    }
    Err(Error::EmptyInterior { draws: MAX_DRAWS, margin })
}

/// Convenience: sample and build in one step.
pub fn sample_representation(
    g: &PantsGraph,
    margin: f64,
    seed: u64,
) -> Result<RepresentationPoint> {
    let (angles, twists) = sample_interior(g, margin, seed)?;
    build_representation(g, &angles, &twists)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tol;
    use num_complex::Complex64;

    fn uniform_angles(g: &PantsGraph, a: f64) -> Angles {
        g.edge_ids().into_iter().map(|e| (e, a)).collect()
    }

    #[test]
    fn delta_classification_examples() {
        let g = PantsGraph::genus_two();
        let mk = |a: [f64; 3]| -> Angles {
            [(0usize, a[0]), (1, a[1]), (2, a[2])].into_iter().collect()
        };
        assert_eq!(in_delta(&g, &mk([0.3, 0.4, 0.5])).unwrap(), DeltaLocation::Interior);
        assert_eq!(in_delta(&g, &mk([0.0, 0.7, 0.7])).unwrap(), DeltaLocation::Boundary);
        assert_eq!(in_delta(&g, &mk([0.1, 0.2, 0.9])).unwrap(), DeltaLocation::Outside);
        // sum above 2 pi
        assert_eq!(in_delta(&g, &mk([3.0, 3.0, 1.0])).unwrap(), DeltaLocation::Outside);
    }

    #[test]
    fn right_angle_trinion_is_frozen() {
        let g = PantsGraph::genus_two();
        let angles = uniform_angles(&g, PI / 2.0);
        let rep = build_representation(&g, &angles, &Twists::new()).unwrap();
        let t = &rep.trinions[&0];
        let i = Complex64::new(0.0, 1.0);
        assert!(t.x.distance(&Mat2::new(i, 0.0.into(), 0.0.into(), -i)) < 1e-15);
        assert!(t.y.distance(&Mat2::new(0.0.into(), i, i, 0.0.into())) < 1e-15);
        assert!(t.x.mul(&t.y).trace().norm() < 1e-15);
    }

    #[test]
    fn holonomies_are_special_unitary_with_prescribed_traces() {
        let g = PantsGraph::genus_two();
        for seed in 0..20 {
            let rep = sample_representation(&g, 0.01, seed).unwrap();
            for (v, t) in &rep.trinions {
                assert!(t.x.special_unitary_defect() < tol::UNITARITY);
                assert!(t.y.special_unitary_defect() < tol::UNITARITY);
                assert!(t.z.special_unitary_defect() < tol::UNITARITY);
                let a = trinion_angles(&g, &rep.angles, *v);
                for (h, alpha) in [(&t.x, a[0]), (&t.y, a[1]), (&t.z, a[2])] {
                    assert!((h.trace().re - 2.0 * alpha.cos()).abs() < tol::TRACE_MATCH);
                    assert!(h.trace().im.abs() < tol::TRACE_MATCH);
                }
                // the three slot loops compose to the identity
                let xyz = t.x.mul(&t.y).mul(&t.z);
                assert!(xyz.distance(&Mat2::identity()) < 1e-14);
            }
        }
    }

    #[test]
    fn tilt_reaches_minus_one_on_lower_faces() {
        // a3 = a1 + a2 pins n_z to +1, a3 = |a1 - a2| to -1
        for a1 in [0.3f64, 0.8, 1.4] {
            for a2 in [0.2f64, 0.9] {
                let up = (a1.cos() * a2.cos() - (a1 + a2).cos()) / (a1.sin() * a2.sin());
                assert!((up - 1.0).abs() < 1e-12);
                let dn =
                    (a1.cos() * a2.cos() - (a1 - a2).cos()) / (a1.sin() * a2.sin());
                assert!((dn + 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn outside_angles_are_rejected() {
        let g = PantsGraph::genus_two();
        let mut angles = uniform_angles(&g, 0.5);
        angles.insert(2, 2.0);
        assert!(matches!(
            build_representation(&g, &angles, &Twists::new()),
            Err(Error::OutsideDelta { .. })
        ));
    }

    #[test]
    fn angle_validation() {
        let g = PantsGraph::genus_two();
        let mut angles = uniform_angles(&g, 0.5);
        angles.remove(&1);
        assert!(matches!(
            in_delta(&g, &angles),
            Err(Error::MissingAngle { edge: 1 })
        ));
        angles.insert(1, -0.1);
        assert!(matches!(
            in_delta(&g, &angles),
            Err(Error::AngleOutOfRange { edge: 1, .. })
        ));
    }

    #[test]
    fn eigenframes_diagonalize_and_normalize() {
        let g = PantsGraph::genus_two();
        for seed in 0..20 {
            let rep = sample_representation(&g, 0.01, seed).unwrap();
            for (v, t) in &rep.trinions {
                let a = trinion_angles(&g, &rep.angles, *v);
                for slot in 1..=3u8 {
                    let f = t.frame(slot);
                    let h = t.slot_holonomy(slot);
                    let alpha = a[slot as usize - 1];
                    // orthonormality
                    let dot = f.plus[0] * f.minus[0].conj() + f.plus[1] * f.minus[1].conj();
                    assert!(dot.norm() < tol::UNITARITY);
                    let n_p = f.plus[0].norm_sqr() + f.plus[1].norm_sqr();
                    assert!((n_p - 1.0).abs() < tol::UNITARITY);
                    // symplectic pairing is one
                    let omega = f.plus[0] * f.minus[1] - f.plus[1] * f.minus[0];
                    assert!((omega - Complex64::new(1.0, 0.0)).norm() < 1e-10);
                    // eigenvector property
                    let lam = Complex64::from_polar(1.0, alpha);
                    for (vec, l) in [(f.plus, lam), (f.minus, lam.conj())] {
                        let hv = [
                            h.m[0][0] * vec[0] + h.m[0][1] * vec[1],
                            h.m[1][0] * vec[0] + h.m[1][1] * vec[1],
                        ];
                        assert!((hv[0] - l * vec[0]).norm() < tol::TRACE_MATCH);
                        assert!((hv[1] - l * vec[1]).norm() < tol::TRACE_MATCH);
                    }
                    // frame matrix is special unitary
                    assert!(f.matrix().special_unitary_defect() < tol::UNITARITY);
                }
            }
        }
    }

    #[test]
    fn frames_are_bitwise_deterministic() {
        let g = PantsGraph::genus_two();
        let (angles, twists) = sample_interior(&g, 0.05, 11).unwrap();
        let a = build_representation(&g, &angles, &twists).unwrap();
        let b = build_representation(&g, &angles, &twists).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn action_shifts_twists_only() {
        let g = PantsGraph::genus_two();
        let rep = sample_representation(&g, 0.05, 3).unwrap();
        let shifted = rep.act_edge(1, 0.25).unwrap();
        assert_eq!(shifted.angles, rep.angles);
        assert_eq!(shifted.trinions, rep.trinions);
        assert_eq!(shifted.twists[&0], rep.twists[&0]);
        assert!((shifted.twists[&1] - (rep.twists[&1] + 0.25).rem_euclid(1.0)).abs() < 1e-15);
    }

    #[test]
    fn full_turn_acts_as_identity_exactly() {
        let g = PantsGraph::genus_two();
        let rep = sample_representation(&g, 0.05, 5).unwrap();
        for e in 0..3 {
            let turned = rep.act_edge(e, 1.0).unwrap();
            assert_eq!(turned, rep);
            let turned = rep.act_edge(e, -3.0).unwrap();
            assert_eq!(turned, rep);
        }
    }

    #[test]
    fn action_composes_on_the_circle() {
        let g = PantsGraph::genus_two();
        let rep = sample_representation(&g, 0.05, 7).unwrap();
        for (s, t) in [(0.3, 0.9), (0.75, 0.75), (0.1, 0.2)] {
            let a = rep.act_edge(1, s).unwrap().act_edge(1, t).unwrap();
            let b = rep.act_edge(1, s + t).unwrap();
            let diff = (a.twists[&1] - b.twists[&1]).abs();
            let circle = diff.min((1.0 - diff).abs());
            assert!(circle < 1e-12, "s = {s}, t = {t}");
        }
    }

    #[test]
    fn action_rejects_unknown_and_central_edges() {
        let g = PantsGraph::one_holed_torus();
        let rep = sample_representation(&g, 0.05, 1).unwrap();
        // external edge carries no twist coordinate
        assert!(matches!(rep.act_edge(1, 0.5), Err(Error::UnknownEdge { edge: 1 })));
        // central holonomy on the internal edge
        let mut angles = rep.angles.clone();
        angles.insert(0, 0.0);
        angles.insert(1, 0.0);
        let deg = build_representation(&g, &angles, &Twists::new()).unwrap();
        assert!(deg.is_degenerate(0));
        assert!(matches!(
            deg.act_edge(0, 0.5),
            Err(Error::CentralHolonomy { edge: 0 })
        ));
        assert!(deg.act_edge(0, 0.0).is_ok());
    }

    #[test]
    fn degenerate_trinion_builds_central_holonomy() {
        let g = PantsGraph::one_holed_torus();
        // loop angle pi forces the boundary angle to 0 on the polytope face
        let mut angles = Angles::new();
        angles.insert(0, PI);
        angles.insert(1, 0.0);
        let rep = build_representation(&g, &angles, &Twists::new()).unwrap();
        assert!(rep.is_degenerate(0));
        let t = &rep.trinions[&0];
        assert!(t.x.distance(&Mat2::rotation(PI)) < 1e-15);
    }

    #[test]
    fn sampling_hits_interior_with_margin() {
        let g = PantsGraph::genus_two();
        for seed in 0..1000 {
            let (angles, twists) = sample_interior(&g, 0.05, seed).unwrap();
            assert!(delta_slack(&g, &angles).unwrap() >= 0.05);
            assert_eq!(in_delta(&g, &angles).unwrap(), DeltaLocation::Interior);
            for (_, t) in twists {
                assert!((0.0..1.0).contains(&t));
            }
        }
    }

    #[test]
    fn sampling_is_reproducible_and_seed_sensitive() {
        let g = PantsGraph::four_holed_sphere();
        let a = sample_interior(&g, 0.02, 42).unwrap();
        let b = sample_interior(&g, 0.02, 42).unwrap();
        assert_eq!(a, b);
        let c = sample_interior(&g, 0.02, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn impossible_margin_reports_empty_interior() {
        let g = PantsGraph::genus_two();
        assert!(matches!(
            sample_interior(&g, 2.0 * PI, 0),
            Err(Error::EmptyInterior { .. })
        ));
    }
}
