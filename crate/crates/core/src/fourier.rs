//! Fourier analysis of trace functions along torus orbits.
//!
//! Restricted to the orbit of the twist action, a trace function is a
//! trigonometric polynomial: every crossing of an internal edge `j`
//! contributes exactly one factor diag(e^{2 pi i t_j}, e^{-2 pi i t_j}), so
//! the degree in `t_j` is at most the number of crossings `m_j`. The
//! coefficient extraction here is therefore an exact inverse discrete
//! Fourier transform on odd grids of size `2 N_j + 1`: as long as
//! `N_j >= m_j` the recovered coefficients are exact up to rounding, which
//! grid-doubling tests confirm.
//!
//! On top of the raw coefficients sit the checks this crate exists for: the
//! support bound (coefficients beyond the crossing numbers vanish), the
//! non-vanishing of the extremal coefficients on the interior of the moment
//! polytope, the fractional-twist phase law relating the extremal isotypes
//! of twisted curves, and the recovery of geometric intersection numbers
//! from isotype support.

use num_complex::Complex64;
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::dehn::DehnParameter;
use crate::error::{Error, Result};
use crate::graph::{EdgeId, PantsGraph};
use crate::moduli::{in_delta, DeltaLocation, RepresentationPoint, Twists};
use crate::route::{route, CurveRoute};
use crate::tol;
use crate::trace::trace_of_route;

/// Fourier coefficients of a trace function on a torus orbit, one index per
/// internal edge (ascending edge order), index `k_j` ranging over
/// `[-n_j, n_j]` and stored flat in row-major order.
#[derive(Clone, Debug)]
pub struct IsotypeTable {
    /// Internal edges, ascending; axis order of the multi-index.
    pub edges: Vec<EdgeId>,
    /// Half-width per axis: coefficients cover `|k_j| <= n_j`.
    pub n: Vec<usize>,
    /// Crossing count of the routed curve per axis (the support bound).
    pub m: Vec<u64>,
    /// Odd grid sizes `2 n_j + 1` the samples were taken on.
    pub sizes: Vec<usize>,
    pub coefficients: Vec<Complex64>,
}

impl IsotypeTable {
    fn strides(&self) -> Vec<usize> {
        strides_of(&self.sizes)
    }

    /// Flat position of a multi-index, or `None` when out of range.
    pub fn position(&self, k: &[i64]) -> Option<usize> {
        if k.len() != self.edges.len() {
            return None;
        }
        let strides = self.strides();
        let mut flat = 0;
        for (a, &ka) in k.iter().enumerate() {
            if ka.unsigned_abs() as usize > self.n[a] {
                return None;
            }
            flat += (ka + self.n[a] as i64) as usize * strides[a];
        }
        Some(flat)
    }

    pub fn coefficient(&self, k: &[i64]) -> Option<Complex64> {
        self.position(k).map(|p| self.coefficients[p])
    }

    /// Multi-index of a flat position.
    pub fn index_of(&self, flat: usize) -> Vec<i64> {
        let strides = self.strides();
        (0..self.edges.len())
            .map(|a| ((flat / strides[a]) % self.sizes[a]) as i64 - self.n[a] as i64)
            .collect()
    }

    /// All (multi-index, coefficient) pairs in flat order.
    pub fn entries(&self) -> impl Iterator<Item = (Vec<i64>, Complex64)> + '_ {
        self.coefficients
            .iter()
            .enumerate()
            .map(|(flat, &c)| (self.index_of(flat), c))
    }

    /// Evaluate the trigonometric polynomial the table represents.
    pub fn reconstruct(&self, t: &[f64]) -> Complex64 {
        let mut sum = Complex64::new(0.0, 0.0);
        for (k, c) in self.entries() {
            let phase: f64 = k.iter().zip(t).map(|(&ka, &ta)| ka as f64 * ta).sum();
            sum += c * Complex64::from_polar(1.0, 2.0 * PI * phase);
        }
        sum
    }
}

fn strides_of(sizes: &[usize]) -> Vec<usize> {
    let mut s = vec![1; sizes.len()];
    for a in (0..sizes.len().saturating_sub(1)).rev() {
        s[a] = s[a + 1] * sizes[a + 1];
    }
    s
}

/// Evaluate the trace function on the product grid `t_j = idx_j / size_j`.
/// The parallel map preserves index order, so results are identical for any
/// thread count.
fn eval_on_grid(
    g: &PantsGraph,
    rep: &RepresentationPoint,
    r: &CurveRoute,
    edges: &[EdgeId],
    sizes: &[usize],
) -> Result<Vec<f64>> {
    let strides = strides_of(sizes);
    let total: usize = sizes.iter().product();
    (0..total)
        .into_par_iter()
        .map(|flat| {
            let mut shifts = Twists::new();
            for (a, &e) in edges.iter().enumerate() {
                let idx = (flat / strides[a]) % sizes[a];
                shifts.insert(e, idx as f64 / sizes[a] as f64);
            }
            let moved = rep.act(&shifts)?;
            Ok(trace_of_route(g, &moved, r)?.value)
        })
        .collect()
}

/// In-place multi-dimensional inverse DFT, one axis at a time; summation
/// order is fixed, so the result does not depend on how the samples were
/// produced in parallel.
fn dft(values: Vec<f64>, sizes: &[usize], n: &[usize]) -> Vec<Complex64> {
    let strides = strides_of(sizes);
    let total: usize = sizes.iter().product();
    let mut data: Vec<Complex64> = values.into_iter().map(Complex64::from).collect();
    for a in 0..sizes.len() {
        let ga = sizes[a];
        let sa = strides[a];
        let na = n[a] as f64;
        let twiddle: Vec<Complex64> = (0..ga * ga)
            .map(|p| {
                let (kk, idx) = (p / ga, p % ga);
                Complex64::from_polar(
                    1.0 / ga as f64,
                    -2.0 * PI * (kk as f64 - na) * idx as f64 / ga as f64,
                )
            })
            .collect();
        let mut line = vec![Complex64::new(0.0, 0.0); ga];
        let blocks = total / (ga * sa);
        for outer in 0..blocks {
            for inner in 0..sa {
                let base = outer * ga * sa + inner;
                line.clear();
                line.extend((0..ga).map(|j| data[base + j * sa]));
                for kk in 0..ga {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (idx, &v) in line.iter().enumerate() {
                        acc += v * twiddle[kk * ga + idx];
                    }
                    data[base + kk * sa] = acc;
                }
            }
        }
    }
    data
}

fn require_non_central(rep: &RepresentationPoint, edges: &[EdgeId]) -> Result<()> {
    for &e in edges {
        if rep.is_degenerate(e) {
            return Err(Error::CentralHolonomy { edge: e });
        }
    }
    Ok(())
}

/// Full isotype table over all internal edges. `n_override` supplies
/// half-widths per edge; missing edges default to crossing count + 1, which
/// is exactly enough to certify the support bound.
pub fn isotypes(
    g: &PantsGraph,
    rep: &RepresentationPoint,
    r: &CurveRoute,
    n_override: &BTreeMap<EdgeId, usize>,
) -> Result<IsotypeTable> {
    rep.check_graph(g)?;
    if r.graph_fingerprint != g.fingerprint() {
        return Err(Error::GraphMismatch);
    }
    let edges = g.internal_edges();
    require_non_central(rep, &edges)?;
    for e in n_override.keys() {
        if !edges.contains(e) {
            return Err(Error::UnknownEdge { edge: *e });
        }
    }
    let m: Vec<u64> = edges.iter().map(|&e| r.crossing_count(e)).collect();
    let n: Vec<usize> = edges
        .iter()
        .zip(&m)
        .map(|(e, &me)| match n_override.get(e) {
            Some(&ne) if ne >= 1 => Ok(ne),
            Some(&ne) => Err(Error::GridTooSmall { edge: *e, given: ne, needed: 1 }),
            None => Ok(me as usize + 1),
        })
        .collect::<Result<_>>()?;
    let sizes: Vec<usize> = n.iter().map(|&ne| 2 * ne + 1).collect();
    let values = eval_on_grid(g, rep, r, &edges, &sizes)?;
    let coefficients = dft(values, &sizes, &n);
    Ok(IsotypeTable { edges, n, m, sizes, coefficients })
}

/// Isotypes of the single circle action of one internal edge, all other
/// twists held at the base point; returns coefficients for `k` in
/// `[-n, n]`, stored at `k + n`.
pub fn isotypes_edge(
    g: &PantsGraph,
    rep: &RepresentationPoint,
    r: &CurveRoute,
    edge: EdgeId,
    n: usize,
) -> Result<Vec<Complex64>> {
    rep.check_graph(g)?;
    if r.graph_fingerprint != g.fingerprint() {
        return Err(Error::GraphMismatch);
    }
    if !g.internal_edges().contains(&edge) {
        return Err(Error::UnknownEdge { edge });
    }
    require_non_central(rep, &[edge])?;
    let size = 2 * n + 1;
    let values = eval_on_grid(g, rep, r, &[edge], &[size])?;
    Ok(dft(values, &[size], &[n]))
}

/// Outcome of checking the support bound: every coefficient with some
/// `|k_j| > m_j` must vanish.
#[derive(Clone, Debug)]
pub struct SupportReport {
    pub pass: bool,
    /// Largest modulus among coefficients outside the support box.
    pub max_violating_modulus: f64,
    /// Index attaining it, when any coefficient lies outside the box.
    pub worst_index: Option<Vec<i64>>,
    /// Number of coefficients outside the box.
    pub outside_count: usize,
}

pub fn support_check(table: &IsotypeTable, d: &DehnParameter) -> Result<SupportReport> {
    for (a, &e) in table.edges.iter().enumerate() {
        let needed = d.m(e) as usize + 1;
        if table.n[a] < needed {
            return Err(Error::GridTooSmall { edge: e, given: table.n[a], needed });
        }
    }
    let bound: Vec<i64> = table.edges.iter().map(|&e| d.m(e) as i64).collect();
    let mut max_violating_modulus = 0.0f64;
    let mut worst_index = None;
    let mut outside_count = 0;
    for (k, c) in table.entries() {
        if k.iter().zip(&bound).any(|(ka, ma)| ka.abs() > *ma) {
            outside_count += 1;
            if c.norm() > max_violating_modulus {
                max_violating_modulus = c.norm();
                worst_index = Some(k);
            }
        }
    }
    Ok(SupportReport {
        pass: max_violating_modulus <= tol::VANISHING,
        max_violating_modulus,
        worst_index,
        outside_count,
    })
}

/// The coefficients on the corners of the support box, `|k_j| = m_j` for
/// every internal edge.
#[derive(Clone, Debug)]
pub struct TopReport {
    pub edges: Vec<EdgeId>,
    pub coefficients: Vec<(Vec<i64>, Complex64)>,
    pub min_modulus: f64,
}

pub fn top_isotype(
    g: &PantsGraph,
    rep: &RepresentationPoint,
    d: &DehnParameter,
) -> Result<TopReport> {
    if in_delta(g, &rep.angles)? != DeltaLocation::Interior {
        return Err(Error::NotInterior);
    }
    let r = route(g, d)?;
    let table = isotypes(g, rep, &r, &BTreeMap::new())?;
    Ok(extremal_coefficients(&table))
}

/// Corner coefficients of an existing table (`|k_j| = m_j` for all `j`).
pub fn extremal_coefficients(table: &IsotypeTable) -> TopReport {
    let mut corners: Vec<Vec<i64>> = vec![Vec::new()];
    for &me in &table.m {
        let mut next = Vec::new();
        for c in &corners {
            if me == 0 {
                let mut k = c.clone();
                k.push(0);
                next.push(k);
            } else {
                for s in [me as i64, -(me as i64)] {
                    let mut k = c.clone();
                    k.push(s);
                    next.push(k);
                }
            }
        }
        corners = next;
    }
    let coefficients: Vec<(Vec<i64>, Complex64)> = corners
        .into_iter()
        .map(|k| {
            let c = table.coefficient(&k).expect("corner inside table range");
            (k, c)
        })
        .collect();
    let min_modulus = coefficients
        .iter()
        .map(|(_, c)| c.norm())
        .fold(f64::INFINITY, f64::min);
    TopReport { edges: table.edges.clone(), coefficients, min_modulus }
}

/// Residual of the fractional-twist phase law on edge `j`: with `k = m_j`
/// crossings, twisting by `l` multiplies the extremal isotypes by
/// `(-1)^{l(k-1)} e^{+-i l a_j}`. Returns the larger of the two corner
/// residuals.
pub fn twist_phase_check(
    g: &PantsGraph,
    rep: &RepresentationPoint,
    d: &DehnParameter,
    edge: EdgeId,
    l: i64,
) -> Result<f64> {
    let twisted = d.twist(edge, l)?;
    let k = d.m(edge) as usize;
    let base = isotypes_edge(g, rep, &route(g, d)?, edge, k)?;
    let moved = isotypes_edge(g, rep, &route(g, &twisted)?, edge, k)?;
    let a = rep.angle(edge)?;
    let sign = if (l * (k as i64 - 1)).rem_euclid(2) == 1 { -1.0 } else { 1.0 };
    let mut residual = 0.0f64;
    for pm in [1.0, -1.0] {
        let phase = sign * Complex64::from_polar(1.0, pm * l as f64 * a);
        let at = |table: &Vec<Complex64>| table[(k as i64 + pm as i64 * k as i64) as usize];
        // index k + pm*k: 2k for +k, 0 for -k
        let lhs = at(&moved);
        let rhs = phase * at(&base);
        residual = residual.max((lhs - rhs).norm());
    }
    Ok(residual)
}

/// Geometric intersection number with the core of `edge`, recovered as the
/// largest `k <= k_max` whose single-edge isotype does not vanish.
pub fn intersection_number(
    g: &PantsGraph,
    rep: &RepresentationPoint,
    edge: EdgeId,
    r: &CurveRoute,
    k_max: usize,
) -> Result<u64> {
    if in_delta(g, &rep.angles)? != DeltaLocation::Interior {
        return Err(Error::NotInterior);
    }
    let n = k_max.max(r.crossing_count(edge) as usize);
    let c = isotypes_edge(g, rep, r, edge, n)?;
    for k in (1..=k_max).rev() {
        if c[n + k].norm() > tol::NONVANISHING {
            return Ok(k as u64);
        }
    }
    Ok(0)
}

/// Phase factor of one edge in the factorized twist law:
/// `(-1)^{l(k-1)} e^{i l alpha}` for `k >= 1` crossings, `(2 cos alpha)^l`
/// for an uncrossed edge carrying `l >= 0` core copies.
///
/// Note the uncrossed-edge value is quoted in the `tr` normalization; in
/// this crate's component normalization `-tr`, `l` core copies multiply the
/// trace by `(-2 cos alpha)^l`, so users combining `phi` with routed values
/// must supply the extra `(-1)^l` themselves (see the factorized-law test).
pub fn phi(k: u64, l: i64, alpha: f64) -> Result<Complex64> {
    if k == 0 {
        if l < 0 {
            return Err(Error::NegativeCoreCount { l });
        }
        return Ok(Complex64::from((2.0 * alpha.cos()).powi(l as i32)));
    }
    let sign = if (l * (k as i64 - 1)).rem_euclid(2) == 1 { -1.0 } else { 1.0 };
    Ok(sign * Complex64::from_polar(1.0, l as f64 * alpha))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moduli::sample_representation;
    use crate::dehn::enumerate_dehn;

    fn table_for(
        g: &PantsGraph,
        d: &DehnParameter,
        seed: u64,
        n_override: &BTreeMap<EdgeId, usize>,
    ) -> (RepresentationPoint, IsotypeTable) {
        let rep = sample_representation(g, 0.05, seed).unwrap();
        let r = route(g, d).unwrap();
        let t = isotypes(g, &rep, &r, n_override).unwrap();
        (rep, t)
    }

    #[test]
    fn empty_route_has_unit_constant_coefficient() {
        let g = PantsGraph::genus_two();
        let (_, t) = table_for(&g, &DehnParameter::new(), 1, &BTreeMap::new());
        for (k, c) in t.entries() {
            if k.iter().all(|&ka| ka == 0) {
                assert!((c - Complex64::from(1.0)).norm() < 1e-12);
            } else {
                assert!(c.norm() < 1e-12, "k = {k:?}");
            }
        }
    }

    #[test]
    fn core_only_curve_is_orbit_constant() {
        let g = PantsGraph::genus_two();
        let d = DehnParameter::from_pairs(&[(1, 0, 1)]);
        let (rep, t) = table_for(&g, &d, 2, &BTreeMap::new());
        let expected = -2.0 * rep.angle(1).unwrap().cos();
        for (k, c) in t.entries() {
            if k.iter().all(|&ka| ka == 0) {
                assert!((c - Complex64::from(expected)).norm() < 1e-10);
            } else {
                assert!(c.norm() < 1e-10);
            }
        }
    }

    #[test]
    fn support_bound_on_frozen_example() {
        // two crossings of edge 0 only; degree-3 coefficients must vanish
        let g = PantsGraph::genus_two();
        let d = DehnParameter::from_pairs(&[(0, 2, 0)]);
        let n: BTreeMap<EdgeId, usize> = [(0, 3), (1, 1), (2, 1)].into_iter().collect();
        let (_, t) = table_for(&g, &d, 3, &n);
        for (k, c) in t.entries() {
            if k[0].abs() == 3 {
                assert!(c.norm() <= tol::VANISHING, "k = {k:?}, |c| = {}", c.norm());
            }
        }
        let report = support_check(&t, &d).unwrap();
        assert!(report.pass, "max violating {}", report.max_violating_modulus);
        assert!(report.outside_count > 0);
    }

    #[test]
    fn support_check_passes_on_enumerated_sweep() {
        for (g, seed) in [(PantsGraph::genus_two(), 5), (PantsGraph::one_holed_torus(), 6)] {
            let rep = sample_representation(&g, 0.05, seed).unwrap();
            for d in enumerate_dehn(&g, 2, 1).unwrap() {
                let r = route(&g, &d).unwrap();
                let t = isotypes(&g, &rep, &r, &BTreeMap::new()).unwrap();
                let report = support_check(&t, &d).unwrap();
                assert!(
                    report.pass,
                    "param {d:?}: worst {:?} -> {}",
                    report.worst_index, report.max_violating_modulus
                );
            }
        }
    }

    #[test]
    fn corrupted_route_fails_support_check() {
        use crate::route::{Component, CrossStep, Step};
        // the fault must not hide in a structural zero: on the torus the two
        // ends of the loop edge carry different slot matrices, so the extra
        // crossing's top coefficient <e+(X), e-(Y)>^2 is generically nonzero
        let g = PantsGraph::one_holed_torus();
        let d = DehnParameter::from_pairs(&[(0, 1, 0)]);
        let rep = sample_representation(&g, 0.05, 7).unwrap();
        let mut r = route(&g, &d).unwrap();
        for comp in &mut r.components {
            if let Component::Strand(steps) = comp {
                steps.push(Step::Cross(CrossStep {
                    edge: 0,
                    inlet: 0,
                    outlet: 0,
                    winding: 0,
                    from_side0: true,
                }));
                break;
            }
        }
        let n: BTreeMap<EdgeId, usize> = [(0, 2)].into_iter().collect();
        let t = isotypes(&g, &rep, &r, &n).unwrap();
        let report = support_check(&t, &d).unwrap();
        assert!(!report.pass, "fault injection went unnoticed");
        assert_eq!(report.worst_index.map(|k| k[0].abs()), Some(2));
    }

    #[test]
    fn grid_doubling_is_idempotent() {
        let g = PantsGraph::genus_two();
        let d = DehnParameter::from_pairs(&[(0, 1, 0), (1, 1, 1)]);
        let (_, small) = table_for(&g, &d, 11, &BTreeMap::new());
        let doubled: BTreeMap<EdgeId, usize> = small
            .edges
            .iter()
            .zip(&small.n)
            .map(|(&e, &ne)| (e, 2 * ne))
            .collect();
        let (_, big) = table_for(&g, &d, 11, &doubled);
        for (k, c) in small.entries() {
            let cb = big.coefficient(&k).unwrap();
            assert!((c - cb).norm() <= 1e-9, "k = {k:?}");
        }
    }

    #[test]
    fn coefficients_have_conjugation_symmetry() {
        let g = PantsGraph::genus_two();
        let d = DehnParameter::from_pairs(&[(0, 2, 1), (1, 1, 0), (2, 1, 0)]);
        let (_, t) = table_for(&g, &d, 13, &BTreeMap::new());
        for (k, c) in t.entries() {
            let neg: Vec<i64> = k.iter().map(|&ka| -ka).collect();
            let cn = t.coefficient(&neg).unwrap();
            assert!((cn - c.conj()).norm() < 1e-10);
        }
    }

    #[test]
    fn table_reconstructs_the_sampled_function() {
        let g = PantsGraph::genus_two();
        let d = DehnParameter::from_pairs(&[(0, 2, 0), (1, 1, 1), (2, 1, 0)]);
        let rep = sample_representation(&g, 0.05, 17).unwrap();
        let r = route(&g, &d).unwrap();
        let t = isotypes(&g, &rep, &r, &BTreeMap::new()).unwrap();
        for probe in [[0.0, 0.0, 0.0], [0.3, 0.1, 0.7], [0.95, 0.5, 0.25]] {
            let shifts: Twists = t.edges.iter().copied().zip(probe).collect();
            let direct = trace_of_route(&g, &rep.act(&shifts).unwrap(), &r)
                .unwrap()
                .value;
            let rebuilt = t.reconstruct(&probe);
            assert!((rebuilt - Complex64::from(direct)).norm() < tol::RECONSTRUCTION);
            assert!(rebuilt.im.abs() < 1e-9);
        }
    }

    #[test]
    fn isotypes_are_equivariant_under_the_action() {
        let g = PantsGraph::genus_two();
        let d = DehnParameter::from_pairs(&[(0, 1, 0), (1, 1, 0)]);
        let rep = sample_representation(&g, 0.05, 19).unwrap();
        let r = route(&g, &d).unwrap();
        let t0 = isotypes(&g, &rep, &r, &BTreeMap::new()).unwrap();
        let s = [0.2, 0.45, 0.8];
        let shifts: Twists = t0.edges.iter().copied().zip(s).collect();
        let t1 = isotypes(&g, &rep.act(&shifts).unwrap(), &r, &BTreeMap::new()).unwrap();
        for (k, c0) in t0.entries() {
            let phase: f64 = k.iter().zip(&s).map(|(&ka, sa)| ka as f64 * sa).sum();
            let expected = c0 * Complex64::from_polar(1.0, 2.0 * PI * phase);
            let c1 = t1.coefficient(&k).unwrap();
            assert!((c1 - expected).norm() < tol::RECONSTRUCTION, "k = {k:?}");
        }
    }

    #[test]
    fn extremal_coefficients_survive_on_the_interior() {
        let g = PantsGraph::genus_two();
        let d = DehnParameter::from_pairs(&[(0, 1, 0), (1, 1, 0)]);
        for seed in [23, 24, 25] {
            let rep = sample_representation(&g, 0.1, seed).unwrap();
            let top = top_isotype(&g, &rep, &d).unwrap();
            assert_eq!(top.coefficients.len(), 4);
            assert!(
                top.min_modulus > tol::NONVANISHING,
                "seed {seed}: min modulus {}",
                top.min_modulus
            );
        }
    }

    #[test]
    fn constant_curve_top_isotype_is_its_value() {
        let g = PantsGraph::genus_two();
        let d = DehnParameter::from_pairs(&[(2, 0, 1)]);
        let rep = sample_representation(&g, 0.1, 29).unwrap();
        let top = top_isotype(&g, &rep, &d).unwrap();
        assert_eq!(top.coefficients.len(), 1);
        let expected = -2.0 * rep.angle(2).unwrap().cos();
        assert!((top.coefficients[0].1 - Complex64::from(expected)).norm() < 1e-10);
    }

    #[test]
    fn top_isotype_requires_interior() {
        let g = PantsGraph::genus_two();
        let d = DehnParameter::from_pairs(&[(0, 1, 0), (1, 1, 0)]);
        let mut angles = crate::moduli::Angles::new();
        angles.insert(0, 0.4);
        angles.insert(1, 0.6);
        angles.insert(2, 1.0); // boundary: a2 = a0 + a1
        let rep = crate::moduli::build_representation(&g, &angles, &Twists::new()).unwrap();
        assert!(matches!(top_isotype(&g, &rep, &d), Err(Error::NotInterior)));
    }

    #[test]
    fn extremal_coefficient_vanishes_on_the_boundary_face() {
        // on the face a2 = a0 + a1 the commuting holonomies kill the corner
        // coefficient that the interior keeps alive
        let g = PantsGraph::genus_two();
        let d = DehnParameter::from_pairs(&[(0, 1, 0), (1, 1, 0)]);
        let mut angles = crate::moduli::Angles::new();
        angles.insert(0, 0.4);
        angles.insert(1, 0.6);
        angles.insert(2, 1.0);
        let rep = crate::moduli::build_representation(&g, &angles, &Twists::new()).unwrap();
        let r = route(&g, &d).unwrap();
        let table = isotypes(&g, &rep, &r, &BTreeMap::new()).unwrap();
        let top = extremal_coefficients(&table);
        assert!(
            top.min_modulus <= tol::NONVANISHING,
            "expected a vanishing corner, min modulus {}",
            top.min_modulus
        );
    }

    #[test]
    fn twist_phase_law_holds_across_k_and_l() {
        let g = PantsGraph::genus_two();
        let cases = [
            (DehnParameter::from_pairs(&[(0, 1, 0), (1, 1, 0)]), 0),
            (DehnParameter::from_pairs(&[(0, 2, 0)]), 0),
            (DehnParameter::from_pairs(&[(0, 3, 0), (1, 1, 0)]), 0),
        ];
        let rep = sample_representation(&g, 0.05, 31).unwrap();
        for (d, edge) in &cases {
            for l in -2i64..=2 {
                let r = twist_phase_check(&g, &rep, d, *edge, l).unwrap();
                assert!(
                    r <= tol::TWIST_PHASE,
                    "m = {}, l = {l}: residual {r}",
                    d.m(*edge)
                );
            }
        }
    }

    #[test]
    fn twist_phase_sign_is_visible_for_even_crossings() {
        // k = 2, l = 1: the corner isotype flips sign besides the phase
        let g = PantsGraph::genus_two();
        let d = DehnParameter::from_pairs(&[(0, 2, 0)]);
        let rep = sample_representation(&g, 0.05, 37).unwrap();
        let base = isotypes_edge(&g, &rep, &route(&g, &d).unwrap(), 0, 2).unwrap();
        let twisted =
            isotypes_edge(&g, &rep, &route(&g, &d.twist(0, 1).unwrap()).unwrap(), 0, 2).unwrap();
        let a = rep.angle(0).unwrap();
        let plus = twisted[4] / base[4];
        assert!((plus - (-Complex64::from_polar(1.0, a))).norm() < 1e-8);
        // and with the wrong sign the residual would be large
        assert!((plus - Complex64::from_polar(1.0, a)).norm() > 0.1);
    }

    #[test]
    fn twist_phase_check_rejects_uncrossed_edges() {
        let g = PantsGraph::genus_two();
        let d = DehnParameter::from_pairs(&[(0, 2, 0)]);
        let rep = sample_representation(&g, 0.05, 38).unwrap();
        assert!(matches!(
            twist_phase_check(&g, &rep, &d, 1, 1),
            Err(Error::TwistUndefined { edge: 1 })
        ));
    }

    #[test]
    fn factorized_phase_law_with_core_sign() {
        // moving from t = 0 to t multiplies the full-torus corner isotypes by
        // a product of one factor per edge: phi for crossed edges, and
        // (-2 cos a)^l — note the extra (-1)^l against phi's tr convention —
        // for uncrossed internal edges picking up l core copies
        let g = PantsGraph::genus_two();
        let rep = sample_representation(&g, 0.05, 41).unwrap();
        let m_patterns: [[u64; 3]; 3] = [[1, 1, 0], [2, 0, 0], [2, 1, 1]];
        let t_patterns: [[i64; 3]; 4] = [[1, 0, 0], [0, 1, 1], [2, -1, 1], [1, 1, 2]];
        for m in m_patterns {
            for t in t_patterns {
                let mut base = DehnParameter::new();
                let mut moved = DehnParameter::new();
                let mut ok = true;
                for e in 0..3usize {
                    base.set(e, m[e], 0);
                    ok &= m[e] > 0 || t[e] >= 0;
                    moved.set(e, m[e], t[e]);
                }
                if !ok {
                    continue;
                }
                let t0 = isotypes(&g, &rep, &route(&g, &base).unwrap(), &BTreeMap::new()).unwrap();
                let t1 = isotypes(&g, &rep, &route(&g, &moved).unwrap(), &BTreeMap::new()).unwrap();
                let c0 = extremal_coefficients(&t0);
                let c1 = extremal_coefficients(&t1);
                for ((k, v0), (k1, v1)) in c0.coefficients.iter().zip(&c1.coefficients) {
                    assert_eq!(k, k1);
                    let mut factor = Complex64::from(1.0);
                    for (e, (&me, &te)) in m.iter().zip(&t).enumerate() {
                        let alpha = rep.angle(e).unwrap();
                        // corner sign of k_e decides which of the +- phases applies
                        let signed_l = if k[e] >= 0 { te } else { -te };
                        if me > 0 {
                            factor *= phi(me, signed_l, alpha).unwrap();
                        } else {
                            factor *= Complex64::from((-2.0 * alpha.cos()).powi(te as i32));
                        }
                    }
                    assert!(
                        (v1 - factor * v0).norm() <= 1e-8,
                        "m = {m:?}, t = {t:?}, k = {k:?}: {v1} vs {}",
                        factor * v0
                    );
                }
            }
        }
    }

    #[test]
    fn intersection_numbers_match_crossings() {
        let g = PantsGraph::genus_two();
        for seed in [43, 44, 45] {
            let rep = sample_representation(&g, 0.05, seed).unwrap();
            for d in enumerate_dehn(&g, 2, 1).unwrap() {
                let r = route(&g, &d).unwrap();
                for e in g.internal_edges() {
                    let k_max = d.m(e) as usize + 2;
                    let found = intersection_number(&g, &rep, e, &r, k_max).unwrap();
                    assert_eq!(found, d.m(e), "seed {seed}, param {d:?}, edge {e}");
                }
            }
        }
    }

    #[test]
    fn disjoint_core_has_zero_intersection() {
        let g = PantsGraph::genus_two_separating();
        // cores of the two loop edges are disjoint from each other
        let d = DehnParameter::from_pairs(&[(0, 0, 1)]);
        let rep = sample_representation(&g, 0.05, 47).unwrap();
        let r = route(&g, &d).unwrap();
        assert_eq!(intersection_number(&g, &rep, 2, &r, 3).unwrap(), 0);
    }

    #[test]
    fn phi_frozen_values() {
        let a = 0.8f64;
        for l in -3i64..=3 {
            assert!((phi(1, l, a).unwrap() - Complex64::from_polar(1.0, l as f64 * a)).norm() < 1e-15);
        }
        assert!((phi(0, 2, a).unwrap() - Complex64::from(4.0 * a.cos() * a.cos())).norm() < 1e-15);
        assert!((phi(2, 1, a).unwrap() + Complex64::from_polar(1.0, a)).norm() < 1e-15);
        assert!((phi(2, 2, a).unwrap() - Complex64::from_polar(1.0, 2.0 * a)).norm() < 1e-15);
        assert!((phi(3, 1, a).unwrap() - Complex64::from_polar(1.0, a)).norm() < 1e-15);
        assert!(matches!(phi(0, -1, a), Err(Error::NegativeCoreCount { l: -1 })));
    }

    #[test]
    fn central_edges_are_rejected() {
        let g = PantsGraph::one_holed_torus();
        let mut angles = crate::moduli::Angles::new();
        angles.insert(0, PI);
        angles.insert(1, 0.0);
        let rep = crate::moduli::build_representation(&g, &angles, &Twists::new()).unwrap();
        let d = DehnParameter::from_pairs(&[(0, 1, 0)]);
        let r = route(&g, &d).unwrap();
        assert!(matches!(
            isotypes(&g, &rep, &r, &BTreeMap::new()),
            Err(Error::CentralHolonomy { edge: 0 })
        ));
        assert!(matches!(
            isotypes_edge(&g, &rep, &r, 0, 2),
            Err(Error::CentralHolonomy { edge: 0 })
        ));
    }

    #[test]
    fn grid_overrides_are_validated() {
        let g = PantsGraph::genus_two();
        let d = DehnParameter::from_pairs(&[(0, 2, 0)]);
        let rep = sample_representation(&g, 0.05, 53).unwrap();
        let r = route(&g, &d).unwrap();
        let bad: BTreeMap<EdgeId, usize> = [(0, 0)].into_iter().collect();
        assert!(matches!(
            isotypes(&g, &rep, &r, &bad),
            Err(Error::GridTooSmall { edge: 0, given: 0, needed: 1 })
        ));
        let unknown: BTreeMap<EdgeId, usize> = [(9, 2)].into_iter().collect();
        assert!(matches!(
            isotypes(&g, &rep, &r, &unknown),
            Err(Error::UnknownEdge { edge: 9 })
        ));
        // support check demands room beyond the crossing number
        let tight: BTreeMap<EdgeId, usize> = [(0, 2), (1, 1), (2, 1)].into_iter().collect();
        let t = isotypes(&g, &rep, &r, &tight).unwrap();
        assert!(matches!(
            support_check(&t, &d),
            Err(Error::GridTooSmall { edge: 0, given: 2, needed: 3 })
        ));
    }

}
