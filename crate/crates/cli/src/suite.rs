//! The verification checklist behind `curvetrace suite`.
//!
//! Eight checks, each a theorem-shaped property run at desk scale against
//! one graph. Everything is driven by per-check seeded streams, so the
//! emitted table is byte-identical across reruns and worker pool sizes.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

use curvetrace_core::dehn::{enumerate_dehn, DehnParameter};
use curvetrace_core::fourier::{
    intersection_number, isotypes, support_check, top_isotype, twist_phase_check,
};
use curvetrace_core::graph::PantsGraph;
use curvetrace_core::independence::{build_matrix, rank_report, stable_verdict, Verdict};
use curvetrace_core::moduli::{
    build_representation, in_delta, sample_interior_with, sample_representation, Angles,
    DeltaLocation, RepresentationPoint, Twists,
};
use curvetrace_core::route::route;
use curvetrace_core::su2::random_su2;
use curvetrace_core::tol;
use curvetrace_core::trace::{check_trace_relation, trace_of_route};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::report::{full, Report};
use crate::{io, Failure, Outcome};

type CheckResult = Result<String, String>;

fn ce(e: curvetrace_core::error::Error) -> String {
    format!("infrastructure error: {e}")
}

/// Sub-seed for check number `k`, so checks stay independent of each other's
/// draw counts.
fn sub(seed: u64, k: u64) -> u64 {
    seed ^ k.wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn rng_for(seed: u64, k: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(sub(seed, k))
}

fn join(items: impl IntoIterator<Item = impl ToString>, sep: &str) -> String {
    items
        .into_iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(sep)
}

pub fn run(graph_path: &Path, seed: u64) -> Result<Outcome, Failure> {
    let g = io::load_valid_graph(graph_path)?;
    let sweep = enumerate_dehn(&g, 3, 1)?;

    let mut report = Report::new(Some(seed));
    report.comment(format!(
        "graph: {} trinions; internal edges {}; sweep m <= 3 |t| <= 1 has {} parameters",
        g.trinion_count(),
        join(g.internal_edges(), "/"),
        sweep.len()
    ));
    report.header(&["check", "status", "detail"]);

    let support_outcome = isotype_support(&g, &sweep, seed);
    let leak_ceiling = *support_outcome.as_ref().map(|(leak, _)| leak).unwrap_or(&f64::NAN);

    let checks: Vec<(&str, CheckResult)> = vec![
        ("polytope_build_agreement", polytope_agreement(&g, seed)),
        ("trace_relation", trace_relation(seed)),
        ("isotype_support", support_outcome.map(|(_, detail)| detail)),
        ("extremal_nonvanishing", extremal(&g, &sweep, seed, leak_ceiling)),
        ("twist_phase_law", twist_phase(&g, &sweep, seed)),
        ("intersection_recovery", intersection(&g, &sweep, seed)),
        ("independence_rank", independence(&g, seed)),
        ("torus_action_contracts", torus_action(&g, &sweep, seed)),
    ];

    let mut failed = 0usize;
    let total = checks.len();
    for (name, result) in checks {
        match result {
            Ok(detail) => report.row(vec![name.into(), "pass".into(), detail]),
            Err(detail) => {
                failed += 1;
                report.row(vec![name.into(), "FAIL".into(), detail]);
            }
        }
    }

    Ok(Outcome {
        report,
        failure: (failed > 0).then(|| format!("{failed} of {total} checks failed")),
    })
}

/// Random angle vectors land inside the moment polytope exactly when the
/// representation builder accepts them.
fn polytope_agreement(g: &PantsGraph, seed: u64) -> CheckResult {
    let mut rng = rng_for(seed, 1);
    let edges = g.edge_ids();
    let no_twists = Twists::new();
    let (mut inside, mut outside, mut disagree) = (0u32, 0u32, 0u32);
    for _ in 0..10_000 {
        let mut angles = Angles::new();
        for &e in &edges {
            angles.insert(e, rng.gen_range(0.0..PI));
        }
        let admissible = in_delta(g, &angles).map_err(ce)? != DeltaLocation::Outside;
        if admissible {
            inside += 1;
        } else {
            outside += 1;
        }
        if build_representation(g, &angles, &no_twists).is_ok() != admissible {
            disagree += 1;
        }
    }
    if disagree == 0 {
        Ok(format!("10000 draws; {inside} admissible; {outside} outside; builder agrees on all"))
    } else {
        Err(format!("builder disagrees with the polytope test on {disagree} of 10000 draws"))
    }
}

/// Random special-unitary word pairs satisfy the product trace relation.
fn trace_relation(seed: u64) -> CheckResult {
    let mut rng = rng_for(seed, 2);
    fn word(rng: &mut ChaCha8Rng) -> Vec<isize> {
        let len = rng.gen_range(1..=6);
        (0..len)
            .map(|_| {
                let k = rng.gen_range(1..=3isize);
                if rng.gen_bool(0.5) {
                    k
                } else {
                    -k
                }
            })
            .collect()
    }
    let mut max = 0.0f64;
    for _ in 0..1000 {
        let assignment = [
            random_su2(&mut rng),
            random_su2(&mut rng),
            random_su2(&mut rng),
        ];
        let a = word(&mut rng);
        let b = word(&mut rng);
        max = max.max(check_trace_relation(&assignment, &a, &b).map_err(ce)?);
    }
    if max <= tol::TRACE_MATCH {
        Ok(format!("1000 word pairs; largest residual {}", full(max)))
    } else {
        Err(format!("largest residual {} exceeds {}", full(max), full(tol::TRACE_MATCH)))
    }
}

/// Fourier coefficients outside the |k_j| <= m_j box vanish for the whole
/// sweep; returns the leakage ceiling for the gap report of the next check.
fn isotype_support(
    g: &PantsGraph,
    sweep: &[DehnParameter],
    seed: u64,
) -> Result<(f64, String), String> {
    let rep = sample_representation(g, 0.05, sub(seed, 3)).map_err(ce)?;
    let mut max_leak = 0.0f64;
    let mut outside_total = 0usize;
    for d in sweep {
        let r = route(g, d).map_err(ce)?;
        let table = isotypes(g, &rep, &r, &BTreeMap::new()).map_err(ce)?;
        let s = support_check(&table, d).map_err(ce)?;
        max_leak = max_leak.max(s.max_violating_modulus);
        outside_total += s.outside_count;
    }
    if max_leak <= tol::VANISHING {
        Ok((
            max_leak,
            format!(
                "{} parameters; {} coefficients outside support; largest {}",
                sweep.len(),
                outside_total,
                full(max_leak)
            ),
        ))
    } else {
        Err(format!(
            "a coefficient outside the support box has modulus {} > {}",
            full(max_leak),
            full(tol::VANISHING)
        ))
    }
}

/// Coefficients at the support corners stay bounded away from zero at
/// interior points.
fn extremal(g: &PantsGraph, sweep: &[DehnParameter], seed: u64, leak_ceiling: f64) -> CheckResult {
    let mut rng = rng_for(seed, 4);
    let mut min_top = f64::INFINITY;
    for _ in 0..5 {
        let (a, t) = sample_interior_with(g, 0.05, &mut rng).map_err(ce)?;
        let rep = build_representation(g, &a, &t).map_err(ce)?;
        for d in sweep {
            let top = top_isotype(g, &rep, d).map_err(ce)?;
            min_top = min_top.min(top.min_modulus);
        }
    }
    let ceiling = if leak_ceiling.is_finite() {
        format!("; leakage ceiling {}", full(leak_ceiling))
    } else {
        String::new()
    };
    if min_top >= tol::NONVANISHING {
        Ok(format!(
            "5 interior points; smallest extremal coefficient {}{}",
            full(min_top),
            ceiling
        ))
    } else {
        Err(format!(
            "an extremal coefficient has modulus {} < {}",
            full(min_top),
            full(tol::NONVANISHING)
        ))
    }
}

/// A fractional twist multiplies the extremal isotypes by the predicted
/// phase, sign included.
fn twist_phase(g: &PantsGraph, sweep: &[DehnParameter], seed: u64) -> CheckResult {
    let rep = sample_representation(g, 0.05, sub(seed, 5)).map_err(ce)?;
    let mut covered = Vec::new();
    let mut skipped = Vec::new();
    let mut max_res = 0.0f64;
    for k in 1..=3u64 {
        let found = sweep.iter().find_map(|d| {
            g.internal_edges()
                .into_iter()
                .find(|&e| d.m(e) == k)
                .map(|e| (d.clone(), e))
        });
        match found {
            None => skipped.push(k),
            Some((d, e)) => {
                for l in -2..=2 {
                    max_res = max_res.max(twist_phase_check(g, &rep, &d, e, l).map_err(ce)?);
                }
                covered.push(k);
            }
        }
    }
    if covered.is_empty() {
        return Err("no sweep parameter crosses any edge; nothing to test".into());
    }
    let mut detail = format!(
        "k in {{{}}} with l in -2..2; largest residual {}",
        join(covered, "/"),
        full(max_res)
    );
    if !skipped.is_empty() {
        detail.push_str(&format!("; no admissible parameter for k in {{{}}}", join(skipped, "/")));
    }
    if max_res <= tol::TWIST_PHASE {
        Ok(detail)
    } else {
        Err(format!("largest phase residual {} exceeds {}", full(max_res), full(tol::TWIST_PHASE)))
    }
}

/// The crossing number with every edge core is recovered from one-edge
/// isotype support at independent base points.
fn intersection(g: &PantsGraph, sweep: &[DehnParameter], seed: u64) -> CheckResult {
    let mut rng = rng_for(seed, 6);
    let reps = (0..3)
        .map(|_| {
            let (a, t) = sample_interior_with(g, 0.05, &mut rng)?;
            build_representation(g, &a, &t)
        })
        .collect::<Result<Vec<RepresentationPoint>, _>>()
        .map_err(ce)?;
    let mut checked = 0usize;
    let mut wrong = 0usize;
    for d in sweep {
        let r = route(g, d).map_err(ce)?;
        for e in g.internal_edges() {
            let k_max = r.crossing_count(e) as usize + 2;
            for rep in &reps {
                let n = intersection_number(g, rep, e, &r, k_max).map_err(ce)?;
                checked += 1;
                if n != d.m(e) {
                    wrong += 1;
                }
            }
        }
    }
    if wrong == 0 {
        Ok(format!("{checked} parameter-edge-point triples; all recoveries exact"))
    } else {
        Err(format!("{wrong} of {checked} recoveries disagree with the Dehn parameter"))
    }
}

/// Trace functions of distinct small multicurves are linearly independent;
/// a duplicated column is flagged as dependent.
fn independence(g: &PantsGraph, seed: u64) -> CheckResult {
    let (m_max, t_max) = if g.internal_edges().len() == 1 { (2, 2) } else { (1, 1) };
    let params = enumerate_dehn(g, m_max, t_max).map_err(ce)?;
    let rows = 3 * params.len();
    let base = sub(seed, 7);
    let seeds = [base, base.wrapping_add(1), base.wrapping_add(2)];
    let verdict = stable_verdict(g, &params, rows, &seeds, 0.05, tol::RANK_REL).map_err(ce)?;
    if verdict != Verdict::Independent {
        return Err(format!(
            "{} columns from m <= {m_max} |t| <= {t_max}: {verdict}",
            params.len()
        ));
    }

    let mut with_dup = params.clone();
    with_dup.push(params[params.len() - 1].clone());
    let m = build_matrix(g, &with_dup, 3 * with_dup.len(), seeds[0], 0.05).map_err(ce)?;
    let control = rank_report(&m, tol::RANK_REL);
    if control.verdict == Verdict::Independent {
        return Err("negative control failed: a duplicated column was not flagged".into());
    }
    Ok(format!(
        "{} columns independent across 3 seeds; duplicated column flagged at rank {} of {}",
        params.len(),
        control.rank,
        control.columns
    ))
}

/// Whole twists act trivially, angles are action-invariant, and curves miss
/// an edge exactly when its action leaves their trace alone.
fn torus_action(g: &PantsGraph, sweep: &[DehnParameter], seed: u64) -> CheckResult {
    let rep = sample_representation(g, 0.05, sub(seed, 8)).map_err(ce)?;
    let mut rng = rng_for(seed, 8);

    let mut period_edges = 0usize;
    for e in g.internal_edges() {
        if let Some(d) = sweep.iter().find(|d| d.m(e) > 0) {
            let r = route(g, d).map_err(ce)?;
            let before = trace_of_route(g, &rep, &r).map_err(ce)?.value;
            let turned = rep.act_edge(e, 1.0).map_err(ce)?;
            let after = trace_of_route(g, &turned, &r).map_err(ce)?.value;
            if before.to_bits() != after.to_bits() {
                return Err(format!(
                    "whole twist on edge {e} moved a trace from {} to {}",
                    full(before),
                    full(after)
                ));
            }
            period_edges += 1;
        }
    }

    let mut shifts = Twists::new();
    for e in g.internal_edges() {
        shifts.insert(e, rng.gen_range(0.0..1.0));
    }
    let moved = rep.act(&shifts).map_err(ce)?;
    let mut angle_drift = 0.0f64;
    for v in g.trinions() {
        for slot in 1..=3u8 {
            let (e, _) = g.end_at(v.id, slot).expect("validated graph fills every slot");
            let h = moved.trinions[&v.id].slot_holonomy(slot);
            let recomputed = (h.trace().re / 2.0).clamp(-1.0, 1.0).acos();
            angle_drift = angle_drift.max((recomputed - moved.angle(e).map_err(ce)?).abs());
        }
    }
    if angle_drift > tol::TRACE_MATCH {
        return Err(format!("angles drift by {} under the action", full(angle_drift)));
    }

    let mut pairs = 0usize;
    let mut drift = 0.0f64;
    'pairs: for d in sweep {
        if d.is_empty_curve() {
            continue;
        }
        for e in g.internal_edges() {
            if d.m(e) > 0 {
                continue;
            }
            let r = route(g, d).map_err(ce)?;
            let before = trace_of_route(g, &rep, &r).map_err(ce)?.value;
            let tau = rng.gen_range(0.05..0.95);
            let turned = rep.act_edge(e, tau).map_err(ce)?;
            let after = trace_of_route(g, &turned, &r).map_err(ce)?.value;
            drift = drift.max((before - after).abs());
            pairs += 1;
            if pairs >= 20 {
                break 'pairs;
            }
        }
    }
    if drift > tol::TRACE_MATCH {
        return Err(format!("a disjoint curve's trace drifts by {}", full(drift)));
    }

    Ok(format!(
        "whole twists exact on {period_edges} edge(s); angle drift {}; disjoint-curve drift {} over {pairs} pair(s)",
        full(angle_drift),
        full(drift)
    ))
}
