//! One function per subcommand. Each returns the finished report plus the
//! verification failure to signal, if any; input trouble short-circuits as a
//! `Failure` with exit code 2.

use std::collections::BTreeMap;
use std::path::Path;

use curvetrace_core::dehn::{enumerate_dehn, validate_dehn};
use curvetrace_core::fourier::{
    intersection_number, isotypes, isotypes_edge, support_check, twist_phase_check,
};
use curvetrace_core::graph::EdgeId;
use curvetrace_core::independence::{build_matrix, build_matrix_uncapped, rank_report, Verdict};
use curvetrace_core::moduli::{
    build_representation, delta_slack, in_delta, sample_interior, sample_interior_with,
    DeltaLocation, Twists,
};
use curvetrace_core::route::{route as route_curve, ArcKind, Component, Step};
use curvetrace_core::tol;
use curvetrace_core::trace::trace_of_route;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::report::{full, Report};
use crate::{io, Failure, Outcome};

pub fn validate(graph: &Path, dehn: Option<&Path>) -> Result<Outcome, Failure> {
    let g = io::load_graph(graph)?;
    let mut report = Report::new(None);
    report.header(&["target", "finding"]);

    let mut problems = 0usize;
    let graph_violations = g.validate();
    for v in &graph_violations {
        report.row(vec!["graph".into(), v.to_string()]);
    }
    problems += graph_violations.len();
    if graph_violations.is_empty() {
        report.row(vec!["graph".into(), "ok".into()]);
    }

    if let Some(path) = dehn {
        let d = io::load_dehn_raw(path)?;
        if graph_violations.is_empty() {
            let dehn_violations = validate_dehn(&g, &d);
            for v in &dehn_violations {
                report.row(vec!["dehn".into(), v.to_string()]);
            }
            problems += dehn_violations.len();
            if dehn_violations.is_empty() {
                report.row(vec!["dehn".into(), "ok".into()]);
            }
        } else {
            report.row(vec!["dehn".into(), "not checked: graph is malformed".into()]);
        }
    }

    Ok(Outcome {
        report,
        failure: (problems > 0).then(|| format!("{problems} violation(s) found")),
    })
}

pub fn route(graph: &Path, dehn: &Path) -> Result<Outcome, Failure> {
    let g = io::load_valid_graph(graph)?;
    let d = io::load_dehn(dehn, &g)?;
    let r = route_curve(&g, &d)?;

    let mut report = Report::new(None);
    report.comment(format!(
        "components: {} ({} strands; {} cores)",
        r.components.len(),
        r.strand_component_count(),
        r.core_component_count()
    ));
    for e in g.internal_edges() {
        report.comment(format!(
            "edge {e}: crossings {} winding sum {}",
            r.crossing_count(e),
            r.winding_sum(e)
        ));
    }
    report.header(&["component", "kind", "crossings", "arcs", "path"]);
    for (i, c) in r.components.iter().enumerate() {
        match c {
            Component::Core { edge } => report.row(vec![
                i.to_string(),
                "core".into(),
                "0".into(),
                "0".into(),
                format!("edge {edge}"),
            ]),
            Component::Strand(steps) => {
                let crossings = steps.iter().filter(|s| matches!(s, Step::Cross(_))).count();
                report.row(vec![
                    i.to_string(),
                    "strand".into(),
                    crossings.to_string(),
                    (steps.len() - crossings).to_string(),
                    path_string(steps),
                ]);
            }
        }
    }
    Ok(Outcome::ok(report))
}

/// Compact one-cell rendering of a strand: `E3+` crosses edge 3 from side 0
/// (`w` marks a nonzero winding), `V1:2-3` walks the arc between slots 2 and
/// 3 of trinion 1, `V1:2o1` the self-arc at slot 2 encircling slot 1.
fn path_string(steps: &[Step]) -> String {
    let tokens: Vec<String> = steps
        .iter()
        .map(|s| match s {
            Step::Cross(x) => {
                let dir = if x.from_side0 { '+' } else { '-' };
                if x.winding == 0 {
                    format!("E{}{}", x.edge, dir)
                } else {
                    format!("E{}{}w{}", x.edge, dir, x.winding)
                }
            }
            Step::Arc(a) => match a.kind {
                ArcKind::Between { slots } => {
                    format!("V{}:{}-{}", a.trinion, slots.0, slots.1)
                }
                ArcKind::SelfArc { slot, encircles } => {
                    format!("V{}:{}o{}", a.trinion, slot, encircles)
                }
            },
        })
        .collect();
    tokens.join(" ")
}

pub fn eval(
    graph: &Path,
    dehn: &Path,
    angles: &Path,
    twists: Option<&Path>,
) -> Result<Outcome, Failure> {
    let g = io::load_valid_graph(graph)?;
    let d = io::load_dehn(dehn, &g)?;
    let a = io::load_angles(angles)?;
    let t = match twists {
        Some(p) => io::load_twists(p)?,
        None => Twists::new(),
    };
    let rep = build_representation(&g, &a, &t)?;
    let r = route_curve(&g, &d)?;
    let tv = trace_of_route(&g, &rep, &r)?;

    let mut report = Report::new(None);
    report.header(&["quantity", "value"]);
    report.row(vec!["trace".into(), full(tv.value)]);
    for (i, f) in tv.factors.iter().enumerate() {
        report.row(vec![format!("component_{i}"), full(*f)]);
    }
    Ok(Outcome::ok(report))
}

pub fn sample(graph: &Path, seed: u64, margin: f64) -> Result<Outcome, Failure> {
    let g = io::load_valid_graph(graph)?;
    let (angles, twists) = sample_interior(&g, margin, seed)?;

    let mut report = Report::new(Some(seed));
    report.comment(format!("margin: {}", full(margin)));
    report.comment(format!("slack: {}", full(delta_slack(&g, &angles)?)));
    report.header(&["kind", "edge", "value"]);
    for (e, a) in &angles {
        report.row(vec!["angle".into(), e.to_string(), full(*a)]);
    }
    for (e, t) in &twists {
        report.row(vec!["twist".into(), e.to_string(), full(*t)]);
    }
    Ok(Outcome::ok(report))
}

pub fn delta(graph: &Path, angles: &Path) -> Result<Outcome, Failure> {
    let g = io::load_valid_graph(graph)?;
    let a = io::load_angles(angles)?;
    let location = match in_delta(&g, &a)? {
        DeltaLocation::Interior => "interior",
        DeltaLocation::Boundary => "boundary",
        DeltaLocation::Outside => "outside",
    };
    let mut report = Report::new(None);
    report.header(&["quantity", "value"]);
    report.row(vec!["location".into(), location.into()]);
    report.row(vec!["slack".into(), full(delta_slack(&g, &a)?)]);
    Ok(Outcome::ok(report))
}

fn parse_grid(spec: &str) -> Result<BTreeMap<EdgeId, usize>, Failure> {
    let mut out = BTreeMap::new();
    for part in spec.split(',').filter(|p| !p.is_empty()) {
        let bad = || Failure::input(format!("grid override {part:?} is not of the form EDGE=N"));
        let (e, n) = part.split_once('=').ok_or_else(bad)?;
        let e: EdgeId = e.trim().parse().map_err(|_| bad())?;
        let n: usize = n.trim().parse().map_err(|_| bad())?;
        out.insert(e, n);
    }
    Ok(out)
}

pub fn fourier(
    graph: &Path,
    dehn: &Path,
    seed: u64,
    margin: f64,
    edge: Option<EdgeId>,
    grid: Option<&str>,
) -> Result<Outcome, Failure> {
    let g = io::load_valid_graph(graph)?;
    let d = io::load_dehn(dehn, &g)?;
    let overrides = match grid {
        Some(spec) => parse_grid(spec)?,
        None => BTreeMap::new(),
    };
    let (a, t) = sample_interior(&g, margin, seed)?;
    let rep = build_representation(&g, &a, &t)?;
    let r = route_curve(&g, &d)?;

    let mut report = Report::new(Some(seed));
    match edge {
        Some(e) => {
            for k in overrides.keys().filter(|&&k| k != e) {
                return Err(Failure::input(format!(
                    "grid override names edge {k} but --edge restricts to edge {e}"
                )));
            }
            let n = overrides
                .get(&e)
                .copied()
                .unwrap_or(r.crossing_count(e) as usize + 1);
            let column = isotypes_edge(&g, &rep, &r, e, n)?;
            report.comment(format!("edge: {e}"));
            report.header(&["k", "re", "im", "modulus"]);
            for (i, c) in column.iter().enumerate() {
                let k = i as i64 - n as i64;
                report.row(vec![k.to_string(), full(c.re), full(c.im), full(c.norm())]);
            }
        }
        None => {
            let table = isotypes(&g, &rep, &r, &overrides)?;
            match support_check(&table, &d) {
                Ok(s) => {
                    report.comment(format!(
                        "support check: {} ({} coefficients outside the box; largest {})",
                        if s.pass { "pass" } else { "fail" },
                        s.outside_count,
                        full(s.max_violating_modulus)
                    ));
                }
                Err(_) => {
                    report.comment("support check skipped: a grid is smaller than the support box");
                }
            }
            let mut cells: Vec<&str> = Vec::new();
            let names: Vec<String> = table.edges.iter().map(|e| format!("k_{e}")).collect();
            cells.extend(names.iter().map(|s| s.as_str()));
            cells.extend(["re", "im", "modulus"]);
            report.header(&cells);
            for (k, c) in table.entries() {
                let mut row: Vec<String> = k.iter().map(|x| x.to_string()).collect();
                row.push(full(c.re));
                row.push(full(c.im));
                row.push(full(c.norm()));
                report.row(row);
            }
        }
    }
    Ok(Outcome::ok(report))
}

pub fn intersect(
    graph: &Path,
    dehn: &Path,
    edge: EdgeId,
    seed: u64,
    margin: f64,
    k_max: Option<usize>,
) -> Result<Outcome, Failure> {
    let g = io::load_valid_graph(graph)?;
    let d = io::load_dehn(dehn, &g)?;
    let r = route_curve(&g, &d)?;
    // scan strictly above the crossing count so the drop-off is witnessed
    let k_max = k_max.unwrap_or(r.crossing_count(edge) as usize + 2);
    let expected = d.m(edge);

    let mut report = Report::new(Some(seed));
    report.comment(format!("edge: {edge}; k_max: {k_max}; dehn m: {expected}"));
    report.header(&["base_point", "intersection"]);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut recovered = Vec::new();
    for i in 0..3 {
        let (a, t) = sample_interior_with(&g, margin, &mut rng)?;
        let rep = build_representation(&g, &a, &t)?;
        let n = intersection_number(&g, &rep, edge, &r, k_max)?;
        report.row(vec![i.to_string(), n.to_string()]);
        recovered.push(n);
    }

    let failure = (!recovered.iter().all(|&n| n == expected)).then(|| {
        format!(
            "recovered intersection numbers {recovered:?} disagree with the Dehn parameter m = {expected}"
        )
    });
    Ok(Outcome { report, failure })
}

pub fn twist_check(
    graph: &Path,
    dehn: &Path,
    edge: EdgeId,
    ell: i64,
    seed: u64,
    margin: f64,
) -> Result<Outcome, Failure> {
    let g = io::load_valid_graph(graph)?;
    let d = io::load_dehn(dehn, &g)?;
    let (a, t) = sample_interior(&g, margin, seed)?;
    let rep = build_representation(&g, &a, &t)?;
    let residual = twist_phase_check(&g, &rep, &d, edge, ell)?;

    let mut report = Report::new(Some(seed));
    report.header(&["quantity", "value"]);
    report.row(vec!["edge".into(), edge.to_string()]);
    report.row(vec!["k".into(), d.m(edge).to_string()]);
    report.row(vec!["ell".into(), ell.to_string()]);
    report.row(vec!["residual".into(), full(residual)]);
    report.row(vec!["tolerance".into(), full(tol::TWIST_PHASE)]);

    let failure = (residual > tol::TWIST_PHASE).then(|| {
        format!(
            "twist phase residual {} exceeds {}",
            full(residual),
            full(tol::TWIST_PHASE)
        )
    });
    Ok(Outcome { report, failure })
}

#[allow(clippy::too_many_arguments)]
pub fn independence(
    graph: &Path,
    m_max: u64,
    t_max: u64,
    samples: Option<usize>,
    seed: u64,
    rel_tol: f64,
    margin: f64,
    allow_large: bool,
) -> Result<Outcome, Failure> {
    let g = io::load_valid_graph(graph)?;
    let params = enumerate_dehn(&g, m_max, t_max)?;
    let n_samples = samples.unwrap_or(3 * params.len());
    let matrix = if allow_large {
        build_matrix_uncapped(&g, &params, n_samples, seed, margin)?
    } else {
        build_matrix(&g, &params, n_samples, seed, margin)?
    };
    let rr = rank_report(&matrix, rel_tol);

    let mut report = Report::new(Some(seed));
    report.comment(format!(
        "multicurves with m <= {m_max} and |t| <= {t_max}: {} columns; {} sampled points",
        rr.columns, rr.rows
    ));
    report.comment(format!(
        "rank: {} of {} at relative tolerance {}",
        rr.rank,
        rr.columns,
        full(rr.rel_tol)
    ));
    report.comment(format!("sigma ratio: {}", full(rr.sigma_ratio)));
    report.comment(format!("verdict: {}", rr.verdict));
    report.header(&["index", "sigma"]);
    for (i, s) in rr.singular_values.iter().enumerate() {
        report.row(vec![i.to_string(), full(*s)]);
    }

    let failure = (rr.verdict != Verdict::Independent).then(|| {
        format!(
            "rank {} of {} columns: {}",
            rr.rank, rr.columns, rr.verdict
        )
    });
    Ok(Outcome { report, failure })
}
