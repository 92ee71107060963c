//! Numerical linear-independence witness for multicurve trace functions.
//!
//! Trace functions of distinct multicurves are linearly independent as
//! functions on the representation space. At desk scale this is certified by
//! evaluating each function at randomly sampled interior points and checking
//! that the evaluation matrix has full column rank. Full rank proves
//! independence of the sampled functions; the converse direction is not
//! available to a finite sample, which is why the failing verdict is worded
//! "numerically dependent at this sample" and not "dependent".

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::fmt;

use crate::dehn::DehnParameter;
use crate::error::{Error, Result};
use crate::graph::PantsGraph;
use crate::moduli::{build_representation, sample_interior_with, RepresentationPoint};
use crate::route::{route, CurveRoute};
use crate::trace::trace_of_route;

/// Refuse matrices wider than this unless the caller opts in explicitly.
pub const COLUMN_CAP: usize = 500;

/// Trace-function evaluations: one row per sampled interior point, one
/// column per Dehn parameter, in the order supplied by the caller.
#[derive(Clone, Debug)]
pub struct EvaluationMatrix {
    pub graph_fingerprint: u64,
    pub params: Vec<DehnParameter>,
    pub seed: u64,
    pub margin: f64,
    pub entries: DMatrix<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Independent,
    NumericallyDependent,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Independent => write!(f, "independent"),
            Verdict::NumericallyDependent => write!(f, "numerically dependent at this sample"),
        }
    }
}

/// Numerical rank of the evaluation matrix with its singular spectrum.
#[derive(Clone, Debug)]
pub struct RankReport {
    pub rank: usize,
    pub columns: usize,
    pub rows: usize,
    pub rel_tol: f64,
    pub singular_values: Vec<f64>,
    /// sigma_min / sigma_max over the full spectrum; 0 for a zero matrix.
    pub sigma_ratio: f64,
    pub verdict: Verdict,
}

fn sample_rows(
    g: &PantsGraph,
    n_samples: usize,
    seed: u64,
    margin: f64,
) -> Result<Vec<RepresentationPoint>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n_samples)
        .map(|_| {
            let (angles, twists) = sample_interior_with(g, margin, &mut rng)?;
            build_representation(g, &angles, &twists)
        })
        .collect()
}

fn fill(
    g: &PantsGraph,
    params: &[DehnParameter],
    n_samples: usize,
    seed: u64,
    margin: f64,
) -> Result<EvaluationMatrix> {
    if n_samples < params.len() {
        return Err(Error::Parse(format!(
            "need at least as many sample rows as columns ({} < {})",
            n_samples,
            params.len()
        )));
    }
    let routes: Vec<CurveRoute> = params.iter().map(|d| route(g, d)).collect::<Result<_>>()?;
    let rows = sample_rows(g, n_samples, seed, margin)?;
    let cols = params.len();
    let data: Vec<f64> = (0..n_samples * cols)
        .into_par_iter()
        .map(|flat| {
            let (i, j) = (flat / cols, flat % cols);
            Ok(trace_of_route(g, &rows[i], &routes[j])?.value)
        })
        .collect::<Result<_>>()?;
    debug_assert!(data.iter().all(|v| v.is_finite()));
    Ok(EvaluationMatrix {
        graph_fingerprint: g.fingerprint(),
        params: params.to_vec(),
        seed,
        margin,
        entries: DMatrix::from_row_slice(n_samples, cols, &data),
    })
}

/// Build the evaluation matrix; rows are interior points drawn from one
/// seeded stream, entries are trace values.
pub fn build_matrix(
    g: &PantsGraph,
    params: &[DehnParameter],
    n_samples: usize,
    seed: u64,
    margin: f64,
) -> Result<EvaluationMatrix> {
    if params.len() > COLUMN_CAP {
        return Err(Error::TooManyColumns { requested: params.len(), cap: COLUMN_CAP });
    }
    fill(g, params, n_samples, seed, margin)
}

/// `build_matrix` without the column cap, for callers who asked for it.
pub fn build_matrix_uncapped(
    g: &PantsGraph,
    params: &[DehnParameter],
    n_samples: usize,
    seed: u64,
    margin: f64,
) -> Result<EvaluationMatrix> {
    fill(g, params, n_samples, seed, margin)
}

/// Singular values (descending) and the count above `rel_tol * sigma_max`.
pub fn rank_of(m: &DMatrix<f64>, rel_tol: f64) -> (usize, Vec<f64>) {
    let mut sigma: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    sigma.sort_by(|a, b| b.partial_cmp(a).expect("singular values are finite"));
    let max = sigma.first().copied().unwrap_or(0.0);
    if max == 0.0 {
        return (0, sigma);
    }
    let rank = sigma.iter().filter(|&&s| s > rel_tol * max).count();
    (rank, sigma)
}

pub fn rank_report(m: &EvaluationMatrix, rel_tol: f64) -> RankReport {
    let (rank, singular_values) = rank_of(&m.entries, rel_tol);
    let sigma_ratio = match (singular_values.first(), singular_values.last()) {
        (Some(&max), Some(&min)) if max > 0.0 => min / max,
        _ => 0.0,
    };
    let columns = m.entries.ncols();
    RankReport {
        rank,
        columns,
        rows: m.entries.nrows(),
        rel_tol,
        singular_values,
        sigma_ratio,
        verdict: if rank == columns {
            Verdict::Independent
        } else {
            Verdict::NumericallyDependent
        },
    }
}

/// Run the witness at several seeds and demand one verdict; a split vote is
/// an error, never a silent pass.
pub fn stable_verdict(
    g: &PantsGraph,
    params: &[DehnParameter],
    n_samples: usize,
    seeds: &[u64],
    margin: f64,
    rel_tol: f64,
) -> Result<Verdict> {
    let mut verdicts = seeds.iter().map(|&s| {
        let m = build_matrix(g, params, n_samples, s, margin)?;
        Ok(rank_report(&m, rel_tol).verdict)
    });
    let first = verdicts.next().ok_or_else(|| Error::Parse("no seeds given".into()))??;
    for v in verdicts {
        if v? != first {
            return Err(Error::UnstableVerdict);
        }
    }
    Ok(first)
}
