//! Deterministic solver for sphere hidden sets.
//!
//! Phase one finds a linearly independent basis of the hidden set by
//! querying orthogonal-complement directions until none reveal a new
//! component. Phase two repeatedly queries every facet normal of the convex
//! hull of the points found so far; an empty round of new points certifies
//! that the hull contains the whole hidden set.

use crate::error::{Error, Result};
use crate::geometry::{enumerate_query_normals, orthonormal_complement_basis, SpherePoint, Tolerances, Vector};
use crate::oracle::SphereNearestOracle;

#[derive(Debug, Clone)]
pub struct SphereSolveOptions {
    pub tols: Tolerances,
    /// Cap on hull-loop iterations; exceeding `max_hull_points + 1` means the
    /// oracle keeps producing points it should not have.
    pub max_hull_points: usize,
}

impl Default for SphereSolveOptions {
    fn default() -> Self {
        SphereSolveOptions {
            tols: Tolerances::default(),
            max_hull_points: 1024,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SphereSolveReport {
    pub recovered: Vec<SpherePoint>,
    pub basis_size: usize,
    pub queries: usize,
    pub rounds: usize,
    pub hull_iterations: usize,
}

fn vectors_of(points: &[SpherePoint]) -> Vec<Vector> {
    points.iter().map(|p| p.vector().clone()).collect()
}

/// Find a maximal linearly independent subset of the hidden set. One round
/// per iteration, each querying both signs of an orthonormal basis of the
/// complement of what is already spanned.
pub fn find_basis(
    oracle: &mut SphereNearestOracle,
    d: usize,
    opts: &SphereSolveOptions,
) -> Result<Vec<SpherePoint>> {
    let mut basis: Vec<SpherePoint> = Vec::new();
    loop {
        let complement = orthonormal_complement_basis(&vectors_of(&basis), d, opts.tols.eps_pivot)?;
        if complement.is_empty() {
            break;
        }
        let mut queries = Vec::with_capacity(2 * complement.len());
        for v in &complement {
            queries.push(SpherePoint::new(v.clone(), opts.tols.eps_norm)?);
            queries.push(SpherePoint::new(v.negated(), opts.tols.eps_norm)?);
        }
        let handle = oracle.open_round()?;
        let responses = oracle.submit_round(handle, &queries)?;

        let mut best: Option<(f64, &SpherePoint)> = None;
        for x in &responses {
            let strength = complement
                .iter()
                .map(|v| x.vector().dot(v).abs())
                .fold(0.0, f64::max);
            if strength > opts.tols.eps_side && best.as_ref().is_none_or(|(s, _)| strength > *s) {
                best = Some((strength, x));
            }
        }
        match best {
            Some((_, x)) => basis.push(x.clone()),
            None => break,
        }
        if basis.len() > d {
            return Err(Error::IterationBudgetExceeded { max_iterations: d });
        }
    }
    Ok(basis)
}

/// One hull-expansion round: query every facet normal of the current hull
/// and return the responses that are new points. An empty result certifies
/// termination.
pub fn expand_hull_once(
    oracle: &mut SphereNearestOracle,
    current: &[SpherePoint],
    opts: &SphereSolveOptions,
) -> Result<Vec<SpherePoint>> {
    let normals = enumerate_query_normals(&vectors_of(current), opts.tols.eps_side, opts.tols.dedup_tol)?;
    let queries: Vec<SpherePoint> = normals
        .normals()
        .iter()
        .map(|m| SpherePoint::new(m.clone(), opts.tols.eps_norm))
        .collect::<Result<_>>()?;
    let handle = oracle.open_round()?;
    let responses = oracle.submit_round(handle, &queries)?;

    let mut new_points: Vec<SpherePoint> = Vec::new();
    for x in responses {
        let known = current.iter().chain(new_points.iter()).any(|p| p.distance(&x) <= opts.tols.eps_tie);
        if !known {
            new_points.push(x);
        }
    }
    Ok(new_points)
}

/// Recover the whole hidden set.
pub fn solve_sphere(
    oracle: &mut SphereNearestOracle,
    d: usize,
    opts: &SphereSolveOptions,
) -> Result<SphereSolveReport> {
    let before = oracle.ledger_report();

    let basis = find_basis(oracle, d, opts)?;
    let basis_size = basis.len();
    let mut recovered = basis;
    let mut hull_iterations = 0;
    loop {
        hull_iterations += 1;
        if hull_iterations > opts.max_hull_points + 1 {
            return Err(Error::IterationBudgetExceeded {
                max_iterations: opts.max_hull_points + 1,
            });
        }
        let new_points = expand_hull_once(oracle, &recovered, opts)?;
        if new_points.is_empty() {
            break;
        }
        recovered.extend(new_points);
    }

    let after = oracle.ledger_report();
    Ok(SphereSolveReport {
        recovered,
        basis_size,
        queries: after.total_queries - before.total_queries,
        rounds: after.round_count() - before.round_count(),
        hull_iterations,
    })
}
