//! Low-dimensional linear algebra and convex-hull machinery: rank,
//! orthonormal complements, affine dimension, and enumeration of the
//! facet-normal query set used by the sphere solver.

mod hull;

pub use hull::{enumerate_query_normals, is_strictly_separated, supporting_hyperplane_test, FacetNormalSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numerical tolerances shared across geometry, oracles and solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Allowed deviation of a unit vector's norm from 1.
    pub eps_norm: f64,
    /// Side-of-hyperplane slack for supporting tests and separation margins.
    pub eps_side: f64,
    /// Pivot threshold for rank decisions.
    pub eps_pivot: f64,
    /// Inner-product window inside which sphere-oracle responses count as tied.
    pub eps_tie: f64,
    /// Angular tolerance (radians) for deduplicating facet normals.
    pub dedup_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            eps_norm: 1e-9,
            eps_side: 1e-9,
            eps_pivot: 1e-10,
            eps_tie: 1e-9,
            dedup_tol: 1e-7,
        }
    }
}

/// A point of `R^d` with finite coordinates.
#[derive(Clone, PartialEq)]
pub struct Vector {
    coords: Vec<f64>,
}

impl Vector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFiniteInput);
        }
        Ok(Vector { coords })
    }

    pub fn zeros(d: usize) -> Self {
        Vector { coords: vec![0.0; d] }
    }

    pub fn standard_basis(d: usize, i: usize) -> Self {
        let mut v = Self::zeros(d);
        v.coords[i] = 1.0;
        v
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coords
    }

    pub fn dot(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.coords.iter().zip(&other.coords).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Vector {
            coords: self.coords.iter().map(|c| c * s).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.dim(), other.dim());
        Vector {
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn add_scaled(&mut self, other: &Self, s: f64) {
        debug_assert_eq!(self.dim(), other.dim());
        for (a, b) in self.coords.iter_mut().zip(&other.coords) {
            *a += b * s;
        }
    }

    pub fn negated(&self) -> Self {
        self.scaled(-1.0)
    }

    pub fn distance(&self, other: &Self) -> f64 {
        self.sub(other).norm()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NonFiniteInput);
        }
        Ok(self.scaled(1.0 / n))
    }
}

impl std::ops::Index<usize> for Vector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.coords[i]
    }
}

impl std::fmt::Debug for Vector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Vector({:?})", self.coords)
    }
}

/// Total order on finite coordinate vectors, first differing entry decides.
pub fn lex_cmp(a: &Vector, b: &Vector) -> std::cmp::Ordering {
    for (x, y) in a.as_slice().iter().zip(b.as_slice()) {
        match x.partial_cmp(y).expect("finite coordinates") {
            std::cmp::Ordering::Equal => continue,
            ord => return ord,
        }
    }
    std::cmp::Ordering::Equal
}

/// A unit vector of `R^d`.
#[derive(Clone, PartialEq, Debug)]
pub struct SpherePoint {
    v: Vector,
}

impl SpherePoint {
    pub fn new(v: Vector, eps_norm: f64) -> Result<Self> {
        let dev = (v.norm() - 1.0).abs();
        if dev > eps_norm {
            return Err(Error::NonUnitQuery { deviation: dev });
        }
        Ok(SpherePoint { v })
    }

    /// Rescale to unit norm; rejects (near-)zero vectors.
    pub fn renormalized(v: Vector) -> Result<Self> {
        Ok(SpherePoint { v: v.normalized()? })
    }

    pub fn vector(&self) -> &Vector {
        &self.v
    }

    pub fn dim(&self) -> usize {
        self.v.dim()
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.v.dot(&other.v)
    }

    pub fn distance(&self, other: &Self) -> f64 {
        self.v.distance(&other.v)
    }

    pub fn negated(&self) -> Self {
        SpherePoint { v: self.v.negated() }
    }
}

fn check_finite(points: &[Vector]) -> Result<()> {
    for p in points {
        if p.as_slice().iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFiniteInput);
        }
    }
    Ok(())
}

fn check_same_dim(points: &[Vector]) -> Result<usize> {
    let d = points[0].dim();
    for p in points {
        if p.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, got: p.dim() });
        }
    }
    Ok(d)
}

/// Numerical rank via Gaussian elimination with partial pivoting; pivots
/// below `eps_pivot` in absolute value end the elimination for their column.
pub fn rank_of(points: &[Vector], eps_pivot: f64) -> Result<usize> {
    if points.is_empty() {
        return Ok(0);
    }
    check_finite(points)?;
    let d = check_same_dim(points)?;
    let mut rows: Vec<Vec<f64>> = points.iter().map(|p| p.as_slice().to_vec()).collect();
    let mut rank = 0;
    for col in 0..d {
        let (best_row, best_val) = (rank..rows.len())
            .map(|r| (r, rows[r][col].abs()))
            .fold((rank, 0.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        if best_val <= eps_pivot {
            continue;
        }
        rows.swap(rank, best_row);
        let pivot = rows[rank][col];
        for r in rank + 1..rows.len() {
            let factor = rows[r][col] / pivot;
            if factor != 0.0 {
                let (lead, rest) = rows.split_at_mut(rank + 1);
                let pivot_row = &lead[rank];
                let row = &mut rest[r - rank - 1];
                for c in col..d {
                    row[c] -= factor * pivot_row[c];
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    Ok(rank)
}

/// Residual-norm threshold for accepting a vector into an orthonormal basis.
/// Inputs at desk scale are unit vectors, so the cutoff is scale-free.
const GS_ACCEPT: f64 = 1e-7;

/// Modified Gram-Schmidt with one re-orthogonalization pass. Returns the
/// orthonormalized residual of `v` against `basis`, or `None` if `v` lies in
/// the span of `basis`.
pub(crate) fn gs_residual(v: &Vector, basis: &[Vector]) -> Option<Vector> {
    gs_residual_with(v, basis, GS_ACCEPT)
}

fn gs_residual_with(v: &Vector, basis: &[Vector], accept: f64) -> Option<Vector> {
    let mut w = v.clone();
    for _ in 0..2 {
        for b in basis {
            let c = w.dot(b);
            w.add_scaled(b, -c);
        }
    }
    if w.norm() > accept {
        Some(w.scaled(1.0 / w.norm()))
    } else {
        None
    }
}

/// Orthonormal basis of the span of `points`.
pub fn orthonormal_span_basis(points: &[Vector]) -> Vec<Vector> {
    let mut basis: Vec<Vector> = Vec::new();
    for p in points {
        if let Some(w) = gs_residual(p, &basis) {
            basis.push(w);
        }
    }
    basis
}

/// Orthonormal basis of the orthogonal complement of `span(points)` in `R^d`,
/// built by extending the span basis with standard basis vectors.
pub fn orthonormal_complement_basis(points: &[Vector], d: usize, eps_pivot: f64) -> Result<Vec<Vector>> {
    check_finite(points)?;
    for p in points {
        if p.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, got: p.dim() });
        }
    }
    let accept = GS_ACCEPT.max(eps_pivot);
    let span = orthonormal_span_basis(points);
    let mut all = span.clone();
    let mut complement = Vec::new();
    for i in 0..d {
        if all.len() == d {
            break;
        }
        if let Some(w) = gs_residual_with(&Vector::standard_basis(d, i), &all, accept) {
            all.push(w.clone());
            complement.push(w);
        }
    }
    Ok(complement)
}

/// Rank of the difference set `{p - p0}`: the dimension of the affine hull.
pub fn affine_dimension(points: &[Vector], eps_pivot: f64) -> Result<usize> {
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    check_finite(points)?;
    check_same_dim(points)?;
    let p0 = &points[0];
    let diffs: Vec<Vector> = points[1..].iter().map(|p| p.sub(p0)).collect();
    rank_of(&diffs, eps_pivot)
}

/// Coordinates of `v` in the given orthonormal basis.
pub(crate) fn project_coords(v: &Vector, basis: &[Vector]) -> Vector {
    Vector {
        coords: basis.iter().map(|b| v.dot(b)).collect(),
    }
}

/// Map coordinates in an orthonormal basis back to the ambient space.
pub(crate) fn lift_coords(coords: &Vector, basis: &[Vector], ambient: usize) -> Vector {
    let mut v = Vector::zeros(ambient);
    for (c, b) in coords.as_slice().iter().zip(basis) {
        v.add_scaled(b, *c);
    }
    v
}

/// Convex combination of points with the given weights.
pub fn convex_combination(points: &[Vector], weights: &[f64]) -> Result<Vector> {
    if points.is_empty() || points.len() != weights.len() {
        return Err(Error::InvalidParams("points/weights length mismatch".into()));
    }
    let d = check_same_dim(points)?;
    let mut acc = Vector::zeros(d);
    for (p, &w) in points.iter().zip(weights) {
        acc.add_scaled(p, w);
    }
    Ok(acc)
}
