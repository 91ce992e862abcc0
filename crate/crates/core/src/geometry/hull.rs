//! Facet-normal enumeration for the sphere solver's hull loop.
//!
//! Brute force over size-k subsets with a supporting-hyperplane test. Desk
//! scale is a dozen points in up to four effective dimensions, where this is
//! trivially correct and doubles as the test oracle for anything faster.

use crate::cube::index_subsets;
use crate::error::{Error, Result};

use super::{gs_residual, lift_coords, orthonormal_span_basis, project_coords, Vector};

/// The finite direction set queried in one hull-expansion round: unit
/// normals, deduplicated by angle, all lying in the span of the generating
/// points.
#[derive(Clone, Debug)]
pub struct FacetNormalSet {
    normals: Vec<Vector>,
    dedup_tol: f64,
}

impl FacetNormalSet {
    pub fn new(dedup_tol: f64) -> Self {
        FacetNormalSet {
            normals: Vec::new(),
            dedup_tol,
        }
    }

    /// Insert a unit normal unless one within `dedup_tol` radians is present.
    pub fn insert(&mut self, normal: Vector) -> bool {
        // For unit vectors the chord length bounds the angle.
        if self
            .normals
            .iter()
            .any(|m| m.distance(&normal) <= self.dedup_tol)
        {
            return false;
        }
        self.normals.push(normal);
        true
    }

    pub fn normals(&self) -> &[Vector] {
        &self.normals
    }

    pub fn len(&self) -> usize {
        self.normals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.normals.is_empty()
    }

    pub fn dedup_tol(&self) -> f64 {
        self.dedup_tol
    }
}

fn complement_line(dir_basis: &[Vector], dim: usize) -> Option<Vector> {
    debug_assert_eq!(dir_basis.len() + 1, dim);
    for i in 0..dim {
        if let Some(w) = gs_residual(&Vector::standard_basis(dim, i), dir_basis) {
            return Some(w);
        }
    }
    None
}

/// Supporting-hyperplane test for a size-k subset of `points`, where k is the
/// rank of the whole set. If the affine hull of the subset supports the point
/// set, returns the outward unit normal (within the span of `points`) and its
/// offset; returns `None` when points lie strictly on both sides.
pub fn supporting_hyperplane_test(
    points: &[Vector],
    subset: &[usize],
    eps_side: f64,
) -> Result<Option<(Vector, f64)>> {
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    let d = points[0].dim();
    for &i in subset {
        if i >= points.len() {
            return Err(Error::InvalidParams(format!("subset index {i} out of range")));
        }
    }
    let span = orthonormal_span_basis(points);
    let k = span.len();
    if k == 0 || subset.len() != k {
        return Err(Error::NotAFaceCandidate {
            reason: format!("need {k} affinely independent points, got subset of {}", subset.len()),
        });
    }
    let coords: Vec<Vector> = points.iter().map(|p| project_coords(p, &span)).collect();
    let q: Vec<&Vector> = subset.iter().map(|&i| &coords[i]).collect();
    match oriented_support_checked(&coords, &q, k, eps_side)? {
        Some((normal, offset)) => Ok(Some((lift_coords(&normal, &span, d), offset))),
        None => Ok(None),
    }
}

/// Core facet test in span coordinates. `q` holds the k candidate face
/// points; returns the outward (normal, offset) if their hyperplane supports
/// every point in `coords`.
fn oriented_support(
    coords: &[Vector],
    q: &[&Vector],
    k: usize,
    eps_side: f64,
) -> Option<(Vector, f64)> {
    let diffs: Vec<Vector> = q[1..].iter().map(|p| p.sub(q[0])).collect();
    let dir_basis = orthonormal_span_basis(&diffs);
    if dir_basis.len() + 1 != k {
        return None;
    }
    let normal = complement_line(&dir_basis, k)?;
    let offset = normal.dot(q[0]);
    let mut above: f64 = 0.0;
    let mut below: f64 = 0.0;
    for p in coords {
        let v = normal.dot(p) - offset;
        above = above.max(v);
        below = below.max(-v);
    }
    if above <= eps_side {
        Some((normal, offset))
    } else if below <= eps_side {
        Some((normal.negated(), -offset))
    } else {
        None
    }
}

/// Fallible variant used by the public op: affinely dependent subsets are an
/// error, non-supporting subsets are `None`.
fn oriented_support_checked(
    coords: &[Vector],
    q: &[&Vector],
    k: usize,
    eps_side: f64,
) -> Result<Option<(Vector, f64)>> {
    let diffs: Vec<Vector> = q[1..].iter().map(|p| p.sub(q[0])).collect();
    if orthonormal_span_basis(&diffs).len() + 1 != k {
        return Err(Error::NotAFaceCandidate {
            reason: "subset is affinely dependent".into(),
        });
    }
    Ok(oriented_support(coords, q, k, eps_side))
}

/// Outward facet normals (with offsets) of a full-dimensional polytope given
/// in its own coordinate space, by brute force over all size-`dim` subsets.
fn outward_facet_normals(coords: &[Vector], dim: usize, eps_side: f64, dedup_tol: f64) -> Vec<(Vector, f64)> {
    let mut found: Vec<(Vector, f64)> = Vec::new();
    for subset in index_subsets(coords.len(), dim) {
        let q: Vec<&Vector> = subset.iter().map(|&i| &coords[i]).collect();
        if let Some((normal, offset)) = oriented_support(coords, &q, dim, eps_side) {
            if !found.iter().any(|(m, _)| m.distance(&normal) <= dedup_tol) {
                found.push((normal, offset));
            }
        }
    }
    found
}

/// Enumerate the query-direction set for a set of distinct unit vectors.
///
/// Dispatch on k = rank and a = affine dimension (always k or k-1):
/// a single point yields itself and its antipode; a full-dimensional hull
/// (a = k) yields both unit normals of every facet hyperplane; a degenerate
/// hull (a = k-1) yields both normals of its affine hull plus the outward
/// in-hull normal of every facet of the polytope inside that hull.
///
/// Every unit vector in the span that is outside the hull (and not one of the
/// points) has strictly larger inner product with some returned normal than
/// all of the points.
pub fn enumerate_query_normals(points: &[Vector], eps_side: f64, dedup_tol: f64) -> Result<FacetNormalSet> {
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    for p in points {
        let dev = (p.norm() - 1.0).abs();
        if dev > 1e-6 {
            return Err(Error::NonUnitQuery { deviation: dev });
        }
    }
    let d = points[0].dim();
    let mut set = FacetNormalSet::new(dedup_tol);
    if points.len() == 1 {
        let x = points[0].normalized()?;
        set.insert(x.negated());
        set.insert(x);
        return Ok(set);
    }

    let span = orthonormal_span_basis(points);
    let k = span.len();
    let coords: Vec<Vector> = points.iter().map(|p| project_coords(p, &span)).collect();
    let diffs: Vec<Vector> = coords[1..].iter().map(|p| p.sub(&coords[0])).collect();
    let affine_frame = orthonormal_span_basis(&diffs);
    let a = affine_frame.len();

    if a == k {
        for (normal, _) in outward_facet_normals(&coords, k, eps_side, dedup_tol) {
            let lifted = lift_coords(&normal, &span, d);
            set.insert(lifted.negated());
            set.insert(lifted);
        }
    } else if a + 1 == k {
        let w = complement_line(&affine_frame, k).ok_or_else(|| {
            Error::InvalidParams("affine hull has no normal direction in the span".into())
        })?;
        let lifted_w = lift_coords(&w, &span, d);
        set.insert(lifted_w.negated());
        set.insert(lifted_w);
        if a > 0 {
            let in_hull: Vec<Vector> = coords
                .iter()
                .map(|p| project_coords(&p.sub(&coords[0]), &affine_frame))
                .collect();
            for (normal, _) in outward_facet_normals(&in_hull, a, eps_side, dedup_tol) {
                let in_span = lift_coords(&normal, &affine_frame, k);
                set.insert(lift_coords(&in_span, &span, d));
            }
        }
    } else {
        return Err(Error::InvalidParams(format!(
            "affine dimension {a} inconsistent with rank {k}"
        )));
    }
    Ok(set)
}

/// True if some normal in `normals` strictly separates `y` from `points`
/// with margin greater than `eps_side`.
pub fn is_strictly_separated(normals: &[Vector], points: &[Vector], y: &Vector, eps_side: f64) -> bool {
    normals.iter().any(|m| {
        let best = points.iter().map(|p| m.dot(p)).fold(f64::NEG_INFINITY, f64::max);
        m.dot(y) > best + eps_side
    })
}
