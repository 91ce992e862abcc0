//! Seeded instance generation: uniform binary sets, sphere sets of exact
//! rank, and the structured sphere corpus.

use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use std::collections::HashSet;

use crate::cube::BinaryPoint;
use crate::error::{Error, Result};
use crate::geometry::{orthonormal_complement_basis, orthonormal_span_basis, rank_of, SpherePoint, Tolerances, Vector};

pub fn random_binary(d: usize, n: usize, rng: &mut ChaCha12Rng) -> Result<Vec<BinaryPoint>> {
    if d == 0 || n == 0 {
        return Err(Error::InvalidParams("d and n must be positive".into()));
    }
    if d < 63 && (n as u128) > 1u128 << d {
        return Err(Error::InvalidParams(format!("cannot place {n} distinct points in 2^{d} cells")));
    }
    let mut seen = HashSet::with_capacity(n);
    let mut points = Vec::with_capacity(n);
    while points.len() < n {
        let p = BinaryPoint::random(d, rng);
        if seen.insert(p.clone()) {
            points.push(p);
        }
    }
    Ok(points)
}

fn gaussian_vector(d: usize, rng: &mut ChaCha12Rng) -> Vector {
    Vector::new((0..d).map(|_| rng.sample(StandardNormal)).collect()).expect("finite")
}

/// Sample `n` unit vectors spanning exactly a random `min(k, n)`-dimensional
/// subspace, pairwise separated by more than ten tie windows.
pub fn random_sphere(
    d: usize,
    n: usize,
    k: usize,
    rng: &mut ChaCha12Rng,
    tols: &Tolerances,
) -> Result<Vec<SpherePoint>> {
    if d == 0 || n == 0 {
        return Err(Error::InvalidParams("d and n must be positive".into()));
    }
    if k == 0 || k > d {
        return Err(Error::InvalidParams(format!("rank {k} out of range for dimension {d}")));
    }
    let k = k.min(n);
    let min_sep = 10.0 * tols.eps_tie;
    'resample: for _ in 0..64 {
        let subspace = orthonormal_span_basis(&(0..k).map(|_| gaussian_vector(d, rng)).collect::<Vec<_>>());
        if subspace.len() != k {
            continue;
        }
        let mut points: Vec<SpherePoint> = Vec::with_capacity(n);
        let mut attempts = 0;
        while points.len() < n {
            attempts += 1;
            if attempts > 64 * n {
                continue 'resample;
            }
            let g = gaussian_vector(k, rng);
            let mut v = Vector::zeros(d);
            for (c, b) in g.as_slice().iter().zip(&subspace) {
                v.add_scaled(b, *c);
            }
            let Ok(p) = SpherePoint::renormalized(v) else { continue };
            if points.iter().all(|q| q.distance(&p) > min_sep) {
                points.push(p);
            }
        }
        let vectors: Vec<Vector> = points.iter().map(|p| p.vector().clone()).collect();
        if rank_of(&vectors, tols.eps_pivot)? == k {
            return Ok(points);
        }
    }
    Err(Error::InvalidParams("could not sample a sphere instance of the requested rank".into()))
}

/// Vertices of a regular `k`-simplex inscribed in the sphere, embedded in
/// the first `k` coordinates of `R^d`. Rank k, full-dimensional hull.
pub fn simplex(d: usize, k: usize) -> Result<Vec<SpherePoint>> {
    if k == 0 || k > d {
        return Err(Error::InvalidParams(format!("simplex rank {k} out of range for d={d}")));
    }
    // k+1 unit vectors in R^{k+1} orthogonal to the all-ones direction,
    // expressed in a basis of that hyperplane.
    let m = k + 1;
    let ones = Vector::new(vec![1.0; m]).unwrap();
    let frame = orthonormal_complement_basis(&[ones], m, 1e-10)?;
    debug_assert_eq!(frame.len(), k);
    let mut points = Vec::with_capacity(m);
    for i in 0..m {
        let mut w = Vector::zeros(m);
        for j in 0..m {
            let centered = if i == j { 1.0 - 1.0 / m as f64 } else { -1.0 / m as f64 };
            w.add_scaled(&Vector::standard_basis(m, j), centered);
        }
        let coords: Vec<f64> = frame.iter().map(|b| w.dot(b)).collect();
        let mut v = vec![0.0; d];
        v[..k].copy_from_slice(&coords);
        points.push(SpherePoint::renormalized(Vector::new(v)?)?);
    }
    Ok(points)
}

/// The 2k cross-polytope vertices: plus and minus the first k standard
/// basis vectors of `R^d`.
pub fn cross_polytope(d: usize, k: usize) -> Result<Vec<SpherePoint>> {
    if k == 0 || k > d {
        return Err(Error::InvalidParams(format!("cross-polytope rank {k} out of range for d={d}")));
    }
    let mut points = Vec::with_capacity(2 * k);
    for i in 0..k {
        let e = Vector::standard_basis(d, i);
        points.push(SpherePoint::new(e.clone(), 1e-9)?);
        points.push(SpherePoint::new(e.negated(), 1e-9)?);
    }
    Ok(points)
}

pub fn antipodal_pair(d: usize) -> Result<Vec<SpherePoint>> {
    cross_polytope(d, 1)
}

/// `m` points on the circle at height `h` in `R^3`: rank 3 with affine
/// dimension 2, the degenerate-hull stressor.
pub fn coplanar_circle(m: usize, h: f64) -> Result<Vec<SpherePoint>> {
    if m < 3 {
        return Err(Error::InvalidParams("a coplanar circle needs at least 3 points".into()));
    }
    if h.abs() >= 1.0 || h == 0.0 || h.is_nan() {
        return Err(Error::InvalidParams("height must be in (-1, 1) and nonzero".into()));
    }
    let rho = (1.0 - h * h).sqrt();
    (0..m)
        .map(|i| {
            let theta = i as f64 * std::f64::consts::TAU / m as f64 + 0.37;
            SpherePoint::new(Vector::new(vec![rho * theta.cos(), rho * theta.sin(), h])?, 1e-9)
        })
        .collect()
}

/// The structured sphere corpus: named instances covering full-dimensional,
/// degenerate, and antipodal hull shapes.
pub fn structured_corpus() -> Vec<(String, Vec<SpherePoint>)> {
    let mut corpus = Vec::new();
    corpus.push(("antipodal-d2".to_string(), antipodal_pair(2).unwrap()));
    corpus.push(("antipodal-d3".to_string(), antipodal_pair(3).unwrap()));
    for (d, k) in [(3, 2), (3, 3), (4, 4)] {
        corpus.push((format!("simplex-k{k}-d{d}"), simplex(d, k).unwrap()));
    }
    for (d, k) in [(3, 2), (3, 3), (4, 4)] {
        corpus.push((format!("cross-k{k}-d{d}"), cross_polytope(d, k).unwrap()));
    }
    for m in [4, 5, 6, 8] {
        corpus.push((format!("circle-m{m}"), coplanar_circle(m, 0.5).unwrap()));
    }
    corpus
}

pub fn corpus_instance(name: &str) -> Result<Vec<SpherePoint>> {
    structured_corpus()
        .into_iter()
        .find(|(n, _)| n == name)
        .map(|(_, pts)| pts)
        .ok_or_else(|| Error::InvalidParams(format!("unknown corpus instance {name:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn binary_points_are_distinct() {
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let pts = random_binary(10, 20, &mut rng).unwrap();
        assert_eq!(pts.len(), 20);
        let set: HashSet<_> = pts.iter().cloned().collect();
        assert_eq!(set.len(), 20);
        assert!(random_binary(2, 5, &mut rng).is_err());
    }

    #[test]
    fn sphere_instances_have_exact_rank() {
        let tols = Tolerances::default();
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        for (d, n, k) in [(3, 5, 2), (4, 6, 3), (5, 8, 4), (2, 1, 1), (3, 2, 3)] {
            let pts = random_sphere(d, n, k, &mut rng, &tols).unwrap();
            assert_eq!(pts.len(), n);
            let vectors: Vec<Vector> = pts.iter().map(|p| p.vector().clone()).collect();
            assert_eq!(rank_of(&vectors, tols.eps_pivot).unwrap(), k.min(n));
        }
    }

    #[test]
    fn simplex_geometry() {
        for k in 1..=4usize {
            let pts = simplex(4, k).unwrap();
            assert_eq!(pts.len(), k + 1);
            let expected_ip = -1.0 / k as f64;
            for i in 0..pts.len() {
                assert!((pts[i].vector().norm() - 1.0).abs() < 1e-12);
                for j in i + 1..pts.len() {
                    assert!((pts[i].dot(&pts[j]) - expected_ip).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn circle_is_rank3_affine2() {
        let pts = coplanar_circle(6, 0.5).unwrap();
        let vectors: Vec<Vector> = pts.iter().map(|p| p.vector().clone()).collect();
        assert_eq!(rank_of(&vectors, 1e-10).unwrap(), 3);
        assert_eq!(crate::geometry::affine_dimension(&vectors, 1e-10).unwrap(), 2);
    }

    #[test]
    fn corpus_lookup() {
        assert!(corpus_instance("circle-m6").is_ok());
        assert!(corpus_instance("nope").is_err());
        for (name, pts) in structured_corpus() {
            assert!(!pts.is_empty(), "{name}");
        }
    }
}
