//! Generators for adversarial hidden sets that blind low-round solvers, plus
//! empirical checkers for their structural blocking properties.
//!
//! The base instance surrounds a random mask point with its full distance-2
//! sphere and a random subset of its distance-1 sphere; a random query is
//! almost always closer to the distance-2 shell, so its responses carry no
//! information about the subset. The recursive instance zero-pads an inner
//! instance, adds heavy disjoint-support blocker points, and XOR-shifts
//! everything by a fresh mask; random first-round queries land nearer to a
//! blocker than to any inner point, hiding the inner instance for a round.

pub use crate::cube::hamming_sphere;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cube::BinaryPoint;
use crate::error::{Error, Result};
use crate::oracle::{HiddenSet, TieBreakPolicy};

/// Multipliers for the recursive construction. Paper-scale defaults are
/// `ell = 100 t^2` blocker weight, `m1 = 25 (t + ceil(log2(q/delta2)))`
/// blockers, and padded dimension `2500 t^2 (t + ceil(log2(q/delta2))) + t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HardConsts {
    pub ell_mult: u64,
    pub m1_mult: u64,
    pub dim_mult: u64,
}

impl Default for HardConsts {
    fn default() -> Self {
        HardConsts { ell_mult: 100, m1_mult: 25, dim_mult: 2500 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HardInstanceParams {
    /// Dimension of the innermost base instance.
    pub base_t: usize,
    /// Recursion level; level 1 is the base instance itself.
    pub level: u32,
    /// Query budget the construction defends against.
    pub q: u64,
    /// Per-level failure probability share, in (0, 1).
    pub delta2: f64,
    pub consts: HardConsts,
    /// Hard upper bound on the generated dimension.
    pub dim_cap: usize,
}

impl HardInstanceParams {
    pub fn new(base_t: usize, level: u32, q: u64, delta2: f64) -> Self {
        HardInstanceParams {
            base_t,
            level,
            q,
            delta2,
            consts: HardConsts::default(),
            dim_cap: 1 << 24,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.base_t < 3 {
            return Err(Error::InvalidParams("base dimension must be at least 3".into()));
        }
        if self.level < 1 {
            return Err(Error::InvalidParams("level must be at least 1".into()));
        }
        if self.q < 1 {
            return Err(Error::InvalidParams("query budget must be at least 1".into()));
        }
        if !(self.delta2 > 0.0 && self.delta2 < 1.0) {
            return Err(Error::InvalidParams("delta2 must lie in (0, 1)".into()));
        }
        let c = &self.consts;
        if c.ell_mult < 1 || c.m1_mult < 1 || c.dim_mult < 1 {
            return Err(Error::InvalidParams("multipliers must be positive".into()));
        }
        if c.ell_mult.checked_mul(c.m1_mult).is_none_or(|p| p > c.dim_mult) {
            return Err(Error::InvalidParams(
                "blocker supports need ell_mult * m1_mult <= dim_mult".into(),
            ));
        }
        Ok(())
    }
}

/// Construction record for one generated instance. Base instances carry the
/// sampled distance-1 subset; recursive levels carry the blocker supports and
/// nest the inner record.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HardInstanceMeta {
    /// XOR mask applied to the whole level.
    pub u: String,
    /// Half-open index ranges `[start, end)` of the blocker supports.
    pub block_supports: Vec<(usize, usize)>,
    pub inner_dim: usize,
    pub outer_dim: usize,
    /// Base level only: the sampled subset of the distance-1 sphere.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inner_instance: Option<Box<HardInstanceMeta>>,
}

impl HardInstanceMeta {
    pub fn mask(&self) -> Result<BinaryPoint> {
        self.u.parse()
    }

    pub fn ell(&self) -> usize {
        self.block_supports.first().map_or(0, |(s, e)| e - s)
    }

    pub fn m1(&self) -> usize {
        self.block_supports.len()
    }
}

/// Closed-form per-level sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LevelPlan {
    pub ell: u128,
    pub m1: u128,
    pub outer_dim: u128,
}

pub fn log2_ceil_ratio(q: u64, delta2: f64) -> u64 {
    ((q as f64) / delta2).log2().ceil() as u64
}

/// Sizes of the next level built on an inner instance of dimension `t`.
pub fn plan_level(t: usize, q: u64, delta2: f64, consts: &HardConsts) -> LevelPlan {
    let lg = u128::from(log2_ceil_ratio(q, delta2));
    let t = t as u128;
    let ell = u128::from(consts.ell_mult) * t * t;
    let m1 = u128::from(consts.m1_mult) * (t + lg);
    let outer_dim = u128::from(consts.dim_mult) * t * t * (t + lg) + t;
    LevelPlan { ell, m1, outer_dim }
}

fn sample_neighbor_subset(u: &BinaryPoint, rng: &mut ChaCha12Rng) -> Vec<BinaryPoint> {
    let mut s = Vec::new();
    for i in 0..u.dim() {
        if rng.random::<bool>() {
            let mut p = u.clone();
            p.flip(i);
            s.push(p);
        }
    }
    s
}

fn d1_from_mask(u: &BinaryPoint, rng: &mut ChaCha12Rng) -> Result<(HiddenSet, HardInstanceMeta)> {
    let d = u.dim();
    let mut points: Vec<BinaryPoint> = hamming_sphere(u, 2)?.collect();
    let s = sample_neighbor_subset(u, rng);
    points.extend(s.iter().cloned());
    let meta = HardInstanceMeta {
        u: u.to_string(),
        block_supports: Vec::new(),
        inner_dim: d,
        outer_dim: d,
        s: Some(s.iter().map(|p| p.to_string()).collect()),
        inner_instance: None,
    };
    Ok((HiddenSet::new_binary(points, TieBreakPolicy::LexMin)?, meta))
}

/// Base adversarial instance: the full distance-2 sphere of a random mask
/// point plus an independent coin-flip subset of its distance-1 sphere.
pub fn gen_hard_d1(d: usize, seed: u64) -> Result<(HiddenSet, HardInstanceMeta)> {
    if d < 3 {
        return Err(Error::InvalidParams(format!("base instance needs d >= 3, got {d}")));
    }
    let mut mask_rng = ChaCha12Rng::seed_from_u64(seed);
    mask_rng.set_stream(0);
    let u = BinaryPoint::random(d, &mut mask_rng);
    let mut subset_rng = ChaCha12Rng::seed_from_u64(seed);
    subset_rng.set_stream(1);
    d1_from_mask(&u, &mut subset_rng)
}

/// Base instance with a fixed mask and a freshly sampled distance-1 subset;
/// used to check that query transcripts do not depend on the subset.
pub fn gen_hard_d1_with_mask(u: &BinaryPoint, seed: u64) -> Result<(HiddenSet, HardInstanceMeta)> {
    if u.dim() < 3 {
        return Err(Error::InvalidParams("base instance needs d >= 3".into()));
    }
    let mut subset_rng = ChaCha12Rng::seed_from_u64(seed);
    subset_rng.set_stream(1);
    d1_from_mask(u, &mut subset_rng)
}

/// True iff `z` is strictly nearer to the distance-2 sphere of `u` than to
/// its distance-1 sphere. With w = dist(z, u) the two distances are |w - 2|
/// and |w - 1|, so this holds exactly when w >= 2.
pub fn check_d1_blocking(u: &BinaryPoint, z: &BinaryPoint) -> bool {
    assert_eq!(u.dim(), z.dim(), "points must share a dimension");
    let w = u.distance(z) as i64;
    (w - 2).abs() < (w - 1).abs()
}

/// Recursive adversarial instance: `level - 1` applications of the padding
/// and blocker step over a base instance of dimension `base_t`.
pub fn gen_hard_recursive(params: &HardInstanceParams, seed: u64) -> Result<(HiddenSet, HardInstanceMeta)> {
    params.validate()?;
    let (hidden, mut meta) = gen_hard_d1(params.base_t, seed)?;
    let mut points = hidden.binary_points()?.to_vec();
    let mut dim = params.base_t;

    for level in 2..=params.level {
        let plan = plan_level(dim, params.q, params.delta2, &params.consts);
        if plan.outer_dim > params.dim_cap as u128 {
            return Err(Error::DimensionCapExceeded {
                dim: plan.outer_dim,
                cap: params.dim_cap,
            });
        }
        let outer = plan.outer_dim as usize;
        let ell = plan.ell as usize;
        let m1 = plan.m1 as usize;

        let mut next: Vec<BinaryPoint> = Vec::with_capacity(points.len() + m1);
        for p in &points {
            let mut padded = BinaryPoint::zeros(outer);
            for i in 0..dim {
                if p.get(i) {
                    padded.set(i, true);
                }
            }
            next.push(padded);
        }
        let mut supports = Vec::with_capacity(m1);
        for b in 0..m1 {
            let start = dim + b * ell;
            let end = start + ell;
            supports.push((start, end));
            let mut blocker = BinaryPoint::zeros(outer);
            for i in start..end {
                blocker.set(i, true);
            }
            next.push(blocker);
        }

        let mut mask_rng = ChaCha12Rng::seed_from_u64(seed);
        mask_rng.set_stream(u64::from(level));
        let u = BinaryPoint::random(outer, &mut mask_rng);
        for p in &mut next {
            *p = p.xor(&u);
        }

        meta = HardInstanceMeta {
            u: u.to_string(),
            block_supports: supports,
            inner_dim: dim,
            outer_dim: outer,
            s: None,
            inner_instance: Some(Box::new(meta)),
        };
        points = next;
        dim = outer;
    }

    Ok((HiddenSet::new_binary(points, TieBreakPolicy::LexMin)?, meta))
}

/// Outcome of one blocking trial in the un-shifted frame: is `z` strictly
/// nearer to some blocker than to every point supported on the inner
/// coordinates? The distance to that inner family is the weight of `z`
/// outside the first `inner_dim` coordinates.
pub fn blocking_outcome(meta: &HardInstanceMeta, z: &BinaryPoint) -> Result<bool> {
    if meta.block_supports.is_empty() {
        return Err(Error::InvalidParams(
            "blocking outcome needs a recursive level with blockers".into(),
        ));
    }
    if z.dim() != meta.outer_dim {
        return Err(Error::DimensionMismatch { expected: meta.outer_dim, got: z.dim() });
    }
    let dist_c = z.weight_in_range(meta.inner_dim, meta.outer_dim);
    let weight = z.weight();
    let dist_b = meta
        .block_supports
        .iter()
        .map(|&(start, end)| {
            let overlap = z.weight_in_range(start, end);
            weight + (end - start) - 2 * overlap
        })
        .min()
        .expect("nonempty blockers");
    Ok(dist_c > dist_b)
}

/// Monte-Carlo estimate of the blocking probability over uniform queries.
/// Sample i draws from stream i of the seed, so sharding across workers
/// cannot change the count.
pub fn estimate_blocking(meta: &HardInstanceMeta, samples: usize, seed: u64) -> Result<f64> {
    if samples == 0 {
        return Err(Error::InvalidParams("sample count must be positive".into()));
    }
    if meta.block_supports.is_empty() {
        return Err(Error::InvalidParams(
            "blocking estimate needs a recursive level with blockers".into(),
        ));
    }
    let outer = meta.outer_dim;
    let hits: usize = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let z = BinaryPoint::random(outer, &mut rng);
            usize::from(blocking_outcome(meta, &z).expect("validated meta"))
        })
        .sum();
    Ok(hits as f64 / samples as f64)
}
