//! Two-round solver for the Hamming nearest-point model: a batch of uniform
//! random queries, then all points within a fixed radius of the distinct
//! first-round responses. Recovery is probabilistic; the solver guarantees
//! only the round discipline.

use std::collections::HashSet;

use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::cube::BinaryPoint;
use crate::error::{Error, Result};
use crate::oracle::BinaryNearestOracle;

/// First-round query budget and second-round ball radius.
///
/// The sufficiency-driven budget grows as exp(96 d ln(12 n^2) / r), far past
/// any machine integer for every feasible (d, n), so `t` is kept exact as a
/// big integer; only desk-scale overrides are runnable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoRoundParams {
    pub t: BigUint,
    pub r: u32,
}

impl TwoRoundParams {
    pub fn runnable_t(&self) -> Result<u64> {
        u64::try_from(&self.t).map_err(|_| Error::BudgetNotRunnable {
            log2_t: log2_biguint(&self.t),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamMode {
    /// Derive (t, r) from the sufficiency bound, minimizing total queries.
    Paper,
    /// Pass the provided overrides through verbatim.
    Desk,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DeskOverrides {
    pub t: u64,
    pub r: u32,
}

/// log2 of the smallest sufficient first-round budget for ball radius `r`:
/// the budget must exceed exp(96 d ln(12 n^2) / r).
pub fn paper_log2_t(d: u64, n: u64, r: u32) -> f64 {
    let x = 96.0 * d as f64 * (12.0 * (n as f64) * (n as f64)).ln() / f64::from(r);
    x / std::f64::consts::LN_2
}

fn log2_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (1.0 + (lo - hi).exp2()).log2()
}

fn log2_ball(d: u64, r: u32) -> f64 {
    let mut log2_term = 0.0;
    let mut log2_sum = 0.0;
    for i in 1..=u64::from(r) {
        log2_term += ((d - i + 1) as f64 / i as f64).log2();
        log2_sum = log2_add(log2_sum, log2_term);
    }
    log2_sum
}

/// Smallest integer strictly greater than 2^m, up to float rounding that is
/// absorbed by a small upward nudge of the exponent.
fn ceil_exp2_big(m: f64) -> BigUint {
    assert!(m.is_finite() && m >= 0.0);
    let m = m * (1.0 + 1e-12) + 1e-12;
    if m < 52.0 {
        BigUint::from(m.exp2().floor() as u64) + 1u32
    } else {
        let shift = m.floor() as u64 - 52;
        let mantissa = ((m - m.floor()).exp2() * (1u64 << 52) as f64).ceil() as u64 + 1;
        BigUint::from(mantissa) << (shift as usize)
    }
}

pub fn log2_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 53 {
        return (u64::try_from(x).expect("fits") as f64).log2();
    }
    let top = u64::try_from(&(x >> (bits - 53))).expect("53 bits");
    (top as f64).log2() + (bits - 53) as f64
}

/// Choose first-round budget and ball radius.
///
/// Paper mode scans r in [1, d/8], sets t(r) just above the sufficiency
/// bound, and minimizes t(r) * (1 + ball_size(r)). Desk mode returns the
/// overrides verbatim.
pub fn choose_two_round_params(
    d: u64,
    n: u64,
    mode: ParamMode,
    overrides: Option<DeskOverrides>,
) -> Result<TwoRoundParams> {
    if d < 1 || n < 1 {
        return Err(Error::InvalidParams("d and n must be positive".into()));
    }
    match mode {
        ParamMode::Desk => {
            let ov = overrides
                .ok_or_else(|| Error::InvalidParams("desk mode requires overrides".into()))?;
            if ov.t < 1 {
                return Err(Error::InvalidParams("round-one budget must be at least 1".into()));
            }
            if u64::from(ov.r) > d {
                return Err(Error::InvalidParams(format!("radius {} exceeds dimension {d}", ov.r)));
            }
            Ok(TwoRoundParams { t: BigUint::from(ov.t), r: ov.r })
        }
        ParamMode::Paper => {
            let r_max = (d / 8) as u32;
            if r_max < 1 {
                return Err(Error::InvalidParams(format!(
                    "paper mode needs d >= 8 for a nonempty radius range, got d = {d}"
                )));
            }
            let mut best: Option<(f64, u32)> = None;
            for r in 1..=r_max {
                let objective = paper_log2_t(d, n, r) + log2_add(0.0, log2_ball(d, r));
                if best.is_none_or(|(obj, _)| objective < obj) {
                    best = Some((objective, r));
                }
            }
            let (_, r) = best.expect("range nonempty");
            Ok(TwoRoundParams {
                t: ceil_exp2_big(paper_log2_t(d, n, r)),
                r,
            })
        }
    }
}

#[derive(Debug, Clone)]
pub struct HammingSolveReport {
    pub points: Vec<BinaryPoint>,
    pub queries: usize,
    pub rounds: usize,
    pub round_sizes: Vec<usize>,
}

/// Run the two-round reconstruction. Round one makes exactly `t` uniform
/// queries (sampled with replacement from the given seed); round two queries
/// the deduplicated union of Hamming balls around the distinct round-one
/// responses. The output is every distinct response seen.
pub fn solve_hamming_two_round(
    oracle: &mut BinaryNearestOracle,
    params: &TwoRoundParams,
    seed: u64,
) -> Result<HammingSolveReport> {
    let d = oracle.dim();
    let t = params.runnable_t()?;
    if t < 1 {
        return Err(Error::InvalidParams("round-one budget must be at least 1".into()));
    }
    let radius = params.r as usize;
    if radius > d {
        return Err(Error::RadiusOutOfRange { radius, d });
    }
    let before = oracle.ledger_report();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);

    let round1: Vec<BinaryPoint> = (0..t).map(|_| BinaryPoint::random(d, &mut rng)).collect();
    let handle = oracle.open_round()?;
    let responses1 = oracle.submit_round(handle, &round1)?;

    let mut seen_responses: HashSet<BinaryPoint> = HashSet::new();
    let mut output: Vec<BinaryPoint> = Vec::new();
    let mut centers: Vec<BinaryPoint> = Vec::new();
    for z in &responses1 {
        if seen_responses.insert(z.clone()) {
            output.push(z.clone());
            centers.push(z.clone());
        }
    }

    let mut in_round2: HashSet<BinaryPoint> = HashSet::new();
    let mut round2: Vec<BinaryPoint> = Vec::new();
    for z in &centers {
        for p in crate::cube::hamming_ball(z, radius)? {
            if in_round2.insert(p.clone()) {
                round2.push(p);
            }
        }
    }
    let handle2 = oracle.open_round()?;
    let responses2 = oracle.submit_round(handle2, &round2)?;
    for z in responses2 {
        if seen_responses.insert(z.clone()) {
            output.push(z);
        }
    }

    let after = oracle.ledger_report();
    output.sort();
    Ok(HammingSolveReport {
        points: output,
        queries: after.total_queries - before.total_queries,
        rounds: after.round_count() - before.round_count(),
        round_sizes: vec![round1.len(), round2.len()],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{HiddenSet, TieBreakPolicy};

    fn bp(s: &str) -> BinaryPoint {
        s.parse().unwrap()
    }

    fn oracle_for(points: &[&str], policy: TieBreakPolicy) -> BinaryNearestOracle {
        let pts = points.iter().map(|s| bp(s)).collect();
        BinaryNearestOracle::new(&HiddenSet::new_binary(pts, policy).unwrap()).unwrap()
    }

    #[test]
    fn desk_mode_is_passthrough() {
        let params =
            choose_two_round_params(24, 4, ParamMode::Desk, Some(DeskOverrides { t: 4096, r: 6 }))
                .unwrap();
        assert_eq!(params.t, BigUint::from(4096u64));
        assert_eq!(params.r, 6);
        assert_eq!(params.runnable_t().unwrap(), 4096);
    }

    #[test]
    fn paper_budget_decreases_in_radius() {
        for r in 1..10 {
            assert!(paper_log2_t(128, 4, r) > paper_log2_t(128, 4, r + 1));
        }
    }

    #[test]
    fn paper_mode_satisfies_sufficiency() {
        for (d, n) in [(8u64, 1u64), (16, 2), (64, 4), (256, 10)] {
            let params = choose_two_round_params(d, n, ParamMode::Paper, None).unwrap();
            assert!(params.r >= 1 && u64::from(params.r) <= d / 8);
            let required = paper_log2_t(d, n, params.r);
            assert!(
                log2_biguint(&params.t) >= required - 1e-9,
                "d={d} n={n}: log2 t = {} < {required}",
                log2_biguint(&params.t)
            );
        }
    }

    #[test]
    fn paper_mode_needs_d_at_least_8() {
        assert!(choose_two_round_params(7, 2, ParamMode::Paper, None).is_err());
    }

    #[test]
    fn ceil_exp2_is_strictly_above() {
        for m in [0.0, 1.5, 3.0, 10.25, 51.9, 52.0, 300.7, 2753.2] {
            let v = ceil_exp2_big(m);
            assert!(
                log2_biguint(&v) >= m,
                "m={m}: got log2 {}",
                log2_biguint(&v)
            );
        }
        assert_eq!(ceil_exp2_big(3.0), BigUint::from(9u32));
    }

    #[test]
    fn singleton_always_recovered() {
        let mut oracle = oracle_for(&["101010"], TieBreakPolicy::PreferRevealed);
        let params =
            choose_two_round_params(6, 1, ParamMode::Desk, Some(DeskOverrides { t: 1, r: 0 })).unwrap();
        let report = solve_hamming_two_round(&mut oracle, &params, 99).unwrap();
        assert_eq!(report.points, vec![bp("101010")]);
        assert_eq!(report.rounds, 2);
    }

    #[test]
    fn full_radius_always_recovers() {
        let hidden = ["0000", "0111", "1010", "1101"];
        for policy in TieBreakPolicy::ALL {
            let mut oracle = oracle_for(&hidden, policy);
            let params =
                choose_two_round_params(4, 4, ParamMode::Desk, Some(DeskOverrides { t: 2, r: 4 }))
                    .unwrap();
            let report = solve_hamming_two_round(&mut oracle, &params, 7).unwrap();
            let expected: Vec<BinaryPoint> = {
                let mut v: Vec<BinaryPoint> = hidden.iter().map(|s| bp(s)).collect();
                v.sort();
                v
            };
            assert_eq!(report.points, expected, "policy {policy}");
        }
    }

    #[test]
    fn ledger_shows_exactly_two_rounds() {
        let mut oracle = oracle_for(&["000000", "111111"], TieBreakPolicy::LexMax);
        let params =
            choose_two_round_params(6, 2, ParamMode::Desk, Some(DeskOverrides { t: 16, r: 2 }))
                .unwrap();
        let report = solve_hamming_two_round(&mut oracle, &params, 5).unwrap();
        let ledger = oracle.ledger_report();
        assert_eq!(ledger.round_count(), 2);
        assert_eq!(ledger.round_sizes()[0], 16);
        assert_eq!(ledger.round_sizes(), report.round_sizes);
        assert_eq!(report.queries, ledger.total_queries);
    }

    #[test]
    fn identical_seeds_give_identical_runs() {
        let params =
            choose_two_round_params(8, 2, ParamMode::Desk, Some(DeskOverrides { t: 8, r: 1 }))
                .unwrap();
        let run = |seed| {
            let mut oracle = oracle_for(&["00000000", "11110000"], TieBreakPolicy::LexMin);
            let report = solve_hamming_two_round(&mut oracle, &params, seed).unwrap();
            (report.points, report.round_sizes)
        };
        assert_eq!(run(3), run(3));
    }
}
