//! Codemaker side: hidden sets, the three query models with pluggable
//! adversarial tie-breaking, and round-structured query accounting.
//!
//! Nearest-point oracles return a hidden point; the restricted-distance
//! oracle returns only an integer. They are separate types so a solver
//! cannot accidentally use more power than its query model grants.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cube::BinaryPoint;
use crate::error::{Error, Result};
use crate::geometry::{lex_cmp, SpherePoint, Tolerances};

/// Deterministic rule for selecting among equally-near hidden points.
///
/// `PreferRevealed` is the canonical adversary: among tied candidates it
/// returns an already-revealed point when one exists (starving solvers that
/// rely on ties producing new points), else the lexicographically largest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieBreakPolicy {
    LexMin,
    LexMax,
    PreferRevealed,
}

impl TieBreakPolicy {
    pub const ALL: [TieBreakPolicy; 3] =
        [TieBreakPolicy::LexMin, TieBreakPolicy::LexMax, TieBreakPolicy::PreferRevealed];
}

impl fmt::Display for TieBreakPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TieBreakPolicy::LexMin => "lex-min",
            TieBreakPolicy::LexMax => "lex-max",
            TieBreakPolicy::PreferRevealed => "prefer-revealed",
        })
    }
}

impl std::str::FromStr for TieBreakPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lex-min" | "lex_min" => Ok(TieBreakPolicy::LexMin),
            "lex-max" | "lex_max" => Ok(TieBreakPolicy::LexMax),
            "prefer-revealed" | "prefer_revealed" => Ok(TieBreakPolicy::PreferRevealed),
            other => Err(Error::Parse(format!("unknown tie policy {other:?}"))),
        }
    }
}

/// The codemaker's secret set, binary or sphere variant.
#[derive(Clone, Debug)]
pub enum HiddenPoints {
    Binary(Vec<BinaryPoint>),
    Sphere(Vec<SpherePoint>),
}

impl HiddenPoints {
    pub fn len(&self) -> usize {
        match self {
            HiddenPoints::Binary(v) => v.len(),
            HiddenPoints::Sphere(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        match self {
            HiddenPoints::Binary(v) => v[0].dim(),
            HiddenPoints::Sphere(v) => v[0].dim(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct HiddenSet {
    points: HiddenPoints,
    policy: TieBreakPolicy,
}

impl HiddenSet {
    pub fn new_binary(points: Vec<BinaryPoint>, policy: TieBreakPolicy) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidHiddenSet("hidden set is empty".into()));
        }
        let d = points[0].dim();
        if d == 0 {
            return Err(Error::InvalidHiddenSet("dimension must be positive".into()));
        }
        for p in &points {
            if p.dim() != d {
                return Err(Error::InvalidHiddenSet("points have mixed dimensions".into()));
            }
        }
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                if points[i] == points[j] {
                    return Err(Error::InvalidHiddenSet(format!(
                        "duplicate point {}",
                        points[i]
                    )));
                }
            }
        }
        Ok(HiddenSet {
            points: HiddenPoints::Binary(points),
            policy,
        })
    }

    pub fn new_sphere(points: Vec<SpherePoint>, policy: TieBreakPolicy, eps_tie: f64) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidHiddenSet("hidden set is empty".into()));
        }
        let d = points[0].dim();
        for p in &points {
            if p.dim() != d {
                return Err(Error::InvalidHiddenSet("points have mixed dimensions".into()));
            }
        }
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                if points[i].distance(&points[j]) <= 2.0 * eps_tie {
                    return Err(Error::InvalidHiddenSet(format!(
                        "points {i} and {j} are closer than twice the tie window"
                    )));
                }
            }
        }
        Ok(HiddenSet {
            points: HiddenPoints::Sphere(points),
            policy,
        })
    }

    pub fn points(&self) -> &HiddenPoints {
        &self.points
    }

    pub fn policy(&self) -> TieBreakPolicy {
        self.policy
    }

    pub fn with_policy(mut self, policy: TieBreakPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points.dim()
    }

    pub fn binary_points(&self) -> Result<&[BinaryPoint]> {
        match &self.points {
            HiddenPoints::Binary(v) => Ok(v),
            HiddenPoints::Sphere(_) => Err(Error::VariantMismatch(
                "expected a binary hidden set, got sphere".into(),
            )),
        }
    }

    pub fn sphere_points(&self) -> Result<&[SpherePoint]> {
        match &self.points {
            HiddenPoints::Sphere(v) => Ok(v),
            HiddenPoints::Binary(_) => Err(Error::VariantMismatch(
                "expected a sphere hidden set, got binary".into(),
            )),
        }
    }
}

/// A query pattern over `{0,1,2}^d`; the symbol 2 marks an ignored position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TernaryPattern {
    symbols: Vec<u8>,
}

impl TernaryPattern {
    pub fn new(symbols: Vec<u8>) -> Result<Self> {
        if symbols.iter().any(|&s| s > 2) {
            return Err(Error::Parse("ternary symbols must be 0, 1 or 2".into()));
        }
        Ok(TernaryPattern { symbols })
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    pub fn dim(&self) -> usize {
        self.symbols.len()
    }
}

/// A restriction query: a strictly increasing index set and the bit pattern
/// the hidden points are compared against on those indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RestrictedQuery {
    indices: Vec<usize>,
    pattern: Vec<bool>,
}

impl RestrictedQuery {
    pub fn new(indices: Vec<usize>, pattern: Vec<bool>) -> Result<Self> {
        if indices.len() != pattern.len() {
            return Err(Error::Parse("index and pattern lengths differ".into()));
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Parse("indices must be strictly increasing".into()));
        }
        Ok(RestrictedQuery { indices, pattern })
    }

    /// Query restricted to the first `bits.len()` coordinates.
    pub fn prefix(bits: &[bool]) -> Self {
        RestrictedQuery {
            indices: (0..bits.len()).collect(),
            pattern: bits.to_vec(),
        }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn pattern(&self) -> &[bool] {
        &self.pattern
    }

    pub fn max_index(&self) -> Option<usize> {
        self.indices.last().copied()
    }

    /// Restricted Hamming distance to a single point.
    pub fn distance_to(&self, x: &BinaryPoint) -> usize {
        self.indices
            .iter()
            .zip(&self.pattern)
            .filter(|(&i, &b)| x.get(i) != b)
            .count()
    }
}

/// Indices where the symbol is not 2, paired with those symbols as bits.
pub fn ternary_to_restricted(t: &TernaryPattern) -> RestrictedQuery {
    let mut indices = Vec::new();
    let mut pattern = Vec::new();
    for (i, &s) in t.symbols().iter().enumerate() {
        if s != 2 {
            indices.push(i);
            pattern.push(s == 1);
        }
    }
    RestrictedQuery { indices, pattern }
}

/// Inverse of [`ternary_to_restricted`] at a declared dimension.
pub fn restricted_to_ternary(rq: &RestrictedQuery, d: usize) -> Result<TernaryPattern> {
    let mut symbols = vec![2u8; d];
    for (&i, &b) in rq.indices.iter().zip(&rq.pattern) {
        if i >= d {
            return Err(Error::DimensionMismatch { expected: d, got: i + 1 });
        }
        symbols[i] = u8::from(b);
    }
    Ok(TernaryPattern { symbols })
}

/// How the queries of a ledger round were delivered.
///
/// `Batch` rounds receive all queries at once and release responses only
/// after the round closes; this is the certified adaptive-round discipline.
/// `Sequential` rounds group a dependent chain of single queries (coordinate
/// descent) into one accounted round and are flagged as such in reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoundKind {
    Batch,
    Sequential,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LedgerState {
    Idle,
    OpenRound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoundHandle(usize);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundSummary {
    pub kind: RoundKind,
    pub queries: usize,
}

/// Snapshot of the query ledger: totals and per-round sizes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerReport {
    pub total_queries: usize,
    pub rounds: Vec<RoundSummary>,
    pub state: LedgerState,
}

impl LedgerReport {
    pub fn round_count(&self) -> usize {
        self.rounds.len()
    }

    pub fn round_sizes(&self) -> Vec<usize> {
        self.rounds.iter().map(|r| r.queries).collect()
    }
}

struct RoundLog<Q, R> {
    kind: RoundKind,
    queries: Vec<Q>,
    responses: Vec<R>,
    closed: bool,
}

/// Round bookkeeping shared by all oracle types.
struct Rounds<Q, R> {
    rounds: Vec<RoundLog<Q, R>>,
    open: Option<usize>,
}

impl<Q: Clone, R: Clone> Rounds<Q, R> {
    fn new() -> Self {
        Rounds { rounds: Vec::new(), open: None }
    }

    fn open_round(&mut self, kind: RoundKind) -> Result<RoundHandle> {
        if self.open.is_some() {
            return Err(Error::RoundAlreadyOpen);
        }
        self.rounds.push(RoundLog {
            kind,
            queries: Vec::new(),
            responses: Vec::new(),
            closed: false,
        });
        let idx = self.rounds.len() - 1;
        self.open = Some(idx);
        Ok(RoundHandle(idx))
    }

    fn expect_open(&self, handle: RoundHandle) -> Result<usize> {
        match self.open {
            Some(idx) if idx == handle.0 => Ok(idx),
            _ => Err(Error::NoOpenRound),
        }
    }

    fn close(&mut self, handle: RoundHandle) -> Result<()> {
        let idx = self.expect_open(handle)?;
        self.rounds[idx].closed = true;
        self.open = None;
        Ok(())
    }

    /// Record a single query/response pair. Outside any round this makes a
    /// closed singleton batch; inside a sequential round it appends; inside a
    /// batch round it is an adaptivity violation.
    fn record_single(&mut self, q: Q, r: R) -> Result<()> {
        match self.open {
            None => {
                self.rounds.push(RoundLog {
                    kind: RoundKind::Batch,
                    queries: vec![q],
                    responses: vec![r],
                    closed: true,
                });
                Ok(())
            }
            Some(idx) => match self.rounds[idx].kind {
                RoundKind::Sequential => {
                    self.rounds[idx].queries.push(q);
                    self.rounds[idx].responses.push(r);
                    Ok(())
                }
                RoundKind::Batch => Err(Error::AdaptivityViolation(
                    "single queries may not interleave with an open batch round".into(),
                )),
            },
        }
    }

    fn record_batch(&mut self, handle: RoundHandle, queries: Vec<Q>, responses: Vec<R>) -> Result<()> {
        let idx = self.expect_open(handle)?;
        let round = &mut self.rounds[idx];
        if round.kind != RoundKind::Batch || !round.queries.is_empty() {
            return Err(Error::AdaptivityViolation(
                "batch submission requires a fresh batch round".into(),
            ));
        }
        round.queries = queries;
        round.responses = responses;
        round.closed = true;
        self.open = None;
        Ok(())
    }

    fn responses(&self, handle: RoundHandle) -> Result<&[R]> {
        self.responses_at(handle.0)
    }

    fn responses_at(&self, index: usize) -> Result<&[R]> {
        let round = self.rounds.get(index).ok_or(Error::NoOpenRound)?;
        if !round.closed {
            return Err(Error::AdaptivityViolation(
                "responses are readable only after the round is closed".into(),
            ));
        }
        Ok(&round.responses)
    }

    fn queries(&self, index: usize) -> &[Q] {
        &self.rounds[index].queries
    }

    fn report(&self) -> LedgerReport {
        LedgerReport {
            total_queries: self.rounds.iter().map(|r| r.queries.len()).sum(),
            rounds: self
                .rounds
                .iter()
                .map(|r| RoundSummary { kind: r.kind, queries: r.queries.len() })
                .collect(),
            state: if self.open.is_some() { LedgerState::OpenRound } else { LedgerState::Idle },
        }
    }
}

fn select_by_policy<F>(policy: TieBreakPolicy, candidates: &[usize], revealed: &[bool], cmp: F) -> usize
where
    F: Fn(usize, usize) -> Ordering,
{
    debug_assert!(!candidates.is_empty());
    let pick_extreme = |ids: &[usize], want_max: bool| -> usize {
        let mut best = ids[0];
        for &i in &ids[1..] {
            let ord = cmp(i, best);
            if (want_max && ord == Ordering::Greater) || (!want_max && ord == Ordering::Less) {
                best = i;
            }
        }
        best
    };
    match policy {
        TieBreakPolicy::LexMin => pick_extreme(candidates, false),
        TieBreakPolicy::LexMax => pick_extreme(candidates, true),
        TieBreakPolicy::PreferRevealed => {
            let revealed_ties: Vec<usize> =
                candidates.iter().copied().filter(|&i| revealed[i]).collect();
            if revealed_ties.is_empty() {
                pick_extreme(candidates, true)
            } else {
                pick_extreme(&revealed_ties, true)
            }
        }
    }
}

/// Nearest-point oracle over a binary hidden set.
pub struct BinaryNearestOracle {
    points: Vec<BinaryPoint>,
    policy: TieBreakPolicy,
    revealed: Vec<bool>,
    rounds: Rounds<BinaryPoint, BinaryPoint>,
}

impl BinaryNearestOracle {
    pub fn new(hidden: &HiddenSet) -> Result<Self> {
        let points = hidden.binary_points()?.to_vec();
        let revealed = vec![false; points.len()];
        Ok(BinaryNearestOracle {
            points,
            policy: hidden.policy(),
            revealed,
            rounds: Rounds::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    fn answer(&mut self, q: &BinaryPoint) -> Result<BinaryPoint> {
        if q.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: q.dim() });
        }
        let best = self.points.iter().map(|x| x.distance(q)).min().expect("nonempty");
        let candidates: Vec<usize> = self
            .points
            .iter()
            .enumerate()
            .filter(|(_, x)| x.distance(q) == best)
            .map(|(i, _)| i)
            .collect();
        let chosen = select_by_policy(self.policy, &candidates, &self.revealed, |a, b| {
            self.points[a].lex_cmp(&self.points[b])
        });
        self.revealed[chosen] = true;
        Ok(self.points[chosen].clone())
    }

    /// Single query: a round of its own unless a sequential round is open.
    pub fn query(&mut self, q: &BinaryPoint) -> Result<BinaryPoint> {
        if let Some(idx) = self.rounds.open {
            if self.rounds.rounds[idx].kind == RoundKind::Batch {
                return Err(Error::AdaptivityViolation(
                    "single queries may not interleave with an open batch round".into(),
                ));
            }
        }
        let r = self.answer(q)?;
        self.rounds.record_single(q.clone(), r.clone())?;
        Ok(r)
    }

    pub fn open_round(&mut self) -> Result<RoundHandle> {
        self.rounds.open_round(RoundKind::Batch)
    }

    pub fn open_sequential_round(&mut self) -> Result<RoundHandle> {
        self.rounds.open_round(RoundKind::Sequential)
    }

    pub fn close_round(&mut self, handle: RoundHandle) -> Result<()> {
        self.rounds.close(handle)
    }

    pub fn submit_round(&mut self, handle: RoundHandle, queries: &[BinaryPoint]) -> Result<Vec<BinaryPoint>> {
        self.rounds.expect_open(handle)?;
        let mut responses = Vec::with_capacity(queries.len());
        for q in queries {
            responses.push(self.answer(q)?);
        }
        self.rounds.record_batch(handle, queries.to_vec(), responses.clone())?;
        Ok(responses)
    }

    pub fn round_responses(&self, handle: RoundHandle) -> Result<&[BinaryPoint]> {
        self.rounds.responses(handle)
    }

    pub fn round_responses_at(&self, index: usize) -> Result<&[BinaryPoint]> {
        self.rounds.responses_at(index)
    }

    pub fn round_queries(&self, index: usize) -> &[BinaryPoint] {
        self.rounds.queries(index)
    }

    pub fn ledger_report(&self) -> LedgerReport {
        self.rounds.report()
    }
}

/// Nearest-point oracle over a sphere hidden set. Selection is by inner
/// product within an `eps_tie` window, so the argmin-distance and
/// argmax-inner-product readings agree by construction.
pub struct SphereNearestOracle {
    points: Vec<SpherePoint>,
    policy: TieBreakPolicy,
    eps_tie: f64,
    eps_norm: f64,
    revealed: Vec<bool>,
    rounds: Rounds<SpherePoint, SpherePoint>,
}

impl SphereNearestOracle {
    pub fn new(hidden: &HiddenSet, tols: &Tolerances) -> Result<Self> {
        let points = hidden.sphere_points()?.to_vec();
        let revealed = vec![false; points.len()];
        Ok(SphereNearestOracle {
            points,
            policy: hidden.policy(),
            eps_tie: tols.eps_tie,
            eps_norm: tols.eps_norm,
            revealed,
            rounds: Rounds::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    fn answer(&mut self, q: &SpherePoint) -> Result<SpherePoint> {
        if q.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: q.dim() });
        }
        let dev = (q.vector().norm() - 1.0).abs();
        if dev > self.eps_norm {
            return Err(Error::NonUnitQuery { deviation: dev });
        }
        let best = self
            .points
            .iter()
            .map(|x| x.dot(q))
            .fold(f64::NEG_INFINITY, f64::max);
        let candidates: Vec<usize> = self
            .points
            .iter()
            .enumerate()
            .filter(|(_, x)| x.dot(q) >= best - self.eps_tie)
            .map(|(i, _)| i)
            .collect();
        let chosen = select_by_policy(self.policy, &candidates, &self.revealed, |a, b| {
            lex_cmp(self.points[a].vector(), self.points[b].vector())
        });
        self.revealed[chosen] = true;
        Ok(self.points[chosen].clone())
    }

    pub fn query(&mut self, q: &SpherePoint) -> Result<SpherePoint> {
        if let Some(idx) = self.rounds.open {
            if self.rounds.rounds[idx].kind == RoundKind::Batch {
                return Err(Error::AdaptivityViolation(
                    "single queries may not interleave with an open batch round".into(),
                ));
            }
        }
        let r = self.answer(q)?;
        self.rounds.record_single(q.clone(), r.clone())?;
        Ok(r)
    }

    pub fn open_round(&mut self) -> Result<RoundHandle> {
        self.rounds.open_round(RoundKind::Batch)
    }

    pub fn submit_round(&mut self, handle: RoundHandle, queries: &[SpherePoint]) -> Result<Vec<SpherePoint>> {
        self.rounds.expect_open(handle)?;
        let mut responses = Vec::with_capacity(queries.len());
        for q in queries {
            responses.push(self.answer(q)?);
        }
        self.rounds.record_batch(handle, queries.to_vec(), responses.clone())?;
        Ok(responses)
    }

    pub fn round_responses(&self, handle: RoundHandle) -> Result<&[SpherePoint]> {
        self.rounds.responses(handle)
    }

    pub fn ledger_report(&self) -> LedgerReport {
        self.rounds.report()
    }
}

/// Restricted-distance oracle: answers only the minimum restricted Hamming
/// distance, never a point.
pub struct StrongOracle {
    points: Vec<BinaryPoint>,
    rounds: Rounds<RestrictedQuery, usize>,
}

impl StrongOracle {
    pub fn new(hidden: &HiddenSet) -> Result<Self> {
        let points = hidden.binary_points()?.to_vec();
        Ok(StrongOracle { points, rounds: Rounds::new() })
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    fn answer(&self, rq: &RestrictedQuery) -> Result<usize> {
        if let Some(max) = rq.max_index() {
            if max >= self.dim() {
                return Err(Error::DimensionMismatch { expected: self.dim(), got: max + 1 });
            }
        }
        Ok(self
            .points
            .iter()
            .map(|x| rq.distance_to(x))
            .min()
            .expect("nonempty"))
    }

    pub fn query(&mut self, rq: &RestrictedQuery) -> Result<usize> {
        if let Some(idx) = self.rounds.open {
            if self.rounds.rounds[idx].kind == RoundKind::Batch {
                return Err(Error::AdaptivityViolation(
                    "single queries may not interleave with an open batch round".into(),
                ));
            }
        }
        let r = self.answer(rq)?;
        self.rounds.record_single(rq.clone(), r)?;
        Ok(r)
    }

    pub fn query_ternary(&mut self, t: &TernaryPattern) -> Result<usize> {
        if t.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: t.dim() });
        }
        self.query(&ternary_to_restricted(t))
    }

    pub fn open_round(&mut self) -> Result<RoundHandle> {
        self.rounds.open_round(RoundKind::Batch)
    }

    pub fn open_sequential_round(&mut self) -> Result<RoundHandle> {
        self.rounds.open_round(RoundKind::Sequential)
    }

    pub fn close_round(&mut self, handle: RoundHandle) -> Result<()> {
        self.rounds.close(handle)
    }

    pub fn submit_round(&mut self, handle: RoundHandle, queries: &[RestrictedQuery]) -> Result<Vec<usize>> {
        self.rounds.expect_open(handle)?;
        let mut responses = Vec::with_capacity(queries.len());
        for q in queries {
            responses.push(self.answer(q)?);
        }
        self.rounds.record_batch(handle, queries.to_vec(), responses.clone())?;
        Ok(responses)
    }

    pub fn round_responses(&self, handle: RoundHandle) -> Result<&[usize]> {
        self.rounds.responses(handle)
    }

    pub fn round_queries(&self, index: usize) -> &[RestrictedQuery] {
        self.rounds.queries(index)
    }

    pub fn round_kinds(&self) -> Vec<RoundKind> {
        self.rounds.rounds.iter().map(|r| r.kind).collect()
    }

    pub fn ledger_report(&self) -> LedgerReport {
        self.rounds.report()
    }
}
