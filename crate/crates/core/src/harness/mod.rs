//! Experiment front end: configuration, seeded trial execution, recovery
//! verification, parameter sweeps, and machine-readable records.

pub mod files;
pub mod instances;

use std::fmt;
use std::path::PathBuf;
use std::time::Instant;

use rand_chacha::ChaCha12Rng;
use rand::SeedableRng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Tolerances;
use crate::hardgen::{gen_hard_d1, gen_hard_recursive, HardInstanceParams};
use crate::oracle::{
    BinaryNearestOracle, HiddenPoints, HiddenSet, SphereNearestOracle, StrongOracle, TieBreakPolicy,
};
use crate::solvers::{
    choose_two_round_params, solve_hamming_two_round, solve_sphere, solve_strong,
    solve_strong_leveled, DeskOverrides, ParamMode, SphereSolveOptions,
};

/// Identifier of the pseudo-random scheme embedded in every record: ChaCha12
/// streams keyed by a splitmix64 derivation of (base seed, counter).
pub const RNG_ID: &str = "chacha12-splitmix-v1";

/// Counter-based seed derivation (splitmix64 over base + counter), so
/// parallel trials can never reorder randomness.
pub fn derive_seed(base: u64, counter: u64) -> u64 {
    let mut z = base.wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(counter.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn trial_rng(base: u64, counter: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(derive_seed(base, counter))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Problem {
    Sphere,
    Hamming,
    Strong,
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Problem::Sphere => "sphere",
            Problem::Hamming => "hamming",
            Problem::Strong => "strong",
        })
    }
}

impl std::str::FromStr for Problem {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sphere" => Ok(Problem::Sphere),
            "hamming" => Ok(Problem::Hamming),
            "strong" => Ok(Problem::Strong),
            other => Err(Error::Parse(format!("unknown problem {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverId {
    Sphere,
    Strong,
    StrongLeveled,
    HammingTwoRound,
}

impl fmt::Display for SolverId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolverId::Sphere => "sphere",
            SolverId::Strong => "strong",
            SolverId::StrongLeveled => "strong-leveled",
            SolverId::HammingTwoRound => "hamming-two-round",
        })
    }
}

impl std::str::FromStr for SolverId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sphere" => Ok(SolverId::Sphere),
            "strong" => Ok(SolverId::Strong),
            "strong-leveled" | "strong_leveled" => Ok(SolverId::StrongLeveled),
            "hamming-two-round" | "hamming_two_round" => Ok(SolverId::HammingTwoRound),
            other => Err(Error::Parse(format!("unknown solver {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InstanceSpec {
    Random { d: usize, n: usize, k: Option<usize> },
    HardD1 { d: usize },
    HardRec(HardInstanceParams),
    File(PathBuf),
    Corpus(String),
}

impl fmt::Display for InstanceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InstanceSpec::Random { d, n, k } => match k {
                Some(k) => write!(f, "random(d={d},n={n},k={k})"),
                None => write!(f, "random(d={d},n={n})"),
            },
            InstanceSpec::HardD1 { d } => write!(f, "hard-d1(d={d})"),
            InstanceSpec::HardRec(p) => write!(
                f,
                "hard-rec(t={},level={},q={},delta2={})",
                p.base_t, p.level, p.q, p.delta2
            ),
            InstanceSpec::File(path) => write!(f, "file:{}", path.display()),
            InstanceSpec::Corpus(name) => write!(f, "corpus:{name}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub problem: Problem,
    pub solver: SolverId,
    pub instance: InstanceSpec,
    pub tie_policy: TieBreakPolicy,
    pub seed: u64,
    pub trials: u32,
    /// Two-round solver parameters.
    pub mode: ParamMode,
    pub desk_t: Option<u64>,
    pub desk_r: Option<u32>,
    pub tols: Tolerances,
    /// Include wall-clock timings in records. Off by default so result files
    /// are byte-identical across repeated runs.
    pub timing: bool,
}

impl ExperimentConfig {
    pub fn new(problem: Problem, solver: SolverId, instance: InstanceSpec) -> Self {
        ExperimentConfig {
            problem,
            solver,
            instance,
            tie_policy: TieBreakPolicy::PreferRevealed,
            seed: 0,
            trials: 1,
            mode: ParamMode::Desk,
            desk_t: None,
            desk_r: None,
            tols: Tolerances::default(),
            timing: false,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::InvalidParams("trials must be at least 1".into()));
        }
        let compatible = matches!(
            (self.problem, self.solver),
            (Problem::Sphere, SolverId::Sphere)
                | (Problem::Strong, SolverId::Strong)
                | (Problem::Strong, SolverId::StrongLeveled)
                | (Problem::Hamming, SolverId::HammingTwoRound)
        );
        if !compatible {
            return Err(Error::IncompatibleSolver {
                solver: self.solver.to_string(),
                problem: self.problem.to_string(),
            });
        }
        Ok(())
    }
}

/// One line of the results file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub problem: Problem,
    pub solver: SolverId,
    pub instance: String,
    pub tie_policy: TieBreakPolicy,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    pub base_seed: u64,
    pub trial: u32,
    pub rng: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    pub queries: usize,
    pub rounds: usize,
    pub round_sizes: Vec<usize>,
    pub success: bool,
    pub recovered_count: usize,
    pub hidden_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

pub fn records_to_jsonl(records: &[ResultRecord]) -> Result<String> {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).map_err(|e| Error::Parse(e.to_string()))?);
        out.push('\n');
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOutcome {
    pub equal: bool,
    pub missing: Vec<String>,
    pub extra: Vec<String>,
}

/// Set comparison between a recovered set and the hidden truth. Binary
/// points must match exactly; sphere points are paired bijectively to the
/// nearest hidden point within `eps_tie`.
pub fn verify_recovery(recovered: &HiddenPoints, hidden: &HiddenSet, eps_tie: f64) -> Result<VerifyOutcome> {
    match (recovered, hidden.points()) {
        (HiddenPoints::Binary(rec), HiddenPoints::Binary(truth)) => {
            let rec_set: std::collections::HashSet<_> = rec.iter().collect();
            let truth_set: std::collections::HashSet<_> = truth.iter().collect();
            let missing: Vec<String> =
                truth.iter().filter(|p| !rec_set.contains(p)).map(|p| p.to_string()).collect();
            let extra: Vec<String> =
                rec.iter().filter(|p| !truth_set.contains(p)).map(|p| p.to_string()).collect();
            Ok(VerifyOutcome { equal: missing.is_empty() && extra.is_empty(), missing, extra })
        }
        (HiddenPoints::Sphere(rec), HiddenPoints::Sphere(truth)) => {
            let mut used = vec![false; rec.len()];
            let mut missing = Vec::new();
            for t in truth {
                let found = rec.iter().enumerate().find(|(i, p)| !used[*i] && p.distance(t) <= eps_tie);
                match found {
                    Some((i, _)) => used[i] = true,
                    None => missing.push(format!("{:?}", t.vector().as_slice())),
                }
            }
            let extra: Vec<String> = rec
                .iter()
                .zip(&used)
                .filter(|(_, &u)| !u)
                .map(|(p, _)| format!("{:?}", p.vector().as_slice()))
                .collect();
            Ok(VerifyOutcome { equal: missing.is_empty() && extra.is_empty(), missing, extra })
        }
        _ => Err(Error::VariantMismatch("recovered and hidden sets have different variants".into())),
    }
}

fn build_instance(config: &ExperimentConfig, trial: u32, preloaded: Option<&HiddenSet>) -> Result<HiddenSet> {
    let instance_seed = derive_seed(config.seed, u64::from(trial) * 2);
    let hidden = match &config.instance {
        InstanceSpec::Random { d, n, k } => {
            let mut rng = ChaCha12Rng::seed_from_u64(instance_seed);
            match config.problem {
                Problem::Sphere => {
                    let k = k.unwrap_or((*d).min(*n));
                    let pts = instances::random_sphere(*d, *n, k, &mut rng, &config.tols)?;
                    HiddenSet::new_sphere(pts, config.tie_policy, config.tols.eps_tie)?
                }
                Problem::Hamming | Problem::Strong => {
                    let pts = instances::random_binary(*d, *n, &mut rng)?;
                    HiddenSet::new_binary(pts, config.tie_policy)?
                }
            }
        }
        InstanceSpec::HardD1 { d } => gen_hard_d1(*d, instance_seed)?.0,
        InstanceSpec::HardRec(params) => gen_hard_recursive(params, instance_seed)?.0,
        InstanceSpec::File(_) => preloaded
            .cloned()
            .ok_or_else(|| Error::InvalidParams("file instance was not preloaded".into()))?,
        InstanceSpec::Corpus(name) => {
            let pts = instances::corpus_instance(name)?;
            HiddenSet::new_sphere(pts, config.tie_policy, config.tols.eps_tie)?
        }
    };
    Ok(hidden.with_policy(config.tie_policy))
}

/// Materialize the hidden set a given trial would solve.
pub fn build_instance_for_trial(config: &ExperimentConfig, trial: u32) -> Result<HiddenSet> {
    let preloaded = match &config.instance {
        InstanceSpec::File(path) => {
            Some(files::load_hidden_set(path, config.tie_policy, config.tols.eps_tie)?)
        }
        _ => None,
    };
    build_instance(config, trial, preloaded.as_ref())
}

fn run_trial(config: &ExperimentConfig, trial: u32, preloaded: Option<&HiddenSet>) -> Result<ResultRecord> {
    let hidden = build_instance(config, trial, preloaded)?;
    let solver_seed = derive_seed(config.seed, u64::from(trial) * 2 + 1);
    let started = Instant::now();

    let (recovered, k, queries, rounds, round_sizes, mode) = match config.solver {
        SolverId::Sphere => {
            let mut oracle = SphereNearestOracle::new(&hidden, &config.tols)?;
            let opts = SphereSolveOptions {
                tols: config.tols,
                max_hull_points: hidden.len() + 64,
            };
            let report = solve_sphere(&mut oracle, hidden.dim(), &opts)?;
            let ledger = oracle.ledger_report();
            (
                HiddenPoints::Sphere(report.recovered),
                Some(report.basis_size),
                report.queries,
                report.rounds,
                ledger.round_sizes(),
                None,
            )
        }
        SolverId::Strong | SolverId::StrongLeveled => {
            let mut oracle = StrongOracle::new(&hidden)?;
            let report = if config.solver == SolverId::Strong {
                solve_strong(&mut oracle)?
            } else {
                solve_strong_leveled(&mut oracle)?
            };
            let ledger = oracle.ledger_report();
            (
                HiddenPoints::Binary(report.points),
                None,
                report.queries,
                report.rounds,
                ledger.round_sizes(),
                None,
            )
        }
        SolverId::HammingTwoRound => {
            let d = hidden.dim() as u64;
            let n = hidden.len() as u64;
            let overrides = match (config.desk_t, config.desk_r) {
                (Some(t), Some(r)) => Some(DeskOverrides { t, r }),
                (None, None) => None,
                _ => {
                    return Err(Error::InvalidParams(
                        "desk overrides need both t and r".into(),
                    ))
                }
            };
            let params = choose_two_round_params(d, n, config.mode, overrides)?;
            let mut oracle = BinaryNearestOracle::new(&hidden)?;
            let report = solve_hamming_two_round(&mut oracle, &params, solver_seed)?;
            let ledger = oracle.ledger_report();
            let mode = match config.mode {
                ParamMode::Paper => "paper",
                ParamMode::Desk => "desk",
            };
            (
                HiddenPoints::Binary(report.points),
                None,
                report.queries,
                report.rounds,
                ledger.round_sizes(),
                Some(mode.to_string()),
            )
        }
    };

    let outcome = verify_recovery(&recovered, &hidden, config.tols.eps_tie)?;
    let elapsed = started.elapsed();
    Ok(ResultRecord {
        problem: config.problem,
        solver: config.solver,
        instance: config.instance.to_string(),
        tie_policy: config.tie_policy,
        mode,
        base_seed: config.seed,
        trial,
        rng: RNG_ID.to_string(),
        k,
        queries,
        rounds,
        round_sizes,
        success: outcome.equal,
        recovered_count: recovered.len(),
        hidden_count: hidden.len(),
        elapsed_ms: config.timing.then_some(elapsed.as_millis() as u64),
    })
}

/// Run all trials of a configuration. Trials are independent and run in
/// parallel; records come back in trial order and are identical from run to
/// run for a fixed config.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<ResultRecord>> {
    config.validate()?;
    let preloaded = match &config.instance {
        InstanceSpec::File(path) => {
            Some(files::load_hidden_set(path, config.tie_policy, config.tols.eps_tie)?)
        }
        _ => None,
    };
    (0..config.trials)
        .into_par_iter()
        .map(|trial| run_trial(config, trial, preloaded.as_ref()))
        .collect()
}

/// Axes of a parameter sweep; empty axes keep the base config's value.
#[derive(Debug, Clone, Default)]
pub struct SweepGrid {
    pub d: Vec<usize>,
    pub n: Vec<usize>,
    pub k: Vec<usize>,
    pub t: Vec<u64>,
    pub r: Vec<u32>,
    pub policies: Vec<TieBreakPolicy>,
}

impl SweepGrid {
    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
            && self.n.is_empty()
            && self.k.is_empty()
            && self.t.is_empty()
            && self.r.is_empty()
            && self.policies.is_empty()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AggregateRow {
    pub instance: String,
    pub tie_policy: TieBreakPolicy,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<u32>,
    pub trials: u32,
    pub successes: u32,
    pub success_rate: f64,
    pub mean_queries: f64,
    pub mean_rounds: f64,
}

#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub records: Vec<ResultRecord>,
    pub aggregates: Vec<AggregateRow>,
}

fn axis<T: Copy>(values: &[T], base: Option<T>) -> Vec<Option<T>> {
    if values.is_empty() {
        vec![base]
    } else {
        values.iter().copied().map(Some).collect()
    }
}

/// Cartesian product of the grid axes over the base config, one experiment
/// per cell, with per-cell aggregate rows appended.
pub fn sweep(base: &ExperimentConfig, grid: &SweepGrid) -> Result<SweepOutput> {
    if grid.is_empty() {
        return Err(Error::InvalidParams("sweep grid lists no axis values".into()));
    }
    let (base_d, base_n, base_k) = match &base.instance {
        InstanceSpec::Random { d, n, k } => (Some(*d), Some(*n), *k),
        _ if !grid.d.is_empty() || !grid.n.is_empty() || !grid.k.is_empty() => {
            return Err(Error::InvalidParams(
                "d/n/k sweep axes need a random instance source".into(),
            ));
        }
        _ => (None, None, None),
    };
    let policies: Vec<TieBreakPolicy> = if grid.policies.is_empty() {
        vec![base.tie_policy]
    } else {
        grid.policies.clone()
    };

    let mut records = Vec::new();
    let mut aggregates = Vec::new();
    for &d in &axis(&grid.d, base_d) {
        for &n in &axis(&grid.n, base_n) {
            for &k in &axis(&grid.k, base_k) {
                for &t in &axis(&grid.t, base.desk_t) {
                    for &r in &axis(&grid.r, base.desk_r) {
                        for &policy in &policies {
                            let mut config = base.clone();
                            config.tie_policy = policy;
                            config.desk_t = t;
                            config.desk_r = r;
                            if let (Some(d), Some(n)) = (d, n) {
                                config.instance = InstanceSpec::Random { d, n, k };
                            }
                            let cell = run_experiment(&config)?;
                            let successes = cell.iter().filter(|r| r.success).count() as u32;
                            let total_queries: usize = cell.iter().map(|r| r.queries).sum();
                            let total_rounds: usize = cell.iter().map(|r| r.rounds).sum();
                            aggregates.push(AggregateRow {
                                instance: config.instance.to_string(),
                                tie_policy: policy,
                                t,
                                r,
                                trials: config.trials,
                                successes,
                                success_rate: f64::from(successes) / f64::from(config.trials),
                                mean_queries: total_queries as f64 / f64::from(config.trials),
                                mean_rounds: total_rounds as f64 / f64::from(config.trials),
                            });
                            records.extend(cell);
                        }
                    }
                }
            }
        }
    }
    Ok(SweepOutput { records, aggregates })
}

fn csv_field(value: &str) -> String {
    if value.contains(',') || value.contains('"') {
        format!("\"{}\"", value.replace('"', "\"\""))
    } else {
        value.to_string()
    }
}

pub fn aggregates_to_csv(rows: &[AggregateRow]) -> String {
    let mut out = String::from("instance,tie_policy,t,r,trials,successes,success_rate,mean_queries,mean_rounds\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            csv_field(&row.instance),
            row.tie_policy,
            row.t.map_or(String::new(), |v| v.to_string()),
            row.r.map_or(String::new(), |v| v.to_string()),
            row.trials,
            row.successes,
            row.success_rate,
            row.mean_queries,
            row.mean_rounds
        ));
    }
    out
}
