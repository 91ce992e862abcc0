//! Command-line front end: instance generation, solver runs, recovery
//! verification, parameter sweeps, and timing.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use multimind::error::{Error, Result};
use multimind::geometry::Tolerances;
use multimind::hardgen::{gen_hard_d1, gen_hard_recursive, HardConsts, HardInstanceParams};
use multimind::harness::files::{load_hidden_set, write_hidden_points};
use multimind::harness::instances::corpus_instance;
use multimind::harness::{
    aggregates_to_csv, records_to_jsonl, run_experiment, sweep, verify_recovery, ExperimentConfig,
    InstanceSpec, Problem, ResultRecord, SolverId, SweepGrid,
};
use multimind::oracle::{HiddenPoints, TieBreakPolicy};
use multimind::solvers::ParamMode;

#[derive(Parser)]
#[command(name = "multimind", about = "Hidden-set reconstruction lab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a hidden-set instance file
    Gen(GenArgs),
    /// Run a solver against instances and emit result records
    Solve(SolveArgs),
    /// Compare a recovered set file against a hidden set file
    Verify(VerifyArgs),
    /// Run a grid of configurations and emit aggregate rows
    Sweep(SweepArgs),
    /// Time a configuration and print a summary table
    Bench(SolveArgs),
}

#[derive(Args, Clone)]
struct InstanceArgs {
    /// Instance source: random | hard-d1 | hard-rec | corpus:<name> | file:<path>
    #[arg(long, default_value = "random")]
    instance: String,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    /// Rank of random sphere instances
    #[arg(long)]
    k: Option<usize>,
    /// Recursive generator: base dimension
    #[arg(long, default_value_t = 3)]
    base_t: usize,
    /// Recursive generator: recursion level
    #[arg(long, default_value_t = 2)]
    level: u32,
    /// Recursive generator: query budget defended against
    #[arg(long, default_value_t = 64)]
    q: u64,
    /// Recursive generator: per-level failure share
    #[arg(long, default_value_t = 0.125)]
    delta2: f64,
    #[arg(long, default_value_t = 1 << 24)]
    dim_cap: usize,
    /// Recursive generator multipliers ell,m1,dim
    #[arg(long, value_delimiter = ',', num_args = 3)]
    consts: Option<Vec<u64>>,
}

impl InstanceArgs {
    fn hard_params(&self) -> Result<HardInstanceParams> {
        let mut params = HardInstanceParams::new(self.base_t, self.level, self.q, self.delta2);
        params.dim_cap = self.dim_cap;
        if let Some(c) = &self.consts {
            params.consts = HardConsts { ell_mult: c[0], m1_mult: c[1], dim_mult: c[2] };
        }
        Ok(params)
    }

    fn spec(&self) -> Result<InstanceSpec> {
        if let Some(path) = self.instance.strip_prefix("file:") {
            return Ok(InstanceSpec::File(PathBuf::from(path)));
        }
        if let Some(name) = self.instance.strip_prefix("corpus:") {
            return Ok(InstanceSpec::Corpus(name.to_string()));
        }
        match self.instance.as_str() {
            "random" => {
                let d = self.d.ok_or_else(|| Error::InvalidParams("--d is required".into()))?;
                let n = self.n.ok_or_else(|| Error::InvalidParams("--n is required".into()))?;
                Ok(InstanceSpec::Random { d, n, k: self.k })
            }
            "hard-d1" | "hard_d1" => {
                let d = self.d.ok_or_else(|| Error::InvalidParams("--d is required".into()))?;
                Ok(InstanceSpec::HardD1 { d })
            }
            "hard-rec" | "hard_rec" => Ok(InstanceSpec::HardRec(self.hard_params()?)),
            other => Err(Error::InvalidParams(format!("unknown instance source {other:?}"))),
        }
    }
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    /// Variant for random instances: binary | sphere
    #[arg(long, default_value = "binary")]
    problem: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Sidecar JSON with generator structure (hard instances only)
    #[arg(long)]
    meta_out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, value_parser = clap_problem_parser)]
    problem: Problem,
    #[arg(long, value_parser = clap_solver_parser)]
    solver: SolverId,
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long, default_value = "prefer-revealed", value_parser = clap_policy_parser)]
    tie_policy: TieBreakPolicy,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    trials: u32,
    /// Two-round solver: round-1 query count (desk mode)
    #[arg(long)]
    t: Option<u64>,
    /// Two-round solver: ball radius (desk mode)
    #[arg(long)]
    r: Option<u32>,
    /// Two-round parameter mode
    #[arg(long, default_value = "desk")]
    mode: String,
    #[arg(long)]
    eps_side: Option<f64>,
    #[arg(long)]
    eps_tie: Option<f64>,
    /// Write result records as JSON lines
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the recovered set of a single trial as a hidden-set file
    #[arg(long)]
    recovered_out: Option<PathBuf>,
    /// Include wall-clock timings in records (breaks byte-identical output)
    #[arg(long, default_value_t = false)]
    timing: bool,
}

impl SolveArgs {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut config = ExperimentConfig::new(self.problem, self.solver, self.instance.spec()?);
        config.tie_policy = self.tie_policy;
        config.seed = self.seed;
        config.trials = self.trials;
        config.desk_t = self.t;
        config.desk_r = self.r;
        config.mode = match self.mode.as_str() {
            "desk" => ParamMode::Desk,
            "paper" => ParamMode::Paper,
            other => return Err(Error::InvalidParams(format!("unknown mode {other:?}"))),
        };
        if let Some(eps) = self.eps_side {
            config.tols.eps_side = eps;
        }
        if let Some(eps) = self.eps_tie {
            config.tols.eps_tie = eps;
        }
        config.timing = self.timing;
        Ok(config)
    }
}

#[derive(Args)]
struct VerifyArgs {
    /// Hidden-set file holding the truth
    #[arg(long)]
    instance: PathBuf,
    /// Hidden-set file holding the recovered points
    #[arg(long)]
    recovered: PathBuf,
    #[arg(long)]
    eps_tie: Option<f64>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_parser = clap_problem_parser)]
    problem: Problem,
    #[arg(long, value_parser = clap_solver_parser)]
    solver: SolverId,
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long, default_value = "prefer-revealed", value_parser = clap_policy_parser)]
    tie_policy: TieBreakPolicy,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    trials: u32,
    #[arg(long, default_value = "desk")]
    mode: String,
    /// Sweep axis: dimensions
    #[arg(long, value_delimiter = ',')]
    d_axis: Vec<usize>,
    /// Sweep axis: hidden-set sizes
    #[arg(long, value_delimiter = ',')]
    n_axis: Vec<usize>,
    /// Sweep axis: sphere ranks
    #[arg(long, value_delimiter = ',')]
    k_axis: Vec<usize>,
    /// Sweep axis: round-1 budgets
    #[arg(long, value_delimiter = ',')]
    t_axis: Vec<u64>,
    /// Sweep axis: ball radii
    #[arg(long, value_delimiter = ',')]
    r_axis: Vec<u32>,
    /// Sweep axis: tie policies
    #[arg(long, value_delimiter = ',', value_parser = clap_policy_parser)]
    policy_axis: Vec<TieBreakPolicy>,
    /// Write aggregate rows as CSV
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write all per-trial records as JSON lines
    #[arg(long)]
    records_out: Option<PathBuf>,
}

fn clap_policy_parser(s: &str) -> std::result::Result<TieBreakPolicy, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn clap_problem_parser(s: &str) -> std::result::Result<Problem, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn clap_solver_parser(s: &str) -> std::result::Result<SolverId, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn cmd_gen(args: &GenArgs) -> Result<()> {
    let spec = args.instance.spec()?;
    let tols = Tolerances::default();
    let (points, meta_json): (HiddenPoints, Option<String>) = match &spec {
        InstanceSpec::Random { d, n, k } => {
            let mut rng = multimind::harness::trial_rng(args.seed, 0);
            match args.problem.as_str() {
                "binary" => (
                    HiddenPoints::Binary(multimind::harness::instances::random_binary(*d, *n, &mut rng)?),
                    None,
                ),
                "sphere" => {
                    let k = k.unwrap_or((*d).min(*n));
                    (
                        HiddenPoints::Sphere(multimind::harness::instances::random_sphere(
                            *d, *n, k, &mut rng, &tols,
                        )?),
                        None,
                    )
                }
                other => return Err(Error::InvalidParams(format!("unknown problem {other:?}"))),
            }
        }
        InstanceSpec::HardD1 { d } => {
            let (hidden, meta) = gen_hard_d1(*d, args.seed)?;
            let json = serde_json::to_string_pretty(&meta).map_err(|e| Error::Parse(e.to_string()))?;
            (hidden.points().clone(), Some(json))
        }
        InstanceSpec::HardRec(params) => {
            let (hidden, meta) = gen_hard_recursive(params, args.seed)?;
            let json = serde_json::to_string_pretty(&meta).map_err(|e| Error::Parse(e.to_string()))?;
            (hidden.points().clone(), Some(json))
        }
        InstanceSpec::Corpus(name) => (HiddenPoints::Sphere(corpus_instance(name)?), None),
        InstanceSpec::File(_) => {
            return Err(Error::InvalidParams("gen cannot take a file source".into()))
        }
    };
    write_hidden_points(&args.out, &points)?;
    if let Some(json) = meta_json {
        if let Some(path) = &args.meta_out {
            std::fs::write(path, json)?;
        }
    }
    println!("wrote {} points to {}", points.len(), args.out.display());
    Ok(())
}

fn print_record_lines(records: &[ResultRecord]) {
    let successes = records.iter().filter(|r| r.success).count();
    let mean_queries: f64 =
        records.iter().map(|r| r.queries as f64).sum::<f64>() / records.len() as f64;
    println!(
        "{}/{} trials succeeded, mean queries {:.1}, rounds {:?}",
        successes,
        records.len(),
        mean_queries,
        records.first().map(|r| r.rounds)
    );
}

fn cmd_solve(args: &SolveArgs) -> Result<bool> {
    let config = args.config()?;
    let records = run_experiment(&config)?;
    if let Some(path) = &args.out {
        std::fs::write(path, records_to_jsonl(&records)?)?;
    }
    if let Some(path) = &args.recovered_out {
        if config.trials != 1 {
            return Err(Error::InvalidParams(
                "--recovered-out needs exactly one trial".into(),
            ));
        }
        // re-run the single trial to materialize the recovered set
        let hidden = load_or_build_single(&config)?;
        write_hidden_points(path, &hidden)?;
    }
    print_record_lines(&records);
    Ok(records.iter().all(|r| r.success))
}

/// Recompute trial 0's recovered set for --recovered-out.
fn load_or_build_single(config: &ExperimentConfig) -> Result<HiddenPoints> {
    use multimind::oracle::{BinaryNearestOracle, SphereNearestOracle, StrongOracle};
    use multimind::solvers::{
        choose_two_round_params, solve_hamming_two_round, solve_sphere, solve_strong,
        solve_strong_leveled, DeskOverrides, SphereSolveOptions,
    };
    let hidden = multimind::harness::build_instance_for_trial(config, 0)?;
    match config.solver {
        SolverId::Sphere => {
            let mut oracle = SphereNearestOracle::new(&hidden, &config.tols)?;
            let opts = SphereSolveOptions { tols: config.tols, max_hull_points: hidden.len() + 64 };
            let report = solve_sphere(&mut oracle, hidden.dim(), &opts)?;
            Ok(HiddenPoints::Sphere(report.recovered))
        }
        SolverId::Strong => {
            let mut oracle = StrongOracle::new(&hidden)?;
            Ok(HiddenPoints::Binary(solve_strong(&mut oracle)?.points))
        }
        SolverId::StrongLeveled => {
            let mut oracle = StrongOracle::new(&hidden)?;
            Ok(HiddenPoints::Binary(solve_strong_leveled(&mut oracle)?.points))
        }
        SolverId::HammingTwoRound => {
            let overrides = match (config.desk_t, config.desk_r) {
                (Some(t), Some(r)) => Some(DeskOverrides { t, r }),
                _ => None,
            };
            let params = choose_two_round_params(
                hidden.dim() as u64,
                hidden.len() as u64,
                config.mode,
                overrides,
            )?;
            let mut oracle = BinaryNearestOracle::new(&hidden)?;
            let seed = multimind::harness::derive_seed(config.seed, 1);
            Ok(HiddenPoints::Binary(
                solve_hamming_two_round(&mut oracle, &params, seed)?.points,
            ))
        }
    }
}

fn cmd_verify(args: &VerifyArgs) -> Result<bool> {
    let eps_tie = args.eps_tie.unwrap_or(Tolerances::default().eps_tie);
    let hidden = load_hidden_set(&args.instance, TieBreakPolicy::LexMin, eps_tie)?;
    let recovered_text = std::fs::read_to_string(&args.recovered)?;
    let recovered = multimind::harness::files::parse_hidden_points(&recovered_text)?;
    let outcome = verify_recovery(&recovered, &hidden, eps_tie)?;
    if outcome.equal {
        println!("equal: recovered set matches the hidden set");
    } else {
        println!(
            "mismatch: {} missing, {} extra",
            outcome.missing.len(),
            outcome.extra.len()
        );
        for p in &outcome.missing {
            println!("missing {p}");
        }
        for p in &outcome.extra {
            println!("extra {p}");
        }
    }
    Ok(outcome.equal)
}

fn cmd_sweep(args: &SweepArgs) -> Result<()> {
    let solve_args = SolveArgs {
        problem: args.problem,
        solver: args.solver,
        instance: args.instance.clone(),
        tie_policy: args.tie_policy,
        seed: args.seed,
        trials: args.trials,
        t: None,
        r: None,
        mode: args.mode.clone(),
        eps_side: None,
        eps_tie: None,
        out: None,
        recovered_out: None,
        timing: false,
    };
    let base = solve_args.config()?;
    let grid = SweepGrid {
        d: args.d_axis.clone(),
        n: args.n_axis.clone(),
        k: args.k_axis.clone(),
        t: args.t_axis.clone(),
        r: args.r_axis.clone(),
        policies: args.policy_axis.clone(),
    };
    let output = sweep(&base, &grid)?;
    let csv = aggregates_to_csv(&output.aggregates);
    if let Some(path) = &args.out {
        std::fs::write(path, &csv)?;
    }
    if let Some(path) = &args.records_out {
        std::fs::write(path, records_to_jsonl(&output.records)?)?;
    }
    print!("{csv}");
    Ok(())
}

fn cmd_bench(args: &SolveArgs) -> Result<()> {
    let mut config = args.config()?;
    config.timing = true;
    let started = std::time::Instant::now();
    let records = run_experiment(&config)?;
    let total = started.elapsed();
    let times: Vec<u64> = records.iter().filter_map(|r| r.elapsed_ms).collect();
    let mean_queries: f64 =
        records.iter().map(|r| r.queries as f64).sum::<f64>() / records.len() as f64;
    println!("trials         {}", records.len());
    println!("wall time      {:.1} ms", total.as_secs_f64() * 1e3);
    println!("trial ms       min {:?} max {:?}", times.iter().min(), times.iter().max());
    println!("mean queries   {mean_queries:.1}");
    println!(
        "success rate   {:.3}",
        records.iter().filter(|r| r.success).count() as f64 / records.len() as f64
    );
    Ok(())
}

fn run() -> Result<ExitCode> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Gen(args) => {
            cmd_gen(args)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Solve(args) => {
            let all_ok = cmd_solve(args)?;
            Ok(if all_ok { ExitCode::SUCCESS } else { ExitCode::from(2) })
        }
        Command::Verify(args) => {
            let equal = cmd_verify(args)?;
            Ok(if equal { ExitCode::SUCCESS } else { ExitCode::from(2) })
        }
        Command::Sweep(args) => {
            cmd_sweep(args)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Bench(args) => {
            cmd_bench(args)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(1)
        }
    }
}
