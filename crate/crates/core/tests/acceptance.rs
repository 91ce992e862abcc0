//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use std::collections::HashSet;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use multimind::cube::{binomial, hamming_ball, BinaryPoint};
use multimind::geometry::{
    enumerate_query_normals, is_strictly_separated, orthonormal_span_basis, rank_of, Tolerances,
    Vector,
};
use multimind::hardgen::{
    estimate_blocking, gen_hard_d1, gen_hard_d1_with_mask, gen_hard_recursive, plan_level,
    check_d1_blocking, HardInstanceParams,
};
use multimind::harness::instances::{random_sphere, structured_corpus};
use multimind::harness::{
    build_instance_for_trial, derive_seed, records_to_jsonl, run_experiment, verify_recovery,
    ExperimentConfig, InstanceSpec, Problem, SolverId,
};
use multimind::oracle::{
    BinaryNearestOracle, HiddenPoints, HiddenSet, SphereNearestOracle, StrongOracle, TieBreakPolicy,
};
use multimind::solvers::{
    choose_two_round_params, solve_hamming_two_round, solve_sphere, solve_strong,
    solve_strong_leveled, DeskOverrides, ParamMode, SphereSolveOptions,
};

fn pass(criterion: u32, name: &str, detail: &str) {
    println!("criterion {criterion} ({name}): PASS - {detail}");
}

struct SphereRun {
    n: usize,
    k: usize,
    d: usize,
    queries: usize,
    rounds: usize,
}

/// The criterion-1 suite: 200 seeded random instances over the stated grid
/// plus the structured corpus, solved under every tie policy.
fn sphere_suite() -> Vec<SphereRun> {
    let tols = Tolerances::default();
    let mut runs = Vec::new();

    let mut cases = Vec::new();
    'fill: loop {
        for d in 2..=5usize {
            for n in 1..=8usize {
                for k in 1..=d.min(4) {
                    // a rank-1 set of distinct unit vectors has at most 2 points
                    if k == 1 && n > 2 {
                        continue;
                    }
                    if cases.len() == 200 {
                        break 'fill;
                    }
                    cases.push((d, n, k, 1000 + cases.len() as u64));
                }
            }
        }
    }

    for (d, n, k, seed) in cases {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let points = random_sphere(d, n, k, &mut rng, &tols).expect("instance");
        let expected_rank = k.min(n);
        for policy in TieBreakPolicy::ALL {
            let hidden = HiddenSet::new_sphere(points.clone(), policy, tols.eps_tie).expect("hidden");
            let mut oracle = SphereNearestOracle::new(&hidden, &tols).expect("oracle");
            let opts = SphereSolveOptions { tols, max_hull_points: n + 8 };
            let report = solve_sphere(&mut oracle, d, &opts).expect("solve");
            let outcome =
                verify_recovery(&HiddenPoints::Sphere(report.recovered.clone()), &hidden, tols.eps_tie)
                    .expect("verify");
            assert!(
                outcome.equal,
                "random d={d} n={n} k={k} seed={seed} policy={policy}: recovery mismatch"
            );
            assert_eq!(report.basis_size, expected_rank, "basis rank off at seed {seed}");
            assert!(report.hull_iterations <= n + 1);
            runs.push(SphereRun { n, k: expected_rank, d, queries: report.queries, rounds: report.rounds });
        }
    }

    for (name, points) in structured_corpus() {
        let d = points[0].dim();
        let n = points.len();
        let vectors: Vec<Vector> = points.iter().map(|p| p.vector().clone()).collect();
        let k = rank_of(&vectors, tols.eps_pivot).expect("rank");
        for policy in TieBreakPolicy::ALL {
            let hidden = HiddenSet::new_sphere(points.clone(), policy, tols.eps_tie).expect("hidden");
            let mut oracle = SphereNearestOracle::new(&hidden, &tols).expect("oracle");
            let opts = SphereSolveOptions { tols, max_hull_points: n + 8 };
            let report = solve_sphere(&mut oracle, d, &opts).expect("solve");
            let outcome =
                verify_recovery(&HiddenPoints::Sphere(report.recovered.clone()), &hidden, tols.eps_tie)
                    .expect("verify");
            assert!(outcome.equal, "corpus {name} policy {policy}: recovery mismatch");
            assert_eq!(report.basis_size, k, "corpus {name}: basis rank");
            runs.push(SphereRun { n, k, d, queries: report.queries, rounds: report.rounds });
        }
    }
    runs
}

#[test]
fn criterion_1_sphere_exact_recovery() {
    let started = Instant::now();
    let runs = sphere_suite();
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "suite took {elapsed:?}, budget 60s");
    pass(
        1,
        "sphere exact recovery",
        &format!("{} solver runs (200 random + corpus, 3 policies) in {elapsed:.2?}", runs.len()),
    );
}

#[test]
fn criterion_2_sphere_query_budget() {
    let runs = sphere_suite();
    let mut worst_ratio = 0.0f64;
    for run in &runs {
        let budget = 4 * (run.n.pow(run.k as u32 / 2 + 1) + 2 * run.k * run.d);
        assert!(
            run.queries <= budget,
            "n={} k={} d={}: {} queries exceed budget {}",
            run.n,
            run.k,
            run.d,
            run.queries,
            budget
        );
        assert!(
            run.rounds <= run.k + run.n + 2,
            "n={} k={}: {} rounds exceed {}",
            run.n,
            run.k,
            run.rounds,
            run.k + run.n + 2
        );
        worst_ratio = worst_ratio.max(run.queries as f64 / budget as f64);
    }
    pass(
        2,
        "sphere query budget",
        &format!("{} runs within 4(n^(k/2+1) + 2kd); worst ratio {worst_ratio:.2}", runs.len()),
    );
}

#[test]
fn criterion_3_facet_normal_completeness() {
    let tols = Tolerances::default();
    let mut rng = ChaCha12Rng::seed_from_u64(500);
    let mut total_samples = 0usize;

    for set_index in 0..50usize {
        let k = 2 + set_index % 2;
        let n = k.max(2) + set_index % (9 - k.max(2));
        let d = 3 + set_index % 2;
        let points = random_sphere(d, n, k, &mut rng, &tols).expect("instance");
        let vectors: Vec<Vector> = points.iter().map(|p| p.vector().clone()).collect();
        let normals = enumerate_query_normals(&vectors, tols.eps_side, tols.dedup_tol).expect("normals");
        let span = orthonormal_span_basis(&vectors);

        let mut sampled = 0;
        while sampled < 1000 {
            let mut y = Vector::zeros(d);
            for b in &span {
                let c: f64 = rng.sample(StandardNormal);
                y.add_scaled(b, c);
            }
            let Ok(y) = y.normalized() else { continue };
            if vectors.iter().any(|p| p.distance(&y) < 1e-4) {
                continue;
            }
            sampled += 1;
            total_samples += 1;
            assert!(
                is_strictly_separated(normals.normals(), &vectors, &y, tols.eps_side),
                "set {set_index} (n={n} k={k}): unseparated sample"
            );
        }
    }

    let octahedron: Vec<Vector> = (0..3)
        .flat_map(|i| {
            let e = Vector::standard_basis(3, i);
            [e.clone(), e.negated()]
        })
        .collect();
    let set = enumerate_query_normals(&octahedron, tols.eps_side, tols.dedup_tol).expect("octahedron");
    assert_eq!(set.len(), 8, "octahedron must yield exactly 8 distinct normals");

    pass(
        3,
        "facet-normal completeness",
        &format!("{total_samples} outside samples separated over 50 sets; octahedron = 8 normals"),
    );
}

#[test]
fn criterion_4_strong_model_recovery() {
    let started = Instant::now();
    let mut total_queries = 0usize;
    for i in 0..500usize {
        let d = 8 + (i * 7) % 57;
        let n = 1 + (i * 11) % 50;
        let mut rng = ChaCha12Rng::seed_from_u64(7000 + i as u64);
        let mut set = HashSet::new();
        while set.len() < n {
            set.insert(BinaryPoint::random(d, &mut rng));
        }
        let mut points: Vec<BinaryPoint> = set.into_iter().collect();
        points.sort();
        let hidden = HiddenSet::new_binary(points.clone(), TieBreakPolicy::LexMin).expect("hidden");

        let mut oracle = StrongOracle::new(&hidden).expect("oracle");
        let report = solve_strong(&mut oracle).expect("solve");
        assert_eq!(report.points, points, "instance {i}: strong recovery mismatch");
        assert!(
            report.queries <= 3 * n * d + d,
            "instance {i}: {} queries exceed 3nd+d = {}",
            report.queries,
            3 * n * d + d
        );
        total_queries += report.queries;

        let mut oracle = StrongOracle::new(&hidden).expect("oracle");
        let report = solve_strong_leveled(&mut oracle).expect("solve");
        assert_eq!(report.points, points, "instance {i}: leveled recovery mismatch");
        assert!(report.rounds <= d + 1, "instance {i}: {} rounds exceed d+1", report.rounds);
        for (round, size) in oracle.ledger_report().round_sizes().iter().enumerate() {
            assert!(*size <= 2 * n, "instance {i} round {round}: size {size} exceeds 2n = {}", 2 * n);
        }
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "suite took {elapsed:?}, budget 30s");
    pass(
        4,
        "strong-model recovery",
        &format!("500 instances, both solvers exact, {total_queries} probe/descent queries, {elapsed:.2?}"),
    );
}

#[test]
fn criterion_5_two_round_behavior() {
    // desk parameters fixed by the pilot: the starting point already clears
    // the success bar at d=24, n=4, so it is frozen unchanged
    let (t, r) = (4096u64, 6u32);
    let (d, n, trials) = (24usize, 4usize, 60u32);

    let mut config = ExperimentConfig::new(
        Problem::Hamming,
        SolverId::HammingTwoRound,
        InstanceSpec::Random { d, n, k: None },
    );
    config.seed = 2024;
    config.trials = trials;
    config.desk_t = Some(t);
    config.desk_r = Some(r);

    let records = run_experiment(&config).expect("experiment");
    assert_eq!(records.len(), trials as usize);
    let successes = records.iter().filter(|rec| rec.success).count();
    assert!(
        3 * successes >= 2 * trials as usize,
        "success fraction {successes}/{trials} below 2/3"
    );
    let ball: u128 = (0..=r as usize).map(|i| binomial(d, i)).sum();
    for rec in &records {
        assert_eq!(rec.rounds, 2, "trial {}: ledger must show exactly 2 rounds", rec.trial);
        assert_eq!(rec.round_sizes.len(), 2);
        assert_eq!(rec.round_sizes[0], t as usize, "round-1 size must equal t");
        assert!(rec.round_sizes[1] as u128 <= (n as u128) * ball);
        assert!(rec.round_sizes[1] as u128 >= ball);
    }

    // independent replay of the first trials: round-2 size must equal the
    // deduplicated union of balls around the distinct round-1 responses
    let params =
        choose_two_round_params(d as u64, n as u64, ParamMode::Desk, Some(DeskOverrides { t, r }))
            .expect("params");
    for trial in 0..3u32 {
        let hidden = build_instance_for_trial(&config, trial).expect("instance");
        let mut oracle = BinaryNearestOracle::new(&hidden).expect("oracle");
        let solver_seed = derive_seed(config.seed, u64::from(trial) * 2 + 1);
        let report = solve_hamming_two_round(&mut oracle, &params, solver_seed).expect("solve");
        let responses = oracle.round_responses_at(0).expect("closed round");
        let mut distinct: Vec<BinaryPoint> = Vec::new();
        for z in responses {
            if !distinct.contains(z) {
                distinct.push(z.clone());
            }
        }
        let mut union: HashSet<BinaryPoint> = HashSet::new();
        for z in &distinct {
            union.extend(hamming_ball(z, r as usize).expect("ball"));
        }
        assert_eq!(report.round_sizes[1], union.len(), "trial {trial}: union size");
        assert_eq!(records[trial as usize].round_sizes, report.round_sizes);
    }

    pass(
        5,
        "two-round behavior",
        &format!("{successes}/{trials} recoveries at (t={t}, r={r}); all ledgers 2 rounds"),
    );
}

#[test]
fn criterion_6_d1_blocking() {
    // closed-form blocking on random far pairs
    for d in [8usize, 16, 32] {
        let mut rng = ChaCha12Rng::seed_from_u64(9000 + d as u64);
        let mut checked = 0;
        while checked < 100_000 {
            let u = BinaryPoint::random(d, &mut rng);
            let z = BinaryPoint::random(d, &mut rng);
            if u.distance(&z) < 2 {
                continue;
            }
            checked += 1;
            assert!(check_d1_blocking(&u, &z), "d={d}: blocking failed at distance {}", u.distance(&z));
        }
    }

    // transcript independence: resampling the distance-1 subset must not
    // change the responses to a fixed uniform batch
    let d = 24usize;
    let batch_size = 10 * d * d;
    let mut unchanged = 0;
    for instance in 0..100u64 {
        let (h1, meta) = gen_hard_d1(d, 40_000 + instance).expect("d1");
        let u = meta.mask().expect("mask");
        let (h2, _) = gen_hard_d1_with_mask(&u, 80_000 + instance).expect("resample");
        let mut o1 = BinaryNearestOracle::new(&h1).expect("oracle");
        let mut o2 = BinaryNearestOracle::new(&h2).expect("oracle");
        let mut rng = ChaCha12Rng::seed_from_u64(120_000 + instance);
        let queries: Vec<BinaryPoint> =
            (0..batch_size).map(|_| BinaryPoint::random(d, &mut rng)).collect();
        let r1 = o1.open_round().and_then(|h| o1.submit_round(h, &queries)).expect("round");
        let r2 = o2.open_round().and_then(|h| o2.submit_round(h, &queries)).expect("round");
        if r1 == r2 {
            unchanged += 1;
        }
    }
    assert!(unchanged >= 99, "only {unchanged}/100 transcripts were subset-independent");

    pass(
        6,
        "base-instance blocking",
        &format!("300k far pairs blocked; {unchanged}/100 transcripts independent of the subset"),
    );
}

#[test]
fn criterion_7_recursive_hardgen() {
    let started = Instant::now();

    // closed forms on a parameter grid
    for base_t in [3usize, 4] {
        for q_log in [4u32, 6, 10] {
            for delta2 in [0.5f64, 0.25, 0.125] {
                let q = 1u64 << q_log;
                let params = HardInstanceParams::new(base_t, 2, q, delta2);
                let plan = plan_level(base_t, q, delta2, &params.consts);
                if plan.outer_dim > params.dim_cap as u128 {
                    continue;
                }
                let (hidden, meta) = gen_hard_recursive(&params, 31_000 + q).expect("generate");
                let lg = ((q as f64) / delta2).log2().ceil() as u128;
                let t = base_t as u128;
                assert_eq!(meta.outer_dim as u128, 2500 * t * t * (t + lg) + t);
                assert_eq!(meta.m1() as u128, 25 * (t + lg));
                let inner = meta.inner_instance.as_ref().expect("inner");
                let inner_size =
                    binomial(base_t, 2) as usize + inner.s.as_ref().expect("base subset").len();
                assert_eq!(hidden.len(), inner_size + meta.m1());
            }
        }
    }

    // blocking estimate at the pinned tuple
    let params = HardInstanceParams::new(3, 2, 1 << 6, 0.125);
    let (_, meta) = gen_hard_recursive(&params, 77).expect("generate");
    let samples = 2000usize;
    let estimate = estimate_blocking(&meta, samples, 4242).expect("estimate");
    let target = 1.0 - 1.0 / 512.0;
    let se = (estimate * (1.0 - estimate) / samples as f64).sqrt();
    assert!(
        estimate >= target - 3.0 * se,
        "blocking estimate {estimate} below {target} - 3se (se = {se})"
    );

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 120.0, "took {elapsed:?}, budget 120s");
    pass(
        7,
        "recursive hardgen",
        &format!("closed forms exact on grid; blocking estimate {estimate:.4} at 2000 samples, {elapsed:.2?}"),
    );
}

#[test]
fn criterion_8_convex_combination_norm() {
    let mut rng = ChaCha12Rng::seed_from_u64(600);
    for trial in 0..1000 {
        let d = 4 + trial % 5;
        let m = 2 + trial % 4;
        let points: Vec<Vector> = loop {
            let candidate: Vec<Vector> = (0..m)
                .map(|_| {
                    let g: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
                    Vector::new(g).unwrap().normalized().unwrap()
                })
                .collect();
            let ok = (0..m).all(|i| (i + 1..m).all(|j| candidate[i].dot(&candidate[j]) <= 0.99));
            if ok {
                break candidate;
            }
        };
        // convex weights with two designated coordinates at least 0.1
        let mut weights = vec![0.0f64; m];
        let a = trial % m;
        let b = (trial + 1) % m;
        weights[a] += 0.1;
        weights[b] += 0.1;
        let raw: Vec<f64> = (0..m).map(|_| rng.random::<f64>()).collect();
        let scale = 0.8 / raw.iter().sum::<f64>();
        for (w, r) in weights.iter_mut().zip(&raw) {
            *w += r * scale;
        }
        let mut combo = Vector::zeros(d);
        for (p, &w) in points.iter().zip(&weights) {
            combo.add_scaled(p, w);
        }
        let sq = combo.dot(&combo);
        assert!(sq <= 0.9998, "trial {trial}: squared norm {sq} above 0.9998");
    }
    pass(8, "convex-combination norm", "1000 weighted combinations below 0.9998");
}

#[test]
fn criterion_9_determinism() {
    let mut sphere = ExperimentConfig::new(
        Problem::Sphere,
        SolverId::Sphere,
        InstanceSpec::Random { d: 4, n: 5, k: Some(3) },
    );
    sphere.seed = 11;
    sphere.trials = 8;

    let mut strong = ExperimentConfig::new(
        Problem::Strong,
        SolverId::Strong,
        InstanceSpec::Random { d: 24, n: 10, k: None },
    );
    strong.seed = 12;
    strong.trials = 8;

    let mut hamming = ExperimentConfig::new(
        Problem::Hamming,
        SolverId::HammingTwoRound,
        InstanceSpec::Random { d: 12, n: 3, k: None },
    );
    hamming.seed = 13;
    hamming.trials = 8;
    hamming.desk_t = Some(128);
    hamming.desk_r = Some(3);

    for (name, config) in [("sphere", sphere), ("strong", strong), ("hamming", hamming)] {
        let first = records_to_jsonl(&run_experiment(&config).expect("run")).expect("jsonl");
        let second = records_to_jsonl(&run_experiment(&config).expect("run")).expect("jsonl");
        assert_eq!(first, second, "{name}: result bytes differ between runs");
        assert!(!first.contains("elapsed_ms"), "{name}: timing leaked into deterministic output");
    }

    let est_a = {
        let params = HardInstanceParams::new(3, 2, 16, 0.5);
        let (_, meta) = gen_hard_recursive(&params, 5).expect("gen");
        estimate_blocking(&meta, 512, 99).expect("estimate")
    };
    let est_b = {
        let params = HardInstanceParams::new(3, 2, 16, 0.5);
        let (_, meta) = gen_hard_recursive(&params, 5).expect("gen");
        estimate_blocking(&meta, 512, 99).expect("estimate")
    };
    assert_eq!(est_a, est_b, "sharded estimator not deterministic");

    pass(9, "determinism", "three configs byte-identical across repeat runs, parallel trials on");
}
