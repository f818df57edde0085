//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! and fails if any criterion fails.

mod common;

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use balancekit::cli::{cmd_generate, RunConfig, TaskRecord};
use balancekit::curriculum::{
    adjustment_f, compute_thresholds, shaped_reward, simulate_curriculum, update_probabilities, update_sigma,
    CurriculumConfig, EvalResult, LibrarySpec, SamplerConfig, SamplerState, ShapingConfig, ShapingState,
    SimulationConfig,
};
use balancekit::kinematics::{com_jacobian, pose_jacobian, JointVector, KinematicModel, Pose};
use balancekit::motion_io::read_motion;
use balancekit::optimizer::{
    initial_trajectory, solve_stage1, solve_stage2, tracking_residuals, CostTerm, CostWeights, SolverConfig,
    Trajectory, TrajectoryProblem,
};
use balancekit::reference::{build_reference, sample_generation_task, SamplingConfig};
use balancekit::rewards::{
    balance_prior_reward, hybrid_reward, metric_contact_mismatch, metric_gmpjpe, metric_mpjpe, metric_slippage,
    metric_success, FrameState, KeypointTrack, MotionSource, RewardConfig, SUCCESS_THRESHOLD,
};
use nalgebra::{DMatrix, UnitQuaternion, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GENERATE_COUNT: usize = 500;
const BALANCE_EPSILON: f64 = 0.01;
const MIN_ACCEPTANCE: f64 = 0.60;
const MAX_RUNTIME_S: f64 = 600.0;
const IK_RESIDUAL: f64 = 1e-6;
const IK_BOUNDARY: f64 = 1e-4;
const JACOBIAN_CONFIGS: usize = 50;
const JACOBIAN_REL: f64 = 1e-5;
const FD_STEP: f64 = 1e-6;
const LM_FIXTURE_SEEDS: u64 = 20;
const ZERO_BALANCE_GAP: f64 = 1e-9;
const SAMPLER_CALLS: usize = 10_000;
const SIMPLEX_SUM: f64 = 1e-9;
const FLOOR_SLACK: f64 = 1e-12;
const EMA_STEPS: i32 = 20;
const EMA_TOL: f64 = 1e-12;
const GATING_PAIRS: usize = 1000;
const GATING_SUM: f64 = 1e-12;
const METRIC_MM: f64 = 1e-9;
const LIBRARY: usize = 20;
const SYMMETRIC_ROUNDS: usize = 50;
const UNIFORM_REL: f64 = 0.01;
const REPRO_COUNT: usize = 8;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("acceptance").join(name);
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn balance_soundness() -> Outcome {
    let model = common::humanoid();
    let oracle = common::Oracle::asset("humanoid23.json");
    let out = scratch("generate");
    let cfg = RunConfig {
        out: out.clone(),
        count: GENERATE_COUNT,
        jobs: workers(),
        ..RunConfig::default()
    };
    let start = Instant::now();
    let (summary, records) = cmd_generate(&cfg).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed().as_secs_f64();

    // support rectangle centered on the support sole at the sampled start
    let sampling = SamplingConfig::default();
    let rect = CostWeights::default().support_rect;
    let mut worst = 0.0f64;
    let mut unsound = 0;
    for r in records.iter().filter(|r| r.status == "accepted") {
        let motion = read_motion(&out.join(r.file.as_ref().unwrap())).map_err(|e| e.to_string())?;
        let task = sample_generation_task(r.seed, &sampling, &model).map_err(|e| e.to_string())?;
        let start_links = oracle.links(
            &common::Frame::of(&task.initial_base),
            &common::Oracle::named(&model, &task.initial_joints),
        );
        let c = start_links[&task.support_foot].p;
        let traj = motion.to_trajectory();
        let support = vec![Pose::from_translation(c.x, c.y, 0.0); traj.len()];
        let d = common::oracle_max_balance(&oracle, &model, &traj, &support, rect);
        worst = worst.max(d);
        if d > BALANCE_EPSILON {
            unsound += 1;
        }
    }
    let rate = summary.accepted as f64 / GENERATE_COUNT as f64;
    check(
        unsound == 0 && rate >= MIN_ACCEPTANCE && elapsed <= MAX_RUNTIME_S && summary.errors == 0,
        format!(
            "{}/{} accepted ({:.1}%), {unsound} unsound, worst max d {worst:.5} m, {elapsed:.0} s on {} worker(s)",
            summary.accepted,
            GENERATE_COUNT,
            100.0 * rate,
            cfg.jobs
        ),
    )
}

fn planar_arm_ik() -> Outcome {
    let model = common::model("planar_arm.json");
    let weights = CostWeights {
        lambda_track: 1.0,
        lambda_lim: 0.0,
        lambda_rest: 0.0,
        lambda_smooth: 0.0,
        lambda_bal: 0.0,
        ..CostWeights::default()
    };
    let cfg = SolverConfig {
        fix_base: true,
        ..SolverConfig::default()
    };
    let tip = model.link_index("tip").unwrap();
    let (inner, outer) = (0.3, 1.7);
    let (mut reach_worst, mut bound_worst, mut reachable) = (0.0f64, 0.0f64, 0);
    for i in 0..10 {
        for j in 0..10 {
            let target = Vector3::new(-2.0 + 4.0 * i as f64 / 9.0, -2.0 + 4.0 * j as f64 / 9.0, 0.0);
            let problem = TrajectoryProblem::new(&model, 2, weights.clone()).with_target(
                tip,
                vec![Pose::new(UnitQuaternion::identity(), target); 2],
                [0.0, 0.0, 0.0, 1.0, 1.0, 1.0],
            );
            let init = Trajectory::constant(Pose::identity(), JointVector::from_vec(vec![0.3, 0.5]), 2, 0.02);
            let (traj, _) = solve_stage1(&init, &problem, &cfg).map_err(|e| e.to_string())?;
            let residual = tracking_residuals(&model, &traj, &problem.targets).map_err(|e| e.to_string())?;
            let terminal = residual.rows(9, 3).norm();
            let r = target.norm();
            if r > inner && r < outer {
                reachable += 1;
                reach_worst = reach_worst.max(terminal);
            } else {
                let shortfall = if r >= outer { r - outer } else { inner - r };
                bound_worst = bound_worst.max((terminal - shortfall).abs());
            }
        }
    }
    check(
        reach_worst < IK_RESIDUAL && bound_worst < IK_BOUNDARY,
        format!(
            "{reachable} reachable worst residual {reach_worst:.2e}, {} unreachable worst boundary gap {bound_worst:.2e}",
            100 - reachable
        ),
    )
}

fn derivative_correctness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst_kin = 0.0f64;
    for name in ["humanoid23.json", "three_link.json", "planar_arm.json"] {
        let model = common::model(name);
        for trial in 0..JACOBIAN_CONFIGS {
            let base = common::random_pose(&mut rng);
            let q = common::random_q(&model, &mut rng);
            let link = &model.links[trial % model.links.len()].name;
            let cols = 6 + model.dof();
            let analytic = pose_jacobian(&model, &base, &q, link).map_err(|e| e.to_string())?;
            let analytic = DMatrix::from_iterator(6, cols, analytic.iter().copied());
            let fd = common::fd_pose_jacobian(&model, &base, &q, link, FD_STEP);
            worst_kin = worst_kin.max(common::rel_err(&analytic, &fd, 1.0));
            let analytic = com_jacobian(&model, &base, &q).map_err(|e| e.to_string())?;
            let analytic = DMatrix::from_iterator(3, cols, analytic.iter().copied());
            let fd = common::fd_com_jacobian(&model, &base, &q, FD_STEP);
            worst_kin = worst_kin.max(common::rel_err(&analytic, &fd, 1.0));
        }
    }

    let model = common::humanoid();
    let links = [model.feet()[0], model.feet()[1], model.base_link];
    let mut worst_res = 0.0f64;
    for _ in 0..JACOBIAN_CONFIGS {
        let fx = common::random_fixture(&model, 3, &links, &mut rng);
        let mut problem = TrajectoryProblem::new(&model, 3, CostWeights::default())
            .with_rest(fx.rest.clone())
            .with_support(fx.support.clone());
        for (link, poses) in &fx.targets {
            problem = problem.with_target(*link, poses.clone(), [1.0, 2.0, 0.5, 3.0, 1.0, 4.0]);
        }
        for term in CostTerm::ALL {
            let (_, analytic) = problem.dense_term(&fx.traj, term).map_err(|e| e.to_string())?;
            let fd = common::fd_term_jacobian(&problem, &fx.traj, term, FD_STEP);
            worst_res = worst_res.max(common::rel_err(&analytic, &fd, 1.0));
        }
    }
    check(
        worst_kin < JACOBIAN_REL && worst_res < JACOBIAN_REL,
        format!("pose/CoM worst rel {worst_kin:.2e}, residual blocks worst rel {worst_res:.2e}"),
    )
}

fn lm_behavior() -> Outcome {
    let model = common::humanoid();
    let sampling = SamplingConfig::default();
    let mut histories = 0;
    let mut broken = 0;
    for seed in 0..LM_FIXTURE_SEEDS {
        let task = sample_generation_task(seed, &sampling, &model).map_err(|e| e.to_string())?;
        let refs = build_reference(&task, &model).map_err(|e| e.to_string())?;
        let problem = TrajectoryProblem::from_references(&model, &task, &refs, CostWeights::default())
            .map_err(|e| e.to_string())?;
        let cfg = SolverConfig::default();
        let (s1, r1) = solve_stage1(&initial_trajectory(&task), &problem, &cfg).map_err(|e| e.to_string())?;
        let (_, r2) = solve_stage2(&s1, &problem, &cfg).map_err(|e| e.to_string())?;
        for r in [&r1, &r2] {
            histories += 1;
            if !r.cost_history.windows(2).all(|w| w[1] <= w[0]) {
                broken += 1;
            }
        }
    }

    // converged far enough that the remaining decrease is below the gap
    let weights = CostWeights {
        lambda_bal: 0.0,
        ..CostWeights::default()
    };
    let tight = SolverConfig {
        relative_cost_tolerance: 1e-12,
        ..SolverConfig::default()
    };
    let mut worst_gap = 0.0f64;
    for seed in 0..3 {
        let task = sample_generation_task(seed, &sampling, &model).map_err(|e| e.to_string())?;
        let refs = build_reference(&task, &model).map_err(|e| e.to_string())?;
        let problem =
            TrajectoryProblem::from_references(&model, &task, &refs, weights.clone()).map_err(|e| e.to_string())?;
        let (s1, _) = solve_stage1(&initial_trajectory(&task), &problem, &tight).map_err(|e| e.to_string())?;
        let (s2, _) = solve_stage2(&s1, &problem, &tight).map_err(|e| e.to_string())?;
        let gap = problem.cost(&s1, false).map_err(|e| e.to_string())?
            - problem.cost(&s2, true).map_err(|e| e.to_string())?;
        worst_gap = worst_gap.max(gap.abs());
    }
    check(
        broken == 0 && worst_gap < ZERO_BALANCE_GAP,
        format!("{broken}/{histories} cost histories increase, zero-balance gap {worst_gap:.2e}"),
    )
}

fn sampler_algebra() -> Outcome {
    let cfg = SamplerConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut calls, mut worst_sum, mut worst_floor) = (0, 0.0f64, 0.0f64);
    while calls < SAMPLER_CALLS {
        let n = rng.gen_range(1..50);
        let mut state = SamplerState::new(n, cfg.clone()).map_err(|e| e.to_string())?;
        for _ in 0..rng.gen_range(1..40) {
            let failed: BTreeSet<usize> = (0..n).filter(|_| rng.gen_bool(0.2)).collect();
            let mean: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..300.0)).collect();
            let max = mean.iter().map(|m| m * rng.gen_range(1.0..3.0)).collect();
            state = update_probabilities(
                &state,
                &EvalResult {
                    failed,
                    mean_error: mean,
                    max_error: max,
                },
            )
            .map_err(|e| e.to_string())?;
            calls += 1;
            worst_sum = worst_sum.max((state.probabilities.iter().sum::<f64>() - 1.0).abs());
            let floor = cfg.lambda_minprob / n as f64;
            worst_floor = worst_floor.max(state.probabilities.iter().map(|p| floor - p).fold(f64::MIN, f64::max));
        }
    }

    let two = SamplerConfig {
        gamma_fail: 2.0,
        lambda_minprob: 0.5,
        ..SamplerConfig::default()
    };
    let state = SamplerState::new(2, two).map_err(|e| e.to_string())?;
    let eval = EvalResult {
        failed: [0].into(),
        mean_error: vec![0.0, 10.0],
        max_error: vec![0.0, 20.0],
    };
    let next = update_probabilities(&state, &eval).map_err(|e| e.to_string())?;
    let pipeline = next.probabilities == vec![2.0 / 3.0, 1.0 / 3.0];

    let th = compute_thresholds(&[1.0, 2.0, 3.0, 4.0, 5.0]).map_err(|e| e.to_string())?;
    let boundaries = adjustment_f(th.e_max, &th, &cfg) == cfg.beta_max
        && adjustment_f(th.e_min, &th, &cfg) == cfg.alpha_min
        && adjustment_f(3.0, &th, &cfg) == 1.0;
    check(
        worst_sum <= SIMPLEX_SUM && worst_floor <= FLOOR_SLACK && pipeline && boundaries,
        format!(
            "{calls} updates, worst |sum-1| {worst_sum:.1e}, worst floor deficit {worst_floor:.1e}, N=2 {:?}, boundaries {}",
            next.probabilities,
            if boundaries { "exact" } else { "off" }
        ),
    )
}

fn shaping_algebra() -> Outcome {
    let (alpha, s0, target) = (0.05f64, 0.5f64, 0.12f64);
    let cfg = ShapingConfig {
        update_rate: alpha,
        initial_sigma: s0,
        ..ShapingConfig::default()
    };
    let mut state = ShapingState::new(1, &cfg).map_err(|e| e.to_string())?;
    for _ in 0..EMA_STEPS {
        state = update_sigma(&state, 0, "torso_head", target).map_err(|e| e.to_string())?;
    }
    let decay = (1.0 - alpha).powi(EMA_STEPS);
    let expect = decay * s0 + (1.0 - decay) * target;
    let got = state
        .sigma(0, state.group_index("torso_head").unwrap())
        .map_err(|e| e.to_string())?;
    let at_sigma = shaped_reward(0.3, 0.3).map_err(|e| e.to_string())?;
    let (ema_err, reward_err) = ((got - expect).abs(), (at_sigma - (-1.0f64).exp()).abs());
    check(
        ema_err < EMA_TOL && reward_err < EMA_TOL,
        format!("EMA k={EMA_STEPS} error {ema_err:.1e}, r(s, s) error {reward_err:.1e}"),
    )
}

fn random_frame(model: &KinematicModel, rng: &mut ChaCha8Rng) -> FrameState {
    let q = common::random_q(model, rng);
    let v = JointVector::from_iterator(model.dof(), (0..model.dof()).map(|_| rng.gen_range(-2.0..2.0)));
    let contacts = (0..2).map(|_| rng.gen_bool(0.5)).collect();
    let vel = (0..2)
        .map(|_| Vector3::new(rng.gen_range(-0.2..0.2), rng.gen_range(-0.2..0.2), 0.0))
        .collect();
    FrameState::from_kinematics(model, common::random_pose(rng), q, v, contacts, vel).unwrap()
}

fn hybrid_gating() -> Outcome {
    let model = common::humanoid();
    let cfg = RewardConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut changed, mut worst) = (0, 0.0f64);
    for _ in 0..GATING_PAIRS {
        let state = random_frame(&model, &mut rng);
        let reference = random_frame(&model, &mut rng);
        let foot = if rng.gen_bool(0.5) { "left_foot" } else { "right_foot" };
        let mocap = hybrid_reward(&state, &reference, MotionSource::Mocap, &model, Some(foot), &cfg)
            .map_err(|e| e.to_string())?;

        let mut perturbed = state.clone();
        perturbed.contacts = (0..2).map(|_| rng.gen_bool(0.5)).collect();
        perturbed.foot_velocities = (0..2).map(|_| Vector3::new(rng.gen(), rng.gen(), rng.gen())).collect();
        perturbed.center_of_mass += Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), 0.0);
        for p in &mut perturbed.link_positions {
            *p += Vector3::new(rng.gen_range(-0.1..0.1), rng.gen_range(-0.1..0.1), 0.0);
        }
        let other = if rng.gen_bool(0.5) { None } else { Some("left_foot") };
        let again = hybrid_reward(&perturbed, &reference, MotionSource::Mocap, &model, other, &cfg)
            .map_err(|e| e.to_string())?;
        if mocap.total.to_bits() != again.total.to_bits() || mocap.terms != again.terms {
            changed += 1;
        }

        let synthetic = hybrid_reward(&state, &reference, MotionSource::Synthetic, &model, Some(foot), &cfg)
            .map_err(|e| e.to_string())?;
        let prior = balance_prior_reward(&state, &reference, &model, Some(foot), &cfg).map_err(|e| e.to_string())?;
        worst = worst.max((synthetic.total - (mocap.total + prior.total)).abs());
    }
    check(
        changed == 0 && worst < GATING_SUM,
        format!("{changed}/{GATING_PAIRS} mocap rewards changed, worst synthetic gap {worst:.1e}"),
    )
}

fn metric_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let frames = 25;
    let k = 6;
    let root: Vec<Vector3<f64>> = (0..frames).map(|_| Vector3::new(rng.gen(), rng.gen(), 0.8)).collect();
    let positions: Vec<Vec<Vector3<f64>>> = root
        .iter()
        .map(|r| {
            (0..k)
                .map(|_| r + Vector3::new(rng.gen_range(-0.4..0.4), rng.gen_range(-0.4..0.4), -0.5))
                .collect()
        })
        .collect();
    let reference = KeypointTrack { positions, root };
    let shift = |f: &dyn Fn(usize) -> Vector3<f64>, move_root: bool| {
        let mut t = reference.clone();
        for (frame, r) in t.positions.iter_mut().zip(t.root.iter_mut()) {
            for (i, p) in frame.iter_mut().enumerate() {
                *p += f(i);
            }
            if move_root {
                *r += f(0);
            }
        }
        t
    };
    let contacts = vec![vec![true, false]; frames];
    let still = vec![Vector3::new(0.2, 0.1, 0.0); frames];
    let err = |e: balancekit::Error| e.to_string();
    let identity = (
        metric_gmpjpe(&reference, &reference).map_err(err)?,
        metric_mpjpe(&reference, &reference).map_err(err)?,
        metric_success(&reference, &reference, SUCCESS_THRESHOLD).map_err(err)?,
        metric_contact_mismatch(&contacts, &contacts).map_err(err)?,
        metric_slippage(&still, &vec![true; frames], 0.02).map_err(err)?,
    );
    let identity_ok = identity == (0.0, 0.0, true, 0.0, 0.0);

    let dir = Vector3::new(0.6, 0.0, -0.8);
    let uniform = metric_gmpjpe(&shift(&|_| dir * 0.01, false), &reference).map_err(err)?;
    let half = metric_gmpjpe(
        &shift(&|i| if i % 2 == 0 { dir * 0.02 } else { Vector3::zeros() }, false),
        &reference,
    )
    .map_err(err)?;
    let single = metric_mpjpe(
        &shift(&|i| if i == 2 { dir * 0.03 } else { Vector3::zeros() }, false),
        &reference,
    )
    .map_err(err)?;
    let global = metric_mpjpe(&shift(&|_| Vector3::new(1.0, -2.0, 0.0), true), &reference).map_err(err)?;
    let offsets_ok = (uniform - 10.0).abs() < METRIC_MM
        && (half - 10.0).abs() < METRIC_MM
        && (single - 30.0 / k as f64).abs() < METRIC_MM
        && global.abs() < METRIC_MM;

    // one frame deviating by exactly the threshold does not exceed it
    let flat = KeypointTrack {
        positions: vec![vec![Vector3::new(1.0, 0.0, 0.0); 3]; 4],
        root: vec![Vector3::zeros(); 4],
    };
    let moved = |d: f64| {
        let mut t = flat.clone();
        for p in &mut t.positions[2] {
            p.x += d;
        }
        metric_success(&t, &flat, SUCCESS_THRESHOLD).unwrap()
    };
    let boundary_ok = moved(0.5) && moved(0.49) && !moved(0.5000001) && !moved(0.6);
    check(
        identity_ok && offsets_ok && boundary_ok,
        format!(
            "identity {identity:?}, offsets {uniform:.9}/{half:.9}/{single:.9}/{global:.1e} mm, boundary {boundary_ok}"
        ),
    )
}

fn curriculum_behavior() -> Outcome {
    let mut lib = LibrarySpec::symmetric(LIBRARY, 1.0);
    lib.motions[11].always_fails = true;
    let cfg = |library: LibrarySpec, rounds: usize| CurriculumConfig {
        library,
        simulation: SimulationConfig {
            rounds,
            ..SimulationConfig::default()
        },
        ..CurriculumConfig::default()
    };
    let trace = simulate_curriculum(&cfg(lib, SYMMETRIC_ROUNDS)).map_err(|e| e.to_string())?;
    let uniform = 1.0 / LIBRARY as f64;
    let min_fail = (1..trace.rounds())
        .map(|r| trace.probabilities(r)[11])
        .fold(f64::INFINITY, f64::min);

    let symmetric =
        simulate_curriculum(&cfg(LibrarySpec::symmetric(LIBRARY, 1.0), SYMMETRIC_ROUNDS)).map_err(|e| e.to_string())?;
    let worst_dev = (0..symmetric.rounds())
        .flat_map(|r| symmetric.probabilities(r).to_vec())
        .map(|p| (p - uniform).abs() / uniform)
        .fold(0.0f64, f64::max);
    check(
        min_fail > uniform && worst_dev <= UNIFORM_REL,
        format!("failing motion min p {min_fail:.4} vs {uniform}, symmetric worst rel deviation {worst_dev:.1e}"),
    )
}

fn reproducibility() -> Outcome {
    let run = |name: &str, jobs: usize| -> Result<(PathBuf, Vec<TaskRecord>), String> {
        let out = scratch(name);
        let cfg = RunConfig {
            out: out.clone(),
            count: REPRO_COUNT,
            jobs,
            seed: 1234,
            ..RunConfig::default()
        };
        let (_, records) = cmd_generate(&cfg).map_err(|e| e.to_string())?;
        Ok((out, records))
    };
    let runs = [run("repro_a", 1)?, run("repro_b", 1)?, run("repro_c", 8)?];
    let listing = |dir: &Path| -> Vec<(String, Vec<u8>)> {
        let mut files: Vec<_> = fs::read_dir(dir)
            .unwrap()
            .map(|e| e.unwrap().path())
            .map(|p| {
                (
                    p.file_name().unwrap().to_string_lossy().into_owned(),
                    fs::read(&p).unwrap(),
                )
            })
            .collect();
        files.sort();
        files
    };
    let base = listing(&runs[0].0);
    let identical = runs[1..]
        .iter()
        .all(|(dir, records)| listing(dir) == base && records == &runs[0].1);
    let motions = base.iter().filter(|(n, _)| n.ends_with(".bkm")).count();
    check(
        identical && motions > 0,
        format!("{motions} motion files, identical across 2 serial runs and 8 workers: {identical}"),
    )
}

/// Written straight to stdout so the lines appear without `--nocapture`.
fn report(line: String) {
    let mut out = std::io::stdout();
    writeln!(out, "{line}").and_then(|_| out.flush()).expect("stdout");
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("balance soundness", balance_soundness),
        ("planar arm IK", planar_arm_ik),
        ("derivative correctness", derivative_correctness),
        ("LM behavior", lm_behavior),
        ("sampler algebra", sampler_algebra),
        ("shaping algebra", shaping_algebra),
        ("hybrid gating", hybrid_gating),
        ("metric oracles", metric_oracles),
        ("curriculum simulation", curriculum_behavior),
        ("reproducibility", reproducibility),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match &outcome {
            Ok(detail) => report(format!("PASS {:>2} {name}: {detail} [{secs:.1}s]", i + 1)),
            Err(detail) => {
                report(format!("FAIL {:>2} {name}: {detail} [{secs:.1}s]", i + 1));
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
