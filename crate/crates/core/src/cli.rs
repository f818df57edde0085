//! Batch commands behind the `balancekit` binary: generation, validation,
//! metrics, curriculum simulation and inspection.
//!
//! Every command is also callable as a plain function taking a
//! [`RunConfig`], so the binary stays a thin argument parser.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::curriculum::{simulate_curriculum, CurriculumConfig, CurriculumTrace};
use crate::error::{Error, Result};
use crate::kinematics::{load_model, KinematicModel, KinematicState, Pose};
use crate::motion_io::{build_index, read_motion, write_motion, IndexDiagnostic, MotionFile, EXTENSION};
use crate::optimizer::{
    balance_distance, generate_motion, CostWeights, GenerationOutcome, RejectionStage, SolverConfig,
};
use crate::reference::{sample_generation_task, SamplingConfig};
use crate::rewards::{
    infer_contacts, metric_contact_mismatch, metric_gmpjpe, metric_mpjpe, metric_slippage, metric_success,
    KeypointTrack, MetricReport, MotionSource, RewardConfig, SUCCESS_THRESHOLD,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;
pub const EXIT_IO: i32 = 4;

/// Solver settings and cost weights, as stored in one config file.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverFile {
    pub solver: SolverConfig,
    pub weights: CostWeights,
}

/// Top-level run configuration. Relative input paths are resolved against
/// the directory of the file they were read from, `out` against the working
/// directory; absent component configs fall back to built-in defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: PathBuf,
    pub sampling: Option<PathBuf>,
    pub solver: Option<PathBuf>,
    pub curriculum: Option<PathBuf>,
    pub rewards: Option<PathBuf>,
    pub out: PathBuf,
    pub seed: u64,
    pub jobs: usize,
    pub count: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: crate::asset_path("humanoid23.json"),
            sampling: None,
            solver: None,
            curriculum: None,
            rewards: None,
            out: PathBuf::from("balancekit-out"),
            seed: 0,
            jobs: 1,
            count: 10,
        }
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Every component config a command may need, loaded and validated.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub model: KinematicModel,
    pub sampling: SamplingConfig,
    pub solver: SolverFile,
    pub curriculum: CurriculumConfig,
    pub rewards: RewardConfig,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let mut cfg: RunConfig = read_json(path)?;
        let dir = path.parent().unwrap_or(Path::new("."));
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        };
        resolve(&mut cfg.model);
        for p in [
            &mut cfg.sampling,
            &mut cfg.solver,
            &mut cfg.curriculum,
            &mut cfg.rewards,
        ]
        .into_iter()
        .flatten()
        {
            resolve(p);
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.count < 1 {
            return Err(Error::Config("count must be at least 1".into()));
        }
        if self.jobs < 1 {
            return Err(Error::Config("jobs must be at least 1".into()));
        }
        Ok(())
    }

    pub fn resolve(&self) -> Result<Resolved> {
        let text = fs::read_to_string(&self.model).map_err(|e| Error::io(&self.model, e))?;
        let model = load_model(&text)?;
        fn or_default<T: DeserializeOwned + Default>(p: &Option<PathBuf>) -> Result<T> {
            p.as_deref().map(read_json).unwrap_or_else(|| Ok(T::default()))
        }
        let resolved = Resolved {
            sampling: or_default(&self.sampling)?,
            solver: or_default(&self.solver)?,
            curriculum: or_default(&self.curriculum)?,
            rewards: or_default(&self.rewards)?,
            model,
        };
        resolved.sampling.validate(&resolved.model)?;
        resolved.solver.solver.validate()?;
        resolved.solver.weights.validate()?;
        resolved.curriculum.validate()?;
        resolved.rewards.validate()?;
        Ok(resolved)
    }
}

/// Outcome of one generation task, as logged to `tasks.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskRecord {
    pub index: usize,
    pub seed: u64,
    /// `accepted`, `rejected` or `error`.
    pub status: String,
    pub stage: Option<RejectionStage>,
    pub balance_violation: Option<f64>,
    pub tracking_error: Option<f64>,
    pub file: Option<String>,
    pub message: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerateSummary {
    pub attempted: usize,
    pub accepted: usize,
    pub rejected_stage1: usize,
    pub rejected_stage2: usize,
    pub errors: usize,
    pub wall_time_s: f64,
}

/// File stem of the motion generated from task seed `seed`.
pub fn motion_id(seed: u64) -> String {
    format!("syn_{seed:020}")
}

fn run_task(index: usize, cfg: &RunConfig, r: &Resolved) -> Result<TaskRecord> {
    let seed = cfg.seed.wrapping_add(index as u64);
    let task = sample_generation_task(seed, &r.sampling, &r.model)?;
    let mut record = TaskRecord {
        index,
        seed,
        status: "accepted".into(),
        stage: None,
        balance_violation: None,
        tracking_error: None,
        file: None,
        message: None,
    };
    match generate_motion(&task, &r.model, &r.solver.weights, &r.solver.solver)? {
        GenerationOutcome::Accepted {
            trajectory,
            references,
            balance_distances,
            ..
        } => {
            let id = motion_id(seed);
            let mut motion = MotionFile::from_trajectory(
                &id,
                &r.model,
                &trajectory,
                MotionSource::Synthetic,
                Some(&task.support_foot),
            );
            let c = references.support[0].translation;
            motion.header.support_center = Some([c.x, c.y]);
            motion.header.contact_feet = r.model.foot_names().iter().map(|s| s.to_string()).collect();
            for (frame, flags) in motion
                .frames
                .iter_mut()
                .zip(infer_contacts(&r.model, &trajectory, &r.rewards)?)
            {
                frame.contacts = flags;
            }
            let file = format!("{id}.{EXTENSION}");
            write_motion(&motion, &cfg.out.join(&file))?;
            record.balance_violation = Some(balance_distances.iter().copied().fold(0.0, f64::max));
            record.file = Some(file);
        }
        GenerationOutcome::Rejected(rej) => {
            record.status = "rejected".into();
            record.stage = Some(rej.stage);
            record.balance_violation = Some(rej.balance_violation);
            record.tracking_error = Some(rej.tracking_error);
        }
    }
    Ok(record)
}

/// Generates `count` tasks with seeds `seed + k` on `jobs` worker threads.
/// Accepted motions go to `out/<id>.bkm`; every task is logged in order to
/// `out/tasks.jsonl`. Task-level failures are recorded, not fatal.
pub fn cmd_generate(cfg: &RunConfig) -> Result<(GenerateSummary, Vec<TaskRecord>)> {
    cfg.validate()?;
    let resolved = cfg.resolve()?;
    fs::create_dir_all(&cfg.out).map_err(|e| Error::io(&cfg.out, e))?;
    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let results: Vec<Result<TaskRecord>> = pool.install(|| {
        (0..cfg.count)
            .into_par_iter()
            .map(|k| run_task(k, cfg, &resolved))
            .collect()
    });

    let mut records = Vec::with_capacity(cfg.count);
    for (k, res) in results.into_iter().enumerate() {
        match res {
            Ok(r) => records.push(r),
            Err(e @ Error::Io { .. }) => return Err(e),
            Err(e) => records.push(TaskRecord {
                index: k,
                seed: cfg.seed.wrapping_add(k as u64),
                status: "error".into(),
                stage: None,
                balance_violation: None,
                tracking_error: None,
                file: None,
                message: Some(e.to_string()),
            }),
        }
    }
    let log_path = cfg.out.join("tasks.jsonl");
    let mut log = Vec::new();
    for r in &records {
        serde_json::to_writer(&mut log, r).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        log.push(b'\n');
    }
    fs::write(&log_path, log).map_err(|e| Error::io(&log_path, e))?;

    let count = |status: &str, stage: Option<RejectionStage>| {
        records
            .iter()
            .filter(|r| r.status == status && r.stage == stage)
            .count()
    };
    let summary = GenerateSummary {
        attempted: records.len(),
        accepted: count("accepted", None),
        rejected_stage1: count("rejected", Some(RejectionStage::Stage1)),
        rejected_stage2: count("rejected", Some(RejectionStage::Stage2)),
        errors: count("error", None),
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    Ok((summary, records))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationEntry {
    pub id: String,
    pub path: PathBuf,
    pub source: MotionSource,
    pub schema_ok: bool,
    /// `max_t d_t`, or `None` when the balance check does not apply.
    pub max_balance_distance: Option<f64>,
    pub flagged: bool,
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidateReport {
    pub epsilon: f64,
    pub motions: Vec<ValidationEntry>,
    pub diagnostics: Vec<IndexDiagnostic>,
}

impl ValidateReport {
    pub fn flagged(&self) -> usize {
        self.motions.iter().filter(|m| m.flagged).count() + self.diagnostics.len()
    }
}

fn support_center(model: &KinematicModel, motion: &MotionFile) -> Result<[f64; 2]> {
    if let Some(c) = motion.header.support_center {
        return Ok(c);
    }
    let foot = motion
        .header
        .support_foot
        .as_deref()
        .ok_or_else(|| Error::InvalidArgument("synthetic motion without a support foot".into()))?;
    let first = &motion.frames[0];
    let state = KinematicState::new(model, &first.base, &first.joints)?;
    let p = state.link_pose(model.link_index(foot)?).translation;
    Ok([p.x, p.y])
}

fn check_against_model(model: &KinematicModel, motion: &MotionFile) -> std::result::Result<(), String> {
    if motion.header.model != model.name {
        return Err(format!(
            "model `{}` does not match `{}`",
            motion.header.model, model.name
        ));
    }
    if motion.header.joints != model.actuated_joint_names() {
        return Err("joint order does not match the model".into());
    }
    Ok(())
}

/// Recomputes `max_t d_t` for every synthetic motion in `dir` and flags
/// those above `ε`. Mocap motions get the schema check only.
pub fn cmd_validate(dir: &Path, cfg: &RunConfig) -> Result<ValidateReport> {
    let r = cfg.resolve()?;
    let weights = &r.solver.weights;
    let index = build_index(dir)?;
    let mut motions = Vec::with_capacity(index.entries.len());
    for entry in &index.entries {
        let motion = read_motion(&entry.path)?;
        let mut v = ValidationEntry {
            id: entry.id.clone(),
            path: entry.path.clone(),
            source: entry.source,
            schema_ok: true,
            max_balance_distance: None,
            flagged: false,
            reason: None,
        };
        if let Err(reason) = check_against_model(&r.model, &motion) {
            v.schema_ok = false;
            v.flagged = true;
            v.reason = Some(reason);
        } else if entry.source == MotionSource::Synthetic {
            let checked = support_center(&r.model, &motion).and_then(|c| {
                let traj = motion.to_trajectory();
                let support = vec![Pose::from_translation(c[0], c[1], 0.0); traj.len()];
                balance_distance(&r.model, &traj, &support, weights.support_rect)
            });
            match checked {
                Ok(d) => {
                    let max_d = d.into_iter().fold(0.0, f64::max);
                    v.max_balance_distance = Some(max_d);
                    if max_d > weights.epsilon {
                        v.flagged = true;
                        v.reason = Some(format!("max balance distance {max_d:.5} m exceeds {}", weights.epsilon));
                    }
                }
                Err(e) => {
                    v.flagged = true;
                    v.reason = Some(e.to_string());
                }
            }
        }
        motions.push(v);
    }
    Ok(ValidateReport {
        epsilon: weights.epsilon,
        motions,
        diagnostics: index.diagnostics,
    })
}

fn contacts_for(model: &KinematicModel, motion: &MotionFile, rewards: &RewardConfig) -> Result<Vec<Vec<bool>>> {
    let feet: Vec<String> = model.foot_names().iter().map(|s| s.to_string()).collect();
    if motion.header.contact_feet == feet {
        Ok(motion.contacts())
    } else {
        infer_contacts(model, &motion.to_trajectory(), rewards)
    }
}

/// The five tracking metrics of `traj_path` against `ref_path`.
pub fn cmd_metrics(traj_path: &Path, ref_path: &Path, cfg: &RunConfig) -> Result<MetricReport> {
    let r = cfg.resolve()?;
    let traj = read_motion(traj_path)?;
    let reference = read_motion(ref_path)?;
    let incompatible = |msg: String| Error::InvalidArgument(format!("incompatible motions: {msg}"));
    if traj.header.joints != reference.header.joints {
        return Err(incompatible("joint orders differ".into()));
    }
    if traj.frames.len() != reference.frames.len() {
        return Err(incompatible(format!(
            "{} vs {} frames",
            traj.frames.len(),
            reference.frames.len()
        )));
    }
    if traj.header.frame_dt != reference.header.frame_dt {
        return Err(incompatible("frame_dt differs".into()));
    }
    check_against_model(&r.model, &traj).map_err(incompatible)?;

    let keypoints = r.rewards.keypoint_links(&r.model)?;
    let track = |m: &MotionFile| {
        let t = m.to_trajectory();
        KeypointTrack::from_motion(&r.model, &t.base_poses, &t.joint_vectors, &keypoints)
    };
    let (a, b) = (track(&traj)?, track(&reference)?);
    let contacts = contacts_for(&r.model, &traj, &r.rewards)?;
    let ref_contacts = contacts_for(&r.model, &reference, &r.rewards)?;

    let support = traj
        .header
        .support_foot
        .as_ref()
        .or(reference.header.support_foot.as_ref());
    let slippage = match support {
        Some(foot) => {
            let link = r.model.link_index(foot)?;
            let k = r
                .model
                .feet()
                .iter()
                .position(|&f| f == link)
                .ok_or_else(|| Error::InvalidArgument(format!("{foot} is not a foot")))?;
            let t = traj.to_trajectory();
            let positions = t
                .base_poses
                .iter()
                .zip(&t.joint_vectors)
                .map(|(b, q)| KinematicState::new(&r.model, b, q).map(|s| s.link_pose(link).translation))
                .collect::<Result<Vec<_>>>()?;
            let flags: Vec<bool> = contacts.iter().map(|c| c[k]).collect();
            metric_slippage(&positions, &flags, t.frame_dt).ok()
        }
        None => None,
    };
    Ok(MetricReport {
        gmpjpe_mm: metric_gmpjpe(&a, &b)?,
        mpjpe_mm: metric_mpjpe(&a, &b)?,
        success: metric_success(&a, &b, SUCCESS_THRESHOLD)?,
        contact_mismatch_pct: metric_contact_mismatch(&contacts, &ref_contacts)?,
        slippage_mps: slippage,
    })
}

/// Runs the curriculum simulation; `rounds` and `seed` override the config.
pub fn cmd_curriculum_sim(cfg: &RunConfig, rounds: Option<usize>, seed: Option<u64>) -> Result<CurriculumTrace> {
    let mut c = cfg.resolve()?.curriculum;
    if let Some(r) = rounds {
        c.simulation.rounds = r;
    }
    if let Some(s) = seed {
        c.simulation.seed = s;
    }
    simulate_curriculum(&c)
}

/// Summary of a motion file or a model description.
pub fn cmd_inspect(path: &Path) -> Result<serde_json::Value> {
    if path.extension().is_some_and(|x| x == EXTENSION) {
        let m = read_motion(path)?;
        let h = &m.header;
        return Ok(serde_json::json!({
            "kind": "motion",
            "id": h.id,
            "model": h.model,
            "source": h.source,
            "frames": m.frames.len(),
            "frame_dt": h.frame_dt,
            "duration_s": m.duration(),
            "joints": h.joints.len(),
            "support_foot": h.support_foot,
            "support_center": h.support_center,
            "contact_feet": h.contact_feet,
        }));
    }
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let model = load_model(&text)?;
    Ok(serde_json::json!({
        "kind": "model",
        "name": model.name,
        "base_link": model.base_link_name(),
        "links": model.links.len(),
        "dof": model.dof(),
        "total_mass": model.total_mass(),
        "feet": model.foot_names(),
        "joints": model.actuated_joint_names(),
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Human,
    Jsonl,
}

#[derive(Debug, Parser)]
#[command(
    name = "balancekit",
    version,
    about = "Balanced motion synthesis and curriculum tools"
)]
pub struct Cli {
    /// Run configuration (JSON); built-in defaults when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "human")]
    pub format: OutputFormat,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample tasks and write accepted balanced motions.
    Generate {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        count: Option<usize>,
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recheck balance and schema of every motion in a directory.
    Validate { dir: PathBuf },
    /// Tracking metrics of a motion against a reference motion.
    Metrics {
        traj: PathBuf,
        reference: PathBuf,
        /// Also write the report as JSON here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate adaptive sampling and shaping with a synthetic learner.
    CurriculumSim {
        #[arg(long)]
        rounds: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Trace destination (line-delimited JSON).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Summarize a motion file or model description.
    Inspect { path: PathBuf },
}

fn emit<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    let line = serde_json::to_string(value).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    writeln!(out, "{line}").map_err(|e| Error::io("<stdout>", e))
}

macro_rules! say {
    ($out:expr, $($arg:tt)*) => {
        writeln!($out, $($arg)*).map_err(|e| Error::io("<stdout>", e))?
    };
}

/// Runs a parsed command, printing to `out`. Returns the process exit code
/// for completed commands (validation failures are not errors).
pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let json = cli.format == OutputFormat::Jsonl;
    match &cli.command {
        Command::Generate {
            seed,
            count,
            jobs,
            out: dir,
        } => {
            cfg.seed = seed.unwrap_or(cfg.seed);
            cfg.count = count.unwrap_or(cfg.count);
            cfg.jobs = jobs.unwrap_or(cfg.jobs);
            cfg.out = dir.clone().unwrap_or(cfg.out);
            let (summary, records) = cmd_generate(&cfg)?;
            if json {
                for r in &records {
                    emit(out, r)?;
                }
                emit(out, &summary)?;
            } else {
                for r in records.iter().filter(|r| r.status != "accepted") {
                    say!(
                        out,
                        "task {} (seed {}): {} {:?} violation={:?} tracking={:?} {}",
                        r.index,
                        r.seed,
                        r.status,
                        r.stage,
                        r.balance_violation,
                        r.tracking_error,
                        r.message.as_deref().unwrap_or("")
                    );
                }
                say!(
                    out,
                    "attempted {} accepted {} rejected stage1 {} stage2 {} errors {} in {:.1}s -> {}",
                    summary.attempted,
                    summary.accepted,
                    summary.rejected_stage1,
                    summary.rejected_stage2,
                    summary.errors,
                    summary.wall_time_s,
                    cfg.out.display()
                );
            }
            Ok(EXIT_OK)
        }
        Command::Validate { dir } => {
            let report = cmd_validate(dir, &cfg)?;
            if json {
                for m in &report.motions {
                    emit(out, m)?;
                }
                for d in &report.diagnostics {
                    emit(out, d)?;
                }
            } else {
                for m in &report.motions {
                    let d = m.max_balance_distance.map_or("-".to_string(), |d| format!("{d:.5}"));
                    let status = if m.flagged { "FLAG" } else { "ok" };
                    say!(
                        out,
                        "{status:4} {} {} max_d={d} {}",
                        m.id,
                        m.source.as_str(),
                        m.reason.as_deref().unwrap_or("")
                    );
                }
                for d in &report.diagnostics {
                    say!(out, "BAD  {}: {}", d.path.display(), d.message);
                }
                say!(
                    out,
                    "{} motions, {} flagged",
                    report.motions.len() + report.diagnostics.len(),
                    report.flagged()
                );
            }
            Ok(if report.flagged() == 0 {
                EXIT_OK
            } else {
                EXIT_VALIDATION
            })
        }
        Command::Metrics {
            traj,
            reference,
            out: path,
        } => {
            let report = cmd_metrics(traj, reference, &cfg)?;
            if let Some(p) = path {
                write_json(p, &report)?;
            }
            if json {
                emit(out, &report)?;
            } else {
                say!(out, "g-MPJPE   {:.3} mm", report.gmpjpe_mm);
                say!(out, "MPJPE     {:.3} mm", report.mpjpe_mm);
                say!(out, "success   {}", if report.success { "pass" } else { "fail" });
                say!(out, "contact   {:.2} % mismatch", report.contact_mismatch_pct);
                match report.slippage_mps {
                    Some(s) => say!(out, "slippage  {s:.4} m/s"),
                    None => say!(out, "slippage  n/a (support foot never in contact)"),
                }
            }
            Ok(EXIT_OK)
        }
        Command::CurriculumSim {
            rounds,
            seed,
            out: path,
        } => {
            let trace = cmd_curriculum_sim(&cfg, *rounds, *seed)?;
            let path = path.clone().unwrap_or_else(|| cfg.out.join("curriculum_trace.jsonl"));
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
            }
            let file = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
            trace
                .write_jsonl(std::io::BufWriter::new(file))
                .map_err(|e| Error::io(&path, e))?;
            let last = trace.probabilities(trace.rounds() - 1);
            if json {
                emit(
                    out,
                    &serde_json::json!({ "rounds": trace.rounds() - 1, "trace": path, "final_p": last }),
                )?;
            } else {
                let (lo, hi) = last
                    .iter()
                    .fold((f64::INFINITY, 0.0f64), |(lo, hi), &p| (lo.min(p), hi.max(p)));
                say!(
                    out,
                    "{} rounds over {} motions, final p in [{lo:.4}, {hi:.4}] -> {}",
                    trace.rounds() - 1,
                    trace.motions,
                    path.display()
                );
            }
            Ok(EXIT_OK)
        }
        Command::Inspect { path } => {
            let summary = cmd_inspect(path)?;
            if json {
                emit(out, &summary)?;
            } else {
                let text = serde_json::to_string_pretty(&summary).map_err(|e| Error::InvalidArgument(e.to_string()))?;
                say!(out, "{text}");
            }
            Ok(EXIT_OK)
        }
    }
}

/// Exit code for a failed command.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io { .. } => EXIT_IO,
        Error::MotionFormat { .. } | Error::DuplicateId(_) => EXIT_VALIDATION,
        _ => EXIT_CONFIG,
    }
}

/// Entry point of the binary: parse, run, report.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match execute(&cli, &mut lock) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
