//! Balanced single-support motion synthesis for floating-base humanoids,
//! plus the adaptive curriculum machinery used to train a tracking policy on
//! the resulting motion library.
//!
//! The crate is organised by capability:
//!
//! - [`kinematics`]: model loading, forward kinematics, center of mass and
//!   analytic Jacobians.
//! - [`reference`]: generation-task sampling and SE(3) reference
//!   trajectories for the support foot, swing foot and pelvis.
//! - [`optimizer`]: two-stage Levenberg–Marquardt trajectory optimization
//!   with a balance penalty, and the end-to-end [`optimizer::generate_motion`].
//! - [`curriculum`]: performance-driven motion sampling and per-motion
//!   reward shaping, with a synthetic learner for simulation.
//! - [`rewards`]: hybrid (source-gated) tracking rewards and evaluation
//!   metrics.
//! - [`motion_io`]: the binary motion file format and dataset indexing.
//! - [`cli`]: batch commands behind the `balancekit` binary.
//!
//! Runnable walkthroughs for each capability live in `examples/`.

pub mod cli;
pub mod curriculum;
mod error;
pub mod kinematics;
pub mod motion_io;
pub mod optimizer;
pub mod reference;
pub mod rewards;

pub use error::{Error, Result};

/// Path of a bundled asset (model or config file) shipped with the crate.
pub fn asset_path(relative: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("assets")
        .join(relative)
}
