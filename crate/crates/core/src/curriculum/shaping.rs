//! Per-motion, per-body-part reward tolerances.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Joints whose name starts with any of `prefixes` belong to the group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodyPartGroup {
    pub name: String,
    pub prefixes: Vec<String>,
}

impl BodyPartGroup {
    pub fn new(name: &str, prefixes: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            prefixes: prefixes.iter().map(|p| p.to_string()).collect(),
        }
    }

    pub fn contains(&self, joint_name: &str) -> bool {
        self.prefixes.iter().any(|p| joint_name.starts_with(p.as_str()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ShapingConfig {
    /// EMA rate `α ∈ (0, 1]`.
    pub update_rate: f64,
    /// `[σ_lo, σ_hi]`, with `σ_lo > 0`.
    pub sigma_bounds: [f64; 2],
    pub initial_sigma: f64,
    pub groups: Vec<BodyPartGroup>,
}

impl Default for ShapingConfig {
    fn default() -> Self {
        Self {
            update_rate: 0.05,
            sigma_bounds: [1e-3, 1.0],
            initial_sigma: 0.5,
            groups: vec![
                BodyPartGroup::new("left_leg", &["left_hip", "left_knee", "left_ankle"]),
                BodyPartGroup::new("right_leg", &["right_hip", "right_knee", "right_ankle"]),
                BodyPartGroup::new("torso_head", &["waist", "torso", "neck", "head"]),
                BodyPartGroup::new(
                    "arms",
                    &[
                        "left_shoulder",
                        "left_elbow",
                        "left_wrist",
                        "right_shoulder",
                        "right_elbow",
                        "right_wrist",
                    ],
                ),
            ],
        }
    }
}

impl ShapingConfig {
    pub fn validate(&self) -> Result<()> {
        let [lo, hi] = self.sigma_bounds;
        if !(self.update_rate > 0.0 && self.update_rate <= 1.0) {
            return Err(Error::Config(format!(
                "update_rate {} outside (0, 1]",
                self.update_rate
            )));
        }
        if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
            return Err(Error::Config(format!("invalid sigma bounds [{lo}, {hi}]")));
        }
        if !(lo..=hi).contains(&self.initial_sigma) {
            return Err(Error::Config(format!(
                "initial sigma {} outside [{lo}, {hi}]",
                self.initial_sigma
            )));
        }
        if self.groups.is_empty() {
            return Err(Error::Config("no body-part groups".into()));
        }
        for (i, g) in self.groups.iter().enumerate() {
            if self.groups[..i].iter().any(|h| h.name == g.name) {
                return Err(Error::Config(format!("duplicate body-part group {}", g.name)));
            }
        }
        Ok(())
    }

    /// First group claiming `joint_name`.
    pub fn group_of(&self, joint_name: &str) -> Option<usize> {
        self.groups.iter().position(|g| g.contains(joint_name))
    }
}

/// `exp(−err / σ)`.
pub fn shaped_reward(err: f64, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidArgument(format!("sigma must be positive, got {sigma}")));
    }
    if !(err >= 0.0) {
        return Err(Error::InvalidArgument(format!("error must be non-negative, got {err}")));
    }
    Ok((-err / sigma).exp())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapingState {
    /// `sigma[motion][group]`.
    pub sigma: Vec<Vec<f64>>,
    pub group_names: Vec<String>,
    pub update_rate: f64,
    pub sigma_bounds: [f64; 2],
}

impl ShapingState {
    pub fn new(motions: usize, config: &ShapingConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            sigma: vec![vec![config.initial_sigma; config.groups.len()]; motions],
            group_names: config.groups.iter().map(|g| g.name.clone()).collect(),
            update_rate: config.update_rate,
            sigma_bounds: config.sigma_bounds,
        })
    }

    pub fn motions(&self) -> usize {
        self.sigma.len()
    }

    pub fn group_index(&self, name: &str) -> Result<usize> {
        self.group_names
            .iter()
            .position(|g| g == name)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown body-part group {name}")))
    }

    pub fn sigma(&self, motion: usize, group: usize) -> Result<f64> {
        self.sigma
            .get(motion)
            .and_then(|row| row.get(group))
            .copied()
            .ok_or_else(|| Error::InvalidArgument(format!("no sigma for motion {motion}, group {group}")))
    }

    /// `σ ← clamp((1 − α) σ + α err, σ_lo, σ_hi)`; returns the new value.
    pub fn update(&mut self, motion: usize, group: usize, err: f64) -> Result<f64> {
        if !(err >= 0.0) || !err.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "error must be finite and non-negative, got {err}"
            )));
        }
        let current = self.sigma(motion, group)?;
        let a = self.update_rate;
        let next = ((1.0 - a) * current + a * err).clamp(self.sigma_bounds[0], self.sigma_bounds[1]);
        self.sigma[motion][group] = next;
        Ok(next)
    }
}

/// Functional form of [`ShapingState::update`] addressing the group by name.
pub fn update_sigma(state: &ShapingState, motion: usize, group: &str, err: f64) -> Result<ShapingState> {
    let mut next = state.clone();
    let g = next.group_index(group)?;
    next.update(motion, g, err)?;
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn state(sigma: f64, rate: f64) -> ShapingState {
        let cfg = ShapingConfig {
            update_rate: rate,
            initial_sigma: sigma,
            ..ShapingConfig::default()
        };
        ShapingState::new(3, &cfg).unwrap()
    }

    #[test]
    fn ema_step() {
        let s = update_sigma(&state(0.5, 0.1), 1, "arms", 0.3).unwrap();
        assert_relative_eq!(s.sigma[1][3], 0.48, epsilon = 1e-15);
        assert_eq!(s.sigma[0][3], 0.5);
    }

    #[test]
    fn fixed_point_and_clamp() {
        let mut s = state(0.2, 0.3);
        assert_relative_eq!(s.update(0, 0, 0.2).unwrap(), 0.2, epsilon = 1e-15);
        for _ in 0..500 {
            s.update(0, 0, 0.0).unwrap();
        }
        assert_eq!(s.sigma[0][0], 1e-3);
        for _ in 0..500 {
            s.update(0, 0, 50.0).unwrap();
        }
        assert_eq!(s.sigma[0][0], 1.0);
    }

    #[test]
    fn unknown_entries_rejected() {
        let s = state(0.5, 0.1);
        assert!(update_sigma(&s, 3, "arms", 0.1).is_err());
        assert!(update_sigma(&s, 0, "tail", 0.1).is_err());
        assert!(s.clone().update(0, 4, 0.1).is_err());
        assert!(s.clone().update(0, 0, -0.1).is_err());
    }

    #[test]
    fn reward_values() {
        assert_eq!(shaped_reward(0.0, 0.3).unwrap(), 1.0);
        assert_relative_eq!(shaped_reward(0.3, 0.3).unwrap(), (-1.0f64).exp(), epsilon = 1e-15);
        assert!(shaped_reward(0.1, 0.0).is_err());
        assert!(shaped_reward(0.1, -1.0).is_err());
    }

    #[test]
    fn default_groups_cover_humanoid_joints() {
        let cfg = ShapingConfig::default();
        assert_eq!(cfg.group_of("left_knee_joint"), Some(0));
        assert_eq!(cfg.group_of("right_ankle_roll_joint"), Some(1));
        assert_eq!(cfg.group_of("waist_yaw_joint"), Some(2));
        assert_eq!(cfg.group_of("right_elbow_joint"), Some(3));
        assert_eq!(cfg.group_of("tail"), None);
    }

    #[test]
    fn config_validation() {
        let mut cfg = ShapingConfig::default();
        cfg.update_rate = 0.0;
        assert!(cfg.validate().is_err());
        let mut cfg = ShapingConfig::default();
        cfg.sigma_bounds = [0.0, 1.0];
        assert!(cfg.validate().is_err());
        let mut cfg = ShapingConfig::default();
        cfg.groups.push(cfg.groups[0].clone());
        assert!(cfg.validate().is_err());
    }
}
