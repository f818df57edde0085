//! Floating-base kinematic tree and its JSON model schema.

use std::collections::{HashMap, VecDeque};

use nalgebra::{DVector, Unit, Vector3};
use serde::{Deserialize, Serialize};

use super::pose::Pose;
use crate::error::{Error, Result};

const AXIS_TOLERANCE: f64 = 1e-9;

/// Joint angles in model declaration order (actuated joints only).
pub type JointVector = DVector<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JointKind {
    Revolute,
    Fixed,
}

#[derive(Debug, Clone)]
pub struct Link {
    pub name: String,
    pub mass: f64,
    pub local_com: Vector3<f64>,
    /// Index into [`KinematicModel::joints`]; `None` for the base link.
    pub parent_joint: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct Joint {
    pub name: String,
    pub kind: JointKind,
    pub parent_link: usize,
    pub child_link: usize,
    pub axis: Unit<Vector3<f64>>,
    pub origin: Pose,
    pub limits: [f64; 2],
    /// Position in the [`JointVector`] for revolute joints.
    pub actuated_index: Option<usize>,
}

/// Validated kinematic tree. Immutable once loaded.
#[derive(Debug, Clone)]
pub struct KinematicModel {
    pub name: String,
    pub links: Vec<Link>,
    pub joints: Vec<Joint>,
    pub base_link: usize,
    feet: Vec<usize>,
    /// Joint indices ordered parents-first.
    traversal: Vec<usize>,
    /// Actuated joint index → joint index.
    actuated: Vec<usize>,
    /// Per link, actuated indices of the joints between it and the base.
    ancestors: Vec<Vec<usize>>,
    link_lookup: HashMap<String, usize>,
    total_mass: f64,
}

// -- on-disk schema ---------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDescription {
    #[serde(default)]
    pub name: String,
    pub base_link: String,
    #[serde(default)]
    pub feet: Vec<String>,
    pub links: Vec<LinkDescription>,
    pub joints: Vec<JointDescription>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkDescription {
    pub name: String,
    pub mass: f64,
    #[serde(default)]
    pub com: [f64; 3],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JointDescription {
    pub name: String,
    #[serde(rename = "type")]
    pub kind: JointKind,
    pub parent: String,
    pub child: String,
    #[serde(default)]
    pub axis: Option<[f64; 3]>,
    #[serde(default)]
    pub origin: OriginDescription,
    #[serde(default)]
    pub limits: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OriginDescription {
    #[serde(default)]
    pub xyz: [f64; 3],
    #[serde(default)]
    pub rpy: [f64; 3],
}

/// Parses and validates a JSON model description.
pub fn load_model(description: &str) -> Result<KinematicModel> {
    let desc: ModelDescription = serde_json::from_str(description).map_err(|e| Error::Schema(e.to_string()))?;
    KinematicModel::from_description(desc)
}

impl KinematicModel {
    pub fn from_description(desc: ModelDescription) -> Result<Self> {
        let mut link_lookup = HashMap::new();
        let mut links = Vec::with_capacity(desc.links.len());
        for l in &desc.links {
            if link_lookup.insert(l.name.clone(), links.len()).is_some() {
                return Err(Error::Schema(format!("duplicate link `{}`", l.name)));
            }
            if !l.mass.is_finite() || l.mass < 0.0 {
                return Err(Error::InvalidModel(format!(
                    "link `{}` has invalid mass {}",
                    l.name, l.mass
                )));
            }
            links.push(Link {
                name: l.name.clone(),
                mass: l.mass,
                local_com: Vector3::from(l.com),
                parent_joint: None,
            });
        }
        let base_link = *link_lookup
            .get(&desc.base_link)
            .ok_or_else(|| Error::Schema(format!("base link `{}` is not declared", desc.base_link)))?;

        let find = |name: &str, joint: &str| {
            link_lookup
                .get(name)
                .copied()
                .ok_or_else(|| Error::Schema(format!("joint `{joint}` references unknown link `{name}`")))
        };

        let mut joints = Vec::with_capacity(desc.joints.len());
        let mut actuated = Vec::new();
        let mut joint_names = HashMap::new();
        for (ji, j) in desc.joints.iter().enumerate() {
            if joint_names.insert(j.name.clone(), ji).is_some() {
                return Err(Error::Schema(format!("duplicate joint `{}`", j.name)));
            }
            let parent_link = find(&j.parent, &j.name)?;
            let child_link = find(&j.child, &j.name)?;
            if child_link == base_link || parent_link == child_link {
                return Err(Error::CyclicGraph(j.name.clone()));
            }
            if links[child_link].parent_joint.is_some() {
                // a second parent closes a loop
                return Err(Error::CyclicGraph(j.name.clone()));
            }
            links[child_link].parent_joint = Some(ji);

            let (axis, limits, actuated_index) = match j.kind {
                JointKind::Revolute => {
                    let a = j
                        .axis
                        .ok_or_else(|| Error::Schema(format!("revolute joint `{}` is missing `axis`", j.name)))?;
                    let a = Vector3::from(a);
                    let norm = a.norm();
                    if !norm.is_finite() || (norm - 1.0).abs() > AXIS_TOLERANCE {
                        return Err(Error::NonUnitAxis(j.name.clone(), norm));
                    }
                    let lim = j
                        .limits
                        .ok_or_else(|| Error::Schema(format!("revolute joint `{}` is missing `limits`", j.name)))?;
                    if !(lim[0] <= lim[1]) {
                        return Err(Error::InvertedLimits(j.name.clone(), lim[0], lim[1]));
                    }
                    actuated.push(ji);
                    (Unit::new_normalize(a), lim, Some(actuated.len() - 1))
                }
                JointKind::Fixed => (Vector3::z_axis(), [0.0, 0.0], None),
            };
            joints.push(Joint {
                name: j.name.clone(),
                kind: j.kind,
                parent_link,
                child_link,
                axis,
                origin: Pose::from_rpy_xyz(j.origin.rpy, j.origin.xyz),
                limits,
                actuated_index,
            });
        }

        // Breadth-first from the base; anything unreached sits on a cycle.
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); links.len()];
        for (ji, j) in joints.iter().enumerate() {
            children[j.parent_link].push(ji);
        }
        let mut traversal = Vec::with_capacity(joints.len());
        let mut queue = VecDeque::from([base_link]);
        let mut reached = vec![false; links.len()];
        reached[base_link] = true;
        while let Some(l) = queue.pop_front() {
            for &ji in &children[l] {
                traversal.push(ji);
                let c = joints[ji].child_link;
                reached[c] = true;
                queue.push_back(c);
            }
        }
        if traversal.len() != joints.len() {
            let orphan = joints
                .iter()
                .find(|j| !reached[j.child_link])
                .map(|j| j.name.clone())
                .unwrap_or_default();
            return Err(Error::CyclicGraph(orphan));
        }
        if let Some(l) = links.iter().enumerate().find(|(i, _)| !reached[*i]) {
            return Err(Error::InvalidModel(format!(
                "link `{}` is not connected to the base",
                l.1.name
            )));
        }

        let mut ancestors: Vec<Vec<usize>> = vec![Vec::new(); links.len()];
        for &ji in &traversal {
            let j = &joints[ji];
            let mut chain = ancestors[j.parent_link].clone();
            if let Some(a) = j.actuated_index {
                chain.push(a);
            }
            ancestors[j.child_link] = chain;
        }

        let total_mass: f64 = links.iter().map(|l| l.mass).sum();
        if !(total_mass > 0.0) {
            return Err(Error::InvalidModel("total mass must be positive".into()));
        }

        let mut feet = Vec::new();
        if !desc.feet.is_empty() {
            if desc.feet.len() != 2 || desc.feet[0] == desc.feet[1] {
                return Err(Error::Schema("`feet` must name exactly two distinct links".into()));
            }
            for f in &desc.feet {
                feet.push(
                    *link_lookup
                        .get(f)
                        .ok_or_else(|| Error::Schema(format!("foot `{f}` is not a declared link")))?,
                );
            }
        }

        Ok(Self {
            name: desc.name,
            links,
            joints,
            base_link,
            feet,
            traversal,
            actuated,
            ancestors,
            link_lookup,
            total_mass,
        })
    }

    /// Number of actuated (revolute) joints, i.e. the [`JointVector`] length.
    pub fn dof(&self) -> usize {
        self.actuated.len()
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn link_index(&self, name: &str) -> Result<usize> {
        self.link_lookup
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownLink(name.to_string()))
    }

    pub fn base_link_name(&self) -> &str {
        &self.links[self.base_link].name
    }

    /// The two foot links, if the model tags them.
    pub fn feet(&self) -> &[usize] {
        &self.feet
    }

    pub fn foot_names(&self) -> Vec<&str> {
        self.feet.iter().map(|&i| self.links[i].name.as_str()).collect()
    }

    /// The other foot. Errors if `foot` is not one of the tagged feet.
    pub fn opposite_foot(&self, foot: usize) -> Result<usize> {
        match self.feet.as_slice() {
            [a, b] if *a == foot => Ok(*b),
            [a, b] if *b == foot => Ok(*a),
            [_, _] => Err(Error::InvalidArgument(format!(
                "link `{}` is not a foot",
                self.links[foot].name
            ))),
            _ => Err(Error::InvalidModel(format!(
                "model `{}` does not tag two feet",
                self.name
            ))),
        }
    }

    /// Actuated joints in declaration order.
    pub fn actuated_joints(&self) -> impl Iterator<Item = &Joint> + '_ {
        self.actuated.iter().map(|&j| &self.joints[j])
    }

    pub fn actuated_joint_names(&self) -> Vec<String> {
        self.actuated_joints().map(|j| j.name.clone()).collect()
    }

    pub fn actuated_index(&self, joint_name: &str) -> Option<usize> {
        self.actuated_joints().position(|j| j.name == joint_name)
    }

    pub fn lower_limits(&self) -> JointVector {
        JointVector::from_iterator(self.dof(), self.actuated_joints().map(|j| j.limits[0]))
    }

    pub fn upper_limits(&self) -> JointVector {
        JointVector::from_iterator(self.dof(), self.actuated_joints().map(|j| j.limits[1]))
    }

    pub(crate) fn traversal(&self) -> &[usize] {
        &self.traversal
    }

    pub(crate) fn ancestors(&self, link: usize) -> &[usize] {
        &self.ancestors[link]
    }

    pub(crate) fn actuated_joint(&self, index: usize) -> &Joint {
        &self.joints[self.actuated[index]]
    }

    pub fn check_dims(&self, q: &JointVector) -> Result<()> {
        if q.len() != self.dof() {
            return Err(Error::dims(self.dof(), q.len()));
        }
        Ok(())
    }

    pub fn within_limits(&self, q: &JointVector) -> bool {
        q.len() == self.dof()
            && self
                .actuated_joints()
                .zip(q.iter())
                .all(|(j, &v)| v >= j.limits[0] && v <= j.limits[1])
    }
}
