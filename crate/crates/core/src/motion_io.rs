//! Binary motion files and dataset indexing.
//!
//! A motion file is a small JSON header followed by a fixed-stride block of
//! little-endian frames; see the README for the byte layout. Numbers are
//! stored as raw IEEE-754 bits so a write/read cycle is lossless.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use nalgebra::{Quaternion, UnitQuaternion, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::{JointVector, KinematicModel, Pose};
use crate::optimizer::Trajectory;
use crate::rewards::MotionSource;

pub const MAGIC: [u8; 8] = *b"BKMOTION";
pub const FORMAT_VERSION: u32 = 1;
/// File extension picked up by [`build_index`].
pub const EXTENSION: &str = "bkm";
const QUATERNION_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MotionHeader {
    pub id: String,
    pub model: String,
    /// Actuated joint names, in the order of each frame's joint block.
    pub joints: Vec<String>,
    pub frame_dt: f64,
    pub source: MotionSource,
    #[serde(default)]
    pub support_foot: Option<String>,
    /// Ground-plane center of the support rectangle, m.
    #[serde(default)]
    pub support_center: Option<[f64; 2]>,
    /// Feet whose contact flags each frame carries, in order; may be empty.
    #[serde(default)]
    pub contact_feet: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MotionFrame {
    pub base: Pose,
    pub joints: JointVector,
    /// One flag per `contact_feet` entry.
    pub contacts: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MotionFile {
    pub header: MotionHeader,
    pub frames: Vec<MotionFrame>,
}

impl MotionFile {
    /// Wraps an optimized trajectory; contact flags are left empty.
    pub fn from_trajectory(
        id: &str,
        model: &KinematicModel,
        traj: &Trajectory,
        source: MotionSource,
        support_foot: Option<&str>,
    ) -> Self {
        Self {
            header: MotionHeader {
                id: id.to_string(),
                model: model.name.clone(),
                joints: model.actuated_joint_names(),
                frame_dt: traj.frame_dt,
                source,
                support_foot: support_foot.map(str::to_string),
                support_center: None,
                contact_feet: Vec::new(),
            },
            frames: traj
                .base_poses
                .iter()
                .zip(&traj.joint_vectors)
                .map(|(b, q)| MotionFrame {
                    base: *b,
                    joints: q.clone(),
                    contacts: Vec::new(),
                })
                .collect(),
        }
    }

    pub fn to_trajectory(&self) -> Trajectory {
        Trajectory {
            base_poses: self.frames.iter().map(|f| f.base).collect(),
            joint_vectors: self.frames.iter().map(|f| f.joints.clone()).collect(),
            frame_dt: self.header.frame_dt,
        }
    }

    pub fn duration(&self) -> f64 {
        self.frames.len().saturating_sub(1) as f64 * self.header.frame_dt
    }

    /// Per-frame contact flags.
    pub fn contacts(&self) -> Vec<Vec<bool>> {
        self.frames.iter().map(|f| f.contacts.clone()).collect()
    }

    /// Checks the file invariants; the message names the offending field or
    /// frame.
    pub fn check(&self) -> std::result::Result<(), String> {
        let h = &self.header;
        if h.id.is_empty() {
            return Err("header field `id` is empty".into());
        }
        if !(h.frame_dt > 0.0 && h.frame_dt.is_finite()) {
            return Err(format!("header field `frame_dt` must be positive, got {}", h.frame_dt));
        }
        if let Some(c) = h.support_center {
            if !c.iter().all(|v| v.is_finite()) {
                return Err("header field `support_center` is not finite".into());
            }
        }
        if self.frames.len() < 2 {
            return Err(format!("need at least 2 frames, got {}", self.frames.len()));
        }
        for (t, f) in self.frames.iter().enumerate() {
            if f.joints.len() != h.joints.len() {
                return Err(format!(
                    "frame {t}: {} joint values, header lists {} joints",
                    f.joints.len(),
                    h.joints.len()
                ));
            }
            if f.contacts.len() != h.contact_feet.len() {
                return Err(format!(
                    "frame {t}: {} contact flags, header lists {} feet",
                    f.contacts.len(),
                    h.contact_feet.len()
                ));
            }
            let norm = f.base.rotation.as_ref().coords.norm();
            if (norm - 1.0).abs() > QUATERNION_TOLERANCE {
                return Err(format!("frame {t}: base quaternion norm {norm} is not unit"));
            }
            let finite = f.base.translation.iter().all(|v| v.is_finite()) && f.joints.iter().all(|v| v.is_finite());
            if !finite {
                return Err(format!("frame {t}: non-finite value"));
            }
        }
        Ok(())
    }

    fn stride(&self) -> usize {
        frame_stride(self.header.joints.len(), self.header.contact_feet.len())
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let header = serde_json::to_vec(&self.header)
            .map_err(|e| Error::InvalidArgument(format!("header serialization: {e}")))?;
        let mut out = Vec::with_capacity(24 + header.len() + self.frames.len() * self.stride());
        out.extend_from_slice(&MAGIC);
        out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        out.extend_from_slice(&(header.len() as u32).to_le_bytes());
        out.extend_from_slice(&header);
        out.extend_from_slice(&(self.frames.len() as u64).to_le_bytes());
        for f in &self.frames {
            out.extend_from_slice(&(f.joints.len() as u32).to_le_bytes());
            let t = f.base.translation;
            let q = f.base.rotation.as_ref();
            for v in [t.x, t.y, t.z, q.w, q.i, q.j, q.k].iter().chain(f.joints.iter()) {
                out.extend_from_slice(&v.to_le_bytes());
            }
            out.extend(f.contacts.iter().map(|&c| c as u8));
        }
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8]) -> std::result::Result<Self, String> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(8, "magic")? != MAGIC {
            return Err("bad magic bytes, not a motion file".into());
        }
        let version = r.u32("version")?;
        if version != FORMAT_VERSION {
            return Err(format!("unsupported format version {version}"));
        }
        let header_len = r.u32("header length")? as usize;
        let header: MotionHeader =
            serde_json::from_slice(r.take(header_len, "header")?).map_err(|e| format!("header: {e}"))?;
        let count = r.u64("frame count")? as usize;
        let (n, feet) = (header.joints.len(), header.contact_feet.len());
        let remaining = bytes.len() - r.pos;
        let stride = frame_stride(n, feet);
        if remaining != count.saturating_mul(stride) {
            let complete = remaining / stride;
            return Err(if complete < count {
                format!("truncated: frame {complete} of {count} is incomplete")
            } else {
                format!(
                    "{} trailing bytes after frame {}",
                    remaining - count * stride,
                    count - 1
                )
            });
        }
        let mut frames = Vec::with_capacity(count);
        for t in 0..count {
            let declared = r.u32("joint count")? as usize;
            if declared != n {
                return Err(format!("frame {t}: declares {declared} joints, header lists {n}"));
            }
            let mut vals = [0.0; 7];
            for v in vals.iter_mut() {
                *v = r.f64()?;
            }
            let mut joints = JointVector::zeros(n);
            for v in joints.iter_mut() {
                *v = r.f64()?;
            }
            let contacts = r.take(feet, "contacts")?.iter().map(|&b| b != 0).collect();
            let rotation = UnitQuaternion::new_unchecked(Quaternion::new(vals[3], vals[4], vals[5], vals[6]));
            frames.push(MotionFrame {
                base: Pose::new(rotation, Vector3::new(vals[0], vals[1], vals[2])),
                joints,
                contacts,
            });
        }
        let motion = MotionFile { header, frames };
        motion.check()?;
        Ok(motion)
    }
}

fn frame_stride(joints: usize, feet: usize) -> usize {
    4 + 8 * (7 + joints) + feet
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize, what: &str) -> std::result::Result<&'a [u8], String> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        match end {
            Some(end) => {
                let s = &self.bytes[self.pos..end];
                self.pos = end;
                Ok(s)
            }
            None => Err(format!("truncated: missing {what}")),
        }
    }

    fn u32(&mut self, what: &str) -> std::result::Result<u32, String> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().expect("4 bytes")))
    }

    fn u64(&mut self, what: &str) -> std::result::Result<u64, String> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().expect("8 bytes")))
    }

    fn f64(&mut self) -> std::result::Result<f64, String> {
        Ok(f64::from_le_bytes(
            self.take(8, "frame data")?.try_into().expect("8 bytes"),
        ))
    }
}

pub fn write_motion(motion: &MotionFile, path: &Path) -> Result<()> {
    motion.check().map_err(|message| Error::MotionFormat {
        path: path.to_path_buf(),
        message,
    })?;
    let bytes = motion.to_bytes()?;
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    w.write_all(&bytes)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

pub fn read_motion(path: &Path) -> Result<MotionFile> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    MotionFile::from_bytes(&bytes).map_err(|message| Error::MotionFormat {
        path: path.to_path_buf(),
        message,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexEntry {
    pub id: String,
    pub path: PathBuf,
    pub source: MotionSource,
    pub duration: f64,
    pub frames: usize,
}

/// A file that looked like a motion file but failed to parse.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexDiagnostic {
    pub path: PathBuf,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DatasetIndex {
    pub entries: Vec<IndexEntry>,
    pub diagnostics: Vec<IndexDiagnostic>,
}

/// Indexes every `*.bkm` file directly inside `dir`, in file-name order.
pub fn build_index(dir: &Path) -> Result<DatasetIndex> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .map(|e| e.map(|e| e.path()).map_err(|err| Error::io(dir, err)))
        .collect::<Result<Vec<_>>>()?;
    paths.retain(|p| p.is_file() && p.extension().is_some_and(|x| x == EXTENSION));
    paths.sort();

    let mut index = DatasetIndex::default();
    let mut seen: BTreeMap<String, PathBuf> = BTreeMap::new();
    for path in paths {
        match read_motion(&path) {
            Ok(m) => {
                if seen.insert(m.header.id.clone(), path.clone()).is_some() {
                    return Err(Error::DuplicateId(m.header.id));
                }
                index.entries.push(IndexEntry {
                    id: m.header.id.clone(),
                    source: m.header.source,
                    duration: m.duration(),
                    frames: m.frames.len(),
                    path,
                });
            }
            Err(Error::MotionFormat { message, .. }) => index.diagnostics.push(IndexDiagnostic { path, message }),
            Err(e) => return Err(e),
        }
    }
    Ok(index)
}
