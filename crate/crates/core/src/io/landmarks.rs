use serde::{Deserialize, Serialize};

use crate::bezier::Point3;
use crate::error::{Error, Result};
use crate::shape::LandmarkFrame;

/// A driving sequence of 68-point 3D landmark frames.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LandmarkSequenceDoc {
    pub fps: f64,
    pub frames: Vec<Vec<[f64; 3]>>,
}

impl LandmarkSequenceDoc {
    pub fn from_frames(fps: f64, frames: &[LandmarkFrame]) -> Self {
        Self {
            fps,
            frames: frames
                .iter()
                .map(|f| f.points().iter().map(|p| [p.x, p.y, p.z]).collect())
                .collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.fps.is_finite() && self.fps > 0.0) {
            return Err(Error::Validation(format!("fps {} must be positive", self.fps)));
        }
        if self.frames.is_empty() {
            return Err(Error::Validation("sequence has no frames".into()));
        }
        self.to_frames().map(|_| ())
    }

    pub fn to_frames(&self) -> Result<Vec<LandmarkFrame>> {
        self.frames
            .iter()
            .enumerate()
            .map(|(i, pts)| {
                LandmarkFrame::new(i, pts.iter().map(|p| Point3::from(*p)).collect())
                    .map_err(|e| Error::Validation(format!("frame {i}: {e}")))
            })
            .collect()
    }
}

pub fn parse_landmarks(bytes: &[u8]) -> Result<LandmarkSequenceDoc> {
    let doc: LandmarkSequenceDoc = serde_json::from_slice(bytes)?;
    doc.validate()?;
    Ok(doc)
}

pub fn serialize_landmarks(doc: &LandmarkSequenceDoc) -> String {
    serde_json::to_string(doc).expect("landmark sequence serializes")
}
