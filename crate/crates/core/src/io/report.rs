use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::metrics::PartTrace;
use crate::shape::Part;

/// Sequence-level metrics for one facial part.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartRecord {
    pub part: Part,
    /// 1 − mean absolute open-ratio difference.
    pub co_acc: f64,
    /// Absent for single-frame sequences.
    pub m_acc: Option<f64>,
    pub mean_s_sim: f64,
    pub s_sim: Vec<f64>,
    pub human: PartTrace,
    pub pareidolia: PartTrace,
}

/// A frame the pipeline could not produce.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameDiagnostic {
    pub frame: usize,
    pub stage: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricsReport {
    pub frames: usize,
    pub fps: f64,
    pub animated_roles: Vec<String>,
    pub parts: Vec<PartRecord>,
    pub diagnostics: Vec<FrameDiagnostic>,
}

impl MetricsReport {
    pub fn part(&self, part: Part) -> Option<&PartRecord> {
        self.parts.iter().find(|r| r.part == part)
    }

    pub fn parse(bytes: &[u8]) -> Result<Self> {
        Ok(serde_json::from_slice(bytes)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
