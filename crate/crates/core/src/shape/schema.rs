use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const LANDMARK_COUNT: usize = 68;

/// Facial part a branch belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Part {
    Mouth,
    EyeLeft,
    EyeRight,
}

impl Part {
    pub const ALL: [Part; 3] = [Part::Mouth, Part::EyeLeft, Part::EyeRight];

    pub fn from_role(role: &str) -> Option<Part> {
        if role.starts_with("mouth") {
            Some(Part::Mouth)
        } else if role.starts_with("eye_left") {
            Some(Part::EyeLeft)
        } else if role.starts_with("eye_right") {
            Some(Part::EyeRight)
        } else {
            None
        }
    }

    /// Upper and lower branch roles that define the part's opening.
    pub fn opening_roles(self) -> (&'static str, &'static str) {
        match self {
            Part::Mouth => ("mouth_upper_inner", "mouth_lower_inner"),
            Part::EyeLeft => ("eye_left_upper", "eye_left_lower"),
            Part::EyeRight => ("eye_right_upper", "eye_right_lower"),
        }
    }
}

impl fmt::Display for Part {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Part::Mouth => "mouth",
            Part::EyeLeft => "eye_left",
            Part::EyeRight => "eye_right",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchSpec {
    pub role: String,
    /// Landmark indices, ordered along the branch.
    pub indices: Vec<usize>,
}

/// Maps branch roles to landmark chains and names the rigid alignment subset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundarySchema {
    pub branches: Vec<BranchSpec>,
    pub rigid_indices: Vec<usize>,
}

impl BoundarySchema {
    /// 68-point layout: both eyes and the outer and inner lips, each split
    /// into upper and lower halves running left to right in the image.
    pub fn standard68() -> Self {
        let spec = |role: &str, indices: &[usize]| BranchSpec {
            role: role.to_string(),
            indices: indices.to_vec(),
        };
        Self {
            branches: vec![
                spec("eye_right_upper", &[36, 37, 38, 39]),
                spec("eye_right_lower", &[36, 41, 40, 39]),
                spec("eye_left_upper", &[42, 43, 44, 45]),
                spec("eye_left_lower", &[42, 47, 46, 45]),
                spec("mouth_upper_outer", &[48, 49, 50, 51, 52, 53, 54]),
                spec("mouth_lower_outer", &[48, 59, 58, 57, 56, 55, 54]),
                spec("mouth_upper_inner", &[60, 61, 62, 63, 64]),
                spec("mouth_lower_inner", &[60, 67, 66, 65, 64]),
            ],
            // nose bridge and eye corners
            rigid_indices: vec![27, 28, 29, 30, 36, 39, 42, 45],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for b in &self.branches {
            if !seen.insert(b.role.as_str()) {
                return Err(Error::Schema(format!("duplicate role `{}`", b.role)));
            }
            if b.indices.len() < 2 {
                return Err(Error::Schema(format!(
                    "role `{}` has fewer than 2 landmarks",
                    b.role
                )));
            }
            if let Some(i) = b.indices.iter().find(|&&i| i >= LANDMARK_COUNT) {
                return Err(Error::Schema(format!(
                    "role `{}` references landmark {i}, layout has {LANDMARK_COUNT}",
                    b.role
                )));
            }
        }
        if let Some(i) = self.rigid_indices.iter().find(|&&i| i >= LANDMARK_COUNT) {
            return Err(Error::Schema(format!("rigid landmark {i} out of range")));
        }
        if self.rigid_indices.len() < 3 {
            return Err(Error::Schema("rigid subset needs at least 3 landmarks".into()));
        }
        Ok(())
    }

    pub fn contains(&self, role: &str) -> bool {
        self.branches.iter().any(|b| b.role == role)
    }

    pub fn roles(&self) -> impl Iterator<Item = &str> {
        self.branches.iter().map(|b| b.role.as_str())
    }
}

impl Default for BoundarySchema {
    fn default() -> Self {
        Self::standard68()
    }
}
