use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::bezier::{fit_composite, Point3, Polyline};
use crate::error::{Error, Result};
use crate::shape::{ratio_origin, BoundarySchema, BoundarySet, Branch, FaceKind, FitLayout};

pub const MIN_CONTROLS: usize = 2;
pub const MAX_CONTROLS: usize = 32;

/// Hand-labelled boundary branch of a pareidolia image, in pixel coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnotatedBranch {
    pub role: String,
    pub points: Vec<[f64; 2]>,
    pub n_controls: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnotationDoc {
    pub image_ref: String,
    pub branches: Vec<AnnotatedBranch>,
    /// Origin of the controller ratio frame. Derived from the branches when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coordinate_origin: Option<[f64; 2]>,
}

impl AnnotationDoc {
    pub fn validate(&self, schema: &BoundarySchema) -> Result<()> {
        if self.branches.is_empty() {
            return Err(Error::Validation("annotation has no branches".into()));
        }
        let mut seen = HashSet::new();
        for b in &self.branches {
            if !schema.contains(&b.role) {
                return Err(Error::Schema(format!(
                    "role `{}` is not in the boundary schema",
                    b.role
                )));
            }
            if !seen.insert(b.role.as_str()) {
                return Err(Error::Validation(format!("duplicate role `{}`", b.role)));
            }
            if !(MIN_CONTROLS..=MAX_CONTROLS).contains(&b.n_controls) {
                return Err(Error::Validation(format!(
                    "`{}` asks for {} controls, allowed range is {MIN_CONTROLS}..={MAX_CONTROLS}",
                    b.role, b.n_controls
                )));
            }
            if b.points.len() < b.n_controls {
                return Err(Error::Validation(format!(
                    "`{}` has {} points, fewer than its {} controls",
                    b.role,
                    b.points.len(),
                    b.n_controls
                )));
            }
            if b.points.iter().flatten().any(|c| !c.is_finite()) {
                return Err(Error::Validation(format!("`{}` has a non-finite point", b.role)));
            }
            if b.points.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Validation(format!(
                    "`{}` repeats a point consecutively",
                    b.role
                )));
            }
        }
        if let Some(o) = self.coordinate_origin {
            if o.iter().any(|c| !c.is_finite()) {
                return Err(Error::Validation("coordinate_origin is not finite".into()));
            }
        }
        Ok(())
    }

    pub fn roles(&self) -> impl Iterator<Item = &str> {
        self.branches.iter().map(|b| b.role.as_str())
    }

    /// Fits every branch and places the planar set in its ratio frame.
    ///
    /// Points are lifted to `z = 1` so the depth ratio has a unit denominator.
    pub fn boundaries(&self, segments: usize) -> Result<BoundarySet> {
        let branches = self
            .branches
            .iter()
            .map(|b| {
                let pts = b.points.iter().map(|p| Point3::new(p[0], p[1], 1.0)).collect();
                let layout = FitLayout::for_controls(b.n_controls, segments);
                let curve = fit_composite(&Polyline::new(pts)?, layout.order, layout.segments)?;
                Ok(Branch {
                    role: b.role.clone(),
                    curve,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let origin = match self.coordinate_origin {
            Some([x, y]) => Point3::new(x, y, 0.0),
            None => ratio_origin(&branches, true),
        };
        BoundarySet::new(FaceKind::Pareidolia, branches, origin)
    }
}

pub fn parse_annotation(bytes: &[u8], schema: &BoundarySchema) -> Result<AnnotationDoc> {
    let doc: AnnotationDoc = serde_json::from_slice(bytes)?;
    doc.validate(schema)?;
    Ok(doc)
}

pub fn serialize_annotation(doc: &AnnotationDoc) -> String {
    serde_json::to_string_pretty(doc).expect("annotation serializes")
}
