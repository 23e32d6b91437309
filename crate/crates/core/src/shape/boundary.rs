use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::bezier::{fit_composite, CompositeBezier, Point3, Polyline};
use crate::error::{Error, Result};
use crate::shape::landmarks::LandmarkFrame;
use crate::shape::schema::{BoundarySchema, LANDMARK_COUNT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FaceKind {
    Human,
    Reference,
    Pareidolia,
}

/// Degree and segment count used when fitting a branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FitLayout {
    pub order: usize,
    pub segments: usize,
}

impl FitLayout {
    pub fn control_count(&self) -> usize {
        self.order * self.segments + 1
    }

    /// Largest layout not exceeding `self` that `points` samples can determine.
    pub fn clamp_to(self, points: usize) -> FitLayout {
        if points >= self.control_count() {
            return self;
        }
        let per_segment = (points.saturating_sub(1)) / self.segments;
        if per_segment >= 1 {
            FitLayout {
                order: per_segment,
                segments: self.segments,
            }
        } else {
            FitLayout {
                order: points.saturating_sub(1).max(1),
                segments: 1,
            }
        }
    }

    /// Layout for a requested control count, preferring `segments` pieces when
    /// the count divides evenly.
    pub fn for_controls(n_controls: usize, segments: usize) -> FitLayout {
        let n = n_controls.max(2) - 1;
        if segments > 0 && n.is_multiple_of(segments) {
            FitLayout {
                order: n / segments,
                segments,
            }
        } else {
            FitLayout {
                order: n,
                segments: 1,
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub role: String,
    pub curve: CompositeBezier<3>,
}

/// Named boundary branches of one face plus the origin of its ratio frame.
///
/// Motion controllers are coordinate ratios measured relative to `origin`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySet {
    kind: FaceKind,
    branches: Vec<Branch>,
    origin: Point3,
}

impl BoundarySet {
    pub fn new(kind: FaceKind, branches: Vec<Branch>, origin: Point3) -> Result<Self> {
        let mut seen = HashSet::new();
        for b in &branches {
            if !seen.insert(b.role.as_str()) {
                return Err(Error::Validation(format!("duplicate role `{}`", b.role)));
            }
        }
        Ok(Self {
            kind,
            branches,
            origin,
        })
    }

    /// Like [`BoundarySet::new`] with the origin placed by [`ratio_origin`].
    pub fn with_derived_origin(kind: FaceKind, branches: Vec<Branch>) -> Result<Self> {
        let origin = ratio_origin(&branches, kind == FaceKind::Pareidolia);
        Self::new(kind, branches, origin)
    }

    pub fn kind(&self) -> FaceKind {
        self.kind
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn origin(&self) -> Point3 {
        self.origin
    }

    pub fn len(&self) -> usize {
        self.branches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    pub fn branch(&self, role: &str) -> Option<&Branch> {
        self.branches.iter().find(|b| b.role == role)
    }

    pub fn roles(&self) -> impl Iterator<Item = &str> {
        self.branches.iter().map(|b| b.role.as_str())
    }

    /// Subset with the given roles, in this set's order, with the origin
    /// re-derived over the subset.
    pub fn restrict<'a>(&self, roles: impl IntoIterator<Item = &'a str>) -> Result<BoundarySet> {
        let wanted: HashSet<&str> = roles.into_iter().collect();
        for role in &wanted {
            if self.branch(role).is_none() {
                return Err(Error::Mapping(role.to_string()));
            }
        }
        let branches = self
            .branches
            .iter()
            .filter(|b| wanted.contains(b.role.as_str()))
            .cloned()
            .collect();
        Self::with_derived_origin(self.kind, branches)
    }

    pub(crate) fn replace_curves(&self, curves: Vec<CompositeBezier<3>>) -> BoundarySet {
        let branches = self
            .branches
            .iter()
            .zip(curves)
            .map(|(b, curve)| Branch {
                role: b.role.clone(),
                curve,
            })
            .collect();
        BoundarySet {
            kind: self.kind,
            branches,
            origin: self.origin,
        }
    }
}

/// Origin of the ratio frame: the control-point bounding box minimum pushed
/// out by the largest box extent on every axis, so each coordinate sits at
/// least one extent away from zero. Planar (pareidolia) sets keep `z = 0`.
pub fn ratio_origin(branches: &[Branch], planar: bool) -> Point3 {
    let mut lo = Point3::repeat(f64::INFINITY);
    let mut hi = Point3::repeat(f64::NEG_INFINITY);
    for p in branches.iter().flat_map(|b| b.curve.control_points()) {
        lo = lo.inf(&p);
        hi = hi.sup(&p);
    }
    if !lo.x.is_finite() {
        return Point3::zeros();
    }
    let axes = if planar { 2 } else { 3 };
    let margin = (0..axes).map(|d| hi[d] - lo[d]).fold(0.0, f64::max);
    let mut origin = lo - Point3::repeat(margin);
    if planar {
        origin.z = 0.0;
    }
    origin
}

/// Fits every schema branch of an aligned frame.
///
/// Each branch is fitted with `layout`, reduced where the branch has too few
/// landmarks to determine that many controls.
pub fn build_boundaries(
    frame: &LandmarkFrame,
    schema: &BoundarySchema,
    layout: FitLayout,
    kind: FaceKind,
) -> Result<BoundarySet> {
    let mut branches = Vec::with_capacity(schema.branches.len());
    for spec in &schema.branches {
        if let Some(i) = spec.indices.iter().find(|&&i| i >= LANDMARK_COUNT) {
            return Err(Error::Schema(format!(
                "role `{}` references landmark {i}, layout has {LANDMARK_COUNT}",
                spec.role
            )));
        }
        let points = spec.indices.iter().map(|&i| frame.points()[i]).collect();
        let polyline = Polyline::new(points)?;
        let fit = layout.clamp_to(polyline.len());
        let curve = fit_composite(&polyline, fit.order, fit.segments)?;
        branches.push(Branch {
            role: spec.role.clone(),
            curve,
        });
    }
    BoundarySet::with_derived_origin(kind, branches)
}
