//! Boundary sets for human, reference and pareidolia faces, and the motion
//! controllers that carry human motion onto pareidolia control points.

mod boundary;
mod controllers;
mod landmarks;
mod schema;

pub use boundary::{build_boundaries, ratio_origin, BoundarySet, Branch, FaceKind, FitLayout};
pub use controllers::{
    adapt_controllers, apply_controllers, compute_controllers, resample_ordered, BranchControllers,
    MotionControllerSet, DEFAULT_EPS_DEN,
};
pub use landmarks::{
    align_to_reference, estimate_similarity, LandmarkFrame, ReferenceFace, Similarity, NEUTRAL_OPEN_RATIO,
};
pub use schema::{BoundarySchema, BranchSpec, Part, LANDMARK_COUNT};
