//! Command-line and HTTP front ends for the pareidolia animation pipeline.

pub mod service;

use std::fs;
use std::path::{Component, Path, PathBuf};

use pareanim_core::bezier::{fit_composite_with, Parameterization, Point2, Polyline};
use pareanim_core::io::{PipelineConfig, MAX_CONTROLS, MIN_CONTROLS};
use pareanim_core::shape::{BoundarySchema, FitLayout, ReferenceFace};
use pareanim_core::{Error, Result};
use serde::{Deserialize, Serialize};

/// Points in the overlay curve returned by a fit.
pub const SAMPLED_CURVE_POINTS: usize = 128;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitRequest {
    pub points: Vec<[f64; 2]>,
    pub n_controls: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitResponse {
    pub controls: Vec<[f64; 2]>,
    pub sampled_curve: Vec<[f64; 2]>,
    /// Root-mean-square distance between the points and the curve.
    pub residual: f64,
}

/// Fits one annotated branch exactly as the pipeline does.
pub fn fit_points(req: &FitRequest, segments: usize) -> Result<FitResponse> {
    if !(MIN_CONTROLS..=MAX_CONTROLS).contains(&req.n_controls) {
        return Err(Error::Validation(format!(
            "n_controls {} is outside {MIN_CONTROLS}..={MAX_CONTROLS}",
            req.n_controls
        )));
    }
    if req.points.len() < req.n_controls {
        return Err(Error::Validation(format!(
            "{} points cannot determine {} controls",
            req.points.len(),
            req.n_controls
        )));
    }
    let points = req.points.iter().map(|p| Point2::new(p[0], p[1])).collect();
    let layout = FitLayout::for_controls(req.n_controls, segments);
    let fit = fit_composite_with(
        &Polyline::new(points)?,
        layout.order,
        layout.segments,
        &Parameterization::ChordLength,
    )?;
    let pair = |p: &Point2| [p.x, p.y];
    Ok(FitResponse {
        controls: fit.curve.control_points().iter().map(pair).collect(),
        sampled_curve: fit
            .curve
            .sample_points(SAMPLED_CURVE_POINTS)
            .iter()
            .map(pair)
            .collect(),
        residual: fit.rms_residual(),
    })
}

/// Resolves an annotation's `image_ref` inside `root`, refusing paths that
/// could leave it.
pub fn resolve_image_ref(root: &Path, image_ref: &str) -> Result<PathBuf> {
    let rel = Path::new(image_ref);
    if image_ref.is_empty()
        || !rel
            .components()
            .all(|c| matches!(c, Component::Normal(_) | Component::CurDir))
    {
        return Err(Error::Validation(format!(
            "image_ref `{image_ref}` must be a relative path without `..`"
        )));
    }
    Ok(root.join(rel))
}

/// Reads a configuration without range checks, so overrides can still fix it.
pub fn load_config(path: Option<&Path>) -> Result<PipelineConfig> {
    match path {
        Some(p) => Ok(serde_json::from_slice(&fs::read(p)?)?),
        None => Ok(PipelineConfig::default()),
    }
}

pub fn load_schema(path: Option<&Path>) -> Result<BoundarySchema> {
    let schema = match path {
        Some(p) => serde_json::from_slice(&fs::read(p)?)?,
        None => BoundarySchema::standard68(),
    };
    schema.validate()?;
    Ok(schema)
}

pub fn load_reference(path: Option<&Path>) -> Result<ReferenceFace> {
    match path {
        Some(p) => ReferenceFace::from_json(&fs::read(p)?),
        None => Ok(ReferenceFace::standard()),
    }
}

/// Process exit status for an error: 2 when a pipeline stage failed, 1 for
/// bad input.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(e) if e.stage().is_some() => 2,
        _ => 1,
    }
}
