//! End-to-end animation: landmark frames in, synthesized pareidolia frames and
//! a metrics report out.

use std::fs;
use std::path::Path;

use log::{info, warn};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{InverseMotionField, MotionField, MotionMask};
use crate::io::{
    write_flow, AnnotationDoc, FrameDiagnostic, LandmarkSequenceDoc, MetricsReport, PartRecord,
    PipelineConfig,
};
use crate::metrics::{
    co_acc, m_acc, part_area, part_outline, s_sim, shape_descriptor, vertical_gap, PartTrace,
};
use crate::motion::{first_order_fill, invert_field, make_seeds, motion_mask, spread_and_combine, Decay};
use crate::shape::{
    adapt_controllers, align_to_reference, apply_controllers, build_boundaries, compute_controllers,
    BoundarySchema, BoundarySet, FaceKind, LandmarkFrame, Part, ReferenceFace,
};
use crate::warp::{synthesize_levels, Image};

/// Per-part shape measurements of one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct PartShape {
    pub part: Part,
    pub human_gap: f64,
    pub human_area: f64,
    pub pareidolia_gap: f64,
    pub pareidolia_area: f64,
    pub s_sim: f64,
}

#[derive(Debug, Clone)]
pub struct FrameResult {
    pub index: usize,
    pub image: Image,
    pub forward: MotionField,
    pub inverse: InverseMotionField,
    pub mask: MotionMask,
    pub filled: usize,
    pub unreachable: usize,
    /// Synthesis levels, coarsest first, when requested.
    pub levels: Option<Vec<Image>>,
    pub shapes: Vec<PartShape>,
}

/// Everything that stays fixed across the frames of one run.
#[derive(Debug, Clone)]
pub struct Animator {
    cfg: PipelineConfig,
    decay: Decay,
    schema: BoundarySchema,
    reference: ReferenceFace,
    reference_set: BoundarySet,
    rest: BoundarySet,
    image: Image,
    parts: Vec<Part>,
    keep_levels: bool,
}

fn stage<T>(name: &'static str, r: Result<T>) -> Result<T> {
    r.map_err(|e| e.at_stage(name))
}

impl Animator {
    pub fn new(
        cfg: &PipelineConfig,
        schema: &BoundarySchema,
        annotation: &AnnotationDoc,
        reference: &ReferenceFace,
        image: Image,
    ) -> Result<Self> {
        cfg.validate()?;
        schema.validate()?;
        annotation.validate(schema)?;
        let factor = 1usize << cfg.pyramid_depth;
        if !image.width().is_multiple_of(factor) || !image.height().is_multiple_of(factor) {
            return Err(Error::Validation(format!(
                "image {}x{} is not divisible by 2^pyramid_depth = {factor}",
                image.width(),
                image.height()
            )));
        }
        let rest = stage("fit_annotation", annotation.boundaries(cfg.fit_segments))?;
        let full = stage(
            "build_boundaries",
            build_boundaries(&reference.as_frame(0), schema, cfg.layout(), FaceKind::Reference),
        )?;
        let reference_set = stage("build_boundaries", full.restrict(annotation.roles()))?;
        if rest.len() < schema.branches.len() {
            info!(
                "animating {} of {} schema branches: {}",
                rest.len(),
                schema.branches.len(),
                annotation.roles().collect::<Vec<_>>().join(", ")
            );
        }
        let parts = Part::ALL
            .into_iter()
            .filter(|p| {
                let (u, l) = p.opening_roles();
                rest.branch(u).is_some() && rest.branch(l).is_some()
            })
            .collect();
        Ok(Self {
            decay: cfg.decay()?,
            cfg: cfg.clone(),
            schema: schema.clone(),
            reference: reference.clone(),
            reference_set,
            rest,
            image,
            parts,
            keep_levels: false,
        })
    }

    pub fn keep_levels(mut self, keep: bool) -> Self {
        self.keep_levels = keep;
        self
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.cfg
    }

    pub fn rest(&self) -> &BoundarySet {
        &self.rest
    }

    pub fn image(&self) -> &Image {
        &self.image
    }

    /// Parts whose opening branches are both annotated.
    pub fn parts(&self) -> &[Part] {
        &self.parts
    }

    /// Animated pareidolia boundaries and the aligned human boundaries for one frame.
    pub fn retarget(&self, frame: &LandmarkFrame) -> Result<(BoundarySet, BoundarySet)> {
        let aligned = stage(
            "align",
            align_to_reference(frame, &self.reference, &self.schema.rigid_indices),
        )?;
        let human = stage(
            "build_boundaries",
            build_boundaries(&aligned, &self.schema, self.cfg.layout(), FaceKind::Human),
        )?;
        let ctrl = stage(
            "compute_controllers",
            compute_controllers(&human, &self.reference_set, self.cfg.eps_den),
        )?;
        let adapted = stage("adapt_controllers", adapt_controllers(&ctrl, &self.rest))?;
        let animated = stage("apply_controllers", apply_controllers(&adapted, &self.rest))?;
        Ok((human, animated))
    }

    fn shapes(&self, human: &BoundarySet, animated: &BoundarySet) -> Result<Vec<PartShape>> {
        let per_branch = self.cfg.boundary_samples / 2 + 1;
        self.parts
            .iter()
            .map(|&part| {
                let (u, l) = part.opening_roles();
                let hu = &human.branch(u).ok_or_else(|| Error::Mapping(u.into()))?.curve;
                let hl = &human.branch(l).ok_or_else(|| Error::Mapping(l.into()))?.curve;
                let pu = &animated.branch(u).ok_or_else(|| Error::Mapping(u.into()))?.curve;
                let pl = &animated.branch(l).ok_or_else(|| Error::Mapping(l.into()))?.curve;
                let dh = shape_descriptor(&part_outline(hu, hl, per_branch), self.cfg.metric_bins)?;
                let dp = shape_descriptor(&part_outline(pu, pl, per_branch), self.cfg.metric_bins)?;
                Ok(PartShape {
                    part,
                    human_gap: vertical_gap(hu, hl),
                    human_area: part_area(hu, hl),
                    pareidolia_gap: vertical_gap(pu, pl),
                    pareidolia_area: part_area(pu, pl),
                    s_sim: s_sim(&dh, &dp)?,
                })
            })
            .collect()
    }

    /// Shape measurements of one driving frame, without synthesis.
    pub fn measure(&self, frame: &LandmarkFrame) -> Result<Vec<PartShape>> {
        let (human, animated) = self.retarget(frame)?;
        stage("metrics", self.shapes(&human, &animated))
    }

    /// Runs every stage for one driving frame.
    pub fn frame(&self, frame: &LandmarkFrame) -> Result<FrameResult> {
        let (human, animated) = self.retarget(frame)?;
        let shapes = stage("metrics", self.shapes(&human, &animated))?;
        let (w, h) = self.image.dims();
        let seeds = stage(
            "make_seeds",
            make_seeds(&self.rest, &animated, self.cfg.samples_per_branch),
        )?;
        let forward = stage(
            "spread_and_combine",
            spread_and_combine(&seeds, &self.decay, self.cfg.d_tol, w, h),
        )?;
        let raw = stage("invert_field", invert_field(&forward, self.cfg.w_min))?;
        let fill = stage("first_order_fill", first_order_fill(&raw, self.cfg.max_step))?;
        if fill.unreachable > 0 {
            warn!(
                "frame {}: {} pixels unreachable by fill",
                frame.frame_index, fill.unreachable
            );
        }
        let mask = motion_mask(&fill.field, self.cfg.m_eps);
        let synthesis = stage(
            "synthesize",
            synthesize_levels(&self.image, &fill.field, &mask, self.cfg.pyramid_depth),
        )?;
        let mut levels = synthesis.levels;
        let image = levels.pop().expect("synthesis yields the final level");
        Ok(FrameResult {
            index: frame.frame_index,
            image,
            forward,
            inverse: fill.field,
            mask,
            filled: fill.filled,
            unreachable: fill.unreachable,
            levels: self.keep_levels.then_some(levels),
            shapes,
        })
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Record failing frames and continue instead of aborting.
    pub keep_going: bool,
    pub keep_levels: bool,
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub frames: Vec<FrameResult>,
    pub report: MetricsReport,
}

fn diagnostic(frame: usize, err: &Error) -> FrameDiagnostic {
    let (stage, message) = match err {
        Error::Stage { stage, source } => (stage.to_string(), source.to_string()),
        other => ("unknown".to_string(), other.to_string()),
    };
    FrameDiagnostic {
        frame,
        stage,
        message,
    }
}

/// Splits per-frame results into successes and diagnostics, or returns the
/// first failure in frame order.
fn collect_frames<T>(results: Vec<Result<T>>, keep_going: bool) -> Result<(Vec<T>, Vec<FrameDiagnostic>)> {
    let mut done = Vec::with_capacity(results.len());
    let mut diagnostics = Vec::new();
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(f) => done.push(f),
            Err(e) if keep_going => {
                warn!("frame {i} skipped: {e}");
                diagnostics.push(diagnostic(i, &e));
            }
            Err(e) => return Err(e),
        }
    }
    Ok((done, diagnostics))
}

pub fn run_pipeline(
    cfg: &PipelineConfig,
    schema: &BoundarySchema,
    annotation: &AnnotationDoc,
    landmarks: &LandmarkSequenceDoc,
    reference: &ReferenceFace,
    image: Image,
    opts: RunOptions,
) -> Result<PipelineOutput> {
    landmarks.validate()?;
    let frames = landmarks.to_frames()?;
    let animator = Animator::new(cfg, schema, annotation, reference, image)?.keep_levels(opts.keep_levels);
    let results: Vec<Result<FrameResult>> = frames.par_iter().map(|f| animator.frame(f)).collect();
    let (done, diagnostics) = collect_frames(results, opts.keep_going)?;
    let shapes: Vec<&[PartShape]> = done.iter().map(|f| f.shapes.as_slice()).collect();
    let report = build_report(&animator, &shapes, landmarks, diagnostics)?;
    Ok(PipelineOutput { frames: done, report })
}

/// Metrics report of a sequence without synthesizing any frame.
pub fn measure_pipeline(
    cfg: &PipelineConfig,
    schema: &BoundarySchema,
    annotation: &AnnotationDoc,
    landmarks: &LandmarkSequenceDoc,
    reference: &ReferenceFace,
    image: Image,
    keep_going: bool,
) -> Result<MetricsReport> {
    landmarks.validate()?;
    let frames = landmarks.to_frames()?;
    let animator = Animator::new(cfg, schema, annotation, reference, image)?;
    let results: Vec<Result<Vec<PartShape>>> = frames.par_iter().map(|f| animator.measure(f)).collect();
    let (done, diagnostics) = collect_frames(results, keep_going)?;
    let shapes: Vec<&[PartShape]> = done.iter().map(Vec::as_slice).collect();
    build_report(&animator, &shapes, landmarks, diagnostics)
}

fn build_report(
    animator: &Animator,
    frames: &[&[PartShape]],
    landmarks: &LandmarkSequenceDoc,
    diagnostics: Vec<FrameDiagnostic>,
) -> Result<MetricsReport> {
    let mut parts = Vec::new();
    if !frames.is_empty() {
        for (k, &part) in animator.parts().iter().enumerate() {
            let col = |f: fn(&PartShape) -> f64| -> Vec<f64> { frames.iter().map(|fr| f(&fr[k])).collect() };
            let human = PartTrace::from_gaps(part, &col(|s| s.human_gap), col(|s| s.human_area))?;
            let pareidolia =
                PartTrace::from_gaps(part, &col(|s| s.pareidolia_gap), col(|s| s.pareidolia_area))?;
            let s_sim = col(|s| s.s_sim);
            parts.push(PartRecord {
                part,
                co_acc: co_acc(&human, &pareidolia)?,
                m_acc: (frames.len() >= 2)
                    .then(|| m_acc(&human, &pareidolia))
                    .transpose()?,
                mean_s_sim: s_sim.iter().sum::<f64>() / s_sim.len() as f64,
                s_sim,
                human,
                pareidolia,
            });
        }
    }
    Ok(MetricsReport {
        frames: landmarks.frames.len(),
        fps: landmarks.fps,
        animated_roles: animator.rest().roles().map(str::to_owned).collect(),
        parts,
        diagnostics,
    })
}

pub fn frame_name(index: usize) -> String {
    format!("frame_{index:05}.png")
}

/// Writes numbered PNG frames and `metrics.json` to `out_dir`, plus forward
/// and enhanced inverse flow files to `flow_dir` when given.
pub fn write_outputs(out: &PipelineOutput, out_dir: &Path, flow_dir: Option<&Path>) -> Result<()> {
    fs::create_dir_all(out_dir)?;
    if let Some(dir) = flow_dir {
        fs::create_dir_all(dir)?;
    }
    for f in &out.frames {
        f.image.save_png(out_dir.join(frame_name(f.index)))?;
        if let Some(levels) = &f.levels {
            for (n, level) in levels.iter().enumerate() {
                let depth = levels.len() - n;
                level.save_png(out_dir.join(format!("frame_{:05}_level{depth}.png", f.index)))?;
            }
        }
        if let Some(dir) = flow_dir {
            fs::write(
                dir.join(format!("forward_{:05}.pflw", f.index)),
                write_flow(&f.forward),
            )?;
            fs::write(
                dir.join(format!("inverse_{:05}.pflw", f.index)),
                write_flow(&f.inverse),
            )?;
        }
    }
    fs::write(out_dir.join("metrics.json"), out.report.to_json())?;
    Ok(())
}
