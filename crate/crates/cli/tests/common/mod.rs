#![allow(dead_code)]

use std::fs;
use std::path::PathBuf;

use pareanim_core::bezier::Point3;
use pareanim_core::io::{
    serialize_annotation, serialize_landmarks, AnnotatedBranch, AnnotationDoc, LandmarkSequenceDoc,
    PipelineConfig,
};
use pareanim_core::shape::{build_boundaries, BoundarySchema, FaceKind, LandmarkFrame, ReferenceFace};
use pareanim_core::warp::Image;
use tempfile::TempDir;

pub fn textured_image(w: usize, h: usize) -> Image {
    Image::from_fn(w, h, 3, |x, y, c| {
        let (x, y) = (x as f64, y as f64);
        let v = match c {
            0 => 0.5 + 0.35 * (x / 9.0).sin() * (y / 13.0).cos(),
            1 => 0.5 + 0.3 * ((x + 2.0 * y) / 17.0).sin(),
            _ => 0.45 + 0.4 * ((x - y) / 23.0).cos() * (x / 31.0).sin(),
        };
        (v * 255.0).round() / 255.0
    })
}

/// Reference face branches projected into a 256 px image.
pub fn face_annotation(reference: &ReferenceFace) -> AnnotationDoc {
    let schema = BoundarySchema::standard68();
    let set = build_boundaries(
        &reference.as_frame(0),
        &schema,
        PipelineConfig::default().layout(),
        FaceKind::Reference,
    )
    .unwrap();
    let branches = schema
        .branches
        .iter()
        .map(|spec| AnnotatedBranch {
            role: spec.role.clone(),
            points: spec
                .indices
                .iter()
                .map(|&i| {
                    let p = reference.landmarks()[i];
                    [100.0 * p.x + 128.0, 100.0 * p.y + 128.0]
                })
                .collect(),
            n_controls: set.branch(&spec.role).unwrap().curve.control_count(),
        })
        .collect();
    AnnotationDoc {
        image_ref: "face.png".into(),
        branches,
        coordinate_origin: None,
    }
}

/// Reference face with the mouth opened by `open` reference units.
pub fn open_mouth(r: &ReferenceFace, index: usize, open: f64) -> LandmarkFrame {
    let mut pts: Vec<Point3> = r.landmarks().to_vec();
    for i in [55, 56, 57, 58, 59, 65, 66, 67] {
        pts[i].y += open;
    }
    LandmarkFrame::new(index, pts).unwrap()
}

pub fn opening_sequence(r: &ReferenceFace, n: usize) -> LandmarkSequenceDoc {
    let frames: Vec<_> = (0..n)
        .map(|i| open_mouth(r, i, 0.1 * i as f64 / (n - 1) as f64))
        .collect();
    LandmarkSequenceDoc::from_frames(25.0, &frames)
}

pub fn frame_rows(frame: &LandmarkFrame) -> Vec<[f64; 3]> {
    frame.points().iter().map(|p| [p.x, p.y, p.z]).collect()
}

/// Input files for one run in a temporary directory.
pub struct Fixture {
    pub dir: TempDir,
    pub image: Image,
    pub annotation: AnnotationDoc,
    pub landmarks: LandmarkSequenceDoc,
}

impl Fixture {
    pub fn new(landmarks: LandmarkSequenceDoc) -> Self {
        let dir = tempfile::tempdir().unwrap();
        let image = textured_image(256, 256);
        let annotation = face_annotation(&ReferenceFace::standard());
        image.save_png(dir.path().join("face.png")).unwrap();
        fs::write(
            dir.path().join("annotation.json"),
            serialize_annotation(&annotation),
        )
        .unwrap();
        fs::write(dir.path().join("landmarks.json"), serialize_landmarks(&landmarks)).unwrap();
        Fixture {
            dir,
            image,
            annotation,
            landmarks,
        }
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}
