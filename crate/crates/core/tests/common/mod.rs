#![allow(dead_code)]

use pareanim_core::bezier::Point3;
use pareanim_core::field::{FlowGrid, MotionField};
use pareanim_core::io::PipelineConfig;
use pareanim_core::io::{AnnotatedBranch, AnnotationDoc, LandmarkSequenceDoc};
use pareanim_core::shape::{build_boundaries, BoundarySchema, FaceKind, LandmarkFrame, ReferenceFace};
use pareanim_core::warp::Image;

pub const FACE_SCALE: f64 = 100.0;
pub const FACE_OFFSET: [f64; 2] = [128.0, 128.0];

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

/// Pareidolia annotation whose branches are the reference face's branch
/// landmarks, projected and scaled into pixels, with matching control counts.
pub fn face_annotation(reference: &ReferenceFace, roles: Option<&[&str]>) -> AnnotationDoc {
    let schema = BoundarySchema::standard68();
    let cfg = PipelineConfig::default();
    let set = build_boundaries(&reference.as_frame(0), &schema, cfg.layout(), FaceKind::Reference).unwrap();
    let branches = schema
        .branches
        .iter()
        .filter(|b| roles.is_none_or(|r| r.contains(&b.role.as_str())))
        .map(|spec| AnnotatedBranch {
            role: spec.role.clone(),
            points: spec
                .indices
                .iter()
                .map(|&i| {
                    let p = reference.landmarks()[i];
                    [
                        FACE_SCALE * p.x + FACE_OFFSET[0],
                        FACE_SCALE * p.y + FACE_OFFSET[1],
                    ]
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

/// The standard reference with every landmark at one depth, so chord lengths
/// match those of its planar pixel projection.
pub fn flat_reference() -> ReferenceFace {
    let pts = ReferenceFace::standard()
        .landmarks()
        .iter()
        .map(|p| Point3::new(p.x, p.y, 0.1))
        .collect();
    ReferenceFace::new(pts).unwrap()
}

pub fn reference_sequence(r: &ReferenceFace, n: usize) -> LandmarkSequenceDoc {
    let frames: Vec<_> = (0..n).map(|i| r.as_frame(i)).collect();
    LandmarkSequenceDoc::from_frames(25.0, &frames)
}

const LOWER_LIP: [usize; 8] = [55, 56, 57, 58, 59, 65, 66, 67];
const UPPER_LIDS: [usize; 4] = [37, 38, 43, 44];

/// Reference face with the mouth opened by `mouth` and the upper lids lowered
/// by `lids`, in reference units.
pub fn posed_frame(r: &ReferenceFace, index: usize, mouth: f64, lids: f64) -> LandmarkFrame {
    let mut pts: Vec<Point3> = r.landmarks().to_vec();
    for i in LOWER_LIP {
        pts[i].y += mouth;
    }
    for i in UPPER_LIDS {
        pts[i].y += lids;
    }
    LandmarkFrame::new(index, pts).unwrap()
}

/// Mouth opens and eyes close linearly over `n` frames.
pub fn opening_sequence(r: &ReferenceFace, n: usize) -> LandmarkSequenceDoc {
    let frames: Vec<_> = (0..n)
        .map(|i| {
            let t = i as f64 / (n - 1).max(1) as f64;
            posed_frame(r, i, 0.15 * t, 0.05 * t)
        })
        .collect();
    LandmarkSequenceDoc::from_frames(25.0, &frames)
}

/// A frame moved by a similarity transform (head pose change).
pub fn with_pose(frame: &LandmarkFrame, angle: f64, scale: f64, shift: [f64; 3]) -> LandmarkFrame {
    let (s, c) = angle.sin_cos();
    frame.map(|p| {
        Point3::new(
            scale * (c * p.x - s * p.y) + shift[0],
            scale * (s * p.x + c * p.y) + shift[1],
            scale * p.z + shift[2],
        )
    })
}

pub struct DiskScene {
    pub src: Image,
    pub truth: Image,
    pub field: MotionField,
}

/// A textured disk translated by `shift` over a textured background.
pub fn disk_scene(size: usize, radius: f64, shift: [f64; 2]) -> DiskScene {
    let c = size as f64 / 2.0;
    let inside = |x: f64, y: f64| (x - c).hypot(y - c) <= radius;
    let background =
        |x: f64, y: f64, ch: usize| 0.3 + 0.2 * ((x + 3.0 * ch as f64) / 11.0).sin() * (y / 7.0).cos();
    let disk = |x: f64, y: f64, ch: usize| 0.75 + 0.2 * ((x * 0.7 + y * 0.4 + ch as f64) / 5.0).sin();
    let src = Image::from_fn(size, size, 3, |x, y, ch| {
        let (x, y) = (x as f64, y as f64);
        if inside(x, y) {
            disk(x, y, ch)
        } else {
            background(x, y, ch)
        }
    });
    let truth = Image::from_fn(size, size, 3, |x, y, ch| {
        let (x, y) = (x as f64, y as f64);
        let (sx, sy) = (x - shift[0], y - shift[1]);
        if inside(sx, sy) {
            disk(sx, sy, ch)
        } else {
            background(x, y, ch)
        }
    });
    let field = MotionField(FlowGrid::from_fn(size, size, |x, y| {
        if inside(x as f64, y as f64) {
            shift
        } else {
            [0.0, 0.0]
        }
    }));
    DiskScene { src, truth, field }
}

pub mod fuzz {
    use pareanim_core::field::FlowGrid;
    use pareanim_core::io::{AnnotatedBranch, AnnotationDoc, LandmarkSequenceDoc, PipelineConfig};
    use pareanim_core::shape::BoundarySchema;
    use proptest::prelude::*;

    pub fn finite() -> impl Strategy<Value = f64> {
        any::<f64>().prop_filter("finite", |v| v.is_finite())
    }

    fn in_range(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
        (lo..hi).prop_filter("open interval", move |v| *v > lo && *v < hi)
    }

    pub fn flow_grid() -> impl Strategy<Value = FlowGrid> {
        (1usize..24, 1usize..24).prop_flat_map(|(w, h)| {
            let f32s = any::<f32>().prop_filter("finite", |v| v.is_finite());
            (
                prop::collection::vec([f32s.clone(), f32s], w * h),
                prop::collection::vec(any::<bool>(), w * h),
            )
                .prop_map(move |(v, ok)| FlowGrid::from_parts(w, h, v, ok).unwrap())
        })
    }

    fn branch(role: String) -> impl Strategy<Value = AnnotatedBranch> {
        (2usize..=32)
            .prop_flat_map(|n| (Just(n), n..n + 40))
            .prop_flat_map(move |(n, m)| {
                let role = role.clone();
                prop::collection::vec([finite(), finite()], m).prop_map(move |points| AnnotatedBranch {
                    role: role.clone(),
                    points,
                    n_controls: n,
                })
            })
            .prop_filter("no repeated neighbours", |b| {
                b.points.windows(2).all(|w| w[0] != w[1])
            })
    }

    pub fn annotation() -> impl Strategy<Value = AnnotationDoc> {
        let roles: Vec<String> = BoundarySchema::standard68().roles().map(str::to_owned).collect();
        (
            prop::sample::subsequence(roles, 1..=8).prop_shuffle(),
            "[a-z0-9_/. -]{0,24}",
            prop::option::of([finite(), finite()]),
        )
            .prop_flat_map(|(roles, image_ref, origin)| {
                let branches: Vec<_> = roles.into_iter().map(branch).collect();
                (branches, Just(image_ref), Just(origin))
            })
            .prop_map(|(branches, image_ref, coordinate_origin)| AnnotationDoc {
                image_ref,
                branches,
                coordinate_origin,
            })
    }

    pub fn config() -> impl Strategy<Value = PipelineConfig> {
        (
            (
                prop::sample::select(vec!["linear", "sine"]),
                in_range(0.0, 1.0),
                in_range(1.0, 1e6),
                1usize..=8,
                1usize..=3,
                2usize..4096,
                0usize..=8,
            ),
            (
                in_range(0.0, 1.0),
                in_range(0.0, 100.0),
                in_range(0.0, 10.0),
                0.0..10.0f64,
                1usize..=2,
                1usize..256,
                8usize..4096,
            ),
        )
            .prop_map(
                |(
                    (kind, lo, hi, order, segments, spb, depth),
                    (eps, d_tol, w_min, m_eps, step, bins, bs),
                )| {
                    PipelineConfig {
                        decay_kind: kind.into(),
                        omega_min: lo,
                        omega_max: hi,
                        fit_order: order,
                        fit_segments: segments,
                        samples_per_branch: spb,
                        pyramid_depth: depth,
                        eps_den: eps,
                        d_tol,
                        w_min,
                        m_eps,
                        max_step: step,
                        metric_bins: bins,
                        boundary_samples: bs,
                    }
                },
            )
            .prop_filter("at most 32 controls", |c| c.fit_order * c.fit_segments < 32)
    }

    pub fn landmarks() -> impl Strategy<Value = LandmarkSequenceDoc> {
        (
            in_range(0.0, 1e4),
            prop::collection::vec(prop::collection::vec([finite(), finite(), finite()], 68), 1..4),
        )
            .prop_map(|(fps, frames)| LandmarkSequenceDoc { fps, frames })
    }
}
