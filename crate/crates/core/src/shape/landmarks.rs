use nalgebra::{Matrix3, SVD};
use serde::{Deserialize, Serialize};

use crate::bezier::Point3;
use crate::error::{Error, Result};
use crate::shape::schema::LANDMARK_COUNT;

/// Upper bound on the closed-mouth gap of a neutral reference, as a fraction
/// of inner mouth width.
pub const NEUTRAL_OPEN_RATIO: f64 = 0.05;

const INNER_LIP_PAIRS: [(usize, usize); 3] = [(61, 67), (62, 66), (63, 65)];

fn check_points(points: &[Point3], what: &str) -> Result<()> {
    if points.len() != LANDMARK_COUNT {
        return Err(Error::Validation(format!(
            "{what} has {} landmarks, expected {LANDMARK_COUNT}",
            points.len()
        )));
    }
    if let Some(i) = points.iter().position(|p| !p.iter().all(|c| c.is_finite())) {
        return Err(Error::Validation(format!("{what} landmark {i} is not finite")));
    }
    Ok(())
}

/// One frame of 3D facial landmarks in the 68-point layout.
#[derive(Debug, Clone, PartialEq)]
pub struct LandmarkFrame {
    pub frame_index: usize,
    points: Vec<Point3>,
}

impl LandmarkFrame {
    pub fn new(frame_index: usize, points: Vec<Point3>) -> Result<Self> {
        check_points(&points, "landmark frame")?;
        Ok(Self { frame_index, points })
    }

    pub fn points(&self) -> &[Point3] {
        &self.points
    }

    pub fn map(&self, f: impl Fn(&Point3) -> Point3) -> Self {
        Self {
            frame_index: self.frame_index,
            points: self.points.iter().map(f).collect(),
        }
    }
}

/// Landmark trace of a neutral, mouth-closed head that motion is measured against.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceFace {
    landmarks: Vec<Point3>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct ReferenceFaceDoc {
    pub landmarks: Vec<[f64; 3]>,
}

const STANDARD_REFERENCE: &str = include_str!("../../data/reference_face.json");

impl ReferenceFace {
    pub fn new(landmarks: Vec<Point3>) -> Result<Self> {
        check_points(&landmarks, "reference face")?;
        let width = (landmarks[64] - landmarks[60]).norm();
        let gap = INNER_LIP_PAIRS
            .iter()
            .map(|&(u, l)| (landmarks[l].y - landmarks[u].y).abs())
            .fold(0.0, f64::max);
        if !(width > 0.0) || gap >= NEUTRAL_OPEN_RATIO * width {
            return Err(Error::Validation(format!(
                "reference mouth is not closed: gap {gap:.4} vs width {width:.4}"
            )));
        }
        Ok(Self { landmarks })
    }

    /// The neutral frontal layout shipped with the crate.
    pub fn standard() -> Self {
        Self::from_json(STANDARD_REFERENCE.as_bytes()).expect("bundled reference face is valid")
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        let doc: ReferenceFaceDoc = serde_json::from_slice(bytes)?;
        Self::new(doc.landmarks.iter().map(|p| Point3::from(*p)).collect())
    }

    pub fn to_json(&self) -> String {
        let doc = ReferenceFaceDoc {
            landmarks: self.landmarks.iter().map(|p| [p.x, p.y, p.z]).collect(),
        };
        serde_json::to_string_pretty(&doc).expect("reference face serializes")
    }

    pub fn landmarks(&self) -> &[Point3] {
        &self.landmarks
    }

    /// The reference itself as a landmark frame.
    pub fn as_frame(&self, frame_index: usize) -> LandmarkFrame {
        LandmarkFrame {
            frame_index,
            points: self.landmarks.clone(),
        }
    }
}

/// Rotation, uniform scale and translation: `x ↦ scale · R x + t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Similarity {
    pub rotation: Matrix3<f64>,
    pub scale: f64,
    pub translation: Point3,
}

impl Similarity {
    pub fn apply(&self, p: &Point3) -> Point3 {
        self.rotation * p * self.scale + self.translation
    }
}

/// Closed-form least-squares similarity taking `src` onto `dst`.
pub fn estimate_similarity(src: &[Point3], dst: &[Point3]) -> Result<Similarity> {
    if src.len() != dst.len() || src.len() < 3 {
        return Err(Error::Alignment(format!(
            "need matching point sets of at least 3, got {} and {}",
            src.len(),
            dst.len()
        )));
    }
    let n = src.len() as f64;
    let mu_src = src.iter().sum::<Point3>() / n;
    let mu_dst = dst.iter().sum::<Point3>() / n;

    let mut cov = Matrix3::zeros();
    let mut var_src = 0.0;
    let mut spread = Matrix3::zeros();
    for (s, d) in src.iter().zip(dst) {
        let cs = s - mu_src;
        cov += (d - mu_dst) * cs.transpose();
        spread += cs * cs.transpose();
        var_src += cs.norm_squared();
    }
    cov /= n;
    var_src /= n;

    let mut spread_ev: Vec<f64> = spread.symmetric_eigenvalues().iter().copied().collect();
    spread_ev.sort_by(f64::total_cmp);
    let largest = spread_ev[2];
    if !(largest > 0.0) || spread_ev[1] <= 1e-12 * largest {
        return Err(Error::Alignment(
            "rigid landmarks are collinear or coincident (rank < 2)".into(),
        ));
    }

    let svd = SVD::new(cov, true, true);
    let (u, v_t) = (svd.u.unwrap(), svd.v_t.unwrap());
    let mut sign = Matrix3::identity();
    if (u.determinant() * v_t.determinant()) < 0.0 {
        sign[(2, 2)] = -1.0;
    }
    let rotation = u * sign * v_t;
    let scale = (Matrix3::from_diagonal(&svd.singular_values) * sign).trace() / var_src;
    let translation = mu_dst - rotation * mu_src * scale;
    Ok(Similarity {
        rotation,
        scale,
        translation,
    })
}

/// Maps `frame` onto the reference by the similarity that best aligns the
/// rigid landmark subset.
pub fn align_to_reference(
    frame: &LandmarkFrame,
    reference: &ReferenceFace,
    rigid: &[usize],
) -> Result<LandmarkFrame> {
    if let Some(i) = rigid.iter().find(|&&i| i >= LANDMARK_COUNT) {
        return Err(Error::Schema(format!("rigid landmark {i} out of range")));
    }
    let src: Vec<_> = rigid.iter().map(|&i| frame.points[i]).collect();
    let dst: Vec<_> = rigid.iter().map(|&i| reference.landmarks[i]).collect();
    let sim = estimate_similarity(&src, &dst)?;
    Ok(frame.map(|p| sim.apply(p)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shape::schema::BoundarySchema;
    use nalgebra::Rotation3;

    fn rigid() -> Vec<usize> {
        BoundarySchema::standard68().rigid_indices
    }

    #[test]
    fn standard_reference_loads() {
        let r = ReferenceFace::standard();
        assert_eq!(r.landmarks().len(), 68);
        let again = ReferenceFace::from_json(r.to_json().as_bytes()).unwrap();
        assert_eq!(again, r);
    }

    #[test]
    fn open_mouth_reference_rejected() {
        let mut pts = ReferenceFace::standard().landmarks().to_vec();
        pts[66].y += 0.1;
        assert!(matches!(ReferenceFace::new(pts), Err(Error::Validation(_))));
    }

    #[test]
    fn wrong_landmark_count() {
        assert!(LandmarkFrame::new(0, vec![Point3::zeros(); 67]).is_err());
        let mut pts = vec![Point3::zeros(); 68];
        pts[3].x = f64::NAN;
        assert!(LandmarkFrame::new(0, pts).is_err());
    }

    #[test]
    fn identity_alignment() {
        let r = ReferenceFace::standard();
        let out = align_to_reference(&r.as_frame(0), &r, &rigid()).unwrap();
        for (a, b) in out.points().iter().zip(r.landmarks()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn recovers_rotation_and_scale() {
        let r = ReferenceFace::standard();
        let rot = Rotation3::from_axis_angle(&Point3::z_axis(), 30f64.to_radians());
        let moved = r.as_frame(3).map(|p| rot * p * 2.0 + Point3::new(0.5, -1.0, 2.0));
        let out = align_to_reference(&moved, &r, &rigid()).unwrap();
        assert_eq!(out.frame_index, 3);
        for (a, b) in out.points().iter().zip(r.landmarks()) {
            assert!((a - b).norm() < 1e-6);
        }
    }

    #[test]
    fn reflection_is_not_used() {
        let r = ReferenceFace::standard();
        let mirrored = r.as_frame(0).map(|p| Point3::new(-p.x, p.y, p.z));
        let src: Vec<_> = rigid().iter().map(|&i| mirrored.points()[i]).collect();
        let dst: Vec<_> = rigid().iter().map(|&i| r.landmarks()[i]).collect();
        let sim = estimate_similarity(&src, &dst).unwrap();
        assert!((sim.rotation.determinant() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn coplanar_rigid_subset() {
        let flat: Vec<Point3> = ReferenceFace::standard()
            .landmarks()
            .iter()
            .map(|p| Point3::new(p.x, p.y, 0.0))
            .collect();
        let r = ReferenceFace::new(flat).unwrap();
        let rot = Rotation3::from_euler_angles(0.2, -0.1, 0.4);
        let moved = r.as_frame(0).map(|p| rot * p * 0.5 + Point3::new(1.0, 0.0, -3.0));
        let out = align_to_reference(&moved, &r, &rigid()).unwrap();
        for (a, b) in out.points().iter().zip(r.landmarks()) {
            assert!((a - b).norm() < 1e-9);
        }
    }

    #[test]
    fn degenerate_rigid_subset() {
        let r = ReferenceFace::standard();
        // the nose bridge alone is collinear
        let err = align_to_reference(&r.as_frame(0), &r, &[27, 28, 29, 30]).unwrap_err();
        assert!(matches!(err, Error::Alignment(_)));
    }
}
