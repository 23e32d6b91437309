//! Shape similarity, close-open accuracy and motion accuracy.

use serde::{Deserialize, Serialize};

use crate::bezier::{CompositeBezier, Point2};
use crate::error::{Error, Result};
use crate::shape::Part;

pub const DEFAULT_BINS: usize = 16;
pub const DEFAULT_BOUNDARY_SAMPLES: usize = 256;
pub const AREA_SAMPLES: usize = 64;
pub const GAP_SAMPLES: usize = 64;

/// L1-normalized histogram of centroid-relative eccentricities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeDescriptor {
    histogram: Vec<f64>,
}

impl ShapeDescriptor {
    pub fn histogram(&self) -> &[f64] {
        &self.histogram
    }

    pub fn bins(&self) -> usize {
        self.histogram.len()
    }
}

/// Treats `boundary` as a closed loop; a repeated closing point is dropped.
pub fn shape_descriptor(boundary: &[Point2], bins: usize) -> Result<ShapeDescriptor> {
    if bins == 0 {
        return Err(Error::Domain("histogram needs at least one bin".into()));
    }
    let mut pts = boundary;
    if pts.len() > 1 {
        let scale = pts.iter().map(|p| p.amax()).fold(0.0, f64::max).max(1.0);
        if (pts[0] - pts[pts.len() - 1]).amax() <= 1e-12 * scale {
            pts = &pts[..pts.len() - 1];
        }
    }
    if pts.len() < 8 {
        return Err(Error::Contract(format!(
            "descriptor needs at least 8 boundary points, got {}",
            pts.len()
        )));
    }
    let centroid = pts.iter().sum::<Point2>() / pts.len() as f64;
    let dist: Vec<f64> = pts.iter().map(|p| (p - centroid).norm()).collect();
    let max = dist.iter().copied().fold(0.0, f64::max);
    if max <= 0.0 || !max.is_finite() {
        return Err(Error::DegenerateShape("all boundary points coincide".into()));
    }
    let mut histogram = vec![0.0; bins];
    for d in dist {
        let e = d / max;
        let bin = ((e * bins as f64) as usize).min(bins - 1);
        histogram[bin] += 1.0;
    }
    let n = pts.len() as f64;
    histogram.iter_mut().for_each(|h| *h /= n);
    Ok(ShapeDescriptor { histogram })
}

/// Cosine similarity of two descriptors.
pub fn s_sim(a: &ShapeDescriptor, b: &ShapeDescriptor) -> Result<f64> {
    if a.bins() != b.bins() {
        return Err(Error::Contract(format!(
            "descriptor bin counts differ: {} vs {}",
            a.bins(),
            b.bins()
        )));
    }
    let dot: f64 = a.histogram.iter().zip(&b.histogram).map(|(x, y)| x * y).sum();
    let na = a.histogram.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.histogram.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return Err(Error::Contract("zero-norm descriptor".into()));
    }
    Ok((dot / (na * nb)).clamp(0.0, 1.0))
}

fn project<const D: usize>(p: &crate::bezier::Point<D>) -> Point2 {
    Point2::new(p[0], p[1])
}

/// Closed outline of a part: upper branch forward, lower branch backward,
/// with the shared corners listed once.
pub fn part_outline<const D: usize>(
    upper: &CompositeBezier<D>,
    lower: &CompositeBezier<D>,
    samples: usize,
) -> Vec<Point2> {
    let mut out: Vec<Point2> = upper.sample_points(samples).iter().map(project).collect();
    let lo: Vec<Point2> = lower.sample_points(samples).iter().map(project).collect();
    out.extend(lo.iter().rev().skip(1).take(samples.saturating_sub(2)));
    out
}

/// Absolute shoelace area of a closed polygon.
pub fn polygon_area(points: &[Point2]) -> f64 {
    let n = points.len();
    let twice: f64 = (0..n)
        .map(|i| {
            let (a, b) = (points[i], points[(i + 1) % n]);
            a.x * b.y - b.x * a.y
        })
        .sum();
    twice.abs() / 2.0
}

pub fn part_area<const D: usize>(upper: &CompositeBezier<D>, lower: &CompositeBezier<D>) -> f64 {
    polygon_area(&part_outline(upper, lower, AREA_SAMPLES))
}

/// Largest vertical distance between the branches at matched parameters.
pub fn vertical_gap<const D: usize>(upper: &CompositeBezier<D>, lower: &CompositeBezier<D>) -> f64 {
    upper
        .sample_points(GAP_SAMPLES)
        .iter()
        .zip(lower.sample_points(GAP_SAMPLES))
        .map(|(u, l)| (l[1] - u[1]).abs())
        .fold(0.0, f64::max)
}

pub fn open_ratio<const D: usize>(
    upper: &CompositeBezier<D>,
    lower: &CompositeBezier<D>,
    max_height: f64,
) -> Result<f64> {
    if max_height <= 0.0 || !max_height.is_finite() {
        return Err(Error::Contract(format!(
            "max_height {max_height} must be positive"
        )));
    }
    Ok((vertical_gap(upper, lower) / max_height).clamp(0.0, 1.0))
}

/// Per-frame open ratio and area of one part over a sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartTrace {
    pub part: Part,
    pub open_ratio: Vec<f64>,
    pub area: Vec<f64>,
}

impl PartTrace {
    pub fn new(part: Part, open_ratio: Vec<f64>, area: Vec<f64>) -> Result<Self> {
        if open_ratio.len() != area.len() {
            return Err(Error::Contract(format!(
                "{part} trace has {} open ratios and {} areas",
                open_ratio.len(),
                area.len()
            )));
        }
        if let Some(r) = open_ratio.iter().find(|r| !(0.0..=1.0).contains(*r)) {
            return Err(Error::Contract(format!("{part} open ratio {r} outside [0, 1]")));
        }
        Ok(Self {
            part,
            open_ratio,
            area,
        })
    }

    /// Normalizes raw gaps by their sequence maximum. A part that never opens
    /// has ratio 0 throughout.
    pub fn from_gaps(part: Part, gaps: &[f64], area: Vec<f64>) -> Result<Self> {
        let max = gaps.iter().copied().fold(0.0, f64::max);
        let ratios = gaps
            .iter()
            .map(|g| if max > 0.0 { (g / max).clamp(0.0, 1.0) } else { 0.0 })
            .collect();
        Self::new(part, ratios, area)
    }

    pub fn len(&self) -> usize {
        self.open_ratio.len()
    }

    pub fn is_empty(&self) -> bool {
        self.open_ratio.is_empty()
    }
}

pub fn co_acc(human: &PartTrace, pareidolia: &PartTrace) -> Result<f64> {
    if human.len() != pareidolia.len() || human.is_empty() {
        return Err(Error::Contract(format!(
            "traces must be non-empty and equal length, got {} and {}",
            human.len(),
            pareidolia.len()
        )));
    }
    let diff: f64 = human
        .open_ratio
        .iter()
        .zip(&pareidolia.open_ratio)
        .map(|(a, b)| (a - b).abs())
        .sum();
    Ok(1.0 - diff / human.len() as f64)
}

/// 1 where the area strictly grows into the next frame.
pub fn growth_flags(area: &[f64]) -> Vec<bool> {
    area.windows(2).map(|w| w[1] > w[0]).collect()
}

pub fn m_acc(human: &PartTrace, pareidolia: &PartTrace) -> Result<f64> {
    if human.len() != pareidolia.len() || human.len() < 2 {
        return Err(Error::Contract(format!(
            "traces need equal length of at least 2, got {} and {}",
            human.len(),
            pareidolia.len()
        )));
    }
    let fh = growth_flags(&human.area);
    let fp = growth_flags(&pareidolia.area);
    let agree = fh.iter().zip(&fp).filter(|(a, b)| a == b).count();
    Ok(agree as f64 / fh.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn ellipse(n: usize, a: f64, b: f64) -> Vec<Point2> {
        (0..n)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / n as f64;
                Point2::new(a * t.cos(), b * t.sin())
            })
            .collect()
    }

    fn trace(open: &[f64], area: &[f64]) -> PartTrace {
        PartTrace::new(Part::Mouth, open.to_vec(), area.to_vec()).unwrap()
    }

    #[test]
    fn circle_fills_top_bin() {
        let d = shape_descriptor(&ellipse(360, 3.0, 3.0), 16).unwrap();
        assert!((d.histogram()[15] - 1.0).abs() < 1e-12);
        assert!((d.histogram().iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn scale_and_closing_point() {
        let pts = ellipse(100, 2.0, 1.0);
        let scaled: Vec<Point2> = pts.iter().map(|p| p * 2.0).collect();
        let a = shape_descriptor(&pts, 16).unwrap();
        assert_eq!(a, shape_descriptor(&scaled, 16).unwrap());
        let mut closed = pts.clone();
        closed.push(pts[0]);
        assert_eq!(a, shape_descriptor(&closed, 16).unwrap());
    }

    #[test]
    fn descriptor_errors() {
        assert!(matches!(
            shape_descriptor(&[Point2::new(1.0, 1.0); 10], 16),
            Err(Error::DegenerateShape(_))
        ));
        assert!(shape_descriptor(&ellipse(7, 1.0, 1.0), 16).is_err());
    }

    #[test]
    fn cosine_similarity() {
        let d = shape_descriptor(&ellipse(64, 2.0, 1.0), 16).unwrap();
        assert!((s_sim(&d, &d).unwrap() - 1.0).abs() < 1e-12);
        let mut a = vec![0.0; 4];
        let mut b = vec![0.0; 4];
        a[0] = 1.0;
        b[3] = 1.0;
        let (a, b) = (ShapeDescriptor { histogram: a }, ShapeDescriptor { histogram: b });
        assert_eq!(s_sim(&a, &b).unwrap(), 0.0);
        let c = ShapeDescriptor {
            histogram: vec![1.0; 3],
        };
        assert!(s_sim(&a, &c).is_err());
    }

    #[test]
    fn co_acc_examples() {
        let a = trace(&[0.0, 1.0, 0.5], &[1.0, 1.0, 1.0]);
        assert_eq!(co_acc(&a, &a).unwrap(), 1.0);
        let b = trace(&[0.0, 0.5, 0.5], &[1.0, 1.0, 1.0]);
        assert!((co_acc(&a, &b).unwrap() - (1.0 - 0.5 / 3.0)).abs() < 1e-12);
        assert_eq!(co_acc(&a, &b).unwrap(), co_acc(&b, &a).unwrap());
        let zeros = trace(&[0.0; 3], &[0.0; 3]);
        let ones = trace(&[1.0; 3], &[0.0; 3]);
        assert_eq!(co_acc(&zeros, &ones).unwrap(), 0.0);
        assert!(co_acc(&a, &trace(&[0.0], &[0.0])).is_err());
    }

    #[test]
    fn m_acc_examples() {
        let h = trace(&[0.0; 4], &[1.0, 2.0, 1.0, 2.0]);
        let p = trace(&[0.0; 4], &[1.0, 2.0, 3.0, 2.0]);
        assert!((m_acc(&h, &p).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(m_acc(&h, &h).unwrap(), 1.0);
        let up = trace(&[0.0; 4], &[1.0, 2.0, 3.0, 4.0]);
        let down = trace(&[0.0; 4], &[4.0, 3.0, 2.0, 1.0]);
        assert_eq!(m_acc(&up, &down).unwrap(), 0.0);
        let flat = trace(&[0.0; 4], &[2.0; 4]);
        assert_eq!(m_acc(&flat, &down).unwrap(), 1.0);
        assert!(m_acc(&trace(&[0.0], &[1.0]), &trace(&[0.0], &[1.0])).is_err());
    }

    fn line(y: f64, len: f64) -> CompositeBezier<2> {
        CompositeBezier::from_controls(vec![Point2::new(0.0, y), Point2::new(len, y)], 1).unwrap()
    }

    #[test]
    fn open_ratio_examples() {
        let upper = line(0.0, 4.0);
        assert_eq!(open_ratio(&upper, &upper, 2.0).unwrap(), 0.0);
        assert_eq!(open_ratio(&upper, &line(2.0, 4.0), 2.0).unwrap(), 1.0);
        assert_eq!(open_ratio(&upper, &line(1.0, 4.0), 2.0).unwrap(), 0.5);
        assert!(open_ratio(&upper, &upper, 0.0).is_err());
    }

    #[test]
    fn area_of_lens_outline() {
        let lower = CompositeBezier::from_controls(
            vec![
                Point2::new(0.0, 0.0),
                Point2::new(2.0, 4.0),
                Point2::new(4.0, 0.0),
            ],
            1,
        )
        .unwrap();
        // parabola of height 2 over a base of 4
        let a = part_area(&line(0.0, 4.0), &lower);
        assert!((a - 16.0 / 3.0).abs() < 1e-2, "{a}");
        let tri = [
            Point2::new(0.0, 0.0),
            Point2::new(2.0, 0.0),
            Point2::new(0.0, 2.0),
        ];
        assert_eq!(polygon_area(&tri), 2.0);
    }

    #[test]
    fn traces_normalize_by_max_gap() {
        let t = PartTrace::from_gaps(Part::EyeLeft, &[0.0, 2.0, 1.0], vec![0.0; 3]).unwrap();
        assert_eq!(t.open_ratio, vec![0.0, 1.0, 0.5]);
        let shut = PartTrace::from_gaps(Part::EyeLeft, &[0.0, 0.0], vec![0.0; 2]).unwrap();
        assert_eq!(shut.open_ratio, vec![0.0, 0.0]);
        assert!(PartTrace::new(Part::Mouth, vec![0.0], vec![]).is_err());
    }
}
