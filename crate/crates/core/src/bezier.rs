//! Single and composite Bézier curves in 2D and 3D, with least-squares fitting.
//!
//! A composite curve is a chain of equal-order segments that share endpoints
//! (C⁰ joints). Global parameter `τ ∈ [0, 1]` is split uniformly between
//! segments, so with `N` segments the joints sit at `τ = j / N`.
//!
//! Fitting solves one linear least-squares problem per axis. Shared joint
//! controls are single unknowns, which folds the C⁰ constraint directly into
//! the design matrix.

use nalgebra::{DMatrix, SVector};

use crate::error::{Error, Result};

pub type Point<const D: usize> = SVector<f64, D>;
pub type Point2 = Point<2>;
pub type Point3 = Point<3>;

/// Condition number above which the normal equations are abandoned in favour
/// of the SVD pseudoinverse.
pub const PSEUDOINVERSE_CONDITION: f64 = 1e12;

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Bernstein basis values `C(n,k) t^k (1-t)^(n-k)` for `k = 0..=n`.
pub fn bernstein(order: usize, t: f64) -> Vec<f64> {
    let s = 1.0 - t;
    (0..=order)
        .map(|k| binomial(order, k) * t.powi(k as i32) * s.powi((order - k) as i32))
        .collect()
}

fn check_unit(t: f64) -> Result<()> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(Error::Domain(format!("curve parameter {t} outside [0, 1]")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BezierSegment<const D: usize> {
    controls: Vec<Point<D>>,
}

impl<const D: usize> BezierSegment<D> {
    pub fn new(controls: Vec<Point<D>>) -> Result<Self> {
        if controls.len() < 2 {
            return Err(Error::Contract(format!(
                "a Bézier segment needs at least 2 control points, got {}",
                controls.len()
            )));
        }
        Ok(Self { controls })
    }

    pub fn controls(&self) -> &[Point<D>] {
        &self.controls
    }

    pub fn order(&self) -> usize {
        self.controls.len() - 1
    }

    /// Evaluates the Bernstein sum at `t`; errors when `t ∉ [0, 1]`.
    pub fn eval(&self, t: f64) -> Result<Point<D>> {
        check_unit(t)?;
        Ok(self.eval_at(t))
    }

    pub(crate) fn eval_at(&self, t: f64) -> Point<D> {
        if t <= 0.0 {
            return self.controls[0];
        }
        if t >= 1.0 {
            return self.controls[self.order()];
        }
        bernstein(self.order(), t)
            .iter()
            .zip(&self.controls)
            .fold(Point::<D>::zeros(), |acc, (w, p)| acc + p * *w)
    }

    /// Derivative with respect to the local parameter.
    pub(crate) fn derivative_at(&self, t: f64) -> Point<D> {
        let n = self.order();
        let weights = bernstein(n - 1, t.clamp(0.0, 1.0));
        self.controls
            .windows(2)
            .zip(weights)
            .fold(Point::<D>::zeros(), |acc, (pair, w)| {
                acc + (pair[1] - pair[0]) * (w * n as f64)
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompositeBezier<const D: usize> {
    segments: Vec<BezierSegment<D>>,
    joints: Vec<f64>,
}

impl<const D: usize> CompositeBezier<D> {
    /// Chains segments; adjacent segments must share an endpoint exactly.
    pub fn new(segments: Vec<BezierSegment<D>>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::Contract("composite curve without segments".into()));
        }
        for (j, pair) in segments.windows(2).enumerate() {
            let end = pair[0].controls[pair[0].order()];
            if end != pair[1].controls[0] {
                return Err(Error::Contract(format!(
                    "segments {j} and {} do not share a joint",
                    j + 1
                )));
            }
        }
        let n = segments.len();
        let joints = (1..n).map(|j| j as f64 / n as f64).collect();
        Ok(Self { segments, joints })
    }

    /// Builds `segments` equal-order pieces from a flattened control list in
    /// which joint controls appear once.
    pub fn from_controls(controls: Vec<Point<D>>, segments: usize) -> Result<Self> {
        if segments == 0 || controls.len() < 2 || !(controls.len() - 1).is_multiple_of(segments) {
            return Err(Error::Contract(format!(
                "{} control points cannot form {segments} equal-order segments",
                controls.len()
            )));
        }
        let order = (controls.len() - 1) / segments;
        let segs = (0..segments)
            .map(|j| BezierSegment::new(controls[j * order..=(j + 1) * order].to_vec()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(segs)
    }

    pub fn segments(&self) -> &[BezierSegment<D>] {
        &self.segments
    }

    /// Interior joint parameters, ascending.
    pub fn joints(&self) -> &[f64] {
        &self.joints
    }

    pub fn segment_count(&self) -> usize {
        self.segments.len()
    }

    /// Total order: number of distinct control points minus one.
    pub fn order(&self) -> usize {
        self.segments.iter().map(BezierSegment::order).sum()
    }

    pub fn control_count(&self) -> usize {
        self.order() + 1
    }

    /// Control points with shared joints listed once.
    pub fn control_points(&self) -> Vec<Point<D>> {
        let mut out = Vec::with_capacity(self.control_count());
        out.push(self.segments[0].controls[0]);
        for seg in &self.segments {
            out.extend_from_slice(&seg.controls[1..]);
        }
        out
    }

    /// Rebuilds the curve with the same segment layout around new controls.
    pub fn with_controls(&self, controls: Vec<Point<D>>) -> Result<Self> {
        if controls.len() != self.control_count() {
            return Err(Error::Contract(format!(
                "expected {} control points, got {}",
                self.control_count(),
                controls.len()
            )));
        }
        let mut segs = Vec::with_capacity(self.segments.len());
        let mut start = 0;
        for seg in &self.segments {
            let end = start + seg.order();
            segs.push(BezierSegment::new(controls[start..=end].to_vec())?);
            start = end;
        }
        Ok(Self {
            segments: segs,
            joints: self.joints.clone(),
        })
    }

    pub fn map_controls(&self, f: impl Fn(&Point<D>) -> Point<D>) -> Self {
        let segments = self
            .segments
            .iter()
            .map(|s| BezierSegment {
                controls: s.controls.iter().map(&f).collect(),
            })
            .collect();
        Self {
            segments,
            joints: self.joints.clone(),
        }
    }

    fn locate_segment(&self, tau: f64) -> (usize, f64) {
        let idx = self.joints.partition_point(|&j| j <= tau);
        let lo = if idx == 0 { 0.0 } else { self.joints[idx - 1] };
        let hi = self.joints.get(idx).copied().unwrap_or(1.0);
        (idx, ((tau - lo) / (hi - lo)).clamp(0.0, 1.0))
    }

    pub fn eval(&self, tau: f64) -> Result<Point<D>> {
        check_unit(tau)?;
        Ok(self.eval_at(tau))
    }

    pub(crate) fn eval_at(&self, tau: f64) -> Point<D> {
        let (k, t) = self.locate_segment(tau.clamp(0.0, 1.0));
        self.segments[k].eval_at(t)
    }

    /// Derivative with respect to the global parameter.
    pub(crate) fn derivative_at(&self, tau: f64) -> Point<D> {
        let (k, t) = self.locate_segment(tau.clamp(0.0, 1.0));
        let lo = if k == 0 { 0.0 } else { self.joints[k - 1] };
        let hi = self.joints.get(k).copied().unwrap_or(1.0);
        self.segments[k].derivative_at(t) / (hi - lo)
    }

    /// `m` points at uniform parameter spacing, without polyline validation.
    pub fn sample_points(&self, m: usize) -> Vec<Point<D>> {
        match m {
            0 => Vec::new(),
            1 => vec![self.eval_at(0.0)],
            _ => (0..m).map(|i| self.eval_at(i as f64 / (m - 1) as f64)).collect(),
        }
    }

    pub fn centroid(&self) -> Point<D> {
        let pts = self.control_points();
        pts.iter().sum::<Point<D>>() / pts.len() as f64
    }
}

pub fn eval_bezier<const D: usize>(seg: &BezierSegment<D>, t: f64) -> Result<Point<D>> {
    seg.eval(t)
}

/// Ordered sample of a boundary branch.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline<const D: usize> {
    points: Vec<Point<D>>,
}

impl<const D: usize> Polyline<D> {
    pub fn new(points: Vec<Point<D>>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Contract(format!(
                "polyline needs at least 2 points, got {}",
                points.len()
            )));
        }
        if let Some(i) = points.windows(2).position(|w| w[0] == w[1]) {
            return Err(Error::Contract(format!(
                "polyline points {i} and {} are identical",
                i + 1
            )));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[Point<D>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Normalized cumulative chord length of every point.
    pub fn chord_parameters(&self) -> Vec<f64> {
        let mut acc = Vec::with_capacity(self.points.len());
        let mut total = 0.0;
        acc.push(0.0);
        for w in self.points.windows(2) {
            total += (w[1] - w[0]).norm();
            acc.push(total);
        }
        if total > 0.0 {
            for a in &mut acc {
                *a /= total;
            }
        }
        if let Some(last) = acc.last_mut() {
            *last = 1.0;
        }
        acc
    }

    /// Linear interpolation at normalized chord length `s`.
    pub fn at_chord(&self, s: f64) -> Point<D> {
        let params = self.chord_parameters();
        let s = s.clamp(0.0, 1.0);
        let i = params.partition_point(|&p| p < s).clamp(1, self.points.len() - 1);
        let (a, b) = (params[i - 1], params[i]);
        let w = if b > a { (s - a) / (b - a) } else { 0.0 };
        self.points[i - 1] * (1.0 - w) + self.points[i] * w
    }
}

/// `m` points at uniform τ over the whole composite curve.
pub fn sample_composite<const D: usize>(curve: &CompositeBezier<D>, m: usize) -> Result<Polyline<D>> {
    if m < 2 {
        return Err(Error::Domain(format!("sample count {m} below 2")));
    }
    Polyline::new(curve.sample_points(m))
}

/// Maps every control to `anchor + omega * (p - anchor)`.
pub fn scale_composite<const D: usize>(
    curve: &CompositeBezier<D>,
    omega: f64,
    anchor: &Point<D>,
) -> Result<CompositeBezier<D>> {
    if !(omega > 0.0) {
        return Err(Error::Domain(format!("scale factor {omega} must be positive")));
    }
    Ok(curve.map_controls(|p| anchor + (p - anchor) * omega))
}

/// How curve parameters are assigned to polyline points before fitting.
#[derive(Debug, Clone, PartialEq)]
pub enum Parameterization {
    /// Normalized cumulative chord length.
    ChordLength,
    /// Evenly spaced in point index.
    Uniform,
    /// Caller-supplied, non-decreasing, within `[0, 1]`.
    Explicit(Vec<f64>),
}

impl Parameterization {
    fn resolve<const D: usize>(&self, branch: &Polyline<D>) -> Result<Vec<f64>> {
        match self {
            Parameterization::ChordLength => Ok(branch.chord_parameters()),
            Parameterization::Uniform => {
                let m = branch.len();
                Ok((0..m).map(|i| i as f64 / (m - 1) as f64).collect())
            }
            Parameterization::Explicit(params) => {
                if params.len() != branch.len() {
                    return Err(Error::Contract(format!(
                        "{} parameters for {} points",
                        params.len(),
                        branch.len()
                    )));
                }
                if params.iter().any(|t| !(0.0..=1.0).contains(t)) || params.windows(2).any(|w| w[1] < w[0]) {
                    return Err(Error::Domain(
                        "explicit parameters must be non-decreasing within [0, 1]".into(),
                    ));
                }
                Ok(params.clone())
            }
        }
    }
}

/// Result of a least-squares fit.
#[derive(Debug, Clone)]
pub struct Fit<const D: usize> {
    pub curve: CompositeBezier<D>,
    /// Parameter assigned to each input point.
    pub params: Vec<f64>,
    /// Summed squared distance between points and the curve at their parameters.
    pub residual_sq: f64,
    /// Singular value ratio of the design matrix (1 for degenerate collapses).
    pub condition: f64,
    /// Set when a collinear branch was collapsed to a straight-line fit.
    pub collapsed: bool,
}

impl<const D: usize> Fit<D> {
    pub fn rms_residual(&self) -> f64 {
        (self.residual_sq / self.params.len() as f64).sqrt()
    }
}

/// Fits `segments` joined Bézier pieces of degree `order` with chord-length
/// parameters.
pub fn fit_composite<const D: usize>(
    branch: &Polyline<D>,
    order: usize,
    segments: usize,
) -> Result<CompositeBezier<D>> {
    fit_composite_with(branch, order, segments, &Parameterization::ChordLength).map(|f| f.curve)
}

pub fn fit_composite_with<const D: usize>(
    branch: &Polyline<D>,
    order: usize,
    segments: usize,
    parameterization: &Parameterization,
) -> Result<Fit<D>> {
    if order == 0 || segments == 0 {
        return Err(Error::Domain(format!(
            "order ({order}) and segment count ({segments}) must be at least 1"
        )));
    }
    let unknowns = order * segments + 1;
    if branch.len() < unknowns {
        return Err(Error::Contract(format!(
            "{} points cannot determine {unknowns} control points",
            branch.len()
        )));
    }
    let params = parameterization.resolve(branch)?;

    if is_collinear(branch.points()) {
        log::warn!(
            "collinear branch of {} points collapsed to a straight-line fit",
            branch.len()
        );
        return collapse_to_line(branch, params, order, segments);
    }

    let design = design_matrix(&params, order, segments);
    let (solution, condition) = solve_least_squares(&design, branch.points())?;
    let curve = CompositeBezier::from_controls(solution, segments)?;
    let residual_sq = residual_sq(&curve, branch.points(), &params);
    Ok(Fit {
        curve,
        params,
        residual_sq,
        condition,
        collapsed: false,
    })
}

/// Summed squared distance between `points` and `curve` at `params`.
pub fn residual_sq<const D: usize>(curve: &CompositeBezier<D>, points: &[Point<D>], params: &[f64]) -> f64 {
    points
        .iter()
        .zip(params)
        .map(|(p, &t)| (curve.eval_at(t) - p).norm_squared())
        .sum()
}

fn design_matrix(params: &[f64], order: usize, segments: usize) -> DMatrix<f64> {
    let cols = order * segments + 1;
    let mut a = DMatrix::zeros(params.len(), cols);
    for (row, &tau) in params.iter().enumerate() {
        let scaled = tau * segments as f64;
        let k = (scaled.floor() as usize).min(segments - 1);
        let t = (scaled - k as f64).clamp(0.0, 1.0);
        for (i, w) in bernstein(order, t).into_iter().enumerate() {
            a[(row, k * order + i)] = w;
        }
    }
    a
}

fn solve_least_squares<const D: usize>(
    a: &DMatrix<f64>,
    points: &[Point<D>],
) -> Result<(Vec<Point<D>>, f64)> {
    let (m, n) = a.shape();
    let sv = a.clone().svd(false, false).singular_values;
    let smax = sv.max();
    let smin = sv.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    let tol = smax * m.max(n) as f64 * f64::EPSILON;
    if smin <= tol {
        return Err(Error::SingularFit { condition });
    }

    let mut rhs = DMatrix::zeros(m, D);
    for (i, p) in points.iter().enumerate() {
        for d in 0..D {
            rhs[(i, d)] = p[d];
        }
    }

    let x = if condition <= PSEUDOINVERSE_CONDITION {
        let normal = a.transpose() * a;
        let atb = a.transpose() * &rhs;
        normal
            .col_piv_qr()
            .solve(&atb)
            .ok_or(Error::SingularFit { condition })?
    } else {
        a.clone()
            .svd(true, true)
            .solve(&rhs, tol)
            .map_err(|_| Error::SingularFit { condition })?
    };

    let controls = (0..n).map(|i| Point::<D>::from_fn(|d, _| x[(i, d)])).collect();
    Ok((controls, condition))
}

fn is_collinear<const D: usize>(points: &[Point<D>]) -> bool {
    let centroid = points.iter().sum::<Point<D>>() / points.len() as f64;
    let centered = DMatrix::from_fn(points.len(), D, |i, d| points[i][d] - centroid[d]);
    let sv = centered.svd(false, false).singular_values;
    let mut sorted: Vec<f64> = sv.iter().copied().collect();
    sorted.sort_by(|a, b| b.total_cmp(a));
    sorted[0] == 0.0 || sorted.get(1).is_some_and(|&s| s <= 1e-12 * sorted[0])
}

/// Straight-line least-squares fit, degree-elevated back to the requested
/// control layout so downstream control counts are unaffected.
fn collapse_to_line<const D: usize>(
    branch: &Polyline<D>,
    params: Vec<f64>,
    order: usize,
    segments: usize,
) -> Result<Fit<D>> {
    let pts = branch.points();
    let line = DMatrix::from_fn(
        params.len(),
        2,
        |i, j| if j == 0 { 1.0 - params[i] } else { params[i] },
    );
    let (start, end) = match solve_least_squares(&line, pts) {
        Ok((ends, _)) => (ends[0], ends[1]),
        // every parameter identical: no direction to recover
        Err(_) => {
            let c = pts.iter().sum::<Point<D>>() / pts.len() as f64;
            (c, c)
        }
    };
    let total = order * segments;
    let controls = (0..=total)
        .map(|k| start + (end - start) * (k as f64 / total as f64))
        .collect();
    let curve = CompositeBezier::from_controls(controls, segments)?;
    let residual_sq = residual_sq(&curve, pts, &params);
    Ok(Fit {
        curve,
        params,
        residual_sq,
        condition: 1.0,
        collapsed: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p2(x: f64, y: f64) -> Point2 {
        Point2::new(x, y)
    }

    /// Independent evaluation by repeated linear interpolation.
    fn de_casteljau<const D: usize>(controls: &[Point<D>], t: f64) -> Point<D> {
        let mut pts = controls.to_vec();
        while pts.len() > 1 {
            pts = pts.windows(2).map(|w| w[0] * (1.0 - t) + w[1] * t).collect();
        }
        pts[0]
    }

    #[test]
    fn linear_midpoint() {
        let seg = BezierSegment::new(vec![p2(0.0, 0.0), p2(1.0, 1.0)]).unwrap();
        assert_eq!(eval_bezier(&seg, 0.5).unwrap(), p2(0.5, 0.5));
    }

    #[test]
    fn quadratic_values() {
        let seg = BezierSegment::new(vec![p2(0.0, 0.0), p2(1.0, 0.0), p2(1.0, 1.0)]).unwrap();
        assert_eq!(seg.eval(0.0).unwrap(), p2(0.0, 0.0));
        let oracle = de_casteljau(seg.controls(), 0.5);
        assert!((oracle - p2(0.75, 0.25)).norm() < 1e-15);
        assert!((seg.eval(0.5).unwrap() - oracle).norm() < 1e-15);
    }

    #[test]
    fn parameter_out_of_range() {
        let seg = BezierSegment::new(vec![p2(0.0, 0.0), p2(1.0, 1.0)]).unwrap();
        assert!(matches!(seg.eval(1.5), Err(Error::Domain(_))));
        assert!(matches!(seg.eval(-0.01), Err(Error::Domain(_))));
    }

    #[test]
    fn segment_needs_two_controls() {
        assert!(BezierSegment::new(vec![p2(0.0, 0.0)]).is_err());
    }

    #[test]
    fn sample_line() {
        let c = CompositeBezier::from_controls(vec![p2(0.0, 0.0), p2(1.0, 0.0)], 1).unwrap();
        let pl = sample_composite(&c, 3).unwrap();
        assert_eq!(pl.points(), &[p2(0.0, 0.0), p2(0.5, 0.0), p2(1.0, 0.0)]);
        assert!(sample_composite(&c, 1).is_err());
    }

    #[test]
    fn sample_two_lines_hits_joint() {
        let c = CompositeBezier::from_controls(vec![p2(0.0, 0.0), p2(1.0, 0.0), p2(1.0, 1.0)], 2).unwrap();
        let pl = sample_composite(&c, 5).unwrap();
        assert_eq!(pl.points()[0], p2(0.0, 0.0));
        assert_eq!(pl.points()[2], p2(1.0, 0.0));
        assert_eq!(pl.points()[4], p2(1.0, 1.0));
    }

    #[test]
    fn sample_quadratic_index_50() {
        let controls = vec![p2(0.0, 0.0), p2(1.0, 0.0), p2(1.0, 1.0)];
        let c = CompositeBezier::from_controls(controls.clone(), 1).unwrap();
        let pl = sample_composite(&c, 101).unwrap();
        let oracle = de_casteljau(&controls, 0.5);
        assert!((pl.points()[50] - oracle).norm() < 1e-15);
    }

    #[test]
    fn joints_must_match() {
        let a = BezierSegment::new(vec![p2(0.0, 0.0), p2(1.0, 0.0)]).unwrap();
        let b = BezierSegment::new(vec![p2(1.0, 1e-12), p2(2.0, 0.0)]).unwrap();
        assert!(CompositeBezier::new(vec![a, b]).is_err());
    }

    #[test]
    fn fit_recovers_uniform_cubic() {
        let controls = vec![p2(0.0, 0.0), p2(0.3, 1.2), p2(1.4, 0.9), p2(2.0, -0.2)];
        let pts: Vec<_> = (0..100)
            .map(|i| de_casteljau(&controls, i as f64 / 99.0))
            .collect();
        let pl = Polyline::new(pts).unwrap();
        let fit = fit_composite_with(&pl, 3, 1, &Parameterization::Uniform).unwrap();
        for (a, b) in fit.curve.control_points().iter().zip(&controls) {
            assert!((a - b).norm() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn fit_two_point_line() {
        let pl = Polyline::new(vec![p2(1.0, 2.0), p2(4.0, 6.0)]).unwrap();
        let c = fit_composite(&pl, 1, 1).unwrap();
        let ctrl = c.control_points();
        assert!((ctrl[0] - p2(1.0, 2.0)).norm() < 1e-12);
        assert!((ctrl[1] - p2(4.0, 6.0)).norm() < 1e-12);
    }

    #[test]
    fn refinement_lowers_semicircle_residual() {
        let pts: Vec<_> = (0..200)
            .map(|i| {
                let a = std::f64::consts::PI * i as f64 / 199.0;
                p2(a.cos(), a.sin())
            })
            .collect();
        let pl = Polyline::new(pts).unwrap();
        let max_res = |segments| {
            let fit = fit_composite_with(&pl, 3, segments, &Parameterization::ChordLength).unwrap();
            pl.points()
                .iter()
                .zip(&fit.params)
                .map(|(p, &t)| (fit.curve.eval_at(t) - p).norm())
                .fold(0.0, f64::max)
        };
        let one = max_res(1);
        let two = max_res(2);
        assert!(two < one, "two segments {two} vs one {one}");
    }

    #[test]
    fn too_few_points() {
        let pl = Polyline::new(vec![p2(0.0, 0.0), p2(1.0, 1.0), p2(2.0, 0.0)]).unwrap();
        assert!(matches!(fit_composite(&pl, 3, 1), Err(Error::Contract(_))));
    }

    #[test]
    fn rank_deficient_parameters() {
        // every point assigned to the same τ: columns cannot be separated
        let pl = Polyline::new(vec![p2(0.0, 0.0), p2(1.0, 1.0), p2(2.0, 0.5)]).unwrap();
        let params = Parameterization::Explicit(vec![0.5, 0.5, 0.5]);
        assert!(matches!(
            fit_composite_with(&pl, 2, 1, &params),
            Err(Error::SingularFit { .. })
        ));
    }

    #[test]
    fn collinear_collapses_but_keeps_layout() {
        let pts: Vec<_> = [0.0, 0.1, 0.5, 0.6, 1.0]
            .iter()
            .map(|&x| p2(x, 2.0 * x))
            .collect();
        let pl = Polyline::new(pts).unwrap();
        let fit = fit_composite_with(&pl, 3, 1, &Parameterization::ChordLength).unwrap();
        assert!(fit.collapsed);
        assert_eq!(fit.curve.control_count(), 4);
        for p in fit.curve.sample_points(9) {
            assert!((p[1] - 2.0 * p[0]).abs() < 1e-12);
        }
    }

    #[test]
    fn scale_examples() {
        let c = CompositeBezier::from_controls(vec![p2(0.0, 0.0), p2(1.0, 0.0)], 1).unwrap();
        let origin = p2(0.0, 0.0);
        assert_eq!(scale_composite(&c, 1.0, &origin).unwrap(), c);
        let s = scale_composite(&c, 2.0, &origin).unwrap();
        assert_eq!(s.control_points(), vec![p2(0.0, 0.0), p2(2.0, 0.0)]);
        assert!(scale_composite(&c, 0.0, &origin).is_err());
        assert!(scale_composite(&c, -1.0, &origin).is_err());
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let c = CompositeBezier::from_controls(
            vec![
                p2(0.0, 0.0),
                p2(1.0, 2.0),
                p2(2.0, 0.0),
                p2(3.0, 1.0),
                p2(4.0, -1.0),
            ],
            2,
        )
        .unwrap();
        for &t in &[0.1, 0.3, 0.7, 0.9] {
            let h = 1e-6;
            let fd = (c.eval_at(t + h) - c.eval_at(t - h)) / (2.0 * h);
            assert!((fd - c.derivative_at(t)).norm() < 1e-6);
        }
    }
}
