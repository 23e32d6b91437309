//! Motion seeds along animated boundaries and their spread into a dense field.
//!
//! A pixel `p` is expressed as `p = a + ω (B(τ) - a)`: position `τ` on the
//! seed's rest curve `B` scaled by `ω` about its control centroid `a`. The
//! seed displacement at `τ`, decayed by `λ(ω)`, is that seed's contribution;
//! contributions from all seeds are averaged with weights `λ`.

use rayon::prelude::*;

use crate::bezier::{CompositeBezier, Point2};
use crate::error::{Error, Result};
use crate::field::{FlowGrid, MotionField};
use crate::motion::decay::Decay;
use crate::shape::BoundarySet;

/// Number of scale steps in the coarse (ω, τ) search.
pub const OMEGA_STEPS: usize = 64;
/// Number of curve samples in the coarse (ω, τ) search.
pub const TAU_SAMPLES: usize = 256;
pub const DEFAULT_D_TOL: f64 = 0.75;
const REFINE_ITERATIONS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeedSample {
    pub tau: f64,
    pub position: Point2,
    pub displacement: Point2,
}

/// Motion along one boundary branch, in image pixels.
#[derive(Debug, Clone, PartialEq)]
pub struct MotionSeed {
    pub role: String,
    pub curve: CompositeBezier<2>,
    pub moved_curve: CompositeBezier<2>,
    pub samples: Vec<SeedSample>,
}

impl MotionSeed {
    pub fn displacement_at(&self, tau: f64) -> Point2 {
        self.moved_curve.eval_at(tau) - self.curve.eval_at(tau)
    }

    pub fn anchor(&self) -> Point2 {
        self.curve.centroid()
    }

    pub fn max_displacement(&self) -> f64 {
        self.samples
            .iter()
            .map(|s| s.displacement.norm())
            .fold(0.0, f64::max)
    }
}

fn project(curve: &CompositeBezier<3>) -> Result<CompositeBezier<2>> {
    let controls = curve
        .control_points()
        .iter()
        .map(|p| Point2::new(p.x, p.y))
        .collect();
    CompositeBezier::from_controls(controls, curve.segment_count())
}

/// One seed per branch with `samples_per_branch` matched-τ samples.
pub fn make_seeds(
    rest: &BoundarySet,
    animated: &BoundarySet,
    samples_per_branch: usize,
) -> Result<Vec<MotionSeed>> {
    if samples_per_branch < 2 {
        return Err(Error::Domain(format!(
            "samples_per_branch {samples_per_branch} below 2"
        )));
    }
    if rest.len() != animated.len() {
        return Err(Error::Contract(format!(
            "rest has {} branches, animated has {}",
            rest.len(),
            animated.len()
        )));
    }
    rest.branches()
        .iter()
        .map(|rb| {
            let ab = animated
                .branch(&rb.role)
                .ok_or_else(|| Error::Mapping(rb.role.clone()))?;
            if ab.curve.control_count() != rb.curve.control_count()
                || ab.curve.segment_count() != rb.curve.segment_count()
            {
                return Err(Error::Contract(format!(
                    "`{}` changes control layout between rest and animated",
                    rb.role
                )));
            }
            let curve = project(&rb.curve)?;
            let moved_curve = project(&ab.curve)?;
            let samples = (0..samples_per_branch)
                .map(|i| {
                    let tau = i as f64 / (samples_per_branch - 1) as f64;
                    let position = curve.eval_at(tau);
                    SeedSample {
                        tau,
                        position,
                        displacement: moved_curve.eval_at(tau) - position,
                    }
                })
                .collect();
            Ok(MotionSeed {
                role: rb.role.clone(),
                curve,
                moved_curve,
                samples,
            })
        })
        .collect()
}

/// Precomputed coarse (ω, τ) lattice for one seed.
struct ScaleGrid<'a> {
    curve: &'a CompositeBezier<2>,
    anchor: Point2,
    omegas: Vec<f64>,
    taus: Vec<f64>,
    /// `B(τ_j) - a` per τ sample.
    offsets: Vec<Point2>,
}

impl<'a> ScaleGrid<'a> {
    fn new(seed: &'a MotionSeed, decay: &Decay) -> Self {
        let anchor = seed.anchor();
        let step = (decay.omega_max - decay.omega_min) / OMEGA_STEPS as f64;
        let omegas = (0..=OMEGA_STEPS)
            .map(|k| decay.omega_min + k as f64 * step)
            .collect();
        let taus: Vec<f64> = (0..TAU_SAMPLES)
            .map(|j| j as f64 / (TAU_SAMPLES - 1) as f64)
            .collect();
        let offsets = taus.iter().map(|&t| seed.curve.eval_at(t) - anchor).collect();
        Self {
            curve: &seed.curve,
            anchor,
            omegas,
            taus,
            offsets,
        }
    }

    #[inline]
    fn point(&self, k: usize, j: usize) -> Point2 {
        self.anchor + self.offsets[j] * self.omegas[k]
    }

    fn len(&self) -> usize {
        self.omegas.len() * self.taus.len()
    }

    #[inline]
    fn split(&self, idx: usize) -> (usize, usize) {
        (idx / self.taus.len(), idx % self.taus.len())
    }

    /// Index of the nearest lattice point; ties keep the lowest index.
    fn nearest(&self, p: &Point2) -> (usize, f64) {
        let mut best = (0, f64::INFINITY);
        for idx in 0..self.len() {
            let (k, j) = self.split(idx);
            let d = (self.point(k, j) - p).norm_squared();
            if d < best.1 {
                best = (idx, d);
            }
        }
        best
    }

    /// Largest distance between diagonal corners of any lattice cell.
    fn max_cell_diagonal(&self) -> f64 {
        let mut h: f64 = 0.0;
        for k in 0..self.omegas.len() - 1 {
            for j in 0..self.taus.len() - 1 {
                h = h
                    .max((self.point(k + 1, j + 1) - self.point(k, j)).norm())
                    .max((self.point(k + 1, j) - self.point(k, j + 1)).norm());
            }
        }
        h
    }

    /// Bounded Gauss-Newton polish of (ω, τ) from a lattice start.
    fn refine(&self, p: &Point2, start: usize, decay: &Decay) -> (f64, f64, f64) {
        let (k, j) = self.split(start);
        let mut omega = self.omegas[k];
        let mut tau = self.taus[j];
        let residual =
            |omega: f64, tau: f64| self.anchor + (self.curve.eval_at(tau) - self.anchor) * omega - p;
        let mut r = residual(omega, tau);
        let mut dist = r.norm_squared();
        for _ in 0..REFINE_ITERATIONS {
            if dist == 0.0 {
                break;
            }
            let col_omega = self.curve.eval_at(tau) - self.anchor;
            let col_tau = self.curve.derivative_at(tau) * omega;
            let (a, b, c) = (
                col_omega.norm_squared(),
                col_omega.dot(&col_tau),
                col_tau.norm_squared(),
            );
            let (g0, g1) = (col_omega.dot(&r), col_tau.dot(&r));
            let det = a * c - b * b;
            if !(det.abs() > 1e-18 * (a * c).max(1e-300)) {
                break;
            }
            let d_omega = -(c * g0 - b * g1) / det;
            let d_tau = -(a * g1 - b * g0) / det;
            let mut step = 1.0;
            let mut improved = false;
            while step > 1e-3 {
                let no = (omega + step * d_omega).clamp(decay.omega_min, decay.omega_max);
                let nt = (tau + step * d_tau).clamp(0.0, 1.0);
                let nr = residual(no, nt);
                let nd = nr.norm_squared();
                if nd < dist {
                    omega = no;
                    tau = nt;
                    r = nr;
                    dist = nd;
                    improved = true;
                    break;
                }
                step *= 0.5;
            }
            if !improved {
                break;
            }
        }
        (omega, tau, dist.sqrt())
    }
}

/// The (ω, τ) placing `p` on a scaled copy of the seed curve, if one lies
/// within `d_tol` pixels.
pub fn locate(p: &Point2, seed: &MotionSeed, decay: &Decay, d_tol: f64) -> Option<(f64, f64)> {
    let grid = ScaleGrid::new(seed, decay);
    let (start, _) = grid.nearest(p);
    let (omega, tau, dist) = grid.refine(p, start, decay);
    (dist <= d_tol).then_some((omega, tau))
}

/// Per-pixel placement of one seed: `(pixel index, ω, τ)`.
fn locate_all(
    seed: &MotionSeed,
    decay: &Decay,
    d_tol: f64,
    width: usize,
    height: usize,
) -> Vec<(usize, f64, f64)> {
    let grid = ScaleGrid::new(seed, decay);
    // Any point within d_tol of the continuous band has a lattice point within
    // d_tol plus a cell diameter; pixels outside that radius cannot succeed.
    let radius = d_tol + 2.0 * grid.max_cell_diagonal();
    let r2 = radius * radius;
    let mut best: Vec<(u32, f64)> = vec![(u32::MAX, f64::INFINITY); width * height];
    for idx in 0..grid.len() {
        let (k, j) = grid.split(idx);
        let g = grid.point(k, j);
        let x0 = (g.x - radius).ceil().max(0.0);
        let x1 = (g.x + radius).floor().min(width as f64 - 1.0);
        let y0 = (g.y - radius).ceil().max(0.0);
        let y1 = (g.y + radius).floor().min(height as f64 - 1.0);
        if x0 > x1 || y0 > y1 {
            continue;
        }
        for y in y0 as usize..=y1 as usize {
            for x in x0 as usize..=x1 as usize {
                let d = (g - Point2::new(x as f64, y as f64)).norm_squared();
                let slot = &mut best[y * width + x];
                if d <= r2 && d < slot.1 {
                    *slot = (idx as u32, d);
                }
            }
        }
    }
    best.iter()
        .enumerate()
        .filter(|(_, (idx, _))| *idx != u32::MAX)
        .filter_map(|(pix, &(idx, _))| {
            let p = Point2::new((pix % width) as f64, (pix / width) as f64);
            let (omega, tau, dist) = grid.refine(&p, idx as usize, decay);
            (dist <= d_tol).then_some((pix, omega, tau))
        })
        .collect()
}

/// Dense field: at every pixel, the λ-weighted average of decayed seed
/// displacements. Pixels no seed reaches get zero motion. All pixels valid.
pub fn spread_and_combine(
    seeds: &[MotionSeed],
    decay: &Decay,
    d_tol: f64,
    width: usize,
    height: usize,
) -> Result<MotionField> {
    if seeds.is_empty() {
        return Err(Error::Contract("no motion seeds".into()));
    }
    if width == 0 || height == 0 {
        return Err(Error::Contract(format!("empty image {width}x{height}")));
    }
    let placements: Vec<_> = seeds
        .par_iter()
        .map(|s| locate_all(s, decay, d_tol, width, height))
        .collect();

    let n = width * height;
    let mut weight = vec![0.0f64; n];
    let mut sum = vec![[0.0f64; 2]; n];
    for (seed, located) in seeds.iter().zip(&placements) {
        for &(pix, omega, tau) in located {
            let lambda = decay.factor(omega);
            if lambda <= 0.0 {
                continue;
            }
            let v = seed.displacement_at(tau);
            weight[pix] += lambda;
            sum[pix][0] += lambda * v.x;
            sum[pix][1] += lambda * v.y;
        }
    }
    let field = FlowGrid::from_fn(width, height, |x, y| {
        let i = y * width + x;
        if weight[i] > 0.0 {
            [sum[i][0] / weight[i], sum[i][1] / weight[i]]
        } else {
            [0.0, 0.0]
        }
    });
    Ok(MotionField(field))
}
