use crate::bezier::Point3;
use crate::error::{Error, Result};
use crate::shape::boundary::BoundarySet;

/// Default guard on ratio denominators.
pub const DEFAULT_EPS_DEN: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct BranchControllers {
    pub role: String,
    /// Per-control `(r_x, r_y, r_z)` ratios.
    pub ratios: Vec<Point3>,
}

/// Per-control coordinate ratios of a driving face against the reference.
#[derive(Debug, Clone, PartialEq)]
pub struct MotionControllerSet {
    branches: Vec<BranchControllers>,
}

impl MotionControllerSet {
    pub fn new(branches: Vec<BranchControllers>) -> Result<Self> {
        for b in &branches {
            if let Some(j) = b.ratios.iter().position(|r| !r.iter().all(|c| c.is_finite())) {
                return Err(Error::Validation(format!(
                    "ratio {j} of `{}` is not finite",
                    b.role
                )));
            }
        }
        Ok(Self { branches })
    }

    /// All-ones controllers shaped like `target`.
    pub fn identity(target: &BoundarySet) -> Self {
        Self {
            branches: target
                .branches()
                .iter()
                .map(|b| BranchControllers {
                    role: b.role.clone(),
                    ratios: vec![Point3::repeat(1.0); b.curve.control_count()],
                })
                .collect(),
        }
    }

    pub fn branches(&self) -> &[BranchControllers] {
        &self.branches
    }

    pub fn branch(&self, role: &str) -> Option<&BranchControllers> {
        self.branches.iter().find(|b| b.role == role)
    }
}

/// Ratios `(h - o) / (f - o)` per axis for every reference control, where `o`
/// is the reference set's origin.
pub fn compute_controllers(
    human: &BoundarySet,
    reference: &BoundarySet,
    eps_den: f64,
) -> Result<MotionControllerSet> {
    let origin = reference.origin();
    let mut out = Vec::with_capacity(reference.len());
    for rb in reference.branches() {
        let hb = human
            .branch(&rb.role)
            .ok_or_else(|| Error::Mapping(rb.role.clone()))?;
        let rc = rb.curve.control_points();
        let hc = hb.curve.control_points();
        if rc.len() != hc.len() {
            return Err(Error::Contract(format!(
                "`{}` has {} human controls but {} reference controls",
                rb.role,
                hc.len(),
                rc.len()
            )));
        }
        let mut ratios = Vec::with_capacity(rc.len());
        for (index, (h, f)) in hc.iter().zip(&rc).enumerate() {
            let den = f - origin;
            if let Some(axis) = (0..3).find(|&d| den[d].abs() < eps_den) {
                return Err(Error::DivisionGuard {
                    role: rb.role.clone(),
                    index,
                    axis,
                    value: den[axis],
                    eps: eps_den,
                });
            }
            ratios.push((h - origin).component_div(&den));
        }
        out.push(BranchControllers {
            role: rb.role.clone(),
            ratios,
        });
    }
    MotionControllerSet::new(out)
}

/// Resamples an ordered list to `len` entries; endpoints are kept.
///
/// Growing interpolates linearly in index space; shrinking picks the nearest
/// source index on a uniform grid.
pub fn resample_ordered(src: &[Point3], len: usize) -> Vec<Point3> {
    let n = src.len();
    if n == len || n == 0 {
        return src.to_vec();
    }
    if len == 1 {
        return vec![src[0]];
    }
    if n == 1 {
        return vec![src[0]; len];
    }
    let step = (n - 1) as f64 / (len - 1) as f64;
    (0..len)
        .map(|i| {
            let s = i as f64 * step;
            if len > n {
                let k = (s.floor() as usize).min(n - 2);
                let w = s - k as f64;
                src[k] * (1.0 - w) + src[k + 1] * w
            } else {
                src[(s.round() as usize).min(n - 1)]
            }
        })
        .collect()
}

/// Matches controllers to the target's branches by role and resamples each to
/// the target's control count.
pub fn adapt_controllers(ctrl: &MotionControllerSet, target: &BoundarySet) -> Result<MotionControllerSet> {
    let branches = target
        .branches()
        .iter()
        .map(|tb| {
            let src = ctrl
                .branch(&tb.role)
                .ok_or_else(|| Error::Mapping(tb.role.clone()))?;
            Ok(BranchControllers {
                role: tb.role.clone(),
                ratios: resample_ordered(&src.ratios, tb.curve.control_count()),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MotionControllerSet { branches })
}

/// Scales every target control about the target origin by its ratio.
///
/// Written as `p + (r - 1)(p - o)` so unit ratios leave `p` untouched.
pub fn apply_controllers(ctrl: &MotionControllerSet, target: &BoundarySet) -> Result<BoundarySet> {
    let origin = target.origin();
    let mut curves = Vec::with_capacity(target.len());
    for tb in target.branches() {
        let cb = ctrl
            .branch(&tb.role)
            .ok_or_else(|| Error::Mapping(tb.role.clone()))?;
        let controls = tb.curve.control_points();
        if cb.ratios.len() != controls.len() {
            return Err(Error::Contract(format!(
                "`{}` has {} controllers for {} control points",
                tb.role,
                cb.ratios.len(),
                controls.len()
            )));
        }
        let moved = controls
            .iter()
            .zip(&cb.ratios)
            .map(|(p, r)| p + (r - Point3::repeat(1.0)).component_mul(&(p - origin)))
            .collect();
        curves.push(tb.curve.with_controls(moved)?);
    }
    Ok(target.replace_curves(curves))
}
