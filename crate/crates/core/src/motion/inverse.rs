//! Inversion of the forward field, first-order hole filling and the motion mask.

use crate::error::{Error, Result};
use crate::field::{FlowGrid, InverseMotionField, MotionField, MotionMask};

pub const DEFAULT_W_MIN: f64 = 1e-3;
pub const DEFAULT_MAX_STEP: usize = 2;
pub const DEFAULT_M_EPS: f64 = 1e-4;

/// Forward-splats `-field(p)` from every source pixel `p` onto the four pixels
/// around `p + field(p)` with bilinear weights. Targets whose accumulated
/// weight stays below `w_min` are holes.
pub fn invert_field(field: &MotionField, w_min: f64) -> Result<InverseMotionField> {
    let (w, h) = field.dims();
    if w == 0 || h == 0 {
        return Err(Error::Contract(format!("empty field {w}x{h}")));
    }
    let n = w * h;
    let mut weight = vec![0.0f64; n];
    let mut acc = vec![[0.0f64; 2]; n];
    for y in 0..h {
        for x in 0..w {
            let [dx, dy] = field.get(x, y);
            let (dx, dy) = (dx as f64, dy as f64);
            let tx = x as f64 + dx;
            let ty = y as f64 + dy;
            let x0 = tx.floor();
            let y0 = ty.floor();
            let (ax, ay) = (tx - x0, ty - y0);
            for (ox, oy, wt) in [
                (0.0, 0.0, (1.0 - ax) * (1.0 - ay)),
                (1.0, 0.0, ax * (1.0 - ay)),
                (0.0, 1.0, (1.0 - ax) * ay),
                (1.0, 1.0, ax * ay),
            ] {
                if wt <= 0.0 {
                    continue;
                }
                let (qx, qy) = (x0 + ox, y0 + oy);
                if qx < 0.0 || qy < 0.0 || qx >= w as f64 || qy >= h as f64 {
                    continue;
                }
                let i = qy as usize * w + qx as usize;
                weight[i] += wt;
                acc[i][0] -= wt * dx;
                acc[i][1] -= wt * dy;
            }
        }
    }
    let mut out = FlowGrid::zeros(w, h, false);
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            if weight[i] >= w_min {
                out.set(
                    x,
                    y,
                    [(acc[i][0] / weight[i]) as f32, (acc[i][1] / weight[i]) as f32],
                );
            }
        }
    }
    Ok(InverseMotionField(out))
}

/// Outcome of [`first_order_fill`].
#[derive(Debug, Clone)]
pub struct FillReport {
    pub field: InverseMotionField,
    pub filled: usize,
    /// Hole pixels no ring reached; left at zero and flagged invalid.
    pub unreachable: usize,
    pub rings: usize,
}

/// Fills holes ring by ring with a first-order expansion around a nearby
/// valid pixel: `inv(q) = inv(p̄) + J(p̄) (q - p̄)`. `p̄` is the nearest valid
/// pixel whose differences exist on both axes; holes reachable only from
/// pixels lacking one axis are filled last.
pub fn first_order_fill(inv: &InverseMotionField, max_step: usize) -> Result<FillReport> {
    if !(1..=2).contains(&max_step) {
        return Err(Error::Domain(format!("max_step {max_step} must be 1 or 2")));
    }
    let (w, h) = inv.dims();
    let n = w * h;
    let mut valid = inv.valid().to_vec();
    let mut vals: Vec<[f64; 2]> = inv.vectors().iter().map(|v| [v[0] as f64, v[1] as f64]).collect();
    let step = max_step as isize;
    let mut filled = 0;
    let mut rings = 0;

    loop {
        let mut updates = Vec::new();
        for qy in 0..h as isize {
            for qx in 0..w as isize {
                if valid[qy as usize * w + qx as usize] {
                    continue;
                }
                let at = |x: isize, y: isize| -> Option<[f64; 2]> {
                    if x < 0 || y < 0 || x >= w as isize || y >= h as isize {
                        return None;
                    }
                    let i = y as usize * w + x as usize;
                    valid[i].then_some(vals[i])
                };
                let jacobian = |px: isize, py: isize| {
                    let base = at(px, py)?;
                    let diff = |fwd: Option<[f64; 2]>, bwd: Option<[f64; 2]>| match (fwd, bwd) {
                        (Some(f), _) => Some([f[0] - base[0], f[1] - base[1]]),
                        (None, Some(b)) => Some([base[0] - b[0], base[1] - b[1]]),
                        (None, None) => None,
                    };
                    Some((
                        base,
                        diff(at(px + 1, py), at(px - 1, py)),
                        diff(at(px, py + 1), at(px, py - 1)),
                    ))
                };
                // nearest valid pixel, preferring one with both derivatives defined
                let mut best: Option<(isize, isize, bool, isize)> = None;
                for dy in -step..=step {
                    for dx in -step..=step {
                        let (px, py) = (qx + dx, qy + dy);
                        let Some((_, jx, jy)) = jacobian(px, py) else {
                            continue;
                        };
                        let full = jx.is_some() && jy.is_some();
                        let d = dx * dx + dy * dy;
                        if best.is_none_or(|(_, _, bf, bd)| (full, -d) > (bf, -bd)) {
                            best = Some((px, py, full, d));
                        }
                    }
                }
                let Some((px, py, full, _)) = best else { continue };
                let (base, jx, jy) = jacobian(px, py).expect("chosen pixel is valid");
                let (jx, jy) = (jx.unwrap_or([0.0; 2]), jy.unwrap_or([0.0; 2]));
                let (ddx, ddy) = ((qx - px) as f64, (qy - py) as f64);
                let value = [
                    base[0] + jx[0] * ddx + jy[0] * ddy,
                    base[1] + jx[1] * ddx + jy[1] * ddy,
                ];
                updates.push((qy as usize * w + qx as usize, value, full));
            }
        }
        if updates.is_empty() {
            break;
        }
        // partial expansions wait until no full one is left
        if updates.iter().any(|u| u.2) {
            updates.retain(|u| u.2);
        }
        rings += 1;
        filled += updates.len();
        for (i, v, _) in updates {
            vals[i] = v;
            valid[i] = true;
        }
    }

    let vectors = vals
        .iter()
        .zip(&valid)
        .map(|(v, &ok)| if ok { [v[0] as f32, v[1] as f32] } else { [0.0; 2] })
        .collect();
    let unreachable = n - valid.iter().filter(|&&v| v).count();
    Ok(FillReport {
        field: InverseMotionField(FlowGrid::from_parts(w, h, vectors, valid)?),
        filled,
        unreachable,
        rings,
    })
}

/// 1 where the inverse displacement magnitude exceeds `m_eps`.
pub fn motion_mask(inv: &InverseMotionField, m_eps: f64) -> MotionMask {
    let bits = inv
        .vectors()
        .iter()
        .map(|v| (v[0] as f64).hypot(v[1] as f64) > m_eps)
        .collect();
    MotionMask::new(inv.width(), inv.height(), bits).expect("mask dims match field")
}
