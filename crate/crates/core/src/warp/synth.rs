//! Coarse-to-fine texture synthesis driven by an inverse motion field.
//!
//! The coarsest pyramid level is warped directly. Each finer level warps its
//! own pyramid level, swaps that warp's low-frequency band for the upsampled
//! coarser result, and keeps the untouched source wherever the (downsampled)
//! motion mask is zero.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{check_factor, FlowGrid, InverseMotionField, MotionMask};
use crate::warp::image::Image;
use crate::warp::pyramid::{expand, reduce, ImagePyramid};

pub const DEFAULT_DEPTH: usize = 3;

/// `out(q) = img(q + inv(q))` by bilinear sampling; invalid pixels copy `img(q)`.
pub fn backward_warp(img: &Image, inv: &FlowGrid) -> Result<Image> {
    if img.dims() != inv.dims() {
        return Err(Error::Contract(format!(
            "image {:?} and field {:?} differ in size",
            img.dims(),
            inv.dims()
        )));
    }
    let (w, h, ch) = (img.width(), img.height(), img.channels());
    let mut data = vec![0.0; w * h * ch];
    data.par_chunks_mut(w * ch).enumerate().for_each(|(y, row)| {
        for x in 0..w {
            let out = &mut row[x * ch..(x + 1) * ch];
            if !inv.is_valid(x, y) {
                out.copy_from_slice(img.pixel(x, y));
                continue;
            }
            let [dx, dy] = inv.get(x, y);
            if dx == 0.0 && dy == 0.0 {
                out.copy_from_slice(img.pixel(x, y));
                continue;
            }
            let (sx, sy) = (x as f64 + dx as f64, y as f64 + dy as f64);
            for (c, o) in out.iter_mut().enumerate() {
                *o = img.sample(sx, sy, c);
            }
        }
    });
    Image::new(w, h, ch, data)
}

/// Coarse cell is 1 when any covered fine cell is 1.
pub fn downsample_mask(mask: &MotionMask, factor: usize) -> Result<MotionMask> {
    check_factor(mask.width(), mask.height(), factor)?;
    if factor == 1 {
        return Ok(mask.clone());
    }
    let (w, h) = (mask.width() / factor, mask.height() / factor);
    let mut bits = Vec::with_capacity(w * h);
    for cy in 0..h {
        for cx in 0..w {
            let any = (cy * factor..(cy + 1) * factor)
                .any(|y| (cx * factor..(cx + 1) * factor).any(|x| mask.get(x, y)));
            bits.push(any);
        }
    }
    MotionMask::new(w, h, bits)
}

/// Final frame plus every intermediate level, coarsest first.
#[derive(Debug, Clone)]
pub struct Synthesis {
    pub levels: Vec<Image>,
}

impl Synthesis {
    pub fn output(&self) -> &Image {
        self.levels.last().expect("at least one level")
    }

    pub fn into_output(mut self) -> Image {
        self.levels.pop().expect("at least one level")
    }
}

pub fn synthesize(src: &Image, inv: &InverseMotionField, mask: &MotionMask, depth: usize) -> Result<Image> {
    synthesize_levels(src, inv, mask, depth).map(Synthesis::into_output)
}

pub fn synthesize_levels(
    src: &Image,
    inv: &InverseMotionField,
    mask: &MotionMask,
    depth: usize,
) -> Result<Synthesis> {
    if src.dims() != inv.dims() || (mask.width(), mask.height()) != src.dims() {
        return Err(Error::Contract(format!(
            "image {:?}, field {:?} and mask {}x{} must share dimensions",
            src.dims(),
            inv.dims(),
            mask.width(),
            mask.height()
        )));
    }
    let pyramid = ImagePyramid::build(src, depth)?;
    let coarse_field = inv.downsample(1 << depth)?;
    let mut current = backward_warp(pyramid.level(depth), &coarse_field)?;
    let mut levels = Vec::with_capacity(depth + 1);

    for n in (1..=depth).rev() {
        levels.push(current.clone());
        let factor = 1 << (n - 1);
        let base = pyramid.level(n - 1);
        let level_mask = downsample_mask(mask, factor)?;
        if level_mask.is_zero() {
            current = base.clone();
            continue;
        }
        let warped = backward_warp(base, &inv.downsample(factor)?)?;
        let warped_low = expand(&reduce(&warped)?);
        let guided_low = expand(&current);
        let (w, h, ch) = (base.width(), base.height(), base.channels());
        current = Image::from_fn(w, h, ch, |x, y, c| {
            if level_mask.get(x, y) {
                let v = warped.get(x, y, c) - warped_low.get(x, y, c) + guided_low.get(x, y, c);
                v.clamp(0.0, 1.0)
            } else {
                base.get(x, y, c)
            }
        });
    }
    if depth == 0 {
        // single level: gate the direct warp by the mask
        current = Image::from_fn(src.width(), src.height(), src.channels(), |x, y, c| {
            if mask.get(x, y) {
                current.get(x, y, c)
            } else {
                src.get(x, y, c)
            }
        });
    }
    levels.push(current);
    Ok(Synthesis { levels })
}
