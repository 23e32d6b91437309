//! Dense per-pixel displacement grids and the motion mask.

use std::ops::{Deref, DerefMut};

use crate::error::{Error, Result};

/// Row-major grid of 2D displacements (pixels) with a validity flag per pixel.
/// Invalid pixels always hold a zero vector.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowGrid {
    width: usize,
    height: usize,
    vectors: Vec<[f32; 2]>,
    valid: Vec<bool>,
}

impl FlowGrid {
    /// Zero displacement everywhere, every pixel flagged `valid`.
    pub fn zeros(width: usize, height: usize, valid: bool) -> Self {
        Self {
            width,
            height,
            vectors: vec![[0.0; 2]; width * height],
            valid: vec![valid; width * height],
        }
    }

    pub fn from_parts(width: usize, height: usize, vectors: Vec<[f32; 2]>, valid: Vec<bool>) -> Result<Self> {
        let n = width * height;
        if vectors.len() != n || valid.len() != n {
            return Err(Error::Contract(format!(
                "{width}x{height} grid needs {n} entries, got {} vectors and {} flags",
                vectors.len(),
                valid.len()
            )));
        }
        let mut grid = Self {
            width,
            height,
            vectors,
            valid,
        };
        for i in 0..n {
            if !grid.valid[i] {
                grid.vectors[i] = [0.0; 2];
            }
        }
        Ok(grid)
    }

    /// Builds a fully valid grid from a closure over pixel coordinates.
    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> [f64; 2]) -> Self {
        let mut vectors = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                let [dx, dy] = f(x, y);
                vectors.push([dx as f32, dy as f32]);
            }
        }
        Self {
            width,
            height,
            vectors,
            valid: vec![true; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize) -> usize {
        y * self.width + x
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> [f32; 2] {
        self.vectors[self.index(x, y)]
    }

    #[inline]
    pub fn is_valid(&self, x: usize, y: usize) -> bool {
        self.valid[self.index(x, y)]
    }

    pub fn set(&mut self, x: usize, y: usize, v: [f32; 2]) {
        let i = self.index(x, y);
        self.vectors[i] = v;
        self.valid[i] = true;
    }

    pub fn invalidate(&mut self, x: usize, y: usize) {
        let i = self.index(x, y);
        self.vectors[i] = [0.0; 2];
        self.valid[i] = false;
    }

    pub fn vectors(&self) -> &[[f32; 2]] {
        &self.vectors
    }

    pub fn valid(&self) -> &[bool] {
        &self.valid
    }

    pub fn valid_count(&self) -> usize {
        self.valid.iter().filter(|&&v| v).count()
    }

    /// Bilinear sample of the vectors at a real position, clamped to the grid.
    pub fn sample(&self, x: f64, y: f64) -> [f64; 2] {
        let xf = x.clamp(0.0, (self.width - 1) as f64);
        let yf = y.clamp(0.0, (self.height - 1) as f64);
        let x0 = xf.floor() as usize;
        let y0 = yf.floor() as usize;
        let x1 = (x0 + 1).min(self.width - 1);
        let y1 = (y0 + 1).min(self.height - 1);
        let (ax, ay) = (xf - x0 as f64, yf - y0 as f64);
        let mut out = [0.0; 2];
        for (c, o) in out.iter_mut().enumerate() {
            let v = |x: usize, y: usize| self.get(x, y)[c] as f64;
            let top = v(x0, y0) * (1.0 - ax) + v(x1, y0) * ax;
            let bottom = v(x0, y1) * (1.0 - ax) + v(x1, y1) * ax;
            *o = top * (1.0 - ay) + bottom * ay;
        }
        out
    }

    /// Averages valid vectors over `factor × factor` windows and divides by
    /// `factor`, so displacements stay in pixels of the coarse grid.
    pub fn downsample(&self, factor: usize) -> Result<FlowGrid> {
        check_factor(self.width, self.height, factor)?;
        if factor == 1 {
            return Ok(self.clone());
        }
        let (w, h) = (self.width / factor, self.height / factor);
        let mut out = FlowGrid::zeros(w, h, false);
        for cy in 0..h {
            for cx in 0..w {
                let mut sum = [0.0f64; 2];
                let mut count = 0usize;
                for y in cy * factor..(cy + 1) * factor {
                    for x in cx * factor..(cx + 1) * factor {
                        if self.is_valid(x, y) {
                            let v = self.get(x, y);
                            sum[0] += v[0] as f64;
                            sum[1] += v[1] as f64;
                            count += 1;
                        }
                    }
                }
                if count > 0 {
                    let s = (count * factor) as f64;
                    out.set(cx, cy, [(sum[0] / s) as f32, (sum[1] / s) as f32]);
                }
            }
        }
        Ok(out)
    }
}

pub(crate) fn check_factor(width: usize, height: usize, factor: usize) -> Result<()> {
    if factor == 0 || !factor.is_power_of_two() {
        return Err(Error::Contract(format!("factor {factor} is not a power of two")));
    }
    if !width.is_multiple_of(factor) || !height.is_multiple_of(factor) {
        return Err(Error::Contract(format!(
            "{width}x{height} is not divisible by {factor}"
        )));
    }
    Ok(())
}

macro_rules! flow_newtype {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Debug, Clone, PartialEq)]
        pub struct $name(pub FlowGrid);

        impl $name {
            pub fn into_inner(self) -> FlowGrid {
                self.0
            }
        }

        impl Deref for $name {
            type Target = FlowGrid;
            fn deref(&self) -> &FlowGrid {
                &self.0
            }
        }

        impl DerefMut for $name {
            fn deref_mut(&mut self) -> &mut FlowGrid {
                &mut self.0
            }
        }

        impl From<FlowGrid> for $name {
            fn from(g: FlowGrid) -> Self {
                Self(g)
            }
        }
    };
}

flow_newtype!(
    /// Forward displacement from rest pixels to animated pixels.
    MotionField
);
flow_newtype!(
    /// Displacement from each animated pixel back to its source pixel.
    InverseMotionField
);

/// 0/1 flag per pixel; 1 marks pixels whose texture moves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MotionMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl MotionMask {
    pub fn new(width: usize, height: usize, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != width * height {
            return Err(Error::Contract(format!(
                "{width}x{height} mask needs {} flags, got {}",
                width * height,
                bits.len()
            )));
        }
        Ok(Self { width, height, bits })
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            bits: vec![false; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_zero(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }
}
