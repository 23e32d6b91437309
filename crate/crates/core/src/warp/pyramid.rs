use crate::error::{Error, Result};
use crate::warp::image::Image;

const KERNEL: [f64; 5] = [1.0 / 16.0, 4.0 / 16.0, 6.0 / 16.0, 4.0 / 16.0, 1.0 / 16.0];

fn clamp_index(i: isize, n: usize) -> usize {
    i.clamp(0, n as isize - 1) as usize
}

fn blur_rows(img: &Image) -> Image {
    let (w, h, ch) = (img.width(), img.height(), img.channels());
    Image::from_fn(w, h, ch, |x, y, c| {
        KERNEL
            .iter()
            .enumerate()
            .map(|(k, wt)| wt * img.get(clamp_index(x as isize + k as isize - 2, w), y, c))
            .sum()
    })
}

fn blur_cols(img: &Image) -> Image {
    let (w, h, ch) = (img.width(), img.height(), img.channels());
    Image::from_fn(w, h, ch, |x, y, c| {
        KERNEL
            .iter()
            .enumerate()
            .map(|(k, wt)| wt * img.get(x, clamp_index(y as isize + k as isize - 2, h), c))
            .sum()
    })
}

/// Binomial low-pass followed by 2× decimation.
pub fn reduce(img: &Image) -> Result<Image> {
    if !img.width().is_multiple_of(2) || !img.height().is_multiple_of(2) {
        return Err(Error::Contract(format!(
            "cannot halve a {}x{} image",
            img.width(),
            img.height()
        )));
    }
    let blurred = blur_cols(&blur_rows(img));
    Ok(Image::from_fn(
        img.width() / 2,
        img.height() / 2,
        img.channels(),
        |x, y, c| blurred.get(2 * x, 2 * y, c),
    ))
}

/// 2× upsampling with the same binomial kernel as the interpolation filter.
pub fn expand(img: &Image) -> Image {
    let (w, h, ch) = (img.width(), img.height(), img.channels());
    // Each output sample gathers the coarse samples whose zero-stuffed
    // positions fall under the kernel, weighted ×2 per axis.
    let taps = |pos: usize, n: usize| -> Vec<(usize, f64)> {
        (0..5)
            .filter_map(|k| {
                let src = pos as isize + 2 - k as isize;
                (src % 2 == 0).then(|| (clamp_index(src / 2, n), 2.0 * KERNEL[k]))
            })
            .collect()
    };
    let rows = Image::from_fn(2 * w, h, ch, |x, y, c| {
        taps(x, w).iter().map(|&(sx, wt)| wt * img.get(sx, y, c)).sum()
    });
    Image::from_fn(2 * w, 2 * h, ch, |x, y, c| {
        taps(y, h).iter().map(|&(sy, wt)| wt * rows.get(x, sy, c)).sum()
    })
}

/// Gaussian pyramid: level 0 is the source, each further level halves both
/// dimensions.
#[derive(Debug, Clone)]
pub struct ImagePyramid {
    levels: Vec<Image>,
}

impl ImagePyramid {
    pub fn build(src: &Image, depth: usize) -> Result<Self> {
        let factor = 1usize << depth;
        if !src.width().is_multiple_of(factor) || !src.height().is_multiple_of(factor) {
            return Err(Error::Contract(format!(
                "{}x{} is not divisible by {factor}",
                src.width(),
                src.height()
            )));
        }
        let mut levels = vec![src.clone()];
        for n in 0..depth {
            let next = reduce(&levels[n])?;
            levels.push(next);
        }
        Ok(Self { levels })
    }

    pub fn levels(&self) -> &[Image] {
        &self.levels
    }

    pub fn level(&self, n: usize) -> &Image {
        &self.levels[n]
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_survives_reduce_and_expand() {
        let img = Image::filled(16, 8, 3, 0.4);
        let r = reduce(&img).unwrap();
        assert_eq!(r.dims(), (8, 4));
        assert!(r.data().iter().all(|&v| (v - 0.4).abs() < 1e-15));
        let e = expand(&r);
        assert_eq!(e.dims(), (16, 8));
        assert!(e.data().iter().all(|&v| (v - 0.4).abs() < 1e-15));
    }

    #[test]
    fn linear_ramp_is_reproduced_by_expand_in_interior() {
        let coarse = Image::from_fn(8, 8, 1, |x, _, _| x as f64);
        let fine = expand(&coarse);
        for x in 2..13 {
            assert!((fine.get(x, 4, 0) - x as f64 / 2.0).abs() < 1e-12, "x={x}");
        }
    }

    #[test]
    fn pyramid_shapes() {
        let p = ImagePyramid::build(&Image::filled(64, 32, 1, 0.0), 3).unwrap();
        assert_eq!(p.depth(), 3);
        assert_eq!(p.level(3).dims(), (8, 4));
        assert_eq!(p.level(0), &Image::filled(64, 32, 1, 0.0));
        assert!(ImagePyramid::build(&Image::filled(20, 20, 1, 0.0), 3).is_err());
    }
}
