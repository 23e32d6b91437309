//! Image containers, Gaussian pyramids and mask-gated texture synthesis.

mod image;
mod pyramid;
mod synth;

pub use self::image::Image;
pub use pyramid::{expand, reduce, ImagePyramid};
pub use synth::{backward_warp, downsample_mask, synthesize, synthesize_levels, Synthesis, DEFAULT_DEPTH};
