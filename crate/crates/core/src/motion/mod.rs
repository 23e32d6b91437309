//! From animated boundaries to an enhanced inverse motion field and mask.

mod decay;
mod inverse;
mod spread;

pub use decay::{
    builtin_registry, decay, Decay, DecayConfig, DecayFunction, DecayRegistry, LinearDecay, SineDecay,
    DEFAULT_OMEGA_MAX, DEFAULT_OMEGA_MIN,
};
pub use inverse::{
    first_order_fill, invert_field, motion_mask, FillReport, DEFAULT_MAX_STEP, DEFAULT_M_EPS, DEFAULT_W_MIN,
};
pub use spread::{
    locate, make_seeds, spread_and_combine, MotionSeed, SeedSample, DEFAULT_D_TOL, OMEGA_STEPS, TAU_SAMPLES,
};
