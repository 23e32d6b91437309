//! Decay of seed motion as it spreads to scaled copies of its curve.
//!
//! A decay function is a profile over the normalized deviation
//! `u = |ω - 1| / δ(ω)`, where `δ` is the distance from 1 to the active bound.
//! Profiles are registered by name and picked from configuration.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_OMEGA_MIN: f64 = 0.25;
pub const DEFAULT_OMEGA_MAX: f64 = 2.5;

pub trait DecayFunction: Send + Sync {
    fn name(&self) -> &'static str;

    /// Decay for `u ∈ [0, 1]`; must be 1 at `u = 0`, 0 at `u = 1` and
    /// non-increasing in between.
    fn profile(&self, u: f64) -> f64;
}

pub struct LinearDecay;

impl DecayFunction for LinearDecay {
    fn name(&self) -> &'static str {
        "linear"
    }

    fn profile(&self, u: f64) -> f64 {
        (1.0 - u).max(0.0)
    }
}

pub struct SineDecay;

impl DecayFunction for SineDecay {
    fn name(&self) -> &'static str {
        "sine"
    }

    fn profile(&self, u: f64) -> f64 {
        (1.0 + (PI * u.min(1.0)).cos()) / 2.0
    }
}

#[derive(Clone, Default)]
pub struct DecayRegistry {
    entries: BTreeMap<&'static str, Arc<dyn DecayFunction>>,
}

impl DecayRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_builtins() -> Self {
        let mut r = Self::new();
        r.register(Arc::new(LinearDecay));
        r.register(Arc::new(SineDecay));
        r
    }

    /// Adds or replaces the function registered under its name.
    pub fn register(&mut self, f: Arc<dyn DecayFunction>) {
        self.entries.insert(f.name(), f);
    }

    pub fn get(&self, name: &str) -> Option<Arc<dyn DecayFunction>> {
        self.entries.get(name).cloned()
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.entries.keys().copied()
    }
}

impl fmt::Debug for DecayRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.entries.keys()).finish()
    }
}

pub fn builtin_registry() -> &'static DecayRegistry {
    static REGISTRY: OnceLock<DecayRegistry> = OnceLock::new();
    REGISTRY.get_or_init(DecayRegistry::with_builtins)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecayConfig {
    pub kind: String,
    pub omega_min: f64,
    pub omega_max: f64,
}

impl Default for DecayConfig {
    fn default() -> Self {
        Self {
            kind: "linear".into(),
            omega_min: DEFAULT_OMEGA_MIN,
            omega_max: DEFAULT_OMEGA_MAX,
        }
    }
}

impl DecayConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0 < self.omega_min && self.omega_min < 1.0 && 1.0 < self.omega_max)
            || !self.omega_max.is_finite()
        {
            return Err(Error::Validation(format!(
                "decay bounds must satisfy 0 < omega_min < 1 < omega_max, got [{}, {}]",
                self.omega_min, self.omega_max
            )));
        }
        Ok(())
    }

    /// Looks up the configured kind and checks the bounds.
    pub fn resolve(&self, registry: &DecayRegistry) -> Result<Decay> {
        self.validate()?;
        let func = registry.get(&self.kind).ok_or_else(|| {
            let known: Vec<_> = registry.names().collect();
            Error::Validation(format!(
                "unknown decay kind `{}` (registered: {})",
                self.kind,
                known.join(", ")
            ))
        })?;
        Ok(Decay {
            func,
            omega_min: self.omega_min,
            omega_max: self.omega_max,
        })
    }
}

/// A resolved decay function with its scale bounds.
#[derive(Clone)]
pub struct Decay {
    func: Arc<dyn DecayFunction>,
    pub omega_min: f64,
    pub omega_max: f64,
}

impl Decay {
    pub fn name(&self) -> &'static str {
        self.func.name()
    }

    /// λ(ω); zero outside `[omega_min, omega_max]`.
    pub fn factor(&self, omega: f64) -> f64 {
        if omega == 1.0 {
            return 1.0;
        }
        if omega < self.omega_min || omega > self.omega_max {
            return 0.0;
        }
        let reach = if omega > 1.0 {
            self.omega_max - 1.0
        } else {
            1.0 - self.omega_min
        };
        self.func.profile(((omega - 1.0).abs() / reach).min(1.0))
    }
}

impl fmt::Debug for Decay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Decay")
            .field("kind", &self.func.name())
            .field("omega_min", &self.omega_min)
            .field("omega_max", &self.omega_max)
            .finish()
    }
}

/// λ(ω) for a configuration, using the built-in registry.
pub fn decay(omega: f64, cfg: &DecayConfig) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::Domain(format!("scale factor {omega} must be positive")));
    }
    Ok(cfg.resolve(builtin_registry())?.factor(omega))
}
