use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{DEFAULT_BINS, DEFAULT_BOUNDARY_SAMPLES};
use crate::motion::{
    builtin_registry, Decay, DecayConfig, DEFAULT_D_TOL, DEFAULT_MAX_STEP, DEFAULT_M_EPS, DEFAULT_OMEGA_MAX,
    DEFAULT_OMEGA_MIN, DEFAULT_W_MIN,
};
use crate::shape::{FitLayout, DEFAULT_EPS_DEN};
use crate::warp::DEFAULT_DEPTH;

const MAX_DEPTH: usize = 8;

/// Every tunable of the animation pipeline. Missing fields take defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub decay_kind: String,
    pub omega_min: f64,
    pub omega_max: f64,
    pub fit_order: usize,
    pub fit_segments: usize,
    pub samples_per_branch: usize,
    pub pyramid_depth: usize,
    pub eps_den: f64,
    pub d_tol: f64,
    pub w_min: f64,
    pub m_eps: f64,
    pub max_step: usize,
    pub metric_bins: usize,
    pub boundary_samples: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            decay_kind: "linear".into(),
            omega_min: DEFAULT_OMEGA_MIN,
            omega_max: DEFAULT_OMEGA_MAX,
            fit_order: 5,
            fit_segments: 1,
            samples_per_branch: 64,
            pyramid_depth: DEFAULT_DEPTH,
            eps_den: DEFAULT_EPS_DEN,
            d_tol: DEFAULT_D_TOL,
            w_min: DEFAULT_W_MIN,
            m_eps: DEFAULT_M_EPS,
            max_step: DEFAULT_MAX_STEP,
            metric_bins: DEFAULT_BINS,
            boundary_samples: DEFAULT_BOUNDARY_SAMPLES,
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::Validation(format!(
            "{name} = {v} must be positive and finite"
        )))
    }
}

impl PipelineConfig {
    pub fn decay_config(&self) -> DecayConfig {
        DecayConfig {
            kind: self.decay_kind.clone(),
            omega_min: self.omega_min,
            omega_max: self.omega_max,
        }
    }

    pub fn decay(&self) -> Result<Decay> {
        self.decay_config().resolve(builtin_registry())
    }

    pub fn layout(&self) -> FitLayout {
        FitLayout {
            order: self.fit_order,
            segments: self.fit_segments,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.decay()?;
        if self.fit_order < 1 || self.fit_segments < 1 {
            return Err(Error::Validation(format!(
                "fit_order {} and fit_segments {} must be at least 1",
                self.fit_order, self.fit_segments
            )));
        }
        let controls = self
            .fit_order
            .checked_mul(self.fit_segments)
            .and_then(|n| n.checked_add(1));
        if controls.is_none_or(|n| n > 32) {
            return Err(Error::Validation(format!(
                "fit_order × fit_segments + 1 exceeds 32 controls ({} × {})",
                self.fit_order, self.fit_segments
            )));
        }
        if self.samples_per_branch < 2 {
            return Err(Error::Validation(format!(
                "samples_per_branch {} below 2",
                self.samples_per_branch
            )));
        }
        if self.pyramid_depth > MAX_DEPTH {
            return Err(Error::Validation(format!(
                "pyramid_depth {} above {MAX_DEPTH}",
                self.pyramid_depth
            )));
        }
        positive("eps_den", self.eps_den)?;
        positive("d_tol", self.d_tol)?;
        positive("w_min", self.w_min)?;
        if !(self.m_eps.is_finite() && self.m_eps >= 0.0) {
            return Err(Error::Validation(format!(
                "m_eps {} must be non-negative",
                self.m_eps
            )));
        }
        if !(1..=2).contains(&self.max_step) {
            return Err(Error::Validation(format!(
                "max_step {} must be 1 or 2",
                self.max_step
            )));
        }
        if self.metric_bins < 1 {
            return Err(Error::Validation("metric_bins must be at least 1".into()));
        }
        if self.boundary_samples < 8 {
            return Err(Error::Validation(format!(
                "boundary_samples {} below 8",
                self.boundary_samples
            )));
        }
        Ok(())
    }
}

pub fn parse_config(bytes: &[u8]) -> Result<PipelineConfig> {
    let cfg: PipelineConfig = serde_json::from_slice(bytes)?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn serialize_config(cfg: &PipelineConfig) -> String {
    serde_json::to_string_pretty(cfg).expect("config serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid_and_round_trip() {
        let cfg = PipelineConfig::default();
        cfg.validate().unwrap();
        assert_eq!(parse_config(serialize_config(&cfg).as_bytes()).unwrap(), cfg);
        assert_eq!(parse_config(b"{}").unwrap(), cfg);
    }

    #[test]
    fn partial_and_invalid() {
        let cfg = parse_config(br#"{"decay_kind": "sine", "max_step": 1}"#).unwrap();
        assert_eq!(cfg.decay().unwrap().name(), "sine");
        for bad in [
            r#"{"decay_kind": "cubic"}"#,
            r#"{"omega_min": 1.5}"#,
            r#"{"max_step": 3}"#,
            r#"{"fit_order": 0}"#,
            r#"{"fit_order": 8, "fit_segments": 4}"#,
            r#"{"w_min": 0}"#,
            r#"{"pyramid_depth": 9}"#,
            r#"{"samples_per_branch": 1}"#,
        ] {
            assert!(
                matches!(parse_config(bad.as_bytes()), Err(Error::Validation(_))),
                "{bad}"
            );
        }
        assert!(matches!(
            parse_config(br#"{"depth": 2}"#),
            Err(Error::Parse { .. })
        ));
    }
}
