//! Declarative descriptions of reactions and fluxes, as read from config files.

use serde::{Deserialize, Serialize};

use crate::diffusion::SaturatingFlux;
use crate::error::Result;
use crate::reaction::BistableReaction;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ReactionSpec {
    /// `f(s) = s (1 - s) (s - a)`.
    Cubic { a: f64 },
    /// Piecewise-linear table of `(s, f(s))` with interior zero `alpha`.
    Table { alpha: f64, samples: Vec<(f64, f64)> },
}

impl Default for ReactionSpec {
    fn default() -> Self {
        ReactionSpec::Cubic { a: 0.4 }
    }
}

impl ReactionSpec {
    pub fn build(&self) -> Result<BistableReaction> {
        match self {
            ReactionSpec::Cubic { a } => BistableReaction::cubic(*a),
            ReactionSpec::Table { alpha, samples } => BistableReaction::from_table(samples, *alpha),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum FluxSpec {
    #[default]
    MeanCurvature,
    Power { m: f64, delta: f64 },
}

impl FluxSpec {
    pub fn build(&self) -> Result<SaturatingFlux> {
        match *self {
            FluxSpec::MeanCurvature => Ok(SaturatingFlux::mean_curvature()),
            FluxSpec::Power { m, delta } => SaturatingFlux::power(m, delta),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn specs_round_trip_through_json() {
        let r: ReactionSpec = serde_json::from_str(r#"{"type": "cubic", "a": 0.4}"#).unwrap();
        assert_eq!(r, ReactionSpec::Cubic { a: 0.4 });
        assert!((r.build().unwrap().eps_bar() - 32.0 / 3750.0).abs() < 1e-12);
        let f: FluxSpec = serde_json::from_str(r#"{"type": "power", "m": 2, "delta": 1}"#).unwrap();
        assert_eq!(f, FluxSpec::Power { m: 2.0, delta: 1.0 });
        assert!(f.build().is_ok());
        let t: ReactionSpec =
            serde_json::from_str(r#"{"type": "table", "alpha": 0.5, "samples": [[0, 0], [0.25, -0.1], [0.5, 0], [0.75, 0.1], [1, 0]]}"#)
                .unwrap();
        assert!(t.build().is_ok());
        assert!(serde_json::from_str::<ReactionSpec>(r#"{"type": "cubic", "b": 1}"#).is_err());
    }
}
