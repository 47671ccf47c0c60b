//! Run configuration: defaults, overridden by a `--config` file, overridden
//! by command-line flags.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use satfront::{FluxSpec, ProfileOptions, ReactionSpec, ShootOptions};
use serde::{Deserialize, Serialize};

pub const DEFAULT_OUT_DIR: &str = "satfront-out";
pub const OUT_DIR_ENV: &str = "SATFRONT_OUT_DIR";

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Absolute / relative tolerance of the reduced solver.
    pub atol: Option<f64>,
    pub rtol: Option<f64>,
    /// Bisection tolerance for critical speeds.
    pub speed: Option<f64>,
    /// Spacing of profile samples in the arclength-like parameter.
    pub sample_spacing: Option<f64>,
    /// Half-width of the profile window in z.
    pub window: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub reaction: ReactionSpec,
    pub flux: FluxSpec,
    pub tolerances: Tolerances,
    pub out_dir: Option<PathBuf>,
    pub plot: bool,
}

impl RunConfig {
    /// Output directory: the flag, then the config file, then the
    /// environment, then the built-in default.
    pub fn out_dir(&self, flag: Option<&Path>) -> PathBuf {
        flag.map(Path::to_path_buf)
            .or_else(|| self.out_dir.clone())
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Ok(toml::from_str(&text)?)
    }

    /// Options for speeds and trajectories.
    pub fn shoot_options(&self) -> Result<ShootOptions> {
        let mut o = ShootOptions::default();
        if let Some(a) = self.tolerances.atol {
            o.atol = a;
        }
        if let Some(r) = self.tolerances.rtol {
            o.rtol = r;
        }
        anyhow::ensure!(o.atol > 0.0 && o.rtol > 0.0, "tolerances must be positive");
        Ok(o)
    }

    /// Options for profiles; they start from tighter solver tolerances.
    pub fn profile_options(&self) -> Result<ProfileOptions> {
        let mut o = ProfileOptions::default();
        let t = &self.tolerances;
        if let Some(a) = t.atol {
            o.shoot.atol = a;
        }
        if let Some(r) = t.rtol {
            o.shoot.rtol = r;
        }
        if let Some(s) = t.sample_spacing {
            o.sample_spacing = s;
        }
        if let Some(w) = t.window {
            o.window = w;
        }
        for (name, v) in [("atol", o.shoot.atol), ("rtol", o.shoot.rtol), ("sample_spacing", o.sample_spacing), ("window", o.window)] {
            anyhow::ensure!(v > 0.0 && v.is_finite(), "tolerance {name} must be positive, got {v}");
        }
        Ok(o)
    }
}
