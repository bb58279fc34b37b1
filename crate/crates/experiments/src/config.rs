//! Declarative experiment description, read from TOML.

use std::path::{Path, PathBuf};

use rsw_core::diagnostics::{NormSpec, RecordOptions, MAX_VF_ORDER};
use rsw_core::integrate::{Formulation, IntegratorConfig, StepSize};
use rsw_core::rsw::{Dynamics, Profile};
use rsw_core::spectral::{make_grid, Grid};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::ExperimentError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub grid: GridConfig,
    pub data: DataConfig,
    #[serde(default)]
    pub integrator: IntegratorSection,
    #[serde(default)]
    pub diagnostics: DiagnosticsConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
    pub box_length: f64,
    #[serde(default = "default_dealias")]
    pub dealias_fraction: f64,
}

fn default_dealias() -> f64 {
    2.0 / 3.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataConfig {
    pub delta: f64,
    #[serde(default)]
    pub epsilon: f64,
    #[serde(default = "default_width")]
    pub profile_width: f64,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_width() -> f64 {
    Profile::default().width
}

fn default_seed() -> u64 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegratorSection {
    pub cfl_number: Option<f64>,
    pub dt: Option<f64>,
    pub t_end: f64,
    pub checkpoint_interval: f64,
    pub blowup_threshold: f64,
    pub formulation: Formulation,
}

impl Default for IntegratorSection {
    fn default() -> Self {
        let d = IntegratorConfig::default();
        Self {
            cfl_number: None,
            dt: None,
            t_end: d.t_end,
            checkpoint_interval: d.checkpoint_interval,
            blowup_threshold: d.blowup_threshold,
            formulation: d.formulation,
        }
    }
}

/// Bounds of the fit window; a missing bound is chosen automatically.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitWindowConfig {
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LifespanConfig {
    pub epsilons: Vec<f64>,
    /// Lifespan is the first time `e(t)` exceeds `threshold_factor · e(0)`.
    pub threshold_factor: f64,
}

impl Default for LifespanConfig {
    fn default() -> Self {
        Self {
            epsilons: vec![1e-2, 5.6e-3, 3.2e-3, 1.8e-3, 1e-3],
            threshold_factor: 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiagnosticsConfig {
    pub norms: Vec<NormSpec>,
    pub vf_max_order: usize,
    pub fit_window: FitWindowConfig,
    /// Matching time of the free solution.
    pub scatter_time: f64,
    /// Sobolev order `l` of the scattering comparison.
    pub scatter_order: f64,
    pub lifespan: LifespanConfig,
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        let r = RecordOptions::default();
        Self {
            norms: r.norms,
            vf_max_order: r.vf_max_order,
            fit_window: FitWindowConfig::default(),
            scatter_time: 10.0,
            scatter_order: 2.0,
            lifespan: LifespanConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub directory: PathBuf,
    pub formats: Vec<OutputFormat>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            directory: PathBuf::from("out"),
            formats: vec![OutputFormat::Csv, OutputFormat::Json],
        }
    }
}

impl OutputConfig {
    pub fn wants(&self, f: OutputFormat) -> bool {
        self.formats.contains(&f)
    }
}

impl ExperimentConfig {
    /// Smallest valid config: a grid and the data size.
    pub fn minimal(n: usize, box_length: f64, delta: f64) -> Self {
        Self {
            grid: GridConfig {
                n,
                box_length,
                dealias_fraction: default_dealias(),
            },
            data: DataConfig {
                delta,
                epsilon: 0.0,
                profile_width: default_width(),
                seed: default_seed(),
            },
            integrator: IntegratorSection::default(),
            diagnostics: DiagnosticsConfig::default(),
            output: OutputConfig::default(),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self, ExperimentError> {
        let cfg: Self = toml::from_str(text).map_err(|e| ExperimentError::Config(e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |m: String| Err(ExperimentError::Config(m));
        self.grid()?;
        let d = &self.data;
        if !(d.delta >= 0.0 && d.delta.is_finite()) {
            return bad(format!("data.delta must be a nonnegative number, got {}", d.delta));
        }
        if !(d.epsilon >= 0.0 && d.epsilon.is_finite()) {
            return bad(format!("data.epsilon must be a nonnegative number, got {}", d.epsilon));
        }
        if !(d.profile_width > 0.0) {
            return bad(format!("data.profile_width must be positive, got {}", d.profile_width));
        }
        if self.integrator.cfl_number.is_some() && self.integrator.dt.is_some() {
            return bad("integrator.cfl_number and integrator.dt are mutually exclusive".into());
        }
        self.integrator_config(Dynamics::Nonlinear)
            .validate()
            .map_err(|e| ExperimentError::Config(format!("integrator: {e}")))?;
        let diag = &self.diagnostics;
        for n in &diag.norms {
            n.validate().map_err(|e| ExperimentError::Config(format!("diagnostics.norms: {e}")))?;
        }
        if diag.vf_max_order > MAX_VF_ORDER {
            return bad(format!(
                "diagnostics.vf_max_order must be at most {MAX_VF_ORDER}, got {}",
                diag.vf_max_order
            ));
        }
        if let (Some(a), Some(b)) = (diag.fit_window.t_min, diag.fit_window.t_max) {
            if !(a < b) {
                return bad(format!("diagnostics.fit_window: t_min {a} must be below t_max {b}"));
            }
        }
        if !(diag.scatter_time >= 0.0) {
            return bad(format!("diagnostics.scatter_time must be nonnegative, got {}", diag.scatter_time));
        }
        if !(diag.scatter_order >= 1.0) {
            return bad(format!("diagnostics.scatter_order must be at least 1, got {}", diag.scatter_order));
        }
        if !(diag.lifespan.threshold_factor > 1.0) {
            return bad(format!(
                "diagnostics.lifespan.threshold_factor must exceed 1, got {}",
                diag.lifespan.threshold_factor
            ));
        }
        if self.output.formats.is_empty() {
            return bad("output.formats must name at least one format".into());
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid, ExperimentError> {
        let g = &self.grid;
        make_grid(g.n, g.box_length, g.dealias_fraction).map_err(|e| ExperimentError::Config(format!("grid: {e}")))
    }

    pub fn profile(&self) -> Profile {
        Profile {
            width: self.data.profile_width,
        }
    }

    pub fn integrator_config(&self, dynamics: Dynamics) -> IntegratorConfig {
        let s = &self.integrator;
        let step = match (s.dt, s.cfl_number) {
            (Some(dt), _) => StepSize::Fixed(dt),
            (None, Some(c)) => StepSize::Cfl(c),
            (None, None) => IntegratorConfig::default().step,
        };
        IntegratorConfig {
            step,
            t_end: s.t_end,
            checkpoint_interval: s.checkpoint_interval,
            blowup_threshold: s.blowup_threshold,
            formulation: s.formulation,
            dynamics,
        }
    }

    pub fn record_options(&self) -> RecordOptions {
        RecordOptions {
            norms: self.diagnostics.norms.clone(),
            vf_max_order: self.diagnostics.vf_max_order,
        }
    }

    /// SHA-256 of the canonical TOML serialization.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_toml_string().as_bytes()))
    }
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, ExperimentError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ExperimentError::Config(format!("cannot read {}: {e}", path.display())))?;
    ExperimentConfig::from_toml_str(&text)
}
