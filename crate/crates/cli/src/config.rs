//! Project configuration: the building, the damper, bounds and the optional
//! tuning, LQR and simulation sections, all in SI units.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use smc_atmd_core::structure::{assemble_plant, build_shear_building, modal_reduce};
use smc_atmd_core::{
    AtmdParams, Bounds, BrysonMaxima, BuildingModel, DampingSpec, ModalModel, PlantStateSpace, TuningConfig,
};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Floor {
    pub mass: f64,
    pub stiffness: f64,
}

/// Modal parameters given directly, for rigs identified as a single mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModalParams {
    pub m0: f64,
    pub c0: f64,
    pub k0: f64,
    #[serde(default = "one")]
    pub beta0: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSettings {
    /// Accelerogram file, relative to the configuration file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quake: Option<PathBuf>,
    /// Target peak ground acceleration (m/s²); the record is rescaled to it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pga: Option<f64>,
    /// Plain amplitude factor, used when no `pga` is given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    #[serde(default = "default_dt")]
    pub dt: f64,
    /// Summary window `[t_a, t_b]` (s).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<[f64; 2]>,
    /// Final time (s); defaults to the end of the record.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
}

fn default_dt() -> f64 {
    0.001
}

impl Default for SimulationSettings {
    fn default() -> Self {
        Self {
            quake: None,
            pga: None,
            scale: None,
            dt: default_dt(),
            window: None,
            t_end: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectConfig {
    #[serde(default)]
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub floors: Option<Vec<Floor>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub damping: Option<DampingSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modal: Option<ModalParams>,
    /// Replaces the participation factor obtained from the mode shape.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta0_override: Option<f64>,
    pub atmd: AtmdParams,
    pub bounds: Bounds,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tuning: Option<TuningConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lqr_maxima: Option<BrysonMaxima>,
    #[serde(default)]
    pub simulation: SimulationSettings,
}

/// Everything derived from a configuration before any design step.
#[derive(Debug, Clone)]
pub struct Project {
    pub config: ProjectConfig,
    /// File the configuration was read from, if any.
    pub source: Option<PathBuf>,
    pub building: Option<BuildingModel>,
    pub modal: ModalModel,
    pub plant: PlantStateSpace,
}

impl ProjectConfig {
    pub fn from_json(text: &str, origin: &Path) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CliError::parse(origin, e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text, path)
    }

    pub fn tuning_config(&self) -> TuningConfig {
        self.tuning.clone().unwrap_or_default()
    }

    pub fn build(self) -> Result<Project> {
        let (building, mut modal) = match (&self.floors, &self.modal) {
            (Some(floors), None) => {
                let damping = self
                    .damping
                    .as_ref()
                    .ok_or_else(|| CliError::Validation("\"damping\" is required together with \"floors\"".into()))?;
                let masses: Vec<f64> = floors.iter().map(|f| f.mass).collect();
                let stiffnesses: Vec<f64> = floors.iter().map(|f| f.stiffness).collect();
                let building = build_shear_building(&masses, &stiffnesses, damping)?;
                let modal = modal_reduce(&building)?;
                (Some(building), modal)
            }
            (None, Some(m)) => {
                if self.damping.is_some() {
                    return Err(CliError::Validation("\"damping\" only applies to \"floors\"".into()));
                }
                (None, ModalModel::from_parameters(m.m0, m.c0, m.k0, m.beta0)?)
            }
            _ => {
                return Err(CliError::Validation(
                    "exactly one of \"floors\" or \"modal\" must be given".into(),
                ))
            }
        };
        if let Some(beta0) = self.beta0_override {
            if !beta0.is_finite() {
                return Err(CliError::Validation("beta0_override must be finite".into()));
            }
            modal.beta0 = beta0;
        }
        if let Some(t) = &self.tuning {
            t.validate()?;
        }
        let s = &self.simulation;
        if !(s.dt > 0.0) || !s.dt.is_finite() {
            return Err(CliError::Validation("simulation.dt must be positive".into()));
        }
        let plant = assemble_plant(&modal, &self.atmd, self.bounds)?;
        Ok(Project {
            config: self,
            source: None,
            building,
            modal,
            plant,
        })
    }
}

impl Project {
    pub fn load(path: &Path) -> Result<Self> {
        let mut p = ProjectConfig::load(path)?.build()?;
        p.source = Some(path.to_path_buf());
        Ok(p)
    }

    /// Accelerogram named in the configuration, resolved against its location.
    pub fn configured_quake(&self) -> Option<PathBuf> {
        let q = self.config.simulation.quake.as_ref()?;
        Some(match &self.source {
            Some(src) if q.is_relative() => src.parent().unwrap_or(Path::new(".")).join(q),
            _ => q.clone(),
        })
    }
}
