//! Operations behind each subcommand, usable without going through the CLI.

use std::path::PathBuf;

use rayon::prelude::*;
use smc_atmd_core::freq::{self, ResponseRow};
use smc_atmd_core::lqr::{bryson_weights, lqr_equivalent_polespec, solve_lqr};
use smc_atmd_core::sim::{reaching_check, simulate, summarize};
use smc_atmd_core::structure::natural_modes;
use smc_atmd_core::tuner::{self, collect, design_from_result, evaluate_point, grid, PointOutcome};
use smc_atmd_core::{
    Accelerogram, BrysonMaxima, Controller, PerformanceIndex, SimConfig, SimulationTrace, SlidingDesign,
    SlidingSurface, TuningConfig, TuningResult,
};

use crate::config::Project;
use crate::error::{CliError, Result};
use crate::io::{load_accelerogram, Scaling};
use crate::report::{KappaRatios, LqrReport, ModelReport, QuakeInfo, RunReport, SimulationReport};

pub fn model_report(project: &Project) -> Result<ModelReport> {
    let freqs = match &project.building {
        Some(b) => Some(natural_modes(&b.mass, &b.stiffness)?.0),
        None => None,
    };
    Ok(ModelReport::new(
        &project.config.name,
        project.building.as_ref(),
        freqs,
        &project.modal,
        &project.plant,
    ))
}

pub fn tuning_config(project: &Project, index: Option<PerformanceIndex>) -> TuningConfig {
    let mut cfg = project.config.tuning_config();
    if let Some(i) = index {
        cfg.index = i;
    }
    cfg
}

/// Grid scan with the points spread over the rayon pool. The outcome is
/// identical to the serial scan.
pub fn tune_parallel(project: &Project, cfg: &TuningConfig) -> Result<TuningResult> {
    let points = grid(cfg)?;
    let omega0 = project.modal.omega0;
    let outcomes: Vec<PointOutcome> = points
        .into_par_iter()
        .map(|p| evaluate_point(&project.plant, omega0, cfg, p))
        .collect();
    Ok(collect(&project.plant, omega0, cfg, outcomes)?)
}

pub fn tune(project: &Project, cfg: &TuningConfig, parallel: bool) -> Result<TuningResult> {
    if parallel {
        tune_parallel(project, cfg)
    } else {
        Ok(tuner::tune(&project.plant, &project.modal, cfg)?)
    }
}

pub fn smc_design(project: &Project, result: &TuningResult) -> Result<SlidingDesign> {
    Ok(design_from_result(&project.plant, result)?)
}

pub fn lqr_maxima(project: &Project, override_maxima: Option<BrysonMaxima>) -> Result<BrysonMaxima> {
    override_maxima
        .or(project.config.lqr_maxima)
        .ok_or_else(|| CliError::Validation("no \"lqr_maxima\" section in the configuration".into()))
}

pub fn lqr_report(project: &Project, maxima: BrysonMaxima) -> Result<LqrReport> {
    let spec = bryson_weights(&maxima)?;
    let r = solve_lqr(&project.plant, &spec)?;
    let eq = lqr_equivalent_polespec(&r.closed_loop_eigs, project.modal.omega0)?;
    Ok(LqrReport::new(&project.config.name, maxima, spec, &r, eq))
}

pub fn frequency_rows(project: &Project, surface: &SlidingSurface, cfg: &TuningConfig) -> Result<Vec<ResponseRow>> {
    let set = freq::build_transfer_functions(surface)?;
    Ok(freq::frequency_response(
        &set,
        project.plant.bounds.delta,
        cfg.band,
        cfg.n_samples,
    )?)
}

/// Where the accelerogram comes from and how it is scaled.
#[derive(Debug, Clone, PartialEq)]
pub struct QuakeSource {
    pub path: PathBuf,
    pub scaling: Scaling,
    pub dt: f64,
}

impl QuakeSource {
    /// Command-line values take precedence over the configuration.
    pub fn resolve(
        project: &Project,
        path: Option<PathBuf>,
        pga: Option<f64>,
        scale: Option<f64>,
        dt: Option<f64>,
    ) -> Result<Self> {
        let path = path
            .or_else(|| project.configured_quake())
            .ok_or_else(|| CliError::Validation("an accelerogram is required (--quake)".into()))?;
        let s = &project.config.simulation;
        let scaling = match (pga, scale) {
            (Some(_), Some(_)) => return Err(CliError::Validation("--pga and --scale are exclusive".into())),
            (Some(p), None) => Scaling::Pga(p),
            (None, Some(f)) => Scaling::Factor(f),
            (None, None) => match (s.pga, s.scale) {
                (Some(p), _) => Scaling::Pga(p),
                (None, Some(f)) => Scaling::Factor(f),
                (None, None) => Scaling::None,
            },
        };
        Ok(Self {
            path,
            scaling,
            dt: dt.unwrap_or(s.dt),
        })
    }

    pub fn load(&self) -> Result<Accelerogram> {
        load_accelerogram(&self.path, self.scaling, self.dt)
    }
}

/// One controller to simulate, with the data needed to label and assess it.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub label: String,
    pub controller: Controller,
    pub tuning: Option<TuningResult>,
}

pub fn smc_scenario(project: &Project, cfg: &TuningConfig, parallel: bool) -> Result<Scenario> {
    let result = tune(project, cfg, parallel)?;
    let design = smc_design(project, &result)?;
    let label = match cfg.index {
        PerformanceIndex::Jz2 => "SMC-Jz2",
        PerformanceIndex::Ju => "SMC-Ju",
    };
    Ok(Scenario {
        label: label.into(),
        controller: Controller::Smc(design),
        tuning: Some(result),
    })
}

pub fn lqr_scenario(project: &Project, maxima: BrysonMaxima) -> Result<Scenario> {
    let r = solve_lqr(&project.plant, &bryson_weights(&maxima)?)?;
    Ok(Scenario {
        label: "LQR".into(),
        controller: Controller::StateFeedback(r.k_gain),
        tuning: None,
    })
}

pub fn passive_scenario() -> Scenario {
    Scenario {
        label: "TMD".into(),
        controller: Controller::Passive,
        tuning: None,
    }
}

pub fn resolve_window(project: &Project, window: Option<[f64; 2]>, quake: &Accelerogram, t_end: f64) -> [f64; 2] {
    window
        .or(project.config.simulation.window)
        .unwrap_or([0.0, t_end.min(quake.duration())])
}

pub fn resolve_t_end(project: &Project, t_end: Option<f64>, quake: &Accelerogram) -> f64 {
    t_end
        .or(project.config.simulation.t_end)
        .unwrap_or_else(|| quake.duration())
}

/// Runs every scenario (in parallel) and assembles the comparison report.
pub fn run_scenarios(
    project: &Project,
    scenarios: &[Scenario],
    quake: &Accelerogram,
    t_end: f64,
    window: [f64; 2],
) -> Result<(SimulationReport, Vec<SimulationTrace>)> {
    let cfg = SimConfig::new(t_end);
    let traces: Vec<SimulationTrace> = scenarios
        .par_iter()
        .map(|s| simulate(&project.plant, &s.controller, quake, &cfg))
        .collect::<std::result::Result<_, _>>()?;

    let passive_peak = scenarios
        .iter()
        .zip(&traces)
        .find(|(s, _)| matches!(s.controller, Controller::Passive))
        .map(|(_, t)| summarize(t, window))
        .transpose()?
        .map(|s| s.z2.peak);

    let mut runs = Vec::with_capacity(scenarios.len());
    for (s, tr) in scenarios.iter().zip(&traces) {
        let summary = summarize(tr, window)?;
        let (reaching, switching_gain) = match &s.controller {
            Controller::Smc(d) => (Some(reaching_check(tr, d.epsilon)), Some(d.switching_gain)),
            _ => (None, None),
        };
        // Ratios are omitted when a channel stayed at rest.
        let moving = [summary.z1.rms, summary.z2.rms, summary.z3.rms, summary.u.rms]
            .iter()
            .all(|v| *v > 0.0);
        let kappa_over_rms = s.tuning.as_ref().filter(|_| moving).map(|r| KappaRatios {
            z1: r.best.kappa1 / summary.z1.rms,
            z2: r.best.kappa2 / summary.z2.rms,
            z3: r.best.kappa3 / summary.z3.rms,
            u: r.best.kappa_u / summary.u.rms,
        });
        let z2_peak_reduction = match (&s.controller, passive_peak) {
            (Controller::Passive, _) | (_, None) => None,
            (_, Some(p)) if summary.z2.peak > 0.0 => Some(p / summary.z2.peak),
            _ => None,
        };
        runs.push(RunReport {
            controller: s.label.clone(),
            summary,
            reaching,
            switching_gain,
            kappa_over_rms,
            z2_peak_reduction,
        });
    }
    let report = SimulationReport {
        name: project.config.name.clone(),
        quake: QuakeInfo::from(quake),
        window,
        runs,
    };
    Ok((report, traces))
}
