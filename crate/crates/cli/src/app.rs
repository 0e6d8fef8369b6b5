//! Argument parsing and subcommand dispatch.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use smc_atmd_core::{BrysonMaxima, PerformanceIndex, PoleSpec, SlidingSurface, TuningConfig};

use crate::commands::{self, QuakeSource, Scenario};
use crate::config::Project;
use crate::error::{CliError, Result};
use crate::io::{self, Outputs};
use crate::report::{tuning_table, DesignReport};
use crate::synth::{synthesize, SynthParams};

#[derive(Debug, Parser)]
#[command(
    name = "smc-atmd",
    version,
    about = "Sliding mode ATMD design, tuning and simulation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IndexArg {
    Jz2,
    Ju,
}

impl From<IndexArg> for PerformanceIndex {
    fn from(i: IndexArg) -> Self {
        match i {
            IndexArg::Jz2 => PerformanceIndex::Jz2,
            IndexArg::Ju => PerformanceIndex::Ju,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ControllerArg {
    Passive,
    Smc,
    Lqr,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Project configuration (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; nothing is written when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct TuneArgs {
    /// Performance index; defaults to the configuration's.
    #[arg(long, value_enum)]
    pub index: Option<IndexArg>,
    /// Tuning parameters (JSON) replacing the configuration's `tuning` section.
    #[arg(long)]
    pub tuning: Option<PathBuf>,
    /// Scan the grid on a single thread.
    #[arg(long)]
    pub serial: bool,
}

#[derive(Debug, Clone, Args)]
pub struct QuakeArgs {
    /// Accelerogram CSV; defaults to the configuration's `simulation.quake`.
    #[arg(long)]
    pub quake: Option<PathBuf>,
    /// Rescale the record to this peak ground acceleration (m/s²).
    #[arg(long)]
    pub pga: Option<f64>,
    /// Multiply the record by this factor.
    #[arg(long)]
    pub scale: Option<f64>,
    /// Integration and resampling step (s).
    #[arg(long)]
    pub dt: Option<f64>,
    /// Final simulated time (s).
    #[arg(long)]
    pub t_end: Option<f64>,
    /// Summary window `a,b` in seconds.
    #[arg(long, value_parser = parse_window)]
    pub window: Option<[f64; 2]>,
}

fn parse_window(s: &str) -> std::result::Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err("expected two comma-separated times".into());
    }
    let a = parts[0].trim().parse::<f64>().map_err(|e| e.to_string())?;
    let b = parts[1].trim().parse::<f64>().map_err(|e| e.to_string())?;
    if !(b > a) {
        return Err("window end must exceed its start".into());
    }
    Ok([a, b])
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Modal reduction and coupled state-space model.
    Model {
        #[command(flatten)]
        common: Common,
    },
    /// Grid search for the sliding surface; writes result.json, mesh.csv and design.json.
    Tune {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        tune: TuneArgs,
    },
    /// LQR gain with Bryson weights; writes lqr.json.
    Lqr {
        #[command(flatten)]
        common: Common,
        /// Maxima (JSON) replacing the configuration's `lqr_maxima` section.
        #[arg(long)]
        maxima: Option<PathBuf>,
    },
    /// Magnitude responses of the sliding motion; writes freq.csv.
    Freq {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        tune: TuneArgs,
        /// Use this damping ratio instead of the tuned one (needs --omega-ratio).
        #[arg(long, requires = "omega_ratio")]
        zeta: Option<f64>,
        /// Use this ωn/ω0 instead of the tuned one (needs --zeta).
        #[arg(long, requires = "zeta")]
        omega_ratio: Option<f64>,
    },
    /// One closed-loop run; writes trace.csv and summary.json.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "smc")]
        controller: ControllerArg,
        #[command(flatten)]
        tune: TuneArgs,
        #[command(flatten)]
        quake: QuakeArgs,
    },
    /// Passive, both SMC designs and (when configured) LQR on the same record.
    Compare {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        quake: QuakeArgs,
        #[arg(long)]
        serial: bool,
        /// Also write one trace CSV per controller.
        #[arg(long)]
        traces: bool,
    },
    /// Generate a synthetic accelerogram CSV.
    Synth {
        /// Output CSV file.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1940)]
        seed: u64,
        #[arg(long, default_value_t = 30.0)]
        duration: f64,
        #[arg(long, default_value_t = 0.02)]
        dt: f64,
        #[arg(long, default_value_t = 0.5)]
        pga: f64,
    },
}

fn load_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::parse(path, e.to_string()))
}

fn tuning_for(project: &Project, args: &TuneArgs) -> Result<TuningConfig> {
    let mut cfg = match &args.tuning {
        Some(p) => {
            let cfg: TuningConfig = load_json(p)?;
            cfg.validate()?;
            cfg
        }
        None => project.config.tuning_config(),
    };
    if let Some(i) = args.index {
        cfg.index = i.into();
    }
    Ok(cfg)
}

fn out_path(common: &Common, name: &str) -> Option<PathBuf> {
    common.out.as_ref().map(|d| d.join(name))
}

/// Runs one command, printing the report to `stdout`. Files are written only
/// after every computation has succeeded. Returns the written paths.
pub fn execute(cli: Cli, stdout: &mut dyn Write) -> Result<Vec<PathBuf>> {
    let mut outputs = Outputs::default();
    let text: String;
    match cli.command {
        Command::Model { common } => {
            let project = Project::load(&common.config)?;
            let report = commands::model_report(&project)?;
            text = report.table();
            if let Some(p) = out_path(&common, "model.json") {
                outputs.json(p, &report)?;
            }
        }
        Command::Tune { common, tune } => {
            let project = Project::load(&common.config)?;
            let cfg = tuning_for(&project, &tune)?;
            let result = commands::tune(&project, &cfg, !tune.serial)?;
            let design = commands::smc_design(&project, &result)?;
            text = tuning_table(&[&result]);
            if let Some(dir) = &common.out {
                outputs.json(dir.join("result.json"), &result)?;
                outputs.add(dir.join("mesh.csv"), io::mesh_csv(&result));
                outputs.json(dir.join("design.json"), &DesignReport::from(&design))?;
            }
        }
        Command::Lqr { common, maxima } => {
            let project = Project::load(&common.config)?;
            let override_maxima: Option<BrysonMaxima> = maxima.as_deref().map(load_json).transpose()?;
            let maxima = commands::lqr_maxima(&project, override_maxima)?;
            let report = commands::lqr_report(&project, maxima)?;
            text = report.table();
            if let Some(p) = out_path(&common, "lqr.json") {
                outputs.json(p, &report)?;
            }
        }
        Command::Freq {
            common,
            tune,
            zeta,
            omega_ratio,
        } => {
            let project = Project::load(&common.config)?;
            let cfg = tuning_for(&project, &tune)?;
            let poles = match (zeta, omega_ratio) {
                (Some(z), Some(r)) => PoleSpec::from_tuning(z, r * project.modal.omega0)?,
                _ => commands::tune(&project, &cfg, !tune.serial)?.best.pole_spec()?,
            };
            let surface = SlidingSurface::synthesize(&project.plant, poles)?;
            let rows = commands::frequency_rows(&project, &surface, &cfg)?;
            let set = smc_atmd_core::freq::build_transfer_functions(&surface)?;
            let m = smc_atmd_core::freq::band_metrics(&set, project.plant.bounds.delta, cfg.band, cfg.n_samples)?;
            text = format!(
                "ζ = {:.2}, ωn = {:.3} rad/s: κ1 = {:.3} cm, κ2 = {:.3} mm, κ3 = {:.3} cm/s, κu = {:.3} N, χ = {:.3} N\n",
                poles.zeta,
                poles.omega_n,
                m.kappa1 * 100.0,
                m.kappa2 * 1000.0,
                m.kappa3 * 100.0,
                m.kappa_u,
                m.chi
            );
            if let Some(p) = out_path(&common, "freq.csv") {
                outputs.add(p, io::frequency_csv(&rows));
            }
        }
        Command::Simulate {
            common,
            controller,
            tune,
            quake,
        } => {
            let project = Project::load(&common.config)?;
            let source = QuakeSource::resolve(&project, quake.quake.clone(), quake.pga, quake.scale, quake.dt)?;
            let record = source.load()?;
            let scenario = match controller {
                ControllerArg::Passive => commands::passive_scenario(),
                ControllerArg::Smc => commands::smc_scenario(&project, &tuning_for(&project, &tune)?, !tune.serial)?,
                ControllerArg::Lqr => commands::lqr_scenario(&project, commands::lqr_maxima(&project, None)?)?,
            };
            let t_end = commands::resolve_t_end(&project, quake.t_end, &record);
            let window = commands::resolve_window(&project, quake.window, &record, t_end);
            let (report, traces) = commands::run_scenarios(&project, &[scenario], &record, t_end, window)?;
            text = report.table();
            if let Some(dir) = &common.out {
                outputs.add(dir.join("trace.csv"), io::trace_csv(&traces[0]));
                outputs.json(dir.join("summary.json"), &report)?;
            }
        }
        Command::Compare {
            common,
            quake,
            serial,
            traces: write_traces,
        } => {
            let project = Project::load(&common.config)?;
            let source = QuakeSource::resolve(&project, quake.quake.clone(), quake.pga, quake.scale, quake.dt)?;
            let record = source.load()?;
            let base = project.config.tuning_config();
            let mut scenarios: Vec<Scenario> = vec![commands::passive_scenario()];
            for index in [PerformanceIndex::Jz2, PerformanceIndex::Ju] {
                let cfg = TuningConfig { index, ..base.clone() };
                scenarios.push(commands::smc_scenario(&project, &cfg, !serial)?);
            }
            if let Some(m) = project.config.lqr_maxima {
                scenarios.push(commands::lqr_scenario(&project, m)?);
            }
            let t_end = commands::resolve_t_end(&project, quake.t_end, &record);
            let window = commands::resolve_window(&project, quake.window, &record, t_end);
            let (report, traces) = commands::run_scenarios(&project, &scenarios, &record, t_end, window)?;
            text = report.table();
            if let Some(dir) = &common.out {
                outputs.json(dir.join("summary.json"), &report)?;
                if write_traces {
                    for (s, tr) in scenarios.iter().zip(&traces) {
                        let name = format!("trace_{}.csv", s.label.to_lowercase().replace('-', "_"));
                        outputs.add(dir.join(name), io::trace_csv(tr));
                    }
                }
            }
        }
        Command::Synth {
            out,
            seed,
            duration,
            dt,
            pga,
        } => {
            let params = SynthParams {
                seed,
                duration,
                dt,
                pga,
                ..SynthParams::default()
            };
            let quake = synthesize(&params)?;
            text = format!(
                "{}: {} samples at {} s, pga {} m/s²\n",
                quake.label,
                quake.samples.len(),
                quake.dt,
                quake.pga()
            );
            outputs.add(out, io::accelerogram_csv(&quake));
        }
    }
    let written = outputs.commit()?;
    let _ = stdout.write_all(text.as_bytes());
    for p in &written {
        let _ = writeln!(stdout, "wrote {}", p.display());
    }
    Ok(written)
}
