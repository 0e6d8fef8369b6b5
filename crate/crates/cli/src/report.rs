//! Serializable reports and the plain-text tables printed by the CLI.
//! Files stay in SI units; the text tables use cm, mm and N.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use smc_atmd_core::lqr::{EquivalentPoles, LqrResult};
use smc_atmd_core::sim::{ReachingReport, TraceSummary};
use smc_atmd_core::{
    Accelerogram, Bounds, BrysonMaxima, BuildingModel, LqrSpec, ModalModel, PlantStateSpace, PoleSpec, SlidingDesign,
    TuningResult,
};

fn rows<const R: usize, const C: usize>(m: &nalgebra::SMatrix<f64, R, C>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn dyn_rows(m: &nalgebra::DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn array4(v: &nalgebra::Vector4<f64>) -> [f64; 4] {
    [v[0], v[1], v[2], v[3]]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuildingReport {
    pub mass: Vec<Vec<f64>>,
    pub stiffness: Vec<Vec<f64>>,
    pub damping: Vec<Vec<f64>>,
    /// rad/s, ascending.
    pub natural_frequencies: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantReport {
    pub a: Vec<Vec<f64>>,
    pub b: [f64; 4],
    pub d: [f64; 4],
    pub bounds: Bounds,
    pub friction: f64,
}

impl From<&PlantStateSpace> for PlantReport {
    fn from(p: &PlantStateSpace) -> Self {
        Self {
            a: rows(&p.a),
            b: array4(&p.b),
            d: array4(&p.d),
            bounds: p.bounds,
            friction: p.friction,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelReport {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub building: Option<BuildingReport>,
    pub modal: ModalModel,
    pub plant: PlantReport,
}

impl ModelReport {
    pub fn new(
        name: &str,
        building: Option<&BuildingModel>,
        natural_frequencies: Option<Vec<f64>>,
        modal: &ModalModel,
        plant: &PlantStateSpace,
    ) -> Self {
        Self {
            name: name.to_owned(),
            building: building.map(|b| BuildingReport {
                mass: dyn_rows(&b.mass),
                stiffness: dyn_rows(&b.stiffness),
                damping: dyn_rows(&b.damping),
                natural_frequencies: natural_frequencies.unwrap_or_default(),
            }),
            modal: modal.clone(),
            plant: plant.into(),
        }
    }

    pub fn table(&self) -> String {
        let m = &self.modal;
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.name);
        if let Some(b) = &self.building {
            let _ = writeln!(out, "  stories            {}", b.mass.len());
            let freqs: Vec<String> = b.natural_frequencies.iter().map(|w| format!("{w:.3}")).collect();
            let _ = writeln!(out, "  ω (rad/s)          {}", freqs.join(", "));
        }
        let _ = writeln!(out, "  m0 (kg)            {:.3}", m.m0);
        let _ = writeln!(out, "  c0 (N·s/m)         {:.4}", m.c0);
        let _ = writeln!(out, "  k0 (N/m)           {:.2}", m.k0);
        let _ = writeln!(out, "  β0                 {:.4}", m.beta0);
        let _ = writeln!(out, "  ω0 (rad/s)         {:.4}", m.omega0);
        out
    }
}

/// The selected sliding mode controller.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignReport {
    pub poles: PoleSpec,
    pub sliding_poles: [Complex64; 3],
    pub eta: [f64; 4],
    pub k_gain: [f64; 4],
    pub alpha1: f64,
    pub alpha2: f64,
    pub switching_gain: f64,
    pub epsilon: f64,
}

impl From<&SlidingDesign> for DesignReport {
    fn from(d: &SlidingDesign) -> Self {
        let s = &d.surface;
        Self {
            poles: s.poles,
            sliding_poles: s.poles.sliding_poles(),
            eta: array4(&s.eta),
            k_gain: array4(&s.k_gain),
            alpha1: s.reduced.alpha1,
            alpha2: s.reduced.alpha2,
            switching_gain: d.switching_gain,
            epsilon: d.epsilon,
        }
    }
}

fn index_label(r: &TuningResult) -> &'static str {
    match r.index {
        smc_atmd_core::PerformanceIndex::Jz2 => "J_z2",
        smc_atmd_core::PerformanceIndex::Ju => "J_u",
    }
}

/// Selected tuples, one line each, in cm / mm / cm/s / N.
pub fn tuning_table(results: &[&TuningResult]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<5} {:>5} {:>8} {:<34} {:>7} {:>7} {:>8} {:>6} {:>16} {:>8} {:>9} {:>8} {:>7}",
        "PI", "ζ", "ωn/ω0", "η", "κ1 cm", "κ2 mm", "κ3 cm/s", "κu N", "λ1,2", "λ3", "ψ1", "ψ2", "M0 N"
    );
    for r in results {
        let b = &r.best;
        let eta = format!("[{:.2}, {:.2}, {:.2}, {:.2}]", b.eta[0], b.eta[1], b.eta[2], b.eta[3]);
        let pair = format!("{:.2}±{:.2}j", b.lambda1.re, b.lambda1.im.abs());
        let _ = writeln!(
            out,
            "{:<5} {:>5.2} {:>8.2} {:<34} {:>7.2} {:>7.2} {:>8.2} {:>6.2} {:>16} {:>8.2} {:>9.2} {:>8.2} {:>7.2}",
            index_label(r),
            b.zeta,
            b.omega_ratio,
            eta,
            b.kappa1 * 100.0,
            b.kappa2 * 1000.0,
            b.kappa3 * 100.0,
            b.kappa_u,
            pair,
            b.lambda3,
            b.psi1,
            b.psi2,
            r.switching_gain
        );
    }
    for r in results {
        let _ = writeln!(
            out,
            "{}: {} of {} grid points feasible; ζ ∈ [{:.2}, {:.2}], ωn/ω0 ∈ [{:.2}, {:.2}]",
            index_label(r),
            r.feasible_count,
            r.evaluated_count,
            r.feasible_zeta_range[0],
            r.feasible_zeta_range[1],
            r.feasible_omega_range[0],
            r.feasible_omega_range[1]
        );
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LqrReport {
    pub name: String,
    pub maxima: BrysonMaxima,
    pub weights: LqrSpec,
    pub k_gain: [f64; 4],
    pub p: Vec<Vec<f64>>,
    pub closed_loop_eigs: [Complex64; 4],
    pub residual: f64,
    pub iterations: usize,
    pub equivalent: EquivalentPoles,
}

impl LqrReport {
    pub fn new(name: &str, maxima: BrysonMaxima, weights: LqrSpec, r: &LqrResult, eq: EquivalentPoles) -> Self {
        Self {
            name: name.to_owned(),
            maxima,
            weights,
            k_gain: array4(&r.k_gain),
            p: rows(&r.p),
            closed_loop_eigs: r.closed_loop_eigs,
            residual: r.residual,
            iterations: r.iterations,
            equivalent: eq,
        }
    }

    pub fn table(&self) -> String {
        let mut out = String::new();
        let q = &self.weights.q;
        let _ = writeln!(
            out,
            "Q = diag({:.2}, {:.2}, {:.2}, {:.2}), r = {}",
            q[0], q[1], q[2], q[3], self.weights.r
        );
        let k = &self.k_gain;
        let _ = writeln!(out, "k_J = [{:.2}, {:.2}, {:.2}, {:.2}]", k[0], k[1], k[2], k[3]);
        let eigs: Vec<String> = self
            .closed_loop_eigs
            .iter()
            .map(|l| {
                if l.im == 0.0 {
                    format!("{:.2}", l.re)
                } else {
                    format!("{:.2}{:+.2}j", l.re, l.im)
                }
            })
            .collect();
        let _ = writeln!(out, "closed-loop eigenvalues: {}", eigs.join(", "));
        let _ = writeln!(
            out,
            "equivalent ζ = {:.3}, ωn = {:.3}ω0; Riccati residual {:.2e} after {} iterations",
            self.equivalent.zeta, self.equivalent.omega_ratio, self.residual, self.iterations
        );
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuakeInfo {
    pub label: String,
    pub dt: f64,
    pub samples: usize,
    pub duration: f64,
    pub pga: f64,
}

impl From<&Accelerogram> for QuakeInfo {
    fn from(q: &Accelerogram) -> Self {
        Self {
            label: q.label.clone(),
            dt: q.dt,
            samples: q.samples.len(),
            duration: q.duration(),
            pga: q.pga(),
        }
    }
}

/// Band RMS value over simulated RMS for each of z1, z2, z3 and u.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KappaRatios {
    pub z1: f64,
    pub z2: f64,
    pub z3: f64,
    pub u: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub controller: String,
    pub summary: TraceSummary,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reaching: Option<ReachingReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub switching_gain: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa_over_rms: Option<KappaRatios>,
    /// Passive z2 peak divided by this run's z2 peak.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z2_peak_reduction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub name: String,
    pub quake: QuakeInfo,
    pub window: [f64; 2],
    pub runs: Vec<RunReport>,
}

impl SimulationReport {
    /// Rows in the order of `runs`: RMS and peak of z1 (cm), z2 (mm),
    /// z3 and z4 (cm/s) and u (N).
    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{} | {} (pga {:.3} m/s²) | window [{}, {}] s",
            self.name, self.quake.label, self.quake.pga, self.window[0], self.window[1]
        );
        let _ = writeln!(
            out,
            "{:<10} {:>9} {:>9} {:>9} {:>9} {:>10} {:>10} {:>10} {:>10} {:>8} {:>8}",
            "", "z1 rms", "z1 peak", "z2 rms", "z2 peak", "z3 rms", "z3 peak", "z4 rms", "z4 peak", "u rms", "u peak"
        );
        let _ = writeln!(
            out,
            "{:<10} {:>9} {:>9} {:>9} {:>9} {:>10} {:>10} {:>10} {:>10} {:>8} {:>8}",
            "", "cm", "cm", "mm", "mm", "cm/s", "cm/s", "cm/s", "cm/s", "N", "N"
        );
        for r in &self.runs {
            let s = &r.summary;
            let _ = writeln!(
                out,
                "{:<10} {:>9.3} {:>9.3} {:>9.3} {:>9.3} {:>10.3} {:>10.3} {:>10.3} {:>10.3} {:>8.3} {:>8.3}",
                r.controller,
                s.z1.rms * 100.0,
                s.z1.peak * 100.0,
                s.z2.rms * 1000.0,
                s.z2.peak * 1000.0,
                s.z3.rms * 100.0,
                s.z3.peak * 100.0,
                s.z4.rms * 100.0,
                s.z4.peak * 100.0,
                s.u.rms,
                s.u.peak
            );
        }
        for r in &self.runs {
            if let Some(k) = r.z2_peak_reduction {
                let _ = writeln!(out, "{}: passive/controlled z2 peak = {:.2}", r.controller, k);
            }
            if let Some(k) = &r.kappa_over_rms {
                let _ = writeln!(
                    out,
                    "{}: κ/rms = {:.2} (z1), {:.2} (z2), {:.2} (z3), {:.2} (u)",
                    r.controller, k.z1, k.z2, k.z3, k.u
                );
            }
            if let Some(rc) = &r.reaching {
                let _ = writeln!(
                    out,
                    "{}: {:.1}% of samples inside the boundary layer",
                    r.controller,
                    rc.inside_fraction * 100.0
                );
            }
        }
        out
    }
}
