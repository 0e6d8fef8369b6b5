//! Fixed-step time-domain simulation of the coupled model with Coulomb
//! friction on the damper:
//!
//! ```text
//! ż = A z + B (u − μd·sign(z3)) + D ẍg
//! ```
//!
//! Integration is classical RK4 at the accelerogram sample interval. The
//! control force is computed once per step from the state at the start of the
//! step and held over it; the excitation is interpolated linearly inside it.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use nalgebra::Vector4;

use crate::error::{invalid, Error, Result};
use crate::smc::SlidingDesign;
use crate::structure::PlantStateSpace;

/// States with any component beyond this magnitude are treated as divergent.
const DIVERGENCE_LIMIT: f64 = 1e6;

/// Uniformly sampled ground acceleration (m/s²) starting at `t = 0`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Accelerogram {
    pub dt: f64,
    pub samples: Vec<f64>,
    pub label: String,
}

impl Accelerogram {
    pub fn new(dt: f64, samples: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::Accelerogram(format!("sample interval {dt} must be positive")));
        }
        if samples.is_empty() {
            return Err(Error::Accelerogram("record has no samples".into()));
        }
        if let Some(i) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::Accelerogram(format!("sample {i} is not finite")));
        }
        Ok(Self {
            dt,
            samples,
            label: label.into(),
        })
    }

    /// Record from `(t, a)` pairs, linearly resampled to `dt`. Time is shifted
    /// so that the first sample sits at `t = 0`.
    pub fn from_time_series(times: &[f64], values: &[f64], dt: f64, label: impl Into<String>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::Accelerogram("time and value columns differ in length".into()));
        }
        if times.len() < 2 {
            return Err(Error::Accelerogram("at least two samples are required".into()));
        }
        if let Some(i) = times.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::Accelerogram(format!(
                "time column is not strictly increasing at row {}",
                i + 1
            )));
        }
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::Accelerogram(format!("sample interval {dt} must be positive")));
        }
        let t0 = times[0];
        let span = times[times.len() - 1] - t0;
        let count = libm::floor(span / dt + 1e-9) as usize + 1;
        let mut j = 0;
        let samples = (0..count)
            .map(|k| {
                let t = t0 + k as f64 * dt;
                while j + 2 < times.len() && times[j + 1] <= t {
                    j += 1;
                }
                interpolate(times[j], values[j], times[j + 1], values[j + 1], t)
            })
            .collect();
        Self::new(dt, samples, label)
    }

    /// Duration covered by the samples (s).
    pub fn duration(&self) -> f64 {
        (self.samples.len() - 1) as f64 * self.dt
    }

    /// Linear resampling through the existing samples; points that fall on an
    /// original sample reproduce it exactly.
    pub fn resample(&self, dt: f64) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::Accelerogram(format!("sample interval {dt} must be positive")));
        }
        let count = libm::floor(self.duration() / dt + 1e-9) as usize + 1;
        let last = self.samples.len() - 1;
        let samples = (0..count)
            .map(|k| {
                let pos = k as f64 * dt / self.dt;
                let nearest = libm::round(pos);
                if (pos - nearest).abs() <= 1e-9 * nearest.max(1.0) {
                    return self.samples[(nearest as usize).min(last)];
                }
                let i = (libm::floor(pos) as usize).min(last.saturating_sub(1));
                let frac = pos - i as f64;
                self.samples[i] + frac * (self.samples[(i + 1).min(last)] - self.samples[i])
            })
            .collect();
        Self::new(dt, samples, self.label.clone())
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0) || !factor.is_finite() {
            return Err(invalid("scale", "must be positive"));
        }
        Self::new(
            self.dt,
            self.samples.iter().map(|v| v * factor).collect(),
            self.label.clone(),
        )
    }

    /// Peak ground acceleration `max |ẍg|`.
    pub fn pga(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Rescales so that [`pga`](Self::pga) equals `peak`. An all-zero record
    /// is returned unchanged.
    pub fn scale_to_pga(&self, peak: f64) -> Result<Self> {
        if !(peak > 0.0) || !peak.is_finite() {
            return Err(invalid("pga", "must be positive"));
        }
        let current = self.pga();
        if current == 0.0 {
            return Ok(self.clone());
        }
        let mut out = self.scaled(peak / current)?;
        // Make the peak exact despite rounding in the division.
        if let Some(i) = out.samples.iter().position(|v| v.abs() == out.pga()) {
            out.samples[i] = libm::copysign(peak, out.samples[i]);
        }
        Ok(out)
    }

    /// Linear interpolation at time `t`, holding the end values outside the record.
    pub fn at(&self, t: f64) -> f64 {
        let last = self.samples.len() - 1;
        if t <= 0.0 {
            return self.samples[0];
        }
        let pos = t / self.dt;
        let i = libm::floor(pos) as usize;
        if i >= last {
            return self.samples[last];
        }
        let frac = pos - i as f64;
        self.samples[i] + frac * (self.samples[i + 1] - self.samples[i])
    }
}

fn interpolate(t0: f64, v0: f64, t1: f64, v1: f64, t: f64) -> f64 {
    if t <= t0 {
        v0
    } else if t >= t1 {
        v1
    } else {
        v0 + (t - t0) / (t1 - t0) * (v1 - v0)
    }
}

// Only a handful of controllers exist at a time, so the size gap is harmless.
#[allow(clippy::large_enum_variant)]
#[derive(Debug, Clone, PartialEq)]
pub enum Controller {
    /// Saturated sliding mode control.
    Smc(SlidingDesign),
    /// `u = −kᵀz`.
    StateFeedback(Vector4<f64>),
    /// `u = 0` (tuned mass damper only).
    Passive,
}

impl Controller {
    pub fn force(&self, z: &Vector4<f64>) -> f64 {
        match self {
            Self::Smc(d) => d.control(z),
            Self::StateFeedback(k) => -k.dot(z),
            Self::Passive => 0.0,
        }
    }

    pub fn sigma(&self, z: &Vector4<f64>) -> f64 {
        match self {
            Self::Smc(d) => d.surface.sigma(z),
            _ => 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    /// Final time (s); at most the accelerogram duration.
    pub t_end: f64,
    /// Replaces the plant's friction level when set; `Some(0.0)` disables it.
    pub friction: Option<f64>,
    pub initial_state: Vector4<f64>,
}

impl SimConfig {
    pub fn new(t_end: f64) -> Self {
        Self {
            t_end,
            friction: None,
            initial_state: Vector4::zeros(),
        }
    }

    pub fn without_friction(mut self) -> Self {
        self.friction = Some(0.0);
        self
    }
}

/// Sampled channels, one entry per time step including `t = 0`.
#[derive(Debug, Clone, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SimulationTrace {
    pub t: Vec<f64>,
    pub z1: Vec<f64>,
    pub z2: Vec<f64>,
    pub z3: Vec<f64>,
    pub z4: Vec<f64>,
    pub u: Vec<f64>,
    pub sigma: Vec<f64>,
    pub xg_dd: Vec<f64>,
}

impl SimulationTrace {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    fn push(&mut self, t: f64, z: &Vector4<f64>, u: f64, sigma: f64, xg: f64) {
        self.t.push(t);
        self.z1.push(z[0]);
        self.z2.push(z[1]);
        self.z3.push(z[2]);
        self.z4.push(z[3]);
        self.u.push(u);
        self.sigma.push(sigma);
        self.xg_dd.push(xg);
    }

    pub fn state(&self, k: usize) -> Vector4<f64> {
        Vector4::new(self.z1[k], self.z2[k], self.z3[k], self.z4[k])
    }
}

fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

pub fn simulate(
    plant: &PlantStateSpace,
    controller: &Controller,
    quake: &Accelerogram,
    config: &SimConfig,
) -> Result<SimulationTrace> {
    let dt = quake.dt;
    if !(config.t_end >= 0.0) || config.t_end > quake.duration() + 1e-9 * dt {
        return Err(invalid("t_end", "must lie within the accelerogram"));
    }
    let mu = config.friction.unwrap_or(plant.friction);
    if !(mu >= 0.0) || !mu.is_finite() {
        return Err(invalid("friction", "must be non-negative"));
    }
    if let Controller::StateFeedback(k) = controller {
        if k.iter().any(|v| !v.is_finite()) {
            return Err(invalid("gain", "must be finite"));
        }
    }

    let steps = libm::round(config.t_end / dt) as usize;
    let rhs = |z: &Vector4<f64>, u: f64, xg: f64| -> Vector4<f64> {
        plant.a * z + plant.b * (u - mu * sign(z[2])) + plant.d * xg
    };

    let mut trace = SimulationTrace::default();
    let mut z = config.initial_state;
    for k in 0..=steps {
        let t = k as f64 * dt;
        let u = controller.force(&z);
        let xg0 = quake.samples[k];
        trace.push(t, &z, u, controller.sigma(&z), xg0);
        if k == steps {
            break;
        }
        let xg1 = quake.samples[k + 1];
        let xgm = 0.5 * (xg0 + xg1);
        let k1 = rhs(&z, u, xg0);
        let k2 = rhs(&(z + k1 * (0.5 * dt)), u, xgm);
        let k3 = rhs(&(z + k2 * (0.5 * dt)), u, xgm);
        let k4 = rhs(&(z + k3 * dt), u, xg1);
        z += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
        if z.iter().any(|v| !v.is_finite() || v.abs() > DIVERGENCE_LIMIT) {
            return Err(Error::Diverged { time: t + dt });
        }
    }
    Ok(trace)
}

/// Kinetic plus elastic energy of the structure and damper.
pub fn mechanical_energy(plant: &PlantStateSpace, z: &Vector4<f64>) -> f64 {
    let m0 = -1.0 / plant.b[3];
    let md = 1.0 / (plant.b[2] - 1.0 / m0);
    let k0 = plant.a[(2, 1)] * m0;
    let kd = plant.a[(3, 0)] * m0;
    let abs_damper = z[3] + z[2];
    0.5 * m0 * z[3] * z[3] + 0.5 * md * abs_damper * abs_damper + 0.5 * k0 * z[1] * z[1] + 0.5 * kd * z[0] * z[0]
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ChannelStats {
    pub rms: f64,
    pub peak: f64,
}

impl ChannelStats {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len().max(1) as f64;
        let sum_sq: f64 = values.iter().map(|v| v * v).sum();
        Self {
            rms: libm::sqrt(sum_sq / n),
            peak: values.iter().fold(0.0, |m, v| m.max(v.abs())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TraceSummary {
    pub window: [f64; 2],
    pub sample_count: usize,
    pub z1: ChannelStats,
    pub z2: ChannelStats,
    pub z3: ChannelStats,
    pub z4: ChannelStats,
    pub u: ChannelStats,
}

/// RMS and peak of every channel over the samples with `t_a ≤ t ≤ t_b`.
pub fn summarize(trace: &SimulationTrace, window: [f64; 2]) -> Result<TraceSummary> {
    let [ta, tb] = window;
    let slack = match trace.t.as_slice() {
        [a, b, ..] => 1e-9 * (b - a),
        _ => 1e-12,
    };
    let lo = trace.t.partition_point(|&t| t < ta - slack);
    let hi = trace.t.partition_point(|&t| t <= tb + slack);
    if !(tb >= ta) || lo >= hi {
        return Err(Error::EmptyWindow { start: ta, end: tb });
    }
    let w = lo..hi;
    Ok(TraceSummary {
        window,
        sample_count: hi - lo,
        z1: ChannelStats::of(&trace.z1[w.clone()]),
        z2: ChannelStats::of(&trace.z2[w.clone()]),
        z3: ChannelStats::of(&trace.z3[w.clone()]),
        z4: ChannelStats::of(&trace.z4[w.clone()]),
        u: ChannelStats::of(&trace.u[w]),
    })
}

/// Boundary-layer occupancy and the discrete reaching condition.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ReachingReport {
    /// Fraction of samples with `|σ| ≤ ε`.
    pub inside_fraction: f64,
    /// Samples (excluding the last) with `|σ| > ε`.
    pub outside_count: usize,
    /// Of those, how many satisfy `σ_k (σ_{k+1} − σ_k) < 0`.
    pub approaching_count: usize,
}

impl ReachingReport {
    pub fn always_approaching(&self) -> bool {
        self.outside_count == self.approaching_count
    }
}

pub fn reaching_check(trace: &SimulationTrace, epsilon: f64) -> ReachingReport {
    let s = &trace.sigma;
    let inside = s.iter().filter(|v| v.abs() <= epsilon).count();
    let mut outside_count = 0;
    let mut approaching_count = 0;
    for w in s.windows(2) {
        if w[0].abs() > epsilon {
            outside_count += 1;
            if w[0] * (w[1] - w[0]) < 0.0 {
                approaching_count += 1;
            }
        }
    }
    ReachingReport {
        inside_fraction: if s.is_empty() {
            1.0
        } else {
            inside as f64 / s.len() as f64
        },
        outside_count,
        approaching_count,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use approx::assert_relative_eq;

    #[test]
    fn three_sample_summary() {
        let trace = SimulationTrace {
            t: vec![0.0, 1.0, 2.0],
            z1: vec![3.0, -4.0, 0.0],
            z2: vec![1.0; 3],
            z3: vec![0.0; 3],
            z4: vec![0.0; 3],
            u: vec![-2.0; 3],
            sigma: vec![0.0; 3],
            xg_dd: vec![0.0; 3],
        };
        let s = summarize(&trace, [0.0, 2.0]).unwrap();
        assert_eq!(s.sample_count, 3);
        assert_relative_eq!(s.z1.rms, libm::sqrt(25.0 / 3.0), epsilon = 1e-15);
        assert_eq!(s.z1.peak, 4.0);
        assert_eq!(s.z2, ChannelStats { rms: 1.0, peak: 1.0 });
        assert_eq!(s.u, ChannelStats { rms: 2.0, peak: 2.0 });
        assert!(matches!(summarize(&trace, [5.0, 6.0]), Err(Error::EmptyWindow { .. })));
        assert!(summarize(&trace, [2.0, 1.0]).is_err());
    }

    #[test]
    fn pga_scaling() {
        let q = Accelerogram::new(0.02, vec![0.1, -3.417, 2.0, 0.0], "x").unwrap();
        let s = q.scale_to_pga(0.5).unwrap();
        assert!((s.pga() - 0.5).abs() <= 1e-9);
        let zero = Accelerogram::new(0.02, vec![0.0; 4], "z").unwrap();
        assert_eq!(zero.scale_to_pga(0.5).unwrap().samples, vec![0.0; 4]);
        assert_eq!(zero.scaled(7.0).unwrap().samples, vec![0.0; 4]);
        assert!(q.scaled(0.0).is_err());
    }

    #[test]
    fn resample_keeps_knots() {
        let q = Accelerogram::new(0.02, vec![0.3, -1.7, 2.9, 0.1], "x").unwrap();
        let r = q.resample(0.001).unwrap();
        assert_eq!(r.samples.len(), 61);
        for (i, v) in q.samples.iter().enumerate() {
            assert_eq!(r.samples[20 * i], *v);
        }
        assert_relative_eq!(r.samples[10], 0.5 * (0.3 - 1.7), epsilon = 1e-12);
    }

    #[test]
    fn time_series_validation() {
        assert!(Accelerogram::from_time_series(&[0.0, 0.1, 0.1], &[0.0; 3], 0.01, "x").is_err());
        assert!(Accelerogram::from_time_series(&[0.0, 0.1], &[0.0], 0.01, "x").is_err());
        let q = Accelerogram::from_time_series(&[1.0, 1.5, 2.0], &[0.0, 1.0, 0.0], 0.25, "x").unwrap();
        assert_eq!(q.samples, vec![0.0, 0.5, 1.0, 0.5, 0.0]);
    }

    #[test]
    fn interpolation_holds_ends() {
        let q = Accelerogram::new(1.0, vec![1.0, 3.0], "x").unwrap();
        assert_eq!(q.at(-1.0), 1.0);
        assert_eq!(q.at(0.5), 2.0);
        assert_eq!(q.at(4.0), 3.0);
    }

    #[test]
    fn reaching_counts() {
        let trace = SimulationTrace {
            sigma: vec![0.2, 0.1, 0.0, -0.2, -0.3],
            ..Default::default()
        };
        let r = reaching_check(&trace, 0.05);
        assert_relative_eq!(r.inside_fraction, 0.2);
        assert_eq!(r.outside_count, 3);
        assert_eq!(r.approaching_count, 2);
        assert!(!r.always_approaching());
    }
}
