//! Synthetic strong-motion record: white noise shaped by a Kanai–Tajimi
//! ground filter and a Clough–Penzien high-pass, under a
//! rise/plateau/decay envelope. Used when no recorded accelerogram is at hand.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use smc_atmd_core::Accelerogram;

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthParams {
    pub seed: u64,
    /// Record length (s).
    pub duration: f64,
    /// Output sample interval (s).
    pub dt: f64,
    /// Number of internal filter steps per output sample.
    pub substeps: usize,
    /// Ground filter frequency (rad/s) and damping.
    pub omega_g: f64,
    pub zeta_g: f64,
    /// High-pass filter frequency (rad/s) and damping.
    pub omega_f: f64,
    pub zeta_f: f64,
    /// Envelope: quadratic rise until `rise`, flat until `plateau`, then `exp(−decay·(t − plateau))`.
    pub rise: f64,
    pub plateau: f64,
    pub decay: f64,
    pub pga: f64,
}

impl Default for SynthParams {
    fn default() -> Self {
        Self {
            seed: 1940,
            duration: 30.0,
            dt: 0.02,
            substeps: 4,
            omega_g: 15.6,
            zeta_g: 0.6,
            omega_f: 1.56,
            zeta_f: 0.6,
            rise: 2.0,
            plateau: 10.0,
            decay: 0.25,
            pga: 0.5,
        }
    }
}

fn envelope(p: &SynthParams, t: f64) -> f64 {
    if t < p.rise {
        (t / p.rise).powi(2)
    } else if t <= p.plateau {
        1.0
    } else {
        (-p.decay * (t - p.plateau)).exp()
    }
}

/// Filter states `[x_g, ẋ_g, x_f, ẋ_f]` driven by white noise `w`.
fn derivative(p: &SynthParams, s: [f64; 4], w: f64) -> [f64; 4] {
    let [xg, vg, xf, vf] = s;
    let ground = -(2.0 * p.zeta_g * p.omega_g * vg + p.omega_g * p.omega_g * xg);
    let ag = ground - w;
    [
        vg,
        ag,
        vf,
        ground - 2.0 * p.zeta_f * p.omega_f * vf - p.omega_f * p.omega_f * xf,
    ]
}

fn output(p: &SynthParams, s: [f64; 4]) -> f64 {
    let [xg, vg, xf, vf] = s;
    let ground = -(2.0 * p.zeta_g * p.omega_g * vg + p.omega_g * p.omega_g * xg);
    ground - 2.0 * p.zeta_f * p.omega_f * vf - p.omega_f * p.omega_f * xf
}

fn add(s: [f64; 4], k: [f64; 4], h: f64) -> [f64; 4] {
    [s[0] + h * k[0], s[1] + h * k[1], s[2] + h * k[2], s[3] + h * k[3]]
}

pub fn synthesize(p: &SynthParams) -> Result<Accelerogram> {
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let h = p.dt / p.substeps as f64;
    let steps = (p.duration / h).round() as usize;
    let mut s = [0.0; 4];
    let mut samples = Vec::with_capacity(steps / p.substeps + 1);
    samples.push(0.0);
    for k in 0..steps {
        let w: f64 = StandardNormal.sample(&mut rng);
        let k1 = derivative(p, s, w);
        let k2 = derivative(p, add(s, k1, 0.5 * h), w);
        let k3 = derivative(p, add(s, k2, 0.5 * h), w);
        let k4 = derivative(p, add(s, k3, h), w);
        for i in 0..4 {
            s[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if (k + 1) % p.substeps == 0 {
            let t = (k + 1) as f64 * h;
            samples.push(envelope(p, t) * output(p, s));
        }
    }
    let raw = Accelerogram::new(p.dt, samples, format!("synthetic-{}", p.seed))?;
    Ok(raw.scale_to_pga(p.pga)?)
}
