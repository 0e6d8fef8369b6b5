//! Frequency-domain view of the sliding motion.
//!
//! With ground acceleration as input, the sliding dynamics give
//!
//! ```text
//! G1(s) =  α2 (s − ψ1)            / P1(s)
//! G2(s) = −α2 η3 (s − ψ2) / η4    / P1(s)
//! G3(s) =  α2 s (s − ψ1)          / P1(s)
//! Gu(s) =  ν1 (sI − A1)⁻¹ B1 + α1
//! ```
//!
//! with `P1(s) = (s − λ3)(s² + 2ζωn s + ωn²)`, `ψ1 = −η2/η4`, `ψ2 = −η1/η3`.
//! Band metrics scale each response by the excitation bound δ.

use alloc::vec;
use alloc::vec::Vec;

use core::f64::consts::PI;

use nalgebra::{Matrix3, Vector4};
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::linalg::{self, poly_eval, poly_mul};
use crate::smc::SlidingSurface;

/// Number of frequency samples used when none is configured.
pub const DEFAULT_SAMPLES: usize = 2000;

/// Real-coefficient rational transfer function `gain · num(s) / den(s)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RationalTf {
    /// Descending powers of `s`.
    pub numerator: Vec<f64>,
    /// Descending powers of `s`.
    pub denominator: Vec<f64>,
    pub gain: f64,
}

impl RationalTf {
    pub fn eval(&self, s: Complex64) -> Complex64 {
        poly_eval(&self.numerator, s) / poly_eval(&self.denominator, s) * self.gain
    }

    pub fn magnitude(&self, omega: f64) -> f64 {
        self.eval(Complex64::new(0.0, omega)).norm()
    }

    pub fn constant(value: f64) -> Self {
        Self {
            numerator: vec![1.0],
            denominator: vec![1.0],
            gain: value,
        }
    }
}

/// The four sliding-mode transfer functions and their zeros.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TransferSet {
    pub g1: RationalTf,
    pub g2: RationalTf,
    pub g3: RationalTf,
    pub gu: RationalTf,
    pub psi1: f64,
    pub psi2: f64,
}

/// Frequency band in rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct Band {
    pub lower: f64,
    pub upper: f64,
}

impl Default for Band {
    /// 1–20 Hz.
    fn default() -> Self {
        Self {
            lower: 2.0 * PI,
            upper: 40.0 * PI,
        }
    }
}

impl Band {
    pub fn validate(&self) -> Result<()> {
        if !(self.lower >= 0.0) || !(self.upper > self.lower) || !self.upper.is_finite() {
            return Err(invalid("band", "requires 0 ≤ lower < upper"));
        }
        Ok(())
    }

    /// Uniform grid of `n` frequencies including both band edges.
    pub fn grid(&self, n: usize) -> Result<impl Iterator<Item = f64> + Clone> {
        self.validate()?;
        if n < 2 {
            return Err(invalid("n_samples", "at least two samples are required"));
        }
        let (lo, hi) = (self.lower, self.upper);
        let last = (n - 1) as f64;
        Ok((0..n).map(move |k| {
            if k + 1 == n {
                hi
            } else {
                lo + (hi - lo) * (k as f64) / last
            }
        }))
    }
}

/// Band-limited RMS values κ and peak χ of the scaled responses `δ·G`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BandMetrics {
    /// m
    pub kappa1: f64,
    /// m
    pub kappa2: f64,
    /// m/s
    pub kappa3: f64,
    /// N
    pub kappa_u: f64,
    /// N
    pub chi: f64,
    pub band: Band,
    pub sample_count: usize,
}

/// `ψ1 = −η2/η4` and `ψ2 = −η1/η3`.
pub fn zeros(eta: &Vector4<f64>) -> Result<(f64, f64)> {
    if eta[3] == 0.0 {
        return Err(Error::UndefinedZero("eta4"));
    }
    if eta[2] == 0.0 {
        return Err(Error::UndefinedZero("eta3"));
    }
    Ok((-eta[1] / eta[3], -eta[0] / eta[2]))
}

/// Numerator of `c (sI − A)⁻¹ b` for a 3×3 `A`, via the Faddeev–LeVerrier
/// expansion `adj(sI − A) = s²I + s(A + a2 I) + (A² + a2 A + a1 I)`.
fn state_space_numerator(a: &Matrix3<f64>, b: &nalgebra::Vector3<f64>, c: &nalgebra::RowVector3<f64>) -> [f64; 3] {
    let eye = Matrix3::<f64>::identity();
    let tr = a.trace();
    let a2 = -tr;
    let a1 = 0.5 * (tr * tr - (a * a).trace());
    let n1 = a + eye * a2;
    let n0 = a * a + a * a2 + eye * a1;
    [(c * b)[0], (c * n1 * b)[0], (c * n0 * b)[0]]
}

pub fn build_transfer_functions(surface: &SlidingSurface) -> Result<TransferSet> {
    let eta = &surface.eta;
    let (psi1, psi2) = zeros(eta)?;
    let r = &surface.reduced;

    let factors = linalg::real_factors(&surface.poles.sliding_poles())?;
    let den = linalg::poly_from_factors(&factors);

    let g1 = RationalTf {
        numerator: vec![1.0, -psi1],
        denominator: den.clone(),
        gain: r.alpha2,
    };
    let g2 = RationalTf {
        numerator: vec![1.0, -psi2],
        denominator: den.clone(),
        gain: -r.alpha2 * eta[2] / eta[3],
    };
    let g3 = RationalTf {
        numerator: poly_mul(&[1.0, 0.0], &[1.0, -psi1]),
        denominator: den.clone(),
        gain: r.alpha2,
    };

    let ss = state_space_numerator(&r.a1, &r.b1, &r.nu1);
    let numerator = den
        .iter()
        .zip([0.0, ss[0], ss[1], ss[2]])
        .map(|(d, n)| r.alpha1 * d + n)
        .collect();
    let gu = RationalTf {
        numerator,
        denominator: den,
        gain: 1.0,
    };

    Ok(TransferSet {
        g1,
        g2,
        g3,
        gu,
        psi1,
        psi2,
    })
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(invalid("delta", "must be positive"));
    }
    Ok(())
}

/// `κ = sqrt((1/n) Σ |δ·G(jω_k)|²)` over the uniform inclusive grid.
pub fn band_rms(tf: &RationalTf, delta: f64, band: Band, n_samples: usize) -> Result<f64> {
    check_delta(delta)?;
    let sum: f64 = band
        .grid(n_samples)?
        .map(|w| {
            let m = delta * tf.magnitude(w);
            m * m
        })
        .sum();
    Ok(libm::sqrt(sum / n_samples as f64))
}

/// `χ = max_k |δ·G(jω_k)|` over the same grid as [`band_rms`].
pub fn band_peak(tf: &RationalTf, delta: f64, band: Band, n_samples: usize) -> Result<f64> {
    check_delta(delta)?;
    Ok(band
        .grid(n_samples)?
        .map(|w| delta * tf.magnitude(w))
        .fold(0.0, f64::max))
}

/// All κ values and χ in a single sweep; each entry equals what
/// [`band_rms`] / [`band_peak`] return for the same grid.
pub fn band_metrics(set: &TransferSet, delta: f64, band: Band, n_samples: usize) -> Result<BandMetrics> {
    check_delta(delta)?;
    let mut sums = [0.0f64; 4];
    let mut chi = 0.0f64;
    for w in band.grid(n_samples)? {
        let mags = [
            set.g1.magnitude(w),
            set.g2.magnitude(w),
            set.g3.magnitude(w),
            set.gu.magnitude(w),
        ];
        for (acc, m) in sums.iter_mut().zip(mags) {
            let v = delta * m;
            *acc += v * v;
        }
        chi = chi.max(delta * mags[3]);
    }
    let n = n_samples as f64;
    Ok(BandMetrics {
        kappa1: libm::sqrt(sums[0] / n),
        kappa2: libm::sqrt(sums[1] / n),
        kappa3: libm::sqrt(sums[2] / n),
        kappa_u: libm::sqrt(sums[3] / n),
        chi,
        band,
        sample_count: n_samples,
    })
}

/// One row of a magnitude sweep: `ω, |H1|, |H2|, |H3|, |Hu|` with `H = δ·G`.
pub type ResponseRow = [f64; 5];

pub fn frequency_response(set: &TransferSet, delta: f64, band: Band, n_samples: usize) -> Result<Vec<ResponseRow>> {
    check_delta(delta)?;
    Ok(band
        .grid(n_samples)?
        .map(|w| {
            [
                w,
                delta * set.g1.magnitude(w),
                delta * set.g2.magnitude(w),
                delta * set.g3.magnitude(w),
                delta * set.gu.magnitude(w),
            ]
        })
        .collect())
}
