//! Exhaustive, feasibility-filtered grid search over `(ζ, ωn)`.
//!
//! Every grid point is evaluated independently by [`evaluate_point`], so a
//! caller may fan the points out to worker threads and hand the outcomes to
//! [`collect`]; [`tune`] is the serial driver. Selection happens only after
//! all points are known and is independent of evaluation order.

use alloc::vec::Vec;

use core::cmp::Ordering;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::freq::{self, Band, BandMetrics};
use crate::smc::{self, PoleSpec, SlidingSurface};
use crate::structure::{ModalModel, PlantStateSpace};

/// Relative slack when deciding whether a grid value still lies inside the
/// inclusive upper limit.
const GRID_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum PerformanceIndex {
    /// Minimize κ2 (top-floor displacement).
    #[cfg_attr(feature = "serde", serde(rename = "jz2"))]
    Jz2,
    /// Minimize κu (control force).
    #[cfg_attr(feature = "serde", serde(rename = "ju"))]
    Ju,
}

impl PerformanceIndex {
    pub fn value(&self, t: &TuningTuple) -> f64 {
        match self {
            Self::Jz2 => t.kappa2,
            Self::Ju => t.kappa_u,
        }
    }
}

/// Upper limits κ̄ on the band RMS values (m, m, m/s, N).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct KappaBounds {
    pub kappa1: f64,
    pub kappa2: f64,
    pub kappa3: f64,
    pub kappa_u: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct TuningConfig {
    pub zeta_l: f64,
    pub zeta_u: f64,
    pub delta_zeta: f64,
    /// Lower ωn limit as a multiple of ω0.
    pub omega_nl: f64,
    /// Upper ωn limit as a multiple of ω0.
    pub omega_nu: f64,
    /// ωn increment as a multiple of ω0.
    pub delta_omega: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub kappa_bars: KappaBounds,
    pub index: PerformanceIndex,
    pub band: Band,
    pub n_samples: usize,
    pub varsigma: f64,
    pub epsilon: f64,
}

impl Default for TuningConfig {
    /// Recommended limits. The κ̄ defaults are the five-story study's values
    /// and should normally be replaced.
    fn default() -> Self {
        Self {
            zeta_l: 0.5,
            zeta_u: 0.9,
            delta_zeta: 0.01,
            omega_nl: 0.5,
            omega_nu: 0.8,
            delta_omega: 0.01,
            gamma1: 5.0,
            gamma2: 1.0,
            kappa_bars: KappaBounds {
                kappa1: 0.20,
                kappa2: 0.010,
                kappa3: 0.70,
                kappa_u: 12.0,
            },
            index: PerformanceIndex::Jz2,
            band: Band::default(),
            n_samples: freq::DEFAULT_SAMPLES,
            varsigma: smc::DEFAULT_VARSIGMA,
            epsilon: smc::DEFAULT_EPSILON,
        }
    }
}

impl TuningConfig {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.zeta_l,
            self.zeta_u,
            self.delta_zeta,
            self.omega_nl,
            self.omega_nu,
            self.delta_omega,
            self.gamma1,
            self.gamma2,
            self.varsigma,
            self.epsilon,
        ];
        if finite.iter().any(|v| !v.is_finite()) {
            return Err(invalid("tuning", "all parameters must be finite"));
        }
        if !(self.zeta_l > 0.0 && self.zeta_l < self.zeta_u) {
            return Err(invalid("zeta_l", "requires 0 < zeta_l < zeta_u"));
        }
        if !(self.omega_nl > 0.0 && self.omega_nl < self.omega_nu) {
            return Err(invalid("omega_nl", "requires 0 < omega_nl < omega_nu"));
        }
        if !(self.delta_zeta > 0.0) || !(self.delta_omega > 0.0) {
            return Err(invalid("increments", "must be positive"));
        }
        if !(self.gamma1 >= 0.0) || !(self.gamma2 >= 0.0) {
            return Err(invalid("gamma", "must be non-negative"));
        }
        let k = &self.kappa_bars;
        if [k.kappa1, k.kappa2, k.kappa3, k.kappa_u]
            .iter()
            .any(|v| !(*v > 0.0) || !v.is_finite())
        {
            return Err(invalid("kappa_bars", "must be positive"));
        }
        if !(self.varsigma > 0.0) || !(self.epsilon > 0.0) {
            return Err(invalid("varsigma/epsilon", "must be positive"));
        }
        self.band.validate()?;
        if self.n_samples < 2 {
            return Err(invalid("n_samples", "at least two samples are required"));
        }
        Ok(())
    }
}

/// One `(ζ, ωn/ω0)` grid node with its integer coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub zeta_index: usize,
    pub omega_index: usize,
    pub zeta: f64,
    pub omega_ratio: f64,
}

/// A saved feasible tuple Γ.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TuningTuple {
    pub zeta: f64,
    /// rad/s
    pub omega_n: f64,
    pub omega_ratio: f64,
    pub eta: [f64; 4],
    pub kappa1: f64,
    pub kappa2: f64,
    pub kappa3: f64,
    pub kappa_u: f64,
    /// Peak of |δ·Gu| on the same grid.
    pub chi: f64,
    pub lambda1: Complex64,
    pub lambda2: Complex64,
    pub lambda3: f64,
    pub psi1: f64,
    pub psi2: f64,
    pub zeta_index: usize,
    pub omega_index: usize,
}

impl TuningTuple {
    pub fn pole_spec(&self) -> Result<PoleSpec> {
        PoleSpec::from_tuning(self.zeta, self.omega_n)
    }
}

/// Why a grid point was kept or dropped.
#[derive(Debug, Clone, PartialEq)]
pub enum PointOutcome {
    Feasible(TuningTuple),
    /// A zero sits too close to the dominant poles.
    ZeroTooClose {
        psi1: f64,
        psi2: f64,
    },
    /// Some κ exceeds its bound.
    KappaExceeded(BandMetrics),
    /// The design itself could not be formed (e.g. η3 or η4 vanish).
    Degenerate(Error),
}

/// Row of the `(ζ, ωn/ω0, κ…)` mesh over the feasible set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshRow {
    pub zeta: f64,
    pub omega_ratio: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub kappa3: f64,
    pub kappa_u: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TuningResult {
    pub index: PerformanceIndex,
    pub omega0: f64,
    /// Γ*.
    pub best: TuningTuple,
    pub chi: f64,
    /// M0 = ϖ + χ + ς.
    pub switching_gain: f64,
    pub epsilon: f64,
    pub evaluated_count: usize,
    pub feasible_count: usize,
    /// `[min, max]` of ζ over the feasible tuples.
    pub feasible_zeta_range: [f64; 2],
    /// `[min, max]` of ωn/ω0 over the feasible tuples.
    pub feasible_omega_range: [f64; 2],
    /// Feasible tuples in scan order (ζ outer, ωn inner).
    pub tuples: Vec<TuningTuple>,
}

impl TuningResult {
    pub fn mesh(&self) -> Vec<MeshRow> {
        self.tuples
            .iter()
            .map(|t| MeshRow {
                zeta: t.zeta,
                omega_ratio: t.omega_ratio,
                kappa1: t.kappa1,
                kappa2: t.kappa2,
                kappa3: t.kappa3,
                kappa_u: t.kappa_u,
            })
            .collect()
    }
}

/// Feasible `(ζ, ωn/ω0)` box.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FeasibleRegion {
    pub zeta: [f64; 2],
    pub omega_ratio: [f64; 2],
}

fn axis(lower: f64, upper: f64, step: f64) -> Vec<f64> {
    let count = libm::floor((upper - lower) / step + GRID_SLACK) as usize + 1;
    (0..count).map(|i| lower + step * i as f64).collect()
}

/// Grid nodes in scan order: ζ outer loop, ωn inner loop, bounds inclusive.
pub fn grid(config: &TuningConfig) -> Result<Vec<GridPoint>> {
    config.validate()?;
    let zetas = axis(config.zeta_l, config.zeta_u, config.delta_zeta);
    let omegas = axis(config.omega_nl, config.omega_nu, config.delta_omega);
    let mut out = Vec::with_capacity(zetas.len() * omegas.len());
    for (zi, &zeta) in zetas.iter().enumerate() {
        for (wi, &omega_ratio) in omegas.iter().enumerate() {
            out.push(GridPoint {
                zeta_index: zi,
                omega_index: wi,
                zeta,
                omega_ratio,
            });
        }
    }
    Ok(out)
}

/// Runs the per-point checks: zero distances first, then the κ limits.
pub fn evaluate_point(plant: &PlantStateSpace, omega0: f64, config: &TuningConfig, point: GridPoint) -> PointOutcome {
    let omega_n = point.omega_ratio * omega0;
    let poles = match PoleSpec::from_tuning(point.zeta, omega_n) {
        Ok(p) => p,
        Err(e) => return PointOutcome::Degenerate(e),
    };
    let eta = match smc::sliding_vector(plant, &poles.sliding_poles()) {
        Ok(e) => e,
        Err(e) => return PointOutcome::Degenerate(e),
    };
    let (psi1, psi2) = match freq::zeros(&eta) {
        Ok(z) => z,
        Err(e) => return PointOutcome::Degenerate(e),
    };
    let decay = point.zeta * omega_n;
    if !(psi1.abs() / decay >= config.gamma1 && psi2.abs() / decay >= config.gamma2) {
        return PointOutcome::ZeroTooClose { psi1, psi2 };
    }

    let metrics = match SlidingSurface::synthesize(plant, poles)
        .and_then(|s| freq::build_transfer_functions(&s))
        .and_then(|set| freq::band_metrics(&set, plant.bounds.delta, config.band, config.n_samples))
    {
        Ok(m) => m,
        Err(e) => return PointOutcome::Degenerate(e),
    };
    let bars = &config.kappa_bars;
    let within = metrics.kappa1 <= bars.kappa1
        && metrics.kappa2 <= bars.kappa2
        && metrics.kappa3 <= bars.kappa3
        && metrics.kappa_u + plant.bounds.varpi <= bars.kappa_u;
    if !within {
        return PointOutcome::KappaExceeded(metrics);
    }

    let (lambda1, lambda2) = poles.dominant_pair();
    PointOutcome::Feasible(TuningTuple {
        zeta: point.zeta,
        omega_n,
        omega_ratio: point.omega_ratio,
        eta: [eta[0], eta[1], eta[2], eta[3]],
        kappa1: metrics.kappa1,
        kappa2: metrics.kappa2,
        kappa3: metrics.kappa3,
        kappa_u: metrics.kappa_u,
        chi: metrics.chi,
        lambda1,
        lambda2,
        lambda3: poles.lambda3,
        psi1,
        psi2,
        zeta_index: point.zeta_index,
        omega_index: point.omega_index,
    })
}

/// Index value first, then smaller ωn, then smaller ζ.
fn rank(index: PerformanceIndex, a: &TuningTuple, b: &TuningTuple) -> Ordering {
    index
        .value(a)
        .total_cmp(&index.value(b))
        .then(a.omega_index.cmp(&b.omega_index))
        .then(a.zeta_index.cmp(&b.zeta_index))
}

/// Builds the result from evaluated outcomes, in any order.
pub fn collect<I>(plant: &PlantStateSpace, omega0: f64, config: &TuningConfig, outcomes: I) -> Result<TuningResult>
where
    I: IntoIterator<Item = PointOutcome>,
{
    let mut evaluated_count = 0;
    let mut tuples: Vec<TuningTuple> = outcomes
        .into_iter()
        .inspect(|_| evaluated_count += 1)
        .filter_map(|o| match o {
            PointOutcome::Feasible(t) => Some(t),
            _ => None,
        })
        .collect();
    tuples.sort_by(|a, b| a.zeta_index.cmp(&b.zeta_index).then(a.omega_index.cmp(&b.omega_index)));

    let best = tuples
        .iter()
        .min_by(|a, b| rank(config.index, a, b))
        .cloned()
        .ok_or(Error::Infeasible)?;

    let chi = best.chi;
    let switching_gain = smc::switching_gain(chi, plant.bounds.varpi, config.varsigma)?;
    let region = region_of(&tuples)?;

    Ok(TuningResult {
        index: config.index,
        omega0,
        best,
        chi,
        switching_gain,
        epsilon: config.epsilon,
        evaluated_count,
        feasible_count: tuples.len(),
        feasible_zeta_range: region.zeta,
        feasible_omega_range: region.omega_ratio,
        tuples,
    })
}

/// Serial scan of the whole grid.
pub fn tune(plant: &PlantStateSpace, modal: &ModalModel, config: &TuningConfig) -> Result<TuningResult> {
    let points = grid(config)?;
    let omega0 = modal.omega0;
    let outcomes = points.into_iter().map(|p| evaluate_point(plant, omega0, config, p));
    collect(plant, omega0, config, outcomes)
}

fn region_of(tuples: &[TuningTuple]) -> Result<FeasibleRegion> {
    let first = tuples.first().ok_or(Error::Infeasible)?;
    let init = FeasibleRegion {
        zeta: [first.zeta, first.zeta],
        omega_ratio: [first.omega_ratio, first.omega_ratio],
    };
    Ok(tuples.iter().fold(init, |r, t| FeasibleRegion {
        zeta: [r.zeta[0].min(t.zeta), r.zeta[1].max(t.zeta)],
        omega_ratio: [r.omega_ratio[0].min(t.omega_ratio), r.omega_ratio[1].max(t.omega_ratio)],
    }))
}

/// Extent of the feasible set in ζ and ωn/ω0.
pub fn feasible_region(result: &TuningResult) -> Result<FeasibleRegion> {
    region_of(&result.tuples)
}

/// The chosen surface Γ* paired with its switching gain.
pub fn design_from_result(plant: &PlantStateSpace, result: &TuningResult) -> Result<smc::SlidingDesign> {
    let surface = SlidingSurface::synthesize(plant, result.best.pole_spec()?)?;
    smc::SlidingDesign::new(surface, result.switching_gain, result.epsilon)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn axis_is_inclusive() {
        let a = axis(0.5, 0.9, 0.01);
        assert_eq!(a.len(), 41);
        assert!((a[40] - 0.9).abs() < 1e-12);
        assert_eq!(axis(0.5, 1.0, 0.01).len(), 51);
        assert_eq!(axis(0.5, 0.505, 0.01), vec![0.5]);
    }

    #[test]
    fn config_validation() {
        let mut c = TuningConfig::default();
        assert!(c.validate().is_ok());
        c.zeta_u = 0.4;
        assert!(c.validate().is_err());
        let c = TuningConfig {
            delta_omega: 0.0,
            ..TuningConfig::default()
        };
        assert!(c.validate().is_err());
        let mut c = TuningConfig::default();
        c.kappa_bars.kappa2 = 0.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn grid_scan_order() {
        let c = TuningConfig {
            zeta_u: 0.52,
            omega_nu: 0.51,
            ..TuningConfig::default()
        };
        let g = grid(&c).unwrap();
        let coords: Vec<(usize, usize)> = g.iter().map(|p| (p.zeta_index, p.omega_index)).collect();
        assert_eq!(coords, vec![(0, 0), (0, 1), (1, 0), (1, 1), (2, 0), (2, 1)]);
    }

    fn tuple(zi: usize, wi: usize, k2: f64) -> TuningTuple {
        TuningTuple {
            zeta: 0.5 + 0.01 * zi as f64,
            omega_n: 1.0,
            omega_ratio: 0.5 + 0.01 * wi as f64,
            eta: [0.0; 4],
            kappa1: 0.0,
            kappa2: k2,
            kappa3: 0.0,
            kappa_u: 0.0,
            chi: 0.0,
            lambda1: Complex64::new(0.0, 0.0),
            lambda2: Complex64::new(0.0, 0.0),
            lambda3: 0.0,
            psi1: 0.0,
            psi2: 0.0,
            zeta_index: zi,
            omega_index: wi,
        }
    }

    #[test]
    fn ties_prefer_smaller_omega_then_zeta() {
        let a = tuple(0, 3, 1.0);
        let b = tuple(2, 1, 1.0);
        let c = tuple(1, 1, 1.0);
        let mut v = [a, b, c.clone()];
        v.sort_by(|x, y| rank(PerformanceIndex::Jz2, x, y));
        assert_eq!(v[0], c);
    }

    #[test]
    fn single_point_region_is_degenerate() {
        let t = tuple(3, 4, 1.0);
        let r = region_of(core::slice::from_ref(&t)).unwrap();
        assert_eq!(r.zeta, [t.zeta, t.zeta]);
        assert_eq!(r.omega_ratio, [t.omega_ratio, t.omega_ratio]);
        assert_eq!(region_of(&[]), Err(Error::Infeasible));
    }
}
