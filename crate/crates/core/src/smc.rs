//! Ackermann-based sliding mode controller synthesis.
//!
//! The full-state gain `k` places all four closed-loop poles; the sliding
//! vector `η` uses only the first three. On the plane `σ = ηᵀz = 0` the plant
//! reduces to the third-order system `ż* = A1 z* + B1 ẍ_g` whose poles are
//! `λ1, λ2, λ3`, and the equivalent control is `u = ν1 z* + α1 ẍ_g`.

use nalgebra::{Matrix3, Matrix4, RowVector3, Vector3, Vector4};
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::linalg;
use crate::structure::PlantStateSpace;

/// Boundary-layer half width used when none is configured.
pub const DEFAULT_EPSILON: f64 = 0.05;
/// Margin ς added to the switching gain (N).
pub const DEFAULT_VARSIGMA: f64 = 0.5;

/// Desired closed-loop poles: a dominant pair from `(ζ, ωn)`, a real pole
/// `λ3` and the auxiliary real pole `λ4` that only enters the reaching analysis.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PoleSpec {
    pub zeta: f64,
    pub omega_n: f64,
    pub lambda3: f64,
    pub lambda4: f64,
}

impl PoleSpec {
    pub fn new(zeta: f64, omega_n: f64, lambda3: f64, lambda4: f64) -> Result<Self> {
        if !(zeta > 0.0 && zeta < 1.0) {
            return Err(invalid("zeta", "damping ratio must lie in (0, 1)"));
        }
        if !(omega_n > 0.0) || !omega_n.is_finite() {
            return Err(invalid("omega_n", "must be positive"));
        }
        if !(lambda3 < 0.0) || !lambda3.is_finite() {
            return Err(invalid("lambda3", "must be real and negative"));
        }
        if !(lambda4 < 0.0) || !lambda4.is_finite() {
            return Err(invalid("lambda4", "must be real and negative"));
        }
        Ok(Self {
            zeta,
            omega_n,
            lambda3,
            lambda4,
        })
    }

    /// Tuning-rule poles: `λ3 = −3ζωn` and the default `λ4 = −10ζωn`.
    pub fn from_tuning(zeta: f64, omega_n: f64) -> Result<Self> {
        Self::new(zeta, omega_n, -3.0 * zeta * omega_n, -10.0 * zeta * omega_n)
    }

    pub fn with_lambda4(self, lambda4: f64) -> Result<Self> {
        Self::new(self.zeta, self.omega_n, self.lambda3, lambda4)
    }

    /// Damped natural frequency `ωd = ωn·sqrt(1 − ζ²)`.
    pub fn omega_d(&self) -> f64 {
        self.omega_n * libm::sqrt(1.0 - self.zeta * self.zeta)
    }

    /// `(λ1, λ2) = (−ζωn − jωd, −ζωn + jωd)`.
    pub fn dominant_pair(&self) -> (Complex64, Complex64) {
        let re = -self.zeta * self.omega_n;
        let wd = self.omega_d();
        (Complex64::new(re, -wd), Complex64::new(re, wd))
    }

    pub fn sliding_poles(&self) -> [Complex64; 3] {
        let (l1, l2) = self.dominant_pair();
        [l1, l2, Complex64::new(self.lambda3, 0.0)]
    }

    pub fn closed_loop_poles(&self) -> [Complex64; 4] {
        let [l1, l2, l3] = self.sliding_poles();
        [l1, l2, l3, Complex64::new(self.lambda4, 0.0)]
    }
}

/// Quantities of the sliding motion: `z* = T z` coordinates, reduced matrices
/// and the equivalent-control row `ν1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedDynamics {
    pub t: Matrix4<f64>,
    pub a1: Matrix3<f64>,
    pub b1: Vector3<f64>,
    pub alpha1: f64,
    pub alpha2: f64,
    pub nu1: RowVector3<f64>,
}

/// Sliding plane together with the Ackermann gain it was derived from.
#[derive(Debug, Clone, PartialEq)]
pub struct SlidingSurface {
    pub poles: PoleSpec,
    pub eta: Vector4<f64>,
    pub k_gain: Vector4<f64>,
    pub reduced: ReducedDynamics,
}

impl SlidingSurface {
    pub fn synthesize(plant: &PlantStateSpace, poles: PoleSpec) -> Result<Self> {
        let eta = sliding_vector(plant, &poles.sliding_poles())?;
        let k_gain = ackermann_gain(plant, &poles.closed_loop_poles())?;
        let reduced = reduced_dynamics(plant, &eta, &k_gain, poles.lambda4)?;
        Ok(Self {
            poles,
            eta,
            k_gain,
            reduced,
        })
    }

    pub fn sigma(&self, z: &Vector4<f64>) -> f64 {
        self.eta.dot(z)
    }
}

/// Complete controller: sliding surface, switching gain `M0` and boundary layer `ε`.
#[derive(Debug, Clone, PartialEq)]
pub struct SlidingDesign {
    pub surface: SlidingSurface,
    pub switching_gain: f64,
    pub epsilon: f64,
}

impl SlidingDesign {
    pub fn new(surface: SlidingSurface, switching_gain: f64, epsilon: f64) -> Result<Self> {
        if !(switching_gain > 0.0) || !switching_gain.is_finite() {
            return Err(invalid("M0", "switching gain must be positive"));
        }
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(invalid("epsilon", "boundary layer must be positive"));
        }
        Ok(Self {
            surface,
            switching_gain,
            epsilon,
        })
    }

    pub fn control(&self, z: &Vector4<f64>) -> f64 {
        control_force(self.surface.sigma(z), self.switching_gain, self.epsilon)
    }
}

/// Ackermann full-state gain `kᵀ = eᵀ P(A)` placing `eig(A − B kᵀ)` at `poles`.
pub fn ackermann_gain(plant: &PlantStateSpace, poles: &[Complex64; 4]) -> Result<Vector4<f64>> {
    let e = linalg::ackermann_row(&plant.a, &plant.b)?;
    let p = linalg::matrix_polynomial(&plant.a, poles)?;
    Ok((e * p).transpose())
}

/// Sliding vector `ηᵀ = eᵀ P1(A)` with `P1(λ) = (λ−λ1)(λ−λ2)(λ−λ3)`.
pub fn sliding_vector(plant: &PlantStateSpace, poles: &[Complex64; 3]) -> Result<Vector4<f64>> {
    let e = linalg::ackermann_row(&plant.a, &plant.b)?;
    let p1 = linalg::matrix_polynomial(&plant.a, poles)?;
    Ok((e * p1).transpose())
}

/// Third-order sliding dynamics in the coordinates `w = T z = [z1, z2, z3, σ]`.
pub fn reduced_dynamics(
    plant: &PlantStateSpace,
    eta: &Vector4<f64>,
    k_gain: &Vector4<f64>,
    lambda4: f64,
) -> Result<ReducedDynamics> {
    if !(lambda4 < 0.0) {
        return Err(invalid("lambda4", "must be real and negative"));
    }
    let mut t = Matrix4::<f64>::identity();
    t.set_row(3, &eta.transpose());
    if eta[3].abs() <= 1e-12 * eta.amax() {
        return Err(Error::SingularTransform { eta4: eta[3] });
    }
    let t_inv = t.try_inverse().ok_or(Error::SingularTransform { eta4: eta[3] })?;

    let closed = plant.a - plant.b * k_gain.transpose();
    let transformed = t * closed * t_inv;
    let a1: Matrix3<f64> = transformed.fixed_view::<3, 3>(0, 0).into_owned();

    let beta0 = plant.beta0();
    let alpha1 = beta0 * (eta[3] - eta[2]) + eta[2];
    let alpha2 = (beta0 - 1.0) + alpha1 * plant.mass_ratio();
    let b1 = Vector3::new(0.0, 0.0, alpha2);

    // ν = −ηᵀ(A − λ4 I)T⁻¹; the λ4 term only reaches the σ column.
    let nu = -(eta.transpose() * plant.a * t_inv);
    let nu1 = RowVector3::new(nu[0], nu[1], nu[2]);

    Ok(ReducedDynamics {
        t,
        a1,
        b1,
        alpha1,
        alpha2,
        nu1,
    })
}

/// `M0 = ϖ + χ + ς`.
pub fn switching_gain(chi: f64, varpi: f64, varsigma: f64) -> Result<f64> {
    if !(chi >= 0.0) || !chi.is_finite() {
        return Err(invalid("chi", "must be non-negative"));
    }
    if !(varpi >= 0.0) || !varpi.is_finite() {
        return Err(invalid("varpi", "must be non-negative"));
    }
    if !(varsigma > 0.0) || !varsigma.is_finite() {
        return Err(invalid("varsigma", "must be positive"));
    }
    Ok(varpi + chi + varsigma)
}

/// Boundary-layer approximation of `−M0·sign(σ)`, linear with slope `−M0/ε`
/// inside `|σ| ≤ ε`.
pub fn control_force(sigma: f64, switching_gain: f64, epsilon: f64) -> f64 {
    if sigma > epsilon {
        -switching_gain
    } else if sigma < -epsilon {
        switching_gain
    } else {
        -switching_gain * sigma / epsilon
    }
}
