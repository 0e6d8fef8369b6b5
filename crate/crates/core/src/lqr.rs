//! Infinite-horizon LQR baseline with Bryson-rule weights.
//!
//! The algebraic Riccati equation `AᵀP + PA − PBBᵀP/r + Q = 0` is solved by
//! Kleinman's Newton iteration: each step solves a Lyapunov equation for the
//! current closed loop, starting from a stabilizing pole-placement gain.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector, Matrix4, Vector4};
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::linalg;
use crate::structure::PlantStateSpace;

/// Largest accepted Frobenius norm of the Riccati residual.
pub const RESIDUAL_TOL: f64 = 1e-8;

const MAX_ITERATIONS: usize = 200;

/// Maximum acceptable magnitudes of the states and the control force.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct BrysonMaxima {
    /// m
    pub z1_max: f64,
    /// m
    pub z2_max: f64,
    /// m/s
    pub z3_max: f64,
    /// m/s
    pub z4_max: f64,
    /// N
    pub u_max: f64,
}

/// Diagonal state weight `Q = diag(q)` and scalar control weight `r`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LqrSpec {
    pub q: [f64; 4],
    pub r: f64,
}

impl LqrSpec {
    pub fn new(q: [f64; 4], r: f64) -> Result<Self> {
        if q.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(invalid("q", "state weights must be non-negative"));
        }
        if !(r > 0.0) || !r.is_finite() {
            return Err(invalid("r", "control weight must be positive"));
        }
        Ok(Self { q, r })
    }

    pub fn q_matrix(&self) -> Matrix4<f64> {
        Matrix4::from_diagonal(&Vector4::from(self.q))
    }
}

/// `qᵢᵢ = 1/zᵢ,max²` and `r = 1/u_max²`.
pub fn bryson_weights(max: &BrysonMaxima) -> Result<LqrSpec> {
    let values = [max.z1_max, max.z2_max, max.z3_max, max.z4_max, max.u_max];
    if values.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(invalid("lqr_maxima", "all maxima must be positive"));
    }
    let inv_sq = |v: f64| 1.0 / (v * v);
    LqrSpec::new(
        [
            inv_sq(max.z1_max),
            inv_sq(max.z2_max),
            inv_sq(max.z3_max),
            inv_sq(max.z4_max),
        ],
        inv_sq(max.u_max),
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct LqrResult {
    pub p: Matrix4<f64>,
    /// `k_J = Bᵀ P / r`; the control law is `u = −k_Jᵀ z`.
    pub k_gain: Vector4<f64>,
    pub closed_loop_eigs: [Complex64; 4],
    /// Frobenius norm of the Riccati residual at `p`.
    pub residual: f64,
    pub iterations: usize,
}

/// `AᵀP + PA − PBBᵀP/r + Q`.
pub fn riccati_residual(a: &Matrix4<f64>, b: &Vector4<f64>, spec: &LqrSpec, p: &Matrix4<f64>) -> Matrix4<f64> {
    let pb = p * b;
    a.transpose() * p + p * a - pb * pb.transpose() / spec.r + spec.q_matrix()
}

/// Solves `AcᵀX + X·Ac = −W` through its n²×n² Kronecker form.
fn lyapunov(ac: &DMatrix<f64>, w: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let n = ac.nrows();
    let eye = DMatrix::<f64>::identity(n, n);
    let act = ac.transpose();
    let op = eye.kronecker(&act) + act.kronecker(&eye);
    let rhs = DVector::from_iterator(n * n, w.iter().map(|v| -v));
    let x = op.lu().solve(&rhs)?;
    let x = DMatrix::from_iterator(n, n, x.iter().copied());
    Some((&x + x.transpose()) * 0.5)
}

fn is_stable(eigs: &[Complex64]) -> bool {
    eigs.iter().all(|l| l.re < 0.0)
}

fn dyn_eigenvalues(m: &DMatrix<f64>) -> Vec<Complex64> {
    m.complex_eigenvalues().iter().copied().collect()
}

/// Converged Riccati solution of arbitrary order.
#[derive(Debug, Clone, PartialEq)]
pub struct CareSolution {
    pub p: DMatrix<f64>,
    pub k_gain: DVector<f64>,
    pub iterations: usize,
}

/// Kleinman iteration for the single-input Riccati equation
/// `AᵀP + PA − PbbᵀP/r + Q = 0`. `k_init` must make `A − b·k_initᵀ` stable.
pub fn solve_care(
    a: &DMatrix<f64>,
    b: &DVector<f64>,
    q: &DMatrix<f64>,
    r: f64,
    k_init: &DVector<f64>,
) -> Result<CareSolution> {
    let n = a.nrows();
    if a.ncols() != n || b.len() != n || q.shape() != (n, n) || k_init.len() != n {
        return Err(invalid("riccati", "dimension mismatch"));
    }
    if !(r > 0.0) {
        return Err(invalid("r", "control weight must be positive"));
    }
    if !is_stable(&dyn_eigenvalues(&(a - b * k_init.transpose()))) {
        return Err(Error::Riccati("initial gain is not stabilizing".into()));
    }

    let mut k = k_init.clone();
    let mut p = DMatrix::zeros(n, n);
    let mut iterations = 0;
    for it in 1..=MAX_ITERATIONS {
        iterations = it;
        let ac = a - b * k.transpose();
        let w = q + &k * k.transpose() * r;
        let next = lyapunov(&ac, &w).ok_or_else(|| Error::Riccati("singular Lyapunov operator".into()))?;
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::Riccati(format!("non-finite iterate at step {it}")));
        }
        let step = (&next - &p).norm();
        k = &next * b / r;
        p = next;
        if step <= 1e-14 * p.norm().max(1.0) {
            break;
        }
    }
    Ok(CareSolution {
        p,
        k_gain: k,
        iterations,
    })
}

/// Pole-placement gain that moves every open-loop eigenvalue to
/// `−(|Re λ| + 1) + j·Im λ`.
fn stabilizing_gain(plant: &PlantStateSpace) -> Result<Vector4<f64>> {
    let e = plant.a.complex_eigenvalues();
    let open = [e[0], e[1], e[2], e[3]];
    if is_stable(&open) {
        return Ok(Vector4::zeros());
    }
    let shifted = open.map(|l| Complex64::new(-(l.re.abs() + 1.0), l.im));
    let row = linalg::ackermann_row(&plant.a, &plant.b)?;
    let p = linalg::matrix_polynomial(&plant.a, &shifted)?;
    Ok((row * p).transpose())
}

pub fn solve_lqr(plant: &PlantStateSpace, spec: &LqrSpec) -> Result<LqrResult> {
    let spec = LqrSpec::new(spec.q, spec.r)?;
    let k0 = stabilizing_gain(plant)?;
    let sol = solve_care(
        &DMatrix::from_column_slice(4, 4, plant.a.as_slice()),
        &DVector::from_column_slice(plant.b.as_slice()),
        &DMatrix::from_column_slice(4, 4, spec.q_matrix().as_slice()),
        spec.r,
        &DVector::from_column_slice(k0.as_slice()),
    )?;
    let p = Matrix4::from_column_slice(sol.p.as_slice());
    let k_gain = Vector4::from_column_slice(sol.k_gain.as_slice());

    let residual = riccati_residual(&plant.a, &plant.b, &spec, &p).norm();
    if !(residual < RESIDUAL_TOL) {
        return Err(Error::Riccati(format!(
            "residual {residual:e} after {} iterations",
            sol.iterations
        )));
    }
    let e = (plant.a - plant.b * k_gain.transpose()).complex_eigenvalues();
    let closed_loop_eigs = [e[0], e[1], e[2], e[3]];
    if !is_stable(&closed_loop_eigs) {
        return Err(Error::Riccati("closed loop is not stable".into()));
    }
    Ok(LqrResult {
        p,
        k_gain,
        closed_loop_eigs,
        residual,
        iterations: sol.iterations,
    })
}

/// Damping ratio and natural frequency read off a complex pole pair.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EquivalentPoles {
    pub zeta: f64,
    /// rad/s
    pub omega_n: f64,
    pub omega_ratio: f64,
}

/// Takes the complex pair with the smallest `|Re λ|/|λ|`, i.e. the most
/// lightly damped one.
pub fn lqr_equivalent_polespec(eigs: &[Complex64], omega0: f64) -> Result<EquivalentPoles> {
    if !(omega0 > 0.0) {
        return Err(invalid("omega0", "must be positive"));
    }
    let pole = eigs
        .iter()
        .filter(|l| l.im.abs() > 1e-9 * l.norm())
        .min_by(|x, y| (x.re.abs() / x.norm()).total_cmp(&(y.re.abs() / y.norm())))
        .ok_or(Error::NoComplexPair)?;
    let omega_n = pole.norm();
    Ok(EquivalentPoles {
        zeta: -pole.re / omega_n,
        omega_n,
        omega_ratio: omega_n / omega0,
    })
}
