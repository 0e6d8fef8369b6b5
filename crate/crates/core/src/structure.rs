//! Shear-building matrices, first-mode reduction and the coupled
//! building + ATMD state-space model.
//!
//! State ordering is `z = [x_d, x_N, ẋ_d, ẋ_N]`: damper stroke relative to
//! the top floor, top-floor displacement relative to the ground, and their
//! velocities. Everything is SI.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector, Matrix4, Vector4};

use crate::error::{invalid, Error, Result};
use crate::linalg;

/// How the damping matrix of the building is specified.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub enum DampingSpec {
    /// Explicit symmetric tridiagonal matrix, row-major.
    Matrix(Vec<Vec<f64>>),
    /// `C = a0·M + a1·K` fitted to damping ratios at the given 1-based modes.
    Rayleigh { modes: Vec<usize>, ratios: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BuildingModel {
    pub floor_masses: Vec<f64>,
    pub interstory_stiffnesses: Vec<f64>,
    pub mass: DMatrix<f64>,
    pub stiffness: DMatrix<f64>,
    pub damping: DMatrix<f64>,
}

impl BuildingModel {
    pub fn stories(&self) -> usize {
        self.floor_masses.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct AtmdParams {
    /// m_d (kg)
    pub mass: f64,
    /// k_d (N/m)
    pub stiffness: f64,
    /// c_d (N·s/m)
    pub damping: f64,
    /// μ_d, Coulomb friction level (N)
    #[cfg_attr(feature = "serde", serde(default))]
    pub friction: f64,
}

impl AtmdParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.mass > 0.0) || !self.mass.is_finite() {
            return Err(invalid("atmd.mass", "must be positive"));
        }
        for (name, v) in [
            ("atmd.stiffness", self.stiffness),
            ("atmd.damping", self.damping),
            ("atmd.friction", self.friction),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(invalid(name, "must be non-negative"));
            }
        }
        Ok(())
    }
}

/// Known bounds on the ground acceleration (δ, m/s²) and friction (ϖ, N).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct Bounds {
    pub delta: f64,
    pub varpi: f64,
}

impl Bounds {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0) || !self.delta.is_finite() {
            return Err(invalid("bounds.delta", "must be positive"));
        }
        if !(self.varpi >= 0.0) || !self.varpi.is_finite() {
            return Err(invalid("bounds.varpi", "must be non-negative"));
        }
        Ok(())
    }
}

/// Dominant-mode quantities of the building.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ModalModel {
    /// First mode shape scaled so its top entry equals one.
    pub phi0: Vec<f64>,
    pub m0: f64,
    pub c0: f64,
    pub k0: f64,
    pub beta0: f64,
    pub omega0: f64,
}

impl ModalModel {
    /// Modal model given directly by its parameters (single-mode rigs).
    pub fn from_parameters(m0: f64, c0: f64, k0: f64, beta0: f64) -> Result<Self> {
        if !(m0 > 0.0) || !m0.is_finite() {
            return Err(invalid("m0", "must be positive"));
        }
        if !(k0 > 0.0) || !k0.is_finite() {
            return Err(invalid("k0", "must be positive"));
        }
        if !(c0 >= 0.0) || !c0.is_finite() {
            return Err(invalid("c0", "must be non-negative"));
        }
        if !beta0.is_finite() {
            return Err(invalid("beta0", "must be finite"));
        }
        Ok(Self {
            phi0: vec![1.0],
            m0,
            c0,
            k0,
            beta0,
            omega0: libm::sqrt(k0 / m0),
        })
    }
}

/// Linear part of the coupled model `ż = A z + B (u − f(z₃)) + D ẍ_g`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantStateSpace {
    pub a: Matrix4<f64>,
    pub b: Vector4<f64>,
    pub d: Vector4<f64>,
    pub bounds: Bounds,
    /// Coulomb friction level μ_d used by the simulator (N).
    pub friction: f64,
}

impl PlantStateSpace {
    /// β0, read back from `D = [0, 0, β0 − 1, −β0]ᵀ`.
    pub fn beta0(&self) -> f64 {
        -self.d[3]
    }

    /// `(m0 + md)/(m0·md)`, the third entry of `B`.
    pub fn mass_ratio(&self) -> f64 {
        self.b[2]
    }
}

/// Assembles the diagonal mass and tridiagonal stiffness matrices of an
/// N-story shear building, and the damping matrix per `damping`.
pub fn build_shear_building(masses: &[f64], stiffnesses: &[f64], damping: &DampingSpec) -> Result<BuildingModel> {
    let n = masses.len();
    if n != stiffnesses.len() {
        return Err(Error::LengthMismatch {
            masses: n,
            stiffnesses: stiffnesses.len(),
        });
    }
    if n == 0 {
        return Err(invalid("floors", "at least one story is required"));
    }
    if masses.iter().any(|m| !(*m > 0.0) || !m.is_finite()) {
        return Err(invalid("mass", "floor masses must be positive"));
    }
    if stiffnesses.iter().any(|k| !(*k > 0.0) || !k.is_finite()) {
        return Err(invalid("stiffness", "interstory stiffnesses must be positive"));
    }

    let mass = DMatrix::from_diagonal(&DVector::from_column_slice(masses));
    let mut stiffness = DMatrix::zeros(n, n);
    for i in 0..n {
        let above = if i + 1 < n { stiffnesses[i + 1] } else { 0.0 };
        stiffness[(i, i)] = stiffnesses[i] + above;
        if i + 1 < n {
            stiffness[(i, i + 1)] = -above;
            stiffness[(i + 1, i)] = -above;
        }
    }

    let damping = match damping {
        DampingSpec::Matrix(rows) => explicit_damping(rows, n)?,
        DampingSpec::Rayleigh { modes, ratios } => {
            if modes.len() != ratios.len() {
                return Err(invalid(
                    "damping.rayleigh",
                    "modes and ratios must have the same length",
                ));
            }
            let pairs: Vec<(usize, f64)> = modes.iter().copied().zip(ratios.iter().copied()).collect();
            rayleigh_damping(&mass, &stiffness, &pairs)?
        }
    };

    Ok(BuildingModel {
        floor_masses: masses.to_vec(),
        interstory_stiffnesses: stiffnesses.to_vec(),
        mass,
        stiffness,
        damping,
    })
}

fn explicit_damping(rows: &[Vec<f64>], n: usize) -> Result<DMatrix<f64>> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(invalid("damping.matrix", format!("must be {n}×{n}")));
    }
    let c = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    for i in 0..n {
        for j in 0..n {
            let v = c[(i, j)];
            if !v.is_finite() {
                return Err(invalid("damping.matrix", "entries must be finite"));
            }
            if i.abs_diff(j) > 1 && v != 0.0 {
                return Err(invalid("damping.matrix", "must be tridiagonal"));
            }
            let scale = v.abs().max(c[(j, i)].abs()).max(1.0);
            if (v - c[(j, i)]).abs() > 1e-12 * scale {
                return Err(invalid("damping.matrix", "must be symmetric"));
            }
        }
    }
    Ok(c)
}

/// Natural frequencies (rad/s, ascending) and mass-orthogonal mode shapes
/// (columns) of `K v = ω² M v` for a diagonal `M`.
pub fn natural_modes(mass: &DMatrix<f64>, stiffness: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = mass.nrows();
    let inv_sqrt: Vec<f64> = (0..n).map(|i| 1.0 / libm::sqrt(mass[(i, i)])).collect();
    let sym = DMatrix::from_fn(n, n, |i, j| inv_sqrt[i] * stiffness[(i, j)] * inv_sqrt[j]);
    let eig = sym
        .try_symmetric_eigen(1e-15, 10_000)
        .ok_or_else(|| Error::Eigen("symmetric eigen-solver did not converge".into()))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let mut omegas = Vec::with_capacity(n);
    let mut shapes = DMatrix::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        let lambda = eig.eigenvalues[k];
        if !(lambda > 0.0) {
            return Err(Error::Eigen(format!("non-positive eigenvalue {lambda:e}")));
        }
        omegas.push(libm::sqrt(lambda));
        for i in 0..n {
            shapes[(i, col)] = inv_sqrt[i] * eig.eigenvectors[(i, k)];
        }
    }
    Ok((omegas, shapes))
}

/// Rayleigh damping `C = a0·M + a1·K` matching the damping ratios of two
/// 1-based modes. A single pair is accepted only for a one-story building,
/// in which case `C = 2ζω₁·M`.
pub fn rayleigh_damping(mass: &DMatrix<f64>, stiffness: &DMatrix<f64>, pairs: &[(usize, f64)]) -> Result<DMatrix<f64>> {
    let n = mass.nrows();
    for &(mode, ratio) in pairs {
        if mode == 0 || mode > n {
            return Err(Error::ModeOutOfRange {
                index: mode,
                stories: n,
            });
        }
        if !(ratio > 0.0 && ratio < 1.0) {
            return Err(invalid("damping.ratio", "must lie in (0, 1)"));
        }
    }
    let (omegas, _) = natural_modes(mass, stiffness)?;
    let (a0, a1) = match pairs {
        [(mode, ratio)] if n == 1 => (2.0 * ratio * omegas[mode - 1], 0.0),
        [(m1, z1), (m2, z2)] => {
            let (w1, w2) = (omegas[m1 - 1], omegas[m2 - 1]);
            // ζ = (a0/ω + a1·ω)/2 at both modes.
            if m1 == m2 || (w2 - w1).abs() <= 1e-12 * w1.max(w2) {
                return Err(Error::CoincidentModes {
                    first: *m1,
                    second: *m2,
                });
            }
            let a1 = 2.0 * (z2 * w2 - z1 * w1) / (w2 * w2 - w1 * w1);
            let a0 = 2.0 * w1 * w2 * (z1 * w2 - z2 * w1) / (w2 * w2 - w1 * w1);
            (a0, a1)
        }
        _ => {
            return Err(invalid(
                "damping.rayleigh",
                "two (mode, ratio) pairs are required unless the building has one story",
            ))
        }
    };
    Ok(mass * a0 + stiffness * a1)
}

/// First-mode reduction of a shear building with the damper on the top floor.
pub fn modal_reduce(building: &BuildingModel) -> Result<ModalModel> {
    let n = building.stories();
    let (omegas, shapes) = natural_modes(&building.mass, &building.stiffness)?;
    let raw = shapes.column(0);
    let top = raw[n - 1];
    if top.abs() <= 1e-12 * raw.amax() {
        return Err(Error::UnscalableMode);
    }
    let phi = raw / top;

    let m0 = (phi.transpose() * &building.mass * &phi)[(0, 0)];
    let c0 = (phi.transpose() * &building.damping * &phi)[(0, 0)];
    let k0 = (phi.transpose() * &building.stiffness * &phi)[(0, 0)];
    let ones = DVector::from_element(n, 1.0);
    let beta0 = (phi.transpose() * &building.mass * ones)[(0, 0)] / m0;
    let omega0 = libm::sqrt(k0 / m0);
    debug_assert!((omega0 - omegas[0]).abs() <= 1e-6 * omegas[0]);

    Ok(ModalModel {
        phi0: phi.iter().copied().collect(),
        m0,
        c0,
        k0,
        beta0,
        omega0,
    })
}

/// Coupled four-state model of the dominant mode and the damper.
pub fn assemble_plant(modal: &ModalModel, atmd: &AtmdParams, bounds: Bounds) -> Result<PlantStateSpace> {
    atmd.validate()?;
    bounds.validate()?;
    let (m0, c0, k0, b0) = (modal.m0, modal.c0, modal.k0, modal.beta0);
    if !(m0 > 0.0) || !(k0 > 0.0) {
        return Err(invalid("modal", "m0 and k0 must be positive"));
    }
    let (md, cd, kd) = (atmd.mass, atmd.damping, atmd.stiffness);
    let s = (m0 + md) / (m0 * md);

    #[rustfmt::skip]
    let a = Matrix4::new(
        0.0,      0.0,      1.0,      0.0,
        0.0,      0.0,      0.0,      1.0,
        -kd * s,  k0 / m0,  -cd * s,  c0 / m0,
        kd / m0,  -k0 / m0, cd / m0,  -c0 / m0,
    );
    let b = Vector4::new(0.0, 0.0, s, -1.0 / m0);
    let d = Vector4::new(0.0, 0.0, b0 - 1.0, -b0);

    let rc = linalg::rcond(&linalg::controllability_matrix(&a, &b));
    if !(rc > linalg::CONTROLLABILITY_RCOND) {
        return Err(Error::Uncontrollable { rcond: rc });
    }
    Ok(PlantStateSpace {
        a,
        b,
        d,
        bounds,
        friction: atmd.friction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn rayleigh_1pct() -> DampingSpec {
        DampingSpec::Rayleigh {
            modes: vec![1, 2],
            ratios: vec![0.01, 0.01],
        }
    }

    fn five_story() -> BuildingModel {
        build_shear_building(&[10.0; 5], &[1.21e4; 5], &rayleigh_1pct()).unwrap()
    }

    #[test]
    fn five_story_stiffness_assembly() {
        let b = five_story();
        for i in 0..4 {
            assert_eq!(b.stiffness[(i, i)], 2.42e4);
            assert_eq!(b.stiffness[(i, i + 1)], -1.21e4);
            assert_eq!(b.stiffness[(i + 1, i)], -1.21e4);
        }
        assert_eq!(b.stiffness[(4, 4)], 1.21e4);
        assert_eq!(b.stiffness[(0, 2)], 0.0);
        assert_eq!(b.mass, DMatrix::from_diagonal_element(5, 5, 10.0));
    }

    #[test]
    fn single_and_two_story_assembly() {
        let one = build_shear_building(
            &[1.0],
            &[1.0],
            &DampingSpec::Rayleigh {
                modes: vec![1],
                ratios: vec![0.05],
            },
        )
        .unwrap();
        assert_eq!(one.mass[(0, 0)], 1.0);
        assert_eq!(one.stiffness[(0, 0)], 1.0);
        assert_relative_eq!(one.damping[(0, 0)], 0.1, epsilon = 1e-15);

        let two = build_shear_building(&[1.0, 2.0], &[3.0, 5.0], &DampingSpec::Matrix(vec![vec![0.0; 2]; 2])).unwrap();
        assert_eq!(two.stiffness, DMatrix::from_row_slice(2, 2, &[8.0, -5.0, -5.0, 5.0]));
    }

    #[test]
    fn invalid_building_inputs() {
        let r = rayleigh_1pct();
        assert!(matches!(
            build_shear_building(&[1.0, 1.0], &[1.0], &r),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            build_shear_building(&[1.0, -1.0], &[1.0, 1.0], &r),
            Err(Error::InvalidParameter { .. })
        ));
        assert!(matches!(
            build_shear_building(&[1.0, 1.0], &[1.0, 0.0], &r),
            Err(Error::InvalidParameter { .. })
        ));
        let bad = DampingSpec::Matrix(vec![vec![1.0, 0.5], vec![0.4, 1.0]]);
        assert!(build_shear_building(&[1.0, 1.0], &[1.0, 1.0], &bad).is_err());
    }

    #[test]
    fn rayleigh_closed_form_equal_ratios() {
        let b = five_story();
        let (w, _) = natural_modes(&b.mass, &b.stiffness).unwrap();
        let zeta = 0.01;
        let a0 = 2.0 * zeta * w[0] * w[1] / (w[0] + w[1]);
        let a1 = 2.0 * zeta / (w[0] + w[1]);
        let expected = &b.mass * a0 + &b.stiffness * a1;
        for (x, y) in b.damping.iter().zip(expected.iter()) {
            assert_relative_eq!(*x, *y, max_relative = 1e-12, epsilon = 1e-12);
        }
    }

    #[test]
    fn rayleigh_rejects_coincident_and_out_of_range_modes() {
        let b = five_story();
        assert!(matches!(
            rayleigh_damping(&b.mass, &b.stiffness, &[(2, 0.01), (2, 0.01)]),
            Err(Error::CoincidentModes { .. })
        ));
        assert!(matches!(
            rayleigh_damping(&b.mass, &b.stiffness, &[(1, 0.01), (6, 0.01)]),
            Err(Error::ModeOutOfRange { index: 6, .. })
        ));
        // Two identical stories with no coupling would be needed for truly
        // equal frequencies; the pair (1,1) exercises the same branch.
        assert!(matches!(
            rayleigh_damping(&b.mass, &b.stiffness, &[(1, 0.02), (1, 0.01)]),
            Err(Error::CoincidentModes { .. })
        ));
    }

    #[test]
    fn single_story_reduces_to_itself() {
        let b = build_shear_building(
            &[3.0],
            &[12.0],
            &DampingSpec::Rayleigh {
                modes: vec![1],
                ratios: vec![0.02],
            },
        )
        .unwrap();
        let m = modal_reduce(&b).unwrap();
        assert_eq!(m.phi0, vec![1.0]);
        assert_relative_eq!(m.m0, 3.0);
        assert_relative_eq!(m.k0, 12.0);
        assert_relative_eq!(m.beta0, 1.0);
        assert_relative_eq!(m.omega0, 2.0);
    }

    #[test]
    fn five_story_modal_values() {
        let m = modal_reduce(&five_story()).unwrap();
        assert_relative_eq!(m.m0, 28.07, max_relative = 0.01);
        assert_relative_eq!(m.k0, 2.75e3, max_relative = 0.01);
        assert_relative_eq!(m.omega0, 9.9, max_relative = 0.01);
        assert_eq!(*m.phi0.last().unwrap(), 1.0);
    }

    #[test]
    fn plant_closed_forms() {
        let modal = ModalModel::from_parameters(1.84, 0.16, 226.23, 1.0).unwrap();
        let atmd = AtmdParams {
            mass: 0.79,
            stiffness: 0.0,
            damping: 6.85,
            friction: 0.43,
        };
        let p = assemble_plant(&modal, &atmd, Bounds { delta: 3.0, varpi: 0.5 }).unwrap();
        assert_eq!(p.d, Vector4::new(0.0, 0.0, 0.0, -1.0));
        let s = (1.84 + 0.79) / (1.84 * 0.79);
        assert_eq!(p.b, Vector4::new(0.0, 0.0, s, -1.0 / 1.84));
        assert_eq!(p.a[(2, 2)], -6.85 * s);
        assert_eq!(p.a[(3, 1)], -226.23 / 1.84);
    }

    #[test]
    fn invalid_atmd_rejected() {
        let modal = ModalModel::from_parameters(1.0, 0.1, 1.0, 1.0).unwrap();
        let atmd = AtmdParams {
            mass: 0.0,
            stiffness: 1.0,
            damping: 0.1,
            friction: 0.0,
        };
        assert!(assemble_plant(&modal, &atmd, Bounds { delta: 1.0, varpi: 0.0 }).is_err());
        let atmd = AtmdParams {
            mass: 1.0,
            stiffness: 1.0,
            damping: 0.1,
            friction: 0.0,
        };
        assert!(assemble_plant(&modal, &atmd, Bounds { delta: 0.0, varpi: 0.0 }).is_err());
    }
}
