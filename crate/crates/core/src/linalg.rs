//! Small dense helpers shared by the design modules: controllability,
//! matrix polynomials built from pole sets, and real polynomial arithmetic.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{Matrix4, RowVector4, Vector4};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Minimum reciprocal condition number accepted for the controllability matrix.
pub const CONTROLLABILITY_RCOND: f64 = 1e-12;

/// Relative tolerance used to pair a complex pole with its conjugate.
const CONJUGATE_TOL: f64 = 1e-9;

/// `[B, AB, A²B, A³B]`.
pub fn controllability_matrix(a: &Matrix4<f64>, b: &Vector4<f64>) -> Matrix4<f64> {
    let ab = a * b;
    let a2b = a * ab;
    let a3b = a * a2b;
    Matrix4::from_columns(&[*b, ab, a2b, a3b])
}

fn norm1(m: &Matrix4<f64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Reciprocal 1-norm condition number, zero when the matrix is singular.
pub fn rcond(m: &Matrix4<f64>) -> f64 {
    match m.try_inverse() {
        Some(inv) => {
            let k = norm1(m) * norm1(&inv);
            if k.is_finite() && k > 0.0 {
                1.0 / k
            } else {
                0.0
            }
        }
        None => 0.0,
    }
}

/// Last row of the inverse controllability matrix, `[0,0,0,1]·[B AB A²B A³B]⁻¹`.
pub fn ackermann_row(a: &Matrix4<f64>, b: &Vector4<f64>) -> Result<RowVector4<f64>> {
    let co = controllability_matrix(a, b);
    let rc = rcond(&co);
    if !(rc > CONTROLLABILITY_RCOND) {
        return Err(Error::Uncontrollable { rcond: rc });
    }
    let lu = co.transpose().lu();
    let e = lu
        .solve(&Vector4::new(0.0, 0.0, 0.0, 1.0))
        .ok_or(Error::Uncontrollable { rcond: rc })?;
    Ok(e.transpose())
}

/// Real factors of a pole set: either a single real root `r` (factor `λ - r`)
/// or a conjugate pair written as `λ² + p·λ + q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RealFactor {
    Linear(f64),
    Quadratic { p: f64, q: f64 },
}

/// Groups poles into real linear and quadratic factors. Poles whose imaginary
/// part is within tolerance of zero are treated as real.
pub fn real_factors(poles: &[Complex64]) -> Result<Vec<RealFactor>> {
    let mut used = vec![false; poles.len()];
    let mut out = Vec::with_capacity(poles.len());
    for i in 0..poles.len() {
        if used[i] {
            continue;
        }
        let pi = poles[i];
        if !pi.re.is_finite() || !pi.im.is_finite() {
            return Err(Error::NonConjugatePoles);
        }
        let scale = pi.norm().max(1.0);
        used[i] = true;
        if pi.im.abs() <= CONJUGATE_TOL * scale {
            out.push(RealFactor::Linear(pi.re));
            continue;
        }
        let partner = (i + 1..poles.len())
            .filter(|&j| !used[j])
            .find(|&j| (poles[j] - pi.conj()).norm() <= CONJUGATE_TOL * scale)
            .ok_or(Error::NonConjugatePoles)?;
        used[partner] = true;
        out.push(RealFactor::Quadratic {
            p: -2.0 * pi.re,
            q: pi.norm_sqr(),
        });
    }
    Ok(out)
}

/// Evaluates `Π (A - λᵢ I)` with conjugate pairs merged into real quadratics.
pub fn matrix_polynomial(a: &Matrix4<f64>, poles: &[Complex64]) -> Result<Matrix4<f64>> {
    let eye = Matrix4::<f64>::identity();
    let mut acc = eye;
    for f in real_factors(poles)? {
        let factor = match f {
            RealFactor::Linear(r) => a - eye * r,
            RealFactor::Quadratic { p, q } => a * a + a * p + eye * q,
        };
        acc *= factor;
    }
    Ok(acc)
}

/// Monic polynomial (descending coefficients) with the given real factors.
pub fn poly_from_factors(factors: &[RealFactor]) -> Vec<f64> {
    let mut acc = vec![1.0];
    for f in factors {
        let rhs: &[f64] = match f {
            RealFactor::Linear(r) => &[1.0, -r],
            RealFactor::Quadratic { p, q } => &[1.0, *p, *q],
        };
        acc = poly_mul(&acc, rhs);
    }
    acc
}

pub fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Horner evaluation of a real polynomial (descending powers) at complex `s`.
pub fn poly_eval(coeffs: &[f64], s: Complex64) -> Complex64 {
    coeffs.iter().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * s + c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjugate_grouping() {
        let poles = [
            Complex64::new(-1.0, 2.0),
            Complex64::new(-3.0, 0.0),
            Complex64::new(-1.0, -2.0),
        ];
        let f = real_factors(&poles).unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(f[0], RealFactor::Quadratic { p: 2.0, q: 5.0 });
        assert_eq!(f[1], RealFactor::Linear(-3.0));
        assert_eq!(poly_from_factors(&f), vec![1.0, 5.0, 11.0, 15.0]);
    }

    #[test]
    fn unpaired_complex_pole_rejected() {
        let poles = [Complex64::new(-1.0, 2.0), Complex64::new(-1.0, 2.0)];
        assert_eq!(real_factors(&poles), Err(Error::NonConjugatePoles));
    }

    #[test]
    fn uncontrollable_pair_rejected() {
        let a = Matrix4::<f64>::identity();
        let b = Vector4::new(1.0, 0.0, 0.0, 0.0);
        assert!(matches!(ackermann_row(&a, &b), Err(Error::Uncontrollable { .. })));
    }

    #[test]
    fn horner_matches_expansion() {
        let c = [1.0, 5.0, 11.0, 15.0];
        let s = Complex64::new(0.3, -1.7);
        let direct = s * s * s + s * s * 5.0 + s * 11.0 + 15.0;
        assert!((poly_eval(&c, s) - direct).norm() < 1e-12);
    }
}
