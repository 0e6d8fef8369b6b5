use approx::assert_relative_eq;
use nalgebra::DMatrix;
use proptest::prelude::*;
use smc_atmd_core::structure::{build_shear_building, modal_reduce, natural_modes, rayleigh_damping};
use smc_atmd_core::DampingSpec;

fn rayleigh(m1: usize, m2: usize, z: f64) -> DampingSpec {
    DampingSpec::Rayleigh {
        modes: vec![m1, m2],
        ratios: vec![z, z],
    }
}

#[test]
fn five_story_first_mode() {
    let b = build_shear_building(&[10.0; 5], &[1.21e4; 5], &rayleigh(1, 2, 0.01)).unwrap();
    let m = modal_reduce(&b).unwrap();
    assert_relative_eq!(m.m0, 28.07, max_relative = 0.01);
    assert_relative_eq!(m.k0, 2.75e3, max_relative = 0.01);
    assert_relative_eq!(m.omega0, 9.9, max_relative = 0.01);
}

/// Roots of `det(K − ω²M) = 0` for two stories, solved as a quadratic in ω².
fn two_story_frequencies(m: [f64; 2], k: [f64; 2]) -> [f64; 2] {
    let (k11, k12, k22) = (k[0] + k[1], -k[1], k[1]);
    let a = m[0] * m[1];
    let b = -(k11 * m[1] + k22 * m[0]);
    let c = k11 * k22 - k12 * k12;
    let disc = (b * b - 4.0 * a * c).sqrt();
    let lo = (-b - disc) / (2.0 * a);
    let hi = (-b + disc) / (2.0 * a);
    [lo.sqrt(), hi.sqrt()]
}

proptest! {
    #[test]
    fn two_story_eigen_matches_closed_form(
        m1 in 0.5f64..100.0, m2 in 0.5f64..100.0,
        k1 in 10.0f64..1e5, k2 in 10.0f64..1e5,
    ) {
        let b = build_shear_building(&[m1, m2], &[k1, k2], &DampingSpec::Matrix(vec![vec![0.0; 2]; 2])).unwrap();
        let (w, _) = natural_modes(&b.mass, &b.stiffness).unwrap();
        let expected = two_story_frequencies([m1, m2], [k1, k2]);
        for i in 0..2 {
            prop_assert!((w[i] - expected[i]).abs() <= 1e-9 * expected[i]);
        }
    }

    #[test]
    fn shapes_satisfy_eigen_equation(
        masses in proptest::collection::vec(0.5f64..50.0, 1..8),
        seed in proptest::collection::vec(100.0f64..5e4, 8),
    ) {
        let n = masses.len();
        let ks = &seed[..n];
        let b = build_shear_building(&masses, ks, &DampingSpec::Matrix(vec![vec![0.0; n]; n])).unwrap();
        let (w, shapes) = natural_modes(&b.mass, &b.stiffness).unwrap();
        for (i, wi) in w.iter().enumerate() {
            let v = shapes.column(i);
            let res = &b.stiffness * v - &b.mass * v * (wi * wi);
            prop_assert!(res.norm() <= 1e-9 * (&b.stiffness * v).norm());
        }
        prop_assert!(w.windows(2).all(|p| p[0] <= p[1]));
    }

    #[test]
    fn modal_reduction_is_consistent(
        masses in proptest::collection::vec(0.5f64..50.0, 1..8),
        seed in proptest::collection::vec(100.0f64..5e4, 8),
        scale in 0.1f64..10.0,
    ) {
        let n = masses.len();
        let ks = &seed[..n];
        let zero = DampingSpec::Matrix(vec![vec![0.0; n]; n]);
        let b = build_shear_building(&masses, ks, &zero).unwrap();
        let m = modal_reduce(&b).unwrap();
        prop_assert_eq!(*m.phi0.last().unwrap(), 1.0);
        let (w, _) = natural_modes(&b.mass, &b.stiffness).unwrap();
        prop_assert!((m.omega0 - w[0]).abs() <= 1e-9 * w[0]);

        // Scaling every mass and stiffness by the same factor leaves the
        // shape, ω0 and β0 unchanged and scales m0, k0.
        let sm: Vec<f64> = masses.iter().map(|v| v * scale).collect();
        let sk: Vec<f64> = ks.iter().map(|v| v * scale).collect();
        let s = modal_reduce(&build_shear_building(&sm, &sk, &zero).unwrap()).unwrap();
        prop_assert!((s.m0 - scale * m.m0).abs() <= 1e-9 * s.m0);
        prop_assert!((s.k0 - scale * m.k0).abs() <= 1e-9 * s.k0);
        prop_assert!((s.omega0 - m.omega0).abs() <= 1e-9 * m.omega0);
        prop_assert!((s.beta0 - m.beta0).abs() <= 1e-9 * m.beta0.abs());
    }

    #[test]
    fn rayleigh_round_trip(
        n in 2usize..7,
        pick in (0usize..6, 0usize..6),
        z1 in 0.005f64..0.2, z2 in 0.005f64..0.2,
    ) {
        let (i, j) = (pick.0 % n, pick.1 % n);
        prop_assume!(i != j);
        let masses: Vec<f64> = (0..n).map(|k| 5.0 + k as f64).collect();
        let ks: Vec<f64> = (0..n).map(|k| 1e4 - 500.0 * k as f64).collect();
        let zero = DampingSpec::Matrix(vec![vec![0.0; n]; n]);
        let b = build_shear_building(&masses, &ks, &zero).unwrap();
        let c = rayleigh_damping(&b.mass, &b.stiffness, &[(i + 1, z1), (j + 1, z2)]).unwrap();
        let (w, shapes) = natural_modes(&b.mass, &b.stiffness).unwrap();
        for (mode, zeta) in [(i, z1), (j, z2)] {
            let v = shapes.column(mode);
            let cm = (v.transpose() * &c * v)[(0, 0)];
            let mm = (v.transpose() * &b.mass * v)[(0, 0)];
            let recovered = cm / (2.0 * w[mode] * mm);
            prop_assert!((recovered - zeta).abs() <= 1e-10, "{recovered} vs {zeta}");
        }
    }
}

#[test]
fn explicit_damping_is_kept() {
    let c = vec![vec![2.0, -1.0, 0.0], vec![-1.0, 2.0, -1.0], vec![0.0, -1.0, 1.0]];
    let b = build_shear_building(&[1.0; 3], &[1.0; 3], &DampingSpec::Matrix(c.clone())).unwrap();
    assert_eq!(b.damping, DMatrix::from_fn(3, 3, |i, j| c[i][j]));
}
