mod common;

use common::{plant_strategy, poles_for, poles_strategy, quanser_plant};
use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use proptest::prelude::*;
use smc_atmd_core::freq::{band_metrics, band_peak, band_rms, build_transfer_functions, frequency_response};
use smc_atmd_core::{Band, PoleSpec, SlidingSurface};

/// Responses of the reduced sliding system by a direct complex solve of
/// `(jωI − A1) x = B1`, returning `[z1, z2, z3, u]` per unit excitation.
fn direct_response(s: &SlidingSurface, omega: f64) -> [Complex64; 4] {
    let r = &s.reduced;
    let jw = Complex64::new(0.0, omega);
    let a = r.a1.map(|v| Complex64::new(v, 0.0));
    let m: Matrix3<Complex64> = Matrix3::identity() * jw - a;
    let b = r.b1.map(|v| Complex64::new(v, 0.0));
    let x: Vector3<Complex64> = m.lu().solve(&b).unwrap();
    let u = r.nu1.map(|v| Complex64::new(v, 0.0)) * x;
    [x[0], x[1], x[2], u[0] + r.alpha1]
}

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * b.norm().max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn rational_matches_state_space(rp in plant_strategy(), ps in poles_strategy(), w in 0.5f64..150.0) {
        let s = SlidingSurface::synthesize(&rp.plant, poles_for(rp.modal.omega0, ps)).unwrap();
        let set = build_transfer_functions(&s).unwrap();
        let jw = Complex64::new(0.0, w);
        let direct = direct_response(&s, w);
        let rational = [set.g1.eval(jw), set.g2.eval(jw), set.g3.eval(jw), set.gu.eval(jw)];
        for (r, d) in rational.iter().zip(direct) {
            prop_assert!(close(*r, d, 1e-8), "ω={w}: rational {r} vs direct {d}");
        }
    }

    #[test]
    fn metrics_scale_linearly_with_delta(rp in plant_strategy(), ps in poles_strategy(), k in 0.1f64..10.0) {
        let s = SlidingSurface::synthesize(&rp.plant, poles_for(rp.modal.omega0, ps)).unwrap();
        let set = build_transfer_functions(&s).unwrap();
        let a = band_metrics(&set, 1.0, Band::default(), 300).unwrap();
        let b = band_metrics(&set, k, Band::default(), 300).unwrap();
        for (x, y) in [(a.kappa1, b.kappa1), (a.kappa2, b.kappa2), (a.kappa3, b.kappa3), (a.kappa_u, b.kappa_u), (a.chi, b.chi)] {
            prop_assert!((y - k * x).abs() <= 1e-12 * (k * x).abs().max(1e-300));
        }
    }
}

#[test]
fn sweep_metrics_agree_with_single_metrics() {
    let plant = quanser_plant();
    let s = SlidingSurface::synthesize(&plant, PoleSpec::from_tuning(0.5, 5.5).unwrap()).unwrap();
    let set = build_transfer_functions(&s).unwrap();
    let band = Band::default();
    let m = band_metrics(&set, 3.0, band, 2000).unwrap();
    assert_eq!(m.kappa1, band_rms(&set.g1, 3.0, band, 2000).unwrap());
    assert_eq!(m.kappa2, band_rms(&set.g2, 3.0, band, 2000).unwrap());
    assert_eq!(m.kappa3, band_rms(&set.g3, 3.0, band, 2000).unwrap());
    assert_eq!(m.kappa_u, band_rms(&set.gu, 3.0, band, 2000).unwrap());
    assert_eq!(m.chi, band_peak(&set.gu, 3.0, band, 2000).unwrap());

    let rows = frequency_response(&set, 3.0, band, 2000).unwrap();
    let mean_sq = rows.iter().map(|r| r[2] * r[2]).sum::<f64>() / rows.len() as f64;
    assert_eq!(mean_sq.sqrt(), m.kappa2);
}

/// Golden-section search for the maximum of `f` on `[a, b]`.
fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if f(c) > f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    f(0.5 * (a + b))
}

#[test]
fn grid_peak_is_close_to_refined_peak() {
    let plant = quanser_plant();
    let omega0 = (226.23f64 / 1.84).sqrt();
    let band = Band::default();
    for (zeta, ratio) in [(0.5, 0.5), (0.5, 0.55), (0.7, 0.8), (0.9, 1.0)] {
        let s = SlidingSurface::synthesize(&plant, PoleSpec::from_tuning(zeta, ratio * omega0).unwrap()).unwrap();
        let set = build_transfer_functions(&s).unwrap();
        let chi = band_peak(&set.gu, 3.0, band, 2000).unwrap();
        let step = (band.upper - band.lower) / 1999.0;
        let rows = frequency_response(&set, 3.0, band, 2000).unwrap();
        let k = rows
            .iter()
            .enumerate()
            .max_by(|x, y| x.1[4].total_cmp(&y.1[4]))
            .unwrap()
            .0;
        let w = rows[k][0];
        let lo = (w - step).max(band.lower);
        let hi = (w + step).min(band.upper);
        let refined = golden_max(|x| 3.0 * set.gu.magnitude(x), lo, hi).max(chi);
        assert!(chi <= refined);
        assert!((refined - chi) / refined < 0.005, "χ {chi} vs refined {refined}");
    }
}
