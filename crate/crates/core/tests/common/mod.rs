#![allow(dead_code)]

use proptest::prelude::*;
use smc_atmd_core::structure::assemble_plant;
use smc_atmd_core::{AtmdParams, Bounds, ModalModel, PlantStateSpace, PoleSpec};

pub fn quanser_modal() -> ModalModel {
    ModalModel::from_parameters(1.84, 0.16, 226.23, 1.0).unwrap()
}

pub fn quanser_plant() -> PlantStateSpace {
    let atmd = AtmdParams {
        mass: 0.79,
        stiffness: 0.0,
        damping: 6.85,
        friction: 0.43,
    };
    assemble_plant(&quanser_modal(), &atmd, Bounds { delta: 3.0, varpi: 0.5 }).unwrap()
}

/// A physically plausible single-mode building with a damper on top.
#[derive(Debug, Clone)]
pub struct RandomPlant {
    pub modal: ModalModel,
    pub plant: PlantStateSpace,
}

pub fn plant_strategy() -> impl Strategy<Value = RandomPlant> {
    (
        1.0f64..60.0, // m0
        2.0f64..20.0, // ω0
        0.0f64..0.05, // modal damping ratio
        0.8f64..1.5,  // β0
        0.02f64..0.5, // md / m0
        0.0f64..1.2,  // damper frequency / ω0
        0.0f64..0.3,  // damper damping ratio
    )
        .prop_map(|(m0, w0, z0, beta0, mu, fd, zd)| {
            let k0 = m0 * w0 * w0;
            let c0 = 2.0 * z0 * m0 * w0;
            let md = mu * m0;
            let wd = fd * w0;
            let kd = md * wd * wd;
            let cd = 2.0 * zd * md * w0;
            let modal = ModalModel::from_parameters(m0, c0, k0, beta0).unwrap();
            let atmd = AtmdParams {
                mass: md,
                stiffness: kd,
                damping: cd,
                friction: 0.0,
            };
            let plant = assemble_plant(&modal, &atmd, Bounds { delta: 1.0, varpi: 0.0 }).unwrap();
            RandomPlant { modal, plant }
        })
}

/// Pole set scaled to the plant's natural frequency.
pub fn poles_strategy() -> impl Strategy<Value = (f64, f64, f64)> {
    (0.3f64..0.9, 0.4f64..1.2, 2.0f64..15.0)
}

pub fn poles_for(omega0: f64, (zeta, ratio, l4): (f64, f64, f64)) -> PoleSpec {
    let wn = ratio * omega0;
    PoleSpec::new(zeta, wn, -3.0 * zeta * wn, -l4 * zeta * wn).unwrap()
}
