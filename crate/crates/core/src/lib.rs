//! Design and verification of an Ackermann-formula sliding mode controller
//! for a building equipped with an active tuned mass damper.
//!
//! The pipeline runs from the shear-building description ([`structure`])
//! through sliding-surface synthesis ([`smc`]), its frequency-domain metrics
//! ([`freq`]) and the automatic `(ζ, ωn)` search ([`tuner`]). An LQR baseline
//! ([`lqr`]) and a nonlinear time-domain simulator ([`sim`]) serve for
//! comparison.
//!
//! The crate is `no_std` and needs only `alloc`.

// `!(x > 0.0)` style checks are used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod freq;
pub mod linalg;
pub mod lqr;
pub mod sim;
pub mod smc;
pub mod structure;
pub mod tuner;

pub use error::{Error, Result};
pub use freq::{Band, BandMetrics, RationalTf, TransferSet};
pub use lqr::{BrysonMaxima, LqrResult, LqrSpec};
pub use sim::{Accelerogram, Controller, SimConfig, SimulationTrace, TraceSummary};
pub use smc::{PoleSpec, SlidingDesign, SlidingSurface};
pub use structure::{AtmdParams, Bounds, BuildingModel, DampingSpec, ModalModel, PlantStateSpace};
pub use tuner::{PerformanceIndex, TuningConfig, TuningResult, TuningTuple};
