//! Conditional dynamics of two trapped ions sharing one motional mode,
//! driven on a k-th red sideband beyond the Lamb-Dicke regime.
//!
//! * [`coupling`]: effective sideband Rabi frequencies.
//! * [`dynamics`]: closed-form amplitudes of the conditional evolution.
//! * [`oracle`]: a truncated Fock-space reference propagator.
//! * [`gates`]: controlled-Z conditions, solver, fidelities and CNOT.
//! * [`entangle`]: EPR-state preparation and entanglement entropy.
//!
//! ```
//! use twoion::{conditional_propagator, PulsePair, SidebandSpec};
//!
//! let pulses = PulsePair::symmetric(1.0, 2.0, 0.3).unwrap();
//! let spec = SidebandSpec::red(1, 0).unwrap();
//! let u = conditional_propagator(&pulses, &spec, 12.0).unwrap();
//! assert!(u.orthonormality_error() < 1e-12);
//! ```

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coupling;
pub mod dynamics;
pub mod entangle;
pub mod error;
pub mod gates;
pub mod grid;
pub mod oracle;
pub mod report;
pub mod roots;

pub use coupling::{effective_rabi, EffectiveRabi, LaserDrive, SidebandColor, SidebandSpec};
pub use dynamics::{
    blue_sideband_map, conditional_propagator, derive_couplings, AmplitudeRow, ConditionalAmplitudes,
    ConditionalDynamics, CouplingSet, JointLabel, PulsePair, Spin, SpectrumFlags,
};
pub use error::{Error, Result};
pub use grid::Grid;
