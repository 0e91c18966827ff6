//! Two electromagnetic cavity modes damped by a common zero-temperature
//! reservoir with cross decay rates.
//!
//! The crate builds the corresponding Liouvillians, integrates the master
//! equation, evaluates the closed-form detection probabilities of the
//! two-cavity and single-cavity experiments, and replays both experiments as
//! explicit sequences of Jaynes–Cummings pulses and dissipative windows.

pub mod analytic;
pub mod error;
pub mod integrator;
pub mod liouvillian;
pub mod protocol;
pub mod superop;
pub mod tensor;

pub use error::{Error, Result};
pub use liouvillian::{DecayParameters, Frame, SymmetricDecayParameters};
pub use superop::SuperOperator;
pub use tensor::{DensityMatrix, Ket, Operator, SpaceSignature};

pub use num_complex::Complex64 as C64;
