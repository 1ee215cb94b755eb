//! Trajectory representation of two interfering plane waves.
//!
//! A forward wave `A·e^{ikx}` and a backward wave `B·e^{−ikx−iβ}` combine
//! into a dichromatic wave whose reduced action generates, through Jacobi's
//! theorem, a closed-form trajectory `t(x)`. The trajectory reverses in time
//! wherever the dwell density `∂t/∂x` changes sign.
//!
//! * [`wave_core`]: the wave function, its polar form and the companion wave.
//! * [`qshje`]: reduced action, conjugate momentum and quantum potential.
//! * [`dynamics`]: trajectories, velocity, effective mass, turning points,
//!   phase-shift families and the standing-wave limit.
//! * [`planar`]: the separable two-dimensional problem.
//! * [`cli`] and [`verify`]: the command-line front end and its invariant
//!   suites.

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod planar;
pub mod qshje;
pub mod roots;
pub mod verify;
pub mod wave_core;

pub use error::{Error, Result};
pub use planar::PlanarSpec;
pub use wave_core::{ComplexValue, DichromaticSpec};
