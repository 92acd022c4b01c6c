//! Pseudospectral simulation and discrete harmonic analysis for the periodic
//! fifth-order modified KdV equation
//!
//! ```text
//! u_t - u_xxxxx + a1 u u_x u_xx + a2 u^2 u_xxx + a3 u_x^3 - a4 u^4 u_x = 0
//! ```
//!
//! on the torus of length `2*pi*lambda`. The integrable member of the family is
//! `(a1, a2, a3, a4) = (40, 10, 10, 30)`.
//!
//! The crate is organised bottom-up:
//!
//! * [`spectral`]: grids, spectral fields, transforms, norms and the smooth
//!   Littlewood-Paley cutoff family.
//! * [`resonance`]: exact integer resonance arithmetic and the splitting of the
//!   cubic nonlinearity into resonant and non-resonant parts.
//! * [`dynamics`]: right-hand sides of the physical and renormalized systems,
//!   the divergence-form identity, the derived dispersion constants and the
//!   gauge transformation.
//! * [`integrator`]: integrating-factor RK4 time stepping, trajectories,
//!   parabolic regularization and the scaling symmetry.
//! * [`energy`]: dyadic and modified energies, comparability and the
//!   Sobolev-level modified energy with calibrated coefficient.
//! * [`xsb`]: discrete `X^{s,b}` norms and the trilinear counterexamples.
//! * [`io`]: snapshot and trajectory file formats.
//! * [`cli`]: the `qmkdv` command line.

pub mod cli;
pub mod dynamics;
pub mod energy;
pub mod error;
pub mod integrator;
pub mod io;
pub mod random;
pub mod resonance;
pub mod spectral;
pub mod xsb;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use spectral::{CutoffFamily, FrequencyGrid, SpectralField};
