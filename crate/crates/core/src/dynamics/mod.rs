//! Right-hand sides, conserved quantities and the gauge transformation.
//!
//! The physical equation is written as `u_t = rhs(u)` with
//!
//! ```text
//! rhs(u) = u_xxxxx - a1 u u_x u_xx - a2 u^2 u_xxx - a3 u_x^3 + a4 u^4 u_x
//! ```
//!
//! For the integrable coefficients the nonlinearity has the divergence form
//! `-10 (u^2 u_xx)_x - 10 (u u_x^2)_x + 6 (u^5)_x`, whose Fourier-series
//! transform is
//!
//! ```text
//! 10 i n sum c(n1) c(n2) n3^2 c(n3) + 10 i n sum c(n1) n2 c(n2) n3 c(n3) + 6 i n sum c(n1)...c(n5)
//! ```
//!
//! The renormalized system moves the resonant interactions that are constant
//! along the flow into the dispersion `mu(n) = n^5 + c1 n^3 + c2 n` and removes
//! the remaining `||u||_{L^4}^4`-driven drift by the gauge
//! `v_hat(n) = exp(-i c3 n Phi(t)) u_hat(n)`.

mod coefficients;
mod gauge;
mod physical;
mod renormalized;
mod symbol;

pub use coefficients::EquationCoefficients;
pub use gauge::{gauge_forward, gauge_inverse, phase_from_snapshots, reflect};
pub use physical::{
    mass_derivative, nonlinear_divergence, nonlinear_physical, rhs_physical,
    verify_divergence_form, PhysicalNonlinearity,
};
pub use renormalized::{
    quintic_full, quintic_nonresonant_direct, quintic_nonresonant_fft, renormalized_nonlinear,
    renormalized_rhs, RenormalizedNonlinearity, RhsMode, DIRECT_MAX_MODES,
};
pub use symbol::{compute_constants, ConservedQuantities, LinearSymbol};

use crate::{Result, SpectralField};

/// Nonlinear part `N` of an evolution `d/dt u_hat = L(n) u_hat + N(u)`.
pub trait Nonlinearity: Sync {
    fn eval(&self, u: &SpectralField) -> Result<SpectralField>;
}
