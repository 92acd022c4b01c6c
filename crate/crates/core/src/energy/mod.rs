//! Dyadic energies, the localized modified energies and the Sobolev-level
//! modified energy with its calibrated coefficient.
//!
//! Quartic correction sums run over the non-resonant set at `-n`,
//! `n1 + n2 + n3 = -n` with `(n1 + n2)(n1 + n3)(n2 + n3) != 0`, and are taken in
//! Fourier-series coefficients times the torus length, so that they equal
//! `int u u (A u)(B u) dx` for the corresponding multipliers `A`, `B`.

mod sobolev;
mod localized;

pub use sobolev::{
    sobolev_energy, sobolev_window, calibrate_as, SobolevTerms, SobolevWindow, Calibration,
};
pub use localized::{
    comparability_check, correction_sums, difference_energy_k, difference_energy_total,
    dyadic_energy_norm, modified_energy_k, modified_energy_total, ComparabilityReport,
    EnergyKind, ModifiedEnergyParams, ENERGY_MAX_MODES,
};
