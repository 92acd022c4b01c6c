//! Grids, spectral fields, transforms and the Littlewood-Paley cutoff family.
//!
//! Conventions. A field on the torus `T_lambda = [0, 2*pi*lambda)` is stored by
//! its coefficients on the lattice `n = m / lambda`, `|m| <= M/2 - 1`:
//!
//! ```text
//! u_hat(n) = (2*pi)^(-1/2) * int_0^{2 pi lambda} e^{-i n x} u(x) dx
//! u(x)     = (2*pi)^(-1/2) * (1/lambda) * sum_n e^{i n x} u_hat(n)
//! ```
//!
//! so that `||u||_{L^2}^2 = (1/lambda) sum_n |u_hat(n)|^2`. On the sample grid
//! `x_j = 2 pi lambda j / M` the integral is the trapezoid sum with weight
//! `2 pi lambda / M`, which is exact for trigonometric polynomials of degree
//! below `M`. Plain Fourier-series coefficients `c_m` (with `u = sum c_m e^{inx}`
//! and `(uv)_m = (c * d)_m`) are `u_hat / (sqrt(2 pi) lambda)`; the nonlinear
//! machinery works in that normalization.

mod cutoff;
mod fft;
mod field;
mod grid;
mod spectrum;

pub use cutoff::{CutoffFamily, TABLE_POINTS};
pub use field::SpectralField;
pub use grid::FrequencyGrid;

pub(crate) use fft::{dft_forward, dft_inverse};
#[cfg(test)]
pub(crate) use field::ipow;
pub(crate) use spectrum::Spectrum;

/// Japanese bracket `(1 + x^2)^(1/2)`.
#[inline]
pub fn bracket(x: f64) -> f64 {
    (1.0 + x * x).sqrt()
}

/// Oversampling factor that makes a degree-`p` product alias-free.
pub fn dealias_factor(degree: usize) -> usize {
    (degree + 1).div_ceil(2).max(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dealias_factors() {
        assert_eq!(dealias_factor(1), 1);
        assert_eq!(dealias_factor(2), 2);
        assert_eq!(dealias_factor(3), 2);
        assert_eq!(dealias_factor(4), 3);
        assert_eq!(dealias_factor(5), 3);
    }
}
