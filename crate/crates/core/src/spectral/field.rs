use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::{bracket, dft_forward, dft_inverse, FrequencyGrid};
use crate::{Error, Result};

/// Truncated Fourier coefficients of a function on `T_lambda`.
///
/// Coefficients are stored in the symmetric `(2 pi)^(-1/2)` normalization
/// described in the module docs, indexed by lattice index `m` in `-K..=K`.
/// The `real` flag records that the field represents a real function, i.e.
/// `u_hat(-n) = conj(u_hat(n))`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: FrequencyGrid,
    coeffs: Vec<Complex64>,
    real: bool,
}

impl SpectralField {
    pub fn zeros(grid: FrequencyGrid) -> Self {
        Self {
            coeffs: vec![Complex64::new(0.0, 0.0); grid.len()],
            grid,
            real: true,
        }
    }

    pub fn from_coeffs(grid: FrequencyGrid, coeffs: Vec<Complex64>, real: bool) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: coeffs.len(),
            });
        }
        Ok(Self { grid, coeffs, real })
    }

    /// Real field from Fourier-series coefficients `c_m` for `m >= 0`.
    ///
    /// The negative modes are filled by conjugation; `c_0` keeps its real part.
    pub fn from_series_modes(grid: FrequencyGrid, modes: &[(i64, Complex64)]) -> Self {
        let mut f = Self::zeros(grid);
        let scale = 1.0 / grid.series_factor();
        for &(m, c) in modes {
            let m = m.abs();
            if !grid.contains(m) {
                continue;
            }
            if m == 0 {
                f.set_coeff(0, Complex64::new(c.re * scale, 0.0));
            } else {
                f.set_coeff(m, c * scale);
                f.set_coeff(-m, c.conj() * scale);
            }
        }
        f
    }

    /// `amplitude * cos(n x)` with `n = m / lambda`.
    pub fn cosine(grid: FrequencyGrid, amplitude: f64, m: i64) -> Self {
        if m == 0 {
            return Self::from_series_modes(grid, &[(0, Complex64::new(amplitude, 0.0))]);
        }
        Self::from_series_modes(grid, &[(m, Complex64::new(amplitude / 2.0, 0.0))])
    }

    /// `amplitude * sin(n x)` with `n = m / lambda`.
    pub fn sine(grid: FrequencyGrid, amplitude: f64, m: i64) -> Self {
        Self::from_series_modes(grid, &[(m, Complex64::new(0.0, -amplitude / 2.0))])
    }

    /// Field built from Fourier-series coefficients in storage order.
    pub fn from_series(grid: FrequencyGrid, series: Vec<Complex64>, real: bool) -> Result<Self> {
        let scale = 1.0 / grid.series_factor();
        let coeffs = series.into_iter().map(|c| c * scale).collect();
        Self::from_coeffs(grid, coeffs, real)
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn set_real(&mut self, real: bool) {
        self.real = real;
    }

    /// Coefficient at lattice index `m`, zero outside the truncation.
    #[inline]
    pub fn coeff(&self, m: i64) -> Complex64 {
        self.grid
            .slot(m)
            .map_or(Complex64::new(0.0, 0.0), |i| self.coeffs[i])
    }

    /// Sets the coefficient at `m`; indices outside the truncation are ignored.
    pub fn set_coeff(&mut self, m: i64, value: Complex64) {
        if let Some(i) = self.grid.slot(m) {
            self.coeffs[i] = value;
        }
    }

    /// Fourier-series coefficients `c_m` in storage order.
    pub fn series(&self) -> Vec<Complex64> {
        let f = self.grid.series_factor();
        self.coeffs.iter().map(|c| c * f).collect()
    }

    /// Fourier-series coefficient `c_m`.
    #[inline]
    pub fn series_coeff(&self, m: i64) -> Complex64 {
        self.coeff(m) * self.grid.series_factor()
    }

    /// Truncated coefficients of real samples on the `M`-point grid.
    pub fn analyze(samples: &[f64], grid: FrequencyGrid) -> Result<Self> {
        if samples.len() != grid.num_modes() {
            return Err(Error::LengthMismatch {
                expected: grid.num_modes(),
                got: samples.len(),
            });
        }
        Ok(Self::from_physical(grid, samples))
    }

    /// Truncated coefficients of complex samples on the `M`-point grid.
    pub fn analyze_complex(samples: &[Complex64], grid: FrequencyGrid) -> Result<Self> {
        if samples.len() != grid.num_modes() {
            return Err(Error::LengthMismatch {
                expected: grid.num_modes(),
                got: samples.len(),
            });
        }
        let mut buf = samples.to_vec();
        Ok(Self::from_buffer(grid, &mut buf, false))
    }

    /// Truncated coefficients of real samples on any multiple of the `M`-point
    /// grid. Used for dealiased products.
    pub fn from_physical(grid: FrequencyGrid, samples: &[f64]) -> Self {
        debug_assert!(samples.len().is_multiple_of(grid.num_modes()));
        let mut buf: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        let mut f = Self::from_buffer(grid, &mut buf, true);
        f.enforce_reality();
        f
    }

    fn from_buffer(grid: FrequencyGrid, buf: &mut [Complex64], real: bool) -> Self {
        let p = buf.len();
        dft_forward(buf);
        // u_hat = sqrt(2 pi) lambda / P * F_m
        let scale = 1.0 / (p as f64 * grid.series_factor());
        let coeffs = grid
            .indices()
            .map(|m| buf[m.rem_euclid(p as i64) as usize] * scale)
            .collect();
        Self { grid, coeffs, real }
    }

    /// Real samples on the `(factor * M)`-point grid.
    pub fn synthesize(&self, factor: usize) -> Result<Vec<f64>> {
        if !self.real {
            return Err(Error::NotReal);
        }
        Ok(self.synthesize_complex(factor).into_iter().map(|z| z.re).collect())
    }

    /// Complex samples on the `(factor * M)`-point grid; no reality assumed.
    pub fn synthesize_complex(&self, factor: usize) -> Vec<Complex64> {
        assert!(factor >= 1, "oversampling factor must be positive");
        let p = self.grid.num_modes() * factor;
        let mut buf = vec![Complex64::new(0.0, 0.0); p];
        let sf = self.grid.series_factor();
        for (i, c) in self.coeffs.iter().enumerate() {
            let m = self.grid.index_at(i);
            buf[m.rem_euclid(p as i64) as usize] = c * sf;
        }
        dft_inverse(&mut buf);
        buf
    }

    /// Samples of `d^order u / dx^order` on the `(factor * M)`-point grid.
    pub fn physical_derivative(&self, order: u32, factor: usize) -> Result<Vec<f64>> {
        self.derivative(order).synthesize(factor)
    }

    /// Spectral derivative: `u_hat(n) -> (i n)^order u_hat(n)`.
    pub fn derivative(&self, order: u32) -> Self {
        self.map_with_frequency(|n, c| c * ipow(n, order))
    }

    /// Applies `f(n, coeff)` to every coefficient; `n` is the lattice frequency.
    pub fn map_with_frequency(&self, f: impl Fn(f64, Complex64) -> Complex64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| f(self.grid.frequency(self.grid.index_at(i)), c))
            .collect();
        Self {
            grid: self.grid,
            coeffs,
            real: self.real,
        }
    }

    /// `(int <n>^{2s} |u_hat(n)|^2 dn)^{1/2}` with `dn = (1/lambda) * counting`.
    pub fn sobolev_norm(&self, s: f64) -> f64 {
        self.weighted_norm(|n| bracket(n).powf(2.0 * s))
    }

    /// Homogeneous norm `||D^s u||_{L^2}` with `D^s` the multiplier `|n|^s`.
    pub fn homogeneous_norm(&self, s: f64) -> f64 {
        self.weighted_norm(|n| if n == 0.0 { 0.0 } else { n.abs().powf(2.0 * s) })
    }

    pub fn l2_norm(&self) -> f64 {
        self.sobolev_norm(0.0)
    }

    fn weighted_norm(&self, weight: impl Fn(f64) -> f64) -> f64 {
        let sum: f64 = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| weight(self.grid.frequency(self.grid.index_at(i))) * c.norm_sqr())
            .sum();
        (sum / self.grid.period_scale()).sqrt()
    }

    /// `||u||_{L^4}` by alias-free quadrature on the doubled grid.
    pub fn lebesgue4_norm(&self) -> Result<f64> {
        let u = self.synthesize(2)?;
        let h = self.grid.quadrature_weight(2);
        let sum: f64 = u.iter().map(|x| (x * x) * (x * x)).sum();
        Ok((sum * h).powf(0.25))
    }

    /// Integral over the torus of the quadrature samples `values` taken on the
    /// `(factor * M)`-point grid.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        let factor = values.len() / self.grid.num_modes();
        values.iter().sum::<f64>() * self.grid.quadrature_weight(factor)
    }

    /// `max_n |u_hat(n) - conj(u_hat(-n))|`.
    pub fn reality_defect(&self) -> f64 {
        self.grid
            .indices()
            .map(|m| (self.coeff(m) - self.coeff(-m).conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Projects onto Hermitian-symmetric coefficients and sets the real flag.
    pub fn enforce_reality(&mut self) {
        let k = self.grid.max_index();
        for m in 0..=k {
            let a = self.coeff(m);
            let b = self.coeff(-m).conj();
            let avg = (a + b) * 0.5;
            self.set_coeff(m, avg);
            self.set_coeff(-m, avg.conj());
        }
        self.set_coeff(0, Complex64::new(self.coeff(0).re, 0.0));
        self.real = true;
    }

    /// Largest coefficient magnitude.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest coefficient difference to `other` on the same grid.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `H^s` distance to `other` on the same grid.
    pub fn sobolev_distance(&self, other: &Self, s: f64) -> f64 {
        (self - other).sobolev_norm(s)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        self.map_with_frequency(|_, c| c * factor)
    }

    /// `self += a * other`
    pub fn axpy(&mut self, a: Complex64, other: &Self) {
        debug_assert!(self.grid.same_as(&other.grid));
        for (x, y) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *x += a * y;
        }
        self.real &= other.real && a.im == 0.0;
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// The same function resampled on a grid with `num_modes` samples
    /// (zero-padded or truncated).
    pub fn resampled(&self, num_modes: usize) -> Result<Self> {
        let grid = self.grid.with_modes(num_modes)?;
        let mut out = Self::zeros(grid);
        out.real = self.real;
        for m in grid.indices() {
            out.set_coeff(m, self.coeff(m));
        }
        Ok(out)
    }
}

/// `(i n)^k`
#[inline]
pub(crate) fn ipow(n: f64, k: u32) -> Complex64 {
    let mag = n.powi(k as i32);
    match k % 4 {
        0 => Complex64::new(mag, 0.0),
        1 => Complex64::new(0.0, mag),
        2 => Complex64::new(-mag, 0.0),
        _ => Complex64::new(0.0, -mag),
    }
}

impl Add for &SpectralField {
    type Output = SpectralField;
    fn add(self, rhs: Self) -> SpectralField {
        let mut out = self.clone();
        out.axpy(Complex64::new(1.0, 0.0), rhs);
        out
    }
}

impl Sub for &SpectralField {
    type Output = SpectralField;
    fn sub(self, rhs: Self) -> SpectralField {
        let mut out = self.clone();
        out.axpy(Complex64::new(-1.0, 0.0), rhs);
        out
    }
}

impl Neg for &SpectralField {
    type Output = SpectralField;
    fn neg(self) -> SpectralField {
        self.scaled(-1.0)
    }
}

impl Mul<f64> for &SpectralField {
    type Output = SpectralField;
    fn mul(self, rhs: f64) -> SpectralField {
        self.scaled(rhs)
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    fn grid(m: usize) -> FrequencyGrid {
        FrequencyGrid::unit(m).unwrap()
    }

    #[test]
    fn cosine_coefficients() {
        let g = grid(8);
        let x = g.points(1);
        let samples: Vec<f64> = x.iter().map(|x| x.cos()).collect();
        let f = SpectralField::analyze(&samples, g).unwrap();
        let expected = 0.5 * (2.0 * PI).sqrt();
        assert!((f.coeff(1).re - expected).abs() < 1e-14);
        assert!((f.coeff(-1).re - expected).abs() < 1e-14);
        for m in [-3, -2, 0, 2, 3] {
            assert!(f.coeff(m).norm() < 1e-14);
        }
        assert!(f.is_real());
    }

    #[test]
    fn zero_samples_give_zero_field() {
        let g = grid(16);
        let f = SpectralField::analyze(&[0.0; 16], g).unwrap();
        assert_eq!(f, SpectralField::zeros(g));
        assert!(f.synthesize(3).unwrap().iter().all(|&x| x == 0.0));
    }

    #[test]
    fn length_mismatch() {
        let g = grid(8);
        assert!(matches!(
            SpectralField::analyze(&[0.0; 7], g),
            Err(Error::LengthMismatch { expected: 8, got: 7 })
        ));
    }

    #[test]
    fn single_mode_synthesis() {
        let g = FrequencyGrid::new(16, 2.0).unwrap();
        let f = SpectralField::cosine(g, 0.7, 3);
        let x = g.points(2);
        let u = f.synthesize(2).unwrap();
        for (xi, ui) in x.iter().zip(&u) {
            assert!((ui - 0.7 * (1.5 * xi).cos()).abs() < 1e-14);
        }
    }

    #[test]
    fn non_real_synthesis_rejected() {
        let g = grid(8);
        let mut f = SpectralField::zeros(g);
        f.set_coeff(1, Complex64::new(1.0, 0.0));
        f.set_real(false);
        assert!(matches!(f.synthesize(1), Err(Error::NotReal)));
        let z = f.synthesize_complex(1);
        assert!(z.iter().any(|z| z.im.abs() > 0.1));
    }

    #[test]
    fn sobolev_hand_value() {
        let g = grid(16);
        let mut f = SpectralField::zeros(g);
        f.set_coeff(2, Complex64::new(1.0, 0.0));
        f.set_coeff(-2, Complex64::new(1.0, 0.0));
        assert!((f.sobolev_norm(1.0) - 10f64.sqrt()).abs() < 1e-14);
        assert_eq!(SpectralField::zeros(g).sobolev_norm(3.0), 0.0);
    }

    #[test]
    fn constant_l4_norm() {
        let g = FrequencyGrid::new(8, 1.5).unwrap();
        let f = SpectralField::cosine(g, -0.3, 0);
        let expected = 0.3 * (2.0 * PI * 1.5f64).powf(0.25);
        assert!((f.lebesgue4_norm().unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn derivative_of_sine() {
        let g = grid(16);
        let f = SpectralField::sine(g, 1.0, 2);
        let d = f.physical_derivative(1, 1).unwrap();
        for (x, v) in g.points(1).iter().zip(&d) {
            assert!((v - 2.0 * (2.0 * x).cos()).abs() < 1e-13);
        }
    }

    #[test]
    fn ipow_cycle() {
        assert_eq!(ipow(2.0, 0), Complex64::new(1.0, 0.0));
        assert_eq!(ipow(2.0, 1), Complex64::new(0.0, 2.0));
        assert_eq!(ipow(2.0, 2), Complex64::new(-4.0, 0.0));
        assert_eq!(ipow(2.0, 3), Complex64::new(0.0, -8.0));
        assert_eq!(ipow(2.0, 5), Complex64::new(0.0, 32.0));
    }
}
