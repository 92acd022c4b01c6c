use std::f64::consts::PI;

use crate::{Error, Result};

/// Sample count and torus scale of a periodic grid.
///
/// `M` physical samples on `[0, 2 pi lambda)` carry the lattice frequencies
/// `n = m / lambda` with `|m| <= M/2 - 1` (the Nyquist mode is dropped so that
/// every stored field is exactly real-representable).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyGrid {
    num_modes: usize,
    period_scale: f64,
}

impl FrequencyGrid {
    pub fn new(num_modes: usize, period_scale: f64) -> Result<Self> {
        if num_modes < 4 || !num_modes.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "M must be even and >= 4, got {num_modes}"
            )));
        }
        if !(period_scale.is_finite() && period_scale > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "lambda must be positive, got {period_scale}"
            )));
        }
        Ok(Self {
            num_modes,
            period_scale,
        })
    }

    /// The `2 pi` torus with `M` samples.
    pub fn unit(num_modes: usize) -> Result<Self> {
        Self::new(num_modes, 1.0)
    }

    /// Physical sample count `M`.
    pub fn num_modes(&self) -> usize {
        self.num_modes
    }

    /// Largest stored lattice index `K = M/2 - 1`.
    pub fn max_mode(&self) -> usize {
        self.num_modes / 2 - 1
    }

    pub fn max_index(&self) -> i64 {
        self.max_mode() as i64
    }

    /// Torus scale `lambda`.
    pub fn period_scale(&self) -> f64 {
        self.period_scale
    }

    /// Torus length `2 pi lambda`.
    pub fn length(&self) -> f64 {
        2.0 * PI * self.period_scale
    }

    /// Lattice spacing `1 / lambda`.
    pub fn spacing(&self) -> f64 {
        1.0 / self.period_scale
    }

    /// Largest stored frequency `K / lambda`.
    pub fn max_frequency(&self) -> f64 {
        self.max_mode() as f64 / self.period_scale
    }

    /// Number of stored coefficients, `2K + 1`.
    pub fn len(&self) -> usize {
        2 * self.max_mode() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Frequency `m / lambda` of lattice index `m`.
    #[inline]
    pub fn frequency(&self, m: i64) -> f64 {
        m as f64 / self.period_scale
    }

    /// Lattice indices `-K..=K` in storage order.
    pub fn indices(&self) -> impl Iterator<Item = i64> + Clone {
        let k = self.max_index();
        -k..=k
    }

    #[inline]
    pub fn contains(&self, m: i64) -> bool {
        m.abs() <= self.max_index()
    }

    /// Storage slot of index `m`; `None` outside the truncation.
    #[inline]
    pub fn slot(&self, m: i64) -> Option<usize> {
        if self.contains(m) {
            Some((m + self.max_index()) as usize)
        } else {
            None
        }
    }

    /// Index stored at slot `i`.
    #[inline]
    pub fn index_at(&self, i: usize) -> i64 {
        i as i64 - self.max_index()
    }

    /// Physical sample points of the `factor * M` point grid.
    pub fn points(&self, factor: usize) -> Vec<f64> {
        let p = self.num_modes * factor;
        let h = self.length() / p as f64;
        (0..p).map(|j| j as f64 * h).collect()
    }

    /// Quadrature weight of the `factor * M` point grid.
    pub fn quadrature_weight(&self, factor: usize) -> f64 {
        self.length() / (self.num_modes * factor) as f64
    }

    /// Same torus with a different sample count.
    pub fn with_modes(&self, num_modes: usize) -> Result<Self> {
        Self::new(num_modes, self.period_scale)
    }

    /// Factor converting stored coefficients to Fourier-series
    /// coefficients: `c_m = u_hat(m / lambda) * series_factor`.
    #[inline]
    pub fn series_factor(&self) -> f64 {
        1.0 / ((2.0 * PI).sqrt() * self.period_scale)
    }

    /// Whether two grids describe the same torus and truncation.
    pub fn same_as(&self, other: &Self) -> bool {
        self.num_modes == other.num_modes
            && (self.period_scale - other.period_scale).abs()
                <= 1e-14 * self.period_scale.max(other.period_scale)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(FrequencyGrid::unit(2).is_err());
        assert!(FrequencyGrid::unit(7).is_err());
        assert!(FrequencyGrid::new(8, 0.0).is_err());
        assert!(FrequencyGrid::new(8, f64::NAN).is_err());
    }

    #[test]
    fn lattice_layout() {
        let g = FrequencyGrid::new(8, 2.0).unwrap();
        assert_eq!(g.max_mode(), 3);
        assert_eq!(g.len(), 7);
        assert_eq!(g.slot(-3), Some(0));
        assert_eq!(g.slot(3), Some(6));
        assert_eq!(g.slot(4), None);
        assert_eq!(g.frequency(3), 1.5);
        assert_eq!(g.index_at(0), -3);
        assert!((g.length() - 4.0 * PI).abs() < 1e-15);
    }
}
