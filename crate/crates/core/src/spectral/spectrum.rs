use num_complex::Complex64;

use super::dft_forward;

/// Fourier-series coefficients of physical samples on a `P`-point grid,
/// addressable at any index `|m| < P/2` (beyond the storage truncation of a
/// [`SpectralField`](super::SpectralField)).
#[derive(Debug, Clone)]
pub(crate) struct Spectrum {
    buf: Vec<Complex64>,
}

impl Spectrum {
    pub(crate) fn of_samples(samples: &[f64]) -> Self {
        let p = samples.len() as f64;
        let mut buf: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        dft_forward(&mut buf);
        for z in &mut buf {
            *z /= p;
        }
        Self { buf }
    }

    #[inline]
    pub(crate) fn get(&self, m: i64) -> Complex64 {
        let p = self.buf.len() as i64;
        debug_assert!(2 * m.abs() < p, "index {m} aliases on a {p}-point grid");
        self.buf[m.rem_euclid(p) as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn squared_cosine_reaches_double_frequency() {
        let p = 24;
        let x: Vec<f64> = (0..p)
            .map(|j| {
                let c = (2.0 * std::f64::consts::PI * 5.0 * j as f64 / p as f64).cos();
                c * c
            })
            .collect();
        let s = Spectrum::of_samples(&x);
        assert!((s.get(0).re - 0.5).abs() < 1e-15);
        assert!((s.get(10).re - 0.25).abs() < 1e-15);
        assert!((s.get(-10).re - 0.25).abs() < 1e-15);
        assert!(s.get(5).norm() < 1e-15);
    }
}
