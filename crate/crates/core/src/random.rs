//! Seeded random probes.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{FrequencyGrid, SpectralField};

pub type ProbeRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> ProbeRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random real field on lattice indices `|m| <= band` with series coefficient
/// magnitudes up to `<m>^-decay` and uniformly random phases, rescaled so that
/// `max_x |u(x)| = amplitude` on the sample grid.
pub fn random_field<R: Rng>(
    rng: &mut R,
    grid: FrequencyGrid,
    band: i64,
    decay: f64,
    amplitude: f64,
) -> SpectralField {
    let band = band.clamp(0, grid.max_index());
    let modes: Vec<(i64, Complex64)> = (0..=band)
        .map(|m| {
            let r = rng.gen::<f64>() * (1.0 + (m * m) as f64).powf(-decay / 2.0);
            let theta = rng.gen::<f64>() * 2.0 * PI;
            (m, Complex64::from_polar(r, theta))
        })
        .collect();
    let f = SpectralField::from_series_modes(grid, &modes);
    let peak = f
        .synthesize(1)
        .expect("real by construction")
        .iter()
        .fold(0.0f64, |a, x| a.max(x.abs()));
    if peak == 0.0 {
        return f;
    }
    f.scaled(amplitude / peak)
}

/// Random real field with `||u||_{H^s} = norm`.
pub fn random_field_in_ball<R: Rng>(
    rng: &mut R,
    grid: FrequencyGrid,
    band: i64,
    decay: f64,
    s: f64,
    norm: f64,
) -> SpectralField {
    let f = random_field(rng, grid, band, decay, 1.0);
    let current = f.sobolev_norm(s);
    if current == 0.0 {
        return f;
    }
    f.scaled(norm / current)
}

/// Random complex (not real-flagged) coefficient vector.
pub fn random_complex_field<R: Rng>(rng: &mut R, grid: FrequencyGrid) -> SpectralField {
    let coeffs = (0..grid.len())
        .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
        .collect();
    SpectralField::from_coeffs(grid, coeffs, false).expect("length matches grid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_field() {
        let g = FrequencyGrid::unit(32).unwrap();
        let a = random_field(&mut seeded(7), g, 10, 1.0, 0.5);
        let b = random_field(&mut seeded(7), g, 10, 1.0, 0.5);
        assert_eq!(a, b);
        assert!(a.is_real());
        assert!(a.reality_defect() == 0.0);
        let peak = a.synthesize(1).unwrap().iter().fold(0.0f64, |m, x| m.max(x.abs()));
        assert!((peak - 0.5).abs() < 1e-14);
    }

    #[test]
    fn ball_sampling_hits_norm() {
        let g = FrequencyGrid::unit(32).unwrap();
        let f = random_field_in_ball(&mut seeded(1), g, 15, 2.0, 3.0, 0.05);
        assert!((f.sobolev_norm(3.0) - 0.05).abs() < 1e-15);
    }
}
