use rayon::prelude::*;

use crate::integrator::Trajectory;
use crate::spectral::{bracket, dealias_factor};
use crate::{Error, Result, SpectralField};

/// The two parts of `E_s(u) = A + a B`, with `A = ||D^s u||^2 + ||u||^2` and
/// `B = int u^2 (D^{s-2} u_x)^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SobolevTerms {
    pub plain: f64,
    pub quartic: f64,
}

impl SobolevTerms {
    pub fn of(u: &SpectralField, s: f64) -> Result<Self> {
        if !u.is_real() {
            return Err(Error::NotReal);
        }
        let plain = u.homogeneous_norm(s).powi(2) + u.l2_norm().powi(2);
        let g = u.map_with_frequency(|n, c| {
            if n == 0.0 {
                c * 0.0
            } else {
                c * num_complex::Complex64::new(0.0, n * n.abs().powf(s - 2.0))
            }
        });
        let factor = dealias_factor(4);
        let us = u.synthesize(factor)?;
        let gs = g.synthesize(factor)?;
        let vals: Vec<f64> = us.iter().zip(&gs).map(|(a, b)| a * a * b * b).collect();
        Ok(Self {
            plain,
            quartic: u.integrate(&vals),
        })
    }

    pub fn energy(&self, a_s: f64) -> f64 {
        self.plain + a_s * self.quartic
    }
}

/// `E_s(u) = ||D^s u||^2 + ||u||^2 + a_s int u^2 (D^{s-2} u_x)^2`.
pub fn sobolev_energy(u: &SpectralField, s: f64, a_s: f64) -> Result<f64> {
    if s < 2.0 {
        return Err(Error::InvalidParameter(format!("sobolev energy needs s >= 2, got {s}")));
    }
    Ok(SobolevTerms::of(u, s)?.energy(a_s))
}

/// Comparability constants `c ||u||_{H^s}^2 <= E_s <= C ||u||_{H^s}^2`, valid
/// on the window `||u||_{H^s}^2 <= radius_sq`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SobolevWindow {
    pub lower: f64,
    pub upper: f64,
    /// `sup |u|^2 <= embedding ||u||_{H^s}^2` on the grid.
    pub embedding: f64,
    pub radius_sq: f64,
}

impl SobolevWindow {
    pub fn contains(&self, u: &SpectralField, s: f64) -> bool {
        u.sobolev_norm(s).powi(2) <= self.radius_sq
    }
}

/// Constants for the grid of `u` (only the grid is used).
///
/// `2^{1-s} <H>^{2s} <= 1 + |n|^{2s} <= <n>^{2s}` bounds the plain part, and
/// `|B| <= sup|u|^2 ||u||_{H^{s-1}}^2` bounds the quartic one.
pub fn sobolev_window(grid: &crate::FrequencyGrid, s: f64, a_s: f64) -> SobolevWindow {
    let embedding: f64 = grid
        .indices()
        .map(|m| bracket(grid.frequency(m)).powf(-2.0 * s))
        .sum::<f64>()
        / (2.0 * std::f64::consts::PI * grid.period_scale());
    let upper = (embedding * 2f64.powf(s - 1.0)).max(1.0 + 2f64.powf(-s));
    let radius_sq = if a_s == 0.0 {
        f64::INFINITY
    } else {
        1.0 / (2.0 * upper * a_s.abs())
    };
    SobolevWindow {
        lower: 2f64.powf(-s),
        upper,
        embedding,
        radius_sq,
    }
}

/// Result of [`calibrate_as`].
#[derive(Debug, Clone)]
pub struct Calibration {
    pub a_s: f64,
    /// Relative drift `max_t |E_s(t) - E_s(0)| / E_s(0)` at the minimizer.
    pub drift: f64,
    /// The same drift with `a_s = 0`.
    pub baseline_drift: f64,
    /// `(a_s, drift)` over the scan grid.
    pub curve: Vec<(f64, f64)>,
}

impl Calibration {
    /// `baseline / drift`, infinite when the calibrated drift vanishes.
    pub fn reduction(&self) -> f64 {
        if self.drift == 0.0 {
            if self.baseline_drift == 0.0 {
                1.0
            } else {
                f64::INFINITY
            }
        } else {
            self.baseline_drift / self.drift
        }
    }
}

const SCAN_POINTS: usize = 100;
const GOLDEN_ITERS: usize = 80;

fn drift_of(terms: &[SobolevTerms], a: f64) -> f64 {
    let e0 = terms[0].energy(a);
    if e0 <= 0.0 {
        return f64::INFINITY;
    }
    terms
        .iter()
        .map(|t| (t.energy(a) - e0).abs())
        .fold(0.0, f64::max)
        / e0
}

/// Scans `a_s` over `+-[1e-2, 1e2]` (log-spaced, both signs, plus 0), refines
/// the best scan point by golden section between its neighbours and returns
/// the minimizer of the relative drift over the stored snapshots.
pub fn calibrate_as(traj: &Trajectory, s: f64) -> Result<Calibration> {
    if s < 2.0 {
        return Err(Error::InvalidParameter(format!("calibration needs s >= 2, got {s}")));
    }
    let terms = traj
        .snapshots()
        .iter()
        .map(|snap| SobolevTerms::of(&snap.field, s))
        .collect::<Result<Vec<_>>>()?;
    if terms.is_empty() || terms.iter().all(|t| t.plain == 0.0) {
        return Err(Error::Degenerate("trajectory is identically zero".into()));
    }

    let mut grid: Vec<f64> = (0..SCAN_POINTS)
        .map(|i| 10f64.powf(-2.0 + 4.0 * i as f64 / (SCAN_POINTS - 1) as f64))
        .flat_map(|a| [-a, a])
        .collect();
    grid.push(0.0);
    grid.sort_by(f64::total_cmp);
    let curve: Vec<(f64, f64)> = grid.par_iter().map(|&a| (a, drift_of(&terms, a))).collect();
    let baseline_drift = drift_of(&terms, 0.0);

    let best = (0..curve.len())
        .min_by(|&i, &j| curve[i].1.total_cmp(&curve[j].1))
        .expect("scan grid is nonempty");
    let (mut lo, mut hi) = (
        curve[best.saturating_sub(1)].0,
        curve[(best + 1).min(curve.len() - 1)].0,
    );
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..GOLDEN_ITERS {
        let x1 = hi - phi * (hi - lo);
        let x2 = lo + phi * (hi - lo);
        if drift_of(&terms, x1) <= drift_of(&terms, x2) {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    let refined = 0.5 * (lo + hi);
    let (a_s, drift) = {
        let d = drift_of(&terms, refined);
        if d <= curve[best].1 {
            (refined, d)
        } else {
            curve[best]
        }
    };
    Ok(Calibration {
        a_s,
        drift,
        baseline_drift,
        curve,
    })
}
