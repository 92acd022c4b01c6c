use std::f64::consts::PI;

use num_complex::Complex64;

use crate::integrator::Trajectory;
use crate::{Error, Result, SpectralField};

/// `v_hat(n) = exp(-i c3 n Phi) u_hat(n)`; a translation by `c3 Phi`.
fn rotate(u: &SpectralField, c3: f64, phase: f64) -> SpectralField {
    u.map_with_frequency(|n, c| c * Complex64::from_polar(1.0, -c3 * n * phase))
}

/// Applies the gauge to every snapshot of a physical trajectory using its
/// stored phase integrals.
pub fn gauge_forward(traj: &Trajectory) -> Result<Trajectory> {
    let c3 = traj.symbol().c3;
    let mut out = traj.clone();
    for snap in out.snapshots_mut() {
        let phase = snap.phase.ok_or(Error::MissingPhase)?;
        snap.field = rotate(&snap.field, c3, phase);
    }
    out.set_gauged(true);
    Ok(out)
}

/// Undoes the gauge. Phases are taken from `phases` when given, else from the
/// snapshots, else recomputed from the gauged fields (the `L^4` norm is
/// gauge invariant).
pub fn gauge_inverse(traj: &Trajectory, phases: Option<&[f64]>) -> Result<Trajectory> {
    let phases: Vec<f64> = match phases {
        Some(p) => {
            if p.len() != traj.len() {
                return Err(Error::LengthMismatch {
                    expected: traj.len(),
                    got: p.len(),
                });
            }
            p.to_vec()
        }
        None => match traj.snapshots().iter().map(|s| s.phase).collect::<Option<Vec<_>>>() {
            Some(p) => p,
            None => phase_from_snapshots(traj)?,
        },
    };
    let c3 = traj.symbol().c3;
    let mut out = traj.clone();
    for (snap, &phase) in out.snapshots_mut().iter_mut().zip(&phases) {
        snap.field = rotate(&snap.field, c3, -phase);
        snap.phase = Some(phase);
    }
    out.set_gauged(false);
    Ok(out)
}

/// Trapezoid accumulation of `Phi(t) = (2 pi)^-1 int_0^t ||u||_{L^4}^4 ds`
/// over the stored snapshot times.
pub fn phase_from_snapshots(traj: &Trajectory) -> Result<Vec<f64>> {
    let mut phases = Vec::with_capacity(traj.len());
    let mut prev: Option<(f64, f64)> = None;
    let mut acc = 0.0;
    for snap in traj.snapshots() {
        let q = snap.field.lebesgue4_norm()?.powi(4) / (2.0 * PI);
        if let Some((t0, q0)) = prev {
            acc += 0.5 * (snap.time - t0) * (q0 + q);
        }
        phases.push(acc);
        prev = Some((snap.time, q));
    }
    Ok(phases)
}

/// `c(n) -> c(-n)`, i.e. `u(x) -> u(-x)`.
pub fn reflect(u: &SpectralField) -> SpectralField {
    let mut out = u.clone();
    for m in u.grid().indices() {
        out.set_coeff(m, u.coeff(-m));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::FrequencyGrid;

    #[test]
    fn reflection_of_sine() {
        let g = FrequencyGrid::unit(16).unwrap();
        let s = SpectralField::sine(g, 1.0, 3);
        let r = reflect(&s);
        assert!(r.max_abs_diff(&s.scaled(-1.0)) < 1e-15);
        assert_eq!(reflect(&r), s);
    }

    #[test]
    fn rotation_is_translation() {
        let g = FrequencyGrid::unit(16).unwrap();
        let u = SpectralField::cosine(g, 1.0, 2);
        let v = rotate(&u, 20.0, 0.01);
        let x = g.points(1);
        let samples = v.synthesize(1).unwrap();
        for (xi, vi) in x.iter().zip(&samples) {
            assert!((vi - (2.0 * (xi - 0.2)).cos()).abs() < 1e-14);
        }
    }
}
