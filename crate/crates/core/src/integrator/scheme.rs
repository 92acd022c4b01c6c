use std::f64::consts::PI;

use log::{debug, warn};
use num_complex::Complex64;

use super::{Flow, MonitorRecord, Snapshot, Trajectory};
use crate::dynamics::{
    compute_constants, reflect, ConservedQuantities, EquationCoefficients, LinearSymbol,
    Nonlinearity, PhysicalNonlinearity, RenormalizedNonlinearity,
};
use crate::{Error, Result, SpectralField};

/// Parameters of [`evolve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveConfig {
    pub dt: f64,
    pub flow: Flow,
    pub epsilon: f64,
    /// Snapshot and monitor every this many steps (the final step is always
    /// recorded).
    pub record_stride: usize,
    /// Warn when `dt` times the nonlinear stiffness estimate exceeds this.
    pub cfl_limit: f64,
    /// Regularity of the monitored `H^s` norm.
    pub monitor_s: f64,
    /// Abort once the `H^2` norm exceeds this multiple of its initial value.
    pub blowup_factor: f64,
}

impl EvolveConfig {
    pub fn physical(coeffs: EquationCoefficients, dt: f64) -> Self {
        Self {
            dt,
            flow: Flow::Physical(coeffs),
            epsilon: 0.0,
            record_stride: 100,
            cfl_limit: 0.5,
            monitor_s: 2.0,
            blowup_factor: 1e3,
        }
    }

    pub fn renormalized(mode: crate::dynamics::RhsMode, dt: f64) -> Self {
        Self {
            flow: Flow::Renormalized(mode),
            ..Self::physical(EquationCoefficients::INTEGRABLE, dt)
        }
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.record_stride = stride;
        self
    }

    fn coefficients(&self) -> EquationCoefficients {
        match self.flow {
            Flow::Physical(c) => c,
            Flow::Renormalized(_) => EquationCoefficients::INTEGRABLE,
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(what.to_string()));
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return bad("dt must be positive");
        }
        if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            return bad("epsilon must be nonnegative");
        }
        if self.record_stride == 0 {
            return bad("record stride must be positive");
        }
        if !(self.blowup_factor > 1.0) {
            return bad("blow-up factor must exceed 1");
        }
        Ok(())
    }
}

/// Integrating-factor RK4 for `d/dt u_hat = L(n) u_hat + N(u)` with
/// `L(n) = i mu(n) - epsilon n^6` integrated exactly.
pub struct Stepper<'a> {
    dt: f64,
    full: Vec<Complex64>,
    half: Vec<Complex64>,
    nonlinearity: &'a dyn Nonlinearity,
}

impl<'a> Stepper<'a> {
    pub fn new(
        grid: &crate::FrequencyGrid,
        symbol: &LinearSymbol,
        dt: f64,
        nonlinearity: &'a dyn Nonlinearity,
    ) -> Self {
        let rate = |m: i64| symbol.rate(grid.frequency(m));
        Self {
            dt,
            full: grid.indices().map(|m| (rate(m) * dt).exp()).collect(),
            half: grid.indices().map(|m| (rate(m) * (0.5 * dt)).exp()).collect(),
            nonlinearity,
        }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn step(&self, u: &SpectralField) -> Result<SpectralField> {
        let dt = self.dt;
        let (e, e2) = (&self.full, &self.half);
        let grid = *u.grid();
        let x = u.coeffs();
        let build = |v: Vec<Complex64>| SpectralField::from_coeffs(grid, v, true);

        let a = self.nonlinearity.eval(u)?;
        let a = a.coeffs();
        let u1: Vec<Complex64> = (0..x.len()).map(|i| e2[i] * (x[i] + 0.5 * dt * a[i])).collect();
        let b = self.nonlinearity.eval(&build(u1)?)?;
        let b = b.coeffs();
        let u2: Vec<Complex64> = (0..x.len()).map(|i| e2[i] * x[i] + 0.5 * dt * b[i]).collect();
        let c = self.nonlinearity.eval(&build(u2)?)?;
        let c = c.coeffs();
        let u3: Vec<Complex64> = (0..x.len()).map(|i| e[i] * x[i] + dt * e2[i] * c[i]).collect();
        let d = self.nonlinearity.eval(&build(u3)?)?;
        let d = d.coeffs();
        let next: Vec<Complex64> = (0..x.len())
            .map(|i| {
                e[i] * x[i] + dt / 6.0 * (e[i] * a[i] + 2.0 * e2[i] * (b[i] + c[i]) + d[i])
            })
            .collect();
        let mut out = build(next)?;
        out.enforce_reality();
        Ok(out)
    }
}

/// One integrating-factor RK4 step.
pub fn step(
    u: &SpectralField,
    dt: f64,
    symbol: &LinearSymbol,
    nonlinearity: &dyn Nonlinearity,
) -> Result<SpectralField> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidParameter("dt must be positive".into()));
    }
    if !u.is_real() {
        return Err(Error::NotReal);
    }
    Stepper::new(u.grid(), symbol, dt, nonlinearity).step(u)
}

/// Heuristic stiffness of the nonlinear terms linearized about `u`.
pub fn nonlinear_stiffness(u: &SpectralField, coeffs: &EquationCoefficients) -> Result<f64> {
    let peak = |v: Vec<f64>| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let u0 = peak(u.synthesize(1)?);
    let u1 = peak(u.physical_derivative(1, 1)?);
    let u2 = peak(u.physical_derivative(2, 1)?);
    let k = u.grid().max_frequency();
    let EquationCoefficients { a1, a2, a3, a4 } = *coeffs;
    Ok(a2.abs() * u0 * u0 * k.powi(3)
        + a1.abs() * u0 * u1 * k * k
        + (a1.abs() * u0 * u2 + 3.0 * a3.abs() * u1 * u1 + a4.abs() * u0.powi(4)) * k)
}

fn phase_rate(u: &SpectralField) -> Result<f64> {
    Ok(u.lebesgue4_norm()?.powi(4) / (2.0 * PI))
}

/// Evolves `u0` to `t_end`. The step count is `round(t_end / dt)` and the step
/// is adjusted to land on `t_end` exactly.
pub fn evolve(u0: &SpectralField, t_end: f64, config: &EvolveConfig) -> Result<Trajectory> {
    config.validate()?;
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(Error::InvalidParameter("final time must be positive".into()));
    }
    if !u0.is_real() {
        return Err(Error::NotReal);
    }
    let steps = ((t_end / config.dt).round() as usize).max(1);
    let dt = t_end / steps as f64;
    if (dt - config.dt).abs() > 1e-12 * config.dt {
        debug!("step adjusted from {} to {dt} to reach t = {t_end}", config.dt);
    }

    let (datum_symbol, q0) = compute_constants(u0)?;
    let symbol = datum_symbol.with_epsilon(config.epsilon);
    let coeffs = config.coefficients();
    let physical;
    let renormalized;
    let (propagator, nonlinearity): (LinearSymbol, &dyn Nonlinearity) = match config.flow {
        Flow::Physical(c) => {
            physical = PhysicalNonlinearity { coeffs: c };
            (symbol.dispersion_only(), &physical)
        }
        Flow::Renormalized(mode) => {
            renormalized = RenormalizedNonlinearity { mode };
            (symbol, &renormalized)
        }
    };
    let stepper = Stepper::new(u0.grid(), &propagator, dt, nonlinearity);

    let mut traj = Trajectory::new(*u0.grid(), coeffs, symbol, config.flow, dt);
    let h2_initial = u0.sobolev_norm(2.0);
    let threshold = config.blowup_factor * h2_initial;
    let check_cfl = |u: &SpectralField, t: f64| -> Result<()> {
        let stiff = nonlinear_stiffness(u, &coeffs)?;
        if dt * stiff > config.cfl_limit {
            warn!(
                "t = {t}: dt * nonlinear stiffness = {:.3} exceeds {}",
                dt * stiff,
                config.cfl_limit
            );
        }
        Ok(())
    };
    let record = |traj: &mut Trajectory, u: &SpectralField, t: f64, phase: f64| -> Result<()> {
        let q = ConservedQuantities::of(u)?;
        let [g1, g2, h3] = q.relative_drift(&q0);
        traj.push(Snapshot {
            time: t,
            phase: Some(phase),
            field: u.clone(),
        })?;
        traj.push_monitor(MonitorRecord {
            time: t,
            gamma1_drift: g1,
            gamma2_drift: g2,
            ham3_drift: h3,
            hs_norm: u.sobolev_norm(config.monitor_s),
            phase,
        });
        Ok(())
    };

    check_cfl(u0, 0.0)?;
    let mut u = u0.clone();
    let mut phase = 0.0;
    let mut rate = phase_rate(&u)?;
    record(&mut traj, &u, 0.0, phase)?;
    for k in 1..=steps {
        let t = k as f64 * dt;
        u = stepper.step(&u)?;
        if !u.is_finite() {
            return Err(Error::NonFinite { time: t, step: k });
        }
        let next_rate = phase_rate(&u)?;
        phase += 0.5 * dt * (rate + next_rate);
        rate = next_rate;
        let h2 = u.sobolev_norm(2.0);
        if h2_initial > 0.0 && h2 > threshold {
            record(&mut traj, &u, t, phase)?;
            return Err(Error::BlowUp {
                time: t,
                norm: h2,
                threshold,
                partial: Box::new(traj),
            });
        }
        if k % config.record_stride == 0 || k == steps {
            check_cfl(&u, t)?;
            record(&mut traj, &u, t, phase)?;
        }
    }
    Ok(traj)
}

/// Final state of [`evolve`].
pub fn evolve_final(u0: &SpectralField, t_end: f64, config: &EvolveConfig) -> Result<SpectralField> {
    let cfg = EvolveConfig {
        record_stride: usize::MAX,
        ..*config
    };
    let traj = evolve(u0, t_end, &cfg)?;
    Ok(traj.last().expect("evolve records the final step").field.clone())
}

/// Runs the flow backwards from `u_end` over `duration` through the symmetry
/// `u(t, x) -> u(-t, -x)` of the odd equation: reflect, evolve forward,
/// reflect back.
pub fn evolve_backward(
    u_end: &SpectralField,
    duration: f64,
    config: &EvolveConfig,
) -> Result<SpectralField> {
    if config.epsilon != 0.0 {
        return Err(Error::InvalidParameter(
            "backward evolution requires epsilon = 0".into(),
        ));
    }
    let w = evolve_final(&reflect(u_end), duration, config)?;
    Ok(reflect(&w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_field, seeded};
    use crate::FrequencyGrid;

    #[test]
    fn linear_flow_is_exact_for_any_step() {
        let g = FrequencyGrid::unit(64).unwrap();
        let u = random_field(&mut seeded(1), g, 31, 0.0, 1.0);
        let sym = LinearSymbol::bare(1.0);
        let nl = PhysicalNonlinearity {
            coeffs: EquationCoefficients::LINEAR,
        };
        let dt = 0.37;
        let v = step(&u, dt, &sym.dispersion_only(), &nl).unwrap();
        for m in g.indices() {
            let n = m as f64;
            let expected = u.coeff(m) * Complex64::from_polar(1.0, n.powi(5) * dt);
            assert!((v.coeff(m) - expected).norm() < 1e-12);
        }
    }

    #[test]
    fn pure_damping() {
        let g = FrequencyGrid::unit(16).unwrap();
        let u = random_field(&mut seeded(2), g, 7, 0.0, 1.0);
        let nl = PhysicalNonlinearity {
            coeffs: EquationCoefficients::LINEAR,
        };
        let sym = LinearSymbol::bare(1.0).dispersion_only().with_epsilon(1e-4);
        let v = step(&u, 0.01, &sym, &nl).unwrap();
        for m in g.indices() {
            let n = m as f64;
            let expected = (-1e-4 * n.powi(6) * 0.01).exp() * u.coeff(m).norm();
            assert!((v.coeff(m).norm() - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_datum_gives_zero_trajectory() {
        let g = FrequencyGrid::unit(16).unwrap();
        let cfg = EvolveConfig::physical(EquationCoefficients::INTEGRABLE, 1e-3).with_stride(3);
        let traj = evolve(&SpectralField::zeros(g), 0.01, &cfg).unwrap();
        assert_eq!(traj.len(), 5);
        assert!(traj.snapshots().iter().all(|s| s.field.max_abs() == 0.0));
        assert!(traj
            .monitors()
            .iter()
            .all(|m| m.gamma1_drift == 0.0 && m.hs_norm == 0.0 && m.phase == 0.0));
    }

    #[test]
    fn invalid_parameters() {
        let g = FrequencyGrid::unit(16).unwrap();
        let u = SpectralField::cosine(g, 0.1, 1);
        let cfg = EvolveConfig::physical(EquationCoefficients::INTEGRABLE, -1.0);
        assert!(matches!(evolve(&u, 0.1, &cfg), Err(Error::InvalidParameter(_))));
        let cfg = EvolveConfig::physical(EquationCoefficients::INTEGRABLE, 1e-3);
        assert!(matches!(evolve(&u, 0.0, &cfg), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn blow_up_sentinel_returns_partial_trajectory() {
        let g = FrequencyGrid::unit(16).unwrap();
        let u = SpectralField::cosine(g, 1.0, 1);
        // a focusing-sign quintic term with a huge step grows without bound
        let cfg = EvolveConfig {
            blowup_factor: 2.0,
            ..EvolveConfig::physical(EquationCoefficients::new(0.0, 0.0, 0.0, 1e4), 1e-3)
        }
        .with_stride(1);
        match evolve(&u, 1.0, &cfg) {
            Err(Error::BlowUp { partial, norm, threshold, .. }) => {
                assert!(norm > threshold);
                assert!(partial.len() >= 2);
            }
            Err(Error::NonFinite { .. }) => {}
            other => panic!("expected blow-up, got {other:?}"),
        }
    }

    #[test]
    fn phase_of_constant_field() {
        let g = FrequencyGrid::unit(16).unwrap();
        let u = SpectralField::cosine(g, 0.5, 0);
        let cfg = EvolveConfig::physical(EquationCoefficients::INTEGRABLE, 1e-3).with_stride(2);
        let traj = evolve(&u, 0.01, &cfg).unwrap();
        let l4 = u.lebesgue4_norm().unwrap().powi(4);
        for s in traj.snapshots() {
            assert!((s.phase.unwrap() - s.time * l4 / (2.0 * PI)).abs() < 1e-15);
        }
    }
}
