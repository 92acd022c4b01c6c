use super::{evolve, evolve_final, EvolveConfig, Flow, Trajectory};
use crate::dynamics::{gauge_forward, RhsMode};
use crate::{Error, FrequencyGrid, Result, SpectralField};

/// Distances of the parabolic flows to the dispersive flow.
#[derive(Debug, Clone)]
pub struct ParabolicReport {
    pub epsilons: Vec<f64>,
    /// `sup_t ||u^eps(t) - u^0(t)||_{H^s}` per epsilon.
    pub distances: Vec<f64>,
    pub reference: Trajectory,
    pub trajectories: Vec<Trajectory>,
}

impl ParabolicReport {
    pub fn strictly_decreasing(&self) -> bool {
        self.distances.windows(2).all(|w| w[1] < w[0])
    }

    /// Least-squares slope of `log distance` against `log epsilon`; reported,
    /// not asserted.
    pub fn empirical_rate(&self) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self
            .epsilons
            .iter()
            .zip(&self.distances)
            .filter(|(e, d)| **e > 0.0 && **d > 0.0)
            .map(|(e, d)| (e.ln(), d.ln()))
            .collect();
        crate::xsb::least_squares(&pts).map(|(slope, _)| slope)
    }
}

/// Evolves `u0` with each `epsilon` in `eps_list` and with `epsilon = 0`, and
/// measures the sup-in-time `H^s` distances.
pub fn parabolic_family(
    u0: &SpectralField,
    t_end: f64,
    eps_list: &[f64],
    config: &EvolveConfig,
    s: f64,
) -> Result<ParabolicReport> {
    if eps_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParameter(
            "epsilon list must be strictly decreasing".into(),
        ));
    }
    if eps_list.iter().any(|e| !(e.is_finite() && *e >= 0.0)) {
        return Err(Error::InvalidParameter("epsilons must be nonnegative".into()));
    }
    let reference = evolve(u0, t_end, &config.with_epsilon(0.0))?;
    let trajectories = eps_list
        .iter()
        .map(|&e| evolve(u0, t_end, &config.with_epsilon(e)))
        .collect::<Result<Vec<_>>>()?;
    let distances = trajectories
        .iter()
        .map(|t| t.sup_distance(&reference, s))
        .collect::<Result<Vec<_>>>()?;
    Ok(ParabolicReport {
        epsilons: eps_list.to_vec(),
        distances,
        reference,
        trajectories,
    })
}

/// `||(1 - exp(-epsilon n^6 t)) u0_hat||_{H^s}`: the distance between the
/// damped and undamped linear flows at time `t`, which is also its sup over
/// `[0, t]`.
pub fn parabolic_linear_distance(u0: &SpectralField, epsilon: f64, t: f64, s: f64) -> f64 {
    u0.map_with_frequency(|n, c| c * -(-epsilon * n.powi(6) * t).exp_m1())
        .sobolev_norm(s)
}

/// The datum `lambda^-1 u0(x / lambda)` on the `2 pi lambda` torus with
/// `lambda M` samples.
pub fn rescale_datum(u0: &SpectralField, lambda: f64) -> Result<SpectralField> {
    let g = u0.grid();
    if (g.period_scale() - 1.0).abs() > 1e-15 {
        return Err(Error::InvalidParameter("datum must live on the 2 pi torus".into()));
    }
    let modes = lambda * g.num_modes() as f64;
    if !(lambda >= 1.0) || (modes - modes.round()).abs() > 1e-9 || !(modes.round() as usize).is_multiple_of(2) {
        return Err(Error::GridMismatch(format!(
            "lambda = {lambda} does not give an even integer sample count from M = {}",
            g.num_modes()
        )));
    }
    let grid = FrequencyGrid::new(modes.round() as usize, lambda)?;
    let mut out = SpectralField::zeros(grid);
    // series coefficients scale by 1/lambda and the storage factor by lambda
    for m in g.indices() {
        out.set_coeff(m, u0.coeff(m));
    }
    Ok(out)
}

/// Residual of the scaling symmetry `u_lambda(t, x) = lambda^-1 u(lambda^-5 t, x / lambda)`:
/// the rescaled datum is evolved on the large torus to `t_end`, the original
/// on the `2 pi` torus to `lambda^-5 t_end` with the same number of steps, and
/// the sup over snapshots of the `H^s(T_lambda)` distance is returned.
pub fn scaling_check(
    u0: &SpectralField,
    lambda: f64,
    t_end: f64,
    config: &EvolveConfig,
    s: f64,
) -> Result<f64> {
    let big = rescale_datum(u0, lambda)?;
    let direct = evolve(&big, t_end, config)?;
    let l5 = lambda.powi(5);
    let small_cfg = EvolveConfig {
        dt: config.dt / l5,
        ..*config
    };
    let small = evolve(u0, t_end / l5, &small_cfg)?;
    if small.len() != direct.len() {
        return Err(Error::LengthMismatch {
            expected: direct.len(),
            got: small.len(),
        });
    }
    let mut worst = 0.0f64;
    for (a, b) in direct.snapshots().iter().zip(small.snapshots()) {
        let rescaled = rescale_datum(&b.field, lambda)?;
        worst = worst.max(a.field.sobolev_distance(&rescaled, s));
    }
    Ok(worst)
}

/// Gauged physical flow against the directly integrated renormalized flow.
#[derive(Debug, Clone)]
pub struct EquivalenceReport {
    /// `sup_t ||NT(u)(t) - v(t)||_{H^s}`.
    pub distance: f64,
    pub gauged: Trajectory,
    pub direct: Trajectory,
}

/// Evolves `u0` under the physical flow with `coeffs`, gauges it, evolves the
/// same datum under the renormalized flow with `mode`, and measures the
/// sup-in-time `H^s` distance over matching snapshots. `config` supplies the
/// step, stride and regularization; its flow is ignored.
pub fn gauge_equivalence(
    u0: &SpectralField,
    t_end: f64,
    coeffs: crate::dynamics::EquationCoefficients,
    mode: RhsMode,
    config: &EvolveConfig,
    s: f64,
) -> Result<EquivalenceReport> {
    let physical = evolve(
        u0,
        t_end,
        &EvolveConfig {
            flow: Flow::Physical(coeffs),
            ..*config
        },
    )?;
    let gauged = gauge_forward(&physical)?;
    let direct = evolve(
        u0,
        t_end,
        &EvolveConfig {
            flow: Flow::Renormalized(mode),
            ..*config
        },
    )?;
    let distance = gauged.sup_distance(&direct, s)?;
    Ok(EquivalenceReport {
        distance,
        gauged,
        direct,
    })
}

/// Self-convergence of the scheme.
#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub dts: Vec<f64>,
    /// `||u_dt - u_{dt/2}||` in `L^2` for consecutive step sizes.
    pub differences: Vec<f64>,
    /// `log2` ratios of consecutive differences.
    pub orders: Vec<f64>,
}

impl ConvergenceReport {
    pub fn min_order(&self) -> f64 {
        self.orders.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Runs `u0` to `t_end` with `dt0, dt0/2, ..., dt0/2^halvings` and reports the
/// observed orders.
pub fn self_convergence(
    u0: &SpectralField,
    t_end: f64,
    dt0: f64,
    halvings: usize,
    config: &EvolveConfig,
) -> Result<ConvergenceReport> {
    if halvings < 2 {
        return Err(Error::InvalidParameter("need at least two halvings".into()));
    }
    let dts: Vec<f64> = (0..=halvings).map(|i| dt0 / (1u64 << i) as f64).collect();
    let finals = dts
        .iter()
        .map(|&dt| evolve_final(u0, t_end, &EvolveConfig { dt, ..*config }))
        .collect::<Result<Vec<_>>>()?;
    let differences: Vec<f64> = finals.windows(2).map(|w| w[0].sobolev_distance(&w[1], 0.0)).collect();
    let orders = differences.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    Ok(ConvergenceReport {
        dts,
        differences,
        orders,
    })
}
