use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;

use crate::random::random_field_in_ball;
use crate::resonance::nonresonant3;
use crate::spectral::CutoffFamily;
use crate::{Error, FrequencyGrid, Result, SpectralField};

/// Size cap of the direct correction sums.
pub const ENERGY_MAX_MODES: usize = 64;

/// Coefficients of the modified energies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModifiedEnergyParams {
    pub alpha: f64,
    pub beta: f64,
    pub alpha_diff: f64,
    pub beta_diff: f64,
    pub s: f64,
    pub a_s: f64,
}

impl Default for ModifiedEnergyParams {
    fn default() -> Self {
        Self {
            alpha: -4.0,
            beta: -2.0,
            alpha_diff: -4.0 / 3.0,
            beta_diff: -2.0 / 3.0,
            s: 3.0,
            a_s: 0.0,
        }
    }
}

fn block_weight(k: u32, s: f64) -> f64 {
    2f64.powf(2.0 * s * k as f64)
}

fn block_mass(v: &SpectralField, k: u32, cutoffs: &CutoffFamily) -> f64 {
    cutoffs.project(v, k).l2_norm().powi(2)
}

fn blocks(grid: &FrequencyGrid) -> u32 {
    CutoffFamily::block_count(grid.max_frequency())
}

/// Fixed-time dyadic energy `||P_0 v||^2 + sum_{k>=1} 2^{2sk} ||P_k v||^2`
/// (a squared quantity).
pub fn dyadic_energy_norm(v: &SpectralField, s: f64, cutoffs: &CutoffFamily) -> f64 {
    let mut total = block_mass(v, 0, cutoffs);
    for k in 1..blocks(v.grid()) {
        total += block_weight(k, s) * block_mass(v, k, cutoffs);
    }
    total
}

/// `(sum psi_k(n3)/n3 ..., sum chi_k(n3)/n3 ...)`: the two quartic sums
///
/// ```text
/// sum_{n, N3(-n)} a(n1) a(n2) W(n3) (1/n3) b(n3) chi_k(n) (1/n) b(n)
/// ```
///
/// with `W = psi_k` and `W = chi_k`, times the torus length. Terms with
/// `n = 0` or `n3 = 0` are excluded.
pub fn correction_sums(
    a: &SpectralField,
    b: &SpectralField,
    k: u32,
    cutoffs: &CutoffFamily,
) -> Result<(Complex64, Complex64)> {
    let grid = *a.grid();
    if !grid.same_as(b.grid()) {
        return Err(Error::GridMismatch("energy inputs use different grids".into()));
    }
    if grid.num_modes() > ENERGY_MAX_MODES {
        return Err(Error::SizeCap {
            cap: ENERGY_MAX_MODES,
            got: grid.num_modes(),
        });
    }
    let kk = grid.max_index();
    let ca = a.series();
    let cb = b.series();
    let at = |c: &[Complex64], m: i64| c[(m + kk) as usize];
    let weights: Vec<(f64, f64)> = grid
        .indices()
        .map(|m| {
            let n = grid.frequency(m);
            if m == 0 {
                (0.0, 0.0)
            } else {
                (cutoffs.psi(k, n) / n, cutoffs.chi(k, n) / n)
            }
        })
        .collect();
    let w = |m: i64| weights[(m + kk) as usize];

    let mut s_psi = Complex64::new(0.0, 0.0);
    let mut s_chi = Complex64::new(0.0, 0.0);
    for m in -kk..=kk {
        let outer = w(m).1;
        if outer == 0.0 {
            continue;
        }
        let bn = at(&cb, m) * outer;
        for m1 in -kk..=kk {
            let a1 = at(&ca, m1);
            let lo = (-kk).max(-m - m1 - kk);
            let hi = kk.min(-m - m1 + kk);
            for m2 in lo..=hi {
                let m3 = -m - m1 - m2;
                if m3 == 0 || !nonresonant3(m1, m2, m3) {
                    continue;
                }
                let (wp, wc) = w(m3);
                if wp == 0.0 && wc == 0.0 {
                    continue;
                }
                let t = a1 * at(&ca, m2) * at(&cb, m3) * bn;
                s_psi += t * wp;
                s_chi += t * wc;
            }
        }
    }
    let len = 2.0 * PI * grid.period_scale();
    Ok((s_psi * len, s_chi * len))
}

/// Localized modified energy `E_k(v)` for `k >= 1`.
pub fn modified_energy_k(
    v: &SpectralField,
    k: u32,
    params: &ModifiedEnergyParams,
    cutoffs: &CutoffFamily,
) -> Result<f64> {
    if !v.is_real() {
        return Err(Error::NotReal);
    }
    let (sp, sc) = correction_sums(v, v, k, cutoffs)?;
    Ok(block_mass(v, k, cutoffs) + params.alpha * sp.re + params.beta * sc.re)
}

/// Localized modified energy of the difference `w` of two solutions, with
/// `v2` the second solution.
pub fn difference_energy_k(
    v2: &SpectralField,
    w: &SpectralField,
    k: u32,
    params: &ModifiedEnergyParams,
    cutoffs: &CutoffFamily,
) -> Result<f64> {
    if !v2.is_real() || !w.is_real() {
        return Err(Error::NotReal);
    }
    let (sp, sc) = correction_sums(v2, w, k, cutoffs)?;
    Ok(block_mass(w, k, cutoffs) + params.alpha_diff * sp.re + params.beta_diff * sc.re)
}

fn total_over_snapshots(
    fields: &[SpectralField],
    s: f64,
    energy_k: impl Fn(usize, u32) -> Result<f64>,
    cutoffs: &CutoffFamily,
) -> Result<f64> {
    let first = fields
        .first()
        .ok_or_else(|| Error::Degenerate("no snapshots".into()))?;
    let mut total = block_mass(first, 0, cutoffs);
    for k in 1..blocks(first.grid()) {
        let mut sup = f64::NEG_INFINITY;
        for i in 0..fields.len() {
            sup = sup.max(energy_k(i, k)?);
        }
        total += block_weight(k, s) * sup;
    }
    Ok(total)
}

/// `E_T^s(v) = ||P_0 v(0)||^2 + sum_{k>=1} 2^{2sk} sup_t E_k(v)(t)`, with the
/// sup taken over the given snapshots.
pub fn modified_energy_total(
    snapshots: &[SpectralField],
    s: f64,
    params: &ModifiedEnergyParams,
    cutoffs: &CutoffFamily,
) -> Result<f64> {
    total_over_snapshots(
        snapshots,
        s,
        |i, k| modified_energy_k(&snapshots[i], k, params, cutoffs),
        cutoffs,
    )
}

/// The difference analogue of [`modified_energy_total`]; `v2` and `w` are
/// paired snapshot by snapshot.
pub fn difference_energy_total(
    v2: &[SpectralField],
    w: &[SpectralField],
    s: f64,
    params: &ModifiedEnergyParams,
    cutoffs: &CutoffFamily,
) -> Result<f64> {
    if v2.len() != w.len() {
        return Err(Error::LengthMismatch {
            expected: v2.len(),
            got: w.len(),
        });
    }
    total_over_snapshots(
        w,
        s,
        |i, k| difference_energy_k(&v2[i], &w[i], k, params, cutoffs),
        cutoffs,
    )
}

/// Solution or difference energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnergyKind {
    Solution,
    Difference,
}

/// Outcome of [`comparability_check`].
#[derive(Debug, Clone)]
pub struct ComparabilityReport {
    pub kind: EnergyKind,
    pub delta: f64,
    pub samples: usize,
    /// Samples violating `proxy/2 <= E <= 3 proxy/2`.
    pub failures: usize,
    /// Extremes of `E / proxy` over the samples.
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// Largest `H^s` radius for which every sampled shape satisfies the bounds.
    pub empirical_delta: f64,
}

impl ComparabilityReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Samples random shapes, places them on the sphere `||v||_{H^s} = delta`
/// (the hardest radius, as corrections are quartic and plain terms
/// quadratic), and checks `proxy/2 <= E_T^s <= 3 proxy/2`. For the difference
/// energy `v2` and `w` are drawn independently on the same sphere.
///
/// For a unit shape with plain part `P` and correction `Q`, the energy at
/// radius `r` is `r^2 P + r^4 Q`, so the largest admissible radius is
/// `sqrt(P / (2 |Q|))`; the minimum over samples is the empirical delta.
pub fn comparability_check<R: Rng>(
    rng: &mut R,
    grid: FrequencyGrid,
    kind: EnergyKind,
    samples: usize,
    delta: f64,
    params: &ModifiedEnergyParams,
    cutoffs: &CutoffFamily,
) -> Result<ComparabilityReport> {
    let s = params.s;
    if s <= 0.5 {
        return Err(Error::InvalidParameter("comparability needs s > 1/2".into()));
    }
    let band = grid.max_index();
    let mut report = ComparabilityReport {
        kind,
        delta,
        samples,
        failures: 0,
        min_ratio: f64::INFINITY,
        max_ratio: f64::NEG_INFINITY,
        empirical_delta: f64::INFINITY,
    };
    for i in 0..samples {
        // alternate spread-out and block-concentrated shapes
        let decay = if i % 2 == 0 { s } else { 0.0 };
        let (a, b) = match kind {
            EnergyKind::Solution => {
                let v = random_field_in_ball(rng, grid, band, decay, s, 1.0);
                (v.clone(), v)
            }
            EnergyKind::Difference => {
                let v2 = random_field_in_ball(rng, grid, band, decay, s, 1.0);
                let w = random_field_in_ball(rng, grid, band, decay, s, 1.0);
                (v2, w)
            }
        };
        let plain = dyadic_energy_norm(&b, s, cutoffs);
        let unit = [b.clone()];
        let full = match kind {
            EnergyKind::Solution => modified_energy_total(&unit, s, params, cutoffs)?,
            EnergyKind::Difference => {
                difference_energy_total(std::slice::from_ref(&a), &unit, s, params, cutoffs)?
            }
        };
        let corr = full - plain;
        if corr != 0.0 {
            report.empirical_delta = report.empirical_delta.min((plain / (2.0 * corr.abs())).sqrt());
        }
        // at radius delta: plain scales by delta^2, correction by delta^4
        let d2 = delta * delta;
        let ratio = (d2 * plain + d2 * d2 * corr) / (d2 * plain);
        report.min_ratio = report.min_ratio.min(ratio);
        report.max_ratio = report.max_ratio.max(ratio);
        if !(0.5..=1.5).contains(&ratio) {
            report.failures += 1;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_field, seeded};

    fn cut() -> CutoffFamily {
        CutoffFamily::new()
    }

    #[test]
    fn zero_inputs() {
        let g = FrequencyGrid::unit(32).unwrap();
        let z = SpectralField::zeros(g);
        let p = ModifiedEnergyParams::default();
        assert_eq!(dyadic_energy_norm(&z, 3.0, &cut()), 0.0);
        assert_eq!(modified_energy_k(&z, 2, &p, &cut()).unwrap(), 0.0);
        assert_eq!(modified_energy_total(std::slice::from_ref(&z), 3.0, &p, &cut()).unwrap(), 0.0);
        let v = random_field(&mut seeded(1), g, 15, 1.0, 0.3);
        assert_eq!(difference_energy_k(&v, &z, 2, &p, &cut()).unwrap(), 0.0);
    }

    #[test]
    fn mode_four_sits_in_one_block() {
        let g = FrequencyGrid::unit(32).unwrap();
        let v = SpectralField::cosine(g, 1.0, 4);
        let d = dyadic_energy_norm(&v, 0.0, &cut());
        let l2 = v.l2_norm().powi(2);
        assert!((d - l2).abs() < 1e-14 * l2);
    }

    #[test]
    fn two_mode_fields_have_no_correction() {
        let g = FrequencyGrid::unit(32).unwrap();
        let p = ModifiedEnergyParams::default();
        let v = SpectralField::cosine(g, 0.7, 5);
        let w = SpectralField::sine(g, 0.3, 3);
        for k in 1..5 {
            let plain = block_mass(&v, k, &cut());
            assert_eq!(modified_energy_k(&v, k, &p, &cut()).unwrap(), plain);
            let (a, b) = correction_sums(&v, &w, k, &cut()).unwrap();
            assert_eq!((a, b), (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)));
        }
    }

    #[test]
    fn difference_energy_without_background() {
        let g = FrequencyGrid::unit(32).unwrap();
        let p = ModifiedEnergyParams::default();
        let w = random_field(&mut seeded(4), g, 15, 1.0, 0.3);
        let z = SpectralField::zeros(g);
        for k in 1..5 {
            assert_eq!(
                difference_energy_k(&z, &w, k, &p, &cut()).unwrap(),
                block_mass(&w, k, &cut())
            );
        }
    }

    #[test]
    fn single_snapshot_total() {
        let g = FrequencyGrid::unit(32).unwrap();
        let p = ModifiedEnergyParams::default();
        let v = random_field(&mut seeded(6), g, 15, 1.0, 0.2);
        let mut expected = block_mass(&v, 0, &cut());
        for k in 1..blocks(&g) {
            expected += block_weight(k, 2.0) * modified_energy_k(&v, k, &p, &cut()).unwrap();
        }
        let got = modified_energy_total(&[v], 2.0, &p, &cut()).unwrap();
        assert!((got - expected).abs() <= 1e-14 * expected);
    }

    #[test]
    fn size_cap() {
        let g = FrequencyGrid::unit(128).unwrap();
        let z = SpectralField::zeros(g);
        assert!(matches!(
            modified_energy_k(&z, 1, &ModifiedEnergyParams::default(), &cut()),
            Err(Error::SizeCap { .. })
        ));
    }
}
