use num_complex::Complex64;

use super::{EquationCoefficients, Nonlinearity};
use crate::spectral::dealias_factor;
use crate::{Result, SpectralField};

/// Nonlinear part `-a1 u u_x u_xx - a2 u^2 u_xxx - a3 u_x^3 + a4 u^4 u_x`,
/// evaluated by alias-free physical products.
pub fn nonlinear_physical(
    u: &SpectralField,
    coeffs: &EquationCoefficients,
) -> Result<SpectralField> {
    if coeffs.is_linear() {
        let mut z = SpectralField::zeros(*u.grid());
        z.set_real(u.is_real());
        return Ok(z);
    }
    let f = dealias_factor(5);
    let u0 = u.synthesize(f)?;
    let u1 = u.physical_derivative(1, f)?;
    let u2 = u.physical_derivative(2, f)?;
    let u3 = u.physical_derivative(3, f)?;
    let EquationCoefficients { a1, a2, a3, a4 } = *coeffs;
    let prod: Vec<f64> = (0..u0.len())
        .map(|j| {
            let (a, b, c, d) = (u0[j], u1[j], u2[j], u3[j]);
            let aa = a * a;
            -a1 * a * b * c - a2 * aa * d - a3 * b * b * b + a4 * aa * aa * b
        })
        .collect();
    Ok(SpectralField::from_physical(*u.grid(), &prod))
}

/// `u_xxxxx` plus the nonlinear part, so that `u_t = rhs_physical(u)`.
pub fn rhs_physical(u: &SpectralField, coeffs: &EquationCoefficients) -> Result<SpectralField> {
    let lin = u.derivative(5);
    let nl = nonlinear_physical(u, coeffs)?;
    Ok(&lin + &nl)
}

/// The integrable nonlinearity in divergence form,
/// `-10 (u^2 u_xx)_x - 10 (u u_x^2)_x + 6 (u^5)_x`; its mean mode is exactly 0.
pub fn nonlinear_divergence(u: &SpectralField) -> Result<SpectralField> {
    let [a, b, c] = divergence_pieces(u)?;
    let mut t = &a + &b;
    t = &t + &c;
    Ok(t)
}

/// `[-10 (u^2 u_xx)_x, -10 (u u_x^2)_x, 6 (u^5)_x]`
fn divergence_pieces(u: &SpectralField) -> Result<[SpectralField; 3]> {
    let f = dealias_factor(5);
    let u0 = u.synthesize(f)?;
    let u1 = u.physical_derivative(1, f)?;
    let u2 = u.physical_derivative(2, f)?;
    let g = *u.grid();
    let p1: Vec<f64> = (0..u0.len()).map(|j| u0[j] * u0[j] * u2[j]).collect();
    let p2: Vec<f64> = (0..u0.len()).map(|j| u0[j] * u1[j] * u1[j]).collect();
    let p3: Vec<f64> = u0.iter().map(|x| x.powi(5)).collect();
    Ok([
        SpectralField::from_physical(g, &p1).derivative(1).scaled(-10.0),
        SpectralField::from_physical(g, &p2).derivative(1).scaled(-10.0),
        SpectralField::from_physical(g, &p3).derivative(1).scaled(6.0),
    ])
}

/// `L^2` residual of the divergence-form identity: the cubic part
/// `40 u u_x u_xx + 10 u^2 u_xxx + 10 u_x^3` against
/// `10 (u^2 u_xx)_x + 10 (u u_x^2)_x`, plus `30 u^4 u_x` against `6 (u^5)_x`.
pub fn verify_divergence_form(u: &SpectralField) -> Result<f64> {
    let cubic = nonlinear_physical(u, &EquationCoefficients::new(40.0, 10.0, 10.0, 0.0))?;
    let quintic = nonlinear_physical(u, &EquationCoefficients::new(0.0, 0.0, 0.0, 30.0))?;
    let [a, b, c] = divergence_pieces(u)?;
    let cubic_div = &a + &b;
    Ok((&cubic - &cubic_div).l2_norm() + (&quintic - &c).l2_norm())
}

/// Instantaneous `d/dt int u^2 = 2 int u rhs(u)`, by Parseval on the
/// coefficients.
pub fn mass_derivative(u: &SpectralField, coeffs: &EquationCoefficients) -> Result<f64> {
    let r = rhs_physical(u, coeffs)?;
    let s: Complex64 = u
        .coeffs()
        .iter()
        .zip(r.coeffs())
        .map(|(a, b)| a.conj() * b)
        .sum();
    Ok(2.0 * s.re / u.grid().period_scale())
}

/// The physical nonlinearity as an evolution operator.
#[derive(Debug, Clone, Copy)]
pub struct PhysicalNonlinearity {
    pub coeffs: EquationCoefficients,
}

impl Nonlinearity for PhysicalNonlinearity {
    fn eval(&self, u: &SpectralField) -> Result<SpectralField> {
        nonlinear_physical(u, &self.coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_field, seeded};
    use crate::spectral::ipow;
    use crate::FrequencyGrid;

    /// Direct convolution of Fourier-series coefficients.
    fn direct_nonlinearity(u: &SpectralField, c: &EquationCoefficients) -> Vec<Complex64> {
        let g = *u.grid();
        let k = g.max_index();
        let s = u.series();
        let at = |m: i64| if m.abs() <= k { s[(m + k) as usize] } else { Complex64::new(0.0, 0.0) };
        let d = |m: i64, o: u32| ipow(g.frequency(m), o) * at(m);
        let mut out = vec![Complex64::new(0.0, 0.0); s.len()];
        for m in -k..=k {
            let mut acc = Complex64::new(0.0, 0.0);
            for m1 in -k..=k {
                for m2 in -k..=k {
                    let m3 = m - m1 - m2;
                    if m3.abs() <= k {
                        acc -= c.a1 * at(m1) * d(m2, 1) * d(m3, 2);
                        acc -= c.a2 * at(m1) * at(m2) * d(m3, 3);
                        acc -= c.a3 * d(m1, 1) * d(m2, 1) * d(m3, 1);
                    }
                    for m4 in -k..=k {
                        for m5 in -k..=k {
                            let m3 = m - m1 - m2 - m4 - m5;
                            if m3.abs() > k {
                                continue;
                            }
                            acc += c.a4 * at(m1) * at(m2) * at(m3) * at(m4) * d(m5, 1);
                        }
                    }
                }
            }
            out[(m + k) as usize] = acc;
        }
        out
    }

    #[test]
    fn zero_field() {
        let g = FrequencyGrid::unit(16).unwrap();
        let z = SpectralField::zeros(g);
        let r = rhs_physical(&z, &EquationCoefficients::INTEGRABLE).unwrap();
        assert_eq!(r.max_abs(), 0.0);
    }

    #[test]
    fn linear_part() {
        let g = FrequencyGrid::unit(16).unwrap();
        let u = random_field(&mut seeded(2), g, 7, 0.0, 1.0);
        let r = rhs_physical(&u, &EquationCoefficients::LINEAR).unwrap();
        for m in g.indices() {
            let n = m as f64;
            let expected = Complex64::new(0.0, n.powi(5)) * u.coeff(m);
            assert!((r.coeff(m) - expected).norm() <= 1e-15 * expected.norm().max(1.0));
        }
    }

    #[test]
    fn matches_direct_convolution() {
        let g = FrequencyGrid::unit(16).unwrap();
        let c = EquationCoefficients::new(40.0, 10.0, 20.0, 30.0);
        let u = random_field(&mut seeded(11), g, 7, 0.5, 0.8);
        let fast = nonlinear_physical(&u, &c).unwrap().series();
        let slow = direct_nonlinearity(&u, &c);
        let scale = slow.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn single_mode_reachable_set() {
        let g = FrequencyGrid::unit(32).unwrap();
        let u = SpectralField::cosine(g, 0.5, 2);
        let r = nonlinear_physical(&u, &EquationCoefficients::new(1.0, 2.0, 3.0, 4.0)).unwrap();
        for m in g.indices() {
            if ![2, 6, 10].contains(&m.abs()) {
                assert!(r.coeff(m).norm() < 1e-13, "mode {m}");
            }
        }
        assert!(r.coeff(6).norm() > 1e-3);
    }

    #[test]
    fn divergence_form_cosine() {
        let g = FrequencyGrid::unit(32).unwrap();
        let u = SpectralField::cosine(g, 1.0, 1);
        assert!(verify_divergence_form(&u).unwrap() <= 1e-12);
        assert_eq!(verify_divergence_form(&SpectralField::zeros(g)).unwrap(), 0.0);
    }

    #[test]
    fn divergence_mean_is_zero() {
        let g = FrequencyGrid::unit(32).unwrap();
        let u = random_field(&mut seeded(5), g, 15, 1.0, 1.0);
        assert_eq!(nonlinear_divergence(&u).unwrap().coeff(0), Complex64::new(0.0, 0.0));
    }
}
