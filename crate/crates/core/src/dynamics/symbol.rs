use std::f64::consts::PI;

use num_complex::Complex64;

use crate::{Result, SpectralField};

/// Dispersion `mu(n) = n^5 + c1 n^3 + c2 n`, gauge speed `c3` and parabolic
/// damping rate `epsilon n^6`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearSymbol {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub epsilon: f64,
}

impl LinearSymbol {
    /// The bare symbol `n^5` on the `2 pi lambda` torus.
    pub fn bare(period_scale: f64) -> Self {
        Self {
            c1: 0.0,
            c2: 0.0,
            c3: 20.0 / period_scale,
            epsilon: 0.0,
        }
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    /// The same symbol with `c1 = c2 = 0`.
    pub fn dispersion_only(mut self) -> Self {
        self.c1 = 0.0;
        self.c2 = 0.0;
        self
    }

    #[inline]
    pub fn mu(&self, n: f64) -> f64 {
        let n2 = n * n;
        n * (n2 * (n2 + self.c1) + self.c2)
    }

    #[inline]
    pub fn damping(&self, n: f64) -> f64 {
        self.epsilon * n.powi(6)
    }

    /// `i mu(n) - epsilon n^6`
    #[inline]
    pub fn rate(&self, n: f64) -> Complex64 {
        Complex64::new(-self.damping(n), self.mu(n))
    }
}

/// `gamma1 = int u^2`, `gamma2 = int u_x^2 + u^4`,
/// `ham3 = int u_xx^2 / 2 + u^6 + 5 u^2 u_x^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservedQuantities {
    pub gamma1: f64,
    pub gamma2: f64,
    pub ham3: f64,
}

impl ConservedQuantities {
    pub fn of(u: &SpectralField) -> Result<Self> {
        let f = 3;
        let v = u.synthesize(f)?;
        let vx = u.physical_derivative(1, f)?;
        let vxx = u.physical_derivative(2, f)?;
        let (mut g1, mut g2, mut h3) = (0.0, 0.0, 0.0);
        for ((&a, &b), &c) in v.iter().zip(&vx).zip(&vxx) {
            let a2 = a * a;
            let b2 = b * b;
            g1 += a2;
            g2 += b2 + a2 * a2;
            h3 += 0.5 * c * c + a2 * a2 * a2 + 5.0 * a2 * b2;
        }
        let w = u.grid().quadrature_weight(f);
        Ok(Self {
            gamma1: g1 * w,
            gamma2: g2 * w,
            ham3: h3 * w,
        })
    }

    /// Largest relative drift of the three quantities against `reference`,
    /// as `[gamma1, gamma2, ham3]`.
    pub fn relative_drift(&self, reference: &Self) -> [f64; 3] {
        let rel = |a: f64, b: f64| if b == 0.0 { (a - b).abs() } else { ((a - b) / b).abs() };
        [
            rel(self.gamma1, reference.gamma1),
            rel(self.gamma2, reference.gamma2),
            rel(self.ham3, reference.ham3),
        ]
    }
}

/// Conserved quantities of `u0` and the dispersion constants they induce.
///
/// On the `2 pi lambda` torus, `c1 = (10 / lambda) gamma1 / (2 pi)`,
/// `c2 = (10 / lambda) gamma2 / (2 pi)` and `c3 = 20 / lambda`; in terms of
/// torus averages `c1 = 10 <u^2>` and `c2 = 10 (<u_x^2> + <u^4>)`.
pub fn compute_constants(u0: &SpectralField) -> Result<(LinearSymbol, ConservedQuantities)> {
    let q = ConservedQuantities::of(u0)?;
    let lambda = u0.grid().period_scale();
    let sym = LinearSymbol {
        c1: 10.0 * q.gamma1 / (2.0 * PI * lambda),
        c2: 10.0 * q.gamma2 / (2.0 * PI * lambda),
        c3: 20.0 / lambda,
        epsilon: 0.0,
    };
    Ok((sym, q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::FrequencyGrid;

    #[test]
    fn zero_datum() {
        let g = FrequencyGrid::new(16, 3.0).unwrap();
        let (sym, q) = compute_constants(&SpectralField::zeros(g)).unwrap();
        assert_eq!((sym.c1, sym.c2), (0.0, 0.0));
        assert!((sym.c3 - 20.0 / 3.0).abs() < 1e-15);
        assert_eq!((q.gamma1, q.gamma2, q.ham3), (0.0, 0.0, 0.0));
    }

    #[test]
    fn cosine_datum_hand_integrals() {
        let g = FrequencyGrid::unit(32).unwrap();
        let d = 0.3;
        let (_, q) = compute_constants(&SpectralField::cosine(g, d, 1)).unwrap();
        assert!((q.gamma1 - PI * d * d).abs() < 1e-14);
        assert!((q.gamma2 - (PI * d * d + 0.75 * PI * d.powi(4))).abs() < 1e-14);
        // int cos^2/2 + cos^6 + 5 cos^2 sin^2 = pi/2 + 5pi/8 + 5pi/4 at unit amplitude
        let h = 0.5 * PI * d * d + 0.625 * PI * d.powi(6) + 1.25 * PI * d.powi(4);
        assert!((q.ham3 - h).abs() < 1e-14);
    }

    #[test]
    fn mu_is_odd() {
        let s = LinearSymbol {
            c1: 0.3,
            c2: 1.7,
            c3: 20.0,
            epsilon: 0.0,
        };
        for n in [0.5, 1.0, 3.0, 17.0] {
            assert_eq!(s.mu(-n), -s.mu(n));
        }
        assert_eq!(s.mu(2.0), 32.0 + 0.3 * 8.0 + 1.7 * 2.0);
    }
}
