use super::SpectralField;

/// Number of tabulated points of the bump on its transition interval `[1, 2]`.
pub const TABLE_POINTS: usize = 1 << 12;

/// Smooth transition `S(x) = phi(x) / (phi(x) + phi(1 - x))`, `phi(x) = exp(-1/x)`,
/// with its first two derivatives. `S` is 0 for `x <= 0` and 1 for `x >= 1`.
fn transition(x: f64) -> [f64; 3] {
    if x <= 0.0 {
        return [0.0, 0.0, 0.0];
    }
    if x >= 1.0 {
        return [1.0, 0.0, 0.0];
    }
    let y = 1.0 - x;
    let g = 1.0 / x - 1.0 / y;
    let dg = -1.0 / (x * x) - 1.0 / (y * y);
    let d2g = 2.0 / (x * x * x) - 2.0 / (y * y * y);
    let s = 1.0 / (1.0 + g.exp());
    let w = s * (1.0 - s);
    let ds = -w * dg;
    let d2s = -(ds * (1.0 - 2.0 * s) * dg + w * d2g);
    // w underflows to 0 well before dg overflows, but guard the product anyway
    let clean = |v: f64| if v.is_finite() { v } else { 0.0 };
    [s, clean(ds), clean(d2s)]
}

/// `eta_0` and its first two derivatives from the closed form.
fn bump_exact(x: f64) -> [f64; 3] {
    let a = x.abs();
    if a <= 1.0 {
        return [1.0, 0.0, 0.0];
    }
    if a >= 2.0 {
        return [0.0, 0.0, 0.0];
    }
    let [s, ds, d2s] = transition(2.0 - a);
    [s, -ds * x.signum(), d2s]
}

/// The bump `eta_0` and the dyadic cutoffs `chi_k`, `psi_k`, `eta_j` built
/// from it.
///
/// `eta_0` equals 1 on `[-1, 1]`, vanishes outside `(-2, 2)` and is tabulated
/// with exact derivatives on `[1, 2]`; evaluation uses cubic Hermite
/// interpolation so the derivative is that of the interpolant.
#[derive(Debug, Clone)]
pub struct CutoffFamily {
    values: Vec<f64>,
    slopes: Vec<f64>,
    step: f64,
}

impl Default for CutoffFamily {
    fn default() -> Self {
        Self::new()
    }
}

impl CutoffFamily {
    pub fn new() -> Self {
        let step = 1.0 / (TABLE_POINTS - 1) as f64;
        let (values, slopes) = (0..TABLE_POINTS)
            .map(|i| {
                let [v, d, _] = bump_exact(1.0 + i as f64 * step);
                (v, d)
            })
            .unzip();
        Self {
            values,
            slopes,
            step,
        }
    }

    /// `(eta_0(x), eta_0'(x))` from the interpolated table.
    fn bump_with_slope(&self, x: f64) -> (f64, f64) {
        let a = x.abs();
        if a <= 1.0 {
            return (1.0, 0.0);
        }
        if a >= 2.0 {
            return (0.0, 0.0);
        }
        let pos = (a - 1.0) / self.step;
        let i = (pos.floor() as usize).min(TABLE_POINTS - 2);
        let t = pos - i as f64;
        let h = self.step;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.slopes[i] * h, self.slopes[i + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        let v = (2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + t) * m0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * m1;
        let dv = ((6.0 * t2 - 6.0 * t) * y0
            + (3.0 * t2 - 4.0 * t + 1.0) * m0
            + (-6.0 * t2 + 6.0 * t) * y1
            + (3.0 * t2 - 2.0 * t) * m1)
            / h;
        // the cubic can overshoot by rounding where the profile is flat
        (v.clamp(0.0, 1.0), dv * x.signum())
    }

    pub fn eta0(&self, x: f64) -> f64 {
        self.bump_with_slope(x).0
    }

    pub fn eta0_derivative(&self, x: f64) -> f64 {
        self.bump_with_slope(x).1
    }

    /// `chi_k(n)`
    pub fn chi(&self, k: u32, n: f64) -> f64 {
        let outer = self.eta0(n / scale(k));
        if k == 0 {
            outer
        } else {
            outer - self.eta0(n / scale(k - 1))
        }
    }

    /// `chi_k'(n)`
    pub fn chi_derivative(&self, k: u32, n: f64) -> f64 {
        let outer = self.eta0_derivative(n / scale(k)) / scale(k);
        if k == 0 {
            outer
        } else {
            outer - self.eta0_derivative(n / scale(k - 1)) / scale(k - 1)
        }
    }

    /// `psi_k(n) = n chi_k'(n)`
    pub fn psi(&self, k: u32, n: f64) -> f64 {
        n * self.chi_derivative(k, n)
    }

    /// Modulation cutoff `eta_j(sigma)`, the same dyadic profile applied to
    /// `sigma = tau - mu(n)`.
    pub fn eta(&self, j: u32, sigma: f64) -> f64 {
        self.chi(j, sigma)
    }

    /// Dyadic blocks needed to cover frequencies up to `max_freq`.
    pub fn block_count(max_freq: f64) -> u32 {
        let mut k = 0;
        while scale(k) < max_freq {
            k += 1;
        }
        k + 1
    }

    /// Littlewood-Paley projection `P_k`.
    pub fn project(&self, field: &SpectralField, k: u32) -> SpectralField {
        field.map_with_frequency(|n, c| c * self.chi(k, n))
    }

    /// `C_j = max_x |eta_0^(j)(x)| <x>^j` for `j = 0, 1, 2` over `samples`
    /// equispaced points of `[-2, 2]`, together with the largest derivative
    /// magnitude found outside `(-2, 2)`. The regularity hypothesis holds in
    /// the support-indicator form when the constants are finite and the
    /// outside value is zero.
    pub fn regularity_constants(&self, samples: usize) -> ([f64; 3], f64) {
        let mut c = [0.0f64; 3];
        let mut outside = 0.0f64;
        let samples = samples.max(2);
        for i in 0..samples {
            let x = -2.5 + 5.0 * i as f64 / (samples - 1) as f64;
            let d = bump_exact(x);
            if x.abs() >= 2.0 {
                outside = outside.max(d.iter().map(|v| v.abs()).fold(0.0, f64::max));
                continue;
            }
            let br = (1.0 + x * x).sqrt();
            for (j, cj) in c.iter_mut().enumerate() {
                *cj = cj.max(d[j].abs() * br.powi(j as i32));
            }
        }
        (c, outside)
    }
}

#[inline]
fn scale(k: u32) -> f64 {
    (1u64 << k) as f64
}
