use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{LinearSymbol, Nonlinearity};
use crate::resonance::nonresonant_cubic_sums;
use crate::spectral::{dealias_factor, Spectrum};
use crate::{Error, FrequencyGrid, Result, SpectralField};

/// Size cap of the direct-enumeration path.
pub const DIRECT_MAX_MODES: usize = 64;

/// Evaluation strategy for the renormalized nonlinearity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RhsMode {
    /// Literal enumeration of all cubic and quintic interactions.
    DirectSum,
    /// Full products by transform, resonant parts removed by
    /// inclusion-exclusion.
    FftInclExcl,
}

impl fmt::Display for RhsMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::DirectSum => "direct_sum",
            Self::FftInclExcl => "fft_incl_excl",
        })
    }
}

impl FromStr for RhsMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct_sum" | "direct" => Ok(Self::DirectSum),
            "fft_incl_excl" | "fft" => Ok(Self::FftInclExcl),
            _ => Err(Error::InvalidParameter(format!("unknown rhs mode '{s}'"))),
        }
    }
}

/// Transform-side data shared by the transform path.
struct Products {
    u: Spectrum,
    u2: Spectrum,
    u3: Spectrum,
    u4_mean: f64,
    u5: Spectrum,
    a_full: Spectrum,
    b_full: Spectrum,
}

impl Products {
    fn of(v: &SpectralField) -> Result<Self> {
        let f = dealias_factor(5);
        let u = v.synthesize(f)?;
        let ux = v.physical_derivative(1, f)?;
        let uxx = v.physical_derivative(2, f)?;
        let map = |g: &dyn Fn(usize) -> f64| -> Vec<f64> { (0..u.len()).map(g).collect() };
        let u4 = map(&|j| u[j].powi(4));
        Ok(Self {
            u2: Spectrum::of_samples(&map(&|j| u[j] * u[j])),
            u3: Spectrum::of_samples(&map(&|j| u[j].powi(3))),
            u4_mean: u4.iter().sum::<f64>() / u4.len() as f64,
            u5: Spectrum::of_samples(&map(&|j| u[j].powi(5))),
            a_full: Spectrum::of_samples(&map(&|j| -u[j] * u[j] * uxx[j])),
            b_full: Spectrum::of_samples(&map(&|j| -u[j] * ux[j] * ux[j])),
            u: Spectrum::of_samples(&u),
        })
    }

    /// Resonant part of the full quintic sum at output index `m != 0`:
    /// tuples with some entry equal to `m`.
    fn quintic_resonant(&self, m: i64, k: i64) -> Complex64 {
        let c = self.u.get(m);
        let c3 = if (3 * m).abs() <= k { self.u.get(-3 * m) } else { Complex64::new(0.0, 0.0) };
        5.0 * c * self.u4_mean - 10.0 * c * c * self.u3.get(-m)
            + 10.0 * c * c * c * self.u2.get(-2 * m)
            - 5.0 * c.powi(4) * c3
    }
}

fn require_real(v: &SpectralField) -> Result<()> {
    if v.is_real() {
        Ok(())
    } else {
        Err(Error::NotReal)
    }
}

fn require_direct_size(grid: &FrequencyGrid) -> Result<()> {
    if grid.num_modes() > DIRECT_MAX_MODES {
        return Err(Error::SizeCap {
            cap: DIRECT_MAX_MODES,
            got: grid.num_modes(),
        });
    }
    Ok(())
}

/// The non-resonant quintic sum `sum_{N5} c(n1)...c(n5)` by transform and
/// inclusion-exclusion, as Fourier-series coefficients.
pub fn quintic_nonresonant_fft(v: &SpectralField) -> Result<Vec<Complex64>> {
    require_real(v)?;
    let p = Products::of(v)?;
    let k = v.grid().max_index();
    Ok((-k..=k)
        .map(|m| {
            if m == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                p.u5.get(m) - p.quintic_resonant(m, k)
            }
        })
        .collect())
}

/// The full quintic sum `sum c(n1)...c(n5)` by transform.
pub fn quintic_full(v: &SpectralField) -> Result<Vec<Complex64>> {
    require_real(v)?;
    let p = Products::of(v)?;
    let k = v.grid().max_index();
    Ok((-k..=k).map(|m| p.u5.get(m)).collect())
}

/// Direct enumeration of the quintic sum split into
/// `(non-resonant, resonant)` parts per output index, `O(M^5)`.
fn quintic_direct(c: &[Complex64], k: i64) -> Vec<(Complex64, Complex64)> {
    let at = |m: i64| c[(m + k) as usize];
    (-k..=k)
        .into_par_iter()
        .map(|m| {
            let mut non = Complex64::new(0.0, 0.0);
            let mut res = Complex64::new(0.0, 0.0);
            if m == 0 {
                return (non, res);
            }
            for m1 in -k..=k {
                for m2 in -k..=k {
                    let c12 = at(m1) * at(m2);
                    for m3 in -k..=k {
                        let c123 = c12 * at(m3);
                        let hit3 = m1 == m || m2 == m || m3 == m;
                        let rest = m - m1 - m2 - m3;
                        let lo = (-k).max(rest - k);
                        let hi = k.min(rest + k);
                        for m4 in lo..=hi {
                            let m5 = rest - m4;
                            let term = c123 * at(m4) * at(m5);
                            if hit3 || m4 == m || m5 == m {
                                res += term;
                            } else {
                                non += term;
                            }
                        }
                    }
                }
            }
            (non, res)
        })
        .collect()
}

/// `sum_{n1+n2+n3+n4=0} c(n1) c(n2) c(n3) c(n4)`, enumerated.
fn quartic_mean_direct(c: &[Complex64], k: i64) -> Complex64 {
    let at = |m: i64| c[(m + k) as usize];
    let mut acc = Complex64::new(0.0, 0.0);
    for m1 in -k..=k {
        for m2 in -k..=k {
            let c12 = at(m1) * at(m2);
            for m3 in -k..=k {
                let m4 = -m1 - m2 - m3;
                if m4.abs() <= k {
                    acc += c12 * at(m3) * at(m4);
                }
            }
        }
    }
    acc
}

/// The non-resonant quintic sum by literal enumeration of the set.
pub fn quintic_nonresonant_direct(v: &SpectralField) -> Result<Vec<Complex64>> {
    require_real(v)?;
    require_direct_size(v.grid())?;
    let k = v.grid().max_index();
    Ok(quintic_direct(&v.series(), k).into_iter().map(|(n, _)| n).collect())
}

/// Nonlinear part of the renormalized system, i.e. everything except
/// `i mu(n) v_hat(n)`, for output frequencies `n != 0`:
///
/// ```text
/// -20 i n^3 |c(n)|^2 c(n)
///   + 10 i n sum_{N3} c c n3^2 c + 10 i n sum_{N3} c n2 c n3 c
///   + 6 i n (sum_{N5} c c c c c + R5(n) - 5 c(n) <u^4>)
/// ```
///
/// where `R5(n)` is the sum over quintic tuples with an entry equal to `n`.
/// The last bracket equals the full quintic sum minus `5 c(n) <u^4>`; the
/// `<u^4>` part is carried by `c2` and the gauge.
pub fn renormalized_nonlinear(v: &SpectralField, mode: RhsMode) -> Result<SpectralField> {
    require_real(v)?;
    let grid = *v.grid();
    let k = grid.max_index();
    let c = v.series();
    let at = |m: i64| c[(m + k) as usize];
    let freq = |m: i64| grid.frequency(m);

    let (cubic_a, cubic_b, quintic): (Vec<Complex64>, Vec<Complex64>, Vec<Complex64>) = match mode
    {
        RhsMode::DirectSum => {
            require_direct_size(&grid)?;
            let (a, b) = nonresonant_cubic_sums(&c, k, &freq);
            let mean4 = quartic_mean_direct(&c, k);
            let q = quintic_direct(&c, k)
                .into_iter()
                .zip(-k..=k)
                .map(|((non, res), m)| non + res - 5.0 * at(m) * mean4)
                .collect();
            (a, b, q)
        }
        RhsMode::FftInclExcl => {
            let p = Products::of(v)?;
            let pp: f64 = c.iter().map(|z| z.norm_sqr()).sum();
            let qq: f64 = (-k..=k).map(|m| freq(m).powi(2) * at(m).norm_sqr()).sum();
            let mut a = Vec::with_capacity(c.len());
            let mut b = Vec::with_capacity(c.len());
            let mut q = Vec::with_capacity(c.len());
            for m in -k..=k {
                let n = freq(m);
                let cn = at(m);
                let diag = at(-m) * cn * cn;
                a.push(p.a_full.get(m) - (n * n * pp + 2.0 * qq) * cn + 3.0 * n * n * diag);
                b.push(p.b_full.get(m) + qq * cn - n * n * diag);
                let non = p.u5.get(m) - p.quintic_resonant(m, k);
                let n5res = p.quintic_resonant(m, k) - 5.0 * cn * p.u4_mean;
                q.push(non + n5res);
            }
            (a, b, q)
        }
    };

    let out: Vec<Complex64> = (-k..=k)
        .map(|m| {
            if m == 0 {
                return Complex64::new(0.0, 0.0);
            }
            let i = (m + k) as usize;
            let n = freq(m);
            let cn = at(m);
            let resonant = Complex64::new(0.0, -20.0 * n.powi(3)) * at(-m) * cn * cn;
            resonant
                + Complex64::new(0.0, 10.0 * n) * (cubic_a[i] + cubic_b[i])
                + Complex64::new(0.0, 6.0 * n) * quintic[i]
        })
        .collect();
    SpectralField::from_series(grid, out, true)
}

/// `i mu(n) v_hat(n)` plus [`renormalized_nonlinear`].
pub fn renormalized_rhs(
    v: &SpectralField,
    sym: &LinearSymbol,
    mode: RhsMode,
) -> Result<SpectralField> {
    let nl = renormalized_nonlinear(v, mode)?;
    let lin = v.map_with_frequency(|n, c| Complex64::new(0.0, sym.mu(n)) * c);
    Ok(&lin + &nl)
}

/// The renormalized nonlinearity as an evolution operator.
#[derive(Debug, Clone, Copy)]
pub struct RenormalizedNonlinearity {
    pub mode: RhsMode,
}

impl Nonlinearity for RenormalizedNonlinearity {
    fn eval(&self, u: &SpectralField) -> Result<SpectralField> {
        renormalized_nonlinear(u, self.mode)
    }
}
