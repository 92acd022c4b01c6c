//! Exact resonance arithmetic for cubic and quintic frequency interactions.
//!
//! The cubic resonance function is
//! `H(n1, n2, n3) = (n1 + n2 + n3)^5 - n1^5 - n2^5 - n3^5`, which factors as
//! `H = (5/2)(n1 + n2)(n1 + n3)(n2 + n3)(n1^2 + n2^2 + n3^2 + n^2)`.
//! A triple is resonant exactly when one of the pair sums vanishes. All set
//! membership is decided in integer arithmetic on lattice indices.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::spectral::CutoffFamily;
use crate::{Error, Result, SpectralField};

/// Largest admissible `|n_i|`.
pub const FREQ_CAP: i64 = 1 << 12;
/// Largest admissible `|n1 + n2 + n3|`.
pub const SUM_CAP: i64 = 6000;
/// Size cap of [`split_cubic`].
pub const SPLIT_MAX_MODES: usize = 128;
/// Size cap of [`quintic_resonant_sum`].
pub const QUINTIC_MAX_MODES: usize = 64;

fn check_caps(ns: &[i64]) -> Result<i64> {
    for &n in ns {
        if n.abs() > FREQ_CAP {
            return Err(Error::OutOfRange {
                value: n,
                cap: FREQ_CAP,
            });
        }
    }
    let sum: i64 = ns.iter().sum();
    if sum.abs() > SUM_CAP {
        return Err(Error::OutOfRange {
            value: sum,
            cap: SUM_CAP,
        });
    }
    Ok(sum)
}

fn pow5(x: i128) -> i128 {
    let x2 = x * x;
    x2 * x2 * x
}

/// `H(n1, n2, n3)` evaluated exactly.
pub fn resonance_cubic(n1: i64, n2: i64, n3: i64) -> Result<i64> {
    let n = check_caps(&[n1, n2, n3])?;
    let h = pow5(n as i128) - pow5(n1 as i128) - pow5(n2 as i128) - pow5(n3 as i128);
    i64::try_from(h).map_err(|_| Error::Overflow(vec![n1, n2, n3]))
}

/// `(n1 + n2)(n1 + n3)(n2 + n3)`
pub fn pair_product(n1: i64, n2: i64, n3: i64) -> i128 {
    (n1 as i128 + n2 as i128) * (n1 as i128 + n3 as i128) * (n2 as i128 + n3 as i128)
}

/// Checks `2H = 5 (n1 + n2)(n1 + n3)(n2 + n3)(n1^2 + n2^2 + n3^2 + n^2)` exactly.
pub fn verify_factorization(n1: i64, n2: i64, n3: i64) -> Result<bool> {
    let h = resonance_cubic(n1, n2, n3)? as i128;
    let n = (n1 + n2 + n3) as i128;
    let (a, b, c) = (n1 as i128, n2 as i128, n3 as i128);
    let rhs = 5 * pair_product(n1, n2, n3) * (a * a + b * b + c * c + n * n);
    Ok(2 * h == rhs)
}

/// Whether `triple` lies in the non-resonant cubic set for output `n`.
pub fn is_nonresonant3(triple: [i64; 3], n: i64) -> Result<bool> {
    let sum: i64 = triple.iter().sum();
    if sum != n {
        return Err(Error::SumMismatch { expected: n, got: sum });
    }
    Ok(pair_product(triple[0], triple[1], triple[2]) != 0)
}

/// Whether `quintuple` lies in the non-resonant quintic set for output `n`:
/// every sum of four of its entries is nonzero, i.e. no entry equals `n`.
pub fn is_nonresonant5(quintuple: [i64; 5], n: i64) -> Result<bool> {
    let sum: i64 = quintuple.iter().sum();
    if sum != n {
        return Err(Error::SumMismatch { expected: n, got: sum });
    }
    Ok(quintuple.iter().all(|&ni| sum - ni != 0))
}

#[inline]
pub(crate) fn nonresonant3(m1: i64, m2: i64, m3: i64) -> bool {
    m1 + m2 != 0 && m1 + m3 != 0 && m2 + m3 != 0
}

/// One row of a resonance audit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AuditRow {
    pub n: [i64; 3],
    pub h: i64,
    /// `(5/2)(n1 + n2)(n1 + n3)(n2 + n3)(n1^2 + n2^2 + n3^2 + n^2)`, exact.
    pub factored: i64,
    pub matches: bool,
}

/// Evaluates `H` and its factored form for one triple.
pub fn audit_triple(n1: i64, n2: i64, n3: i64) -> Result<AuditRow> {
    let h = resonance_cubic(n1, n2, n3)?;
    let n = (n1 + n2 + n3) as i128;
    let (a, b, c) = (n1 as i128, n2 as i128, n3 as i128);
    let twice = 5 * pair_product(n1, n2, n3) * (a * a + b * b + c * c + n * n);
    // the pair product is always even, so halving is exact when the identity holds
    let factored =
        i64::try_from(twice / 2).map_err(|_| Error::Overflow(vec![n1, n2, n3]))?;
    Ok(AuditRow {
        n: [n1, n2, n3],
        h,
        factored,
        matches: 2 * h as i128 == twice,
    })
}

/// Exhaustive check over `|n_i| <= max`; returns `(triples checked, failures)`.
pub fn exhaustive_factorization(max: i64) -> Result<(u64, u64)> {
    let rows: Result<Vec<(u64, u64)>> = (-max..=max)
        .into_par_iter()
        .map(|n1| {
            let mut checked = 0u64;
            let mut failed = 0u64;
            for n2 in -max..=max {
                for n3 in -max..=max {
                    checked += 1;
                    if !verify_factorization(n1, n2, n3)? {
                        failed += 1;
                    }
                }
            }
            Ok((checked, failed))
        })
        .collect();
    Ok(rows?
        .into_iter()
        .fold((0, 0), |(a, b), (c, d)| (a + c, b + d)))
}

/// The cubic nonlinearity of the Fourier-side system split by resonance.
///
/// Each part is a time derivative of the field's coefficients in the field's
/// own normalization, for output frequencies `n != 0`:
///
/// * `resonant`: the diagonal `-20 i n^3 |c(n)|^2 c(n)`;
/// * `nonresonant_a`: `10 i n sum_{N3} c(n1) c(n2) n3^2 c(n3)`;
/// * `nonresonant_b`: `10 i n sum_{N3} c(n1) n2 c(n2) n3 c(n3)`;
/// * `linear_like`: `10 i n (n^2 P + Q) c(n)` with `P = sum c(m) c(-m)` and
///   `Q = sum m^2 c(m) c(-m)`, the part absorbed into the dispersion.
///
/// Here `c` are Fourier-series coefficients. The four parts add up to the full
/// transform of `-10 d/dx (u^2 u_xx) - 10 d/dx (u u_x^2)` for real `u`.
#[derive(Debug, Clone)]
pub struct CubicSplit {
    pub resonant: SpectralField,
    pub nonresonant_a: SpectralField,
    pub nonresonant_b: SpectralField,
    pub linear_like: SpectralField,
}

impl CubicSplit {
    pub fn total(&self) -> SpectralField {
        let mut t = &self.resonant + &self.nonresonant_a;
        t = &t + &self.nonresonant_b;
        &t + &self.linear_like
    }
}

/// Direct enumeration of the non-resonant cubic sums, `O(M^3)`.
pub fn split_cubic(v: &SpectralField) -> Result<CubicSplit> {
    let grid = *v.grid();
    if grid.num_modes() > SPLIT_MAX_MODES {
        return Err(Error::SizeCap {
            cap: SPLIT_MAX_MODES,
            got: grid.num_modes(),
        });
    }
    let c = v.series();
    let k = grid.max_index();
    let freq = |m: i64| grid.frequency(m);
    let at = |m: i64| c[(m + k) as usize];

    let (sum_a, sum_b) = nonresonant_cubic_sums(&c, k, &freq);

    let p: Complex64 = (-k..=k).map(|m| at(m) * at(-m)).sum();
    let q: Complex64 = (-k..=k).map(|m| freq(m).powi(2) * at(m) * at(-m)).sum();

    let len = c.len();
    let mut res = vec![Complex64::new(0.0, 0.0); len];
    let mut a = vec![Complex64::new(0.0, 0.0); len];
    let mut b = vec![Complex64::new(0.0, 0.0); len];
    let mut lin = vec![Complex64::new(0.0, 0.0); len];
    for m in -k..=k {
        if m == 0 {
            continue;
        }
        let i = (m + k) as usize;
        let n = freq(m);
        let cn = at(m);
        let pref = Complex64::new(0.0, 10.0 * n);
        res[i] = Complex64::new(0.0, -20.0 * n.powi(3)) * at(-m) * cn * cn;
        a[i] = pref * sum_a[i];
        b[i] = pref * sum_b[i];
        lin[i] = pref * (n * n * p + q) * cn;
    }
    let real = v.is_real();
    let make = |s: Vec<Complex64>| SpectralField::from_series(grid, s, real);
    Ok(CubicSplit {
        resonant: make(res)?,
        nonresonant_a: make(a)?,
        nonresonant_b: make(b)?,
        linear_like: make(lin)?,
    })
}

/// `(sum_{N3} c c n3^2 c, sum_{N3} c n2 c n3 c)` per output index.
pub(crate) fn nonresonant_cubic_sums(
    c: &[Complex64],
    k: i64,
    freq: &(impl Fn(i64) -> f64 + Sync),
) -> (Vec<Complex64>, Vec<Complex64>) {
    let at = |m: i64| c[(m + k) as usize];
    (-k..=k)
        .into_par_iter()
        .map(|m| {
            let mut sa = Complex64::new(0.0, 0.0);
            let mut sb = Complex64::new(0.0, 0.0);
            if m == 0 {
                return (sa, sb);
            }
            for m1 in -k..=k {
                let c1 = at(m1);
                let lo = (-k).max(m - m1 - k);
                let hi = k.min(m - m1 + k);
                for m2 in lo..=hi {
                    let m3 = m - m1 - m2;
                    if !nonresonant3(m1, m2, m3) {
                        continue;
                    }
                    let c12 = c1 * at(m2);
                    let c3 = at(m3);
                    let n3 = freq(m3);
                    sa += c12 * c3 * (n3 * n3);
                    sb += c12 * c3 * (freq(m2) * n3);
                }
            }
            (sa, sb)
        })
        .unzip()
}

/// Result of [`quintic_resonant_sum`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuinticResonance {
    pub value: Complex64,
    /// Sum of the absolute values of all enumerated terms.
    pub scale: f64,
}

impl QuinticResonance {
    /// `|Im S| / scale`, zero for an empty sum.
    pub fn relative_imaginary(&self) -> f64 {
        if self.scale == 0.0 {
            0.0
        } else {
            self.value.im.abs() / self.scale
        }
    }
}

/// `S = sum_n chi_k(n) n |v(n)|^2 sum_{n1+n2+n31+n32=0} v(n1) v(n2) psi_k(n - n31 - n32) v(n31) v(n32)`,
/// enumerated directly. For real `v` the sum is real.
pub fn quintic_resonant_sum(
    v: &SpectralField,
    k: u32,
    cutoffs: &CutoffFamily,
) -> Result<QuinticResonance> {
    let grid = *v.grid();
    if grid.num_modes() > QUINTIC_MAX_MODES {
        return Err(Error::SizeCap {
            cap: QUINTIC_MAX_MODES,
            got: grid.num_modes(),
        });
    }
    let kk = grid.max_index();
    let at = |m: i64| v.coeff(m);
    let outer: Vec<(i64, f64)> = (-kk..=kk)
        .filter_map(|m| {
            let n = grid.frequency(m);
            let w = cutoffs.chi(k, n) * n * at(m).norm_sqr();
            (w != 0.0).then_some((m, w))
        })
        .collect();

    let (value, scale) = outer
        .par_iter()
        .map(|&(m, w)| {
            let n = grid.frequency(m);
            let mut acc = Complex64::new(0.0, 0.0);
            let mut abs = 0.0;
            for m31 in -kk..=kk {
                for m32 in -kk..=kk {
                    let psi = cutoffs.psi(k, n - grid.frequency(m31 + m32));
                    if psi == 0.0 {
                        continue;
                    }
                    let c3 = at(m31) * at(m32);
                    let s = -(m31 + m32);
                    let lo = (-kk).max(s - kk);
                    let hi = kk.min(s + kk);
                    for m1 in lo..=hi {
                        let term = at(m1) * at(s - m1) * c3 * (psi * w);
                        acc += term;
                        abs += term.norm();
                    }
                }
            }
            (acc, abs)
        })
        .reduce(
            || (Complex64::new(0.0, 0.0), 0.0),
            |(a, b), (c, d)| (a + c, b + d),
        );
    Ok(QuinticResonance { value, scale })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_field, seeded};
    use crate::FrequencyGrid;

    #[test]
    fn hand_values() {
        assert_eq!(resonance_cubic(1, -1, 5).unwrap(), 0);
        assert_eq!(resonance_cubic(1, 2, 3).unwrap(), 7500);
        assert_eq!(resonance_cubic(0, 0, 0).unwrap(), 0);
        assert!(verify_factorization(1, 2, 3).unwrap());
        assert!(verify_factorization(7, -7, 11).unwrap());
    }

    #[test]
    fn caps_are_reported() {
        assert!(matches!(
            resonance_cubic(5000, 0, 0),
            Err(Error::OutOfRange { value: 5000, .. })
        ));
        assert!(matches!(
            resonance_cubic(4000, 4000, 0),
            Err(Error::OutOfRange { value: 8000, .. })
        ));
        // largest admissible values still fit
        assert!(resonance_cubic(4096, 1904, -4096).is_ok());
    }

    #[test]
    fn membership() {
        assert!(is_nonresonant3([1, 2, 3], 6).unwrap());
        assert!(!is_nonresonant3([1, -1, 5], 5).unwrap());
        assert!(!is_nonresonant5([1, -1, 2, -2, 3], 3).unwrap());
        assert!(is_nonresonant5([1, 1, 1, 1, 1], 5).unwrap());
        assert!(matches!(
            is_nonresonant3([1, 2, 3], 5),
            Err(Error::SumMismatch { expected: 5, got: 6 })
        ));
    }

    #[test]
    fn membership_agrees_with_resonance_zero() {
        for n1 in -12..=12 {
            for n2 in -12..=12 {
                for n3 in -12..=12 {
                    let h = resonance_cubic(n1, n2, n3).unwrap();
                    let non = is_nonresonant3([n1, n2, n3], n1 + n2 + n3).unwrap();
                    assert_eq!(non, h != 0, "{n1} {n2} {n3}");
                }
            }
        }
    }

    #[test]
    fn audit_row_for_small_triple() {
        let row = audit_triple(1, 2, 3).unwrap();
        assert_eq!(row.h, 7500);
        assert_eq!(row.factored, 7500);
        assert!(row.matches);
    }

    #[test]
    fn two_mode_field_feeds_only_the_third_harmonic() {
        // (3, 3, 3) -> 9 is the only non-resonant interaction of cos 3x
        let g = FrequencyGrid::unit(32).unwrap();
        let v = SpectralField::cosine(g, 0.4, 3);
        let split = split_cubic(&v).unwrap();
        for m in g.indices() {
            let a = split.nonresonant_a.coeff(m).norm();
            let b = split.nonresonant_b.coeff(m).norm();
            if m.abs() == 9 {
                assert!(a > 0.0 && b > 0.0);
            } else {
                assert_eq!((a, b), (0.0, 0.0), "m = {m}");
            }
        }
        assert!(split.resonant.coeff(3).norm() > 0.0);
        assert_eq!(split.resonant.coeff(9).norm(), 0.0);
    }

    #[test]
    fn split_size_cap() {
        let g = FrequencyGrid::unit(256).unwrap();
        assert!(matches!(
            split_cubic(&SpectralField::zeros(g)),
            Err(Error::SizeCap { cap: 128, got: 256 })
        ));
    }

    #[test]
    fn quintic_sum_of_zero() {
        let g = FrequencyGrid::unit(16).unwrap();
        let s = quintic_resonant_sum(&SpectralField::zeros(g), 1, &CutoffFamily::new()).unwrap();
        assert_eq!(s.value, Complex64::new(0.0, 0.0));
        assert_eq!(s.relative_imaginary(), 0.0);
    }

    #[test]
    fn quintic_sum_is_real() {
        let g = FrequencyGrid::unit(16).unwrap();
        let cut = CutoffFamily::new();
        let mut rng = seeded(3);
        for _ in 0..5 {
            let v = random_field(&mut rng, g, 7, 0.5, 1.0);
            for k in 1..=3 {
                let s = quintic_resonant_sum(&v, k, &cut).unwrap();
                assert!(s.scale > 0.0);
                assert!(s.relative_imaginary() < 1e-13);
            }
        }
    }
}
