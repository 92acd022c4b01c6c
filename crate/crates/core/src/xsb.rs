//! Discrete `X^{s,b}` norms on a time-frequency lattice and the two trilinear
//! counterexample families for the pure dispersion `mu(n) = n^5`.
//!
//! Every frequency row stores its modulation window relative to `n^5` on the
//! lattice `sigma = tau - n^5 = j h` with `h = 1 / CELLS_PER_UNIT`. Convolution
//! of rows `n1`, `n2` lands in row `n1 + n2` shifted by the resonance offset
//! `n1^5 + n2^5 - (n1 + n2)^5`, an integer number of units, so all support
//! bookkeeping is exact.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::spectral::bracket;
use crate::{Error, Result};

/// Modulation cells per unit of `tau`.
pub const CELLS_PER_UNIT: i64 = 64;

/// Cells of the `chi_{1/4}` bump.
pub const BUMP_CELLS: usize = (CELLS_PER_UNIT / 4) as usize;

#[derive(Debug, Clone, PartialEq)]
struct Row {
    start: i64,
    values: Vec<Complex64>,
}

impl Row {
    fn accumulate(&mut self, start: i64, values: &[Complex64]) {
        let end = (start + values.len() as i64).max(self.start + self.values.len() as i64);
        let new_start = start.min(self.start);
        if new_start < self.start || end > self.start + self.values.len() as i64 {
            let mut grown = vec![Complex64::new(0.0, 0.0); (end - new_start) as usize];
            let off = (self.start - new_start) as usize;
            grown[off..off + self.values.len()].copy_from_slice(&self.values);
            self.start = new_start;
            self.values = grown;
        }
        let off = (start - self.start) as usize;
        for (dst, v) in self.values[off..].iter_mut().zip(values) {
            *dst += v;
        }
    }
}

/// Space-time Fourier data `F(tau, n)` with per-frequency modulation windows.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TimeFreqField {
    rows: BTreeMap<i64, Row>,
}

fn fifth(n: i64) -> i128 {
    let n = n as i128;
    n * n * n * n * n
}

/// `n1^5 + n2^5 - (n1 + n2)^5` in cells.
fn offset_cells(n1: i64, n2: i64) -> Result<i64> {
    let d = fifth(n1) + fifth(n2) - fifth(n1 + n2);
    d.checked_mul(CELLS_PER_UNIT as i128)
        .and_then(|v| i64::try_from(v).ok())
        .ok_or_else(|| Error::Overflow(vec![n1, n2]))
}

impl TimeFreqField {
    pub fn new() -> Self {
        Self::default()
    }

    /// Modulation spacing `h`.
    pub fn spacing() -> f64 {
        1.0 / CELLS_PER_UNIT as f64
    }

    /// Adds `values` at frequency `n` on cells `start, start + 1, ...`.
    pub fn insert(&mut self, n: i64, start: i64, values: &[Complex64]) {
        match self.rows.get_mut(&n) {
            Some(row) => row.accumulate(start, values),
            None => {
                self.rows.insert(
                    n,
                    Row {
                        start,
                        values: values.to_vec(),
                    },
                );
            }
        }
    }

    /// `amplitude * chi(tau - n^5 - shift)` for the indicator of an interval of
    /// `cells` cells centred (to within half a cell) at the shift.
    pub fn bump(n: i64, amplitude: Complex64, cells: usize, shift_cells: i64) -> Self {
        let mut f = Self::new();
        let start = shift_cells - (cells as i64) / 2;
        f.insert(n, start, &vec![amplitude; cells]);
        f
    }

    /// Frequencies carrying data.
    pub fn frequencies(&self) -> Vec<i64> {
        self.rows.keys().copied().collect()
    }

    /// `(start cell, number of cells)` of the window at `n`.
    pub fn support(&self, n: i64) -> Option<(i64, usize)> {
        self.rows.get(&n).map(|r| (r.start, r.values.len()))
    }

    /// Centre of the window at `n` in half cells.
    pub fn center_half_cells(&self, n: i64) -> Option<i64> {
        self.rows
            .get(&n)
            .map(|r| 2 * r.start + r.values.len() as i64 - 1)
    }

    pub fn values(&self, n: i64) -> Option<&[Complex64]> {
        self.rows.get(&n).map(|r| r.values.as_slice())
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        for row in out.rows.values_mut() {
            for v in &mut row.values {
                *v *= c;
            }
        }
        out
    }

    /// Multiplies row `n` by `(i n)^3`, the symbol of `d^3/dx^3`.
    pub fn third_derivative(&self) -> Self {
        let mut out = self.clone();
        for (&n, row) in out.rows.iter_mut() {
            let w = Complex64::new(0.0, -((n as f64).powi(3)));
            for v in &mut row.values {
                *v *= w;
            }
        }
        out
    }

    /// `(F * G)(tau, n) = sum_{n1} int F(tau1, n1) G(tau - tau1, n - n1) dtau1`.
    pub fn convolve(&self, other: &Self) -> Result<Self> {
        let h = Self::spacing();
        let mut out = Self::new();
        for (&n1, a) in &self.rows {
            for (&n2, b) in &other.rows {
                let shift = offset_cells(n1, n2)?;
                let mut vals = vec![Complex64::new(0.0, 0.0); a.values.len() + b.values.len() - 1];
                for (i, x) in a.values.iter().enumerate() {
                    for (l, y) in b.values.iter().enumerate() {
                        vals[i + l] += x * y * h;
                    }
                }
                out.insert(n1 + n2, a.start + b.start + shift, &vals);
            }
        }
        Ok(out)
    }

    /// `||<tau - n^5>^b <n>^s F||_{L^2_tau l^2_n}` with the cell quadrature.
    pub fn xsb_norm(&self, s: f64, b: f64) -> f64 {
        let h = Self::spacing();
        let sum: f64 = self
            .rows
            .iter()
            .map(|(&n, row)| {
                let wn = bracket(n as f64).powf(2.0 * s);
                row.values
                    .iter()
                    .enumerate()
                    .map(|(j, v)| {
                        let sigma = (row.start + j as i64) as f64 * h;
                        bracket(sigma).powf(2.0 * b) * v.norm_sqr()
                    })
                    .sum::<f64>()
                    * wn
            })
            .sum();
        (sum * h).sqrt()
    }
}

/// `F[u v w_xxx] = f * g * (i n)^3 h`.
pub fn convolve3(f: &TimeFreqField, g: &TimeFreqField, h: &TimeFreqField) -> Result<TimeFreqField> {
    f.convolve(g)?.convolve(&h.third_derivative())
}

/// The two counterexample families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// Inputs at `-1, 2, N - 1`; the output lands at `N` (for `b > 1/4`).
    Primary,
    /// Inputs at `-N, 2, N - 1`; the output lands at `1` (for `b <= 1/4`),
    /// measured through the dual inequality.
    Dual,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Primary => "1",
            Variant::Dual => "2",
        })
    }
}

impl FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "1" | "primary" => Ok(Variant::Primary),
            "2" | "dual" => Ok(Variant::Dual),
            other => Err(Error::InvalidParameter(format!("unknown variant {other:?}"))),
        }
    }
}

impl Variant {
    /// Frequencies of `f`, `g`, `h`.
    pub fn frequencies(self, n: i64) -> [i64; 3] {
        match self {
            Variant::Primary => [-1, 2, n - 1],
            Variant::Dual => [-n, 2, n - 1],
        }
    }

    /// Predicted growth exponent of the ratio.
    pub fn exponent(self, b: f64) -> f64 {
        match self {
            Variant::Primary => 3.0 + 4.0 * (b - 1.0),
            Variant::Dual => 3.0 - 4.0 * b,
        }
    }
}

/// Inputs `(f, g, h)` of a family at high frequency `n`.
#[derive(Debug, Clone)]
pub struct CounterexampleFamily {
    pub variant: Variant,
    pub n: i64,
    pub f: TimeFreqField,
    pub g: TimeFreqField,
    pub h: TimeFreqField,
}

impl CounterexampleFamily {
    pub fn new(variant: Variant, n: i64) -> Result<Self> {
        if n < 8 {
            return Err(Error::InvalidParameter(format!("N must be at least 8, got {n}")));
        }
        let one = Complex64::new(1.0, 0.0);
        let [a, b, d] = variant.frequencies(n);
        Ok(Self {
            variant,
            n,
            f: TimeFreqField::bump(a, one, BUMP_CELLS, 0),
            g: TimeFreqField::bump(b, one, BUMP_CELLS, 0),
            h: TimeFreqField::bump(d, one, BUMP_CELLS, 0),
        })
    }

    pub fn product(&self) -> Result<TimeFreqField> {
        convolve3(&self.f, &self.g, &self.h)
    }

    /// `(numerator, denominator)` of the trilinear ratio.
    pub fn parts(&self, s: f64, b: f64) -> Result<(f64, f64)> {
        let p = self.product()?;
        Ok(match self.variant {
            Variant::Primary => (
                p.xsb_norm(s, b - 1.0),
                self.f.xsb_norm(s, b) * self.g.xsb_norm(s, b) * self.h.xsb_norm(s, b),
            ),
            Variant::Dual => (
                p.xsb_norm(-s, -b),
                self.f.xsb_norm(-s, 1.0 - b) * self.g.xsb_norm(s, b) * self.h.xsb_norm(s, b),
            ),
        })
    }
}

/// `||u v w_xxx|| / (||u|| ||v|| ||w||)` in the norms of the chosen variant.
pub fn ratio(n: i64, s: f64, b: f64, variant: Variant) -> Result<f64> {
    let (num, den) = CounterexampleFamily::new(variant, n)?.parts(s, b)?;
    Ok(num / den)
}

/// One line of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioRow {
    pub n: i64,
    pub numerator: f64,
    pub denominator: f64,
    pub ratio: f64,
}

pub fn ratio_sweep(ns: &[i64], s: f64, b: f64, variant: Variant) -> Result<Vec<RatioRow>> {
    ns.par_iter()
        .map(|&n| {
            let (numerator, denominator) = CounterexampleFamily::new(variant, n)?.parts(s, b)?;
            Ok(RatioRow {
                n,
                numerator,
                denominator,
                ratio: numerator / denominator,
            })
        })
        .collect()
}

/// Ordinary least squares `y = slope x + c`; returns `(slope, r^2)`, or `None`
/// with fewer than two points or constant `x`. `r^2` is 1 for an exact fit.
pub fn least_squares(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let ss_res: f64 = points
        .iter()
        .map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2))
        .sum();
    let r2 = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    Some((slope, r2))
}

/// Log-log slope of `ratios` against `ns` with its `r^2`.
pub fn fit_exponent(ns: &[f64], ratios: &[f64]) -> Result<(f64, f64)> {
    if ns.len() != ratios.len() {
        return Err(Error::LengthMismatch {
            expected: ns.len(),
            got: ratios.len(),
        });
    }
    if ns.len() < 4 {
        return Err(Error::InvalidParameter(format!(
            "need at least 4 points, got {}",
            ns.len()
        )));
    }
    if let Some(bad) = ns.iter().chain(ratios).find(|v| !(**v > 0.0)) {
        return Err(Error::InvalidParameter(format!("nonpositive value {bad} in fit")));
    }
    let pts: Vec<(f64, f64)> = ns.iter().zip(ratios).map(|(n, r)| (n.ln(), r.ln())).collect();
    least_squares(&pts).ok_or_else(|| Error::Degenerate("all N equal".into()))
}
