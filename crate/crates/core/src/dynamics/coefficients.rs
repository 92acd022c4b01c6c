use std::fmt;
use std::str::FromStr;

use crate::Error;

/// Coefficients `(a1, a2, a3, a4)` of
/// `u_t - u_xxxxx + a1 u u_x u_xx + a2 u^2 u_xxx + a3 u_x^3 - a4 u^4 u_x = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquationCoefficients {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
}

impl EquationCoefficients {
    pub const INTEGRABLE: Self = Self {
        a1: 40.0,
        a2: 10.0,
        a3: 10.0,
        a4: 30.0,
    };

    pub const LINEAR: Self = Self {
        a1: 0.0,
        a2: 0.0,
        a3: 0.0,
        a4: 0.0,
    };

    pub fn new(a1: f64, a2: f64, a3: f64, a4: f64) -> Self {
        Self { a1, a2, a3, a4 }
    }

    /// `int u (a1 u u_x u_xx + a2 u^2 u_xxx + a3 u_x^3) dx = (3 a2 + a3 - a1) int u u_x^3 dx`,
    /// so the `L^2` mass is conserved for every datum iff this vanishes.
    pub fn mass_defect(&self) -> f64 {
        3.0 * self.a2 + self.a3 - self.a1
    }

    /// Whether the cubic terms conserve `int u^2` identically.
    pub fn mass_condition(&self) -> bool {
        let scale = self.a1.abs().max(self.a2.abs()).max(self.a3.abs()).max(1.0);
        self.mass_defect().abs() <= 1e-12 * scale
    }

    pub fn is_linear(&self) -> bool {
        *self == Self::LINEAR
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.a1, self.a2, self.a3, self.a4]
    }
}

impl Default for EquationCoefficients {
    fn default() -> Self {
        Self::INTEGRABLE
    }
}

impl fmt::Display for EquationCoefficients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.a1, self.a2, self.a3, self.a4)
    }
}

/// Parses `integrable`, `linear` or `a1,a2,a3,a4`.
impl FromStr for EquationCoefficients {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim() {
            "integrable" => return Ok(Self::INTEGRABLE),
            "linear" => return Ok(Self::LINEAR),
            _ => {}
        }
        let parts: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| Error::InvalidParameter(format!("coefficients '{s}': {e}")))?;
        match parts.as_slice() {
            [a1, a2, a3, a4] if parts.iter().all(|x| x.is_finite()) => {
                Ok(Self::new(*a1, *a2, *a3, *a4))
            }
            _ => Err(Error::InvalidParameter(format!(
                "expected 'integrable' or four comma-separated numbers, got '{s}'"
            ))),
        }
    }
}
