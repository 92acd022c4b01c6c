use crate::dynamics::{EquationCoefficients, LinearSymbol, RhsMode};
use crate::{Error, FrequencyGrid, Result, SpectralField};

/// Which evolution produced a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Flow {
    /// `u_t = u_xxxxx + N(u)` with the stored coefficients; dispersion `n^5`.
    Physical(EquationCoefficients),
    /// The renormalized system with dispersion `mu(n)` from the stored symbol.
    Renormalized(RhsMode),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub time: f64,
    /// `Phi(t) = (2 pi)^-1 int_0^t ||u||_{L^4}^4 ds`, if known.
    pub phase: Option<f64>,
    pub field: SpectralField,
}

/// Monitors recorded with every snapshot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonitorRecord {
    pub time: f64,
    pub gamma1_drift: f64,
    pub gamma2_drift: f64,
    pub ham3_drift: f64,
    pub hs_norm: f64,
    pub phase: f64,
}

/// Time-ordered snapshots of one evolution with its scheme metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    grid: FrequencyGrid,
    coeffs: EquationCoefficients,
    symbol: LinearSymbol,
    flow: Flow,
    dt: f64,
    gauged: bool,
    snapshots: Vec<Snapshot>,
    monitors: Vec<MonitorRecord>,
}

impl Trajectory {
    pub fn new(
        grid: FrequencyGrid,
        coeffs: EquationCoefficients,
        symbol: LinearSymbol,
        flow: Flow,
        dt: f64,
    ) -> Self {
        Self {
            grid,
            coeffs,
            symbol,
            flow,
            dt,
            gauged: false,
            snapshots: Vec::new(),
            monitors: Vec::new(),
        }
    }

    /// Appends a snapshot; times must increase strictly and fields must be
    /// real and live on the trajectory grid.
    pub fn push(&mut self, snapshot: Snapshot) -> Result<()> {
        if !snapshot.field.grid().same_as(&self.grid) {
            return Err(Error::GridMismatch(format!(
                "snapshot grid {:?} differs from trajectory grid {:?}",
                snapshot.field.grid(),
                self.grid
            )));
        }
        if !snapshot.field.is_real() {
            return Err(Error::NotReal);
        }
        if let Some(last) = self.snapshots.last() {
            if snapshot.time <= last.time {
                return Err(Error::InvalidParameter(format!(
                    "snapshot time {} does not follow {}",
                    snapshot.time, last.time
                )));
            }
        }
        self.snapshots.push(snapshot);
        Ok(())
    }

    pub(crate) fn push_monitor(&mut self, record: MonitorRecord) {
        self.monitors.push(record);
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn coeffs(&self) -> &EquationCoefficients {
        &self.coeffs
    }

    pub fn symbol(&self) -> &LinearSymbol {
        &self.symbol
    }

    pub fn flow(&self) -> Flow {
        self.flow
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn is_gauged(&self) -> bool {
        self.gauged
    }

    pub(crate) fn set_gauged(&mut self, gauged: bool) {
        self.gauged = gauged;
    }

    pub fn snapshots(&self) -> &[Snapshot] {
        &self.snapshots
    }

    pub(crate) fn snapshots_mut(&mut self) -> &mut [Snapshot] {
        &mut self.snapshots
    }

    pub fn monitors(&self) -> &[MonitorRecord] {
        &self.monitors
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    pub fn first(&self) -> Option<&Snapshot> {
        self.snapshots.first()
    }

    pub fn last(&self) -> Option<&Snapshot> {
        self.snapshots.last()
    }

    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.time).collect()
    }

    /// `sup_t ||self(t) - other(t)||_{H^s}` over matching snapshots.
    pub fn sup_distance(&self, other: &Self, s: f64) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                got: other.len(),
            });
        }
        let mut d = 0.0f64;
        for (a, b) in self.snapshots.iter().zip(&other.snapshots) {
            if !a.field.grid().same_as(b.field.grid()) {
                return Err(Error::GridMismatch("trajectories use different grids".into()));
            }
            d = d.max(a.field.sobolev_distance(&b.field, s));
        }
        Ok(d)
    }
}
