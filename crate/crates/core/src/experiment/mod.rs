//! The path-marking experiment: source states, idler measurements,
//! coincidence tables and the derived duality quantities.

mod duality;
mod ensemble;
mod measurement;
mod source;
mod table;

use std::f64::consts::{FRAC_PI_4, FRAC_PI_8};
use std::fmt;

use crate::error::{Error, Result};

pub use duality::{
    duality_report, guess_probability, inconclusive_probability, scan_visibility, visibility_of,
    DualityReport,
};
pub use ensemble::{
    blend, conditional_signal_states, detector_probabilities, mzi_transform, signal_rho,
    signal_rho_by_trace, subensembles_mem, subensembles_usd, DensityMatrix2, Subensemble,
    NEGLIGIBLE_WEIGHT,
};
pub use measurement::{
    erasure_measurement, measurement_for, mem_measurement, usd_angle, usd_measurement, Effect,
    IdlerLabel, IdlerMeasurement, MeasurementKind, UsdConfig,
};
pub use source::{idler_states, joint_state, joint_state_by_propagation, source_state};
pub use table::{
    coincidence_table_analytic, coincidence_table_analytic_for, coincidence_table_circuit,
    coincidence_table_circuit_with, CoincidenceTable,
};

/// Slack allowed on the closed φ intervals so that degree inputs such as
/// 22.5° survive the conversion to radians.
const PHI_SLACK: f64 = 1e-12;

/// Pump half-wave-plate angle φ, in radians, within `[0, π/4]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct SourceParam(f64);

impl SourceParam {
    pub const MIN: f64 = 0.0;
    pub const MAX: f64 = FRAC_PI_4;
    /// Lower end of the range where the three-outcome discrimination exists.
    pub const USD_MIN: f64 = FRAC_PI_8;

    pub fn new(phi: f64) -> Result<Self> {
        if !phi.is_finite() {
            return Err(Error::NonFinite("source parameter φ"));
        }
        if !(Self::MIN - PHI_SLACK..=Self::MAX + PHI_SLACK).contains(&phi) {
            return Err(domain_error(phi, Self::MIN, Self::MAX));
        }
        Ok(SourceParam(phi.clamp(Self::MIN, Self::MAX)))
    }

    pub fn from_degrees(deg: f64) -> Result<Self> {
        Self::new(deg.to_radians())
    }

    /// Like [`SourceParam::new`], restricted to `[π/8, π/4]`.
    pub fn new_usd(phi: f64) -> Result<Self> {
        let p = Self::new(phi)?;
        p.require_usd()?;
        Ok(p)
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    pub fn degrees(self) -> f64 {
        self.0.to_degrees()
    }

    pub fn in_usd_range(self) -> bool {
        self.0 >= Self::USD_MIN - PHI_SLACK
    }

    pub fn require_usd(self) -> Result<()> {
        if self.in_usd_range() {
            Ok(())
        } else {
            Err(domain_error(self.0, Self::USD_MIN, Self::MAX))
        }
    }

    pub(crate) fn sin2(self) -> f64 {
        (2.0 * self.0).sin()
    }

    pub(crate) fn cos2(self) -> f64 {
        (2.0 * self.0).cos()
    }

    pub(crate) fn sin4(self) -> f64 {
        (4.0 * self.0).sin()
    }

    pub(crate) fn cos4(self) -> f64 {
        (4.0 * self.0).cos()
    }
}

fn domain_error(phi: f64, lo: f64, hi: f64) -> Error {
    Error::Domain {
        quantity: "phi",
        value_deg: phi.to_degrees(),
        min_deg: lo.to_degrees(),
        max_deg: hi.to_degrees(),
    }
}

/// Whether the output beam splitter of the interferometer is in place.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Beam splitter removed; the signal detectors reveal the path.
    Particle,
    /// Beam splitter in place; the signal detectors see fringes in α.
    Wave,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Particle => "particle",
            Mode::Wave => "wave",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SignalDetector {
    D1,
    D2,
}

impl SignalDetector {
    pub const ALL: [SignalDetector; 2] = [SignalDetector::D1, SignalDetector::D2];

    pub fn index(self) -> usize {
        match self {
            SignalDetector::D1 => 0,
            SignalDetector::D2 => 1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SignalDetector::D1 => "D1",
            SignalDetector::D2 => "D2",
        }
    }
}

impl fmt::Display for SignalDetector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}
