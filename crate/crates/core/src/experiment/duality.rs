use std::f64::consts::TAU;

use super::measurement::{IdlerLabel, IdlerMeasurement};
use super::table::{coincidence_table_circuit_with, CoincidenceTable};
use super::{Mode, SignalDetector, SourceParam};
use crate::elements::{MziPhase, SignalOptics};
use crate::error::{Error, Result};

/// Which-path and interference figures for one source setting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualityReport {
    /// Fringe visibility `V = |cos 4φ|`.
    pub visibility: f64,
    /// Path distinguishability `D = |sin 4φ|`.
    pub distinguishability: f64,
    /// Path knowledge from unambiguous discrimination, `K = 2cos²2φ`;
    /// absent outside the discrimination range.
    pub knowledge: Option<f64>,
    pub guess_prob_usd: Option<f64>,
    pub guess_prob_mem: f64,
}

impl DualityReport {
    /// `D² + V²`, which the pure source saturates at 1.
    pub fn duality_sum(&self) -> f64 {
        self.distinguishability.powi(2) + self.visibility.powi(2)
    }
}

pub fn duality_report(phi: SourceParam) -> DualityReport {
    let visibility = phi.cos4().abs();
    let distinguishability = phi.sin4().abs();
    let knowledge = phi.in_usd_range().then(|| 2.0 * phi.cos2().powi(2));
    DualityReport {
        visibility,
        distinguishability,
        knowledge,
        guess_prob_usd: knowledge.map(|k| 0.5 * (1.0 + k)),
        guess_prob_mem: 0.5 * (1.0 + distinguishability),
    }
}

/// `(max − min)/(max + min)` of a fringe; 0 for an empty or all-zero scan.
pub fn visibility_of(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if values.is_empty() || max + min <= 0.0 {
        0.0
    } else {
        (max - min) / (max + min)
    }
}

/// Visibility of prob(D1) over `steps` equally spaced phases on `[0, 2π]`,
/// computed by propagating the state.
pub fn scan_visibility(
    optics: &SignalOptics,
    phi: SourceParam,
    meas: &IdlerMeasurement,
    steps: usize,
) -> Result<f64> {
    if steps < 2 {
        return Err(Error::Config(format!(
            "a phase scan needs at least 2 points, got {steps}"
        )));
    }
    let d1 = (0..steps)
        .map(|k| {
            let alpha = MziPhase::from_radians(TAU * k as f64 / (steps - 1) as f64);
            coincidence_table_circuit_with(optics, phi, meas, Mode::Wave, alpha)
                .map(|t| t.signal_marginal(SignalDetector::D1))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(visibility_of(&d1))
}

/// Probability of naming the signal path correctly when betting on the more
/// likely path for every idler outcome. Needs a particle-mode table, where
/// the signal detectors stand for the paths.
pub fn guess_probability(table: &CoincidenceTable) -> Result<f64> {
    if table.mode != Mode::Particle {
        return Err(Error::Config(
            "path guessing needs a particle-mode table".into(),
        ));
    }
    Ok(table
        .idler_labels()
        .iter()
        .map(|&l| {
            let a = table.get(SignalDetector::D1, l).unwrap_or(0.0);
            let b = table.get(SignalDetector::D2, l).unwrap_or(0.0);
            a.max(b)
        })
        .sum())
}

/// Total probability of the inconclusive outcome, if the table has one.
pub fn inconclusive_probability(table: &CoincidenceTable) -> Option<f64> {
    table.idler_marginal(IdlerLabel::D5)
}
