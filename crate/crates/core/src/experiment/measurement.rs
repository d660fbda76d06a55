use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use super::SourceParam;
use crate::qmath::{Ket2, Mat2};

/// Outcome label of an idler measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IdlerLabel {
    /// Discrimination outcome that rules out path 1 (signal took path 2).
    D3,
    /// Discrimination outcome that rules out path 2 (signal took path 1).
    D4,
    /// Inconclusive discrimination outcome.
    D5,
    /// Error-minimizing projection onto `(1, 1)/√2`.
    DPlus,
    /// Error-minimizing projection onto `(1, −1)/√2`.
    DMinus,
    /// Erasure projection onto V.
    DV,
    /// Erasure projection onto H.
    DH,
}

impl IdlerLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            IdlerLabel::D3 => "D3",
            IdlerLabel::D4 => "D4",
            IdlerLabel::D5 => "D5",
            IdlerLabel::DPlus => "D+",
            IdlerLabel::DMinus => "D-",
            IdlerLabel::DV => "DV",
            IdlerLabel::DH => "DH",
        }
    }

    /// Identifier-safe form, used for column names.
    pub fn ident(self) -> &'static str {
        match self {
            IdlerLabel::DPlus => "Dplus",
            IdlerLabel::DMinus => "Dminus",
            other => other.as_str(),
        }
    }
}

impl fmt::Display for IdlerLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MeasurementKind {
    /// Three-outcome unambiguous discrimination.
    Usd,
    /// Two-outcome error-minimizing measurement.
    Mem,
    /// Projective measurement in the V/H basis, erasing the path mark.
    Erasure,
}

impl MeasurementKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MeasurementKind::Usd => "usd",
            MeasurementKind::Mem => "mem",
            MeasurementKind::Erasure => "erasure",
        }
    }

    pub fn labels(self) -> &'static [IdlerLabel] {
        match self {
            MeasurementKind::Usd => &[IdlerLabel::D3, IdlerLabel::D4, IdlerLabel::D5],
            MeasurementKind::Mem => &[IdlerLabel::DPlus, IdlerLabel::DMinus],
            MeasurementKind::Erasure => &[IdlerLabel::DV, IdlerLabel::DH],
        }
    }
}

impl fmt::Display for MeasurementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One measurement outcome: probability on idler state `ψ` is `|⟨b|ψ⟩|²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Effect {
    pub label: IdlerLabel,
    pub vector: Ket2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdlerMeasurement {
    pub kind: MeasurementKind,
    pub effects: Vec<Effect>,
    /// Wave-plate setting, present for the discrimination measurement.
    pub usd: Option<UsdConfig>,
}

impl IdlerMeasurement {
    /// `Σ_k |b_k⟩⟨b_k|`, which must be the identity.
    pub fn completeness_sum(&self) -> Mat2 {
        self.effects
            .iter()
            .fold(Mat2::ZERO, |acc, e| acc + e.vector.outer())
    }

    pub fn completeness_error(&self) -> f64 {
        self.completeness_sum().max_abs_diff(&Mat2::IDENTITY)
    }

    pub fn effect(&self, label: IdlerLabel) -> Option<&Effect> {
        self.effects.iter().find(|e| e.label == label)
    }

    pub fn labels(&self) -> Vec<IdlerLabel> {
        self.effects.iter().map(|e| e.label).collect()
    }
}

/// Wave-plate angle θ of the discrimination setup, with
/// `cos 2θ = −cot 2φ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UsdConfig {
    theta: f64,
    phi: SourceParam,
}

impl UsdConfig {
    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> SourceParam {
        self.phi
    }
}

/// Principal-branch θ ∈ [π/4, π/2] for the given φ ∈ [π/8, π/4].
pub fn usd_angle(phi: SourceParam) -> crate::Result<UsdConfig> {
    phi.require_usd()?;
    // φ a hair below π/8 is admitted by the slack in `require_usd`; keep
    // the cosine in range there.
    let cos_2theta = (-phi.cos2() / phi.sin2()).clamp(-1.0, 1.0);
    Ok(UsdConfig {
        theta: 0.5 * cos_2theta.acos(),
        phi,
    })
}

/// Kraus vectors `b₃,₄ = (cos 2θ, ∓1)/√2` and `b₅ = (sin 2θ, 0)`.
pub fn usd_measurement(cfg: UsdConfig) -> IdlerMeasurement {
    let (s, c) = (2.0 * cfg.theta).sin_cos();
    IdlerMeasurement {
        kind: MeasurementKind::Usd,
        effects: vec![
            Effect {
                label: IdlerLabel::D3,
                vector: Ket2::real(c * FRAC_1_SQRT_2, -FRAC_1_SQRT_2),
            },
            Effect {
                label: IdlerLabel::D4,
                vector: Ket2::real(c * FRAC_1_SQRT_2, FRAC_1_SQRT_2),
            },
            Effect {
                label: IdlerLabel::D5,
                vector: Ket2::real(s, 0.0),
            },
        ],
        usd: Some(cfg),
    }
}

/// Projectors onto `(1, ±1)/√2`.
pub fn mem_measurement() -> IdlerMeasurement {
    IdlerMeasurement {
        kind: MeasurementKind::Mem,
        effects: vec![
            Effect {
                label: IdlerLabel::DPlus,
                vector: Ket2::real(FRAC_1_SQRT_2, FRAC_1_SQRT_2),
            },
            Effect {
                label: IdlerLabel::DMinus,
                vector: Ket2::real(FRAC_1_SQRT_2, -FRAC_1_SQRT_2),
            },
        ],
        usd: None,
    }
}

/// Projectors onto V and H.
pub fn erasure_measurement() -> IdlerMeasurement {
    IdlerMeasurement {
        kind: MeasurementKind::Erasure,
        effects: vec![
            Effect {
                label: IdlerLabel::DV,
                vector: Ket2::real(1.0, 0.0),
            },
            Effect {
                label: IdlerLabel::DH,
                vector: Ket2::real(0.0, 1.0),
            },
        ],
        usd: None,
    }
}

/// Builds the measurement of the given kind, matched to `phi` where the
/// kind depends on it.
pub fn measurement_for(kind: MeasurementKind, phi: SourceParam) -> crate::Result<IdlerMeasurement> {
    Ok(match kind {
        MeasurementKind::Usd => usd_measurement(usd_angle(phi)?),
        MeasurementKind::Mem => mem_measurement(),
        MeasurementKind::Erasure => erasure_measurement(),
    })
}
