//! Reduced signal state and its decompositions into subensembles sorted by
//! idler outcome.

use super::measurement::{IdlerLabel, IdlerMeasurement};
use super::source::joint_state;
use super::SourceParam;
use crate::elements::{MziPhase, SignalOptics};
use crate::error::{Error, Result};
use crate::qmath::{partial_trace_idler, project_idler, Mat2, ALGEBRA_TOL};

/// Outcome weights at or below this are treated as impossible, and their
/// conditional state is left undefined.
pub const NEGLIGIBLE_WEIGHT: f64 = 1e-24;

/// Hermitian, unit-trace, positive semidefinite 2×2 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix2(Mat2);

impl DensityMatrix2 {
    pub fn new(m: Mat2) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::NonFinite("density matrix entry"));
        }
        if !m.is_hermitian(ALGEBRA_TOL) {
            return Err(Error::InvalidDensity("not Hermitian"));
        }
        if (m.trace().re - 1.0).abs() > ALGEBRA_TOL {
            return Err(Error::InvalidDensity("trace differs from 1"));
        }
        if m.hermitian_eigenvalues()[0] < -ALGEBRA_TOL {
            return Err(Error::InvalidDensity("negative eigenvalue"));
        }
        Ok(DensityMatrix2(m))
    }

    pub(crate) fn new_unchecked(m: Mat2) -> Self {
        debug_assert!(Self::new(m).is_ok(), "{m:?}");
        DensityMatrix2(m)
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.0
    }

    pub fn eigenvalues(&self) -> [f64; 2] {
        self.0.hermitian_eigenvalues()
    }

    /// Fringe contrast this path state shows behind a balanced beam splitter,
    /// `2|ρ₁₂|`.
    pub fn fringe_visibility(&self) -> f64 {
        2.0 * self.0 .0[0][1].norm()
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix2) -> f64 {
        self.0.max_abs_diff(&other.0)
    }
}

/// One component of a blend: the signals sorted into outcome `label`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Subensemble {
    pub label: IdlerLabel,
    pub weight: f64,
    /// `None` when the outcome never happens.
    pub state: Option<DensityMatrix2>,
}

/// `ρ = ½ [[1, −cos 4φ], [−cos 4φ, 1]]`.
pub fn signal_rho(phi: SourceParam) -> DensityMatrix2 {
    let k = -0.5 * phi.cos4();
    DensityMatrix2::new_unchecked(Mat2::real([[0.5, k], [k, 0.5]]))
}

/// Three-way sorting by the discrimination outcome, closed form: path 1
/// (D4), path 2 (D3), and the unknowable-path remainder (D5).
pub fn subensembles_usd(phi: SourceParam) -> Result<Vec<Subensemble>> {
    phi.require_usd()?;
    let c2 = phi.cos2().powi(2);
    let path1 = Mat2::real([[1.0, 0.0], [0.0, 0.0]]);
    let path2 = Mat2::real([[0.0, 0.0], [0.0, 1.0]]);
    let both = Mat2::real([[0.5, 0.5], [0.5, 0.5]]);
    let defined = |w: f64, m| (w > NEGLIGIBLE_WEIGHT).then(|| DensityMatrix2::new_unchecked(m));
    let w5 = (-phi.cos4()).max(0.0);
    Ok(vec![
        Subensemble {
            label: IdlerLabel::D4,
            weight: c2,
            state: defined(c2, path1),
        },
        Subensemble {
            label: IdlerLabel::D3,
            weight: c2,
            state: defined(c2, path2),
        },
        Subensemble {
            label: IdlerLabel::D5,
            weight: w5,
            state: defined(w5, both),
        },
    ])
}

/// Two-way sorting by the error-minimizing measurement, closed form:
/// `ρ± = ½ [[1 ∓ sin 4φ, −cos 4φ], [−cos 4φ, 1 ± sin 4φ]]`, weight ½ each.
pub fn subensembles_mem(phi: SourceParam) -> Vec<Subensemble> {
    let (s, k) = (phi.sin4(), -phi.cos4());
    let rho = |sign: f64| {
        DensityMatrix2::new_unchecked(Mat2::real([
            [0.5 * (1.0 - sign * s), 0.5 * k],
            [0.5 * k, 0.5 * (1.0 + sign * s)],
        ]))
    };
    vec![
        Subensemble {
            label: IdlerLabel::DPlus,
            weight: 0.5,
            state: Some(rho(1.0)),
        },
        Subensemble {
            label: IdlerLabel::DMinus,
            weight: 0.5,
            state: Some(rho(-1.0)),
        },
    ]
}

/// Conditions the joint state on each idler outcome: the signal is left in
/// `(⟨b| ⊗ 1)Ψ`, renormalized, with the outcome probability as weight.
pub fn conditional_signal_states(phi: SourceParam, meas: &IdlerMeasurement) -> Vec<Subensemble> {
    let psi = joint_state(phi);
    meas.effects
        .iter()
        .map(|e| {
            let s = project_idler(&e.vector, &psi);
            let weight = s.norm_sqr();
            let state = (weight > NEGLIGIBLE_WEIGHT)
                .then(|| DensityMatrix2::new_unchecked(s.outer().scale(1.0 / weight)));
            Subensemble {
                label: e.label,
                weight,
                state,
            }
        })
        .collect()
}

/// `Σ wᵢ ρᵢ`; undefined components must carry zero weight and are skipped.
pub fn blend(parts: &[Subensemble]) -> Mat2 {
    parts
        .iter()
        .filter_map(|p| p.state.map(|s| s.matrix().scale(p.weight)))
        .fold(Mat2::ZERO, |acc, m| acc + m)
}

/// Phase shifter and beam splitter acting on a signal state.
pub fn mzi_transform(rho: &DensityMatrix2, alpha: MziPhase) -> DensityMatrix2 {
    let u = SignalOptics::ideal().wave_mode(alpha);
    DensityMatrix2::new_unchecked(u.conjugate(rho.matrix()))
}

/// `[prob(D1), prob(D2)]` in wave mode, ignoring the idler.
pub fn detector_probabilities(phi: SourceParam, alpha: MziPhase) -> [f64; 2] {
    let out = mzi_transform(&signal_rho(phi), alpha);
    [out.matrix().0[0][0].re, out.matrix().0[1][1].re]
}

/// Reduced state by tracing the idler out of `|Ψ⟩⟨Ψ|`.
pub fn signal_rho_by_trace(phi: SourceParam) -> Mat2 {
    partial_trace_idler(&joint_state(phi).outer())
}
