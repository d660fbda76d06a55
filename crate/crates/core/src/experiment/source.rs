use std::f64::consts::FRAC_1_SQRT_2;

use super::SourceParam;
use crate::elements::{hwp, pol_to_path, WavePlateAngle};
use crate::qmath::{kron, tensor, Ket2, Ket4, Mat2};

/// Down-converted pair in the polarization ⊗ polarization basis:
/// `sin 2φ (V⊗V) + cos 2φ (H⊗H)`.
pub fn source_state(phi: SourceParam) -> Ket4 {
    Ket4::real([phi.sin2(), 0.0, 0.0, phi.cos2()])
}

/// Idler polarization states correlated with signal paths 1 and 2,
/// `(sin 2φ, ∓cos 2φ)`, each normalized.
pub fn idler_states(phi: SourceParam) -> [Ket2; 2] {
    let (s, c) = (phi.sin2(), phi.cos2());
    [Ket2::real(s, -c), Ket2::real(s, c)]
}

/// Idler polarization ⊗ signal path, written out in components:
/// `(ψ₁ ⊗ p1 + ψ₂ ⊗ p2) / √2`.
pub fn joint_state(phi: SourceParam) -> Ket4 {
    let [psi1, psi2] = idler_states(phi);
    let p1 = Ket2::real(FRAC_1_SQRT_2, 0.0);
    let p2 = Ket2::real(0.0, FRAC_1_SQRT_2);
    tensor(&psi1, &p1) + tensor(&psi2, &p2)
}

/// Same state as [`joint_state`], obtained by sending the source state
/// through the 22.5° signal plate and the polarization-to-path converter.
pub fn joint_state_by_propagation(phi: SourceParam) -> Ket4 {
    let signal_optics = pol_to_path() * hwp(WavePlateAngle::from_degrees(22.5));
    kron(&Mat2::IDENTITY, &signal_optics).apply(&source_state(phi))
}
