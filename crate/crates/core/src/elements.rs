//! Optical elements as 2×2 matrices.
//!
//! Polarization elements act on `(V, H)` amplitudes, interferometer elements
//! on `(path 1, path 2)` amplitudes. The beam splitter maps path amplitudes
//! to `(D1, D2)` detector amplitudes.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::qmath::{re, Complex, Mat2};

/// Fast-axis angle of a half-wave plate, in radians.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct WavePlateAngle(f64);

impl WavePlateAngle {
    pub fn from_radians(rad: f64) -> Self {
        WavePlateAngle(rad)
    }

    pub fn from_degrees(deg: f64) -> Self {
        WavePlateAngle(deg.to_radians())
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    pub fn degrees(self) -> f64 {
        self.0.to_degrees()
    }
}

/// Interferometer phase α imprinted by the phase shifter, in radians.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct MziPhase(f64);

impl MziPhase {
    pub const ZERO: MziPhase = MziPhase(0.0);

    pub fn from_radians(rad: f64) -> Self {
        MziPhase(rad)
    }

    pub fn from_degrees(deg: f64) -> Self {
        MziPhase(deg.to_radians())
    }

    pub fn radians(self) -> f64 {
        self.0
    }

    pub fn degrees(self) -> f64 {
        self.0.to_degrees()
    }
}

/// Half-wave plate with fast axis at `angle`:
/// `[[cos 2θ, sin 2θ], [sin 2θ, −cos 2θ]]`.
pub fn hwp(angle: WavePlateAngle) -> Mat2 {
    let (s, c) = (2.0 * angle.radians()).sin_cos();
    Mat2::real([[c, s], [s, -c]])
}

/// Polarizing beam splitter followed by a 45° half-wave plate: turns the
/// polarization amplitudes `(v′, h′)` into path amplitudes `(h′, v′)`.
pub fn pol_to_path() -> Mat2 {
    Mat2::real([[0.0, 1.0], [1.0, 0.0]])
}

/// Phase shifter on path 1: `diag(e^{iα}, 1)`.
pub fn phase_shifter(alpha: MziPhase) -> Mat2 {
    Mat2::diag(Complex::from_polar(1.0, alpha.radians()), re(1.0))
}

/// 50/50 nonpolarizing beam splitter, `(path 1, path 2) → (D1, D2)`.
pub fn npbs() -> Mat2 {
    Mat2::real([[1.0, 1.0], [1.0, -1.0]]).scale(FRAC_1_SQRT_2)
}

/// Swap that routes path amplitudes straight to the detectors when the beam
/// splitter is removed: D1 sees path 2, D2 sees path 1.
pub fn particle_mode_routing() -> Mat2 {
    Mat2::real([[0.0, 1.0], [1.0, 0.0]])
}

/// Signal-side optics used by the propagation route. Holding the beam
/// splitter as data lets a deliberately faulty element be swapped in to
/// confirm that the consistency checks notice it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalOptics {
    pub npbs: Mat2,
}

impl SignalOptics {
    pub fn ideal() -> Self {
        SignalOptics { npbs: npbs() }
    }

    /// Beam splitter with the sign of its path-2 column flipped. Still
    /// unitary, but it swaps the bright and dark ports.
    pub fn with_flipped_npbs_sign() -> Self {
        let mut m = npbs();
        m.0[0][1] = -m.0[0][1];
        m.0[1][1] = -m.0[1][1];
        SignalOptics { npbs: m }
    }

    /// Map from path amplitudes to `(D1, D2)` amplitudes in wave mode.
    pub fn wave_mode(&self, alpha: MziPhase) -> Mat2 {
        self.npbs * phase_shifter(alpha)
    }
}

impl Default for SignalOptics {
    fn default() -> Self {
        Self::ideal()
    }
}
