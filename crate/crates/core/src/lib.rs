//! Simulation of a two-path Mach–Zehnder interferometer whose signal photon
//! is path-marked by the polarization of an entangled idler photon.
//!
//! The crate computes joint signal/idler coincidence probabilities two ways,
//! in closed form and by propagating the two-photon state through matrix
//! models of the optics, and derives fringe visibility, path
//! distinguishability and path knowledge from them. [`stochastic`] turns the
//! probabilities into seeded Poisson detector counts.

pub mod elements;
pub mod error;
pub mod experiment;
pub mod qmath;
pub mod stochastic;

pub use elements::{MziPhase, SignalOptics, WavePlateAngle};
pub use error::{Error, Result};
pub use experiment::{
    CoincidenceTable, DensityMatrix2, DualityReport, IdlerLabel, IdlerMeasurement, MeasurementKind,
    Mode, SignalDetector, SourceParam, Subensemble, UsdConfig,
};
pub use qmath::{Complex, Ket2, Ket4, Mat2, Mat4};
pub use stochastic::{CountSample, ErrorBarEstimate, RunConfig};
