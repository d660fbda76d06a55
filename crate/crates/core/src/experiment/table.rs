use super::measurement::{IdlerLabel, IdlerMeasurement, MeasurementKind};
use super::source::{idler_states, joint_state};
use super::{Mode, SignalDetector, SourceParam};
use crate::elements::{particle_mode_routing, MziPhase, SignalOptics};
use crate::error::{Error, Result};
use crate::qmath::{inner, project_idler, Mat2, COMPOSED_TOL};

/// Joint probabilities of a signal detector (D1/D2) and an idler outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct CoincidenceTable {
    pub mode: Mode,
    /// Interferometer phase; irrelevant in particle mode.
    pub alpha: MziPhase,
    pub kind: MeasurementKind,
    columns: Vec<IdlerLabel>,
    /// `probs[column][signal detector]`
    probs: Vec<[f64; 2]>,
}

impl CoincidenceTable {
    fn new(
        mode: Mode,
        alpha: MziPhase,
        kind: MeasurementKind,
        columns: Vec<(IdlerLabel, [f64; 2])>,
    ) -> Self {
        let (columns, probs) = columns.into_iter().unzip();
        CoincidenceTable {
            mode,
            alpha,
            kind,
            columns,
            probs,
        }
    }

    pub fn idler_labels(&self) -> &[IdlerLabel] {
        &self.columns
    }

    pub fn get(&self, signal: SignalDetector, idler: IdlerLabel) -> Option<f64> {
        self.columns
            .iter()
            .position(|&l| l == idler)
            .map(|c| self.probs[c][signal.index()])
    }

    /// Cells in row-major order: D1 row first, idler columns in measurement order.
    pub fn cells(&self) -> impl Iterator<Item = (SignalDetector, IdlerLabel, f64)> + '_ {
        SignalDetector::ALL.into_iter().flat_map(move |d| {
            self.columns
                .iter()
                .zip(&self.probs)
                .map(move |(&l, p)| (d, l, p[d.index()]))
        })
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().map(|p| p[0] + p[1]).sum()
    }

    pub fn signal_marginal(&self, signal: SignalDetector) -> f64 {
        self.probs.iter().map(|p| p[signal.index()]).sum()
    }

    pub fn idler_marginal(&self, idler: IdlerLabel) -> Option<f64> {
        self.columns
            .iter()
            .position(|&l| l == idler)
            .map(|c| self.probs[c][0] + self.probs[c][1])
    }

    /// Largest cellwise difference; `None` if the tables have different
    /// idler outcomes.
    pub fn max_abs_diff(&self, other: &CoincidenceTable) -> Option<f64> {
        if self.columns != other.columns {
            return None;
        }
        Some(
            self.probs
                .iter()
                .zip(&other.probs)
                .flat_map(|(a, b)| [(a[0] - b[0]).abs(), (a[1] - b[1]).abs()])
                .fold(0.0, f64::max),
        )
    }
}

/// Coincidence table by state propagation with ideal optics.
pub fn coincidence_table_circuit(
    phi: SourceParam,
    meas: &IdlerMeasurement,
    mode: Mode,
    alpha: MziPhase,
) -> Result<CoincidenceTable> {
    coincidence_table_circuit_with(&SignalOptics::ideal(), phi, meas, mode, alpha)
}

/// Propagates the joint state: each idler outcome `b` leaves the signal in
/// `(⟨b| ⊗ 1)Ψ`, which the signal optics carry to the D1/D2 amplitudes.
pub fn coincidence_table_circuit_with(
    optics: &SignalOptics,
    phi: SourceParam,
    meas: &IdlerMeasurement,
    mode: Mode,
    alpha: MziPhase,
) -> Result<CoincidenceTable> {
    check_measurement(phi, meas)?;
    let signal_map: Mat2 = match mode {
        Mode::Particle => particle_mode_routing(),
        Mode::Wave => optics.wave_mode(alpha),
    };
    let psi = joint_state(phi);
    let columns = meas
        .effects
        .iter()
        .map(|e| {
            let detectors = signal_map.apply(&project_idler(&e.vector, &psi));
            (
                e.label,
                [detectors.0[0].norm_sqr(), detectors.0[1].norm_sqr()],
            )
        })
        .collect();
    Ok(CoincidenceTable::new(mode, alpha, meas.kind, columns))
}

fn check_measurement(phi: SourceParam, meas: &IdlerMeasurement) -> Result<()> {
    let err = meas.completeness_error();
    if err > COMPOSED_TOL {
        return Err(Error::Config(format!(
            "{} measurement is not complete (deviation {err:e})",
            meas.kind
        )));
    }
    if meas.kind == MeasurementKind::Usd {
        let [psi1, psi2] = idler_states(phi);
        let overlap = |label, psi| {
            meas.effect(label)
                .map(|e| inner(&e.vector, psi).norm())
                .unwrap_or(f64::INFINITY)
        };
        let worst = overlap(IdlerLabel::D3, &psi1).max(overlap(IdlerLabel::D4, &psi2));
        if worst > COMPOSED_TOL {
            let built_for = meas
                .usd
                .map(|c| format!("{}°", c.phi().degrees()))
                .unwrap_or_else(|| "unknown φ".into());
            return Err(Error::Config(format!(
                "discrimination set up for {built_for} is not unambiguous at φ = {}° (overlap {worst:e})",
                phi.degrees()
            )));
        }
    }
    Ok(())
}

/// Closed-form coincidence table for the three-outcome discrimination.
pub fn coincidence_table_analytic(
    phi: SourceParam,
    mode: Mode,
    alpha: MziPhase,
) -> Result<CoincidenceTable> {
    coincidence_table_analytic_for(MeasurementKind::Usd, phi, mode, alpha)
}

/// Closed-form coincidence table for any of the idler measurements.
pub fn coincidence_table_analytic_for(
    kind: MeasurementKind,
    phi: SourceParam,
    mode: Mode,
    alpha: MziPhase,
) -> Result<CoincidenceTable> {
    let (s2, c2) = (phi.sin2().powi(2), phi.cos2().powi(2));
    let (sin4, cos4) = (phi.sin4(), phi.cos4());
    let a = alpha.radians();
    let (half_c, half_s) = ((0.5 * a).cos().powi(2), (0.5 * a).sin().powi(2));
    // rounding can push −cos 4φ a few ulps below zero at φ = 22.5°
    let inconclusive = (-cos4).max(0.0);

    if kind == MeasurementKind::Usd {
        phi.require_usd()?;
    }

    use IdlerLabel::*;
    let columns = match (kind, mode) {
        (MeasurementKind::Usd, Mode::Particle) => vec![
            (D3, [c2, 0.0]),
            (D4, [0.0, c2]),
            (D5, [0.5 * inconclusive, 0.5 * inconclusive]),
        ],
        (MeasurementKind::Usd, Mode::Wave) => vec![
            (D3, [0.5 * c2, 0.5 * c2]),
            (D4, [0.5 * c2, 0.5 * c2]),
            (D5, [inconclusive * half_c, inconclusive * half_s]),
        ],
        (MeasurementKind::Mem, Mode::Particle) => vec![
            (DPlus, [0.25 * (1.0 + sin4), 0.25 * (1.0 - sin4)]),
            (DMinus, [0.25 * (1.0 - sin4), 0.25 * (1.0 + sin4)]),
        ],
        (MeasurementKind::Mem, Mode::Wave) => {
            let d1 = 0.25 * (1.0 - cos4 * a.cos());
            let d2 = 0.25 * (1.0 + cos4 * a.cos());
            vec![(DPlus, [d1, d2]), (DMinus, [d1, d2])]
        }
        (MeasurementKind::Erasure, Mode::Particle) => {
            vec![(DV, [0.5 * s2, 0.5 * s2]), (DH, [0.5 * c2, 0.5 * c2])]
        }
        (MeasurementKind::Erasure, Mode::Wave) => vec![
            (DV, [s2 * half_c, s2 * half_s]),
            (DH, [c2 * half_s, c2 * half_c]),
        ],
    };
    Ok(CoincidenceTable::new(mode, alpha, kind, columns))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::{
        erasure_measurement, measurement_for, mem_measurement, usd_angle, usd_measurement,
    };
    use crate::qmath::ALGEBRA_TOL;
    use std::f64::consts::TAU;
    use IdlerLabel::*;
    use SignalDetector::*;

    fn phi(deg: f64) -> SourceParam {
        SourceParam::from_degrees(deg).unwrap()
    }

    fn usd(p: SourceParam) -> IdlerMeasurement {
        usd_measurement(usd_angle(p).unwrap())
    }

    fn alpha_grid() -> impl Iterator<Item = MziPhase> {
        (0..=100).map(|k| MziPhase::from_radians(TAU * k as f64 / 100.0))
    }

    #[test]
    fn particle_mode_table_at_30() {
        let p = phi(30.0);
        for t in [
            coincidence_table_circuit(p, &usd(p), Mode::Particle, MziPhase::ZERO).unwrap(),
            coincidence_table_analytic(p, Mode::Particle, MziPhase::ZERO).unwrap(),
        ] {
            for (d, l, v) in [
                (D1, D3, 0.25),
                (D2, D4, 0.25),
                (D1, D5, 0.25),
                (D2, D5, 0.25),
                (D1, D4, 0.0),
                (D2, D3, 0.0),
            ] {
                assert!((t.get(d, l).unwrap() - v).abs() <= ALGEBRA_TOL, "{d} {l}");
            }
        }
    }

    #[test]
    fn wave_mode_table_at_30_balanced() {
        let p = phi(30.0);
        let t = coincidence_table_circuit(p, &usd(p), Mode::Wave, MziPhase::ZERO).unwrap();
        assert!((t.get(D1, D5).unwrap() - 0.5).abs() <= ALGEBRA_TOL);
        assert!(t.get(D2, D5).unwrap().abs() <= ALGEBRA_TOL);
        for d in [D1, D2] {
            for l in [D3, D4] {
                assert!((t.get(d, l).unwrap() - 0.125).abs() <= ALGEBRA_TOL);
            }
        }
    }

    #[test]
    fn no_marking_wave_mode() {
        let p = phi(45.0);
        for a in alpha_grid() {
            let t = coincidence_table_analytic(p, Mode::Wave, a).unwrap();
            for d in [D1, D2] {
                assert!(t.get(d, D3).unwrap().abs() <= ALGEBRA_TOL);
                assert!(t.get(d, D4).unwrap().abs() <= ALGEBRA_TOL);
            }
            let x = a.radians();
            assert!((t.get(D1, D5).unwrap() - (0.5 * x).cos().powi(2)).abs() <= ALGEBRA_TOL);
            assert!((t.get(D2, D5).unwrap() - (0.5 * x).sin().powi(2)).abs() <= ALGEBRA_TOL);
        }
    }

    #[test]
    fn orthogonal_limit_has_empty_inconclusive_column() {
        for mode in [Mode::Particle, Mode::Wave] {
            for a in alpha_grid() {
                let t = coincidence_table_analytic(phi(22.5), mode, a).unwrap();
                assert_eq!(t.idler_marginal(D5), Some(0.0));
                let c = coincidence_table_circuit(phi(22.5), &usd(phi(22.5)), mode, a).unwrap();
                assert!(c.idler_marginal(D5).unwrap() <= ALGEBRA_TOL);
            }
        }
    }

    #[test]
    fn analytic_matches_circuit_all_measurements() {
        for kind in [
            MeasurementKind::Usd,
            MeasurementKind::Mem,
            MeasurementKind::Erasure,
        ] {
            let lo = if kind == MeasurementKind::Usd { 45 } else { 0 };
            for k in lo..=90 {
                let p = phi(0.5 * k as f64);
                let m = measurement_for(kind, p).unwrap();
                for mode in [Mode::Particle, Mode::Wave] {
                    for a in alpha_grid().step_by(5) {
                        let x = coincidence_table_analytic_for(kind, p, mode, a).unwrap();
                        let y = coincidence_table_circuit(p, &m, mode, a).unwrap();
                        assert!(
                            x.max_abs_diff(&y).unwrap() <= ALGEBRA_TOL,
                            "{kind} {mode} φ={} α={}",
                            p.degrees(),
                            a.degrees()
                        );
                        assert!((y.total() - 1.0).abs() <= ALGEBRA_TOL);
                        assert!(y
                            .cells()
                            .all(|(_, _, v)| (0.0..=1.0 + ALGEBRA_TOL).contains(&v)));
                    }
                }
            }
        }
    }

    #[test]
    fn mismatched_discrimination_is_rejected() {
        let m = usd(phi(30.0));
        let err = coincidence_table_circuit(phi(40.0), &m, Mode::Particle, MziPhase::ZERO);
        assert!(matches!(err, Err(Error::Config(_))));
        // independent of φ
        assert!(coincidence_table_circuit(
            phi(40.0),
            &mem_measurement(),
            Mode::Wave,
            MziPhase::ZERO
        )
        .is_ok());
        assert!(coincidence_table_circuit(
            phi(5.0),
            &erasure_measurement(),
            Mode::Wave,
            MziPhase::ZERO
        )
        .is_ok());
    }

    #[test]
    fn analytic_usd_domain() {
        assert!(matches!(
            coincidence_table_analytic(phi(10.0), Mode::Wave, MziPhase::ZERO),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn faulty_beam_splitter_breaks_agreement() {
        let p = phi(30.0);
        let bad = SignalOptics::with_flipped_npbs_sign();
        let x = coincidence_table_analytic(p, Mode::Wave, MziPhase::ZERO).unwrap();
        let y =
            coincidence_table_circuit_with(&bad, p, &usd(p), Mode::Wave, MziPhase::ZERO).unwrap();
        assert!(x.max_abs_diff(&y).unwrap() > 0.1);
    }
}
