//! The invariant suite behind `pathmark selfcheck`.

use std::fmt::Write as _;

use pathmark_core::experiment::{
    blend, coincidence_table_analytic_for, coincidence_table_circuit_with,
    conditional_signal_states, duality_report, guess_probability, idler_states,
    inconclusive_probability, measurement_for, scan_visibility, signal_rho, signal_rho_by_trace,
    subensembles_mem, subensembles_usd, IdlerLabel, MeasurementKind,
};
use pathmark_core::qmath::{inner, ALGEBRA_TOL, COMPOSED_TOL};
use pathmark_core::stochastic::{chi_square_gof, run_trials, summarize, ChiSquareOutcome};
use pathmark_core::{Mode, MziPhase, RunConfig, SignalDetector, SignalOptics, SourceParam};

use crate::commands::SweepSpec;

const CHI_SQUARE_LEVEL: f64 = 1e-3;

/// Deliberate defects that make the suite fail, to show it can.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Flips the sign of the beam splitter's path-2 column.
    NpbsSign,
}

impl Fault {
    pub fn parse(s: &str) -> Result<Fault, String> {
        match s {
            "npbs-sign" => Ok(Fault::NpbsSign),
            _ => Err(format!("unknown fault '{s}' (expected npbs-sign)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, worst: f64, tol: f64) -> CheckResult {
    CheckResult {
        name,
        passed: worst <= tol,
        detail: format!("max deviation {worst:.3e} (tolerance {tol:.0e})"),
    }
}

fn failed(name: &'static str, e: impl std::fmt::Display) -> CheckResult {
    CheckResult {
        name,
        passed: false,
        detail: format!("error: {e}"),
    }
}

fn phi_grid() -> Vec<SourceParam> {
    SweepSpec::default_phi()
        .points()
        .into_iter()
        .map(|d| SourceParam::from_degrees(d).expect("grid lies inside [0, 45]"))
        .collect()
}

fn full_phi_grid() -> Vec<SourceParam> {
    SweepSpec::new(0.0, 45.0, 31)
        .expect("valid grid")
        .points()
        .into_iter()
        .map(|d| SourceParam::from_degrees(d).expect("grid lies inside [0, 45]"))
        .collect()
}

fn alpha_grid() -> Vec<MziPhase> {
    SweepSpec::default_alpha()
        .points()
        .into_iter()
        .map(MziPhase::from_degrees)
        .collect()
}

type Outcome = pathmark_core::Result<f64>;

fn worst(values: impl IntoIterator<Item = Outcome>) -> Outcome {
    values
        .into_iter()
        .try_fold(0.0_f64, |acc, v| Ok(acc.max(v?)))
}

fn oracle_equivalence(optics: &SignalOptics) -> Outcome {
    let mut cases = Vec::new();
    for kind in [
        MeasurementKind::Usd,
        MeasurementKind::Mem,
        MeasurementKind::Erasure,
    ] {
        let phis = if kind == MeasurementKind::Usd {
            phi_grid()
        } else {
            full_phi_grid()
        };
        for &phi in &phis {
            cases.push((kind, phi));
        }
    }
    let alphas = alpha_grid();
    worst(cases.into_iter().flat_map(|(kind, phi)| {
        let alphas = &alphas;
        [Mode::Particle, Mode::Wave]
            .into_iter()
            .flat_map(move |mode| {
                alphas.iter().map(move |&alpha| {
                    let meas = measurement_for(kind, phi)?;
                    let a = coincidence_table_analytic_for(kind, phi, mode, alpha)?;
                    let c = coincidence_table_circuit_with(optics, phi, &meas, mode, alpha)?;
                    Ok(a.max_abs_diff(&c).unwrap_or(f64::INFINITY))
                })
            })
    }))
}

fn completeness() -> Outcome {
    worst(full_phi_grid().into_iter().flat_map(|phi| {
        [
            MeasurementKind::Usd,
            MeasurementKind::Mem,
            MeasurementKind::Erasure,
        ]
        .into_iter()
        .filter(move |k| *k != MeasurementKind::Usd || phi.in_usd_range())
        .map(move |k| Ok(measurement_for(k, phi)?.completeness_error()))
    }))
}

fn unambiguity(optics: &SignalOptics) -> Outcome {
    worst(phi_grid().into_iter().map(|phi| {
        let meas = measurement_for(MeasurementKind::Usd, phi)?;
        let [psi1, psi2] = idler_states(phi);
        let b3 = meas.effect(IdlerLabel::D3).expect("USD has D3").vector;
        let b4 = meas.effect(IdlerLabel::D4).expect("USD has D4").vector;
        let t = coincidence_table_circuit_with(optics, phi, &meas, Mode::Particle, MziPhase::ZERO)?;
        Ok([
            inner(&b3, &psi1).norm(),
            inner(&b4, &psi2).norm(),
            t.get(SignalDetector::D1, IdlerLabel::D4)
                .unwrap_or(f64::INFINITY),
            t.get(SignalDetector::D2, IdlerLabel::D3)
                .unwrap_or(f64::INFINITY),
        ]
        .into_iter()
        .fold(0.0, f64::max))
    }))
}

fn inconclusive_equals_visibility(optics: &SignalOptics) -> Outcome {
    worst(phi_grid().into_iter().map(|phi| {
        let meas = measurement_for(MeasurementKind::Usd, phi)?;
        let v = duality_report(phi).visibility;
        let t = coincidence_table_circuit_with(optics, phi, &meas, Mode::Wave, MziPhase::ZERO)?;
        let p5 = inconclusive_probability(&t).unwrap_or(f64::INFINITY);
        let scanned = scan_visibility(optics, phi, &meas, 101)?;
        Ok((p5 - v).abs().max((scanned - v).abs()))
    }))
}

fn dark_port(optics: &SignalOptics) -> Outcome {
    worst(
        phi_grid()
            .into_iter()
            .filter(|p| p.degrees() < 45.0 - 1e-9)
            .map(|phi| {
                let meas = measurement_for(MeasurementKind::Usd, phi)?;
                let t =
                    coincidence_table_circuit_with(optics, phi, &meas, Mode::Wave, MziPhase::ZERO)?;
                let half_c2 = 0.5 * (2.0 * phi.radians()).cos().powi(2);
                let get = |l| t.get(SignalDetector::D2, l).unwrap_or(f64::INFINITY);
                Ok(get(IdlerLabel::D5)
                    .abs()
                    .max((get(IdlerLabel::D3) - half_c2).abs())
                    .max((get(IdlerLabel::D4) - half_c2).abs()))
            }),
    )
}

fn duality_identities(optics: &SignalOptics) -> Outcome {
    let sums = full_phi_grid().into_iter().map(|phi| {
        let r = duality_report(phi);
        let mem = measurement_for(MeasurementKind::Mem, phi)?;
        let t = coincidence_table_circuit_with(optics, phi, &mem, Mode::Particle, MziPhase::ZERO)?;
        Ok((r.duality_sum() - 1.0)
            .abs()
            .max((guess_probability(&t)? - r.guess_prob_mem).abs()))
    });
    let usd = phi_grid().into_iter().map(|phi| {
        let r = duality_report(phi);
        let k = r.knowledge.unwrap_or(f64::INFINITY);
        let meas = measurement_for(MeasurementKind::Usd, phi)?;
        let t = coincidence_table_circuit_with(optics, phi, &meas, Mode::Particle, MziPhase::ZERO)?;
        let g = r.guess_prob_usd.unwrap_or(f64::INFINITY);
        Ok((k - (1.0 - r.visibility))
            .abs()
            .max((guess_probability(&t)? - g).abs()))
    });
    worst(sums.chain(usd))
}

fn blend_consistency() -> Outcome {
    let mem = full_phi_grid().into_iter().map(|phi| {
        let rho = signal_rho(phi);
        let meas = measurement_for(MeasurementKind::Mem, phi)?;
        Ok(blend(&subensembles_mem(phi))
            .max_abs_diff(rho.matrix())
            .max(blend(&conditional_signal_states(phi, &meas)).max_abs_diff(rho.matrix()))
            .max(signal_rho_by_trace(phi).max_abs_diff(rho.matrix())))
    });
    let usd = phi_grid().into_iter().map(|phi| {
        let rho = signal_rho(phi);
        let meas = measurement_for(MeasurementKind::Usd, phi)?;
        Ok(blend(&subensembles_usd(phi)?)
            .max_abs_diff(rho.matrix())
            .max(blend(&conditional_signal_states(phi, &meas)).max_abs_diff(rho.matrix())))
    });
    worst(mem.chain(usd))
}

/// Pooled chi-square over the standard grid in particle mode and in wave
/// mode at α = 0, plus the count of sampled means further than four
/// per-trial standard deviations from the table.
fn monte_carlo() -> pathmark_core::Result<(ChiSquareOutcome, f64, usize)> {
    let cfg = RunConfig::new(100_000, 100, 1)?;
    let mut parts = Vec::new();
    let mut outliers = 0;
    for phi in phi_grid() {
        for mode in [Mode::Particle, Mode::Wave] {
            let t =
                coincidence_table_analytic_for(MeasurementKind::Usd, phi, mode, MziPhase::ZERO)?;
            let samples = run_trials(&t, &cfg)?;
            parts.push(chi_square_gof(&t, &samples, cfg.expected_pairs)?);
            let est = summarize(&samples)?;
            for (d, l, p) in t.cells() {
                let c = est.cell(d, l).expect("same cells");
                // round-off in p is not a sampling deviation
                if (c.mean - p).abs() > 4.0 * c.std_dev + ALGEBRA_TOL {
                    outliers += 1;
                }
            }
        }
    }
    let min_p = parts.iter().map(|p| p.p_value).fold(1.0, f64::min);
    Ok((ChiSquareOutcome::combine(&parts)?, min_p, outliers))
}

pub fn run_selfcheck(fault: Option<Fault>) -> Vec<CheckResult> {
    let optics = match fault {
        None => SignalOptics::ideal(),
        Some(Fault::NpbsSign) => SignalOptics::with_flipped_npbs_sign(),
    };
    let algebraic: [(&'static str, Outcome, f64); 7] = [
        (
            "oracle equivalence",
            oracle_equivalence(&optics),
            ALGEBRA_TOL,
        ),
        ("measurement completeness", completeness(), ALGEBRA_TOL),
        ("unambiguity zeros", unambiguity(&optics), ALGEBRA_TOL),
        (
            "inconclusive rate = visibility",
            inconclusive_equals_visibility(&optics),
            COMPOSED_TOL,
        ),
        ("dark port", dark_port(&optics), ALGEBRA_TOL),
        (
            "duality identities",
            duality_identities(&optics),
            ALGEBRA_TOL,
        ),
        ("ensemble blends", blend_consistency(), ALGEBRA_TOL),
    ];
    let mut out: Vec<CheckResult> = algebraic
        .into_iter()
        .map(|(name, v, tol)| match v {
            Ok(w) => check(name, w, tol),
            Err(e) => failed(name, e),
        })
        .collect();
    out.extend(match monte_carlo() {
        Ok((chi, min_p, outliers)) => vec![
            CheckResult {
                name: "monte carlo chi-square",
                passed: chi.passes(CHI_SQUARE_LEVEL),
                detail: format!(
                    "pooled statistic {:.1} on {} dof, p = {:.3e} (level {CHI_SQUARE_LEVEL:.0e}); smallest single p = {min_p:.3e}",
                    chi.statistic, chi.dof, chi.p_value
                ),
            },
            CheckResult {
                name: "monte carlo means",
                passed: outliers == 0,
                detail: format!("{outliers} cell means beyond 4 standard deviations"),
            },
        ],
        Err(e) => vec![failed("monte carlo", e)],
    });
    out
}

pub fn render(results: &[CheckResult]) -> String {
    let width = results.iter().map(|r| r.name.len()).max().unwrap_or(0);
    let mut s = String::new();
    for r in results {
        let tag = if r.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(s, "{tag}  {:width$}  {}", r.name, r.detail);
    }
    let failures = results.iter().filter(|r| !r.passed).count();
    let _ = writeln!(s, "{} checks, {failures} failed", results.len());
    s
}
