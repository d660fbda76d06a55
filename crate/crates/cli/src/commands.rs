//! The `table`, `sweep-phi` and `fringe` commands, each producing a
//! [`Document`] of rows.

use pathmark_core::experiment::{
    coincidence_table_analytic_for, coincidence_table_circuit, duality_report,
    inconclusive_probability, measurement_for, visibility_of, CoincidenceTable,
};
use pathmark_core::stochastic::{estimate_errorbars, mean_and_std, run_trials, ErrorBarEstimate};
use pathmark_core::{MeasurementKind, Mode, MziPhase, RunConfig, SignalDetector, SourceParam};

use crate::error::CliError;
use crate::output::{Cell, Document};
use crate::scenario::Scenario;

/// Provenance columns leading every row.
pub const PROVENANCE: [&str; 7] = [
    "phi_deg",
    "alpha_deg",
    "mode",
    "measurement",
    "pairs",
    "trials",
    "seed",
];

/// Evenly spaced grid of degree values, both ends included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl SweepSpec {
    pub fn new(start: f64, stop: f64, steps: usize) -> Result<Self, CliError> {
        if !(start.is_finite() && stop.is_finite()) || start >= stop {
            return Err(CliError::Usage(format!(
                "sweep needs finite start < stop, got start = {start}, stop = {stop}"
            )));
        }
        if steps < 2 {
            return Err(CliError::Usage(format!(
                "sweep needs at least 2 steps, got {steps}"
            )));
        }
        Ok(SweepSpec { start, stop, steps })
    }

    /// The standard source-angle grid 22.5°, 24°, …, 45°.
    pub fn default_phi() -> Self {
        SweepSpec {
            start: 22.5,
            stop: 45.0,
            steps: 16,
        }
    }

    /// One full fringe period in 3.6° steps.
    pub fn default_alpha() -> Self {
        SweepSpec {
            start: 0.0,
            stop: 360.0,
            steps: 101,
        }
    }

    pub fn points(&self) -> Vec<f64> {
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                if i + 1 == self.steps {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * i as f64 / last
                }
            })
            .collect()
    }
}

/// What `sweep-phi` does with grid points outside the measurement's range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DomainPolicy {
    /// Refuse the whole sweep before computing anything.
    #[default]
    Reject,
    /// Emit a row whose `status` carries the error and whose values are empty.
    Row,
}

fn provenance(s: &Scenario, phi_deg: f64, alpha_deg: f64) -> Vec<Cell> {
    vec![
        Cell::Real(phi_deg),
        Cell::Real(alpha_deg),
        Cell::text(s.mode.as_str()),
        Cell::text(s.measurement.as_str()),
        Cell::Int(s.pairs),
        Cell::Int(s.trials as u64),
        Cell::Int(s.seed),
    ]
}

fn columns_with_provenance(rest: impl IntoIterator<Item = String>) -> Vec<String> {
    PROVENANCE
        .iter()
        .map(|s| s.to_string())
        .chain(rest)
        .collect()
}

fn cell_names(kind: MeasurementKind) -> Vec<String> {
    SignalDetector::ALL
        .iter()
        .flat_map(|d| {
            kind.labels()
                .iter()
                .map(move |l| format!("{}_{}", d, l.ident()))
        })
        .collect()
}

struct Tables {
    analytic: CoincidenceTable,
    circuit: CoincidenceTable,
}

fn tables(s: &Scenario, mode: Mode, phi_deg: f64, alpha_deg: f64) -> Result<Tables, CliError> {
    let phi = SourceParam::from_degrees(phi_deg)?;
    let alpha = MziPhase::from_degrees(alpha_deg);
    let meas = measurement_for(s.measurement, phi)?;
    Ok(Tables {
        analytic: coincidence_table_analytic_for(s.measurement, phi, mode, alpha)?,
        circuit: coincidence_table_circuit(phi, &meas, mode, alpha)?,
    })
}

fn run_config(s: &Scenario) -> Result<Option<RunConfig>, CliError> {
    if s.pairs == 0 {
        return Ok(None);
    }
    if s.trials < 2 {
        return Err(CliError::Domain {
            key: "trials",
            value: s.trials.to_string(),
            range: "[2, ∞) when pairs > 0 (error bars need two trials)".into(),
        });
    }
    Ok(Some(RunConfig::new(s.pairs, s.trials, s.seed)?))
}

fn sampled(s: &Scenario, table: &CoincidenceTable) -> Result<Option<ErrorBarEstimate>, CliError> {
    run_config(s)?
        .map(|cfg| estimate_errorbars(table, &cfg).map_err(CliError::from))
        .transpose()
}

pub fn table_columns() -> Vec<String> {
    columns_with_provenance(
        [
            "signal",
            "idler",
            "analytic",
            "circuit",
            "abs_diff",
            "max_abs_diff",
            "sampled_mean",
            "sampled_std",
        ]
        .map(String::from),
    )
}

/// Analytic and propagated tables side by side, one row per cell.
pub fn cmd_table(s: &Scenario) -> Result<Document, CliError> {
    s.validate()?;
    let t = tables(s, s.mode, s.phi_deg, s.alpha_deg)?;
    let max_diff = t
        .analytic
        .max_abs_diff(&t.circuit)
        .expect("both tables come from the same measurement");
    let est = sampled(s, &t.analytic)?;

    let mut doc = Document::new("table", table_columns());
    for ((d, l, a), (_, _, c)) in t.analytic.cells().zip(t.circuit.cells()) {
        let e = est.as_ref().and_then(|e| e.cell(d, l));
        let mut row = provenance(s, s.phi_deg, s.alpha_deg);
        row.extend([
            Cell::text(d.as_str()),
            Cell::text(l.as_str()),
            Cell::Real(a),
            Cell::Real(c),
            Cell::Real((a - c).abs()),
            Cell::Real(max_diff),
            Cell::opt_real(e.map(|e| e.mean)),
            Cell::opt_real(e.map(|e| e.std_dev)),
        ]);
        doc.push(row);
    }
    Ok(doc)
}

pub fn sweep_phi_columns(kind: MeasurementKind) -> Vec<String> {
    let cells = cell_names(kind);
    let mut rest = vec!["status".to_string()];
    rest.extend(cells.iter().map(|c| format!("p_{c}")));
    for c in &cells {
        rest.push(format!("mean_{c}"));
        rest.push(format!("std_{c}"));
    }
    rest.extend(
        [
            "max_abs_diff",
            "visibility",
            "distinguishability",
            "knowledge",
            "duality_sum",
            "p_inconclusive",
            "guess_usd",
            "guess_mem",
        ]
        .map(String::from),
    );
    columns_with_provenance(rest)
}

/// One row per source angle: every coincidence cell, sampled estimates and
/// the visibility/distinguishability/knowledge figures.
pub fn cmd_sweep_phi(
    spec: &SweepSpec,
    s: &Scenario,
    policy: DomainPolicy,
) -> Result<Document, CliError> {
    s.validate_without_phi()?;
    let points = spec.points();
    if policy == DomainPolicy::Reject {
        for &p in &points {
            s.validate_phi(p)?;
        }
    }
    let columns = sweep_phi_columns(s.measurement);
    let width = columns.len();
    let mut doc = Document::new("sweep-phi", columns);

    for phi_deg in points {
        let mut row = provenance(s, phi_deg, s.alpha_deg);
        if let Err(e) = s.validate_phi(phi_deg) {
            row.push(Cell::text(format!("error: {e}")));
            row.resize(width, Cell::Empty);
            doc.push(row);
            continue;
        }
        let t = tables(s, s.mode, phi_deg, s.alpha_deg)?;
        let est = sampled(s, &t.analytic)?;
        let report = duality_report(SourceParam::from_degrees(phi_deg)?);

        row.push(Cell::text("ok"));
        row.extend(t.analytic.cells().map(|(_, _, p)| Cell::Real(p)));
        for (d, l, _) in t.analytic.cells() {
            let e = est.as_ref().and_then(|e| e.cell(d, l));
            row.push(Cell::opt_real(e.map(|e| e.mean)));
            row.push(Cell::opt_real(e.map(|e| e.std_dev)));
        }
        row.extend([
            Cell::Real(t.analytic.max_abs_diff(&t.circuit).unwrap_or(f64::NAN)),
            Cell::Real(report.visibility),
            Cell::Real(report.distinguishability),
            Cell::opt_real(report.knowledge),
            Cell::Real(report.duality_sum()),
            Cell::opt_real(inconclusive_probability(&t.analytic)),
            Cell::opt_real(report.guess_prob_usd),
            Cell::Real(report.guess_prob_mem),
        ]);
        doc.push(row);
    }
    Ok(doc)
}

pub fn fringe_columns(kind: MeasurementKind) -> Vec<String> {
    let mut rest = vec!["prob_D1".to_string(), "prob_D2".to_string()];
    rest.extend(
        kind.labels()
            .iter()
            .map(|l| format!("cond_D1_{}", l.ident())),
    );
    rest.extend(["visibility_fit", "mean_D1", "std_D1", "visibility_sampled"].map(String::from));
    columns_with_provenance(rest)
}

/// One row per interferometer phase: detector probabilities, the D1 fringe
/// conditioned on each idler outcome, and the visibility fitted over the scan.
pub fn cmd_fringe(spec: &SweepSpec, s: &Scenario) -> Result<Document, CliError> {
    if s.mode != Mode::Wave {
        return Err(CliError::Usage(
            "fringe needs mode = wave; particle mode has no interference".into(),
        ));
    }
    s.validate()?;
    let cfg = run_config(s)?;
    let labels = s.measurement.labels();

    struct Point {
        alpha_deg: f64,
        table: CoincidenceTable,
        sampled: Option<(f64, f64)>,
    }
    let points = spec
        .points()
        .into_iter()
        .map(|alpha_deg| {
            let table = tables(s, Mode::Wave, s.phi_deg, alpha_deg)?.analytic;
            let sampled = match &cfg {
                Some(cfg) => {
                    let d1: Vec<f64> = run_trials(&table, cfg)?
                        .iter()
                        .filter(|r| r.total > 0)
                        .map(|r| {
                            let hits: u64 = r
                                .cells
                                .iter()
                                .filter(|c| c.signal == SignalDetector::D1)
                                .map(|c| c.count)
                                .sum();
                            hits as f64 / r.total as f64
                        })
                        .collect();
                    Some(mean_and_std(&d1))
                }
                None => None,
            };
            Ok(Point {
                alpha_deg,
                table,
                sampled,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let d1: Vec<f64> = points
        .iter()
        .map(|p| p.table.signal_marginal(SignalDetector::D1))
        .collect();
    let v_fit = visibility_of(&d1);
    let v_sampled = cfg.map(|_| {
        let means: Vec<f64> = points
            .iter()
            .filter_map(|p| p.sampled.map(|s| s.0))
            .collect();
        visibility_of(&means)
    });

    let mut doc = Document::new("fringe", fringe_columns(s.measurement));
    for p in &points {
        let mut row = provenance(s, s.phi_deg, p.alpha_deg);
        row.push(Cell::Real(p.table.signal_marginal(SignalDetector::D1)));
        row.push(Cell::Real(p.table.signal_marginal(SignalDetector::D2)));
        for &l in labels {
            let both = p.table.idler_marginal(l).unwrap_or(0.0);
            let hit = p.table.get(SignalDetector::D1, l).unwrap_or(0.0);
            row.push(if both > pathmark_core::experiment::NEGLIGIBLE_WEIGHT {
                Cell::Real(hit / both)
            } else {
                Cell::Empty
            });
        }
        row.push(Cell::Real(v_fit));
        row.push(Cell::opt_real(p.sampled.map(|s| s.0)));
        row.push(Cell::opt_real(p.sampled.map(|s| s.1)));
        row.push(Cell::opt_real(v_sampled));
        doc.push(row);
    }
    Ok(doc)
}
