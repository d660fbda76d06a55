//! Scenario configuration: defaults, a flat `key = value` file format, and
//! command-line overrides (flags > file > defaults).

use std::str::FromStr;

use pathmark_core::{MeasurementKind, Mode};

use crate::error::CliError;

pub const KEYS: [&str; 7] = [
    "phi_deg",
    "alpha_deg",
    "mode",
    "measurement",
    "pairs",
    "trials",
    "seed",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub phi_deg: f64,
    pub alpha_deg: f64,
    pub mode: Mode,
    pub measurement: MeasurementKind,
    /// Mean pair count per simulated run; 0 turns sampling off.
    pub pairs: u64,
    pub trials: usize,
    pub seed: u64,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            phi_deg: 30.0,
            alpha_deg: 0.0,
            mode: Mode::Wave,
            measurement: MeasurementKind::Usd,
            pairs: pathmark_core::stochastic::DEFAULT_EXPECTED_PAIRS,
            trials: 100,
            seed: 1,
        }
    }
}

/// A partial scenario, as read from a file or from flags.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ScenarioOverrides {
    pub phi_deg: Option<f64>,
    pub alpha_deg: Option<f64>,
    pub mode: Option<Mode>,
    pub measurement: Option<MeasurementKind>,
    pub pairs: Option<u64>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
}

impl ScenarioOverrides {
    pub fn apply_to(&self, s: &mut Scenario) {
        if let Some(v) = self.phi_deg {
            s.phi_deg = v;
        }
        if let Some(v) = self.alpha_deg {
            s.alpha_deg = v;
        }
        if let Some(v) = self.mode {
            s.mode = v;
        }
        if let Some(v) = self.measurement {
            s.measurement = v;
        }
        if let Some(v) = self.pairs {
            s.pairs = v;
        }
        if let Some(v) = self.trials {
            s.trials = v;
        }
        if let Some(v) = self.seed {
            s.seed = v;
        }
    }
}

pub fn parse_mode(s: &str) -> Result<Mode, String> {
    match s {
        "particle" => Ok(Mode::Particle),
        "wave" => Ok(Mode::Wave),
        other => Err(format!(
            "unknown mode '{other}' (expected particle or wave)"
        )),
    }
}

pub fn parse_measurement(s: &str) -> Result<MeasurementKind, String> {
    match s {
        "usd" => Ok(MeasurementKind::Usd),
        "mem" => Ok(MeasurementKind::Mem),
        "erasure" => Ok(MeasurementKind::Erasure),
        other => Err(format!(
            "unknown measurement '{other}' (expected usd, mem or erasure)"
        )),
    }
}

fn parse_number<T: FromStr>(key: &str, value: &str, line: usize) -> Result<T, CliError> {
    value.parse().map_err(|_| CliError::Parse {
        line,
        message: format!("cannot parse '{value}' as a value for {key}"),
    })
}

/// Parses the `key = value` format: one pair per line, `#` starts a comment,
/// keys are the [`Scenario`] field names, each at most once.
pub fn parse_scenario(text: &str) -> Result<ScenarioOverrides, CliError> {
    let mut out = ScenarioOverrides::default();
    let mut seen = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(CliError::Parse {
                line,
                message: format!("expected 'key = value', found '{content}'"),
            });
        };
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.contains(&key) {
            return Err(CliError::Parse {
                line,
                message: format!("unknown key '{key}' (valid keys: {})", KEYS.join(", ")),
            });
        }
        if seen.contains(&key) {
            return Err(CliError::Parse {
                line,
                message: format!("duplicate key '{key}'"),
            });
        }
        seen.push(key);
        let bad = |message| CliError::Parse { line, message };
        match key {
            "phi_deg" => out.phi_deg = Some(parse_number(key, value, line)?),
            "alpha_deg" => out.alpha_deg = Some(parse_number(key, value, line)?),
            "mode" => out.mode = Some(parse_mode(value).map_err(bad)?),
            "measurement" => out.measurement = Some(parse_measurement(value).map_err(bad)?),
            "pairs" => out.pairs = Some(parse_number(key, value, line)?),
            "trials" => out.trials = Some(parse_number(key, value, line)?),
            "seed" => out.seed = Some(parse_number(key, value, line)?),
            _ => unreachable!("key checked against KEYS"),
        }
    }
    Ok(out)
}

impl Scenario {
    /// Defaults, then the config file, then the flags.
    pub fn resolve(file: Option<&ScenarioOverrides>, flags: &ScenarioOverrides) -> Scenario {
        let mut s = Scenario::default();
        if let Some(f) = file {
            f.apply_to(&mut s);
        }
        flags.apply_to(&mut s);
        s
    }

    /// Checks every field, including the source angle.
    pub fn validate(&self) -> Result<(), CliError> {
        self.validate_phi(self.phi_deg)?;
        self.validate_without_phi()
    }

    /// Checks every field except the source angle (for sweeps over it).
    pub fn validate_without_phi(&self) -> Result<(), CliError> {
        if !self.alpha_deg.is_finite() {
            return Err(CliError::Domain {
                key: "alpha_deg",
                value: self.alpha_deg.to_string(),
                range: "any finite angle".into(),
            });
        }
        if self.trials < 1 {
            return Err(CliError::Domain {
                key: "trials",
                value: self.trials.to_string(),
                range: "[1, ∞)".into(),
            });
        }
        Ok(())
    }

    /// Checks a source angle against the range the measurement allows.
    pub fn validate_phi(&self, phi_deg: f64) -> Result<(), CliError> {
        let (lo, hi, why) = match self.measurement {
            MeasurementKind::Usd => (22.5, 45.0, " required by measurement = usd"),
            _ => (0.0, 45.0, ""),
        };
        // 1e-9° slack matches the radian slack of the core library
        if !phi_deg.is_finite() || phi_deg < lo - 1e-9 || phi_deg > hi + 1e-9 {
            return Err(CliError::Domain {
                key: "phi_deg",
                value: phi_deg.to_string(),
                range: format!("[{lo}, {hi}]{why}"),
            });
        }
        Ok(())
    }

    /// Canonical file form; [`parse_scenario`] reads it back unchanged.
    pub fn to_config_string(&self) -> String {
        format!(
            "phi_deg = {}\nalpha_deg = {}\nmode = {}\nmeasurement = {}\npairs = {}\ntrials = {}\nseed = {}\n",
            self.phi_deg,
            self.alpha_deg,
            self.mode,
            self.measurement,
            self.pairs,
            self.trials,
            self.seed
        )
    }
}
