use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pathmark_core::{MeasurementKind, Mode};

use pathmark_cli::commands::{cmd_fringe, cmd_sweep_phi, cmd_table};
use pathmark_cli::scenario::{parse_measurement, parse_mode, parse_scenario};
use pathmark_cli::selfcheck::{render, run_selfcheck, Fault};
use pathmark_cli::{CliError, Document, DomainPolicy, Scenario, ScenarioOverrides, SweepSpec};

/// Two-path interferometer with entangled-photon path marking.
#[derive(Parser)]
#[command(name = "pathmark", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Coincidence table for one scenario, analytic next to propagated.
    Table {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Coincidences and duality figures over a grid of source angles.
    SweepPhi {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        sweep: SweepArgs,
        /// How to treat grid points outside the measurement's φ range.
        #[arg(long, value_enum, default_value_t = OnDomainError::Reject)]
        on_domain_error: OnDomainError,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Detector fringes over a grid of interferometer phases (wave mode).
    Fringe {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[command(flatten)]
        sweep: SweepArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the invariant suite; exits 3 if any check fails.
    Selfcheck {
        #[arg(long, hide = true, value_parser = Fault::parse)]
        inject_fault: Option<Fault>,
    },
}

#[derive(Args)]
struct ScenarioArgs {
    /// Key = value scenario file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Pump wave-plate angle φ in degrees.
    #[arg(long, allow_negative_numbers = true)]
    phi_deg: Option<f64>,
    /// Interferometer phase α in degrees.
    #[arg(long, allow_negative_numbers = true)]
    alpha_deg: Option<f64>,
    /// particle or wave.
    #[arg(long, value_parser = parse_mode)]
    mode: Option<Mode>,
    /// usd, mem or erasure.
    #[arg(long, value_parser = parse_measurement)]
    measurement: Option<MeasurementKind>,
    /// Mean pairs per simulated run; 0 disables sampling.
    #[arg(long)]
    pairs: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, allow_negative_numbers = true)]
    start: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    stop: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
}

#[derive(Args)]
struct OutputArgs {
    /// Write JSON instead of CSV.
    #[arg(long)]
    json: bool,
    /// Output file (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OnDomainError {
    Reject,
    Row,
}

impl ScenarioArgs {
    fn resolve(&self) -> Result<Scenario, CliError> {
        let file = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
                Some(parse_scenario(&text)?)
            }
            None => None,
        };
        let flags = ScenarioOverrides {
            phi_deg: self.phi_deg,
            alpha_deg: self.alpha_deg,
            mode: self.mode,
            measurement: self.measurement,
            pairs: self.pairs,
            trials: self.trials,
            seed: self.seed,
        };
        Ok(Scenario::resolve(file.as_ref(), &flags))
    }
}

impl SweepArgs {
    fn spec(&self, default: SweepSpec) -> Result<SweepSpec, CliError> {
        SweepSpec::new(
            self.start.unwrap_or(default.start),
            self.stop.unwrap_or(default.stop),
            self.steps.unwrap_or(default.steps),
        )
    }
}

fn io_error(path: &Path, source: io::Error) -> CliError {
    CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn emit(doc: &Document, out: &OutputArgs) -> Result<(), CliError> {
    let write = |w: &mut dyn Write| -> io::Result<()> {
        if out.json {
            doc.write_json(&mut *w)?;
        } else {
            doc.write_csv(&mut *w)?;
        }
        w.flush()
    };
    match &out.out {
        Some(path) => {
            let file = File::create(path).map_err(|e| io_error(path, e))?;
            write(&mut BufWriter::new(file)).map_err(|e| io_error(path, e))
        }
        None => match write(&mut io::stdout().lock()) {
            // a closed pipe (`| head`) is not an error
            Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
            r => r.map_err(|e| io_error(Path::new("<stdout>"), e)),
        },
    }
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    match cli.command {
        Command::Table { scenario, output } => {
            emit(&cmd_table(&scenario.resolve()?)?, &output)?;
        }
        Command::SweepPhi {
            scenario,
            sweep,
            on_domain_error,
            output,
        } => {
            let policy = match on_domain_error {
                OnDomainError::Reject => DomainPolicy::Reject,
                OnDomainError::Row => DomainPolicy::Row,
            };
            let spec = sweep.spec(SweepSpec::default_phi())?;
            emit(
                &cmd_sweep_phi(&spec, &scenario.resolve()?, policy)?,
                &output,
            )?;
        }
        Command::Fringe {
            scenario,
            sweep,
            output,
        } => {
            let spec = sweep.spec(SweepSpec::default_alpha())?;
            emit(&cmd_fringe(&spec, &scenario.resolve()?)?, &output)?;
        }
        Command::Selfcheck { inject_fault } => {
            let results = run_selfcheck(inject_fault);
            print!("{}", render(&results));
            if results.iter().any(|r| !r.passed) {
                return Ok(ExitCode::from(3));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("invalid arguments");
            eprintln!("pathmark: {}", first.trim_start_matches("error: "));
            return ExitCode::from(2);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("pathmark: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
