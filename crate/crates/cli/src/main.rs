use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use qubit_bundle::bundle::extract_with;
use qubit_bundle::dynamics::{continuity, coordinate_trajectory, evolve, Coordinates};
use qubit_bundle::extremes::{bell_table, factor_unentangled_with, rotation_from_state_with};
use qubit_bundle::verify::{run_suite, SuiteConfig};
use qubit_bundle::wire::{self, WireError};
use qubit_bundle::{classify_with, Stratum, Tolerances, TwoQubitState};

/// Entanglement strata, coordinates and trajectories for two-qubit pure states.
#[derive(Parser)]
#[command(name = "qubit-bundle", version)]
struct Cli {
    /// Classification threshold on the concurrence.
    #[arg(long, global = true, env = "QUBIT_BUNDLE_TOL", value_parser = parse_tol)]
    tol: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Concurrence, eta and stratum of a state.
    Classify {
        /// State JSON, inline or a file path.
        #[arg(long)]
        state: String,
    },
    /// Coordinates appropriate to the state's stratum.
    Coords {
        #[arg(long)]
        state: String,
    },
    /// State described by a coordinate object.
    Reconstruct {
        /// Coordinate JSON, inline or a file path.
        #[arg(long)]
        coords: String,
    },
    /// The identity and the three half-turns with their Bell states.
    Bell,
    /// Evolve a state and write its coordinate trajectory as CSV.
    Evolve {
        /// Hamiltonian JSON, inline or a file path.
        #[arg(long)]
        hamiltonian: String,
        #[arg(long)]
        state: String,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        t0: f64,
        #[arg(long, allow_hyphen_values = true)]
        t1: f64,
        #[arg(long, allow_hyphen_values = true)]
        dt: f64,
        /// Output CSV path; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the randomized property suite.
    Verify {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Trials per property.
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
    },
}

fn parse_tol(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x.is_finite() && x > 0.0 && x < 0.5 => Ok(x),
        Ok(_) => Err("tolerance must lie in (0, 0.5)".into()),
        Err(e) => Err(e.to_string()),
    }
}

enum Failure {
    Parse(String),
    Domain(String),
    Verification,
}

impl From<WireError> for Failure {
    fn from(e: WireError) -> Self {
        match e {
            WireError::Invalid(inner) => Failure::Domain(inner.to_string()),
            other => Failure::Parse(other.to_string()),
        }
    }
}

impl From<qubit_bundle::Error> for Failure {
    fn from(e: qubit_bundle::Error) -> Self {
        Failure::Domain(e.to_string())
    }
}

fn io_failure(context: &str, e: io::Error) -> Failure {
    Failure::Parse(format!("{context}: {e}"))
}

/// Inline JSON when the argument starts with `{`, otherwise a file path.
fn read_input(arg: &str) -> Result<String, Failure> {
    if arg.trim_start().starts_with('{') {
        Ok(arg.to_owned())
    } else {
        fs::read_to_string(arg).map_err(|e| io_failure(arg, e))
    }
}

fn read_state(arg: &str) -> Result<TwoQubitState, Failure> {
    Ok(wire::parse_state(&read_input(arg)?)?)
}

fn print_line(text: &str) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    writeln!(out, "{text}").map_err(|e| io_failure("stdout", e))
}

fn run(cli: Cli) -> Result<(), Failure> {
    let tol = cli.tol.map_or_else(Tolerances::default, Tolerances::with_class);
    match cli.command {
        Command::Classify { state } => {
            let class = classify_with(&read_state(&state)?, tol.class);
            let report = json!({
                "concurrence": class.concurrence,
                "eta": class.eta,
                "stratum": class.stratum.as_str(),
            });
            print_line(&report.to_string())
        }
        Command::Coords { state } => {
            let s = read_state(&state)?;
            let coords = match classify_with(&s, tol.class).stratum {
                Stratum::Unentangled => Coordinates::Unentangled(factor_unentangled_with(&s, &tol)?),
                Stratum::Partial => Coordinates::Partial(extract_with(&s, None, &tol)?),
                Stratum::Full => Coordinates::Full(rotation_from_state_with(&s, &tol)?),
            };
            print_line(&wire::format_coordinates(&coords))
        }
        Command::Reconstruct { coords } => {
            let parsed = wire::parse_coordinates(&read_input(&coords)?)?;
            print_line(&wire::format_state(&wire::coordinates_to_state(&parsed, &tol)?))
        }
        Command::Bell => {
            let rows: Vec<Value> = bell_table()
                .iter()
                .map(|e| {
                    json!({
                        "name": e.name,
                        "axis": e.rotation.axis(),
                        "angle": e.rotation.angle(),
                        "amplitudes": e.state.amplitudes().map(|a| [a.re, a.im]),
                    })
                })
                .collect();
            print_line(&Value::Array(rows).to_string())
        }
        Command::Evolve {
            hamiltonian,
            state,
            t0,
            t1,
            dt,
            out,
        } => {
            let h = wire::parse_generator(&read_input(&hamiltonian)?)?;
            let initial = read_state(&state)?;
            let run = evolve(&h, &initial, t0, t1, dt)?;
            let points = coordinate_trajectory(&run, &tol)?;
            let written = match &out {
                Some(path) => {
                    let file = File::create(path).map_err(|e| io_failure(&path.display().to_string(), e))?;
                    wire::write_trajectory_csv(&points, BufWriter::new(file))
                }
                None => wire::write_trajectory_csv(&points, io::stdout().lock()),
            };
            written.map_err(|e| Failure::Parse(format!("writing trajectory: {e}")))?;
            let report = continuity(&points);
            eprintln!(
                "points={} chart_switches={} stratum_changes={} max_step={:.3e} max_switch_error={:.3e}",
                points.len(),
                report.chart_switches,
                report.stratum_changes,
                report.max_step,
                report.max_switch_error
            );
            Ok(())
        }
        Command::Verify { seed, n } => {
            let mut cfg = SuiteConfig::new(seed, n as usize);
            cfg.tol = tol;
            let reports = run_suite(&cfg);
            for r in &reports {
                print_line(&r.to_string())?;
            }
            let failed = reports.iter().filter(|r| !r.passed()).count();
            print_line(&format!(
                "{} of {} properties passed (seed={seed}, n={n})",
                reports.len() - failed,
                reports.len()
            ))?;
            if failed == 0 {
                Ok(())
            } else {
                Err(Failure::Verification)
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Parse(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Verification) => ExitCode::from(4),
    }
}
