//! Command-line front end.
//!
//! Exit statuses: 0 success, 1 configuration error, 2 runtime error,
//! 3 polarization did not complete.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::protocols::{self, Scheme, TraceOptions};
use crate::rng::{RngStream, Stream};
use crate::spectrum;
use crate::state::StateVector;
use crate::{plot, statefile, trace};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;
pub const EXIT_INCOMPLETE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "chaincool", version, about = "Measurement-feedback cooling of spin-1/2 chains")]
struct Cli {
    /// key=value run configuration
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Overrides the config seed
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output path (trace CSV, state dump, or SVG depending on the command)
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Ground state of the bare chain: energy, gap, and a state dump
    GroundState,
    /// Polarization phase only, from a random initial state
    Polarize {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        scheme: u8,
        /// Where to dump the polarized state
        #[arg(long, default_value = "polarized.bin")]
        state_out: PathBuf,
    },
    /// Field ramp from a dumped state, starting at ramp_start
    Adiabatic {
        #[arg(long = "in")]
        input: PathBuf,
        /// Picks the default ramp constant (1: 1e4 s, 2: 8e3 s)
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
        scheme: u8,
        #[arg(long, default_value = "final.bin")]
        state_out: PathBuf,
    },
    /// Random state, polarization, then the field ramp
    Full {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        scheme: u8,
    },
    /// SVG line chart of one trace column against time
    Plot {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        col: String,
    },
}

/// Formats with four significant digits.
pub fn four_significant(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (3 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

fn load_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            RunConfig::parse(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn out_path(cli: &Cli, cfg: &RunConfig, fallback: &str) -> PathBuf {
    cli.out
        .clone()
        .or_else(|| cfg.out_path.clone())
        .unwrap_or_else(|| PathBuf::from(fallback))
}

fn scheme_of(n: u8) -> Scheme {
    Scheme::from_number(n).expect("clap restricts the range")
}

fn bare_ground(cfg: &RunConfig) -> Result<spectrum::GroundStateReport> {
    let mut rng = RngStream::substream(cfg.seed, Stream::Eigensolver);
    let report = spectrum::ground_state_with_gap(
        &cfg.bare_hamiltonian()?,
        spectrum::DEFAULT_TOLERANCE,
        spectrum::DEFAULT_MAX_ITER,
        &mut rng,
    )?;
    log::info!(
        "ground state E0 = {:.10} (gap {:.3e}, {} applications)",
        report.ground.energy,
        report.gap(),
        report.ground.iterations
    );
    Ok(report)
}

/// Runs the command; `Ok(false)` means polarization did not complete.
fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<bool> {
    let cfg = load_config(cli)?;
    let io_err = |e: std::io::Error| Error::io("<stdout>", e);
    match &cli.command {
        Command::GroundState => {
            let report = bare_ground(&cfg)?;
            let path = out_path(cli, &cfg, "ground_state.bin");
            statefile::write_state(&report.ground.state, &path)?;
            writeln!(stdout, "energy {}", four_significant(report.ground.energy)).map_err(io_err)?;
            writeln!(stdout, "energy_full {:.10}", report.ground.energy).map_err(io_err)?;
            writeln!(stdout, "first_excited {:.10}", report.first_excited).map_err(io_err)?;
            writeln!(stdout, "gap {:.10}", report.gap()).map_err(io_err)?;
            writeln!(stdout, "residual {:e}", report.ground.residual).map_err(io_err)?;
            writeln!(stdout, "state {}", path.display()).map_err(io_err)?;
            Ok(true)
        }
        Command::Polarize { scheme, state_out } => {
            let scheme = scheme_of(*scheme);
            let ctx = cfg.context(scheme)?;
            let ground = bare_ground(&cfg)?;
            let mut rng = RngStream::substream(cfg.seed, Stream::InitialState);
            let psi0 = StateVector::random_infinite_temperature(cfg.n_spins, &mut rng)?;
            let opts = TraceOptions {
                start_step: 0,
                sample_every: cfg.sample_every,
                reference: Some(&ground.ground.state),
            };
            let out = match scheme {
                Scheme::RandomTarget => protocols::run_scheme1(&ctx, &cfg.scheme1(), &psi0, opts)?,
                Scheme::Probe => protocols::run_scheme2(&ctx, &cfg.scheme2(), &psi0, opts)?,
            };
            let path = out_path(cli, &cfg, "trace.csv");
            trace::write_trace(&out.trace, &path)?;
            statefile::write_state(&out.state, state_out)?;
            writeln!(stdout, "rounds {}", out.rounds).map_err(io_err)?;
            writeln!(stdout, "completed {}", out.completed).map_err(io_err)?;
            writeln!(stdout, "mz {:.6}", out.state.magnetization_z()).map_err(io_err)?;
            writeln!(stdout, "end_time {:.3}", ctx.time_at(out.end_step)).map_err(io_err)?;
            Ok(out.completed)
        }
        Command::Adiabatic {
            input,
            scheme,
            state_out,
        } => {
            let scheme = scheme_of(*scheme);
            let ctx = cfg.context(scheme)?;
            let psi0 = statefile::read_state(input)?;
            if psi0.n_spins() != cfg.n_spins {
                return Err(Error::Config(format!(
                    "{} holds {} spins but the config says n_spins={}",
                    input.display(),
                    psi0.n_spins(),
                    cfg.n_spins
                )));
            }
            let ground = bare_ground(&cfg)?;
            let opts = TraceOptions {
                start_step: ctx.steps_for(cfg.ramp_start),
                sample_every: cfg.sample_every,
                reference: None,
            };
            let out = protocols::run_adiabatic(
                &ctx,
                &cfg.adiabatic(scheme),
                &psi0,
                &ground.ground.state,
                opts,
            )?;
            let path = out_path(cli, &cfg, "trace.csv");
            trace::write_trace(&out.trace, &path)?;
            statefile::write_state(&out.state, state_out)?;
            writeln!(stdout, "e0 {:.6}", ctx.bare_energy(&out.state)?).map_err(io_err)?;
            writeln!(
                stdout,
                "fidelity {:.6}",
                ground.ground.state.fidelity(&out.state)?
            )
            .map_err(io_err)?;
            writeln!(stdout, "reference_energy {:.6}", ground.ground.energy).map_err(io_err)?;
            Ok(true)
        }
        Command::Full { scheme } => {
            let scheme = scheme_of(*scheme);
            let ctx = cfg.context(scheme)?;
            let ground = bare_ground(&cfg)?;
            let out = protocols::run_full(&ctx, &cfg.full(scheme), Some(&ground.ground))?;
            let path = out_path(cli, &cfg, "trace.csv");
            trace::write_trace(&out.trace, &path)?;
            let s = &out.summary;
            writeln!(stdout, "final_e0 {:.6}", s.final_bare_energy).map_err(io_err)?;
            writeln!(stdout, "fidelity {:.6}", s.final_fidelity).map_err(io_err)?;
            writeln!(stdout, "reference_energy {:.6}", s.reference_energy).map_err(io_err)?;
            writeln!(stdout, "polarization {:.6}", s.polarization_fraction).map_err(io_err)?;
            writeln!(stdout, "polarization_completed {}", s.polarization_completed)
                .map_err(io_err)?;
            writeln!(stdout, "elapsed {:.3}", s.elapsed).map_err(io_err)?;
            Ok(s.polarization_completed)
        }
        Command::Plot { input, col } => {
            let (ts, ys) = trace::read_column(input, col)?;
            let svg = plot::line_chart(&ts, &ys, "t (s)", col);
            match cli.out.as_deref() {
                Some(path) => write_file(path, &svg)?,
                None => stdout.write_all(svg.as_bytes()).map_err(io_err)?,
            }
            Ok(true)
        }
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Parses `argv` (program name first), runs the command, and returns the
/// process exit status. Diagnostics go to stderr.
pub fn dispatch<I, T>(argv: I, stdout: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli, stdout) {
        Ok(true) => EXIT_OK,
        Ok(false) => {
            eprintln!("polarization did not complete");
            EXIT_INCOMPLETE
        }
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config() {
                EXIT_CONFIG
            } else {
                EXIT_RUNTIME
            }
        }
    }
}
