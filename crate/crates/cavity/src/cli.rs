//! Command-line front end.
//!
//! Exit codes: 0 success (all comparisons passed), 1 a comparison failed or
//! a numerical routine broke down, 2 usage error (bad flag, violated
//! parameter bound, missing strict damping, unwritable output), 3 the
//! truncation guard stopped the run.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{Map, Value};

use crate::error::CavityError;
use crate::harness::emit::{dataset_json, report_json, reports_dataset, write_csv, write_json};
use crate::harness::{
    analytic_dataset, compare_suite, figure1_dataset, run_sweep, simulate_dataset, AnalyticQuantity, Dataset,
    SweepParam, SweepQuantity, SweepSpec, DEFAULT_SIM_TOL,
};
use crate::model::{CavityParams, InitialStateSpec, DEFAULT_CUTOFF};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_TRUNCATION: i32 = 3;

const FIGURE1_CUTOFF: usize = 64;
const FIGURE1_STEPS: u64 = 60;
const DEFAULT_STEPS: u64 = 8;

#[derive(Debug, Parser)]
#[command(
    name = "cavity",
    version,
    about = "Repeated-interaction cavity: simulation, closed forms and their comparison",
    long_about = "Repeated-interaction cavity: simulation, closed forms and their comparison.\n\n\
        Units: the model is unitless. Angles (the coherent phase) are in radians; \
        eps, lambda and the atom energy are frequencies; sigma_minus and sigma_plus \
        are rates in inverse units of the time in which tau is given.\n\n\
        Exit codes: 0 ok, 1 failed comparison, 2 usage error, 3 truncation guard."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Propagate the cavity state and print per-step observables.
    Simulate(RunArgs),
    /// Evaluate closed-form predictions.
    Analytic {
        #[command(flatten)]
        run: RunArgs,
        /// Comma-separated quantities: photons, first_moment, energy, entropy,
        /// growth, limit, bounds, energy_limit, weyl_limit.
        #[arg(long, value_delimiter = ',', default_value = "photons,first_moment")]
        quantity: Vec<String>,
    },
    /// Check simulation against every closed form, step by step.
    Compare(RunArgs),
    /// Evaluate closed forms over a grid of one parameter.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// Parameter to vary: eps, lambda, tau, p, sigma_minus, sigma_plus, atom_energy.
        #[arg(long)]
        vary: String,
        /// Grid values, comma separated, strictly monotone.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required_unless_present = "range")]
        grid: Vec<f64>,
        /// Evenly spaced grid `start,stop,count` (alternative to --grid).
        #[arg(long, conflicts_with = "grid")]
        range: Option<String>,
        /// Comma-separated quantities: growth_ideal, growth_open, energy_step_ideal,
        /// photons_ideal, photons_open, limit_open, energy_open.
        #[arg(long, value_delimiter = ',', default_value = "photons_ideal,photons_open")]
        quantity: Vec<String>,
    },
    /// Ideal vs open photon number for the reference parameter set (truncation 64, 60 steps by default).
    Figure1(RunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// sigma_minus = sigma_plus = 0, unitary flights.
    Ideal,
    /// Leaking and pumping cavity.
    Open,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

fn positive(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("must be > 0, got {v}"))
    }
}

fn non_negative(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if v >= 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("must be >= 0, got {v}"))
    }
}

fn finite(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("must be finite, got {v}"))
    }
}

fn probability(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("must lie in [0, 1], got {v}"))
    }
}

fn cutoff(s: &str) -> Result<usize, String> {
    let v: usize = s.parse().map_err(|_| format!("'{s}' is not a non-negative integer"))?;
    if v >= 1 {
        Ok(v)
    } else {
        Err("must be >= 1".into())
    }
}

fn substeps(s: &str) -> Result<u32, String> {
    let v: u32 = s.parse().map_err(|_| format!("'{s}' is not a non-negative integer"))?;
    if v >= 1 {
        Ok(v)
    } else {
        Err("must be >= 1".into())
    }
}

fn init_spec(s: &str) -> Result<InitialStateSpec, String> {
    s.parse::<InitialStateSpec>().map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// ideal or open; inferred from the rates when omitted.
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// Cavity frequency ε (> 0).
    #[arg(long, default_value = "1", value_parser = positive, allow_negative_numbers = true)]
    pub eps: f64,
    /// Atom-cavity coupling λ.
    #[arg(long, default_value = "1", value_parser = finite, allow_hyphen_values = true)]
    pub lambda: f64,
    /// Interaction time τ per atom (> 0).
    #[arg(long, default_value = "3.141592653589793", value_parser = positive, allow_negative_numbers = true)]
    pub tau: f64,
    /// Probability that an incoming atom is excited, in [0, 1].
    #[arg(long, default_value = "0.5", value_parser = probability, allow_negative_numbers = true)]
    pub p: f64,
    /// Leak rate σ− (>= 0).
    #[arg(long, default_value = "0", value_parser = non_negative, allow_negative_numbers = true)]
    pub sigma_minus: f64,
    /// Pump rate σ+ (>= 0).
    #[arg(long, default_value = "0", value_parser = non_negative, allow_negative_numbers = true)]
    pub sigma_plus: f64,
    /// Excitation energy E of an atom (>= 0).
    #[arg(long, default_value = "1", value_parser = non_negative, allow_negative_numbers = true)]
    pub atom_energy: f64,
    /// Initial cavity state: vacuum, gibbs:<beta> or coherent:<r>,<phi> (phi in radians).
    #[arg(long, default_value = "vacuum", value_parser = init_spec)]
    pub init: InitialStateSpec,
    /// Fock cutoff M (levels 0..=M).
    #[arg(long, value_parser = cutoff)]
    pub trunc: Option<usize>,
    /// Number of atoms n.
    #[arg(long)]
    pub steps: Option<u64>,
    /// Samples per interaction interval (simulate); boundary values do not depend on it.
    #[arg(long, default_value = "1", value_parser = substeps)]
    pub substeps: u32,
    /// Comparison tolerance (> 0).
    #[arg(long, default_value_t = DEFAULT_SIM_TOL, value_parser = positive, allow_negative_numbers = true)]
    pub tol: f64,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

impl RunArgs {
    pub fn params(&self) -> Result<CavityParams, CavityError> {
        let params = CavityParams::new(self.eps, self.lambda, self.tau, self.p, self.sigma_minus, self.sigma_plus)?
            .with_atom_energy(self.atom_energy)?;
        if self.mode == Some(Mode::Ideal) && !params.is_ideal() {
            return Err(CavityError::InvalidParameter(
                "--mode ideal requires sigma_minus = sigma_plus = 0".into(),
            ));
        }
        // Zero rates under `--mode open` are the ideal cavity; both paths agree on it.
        Ok(params)
    }
}

/// Raw flag strings exactly as given, keyed by flag name.
fn echo_flags(argv: &[String]) -> Value {
    let mut flags = Map::new();
    let mut i = 0;
    while i < argv.len() {
        let a = &argv[i];
        if let Some(body) = a.strip_prefix("--") {
            if let Some((k, v)) = body.split_once('=') {
                flags.insert(k.to_string(), Value::String(v.to_string()));
            } else if i + 1 < argv.len() && !(argv[i + 1].starts_with("--")) {
                flags.insert(body.to_string(), Value::String(argv[i + 1].clone()));
                i += 1;
            } else {
                flags.insert(body.to_string(), Value::Bool(true));
            }
        }
        i += 1;
    }
    Value::Object(flags)
}

fn run_config(argv: &[String], subcommand: &str, params: Option<&CavityParams>) -> Value {
    let mut cfg = Map::new();
    cfg.insert("subcommand".into(), Value::String(subcommand.into()));
    cfg.insert("flags".into(), echo_flags(argv));
    if let Some(p) = params {
        cfg.insert("params".into(), serde_json::to_value(p).unwrap_or(Value::Null));
    }
    Value::Object(cfg)
}

fn exit_code(e: &CavityError) -> i32 {
    match e {
        CavityError::Truncation { .. } => EXIT_TRUNCATION,
        CavityError::InvalidParameter(_) | CavityError::NeedsStrictDamping(_) | CavityError::Output(_) => EXIT_USAGE,
        _ => EXIT_FAILED,
    }
}

struct Sink<'a> {
    out: Option<PathBuf>,
    stdout: &'a mut dyn Write,
}

impl Sink<'_> {
    fn with<F: FnOnce(&mut dyn Write) -> crate::Result<()>>(&mut self, f: F) -> crate::Result<()> {
        match &self.out {
            Some(path) => {
                let mut w = BufWriter::new(File::create(path)?);
                f(&mut w)?;
                w.flush()?;
                Ok(())
            }
            None => f(self.stdout),
        }
    }

    fn dataset(&mut self, format: Format, cfg: Value, d: &Dataset) -> crate::Result<()> {
        match format {
            Format::Csv => self.with(|w| write_csv(d, w)),
            Format::Json => {
                let v = dataset_json(cfg, d)?;
                self.with(|w| write_json(&v, w))
            }
        }
    }
}

fn parse_list<T: std::str::FromStr<Err = CavityError>>(items: &[String]) -> crate::Result<Vec<T>> {
    items.iter().map(|s| s.trim().parse()).collect()
}

fn parse_range(s: &str) -> crate::Result<Vec<f64>> {
    let bad = || CavityError::InvalidParameter(format!("--range expects start,stop,count, got '{s}'"));
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let a: f64 = parts[0].parse().map_err(|_| bad())?;
    let b: f64 = parts[1].parse().map_err(|_| bad())?;
    let k: usize = parts[2].parse().map_err(|_| bad())?;
    match k {
        0 => Err(CavityError::InvalidParameter("--range count must be >= 1".into())),
        1 => Ok(vec![a]),
        _ => Ok((0..k).map(|i| a + (b - a) * i as f64 / (k - 1) as f64).collect()),
    }
}

fn execute(cli: Cli, argv: &[String], stdout: &mut dyn Write, stderr: &mut dyn Write) -> crate::Result<i32> {
    match cli.command {
        Command::Simulate(run) => {
            let params = run.params()?;
            let cfg = run_config(argv, "simulate", Some(&params));
            let d = simulate_dataset(
                &params,
                &run.init,
                run.trunc.unwrap_or(DEFAULT_CUTOFF),
                run.steps.unwrap_or(DEFAULT_STEPS),
                run.substeps,
            )?;
            Sink { out: run.out, stdout }.dataset(run.format, cfg, &d)?;
            Ok(EXIT_OK)
        }
        Command::Analytic { run, quantity } => {
            let params = run.params()?;
            let qs: Vec<AnalyticQuantity> = parse_list(&quantity)?;
            let cfg = run_config(argv, "analytic", Some(&params));
            let d = analytic_dataset(&params, &run.init, run.steps.unwrap_or(DEFAULT_STEPS), &qs)?;
            Sink { out: run.out, stdout }.dataset(run.format, cfg, &d)?;
            Ok(EXIT_OK)
        }
        Command::Compare(run) => {
            let params = run.params()?;
            let cfg = run_config(argv, "compare", Some(&params));
            let outcome = compare_suite(
                &params,
                &run.init,
                run.trunc.unwrap_or(DEFAULT_CUTOFF),
                run.steps.unwrap_or(DEFAULT_STEPS),
                run.tol,
            )?;
            let mut sink = Sink { out: run.out, stdout };
            match run.format {
                Format::Csv => sink.with(|w| write_csv(&reports_dataset(&outcome.reports), w))?,
                Format::Json => {
                    let v = report_json(cfg, &outcome.reports, outcome.aborted.as_ref())?;
                    sink.with(|w| write_json(&v, w))?
                }
            }
            let s = outcome.summary();
            writeln!(stderr, "{} passed, {} failed", s.passed, s.failed)?;
            if let Some(a) = &outcome.aborted {
                writeln!(stderr, "aborted after n={}: {}", a.last_valid_n, a.message)?;
                return Ok(EXIT_TRUNCATION);
            }
            Ok(if s.failed == 0 { EXIT_OK } else { EXIT_FAILED })
        }
        Command::Sweep {
            run,
            vary,
            grid,
            range,
            quantity,
        } => {
            let params = run.params()?;
            let (n0, beta0) = run
                .init
                .exact_moments(&params)
                .ok_or_else(|| CavityError::InvalidParameter("sweep needs a closed-form initial state".into()))?;
            if beta0.norm() != 0.0 {
                return Err(CavityError::InvalidParameter("sweep needs a gauge-invariant initial state".into()));
            }
            let grid = match range {
                Some(r) => parse_range(&r)?,
                None => grid,
            };
            let spec = SweepSpec {
                parameter: vary.parse::<SweepParam>()?,
                grid,
                base: params,
                quantities: parse_list::<SweepQuantity>(&quantity)?,
                steps: run.steps.unwrap_or(DEFAULT_STEPS),
                n0,
                output: None,
            };
            let cfg = run_config(argv, "sweep", Some(&params));
            let d = run_sweep(&spec)?;
            Sink { out: run.out, stdout }.dataset(run.format, cfg, &d)?;
            Ok(EXIT_OK)
        }
        Command::Figure1(run) => {
            let cfg = run_config(argv, "figure1", Some(&CavityParams::figure1()));
            let d = figure1_dataset(
                run.trunc.unwrap_or(FIGURE1_CUTOFF),
                run.steps.unwrap_or(FIGURE1_STEPS),
            )?;
            Sink { out: run.out, stdout }.dataset(run.format, cfg, &d)?;
            Ok(EXIT_OK)
        }
    }
}

/// Runs one command; `argv[0]` is the program name.
pub fn run(argv: &[String], stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(stderr, "{text}");
            } else {
                let _ = write!(stdout, "{text}");
            }
            return code;
        }
    };
    let flags = argv.get(1..).unwrap_or(&[]);
    match execute(cli, flags, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}
