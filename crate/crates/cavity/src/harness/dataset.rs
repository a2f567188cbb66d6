//! Tabular outputs: simulation traces, the reference-parameter comparison, convergence
//! studies and parameter sweeps.

use std::path::PathBuf;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::engine::Engine;
use super::predict::{self, Start};
use super::report::ComparisonReport;
use super::suite::DEFAULT_SIM_TOL;
use crate::analytic::{
    energy_open, energy_step_ideal, growth_rates, ideal_increment, mean_photons_ideal, mean_photons_open,
    mean_photons_open_limit,
};
use crate::channels::{dual_moments_open, ObservablePoly, OpenChannel};
use crate::error::{CavityError, Result};
use crate::linalg::ZERO;
use crate::model::{initial_state, initial_state_unguarded, CavityParams, DensityMatrix, InitialStateSpec, Space};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Bool(bool),
    Text(String),
    /// No value; paired with an explicit flag column where a value is infinite.
    Empty,
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Cell::Int(v) => Some(v as f64),
            Cell::Real(v) => Some(v),
            _ => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Dataset {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric values of one column; `None` entries are empty or non-numeric cells.
    pub fn values(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let j = self.column(name)?;
        Some(self.rows.iter().map(|r| r[j].as_f64()).collect())
    }

    fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Step-by-step trace of a simulation; each interval is sampled at `substeps`
/// equally spaced times, the last one being the step boundary `nτ − 0`.
///
/// Mid-flight rows are computed from the state at the start of the interval,
/// so the boundary rows do not depend on `substeps`. The `energy` column is
/// `⟨H⟩` including the atom inside the cavity (the bare `εN` at `n = 0`).
pub fn simulate_dataset(
    params: &CavityParams,
    init: &InitialStateSpec,
    m: usize,
    steps: u64,
    substeps: u32,
) -> Result<Dataset> {
    if substeps == 0 {
        return Err(CavityError::InvalidParameter("substeps must be >= 1".into()));
    }
    params.validate()?;
    let rho0 = initial_state(init, params, m)?;
    let engine = Engine::new(params, m)?;
    let mut out = Dataset::new(&[
        "n",
        "substep",
        "t",
        "mean_photons",
        "first_moment_re",
        "first_moment_im",
        "energy",
        "trace",
        "min_eigenvalue",
        "tail_mass",
    ]);
    let row = |n: u64, j: u32, t: f64, s: &DensityMatrix, energy: f64| -> Result<Vec<Cell>> {
        let b = s.first_moment();
        Ok(vec![
            n.into(),
            (j as u64).into(),
            t.into(),
            s.mean_photons().into(),
            b.re.into(),
            b.im.into(),
            energy.into(),
            s.trace().re.into(),
            s.min_eigenvalue()?.into(),
            s.tail_mass.into(),
        ])
    };
    out.push(row(0, 0, 0.0, &rho0, params.eps * rho0.mean_photons())?);
    let tau = params.tau;
    let mut x = rho0.op.entries.clone();
    for n in 1..=steps {
        let mut boundary = None;
        for j in 1..=substeps {
            let dt = tau * j as f64 / substeps as f64;
            let f = engine.flight(&x, dt)?;
            let s = DensityMatrix::from_evolved(f.cavity, Space::Cavity)?;
            out.push(row(n, j, (n - 1) as f64 * tau + dt, &s, f.energy)?);
            if j == substeps {
                boundary = Some(s);
            }
        }
        x = boundary.expect("substeps >= 1").op.entries;
    }
    Ok(out)
}

/// Ideal versus open photon number for the reference parameter set, vacuum start.
pub fn figure1_dataset(m: usize, n_max: u64) -> Result<Dataset> {
    let open = CavityParams::figure1();
    let ideal = open.with_rates(0.0, 0.0)?;
    let channel = OpenChannel::new(&open, m)?;
    let asymptote = mean_photons_open_limit(&open)?;
    let mut out = Dataset::new(&["n", "t", "N_ideal", "N_open_analytic", "N_open_numeric", "asymptote"]);
    let mut rho = initial_state(&InitialStateSpec::Vacuum, &open, m)?;
    for n in 0..=n_max {
        if n > 0 {
            rho = channel.step(&rho)?;
        }
        let t = n as f64 * open.tau;
        out.push(vec![
            n.into(),
            t.into(),
            mean_photons_ideal(&ideal, 0.0, n)?.into(),
            mean_photons_open(&open, 0.0, t)?.into(),
            rho.mean_photons().into(),
            asymptote.into(),
        ]);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvergenceQuantity {
    PhotonNumber,
    FirstMoment,
}

impl FromStr for ConvergenceQuantity {
    type Err = CavityError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "photon_number" => Ok(Self::PhotonNumber),
            "first_moment" => Ok(Self::FirstMoment),
            _ => Err(CavityError::InvalidParameter(format!(
                "unknown convergence quantity '{s}' (expected photon_number or first_moment)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceOutcome {
    /// One report per cutoff; `step` holds the cutoff M, `tail_mass` the largest
    /// tail seen during the run including the mass cut from the initial state.
    pub reports: Vec<ComparisonReport>,
    /// Error is non-increasing (up to a rounding plateau) across the cutoffs
    /// whose tail is below [`CONVERGED_TAIL`].
    pub monotone: bool,
}

pub const CONVERGED_TAIL: f64 = 1e-10;

/// Error of the simulation after `n` steps against the closed form, for each
/// cutoff in `m_list` (strictly ascending). Runs without the truncation guard
/// so that poorly truncated cutoffs are reported rather than rejected.
pub fn convergence_study(
    params: &CavityParams,
    init: &InitialStateSpec,
    quantity: ConvergenceQuantity,
    m_list: &[usize],
    n: u64,
) -> Result<ConvergenceOutcome> {
    if m_list.is_empty() || m_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CavityError::InvalidParameter("cutoff list must be nonempty and strictly ascending".into()));
    }
    if init.exact_moments(params).is_none() {
        return Err(CavityError::InvalidParameter(
            "convergence study needs an initial state with closed-form moments".into(),
        ));
    }
    params.validate()?;
    let reports: Vec<ComparisonReport> = m_list
        .par_iter()
        .map(|&m| -> Result<ComparisonReport> {
            let (rho0, lost) = initial_state_unguarded(init, params, m)?;
            let start = Start::new(init, params, &rho0);
            let engine = Engine::new(params, m)?;
            let mut tail = lost.max(rho0.tail_mass);
            let mut state = rho0;
            for _ in 0..n {
                let f = engine.step(state.matrix())?;
                state = DensityMatrix::from_evolved_unguarded(f.cavity, Space::Cavity)?;
                tail = tail.max(state.tail_mass);
            }
            let (tag, analytic, numeric) = match quantity {
                ConvergenceQuantity::PhotonNumber => (
                    "photon_number",
                    predict::photons(params, &start, n)?.into(),
                    state.mean_photons().into(),
                ),
                ConvergenceQuantity::FirstMoment => (
                    "first_moment",
                    predict::first_moment(params, &start, n).into(),
                    state.first_moment().into(),
                ),
            };
            Ok(ComparisonReport::new(tag, m as u64, analytic, numeric, DEFAULT_SIM_TOL, m + 1, tail))
        })
        .collect::<Result<_>>()?;
    let converged: Vec<&ComparisonReport> = reports.iter().filter(|r| r.tail_mass < CONVERGED_TAIL).collect();
    let monotone = converged.windows(2).all(|w| {
        let floor = 1e-11 * w[1].analytic.abs().max(1.0);
        w[1].abs_err <= w[0].abs_err.max(floor)
    });
    Ok(ConvergenceOutcome { reports, monotone })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    Eps,
    Lambda,
    Tau,
    P,
    SigmaMinus,
    SigmaPlus,
    AtomEnergy,
}

impl SweepParam {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Eps => "eps",
            Self::Lambda => "lambda",
            Self::Tau => "tau",
            Self::P => "p",
            Self::SigmaMinus => "sigma_minus",
            Self::SigmaPlus => "sigma_plus",
            Self::AtomEnergy => "atom_energy",
        }
    }

    pub fn apply(&self, base: &CavityParams, v: f64) -> Result<CavityParams> {
        let mut p = *base;
        match self {
            Self::Eps => p.eps = v,
            Self::Lambda => p.lambda = v,
            Self::Tau => p.tau = v,
            Self::P => p.p = v,
            Self::SigmaMinus => p.sigma_minus = v,
            Self::SigmaPlus => p.sigma_plus = v,
            Self::AtomEnergy => p.atom_energy = v,
        }
        p.validate()?;
        Ok(p)
    }
}

impl FromStr for SweepParam {
    type Err = CavityError;

    fn from_str(s: &str) -> Result<Self> {
        let all = [
            Self::Eps,
            Self::Lambda,
            Self::Tau,
            Self::P,
            Self::SigmaMinus,
            Self::SigmaPlus,
            Self::AtomEnergy,
        ];
        all.into_iter()
            .find(|q| q.name() == s.replace('-', "_"))
            .ok_or_else(|| CavityError::InvalidParameter(format!("unknown sweep parameter '{s}'")))
    }
}

/// Closed-form quantities available to sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepQuantity {
    /// Per-atom increment of the ideal photon number.
    GrowthIdeal,
    /// `N(nτ)/(nτ)` of the open cavity.
    GrowthOpen,
    EnergyStepIdeal,
    PhotonsIdeal,
    PhotonsOpen,
    /// Long-time open photon number, with an `_infinite` flag column.
    LimitOpen,
    EnergyOpen,
}

impl SweepQuantity {
    pub const ALL: [SweepQuantity; 7] = [
        Self::GrowthIdeal,
        Self::GrowthOpen,
        Self::EnergyStepIdeal,
        Self::PhotonsIdeal,
        Self::PhotonsOpen,
        Self::LimitOpen,
        Self::EnergyOpen,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::GrowthIdeal => "growth_ideal",
            Self::GrowthOpen => "growth_open",
            Self::EnergyStepIdeal => "energy_step_ideal",
            Self::PhotonsIdeal => "photons_ideal",
            Self::PhotonsOpen => "photons_open",
            Self::LimitOpen => "limit_open",
            Self::EnergyOpen => "energy_open",
        }
    }

    fn columns(&self) -> Vec<String> {
        match self {
            Self::LimitOpen => vec!["limit_open".into(), "limit_open_infinite".into()],
            q => vec![q.name().into()],
        }
    }

    fn eval(&self, params: &CavityParams, n0: f64, n: u64) -> Result<Vec<Cell>> {
        let open_photons = |params: &CavityParams| -> Result<f64> {
            if params.sigma_plus <= params.sigma_minus {
                mean_photons_open(params, n0, n as f64 * params.tau)
            } else {
                Ok(dual_moments_open(&ObservablePoly::number(), params, n).pair(n0, ZERO).re)
            }
        };
        Ok(match self {
            Self::GrowthIdeal => vec![ideal_increment(params).into()],
            Self::GrowthOpen => {
                if n == 0 {
                    return Err(CavityError::InvalidParameter("growth rate needs steps >= 1".into()));
                }
                let v = if params.sigma_plus <= params.sigma_minus {
                    growth_rates(params, n0, n)?.1
                } else {
                    open_photons(params)? / (n as f64 * params.tau)
                };
                vec![v.into()]
            }
            Self::EnergyStepIdeal => vec![energy_step_ideal(params).into()],
            Self::PhotonsIdeal => vec![mean_photons_ideal(params, n0, n)?.into()],
            Self::PhotonsOpen => vec![open_photons(params)?.into()],
            Self::LimitOpen => {
                if params.sigma_minus > params.sigma_plus {
                    vec![mean_photons_open_limit(params)?.into(), false.into()]
                } else {
                    vec![Cell::Empty, true.into()]
                }
            }
            Self::EnergyOpen => {
                if params.sigma_plus > params.sigma_minus {
                    vec![Cell::Empty]
                } else {
                    vec![energy_open(params, n0, n)?.total.into()]
                }
            }
        })
    }
}

impl FromStr for SweepQuantity {
    type Err = CavityError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|q| q.name() == s)
            .ok_or_else(|| CavityError::InvalidParameter(format!("unknown sweep quantity '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub parameter: SweepParam,
    pub grid: Vec<f64>,
    pub base: CavityParams,
    pub quantities: Vec<SweepQuantity>,
    /// Step count for step-dependent quantities.
    pub steps: u64,
    /// Initial photon number (gauge-invariant start).
    pub n0: f64,
    /// When set, [`run_sweep`] also writes the dataset there as CSV.
    pub output: Option<PathBuf>,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(CavityError::InvalidParameter("sweep grid is empty".into()));
        }
        if self.grid.iter().any(|v| !v.is_finite()) {
            return Err(CavityError::InvalidParameter("sweep grid values must be finite".into()));
        }
        let up = self.grid.windows(2).all(|w| w[0] < w[1]);
        let down = self.grid.windows(2).all(|w| w[0] > w[1]);
        if !(up || down) {
            return Err(CavityError::InvalidParameter("sweep grid must be strictly monotone".into()));
        }
        if self.quantities.is_empty() {
            return Err(CavityError::InvalidParameter("sweep needs at least one quantity".into()));
        }
        if !(self.n0 >= 0.0 && self.n0.is_finite()) {
            return Err(CavityError::InvalidParameter(format!("initial photon number must be >= 0, got {}", self.n0)));
        }
        Ok(())
    }
}

/// One row per grid point, in grid order.
pub fn run_sweep(spec: &SweepSpec) -> Result<Dataset> {
    spec.validate()?;
    let points: Vec<CavityParams> = spec
        .grid
        .iter()
        .map(|&v| spec.parameter.apply(&spec.base, v))
        .collect::<Result<_>>()?;
    let mut columns = vec![spec.parameter.name().to_string()];
    columns.extend(spec.quantities.iter().flat_map(|q| q.columns()));
    let rows: Vec<Vec<Cell>> = points
        .par_iter()
        .zip(spec.grid.par_iter())
        .map(|(params, &v)| -> Result<Vec<Cell>> {
            let mut row = vec![Cell::Real(v)];
            for q in &spec.quantities {
                row.extend(q.eval(params, spec.n0, spec.steps)?);
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let out = Dataset { columns, rows };
    if let Some(path) = &spec.output {
        super::emit::write_csv_file(&out, path)?;
    }
    Ok(out)
}
