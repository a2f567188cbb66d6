//! Closed-form tables indexed by the number of atoms.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::dataset::{Cell, Dataset};
use super::predict::{self, Start};
use super::suite::{weyl_tag, ENTROPY_BETA, WEYL_PROBES};
use crate::analytic::{energy_open_limit, limit_bounds, mean_photons_open_limit, weyl_char_limit, WEYL_LIMIT_TOL};
use crate::error::{CavityError, Result};
use crate::model::{initial_state, CavityParams, InitialStateSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnalyticQuantity {
    Photons,
    FirstMoment,
    /// Energy gained since `t = −0`.
    Energy,
    /// Entropy production against the Gibbs reference (ideal cavity only).
    Entropy,
    /// `N(nτ)/(nτ)`.
    Growth,
    /// Long-time photon number; constant column.
    Limit,
    /// Lower and upper estimates of the long-time photon number.
    Bounds,
    EnergyLimit,
    /// Long-time Weyl functional at the probe points.
    WeylLimit,
}

impl AnalyticQuantity {
    pub const ALL: [AnalyticQuantity; 9] = [
        Self::Photons,
        Self::FirstMoment,
        Self::Energy,
        Self::Entropy,
        Self::Growth,
        Self::Limit,
        Self::Bounds,
        Self::EnergyLimit,
        Self::WeylLimit,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Photons => "photons",
            Self::FirstMoment => "first_moment",
            Self::Energy => "energy",
            Self::Entropy => "entropy",
            Self::Growth => "growth",
            Self::Limit => "limit",
            Self::Bounds => "bounds",
            Self::EnergyLimit => "energy_limit",
            Self::WeylLimit => "weyl_limit",
        }
    }

    fn columns(&self) -> Vec<String> {
        match self {
            Self::FirstMoment => vec!["first_moment_re".into(), "first_moment_im".into()],
            Self::Bounds => vec!["limit_lower".into(), "limit_upper".into()],
            Self::WeylLimit => WEYL_PROBES
                .iter()
                .flat_map(|z| {
                    let t = weyl_tag(*z);
                    [format!("{t}_re"), format!("{t}_im")]
                })
                .collect(),
            q => vec![q.name().into()],
        }
    }
}

impl FromStr for AnalyticQuantity {
    type Err = CavityError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|q| q.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Self::ALL.iter().map(|q| q.name()).collect();
            CavityError::InvalidParameter(format!("unknown quantity '{s}' (expected one of {})", names.join(", ")))
        })
    }
}

/// One row per `n = 0..=steps`. Step-independent quantities fill constant
/// columns; their preconditions (strict damping, ideal cavity) are errors.
pub fn analytic_dataset(
    params: &CavityParams,
    init: &InitialStateSpec,
    steps: u64,
    quantities: &[AnalyticQuantity],
) -> Result<Dataset> {
    params.validate()?;
    if quantities.is_empty() {
        return Err(CavityError::InvalidParameter("at least one quantity is required".into()));
    }
    if init.exact_moments(params).is_none() {
        return Err(CavityError::InvalidParameter("closed forms need vacuum, gibbs or coherent starts".into()));
    }
    // The moments are exact; the truncated state only backs the custom-state path.
    let rho0 = initial_state(&InitialStateSpec::Vacuum, params, 1)?;
    let start = Start::new(init, params, &rho0);

    let mut constants: Vec<Vec<Cell>> = Vec::new();
    for q in quantities {
        constants.push(match q {
            AnalyticQuantity::Limit => vec![mean_photons_open_limit(params)?.into()],
            AnalyticQuantity::Bounds => {
                let (lo, hi) = limit_bounds(params)?;
                vec![lo.into(), hi.into()]
            }
            AnalyticQuantity::EnergyLimit => {
                if !start.gauge_invariant {
                    return Err(CavityError::InvalidParameter("energy_limit needs a gauge-invariant start".into()));
                }
                vec![energy_open_limit(params, start.n0)?.into()]
            }
            AnalyticQuantity::WeylLimit => {
                let mut cells = Vec::new();
                for z in WEYL_PROBES {
                    let v = weyl_char_limit(z, params, WEYL_LIMIT_TOL)?;
                    cells.extend([Cell::Real(v.re), Cell::Real(v.im)]);
                }
                cells
            }
            AnalyticQuantity::Entropy if !params.is_ideal() => {
                return Err(CavityError::InvalidParameter(
                    "entropy production is available for the ideal cavity only".into(),
                ))
            }
            _ => Vec::new(),
        });
    }

    let mut columns = vec!["n".to_string(), "t".to_string()];
    columns.extend(quantities.iter().flat_map(|q| q.columns()));
    let mut out = Dataset { columns, rows: Vec::new() };
    for n in 0..=steps {
        let t = n as f64 * params.tau;
        let mut row = vec![Cell::from(n), Cell::from(t)];
        for (q, c) in quantities.iter().zip(&constants) {
            match q {
                AnalyticQuantity::Photons => row.push(predict::photons(params, &start, n)?.into()),
                AnalyticQuantity::FirstMoment => {
                    let b = predict::first_moment(params, &start, n);
                    row.extend([Cell::Real(b.re), Cell::Real(b.im)]);
                }
                AnalyticQuantity::Energy => row.push(if n == 0 {
                    Cell::Real(0.0)
                } else {
                    predict::energy_total(params, &start, n)?.into()
                }),
                AnalyticQuantity::Entropy => {
                    let dn = predict::photons(params, &start, n)? - start.n0;
                    row.push((ENTROPY_BETA * params.eps * dn).into());
                }
                AnalyticQuantity::Growth => row.push(if n == 0 {
                    Cell::Empty
                } else {
                    (predict::photons(params, &start, n)? / t).into()
                }),
                _ => row.extend(c.iter().cloned()),
            }
        }
        out.rows.push(row);
    }
    Ok(out)
}
