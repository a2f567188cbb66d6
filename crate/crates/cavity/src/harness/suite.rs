//! Step-by-step numeric-vs-analytic comparison of one run.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::engine::Engine;
use super::predict::{self, Start};
use super::report::{ComparisonReport, Summary};
use crate::analytic::{entropy_production_ideal, gibbs_log, relative_entropy_with_log};
use crate::channels::dual_weyl_open;
use crate::error::{CavityError, Result};
use crate::linalg::{dagger, herm_eig, Mat, C64};
use crate::model::{
    initial_state, ladder_operators, weyl_operator, CavityParams, DensityMatrix, InitialStateSpec, Space, TAIL_GUARD,
};

/// Simulation-vs-formula tolerance at the default cutoff.
pub const DEFAULT_SIM_TOL: f64 = 1e-6;
/// Tolerance for pure-algebra comparisons such as dual coefficients.
pub const DEFAULT_ALGEBRA_TOL: f64 = 1e-8;
pub const TRACE_TOL: f64 = 1e-10;
pub const BEAM_TERM_TOL: f64 = 1e-10;
/// Entropy is checked on the full branch tree, so only the first few atoms.
pub const ENTROPY_MAX_STEPS: u64 = 8;
/// Inverse temperature of the Gibbs reference for entropy production.
pub const ENTROPY_BETA: f64 = 1.0;

pub const WEYL_PROBES: [C64; 3] = [C64::new(0.5, 0.0), C64::new(0.0, 0.5), C64::new(0.3, 0.4)];

pub fn weyl_tag(zeta: C64) -> String {
    format!("weyl[{}{:+}i]", zeta.re, zeta.im)
}

/// Where and why a run stopped early.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Abort {
    pub last_valid_n: u64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteOutcome {
    pub reports: Vec<ComparisonReport>,
    pub aborted: Option<Abort>,
}

impl SuiteOutcome {
    pub fn summary(&self) -> Summary {
        Summary::of(&self.reports)
    }

    pub fn all_passed(&self) -> bool {
        self.aborted.is_none() && self.reports.iter().all(|r| r.passed)
    }
}

/// Every cavity history `ρ_C(s)` of the ideal run, one per atomic record `s`,
/// with its probability. The joint state of cavity and passed atoms is
/// `Σ_s P(s) ρ_C(s) ⊗ |s⟩⟨s|`.
struct BranchTree {
    excited: Mat,
    ground: Vec<C64>,
    p: f64,
    leaves: Vec<(f64, Mat)>,
    log_ref: Mat,
    base: f64,
}

impl BranchTree {
    fn new(params: &CavityParams, rho0: &DensityMatrix) -> Result<Self> {
        let m = rho0.cutoff();
        let lad = ladder_operators(m)?;
        let h = &lad.number_op.entries * C64::new(params.eps, 0.0)
            + (&lad.b.entries + &lad.b_dag.entries) * C64::new(params.lambda, 0.0);
        let excited = herm_eig(&h)?.apply_fn(|e| C64::from_polar(1.0, -params.tau * e));
        let ground = (0..=m)
            .map(|k| C64::from_polar(1.0, -params.tau * params.eps * k as f64))
            .collect();
        let log_ref = gibbs_log(ENTROPY_BETA, params.eps, m);
        let base = relative_entropy_with_log(rho0, &log_ref)?;
        Ok(Self {
            excited,
            ground,
            p: params.p,
            leaves: vec![(1.0, rho0.matrix().clone())],
            log_ref,
            base,
        })
    }

    fn grow(&mut self) {
        let ue_dag = dagger(&self.excited);
        let mut next = Vec::with_capacity(2 * self.leaves.len());
        for (w, rho) in self.leaves.drain(..) {
            if self.p > 0.0 {
                next.push((w * self.p, self.excited.dot(&rho).dot(&ue_dag)));
            }
            if self.p < 1.0 {
                let g = &self.ground;
                let rot = Mat::from_shape_fn(rho.dim(), |(i, j)| g[i] * rho[[i, j]] * g[j].conj());
                next.push((w * (1.0 - self.p), rot));
            }
        }
        self.leaves = next;
    }

    /// `Σ_s P(s) S(ρ_C(s) | gibbs) − S(ρ₀ | gibbs)`.
    fn production(&self) -> Result<f64> {
        let terms: Vec<f64> = self
            .leaves
            .par_iter()
            .map(|(w, rho)| {
                let state = DensityMatrix::from_evolved_unguarded(rho.clone(), Space::Cavity)?;
                Ok(w * relative_entropy_with_log(&state, &self.log_ref)?)
            })
            .collect::<Result<_>>()?;
        Ok(terms.iter().sum::<f64>() - self.base)
    }
}

/// `−Σ_a (P(a) − q(a)) ln q(a)` for one atom, reference `q = (p, 1 − p)`.
fn beam_term(p: f64, excited: f64) -> f64 {
    let mut acc = 0.0;
    for (q, measured) in [(p, excited), (1.0 - p, 1.0 - excited)] {
        if q > 0.0 {
            acc -= (measured - q) * q.ln();
        }
    }
    acc
}

/// Runs `n_max` steps from `init` at cutoff `m` and checks, after every step,
/// photon number, first moment, the Weyl expectation at [`WEYL_PROBES`],
/// trace, the energy total and (ideal runs, first [`ENTROPY_MAX_STEPS`] atoms)
/// entropy production and the vanishing beam term.
///
/// A truncation-guard trip ends the run; the reports gathered so far are kept
/// and [`SuiteOutcome::aborted`] records the last valid step.
pub fn compare_suite(
    params: &CavityParams,
    init: &InitialStateSpec,
    m: usize,
    n_max: u64,
    tol: f64,
) -> Result<SuiteOutcome> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(CavityError::InvalidParameter(format!("tolerance must be > 0, got {tol}")));
    }
    params.validate()?;
    let rho0 = initial_state(init, params, m)?;
    let start = Start::new(init, params, &rho0);
    let engine = Engine::new(params, m)?;
    let weyls: Vec<Mat> = WEYL_PROBES
        .iter()
        .map(|&z| weyl_operator(z, m).map(|w| w.op.entries))
        .collect::<Result<_>>()?;
    let mut tree = if params.is_ideal() && n_max > 0 {
        Some(BranchTree::new(params, &rho0)?)
    } else {
        None
    };
    let d = m + 1;
    let n0_numeric = rho0.mean_photons();

    let mut reports = Vec::new();
    let check = |state: &DensityMatrix, n: u64, reports: &mut Vec<ComparisonReport>| -> Result<()> {
        let tail = state.tail_mass;
        let mut push = |q: &str, a: super::Scalar, v: super::Scalar, t: f64| {
            reports.push(ComparisonReport::new(q, n, a, v, t, d, tail));
        };
        push("trace", 1.0.into(), state.trace().into(), TRACE_TOL);
        push("photon_number", predict::photons(params, &start, n)?.into(), state.mean_photons().into(), tol);
        push("first_moment", predict::first_moment(params, &start, n).into(), state.first_moment().into(), tol);
        for (z, w) in WEYL_PROBES.iter().zip(&weyls) {
            let dual = dual_weyl_open(*z, params, n);
            let analytic = dual.scalar_factor * predict::initial_characteristic(&start, params, &rho0, dual.evolved_zeta)?;
            push(&weyl_tag(*z), analytic.into(), state.expect(w).into(), tol);
        }
        Ok(())
    };

    check(&rho0, 0, &mut reports)?;
    let mut x = rho0.matrix().clone();
    let mut beam = 0.0;
    let mut aborted = None;
    for n in 1..=n_max {
        let flight = engine.step(&x)?;
        let state = DensityMatrix::from_evolved_unguarded(flight.cavity, Space::Cavity)?;
        if state.tail_mass > TAIL_GUARD {
            let err = CavityError::Truncation {
                tail_mass: state.tail_mass,
                limit: TAIL_GUARD,
                cutoff: m,
            };
            aborted = Some(Abort {
                last_valid_n: n - 1,
                message: format!("step {n}: {err}"),
            });
            break;
        }
        check(&state, n, &mut reports)?;
        let tail = state.tail_mass;
        let energy_numeric = flight.energy - params.atom_energy * params.p - params.eps * n0_numeric;
        reports.push(ComparisonReport::new(
            "energy_total",
            n,
            predict::energy_total(params, &start, n)?.into(),
            energy_numeric.into(),
            tol,
            d,
            tail,
        ));
        if let Some(tree) = tree.as_mut().filter(|_| n <= ENTROPY_MAX_STEPS) {
            tree.grow();
            let analytic = if start.gauge_invariant {
                entropy_production_ideal(params, ENTROPY_BETA, start.n0, n)?
            } else {
                ENTROPY_BETA * params.eps * (predict::photons(params, &start, n)? - start.n0)
            };
            reports.push(ComparisonReport::new(
                "entropy_production",
                n,
                analytic.into(),
                tree.production()?.into(),
                tol,
                d,
                tail,
            ));
            beam += beam_term(params.p, flight.excited);
            reports.push(ComparisonReport::new("entropy_beam_term", n, 0.0.into(), beam.into(), BEAM_TERM_TOL, d, tail));
        }
        x = state.op.entries;
    }
    Ok(SuiteOutcome { reports, aborted })
}
