//! Closed-form predictions for an arbitrary supported initial state.

use crate::analytic::{
    energy_open, energy_total_ideal, first_moment_ideal, first_moment_open, mean_photons_ideal,
    mean_photons_ideal_nongauge, mean_photons_open,
};
use crate::channels::{dual_moments_ideal, dual_moments_open, ObservablePoly};
use crate::error::Result;
use crate::linalg::{C64, ONE};
use crate::model::{weyl_operator, CavityParams, DensityMatrix, InitialStateSpec};

/// Initial data the closed forms depend on.
#[derive(Debug, Clone)]
pub(crate) struct Start {
    pub spec: InitialStateSpec,
    pub n0: f64,
    pub beta0: C64,
    pub gauge_invariant: bool,
}

impl Start {
    /// Exact moments when known, otherwise those of the truncated state.
    pub fn new(spec: &InitialStateSpec, params: &CavityParams, rho0: &DensityMatrix) -> Self {
        let (n0, beta0) = spec
            .exact_moments(params)
            .unwrap_or_else(|| (rho0.mean_photons(), rho0.first_moment()));
        Self {
            spec: spec.clone(),
            n0,
            beta0,
            gauge_invariant: spec.is_gauge_invariant(),
        }
    }
}

fn dual(obs: &ObservablePoly, params: &CavityParams, n: u64) -> ObservablePoly {
    if params.is_ideal() {
        dual_moments_ideal(obs, params, n)
    } else {
        dual_moments_open(obs, params, n)
    }
}

pub(crate) fn photons(params: &CavityParams, s: &Start, n: u64) -> Result<f64> {
    if params.is_ideal() {
        if s.gauge_invariant {
            return mean_photons_ideal(params, s.n0, n);
        }
        if let Ok(v) = mean_photons_ideal_nongauge(params, s.n0, s.beta0.norm(), s.beta0.arg(), n) {
            return Ok(v);
        }
    } else if s.gauge_invariant && params.sigma_plus <= params.sigma_minus {
        return mean_photons_open(params, s.n0, n as f64 * params.tau);
    }
    Ok(dual(&ObservablePoly::number(), params, n).pair(s.n0, s.beta0).re)
}

pub(crate) fn first_moment(params: &CavityParams, s: &Start, n: u64) -> C64 {
    match (s.gauge_invariant, params.is_ideal()) {
        (true, true) => first_moment_ideal(params, n),
        (true, false) => first_moment_open(params, n),
        _ => dual(&ObservablePoly::annih(), params, n).pair(s.n0, s.beta0),
    }
}

/// Energy gained between `−0` and `nτ − 0`, `n ≥ 1`.
pub(crate) fn energy_total(params: &CavityParams, s: &Start, n: u64) -> Result<f64> {
    if s.gauge_invariant {
        if params.is_ideal() {
            return Ok(energy_total_ideal(params, n));
        }
        if params.sigma_plus <= params.sigma_minus {
            return Ok(energy_open(params, s.n0, n)?.total);
        }
    }
    // λ⟨(b+b*)⊗η_n⟩ = 2λp Re⟨b⟩ of the excited flight started from ⟨b⟩_{n−1}.
    let mu = params.mu();
    let decay = (-mu * params.tau).exp();
    let beta_prev = first_moment(params, s, n - 1);
    let exc = decay * beta_prev - C64::new(0.0, params.lambda) / mu * (ONE - decay);
    let interaction = 2.0 * params.lambda * params.p * exc.re;
    Ok(params.eps * (photons(params, s, n)? - s.n0) + interaction)
}

/// `ω₀(W(ζ))` of the initial state: closed form, or the truncated trace for custom states.
pub(crate) fn initial_characteristic(s: &Start, params: &CavityParams, rho0: &DensityMatrix, zeta: C64) -> Result<C64> {
    let q = zeta.norm_sqr() / 4.0;
    Ok(match s.spec {
        InitialStateSpec::Vacuum => C64::new((-q).exp(), 0.0),
        InitialStateSpec::Gibbs { beta } => {
            let coth = 1.0 / (0.5 * beta * params.eps).tanh();
            C64::new((-q * coth).exp(), 0.0)
        }
        InitialStateSpec::Coherent { r, phi } => {
            let b = C64::from_polar(r, phi);
            C64::from_polar((-q).exp(), std::f64::consts::SQRT_2 * (zeta.conj() * b).re)
        }
        InitialStateSpec::Custom(_) => rho0.expect(&weyl_operator(zeta, rho0.cutoff())?.op.entries),
    })
}
