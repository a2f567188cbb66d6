//! Energy bookkeeping of the beam-cavity system.
//!
//! Totals are measured from `t₀ = −0` (no atom inside, gauge-invariant cavity
//! state with `N0` photons) to `t_n = nτ − 0` (the n-th atom about to leave).
//! Over that interval the total splits into the photon energy change, the
//! in-flight change of the interaction energy, and the `n − 1` jumps that
//! occur when one atom leaves and the next one enters. The first entry costs
//! nothing because `⟨b⟩ = 0` initially.

use serde::{Deserialize, Serialize};

use super::photons::{coupling_ratio, first_moment_open, mean_photons_ideal, mean_photons_open};
use crate::error::{CavityError, Result};
use crate::linalg::ONE;
use crate::model::CavityParams;
use crate::special::one_minus_exp_over;

/// Per-atom energy transfer `p(1−p)(2λ²/ε)(1 − cos ετ)` of the ideal cavity.
pub fn energy_step_ideal(params: &CavityParams) -> f64 {
    let p = params.p;
    p * (1.0 - p) * 2.0 * params.lambda * params.lambda / params.eps * (1.0 - (params.eps * params.tau).cos())
}

/// Energy gained by the ideal cavity system between `−0` and `nτ − 0`.
pub fn energy_total_ideal(params: &CavityParams, n: u64) -> f64 {
    n.saturating_sub(1) as f64 * energy_step_ideal(params)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    /// `ε(N(nτ) − N0)`.
    pub photon_part: f64,
    /// Sum of the in-flight changes of `λ⟨(b*+b)⊗η_k⟩`.
    pub interaction_part: f64,
    /// Sum of the energy jumps at the atom exchanges.
    pub jump_part: f64,
    pub total: f64,
}

/// `λ⟨(b*+b)⊗η_n⟩` at `t = nτ − 0` (the n-th atom inside).
pub fn interaction_energy_open(params: &CavityParams, n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let p = params.p;
    let a = coupling_ratio(params);
    let x = params.damping();
    let th = params.eps * params.tau;
    let half = 0.5 * x * params.tau;
    let nf = n as f64;
    let en = (-nf * half).exp();
    -2.0 * a * params.eps * (p * (1.0 - p) * (1.0 - (-half).exp() * th.cos()) + p * p * (1.0 - en * (nf * th).cos()))
        + a * x * (p * (1.0 - p) * (-half).exp() * th.sin() + p * p * en * (nf * th).sin())
}

/// `λ⟨(b*+b)⊗η_{n+1}⟩` at `t = nτ` (the (n+1)-th atom just entered): `2λp Re⟨b⟩_n`.
pub fn entry_interaction_energy_open(params: &CavityParams, n: u64) -> f64 {
    2.0 * params.lambda * params.p * first_moment_open(params, n).re
}

/// Constant energy jump at each atom exchange.
pub fn energy_jump_open(params: &CavityParams) -> f64 {
    let p = params.p;
    let a = coupling_ratio(params);
    let half = 0.5 * params.damping() * params.tau;
    let th = params.eps * params.tau;
    p * (1.0 - p) * a * (2.0 * params.eps * (1.0 - (-half).exp() * th.cos()) - params.damping() * (-half).exp() * th.sin())
}

/// Energy balance of the open cavity; `n = 0` gives the zero breakdown.
pub fn energy_open(params: &CavityParams, n0: f64, n: u64) -> Result<EnergyBreakdown> {
    if params.sigma_plus > params.sigma_minus {
        return Err(CavityError::NeedsStrictDamping("energy_open"));
    }
    let photon_part = params.eps * (mean_photons_open(params, n0, n as f64 * params.tau)? - n0);
    let jump_part = n.saturating_sub(1) as f64 * energy_jump_open(params);
    let interaction_part = interaction_energy_open(params, n) - jump_part;
    Ok(EnergyBreakdown {
        photon_part,
        interaction_part,
        jump_part,
        total: photon_part + interaction_part + jump_part,
    })
}

/// Energy change while the k-th atom is in flight (from `(k−1)τ` to `kτ − 0`)
/// and the jump when it enters at `(k−1)τ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyStep {
    pub in_flight: f64,
    pub jump: f64,
}

pub fn energy_open_step(params: &CavityParams, n0: f64, k: u64) -> Result<EnergyStep> {
    if k == 0 {
        return Err(CavityError::InvalidParameter("energy step index starts at 1".into()));
    }
    let t = |j: u64| j as f64 * params.tau;
    let photons = params.eps * (mean_photons_open(params, n0, t(k))? - mean_photons_open(params, n0, t(k - 1))?);
    let entry = entry_interaction_energy_open(params, k - 1);
    Ok(EnergyStep {
        in_flight: photons + interaction_energy_open(params, k) - entry,
        jump: entry - interaction_energy_open(params, k - 1),
    })
}

/// Long-time limit of [`energy_open`]`.total`.
pub fn energy_open_limit(params: &CavityParams, n0: f64) -> Result<f64> {
    params.require_strict_damping("energy_open_limit")?;
    let p = params.p;
    let a = coupling_ratio(params);
    let x = params.damping();
    let tau = params.tau;
    let k1 = (ONE - (-params.mu() * tau).exp()).norm_sqr();
    let n_inf = p * (1.0 - p) * a * k1 / -(-x * tau).exp_m1() + p * p * a + params.sigma_plus / x;
    let half = 0.5 * x * tau;
    let th = params.eps * tau;
    let i_inf = -2.0 * a * params.eps * (p * (1.0 - p) * (1.0 - (-half).exp() * th.cos()) + p * p)
        + a * x * p * (1.0 - p) * (-half).exp() * th.sin();
    Ok(params.eps * (n_inf - n0) + i_inf)
}

/// Commonly quoted closed form of the open-cavity total, kept for
/// comparison. It exceeds [`energy_open`]`.total` by one jump plus
/// `εp(λ²/|μ|²)(1 − e^{−nxτ})`.
pub fn energy_total_open_printed(params: &CavityParams, n0: f64, n: u64) -> Result<f64> {
    if params.sigma_plus > params.sigma_minus {
        return Err(CavityError::NeedsStrictDamping("energy_total_open_printed"));
    }
    let p = params.p;
    let a = coupling_ratio(params);
    let x = params.damping();
    let tau = params.tau;
    let nf = n as f64;
    let half = 0.5 * x * tau;
    let th = params.eps * tau;
    let leak = params.eps * (params.sigma_plus * one_minus_exp_over(x, nf * tau) + (-nf * x * tau).exp_m1() * n0);
    let pump = p * (1.0 - p) * 2.0 * a * params.eps * (1.0 - (-half).exp() * th.cos())
        * crate::special::geometric_ratio(x, tau, nf);
    let osc = p * p * a * x * (-nf * half).exp() * (nf * th).sin();
    Ok(leak + pump + osc)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergyRegime {
    LongTime,
    ShortTime,
    EqualRates,
}

impl std::str::FromStr for EnergyRegime {
    type Err = CavityError;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "long_time" => Self::LongTime,
            "short_time" => Self::ShortTime,
            "equal_rates" => Self::EqualRates,
            other => return Err(CavityError::InvalidParameter(format!("unknown energy regime '{other}'"))),
        })
    }
}

/// Asymptotic forms of the printed open-cavity total: `long_time` is its
/// `n → ∞` limit (no `n` dependence), `short_time` its expansion to first
/// order in `nτ`, `equal_rates` its `σ− → σ+` form.
pub fn energy_open_regimes(params: &CavityParams, n0: f64, regime: EnergyRegime, n: u64) -> Result<f64> {
    let p = params.p;
    let a = coupling_ratio(params);
    let x = params.damping();
    let tau = params.tau;
    let eps = params.eps;
    let nt = n as f64 * tau;
    let th = eps * tau;
    match regime {
        EnergyRegime::LongTime => {
            params.require_strict_damping("long_time energy asymptotic")?;
            let c1 = 1.0 - (-0.5 * x * tau).exp() * th.cos();
            Ok(eps * (params.sigma_plus / x - n0) + p * (1.0 - p) * 2.0 * a * eps * c1 / -(-x * tau).exp_m1())
        }
        EnergyRegime::ShortTime => {
            if params.sigma_plus > params.sigma_minus {
                return Err(CavityError::NeedsStrictDamping("short_time energy asymptotic"));
            }
            // x/(1 − e^{−xτ}) with its x → 0 limit 1/τ.
            let ratio = 1.0 / one_minus_exp_over(x, tau);
            Ok(nt * eps * params.sigma_plus - nt * x * eps * n0
                + nt * p * (1.0 - p) * 2.0 * a * eps * (1.0 - th.cos()) * ratio
                + nt * p * p * a * x * eps)
        }
        EnergyRegime::EqualRates => Ok(nt * eps * params.sigma_plus + n as f64 * energy_step_ideal(params)),
    }
}

/// Upper bound on the open-cavity total, uniform in `n`.
pub fn energy_open_upper_bound(params: &CavityParams) -> Result<f64> {
    params.require_strict_damping("energy_open_upper_bound")?;
    let p = params.p;
    let a = coupling_ratio(params);
    let x = params.damping();
    Ok(params.eps * params.sigma_plus / x + 2.0 * a * params.eps * p * (1.0 - p) / -(-0.5 * x * params.tau).exp_m1()
        + p * p * a * x)
}

/// Consistency helper: `ε(N(nτ) − N0)` of the ideal cavity.
pub fn photon_energy_ideal(params: &CavityParams, n0: f64, n: u64) -> Result<f64> {
    Ok(params.eps * (mean_photons_ideal(params, n0, n)? - n0))
}
