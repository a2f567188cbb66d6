use serde::{Deserialize, Serialize};

use crate::error::{CavityError, Result};
use crate::linalg::C64;
use crate::model::CavityParams;
use crate::special::one_minus_exp_over;

/// Cavity without the beam: leaking at rate σ− and pumping at rate σ+.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoBeamRelaxation {
    pub mean_photons: f64,
    /// `ω_t(W(ζ)) = weyl_prefactor · ω_0(W(evolved_zeta))`.
    pub weyl_prefactor: f64,
    pub evolved_zeta: C64,
    /// Thermal steady state, present when σ− > σ+.
    pub steady: Option<SteadyState>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteadyState {
    /// `ln(σ−/σ+)/ε`; `None` for σ+ = 0 (the vacuum, zero temperature).
    pub beta_cav: Option<f64>,
    /// `σ+/(σ− − σ+)`.
    pub n_bar: f64,
}

pub fn nobeam_relaxation(params: &CavityParams, n0: f64, t: f64, zeta: C64) -> Result<NoBeamRelaxation> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(CavityError::InvalidParameter(format!("time must be >= 0, got {t}")));
    }
    if !(n0 >= 0.0) {
        return Err(CavityError::InvalidParameter(format!("initial photon number must be >= 0, got {n0}")));
    }
    let x = params.damping();
    if x < 0.0 {
        return Err(CavityError::NeedsStrictDamping("nobeam_relaxation"));
    }
    let g = one_minus_exp_over(x, t);
    let steady = (x > 0.0).then(|| SteadyState {
        beta_cav: (params.sigma_plus > 0.0).then(|| (params.sigma_minus / params.sigma_plus).ln() / params.eps),
        n_bar: params.sigma_plus / x,
    });
    Ok(NoBeamRelaxation {
        mean_photons: (-x * t).exp() * n0 + params.sigma_plus * g,
        weyl_prefactor: (-zeta.norm_sqr() / 4.0 * (params.sigma_minus + params.sigma_plus) * g).exp(),
        evolved_zeta: (-params.mu().conj() * t).exp() * zeta,
        steady,
    })
}
