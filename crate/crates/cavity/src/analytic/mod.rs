//! Closed-form predictions as pure functions of [`CavityParams`](crate::model::CavityParams).

mod energy;
mod entropy;
mod photons;
mod relaxation;
mod weyl;

pub use energy::{
    energy_jump_open, energy_open, energy_open_limit, energy_open_regimes, energy_open_step, energy_open_upper_bound,
    energy_step_ideal, energy_total_ideal, energy_total_open_printed, entry_interaction_energy_open,
    interaction_energy_open, photon_energy_ideal, EnergyBreakdown, EnergyRegime, EnergyStep,
};
pub use entropy::{entropy_production_ideal, gibbs_log, relative_entropy, relative_entropy_with_log, SUPPORT_TOL};
pub use photons::{
    coupling_ratio, first_moment_ideal, first_moment_open, growth_rates, ideal_increment, is_resonant, limit_bounds,
    limit_regime, mean_photons_ideal, mean_photons_ideal_nongauge, mean_photons_open, mean_photons_open_exact,
    mean_photons_open_limit, mean_photons_open_steps, LimitRegime, LimitRegimeReport, LimitValue,
};
pub use relaxation::{nobeam_relaxation, NoBeamRelaxation, SteadyState};
pub use weyl::{
    araki_segal_check, weyl_char_limit, weyl_char_limit_detailed, weyl_factor_bound, weyl_tail_bound,
    ArakiSegalReport, WeylLimit, ARAKI_SEGAL_MAX_POINTS, WEYL_LIMIT_TOL,
};
