//! Photon-number and first-moment closed forms.

use serde::{Deserialize, Serialize};

use crate::error::{CavityError, Result};
use crate::linalg::{C64, ONE};
use crate::model::CavityParams;
use crate::special::{geometric_ratio, one_minus_exp_over};

fn check_n0(n0: f64) -> Result<()> {
    if !(n0 >= 0.0 && n0.is_finite()) {
        return Err(CavityError::InvalidParameter(format!("initial photon number must be >= 0, got {n0}")));
    }
    Ok(())
}

/// `λ²/|μ|²`.
pub fn coupling_ratio(params: &CavityParams) -> f64 {
    params.lambda * params.lambda / params.mu().norm_sqr()
}

/// Per-step pumping increment `p(1−p)(2λ²/ε²)(1 − cos ετ)` of the ideal cavity.
pub fn ideal_increment(params: &CavityParams) -> f64 {
    let a2 = params.shift() * params.shift();
    params.p * (1.0 - params.p) * 2.0 * a2 * (1.0 - (params.eps * params.tau).cos())
}

/// Mean photon number of the ideal cavity after `n` atoms, gauge-invariant start.
pub fn mean_photons_ideal(params: &CavityParams, n0: f64, n: u64) -> Result<f64> {
    check_n0(n0)?;
    let a2 = params.shift() * params.shift();
    let nf = n as f64;
    let rabi = params.p * params.p * 2.0 * a2 * (1.0 - (nf * params.eps * params.tau).cos());
    Ok(n0 + nf * ideal_increment(params) + rabi)
}

/// As [`mean_photons_ideal`] for a start with `⟨b⟩ = r e^{iφ}`; requires `N0 ≥ r²`.
pub fn mean_photons_ideal_nongauge(params: &CavityParams, n0: f64, r: f64, phi: f64, n: u64) -> Result<f64> {
    if !(r >= 0.0 && r.is_finite() && phi.is_finite()) {
        return Err(CavityError::InvalidParameter(format!("first-moment modulus must be >= 0, got {r}")));
    }
    if n0 < r * r {
        return Err(CavityError::InvalidParameter(format!(
            "inconsistent moments: N0={n0} < r^2={}",
            r * r
        )));
    }
    let base = mean_photons_ideal(params, n0, n)?;
    let theta = n as f64 * params.eps * params.tau;
    Ok(base + params.p * 2.0 * params.shift() * r * (phi.cos() - (theta - phi).cos()))
}

/// `⟨b⟩` of the ideal cavity after `n` atoms from a gauge-invariant start.
pub fn first_moment_ideal(params: &CavityParams, n: u64) -> C64 {
    let rot = C64::from_polar(1.0, -(n as f64) * params.eps * params.tau);
    (rot - ONE) * (params.p * params.shift())
}

/// `⟨b⟩` of the open cavity after `n` atoms from a gauge-invariant start: `−p(iλ/μ)(1 − e^{−nμτ})`.
pub fn first_moment_open(params: &CavityParams, n: u64) -> C64 {
    let mu = params.mu();
    let e = (-mu * (n as f64 * params.tau)).exp();
    -C64::new(0.0, params.lambda) / mu * (ONE - e) * params.p
}

fn check_open(params: &CavityParams) -> Result<()> {
    if params.sigma_plus > params.sigma_minus {
        return Err(CavityError::NeedsStrictDamping("open-cavity photon number"));
    }
    Ok(())
}

/// Mean photon number of the open cavity at time `t` from a gauge-invariant start.
///
/// Evaluates the five-term closed form written in `t`; it is the exact value
/// at the step boundaries `t = nτ` and an interpolation in between (see
/// [`mean_photons_open_exact`] for intra-step times). `σ− = σ+` is handled
/// through the removable-singularity expansions.
pub fn mean_photons_open(params: &CavityParams, n0: f64, t: f64) -> Result<f64> {
    check_n0(n0)?;
    check_open(params)?;
    if !(t >= 0.0 && t.is_finite()) {
        return Err(CavityError::InvalidParameter(format!("time must be >= 0, got {t}")));
    }
    let p = params.p;
    let x = params.damping();
    let tau = params.tau;
    let a = coupling_ratio(params);
    let mu = params.mu();
    let g = one_minus_exp_over(x, t) / one_minus_exp_over(x, tau);
    // e^{−xτ}(1 − e^{μτ})(1 − e^{μ̄τ}) = |1 − e^{−μτ}|².
    let k1 = (ONE - (-mu * tau).exp()).norm_sqr();
    let c1 = 1.0 - (-0.5 * x * tau).exp() * (params.eps * tau).cos();
    let ct = 1.0 - (-0.5 * x * t).exp() * (params.eps * t).cos();
    Ok((-x * t).exp() * n0 + p * a * k1 * g - p * p * 2.0 * a * g * c1
        + p * p * 2.0 * a * ct
        + params.sigma_plus * one_minus_exp_over(x, t))
}

/// Exact mean photon number at any `t ≥ 0`, including times inside a flight,
/// through the dual transfer matrices.
pub fn mean_photons_open_exact(params: &CavityParams, n0: f64, t: f64) -> Result<f64> {
    check_n0(n0)?;
    if !(t >= 0.0 && t.is_finite()) {
        return Err(CavityError::InvalidParameter(format!("time must be >= 0, got {t}")));
    }
    let whole = (t / params.tau).floor();
    let rest = t - whole * params.tau;
    let full = crate::channels::dual_number_open_closed(params, whole);
    let beta = first_moment_open(params, whole as u64);
    let n_whole = full.pair(n0, crate::linalg::ZERO).re;
    if rest <= 1e-15 * params.tau {
        return Ok(n_whole);
    }
    let partial = crate::channels::transfer_matrix(params, rest);
    // Column 0 is the image of b*b under one flight of duration `rest`.
    let img = crate::channels::ObservablePoly::new(partial[0][0], partial[1][0], partial[2][0], partial[3][0]);
    Ok(img.pair(n_whole, beta).re)
}

/// Long-time photon number of the open cavity.
pub fn mean_photons_open_limit(params: &CavityParams) -> Result<f64> {
    params.require_strict_damping("mean_photons_open_limit")?;
    let p = params.p;
    let x = params.damping();
    let a = coupling_ratio(params);
    let c1 = 1.0 - (-0.5 * x * params.tau).exp() * (params.eps * params.tau).cos();
    Ok(p * (1.0 - p) * 2.0 * a * c1 / -(-x * params.tau).exp_m1() + p * (2.0 * p - 1.0) * a + params.sigma_plus / x)
}

/// Lower and upper estimates of the long-time photon number.
///
/// The upper estimate replaces `1 − e^{−xτ/2} cos ετ` by `max(1, ·)`; for
/// `cos ετ ≥ 0` this is the bound with numerator one.
pub fn limit_bounds(params: &CavityParams) -> Result<(f64, f64)> {
    params.require_strict_damping("limit_bounds")?;
    let p = params.p;
    let x = params.damping();
    let a = coupling_ratio(params);
    let drift = params.sigma_plus / x;
    let c1 = 1.0 - (-0.5 * x * params.tau).exp() * (params.eps * params.tau).cos();
    let lower = 2.0 * a * p * p / (1.0 + (x * params.tau).exp()) + drift;
    let upper = 2.0 * a * p * (1.0 - p) * c1.max(1.0) / -(-x * params.tau).exp_m1() + p * (2.0 * p - 1.0) * a + drift;
    Ok((lower, upper))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitRegime {
    PZero,
    POne,
    SigmaPlusZeroSigmaMinusToZero,
    SigmaMinusToSigmaPlus,
}

impl std::str::FromStr for LimitRegime {
    type Err = CavityError;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "p_zero" => Self::PZero,
            "p_one" => Self::POne,
            "sigma_plus_zero_sigma_minus_to_zero" => Self::SigmaPlusZeroSigmaMinusToZero,
            "sigma_minus_to_sigma_plus" => Self::SigmaMinusToSigmaPlus,
            other => return Err(CavityError::InvalidParameter(format!("unknown limit regime '{other}'"))),
        })
    }
}

/// A limit value; divergent limits are flagged rather than encoded as IEEE infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitValue {
    Finite(f64),
    Infinite,
}

impl LimitValue {
    pub fn finite(&self) -> Option<f64> {
        match self {
            Self::Finite(v) => Some(*v),
            Self::Infinite => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitRegimeReport {
    pub regime: LimitRegime,
    pub value: LimitValue,
}

/// True when `ετ` is an integer multiple of 2π (to 1e-9).
pub fn is_resonant(params: &CavityParams) -> bool {
    let turns = params.eps * params.tau / std::f64::consts::TAU;
    (turns - turns.round()).abs() < 1e-9
}

/// Long-time photon number in the limiting regimes of the beam and reservoir
/// parameters. Parameters not fixed by the regime are taken from `params`.
pub fn limit_regime(params: &CavityParams, regime: LimitRegime) -> Result<LimitRegimeReport> {
    let drift = |p: &CavityParams| -> LimitValue {
        if p.sigma_plus == 0.0 {
            LimitValue::Finite(0.0)
        } else if p.damping() > 0.0 {
            LimitValue::Finite(p.sigma_plus / p.damping())
        } else {
            LimitValue::Infinite
        }
    };
    let value = match regime {
        LimitRegime::PZero => drift(params),
        LimitRegime::POne => match drift(params) {
            LimitValue::Finite(d) => LimitValue::Finite(coupling_ratio(params) + d),
            LimitValue::Infinite => LimitValue::Infinite,
        },
        LimitRegime::SigmaPlusZeroSigmaMinusToZero => ideal_leak_limit(params),
        LimitRegime::SigmaMinusToSigmaPlus => {
            if params.sigma_plus > 0.0 {
                LimitValue::Infinite
            } else {
                ideal_leak_limit(params)
            }
        }
    };
    Ok(LimitRegimeReport { regime, value })
}

/// σ+ = 0, σ− → 0 at fixed p: divergent for 0 < p < 1 off resonance.
fn ideal_leak_limit(params: &CavityParams) -> LimitValue {
    let p = params.p;
    let a = params.shift() * params.shift();
    if p > 0.0 && p < 1.0 {
        if is_resonant(params) {
            // (1 − e^{−s/2})/(1 − e^{−s}) → 1/2 as s → 0.
            LimitValue::Finite(p * (1.0 - p) * a + p * (2.0 * p - 1.0) * a)
        } else {
            LimitValue::Infinite
        }
    } else {
        LimitValue::Finite(p * (2.0 * p - 1.0) * a)
    }
}

/// Linear growth rates `N(nτ)/(nτ)` of the ideal and the open cavity.
pub fn growth_rates(params: &CavityParams, n0: f64, n: u64) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(CavityError::InvalidParameter("growth rate needs n >= 1".into()));
    }
    let t = n as f64 * params.tau;
    let ideal = mean_photons_ideal(params, n0, n)? / t;
    let open = mean_photons_open(params, n0, t)? / t;
    Ok((ideal, open))
}

/// Photon number of the n-step dual written in terms of the geometric ratio
/// `G_n`; exposed for cross-checking the t-form at step boundaries.
pub fn mean_photons_open_steps(params: &CavityParams, n0: f64, n: u64) -> Result<f64> {
    check_n0(n0)?;
    check_open(params)?;
    let p = params.p;
    let x = params.damping();
    let tau = params.tau;
    let nf = n as f64;
    let a = coupling_ratio(params);
    let mu = params.mu();
    let k1 = (ONE - (-mu * tau).exp()).norm_sqr();
    let kn = (ONE - (-mu * (nf * tau)).exp()).norm_sqr();
    Ok((-nf * x * tau).exp() * n0
        + p * (1.0 - p) * a * k1 * geometric_ratio(x, tau, nf)
        + p * p * a * kn
        + params.sigma_plus * one_minus_exp_over(x, nf * tau))
}
