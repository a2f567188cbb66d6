//! Limiting characteristic functional and the Araki–Segal positivity test.

use serde::{Deserialize, Serialize};

use crate::channels::{weyl_gaussian_exponent, weyl_product};
use crate::error::{CavityError, Result};
use crate::linalg::{herm_eigenvalues, Mat, C64};
use crate::model::CavityParams;

/// Default relative accuracy of [`weyl_char_limit`].
pub const WEYL_LIMIT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeylLimit {
    pub value: C64,
    /// Number of product factors kept.
    pub terms: u64,
    /// Certified bound on the relative error from dropping the remaining factors.
    pub tail_bound: f64,
}

/// Prefactor `C` of the geometric bound `|h_k| ≤ C e^{−k(σ−−σ+)τ/2}` on the
/// deviation of the k-th product factor from one.
pub fn weyl_factor_bound(params: &CavityParams, zeta: C64) -> f64 {
    let mu = params.mu();
    let half = 0.5 * params.damping() * params.tau;
    2.0 * std::f64::consts::SQRT_2 * params.p * params.lambda * zeta.norm() / mu.norm_sqr()
        * (0.5 * params.damping() + params.eps)
        * (1.0 + (-half).exp())
}

/// Relative error bound `exp(S) − 1` for the tail sum `S = Σ_{k≥K} |h_k|`.
pub fn weyl_tail_bound(params: &CavityParams, zeta: C64, terms: u64) -> f64 {
    let q = (-0.5 * params.damping() * params.tau).exp();
    let sum = weyl_factor_bound(params, zeta) * q.powf(terms as f64) / (1.0 - q);
    sum.exp_m1()
}

fn required_terms(params: &CavityParams, zeta: C64, tol: f64) -> u64 {
    let c = weyl_factor_bound(params, zeta);
    if c == 0.0 {
        return 0;
    }
    let rate = 0.5 * params.damping() * params.tau;
    let q = (-rate).exp();
    // Smallest K with 2·C q^K/(1−q) ≤ ln(1 + tol).
    let target = tol.ln_1p() / 2.0;
    let k = ((2.0 * c / (1.0 - q) / target).ln() / rate).ceil().max(0.0);
    let mut k = k as u64;
    while weyl_tail_bound(params, zeta, k) * 2.0 > tol {
        k += 1;
    }
    k
}

pub fn weyl_char_limit_detailed(zeta: C64, params: &CavityParams, tol: f64) -> Result<WeylLimit> {
    params.require_strict_damping("weyl_char_limit")?;
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(CavityError::InvalidParameter(format!("tolerance must be > 0, got {tol}")));
    }
    let terms = required_terms(params, zeta, tol);
    let gauss = weyl_gaussian_exponent(params, zeta, f64::INFINITY).exp();
    let prod = weyl_product(params, zeta, terms);
    Ok(WeylLimit {
        value: prod * gauss,
        terms,
        tail_bound: weyl_tail_bound(params, zeta, terms),
    })
}

/// Long-time characteristic functional `lim ω_n(W(ζ))`, independent of the
/// initial state, with relative error below `tol`.
pub fn weyl_char_limit(zeta: C64, params: &CavityParams, tol: f64) -> Result<C64> {
    Ok(weyl_char_limit_detailed(zeta, params, tol)?.value)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArakiSegalReport {
    pub passed: bool,
    pub min_eigenvalue: f64,
    pub points: usize,
}

/// Largest number of sample points accepted by [`araki_segal_check`].
pub const ARAKI_SEGAL_MAX_POINTS: usize = 64;

/// Positivity test of a characteristic functional: the matrix
/// `ω(W(f_j − f_k)) e^{−i Im(f̄_j f_k)/2}` must be positive semidefinite.
pub fn araki_segal_check(functional: impl Fn(C64) -> C64, points: &[C64]) -> Result<ArakiSegalReport> {
    if points.is_empty() || points.len() > ARAKI_SEGAL_MAX_POINTS {
        return Err(CavityError::InvalidParameter(format!(
            "Araki-Segal check needs 1..={ARAKI_SEGAL_MAX_POINTS} points, got {}",
            points.len()
        )));
    }
    let n = points.len();
    let mut g = Mat::from_shape_fn((n, n), |(j, k)| {
        let (fj, fk) = (points[j], points[k]);
        let twist = (fj.conj() * fk).im;
        functional(fj - fk) * C64::from_polar(1.0, -0.5 * twist)
    });
    if g.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(CavityError::NonFinite("Araki-Segal matrix"));
    }
    crate::linalg::hermitize(&mut g);
    let min_eigenvalue = herm_eigenvalues(&g)?[0];
    Ok(ArakiSegalReport {
        passed: min_eigenvalue >= -1e-8,
        min_eigenvalue,
        points: n,
    })
}
