use crate::error::{CavityError, Result};
use crate::linalg::{herm_eig, herm_eigenvalues, trace_product, Mat};
use crate::model::{CavityParams, DensityMatrix};

use super::photons::mean_photons_ideal;

/// Entropy production of the ideal cavity relative to the Gibbs reference at
/// inverse temperature `beta_cavity_ref`: `β_C·ε·(N(nτ) − N0)`.
pub fn entropy_production_ideal(params: &CavityParams, beta_cavity_ref: f64, n0: f64, n: u64) -> Result<f64> {
    if !(beta_cavity_ref > 0.0 && beta_cavity_ref.is_finite()) {
        return Err(CavityError::InvalidParameter(format!(
            "reference inverse temperature must be > 0, got {beta_cavity_ref}"
        )));
    }
    Ok(beta_cavity_ref * params.eps * (mean_photons_ideal(params, n0, n)? - n0))
}

/// Eigenvalues of the reference below this are treated as outside its support.
pub const SUPPORT_TOL: f64 = 1e-14;

/// `Tr(ρ ln ρ − ρ ln ρ_ref)`.
pub fn relative_entropy(rho: &DensityMatrix, rho_ref: &DensityMatrix) -> Result<f64> {
    if rho.dim() != rho_ref.dim() {
        return Err(CavityError::Dimension(format!(
            "relative entropy of {}-dim state against {}-dim reference",
            rho.dim(),
            rho_ref.dim()
        )));
    }
    let own = herm_eig(rho.matrix())?;
    let neg_entropy: f64 = own.values.iter().filter(|&&v| v > 0.0).map(|v| v * v.ln()).sum();
    let refd = herm_eig(rho_ref.matrix())?;
    // ⟨v_j|ρ|v_j⟩ for each reference eigenvector v_j.
    let rv = rho.matrix().dot(&refd.vectors);
    let mut cross = 0.0;
    for (j, &mu) in refd.values.iter().enumerate() {
        let w: f64 = (0..rho.dim())
            .map(|i| (refd.vectors[[i, j]].conj() * rv[[i, j]]).re)
            .sum();
        if mu <= SUPPORT_TOL {
            if w > SUPPORT_TOL {
                return Err(CavityError::Support(w));
            }
            continue;
        }
        cross += w * mu.ln();
    }
    Ok(neg_entropy - cross)
}

/// `Tr(ρ ln ρ) − Tr(ρ L)` for a reference given through its logarithm `L`,
/// e.g. the exact `−βε b*b − ln Z` of a Gibbs state whose smallest weights
/// underflow the support test of [`relative_entropy`].
pub fn relative_entropy_with_log(rho: &DensityMatrix, log_ref: &Mat) -> Result<f64> {
    if log_ref.dim() != (rho.dim(), rho.dim()) {
        return Err(CavityError::Dimension(format!(
            "reference logarithm has shape {:?}, state dimension is {}",
            log_ref.dim(),
            rho.dim()
        )));
    }
    let own = herm_eigenvalues(rho.matrix())?;
    let neg_entropy: f64 = own.iter().filter(|&&v| v > 0.0).map(|v| v * v.ln()).sum();
    Ok(neg_entropy - trace_product(rho.matrix(), log_ref).re)
}

/// Logarithm `−βε b*b − ln Z` of the truncated Gibbs state on cutoff `m`.
pub fn gibbs_log(beta: f64, eps: f64, m: usize) -> Mat {
    let x = beta * eps;
    let ln_z = (-(-x * (m + 1) as f64).exp_m1()).ln() - (-(-x).exp_m1()).ln();
    Mat::from_diag(&ndarray::Array1::from_iter(
        (0..=m).map(|k| crate::linalg::C64::new(-x * k as f64 - ln_z, 0.0)),
    ))
}
