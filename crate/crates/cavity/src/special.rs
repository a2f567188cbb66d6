//! Removable singularities at σ− = σ+.
//!
//! Below `|x t| < 1e-6` the exact expressions lose digits to cancellation and
//! are replaced by three-term Taylor expansions.

const SERIES_CUTOFF: f64 = 1e-6;

/// `(1 − e^{−x t})/x`, equal to `t` at `x = 0`.
pub fn one_minus_exp_over(x: f64, t: f64) -> f64 {
    let y = x * t;
    if y.abs() < SERIES_CUTOFF {
        t * (1.0 - y / 2.0 + y * y / 6.0)
    } else {
        -(-y).exp_m1() / x
    }
}

/// `(1 − e^{−n x τ})/(1 − e^{−x τ})`, equal to `n` at `x = 0`.
pub fn geometric_ratio(x: f64, tau: f64, n: f64) -> f64 {
    one_minus_exp_over(x, n * tau) / one_minus_exp_over(x, tau)
}
