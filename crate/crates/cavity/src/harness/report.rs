use serde::{Deserialize, Serialize};

use crate::linalg::C64;

/// Real or complex value carried by a report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Real(f64),
    Complex { re: f64, im: f64 },
}

impl Scalar {
    pub fn as_complex(&self) -> C64 {
        match *self {
            Scalar::Real(v) => C64::new(v, 0.0),
            Scalar::Complex { re, im } => C64::new(re, im),
        }
    }

    pub fn abs(&self) -> f64 {
        self.as_complex().norm()
    }
}

impl From<f64> for Scalar {
    fn from(v: f64) -> Self {
        Scalar::Real(v)
    }
}

impl From<C64> for Scalar {
    fn from(z: C64) -> Self {
        Scalar::Complex { re: z.re, im: z.im }
    }
}

/// One numeric-vs-analytic check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub quantity: String,
    /// Number of atoms that have passed (or the cutoff, for convergence studies).
    pub step: u64,
    pub analytic: Scalar,
    pub numeric: Scalar,
    pub abs_err: f64,
    pub rel_err: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub trunc_dim: usize,
    pub tail_mass: f64,
}

impl ComparisonReport {
    /// Builds the report and its verdict: passes when either error is within `tolerance`.
    pub fn new(
        quantity: impl Into<String>,
        step: u64,
        analytic: Scalar,
        numeric: Scalar,
        tolerance: f64,
        trunc_dim: usize,
        tail_mass: f64,
    ) -> Self {
        let abs_err = (analytic.as_complex() - numeric.as_complex()).norm();
        let abs_err = if abs_err.is_finite() { abs_err } else { f64::MAX };
        let rel_err = (abs_err / analytic.abs().max(f64::MIN_POSITIVE)).min(f64::MAX);
        Self {
            quantity: quantity.into(),
            step,
            analytic,
            numeric,
            abs_err,
            rel_err,
            tolerance,
            passed: abs_err <= tolerance || rel_err <= tolerance,
            trunc_dim,
            tail_mass,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Summary {
    pub passed: usize,
    pub failed: usize,
}

impl Summary {
    pub fn of(reports: &[ComparisonReport]) -> Self {
        let passed = reports.iter().filter(|r| r.passed).count();
        Self {
            passed,
            failed: reports.len() - passed,
        }
    }
}
