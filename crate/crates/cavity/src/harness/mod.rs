//! Numeric-vs-analytic certification, convergence studies, sweeps and dataset emission.

mod dataset;
pub mod emit;
mod engine;
mod predict;
mod report;
mod suite;
mod table;

pub use dataset::{
    convergence_study, figure1_dataset, run_sweep, simulate_dataset, Cell, ConvergenceOutcome, ConvergenceQuantity,
    Dataset, SweepParam, SweepQuantity, SweepSpec, CONVERGED_TAIL,
};
pub use report::{ComparisonReport, Scalar, Summary};
pub use suite::{
    compare_suite, weyl_tag, Abort, SuiteOutcome, BEAM_TERM_TOL, DEFAULT_ALGEBRA_TOL, DEFAULT_SIM_TOL,
    ENTROPY_BETA, ENTROPY_MAX_STEPS, TRACE_TOL, WEYL_PROBES,
};
pub use table::{analytic_dataset, AnalyticQuantity};
