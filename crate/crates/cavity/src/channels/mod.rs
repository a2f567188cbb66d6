//! Schrödinger-picture one-step maps and their Heisenberg-picture duals.

mod dual;
mod ideal;
pub mod lindblad;
mod open;

pub use dual::{
    dual_annih_open_closed, dual_moments_ideal, dual_moments_open, dual_number_open_closed, dual_weyl_open,
    transfer_matrix, weyl_gaussian_exponent, weyl_product, ObservablePoly, WeylEvolutionResult,
};
pub use ideal::{ideal_step_direct, ideal_step_shift, joint_hamiltonian, IdealDirect, IdealShift};
pub use open::{
    dense_lindbladian, dense_map_of, open_step_joint, open_step_reduced, unvectorize, vectorize, OpenChannel,
    OpenJoint, OpenShift, JOINT_MAX_CUTOFF,
};
