//! One-step maps of the ideal (unitary) cavity.

use crate::error::Result;
use crate::linalg::{self, dagger, herm_eig, HermEig, Mat, C64};
use crate::model::{
    atom_state, displacement, eta, kron, ladder_operators, partial_trace_atom_raw, CavityParams, DensityMatrix,
    Space, TruncatedOperator,
};

/// `εb*b⊗1 + E·1⊗η + λ(b*+b)⊗η` on cavity⊗(in-cavity atom).
pub fn joint_hamiltonian(params: &CavityParams, m: usize) -> Result<TruncatedOperator> {
    let lad = ladder_operators(m)?;
    let one_a = TruncatedOperator::identity(2);
    let one_c = TruncatedOperator::identity(m + 1);
    let eta_op = TruncatedOperator::hermitian(eta())?;
    let x = TruncatedOperator::hermitian(&lad.b.entries + &lad.b_dag.entries)?;
    let h = kron(&lad.number_op, &one_a).entries * C64::new(params.eps, 0.0)
        + kron(&one_c, &eta_op).entries * C64::new(params.atom_energy, 0.0)
        + kron(&x, &eta_op).entries * C64::new(params.lambda, 0.0);
    TruncatedOperator::hermitian(h)
}

/// Joint-space evolution with the Hamiltonian diagonalised once.
#[derive(Debug, Clone)]
pub struct IdealDirect {
    params: CavityParams,
    m: usize,
    eig: HermEig,
    h: Mat,
}

impl IdealDirect {
    pub fn new(params: &CavityParams, m: usize) -> Result<Self> {
        let h = joint_hamiltonian(params, m)?;
        let eig = herm_eig(&h.entries)?;
        Ok(Self {
            params: *params,
            m,
            eig,
            h: h.entries,
        })
    }

    pub fn cutoff(&self) -> usize {
        self.m
    }

    pub fn hamiltonian(&self) -> &Mat {
        &self.h
    }

    /// `exp(−i t H)`.
    pub fn propagator(&self, t: f64) -> Mat {
        self.eig.apply_fn(|lam| C64::from_polar(1.0, -t * lam))
    }

    /// Joint state `e^{−i dt H}(ρ ⊗ ρ_atom)e^{i dt H}` before the partial trace.
    pub fn joint_state(&self, rho: &DensityMatrix, dt: f64) -> Result<DensityMatrix> {
        let u = self.propagator(dt);
        let j0 = linalg::kron(rho.matrix(), &atom_state(self.params.p));
        let out = u.dot(&j0).dot(&dagger(&u));
        DensityMatrix::from_evolved(out, Space::Joint)
    }

    pub fn step(&self, rho: &DensityMatrix, dt: f64) -> Result<DensityMatrix> {
        let joint = self.joint_state(rho, dt)?;
        DensityMatrix::from_evolved(partial_trace_atom_raw(joint.matrix())?, Space::Cavity)
    }

    /// `⟨H⟩` on a joint state.
    pub fn energy(&self, joint: &DensityMatrix) -> f64 {
        joint.expect(&self.h).re
    }
}

pub fn ideal_step_direct(rho: &DensityMatrix, params: &CavityParams, m: usize, dt: f64) -> Result<DensityMatrix> {
    check_dt(params, dt)?;
    check_cutoff(rho, m)?;
    IdealDirect::new(params, m)?.step(rho, dt)
}

/// Shift form: `p·S⁻¹(U S(ρ) U†) + (1 − p)·U ρ U†` with `S(ρ) = D(λ/ε) ρ D(λ/ε)†`
/// and `U = e^{−iτεb*b}`.
#[derive(Debug, Clone)]
pub struct IdealShift {
    p: f64,
    shift: Mat,
    shift_dag: Mat,
    phases: Vec<C64>,
}

impl IdealShift {
    pub fn new(params: &CavityParams, m: usize) -> Result<Self> {
        let shift = displacement(C64::new(params.shift(), 0.0), m)?;
        let shift_dag = dagger(&shift);
        let phases = (0..=m)
            .map(|k| C64::from_polar(1.0, -params.tau * params.eps * k as f64))
            .collect();
        Ok(Self {
            p: params.p,
            shift,
            shift_dag,
            phases,
        })
    }

    fn rotate(&self, x: &Mat) -> Mat {
        Mat::from_shape_fn(x.dim(), |(i, j)| self.phases[i] * x[[i, j]] * self.phases[j].conj())
    }

    pub fn apply_raw(&self, rho: &Mat) -> Mat {
        let free = self.rotate(rho);
        if self.p == 0.0 {
            return free;
        }
        let shifted = self.shift.dot(rho).dot(&self.shift_dag);
        let back = self.shift_dag.dot(&self.rotate(&shifted)).dot(&self.shift);
        back * C64::new(self.p, 0.0) + free * C64::new(1.0 - self.p, 0.0)
    }

    pub fn step(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        DensityMatrix::from_evolved(self.apply_raw(rho.matrix()), Space::Cavity)
    }
}

pub fn ideal_step_shift(rho: &DensityMatrix, params: &CavityParams) -> Result<DensityMatrix> {
    IdealShift::new(params, rho.cutoff())?.step(rho)
}

pub(crate) fn check_dt(params: &CavityParams, dt: f64) -> Result<()> {
    if !(dt > 0.0 && dt <= params.tau * (1.0 + 1e-12)) {
        return Err(crate::error::CavityError::InvalidParameter(format!(
            "dt must lie in (0, tau={}], got {dt}",
            params.tau
        )));
    }
    Ok(())
}

pub(crate) fn check_cutoff(rho: &DensityMatrix, m: usize) -> Result<()> {
    if rho.cutoff() != m || rho.space != Space::Cavity {
        return Err(crate::error::CavityError::Dimension(format!(
            "state has cutoff {} but M={m} was requested",
            rho.cutoff()
        )));
    }
    Ok(())
}
