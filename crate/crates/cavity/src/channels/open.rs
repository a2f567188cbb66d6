//! One-step maps of the leaky, pumped cavity.
//!
//! The atom state is diagonal and `η` is conserved, so the joint state stays
//! block-diagonal over the atomic level. The excited block evolves with
//! `H_e = εb*b + λ(b + b*)` and the ground block with `εb*b`, both damped by
//! jumps `b` (rate σ−) and `b*` (rate σ+). [`OpenChannel`] applies exactly
//! these two cavity-only generators; [`OpenShift`] uses the equivalent
//! shifted form with jumps `b − λ/ε`, `b* − λ/ε`; [`OpenJoint`] exponentiates
//! the full joint generator as a dense superoperator.

use std::collections::HashMap;
use std::sync::Mutex;

use super::ideal::{check_cutoff, check_dt};
use super::lindblad::LindbladAction;
use crate::error::{CavityError, Result};
use crate::linalg::{self, dagger, Mat, C64, ONE};
use crate::model::{atom_state, displacement, ladder_operators, CavityParams, DensityMatrix, Space};

/// Largest cutoff accepted by the joint-space oracle.
pub const JOINT_MAX_CUTOFF: usize = 16;

#[derive(Debug, Clone)]
pub struct OpenChannel {
    params: CavityParams,
    m: usize,
    excited: LindbladAction,
    ground: LindbladAction,
}

impl OpenChannel {
    pub fn new(params: &CavityParams, m: usize) -> Result<Self> {
        let lad = ladder_operators(m)?;
        let b = lad.b.entries;
        let bd = lad.b_dag.entries;
        let n = lad.number_op.entries;
        let h0 = &n * C64::new(params.eps, 0.0);
        let he = &h0 + &((&b + &bd) * C64::new(params.lambda, 0.0));
        let jumps = [(params.sigma_minus, b), (params.sigma_plus, bd)];
        Ok(Self {
            params: *params,
            m,
            excited: LindbladAction::new(&he, &jumps),
            ground: LindbladAction::new(&h0, &jumps),
        })
    }

    pub fn cutoff(&self) -> usize {
        self.m
    }

    pub fn params(&self) -> &CavityParams {
        &self.params
    }

    /// The two conditional flights `(e^{dt L_e}(x), e^{dt L_0}(x))`: atom excited, atom in the ground state.
    pub fn branches(&self, x: &Mat, dt: f64) -> (Mat, Mat) {
        (self.excited.exp_apply(dt, x), self.ground.exp_apply(dt, x))
    }

    /// Unnormalised action on an arbitrary matrix (used for dense maps and duality).
    pub fn apply_raw(&self, x: &Mat, dt: f64) -> Mat {
        let p = self.params.p;
        let ground = if p < 1.0 {
            self.ground.exp_apply(dt, x) * C64::new(1.0 - p, 0.0)
        } else {
            Mat::zeros(x.dim())
        };
        if p > 0.0 {
            ground + self.excited.exp_apply(dt, x) * C64::new(p, 0.0)
        } else {
            ground
        }
    }

    pub fn step_dt(&self, rho: &DensityMatrix, dt: f64) -> Result<DensityMatrix> {
        check_dt(&self.params, dt)?;
        check_cutoff(rho, self.m)?;
        DensityMatrix::from_evolved(self.apply_raw(rho.matrix(), dt), Space::Cavity)
    }

    pub fn step(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        self.step_dt(rho, self.params.tau)
    }

    /// Dense `(M+1)² × (M+1)²` matrix of the map on row-major vectorised matrices.
    pub fn dense_map(&self, dt: f64) -> Mat {
        dense_map_of(self.m + 1, |x| self.apply_raw(x, dt))
    }
}

pub fn open_step_reduced(rho: &DensityMatrix, params: &CavityParams, dt: f64) -> Result<DensityMatrix> {
    OpenChannel::new(params, rho.cutoff())?.step_dt(rho, dt)
}

/// Dense matrix of a linear map on `d × d` matrices in row-major vectorisation.
pub fn dense_map_of(d: usize, f: impl Fn(&Mat) -> Mat) -> Mat {
    let mut out = Mat::zeros((d * d, d * d));
    let mut e = Mat::zeros((d, d));
    for i in 0..d {
        for j in 0..d {
            e[[i, j]] = ONE;
            let col = f(&e);
            e[[i, j]] = C64::new(0.0, 0.0);
            for (k, z) in col.iter().enumerate() {
                out[[k, i * d + j]] = *z;
            }
        }
    }
    out
}

/// Shifted form `p·S⁻¹(e^{dt L_{λ,σ}}(S(ρ))) + (1 − p)·e^{dt L_{0,σ}}(ρ)`.
#[derive(Debug, Clone)]
pub struct OpenShift {
    params: CavityParams,
    m: usize,
    shifted: LindbladAction,
    ground: LindbladAction,
    shift: Mat,
    shift_dag: Mat,
}

impl OpenShift {
    pub fn new(params: &CavityParams, m: usize) -> Result<Self> {
        let lad = ladder_operators(m)?;
        let b = lad.b.entries;
        let bd = lad.b_dag.entries;
        let h0 = &lad.number_op.entries * C64::new(params.eps, 0.0);
        let alpha = C64::new(params.shift(), 0.0);
        let id = linalg::eye(m + 1);
        let shifted_jumps = [
            (params.sigma_minus, &b - &(&id * alpha)),
            (params.sigma_plus, &bd - &(&id * alpha)),
        ];
        let jumps = [(params.sigma_minus, b), (params.sigma_plus, bd)];
        let shift = displacement(alpha, m)?;
        Ok(Self {
            params: *params,
            m,
            shifted: LindbladAction::new(&h0, &shifted_jumps),
            ground: LindbladAction::new(&h0, &jumps),
            shift_dag: dagger(&shift),
            shift,
        })
    }

    pub fn apply_raw(&self, x: &Mat, dt: f64) -> Mat {
        let p = self.params.p;
        let mut out = self.ground.exp_apply(dt, x) * C64::new(1.0 - p, 0.0);
        if p > 0.0 {
            let s = self.shift.dot(x).dot(&self.shift_dag);
            let evolved = self.shifted.exp_apply(dt, &s);
            out = out + self.shift_dag.dot(&evolved).dot(&self.shift) * C64::new(p, 0.0);
        }
        out
    }

    pub fn step_dt(&self, rho: &DensityMatrix, dt: f64) -> Result<DensityMatrix> {
        check_dt(&self.params, dt)?;
        check_cutoff(rho, self.m)?;
        DensityMatrix::from_evolved(self.apply_raw(rho.matrix(), dt), Space::Cavity)
    }
}

/// Row-major vectorised Lindbladian `d² × d²` of `H` and jumps.
pub fn dense_lindbladian(h: &Mat, jumps: &[(f64, Mat)]) -> Mat {
    let d = h.nrows();
    let id = linalg::eye(d);
    let minus_i = C64::new(0.0, -1.0);
    let mut l = (linalg::kron(h, &id) - linalg::kron(&id, &h.t().to_owned())) * minus_i;
    for (rate, j) in jumps {
        if *rate == 0.0 {
            continue;
        }
        let jdj = dagger(j).dot(j);
        let jc = j.mapv(|z| z.conj());
        let term = linalg::kron(j, &jc)
            - linalg::kron(&jdj, &id) * C64::new(0.5, 0.0)
            - linalg::kron(&id, &jdj.t().to_owned()) * C64::new(0.5, 0.0);
        l = l + term * C64::new(*rate, 0.0);
    }
    l
}

pub fn vectorize(x: &Mat) -> ndarray::Array1<C64> {
    ndarray::Array1::from_iter(x.iter().cloned())
}

pub fn unvectorize(v: &ndarray::Array1<C64>, d: usize) -> Mat {
    Mat::from_shape_vec((d, d), v.to_vec()).expect("length d²")
}

/// Dense joint-space oracle: `e^{dt L}` of the full cavity⊗atom generator,
/// built by Padé scaling and squaring, then the partial trace.
#[derive(Debug)]
pub struct OpenJoint {
    params: CavityParams,
    m: usize,
    generator: Mat,
    cache: Mutex<HashMap<u64, Mat>>,
}

impl OpenJoint {
    pub fn new(params: &CavityParams, m: usize) -> Result<Self> {
        if m > JOINT_MAX_CUTOFF {
            return Err(CavityError::Dimension(format!(
                "joint-space oracle needs M <= {JOINT_MAX_CUTOFF}, got {m}"
            )));
        }
        let h = super::ideal::joint_hamiltonian(params, m)?.entries;
        let lad = ladder_operators(m)?;
        let b = linalg::kron(&lad.b.entries, &linalg::eye(2));
        let bd = linalg::kron(&lad.b_dag.entries, &linalg::eye(2));
        let generator = dense_lindbladian(&h, &[(params.sigma_minus, b), (params.sigma_plus, bd)]);
        Ok(Self {
            params: *params,
            m,
            generator,
            cache: Mutex::new(HashMap::new()),
        })
    }

    fn propagator(&self, dt: f64) -> Result<Mat> {
        let key = dt.to_bits();
        if let Some(p) = self.cache.lock().expect("cache lock").get(&key) {
            return Ok(p.clone());
        }
        let p = linalg::expm(&(&self.generator * C64::new(dt, 0.0)))?;
        self.cache.lock().expect("cache lock").insert(key, p.clone());
        Ok(p)
    }

    /// Cavity marginal of the joint evolution of `x ⊗ diag(p, 1 − p)`, without state checks.
    pub fn apply_raw(&self, x: &Mat, dt: f64) -> Result<Mat> {
        let d = 2 * (self.m + 1);
        let j0 = linalg::kron(x, &atom_state(self.params.p));
        let v = self.propagator(dt)?.dot(&vectorize(&j0));
        crate::model::partial_trace_atom_raw(&unvectorize(&v, d))
    }

    /// Joint state after `dt` starting from `ρ ⊗ diag(p, 1 − p)`.
    pub fn joint_state(&self, rho: &DensityMatrix, dt: f64) -> Result<DensityMatrix> {
        check_dt(&self.params, dt)?;
        check_cutoff(rho, self.m)?;
        let d = 2 * (self.m + 1);
        let j0 = linalg::kron(rho.matrix(), &atom_state(self.params.p));
        let v = self.propagator(dt)?.dot(&vectorize(&j0));
        DensityMatrix::from_evolved(unvectorize(&v, d), Space::Joint)
    }

    pub fn step_dt(&self, rho: &DensityMatrix, dt: f64) -> Result<(DensityMatrix, DensityMatrix)> {
        let joint = self.joint_state(rho, dt)?;
        let cav = crate::model::partial_trace_atom_raw(joint.matrix())?;
        Ok((DensityMatrix::from_evolved(cav, Space::Cavity)?, joint))
    }
}

pub fn open_step_joint(rho: &DensityMatrix, params: &CavityParams, m: usize, dt: f64) -> Result<DensityMatrix> {
    Ok(OpenJoint::new(params, m)?.step_dt(rho, dt)?.0)
}
