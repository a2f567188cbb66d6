//! Parameters, truncated Fock-space operators and initial states.
//!
//! Basis conventions: Fock index `k` is the photon number; joint operators use
//! row-major cavity-then-atom ordering with the atom basis (excited, ground),
//! so the atomic projector is `η = diag(1, 0)` and joint index `2k + a`.

use std::f64::consts::SQRT_2;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{CavityError, Result};
use crate::linalg::{self, dagger, herm_eig, hermitian_defect, Mat, C64, ONE, ZERO};

/// Default Fock cutoff.
pub const DEFAULT_CUTOFF: usize = 48;
/// Number of top Fock levels whose occupancy forms the tail diagnostic.
pub const TAIL_LEVELS: usize = 4;
/// A channel application aborts when the tail mass exceeds this.
pub const TAIL_GUARD: f64 = 1e-8;
/// Largest probability mass an initial state may lose to truncation.
pub const INITIAL_TAIL_TOL: f64 = 1e-12;

/// Physical constants of the beam-cavity model.
///
/// `mu = i·eps + (sigma_minus - sigma_plus)/2` is always recomputed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityParams {
    pub eps: f64,
    pub lambda: f64,
    pub tau: f64,
    pub p: f64,
    pub sigma_minus: f64,
    pub sigma_plus: f64,
    pub atom_energy: f64,
}

impl CavityParams {
    pub fn new(
        eps: f64,
        lambda: f64,
        tau: f64,
        p: f64,
        sigma_minus: f64,
        sigma_plus: f64,
    ) -> Result<Self> {
        let params = Self {
            eps,
            lambda,
            tau,
            p,
            sigma_minus,
            sigma_plus,
            atom_energy: 1.0,
        };
        params.validate()?;
        Ok(params)
    }

    /// Ideal cavity (no leaking, no pumping).
    pub fn ideal(eps: f64, lambda: f64, tau: f64, p: f64) -> Result<Self> {
        Self::new(eps, lambda, tau, p, 0.0, 0.0)
    }

    /// ε = 1, λ = 1, τ = π, p = 1/2, ideal cavity.
    pub fn canonical_ideal() -> Self {
        Self::ideal(1.0, 1.0, std::f64::consts::PI, 0.5).expect("canonical parameters are valid")
    }

    /// σ− = 0.003, σ+ = 0, ε = 0.5, τ = 0.5, p = 1/2 and λ = |μ| so that λ²/|μ|² = 1.
    pub fn figure1() -> Self {
        let mut p = Self::new(0.5, 0.0, 0.5, 0.5, 0.003, 0.0).expect("valid");
        p.lambda = p.mu().norm();
        p
    }

    pub fn with_atom_energy(mut self, e: f64) -> Result<Self> {
        self.atom_energy = e;
        self.validate()?;
        Ok(self)
    }

    pub fn with_rates(mut self, sigma_minus: f64, sigma_plus: f64) -> Result<Self> {
        self.sigma_minus = sigma_minus;
        self.sigma_plus = sigma_plus;
        self.validate()?;
        Ok(self)
    }

    pub fn with_p(mut self, p: f64) -> Result<Self> {
        self.p = p;
        self.validate()?;
        Ok(self)
    }

    pub fn with_lambda(mut self, lambda: f64) -> Result<Self> {
        self.lambda = lambda;
        self.validate()?;
        Ok(self)
    }

    pub fn with_tau(mut self, tau: f64) -> Result<Self> {
        self.tau = tau;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(CavityError::InvalidParameter(msg));
        let all = [
            self.eps,
            self.lambda,
            self.tau,
            self.p,
            self.sigma_minus,
            self.sigma_plus,
            self.atom_energy,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return bad("all parameters must be finite".into());
        }
        if self.eps <= 0.0 {
            return bad(format!("eps must be > 0, got {}", self.eps));
        }
        if self.tau <= 0.0 {
            return bad(format!("tau must be > 0, got {}", self.tau));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return bad(format!("p must lie in [0, 1], got {}", self.p));
        }
        if self.sigma_minus < 0.0 {
            return bad(format!("sigma_minus must be >= 0, got {}", self.sigma_minus));
        }
        if self.sigma_plus < 0.0 {
            return bad(format!("sigma_plus must be >= 0, got {}", self.sigma_plus));
        }
        if self.atom_energy < 0.0 {
            return bad(format!("atom_energy must be >= 0, got {}", self.atom_energy));
        }
        Ok(())
    }

    /// μ = iε + (σ− − σ+)/2.
    pub fn mu(&self) -> C64 {
        C64::new(0.5 * self.damping(), self.eps)
    }

    /// Net damping σ− − σ+.
    pub fn damping(&self) -> f64 {
        self.sigma_minus - self.sigma_plus
    }

    /// Shift amplitude λ/ε of the diagonalising displacement.
    pub fn shift(&self) -> f64 {
        self.lambda / self.eps
    }

    pub fn is_ideal(&self) -> bool {
        self.sigma_minus == 0.0 && self.sigma_plus == 0.0
    }

    pub fn require_strict_damping(&self, what: &'static str) -> Result<()> {
        if self.sigma_minus > self.sigma_plus {
            Ok(())
        } else {
            Err(CavityError::NeedsStrictDamping(what))
        }
    }
}

/// Dense square complex matrix on a truncated space.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedOperator {
    pub dim: usize,
    pub entries: Mat,
    pub hermitian_hint: bool,
}

impl TruncatedOperator {
    pub fn new(entries: Mat) -> Result<Self> {
        let (r, c) = entries.dim();
        if r != c || r == 0 {
            return Err(CavityError::Dimension(format!("operator must be square and non-empty, got {r}x{c}")));
        }
        Ok(Self {
            dim: r,
            entries,
            hermitian_hint: false,
        })
    }

    /// Tags the operator Hermitian; rejects it if `|A − A†|` exceeds 1e-12.
    pub fn hermitian(entries: Mat) -> Result<Self> {
        let mut op = Self::new(entries)?;
        let defect = hermitian_defect(&op.entries);
        if defect >= 1e-12 {
            return Err(CavityError::Dimension(format!("Hermitian tag refused: defect {defect:.3e}")));
        }
        op.hermitian_hint = true;
        Ok(op)
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            entries: linalg::eye(dim),
            hermitian_hint: true,
        }
    }

    pub fn dagger(&self) -> Self {
        Self {
            dim: self.dim,
            entries: dagger(&self.entries),
            hermitian_hint: self.hermitian_hint,
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.dot(&other.entries),
            hermitian_hint: false,
        }
    }
}

/// `(b, b*, b*b)` at cutoff `M`.
#[derive(Debug, Clone)]
pub struct Ladder {
    pub b: TruncatedOperator,
    pub b_dag: TruncatedOperator,
    pub number_op: TruncatedOperator,
}

pub fn ladder_operators(m: usize) -> Result<Ladder> {
    if m == 0 {
        return Err(CavityError::InvalidParameter("cutoff M must be >= 1".into()));
    }
    let d = m + 1;
    let mut b = Mat::zeros((d, d));
    for k in 1..d {
        b[[k - 1, k]] = C64::new((k as f64).sqrt(), 0.0);
    }
    let b_dag = dagger(&b);
    let number = Mat::from_diag(&ndarray::Array1::from_iter((0..d).map(|k| C64::new(k as f64, 0.0))));
    Ok(Ladder {
        b: TruncatedOperator::new(b)?,
        b_dag: TruncatedOperator::new(b_dag)?,
        number_op: TruncatedOperator::hermitian(number)?,
    })
}

/// Truncated Weyl operator together with its unitarity defect `max|W†W − 1|`.
#[derive(Debug, Clone)]
pub struct WeylOperator {
    pub op: TruncatedOperator,
    pub unitarity_defect: f64,
}

/// `W(ζ) = exp(i(ζ̄ b + ζ b*)/√2)` through the eigendecomposition of the Hermitian generator.
pub fn weyl_operator(zeta: C64, m: usize) -> Result<WeylOperator> {
    let lad = ladder_operators(m)?;
    let gen = (&lad.b.entries * zeta.conj() + &lad.b_dag.entries * zeta) / C64::new(SQRT_2, 0.0);
    let w = linalg::expm_i_hermitian(&gen, 1.0)?;
    let defect = linalg::max_abs_diff(&dagger(&w).dot(&w), &linalg::eye(m + 1));
    Ok(WeylOperator {
        op: TruncatedOperator::new(w)?,
        unitarity_defect: defect,
    })
}

/// Displacement `D(z) = exp(z b* − z̄ b)`; equals `W(−i√2 z)`.
pub fn displacement(z: C64, m: usize) -> Result<Mat> {
    Ok(weyl_operator(C64::new(0.0, -SQRT_2) * z, m)?.op.entries)
}

pub fn kron(a: &TruncatedOperator, b: &TruncatedOperator) -> TruncatedOperator {
    TruncatedOperator {
        dim: a.dim * b.dim,
        entries: linalg::kron(&a.entries, &b.entries),
        hermitian_hint: a.hermitian_hint && b.hermitian_hint,
    }
}

/// `exp(A)`: Hermitian-tagged inputs go through the eigendecomposition,
/// everything else through Padé(13) scaling and squaring.
pub fn matrix_exponential(a: &TruncatedOperator) -> Result<TruncatedOperator> {
    if a.entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(CavityError::NonFinite("matrix exponential input"));
    }
    if a.hermitian_hint {
        let eig = herm_eig(&a.entries)?;
        let mut e = eig.apply_fn(|lam| C64::new(lam.exp(), 0.0));
        linalg::hermitize(&mut e);
        return Ok(TruncatedOperator {
            dim: a.dim,
            entries: e,
            hermitian_hint: true,
        });
    }
    TruncatedOperator::new(linalg::expm(&a.entries)?)
}

/// The unitary `exp(−i t H)` of a Hermitian generator.
pub fn unitary_propagator(h: &TruncatedOperator, t: f64) -> Result<TruncatedOperator> {
    TruncatedOperator::new(linalg::expm_i_hermitian(&h.entries, -t)?)
}

/// Which tensor structure a density matrix lives on; fixes how the tail is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Space {
    Cavity,
    /// Cavity ⊗ one two-level atom.
    Joint,
}

/// Unit-trace Hermitian positive semidefinite operator with its tail diagnostic.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    pub op: TruncatedOperator,
    pub tail_mass: f64,
    pub space: Space,
}

impl DensityMatrix {
    /// Fully validated construction: trace, Hermiticity and positivity.
    pub fn new(entries: Mat, space: Space) -> Result<Self> {
        let rho = Self::from_evolved_unguarded(entries, space)?;
        let min_eig = rho.min_eigenvalue()?;
        if min_eig < -1e-9 {
            return Err(CavityError::InvalidState(format!("minimum eigenvalue {min_eig:.3e} < -1e-9")));
        }
        Ok(rho)
    }

    pub fn cavity(entries: Mat) -> Result<Self> {
        Self::new(entries, Space::Cavity)
    }

    /// Construction used after channel applications: Hermitian part is taken
    /// (after checking the defect is at rounding level), trace checked and tail recorded.
    /// Positivity is left to [`DensityMatrix::min_eigenvalue`].
    pub fn from_evolved_unguarded(mut entries: Mat, space: Space) -> Result<Self> {
        let (r, c) = entries.dim();
        if r != c {
            return Err(CavityError::Dimension(format!("density matrix must be square, got {r}x{c}")));
        }
        if space == Space::Joint && r % 2 != 0 {
            return Err(CavityError::Dimension(format!("joint state needs even dimension, got {r}")));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(CavityError::NonFinite("density matrix"));
        }
        let defect = hermitian_defect(&entries);
        if defect > 1e-9 {
            return Err(CavityError::InvalidState(format!("Hermiticity defect {defect:.3e}")));
        }
        linalg::hermitize(&mut entries);
        let tr = linalg::trace(&entries);
        if (tr - ONE).norm() > 1e-10 {
            return Err(CavityError::InvalidState(format!("trace {tr} differs from 1")));
        }
        let tail_mass = tail_of(&entries, space);
        Ok(Self {
            op: TruncatedOperator {
                dim: r,
                entries,
                hermitian_hint: true,
            },
            tail_mass,
            space,
        })
    }

    /// As [`from_evolved_unguarded`](Self::from_evolved_unguarded) plus the truncation guard.
    pub fn from_evolved(entries: Mat, space: Space) -> Result<Self> {
        let rho = Self::from_evolved_unguarded(entries, space)?;
        rho.check_tail()?;
        Ok(rho)
    }

    pub fn check_tail(&self) -> Result<()> {
        if self.tail_mass > TAIL_GUARD {
            return Err(CavityError::Truncation {
                tail_mass: self.tail_mass,
                limit: TAIL_GUARD,
                cutoff: self.cutoff(),
            });
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.op.dim
    }

    /// Fock cutoff M of the cavity factor.
    pub fn cutoff(&self) -> usize {
        match self.space {
            Space::Cavity => self.op.dim - 1,
            Space::Joint => self.op.dim / 2 - 1,
        }
    }

    pub fn matrix(&self) -> &Mat {
        &self.op.entries
    }

    pub fn trace(&self) -> C64 {
        linalg::trace(&self.op.entries)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        let vals = linalg::herm_eigenvalues(&self.op.entries)?;
        Ok(vals.first().copied().unwrap_or(0.0))
    }

    /// `Tr(ρ A)`.
    pub fn expect(&self, a: &Mat) -> C64 {
        linalg::trace_product(&self.op.entries, a)
    }

    /// `Tr(ρ b*b)` on a cavity state.
    pub fn mean_photons(&self) -> f64 {
        let rho = &self.op.entries;
        match self.space {
            Space::Cavity => (0..rho.nrows()).map(|k| k as f64 * rho[[k, k]].re).sum(),
            Space::Joint => (0..rho.nrows()).map(|i| (i / 2) as f64 * rho[[i, i]].re).sum(),
        }
    }

    /// `Tr(ρ b) = Σ_k √k ρ_{k,k−1}` on a cavity state.
    pub fn first_moment(&self) -> C64 {
        let rho = &self.op.entries;
        match self.space {
            Space::Cavity => (1..rho.nrows()).map(|k| rho[[k, k - 1]] * (k as f64).sqrt()).sum(),
            Space::Joint => {
                let mut acc = ZERO;
                for k in 1..rho.nrows() / 2 {
                    for a in 0..2 {
                        acc += rho[[2 * k + a, 2 * (k - 1) + a]] * (k as f64).sqrt();
                    }
                }
                acc
            }
        }
    }

    /// Photon-number distribution (diagonal of the cavity marginal).
    pub fn populations(&self) -> Vec<f64> {
        let rho = &self.op.entries;
        match self.space {
            Space::Cavity => (0..rho.nrows()).map(|k| rho[[k, k]].re).collect(),
            Space::Joint => (0..rho.nrows() / 2)
                .map(|k| rho[[2 * k, 2 * k]].re + rho[[2 * k + 1, 2 * k + 1]].re)
                .collect(),
        }
    }
}

fn tail_of(entries: &Mat, space: Space) -> f64 {
    let n = entries.nrows();
    let levels = match space {
        Space::Cavity => n,
        Space::Joint => n / 2,
    };
    let start = levels.saturating_sub(TAIL_LEVELS);
    (start..levels)
        .map(|k| match space {
            Space::Cavity => entries[[k, k]].re,
            Space::Joint => entries[[2 * k, 2 * k]].re + entries[[2 * k + 1, 2 * k + 1]].re,
        })
        .sum::<f64>()
        .max(0.0)
}

/// Cavity initial state.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialStateSpec {
    Vacuum,
    /// Gibbs state `(1 − e^{−βε}) e^{−βε b*b}`.
    Gibbs { beta: f64 },
    /// Displaced vacuum with `ω(b) = r e^{iφ}`.
    Coherent { r: f64, phi: f64 },
    Custom(Mat),
}

impl InitialStateSpec {
    /// Initial moments `(⟨b*b⟩, ⟨b⟩)` in the untruncated model, when known in closed form.
    pub fn exact_moments(&self, params: &CavityParams) -> Option<(f64, C64)> {
        match *self {
            Self::Vacuum => Some((0.0, ZERO)),
            Self::Gibbs { beta } => Some((1.0 / (beta * params.eps).exp_m1(), ZERO)),
            Self::Coherent { r, phi } => Some((r * r, C64::from_polar(r, phi))),
            Self::Custom(_) => None,
        }
    }

    pub fn is_gauge_invariant(&self) -> bool {
        match self {
            Self::Vacuum | Self::Gibbs { .. } => true,
            Self::Coherent { r, .. } => *r == 0.0,
            Self::Custom(m) => {
                let n = m.nrows();
                (0..n).all(|i| (0..n).all(|j| i == j || m[[i, j]].norm() < 1e-14))
            }
        }
    }
}

impl std::fmt::Display for InitialStateSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Vacuum => write!(f, "vacuum"),
            Self::Gibbs { beta } => write!(f, "gibbs:{beta}"),
            Self::Coherent { r, phi } => write!(f, "coherent:{r},{phi}"),
            Self::Custom(m) => write!(f, "custom[{}x{}]", m.nrows(), m.ncols()),
        }
    }
}

impl FromStr for InitialStateSpec {
    type Err = CavityError;

    /// Parses `vacuum`, `gibbs:<beta>` or `coherent:<r>,<phi>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: String| CavityError::InvalidParameter(msg);
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad(format!("cannot parse number '{t}'")));
        if s == "vacuum" {
            return Ok(Self::Vacuum);
        }
        if let Some(rest) = s.strip_prefix("gibbs:") {
            let beta = num(rest)?;
            if !(beta > 0.0 && beta.is_finite()) {
                return Err(bad(format!("gibbs beta must be > 0, got {beta}")));
            }
            return Ok(Self::Gibbs { beta });
        }
        if let Some(rest) = s.strip_prefix("coherent:") {
            let (r, phi) = rest
                .split_once(',')
                .ok_or_else(|| bad("coherent state needs '<r>,<phi>'".into()))?;
            let (r, phi) = (num(r)?, num(phi)?);
            if !(r >= 0.0 && r.is_finite() && phi.is_finite()) {
                return Err(bad(format!("coherent amplitude must be >= 0, got {r}")));
            }
            return Ok(Self::Coherent { r, phi });
        }
        Err(bad(format!("unknown initial state '{s}' (expected vacuum, gibbs:<beta> or coherent:<r>,<phi>)")))
    }
}

pub fn initial_state(spec: &InitialStateSpec, params: &CavityParams, m: usize) -> Result<DensityMatrix> {
    let (rho, lost) = initial_state_unguarded(spec, params, m)?;
    if lost > INITIAL_TAIL_TOL {
        return Err(CavityError::Truncation {
            tail_mass: lost,
            limit: INITIAL_TAIL_TOL,
            cutoff: m,
        });
    }
    Ok(rho)
}

/// Truncated, renormalised initial state together with the probability mass
/// lost to the cutoff; used by convergence studies that must report, not
/// reject, poorly truncated starts.
pub fn initial_state_unguarded(spec: &InitialStateSpec, params: &CavityParams, m: usize) -> Result<(DensityMatrix, f64)> {
    if m == 0 {
        return Err(CavityError::InvalidParameter("cutoff M must be >= 1".into()));
    }
    let d = m + 1;
    let (entries, lost) = match spec {
        InitialStateSpec::Vacuum => {
            let mut rho = Mat::zeros((d, d));
            rho[[0, 0]] = ONE;
            (rho, 0.0)
        }
        InitialStateSpec::Gibbs { beta } => {
            if !(*beta > 0.0) {
                return Err(CavityError::InvalidParameter(format!("gibbs beta must be > 0, got {beta}")));
            }
            let x = beta * params.eps;
            let lost = (-x * d as f64).exp();
            let w: Vec<f64> = (0..d).map(|k| (-x * k as f64).exp()).collect();
            let z: f64 = w.iter().sum();
            let rho = Mat::from_diag(&ndarray::Array1::from_iter(w.iter().map(|v| C64::new(v / z, 0.0))));
            (rho, lost)
        }
        InitialStateSpec::Coherent { r, phi } => {
            if !(*r >= 0.0) {
                return Err(CavityError::InvalidParameter(format!("coherent amplitude must be >= 0, got {r}")));
            }
            let z = C64::from_polar(*r, *phi);
            let mut amp = Vec::with_capacity(d);
            let mut c = C64::new((-0.5 * r * r).exp(), 0.0);
            amp.push(c);
            for k in 1..d {
                c = c * z / (k as f64).sqrt();
                amp.push(c);
            }
            let kept: f64 = amp.iter().map(|a| a.norm_sqr()).sum();
            let rho = Mat::from_shape_fn((d, d), |(i, j)| amp[i] * amp[j].conj() / kept);
            (rho, (1.0 - kept).max(0.0))
        }
        InitialStateSpec::Custom(mat) => {
            if mat.nrows() != d {
                return Err(CavityError::Dimension(format!(
                    "custom state has dimension {}, cutoff M={m} needs {d}",
                    mat.nrows()
                )));
            }
            (mat.clone(), 0.0)
        }
    };
    Ok((DensityMatrix::new(entries, Space::Cavity)?, lost))
}

/// Cavity marginal `Tr_A` of a joint cavity⊗atom state.
pub fn partial_trace_atom(joint: &DensityMatrix) -> Result<DensityMatrix> {
    let x = joint.matrix();
    let n = x.nrows();
    if n % 2 != 0 {
        return Err(CavityError::Dimension(format!("partial trace needs even dimension, got {n}")));
    }
    let d = n / 2;
    let reduced = Mat::from_shape_fn((d, d), |(i, j)| x[[2 * i, 2 * j]] + x[[2 * i + 1, 2 * j + 1]]);
    DensityMatrix::from_evolved_unguarded(reduced, Space::Cavity)
}

/// Partial trace of a raw matrix (no state validation).
pub fn partial_trace_atom_raw(x: &Mat) -> Result<Mat> {
    let n = x.nrows();
    if n % 2 != 0 {
        return Err(CavityError::Dimension(format!("partial trace needs even dimension, got {n}")));
    }
    let d = n / 2;
    Ok(Mat::from_shape_fn((d, d), |(i, j)| x[[2 * i, 2 * j]] + x[[2 * i + 1, 2 * j + 1]]))
}

/// Atomic state `diag(p, 1 − p)` in the (excited, ground) basis.
pub fn atom_state(p: f64) -> Mat {
    let mut a = Mat::zeros((2, 2));
    a[[0, 0]] = C64::new(p, 0.0);
    a[[1, 1]] = C64::new(1.0 - p, 0.0);
    a
}

/// Projector η = diag(1, 0) on the excited atomic level.
pub fn eta() -> Mat {
    atom_state(1.0)
}
