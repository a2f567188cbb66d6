//! Heisenberg-picture (dual) maps on the span of `{b*b, b*, b, 1}` and on Weyl operators.

use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use crate::linalg::{Mat, C64, ONE, ZERO};
use crate::model::{ladder_operators, CavityParams};
use crate::special::{geometric_ratio, one_minus_exp_over};

/// `c_number·b*b + c_create·b* + c_annih·b + c_id·1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservablePoly {
    pub c_number: C64,
    pub c_create: C64,
    pub c_annih: C64,
    pub c_id: C64,
}

impl ObservablePoly {
    pub const fn new(c_number: C64, c_create: C64, c_annih: C64, c_id: C64) -> Self {
        Self {
            c_number,
            c_create,
            c_annih,
            c_id,
        }
    }

    pub const fn number() -> Self {
        Self::new(ONE, ZERO, ZERO, ZERO)
    }

    pub const fn create() -> Self {
        Self::new(ZERO, ONE, ZERO, ZERO)
    }

    pub const fn annih() -> Self {
        Self::new(ZERO, ZERO, ONE, ZERO)
    }

    pub const fn identity() -> Self {
        Self::new(ZERO, ZERO, ZERO, ONE)
    }

    fn as_array(&self) -> [C64; 4] {
        [self.c_number, self.c_create, self.c_annih, self.c_id]
    }

    fn from_array(a: [C64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.c_number.im.abs() <= tol
            && self.c_id.im.abs() <= tol
            && (self.c_create - self.c_annih.conj()).norm() <= tol
    }

    /// Expectation in a state with `⟨b*b⟩ = n` and `⟨b⟩ = beta`.
    pub fn pair(&self, n: f64, beta: C64) -> C64 {
        self.c_number * n + self.c_create * beta.conj() + self.c_annih * beta + self.c_id
    }

    pub fn to_matrix(&self, m: usize) -> crate::error::Result<Mat> {
        let lad = ladder_operators(m)?;
        Ok(&lad.number_op.entries * self.c_number
            + &lad.b_dag.entries * self.c_create
            + &lad.b.entries * self.c_annih
            + crate::linalg::eye(m + 1) * self.c_id)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from_array(self.as_array().map(|c| c * s))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.as_array()
            .iter()
            .zip(other.as_array().iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl std::ops::Add for ObservablePoly {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(
            self.c_number + o.c_number,
            self.c_create + o.c_create,
            self.c_annih + o.c_annih,
            self.c_id + o.c_id,
        )
    }
}

/// `(L*)ⁿ(W(ζ)) = scalar_factor · W(evolved_zeta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeylEvolutionResult {
    pub scalar_factor: C64,
    pub evolved_zeta: C64,
}

fn cexp(z: C64) -> C64 {
    z.exp()
}

/// Closed-form n-step dual of the ideal cavity.
pub fn dual_moments_ideal(obs: &ObservablePoly, params: &CavityParams, n: u64) -> ObservablePoly {
    if n == 0 {
        return *obs;
    }
    let (p, alpha) = (params.p, params.shift());
    let th = params.eps * params.tau;
    let nf = n as f64;
    let rot = C64::from_polar(1.0, -nf * th); // e^{−inετ}
    let b_img = ObservablePoly::new(ZERO, ZERO, rot, -(ONE - rot) * (p * alpha));
    let bd_img = ObservablePoly::new(ZERO, rot.conj(), ZERO, -(ONE - rot.conj()) * (p * alpha));
    let growth = nf * p * (1.0 - p) * 2.0 * alpha * alpha * (1.0 - th.cos())
        + p * p * 2.0 * alpha * alpha * (1.0 - (nf * th).cos());
    let n_img = ObservablePoly::new(
        ONE,
        (ONE - rot.conj()) * (p * alpha),
        (ONE - rot) * (p * alpha),
        C64::new(growth, 0.0),
    );
    n_img.scale(obs.c_number) + bd_img.scale(obs.c_create) + b_img.scale(obs.c_annih) + ObservablePoly::identity().scale(obs.c_id)
}

/// One-step dual of the open cavity for duration `t` as a 4×4 matrix acting on
/// coefficient vectors ordered `(b*b, b*, b, 1)`; column `k` is the image of
/// the k-th basis observable.
pub fn transfer_matrix(params: &CavityParams, t: f64) -> [[C64; 4]; 4] {
    let p = params.p;
    let lam = params.lambda;
    let x = params.damping();
    let mu = params.mu();
    let mub = mu.conj();
    let i = C64::new(0.0, 1.0);
    let emu = cexp(-mu * t);
    let emub = cexp(-mub * t);
    let ex = C64::new((-x * t).exp(), 0.0);
    let c_plus = -i * lam * (emub - ex) / mu;
    let c_minus = i * lam * (emu - ex) / mub;
    let k = lam * lam / mu.norm_sqr() * (ONE - emu).norm_sqr();
    let drift = params.sigma_plus * one_minus_exp_over(x, t);
    let mut m = [[ZERO; 4]; 4];
    m[0][0] = ex;
    m[1][0] = c_plus * p;
    m[2][0] = c_minus * p;
    m[3][0] = C64::new(p * k + drift, 0.0);
    m[1][1] = emub;
    m[3][1] = i * lam / mub * (ONE - emub) * p;
    m[2][2] = emu;
    m[3][2] = -i * lam / mu * (ONE - emu) * p;
    m[3][3] = ONE;
    m
}

fn mat4_mul(a: &[[C64; 4]; 4], b: &[[C64; 4]; 4]) -> [[C64; 4]; 4] {
    let mut c = [[ZERO; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            c[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

fn mat4_pow(a: &[[C64; 4]; 4], mut n: u64) -> [[C64; 4]; 4] {
    let mut result = [[ZERO; 4]; 4];
    for (i, row) in result.iter_mut().enumerate() {
        row[i] = ONE;
    }
    let mut base = *a;
    while n > 0 {
        if n & 1 == 1 {
            result = mat4_mul(&result, &base);
        }
        base = mat4_mul(&base, &base);
        n >>= 1;
    }
    result
}

/// n-step dual of the open cavity through the power of the 4×4 transfer matrix.
pub fn dual_moments_open(obs: &ObservablePoly, params: &CavityParams, n: u64) -> ObservablePoly {
    let t = mat4_pow(&transfer_matrix(params, params.tau), n);
    let c = obs.as_array();
    let mut out = [ZERO; 4];
    for (i, o) in out.iter_mut().enumerate() {
        *o = (0..4).map(|k| t[i][k] * c[k]).sum();
    }
    ObservablePoly::from_array(out)
}

/// Closed-form n-step image of `b*b` for the open cavity.
///
/// The identity coefficient is `p(1−p)(λ²/|μ|²)|1−e^{−μτ}|²·G_n + p²(λ²/|μ|²)|1−e^{−nμτ}|²
/// + σ+(1−e^{−nxτ})/x` with `G_n = (1−e^{−nxτ})/(1−e^{−xτ})`, obtained by
/// iterating the one-step map in closed form.
pub fn dual_number_open_closed(params: &CavityParams, n: f64) -> ObservablePoly {
    let p = params.p;
    let lam = params.lambda;
    let x = params.damping();
    let tau = params.tau;
    let mu = params.mu();
    let mub = mu.conj();
    let i = C64::new(0.0, 1.0);
    let a = lam * lam / mu.norm_sqr();
    let exn = C64::new((-n * x * tau).exp(), 0.0);
    let emu_n = cexp(-mu * (n * tau));
    let emub_n = cexp(-mub * (n * tau));
    let g = geometric_ratio(x, tau, n);
    let k1 = a * (ONE - cexp(-mu * tau)).norm_sqr();
    let c_id = p * (1.0 - p) * k1 * g + p * p * a * (ONE - emu_n).norm_sqr() + params.sigma_plus * one_minus_exp_over(x, n * tau);
    ObservablePoly::new(
        exn,
        i * lam / mu * (exn - emub_n) * p,
        -i * lam / mub * (exn - emu_n) * p,
        C64::new(c_id, 0.0),
    )
}

/// Closed-form n-step images of `b` and `b*`.
pub fn dual_annih_open_closed(params: &CavityParams, n: f64) -> ObservablePoly {
    let mu = params.mu();
    let e = cexp(-mu * (n * params.tau));
    ObservablePoly::new(ZERO, ZERO, e, -C64::new(0.0, 1.0) * params.lambda / mu * (ONE - e) * params.p)
}

/// Exponent `φ_k` of the k-th factor of the Weyl product; purely imaginary.
fn weyl_phase(params: &CavityParams, zeta: C64, k: f64) -> C64 {
    let mu = params.mu();
    let mub = mu.conj();
    let tau = params.tau;
    let lam = params.lambda;
    let a = lam / mu * (ONE - cexp(-mu * tau)) * cexp(-mu * (k * tau)) * zeta.conj();
    let b = lam / mub * (ONE - cexp(-mub * tau)) * cexp(-mub * (k * tau)) * zeta;
    (a - b) / SQRT_2
}

/// `−|ζ|²/4·(σ−+σ+)(1−e^{−n x τ})/x` with its `x → 0` limit.
pub fn weyl_gaussian_exponent(params: &CavityParams, zeta: C64, n: f64) -> f64 {
    -zeta.norm_sqr() / 4.0 * (params.sigma_minus + params.sigma_plus) * one_minus_exp_over(params.damping(), n * params.tau)
}

/// Product `∏_{k=0}^{n−1} (p e^{φ_k} + 1 − p)`; summed in log space beyond 10⁴ factors.
pub fn weyl_product(params: &CavityParams, zeta: C64, n: u64) -> C64 {
    let p = params.p;
    let factor = |k: u64| C64::new(1.0 - p, 0.0) + cexp(weyl_phase(params, zeta, k as f64)) * p;
    if n <= 10_000 {
        let mut acc = ONE;
        for k in 0..n {
            acc *= factor(k);
        }
        return acc;
    }
    let mut log_mod = 0.0_f64;
    let mut comp = 0.0_f64;
    let mut arg = 0.0_f64;
    for k in 0..n {
        let f = factor(k);
        let r = f.norm();
        if r == 0.0 {
            return ZERO;
        }
        // Kahan summation of ln|f|.
        let y = r.ln() - comp;
        let t = log_mod + y;
        comp = (t - log_mod) - y;
        log_mod = t;
        arg += f.arg();
    }
    C64::from_polar(log_mod.exp(), arg)
}

pub fn dual_weyl_open(zeta: C64, params: &CavityParams, n: u64) -> WeylEvolutionResult {
    if n == 0 {
        return WeylEvolutionResult {
            scalar_factor: ONE,
            evolved_zeta: zeta,
        };
    }
    let gauss = weyl_gaussian_exponent(params, zeta, n as f64).exp();
    let prod = weyl_product(params, zeta, n);
    WeylEvolutionResult {
        scalar_factor: prod * gauss,
        evolved_zeta: cexp(-params.mu().conj() * (n as f64 * params.tau)) * zeta,
    }
}
