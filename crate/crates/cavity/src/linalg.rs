//! Dense complex linear algebra on `ndarray` matrices.
//!
//! Hermitian eigendecomposition goes through `nalgebra`; the general matrix
//! exponential is a scaling-and-squaring diagonal Padé(13) approximant.

use nalgebra::DMatrix;
use ndarray::{Array2, Axis};
use num_complex::Complex64;

use crate::error::{CavityError, Result};

pub type C64 = Complex64;
pub type Mat = Array2<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn eye(n: usize) -> Mat {
    Array2::from_diag_elem(n, ONE)
}

pub fn dagger(a: &Mat) -> Mat {
    a.t().mapv(|z| z.conj())
}

pub fn trace(a: &Mat) -> C64 {
    a.diag().sum()
}

/// `Tr(a b)` without forming the product.
pub fn trace_product(a: &Mat, b: &Mat) -> C64 {
    let n = a.nrows();
    let mut acc = ZERO;
    for i in 0..n {
        for k in 0..n {
            acc += a[[i, k]] * b[[k, i]];
        }
    }
    acc
}

pub fn max_abs(a: &Mat) -> f64 {
    a.iter().fold(0.0_f64, |m, z| m.max(z.norm()))
}

pub fn max_abs_diff(a: &Mat, b: &Mat) -> f64 {
    a.iter()
        .zip(b.iter())
        .fold(0.0_f64, |m, (x, y)| m.max((x - y).norm()))
}

/// Largest entry of `|A - A†|`.
pub fn hermitian_defect(a: &Mat) -> f64 {
    let n = a.nrows();
    let mut m = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            m = m.max((a[[i, j]] - a[[j, i]].conj()).norm());
        }
    }
    m
}

/// Replace `a` by `(a + a†)/2`.
pub fn hermitize(a: &mut Mat) {
    let n = a.nrows();
    for i in 0..n {
        a[[i, i]] = C64::new(a[[i, i]].re, 0.0);
        for j in (i + 1)..n {
            let avg = 0.5 * (a[[i, j]] + a[[j, i]].conj());
            a[[i, j]] = avg;
            a[[j, i]] = avg.conj();
        }
    }
}

/// Induced 1-norm (maximum absolute column sum).
pub fn one_norm(a: &Mat) -> f64 {
    a.axis_iter(Axis(1))
        .map(|col| col.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn kron(a: &Mat, b: &Mat) -> Mat {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = Mat::zeros((ar * br, ac * bc));
    for i in 0..ar {
        for j in 0..ac {
            let s = a[[i, j]];
            if s == ZERO {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[[i * br + k, j * bc + l]] = s * b[[k, l]];
                }
            }
        }
    }
    out
}

fn to_na(a: &Mat) -> DMatrix<C64> {
    let (r, c) = a.dim();
    DMatrix::from_fn(r, c, |i, j| a[[i, j]])
}

fn from_na(a: &DMatrix<C64>) -> Mat {
    Array2::from_shape_fn((a.nrows(), a.ncols()), |(i, j)| a[(i, j)])
}

/// Eigen-decomposition `A = V diag(values) V†` of a Hermitian matrix, values ascending.
#[derive(Debug, Clone)]
pub struct HermEig {
    pub values: Vec<f64>,
    pub vectors: Mat,
}

impl HermEig {
    /// `V diag(f(λ)) V†`.
    pub fn apply_fn(&self, f: impl Fn(f64) -> C64) -> Mat {
        let n = self.values.len();
        let v = &self.vectors;
        let mut scaled = v.clone();
        for (j, &lam) in self.values.iter().enumerate() {
            let fj = f(lam);
            scaled.column_mut(j).mapv_inplace(|z| z * fj);
        }
        let out = scaled.dot(&dagger(v));
        debug_assert_eq!(out.nrows(), n);
        out
    }
}

pub fn herm_eig(a: &Mat) -> Result<HermEig> {
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(CavityError::NonFinite("hermitian eigendecomposition"));
    }
    let mut sym = a.clone();
    hermitize(&mut sym);
    let eig = nalgebra::SymmetricEigen::new(to_na(&sym));
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let raw = from_na(&eig.eigenvectors);
    let mut vectors = Mat::zeros(raw.dim());
    for (dst, &src) in order.iter().enumerate() {
        vectors.column_mut(dst).assign(&raw.column(src));
    }
    Ok(HermEig { values, vectors })
}

/// Eigenvalues only, ascending.
pub fn herm_eigenvalues(a: &Mat) -> Result<Vec<f64>> {
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(CavityError::NonFinite("hermitian eigenvalues"));
    }
    let mut sym = a.clone();
    hermitize(&mut sym);
    let mut values: Vec<f64> = to_na(&sym).symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// `exp(i s H)` for Hermitian `H`.
pub fn expm_i_hermitian(h: &Mat, s: f64) -> Result<Mat> {
    let eig = herm_eig(h)?;
    Ok(eig.apply_fn(|lam| C64::from_polar(1.0, s * lam)))
}

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Largest 1-norm for which Padé(13) meets unit-roundoff backward error.
const THETA13: f64 = 5.371920351148152;

fn solve(p: &Mat, q: &Mat) -> Result<Mat> {
    let lu = to_na(q).lu();
    let x = lu
        .solve(&to_na(p))
        .ok_or(CavityError::Singular("Pade denominator"))?;
    Ok(from_na(&x))
}

/// General matrix exponential by scaling and squaring with the degree-13
/// diagonal Padé approximant.
pub fn expm(a: &Mat) -> Result<Mat> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(CavityError::Dimension(format!(
            "expm needs a square matrix, got {}x{}",
            n,
            a.ncols()
        )));
    }
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(CavityError::NonFinite("matrix exponential input"));
    }
    let norm = one_norm(a);
    if norm == 0.0 {
        return Ok(eye(n));
    }
    let s = if norm > THETA13 {
        (norm / THETA13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let scale = C64::new(2f64.powi(-s), 0.0);
    let a = a.mapv(|z| z * scale);
    let ident = eye(n);
    let a2 = a.dot(&a);
    let a4 = a2.dot(&a2);
    let a6 = a4.dot(&a2);
    let b = |k: usize| C64::new(PADE13[k], 0.0);

    let mut u_inner = &a6 * b(13) + &a4 * b(11) + &a2 * b(9);
    u_inner = a6.dot(&u_inner);
    u_inner = u_inner + &a6 * b(7) + &a4 * b(5) + &a2 * b(3) + &ident * b(1);
    let u = a.dot(&u_inner);

    let mut v = &a6 * b(12) + &a4 * b(10) + &a2 * b(8);
    v = a6.dot(&v);
    v = v + &a6 * b(6) + &a4 * b(4) + &a2 * b(2) + &ident * b(0);

    let p = &v + &u;
    let q = &v - &u;
    let mut r = solve(&p, &q)?;
    for _ in 0..s {
        r = r.dot(&r);
    }
    Ok(r)
}
