//! Matrix-free Lindblad generators on banded truncated operators.
//!
//! On the truncated Fock space every operator entering the generators
//! (`b`, `b*`, `b*b`, shifted jumps `b − α`) is banded, so `L(X)` costs
//! `O(d²)`. The propagator `e^{tL}` is applied to a state by a scaled Taylor
//! series with a rigorous operator-norm bound, which avoids forming the
//! `d² × d²` superoperator.

use crate::linalg::{Mat, C64, ZERO};

/// Square matrix stored by its nonzero diagonals: `diags[(off, v)]` holds
/// `A[i, i + off]` in `v[i]` for every admissible `i`.
#[derive(Debug, Clone)]
pub struct Banded {
    dim: usize,
    diags: Vec<(isize, Vec<C64>)>,
}

impl Banded {
    pub fn from_dense(a: &Mat) -> Self {
        let d = a.nrows();
        let mut diags = Vec::new();
        for off in -(d as isize - 1)..(d as isize) {
            let v: Vec<C64> = (0..d)
                .filter_map(|i| {
                    let j = i as isize + off;
                    (0..d as isize).contains(&j).then(|| a[[i, j as usize]])
                })
                .collect();
            if v.iter().any(|z| *z != ZERO) {
                diags.push((off, v));
            }
        }
        Self { dim: d, diags }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn row_start(off: isize) -> usize {
        if off < 0 {
            (-off) as usize
        } else {
            0
        }
    }

    /// `out += A X`.
    pub fn left_mul_acc(&self, x: &Mat, out: &mut Mat) {
        let d = self.dim;
        for (off, v) in &self.diags {
            let i0 = Self::row_start(*off);
            for (k, a) in v.iter().enumerate() {
                let i = i0 + k;
                let r = (i as isize + off) as usize;
                let src = x.row(r);
                let mut dst = out.row_mut(i);
                for j in 0..d {
                    dst[j] += a * src[j];
                }
            }
        }
    }

    /// `out += X A†`, i.e. `(X A†)[i, j] = Σ_r X[i, r] conj(A[j, r])`.
    pub fn right_mul_dagger_acc(&self, x: &Mat, out: &mut Mat) {
        let d = self.dim;
        for (off, v) in &self.diags {
            let j0 = Self::row_start(*off);
            for (k, a) in v.iter().enumerate() {
                let j = j0 + k;
                let r = (j as isize + off) as usize;
                let ac = a.conj();
                for i in 0..d {
                    out[[i, j]] += x[[i, r]] * ac;
                }
            }
        }
    }

    /// Upper bound on the spectral norm: `sqrt(‖A‖₁ ‖A‖∞)`.
    pub fn norm_bound(&self) -> f64 {
        let d = self.dim;
        let mut row = vec![0.0; d];
        let mut col = vec![0.0; d];
        for (off, v) in &self.diags {
            let i0 = Self::row_start(*off);
            for (k, a) in v.iter().enumerate() {
                let i = i0 + k;
                let j = (i as isize + off) as usize;
                row[i] += a.norm();
                col[j] += a.norm();
            }
        }
        let r = row.iter().cloned().fold(0.0, f64::max);
        let c = col.iter().cloned().fold(0.0, f64::max);
        (r * c).sqrt()
    }
}

/// `L(X) = −i[H, X] + Σ_r γ_r (J_r X J_r† − ½{J_r† J_r, X})`, stored as
/// `L(X) = K X + X K† + Σ_r γ_r J_r X J_r†` with `K = −iH − ½ Σ γ_r J_r† J_r`.
#[derive(Debug, Clone)]
pub struct LindbladAction {
    k: Banded,
    jumps: Vec<(f64, Banded)>,
    norm_bound: f64,
}

impl LindbladAction {
    pub fn new(h: &Mat, jumps: &[(f64, Mat)]) -> Self {
        let mut k = h.mapv(|z| z * C64::new(0.0, -1.0));
        let mut bound_jumps = 0.0;
        let mut stored = Vec::new();
        for (rate, j) in jumps {
            if *rate == 0.0 {
                continue;
            }
            let jdj = crate::linalg::dagger(j).dot(j);
            k = k - jdj.mapv(|z| z * (0.5 * rate));
            let band = Banded::from_dense(j);
            let nb = band.norm_bound();
            bound_jumps += rate * nb * nb;
            stored.push((*rate, band));
        }
        let k = Banded::from_dense(&k);
        let norm_bound = 2.0 * k.norm_bound() + bound_jumps;
        Self {
            k,
            jumps: stored,
            norm_bound,
        }
    }

    pub fn dim(&self) -> usize {
        self.k.dim()
    }

    /// Bound on `‖L‖` as an operator on Hilbert–Schmidt space.
    pub fn norm_bound(&self) -> f64 {
        self.norm_bound
    }

    pub fn apply(&self, x: &Mat) -> Mat {
        let mut out = Mat::zeros(x.dim());
        self.k.left_mul_acc(x, &mut out);
        // X K† is the adjoint-side term.
        self.k.right_mul_dagger_acc(x, &mut out);
        let mut tmp = Mat::zeros(x.dim());
        for (rate, j) in &self.jumps {
            tmp.fill(ZERO);
            j.left_mul_acc(x, &mut tmp);
            let tmp2 = tmp.mapv(|z| z * *rate);
            j.right_mul_dagger_acc(&tmp2, &mut out);
        }
        out
    }

    /// `e^{tL}(X)` by `s` scaled Taylor steps, each truncated once terms fall
    /// below double-precision relevance.
    pub fn exp_apply(&self, t: f64, x: &Mat) -> Mat {
        const THETA: f64 = 3.5;
        const MAX_TERMS: usize = 60;
        let a = self.norm_bound * t.abs();
        if a == 0.0 {
            return x.clone();
        }
        let s = (a / THETA).ceil().max(1.0) as usize;
        let h = t / s as f64;
        let mut f = x.clone();
        for _ in 0..s {
            let mut term = f.clone();
            let mut acc = f.clone();
            let mut small = 0;
            for k in 1..=MAX_TERMS {
                term = self.apply(&term).mapv(|z| z * (h / k as f64));
                acc += &term;
                let tn = fro(&term);
                let an = fro(&acc);
                if tn <= 1e-18 * an.max(1e-300) {
                    small += 1;
                    if small == 2 {
                        break;
                    }
                } else {
                    small = 0;
                }
            }
            f = acc;
        }
        f
    }
}

fn fro(x: &Mat) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{dagger, eye, max_abs_diff};
    use ndarray::Array2;

    fn sample(d: usize, seed: u64) -> Mat {
        let mut s = seed;
        Array2::from_shape_fn((d, d), |_| {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let a = ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5;
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let b = ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5;
            C64::new(a, b)
        })
    }

    #[test]
    fn banded_products_match_dense() {
        let d = 7;
        let mut a = Mat::zeros((d, d));
        for i in 0..d {
            a[[i, i]] = C64::new(i as f64, 0.3);
            if i + 1 < d {
                a[[i, i + 1]] = C64::new(0.5, -1.0);
                a[[i + 1, i]] = C64::new(2.0, 0.1);
            }
        }
        let band = Banded::from_dense(&a);
        let x = sample(d, 3);
        let mut left = Mat::zeros((d, d));
        band.left_mul_acc(&x, &mut left);
        assert!(max_abs_diff(&left, &a.dot(&x)) < 1e-13);
        let mut right = Mat::zeros((d, d));
        band.right_mul_dagger_acc(&x, &mut right);
        assert!(max_abs_diff(&right, &x.dot(&dagger(&a))) < 1e-13);
    }

    #[test]
    fn generator_is_trace_annihilating() {
        let d = 6;
        let mut b = Mat::zeros((d, d));
        for k in 1..d {
            b[[k - 1, k]] = C64::new((k as f64).sqrt(), 0.0);
        }
        let h = dagger(&b).dot(&b) + &b + &dagger(&b);
        let l = LindbladAction::new(&h, &[(0.3, b.clone()), (0.1, dagger(&b))]);
        let x = sample(d, 9);
        let lx = l.apply(&x);
        let tr: C64 = lx.diag().sum();
        assert!(tr.norm() < 1e-13);
        let e = l.exp_apply(0.0, &eye(d));
        assert!(max_abs_diff(&e, &eye(d)) == 0.0);
    }
}
