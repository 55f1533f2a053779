//! Dense complex operators with cached power norms, plus the Hermitian
//! linear-algebra helpers (PSD square roots, kernels, pseudo-inverses)
//! used throughout the renorming and model layers.

use std::sync::Mutex;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

struct PowerCache {
    /// `norms[n] = |T^n|` (spectral norm); `norms[0] = 1`.
    norms: Vec<f64>,
    /// `T^k` for `k = norms.len() - 1`.
    power: CMat,
}

/// Dense complex `d x d` operator with lazily cached power norms and a
/// spectral-radius estimate derived from them
/// (`rho(T) <= min_n |T^n|^{1/n}`).
pub struct OperatorMatrix {
    mat: CMat,
    cache: Mutex<PowerCache>,
}

impl Clone for OperatorMatrix {
    fn clone(&self) -> Self {
        OperatorMatrix::new(self.mat.clone())
    }
}

impl std::fmt::Debug for OperatorMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "OperatorMatrix(dim={})", self.dim())
    }
}

impl PartialEq for OperatorMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.mat == other.mat
    }
}

impl OperatorMatrix {
    pub fn new(mat: CMat) -> Self {
        assert_eq!(mat.nrows(), mat.ncols(), "operator matrix must be square");
        let dim = mat.nrows();
        OperatorMatrix {
            mat,
            cache: Mutex::new(PowerCache {
                norms: vec![1.0],
                power: CMat::identity(dim, dim),
            }),
        }
    }

    pub fn from_real_rows(dim: usize, rows: &[f64]) -> Self {
        let mat = CMat::from_iterator(
            dim,
            dim,
            // row-major input into column-major storage
            (0..dim * dim).map(|k| Complex::new(rows[(k % dim) * dim + k / dim], 0.0)),
        );
        OperatorMatrix::new(mat)
    }

    pub fn from_complex_rows(dim: usize, re: &[f64], im: &[f64]) -> Self {
        let mat = CMat::from_iterator(
            dim,
            dim,
            (0..dim * dim).map(|k| {
                let idx = (k % dim) * dim + k / dim;
                Complex::new(re[idx], im[idx])
            }),
        );
        OperatorMatrix::new(mat)
    }

    pub fn identity(dim: usize) -> Self {
        OperatorMatrix::new(CMat::identity(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMat {
        &self.mat
    }

    pub fn adjoint(&self) -> CMat {
        self.mat.adjoint()
    }

    pub fn norm(&self) -> f64 {
        self.power_norm(1)
    }

    /// `|T^n|`, extending the cache as needed.
    pub fn power_norm(&self, n: usize) -> f64 {
        let mut cache = self.cache.lock().unwrap();
        while cache.norms.len() <= n {
            cache.power = &cache.power * &self.mat;
            let norm = spectral_norm(&cache.power);
            cache.norms.push(norm);
        }
        cache.norms[n]
    }

    /// `|T^n|` for `n = 0..=horizon`.
    pub fn power_norms(&self, horizon: usize) -> Vec<f64> {
        self.power_norm(horizon);
        self.cache.lock().unwrap().norms[..=horizon].to_vec()
    }

    /// Upper bound for the spectral radius: `min_{1<=n<=horizon} |T^n|^{1/n}`.
    pub fn spectral_radius_bound(&self, horizon: usize) -> f64 {
        let horizon = horizon.max(1);
        let norms = self.power_norms(horizon);
        let mut best = f64::INFINITY;
        for (n, &norm) in norms.iter().enumerate().skip(1) {
            best = best.min(norm.powf(1.0 / n as f64));
        }
        best
    }

    /// `sup_{n<=horizon} |T^n|`.
    pub fn power_sup(&self, horizon: usize) -> f64 {
        self.power_norms(horizon)
            .into_iter()
            .fold(0.0f64, f64::max)
    }

    pub fn apply(&self, v: &CVec) -> CVec {
        &self.mat * v
    }
}

pub fn hermitize(m: &CMat) -> CMat {
    (m + m.adjoint()) * Complex::new(0.5, 0.0)
}

pub fn spectral_norm(m: &CMat) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    let sv = m.clone().singular_values();
    sv.iter().cloned().fold(0.0f64, f64::max)
}

/// Eigendecomposition of a Hermitian matrix: `(values, vectors)` with the
/// columns of `vectors` the orthonormal eigenvectors, ascending eigenvalues.
pub fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let se = hermitize(m).symmetric_eigen();
    let mut idx: Vec<usize> = (0..se.eigenvalues.len()).collect();
    idx.sort_by(|&a, &b| se.eigenvalues[a].partial_cmp(&se.eigenvalues[b]).unwrap());
    let vals: Vec<f64> = idx.iter().map(|&i| se.eigenvalues[i]).collect();
    let dim = m.nrows();
    let mut vecs = CMat::zeros(dim, dim);
    for (col, &i) in idx.iter().enumerate() {
        vecs.set_column(col, &se.eigenvectors.column(i));
    }
    (vals, vecs)
}

pub fn min_eigenvalue(m: &CMat) -> f64 {
    let (vals, _) = hermitian_eigen(m);
    vals.first().copied().unwrap_or(0.0)
}

pub fn max_eigenvalue(m: &CMat) -> f64 {
    let (vals, _) = hermitian_eigen(m);
    vals.last().copied().unwrap_or(0.0)
}

/// Hermitian PSD square root by spectral decomposition. Eigenvalues in
/// `[-clamp_tol, 0)` are clamped to zero; anything below `-clamp_tol`
/// is an error.
pub fn psd_sqrt(m: &CMat, clamp_tol: f64) -> Result<CMat> {
    let (vals, vecs) = hermitian_eigen(m);
    if let Some(&min) = vals.first() {
        if min < -clamp_tol {
            return Err(Error::Precondition(format!(
                "matrix is not positive semidefinite: min eigenvalue {min:.3e}"
            )));
        }
    }
    let dim = m.nrows();
    let mut out = CMat::zeros(dim, dim);
    for (i, &v) in vals.iter().enumerate() {
        let s = v.max(0.0).sqrt();
        let col = vecs.column(i);
        out += (col * col.adjoint()) * Complex::new(s, 0.0);
    }
    Ok(out)
}

/// Inverse of a Hermitian positive definite matrix via its eigensystem.
pub fn hpd_inverse(m: &CMat, floor: f64) -> Result<CMat> {
    let (vals, vecs) = hermitian_eigen(m);
    if vals.first().copied().unwrap_or(0.0) <= floor {
        return Err(Error::Numerical(format!(
            "matrix is not uniformly positive: min eigenvalue {:.3e}",
            vals.first().copied().unwrap_or(0.0)
        )));
    }
    let dim = m.nrows();
    let mut out = CMat::zeros(dim, dim);
    for (i, &v) in vals.iter().enumerate() {
        let col = vecs.column(i);
        out += (col * col.adjoint()) * Complex::new(1.0 / v, 0.0);
    }
    Ok(out)
}

/// Orthonormal basis of the kernel of a Hermitian PSD matrix
/// (eigenvectors with eigenvalue `<= tol`). May have zero columns.
pub fn kernel_basis(m: &CMat, tol: f64) -> CMat {
    let (vals, vecs) = hermitian_eigen(m);
    let cols: Vec<usize> = vals
        .iter()
        .enumerate()
        .filter(|(_, &v)| v <= tol)
        .map(|(i, _)| i)
        .collect();
    let dim = m.nrows();
    let mut out = CMat::zeros(dim, cols.len());
    for (j, &i) in cols.iter().enumerate() {
        out.set_column(j, &vecs.column(i));
    }
    out
}

/// Orthonormal basis of the range of a Hermitian PSD matrix
/// (eigenvectors with eigenvalue `> tol`).
pub fn range_basis(m: &CMat, tol: f64) -> CMat {
    let (vals, vecs) = hermitian_eigen(m);
    let cols: Vec<usize> = vals
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > tol)
        .map(|(i, _)| i)
        .collect();
    let dim = m.nrows();
    let mut out = CMat::zeros(dim, cols.len());
    for (j, &i) in cols.iter().enumerate() {
        out.set_column(j, &vecs.column(i));
    }
    out
}

/// Moore-Penrose pseudo-inverse with singular values below `threshold`
/// treated as zero.
pub fn pseudo_inverse(m: &CMat, threshold: f64) -> Result<CMat> {
    let svd = m.clone().svd(true, true);
    let u = svd.u.ok_or_else(|| Error::Numerical("svd failed".into()))?;
    let vt = svd
        .v_t
        .ok_or_else(|| Error::Numerical("svd failed".into()))?;
    let mut sinv = DMatrix::<C64>::zeros(vt.nrows(), u.ncols());
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s > threshold {
            sinv[(i, i)] = Complex::new(1.0 / s, 0.0);
        }
    }
    Ok(vt.adjoint() * sinv * u.adjoint())
}

pub fn solve(m: &CMat, rhs: &CVec) -> Result<CVec> {
    m.clone()
        .lu()
        .solve(rhs)
        .ok_or_else(|| Error::Numerical("singular linear system".into()))
}

pub fn determinant(m: &CMat) -> C64 {
    m.clone().lu().determinant()
}

/// 2-norm condition number.
pub fn cond_2(m: &CMat) -> f64 {
    let sv = m.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0f64, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    max / min
}

pub fn cvec_from_real(v: &[f64]) -> CVec {
    CVec::from_iterator(v.len(), v.iter().map(|&x| Complex::new(x, 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nilpotent() -> OperatorMatrix {
        OperatorMatrix::from_real_rows(2, &[0.0, 2.0, 0.0, 0.0])
    }

    #[test]
    fn power_norms_of_nilpotent() {
        let t = nilpotent();
        let norms = t.power_norms(4);
        assert_eq!(norms, vec![1.0, 2.0, 0.0, 0.0, 0.0]);
        assert_eq!(t.spectral_radius_bound(4), 0.0);
    }

    #[test]
    fn power_norm_submultiplicative() {
        let t = OperatorMatrix::from_real_rows(3, &[0.9, 1.0, 0.0, 0.0, 0.8, 1.0, 0.1, 0.0, 0.7]);
        let norms = t.power_norms(10);
        for n in 0..=5 {
            for m in 0..=5 {
                assert!(norms[n + m] <= norms[n] * norms[m] + 1e-12);
            }
        }
    }

    #[test]
    fn psd_sqrt_roundtrip() {
        let a = CMat::from_row_slice(
            2,
            2,
            &[
                Complex::new(2.0, 0.0),
                Complex::new(0.0, 1.0),
                Complex::new(0.0, -1.0),
                Complex::new(3.0, 0.0),
            ],
        );
        let s = psd_sqrt(&a, 1e-12).unwrap();
        assert!(spectral_norm(&(&s * &s - &a)) < 1e-12);
    }

    #[test]
    fn psd_sqrt_rejects_indefinite() {
        let a = CMat::from_diagonal(&CVec::from_vec(vec![
            Complex::new(1.0, 0.0),
            Complex::new(-1.0, 0.0),
        ]));
        assert!(psd_sqrt(&a, 1e-9).is_err());
    }

    #[test]
    fn kernel_and_range_split() {
        let a = CMat::from_diagonal(&CVec::from_vec(vec![
            Complex::new(0.0, 0.0),
            Complex::new(2.0, 0.0),
            Complex::new(0.0, 0.0),
        ]));
        assert_eq!(kernel_basis(&a, 1e-12).ncols(), 2);
        assert_eq!(range_basis(&a, 1e-12).ncols(), 1);
    }

    #[test]
    fn pseudo_inverse_projects() {
        let a = CMat::from_row_slice(
            2,
            2,
            &[
                Complex::new(1.0, 0.0),
                Complex::new(0.0, 0.0),
                Complex::new(0.0, 0.0),
                Complex::new(0.0, 0.0),
            ],
        );
        let pinv = pseudo_inverse(&a, 1e-12).unwrap();
        assert!(spectral_norm(&(&a * &pinv * &a - &a)) < 1e-12);
    }
}
