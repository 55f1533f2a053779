//! Nagy-Foias-type diagnostics for the renormed contraction: pointwise
//! evaluation of the characteristic function, its boundary defect, the
//! analytic embedding and its intertwining identity, and determinant
//! bounds on disc grids.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{
    hermitize, pseudo_inverse, psd_sqrt, range_basis, spectral_norm, CMat, CVec, OperatorMatrix,
};
use crate::renorm::RenormModel;

type C64 = Complex<f64>;

/// Precomputed data for characteristic-function evaluation: the renormed
/// contraction, its defect operators, the partial isometry `V` relating
/// the abstract defect `D` to the contraction defect `D_T~ W`, and
/// orthonormal bases of the two defect spaces.
pub struct CharFnContext {
    pub t_tilde: CMat,
    pub d_c: CMat,
    pub d_cs: CMat,
    /// `V = D (D_T~ W)^+`, isometric on the range of `D_T~ W`.
    pub v: CMat,
    /// Orthonormal basis of the defect space of `T~*` (input side).
    pub basis_in: CMat,
    /// Orthonormal basis of the range of `D` (output side).
    pub basis_out: CMat,
}

impl CharFnContext {
    pub fn new(model: &RenormModel, t: &OperatorMatrix, tol: f64) -> Result<Self> {
        let dim = t.dim();
        let id = CMat::identity(dim, dim);
        let t_tilde = model.renormed(t);
        let scale = spectral_norm(&t_tilde).max(1.0);
        let clamp = tol * scale * 4.0;
        let d_c = psd_sqrt(&hermitize(&(&id - t_tilde.adjoint() * &t_tilde)), clamp)?;
        let d_cs = psd_sqrt(&hermitize(&(&id - &t_tilde * t_tilde.adjoint())), clamp)?;
        let d = model.d.matrix();
        let rank_tol = 1e-10 * spectral_norm(d).max(1.0);
        let dw = &d_c * model.w.matrix();
        let v = d * pseudo_inverse(&dw, rank_tol)?;
        let basis_in = range_basis(&(&d_cs * &d_cs), rank_tol * rank_tol);
        let basis_out = range_basis(&(d * d), rank_tol * rank_tol);
        Ok(CharFnContext {
            t_tilde,
            d_c,
            d_cs,
            v,
            basis_in,
            basis_out,
        })
    }

    pub fn defect_dims(&self) -> (usize, usize) {
        (self.basis_in.ncols(), self.basis_out.ncols())
    }

    /// The full-space operator `V(-T~* + z D_T~ (I - z T~)^{-1} D_T~*)`.
    fn raw_theta(&self, z: C64) -> Result<CMat> {
        let dim = self.t_tilde.nrows();
        let id = CMat::identity(dim, dim);
        let resolvent = (&id - &self.t_tilde * z)
            .try_inverse()
            .ok_or_else(|| Error::Numerical(format!("I - zT is singular at z = {z}")))?;
        let inner = -self.t_tilde.adjoint() + &self.d_c * resolvent * &self.d_cs * z;
        Ok(&self.v * inner)
    }

    /// The characteristic function compressed to the defect bases.
    pub fn theta(&self, z: C64) -> Result<CMat> {
        Ok(self.basis_out.adjoint() * self.raw_theta(z)? * &self.basis_in)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CharFnSample {
    pub z_re: f64,
    pub z_im: f64,
    /// Value of the characteristic function on the defect-space bases
    /// (row-major re/im parts).
    pub theta_re: Vec<f64>,
    pub theta_im: Vec<f64>,
    pub rows: usize,
    pub cols: usize,
    pub theta_norm: f64,
    pub det_abs: Option<f64>,
    /// Boundary defect `Delta*(z)` eigenvalue floor when `|z| = 1`.
    pub delta_min_eigenvalue: Option<f64>,
}

/// Samples the characteristic function at one point. Interior points need
/// `|z| < 1`; boundary points are admitted when `I - zT~` is invertible.
pub fn char_fn_eval(
    model: &RenormModel,
    t: &OperatorMatrix,
    z: C64,
    tol: f64,
) -> Result<CharFnSample> {
    let ctx = CharFnContext::new(model, t, tol)?;
    char_fn_eval_with(&ctx, z)
}

pub fn char_fn_eval_with(ctx: &CharFnContext, z: C64) -> Result<CharFnSample> {
    if z.norm() > 1.0 + 1e-12 {
        return Err(Error::Input("sample point outside the closed disc".into()));
    }
    let theta = ctx.theta(z)?;
    let rows = theta.nrows();
    let cols = theta.ncols();
    let theta_norm = spectral_norm(&theta);
    let det_abs = if rows == cols && rows > 0 {
        Some(crate::matrix::determinant(&theta).norm())
    } else {
        None
    };
    let on_boundary = (z.norm() - 1.0).abs() <= 1e-12;
    let delta_min_eigenvalue = if on_boundary && cols > 0 {
        let m = CMat::identity(cols, cols) - theta.adjoint() * &theta;
        Some(crate::matrix::min_eigenvalue(&hermitize(&m)))
    } else {
        None
    };
    Ok(CharFnSample {
        z_re: z.re,
        z_im: z.im,
        theta_re: theta.transpose().iter().map(|c| c.re).collect(),
        theta_im: theta.transpose().iter().map(|c| c.im).collect(),
        rows,
        cols,
        theta_norm,
        det_abs,
        delta_min_eigenvalue,
    })
}

/// Taylor coefficients `(D T^n h)_{n<=N}` of the analytic embedding
/// `Phi_1 h(z) = D (I - zT)^{-1} h`.
pub fn analytic_embedding_coeffs(
    model: &RenormModel,
    t: &OperatorMatrix,
    h: &CVec,
    n: usize,
) -> Vec<CVec> {
    let mut out = Vec::with_capacity(n + 1);
    let mut v = h.clone();
    for _ in 0..=n {
        out.push(model.d.matrix() * &v);
        v = t.matrix() * v;
    }
    out
}

/// Max over samples of the intertwining defect
/// `|Phi_1(Th)(z) - (Phi_1 h(z) - Phi_1 h(0)) / z|`.
pub fn intertwining_residual(
    model: &RenormModel,
    t: &OperatorMatrix,
    h: &CVec,
    z_samples: &[C64],
) -> Result<f64> {
    let dim = t.dim();
    let id = CMat::identity(dim, dim);
    let d = model.d.matrix();
    let mut worst = 0.0f64;
    for &z in z_samples {
        if z.norm() >= 1.0 {
            return Err(Error::Input("intertwining samples must be interior".into()));
        }
        if z.norm() < 1e-14 {
            continue; // the difference quotient degenerates at the origin
        }
        let resolvent = (&id - t.matrix() * z)
            .try_inverse()
            .ok_or_else(|| Error::Numerical("singular resolvent".into()))?;
        let phi_h = d * &resolvent * h;
        let phi_th = d * &resolvent * (t.matrix() * h);
        let quotient = (&phi_h - d * h) / z;
        worst = worst.max((phi_th - quotient).norm());
    }
    Ok(worst)
}

/// Max of `|det Theta*(z)|` over a polar mesh of radius `1 - 1/grid`;
/// needs defect spaces of equal positive dimension.
pub fn det_bound_scan(model: &RenormModel, t: &OperatorMatrix, grid: usize, tol: f64) -> Result<f64> {
    let grid = grid.max(4);
    let ctx = CharFnContext::new(model, t, tol)?;
    let (din, dout) = ctx.defect_dims();
    if din == 0 || dout == 0 {
        return Err(Error::Unsupported(
            "zero-dimensional defect space; the determinant is not defined".into(),
        ));
    }
    if din != dout {
        return Err(Error::Unsupported(format!(
            "defect dimensions differ ({din} vs {dout})"
        )));
    }
    let rmax = 1.0 - 1.0 / grid as f64;
    let mut worst = 0.0f64;
    for i in 0..grid {
        let r = rmax * (i + 1) as f64 / grid as f64;
        for k in 0..grid {
            let angle = std::f64::consts::TAU * k as f64 / grid as f64;
            let theta = ctx.theta(Complex::from_polar(r, angle))?;
            worst = worst.max(crate::matrix::determinant(&theta).norm());
        }
    }
    Ok(worst)
}
