//! Renorming a class member to a contraction: the defect operator `D`,
//! the auxiliary root `B`, the Gram matrix of the equivalent Hilbert norm,
//! the explicit similarity `W = G^{1/2}`, and the finite-dimensional
//! canonical decomposition into unitary and completely nonunitary parts.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hereditary::{check_admissible, class_membership, hereditary_apply, Verdict};
use crate::matrix::{
    hermitize, hpd_inverse, max_eigenvalue, min_eigenvalue, psd_sqrt, spectral_norm, CMat,
    OperatorMatrix,
};
use crate::series::TruncatedSeries;

/// Cap on the geometric sum and the lim*-window scan.
const SUM_CAP: usize = 2048;

/// `D = (alpha[T*,T])^{1/2}`; requires membership-level positivity.
pub fn defect_operator(
    t: &OperatorMatrix,
    alpha: &TruncatedSeries<f64>,
    tol: f64,
) -> Result<OperatorMatrix> {
    let identity = OperatorMatrix::identity(t.dim());
    let hered = hereditary_apply(alpha, t, &identity, tol)?;
    let scale = spectral_norm(hered.matrix()).max(1.0);
    let d = psd_sqrt(hered.matrix(), tol * scale)
        .map_err(|_| Error::Precondition("alpha[T*,T] is not positive; T is not a member".into()))?;
    Ok(OperatorMatrix::new(d))
}

/// The regularized limit of the matrix sequence `S_m = T*^m Q T^m`,
/// smoothed by the normalized symbol `f`: returns the stabilized value of
/// `L_n = sum_k f_k S_{n+k}`, declared convergent when eight consecutive
/// smoothed values agree within tolerance.
fn lim_star_matrix(
    f: &TruncatedSeries<f64>,
    t: &OperatorMatrix,
    q: &CMat,
    tol: f64,
) -> Result<CMat> {
    let d = t.dim();
    let f_len = f.len().max(1);
    let scale = spectral_norm(q).max(1.0);
    let mut s_seq: Vec<CMat> = Vec::new();
    let mut power = CMat::identity(d, d);
    let mut prev: Option<CMat> = None;
    let mut stable = 0usize;
    for n in 0..SUM_CAP {
        // extend S_m up to index n + f_len - 1
        while s_seq.len() < n + f_len {
            s_seq.push(power.adjoint() * q * &power);
            power = &power * t.matrix();
        }
        let mut l = CMat::zeros(d, d);
        for k in 0..f.len() {
            let c = f.coeff(k);
            if c != 0.0 {
                l += &s_seq[n + k] * Complex::new(c, 0.0);
            }
        }
        if let Some(p) = &prev {
            if spectral_norm(&(&l - p)) <= tol * scale {
                stable += 1;
                if stable >= 8 {
                    return Ok(hermitize(&l));
                }
            } else {
                stable = 0;
            }
        }
        prev = Some(l);
    }
    Err(Error::Inconclusive(format!(
        "lim* of the matrix sequence did not stabilize within {SUM_CAP} steps"
    )))
}

#[derive(Clone, Debug)]
pub struct RenormModel {
    pub alpha: TruncatedSeries<f64>,
    /// Factorization cofactor of `alpha_tilde` (coefficientwise positive).
    pub beta_tilde: TruncatedSeries<f64>,
    /// `f = beta_tilde * alpha_tilde`, normalized to algebra norm 1.
    pub f: TruncatedSeries<f64>,
    pub d: OperatorMatrix,
    pub b: OperatorMatrix,
    /// Hermitian positive definite Gram matrix of the new norm.
    pub gram: OperatorMatrix,
    pub w: OperatorMatrix,
    pub w_inv: CMat,
    pub contraction_norm: f64,
    /// Smallest eigenvalue of the Gram matrix (the norm-equivalence floor).
    pub gram_floor: f64,
    /// `|G - T*GT - D^2|`, the matrix form of the defect identity.
    pub defect_residual: f64,
}

/// Builds the equivalent-norm model: factorizes `alpha_tilde`, forms
/// `D = (alpha[T*,T])^{1/2}` and `B = (f[T*,T])^{1/2}`, assembles
/// `G = sum_n T*^n D^2 T^n + lim*-term of T*^m B^2 T^m`, roots it into
/// `W`, and certifies the defect identity `G - T*GT = D^2`.
pub fn build_renorm(
    t: &OperatorMatrix,
    alpha: &TruncatedSeries<f64>,
    tol: f64,
) -> Result<RenormModel> {
    let membership = class_membership(t, alpha, tol)?;
    if membership.verdict != Verdict::Member {
        return Err(Error::Precondition(format!(
            "T is not a certified member of C_alpha (verdict {:?})",
            membership.verdict
        )));
    }
    let report = check_admissible(alpha, tol);
    let alpha_tilde = &report.alpha_tilde;
    let cert = crate::factorization::wiener_factorize(alpha_tilde, tol, crate::DEFAULT_TRUNCATION)?;
    if !cert.passed() {
        return Err(Error::Verification(format!(
            "factorization of alpha_tilde failed at stage {:?}",
            cert.failed_stage
        )));
    }
    let beta_tilde = cert.cofactor.clone();
    let f_raw = beta_tilde.mul(alpha_tilde)?.truncate(crate::DEFAULT_TRUNCATION);
    let f = f_raw.scale(&(1.0 / f_raw.wiener_norm()));

    let d_op = defect_operator(t, alpha, tol)?;
    let identity = OperatorMatrix::identity(t.dim());
    let f_hered = hereditary_apply(&f, t, &identity, tol)?;
    let scale_f = spectral_norm(f_hered.matrix()).max(1.0);
    let b_sq = {
        // f is coefficientwise positive, so f[T*,T] is PSD up to roundoff.
        let clamped = psd_sqrt(f_hered.matrix(), tol * scale_f)?;
        &clamped * &clamped
    };
    let b_op = OperatorMatrix::new(psd_sqrt(&b_sq, tol * scale_f)?);

    // Geometric part: sum_n T*^n D^2 T^n until the terms certifiably die.
    let dim = t.dim();
    let d_sq = d_op.matrix() * d_op.matrix();
    let mut gram = CMat::zeros(dim, dim);
    let mut power = CMat::identity(dim, dim);
    let mut converged = false;
    for n in 0..SUM_CAP {
        let term = power.adjoint() * &d_sq * &power;
        gram += &term;
        power = &power * t.matrix();
        if n >= dim && spectral_norm(&term) <= tol * 1e-2 {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Inconclusive(
            "the defect series did not converge within the horizon".into(),
        ));
    }
    // Regularized limit part.
    let lim_term = lim_star_matrix(&f, t, &b_sq, tol)?;
    gram += &lim_term;
    let gram = hermitize(&gram);

    let gram_floor = min_eigenvalue(&gram);
    if gram_floor <= tol {
        return Err(Error::Numerical(format!(
            "Gram matrix is not uniformly positive (floor {gram_floor:.3e})"
        )));
    }
    let w = psd_sqrt(&gram, tol)?;
    let w_inv = hpd_inverse(&w, 0.0)?;
    let t_tilde = &w * t.matrix() * &w_inv;
    let contraction_norm = spectral_norm(&t_tilde);

    let defect_residual = spectral_norm(
        &(&gram - t.matrix().adjoint() * &gram * t.matrix() - &d_sq),
    );
    let scale_g = spectral_norm(&gram).max(1.0);
    if defect_residual > tol * scale_g {
        return Err(Error::Verification(format!(
            "defect identity residual {defect_residual:.3e} exceeds tolerance"
        )));
    }
    Ok(RenormModel {
        alpha: alpha.clone(),
        beta_tilde,
        f,
        d: d_op,
        b: b_op,
        gram: OperatorMatrix::new(gram),
        w: OperatorMatrix::new(w),
        w_inv,
        contraction_norm,
        gram_floor,
        defect_residual,
    })
}

impl RenormModel {
    /// The renormed operator `W T W^{-1}` (a contraction for members).
    pub fn renormed(&self, t: &OperatorMatrix) -> CMat {
        self.w.matrix() * t.matrix() * &self.w_inv
    }

    /// New norm squared of a vector: `<Gh, h>`.
    pub fn new_norm_sq(&self, h: &crate::matrix::CVec) -> f64 {
        (self.gram.matrix() * h).dotc(h).re
    }
}

/// Re-evaluates `|W T W^{-1}|` and re-checks the A-contraction route
/// `T*GT <= G` (min eigenvalue of `G - T*GT` within `-tol`).
pub fn verify_similarity(model: &RenormModel, t: &OperatorMatrix, tol: f64) -> Result<f64> {
    let norm = spectral_norm(&model.renormed(t));
    let defect = model.gram.matrix() - t.matrix().adjoint() * model.gram.matrix() * t.matrix();
    let floor = min_eigenvalue(&hermitize(&defect));
    let scale = spectral_norm(model.gram.matrix()).max(1.0);
    if floor < -tol * scale {
        return Err(Error::Verification(format!(
            "G - T*GT has eigenvalue {floor:.3e} below tolerance; T is not an A-contraction for G"
        )));
    }
    Ok(norm)
}

/// Best constants `(c, C)` in
/// `c|h|^2 <= sum_n |D T^n h|^2 + limsup|T^n h|^2 <= C|h|^2`,
/// estimated by extremizing the assembled Hermitian form. The limsup term
/// is realized as the windowed average of `T*^n T^n` once that window has
/// stabilized.
pub fn abstract_defect_check(
    t: &OperatorMatrix,
    d: &OperatorMatrix,
    horizon: usize,
    tol: f64,
) -> Result<(f64, f64)> {
    let dim = t.dim();
    if d.dim() != dim {
        return Err(Error::Input("dimension mismatch between T and D".into()));
    }
    let horizon = horizon.clamp(64, SUM_CAP);
    let sup = t.power_sup(horizon.min(256));
    if !sup.is_finite() {
        return Err(Error::Precondition("T is not power bounded on the horizon".into()));
    }
    let d_sq = d.matrix() * d.matrix();
    let mut form = CMat::zeros(dim, dim);
    let mut power = CMat::identity(dim, dim);
    let mut powers: Vec<CMat> = Vec::with_capacity(horizon);
    for n in 0..horizon {
        form += power.adjoint() * &d_sq * &power;
        powers.push(power.clone());
        power = &power * t.matrix();
        if n >= dim && spectral_norm(&(powers[n].adjoint() * &d_sq * &powers[n])) <= tol * 1e-2 {
            break;
        }
    }
    // limsup term: average P*P over the trailing window, checked stable
    // against the preceding window. Extend the power list first so the
    // windows sit past the transient even when the defect sum converged
    // after a few steps.
    while powers.len() < horizon.min(64) {
        let next = powers.last().unwrap() * t.matrix();
        powers.push(next);
    }
    let w = 16usize.min(powers.len() / 2).max(1);
    let window_avg = |lo: usize, hi: usize| {
        let mut acc = CMat::zeros(dim, dim);
        for p in &powers[lo..hi] {
            acc += p.adjoint() * p;
        }
        acc / Complex::new((hi - lo) as f64, 0.0)
    };
    let m = powers.len();
    let last = window_avg(m - w, m);
    if m >= 2 * w {
        let prev = window_avg(m - 2 * w, m - w);
        let drift = spectral_norm(&(&last - &prev));
        if drift > tol.max(1e-7) * sup.max(1.0) * sup.max(1.0) * 16.0 {
            return Err(Error::Inconclusive(format!(
                "limsup window drift {drift:.3e}; horizon too small to stabilize"
            )));
        }
    }
    form += &last;
    let form = hermitize(&form);
    Ok((min_eigenvalue(&form).max(0.0), max_eigenvalue(&form)))
}

#[derive(Clone, Debug, Serialize)]
pub struct DecompositionResult {
    /// Orthonormal columns spanning the unitary subspace `H_0` (in the
    /// original coordinates).
    #[serde(skip)]
    pub h0_basis: CMat,
    /// Columns spanning the `G`-orthogonal complement `H_1`.
    #[serde(skip)]
    pub h1_basis: CMat,
    /// `|(T|H0)*(T|H0) - I|` in the renormed coordinates.
    pub unitary_residual: f64,
    /// Invariance defect of the splitting under `T` (renormed coordinates).
    pub invariance_residual: f64,
}

/// Canonical splitting of a member into its unitary and completely
/// nonunitary parts: in the renormed coordinates the unitary subspace is
/// the joint kernel of `D_T~ T~^n` and `D_T~* T~*^n` for `n` up to the
/// dimension, then everything is mapped back through `W^{-1}`.
pub fn canonical_decomposition(
    model: &RenormModel,
    t: &OperatorMatrix,
    tol: f64,
) -> Result<DecompositionResult> {
    let report = check_admissible(&model.alpha, tol);
    if !report.strongly_admissible {
        return Err(Error::Precondition(
            "canonical decomposition needs a strongly admissible symbol".into(),
        ));
    }
    let dim = t.dim();
    let t_tilde = model.renormed(t);
    let id = CMat::identity(dim, dim);
    // Defect operators of the contraction; tiny negative eigenvalues from
    // the similarity roundoff are clamped.
    let scale = spectral_norm(&t_tilde).max(1.0);
    let d_c = psd_sqrt(&hermitize(&(&id - t_tilde.adjoint() * &t_tilde)), tol * scale * 4.0)?;
    let d_cs = psd_sqrt(&hermitize(&(&id - &t_tilde * t_tilde.adjoint())), tol * scale * 4.0)?;

    // Stack D T^n and D* T*^n rows; the joint kernel is H0 in W-coordinates.
    let mut rows: Vec<CMat> = Vec::new();
    let mut p = CMat::identity(dim, dim);
    let mut ps = CMat::identity(dim, dim);
    for _ in 0..=dim {
        rows.push(&d_c * &p);
        rows.push(&d_cs * &ps);
        p = &t_tilde * &p;
        ps = &t_tilde.adjoint() * &ps;
    }
    let mut stacked = CMat::zeros(rows.len() * dim, dim);
    for (i, r) in rows.iter().enumerate() {
        stacked.rows_mut(i * dim, dim).copy_from(r);
    }
    // Joint kernel through the Gram form of the stack.
    let gram_stack = hermitize(&(stacked.adjoint() * &stacked));
    let kernel_tol = tol * spectral_norm(&gram_stack).max(1.0) * 16.0;
    let h0_tilde = crate::matrix::kernel_basis(&gram_stack, kernel_tol);
    let h1_tilde = crate::matrix::range_basis(&gram_stack, kernel_tol);

    // Residuals in the renormed coordinates.
    let unitary_residual = if h0_tilde.ncols() > 0 {
        let restricted = h0_tilde.adjoint() * t_tilde.adjoint() * &t_tilde * &h0_tilde;
        spectral_norm(&(restricted - CMat::identity(h0_tilde.ncols(), h0_tilde.ncols())))
    } else {
        0.0
    };
    let invariance_residual = if h0_tilde.ncols() > 0 && h1_tilde.ncols() > 0 {
        let cross = h1_tilde.adjoint() * &t_tilde * &h0_tilde;
        let cross2 = h0_tilde.adjoint() * &t_tilde * &h1_tilde;
        spectral_norm(&cross).max(spectral_norm(&cross2))
    } else {
        0.0
    };

    // Back to the original coordinates; H0 re-orthonormalized.
    let h0 = orthonormalize(&(&model.w_inv * &h0_tilde));
    let h1 = &model.w_inv * &h1_tilde;
    Ok(DecompositionResult {
        h0_basis: h0,
        h1_basis: h1,
        unitary_residual,
        invariance_residual,
    })
}

/// Gram-Schmidt orthonormalization of the columns (drops dependent ones).
fn orthonormalize(m: &CMat) -> CMat {
    let mut cols: Vec<crate::matrix::CVec> = Vec::new();
    for j in 0..m.ncols() {
        let mut v: crate::matrix::CVec = m.column(j).into_owned();
        for q in &cols {
            let c = q.dotc(&v);
            v -= q * c;
        }
        let n = v.norm();
        if n > 1e-12 {
            cols.push(v / Complex::new(n, 0.0));
        }
    }
    let dim = m.nrows();
    let mut out = CMat::zeros(dim, cols.len());
    for (j, c) in cols.iter().enumerate() {
        out.set_column(j, c);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::cvec_from_real;
    use crate::weight::GoodWeight;

    fn s(coeffs: &[f64]) -> TruncatedSeries<f64> {
        TruncatedSeries::polynomial(coeffs.to_vec(), GoodWeight::unit())
    }

    fn nilpotent() -> OperatorMatrix {
        OperatorMatrix::from_real_rows(2, &[0.0, 2.0, 0.0, 0.0])
    }

    #[test]
    fn defect_examples() {
        // nilpotent with 1-t^2: D = I
        let d = defect_operator(&nilpotent(), &s(&[1.0, 0.0, -1.0]), 1e-9).unwrap();
        assert!(spectral_norm(&(d.matrix() - CMat::identity(2, 2))) < 1e-12);
        // scalar 1/2 with 1-t: sqrt(3/4)
        let d = defect_operator(&OperatorMatrix::from_real_rows(1, &[0.5]), &s(&[1.0, -1.0]), 1e-9)
            .unwrap();
        assert!((d.matrix()[(0, 0)].re - 0.75f64.sqrt()).abs() < 1e-12);
        // unitary: D = 0
        let u = OperatorMatrix::from_complex_rows(2, &[0.0, 1.0, 1.0, 0.0], &[0.0; 4]);
        let d = defect_operator(&u, &s(&[1.0, -1.0]), 1e-9).unwrap();
        assert!(spectral_norm(d.matrix()) < 1e-12);
    }

    #[test]
    fn renorm_nilpotent_witness() {
        let t = nilpotent();
        let model = build_renorm(&t, &s(&[1.0, 0.0, -1.0]), 1e-9).unwrap();
        let g = model.gram.matrix();
        assert!((g[(0, 0)].re - 1.0).abs() < 1e-12);
        assert!((g[(1, 1)].re - 5.0).abs() < 1e-12);
        assert!(g[(0, 1)].norm() < 1e-12);
        assert!((model.contraction_norm - 2.0 / 5.0f64.sqrt()).abs() < 1e-12);
        assert!(model.defect_residual < 1e-12);
        let n = verify_similarity(&model, &t, 1e-9).unwrap();
        assert!((n - 2.0 / 5.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn renorm_unitary_is_identity() {
        let u = OperatorMatrix::from_complex_rows(2, &[0.0, 1.0, 1.0, 0.0], &[0.0; 4]);
        let model = build_renorm(&u, &s(&[1.0, -1.0]), 1e-9).unwrap();
        assert!(spectral_norm(&(model.gram.matrix() - CMat::identity(2, 2))) < 1e-9);
        assert!((model.contraction_norm - 1.0).abs() < 1e-9);
    }

    #[test]
    fn renorm_skew_oscillating_member() {
        // T = V diag(1,-1) V^{-1}, V = [[1, 1/sqrt2],[0, 1/sqrt2]];
        // alpha = (1-t)(1+t)^2 kills the oscillating cross terms through f.
        let s2 = std::f64::consts::FRAC_1_SQRT_2;
        let v = CMat::from_row_slice(
            2,
            2,
            &[
                Complex::new(1.0, 0.0),
                Complex::new(s2, 0.0),
                Complex::new(0.0, 0.0),
                Complex::new(s2, 0.0),
            ],
        );
        let diag = CMat::from_diagonal(&crate::matrix::CVec::from_vec(vec![
            Complex::new(1.0, 0.0),
            Complex::new(-1.0, 0.0),
        ]));
        let vinv = v.clone().try_inverse().unwrap();
        let t = OperatorMatrix::new(&v * diag * vinv);
        let alpha = s(&[1.0, 1.0, -1.0, -1.0]); // (1-t)(1+t)^2
        let model = build_renorm(&t, &alpha, 1e-9).unwrap();
        let scale = spectral_norm(model.gram.matrix()).max(1.0);
        assert!(model.defect_residual <= 1e-9 * scale);
        assert!(model.contraction_norm <= 1.0 + 1e-9);
    }

    #[test]
    fn new_norm_defect_identity_sampled() {
        let t = nilpotent();
        let model = build_renorm(&t, &s(&[1.0, 0.0, -1.0]), 1e-9).unwrap();
        for h in [[1.0, 0.0], [0.0, 1.0], [0.3, -0.7]] {
            let hv = cvec_from_real(&h);
            let th = t.apply(&hv);
            let lhs = model.new_norm_sq(&hv) - model.new_norm_sq(&th);
            let dh = model.d.apply(&hv);
            assert!((lhs - dh.norm_squared()).abs() < 1e-10);
        }
    }

    #[test]
    fn abstract_defect_trivial_cases() {
        // D = I, T = 0: c = C = 1
        let t = OperatorMatrix::from_real_rows(2, &[0.0; 4]);
        let (c, cc) = abstract_defect_check(&t, &OperatorMatrix::identity(2), 256, 1e-9).unwrap();
        assert!((c - 1.0).abs() < 1e-9 && (cc - 1.0).abs() < 1e-9);
        // D = 0, T nilpotent: c = 0
        let zero = OperatorMatrix::from_real_rows(2, &[0.0; 4]);
        let (c, _) = abstract_defect_check(&nilpotent(), &zero, 256, 1e-9).unwrap();
        assert!(c < 1e-12);
    }

    #[test]
    fn abstract_defect_for_member() {
        let t = nilpotent();
        let d = defect_operator(&t, &s(&[1.0, 0.0, -1.0]), 1e-9).unwrap();
        let (c, cc) = abstract_defect_check(&t, &d, 256, 1e-9).unwrap();
        assert!(c > 0.0);
        assert!(cc >= c);
        assert!(cc / c < 100.0);
    }

    #[test]
    fn decomposition_unitary_and_nilpotent() {
        let u = OperatorMatrix::from_complex_rows(2, &[0.0, 1.0, 1.0, 0.0], &[0.0; 4]);
        let model = build_renorm(&u, &s(&[1.0, -1.0]), 1e-9).unwrap();
        let dec = canonical_decomposition(&model, &u, 1e-9).unwrap();
        assert_eq!(dec.h0_basis.ncols(), 2);
        assert_eq!(dec.h1_basis.ncols(), 0);
        assert!(dec.unitary_residual < 1e-8);

        // 1-t^2 reduces to 1+t which vanishes on the circle, so pick the
        // strongly admissible (1-t)(1+3t/4) instead; D^2 = diag(1,0) >= 0.
        let t = nilpotent();
        let model = build_renorm(&t, &s(&[1.0, -0.25, -0.75]), 1e-9).unwrap();
        let dec = canonical_decomposition(&model, &t, 1e-9).unwrap();
        assert_eq!(dec.h0_basis.ncols(), 0);
        assert_eq!(dec.h1_basis.ncols(), 2);
    }

    #[test]
    fn decomposition_direct_sum() {
        // U (+) N with alpha = 1-t: H0 = the unitary summand
        let t = OperatorMatrix::from_complex_rows(
            3,
            &[0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.5],
            &[0.0; 9],
        );
        let model = build_renorm(&t, &s(&[1.0, -1.0]), 1e-9).unwrap();
        let dec = canonical_decomposition(&model, &t, 1e-9).unwrap();
        assert_eq!(dec.h0_basis.ncols(), 2);
        assert_eq!(dec.h1_basis.ncols(), 1);
        assert!(dec.unitary_residual < 1e-8);
        assert!(dec.invariance_residual < 1e-7);
        // the H0 columns live in span(e1, e2)
        for j in 0..2 {
            assert!(dec.h0_basis[(2, j)].norm() < 1e-8);
        }
    }

    #[test]
    fn decomposition_needs_strong_admissibility() {
        let s2 = std::f64::consts::FRAC_1_SQRT_2;
        let v = CMat::from_row_slice(
            2,
            2,
            &[
                Complex::new(1.0, 0.0),
                Complex::new(s2, 0.0),
                Complex::new(0.0, 0.0),
                Complex::new(s2, 0.0),
            ],
        );
        let diag = CMat::from_diagonal(&crate::matrix::CVec::from_vec(vec![
            Complex::new(1.0, 0.0),
            Complex::new(-1.0, 0.0),
        ]));
        let vinv = v.clone().try_inverse().unwrap();
        let t = OperatorMatrix::new(&v * diag * vinv);
        let model = build_renorm(&t, &s(&[1.0, 1.0, -1.0, -1.0]), 1e-9).unwrap();
        assert!(canonical_decomposition(&model, &t, 1e-9).is_err());
    }
}
