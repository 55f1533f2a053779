//! Root finding for real polynomials via Aberth's simultaneous iteration,
//! with conjugate pairing and sign classification of the root set.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Polynomial;

/// Classification threshold: a root with `|Im| < 1e-9 (1 + |root|)` is
/// treated as real, keeping conjugate pairing stable near the axis.
pub fn real_axis_threshold(z: Complex<f64>) -> f64 {
    1e-9 * (1.0 + z.norm())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootClass {
    PositiveReal,
    NegativeReal,
    NonrealPair,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Root {
    pub re: f64,
    pub im: f64,
    pub multiplicity: usize,
    pub class: RootClass,
}

impl Root {
    pub fn value(&self) -> Complex<f64> {
        Complex::new(self.re, self.im)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComplexRootSet {
    pub roots: Vec<Root>,
    /// `max |q(root)|`, scaled by the polynomial magnitude.
    pub residual: f64,
}

impl ComplexRootSet {
    pub fn total_multiplicity(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }

    pub fn has_real_root(&self) -> bool {
        self.roots.iter().any(|r| r.class != RootClass::NonrealPair)
    }

    /// Roots with `Im > 0`, one representative per conjugate pair,
    /// repeated by multiplicity.
    pub fn upper_half_plane(&self) -> Vec<Complex<f64>> {
        let mut out = Vec::new();
        for r in &self.roots {
            if r.class == RootClass::NonrealPair && r.im > 0.0 {
                for _ in 0..r.multiplicity {
                    out.push(r.value());
                }
            }
        }
        out
    }

    /// Real roots of the given sign, repeated by multiplicity.
    pub fn real_roots(&self, class: RootClass) -> Vec<f64> {
        let mut out = Vec::new();
        for r in &self.roots {
            if r.class == class {
                for _ in 0..r.multiplicity {
                    out.push(r.re);
                }
            }
        }
        out
    }
}

fn eval_with_derivative(coeffs: &[f64], z: Complex<f64>) -> (Complex<f64>, Complex<f64>) {
    let mut p = Complex::new(0.0, 0.0);
    let mut dp = Complex::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Aberth-Ehrlich iteration for all roots of a real polynomial.
fn aberth(coeffs: &[f64], max_iter: usize, eps: f64) -> Result<Vec<Complex<f64>>> {
    let n = coeffs.len() - 1;
    let an = coeffs[n];
    let a0 = coeffs[0];
    let radius = if a0 != 0.0 {
        (a0.abs() / an.abs()).powf(1.0 / n as f64).max(0.25)
    } else {
        0.5
    };
    let mut z: Vec<Complex<f64>> = (0..n)
        .map(|k| Complex::from_polar(radius * (1.0 + 0.1 * (k as f64 / n as f64)), std::f64::consts::TAU * k as f64 / n as f64 + 0.43))
        .collect();
    for _ in 0..max_iter {
        let mut done = true;
        for i in 0..n {
            let (p, dp) = eval_with_derivative(coeffs, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let newton = if dp.norm() > 0.0 { p / dp } else { Complex::new(eps, eps) };
            let mut repulsion = Complex::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    let d = z[i] - z[j];
                    if d.norm() > 1e-300 {
                        repulsion += Complex::new(1.0, 0.0) / d;
                    }
                }
            }
            let denom = Complex::new(1.0, 0.0) - newton * repulsion;
            let w = if denom.norm() > 1e-300 { newton / denom } else { newton };
            z[i] -= w;
            if w.norm() > eps * (1.0 + z[i].norm()) {
                done = false;
            }
        }
        if done {
            return Ok(z);
        }
    }
    // Multiple roots converge only linearly; accept the cluster if the
    // residuals are already small, otherwise report failure.
    let scale = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let max_res = z
        .iter()
        .map(|&zi| eval_with_derivative(coeffs, zi).0.norm())
        .fold(0.0f64, f64::max);
    if max_res <= 1e-8 * scale {
        Ok(z)
    } else {
        Err(Error::Numerical(format!(
            "root iteration did not converge; max residual {max_res:.3e} at scale {scale:.3e}"
        )))
    }
}

/// All roots of `q` with residual certificate and sign classification.
/// Nonreal roots are returned as exact conjugate pairs.
pub fn poly_roots(q: &Polynomial<f64>, tol: f64) -> Result<ComplexRootSet> {
    if q.is_zero() {
        return Err(Error::Input("root finding on the zero polynomial".into()));
    }
    let mut coeffs = q.coeffs().to_vec();
    // Deflate exact zero roots first.
    let mut zero_mult = 0usize;
    while coeffs.first() == Some(&0.0) && coeffs.len() > 1 {
        coeffs.remove(0);
        zero_mult += 1;
    }
    let scale = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let mut raw = if coeffs.len() > 1 {
        aberth(&coeffs, 400, 1e-13)?
    } else {
        Vec::new()
    };

    // Snap near-real roots onto the axis.
    for z in raw.iter_mut() {
        if z.im.abs() < real_axis_threshold(*z) {
            z.im = 0.0;
        }
    }

    // Cluster for multiplicity.
    let mut clusters: Vec<(Complex<f64>, usize)> = Vec::new();
    for &z in &raw {
        let mut placed = false;
        for (c, m) in clusters.iter_mut() {
            if (*c - z).norm() < 1e-6 * (1.0 + z.norm()) && (c.im == 0.0) == (z.im == 0.0) {
                let mf = *m as f64;
                *c = (*c * mf + z) / (mf + 1.0);
                *m += 1;
                placed = true;
                break;
            }
        }
        if !placed {
            clusters.push((z, 1));
        }
    }

    let mut roots = Vec::new();
    if zero_mult > 0 {
        roots.push(Root {
            re: 0.0,
            im: 0.0,
            multiplicity: zero_mult,
            class: RootClass::PositiveReal,
        });
    }
    let mut upper: Vec<(Complex<f64>, usize)> = Vec::new();
    let mut lower: Vec<(Complex<f64>, usize)> = Vec::new();
    for (z, m) in clusters {
        if z.im == 0.0 {
            roots.push(Root {
                re: z.re,
                im: 0.0,
                multiplicity: m,
                class: if z.re >= 0.0 {
                    RootClass::PositiveReal
                } else {
                    RootClass::NegativeReal
                },
            });
        } else if z.im > 0.0 {
            upper.push((z, m));
        } else {
            lower.push((z, m));
        }
    }
    // Conjugate symmetry: match each upper root with a lower one and store
    // the exactly conjugate pair.
    if upper.len() != lower.len() || upper.iter().map(|u| u.1).sum::<usize>() != lower.iter().map(|l| l.1).sum::<usize>() {
        return Err(Error::Numerical(
            "nonreal roots failed to pair into conjugates".into(),
        ));
    }
    for (z, m) in upper {
        let mut best = None;
        let mut best_d = f64::INFINITY;
        for (k, (w, wm)) in lower.iter().enumerate() {
            let d = (w.conj() - z).norm();
            if d < best_d && *wm == m {
                best_d = d;
                best = Some(k);
            }
        }
        let k = best.ok_or_else(|| {
            Error::Numerical("conjugate pairing failed (multiplicity mismatch)".into())
        })?;
        if best_d > 1e-6 * (1.0 + z.norm()) {
            return Err(Error::Numerical(format!(
                "conjugate mismatch of size {best_d:.3e}"
            )));
        }
        lower.remove(k);
        let paired = Complex::new(z.re, z.im.abs());
        roots.push(Root {
            re: paired.re,
            im: paired.im,
            multiplicity: m,
            class: RootClass::NonrealPair,
        });
        roots.push(Root {
            re: paired.re,
            im: -paired.im,
            multiplicity: m,
            class: RootClass::NonrealPair,
        });
    }

    let mut residual = 0.0f64;
    for r in &roots {
        residual = residual.max(q.eval_f64(r.re).abs().min({
            let mut acc = Complex::new(0.0, 0.0);
            for c in q.coeffs().iter().rev() {
                acc = acc * r.value() + c;
            }
            acc.norm()
        }));
    }
    residual /= scale.max(f64::MIN_POSITIVE);
    if residual > tol {
        return Err(Error::Numerical(format!(
            "root residual {residual:.3e} exceeds tolerance {tol:.3e}"
        )));
    }
    Ok(ComplexRootSet { roots, residual })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(coeffs: &[f64]) -> Polynomial<f64> {
        Polynomial::new(coeffs.to_vec())
    }

    #[test]
    fn quadratic_pure_imaginary() {
        // t^2 + 1 -> +-i
        let rs = poly_roots(&p(&[1.0, 0.0, 1.0]), 1e-9).unwrap();
        assert_eq!(rs.total_multiplicity(), 2);
        assert!(rs.roots.iter().all(|r| r.class == RootClass::NonrealPair));
        let up = rs.upper_half_plane();
        assert!((up[0] - Complex::new(0.0, 1.0)).norm() < 1e-10);
    }

    #[test]
    fn quadratic_sixth_roots_of_unity() {
        // t^2 - t + 1 -> e^{+-i pi/3}
        let rs = poly_roots(&p(&[1.0, -1.0, 1.0]), 1e-9).unwrap();
        let up = rs.upper_half_plane();
        let expected = Complex::from_polar(1.0, std::f64::consts::FRAC_PI_3);
        assert!((up[0] - expected).norm() < 1e-10);
    }

    #[test]
    fn linear_real_root() {
        // 2 - t -> 2, positive-real
        let rs = poly_roots(&p(&[2.0, -1.0]), 1e-9).unwrap();
        assert_eq!(rs.roots.len(), 1);
        assert_eq!(rs.roots[0].class, RootClass::PositiveReal);
        assert!((rs.roots[0].re - 2.0).abs() < 1e-12);
    }

    #[test]
    fn mixed_cubic() {
        // (t+1)(t^2+4): one negative real, one pair at +-2i
        let rs = poly_roots(&p(&[4.0, 4.0, 1.0, 1.0]), 1e-8).unwrap();
        assert_eq!(rs.total_multiplicity(), 3);
        assert_eq!(rs.real_roots(RootClass::NegativeReal), vec![-1.0]);
    }

    #[test]
    fn degree_eight_random_sanity() {
        // (t^2+1)(t^2-t+1)(t-2)(t+3)(t-5)(t+7)
        let q = p(&[1.0, 0.0, 1.0])
            .mul(&p(&[1.0, -1.0, 1.0]))
            .mul(&p(&[-2.0, 1.0]))
            .mul(&p(&[3.0, 1.0]))
            .mul(&p(&[-5.0, 1.0]))
            .mul(&p(&[7.0, 1.0]));
        let rs = poly_roots(&q, 1e-6).unwrap();
        assert_eq!(rs.total_multiplicity(), 8);
        assert_eq!(rs.real_roots(RootClass::PositiveReal).len(), 2);
        assert_eq!(rs.real_roots(RootClass::NegativeReal).len(), 2);
        assert_eq!(rs.upper_half_plane().len(), 2);
    }
}
