//! Truncated power series with certified weighted tail bounds.
//!
//! A series is `N+1` stored Taylor coefficients plus a nonnegative
//! `tail_bound` that upper-bounds the weighted tail mass
//! `sum_{n>N} |f_n| omega_n`. Every operation propagates a bound it can
//! certify; nothing is silently truncated.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Coeff;
use crate::weight::GoodWeight;

#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries<S> {
    coeffs: Vec<S>,
    tail_bound: f64,
    weight: GoodWeight,
}

/// Outcome of a coefficientwise comparison of two series.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DominanceRelation {
    Strict,
    Weak,
    Refuted,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DominanceVerdict {
    pub relation: DominanceRelation,
    pub witness_index: Option<usize>,
    /// Minimal coefficient slack observed (most negative difference).
    pub margin: f64,
}

impl DominanceVerdict {
    pub fn is_strict(&self) -> bool {
        self.relation == DominanceRelation::Strict
    }

    pub fn holds_weakly(&self) -> bool {
        matches!(
            self.relation,
            DominanceRelation::Strict | DominanceRelation::Weak
        )
    }
}

impl<S: Coeff> TruncatedSeries<S> {
    pub fn new(coeffs: Vec<S>, tail_bound: f64, weight: GoodWeight) -> Result<Self> {
        if !(tail_bound >= 0.0) || !tail_bound.is_finite() {
            return Err(Error::Input(format!("invalid tail bound {tail_bound}")));
        }
        if coeffs.iter().any(|c| !c.to_f64().is_finite()) {
            return Err(Error::Input("non-finite coefficient".into()));
        }
        Ok(TruncatedSeries {
            coeffs,
            tail_bound,
            weight,
        })
    }

    /// A series that is exactly a polynomial (zero tail).
    pub fn polynomial(coeffs: Vec<S>, weight: GoodWeight) -> Self {
        TruncatedSeries {
            coeffs,
            tail_bound: 0.0,
            weight,
        }
    }

    pub fn zero(weight: GoodWeight) -> Self {
        Self::polynomial(Vec::new(), weight)
    }

    pub fn one(weight: GoodWeight) -> Self {
        Self::polynomial(vec![S::one()], weight)
    }

    pub fn constant(c: S, weight: GoodWeight) -> Self {
        Self::polynomial(vec![c], weight)
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> S {
        self.coeffs.get(n).cloned().unwrap_or_else(S::zero)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn weight(&self) -> &GoodWeight {
        &self.weight
    }

    pub fn is_polynomial(&self) -> bool {
        self.tail_bound == 0.0
    }

    fn check_weight(&self, other: &Self) -> Result<()> {
        if self.weight.compatible(&other.weight) {
            Ok(())
        } else {
            Err(Error::WeightMismatch)
        }
    }

    /// Upper bound for the algebra norm: `sum |f_n| omega_n + tail`.
    pub fn wiener_norm(&self) -> f64 {
        let mut s = 0.0;
        for (n, c) in self.coeffs.iter().enumerate() {
            s += c.abs().to_f64() * self.weight.value(n);
        }
        s + self.tail_bound
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_weight(other)?;
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) + other.coeff(i));
        }
        Ok(TruncatedSeries {
            coeffs: out,
            tail_bound: self.tail_bound + other.tail_bound,
            weight: self.weight.clone(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|c| -c.clone()).collect(),
            tail_bound: self.tail_bound,
            weight: self.weight.clone(),
        }
    }

    pub fn scale(&self, c: &S) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|x| x.clone() * c.clone()).collect(),
            tail_bound: self.tail_bound * c.abs().to_f64(),
            weight: self.weight.clone(),
        }
    }

    /// Cauchy product. The stored coefficients are the exact convolution of
    /// the stored prefixes; tails propagate through the norm:
    /// `tail(fg) <= |f| tail(g) + tail(f) |g| + tail(f) tail(g)`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_weight(other)?;
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            let tail = self.wiener_norm() * other.tail_bound + self.tail_bound * other.wiener_norm();
            return Ok(TruncatedSeries {
                coeffs: Vec::new(),
                tail_bound: tail,
                weight: self.weight.clone(),
            });
        }
        let mut out = vec![S::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        let nf = self.wiener_norm();
        let ng = other.wiener_norm();
        let tail = nf * other.tail_bound + self.tail_bound * ng + self.tail_bound * other.tail_bound;
        Ok(TruncatedSeries {
            coeffs: out,
            tail_bound: tail,
            weight: self.weight.clone(),
        })
    }

    /// Keeps coefficients of index `<= n`, folding the cut mass into the
    /// tail bound (so the result still certifies the same function).
    pub fn truncate(&self, n: usize) -> Self {
        if self.coeffs.len() <= n + 1 {
            return self.clone();
        }
        let mut cut = 0.0;
        for (k, c) in self.coeffs.iter().enumerate().skip(n + 1) {
            cut += c.abs().to_f64() * self.weight.value(k);
        }
        TruncatedSeries {
            coeffs: self.coeffs[..=n].to_vec(),
            tail_bound: self.tail_bound + cut,
            weight: self.weight.clone(),
        }
    }

    /// Classifies `f` vs `g` in the coefficientwise ordering; exact when both
    /// scalars are exact and both tails vanish.
    pub fn dominance_check(&self, other: &Self, tol: f64) -> Result<DominanceVerdict> {
        self.check_weight(other)?;
        let n = self.coeffs.len().max(other.coeffs.len());
        let tails = self.tail_bound + other.tail_bound;
        let mut margin = f64::INFINITY;
        let mut witness = None;
        for i in 0..n {
            let d = self.coeff(i) - other.coeff(i);
            let df = d.to_f64();
            if df < margin {
                margin = df;
            }
            if witness.is_none() && d.is_negative_beyond(tol) {
                witness = Some(i);
            }
        }
        if n == 0 {
            margin = 0.0;
        }
        if let Some(i) = witness {
            return Ok(DominanceVerdict {
                relation: DominanceRelation::Refuted,
                witness_index: Some(i),
                margin,
            });
        }
        if tails > tol {
            return Ok(DominanceVerdict {
                relation: DominanceRelation::Inconclusive,
                witness_index: None,
                margin,
            });
        }
        let head = self.coeff(0) - other.coeff(0);
        let relation = if head.is_positive_beyond(tol) {
            DominanceRelation::Strict
        } else {
            DominanceRelation::Weak
        };
        Ok(DominanceVerdict {
            relation,
            witness_index: None,
            margin,
        })
    }

    /// Evaluates the stored prefix at a real point.
    pub fn eval_prefix(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * t + c.to_f64();
        }
        acc
    }

    pub fn eval_prefix_complex(&self, z: Complex<f64>) -> Complex<f64> {
        let mut acc = Complex::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c.to_f64();
        }
        acc
    }

    /// Certified lower bound for `min_{[0,1]} f` via a grid, a derivative
    /// slack for the stored prefix and the tail as value uncertainty
    /// (the tail part is bounded by `tail` pointwise since `omega_n >= 1`).
    pub fn min_on_unit_interval(&self, grid: usize) -> f64 {
        let grid = grid.max(2);
        let deriv: f64 = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| n as f64 * c.abs().to_f64())
            .sum();
        let h = 1.0 / (grid - 1) as f64;
        let mut min = f64::INFINITY;
        for k in 0..grid {
            min = min.min(self.eval_prefix(k as f64 * h));
        }
        min - deriv * h / 2.0 - self.tail_bound
    }

    /// Certified lower bound for `min_{|z|=1} |f(z)|`.
    pub fn min_modulus_on_circle(&self, grid: usize) -> f64 {
        let grid = grid.max(4);
        let deriv: f64 = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| n as f64 * c.abs().to_f64())
            .sum();
        let step = std::f64::consts::TAU / grid as f64;
        let mut min = f64::INFINITY;
        for k in 0..grid {
            let z = Complex::from_polar(1.0, k as f64 * step);
            min = min.min(self.eval_prefix_complex(z).norm());
        }
        min - deriv * step / 2.0 - self.tail_bound
    }

    /// Quotient by `(1 - t)`: the prefix-sum series. Requires the total
    /// coefficient sum to vanish (value at 1 within tolerance for float
    /// data, exactly for polynomials over exact scalars). The tail of the
    /// quotient is certified only from the input tail; see
    /// `TAIL_MOMENT_FACTOR`.
    pub fn divide_by_one_minus_t(&self, tol: f64) -> Result<Self> {
        let mut out = Vec::with_capacity(self.coeffs.len());
        let mut acc = S::zero();
        for c in &self.coeffs {
            acc = acc + c.clone();
            out.push(acc.clone());
        }
        let rem = out.pop().unwrap_or_else(S::zero);
        // rounding in the prefix sums scales with the coefficient mass
        let slack = tol * self.wiener_norm().max(1.0) + self.tail_bound;
        if S::EXACT && self.tail_bound == 0.0 {
            if !rem.is_zero() {
                return Err(Error::Precondition(
                    "series does not vanish at t = 1 (division leaves remainder)".into(),
                ));
            }
        } else if rem.to_f64().abs() > slack {
            return Err(Error::Precondition(format!(
                "value at t = 1 is {:.3e}, beyond tolerance {:.3e}",
                rem.to_f64(),
                slack
            )));
        }
        Ok(TruncatedSeries {
            coeffs: out,
            tail_bound: self.tail_bound * TAIL_MOMENT_FACTOR,
            weight: self.weight.clone(),
        })
    }

    /// Geometric-series inverse: writes `h = c (1 - a)` with `c = h_0` and
    /// inverts through `sum a^k / c`, which certifies the residual whenever
    /// the algebra norm of `a` is below one. The result `v` satisfies
    /// `|h v - 1| <= tol` in the weighted norm.
    pub fn invert_neumann(&self, tol: f64, max_len: usize) -> Result<Self> {
        let c = self.coeff(0);
        if c.is_zero() || c.to_f64().abs() < f64::MIN_POSITIVE {
            return Err(Error::NotInvertible("constant term vanishes".into()));
        }
        // a := 1 - h/c  (a_0 = 0).
        let mut a_coeffs = vec![S::zero(); self.coeffs.len().max(1)];
        for (n, hc) in self.coeffs.iter().enumerate().skip(1) {
            a_coeffs[n] = -(hc.clone() / c.clone());
        }
        let a = TruncatedSeries {
            coeffs: a_coeffs,
            tail_bound: self.tail_bound / c.abs().to_f64(),
            weight: self.weight.clone(),
        };
        let norm_a = a.wiener_norm();
        if norm_a >= 1.0 {
            return Err(Error::NotInvertible(format!(
                "norm of the contraction part is {norm_a:.6} >= 1"
            )));
        }
        let inv_c_abs = 1.0 / c.abs().to_f64();
        // The residual check multiplies by h, so leave room for its norm.
        let budget = tol / (2.0 * self.wiener_norm().max(1.0));
        let mut sum = Self::one(self.weight.clone());
        let mut pow = a.clone();
        let mut remainder;
        loop {
            sum = sum.add(&pow)?.truncate(max_len);
            // Norm of the not-yet-added part of the geometric series.
            remainder = pow.wiener_norm() * norm_a / (1.0 - norm_a) * inv_c_abs;
            if remainder <= budget {
                break;
            }
            if pow.wiener_norm() < f64::MIN_POSITIVE {
                remainder = 0.0;
                break;
            }
            pow = pow.mul(&a)?.truncate(max_len);
        }
        let one_over_c = S::one() / c;
        let mut v = sum.scale(&one_over_c);
        v.tail_bound += remainder;
        // Self-check of the certified residual.
        let residual = self
            .mul(&v)?
            .sub(&Self::one(self.weight.clone()))?
            .wiener_norm();
        if residual > tol {
            return Err(Error::Numerical(format!(
                "Neumann inverse residual {residual:.3e} exceeds tolerance {tol:.3e}"
            )));
        }
        Ok(v)
    }

    pub fn map_to_f64(&self) -> TruncatedSeries<f64> {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|c| c.to_f64()).collect(),
            tail_bound: self.tail_bound,
            weight: self.weight.clone(),
        }
    }
}

/// Growth allowance used when dividing a non-polynomial series by `(1-t)`:
/// the quotient tail is certified as `input_tail * TAIL_MOMENT_FACTOR`,
/// which is valid for tails with at most geometric index spread. Inputs with
/// larger tails should be truncated longer instead.
pub const TAIL_MOMENT_FACTOR: f64 = 64.0;

/// First `n` coefficients of `num / den` as formal power series
/// (`den[0] != 0`). Exact over exact scalars.
pub fn divide_power_series<S: Coeff>(num: &[S], den: &[S], n: usize) -> Result<Vec<S>> {
    let d0 = den.first().cloned().unwrap_or_else(S::zero);
    if d0.is_zero() {
        return Err(Error::Input(
            "power-series division by series with zero constant term".into(),
        ));
    }
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let mut acc = num.get(k).cloned().unwrap_or_else(S::zero);
        for (j, g) in out.iter().enumerate().take(k) {
            let dk = den.get(k - j).cloned().unwrap_or_else(S::zero);
            acc = acc - dk * (g as &S).clone();
        }
        out.push(acc / d0.clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn s64(coeffs: &[f64]) -> TruncatedSeries<f64> {
        TruncatedSeries::polynomial(coeffs.to_vec(), GoodWeight::unit())
    }

    #[test]
    fn polynomial_products() {
        // (1-t)(1+t) = 1 - t^2
        let p = s64(&[1.0, -1.0]).mul(&s64(&[1.0, 1.0])).unwrap();
        assert_eq!(p.coeffs(), &[1.0, 0.0, -1.0]);
        assert_eq!(p.tail_bound(), 0.0);
        // (1-t)(1+t)^2 = 1 + t - t^2 - t^3
        let q = p.mul(&s64(&[1.0, 1.0])).unwrap();
        assert_eq!(q.coeffs(), &[1.0, 1.0, -1.0, -1.0]);
        // f * 1 = f
        let f = s64(&[2.0, 3.0, -1.0]);
        assert_eq!(f.mul(&s64(&[1.0])).unwrap().coeffs(), f.coeffs());
    }

    #[test]
    fn wiener_norm_values() {
        assert_eq!(s64(&[1.0, -1.0]).wiener_norm(), 2.0);
        assert_eq!(s64(&[]).wiener_norm(), 0.0);
        assert_eq!(s64(&[0.5, 0.5]).wiener_norm(), 1.0);
    }

    #[test]
    fn dominance_examples() {
        let z = s64(&[]);
        let v = s64(&[1.0, 1.0, 1.0]).dominance_check(&z, 1e-12).unwrap();
        assert_eq!(v.relation, DominanceRelation::Strict);

        let v = s64(&[1.0, -1.0]).dominance_check(&z, 1e-12).unwrap();
        assert_eq!(v.relation, DominanceRelation::Refuted);
        assert_eq!(v.witness_index, Some(1));

        // (0, 1, 0, ...) is weakly but not strictly dominant.
        let v = s64(&[0.0, 1.0]).dominance_check(&z, 1e-12).unwrap();
        assert_eq!(v.relation, DominanceRelation::Weak);
    }

    #[test]
    fn dominance_is_exact_on_rationals() {
        let w = GoodWeight::unit();
        let tiny = BigRational::from_ratio(1, 1_000_000_000_000_000_000);
        let f = TruncatedSeries::polynomial(vec![BigRational::from_int(1), -tiny], w.clone());
        let z = TruncatedSeries::zero(w);
        // A refutation this small would pass under a float tolerance; the
        // exact path must still see it.
        let v = f.dominance_check(&z, 1e-9).unwrap();
        assert_eq!(v.relation, DominanceRelation::Refuted);
    }

    #[test]
    fn neumann_inverse_geometric() {
        // 1/(1 - t/2) = sum 2^-n t^n
        let h = s64(&[1.0, -0.5]);
        let v = h.invert_neumann(1e-12, 128).unwrap();
        for n in 0..20 {
            assert!((v.coeff(n) - 0.5f64.powi(n as i32)).abs() < 1e-12);
        }
        // constant: 1/2
        let v = s64(&[2.0]).invert_neumann(1e-12, 16).unwrap();
        assert!((v.coeff(0) - 0.5).abs() < 1e-15);
        // boundary of the Neumann condition
        assert!(s64(&[1.0, -1.0]).invert_neumann(1e-12, 128).is_err());
    }

    #[test]
    fn neumann_residual_certified() {
        let h = s64(&[2.0, 0.3, -0.4, 0.1]);
        let v = h.invert_neumann(1e-10, 256).unwrap();
        let res = h.mul(&v).unwrap().sub(&s64(&[1.0])).unwrap().wiener_norm();
        assert!(res <= 1e-10);
    }

    #[test]
    fn division_prefix_sums() {
        let f = s64(&[1.0, 0.0, 0.0, -1.0]);
        let q = f.divide_by_one_minus_t(1e-12).unwrap();
        assert_eq!(q.coeffs(), &[1.0, 1.0, 1.0]);
    }

    #[test]
    fn power_series_division() {
        // (1 - t/2) / 1
        let g = divide_power_series(&[1.0, -0.5], &[1.0], 4).unwrap();
        assert_eq!(g, vec![1.0, -0.5, 0.0, 0.0]);
        // 1 / (1 - t) = all ones
        let g = divide_power_series(&[1.0], &[1.0, -1.0], 5).unwrap();
        assert_eq!(g, vec![1.0; 5]);
    }

    #[test]
    fn min_on_interval_bounds() {
        // 2 - t has minimum 1 on [0,1].
        let lb = s64(&[2.0, -1.0]).min_on_unit_interval(1024);
        assert!(lb > 0.99 && lb <= 1.0);
    }
}
