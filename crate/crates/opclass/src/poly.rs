//! Dense univariate polynomials over a [`Coeff`] scalar.
//!
//! The exact-rational instantiation carries the constructive factorization
//! lemmas; the `f64` instantiation feeds the numeric series paths.


use crate::error::{Error, Result};
use crate::scalar::Coeff;
use crate::series::TruncatedSeries;
use crate::weight::GoodWeight;

/// Dense polynomial, constant term first. The zero polynomial is the empty
/// coefficient vector; otherwise the leading coefficient is nonzero.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial<S> {
    coeffs: Vec<S>,
}

impl<S: Coeff> Polynomial<S> {
    pub fn new(mut coeffs: Vec<S>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Polynomial {
            coeffs: vec![S::one()],
        }
    }

    pub fn constant(c: S) -> Self {
        Self::new(vec![c])
    }

    /// `c * t^k`.
    pub fn monomial(c: S, k: usize) -> Self {
        let mut v = vec![S::zero(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| S::from_int(c)).collect())
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> S {
        self.coeffs.get(n).cloned().unwrap_or_else(S::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree of the polynomial; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, t: &S) -> S {
        let mut acc = S::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * t.clone() + c.clone();
        }
        acc
    }

    pub fn eval_f64(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * t + c.to_f64();
        }
        acc
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) + other.coeff(i));
        }
        Self::new(out)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i) - other.coeff(i));
        }
        Self::new(out)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![S::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, c: &S) -> Self {
        Self::new(self.coeffs.iter().map(|x| x.clone() * c.clone()).collect())
    }

    pub fn neg(&self) -> Self {
        Self::new(self.coeffs.iter().map(|x| -x.clone()).collect())
    }

    /// Euclidean division: `self = q * div + r` with `deg r < deg div`.
    pub fn div_rem(&self, div: &Self) -> Result<(Self, Self)> {
        if div.is_zero() {
            return Err(Error::Input("division by the zero polynomial".into()));
        }
        let dd = div.degree().unwrap();
        let lead = div.coeffs[dd].clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Self::zero(), self.clone()));
        }
        let qlen = rem.len() - dd;
        let mut quo = vec![S::zero(); qlen];
        for k in (0..qlen).rev() {
            let c = rem[k + dd].clone() / lead.clone();
            quo[k] = c.clone();
            for j in 0..=dd {
                rem[k + j] = rem[k + j].clone() - c.clone() * div.coeffs[j].clone();
            }
        }
        Ok((Self::new(quo), Self::new(rem)))
    }

    /// All coefficients nonnegative and the constant term positive
    /// (coefficientwise strict dominance over zero; exact scalars use
    /// `tol = 0`).
    pub fn dominates_zero_strictly(&self, tol: f64) -> bool {
        if self.is_zero() {
            return false;
        }
        self.coeffs[0].is_positive_beyond(tol)
            && self.coeffs.iter().all(|c| !c.is_negative_beyond(tol))
    }

    /// Exact quotient by `(1 - t)`, defined when `self(1) = 0`:
    /// returns the prefix-sum polynomial.
    pub fn divide_by_one_minus_t(&self) -> Result<Self> {
        if self.is_zero() {
            return Ok(Self::zero());
        }
        let mut out = Vec::with_capacity(self.coeffs.len());
        let mut acc = S::zero();
        for c in &self.coeffs {
            acc = acc + c.clone();
            out.push(acc.clone());
        }
        // The last running sum is self(1); it must vanish for exact division.
        let rem = out.pop().unwrap();
        if !rem.is_zero() && S::EXACT {
            return Err(Error::Precondition("polynomial has no root at t = 1".into()));
        }
        if rem.to_f64().abs() > 1e-9 {
            return Err(Error::Precondition(format!(
                "polynomial value at t = 1 is {} (expected 0)",
                rem.to_f64()
            )));
        }
        Ok(Self::new(out))
    }

    pub fn to_series(&self, weight: GoodWeight) -> TruncatedSeries<S> {
        TruncatedSeries::polynomial(self.coeffs.clone(), weight)
    }

    pub fn to_f64_poly(&self) -> Polynomial<f64> {
        Polynomial::new(self.coeffs.iter().map(|c| c.to_f64()).collect())
    }
}
