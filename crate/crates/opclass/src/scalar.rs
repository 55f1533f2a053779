//! Scalar abstraction shared by the series, polynomial and sequence layers.
//!
//! Two regimes are supported behind one trait: `f64` for the
//! tolerance-checked numeric paths and [`BigRational`] for the paths that
//! must produce exact certificates (conjugate-quadratic factors, shift
//! counterexamples, coefficient refutations).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};

/// Coefficient scalar for series, polynomials and one-sided sequences.
///
/// `EXACT` distinguishes arithmetic that is closed under the ring
/// operations (`BigRational`) from floating point; comparisons on exact
/// scalars ignore tolerances.
pub trait Coeff:
    Clone + Signed + PartialOrd + std::fmt::Debug + std::fmt::Display + Send + Sync + 'static
{
    const EXACT: bool;

    fn to_f64(&self) -> f64;

    fn from_int(n: i64) -> Self;

    /// Ratio of two integers; panics if `d == 0`.
    fn from_ratio(n: i64, d: i64) -> Self;

    /// True when `self` is below `-tol` (strictly negative beyond tolerance).
    /// Exact scalars use `tol = 0`.
    fn is_negative_beyond(&self, tol: f64) -> bool {
        if Self::EXACT {
            self.is_negative() && !self.is_zero()
        } else {
            self.to_f64() < -tol
        }
    }

    /// True when `self` exceeds `tol` (strictly positive beyond tolerance).
    fn is_positive_beyond(&self, tol: f64) -> bool {
        if Self::EXACT {
            self.is_positive() && !self.is_zero()
        } else {
            self.to_f64() > tol
        }
    }
}


impl Coeff for f64 {
    const EXACT: bool = false;

    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_int(n: i64) -> Self {
        n as f64
    }

    fn from_ratio(n: i64, d: i64) -> Self {
        n as f64 / d as f64
    }
}

impl Coeff for BigRational {
    const EXACT: bool = true;

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or_else(|| {
            // Fall back to a quotient of approximations for huge terms.
            let n = self.numer().to_f64().unwrap_or(f64::INFINITY);
            let d = self.denom().to_f64().unwrap_or(f64::INFINITY);
            n / d
        })
    }

    fn from_int(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn from_ratio(n: i64, d: i64) -> Self {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }
}

/// Gaussian scalar `re + i*im` over any [`Coeff`]; used for the exact
/// conjugate-quadratic factor chain where complex points with rational
/// coordinates are squared repeatedly.
#[derive(Clone, Debug, PartialEq)]
pub struct Gaussian<S> {
    pub re: S,
    pub im: S,
}

impl<S: Coeff> Gaussian<S> {
    pub fn new(re: S, im: S) -> Self {
        Gaussian { re, im }
    }

    pub fn square(&self) -> Self {
        let re = self.re.clone() * self.re.clone() - self.im.clone() * self.im.clone();
        let im = S::from_int(2) * self.re.clone() * self.im.clone();
        Gaussian { re, im }
    }

    /// |self|^2, exactly.
    pub fn norm_sq(&self) -> S {
        self.re.clone() * self.re.clone() + self.im.clone() * self.im.clone()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_square_matches_complex() {
        let z = Gaussian::new(2.0f64, 1.0);
        let z2 = z.square();
        assert_eq!((z2.re, z2.im), (3.0, 4.0));
        let z4 = z2.square();
        assert_eq!((z4.re, z4.im), (-7.0, 24.0));
    }

    #[test]
    fn rational_scalar_roundtrip() {
        let x = BigRational::from_ratio(1, 3);
        assert!((Coeff::to_f64(&x) - 1.0 / 3.0).abs() < 1e-15);
        assert!(x.is_positive_beyond(0.0));
        assert!((-x).is_negative_beyond(0.0));
    }
}
