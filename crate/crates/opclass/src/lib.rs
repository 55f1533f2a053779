//! Constructive toolkit for operators `T` with `alpha[T*,T] >= 0`:
//! factorization certificates in weighted Wiener algebras, hereditary
//! calculus on dense matrices, explicit renorming to a contraction,
//! characteristic-function diagnostics, and the one-sided sequence
//! calculus behind weighted-shift membership and class inclusions.

pub mod error;
pub mod factorization;
pub mod hereditary;
pub mod io;
pub mod matrix;
pub mod model;
pub mod poly;
pub mod renorm;
pub mod roots;
pub mod scalar;
pub mod seq;
pub mod series;
pub mod weight;

pub use error::{Error, Result};
pub use scalar::{Coeff, Gaussian};
pub use series::{DominanceRelation, DominanceVerdict, TruncatedSeries};
pub use weight::{GoodWeight, WeightKind};

use num_rational::BigRational;

/// Exact-rational polynomial, the currency of the exact factorization path.
pub type RatPoly = poly::Polynomial<BigRational>;
/// Float polynomial used by the numeric root-splitting paths.
pub type Poly64 = poly::Polynomial<f64>;
/// Float truncated series with certified tails.
pub type Series64 = series::TruncatedSeries<f64>;
/// Exact-rational truncated series (tail zero unless stated).
pub type RatSeries = series::TruncatedSeries<BigRational>;
/// Exact Gaussian rational point, input to the conjugate-quadratic chain.
pub type RatGaussian = scalar::Gaussian<BigRational>;
/// One-sided real sequence with an eventual constant, float entries.
pub type Seq64 = seq::EventualSeq<f64>;
/// One-sided exact-rational sequence.
pub type RatSeq = seq::EventualSeq<BigRational>;

/// Default tolerance for float verification paths.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Default truncation length for series operations.
pub const DEFAULT_TRUNCATION: usize = 256;
/// Default horizon for power iterations and limit probes.
pub const DEFAULT_HORIZON: usize = 4096;
/// Default grid resolution for interval/circle/disc scans.
pub const DEFAULT_GRID: usize = 64;
