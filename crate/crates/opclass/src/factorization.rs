//! The constructive factorization chain: from a single conjugate quadratic
//! factor, through root splitting over `[0,1]`, up to the full cofactor
//! certificate `g > 0`, `fg > 0` (coefficientwise) for a series positive
//! on `[0,1]`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::roots::{poly_roots, RootClass};
use crate::scalar::{Coeff, Gaussian};
use crate::series::{DominanceRelation, DominanceVerdict, TruncatedSeries};
use crate::weight::GoodWeight;

/// Output of the conjugate-quadratic construction for one nonreal point.
#[derive(Clone, Debug)]
pub struct ConjugateFactor<S> {
    /// Smallest `m` with `Re(lambda^{2^m}) <= 0`.
    pub m: u32,
    /// The cofactor `p` with all coefficients nonnegative, `p(0) > 0`.
    pub p: Polynomial<S>,
    /// `q = (t - lambda)(t - conj(lambda))`.
    pub q: Polynomial<S>,
    /// `p q = t^{2^{m+1}} - 2 Re(lambda^{2^m}) t^{2^m} + |lambda^{2^m}|^2`.
    pub pq: Polynomial<S>,
}

/// For a nonreal `lambda`, builds `p` with nonnegative coefficients such
/// that `p (t - lambda)(t - conj(lambda))` also has nonnegative
/// coefficients and positive constant term. Exact over exact scalars.
pub fn quadratic_factor<S: Coeff>(lambda: Gaussian<S>) -> Result<ConjugateFactor<S>> {
    if lambda.is_real() {
        return Err(Error::Input("point must be nonreal".into()));
    }
    let two = S::from_int(2);
    let q = Polynomial::new(vec![
        lambda.norm_sq(),
        -(two.clone() * lambda.re.clone()),
        S::one(),
    ]);
    let mut p = Polynomial::one();
    let mut power = lambda.clone(); // lambda^{2^j}
    let mut m = 0u32;
    while power.re.is_positive_beyond(0.0) {
        if m >= 60 {
            return Err(Error::Numerical(
                "argument-doubling did not leave the right half plane".into(),
            ));
        }
        // factor: t^{2^{j+1}} + 2 Re(lambda^{2^j}) t^{2^j} + |lambda^{2^j}|^2
        let deg = 1usize << m;
        let mut coeffs = vec![S::zero(); 2 * deg + 1];
        coeffs[0] = power.norm_sq();
        coeffs[deg] = two.clone() * power.re.clone();
        coeffs[2 * deg] = S::one();
        p = p.mul(&Polynomial::new(coeffs));
        power = power.square();
        m += 1;
    }
    let deg = 1usize << m;
    let mut pq = vec![S::zero(); 2 * deg + 1];
    pq[0] = power.norm_sq();
    pq[deg] = -(two * power.re.clone());
    pq[2 * deg] = S::one();
    Ok(ConjugateFactor {
        m,
        p,
        q,
        pq: Polynomial::new(pq),
    })
}

/// Exact product construction over a list of conjugate-pair representatives:
/// returns `(p, q, pq)` with `q` the product of the conjugate quadratics.
pub fn positive_factor_from_pairs<S: Coeff>(
    pairs: &[Gaussian<S>],
) -> Result<(Polynomial<S>, Polynomial<S>, Polynomial<S>)> {
    let mut p = Polynomial::one();
    let mut q = Polynomial::one();
    for lambda in pairs {
        let f = quadratic_factor(lambda.clone())?;
        p = p.mul(&f.p);
        q = q.mul(&f.q);
    }
    let pq = p.mul(&q);
    Ok((p, q, pq))
}

/// For a real polynomial without real roots and `q(0) > 0`, builds `p` with
/// nonnegative coefficients such that `p q` has nonnegative coefficients.
/// Roots are located numerically; the dominance of `p q` is verified at
/// tolerance `tol` scaled by the coefficient magnitude.
pub fn positive_factor_nonreal(q: &Polynomial<f64>, tol: f64) -> Result<Polynomial<f64>> {
    if q.is_zero() || q.coeff(0) <= 0.0 {
        return Err(Error::Precondition("q(0) must be positive".into()));
    }
    if q.degree() == Some(0) {
        return Ok(Polynomial::one());
    }
    let roots = poly_roots(q, tol.max(1e-8))?;
    if roots.has_real_root() {
        return Err(Error::Precondition("polynomial has a real root".into()));
    }
    let mut p = Polynomial::<f64>::one();
    for lambda in roots.upper_half_plane() {
        let f = quadratic_factor(Gaussian::new(lambda.re, lambda.im))?;
        p = p.mul(&f.p);
    }
    let scale = q.coeffs().iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let check = p.mul(q);
    if !p.dominates_zero_strictly(tol * scale) || !check.dominates_zero_strictly(tol * scale.max(1.0) * p.eval_f64(1.0)) {
        return Err(Error::Verification(
            "cofactor failed the nonnegativity check".into(),
        ));
    }
    Ok(p)
}

/// Cofactor for a polynomial positive on the whole of `[0,1]`: splits the
/// roots by location, keeps the negative-root part, inverts the
/// positive-root part as geometric series (all such roots exceed 1), and
/// handles the nonreal part through `positive_factor_nonreal`. Returns
/// `u` truncated at `n_trunc` with a certified geometric tail.
pub fn positive_factor_unit_interval(
    q: &Polynomial<f64>,
    n_trunc: usize,
    tol: f64,
) -> Result<TruncatedSeries<f64>> {
    if q.is_zero() {
        return Err(Error::Precondition("q must be nonzero".into()));
    }
    let weight = GoodWeight::unit();
    if q.degree() == Some(0) {
        return Ok(TruncatedSeries::one(weight));
    }
    if q.eval_f64(0.0) <= 0.0 || q.eval_f64(1.0) <= 0.0 {
        return Err(Error::Precondition("q must be positive on [0,1]".into()));
    }
    let roots = poly_roots(q, tol.max(1e-8))?;
    let positive = roots.real_roots(RootClass::PositiveReal);
    for &r in &positive {
        if r <= 1.0 + 1e-9 {
            return Err(Error::Precondition(format!(
                "root at {r} lies in [0,1] (or touches its boundary)"
            )));
        }
    }
    // q_plus = prod (1 - t/r); q_minus = prod (1 - t/s), s < 0.
    let mut q_plus = Polynomial::<f64>::one();
    for &r in &positive {
        q_plus = q_plus.mul(&Polynomial::new(vec![1.0, -1.0 / r]));
    }
    let mut q_minus = Polynomial::<f64>::one();
    for &s in &roots.real_roots(RootClass::NegativeReal) {
        q_minus = q_minus.mul(&Polynomial::new(vec![1.0, -1.0 / s]));
    }
    // q_nr := q / (q_plus q_minus); has only nonreal roots, q_nr(0) = q(0).
    let (q_nr, rem) = q.div_rem(&q_plus.mul(&q_minus))?;
    let scale = q.coeffs().iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if rem.coeffs().iter().any(|c| c.abs() > 1e-8 * scale.max(1.0)) {
        return Err(Error::Numerical(
            "root split left a nonnegligible remainder".into(),
        ));
    }
    let p = positive_factor_nonreal(&q_nr, tol)?;

    // u = p * prod 1/(1 - t/r), each inverse a geometric series with tail
    // sum_{n > N} r^-n = r^-N / (r - 1).
    let mut u = p.to_series(weight.clone());
    for &r in &positive {
        let mut geo = Vec::with_capacity(n_trunc + 1);
        let mut c = 1.0;
        for _ in 0..=n_trunc {
            geo.push(c);
            c /= r;
        }
        let tail = r.powi(-(n_trunc as i32)) / (r - 1.0);
        let inv = TruncatedSeries::new(geo, tail, weight.clone())?;
        u = u.mul(&inv)?.truncate(n_trunc);
    }
    // Self-check: u > 0 and u q > 0 coefficientwise within tolerance.
    let zero = TruncatedSeries::zero(weight.clone());
    let uq = u.mul(&q.to_series(weight))?;
    let tol_scaled = tol * scale.max(1.0);
    if !u.dominance_check(&zero, tol_scaled)?.is_strict()
        || !uq.dominance_check(&zero, tol_scaled)?.is_strict()
    {
        return Err(Error::Verification(
            "unit-interval cofactor failed the dominance check".into(),
        ));
    }
    Ok(u)
}

#[derive(Clone, Debug, Serialize)]
pub struct FactorizationCertificate {
    /// Cofactor coefficients (weighted algebra element).
    #[serde(skip)]
    pub cofactor: TruncatedSeries<f64>,
    pub verdict_g: DominanceVerdict,
    pub verdict_fg: DominanceVerdict,
    /// The positive lower-bound margin used by the split.
    pub epsilon: f64,
    /// Truncation index of the split.
    pub n_split: usize,
    /// Set when some stage failed; the certificate is then not valid.
    pub failed_stage: Option<String>,
}

impl FactorizationCertificate {
    pub fn passed(&self) -> bool {
        self.failed_stage.is_none() && self.verdict_g.is_strict() && self.verdict_fg.is_strict()
    }
}

/// The full factorization: for `f` positive on `[0,1]` in the weighted
/// algebra, produces `g` with `g > 0` and `f g > 0` coefficientwise.
/// The construction splits off the polynomial head minus a margin, treats
/// the margin plus the negative tail coefficients as a Neumann-invertible
/// perturbation of a constant, and multiplies the two cofactors.
pub fn wiener_factorize(
    f: &TruncatedSeries<f64>,
    tol: f64,
    n_trunc: usize,
) -> Result<FactorizationCertificate> {
    let weight = f.weight().clone();
    let min_lb = f.min_on_unit_interval(1024);
    if min_lb <= 0.0 {
        return Err(Error::Precondition(format!(
            "certified minimum of f on [0,1] is {min_lb:.3e}; the factorization needs f > 0 there"
        )));
    }
    let epsilon = min_lb / 2.0;

    // Smallest split index with certified tail below epsilon/2.
    let mut suffix = vec![f.tail_bound(); f.len() + 1];
    for n in (0..f.len()).rev() {
        suffix[n] = suffix[n + 1] + f.coeff(n).abs() * f.weight().value(n);
    }
    let n_split = match (0..f.len()).find(|&n| suffix[n + 1] < epsilon / 2.0) {
        Some(n) => n,
        None => {
            return Err(Error::Inconclusive(format!(
                "stored truncation cannot certify a tail below epsilon/2 = {:.3e}",
                epsilon / 2.0
            )))
        }
    };

    let fail = |stage: &str, cofactor: TruncatedSeries<f64>| FactorizationCertificate {
        cofactor,
        verdict_g: DominanceVerdict {
            relation: DominanceRelation::Inconclusive,
            witness_index: None,
            margin: 0.0,
        },
        verdict_fg: DominanceVerdict {
            relation: DominanceRelation::Inconclusive,
            witness_index: None,
            margin: 0.0,
        },
        epsilon,
        n_split,
        failed_stage: Some(stage.to_string()),
    };

    // Head polynomial minus the margin. The margin is a full epsilon so the
    // perturbation h below is a Neumann contraction of norm at most 1/2
    // (the suffix mass is certified below epsilon/2); the head still clears
    // epsilon/2 on [0,1].
    let mut head: Vec<f64> = (0..=n_split).map(|n| f.coeff(n)).collect();
    head[0] -= epsilon;
    let f_head = Polynomial::new(head);

    // h = epsilon + (negative stored coefficients beyond the split); the
    // unstored tail mass is attributed to h as well.
    let mut h_coeffs = vec![0.0; f.len().max(1)];
    h_coeffs[0] = epsilon;
    for n in (n_split + 1)..f.len() {
        if f.coeff(n) < 0.0 {
            h_coeffs[n] = f.coeff(n);
        }
    }
    let h = TruncatedSeries::new(h_coeffs, f.tail_bound(), weight.clone())?;

    let u = match positive_factor_unit_interval(&f_head, n_trunc, tol) {
        Ok(u) => u,
        Err(_) => return Ok(fail("unit-interval cofactor", TruncatedSeries::zero(weight))),
    };
    let tol_v = (tol / u.wiener_norm().max(1.0)).min(tol) * 1e-2;
    let v = match h.invert_neumann(tol_v.max(1e-15), n_trunc) {
        Ok(v) => v,
        Err(_) => return Ok(fail("Neumann inversion", TruncatedSeries::zero(weight))),
    };
    let g = u.mul(&v)?.truncate(n_trunc);

    let zero = TruncatedSeries::zero(weight.clone());
    let verdict_g = g.dominance_check(&zero, tol)?;
    let fg = f.mul(&g)?.truncate(2 * n_trunc);
    let verdict_fg = fg.dominance_check(&zero, tol * f.wiener_norm().max(1.0))?;
    Ok(FactorizationCertificate {
        cofactor: g,
        verdict_g,
        verdict_fg,
        epsilon,
        n_split,
        failed_stage: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type RG = Gaussian<BigRational>;

    fn rg(re: (i64, i64), im: (i64, i64)) -> RG {
        Gaussian::new(
            BigRational::from_ratio(re.0, re.1),
            BigRational::from_ratio(im.0, im.1),
        )
    }

    #[test]
    fn quadratic_factor_at_i() {
        // lambda = i: Re(i) = 0 <= 0 forces m = 0, p = 1, pq = t^2 + 1.
        let f = quadratic_factor(rg((0, 1), (1, 1))).unwrap();
        assert_eq!(f.m, 0);
        assert_eq!(f.p, Polynomial::one());
        assert_eq!(f.pq, Polynomial::from_ints(&[1, 0, 1]));
    }

    #[test]
    fn quadratic_factor_two_plus_i() {
        // lambda = 2 + i: lambda^2 = 3 + 4i, lambda^4 = -7 + 24i, so m = 2,
        // p = (t^2 + 4t + 5)(t^4 + 6t^2 + 25), pq = t^8 + 14 t^4 + 625.
        let f = quadratic_factor(rg((2, 1), (1, 1))).unwrap();
        assert_eq!(f.m, 2);
        let expected_p =
            Polynomial::<BigRational>::from_ints(&[5, 4, 1]).mul(&Polynomial::from_ints(&[25, 0, 6, 0, 1]));
        assert_eq!(f.p, expected_p);
        assert_eq!(
            f.pq,
            Polynomial::from_ints(&[625, 0, 0, 0, 14, 0, 0, 0, 1])
        );
        assert!(f.p.dominates_zero_strictly(0.0));
        assert!(f.pq.dominates_zero_strictly(0.0));
        // deg p = 2^{m+1} - 2
        assert_eq!(f.p.degree(), Some((1 << (f.m + 1)) - 2));
    }

    #[test]
    fn quadratic_factor_eighth_root_float() {
        // lambda = e^{i pi/4}: m = 1, p = t^2 + sqrt(2) t + 1, pq = t^4 + 1.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let f = quadratic_factor(Gaussian::new(s, s)).unwrap();
        assert_eq!(f.m, 1);
        assert!((f.p.coeff(1) - std::f64::consts::SQRT_2).abs() < 1e-12);
        assert!((f.pq.coeff(0) - 1.0).abs() < 1e-12);
        assert!((f.pq.coeff(4) - 1.0).abs() < 1e-12);
        assert!(f.pq.coeff(1).abs() + f.pq.coeff(2).abs() + f.pq.coeff(3).abs() < 1e-12);
    }

    #[test]
    fn quadratic_factor_rejects_real() {
        assert!(quadratic_factor(Gaussian::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn nonreal_cofactor_sixth_roots() {
        // q = t^2 - t + 1 has roots e^{+-i pi/3}; p = t^2 + t + 1 and
        // pq = t^4 + t^2 + 1.
        let q = Polynomial::new(vec![1.0, -1.0, 1.0]);
        let p = positive_factor_nonreal(&q, 1e-9).unwrap();
        assert!((p.coeff(0) - 1.0).abs() < 1e-9);
        assert!((p.coeff(1) - 1.0).abs() < 1e-9);
        assert!((p.coeff(2) - 1.0).abs() < 1e-9);
        let pq = p.mul(&q);
        assert!((pq.coeff(0) - 1.0).abs() < 1e-9);
        assert!((pq.coeff(2) - 1.0).abs() < 1e-9);
        assert!((pq.coeff(4) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn nonreal_cofactor_is_multiplicative_on_exact_pairs() {
        // (t^2+1)(t^2-t+1): the product construction over both pairs equals
        // the product of the per-pair cofactors by definition; check pq > 0.
        let pairs = vec![rg((0, 1), (1, 1)), rg((1, 2), (1, 2))]; // i and (1+i)/2 scaled example
        let (p, _q, pq) = positive_factor_from_pairs(&pairs).unwrap();
        assert!(p.dominates_zero_strictly(0.0));
        assert!(pq.dominates_zero_strictly(0.0));
    }

    #[test]
    fn unit_interval_geometric() {
        // q = 2 - t: u = sum 2^-n t^n (up to scale), u q = const.
        let q = Polynomial::new(vec![2.0, -1.0]);
        let u = positive_factor_unit_interval(&q, 64, 1e-9).unwrap();
        let ratio = u.coeff(1) / u.coeff(0);
        assert!((ratio - 0.5).abs() < 1e-12);
        let uq = u.mul(&q.to_series(GoodWeight::unit())).unwrap();
        // all coefficients beyond 0 nearly cancel
        for n in 1..32 {
            assert!(uq.coeff(n).abs() < 1e-12);
        }
    }

    #[test]
    fn unit_interval_negative_root_is_kept() {
        // q = 1 + t is already coefficientwise positive; u = 1.
        let q = Polynomial::new(vec![1.0, 1.0]);
        let u = positive_factor_unit_interval(&q, 64, 1e-9).unwrap();
        assert_eq!(u.coeffs(), &[1.0]);
    }

    #[test]
    fn unit_interval_composite() {
        // q = (2 - t)(t^2 - t + 1): u proportional to (t^2+t+1)/(1 - t/2).
        let q = Polynomial::new(vec![2.0, -1.0]).mul(&Polynomial::new(vec![1.0, -1.0, 1.0]));
        let u = positive_factor_unit_interval(&q, 128, 1e-9).unwrap();
        // (t^2+t+1) * sum 2^-n t^n has coefficients 1, 3/2, 7/4, 7/8, ...
        let c0 = u.coeff(0);
        assert!((u.coeff(1) / c0 - 1.5).abs() < 1e-10);
        assert!((u.coeff(2) / c0 - 1.75).abs() < 1e-10);
        assert!((u.coeff(3) / c0 - 0.875).abs() < 1e-10);
    }

    #[test]
    fn unit_interval_rejects_root_inside() {
        let q = Polynomial::new(vec![0.25, -1.0, 1.0]); // (t - 1/2)^2
        assert!(positive_factor_unit_interval(&q, 64, 1e-9).is_err());
    }

    #[test]
    fn factorize_constant_one() {
        let f = TruncatedSeries::polynomial(vec![1.0], GoodWeight::unit());
        let cert = wiener_factorize(&f, 1e-10, 128).unwrap();
        assert!(cert.passed(), "stage: {:?}", cert.failed_stage);
    }

    #[test]
    fn factorize_worked_instance() {
        // f = 1 - t + t^2; feasibility oracle: g* = t^2 + t + 1 gives
        // f g* = t^4 + t^2 + 1; the computed certificate is self-verifying.
        let f = TruncatedSeries::polynomial(vec![1.0, -1.0, 1.0], GoodWeight::unit());
        let cert = wiener_factorize(&f, 1e-10, 256).unwrap();
        assert!(cert.passed(), "stage: {:?}", cert.failed_stage);
        // the oracle pair
        let g_star = TruncatedSeries::polynomial(vec![1.0, 1.0, 1.0], GoodWeight::unit());
        let fg_star = f.mul(&g_star).unwrap();
        assert_eq!(fg_star.coeffs(), &[1.0, 0.0, 1.0, 0.0, 1.0]);
    }

    #[test]
    fn factorize_rejects_nonpositive() {
        let f = TruncatedSeries::polynomial(vec![0.25, -1.0, 1.0], GoodWeight::unit());
        assert!(wiener_factorize(&f, 1e-10, 128).is_err());
    }

    #[test]
    fn factorize_scale_invariance() {
        let f = TruncatedSeries::polynomial(vec![1.0, -1.0, 1.0], GoodWeight::unit());
        let f4 = f.scale(&4.0);
        let c1 = wiener_factorize(&f, 1e-10, 256).unwrap();
        let c4 = wiener_factorize(&f4, 1e-10, 256).unwrap();
        assert!(c4.passed());
        assert!((c4.epsilon / c1.epsilon - 4.0).abs() < 1e-9);
    }
}
