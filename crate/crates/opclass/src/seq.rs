//! One-sided sequence calculus: the backward and forward shifts, `f(nabla)`,
//! the regularized limit `lim*`, weighted-shift membership, class inclusion
//! tests and their exact counterexamples.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hereditary::{MembershipCertificate, Verdict};
use crate::scalar::Coeff;
use crate::series::{divide_power_series, TruncatedSeries};

/// A one-sided sequence `(a_n)` that is eventually constant: entries are
/// `prefix[n]` for `n < prefix.len()` and `eventual` beyond.
#[derive(Clone, Debug, PartialEq)]
pub struct EventualSeq<S> {
    prefix: Vec<S>,
    eventual: S,
}

impl<S: Coeff> EventualSeq<S> {
    pub fn new(mut prefix: Vec<S>, eventual: S) -> Self {
        while prefix.last() == Some(&eventual) {
            prefix.pop();
        }
        EventualSeq { prefix, eventual }
    }

    pub fn constant(c: S) -> Self {
        EventualSeq {
            prefix: Vec::new(),
            eventual: c,
        }
    }

    pub fn get(&self, n: usize) -> S {
        self.prefix
            .get(n)
            .cloned()
            .unwrap_or_else(|| self.eventual.clone())
    }

    pub fn prefix(&self) -> &[S] {
        &self.prefix
    }

    pub fn prefix_len(&self) -> usize {
        self.prefix.len()
    }

    pub fn eventual(&self) -> &S {
        &self.eventual
    }

    /// Smallest entry (the minimum is attained on the prefix or at the
    /// eventual value).
    pub fn min_entry(&self) -> S {
        let mut min = self.eventual.clone();
        for p in &self.prefix {
            if *p < min {
                min = p.clone();
            }
        }
        min
    }

    pub fn sup_abs(&self) -> f64 {
        self.prefix
            .iter()
            .map(|p| p.abs().to_f64())
            .fold(self.eventual.abs().to_f64(), f64::max)
    }

    /// Backward shift: `(nabla a)_n = a_{n+1}`.
    pub fn backward(&self) -> Self {
        if self.prefix.is_empty() {
            return self.clone();
        }
        EventualSeq::new(self.prefix[1..].to_vec(), self.eventual.clone())
    }

    /// Forward shift: `(nabla_- a)_0 = 0`, `(nabla_- a)_n = a_{n-1}`.
    pub fn forward(&self) -> Self {
        let len = self.prefix.len() + 2;
        let mut prefix = Vec::with_capacity(len);
        prefix.push(S::zero());
        for n in 0..len - 1 {
            prefix.push(self.get(n));
        }
        EventualSeq::new(prefix, self.eventual.clone())
    }

    pub fn map_to_f64(&self) -> EventualSeq<f64> {
        EventualSeq::new(
            self.prefix.iter().map(|p| p.to_f64()).collect(),
            self.eventual.to_f64(),
        )
    }

    /// The first `n` entries, materialized.
    pub fn take(&self, n: usize) -> Vec<S> {
        (0..n).map(|k| self.get(k)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ShiftDirection {
    Backward,
    Forward,
}

/// Applies `f(nabla)` (backward) or the analytic Toeplitz action (forward)
/// to an eventually-constant sequence. The returned error bound covers the
/// unstored tail of `f`: it is `tail(f) * sup |a|` and zero for polynomial
/// `f`, in which case the computation is exact.
pub fn shift_apply<S: Coeff>(
    f: &TruncatedSeries<S>,
    a: &EventualSeq<S>,
    direction: ShiftDirection,
) -> Result<(EventualSeq<S>, f64)> {
    let error_bound = f.tail_bound() * a.sup_abs();
    let f_at_one: S = f
        .coeffs()
        .iter()
        .fold(S::zero(), |acc, c| acc + c.clone());
    let out = match direction {
        ShiftDirection::Backward => {
            // (f(nabla)a)_n = sum_j f_j a_{n+j}; for n at or beyond the
            // prefix every term sees the eventual value.
            let len = a.prefix_len();
            let mut prefix = Vec::with_capacity(len);
            for n in 0..len {
                let mut acc = S::zero();
                for j in 0..f.len() {
                    acc = acc + f.coeff(j) * a.get(n + j);
                }
                prefix.push(acc);
            }
            EventualSeq::new(prefix, a.eventual().clone() * f_at_one)
        }
        ShiftDirection::Forward => {
            // c_n = sum_{j<=n} f_j a_{n-j}; stabilizes once n-j clears the
            // prefix for every stored j.
            let len = a.prefix_len() + f.len().max(1);
            let mut prefix = Vec::with_capacity(len);
            for n in 0..len {
                let mut acc = S::zero();
                for j in 0..=n.min(f.len().saturating_sub(1)) {
                    acc = acc + f.coeff(j) * a.get(n - j);
                }
                prefix.push(acc);
            }
            EventualSeq::new(prefix, a.eventual().clone() * f_at_one)
        }
    };
    Ok((out, error_bound))
}

/// `lim*` on an eventually-constant sequence: exactly
/// `eventual * f(1)` — the transient prefix drops out of the limit.
/// Requires `f` normalized to algebra norm 1 within `tol`.
pub fn lim_star<S: Coeff>(
    f: &TruncatedSeries<S>,
    x: &EventualSeq<S>,
    tol: f64,
) -> Result<S> {
    if (f.wiener_norm() - 1.0).abs() > tol {
        return Err(Error::Precondition(format!(
            "lim* needs a normalized symbol; algebra norm is {:.6}",
            f.wiener_norm()
        )));
    }
    let f_at_one: S = f
        .coeffs()
        .iter()
        .fold(S::zero(), |acc, c| acc + c.clone());
    Ok(x.eventual().clone() * f_at_one)
}

/// Outcome of a windowed limit probe on a sampled sequence.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "outcome")]
pub enum LimitOutcome {
    Exists { value: f64 },
    Oscillates { amplitude: f64 },
    Inconclusive,
}

/// Windowed `lim*` on raw samples: smooths with the symbol `f`, then
/// detects convergence of the smoothed values over trailing windows.
pub fn lim_star_sampled(f: &[f64], samples: &[f64], tol: f64) -> LimitOutcome {
    if samples.len() < f.len() + 32 {
        return LimitOutcome::Inconclusive;
    }
    let m = samples.len() - f.len();
    let smoothed: Vec<f64> = (0..m)
        .map(|n| f.iter().enumerate().map(|(k, &fk)| fk * samples[n + k]).sum())
        .collect();
    classify_tail(&smoothed, tol)
}

/// Convergence/oscillation classification of the trailing part of a sample
/// sequence: converged when the last window is flat within `tol`;
/// oscillating when the amplitude persists at a stable level across the
/// last two windows.
pub fn classify_tail(samples: &[f64], tol: f64) -> LimitOutcome {
    let w = 16usize;
    if samples.len() < 2 * w {
        return LimitOutcome::Inconclusive;
    }
    let last = &samples[samples.len() - w..];
    let prev = &samples[samples.len() - 2 * w..samples.len() - w];
    let spread = |xs: &[f64]| {
        let max = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let min = xs.iter().cloned().fold(f64::INFINITY, f64::min);
        max - min
    };
    let scale = samples
        .iter()
        .map(|x| x.abs())
        .fold(1.0f64, f64::max);
    let amp_last = spread(last);
    let amp_prev = spread(prev);
    if amp_last <= tol * scale {
        let value = last.iter().sum::<f64>() / w as f64;
        return LimitOutcome::Exists { value };
    }
    // Persistent oscillation: amplitude stable (not decaying) across windows.
    if amp_prev > 0.0 && amp_last >= 0.5 * amp_prev {
        return LimitOutcome::Oscillates { amplitude: amp_last };
    }
    LimitOutcome::Inconclusive
}

/// A unilateral weighted shift `T e_n = lambda_{n+1} e_{n+1}` presented by
/// its moment sequence `Lambda_n = |T^n e_0|^2` (eventually constant, all
/// entries positive). The normalization makes `|T^n e_j|^2 =
/// Lambda_{n+j} / Lambda_j` exact.
#[derive(Clone, Debug, PartialEq)]
pub struct ShiftSpec<S> {
    lambda: EventualSeq<S>,
}

impl<S: Coeff> ShiftSpec<S> {
    pub fn new(lambda: EventualSeq<S>) -> Result<Self> {
        if lambda.min_entry().is_positive_beyond(0.0) {
            Ok(ShiftSpec { lambda })
        } else {
            Err(Error::Input(
                "moment sequence must be strictly positive".into(),
            ))
        }
    }

    pub fn lambda(&self) -> &EventualSeq<S> {
        &self.lambda
    }

    /// Shift weights `lambda_n = sqrt(Lambda_n / Lambda_{n-1})` for
    /// `n = 1..=len` (eventually 1 iff the moments are eventually constant).
    pub fn weights(&self, len: usize) -> Vec<f64> {
        (1..=len)
            .map(|n| (self.lambda.get(n).to_f64() / self.lambda.get(n - 1).to_f64()).sqrt())
            .collect()
    }
}

/// Weighted-shift membership in `C_alpha`: the shift lies in the class iff
/// `alpha(nabla) Lambda` is entrywise nonnegative (weak ordering; the strict
/// form would exclude the isometric shift, which is a contraction). Exact
/// over exact scalars.
pub fn shift_membership<S: Coeff>(
    spec: &ShiftSpec<S>,
    alpha: &TruncatedSeries<S>,
    tol: f64,
) -> Result<MembershipCertificate> {
    let report = crate::hereditary::check_admissible(&alpha.map_to_f64(), tol);
    if !report.admissible {
        return Err(Error::Input("alpha is not admissible".into()));
    }
    let (g, err) = shift_apply(alpha, spec.lambda(), ShiftDirection::Backward)?;
    let mut min = g.eventual().clone();
    let mut witness = None;
    for (n, v) in g.prefix().iter().enumerate() {
        if *v < min {
            min = v.clone();
        }
        if witness.is_none() && v.is_negative_beyond(tol + err) {
            witness = Some(n);
        }
    }
    let refuted = witness.is_some() || g.eventual().is_negative_beyond(tol + err);
    let verdict = if refuted {
        Verdict::Refuted
    } else {
        Verdict::Member
    };
    Ok(MembershipCertificate {
        verdict,
        min_eigenvalue: min.to_f64(),
        truncation_n: alpha.len(),
        series_tail: alpha.tail_bound(),
        spectral_ok: true,
        summability_ok: true,
        failed_condition: witness.map(|n| {
            format!(
                "alpha(nabla)Lambda is negative at index {n} (value {:.6e})",
                g.get(n).to_f64()
            )
        }),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InclusionStatus {
    Included,
    Refuted,
    Inconclusive,
}

#[derive(Clone, Debug)]
pub struct InclusionVerdict<S> {
    pub status: InclusionStatus,
    /// Taylor coefficients of `gamma = tau_tilde / alpha_tilde`.
    pub gamma_prefix: Vec<S>,
    pub first_negative_index: Option<usize>,
    pub counterexample: Option<ShiftSpec<S>>,
    /// Heuristic flag for the inconclusive case: the computed prefix stays
    /// bounded on `[0,1)` grids (a necessary condition for inclusion).
    pub bounded_hint: bool,
}

fn reduced<S: Coeff>(sym: &TruncatedSeries<S>, tol: f64) -> Result<TruncatedSeries<S>> {
    sym.divide_by_one_minus_t(tol)
        .map_err(|_| Error::Input("symbol is not admissible (no root at t = 1)".into()))
}

/// Inclusion test `C_alpha ⊆ C_tau` through the quotient
/// `gamma = tau_tilde / alpha_tilde`: nonnegative prefix with positive
/// constant term and a certifiable tail gives inclusion; a negative
/// coefficient refutes it and (over exact scalars) produces a verified
/// counterexample shift.
pub fn inclusion_check<S: Coeff>(
    alpha: &TruncatedSeries<S>,
    tau: &TruncatedSeries<S>,
    n: usize,
    tol: f64,
) -> Result<InclusionVerdict<S>> {
    let alpha_tilde = reduced(alpha, tol)?;
    let tau_tilde = reduced(tau, tol)?;
    if alpha_tilde.coeff(0).is_zero() {
        return Err(Error::Input("alpha_tilde(0) = 0; quotient not expandable".into()));
    }
    let gamma = divide_power_series(tau_tilde.coeffs(), alpha_tilde.coeffs(), n.max(2))?;
    let first_negative = gamma.iter().position(|c| c.is_negative_beyond(tol));
    if let Some(l) = first_negative {
        let counterexample = if S::EXACT && alpha.is_polynomial() && tau.is_polynomial() {
            Some(counterexample_shift(alpha, tau, l)?)
        } else {
            None
        };
        return Ok(InclusionVerdict {
            status: InclusionStatus::Refuted,
            gamma_prefix: gamma,
            first_negative_index: Some(l),
            counterexample,
            bounded_hint: false,
        });
    }
    if !gamma[0].is_positive_beyond(tol) {
        return Ok(InclusionVerdict {
            status: InclusionStatus::Inconclusive,
            gamma_prefix: gamma,
            first_negative_index: None,
            counterexample: None,
            bounded_hint: true,
        });
    }
    // Tail certificate: when alpha_tilde is invertible in the algebra the
    // quotient genuinely lies in it, so the nonnegative prefix decides.
    let invertible = alpha_tilde
        .map_to_f64()
        .invert_neumann(1e-9, n.max(64))
        .is_ok();
    if invertible {
        return Ok(InclusionVerdict {
            status: InclusionStatus::Included,
            gamma_prefix: gamma,
            first_negative_index: None,
            counterexample: None,
            bounded_hint: true,
        });
    }
    // No tail certificate: report the boundedness heuristic only.
    let bounded_hint = {
        let g64: Vec<f64> = gamma.iter().map(|c| c.to_f64()).collect();
        let partial: f64 = g64.iter().sum();
        partial.is_finite() && partial.abs() <= 1e12
    };
    Ok(InclusionVerdict {
        status: InclusionStatus::Inconclusive,
        gamma_prefix: gamma,
        first_negative_index: None,
        counterexample: None,
        bounded_hint,
    })
}

/// Exact counterexample to `C_alpha ⊆ C_tau` from the first negative
/// quotient coefficient `gamma_l < 0`: the reversed-prefix sequence
/// `Gamma = (gamma_l, ..., gamma_0, 0, ...)`, pulled back through
/// `tau_tilde(nabla)^{-1}` and summed into moments `Lambda`, yields a
/// weighted shift that is a member of `C_alpha` while
/// `[tau(nabla)Lambda]_0 = gamma_l < 0`. Refuses floats: the refutation
/// certificate must be exact.
pub fn counterexample_shift<S: Coeff>(
    alpha: &TruncatedSeries<S>,
    tau: &TruncatedSeries<S>,
    l: usize,
) -> Result<ShiftSpec<S>> {
    if !S::EXACT {
        return Err(Error::Unsupported(
            "counterexample construction requires exact scalars".into(),
        ));
    }
    if !alpha.is_polynomial() || !tau.is_polynomial() {
        return Err(Error::Unsupported(
            "counterexample construction requires polynomial symbols".into(),
        ));
    }
    let alpha_tilde = reduced(alpha, 0.0)?;
    let tau_tilde = reduced(tau, 0.0)?;
    let gamma = divide_power_series(tau_tilde.coeffs(), alpha_tilde.coeffs(), l + 1)?;
    if !gamma[l].is_negative_beyond(0.0) {
        return Err(Error::Precondition(format!(
            "gamma_{l} is not negative"
        )));
    }
    if gamma[..l].iter().any(|c| c.is_negative_beyond(0.0)) {
        return Err(Error::Precondition(format!(
            "gamma_{l} is not the first negative coefficient"
        )));
    }

    // Gamma = (gamma_l, gamma_{l-1}, ..., gamma_0, 0, ...)
    let big_gamma = EventualSeq::new(gamma.iter().rev().cloned().collect(), S::zero());
    // Psi = tau_tilde^{-1}(nabla) Gamma — exact, supported on 0..=l since
    // Gamma is.
    let tau_inv = divide_power_series(&[S::one()], tau_tilde.coeffs(), l + 1)?;
    let tau_inv_series = TruncatedSeries::polynomial(tau_inv, tau.weight().clone());
    let (psi, _) = shift_apply(&tau_inv_series, &big_gamma, ShiftDirection::Backward)?;
    // Lambda_n = Lambda_inf + sum_{j >= n} Psi_j with Lambda_inf making
    // min Lambda >= 1.
    let support = psi.prefix_len();
    let mut suffix = vec![S::zero(); support + 1];
    for n in (0..support).rev() {
        suffix[n] = suffix[n + 1].clone() + psi.get(n);
    }
    let mut min_suffix = S::zero();
    for s in &suffix {
        if *s < min_suffix {
            min_suffix = s.clone();
        }
    }
    let lambda_inf = S::one() - min_suffix;
    let lambda = EventualSeq::new(
        suffix.iter().map(|s| lambda_inf.clone() + s.clone()).collect(),
        lambda_inf.clone(),
    );

    // Verification: alpha(nabla)Lambda is the unit vector at l, and
    // tau(nabla)Lambda starts with gamma_l.
    let (check_alpha, _) = shift_apply(alpha, &lambda, ShiftDirection::Backward)?;
    let expected = EventualSeq::new(
        (0..=l)
            .map(|n| if n == l { S::one() } else { S::zero() })
            .collect(),
        S::zero(),
    );
    if check_alpha != expected {
        return Err(Error::Verification(
            "alpha(nabla)Lambda is not the unit vector at the refutation index".into(),
        ));
    }
    let (check_tau, _) = shift_apply(tau, &lambda, ShiftDirection::Backward)?;
    if check_tau.get(0) != gamma[l] {
        return Err(Error::Verification(
            "tau(nabla)Lambda does not expose the negative coefficient".into(),
        ));
    }
    ShiftSpec::new(lambda)
}

/// Report of a limit-existence probe on `a_n = |T^n h|^2`.
#[derive(Clone, Debug, Serialize)]
pub struct LimitReport {
    pub outcome: LimitOutcome,
    /// Set when a strongly admissible symbol coexists with a non-existent
    /// limit — that combination contradicts the theory and indicates a
    /// computation problem rather than a legitimate oscillation.
    pub falsification_alarm: bool,
}

/// Tracks `a_n = |T^n h|^2` for a matrix operator and classifies its tail.
pub fn limit_exists_probe_matrix(
    t: &crate::matrix::OperatorMatrix,
    alpha: &TruncatedSeries<f64>,
    h: &crate::matrix::CVec,
    horizon: usize,
    tol: f64,
) -> Result<LimitReport> {
    let report = crate::hereditary::check_admissible(alpha, tol);
    if !report.admissible {
        return Err(Error::Input("alpha is not admissible".into()));
    }
    let horizon = horizon.max(64);
    let mut samples = Vec::with_capacity(horizon);
    let mut v = h.clone();
    for _ in 0..horizon {
        samples.push(v.norm_squared());
        v = t.matrix() * v;
    }
    let outcome = classify_tail(&samples, tol);
    let falsification_alarm =
        report.strongly_admissible && !matches!(outcome, LimitOutcome::Exists { .. });
    Ok(LimitReport {
        outcome,
        falsification_alarm,
    })
}

/// Same probe for a weighted shift on the basis vector `e_j`: the samples
/// `Lambda_{n+j} / Lambda_j` are eventually constant, so the limit always
/// exists with value `Lambda_inf / Lambda_j`.
pub fn limit_exists_probe_shift<S: Coeff>(spec: &ShiftSpec<S>, j: usize) -> LimitReport {
    let lam = spec.lambda();
    let value = lam.eventual().to_f64() / lam.get(j).to_f64();
    LimitReport {
        outcome: LimitOutcome::Exists { value },
        falsification_alarm: false,
    }
}
