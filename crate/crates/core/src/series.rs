//! Quadrature variance of the down-converted state in every parameter
//! regime, with controlled truncation and cancellation-safe summation.
//!
//! At the extremal phases sin(2θ) = ±1 every regime reduces to a single
//! series over the Magnus order n,
//!
//! ```text
//! σ±² = Σ_{n≥0} (±Ξ)^n (1 + nξ/2)^{−1/2} / [(nτ + 2) n!]
//! ```
//!
//! whose even part carries the factors Ξ^{2m}(1+mξ)^{−1/2}/[2(1+mτ)(2m)!]
//! and whose odd part carries Ξ^{2m−1}[1+(2m−1)ξ/2]^{−1/2} over
//! [2+(2m−1)τ](2m−1)!, exactly the two sums of the general-θ expansion.
//! General θ is recovered from the extremal pair since the even and odd
//! sums are (σ₊² + σ₋²)/2 − 1/2 and (σ₊² − σ₋²)/2.
//!
//! The minus series is alternating with terms growing to ~e^Ξ before
//! decay while σ₋² itself can be exponentially small; it is always
//! summed on the extended-precision path. Plus series have positive
//! terms and run in compensated f64.

use crate::hypergeom::{self, HypergeomError, HypergeomSpec};
use crate::params::ReducedParams;
use crate::prec::{self, BigFloat, BigTerms, SumError};
use crate::quad::{self, QuadError};
use crate::{SeriesEval, Sign};
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

/// Extended-precision digit budget selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrecisionDigits {
    /// 20 + ⌈Ξ·log₁₀e⌉ digits, escalated automatically when the
    /// cancellation estimate exceeds the tolerance.
    Auto,
    /// A pinned digit count; no escalation.
    Fixed(u32),
}

/// Stopping and precision controls shared by every series evaluator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    /// Terms are considered converged once below this fraction of the
    /// running magnitude (and of the geometric tail bound).
    pub rel_tol: f64,
    /// Hard cap on summed terms.
    pub max_terms: usize,
    /// Working-precision budget for the alternating path.
    pub precision_digits: PrecisionDigits,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy {
            rel_tol: 1e-12,
            max_terms: 400,
            precision_digits: PrecisionDigits::Auto,
        }
    }
}

impl TruncationPolicy {
    pub fn validate(&self) -> Result<(), SeriesError> {
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(SeriesError::InvalidInput("rel_tol must lie in (0, 1)"));
        }
        if self.max_terms < 10 {
            return Err(SeriesError::InvalidInput("max_terms must be >= 10"));
        }
        if let PrecisionDigits::Fixed(d) = self.precision_digits {
            if d < 8 {
                return Err(SeriesError::InvalidInput("precision_digits must be >= 8"));
            }
        }
        Ok(())
    }

    /// Decimal digits for the extended-precision path at squeeze Ξ.
    pub fn digits_for(&self, squeeze: f64) -> u32 {
        match self.precision_digits {
            PrecisionDigits::Fixed(d) => d,
            PrecisionDigits::Auto => 20 + (squeeze * core::f64::consts::LOG10_E).ceil() as u32,
        }
    }

    pub(crate) fn escalation_allowed(&self) -> bool {
        matches!(self.precision_digits, PrecisionDigits::Auto)
    }

    /// Terms summed before convergence testing starts; the term
    /// magnitude peaks near n ≈ Ξ.
    pub(crate) fn min_terms(squeeze: f64) -> usize {
        (3.0 * squeeze).ceil() as usize + 10
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SeriesError {
    /// max_terms reached before convergence.
    Truncation { max_terms: usize },
    /// Estimated cancellation exceeds the working precision budget.
    Precision { digits: u32 },
    /// Precondition violation.
    InvalidInput(&'static str),
    /// Propagated hypergeometric failure.
    Hypergeom(HypergeomError),
    /// Propagated quadrature failure.
    Quadrature(QuadError),
    /// The objective varies below tolerance over the search interval.
    FlatArea,
}

impl fmt::Display for SeriesError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeriesError::Truncation { max_terms } => {
                write!(f, "series did not converge within {max_terms} terms")
            }
            SeriesError::Precision { digits } => {
                write!(
                    f,
                    "cancellation exceeded the {digits}-digit precision budget"
                )
            }
            SeriesError::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            SeriesError::Hypergeom(e) => write!(f, "hypergeometric evaluation failed: {e}"),
            SeriesError::Quadrature(e) => write!(f, "quadrature failed: {e}"),
            SeriesError::FlatArea => {
                write!(f, "area varies below tolerance over the search interval")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for SeriesError {}

impl From<SumError> for SeriesError {
    fn from(e: SumError) -> Self {
        match e {
            SumError::Truncation { max_terms } => SeriesError::Truncation { max_terms },
            SumError::Precision { digits } => SeriesError::Precision { digits },
        }
    }
}

impl From<HypergeomError> for SeriesError {
    fn from(e: HypergeomError) -> Self {
        SeriesError::Hypergeom(e)
    }
}

impl From<QuadError> for SeriesError {
    fn from(e: QuadError) -> Self {
        SeriesError::Quadrature(e)
    }
}

/// Variance prediction at both extremal orientations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceResult {
    /// Anti-squeezed variance σ₊² (sin 2θ = +1).
    pub sigma_plus_sq: f64,
    /// Squeezed variance σ₋² (sin 2θ = −1).
    pub sigma_minus_sq: f64,
    /// Variance at the requested θ, when one was requested.
    pub sigma_theta_sq: Option<f64>,
    /// Uncertainty area σ₊σ₋.
    pub area: f64,
    /// Largest term count among the contributing series.
    pub terms_used: usize,
    /// Largest estimated relative error among the contributing series.
    pub est_rel_err: f64,
}

impl VarianceResult {
    /// Assemble from the two extremal evaluations; θ (if any) fills the
    /// general-orientation variance through the even/odd decomposition.
    pub fn from_extremal(plus: SeriesEval, minus: SeriesEval, theta: Option<f64>) -> Self {
        let sigma_theta_sq = theta.map(|th| {
            let s = (2.0 * th).sin();
            0.5 * ((1.0 + s) * plus.value + (1.0 - s) * minus.value)
        });
        VarianceResult {
            sigma_plus_sq: plus.value,
            sigma_minus_sq: minus.value,
            sigma_theta_sq,
            area: uncertainty_area(plus.value, minus.value),
            terms_used: plus.terms_used.max(minus.terms_used),
            est_rel_err: plus.est_rel_err.max(minus.est_rel_err),
        }
    }
}

fn check_nonneg(field: &'static str, v: f64) -> Result<(), SeriesError> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(SeriesError::InvalidInput(field))
    }
}

/// Extended-precision terms of the unified σ± series.
struct SigmaTerms {
    x: BigFloat,
    xi: BigFloat,
    tau: BigFloat,
    pow: BigFloat,
}

impl SigmaTerms {
    fn new(x: f64, xi: f64, tau: f64) -> Self {
        SigmaTerms {
            x: BigFloat::from_f64(x),
            xi: BigFloat::from_f64(xi),
            tau: BigFloat::from_f64(tau),
            pow: BigFloat::one(),
        }
    }
}

impl BigTerms for SigmaTerms {
    fn restart(&mut self) {
        self.pow = BigFloat::one();
    }
    fn term(&mut self, n: usize, bits: u32) -> BigFloat {
        let nb = BigFloat::from_u64(n as u64);
        if n > 0 {
            self.pow = self.pow.mul(&self.x, bits).div(&nb, bits);
        }
        let two = BigFloat::from_u64(2);
        let den = self.tau.mul(&nb, bits).add(&two);
        // (1 + n xi / 2)^{1/2}
        let arg = BigFloat::one().add(&self.xi.mul(&nb, bits).scale2(-1));
        let rs = arg.sqrt(bits);
        self.pow.div(&den.mul(&rs, bits), bits)
    }
}

/// One extremal variance from the unified series.
fn sigma_series(
    sign: Sign,
    xi: f64,
    tau: f64,
    squeeze: f64,
    pol: &TruncationPolicy,
) -> Result<SeriesEval, SeriesError> {
    pol.validate()?;
    check_nonneg("xi must be nonnegative and finite", xi)?;
    check_nonneg("tau must be nonnegative and finite", tau)?;
    check_nonneg("squeeze must be nonnegative and finite", squeeze)?;
    let min_terms = TruncationPolicy::min_terms(squeeze);
    let out = match sign {
        Sign::Plus => {
            let mut pow = 1.0f64;
            prec::sum_f64(
                |n| {
                    let nf = n as f64;
                    if n > 0 {
                        pow *= squeeze / nf;
                    }
                    pow / ((nf * tau + 2.0) * (1.0 + 0.5 * nf * xi).sqrt())
                },
                min_terms,
                pol.rel_tol,
                pol.max_terms,
            )?
        }
        Sign::Minus => {
            let mut gen = SigmaTerms::new(-squeeze, xi, tau);
            prec::sum_big(
                &mut gen,
                min_terms,
                pol.rel_tol,
                pol.max_terms,
                pol.digits_for(squeeze),
                pol.escalation_allowed(),
            )?
        }
    };
    Ok(SeriesEval {
        value: out.value,
        terms_used: out.terms_used,
        est_rel_err: out.est_rel_err,
    })
}

/// General-regime variance for arbitrary (ξ, τ, Ξ, θ).
pub fn variance_general(
    rp: &ReducedParams,
    pol: &TruncationPolicy,
) -> Result<VarianceResult, SeriesError> {
    let plus = sigma_series(Sign::Plus, rp.xi, rp.tau, rp.squeeze, pol)?;
    let minus = sigma_series(Sign::Minus, rp.xi, rp.tau, rp.squeeze, pol)?;
    Ok(VarianceResult::from_extremal(plus, minus, Some(rp.theta)))
}

/// Single extremal value of the general series; the authoritative
/// evaluator when both ξ and τ are nonzero.
pub fn variance_general_signed(
    rp: &ReducedParams,
    sign: Sign,
    pol: &TruncationPolicy,
) -> Result<SeriesEval, SeriesError> {
    sigma_series(sign, rp.xi, rp.tau, rp.squeeze, pol)
}

/// Ideal-limit (ξ = τ = 0) closed form:
/// σ_q² = ½cosh Ξ + ½ sin(2θ) sinh Ξ, σ±² = ½e^{±Ξ}, σ₊σ₋ = ½ exactly.
///
/// Pre: `squeeze >= 0` and finite.
pub fn variance_ideal(squeeze: f64, theta: f64) -> VarianceResult {
    assert!(
        squeeze >= 0.0 && squeeze.is_finite(),
        "squeeze must be nonnegative and finite"
    );
    let plus = 0.5 * squeeze.exp();
    let minus = 0.5 * (-squeeze).exp();
    let s = (2.0 * theta).sin();
    VarianceResult {
        sigma_plus_sq: plus,
        sigma_minus_sq: minus,
        sigma_theta_sq: Some(0.5 * squeeze.cosh() + 0.5 * s * squeeze.sinh()),
        area: 0.5,
        terms_used: 0,
        est_rel_err: 0.0,
    }
}

/// ξ = 0 closed form: σ±² = ½·₁F₁(2/τ; 1 + 2/τ; ±Ξ).
pub fn variance_xi0(
    tau: f64,
    squeeze: f64,
    sign: Sign,
    pol: &TruncationPolicy,
) -> Result<SeriesEval, SeriesError> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(SeriesError::InvalidInput("tau must be positive"));
    }
    check_nonneg("squeeze must be nonnegative and finite", squeeze)?;
    let a = 2.0 / tau;
    let eval = hypergeom::hyp1f1(a, 1.0 + a, sign.factor() * squeeze, pol)?;
    Ok(SeriesEval {
        value: 0.5 * eval.value,
        terms_used: eval.terms_used,
        est_rel_err: eval.est_rel_err,
    })
}

/// Extended-precision terms of the τ = 0 series
/// (±Ξ)^n / [n!·√2·√(2 + nξ)].
struct Tau0Terms {
    x: BigFloat,
    xi: BigFloat,
    pow: BigFloat,
}

impl BigTerms for Tau0Terms {
    fn restart(&mut self) {
        self.pow = BigFloat::one();
    }
    fn term(&mut self, n: usize, bits: u32) -> BigFloat {
        let nb = BigFloat::from_u64(n as u64);
        if n > 0 {
            self.pow = self.pow.mul(&self.x, bits).div(&nb, bits);
        }
        // sqrt(2)*sqrt(2 + n xi) = sqrt(4 + 2 n xi)
        let arg = BigFloat::from_u64(4).add(&self.xi.mul(&nb, bits).scale2(1));
        self.pow.div(&arg.sqrt(bits), bits)
    }
}

/// τ = 0 series: Σ (±Ξ)^n / [n!·√2·√(2+nξ)].
pub fn variance_tau0_series(
    xi: f64,
    squeeze: f64,
    sign: Sign,
    pol: &TruncationPolicy,
) -> Result<SeriesEval, SeriesError> {
    pol.validate()?;
    check_nonneg("xi must be nonnegative and finite", xi)?;
    check_nonneg("squeeze must be nonnegative and finite", squeeze)?;
    let min_terms = TruncationPolicy::min_terms(squeeze);
    let out = match sign {
        Sign::Plus => {
            let mut pow = 1.0f64;
            prec::sum_f64(
                |n| {
                    let nf = n as f64;
                    if n > 0 {
                        pow *= squeeze / nf;
                    }
                    pow / (4.0 + 2.0 * nf * xi).sqrt()
                },
                min_terms,
                pol.rel_tol,
                pol.max_terms,
            )?
        }
        Sign::Minus => {
            let mut gen = Tau0Terms {
                x: BigFloat::from_f64(-squeeze),
                xi: BigFloat::from_f64(xi),
                pow: BigFloat::one(),
            };
            prec::sum_big(
                &mut gen,
                min_terms,
                pol.rel_tol,
                pol.max_terms,
                pol.digits_for(squeeze),
                pol.escalation_allowed(),
            )?
        }
    };
    Ok(SeriesEval {
        value: out.value,
        terms_used: out.terms_used,
        est_rel_err: out.est_rel_err,
    })
}

/// τ = 0 integral representation, evaluated by Gauss-Hermite quadrature
/// as an ensemble average over squeezing parameters Ξe^{−ξx²}.
pub fn variance_tau0_integral(
    xi: f64,
    squeeze: f64,
    sign: Sign,
) -> Result<SeriesEval, SeriesError> {
    Ok(quad::ensemble_average(squeeze, xi, sign, 20)?)
}

/// Largest supported azimuthal index.
pub const MAX_ELL: u32 = 32;

/// Extended-precision terms of the petal series
/// (±Ξ)^n 2^{|ℓ|} / [(nτ+2)^{|ℓ|+1} n!].
struct PetalTerms {
    x: BigFloat,
    tau: BigFloat,
    ell: u32,
    pow: BigFloat,
}

impl BigTerms for PetalTerms {
    fn restart(&mut self) {
        self.pow = BigFloat::one();
    }
    fn term(&mut self, n: usize, bits: u32) -> BigFloat {
        let nb = BigFloat::from_u64(n as u64);
        if n > 0 {
            self.pow = self.pow.mul(&self.x, bits).div(&nb, bits);
        }
        let den = self.tau.mul(&nb, bits).add(&BigFloat::from_u64(2));
        let mut t = self.pow.clone().scale2(self.ell as i64);
        for _ in 0..=self.ell {
            t = t.div(&den, bits);
        }
        t
    }
}

/// Petal-mode variance (ξ → 0, p = 0):
/// σ±² = Σ (±Ξ)^n 2^{|ℓ|} / [(nτ+2)^{|ℓ|+1} n!].
pub fn variance_petal(
    ell: u32,
    tau: f64,
    squeeze: f64,
    sign: Sign,
    pol: &TruncationPolicy,
) -> Result<SeriesEval, SeriesError> {
    pol.validate()?;
    if ell > MAX_ELL {
        return Err(SeriesError::InvalidInput("ell exceeds the supported cap"));
    }
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(SeriesError::InvalidInput("tau must be positive"));
    }
    check_nonneg("squeeze must be nonnegative and finite", squeeze)?;
    let min_terms = TruncationPolicy::min_terms(squeeze);
    let out = match sign {
        Sign::Plus => {
            let mut pow = 1.0f64;
            let scale = 2.0f64.powi(ell as i32);
            prec::sum_f64(
                |n| {
                    let nf = n as f64;
                    if n > 0 {
                        pow *= squeeze / nf;
                    }
                    pow * scale / (nf * tau + 2.0).powi(ell as i32 + 1)
                },
                min_terms,
                pol.rel_tol,
                pol.max_terms,
            )?
        }
        Sign::Minus => {
            let mut gen = PetalTerms {
                x: BigFloat::from_f64(-squeeze),
                tau: BigFloat::from_f64(tau),
                ell,
                pow: BigFloat::one(),
            };
            prec::sum_big(
                &mut gen,
                min_terms,
                pol.rel_tol,
                pol.max_terms,
                pol.digits_for(squeeze),
                pol.escalation_allowed(),
            )?
        }
    };
    Ok(SeriesEval {
        value: out.value,
        terms_used: out.terms_used,
        est_rel_err: out.est_rel_err,
    })
}

/// The petal variance through its resummed form
/// ½·ₜFₜ(M,…,M; N,…,N; ±Ξ), t = |ℓ|+1, M = 2/τ, N = 1+2/τ.
pub fn variance_petal_hyp(
    ell: u32,
    tau: f64,
    squeeze: f64,
    sign: Sign,
    pol: &TruncationPolicy,
) -> Result<SeriesEval, SeriesError> {
    if ell > MAX_ELL {
        return Err(SeriesError::InvalidInput("ell exceeds the supported cap"));
    }
    check_nonneg("squeeze must be nonnegative and finite", squeeze)?;
    let spec = HypergeomSpec::from_tau(ell, tau, sign.factor() * squeeze)?;
    let eval = hypergeom::hyp_repeated(&spec, pol)?;
    Ok(SeriesEval {
        value: 0.5 * eval.value,
        terms_used: eval.terms_used,
        est_rel_err: eval.est_rel_err,
    })
}

/// Uncertainty area σ₊σ₋ = √(σ₊²σ₋²).
pub fn uncertainty_area(sigma_plus_sq: f64, sigma_minus_sq: f64) -> f64 {
    (sigma_plus_sq * sigma_minus_sq).sqrt()
}

/// Location and value of the τ-maximum of the uncertainty area.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AreaPeak {
    pub tau_star: f64,
    pub area: f64,
}

/// Locate the τ maximizing σ₊σ₋ over [tau_lo, tau_hi] for the given
/// azimuthal index (ℓ = 0 is the Gaussian-LO case), by a log-spaced
/// bracketing scan followed by golden-section refinement to relative
/// τ-tolerance 1e−4.
pub fn area_peak(
    squeeze: f64,
    ell: u32,
    tau_lo: f64,
    tau_hi: f64,
    pol: &TruncationPolicy,
) -> Result<AreaPeak, SeriesError> {
    if !(tau_lo > 0.0 && tau_hi.is_finite() && tau_lo < tau_hi) {
        return Err(SeriesError::InvalidInput(
            "search interval must satisfy 0 < tau_lo < tau_hi",
        ));
    }
    check_nonneg("squeeze must be nonnegative and finite", squeeze)?;
    let area_at = |tau: f64| -> Result<f64, SeriesError> {
        let p = variance_petal(ell, tau, squeeze, Sign::Plus, pol)?;
        let m = variance_petal(ell, tau, squeeze, Sign::Minus, pol)?;
        Ok(uncertainty_area(p.value, m.value))
    };

    const SCAN: usize = 33;
    let log_lo = tau_lo.ln();
    let log_hi = tau_hi.ln();
    let mut best = (0usize, f64::MIN);
    let mut lo_val = f64::MAX;
    let mut hi_val = f64::MIN;
    let mut taus = [0.0f64; SCAN];
    for (i, tau) in taus.iter_mut().enumerate() {
        *tau = (log_lo + (log_hi - log_lo) * i as f64 / (SCAN - 1) as f64).exp();
        let a = area_at(*tau)?;
        if a > best.1 {
            best = (i, a);
        }
        lo_val = lo_val.min(a);
        hi_val = hi_val.max(a);
    }
    if hi_val - lo_val <= 1e-10 * hi_val.abs().max(f64::MIN_POSITIVE) {
        return Err(SeriesError::FlatArea);
    }
    let mut a = taus[best.0.saturating_sub(1)];
    let mut b = taus[(best.0 + 1).min(SCAN - 1)];
    if a >= b {
        // peak pinned at an interval edge
        return Ok(AreaPeak {
            tau_star: taus[best.0],
            area: best.1,
        });
    }

    const INVPHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INVPHI * (b - a);
    let mut d = a + INVPHI * (b - a);
    let mut fc = area_at(c)?;
    let mut fd = area_at(d)?;
    while (b - a) > 1e-4 * 0.5 * (a + b) {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INVPHI * (b - a);
            fc = area_at(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INVPHI * (b - a);
            fd = area_at(d)?;
        }
    }
    let tau_star = 0.5 * (a + b);
    Ok(AreaPeak {
        tau_star,
        area: area_at(tau_star)?,
    })
}
