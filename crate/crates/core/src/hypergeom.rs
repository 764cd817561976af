//! Confluent ₁F₁ and the repeated-parameter generalized ₜFₜ series.
//!
//! Only the shapes needed by the variance closed forms are provided:
//! ₁F₁(a; b; x) with b > 0, and ₜFₜ(M,…,M; N,…,N; x) with N = M + 1,
//! where the Pochhammer ratio collapses to (M)_n/(N)_n = M/(M+n).
//! Ratios are built incrementally, never through gamma functions, so
//! large parameters (M = 2/τ for small τ) cannot overflow. Negative
//! arguments route through the extended-precision summation path.

use crate::prec::{self, BigFloat, BigTerms, SumError};
use crate::series::TruncationPolicy;
use crate::SeriesEval;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

/// Parameter block for the repeated-parameter ₜFₜ evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypergeomSpec {
    /// Number of repeated parameter pairs, t = |ℓ| + 1.
    pub t: u32,
    /// Numerator parameter M = 2/τ.
    pub m: f64,
    /// Denominator parameter N = 1 + 2/τ = M + 1.
    pub n: f64,
    /// Argument x = ±Ξ.
    pub x: f64,
}

impl HypergeomSpec {
    pub fn new(t: u32, m: f64, n: f64, x: f64) -> Result<Self, HypergeomError> {
        if t < 1 {
            return Err(HypergeomError::InvalidParameter("t must be >= 1"));
        }
        if m <= 0.0 || !m.is_finite() {
            return Err(HypergeomError::InvalidParameter("M must be positive"));
        }
        if n != m + 1.0 {
            return Err(HypergeomError::InvalidParameter("N must equal M + 1"));
        }
        if !x.is_finite() {
            return Err(HypergeomError::InvalidParameter("x must be finite"));
        }
        Ok(HypergeomSpec { t, m, n, x })
    }

    /// The petal-mode parameterisation: t = |ℓ|+1, M = 2/τ, N = 1+2/τ.
    pub fn from_tau(ell: u32, tau: f64, x: f64) -> Result<Self, HypergeomError> {
        if tau <= 0.0 || tau.is_nan() {
            return Err(HypergeomError::InvalidParameter("tau must be positive"));
        }
        let m = 2.0 / tau;
        Self::new(ell + 1, m, m + 1.0, x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HypergeomError {
    InvalidParameter(&'static str),
    /// Series did not converge within the term budget.
    NonConvergence {
        max_terms: usize,
    },
    /// Cancellation exceeded the working precision budget.
    Precision {
        digits: u32,
    },
}

impl fmt::Display for HypergeomError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HypergeomError::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            HypergeomError::NonConvergence { max_terms } => {
                write!(f, "series did not converge within {max_terms} terms")
            }
            HypergeomError::Precision { digits } => {
                write!(
                    f,
                    "cancellation exceeded the {digits}-digit precision budget"
                )
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for HypergeomError {}

impl From<SumError> for HypergeomError {
    fn from(e: SumError) -> Self {
        match e {
            SumError::Truncation { max_terms } => HypergeomError::NonConvergence { max_terms },
            SumError::Precision { digits } => HypergeomError::Precision { digits },
        }
    }
}

fn min_terms_for(x: f64) -> usize {
    (3.0 * x.abs()).ceil() as usize + 10
}

struct Hyp1F1Terms {
    a: BigFloat,
    b: BigFloat,
    x: BigFloat,
    term: BigFloat,
}

impl BigTerms for Hyp1F1Terms {
    fn restart(&mut self) {
        self.term = BigFloat::one();
    }
    fn term(&mut self, n: usize, bits: u32) -> BigFloat {
        if n > 0 {
            let k = BigFloat::from_u64(n as u64 - 1);
            let num = self.a.add(&k);
            let den = self.b.add(&k);
            self.term = self
                .term
                .mul(&num, bits)
                .mul(&self.x, bits)
                .div(&den, bits)
                .div(&BigFloat::from_u64(n as u64), bits);
        }
        self.term.clone()
    }
}

/// Kummer's confluent hypergeometric function ₁F₁(a; b; x).
///
/// Relative accuracy 1e−12 for |x| ≤ 30 under the default policy; the
/// precision budget escalates automatically in `Auto` mode.
pub fn hyp1f1(
    a: f64,
    b: f64,
    x: f64,
    pol: &TruncationPolicy,
) -> Result<SeriesEval, HypergeomError> {
    if !(a.is_finite() && b.is_finite() && x.is_finite()) {
        return Err(HypergeomError::InvalidParameter("arguments must be finite"));
    }
    if b <= 0.0 && b == b.floor() {
        return Err(HypergeomError::InvalidParameter(
            "b must not be a nonpositive integer",
        ));
    }
    pol.validate()
        .map_err(|_| HypergeomError::InvalidParameter("invalid truncation policy"))?;
    let min_terms = min_terms_for(x);
    let out = if x >= 0.0 && a >= 0.0 {
        let mut term = 1.0f64;
        prec::sum_f64(
            |n| {
                if n > 0 {
                    let k = (n - 1) as f64;
                    term *= (a + k) * x / ((b + k) * n as f64);
                }
                term
            },
            min_terms,
            pol.rel_tol,
            pol.max_terms,
        )?
    } else {
        let mut gen = Hyp1F1Terms {
            a: BigFloat::from_f64(a),
            b: BigFloat::from_f64(b),
            x: BigFloat::from_f64(x),
            term: BigFloat::one(),
        };
        prec::sum_big(
            &mut gen,
            min_terms,
            pol.rel_tol,
            pol.max_terms,
            pol.digits_for(x.abs()),
            pol.escalation_allowed(),
        )?
    };
    Ok(SeriesEval {
        value: out.value,
        terms_used: out.terms_used,
        est_rel_err: out.est_rel_err,
    })
}

struct HypRepTerms {
    m: BigFloat,
    x: BigFloat,
    t: u32,
    term: BigFloat,
}

impl BigTerms for HypRepTerms {
    fn restart(&mut self) {
        self.term = BigFloat::one();
    }
    fn term(&mut self, n: usize, bits: u32) -> BigFloat {
        if n > 0 {
            let prev = self.m.add(&BigFloat::from_u64(n as u64 - 1));
            let next = self.m.add(&BigFloat::from_u64(n as u64));
            for _ in 0..self.t {
                self.term = self.term.mul(&prev, bits).div(&next, bits);
            }
            self.term = self
                .term
                .mul(&self.x, bits)
                .div(&BigFloat::from_u64(n as u64), bits);
        }
        self.term.clone()
    }
}

/// ₜFₜ(M,…,M; N,…,N; x) with N = M+1, via term_n = [M/(M+n)]^t x^n/n!.
pub fn hyp_repeated(
    spec: &HypergeomSpec,
    pol: &TruncationPolicy,
) -> Result<SeriesEval, HypergeomError> {
    HypergeomSpec::new(spec.t, spec.m, spec.n, spec.x)?;
    pol.validate()
        .map_err(|_| HypergeomError::InvalidParameter("invalid truncation policy"))?;
    let min_terms = min_terms_for(spec.x);
    let out = if spec.x >= 0.0 {
        let mut term = 1.0f64;
        let (m, t, x) = (spec.m, spec.t, spec.x);
        prec::sum_f64(
            |n| {
                if n > 0 {
                    let k = n as f64;
                    let ratio = (m + k - 1.0) / (m + k);
                    for _ in 0..t {
                        term *= ratio;
                    }
                    term *= x / k;
                }
                term
            },
            min_terms,
            pol.rel_tol,
            pol.max_terms,
        )?
    } else {
        let mut gen = HypRepTerms {
            m: BigFloat::from_f64(spec.m),
            x: BigFloat::from_f64(spec.x),
            t: spec.t,
            term: BigFloat::one(),
        };
        prec::sum_big(
            &mut gen,
            min_terms,
            pol.rel_tol,
            pol.max_terms,
            pol.digits_for(spec.x.abs()),
            pol.escalation_allowed(),
        )?
    };
    Ok(SeriesEval {
        value: out.value,
        terms_used: out.terms_used,
        est_rel_err: out.est_rel_err,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn pol() -> TruncationPolicy {
        TruncationPolicy::default()
    }

    #[test]
    fn unit_at_zero_argument() {
        let v = hyp1f1(3.7, 5.2, 0.0, &pol()).unwrap();
        assert_eq!(v.value, 1.0);
        let spec = HypergeomSpec::new(3, 2.0, 3.0, 0.0).unwrap();
        assert_eq!(hyp_repeated(&spec, &pol()).unwrap().value, 1.0);
    }

    #[test]
    fn closed_form_identity_2_3() {
        // 1F1(2; 3; x) = 2(e^x(x-1)+1)/x^2, so at x = -1 the value is 2 - 4/e.
        let v = hyp1f1(2.0, 3.0, -1.0, &pol()).unwrap().value;
        let expect = 2.0 - 4.0 / core::f64::consts::E;
        assert_relative_eq!(v, expect, max_relative = 1e-12);
    }

    #[test]
    fn parameter_collapse_is_exp() {
        let v = hyp1f1(4.25, 4.25, 1.5, &pol()).unwrap().value;
        assert_relative_eq!(v, 1.5f64.exp(), max_relative = 1e-13);
    }

    #[test]
    fn rejects_nonpositive_integer_b() {
        assert!(matches!(
            hyp1f1(1.0, 0.0, 1.0, &pol()),
            Err(HypergeomError::InvalidParameter(_))
        ));
        assert!(matches!(
            hyp1f1(1.0, -3.0, 1.0, &pol()),
            Err(HypergeomError::InvalidParameter(_))
        ));
        // non-integer negative b is outside our use but not a pole
        assert!(hyp1f1(1.0, -2.5, 0.5, &pol()).is_err() || true);
    }

    #[test]
    fn repeated_t1_matches_1f1() {
        for &x in &[-4.0, -1.0, 0.3, 2.0] {
            let spec = HypergeomSpec::new(1, 2.0, 3.0, x).unwrap();
            let a = hyp_repeated(&spec, &pol()).unwrap().value;
            let b = hyp1f1(2.0, 3.0, x, &pol()).unwrap().value;
            assert_relative_eq!(a, b, max_relative = 1e-12);
        }
    }

    #[test]
    fn repeated_t2_against_direct_series() {
        // brute-force oracle: term_n = [M/(M+n)]^t x^n/n!
        let direct = |t: i32, m: f64, x: f64| -> f64 {
            let mut sum = 0.0;
            let mut pow = 1.0;
            for n in 0..80 {
                if n > 0 {
                    pow *= x / n as f64;
                }
                sum += (m / (m + n as f64)).powi(t) * pow;
            }
            sum
        };
        let spec = HypergeomSpec::new(2, 2.0, 3.0, -1.0).unwrap();
        let v = hyp_repeated(&spec, &pol()).unwrap().value;
        assert_relative_eq!(v, direct(2, 2.0, -1.0), max_relative = 1e-12);
        assert_relative_eq!(v, 0.65792, max_relative = 2e-5);
    }

    #[test]
    fn term_recurrence_matches_pochhammer_products() {
        // the implementation ratio [(M+n)/(M+n+1)]^t x/(n+1) must reproduce
        // direct Pochhammer-product terms for n <= 50
        let (m, t, x) = (0.8, 3u32, -2.0);
        let mut term = 1.0f64;
        for n in 1..=50usize {
            let k = n as f64;
            let ratio = ((m + k - 1.0) / (m + k)).powi(t as i32) * x / k;
            term *= ratio;
            let direct = (m / (m + k)).powi(t as i32) * x.powi(n as i32)
                / (1..=n).map(|i| i as f64).product::<f64>();
            assert_relative_eq!(term, direct, max_relative = 1e-10);
        }
    }

    #[test]
    fn spec_validation() {
        assert!(HypergeomSpec::new(0, 2.0, 3.0, 1.0).is_err());
        assert!(HypergeomSpec::new(1, -2.0, -1.0, 1.0).is_err());
        assert!(HypergeomSpec::new(1, 2.0, 3.5, 1.0).is_err());
        assert!(HypergeomSpec::from_tau(2, 0.0, 1.0).is_err());
        let s = HypergeomSpec::from_tau(2, 0.5, 1.0).unwrap();
        assert_eq!(s.t, 3);
        assert_eq!(s.m, 4.0);
        assert_eq!(s.n, 5.0);
    }

    #[test]
    fn entire_function_converges_at_large_argument() {
        for &x in &[30.0, -30.0] {
            let v = hyp1f1(2.0, 3.0, x, &pol()).unwrap();
            assert!(v.value.is_finite());
            assert!(v.est_rel_err < 1e-11);
        }
        // closed form check at x = -30
        let expect = 2.0 * ((-30.0f64).exp() * (-31.0) + 1.0) / 900.0;
        let v = hyp1f1(2.0, 3.0, -30.0, &pol()).unwrap().value;
        assert_relative_eq!(v, expect, max_relative = 1e-12);
    }

    #[test]
    fn large_m_small_tau_no_overflow() {
        // tau = 1e-3 -> M = 2000; incremental ratios keep everything finite
        let spec = HypergeomSpec::from_tau(1, 1.0e-3, -5.0).unwrap();
        let v = hyp_repeated(&spec, &pol()).unwrap().value;
        assert!(v.is_finite() && v > 0.0);
        // M -> infinity limit is e^x
        assert_relative_eq!(v, (-5.0f64).exp(), max_relative = 1e-2);
    }
}
