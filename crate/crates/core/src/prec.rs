//! Compensated f64 accumulation and a small arbitrary-precision binary
//! float backing the cancellation-safe summation of alternating series.
//!
//! The minus-sign variance series have terms that grow to ~e^Ξ before
//! decaying while the sum itself can be as small as ~e^{−Ξ}; those sums
//! run here at a decimal-digit budget sized by the truncation policy.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

#[allow(unused_imports)]
use num_traits::Float;

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct KahanSum {
    sum: f64,
    compensation: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Arbitrary-precision binary float: `mant * 2^exp`.
///
/// Operations round (truncate) the mantissa to a caller-supplied bit
/// count; addition is exact and is rounded by the summation loop.
#[derive(Debug, Clone)]
pub(crate) struct BigFloat {
    mant: BigInt,
    exp: i64,
}

/// Working mantissa bits for a decimal-digit budget, with guard bits
/// absorbing per-operation truncation.
pub(crate) fn bits_for(digits: u32) -> u32 {
    (digits as f64 * core::f64::consts::LOG2_10).ceil() as u32 + 32
}

/// Exact power of two as f64, saturating far outside the double range.
fn exp2i(e: i64) -> f64 {
    if e > 1100 {
        return f64::INFINITY;
    }
    if e < -1140 {
        return 0.0;
    }
    fn exp2_small(e: i32) -> f64 {
        // |e| <= 500: construct the exponent field directly
        f64::from_bits(((1023 + e) as u64) << 52)
    }
    let mut r = 1.0f64;
    let mut e = e;
    while e > 500 {
        r *= exp2_small(500);
        e -= 500;
    }
    while e < -500 {
        r *= exp2_small(-500);
        e += 500;
    }
    r * exp2_small(e as i32)
}

impl BigFloat {
    pub fn zero() -> Self {
        BigFloat {
            mant: BigInt::zero(),
            exp: 0,
        }
    }

    pub fn one() -> Self {
        BigFloat {
            mant: BigInt::from(1),
            exp: 0,
        }
    }

    /// Exact conversion; `x` must be finite.
    pub fn from_f64(x: f64) -> Self {
        debug_assert!(x.is_finite());
        if x == 0.0 {
            return Self::zero();
        }
        let bits = x.to_bits();
        let negative = (bits >> 63) == 1;
        let biased = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if biased == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), biased - 1075)
        };
        let mut mant = BigInt::from(m);
        if negative {
            mant = -mant;
        }
        BigFloat { mant, exp: e }
    }

    pub fn from_u64(v: u64) -> Self {
        BigFloat {
            mant: BigInt::from(v),
            exp: 0,
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.mant.is_zero() {
            return 0.0;
        }
        // keep 63 bits: the i64 -> f64 conversion then rounds to nearest
        // and the truncated remainder sits 10 bits below the last place
        let nb = self.mant.bits();
        let (m, e) = if nb > 63 {
            let s = (nb - 63) as i64;
            ((&self.mant >> (s as u64)).to_i64().unwrap(), self.exp + s)
        } else {
            (self.mant.to_i64().unwrap(), self.exp)
        };
        (m as f64) * exp2i(e)
    }

    /// Truncate the mantissa to at most `bits` bits.
    pub fn rounded(mut self, bits: u32) -> Self {
        let nb = self.mant.bits();
        if nb > bits as u64 {
            let s = nb - bits as u64;
            self.mant = &self.mant >> s;
            self.exp += s as i64;
        }
        self
    }

    /// Exact addition; callers round periodically.
    pub fn add(&self, o: &Self) -> Self {
        if self.mant.is_zero() {
            return o.clone();
        }
        if o.mant.is_zero() {
            return self.clone();
        }
        if self.exp >= o.exp {
            let s = (self.exp - o.exp) as u64;
            BigFloat {
                mant: (&self.mant << s) + &o.mant,
                exp: o.exp,
            }
        } else {
            let s = (o.exp - self.exp) as u64;
            BigFloat {
                mant: (&o.mant << s) + &self.mant,
                exp: self.exp,
            }
        }
    }

    pub fn mul(&self, o: &Self, bits: u32) -> Self {
        BigFloat {
            mant: &self.mant * &o.mant,
            exp: self.exp + o.exp,
        }
        .rounded(bits)
    }

    pub fn div(&self, o: &Self, bits: u32) -> Self {
        assert!(!o.mant.is_zero(), "BigFloat division by zero");
        if self.mant.is_zero() {
            return Self::zero();
        }
        let na = self.mant.bits() as i64;
        let nb = o.mant.bits() as i64;
        let k = (bits as i64 + 2 + nb - na).max(0) as u64;
        let num = &self.mant << k;
        let q = num / &o.mant;
        BigFloat {
            mant: q,
            exp: self.exp - o.exp - k as i64,
        }
        .rounded(bits)
    }

    /// Square root of a nonnegative value.
    pub fn sqrt(&self, bits: u32) -> Self {
        assert!(!self.mant.is_negative(), "BigFloat sqrt of negative value");
        if self.mant.is_zero() {
            return Self::zero();
        }
        let nb = self.mant.bits() as i64;
        let mut k = (2 * (bits as i64 + 2) - nb).max(0);
        if (self.exp - k).rem_euclid(2) != 0 {
            k += 1;
        }
        let m = &self.mant << (k as u64);
        let r = m.sqrt();
        BigFloat {
            mant: r,
            exp: (self.exp - k) / 2,
        }
        .rounded(bits)
    }

    /// Multiply by 2^k exactly.
    pub fn scale2(mut self, k: i64) -> Self {
        if !self.mant.is_zero() {
            self.exp += k;
        }
        self
    }
}

/// Outcome of a converged series summation.
#[derive(Debug, Clone, Copy)]
pub(crate) struct SumOutcome {
    pub value: f64,
    pub terms_used: usize,
    pub est_rel_err: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum SumError {
    /// max_terms reached before the stopping rule fired.
    Truncation { max_terms: usize },
    /// Cancellation exceeded the working precision budget.
    Precision { digits: u32 },
}

/// Term generator for the extended-precision path. `term` must be called
/// with consecutive `n` starting from 0 after each `restart`.
pub(crate) trait BigTerms {
    fn restart(&mut self);
    fn term(&mut self, n: usize, bits: u32) -> BigFloat;
}

const CONSECUTIVE_SMALL: u32 = 3;
const TAIL_FRACTION: f64 = 0.1;
const DIGITS_CAP: u32 = 300;

struct StopState {
    mag: f64,
    last: f64,
    prev: f64,
    consecutive: u32,
}

impl StopState {
    fn new() -> Self {
        StopState {
            mag: 0.0,
            last: 0.0,
            prev: 0.0,
            consecutive: 0,
        }
    }

    /// Feed |term n| and the current sum estimate; true once the series
    /// has converged under the twin guard (term below rel_tol of the
    /// running magnitude and geometric tail below rel_tol of the sum)
    /// for three consecutive terms.
    fn update(&mut self, n: usize, t: f64, sum_now: f64, min_terms: usize, rel_tol: f64) -> bool {
        let ta = t.abs();
        self.mag += ta;
        self.last = ta;
        let (small, tail_ok) = if ta == 0.0 {
            (true, true)
        } else {
            let small = ta <= rel_tol * self.mag;
            let ratio = if self.prev != 0.0 {
                (t / self.prev).abs()
            } else {
                1.0
            };
            let tail_ok = ratio < 1.0
                && ta * ratio / (1.0 - ratio)
                    <= TAIL_FRACTION * rel_tol * sum_now.abs().max(f64::MIN_POSITIVE);
            (small, tail_ok)
        };
        self.prev = t;
        if n >= min_terms && small && tail_ok {
            self.consecutive += 1;
        } else {
            self.consecutive = 0;
        }
        self.consecutive >= CONSECUTIVE_SMALL
    }
}

/// Kahan-compensated summation for series without catastrophic
/// cancellation (all our plus-sign series).
pub(crate) fn sum_f64(
    mut term: impl FnMut(usize) -> f64,
    min_terms: usize,
    rel_tol: f64,
    max_terms: usize,
) -> Result<SumOutcome, SumError> {
    let mut acc = KahanSum::new();
    let mut stop = StopState::new();
    for n in 0..max_terms {
        let t = term(n);
        acc.add(t);
        if stop.update(n, t, acc.value(), min_terms, rel_tol) {
            let value = acc.value();
            let est =
                (stop.last + 2.0 * f64::EPSILON * stop.mag) / value.abs().max(f64::MIN_POSITIVE);
            return Ok(SumOutcome {
                value,
                terms_used: n + 1,
                est_rel_err: est,
            });
        }
    }
    Err(SumError::Truncation { max_terms })
}

/// Extended-precision summation with automatic digit escalation.
///
/// `start_digits` sizes the first pass; when the reported cancellation
/// floor exceeds half the requested tolerance and escalation is allowed,
/// the run restarts at 1.5x the digits up to a hard cap.
pub(crate) fn sum_big(
    gen: &mut dyn BigTerms,
    min_terms: usize,
    rel_tol: f64,
    max_terms: usize,
    start_digits: u32,
    allow_escalation: bool,
) -> Result<SumOutcome, SumError> {
    let mut digits = start_digits.clamp(8, DIGITS_CAP);
    loop {
        let bits = bits_for(digits);
        gen.restart();
        let mut sum = BigFloat::zero();
        let mut stop = StopState::new();
        let mut converged = None;
        for n in 0..max_terms {
            let t = gen.term(n, bits);
            sum = sum.add(&t).rounded(bits + 64);
            if stop.update(n, t.to_f64(), sum.to_f64(), min_terms, rel_tol) {
                converged = Some(n + 1);
                break;
            }
        }
        let Some(terms_used) = converged else {
            return Err(SumError::Truncation { max_terms });
        };
        let value = sum.to_f64();
        let cancel = stop.mag * libm_pow10_neg(digits);
        let denom = value.abs().max(f64::MIN_POSITIVE);
        let est = (stop.last + cancel) / denom;
        if cancel <= 0.5 * rel_tol * denom {
            return Ok(SumOutcome {
                value,
                terms_used,
                est_rel_err: est,
            });
        }
        if allow_escalation && digits < DIGITS_CAP {
            digits = (digits + digits / 2).min(DIGITS_CAP);
        } else {
            return Err(SumError::Precision { digits });
        }
    }
}

fn libm_pow10_neg(digits: u32) -> f64 {
    10.0f64.powi(-(digits.min(307) as i32))
}
