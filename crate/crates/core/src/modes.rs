//! Laguerre-Gauss angular spectra from their generating function, petal
//! modes, and an independent generating-function derivation of the petal
//! variance by coefficient extraction.
//!
//! The generating function (waist w₀, sign s of the azimuthal index)
//!
//! ```text
//! G(k, μ, ν, s) = w₀ N_{ℓ,p}/(1+ν) · exp[i w₀(k_x + i s k_y) μ / (2(1+ν))]
//!                · exp[−w₀²|K|²(1−ν)/(4(1+ν))]
//! ```
//!
//! yields the (ℓ, p) spectrum as |ℓ|! times its μ^{|ℓ|}ν^p coefficient;
//! with that convention the spectra are orthonormal under ∫·d²K. The
//! petal variance comes from expanding exp[μ₁μ₂/D_n] per Magnus order n
//! and is required to agree with the closed series to 1e−10 — that
//! agreement is this module's role as an independent derivation path.

use crate::prec::{self, BigFloat, BigTerms, SumError};
use crate::series::{TruncationPolicy, MAX_ELL};
use crate::{SeriesEval, Sign};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use num_complex::Complex64;

#[allow(unused_imports)]
use num_traits::Float;

/// Largest supported radial index for the ν-expansion path.
pub const MAX_RADIAL: u32 = 16;

/// Local-oscillator mode shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeKind {
    /// Plain Gaussian (ℓ = 0, p = 0).
    Gaussian,
    /// A single Laguerre-Gauss mode with the given azimuthal sign.
    LgSingle { sign: i8 },
    /// Equal superposition of the +ℓ and −ℓ modes.
    LgPetal,
}

/// Local-oscillator mode descriptor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeSpec {
    /// |ℓ|, capped at MAX_ELL.
    pub abs_ell: u32,
    /// Radial index; 0 for all in-scope variance evaluation.
    pub p: u32,
    /// LO waist (m).
    pub w0: f64,
    /// LO phase θ (radians).
    pub theta: f64,
    pub kind: ModeKind,
}

impl ModeSpec {
    pub fn validate(&self) -> Result<(), ModeError> {
        if self.abs_ell > MAX_ELL {
            return Err(ModeError::InvalidSpec("abs_ell exceeds the supported cap"));
        }
        if self.p > MAX_RADIAL {
            return Err(ModeError::InvalidSpec("p exceeds the supported cap"));
        }
        if !(self.w0 > 0.0 && self.w0.is_finite()) {
            return Err(ModeError::InvalidSpec("w0 must be positive"));
        }
        if let ModeKind::LgSingle { sign } = self.kind {
            if sign != 1 && sign != -1 {
                return Err(ModeError::InvalidSpec("sign must be +1 or -1"));
            }
        }
        if self.kind == ModeKind::Gaussian && (self.abs_ell != 0 || self.p != 0) {
            return Err(ModeError::InvalidSpec("gaussian kind requires ell = p = 0"));
        }
        Ok(())
    }
}

/// A generating-expression evaluation at fixed generating parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratingEval {
    pub mu1: f64,
    pub mu2: f64,
    pub nu1: f64,
    pub nu2: f64,
    /// The summed amplitude (real for real generating parameters).
    pub value: f64,
}

/// Inputs for the two-parameter-set generating evaluations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratingParams {
    pub mu1: f64,
    pub mu2: f64,
    pub nu1: f64,
    pub nu2: f64,
    pub s1: i8,
    pub s2: i8,
    pub xi: f64,
    pub tau: f64,
    pub squeeze: f64,
    pub sign: Sign,
    /// (ℓ, p) selecting the normalisation constant N_{ℓ,p}.
    pub ell: u32,
    pub p: u32,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModeError {
    InvalidSpec(&'static str),
    /// Expansion depth below |ℓ|.
    DepthTooSmall {
        needed: u32,
        got: u32,
    },
    Truncation {
        max_terms: usize,
    },
    Precision {
        digits: u32,
    },
}

impl fmt::Display for ModeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModeError::InvalidSpec(msg) => write!(f, "invalid mode spec: {msg}"),
            ModeError::DepthTooSmall { needed, got } => {
                write!(f, "expansion depth {got} below required {needed}")
            }
            ModeError::Truncation { max_terms } => {
                write!(f, "series did not converge within {max_terms} terms")
            }
            ModeError::Precision { digits } => {
                write!(
                    f,
                    "cancellation exceeded the {digits}-digit precision budget"
                )
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ModeError {}

impl From<SumError> for ModeError {
    fn from(e: SumError) -> Self {
        match e {
            SumError::Truncation { max_terms } => ModeError::Truncation { max_terms },
            SumError::Precision { digits } => ModeError::Precision { digits },
        }
    }
}

fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Normalisation constant N_{ℓ,p} = √(2^{|ℓ|−1} p! / (π (p+|ℓ|)!)).
pub fn lg_norm(ell: u32, p: u32) -> f64 {
    let ln = (ell as f64 - 1.0) * core::f64::consts::LN_2 + ln_factorial(p)
        - core::f64::consts::PI.ln()
        - ln_factorial(p + ell);
    (0.5 * ln).exp()
}

/// Truncated-series exponential of a polynomial with zero constant term:
/// n E_n = Σ_{k=1..n} k g_k E_{n−k}.
fn exp_series(g: &[f64]) -> Vec<f64> {
    let deg = g.len() - 1;
    let mut e = vec![0.0; deg + 1];
    e[0] = 1.0;
    for n in 1..=deg {
        let mut acc = 0.0;
        for k in 1..=n {
            acc += k as f64 * g[k] * e[n - k];
        }
        e[n] = acc / n as f64;
    }
    e
}

fn binomial(top: u32, k: u32) -> f64 {
    let mut v = 1.0f64;
    for i in 1..=k {
        v *= (top - k + i) as f64 / i as f64;
    }
    v
}

/// [ν^p] of (1+ν)^{−(ℓ+1)} exp[−x(1−ν)/(1+ν)], the radial part of the
/// spectrum extraction, by truncated polynomial expansion of the two
/// exponential/binomial series.
fn radial_profile_coeff(ell: u32, p: u32, x: f64) -> f64 {
    let gauss = (-x).exp();
    if p == 0 {
        return gauss;
    }
    let deg = p as usize;
    // 2x·ν/(1+ν) = 2x Σ_{j>=1} (−1)^{j−1} ν^j
    let mut g = vec![0.0; deg + 1];
    for (j, gj) in g.iter_mut().enumerate().skip(1) {
        *gj = 2.0 * x * if j % 2 == 1 { 1.0 } else { -1.0 };
    }
    let e = exp_series(&g);
    let mut acc = 0.0;
    for j in 0..=deg {
        let b = binomial(ell + j as u32, j as u32) * if j % 2 == 1 { -1.0 } else { 1.0 };
        acc += b * e[deg - j];
    }
    acc * gauss
}

/// Angular spectrum of a single Laguerre-Gauss mode, the coefficient of
/// μ^{|ℓ|}ν^p of the generating function (times |ℓ|!). For p = 0 this is
/// the closed Gaussian × (k_x + i s k_y)^{|ℓ|} form.
pub fn lg_spectrum(spec: &ModeSpec, kx: f64, ky: f64) -> Result<Complex64, ModeError> {
    spec.validate()?;
    let s = match spec.kind {
        ModeKind::Gaussian => 1.0,
        ModeKind::LgSingle { sign } => sign as f64,
        ModeKind::LgPetal => {
            return Err(ModeError::InvalidSpec(
                "petal kind is built by petal_spectrum",
            ))
        }
    };
    let w0 = spec.w0;
    let x = w0 * w0 * (kx * kx + ky * ky) / 4.0;
    // α = i w₀ (k_x + i s k_y)/2
    let alpha = Complex64::new(-s * ky * w0 / 2.0, kx * w0 / 2.0);
    let radial = radial_profile_coeff(spec.abs_ell, spec.p, x);
    Ok(alpha.powu(spec.abs_ell) * (w0 * lg_norm(spec.abs_ell, spec.p) * radial))
}

/// Petal mode: [φ_{+ℓ} + φ_{−ℓ}]/√2 (relative phase fixed to zero, which
/// only orients the petals). ℓ = 0 degenerates to the single Gaussian
/// mode.
pub fn petal_spectrum(spec: &ModeSpec, kx: f64, ky: f64) -> Result<Complex64, ModeError> {
    spec.validate()?;
    if spec.kind != ModeKind::LgPetal {
        return Err(ModeError::InvalidSpec(
            "petal_spectrum needs the petal kind",
        ));
    }
    let single = |sign: i8| {
        lg_spectrum(
            &ModeSpec {
                kind: ModeKind::LgSingle { sign },
                ..*spec
            },
            kx,
            ky,
        )
    };
    if spec.abs_ell == 0 {
        return single(1);
    }
    Ok((single(1)? + single(-1)?) / 2.0f64.sqrt())
}

/// 2π N_{ℓ,p}² (|ℓ|!)² — the mode-extraction normalisation entering the
/// variance reconstruction (one |ℓ|! per LO factor).
fn extraction_norm(ell: u32, p: u32) -> f64 {
    let n = lg_norm(ell, p);
    let lf = ln_factorial(ell).exp();
    2.0 * core::f64::consts::PI * n * n * lf * lf
}

struct PetalGenTerms {
    x: BigFloat,
    tau: BigFloat,
    ell: u32,
    depth: u32,
    pow: BigFloat,
}

impl BigTerms for PetalGenTerms {
    fn restart(&mut self) {
        self.pow = BigFloat::one();
    }
    fn term(&mut self, n: usize, bits: u32) -> BigFloat {
        let nb = BigFloat::from_u64(n as u64);
        if n > 0 {
            self.pow = self.pow.mul(&self.x, bits).div(&nb, bits);
        }
        let d = self.tau.mul(&nb, bits).add(&BigFloat::from_u64(2));
        // coefficient ladder of exp[μ₁μ₂/D]: c_j = c_{j−1}/(D·j)
        let mut c = BigFloat::one();
        let mut kept = c.clone();
        for j in 1..=self.depth {
            c = c.div(&d.mul(&BigFloat::from_u64(j as u64), bits), bits);
            if j == self.ell {
                kept = c.clone();
            }
        }
        self.pow.div(&d, bits).mul(&kept, bits)
    }
}

/// Petal variance by generating-function coefficient extraction
/// (ξ → 0, p = 0): expand exp[μ₁μ₂/D_n] to `depth` in the product
/// μ₁μ₂, keep the |ℓ|-th coefficient, apply the 2πN²-normalisation and
/// the per-n prefactor, and sum over n.
pub fn petal_variance_via_generating(
    ell: u32,
    tau: f64,
    squeeze: f64,
    sign: Sign,
    depth: u32,
    pol: &TruncationPolicy,
) -> Result<SeriesEval, ModeError> {
    if ell > MAX_ELL {
        return Err(ModeError::InvalidSpec("ell exceeds the supported cap"));
    }
    if depth < ell {
        return Err(ModeError::DepthTooSmall {
            needed: ell,
            got: depth,
        });
    }
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(ModeError::InvalidSpec("tau must be positive"));
    }
    if !(squeeze >= 0.0 && squeeze.is_finite()) {
        return Err(ModeError::InvalidSpec("squeeze must be nonnegative"));
    }
    pol.validate()
        .map_err(|_| ModeError::InvalidSpec("invalid truncation policy"))?;
    let norm = extraction_norm(ell, 0);
    let min_terms = (3.0 * squeeze).ceil() as usize + 10;
    let out = match sign {
        Sign::Plus => {
            let mut pow = 1.0f64;
            prec::sum_f64(
                |n| {
                    let nf = n as f64;
                    if n > 0 {
                        pow *= squeeze / nf;
                    }
                    let d = nf * tau + 2.0;
                    // exp-series coefficient ladder, kept at index ell
                    let mut c = 1.0f64;
                    let mut kept = c;
                    for j in 1..=depth {
                        c /= d * j as f64;
                        if j == ell {
                            kept = c;
                        }
                    }
                    pow / d * kept
                },
                min_terms,
                pol.rel_tol,
                pol.max_terms,
            )?
        }
        Sign::Minus => {
            let mut gen = PetalGenTerms {
                x: BigFloat::from_f64(-squeeze),
                tau: BigFloat::from_f64(tau),
                ell,
                depth,
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
        value: norm * out.value,
        terms_used: out.terms_used,
        est_rel_err: out.est_rel_err,
    })
}

/// Truncated bivariate polynomial in (ν₁, ν₂), coefficients c[i][j].
#[derive(Clone)]
struct Poly2 {
    deg: usize,
    c: Vec<f64>,
}

impl Poly2 {
    fn zero(deg: usize) -> Self {
        Poly2 {
            deg,
            c: vec![0.0; (deg + 1) * (deg + 1)],
        }
    }
    fn constant(deg: usize, v: f64) -> Self {
        let mut p = Self::zero(deg);
        p.c[0] = v;
        p
    }
    fn at(&self, i: usize, j: usize) -> f64 {
        self.c[i * (self.deg + 1) + j]
    }
    fn at_mut(&mut self, i: usize, j: usize) -> &mut f64 {
        &mut self.c[i * (self.deg + 1) + j]
    }
    fn mul(&self, other: &Poly2) -> Poly2 {
        let deg = self.deg;
        let mut out = Poly2::zero(deg);
        for i1 in 0..=deg {
            for j1 in 0..=deg {
                let a = self.at(i1, j1);
                if a == 0.0 {
                    continue;
                }
                for i2 in 0..=(deg - i1) {
                    for j2 in 0..=(deg - j1) {
                        *out.at_mut(i1 + i2, j1 + j2) += a * other.at(i2, j2);
                    }
                }
            }
        }
        out
    }
    fn add_scaled(&mut self, other: &Poly2, s: f64) {
        for (c, o) in self.c.iter_mut().zip(&other.c) {
            *c += s * o;
        }
    }
}

/// [ν₁^p ν₂^p] of D^{−(ℓ+1)} with D = a(1−ν₁)(1−ν₂) + 2(1−ν₁ν₂), by a
/// binomial series in the zero-constant part of D/(a+2).
fn radial_extraction_coeff(ell: u32, p: u32, a: f64) -> f64 {
    let d0 = a + 2.0;
    let t = ell + 1;
    if p == 0 {
        return d0.powi(-(t as i32));
    }
    let deg = p as usize;
    let mut u = Poly2::zero(deg);
    *u.at_mut(1, 0) = -a / d0;
    *u.at_mut(0, 1) = -a / d0;
    *u.at_mut(1, 1) = (a - 2.0) / d0;
    let mut sum = Poly2::constant(deg, 0.0);
    let mut upow = Poly2::constant(deg, 1.0);
    for j in 0..=(2 * p) {
        let coef = if j == 0 {
            1.0
        } else {
            binomial(t - 1 + j, j) * if j % 2 == 1 { -1.0 } else { 1.0 }
        };
        sum.add_scaled(&upow, coef);
        if j < 2 * p {
            upow = upow.mul(&u);
        }
    }
    sum.at(p as usize, p as usize) * d0.powi(-(t as i32))
}

/// Petal variance retaining the radial generating parameters: the
/// ν-expansion path for p ≥ 0 (ξ → 0). Experimental surface; p = 0
/// reproduces `petal_variance_via_generating`. Summed in compensated
/// f64, so large Ξ on the minus side carries the reported cancellation
/// estimate.
pub fn petal_variance_with_radial(
    ell: u32,
    p: u32,
    tau: f64,
    squeeze: f64,
    sign: Sign,
    pol: &TruncationPolicy,
) -> Result<SeriesEval, ModeError> {
    if ell > MAX_ELL {
        return Err(ModeError::InvalidSpec("ell exceeds the supported cap"));
    }
    if p > MAX_RADIAL {
        return Err(ModeError::InvalidSpec("p exceeds the supported cap"));
    }
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(ModeError::InvalidSpec("tau must be positive"));
    }
    if !(squeeze >= 0.0 && squeeze.is_finite()) {
        return Err(ModeError::InvalidSpec("squeeze must be nonnegative"));
    }
    pol.validate()
        .map_err(|_| ModeError::InvalidSpec("invalid truncation policy"))?;
    let n2 = lg_norm(ell, p);
    let norm = 2.0 * core::f64::consts::PI * n2 * n2 * ln_factorial(ell).exp();
    let x = sign.factor() * squeeze;
    let min_terms = (3.0 * squeeze).ceil() as usize + 10;
    let mut pow = 1.0f64;
    let out = prec::sum_f64(
        |n| {
            let nf = n as f64;
            if n > 0 {
                pow *= x / nf;
            }
            pow * radial_extraction_coeff(ell, p, nf * tau)
        },
        min_terms,
        pol.rel_tol,
        pol.max_terms,
    )?;
    Ok(SeriesEval {
        value: norm * out.value,
        terms_used: out.terms_used,
        est_rel_err: out.est_rel_err,
    })
}

/// Variance seen through a single LG mode with |ℓ| ≥ 1: the odd
/// (squeezing) sum is suppressed entirely, leaving
/// σ₊² = σ₋² = Σ_m Ξ^{2m} 2^{|ℓ|} / [(2mτ+2)^{|ℓ|+1} (2m)!].
pub fn single_lg_variance(
    ell: u32,
    tau: f64,
    squeeze: f64,
    pol: &TruncationPolicy,
) -> Result<(f64, f64), ModeError> {
    if ell < 1 {
        return Err(ModeError::InvalidSpec("single-LG selection needs ell >= 1"));
    }
    if ell > MAX_ELL {
        return Err(ModeError::InvalidSpec("ell exceeds the supported cap"));
    }
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(ModeError::InvalidSpec("tau must be positive"));
    }
    if !(squeeze >= 0.0 && squeeze.is_finite()) {
        return Err(ModeError::InvalidSpec("squeeze must be nonnegative"));
    }
    pol.validate()
        .map_err(|_| ModeError::InvalidSpec("invalid truncation policy"))?;
    let scale = 2.0f64.powi(ell as i32);
    let mut pow = 1.0f64;
    let min_terms = (1.5 * squeeze).ceil() as usize + 8;
    let out = prec::sum_f64(
        |m| {
            let mf = m as f64;
            if m > 0 {
                pow *= squeeze * squeeze / ((2.0 * mf - 1.0) * 2.0 * mf);
            }
            pow * scale / (2.0 * mf * tau + 2.0).powi(ell as i32 + 1)
        },
        min_terms,
        pol.rel_tol,
        pol.max_terms,
    )?;
    Ok((out.value, out.value))
}

fn check_generating(params: &GeneratingParams) -> Result<(), ModeError> {
    for nu in [params.nu1, params.nu2] {
        if nu.abs() >= 1.0 || nu.is_nan() {
            return Err(ModeError::InvalidSpec("|nu| must be below 1"));
        }
    }
    for s in [params.s1, params.s2] {
        if s != 1 && s != -1 {
            return Err(ModeError::InvalidSpec("signs must be +1 or -1"));
        }
    }
    if !(params.tau >= 0.0 && params.xi >= 0.0 && params.squeeze >= 0.0) {
        return Err(ModeError::InvalidSpec(
            "xi, tau, squeeze must be nonnegative",
        ));
    }
    if params.ell > MAX_ELL || params.p > MAX_RADIAL {
        return Err(ModeError::InvalidSpec("ell or p exceeds the supported cap"));
    }
    Ok(())
}

/// The two-sign generating expression before petal superposition: even
/// terms carry exp[μ₁μ₂(1+s₁s₂)/(2d_e)], odd terms (weighted by the
/// extremal sign) carry exp[μ₁μ₂(1−s₁s₂)/(2d_o)]. With s₁ = s₂ the odd
/// part loses all μ-dependence, which is the single-LG no-squeezing
/// selection rule.
pub fn generating_eval(params: &GeneratingParams) -> Result<GeneratingEval, ModeError> {
    check_generating(params)?;
    let g = params;
    let pref = 2.0 * core::f64::consts::PI * lg_norm(g.ell, g.p);
    let geo = (1.0 - g.nu1) * (1.0 - g.nu2) * g.tau;
    let base = 2.0 * (1.0 - g.nu1 * g.nu2);
    let ss = (g.s1 * g.s2) as f64;
    let mm = g.mu1 * g.mu2;
    let sgn = g.sign.factor();
    let mut even_pow = 1.0f64; // Ξ^{2m}/(2m)!
    let out = prec::sum_f64(
        |m| {
            let mf = m as f64;
            if m > 0 {
                even_pow *= g.squeeze * g.squeeze / ((2.0 * mf - 1.0) * (2.0 * mf));
            }
            let de = 2.0 * mf * geo + base;
            let dodd = (2.0 * mf + 1.0) * geo + base;
            let even =
                even_pow * (1.0 + mf * g.xi).powf(-0.5) / de * (mm * (1.0 + ss) / (2.0 * de)).exp();
            let odd_pow = even_pow * g.squeeze / (2.0 * mf + 1.0);
            let odd = odd_pow * (1.0 + 0.5 * (2.0 * mf + 1.0) * g.xi).powf(-0.5) / dodd
                * (mm * (1.0 - ss) / (2.0 * dodd)).exp();
            pref * (even + sgn * odd)
        },
        (1.5 * g.squeeze).ceil() as usize + 8,
        1e-15,
        2000,
    )?;
    Ok(GeneratingEval {
        mu1: g.mu1,
        mu2: g.mu2,
        nu1: g.nu1,
        nu2: g.nu2,
        value: out.value,
    })
}

/// The petal-superposed generating expression: a single sum over all
/// Magnus orders with denominator D_n = n(1−ν₁)(1−ν₂)τ + 2(1−ν₁ν₂).
pub fn petal_generating_eval(params: &GeneratingParams) -> Result<GeneratingEval, ModeError> {
    check_generating(params)?;
    let g = params;
    let pref = 2.0 * core::f64::consts::PI * lg_norm(g.ell, g.p);
    let geo = (1.0 - g.nu1) * (1.0 - g.nu2) * g.tau;
    let base = 2.0 * (1.0 - g.nu1 * g.nu2);
    let mm = g.mu1 * g.mu2;
    let x = g.sign.factor() * g.squeeze;
    let mut pow = 1.0f64;
    let out = prec::sum_f64(
        |n| {
            let nf = n as f64;
            if n > 0 {
                pow *= x / nf;
            }
            let d = nf * geo + base;
            pref * pow * (1.0 + 0.5 * nf * g.xi).powf(-0.5) / d * (mm / d).exp()
        },
        (3.0 * g.squeeze).ceil() as usize + 10,
        1e-15,
        2000,
    )?;
    Ok(GeneratingEval {
        mu1: g.mu1,
        mu2: g.mu2,
        nu1: g.nu1,
        nu2: g.nu2,
        value: out.value,
    })
}
