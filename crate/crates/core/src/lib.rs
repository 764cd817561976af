//! Numerical core for predicting homodyne squeezing measurements on
//! spatiotemporally multimode squeezed vacuum from parametric
//! down-conversion (thin-crystal, semi-classical model).
//!
//! The crate is organised around the dimensionless parameter triple
//! (ξ, τ, Ξ) plus the local-oscillator phase θ:
//!
//! * [`params`] maps lab-frame experiment parameters to (ξ, τ, Ξ),
//! * [`series`] evaluates the quadrature variance σ_q² in every
//!   parameter regime with cancellation-safe summation,
//! * [`hypergeom`] provides the confluent ₁F₁ and the repeated-parameter
//!   ₜFₜ closed forms,
//! * [`quad`] carries the Gauss-Hermite rule backing the τ = 0
//!   ensemble-average integral,
//! * [`kernel`] verifies the iterated-kernel broadening laws and the
//!   per-term overlap factors on discretised grids,
//! * [`modes`] builds Laguerre-Gauss angular spectra and petal modes from
//!   their generating function and re-derives the petal variance through
//!   coefficient extraction.
//!
//! `no_std` builds (with `alloc`) are supported by disabling the default
//! `std` feature and enabling `libm`.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod hypergeom;
pub mod kernel;
pub mod modes;
pub mod params;
pub(crate) mod prec;
pub mod quad;
pub mod series;

/// Which of the two extremal quadrature orientations to evaluate,
/// i.e. the sign selected by sin(2θ) = ±1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    /// Anti-squeezed direction, sin(2θ) = +1.
    Plus,
    /// Squeezed direction, sin(2θ) = −1.
    Minus,
}

impl Sign {
    /// The ±1 factor applied to the series argument.
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Value of a truncated series evaluation together with its
/// truncation/precision diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesEval {
    /// The converged sum.
    pub value: f64,
    /// Number of terms consumed before the stopping rule fired.
    pub terms_used: usize,
    /// (last retained term magnitude + cancellation estimate) / |sum|.
    pub est_rel_err: f64,
}
