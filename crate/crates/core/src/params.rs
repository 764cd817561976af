//! Lab-frame experiment parameters and their reduction to the
//! dimensionless triple (ξ, τ, Ξ) that fully determines the prediction.
//!
//! Conventions: SI units throughout; the down-converted beams are
//! evaluated at the degenerate frequency ω_d = ω_p/2, and the signal-arm
//! refractive indices both equal `index_degenerate` there. Dispersion is
//! not modelled: indices are direct user inputs.

use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Fraction of the pump Rayleigh criterion above which the thin-crystal
/// assumption is reported as weakening. Advisory only, never blocking.
pub const THIN_CRYSTAL_ADVISORY: f64 = 0.1;

/// Physical experiment parameters, SI units.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalConfig {
    /// Pump beam waist radius w_p (m).
    pub pump_waist: f64,
    /// Local-oscillator beam waist radius w_0, imaged to the crystal plane (m).
    pub lo_waist: f64,
    /// Pump spectral bandwidth δω_p (rad/s).
    pub pump_bandwidth: f64,
    /// Local-oscillator spectral bandwidth δω_d (rad/s).
    pub lo_bandwidth: f64,
    /// Pump centre wavelength λ_p (m).
    pub pump_wavelength: f64,
    /// Nonlinear crystal length L (m). Zero is legal and gives Ξ = 0.
    pub crystal_length: f64,
    /// Magnitude of the pump coherent-state parameter |ζ₀| (dimensionless).
    pub pump_amplitude: f64,
    /// Down-conversion cross-section σ_ooe (m²).
    pub nonlinear_cross_section: f64,
    /// Effective refractive index at the pump frequency n_p.
    pub index_pump: f64,
    /// Ordinary refractive index at the degenerate frequency n_d.
    pub index_degenerate: f64,
}

/// The dimensionless parameters driving every variance formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedParams {
    /// ξ = δω_p²/δω_d², squared pump-to-LO bandwidth ratio.
    pub xi: f64,
    /// τ = n_p²w_0²/(n_d²w_p²), index-weighted squared waist ratio.
    pub tau: f64,
    /// Ξ, the down-conversion efficiency and squeezing parameter.
    pub squeeze: f64,
    /// Local-oscillator phase θ, stored reduced to [0, 2π).
    pub theta: f64,
}

/// Thin-crystal assumption margin r = 2cL/(w_p²ω_p).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThinCrystalMargin {
    /// The ratio of crystal length to the pump Rayleigh-range criterion.
    pub ratio: f64,
    /// True when `ratio >= THIN_CRYSTAL_ADVISORY`.
    pub weak: bool,
}

/// Validation failure naming the offending field.
#[derive(Debug, Clone, PartialEq)]
pub enum ParamError {
    /// A field that must be strictly positive is not.
    NonPositive { field: &'static str, value: f64 },
    /// A field that must be nonnegative is not.
    Negative { field: &'static str, value: f64 },
    /// A refractive index below unity.
    IndexBelowUnity { field: &'static str, value: f64 },
    /// A non-finite input.
    NotFinite { field: &'static str },
    /// Derived fractional bandwidth δ_p = δω_p/ω_p outside (0, 1).
    FractionalBandwidth { value: f64 },
}

impl fmt::Display for ParamError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamError::NonPositive { field, value } => {
                write!(f, "{field} must be strictly positive (got {value})")
            }
            ParamError::Negative { field, value } => {
                write!(f, "{field} must be nonnegative (got {value})")
            }
            ParamError::IndexBelowUnity { field, value } => {
                write!(f, "{field} must be >= 1 (got {value})")
            }
            ParamError::NotFinite { field } => write!(f, "{field} must be finite"),
            ParamError::FractionalBandwidth { value } => write!(
                f,
                "fractional bandwidth delta_p = pump_bandwidth/omega_p must lie in (0, 1) (got {value})"
            ),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ParamError {}

fn check_finite(field: &'static str, value: f64) -> Result<(), ParamError> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(ParamError::NotFinite { field })
    }
}

fn check_positive(field: &'static str, value: f64) -> Result<(), ParamError> {
    check_finite(field, value)?;
    if value > 0.0 {
        Ok(())
    } else {
        Err(ParamError::NonPositive { field, value })
    }
}

impl PhysicalConfig {
    /// Validate every field against the model assumptions.
    pub fn validate(&self) -> Result<(), ParamError> {
        check_positive("pump_waist", self.pump_waist)?;
        check_positive("lo_waist", self.lo_waist)?;
        check_positive("pump_bandwidth", self.pump_bandwidth)?;
        check_positive("lo_bandwidth", self.lo_bandwidth)?;
        check_positive("pump_wavelength", self.pump_wavelength)?;
        // L = 0 is legal (Xi vanishes linearly with it)
        check_finite("crystal_length", self.crystal_length)?;
        if self.crystal_length < 0.0 {
            return Err(ParamError::Negative {
                field: "crystal_length",
                value: self.crystal_length,
            });
        }
        check_positive("pump_amplitude", self.pump_amplitude)?;
        check_positive("nonlinear_cross_section", self.nonlinear_cross_section)?;
        for (field, value) in [
            ("index_pump", self.index_pump),
            ("index_degenerate", self.index_degenerate),
        ] {
            check_finite(field, value)?;
            if value < 1.0 {
                return Err(ParamError::IndexBelowUnity { field, value });
            }
        }
        let dp = self.fractional_bandwidth();
        if !(dp > 0.0 && dp < 1.0) {
            return Err(ParamError::FractionalBandwidth { value: dp });
        }
        Ok(())
    }

    /// Pump angular frequency ω_p = 2πc/λ_p (rad/s).
    pub fn pump_angular_frequency(&self) -> f64 {
        2.0 * core::f64::consts::PI * SPEED_OF_LIGHT / self.pump_wavelength
    }

    /// Degenerate down-conversion frequency ω_d = ω_p/2 (rad/s).
    pub fn degenerate_angular_frequency(&self) -> f64 {
        0.5 * self.pump_angular_frequency()
    }

    /// Fractional pump bandwidth δ_p = δω_p/ω_p = δλ_p/λ_p.
    pub fn fractional_bandwidth(&self) -> f64 {
        self.pump_bandwidth / self.pump_angular_frequency()
    }
}

impl ReducedParams {
    /// Build a reduced-parameter set directly, bypassing the physical
    /// mapping. θ is reduced to [0, 2π).
    pub fn new(xi: f64, tau: f64, squeeze: f64, theta: f64) -> Result<Self, ParamError> {
        for (field, value) in [("xi", xi), ("tau", tau), ("squeeze", squeeze)] {
            check_finite(field, value)?;
            if value < 0.0 {
                return Err(ParamError::Negative { field, value });
            }
        }
        check_finite("theta", theta)?;
        Ok(ReducedParams {
            xi,
            tau,
            squeeze,
            theta: wrap_angle(theta),
        })
    }
}

fn wrap_angle(theta: f64) -> f64 {
    let tau = 2.0 * core::f64::consts::PI;
    let mut t = theta % tau;
    if t < 0.0 {
        t += tau;
    }
    // theta % tau can return exactly tau after the negative adjustment
    if t >= tau {
        t = 0.0;
    }
    t
}

/// Map physical parameters to (ξ, τ, Ξ) at the requested LO phase.
///
/// ξ = δω_p²/δω_d², τ = n_p²w_0²/(n_d²w_p²) and
/// Ξ = 2^{7/2}π^{5/4} L|ζ₀|σ_ooe √δ_p / (w_p n_d² λ_p²).
pub fn reduce(cfg: &PhysicalConfig, theta: f64) -> Result<ReducedParams, ParamError> {
    cfg.validate()?;
    check_finite("theta", theta)?;
    let ratio_bw = cfg.pump_bandwidth / cfg.lo_bandwidth;
    let xi = ratio_bw * ratio_bw;
    let ratio_w = (cfg.index_pump * cfg.lo_waist) / (cfg.index_degenerate * cfg.pump_waist);
    let tau = ratio_w * ratio_w;
    let delta_p = cfg.fractional_bandwidth();
    let nd2 = cfg.index_degenerate * cfg.index_degenerate;
    let lam2 = cfg.pump_wavelength * cfg.pump_wavelength;
    let squeeze = 2.0f64.powf(3.5)
        * core::f64::consts::PI.powf(1.25)
        * cfg.crystal_length
        * cfg.pump_amplitude
        * cfg.nonlinear_cross_section
        * delta_p.sqrt()
        / (cfg.pump_waist * nd2 * lam2);
    Ok(ReducedParams {
        xi,
        tau,
        squeeze,
        theta: wrap_angle(theta),
    })
}

/// Ratio of crystal length to the pump Rayleigh-range criterion,
/// r = 2cL/(w_p²ω_p), with the advisory flag at r ≥ 0.1.
pub fn thin_crystal_margin(cfg: &PhysicalConfig) -> Result<ThinCrystalMargin, ParamError> {
    cfg.validate()?;
    let ratio = 2.0 * SPEED_OF_LIGHT * cfg.crystal_length
        / (cfg.pump_waist * cfg.pump_waist * cfg.pump_angular_frequency());
    Ok(ThinCrystalMargin {
        ratio,
        weak: ratio >= THIN_CRYSTAL_ADVISORY,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Reference configuration used across the test suite.
    pub(crate) fn reference_config() -> PhysicalConfig {
        PhysicalConfig {
            pump_waist: 1.0e-3,
            lo_waist: 1.0e-4,
            pump_bandwidth: 1.0e11,
            lo_bandwidth: 1.0e12,
            pump_wavelength: 4.0e-7,
            crystal_length: 1.0e-3,
            pump_amplitude: 2.5e6,
            nonlinear_cross_section: 1.2e-23,
            index_pump: 1.6,
            index_degenerate: 1.6,
        }
    }

    #[test]
    fn ratio_symmetry_gives_unit_xi_tau() {
        let mut cfg = reference_config();
        cfg.lo_waist = cfg.pump_waist;
        cfg.lo_bandwidth = cfg.pump_bandwidth;
        let rp = reduce(&cfg, 0.0).unwrap();
        assert_eq!(rp.xi, 1.0);
        assert_eq!(rp.tau, 1.0);
    }

    #[test]
    fn zero_length_gives_zero_squeeze() {
        let mut cfg = reference_config();
        cfg.crystal_length = 0.0;
        let rp = reduce(&cfg, 0.0).unwrap();
        assert_eq!(rp.squeeze, 0.0);
    }

    #[test]
    fn reference_reduction_cross_checked() {
        let cfg = reference_config();
        let rp = reduce(&cfg, 0.0).unwrap();
        assert_relative_eq!(rp.tau, 0.01, max_relative = 1e-14);
        assert_relative_eq!(rp.xi, 0.01, max_relative = 1e-14);

        // independent spreadsheet-style evaluation, factor by factor
        let c = 299_792_458.0f64;
        let omega_p = 2.0 * core::f64::consts::PI * c / 4.0e-7;
        let delta_p = 1.0e11 / omega_p;
        let prefactor = 8.0 * core::f64::consts::SQRT_2; // 2^{7/2}
        let pi54 = core::f64::consts::PI.powf(1.25);
        let numerator = prefactor * pi54 * 1.0e-3 * 2.5e6 * 1.2e-23 * delta_p.sqrt();
        let denominator = 1.0e-3 * 1.6f64.powi(2) * (4.0e-7f64).powi(2);
        let expected = numerator / denominator;
        assert_relative_eq!(rp.squeeze, expected, max_relative = 1e-12);
        assert!(rp.squeeze > 0.0);
    }

    #[test]
    fn margin_reference_hand_evaluated() {
        let cfg = reference_config();
        let m = thin_crystal_margin(&cfg).unwrap();
        let omega_p = 2.0 * core::f64::consts::PI * 299_792_458.0 / 4.0e-7;
        let expected = 2.0 * 299_792_458.0 * 1.0e-3 / (1.0e-6 * omega_p);
        assert_relative_eq!(m.ratio, expected, max_relative = 1e-14);
        assert!(!m.weak);
    }

    #[test]
    fn margin_zero_length() {
        let mut cfg = reference_config();
        cfg.crystal_length = 0.0;
        let m = thin_crystal_margin(&cfg).unwrap();
        assert_eq!(m.ratio, 0.0);
        assert!(!m.weak);
    }

    #[test]
    fn margin_flag_near_threshold() {
        // Rayleigh criterion exactly ten crystal lengths: r = 0.1.
        let mut cfg = reference_config();
        let omega_p = cfg.pump_angular_frequency();
        let r_target = cfg.pump_waist * cfg.pump_waist * omega_p / (2.0 * SPEED_OF_LIGHT);
        cfg.crystal_length = r_target * 0.100_000_01;
        assert!(thin_crystal_margin(&cfg).unwrap().weak);
        cfg.crystal_length = r_target * 0.099_999_99;
        assert!(!thin_crystal_margin(&cfg).unwrap().weak);
    }

    #[test]
    fn validation_names_offending_field() {
        let mut cfg = reference_config();
        cfg.lo_waist = 0.0;
        let err = reduce(&cfg, 0.0).unwrap_err();
        assert_eq!(
            err,
            ParamError::NonPositive {
                field: "lo_waist",
                value: 0.0
            }
        );
        let mut cfg = reference_config();
        cfg.index_pump = 0.9;
        assert!(matches!(
            cfg.validate().unwrap_err(),
            ParamError::IndexBelowUnity {
                field: "index_pump",
                ..
            }
        ));
        let mut cfg = reference_config();
        cfg.pump_bandwidth = cfg.pump_angular_frequency() * 2.0;
        assert!(matches!(
            cfg.validate().unwrap_err(),
            ParamError::FractionalBandwidth { .. }
        ));
    }

    #[test]
    fn non_finite_inputs_rejected() {
        let mut cfg = reference_config();
        cfg.pump_waist = f64::NAN;
        assert!(matches!(
            cfg.validate().unwrap_err(),
            ParamError::NotFinite {
                field: "pump_waist"
            }
        ));
        assert!(ReducedParams::new(f64::INFINITY, 0.0, 1.0, 0.0).is_err());
        assert!(ReducedParams::new(0.0, 0.0, 1.0, f64::NAN).is_err());
        assert!(ReducedParams::new(-0.5, 0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn theta_wrapping() {
        let rp = ReducedParams::new(0.0, 0.0, 1.0, -core::f64::consts::PI).unwrap();
        assert!((rp.theta - core::f64::consts::PI).abs() < 1e-15);
        let rp = ReducedParams::new(0.0, 0.0, 1.0, 7.0 * core::f64::consts::PI).unwrap();
        assert!((rp.theta - core::f64::consts::PI).abs() < 1e-12);
        let rp = ReducedParams::new(0.0, 0.0, 1.0, 0.0).unwrap();
        assert_eq!(rp.theta, 0.0);
    }

    #[test]
    fn scale_consistency() {
        // scaling both waists leaves tau unchanged and scales Xi by 1/s
        let cfg = reference_config();
        let base = reduce(&cfg, 0.0).unwrap();
        let mut scaled = cfg.clone();
        scaled.pump_waist *= 2.0;
        scaled.lo_waist *= 2.0;
        let rp = reduce(&scaled, 0.0).unwrap();
        assert_relative_eq!(rp.tau, base.tau, max_relative = 1e-14);
        assert_relative_eq!(rp.squeeze, base.squeeze / 2.0, max_relative = 1e-14);
    }

    #[test]
    fn squeeze_linear_in_drive_terms() {
        let cfg = reference_config();
        let base = reduce(&cfg, 0.0).unwrap().squeeze;
        for (scale, field) in [(3.0, "L"), (5.0, "amp"), (7.0, "sigma")] {
            let mut c = cfg.clone();
            match field {
                "L" => c.crystal_length *= scale,
                "amp" => c.pump_amplitude *= scale,
                _ => c.nonlinear_cross_section *= scale,
            }
            let s = reduce(&c, 0.0).unwrap().squeeze;
            assert_relative_eq!(s, base * scale, max_relative = 1e-12);
        }
        // sqrt dependence on pump bandwidth through delta_p
        let mut c = cfg.clone();
        c.pump_bandwidth *= 4.0;
        let s = reduce(&c, 0.0).unwrap().squeeze;
        assert_relative_eq!(s, base * 2.0, max_relative = 1e-12);
    }

    #[test]
    fn reduce_is_pure() {
        let cfg = reference_config();
        let a = reduce(&cfg, 1.25).unwrap();
        let b = reduce(&cfg, 1.25).unwrap();
        assert_eq!(a, b);
    }
}
