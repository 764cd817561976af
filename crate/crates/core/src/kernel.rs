//! Grid-based verification of the iterated-kernel broadening laws and of
//! the per-term LO overlap factors entering the variance series.
//!
//! Every in-scope kernel factorizes into independent 1D Gaussians in the
//! (x, y, ω) sum/difference coordinates, so the oracle works on 1D grids:
//! the base kernel is sampled, ⋄-powers are built by repeated discretised
//! contraction, and profile widths / LO overlaps are measured from the
//! grids and compared against the closed factors. Dimensionless units
//! throughout; the 1/ω measure factor is frozen at the degenerate
//! frequency and absorbed into the discretisation weight.

use crate::params::PhysicalConfig;
use crate::prec::KahanSum;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

/// Uniform symmetric 1D grid over [−half_width, half_width].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1d {
    pub half_width: f64,
    pub len: usize,
}

impl Grid1d {
    pub fn new(half_width: f64, len: usize) -> Result<Self, KernelError> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(KernelError::InvalidInput("half_width must be positive"));
        }
        if len < 8 {
            return Err(KernelError::InvalidInput("grid needs at least 8 points"));
        }
        Ok(Grid1d { half_width, len })
    }

    pub fn step(&self) -> f64 {
        2.0 * self.half_width / (self.len - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        -self.half_width + self.step() * i as f64
    }

    /// The discretisation weight standing in for the contraction measure
    /// restricted to one coordinate (the grid step; endpoints carry half
    /// of it, see [`Grid1d::weights`]).
    pub fn measure_weight(&self) -> f64 {
        self.step()
    }

    /// Trapezoid quadrature weights built from the measure weight.
    pub fn weights(&self) -> Vec<f64> {
        let h = self.measure_weight();
        let mut w = vec![h; self.len];
        w[0] = 0.5 * h;
        w[self.len - 1] = 0.5 * h;
        w
    }

    /// Sample a function of the grid coordinate.
    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..self.len).map(|i| f(self.point(i))).collect()
    }
}

/// A kernel K(x₁, x₂) sampled on a square grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledKernel {
    pub grid: Grid1d,
    /// Row-major values, index [i * len + j] = K(x_i, x_j).
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelError {
    /// Operands live on different grids.
    GridMismatch,
    /// Requested power below 1.
    InvalidOrder {
        order: usize,
    },
    /// Profile has no positive peak.
    NonPositiveProfile,
    /// Profile is flat (or otherwise unusable) within tolerance.
    DegenerateProfile,
    /// Coarse and refined grids disagree beyond tolerance.
    GridResolution {
        coarse: f64,
        fine: f64,
    },
    InvalidInput(&'static str),
}

impl fmt::Display for KernelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelError::GridMismatch => write!(f, "kernel grids do not match"),
            KernelError::InvalidOrder { order } => write!(f, "invalid kernel power {order}"),
            KernelError::NonPositiveProfile => write!(f, "profile has no positive peak"),
            KernelError::DegenerateProfile => write!(f, "profile is degenerate"),
            KernelError::GridResolution { coarse, fine } => write!(
                f,
                "grid-resolution error: coarse {coarse} vs refined {fine}"
            ),
            KernelError::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for KernelError {}

impl SampledKernel {
    pub fn from_fn(grid: Grid1d, f: impl Fn(f64, f64) -> f64) -> Self {
        let n = grid.len;
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            let xi = grid.point(i);
            for j in 0..n {
                values[i * n + j] = f(xi, grid.point(j));
            }
        }
        SampledKernel { grid, values }
    }

    /// Discrete identity of the ⋄-contraction: diag(1/w_i).
    pub fn identity(grid: Grid1d) -> Self {
        let n = grid.len;
        let w = grid.weights();
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            values[i * n + i] = 1.0 / w[i];
        }
        SampledKernel { grid, values }
    }

    pub fn peak(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, &v| m.max(v.abs()))
    }

    /// Boundary decay of the centre profile relative to its peak. The
    /// sampled kernels are ridges along one diagonal, so containment is
    /// judged on the 1D factor they verify, not on the grid corners.
    pub fn boundary_ratio(&self) -> f64 {
        let p = self.center_profile();
        let peak = p.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
        p[0].abs().max(p[self.grid.len - 1].abs()) / peak.max(f64::MIN_POSITIVE)
    }

    /// Largest asymmetry |K(x₁,x₂) − K(x₂,x₁)| relative to the peak.
    pub fn asymmetry(&self) -> f64 {
        let n = self.grid.len;
        let mut a = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                a = a.max((self.values[i * n + j] - self.values[j * n + i]).abs());
            }
        }
        a / self.peak().max(f64::MIN_POSITIVE)
    }

    /// ⋄-contraction: C(x₁, x₂) = Σ_k A(x₁, x_k) B(x_k, x₂) w_k.
    pub fn contract(&self, other: &SampledKernel) -> Result<SampledKernel, KernelError> {
        if self.grid != other.grid {
            return Err(KernelError::GridMismatch);
        }
        let n = self.grid.len;
        let w = self.grid.weights();
        let mut out = vec![0.0f64; n * n];
        for i in 0..n {
            let arow = &self.values[i * n..(i + 1) * n];
            let orow = &mut out[i * n..(i + 1) * n];
            for k in 0..n {
                let aw = arow[k] * w[k];
                if aw != 0.0 {
                    let brow = &other.values[k * n..(k + 1) * n];
                    for (o, &b) in orow.iter_mut().zip(brow) {
                        *o += aw * b;
                    }
                }
            }
        }
        Ok(SampledKernel {
            grid: self.grid,
            values: out,
        })
    }

    /// m-fold ⋄-power by repeated contraction.
    pub fn iterated_power(&self, m: usize) -> Result<SampledKernel, KernelError> {
        if m < 1 {
            return Err(KernelError::InvalidOrder { order: m });
        }
        let mut p = self.clone();
        for _ in 1..m {
            p = p.contract(self)?;
        }
        Ok(p)
    }

    /// The slice K(x, x_c) through the grid centre, a 1D profile of the
    /// sum/difference coordinate for the factorized Gaussian kernels.
    pub fn center_profile(&self) -> Vec<f64> {
        let n = self.grid.len;
        let c = n / 2;
        (0..n).map(|i| self.values[i * n + c]).collect()
    }
}

/// Weighted bilinear form Σ_ij u_i w_i K(x_i, x_j) w_j v_j.
pub fn bilinear(k: &SampledKernel, u: &[f64], v: &[f64]) -> Result<f64, KernelError> {
    let n = k.grid.len;
    if u.len() != n || v.len() != n {
        return Err(KernelError::GridMismatch);
    }
    let w = k.grid.weights();
    let mut acc = KahanSum::new();
    for i in 0..n {
        let uw = u[i] * w[i];
        if uw == 0.0 {
            continue;
        }
        let row = &k.values[i * n..(i + 1) * n];
        let mut inner = 0.0f64;
        for j in 0..n {
            inner += row[j] * w[j] * v[j];
        }
        acc.add(uw * inner);
    }
    Ok(acc.value())
}

/// Solve the 3x3 normal equations of a least-squares quadratic fit.
fn quadratic_fit(xs: &[f64], ys: &[f64]) -> Option<(f64, f64, f64)> {
    let mut s = [0.0f64; 5];
    let mut b = [0.0f64; 3];
    for (&x, &y) in xs.iter().zip(ys) {
        let x2 = x * x;
        s[0] += 1.0;
        s[1] += x;
        s[2] += x2;
        s[3] += x2 * x;
        s[4] += x2 * x2;
        b[0] += y;
        b[1] += y * x;
        b[2] += y * x2;
    }
    let m = [[s[0], s[1], s[2]], [s[1], s[2], s[3]], [s[2], s[3], s[4]]];
    let det = |m: &[[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(&m);
    if d == 0.0 {
        return None;
    }
    let mut cols = [0.0f64; 3];
    for c in 0..3 {
        let mut mc = m;
        for r in 0..3 {
            mc[r][c] = b[r];
        }
        cols[c] = det(&mc) / d;
    }
    Some((cols[0], cols[1], cols[2]))
}

/// Gaussian width of a positive unimodal profile, from the second-moment
/// integral, falling back to a log-parabola fit near the peak when the
/// tails are truncated by the grid.
pub fn fit_gaussian_width(grid: &Grid1d, profile: &[f64]) -> Result<f64, KernelError> {
    if profile.len() != grid.len {
        return Err(KernelError::GridMismatch);
    }
    let peak = profile.iter().fold(f64::MIN, |m, &v| m.max(v));
    if peak <= 0.0 || peak.is_nan() {
        return Err(KernelError::NonPositiveProfile);
    }
    let min = profile.iter().fold(f64::MAX, |m, &v| m.min(v));
    if min < -1e-9 * peak {
        return Err(KernelError::NonPositiveProfile);
    }
    if peak - min <= 1e-12 * peak {
        return Err(KernelError::DegenerateProfile);
    }
    let boundary = profile[0].abs().max(profile[grid.len - 1].abs());
    if boundary > 1e-6 * peak {
        // truncated tails: log-parabola fit on points above peak*e^{-2}
        let thresh = peak * (-2.0f64).exp();
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for (i, &v) in profile.iter().enumerate() {
            if v >= thresh {
                xs.push(grid.point(i));
                ys.push(v.ln());
            }
        }
        if xs.len() < 5 {
            return Err(KernelError::DegenerateProfile);
        }
        let (_, _, c) = quadratic_fit(&xs, &ys).ok_or(KernelError::DegenerateProfile)?;
        if c >= 0.0 {
            return Err(KernelError::DegenerateProfile);
        }
        return Ok((-1.0 / (2.0 * c)).sqrt());
    }
    let w = grid.weights();
    let mut norm = KahanSum::new();
    let mut first = KahanSum::new();
    for (i, &v) in profile.iter().enumerate() {
        norm.add(v * w[i]);
        first.add(grid.point(i) * v * w[i]);
    }
    let mu = first.value() / norm.value();
    let mut second = KahanSum::new();
    for (i, &v) in profile.iter().enumerate() {
        let d = grid.point(i) - mu;
        second.add(d * d * v * w[i]);
    }
    Ok((second.value() / norm.value()).sqrt())
}

/// Which 1D factor of the full kernel is being verified.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sector {
    /// One transverse coordinate; base profile width √2 in the
    /// dimensionless variable κ = k·w_p n_d/n_p.
    Transverse,
    /// The frequency coordinate; base profile width 1 in the
    /// dimensionless variable Ω = (ω − ω_d)/δω_p.
    Spectral,
}

impl Sector {
    /// Profile width of the order-1 kernel.
    pub fn base_sigma(self) -> f64 {
        match self {
            Sector::Transverse => 2.0f64.sqrt(),
            Sector::Spectral => 1.0,
        }
    }

    fn base_kernel(self, grid: Grid1d) -> SampledKernel {
        let q = match self {
            Sector::Transverse => 0.25,
            Sector::Spectral => 0.5,
        };
        SampledKernel::from_fn(grid, |x1, x2| (-q * (x1 + x2) * (x1 + x2)).exp())
    }
}

/// Measured vs predicted width of an iterated kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BroadeningReport {
    pub sector: Sector,
    /// Contraction order m (odd orders: sum coordinate; even: difference).
    pub order: usize,
    pub fitted_width: f64,
    /// base width × √m.
    pub predicted_width: f64,
    pub rel_dev: f64,
}

/// Iterated ⋄-powers of a sector's base kernel on one grid.
#[derive(Debug, Clone)]
pub struct KernelOracle {
    pub sector: Sector,
    pub grid: Grid1d,
    powers: Vec<SampledKernel>,
}

/// Grid sized so that kernel and LO tails fall below 1e−10 of peak:
/// half-width 8× the largest width present.
pub fn oracle_grid(
    sector: Sector,
    max_order: usize,
    tau_min: Option<f64>,
    len: usize,
) -> Result<Grid1d, KernelError> {
    if max_order < 1 {
        return Err(KernelError::InvalidOrder { order: max_order });
    }
    let kernel_sigma = sector.base_sigma() * (max_order as f64).sqrt();
    let lo_sigma = match tau_min {
        Some(t) if t > 0.0 => (2.0 / t).sqrt(),
        Some(_) => return Err(KernelError::InvalidInput("tau_min must be positive")),
        None => 0.0,
    };
    let sigma = kernel_sigma.max(lo_sigma).max(sector.base_sigma());
    Grid1d::new(8.0 * sigma, len)
}

impl KernelOracle {
    /// Build ⋄-powers 1..=max_order of the sector base kernel.
    pub fn build(sector: Sector, max_order: usize, grid: Grid1d) -> Result<Self, KernelError> {
        if max_order < 1 {
            return Err(KernelError::InvalidOrder { order: max_order });
        }
        let h0 = sector.base_kernel(grid);
        let mut powers = Vec::with_capacity(max_order);
        powers.push(h0.clone());
        for _ in 1..max_order {
            let next = powers.last().unwrap().contract(&h0)?;
            powers.push(next);
        }
        Ok(KernelOracle {
            sector,
            grid,
            powers,
        })
    }

    pub fn max_order(&self) -> usize {
        self.powers.len()
    }

    pub fn power(&self, order: usize) -> Result<&SampledKernel, KernelError> {
        self.powers
            .get(order.wrapping_sub(1))
            .ok_or(KernelError::InvalidOrder { order })
    }

    /// Fit every stored order against the √m broadening law.
    pub fn broadening_reports(&self) -> Result<Vec<BroadeningReport>, KernelError> {
        let mut reports = Vec::with_capacity(self.powers.len());
        for (idx, k) in self.powers.iter().enumerate() {
            let order = idx + 1;
            let fitted = fit_gaussian_width(&self.grid, &k.center_profile())?;
            let predicted = self.sector.base_sigma() * (order as f64).sqrt();
            reports.push(BroadeningReport {
                sector: self.sector,
                order,
                fitted_width: fitted,
                predicted_width: predicted,
                rel_dev: (fitted - predicted).abs() / predicted,
            });
        }
        Ok(reports)
    }

    /// Normalized 1D LO overlap of the order-m kernel with a Gaussian LO
    /// of waist ratio τ: [γ ⋄ K_m ⋄ γ] / (γ₀² · row-norm).
    pub fn overlap_1d(&self, order: usize, tau: f64) -> Result<f64, KernelError> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(KernelError::InvalidInput("tau must be positive"));
        }
        let k = self.power(order)?;
        let gamma = self.grid.sample(|x| (-tau * x * x / 4.0).exp());
        let w = self.grid.weights();
        let num = bilinear(k, &gamma, &gamma)?;
        let mut g0sq = KahanSum::new();
        for (g, wi) in gamma.iter().zip(&w) {
            g0sq.add(g * g * wi);
        }
        let n = self.grid.len;
        let c = n / 2;
        let mut rownorm = KahanSum::new();
        for (kv, wj) in k.values[c * n..(c + 1) * n].iter().zip(&w) {
            rownorm.add(kv * wj);
        }
        Ok(num / (g0sq.value() * rownorm.value()))
    }
}

/// Parity of the Magnus order whose overlap factor is requested.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    /// Even order m_e = 2m; closed factor 1/(1+mτ).
    Even,
    /// Odd order m_o = 2m−1; closed factor 2/(2+m_oτ).
    Odd,
}

const OVERLAP_COARSE: usize = 512;
const OVERLAP_FINE: usize = 1024;
const OVERLAP_RESOLUTION_TOL: f64 = 1e-5;

/// Transverse oracles at two resolutions, for overlap factors with a
/// built-in grid-refinement consistency check.
pub struct OverlapOracle {
    coarse: KernelOracle,
    fine: KernelOracle,
}

impl OverlapOracle {
    pub fn build(max_order: usize, tau_min: f64) -> Result<Self, KernelError> {
        let gc = oracle_grid(Sector::Transverse, max_order, Some(tau_min), OVERLAP_COARSE)?;
        let gf = oracle_grid(Sector::Transverse, max_order, Some(tau_min), OVERLAP_FINE)?;
        Ok(OverlapOracle {
            coarse: KernelOracle::build(Sector::Transverse, max_order, gc)?,
            fine: KernelOracle::build(Sector::Transverse, max_order, gf)?,
        })
    }

    /// Two-transverse-dimension overlap factor of the order-(2m or 2m−1)
    /// kernel with a Gaussian LO of waist ratio τ; the square of the 1D
    /// factor. Errors when coarse and refined grids disagree.
    pub fn factor(&self, m: usize, parity: Parity, tau: f64) -> Result<f64, KernelError> {
        if m < 1 {
            return Err(KernelError::InvalidOrder { order: m });
        }
        let order = match parity {
            Parity::Even => 2 * m,
            Parity::Odd => 2 * m - 1,
        };
        let f1c = self.coarse.overlap_1d(order, tau)?;
        let f1f = self.fine.overlap_1d(order, tau)?;
        let (fc, ff) = (f1c * f1c, f1f * f1f);
        if (fc - ff).abs() > OVERLAP_RESOLUTION_TOL {
            return Err(KernelError::GridResolution {
                coarse: fc,
                fine: ff,
            });
        }
        Ok(ff)
    }
}

/// One-shot overlap factor; builds the two-resolution oracle for just
/// the needed order.
pub fn overlap_factor(m: usize, parity: Parity, tau: f64) -> Result<f64, KernelError> {
    if m < 1 {
        return Err(KernelError::InvalidOrder { order: m });
    }
    let order = match parity {
        Parity::Even => 2 * m,
        Parity::Odd => 2 * m - 1,
    };
    let oracle = OverlapOracle::build(order, tau)?;
    oracle.factor(m, parity, tau)
}

/// Kernel scale factors at the degenerate frequency; diagnostic only,
/// the variance series absorbs them into Ξ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticScales {
    /// Even-order scale M_e.
    pub even_scale: f64,
    /// Odd-order scale M_o (equal to M_e at degeneracy).
    pub odd_scale: f64,
    /// Per-contraction vertex scale M₁.
    pub vertex_scale: f64,
}

/// Evaluate the kernel scale factors for a physical configuration.
pub fn kernel_scales(cfg: &PhysicalConfig) -> Result<DiagnosticScales, crate::params::ParamError> {
    cfg.validate()?;
    let c = crate::params::SPEED_OF_LIGHT;
    let pi = core::f64::consts::PI;
    let omega_p = cfg.pump_angular_frequency();
    let omega_d = cfg.degenerate_angular_frequency();
    let np2 = cfg.index_pump * cfg.index_pump;
    let nd2 = cfg.index_degenerate * cfg.index_degenerate;
    let even_scale = pi.powf(1.25) * cfg.pump_waist * cfg.pump_waist * nd2 * omega_d
        / (c * np2 * cfg.pump_bandwidth.sqrt());
    let vertex_scale = 4.0
        * cfg.pump_amplitude
        * cfg.nonlinear_cross_section
        * omega_d
        * (2.0 * omega_p * cfg.pump_bandwidth).sqrt()
        / (pi.powf(0.75) * cfg.pump_waist * c * c * nd2);
    Ok(DiagnosticScales {
        even_scale,
        odd_scale: even_scale,
        vertex_scale,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn grid(x: f64, n: usize) -> Grid1d {
        Grid1d::new(x, n).unwrap()
    }

    #[test]
    fn identity_contraction_preserves_kernel() {
        let g = grid(10.0, 128);
        let k = SampledKernel::from_fn(g, |a, b| (-0.25 * (a + b) * (a + b)).exp());
        let id = SampledKernel::identity(g);
        let left = id.contract(&k).unwrap();
        let right = k.contract(&id).unwrap();
        for (l, (r, v)) in left.values.iter().zip(right.values.iter().zip(&k.values)) {
            assert_abs_diff_eq!(*l, *v, epsilon = 1e-8);
            assert_abs_diff_eq!(*r, *v, epsilon = 1e-8);
        }
    }

    #[test]
    fn unit_gaussian_contraction_follows_convolution_law() {
        // two unit-width sum-coordinate Gaussians contract into a
        // difference-coordinate Gaussian of width sqrt(2)
        let g = grid(16.0, 256);
        let k = SampledKernel::from_fn(g, |a, b| (-0.5 * (a + b) * (a + b)).exp());
        let k2 = k.contract(&k).unwrap();
        let width = fit_gaussian_width(&g, &k2.center_profile()).unwrap();
        assert_relative_eq!(width, 2.0f64.sqrt(), max_relative = 1e-6);
        // and it is a difference-coordinate kernel: constant along x1 = x2
        let n = g.len;
        let d0 = k2.values[(n / 2) * n + n / 2];
        let d1 = k2.values[(n / 4) * n + n / 4];
        assert_relative_eq!(d0, d1, max_relative = 1e-10);
    }

    #[test]
    fn contraction_is_associative() {
        let g = grid(12.0, 96);
        let a = SampledKernel::from_fn(g, |x, y| (-0.5 * (x + y) * (x + y)).exp());
        let b = SampledKernel::from_fn(g, |x, y| (-(x - y) * (x - y) / 3.0).exp());
        let c = SampledKernel::from_fn(g, |x, y| (-0.2 * (x + y) * (x + y)).exp());
        let left = a.contract(&b).unwrap().contract(&c).unwrap();
        let right = a.contract(&b.contract(&c).unwrap()).unwrap();
        let peak = left.peak();
        for (l, r) in left.values.iter().zip(&right.values) {
            assert!((l - r).abs() <= 1e-10 * peak);
        }
    }

    #[test]
    fn grid_mismatch_rejected() {
        let a = SampledKernel::identity(grid(10.0, 64));
        let b = SampledKernel::identity(grid(10.0, 96));
        assert_eq!(a.contract(&b).unwrap_err(), KernelError::GridMismatch);
    }

    #[test]
    fn width_fit_exact_gaussian() {
        let g = grid(8.0, 512);
        let p = g.sample(|x| (-x * x / 2.0).exp());
        let w = fit_gaussian_width(&g, &p).unwrap();
        assert_abs_diff_eq!(w, 1.0, epsilon = 1e-8);
    }

    #[test]
    fn width_fit_truncated_tails_uses_parabola() {
        // sigma = 3 sampled only to 2 sigma: second moment would be badly
        // biased, the log-parabola path recovers the width
        let g = grid(6.0, 256);
        let p = g.sample(|x| (-x * x / 18.0).exp());
        let w = fit_gaussian_width(&g, &p).unwrap();
        assert_relative_eq!(w, 3.0, max_relative = 1e-4);
    }

    #[test]
    fn width_fit_degenerate_inputs() {
        let g = grid(4.0, 64);
        let flat = vec![1.0; 64];
        assert_eq!(
            fit_gaussian_width(&g, &flat).unwrap_err(),
            KernelError::DegenerateProfile
        );
        let negative = vec![-1.0; 64];
        assert_eq!(
            fit_gaussian_width(&g, &negative).unwrap_err(),
            KernelError::NonPositiveProfile
        );
    }

    #[test]
    fn iterated_power_first_is_self() {
        let g = grid(10.0, 64);
        let k = SampledKernel::from_fn(g, |a, b| (-0.25 * (a + b) * (a + b)).exp());
        let p1 = k.iterated_power(1).unwrap();
        assert_eq!(p1, k);
        assert!(k.iterated_power(0).is_err());
    }

    #[test]
    fn base_kernels_are_symmetric_and_contained() {
        for sector in [Sector::Transverse, Sector::Spectral] {
            let g = oracle_grid(sector, 4, None, 128).unwrap();
            let k = sector.base_kernel(g);
            assert!(k.asymmetry() < 1e-12);
            assert!(k.boundary_ratio() < 1e-10);
        }
    }

    #[test]
    fn broadening_small_orders() {
        let g = oracle_grid(Sector::Transverse, 4, None, 256).unwrap();
        let oracle = KernelOracle::build(Sector::Transverse, 4, g).unwrap();
        for r in oracle.broadening_reports().unwrap() {
            assert!(r.rel_dev < 1e-6, "order {} rel_dev {}", r.order, r.rel_dev);
        }
    }

    #[test]
    fn overlap_factors_match_closed_forms() {
        let oracle = OverlapOracle::build(2, 1.0).unwrap();
        let even = oracle.factor(1, Parity::Even, 1.0).unwrap();
        assert_relative_eq!(even, 0.5, max_relative = 1e-5);
        let odd = oracle.factor(1, Parity::Odd, 1.0).unwrap();
        assert_relative_eq!(odd, 2.0 / 3.0, max_relative = 1e-5);
    }

    #[test]
    fn overlap_plane_wave_pump_limit() {
        // tau -> 0: both parities approach unity
        let oracle = OverlapOracle::build(2, 0.01).unwrap();
        let even = oracle.factor(1, Parity::Even, 0.01).unwrap();
        assert_relative_eq!(even, 1.0 / 1.01, max_relative = 1e-4);
        assert!((even - 1.0).abs() < 0.02);
        let odd = oracle.factor(1, Parity::Odd, 0.01).unwrap();
        assert_relative_eq!(odd, 2.0 / 2.01, max_relative = 1e-4);
    }

    #[test]
    fn diagnostic_scales_positive_and_hand_checked() {
        let cfg = PhysicalConfig {
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
        };
        let s = kernel_scales(&cfg).unwrap();
        assert!(s.even_scale > 0.0 && s.odd_scale > 0.0 && s.vertex_scale > 0.0);
        assert_eq!(s.even_scale, s.odd_scale);
        let c = 299_792_458.0f64;
        let omega_p = 2.0 * core::f64::consts::PI * c / 4.0e-7;
        let expected_even = core::f64::consts::PI.powf(1.25) * 1e-6 * 2.56 * (omega_p / 2.0)
            / (c * 2.56 * 1e11f64.sqrt());
        assert_relative_eq!(s.even_scale, expected_even, max_relative = 1e-12);
    }
}
