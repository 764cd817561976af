//! The generating-function petal variance against the closed series, and
//! a full grid reconstruction of the petal variance from kernel overlaps
//! demonstrating that the petal relative phase only rotates the mode.

use num_complex::Complex64;
use sqz_core::kernel::{bilinear, oracle_grid, KernelOracle, Sector};
use sqz_core::modes;
use sqz_core::series::{self, TruncationPolicy};
use sqz_core::Sign;

fn pol() -> TruncationPolicy {
    TruncationPolicy::default()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

#[test]
fn generating_path_equivalence_grid() {
    let pol = pol();
    for ell in 0..=5u32 {
        for &tau in &[0.5, 1.0, 2.0] {
            for &squeeze in &[1.0, 5.0, 10.0] {
                for sign in [Sign::Plus, Sign::Minus] {
                    let gen = modes::petal_variance_via_generating(
                        ell,
                        tau,
                        squeeze,
                        sign,
                        ell + 3,
                        &pol,
                    )
                    .unwrap();
                    let ser = series::variance_petal(ell, tau, squeeze, sign, &pol).unwrap();
                    assert!(
                        rel(gen.value, ser.value) < 1e-10,
                        "paths diverge at ell={ell} tau={tau} squeeze={squeeze} {sign:?}: {} vs {}",
                        gen.value,
                        ser.value
                    );
                }
            }
        }
    }
}

#[test]
fn ideal_limit_collapses_for_all_ell() {
    let pol = pol();
    for ell in [0u32, 1, 5] {
        for sign in [Sign::Plus, Sign::Minus] {
            let v = modes::petal_variance_via_generating(ell, 1e-7, 2.0, sign, ell + 2, &pol)
                .unwrap()
                .value;
            let ideal = 0.5 * (sign.factor() * 2.0f64).exp();
            assert!(
                rel(v, ideal) < 1e-5,
                "ell={ell} {sign:?}: {v} vs ideal {ideal}"
            );
        }
    }
}

/// Grid homodyne reconstruction for an ℓ = 1 petal with relative phase
/// χ between the two LG components. The mode is a polynomial times a
/// Gaussian, so the 6D overlaps reduce to products of 1D bilinears with
/// monomial-weighted Gaussian vectors.
struct PetalOverlaps {
    /// Normalized even-order factors (conjugated overlap), per order.
    even: Vec<f64>,
    /// Normalized odd-order factors (unconjugated overlap), per order.
    odd: Vec<Complex64>,
}

fn petal_grid_overlaps(chi: f64, tau: f64, max_order: usize) -> PetalOverlaps {
    let grid = oracle_grid(Sector::Transverse, max_order, Some(tau), 512).unwrap();
    let oracle = KernelOracle::build(Sector::Transverse, max_order, grid).unwrap();
    let g = grid.sample(|x| (-tau * x * x / 4.0).exp());
    let kg = grid.sample(|x| x * (-tau * x * x / 4.0).exp());
    let w = grid.weights();
    let n0: f64 = g.iter().zip(&w).map(|(v, wi)| v * v * wi).sum();
    let nk: f64 = kg.iter().zip(&w).map(|(v, wi)| v * v * wi).sum();

    // petal coefficients over the monomials (kx, ky), common factors
    // dropped since the factors are normalized
    let phase = Complex64::from_polar(1.0, chi);
    let cx = (Complex64::new(1.0, 0.0) + phase) / 2.0f64.sqrt();
    let cy = Complex64::new(0.0, 1.0) * (Complex64::new(1.0, 0.0) - phase) / 2.0f64.sqrt();
    let gamma_sq = (cx.norm_sqr() + cy.norm_sqr()) * nk * n0;

    let mut even = Vec::new();
    let mut odd = Vec::new();
    for order in 1..=max_order {
        let k = oracle.power(order).unwrap();
        let b0 = bilinear(k, &g, &g).unwrap();
        let bk = bilinear(k, &kg, &kg).unwrap();
        // parity kills the cross moments
        let cross = bilinear(k, &kg, &g).unwrap();
        assert!(cross.abs() < 1e-10 * b0.abs());
        let c = grid.len / 2;
        let rown: f64 = (0..grid.len)
            .map(|j| k.values[c * grid.len + j] * w[j])
            .sum();
        let scale = gamma_sq * rown * rown;
        if order % 2 == 0 {
            let o = (cx.norm_sqr() + cy.norm_sqr()) * bk * b0;
            even.push(o / scale);
        } else {
            let o = (cx * cx + cy * cy) * bk * b0;
            odd.push(o / scale);
        }
    }
    PetalOverlaps { even, odd }
}

fn reconstruct_sigma_minus(ov: &PetalOverlaps, squeeze: f64, max_order: usize) -> f64 {
    let mut pow = 1.0f64;
    let mut acc = 1.0f64;
    let (mut ie, mut io) = (0usize, 0usize);
    for n in 1..=max_order {
        pow *= squeeze / n as f64;
        if n % 2 == 0 {
            acc += pow * ov.even[ie];
            ie += 1;
        } else {
            acc -= pow * ov.odd[io].norm();
            io += 1;
        }
    }
    0.5 * acc
}

#[test]
fn petal_relative_phase_only_rotates_the_mode() {
    let (tau, squeeze, max_order) = (1.0, 1.0, 10usize);
    let base = petal_grid_overlaps(0.0, tau, max_order);
    let closed = series::variance_petal(1, tau, squeeze, Sign::Minus, &pol())
        .unwrap()
        .value;
    let sigma0 = reconstruct_sigma_minus(&base, squeeze, max_order);
    assert!(
        rel(sigma0, closed) < 1e-4,
        "grid reconstruction {sigma0} vs closed {closed}"
    );
    for &chi in &[0.7, 2.1, core::f64::consts::PI] {
        let ov = petal_grid_overlaps(chi, tau, max_order);
        // even factors identical, odd factors rotate in phase only
        for (a, b) in base.even.iter().zip(&ov.even) {
            assert!(rel(*a, *b) < 1e-10);
        }
        for (a, b) in base.odd.iter().zip(&ov.odd) {
            assert!(rel(a.norm(), b.norm()) < 1e-10);
            // the rotation is exactly chi
            let d = (b / a).arg();
            assert!((d - chi).abs() < 1e-8 || (d - chi + 2.0 * core::f64::consts::PI).abs() < 1e-8);
        }
        let sigma = reconstruct_sigma_minus(&ov, squeeze, max_order);
        assert!(rel(sigma, sigma0) < 1e-10, "chi={chi}: {sigma} vs {sigma0}");
    }
}

#[test]
fn single_lg_odd_overlap_vanishes_on_grid() {
    // a single +ℓ mode has c = (1, i)/norm: cx² + cy² = 0, so every odd
    // (squeezing) overlap dies; the grid sees exactly that
    let cx = Complex64::new(1.0, 0.0);
    let cy = Complex64::new(0.0, 1.0);
    let osum = cx * cx + cy * cy;
    assert!(osum.norm() == 0.0);
    // and the resulting even-only variance matches the module
    let pol = pol();
    let (tau, squeeze) = (1.0, 2.0);
    let (p, m) = modes::single_lg_variance(1, tau, squeeze, &pol).unwrap();
    assert_eq!(p, m);
    let ov = petal_grid_overlaps(0.0, tau, 12);
    let mut pow = 1.0f64;
    let mut acc = 1.0f64;
    let mut ie = 0usize;
    for n in 1..=12usize {
        pow *= squeeze / n as f64;
        if n % 2 == 0 {
            acc += pow * ov.even[ie];
            ie += 1;
        }
    }
    let rebuilt = 0.5 * acc;
    assert!(
        rel(rebuilt, p) < 1e-4,
        "grid single-LG {rebuilt} vs module {p}"
    );
}
