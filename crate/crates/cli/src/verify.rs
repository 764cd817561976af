//! Runnable verification suites mirroring each module's invariants;
//! `verify --suite all` exits zero only when every check passes.

use crate::{fmt_f64, CliError};
use sqz_core::kernel::{
    kernel_scales, oracle_grid, BroadeningReport, KernelOracle, OverlapOracle, Parity, Sector,
};
use sqz_core::modes::{self, GeneratingParams};
use sqz_core::params::{PhysicalConfig, ReducedParams};
use sqz_core::quad::{ensemble_average, hermite_rule};
use sqz_core::series::{self, uncertainty_area, TruncationPolicy};
use sqz_core::Sign;
use std::fmt::Write as _;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Series,
    Hypergeom,
    Quad,
    Kernel,
    Modes,
    All,
}

impl FromStr for Suite {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "series" => Ok(Suite::Series),
            "hypergeom" => Ok(Suite::Hypergeom),
            "quad" => Ok(Suite::Quad),
            "kernel" => Ok(Suite::Kernel),
            "modes" => Ok(Suite::Modes),
            "all" => Ok(Suite::All),
            other => Err(CliError::InvalidArg(format!(
                "unknown suite {other:?}; expected series, hypergeom, quad, kernel, modes or all"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Outcome of one suite run, including the kernel broadening table when
/// that suite executed.
pub struct SuiteReport {
    pub checks: Vec<CheckResult>,
    pub broadening: Vec<BroadeningReport>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn check(out: &mut Vec<CheckResult>, name: &'static str, result: Result<String, String>) {
    match result {
        Ok(detail) => out.push(CheckResult {
            name,
            passed: true,
            detail,
        }),
        Err(detail) => out.push(CheckResult {
            name,
            passed: false,
            detail,
        }),
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn pol() -> TruncationPolicy {
    TruncationPolicy::default()
}

fn series_checks(out: &mut Vec<CheckResult>) {
    let pol = pol();
    let squeezes = [0.1, 1.0, 3.0, 10.0];
    let ratios = [0.1, 1.0, 10.0];

    check(out, "series/regime-consistency-xi0", {
        let mut worst = 0.0f64;
        let mut res = Ok(());
        'outer: for &sq in &squeezes {
            for &tau in &ratios {
                let rp = ReducedParams::new(0.0, tau, sq, 0.0).unwrap();
                match (
                    series::variance_general(&rp, &pol),
                    series::variance_xi0(tau, sq, Sign::Plus, &pol),
                    series::variance_xi0(tau, sq, Sign::Minus, &pol),
                ) {
                    (Ok(g), Ok(p), Ok(m)) => {
                        worst = worst
                            .max(rel(g.sigma_plus_sq, p.value))
                            .max(rel(g.sigma_minus_sq, m.value));
                    }
                    _ => {
                        res = Err(format!("evaluation failed at squeeze={sq} tau={tau}"));
                        break 'outer;
                    }
                }
            }
        }
        res.and(if worst < 1e-10 {
            Ok(format!("max rel dev {worst:.2e} (tol 1e-10)"))
        } else {
            Err(format!("max rel dev {worst:.2e} exceeds 1e-10"))
        })
    });

    check(out, "series/regime-consistency-tau0", {
        let mut worst = 0.0f64;
        for &sq in &squeezes {
            for &xi in &ratios {
                let rp = ReducedParams::new(xi, 0.0, sq, 0.0).unwrap();
                let g = series::variance_general(&rp, &pol).unwrap();
                let p = series::variance_tau0_series(xi, sq, Sign::Plus, &pol).unwrap();
                let m = series::variance_tau0_series(xi, sq, Sign::Minus, &pol).unwrap();
                worst = worst
                    .max(rel(g.sigma_plus_sq, p.value))
                    .max(rel(g.sigma_minus_sq, m.value));
            }
        }
        if worst < 1e-10 {
            Ok(format!("max rel dev {worst:.2e} (tol 1e-10)"))
        } else {
            Err(format!("max rel dev {worst:.2e} exceeds 1e-10"))
        }
    });

    check(out, "series/integral-series-equivalence", {
        let mut worst = 0.0f64;
        for &sq in &squeezes {
            for &xi in &ratios {
                for sign in [Sign::Plus, Sign::Minus] {
                    let s = series::variance_tau0_series(xi, sq, sign, &pol).unwrap();
                    let i = series::variance_tau0_integral(xi, sq, sign).unwrap();
                    worst = worst.max(rel(s.value, i.value));
                }
            }
        }
        if worst < 1e-8 {
            Ok(format!("max rel dev {worst:.2e} (tol 1e-8)"))
        } else {
            Err(format!("max rel dev {worst:.2e} exceeds 1e-8"))
        }
    });

    check(out, "series/area-floor", {
        let mut min_area = f64::MAX;
        for &sq in &squeezes {
            for &tau in &[0.0, 0.1, 1.0, 10.0] {
                for &xi in &[0.0, 0.5, 2.0] {
                    let rp = ReducedParams::new(xi, tau, sq, 0.0).unwrap();
                    let v = series::variance_general(&rp, &pol).unwrap();
                    min_area = min_area.min(v.area);
                }
            }
        }
        if min_area >= 0.5 - 1e-9 {
            Ok(format!("min area {min_area:.12}"))
        } else {
            Err(format!("area {min_area} below 1/2 - 1e-9"))
        }
    });

    check(out, "series/monotone-squeezing-loss-in-tau", {
        let mut ok = true;
        for &sq in &[1.0, 3.0, 10.0] {
            let vals: Vec<f64> = [0.1, 1.0, 10.0]
                .iter()
                .map(|&t| {
                    series::variance_xi0(t, sq, Sign::Minus, &pol)
                        .unwrap()
                        .value
                })
                .collect();
            ok &= vals[0] < vals[1] && vals[1] < vals[2];
        }
        if ok {
            Ok("sigma_minus^2 increases with tau at Xi in {1,3,10}".into())
        } else {
            Err("ordering violated".into())
        }
    });

    check(out, "series/azimuthal-orderings", {
        let mut mins = Vec::new();
        let mut areas = Vec::new();
        for ell in 0..=5u32 {
            let p = series::variance_petal(ell, 1.0, 5.0, Sign::Plus, &pol).unwrap();
            let m = series::variance_petal(ell, 1.0, 5.0, Sign::Minus, &pol).unwrap();
            mins.push(m.value);
            areas.push(uncertainty_area(p.value, m.value));
        }
        let inc = mins.windows(2).all(|w| w[1] >= w[0]);
        let dec = areas.windows(2).all(|w| w[1] <= w[0]);
        if inc && dec {
            Ok("sigma_minus^2 nondecreasing, area nonincreasing over ell=0..5".into())
        } else {
            Err(format!("mins={mins:?} areas={areas:?}"))
        }
    });

    check(out, "series/theta-periodicity", {
        let mut worst = 0.0f64;
        for &theta in &[0.0, 0.37, 1.2, 2.8] {
            let a =
                series::variance_general(&ReducedParams::new(0.3, 0.8, 1.5, theta).unwrap(), &pol)
                    .unwrap();
            let b = series::variance_general(
                &ReducedParams::new(0.3, 0.8, 1.5, theta + std::f64::consts::PI).unwrap(),
                &pol,
            )
            .unwrap();
            worst = worst.max((a.sigma_theta_sq.unwrap() - b.sigma_theta_sq.unwrap()).abs());
        }
        if worst < 1e-12 {
            Ok(format!(
                "max |sigma(theta) - sigma(theta+pi)| = {worst:.2e}"
            ))
        } else {
            Err(format!("periodicity broken: {worst:.2e}"))
        }
    });

    check(out, "series/area-peak-location", {
        let peaks: Result<Vec<f64>, _> = [1.0, 3.0, 10.0]
            .iter()
            .map(|&sq| series::area_peak(sq, 0, 0.5, 50.0, &pol).map(|p| p.tau_star))
            .collect();
        match peaks {
            Ok(taus) if taus.iter().all(|t| (3.0..=10.0).contains(t)) => {
                Ok(format!("tau* = {taus:?} all within [3, 10]"))
            }
            Ok(taus) => Err(format!("tau* = {taus:?} outside [3, 10]")),
            Err(e) => Err(e.to_string()),
        }
    });
}

fn hypergeom_checks(out: &mut Vec<CheckResult>) {
    use sqz_core::hypergeom::{hyp1f1, hyp_repeated, HypergeomSpec};
    let pol = pol();

    check(out, "hypergeom/1f1-closed-identity", {
        let v = hyp1f1(2.0, 3.0, -1.0, &pol).unwrap().value;
        let expect = 2.0 - 4.0 / std::f64::consts::E;
        let d = rel(v, expect);
        if d < 1e-12 {
            Ok(format!("1F1(2;3;-1) within {d:.2e} of 2 - 4/e"))
        } else {
            Err(format!("rel dev {d:.2e}"))
        }
    });

    check(out, "hypergeom/parameter-collapse", {
        let v = hyp1f1(4.25, 4.25, 1.5, &pol).unwrap().value;
        let d = rel(v, 1.5f64.exp());
        if d < 1e-12 {
            Ok(format!("1F1(b;b;x) = e^x within {d:.2e}"))
        } else {
            Err(format!("rel dev {d:.2e}"))
        }
    });

    check(out, "hypergeom/repeated-t1-reduces-to-1f1", {
        let mut worst = 0.0f64;
        for &x in &[-6.0, -1.0, 0.0, 2.0, 6.0] {
            let spec = HypergeomSpec::new(1, 2.0, 3.0, x).unwrap();
            let a = hyp_repeated(&spec, &pol).unwrap().value;
            let b = hyp1f1(2.0, 3.0, x, &pol).unwrap().value;
            worst = worst.max(rel(a, b));
        }
        if worst < 1e-12 {
            Ok(format!("max rel dev {worst:.2e}"))
        } else {
            Err(format!("max rel dev {worst:.2e}"))
        }
    });

    check(out, "hypergeom/term-recurrence-vs-pochhammer", {
        let (m, t, x) = (0.8f64, 3i32, -2.0f64);
        let mut term = 1.0f64;
        let mut worst = 0.0f64;
        for n in 1..=50usize {
            let k = n as f64;
            term *= ((m + k - 1.0) / (m + k)).powi(t) * x / k;
            let direct = (m / (m + k)).powi(t) * x.powi(n as i32)
                / (1..=n).map(|i| i as f64).product::<f64>();
            worst = worst.max(rel(term, direct));
        }
        if worst < 1e-10 {
            Ok(format!("max rel dev over n<=50: {worst:.2e}"))
        } else {
            Err(format!("max rel dev {worst:.2e}"))
        }
    });

    check(out, "hypergeom/entire-at-large-argument", {
        let a = hyp1f1(2.0, 3.0, 30.0, &pol).unwrap();
        let b = hyp1f1(2.0, 3.0, -30.0, &pol).unwrap();
        let expect = 2.0 * ((-30.0f64).exp() * (-31.0) + 1.0) / 900.0;
        let d = rel(b.value, expect);
        if a.value.is_finite() && d < 1e-12 {
            Ok(format!("converged at x = +/-30, closed-form dev {d:.2e}"))
        } else {
            Err(format!("dev {d:.2e} at x=-30"))
        }
    });
}

fn quad_checks(out: &mut Vec<CheckResult>) {
    check(out, "quad/zeroth-moment", {
        let mut worst = 0.0f64;
        for &n in &[2usize, 5, 41, 160] {
            let r = hermite_rule(n).unwrap();
            let sum: f64 = r.weights.iter().sum();
            worst = worst.max((sum - std::f64::consts::PI.sqrt()).abs());
        }
        if worst < 1e-13 {
            Ok(format!("max |sum(w) - sqrt(pi)| = {worst:.2e}"))
        } else {
            Err(format!("deviation {worst:.2e}"))
        }
    });

    check(out, "quad/second-moment-exactness", {
        let r = hermite_rule(40).unwrap();
        let v = r.integrate(|u| u * u);
        let d = (v - std::f64::consts::PI.sqrt() / 2.0).abs();
        if d < 1e-12 {
            Ok(format!("|dev| = {d:.2e}"))
        } else {
            Err(format!("|dev| = {d:.2e}"))
        }
    });

    check(out, "quad/cosine-oracle", {
        let r = hermite_rule(40).unwrap();
        let v = r.integrate(|u| u.cos());
        let expect = std::f64::consts::PI.sqrt() * (-0.25f64).exp();
        let d = rel(v, expect);
        if d < 1e-12 {
            Ok(format!("rel dev {d:.2e}"))
        } else {
            Err(format!("rel dev {d:.2e}"))
        }
    });

    check(out, "quad/ensemble-monotone-in-xi", {
        let mut ok = true;
        for &sq in &[1.0, 3.0] {
            let mut prev = f64::MIN;
            for &xi in &[0.0, 0.5, 2.0, 8.0] {
                let v = ensemble_average(sq, xi, Sign::Minus, 20).unwrap().value;
                ok &= v > prev;
                prev = v;
            }
        }
        if ok {
            Ok("minus-sign ensemble average increases with xi".into())
        } else {
            Err("monotonicity violated".into())
        }
    });

    check(out, "quad/negligible-averaging-limit", {
        let mut worst = 0.0f64;
        for &sq in &[1.0, 3.0] {
            for sign in [Sign::Plus, Sign::Minus] {
                let v = ensemble_average(sq, 0.01, sign, 20).unwrap().value;
                let ideal = 0.5 * (sign.factor() * sq).exp();
                worst = worst.max(rel(v, ideal));
            }
        }
        if worst < 1e-2 {
            Ok(format!("max rel dev from ideal {worst:.2e} (tol 1e-2)"))
        } else {
            Err(format!("max rel dev {worst:.2e}"))
        }
    });
}

fn kernel_checks(out: &mut Vec<CheckResult>, broadening: &mut Vec<BroadeningReport>) {
    for sector in [Sector::Transverse, Sector::Spectral] {
        let name = match sector {
            Sector::Transverse => "kernel/broadening-transverse",
            Sector::Spectral => "kernel/broadening-spectral",
        };
        check(out, name, {
            match oracle_grid(sector, 8, None, 512)
                .and_then(|g| KernelOracle::build(sector, 8, g))
                .and_then(|o| o.broadening_reports())
            {
                Ok(reports) => {
                    let worst = reports.iter().map(|r| r.rel_dev).fold(0.0f64, f64::max);
                    broadening.extend(reports.iter().copied());
                    if worst < 1e-4 {
                        Ok(format!("orders 1..=8, max rel_dev {worst:.2e} (tol 1e-4)"))
                    } else {
                        Err(format!("max rel_dev {worst:.2e} exceeds 1e-4"))
                    }
                }
                Err(e) => Err(e.to_string()),
            }
        });
    }

    check(out, "kernel/overlap-factors", {
        match OverlapOracle::build(8, 0.5) {
            Ok(oracle) => {
                let mut worst = 0.0f64;
                for &tau in &[0.5, 1.0, 2.0] {
                    for m in 1..=4usize {
                        let even = oracle.factor(m, Parity::Even, tau).unwrap();
                        worst = worst.max((even - 1.0 / (1.0 + m as f64 * tau)).abs());
                        let odd = oracle.factor(m, Parity::Odd, tau).unwrap();
                        let mo = 2.0 * m as f64 - 1.0;
                        worst = worst.max((odd - 2.0 / (2.0 + mo * tau)).abs());
                    }
                }
                if worst < 1e-5 {
                    Ok(format!("max |grid - closed| = {worst:.2e} (tol 1e-5)"))
                } else {
                    Err(format!("max deviation {worst:.2e}"))
                }
            }
            Err(e) => Err(e.to_string()),
        }
    });

    check(out, "kernel/series-term-reconstruction", {
        let tau = 1.0;
        let squeeze = 1.0;
        match oracle_grid(Sector::Transverse, 6, Some(tau), 512)
            .and_then(|g| KernelOracle::build(Sector::Transverse, 6, g))
        {
            Ok(oracle) => {
                let mut worst = 0.0f64;
                let mut pow = 1.0f64;
                for n in 1..=6usize {
                    pow *= squeeze / n as f64;
                    let f1 = oracle.overlap_1d(n, tau).unwrap();
                    let rebuilt = 0.5 * f1 * f1 * pow;
                    let closed = pow / (n as f64 * tau + 2.0);
                    worst = worst.max(rel(rebuilt, closed));
                }
                if worst < 1e-6 {
                    Ok(format!("first 6 terms, max rel dev {worst:.2e} (tol 1e-6)"))
                } else {
                    Err(format!("max rel dev {worst:.2e}"))
                }
            }
            Err(e) => Err(e.to_string()),
        }
    });

    check(out, "kernel/diagnostic-scales", {
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
        match kernel_scales(&cfg) {
            Ok(s) if s.even_scale > 0.0 && s.odd_scale > 0.0 && s.vertex_scale > 0.0 => {
                Ok("scale factors positive on the reference config".into())
            }
            Ok(_) => Err("nonpositive scale factor".into()),
            Err(e) => Err(e.to_string()),
        }
    });
}

fn modes_checks(out: &mut Vec<CheckResult>) {
    let pol = pol();

    check(out, "modes/generating-path-equivalence", {
        let mut worst = 0.0f64;
        for ell in 0..=5u32 {
            for &tau in &[0.5, 1.0, 2.0] {
                for &sq in &[1.0, 5.0, 10.0] {
                    for sign in [Sign::Plus, Sign::Minus] {
                        let a =
                            modes::petal_variance_via_generating(ell, tau, sq, sign, ell + 3, &pol)
                                .unwrap()
                                .value;
                        let b = series::variance_petal(ell, tau, sq, sign, &pol)
                            .unwrap()
                            .value;
                        worst = worst.max(rel(a, b));
                    }
                }
            }
        }
        if worst < 1e-10 {
            Ok(format!("max rel dev {worst:.2e} (tol 1e-10)"))
        } else {
            Err(format!("max rel dev {worst:.2e}"))
        }
    });

    check(out, "modes/ideal-limit-degeneracy", {
        let mut worst = 0.0f64;
        for ell in [0u32, 2, 5] {
            for sign in [Sign::Plus, Sign::Minus] {
                let v = modes::petal_variance_via_generating(ell, 1e-7, 2.0, sign, ell + 2, &pol)
                    .unwrap()
                    .value;
                worst = worst.max(rel(v, 0.5 * (sign.factor() * 2.0f64).exp()));
            }
        }
        if worst < 1e-5 {
            Ok(format!("max rel dev from ideal {worst:.2e}"))
        } else {
            Err(format!("max rel dev {worst:.2e}"))
        }
    });

    check(out, "modes/single-lg-no-squeezing", {
        let mut ok = true;
        let mut detail = String::new();
        for ell in [1u32, 2] {
            for &(tau, sq) in &[(1.0, 1.0), (1.0, 3.0)] {
                let (p, m) = modes::single_lg_variance(ell, tau, sq, &pol).unwrap();
                ok &= p == m && m >= 0.5;
                let _ = write!(detail, "ell={ell} sigma^2={m:.6}; ");
            }
        }
        if ok {
            Ok(detail)
        } else {
            Err("squeezing observed through a single LG mode".into())
        }
    });

    check(out, "modes/selection-rule", {
        let base = GeneratingParams {
            mu1: 0.3,
            mu2: 0.5,
            nu1: 0.0,
            nu2: 0.0,
            s1: 1,
            s2: 1,
            xi: 0.0,
            tau: 1.0,
            squeeze: 1.0,
            sign: Sign::Plus,
            ell: 1,
            p: 0,
        };
        let odd = |mu1: f64, mu2: f64| {
            let plus = modes::generating_eval(&GeneratingParams {
                mu1,
                mu2,
                sign: Sign::Plus,
                ..base
            })
            .unwrap()
            .value;
            let minus = modes::generating_eval(&GeneratingParams {
                mu1,
                mu2,
                sign: Sign::Minus,
                ..base
            })
            .unwrap()
            .value;
            0.5 * (plus - minus)
        };
        let d = rel(odd(0.3, 0.5), odd(0.9, 1.1));
        if d < 1e-12 {
            Ok(format!(
                "odd part mu-independent for s1=s2 (rel dev {d:.2e})"
            ))
        } else {
            Err(format!("mu dependence {d:.2e}"))
        }
    });

    check(out, "modes/norm-constants", {
        let a = rel(
            modes::lg_norm(0, 0),
            1.0 / (2.0 * std::f64::consts::PI).sqrt(),
        );
        let b = rel(modes::lg_norm(2, 0), (1.0 / std::f64::consts::PI).sqrt());
        if a < 1e-13 && b < 1e-13 {
            Ok("normalisation constants match closed values".into())
        } else {
            Err(format!("deviations {a:.2e}, {b:.2e}"))
        }
    });
}

/// Run the chosen suite.
pub fn run_suite(suite: Suite) -> SuiteReport {
    let mut checks = Vec::new();
    let mut broadening = Vec::new();
    match suite {
        Suite::Series => series_checks(&mut checks),
        Suite::Hypergeom => hypergeom_checks(&mut checks),
        Suite::Quad => quad_checks(&mut checks),
        Suite::Kernel => kernel_checks(&mut checks, &mut broadening),
        Suite::Modes => modes_checks(&mut checks),
        Suite::All => {
            series_checks(&mut checks);
            hypergeom_checks(&mut checks);
            quad_checks(&mut checks);
            kernel_checks(&mut checks, &mut broadening);
            modes_checks(&mut checks);
        }
    }
    SuiteReport { checks, broadening }
}

/// Plain-text broadening table.
pub fn broadening_text(reports: &[BroadeningReport]) -> String {
    let mut out = String::from("sector      order  fitted_width      predicted_width   rel_dev\n");
    for r in reports {
        let _ = writeln!(
            out,
            "{:<11} {:>5}  {:<17.12} {:<17.12} {:.3e}",
            format!("{:?}", r.sector).to_lowercase(),
            r.order,
            r.fitted_width,
            r.predicted_width,
            r.rel_dev
        );
    }
    out
}

/// CSV form of the broadening table.
pub fn broadening_csv(reports: &[BroadeningReport]) -> String {
    let mut out = String::from("sector,order,fitted_width,predicted_width,rel_dev\n");
    for r in reports {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            format!("{:?}", r.sector).to_lowercase(),
            r.order,
            fmt_f64(r.fitted_width),
            fmt_f64(r.predicted_width),
            fmt_f64(r.rel_dev)
        );
    }
    out
}
