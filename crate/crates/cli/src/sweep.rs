//! Parameter sweeps over the reduced parameters and their deterministic
//! CSV serialisation.
//!
//! CSV contract: comment header lines starting with `#`, then the exact
//! column order `axis,value,sigma_minus_sq,sigma_plus_sq,area,terms_used,
//! est_rel_err`, floats at 17 significant digits. Failed rows keep the
//! column count with `nan` placeholders and a trailing comment carrying
//! the error; the run continues.

use crate::{fmt_f64, CliError};
use sqz_core::params::ReducedParams;
use sqz_core::series::{self, PrecisionDigits, TruncationPolicy};
use sqz_core::Sign;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    /// The squeezing parameter Ξ (CLI name `Xi`).
    Squeeze,
    /// The waist ratio τ (CLI name `tau`).
    Tau,
    /// The bandwidth ratio ξ (CLI name `xi`).
    BandwidthRatio,
    /// The azimuthal index ℓ (CLI name `ell`).
    Ell,
    /// The LO phase θ (CLI name `theta`).
    Theta,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::Squeeze => "Xi",
            Axis::Tau => "tau",
            Axis::BandwidthRatio => "xi",
            Axis::Ell => "ell",
            Axis::Theta => "theta",
        }
    }
}

impl FromStr for Axis {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "Xi" => Ok(Axis::Squeeze),
            "tau" => Ok(Axis::Tau),
            "xi" => Ok(Axis::BandwidthRatio),
            "ell" => Ok(Axis::Ell),
            "theta" => Ok(Axis::Theta),
            other => Err(CliError::InvalidArg(format!(
                "unknown axis {other:?}; expected one of Xi, tau, xi, ell, theta"
            ))),
        }
    }
}

/// The remaining parameters held fixed while one axis sweeps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedParams {
    pub xi: f64,
    pub tau: f64,
    pub squeeze: f64,
    pub theta: Option<f64>,
    pub ell: u32,
}

impl Default for FixedParams {
    fn default() -> Self {
        FixedParams {
            xi: 0.0,
            tau: 0.0,
            squeeze: 1.0,
            theta: None,
            ell: 0,
        }
    }
}

impl FixedParams {
    /// Fold `k=v` CLI assignments into the defaults.
    pub fn apply(&mut self, assignments: &[String]) -> Result<(), CliError> {
        for raw in assignments {
            let (key, value) = raw
                .split_once('=')
                .ok_or_else(|| CliError::InvalidArg(format!("--fix expects k=v, got {raw:?}")))?;
            let parse = |v: &str| -> Result<f64, CliError> {
                v.parse()
                    .map_err(|_| CliError::InvalidArg(format!("bad value in --fix {raw:?}")))
            };
            match key {
                "Xi" => self.squeeze = parse(value)?,
                "tau" => self.tau = parse(value)?,
                "xi" => self.xi = parse(value)?,
                "theta" => self.theta = Some(parse(value)?),
                "ell" => {
                    self.ell = value.parse().map_err(|_| {
                        CliError::InvalidArg(format!(
                            "ell must be a nonnegative integer in {raw:?}"
                        ))
                    })?
                }
                other => {
                    return Err(CliError::InvalidArg(format!(
                        "unknown --fix key {other:?}; expected Xi, tau, xi, theta or ell"
                    )))
                }
            }
        }
        Ok(())
    }
}

/// Axis values: an inclusive range with a point count, or an explicit
/// list.
#[derive(Debug, Clone, PartialEq)]
pub enum AxisValues {
    Linear { lo: f64, hi: f64, points: usize },
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: Axis,
    pub values: AxisValues,
    pub fixed: FixedParams,
    pub policy: TruncationPolicy,
}

impl SweepSpec {
    pub fn axis_values(&self) -> Result<Vec<f64>, CliError> {
        let mut vals = match &self.values {
            AxisValues::Linear { lo, hi, points } => {
                if lo >= hi || lo.is_nan() || hi.is_nan() {
                    return Err(CliError::InvalidArg(
                        "sweep range must satisfy min < max".into(),
                    ));
                }
                if *points < 2 {
                    return Err(CliError::InvalidArg("sweep needs at least 2 points".into()));
                }
                (0..*points)
                    .map(|i| lo + (hi - lo) * i as f64 / (*points - 1) as f64)
                    .collect::<Vec<_>>()
            }
            AxisValues::Explicit(v) => {
                if v.len() < 2 {
                    return Err(CliError::InvalidArg("sweep needs at least 2 points".into()));
                }
                let mut v = v.clone();
                v.sort_by(|a, b| a.partial_cmp(b).unwrap());
                v
            }
        };
        if self.axis == Axis::Ell {
            for v in &vals {
                if *v < 0.0 || v.fract() != 0.0 {
                    return Err(CliError::InvalidArg(format!(
                        "ell axis values must be nonnegative integers (got {v})"
                    )));
                }
            }
        }
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(vals)
    }
}

/// One evaluated grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RowData {
    pub sigma_minus_sq: f64,
    pub sigma_plus_sq: f64,
    pub area: f64,
    pub terms_used: usize,
    pub est_rel_err: f64,
}

#[derive(Debug, Clone)]
pub struct SweepRow {
    pub value: f64,
    pub outcome: Result<RowData, String>,
}

#[derive(Debug, Clone)]
pub struct SweepTable {
    pub axis: Axis,
    pub meta: Vec<(&'static str, String)>,
    pub rows: Vec<SweepRow>,
}

fn policy_meta(pol: &TruncationPolicy) -> String {
    let digits = match pol.precision_digits {
        PrecisionDigits::Auto => "auto".to_string(),
        PrecisionDigits::Fixed(d) => d.to_string(),
    };
    format!(
        "rel_tol={:e} max_terms={} precision_digits={}",
        pol.rel_tol, pol.max_terms, digits
    )
}

/// Evaluate one reduced-parameter point, choosing the petal series when
/// an azimuthal index is present and the general series otherwise.
pub fn eval_point(
    xi: f64,
    tau: f64,
    squeeze: f64,
    ell: u32,
    theta: Option<f64>,
    pol: &TruncationPolicy,
) -> Result<RowData, String> {
    if ell > 0 {
        if xi != 0.0 {
            return Err("petal-mode evaluation requires xi = 0".into());
        }
        if tau <= 0.0 || tau.is_nan() {
            return Err("petal-mode evaluation requires tau > 0".into());
        }
        let plus = series::variance_petal(ell, tau, squeeze, Sign::Plus, pol)
            .map_err(|e| e.to_string())?;
        let minus = series::variance_petal(ell, tau, squeeze, Sign::Minus, pol)
            .map_err(|e| e.to_string())?;
        Ok(RowData {
            sigma_minus_sq: minus.value,
            sigma_plus_sq: plus.value,
            area: series::uncertainty_area(plus.value, minus.value),
            terms_used: plus.terms_used.max(minus.terms_used),
            est_rel_err: plus.est_rel_err.max(minus.est_rel_err),
        })
    } else {
        let rp = ReducedParams::new(xi, tau, squeeze, theta.unwrap_or(0.0))
            .map_err(|e| e.to_string())?;
        let v = series::variance_general(&rp, pol).map_err(|e| e.to_string())?;
        Ok(RowData {
            sigma_minus_sq: v.sigma_minus_sq,
            sigma_plus_sq: v.sigma_plus_sq,
            area: v.area,
            terms_used: v.terms_used,
            est_rel_err: v.est_rel_err,
        })
    }
}

/// Run a sweep; per-row failures are recorded and the run continues.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepTable, CliError> {
    spec.policy.validate()?;
    let values = spec.axis_values()?;
    let f = spec.fixed;
    let petal = spec.axis == Axis::Ell || f.ell > 0;
    let mut rows = Vec::with_capacity(values.len());
    for &v in &values {
        let (mut xi, mut tau, mut squeeze, mut ell) = (f.xi, f.tau, f.squeeze, f.ell);
        let mut theta = f.theta;
        match spec.axis {
            Axis::Squeeze => squeeze = v,
            Axis::Tau => tau = v,
            Axis::BandwidthRatio => xi = v,
            Axis::Ell => ell = v as u32,
            Axis::Theta => theta = Some(v),
        }
        let outcome = eval_point(xi, tau, squeeze, ell, theta, &spec.policy);
        rows.push(SweepRow { value: v, outcome });
    }
    let meta = vec![
        ("sqz-version", env!("CARGO_PKG_VERSION").to_string()),
        (
            "regime",
            if petal { "petal" } else { "general" }.to_string(),
        ),
        ("truncation", policy_meta(&spec.policy)),
    ];
    Ok(SweepTable {
        axis: spec.axis,
        meta,
        rows,
    })
}

pub const CSV_HEADER: &str = "axis,value,sigma_minus_sq,sigma_plus_sq,area,terms_used,est_rel_err";

impl SweepTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            out.push_str(&format!("# {k}: {v}\n"));
        }
        out.push_str(CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            match &row.outcome {
                Ok(d) => {
                    out.push_str(&format!(
                        "{},{},{},{},{},{},{}\n",
                        self.axis.name(),
                        fmt_f64(row.value),
                        fmt_f64(d.sigma_minus_sq),
                        fmt_f64(d.sigma_plus_sq),
                        fmt_f64(d.area),
                        d.terms_used,
                        fmt_f64(d.est_rel_err),
                    ));
                }
                Err(msg) => {
                    out.push_str(&format!(
                        "{},{},nan,nan,nan,0,nan\n# error at value={}: {}\n",
                        self.axis.name(),
                        fmt_f64(row.value),
                        fmt_f64(row.value),
                        msg
                    ));
                }
            }
        }
        out
    }
}

/// Parse an emitted CSV back into (value, RowData) pairs; used by the
/// round-trip checks.
pub fn parse_csv(text: &str) -> Result<Vec<(f64, RowData)>, CliError> {
    let mut rows = Vec::new();
    for line in text.lines() {
        if line.starts_with('#') || line.is_empty() || line == CSV_HEADER {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 7 {
            return Err(CliError::InvalidArg(format!(
                "CSV row has {} fields, expected 7",
                cells.len()
            )));
        }
        let num = |i: usize| -> Result<f64, CliError> {
            cells[i]
                .parse()
                .map_err(|_| CliError::InvalidArg(format!("bad float {:?}", cells[i])))
        };
        rows.push((
            num(1)?,
            RowData {
                sigma_minus_sq: num(2)?,
                sigma_plus_sq: num(3)?,
                area: num(4)?,
                terms_used: cells[5]
                    .parse()
                    .map_err(|_| CliError::InvalidArg("bad terms_used".into()))?,
                est_rel_err: num(6)?,
            },
        ));
    }
    Ok(rows)
}
