//! The six reference figures: curve definitions, CSV emission, SVG
//! rendering.
//!
//! Defaults: Ξ ∈ [0, 6] for the squeeze-axis figures, τ ∈ [0.01, 50]
//! log-spaced for the waist-ratio figures, 121 points per curve.

use crate::svg::{self, Plot, Series};
use crate::sweep::{eval_point, RowData, CSV_HEADER};
use crate::{fmt_f64, CliError};
use sqz_core::series::TruncationPolicy;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FigureOptions {
    /// Upper end of the Ξ axis (figures 1, 2, 4, 5).
    pub squeeze_max: f64,
    /// Log-spaced τ axis bounds (figures 3, 6).
    pub tau_min: f64,
    pub tau_max: f64,
    /// Points per curve.
    pub points: usize,
}

impl Default for FigureOptions {
    fn default() -> Self {
        FigureOptions {
            squeeze_max: 6.0,
            tau_min: 0.01,
            tau_max: 50.0,
            points: 121,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Curve {
    pub label: String,
    pub rows: Vec<(f64, RowData)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum YColumn {
    SigmaMinusSq,
    Area,
}

impl YColumn {
    fn pick(self, d: &RowData) -> f64 {
        match self {
            YColumn::SigmaMinusSq => d.sigma_minus_sq,
            YColumn::Area => d.area,
        }
    }
    fn label(self) -> &'static str {
        match self {
            YColumn::SigmaMinusSq => "sigma_minus_sq",
            YColumn::Area => "sigma_plus*sigma_minus",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Figure {
    pub id: u8,
    pub title: String,
    pub axis: &'static str,
    pub y: YColumn,
    pub log_x: bool,
    pub curves: Vec<Curve>,
}

fn squeeze_axis(opts: &FigureOptions) -> Vec<f64> {
    (0..opts.points)
        .map(|i| opts.squeeze_max * i as f64 / (opts.points - 1) as f64)
        .collect()
}

fn tau_axis(opts: &FigureOptions) -> Vec<f64> {
    let (l0, l1) = (opts.tau_min.ln(), opts.tau_max.ln());
    (0..opts.points)
        .map(|i| (l0 + (l1 - l0) * i as f64 / (opts.points - 1) as f64).exp())
        .collect()
}

fn validate(opts: &FigureOptions) -> Result<(), CliError> {
    if opts.squeeze_max <= 0.0 || opts.squeeze_max.is_nan() {
        return Err(CliError::InvalidArg(
            "squeeze axis needs a positive max".into(),
        ));
    }
    if !(opts.tau_min > 0.0 && opts.tau_min < opts.tau_max) {
        return Err(CliError::InvalidArg(
            "tau axis needs 0 < tau_min < tau_max".into(),
        ));
    }
    if opts.points < 2 {
        return Err(CliError::InvalidArg(
            "figures need at least 2 points".into(),
        ));
    }
    Ok(())
}

/// Build one of the six figures.
pub fn figure(id: u8, opts: &FigureOptions, pol: &TruncationPolicy) -> Result<Figure, CliError> {
    validate(opts)?;
    let eval = |xi: f64, tau: f64, squeeze: f64, ell: u32| -> Result<RowData, CliError> {
        eval_point(xi, tau, squeeze, ell, None, pol).map_err(CliError::InvalidArg)
    };
    let tau_curves = [0.1, 1.0, 10.0];
    let squeeze_curves = [1.0, 3.0, 10.0];
    let fig = match id {
        1 | 2 => {
            let y = if id == 1 {
                YColumn::SigmaMinusSq
            } else {
                YColumn::Area
            };
            let mut curves = Vec::new();
            for &tau in &tau_curves {
                let mut rows = Vec::new();
                for &sq in &squeeze_axis(opts) {
                    rows.push((sq, eval(0.0, tau, sq, 0)?));
                }
                curves.push(Curve {
                    label: format!("tau={tau}"),
                    rows,
                });
            }
            Figure {
                id,
                title: if id == 1 {
                    "Minimum variance vs squeezing parameter".into()
                } else {
                    "Uncertainty area vs squeezing parameter".into()
                },
                axis: "Xi",
                y,
                log_x: false,
                curves,
            }
        }
        3 => {
            let mut curves = Vec::new();
            for &sq in &squeeze_curves {
                let mut rows = Vec::new();
                for &tau in &tau_axis(opts) {
                    rows.push((tau, eval(0.0, tau, sq, 0)?));
                }
                curves.push(Curve {
                    label: format!("Xi={sq}"),
                    rows,
                });
            }
            Figure {
                id,
                title: "Uncertainty area vs beam width ratio".into(),
                axis: "tau",
                y: YColumn::Area,
                log_x: true,
                curves,
            }
        }
        4 | 5 => {
            let y = if id == 4 {
                YColumn::SigmaMinusSq
            } else {
                YColumn::Area
            };
            let mut curves = Vec::new();
            for ell in 0..=5u32 {
                let mut rows = Vec::new();
                for &sq in &squeeze_axis(opts) {
                    rows.push((sq, eval(0.0, 1.0, sq, ell)?));
                }
                curves.push(Curve {
                    label: format!("ell={ell}"),
                    rows,
                });
            }
            Figure {
                id,
                title: if id == 4 {
                    "Petal-mode minimum variance vs squeezing parameter (tau=1)".into()
                } else {
                    "Petal-mode uncertainty area vs squeezing parameter (tau=1)".into()
                },
                axis: "Xi",
                y,
                log_x: false,
                curves,
            }
        }
        6 => {
            let mut curves = Vec::new();
            for ell in 0..=5u32 {
                let mut rows = Vec::new();
                for &tau in &tau_axis(opts) {
                    rows.push((tau, eval(0.0, tau, 7.0, ell)?));
                }
                curves.push(Curve {
                    label: format!("ell={ell}"),
                    rows,
                });
            }
            Figure {
                id,
                title: "Petal-mode uncertainty area vs beam width ratio (Xi=7)".into(),
                axis: "tau",
                y: YColumn::Area,
                log_x: true,
                curves,
            }
        }
        other => {
            return Err(CliError::InvalidArg(format!(
                "unknown figure {other}; expected 1..=6"
            )))
        }
    };
    Ok(fig)
}

pub fn all_figures(opts: &FigureOptions, pol: &TruncationPolicy) -> Result<Vec<Figure>, CliError> {
    (1..=6).map(|id| figure(id, opts, pol)).collect()
}

impl Figure {
    /// Long-format CSV: one row per (curve, axis value).
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# sqz-version: {}\n", env!("CARGO_PKG_VERSION")));
        out.push_str(&format!("# figure: {}\n# title: {}\n", self.id, self.title));
        out.push_str("curve,");
        out.push_str(CSV_HEADER);
        out.push('\n');
        for curve in &self.curves {
            for (v, d) in &curve.rows {
                out.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    curve.label,
                    self.axis,
                    fmt_f64(*v),
                    fmt_f64(d.sigma_minus_sq),
                    fmt_f64(d.sigma_plus_sq),
                    fmt_f64(d.area),
                    d.terms_used,
                    fmt_f64(d.est_rel_err),
                ));
            }
        }
        out
    }

    pub fn to_svg(&self) -> String {
        let plot = Plot {
            title: self.title.clone(),
            x_label: self.axis.to_string(),
            y_label: self.y.label().to_string(),
            log_x: self.log_x,
            series: self
                .curves
                .iter()
                .map(|c| Series {
                    label: c.label.clone(),
                    points: c.rows.iter().map(|(v, d)| (*v, self.y.pick(d))).collect(),
                })
                .collect(),
        };
        svg::render(&plot)
    }

    /// Write `f<id>.csv` and `f<id>.svg` into the output directory.
    pub fn write_into(&self, outdir: &Path) -> Result<(), CliError> {
        std::fs::create_dir_all(outdir).map_err(|source| CliError::Write {
            path: outdir.to_path_buf(),
            source,
        })?;
        for (ext, contents) in [("csv", self.to_csv()), ("svg", self.to_svg())] {
            let path = outdir.join(format!("f{}.{ext}", self.id));
            std::fs::write(&path, contents).map_err(|source| CliError::Write {
                path: path.clone(),
                source,
            })?;
        }
        Ok(())
    }
}
