use clap::{Parser, Subcommand};
use sqz_cli::sweep::{Axis, AxisValues, FixedParams, SweepSpec};
use sqz_cli::verify::Suite;
use sqz_cli::{fmt_f64, policy_from_env, CliError};
use sqz_core::params;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

/// Homodyne squeezing predictions for multimode parametric
/// down-conversion.
#[derive(Parser)]
#[command(name = "sqz", version, about)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Reduce a physical configuration to the dimensionless parameters.
    Reduce {
        /// JSON config file with a top-level `physical` object.
        #[arg(long)]
        config: PathBuf,
        /// Local-oscillator phase (radians).
        #[arg(long, default_value_t = 0.0)]
        theta: f64,
    },
    /// Sweep one reduced parameter and write a CSV table.
    Sweep {
        /// Axis name: Xi, tau, xi, ell or theta.
        #[arg(long)]
        axis: String,
        #[arg(long)]
        min: f64,
        #[arg(long)]
        max: f64,
        #[arg(long)]
        points: usize,
        /// Fix a remaining parameter, e.g. --fix tau=1 (repeatable).
        #[arg(long = "fix", value_name = "K=V")]
        fix: Vec<String>,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Regenerate the reference figures as CSV + SVG.
    Figures {
        /// Figure number 1-6, or `all`.
        #[arg(long)]
        which: String,
        #[arg(long)]
        outdir: PathBuf,
        /// Override the squeeze-axis maximum (figures 1, 2, 4, 5).
        #[arg(long)]
        xi_max: Option<f64>,
        /// Override the log-spaced tau axis (figures 3, 6).
        #[arg(long)]
        tau_min: Option<f64>,
        #[arg(long)]
        tau_max: Option<f64>,
        /// Points per curve.
        #[arg(long)]
        points: Option<usize>,
    },
    /// Run a module verification suite.
    Verify {
        /// Suite name: series, hypergeom, quad, kernel, modes or all.
        #[arg(long)]
        suite: String,
        /// Also write the kernel broadening table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.cmd {
        Cmd::Reduce { config, theta } => {
            let cfg = sqz_cli::config::load_config(&config)?;
            let rp = params::reduce(&cfg, theta)?;
            let margin = params::thin_crystal_margin(&cfg)?;
            println!("xi      = {}", fmt_f64(rp.xi));
            println!("tau     = {}", fmt_f64(rp.tau));
            println!("Xi      = {}", fmt_f64(rp.squeeze));
            println!("delta_p = {}", fmt_f64(cfg.fractional_bandwidth()));
            println!("margin  = {}", fmt_f64(margin.ratio));
            if margin.weak {
                eprintln!(
                    "advisory: thin-crystal assumption weak (margin = {:.3e} >= {})",
                    margin.ratio,
                    params::THIN_CRYSTAL_ADVISORY
                );
            }
            Ok(true)
        }
        Cmd::Sweep {
            axis,
            min,
            max,
            points,
            fix,
            out,
        } => {
            let mut fixed = FixedParams::default();
            fixed.apply(&fix)?;
            let spec = SweepSpec {
                axis: Axis::from_str(&axis)?,
                values: AxisValues::Linear {
                    lo: min,
                    hi: max,
                    points,
                },
                fixed,
                policy: policy_from_env()?,
            };
            let table = sqz_cli::sweep::run_sweep(&spec)?;
            let failed = table.rows.iter().filter(|r| r.outcome.is_err()).count();
            std::fs::write(&out, table.to_csv()).map_err(|source| CliError::Write {
                path: out.clone(),
                source,
            })?;
            if failed > 0 {
                eprintln!(
                    "{failed} of {} rows failed; see CSV annotations",
                    table.rows.len()
                );
            }
            Ok(true)
        }
        Cmd::Figures {
            which,
            outdir,
            xi_max,
            tau_min,
            tau_max,
            points,
        } => {
            let mut opts = sqz_cli::figures::FigureOptions::default();
            if let Some(v) = xi_max {
                opts.squeeze_max = v;
            }
            if let Some(v) = tau_min {
                opts.tau_min = v;
            }
            if let Some(v) = tau_max {
                opts.tau_max = v;
            }
            if let Some(v) = points {
                opts.points = v;
            }
            let pol = policy_from_env()?;
            let ids: Vec<u8> = if which == "all" {
                (1..=6).collect()
            } else {
                vec![which.parse().map_err(|_| {
                    CliError::InvalidArg(format!("--which expects 1..=6 or `all`, got {which:?}"))
                })?]
            };
            for id in ids {
                let fig = sqz_cli::figures::figure(id, &opts, &pol)?;
                fig.write_into(&outdir)?;
                eprintln!("wrote f{id}.csv and f{id}.svg to {}", outdir.display());
            }
            Ok(true)
        }
        Cmd::Verify { suite, csv } => {
            let suite = Suite::from_str(&suite)?;
            let report = sqz_cli::verify::run_suite(suite);
            for c in &report.checks {
                println!(
                    "[{}] {:<40} {}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.detail
                );
            }
            if !report.broadening.is_empty() {
                println!();
                print!("{}", sqz_cli::verify::broadening_text(&report.broadening));
                if let Some(path) = csv {
                    std::fs::write(&path, sqz_cli::verify::broadening_csv(&report.broadening))
                        .map_err(|source| CliError::Write {
                            path: path.clone(),
                            source,
                        })?;
                    eprintln!("wrote broadening table to {}", path.display());
                }
            }
            let passed = report.checks.iter().filter(|c| c.passed).count();
            println!("\n{passed}/{} checks passed", report.checks.len());
            Ok(report.all_passed())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
