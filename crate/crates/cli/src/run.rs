use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use starkwell::dynamics::{ionization_curve, profile_points, propagator_a, IonizationCurve};
use starkwell::fig1::fig1_table;
use starkwell::lambda::{i3_exact, in_approx, lambda_a, LambdaProfile};
use starkwell::oracle::{identity_checks, volterra_solve};
use starkwell::Complex64;

use crate::config::{OutputKind, SweepConfig};
use crate::CliError;

/// Half-width and point count of the propagator x-slice.
const SLICE_HALF_WIDTH: f64 = 4.0;
const SLICE_POINTS: usize = 41;
/// Rows per oracle cross-check table.
const ORACLE_SAMPLES: usize = 25;
/// Finest Volterra step and the step-count cap.
const VOLTERRA_H: f64 = 2e-3;
const VOLTERRA_MAX_STEPS: f64 = 20_000.0;
/// Above this `f^2 t^3 / 24` the exact I_3 is not evaluated.
const I3_EXACT_LIMIT: f64 = 50.0;

pub struct Table {
    pub name: String,
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn new(name: String, header: &[&'static str]) -> Self {
        Self { name, header: header.to_vec(), rows: Vec::new() }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    fn write(&self, dir: &Path) -> Result<(), CliError> {
        let mut w = csv::Writer::from_path(dir.join(&self.name))?;
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn cplx(z: Complex64) -> [String; 2] {
    [num(z.re), num(z.im)]
}

/// A point whose series or checks did not converge.
#[derive(Debug, Clone, Serialize)]
pub struct Flag {
    pub output: OutputKind,
    pub f: Option<f64>,
    pub t: Option<f64>,
    pub detail: String,
}

#[derive(Serialize)]
struct Manifest<'a> {
    library: &'static str,
    version: &'static str,
    config: &'a SweepConfig,
    files: Vec<&'a str>,
    non_converged: &'a [Flag],
}

pub struct Report {
    pub tables: Vec<Table>,
    pub flags: Vec<Flag>,
}

fn label(f: f64) -> String {
    format!("{f}")
}

/// Grid that starts at 0, as the curve needs; `skip` rows are dropped on output.
fn curve_grid(cfg: &SweepConfig) -> (Vec<f64>, usize) {
    let mut grid = cfg.t_grid.points();
    if grid[0] > 0.0 {
        grid.insert(0, 0.0);
        (grid, 1)
    } else {
        (grid, 0)
    }
}

fn curve(cfg: &SweepConfig, f: f64) -> Result<(IonizationCurve, usize), CliError> {
    let (grid, skip) = curve_grid(cfg);
    Ok((ionization_curve(&grid, f, cfg.n_max, cfg.tol)?, skip))
}

fn ionization(cfg: &SweepConfig, f: f64) -> Result<(Table, Vec<Flag>), CliError> {
    let (cu, skip) = curve(cfg, f)?;
    let mut table = Table::new(
        format!("ionization_f{}.csv", label(f)),
        &[
            "t",
            "amplitude_re",
            "amplitude_im",
            "amplitude_phi_re",
            "amplitude_phi_im",
            "amplitude_delta_re",
            "amplitude_delta_im",
            "probability",
            "decay_reference",
            "normalization",
            "converged",
        ],
    );
    let mut flags = Vec::new();
    for k in skip..cu.grid.len() {
        let t = cu.grid[k];
        let mut r = vec![num(t)];
        r.extend(cplx(cu.amplitude[k]));
        r.extend(cplx(cu.amplitude_phi[k]));
        r.extend(cplx(cu.amplitude_delta[k]));
        r.extend([num(cu.probability[k]), num(cu.decay_reference[k]), num(cu.normalization_constant[k])]);
        r.push((!cu.flagged[k]).to_string());
        table.push(r);
        if cu.flagged[k] {
            flags.push(Flag { output: OutputKind::Ionization, f: Some(f), t: Some(t), detail: "return kernel".into() });
        }
    }
    Ok((table, flags))
}

fn lambda(cfg: &SweepConfig, f: f64) -> Result<(Table, Vec<Flag>), CliError> {
    let grid: Vec<f64> = cfg.t_grid.points().into_iter().filter(|&t| t > 0.0).collect();
    let p = lambda_a(&grid, f, cfg.n_max, cfg.tol)?;
    let mut table = Table::new(
        format!("lambda_f{}.csv", label(f)),
        &["t", "lambda_re", "lambda_im", "remainder_re", "remainder_im", "terms", "est_error", "converged"],
    );
    let mut flags = Vec::new();
    for ((&t, &v), d) in p.grid.iter().zip(&p.smooth_values).zip(&p.diagnostics) {
        let mut r = vec![num(t)];
        r.extend(cplx(v));
        r.extend(cplx(d.value));
        r.extend([d.terms_used.to_string(), num(d.est_error), d.converged.to_string()]);
        table.push(r);
        if !d.converged {
            flags.push(Flag { output: OutputKind::Lambda, f: Some(f), t: Some(t), detail: "n-sum".into() });
        }
    }
    Ok((table, flags))
}

fn propagator_slice(cfg: &SweepConfig, f: f64) -> Result<(Table, Vec<Flag>), CliError> {
    let t = cfg.t_grid.t_max;
    let p = LambdaProfile::sqrt_uniform(t, profile_points(t), f, cfg.n_max, cfg.tol)?;
    let h = 2.0 * SLICE_HALF_WIDTH / (SLICE_POINTS - 1) as f64;
    let values = (0..SLICE_POINTS)
        .into_par_iter()
        .map(|k| {
            let x = -SLICE_HALF_WIDTH + k as f64 * h;
            propagator_a(x, 0.0, t, &p, cfg.tol).map(|v| (x, v))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut table =
        Table::new(format!("propagator_slice_f{}.csv", label(f)), &["x", "xp", "t", "kernel_re", "kernel_im"]);
    for (x, v) in values {
        let mut r = vec![num(x), num(0.0), num(t)];
        r.extend(cplx(v));
        table.push(r);
    }
    let flags = p
        .grid
        .iter()
        .zip(&p.diagnostics)
        .filter(|(_, d)| !d.converged)
        .map(|(&s, _)| Flag {
            output: OutputKind::PropagatorSlice,
            f: Some(f),
            t: Some(s),
            detail: "return kernel".into(),
        })
        .collect();
    Ok((table, flags))
}

fn fig1() -> Result<Table, CliError> {
    let mut table = Table::new("fig1.csv".into(), &["r", "y", "y_a", "ratio"]);
    for r in fig1_table(10)? {
        table.push(vec![r.r.to_string(), num(r.y), num(r.y_a), num(r.ratio())]);
    }
    Ok(table)
}

fn identities() -> Result<(Table, Vec<Flag>), CliError> {
    let mut table =
        Table::new("identities.csv".into(), &["name", "lhs_re", "lhs_im", "rhs_re", "rhs_im", "residual", "pass"]);
    let mut flags = Vec::new();
    for c in identity_checks()? {
        let mut r = vec![c.name.clone()];
        r.extend(cplx(c.lhs));
        r.extend(cplx(c.rhs));
        r.extend([num(c.residual), c.pass.to_string()]);
        table.push(r);
        if !c.pass {
            flags.push(Flag {
                output: OutputKind::OracleReport,
                f: None,
                t: None,
                detail: format!("identity {}", c.name),
            });
        }
    }
    Ok((table, flags))
}

/// Curve vs Volterra amplitude and approximate vs exact I_3 on sampled times.
fn oracle_report(cfg: &SweepConfig, f: f64) -> Result<Table, CliError> {
    let (cu, skip) = curve(cfg, f)?;
    let g = &cfg.t_grid;
    let target = VOLTERRA_H.max(g.t_max / VOLTERRA_MAX_STEPS);
    let sub = (g.step() / target).ceil().max(1.0);
    let h = g.step() / sub;
    let sol = volterra_solve(g.t_max, h, f)?;
    let stride = ((cu.grid.len() - skip) / ORACLE_SAMPLES).max(1);
    let mut table = Table::new(
        format!("oracle_report_f{}.csv", label(f)),
        &["check", "t", "value_re", "value_im", "reference_re", "reference_im", "abs_diff"],
    );
    let mut push = |name: &str, t: f64, v: Complex64, reference: Complex64| {
        let mut r = vec![name.to_string(), num(t)];
        r.extend(cplx(v));
        r.extend(cplx(reference));
        r.push(num((v - reference).norm()));
        table.push(r);
    };
    for k in (skip..cu.grid.len()).step_by(stride) {
        let t = cu.grid[k];
        let m = (t / h).round();
        if (m * h - t).abs() <= 1e-9 * t.max(1.0) && (m as usize) < sol.values.len() {
            push("amplitude_vs_volterra", t, cu.amplitude[k], sol.bound_amplitude(m as usize, cfg.tol)?);
        }
        if t > 0.0 && f * f * t.powi(3) / 24.0 <= I3_EXACT_LIMIT {
            push("i3_approx_vs_exact", t, in_approx(3, t, f, cfg.tol)?.value, i3_exact(t, f, cfg.tol)?.value);
        }
    }
    Ok(table)
}

fn per_f(cfg: &SweepConfig, kind: OutputKind, f: f64) -> Result<(Table, Vec<Flag>), CliError> {
    match kind {
        OutputKind::Ionization => ionization(cfg, f),
        OutputKind::Lambda => lambda(cfg, f),
        OutputKind::PropagatorSlice => propagator_slice(cfg, f),
        OutputKind::OracleReport => Ok((oracle_report(cfg, f)?, Vec::new())),
        OutputKind::Fig1 => unreachable!("fig1 does not depend on f"),
    }
}

/// Compute every requested table; order follows the config.
pub fn compute(cfg: &SweepConfig) -> Result<Report, CliError> {
    let mut report = Report { tables: Vec::new(), flags: Vec::new() };
    for &kind in &cfg.outputs {
        match kind {
            OutputKind::Fig1 => report.tables.push(fig1()?),
            _ => {
                if kind == OutputKind::OracleReport {
                    let (t, fl) = identities()?;
                    report.tables.push(t);
                    report.flags.extend(fl);
                }
                let results = cfg.f_values.par_iter().map(|&f| per_f(cfg, kind, f)).collect::<Result<Vec<_>, _>>()?;
                for (t, fl) in results {
                    report.tables.push(t);
                    report.flags.extend(fl);
                }
            }
        }
    }
    Ok(report)
}

/// Write the tables and `manifest.json` into the output directory.
pub fn write(cfg: &SweepConfig, report: &Report) -> Result<(), CliError> {
    let dir = &cfg.output_path;
    fs::create_dir_all(dir)?;
    for t in &report.tables {
        t.write(dir)?;
    }
    let manifest = Manifest {
        library: "starkwell",
        version: env!("CARGO_PKG_VERSION"),
        config: cfg,
        files: report.tables.iter().map(|t| t.name.as_str()).collect(),
        non_converged: &report.flags,
    };
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    fs::write(dir.join("manifest.json"), text)?;
    Ok(())
}
