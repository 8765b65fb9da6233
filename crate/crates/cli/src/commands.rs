//! One function per subcommand. Each returns the files it wrote.

use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Serialize;

use floquet_tunnel::airy::airy;
use floquet_tunnel::analytic::{nonactivated_energy, xi0_closed_form, AiryRegimeParams};
use floquet_tunnel::barrier::BarrierModel;
use floquet_tunnel::floquet::{assemble, flux_balance, initial_grid, solve, SidebandSolution, SolverOptions};
use floquet_tunnel::linalg::dense_solve;
use floquet_tunnel::model::{BarrierSpec, DriveSpec, IncidentSpec, SidebandGrid};
use floquet_tunnel::observables::{
    self, activation_energy, compare_exact_analytic, find_resonances, RefineOptions, ScanOptions, WeightMode,
    DEFAULT_SPECTRUM_FLOOR,
};
use floquet_tunnel::timedomain::{
    arrival_time, propagate, sideband_spectrum, write_series, SpectrumRequest, Window,
};

use crate::config::RunConfig;
use crate::output::{fmt_f64, write_csv, write_json};
use crate::{CliError, GENERATED_BY};

pub const FLUX_TOL: f64 = 1e-8;
pub const DENSE_TOL: f64 = 1e-10;
pub const XI0_TOL: f64 = 1e-12;
pub const WRONSKIAN_TOL: f64 = 1e-10;

/// Half-width of the channel window used by the dense cross-check.
const DENSE_HALF_WIDTH: i64 = 100;

#[derive(Serialize)]
struct GridInfo {
    n_min: i64,
    n_max: i64,
}

impl From<SidebandGrid> for GridInfo {
    fn from(g: SidebandGrid) -> Self {
        Self {
            n_min: g.n_min,
            n_max: g.n_max,
        }
    }
}

#[derive(Serialize)]
struct SpectrumSummary {
    generated_by: &'static str,
    omega0: f64,
    grid: GridInfo,
    converged: bool,
    residual: f64,
    flux_balance: f64,
    total_transmitted: f64,
    total_reflected: f64,
    omega_act_amplitude: Option<f64>,
    omega_act_flux: Option<f64>,
}

fn setup(config: &RunConfig) -> Result<(BarrierSpec, DriveSpec, SolverOptions), CliError> {
    Ok((config.barrier()?, config.drive()?, config.solver_options()?))
}

pub fn spectrum(config: &RunConfig, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let (barrier, drive, opts) = setup(config)?;
    let incident = config.single_incident()?;
    let sol = solve(&barrier, &drive, &incident, &opts)?;
    let rows: Vec<Vec<String>> = observables::spectrum(&sol, DEFAULT_SPECTRUM_FLOOR)
        .entries
        .iter()
        .map(|e| vec![e.n.to_string(), fmt_f64(e.energy), fmt_f64(e.abs_s), fmt_f64(e.flux_weight)])
        .collect();
    let csv = write_csv(dir, "spectrum.csv", &["n", "E", "abs_s", "flux_weight"], &rows)?;
    let summary = SpectrumSummary {
        generated_by: GENERATED_BY,
        omega0: incident.omega0,
        grid: sol.grid.into(),
        converged: sol.converged,
        residual: sol.residual,
        flux_balance: flux_balance(&sol),
        total_transmitted: sol.total_transmitted(),
        total_reflected: sol.total_reflected(),
        omega_act_amplitude: activation_energy(&sol, WeightMode::Amplitude).ok(),
        omega_act_flux: activation_energy(&sol, WeightMode::Flux).ok(),
    };
    let json = write_json(dir, "spectrum.json", &summary)?;
    Ok(vec![csv, json])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairedResonance {
    /// Index of the nearest predicted suppression energy.
    pub m: Option<u32>,
    pub omega_m_numeric: f64,
    pub omega_m_eq21: Option<f64>,
    pub depth: f64,
}

#[derive(Serialize)]
struct ResonanceReport {
    generated_by: &'static str,
    resonances: Vec<PairedResonance>,
}

/// Predicted suppression energies below the barrier top, in increasing `m`.
pub fn predicted_energies(barrier: &BarrierSpec, drive: &DriveSpec) -> Vec<(u32, f64)> {
    (0u32..100_000)
        .map(|m| (m, nonactivated_energy(barrier, drive, m)))
        .take_while(|(_, e)| *e < barrier.height)
        .filter(|(_, e)| *e > 0.0)
        .collect()
}

/// Pairs each numeric minimum with the nearest predicted energy.
pub fn pair_resonances(
    numeric: &[observables::Resonance],
    predicted: &[(u32, f64)],
) -> Vec<PairedResonance> {
    numeric
        .iter()
        .map(|r| {
            let best = predicted
                .iter()
                .min_by(|a, b| (a.1 - r.omega).abs().total_cmp(&(b.1 - r.omega).abs()));
            PairedResonance {
                m: best.map(|b| b.0),
                omega_m_numeric: r.omega,
                omega_m_eq21: best.map(|b| b.1),
                depth: r.depth,
            }
        })
        .collect()
}

pub fn scan(config: &RunConfig, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let (barrier, drive, solver) = setup(config)?;
    let range = config.incident_range()?;
    let options = ScanOptions {
        solver,
        weights: WeightMode::Amplitude,
        max_failure_fraction: config.solver.max_failure_fraction,
    };
    let result = observables::scan(&barrier, &drive, (range.min, range.max), range.steps, &options)?;
    let rows: Vec<Vec<String>> = result
        .points
        .iter()
        .map(|p| {
            vec![
                fmt_f64(p.omega0),
                fmt_f64(p.omega_act),
                fmt_f64(p.total_flux),
                p.converged.to_string(),
            ]
        })
        .collect();
    let csv = write_csv(dir, "scan.csv", &["omega0", "omega_act", "total_flux", "converged"], &rows)?;
    let found = find_resonances(&result, &RefineOptions::default());
    let report = ResonanceReport {
        generated_by: GENERATED_BY,
        resonances: pair_resonances(&found, &predicted_energies(&barrier, &drive)),
    };
    let json = write_json(dir, "resonances.json", &report)?;
    Ok(vec![csv, json])
}

#[derive(Serialize)]
struct CompareSummary {
    generated_by: &'static str,
    rho: f64,
    xi0: f64,
    scale: f64,
    shift: f64,
    match_n: i64,
    lobe_correlation: f64,
    magnitude_ratio: f64,
    exact_nodes: Vec<i64>,
    analytic_nodes: Vec<f64>,
}

pub fn compare(config: &RunConfig, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let (barrier, drive, opts) = setup(config)?;
    let incident = config.single_incident()?;
    let c = compare_exact_analytic(&barrier, &drive, &incident, &opts)?;
    let rows: Vec<Vec<String>> = c
        .rows
        .iter()
        .map(|r| {
            vec![
                r.n.to_string(),
                fmt_f64(r.energy),
                fmt_f64(r.abs_s),
                fmt_f64(r.xi),
                fmt_f64(r.abs_g),
            ]
        })
        .collect();
    let csv = write_csv(dir, "compare.csv", &["n", "E", "abs_s", "xi", "abs_g"], &rows)?;
    let summary = CompareSummary {
        generated_by: GENERATED_BY,
        rho: c.params.rho,
        xi0: c.params.xi0,
        scale: c.params.scale,
        shift: c.params.shift,
        match_n: c.match_n,
        lobe_correlation: c.lobe_correlation,
        magnitude_ratio: c.magnitude_ratio,
        exact_nodes: c.exact_nodes,
        analytic_nodes: c.analytic_nodes,
    };
    let json = write_json(dir, "compare.json", &summary)?;
    Ok(vec![csv, json])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Worst measured residual; `null` when the check could not run.
    pub residual: Option<f64>,
    pub tolerance: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub generated_by: &'static str,
    pub all_passed: bool,
    pub checks: Vec<Check>,
}

fn flux_check(barrier: &BarrierSpec, drive: &DriveSpec, inc: &IncidentSpec, opts: &SolverOptions) -> Check {
    let name = format!("flux_balance@{}", fmt_f64(inc.omega0));
    match solve(barrier, drive, inc, opts) {
        Ok(sol) => {
            let deficit = flux_balance(&sol);
            Check {
                name,
                passed: sol.converged && deficit <= FLUX_TOL,
                residual: Some(deficit),
                tolerance: FLUX_TOL,
                detail: format!("{} channels", sol.grid.len()),
            }
        }
        Err(e) => Check {
            name,
            passed: false,
            residual: None,
            tolerance: FLUX_TOL,
            detail: e.to_string(),
        },
    }
}

/// Relative max-norm gap between the tridiagonal and dense LU solutions of
/// the sideband system on a window of at most 201 channels.
pub fn dense_gap(
    barrier: &BarrierSpec,
    drive: &DriveSpec,
    inc: &IncidentSpec,
    opts: &SolverOptions,
) -> Result<(f64, usize), CliError> {
    let g = initial_grid(barrier, drive, inc, opts);
    let grid = SidebandGrid::new(g.n_min.max(-DENSE_HALF_WIDTH), g.n_max.min(DENSE_HALF_WIDTH))?;
    let channels: Vec<_> = grid
        .indices()
        .zip(grid.energies(inc, drive))
        .map(|(n, e)| barrier.channel(n, e))
        .collect();
    let sys = assemble(grid, &channels, drive);
    let fast = sys.matrix.solve(&sys.rhs)?;
    let dense = dense_solve(&sys.matrix.to_dense(), &sys.rhs)?;
    Ok((relative_gap(&fast, &dense), grid.len()))
}

pub fn relative_gap(a: &[Complex64], b: &[Complex64]) -> f64 {
    let diff = a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    let scale = b.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

fn dense_check(barrier: &BarrierSpec, drive: &DriveSpec, inc: &IncidentSpec, opts: &SolverOptions) -> Check {
    let name = format!("dense_oracle@{}", fmt_f64(inc.omega0));
    match dense_gap(barrier, drive, inc, opts) {
        Ok((gap, len)) => Check {
            name,
            passed: gap <= DENSE_TOL,
            residual: Some(gap),
            tolerance: DENSE_TOL,
            detail: format!("{len} channels"),
        },
        Err(e) => Check {
            name,
            passed: false,
            residual: None,
            tolerance: DENSE_TOL,
            detail: e.to_string(),
        },
    }
}

fn xi0_check(barrier: &BarrierSpec, drive: &DriveSpec, inc: &IncidentSpec) -> Check {
    let name = format!("xi0_identity@{}", fmt_f64(inc.omega0));
    match AiryRegimeParams::new(barrier, drive, inc) {
        Ok(p) => {
            let closed = xi0_closed_form(p.rho, drive.beta, drive.omega);
            let err = (p.xi0 - closed).abs() / closed.abs().max(1.0);
            Check {
                name,
                passed: err <= XI0_TOL,
                residual: Some(err),
                tolerance: XI0_TOL,
                detail: format!("xi0 = {}", fmt_f64(p.xi0)),
            }
        }
        Err(e) => Check {
            name,
            passed: true,
            residual: None,
            tolerance: XI0_TOL,
            detail: format!("not applicable: {e}"),
        },
    }
}

/// Worst `|π W(x) − 1|` for unscaled Airy values on 1000 points in `[−20, 20]`.
pub fn wronskian_residual() -> Result<f64, CliError> {
    let mut worst: f64 = 0.0;
    for i in 0..1000 {
        let x = -20.0 + 40.0 * i as f64 / 999.0;
        let v = airy(x)?;
        worst = worst.max((PI * v.wronskian() - 1.0).abs());
    }
    Ok(worst)
}

fn wronskian_check() -> Check {
    let (passed, residual, detail) = match wronskian_residual() {
        Ok(r) => (r <= WRONSKIAN_TOL, Some(r), "1000 points on [-20, 20]".to_string()),
        Err(e) => (false, None, e.to_string()),
    };
    Check {
        name: "airy_wronskian".into(),
        passed,
        residual,
        tolerance: WRONSKIAN_TOL,
        detail,
    }
}

pub fn validation_report(config: &RunConfig) -> Result<ValidationReport, CliError> {
    let (barrier, drive, opts) = setup(config)?;
    let incidents = config.any_incident()?;
    let mut checks = Vec::new();
    for inc in &incidents {
        checks.push(flux_check(&barrier, &drive, inc, &opts));
        checks.push(dense_check(&barrier, &drive, inc, &opts));
        checks.push(xi0_check(&barrier, &drive, inc));
    }
    checks.push(wronskian_check());
    Ok(ValidationReport {
        generated_by: GENERATED_BY,
        all_passed: checks.iter().all(|c| c.passed),
        checks,
    })
}

pub fn validate(config: &RunConfig, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let report = validation_report(config)?;
    let path = write_json(dir, "validate.json", &report)?;
    if !report.all_passed {
        let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        return Err(CliError::Validation(format!(
            "{} (report in {})",
            failed.join(", "),
            path.display()
        )));
    }
    Ok(vec![path])
}

#[derive(Serialize)]
struct OracleSummary {
    generated_by: &'static str,
    omega0: f64,
    norm_drift: f64,
    transmitted_fraction: f64,
    reflected_fraction: f64,
    echo_warning: bool,
    arrival_time: f64,
    samples: usize,
    floquet_total_transmitted: f64,
}

fn floquet_flux(sol: &SidebandSolution, n: i64) -> f64 {
    sol.grid.index_of(n).map_or(0.0, |i| sol.channel_flux_out[i])
}

pub fn oracle(config: &RunConfig, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let (barrier, drive, opts) = setup(config)?;
    let incident = config.single_incident()?;
    let (grid, packet) = config.oracle_setup(&incident)?;
    let report = propagate(&grid, &packet, &barrier, &drive)?;
    let sol = solve(&barrier, &drive, &incident, &opts)?;
    let request = SpectrumRequest {
        f_min: 0.5 * drive.omega.min(incident.omega0),
        f_max: (2.0 * barrier.height).max(incident.omega0 + 20.0 * drive.omega),
        resolution: drive.omega / 4.0,
        threshold: 1e-5,
        window: Window::Rectangular,
    };
    let peaks = sideband_spectrum(&report.series, &request)?;
    let rows: Vec<Vec<String>> = peaks
        .iter()
        .map(|p| {
            let n = ((p.frequency - incident.omega0) / drive.omega).round() as i64;
            vec![
                n.to_string(),
                fmt_f64(p.frequency),
                fmt_f64(p.power),
                fmt_f64(p.power * p.frequency.sqrt()),
                fmt_f64(floquet_flux(&sol, n)),
            ]
        })
        .collect();
    let mut files = vec![write_csv(
        dir,
        "oracle.csv",
        &["n", "frequency", "power", "power_times_k", "floquet_flux"],
        &rows,
    )?];
    let summary = OracleSummary {
        generated_by: GENERATED_BY,
        omega0: incident.omega0,
        norm_drift: report.norm_drift,
        transmitted_fraction: report.transmitted_fraction,
        reflected_fraction: report.reflected_fraction,
        echo_warning: report.echo_warning,
        arrival_time: arrival_time(&report.series),
        samples: report.series.samples.len(),
        floquet_total_transmitted: sol.total_transmitted(),
    };
    files.push(write_json(dir, "oracle.json", &summary)?);
    if config.oracle.dump {
        let path = dir.join("series.bin");
        let io = |source| CliError::Io {
            path: path.clone(),
            source,
        };
        let mut w = BufWriter::new(File::create(&path).map_err(io)?);
        write_series(&mut w, &grid, &report.series).map_err(io)?;
        w.flush().map_err(io)?;
        files.push(path);
    }
    Ok(files)
}
