//! Sideband amplitudes of the driven barrier.
//!
//! Matching the Floquet expansion on both sides of the oscillating point
//! potential gives, for `s_n = e^{iηn} φ_n⁺(0) t_n`,
//!
//! ```text
//! 2 χ_n s_n + β (s_{n−1} + s_{n+1}) = 2 χ_0 φ_0⁺(0) δ_{n0}
//! ```
//!
//! The infinite system is truncated to a finite grid with `s = 0` outside
//! it. [`solve`] grows the grid until the edge amplitudes are negligible and
//! an enlargement no longer changes the interior.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::barrier::{BarrierModel, ChannelFunctions, OpaqueRect};
use crate::error::{Error, Result};
use crate::linalg::{dense_solve, Tridiagonal};
use crate::model::{BarrierSpec, DriveSpec, IncidentSpec, SidebandGrid};

/// Largest system handed to the dense fallback solver.
pub const DENSE_FALLBACK_LIMIT: usize = 2048;

/// How `χ_n` is obtained for each channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChiModel {
    /// Exact rectangular-barrier Green function.
    #[default]
    Exact,
    /// `χ ≈ −2ρ` below the barrier top.
    Opaque,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    /// Edge amplitudes must fall below `tol_edge · max|s_n|`.
    pub tol_edge: f64,
    /// Interior amplitudes may change by at most `tol_conv · max|s_n|`
    /// between successive grids.
    pub tol_conv: f64,
    /// Maximum number of channels.
    pub n_cap: usize,
    pub chi_model: ChiModel,
    /// Extra channels on each side of the initial grid.
    pub margin: i64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol_edge: 1e-12,
            tol_conv: 1e-10,
            n_cap: 1 << 16,
            chi_model: ChiModel::Exact,
            margin: 16,
        }
    }
}

/// The truncated sideband system.
#[derive(Debug, Clone, PartialEq)]
pub struct SidebandSystem {
    pub grid: SidebandGrid,
    pub matrix: Tridiagonal,
    pub rhs: Vec<Complex64>,
}

/// Builds the tridiagonal sideband system from per-channel data ordered by `n`.
pub fn assemble(
    grid: SidebandGrid,
    channels: &[ChannelFunctions],
    drive: &DriveSpec,
) -> SidebandSystem {
    assert_eq!(channels.len(), grid.len(), "one channel per grid index");
    let n = grid.len();
    let beta = Complex64::new(drive.beta, 0.0);
    let diag = channels.iter().map(|c| 2.0 * c.chi).collect();
    let off = vec![beta; n.saturating_sub(1)];
    let mut rhs = vec![Complex64::default(); n];
    let zero = grid.index_of(0).expect("grid contains n = 0");
    let c0 = &channels[zero];
    rhs[zero] = 2.0 * c0.chi * c0.phi_plus_0;
    SidebandSystem {
        grid,
        matrix: Tridiagonal {
            sub: off.clone(),
            diag,
            sup: off,
        },
        rhs,
    }
}

/// Solved sideband amplitudes on one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SidebandSolution {
    pub grid: SidebandGrid,
    pub omega0: f64,
    pub drive: DriveSpec,
    pub channels: Vec<ChannelFunctions>,
    /// `s_n`
    pub s: Vec<Complex64>,
    /// `t_n = e^{−iηn} s_n / φ_n⁺(0)`
    pub t: Vec<Complex64>,
    /// `r_n`, from continuity at `x = 0`
    pub r: Vec<Complex64>,
    /// Transmitted flux per channel as a fraction of the incident flux;
    /// zero for closed channels.
    pub channel_flux_out: Vec<f64>,
    /// Reflected flux per channel as a fraction of the incident flux.
    pub channel_flux_back: Vec<f64>,
    /// Backward error of the linear solve.
    pub residual: f64,
    /// `max(|s_{n_min}|, |s_{n_max}|)`
    pub edge_magnitude: f64,
    /// Largest interior change against the previous grid (`NaN` for a single
    /// fixed-grid solve).
    pub change: f64,
    pub tol_edge: f64,
    pub tol_conv: f64,
    /// Whether both truncation criteria were met.
    pub converged: bool,
}

impl SidebandSolution {
    pub fn max_abs_s(&self) -> f64 {
        self.s.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn s_at(&self, n: i64) -> Option<Complex64> {
        self.grid.index_of(n).map(|i| self.s[i])
    }

    /// Outgoing amplitude `t_n τ_n` of the transmitted wave `e^{ik_n x}`.
    pub fn transmitted_amplitudes(&self) -> Vec<Complex64> {
        self.t
            .iter()
            .zip(&self.channels)
            .map(|(t, c)| t * c.tau)
            .collect()
    }

    /// Outgoing amplitude of the reflected wave `e^{−ik_n x}`, including the
    /// static reflection of the incident wave in channel 0.
    pub fn reflected_amplitudes(&self) -> Vec<Complex64> {
        self.r
            .iter()
            .zip(&self.channels)
            .map(|(r, c)| {
                let direct = if c.n == 0 { c.reflection } else { Complex64::default() };
                direct + r * c.tau
            })
            .collect()
    }

    pub fn total_transmitted(&self) -> f64 {
        self.channel_flux_out.iter().sum()
    }

    pub fn total_reflected(&self) -> f64 {
        self.channel_flux_back.iter().sum()
    }
}

/// Reflection amplitudes making `ψ` continuous at `x = 0` in every harmonic:
/// `r_n = (t_n φ_n⁺(0) − δ_{n0} φ_0⁺(0)) / φ_n⁻(0)`.
pub fn reflection_amplitudes(
    t: &[Complex64],
    channels: &[ChannelFunctions],
) -> Result<Vec<Complex64>> {
    t.iter()
        .zip(channels)
        .map(|(t, c)| {
            if c.phi_minus_0.norm() < 1e-290 || !c.phi_minus_0.norm().is_finite() {
                return Err(Error::DegenerateChannel { n: c.n });
            }
            let incident = if c.n == 0 { c.phi_plus_0 } else { Complex64::default() };
            Ok((t * c.phi_plus_0 - incident) / c.phi_minus_0)
        })
        .collect()
}

/// Relative violation of probability-current conservation,
/// `|1 − Σ_open (k_n/k_0)(|refl_n|² + |trans_n|²)|`.
pub fn flux_balance(solution: &SidebandSolution) -> f64 {
    (1.0 - solution.total_transmitted() - solution.total_reflected()).abs()
}

fn channels_for(
    model: &dyn BarrierModel,
    grid: SidebandGrid,
    incident: &IncidentSpec,
    drive: &DriveSpec,
) -> Vec<ChannelFunctions> {
    grid.indices()
        .zip(grid.energies(incident, drive))
        .map(|(n, e)| model.channel(n, e))
        .collect()
}

fn linear_solve(system: &SidebandSystem) -> Result<Vec<Complex64>> {
    match system.matrix.solve(&system.rhs) {
        Ok(x) => Ok(x),
        Err(e) if system.grid.len() <= DENSE_FALLBACK_LIMIT => {
            dense_solve(&system.matrix.to_dense(), &system.rhs)
                .map_err(|d| Error::SolverBreakdown(format!("{e}; dense fallback: {d}")))
        }
        Err(e) => Err(e),
    }
}

/// Solves on a fixed grid without any truncation check.
pub fn solve_on_grid(
    model: &dyn BarrierModel,
    drive: &DriveSpec,
    incident: &IncidentSpec,
    grid: SidebandGrid,
) -> Result<SidebandSolution> {
    let channels = channels_for(model, grid, incident, drive);
    let system = assemble(grid, &channels, drive);
    let s = linear_solve(&system)?;
    let residual = system.matrix.backward_error(&s, &system.rhs);

    let t: Vec<Complex64> = grid
        .indices()
        .zip(&s)
        .zip(&channels)
        .map(|((n, s), c)| {
            if c.phi_plus_0.norm() < 1e-290 {
                return Err(Error::DegenerateChannel { n });
            }
            Ok(Complex64::from_polar(1.0, -drive.eta * n as f64) * s / c.phi_plus_0)
        })
        .collect::<Result<_>>()?;
    let r = reflection_amplitudes(&t, &channels)?;

    let k0 = channels[grid.index_of(0).expect("n = 0 on grid")].k.re;
    let mut flux_out = vec![0.0; grid.len()];
    let mut flux_back = vec![0.0; grid.len()];
    for (i, c) in channels.iter().enumerate() {
        if !c.is_open() {
            continue;
        }
        let direct = if c.n == 0 { c.reflection } else { Complex64::default() };
        flux_out[i] = c.k.re / k0 * (t[i] * c.tau).norm_sqr();
        flux_back[i] = c.k.re / k0 * (direct + r[i] * c.tau).norm_sqr();
    }
    let edge_magnitude = s[0].norm().max(s[s.len() - 1].norm());

    Ok(SidebandSolution {
        grid,
        omega0: incident.omega0,
        drive: *drive,
        channels,
        s,
        t,
        r,
        channel_flux_out: flux_out,
        channel_flux_back: flux_back,
        residual,
        edge_magnitude,
        change: f64::NAN,
        tol_edge: f64::NAN,
        tol_conv: f64::NAN,
        converged: false,
    })
}

/// Grid the adaptive solve starts from: down to the zero-energy channel and
/// up past `V + β²/4`, plus a margin on both sides.
pub fn initial_grid(
    barrier: &BarrierSpec,
    drive: &DriveSpec,
    incident: &IncidentSpec,
    options: &SolverOptions,
) -> SidebandGrid {
    let cap = (options.n_cap / 4).max(1) as f64;
    let below = (incident.omega0 / drive.omega).ceil().min(cap) as i64;
    let reach = (barrier.height + drive.beta * drive.beta / 4.0 - incident.omega0).max(0.0);
    let above = (reach / drive.omega).ceil().min(cap) as i64;
    SidebandGrid {
        n_min: -(below + options.margin),
        n_max: above + options.margin,
    }
}

/// Adaptive solve with the exact or opaque `χ_n` selected in `options`.
pub fn solve(
    barrier: &BarrierSpec,
    drive: &DriveSpec,
    incident: &IncidentSpec,
    options: &SolverOptions,
) -> Result<SidebandSolution> {
    let start = initial_grid(barrier, drive, incident, options);
    match options.chi_model {
        ChiModel::Exact => solve_adaptive(barrier, drive, incident, options, start),
        ChiModel::Opaque => solve_adaptive(&OpaqueRect(*barrier), drive, incident, options, start),
    }
}

/// Grows `start` until both truncation criteria hold.
///
/// A side whose edge amplitude is too large is doubled; a side that already
/// passes is still extended by a quarter so the next solve can confirm the
/// interior has settled.
pub fn solve_adaptive(
    model: &dyn BarrierModel,
    drive: &DriveSpec,
    incident: &IncidentSpec,
    options: &SolverOptions,
    start: SidebandGrid,
) -> Result<SidebandSolution> {
    drive.check()?;
    incident.check()?;
    if start.len() > options.n_cap {
        return Err(Error::NonConvergence {
            cap: options.n_cap,
            edge: f64::NAN,
            change: f64::NAN,
        });
    }
    let mut grid = start;
    let mut prev: Option<SidebandSolution> = None;
    loop {
        let mut sol = solve_on_grid(model, drive, incident, grid)?;
        let scale = sol.max_abs_s();
        let rel = |v: Complex64| if scale > 0.0 { v.norm() / scale } else { 0.0 };
        let edge_lo = rel(sol.s[0]);
        let edge_hi = rel(sol.s[sol.s.len() - 1]);
        let change = match &prev {
            Some(p) => p
                .grid
                .indices()
                .zip(&p.s)
                .map(|(n, old)| rel(sol.s_at(n).expect("grids are nested") - old))
                .fold(0.0, f64::max),
            None => f64::INFINITY,
        };
        sol.change = change;
        sol.tol_edge = options.tol_edge;
        sol.tol_conv = options.tol_conv;
        if edge_lo < options.tol_edge && edge_hi < options.tol_edge && change < options.tol_conv {
            sol.converged = true;
            return Ok(sol);
        }
        let grow = |extent: i64, failing: bool| {
            let extent = extent.max(8);
            if failing {
                extent
            } else {
                (extent / 4).max(4)
            }
        };
        let next = SidebandGrid {
            n_min: grid.n_min - grow(-grid.n_min, edge_lo >= options.tol_edge),
            n_max: grid.n_max + grow(grid.n_max, edge_hi >= options.tol_edge),
        };
        if next.len() > options.n_cap {
            return Err(Error::NonConvergence {
                cap: options.n_cap,
                edge: edge_lo.max(edge_hi),
                change,
            });
        }
        grid = next;
        prev = Some(sol);
    }
}
