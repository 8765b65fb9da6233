//! JSON run configuration.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use floquet_tunnel::floquet::SolverOptions;
use floquet_tunnel::model::{BarrierSpec, DriveSpec, IncidentSpec};
use floquet_tunnel::timedomain::{DeltaShape, GridConfig, WavepacketSpec};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub barrier: BarrierSection,
    pub drive: DriveSection,
    #[serde(default)]
    pub incident: IncidentSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub oracle: OracleSection,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BarrierSection {
    #[serde(rename = "V")]
    pub height: f64,
    /// Half-width of the barrier.
    #[serde(rename = "L")]
    pub half_length: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveSection {
    pub beta: f64,
    pub omega: f64,
    #[serde(default)]
    pub eta: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IncidentSection {
    pub omega0: Option<f64>,
    pub range: Option<RangeSection>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeSection {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub tol_edge: f64,
    pub tol_conv: f64,
    pub n_cap: usize,
    /// Largest tolerated fraction of failed scan points.
    pub max_failure_fraction: f64,
}

impl Default for SolverSection {
    fn default() -> Self {
        let d = SolverOptions::default();
        Self {
            tol_edge: d.tol_edge,
            tol_conv: d.tol_conv,
            n_cap: d.n_cap,
            max_failure_fraction: 0.1,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
}

/// Time-domain run settings; the packet sits `6·sigma` left of the barrier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleSection {
    pub sigma: f64,
    pub dx: f64,
    pub dt: f64,
    pub total_time: f64,
    /// Gaussian width standing in for the point drive; `0` selects the
    /// single-site lattice delta.
    pub delta_width: f64,
    /// Detector distance beyond the right barrier edge.
    pub detector_offset: f64,
    /// Time between detector samples.
    pub sample_interval: f64,
    pub dump: bool,
}

impl Default for OracleSection {
    fn default() -> Self {
        Self {
            sigma: 35.0,
            dx: 0.05,
            dt: 0.05,
            total_time: 400.0,
            delta_width: 0.1,
            detector_offset: 20.0,
            sample_interval: 0.2,
            dump: false,
        }
    }
}

fn field(name: &str, reason: impl Into<String>) -> CliError {
    CliError::Config(format!("{name}: {}", reason.into()))
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        if text.trim().is_empty() {
            return Err(CliError::Config("configuration file is empty".into()));
        }
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn barrier(&self) -> Result<BarrierSpec, CliError> {
        BarrierSpec::new(self.barrier.height, self.barrier.half_length).map_err(CliError::from)
    }

    pub fn drive(&self) -> Result<DriveSpec, CliError> {
        DriveSpec::new(self.drive.beta, self.drive.omega, self.drive.eta).map_err(CliError::from)
    }

    pub fn solver_options(&self) -> Result<SolverOptions, CliError> {
        let s = &self.solver;
        if !(s.tol_edge > 0.0) {
            return Err(field("solver.tol_edge", "must be positive"));
        }
        if !(s.tol_conv > 0.0) {
            return Err(field("solver.tol_conv", "must be positive"));
        }
        if s.n_cap == 0 {
            return Err(field("solver.n_cap", "must be positive"));
        }
        if !(0.0..=1.0).contains(&s.max_failure_fraction) {
            return Err(field("solver.max_failure_fraction", "must lie in [0, 1]"));
        }
        Ok(SolverOptions {
            tol_edge: s.tol_edge,
            tol_conv: s.tol_conv,
            n_cap: s.n_cap,
            ..SolverOptions::default()
        })
    }

    /// The single incident energy; a range is rejected.
    pub fn single_incident(&self) -> Result<IncidentSpec, CliError> {
        match (self.incident.omega0, self.incident.range) {
            (Some(om), None) => IncidentSpec::new(om).map_err(CliError::from),
            (None, None) => Err(field("incident.omega0", "missing")),
            (_, Some(_)) => Err(field("incident.range", "this command takes a single incident.omega0")),
        }
    }

    pub fn incident_range(&self) -> Result<RangeSection, CliError> {
        match (self.incident.omega0, self.incident.range) {
            (None, Some(r)) => {
                if !(r.min < r.max) {
                    return Err(field("incident.range", format!("min {} must be below max {}", r.min, r.max)));
                }
                if !(r.min > 0.0) {
                    return Err(field("incident.range.min", "must be positive"));
                }
                if !(r.max < self.barrier.height) {
                    return Err(field("incident.range.max", "must lie below barrier.V"));
                }
                if r.steps < 5 {
                    return Err(field("incident.range.steps", "need at least 5 points"));
                }
                Ok(r)
            }
            (None, None) => Err(field("incident.range", "missing")),
            (Some(_), _) => Err(field("incident.omega0", "this command takes incident.range")),
        }
    }

    /// Incident energies for checks that accept either form.
    pub fn any_incident(&self) -> Result<Vec<IncidentSpec>, CliError> {
        match (self.incident.omega0, self.incident.range) {
            (Some(_), None) => Ok(vec![self.single_incident()?]),
            (None, Some(_)) => {
                let r = self.incident_range()?;
                [r.min, 0.5 * (r.min + r.max), r.max]
                    .into_iter()
                    .map(|om| IncidentSpec::new(om).map_err(CliError::from))
                    .collect()
            }
            (None, None) => Err(field("incident", "needs omega0 or range")),
            (Some(_), Some(_)) => Err(field("incident", "give exactly one of omega0 and range")),
        }
    }

    pub fn oracle_setup(&self, incident: &IncidentSpec) -> Result<(GridConfig, WavepacketSpec), CliError> {
        let o = &self.oracle;
        for (name, v) in [
            ("oracle.sigma", o.sigma),
            ("oracle.dx", o.dx),
            ("oracle.dt", o.dt),
            ("oracle.total_time", o.total_time),
            ("oracle.detector_offset", o.detector_offset),
            ("oracle.sample_interval", o.sample_interval),
        ] {
            if !(v > 0.0) {
                return Err(field(name, "must be positive"));
            }
        }
        let l = self.barrier.half_length;
        let center = -l - 6.0 * o.sigma;
        let delta = if o.delta_width == 0.0 {
            DeltaShape::Lattice
        } else {
            DeltaShape::Gaussian { width: o.delta_width }
        };
        let grid = GridConfig {
            x_min: center - 7.0 * o.sigma,
            x_max: l + 1.2 * o.total_time,
            dx: o.dx,
            dt: o.dt,
            total_time: o.total_time,
            delta,
            detector: l + o.detector_offset,
            stride: (o.sample_interval / o.dt).round().max(1.0) as usize,
        };
        Ok((grid, WavepacketSpec::with_energy(center, o.sigma, incident.omega0)))
    }
}
