//! Physical parameters of the driven barrier.
//!
//! Units are fixed at ħ = 1 and 2m = 1 throughout, so energies carry
//! dimension length⁻² and the wavenumber of a free channel is `√E`.
//! The barrier is a rectangle of height `V` on `[-L, L]`; the drive is the
//! point perturbation `-β δ(x) cos(ωt + η)` at its center.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Square-root opacity above which the barrier is reported as opaque.
pub const OPAQUE_THRESHOLD: f64 = 3.0;

fn require_positive(name: &'static str, value: f64) -> Result<()> {
    if !value.is_finite() {
        return Err(Error::InvalidParameter {
            name,
            reason: format!("must be finite, got {value}"),
        });
    }
    if value <= 0.0 {
        return Err(Error::InvalidParameter {
            name,
            reason: format!("must be positive, got {value}"),
        });
    }
    Ok(())
}

/// Rectangular barrier of height `height` spanning `[-half_length, half_length]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BarrierSpec {
    pub height: f64,
    pub half_length: f64,
}

impl BarrierSpec {
    pub fn new(height: f64, half_length: f64) -> Result<Self> {
        let b = Self {
            height,
            half_length,
        };
        b.check()?;
        Ok(b)
    }

    pub fn check(&self) -> Result<()> {
        require_positive("barrier.V", self.height)?;
        require_positive("barrier.L", self.half_length)
    }
}

/// Harmonic point drive `-β δ(x) cos(ωt + η)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveSpec {
    pub beta: f64,
    pub omega: f64,
    pub eta: f64,
}

impl DriveSpec {
    /// Builds a drive, wrapping the phase into `[0, 2π)`.
    pub fn new(beta: f64, omega: f64, eta: f64) -> Result<Self> {
        let d = Self {
            beta,
            omega,
            eta: normalize_phase(eta),
        };
        d.check()?;
        Ok(d)
    }

    pub fn check(&self) -> Result<()> {
        if !self.beta.is_finite() || self.beta < 0.0 {
            return Err(Error::InvalidParameter {
                name: "drive.beta",
                reason: format!("must be finite and non-negative, got {}", self.beta),
            });
        }
        require_positive("drive.omega", self.omega)?;
        if !self.eta.is_finite() {
            return Err(Error::InvalidParameter {
                name: "drive.eta",
                reason: format!("must be finite, got {}", self.eta),
            });
        }
        Ok(())
    }

    pub fn with_beta(self, beta: f64) -> Self {
        Self { beta, ..self }
    }

    pub fn with_omega(self, omega: f64) -> Self {
        Self { omega, ..self }
    }

    pub fn with_eta(self, eta: f64) -> Self {
        Self {
            eta: normalize_phase(eta),
            ..self
        }
    }
}

fn normalize_phase(eta: f64) -> f64 {
    if !eta.is_finite() {
        return eta;
    }
    let r = eta.rem_euclid(TAU);
    // rem_euclid can round up to exactly 2π for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Energy `Ω` of the incident particle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IncidentSpec {
    pub omega0: f64,
}

impl IncidentSpec {
    pub fn new(omega0: f64) -> Result<Self> {
        let i = Self { omega0 };
        i.check()?;
        Ok(i)
    }

    pub fn check(&self) -> Result<()> {
        require_positive("incident.omega0", self.omega0)
    }
}

/// Energy of sideband `n`: `Ω + nω`. Negative values are evanescent channels.
pub fn channel_energy(incident: &IncidentSpec, drive: &DriveSpec, n: i64) -> f64 {
    incident.omega0 + n as f64 * drive.omega
}

/// Closed range of sideband indices `n_min..=n_max` containing `n = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SidebandGrid {
    pub n_min: i64,
    pub n_max: i64,
}

impl SidebandGrid {
    pub fn new(n_min: i64, n_max: i64) -> Result<Self> {
        if n_min > 0 || n_max < 0 {
            return Err(Error::InvalidParameter {
                name: "grid",
                reason: format!("need n_min <= 0 <= n_max, got [{n_min}, {n_max}]"),
            });
        }
        Ok(Self { n_min, n_max })
    }

    pub fn len(&self) -> usize {
        (self.n_max - self.n_min + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Position of sideband `n` in grid-ordered arrays.
    pub fn index_of(&self, n: i64) -> Option<usize> {
        (self.n_min..=self.n_max)
            .contains(&n)
            .then(|| (n - self.n_min) as usize)
    }

    pub fn indices(&self) -> impl Iterator<Item = i64> {
        self.n_min..=self.n_max
    }

    pub fn energies(&self, incident: &IncidentSpec, drive: &DriveSpec) -> Vec<f64> {
        self.indices()
            .map(|n| channel_energy(incident, drive, n))
            .collect()
    }

    pub fn contains(&self, other: &SidebandGrid) -> bool {
        self.n_min <= other.n_min && self.n_max >= other.n_max
    }
}

/// Which of the analytic regime conditions a parameter set satisfies.
///
/// These flags only label the parameters; nothing is rejected for lying
/// outside a regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegimeReport {
    /// `β² > V − Ω`
    pub strong_perturbation: bool,
    /// `Ω < V`
    pub subgap: bool,
    /// `ω < V − Ω`
    pub slow_drive: bool,
    /// `√(V − Ω)·L > 3`
    pub opaque: bool,
}

impl RegimeReport {
    /// All conditions the Airy analysis relies on.
    pub fn analytic_regime(&self) -> bool {
        self.strong_perturbation && self.subgap && self.slow_drive
    }
}

pub fn validate(
    barrier: &BarrierSpec,
    drive: &DriveSpec,
    incident: &IncidentSpec,
) -> Result<RegimeReport> {
    barrier.check()?;
    drive.check()?;
    incident.check()?;
    let gap = barrier.height - incident.omega0;
    Ok(RegimeReport {
        strong_perturbation: drive.beta * drive.beta > gap,
        subgap: gap > 0.0,
        slow_drive: drive.omega < gap,
        opaque: gap > 0.0 && gap.sqrt() * barrier.half_length > OPAQUE_THRESHOLD,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(v: f64, l: f64, beta: f64, omega: f64, omega0: f64) -> RegimeReport {
        validate(
            &BarrierSpec::new(v, l).unwrap(),
            &DriveSpec::new(beta, omega, 0.0).unwrap(),
            &IncidentSpec::new(omega0).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn figure_two_parameters_are_subgap_slow_and_opaque() {
        let r = report(1.0, 10.75, 0.8698, 0.0075, 0.625);
        assert!(r.subgap);
        assert!(r.slow_drive);
        assert!(r.opaque);
    }

    #[test]
    fn zero_drive_is_not_strong() {
        assert!(!report(1.0, 1.0, 0.0, 0.1, 0.5).strong_perturbation);
    }

    #[test]
    fn strong_drive_flag() {
        assert!(report(1.0, 5.0, 2.0, 0.01, 0.9).strong_perturbation);
    }

    #[test]
    fn validation_errors_name_the_parameter() {
        let err = BarrierSpec::new(-1.0, 1.0).unwrap_err();
        assert!(err.to_string().contains("barrier.V"));
        let err = BarrierSpec::new(1.0, f64::NAN).unwrap_err();
        assert!(err.to_string().contains("barrier.L"));
        let err = DriveSpec::new(1.0, 0.0, 0.0).unwrap_err();
        assert!(err.to_string().contains("drive.omega"));
        let err = DriveSpec::new(-0.1, 1.0, 0.0).unwrap_err();
        assert!(err.to_string().contains("drive.beta"));
        let err = IncidentSpec::new(0.0).unwrap_err();
        assert!(err.to_string().contains("incident.omega0"));
    }

    #[test]
    fn channel_energies() {
        let d = DriveSpec::new(0.1, 0.0075, 0.0).unwrap();
        let i = IncidentSpec::new(0.625).unwrap();
        assert_eq!(channel_energy(&i, &d, 0), 0.625);
        assert!((channel_energy(&i, &d, 50) - 1.0).abs() < 1e-15);
        let i = IncidentSpec::new(0.01).unwrap();
        assert!((channel_energy(&i, &d, -2) + 0.005).abs() < 1e-15);
    }

    #[test]
    fn phase_is_wrapped() {
        let d = DriveSpec::new(0.0, 1.0, -1e-20).unwrap();
        assert!(d.eta >= 0.0 && d.eta < TAU);
        let d = DriveSpec::new(0.0, 1.0, 7.0).unwrap();
        assert!((d.eta - (7.0 - TAU)).abs() < 1e-15);
    }

    #[test]
    fn grid_rejects_ranges_without_zero() {
        assert!(SidebandGrid::new(1, 3).is_err());
        assert!(SidebandGrid::new(-3, -1).is_err());
        let g = SidebandGrid::new(-2, 3).unwrap();
        assert_eq!(g.len(), 6);
        assert_eq!(g.index_of(0), Some(2));
        assert_eq!(g.index_of(4), None);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn consecutive_channels_differ_by_omega(
                omega0 in 1e-3f64..10.0, omega in 1e-4f64..1.0, n in -5000i64..5000
            ) {
                let d = DriveSpec::new(0.5, omega, 0.0).unwrap();
                let i = IncidentSpec::new(omega0).unwrap();
                let diff = channel_energy(&i, &d, n) - channel_energy(&i, &d, n - 1);
                let scale = omega0.abs().max((n as f64 * omega).abs());
                prop_assert!((diff - omega).abs() <= 8.0 * f64::EPSILON * scale);
            }

            #[test]
            fn validate_is_pure(
                v in 0.1f64..5.0, l in 0.1f64..20.0, beta in 0.0f64..3.0,
                omega in 1e-3f64..1.0, omega0 in 1e-3f64..5.0
            ) {
                let b = BarrierSpec::new(v, l).unwrap();
                let d = DriveSpec::new(beta, omega, 0.3).unwrap();
                let i = IncidentSpec::new(omega0).unwrap();
                prop_assert_eq!(validate(&b, &d, &i).unwrap(), validate(&b, &d, &i).unwrap());
            }
        }
    }
}
