//! Airy-function approximation to the sideband amplitudes in the
//! strong-drive, slow-drive regime.
//!
//! Linearizing `c(n) = 1 + χ_n/β` around `n = 0` turns the sideband
//! recursion into an Airy equation in
//! `ξ = (n + ρ(β − 2ρ)/ω)·(ω/(2βρ))^{1/3}`, whose outgoing Green function is
//! [`green_airy`]. The zeros of `Ai(−ξ₀)` mark incident energies at which
//! activation is suppressed.

use std::f64::consts::{FRAC_PI_4, PI, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::airy::airy_scaled;
use crate::error::{Error, Result};
use crate::model::{BarrierSpec, DriveSpec, IncidentSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AiryRegimeParams {
    /// `√(V − Ω)`
    pub rho: f64,
    /// `ξ` at `n = 0`
    pub xi0: f64,
    /// `(2βρ/ω)^{1/3}`
    pub scale: f64,
    /// `ρ(β − 2ρ)/ω`, the offset of `n` in `ξ`
    pub shift: f64,
}

fn subgap_rho(barrier: &BarrierSpec, omega0: f64, what: &'static str) -> Result<f64> {
    let gap = barrier.height - omega0;
    if gap <= 0.0 {
        return Err(Error::Domain {
            what,
            reason: format!("needs Ω < V, got Ω = {omega0}, V = {}", barrier.height),
        });
    }
    Ok(gap.sqrt())
}

fn require_drive(drive: &DriveSpec, what: &'static str) -> Result<()> {
    if drive.beta <= 0.0 {
        return Err(Error::Domain {
            what,
            reason: "needs β > 0".into(),
        });
    }
    Ok(())
}

impl AiryRegimeParams {
    pub fn new(barrier: &BarrierSpec, drive: &DriveSpec, incident: &IncidentSpec) -> Result<Self> {
        require_drive(drive, "Airy regime parameters")?;
        let rho = subgap_rho(barrier, incident.omega0, "Airy regime parameters")?;
        let beta = drive.beta;
        let omega = drive.omega;
        let scale = (2.0 * beta * rho / omega).cbrt();
        let shift = rho * (beta - 2.0 * rho) / omega;
        Ok(Self {
            rho,
            xi0: shift / scale,
            scale,
            shift,
        })
    }
}

/// `ξ₀ = (1 − 2ρ/β)(βρ/(ω√2))^{2/3}`, the closed form of `ξ(n = 0)`.
pub fn xi0_closed_form(rho: f64, beta: f64, omega: f64) -> f64 {
    (1.0 - 2.0 * rho / beta) * (beta * rho / (omega * SQRT_2)).powf(2.0 / 3.0)
}

/// Linearized coefficient `c(n) ≈ 1 − 2ρ/β + ωn/(βρ)`.
pub fn c_coefficient(
    n: f64,
    barrier: &BarrierSpec,
    drive: &DriveSpec,
    incident: &IncidentSpec,
) -> Result<f64> {
    require_drive(drive, "c_coefficient")?;
    let rho = subgap_rho(barrier, incident.omega0, "c_coefficient")?;
    let beta = drive.beta;
    Ok(1.0 - 2.0 * rho / beta + drive.omega * n / (beta * rho))
}

pub fn xi(n: f64, params: &AiryRegimeParams) -> f64 {
    (n + params.shift) / params.scale
}

/// Airy values at `−ξ` together with the exponent removed by the scaling.
fn airy_at_minus(xi: f64) -> (f64, f64, f64) {
    let y = -xi;
    let v = airy_scaled(y);
    let zeta = if y > 0.0 { 2.0 / 3.0 * y * y.sqrt() } else { 0.0 };
    (v.ai, v.bi, zeta)
}

/// Continuum Green function
///
/// ```text
/// G(ξ) = −iπ·scale · Ai(−ξ)  [Ai(−ξ₀) + i Bi(−ξ₀)]   for ξ < ξ₀
///                    Ai(−ξ₀) [Ai(−ξ)  + i Bi(−ξ)]    for ξ ≥ ξ₀
/// ```
///
/// Products are formed from exponentially scaled Airy values so deep
/// evanescent arguments neither overflow nor underflow prematurely.
pub fn green_airy(xi: f64, params: &AiryRegimeParams) -> Complex64 {
    let (lesser, greater) = if xi < params.xi0 {
        (xi, params.xi0)
    } else {
        (params.xi0, xi)
    };
    // regular solution at the smaller ξ, outgoing one at the larger
    let (ai_l, _, z_l) = airy_at_minus(lesser);
    let (ai_g, bi_g, z_g) = airy_at_minus(greater);
    let aa = ai_l * ai_g * (-z_l - z_g).exp();
    let ab = ai_l * bi_g * (z_g - z_l).exp();
    Complex64::new(0.0, -PI * params.scale) * Complex64::new(aa, ab)
}

/// `|G|² ≈ π·scale²·ξ₀^{−1/2}·Ai²(−ξ)` below the source (`n < 0`).
pub fn green_abs2_below(xi: f64, params: &AiryRegimeParams) -> f64 {
    let (ai, _, z) = airy_at_minus(xi);
    let ai = ai * (-z).exp();
    PI * params.scale * params.scale * ai * ai / params.xi0.sqrt()
}

/// `|G|² ≈ π·scale²·ξ^{−1/2}·Ai²(−ξ₀)` above the source (`n > 0`).
pub fn green_abs2_above(xi: f64, params: &AiryRegimeParams) -> f64 {
    let (ai, _, z) = airy_at_minus(params.xi0);
    let ai = ai * (-z).exp();
    PI * params.scale * params.scale * ai * ai / xi.sqrt()
}

/// Predicted suppressed incident energies
/// `Ω_m ≈ V − β²/4 + ½[(3/2)βω(m + 3/4)π]^{2/3}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonActivated {
    /// `(m, Ω_m)` in increasing order.
    pub energies: Vec<(u32, f64)>,
    /// Indices whose prediction falls outside `(0, V)`.
    pub dropped: Vec<u32>,
}

pub fn nonactivated_energy(barrier: &BarrierSpec, drive: &DriveSpec, m: u32) -> f64 {
    let beta = drive.beta;
    let bracket = 1.5 * beta * drive.omega * (m as f64 + 0.75) * PI;
    barrier.height - beta * beta / 4.0 + 0.5 * bracket.powf(2.0 / 3.0)
}

pub fn nonactivated_energies(
    barrier: &BarrierSpec,
    drive: &DriveSpec,
    m_range: std::ops::Range<u32>,
) -> Result<NonActivated> {
    let mut out = NonActivated {
        energies: Vec::new(),
        dropped: Vec::new(),
    };
    for m in m_range {
        let e = nonactivated_energy(barrier, drive, m);
        if e > 0.0 && e < barrier.height {
            out.energies.push((m, e));
        } else {
            out.dropped.push(m);
        }
    }
    if out.energies.is_empty() {
        return Err(Error::Regime(
            "no index m gives a suppressed energy inside (0, V)".into(),
        ));
    }
    Ok(out)
}

/// `cos²[(2/3)(1 − 2ρ/β)^{3/2}ρβ/ω − π/4] − e^{−ρL}` with `ρ = √(V − Ω)`.
///
/// Roots approximate the edges of the suppressed windows.
pub fn transition_criterion(omega0: f64, barrier: &BarrierSpec, drive: &DriveSpec) -> Result<f64> {
    require_drive(drive, "transition criterion")?;
    let rho = subgap_rho(barrier, omega0, "transition criterion")?;
    let beta = drive.beta;
    if beta <= 2.0 * rho {
        return Err(Error::Domain {
            what: "transition criterion",
            reason: format!("needs β > 2ρ, got β = {beta}, 2ρ = {}", 2.0 * rho),
        });
    }
    let phase = 2.0 / 3.0 * (1.0 - 2.0 * rho / beta).powf(1.5) * rho * beta / drive.omega - FRAC_PI_4;
    Ok(phase.cos().powi(2) - (-rho * barrier.half_length).exp())
}

/// Spectral width `Γ ≈ e^{−βL/2}` of a suppressed window.
pub fn resonance_width(barrier: &BarrierSpec, drive: &DriveSpec) -> f64 {
    (-drive.beta * barrier.half_length / 2.0).exp()
}
