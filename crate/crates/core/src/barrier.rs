//! Stationary scattering off the undriven barrier, one sideband channel at a
//! time.
//!
//! Every quantity is written in terms of the entire functions `cosh(ρL)`,
//! `sinh(ρL)/ρ` and `ρ·sinh(ρL)`, which depend on `ρ²` only. The same code
//! therefore covers tunneling channels (`ρ` real), channels above the barrier
//! (`ρ` imaginary) and the degenerate point `E = V` without any branch or
//! singular-limit switch. Opaque channels use an equivalent form with the
//! factor `e^{ρL}` divided out.
//!
//! Normalization: an open channel (`E > 0`) is the solution with a unit wave
//! `e^{ikx}` incident from the left, `e^{ikx} + R e^{−ikx}` for `x < −L` and
//! `τ e^{ikx}` for `x > L`. A closed channel (`E <= 0`) has no incident wave;
//! it is the solution decaying to the right, normalized to `φ⁺(0) = 1`, and
//! reports `τ = R = 0`. The mirrored solution is `φ⁻(x) = φ⁺(−x)`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::BarrierSpec;

const I: Complex64 = Complex64::new(0.0, 1.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Below this `|ρL|` the direct `cosh`/`sinh` form is used.
const DIRECT_RADIUS: f64 = 1.0;

/// Stationary-scattering quantities of one channel, evaluated at the barrier
/// center `x = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelFunctions {
    pub n: i64,
    pub energy: f64,
    /// `√E`, `Im k >= 0`
    pub k: Complex64,
    /// `√(V − E)`, `Re ρ >= 0` then `Im ρ >= 0`
    pub rho: Complex64,
    /// Green function `g(0) = 1/χ`
    pub g0: Complex64,
    /// `φ⁺'(0)/φ⁺(0) − φ⁻'(0)/φ⁻(0)`
    pub chi: Complex64,
    /// Transmission amplitude; zero for closed channels.
    pub tau: Complex64,
    /// Reflection amplitude; zero for closed channels.
    pub reflection: Complex64,
    pub phi_plus_0: Complex64,
    pub phi_minus_0: Complex64,
    pub phi_plus_prime_0: Complex64,
    pub phi_minus_prime_0: Complex64,
    /// `φ⁺(L)/φ⁺(0)`
    pub trans_ratio: Complex64,
}

impl ChannelFunctions {
    pub fn is_open(&self) -> bool {
        self.energy > 0.0
    }

    pub fn indexed(self, n: i64) -> Self {
        Self { n, ..self }
    }
}

/// Source of per-channel scattering data for a barrier symmetric about `x = 0`.
pub trait BarrierModel: Sync {
    fn channel(&self, n: i64, energy: f64) -> ChannelFunctions;
}

impl BarrierModel for BarrierSpec {
    fn channel(&self, n: i64, energy: f64) -> ChannelFunctions {
        rect_channel(self, energy).indexed(n)
    }
}

/// Rectangular barrier whose `χ` is replaced by the opaque limit `−2ρ`.
///
/// All other fields come from the exact solution. Only meaningful below the
/// barrier top; above it `χ` is left exact.
#[derive(Debug, Clone, Copy)]
pub struct OpaqueRect(pub BarrierSpec);

impl BarrierModel for OpaqueRect {
    fn channel(&self, n: i64, energy: f64) -> ChannelFunctions {
        let mut c = rect_channel(&self.0, energy).indexed(n);
        if let Ok(chi) = opaque_chi(&self.0, energy) {
            c.chi = chi;
            c.g0 = 1.0 / chi;
        }
        c
    }
}

fn wavenumber(energy: f64) -> Complex64 {
    if energy >= 0.0 {
        Complex64::new(energy.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-energy).sqrt())
    }
}

/// `sinh(z)/z`
fn sinhc(z: Complex64) -> Complex64 {
    if z.norm() < 0.1 {
        let z2 = z * z;
        // through z^8/9!; the next term is below 3e-18 for |z| < 0.1
        ONE + z2 / 6.0 * (ONE + z2 / 20.0 * (ONE + z2 / 42.0 * (ONE + z2 / 72.0)))
    } else {
        z.sinh() / z
    }
}

/// Exact stationary quantities of the rectangular barrier at energy `E`.
pub fn rect_channel(barrier: &BarrierSpec, energy: f64) -> ChannelFunctions {
    let v = barrier.height;
    let l = barrier.half_length;
    let k = wavenumber(energy);
    let rho2 = v - energy;
    let rho = if rho2 >= 0.0 {
        Complex64::new(rho2.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-rho2).sqrt())
    };
    let ik = I * k;
    let z = rho * l;
    let open = energy > 0.0;

    // chi = 2 φ'(0)/φ(0) and trans_ratio = φ(L)/φ(0), from propagating the
    // outgoing solution e^{ik(x−L)} backwards from x = L.
    let (chi, trans_ratio);
    // open-channel amplitudes
    let (mut tau, mut reflection, mut phi0) = (Complex64::default(), Complex64::default(), ONE);
    let e_ikl = (ik * l).exp();
    if z.norm() < DIRECT_RADIUS {
        let c = z.cosh();
        let s = l * sinhc(z);
        let d0 = c - ik * s;
        let n0 = ik * c - rho2 * s;
        chi = 2.0 * n0 / d0;
        trans_ratio = 1.0 / d0;
        if open {
            let z2 = 2.0 * z;
            let c2 = z2.cosh();
            let s2 = 2.0 * l * sinhc(z2);
            tau = 1.0 / (e_ikl * e_ikl) / (c2 + I * s2 * (rho2 - k * k) / (2.0 * k));
            reflection = -I * tau * s2 * v / (2.0 * k);
            phi0 = tau * e_ikl * d0;
        }
    } else {
        // every factor below is bounded because Re ρ >= 0
        let q = (-2.0 * z).exp();
        let dh = (ONE + q) - ik / rho * (ONE - q);
        let nh = ik * (ONE + q) - rho * (ONE - q);
        chi = 2.0 * nh / dh;
        let e_mz = (-z).exp();
        trans_ratio = 2.0 * e_mz / dh;
        if open {
            let q2 = q * q;
            let th = (ONE + q2) + I * (ONE - q2) * (rho2 - k * k) / (2.0 * k * rho);
            tau = 2.0 * e_mz * e_mz / (e_ikl * e_ikl) / th;
            let tau_s2 = (ONE - q2) / (rho * th) / (e_ikl * e_ikl);
            reflection = -I * tau_s2 * v / (2.0 * k);
            phi0 = e_mz * dh / th / e_ikl;
        }
    }

    let phi_prime = 0.5 * chi * phi0;
    ChannelFunctions {
        n: 0,
        energy,
        k,
        rho,
        g0: 1.0 / chi,
        chi,
        tau,
        reflection,
        phi_plus_0: phi0,
        phi_minus_0: phi0,
        phi_plus_prime_0: phi_prime,
        phi_minus_prime_0: -phi_prime,
        trans_ratio,
    }
}

/// Opaque-barrier approximation `χ ≈ −2ρ`, i.e. `g(0) ≈ −1/(2ρ)`.
pub fn opaque_chi(barrier: &BarrierSpec, energy: f64) -> Result<Complex64> {
    if energy >= barrier.height {
        return Err(Error::Domain {
            what: "opaque_chi",
            reason: format!(
                "energy {energy} is not below the barrier height {}",
                barrier.height
            ),
        });
    }
    Ok(Complex64::new(-2.0 * (barrier.height - energy).sqrt(), 0.0))
}

/// Piecewise-constant potential on `[x_min, x_max]`, zero outside.
pub trait SampledPotential {
    fn support(&self) -> (f64, f64);
    fn value(&self, x: f64) -> f64;
}

impl SampledPotential for BarrierSpec {
    fn support(&self) -> (f64, f64) {
        (-self.half_length, self.half_length)
    }

    fn value(&self, x: f64) -> f64 {
        if x.abs() <= self.half_length {
            self.height
        } else {
            0.0
        }
    }
}

/// Zero potential on a nominal support, for free-propagation checks.
#[derive(Debug, Clone, Copy)]
pub struct FreeSpace(pub f64);

impl SampledPotential for FreeSpace {
    fn support(&self) -> (f64, f64) {
        (-self.0, self.0)
    }

    fn value(&self, _x: f64) -> f64 {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleResult {
    pub tau: Complex64,
    pub phi_0: Complex64,
    /// Slabs per half-support in the finest evaluation.
    pub slabs: usize,
    /// `|τ(2N) − τ(N)|` of the last refinement.
    pub residual: f64,
}

/// Options for [`transfer_matrix_oracle`].
#[derive(Debug, Clone, Copy)]
pub struct OracleOptions {
    pub initial_slabs: usize,
    pub max_slabs: usize,
    pub tol: f64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            initial_slabs: 16,
            max_slabs: 1 << 16,
            tol: 1e-11,
        }
    }
}

/// Transmission amplitude and `φ⁺(0)` by multiplying slab transfer matrices.
///
/// The support is split at `x = 0` and each half is cut into `N` equal slabs
/// sampled at their midpoints. `N` is doubled until two successive
/// Richardson-extrapolated values agree within `tol`; midpoint sampling
/// converges as `N^{-2}`.
pub fn transfer_matrix_oracle(
    potential: &dyn SampledPotential,
    energy: f64,
    opts: OracleOptions,
) -> Result<OracleResult> {
    if energy <= 0.0 {
        return Err(Error::Domain {
            what: "transfer_matrix_oracle",
            reason: format!("needs a propagating energy, got {energy}"),
        });
    }
    let (a, b) = potential.support();
    if !(a < 0.0 && b > 0.0) {
        return Err(Error::Domain {
            what: "transfer_matrix_oracle",
            reason: "support must contain the origin".into(),
        });
    }
    let mut n = opts.initial_slabs.max(1);
    let mut prev = propagate_slabs(potential, energy, n);
    let mut prev_extrap: Option<(Complex64, Complex64)> = None;
    loop {
        let next = propagate_slabs(potential, energy, 2 * n);
        let extrap = (
            (4.0 * next.0 - prev.0) / 3.0,
            (4.0 * next.1 - prev.1) / 3.0,
        );
        let raw = (next.0 - prev.0).norm().max((next.1 - prev.1).norm());
        let residual = match prev_extrap {
            Some(p) => (extrap.0 - p.0).norm().max((extrap.1 - p.1).norm()),
            None => raw,
        };
        n *= 2;
        if residual <= opts.tol || raw <= opts.tol * 1e-2 {
            return Ok(OracleResult {
                tau: extrap.0,
                phi_0: extrap.1,
                slabs: n,
                residual,
            });
        }
        if 2 * n > opts.max_slabs {
            return Err(Error::NotConverged {
                what: "transfer-matrix oracle",
                residual,
            });
        }
        prev = next;
        prev_extrap = Some(extrap);
    }
}

/// `(τ, φ(0))` for `n` midpoint slabs on each side of the origin.
fn propagate_slabs(p: &dyn SampledPotential, energy: f64, n: usize) -> (Complex64, Complex64) {
    let (a, b) = p.support();
    let k = wavenumber(energy);
    let ik = I * k;
    // start with the bare outgoing wave e^{ikx} at x = b and walk left
    let mut psi = (ik * b).exp();
    let mut dpsi = ik * psi;
    let mut phi_0 = Complex64::default();
    for (lo, hi) in [(0.0, b), (a, 0.0)] {
        let h = (hi - lo) / n as f64;
        for j in (0..n).rev() {
            let mid = lo + (j as f64 + 0.5) * h;
            let q2 = p.value(mid) - energy; // φ'' = q2·φ
            let kappa = Complex64::new(q2, 0.0).sqrt();
            let z = kappa * h;
            let c = z.cosh();
            let s = h * sinhc(z);
            // step by −h: [φ; φ'](x−h) = [[c, −s], [−q2·s, c]] [φ; φ'](x)
            let new_psi = c * psi - s * dpsi;
            let new_dpsi = -q2 * s * psi + c * dpsi;
            psi = new_psi;
            dpsi = new_dpsi;
        }
        if lo == 0.0 {
            phi_0 = psi;
        }
    }
    // incident amplitude at x = a
    let incident = 0.5 * (psi + dpsi / ik) * (-ik * a).exp();
    (1.0 / incident, phi_0 / incident)
}
