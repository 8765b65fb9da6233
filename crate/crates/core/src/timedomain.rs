//! Direct time integration of the driven barrier, independent of the
//! sideband machinery.
//!
//! `i∂ψ/∂t = −∂²ψ/∂x² + V(x)ψ − β cos(ωt + η) D(x) ψ` on a uniform grid with
//! hard walls, where `D` is an area-normalized Gaussian standing in for the
//! point interaction. Each step is the Cayley (Crank–Nicolson) map with the
//! Hamiltonian frozen at the midpoint time, which is unitary for any `dt`.

use std::f64::consts::PI;
use std::io::{self, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::barrier::SampledPotential;
use crate::error::{Error, Result};
use crate::model::DriveSpec;

/// Largest accepted relative change of `‖ψ‖²` over a run.
pub const NORM_DRIFT_BOUND: f64 = 1e-6;

/// Grid representation of `δ(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaShape {
    /// Area-normalized Gaussian with this standard deviation (at least `2·dx`).
    Gaussian { width: f64 },
    /// `1/dx` on the grid point nearest `x = 0`. The discrete jump condition
    /// then differs from the point interaction only by `O(dx·|V − E|)`,
    /// whereas a Gaussian of width `w` shifts the coupling by `O(βw)`.
    Lattice,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub dx: f64,
    pub dt: f64,
    pub total_time: f64,
    pub delta: DeltaShape,
    pub detector: f64,
    /// Steps between detector samples.
    pub stride: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WavepacketSpec {
    pub center: f64,
    /// Standard deviation of `|ψ|²`.
    pub width: f64,
    pub k0: f64,
}

impl WavepacketSpec {
    /// Packet with mean momentum `√Ω`.
    pub fn with_energy(center: f64, width: f64, omega0: f64) -> Self {
        Self {
            center,
            width,
            k0: omega0.sqrt(),
        }
    }

    pub fn amplitude(&self, x: f64) -> Complex64 {
        let s = self.width;
        let norm = (2.0 * PI * s * s).powf(-0.25);
        let d = x - self.center;
        Complex64::from_polar(norm * (-d * d / (4.0 * s * s)).exp(), self.k0 * x)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub detector: f64,
    /// Time between samples.
    pub interval: f64,
    pub samples: Vec<Complex64>,
}

impl TimeSeries {
    pub fn duration(&self) -> f64 {
        self.interval * self.samples.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub series: TimeSeries,
    /// Largest `|‖ψ(t)‖² / ‖ψ(0)‖² − 1|` seen.
    pub norm_drift: f64,
    /// `∫_{x>L} |ψ|²` at the end, relative to the initial norm.
    pub transmitted_fraction: f64,
    /// `∫_{x<−L} |ψ|²` at the end, relative to the initial norm.
    pub reflected_fraction: f64,
    /// Set when the wave reached the walls with non-negligible amplitude,
    /// so echoes may contaminate the detector record.
    pub echo_warning: bool,
}

fn check_setup(grid: &GridConfig, packet: &WavepacketSpec, potential: &dyn SampledPotential) -> Result<()> {
    let bad = |name: &'static str, reason: String| Err(Error::InvalidParameter { name, reason });
    if !(grid.dx > 0.0 && grid.dt > 0.0 && grid.total_time > 0.0) {
        return bad("grid", "dx, dt and total_time must be positive".into());
    }
    if grid.stride == 0 {
        return bad("grid.stride", "must be at least 1".into());
    }
    if let DeltaShape::Gaussian { width } = grid.delta {
        if width < 2.0 * grid.dx {
            return bad(
                "grid.delta_width",
                format!("{width} is below 2·dx = {}", 2.0 * grid.dx),
            );
        }
    }
    if grid.x_min >= 0.0 || grid.x_max <= 0.0 {
        return bad("grid", "domain must contain x = 0".into());
    }
    let (left, l) = potential.support();
    if !(grid.detector > l && grid.detector < grid.x_max) {
        return bad("grid.detector", format!("must lie in ({l}, {})", grid.x_max));
    }
    if !(packet.width > 0.0 && packet.k0 > 0.0) {
        return bad("packet", "width and k0 must be positive".into());
    }
    if packet.center + 4.0 * packet.width > left {
        return bad("packet.center", "packet overlaps the barrier".into());
    }
    if packet.center - 6.0 * packet.width < grid.x_min {
        return bad("packet.center", "packet does not fit inside the domain".into());
    }
    Ok(())
}

/// Solves `(1 + iτH)ψ' = (1 − iτH)ψ` for `H = tridiag(−a, h_j, −a)`.
struct CayleyStepper {
    off: Complex64,
    forward: Vec<Complex64>,
    rhs: Vec<Complex64>,
}

impl CayleyStepper {
    fn new(n: usize, half_dt: f64, a: f64) -> Self {
        Self {
            off: Complex64::new(0.0, -half_dt * a),
            forward: vec![Complex64::default(); n],
            rhs: vec![Complex64::default(); n],
        }
    }

    fn step(&mut self, psi: &mut [Complex64], h_diag: impl Fn(usize) -> f64, half_dt: f64) {
        let n = psi.len();
        let o = self.off;
        // right-hand side (1 − iτH)ψ, with off-diagonal −o
        for j in 0..n {
            let d = Complex64::new(1.0, -half_dt * h_diag(j));
            let mut v = d * psi[j];
            if j > 0 {
                v -= o * psi[j - 1];
            }
            if j + 1 < n {
                v -= o * psi[j + 1];
            }
            self.rhs[j] = v;
        }
        // Thomas elimination; the matrix is strictly diagonally dominant
        let mut prev_c = Complex64::default();
        let mut prev_b = Complex64::default();
        for j in 0..n {
            let d = Complex64::new(1.0, half_dt * h_diag(j));
            let m = if j == 0 { d } else { d - o * prev_c };
            prev_c = o / m;
            prev_b = if j == 0 { self.rhs[j] / m } else { (self.rhs[j] - o * prev_b) / m };
            self.forward[j] = prev_c;
            self.rhs[j] = prev_b;
        }
        psi[n - 1] = self.rhs[n - 1];
        for j in (0..n - 1).rev() {
            psi[j] = self.rhs[j] - self.forward[j] * psi[j + 1];
        }
    }
}

fn norm2(psi: &[Complex64], dx: f64) -> f64 {
    psi.iter().map(|v| v.norm_sqr()).sum::<f64>() * dx
}

/// Propagates the packet through the driven potential and records `ψ(x_d, t)`.
pub fn propagate(
    grid: &GridConfig,
    packet: &WavepacketSpec,
    potential: &dyn SampledPotential,
    drive: &DriveSpec,
) -> Result<RunReport> {
    drive.check()?;
    check_setup(grid, packet, potential)?;
    let n = ((grid.x_max - grid.x_min) / grid.dx).round() as usize + 1;
    let xs: Vec<f64> = (0..n).map(|j| grid.x_min + grid.dx * j as f64).collect();
    let a = 1.0 / (grid.dx * grid.dx);
    let static_diag: Vec<f64> = xs.iter().map(|&x| 2.0 * a + potential.value(x)).collect();
    let origin = (-grid.x_min / grid.dx).round() as usize;
    let delta: Vec<f64> = match grid.delta {
        DeltaShape::Gaussian { width: w } => xs
            .iter()
            .map(|&x| (-x * x / (2.0 * w * w)).exp() / (w * (2.0 * PI).sqrt()))
            .collect(),
        DeltaShape::Lattice => (0..n).map(|j| if j == origin { 1.0 / grid.dx } else { 0.0 }).collect(),
    };
    let mut psi: Vec<Complex64> = xs.iter().map(|&x| packet.amplitude(x)).collect();
    psi[0] = Complex64::default();
    psi[n - 1] = Complex64::default();

    let det = ((grid.detector - grid.x_min) / grid.dx).round() as usize;
    let steps = (grid.total_time / grid.dt).round() as usize;
    let half_dt = 0.5 * grid.dt;
    let mut stepper = CayleyStepper::new(n, half_dt, a);
    let norm0 = norm2(&psi, grid.dx);
    let peak0 = psi.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let edge = (n / 100).max(2);
    let edge_amplitude = |psi: &[Complex64]| {
        psi[..edge]
            .iter()
            .chain(&psi[n - edge..])
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    };
    let edge0 = edge_amplitude(&psi);
    let mut drift: f64 = 0.0;
    let mut edge_max: f64 = 0.0;
    let mut samples = Vec::with_capacity(steps / grid.stride + 1);
    samples.push(psi[det]);
    for step in 0..steps {
        let t_mid = (step as f64 + 0.5) * grid.dt;
        let u = -drive.beta * (drive.omega * t_mid + drive.eta).cos();
        stepper.step(&mut psi, |j| static_diag[j] + u * delta[j], half_dt);
        if (step + 1) % grid.stride == 0 {
            samples.push(psi[det]);
            drift = drift.max((norm2(&psi, grid.dx) / norm0 - 1.0).abs());
            edge_max = edge_max.max(edge_amplitude(&psi));
        }
    }
    drift = drift.max((norm2(&psi, grid.dx) / norm0 - 1.0).abs());
    if drift > NORM_DRIFT_BOUND {
        return Err(Error::Instability {
            drift,
            bound: NORM_DRIFT_BOUND,
        });
    }
    let (left, right) = potential.support();
    let part = |keep: &dyn Fn(f64) -> bool| {
        xs.iter()
            .zip(&psi)
            .filter(|(x, _)| keep(**x))
            .map(|(_, v)| v.norm_sqr())
            .sum::<f64>()
            * grid.dx
            / norm0
    };
    Ok(RunReport {
        series: TimeSeries {
            detector: xs[det],
            interval: grid.dt * grid.stride as f64,
            samples,
        },
        norm_drift: drift,
        transmitted_fraction: part(&|x| x > right),
        reflected_fraction: part(&|x| x < left),
        echo_warning: edge_max > 10.0 * edge0 + 1e-8 * peak0,
    })
}

/// First sample time at which `|ψ(x_d)|` peaks.
pub fn arrival_time(series: &TimeSeries) -> f64 {
    let (i, _) = series
        .samples
        .iter()
        .enumerate()
        .fold((0, -1.0), |best, (i, v)| if v.norm() > best.1 { (i, v.norm()) } else { best });
    i as f64 * series.interval
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Window {
    /// Whole record with equal weight; band powers then obey Parseval.
    #[default]
    Rectangular,
    Hann,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralPeak {
    /// Interpolated peak energy.
    pub frequency: f64,
    /// Power integrated between the neighbouring spectral minima.
    pub power: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRequest {
    pub f_min: f64,
    pub f_max: f64,
    /// Finest frequency resolution the caller needs.
    pub resolution: f64,
    /// Peaks below this fraction of the strongest one are dropped.
    pub threshold: f64,
    pub window: Window,
}

/// `F(E) = Σ_k w_k ψ(t_k) e^{iEt_k} Δt` on an evenly spaced `E` grid.
pub fn power_spectrum(series: &TimeSeries, window: Window, freqs: &[f64]) -> Vec<f64> {
    let m = series.samples.len();
    let weights: Vec<f64> = (0..m)
        .map(|k| match window {
            Window::Rectangular => 1.0,
            Window::Hann => {
                let s = (PI * k as f64 / (m.max(2) - 1) as f64).sin();
                s * s
            }
        })
        .collect();
    let dt = series.interval;
    freqs
        .iter()
        .map(|&f| {
            let rot = Complex64::from_polar(1.0, f * dt);
            let mut phase = Complex64::new(1.0, 0.0);
            let mut acc = Complex64::default();
            for (k, s) in series.samples.iter().enumerate() {
                acc += s * phase * weights[k];
                phase *= rot;
                if k % 256 == 255 {
                    phase /= phase.norm();
                }
            }
            (acc * dt).norm_sqr()
        })
        .collect()
}

/// Peaks of the detector spectrum with quadratically interpolated energies.
pub fn sideband_spectrum(series: &TimeSeries, request: &SpectrumRequest) -> Result<Vec<SpectralPeak>> {
    let resolution = 2.0 * PI / series.duration();
    if resolution > request.resolution {
        return Err(Error::Resolution {
            resolution,
            required: request.resolution,
        });
    }
    // several points per resolution cell
    let df = resolution / 8.0;
    let count = ((request.f_max - request.f_min) / df).ceil() as usize + 1;
    let freqs: Vec<f64> = (0..count).map(|i| request.f_min + df * i as f64).collect();
    let power = power_spectrum(series, request.window, &freqs);
    let top = power.iter().cloned().fold(0.0, f64::max);
    let maxima: Vec<usize> = (1..count.saturating_sub(1))
        .filter(|&i| power[i] > power[i - 1] && power[i] >= power[i + 1] && power[i] >= request.threshold * top)
        .collect();
    let mut peaks = Vec::with_capacity(maxima.len());
    for (j, &i) in maxima.iter().enumerate() {
        let (y0, y1, y2) = (power[i - 1], power[i], power[i + 1]);
        let denom = y0 - 2.0 * y1 + y2;
        let shift = if denom != 0.0 { 0.5 * (y0 - y2) / denom } else { 0.0 };
        let lo = if j == 0 {
            0
        } else {
            argmin(&power, maxima[j - 1], i)
        };
        let hi = maxima.get(j + 1).map_or(count - 1, |&next| argmin(&power, i, next));
        let band: f64 = power[lo..=hi].iter().sum::<f64>() * df / (2.0 * PI);
        peaks.push(SpectralPeak {
            frequency: freqs[i] + shift * df,
            power: band,
        });
    }
    Ok(peaks)
}

fn argmin(v: &[f64], a: usize, b: usize) -> usize {
    (a..=b).fold(a, |best, i| if v[i] < v[best] { i } else { best })
}

/// Raw dump: magic `FQTS`, format version, the grid configuration (delta
/// width `0` for the lattice delta), sample interval and count, then
/// interleaved `(re, im)` samples. Little-endian.
pub fn write_series<W: Write>(mut out: W, grid: &GridConfig, series: &TimeSeries) -> io::Result<()> {
    out.write_all(b"FQTS")?;
    out.write_all(&1u32.to_le_bytes())?;
    for v in [
        grid.x_min,
        grid.x_max,
        grid.dx,
        grid.dt,
        grid.total_time,
        match grid.delta {
            DeltaShape::Gaussian { width } => width,
            DeltaShape::Lattice => 0.0,
        },
        series.detector,
        series.interval,
    ] {
        out.write_all(&v.to_le_bytes())?;
    }
    out.write_all(&(series.samples.len() as u64).to_le_bytes())?;
    for s in &series.samples {
        out.write_all(&s.re.to_le_bytes())?;
        out.write_all(&s.im.to_le_bytes())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::barrier::{rect_channel, FreeSpace};
    use crate::model::BarrierSpec;

    fn tone(freqs: &[(f64, f64)], interval: f64, count: usize) -> TimeSeries {
        let samples = (0..count)
            .map(|k| {
                let t = k as f64 * interval;
                freqs
                    .iter()
                    .map(|&(f, a)| Complex64::from_polar(a, -f * t))
                    .sum()
            })
            .collect();
        TimeSeries {
            detector: 0.0,
            interval,
            samples,
        }
    }

    fn request(lo: f64, hi: f64) -> SpectrumRequest {
        SpectrumRequest {
            f_min: lo,
            f_max: hi,
            resolution: 0.025,
            threshold: 1e-3,
            window: Window::Hann,
        }
    }

    #[test]
    fn pure_tone() {
        let s = tone(&[(0.5, 1.0)], 0.5, 2000);
        let p = sideband_spectrum(&s, &request(0.2, 0.8)).unwrap();
        assert_eq!(p.len(), 1);
        assert!((p[0].frequency - 0.5).abs() < 2.0 * PI / s.duration() / 8.0);
    }

    #[test]
    fn two_tones() {
        let s = tone(&[(0.5, 1.0), (0.6, 1.0)], 0.5, 2000);
        let p = sideband_spectrum(&s, &request(0.2, 0.9)).unwrap();
        assert_eq!(p.len(), 2);
        assert!((p[1].frequency - p[0].frequency - 0.1).abs() < 1e-3);
        assert!((p[0].power / p[1].power - 1.0).abs() < 0.05);
    }

    #[test]
    fn rectangular_band_power_obeys_parseval() {
        let s = tone(&[(0.5, 1.0), (0.8, 0.5)], 0.5, 4000);
        let mut req = request(0.0, 1.3);
        req.window = Window::Rectangular;
        let p = sideband_spectrum(&s, &req).unwrap();
        let energy: f64 = s.samples.iter().map(|v| v.norm_sqr()).sum::<f64>() * s.interval;
        let total: f64 = p.iter().map(|x| x.power).sum();
        assert!((total / energy - 1.0).abs() < 0.02, "{total} vs {energy}");
    }

    #[test]
    fn short_record_is_refused() {
        let s = tone(&[(0.5, 1.0)], 0.5, 100);
        assert!(matches!(
            sideband_spectrum(&s, &request(0.2, 0.8)),
            Err(Error::Resolution { .. })
        ));
    }

    fn free_setup() -> (GridConfig, WavepacketSpec) {
        (
            GridConfig {
                x_min: -150.0,
                x_max: 250.0,
                dx: 0.05,
                dt: 0.05,
                total_time: 60.0,
                delta: DeltaShape::Gaussian { width: 0.1 },
                detector: 40.0,
                stride: 2,
            },
            WavepacketSpec::with_energy(-40.0, 5.0, 1.0),
        )
    }

    #[test]
    fn free_packet_moves_at_group_velocity() {
        let (grid, packet) = free_setup();
        let d = DriveSpec::new(0.0, 0.1, 0.0).unwrap();
        let r = propagate(&grid, &packet, &FreeSpace(1.0), &d).unwrap();
        let want = (grid.detector - packet.center) / (2.0 * packet.k0);
        let got = arrival_time(&r.series);
        assert!((got / want - 1.0).abs() < 0.02, "{got} vs {want}");
        assert!(r.norm_drift < 1e-10);
        assert!(!r.echo_warning);
    }

    #[test]
    fn static_barrier_transmission() {
        let b = BarrierSpec::new(1.0, 1.0).unwrap();
        let d = DriveSpec::new(0.0, 0.1, 0.0).unwrap();
        let grid = GridConfig {
            x_min: -300.0,
            x_max: 300.0,
            dx: 0.05,
            dt: 0.05,
            total_time: 150.0,
            delta: DeltaShape::Gaussian { width: 0.1 },
            detector: 20.0,
            stride: 10,
        };
        let packet = WavepacketSpec::with_energy(-100.0, 15.0, 0.6);
        let r = propagate(&grid, &packet, &b, &d).unwrap();
        let want = rect_channel(&b, 0.6).tau.norm_sqr();
        assert!((r.transmitted_fraction / want - 1.0).abs() < 0.1, "{} vs {want}", r.transmitted_fraction);
        assert!((r.transmitted_fraction + r.reflected_fraction - 1.0).abs() < 1e-6);
    }

    #[test]
    fn setup_is_validated() {
        let (mut grid, packet) = free_setup();
        let b = BarrierSpec::new(1.0, 1.0).unwrap();
        let d = DriveSpec::new(0.0, 0.1, 0.0).unwrap();
        grid.delta = DeltaShape::Gaussian { width: 0.05 };
        assert!(propagate(&grid, &packet, &b, &d).is_err());
        let (grid, mut packet) = free_setup();
        packet.center = -5.0;
        assert!(propagate(&grid, &packet, &b, &d).is_err());
    }

    #[test]
    fn dump_layout() {
        let (grid, _) = free_setup();
        let s = tone(&[(0.5, 1.0)], 0.5, 3);
        let mut buf = Vec::new();
        write_series(&mut buf, &grid, &s).unwrap();
        assert_eq!(&buf[..4], b"FQTS");
        assert_eq!(buf.len(), 4 + 4 + 8 * 8 + 8 + 3 * 16);
        let count = u64::from_le_bytes(buf[72..80].try_into().unwrap());
        assert_eq!(count, 3);
        let re = f64::from_le_bytes(buf[80..88].try_into().unwrap());
        assert_eq!(re, 1.0);
    }
}
