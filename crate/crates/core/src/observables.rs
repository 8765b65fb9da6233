//! Observables built on sideband solutions: spectra, the mean activation
//! energy, scans over the incident energy and located suppression dips.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::airy::airy;
use crate::analytic::{green_airy, resonance_width, xi, AiryRegimeParams};
use crate::error::{Error, Result};
use crate::floquet::{solve, SidebandSolution, SolverOptions};
use crate::model::{validate, BarrierSpec, DriveSpec, IncidentSpec};

/// How transmitted channels are weighted in the activation mean.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightMode {
    /// `|s_n · φ_n⁺(x>L)/φ_n⁺(0)|²`
    #[default]
    Amplitude,
    /// Amplitude weight times `k_n`, i.e. proportional to transmitted flux.
    Flux,
}

/// `(n, w_n)` over open channels.
pub fn activation_weights(solution: &SidebandSolution, mode: WeightMode) -> Vec<(i64, f64)> {
    solution
        .channels
        .iter()
        .zip(&solution.s)
        .filter(|(c, _)| c.is_open())
        .map(|(c, s)| {
            let w = (s * c.trans_ratio).norm_sqr();
            let w = match mode {
                WeightMode::Amplitude => w,
                WeightMode::Flux => w * c.k.re,
            };
            (c.n, w)
        })
        .collect()
}

/// `Ω + ω·Σ n w_n / Σ w_n`.
pub fn weighted_mean_energy(omega0: f64, omega: f64, weights: &[(i64, f64)]) -> Result<f64> {
    let total: f64 = weights.iter().map(|(_, w)| w).sum();
    if !(total > f64::MIN_POSITIVE) {
        return Err(Error::NoTransmission);
    }
    let first: f64 = weights.iter().map(|(n, w)| *n as f64 * w).sum();
    Ok(omega0 + omega * first / total)
}

/// Mean energy of the transmitted particles, `Ω_act`.
pub fn activation_energy(solution: &SidebandSolution, mode: WeightMode) -> Result<f64> {
    let weights = activation_weights(solution, mode);
    weighted_mean_energy(solution.omega0, solution.drive.omega, &weights)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub n: i64,
    pub energy: f64,
    pub abs_s: f64,
    /// `|t_n τ_n|²`; zero for closed channels.
    pub flux_weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub entries: Vec<SpectrumEntry>,
}

pub const DEFAULT_SPECTRUM_FLOOR: f64 = 1e-16;

/// Channels with `|s_n| > floor`, in increasing `n`.
pub fn spectrum(solution: &SidebandSolution, floor: f64) -> Spectrum {
    let entries = solution
        .channels
        .iter()
        .zip(&solution.s)
        .zip(solution.transmitted_amplitudes())
        .filter(|((_, s), _)| s.norm() > floor)
        .map(|((c, s), out)| SpectrumEntry {
            n: c.n,
            energy: c.energy,
            abs_s: s.norm(),
            flux_weight: if c.is_open() { out.norm_sqr() } else { 0.0 },
        })
        .collect();
    Spectrum { entries }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanOptions {
    pub solver: SolverOptions,
    pub weights: WeightMode,
    /// Largest tolerated fraction of failed points.
    pub max_failure_fraction: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            solver: SolverOptions::default(),
            weights: WeightMode::Amplitude,
            max_failure_fraction: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub omega0: f64,
    /// `NaN` when the point failed.
    pub omega_act: f64,
    /// Transmitted flux as a fraction of the incident flux.
    pub total_flux: f64,
    pub converged: bool,
    pub error: Option<String>,
}

impl ScanPoint {
    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Resonance {
    /// Ordinal of the dip within the scanned window, from low `Ω` up.
    pub m: u32,
    pub omega: f64,
    pub omega_act: f64,
    pub depth: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanMeta {
    pub barrier: BarrierSpec,
    pub drive: DriveSpec,
    pub options: ScanOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub points: Vec<ScanPoint>,
    pub resonances: Vec<Resonance>,
    pub meta: ScanMeta,
}

impl ScanResult {
    pub fn failures(&self) -> usize {
        self.points.iter().filter(|p| !p.is_ok()).count()
    }
}

/// `steps` evenly spaced incident energies from `lo` to `hi` inclusive.
pub fn scan_grid(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let h = (hi - lo) / (steps - 1) as f64;
            (0..steps)
                .map(|i| if i + 1 == steps { hi } else { lo + h * i as f64 })
                .collect()
        }
    }
}

fn scan_point(barrier: &BarrierSpec, drive: &DriveSpec, omega0: f64, options: &ScanOptions) -> ScanPoint {
    let outcome = IncidentSpec::new(omega0).and_then(|incident| {
        let sol = solve(barrier, drive, &incident, &options.solver)?;
        let act = activation_energy(&sol, options.weights)?;
        Ok((act, sol.total_transmitted(), sol.converged))
    });
    match outcome {
        Ok((omega_act, total_flux, converged)) => ScanPoint {
            omega0,
            omega_act,
            total_flux,
            converged,
            error: None,
        },
        Err(e) => ScanPoint {
            omega0,
            omega_act: f64::NAN,
            total_flux: f64::NAN,
            converged: false,
            error: Some(e.to_string()),
        },
    }
}

/// Activation curve `Ω_act(Ω)` over `[lo, hi]`.
///
/// Points run in parallel on the current rayon pool; the output order and
/// every value are independent of the thread count.
pub fn scan(
    barrier: &BarrierSpec,
    drive: &DriveSpec,
    range: (f64, f64),
    steps: usize,
    options: &ScanOptions,
) -> Result<ScanResult> {
    barrier.check()?;
    drive.check()?;
    let (lo, hi) = range;
    if !(lo > 0.0 && hi < barrier.height && lo < hi) {
        return Err(Error::InvalidParameter {
            name: "scan.range",
            reason: format!("need 0 < min < max < V, got [{lo}, {hi}]"),
        });
    }
    if steps < 2 {
        return Err(Error::InvalidParameter {
            name: "scan.steps",
            reason: format!("need at least 2 points, got {steps}"),
        });
    }
    let points: Vec<ScanPoint> = scan_grid(lo, hi, steps)
        .into_par_iter()
        .map(|om| scan_point(barrier, drive, om, options))
        .collect();
    let result = ScanResult {
        points,
        resonances: Vec::new(),
        meta: ScanMeta {
            barrier: *barrier,
            drive: *drive,
            options: *options,
        },
    };
    let failed = result.failures();
    if failed as f64 > options.max_failure_fraction * steps as f64 {
        return Err(Error::ScanFailed { failed, total: steps });
    }
    Ok(result)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefineOptions {
    /// Target `Ω` bracket width; `None` uses `Γ/10`.
    pub tol: Option<f64>,
    /// Dips shallower than this fraction of `V` are ignored.
    pub min_depth: f64,
    pub max_iter: usize,
}

impl Default for RefineOptions {
    fn default() -> Self {
        Self {
            tol: None,
            min_depth: 1e-3,
            max_iter: 200,
        }
    }
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section minimization of `f` on `[a, b]` down to width `tol`.
/// Returns the best abscissa evaluated and its value.
pub fn golden_section<F>(mut f: F, mut a: f64, mut b: f64, tol: f64, max_iter: usize) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..max_iter {
        if (b - a).abs() <= tol {
            break;
        }
        // NaN compares false, so a failed evaluation moves the bracket away from it
        if fc < fd || fd.is_nan() {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd || fd.is_nan() {
        (c, fc)
    } else {
        (d, fd)
    }
}

fn activation_at(meta: &ScanMeta, omega0: f64) -> f64 {
    scan_point(&meta.barrier, &meta.drive, omega0, &meta.options).omega_act
}

/// Refines a dip of `Ω_act` inside `[a, b]` with fresh solves.
pub fn refine_minimum(meta: &ScanMeta, a: f64, b: f64, refine: &RefineOptions) -> (f64, f64) {
    let tol = refine
        .tol
        .unwrap_or_else(|| resonance_width(&meta.barrier, &meta.drive) / 10.0);
    golden_section(|x| activation_at(meta, x), a, b, tol, refine.max_iter)
}

/// Local minima of the scanned `Ω_act`, refined and ranked by position.
///
/// Failed points are skipped. Depth is the lower of the two neighbouring
/// maxima minus the refined minimum.
pub fn find_resonances(scan: &ScanResult, refine: &RefineOptions) -> Vec<Resonance> {
    let pts: Vec<(f64, f64)> = scan
        .points
        .iter()
        .filter(|p| p.is_ok() && p.omega_act.is_finite())
        .map(|p| (p.omega0, p.omega_act))
        .collect();
    if pts.len() < 5 {
        return Vec::new();
    }
    let minima: Vec<usize> = (1..pts.len() - 1)
        .filter(|&i| pts[i].1 < pts[i - 1].1 && pts[i].1 <= pts[i + 1].1)
        .collect();
    let mut out = Vec::new();
    for (j, &i) in minima.iter().enumerate() {
        let left_from = if j == 0 { 0 } else { minima[j - 1] };
        let right_to = minima.get(j + 1).copied().unwrap_or(pts.len() - 1);
        let peak = |range: std::ops::RangeInclusive<usize>| {
            pts[range].iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max)
        };
        let shoulder = peak(left_from..=i).min(peak(i..=right_to));
        let (omega, omega_act) = {
            let (x, fx) = refine_minimum(&scan.meta, pts[i - 1].0, pts[i + 1].0, refine);
            if fx.is_finite() && fx <= pts[i].1 {
                (x, fx)
            } else {
                pts[i]
            }
        };
        let depth = shoulder - omega_act;
        if depth >= refine.min_depth * scan.meta.barrier.height {
            out.push(Resonance {
                m: out.len() as u32,
                omega,
                omega_act,
                depth,
            });
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub n: i64,
    pub energy: f64,
    pub abs_s: f64,
    pub xi: f64,
    /// `|G(ξ(n))|` scaled to match `|s_n|` at the global maximum.
    pub abs_g: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub params: AiryRegimeParams,
    pub rows: Vec<ComparisonRow>,
    /// Index `n` where the normalization was matched.
    pub match_n: i64,
    /// Pearson correlation of `|s_n|` and the scaled `|G|` over `n < 0`.
    pub lobe_correlation: f64,
    /// Geometric mean of `|s_n| / |G|` over `n > 0` channels below the barrier top.
    pub magnitude_ratio: f64,
    /// Interior local minima of `|s_n|` for `n < 0`.
    pub exact_nodes: Vec<i64>,
    /// Zeros of `Ai(−ξ(n))` mapped back to (fractional) `n < 0`.
    pub analytic_nodes: Vec<f64>,
}

/// Zeros `a_k > 0` of `Ai(−x)` below `x_max`, increasing.
pub fn airy_ai_zeros(x_max: f64) -> Vec<f64> {
    let ai = |x: f64| airy(-x).map(|v| v.ai).unwrap_or(f64::NAN);
    let mut zeros = Vec::new();
    let h = 0.05;
    let mut x = 0.0;
    let mut fx = ai(x);
    while x < x_max {
        let y = x + h;
        let fy = ai(y);
        if fx * fy < 0.0 {
            let (mut a, mut b, mut fa) = (x, y, fx);
            for _ in 0..80 {
                let mid = 0.5 * (a + b);
                let fm = ai(mid);
                if fa * fm <= 0.0 {
                    b = mid;
                } else {
                    a = mid;
                    fa = fm;
                }
            }
            let z = 0.5 * (a + b);
            if z < x_max {
                zeros.push(z);
            }
        }
        x = y;
        fx = fy;
    }
    zeros
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    if a.len() < 2 {
        return f64::NAN;
    }
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    sab / (saa * sbb).sqrt()
}

/// Exact `|s_n|` overlaid with the Airy Green function.
pub fn compare_exact_analytic(
    barrier: &BarrierSpec,
    drive: &DriveSpec,
    incident: &IncidentSpec,
    options: &SolverOptions,
) -> Result<Comparison> {
    let regime = validate(barrier, drive, incident)?;
    if !regime.analytic_regime() {
        return Err(Error::Regime(format!(
            "Airy comparison needs strong, subgap, slow drive; got {regime:?}"
        )));
    }
    let params = AiryRegimeParams::new(barrier, drive, incident)?;
    let sol = solve(barrier, drive, incident, options)?;
    let g: Vec<(f64, Complex64)> = sol
        .grid
        .indices()
        .map(|n| {
            let x = xi(n as f64, &params);
            (x, green_airy(x, &params))
        })
        .collect();
    let (imax, _) = sol
        .s
        .iter()
        .enumerate()
        .fold((0, -1.0), |best, (i, v)| if v.norm() > best.1 { (i, v.norm()) } else { best });
    let norm = sol.s[imax].norm() / g[imax].1.norm();
    let rows: Vec<ComparisonRow> = sol
        .channels
        .iter()
        .zip(&sol.s)
        .zip(&g)
        .map(|((c, s), (x, gv))| ComparisonRow {
            n: c.n,
            energy: c.energy,
            abs_s: s.norm(),
            xi: *x,
            abs_g: gv.norm() * norm,
        })
        .collect();

    let below: Vec<&ComparisonRow> = rows.iter().filter(|r| r.n < 0).collect();
    let lobe_correlation = pearson(
        &below.iter().map(|r| r.abs_s).collect::<Vec<_>>(),
        &below.iter().map(|r| r.abs_g).collect::<Vec<_>>(),
    );
    let logs: Vec<f64> = rows
        .iter()
        .filter(|r| r.n > 0 && r.energy < barrier.height && r.abs_s > 0.0 && r.abs_g > 0.0)
        .map(|r| (r.abs_s / r.abs_g).ln())
        .collect();
    let magnitude_ratio = if logs.is_empty() {
        f64::NAN
    } else {
        (logs.iter().sum::<f64>() / logs.len() as f64).exp()
    };
    let exact_nodes = below
        .windows(3)
        .filter(|w| w[1].abs_s < w[0].abs_s && w[1].abs_s < w[2].abs_s)
        .map(|w| w[1].n)
        .collect();
    let xi_top = xi(-1.0, &params);
    let analytic_nodes = airy_ai_zeros(xi_top)
        .into_iter()
        .map(|z| z * params.scale - params.shift)
        .filter(|&n| n >= sol.grid.n_min as f64)
        .collect();
    Ok(Comparison {
        params,
        rows,
        match_n: sol.channels[imax].n,
        lobe_correlation,
        magnitude_ratio,
        exact_nodes,
        analytic_nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn specs(v: f64, l: f64, beta: f64, omega: f64) -> (BarrierSpec, DriveSpec) {
        (BarrierSpec::new(v, l).unwrap(), DriveSpec::new(beta, omega, 0.0).unwrap())
    }

    fn solved(b: &BarrierSpec, d: &DriveSpec, om: f64) -> SidebandSolution {
        solve(b, d, &IncidentSpec::new(om).unwrap(), &SolverOptions::default()).unwrap()
    }

    #[test]
    fn delta_weighted_mean() {
        let w = [(-2, 0.0), (3, 2.5), (4, 0.0)];
        assert_eq!(weighted_mean_energy(0.5, 0.01, &w).unwrap(), 0.5 + 3.0 * 0.01);
        assert_eq!(weighted_mean_energy(0.5, 0.01, &[(0, 0.0)]), Err(Error::NoTransmission));
        assert_eq!(weighted_mean_energy(0.5, 0.01, &[]), Err(Error::NoTransmission));
    }

    #[test]
    fn undriven_activation_is_incident_energy() {
        let (b, d) = specs(1.0, 3.0, 0.0, 0.05);
        for om in [0.1, 0.5, 0.9] {
            let sol = solved(&b, &d, om);
            assert_eq!(activation_energy(&sol, WeightMode::Amplitude).unwrap(), om);
            assert_eq!(activation_energy(&sol, WeightMode::Flux).unwrap(), om);
            let sp = spectrum(&sol, DEFAULT_SPECTRUM_FLOOR);
            assert_eq!(sp.entries.len(), 1);
            assert_eq!(sp.entries[0].n, 0);
        }
    }

    #[test]
    fn activation_within_open_channel_energies() {
        let (b, d) = specs(1.0, 4.0, 1.2, 0.05);
        for om in [0.3, 0.6, 0.8] {
            let sol = solved(&b, &d, om);
            let open: Vec<f64> = sol.channels.iter().filter(|c| c.is_open()).map(|c| c.energy).collect();
            let lo = open.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = open.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            for mode in [WeightMode::Amplitude, WeightMode::Flux] {
                let act = activation_energy(&sol, mode).unwrap();
                assert!(act >= lo && act <= hi, "{act} not in [{lo}, {hi}]");
            }
        }
    }

    #[test]
    fn amplitude_weight_equals_transmitted_intensity() {
        let (b, d) = specs(1.0, 4.0, 1.2, 0.05);
        let sol = solved(&b, &d, 0.6);
        let w = activation_weights(&sol, WeightMode::Amplitude);
        let sp = spectrum(&sol, 0.0);
        for (n, wn) in w {
            let e = sp.entries.iter().find(|e| e.n == n).unwrap();
            assert!((e.flux_weight - wn).abs() <= 1e-12 * wn.max(1e-300));
        }
    }

    #[test]
    fn spectrum_is_sorted_and_phase_invariant() {
        let (b, d) = specs(1.0, 4.0, 1.2, 0.05);
        let a = spectrum(&solved(&b, &d, 0.6), DEFAULT_SPECTRUM_FLOOR);
        let c = spectrum(&solved(&b, &d.with_eta(std::f64::consts::FRAC_PI_3), 0.6), DEFAULT_SPECTRUM_FLOOR);
        assert!(a.entries.windows(2).all(|w| w[1].n == w[0].n + 1));
        assert!(a.entries.iter().all(|e| e.flux_weight >= 0.0));
        assert_eq!(a.entries.len(), c.entries.len());
        for (x, y) in a.entries.iter().zip(&c.entries) {
            assert_eq!(x.n, y.n);
            assert!((x.abs_s - y.abs_s).abs() <= 1e-12 * x.abs_s.max(1e-300) + 1e-18);
        }
    }

    #[test]
    fn scan_grid_endpoints() {
        let g = scan_grid(0.2, 0.8, 7);
        assert_eq!(g.len(), 7);
        assert_eq!(g[0], 0.2);
        assert_eq!(g[6], 0.8);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn undriven_scan_is_identity() {
        let (b, d) = specs(1.0, 3.0, 0.0, 0.05);
        let s = scan(&b, &d, (0.1, 0.9), 17, &ScanOptions::default()).unwrap();
        for p in &s.points {
            assert_eq!(p.omega_act, p.omega0);
        }
        assert!(find_resonances(&s, &RefineOptions::default()).is_empty());
    }

    #[test]
    fn scan_rejects_bad_range() {
        let (b, d) = specs(1.0, 3.0, 0.5, 0.05);
        assert!(scan(&b, &d, (0.5, 1.2), 10, &ScanOptions::default()).is_err());
        assert!(scan(&b, &d, (0.0, 0.5), 10, &ScanOptions::default()).is_err());
        assert!(scan(&b, &d, (0.2, 0.5), 1, &ScanOptions::default()).is_err());
    }

    #[test]
    fn failed_points_are_marked_and_counted() {
        let (b, d) = specs(1.0, 8.0, 1.0, 0.01);
        let mut opts = ScanOptions::default();
        opts.solver.n_cap = 8;
        let err = scan(&b, &d, (0.3, 0.6), 6, &opts).unwrap_err();
        assert_eq!(err, Error::ScanFailed { failed: 6, total: 6 });
        opts.max_failure_fraction = 1.0;
        let s = scan(&b, &d, (0.3, 0.6), 6, &opts).unwrap();
        assert!(s.points.iter().all(|p| p.error.is_some() && p.omega_act.is_nan() && !p.converged));
    }

    #[test]
    fn scan_is_deterministic_across_pools() {
        let (b, d) = specs(1.0, 6.0, 1.4, 0.02);
        let run = |threads: usize| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| scan(&b, &d, (0.4, 0.8), 40, &ScanOptions::default()).unwrap())
        };
        let a = run(1);
        let c = run(4);
        assert_eq!(a.points.len(), c.points.len());
        for (x, y) in a.points.iter().zip(&c.points) {
            assert_eq!(x.omega0.to_bits(), y.omega0.to_bits());
            assert_eq!(x.omega_act.to_bits(), y.omega_act.to_bits());
            assert_eq!(x.total_flux.to_bits(), y.total_flux.to_bits());
        }
    }

    #[test]
    fn golden_section_parabola() {
        let (x, fx) = golden_section(|x| (x - 0.3).powi(2) + 1.0, 0.0, 1.0, 1e-10, 200);
        assert!((x - 0.3).abs() < 1e-7);
        assert!((fx - 1.0).abs() < 1e-15);
    }

    #[test]
    fn airy_zeros_table() {
        let z = airy_ai_zeros(10.0);
        let want = [2.338107410459767, 4.087949444130970, 5.520559828095551, 6.786708090071759, 7.944133587120853, 9.022650853340980];
        assert_eq!(z.len(), want.len());
        for (a, b) in z.iter().zip(want) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn comparison_refused_without_drive() {
        let (b, d) = specs(1.0, 10.0, 0.0, 0.0075);
        let r = compare_exact_analytic(&b, &d, &IncidentSpec::new(0.625).unwrap(), &SolverOptions::default());
        assert!(matches!(r, Err(Error::Regime(_))));
    }

    #[test]
    fn comparison_normalization_point() {
        let (b, d) = specs(1.0, 5.375, 1.739535, 0.0075);
        let c = compare_exact_analytic(&b, &d, &IncidentSpec::new(0.625).unwrap(), &SolverOptions::default()).unwrap();
        let row = c.rows.iter().find(|r| r.n == c.match_n).unwrap();
        assert!((row.abs_s / row.abs_g - 1.0).abs() < 1e-15);
    }
}
