//! Complex root loci, the stability functional `M`, critical-parameter
//! bisection, and the phase diagram.
//!
//! Stability is decided by `M = max over kx of the largest countable
//! growth rate Im w` of the quartic roots at `ky = 0` (at the instability
//! threshold the wave vector is along x). Two classes of roots do not count
//! towards `M`:
//!
//! - roots coinciding with a Doppler-shifted Drude pole, where the quartic
//!   and the characteristic equation are no longer equivalent (threshold
//!   [`ScanSettings::spurious_floor`] on the pole factor), and
//! - purely relaxational roots (`Re w = 0`, `Im w < 0`): overdamped
//!   charge-rearrangement modes that exist even for static slabs and whose
//!   decay rate tends to zero with `kx`, but which never cross into the
//!   upper half-plane themselves. Counting them would pin `M` near zero for
//!   every configuration; excluding them leaves the sign of `M` unchanged
//!   (a growing root is always counted) and makes `M = -gamma/2` exact at
//!   `v = 0`.
//!
//! The `kx` scan combines a geometric base grid with a log-spaced detuning
//! cluster around the Doppler resonance `kx = 2 w_sp / v_rel`, where the
//! unstable window (relative width `~ exp(-2 w_sp L / v_rel)`) lives; a
//! golden-section refinement then localises the maximiser.

use crate::material::{MaterialError, ShearConfig};
use crate::poly::{all_roots, PolyError};
use crate::scattering::{drude_pole_factor, quartic_poly, QuarticPoly};
use crate::{omega_sp, C64};
use alloc::vec::Vec;
use core::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum StabilityError {
    Material(MaterialError),
    Poly(PolyError),
    /// A root failed the residual gate after polishing.
    RootResidual { kx: f64, residual: f64 },
    /// The growth maximiser hit the scan boundary even after extending it.
    BoundaryMaximum { kx: f64 },
    /// `M` has the same sign across the whole bracket.
    NoSignChange { parameter: Parameter, always_stable: bool },
    /// The pre-scan found more than one sign change; the bisection
    /// assumption does not hold.
    NonMonotone { parameter: Parameter },
}

impl fmt::Display for StabilityError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StabilityError::Material(e) => write!(f, "{e}"),
            StabilityError::Poly(e) => write!(f, "{e}"),
            StabilityError::RootResidual { kx, residual } => {
                write!(f, "root residual {residual:.3e} above gate at kx = {kx}")
            }
            StabilityError::BoundaryMaximum { kx } => {
                write!(f, "growth maximiser stuck at scan boundary kx = {kx}")
            }
            StabilityError::NoSignChange { parameter, always_stable } => write!(
                f,
                "no sign change of M over the {parameter:?} bracket ({})",
                if *always_stable { "stable everywhere" } else { "unstable everywhere" }
            ),
            StabilityError::NonMonotone { parameter } => {
                write!(f, "M is not sign-monotone in {parameter:?} over the bracket")
            }
        }
    }
}

impl From<MaterialError> for StabilityError {
    fn from(e: MaterialError) -> Self {
        StabilityError::Material(e)
    }
}

impl From<PolyError> for StabilityError {
    fn from(e: PolyError) -> Self {
        StabilityError::Poly(e)
    }
}

/// Which parameter a critical search bisects.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parameter {
    Gamma,
    Velocity,
    Gap,
}

/// Scan and gate settings for the stability machinery.
#[derive(Debug, Clone, Copy)]
pub struct ScanSettings {
    /// Lower end of the geometric base grid.
    pub kx_min: f64,
    /// Upper truncation; `None` means `max(12/L, 8 w_sp / v_rel)`:
    /// `exp(-2|k|L)` kills the coupling beyond `12/L` and the Doppler
    /// resonance sits near `2 w_sp / v_rel`.
    pub k_max: Option<f64>,
    /// Points in the geometric base grid.
    pub n_base: usize,
    /// Golden-section window target for the maximiser.
    pub refine_tol: f64,
    /// Threshold on `|w_a (w_a + ig) w_b (w_b + ig)|` below which a root is
    /// flagged as a spurious Drude-pole coincidence.
    pub spurious_floor: f64,
    /// `|Re w|` scale below which a decaying root counts as purely
    /// relaxational.
    pub axis_tol: f64,
    /// Residual gate on polished roots.
    pub residual_gate: f64,
}

impl Default for ScanSettings {
    fn default() -> Self {
        Self {
            kx_min: 1e-3,
            k_max: None,
            n_base: 400,
            refine_tol: 1e-6,
            spurious_floor: 1e-8,
            axis_tol: 1e-9,
            residual_gate: 1e-10,
        }
    }
}

impl ScanSettings {
    pub fn k_max_for(&self, cfg: &ShearConfig) -> f64 {
        self.k_max.unwrap_or_else(|| {
            let vrel = cfg.relative_velocity().abs();
            let coupling = 12.0 / cfg.gap();
            if vrel > 0.0 {
                coupling.max(8.0 * omega_sp() / vrel)
            } else {
                coupling
            }
        })
    }
}

/// The four roots of the characteristic quartic at one `(kx, ky)`, with
/// normalised residuals and spurious flags.
#[derive(Debug, Clone)]
pub struct RootSet {
    pub kx: f64,
    pub ky: f64,
    /// Sorted by real then imaginary part from [`solve_roots`]; in branch
    /// order (index = branch id) from [`root_locus`].
    pub roots: Vec<C64>,
    /// `|Q(root)| / max|c_i|` per root.
    pub residuals: Vec<f64>,
    /// Root coincides with a Doppler-shifted Drude pole.
    pub spurious: Vec<bool>,
}

fn rational_d_polish(cfg: &ShearConfig, kx: f64, ky: f64, mut w: C64, steps: u32) -> C64 {
    // Newton on D(w) = 1 - E / (Pa Pb) with P = 2 (w - s)(w - s + ig) - 1.
    let gamma = cfg.drude.gamma;
    let ig = C64::new(0.0, gamma);
    let sa = kx * cfg.v_upper;
    let sb = kx * cfg.v_lower;
    let k = libm::hypot(kx, ky);
    let e = libm::exp(-2.0 * k * cfg.gap());
    for _ in 0..steps {
        let wa = w - sa;
        let wb = w - sb;
        let pa = 2.0 * wa * (wa + ig) - 1.0;
        let pb = 2.0 * wb * (wb + ig) - 1.0;
        let prod = pa * pb;
        if prod.norm() < 1e-14 {
            break;
        }
        let dpa = 2.0 * (2.0 * wa + ig);
        let dpb = 2.0 * (2.0 * wb + ig);
        let d = C64::new(1.0, 0.0) - e / prod;
        let dd = e * (dpa * pb + pa * dpb) / (prod * prod);
        if dd.norm() == 0.0 {
            break;
        }
        let step = d / dd;
        w -= step;
        if step.norm() < 1e-15 * (1.0 + w.norm()) {
            break;
        }
    }
    w
}

/// All four roots of the quartic at `(kx, ky)`, polished by Newton steps on
/// the rational characteristic value and sorted by real then imaginary part.
pub fn solve_roots(cfg: &ShearConfig, kx: f64, ky: f64) -> Result<RootSet, StabilityError> {
    solve_roots_with(cfg, kx, ky, &ScanSettings::default())
}

pub fn solve_roots_with(
    cfg: &ShearConfig,
    kx: f64,
    ky: f64,
    settings: &ScanSettings,
) -> Result<RootSet, StabilityError> {
    let q = quartic_poly(cfg, kx, ky);
    let raw = all_roots(&q.c, 300, 1e-13)?;
    let mut roots = Vec::with_capacity(4);
    let mut residuals = Vec::with_capacity(4);
    let mut spurious = Vec::with_capacity(4);
    for r in raw {
        let pole = drude_pole_factor(cfg, kx, r).norm();
        let is_spurious = pole < settings.spurious_floor;
        let polished = if is_spurious { r } else { rational_d_polish(cfg, kx, ky, r, 3) };
        // keep the polish only if it did not degrade the polynomial residual
        let cand = if q.residual(polished) <= q.residual(r) { polished } else { r };
        let res = q.residual(cand);
        if res > settings.residual_gate {
            return Err(StabilityError::RootResidual { kx, residual: res });
        }
        roots.push(cand);
        residuals.push(res);
        spurious.push(is_spurious);
    }
    let mut idx: Vec<usize> = (0..roots.len()).collect();
    idx.sort_by(|&a, &b| {
        roots[a].re.total_cmp(&roots[b].re).then(roots[a].im.total_cmp(&roots[b].im))
    });
    Ok(RootSet {
        kx,
        ky,
        roots: idx.iter().map(|&i| roots[i]).collect(),
        residuals: idx.iter().map(|&i| residuals[i]).collect(),
        spurious: idx.iter().map(|&i| spurious[i]).collect(),
    })
}

/// Largest countable growth rate of a root set (see module docs for what
/// does not count). `None` when every root is excluded.
pub fn counted_max_im(set: &RootSet, settings: &ScanSettings) -> Option<f64> {
    let mut best: Option<f64> = None;
    for (i, r) in set.roots.iter().enumerate() {
        if set.spurious[i] {
            continue;
        }
        if r.im < 0.0 && r.re.abs() < settings.axis_tol * (1.0 + r.norm()) {
            continue;
        }
        best = Some(best.map_or(r.im, |b: f64| b.max(r.im)));
    }
    best
}

/// Stability verdict for one configuration.
#[derive(Debug, Clone, Copy)]
pub struct StabilityReport {
    /// `M`: maximal countable growth rate over the scanned `kx` range.
    pub max_growth: f64,
    pub argmax_kx: f64,
    /// `M < 0`.
    pub stable: bool,
    /// Width of the final refinement window around the maximiser.
    pub scan_resolution: f64,
}

fn scan_grid(cfg: &ShearConfig, settings: &ScanSettings) -> Vec<f64> {
    let k_max = settings.k_max_for(cfg);
    let kx_min = settings.kx_min.min(k_max / 2.0);
    let n = settings.n_base.max(2);
    let ratio = libm::log(k_max / kx_min) / (n - 1) as f64;
    let mut grid: Vec<f64> = (0..n).map(|i| kx_min * libm::exp(ratio * i as f64)).collect();

    // log-spaced detuning cluster around the Doppler resonance; resolves the
    // narrow unstable window at weak coupling down to relative width 1e-4
    let vrel = cfg.relative_velocity().abs();
    if vrel > 0.0 {
        let k_star = 2.0 * omega_sp() / vrel;
        if k_star > kx_min && k_star < k_max {
            grid.push(k_star);
            let n_det = 48;
            let (lo, hi) = (1e-4f64, 0.2f64);
            let step = libm::log(hi / lo) / (n_det - 1) as f64;
            for i in 0..n_det {
                let det = lo * libm::exp(step * i as f64);
                for s in [-1.0, 1.0] {
                    let kx = k_star * (1.0 + s * det);
                    if kx > kx_min && kx < k_max {
                        grid.push(kx);
                    }
                }
            }
        }
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

fn growth_at(cfg: &ShearConfig, kx: f64, settings: &ScanSettings) -> f64 {
    match solve_roots_with(cfg, kx, 0.0, settings) {
        Ok(set) => counted_max_im(&set, settings).unwrap_or(f64::NEG_INFINITY),
        Err(_) => f64::NEG_INFINITY,
    }
}

fn golden_refine(
    cfg: &ShearConfig,
    mut a: f64,
    mut b: f64,
    settings: &ScanSettings,
) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = growth_at(cfg, c, settings);
    let mut fd = growth_at(cfg, d, settings);
    while (b - a).abs() > settings.refine_tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = growth_at(cfg, c, settings);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = growth_at(cfg, d, settings);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// `M = max over kx in (0, k_max] of the largest countable Im w` at
/// `ky = 0`: coarse scan plus golden-section refinement.
pub fn max_growth(cfg: &ShearConfig) -> Result<StabilityReport, StabilityError> {
    max_growth_with(cfg, &ScanSettings::default())
}

pub fn max_growth_with(
    cfg: &ShearConfig,
    settings: &ScanSettings,
) -> Result<StabilityReport, StabilityError> {
    let mut settings = *settings;
    let mut extended = false;
    loop {
        let grid = scan_grid(cfg, &settings);
        let vals: Vec<f64> = grid.iter().map(|&kx| growth_at(cfg, kx, &settings)).collect();
        let (mut best_i, mut best) = (0usize, f64::NEG_INFINITY);
        for (i, &v) in vals.iter().enumerate() {
            if v > best {
                best = v;
                best_i = i;
            }
        }
        let at_boundary = best_i == 0 || best_i == grid.len() - 1;
        if at_boundary && !extended {
            // widen the scan once; a plateau (no improvement) is accepted
            let widened = ScanSettings {
                kx_min: settings.kx_min / 4.0,
                k_max: Some(settings.k_max_for(cfg) * 2.0),
                ..settings
            };
            let wide_grid = scan_grid(cfg, &widened);
            let wide_best = wide_grid
                .iter()
                .map(|&kx| growth_at(cfg, kx, &widened))
                .fold(f64::NEG_INFINITY, f64::max);
            if wide_best > best + 1e-12 * (1.0 + best.abs()) {
                settings = widened;
                extended = true;
                continue;
            }
        } else if at_boundary && extended {
            return Err(StabilityError::BoundaryMaximum { kx: grid[best_i] });
        }

        let lo = if best_i == 0 { grid[0] } else { grid[best_i - 1] };
        let hi = if best_i == grid.len() - 1 { grid[best_i] } else { grid[best_i + 1] };
        let (argmax, refined) = golden_refine(cfg, lo, hi, &settings);
        let (m, arg) = if refined > best { (refined, argmax) } else { (best, grid[best_i]) };
        return Ok(StabilityReport {
            max_growth: m,
            argmax_kx: arg,
            stable: m < 0.0,
            scan_resolution: settings.refine_tol,
        });
    }
}

/// Root sets over a `kx` range with branch-continuous ordering
/// (nearest-neighbour matching, ties broken by velocity extrapolation).
pub fn root_locus(
    cfg: &ShearConfig,
    kx_min: f64,
    kx_max: f64,
    steps: usize,
) -> Result<Vec<RootSet>, StabilityError> {
    let settings = ScanSettings::default();
    let n = steps.max(2);
    let mut out: Vec<RootSet> = Vec::with_capacity(n);
    let perms = permutations4();
    for i in 0..n {
        let kx = kx_min + (kx_max - kx_min) * i as f64 / (n - 1) as f64;
        let mut set = solve_roots_with(cfg, kx, 0.0, &settings)?;
        if let Some(prev) = out.last() {
            // predicted continuation of each branch
            let pred: Vec<C64> = if out.len() >= 2 {
                let before = &out[out.len() - 2];
                prev.roots
                    .iter()
                    .zip(before.roots.iter())
                    .map(|(p, q)| p + (p - q))
                    .collect()
            } else {
                prev.roots.clone()
            };
            let mut best_perm = &perms[0];
            let mut best_cost = f64::INFINITY;
            for p in &perms {
                let cost: f64 =
                    (0..4).map(|j| (set.roots[p[j]] - pred[j]).norm()).sum();
                if cost < best_cost {
                    best_cost = cost;
                    best_perm = p;
                }
            }
            set = RootSet {
                kx: set.kx,
                ky: set.ky,
                roots: best_perm.iter().map(|&j| set.roots[j]).collect(),
                residuals: best_perm.iter().map(|&j| set.residuals[j]).collect(),
                spurious: best_perm.iter().map(|&j| set.spurious[j]).collect(),
            };
        }
        out.push(set);
    }
    Ok(out)
}

fn permutations4() -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4 {
        for b in 0..4 {
            if b == a {
                continue;
            }
            for c in 0..4 {
                if c == a || c == b {
                    continue;
                }
                let d = 6 - a - b - c;
                out.push([a, b, c, d]);
            }
        }
    }
    out
}

/// Outcome of a critical-parameter bisection.
#[derive(Debug, Clone, Copy)]
pub struct CriticalValue {
    pub parameter: Parameter,
    pub value: f64,
    /// Final bracket around the sign change.
    pub bracket: (f64, f64),
    pub iterations: u32,
}

/// Absolute bisection tolerance on the critical parameter; resolves the
/// two-significant-figure thresholds with margin.
pub const CRITICAL_TOL: f64 = 1e-4;

fn bisect_critical<F>(
    parameter: Parameter,
    bracket: (f64, f64),
    unstable_at_low: bool,
    mut m_of: F,
) -> Result<CriticalValue, StabilityError>
where
    F: FnMut(f64) -> Result<f64, StabilityError>,
{
    // monotonicity pre-scan: the sign of M must change exactly once
    let (lo0, hi0) = bracket;
    let n_scan = 8;
    let step = libm::log(hi0 / lo0) / (n_scan - 1) as f64;
    let mut signs = Vec::with_capacity(n_scan);
    let mut xs = Vec::with_capacity(n_scan);
    for i in 0..n_scan {
        let x = lo0 * libm::exp(step * i as f64);
        xs.push(x);
        signs.push(m_of(x)? > 0.0);
    }
    let changes = signs.windows(2).filter(|w| w[0] != w[1]).count();
    if changes == 0 {
        return Err(StabilityError::NoSignChange { parameter, always_stable: !signs[0] });
    }
    if changes > 1 || signs[0] != unstable_at_low {
        return Err(StabilityError::NonMonotone { parameter });
    }
    let flip = signs.windows(2).position(|w| w[0] != w[1]).unwrap();
    let (mut lo, mut hi) = (xs[flip], xs[flip + 1]);

    let mut iterations = 0u32;
    while hi - lo > CRITICAL_TOL {
        let mid = 0.5 * (lo + hi);
        let unstable = m_of(mid)? > 0.0;
        if unstable == unstable_at_low {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
        if iterations > 200 {
            break;
        }
    }
    Ok(CriticalValue { parameter, value: 0.5 * (lo + hi), bracket: (lo, hi), iterations })
}

/// Critical damping `gamma_cr(v, L)`: bisection on `gamma in [1e-4, 1]` for
/// `M = 0`; `M` decreases through zero as `gamma` grows (validated by the
/// pre-scan).
pub fn critical_gamma(v: f64, l: f64) -> Result<CriticalValue, StabilityError> {
    bisect_critical(Parameter::Gamma, (1e-4, 1.0), true, |g| {
        Ok(max_growth(&ShearConfig::symmetric(g, v, l)?)?.max_growth)
    })
}

/// Critical velocity `v_cr(gamma, L)`: bisection on `v in [1e-3, 0.99]`;
/// `M` increases through zero as `v` grows.
pub fn critical_velocity(gamma: f64, l: f64) -> Result<CriticalValue, StabilityError> {
    bisect_critical(Parameter::Velocity, (1e-3, 0.99), false, |v| {
        Ok(max_growth(&ShearConfig::symmetric(gamma, v, l)?)?.max_growth)
    })
}

/// Critical gap `L_cr(gamma, v)`: bisection on `L in [1e-3, 50]`;
/// `M` decreases through zero as `L` grows.
pub fn critical_gap(gamma: f64, v: f64) -> Result<CriticalValue, StabilityError> {
    bisect_critical(Parameter::Gap, (1e-3, 50.0), true, |l| {
        Ok(max_growth(&ShearConfig::symmetric(gamma, v, l)?)?.max_growth)
    })
}

/// Per-cell outcome of the phase diagram.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellStatus {
    Converged,
    /// No sign change: stable for every damping in the bracket
    /// (`gamma_cr` recorded as 0).
    AlwaysStable,
    Failed,
}

#[derive(Debug, Clone, Copy)]
pub struct DiagramCell {
    pub v: f64,
    pub l: f64,
    pub gamma_cr: f64,
    /// Analytic estimate `w_sp exp(-2 / v_bar)`, `v_bar = v / (w_sp L)`.
    pub estimate: f64,
    pub status: CellStatus,
}

/// `gamma_cr` over a `(v, L)` grid, row-major over `v` then `L`; per-cell
/// failures are recorded in-band and never abort the sweep.
pub fn stability_diagram(v_values: &[f64], l_values: &[f64]) -> Vec<DiagramCell> {
    let mut cells = Vec::with_capacity(v_values.len() * l_values.len());
    for &v in v_values {
        for &l in l_values {
            let estimate = crate::scattering::critical_gamma_estimate(v, l);
            let cell = match critical_gamma(v, l) {
                Ok(cv) => DiagramCell { v, l, gamma_cr: cv.value, estimate, status: CellStatus::Converged },
                Err(StabilityError::NoSignChange { always_stable: true, .. }) => {
                    DiagramCell { v, l, gamma_cr: 0.0, estimate, status: CellStatus::AlwaysStable }
                }
                Err(_) => DiagramCell { v, l, gamma_cr: f64::NAN, estimate, status: CellStatus::Failed },
            };
            cells.push(cell);
        }
    }
    cells
}
