//! Quasi-static scalar and dyadic Green's functions of the slab-gap-slab
//! system, with the rotation and reciprocity identities and the sign failure
//! of the naive fluctuation-dissipation kernel.
//!
//! The scalar kernel `g` solves the 1D Poisson problem
//! `(k^2 - d^2/dz1^2) g = delta(z1 - z2)` with the interface conditions
//! folded into the reflection coefficients; the delta prefactors
//! `delta(w1 - w2) delta(k1 - k2)` are stripped by convention. Every kernel
//! is a short sum of exponential terms `amp * exp(k (s1 z1 + s2 z2))`, and
//! the dyadic
//!
//! `Gbar_12 = (-1/eps_src) D_1 D~_2^T g`,
//! `D_1 = (i kx, i ky, d/dz1)`, `D~_2 = (-i kx, -i ky, d/dz2)`
//!
//! is assembled symbolically per term (the source-side gradient carries the
//! opposite sign of the transverse wavevector because it acts on
//! `exp(-i k . x2)`). This keeps the null-friction combination
//! `u_x . (Gbar_12 + Gbar_21^T) u_z` zero to rounding, term by term.

use crate::material::{slab_eps, MaterialError, ShearConfig, Side, SpectralPoint};
use crate::scattering::{surface_coeffs, ScatteringError, SurfaceCoefficients};
use crate::C64;
use alloc::vec::Vec;
use core::fmt;

/// `|1 - r_+ r_-|` below which a real-frequency evaluation is refused: the
/// configuration is at (or numerically at) a pole of the coupled system.
pub const GAP_RESONANCE_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub enum GreensError {
    Material(MaterialError),
    Scattering(ScatteringError),
    /// Observation/source coordinates violate the region layout.
    Layout(&'static str),
    /// `|1 - r_+ r_-|` under [`GAP_RESONANCE_FLOOR`].
    GapResonance { d: C64 },
    /// An identity check exceeded its tolerance.
    IdentityViolation { name: &'static str, residual: f64 },
}

impl fmt::Display for GreensError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GreensError::Material(e) => write!(f, "{e}"),
            GreensError::Scattering(e) => write!(f, "{e}"),
            GreensError::Layout(what) => write!(f, "layout error: {what}"),
            GreensError::GapResonance { d } => {
                write!(f, "coupled-surface resonance: 1 - r+r- = {d}")
            }
            GreensError::IdentityViolation { name, residual } => {
                write!(f, "{name} identity violated: residual {residual:.3e}")
            }
        }
    }
}

impl From<MaterialError> for GreensError {
    fn from(e: MaterialError) -> Self {
        GreensError::Material(e)
    }
}

impl From<ScatteringError> for GreensError {
    fn from(e: ScatteringError) -> Self {
        GreensError::Scattering(e)
    }
}

/// Where the source coordinate `z2` lives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceRegion {
    /// Source inside the upper slab (`z2 > z_plus`), observation in the gap.
    Upper,
    /// Source inside the lower slab (`z2 < z_minus`), observation in the gap.
    Lower,
    /// Both points in the gap (used by the fluctuation-dissipation
    /// identities, which are stated for gap points).
    Gap,
}

/// One exponential term `amp * exp(k (s_obs z1 + s_src z2))`.
#[derive(Debug, Clone, Copy)]
struct ExpTerm {
    amp: C64,
    s_obs: i8,
    s_src: i8,
}

struct Kernel {
    terms: Vec<ExpTerm>,
    k: f64,
    /// Permittivity at the source point.
    eps_src: C64,
}

fn check_gap(cfg: &ShearConfig, z: f64, what: &'static str) -> Result<(), GreensError> {
    if z <= cfg.z_minus || z >= cfg.z_plus {
        let _ = what;
        return Err(GreensError::Layout("observation point must lie inside the gap"));
    }
    Ok(())
}

fn coeffs_and_d(
    cfg: &ShearConfig,
    pt: &SpectralPoint,
) -> Result<(SurfaceCoefficients, C64), GreensError> {
    let sc = surface_coeffs(cfg, pt)?;
    let d = C64::new(1.0, 0.0) - sc.r_plus * sc.r_minus;
    if d.norm() < GAP_RESONANCE_FLOOR {
        return Err(GreensError::GapResonance { d });
    }
    Ok((sc, d))
}

fn kernel(
    cfg: &ShearConfig,
    pt: &SpectralPoint,
    z1: f64,
    z2: f64,
    region: SourceRegion,
) -> Result<Kernel, GreensError> {
    let k = pt.k_norm();
    if k <= 0.0 {
        return Err(GreensError::Layout("transverse wavenumber must be nonzero"));
    }
    check_gap(cfg, z1, "z1")?;
    let (sc, d) = coeffs_and_d(cfg, pt)?;
    let pref = (2.0 * k * d).finv();
    let mut terms = Vec::with_capacity(5);
    let eps_src = match region {
        SourceRegion::Upper => {
            if z2 <= cfg.z_plus {
                return Err(GreensError::Layout("upper-slab source requires z2 > z_plus"));
            }
            // t+ (1 + r- e^{-2k z1}) e^{+k(z1 - z2)} / (2k D)
            terms.push(ExpTerm { amp: pref * sc.t_plus, s_obs: 1, s_src: -1 });
            terms.push(ExpTerm { amp: pref * sc.t_plus * sc.r_minus, s_obs: -1, s_src: -1 });
            slab_eps(cfg, Side::Upper, pt)?
        }
        SourceRegion::Lower => {
            if z2 >= cfg.z_minus {
                return Err(GreensError::Layout("lower-slab source requires z2 < z_minus"));
            }
            // t- (1 + r+ e^{+2k z1}) e^{-k(z1 - z2)} / (2k D)
            terms.push(ExpTerm { amp: pref * sc.t_minus, s_obs: -1, s_src: 1 });
            terms.push(ExpTerm { amp: pref * sc.t_minus * sc.r_plus, s_obs: 1, s_src: 1 });
            slab_eps(cfg, Side::Lower, pt)?
        }
        SourceRegion::Gap => {
            check_gap(cfg, z2, "z2")?;
            // direct term plus the four image families
            let free = (2.0 * k).recip();
            if z1 >= z2 {
                terms.push(ExpTerm { amp: C64::new(free, 0.0), s_obs: -1, s_src: 1 });
            } else {
                terms.push(ExpTerm { amp: C64::new(free, 0.0), s_obs: 1, s_src: -1 });
            }
            let rr = sc.r_plus * sc.r_minus;
            terms.push(ExpTerm { amp: pref * sc.r_plus, s_obs: 1, s_src: 1 });
            terms.push(ExpTerm { amp: pref * sc.r_minus, s_obs: -1, s_src: -1 });
            terms.push(ExpTerm { amp: pref * rr, s_obs: 1, s_src: -1 });
            terms.push(ExpTerm { amp: pref * rr, s_obs: -1, s_src: 1 });
            C64::new(1.0, 0.0)
        }
    };
    Ok(Kernel { terms, k, eps_src })
}

/// Scalar and dyadic Green's function amplitudes at one configuration
/// (delta prefactors stripped).
#[derive(Debug, Clone)]
pub struct GreensEval {
    /// Scalar Poisson kernel amplitude.
    pub g: C64,
    /// `Gbar = (w^2/c^2) G`, row-major 3x3 (x, y, z).
    pub dyad: [[C64; 3]; 3],
    pub source_region: SourceRegion,
    pub z1: f64,
    pub z2: f64,
}

impl Kernel {
    fn scalar(&self, z1: f64, z2: f64) -> C64 {
        self.terms
            .iter()
            .map(|t| t.amp * libm::exp(self.k * (t.s_obs as f64 * z1 + t.s_src as f64 * z2)))
            .sum()
    }

    fn dyad(&self, pt: &SpectralPoint, z1: f64, z2: f64, swapped: bool) -> [[C64; 3]; 3] {
        let k = self.k;
        let obs_vec = |s: i8| {
            [C64::new(0.0, pt.kx), C64::new(0.0, pt.ky), C64::new(s as f64 * k, 0.0)]
        };
        let src_vec = |s: i8| {
            [C64::new(0.0, -pt.kx), C64::new(0.0, -pt.ky), C64::new(s as f64 * k, 0.0)]
        };
        let mut out = [[C64::default(); 3]; 3];
        for t in &self.terms {
            let envelope = libm::exp(k * (t.s_obs as f64 * z1 + t.s_src as f64 * z2));
            let coef = -t.amp * envelope / self.eps_src;
            // Gbar_12 differentiates z1 on the observation slot; the swapped
            // partner Gbar_21 differentiates z2 instead.
            let (col, row) = if swapped {
                (obs_vec(t.s_src), src_vec(t.s_obs))
            } else {
                (obs_vec(t.s_obs), src_vec(t.s_src))
            };
            for i in 0..3 {
                for j in 0..3 {
                    out[i][j] += coef * col[i] * row[j];
                }
            }
        }
        out
    }
}

/// Scalar gap-field kernel `g(z1, z2)`.
pub fn scalar_g(
    cfg: &ShearConfig,
    pt: &SpectralPoint,
    z1: f64,
    z2: f64,
    region: SourceRegion,
) -> Result<C64, GreensError> {
    Ok(kernel(cfg, pt, z1, z2, region)?.scalar(z1, z2))
}

/// Scalar and dyadic amplitudes `g`, `Gbar_12`.
pub fn dyadic_g(
    cfg: &ShearConfig,
    pt: &SpectralPoint,
    z1: f64,
    z2: f64,
    region: SourceRegion,
) -> Result<GreensEval, GreensError> {
    let kern = kernel(cfg, pt, z1, z2, region)?;
    Ok(GreensEval {
        g: kern.scalar(z1, z2),
        dyad: kern.dyad(pt, z1, z2, false),
        source_region: region,
        z1,
        z2,
    })
}

/// The swapped-argument dyad `Gbar_21` (observation at `z2`, source at `z1`)
/// of the same physical configuration, built from the same term list via the
/// eps-weighted symmetry of the layered Poisson kernel.
pub fn dyadic_g_swapped(
    cfg: &ShearConfig,
    pt: &SpectralPoint,
    z1: f64,
    z2: f64,
    region: SourceRegion,
) -> Result<[[C64; 3]; 3], GreensError> {
    let kern = kernel(cfg, pt, z1, z2, region)?;
    Ok(kern.dyad(pt, z1, z2, true))
}

/// The reciprocal-dual configuration: all velocities reversed (reachable by
/// a 180-degree rotation about z).
pub fn rotation_dual(cfg: &ShearConfig) -> ShearConfig {
    cfg.velocity_flipped()
}

fn dyad_max_norm(m: &[[C64; 3]; 3]) -> f64 {
    m.iter().flatten().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Relative residual of the rotation identity
/// `*G_12(k) = P G_12(-k) P`, `P = diag(-1, -1, 1)`, checked elementwise;
/// errors above `tol` are reported as violations.
pub fn check_rotation_identity(
    cfg: &ShearConfig,
    pt: &SpectralPoint,
    z1: f64,
    z2: f64,
    region: SourceRegion,
    tol: f64,
) -> Result<f64, GreensError> {
    let dual = rotation_dual(cfg);
    let lhs = dyadic_g(&dual, pt, z1, z2, region)?.dyad;
    let mirrored = SpectralPoint::new(pt.omega, -pt.kx, -pt.ky);
    let rhs = dyadic_g(cfg, &mirrored, z1, z2, region)?.dyad;
    let p = [-1.0, -1.0, 1.0];
    let mut worst = 0.0f64;
    let scale = dyad_max_norm(&lhs).max(dyad_max_norm(&rhs));
    for i in 0..3 {
        for j in 0..3 {
            let expect = p[i] * rhs[i][j] * p[j];
            worst = worst.max((lhs[i][j] - expect).norm());
        }
    }
    let residual = if scale > 0.0 { worst / scale } else { worst };
    if residual > tol {
        return Err(GreensError::IdentityViolation { name: "rotation", residual });
    }
    Ok(residual)
}

/// Relative residual of the reciprocity identity
/// `G_12(k; v) = [*G_21(-k; -v)]^T` (source and observation interchanged in
/// the velocity-flipped system at the mirrored wavevector).
pub fn check_reciprocity(
    cfg: &ShearConfig,
    pt: &SpectralPoint,
    z1: f64,
    z2: f64,
    region: SourceRegion,
    tol: f64,
) -> Result<f64, GreensError> {
    let lhs = dyadic_g(cfg, pt, z1, z2, region)?.dyad;
    let dual = rotation_dual(cfg);
    let mirrored = SpectralPoint::new(pt.omega, -pt.kx, -pt.ky);
    let swapped = dyadic_g_swapped(&dual, &mirrored, z1, z2, region)?;
    let mut worst = 0.0f64;
    let scale = dyad_max_norm(&lhs);
    for i in 0..3 {
        for j in 0..3 {
            worst = worst.max((lhs[i][j] - swapped[j][i]).norm());
        }
    }
    let residual = if scale > 0.0 { worst / scale } else { worst };
    if residual > tol {
        return Err(GreensError::IdentityViolation { name: "reciprocity", residual });
    }
    Ok(residual)
}

/// Residual of the null-friction combination
/// `|u_x . (Gbar_12 + Gbar_21^T) u_z|` relative to the dyad magnitude. The
/// rotation and reciprocity identities force it to vanish; the symbolic
/// assembly keeps it at rounding level.
pub fn check_null_friction(
    cfg: &ShearConfig,
    pt: &SpectralPoint,
    z1: f64,
    z2: f64,
    region: SourceRegion,
    tol: f64,
) -> Result<f64, GreensError> {
    let g12 = dyadic_g(cfg, pt, z1, z2, region)?.dyad;
    let g21 = dyadic_g_swapped(cfg, pt, z1, z2, region)?;
    let combo = g12[0][2] + g21[2][0];
    let scale = dyad_max_norm(&g12).max(dyad_max_norm(&g21));
    let residual = if scale > 0.0 { combo.norm() / scale } else { combo.norm() };
    if residual > tol {
        return Err(GreensError::IdentityViolation { name: "null-friction", residual });
    }
    Ok(residual)
}

/// The naive fluctuation-dissipation kernel weight
/// `Im(eps_3) |Gbar_13^dagger u|^2` for a source point `z3` inside a slab
/// and a unit vector `u`: negative wherever the slab has gain, which is the
/// inconsistency of the unmodified relation.
pub fn naive_kernel_sign(
    cfg: &ShearConfig,
    pt: &SpectralPoint,
    z1: f64,
    z3: f64,
    u: [f64; 3],
) -> Result<f64, GreensError> {
    let (region, side) = if z3 > cfg.z_plus {
        (SourceRegion::Upper, Side::Upper)
    } else if z3 < cfg.z_minus {
        (SourceRegion::Lower, Side::Lower)
    } else {
        return Err(GreensError::Layout("z3 must lie inside a slab"));
    };
    let eval = dyadic_g(cfg, pt, z1, z3, region)?;
    let eps3 = slab_eps(cfg, side, pt)?;
    // (G^dagger u)_j = sum_i conj(G_ij) u_i
    let mut norm_sq = 0.0;
    for j in 0..3 {
        let mut acc = C64::default();
        for i in 0..3 {
            acc += eval.dyad[i][j].conj() * u[i];
        }
        norm_sq += acc.norm_sqr();
    }
    Ok(eps3.im * norm_sq)
}
