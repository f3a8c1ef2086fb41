//! Quasi-static surface coefficients, the characteristic equation and its
//! quartic polynomial form, and the analytic stability estimates.
//!
//! The coupled surface modes are the zeros of `D(w, k) = 1 - r_+ r_-`, where
//! `r_±` are the quasi-static reflection coefficients of the two surfaces
//! with the propagation factor `exp(-/+ 2|k| z_±)` absorbed. Clearing the
//! Drude denominators turns `D = 0` into a quartic in `w`, which is the
//! canonical root-finding object: all-roots polynomial solvers are complete,
//! while iterative searches on `D` can miss roots. The rational `D` is kept
//! for residual polishing and force integrands.

use crate::material::{slab_eps, MaterialError, ShearConfig, Side, SpectralPoint};
use crate::{omega_sp, omega_sp_sq, C64};
use core::fmt;

/// `|1 + eps|` below which the surface response is treated as an exact
/// surface-plasmon resonance and refused.
pub const RESONANCE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum ScatteringError {
    Material(MaterialError),
    /// `|1 + eps_±|` fell below [`RESONANCE_FLOOR`]; cannot form r, t.
    SurfaceResonance { side: Side, eps: C64 },
    /// Argument outside the documented domain.
    Domain(&'static str),
}

impl fmt::Display for ScatteringError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScatteringError::Material(e) => write!(f, "{e}"),
            ScatteringError::SurfaceResonance { side, eps } => {
                write!(f, "surface-plasmon resonance on {side:?} surface (eps = {eps})")
            }
            ScatteringError::Domain(what) => write!(f, "domain error: {what}"),
        }
    }
}

impl From<MaterialError> for ScatteringError {
    fn from(e: MaterialError) -> Self {
        ScatteringError::Material(e)
    }
}

/// Reflection/transmission pair for both surfaces at one spectral point.
///
/// `r_±` include the propagation factor `exp(-/+ 2|k| z_±)`; `t_±` carry no
/// propagation factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceCoefficients {
    pub r_plus: C64,
    pub r_minus: C64,
    pub t_plus: C64,
    pub t_minus: C64,
}

/// Bare quasi-static reflection amplitude `(1 - eps) / (1 + eps)`.
pub fn fresnel_rho(eps: C64) -> C64 {
    (C64::new(1.0, 0.0) - eps) / (C64::new(1.0, 0.0) + eps)
}

/// Quasi-static transmission amplitude `2 eps / (1 + eps)`.
pub fn fresnel_t(eps: C64) -> C64 {
    2.0 * eps / (C64::new(1.0, 0.0) + eps)
}

/// Surface coefficients at a spectral point:
/// `r_± = (1 - eps_±)/(1 + eps_±) exp(-/+ 2|k| z_±)`,
/// `t_± = 2 eps_±/(1 + eps_±)`.
pub fn surface_coeffs(
    cfg: &ShearConfig,
    pt: &SpectralPoint,
) -> Result<SurfaceCoefficients, ScatteringError> {
    let k = pt.k_norm();
    let mut rt = [C64::default(); 4];
    for (i, side) in [Side::Upper, Side::Lower].into_iter().enumerate() {
        let eps = slab_eps(cfg, side, pt)?;
        if (C64::new(1.0, 0.0) + eps).norm() < RESONANCE_FLOOR {
            return Err(ScatteringError::SurfaceResonance { side, eps });
        }
        let z = match side {
            Side::Upper => cfg.z_plus,
            Side::Lower => cfg.z_minus,
        };
        let sign = match side {
            Side::Upper => -1.0,
            Side::Lower => 1.0,
        };
        rt[2 * i] = fresnel_rho(eps) * libm::exp(sign * 2.0 * k * z);
        rt[2 * i + 1] = fresnel_t(eps);
    }
    Ok(SurfaceCoefficients { r_plus: rt[0], t_plus: rt[1], r_minus: rt[2], t_minus: rt[3] })
}

/// Characteristic value `D(w, k) = 1 - r_+ r_-`; `D = 0` identifies the
/// poles of the coupled-surface Green's function.
pub fn characteristic_value(cfg: &ShearConfig, pt: &SpectralPoint) -> Result<C64, ScatteringError> {
    let sc = surface_coeffs(cfg, pt)?;
    Ok(C64::new(1.0, 0.0) - sc.r_plus * sc.r_minus)
}

/// Cleared-denominator form of the characteristic equation, ascending
/// coefficients `c0..c4` in `w`; the leading coefficient is fixed at 4.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuarticPoly {
    pub c: [C64; 5],
}

impl QuarticPoly {
    pub fn eval(&self, w: C64) -> C64 {
        let mut acc = self.c[4];
        for i in (0..4).rev() {
            acc = acc * w + self.c[i];
        }
        acc
    }

    pub fn derivative_eval(&self, w: C64) -> C64 {
        let mut acc = 4.0 * self.c[4];
        for i in (1..4).rev() {
            acc = acc * w + i as f64 * self.c[i];
        }
        acc
    }

    /// Largest coefficient magnitude, used to normalise residuals.
    pub fn scale(&self) -> f64 {
        self.c.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `|Q(w)| / max|c_i|`.
    pub fn residual(&self, w: C64) -> f64 {
        self.eval(w).norm() / self.scale()
    }
}

/// Doppler factor `P(w; s) = 2 (w - s)(w - s + i gamma) - 1` as ascending
/// quadratic coefficients. `P = 0` is the single-surface plasmon condition
/// `1 + eps = 0` of a slab with Doppler shift `s = kx v_slab`.
fn doppler_quadratic(gamma: f64, s: f64) -> [C64; 3] {
    [
        C64::new(2.0 * s * s - 1.0, -2.0 * gamma * s),
        C64::new(-4.0 * s, 2.0 * gamma),
        C64::new(2.0, 0.0),
    ]
}

/// Quartic form for raw parameters (no speed-limit validation); the
/// Kelvin-Helmholtz correspondence probes it at arbitrary shear.
pub fn quartic_from_params(
    gamma: f64,
    v_upper: f64,
    v_lower: f64,
    kx: f64,
    ky: f64,
    gap: f64,
) -> QuarticPoly {
    let pa = doppler_quadratic(gamma, kx * v_upper);
    let pb = doppler_quadratic(gamma, kx * v_lower);
    let mut c = [C64::default(); 5];
    for (i, a) in pa.iter().enumerate() {
        for (j, b) in pb.iter().enumerate() {
            c[i + j] += a * b;
        }
    }
    let k = libm::hypot(kx, ky);
    c[0] -= libm::exp(-2.0 * k * gap);
    QuarticPoly { c }
}

/// Quartic `Q(w) = [2 w_a (w_a + i gamma) - 1][2 w_b (w_b + i gamma) - 1]
/// - exp(-2|k|L)` with `w_a = w - kx v_upper`, `w_b = w - kx v_lower`.
///
/// Zeros of `Q` coincide with zeros of `1 - r_+ r_-`; near the Drude poles
/// the rational form is not numerically evaluable, so callers filter roots
/// with `|w_a (w_a + i gamma) w_b (w_b + i gamma)|` below their spurious
/// threshold before comparing the two.
pub fn quartic_poly(cfg: &ShearConfig, kx: f64, ky: f64) -> QuarticPoly {
    quartic_from_params(cfg.drude.gamma, cfg.v_upper, cfg.v_lower, kx, ky, cfg.gap())
}

/// Product of the Drude-pole factors `w_a (w_a + i gamma) w_b (w_b + i gamma)`
/// entering the quartic/characteristic prefactor.
pub fn drude_pole_factor(cfg: &ShearConfig, kx: f64, w: C64) -> C64 {
    let ig = C64::new(0.0, cfg.drude.gamma);
    let wa = w - kx * cfg.v_upper;
    let wb = w - kx * cfg.v_lower;
    wa * (wa + ig) * wb * (wb + ig)
}

/// Lossless (`gamma = 0`) dispersion relation of the symmetric setup:
///
/// `w_±^2 = w_sp^2 + (kx v/2)^2 ± w_sp^2 sqrt(exp(-2|k|L) + (kx v/w_sp)^2)`.
///
/// Returns the principal square roots; a negative `w_-^2` yields a purely
/// imaginary `w_-` and signals the lossless instability.
pub fn lossless_dispersion(v: f64, l: f64, kx: f64, ky: f64) -> (C64, C64) {
    let k = libm::hypot(kx, ky);
    let s = 0.5 * kx * v;
    let rad = libm::exp(-2.0 * k * l) + (kx * v) * (kx * v) / omega_sp_sq();
    let base = omega_sp_sq() + s * s;
    let split = omega_sp_sq() * libm::sqrt(rad);
    let sq = |x: f64| -> C64 {
        if x >= 0.0 {
            C64::new(libm::sqrt(x), 0.0)
        } else {
            C64::new(0.0, libm::sqrt(-x))
        }
    };
    (sq(base + split), sq(base - split))
}

/// Interaction-induced growth rate `kappa(L, v) = w_sp exp(-2 w_sp L / v)`
/// of the lossless coupled system; the net temporal growth in the lossy
/// setup is estimated as `(kappa - gamma) / 2`.
pub fn growth_estimate(v: f64, l: f64) -> f64 {
    omega_sp() * libm::exp(-2.0 * omega_sp() * l / v)
}

/// Critical normalised velocity `v_cr_bar = -2 / ln(gamma_bar)` with
/// `gamma_bar = gamma / w_sp` and `v_bar = v / (w_sp L)`.
pub fn critical_velocity_estimate(gamma: f64) -> Result<f64, ScatteringError> {
    let gbar = gamma / omega_sp();
    if !(gbar > 0.0 && gbar < 1.0) {
        return Err(ScatteringError::Domain("gamma/omega_sp must lie in (0, 1)"));
    }
    Ok(-2.0 / libm::log(gbar))
}

/// Critical damping estimate `gamma_cr ~ w_sp exp(-2 / v_bar)`,
/// `v_bar = v / (w_sp L)`: the damping that cancels the estimated growth.
pub fn critical_gamma_estimate(v: f64, l: f64) -> f64 {
    growth_estimate(v, l)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::all_roots;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn fresnel_limits() {
        // eps = 1: vacuum continuation, no interface.
        assert!(fresnel_rho(c(1.0, 0.0)).norm() < 1e-15);
        assert!((fresnel_t(c(1.0, 0.0)) - c(1.0, 0.0)).norm() < 1e-15);
        // eps = 0: plasma frequency, bare r = 1 and t = 0.
        assert!((fresnel_rho(c(0.0, 0.0)) - c(1.0, 0.0)).norm() < 1e-15);
        assert!(fresnel_t(c(0.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn propagation_factor_at_plasma_frequency() {
        // eps ~ 0 at w = 1 for small gamma: r_± reduce to the propagation factors.
        let cfg = ShearConfig::symmetric(1e-9, 0.0, 0.3).unwrap();
        let pt = SpectralPoint::real(1.0, 2.0, 0.0);
        let sc = surface_coeffs(&cfg, &pt).unwrap();
        let expect = libm::exp(-2.0 * 2.0 * 0.15);
        assert!((sc.r_plus - c(expect, 0.0)).norm() < 1e-6);
        assert!((sc.r_minus - c(expect, 0.0)).norm() < 1e-6);
        assert!(sc.t_plus.norm() < 1e-6);
    }

    #[test]
    fn im_r_matches_closed_form() {
        let cfg = ShearConfig::symmetric(0.2, 0.15, 0.23).unwrap();
        for i in 0..200 {
            let pt = SpectralPoint::real(0.02 + 0.011 * i as f64, -4.0 + 0.04 * i as f64, 0.3);
            let k = pt.k_norm();
            let sc = surface_coeffs(&cfg, &pt).unwrap();
            for (side, r, z, sign) in [
                (Side::Upper, sc.r_plus, cfg.z_plus, -1.0),
                (Side::Lower, sc.r_minus, cfg.z_minus, 1.0),
            ] {
                let eps = slab_eps(&cfg, side, &pt).unwrap();
                let expect = -2.0 * eps.im / (c(1.0, 0.0) + eps).norm_sqr()
                    * libm::exp(sign * 2.0 * k * z);
                assert!(
                    (r.im - expect).abs() < 1e-12 * (1.0 + expect.abs()),
                    "side {side:?}: {} vs {expect}",
                    r.im
                );
            }
        }
    }

    #[test]
    fn decoupled_gap_gives_unit_characteristic() {
        let cfg = ShearConfig::symmetric(0.1, 0.1, 1e4).unwrap();
        let pt = SpectralPoint::real(0.4, 3.0, 0.0);
        let d = characteristic_value(&cfg, &pt).unwrap();
        assert!((d - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn static_lossless_coupled_mode_is_characteristic_zero() {
        // v = 0, gamma = 0: w = w_sp sqrt(1 + exp(-|k|L)) solves D = 0.
        let l = 0.4;
        let kx = 1.7;
        let cfg = ShearConfig::symmetric(0.0, 0.0, l).unwrap();
        let w = omega_sp() * libm::sqrt(1.0 + libm::exp(-kx * l));
        let d = characteristic_value(&cfg, &SpectralPoint::real(w, kx, 0.0)).unwrap();
        assert!(d.norm() < 1e-12, "D = {d}");
    }

    #[test]
    fn quartic_equals_characteristic_up_to_prefactor() {
        let cfg = ShearConfig::symmetric(0.21, 0.17, 0.31).unwrap();
        for i in 0..100 {
            let w = c(0.05 + 0.013 * i as f64, -0.4 + 0.008 * i as f64);
            let kx = -2.0 + 0.05 * i as f64;
            let ky = 0.2;
            let pt = SpectralPoint::new(w, kx, ky);
            let q = quartic_poly(&cfg, kx, ky);
            let d = characteristic_value(&cfg, &pt).unwrap();
            let pref = 4.0 * drude_pole_factor(&cfg, kx, w);
            assert!(
                (q.eval(w) - d * pref).norm() < 1e-11 * q.scale().max(pref.norm()),
                "mismatch at i = {i}"
            );
        }
    }

    #[test]
    fn static_quartic_factors_into_quadratics() {
        // v = 0: Q = (2w(w+ig) - 1)^2 - E, i.e. the product of
        // w^2 + i g w - w_sp^2 (1 ± e^{-|k|L}) quadratics (times 4).
        let (gamma, l, kx) = (0.23, 0.6, 1.3);
        let cfg = ShearConfig::symmetric(gamma, 0.0, l).unwrap();
        let q = quartic_poly(&cfg, kx, 0.0);
        let e = libm::exp(-kx * l);
        for sign in [1.0, -1.0] {
            let cq = omega_sp_sq() * (1.0 + sign * e);
            // roots of w^2 + i g w - cq
            let disc = c(4.0 * cq - gamma * gamma, 0.0).sqrt();
            for pm in [1.0, -1.0] {
                let w = (c(0.0, -gamma) + pm * disc) * 0.5;
                assert!(q.residual(w) < 1e-14, "residual {}", q.residual(w));
            }
        }
    }

    #[test]
    fn decoupled_lossless_roots_are_double_sp() {
        let cfg = ShearConfig::symmetric(0.0, 0.0, 500.0).unwrap();
        let q = quartic_poly(&cfg, 0.3, 0.0);
        let roots = all_roots(&q.c, 200, 1e-13).unwrap();
        for r in roots {
            assert!(
                (r.norm() - omega_sp()).abs() < 1e-6,
                "expected |w| = omega_sp, got {r}"
            );
        }
    }

    #[test]
    fn lossless_dispersion_static_limit() {
        let (l, kx) = (0.8, 0.9);
        let (wp, wm) = lossless_dispersion(0.0, l, kx, 0.0);
        let e = libm::exp(-kx * l);
        assert!((wp.re - omega_sp() * libm::sqrt(1.0 + e)).abs() < 1e-14);
        assert!((wm.re - omega_sp() * libm::sqrt(1.0 - e)).abs() < 1e-14);
        let (wp_inf, wm_inf) = lossless_dispersion(0.0, 1e6, 2.0, 0.0);
        assert!((wp_inf.re - omega_sp()).abs() < 1e-12);
        assert!((wm_inf.re - omega_sp()).abs() < 1e-12);
    }

    #[test]
    fn lossless_branches_solve_quartic() {
        let (v, l) = (0.35, 0.25);
        for i in 0..60 {
            let kx = 0.05 + 0.45 * i as f64;
            let cfg = ShearConfig::symmetric(0.0, v, l).unwrap();
            let q = quartic_poly(&cfg, kx, 0.0);
            let (wp, wm) = lossless_dispersion(v, l, kx, 0.0);
            for w in [wp, -wp, wm, -wm] {
                assert!(q.residual(w) < 1e-9, "residual {} at kx = {kx}", q.residual(w));
            }
        }
    }

    #[test]
    fn growth_estimate_value() {
        let k = growth_estimate(0.1, 0.1);
        assert!((k - 0.1719094915).abs() < 1e-9, "kappa = {k}");
    }

    #[test]
    fn critical_velocity_estimate_values() {
        // gamma_bar = e^-2 inverts to exactly 1.
        let g = omega_sp() * libm::exp(-2.0);
        assert!((critical_velocity_estimate(g).unwrap() - 1.0).abs() < 1e-14);
        let v = critical_velocity_estimate(0.18).unwrap();
        assert!((v - 1.4618).abs() < 1e-3, "v_cr_bar = {v}");
        // consistency: exp(-2 / v_cr_bar) = gamma_bar
        assert!((libm::exp(-2.0 / v) - 0.18 / omega_sp()).abs() < 1e-15);
        assert!(matches!(
            critical_velocity_estimate(0.8),
            Err(ScatteringError::Domain(_))
        ));
    }

    proptest! {
        #[test]
        fn growth_estimate_monotonicity(
            v in 0.01f64..0.9, l in 0.01f64..5.0, dv in 1e-3f64..0.05, dl in 1e-3f64..0.5,
        ) {
            prop_assert!(growth_estimate(v + dv, l) > growth_estimate(v, l));
            prop_assert!(growth_estimate(v, l + dl) < growth_estimate(v, l));
        }

        #[test]
        fn quartic_leading_coefficient_is_four(
            gamma in 0.0f64..1.0, v in 0.0f64..0.9, l in 0.01f64..5.0,
            kx in -20.0f64..20.0, ky in -20.0f64..20.0,
        ) {
            let cfg = ShearConfig::symmetric(gamma, v, l).unwrap();
            let q = quartic_poly(&cfg, kx, ky);
            prop_assert!((q.c[4] - c(4.0, 0.0)).norm() < 1e-15);
        }

        #[test]
        fn kx_mirror_of_root_set(
            gamma in 1e-3f64..0.8, v in 0.0f64..0.8, l in 0.05f64..2.0, kx in 0.05f64..20.0,
        ) {
            // roots of Q(.; -kx) are { -conj(w) : Q(w; kx) = 0 }
            let cfg = ShearConfig::symmetric(gamma, v, l).unwrap();
            let q = quartic_poly(&cfg, kx, 0.0);
            let qm = quartic_poly(&cfg, -kx, 0.0);
            let roots = all_roots(&q.c, 200, 1e-13).unwrap();
            for r in roots {
                prop_assert!(qm.residual(-r.conj()) < 1e-9);
            }
        }
    }
}
