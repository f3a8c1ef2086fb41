//! Drude response, Doppler-shifted slab permittivities and gain predicates.
//!
//! The slabs are described in their rest frames by the Drude model
//! `eps_D(w) = 1 - 1/(w^2 + i w gamma)` (reduced units, `omega_p = 1`).
//! A slab moving at velocity `v_s` along x responds in the lab frame with
//! the Doppler-shifted permittivity `eps_D(w - kx v_s)`, which can have
//! `Im eps < 0` for positive frequencies: the moving medium then amplifies
//! waves at the expense of its kinetic energy.

use crate::C64;
use core::fmt;

/// Distance to a Drude pole (in the complex frequency plane) below which
/// evaluations are refused instead of returning an overflowing value.
pub const POLE_PROXIMITY: f64 = 1e-12;

/// Which slab a quantity refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Slab filling `z > z_plus`.
    Upper,
    /// Slab filling `z < z_minus`.
    Lower,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MaterialError {
    /// Evaluation within [`POLE_PROXIMITY`] of a Drude pole (`w = 0` or
    /// `w = -i gamma`).
    PoleProximity { omega: C64, gamma: f64 },
    /// Parameter outside its documented domain.
    InvalidParameter(&'static str),
}

impl fmt::Display for MaterialError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MaterialError::PoleProximity { omega, gamma } => write!(
                f,
                "frequency {omega} is within {POLE_PROXIMITY:e} of a Drude pole (gamma = {gamma})"
            ),
            MaterialError::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
        }
    }
}

/// Drude damping constant; the plasma frequency is fixed at 1 by the
/// reduced-unit convention and is not stored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrudeParams {
    pub gamma: f64,
}

impl DrudeParams {
    pub fn new(gamma: f64) -> Result<Self, MaterialError> {
        if !(gamma >= 0.0) || !gamma.is_finite() {
            return Err(MaterialError::InvalidParameter("gamma must be >= 0 and finite"));
        }
        Ok(Self { gamma })
    }
}

/// Full physical configuration: damping, per-slab velocities and surface
/// positions (reduced units).
///
/// The paper's symmetric setup is `v_upper = -v/2`, `v_lower = +v/2` with
/// surfaces at `z = -/+ L/2`; general per-slab velocities are kept so the
/// one-slab limit and the Kelvin-Helmholtz correspondence fit the same type.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShearConfig {
    pub drude: DrudeParams,
    /// x-velocity of the upper slab (units of c).
    pub v_upper: f64,
    /// x-velocity of the lower slab (units of c).
    pub v_lower: f64,
    /// Lower surface position (units of 1/k_p).
    pub z_minus: f64,
    /// Upper surface position (units of 1/k_p).
    pub z_plus: f64,
}

impl ShearConfig {
    pub fn new(
        drude: DrudeParams,
        v_upper: f64,
        v_lower: f64,
        z_minus: f64,
        z_plus: f64,
    ) -> Result<Self, MaterialError> {
        if !(z_plus > z_minus) {
            return Err(MaterialError::InvalidParameter("z_plus must exceed z_minus"));
        }
        if v_upper.abs() >= 1.0 || v_lower.abs() >= 1.0 {
            return Err(MaterialError::InvalidParameter("slab speeds must be < c"));
        }
        Ok(Self { drude, v_upper, v_lower, z_minus, z_plus })
    }

    /// Symmetric setup: upper slab at `-v/2`, lower at `+v/2`, gap `L`
    /// centred on `z = 0`.
    pub fn symmetric(gamma: f64, v: f64, l: f64) -> Result<Self, MaterialError> {
        if !(l > 0.0) {
            return Err(MaterialError::InvalidParameter("gap L must be > 0"));
        }
        Self::new(DrudeParams::new(gamma)?, -0.5 * v, 0.5 * v, -0.5 * l, 0.5 * l)
    }

    /// One-slab limit: upper slab at rest, lower slab at `+v`.
    pub fn lower_only(gamma: f64, v: f64, l: f64) -> Result<Self, MaterialError> {
        if !(l > 0.0) {
            return Err(MaterialError::InvalidParameter("gap L must be > 0"));
        }
        Self::new(DrudeParams::new(gamma)?, 0.0, v, -0.5 * l, 0.5 * l)
    }

    /// Gap width `L = z_plus - z_minus`.
    pub fn gap(&self) -> f64 {
        self.z_plus - self.z_minus
    }

    pub fn velocity(&self, side: Side) -> f64 {
        match side {
            Side::Upper => self.v_upper,
            Side::Lower => self.v_lower,
        }
    }

    /// Shear `v_lower - v_upper` (equals `v` for the symmetric setup).
    pub fn relative_velocity(&self) -> f64 {
        self.v_lower - self.v_upper
    }

    /// The reciprocal-dual configuration: all velocities reversed.
    pub fn velocity_flipped(&self) -> Self {
        Self { v_upper: -self.v_upper, v_lower: -self.v_lower, ..*self }
    }
}

/// Spectral evaluation coordinate. `omega` is real for force integrands and
/// complex for root searches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPoint {
    pub omega: C64,
    pub kx: f64,
    pub ky: f64,
}

impl SpectralPoint {
    pub fn new(omega: C64, kx: f64, ky: f64) -> Self {
        Self { omega, kx, ky }
    }

    pub fn real(omega: f64, kx: f64, ky: f64) -> Self {
        Self { omega: C64::new(omega, 0.0), kx, ky }
    }

    /// Transverse wavenumber magnitude `|k| = sqrt(kx^2 + ky^2)`.
    pub fn k_norm(&self) -> f64 {
        libm::hypot(self.kx, self.ky)
    }
}

/// Drude permittivity `eps_D(w) = 1 - 1/(w^2 + i w gamma)` (reduced units).
///
/// Simple poles sit at `w = 0` and `w = -i gamma`; evaluations closer than
/// [`POLE_PROXIMITY`] to either are refused. For real `w > 0` and
/// `gamma > 0` the imaginary part is positive (lossy).
pub fn drude_eps(p: DrudeParams, omega: C64) -> Result<C64, MaterialError> {
    let pole2 = C64::new(0.0, -p.gamma);
    if omega.norm() < POLE_PROXIMITY || (omega - pole2).norm() < POLE_PROXIMITY {
        return Err(MaterialError::PoleProximity { omega, gamma: p.gamma });
    }
    let d = omega * (omega + C64::new(0.0, p.gamma));
    Ok(C64::new(1.0, 0.0) - d.finv())
}

/// Lab-frame permittivity of one slab at a spectral point:
/// `eps_D(w - kx v_side)`. With the symmetric velocities this is
/// `eps_D(w +/- kx v/2)` for Upper/Lower.
pub fn slab_eps(cfg: &ShearConfig, side: Side, pt: &SpectralPoint) -> Result<C64, MaterialError> {
    let shifted = pt.omega - pt.kx * cfg.velocity(side);
    drude_eps(cfg.drude, shifted)
}

/// True iff the slab behaves as a gain medium at `pt` (`Im eps < 0`).
///
/// Expects real `w > 0`. Equivalent to the closed-form window
/// `0 < w < kx v_side` (for the symmetric setup: `0 < w < |kx| v/2` with
/// `kx < 0` for Upper, `kx > 0` for Lower); the sign of `Im eps_D` at a real
/// argument `x` is the sign of `x` whenever `gamma > 0`.
pub fn is_gain(cfg: &ShearConfig, side: Side, pt: &SpectralPoint) -> bool {
    let w = pt.omega.re;
    w > 0.0 && cfg.drude.gamma > 0.0 && w - pt.kx * cfg.velocity(side) < 0.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::omega_sp;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn eps_vanishes_at_plasma_frequency() {
        let p = DrudeParams::new(0.0).unwrap();
        let e = drude_eps(p, c(1.0, 0.0)).unwrap();
        assert!(e.norm() < 1e-15, "eps(1) = {e}");
    }

    #[test]
    fn eps_is_minus_one_at_surface_plasmon_frequency() {
        let p = DrudeParams::new(1e-9).unwrap();
        let e = drude_eps(p, c(omega_sp(), 0.0)).unwrap();
        assert!((e - c(-1.0, 0.0)).norm() < 1e-6, "eps(omega_sp) = {e}");
    }

    #[test]
    fn conjugation_symmetry_at_sample_point() {
        let p = DrudeParams::new(0.1).unwrap();
        let w = c(0.5, 0.0);
        let lhs = drude_eps(p, -w.conj()).unwrap();
        let rhs = drude_eps(p, w).unwrap().conj();
        assert!((lhs - rhs).norm() < 1e-15);
    }

    #[test]
    fn pole_guard_trips_at_both_poles() {
        let p = DrudeParams::new(0.2).unwrap();
        assert!(matches!(
            drude_eps(p, c(0.0, 0.0)),
            Err(MaterialError::PoleProximity { .. })
        ));
        assert!(matches!(
            drude_eps(p, c(0.0, -0.2)),
            Err(MaterialError::PoleProximity { .. })
        ));
        assert!(drude_eps(p, c(1e-9, 0.0)).is_ok());
    }

    #[test]
    fn static_limit_reduces_to_drude() {
        let cfg = ShearConfig::symmetric(0.1, 0.0, 0.5).unwrap();
        let pt = SpectralPoint::real(0.7, 3.0, -1.0);
        let eu = slab_eps(&cfg, Side::Upper, &pt).unwrap();
        let el = slab_eps(&cfg, Side::Lower, &pt).unwrap();
        let e0 = drude_eps(cfg.drude, pt.omega).unwrap();
        assert_eq!(eu, e0);
        assert_eq!(el, e0);
    }

    #[test]
    fn doppler_shift_into_gain_window() {
        // Upper slab, w = 0.01, kx = -1, v = 0.1: shift lands at -0.04 < 0.
        let cfg = ShearConfig::symmetric(0.1, 0.1, 0.1).unwrap();
        let pt = SpectralPoint::real(0.01, -1.0, 0.0);
        let e = slab_eps(&cfg, Side::Upper, &pt).unwrap();
        assert!(e.im < 0.0, "Im eps = {}", e.im);
        assert!(is_gain(&cfg, Side::Upper, &pt));
    }

    #[test]
    fn gain_window_edges() {
        let cfg = ShearConfig::symmetric(0.1, 0.1, 0.1).unwrap();
        // |kx| v / 2 = 0.05
        assert!(is_gain(&cfg, Side::Upper, &SpectralPoint::real(0.04, -1.0, 0.0)));
        assert!(!is_gain(&cfg, Side::Upper, &SpectralPoint::real(0.06, -1.0, 0.0)));
        assert!(!is_gain(&cfg, Side::Upper, &SpectralPoint::real(0.04, 1.0, 0.0)));
        assert!(is_gain(&cfg, Side::Lower, &SpectralPoint::real(0.04, 1.0, 0.0)));
    }

    #[test]
    fn no_gain_at_rest() {
        let cfg = ShearConfig::symmetric(0.3, 0.0, 0.2).unwrap();
        for &w in &[1e-3, 0.1, 0.7, 2.0] {
            for &kx in &[-5.0, -0.3, 0.3, 5.0] {
                let pt = SpectralPoint::real(w, kx, 0.0);
                assert!(!is_gain(&cfg, Side::Upper, &pt));
                assert!(!is_gain(&cfg, Side::Lower, &pt));
                assert!(slab_eps(&cfg, Side::Upper, &pt).unwrap().im > 0.0);
            }
        }
    }

    #[test]
    fn lower_mirrors_upper_under_kx_flip() {
        let cfg = ShearConfig::symmetric(0.17, 0.23, 0.4).unwrap();
        for i in 0..50 {
            let w = 0.01 + 0.04 * i as f64;
            let kx = -3.0 + 0.13 * i as f64;
            let a = slab_eps(&cfg, Side::Lower, &SpectralPoint::real(w, kx, 0.0)).unwrap();
            let b = slab_eps(&cfg, Side::Upper, &SpectralPoint::real(w, -kx, 0.0)).unwrap();
            assert!((a - b).norm() < 1e-14 * (1.0 + a.norm()));
        }
    }

    proptest! {
        #[test]
        fn conjugation_symmetry(re in -4.0f64..4.0, im in -2.0f64..2.0, gamma in 0.0f64..1.0) {
            let p = DrudeParams::new(gamma).unwrap();
            let w = c(re, im);
            if let (Ok(lhs), Ok(rhs)) = (drude_eps(p, -w.conj()), drude_eps(p, w)) {
                prop_assert!((lhs - rhs.conj()).norm() < 1e-12 * (1.0 + rhs.norm()));
            }
        }

        #[test]
        fn passivity_at_rest(w in 1e-3f64..5.0, gamma in 1e-6f64..1.0) {
            let p = DrudeParams::new(gamma).unwrap();
            let e = drude_eps(p, c(w, 0.0)).unwrap();
            prop_assert!(e.im > 0.0);
        }

        #[test]
        fn gain_window_equivalence(
            w in 1e-4f64..2.0,
            kx in -30.0f64..30.0,
            v in 0.0f64..0.9,
            gamma in 1e-6f64..1.0,
        ) {
            let cfg = ShearConfig::symmetric(gamma, v, 0.1).unwrap();
            for side in [Side::Upper, Side::Lower] {
                let pt = SpectralPoint::real(w, kx, 0.0);
                let analytic = match side {
                    Side::Upper => kx < 0.0 && w < kx.abs() * v / 2.0,
                    Side::Lower => kx > 0.0 && w < kx.abs() * v / 2.0,
                };
                prop_assert_eq!(is_gain(&cfg, side, &pt), analytic);
                if let Ok(e) = slab_eps(&cfg, side, &pt) {
                    prop_assert_eq!(e.im < 0.0, analytic);
                }
            }
        }

        #[test]
        fn high_frequency_limit(w in 10.0f64..1e4, gamma in 0.0f64..1.0) {
            let p = DrudeParams::new(gamma).unwrap();
            let e = drude_eps(p, c(w, 0.0)).unwrap();
            prop_assert!((e - c(1.0, 0.0)).norm() <= 2.0 / (w * w));
        }
    }
}
