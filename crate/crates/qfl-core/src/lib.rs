//! Numerics for two Drude half-spaces in shear motion across a vacuum gap,
//! in the quasi-static regime.
//!
//! The crate covers the linear response of the moving slabs (Doppler-shifted
//! Drude permittivities and their gain windows), the characteristic equation
//! of the coupled surface modes and its quartic polynomial form, the
//! stability phase diagram (max growth rate over wavenumber, then bisection
//! on a parameter), the quasi-static scalar and dyadic Green's functions with
//! their rotation/reciprocity identities, the friction force per unit area
//! via nested adaptive quadrature, and the Kelvin-Helmholtz correspondence of
//! the low-frequency, lossless, vanishing-gap limit.
//!
//! # Reduced units
//!
//! Everything is expressed in reduced units: the plasma frequency
//! `omega_p = 1`, the speed of light `c = 1` (hence `k_p = omega_p/c = 1`)
//! and `hbar = 1`. Frequencies are in units of `omega_p`, wavenumbers in
//! `k_p`, velocities in `c`, lengths in `1/k_p`, and forces per unit area in
//! `hbar omega_p k_p^3`. The surface-plasmon frequency is the derived
//! constant `omega_sp = omega_p / sqrt(2)`.
//!
//! # Frequency convention
//!
//! Spectral amplitudes follow the transform kernel `exp(+i w t - i k.x)`, so
//! modes evolve as `exp(-i w t)`: a positive imaginary part of a natural
//! frequency means exponential growth, and a passive medium has
//! `Im eps > 0` for real `w > 0`. Formulas imported from sources using the
//! opposite kernel must be conjugated.
//!
//! The crate is `no_std` (with `alloc`); all operations are pure functions
//! and safe to evaluate concurrently.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod force;
pub mod greens;
pub mod khi;
pub mod material;
pub mod poly;
pub mod quad;
pub mod scattering;
pub mod stability;

/// Complex double used throughout.
pub type C64 = num_complex::Complex<f64>;

/// Surface-plasmon resonance frequency `omega_sp = omega_p / sqrt(2)` in
/// reduced units (the quasi-static resonance where `eps = -1`).
pub fn omega_sp() -> f64 {
    core::f64::consts::FRAC_1_SQRT_2
}

/// `omega_sp^2 = 1/2` in reduced units.
pub fn omega_sp_sq() -> f64 {
    0.5
}
