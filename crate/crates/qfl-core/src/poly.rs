//! All-roots solver for complex polynomials (Aberth-Ehrlich iteration).
//!
//! The simultaneous iteration converges to all roots at once from a circle
//! of starting points; a couple of Newton steps per root sharpen the result
//! afterwards. Coefficients are ascending: `p(z) = c0 + c1 z + ... + cn z^n`.

use crate::C64;
use alloc::vec::Vec;
use core::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum PolyError {
    ZeroLeadingCoefficient,
    DidNotConverge { iterations: u32 },
}

impl fmt::Display for PolyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolyError::ZeroLeadingCoefficient => write!(f, "leading coefficient is zero"),
            PolyError::DidNotConverge { iterations } => {
                write!(f, "root iteration did not converge in {iterations} iterations")
            }
        }
    }
}

fn horner(coeffs: &[C64], z: C64) -> C64 {
    let mut acc = C64::default();
    for &c in coeffs.iter().rev() {
        acc = acc * z + c;
    }
    acc
}

fn horner_deriv(coeffs: &[C64], z: C64) -> C64 {
    let mut acc = C64::default();
    for (i, &c) in coeffs.iter().enumerate().skip(1).rev() {
        acc = acc * z + c * i as f64;
    }
    acc
}

/// A few Newton steps on the polynomial itself.
pub fn newton_polish(coeffs: &[C64], mut z: C64, steps: u32) -> C64 {
    for _ in 0..steps {
        let d = horner_deriv(coeffs, z);
        if d.norm() == 0.0 {
            break;
        }
        let step = horner(coeffs, z) / d;
        z -= step;
        if step.norm() < 1e-16 * (1.0 + z.norm()) {
            break;
        }
    }
    z
}

/// All `n` roots of an ascending-coefficient polynomial of degree `n`.
///
/// Iterates until the largest Aberth correction drops below
/// `tol * (1 + |z|)`, then applies two Newton polish steps per root.
pub fn all_roots(coeffs: &[C64], max_iter: u32, tol: f64) -> Result<Vec<C64>, PolyError> {
    let n = coeffs.len().saturating_sub(1);
    let lead = *coeffs.last().ok_or(PolyError::ZeroLeadingCoefficient)?;
    if lead.norm() == 0.0 {
        return Err(PolyError::ZeroLeadingCoefficient);
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    // normalise to a monic polynomial for stable evaluation
    let monic: Vec<C64> = coeffs.iter().map(|&c| c / lead).collect();
    if n == 1 {
        return Ok(alloc::vec![-monic[0]]);
    }

    // Cauchy bound on the root moduli
    let radius = 1.0 + monic[..n].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut z: Vec<C64> = (0..n)
        .map(|k| {
            let theta = core::f64::consts::TAU * k as f64 / n as f64 + 0.7;
            radius * C64::new(libm::cos(theta), libm::sin(theta))
        })
        .collect();

    for _ in 0..max_iter {
        let mut worst = 0.0f64;
        for k in 0..n {
            let zk = z[k];
            let d = horner_deriv(&monic, zk);
            let p = horner(&monic, zk);
            // Newton ratio; fall back to a nudge at a critical point
            let w = if d.norm() > 0.0 {
                p / d
            } else {
                z[k] += C64::new(1e-8 * (1.0 + zk.norm()), 1e-8);
                worst = f64::INFINITY;
                continue;
            };
            let mut sum = C64::default();
            for (j, &zj) in z.iter().enumerate() {
                if j != k {
                    let diff = zk - zj;
                    if diff.norm() == 0.0 {
                        sum += C64::new(1e12, 0.0);
                    } else {
                        sum += diff.finv();
                    }
                }
            }
            let denom = C64::new(1.0, 0.0) - w * sum;
            let corr = if denom.norm() > 0.0 { w / denom } else { w };
            z[k] = zk - corr;
            worst = worst.max(corr.norm() / (1.0 + z[k].norm()));
        }
        if worst < tol {
            for zk in z.iter_mut() {
                *zk = newton_polish(&monic, *zk, 2);
            }
            return Ok(z);
        }
    }
    Err(PolyError::DidNotConverge { iterations: max_iter })
}
