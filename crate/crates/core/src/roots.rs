//! Simultaneous polynomial root iteration (Durand–Kerner / Weierstrass).

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Sweep cap for the simultaneous iteration.
pub const MAX_SWEEPS: usize = 500;

/// Roots closer than this are reported once.
pub const DEDUP_TOL: f64 = 1e-9;

/// Horner evaluation of `coeffs` (ascending powers).
pub fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// Value and first derivative in one Horner pass.
pub fn horner_with_derivative(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let zero = Complex64::new(0.0, 0.0);
    let mut p = zero;
    let mut dp = zero;
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Sum of |c_k| |z|^k, the natural scale of rounding error in `horner`.
fn magnitude_scale(coeffs: &[Complex64], z: Complex64) -> f64 {
    let r = z.norm();
    coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
}

/// Drops (near-)zero leading coefficients.
pub fn trim(coeffs: &[Complex64]) -> &[Complex64] {
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut end = coeffs.len();
    while end > 0 && coeffs[end - 1].norm() <= scale * 1e-15 {
        end -= 1;
    }
    &coeffs[..end]
}

/// All roots of the polynomial with ascending coefficients `coeffs`.
///
/// Leading zeros are trimmed first; a constant polynomial has no roots.
/// Starting points are roots of unity on a Fujiwara-style radius, rotated
/// off the real axis so that conjugate-symmetric inputs do not stall.
pub fn all_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let coeffs = trim(coeffs);
    if coeffs.len() <= 1 {
        return Ok(Vec::new());
    }
    let degree = coeffs.len() - 1;
    let lead = coeffs[degree];
    let monic: Vec<Complex64> = coeffs.iter().map(|&c| c / lead).collect();

    if degree == 1 {
        return Ok(vec![-monic[0]]);
    }

    let radius = (1..=degree)
        .map(|k| monic[degree - k].norm().powf(1.0 / k as f64))
        .fold(0.0, f64::max)
        .max(1e-3)
        * 2.0;
    let mut roots: Vec<Complex64> = (0..degree)
        .map(|k| Complex64::from_polar(radius, TAU * k as f64 / degree as f64 + 0.4))
        .collect();

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut max_step = 0.0f64;
        for i in 0..degree {
            let zi = roots[i];
            let mut denom = Complex64::new(1.0, 0.0);
            for (j, &zj) in roots.iter().enumerate() {
                if j != i {
                    denom *= zi - zj;
                }
            }
            if denom.norm() == 0.0 {
                // Coincident iterates: nudge apart and keep going.
                roots[i] = zi + Complex64::new(1e-8, 1e-8) * (1.0 + zi.norm());
                max_step = f64::INFINITY;
                continue;
            }
            let step = horner(&monic, zi) / denom;
            roots[i] = zi - step;
            max_step = max_step.max(step.norm() / zi.norm().max(1.0));
        }
        if !max_step.is_finite() && roots.iter().any(|r| !r.re.is_finite() || !r.im.is_finite()) {
            return Err(Error::RootFindFailure { sweeps: MAX_SWEEPS });
        }
        if max_step <= 1e-15 {
            converged = true;
            break;
        }
    }

    for r in roots.iter_mut() {
        *r = polish(&monic, *r);
    }

    let accepted = roots.iter().all(|&r| {
        let residual = horner(&monic, r).norm();
        residual.is_finite() && residual <= 1e-11 * magnitude_scale(&monic, r).max(1.0)
    });
    if !converged && !accepted {
        return Err(Error::RootFindFailure { sweeps: MAX_SWEEPS });
    }
    Ok(roots)
}

/// A few guarded Newton steps; a step is kept only if it lowers |p|.
pub fn polish(coeffs: &[Complex64], mut z: Complex64) -> Complex64 {
    let mut best = horner(coeffs, z).norm();
    for _ in 0..4 {
        if best == 0.0 {
            break;
        }
        let (p, dp) = horner_with_derivative(coeffs, z);
        if dp.norm() == 0.0 {
            break;
        }
        let next = z - p / dp;
        let r = horner(coeffs, next).norm();
        if r < best {
            z = next;
            best = r;
        } else {
            break;
        }
    }
    z
}

/// Removes points within `tol` of an earlier point, keeping first occurrences.
pub fn dedup(points: Vec<Complex64>, tol: f64) -> Vec<Complex64> {
    let mut out: Vec<Complex64> = Vec::with_capacity(points.len());
    for p in points {
        if !out.iter().any(|q| (p - *q).norm() <= tol) {
            out.push(p);
        }
    }
    out
}
