use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Half-plane strip unions that contain the escaping sets of the two
/// exponential families `e^{-z+γ}+c` and `e^{z+μ}+d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StripFamily {
    /// `Re z < 0`, `(4k-3)π/2 < Im z < (4k-1)π/2`.
    First,
    /// `Re z > 0`, `(4k-1)π/2 < Im z < (4k+1)π/2`.
    Second,
}

/// Whether `z` lies in the family's strip for some `|k| ≤ k_range`.
pub fn strip_membership(z: Complex64, family: StripFamily, k_range: u32) -> bool {
    let (half_plane, offset) = match family {
        StripFamily::First => (z.re < 0.0, -3.0),
        StripFamily::Second => (z.re > 0.0, -1.0),
    };
    if !half_plane {
        return false;
    }
    let k_range = k_range as i64;
    // t in (4k + offset, 4k + offset + 2) in units of π/2
    let t = z.im / FRAC_PI_2;
    let k = ((t - offset) / 4.0).floor() as i64;
    if k.abs() > k_range {
        return false;
    }
    let lo = 4.0 * k as f64 + offset;
    t > lo && t < lo + 2.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn examples() {
        assert!(strip_membership(c(-1.0, PI), StripFamily::First, 1));
        assert!(!strip_membership(c(1.0, PI), StripFamily::First, 1));
        assert!(strip_membership(c(1.0, 0.0), StripFamily::Second, 1));
    }

    #[test]
    fn strip_edges_are_open() {
        assert!(!strip_membership(c(-1.0, FRAC_PI_2), StripFamily::First, 3));
        assert!(!strip_membership(c(1.0, FRAC_PI_2), StripFamily::Second, 3));
        assert!(strip_membership(c(1.0, -1.4), StripFamily::Second, 0));
        assert!(strip_membership(c(-1.0, -PI), StripFamily::First, 0));
        // k = 2 strip of the first family, excluded at k_range 1
        assert!(strip_membership(c(-1.0, 3.0 * PI), StripFamily::First, 2));
        assert!(!strip_membership(c(-1.0, 3.0 * PI), StripFamily::First, 1));
    }

    #[test]
    fn brute_force_agrees() {
        // oracle: loop over every k in range
        let brute = |z: Complex64, fam: StripFamily, kr: i64| {
            (-kr..=kr).any(|k| {
                let k = k as f64;
                match fam {
                    StripFamily::First => {
                        z.re < 0.0 && (4.0 * k - 3.0) * FRAC_PI_2 < z.im && z.im < (4.0 * k - 1.0) * FRAC_PI_2
                    }
                    StripFamily::Second => {
                        z.re > 0.0 && (4.0 * k - 1.0) * FRAC_PI_2 < z.im && z.im < (4.0 * k + 1.0) * FRAC_PI_2
                    }
                }
            })
        };
        for i in 0..4000 {
            let z = c(((i * 37) % 200) as f64 / 10.0 - 10.0, ((i * 53) % 401) as f64 / 10.0 - 20.0);
            for fam in [StripFamily::First, StripFamily::Second] {
                for kr in [0u32, 1, 3] {
                    assert_eq!(strip_membership(z, fam, kr), brute(z, fam, kr as i64), "{z} {fam:?} {kr}");
                }
            }
        }
    }
}
