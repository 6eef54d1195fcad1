//! Chordal metric on the Riemann sphere.

use num_complex::Complex64;

/// A point of the extended plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpherePoint {
    Finite(Complex64),
    Infinity,
}

impl From<Complex64> for SpherePoint {
    fn from(z: Complex64) -> Self {
        SpherePoint::Finite(z)
    }
}

/// `2|z - w| / sqrt((1 + |z|²)(1 + |w|²))`, with `2 / sqrt(1 + |z|²)` against
/// infinity. Always in `[0, 2]`.
pub fn chordal_distance(z: SpherePoint, w: SpherePoint) -> f64 {
    match (z, w) {
        (SpherePoint::Infinity, SpherePoint::Infinity) => 0.0,
        (SpherePoint::Finite(z), SpherePoint::Infinity)
        | (SpherePoint::Infinity, SpherePoint::Finite(z)) => 2.0 / (1.0 + z.norm_sqr()).sqrt(),
        (SpherePoint::Finite(z), SpherePoint::Finite(w)) => {
            let d = 2.0 * (z - w).norm() / ((1.0 + z.norm_sqr()).sqrt() * (1.0 + w.norm_sqr()).sqrt());
            d.min(2.0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fin(re: f64, im: f64) -> SpherePoint {
        SpherePoint::Finite(Complex64::new(re, im))
    }

    #[test]
    fn examples() {
        assert_eq!(chordal_distance(fin(0.3, -2.0), fin(0.3, -2.0)), 0.0);
        assert_eq!(chordal_distance(fin(0.0, 0.0), SpherePoint::Infinity), 2.0);
        assert!((chordal_distance(fin(1.0, 0.0), fin(-1.0, 0.0)) - 2.0).abs() < 1e-15);
    }

    fn point() -> impl Strategy<Value = SpherePoint> {
        prop_oneof![
            1 => Just(SpherePoint::Infinity),
            20 => (-1e3..1e3f64, -1e3..1e3f64).prop_map(|(a, b)| fin(a, b)),
            20 => (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b)| fin(a, b)),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn metric_axioms(a in point(), b in point(), c in point()) {
            let ab = chordal_distance(a, b);
            prop_assert!((0.0..=2.0).contains(&ab));
            prop_assert_eq!(ab, chordal_distance(b, a));
            let ac = chordal_distance(a, c);
            let cb = chordal_distance(c, b);
            prop_assert!(ab <= ac + cb + 1e-12);
        }
    }
}
