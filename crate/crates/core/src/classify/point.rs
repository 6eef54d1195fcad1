use num_complex::Complex64;

use super::{ClassifyParams, Evidence, Label, PointVerdict};
use crate::error::{Error, Result};
use crate::map::MapClass;
use crate::rng::derive_seed;
use crate::semigroup::{cyclic_summary, enumerate_words, sequence_summary, OrbitSummary, Semigroup, Word};

/// Everything a per-pixel classification needs, built once per grid.
pub(crate) struct Prepared<'a> {
    pub s: &'a Semigroup,
    pub words: Vec<Word>,
    pub p: ClassifyParams,
    /// `ln` of the effective derivative threshold.
    pub log_threshold: f64,
    /// Offsets at which every orbit is run; the first is the point itself.
    probes: Vec<Complex64>,
}

impl<'a> Prepared<'a> {
    /// `scale` is the side of the square cell a Fatou/Julia verdict stands
    /// for (a pixel). A cell stretched to unit spherical size is a blow-up,
    /// so the derivative threshold drops to `min(T, 1/scale)`, and every
    /// orbit is also run from two opposite cell corners so that fates mixed
    /// inside the cell are seen.
    pub fn new(s: &'a Semigroup, p: &ClassifyParams, scale: Option<f64>) -> Result<Self> {
        p.validate()?;
        let words = enumerate_words(s, p.max_word_len, p.word_cap)?;
        let mut threshold = p.deriv_threshold;
        let mut probes = vec![Complex64::new(0.0, 0.0)];
        if let Some(h) = scale.filter(|h| *h > 0.0 && h.is_finite()) {
            threshold = threshold.min(1.0 / h);
            let corner = Complex64::new(h / 2.0, h / 2.0);
            probes.extend([corner, -corner]);
        }
        Ok(Prepared {
            s,
            words,
            p: *p,
            log_threshold: threshold.ln(),
            probes,
        })
    }

    fn sequence_seed(&self, stream_id: u64, j: usize) -> u64 {
        derive_seed(self.p.seed, &[stream_id, j as u64])
    }

    fn word_orbit(&self, w: &Word, z: Complex64, track: bool) -> OrbitSummary {
        cyclic_summary(self.s, w.indices(), z, self.p.depth, self.p.escape_radius, track)
    }

    fn sequence_orbit(&self, z: Complex64, stream_id: u64, j: usize) -> OrbitSummary {
        sequence_summary(self.s, z, self.p.depth, self.p.escape_radius, self.sequence_seed(stream_id, j))
    }

    /// All cyclic word orbits, then all random sequences, in a fixed order.
    fn orbits(&self, z: Complex64, stream_id: u64) -> impl Iterator<Item = OrbitSummary> + '_ {
        let words = self.words.iter().map(move |w| self.word_orbit(w, z, false));
        let seqs = (0..self.p.n_sequences).map(move |j| self.sequence_orbit(z, stream_id, j));
        words.chain(seqs)
    }

    pub fn escaping_at(&self, z: Complex64, stream_id: u64) -> PointVerdict {
        let mut ev = Evidence {
            max_log_derivative: f64::NEG_INFINITY,
            ..Default::default()
        };
        for o in self.orbits(z, stream_id) {
            match Outcome::of(&o, self.p.bound_radius) {
                Outcome::Divergent => ev.divergent += 1,
                Outcome::Bounded => {
                    ev.bounded += 1;
                    return PointVerdict {
                        label: Label::NonEscaping,
                        evidence: ev,
                    };
                }
                Outcome::Slow => ev.slow += 1,
            }
        }
        let label = if ev.slow == 0 {
            Label::Escaping
        } else {
            Label::Undetermined
        };
        PointVerdict { label, evidence: ev }
    }

    pub fn fatou_julia_at(&self, z: Complex64, stream_id: u64) -> PointVerdict {
        let mut ev = Evidence {
            max_log_derivative: f64::NEG_INFINITY,
            ..Default::default()
        };
        let julia = |ev: Evidence| PointVerdict {
            label: Label::JuliaLike,
            evidence: ev,
        };
        // the same word or sequence at every probe before moving on, so a
        // fate split across the cell shows up early
        let n_words = self.words.len();
        let probe_orbits = (0..n_words + self.p.n_sequences).flat_map(|k| {
            self.probes.iter().map(move |dz| match self.words.get(k) {
                Some(w) => self.word_orbit(w, z + dz, true),
                None => self.sequence_orbit(z + dz, stream_id, k - n_words),
            })
        });
        for o in probe_orbits {
            match Outcome::of(&o, self.p.bound_radius) {
                Outcome::Divergent => ev.divergent += 1,
                Outcome::Bounded => ev.bounded += 1,
                Outcome::Slow => ev.slow += 1,
            }
            ev.max_log_derivative = ev.max_log_derivative.max(o.max_log_spherical_derivative);
            if ev.divergent > 0 && ev.bounded > 0 {
                return julia(ev);
            }
            if ev.max_log_derivative > self.log_threshold {
                return julia(ev);
            }
        }
        let label = if ev.slow > 0 {
            Label::Undetermined
        } else {
            Label::FatouLike
        };
        PointVerdict { label, evidence: ev }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Divergent,
    Bounded,
    Slow,
}

impl Outcome {
    fn of(o: &OrbitSummary, bound_radius: f64) -> Self {
        if o.fate.is_divergent() {
            Outcome::Divergent
        } else if o.last.norm() <= bound_radius {
            Outcome::Bounded
        } else {
            Outcome::Slow
        }
    }
}

/// Escaping / NonEscaping / Undetermined for a transcendental semigroup.
///
/// Escaping iff every cyclic orbit of every word up to `max_word_len` and all
/// `n_sequences` random sequence orbits diverge; NonEscaping iff some tested
/// orbit ends bounded within `bound_radius`.
pub fn classify_escaping(s: &Semigroup, z: Complex64, p: &ClassifyParams) -> Result<PointVerdict> {
    if s.class() != MapClass::TranscendentalEntire {
        return Err(Error::WrongClass {
            expected: MapClass::TranscendentalEntire,
        });
    }
    Ok(Prepared::new(s, p, None)?.escaping_at(z, 0))
}

/// FatouLike / JuliaLike / Undetermined with the pointwise threshold `T`.
pub fn classify_fatou_julia(s: &Semigroup, z: Complex64, p: &ClassifyParams) -> Result<PointVerdict> {
    classify_fatou_julia_at_scale(s, z, p, None)
}

/// As [`classify_fatou_julia`], with the verdict standing for a disc of
/// radius `scale` around `z`.
pub fn classify_fatou_julia_at_scale(
    s: &Semigroup,
    z: Complex64,
    p: &ClassifyParams,
    scale: Option<f64>,
) -> Result<PointVerdict> {
    Ok(Prepared::new(s, p, scale)?.fatou_julia_at(z, 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::{HolomorphicMap, Sign};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn annulus() -> Semigroup {
        Semigroup::new(
            "annulus",
            vec![
                HolomorphicMap::monomial(c(1.0, 0.0), 2).unwrap(),
                HolomorphicMap::monomial(c(0.5, 0.0), 2).unwrap(),
            ],
        )
        .unwrap()
    }

    fn exp_pair() -> Semigroup {
        Semigroup::new(
            "exp-pair",
            vec![
                HolomorphicMap::exp(c(1.0, 0.0)).unwrap(),
                HolomorphicMap::exp(c(-1.0, 0.0)).unwrap(),
            ],
        )
        .unwrap()
    }

    #[test]
    fn escaping_examples() {
        let p = ClassifyParams::default();
        let e = Semigroup::cyclic("exp", HolomorphicMap::exp(c(1.0, 0.0)).unwrap()).unwrap();
        assert_eq!(classify_escaping(&e, c(1.0, 0.0), &p).unwrap().label, Label::Escaping);
        assert_eq!(classify_escaping(&exp_pair(), c(5.0, 0.0), &p).unwrap().label, Label::NonEscaping);
        assert!(matches!(
            classify_escaping(&annulus(), c(1.0, 0.0), &p),
            Err(Error::WrongClass { .. })
        ));
    }

    #[test]
    fn empty_escaping_pair_never_escapes() {
        let s = Semigroup::new(
            "kk",
            vec![
                HolomorphicMap::exp_affine(Sign::Minus, c(1.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0)).unwrap(),
                HolomorphicMap::exp_affine(Sign::Plus, c(1.0, 0.0), c(-1.0, 0.0), c(-1.0, 0.0)).unwrap(),
            ],
        )
        .unwrap();
        let p = ClassifyParams::default();
        for z in [c(0.0, 0.0), c(8.0, 0.0), c(-8.0, 3.0), c(-9.5, 4.7), c(3.0, -9.0)] {
            assert_ne!(classify_escaping(&s, z, &p).unwrap().label, Label::Escaping, "{z}");
        }
    }

    #[test]
    fn fatou_julia_examples() {
        let p = ClassifyParams::default();
        let s = annulus();
        assert_eq!(classify_fatou_julia(&s, c(0.5, 0.0), &p).unwrap().label, Label::FatouLike);
        assert_eq!(classify_fatou_julia(&s, c(1.5, 0.0), &p).unwrap().label, Label::JuliaLike);
        assert_eq!(classify_fatou_julia(&s, c(3.0, 0.0), &p).unwrap().label, Label::FatouLike);

        let sq = Semigroup::cyclic("z^2", HolomorphicMap::monomial(c(1.0, 0.0), 2).unwrap()).unwrap();
        let v = classify_fatou_julia(&sq, c(0.0, 1.0), &p).unwrap();
        assert_eq!(v.label, Label::JuliaLike);
        // oracle: chain rule along i, -1, 1, 1, ... gives |(f^n)'(i)| = 2^n
        let mut z = c(0.0, 1.0);
        let mut log_d = 0.0f64;
        let mut crossed = false;
        for _ in 0..p.depth {
            log_d += (2.0 * z).norm().ln();
            z = z * z;
            crossed |= log_d > p.deriv_threshold.ln();
        }
        assert!(crossed && z.norm() <= p.bound_radius);
        assert!(v.evidence.max_log_derivative > p.deriv_threshold.ln());
    }

    #[test]
    fn scale_lowers_threshold() {
        let p = ClassifyParams::default();
        let sq = Semigroup::cyclic("z^2", HolomorphicMap::monomial(c(1.0, 0.0), 2).unwrap()).unwrap();
        let z = c(1.001, 0.0);
        assert_eq!(classify_fatou_julia(&sq, z, &p).unwrap().label, Label::FatouLike);
        assert_eq!(
            classify_fatou_julia_at_scale(&sq, z, &p, Some(0.01)).unwrap().label,
            Label::JuliaLike
        );
    }
}
