//! Finitely generated semigroups, words and forward orbits.

use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::map::{HolomorphicMap, MapClass};
use crate::rng;

/// Default cap on the number of enumerated words.
pub const DEFAULT_WORD_CAP: usize = 1_000_000;

/// Default escape radius for both classes.
pub const DEFAULT_ESCAPE_RADIUS: f64 = 1e10;

/// `⟨f_1, …, f_k⟩`. All generators share one [`MapClass`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Semigroup {
    generators: Vec<HolomorphicMap>,
    class: MapClass,
    label: String,
}

impl Semigroup {
    pub fn new(label: impl Into<String>, generators: Vec<HolomorphicMap>) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::InvalidSemigroup("no generators".into()));
        }
        let mut class = None;
        for (i, g) in generators.iter().enumerate() {
            let c = g.validate()?;
            match class {
                None => class = Some(c),
                Some(prev) if prev != c => {
                    return Err(Error::InvalidSemigroup(format!(
                        "generator {i} is {c:?} but generator 0 is {prev:?}"
                    )))
                }
                Some(_) => {}
            }
        }
        Ok(Semigroup {
            generators,
            class: class.expect("nonempty"),
            label: label.into(),
        })
    }

    /// The cyclic semigroup `⟨f⟩`.
    pub fn cyclic(label: impl Into<String>, f: HolomorphicMap) -> Result<Self> {
        Semigroup::new(label, vec![f])
    }

    pub fn generators(&self) -> &[HolomorphicMap] {
        &self.generators
    }

    pub fn generator(&self, i: usize) -> &HolomorphicMap {
        &self.generators[i]
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn class(&self) -> MapClass {
        self.class
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `⟨f_i⟩` for each generator, labelled `<label>[i]`.
    pub fn cyclic_subsemigroups(&self) -> Vec<Semigroup> {
        self.generators
            .iter()
            .enumerate()
            .map(|(i, g)| Semigroup {
                generators: vec![g.clone()],
                class: self.class,
                label: format!("{}[{i}]", self.label),
            })
            .collect()
    }

    /// True when every generator is a polynomial (including affine maps).
    pub fn is_polynomial(&self) -> bool {
        fn poly(m: &HolomorphicMap) -> bool {
            match m {
                HolomorphicMap::Polynomial { .. } | HolomorphicMap::Affine { .. } => true,
                HolomorphicMap::Composite { chain } => chain.iter().all(poly),
                _ => false,
            }
        }
        self.generators.iter().all(poly)
    }
}

/// Generator indices `[i1, …, ik]`, read as `f_{i1} ∘ … ∘ f_{ik}`:
/// `f_{ik}` is applied to the argument first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(Vec<usize>);

impl Word {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidParams("a word needs at least one letter".into()));
        }
        Ok(Word(indices))
    }

    pub fn single(i: usize) -> Self {
        Word(vec![i])
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `self ∘ other`.
    pub fn then_after(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn check(&self, s: &Semigroup) -> Result<()> {
        match self.0.iter().find(|&&i| i >= s.len()) {
            Some(&index) => Err(Error::WordIndex {
                index,
                generators: s.len(),
            }),
            None => Ok(()),
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// `Σ_{ℓ=1}^{max_len} k^ℓ`, saturating.
pub fn word_count(generators: usize, max_len: usize) -> u128 {
    let k = generators as u128;
    let mut total: u128 = 0;
    let mut power: u128 = 1;
    for _ in 0..max_len {
        power = power.saturating_mul(k);
        total = total.saturating_add(power);
    }
    total
}

/// All words of length `1..=max_len`, shortest first, lexicographic within a
/// length.
pub fn enumerate_words(s: &Semigroup, max_len: usize, cap: usize) -> Result<Vec<Word>> {
    if max_len == 0 {
        return Err(Error::InvalidParams("max_len must be at least 1".into()));
    }
    let k = s.len();
    let count = word_count(k, max_len);
    if count > cap as u128 {
        return Err(Error::BudgetExceeded { count, cap });
    }
    let mut words = Vec::with_capacity(count as usize);
    for len in 1..=max_len {
        let mut digits = vec![0usize; len];
        'odometer: loop {
            words.push(Word(digits.clone()));
            for pos in (0..len).rev() {
                digits[pos] += 1;
                if digits[pos] < k {
                    continue 'odometer;
                }
                digits[pos] = 0;
            }
            break;
        }
    }
    Ok(words)
}

/// The word's element of `S` evaluated at `z`.
pub fn evaluate_word(s: &Semigroup, w: &Word, z: Complex64) -> Result<Complex64> {
    w.check(s)?;
    apply_word(s, w.indices(), z)
}

pub(crate) fn apply_word(s: &Semigroup, indices: &[usize], z: Complex64) -> Result<Complex64> {
    indices
        .iter()
        .rev()
        .try_fold(z, |acc, &i| s.generators[i].evaluate(acc))
}

/// Overflow in the outermost map means the value itself is beyond any
/// escape radius; only an overflow inside the chain leaves the fate open.
const ESCAPED: Complex64 = Complex64::new(f64::INFINITY, 0.0);

fn step_word(s: &Semigroup, indices: &[usize], z: Complex64) -> Result<Complex64> {
    let (outer, inner) = indices.split_first().expect("nonempty word");
    let inner_value = apply_word(s, inner, z)?;
    match s.generators[*outer].evaluate(inner_value) {
        Err(Error::Overflow) => Ok(ESCAPED),
        other => other,
    }
}

fn step_word_log_deriv(s: &Semigroup, indices: &[usize], z: Complex64) -> Result<(Complex64, f64)> {
    let (outer, inner) = indices.split_first().expect("nonempty word");
    let (inner_value, inner_log) = apply_word_log_deriv(s, inner, z)?;
    match s.generators[*outer].evaluate_with_derivative(inner_value) {
        Ok((v, d)) => Ok((v, inner_log + log_abs(d))),
        Err(Error::Overflow) => Ok((ESCAPED, f64::INFINITY)),
        Err(e) => Err(e),
    }
}

fn log_abs(d: Complex64) -> f64 {
    let sq = d.norm_sqr();
    if sq.is_normal() {
        0.5 * sq.ln()
    } else {
        d.norm().ln()
    }
}

fn step_map(m: &HolomorphicMap, z: Complex64) -> Result<Complex64> {
    match m.evaluate(z) {
        Err(Error::Overflow) => Ok(ESCAPED),
        other => other,
    }
}

/// Value and `ln |derivative|` of the word at `z`.
pub(crate) fn apply_word_log_deriv(s: &Semigroup, indices: &[usize], z: Complex64) -> Result<(Complex64, f64)> {
    let mut value = z;
    // squared modulus product, folded into the log only when it leaves the
    // comfortable range, which saves a logarithm per map
    let mut product = 1.0f64;
    let mut log_deriv = 0.0;
    for &i in indices.iter().rev() {
        let (v, d) = s.generators[i].evaluate_with_derivative(value)?;
        value = v;
        let factor = d.norm_sqr();
        if factor.is_normal() && (1e-150..=1e150).contains(&(product * factor)) {
            product *= factor;
        } else {
            log_deriv += 0.5 * product.ln() + log_abs(d);
            product = 1.0;
        }
    }
    Ok((value, log_deriv + 0.5 * product.ln()))
}

/// Discrete outcome of an orbit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Fate {
    /// `|z_t|` exceeded the escape radius at step `t`.
    DivergedAtStep(usize),
    /// Still inside the escape radius after the full depth.
    BoundedAtDepth,
    /// A value left the `f64` range; counts as divergence.
    Overflowed,
    /// A rational denominator vanished at step `t`; the orbit reached `∞`.
    PoleHit(usize),
}

impl Fate {
    pub fn is_divergent(self) -> bool {
        !matches!(self, Fate::BoundedAtDepth)
    }
}

/// Where the maps of an orbit came from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Provenance {
    Word(Word),
    Sequence { seed: u64, choices: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitRecord {
    /// `z_0 … z_T`. When the escaping value itself overflowed `f64` it is
    /// not stored, so a diverged record may end at `z_{t-1}`.
    pub points: Vec<Complex64>,
    pub fate: Fate,
    pub provenance: Provenance,
}

fn check_orbit_args(depth: usize, escape_radius: f64) -> Result<()> {
    if depth == 0 {
        return Err(Error::InvalidParams("depth must be at least 1".into()));
    }
    if escape_radius.is_nan() || escape_radius <= 0.0 {
        return Err(Error::InvalidParams("escape radius must be positive".into()));
    }
    Ok(())
}

fn fate_of(err: &Error, step: usize) -> Option<Fate> {
    match err {
        Error::Overflow => Some(Fate::Overflowed),
        Error::PoleHit => Some(Fate::PoleHit(step)),
        _ => None,
    }
}

/// Iterates the word as a single map until escape or `depth` steps.
pub fn cyclic_orbit(
    s: &Semigroup,
    w: &Word,
    z: Complex64,
    depth: usize,
    escape_radius: f64,
) -> Result<OrbitRecord> {
    w.check(s)?;
    check_orbit_args(depth, escape_radius)?;
    let (points, fate) = record(z, depth, escape_radius, |_, z| step_word(s, w.indices(), z))?;
    Ok(OrbitRecord {
        points,
        fate,
        provenance: Provenance::Word(w.clone()),
    })
}

/// Applies a uniformly chosen generator at each step. The choice stream is
/// `ChaCha8` seeded with `seed`, so the record is a pure function of its
/// arguments.
pub fn random_sequence_orbit(s: &Semigroup, z: Complex64, depth: usize, seed: u64) -> Result<OrbitRecord> {
    random_sequence_orbit_with_radius(s, z, depth, seed, DEFAULT_ESCAPE_RADIUS)
}

pub fn random_sequence_orbit_with_radius(
    s: &Semigroup,
    z: Complex64,
    depth: usize,
    seed: u64,
    escape_radius: f64,
) -> Result<OrbitRecord> {
    check_orbit_args(depth, escape_radius)?;
    let mut rng = rng::stream(seed);
    let mut choices = Vec::with_capacity(depth);
    let k = s.len();
    let (points, fate) = record(z, depth, escape_radius, |_, z| {
        let i = rng.random_range(0..k);
        choices.push(i);
        step_map(&s.generators[i], z)
    })?;
    Ok(OrbitRecord {
        points,
        fate,
        provenance: Provenance::Sequence { seed, choices },
    })
}

fn record(
    z0: Complex64,
    depth: usize,
    escape_radius: f64,
    mut step: impl FnMut(usize, Complex64) -> Result<Complex64>,
) -> Result<(Vec<Complex64>, Fate)> {
    let mut points = Vec::with_capacity(depth + 1);
    points.push(z0);
    if beyond(z0, escape_radius) {
        return Ok((points, Fate::DivergedAtStep(0)));
    }
    let mut z = z0;
    for t in 1..=depth {
        match step(t, z) {
            Ok(next) => {
                z = next;
                if next.re.is_finite() && next.im.is_finite() {
                    points.push(z);
                }
                if beyond(z, escape_radius) {
                    return Ok((points, Fate::DivergedAtStep(t)));
                }
            }
            Err(e) => match fate_of(&e, t) {
                Some(f) => return Ok((points, f)),
                None => return Err(e),
            },
        }
    }
    Ok((points, Fate::BoundedAtDepth))
}

/// Fate plus derivative evidence, without storing the trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct OrbitSummary {
    pub fate: Fate,
    pub last: Complex64,
    /// Largest `ln` of the spherical derivative of the iterates seen.
    pub max_log_spherical_derivative: f64,
}

/// `ln(1 + |z|²)` without overflow.
fn log_sphere_factor(z: Complex64) -> f64 {
    let r2 = z.norm_sqr();
    if r2 <= 1e200 {
        r2.ln_1p()
    } else {
        2.0 * z.norm().ln()
    }
}

/// `|z| > r`, on squared moduli while they are representable.
fn beyond(z: Complex64, r: f64) -> bool {
    let (z2, r2) = (z.norm_sqr(), r * r);
    if z2.is_finite() && r2.is_finite() {
        z2 > r2
    } else {
        z.norm() > r
    }
}

fn near(a: Complex64, b: Complex64) -> bool {
    (a - b).norm_sqr() <= 1e-28 * a.norm_sqr().max(1.0)
}

/// Cyclic orbit of `indices` with early exit at fixed points.
///
/// A repelling fixed point is only accepted on exact equality; the remaining
/// steps then contribute `|g'|` per step to the derivative analytically.
pub(crate) fn cyclic_summary(
    s: &Semigroup,
    indices: &[usize],
    z0: Complex64,
    depth: usize,
    escape_radius: f64,
    track_derivative: bool,
) -> OrbitSummary {
    let base = log_sphere_factor(z0);
    let mut log_deriv = 0.0;
    let mut best = f64::NEG_INFINITY;
    let mut z = z0;
    let summary = |fate, last, best| OrbitSummary {
        fate,
        last,
        max_log_spherical_derivative: best,
    };
    if beyond(z0, escape_radius) {
        return summary(Fate::DivergedAtStep(0), z0, best);
    }
    for t in 1..=depth {
        let step = if track_derivative {
            step_word_log_deriv(s, indices, z)
        } else {
            step_word(s, indices, z).map(|v| (v, 0.0))
        };
        let (next, step_log) = match step {
            Ok(x) => x,
            Err(e) => {
                let fate = fate_of(&e, t).unwrap_or(Fate::Overflowed);
                return summary(fate, z, best);
            }
        };
        log_deriv += step_log;
        if track_derivative {
            let lsd = log_deriv + base - log_sphere_factor(next);
            if lsd > best {
                best = lsd;
            }
        }
        if beyond(next, escape_radius) {
            return summary(Fate::DivergedAtStep(t), next, best);
        }
        let exact = next == z;
        if exact || near(next, z) {
            let (g_next, g_log) =
                apply_word_log_deriv(s, indices, next).unwrap_or((next, f64::INFINITY));
            let attracting = g_log < 0.0 && near(g_next, next);
            if exact || attracting {
                if track_derivative && g_log > 0.0 {
                    let remaining = (depth - t) as f64;
                    let lsd = log_deriv + remaining * g_log + base - log_sphere_factor(next);
                    best = best.max(lsd);
                }
                return summary(Fate::BoundedAtDepth, next, best);
            }
        }
        z = next;
    }
    summary(Fate::BoundedAtDepth, z, best)
}

/// Random-sequence orbit fate; exits early at a common attracting fixed
/// point of every generator.
pub(crate) fn sequence_summary(
    s: &Semigroup,
    z0: Complex64,
    depth: usize,
    escape_radius: f64,
    seed: u64,
) -> OrbitSummary {
    let mut rng = rng::stream(seed);
    let k = s.len();
    let mut z = z0;
    let summary = |fate, last| OrbitSummary {
        fate,
        last,
        max_log_spherical_derivative: f64::NEG_INFINITY,
    };
    if beyond(z0, escape_radius) {
        return summary(Fate::DivergedAtStep(0), z0);
    }
    for t in 1..=depth {
        let i = rng.random_range(0..k);
        let next = match step_map(&s.generators[i], z) {
            Ok(v) => v,
            Err(e) => return summary(fate_of(&e, t).unwrap_or(Fate::Overflowed), z),
        };
        if beyond(next, escape_radius) {
            return summary(Fate::DivergedAtStep(t), next);
        }
        if near(next, z) && common_attracting_fixed_point(s, next) {
            return summary(Fate::BoundedAtDepth, next);
        }
        z = next;
    }
    summary(Fate::BoundedAtDepth, z)
}

fn common_attracting_fixed_point(s: &Semigroup, z: Complex64) -> bool {
    s.generators.iter().all(|g| match g.evaluate_with_derivative(z) {
        Ok((v, d)) => v == z || (near(v, z) && d.norm_sqr() < 1.0),
        Err(_) => false,
    })
}
