//! Holomorphic generators: evaluation, derivatives and preimage branches.

use std::f64::consts::{PI, TAU};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roots::{self, DEDUP_TOL};

/// Denominators smaller than this count as a pole.
pub const POLE_TOL: f64 = 1e-300;

/// `exp` of a real part above this overflows `f64`.
const EXP_OVERFLOW: f64 = 709.0;

/// Rational maps live on the Riemann sphere; transcendental entire maps have
/// their only essential singularity at infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MapClass {
    Rational,
    TranscendentalEntire,
}

/// Coefficients in ascending powers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl Polynomial {
    /// A polynomial of degree ≥ 1 with nonzero leading coefficient.
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        let p = Polynomial { coeffs };
        p.check_nonconstant()?;
        Ok(p)
    }

    /// Any nonempty coefficient list; used for rational numerators/denominators.
    pub fn from_coeffs(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidMap("empty coefficient list".into()));
        }
        Ok(Polynomial { coeffs })
    }

    /// `c z^n`.
    pub fn monomial(c: Complex64, n: usize) -> Result<Self> {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n + 1];
        coeffs[n] = c;
        Polynomial::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        roots::trim(&self.coeffs).len().saturating_sub(1)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        roots::horner(&self.coeffs, z)
    }

    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        roots::horner_with_derivative(&self.coeffs, z)
    }

    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.norm() == 0.0)
    }

    fn check_finite(&self) -> Result<()> {
        if self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
            Ok(())
        } else {
            Err(Error::InvalidMap("non-finite coefficient".into()))
        }
    }

    fn check_nonconstant(&self) -> Result<()> {
        self.check_finite()?;
        match self.coeffs.last() {
            None => Err(Error::InvalidMap("empty coefficient list".into())),
            Some(lead) if lead.norm() == 0.0 => {
                Err(Error::InvalidMap("leading coefficient is zero".into()))
            }
            Some(_) if self.coeffs.len() < 2 => {
                Err(Error::InvalidMap("polynomial degree must be at least 1".into()))
            }
            Some(_) => Ok(()),
        }
    }

    /// `(c, n)` when the polynomial is exactly `c z^n`.
    fn as_monomial(&self) -> Option<(Complex64, usize)> {
        let n = self.coeffs.len() - 1;
        let lower_zero = self.coeffs[..n].iter().all(|c| c.norm() == 0.0);
        (lower_zero && n >= 1).then(|| (self.coeffs[n], n))
    }
}

/// Sign `s` of the exponent in `e^{s λ z + γ} + c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "i8", try_from = "i8")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

impl From<Sign> for i8 {
    fn from(s: Sign) -> i8 {
        match s {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

impl TryFrom<i8> for Sign {
    type Error = String;

    fn try_from(v: i8) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            other => Err(format!("sign must be 1 or -1, got {other}")),
        }
    }
}

/// A single generator.
///
/// `Composite` applies its chain rightmost first, so `[g, f]` is `g ∘ f`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum HolomorphicMap {
    Polynomial {
        coeffs: Polynomial,
    },
    Rational {
        num: Polynomial,
        den: Polynomial,
    },
    /// `z ↦ e^{s λ z + γ} + c`
    ExpAffine {
        sign: Sign,
        lambda: Complex64,
        gamma: Complex64,
        c: Complex64,
    },
    /// `z ↦ λ sin z + τ`
    SinScaled {
        lambda: Complex64,
        tau: Complex64,
    },
    /// `z ↦ a z + b`
    Affine {
        a: Complex64,
        b: Complex64,
    },
    Composite {
        chain: Vec<HolomorphicMap>,
    },
}

fn finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

fn checked(z: Complex64) -> Result<Complex64> {
    if finite(z) {
        Ok(z)
    } else {
        Err(Error::Overflow)
    }
}

impl HolomorphicMap {
    pub fn polynomial(coeffs: Vec<Complex64>) -> Result<Self> {
        Ok(HolomorphicMap::Polynomial {
            coeffs: Polynomial::new(coeffs)?,
        })
    }

    /// `c z^n`
    pub fn monomial(c: Complex64, n: usize) -> Result<Self> {
        Ok(HolomorphicMap::Polynomial {
            coeffs: Polynomial::monomial(c, n)?,
        })
    }

    pub fn rational(num: Vec<Complex64>, den: Vec<Complex64>) -> Result<Self> {
        let m = HolomorphicMap::Rational {
            num: Polynomial::from_coeffs(num)?,
            den: Polynomial::from_coeffs(den)?,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn exp_affine(sign: Sign, lambda: Complex64, gamma: Complex64, c: Complex64) -> Result<Self> {
        let m = HolomorphicMap::ExpAffine {
            sign,
            lambda,
            gamma,
            c,
        };
        m.validate()?;
        Ok(m)
    }

    /// `e^{λ z}`
    pub fn exp(lambda: Complex64) -> Result<Self> {
        let zero = Complex64::new(0.0, 0.0);
        HolomorphicMap::exp_affine(Sign::Plus, lambda, zero, zero)
    }

    pub fn sin_scaled(lambda: Complex64, tau: Complex64) -> Result<Self> {
        let m = HolomorphicMap::SinScaled { lambda, tau };
        m.validate()?;
        Ok(m)
    }

    pub fn affine(a: Complex64, b: Complex64) -> Result<Self> {
        let m = HolomorphicMap::Affine { a, b };
        m.validate()?;
        Ok(m)
    }

    pub fn composite(chain: Vec<HolomorphicMap>) -> Result<Self> {
        let m = HolomorphicMap::Composite { chain };
        m.validate()?;
        Ok(m)
    }

    /// Checks every structural invariant and returns the derived class.
    pub fn validate(&self) -> Result<MapClass> {
        let mut leaves = LeafSummary::default();
        self.collect_leaves(&mut leaves)?;
        if leaves.transcendental && leaves.true_rational {
            return Err(Error::MixedClass);
        }
        Ok(if leaves.transcendental {
            MapClass::TranscendentalEntire
        } else {
            MapClass::Rational
        })
    }

    /// Class of a well-formed map.
    pub fn class(&self) -> MapClass {
        match self {
            HolomorphicMap::ExpAffine { .. } | HolomorphicMap::SinScaled { .. } => {
                MapClass::TranscendentalEntire
            }
            HolomorphicMap::Composite { chain } => {
                if chain.iter().any(|m| m.class() == MapClass::TranscendentalEntire) {
                    MapClass::TranscendentalEntire
                } else {
                    MapClass::Rational
                }
            }
            _ => MapClass::Rational,
        }
    }

    fn collect_leaves(&self, acc: &mut LeafSummary) -> Result<()> {
        let nonzero = |z: &Complex64, what: &str| {
            if z.norm() == 0.0 || !finite(*z) {
                Err(Error::InvalidMap(format!("{what} must be finite and nonzero")))
            } else {
                Ok(())
            }
        };
        let is_finite = |z: &Complex64, what: &str| {
            if finite(*z) {
                Ok(())
            } else {
                Err(Error::InvalidMap(format!("{what} must be finite")))
            }
        };
        match self {
            HolomorphicMap::Polynomial { coeffs } => coeffs.check_nonconstant(),
            HolomorphicMap::Rational { num, den } => {
                num.check_finite()?;
                den.check_finite()?;
                if num.coeffs.is_empty() || den.coeffs.is_empty() {
                    return Err(Error::InvalidMap("empty coefficient list".into()));
                }
                if den.is_zero() {
                    return Err(Error::InvalidMap("denominator is identically zero".into()));
                }
                if den.degree() > 0 {
                    acc.true_rational = true;
                }
                Ok(())
            }
            HolomorphicMap::ExpAffine {
                lambda, gamma, c, ..
            } => {
                nonzero(lambda, "lambda")?;
                is_finite(gamma, "gamma")?;
                is_finite(c, "c")?;
                acc.transcendental = true;
                Ok(())
            }
            HolomorphicMap::SinScaled { lambda, tau } => {
                nonzero(lambda, "lambda")?;
                is_finite(tau, "tau")?;
                acc.transcendental = true;
                Ok(())
            }
            HolomorphicMap::Affine { a, b } => {
                nonzero(a, "a")?;
                is_finite(b, "b")
            }
            HolomorphicMap::Composite { chain } => {
                if chain.is_empty() {
                    return Err(Error::InvalidMap("composite chain is empty".into()));
                }
                chain.iter().try_for_each(|m| m.collect_leaves(acc))
            }
        }
    }

    /// Value of the map at `z`.
    pub fn evaluate(&self, z: Complex64) -> Result<Complex64> {
        match self {
            HolomorphicMap::Polynomial { coeffs } => checked(coeffs.eval(z)),
            HolomorphicMap::Rational { num, den } => {
                let d = den.eval(z);
                if d.norm() < POLE_TOL {
                    return Err(Error::PoleHit);
                }
                checked(num.eval(z) / d)
            }
            HolomorphicMap::ExpAffine {
                sign,
                lambda,
                gamma,
                c,
            } => {
                let u = *lambda * z * sign.value() + gamma;
                if u.re > EXP_OVERFLOW || !finite(u) {
                    return Err(Error::Overflow);
                }
                checked(u.exp() + c)
            }
            HolomorphicMap::SinScaled { lambda, tau } => {
                if z.im.abs() > EXP_OVERFLOW {
                    return Err(Error::Overflow);
                }
                checked(*lambda * z.sin() + tau)
            }
            HolomorphicMap::Affine { a, b } => checked(*a * z + b),
            HolomorphicMap::Composite { chain } => chain
                .iter()
                .rev()
                .try_fold(z, |acc, m| m.evaluate(acc)),
        }
    }

    /// Exact analytic derivative at `z`.
    pub fn derivative(&self, z: Complex64) -> Result<Complex64> {
        self.evaluate_with_derivative(z).map(|(_, d)| d)
    }

    /// Value and derivative together; the orbit loops use this.
    pub fn evaluate_with_derivative(&self, z: Complex64) -> Result<(Complex64, Complex64)> {
        let (v, d) = match self {
            HolomorphicMap::Polynomial { coeffs } => coeffs.eval_with_derivative(z),
            HolomorphicMap::Rational { num, den } => {
                let (n, dn) = num.eval_with_derivative(z);
                let (d, dd) = den.eval_with_derivative(z);
                if d.norm() < POLE_TOL {
                    return Err(Error::PoleHit);
                }
                (n / d, (dn * d - n * dd) / (d * d))
            }
            HolomorphicMap::ExpAffine {
                sign,
                lambda,
                gamma,
                c,
            } => {
                let slope = *lambda * sign.value();
                let u = slope * z + gamma;
                if u.re > EXP_OVERFLOW || !finite(u) {
                    return Err(Error::Overflow);
                }
                let e = u.exp();
                (e + c, slope * e)
            }
            HolomorphicMap::SinScaled { lambda, tau } => {
                if z.im.abs() > EXP_OVERFLOW {
                    return Err(Error::Overflow);
                }
                (*lambda * z.sin() + tau, *lambda * z.cos())
            }
            HolomorphicMap::Affine { a, b } => (*a * z + b, *a),
            HolomorphicMap::Composite { chain } => {
                let mut value = z;
                let mut deriv = Complex64::new(1.0, 0.0);
                for m in chain.iter().rev() {
                    let (v, d) = m.evaluate_with_derivative(value)?;
                    value = v;
                    deriv *= d;
                }
                (value, deriv)
            }
        };
        if finite(v) && finite(d) {
            Ok((v, d))
        } else {
            Err(Error::Overflow)
        }
    }

    /// Preimages of `w`.
    ///
    /// Algebraic variants return every root; transcendental variants return
    /// the logarithm/arcsine branches `k ∈ [-K, K]`. Every returned point maps
    /// back to `w` within `1e-8 · max(1, |w|)`. An empty set is a valid answer.
    pub fn preimages(&self, w: Complex64, branch_window: usize) -> Result<Vec<Complex64>> {
        let candidates = self.raw_preimages(w, branch_window)?;
        let tol = 1e-8 * w.norm().max(1.0);
        let mut out = Vec::with_capacity(candidates.len());
        for p in candidates {
            let p = self.newton_polish(p, w);
            match self.evaluate(p) {
                Ok(v) if (v - w).norm() <= tol => out.push(p),
                _ if self.class() == MapClass::Rational => {
                    return Err(Error::RootFindFailure {
                        sweeps: roots::MAX_SWEEPS,
                    })
                }
                // A far transcendental branch lost its precision; the branch
                // window is a truncation anyway.
                _ => {}
            }
        }
        Ok(roots::dedup(out, DEDUP_TOL))
    }

    fn raw_preimages(&self, w: Complex64, k: usize) -> Result<Vec<Complex64>> {
        let k = k as i64;
        match self {
            HolomorphicMap::Polynomial { coeffs } => {
                if let Some((c, n)) = coeffs.as_monomial() {
                    return Ok(nth_roots(w / c, n));
                }
                let mut shifted = coeffs.coeffs.clone();
                shifted[0] -= w;
                roots::all_roots(&shifted)
            }
            HolomorphicMap::Rational { num, den } => {
                let len = num.coeffs.len().max(den.coeffs.len());
                let zero = Complex64::new(0.0, 0.0);
                let q: Vec<Complex64> = (0..len)
                    .map(|i| {
                        num.coeffs.get(i).copied().unwrap_or(zero)
                            - w * den.coeffs.get(i).copied().unwrap_or(zero)
                    })
                    .collect();
                let found = roots::all_roots(&q)?;
                Ok(found
                    .into_iter()
                    .filter(|&r| den.eval(r).norm() >= POLE_TOL)
                    .collect())
            }
            HolomorphicMap::ExpAffine {
                sign,
                lambda,
                gamma,
                c,
            } => {
                let v = w - c;
                if v.norm() == 0.0 {
                    return Ok(Vec::new());
                }
                let log = v.ln();
                let slope = *lambda * sign.value();
                Ok((-k..=k)
                    .map(|j| (log + Complex64::new(0.0, TAU * j as f64) - gamma) / slope)
                    .collect())
            }
            HolomorphicMap::SinScaled { lambda, tau } => {
                let v = (w - tau) / lambda;
                let a = v.asin();
                if !finite(a) {
                    return Ok(Vec::new());
                }
                let mut out = Vec::with_capacity(2 * (2 * k as usize + 1));
                for j in -k..=k {
                    let shift = TAU * j as f64;
                    out.push(a + shift);
                    out.push(Complex64::new(PI, 0.0) - a + shift);
                }
                Ok(out)
            }
            HolomorphicMap::Affine { a, b } => Ok(vec![(w - b) / a]),
            HolomorphicMap::Composite { chain } => {
                // Outermost map is inverted first.
                let mut level = vec![w];
                for m in chain {
                    let mut next = Vec::new();
                    for target in level {
                        next.extend(m.preimages(target, k as usize)?);
                    }
                    level = roots::dedup(next, DEDUP_TOL);
                }
                Ok(level)
            }
        }
    }

    fn newton_polish(&self, mut z: Complex64, w: Complex64) -> Complex64 {
        let residual = |z: Complex64| self.evaluate(z).map(|v| (v - w).norm()).ok();
        let Some(mut best) = residual(z) else {
            return z;
        };
        for _ in 0..4 {
            if best == 0.0 {
                break;
            }
            let Ok((v, d)) = self.evaluate_with_derivative(z) else {
                break;
            };
            if d.norm() == 0.0 {
                break;
            }
            let next = z - (v - w) / d;
            match residual(next) {
                Some(r) if r < best => {
                    z = next;
                    best = r;
                }
                _ => break,
            }
        }
        z
    }
}

#[derive(Default)]
struct LeafSummary {
    transcendental: bool,
    true_rational: bool,
}

/// The `n` roots of `v`; `[0]` when `v = 0`.
fn nth_roots(v: Complex64, n: usize) -> Vec<Complex64> {
    if v.norm() == 0.0 {
        return vec![Complex64::new(0.0, 0.0)];
    }
    let r = v.norm().powf(1.0 / n as f64);
    let theta = v.arg();
    (0..n)
        .map(|j| Complex64::from_polar(r, (theta + TAU * j as f64) / n as f64))
        .collect()
}

impl fmt::Display for HolomorphicMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let poly = |p: &Polynomial| {
            p.coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| c.norm() != 0.0)
                .map(|(i, c)| match i {
                    0 => format!("({c})"),
                    1 => format!("({c})z"),
                    _ => format!("({c})z^{i}"),
                })
                .collect::<Vec<_>>()
                .join(" + ")
        };
        match self {
            HolomorphicMap::Polynomial { coeffs } => write!(f, "{}", poly(coeffs)),
            HolomorphicMap::Rational { num, den } => write!(f, "[{}] / [{}]", poly(num), poly(den)),
            HolomorphicMap::ExpAffine {
                sign,
                lambda,
                gamma,
                c,
            } => {
                let s = if *sign == Sign::Plus { "" } else { "-" };
                write!(f, "exp({s}({lambda})z + ({gamma})) + ({c})")
            }
            HolomorphicMap::SinScaled { lambda, tau } => write!(f, "({lambda}) sin z + ({tau})"),
            HolomorphicMap::Affine { a, b } => write!(f, "({a})z + ({b})"),
            HolomorphicMap::Composite { chain } => {
                let parts: Vec<String> = chain.iter().map(|m| format!("[{m}]")).collect();
                write!(f, "{}", parts.join(" ∘ "))
            }
        }
    }
}
