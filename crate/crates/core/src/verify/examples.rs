use std::collections::BTreeMap;
use std::f64::consts::{E, PI, TAU};

use num_complex::Complex64;
use rand::Rng;

use super::metrics::{count, isolated_pixels};
use super::{Cmp, Report};
use crate::classify::{
    backward_orbit_sample, exceptional_probe, fatou_julia_grid, strip_membership, ClassifyParams, ExceptionalOutcome,
    GridRegion, Label, Prepared, StripFamily,
};
use crate::error::{Error, Result};
use crate::map::{HolomorphicMap, Sign};
use crate::rng::{self, derive_seed};
use crate::semigroup::{cyclic_orbit, Semigroup, Word};

/// Built-in example ids accepted by [`verify_known_example`].
pub const EXAMPLES: &[&str] = &[
    "annulus",
    "power-components",
    "circle-radii",
    "empty-escaping",
    "exp-dichotomy",
    "perfectness-proxy",
    "multiply-connected",
];

/// Stream ids for the examples' own sampling, under the root seed.
const SAMPLE_STREAM: u64 = 0x5A3F_0001;
const STRIP_STREAM: u64 = 0x5A3F_0002;

/// Width of the excluded band around each closed-form circle, in pixels.
const BAND_PX: f64 = 2.0;

/// Runs a built-in example against its closed form.
///
/// `overrides` maps example settings (such as `a` or `n`) and any
/// [`ClassifyParams`] field to values; complex values are written `re` or
/// `re,im`. Unknown keys are rejected.
pub fn verify_known_example(id: &str, overrides: &BTreeMap<String, String>) -> Result<Report> {
    let mut o = Overrides::new(overrides);
    let report = match id {
        "annulus" => annulus(&mut o)?,
        "power-components" => power_components(&mut o)?,
        "circle-radii" => circle_radii(&mut o)?,
        "empty-escaping" => empty_escaping(&mut o)?,
        "exp-dichotomy" => exp_dichotomy(&mut o)?,
        "perfectness-proxy" => perfectness(&mut o)?,
        "multiply-connected" => {
            return Err(Error::Unimplemented {
                name: id.to_string(),
                note: "no constructible semigroup with a multiply connected Fatou component is available, so \
                       the meeting of escaping and Julia sets there cannot be exercised"
                    .into(),
            })
        }
        other => return Err(Error::UnknownExample(other.to_string())),
    };
    Ok(report)
}

/// Typed access to string overrides; each key is consumed once and leftover
/// keys are an error.
struct Overrides {
    values: BTreeMap<String, String>,
}

impl Overrides {
    fn new(values: &BTreeMap<String, String>) -> Self {
        Overrides { values: values.clone() }
    }

    fn raw(&mut self, key: &str) -> Option<String> {
        self.values.remove(key)
    }

    fn f64(&mut self, key: &str, default: f64) -> Result<f64> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => parse_f64(key, &v),
        }
    }

    fn usize(&mut self, key: &str, default: usize) -> Result<usize> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => v
                .trim()
                .parse()
                .map_err(|_| Error::InvalidParams(format!("`{key}` expects a non-negative integer, got `{v}`"))),
        }
    }

    fn complex(&mut self, key: &str, default: Complex64) -> Result<Complex64> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => parse_complex(key, &v),
        }
    }

    /// Pulls every [`ClassifyParams`] field present, over `base`.
    fn params(&mut self, base: ClassifyParams) -> Result<ClassifyParams> {
        let p = ClassifyParams {
            max_word_len: self.usize("max_word_len", base.max_word_len)?,
            n_sequences: self.usize("n_sequences", base.n_sequences)?,
            depth: self.usize("depth", base.depth)?,
            escape_radius: self.f64("escape_radius", base.escape_radius)?,
            bound_radius: self.f64("bound_radius", base.bound_radius)?,
            deriv_threshold: self.f64("deriv_threshold", base.deriv_threshold)?,
            branch_window: self.usize("branch_window", base.branch_window)?,
            seed: match self.raw("seed") {
                None => base.seed,
                Some(v) => v
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidParams(format!("`seed` expects an unsigned integer, got `{v}`")))?,
            },
            word_cap: self.usize("word_cap", base.word_cap)?,
        };
        p.validate()?;
        Ok(p)
    }

    fn finish(&self, example: &str) -> Result<()> {
        match self.values.keys().next() {
            None => Ok(()),
            Some(k) => Err(Error::InvalidParams(format!("unknown setting `{k}` for example `{example}`"))),
        }
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.trim()
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| Error::InvalidParams(format!("`{key}` expects a finite number, got `{v}`")))
}

fn parse_complex(key: &str, v: &str) -> Result<Complex64> {
    let mut parts = v.split(',');
    let re = parse_f64(key, parts.next().unwrap_or(""))?;
    let im = match parts.next() {
        Some(s) => parse_f64(key, s)?,
        None => 0.0,
    };
    if parts.next().is_some() {
        return Err(Error::InvalidParams(format!("`{key}` expects `re` or `re,im`, got `{v}`")));
    }
    Ok(Complex64::new(re, im))
}

fn show(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else {
        format!("{},{}", z.re, z.im)
    }
}

fn hypothesis(ok: bool, what: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::HypothesisViolated(what()))
    }
}

fn require_a(a: Complex64) -> Result<()> {
    hypothesis(a.norm() > 1.0, || format!("|a| > 1 (got |a| = {})", a.norm()))
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn annulus_semigroup(a: Complex64) -> Result<Semigroup> {
    Semigroup::new(
        "annulus",
        vec![
            HolomorphicMap::monomial(c(1.0, 0.0), 2)?,
            HolomorphicMap::monomial(a.inv(), 2)?,
        ],
    )
}

/// `⟨z², z²/a⟩` against `J = {1 ≤ |z| ≤ |a|}`, away from the two circles.
fn annulus(o: &mut Overrides) -> Result<Report> {
    let a = o.complex("a", c(2.0, 0.0))?;
    let size = o.usize("size", 512)?;
    let p = o.params(ClassifyParams::default())?;
    o.finish("annulus")?;
    require_a(a)?;
    let big = a.norm();
    let region = GridRegion::square(big + 1.0, size)?;
    let g = fatou_julia_grid(&annulus_semigroup(a)?, &region, &p)?;
    let band = BAND_PX * region.pixel_size();
    let (mut counted, mut agree, mut undetermined) = (0usize, 0usize, 0usize);
    for (i, label) in g.verdicts.iter().enumerate() {
        let r = region.center_of_index(i).norm();
        if (r - 1.0).abs() <= band || (r - big).abs() <= band {
            continue;
        }
        counted += 1;
        let expected = if r > 1.0 && r < big {
            Label::JuliaLike
        } else {
            Label::FatouLike
        };
        agree += (*label == expected) as usize;
        undetermined += (*label == Label::Undetermined) as usize;
    }
    let mismatch = 1.0 - agree as f64 / counted as f64;
    let mut r = Report::new("annulus", p);
    r.setting("a", show(a))
        .setting("size", size)
        .setting("band_px", BAND_PX)
        .metric("counted_pixels", counted as f64)
        .metric("undetermined_pixels", undetermined as f64)
        .metric("agreement", agree as f64 / counted as f64)
        .checked("mismatch_rate", mismatch, Cmp::AtMost, 0.02);
    Ok(r.finish())
}

/// `⟨zⁿ, azⁿ⟩`: the closed-form annulus `U` maps into `V = {|z| > 1}` under
/// `f = azⁿ`, and `V∖f(U)` contains an unbounded escaping ray.
fn power_components(o: &mut Overrides) -> Result<Report> {
    let a = o.complex("a", c(2.0, 0.0))?;
    let n = o.usize("n", 3)?;
    let samples = o.usize("samples", 1000)?;
    let p = o.params(ClassifyParams::default())?;
    o.finish("power-components")?;
    require_a(a)?;
    hypothesis(n > 2, || format!("n > 2 (got n = {n})"))?;
    if samples == 0 {
        return Err(Error::InvalidParams("samples must be at least 1".into()));
    }
    let (nf, m) = (n as f64, a.norm());
    let u_inner = m.powf(-1.0 / nf);
    let u_outer = m.powf(-1.0 / (nf * (nf - 1.0)));
    let fu_outer = m.powf((nf - 2.0) / (nf - 1.0));
    let f = HolomorphicMap::monomial(a, n)?;
    let s = Semigroup::new("power-components", vec![HolomorphicMap::monomial(c(1.0, 0.0), n)?, f.clone()])?;

    let mut rng = rng::stream(derive_seed(p.seed, &[SAMPLE_STREAM]));
    let (mut in_v, mut in_fu) = (0usize, 0usize);
    let mut drawn = 0;
    while drawn < samples {
        let radius = rng.random_range(u_inner..u_outer);
        let theta = rng.random_range(0.0..TAU);
        // U is open
        if radius <= u_inner {
            continue;
        }
        drawn += 1;
        let w = f.evaluate(Complex64::from_polar(radius, theta))?.norm();
        in_v += (w > 1.0) as usize;
        in_fu += (w > 1.0 - 1e-12 && w < fu_outer + 1e-12) as usize;
    }

    // witness w = |a|: in V since |a| > 1, beyond f(U) since the exponent of
    // the outer radius is below one
    let witness = m;
    let outside_fu = |w: f64| w > 1.0 && w > fu_outer;

    let ray: Vec<f64> = (0..=20).map(|j| m * 2f64.powi(j)).collect();
    let mut ray_ok = 0usize;
    let mut ray_escaping = 0usize;
    for &rad in &ray {
        let z = Complex64::from_polar(rad, a.arg());
        let image = f.evaluate(z)?.norm();
        ray_ok += (outside_fu(rad) && outside_fu(image)) as usize;
        let orbit = cyclic_orbit(&s, &Word::single(1), z, p.depth, p.escape_radius)?;
        ray_escaping += orbit.fate.is_divergent() as usize;
    }

    let mut r = Report::new("power-components", p);
    r.setting("a", show(a))
        .setting("n", n)
        .setting("samples", samples)
        .metric("u_inner_radius", u_inner)
        .metric("u_outer_radius", u_outer)
        .metric("image_inner_radius", 1.0)
        .metric("image_outer_radius", fu_outer)
        .metric("ray_max_modulus", ray.last().copied().unwrap_or(0.0))
        .checked("image_in_v_fraction", in_v as f64 / samples as f64, Cmp::AtLeast, 1.0)
        .checked("image_in_closed_form_fraction", in_fu as f64 / samples as f64, Cmp::AtLeast, 1.0)
        .require("witness_in_v_minus_image", outside_fu(witness))
        .checked("ray_outside_image_fraction", ray_ok as f64 / ray.len() as f64, Cmp::AtLeast, 1.0)
        .checked("ray_escaping_fraction", ray_escaping as f64 / ray.len() as f64, Cmp::AtLeast, 1.0)
        .note(format!("witness point w = {witness}"));
    Ok(r.finish())
}

/// Backward-orbit radii of `f_m = a^m zⁿ` against `|a|^{-m/(n-1)}`, and the
/// origin as an exceptional point that the circles accumulate on.
fn circle_radii(o: &mut Overrides) -> Result<Report> {
    let a = o.complex("a", c(2.0, 0.0))?;
    let n = o.usize("n", 2)?;
    let m_max = o.usize("m_max", 5)?;
    let points = o.usize("points", 1000)?;
    let burn_in = o.usize("burn_in", 30)?;
    let z0 = o.complex("z0", c(1.5, 0.5))?;
    let p = o.params(ClassifyParams::default())?;
    o.finish("circle-radii")?;
    require_a(a)?;
    hypothesis(n >= 2, || format!("n >= 2 (got n = {n})"))?;
    hypothesis(z0 != c(0.0, 0.0), || "z0 must not be the exceptional point 0".into())?;
    if m_max == 0 || points == 0 {
        return Err(Error::InvalidParams("m_max and points must be at least 1".into()));
    }

    let mut r = Report::new("circle-radii", p);
    r.setting("a", show(a))
        .setting("n", n)
        .setting("m_max", m_max)
        .setting("points", points)
        .setting("burn_in", burn_in)
        .setting("z0", show(z0));
    let mut gens = Vec::with_capacity(m_max);
    let mut worst_mean = 0.0f64;
    let mut worst_point = 0.0f64;
    let mut radii = Vec::with_capacity(m_max);
    for m in 1..=m_max {
        let f = HolomorphicMap::monomial(a.powu(m as u32), n)?;
        gens.push(f.clone());
        let target = a.norm().powf(-(m as f64) / (n as f64 - 1.0));
        let cloud = backward_orbit_sample(&Semigroup::cyclic(format!("f_{m}"), f)?, z0, points, burn_in, &p)?;
        let mean = cloud.points.iter().map(|z| z.norm()).sum::<f64>() / points as f64;
        let rel = (mean - target).abs() / target;
        let point_rel = cloud
            .points
            .iter()
            .map(|z| (z.norm() - target).abs() / target)
            .fold(0.0, f64::max);
        r.metric(format!("radius_{m}"), mean)
            .metric(format!("target_radius_{m}"), target)
            .metric(format!("relative_error_{m}"), rel);
        worst_mean = worst_mean.max(rel);
        worst_point = worst_point.max(point_rel);
        radii.push(mean);
    }
    let decreasing = radii.windows(2).all(|w| w[1] < w[0]);
    let probe = exceptional_probe(&Semigroup::new("circles", gens)?, c(0.0, 0.0), 8, 10_000, p.branch_window)?;
    let zero_exceptional = probe.outcome == ExceptionalOutcome::Finite(vec![c(0.0, 0.0)]);
    r.checked("max_relative_error", worst_mean, Cmp::AtMost, 1e-3)
        .checked("max_pointwise_relative_error", worst_point, Cmp::AtMost, 1e-3)
        .metric("smallest_radius", *radii.last().expect("m_max >= 1"))
        .require("radii_decrease_to_zero", decreasing)
        .require("zero_is_exceptional", zero_exceptional)
        .note("the radii shrink geometrically, so 0 is a limit point of the circles");
    Ok(r.finish())
}

/// The two-parameter exponential pair with empty escaping set, plus
/// disjointness of the two strip families.
fn empty_escaping(o: &mut Overrides) -> Result<Report> {
    let gamma = o.complex("gamma", c(-1.0, 0.0))?;
    let cc = o.complex("c", c(1.0, 0.0))?;
    let mu = o.complex("mu", c(-1.0, 0.0))?;
    let d = o.complex("d", c(-1.0, 0.0))?;
    let samples = o.usize("samples", 10_000)?;
    let strip_samples = o.usize("strip_samples", 100_000)?;
    let extent = o.f64("extent", 10.0)?;
    let p = o.params(ClassifyParams::default())?;
    o.finish("empty-escaping")?;
    hypothesis(gamma.re < 0.0, || format!("Re(gamma) < 0 (got {})", gamma.re))?;
    hypothesis(cc.re >= 1.0, || format!("Re(c) >= 1 (got {})", cc.re))?;
    hypothesis(mu.re < 0.0, || format!("Re(mu) < 0 (got {})", mu.re))?;
    hypothesis(d.re <= -1.0, || format!("Re(d) <= -1 (got {})", d.re))?;
    if extent.is_nan() || extent <= 0.0 || samples == 0 || strip_samples == 0 {
        return Err(Error::InvalidParams("extent and sample counts must be positive".into()));
    }

    let one = c(1.0, 0.0);
    let s = Semigroup::new(
        "empty-escaping",
        vec![
            HolomorphicMap::exp_affine(Sign::Minus, one, gamma, cc)?,
            HolomorphicMap::exp_affine(Sign::Plus, one, mu, d)?,
        ],
    )?;
    let prep = Prepared::new(&s, &p, None)?;
    let mut rng = rng::stream(derive_seed(p.seed, &[SAMPLE_STREAM]));
    let mut tally = [0usize; 3];
    for i in 0..samples {
        let z = c(rng.random_range(-extent..extent), rng.random_range(-extent..extent));
        let slot = match prep.escaping_at(z, i as u64).label {
            Label::Escaping => 0,
            Label::NonEscaping => 1,
            _ => 2,
        };
        tally[slot] += 1;
    }

    // |Im z| < 2 extent stays inside the strips with |k| <= k_range
    let im_extent = 2.0 * extent;
    let k_range = (im_extent / (2.0 * PI)).ceil() as u32 + 1;
    let mut rng = rng::stream(derive_seed(p.seed, &[STRIP_STREAM]));
    let (mut first, mut second, mut both) = (0usize, 0usize, 0usize);
    for _ in 0..strip_samples {
        let z = c(rng.random_range(-extent..extent), rng.random_range(-im_extent..im_extent));
        let a = strip_membership(z, StripFamily::First, k_range);
        let b = strip_membership(z, StripFamily::Second, k_range);
        first += a as usize;
        second += b as usize;
        both += (a && b) as usize;
    }

    let mut r = Report::new("empty-escaping", p);
    r.setting("gamma", show(gamma))
        .setting("c", show(cc))
        .setting("mu", show(mu))
        .setting("d", show(d))
        .setting("samples", samples)
        .setting("strip_samples", strip_samples)
        .setting("extent", extent)
        .setting("k_range", k_range)
        .checked("escaping_samples", tally[0] as f64, Cmp::AtMost, 0.0)
        .metric("nonescaping_samples", tally[1] as f64)
        .metric("undetermined_samples", tally[2] as f64)
        .metric("first_strip_samples", first as f64)
        .metric("second_strip_samples", second as f64)
        .checked("strip_overlap_samples", both as f64, Cmp::AtMost, 0.0);
    Ok(r.finish())
}

/// The orbit of 0 under `e^{λz}` on both sides of `1/e`.
fn exp_dichotomy(o: &mut Overrides) -> Result<Report> {
    let lambda = match o.raw("lambda") {
        None => None,
        Some(v) => Some(parse_complex("lambda", &v)?),
    };
    let delta = o.f64("delta", 0.01)?;
    let p = o.params(ClassifyParams {
        depth: 200,
        ..Default::default()
    })?;
    o.finish("exp-dichotomy")?;
    let critical = 1.0 / E;
    hypothesis(delta > 0.0 && delta < critical, || format!("0 < delta < 1/e (got {delta})"))?;
    if let Some(l) = lambda {
        hypothesis(l.im == 0.0 && l.re > 0.0, || format!("lambda real and positive (got {l})"))?;
        hypothesis(l.re != critical, || "lambda != 1/e".into())?;
    }

    let fate_at = |l: f64| -> Result<(bool, f64)> {
        let s = Semigroup::cyclic("exp", HolomorphicMap::exp(c(l, 0.0))?)?;
        let orbit = cyclic_orbit(&s, &Word::single(0), c(0.0, 0.0), p.depth, p.escape_radius)?;
        let last = orbit.points.last().map_or(0.0, |z| z.norm());
        Ok((orbit.fate.is_divergent(), last))
    };
    let (lo, hi) = (critical - delta, critical + delta);
    let (lo_div, lo_last) = fate_at(lo)?;
    let (hi_div, hi_last) = fate_at(hi)?;
    let mut r = Report::new("exp-dichotomy", p);
    r.setting("delta", delta)
        .metric("lambda_below", lo)
        .metric("lambda_above", hi)
        .metric("last_modulus_below", lo_last)
        .metric("last_modulus_above", hi_last)
        .require("bounded_below", !lo_div)
        .require("divergent_above", hi_div);
    if let Some(l) = lambda {
        let (div, last) = fate_at(l.re)?;
        r.setting("lambda", l.re)
            .metric("last_modulus_lambda", last)
            .require("lambda_fate_matches_side", div == (l.re > critical));
    }
    Ok(r.finish())
}

/// No isolated JuliaLike pixel on the annulus example.
fn perfectness(o: &mut Overrides) -> Result<Report> {
    let a = o.complex("a", c(2.0, 0.0))?;
    let size = o.usize("size", 256)?;
    let p = o.params(ClassifyParams::default())?;
    o.finish("perfectness-proxy")?;
    require_a(a)?;
    let region = GridRegion::square(a.norm() + 1.0, size)?;
    let g = fatou_julia_grid(&annulus_semigroup(a)?, &region, &p)?;
    let julia = g.mask(Label::JuliaLike);
    let mut r = Report::new("perfectness-proxy", p);
    r.setting("a", show(a))
        .setting("size", size)
        .checked("julia_pixels", count(&julia) as f64, Cmp::AtLeast, 1.0)
        .checked(
            "isolated_julia_pixels",
            isolated_pixels(&julia, size, size) as f64,
            Cmp::AtMost,
            0.0,
        );
    Ok(r.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn unknown_example_and_setting() {
        assert!(matches!(
            verify_known_example("nope", &BTreeMap::new()),
            Err(Error::UnknownExample(_))
        ));
        assert!(matches!(
            verify_known_example("exp-dichotomy", &set(&[("bogus", "1")])),
            Err(Error::InvalidParams(_))
        ));
        assert!(matches!(
            verify_known_example("multiply-connected", &BTreeMap::new()),
            Err(Error::Unimplemented { .. })
        ));
    }

    /// Example id, overrides, expected fragment of the hypothesis message.
    type HypothesisCase<'a> = (&'a str, &'a [(&'a str, &'a str)], &'a str);

    #[test]
    fn hypotheses_are_named() {
        let cases: [HypothesisCase; 7] = [
            ("annulus", &[("a", "0.5")], "|a| > 1"),
            ("power-components", &[("n", "2")], "n > 2"),
            ("empty-escaping", &[("gamma", "0.5")], "Re(gamma) < 0"),
            ("empty-escaping", &[("c", "0.5")], "Re(c) >= 1"),
            ("empty-escaping", &[("mu", "0,1")], "Re(mu) < 0"),
            ("empty-escaping", &[("d", "-0.5")], "Re(d) <= -1"),
            ("exp-dichotomy", &[("lambda", "0.36787944117144233")], "lambda != 1/e"),
        ];
        for (id, kv, needle) in cases {
            match verify_known_example(id, &set(kv)) {
                Err(Error::HypothesisViolated(msg)) => assert!(msg.contains(needle), "{msg}"),
                other => panic!("{id}: {other:?}"),
            }
        }
    }

    #[test]
    fn parse_values() {
        assert_eq!(parse_complex("a", "2").unwrap(), c(2.0, 0.0));
        assert_eq!(parse_complex("a", " 1.5, -0.5").unwrap(), c(1.5, -0.5));
        assert!(parse_complex("a", "1,2,3").is_err());
        assert!(parse_complex("a", "x").is_err());
        assert!(parse_f64("t", "inf").is_err());
    }

    #[test]
    fn dichotomy_brackets() {
        let r = verify_known_example("exp-dichotomy", &BTreeMap::new()).unwrap();
        assert!(r.passed, "{r}");
        let r = verify_known_example("exp-dichotomy", &set(&[("lambda", "0.3")])).unwrap();
        assert!(r.passed, "{r}");
        assert_eq!(r.metrics["lambda_fate_matches_side"], 1.0);
    }

    #[test]
    fn power_components_default() {
        let r = verify_known_example("power-components", &BTreeMap::new()).unwrap();
        assert!(r.passed, "{r}");
        // oracle: n = 3, a = 2 gives f(U) = {1 < |w| < √2}
        assert!((r.metrics["image_outer_radius"] - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn circle_radii_default() {
        let r = verify_known_example("circle-radii", &BTreeMap::new()).unwrap();
        assert!(r.passed, "{r}");
        for m in 1..=5 {
            assert_eq!(r.metrics[&format!("target_radius_{m}")], 0.5f64.powi(m));
        }
    }

    #[test]
    fn small_annulus_passes() {
        let r = verify_known_example("annulus", &set(&[("size", "96"), ("a", "0,2.5")])).unwrap();
        assert!(r.passed, "{r}");
        assert_eq!(r.settings["a"], "0,2.5");
    }
}
