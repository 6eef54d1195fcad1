use super::metrics::{count, directed_hausdorff, fraction_within};
use super::{Cmp, Report};
use crate::classify::{
    escaping_grid, fatou_julia_grid, julia_from_escaping_boundary, julia_union_by_length, ClassifyParams,
    GridClassification, GridRegion, GridSource, Label,
};
use crate::error::{Error, Result};
use crate::map::MapClass;
use crate::semigroup::Semigroup;

/// Largest tolerated violation rate per containment.
pub const CONTAINMENT_SLACK: f64 = 0.005;
/// Largest tolerated symmetric-difference rate of the two Julia estimators.
pub const UNION_SYMDIFF_SLACK: f64 = 0.02;
/// Pixel tolerance for the Hausdorff-type comparisons.
pub const UNION_HAUSDORFF_PX: f64 = 2.0;
/// Share of boundary pixels that must lie near a JuliaLike pixel.
pub const BOUNDARY_SHARE: f64 = 0.95;

fn region_settings(r: &mut Report, region: &GridRegion) {
    r.setting("region_min", region.min)
        .setting("region_max", region.max)
        .setting("width", region.width)
        .setting("height", region.height);
}

/// Fraction of pixels where `a` holds but `b` does not.
fn violation_rate(a: &[bool], b: &[bool]) -> (usize, f64) {
    let n = a.iter().zip(b).filter(|(x, y)| **x && !**y).count();
    (n, n as f64 / a.len() as f64)
}

/// Grid-level containments between `S` and each cyclic `⟨f_i⟩`:
/// FatouLike for `S` implies FatouLike for `f_i`, JuliaLike for `f_i`
/// implies JuliaLike for `S`, and (transcendental) Escaping for `S`
/// implies Escaping for `f_i`.
pub fn verify_containments(s: &Semigroup, region: &GridRegion, p: &ClassifyParams) -> Result<Report> {
    let mut r = Report::new(format!("containments {}", s.label()), *p);
    region_settings(&mut r, region);
    let transcendental = s.class() == MapClass::TranscendentalEntire;
    let fj = fatou_julia_grid(s, region, p)?;
    let esc = if transcendental {
        Some(escaping_grid(s, region, p)?)
    } else {
        None
    };
    let s_fatou = fj.mask(Label::FatouLike);
    let s_julia = fj.mask(Label::JuliaLike);
    r.metric("s_fatou_pixels", count(&s_fatou) as f64)
        .metric("s_julia_pixels", count(&s_julia) as f64);
    for (i, f) in s.cyclic_subsemigroups().iter().enumerate() {
        let fj_f = fatou_julia_grid(f, region, p)?;
        let (n, rate) = violation_rate(&s_fatou, &fj_f.mask(Label::FatouLike));
        r.metric(format!("fatou_violations_{i}"), n as f64)
            .checked(&format!("fatou_violation_rate_{i}"), rate, Cmp::AtMost, CONTAINMENT_SLACK);
        let (n, rate) = violation_rate(&fj_f.mask(Label::JuliaLike), &s_julia);
        r.metric(format!("julia_violations_{i}"), n as f64)
            .checked(&format!("julia_violation_rate_{i}"), rate, Cmp::AtMost, CONTAINMENT_SLACK);
        if let Some(esc) = &esc {
            let s_esc = esc.mask(Label::Escaping);
            let f_esc = escaping_grid(f, region, p)?.mask(Label::Escaping);
            let (n, rate) = violation_rate(&s_esc, &f_esc);
            r.metric(format!("escaping_violations_{i}"), n as f64)
                .checked(&format!("escaping_violation_rate_{i}"), rate, Cmp::AtMost, CONTAINMENT_SLACK);
        }
    }
    if let Some(esc) = &esc {
        let n = esc.count(Label::Escaping);
        r.metric("s_escaping_pixels", n as f64);
        if n == 0 {
            r.note("escaping grid of S is empty; the escaping containment holds vacuously");
        }
    }
    Ok(r.finish())
}

/// Compares the Fatou/Julia classifier's JuliaLike pixels with the union of
/// the word Julia sets, and reports the union-to-classifier Hausdorff
/// distance for every word-length cutoff.
pub fn verify_union_identity(s: &Semigroup, region: &GridRegion, p: &ClassifyParams) -> Result<Report> {
    if s.class() != MapClass::Rational {
        return Err(Error::WrongClass {
            expected: MapClass::Rational,
        });
    }
    let mut r = Report::new(format!("union-identity {}", s.label()), *p);
    region_settings(&mut r, region);
    let (w, h) = (region.width, region.height);
    let direct = fatou_julia_grid(s, region, p)?.mask(Label::JuliaLike);
    let unions = julia_union_by_length(s, region, p)?;
    let mut previous = f64::INFINITY;
    let mut nonincreasing = true;
    for (i, g) in unions.iter().enumerate() {
        let d = directed_hausdorff(&direct, &g.mask(Label::JuliaLike), w, h);
        r.metric(format!("hausdorff_direct_to_union_len_{}", i + 1), d);
        nonincreasing &= d <= previous;
        previous = d;
    }
    let union = unions.last().expect("max_word_len >= 1").mask(Label::JuliaLike);
    let symdiff = direct.iter().zip(&union).filter(|(a, b)| a != b).count();
    r.metric("direct_julia_pixels", count(&direct) as f64)
        .metric("union_julia_pixels", count(&union) as f64)
        .metric("symmetric_difference_pixels", symdiff as f64)
        .checked(
            "symmetric_difference_rate",
            symdiff as f64 / region.len() as f64,
            Cmp::AtMost,
            UNION_SYMDIFF_SLACK,
        )
        .checked(
            "hausdorff_direct_to_union",
            directed_hausdorff(&direct, &union, w, h),
            Cmp::AtMost,
            UNION_HAUSDORFF_PX,
        )
        .checked(
            "hausdorff_union_to_direct",
            directed_hausdorff(&union, &direct, w, h),
            Cmp::AtMost,
            UNION_HAUSDORFF_PX,
        )
        .require("hausdorff_nonincreasing_in_word_length", nonincreasing);
    Ok(r.finish())
}

/// The discrete boundary of the escaping grid against the JuliaLike pixels
/// of the Fatou/Julia classifier on the same region.
pub fn verify_boundary_identity(s: &Semigroup, region: &GridRegion, p: &ClassifyParams) -> Result<Report> {
    if s.class() != MapClass::TranscendentalEntire {
        return Err(Error::WrongClass {
            expected: MapClass::TranscendentalEntire,
        });
    }
    let esc = escaping_grid(s, region, p)?;
    let fj = if esc.count(Label::Escaping) == 0 {
        None
    } else {
        Some(fatou_julia_grid(s, region, p)?)
    };
    let mut r = boundary_identity_report(&esc, fj.as_ref())?;
    r.name = format!("boundary-identity {}", s.label());
    Ok(r)
}

/// Scores an escaping grid against a Fatou/Julia grid of the same region.
/// With no Escaping pixel the check passes vacuously and `fj` may be
/// omitted.
pub fn boundary_identity_report(esc: &GridClassification, fj: Option<&GridClassification>) -> Result<Report> {
    let mut r = Report::new("boundary-identity", esc.params);
    region_settings(&mut r, &esc.region);
    let (w, h) = (esc.region.width, esc.region.height);
    let n_esc = esc.count(Label::Escaping);
    r.metric("escaping_pixels", n_esc as f64);
    if n_esc == 0 {
        r.note("escaping grid is empty; the boundary identity holds vacuously");
        return Ok(r.finish());
    }
    let fj = fj.ok_or_else(|| Error::InvalidParams("a Fatou/Julia grid is required".into()))?;
    if fj.source != GridSource::FatouJulia || fj.region != esc.region {
        return Err(Error::WrongSource(
            "expected a Fatou/Julia grid over the escaping grid's region".into(),
        ));
    }
    let boundary = julia_from_escaping_boundary(esc)?.mask(Label::JuliaLike);
    let julia = fj.mask(Label::JuliaLike);
    r.metric("boundary_pixels", count(&boundary) as f64)
        .metric("julia_pixels", count(&julia) as f64)
        .metric("hausdorff_boundary_to_julia", directed_hausdorff(&boundary, &julia, w, h))
        .checked(
            "boundary_near_julia_fraction",
            fraction_within(&boundary, &julia, w, h, UNION_HAUSDORFF_PX),
            Cmp::AtLeast,
            BOUNDARY_SHARE,
        );
    if count(&boundary) == 0 {
        r.note("escaping grid has no interior boundary inside the region");
    }
    Ok(r.finish())
}
