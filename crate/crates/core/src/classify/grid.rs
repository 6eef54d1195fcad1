use super::point::Prepared;
use super::{boundary_mask, ClassifyParams, GridClassification, GridRegion, GridSource, Label};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::map::MapClass;
use crate::semigroup::{cyclic_summary, enumerate_words, Semigroup};

fn require(s: &Semigroup, class: MapClass) -> Result<()> {
    if s.class() == class {
        Ok(())
    } else {
        Err(Error::WrongClass { expected: class })
    }
}

/// [`classify_escaping`](super::classify_escaping) at every pixel center.
/// Pixel `i` draws its random sequences from the stream `(seed, i)`.
pub fn escaping_grid(s: &Semigroup, region: &GridRegion, p: &ClassifyParams) -> Result<GridClassification> {
    escaping_grid_with(s, region, p, Exec::default())
}

pub fn escaping_grid_with(
    s: &Semigroup,
    region: &GridRegion,
    p: &ClassifyParams,
    exec: Exec,
) -> Result<GridClassification> {
    require(s, MapClass::TranscendentalEntire)?;
    region.validate()?;
    let prep = Prepared::new(s, p, None)?;
    let verdicts = exec.map_indices(region.len(), |i| {
        prep.escaping_at(region.center_of_index(i), i as u64).label
    });
    Ok(GridClassification::new(*region, GridSource::Escaping, verdicts, *p))
}

/// [`classify_fatou_julia_at_scale`](super::classify_fatou_julia_at_scale)
/// at every pixel center, with the pixel size as the scale.
pub fn fatou_julia_grid(s: &Semigroup, region: &GridRegion, p: &ClassifyParams) -> Result<GridClassification> {
    fatou_julia_grid_with(s, region, p, Exec::default())
}

pub fn fatou_julia_grid_with(
    s: &Semigroup,
    region: &GridRegion,
    p: &ClassifyParams,
    exec: Exec,
) -> Result<GridClassification> {
    region.validate()?;
    let prep = Prepared::new(s, p, Some(region.pixel_size()))?;
    let verdicts = exec.map_indices(region.len(), |i| {
        prep.fatou_julia_at(region.center_of_index(i), i as u64).label
    });
    Ok(GridClassification::new(*region, GridSource::FatouJulia, verdicts, *p))
}

/// Union over words `w` (length ≤ `max_word_len`) of the escape-time edge of
/// `J(w)`: pixels whose cyclic-orbit fate under `w` differs from a
/// 4-neighbor's. Union pixels are JuliaLike, the rest FatouLike.
pub fn julia_grid_union(s: &Semigroup, region: &GridRegion, p: &ClassifyParams) -> Result<GridClassification> {
    julia_grid_union_with(s, region, p, Exec::default())
}

pub fn julia_grid_union_with(
    s: &Semigroup,
    region: &GridRegion,
    p: &ClassifyParams,
    exec: Exec,
) -> Result<GridClassification> {
    let mut grids = union_by_length(s, region, p, exec)?;
    Ok(grids.pop().expect("max_word_len >= 1"))
}

/// Cumulative unions for word lengths `1..=max_word_len`; entry `ℓ - 1`
/// covers words of length at most `ℓ`.
pub fn julia_union_by_length(
    s: &Semigroup,
    region: &GridRegion,
    p: &ClassifyParams,
) -> Result<Vec<GridClassification>> {
    union_by_length(s, region, p, Exec::default())
}

fn union_by_length(
    s: &Semigroup,
    region: &GridRegion,
    p: &ClassifyParams,
    exec: Exec,
) -> Result<Vec<GridClassification>> {
    require(s, MapClass::Rational)?;
    region.validate()?;
    p.validate()?;
    let words = enumerate_words(s, p.max_word_len, p.word_cap)?;
    let mut union = vec![false; region.len()];
    let mut out = Vec::with_capacity(p.max_word_len);
    for len in 1..=p.max_word_len {
        for w in words.iter().filter(|w| w.len() == len) {
            let diverged = exec.map_indices(region.len(), |i| {
                cyclic_summary(s, w.indices(), region.center_of_index(i), p.depth, p.escape_radius, false)
                    .fate
                    .is_divergent()
            });
            let edge = boundary_mask(&diverged, region.width, region.height);
            for (u, e) in union.iter_mut().zip(edge) {
                *u |= e;
            }
        }
        let verdicts = union
            .iter()
            .map(|&j| if j { Label::JuliaLike } else { Label::FatouLike })
            .collect();
        let mut echo = *p;
        echo.max_word_len = len;
        out.push(GridClassification::new(*region, GridSource::JuliaUnion, verdicts, echo));
    }
    Ok(out)
}

/// Discrete `∂I(S)`: JuliaLike where the Escaping flag differs from a
/// 4-neighbor, FatouLike elsewhere (interior and exterior of `I(S)`).
pub fn julia_from_escaping_boundary(g: &GridClassification) -> Result<GridClassification> {
    if g.source != GridSource::Escaping {
        return Err(Error::WrongSource(format!("expected an escaping grid, got {:?}", g.source)));
    }
    let flags = g.mask(Label::Escaping);
    let edge = boundary_mask(&flags, g.region.width, g.region.height);
    let verdicts = edge
        .into_iter()
        .map(|e| if e { Label::JuliaLike } else { Label::FatouLike })
        .collect();
    Ok(GridClassification::new(g.region, GridSource::EscapingBoundary, verdicts, g.params))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::classify_escaping;
    use crate::map::{HolomorphicMap, Sign};
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn exp_cyclic(lambda: f64) -> Semigroup {
        Semigroup::cyclic("exp", HolomorphicMap::exp(c(lambda, 0.0)).unwrap()).unwrap()
    }

    fn squaring() -> Semigroup {
        Semigroup::cyclic("z^2", HolomorphicMap::monomial(c(1.0, 0.0), 2).unwrap()).unwrap()
    }

    #[test]
    fn exp_real_axis_escapes() {
        let region = GridRegion::new(c(-2.0, -2.0), c(4.0, 2.0), 64, 64).unwrap();
        let p = ClassifyParams::default();
        let s = exp_cyclic(1.0);
        let g = escaping_grid(&s, &region, &p).unwrap();
        for row in [31, 32] {
            for col in 0..64 {
                let z = region.pixel_center(col, row);
                if z.re > 0.0 {
                    assert_eq!(g.get(col, row), Label::Escaping, "{z}");
                    assert_eq!(classify_escaping(&s, z, &p).unwrap().label, Label::Escaping);
                }
            }
        }
    }

    #[test]
    fn empty_escaping_grid() {
        let s = Semigroup::new(
            "kk",
            vec![
                HolomorphicMap::exp_affine(Sign::Minus, c(1.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0)).unwrap(),
                HolomorphicMap::exp_affine(Sign::Plus, c(1.0, 0.0), c(-1.0, 0.0), c(-1.0, 0.0)).unwrap(),
            ],
        )
        .unwrap();
        let g = escaping_grid(&s, &GridRegion::square(10.0, 100).unwrap(), &ClassifyParams::default()).unwrap();
        assert_eq!(g.count(Label::Escaping), 0);
    }

    #[test]
    fn single_pixel_grid_is_point_verdict() {
        let s = exp_cyclic(1.0);
        let p = ClassifyParams::default();
        for center in [c(1.0, 0.0), c(-0.3, 2.0)] {
            let region = GridRegion::new(center - c(0.5, 0.5), center + c(0.5, 0.5), 1, 1).unwrap();
            let g = escaping_grid(&s, &region, &p).unwrap();
            assert_eq!(g.verdicts[0], classify_escaping(&s, center, &p).unwrap().label);
        }
    }

    #[test]
    fn union_of_squaring_hugs_unit_circle() {
        let region = GridRegion::square(2.0, 256).unwrap();
        let g = julia_grid_union(&squaring(), &region, &ClassifyParams::default()).unwrap();
        let h = region.pixel_size();
        let mut n = 0;
        for row in 0..256 {
            for col in 0..256 {
                if g.get(col, row) == Label::JuliaLike {
                    n += 1;
                    let r = region.pixel_center(col, row).norm();
                    assert!((r - 1.0).abs() <= 2.0 * h, "pixel at radius {r}");
                }
            }
        }
        assert!(n > 0);
        assert!(julia_grid_union(&exp_cyclic(1.0), &region, &ClassifyParams::default()).is_err());
    }

    #[test]
    fn union_is_monotone_in_word_length() {
        let s = Semigroup::new(
            "annulus",
            vec![
                HolomorphicMap::monomial(c(1.0, 0.0), 2).unwrap(),
                HolomorphicMap::monomial(c(0.5, 0.0), 2).unwrap(),
            ],
        )
        .unwrap();
        let region = GridRegion::square(3.0, 96).unwrap();
        let p = ClassifyParams {
            max_word_len: 4,
            ..Default::default()
        };
        let grids = julia_union_by_length(&s, &region, &p).unwrap();
        for pair in grids.windows(2) {
            for (a, b) in pair[0].verdicts.iter().zip(&pair[1].verdicts) {
                assert!(*a != Label::JuliaLike || *b == Label::JuliaLike);
            }
        }
        let direct = julia_grid_union(&s, &region, &ClassifyParams { max_word_len: 3, ..p }).unwrap();
        assert_eq!(direct.verdicts, grids[2].verdicts);
    }

    #[test]
    fn boundary_of_trivial_grids_is_empty() {
        let region = GridRegion::square(1.0, 8).unwrap();
        let p = ClassifyParams::default();
        for label in [Label::Escaping, Label::NonEscaping] {
            let g = GridClassification::new(region, GridSource::Escaping, vec![label; 64], p);
            let b = julia_from_escaping_boundary(&g).unwrap();
            assert_eq!(b.count(Label::JuliaLike), 0);
        }
        let wrong = GridClassification::new(region, GridSource::FatouJulia, vec![Label::FatouLike; 64], p);
        assert!(matches!(julia_from_escaping_boundary(&wrong), Err(Error::WrongSource(_))));
    }

    #[test]
    fn modes_are_bit_identical() {
        let s = Semigroup::new(
            "annulus",
            vec![
                HolomorphicMap::monomial(c(1.0, 0.0), 2).unwrap(),
                HolomorphicMap::monomial(c(0.5, 0.0), 2).unwrap(),
            ],
        )
        .unwrap();
        let region = GridRegion::square(3.0, 48).unwrap();
        let p = ClassifyParams::default();
        let a = fatou_julia_grid_with(&s, &region, &p, Exec::Sequential).unwrap();
        let b = fatou_julia_grid_with(&s, &region, &p, Exec::Parallel).unwrap();
        assert_eq!(a, b);
    }
}
