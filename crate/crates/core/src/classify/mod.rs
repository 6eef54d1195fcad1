//! Point and grid classification into escaping, Fatou-like and Julia-like
//! sets, backward-orbit sampling and exceptional-point probing.
//!
//! Normality cannot be decided from finite data, so the Fatou/Julia verdicts
//! are operational: a point is Julia-like when the tested orbits disagree
//! (some diverge, some stay bounded) or when the spherical derivative of
//! some tested word iterate blows up (Marty's criterion). Escaping requires
//! every tested cyclic word orbit *and* every random sequence orbit to
//! diverge.

mod backward;
mod grid;
mod point;
mod strips;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::semigroup::{DEFAULT_ESCAPE_RADIUS, DEFAULT_WORD_CAP};

pub use backward::{backward_orbit_sample, exceptional_probe, BackwardCloud, ExceptionalOutcome, ExceptionalProbe};
pub use grid::{
    escaping_grid, escaping_grid_with, fatou_julia_grid, fatou_julia_grid_with, julia_from_escaping_boundary,
    julia_grid_union, julia_grid_union_with, julia_union_by_length,
};
pub use point::{classify_escaping, classify_fatou_julia, classify_fatou_julia_at_scale};
pub(crate) use point::Prepared;
pub use strips::{strip_membership, StripFamily};

/// Fidelity knobs for definitions that quantify over all of `S`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifyParams {
    /// Longest cyclic word tested.
    pub max_word_len: usize,
    /// Number of random sequences `M`.
    pub n_sequences: usize,
    /// Orbit depth `D`.
    pub depth: usize,
    /// Escape radius `R`.
    pub escape_radius: f64,
    /// Bounded-fate radius `B`; a bounded orbit ending beyond it is a slow
    /// escape and proves nothing.
    pub bound_radius: f64,
    /// Derivative blow-up threshold `T`.
    pub deriv_threshold: f64,
    /// Transcendental preimage branch window `K`.
    pub branch_window: usize,
    pub seed: u64,
    /// Cap on enumerated words.
    pub word_cap: usize,
}

impl Default for ClassifyParams {
    fn default() -> Self {
        ClassifyParams {
            max_word_len: 6,
            n_sequences: 32,
            depth: 64,
            escape_radius: DEFAULT_ESCAPE_RADIUS,
            bound_radius: 1e4,
            deriv_threshold: 1e8,
            branch_window: 3,
            seed: 0,
            word_cap: DEFAULT_WORD_CAP,
        }
    }
}

impl ClassifyParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParams(m.to_string()));
        if self.max_word_len < 1 {
            return bad("max_word_len must be at least 1");
        }
        if self.n_sequences < 1 {
            return bad("n_sequences must be at least 1");
        }
        if self.depth < 1 {
            return bad("depth must be at least 1");
        }
        if !(self.bound_radius > 0.0 && self.escape_radius > self.bound_radius) || !self.escape_radius.is_finite() {
            return bad("need escape_radius > bound_radius > 0");
        }
        if self.deriv_threshold.is_nan() || self.deriv_threshold <= 1.0 {
            return bad("deriv_threshold must exceed 1");
        }
        if self.word_cap < 1 {
            return bad("word_cap must be at least 1");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    Escaping,
    NonEscaping,
    FatouLike,
    JuliaLike,
    Undetermined,
}

impl Label {
    pub const ALL: [Label; 5] = [
        Label::Escaping,
        Label::NonEscaping,
        Label::FatouLike,
        Label::JuliaLike,
        Label::Undetermined,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Label::Escaping => "Escaping",
            Label::NonEscaping => "NonEscaping",
            Label::FatouLike => "FatouLike",
            Label::JuliaLike => "JuliaLike",
            Label::Undetermined => "Undetermined",
        }
    }
}

/// What the verdict rests on. Counts cover only the orbits run before the
/// verdict was settled.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Evidence {
    pub divergent: u32,
    pub bounded: u32,
    /// Bounded at depth but ending outside the bound radius.
    pub slow: u32,
    /// Natural log of the largest spherical derivative seen along a tested
    /// word orbit.
    pub max_log_derivative: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointVerdict {
    pub label: Label,
    pub evidence: Evidence,
}

/// A rectangle of pixels. Pixel `(col, row)` is the center of its cell and
/// row 0 is at the top (largest imaginary part).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridRegion {
    pub min: Complex64,
    pub max: Complex64,
    pub width: usize,
    pub height: usize,
}

impl GridRegion {
    pub fn new(min: Complex64, max: Complex64, width: usize, height: usize) -> Result<Self> {
        let g = GridRegion { min, max, width, height };
        g.validate()?;
        Ok(g)
    }

    /// `[-r, r]²` at `n × n`.
    pub fn square(r: f64, n: usize) -> Result<Self> {
        GridRegion::new(Complex64::new(-r, -r), Complex64::new(r, r), n, n)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.min.re < self.max.re
            && self.min.im < self.max.im
            && [self.min.re, self.min.im, self.max.re, self.max.im].iter().all(|v| v.is_finite())
            && self.width >= 1
            && self.height >= 1;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParams(
                "region needs min < max componentwise and at least one pixel".into(),
            ))
        }
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dx(&self) -> f64 {
        (self.max.re - self.min.re) / self.width as f64
    }

    pub fn dy(&self) -> f64 {
        (self.max.im - self.min.im) / self.height as f64
    }

    /// Larger side of a pixel cell.
    pub fn pixel_size(&self) -> f64 {
        self.dx().max(self.dy())
    }

    pub fn pixel_center(&self, col: usize, row: usize) -> Complex64 {
        Complex64::new(
            self.min.re + (col as f64 + 0.5) * self.dx(),
            self.max.im - (row as f64 + 0.5) * self.dy(),
        )
    }

    pub fn center_of_index(&self, index: usize) -> Complex64 {
        self.pixel_center(index % self.width, index / self.width)
    }

    /// Pixel containing `z`, if inside the region.
    pub fn locate(&self, z: Complex64) -> Option<(usize, usize)> {
        let col = ((z.re - self.min.re) / self.dx()).floor();
        let row = ((self.max.im - z.im) / self.dy()).floor();
        if col < 0.0 || row < 0.0 || col >= self.width as f64 || row >= self.height as f64 {
            return None;
        }
        Some((col as usize, row as usize))
    }
}

/// Which estimator produced a grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GridSource {
    Escaping,
    FatouJulia,
    JuliaUnion,
    EscapingBoundary,
    BackwardOrbit,
}

/// Per-pixel verdicts in row-major order, with a params echo.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridClassification {
    pub region: GridRegion,
    pub source: GridSource,
    pub verdicts: Vec<Label>,
    pub params: ClassifyParams,
}

impl GridClassification {
    pub fn new(region: GridRegion, source: GridSource, verdicts: Vec<Label>, params: ClassifyParams) -> Self {
        assert_eq!(verdicts.len(), region.len(), "verdict count must equal width × height");
        GridClassification {
            region,
            source,
            verdicts,
            params,
        }
    }

    pub fn get(&self, col: usize, row: usize) -> Label {
        self.verdicts[row * self.region.width + col]
    }

    pub fn count(&self, label: Label) -> usize {
        self.verdicts.iter().filter(|&&l| l == label).count()
    }

    /// Boolean mask of pixels carrying `label`.
    pub fn mask(&self, label: Label) -> Vec<bool> {
        self.verdicts.iter().map(|&l| l == label).collect()
    }
}

/// Pixels whose flag differs from at least one 4-neighbor.
pub(crate) fn boundary_mask(flags: &[bool], width: usize, height: usize) -> Vec<bool> {
    let mut out = vec![false; flags.len()];
    for row in 0..height {
        for col in 0..width {
            let i = row * width + col;
            let f = flags[i];
            let differs = (col > 0 && flags[i - 1] != f)
                || (col + 1 < width && flags[i + 1] != f)
                || (row > 0 && flags[i - width] != f)
                || (row + 1 < height && flags[i + width] != f);
            out[i] = differs;
        }
    }
    out
}
