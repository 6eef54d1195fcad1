//! Scene files: one JSON document describing what to compute and how to draw
//! it.

use num_complex::Complex64;
use semidyn_core::classify::{ClassifyParams, GridRegion};
use semidyn_core::map::{HolomorphicMap, MapClass};
use semidyn_core::semigroup::Semigroup;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::ppm::{Palette, PaletteSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Escaping,
    FatouJulia,
    JuliaUnion,
    JuliaBoundary,
    BackwardOrbit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SemigroupSpec {
    #[serde(default)]
    pub label: String,
    pub generators: Vec<HolomorphicMap>,
}

fn default_points() -> usize {
    10_000
}

fn default_burn_in() -> usize {
    30
}

/// Backward-orbit settings, needed by `backward-orbit` scenes and `sample`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleSpec {
    pub z0: Complex64,
    #[serde(default = "default_points")]
    pub n_points: usize,
    #[serde(default = "default_burn_in")]
    pub burn_in: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scene {
    pub semigroup: SemigroupSpec,
    pub region: GridRegion,
    #[serde(default)]
    pub params: ClassifyParams,
    pub mode: Mode,
    #[serde(default)]
    pub palette: PaletteSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sample: Option<SampleSpec>,
}

/// A scene that passed every check, with its semigroup and palette built.
#[derive(Debug, Clone)]
pub struct ValidScene {
    pub scene: Scene,
    pub semigroup: Semigroup,
    pub palette: Palette,
}

impl Scene {
    pub fn parse(text: &str) -> CliResult<Scene> {
        serde_json::from_str(text).map_err(|e| CliError::Scene(e.to_string()))
    }

    /// Canonical form: pretty JSON with every default spelled out.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scene serializes")
    }

    /// Checks everything a command could trip over, before any work starts.
    pub fn validate(self) -> CliResult<ValidScene> {
        let label = if self.semigroup.label.is_empty() {
            "S".to_string()
        } else {
            self.semigroup.label.clone()
        };
        let semigroup = Semigroup::new(label, self.semigroup.generators.clone())?;
        self.region.validate()?;
        self.params.validate()?;
        let palette = self.palette.resolve()?;
        let needs = |class: MapClass, what: &str| -> CliResult<()> {
            if semigroup.class() == class {
                Ok(())
            } else {
                Err(CliError::Scene(format!("mode {what} needs a {class:?} semigroup")))
            }
        };
        match self.mode {
            Mode::Escaping => needs(MapClass::TranscendentalEntire, "escaping")?,
            Mode::JuliaBoundary => needs(MapClass::TranscendentalEntire, "julia-boundary")?,
            Mode::JuliaUnion => needs(MapClass::Rational, "julia-union")?,
            Mode::FatouJulia => {}
            Mode::BackwardOrbit => {
                self.sample_spec()?;
            }
        }
        if let Some(s) = &self.sample {
            if s.n_points == 0 {
                return Err(CliError::Scene("sample.n_points must be at least 1".into()));
            }
            if !(s.z0.re.is_finite() && s.z0.im.is_finite()) {
                return Err(CliError::Scene("sample.z0 must be finite".into()));
            }
        }
        Ok(ValidScene {
            scene: self,
            semigroup,
            palette,
        })
    }

    pub fn sample_spec(&self) -> CliResult<SampleSpec> {
        self.sample
            .ok_or_else(|| CliError::Scene("a `sample` object with `z0` is required for backward orbits".into()))
    }
}
