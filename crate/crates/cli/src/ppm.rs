//! Palettes and the binary PPM writer.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use semidyn_core::classify::{GridClassification, Label};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub type Rgb = [u8; 3];

/// One color per verdict label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Palette {
    colors: [Rgb; 5],
}

/// Built-in palette names.
pub const PALETTES: &[&str] = &["default", "grayscale"];

fn slot(label: Label) -> usize {
    match label {
        Label::Escaping => 0,
        Label::NonEscaping => 1,
        Label::FatouLike => 2,
        Label::JuliaLike => 3,
        Label::Undetermined => 4,
    }
}

impl Palette {
    pub fn named(name: &str) -> Option<Palette> {
        let colors = match name {
            "default" => [[215, 48, 39], [69, 117, 180], [8, 48, 107], [255, 237, 160], [128, 128, 128]],
            "grayscale" => [[255, 255, 255], [0, 0, 0], [48, 48, 48], [208, 208, 208], [128, 128, 128]],
            _ => return None,
        };
        Some(Palette { colors })
    }

    /// A palette from an explicit map; every label must be present.
    pub fn from_map(map: &BTreeMap<Label, Rgb>) -> CliResult<Palette> {
        let mut colors = [[0; 3]; 5];
        for label in Label::ALL {
            colors[slot(label)] = *map
                .get(&label)
                .ok_or_else(|| CliError::Scene(format!("palette has no color for {}", label.name())))?;
        }
        Ok(Palette { colors })
    }

    pub fn color(&self, label: Label) -> Rgb {
        self.colors[slot(label)]
    }
}

impl Default for Palette {
    fn default() -> Self {
        Palette::named("default").expect("built-in palette")
    }
}

/// A palette as written in a scene: a built-in name or a full label map.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PaletteSpec {
    Named(String),
    Custom(BTreeMap<Label, Rgb>),
}

impl Default for PaletteSpec {
    fn default() -> Self {
        PaletteSpec::Named("default".into())
    }
}

impl PaletteSpec {
    pub fn resolve(&self) -> CliResult<Palette> {
        match self {
            PaletteSpec::Named(name) => Palette::named(name).ok_or_else(|| {
                CliError::Scene(format!("unknown palette `{name}` (built-in: {})", PALETTES.join(", ")))
            }),
            PaletteSpec::Custom(map) => Palette::from_map(map),
        }
    }
}

/// The complete P6 file: header, one comment line describing the grid, then
/// rows from the top of the region down.
pub fn encode(g: &GridClassification, palette: &Palette) -> Vec<u8> {
    let params = serde_json::to_string(&g.params).expect("params serialize");
    let header = format!(
        "P6\n# semidyn source={:?} params={}\n{} {}\n255\n",
        g.source, params, g.region.width, g.region.height
    );
    let mut bytes = Vec::with_capacity(header.len() + 3 * g.verdicts.len());
    bytes.extend_from_slice(header.as_bytes());
    for label in &g.verdicts {
        bytes.extend_from_slice(&palette.color(*label));
    }
    bytes
}

pub fn emit_image(g: &GridClassification, palette: &Palette, path: &Path) -> CliResult<()> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut out = BufWriter::new(file);
    out.write_all(&encode(g, palette))
        .and_then(|_| out.flush())
        .map_err(|e| CliError::io(path, e))
}
