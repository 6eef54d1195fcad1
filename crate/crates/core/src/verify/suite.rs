use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;

use super::{
    verify_boundary_identity, verify_containments, verify_known_example, verify_union_identity, Report, EXAMPLES,
};
use crate::classify::{ClassifyParams, GridRegion};
use crate::error::{Error, Result};
use crate::map::{HolomorphicMap, Sign};
use crate::semigroup::Semigroup;

/// Checks run by [`run_suite`], in order: every built-in example, then the
/// grid-level set-identity checks on fixed scenes.
pub const SUITE: &[&str] = &[
    "annulus",
    "power-components",
    "circle-radii",
    "empty-escaping",
    "exp-dichotomy",
    "perfectness-proxy",
    "multiply-connected",
    "containments-annulus",
    "containments-exp-pair",
    "containments-exp-escaping",
    "union-identity-annulus",
    "boundary-identity-exp",
];

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteEntry {
    pub name: String,
    pub outcome: Result<Report>,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn annulus() -> Result<Semigroup> {
    Semigroup::new(
        "annulus",
        vec![
            HolomorphicMap::monomial(c(1.0, 0.0), 2)?,
            HolomorphicMap::monomial(c(0.5, 0.0), 2)?,
        ],
    )
}

/// `⟨e^{λz}, e^{λz} + 2πi/λ⟩` at `λ = 0.3`. Its escaping set is nonempty
/// and lies to the right of the repelling real fixed point near 5.9.
fn exp_escaping() -> Result<Semigroup> {
    let l = 0.3;
    Semigroup::new(
        "exp-escaping",
        vec![
            HolomorphicMap::exp(c(l, 0.0))?,
            HolomorphicMap::exp_affine(Sign::Plus, c(l, 0.0), c(0.0, 0.0), c(0.0, TAU / l))?,
        ],
    )
}

fn exp_escaping_region(n: usize) -> Result<GridRegion> {
    GridRegion::new(c(0.0, -12.0), c(24.0, 12.0), n, n)
}

/// Runs one named suite check with its fixed scene.
pub fn run_check(name: &str) -> Result<Report> {
    let p = ClassifyParams::default();
    let mut report = match name {
        id if EXAMPLES.contains(&id) => return verify_known_example(id, &BTreeMap::new()),
        "containments-annulus" => verify_containments(&annulus()?, &GridRegion::square(3.0, 256)?, &p)?,
        "containments-exp-pair" => {
            let s = Semigroup::new(
                "exp-pair",
                vec![HolomorphicMap::exp(c(1.0, 0.0))?, HolomorphicMap::exp(c(-1.0, 0.0))?],
            )?;
            verify_containments(&s, &GridRegion::square(4.0, 64)?, &p)?
        }
        "containments-exp-escaping" => verify_containments(&exp_escaping()?, &exp_escaping_region(96)?, &p)?,
        "union-identity-annulus" => verify_union_identity(&annulus()?, &GridRegion::square(3.0, 512)?, &p)?,
        "boundary-identity-exp" => verify_boundary_identity(&exp_escaping()?, &exp_escaping_region(128)?, &p)?,
        other => return Err(Error::UnknownExample(other.to_string())),
    };
    report.name = name.to_string();
    Ok(report)
}

/// Every check in [`SUITE`]. Failures to run are kept per entry.
pub fn run_suite() -> Vec<SuiteEntry> {
    SUITE
        .iter()
        .map(|name| SuiteEntry {
            name: name.to_string(),
            outcome: run_check(name),
        })
        .collect()
}
