use std::collections::HashMap;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use super::ClassifyParams;
use crate::error::{Error, Result};
use crate::rng::{self, derive_seed};
use crate::roots::DEDUP_TOL;
use crate::semigroup::Semigroup;

/// Stream id of the backward walk under the root seed.
const WALK_STREAM: u64 = 0xB4C6_3A1D;

/// Consecutive dead ends tolerated before giving up.
const MAX_CONSECUTIVE_DEAD_ENDS: usize = 1_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BackwardCloud {
    pub points: Vec<Complex64>,
    /// Walks that hit an empty preimage set and restarted from `z0`.
    pub dead_ends: usize,
}

/// Random inverse iteration.
///
/// Each step picks a generator uniformly, then one of its preimages of the
/// current point uniformly (transcendental branches `k ∈ [-K, K]`). The first
/// `burn_in` points are discarded and the next `n_points` returned; each
/// returned point maps onto its predecessor under the chosen generator.
/// `z0` should not be exceptional, or the cloud stays finite.
pub fn backward_orbit_sample(
    s: &Semigroup,
    z0: Complex64,
    n_points: usize,
    burn_in: usize,
    p: &ClassifyParams,
) -> Result<BackwardCloud> {
    if n_points == 0 {
        return Err(Error::InvalidParams("n_points must be at least 1".into()));
    }
    let mut rng = rng::stream(derive_seed(p.seed, &[WALK_STREAM]));
    let k = s.len();
    let mut points = Vec::with_capacity(n_points);
    let mut dead_ends = 0;
    let mut consecutive = 0;
    let mut current = z0;
    let mut step = 0usize;
    while points.len() < n_points {
        let g = rng.random_range(0..k);
        let pre = s.generator(g).preimages(current, p.branch_window)?;
        if pre.is_empty() {
            dead_ends += 1;
            consecutive += 1;
            if consecutive > MAX_CONSECUTIVE_DEAD_ENDS {
                return Err(Error::DeadEnd { restarts: consecutive });
            }
            current = z0;
            continue;
        }
        consecutive = 0;
        current = pre[rng.random_range(0..pre.len())];
        step += 1;
        if step > burn_in {
            points.push(current);
        }
    }
    Ok(BackwardCloud { points, dead_ends })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ExceptionalOutcome {
    /// The backward closure stabilised on these points.
    Finite(Vec<Complex64>),
    /// Still growing when the probe stopped; carries the point count.
    InfiniteEvidence(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExceptionalProbe {
    pub outcome: ExceptionalOutcome,
    /// Levels explored.
    pub levels: usize,
    /// For polynomial semigroups `∞` is exceptional too; it is never
    /// enumerated, only flagged here.
    pub infinity_exceptional: bool,
}

/// Breadth-first closure of `z` under all generator preimages.
pub fn exceptional_probe(
    s: &Semigroup,
    z: Complex64,
    max_depth: usize,
    cap: usize,
    branch_window: usize,
) -> Result<ExceptionalProbe> {
    if cap == 0 {
        return Err(Error::InvalidParams("cap must be at least 1".into()));
    }
    let infinity_exceptional = s.is_polynomial();
    let mut seen = PointSet::default();
    seen.insert(z);
    let mut frontier = vec![z];
    let mut levels = 0;
    while !frontier.is_empty() && levels < max_depth {
        levels += 1;
        let mut next = Vec::new();
        for &w in &frontier {
            for g in s.generators() {
                for q in g.preimages(w, branch_window)? {
                    if seen.insert(q) {
                        next.push(q);
                        if seen.len() > cap {
                            return Ok(ExceptionalProbe {
                                outcome: ExceptionalOutcome::InfiniteEvidence(seen.len()),
                                levels,
                                infinity_exceptional,
                            });
                        }
                    }
                }
            }
        }
        frontier = next;
    }
    let outcome = if frontier.is_empty() {
        ExceptionalOutcome::Finite(seen.points)
    } else {
        ExceptionalOutcome::InfiniteEvidence(seen.len())
    };
    Ok(ExceptionalProbe {
        outcome,
        levels,
        infinity_exceptional,
    })
}

/// Points deduplicated at [`DEDUP_TOL`] via a cell hash.
#[derive(Default)]
struct PointSet {
    points: Vec<Complex64>,
    cells: HashMap<(i64, i64), Vec<usize>>,
}

impl PointSet {
    fn cell(z: Complex64) -> (i64, i64) {
        ((z.re / DEDUP_TOL).floor() as i64, (z.im / DEDUP_TOL).floor() as i64)
    }

    fn len(&self) -> usize {
        self.points.len()
    }

    /// Inserts unless a point within tolerance exists; true if inserted.
    fn insert(&mut self, z: Complex64) -> bool {
        let (cx, cy) = Self::cell(z);
        for dx in -1..=1i64 {
            for dy in -1..=1i64 {
                let key = (cx.saturating_add(dx), cy.saturating_add(dy));
                if let Some(ids) = self.cells.get(&key) {
                    if ids.iter().any(|&i| (self.points[i] - z).norm() <= DEDUP_TOL) {
                        return false;
                    }
                }
            }
        }
        self.cells.entry((cx, cy)).or_default().push(self.points.len());
        self.points.push(z);
        true
    }
}
