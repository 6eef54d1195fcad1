//! Pass/fail reports that check grid classifications against set identities
//! and closed-form examples.
//!
//! Every check is grid-level with a fixed slack, because the classifier's
//! verdicts are heuristic. A report carries its metrics, the thresholds they
//! are judged by and the full parameter echo, so `passed` can always be
//! recomputed from the report alone.

mod examples;
pub mod metrics;
mod suite;
mod theorems;

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::classify::ClassifyParams;

pub use examples::{verify_known_example, EXAMPLES};
pub use suite::{run_check, run_suite, SuiteEntry, SUITE};
pub use theorems::{
    boundary_identity_report, verify_boundary_identity, verify_containments, verify_union_identity,
    CONTAINMENT_SLACK, UNION_HAUSDORFF_PX, UNION_SYMDIFF_SLACK,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Cmp {
    AtMost,
    AtLeast,
}

impl Cmp {
    fn symbol(self) -> &'static str {
        match self {
            Cmp::AtMost => "<=",
            Cmp::AtLeast => ">=",
        }
    }
}

/// `metric cmp bound`, e.g. `mismatch_rate <= 0.02`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Threshold {
    pub metric: String,
    pub cmp: Cmp,
    pub bound: f64,
}

impl Threshold {
    /// A missing or NaN value never satisfies a threshold.
    pub fn holds(&self, value: Option<f64>) -> bool {
        match (value, self.cmp) {
            (Some(v), Cmp::AtMost) => v <= self.bound,
            (Some(v), Cmp::AtLeast) => v >= self.bound,
            (None, _) => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub name: String,
    pub passed: bool,
    pub metrics: BTreeMap<String, f64>,
    pub thresholds: Vec<Threshold>,
    pub params: ClassifyParams,
    /// Scenario settings beyond `params` (example overrides, region, ...).
    pub settings: BTreeMap<String, String>,
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(name: impl Into<String>, params: ClassifyParams) -> Self {
        Report {
            name: name.into(),
            passed: false,
            metrics: BTreeMap::new(),
            thresholds: Vec::new(),
            params,
            settings: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    pub fn metric(&mut self, name: impl Into<String>, value: f64) -> &mut Self {
        self.metrics.insert(name.into(), value);
        self
    }

    pub fn threshold(&mut self, metric: impl Into<String>, cmp: Cmp, bound: f64) -> &mut Self {
        self.thresholds.push(Threshold {
            metric: metric.into(),
            cmp,
            bound,
        });
        self
    }

    /// Records `value` and requires it to satisfy `cmp bound`.
    pub fn checked(&mut self, name: &str, value: f64, cmp: Cmp, bound: f64) -> &mut Self {
        self.metric(name, value).threshold(name, cmp, bound)
    }

    /// Records a yes/no outcome as 1 or 0 and requires it to be 1.
    pub fn require(&mut self, name: &str, ok: bool) -> &mut Self {
        self.checked(name, if ok { 1.0 } else { 0.0 }, Cmp::AtLeast, 1.0)
    }

    pub fn setting(&mut self, key: impl Into<String>, value: impl fmt::Display) -> &mut Self {
        self.settings.insert(key.into(), value.to_string());
        self
    }

    pub fn note(&mut self, text: impl Into<String>) -> &mut Self {
        self.notes.push(text.into());
        self
    }

    /// Whether every threshold holds. A report without thresholds passes.
    pub fn evaluate(&self) -> bool {
        self.thresholds
            .iter()
            .all(|t| t.holds(self.metrics.get(&t.metric).copied().filter(|v| !v.is_nan())))
    }

    /// Fixes `passed` from the current metrics and thresholds.
    pub fn finish(mut self) -> Self {
        self.passed = self.evaluate();
        self
    }
}

/// The line-oriented text form: a status line, then one line per metric,
/// threshold, setting, parameter and note, each group in a fixed order.
impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "report {} {}", self.name, if self.passed { "PASS" } else { "FAIL" })?;
        for (k, v) in &self.metrics {
            writeln!(f, "  metric {k} = {v}")?;
        }
        for t in &self.thresholds {
            let ok = t.holds(self.metrics.get(&t.metric).copied().filter(|v| !v.is_nan()));
            writeln!(
                f,
                "  threshold {} {} {} {}",
                t.metric,
                t.cmp.symbol(),
                t.bound,
                if ok { "ok" } else { "violated" }
            )?;
        }
        for (k, v) in &self.settings {
            writeln!(f, "  setting {k} = {v}")?;
        }
        let p = &self.params;
        let params: [(&str, String); 9] = [
            ("max_word_len", p.max_word_len.to_string()),
            ("n_sequences", p.n_sequences.to_string()),
            ("depth", p.depth.to_string()),
            ("escape_radius", p.escape_radius.to_string()),
            ("bound_radius", p.bound_radius.to_string()),
            ("deriv_threshold", p.deriv_threshold.to_string()),
            ("branch_window", p.branch_window.to_string()),
            ("seed", p.seed.to_string()),
            ("word_cap", p.word_cap.to_string()),
        ];
        for (k, v) in params {
            writeln!(f, "  param {k} = {v}")?;
        }
        for n in &self.notes {
            writeln!(f, "  note {n}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn passed_follows_thresholds() {
        let mut r = Report::new("t", ClassifyParams::default());
        r.checked("rate", 0.01, Cmp::AtMost, 0.02);
        assert!(r.clone().finish().passed);
        r.checked("count", 3.0, Cmp::AtLeast, 4.0);
        assert!(!r.clone().finish().passed);
    }

    #[test]
    fn missing_or_nan_metric_fails() {
        let mut r = Report::new("t", ClassifyParams::default());
        r.threshold("absent", Cmp::AtMost, 1.0);
        assert!(!r.evaluate());
        let mut r = Report::new("t", ClassifyParams::default());
        r.checked("nan", f64::NAN, Cmp::AtMost, 1.0);
        assert!(!r.evaluate());
    }

    #[test]
    fn text_form_lists_everything() {
        let mut r = Report::new("demo", ClassifyParams::default());
        r.checked("rate", 0.5, Cmp::AtMost, 0.25).setting("a", 2).note("hello");
        let text = r.finish().to_string();
        assert!(text.starts_with("report demo FAIL\n"));
        assert!(text.contains("  metric rate = 0.5\n"));
        assert!(text.contains("  threshold rate <= 0.25 violated\n"));
        assert!(text.contains("  setting a = 2\n"));
        assert!(text.contains("  param depth = 64\n"));
        assert!(text.ends_with("  note hello\n"));
    }
}
