//! Registry of named identity checks, a bounded-parallel suite runner and
//! report documents.

mod registry;

use std::collections::BTreeMap;
use std::fmt;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hp::{PrecisionContext, Rational};
use crate::report::{IdentityReport, Verdict};

pub use registry::{registry, REQUIRED_ANCHORS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    PaperCore,
    Conjectures,
    SeriesExact,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 4] = ["paper-core", "conjectures", "series-exact", "all"];

    /// Suggested working digits.
    pub fn default_digits(self) -> u32 {
        match self {
            Suite::Conjectures => 300,
            Suite::SeriesExact => 50,
            Suite::PaperCore | Suite::All => 120,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Suite::PaperCore => "paper-core",
            Suite::Conjectures => "conjectures",
            Suite::SeriesExact => "series-exact",
            Suite::All => "all",
        };
        f.write_str(name)
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper-core" => Ok(Suite::PaperCore),
            "conjectures" => Ok(Suite::Conjectures),
            "series-exact" => Ok(Suite::SeriesExact),
            "all" => Ok(Suite::All),
            other => Err(Error::Parse(format!(
                "unknown suite {other:?}; expected one of {}",
                Suite::NAMES.join(", ")
            ))),
        }
    }
}

type Runner = Arc<dyn Fn(PrecisionContext) -> Result<IdentityReport> + Send + Sync>;

/// One registered identity with its parameters.
#[derive(Clone)]
pub struct IdentityCheck {
    pub id: String,
    pub params: BTreeMap<String, Rational>,
    /// Minimum working digits; a suite run never goes below this.
    pub digits: u32,
    pub suites: Vec<Suite>,
    /// Equations and theorems this check exercises, e.g. "eq39", "thm4".
    pub anchors: Vec<&'static str>,
    /// Measured but never asserted.
    pub recorded: bool,
    run: Runner,
}

impl fmt::Debug for IdentityCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IdentityCheck")
            .field("id", &self.id)
            .field("params", &self.params)
            .field("digits", &self.digits)
            .field("suites", &self.suites)
            .field("anchors", &self.anchors)
            .field("recorded", &self.recorded)
            .finish()
    }
}

impl IdentityCheck {
    pub fn new<F>(id: impl Into<String>, suites: &[Suite], anchors: &[&'static str], run: F) -> Self
    where
        F: Fn(PrecisionContext) -> Result<IdentityReport> + Send + Sync + 'static,
    {
        Self {
            id: id.into(),
            params: BTreeMap::new(),
            digits: 50,
            suites: suites.to_vec(),
            anchors: anchors.to_vec(),
            recorded: false,
            run: Arc::new(run),
        }
    }

    pub fn param(mut self, name: &str, value: Rational) -> Self {
        self.params.insert(name.to_string(), value);
        self
    }

    pub fn min_digits(mut self, digits: u32) -> Self {
        self.digits = digits;
        self
    }

    pub fn recorded(mut self) -> Self {
        self.recorded = true;
        self
    }

    pub fn in_suite(&self, suite: Suite) -> bool {
        suite == Suite::All || self.suites.contains(&suite)
    }

    /// Runs the check; errors and panics become failing reports.
    pub fn run(&self, digits: u32) -> IdentityReport {
        let start = Instant::now();
        let digits = digits.max(self.digits);
        let outcome = PrecisionContext::new(digits).and_then(|ctx| {
            catch_unwind(AssertUnwindSafe(|| (self.run)(ctx))).unwrap_or_else(|p| {
                Err(Error::Convergence(format!(
                    "check panicked: {}",
                    panic_message(&p)
                )))
            })
        });
        let tol = digits.saturating_sub(crate::hp::context::DEFAULT_GUARD);
        let mut report = match outcome {
            Ok(r) => r,
            Err(e) => IdentityReport::error(&self.id, &e, tol),
        };
        report.id = self.id.clone();
        if self.recorded
            && report
                .note
                .as_deref()
                .is_none_or(|n| !n.starts_with("error"))
        {
            report = report.recorded();
        }
        report.wall_time_ms = start.elapsed().as_millis() as u64;
        report
    }
}

fn panic_message(p: &Box<dyn std::any::Any + Send>) -> String {
    if let Some(s) = p.downcast_ref::<&str>() {
        (*s).to_string()
    } else if let Some(s) = p.downcast_ref::<String>() {
        s.clone()
    } else {
        "unknown panic".into()
    }
}

/// Runs every check of the suite on at most `parallelism` threads.
/// Reports come back in registry order.
pub fn run_suite(suite: Suite, digits: u32, parallelism: usize) -> Result<Vec<IdentityReport>> {
    if digits < 50 {
        return Err(Error::Precision(format!(
            "suites need at least 50 digits, got {digits}"
        )));
    }
    let checks: Vec<IdentityCheck> = registry()
        .into_iter()
        .filter(|c| c.in_suite(suite))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(parallelism.max(1))
        .build()
        .map_err(|e| Error::Domain(format!("thread pool: {e}")))?;
    Ok(pool.install(|| checks.par_iter().map(|c| c.run(digits)).collect()))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub recorded: usize,
}

impl Summary {
    pub fn of(reports: &[IdentityReport]) -> Self {
        let mut s = Summary::default();
        for r in reports {
            match r.verdict {
                Verdict::Pass => s.pass += 1,
                Verdict::Fail => s.fail += 1,
                Verdict::Recorded => s.recorded += 1,
            }
        }
        s
    }
}

/// The document written by [`emit_report`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub digits: u32,
    pub checks: Vec<IdentityReport>,
    pub summary: Summary,
}

impl SuiteReport {
    pub fn new(suite: &str, digits: u32, checks: Vec<IdentityReport>) -> Self {
        let summary = Summary::of(&checks);
        Self {
            suite: suite.to_string(),
            digits,
            checks,
            summary,
        }
    }

    pub fn parse(json: &str) -> Result<Self> {
        serde_json::from_str(json).map_err(|e| Error::Parse(format!("report: {e}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Json,
    Text,
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "pass",
        Verdict::Fail => "fail",
        Verdict::Recorded => "recorded",
    }
}

pub fn emit_report(
    suite: &str,
    digits: u32,
    reports: &[IdentityReport],
    format: ReportFormat,
) -> String {
    let doc = SuiteReport::new(suite, digits, reports.to_vec());
    match format {
        ReportFormat::Json => serde_json::to_string_pretty(&doc).expect("report serializes"),
        ReportFormat::Text => text_table(&doc),
    }
}

fn text_table(doc: &SuiteReport) -> String {
    let header = ["id", "verdict", "abs_difference", "tolerance", "ms"];
    let rows: Vec<[String; 5]> = doc
        .checks
        .iter()
        .map(|r| {
            [
                r.id.clone(),
                verdict_name(r.verdict).to_string(),
                r.abs_difference.clone(),
                r.tolerance.clone(),
                r.wall_time_ms.to_string(),
            ]
        })
        .collect();
    let mut widths = header.map(str::len);
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: &[&str]| -> String {
        let mut s = String::new();
        for (i, (cell, w)) in cells.iter().zip(widths).enumerate() {
            if i > 0 {
                s.push_str("  ");
            }
            if i == 4 {
                s.push_str(&format!("{cell:>w$}"));
            } else {
                s.push_str(&format!("{cell:<w$}"));
            }
        }
        s.trim_end().to_string()
    };
    let mut out = format!("suite {} at {} digits\n", doc.suite, doc.digits);
    out.push_str(&line(&header));
    out.push('\n');
    for row in &rows {
        let cells: Vec<&str> = row.iter().map(String::as_str).collect();
        out.push_str(&line(&cells));
        out.push('\n');
    }
    for r in &doc.checks {
        if let Some(note) = &r.note {
            out.push_str(&format!("note {}: {note}\n", r.id));
        }
    }
    out.push_str(&format!(
        "summary: pass {}, fail {}, recorded {}\n",
        doc.summary.pass, doc.summary.fail, doc.summary.recorded
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn suite_names_round_trip() {
        for name in Suite::NAMES {
            assert_eq!(name.parse::<Suite>().unwrap().to_string(), name);
        }
        assert!(matches!("core".parse::<Suite>(), Err(Error::Parse(_))));
    }

    #[test]
    fn ids_are_unique_and_suites_nonempty() {
        let reg = registry();
        let mut seen = HashSet::new();
        for c in &reg {
            assert!(seen.insert(c.id.clone()), "duplicate id {}", c.id);
            assert!(!c.suites.is_empty(), "{} is in no suite", c.id);
            assert!(!c.anchors.is_empty(), "{} has no anchor", c.id);
        }
    }

    fn series_run() -> Vec<IdentityReport> {
        let mut reports = run_suite(Suite::SeriesExact, 50, 3).unwrap();
        for r in &mut reports {
            r.wall_time_ms = 0;
        }
        reports
    }

    #[test]
    fn runs_are_deterministic() {
        let a = emit_report("series-exact", 50, &series_run(), ReportFormat::Json);
        let b = emit_report("series-exact", 50, &series_run(), ReportFormat::Json);
        assert_eq!(a, b);
    }

    #[test]
    fn json_report_round_trips() {
        let reports = series_run();
        let json = emit_report("series-exact", 50, &reports, ReportFormat::Json);
        let parsed = SuiteReport::parse(&json).unwrap();
        assert_eq!(parsed, SuiteReport::new("series-exact", 50, reports));
        assert_eq!(parsed.summary.fail, 0);
        assert!(SuiteReport::parse("{}").is_err());
    }

    #[test]
    fn every_anchor_is_covered() {
        let covered: HashSet<&str> = registry().iter().flat_map(|c| c.anchors.clone()).collect();
        let missing: Vec<_> = REQUIRED_ANCHORS
            .iter()
            .filter(|a| !covered.contains(*a))
            .collect();
        assert!(missing.is_empty(), "uncovered anchors {missing:?}");
    }

    #[test]
    fn empty_report() {
        let doc = SuiteReport::parse(&emit_report("all", 120, &[], ReportFormat::Json)).unwrap();
        assert_eq!(doc.summary, Summary::default());
        assert!(
            emit_report("all", 120, &[], ReportFormat::Text).contains("pass 0, fail 0, recorded 0")
        );
    }

    #[test]
    fn low_digits_rejected() {
        assert!(matches!(
            run_suite(Suite::SeriesExact, 40, 1),
            Err(Error::Precision(_))
        ));
    }

    #[test]
    fn failing_check_does_not_abort() {
        let c = IdentityCheck::new("boom", &[Suite::PaperCore], &["eq1"], |_| {
            Err(Error::Domain("nope".into()))
        });
        let r = c.run(60);
        assert_eq!(r.verdict, Verdict::Fail);
        assert!(r.note.unwrap().contains("nope"));
        let p = IdentityCheck::new("panic", &[Suite::PaperCore], &["eq1"], |_| {
            panic!("bad index")
        });
        assert!(p.run(60).note.unwrap().contains("bad index"));
    }
}
