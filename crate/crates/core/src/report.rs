//! Verification reports: an ordered list of named check outcomes plus the
//! exact quantities they compared, serializable to stable JSON.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::rational::{rat_display, RatJson, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub verdict: Verdict,
    pub detail: String,
}

impl CheckOutcome {
    pub fn pass(name: impl Into<String>, detail: impl Into<String>) -> Self {
        CheckOutcome {
            name: name.into(),
            verdict: Verdict::Pass,
            detail: detail.into(),
        }
    }

    pub fn fail(name: impl Into<String>, detail: impl Into<String>) -> Self {
        CheckOutcome {
            name: name.into(),
            verdict: Verdict::Fail,
            detail: detail.into(),
        }
    }

    pub fn skipped(name: impl Into<String>, reason: impl Into<String>) -> Self {
        CheckOutcome {
            name: name.into(),
            verdict: Verdict::Skipped,
            detail: reason.into(),
        }
    }

    /// Pass/fail from an exact comparison, with both sides in the detail.
    pub fn equality(name: impl Into<String>, lhs: Rational, rhs: Rational) -> Self {
        let detail = format!("{} == {}", rat_display(&lhs), rat_display(&rhs));
        if lhs == rhs {
            CheckOutcome::pass(name, detail)
        } else {
            CheckOutcome::fail(
                name,
                format!("{} != {}", rat_display(&lhs), rat_display(&rhs)),
            )
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub scenario: String,
    pub dim: usize,
    pub group_order: usize,
    pub checks: Vec<CheckOutcome>,
    /// Named exact quantities (chi values, index sums, chain terms).
    pub quantities: BTreeMap<String, RatJson>,
    pub passed: bool,
}

impl VerificationReport {
    pub fn new(scenario: impl Into<String>, dim: usize, group_order: usize) -> Self {
        VerificationReport {
            scenario: scenario.into(),
            dim,
            group_order,
            checks: Vec::new(),
            quantities: BTreeMap::new(),
            passed: true,
        }
    }

    pub fn push(&mut self, outcome: CheckOutcome) {
        if outcome.verdict == Verdict::Fail {
            self.passed = false;
        }
        self.checks.push(outcome);
    }

    pub fn record(&mut self, key: impl Into<String>, value: Rational) {
        self.quantities.insert(key.into(), RatJson(value));
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Plain-text rendering: one aligned line per check.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "scenario {} (dim {}, group order {})",
            self.scenario, self.dim, self.group_order
        );
        for c in &self.checks {
            let tag = match c.verdict {
                Verdict::Pass => "PASS",
                Verdict::Fail => "FAIL",
                Verdict::Skipped => "SKIP",
            };
            let _ = writeln!(out, "  {tag}  {}: {}", c.name, c.detail);
        }
        if !self.quantities.is_empty() {
            let _ = writeln!(out, "  quantities:");
            for (k, v) in &self.quantities {
                let _ = writeln!(out, "    {k} = {}", rat_display(&v.0));
            }
        }
        let _ = writeln!(
            out,
            "result: {}",
            if self.passed { "PASS" } else { "FAIL" }
        );
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn equality_outcomes_render_both_sides() {
        let ok = CheckOutcome::equality("main identity", rat(1, 3), rat(1, 3));
        assert_eq!(ok.verdict, Verdict::Pass);
        assert_eq!(ok.detail, "1/3 == 1/3");
        let bad = CheckOutcome::equality("main identity", rat(1, 3), rat(1, 2));
        assert_eq!(bad.verdict, Verdict::Fail);
        assert_eq!(bad.detail, "1/3 != 1/2");
    }

    #[test]
    fn failing_check_flips_the_report() {
        let mut r = VerificationReport::new("t", 2, 1);
        r.push(CheckOutcome::pass("a", "fine"));
        assert!(r.passed);
        r.push(CheckOutcome::fail("b", "broken"));
        assert!(!r.passed);
        r.push(CheckOutcome::skipped("c", "not applicable"));
        assert!(!r.passed);
    }

    #[test]
    fn json_is_stable_and_exact() {
        let mut r = VerificationReport::new("t", 2, 3);
        r.record("chi_orb", rat(1, 3));
        r.push(CheckOutcome::pass("main identity", "1/3 == 1/3"));
        let a = r.to_json();
        let b = r.to_json();
        assert_eq!(a, b);
        assert!(a.contains("\"num\": 1"));
        assert!(a.contains("\"den\": 3"));
        assert!(!a.contains("0.333"));
    }

    #[test]
    fn text_rendering_has_one_line_per_check() {
        let mut r = VerificationReport::new("t", 1, 1);
        r.push(CheckOutcome::pass("a", "x"));
        r.push(CheckOutcome::skipped("b", "y"));
        let text = r.render_text();
        assert!(text.contains("  PASS  a: x"));
        assert!(text.contains("  SKIP  b: y"));
        assert!(text.trim_end().ends_with("result: PASS"));
    }
}
