//! Static registry of suites and their expected outcomes.
//!
//! Negative results are part of the manifest: a suite whose inequality is
//! known to fail must reproduce its failure (and, where documented, the
//! failure interval) to count as met.

use serde::Serialize;

use super::{ScanReport, SuiteConfig};
use crate::error::{Error, Result};

/// Endpoint tolerance when matching a documented failure interval.
pub const INTERVAL_MATCH_TOL: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", content = "intervals", rename_all = "kebab-case")]
pub enum Expectation {
    Pass,
    /// Must fail somewhere; the location is reported, not asserted.
    FailAnywhere,
    /// Must fail exactly on these intervals (endpoints within
    /// [`INTERVAL_MATCH_TOL`]).
    FailOn(Vec<(f64, f64)>),
}

impl Expectation {
    pub fn met_by(&self, report: &ScanReport) -> bool {
        match self {
            Expectation::Pass => report.passed,
            Expectation::FailAnywhere => !report.passed,
            Expectation::FailOn(expected) => {
                !report.passed
                    && report.failure_intervals.len() == expected.len()
                    && report.failure_intervals.iter().zip(expected).all(|(got, want)| {
                        (got.0 - want.0).abs() <= INTERVAL_MATCH_TOL && (got.1 - want.1).abs() <= INTERVAL_MATCH_TOL
                    })
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpectedScan {
    pub report: ScanReport,
    pub expectation: Expectation,
    pub met: bool,
}

/// A scalar fact established by a suite (a constant, a threshold, a
/// derivative estimate).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub expected: String,
    pub passed: bool,
}

/// Scientific notation for small magnitudes, plain otherwise.
fn num(x: f64) -> String {
    if x != 0.0 && x.abs() < 1e-3 {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

impl Check {
    pub fn within(name: impl Into<String>, value: f64, target: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            value,
            expected: format!("{} +/- {}", num(target), num(tol)),
            passed: (value - target).abs() <= tol,
        }
    }

    pub fn at_most(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            value,
            expected: format!("<= {}", num(bound)),
            passed: value <= bound,
        }
    }

    pub fn below(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            value,
            expected: format!("< {}", num(bound)),
            passed: value < bound,
        }
    }

    pub fn at_least(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            value,
            expected: format!(">= {}", num(bound)),
            passed: value >= bound,
        }
    }

    pub fn above(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            value,
            expected: format!("> {}", num(bound)),
            passed: value > bound,
        }
    }

    pub fn in_range(name: impl Into<String>, value: f64, lo: f64, hi: f64) -> Self {
        Self {
            name: name.into(),
            value,
            expected: format!("in [{}, {}]", num(lo), num(hi)),
            passed: (lo..=hi).contains(&value),
        }
    }

    /// A measured quantity with no pass/fail criterion attached.
    pub fn report(name: impl Into<String>, value: f64) -> Self {
        Self {
            name: name.into(),
            value,
            expected: "reported".into(),
            passed: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteOutcome {
    pub id: String,
    pub scans: Vec<ExpectedScan>,
    pub checks: Vec<Check>,
}

impl SuiteOutcome {
    pub fn new(id: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            scans: Vec::new(),
            checks: Vec::new(),
        }
    }

    pub fn expect(&mut self, report: ScanReport, expectation: Expectation) {
        let met = expectation.met_by(&report);
        self.scans.push(ExpectedScan {
            report,
            expectation,
            met,
        });
    }

    pub fn check(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn ok(&self) -> bool {
        self.scans.iter().all(|s| s.met) && self.checks.iter().all(|c| c.passed)
    }

    pub fn scan(&self, suite_id: &str) -> Option<&ScanReport> {
        self.scans.iter().map(|s| &s.report).find(|r| r.suite_id == suite_id)
    }

    pub fn check_named(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn absorb(&mut self, other: SuiteOutcome) {
        self.scans.extend(other.scans);
        self.checks.extend(other.checks);
    }
}

type SuiteFn = fn(&SuiteConfig) -> Result<SuiteOutcome>;

struct Entry {
    id: &'static str,
    run: SuiteFn,
}

const SUITES: &[Entry] = &[
    Entry {
        id: "wallis",
        run: super::suite_wallis,
    },
    Entry {
        id: "cos-exp",
        run: super::suite_cos_exp,
    },
    Entry {
        id: "q2-fail",
        run: super::suite_q2_fail,
    },
    Entry {
        id: "q34",
        run: super::suite_q34,
    },
    Entry {
        id: "g-max",
        run: super::suite_g_max,
    },
    Entry {
        id: "monotone",
        run: super::suite_monotone,
    },
    Entry {
        id: "hemisphere",
        run: super::suite_hemisphere,
    },
    Entry {
        id: "one-sided",
        run: super::suite_one_sided_default,
    },
    Entry {
        id: "two-sided",
        run: super::suite_two_sided_default,
    },
    Entry {
        id: "two-sided-n2",
        run: super::suite_two_sided_n2,
    },
    Entry {
        id: "cos-powers",
        run: super::suite_cos_powers,
    },
    Entry {
        id: "twofifths",
        run: super::suite_twofifths,
    },
    Entry {
        id: "large-b",
        run: super::suite_large_b,
    },
    Entry {
        id: "gaussian",
        run: super::suite_gaussian,
    },
    Entry {
        id: "density",
        run: crate::mc::suite_density,
    },
    Entry {
        id: "q-excess",
        run: super::suite_q_excess,
    },
    Entry {
        id: "product",
        run: crate::product::suite_product,
    },
];

/// Suite identifiers in manifest order.
pub fn suite_ids() -> Vec<&'static str> {
    SUITES.iter().map(|e| e.id).collect()
}

pub fn run_suite(id: &str, cfg: &SuiteConfig) -> Result<SuiteOutcome> {
    cfg.validate()?;
    let entry = SUITES.iter().find(|e| e.id == id).ok_or_else(|| Error::Unknown {
        kind: "suite",
        id: id.to_string(),
    })?;
    (entry.run)(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(passed: bool, intervals: Vec<(f64, f64)>) -> ScanReport {
        ScanReport {
            suite_id: "t".into(),
            grid_size: 100,
            passed,
            max_violation: if passed { 0.0 } else { 1.0 },
            argmax: 0.0,
            failure_intervals: intervals.clone(),
            tolerance_intervals: intervals,
        }
    }

    #[test]
    fn expectations() {
        assert!(Expectation::Pass.met_by(&report(true, vec![])));
        assert!(!Expectation::Pass.met_by(&report(false, vec![(0.0, 1.0)])));
        assert!(Expectation::FailAnywhere.met_by(&report(false, vec![(0.0, 1.0)])));
        let want = Expectation::FailOn(vec![(1.05858, 1.18588)]);
        assert!(want.met_by(&report(false, vec![(1.05857, 1.18590)])));
        assert!(!want.met_by(&report(false, vec![(1.0580, 1.18588)])));
        assert!(!want.met_by(&report(true, vec![])));
    }

    #[test]
    fn unknown_suite() {
        let r = run_suite("nope", &SuiteConfig::default());
        assert!(matches!(r, Err(Error::Unknown { .. })));
        assert!(suite_ids().contains(&"q2-fail"));
    }
}
