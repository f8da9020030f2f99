//! Named verification suites behind a common trait, selected at run time.

mod suites;

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

pub use suites::{
    AdmissibleSuite, CoincideSuite, DimsSuite, GaussSuite, LinSuite, PadicSuite, RoundtripSuite, SpanningSuite,
    UnitSuite, VanishSuite,
};

/// Parameters shared by every suite. `None` means "the suite's default sweep".
#[derive(Debug, Clone, Serialize)]
pub struct VerifyConfig {
    pub p: Option<u64>,
    pub n: Option<u32>,
    pub k: Option<u32>,
    pub eps: i64,
    /// Relative precision `N` of the p-adic context.
    pub cap: u32,
    pub seed: u64,
    /// Overrides the per-suite sample counts.
    pub samples: Option<usize>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            p: None,
            n: None,
            k: None,
            eps: -1,
            cap: 40,
            seed: 0,
            samples: None,
        }
    }
}

impl VerifyConfig {
    pub(crate) fn primes(&self, default: &[u64]) -> Vec<u64> {
        self.p.map_or_else(|| default.to_vec(), |p| vec![p])
    }

    pub(crate) fn levels(&self, default: impl IntoIterator<Item = u32>) -> Vec<u32> {
        self.n.map_or_else(|| default.into_iter().collect(), |n| vec![n])
    }

    pub(crate) fn weights(&self, default: impl IntoIterator<Item = u32>) -> Vec<u32> {
        self.k.map_or_else(|| default.into_iter().collect(), |k| vec![k])
    }

    pub(crate) fn samples_or(&self, default: usize) -> usize {
        self.samples.unwrap_or(default)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    /// The statement under test.
    pub checks: String,
    pub passed: bool,
    pub cases: usize,
    pub failures: Vec<String>,
}

impl SuiteReport {
    pub fn new(suite: &dyn Suite) -> Self {
        SuiteReport {
            suite: suite.name().to_string(),
            checks: suite.checks().to_string(),
            passed: true,
            cases: 0,
            failures: Vec::new(),
        }
    }

    /// Records one case; failures keep their description.
    pub fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.passed = false;
            if self.failures.len() < 50 {
                self.failures.push(what());
            }
        }
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: {} ({} cases, {} failures)",
            if self.passed { "PASS" } else { "FAIL" },
            self.suite,
            self.checks,
            self.cases,
            self.failures.len()
        )
    }
}

pub trait Suite: Send + Sync {
    fn name(&self) -> &'static str;
    fn checks(&self) -> &'static str;
    fn run(&self, cfg: &VerifyConfig) -> Result<SuiteReport>;
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub config: VerifyConfig,
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
}

#[derive(Default)]
pub struct SuiteRegistry {
    suites: Vec<Box<dyn Suite>>,
}

impl SuiteRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Every suite this crate provides.
    pub fn with_builtin() -> Self {
        let mut r = Self::new();
        r.register(Box::new(LinSuite));
        r.register(Box::new(PadicSuite));
        r.register(Box::new(DimsSuite));
        r.register(Box::new(CoincideSuite));
        r.register(Box::new(VanishSuite));
        r.register(Box::new(RoundtripSuite));
        r.register(Box::new(AdmissibleSuite));
        r.register(Box::new(UnitSuite));
        r.register(Box::new(SpanningSuite));
        r.register(Box::new(GaussSuite));
        r
    }

    /// Replaces any suite of the same name.
    pub fn register(&mut self, suite: Box<dyn Suite>) {
        self.suites.retain(|s| s.name() != suite.name());
        self.suites.push(suite);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.suites.iter().map(|s| s.name()).collect()
    }

    pub fn get(&self, name: &str) -> Option<&dyn Suite> {
        self.suites.iter().find(|s| s.name() == name).map(|s| s.as_ref())
    }

    /// Runs one suite by name, or every suite for `"all"`.
    pub fn run(&self, name: &str, cfg: &VerifyConfig) -> Result<VerifyReport> {
        let selected: Vec<&dyn Suite> = if name == "all" {
            self.suites.iter().map(|s| s.as_ref()).collect()
        } else {
            vec![self.get(name).ok_or_else(|| {
                Error::Malformed(format!("unknown suite {name:?}; known: all, {}", self.names().join(", ")))
            })?]
        };
        let suites = selected.into_iter().map(|s| s.run(cfg)).collect::<Result<Vec<_>>>()?;
        Ok(VerifyReport {
            config: cfg.clone(),
            passed: suites.iter().all(|s| s.passed),
            suites,
        })
    }
}
