//! The property-suite runner.
//!
//! A property is a named check that turns one seeded trial into a defect
//! (a non-negative residual; boolean properties use 0 for "holds" and 1 for
//! "fails"). Trial `i` of property `name` runs at dimension `1 + i % max_dim`
//! with an RNG seeded by `derive_seed(seed, name, i)`, so a report does not
//! depend on how trials are scheduled.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::random::{derive_seed, rng_from_seed, SuiteRng};
use crate::error::{Error, Result};
use crate::matrixcore::Tolerance;

/// Threshold a property's defect is compared against.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Bound {
    /// `tol_res` of the suite tolerance
    Residual,
    /// `tol_eig` of the suite tolerance
    Eigen,
    Fixed(f64),
    /// defect must be exactly zero
    Exact,
}

impl Bound {
    pub fn value(self, tol: &Tolerance) -> f64 {
        match self {
            Bound::Residual => tol.tol_res,
            Bound::Eigen => tol.tol_eig,
            Bound::Fixed(v) => v,
            Bound::Exact => 0.0,
        }
    }
}

pub struct TrialCtx {
    pub rng: SuiteRng,
    /// Base dimension of this trial.
    pub dim: usize,
    pub trial: usize,
    pub tol: Tolerance,
}

pub type PropertyFn = fn(&mut TrialCtx) -> Result<f64>;

#[derive(Clone, Copy)]
pub struct Property {
    pub name: &'static str,
    pub bound: Bound,
    pub check: PropertyFn,
}

impl Property {
    pub const fn new(name: &'static str, bound: Bound, check: PropertyFn) -> Self {
        Self { name, bound, check }
    }
}

impl std::fmt::Debug for Property {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Property").field("name", &self.name).field("bound", &self.bound).finish()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialFailure {
    pub trial: usize,
    pub dim: usize,
    /// Defect, or `None` when the trial raised an error.
    pub residual: Option<f64>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyRecord {
    pub name: String,
    pub trials: usize,
    pub failures: usize,
    /// Largest defect over trials that produced one.
    pub max_residual: f64,
    pub tolerance: f64,
    /// Wall-clock seconds; the only field that varies between identical runs.
    pub elapsed: f64,
    pub first_failure: Option<TrialFailure>,
}

impl PropertyRecord {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub trials: usize,
    pub max_dim: usize,
    pub tol: Tolerance,
    pub properties: Vec<PropertyRecord>,
    pub passed: bool,
    pub elapsed: f64,
}

impl SuiteReport {
    /// The report with every timing field zeroed, for run-to-run comparison.
    pub fn without_timing(&self) -> SuiteReport {
        let mut r = self.clone();
        r.elapsed = 0.0;
        for p in &mut r.properties {
            p.elapsed = 0.0;
        }
        r
    }

    pub fn property(&self, name: &str) -> Option<&PropertyRecord> {
        self.properties.iter().find(|p| p.name == name)
    }

    pub fn failures(&self) -> usize {
        self.properties.iter().map(|p| p.failures).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Schedule {
    Serial,
    Parallel,
}

fn run_trial(prop: &Property, seed: u64, trial: usize, max_dim: usize, tol: &Tolerance) -> (usize, Result<f64>) {
    let dim = 1 + trial % max_dim;
    let mut ctx = TrialCtx {
        rng: rng_from_seed(derive_seed(seed, prop.name, trial as u64)),
        dim,
        trial,
        tol: *tol,
    };
    (dim, (prop.check)(&mut ctx))
}

pub fn run_property(
    prop: &Property,
    trials: usize,
    max_dim: usize,
    seed: u64,
    tol: &Tolerance,
    schedule: Schedule,
) -> PropertyRecord {
    let start = Instant::now();
    let run = |i| run_trial(prop, seed, i, max_dim, tol);
    let outcomes: Vec<(usize, Result<f64>)> = match schedule {
        Schedule::Serial => (0..trials).map(run).collect(),
        Schedule::Parallel => (0..trials).into_par_iter().map(run).collect(),
    };
    let bound = prop.bound.value(tol);
    let mut record = PropertyRecord {
        name: prop.name.to_string(),
        trials,
        failures: 0,
        max_residual: 0.0,
        tolerance: bound,
        elapsed: 0.0,
        first_failure: None,
    };
    for (trial, (dim, outcome)) in outcomes.into_iter().enumerate() {
        let failure = match outcome {
            Ok(r) if r.is_finite() => {
                record.max_residual = record.max_residual.max(r);
                (r > bound).then(|| (Some(r), format!("defect {r:e} exceeds {bound:e}")))
            }
            Ok(r) => Some((None, format!("non-finite defect {r}"))),
            Err(e) => Some((None, e.to_string())),
        };
        if let Some((residual, detail)) = failure {
            record.failures += 1;
            record.first_failure.get_or_insert(TrialFailure { trial, dim, residual, detail });
        }
    }
    record.elapsed = start.elapsed().as_secs_f64();
    record
}

pub fn run_properties(
    props: &[Property],
    trials: usize,
    max_dim: usize,
    seed: u64,
    tol: &Tolerance,
    schedule: Schedule,
) -> Result<SuiteReport> {
    if trials == 0 || max_dim == 0 {
        return Err(Error::InvalidConfig("trials and max_dim must be at least 1".into()));
    }
    let start = Instant::now();
    let properties: Vec<PropertyRecord> = props
        .iter()
        .map(|p| run_property(p, trials, max_dim, seed, tol, schedule))
        .collect();
    let passed = properties.iter().all(PropertyRecord::passed);
    Ok(SuiteReport {
        seed,
        trials,
        max_dim,
        tol: *tol,
        properties,
        passed,
        elapsed: start.elapsed().as_secs_f64(),
    })
}

/// Runs every registered property in parallel.
pub fn run_property_suite(
    trials: usize,
    max_dim: usize,
    seed: u64,
    tol: &Tolerance,
) -> Result<SuiteReport> {
    run_properties(super::properties::registry(), trials, max_dim, seed, tol, Schedule::Parallel)
}
