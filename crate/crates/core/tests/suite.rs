use std::time::Instant;

use rand::Rng;

use abscompat::compatibility::compatibility_defect;
use abscompat::harness::properties::{hermitian_noise, registry};
use abscompat::harness::{
    gen_compatible_pair, run_properties, run_property_suite, Bound, GeneratorConfig,
    GeneratorKind, Property, Schedule, TrialCtx,
};
use abscompat::{Result, Tolerance};

fn tol() -> Tolerance {
    Tolerance::default()
}

#[test]
fn smoke_run_is_fast_and_green() {
    let start = Instant::now();
    let report = run_property_suite(1, 1, 0, &tol()).unwrap();
    assert!(report.passed, "{:#?}", report.properties.iter().filter(|p| !p.passed()).collect::<Vec<_>>());
    assert!(start.elapsed().as_secs_f64() < 1.0);
    assert_eq!(report.properties.len(), registry().len());
}

#[test]
fn same_seed_same_report() {
    let first = run_property_suite(6, 5, 99, &tol()).unwrap();
    let second = run_property_suite(6, 5, 99, &tol()).unwrap();
    assert_eq!(first.without_timing(), second.without_timing());
}

#[test]
fn serial_and_parallel_agree() {
    let serial = run_properties(registry(), 5, 6, 3, &tol(), Schedule::Serial).unwrap();
    let parallel = run_properties(registry(), 5, 6, 3, &tol(), Schedule::Parallel).unwrap();
    assert_eq!(serial.without_timing(), parallel.without_timing());
}

#[test]
fn zero_trials_are_rejected() {
    assert!(run_property_suite(0, 4, 0, &tol()).is_err());
    assert!(run_property_suite(4, 0, 0, &tol()).is_err());
}

fn noisy_pair(ctx: &mut TrialCtx) -> Result<f64> {
    let cfg = GeneratorConfig::new(GeneratorKind::CompatiblePair, ctx.dim, ctx.rng.random());
    let (a, b) = gen_compatible_pair(&cfg)?;
    let noise = hermitian_noise(&mut ctx.rng, b.dim(), 1e-2);
    Ok(compatibility_defect(&a, &(b.matrix() + &noise))?.op_norm())
}

#[test]
fn injected_noise_is_recorded_as_failure() {
    let props = [Property::new("compatibility.generated_pair_compatible", Bound::Residual, noisy_pair)];
    let report = run_properties(&props, 40, 8, 1, &tol(), Schedule::Parallel).unwrap();
    let record = &report.properties[0];
    assert!(!report.passed);
    assert_eq!(record.failures, record.trials);
    assert!(record.max_residual >= 1e-3);
    assert!(record.first_failure.as_ref().unwrap().residual.unwrap() > tol().tol_res);
}

fn erroring(_: &mut TrialCtx) -> Result<f64> {
    Err(abscompat::Error::NotGeneric)
}

#[test]
fn errors_count_as_failures() {
    let props = [Property::new("always_errors", Bound::Exact, erroring)];
    let report = run_properties(&props, 3, 2, 0, &tol(), Schedule::Serial).unwrap();
    let record = &report.properties[0];
    assert_eq!(record.failures, 3);
    let first = record.first_failure.as_ref().unwrap();
    assert_eq!((first.trial, first.dim, first.residual), (0, 1, None));
}

#[test]
fn report_round_trips_through_json() {
    let report = run_property_suite(2, 3, 5, &tol()).unwrap();
    let text = abscompat::format::to_json_string(&report).unwrap();
    let back: abscompat::harness::SuiteReport = serde_json::from_str(&text).unwrap();
    assert_eq!(back, report);
}
