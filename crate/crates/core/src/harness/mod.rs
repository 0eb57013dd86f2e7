//! Random instance generation and the property suite.

pub mod generate;
pub mod properties;
pub mod random;
pub mod suite;

pub use generate::{
    gen_arbitrary_unit_interval, gen_compatible_pair, gen_generic_projections, gen_strict,
    gen_strict_commuting, generate, Generated, GeneratorConfig, GeneratorKind, Padding,
    DEFAULT_MARGIN,
};
pub use random::{derive_seed, haar_unitary, rng_from_seed, SuiteRng};
pub use suite::{
    run_properties, run_property, run_property_suite, Bound, Property, PropertyRecord, Schedule,
    SuiteReport, TrialCtx, TrialFailure,
};
